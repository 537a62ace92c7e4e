use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;

use cocyc::pbm::{write_p1, write_p4};
use cocyc::ResultDocument;
use cocyc_core::{object_components, BinaryImage, Pixel};
use tempfile::TempDir;

const RING: &str = "###\n#.#\n###";

struct Outcome {
    code: i32,
    stderr: String,
    doc: Option<ResultDocument>,
    json: Option<String>,
}

fn write_input(dir: &TempDir, name: &str, bytes: &[u8]) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, bytes).unwrap();
    path
}

fn cocyc(dir: &TempDir, input: &Path, extra: &[&str]) -> Outcome {
    let output = dir.path().join("out.json");
    let _ = std::fs::remove_file(&output);
    let out = Command::new(env!("CARGO_BIN_EXE_cocyc"))
        .arg("compute")
        .arg("--input")
        .arg(input)
        .arg("--output")
        .arg(&output)
        .args(extra)
        .output()
        .unwrap();
    let json = std::fs::read_to_string(&output).ok();
    Outcome {
        code: out.status.code().unwrap(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
        doc: json.as_deref().map(|j| serde_json::from_str(j).unwrap()),
        json,
    }
}

#[test]
fn ring_invariant_verified() {
    let dir = TempDir::new().unwrap();
    let input = write_input(&dir, "ring.pbm", write_p1(&BinaryImage::from_ascii(RING)).as_bytes());
    let svg = dir.path().join("ring.svg");
    let out = cocyc(&dir, &input, &["--mode", "invariant", "--verify", "--svg", svg.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let doc = out.doc.unwrap();
    assert_eq!(doc.schema, 1);
    assert_eq!(doc.mode, "invariant");
    assert_eq!(doc.seed, None);
    assert_eq!(doc.objects.len(), 1);
    assert_eq!((doc.objects[0].pixels, doc.objects[0].holes), (8, 1));
    assert!(doc.verification.unwrap().passed);
    let picture = std::fs::read_to_string(svg).unwrap();
    assert!(picture.starts_with("<svg") && picture.contains("<line"));
}

#[test]
fn all_background_gives_no_objects() {
    let dir = TempDir::new().unwrap();
    let input = write_input(&dir, "empty.pbm", b"P1\n4 3\n0000\n0000\n0000\n");
    let out = cocyc(&dir, &input, &["--verify"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.doc.unwrap().objects.is_empty());
}

#[test]
fn bad_input_exits_with_2() {
    let dir = TempDir::new().unwrap();
    let truncated = write_input(&dir, "t.pbm", b"P1\n3 3\n1 1 1\n1 0");
    let out = cocyc(&dir, &truncated, &[]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("truncated"), "{}", out.stderr);
    assert!(out.json.is_none());

    let missing = dir.path().join("missing.pbm");
    assert_eq!(cocyc(&dir, &missing, &[]).code, 2);

    let big = write_input(&dir, "big.pbm", b"P4\n5000 1\n");
    assert_eq!(cocyc(&dir, &big, &[]).code, 2);
    let small = write_input(&dir, "small.pbm", write_p1(&BinaryImage::from_ascii(RING)).as_bytes());
    assert_eq!(cocyc(&dir, &small, &["--max-width", "2"]).code, 2);

    assert_eq!(cocyc(&dir, &small, &["--level", "99"]).code, 2);
    assert_eq!(cocyc(&dir, &small, &["--mode", "invariant", "--anchor", "1,1"]).code, 2);
    assert_eq!(cocyc(&dir, &small, &["--mode", "invariant", "--anchor", "0,0", "--anchor", "2,2"]).code, 2);
    assert_eq!(cocyc(&dir, &small, &["--mode", "sideways"]).code, 2);
}

fn sample() -> BinaryImage {
    BinaryImage::from_ascii(
        "##########..\n\
         #..#.....#..\n\
         #..#.###.#.#\n\
         ####.#.#.#..\n\
         .....###.###\n\
         ##.......#.#\n\
         ##..####.###\n\
         ....#..#....",
    )
}

#[test]
fn output_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let input = write_input(&dir, "s.pbm", &write_p4(&sample()));
    for args in [&["--seed", "17", "--verify"][..], &["--mode", "invariant"][..], &["--level", "2"][..]] {
        let a = cocyc(&dir, &input, args);
        let b = cocyc(&dir, &input, args);
        assert_eq!(a.code, 0, "{}", a.stderr);
        assert_eq!(a.json, b.json);
    }
}

#[test]
fn level_dump_is_written() {
    let dir = TempDir::new().unwrap();
    let input = write_input(&dir, "s.pbm", write_p1(&sample()).as_bytes());
    let dumps = dir.path().join("levels");
    let out = cocyc(&dir, &input, &["--dump-dir", dumps.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let height = out.doc.unwrap().pyramid_height;
    for k in 0..=height {
        let text = std::fs::read_to_string(dumps.join(format!("level_{k}.txt"))).unwrap();
        assert!(text.starts_with(&format!("level {k} of {height}\n")));
    }
    assert!(!dumps.join(format!("level_{}.txt", height + 1)).exists());
}

#[test]
fn p1_and_p4_agree() {
    let dir = TempDir::new().unwrap();
    let p1 = write_input(&dir, "s1.pbm", write_p1(&sample()).as_bytes());
    let p4 = write_input(&dir, "s4.pbm", &write_p4(&sample()));
    assert_eq!(cocyc(&dir, &p1, &["--seed", "3"]).json, cocyc(&dir, &p4, &["--seed", "3"]).json);
}

#[test]
fn intermediate_level_is_verified() {
    let dir = TempDir::new().unwrap();
    let input = write_input(&dir, "s.pbm", write_p1(&sample()).as_bytes());
    let top = cocyc(&dir, &input, &[]).doc.unwrap().pyramid_height;
    for level in 0..=top {
        let out = cocyc(&dir, &input, &["--level", &level.to_string(), "--verify"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let doc = out.doc.unwrap();
        assert_eq!(doc.level, level);
        if level == top {
            // {alpha_i, beta}: two cracks per hole.
            assert!(doc.objects.iter().flat_map(|o| &o.cocycles).all(|h| h.cracks.len() == 2));
        }
    }
}

type Shape = BTreeSet<(Option<[u32; 2]>, usize, BTreeSet<Vec<[[u32; 2]; 2]>>)>;

fn shape(doc: &ResultDocument, map: impl Fn([u32; 2]) -> [u32; 2], pixel: impl Fn([u32; 2]) -> [u32; 2]) -> Shape {
    doc.objects
        .iter()
        .map(|o| {
            let holes = o
                .cocycles
                .iter()
                .map(|h| {
                    let mut v: Vec<[[u32; 2]; 2]> = h
                        .cracks
                        .iter()
                        .map(|&[a, b]| {
                            let (a, b) = (map(a), map(b));
                            if a <= b {
                                [a, b]
                            } else {
                                [b, a]
                            }
                        })
                        .collect();
                    v.sort_unstable();
                    v
                })
                .collect();
            (o.anchor.map(&pixel), o.pixels, holes)
        })
        .collect()
}

#[test]
fn rotated_input_gives_rotated_output() {
    let dir = TempDir::new().unwrap();
    let img = sample();
    let h = img.height();
    let anchors: Vec<Pixel> = object_components(&img).iter().map(|o| o.first()).collect();
    let args = |anchors: &[Pixel]| {
        let mut v = vec!["--mode".to_string(), "invariant".into()];
        for a in anchors {
            v.push("--anchor".into());
            v.push(format!("{},{}", a.x, a.y));
        }
        v
    };
    let input = write_input(&dir, "a.pbm", write_p1(&img).as_bytes());
    let a = args(&anchors);
    let a: Vec<&str> = a.iter().map(String::as_str).collect();
    let original = cocyc(&dir, &input, &a).doc.unwrap();

    let rotated = img.rotate_cw();
    let rot_anchors: Vec<Pixel> = anchors.iter().map(|&p| img.rotate_pixel_cw(p)).collect();
    let input = write_input(&dir, "b.pbm", write_p1(&rotated).as_bytes());
    let b = args(&rot_anchors);
    let b: Vec<&str> = b.iter().map(String::as_str).collect();
    let turned = cocyc(&dir, &input, &b).doc.unwrap();

    let expected = shape(&original, |[x, y]| [h - y, x], |[x, y]| [h - 1 - y, x]);
    assert_eq!(shape(&turned, |c| c, |p| p), expected);
    assert_eq!((turned.width, turned.height), (original.height, original.width));
}
