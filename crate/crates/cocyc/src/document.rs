//! Runs the pipeline on an image and collects the JSON result document.

use cocyc_core::oracle::{basis_independent, betti, blocking_parity, boundary_complex, hole_cycle, is_cocycle};
use cocyc_core::{
    build_homology_level, cocycle_basis, down_project_all, BinaryImage, Cocycle, Crack, Mode, Pixel, Pyramid,
    PyramidConfig,
};
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub mode: Mode,
    pub seed: u64,
    pub level: usize,
    pub anchors: Vec<Pixel>,
    pub verify: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { mode: Mode::Fast, seed: 0, level: 0, anchors: Vec::new(), verify: false }
    }
}

/// `[[x1, y1], [x2, y2]]`, smaller corner first.
pub type CrackJson = [[u32; 2]; 2];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoleReport {
    pub hole: usize,
    pub cracks: Vec<CrackJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectReport {
    pub id: usize,
    pub pixels: usize,
    pub holes: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub anchor: Option<[u32; 2]>,
    pub cocycles: Vec<HoleReport>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub schema: u32,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    pub width: u32,
    pub height: u32,
    pub pyramid_height: usize,
    pub level: usize,
    pub objects: Vec<ObjectReport>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verification: Option<Verification>,
}

impl ResultDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }
}

pub fn crack_json(c: Crack) -> CrackJson {
    [[c.a.0, c.a.1], [c.b.0, c.b.1]]
}

/// The pyramid and the per object, per hole cocycles at every level.
pub struct Computation {
    pub pyramid: Pyramid,
    pub cocycles: Vec<Vec<Vec<Cocycle>>>,
}

impl Computation {
    pub fn at_level(&self, object: usize, level: usize) -> impl Iterator<Item = &Cocycle> {
        self.cocycles[object].iter().map(move |chain| &chain[level])
    }
}

pub fn compute(img: &BinaryImage, opts: &RunOptions) -> cocyc_core::Result<Computation> {
    let cfg = match opts.mode {
        Mode::Fast => PyramidConfig::fast(opts.seed),
        Mode::Invariant => PyramidConfig::invariant(),
    }
    .with_anchors(opts.anchors.clone());
    let pyramid = Pyramid::build(img, &cfg)?;
    if opts.level > pyramid.height() {
        return Err(cocyc_core::Error::LevelOutOfRange { level: opts.level, height: pyramid.height() });
    }
    let mut cocycles = Vec::with_capacity(pyramid.objects().len());
    for obj in pyramid.objects() {
        let h = build_homology_level(&pyramid, obj)?;
        let per: Vec<Vec<Cocycle>> = cocycle_basis(&h)
            .iter()
            .map(|t| down_project_all(&pyramid, &h, t).map(|(chain, _)| chain))
            .collect::<cocyc_core::Result<_>>()?;
        cocycles.push(per);
    }
    Ok(Computation { pyramid, cocycles })
}

/// Independent checks of the computed bases against the oracle.
pub fn verify(c: &Computation, level: usize) -> Verification {
    let p = &c.pyramid;
    let mut checks = 0;
    let mut failures = Vec::new();
    let mut check = |ok: bool, what: String| {
        checks += 1;
        if !ok {
            failures.push(what);
        }
    };
    check(p.euler_check_all(), "pyramid levels fail the Euler check".into());
    for (o, per) in c.cocycles.iter().enumerate() {
        let base = match boundary_complex(p, o, 0) {
            Ok(k) => k,
            Err(e) => {
                check(false, format!("object {o}: {e}"));
                continue;
            }
        };
        let (b0, b1) = betti(&base);
        check(b0 == 1 && b1 == per.len(), format!("object {o}: betti ({b0}, {b1}) but {} cocycles", per.len()));
        let basis: Vec<_> = per.iter().map(|chain| chain[0].edges.clone()).collect();
        for (i, edges) in basis.iter().enumerate() {
            check(is_cocycle(&base, edges).unwrap_or(false), format!("object {o} hole {i}: not a cocycle"));
        }
        check(basis_independent(&base, &basis).unwrap_or(false), format!("object {o}: basis is dependent"));
        for j in 0..per.len() {
            match hole_cycle(p, o, j) {
                Ok(g) => {
                    for (i, edges) in basis.iter().enumerate() {
                        check(
                            blocking_parity(edges, &g) == (i == j),
                            format!("object {o}: cocycle {i} has wrong parity on hole {j}"),
                        );
                    }
                }
                Err(e) => check(false, format!("object {o} hole {j}: {e}")),
            }
        }
        if level > 0 && !per.is_empty() {
            match boundary_complex(p, o, level) {
                Ok(k) => {
                    for (i, chain) in per.iter().enumerate() {
                        check(
                            is_cocycle(&k, &chain[level].edges).unwrap_or(false),
                            format!("object {o} hole {i}: not a cocycle at level {level}"),
                        );
                    }
                }
                Err(e) => check(false, format!("object {o} level {level}: {e}")),
            }
        }
    }
    Verification { passed: failures.is_empty(), checks, failures }
}

pub fn document(img: &BinaryImage, c: &Computation, opts: &RunOptions) -> ResultDocument {
    let p = &c.pyramid;
    let pm = p.pixel_map();
    let objects = p
        .objects()
        .iter()
        .enumerate()
        .map(|(o, obj)| ObjectReport {
            id: o,
            pixels: obj.len(),
            holes: c.cocycles[o].len(),
            anchor: p.order().map(|order| {
                let a = order.field(o).anchor();
                [a.x, a.y]
            }),
            cocycles: c
                .at_level(o, opts.level)
                .map(|cocycle| {
                    let mut cracks: Vec<CrackJson> =
                        cocycle.edges.iter().map(|&e| crack_json(pm.edge_to_crack(e))).collect();
                    cracks.sort_unstable();
                    HoleReport { hole: cocycle.hole, cracks }
                })
                .collect(),
        })
        .collect();
    ResultDocument {
        schema: SCHEMA,
        mode: match opts.mode {
            Mode::Fast => "fast".into(),
            Mode::Invariant => "invariant".into(),
        },
        seed: (opts.mode == Mode::Fast).then_some(opts.seed),
        width: img.width(),
        height: img.height(),
        pyramid_height: p.height(),
        level: opts.level,
        objects,
        verification: opts.verify.then(|| verify(c, opts.level)),
    }
}
