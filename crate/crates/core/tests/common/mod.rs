#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use cocyc_core::oracle::{boundary_complex, is_cocycle};
use cocyc_core::{
    build_homology_level, cocycle_basis, down_project_all, BinaryImage, Cocycle, Crack, EdgeId, HomologyLevel,
    ObjectComplement, Pixel, Pyramid, Side,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(w: u32, h: u32, density: f64, seed: u64) -> BinaryImage {
    let mut r = rng(seed);
    BinaryImage::from_fn(w, h, |_, _| r.random_bool(density))
}

/// Base cocycles of every hole of every object, with the homology levels.
pub struct Run {
    pub levels: Vec<HomologyLevel>,
    /// Per object, per hole.
    pub cocycles: Vec<Vec<Cocycle>>,
    /// Down projection work per hole.
    pub steps: Vec<usize>,
}

pub fn run(p: &Pyramid) -> Run {
    let mut out = Run { levels: Vec::new(), cocycles: Vec::new(), steps: Vec::new() };
    for obj in p.objects() {
        let h = build_homology_level(p, obj).expect("homology level");
        let mut per = Vec::new();
        for t in cocycle_basis(&h) {
            let (chain, stats) = down_project_all(p, &h, &t).expect("projection");
            out.steps.push(stats.steps);
            per.push(chain.into_iter().next().unwrap());
        }
        out.cocycles.push(per);
        out.levels.push(h);
    }
    out
}

/// Objects as pixel sets mapped to their cocycles as crack sets.
pub type Geometric = BTreeMap<Vec<Pixel>, BTreeSet<Vec<Crack>>>;

pub fn geometric(p: &Pyramid, r: &Run) -> Geometric {
    let pm = p.pixel_map();
    p.objects()
        .iter()
        .zip(&r.cocycles)
        .map(|(o, cs)| {
            let set = cs
                .iter()
                .map(|c| {
                    let mut v: Vec<Crack> = c.edges.iter().map(|&e| pm.edge_to_crack(e)).collect();
                    v.sort();
                    v
                })
                .collect();
            (o.pixels.clone(), set)
        })
        .collect()
}

/// Image of a geometric result under a clockwise quarter turn of an image of
/// the given height.
pub fn rotate_geometric(g: &Geometric, img: &BinaryImage) -> Geometric {
    let pm = cocyc_core::PixelMap::new(img.width(), img.height());
    g.iter()
        .map(|(pixels, set)| {
            let mut px: Vec<Pixel> = pixels.iter().map(|&q| img.rotate_pixel_cw(q)).collect();
            px.sort();
            let set = set
                .iter()
                .map(|cracks| {
                    let mut v: Vec<Crack> = cracks.iter().map(|&c| pm.rotate_crack_cw(c)).collect();
                    v.sort();
                    v
                })
                .collect();
            (px, set)
        })
        .collect()
}

/// A random simple foreground path from a pixel touching `hole` to a pixel
/// touching the outside, inside object `object`.
pub fn random_rag_path(p: &Pyramid, object: usize, hole: usize, r: &mut ChaCha8Rng) -> Vec<Pixel> {
    let obj = &p.objects()[object];
    let comp = ObjectComplement::new(p.image(), obj);
    let pm = p.pixel_map();
    let touches = |q: Pixel, want: Side| {
        pm.pixel_cracks(q).iter().any(|&e| {
            let [a, b] = pm.crack_sides(e);
            let other = if a == Some(q) { b } else { a };
            comp.side(other) == want
        })
    };
    let starts: Vec<Pixel> = obj.pixels.iter().copied().filter(|&q| touches(q, Side::Hole(hole))).collect();
    let ends: BTreeSet<Pixel> = obj.pixels.iter().copied().filter(|&q| touches(q, Side::Outer)).collect();
    let start = starts[r.random_range(0..starts.len())];
    let end = *ends.iter().nth(r.random_range(0..ends.len())).unwrap();
    // Breadth-first search with shuffled neighbour order.
    let mut prev: BTreeMap<Pixel, Pixel> = BTreeMap::new();
    let mut queue = VecDeque::from([start]);
    prev.insert(start, start);
    while let Some(q) = queue.pop_front() {
        if q == end {
            break;
        }
        let mut nbrs: Vec<Pixel> = p.image().neighbors(q).filter(|&n| obj.contains(n)).collect();
        for i in (1..nbrs.len()).rev() {
            nbrs.swap(i, r.random_range(0..=i));
        }
        for n in nbrs {
            if let std::collections::btree_map::Entry::Vacant(v) = prev.entry(n) {
                v.insert(q);
                queue.push_back(n);
            }
        }
    }
    let mut path = vec![end];
    let mut q = end;
    while q != start {
        q = prev[&q];
        path.push(q);
    }
    path.reverse();
    path
}

/// Every base cocycle of the run passes the oracle.
pub fn all_cocycles_pass(p: &Pyramid, r: &Run) -> bool {
    r.cocycles.iter().enumerate().all(|(o, cs)| {
        if cs.is_empty() {
            return true;
        }
        let k = boundary_complex(p, o, 0).unwrap();
        cs.iter().all(|c| is_cocycle(&k, &c.edges).unwrap())
    })
}

pub fn edges_of(c: &Cocycle) -> Vec<EdgeId> {
    c.edges.clone()
}
