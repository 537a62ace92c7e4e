//! Homology-generator level: the object's top face with a spanning tree of
//! its boundary contracted, leaving one self-loop per hole plus the outer one.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::{Object, ObjectComplement, Side};
use crate::map::{CornerId, EdgeId, LevelPair, VertexId, WorkMap};
use crate::pyramid::{Mode, Pyramid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LoopKind {
    Hole(usize),
    Outer,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyLevel {
    pub object: usize,
    /// The object's vertex at the top level.
    pub top_vertex: VertexId,
    /// The single dual vertex left after contracting the spanning tree.
    pub base_vertex: CornerId,
    /// Hole loops in hole order, then the outer loop.
    pub self_loops: Vec<(EdgeId, LoopKind)>,
    /// Dual spanning tree edges, in contraction order.
    pub spanning_tree: Vec<EdgeId>,
    /// Self-loop -> its pre-image at the top level. Edge ids are stable, so
    /// this is the identity; it is kept explicit for the projection.
    pub loop_preimage: BTreeMap<EdgeId, EdgeId>,
    /// The top level with the tree contracted in its boundary graph.
    pub level: LevelPair,
}

impl HomologyLevel {
    pub fn hole_count(&self) -> usize {
        self.self_loops.iter().filter(|(_, k)| matches!(k, LoopKind::Hole(_))).count()
    }

    pub fn outer_loop(&self) -> EdgeId {
        self.self_loops.iter().find(|(_, k)| *k == LoopKind::Outer).expect("exactly one outer loop").0
    }

    pub fn hole_loop(&self, i: usize) -> Option<EdgeId> {
        self.self_loops.iter().find(|(_, k)| *k == LoopKind::Hole(i)).map(|l| l.0)
    }
}

/// The basis element `{alpha_i, beta}` of hole `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TopCocycle {
    pub hole: usize,
    /// `[alpha_i, beta]`.
    pub edges: [EdgeId; 2],
}

fn find(parent: &mut BTreeMap<CornerId, CornerId>, x: CornerId) -> CornerId {
    let mut r = x;
    while let Some(&p) = parent.get(&r) {
        if p == r {
            break;
        }
        r = p;
    }
    let mut y = x;
    while y != r {
        let next = parent[&y];
        parent.insert(y, r);
        y = next;
    }
    r
}

/// Contracts a spanning tree of the object's top face boundary.
///
/// Boundary edges are scanned from the largest to the smallest (edge order
/// keys in invariant mode, ids in fast mode); the ones closing a cycle stay
/// as self-loops and are classified by the complement side they face.
pub fn build_homology_level(p: &Pyramid, obj: &Object) -> Result<HomologyLevel> {
    if !obj.is_connected() {
        return Err(Error::NotConnected);
    }
    let pm = p.pixel_map();
    let index = p.object_of_vertex(pm.pixel_to_vertex(obj.first())).ok_or(Error::NotConnected)?;
    if p.objects()[index] != *obj {
        return Err(Error::NotConnected);
    }
    let top = p.top();
    let v = p.object_top_vertex(index).ok_or(Error::NotConnected)?;
    let darts: Vec<usize> = (0..top.vertex_of.len()).filter(|&d| top.vertex_of[d] == v).collect();
    let mut closure: Vec<EdgeId> = darts.iter().map(|&d| top.dart_edge(d as u32)).collect();
    closure.sort_unstable();
    closure.dedup();
    match (p.mode(), p.order()) {
        (Mode::Invariant, Some(order)) => {
            for &e in &closure {
                if order.key(e).is_none() {
                    return Err(Error::Inconsistent("object boundary edge without order key"));
                }
            }
            closure.sort_unstable_by(|a, b| order.key(*b).cmp(&order.key(*a)));
        }
        _ => closure.reverse(),
    }

    let mut wm = WorkMap::new(top);
    let mut uf: BTreeMap<CornerId, CornerId> = BTreeMap::new();
    let mut tree = Vec::new();
    let mut loops = Vec::new();
    for &e in &closure {
        let [a, b] = top.corner_endpoints(e).expect("closure edge exists");
        let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
        if ra == rb {
            loops.push(e);
            continue;
        }
        uf.insert(ra.max(rb), ra.min(rb));
        uf.entry(ra.min(rb)).or_insert(ra.min(rb));
        let pos = wm.position(e).expect("live");
        let (ca, cb) = (wm.corner_of[2 * pos], wm.corner_of[2 * pos + 1]);
        wm.remove_primal(pos, ca.max(cb), ca.min(cb));
        tree.push(e);
    }
    let level = wm.freeze();
    let base_vertex = match loops.first() {
        Some(&e) => level.corner_endpoints(e).expect("loop survives")[0],
        None => return Err(Error::Inconsistent("object face without outer boundary")),
    };
    for &e in &loops {
        if level.corner_endpoints(e) != Some([base_vertex, base_vertex]) {
            return Err(Error::Inconsistent("remaining edge is not a self-loop at the base vertex"));
        }
    }

    let complement = ObjectComplement::new(p.image(), obj);
    let mut self_loops = Vec::with_capacity(loops.len());
    let mut seen = BTreeSet::new();
    for &e in &loops {
        let sides = pm.crack_sides(e);
        let kinds: Vec<Side> = sides.iter().map(|&s| complement.side(s)).collect();
        let kind = match (kinds[0], kinds[1]) {
            (Side::Object, Side::Outer) | (Side::Outer, Side::Object) => LoopKind::Outer,
            (Side::Object, Side::Hole(i)) | (Side::Hole(i), Side::Object) => LoopKind::Hole(i),
            _ => return Err(Error::Inconsistent("self-loop does not separate the object from its complement")),
        };
        if !seen.insert(kind) {
            return Err(Error::Inconsistent("two self-loops face the same complement component"));
        }
        self_loops.push((e, kind));
    }
    if seen.len() != complement.hole_count() + 1 || !seen.contains(&LoopKind::Outer) {
        return Err(Error::Inconsistent("self-loops do not match the complement components"));
    }
    self_loops.sort_unstable_by_key(|l| l.1);
    let loop_preimage = self_loops.iter().map(|&(e, _)| (e, e)).collect();
    Ok(HomologyLevel {
        object: index,
        top_vertex: v,
        base_vertex,
        self_loops,
        spanning_tree: tree,
        loop_preimage,
        level,
    })
}

/// One `{alpha_i, beta}` per hole, in hole order.
pub fn cocycle_basis(h: &HomologyLevel) -> Vec<TopCocycle> {
    let beta = h.outer_loop();
    h.self_loops
        .iter()
        .filter_map(|&(e, k)| match k {
            LoopKind::Hole(i) => Some(TopCocycle { hole: i, edges: [e, beta] }),
            LoopKind::Outer => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{object_components, BinaryImage};
    use crate::pyramid::build_pyramid;

    fn level_of(art: &str, mode: Mode) -> HomologyLevel {
        let img = BinaryImage::from_ascii(art);
        let p = build_pyramid(&img, mode, 5);
        build_homology_level(&p, &p.objects()[0].clone()).unwrap()
    }

    #[test]
    fn solid_block_has_only_the_outer_loop() {
        let h = level_of("##\n##", Mode::Fast);
        assert_eq!(h.hole_count(), 0);
        assert_eq!(h.self_loops.len(), 1);
        assert!(cocycle_basis(&h).is_empty());
    }

    #[test]
    fn ring_and_frame() {
        for mode in [Mode::Fast, Mode::Invariant] {
            let ring = level_of("###\n#.#\n###", mode);
            assert_eq!(ring.hole_count(), 1);
            assert_eq!(cocycle_basis(&ring).len(), 1);
            let frame = level_of("#####\n#.#.#\n#####", mode);
            assert_eq!(frame.hole_count(), 2);
            let basis = cocycle_basis(&frame);
            assert_eq!(basis.iter().map(|t| t.hole).collect::<Vec<_>>(), [0, 1]);
            assert!(basis.iter().all(|t| t.edges[1] == frame.outer_loop()));
        }
    }

    #[test]
    fn face_boundary_meets_each_basis_element_twice() {
        let h = level_of("#####\n#.#.#\n#####", Mode::Invariant);
        let around = h.level.rotation(h.top_vertex);
        for t in cocycle_basis(&h) {
            let hits = around.iter().filter(|e| t.edges.contains(e)).count();
            assert_eq!(hits % 2, 0);
        }
    }

    #[test]
    fn disconnected_object_is_rejected() {
        let img = BinaryImage::from_ascii("#.#");
        let p = build_pyramid(&img, Mode::Fast, 0);
        let mut both = object_components(&img);
        let mut merged = both.remove(0);
        merged.pixels.extend(both.remove(0).pixels);
        merged.pixels.sort_unstable();
        assert_eq!(build_homology_level(&p, &merged), Err(Error::NotConnected));
    }
}
