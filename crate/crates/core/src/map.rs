//! Primal/dual plane graphs stored as one combinatorial map.
//!
//! Every edge carries two darts. `sigma` is the rotation around primal
//! vertices (regions) and `phi` the rotation around dual vertices (corners);
//! the two are tied by `phi = sigma . alpha` where `alpha` swaps the darts of
//! an edge. Contracting a primal edge deletes its darts from `phi` (removal in
//! the boundary graph); removing a primal edge deletes them from `sigma`
//! (contraction in the boundary graph).
//!
//! Edge ids are the base-level crack ids and never change, so an edge that
//! survives to a higher level keeps its id.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

/// Identifier of an edge (a base-level crack), shared by both graphs.
pub type EdgeId = u32;
/// Identifier of a primal vertex: the surviving base pixel index, or the exterior.
pub type VertexId = u32;
/// Identifier of a dual vertex: the surviving base corner index.
pub type CornerId = u32;

#[inline]
pub(crate) fn alpha(d: u32) -> u32 {
    d ^ 1
}

/// One level of the pyramid: the region adjacency graph and its boundary graph.
///
/// Darts are numbered locally: dart `2 i + s` is side `s` of `edges()[i]`.
/// Side 0 of a crack faces the pixel below (horizontal) or to the right
/// (vertical); side 1 faces the other way.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelPair {
    pub(crate) primal_edges: Vec<EdgeId>,
    pub(crate) dual_edges: Vec<EdgeId>,
    pub(crate) sigma: Vec<u32>,
    pub(crate) phi: Vec<u32>,
    pub(crate) vertex_of: Vec<VertexId>,
    pub(crate) corner_of: Vec<CornerId>,
    pub(crate) vertices: Vec<VertexId>,
    pub(crate) corners: Vec<CornerId>,
}

impl LevelPair {
    /// Sorted edge ids of the primal graph.
    pub fn edges(&self) -> &[EdgeId] {
        &self.primal_edges
    }

    /// Sorted edge ids of the boundary graph; equal to [`LevelPair::edges`]
    /// while the bijection is intact.
    pub fn dual_edges(&self) -> &[EdgeId] {
        &self.dual_edges
    }

    /// Sorted primal vertex ids.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// Sorted dual vertex ids.
    pub fn corners(&self) -> &[CornerId] {
        &self.corners
    }

    pub fn edge_count(&self) -> usize {
        self.primal_edges.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn corner_count(&self) -> usize {
        self.corners.len()
    }

    pub fn position(&self, e: EdgeId) -> Option<usize> {
        self.primal_edges.binary_search(&e).ok()
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.position(e).is_some()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Primal endpoints `[side 0, side 1]` of an edge.
    pub fn endpoints(&self, e: EdgeId) -> Option<[VertexId; 2]> {
        let i = self.position(e)?;
        Some([self.vertex_of[2 * i], self.vertex_of[2 * i + 1]])
    }

    /// Dual endpoints `[side 0, side 1]` of an edge.
    pub fn corner_endpoints(&self, e: EdgeId) -> Option<[CornerId; 2]> {
        let i = self.position(e)?;
        Some([self.corner_of[2 * i], self.corner_of[2 * i + 1]])
    }

    pub fn is_primal_loop(&self, e: EdgeId) -> bool {
        self.endpoints(e).is_some_and(|[a, b]| a == b)
    }

    pub fn is_dual_loop(&self, e: EdgeId) -> bool {
        self.corner_endpoints(e).is_some_and(|[a, b]| a == b)
    }

    pub(crate) fn dart_edge(&self, d: u32) -> EdgeId {
        self.primal_edges[(d / 2) as usize]
    }

    /// Edges around primal vertex `v` in rotation order, one entry per incident
    /// dart, so a self-loop appears twice.
    pub fn rotation(&self, v: VertexId) -> Vec<EdgeId> {
        let Some(start) = self.vertex_of.iter().position(|&w| w == v) else {
            return Vec::new();
        };
        self.orbit(&self.sigma, start as u32).map(|d| self.dart_edge(d)).collect()
    }

    /// Edges around dual vertex `c` in rotation order.
    pub fn corner_rotation(&self, c: CornerId) -> Vec<EdgeId> {
        let Some(start) = self.corner_of.iter().position(|&w| w == c) else {
            return Vec::new();
        };
        self.orbit(&self.phi, start as u32).map(|d| self.dart_edge(d)).collect()
    }

    fn orbit<'a>(&'a self, perm: &'a [u32], start: u32) -> impl Iterator<Item = u32> + 'a {
        let mut cur = Some(start);
        core::iter::from_fn(move || {
            let d = cur?;
            let n = perm[d as usize];
            cur = (n != start).then_some(n);
            Some(d)
        })
    }

    /// Incident edge lists of every primal vertex (with multiplicity).
    pub fn incidences(&self) -> BTreeMap<VertexId, Vec<EdgeId>> {
        let mut out: BTreeMap<VertexId, Vec<EdgeId>> =
            self.vertices.iter().map(|&v| (v, Vec::new())).collect();
        for (d, &v) in self.vertex_of.iter().enumerate() {
            out.entry(v).or_default().push(self.dart_edge(d as u32));
        }
        out
    }

    /// True iff both graphs satisfy V - E + F = 2, the rotations are dual to
    /// each other and the primal/dual edge bijection is intact.
    pub fn euler_check(&self) -> bool {
        if self.primal_edges != self.dual_edges {
            return false;
        }
        let n = self.primal_edges.len() * 2;
        if [self.sigma.len(), self.phi.len(), self.vertex_of.len(), self.corner_of.len()]
            .iter()
            .any(|&l| l != n)
        {
            return false;
        }
        if !is_permutation(&self.sigma) || !is_permutation(&self.phi) {
            return false;
        }
        if (0..n as u32).any(|d| self.phi[d as usize] != self.sigma[alpha(d) as usize]) {
            return false;
        }
        let Some(primal_orbits) = count_orbits(&self.sigma, &self.vertex_of, &self.vertices) else {
            return false;
        };
        let Some(dual_orbits) = count_orbits(&self.phi, &self.corner_of, &self.corners) else {
            return false;
        };
        let edges = self.primal_edges.len() as i64;
        // Vertices without darts are only possible for a single isolated vertex.
        if edges == 0 {
            return self.vertices.len() == 1 && self.corners.len() == 1;
        }
        if primal_orbits != self.vertices.len() || dual_orbits != self.corners.len() {
            return false;
        }
        if !self.is_connected() {
            return false;
        }
        let v = self.vertices.len() as i64;
        let f = self.corners.len() as i64;
        v - edges + f == 2 && f - edges + v == 2
    }

    fn is_connected(&self) -> bool {
        let index = |v: VertexId| self.vertices.binary_search(&v).ok();
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = self.vertices.len();
        for i in 0..self.primal_edges.len() {
            let (Some(a), Some(b)) = (index(self.vertex_of[2 * i]), index(self.vertex_of[2 * i + 1])) else {
                return false;
            };
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                components -= 1;
            }
        }
        components == 1
    }
}

fn is_permutation(perm: &[u32]) -> bool {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        let Some(slot) = seen.get_mut(p as usize) else { return false };
        if *slot {
            return false;
        }
        *slot = true;
    }
    true
}

/// Number of orbits, provided every orbit carries one label from `labels` and
/// distinct orbits carry distinct labels.
fn count_orbits(perm: &[u32], label: &[u32], labels: &[u32]) -> Option<usize> {
    let mut seen = vec![false; perm.len()];
    let mut used = BTreeSet::new();
    let mut orbits = 0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let l = label[start];
        if labels.binary_search(&l).is_err() || !used.insert(l) {
            return None;
        }
        let mut d = start;
        loop {
            seen[d] = true;
            if label[d] != l {
                return None;
            }
            d = perm[d] as usize;
            if d == start {
                break;
            }
        }
        orbits += 1;
    }
    Some(orbits)
}

/// Mutable working copy of a level used while contracting and simplifying.
#[derive(Clone, Debug)]
pub(crate) struct WorkMap {
    edges: Vec<EdgeId>,
    alive: Vec<bool>,
    sigma: Vec<u32>,
    sigma_inv: Vec<u32>,
    phi: Vec<u32>,
    phi_inv: Vec<u32>,
    pub(crate) vertex_of: Vec<VertexId>,
    pub(crate) corner_of: Vec<CornerId>,
    pub(crate) vertices: BTreeSet<VertexId>,
    pub(crate) corners: BTreeSet<CornerId>,
}

fn inverse(perm: &[u32]) -> Vec<u32> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p as usize] = i as u32;
    }
    inv
}

impl WorkMap {
    pub(crate) fn new(level: &LevelPair) -> Self {
        WorkMap {
            edges: level.primal_edges.clone(),
            alive: vec![true; level.primal_edges.len()],
            sigma_inv: inverse(&level.sigma),
            phi_inv: inverse(&level.phi),
            sigma: level.sigma.clone(),
            phi: level.phi.clone(),
            vertex_of: level.vertex_of.clone(),
            corner_of: level.corner_of.clone(),
            vertices: level.vertices.iter().copied().collect(),
            corners: level.corners.iter().copied().collect(),
        }
    }

    pub(crate) fn position(&self, e: EdgeId) -> Option<usize> {
        let i = self.edges.binary_search(&e).ok()?;
        self.alive[i].then_some(i)
    }

    pub(crate) fn edge_at(&self, pos: usize) -> EdgeId {
        self.edges[pos]
    }

    pub(crate) fn dart_count(&self) -> usize {
        self.alive.len() * 2
    }

    pub(crate) fn dart_alive(&self, d: u32) -> bool {
        self.alive[(d / 2) as usize]
    }

    pub(crate) fn phi(&self, d: u32) -> u32 {
        self.phi[d as usize]
    }

    /// Unlinks both darts of `pos` from one rotation and repairs the other so
    /// that `phi = sigma . alpha` keeps holding on the live darts.
    fn unlink(&mut self, pos: usize, from_phi: bool) {
        let darts = [2 * pos as u32, 2 * pos as u32 + 1];
        self.alive[pos] = false;
        let mut touched: [Option<u32>; 2] = [None, None];
        for (slot, &x) in darts.iter().enumerate() {
            let (next, prev) = if from_phi {
                (&mut self.phi, &mut self.phi_inv)
            } else {
                (&mut self.sigma, &mut self.sigma_inv)
            };
            let p = prev[x as usize];
            let n = next[x as usize];
            if p != x {
                next[p as usize] = n;
                prev[n as usize] = p;
            }
            next[x as usize] = x;
            prev[x as usize] = x;
            touched[slot] = Some(p);
        }
        for p in touched.into_iter().flatten() {
            if !self.dart_alive(p) {
                continue;
            }
            if from_phi {
                let n = self.phi[p as usize];
                self.sigma[alpha(p) as usize] = n;
                self.sigma_inv[n as usize] = alpha(p);
            } else {
                let n = self.sigma[p as usize];
                self.phi[alpha(p) as usize] = n;
                self.phi_inv[n as usize] = alpha(p);
            }
        }
    }

    /// Contracts a primal edge (removal in the boundary graph). Vertex labels
    /// are left to the caller.
    pub(crate) fn contract_primal(&mut self, pos: usize) {
        debug_assert!(self.alive[pos]);
        debug_assert_ne!(self.vertex_of[2 * pos], self.vertex_of[2 * pos + 1], "primal self-loop");
        self.unlink(pos, true);
    }

    /// Removes a primal edge (contraction in the boundary graph), merging dual
    /// vertex `eliminated` into `survivor`.
    pub(crate) fn remove_primal(&mut self, pos: usize, eliminated: CornerId, survivor: CornerId) {
        debug_assert!(self.alive[pos]);
        let ends = [self.corner_of[2 * pos], self.corner_of[2 * pos + 1]];
        debug_assert_ne!(ends[0], ends[1], "dual self-loop");
        debug_assert!(ends.contains(&eliminated) && ends.contains(&survivor));
        // Collect the darts of the eliminated corner before the orbits merge.
        let start = if ends[0] == eliminated { 2 * pos as u32 } else { 2 * pos as u32 + 1 };
        let mut relabel = Vec::new();
        let mut d = start;
        loop {
            relabel.push(d);
            d = self.phi[d as usize];
            if d == start {
                break;
            }
        }
        self.unlink(pos, false);
        for d in relabel {
            self.corner_of[d as usize] = survivor;
        }
        self.corners.remove(&eliminated);
    }

    /// Compacts the live edges into an immutable level.
    pub(crate) fn freeze(&self) -> LevelPair {
        let live: Vec<usize> = (0..self.alive.len()).filter(|&i| self.alive[i]).collect();
        let mut new_pos = vec![u32::MAX; self.alive.len()];
        for (k, &i) in live.iter().enumerate() {
            new_pos[i] = k as u32;
        }
        let remap = |d: u32| 2 * new_pos[(d / 2) as usize] + (d & 1);
        let mut out = LevelPair {
            primal_edges: live.iter().map(|&i| self.edges[i]).collect(),
            dual_edges: Vec::new(),
            sigma: Vec::with_capacity(live.len() * 2),
            phi: Vec::with_capacity(live.len() * 2),
            vertex_of: Vec::with_capacity(live.len() * 2),
            corner_of: Vec::with_capacity(live.len() * 2),
            vertices: self.vertices.iter().copied().collect(),
            corners: self.corners.iter().copied().collect(),
        };
        out.dual_edges = out.primal_edges.clone();
        for &i in &live {
            for d in [2 * i, 2 * i + 1] {
                out.sigma.push(remap(self.sigma[d]));
                out.phi.push(remap(self.phi[d]));
                out.vertex_of.push(self.vertex_of[d]);
                out.corner_of.push(self.corner_of[d]);
            }
        }
        out
    }
}
