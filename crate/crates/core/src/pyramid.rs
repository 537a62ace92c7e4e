//! Irregular dual graph pyramid: kernel selection, contraction, pending tree
//! and degree-2 simplification, with a log that allows replay and ECK
//! reconstruction.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::grid::{build_base, PixelMap};
use crate::image::{object_components, BinaryImage, Object, Pixel};
use crate::map::{alpha, CornerId, EdgeId, LevelPair, VertexId, WorkMap};
use crate::order::EdgeOrder;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Seeded pseudo-random kernels; results depend on the scan.
    Fast,
    /// Kernels follow the stable tree; results are scan and rotation invariant.
    Invariant,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PyramidConfig {
    pub mode: Mode,
    /// Only used by [`Mode::Fast`].
    pub seed: u64,
    /// Pinned anchors, at most one per object. Only used by [`Mode::Invariant`].
    pub anchors: Vec<Pixel>,
}

impl PyramidConfig {
    pub fn fast(seed: u64) -> Self {
        PyramidConfig { mode: Mode::Fast, seed, anchors: Vec::new() }
    }

    pub fn invariant() -> Self {
        PyramidConfig { mode: Mode::Invariant, seed: 0, anchors: Vec::new() }
    }

    pub fn with_anchors(mut self, anchors: Vec<Pixel>) -> Self {
        self.anchors = anchors;
        self
    }
}

/// A kernel edge oriented towards the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct KernelEdge {
    pub edge: EdgeId,
    pub child: VertexId,
    pub parent: VertexId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionKernel {
    pub level: usize,
    pub root: VertexId,
    /// Sorted by child.
    pub edges: Vec<KernelEdge>,
}

impl ContractionKernel {
    /// Root first, then the children in ascending order.
    pub fn vertices(&self) -> Vec<VertexId> {
        let mut v = vec![self.root];
        v.extend(self.edges.iter().map(|k| k.child));
        v
    }
}

/// One recorded move. Contracting a primal edge is a removal in the
/// boundary graph; removing a primal edge is a contraction there.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Contract { edge: EdgeId, into: VertexId },
    RemovePending { edge: EdgeId, eliminated: CornerId, into: CornerId },
    RemoveChain { edge: EdgeId, eliminated: CornerId, into: CornerId, survivor: EdgeId },
}

impl Op {
    pub fn edge(&self) -> EdgeId {
        match *self {
            Op::Contract { edge, .. } | Op::RemovePending { edge, .. } | Op::RemoveChain { edge, .. } => edge,
        }
    }
}

/// Everything that happened between level `k` and level `k + 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LevelLog {
    pub kernels: Vec<ContractionKernel>,
    pub ops: Vec<Op>,
    kernel_of: Vec<(VertexId, u32)>,
}

impl LevelLog {
    fn new(kernels: Vec<ContractionKernel>, ops: Vec<Op>) -> Self {
        let mut kernel_of: Vec<(VertexId, u32)> = kernels
            .iter()
            .enumerate()
            .flat_map(|(i, k)| k.vertices().into_iter().map(move |v| (v, i as u32)))
            .collect();
        kernel_of.sort_unstable();
        LevelLog { kernels, ops, kernel_of }
    }

    /// The kernel a vertex of the lower level belongs to.
    pub fn kernel_containing(&self, v: VertexId) -> Option<&ContractionKernel> {
        let i = self.kernel_of.binary_search_by_key(&v, |p| p.0).ok()?;
        Some(&self.kernels[self.kernel_of[i].1 as usize])
    }

    pub fn contracted_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.ops.iter().filter(|o| matches!(o, Op::Contract { .. })).map(Op::edge)
    }

    pub fn removed_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.ops.iter().filter(|o| !matches!(o, Op::Contract { .. })).map(Op::edge)
    }
}

/// Kernel selection strategy.
#[derive(Clone, Copy, Debug)]
pub enum Selector<'a> {
    Fast { seed: u64 },
    /// Foreground follows the stable tree; background uses seed 0.
    Invariant { order: &'a EdgeOrder },
}

fn priorities(level: &LevelPair, level_index: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(level_index as u64);
    (0..level.edge_count()).map(|_| rng.next_u64()).collect()
}

/// Picks vertex-disjoint kernels of depth at most one.
///
/// Every vertex proposes one parent edge (Boruvka minimum, or its stable tree
/// edge in invariant mode). Leaves of the proposal forest join their parent's
/// star; the remaining proposals are matched greedily in key order.
pub fn select_kernels(
    level: &LevelPair,
    level_index: usize,
    labels: &dyn Fn(VertexId) -> bool,
    selector: Selector<'_>,
) -> Vec<ContractionKernel> {
    let (seed, order) = match selector {
        Selector::Fast { seed } => (seed, None),
        Selector::Invariant { order } => (0, Some(order)),
    };
    let prio = priorities(level, level_index, seed);
    type Key = (u64, EdgeId);
    let mut best: BTreeMap<VertexId, (Key, VertexId)> = BTreeMap::new();
    for (i, &e) in level.edges().iter().enumerate() {
        let (a, b) = (level.vertex_of[2 * i], level.vertex_of[2 * i + 1]);
        if a == b || labels(a) != labels(b) || (order.is_some() && labels(a)) {
            continue;
        }
        let key = (prio[i], e);
        for (v, w) in [(a, b), (b, a)] {
            let slot = best.entry(v).or_insert((key, w));
            if key < slot.0 {
                *slot = (key, w);
            }
        }
    }
    let mut proposal: BTreeMap<VertexId, (Key, VertexId)> = BTreeMap::new();
    for (&v, &(key, w)) in &best {
        let mutual = best.get(&w).is_some_and(|&(k, _)| k.1 == key.1);
        if mutual && v < w {
            continue;
        }
        proposal.insert(v, (key, w));
    }
    if let Some(order) = order {
        for t in order.tree() {
            let Some(i) = level.position(t.edge) else { continue };
            let side = t.child_side as usize;
            let child = level.vertex_of[2 * i + side];
            let parent = level.vertex_of[2 * i + 1 - side];
            debug_assert_ne!(child, parent, "stable tree edges never become loops");
            let previous = proposal.insert(child, ((0, t.edge), parent));
            debug_assert!(previous.is_none(), "one remaining tree edge per child");
        }
    }

    let mut has_child = BTreeSet::new();
    for &(_, w) in proposal.values() {
        has_child.insert(w);
    }
    let mut touched = BTreeSet::new();
    let mut chosen: BTreeMap<VertexId, Vec<KernelEdge>> = BTreeMap::new();
    for (&v, &((_, e), w)) in &proposal {
        if !has_child.contains(&v) {
            touched.insert(v);
            touched.insert(w);
            chosen.entry(w).or_default().push(KernelEdge { edge: e, child: v, parent: w });
        }
    }
    let mut rest: Vec<(Key, VertexId, VertexId)> = proposal
        .iter()
        .filter(|(v, _)| !touched.contains(*v))
        .map(|(&v, &(k, w))| (k, v, w))
        .collect();
    rest.sort_unstable();
    for ((_, e), v, w) in rest {
        if !touched.contains(&v) && !touched.contains(&w) {
            touched.insert(v);
            touched.insert(w);
            chosen.entry(w).or_default().push(KernelEdge { edge: e, child: v, parent: w });
        }
    }
    chosen
        .into_iter()
        .map(|(root, mut edges)| {
            edges.sort_unstable_by_key(|k| k.child);
            ContractionKernel { level: level_index, root, edges }
        })
        .collect()
}

/// Rule for which edge of a merged degree-2 chain survives.
pub struct ChainRule<'a> {
    /// Ordered by [`EdgeOrder`] keys when present, by id otherwise.
    pub order: Option<&'a EdgeOrder>,
    /// Edges that must never be removed (still scheduled for contraction).
    pub protected: &'a dyn Fn(EdgeId) -> bool,
}

impl ChainRule<'_> {
    fn survivor(&self, edges: &[EdgeId]) -> usize {
        if let Some(i) = edges.iter().position(|&e| (self.protected)(e)) {
            debug_assert!(edges[i + 1..].iter().all(|&e| !(self.protected)(e)));
            return i;
        }
        if let Some(order) = self.order {
            let keys: Option<Vec<_>> = edges.iter().map(|&e| order.key(e)).collect();
            if let Some(keys) = keys {
                return (0..edges.len()).min_by_key(|&i| keys[i]).unwrap();
            }
        }
        (0..edges.len()).min_by_key(|&i| edges[i]).unwrap()
    }
}

fn validate_kernels(level: &LevelPair, kernels: &[ContractionKernel]) -> Result<()> {
    let mut owner: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (ki, k) in kernels.iter().enumerate() {
        if !level.has_vertex(k.root) {
            return Err(Error::UnknownVertex(k.root));
        }
        for v in k.vertices() {
            if owner.insert(v, ki).is_some() {
                return Err(Error::InvalidSchedule("kernels share a vertex"));
            }
        }
        for ke in &k.edges {
            let ends = level.endpoints(ke.edge).ok_or(Error::UnknownEdge(ke.edge))?;
            if ends[0] == ends[1] {
                return Err(Error::InvalidSchedule("kernel edge is a self-loop"));
            }
            if !(ends == [ke.child, ke.parent] || ends == [ke.parent, ke.child]) {
                return Err(Error::InvalidSchedule("kernel edge endpoints disagree with the level"));
            }
            if ke.child == k.root {
                return Err(Error::InvalidSchedule("kernel root has a parent"));
            }
        }
        // Every child has one parent edge; following parents must reach the root.
        let parent: BTreeMap<VertexId, VertexId> = k.edges.iter().map(|e| (e.child, e.parent)).collect();
        if parent.len() != k.edges.len() {
            return Err(Error::InvalidSchedule("kernel vertex with two parents"));
        }
        for &start in parent.keys() {
            let mut v = start;
            let mut steps = 0;
            while let Some(&p) = parent.get(&v) {
                v = p;
                steps += 1;
                if steps > k.edges.len() {
                    return Err(Error::InvalidSchedule("kernel contains a cycle"));
                }
            }
            if v != k.root {
                return Err(Error::InvalidSchedule("kernel is not a tree towards its root"));
            }
        }
    }
    Ok(())
}

fn contract_kernels(wm: &mut WorkMap, kernels: &[ContractionKernel], ops: &mut Vec<Op>) -> Result<()> {
    let mut root_of: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    for k in kernels {
        for ke in &k.edges {
            let pos = wm.position(ke.edge).ok_or(Error::UnknownEdge(ke.edge))?;
            wm.contract_primal(pos);
            ops.push(Op::Contract { edge: ke.edge, into: k.root });
            root_of.insert(ke.child, k.root);
        }
    }
    if root_of.is_empty() {
        return Ok(());
    }
    for d in 0..wm.dart_count() {
        if let Some(&r) = root_of.get(&wm.vertex_of[d]) {
            wm.vertex_of[d] = r;
        }
    }
    for v in root_of.keys() {
        wm.vertices.remove(v);
    }
    Ok(())
}

/// Dual vertex -> one of its live darts, and its degree.
fn corner_darts(wm: &WorkMap) -> BTreeMap<CornerId, (u32, u32)> {
    let mut out: BTreeMap<CornerId, (u32, u32)> = BTreeMap::new();
    for d in 0..wm.dart_count() as u32 {
        if wm.dart_alive(d) {
            let e = out.entry(wm.corner_of[d as usize]).or_insert((d, 0));
            e.1 += 1;
        }
    }
    out
}

fn remove_pending(wm: &mut WorkMap, ops: &mut Vec<Op>) {
    let mut info = corner_darts(wm);
    let mut queue: VecDeque<CornerId> =
        info.iter().filter(|(_, &(_, deg))| deg == 1).map(|(&c, _)| c).collect();
    while let Some(x) = queue.pop_front() {
        let Some(&(d, 1)) = info.get(&x) else { continue };
        let other = alpha(d);
        let y = wm.corner_of[other as usize];
        let pos = (d / 2) as usize;
        let after = wm.phi(other);
        let edge = wm.edge_at(pos);
        wm.remove_primal(pos, x, y);
        ops.push(Op::RemovePending { edge, eliminated: x, into: y });
        info.remove(&x);
        let entry = info.get_mut(&y).expect("live corner");
        entry.1 -= 1;
        if entry.1 >= 1 {
            entry.0 = after;
        }
        if entry.1 == 1 {
            queue.push_back(y);
        }
    }
}

struct Walk {
    edges: Vec<usize>,
    inner: Vec<CornerId>,
    end: CornerId,
    closed: bool,
}

fn walk(wm: &WorkMap, deg: &BTreeMap<CornerId, (u32, u32)>, start: CornerId, out: u32) -> Walk {
    let mut w = Walk { edges: Vec::new(), inner: Vec::new(), end: start, closed: false };
    let mut d = out;
    loop {
        w.edges.push((d / 2) as usize);
        let back = alpha(d);
        let c = wm.corner_of[back as usize];
        if c == start {
            w.closed = true;
            return w;
        }
        if deg.get(&c).map(|x| x.1) != Some(2) {
            w.end = c;
            return w;
        }
        w.inner.push(c);
        d = wm.phi(back);
    }
}

fn remove_chains(wm: &mut WorkMap, rule: &ChainRule<'_>, ops: &mut Vec<Op>) {
    let info = corner_darts(wm);
    let mut visited = BTreeSet::new();
    for (&x, &(d1, deg)) in &info {
        if deg != 2 || !visited.insert(x) {
            continue;
        }
        let d2 = wm.phi(d1);
        if d1 / 2 == d2 / 2 {
            continue;
        }
        let left = walk(wm, &info, x, d1);
        if left.closed {
            let m = left.edges.len();
            let corners: Vec<CornerId> = core::iter::once(x).chain(left.inner.iter().copied()).collect();
            visited.extend(corners.iter().copied());
            let ids: Vec<EdgeId> = left.edges.iter().map(|&p| wm.edge_at(p)).collect();
            let s = rule.survivor(&ids);
            let keep = corners[(s + 1) % m];
            for t in 1..m {
                let j = (s + t) % m;
                let eliminated = corners[(s + t + 1) % m];
                wm.remove_primal(left.edges[j], eliminated, keep);
                ops.push(Op::RemoveChain { edge: ids[j], eliminated, into: keep, survivor: ids[s] });
            }
            continue;
        }
        let right = walk(wm, &info, x, d2);
        let mut edges: Vec<usize> = left.edges.iter().rev().copied().collect();
        edges.extend(right.edges.iter().copied());
        // corners[j] and corners[j + 1] are the ends of edges[j].
        let mut corners = vec![left.end];
        corners.extend(left.inner.iter().rev().copied());
        corners.push(x);
        corners.extend(right.inner.iter().copied());
        corners.push(right.end);
        visited.extend(corners[1..corners.len() - 1].iter().copied());
        let ids: Vec<EdgeId> = edges.iter().map(|&p| wm.edge_at(p)).collect();
        let s = rule.survivor(&ids);
        let (y0, y1) = (left.end, right.end);
        for j in 0..s {
            wm.remove_primal(edges[j], corners[j + 1], y0);
            ops.push(Op::RemoveChain { edge: ids[j], eliminated: corners[j + 1], into: y0, survivor: ids[s] });
        }
        for j in (s + 1..edges.len()).rev() {
            wm.remove_primal(edges[j], corners[j], y1);
            ops.push(Op::RemoveChain { edge: ids[j], eliminated: corners[j], into: y1, survivor: ids[s] });
        }
    }
}

/// Contracts the kernels, then removes pending trees and merges degree-2
/// chains of the boundary graph.
pub fn contract_and_simplify(
    level: &LevelPair,
    kernels: &[ContractionKernel],
    rule: &ChainRule<'_>,
) -> Result<(LevelPair, Vec<Op>)> {
    validate_kernels(level, kernels)?;
    let mut wm = WorkMap::new(level);
    let mut ops = Vec::new();
    contract_kernels(&mut wm, kernels, &mut ops)?;
    remove_pending(&mut wm, &mut ops);
    remove_chains(&mut wm, rule, &mut ops);
    Ok((wm.freeze(), ops))
}

/// Re-applies a recorded step.
pub fn replay_step(level: &LevelPair, log: &LevelLog) -> Result<LevelPair> {
    validate_kernels(level, &log.kernels)?;
    let mut wm = WorkMap::new(level);
    let mut scratch = Vec::new();
    contract_kernels(&mut wm, &log.kernels, &mut scratch)?;
    for op in &log.ops {
        match *op {
            Op::Contract { .. } => {}
            Op::RemovePending { edge, eliminated, into } | Op::RemoveChain { edge, eliminated, into, .. } => {
                let pos = wm.position(edge).ok_or(Error::UnknownEdge(edge))?;
                let ends = [wm.corner_of[2 * pos], wm.corner_of[2 * pos + 1]];
                if ends[0] == ends[1] || !ends.contains(&eliminated) || !ends.contains(&into) {
                    return Err(Error::Inconsistent("replayed removal does not match the level"));
                }
                wm.remove_primal(pos, eliminated, into);
            }
        }
    }
    Ok(wm.freeze())
}

/// The stack of levels with its log.
#[derive(Clone, Debug)]
pub struct Pyramid {
    image: BinaryImage,
    pixel_map: PixelMap,
    mode: Mode,
    seed: u64,
    objects: Vec<Object>,
    /// Object index per pixel vertex, `u32::MAX` for background.
    vertex_object: Vec<u32>,
    order: Option<EdgeOrder>,
    levels: Vec<LevelPair>,
    logs: Vec<LevelLog>,
    top_of: Vec<VertexId>,
}

enum Source<'a> {
    Select,
    Schedule(&'a [Vec<EdgeId>], &'a mut dyn FnMut(&[VertexId]) -> VertexId),
}

/// Builds a pyramid with default anchors.
pub fn build_pyramid(img: &BinaryImage, mode: Mode, seed: u64) -> Pyramid {
    let cfg = PyramidConfig { mode, seed, anchors: Vec::new() };
    Pyramid::build(img, &cfg).expect("default anchors always lie inside their objects")
}

impl Pyramid {
    pub fn build(img: &BinaryImage, cfg: &PyramidConfig) -> Result<Pyramid> {
        Self::construct(img, cfg, Source::Select)
    }

    /// Builds a pyramid whose level `k` contracts exactly the edges of
    /// `schedule[k]`; each connected group becomes one kernel whose root is
    /// picked by `choose_root` from its sorted vertices.
    pub fn build_scheduled(
        img: &BinaryImage,
        cfg: &PyramidConfig,
        schedule: &[Vec<EdgeId>],
        choose_root: &mut dyn FnMut(&[VertexId]) -> VertexId,
    ) -> Result<Pyramid> {
        Self::construct(img, cfg, Source::Schedule(schedule, choose_root))
    }

    fn construct(img: &BinaryImage, cfg: &PyramidConfig, mut source: Source<'_>) -> Result<Pyramid> {
        let (base, pm) = build_base(img);
        let objects = object_components(img);
        let mut vertex_object = vec![u32::MAX; pm.vertex_count()];
        for o in &objects {
            for &p in &o.pixels {
                vertex_object[pm.pixel_to_vertex(p) as usize] = o.index as u32;
            }
        }
        let order = match cfg.mode {
            Mode::Invariant => Some(EdgeOrder::new(&pm, &objects, &cfg.anchors)?),
            Mode::Fast => None,
        };
        let labels = |v: VertexId| vertex_object.get(v as usize).is_some_and(|&o| o != u32::MAX);
        let mut levels = vec![base];
        let mut logs = Vec::new();
        loop {
            let k = levels.len() - 1;
            let current = &levels[k];
            let kernels = match &mut source {
                Source::Select => {
                    let selector = match &order {
                        Some(order) => Selector::Invariant { order },
                        None => Selector::Fast { seed: cfg.seed },
                    };
                    select_kernels(current, k, &labels, selector)
                }
                Source::Schedule(schedule, choose) => {
                    let Some(edges) = schedule.get(k) else { break };
                    kernels_from_edges(current, k, edges, &labels, &mut **choose)?
                }
            };
            if kernels.is_empty() {
                if matches!(source, Source::Schedule(..)) {
                    return Err(Error::InvalidSchedule("empty level in schedule"));
                }
                break;
            }
            let later: BTreeSet<EdgeId> = match &source {
                Source::Schedule(schedule, _) => schedule[k + 1..].iter().flatten().copied().collect(),
                Source::Select => BTreeSet::new(),
            };
            let protected = |e: EdgeId| match &source {
                Source::Schedule(..) => later.contains(&e),
                Source::Select => order.as_ref().is_some_and(|o| o.is_tree_edge(e)),
            };
            let rule = ChainRule { order: order.as_ref(), protected: &protected };
            let (next, ops) = contract_and_simplify(current, &kernels, &rule)?;
            debug_assert!(next.euler_check());
            logs.push(LevelLog::new(kernels, ops));
            levels.push(next);
        }
        let mut p = Pyramid {
            image: img.clone(),
            pixel_map: pm,
            mode: cfg.mode,
            seed: cfg.seed,
            objects,
            vertex_object,
            order,
            levels,
            logs,
            top_of: Vec::new(),
        };
        p.top_of = p.compute_top_of();
        Ok(p)
    }

    fn compute_top_of(&self) -> Vec<VertexId> {
        let n = self.pixel_map.vertex_count();
        let mut up: Vec<VertexId> = (0..n as u32).collect();
        for log in &self.logs {
            for k in &log.kernels {
                for ke in &k.edges {
                    up[ke.child as usize] = k.root;
                }
            }
        }
        // Roots are merged at later levels than their children, so following
        // `up` terminates; compress as we go.
        let mut top = vec![u32::MAX; n];
        for v in 0..n {
            let mut path = Vec::new();
            let mut x = v;
            while top[x] == u32::MAX && up[x] as usize != x {
                path.push(x);
                x = up[x] as usize;
            }
            let t = if top[x] == u32::MAX { x as u32 } else { top[x] };
            top[x] = t;
            for y in path {
                top[y] = t;
            }
        }
        top
    }

    pub fn image(&self) -> &BinaryImage {
        &self.image
    }

    pub fn pixel_map(&self) -> &PixelMap {
        &self.pixel_map
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn objects(&self) -> &[Object] {
        &self.objects
    }

    pub fn order(&self) -> Option<&EdgeOrder> {
        self.order.as_ref()
    }

    /// Index of the top level.
    pub fn height(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[LevelPair] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> Result<&LevelPair> {
        self.levels.get(k).ok_or(Error::LevelOutOfRange { level: k, height: self.height() })
    }

    pub fn top(&self) -> &LevelPair {
        self.levels.last().expect("at least the base level")
    }

    /// `logs()[k]` leads from level `k` to level `k + 1`.
    pub fn logs(&self) -> &[LevelLog] {
        &self.logs
    }

    /// Object of a (surviving) vertex; `None` for background and the exterior.
    pub fn object_of_vertex(&self, v: VertexId) -> Option<usize> {
        match self.vertex_object.get(v as usize) {
            Some(&o) if o != u32::MAX => Some(o as usize),
            _ => None,
        }
    }

    pub fn is_foreground(&self, v: VertexId) -> bool {
        self.object_of_vertex(v).is_some()
    }

    /// The top vertex a base vertex ends up in.
    pub fn top_vertex_of(&self, base: VertexId) -> Result<VertexId> {
        self.top_of.get(base as usize).copied().ok_or(Error::UnknownVertex(base))
    }

    /// The top vertex representing an object.
    pub fn object_top_vertex(&self, object: usize) -> Option<VertexId> {
        let o = self.objects.get(object)?;
        Some(self.top_of[self.pixel_map.pixel_to_vertex(o.first()) as usize])
    }

    /// Base vertices merged into a top vertex.
    pub fn receptive_field(&self, v: VertexId) -> Result<Vec<VertexId>> {
        if !self.top().has_vertex(v) {
            return Err(Error::UnknownVertex(v));
        }
        Ok((0..self.top_of.len() as u32).filter(|&b| self.top_of[b as usize] == v).collect())
    }

    /// Equivalent contraction kernel of a top vertex: all base edges
    /// contracted into it, sorted.
    pub fn eck(&self, v: VertexId) -> Result<Vec<EdgeId>> {
        if !self.top().has_vertex(v) {
            return Err(Error::UnknownVertex(v));
        }
        let mut out: Vec<EdgeId> = self
            .logs
            .iter()
            .flat_map(|l| l.kernels.iter())
            .flat_map(|k| k.edges.iter())
            .filter(|ke| self.top_of[ke.child as usize] == v)
            .map(|ke| ke.edge)
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Kernel edges per level, usable as a schedule.
    pub fn kernel_schedule(&self) -> Vec<Vec<EdgeId>> {
        self.logs
            .iter()
            .map(|l| {
                let mut v: Vec<EdgeId> = l.kernels.iter().flat_map(|k| k.edges.iter().map(|e| e.edge)).collect();
                v.sort_unstable();
                v
            })
            .collect()
    }

    /// The unique pre-image of a level-`k` edge at level `k - 1`.
    pub fn preimage(&self, k: usize, e: EdgeId) -> Result<EdgeId> {
        if k == 0 || k > self.height() {
            return Err(Error::LevelOutOfRange { level: k, height: self.height() });
        }
        if !self.levels[k].has_edge(e) {
            return Err(Error::UnknownEdge(e));
        }
        Ok(e)
    }

    /// Vertices of level `k - 1` merged into vertex `v` of level `k`.
    pub fn reduction_window(&self, k: usize, v: VertexId) -> Result<Vec<VertexId>> {
        if k == 0 || k > self.height() {
            return Err(Error::LevelOutOfRange { level: k, height: self.height() });
        }
        if !self.levels[k].has_vertex(v) {
            return Err(Error::UnknownVertex(v));
        }
        Ok(match self.logs[k - 1].kernel_containing(v) {
            Some(kernel) => kernel.vertices(),
            None => vec![v],
        })
    }

    /// True when every level passes [`LevelPair::euler_check`].
    pub fn euler_check_all(&self) -> bool {
        self.levels.iter().all(LevelPair::euler_check)
    }

    /// Rebuilds all levels from the base and the log.
    pub fn replay(&self) -> Result<Vec<LevelPair>> {
        let (base, _) = build_base(&self.image);
        let mut out = vec![base];
        for log in &self.logs {
            let next = replay_step(out.last().unwrap(), log)?;
            out.push(next);
        }
        Ok(out)
    }
}

fn kernels_from_edges(
    level: &LevelPair,
    level_index: usize,
    edges: &[EdgeId],
    labels: &dyn Fn(VertexId) -> bool,
    choose_root: &mut dyn FnMut(&[VertexId]) -> VertexId,
) -> Result<Vec<ContractionKernel>> {
    let mut adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for &e in edges {
        if !seen.insert(e) {
            return Err(Error::InvalidSchedule("edge listed twice"));
        }
        let [a, b] = level.endpoints(e).ok_or(Error::UnknownEdge(e))?;
        if a == b {
            return Err(Error::InvalidSchedule("kernel edge is a self-loop"));
        }
        if labels(a) != labels(b) {
            return Err(Error::InvalidSchedule("kernel edge joins different labels"));
        }
        adj.entry(a).or_default().push((e, b));
        adj.entry(b).or_default().push((e, a));
    }
    let mut done = BTreeSet::new();
    let mut kernels = Vec::new();
    let starts: Vec<VertexId> = adj.keys().copied().collect();
    for s in starts {
        if done.contains(&s) {
            continue;
        }
        let mut members = vec![s];
        let mut queue = VecDeque::from([s]);
        done.insert(s);
        while let Some(v) = queue.pop_front() {
            for &(_, w) in &adj[&v] {
                if done.insert(w) {
                    members.push(w);
                    queue.push_back(w);
                }
            }
        }
        members.sort_unstable();
        let component_edges: usize = members.iter().map(|v| adj[v].len()).sum::<usize>() / 2;
        if component_edges + 1 != members.len() {
            return Err(Error::InvalidSchedule("kernel contains a cycle"));
        }
        let root = choose_root(&members);
        if members.binary_search(&root).is_err() {
            return Err(Error::InvalidSchedule("root outside its kernel"));
        }
        let mut kedges = Vec::with_capacity(members.len() - 1);
        let mut reached = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(e, w) in &adj[&v] {
                if reached.insert(w) {
                    kedges.push(KernelEdge { edge: e, child: w, parent: v });
                    queue.push_back(w);
                }
            }
        }
        kedges.sort_unstable_by_key(|k| k.child);
        kernels.push(ContractionKernel { level: level_index, root, edges: kedges });
    }
    kernels.sort_unstable_by_key(|k| k.root);
    Ok(kernels)
}

#[cfg(test)]
mod tests {
    use super::*;

    const RING: &str = "###\n#.#\n###";

    #[test]
    fn no_same_label_edge_gives_no_kernel() {
        let img = BinaryImage::from_ascii("#.\n.#");
        let p = build_pyramid(&img, Mode::Fast, 0);
        // Background pixels still merge with the exterior.
        let top = p.top();
        assert!(p.euler_check_all());
        let again = select_kernels(top, p.height(), &|v| p.is_foreground(v), Selector::Fast { seed: 0 });
        assert!(again.is_empty());
    }

    #[test]
    fn two_pixel_object_has_one_kernel() {
        let img = BinaryImage::from_ascii("##");
        let (base, _) = build_base(&img);
        let labels = |v: VertexId| v < 2;
        let ks = select_kernels(&base, 0, &labels, Selector::Fast { seed: 7 });
        assert_eq!(ks.len(), 1);
        assert_eq!(ks[0].edges.len(), 1);
        // Vertical crack between the two pixels.
        assert_eq!(ks[0].edges[0].edge, 2 * 2 + 1);
    }

    #[test]
    fn all_background_collapses_to_one_vertex() {
        let p = build_pyramid(&BinaryImage::new(6, 5), Mode::Fast, 3);
        assert_eq!(p.top().vertex_count(), 1);
        assert!(p.euler_check_all());
    }

    #[test]
    fn ring_top_has_three_regions() {
        for mode in [Mode::Fast, Mode::Invariant] {
            let p = build_pyramid(&BinaryImage::from_ascii(RING), mode, 1);
            assert_eq!(p.top().vertex_count(), 3, "{mode:?}");
            assert!(p.euler_check_all());
            let v = p.object_top_vertex(0).unwrap();
            let eck = p.eck(v).unwrap();
            assert_eq!(eck.len(), 7);
            assert_eq!(p.receptive_field(v).unwrap().len(), 8);
        }
    }

    #[test]
    fn invariant_kernels_follow_stable_tree() {
        let p = build_pyramid(&BinaryImage::from_ascii(RING), Mode::Invariant, 0);
        let order = p.order().unwrap();
        for log in p.logs() {
            for k in &log.kernels {
                if p.is_foreground(k.root) {
                    assert!(k.edges.iter().all(|e| order.is_tree_edge(e.edge)));
                }
            }
        }
        let v = p.object_top_vertex(0).unwrap();
        let tree: Vec<EdgeId> = order.tree().iter().map(|t| t.edge).collect();
        assert_eq!(p.eck(v).unwrap(), tree);
    }

    #[test]
    fn solid_block_face_reduces_to_a_loop() {
        let p = build_pyramid(&BinaryImage::from_ascii("##\n##"), Mode::Fast, 0);
        let top = p.top();
        assert_eq!(top.vertex_count(), 2);
        assert_eq!(top.edge_count(), 1);
        assert!(top.is_dual_loop(top.edges()[0]));
        assert_eq!(p.eck(p.object_top_vertex(0).unwrap()).unwrap().len(), 3);
    }

    #[test]
    fn merged_background_leaves_a_pending_edge() {
        // The two background pixels merge; the crack between them becomes a
        // loop whose dual end is a degree-1 corner.
        let img = BinaryImage::from_ascii("..");
        let p = build_pyramid(&img, Mode::Fast, 0);
        let ops = &p.logs()[0].ops;
        assert!(ops.iter().any(|o| matches!(o, Op::RemovePending { .. })));
        assert!(p.euler_check_all());
    }

    #[test]
    fn single_pixel_has_empty_eck() {
        let img = BinaryImage::from_ascii("...\n.#.\n...");
        let p = build_pyramid(&img, Mode::Fast, 0);
        let v = p.object_top_vertex(0).unwrap();
        assert!(p.eck(v).unwrap().is_empty());
        assert_eq!(p.eck(999), Err(Error::UnknownVertex(999)));
    }

    #[test]
    fn replay_reproduces_levels() {
        let img = BinaryImage::from_ascii("#..##\n#.#.#\n###.#\n..#..");
        for mode in [Mode::Fast, Mode::Invariant] {
            let p = build_pyramid(&img, mode, 11);
            assert_eq!(p.replay().unwrap(), p.levels());
        }
    }

    #[test]
    fn self_loop_kernel_is_rejected() {
        let p = build_pyramid(&BinaryImage::from_ascii(RING), Mode::Fast, 0);
        let top = p.top();
        let v = p.object_top_vertex(0).unwrap();
        let lp = top.edges().iter().copied().find(|&e| top.endpoints(e) == Some([v, v])).unwrap();
        let bad = ContractionKernel { level: 0, root: v, edges: vec![KernelEdge { edge: lp, child: v, parent: v }] };
        let rule = ChainRule { order: None, protected: &|_| false };
        assert!(matches!(
            contract_and_simplify(top, &[bad], &rule),
            Err(Error::InvalidSchedule(_))
        ));
    }
}
