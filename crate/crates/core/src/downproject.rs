//! Down projection of cocycles from one pyramid level to the one below.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::homology::{HomologyLevel, TopCocycle};
use crate::map::{EdgeId, VertexId};
use crate::pyramid::Pyramid;

/// A set of boundary graph edges at one level, for one hole of one object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle {
    pub level: usize,
    pub object: usize,
    pub hole: usize,
    /// Sorted, without duplicates.
    pub edges: Vec<EdgeId>,
}

/// Work counters of a projection: edges read plus kernel vertices labelled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ProjectionStats {
    pub steps: usize,
}

/// Per object face at `level`: number of dart incidences with `edges`.
fn face_counts(p: &Pyramid, level: usize, object: usize, edges: &[EdgeId]) -> Result<BTreeMap<VertexId, usize>> {
    let l = p.level(level)?;
    let mut counts = BTreeMap::new();
    for &e in edges {
        let ends = l.endpoints(e).ok_or(Error::UnknownEdge(e))?;
        for v in ends {
            if p.object_of_vertex(v) == Some(object) {
                *counts.entry(v).or_insert(0) += 1;
            }
        }
    }
    Ok(counts)
}

/// Checks that every face of the object sees an even number of the edges.
pub fn check_cocycle(p: &Pyramid, c: &Cocycle) -> Result<()> {
    let counts = face_counts(p, c.level, c.object, &c.edges)?;
    if counts.values().any(|n| n % 2 == 1) {
        return Err(Error::NotACocycle { level: c.level });
    }
    Ok(())
}

/// Projects a cocycle from level `k` to level `k - 1`.
pub fn down_project_level(p: &Pyramid, a: &Cocycle) -> Result<Cocycle> {
    down_project_level_counted(p, a, &mut ProjectionStats::default())
}

pub fn down_project_level_counted(p: &Pyramid, a: &Cocycle, stats: &mut ProjectionStats) -> Result<Cocycle> {
    let k = a.level;
    if k == 0 || k > p.height() {
        return Err(Error::LevelOutOfRange { level: k, height: p.height() });
    }
    check_cocycle(p, a)?;
    // Surviving edges keep their ids one level down.
    let surviving: Vec<EdgeId> = a.edges.iter().map(|&e| p.preimage(k, e)).collect::<Result<_>>()?;
    let counts = face_counts(p, k - 1, a.object, &surviving)?;
    stats.steps += surviving.len();
    let log = &p.logs()[k - 1];
    let mut kernels = BTreeSet::new();
    for &v in counts.keys() {
        if let Some(kernel) = log.kernel_containing(v) {
            kernels.insert(kernel.root);
        }
    }
    let mut removed = Vec::new();
    for root in kernels {
        let kernel = log.kernel_containing(root).expect("root is a member");
        stats.steps += kernel.edges.len() + 1;
        // Leaves-to-root label sums over the oriented kernel tree.
        let mut children: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
        for (i, ke) in kernel.edges.iter().enumerate() {
            children.entry(ke.parent).or_default().push(i);
        }
        let mut label: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut stack = vec![(kernel.root, false)];
        while let Some((v, expanded)) = stack.pop() {
            if !expanded {
                stack.push((v, true));
                for &i in children.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                    stack.push((kernel.edges[i].child, false));
                }
                continue;
            }
            let own = counts.get(&v).copied().unwrap_or(0);
            let below: usize = children
                .get(&v)
                .map(|cs| cs.iter().map(|&i| label[&kernel.edges[i].child]).sum())
                .unwrap_or(0);
            label.insert(v, own + below);
        }
        for ke in &kernel.edges {
            if label[&ke.child] % 2 == 1 {
                removed.push(ke.edge);
            }
        }
    }
    let mut edges = surviving;
    edges.extend(removed);
    edges.sort_unstable();
    edges.dedup();
    let out = Cocycle { level: k - 1, object: a.object, hole: a.hole, edges };
    check_cocycle(p, &out)?;
    Ok(out)
}

/// The top cocycle `{alpha_i, beta}` as a level-`n` cocycle.
pub fn top_cocycle(p: &Pyramid, h: &HomologyLevel, t: &TopCocycle) -> Result<Cocycle> {
    let mut edges: Vec<EdgeId> = t
        .edges
        .iter()
        .map(|e| h.loop_preimage.get(e).copied().ok_or(Error::UnknownEdge(*e)))
        .collect::<Result<_>>()?;
    edges.sort_unstable();
    let c = Cocycle { level: p.height(), object: h.object, hole: t.hole, edges };
    check_cocycle(p, &c)?;
    Ok(c)
}

/// All intermediate cocycles, indexed by level (`[0]` is the base).
pub fn down_project_all(p: &Pyramid, h: &HomologyLevel, t: &TopCocycle) -> Result<(Vec<Cocycle>, ProjectionStats)> {
    let mut stats = ProjectionStats::default();
    let mut chain = vec![top_cocycle(p, h, t)?];
    while chain.last().unwrap().level > 0 {
        let next = down_project_level_counted(p, chain.last().unwrap(), &mut stats)?;
        chain.push(next);
    }
    chain.reverse();
    Ok((chain, stats))
}

/// Projects `{alpha_i, beta}` all the way to the base.
pub fn down_project_to_base(p: &Pyramid, t: &TopCocycle, h: &HomologyLevel) -> Result<Cocycle> {
    Ok(down_project_all(p, h, t)?.0.swap_remove(0))
}
