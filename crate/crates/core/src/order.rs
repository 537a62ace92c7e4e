//! Scanning and rotation invariant choices: anchor, geodesic distances,
//! the stable spanning tree and the edge order.
//!
//! All geometry is done in doubled integer coordinates so that pixel centres
//! and crack midpoints are lattice points.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::grid::{Crack, PixelMap};
use crate::image::{Object, Pixel};
use crate::map::{EdgeId, VertexId};

type V2 = (i64, i64);

fn sub(a: V2, b: V2) -> V2 {
    (a.0 - b.0, a.1 - b.1)
}

fn dot(a: V2, b: V2) -> i64 {
    a.0 * b.0 + a.1 * b.1
}

/// z-component of `a x b`; negative means clockwise on screen (y down).
fn cross(a: V2, b: V2) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

const DIRS: [(i64, i64); 4] = [(0, -1), (1, 0), (0, 1), (-1, 0)];

/// Top-most, then left-most pixel of the object.
pub fn anchor_vertex(obj: &Object) -> Pixel {
    obj.first()
}

/// Geodesic 4-neighbourhood hop distance to the anchor, inside one object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceField {
    object: usize,
    anchor: Pixel,
    pixels: Vec<Pixel>,
    dist: Vec<u32>,
    reference: V2,
}

impl DistanceField {
    pub fn object(&self) -> usize {
        self.object
    }

    pub fn anchor(&self) -> Pixel {
        self.anchor
    }

    pub fn get(&self, p: Pixel) -> Option<u32> {
        self.pixels.binary_search(&p).ok().map(|i| self.dist[i])
    }

    pub fn contains(&self, p: Pixel) -> bool {
        self.pixels.binary_search(&p).is_ok()
    }

    /// Direction from which angles around the anchor are measured: the sum of
    /// unit steps from the anchor towards its non-object neighbours.
    pub fn reference_ray(&self) -> (i64, i64) {
        self.reference
    }
}

fn step(p: Pixel, (dx, dy): V2) -> Option<Pixel> {
    let (x, y) = (p.x as i64 + dx, p.y as i64 + dy);
    (x >= 0 && y >= 0).then(|| Pixel::new(x as u32, y as u32))
}

pub fn distance_field(obj: &Object, s: Pixel) -> Result<DistanceField> {
    if !obj.contains(s) {
        return Err(Error::PixelOutsideObject { x: s.x, y: s.y });
    }
    let pixels = obj.pixels.clone();
    let idx = |p: Pixel| pixels.binary_search(&p).ok();
    let mut dist = vec![u32::MAX; pixels.len()];
    let si = idx(s).expect("anchor is a member");
    dist[si] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(p) = queue.pop_front() {
        let d = dist[idx(p).unwrap()];
        for dir in DIRS {
            if let Some(j) = step(p, dir).and_then(idx) {
                if dist[j] == u32::MAX {
                    dist[j] = d + 1;
                    queue.push_back(pixels[j]);
                }
            }
        }
    }
    if dist.contains(&u32::MAX) {
        return Err(Error::NotConnected);
    }
    let mut reference = (0, 0);
    for dir in DIRS {
        if step(s, dir).and_then(idx).is_none() {
            reference.0 += dir.0;
            reference.1 += dir.1;
        }
    }
    if reference == (0, 0) {
        reference = (0, -1);
    }
    Ok(DistanceField { object: obj.index, anchor: s, pixels, dist, reference })
}

/// A stable tree edge oriented from child to parent (towards the anchor).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TreeEdge {
    pub child: Pixel,
    pub parent: Pixel,
}

/// Parent choice for `v`: among neighbours one step closer to the anchor,
/// the one seen under the smallest angle from `v` towards the anchor, then
/// the one turning clockwise.
fn parent_of(df: &DistanceField, v: Pixel) -> Pixel {
    let d = df.get(v).expect("member");
    let s = df.anchor.doubled_center();
    let vc = v.doubled_center();
    let to_s = sub(s, vc);
    let mut best: Option<(Pixel, V2)> = None;
    for dir in DIRS {
        let Some(q) = step(v, dir) else { continue };
        if df.get(q) != Some(d - 1) {
            continue;
        }
        let b = sub(q.doubled_center(), vc);
        best = match best {
            None => Some((q, b)),
            Some((bq, bb)) => {
                let better = match dot(to_s, b).cmp(&dot(to_s, bb)) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => cross(sub(vc, s), b) < 0,
                };
                Some(if better { (q, b) } else { (bq, bb) })
            }
        };
    }
    best.expect("a closer neighbour exists").0
}

/// Spanning tree of the object rooted at the anchor, sorted by child.
pub fn stable_tree(obj: &Object, df: &DistanceField) -> Vec<TreeEdge> {
    obj.pixels
        .iter()
        .filter(|&&p| p != df.anchor)
        .map(|&child| TreeEdge { child, parent: parent_of(df, child) })
        .collect()
}

/// Sort key of an object boundary crack.
///
/// Keys of different objects compare by object first and are otherwise
/// unrelated. Within one object the order is: smaller `f`, then smaller
/// angular position of the crack centre around the anchor, then nearer to
/// the anchor, then unfolded before folded. Distinct cracks never get past
/// that point; the crack coordinates only make the order formally total.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeOrderKey {
    pub object: usize,
    pub f: u32,
    /// Crack centre minus anchor centre, folded into the half-plane that
    /// starts at the reference ray and turns clockwise.
    pub direction: (i64, i64),
    pub dist2: i64,
    /// Set when `direction` is the negated offset; breaks the tie between a
    /// crack and its mirror image through the anchor.
    pub folded: bool,
    pub crack: Crack,
}

impl Ord for EdgeOrderKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.object
            .cmp(&other.object)
            .then(self.f.cmp(&other.f))
            .then_with(|| 0.cmp(&cross(self.direction, other.direction)))
            .then(self.dist2.cmp(&other.dist2))
            .then(self.folded.cmp(&other.folded))
            .then(self.crack.cmp(&other.crack))
    }
}

impl PartialOrd for EdgeOrderKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Key of a crack with respect to an object's distance field.
pub fn edge_key(pm: &PixelMap, df: &DistanceField, e: EdgeId) -> Result<EdgeOrderKey> {
    if e as usize >= pm.edge_count() {
        return Err(Error::UnknownEdge(e));
    }
    let f = pm
        .crack_sides(e)
        .iter()
        .flatten()
        .filter_map(|&p| df.get(p))
        .min()
        .ok_or(Error::CrackNotOnObject(e))?;
    let crack = pm.edge_to_crack(e);
    let v = sub(crack.doubled_center(), df.anchor.doubled_center());
    let r = df.reference;
    let c = cross(r, v);
    let in_half = c < 0 || (c == 0 && dot(r, v) > 0);
    let direction = if in_half { v } else { (-v.0, -v.1) };
    Ok(EdgeOrderKey { object: df.object, f, direction, dist2: dot(v, v), folded: !in_half, crack })
}

/// Strict total order on the object's boundary cracks.
pub fn edge_compare(pm: &PixelMap, df: &DistanceField, e: EdgeId, e2: EdgeId) -> Result<Ordering> {
    Ok(edge_key(pm, df, e)?.cmp(&edge_key(pm, df, e2)?))
}

/// A stable tree edge in base ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct StableEdge {
    pub edge: EdgeId,
    pub child: VertexId,
    pub parent: VertexId,
    /// Which dart side of `edge` faces the child pixel.
    pub child_side: u8,
}

/// Everything the invariant mode needs, for all objects of an image.
#[derive(Clone, Debug)]
pub struct EdgeOrder {
    fields: Vec<DistanceField>,
    keys: Vec<Option<EdgeOrderKey>>,
    /// Sorted by edge.
    tree: Vec<StableEdge>,
}

impl EdgeOrder {
    /// Uses the pinned anchor inside an object when there is one, the raster
    /// minimum otherwise.
    pub fn new(pm: &PixelMap, objects: &[Object], anchors: &[Pixel]) -> Result<Self> {
        let mut chosen: Vec<Option<Pixel>> = vec![None; objects.len()];
        for &a in anchors {
            let Some(o) = objects.iter().position(|o| o.contains(a)) else {
                return Err(Error::PixelOutsideObject { x: a.x, y: a.y });
            };
            if chosen[o].replace(a).is_some() {
                return Err(Error::DuplicateAnchor { x: a.x, y: a.y });
            }
        }
        let mut keys = vec![None; pm.edge_count()];
        let mut tree = Vec::new();
        let mut fields = Vec::with_capacity(objects.len());
        for (obj, pinned) in objects.iter().zip(chosen) {
            let df = distance_field(obj, pinned.unwrap_or_else(|| anchor_vertex(obj)))?;
            for &p in &obj.pixels {
                for e in pm.pixel_cracks(p) {
                    if keys[e as usize].is_none() {
                        keys[e as usize] = Some(edge_key(pm, &df, e)?);
                    }
                }
            }
            for t in stable_tree(obj, &df) {
                let e = pm.crack_between(t.child, t.parent).expect("tree edges join neighbours");
                let child_side = if pm.crack_sides(e)[0] == Some(t.child) { 0 } else { 1 };
                tree.push(StableEdge {
                    edge: e,
                    child: pm.pixel_to_vertex(t.child),
                    parent: pm.pixel_to_vertex(t.parent),
                    child_side,
                });
            }
            fields.push(df);
        }
        tree.sort_unstable();
        Ok(EdgeOrder { fields, keys, tree })
    }

    pub fn key(&self, e: EdgeId) -> Option<&EdgeOrderKey> {
        self.keys.get(e as usize)?.as_ref()
    }

    pub fn field(&self, object: usize) -> &DistanceField {
        &self.fields[object]
    }

    /// Stable tree edges of every object.
    pub fn tree(&self) -> &[StableEdge] {
        &self.tree
    }

    pub fn is_tree_edge(&self, e: EdgeId) -> bool {
        self.tree.binary_search_by_key(&e, |t| t.edge).is_ok()
    }
}
