//! Base level of the pyramid: one primal vertex per pixel plus the exterior,
//! one dual vertex per lattice corner, one edge per unit crack.

use alloc::vec;
use alloc::vec::Vec;

use crate::image::{BinaryImage, Pixel};
use crate::map::{CornerId, EdgeId, LevelPair, VertexId};

/// A unit crack between two lattice corners, smaller corner first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Crack {
    pub a: (u32, u32),
    pub b: (u32, u32),
}

impl Crack {
    /// Builds a crack from two corners at unit distance, in either order.
    pub fn new(p: (u32, u32), q: (u32, u32)) -> Option<Crack> {
        let dx = p.0.abs_diff(q.0);
        let dy = p.1.abs_diff(q.1);
        if dx + dy != 1 {
            return None;
        }
        let (a, b) = if p <= q { (p, q) } else { (q, p) };
        Some(Crack { a, b })
    }

    pub fn is_horizontal(&self) -> bool {
        self.a.1 == self.b.1
    }

    /// Twice the midpoint.
    pub fn doubled_center(&self) -> (i64, i64) {
        ((self.a.0 + self.b.0) as i64, (self.a.1 + self.b.1) as i64)
    }
}

/// Index arithmetic between pixels, cracks, corners and base ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PixelMap {
    width: u32,
    height: u32,
}

impl PixelMap {
    pub fn new(width: u32, height: u32) -> Self {
        PixelMap { width, height }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel_to_vertex(&self, p: Pixel) -> VertexId {
        p.y * self.width + p.x
    }

    /// The vertex standing for everything outside the image.
    pub fn exterior_vertex(&self) -> VertexId {
        self.width * self.height
    }

    /// The pixel of a base vertex, `None` for the exterior.
    pub fn vertex_pixel(&self, v: VertexId) -> Option<Pixel> {
        (v < self.exterior_vertex()).then(|| Pixel { x: v % self.width, y: v / self.width })
    }

    pub fn vertex_count(&self) -> usize {
        (self.width * self.height) as usize + 1
    }

    pub fn edge_count(&self) -> usize {
        (self.width * (self.height + 1) + self.height * (self.width + 1)) as usize
    }

    pub fn corner_count(&self) -> usize {
        ((self.width + 1) * (self.height + 1)) as usize
    }

    fn horizontal_count(&self) -> u32 {
        self.width * (self.height + 1)
    }

    pub fn corner_id(&self, x: u32, y: u32) -> CornerId {
        y * (self.width + 1) + x
    }

    pub fn corner_point(&self, c: CornerId) -> (u32, u32) {
        (c % (self.width + 1), c / (self.width + 1))
    }

    pub fn crack_to_edge(&self, c: Crack) -> Option<EdgeId> {
        let (x, y) = c.a;
        if c.is_horizontal() {
            (x < self.width && y <= self.height).then(|| y * self.width + x)
        } else {
            (x <= self.width && y < self.height)
                .then(|| self.horizontal_count() + y * (self.width + 1) + x)
        }
    }

    pub fn edge_to_crack(&self, e: EdgeId) -> Crack {
        let h = self.horizontal_count();
        if e < h {
            let (x, y) = (e % self.width, e / self.width);
            Crack { a: (x, y), b: (x + 1, y) }
        } else {
            let r = e - h;
            let (x, y) = (r % (self.width + 1), r / (self.width + 1));
            Crack { a: (x, y), b: (x, y + 1) }
        }
    }

    /// Pixels on side 0 and side 1 of a crack; `None` is the exterior.
    ///
    /// Side 0 is below a horizontal crack and right of a vertical one.
    pub fn crack_sides(&self, e: EdgeId) -> [Option<Pixel>; 2] {
        let c = self.edge_to_crack(e);
        let (x, y) = c.a;
        if c.is_horizontal() {
            let below = (y < self.height).then_some(Pixel { x, y });
            let above = (y > 0).then(|| Pixel { x, y: y - 1 });
            [below, above]
        } else {
            let right = (x < self.width).then_some(Pixel { x, y });
            let left = (x > 0).then(|| Pixel { x: x - 1, y });
            [right, left]
        }
    }

    /// Crack shared by two 4-adjacent pixels.
    pub fn crack_between(&self, p: Pixel, q: Pixel) -> Option<EdgeId> {
        let c = if p.y == q.y && p.x.abs_diff(q.x) == 1 {
            let x = p.x.max(q.x);
            Crack { a: (x, p.y), b: (x, p.y + 1) }
        } else if p.x == q.x && p.y.abs_diff(q.y) == 1 {
            let y = p.y.max(q.y);
            Crack { a: (p.x, y), b: (p.x + 1, y) }
        } else {
            return None;
        };
        self.crack_to_edge(c)
    }

    /// The four cracks of a pixel: top, right, bottom, left.
    pub fn pixel_cracks(&self, p: Pixel) -> [EdgeId; 4] {
        let h = |x: u32, y: u32| y * self.width + x;
        let v = |x: u32, y: u32| self.horizontal_count() + y * (self.width + 1) + x;
        [h(p.x, p.y), v(p.x + 1, p.y), h(p.x, p.y + 1), v(p.x, p.y)]
    }

    /// Image of a crack under a clockwise quarter turn of the image.
    pub fn rotate_crack_cw(&self, c: Crack) -> Crack {
        let r = |(x, y): (u32, u32)| (self.height - y, x);
        Crack::new(r(c.a), r(c.b)).expect("rotation keeps unit length")
    }
}

/// Builds the base level and its index map.
pub fn build_base(img: &BinaryImage) -> (LevelPair, PixelMap) {
    let (w, hgt) = (img.width(), img.height());
    let pm = PixelMap::new(w, hgt);
    let ne = pm.edge_count();
    let hc = pm.horizontal_count();
    let hd = |x: u32, y: u32, s: u32| 2 * (y * w + x) + s;
    let vd = |x: u32, y: u32, s: u32| 2 * (hc + y * (w + 1) + x) + s;

    let mut vertex_of = vec![0; 2 * ne];
    let mut corner_of = vec![0; 2 * ne];
    for e in 0..ne as u32 {
        let sides = pm.crack_sides(e);
        let c = pm.edge_to_crack(e);
        for s in 0..2 {
            vertex_of[(2 * e + s) as usize] = match sides[s as usize] {
                Some(p) => pm.pixel_to_vertex(p),
                None => pm.exterior_vertex(),
            };
        }
        // The corner reached by turning from a dart into the next one.
        let (c0, c1) = if c.is_horizontal() { (c.a, c.b) } else { (c.b, c.a) };
        corner_of[2 * e as usize] = pm.corner_id(c0.0, c0.1);
        corner_of[2 * e as usize + 1] = pm.corner_id(c1.0, c1.1);
    }

    let mut sigma = vec![0u32; 2 * ne];
    let mut link = |cycle: &[u32]| {
        for (i, &d) in cycle.iter().enumerate() {
            sigma[d as usize] = cycle[(i + 1) % cycle.len()];
        }
    };
    for y in 0..hgt {
        for x in 0..w {
            link(&[hd(x, y, 0), vd(x + 1, y, 1), hd(x, y + 1, 1), vd(x, y, 0)]);
        }
    }
    let mut outer = Vec::with_capacity(2 * (w + hgt) as usize);
    outer.extend((0..w).rev().map(|x| hd(x, 0, 1)));
    outer.extend((0..hgt).map(|y| vd(0, y, 1)));
    outer.extend((0..w).map(|x| hd(x, hgt, 0)));
    outer.extend((0..hgt).rev().map(|y| vd(w, y, 0)));
    link(&outer);

    let phi = (0..2 * ne as u32).map(|d| sigma[(d ^ 1) as usize]).collect();
    let level = LevelPair {
        primal_edges: (0..ne as u32).collect(),
        dual_edges: (0..ne as u32).collect(),
        sigma,
        phi,
        vertex_of,
        corner_of,
        vertices: (0..pm.vertex_count() as u32).collect(),
        corners: (0..pm.corner_count() as u32).collect(),
    };
    (level, pm)
}
