//! Binary images, 4-connected objects and the cubical hole oracle.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

/// A pixel position; x grows rightward, y downward, origin top-left.
///
/// Ordered in raster order (row first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pixel {
    pub x: u32,
    pub y: u32,
}

impl Pixel {
    pub const fn new(x: u32, y: u32) -> Self {
        Pixel { x, y }
    }

    /// Center of the pixel in doubled integer coordinates.
    pub fn doubled_center(self) -> (i64, i64) {
        (2 * self.x as i64 + 1, 2 * self.y as i64 + 1)
    }
}

impl Ord for Pixel {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Pixel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A width x height grid of foreground (`true`) / background (`false`) pixels.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    data: Vec<bool>,
}

impl BinaryImage {
    /// All-background image. Panics on a zero dimension.
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width >= 1 && height >= 1, "image must be at least 1x1");
        BinaryImage { width, height, data: vec![false; width as usize * height as usize] }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> bool) -> Self {
        let mut img = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                img.set(x, y, f(x, y));
            }
        }
        img
    }

    /// Parses rows of `#`/`1` (foreground) and `.`/`0` (background).
    ///
    /// Blank lines and surrounding whitespace are ignored; panics on ragged
    /// rows or other characters. Meant for fixtures.
    pub fn from_ascii(art: &str) -> Self {
        let rows: Vec<&str> = art.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        assert!(!rows.is_empty(), "empty picture");
        let width = rows[0].chars().count() as u32;
        let height = rows.len() as u32;
        let mut img = Self::new(width, height);
        for (y, row) in rows.iter().enumerate() {
            assert_eq!(row.chars().count() as u32, width, "ragged row {y}");
            for (x, ch) in row.chars().enumerate() {
                let v = match ch {
                    '#' | '1' => true,
                    '.' | '0' => false,
                    other => panic!("unexpected character {other:?}"),
                };
                img.set(x as u32, y as u32, v);
            }
        }
        img
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn index(&self, x: u32, y: u32) -> usize {
        y as usize * self.width as usize + x as usize
    }

    #[inline]
    pub fn pixel_at(&self, index: usize) -> Pixel {
        Pixel::new((index % self.width as usize) as u32, (index / self.width as usize) as u32)
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> bool {
        self.data[self.index(x, y)]
    }

    pub fn is_foreground(&self, p: Pixel) -> bool {
        self.get(p.x, p.y)
    }

    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        let i = self.index(x, y);
        self.data[i] = value;
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && x < self.width as i64 && y < self.height as i64
    }

    /// 4-neighbors inside the image.
    pub fn neighbors(&self, p: Pixel) -> impl Iterator<Item = Pixel> + '_ {
        const STEPS: [(i64, i64); 4] = [(0, -1), (1, 0), (0, 1), (-1, 0)];
        STEPS.iter().filter_map(move |&(dx, dy)| {
            let (x, y) = (p.x as i64 + dx, p.y as i64 + dy);
            self.contains(x, y).then(|| Pixel::new(x as u32, y as u32))
        })
    }

    pub fn foreground_count(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    /// Rotation by 90 degrees clockwise on screen: `(x, y) -> (H-1-y, x)`.
    pub fn rotate_cw(&self) -> BinaryImage {
        let (w, h) = (self.width, self.height);
        BinaryImage::from_fn(h, w, |nx, ny| self.get(ny, h - 1 - nx))
    }

    /// Image of `p` under [`BinaryImage::rotate_cw`] of `self`.
    pub fn rotate_pixel_cw(&self, p: Pixel) -> Pixel {
        Pixel::new(self.height - 1 - p.y, p.x)
    }
}

/// One maximal 4-connected set of foreground pixels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Object {
    /// Position in raster order of the objects' top-left-most pixels.
    pub index: usize,
    /// Member pixels in raster order.
    pub pixels: Vec<Pixel>,
}

impl Object {
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn contains(&self, p: Pixel) -> bool {
        self.pixels.binary_search(&p).is_ok()
    }

    /// Top-left-most pixel.
    pub fn first(&self) -> Pixel {
        self.pixels[0]
    }

    /// Inclusive bounding box `(min_x, min_y, max_x, max_y)`.
    pub fn bounding_box(&self) -> (u32, u32, u32, u32) {
        let mut b = (u32::MAX, u32::MAX, 0, 0);
        for p in &self.pixels {
            b.0 = b.0.min(p.x);
            b.1 = b.1.min(p.y);
            b.2 = b.2.max(p.x);
            b.3 = b.3.max(p.y);
        }
        b
    }

    /// True when the pixel set is 4-connected.
    pub fn is_connected(&self) -> bool {
        if self.pixels.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.pixels.len()];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = queue.pop_front() {
            let p = self.pixels[i];
            for (dx, dy) in [(0i64, -1i64), (1, 0), (0, 1), (-1, 0)] {
                let (x, y) = (p.x as i64 + dx, p.y as i64 + dy);
                if x < 0 || y < 0 {
                    continue;
                }
                if let Ok(j) = self.pixels.binary_search(&Pixel::new(x as u32, y as u32)) {
                    if !seen[j] {
                        seen[j] = true;
                        count += 1;
                        queue.push_back(j);
                    }
                }
            }
        }
        count == self.pixels.len()
    }
}

/// Partition of the foreground into maximal 4-connected components,
/// ordered by the raster position of their top-left-most pixel.
pub fn object_components(img: &BinaryImage) -> Vec<Object> {
    let mut label = vec![usize::MAX; img.pixel_count()];
    let mut objects = Vec::new();
    for start in 0..img.pixel_count() {
        let sp = img.pixel_at(start);
        if !img.is_foreground(sp) || label[start] != usize::MAX {
            continue;
        }
        let index = objects.len();
        let mut pixels = vec![sp];
        label[start] = index;
        let mut queue = VecDeque::from([sp]);
        while let Some(p) = queue.pop_front() {
            for q in img.neighbors(p) {
                let qi = img.index(q.x, q.y);
                if img.is_foreground(q) && label[qi] == usize::MAX {
                    label[qi] = index;
                    pixels.push(q);
                    queue.push_back(q);
                }
            }
        }
        pixels.sort_unstable();
        objects.push(Object { index, pixels });
    }
    objects
}

/// Number of holes of `obj` from the Euler characteristic of the union of its
/// closed unit squares: holes = 1 - (V - E + F).
pub fn hole_count_oracle(obj: &Object) -> usize {
    let mut corners = BTreeSet::new();
    let mut cracks = BTreeSet::new();
    for p in &obj.pixels {
        let (x, y) = (p.x, p.y);
        for c in [(x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)] {
            corners.insert(c);
        }
        // Horizontal cracks are keyed by their left corner, vertical by their top corner.
        cracks.insert((0u8, x, y));
        cracks.insert((0u8, x, y + 1));
        cracks.insert((1u8, x, y));
        cracks.insert((1u8, x + 1, y));
    }
    let chi = corners.len() as i64 - cracks.len() as i64 + obj.pixels.len() as i64;
    debug_assert!(chi <= 1, "a connected object has Euler characteristic at most 1");
    (1 - chi) as usize
}

/// Which side of an object a pixel (or the image exterior) lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Object,
    Outer,
    Hole(usize),
}

/// The 4-connected components of the complement of one object.
///
/// The component touching the image exterior is the outer one; the others are
/// holes numbered by the raster position of their top-left-most pixel.
#[derive(Clone, Debug)]
pub struct ObjectComplement {
    x0: u32,
    y0: u32,
    w: u32,
    h: u32,
    // 0 = object, 1 = outer, 2 + i = hole i (inside the window only).
    labels: Vec<u32>,
    holes: Vec<Vec<Pixel>>,
}

impl ObjectComplement {
    pub fn new(img: &BinaryImage, obj: &Object) -> Self {
        // Outside the object's bounding box grown by one pixel everything is
        // connected to the exterior, so the flood fill stays inside that window.
        let (bx0, by0, bx1, by1) = obj.bounding_box();
        let x0 = bx0.saturating_sub(1);
        let y0 = by0.saturating_sub(1);
        let x1 = (bx1 + 1).min(img.width() - 1);
        let y1 = (by1 + 1).min(img.height() - 1);
        let (w, h) = (x1 - x0 + 1, y1 - y0 + 1);
        const UNSET: u32 = u32::MAX;
        let mut labels = vec![UNSET; w as usize * h as usize];
        let at = |x: u32, y: u32| ((y - y0) * w + (x - x0)) as usize;
        for p in &obj.pixels {
            labels[at(p.x, p.y)] = 0;
        }
        let flood = |labels: &mut Vec<u32>, seed: Pixel, value: u32, out: &mut Vec<Pixel>| {
            let mut queue = VecDeque::from([seed]);
            labels[at(seed.x, seed.y)] = value;
            out.push(seed);
            while let Some(p) = queue.pop_front() {
                for (dx, dy) in [(0i64, -1i64), (1, 0), (0, 1), (-1, 0)] {
                    let (x, y) = (p.x as i64 + dx, p.y as i64 + dy);
                    if x < x0 as i64 || y < y0 as i64 || x > x1 as i64 || y > y1 as i64 {
                        continue;
                    }
                    let q = Pixel::new(x as u32, y as u32);
                    if labels[at(q.x, q.y)] == UNSET {
                        labels[at(q.x, q.y)] = value;
                        out.push(q);
                        queue.push_back(q);
                    }
                }
            }
        };
        let mut scratch = Vec::new();
        for y in y0..=y1 {
            for x in x0..=x1 {
                let on_rim = x == x0 || y == y0 || x == x1 || y == y1;
                if on_rim && labels[at(x, y)] == UNSET {
                    flood(&mut labels, Pixel::new(x, y), 1, &mut scratch);
                }
            }
        }
        let mut holes = Vec::new();
        for y in y0..=y1 {
            for x in x0..=x1 {
                if labels[at(x, y)] == UNSET {
                    let mut members = Vec::new();
                    flood(&mut labels, Pixel::new(x, y), 2 + holes.len() as u32, &mut members);
                    members.sort_unstable();
                    holes.push(members);
                }
            }
        }
        ObjectComplement { x0, y0, w, h, labels, holes }
    }

    pub fn hole_count(&self) -> usize {
        self.holes.len()
    }

    /// Pixels of hole `i` in raster order.
    pub fn hole_pixels(&self, i: usize) -> &[Pixel] {
        &self.holes[i]
    }

    /// Side of a pixel; `None` stands for the exterior of the image.
    pub fn side(&self, p: Option<Pixel>) -> Side {
        let Some(p) = p else { return Side::Outer };
        if p.x < self.x0 || p.y < self.y0 || p.x >= self.x0 + self.w || p.y >= self.y0 + self.h {
            return Side::Outer;
        }
        match self.labels[((p.y - self.y0) * self.w + (p.x - self.x0)) as usize] {
            0 => Side::Object,
            1 => Side::Outer,
            l => Side::Hole(l as usize - 2),
        }
    }
}
