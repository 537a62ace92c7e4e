//! Brute-force GF(2) checks on the explicit boundary cell complex of an
//! object at one level.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gf2::{Gf2Matrix, Gf2Vector};
use crate::image::{Object, ObjectComplement, Pixel, Side};
use crate::map::{CornerId, EdgeId, VertexId};
use crate::pyramid::Pyramid;

/// Faces of one object at one level, with their closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryComplex {
    pub level: usize,
    pub object: usize,
    pub cells0: Vec<CornerId>,
    pub cells1: Vec<EdgeId>,
    pub cells2: Vec<VertexId>,
    /// Edges to corners.
    pub d1: Gf2Matrix,
    /// Faces to edges.
    pub d2: Gf2Matrix,
}

impl BoundaryComplex {
    pub fn edge_index(&self, e: EdgeId) -> Option<usize> {
        self.cells1.binary_search(&e).ok()
    }

    /// Indicator vector of an edge set.
    pub fn cochain(&self, edges: &[EdgeId]) -> Result<Gf2Vector> {
        let mut v = Gf2Vector::zeros(self.cells1.len());
        for &e in edges {
            v.flip(self.edge_index(e).ok_or(Error::UnknownEdge(e))?);
        }
        Ok(v)
    }

    fn support(&self, v: &Gf2Vector) -> Vec<EdgeId> {
        v.ones().map(|i| self.cells1[i]).collect()
    }

    /// `d1 * d2 = 0`.
    pub fn is_chain_complex(&self) -> bool {
        self.d1.mul(&self.d2).is_zero()
    }
}

pub fn boundary_complex(p: &Pyramid, object: usize, level: usize) -> Result<BoundaryComplex> {
    let l = p.level(level)?;
    if object >= p.objects().len() {
        return Err(Error::NotConnected);
    }
    let cells2: Vec<VertexId> =
        l.vertices().iter().copied().filter(|&v| p.object_of_vertex(v) == Some(object)).collect();
    let mut edges = BTreeSet::new();
    for (i, &e) in l.edges().iter().enumerate() {
        if cells2.binary_search(&l.vertex_of[2 * i]).is_ok() || cells2.binary_search(&l.vertex_of[2 * i + 1]).is_ok() {
            edges.insert(e);
        }
    }
    let cells1: Vec<EdgeId> = edges.into_iter().collect();
    let mut corners = BTreeSet::new();
    for &e in &cells1 {
        corners.extend(l.corner_endpoints(e).expect("edge of level"));
    }
    let cells0: Vec<CornerId> = corners.into_iter().collect();
    let mut d1 = Gf2Matrix::zeros(cells0.len(), cells1.len());
    let mut d2 = Gf2Matrix::zeros(cells1.len(), cells2.len());
    for (j, &e) in cells1.iter().enumerate() {
        for c in l.corner_endpoints(e).unwrap() {
            d1.flip(cells0.binary_search(&c).unwrap(), j);
        }
        for v in l.endpoints(e).unwrap() {
            if let Ok(f) = cells2.binary_search(&v) {
                d2.flip(j, f);
            }
        }
    }
    Ok(BoundaryComplex { level, object, cells0, cells1, cells2, d1, d2 })
}

/// Every face boundary meets `c` an even number of times.
pub fn is_cocycle(k: &BoundaryComplex, c: &[EdgeId]) -> Result<bool> {
    let v = k.cochain(c)?;
    Ok((0..k.cells2.len()).all(|f| !k.d2.column(f).dot(&v)))
}

/// `c + c2` is the coboundary of some set of corners.
pub fn are_cohomologous(k: &BoundaryComplex, c: &[EdgeId], c2: &[EdgeId]) -> Result<bool> {
    if !is_cocycle(k, c)? || !is_cocycle(k, c2)? {
        return Err(Error::NotACocycle { level: k.level });
    }
    let diff = k.cochain(c)?.xor(&k.cochain(c2)?);
    Ok(k.d1.transpose().in_column_span(&diff))
}

/// `(b0, b1)` of the complex.
pub fn betti(k: &BoundaryComplex) -> (usize, usize) {
    let r1 = k.d1.rank();
    let r2 = k.d2.rank();
    (k.cells0.len() - r1, k.cells1.len() - r1 - r2)
}

/// The cocycles are independent modulo coboundaries and there are `b1` of them.
pub fn basis_independent(k: &BoundaryComplex, basis: &[Vec<EdgeId>]) -> Result<bool> {
    let delta0 = k.d1.transpose();
    let base_rank = delta0.rank();
    let mut columns: Vec<Gf2Vector> = (0..delta0.cols()).map(|c| delta0.column(c)).collect();
    for c in basis {
        if !is_cocycle(k, c)? {
            return Err(Error::NotACocycle { level: k.level });
        }
        columns.push(k.cochain(c)?);
    }
    let all = Gf2Matrix::from_columns(k.cells1.len(), &columns);
    Ok(all.rank() - base_rank == basis.len() && basis.len() == betti(k).1)
}

/// Base cracks between the object and hole `hole` of its complement.
pub fn hole_cycle(p: &Pyramid, object: usize, hole: usize) -> Result<Vec<EdgeId>> {
    let obj = p.objects().get(object).ok_or(Error::NotConnected)?;
    let comp = ObjectComplement::new(p.image(), obj);
    if hole >= comp.hole_count() {
        return Err(Error::NoSuchHole { hole, holes: comp.hole_count() });
    }
    let pm = p.pixel_map();
    let mut out = BTreeSet::new();
    for &q in comp.hole_pixels(hole) {
        for n in p.image().neighbors(q) {
            if obj.contains(n) {
                out.insert(pm.crack_between(q, n).expect("neighbours share a crack"));
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// `|c ∩ g|` is odd.
pub fn blocking_parity(c: &[EdgeId], g: &[EdgeId]) -> bool {
    let g: BTreeSet<EdgeId> = g.iter().copied().collect();
    c.iter().collect::<BTreeSet<_>>().into_iter().filter(|e| g.contains(e)).count() % 2 == 1
}

/// A cycle homologous to `g`: `g` plus the boundaries of the given faces.
pub fn homologous_cycle(k: &BoundaryComplex, g: &[EdgeId], faces: &[VertexId]) -> Result<Vec<EdgeId>> {
    let mut v = k.cochain(g)?;
    for &f in faces {
        let j = k.cells2.binary_search(&f).map_err(|_| Error::UnknownVertex(f))?;
        v.xor_assign(&k.d2.column(j));
    }
    Ok(k.support(&v))
}

fn side_cracks(p: &Pyramid, comp: &ObjectComplement, q: Pixel, want: Side) -> Vec<EdgeId> {
    let pm = p.pixel_map();
    pm.pixel_cracks(q)
        .into_iter()
        .filter(|&e| {
            let [s0, s1] = pm.crack_sides(e);
            let other = if s0 == Some(q) { s1 } else { s0 };
            comp.side(other) == want
        })
        .collect()
}

/// The cocycle of a foreground path from the hole to the outside: one crack
/// into the hole, the cracks between consecutive path pixels, one crack to
/// the outside.
pub fn rag_path_cocycle(p: &Pyramid, object: usize, hole: usize, path: &[Pixel]) -> Result<Vec<EdgeId>> {
    let obj: &Object = p.objects().get(object).ok_or(Error::NotConnected)?;
    let comp = ObjectComplement::new(p.image(), obj);
    if hole >= comp.hole_count() {
        return Err(Error::NoSuchHole { hole, holes: comp.hole_count() });
    }
    let (Some(&first), Some(&last)) = (path.first(), path.last()) else {
        return Err(Error::MalformedPath("empty"));
    };
    let mut seen = BTreeSet::new();
    for &q in path {
        if !obj.contains(q) {
            return Err(Error::PixelOutsideObject { x: q.x, y: q.y });
        }
        if !seen.insert(q) {
            return Err(Error::MalformedPath("repeated pixel"));
        }
    }
    let pm = p.pixel_map();
    let mut out = BTreeSet::new();
    for w in path.windows(2) {
        let e = pm.crack_between(w[0], w[1]).ok_or(Error::MalformedPath("consecutive pixels not 4-adjacent"))?;
        out.insert(e);
    }
    let ea = *side_cracks(p, &comp, first, Side::Hole(hole))
        .iter()
        .min()
        .ok_or(Error::MalformedPath("first pixel does not touch the hole"))?;
    let eb = *side_cracks(p, &comp, last, Side::Outer)
        .iter()
        .min()
        .ok_or(Error::MalformedPath("last pixel does not touch the outside"))?;
    out.insert(ea);
    out.insert(eb);
    Ok(out.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::BinaryImage;
    use crate::pyramid::{build_pyramid, Mode};

    fn pyr(art: &str) -> Pyramid {
        build_pyramid(&BinaryImage::from_ascii(art), Mode::Fast, 0)
    }

    #[test]
    fn unit_object() {
        let p = pyr("#");
        let k = boundary_complex(&p, 0, 0).unwrap();
        assert_eq!((k.cells2.len(), k.cells1.len(), k.cells0.len()), (1, 4, 4));
        assert!(k.is_chain_complex());
        assert_eq!(betti(&k), (1, 0));
        assert!(basis_independent(&k, &[]).unwrap());
    }

    #[test]
    fn ring_counts_and_betti() {
        let p = pyr("###\n#.#\n###");
        let k = boundary_complex(&p, 0, 0).unwrap();
        assert_eq!((k.cells2.len(), k.cells1.len(), k.cells0.len()), (8, 24, 16));
        assert_eq!(betti(&k), (1, 1));
        let top = boundary_complex(&p, 0, p.height()).unwrap();
        assert_eq!(top.cells2.len(), 1);
        assert_eq!(betti(&top), (1, 1));
        assert!(top.is_chain_complex());
        let g = hole_cycle(&p, 0, 0).unwrap();
        assert_eq!(g.len(), 4);
        assert!(k.d1.mul_vec(&k.cochain(&g).unwrap()).is_zero());
    }

    #[test]
    fn block_and_frame_betti() {
        assert_eq!(betti(&boundary_complex(&pyr("##\n##"), 0, 0).unwrap()), (1, 0));
        assert_eq!(betti(&boundary_complex(&pyr("#####\n#.#.#\n#####"), 0, 0).unwrap()), (1, 2));
    }

    #[test]
    fn cocycle_examples() {
        let p = pyr("##\n##");
        let k = boundary_complex(&p, 0, 0).unwrap();
        assert!(is_cocycle(&k, &[]).unwrap());
        let interior = p.pixel_map().crack_between(Pixel::new(0, 0), Pixel::new(1, 0)).unwrap();
        assert!(!is_cocycle(&k, &[interior]).unwrap());
        assert_eq!(is_cocycle(&k, &[10_000]), Err(Error::UnknownEdge(10_000)));
    }

    #[test]
    fn adding_a_corner_coboundary_keeps_the_class() {
        let p = pyr("###\n#.#\n###");
        let k = boundary_complex(&p, 0, 0).unwrap();
        let c = rag_path_cocycle(&p, 0, 0, &[Pixel::new(0, 1)]).unwrap();
        let v1 = k.cells0.binary_search(&p.pixel_map().corner_id(1, 1)).unwrap();
        let delta = k.support(k.d1.row(v1));
        assert_eq!(delta.len(), 4);
        let d = k.support(&k.cochain(&c).unwrap().xor(k.d1.row(v1)));
        assert!(is_cocycle(&k, &d).unwrap());
        assert!(are_cohomologous(&k, &c, &d).unwrap());
        assert!(are_cohomologous(&k, &c, &c).unwrap());
    }

    #[test]
    fn ring_path_cocycles() {
        let p = pyr("###\n#.#\n###");
        let k = boundary_complex(&p, 0, 0).unwrap();
        let a = rag_path_cocycle(&p, 0, 0, &[Pixel::new(0, 1)]).unwrap();
        assert_eq!(a.len(), 2);
        assert!(is_cocycle(&k, &a).unwrap());
        let b = rag_path_cocycle(&p, 0, 0, &[Pixel::new(1, 2)]).unwrap();
        assert!(are_cohomologous(&k, &a, &b).unwrap());
        assert!(basis_independent(&k, core::slice::from_ref(&a)).unwrap());
        assert!(!basis_independent(&k, &[a.clone(), a.clone()]).unwrap());
        let g = hole_cycle(&p, 0, 0).unwrap();
        assert!(blocking_parity(&a, &g));
        assert!(!blocking_parity(&[], &g));
        assert!(matches!(rag_path_cocycle(&p, 0, 0, &[]), Err(Error::MalformedPath(_))));
        assert!(matches!(
            rag_path_cocycle(&p, 0, 0, &[Pixel::new(0, 0), Pixel::new(2, 0)]),
            Err(Error::MalformedPath(_))
        ));
    }

    #[test]
    fn frame_holes_are_not_cohomologous() {
        let p = pyr("#####\n#.#.#\n#####");
        let k = boundary_complex(&p, 0, 0).unwrap();
        let a = rag_path_cocycle(&p, 0, 0, &[Pixel::new(1, 0)]).unwrap();
        let b = rag_path_cocycle(&p, 0, 1, &[Pixel::new(3, 0)]).unwrap();
        assert!(!are_cohomologous(&k, &a, &b).unwrap());
        assert!(basis_independent(&k, &[a.clone(), b.clone()]).unwrap());
        let g1 = hole_cycle(&p, 0, 1).unwrap();
        assert!(!blocking_parity(&a, &g1));
        assert!(blocking_parity(&b, &g1));
        assert_eq!(hole_cycle(&p, 0, 2), Err(Error::NoSuchHole { hole: 2, holes: 2 }));
    }

    #[test]
    fn hole_of_area_two() {
        let p = pyr("####\n#..#\n####");
        assert_eq!(hole_cycle(&p, 0, 0).unwrap().len(), 6);
    }
}
