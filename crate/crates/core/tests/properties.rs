mod common;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use cocyc_core::oracle::{betti, boundary_complex};
use cocyc_core::{
    build_base, edge_key, hole_count_oracle, BinaryImage, EdgeId, Gf2Matrix, Gf2Vector, ObjectComplement, Pixel,
    Pyramid, PyramidConfig, Side,
};
use common::{random_image, run};
use proptest::prelude::*;

fn image(max: u32) -> impl Strategy<Value = BinaryImage> {
    (1..=max, 1..=max, 0.2f64..0.8, any::<u64>()).prop_map(|(w, h, d, s)| random_image(w, h, d, s))
}

fn config() -> impl Strategy<Value = PyramidConfig> {
    prop_oneof![any::<u64>().prop_map(PyramidConfig::fast), Just(PyramidConfig::invariant())]
}

fn matrix(max: usize) -> impl Strategy<Value = Gf2Matrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        proptest::collection::vec(any::<bool>(), r * c).prop_map(move |bits| {
            let mut m = Gf2Matrix::zeros(r, c);
            for (i, b) in bits.into_iter().enumerate() {
                m.set(i / c, i % c, b);
            }
            m
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_is_transpose_invariant(m in matrix(12)) {
        prop_assert_eq!(m.rank(), m.transpose().rank());
        prop_assert!(m.rank() <= m.rows().min(m.cols()));
    }

    #[test]
    fn solve_inverts_products(m in matrix(12), seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let y = Gf2Vector::from_bits(&(0..m.cols()).map(|_| rand::Rng::random_bool(&mut r, 0.5)).collect::<Vec<_>>());
        let b = m.mul_vec(&y);
        prop_assert!(m.in_column_span(&b));
        let x = m.solve(&b).unwrap();
        prop_assert_eq!(m.mul_vec(&x), b);
    }

    #[test]
    fn solve_agrees_with_rank(m in matrix(10), bits in proptest::collection::vec(any::<bool>(), 10)) {
        let b = Gf2Vector::from_bits(&bits[..m.rows()]);
        let cols: Vec<Gf2Vector> = (0..m.cols()).map(|c| m.column(c)).chain([b.clone()]).collect();
        let augmented = Gf2Matrix::from_columns(m.rows(), &cols);
        prop_assert_eq!(m.solve(&b).is_some(), augmented.rank() == m.rank());
    }

    #[test]
    fn base_passes_euler_check(img in image(64)) {
        let (base, pm) = build_base(&img);
        prop_assert!(base.euler_check());
        prop_assert_eq!(base.vertex_count(), pm.vertex_count());
        prop_assert_eq!(base.edge_count(), pm.edge_count());
        prop_assert_eq!(base.corner_count(), pm.corner_count());
    }

    #[test]
    fn hole_oracle_matches_first_betti_number(img in image(14), cfg in config()) {
        let p = Pyramid::build(&img, &cfg).unwrap();
        for (o, obj) in p.objects().iter().enumerate() {
            let k = boundary_complex(&p, o, 0).unwrap();
            prop_assert!(k.is_chain_complex());
            prop_assert_eq!(betti(&k), (1, hole_count_oracle(obj)));
            prop_assert_eq!(ObjectComplement::new(&img, obj).hole_count(), hole_count_oracle(obj));
        }
    }

    #[test]
    fn edge_order_is_strict_and_total(img in image(12)) {
        let p = Pyramid::build(&img, &PyramidConfig::invariant()).unwrap();
        let order = p.order().unwrap();
        let pm = p.pixel_map();
        for (o, obj) in p.objects().iter().enumerate() {
            let df = order.field(o);
            let mut edges: Vec<EdgeId> = obj.pixels.iter().flat_map(|&q| pm.pixel_cracks(q)).collect();
            edges.sort_unstable();
            edges.dedup();
            let keys: Vec<_> = edges.iter().map(|&e| edge_key(pm, df, e).unwrap()).collect();
            for a in &keys {
                for b in &keys {
                    prop_assert_eq!(a.cmp(b), b.cmp(a).reverse());
                    // Distinct cracks are told apart before the crack tie-break.
                    if a.crack != b.crack {
                        let c = cocyc_core::EdgeOrderKey { crack: b.crack, ..*a };
                        prop_assert_ne!(c.cmp(b), std::cmp::Ordering::Equal);
                    }
                }
            }
            let mut sorted = keys.clone();
            sorted.sort();
            for w in sorted.windows(3) {
                prop_assert!(w[0] < w[1] && w[1] < w[2] && w[0] < w[2]);
            }
        }
    }

    #[test]
    fn pyramid_levels_are_consistent(img in image(16), cfg in config()) {
        let p = Pyramid::build(&img, &cfg).unwrap();
        prop_assert!(p.euler_check_all());
        for w in p.levels().windows(2) {
            prop_assert!(w[1].edge_count() < w[0].edge_count());
        }
        prop_assert_eq!(p.replay().unwrap(), p.levels().to_vec());
        let mut covered = BTreeSet::new();
        for &v in p.top().vertices() {
            let field = p.receptive_field(v).unwrap();
            prop_assert_eq!(p.eck(v).unwrap().len() + 1, field.len());
            for u in field {
                prop_assert!(covered.insert(u));
            }
        }
        prop_assert_eq!(covered.len(), p.levels()[0].vertex_count());
        let again = Pyramid::build(&img, &cfg).unwrap();
        prop_assert_eq!(again.levels(), p.levels());
    }

    #[test]
    fn every_object_reaches_one_top_vertex(img in image(16), cfg in config()) {
        let p = Pyramid::build(&img, &cfg).unwrap();
        let pm = p.pixel_map();
        for (o, obj) in p.objects().iter().enumerate() {
            let top = p.object_top_vertex(o).unwrap();
            let mut field = p.receptive_field(top).unwrap();
            field.sort_unstable();
            let mut pixels: Vec<_> = obj.pixels.iter().map(|&q| pm.pixel_to_vertex(q)).collect();
            pixels.sort_unstable();
            prop_assert_eq!(field, pixels);
        }
    }

    #[test]
    fn base_cocycle_is_the_eck_path_between_the_loops(img in image(16), cfg in config()) {
        let p = Pyramid::build(&img, &cfg).unwrap();
        let res = run(&p);
        let pm = p.pixel_map();
        for (o, cs) in res.cocycles.iter().enumerate() {
            let obj = &p.objects()[o];
            let h = &res.levels[o];
            let eck = p.eck(p.object_top_vertex(o).unwrap()).unwrap();
            let mut adj: BTreeMap<Pixel, Vec<(Pixel, EdgeId)>> = BTreeMap::new();
            for &e in &eck {
                let [Some(a), Some(b)] = pm.crack_sides(e) else { panic!("kernel edge on the image border") };
                adj.entry(a).or_default().push((b, e));
                adj.entry(b).or_default().push((a, e));
            }
            let inside = |e: EdgeId| pm.crack_sides(e).into_iter().flatten().find(|&q| obj.contains(q)).unwrap();
            for c in cs {
                let alpha = h.hole_loop(c.hole).unwrap();
                let beta = h.outer_loop();
                let (from, to) = (inside(alpha), inside(beta));
                let mut prev: BTreeMap<Pixel, (Pixel, EdgeId)> = BTreeMap::new();
                let mut queue = VecDeque::from([from]);
                let mut seen = BTreeSet::from([from]);
                while let Some(q) = queue.pop_front() {
                    for &(n, e) in adj.get(&q).map(Vec::as_slice).unwrap_or(&[]) {
                        if seen.insert(n) {
                            prev.insert(n, (q, e));
                            queue.push_back(n);
                        }
                    }
                }
                let mut expected = BTreeSet::from([alpha, beta]);
                let mut q = to;
                while q != from {
                    let (back, e) = prev[&q];
                    expected.insert(e);
                    q = back;
                }
                let got: BTreeSet<EdgeId> = c.edges.iter().copied().collect();
                prop_assert_eq!(got, expected);
            }
        }
    }

    #[test]
    fn cocycle_separates_hole_from_outside(img in image(14), cfg in config()) {
        let p = Pyramid::build(&img, &cfg).unwrap();
        let res = run(&p);
        prop_assert!(common::all_cocycles_pass(&p, &res));
        let pm = p.pixel_map();
        for (o, cs) in res.cocycles.iter().enumerate() {
            let comp = ObjectComplement::new(&img, &p.objects()[o]);
            for c in cs {
                let touching: Vec<Side> = c
                    .edges
                    .iter()
                    .flat_map(|&e| pm.crack_sides(e))
                    .map(|s| comp.side(s))
                    .filter(|s| *s != Side::Object)
                    .collect();
                prop_assert_eq!(touching.len(), 2);
                prop_assert!(touching.contains(&Side::Hole(c.hole)) && touching.contains(&Side::Outer));
            }
        }
    }
}
