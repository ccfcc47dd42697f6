use std::sync::OnceLock;

use latinsq::assembly::f_alpha;
use latinsq::census::all_squares;
use latinsq::group::{autoparatopy_group, Paratopism};
use latinsq::iso::{canonical_form, Mode};
use latinsq::onefact::{canonical_pair, BipGraph, Delta, PairKey};
use latinsq::square::{parse_squares, validate, LatinSquare, PointClass, Triple};
use proptest::prelude::*;

fn squares(n: usize) -> &'static [LatinSquare] {
    static FOUR: OnceLock<Vec<LatinSquare>> = OnceLock::new();
    static FIVE: OnceLock<Vec<LatinSquare>> = OnceLock::new();
    match n {
        4 => FOUR.get_or_init(|| all_squares(4)),
        _ => FIVE.get_or_init(|| all_squares(5)),
    }
}

fn perm(n: usize) -> impl Strategy<Value = Vec<u8>> {
    Just((0..n as u8).collect::<Vec<u8>>()).prop_shuffle()
}

fn paratopism(n: usize) -> impl Strategy<Value = Paratopism> {
    (perm(3), perm(n), perm(n), perm(n)).prop_map(|(c, a, b, s)| {
        let classes = [c[0], c[1], c[2]].map(|i| PointClass::from_index(i as usize));
        Paratopism::from_parts(classes, [a, b, s]).unwrap()
    })
}

fn square(n: usize) -> impl Strategy<Value = LatinSquare> {
    (0..squares(n).len()).prop_map(move |i| squares(n)[i].clone())
}

fn graph(n: usize) -> impl Strategy<Value = BipGraph> {
    proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
        let mut g = BipGraph::empty(n);
        for (k, &b) in bits.iter().enumerate() {
            if b {
                g.add_edge(k / n, k % n);
            }
        }
        g
    })
}

/// An involution of `0..n` from a shuffle: consecutive entries are paired
/// while `pairs` lasts.
fn involution(order: &[u8], pairs: usize) -> Vec<u8> {
    let mut map: Vec<u8> = (0..order.len() as u8).collect();
    for k in 0..pairs.min(order.len() / 2) {
        let (a, b) = (order[2 * k] as usize, order[2 * k + 1] as usize);
        map[a] = b as u8;
        map[b] = a as u8;
    }
    map
}

fn side_delta(n: usize, rows: &[u8], cols: &[u8]) -> Delta {
    let mut map: Vec<u8> = rows.to_vec();
    map.extend(cols.iter().map(|&c| c + n as u8));
    Delta::new(n, map).unwrap()
}

fn conjugate(p: &[u8], inv: &[u8]) -> Vec<u8> {
    let mut out = vec![0; p.len()];
    for x in 0..p.len() {
        out[p[x] as usize] = p[inv[x] as usize];
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn paratopic_squares_share_a_certificate(l in square(5), g in paratopism(5)) {
        let image = g.apply(&l);
        prop_assert_eq!(canonical_form(&l, Mode::Paratopy).certificate, canonical_form(&image, Mode::Paratopy).certificate);
    }

    #[test]
    fn group_order_is_a_class_invariant(l in square(5), g in paratopism(5)) {
        let a = autoparatopy_group(&l).order_u64();
        let b = autoparatopy_group(&g.apply(&l)).order_u64();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn inverse_and_order(g in paratopism(6)) {
        prop_assert!(g.compose(&g.inverse()).is_identity());
        prop_assert!(g.pow(g.element_order()).is_identity());
    }

    #[test]
    fn conjugates_share_a_key_and_fixed_points(g in paratopism(5), h in paratopism(5)) {
        let c = h.conjugate(&g);
        prop_assert_eq!(g.conjugacy_key(), c.conjugacy_key());
        prop_assert_eq!(f_alpha(&g), f_alpha(&c));
    }

    #[test]
    fn cycle_notation_round_trips(g in paratopism(7)) {
        prop_assert_eq!(Paratopism::from_cycles(7, &g.to_cycle_string()).unwrap(), g);
    }

    #[test]
    fn square_text_round_trips(l in square(5)) {
        prop_assert_eq!(parse_squares(&l.to_text()).unwrap(), vec![l]);
    }

    #[test]
    fn a_changed_cell_breaks_the_square(l in square(4), cell in 0usize..16, shift in 1u8..4) {
        let mut triples = l.triples();
        let t = triples[cell];
        triples[cell] = Triple::new(t.get(PointClass::Row), t.get(PointClass::Col), (t.get(PointClass::Sym) + shift) % 4);
        prop_assert!(!validate(4, &triples).unwrap().is_ok());
    }

    #[test]
    fn pair_keys_are_invariant(
        g in graph(5),
        rows in perm(5),
        cols in perm(5),
        sigma in perm(5),
        tau in perm(5),
        pairs in (0usize..3, 0usize..3),
        swap in any::<bool>(),
    ) {
        let (rho, kappa) = (involution(&rows, pairs.0), involution(&cols, pairs.1));
        let delta = side_delta(5, &rho, &kappa);
        let mut image = BipGraph::empty(5);
        for r in 0..5 {
            for c in 0..5 {
                if g.has_edge(r, c) {
                    let (r2, c2) = (sigma[r] as usize, tau[c] as usize);
                    if swap { image.add_edge(c2, r2) } else { image.add_edge(r2, c2) }
                }
            }
        }
        let (rho2, kappa2) = (conjugate(&sigma, &rho), conjugate(&tau, &kappa));
        let moved = if swap { side_delta(5, &kappa2, &rho2) } else { side_delta(5, &rho2, &kappa2) };
        let (k1, a1) = canonical_pair(&g, &delta);
        let (k2, a2) = canonical_pair(&image, &moved);
        prop_assert_eq!(&k1, &k2);
        prop_assert_eq!(a1, a2);
        prop_assert_eq!(PairKey::from_hex(5, &k1.to_hex()).unwrap(), k1);
    }
}
