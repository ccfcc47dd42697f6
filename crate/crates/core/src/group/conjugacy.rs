//! Conjugacy between tuples of paratopisms.
//!
//! An element `γ` with `γ a_i γ⁻¹ = b_i` for every `i` is exactly a
//! bijection of the points with `γ(a_i(x)) = b_i(γ(x))` that moves classes
//! by some class permutation `σ`. For a fixed `σ` such a map pairs each
//! orbit of `⟨a⟩` with an orbit of `⟨b⟩` carrying an isomorphic action, and
//! inside a pair it is determined by the image of one base point. So the
//! set of conjugators is a disjoint union over `σ` of products of
//! "orbit matchings" and "base point choices", which gives both the count
//! and a generating set of centralizers.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{gamma_order, ParaGroup, Paratopism};

fn orbits(gens: &[Paratopism], m: usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; m];
    let mut out = Vec::new();
    for s in 0..m {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut orbit = vec![s];
        let mut i = 0;
        while i < orbit.len() {
            let p = orbit[i];
            for g in gens {
                let q = g.image(p);
                if !seen[q] {
                    seen[q] = true;
                    orbit.push(q);
                }
            }
            i += 1;
        }
        out.push(orbit);
    }
    out
}

/// The equivariant map on the `⟨a⟩`-orbit `orbit` sending `orbit[0]` to `y`,
/// if one exists and is injective.
fn orbit_map(a: &[Paratopism], b: &[Paratopism], orbit: &[usize], target_len: usize, y: usize, m: usize) -> Option<Vec<(usize, usize)>> {
    if orbit.len() != target_len {
        return None;
    }
    let mut map = vec![usize::MAX; m];
    map[orbit[0]] = y;
    let mut pairs = vec![(orbit[0], y)];
    let mut i = 0;
    while i < pairs.len() {
        let (p, q) = pairs[i];
        for (g, h) in a.iter().zip(b) {
            let gp = g.image(p);
            let hq = h.image(q);
            if map[gp] == usize::MAX {
                map[gp] = hq;
                pairs.push((gp, hq));
            } else if map[gp] != hq {
                return None;
            }
        }
        i += 1;
    }
    Some(pairs)
}

struct Matching {
    /// Class permutation as `σ[x] = image class`.
    sigma: [usize; 3],
    /// One conjugator for this `σ`.
    witness: Vec<u16>,
    count: BigUint,
    /// For each isomorphism type: the matched `(a-orbit, b-orbit)` pairs and
    /// the number of valid base point images per pair.
    types: Vec<(Vec<(usize, usize)>, usize)>,
}

struct Analysis {
    a_orbits: Vec<Vec<usize>>,
    matchings: Vec<Matching>,
}

const SIGMAS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn analyze(a: &[Paratopism], b: &[Paratopism], n: usize) -> Analysis {
    assert_eq!(a.len(), b.len());
    let m = 3 * n;
    let a_orbits = orbits(a, m);
    let b_orbits = orbits(b, m);
    let class_maps = |gs: &[Paratopism]| -> Vec<[usize; 3]> {
        gs.iter().map(|g| g.class_perm().map(|c| c.index())).collect()
    };
    let rho_a = class_maps(a);
    let rho_b = class_maps(b);
    let mut matchings = Vec::new();
    'sigma: for sigma in SIGMAS {
        let compatible = rho_a
            .iter()
            .zip(&rho_b)
            .all(|(ra, rb)| (0..3).all(|x| sigma[ra[x]] == rb[sigma[x]]));
        if !compatible {
            continue;
        }
        // For every a-orbit, the b-orbits it is isomorphic to and the number
        // of base point images into each.
        let mut profile: Vec<(Vec<usize>, usize)> = Vec::with_capacity(a_orbits.len());
        for o in &a_orbits {
            let x = o[0];
            let target_class = sigma[x / n];
            let mut isos = Vec::new();
            let mut r = 0;
            for (k, ob) in b_orbits.iter().enumerate() {
                if ob.len() != o.len() {
                    continue;
                }
                let count = ob
                    .iter()
                    .filter(|&&y| y / n == target_class && orbit_map(a, b, o, ob.len(), y, m).is_some())
                    .count();
                if count > 0 {
                    isos.push(k);
                    r = count;
                }
            }
            if isos.is_empty() {
                continue 'sigma;
            }
            profile.push((isos, r));
        }
        let mut groups: BTreeMap<Vec<usize>, (Vec<usize>, usize)> = BTreeMap::new();
        for (i, (isos, r)) in profile.iter().enumerate() {
            groups.entry(isos.clone()).or_insert_with(|| (Vec::new(), *r)).0.push(i);
        }
        let mut count = BigUint::one();
        let mut witness = vec![0u16; m];
        let mut types = Vec::new();
        for (isos, (members, r)) in &groups {
            if isos.len() != members.len() {
                continue 'sigma;
            }
            let k = members.len();
            count *= crate::factorial(k) * BigUint::from(*r).pow(k as u32);
            let mut pairs = Vec::new();
            for (&ai, &bi) in members.iter().zip(isos) {
                let o = &a_orbits[ai];
                let ob = &b_orbits[bi];
                let target_class = sigma[o[0] / n];
                let map = ob
                    .iter()
                    .filter(|&&y| y / n == target_class)
                    .find_map(|&y| orbit_map(a, b, o, ob.len(), y, m))
                    .expect("orbit pair was checked to be isomorphic");
                for (p, q) in map {
                    witness[p] = q as u16;
                }
                pairs.push((ai, bi));
            }
            types.push((pairs, *r));
        }
        matchings.push(Matching { sigma, witness, count, types });
    }
    Analysis { a_orbits, matchings }
}

/// Number of `γ` with `γ a_i γ⁻¹ = b_i` for all `i`.
pub fn conjugator_count(a: &[Paratopism], b: &[Paratopism]) -> BigUint {
    let n = a.first().or(b.first()).map_or(0, |g| g.order_n());
    if a.is_empty() {
        return gamma_order(n);
    }
    analyze(a, b, n).matchings.iter().map(|mt| mt.count.clone()).sum()
}

/// Some `γ` with `γ a_i γ⁻¹ = b_i` for all `i`.
pub fn conjugating_tuple(a: &[Paratopism], b: &[Paratopism]) -> Option<Paratopism> {
    let n = a.first()?.order_n();
    let an = analyze(a, b, n);
    let mt = an.matchings.first()?;
    let g = Paratopism::from_point_map(n, mt.witness.clone()).expect("witness is a paratopism");
    debug_assert!(a.iter().zip(b).all(|(x, y)| &g.conjugate(x) == y));
    Some(g)
}

/// Order of the centralizer of `g`.
pub fn centralizer_order(g: &Paratopism) -> BigUint {
    conjugator_count(std::slice::from_ref(g), std::slice::from_ref(g))
}

/// Generators of the centralizer of the tuple `gs` (of the single element
/// when `gs` has length one).
pub fn centralizer_generators(gs: &[Paratopism]) -> Vec<Paratopism> {
    let n = gs[0].order_n();
    let m = 3 * n;
    let an = analyze(gs, gs, n);
    let mut out = Vec::new();
    let extend_identity = |pairs: &[(usize, usize)]| -> Paratopism {
        let mut img: Vec<u16> = (0..m as u16).collect();
        for &(p, q) in pairs {
            img[p] = q as u16;
        }
        Paratopism::from_point_map(n, img).expect("orbit automorphisms respect classes")
    };
    for mt in &an.matchings {
        if mt.sigma == [0, 1, 2] {
            for (pairs, _) in &mt.types {
                let members: Vec<usize> = pairs.iter().map(|&(ai, _)| ai).collect();
                let first = &an.a_orbits[members[0]];
                // automorphisms of one orbit of the type
                for &y in first {
                    if y / n != first[0] / n || y == first[0] {
                        continue;
                    }
                    if let Some(map) = orbit_map(gs, gs, first, first.len(), y, m) {
                        out.push(extend_identity(&map));
                    }
                }
                // exchanges of consecutive orbits of the type
                for w in members.windows(2) {
                    let (o1, o2) = (&an.a_orbits[w[0]], &an.a_orbits[w[1]]);
                    let map = o2
                        .iter()
                        .filter(|&&y| y / n == o1[0] / n)
                        .find_map(|&y| orbit_map(gs, gs, o1, o2.len(), y, m))
                        .expect("orbits of one type are isomorphic");
                    let mut pairs = map.clone();
                    pairs.extend(map.iter().map(|&(p, q)| (q, p)));
                    out.push(extend_identity(&pairs));
                }
            }
        } else {
            out.push(Paratopism::from_point_map(n, mt.witness.clone()).expect("witness is a paratopism"));
        }
    }
    out.retain(|g| !g.is_identity());
    out
}

/// Order of the normalizer of `group` in the paratopy group.
pub fn normalizer_order(group: &ParaGroup) -> BigUint {
    let gens = group.small_generating_set();
    if gens.is_empty() {
        return gamma_order(group.n());
    }
    let orders: Vec<usize> = gens.iter().map(|g| g.element_order()).collect();
    let candidates: Vec<Vec<&Paratopism>> = orders
        .iter()
        .map(|&o| group.elements().iter().filter(|h| h.element_order() == o).collect())
        .collect();
    let mut total = BigUint::zero();
    let mut idx = vec![0usize; gens.len()];
    loop {
        let tuple: Vec<Paratopism> = idx.iter().enumerate().map(|(i, &k)| candidates[i][k].clone()).collect();
        total += conjugator_count(&gens, &tuple);
        let mut i = 0;
        loop {
            if i == idx.len() {
                return total;
            }
            idx[i] += 1;
            if idx[i] < candidates[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Some `γ` with `γ A γ⁻¹ = B`, or `None` if the subgroups are not conjugate.
pub fn conjugating_element(a: &ParaGroup, b: &ParaGroup) -> Option<Paratopism> {
    if a.order() != b.order() {
        return None;
    }
    let gens = a.small_generating_set();
    if gens.is_empty() {
        return Some(Paratopism::identity(a.n()));
    }
    let candidates: Vec<Vec<&Paratopism>> = gens
        .iter()
        .map(|g| {
            let key = g.conjugacy_key();
            b.elements().iter().filter(|h| h.conjugacy_key() == key).collect()
        })
        .collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return None;
    }
    let mut idx = vec![0usize; gens.len()];
    loop {
        let tuple: Vec<Paratopism> = idx.iter().enumerate().map(|(i, &k)| candidates[i][k].clone()).collect();
        if let Some(g) = conjugating_tuple(&gens, &tuple) {
            return Some(g);
        }
        let mut i = 0;
        loop {
            if i == idx.len() {
                return None;
            }
            idx[i] += 1;
            if idx[i] < candidates[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::all_paratopisms;
    use super::*;
    use crate::square::PointClass;

    fn involution_f3(n: usize, f: usize) -> Paratopism {
        let inner: Vec<u8> = (0..n)
            .map(|i| if i < f { i } else if (i - f).is_multiple_of(2) { i + 1 } else { i - 1 } as u8)
            .collect();
        Paratopism::from_parts(PointClass::ALL, [inner.clone(), inner.clone(), inner]).unwrap()
    }

    #[test]
    fn identity_centralizer_is_everything() {
        let id = Paratopism::identity(4);
        assert_eq!(centralizer_order(&id), gamma_order(4));
    }

    #[test]
    fn centralizer_matches_brute_force_n3() {
        let all = all_paratopisms(3);
        for g in all.iter().step_by(53) {
            let brute = all.iter().filter(|h| h.compose(g) == g.compose(h)).count();
            assert_eq!(centralizer_order(g), BigUint::from(brute), "{g:?}");
            let gens = centralizer_generators(std::slice::from_ref(g));
            let c = ParaGroup::closure(3, &gens, 2000).unwrap();
            assert_eq!(c.order(), brute);
        }
    }

    #[test]
    fn closed_form_involution_centralizers() {
        // fixed class pattern 1 + 5 transpositions per class
        let g = involution_f3(11, 1);
        assert_eq!(centralizer_order(&g), BigUint::from(339_738_624_000u64));
        let id: Vec<u8> = (0..11).collect();
        let swap = Paratopism::from_parts([PointClass::Col, PointClass::Row, PointClass::Sym], [id.clone(), id.clone(), id]).unwrap();
        assert_eq!(centralizer_order(&swap), BigUint::from(3_186_701_844_480_000u64));
    }

    #[test]
    fn conjugacy_of_equal_signature_involutions() {
        let a = involution_f3(5, 1);
        let b = Paratopism::from_cycles(5, "(1,3)(2,5)(6,7)(8,9)(12,13)(14,15)").unwrap();
        assert_eq!(a.cycle_signature(), b.cycle_signature());
        let g = conjugating_tuple(std::slice::from_ref(&a), std::slice::from_ref(&b)).unwrap();
        assert_eq!(g.conjugate(&a), b);
    }

    #[test]
    fn normalizer_times_class_size_is_gamma() {
        let all = all_paratopisms(3);
        let g = involution_f3(3, 1);
        let pi = ParaGroup::closure(3, std::slice::from_ref(&g), 10).unwrap();
        let mut conjugates: Vec<Vec<Paratopism>> = all.iter().map(|h| pi.conjugate_by(h).elements().to_vec()).collect();
        conjugates.sort();
        conjugates.dedup();
        assert_eq!(normalizer_order(&pi) * BigUint::from(conjugates.len()), gamma_order(3));
    }

    #[test]
    fn normalizer_of_klein_group_n4() {
        let all = all_paratopisms(4);
        let a = Paratopism::from_cycles(4, "(1,2)(3,4)(5,6)(7,8)").unwrap();
        let b = Paratopism::from_cycles(4, "(1,3)(2,4)(9,10)(11,12)").unwrap();
        let v = ParaGroup::closure(4, &[a, b], 10).unwrap();
        assert_eq!(v.order(), 4);
        let brute = all.iter().filter(|h| v.conjugate_by(h) == v).count();
        assert_eq!(normalizer_order(&v), BigUint::from(brute));
    }

    #[test]
    fn non_conjugate_groups() {
        let a = ParaGroup::closure(3, &[involution_f3(3, 1)], 10).unwrap();
        let b = ParaGroup::closure(3, &[Paratopism::from_cycles(3, "(1,2)").unwrap()], 10).unwrap();
        assert!(conjugating_element(&a, &b).is_none());
        assert!(conjugating_element(&a, &a).is_some());
    }
}
