//! Main classes of Latin squares of small order.
//!
//! Two enumerations are provided. [`census_reduced`] canonizes every reduced
//! square (first row and column in natural order); it is simple and serves
//! as the oracle up to order 6. [`census`] enumerates far fewer squares: the
//! first row is the identity, the second row is a fixed representative of
//! each derangement cycle type, and the remaining rows are ordered by their
//! first entry. A completed square is kept only if its first two rows have
//! the largest cycle type among all pairs of rows, columns or symbols, so
//! every main class is reached while most squares are skipped before
//! canonization. The completion counts also give the number of squares.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::cover::{Control, CoverInstance, Limits};
use crate::error::{Error, Result};
use crate::group::{autotopy_group, ParaGroup};
use crate::iso::{canonical_form, Completion, Mode};
use crate::square::{LatinSquare, Triple};
use crate::factorial;

/// One main class found by a census.
#[derive(Clone, Debug, Serialize)]
pub struct ClassRecord {
    pub representative: LatinSquare,
    #[serde(skip)]
    pub certificate: Vec<u64>,
    /// Order of the autoparatopy group.
    pub par_order: u64,
    /// Order of the autotopy group.
    pub is_order: u64,
}

/// Result of a census of order `n`.
#[derive(Clone, Debug, Serialize)]
pub struct Census {
    pub n: usize,
    /// Classes sorted by certificate.
    pub classes: Vec<ClassRecord>,
    /// Number of distinct Latin squares of order `n`.
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub total_squares: BigUint,
}

fn record(l: &LatinSquare) -> ClassRecord {
    let form = canonical_form(l, Mode::Paratopy);
    let is = autotopy_group(l);
    ClassRecord {
        representative: l.clone(),
        certificate: form.certificate,
        par_order: to_u64(&form.group_order),
        is_order: to_u64(&is.order),
    }
}

fn to_u64(x: &BigUint) -> u64 {
    u64::try_from(x).expect("stabilizer order fits in u64")
}

/// Partitions of `n` into parts of size at least 2, parts descending.
pub fn derangement_types(n: usize) -> Vec<Vec<usize>> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (2..=max.min(rest)).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Number of permutations of `0..n` with cycle type `parts`.
pub fn permutations_of_type(n: usize, parts: &[usize]) -> BigUint {
    let mut denom = BigUint::from(1u32);
    let mut mult: BTreeMap<usize, usize> = BTreeMap::new();
    for &p in parts {
        denom *= BigUint::from(p);
        *mult.entry(p).or_insert(0) += 1;
    }
    for &m in mult.values() {
        denom *= factorial(m);
    }
    factorial(n) / denom
}

/// The permutation whose cycles are consecutive blocks of the given lengths.
fn block_permutation(parts: &[usize]) -> Vec<u8> {
    let n: usize = parts.iter().sum();
    let mut pi = vec![0u8; n];
    let mut start = 0;
    for &p in parts {
        for k in 0..p {
            pi[start + k] = (start + (k + 1) % p) as u8;
        }
        start += p;
    }
    pi
}

/// Visits every completion of the square whose first row is the identity,
/// second row is `second`, and whose column 0 reads the remaining symbols in
/// increasing order. Returns the number of completions.
fn normalized_completions<F>(second: &[u8], visit: F) -> u64
where
    F: FnMut(&LatinSquare) -> Control,
{
    let n = second.len();
    let mut fixed: Vec<Triple> = Vec::new();
    for c in 0..n as u8 {
        fixed.push(Triple::new(0, c, c));
        fixed.push(Triple::new(1, c, second[c as usize]));
    }
    let rest: Vec<u8> = (0..n as u8).filter(|&s| s != 0 && s != second[0]).collect();
    for (k, &s) in rest.iter().enumerate() {
        fixed.push(Triple::new(2 + k as u8, 0, s));
    }
    let inst = CoverInstance::build(&ParaGroup::trivial(n), &fixed).expect("normalized rows are pair-disjoint");
    inst.solve(Limits::default(), visit).count
}

/// True iff rows 0 and 1 have a cycle type at least as large as every other
/// pair of points of one class.
fn first_pair_is_maximal(l: &LatinSquare, lambda: &[u8]) -> bool {
    let n = l.order();
    let comp = Completion::new(l);
    for x in 0..3 {
        for a in 0..n {
            for b in a + 1..n {
                if comp.pair_cycle_type(x, a, b).as_slice() > lambda {
                    return false;
                }
            }
        }
    }
    true
}

/// Main classes of order `n ≤ 7` with stabilizer orders, plus the number of
/// Latin squares.
pub fn census(n: usize) -> Result<Census> {
    if n == 0 || n > 7 {
        return Err(Error::Unsupported(format!("census is limited to orders 1..=7, got {n}")));
    }
    if n <= 2 {
        return census_reduced(n);
    }
    let types = derangement_types(n);
    let per_type: Vec<(BigUint, BTreeMap<Vec<u64>, LatinSquare>)> = types
        .par_iter()
        .map(|parts| {
            let pi = block_permutation(parts);
            let lambda: Vec<u8> = parts.iter().map(|&p| p as u8).collect();
            let mut found: BTreeMap<Vec<u64>, LatinSquare> = BTreeMap::new();
            let count = normalized_completions(&pi, |l| {
                if first_pair_is_maximal(l, &lambda) {
                    let cert = canonical_form(l, Mode::Paratopy).certificate;
                    found.entry(cert).or_insert_with(|| l.clone());
                }
                Control::Continue
            });
            (permutations_of_type(n, parts) * BigUint::from(count), found)
        })
        .collect();
    let mut weighted = BigUint::from(0u32);
    let mut reps: BTreeMap<Vec<u64>, LatinSquare> = BTreeMap::new();
    for (w, found) in per_type {
        weighted += w;
        for (cert, l) in found {
            reps.entry(cert).or_insert(l);
        }
    }
    let total_squares = factorial(n) * factorial(n - 2) * weighted;
    Ok(Census { n, classes: finish(reps), total_squares })
}

fn finish(reps: BTreeMap<Vec<u64>, LatinSquare>) -> Vec<ClassRecord> {
    let list: Vec<LatinSquare> = reps.into_values().collect();
    let mut classes: Vec<ClassRecord> = list.par_iter().map(record).collect();
    classes.sort_by(|a, b| a.certificate.cmp(&b.certificate));
    classes
}

/// Visits every reduced square of order `n` and returns how many there are.
pub fn reduced_squares<F>(n: usize, visit: F) -> u64
where
    F: FnMut(&LatinSquare) -> Control,
{
    let mut fixed = Vec::new();
    for c in 0..n as u8 {
        fixed.push(Triple::new(0, c, c));
    }
    for r in 1..n as u8 {
        fixed.push(Triple::new(r, 0, r));
    }
    let inst = CoverInstance::build(&ParaGroup::trivial(n), &fixed).expect("reduced border is pair-disjoint");
    inst.solve(Limits::default(), visit).count
}

/// Census by canonizing every reduced square; practical up to order 6.
pub fn census_reduced(n: usize) -> Result<Census> {
    if n == 0 || n > 7 {
        return Err(Error::Unsupported(format!("census is limited to orders 1..=7, got {n}")));
    }
    let mut reps: BTreeMap<Vec<u64>, LatinSquare> = BTreeMap::new();
    let reduced = reduced_squares(n, |l| {
        let cert = canonical_form(l, Mode::Paratopy).certificate;
        reps.entry(cert).or_insert_with(|| l.clone());
        Control::Continue
    });
    let total_squares = factorial(n) * factorial(n - 1) * BigUint::from(reduced);
    Ok(Census { n, classes: finish(reps), total_squares })
}

/// Every Latin square of order `n`; only sensible for `n ≤ 5`.
pub fn all_squares(n: usize) -> Vec<LatinSquare> {
    let inst = CoverInstance::build(&ParaGroup::trivial(n), &[]).expect("empty fixed set");
    let mut out = Vec::new();
    inst.solve(Limits::default(), |l| {
        out.push(l.clone());
        Control::Continue
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::gamma_order;

    #[test]
    fn derangement_type_counts() {
        let total: BigUint = derangement_types(7).iter().map(|t| permutations_of_type(7, t)).sum();
        assert_eq!(total, BigUint::from(1854u32));
        assert_eq!(derangement_types(5), vec![vec![5], vec![3, 2]]);
    }

    #[test]
    fn block_permutation_has_requested_type() {
        assert_eq!(block_permutation(&[3, 2]), vec![1, 2, 0, 4, 3]);
    }

    #[test]
    fn order_three() {
        let c = census(3).unwrap();
        assert_eq!(c.classes.len(), 1);
        assert_eq!(c.classes[0].par_order, 108);
        assert_eq!(c.total_squares, BigUint::from(12u32));
    }

    #[test]
    fn small_orders_agree_with_reduced_enumeration() {
        for n in 1..=5 {
            let a = census(n).unwrap();
            let b = census_reduced(n).unwrap();
            assert_eq!(a.total_squares, b.total_squares, "n={n}");
            let ca: Vec<_> = a.classes.iter().map(|c| &c.certificate).collect();
            let cb: Vec<_> = b.classes.iter().map(|c| &c.certificate).collect();
            assert_eq!(ca, cb, "n={n}");
        }
    }

    #[test]
    fn orbit_stabilizer_sum() {
        for n in 1..=5 {
            let c = census(n).unwrap();
            let g = gamma_order(n);
            let sum: BigUint = c.classes.iter().map(|k| &g / BigUint::from(k.par_order)).sum();
            assert_eq!(sum, c.total_squares, "n={n}");
        }
    }

    #[test]
    fn rejects_large_orders() {
        assert!(census(8).is_err());
        assert!(census(0).is_err());
    }
}
