//! Invariant suites at small order.
//!
//! Each suite returns named checks instead of panicking so that callers can
//! report every outcome.

use std::collections::BTreeSet;

use num_bigint::BigUint;

use crate::admissible::{involution_representative, prime_order_types};
use crate::assembly::{census_orders, census_quasigroups_and_loops, small_order_ord2, solve_n1, Check};
use crate::census::{census, census_reduced, Census};
use crate::error::Result;
use crate::factorial;
use crate::group::{autoparatopy_group, gamma_order};
use crate::iso::{canonical_form, Mode};
use crate::onefact::{backward_check, final_lf, forward_accumulate, split_check, with_symbols_fixed, AVec, AdditionOrder, Delta};
use crate::seeds::{admissible_classes, conjugate_subgroups, run_class};

/// Main classes of order 1 to 7.
pub const MAIN_CLASSES: [usize; 7] = [1, 1, 1, 2, 2, 12, 147];

/// Latin squares of order 1 to 6.
pub const SQUARES: [u64; 6] = [1, 2, 12, 576, 161280, 812851200];

const CAP: usize = 1 << 22;

fn check(name: String, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

/// Class count, square count against reduced enumeration and the
/// orbit-stabilizer sum.
pub fn census_suite(c: &Census) -> Result<Vec<Check>> {
    let n = c.n;
    let mut out = Vec::new();
    if let Some(&want) = MAIN_CLASSES.get(n - 1) {
        out.push(check(format!("n={n}: main classes"), c.classes.len() == want, format!("{} (want {want})", c.classes.len())));
    }
    if n <= 6 {
        let oracle = census_reduced(n)?.total_squares;
        out.push(check(
            format!("n={n}: squares against reduced enumeration"),
            c.total_squares == oracle && c.total_squares == BigUint::from(SQUARES[n - 1]),
            c.total_squares.to_string(),
        ));
    }
    let gamma = gamma_order(n);
    let sum: BigUint = c.classes.iter().map(|k| &gamma / BigUint::from(k.par_order)).sum();
    out.push(check(format!("n={n}: orbit-stabilizer sum"), sum == c.total_squares, sum.to_string()));
    Ok(out)
}

/// Forward accumulation in both orders, backward and split checks, degree
/// audit, and the unlabeled count against the census.
pub fn onefact_suite(n: usize, total_squares: &BigUint) -> Result<Vec<Check>> {
    let mut cases = vec![("trivial".to_string(), Delta::identity(n), AVec { a1: n, a2: 0 })];
    for (i, t) in prime_order_types(n).into_iter().filter(|t| t.p == 2).enumerate() {
        let (d, a) = Delta::from_paratopism(&with_symbols_fixed(&involution_representative(&t, n)))?;
        cases.push((format!("involution type {}", i + 1), d, a));
    }
    let mut out = Vec::new();
    for (label, d, a) in cases {
        let inc = forward_accumulate(&d, a, AdditionOrder::Inc, |_| Ok(()))?;
        let dec = forward_accumulate(&d, a, AdditionOrder::Dec, |_| Ok(()))?;
        let (li, ld) = (final_lf(&inc)?, final_lf(&dec)?);
        out.push(check(format!("n={n} {label}: INC = DEC"), li == ld, format!("{li} / {ld}")));
        let backward = inc.windows(2).chain(dec.windows(2)).all(|w| backward_check(&w[0], &w[1]));
        out.push(check(format!("n={n} {label}: backward recursion"), backward, String::new()));
        let degrees = inc
            .iter()
            .chain(&dec)
            .all(|s| s.records.values().all(|r| r.key.graph.regular_degree() == Some(s.a.degree())));
        out.push(check(format!("n={n} {label}: stored graphs are regular"), degrees, String::new()));
        let split = split_check(&inc, &dec, &d);
        out.push(check(
            format!("n={n} {label}: split identity"),
            matches!(split, Ok(k) if k >= 2),
            match split {
                Ok(k) => format!("{k} decompositions"),
                Err(e) => e.to_string(),
            },
        ));
        if label == "trivial" {
            let want = total_squares / factorial(n);
            out.push(check(format!("n={n}: LF(K_n,n) = |L|/n!"), li == want, li.to_string()));
        }
    }
    Ok(out)
}

/// Double count for every admissible class, and the accepted squares
/// against census classes whose group contains a conjugate of the class.
pub fn seed_suite(c: &Census) -> Result<Vec<Check>> {
    let n = c.n;
    let mut out = Vec::new();
    let pars: Vec<_> = c
        .classes
        .iter()
        .map(|k| autoparatopy_group(&k.representative).closure(n, CAP))
        .collect::<Result<_>>()?;
    for class in admissible_classes(n) {
        let run = run_class(&class.group, &class.spec, CAP)?;
        out.push(check(
            format!("n={n} {}: double count", class.label),
            run.double_count.agrees(),
            format!("{} = {}", run.double_count.lhs, run.double_count.rhs),
        ));
        let accepted: Vec<Vec<u64>> = run.accepted().map(|l| canonical_form(l, Mode::Paratopy).certificate).collect();
        let distinct: BTreeSet<Vec<u64>> = accepted.iter().cloned().collect();
        let mut expected = BTreeSet::new();
        for (k, par) in c.classes.iter().zip(&pars) {
            if !conjugate_subgroups(par, &class.group)?.is_empty() {
                expected.insert(k.certificate.clone());
            }
        }
        out.push(check(
            format!("n={n} {}: constructed classes match the census", class.label),
            distinct.len() == accepted.len() && distinct == expected,
            format!("{} accepted, {} expected", accepted.len(), expected.len()),
        ));
    }
    Ok(out)
}

/// Class equation per involution class, `N_1` from the total, and for
/// `n ≤ 5` the quasigroup and loop formulas against bucketing.
pub fn ledger_suite(c: &Census) -> Result<Vec<Check>> {
    let n = c.n;
    let mut out = Vec::new();
    for row in small_order_ord2(c)? {
        out.push(check(
            format!("n={n} {}: class equation", row.key),
            row.agrees(),
            format!("N = {} (census {})", row.n_pi, row.n_pi_census),
        ));
    }
    let mut n_i = census_orders(c);
    let n1 = n_i.remove(&1).unwrap_or_default();
    let t = solve_n1(&c.total_squares, &n_i, &gamma_order(n))?;
    out.push(check(format!("n={n}: N_1 from the total"), t.n1 == n1, t.n1.to_string()));
    if n <= 5 {
        let (q, l) = census_quasigroups_and_loops(c)?;
        let (bq, bl) = bucket_quasigroups_and_loops(n);
        out.push(check(format!("n={n}: quasigroups"), q == BigUint::from(bq), format!("{q} (bucketing {bq})")));
        out.push(check(format!("n={n}: loops"), l == BigUint::from(bl), format!("{l} (bucketing {bl})")));
    }
    Ok(out)
}

/// Quasigroups and loops of order `n` by bucketing every square under
/// simultaneous relabeling of rows, columns and symbols.
pub fn bucket_quasigroups_and_loops(n: usize) -> (usize, usize) {
    let perms = crate::group::permutations(n);
    let mut quasigroups = BTreeSet::new();
    let mut loops = BTreeSet::new();
    for l in crate::census::all_squares(n) {
        let min = perms
            .iter()
            .map(|s| {
                let mut cells = vec![0u8; n * n];
                for r in 0..n {
                    for c in 0..n {
                        cells[s[r] as usize * n + s[c] as usize] = s[l.at(r, c) as usize];
                    }
                }
                cells
            })
            .min()
            .unwrap();
        let is_loop = (0..n).any(|e| (0..n).all(|x| l.at(e, x) as usize == x && l.at(x, e) as usize == x));
        if is_loop {
            loops.insert(min.clone());
        }
        quasigroups.insert(min);
    }
    (quasigroups.len(), loops.len())
}

/// Every suite at order `n ≤ 6`.
pub fn full_suite(n: usize) -> Result<Vec<Check>> {
    let c = census(n)?;
    let mut out = census_suite(&c)?;
    out.extend(onefact_suite(n, &c.total_squares)?);
    out.extend(seed_suite(&c)?);
    out.extend(ledger_suite(&c)?);
    Ok(out)
}
