//! The counting ledger.
//!
//! Squares of order `n` fall into main classes, the orbits of `Γ`. A class
//! whose autoparatopy group has order `i` holds `|Γ|/i` squares, so with
//! `N_i` classes of each order `|L| = |Γ| Σ_i N_i / i`. For a subgroup `Π`
//! the squares stabilized by some conjugate of `Π` split into those whose
//! full group is conjugate to `Π` and the rest `C_[Π]`:
//! `|L_[Π]| = |Γ| N_[Π] / |Π| + |C_[Π]|`. Knowing `|L_[Π]|` from
//! one-factorization counts and `|C_[Π]|` from squares with larger groups
//! gives `N_[Π]`, and the total count then gives `N_1`.

use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::admissible::{involution_representative, prime_order_types};
use crate::census::Census;
use crate::error::{Error, Result};
use crate::factorial;
use crate::group::{autoparatopy_group, centralizer_order, autotopy_group, gamma_order, ConjugacyKey, Paratopism};
use crate::onefact::{label_factor, lf_with_symmetry, with_symbols_fixed, AVec, AdditionOrder};
use crate::square::LatinSquare;

fn exact_div(a: &BigUint, b: &BigUint, what: &str) -> Result<BigUint> {
    let (q, r) = a.div_rem(b);
    if !r.is_zero() {
        return Err(Error::NonIntegral(format!("{what}: {a} / {b}")));
    }
    Ok(q)
}

/// `N_[Π] = (|L_[Π]| - |C_[Π]|) |Π| / |Γ|`.
pub fn solve_npi(l_pi: &BigUint, c_pi: &BigUint, gamma: &BigUint, pi_order: u64) -> Result<BigUint> {
    if c_pi > l_pi {
        return Err(Error::Inconsistent(format!("C = {c_pi} exceeds L = {l_pi}")));
    }
    exact_div(&((l_pi - c_pi) * BigUint::from(pi_order)), gamma, "N for a class")
}

/// `|L_[Π]| = (|Γ| / |Γ_Π|) a1! a2! 2^a2 LF`.
pub fn l_pi_class_size(n: usize, normalizer: &BigUint, a: AVec, lf: &BigUint) -> Result<BigUint> {
    Ok(exact_div(&gamma_order(n), normalizer, "conjugates of a subgroup")? * label_factor(a) * lf)
}

/// Solution for `N_1` given the other `N_i`.
#[derive(Clone, Debug, Serialize)]
pub struct MainClassTotal {
    /// `|Γ| Σ_{i≥2} N_i / i`.
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub symmetric_squares: BigUint,
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub n1: BigUint,
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub total: BigUint,
}

/// Solves `|L| = |Γ| Σ_i N_i / i` for `N_1`. Keys of `n_i` below 2 are
/// ignored.
pub fn solve_n1(total_squares: &BigUint, n_i: &BTreeMap<u64, BigUint>, gamma: &BigUint) -> Result<MainClassTotal> {
    let mut symmetric = BigUint::zero();
    let mut rest = BigUint::zero();
    for (&i, count) in n_i.range(2..) {
        symmetric += exact_div(&(gamma * count), &BigUint::from(i), "squares in classes of one order")?;
        rest += count;
    }
    if &symmetric > total_squares {
        return Err(Error::Inconsistent("more symmetric squares than squares".into()));
    }
    let n1 = exact_div(&(total_squares - &symmetric), gamma, "N_1")?;
    let total = &n1 + rest;
    Ok(MainClassTotal { symmetric_squares: symmetric, n1, total })
}

/// Number of one-factorization classes a main class splits into.
pub fn ty(par: u64, is: u64) -> Result<u64> {
    if is == 0 || !par.is_multiple_of(is) {
        return Err(Error::Inconsistent(format!("|Is| = {is} does not divide |Par| = {par}")));
    }
    match par / is {
        1 => Ok(3),
        2 => Ok(2),
        3 | 6 => Ok(1),
        k => Err(Error::Inconsistent(format!("|Par|/|Is| = {k}"))),
    }
}

/// Σ Ty over `(|Par|, |Is|, classes)` rows.
pub fn onefact_classes(rows: &[(u64, u64, BigUint)]) -> Result<BigUint> {
    let mut sum = BigUint::zero();
    for (par, is, count) in rows {
        sum += count * ty(*par, *is)?;
    }
    Ok(sum)
}

/// Σ `6 |Is| / |Par|` over `(|Par|, |Is|, classes)` rows.
pub fn isotopy_classes(rows: &[(u64, u64, BigUint)]) -> Result<BigUint> {
    let mut sum = BigUint::zero();
    for (par, is, count) in rows {
        ty(*par, *is)?;
        sum += count * (6 * is / par);
    }
    Ok(sum)
}

fn cycle_structure(perm: &[u8]) -> BTreeMap<usize, usize> {
    let mut seen = vec![false; perm.len()];
    let mut out = BTreeMap::new();
    for s in 0..perm.len() {
        let mut len = 0;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = perm[i] as usize;
            len += 1;
        }
        if len > 0 {
            *out.entry(len).or_insert(0) += 1;
        }
    }
    out
}

/// Common cycle structure of an autotopism on all three classes, if it is
/// not the identity and the structures agree.
fn shared_structure(alpha: &Paratopism) -> Option<BTreeMap<usize, usize>> {
    if !alpha.is_isotopism() || alpha.is_identity() {
        return None;
    }
    let [r, c, s] = crate::square::PointClass::ALL.map(|x| cycle_structure(&alpha.inner(x)));
    (r == c && c == s).then_some(r)
}

/// `Π a_i! i^a_i` for an autotopism with one cycle structure on every
/// class, otherwise 0.
pub fn f_alpha(alpha: &Paratopism) -> BigUint {
    match shared_structure(alpha) {
        None => BigUint::zero(),
        Some(cs) => cs.iter().map(|(&i, &a)| factorial(a) * BigUint::from(i).pow(a as u32)).product(),
    }
}

/// Number of fixed points per class for an autotopism with one cycle
/// structure on every class, otherwise 0.
pub fn g_alpha(alpha: &Paratopism) -> u64 {
    shared_structure(alpha).map(|cs| cs.get(&1).copied().unwrap_or(0) as u64).unwrap_or(0)
}

/// What the quasigroup and loop formulas need from one main class.
#[derive(Clone, Debug, Serialize)]
pub struct ClassProfile {
    pub par_order: u64,
    pub is_order: u64,
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub sum_f_squared: BigUint,
    pub sum_g_squared: u64,
}

impl ClassProfile {
    pub fn of(l: &LatinSquare) -> Result<ClassProfile> {
        let n = l.order();
        let par = autoparatopy_group(l).order_u64();
        let is = autotopy_group(l);
        let group = is.closure(n, 1 << 22)?;
        let mut sf = BigUint::zero();
        let mut sg = 0u64;
        for a in group.elements() {
            let f = f_alpha(a);
            sf += &f * &f;
            let g = g_alpha(a);
            sg += g * g;
        }
        Ok(ClassProfile { par_order: par, is_order: is.order_u64(), sum_f_squared: sf, sum_g_squared: sg })
    }
}

fn to_integer(x: BigRational, what: &str) -> Result<BigUint> {
    if !x.is_integer() {
        return Err(Error::NonIntegral(format!("{what} = {x}")));
    }
    x.to_integer().to_biguint().ok_or_else(|| Error::Inconsistent(format!("{what} is negative")))
}

fn ratio(a: BigUint, b: BigUint) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

/// Isomorphism classes of quasigroups of order `n`.
pub fn quasigroup_count(n: usize, total_squares: &BigUint, profiles: &[ClassProfile]) -> Result<BigUint> {
    let mut x = ratio(total_squares.clone(), factorial(n));
    for p in profiles {
        x += ratio(BigUint::from(6u32) * &p.sum_f_squared, BigUint::from(p.par_order));
    }
    to_integer(x, "quasigroup count")
}

/// Isomorphism classes of loops of order `n`.
pub fn loop_count(n: usize, total_squares: &BigUint, profiles: &[ClassProfile]) -> Result<BigUint> {
    let m = factorial(n.saturating_sub(1));
    let mut x = ratio(total_squares.clone(), factorial(n) * &m * &m);
    for p in profiles {
        x += ratio(BigUint::from(6 * p.sum_g_squared), BigUint::from(p.par_order));
    }
    to_integer(x, "loop count")
}

/// The published tables as shipped data.
#[derive(Clone, Debug, Default)]
pub struct Tables {
    /// Order-2 types: `(type, C_[Π], N_[Π])`.
    pub ord2: Vec<(usize, BigUint, BigUint)>,
    /// `i → N_i`.
    pub main_classes: BTreeMap<u64, BigUint>,
    /// `type → |Γ_Π|`.
    pub normalizers: BTreeMap<usize, BigUint>,
    /// `(type, LF, |L_[Π]|)`.
    pub lf: Vec<(usize, BigUint, BigUint)>,
    /// `(|Par|, |Is|, classes)`.
    pub par_is: Vec<(u64, u64, BigUint)>,
    /// `(n, reduced factor, |L|)`.
    pub labeled: (usize, BigUint, BigUint),
}

fn tsv_rows(text: &str) -> impl Iterator<Item = Vec<&str>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split('\t').map(str::trim).collect())
}

fn num<T: std::str::FromStr>(s: &str, file: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("{file}: bad number {s:?}")))
}

fn read(dir: &Path, file: &str) -> Result<String> {
    std::fs::read_to_string(dir.join(file)).map_err(|e| Error::Parse(format!("{file}: {e}")))
}

impl Tables {
    pub fn load(dir: &Path) -> Result<Tables> {
        let mut t = Tables::default();
        let file = "t7_ord2.tsv";
        for r in tsv_rows(&read(dir, file)?) {
            t.ord2.push((num(r[0], file)?, num(r[1], file)?, num(r[2], file)?));
        }
        let file = "t8_mainclasses.tsv";
        for r in tsv_rows(&read(dir, file)?) {
            t.main_classes.insert(num(r[0], file)?, num(r[1], file)?);
        }
        let file = "t9_gammapi.tsv";
        for r in tsv_rows(&read(dir, file)?) {
            t.normalizers.insert(num(r[0], file)?, num(r[1], file)?);
        }
        let file = "t10_lf_lpi.tsv";
        for r in tsv_rows(&read(dir, file)?) {
            t.lf.push((num(r[0], file)?, num(r[1], file)?, num(r[2], file)?));
        }
        let file = "t10b_paris.tsv";
        for r in tsv_rows(&read(dir, file)?) {
            t.par_is.push((num(r[0], file)?, num(r[1], file)?, num(r[2], file)?));
        }
        let file = "labeled_total.tsv";
        let text = read(dir, file)?;
        let r = tsv_rows(&text).next().ok_or_else(|| Error::Parse(format!("{file}: empty")))?;
        t.labeled = (num(r[0], file)?, num(r[1], file)?, num(r[2], file)?);
        Ok(t)
    }
}

/// Cycle counts `(a1, a2)` on the class an involution fixes setwise.
pub fn involution_avec(g: &Paratopism) -> AVec {
    let h = with_symbols_fixed(g);
    let n = h.order_n();
    let a1 = (0..n).filter(|&s| h.image(2 * n + s) == 2 * n + s).count();
    AVec { a1, a2: (n - a1) / 2 }
}

/// One order-2 type in the ledger.
#[derive(Clone, Debug, Serialize)]
pub struct Ord2Entry {
    pub type_index: usize,
    pub a: AVec,
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub normalizer: BigUint,
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub lf: BigUint,
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub l_pi: BigUint,
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub c_pi: BigUint,
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub n_pi: BigUint,
}

/// Named check with its outcome.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Check {
        Check { name: name.to_string(), passed, detail }
    }
}

/// Everything reproduced from the tables by arithmetic.
#[derive(Clone, Debug, Serialize)]
pub struct CountLedger {
    pub n: usize,
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub gamma: BigUint,
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub total_squares: BigUint,
    pub ord2: Vec<Ord2Entry>,
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub n2: BigUint,
    pub main_classes: MainClassTotal,
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub onefact_classes: BigUint,
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub isotopy_classes: BigUint,
    pub checks: Vec<Check>,
}

impl CountLedger {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("order {}\n|Gamma| = {}\n|L| = {}\n", self.n, self.gamma, self.total_squares));
        out.push_str("type\ta\t|Gamma_Pi|\tLF\t|L_[Pi]|\t|C_[Pi]|\tN_[Pi]\n");
        for e in &self.ord2 {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                e.type_index, e.a, e.normalizer, e.lf, e.l_pi, e.c_pi, e.n_pi
            ));
        }
        out.push_str(&format!("N_2 = {}\n", self.n2));
        out.push_str(&format!("|Gamma| sum_(i>=2) N_i/i = {}\n", self.main_classes.symmetric_squares));
        out.push_str(&format!("N_1 = {}\n", self.main_classes.n1));
        out.push_str(&format!("main classes = {}\n", self.main_classes.total));
        out.push_str(&format!("one-factorization classes = {}\n", self.onefact_classes));
        out.push_str(&format!("isotopy classes = {}\n", self.isotopy_classes));
        for c in &self.checks {
            out.push_str(&format!("[{}] {}: {}\n", if c.passed { "ok" } else { "FAIL" }, c.name, c.detail));
        }
        out
    }
}

/// Rebuilds the ledger of the published tables. Normalizer orders are
/// recomputed from the involution representatives; every shipped column is
/// compared with the recomputed value.
pub fn verify_tables(t: &Tables) -> Result<CountLedger> {
    let n = t.labeled.0;
    let gamma = gamma_order(n);
    let mut checks = Vec::new();
    let m = factorial(n - 1);
    let total_squares = t.labeled.2.clone();
    checks.push(Check::new(
        "labeled total = n!(n-1)! x reduced factor",
        factorial(n) * m * &t.labeled.1 == total_squares,
        total_squares.to_string(),
    ));
    let types: Vec<_> = prime_order_types(n).into_iter().filter(|x| x.p == 2).collect();
    let mut ord2 = Vec::new();
    let mut n2 = BigUint::zero();
    for (k, (idx, lf, l_table)) in t.lf.iter().enumerate() {
        let ty = types.get(idx - 1).ok_or_else(|| Error::Parse(format!("no involution type {idx}")))?;
        let rep = involution_representative(ty, n);
        let a = involution_avec(&rep);
        let normalizer = centralizer_order(&rep);
        if let Some(shipped) = t.normalizers.get(idx) {
            checks.push(Check::new(
                &format!("normalizer order, type {idx}"),
                shipped == &normalizer,
                normalizer.to_string(),
            ));
        }
        let l_pi = l_pi_class_size(n, &normalizer, a, lf)?;
        checks.push(Check::new(&format!("|L_[Pi]| from LF, type {idx}"), &l_pi == l_table, l_pi.to_string()));
        let (ti, c_pi, n_table) = t.ord2.get(k).ok_or_else(|| Error::Parse(format!("no order-2 row {idx}")))?;
        if ti != idx {
            return Err(Error::Parse(format!("order-2 rows out of step at type {idx}")));
        }
        let n_pi = solve_npi(&l_pi, c_pi, &gamma, 2)?;
        checks.push(Check::new(&format!("N_[Pi], type {idx}"), &n_pi == n_table, n_pi.to_string()));
        n2 += &n_pi;
        ord2.push(Ord2Entry { type_index: *idx, a, normalizer, lf: lf.clone(), l_pi, c_pi: c_pi.clone(), n_pi });
    }
    if let Some(shipped) = t.main_classes.get(&2) {
        checks.push(Check::new("N_2", shipped == &n2, n2.to_string()));
    }
    let mut n_i = t.main_classes.clone();
    n_i.insert(2, n2.clone());
    let main = solve_n1(&total_squares, &n_i, &gamma)?;
    if let Some(shipped) = t.main_classes.get(&1) {
        checks.push(Check::new("N_1", shipped == &main.n1, main.n1.to_string()));
    }
    let by_par: BTreeMap<u64, BigUint> = t.par_is.iter().fold(BTreeMap::new(), |mut acc, (par, _, c)| {
        *acc.entry(*par).or_insert_with(BigUint::zero) += c;
        acc
    });
    checks.push(Check::new(
        "|Par|/|Is| rows sum to N_i",
        by_par.iter().all(|(i, c)| t.main_classes.get(i) == Some(c)) && by_par.len() == t.main_classes.len(),
        format!("{} orders", by_par.len()),
    ));
    let onefact = onefact_classes(&t.par_is)?;
    let isotopy = isotopy_classes(&t.par_is)?;
    Ok(CountLedger {
        n,
        gamma,
        total_squares,
        ord2,
        n2,
        main_classes: main,
        onefact_classes: onefact,
        isotopy_classes: isotopy,
        checks,
    })
}

/// Ledger of one involution class at small order, computed two ways.
#[derive(Clone, Debug, Serialize)]
pub struct SmallOrd2 {
    pub key: String,
    /// `|L_[Π]|` summed over census classes.
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub l_pi_census: BigUint,
    /// `|L_[Π]|` from the one-factorization count.
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub l_pi_onefact: BigUint,
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub c_pi: BigUint,
    /// `N_[Π]` solved from the class equation.
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub n_pi: BigUint,
    /// Classes whose group is exactly a conjugate of `Π`.
    pub n_pi_census: u64,
}

impl SmallOrd2 {
    pub fn agrees(&self) -> bool {
        self.l_pi_census == self.l_pi_onefact && self.n_pi == BigUint::from(self.n_pi_census)
    }
}

/// Recomputes the order-2 part of the ledger at small order from a census:
/// `|C_[Π]|` by summation over classes with larger groups, `|L_[Π]|` from
/// one-factorizations, and checks the solved `N_[Π]` against the census.
pub fn small_order_ord2(census: &Census) -> Result<Vec<SmallOrd2>> {
    let n = census.n;
    let gamma = gamma_order(n);
    let mut per_key: BTreeMap<ConjugacyKey, (BigRational, BigRational, u64)> = BTreeMap::new();
    for cls in &census.classes {
        let group = autoparatopy_group(&cls.representative).closure(n, 1 << 22)?;
        let mut counts: BTreeMap<ConjugacyKey, u64> = BTreeMap::new();
        for g in group.elements().iter().filter(|g| !g.is_identity() && g.pow(2).is_identity()) {
            *counts.entry(g.conjugacy_key()).or_insert(0) += 1;
        }
        for (key, c) in counts {
            let share = BigRational::new(BigInt::from(&gamma * c), BigInt::from(group.order()));
            let e = per_key.entry(key).or_insert((BigRational::zero(), BigRational::zero(), 0));
            e.0 += &share;
            if group.order() > 2 {
                e.1 += share;
            } else {
                e.2 += 1;
            }
        }
    }
    let types: Vec<_> = prime_order_types(n).into_iter().filter(|x| x.p == 2).collect();
    let mut out = Vec::new();
    for ty in types {
        let rep = involution_representative(&ty, n);
        let key = rep.conjugacy_key();
        let (l, c, exact) = per_key.remove(&key).unwrap_or((BigRational::zero(), BigRational::zero(), 0));
        let l_census = to_integer(l, "|L_[Pi]|")?;
        let c_pi = to_integer(c, "|C_[Pi]|")?;
        let h = with_symbols_fixed(&rep);
        let l_onefact = exact_div(&gamma, &centralizer_order(&rep), "conjugates")?
            * lf_with_symmetry(n, Some(&h), AdditionOrder::Inc)?;
        let n_pi = solve_npi(&l_onefact, &c_pi, &gamma, 2)?;
        out.push(SmallOrd2 {
            key: format!("p={} f={:?} F={}", ty.p, ty.f, ty.fixed_classes),
            l_pi_census: l_census,
            l_pi_onefact: l_onefact,
            c_pi,
            n_pi,
            n_pi_census: exact,
        });
    }
    if !per_key.is_empty() {
        return Err(Error::Inconsistent(format!("n={n}: involution classes without a type: {:?}", per_key.keys().collect::<Vec<_>>())));
    }
    Ok(out)
}

/// `N_i` of a census.
pub fn census_orders(census: &Census) -> BTreeMap<u64, BigUint> {
    let mut out = BTreeMap::new();
    for c in &census.classes {
        *out.entry(c.par_order).or_insert_with(BigUint::zero) += BigUint::one();
    }
    out
}

/// `(|Par|, |Is|, classes)` rows of a census.
pub fn census_par_is(census: &Census) -> Vec<(u64, u64, BigUint)> {
    let mut m: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    for c in &census.classes {
        *m.entry((c.par_order, c.is_order)).or_insert(0) += 1;
    }
    m.into_iter().map(|((p, i), c)| (p, i, BigUint::from(c))).collect()
}

/// Quasigroup and loop counts of a census.
pub fn census_quasigroups_and_loops(census: &Census) -> Result<(BigUint, BigUint)> {
    let profiles: Vec<ClassProfile> = census.classes.iter().map(|c| ClassProfile::of(&c.representative)).collect::<Result<_>>()?;
    Ok((
        quasigroup_count(census.n, &census.total_squares, &profiles)?,
        loop_count(census.n, &census.total_squares, &profiles)?,
    ))
}

/// Number of main classes as `u64`, for small orders.
pub fn small(x: &BigUint) -> Option<u64> {
    x.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::census;

    #[test]
    fn quasigroups_and_loops_against_bucketing() {
        for n in [3usize, 4, 5] {
            let c = census(n).unwrap();
            let (q, l) = census_quasigroups_and_loops(&c).unwrap();
            let (bq, bl) = crate::audit::bucket_quasigroups_and_loops(n);
            assert_eq!(q, BigUint::from(bq), "quasigroups n={n}");
            assert_eq!(l, BigUint::from(bl), "loops n={n}");
        }
        let (q, l) = census_quasigroups_and_loops(&census(3).unwrap()).unwrap();
        assert_eq!((q, l), (BigUint::from(5u32), BigUint::from(1u32)));
    }

    #[test]
    fn f_and_g_vanish_on_identity_and_mismatch() {
        let id = Paratopism::identity(4);
        assert!(f_alpha(&id).is_zero());
        assert_eq!(g_alpha(&id), 0);
        let a = Paratopism::from_cycles(4, "(1,2)").unwrap();
        assert!(f_alpha(&a).is_zero());
        let b = Paratopism::from_cycles(4, "(1,2)(5,6)(9,10)").unwrap();
        assert_eq!(f_alpha(&b), BigUint::from(4u32));
        assert_eq!(g_alpha(&b), 2);
    }

    #[test]
    fn ty_values() {
        assert_eq!(ty(5, 5).unwrap(), 3);
        assert_eq!(ty(4, 2).unwrap(), 2);
        assert_eq!(ty(3, 1).unwrap(), 1);
        assert_eq!(ty(6, 1).unwrap(), 1);
        assert!(ty(4, 1).is_err());
        assert_eq!(isotopy_classes(&[(5, 5, BigUint::one())]).unwrap(), BigUint::from(6u32));
    }

    #[test]
    fn order_three_ledger() {
        let mut n_i = BTreeMap::new();
        n_i.insert(108, BigUint::one());
        let t = solve_n1(&BigUint::from(12u32), &n_i, &gamma_order(3)).unwrap();
        assert!(t.n1.is_zero());
        assert_eq!(t.total, BigUint::one());
        assert!(solve_npi(&BigUint::from(7u32), &BigUint::from(7u32), &gamma_order(3), 2).unwrap().is_zero());
    }

    #[test]
    fn class_equation_at_small_orders() {
        for n in 3..=5 {
            let c = census(n).unwrap();
            for row in small_order_ord2(&c).unwrap() {
                assert!(row.agrees(), "n={n} {row:?}");
            }
            let mut n_i = census_orders(&c);
            let n1 = n_i.remove(&1).unwrap_or_default();
            let t = solve_n1(&c.total_squares, &n_i, &gamma_order(n)).unwrap();
            assert_eq!(t.n1, n1);
        }
    }

    #[test]
    fn published_tables_reproduce() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/paper_tables");
        let ledger = verify_tables(&Tables::load(&dir).unwrap()).unwrap();
        assert!(ledger.passed(), "{}", ledger.to_text());
        assert_eq!(ledger.n2.to_string(), "47291560812217");
        assert_eq!(ledger.main_classes.symmetric_squares.to_string(), "9023583561995938862980803959193600000");
        assert_eq!(ledger.main_classes.n1.to_string(), "2036029552535590421717241");
        assert_eq!(ledger.main_classes.total.to_string(), "2036029552582883134196099");
        assert_eq!(ledger.onefact_classes.to_string(), "6108088657705958932053657");
        assert_eq!(ledger.isotopy_classes.to_string(), "12216177315369229261482540");
    }
}
