//! Candidate symmetry groups: autoparatopisms of prime order and subgroups
//! of order 4 whose involutions are eligible.
//!
//! An element of prime order `p` fixing `F` classes setwise is described by
//! `p`, `F` and its fixed-point counts per class. Such an element can only be
//! an autoparatopism when `p` divides `3 - F`, when every fixed class has `f`
//! fixed points with `p | n - f`, and, since fixed points of two different
//! classes span a subsquare, when two classes with fixed points force all
//! three counts to be equal and at most `n/2`.
//!
//! Groups of order 4 are classified through their orbits. For a group `V`
//! acting on the points, each orbit is a transitive `V`-set `V/H`, so the
//! action is determined up to conjugacy in the paratopy group by how many
//! orbits of each kind lie in each point class. Enumerating these
//! multiplicities and normalizing under relabelings of `V` and of the
//! classes yields one representative per conjugacy class.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::cover::CoverInstance;
use crate::error::{Error, Result};
use crate::group::{
    centralizer_generators, conjugating_element, ConjugacyKey, CycleSignature, ParaGroup, Paratopism,
};
use crate::square::PointClass;

/// Type of an autoparatopism of prime order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PrimeType {
    pub p: usize,
    /// Fixed points per class, in decreasing order.
    pub f: [usize; 3],
    /// Number of classes fixed setwise.
    pub fixed_classes: usize,
}

impl PrimeType {
    /// Re-checks the divisibility and subsquare conditions directly.
    pub fn satisfies_constraints(&self, n: usize) -> bool {
        let [fr, fc, fs] = self.f;
        if !(fr >= fc && fc >= fs) || fr > n || !is_prime(self.p) {
            return false;
        }
        if !(3 - self.fixed_classes).is_multiple_of(self.p) {
            return false;
        }
        let fixed_ok = match self.fixed_classes {
            3 => self.f.iter().all(|&f| (n - f).is_multiple_of(self.p)),
            1 => fc == 0 && fs == 0 && (n - fr).is_multiple_of(self.p),
            0 => self.f == [0, 0, 0],
            _ => false,
        };
        if !fixed_ok || (self.fixed_classes == 3 && self.f == [n, n, n]) {
            return false;
        }
        if fr >= 1 && fc >= 1 && !(fr == fc && fc == fs && 2 * fr <= n) {
            return false;
        }
        true
    }
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// All prime-order types for order `n`. Sorted by `p`, then fixed classes descending, then counts.
pub fn prime_order_types(n: usize) -> Vec<PrimeType> {
    let primes: Vec<usize> = (2..=n.max(3)).filter(|&p| is_prime(p)).collect();
    let mut out = Vec::new();
    for p in primes {
        let fs: Vec<usize> = match p {
            2 => vec![3, 1],
            3 => vec![3, 0],
            _ => vec![3],
        };
        for fixed_classes in fs {
            let mut group = Vec::new();
            match fixed_classes {
                3 => {
                    for fr in 0..=n {
                        for fc in 0..=fr {
                            for fs in 0..=fc {
                                group.push(PrimeType { p, f: [fr, fc, fs], fixed_classes });
                            }
                        }
                    }
                }
                1 => {
                    for f in 0..=n {
                        group.push(PrimeType { p, f: [f, 0, 0], fixed_classes });
                    }
                }
                _ => group.push(PrimeType { p, f: [0, 0, 0], fixed_classes }),
            }
            group.retain(|t| t.satisfies_constraints(n));
            group.sort_by_key(|t| t.f);
            out.extend(group);
        }
    }
    out
}

fn block_cycles(n: usize, fixed: usize, p: usize) -> Vec<u8> {
    (0..n)
        .map(|i| {
            if i < fixed {
                i as u8
            } else {
                let k = (i - fixed) % p;
                (if k + 1 == p { i + 1 - p } else { i + 1 }) as u8
            }
        })
        .collect()
}

/// A representative element of the type: each fixed class fixes its first
/// points and cycles consecutive blocks of length `p`; with one fixed class
/// that class is `S` and rows and columns are swapped by `r_i ↔ c_i`; with
/// no fixed class the classes are rotated `R → C → S → R`.
pub fn prime_representative(t: &PrimeType, n: usize) -> Paratopism {
    let id: Vec<u8> = (0..n as u8).collect();
    match t.fixed_classes {
        3 => {
            let inner = t.f.map(|f| block_cycles(n, f, t.p));
            Paratopism::from_parts(PointClass::ALL, inner).expect("valid parts")
        }
        1 => Paratopism::from_parts(
            [PointClass::Col, PointClass::Row, PointClass::Sym],
            [id.clone(), id, block_cycles(n, t.f[0], 2)],
        )
        .expect("valid parts"),
        _ => Paratopism::from_parts([PointClass::Col, PointClass::Sym, PointClass::Row], [id.clone(), id.clone(), id])
            .expect("valid parts"),
    }
}

/// Representative of an involution type.
pub fn involution_representative(t: &PrimeType, n: usize) -> Paratopism {
    assert_eq!(t.p, 2, "not an involution type");
    prime_representative(t, n)
}

/// The prime type of `g`, if `g` has prime order.
pub fn prime_type_of(g: &Paratopism) -> Option<PrimeType> {
    let p = g.element_order();
    if !is_prime(p) {
        return None;
    }
    let cp = g.class_perm();
    let counts = g.fixed_counts();
    let mut f = [0usize; 3];
    for x in 0..3 {
        if cp[x].index() == x {
            f[x] = counts[x];
        }
    }
    f.sort_unstable_by(|a, b| b.cmp(a));
    Some(PrimeType { p, f, fixed_classes: g.fixed_classes() })
}

/// True iff `g` is an involution of an admissible type.
pub fn is_eligible(g: &Paratopism, types: &[PrimeType]) -> bool {
    g.element_order() == 2 && prime_type_of(g).is_some_and(|t| types.contains(&t))
}

/// Conjugacy classes of elements whose order divides 4 and which can occur in
/// candidate groups: eligible involutions, order-4 elements with an eligible
/// square, and the identity.
#[derive(Clone, Debug, Serialize)]
pub struct ElementType {
    /// 1-based position in the list.
    pub index: usize,
    pub order: usize,
    pub signature: CycleSignature,
    #[serde(skip)]
    pub key: ConjugacyKey,
    #[serde(skip)]
    pub representative: Paratopism,
}

pub fn element_types(n: usize) -> Vec<ElementType> {
    let primes = prime_order_types(n);
    let mut reps: Vec<Paratopism> = primes
        .iter()
        .filter(|t| t.p == 2)
        .map(|t| involution_representative(t, n))
        .collect();
    let mut fours: Vec<Paratopism> = cyclic_structures(n, &primes).into_iter().map(|s| s.generator(n)).collect();
    fours.sort_by_key(|g| {
        let s = g.cycle_signature();
        (std::cmp::Reverse(s.fixed_classes), s.cycles.get(&1).copied().unwrap_or(0), g.conjugacy_key())
    });
    reps.extend(fours);
    reps.push(Paratopism::identity(n));
    reps.into_iter()
        .enumerate()
        .map(|(i, g)| ElementType {
            index: i + 1,
            order: g.element_order(),
            signature: g.cycle_signature(),
            key: g.conjugacy_key(),
            representative: g,
        })
        .collect()
}

/// Index of the element type containing `g`.
pub fn element_type_index(types: &[ElementType], g: &Paratopism) -> Option<usize> {
    let key = g.conjugacy_key();
    types.iter().find(|t| t.key == key).map(|t| t.index)
}

/// Orbit multiplicities of a Klein four-group `{1, a, b, ab}` on one class:
/// fixed points, orbits fixed pointwise by `a`, by `b`, by `ab`, and regular
/// orbits.
type KleinCounts = [usize; 5];

fn klein_vectors(n: usize) -> Vec<KleinCounts> {
    let mut out = Vec::new();
    for m1 in 0..=n / 4 {
        let rest = n - 4 * m1;
        for pairs in 0..=rest / 2 {
            let mv = rest - 2 * pairs;
            for ma in 0..=pairs {
                for mb in 0..=pairs - ma {
                    out.push([mv, ma, mb, pairs - ma - mb, m1]);
                }
            }
        }
    }
    out
}

/// Cycle multiplicities `(a1, a2, a4)` of an element of order dividing 4 on
/// one class.
fn cyclic_vectors(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a4 in 0..=n / 4 {
        for a2 in 0..=(n - 4 * a4) / 2 {
            out.push([n - 4 * a4 - 2 * a2, a2, a4]);
        }
    }
    out
}

/// Structure of a candidate group of order 4 up to conjugacy.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Structure {
    /// Klein group fixing every class; one multiplicity vector per class.
    KleinFixing([KleinCounts; 3]),
    /// Klein group whose elements outside `⟨a⟩` swap rows and columns;
    /// symbols carry `z`, rows and columns carry `u1` orbits of length 2 and
    /// `u2` of length 4.
    KleinSwapping { z: KleinCounts, u1: usize, u2: usize },
    CyclicFixing([[usize; 3]; 3]),
    CyclicSwapping { z: [usize; 3], u1: usize, u2: usize },
}

struct CyclicStructure(Structure);

impl CyclicStructure {
    fn generator(&self, n: usize) -> Paratopism {
        self.0.generators(n).remove(0)
    }
}

fn permute_klein(v: &KleinCounts, perm: [usize; 3]) -> KleinCounts {
    let mids = [v[1], v[2], v[3]];
    [v[0], mids[perm[0]], mids[perm[1]], mids[perm[2]], v[4]]
}

const PERMS3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

impl Structure {
    fn generators(&self, n: usize) -> Vec<Paratopism> {
        match self {
            Structure::KleinFixing(classes) => {
                let mut a = Vec::new();
                let mut b = Vec::new();
                for v in classes {
                    let (ia, ib) = klein_class(n, v);
                    a.push(ia);
                    b.push(ib);
                }
                let to = |v: Vec<Vec<u8>>| -> Paratopism {
                    Paratopism::from_parts(PointClass::ALL, [v[0].clone(), v[1].clone(), v[2].clone()]).unwrap()
                };
                vec![to(a), to(b)]
            }
            Structure::KleinSwapping { z, u1, u2 } => {
                let (za, zb) = klein_class(n, z);
                // a fixes the u1 pairs and acts as (i j) on both sides of regular orbits;
                // b swaps r_i with c_i.
                let mut a_rc: Vec<u8> = (0..n as u8).collect();
                for k in 0..*u2 {
                    let i = u1 + 2 * k;
                    a_rc.swap(i, i + 1);
                }
                let id: Vec<u8> = (0..n as u8).collect();
                let a = Paratopism::from_parts(PointClass::ALL, [a_rc.clone(), a_rc, za]).unwrap();
                let b = Paratopism::from_parts([PointClass::Col, PointClass::Row, PointClass::Sym], [id.clone(), id, zb])
                    .unwrap();
                vec![a, b]
            }
            Structure::CyclicFixing(classes) => {
                let inner = classes.map(|v| cyclic_class(n, &v));
                vec![Paratopism::from_parts(PointClass::ALL, inner).unwrap()]
            }
            Structure::CyclicSwapping { z, u1, u2 } => {
                // g(r_i) = c_i, g(c_i) = r_{ψ(i)} with ψ fixing the first u1 indices
                // and swapping later adjacent pairs.
                let id: Vec<u8> = (0..n as u8).collect();
                let mut psi = id.clone();
                for k in 0..*u2 {
                    let i = u1 + 2 * k;
                    psi.swap(i, i + 1);
                }
                vec![Paratopism::from_parts(
                    [PointClass::Col, PointClass::Row, PointClass::Sym],
                    [id, psi, cyclic_class(n, z)],
                )
                .unwrap()]
            }
        }
    }

    fn is_cyclic(&self) -> bool {
        matches!(self, Structure::CyclicFixing(_) | Structure::CyclicSwapping { .. })
    }
}

/// Inner permutations of `a` and `b` on one class with the given
/// multiplicities.
fn klein_class(n: usize, v: &KleinCounts) -> (Vec<u8>, Vec<u8>) {
    let mut a: Vec<u8> = (0..n as u8).collect();
    let mut b = a.clone();
    let mut i = v[0];
    for _ in 0..v[1] {
        b.swap(i, i + 1);
        i += 2;
    }
    for _ in 0..v[2] {
        a.swap(i, i + 1);
        i += 2;
    }
    for _ in 0..v[3] {
        a.swap(i, i + 1);
        b.swap(i, i + 1);
        i += 2;
    }
    for _ in 0..v[4] {
        a.swap(i, i + 1);
        a.swap(i + 2, i + 3);
        b.swap(i, i + 2);
        b.swap(i + 1, i + 3);
        i += 4;
    }
    (a, b)
}

fn cyclic_class(n: usize, v: &[usize; 3]) -> Vec<u8> {
    let mut g: Vec<u8> = (0..n as u8).collect();
    let mut i = v[0];
    for _ in 0..v[1] {
        g.swap(i, i + 1);
        i += 2;
    }
    for _ in 0..v[2] {
        g[i] = (i + 1) as u8;
        g[i + 1] = (i + 2) as u8;
        g[i + 2] = (i + 3) as u8;
        g[i + 3] = i as u8;
        i += 4;
    }
    g
}

fn f3_eligible(types: &[PrimeType], mut counts: [usize; 3], n: usize) -> bool {
    if counts == [n, n, n] {
        return false;
    }
    counts.sort_unstable_by(|a, b| b.cmp(a));
    types.contains(&PrimeType { p: 2, f: counts, fixed_classes: 3 })
}

fn f1_eligible(types: &[PrimeType], f: usize) -> bool {
    types.contains(&PrimeType { p: 2, f: [f, 0, 0], fixed_classes: 1 })
}

fn cyclic_structures(n: usize, types: &[PrimeType]) -> Vec<CyclicStructure> {
    let vecs = cyclic_vectors(n);
    let mut out = Vec::new();
    for i in 0..vecs.len() {
        for j in i..vecs.len() {
            for k in j..vecs.len() {
                let classes = [vecs[i], vecs[j], vecs[k]];
                if classes.iter().all(|v| v[2] == 0) {
                    continue;
                }
                let sq = classes.map(|v| v[0] + 2 * v[1]);
                if f3_eligible(types, sq, n) {
                    out.push(CyclicStructure(Structure::CyclicFixing(classes)));
                }
            }
        }
    }
    for z in &vecs {
        for u2 in 0..=n / 2 {
            let u1 = n - 2 * u2;
            if z[2] == 0 && u2 == 0 {
                continue;
            }
            if f3_eligible(types, [z[0] + 2 * z[1], u1, u1], n) {
                out.push(CyclicStructure(Structure::CyclicSwapping { z: *z, u1, u2 }));
            }
        }
    }
    out
}

fn klein_structures(n: usize, types: &[PrimeType]) -> Vec<Structure> {
    let vecs = klein_vectors(n);
    let mut seen: HashSet<Structure> = HashSet::new();
    let mut out = Vec::new();
    for i in 0..vecs.len() {
        for j in i..vecs.len() {
            for k in j..vecs.len() {
                let classes = [vecs[i], vecs[j], vecs[k]];
                let fixed_by = |e: usize| classes.map(|v| v[0] + 2 * v[1 + e]);
                if !(0..3).all(|e| f3_eligible(types, fixed_by(e), n)) {
                    continue;
                }
                let canon = PERMS3
                    .iter()
                    .map(|&p| {
                        let mut c = classes.map(|v| permute_klein(&v, p));
                        c.sort();
                        c
                    })
                    .min()
                    .unwrap();
                let s = Structure::KleinFixing(canon);
                if seen.insert(s.clone()) {
                    out.push(s);
                }
            }
        }
    }
    for z in &vecs {
        if z[2] > z[3] {
            continue;
        }
        for u2 in 0..=n / 2 {
            let u1 = n - 2 * u2;
            let ka = [z[0] + 2 * z[1], u1, u1];
            if !f3_eligible(types, ka, n) {
                continue;
            }
            if f1_eligible(types, z[0] + 2 * z[2]) && f1_eligible(types, z[0] + 2 * z[3]) {
                out.push(Structure::KleinSwapping { z: *z, u1, u2 });
            }
        }
    }
    out
}

/// Cyclic or elementary abelian.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Shape {
    ElementaryAbelian,
    Cyclic,
}

/// A group of order 4 with eligible involutions.
#[derive(Clone, Debug, Serialize)]
pub struct Order4Candidate {
    pub shape: Shape,
    #[serde(skip)]
    pub generators: Vec<Paratopism>,
    #[serde(skip)]
    pub group: ParaGroup,
    /// Element type indices of all four elements, sorted.
    pub element_types: Vec<usize>,
    /// Point orbit lengths as `length -> count`.
    pub orbit_lengths: BTreeMap<usize, usize>,
}

impl Order4Candidate {
    pub fn from_generators(generators: Vec<Paratopism>, types: &[ElementType]) -> Result<Order4Candidate> {
        let n = generators.first().map(|g| g.order_n()).ok_or_else(|| Error::Parse("no generators".into()))?;
        let group = ParaGroup::closure(n, &generators, 4)?;
        if group.order() != 4 {
            return Err(Error::Inconsistent(format!("group has order {}", group.order())));
        }
        let shape = if group.elements().iter().any(|g| g.element_order() == 4) {
            Shape::Cyclic
        } else {
            Shape::ElementaryAbelian
        };
        let mut element_types = Vec::new();
        for g in group.elements() {
            let t = element_type_index(types, g)
                .ok_or_else(|| Error::Inconsistent(format!("element {g:?} has no admissible type")))?;
            element_types.push(t);
        }
        element_types.sort_unstable();
        let orbit_lengths = group.orbit_lengths();
        Ok(Order4Candidate { shape, generators, group, element_types, orbit_lengths })
    }

    /// Orbit lengths in `1^a 2^b 4^c` notation.
    pub fn orbits_string(&self) -> String {
        let parts: Vec<String> = self.orbit_lengths.iter().map(|(l, c)| format!("{l}^{c}")).collect();
        parts.join(" ")
    }
}

/// One representative per conjugacy class of groups of order 4 whose
/// involutions are eligible, found from orbit multiplicities.
pub fn classify_order4(n: usize) -> Vec<Order4Candidate> {
    let primes = prime_order_types(n);
    let types = element_types(n);
    let mut structures = klein_structures(n, &primes);
    structures.extend(cyclic_structures(n, &primes).into_iter().map(|c| c.0));
    let mut out: Vec<(Structure, Order4Candidate)> = structures
        .into_iter()
        .map(|s| {
            let c = Order4Candidate::from_generators(s.generators(n), &types).expect("structure yields a candidate");
            debug_assert_eq!(c.shape == Shape::Cyclic, s.is_cyclic());
            (s, c)
        })
        .collect();
    out.sort_by(|(sa, a), (sb, b)| {
        (a.shape, &a.element_types, &a.orbit_lengths, sa).cmp(&(b.shape, &b.element_types, &b.orbit_lengths, sb))
    });
    out.into_iter().map(|(_, c)| c).collect()
}

/// Order-4 candidates by search inside centralizers of eligible
/// involutions, deduplicated by conjugacy tests. Fails if a centralizer is
/// larger than `budget` elements.
pub fn order4_candidates(n: usize, budget: usize) -> Result<Vec<Order4Candidate>> {
    let primes = prime_order_types(n);
    let types = element_types(n);
    let type_of = |g: &Paratopism| element_type_index(&types, g);
    let mut found: Vec<Order4Candidate> = Vec::new();
    let push = |gens: Vec<Paratopism>, found: &mut Vec<Order4Candidate>| -> Result<()> {
        let c = Order4Candidate::from_generators(gens, &types)?;
        for other in found.iter() {
            if other.element_types == c.element_types
                && other.orbit_lengths == c.orbit_lengths
                && conjugating_element(&other.group, &c.group).is_some()
            {
                return Ok(());
            }
        }
        found.push(c);
        Ok(())
    };
    for t in primes.iter().filter(|t| t.p == 2) {
        let alpha = involution_representative(t, n);
        let ta = type_of(&alpha);
        let cent = ParaGroup::closure(n, &centralizer_generators(std::slice::from_ref(&alpha)), budget)
            .map_err(|_| Error::BudgetExhausted)?;
        for beta in cent.elements() {
            if beta.element_order() == 4 && beta.compose(beta) == alpha {
                push(vec![beta.clone()], &mut found)?;
                continue;
            }
            if beta == &alpha || !is_eligible(beta, &primes) {
                continue;
            }
            let ab = alpha.compose(beta);
            if !is_eligible(&ab, &primes) {
                continue;
            }
            let (tb, tab) = (type_of(beta), type_of(&ab));
            if ta <= tb && tb <= tab {
                push(vec![alpha.clone(), beta.clone()], &mut found)?;
            }
        }
    }
    found.sort_by(|a, b| (a.shape, &a.element_types, &a.orbit_lengths).cmp(&(b.shape, &b.element_types, &b.orbit_lengths)));
    Ok(found)
}

/// Outcome of checking a candidate group for Latin squares.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Existence {
    /// No Latin square admits the group; the reason says how this was shown.
    NoSquare(String),
    /// A Latin square admitting the group was found.
    SquaresExist,
    /// The search budget ran out first.
    Indeterminate,
}

/// Fixed-point counts of the group's common fixed points per class.
fn common_fixed(group: &ParaGroup) -> [usize; 3] {
    let n = group.n();
    let mut counts = [0usize; 3];
    for p in 0..3 * n {
        if group.elements().iter().all(|g| g.image(p) == p) {
            counts[p / n] += 1;
        }
    }
    counts
}

/// Necessary conditions from subsquares: when two classes contain fixed
/// points of an element (or of the whole group) the fixed points form a
/// subsquare, so the three counts agree and a proper subsquare has at most
/// half the order of the square containing it.
pub fn subsquare_obstruction(group: &ParaGroup) -> Option<String> {
    let n = group.n();
    let check = |counts: [usize; 3], what: &str| -> Option<String> {
        let nonzero = counts.iter().filter(|&&c| c > 0).count();
        if nonzero >= 2 && !(counts[0] == counts[1] && counts[1] == counts[2]) {
            return Some(format!("{what} fixes {counts:?} points per class"));
        }
        if nonzero >= 2 && counts[0] < n && 2 * counts[0] > n {
            return Some(format!("{what} fixes a subsquare of order {} > n/2", counts[0]));
        }
        None
    };
    let common = common_fixed(group);
    let mut element_subsquares = Vec::new();
    for g in group.elements().iter().filter(|g| !g.is_identity() && g.is_isotopism()) {
        let counts = g.fixed_counts();
        if let Some(r) = check(counts, "an element") {
            return Some(r);
        }
        if counts.iter().all(|&c| c > 0) {
            element_subsquares.push(counts[0]);
        }
    }
    if let Some(r) = check(common, "the group") {
        return Some(r);
    }
    if common.iter().all(|&c| c > 0) {
        let inner = common[0];
        for &outer in &element_subsquares {
            if inner < outer && 2 * inner > outer {
                return Some(format!("a subsquare of order {inner} inside one of order {outer}"));
            }
        }
    }
    None
}

/// Orbits of triples that can occur in a square admitting `group`: when an
/// element fixes points in all three classes they span a subsquare, so no
/// triple contains exactly two of them.
pub fn subsquare_compatible_orbits(group: &ParaGroup) -> Vec<Vec<crate::square::Triple>> {
    let n = group.n();
    let fixed_sets: Vec<Vec<bool>> = group
        .elements()
        .iter()
        .filter(|g| !g.is_identity() && g.fixed_counts().iter().all(|&c| c > 0) && g.is_isotopism())
        .map(|g| (0..3 * n).map(|p| g.image(p) == p).collect())
        .collect();
    crate::cover::triple_orbits(group)
        .into_iter()
        .filter(|o| {
            o.iter().all(|t| {
                fixed_sets.iter().all(|f| t.point_ids(n).iter().filter(|&&p| f[p]).count() != 2)
            })
        })
        .collect()
}

/// Decides whether some Latin square admits every element of `group`.
pub fn nonexistence_check(group: &ParaGroup, max_nodes: Option<u64>) -> Existence {
    if let Some(reason) = subsquare_obstruction(group) {
        return Existence::NoSquare(reason);
    }
    let inst = CoverInstance::build_from_orbits(group.n(), subsquare_compatible_orbits(group), &[])
        .expect("empty fixed set");
    match inst.decide(max_nodes) {
        Some(true) => Existence::SquaresExist,
        Some(false) => Existence::NoSquare("exhaustive search".into()),
        None => Existence::Indeterminate,
    }
}

/// Parses a generator file: lines `g<i>` tab cycle notation over `1..=3n`.
pub fn parse_generator_file(n: usize, text: &str) -> Result<BTreeMap<usize, Paratopism>> {
    let mut out = BTreeMap::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (name, cycles) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::Parse(format!("bad generator line {line:?}")))?;
        let idx: usize = name
            .trim_start_matches('g')
            .parse()
            .map_err(|_| Error::Parse(format!("bad generator name {name:?}")))?;
        out.insert(idx, Paratopism::from_cycles(n, cycles.trim())?);
    }
    Ok(out)
}

/// One row of the shipped order-4 group table.
#[derive(Clone, Debug, Serialize)]
pub struct GroupRow {
    pub group_type: usize,
    pub excluded: bool,
    pub generators: Vec<usize>,
    pub element_types: Vec<usize>,
    pub orbits: String,
    pub spec: Option<String>,
    pub seeds: Option<u64>,
    pub m_t: Option<u64>,
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad list entry {t:?}"))))
        .collect()
}

fn dash_or<T: std::str::FromStr>(s: &str) -> Result<Option<T>> {
    if s.trim() == "-" {
        Ok(None)
    } else {
        s.trim().parse().map(Some).map_err(|_| Error::Parse(format!("bad field {s:?}")))
    }
}

pub fn parse_group_table(text: &str) -> Result<Vec<GroupRow>> {
    let mut rows = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 8 {
            return Err(Error::Parse(format!("expected 8 fields: {line:?}")));
        }
        rows.push(GroupRow {
            group_type: f[0].trim().parse().map_err(|_| Error::Parse(format!("bad type {:?}", f[0])))?,
            excluded: f[1].trim() == "yes",
            generators: parse_list(f[2])?,
            element_types: parse_list(f[3])?,
            orbits: f[4].trim().to_string(),
            spec: dash_or(f[5])?,
            seeds: dash_or(f[6])?,
            m_t: dash_or(f[7])?,
        });
    }
    Ok(rows)
}

/// Result of checking shipped order-4 groups.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub groups: usize,
    pub elementary_abelian: usize,
    pub cyclic: usize,
    /// Every group has order 4 and only eligible involutions.
    pub all_eligible: bool,
    /// Recomputed element types and orbits agree with the table.
    pub columns_match: bool,
    /// No two shipped groups are conjugate.
    pub pairwise_non_conjugate: bool,
    /// (element types, orbits) differ for every pair of groups.
    pub invariants_distinguish: bool,
    /// Every shipped group is conjugate to exactly one classified group and
    /// the classification has no extra classes.
    pub matches_classification: bool,
    pub problems: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.all_eligible
            && self.columns_match
            && self.pairwise_non_conjugate
            && self.invariants_distinguish
            && self.matches_classification
    }
}

/// Checks shipped generator data against the definitions and against
/// [`classify_order4`].
pub fn verify_order4_data(n: usize, generator_text: &str, table_text: &str) -> Result<VerificationReport> {
    let gens = parse_generator_file(n, generator_text)?;
    let rows = parse_group_table(table_text)?;
    let primes = prime_order_types(n);
    let types = element_types(n);
    let mut problems = Vec::new();
    let mut candidates = Vec::new();
    let mut all_eligible = true;
    let mut columns_match = true;
    for row in &rows {
        let gs: Vec<Paratopism> = row
            .generators
            .iter()
            .map(|i| gens.get(i).cloned().ok_or_else(|| Error::Parse(format!("missing generator g{i}"))))
            .collect::<Result<_>>()?;
        let c = match Order4Candidate::from_generators(gs, &types) {
            Ok(c) => c,
            Err(e) => {
                all_eligible = false;
                problems.push(format!("type {}: {e}", row.group_type));
                continue;
            }
        };
        let involutions_ok = c
            .group
            .elements()
            .iter()
            .filter(|g| g.element_order() == 2)
            .all(|g| is_eligible(g, &primes));
        if !involutions_ok {
            all_eligible = false;
            problems.push(format!("type {}: ineligible involution", row.group_type));
        }
        if c.element_types != row.element_types || c.orbits_string() != row.orbits {
            columns_match = false;
            problems.push(format!(
                "type {}: computed {:?} / {} vs table {:?} / {}",
                row.group_type,
                c.element_types,
                c.orbits_string(),
                row.element_types,
                row.orbits
            ));
        }
        candidates.push(c);
    }
    let mut pairwise_non_conjugate = true;
    let mut invariants_distinguish = true;
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            let (a, b) = (&candidates[i], &candidates[j]);
            if a.element_types == b.element_types && a.orbit_lengths == b.orbit_lengths {
                invariants_distinguish = false;
            }
            if conjugating_element(&a.group, &b.group).is_some() {
                pairwise_non_conjugate = false;
                problems.push(format!("types {} and {} are conjugate", rows[i].group_type, rows[j].group_type));
            }
        }
    }
    let classified = classify_order4(n);
    let mut used = BTreeSet::new();
    let mut matches_classification = classified.len() == candidates.len();
    for (row, c) in rows.iter().zip(&candidates) {
        let hits: Vec<usize> = classified
            .iter()
            .enumerate()
            .filter(|(_, k)| {
                k.element_types == c.element_types
                    && k.orbit_lengths == c.orbit_lengths
                    && conjugating_element(&k.group, &c.group).is_some()
            })
            .map(|(i, _)| i)
            .collect();
        if hits.len() != 1 || !used.insert(hits[0]) {
            matches_classification = false;
            problems.push(format!("type {} matches {} classified groups", row.group_type, hits.len()));
        }
    }
    let cyclic = candidates.iter().filter(|c| c.shape == Shape::Cyclic).count();
    Ok(VerificationReport {
        groups: candidates.len(),
        elementary_abelian: candidates.len() - cyclic,
        cyclic,
        all_eligible,
        columns_match,
        pairwise_non_conjugate,
        invariants_distinguish,
        matches_classification,
        problems,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_types_order_eleven() {
        let t = prime_order_types(11);
        let rows: Vec<(usize, [usize; 3], usize)> = t.iter().map(|t| (t.p, t.f, t.fixed_classes)).collect();
        let expected = vec![
            (2, [1, 1, 1], 3),
            (2, [3, 3, 3], 3),
            (2, [5, 5, 5], 3),
            (2, [1, 0, 0], 1),
            (2, [3, 0, 0], 1),
            (2, [5, 0, 0], 1),
            (2, [7, 0, 0], 1),
            (2, [9, 0, 0], 1),
            (2, [11, 0, 0], 1),
            (3, [2, 2, 2], 3),
            (3, [5, 5, 5], 3),
            (3, [0, 0, 0], 0),
            (5, [1, 1, 1], 3),
            (7, [4, 4, 4], 3),
            (11, [0, 0, 0], 3),
            (11, [11, 0, 0], 3),
        ];
        assert_eq!(rows, expected);
    }

    #[test]
    fn prime_types_order_four_three_cycles() {
        let t: Vec<PrimeType> = prime_order_types(4).into_iter().filter(|t| t.p == 3 && t.fixed_classes == 3).collect();
        assert_eq!(t, vec![PrimeType { p: 3, f: [1, 1, 1], fixed_classes: 3 }]);
    }

    #[test]
    fn representatives_have_their_type() {
        for n in 1..=11 {
            for t in prime_order_types(n) {
                let g = prime_representative(&t, n);
                assert_eq!(prime_type_of(&g), Some(t), "n={n}");
                assert!(t.satisfies_constraints(n));
            }
        }
        let t1 = PrimeType { p: 2, f: [1, 1, 1], fixed_classes: 3 };
        assert_eq!(involution_representative(&t1, 11).cycle_signature().to_string(), "1^3 2^15 F=3");
        let t9 = PrimeType { p: 2, f: [11, 0, 0], fixed_classes: 1 };
        let g = involution_representative(&t9, 11);
        assert_eq!(g.cycle_signature().to_string(), "1^11 2^11 F=1");
        assert!(g.compose(&g).is_identity());
    }

    #[test]
    fn element_types_order_eleven() {
        let types = element_types(11);
        let got: Vec<String> = types.iter().map(|t| t.signature.to_string()).collect();
        let expected = [
            "1^3 2^15 F=3",
            "1^9 2^12 F=3",
            "1^15 2^9 F=3",
            "1^1 2^16 F=1",
            "1^3 2^15 F=1",
            "1^5 2^14 F=1",
            "1^7 2^13 F=1",
            "1^9 2^12 F=1",
            "1^11 2^11 F=1",
            "1^3 2^3 4^6 F=3",
            "1^5 2^2 4^6 F=3",
            "1^7 2^1 4^6 F=3",
            "1^9 4^6 F=3",
            "1^1 2^4 4^6 F=1",
            "1^3 2^3 4^6 F=1",
            "1^33 F=3",
        ];
        assert_eq!(got, expected);
    }

    #[test]
    fn order_eleven_classification_counts() {
        let c = classify_order4(11);
        let cyclic = c.iter().filter(|c| c.shape == Shape::Cyclic).count();
        assert_eq!((c.len() - cyclic, cyclic), (37, 6));
    }

    #[test]
    fn classification_agrees_with_centralizer_search() {
        for n in 2..=5 {
            let a = classify_order4(n);
            let b = order4_candidates(n, 100_000).unwrap();
            assert_eq!(a.len(), b.len(), "n={n}");
            for x in &a {
                assert_eq!(b.iter().filter(|y| conjugating_element(&x.group, &y.group).is_some()).count(), 1, "n={n}");
            }
        }
    }

    #[test]
    fn prefilter_catches_mismatched_counts() {
        // an involution fixing 1 row, 3 columns and 3 symbols
        let g = Paratopism::from_cycles(5, "(2,3)(4,5)(9,10)(14,15)").unwrap();
        let group = ParaGroup::closure(5, &[g], 4).unwrap();
        assert!(matches!(nonexistence_check(&group, None), Existence::NoSquare(_)));
    }
}
