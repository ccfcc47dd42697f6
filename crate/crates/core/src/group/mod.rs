//! The paratopy group `S_n wr S_3` acting on the `3n` points of a square.

mod conjugacy;

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iso;
use crate::square::{LatinSquare, Point, PointClass, Triple};

pub use conjugacy::{
    centralizer_generators, centralizer_order, conjugating_element, conjugating_tuple, conjugator_count,
    normalizer_order,
};

/// A permutation of the `3n` points that maps point classes to point classes.
///
/// Stored as the image of every global point id (`class * n + index`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Paratopism {
    n: usize,
    img: Vec<u16>,
}

impl fmt::Debug for Paratopism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Paratopism({})", self.to_cycle_string())
    }
}

impl Paratopism {
    pub fn identity(n: usize) -> Paratopism {
        Paratopism { n, img: (0..3 * n as u16).collect() }
    }

    pub fn order_n(&self) -> usize {
        self.n
    }

    /// `class_perm[X]` is the class that `X` is sent to; `inner[X]` maps the
    /// indices of class `X`.
    pub fn from_parts(class_perm: [PointClass; 3], inner: [Vec<u8>; 3]) -> Result<Paratopism> {
        let n = inner[0].len();
        let mut img = vec![0u16; 3 * n];
        for x in 0..3 {
            if inner[x].len() != n {
                return Err(Error::Parse("inner permutations differ in length".into()));
            }
            for (i, &j) in inner[x].iter().enumerate() {
                img[x * n + i] = (class_perm[x].index() * n + j as usize) as u16;
            }
        }
        Self::from_point_map(n, img)
    }

    /// Accepts a permutation of the `3n` points, checking that it respects the
    /// class partition.
    pub fn from_point_map(n: usize, img: Vec<u16>) -> Result<Paratopism> {
        if img.len() != 3 * n {
            return Err(Error::Parse(format!("expected {} images, found {}", 3 * n, img.len())));
        }
        let mut seen = vec![false; 3 * n];
        for &p in &img {
            let p = p as usize;
            if p >= 3 * n || seen[p] {
                return Err(Error::Parse("point map is not a permutation".into()));
            }
            seen[p] = true;
        }
        for x in 0..3 {
            let target = img[x * n] as usize / n;
            if (0..n).any(|i| img[x * n + i] as usize / n != target) {
                return Err(Error::Parse("point map splits a point class".into()));
            }
        }
        Ok(Paratopism { n, img })
    }

    /// Parses cycle notation over points `1..=3n` (rows `1..=n`, columns
    /// `n+1..=2n`, symbols `2n+1..=3n`).
    pub fn from_cycles(n: usize, text: &str) -> Result<Paratopism> {
        let mut img: Vec<u16> = (0..3 * n as u16).collect();
        for cycle in text.split(')').map(str::trim).filter(|c| !c.is_empty()) {
            let body = cycle
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("bad cycle {cycle:?}")))?;
            let pts = body
                .split(',')
                .map(|t| {
                    let v: usize = t.trim().parse().map_err(|_| Error::Parse(format!("bad point {t:?}")))?;
                    if v == 0 || v > 3 * n {
                        return Err(Error::Parse(format!("point {v} out of range")));
                    }
                    Ok(v - 1)
                })
                .collect::<Result<Vec<usize>>>()?;
            for k in 0..pts.len() {
                img[pts[k]] = pts[(k + 1) % pts.len()] as u16;
            }
        }
        Self::from_point_map(n, img)
    }

    pub fn to_cycle_string(&self) -> String {
        let mut out = String::new();
        let mut seen = vec![false; self.img.len()];
        for s in 0..self.img.len() {
            if seen[s] || self.img[s] as usize == s {
                continue;
            }
            let mut cyc = Vec::new();
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                cyc.push((x + 1).to_string());
                x = self.img[x] as usize;
            }
            out.push('(');
            out.push_str(&cyc.join(","));
            out.push(')');
        }
        if out.is_empty() {
            out.push_str("()");
        }
        out
    }

    pub fn point_map(&self) -> &[u16] {
        &self.img
    }

    pub fn image(&self, point: usize) -> usize {
        self.img[point] as usize
    }

    pub fn apply_point(&self, p: Point) -> Point {
        Point::from_id(self.image(p.id(self.n)), self.n)
    }

    pub fn class_perm(&self) -> [PointClass; 3] {
        let n = self.n;
        [0, 1, 2].map(|x| PointClass::from_index(self.img[x * n] as usize / n))
    }

    /// The index permutation applied to points of class `from`.
    pub fn inner(&self, from: PointClass) -> Vec<u8> {
        let n = self.n;
        let x = from.index();
        (0..n).map(|i| (self.img[x * n + i] as usize % n) as u8).collect()
    }

    /// Number of classes mapped to themselves.
    pub fn fixed_classes(&self) -> usize {
        self.class_perm().iter().enumerate().filter(|(i, c)| c.index() == *i).count()
    }

    pub fn is_identity(&self) -> bool {
        self.img.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    /// Class-preserving, i.e. an isotopism.
    pub fn is_isotopism(&self) -> bool {
        self.fixed_classes() == 3
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Paratopism) -> Paratopism {
        assert_eq!(self.n, other.n);
        Paratopism { n: self.n, img: other.img.iter().map(|&x| self.img[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Paratopism {
        let mut img = vec![0u16; self.img.len()];
        for (i, &x) in self.img.iter().enumerate() {
            img[x as usize] = i as u16;
        }
        Paratopism { n: self.n, img }
    }

    pub fn pow(&self, k: usize) -> Paratopism {
        let mut r = Paratopism::identity(self.n);
        for _ in 0..k {
            r = self.compose(&r);
        }
        r
    }

    /// `self · g · self⁻¹`.
    pub fn conjugate(&self, g: &Paratopism) -> Paratopism {
        self.compose(g).compose(&self.inverse())
    }

    pub fn element_order(&self) -> usize {
        let lengths = self.cycle_lengths();
        lengths.iter().fold(1, |acc, &l| num_integer::lcm(acc, l))
    }

    fn cycle_lengths(&self) -> Vec<usize> {
        let mut seen = vec![false; self.img.len()];
        let mut out = Vec::new();
        for s in 0..self.img.len() {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut x = s;
            while !seen[x] {
                seen[x] = true;
                x = self.img[x] as usize;
                len += 1;
            }
            out.push(len);
        }
        out
    }

    pub fn apply_triple(&self, t: Triple) -> Triple {
        let n = self.n;
        let ids = t.point_ids(n);
        let pts = ids.map(|p| Point::from_id(self.image(p), n));
        Triple::from_points(pts).expect("paratopisms keep one point per class")
    }

    pub fn apply(&self, l: &LatinSquare) -> LatinSquare {
        let n = l.order();
        assert_eq!(n, self.n);
        let mut cells = vec![0u8; n * n];
        for t in l.triples() {
            let u = self.apply_triple(t);
            cells[u.row as usize * n + u.col as usize] = u.sym;
        }
        LatinSquare::from_cells_unchecked(n, cells)
    }

    pub fn cycle_signature(&self) -> CycleSignature {
        let mut cycles = BTreeMap::new();
        for l in self.cycle_lengths() {
            *cycles.entry(l).or_insert(0) += 1;
        }
        CycleSignature { cycles, fixed_classes: self.fixed_classes() }
    }

    /// Number of fixed points in each class.
    pub fn fixed_counts(&self) -> [usize; 3] {
        let n = self.n;
        [0, 1, 2].map(|x| (0..n).filter(|&i| self.img[x * n + i] as usize == x * n + i).count())
    }

    /// A complete invariant of the conjugacy class of `self` in the paratopy
    /// group.
    pub fn conjugacy_key(&self) -> ConjugacyKey {
        let cp = self.class_perm().map(|c| c.index());
        let fixed: Vec<usize> = (0..3).filter(|&x| cp[x] == x).collect();
        let n = self.n;
        let restricted_type = |g: &Paratopism, x: usize| -> Vec<usize> {
            let mut seen = vec![false; n];
            let mut out = Vec::new();
            for s in 0..n {
                if seen[s] {
                    continue;
                }
                let mut len = 0;
                let mut i = s;
                while !seen[i] {
                    seen[i] = true;
                    i = g.img[x * n + i] as usize - x * n;
                    len += 1;
                }
                out.push(len);
            }
            out.sort_unstable_by(|a, b| b.cmp(a));
            out
        };
        match fixed.len() {
            3 => {
                let mut parts: Vec<Vec<usize>> = (0..3).map(|x| restricted_type(self, x)).collect();
                parts.sort();
                ConjugacyKey { class_shape: 3, parts }
            }
            1 => {
                let z = fixed[0];
                let x = (0..3).find(|&x| x != z).unwrap();
                let sq = self.compose(self);
                ConjugacyKey { class_shape: 1, parts: vec![restricted_type(self, z), restricted_type(&sq, x)] }
            }
            _ => {
                let cube = self.compose(self).compose(self);
                ConjugacyKey { class_shape: 0, parts: vec![restricted_type(&cube, 0)] }
            }
        }
    }
}

/// Conjugacy class data: number of fixed classes plus the relevant cycle
/// types (per fixed class, and of the return map on a moved class).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConjugacyKey {
    pub class_shape: usize,
    pub parts: Vec<Vec<usize>>,
}

impl fmt::Display for Paratopism {
    /// Text format: class map line, then one image line per source class.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cp = self.class_perm();
        let map: Vec<String> = PointClass::ALL
            .iter()
            .map(|c| format!("{}->{}", c.letter(), cp[c.index()].letter()))
            .collect();
        writeln!(f, "{}", map.join(" "))?;
        for c in PointClass::ALL {
            let line: Vec<String> = self.inner(c).iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Parses one paratopism in the text format written by `Display`.
pub fn parse_paratopism(text: &str) -> Result<Paratopism> {
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    if lines.len() != 4 {
        return Err(Error::Parse(format!("expected 4 lines, found {}", lines.len())));
    }
    let mut class_perm = [PointClass::Row; 3];
    let mut seen = [false; 3];
    for tok in lines[0].split_whitespace() {
        let (a, b) = tok.split_once("->").ok_or_else(|| Error::Parse(format!("bad class map {tok:?}")))?;
        let from = a.chars().next().and_then(PointClass::from_letter);
        let to = b.chars().next().and_then(PointClass::from_letter);
        let (Some(from), Some(to)) = (from, to) else {
            return Err(Error::Parse(format!("bad class map {tok:?}")));
        };
        class_perm[from.index()] = to;
        seen[from.index()] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Parse("class map must mention R, C and S".into()));
    }
    let mut inner: [Vec<u8>; 3] = Default::default();
    for x in 0..3 {
        inner[x] = lines[x + 1]
            .split_whitespace()
            .map(|t| t.parse::<u8>().map_err(|_| Error::Parse(format!("bad index {t:?}"))))
            .collect::<Result<_>>()?;
    }
    Paratopism::from_parts(class_perm, inner)
}

/// Parses a group file: paratopisms separated by blank lines.
pub fn parse_paratopisms(text: &str) -> Result<Vec<Paratopism>> {
    let mut out = Vec::new();
    let mut block = String::new();
    for line in text.lines().chain(std::iter::once("")) {
        if line.trim().starts_with('#') {
            continue;
        }
        if line.trim().is_empty() {
            if !block.trim().is_empty() {
                out.push(parse_paratopism(&block)?);
            }
            block.clear();
        } else {
            block.push_str(line);
            block.push('\n');
        }
    }
    Ok(out)
}

/// Cycle lengths over all `3n` points plus the number of fixed classes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycleSignature {
    pub cycles: BTreeMap<usize, usize>,
    pub fixed_classes: usize,
}

impl CycleSignature {
    /// Parses `1^3 2^15` style cycle notation.
    pub fn parse(cycles: &str, fixed_classes: usize) -> Result<CycleSignature> {
        let mut map = BTreeMap::new();
        for tok in cycles.split_whitespace() {
            let (l, c) = tok.split_once('^').unwrap_or((tok, "1"));
            let l: usize = l.parse().map_err(|_| Error::Parse(format!("bad cycle length {tok:?}")))?;
            let c: usize = c.parse().map_err(|_| Error::Parse(format!("bad multiplicity {tok:?}")))?;
            *map.entry(l).or_insert(0) += c;
        }
        Ok(CycleSignature { cycles: map, fixed_classes })
    }

    pub fn cycles_string(&self) -> String {
        let parts: Vec<String> = self.cycles.iter().map(|(l, c)| format!("{l}^{c}")).collect();
        parts.join(" ")
    }
}

impl fmt::Display for CycleSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} F={}", self.cycles_string(), self.fixed_classes)
    }
}

/// A finite subgroup given by its complete list of elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParaGroup {
    n: usize,
    elements: Vec<Paratopism>,
}

impl ParaGroup {
    pub fn trivial(n: usize) -> ParaGroup {
        ParaGroup { n, elements: vec![Paratopism::identity(n)] }
    }

    /// The subgroup generated by `generators`, failing once it grows past
    /// `cap` elements. Elements are sorted, so equal groups compare equal.
    pub fn closure(n: usize, generators: &[Paratopism], cap: usize) -> Result<ParaGroup> {
        let id = Paratopism::identity(n);
        let mut seen: HashSet<Paratopism> = HashSet::new();
        seen.insert(id.clone());
        let mut elements = vec![id];
        let mut i = 0;
        while i < elements.len() {
            for g in generators {
                let h = g.compose(&elements[i]);
                if seen.insert(h.clone()) {
                    if elements.len() >= cap {
                        return Err(Error::CapExceeded(cap));
                    }
                    elements.push(h);
                }
            }
            i += 1;
        }
        elements.sort();
        Ok(ParaGroup { n, elements })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Paratopism] {
        &self.elements
    }

    pub fn contains(&self, g: &Paratopism) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    pub fn conjugate_by(&self, g: &Paratopism) -> ParaGroup {
        let mut elements: Vec<Paratopism> = self.elements.iter().map(|h| g.conjugate(h)).collect();
        elements.sort();
        ParaGroup { n: self.n, elements }
    }

    /// A generating set of at most two elements when one exists among the
    /// elements, otherwise all non-identity elements.
    pub fn small_generating_set(&self) -> Vec<Paratopism> {
        let nonid: Vec<&Paratopism> = self.elements.iter().filter(|g| !g.is_identity()).collect();
        if nonid.is_empty() {
            return Vec::new();
        }
        let target = self.order();
        for g in &nonid {
            if g.element_order() == target {
                return vec![(*g).clone()];
            }
        }
        for (i, a) in nonid.iter().enumerate() {
            for b in &nonid[i + 1..] {
                let pair = [(*a).clone(), (*b).clone()];
                if ParaGroup::closure(self.n, &pair, target).is_ok_and(|h| h.order() == target) {
                    return pair.to_vec();
                }
            }
        }
        nonid.into_iter().cloned().collect()
    }

    /// Orbits of the group on the `3n` points, each sorted, in order of
    /// smallest member.
    pub fn point_orbits(&self) -> Vec<Vec<usize>> {
        let m = 3 * self.n;
        let mut seen = vec![false; m];
        let mut out = Vec::new();
        for p in 0..m {
            if seen[p] {
                continue;
            }
            let mut orbit: Vec<usize> = self.elements.iter().map(|g| g.image(p)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            for &q in &orbit {
                seen[q] = true;
            }
            out.push(orbit);
        }
        out
    }

    /// Orbit lengths as a `length -> count` map.
    pub fn orbit_lengths(&self) -> BTreeMap<usize, usize> {
        let mut out = BTreeMap::new();
        for o in self.point_orbits() {
            *out.entry(o.len()).or_insert(0) += 1;
        }
        out
    }

    pub fn stabilizes(&self, l: &LatinSquare) -> bool {
        self.elements.iter().all(|g| &g.apply(l) == l)
    }
}

/// Stabilizer of a square: generators and exact order.
#[derive(Clone, Debug)]
pub struct Stabilizer {
    pub generators: Vec<Paratopism>,
    pub order: BigUint,
}

impl Stabilizer {
    pub fn closure(&self, n: usize, cap: usize) -> Result<ParaGroup> {
        ParaGroup::closure(n, &self.generators, cap)
    }

    pub fn order_u64(&self) -> u64 {
        self.order.iter_u64_digits().next().unwrap_or(0)
    }
}

fn stabilizer(l: &LatinSquare, mode: iso::Mode) -> Stabilizer {
    let form = iso::canonical_form(l, mode);
    Stabilizer { generators: form.generators, order: form.group_order }
}

/// The autoparatopy group of `l`.
pub fn autoparatopy_group(l: &LatinSquare) -> Stabilizer {
    stabilizer(l, iso::Mode::Paratopy)
}

/// The autotopy group of `l`: autoparatopisms fixing every class.
pub fn autotopy_group(l: &LatinSquare) -> Stabilizer {
    stabilizer(l, iso::Mode::Isotopy)
}

/// Order of the whole paratopy group, `6 (n!)^3`.
pub fn gamma_order(n: usize) -> BigUint {
    let f = crate::factorial(n);
    BigUint::from(6u32) * &f * &f * &f
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut p: Vec<u8> = (0..n as u8).collect();
    loop {
        out.push(p.clone());
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
    }
    out
}

/// Every element of the paratopy group. Only sensible for `n ≤ 4`.
pub fn all_paratopisms(n: usize) -> Vec<Paratopism> {
    let perms = permutations(n);
    let class_perms: Vec<[PointClass; 3]> = permutations(3)
        .into_iter()
        .map(|p| [0, 1, 2].map(|i| PointClass::from_index(p[i] as usize)))
        .collect();
    let mut out = Vec::with_capacity(6 * perms.len().pow(3));
    for cp in &class_perms {
        for a in &perms {
            for b in &perms {
                for c in &perms {
                    out.push(Paratopism::from_parts(*cp, [a.clone(), b.clone(), c.clone()]).unwrap());
                }
            }
        }
    }
    out
}

/// Group order as a product over a list of factors, for closed forms.
pub fn product(factors: &[BigUint]) -> BigUint {
    factors.iter().fold(BigUint::one(), |acc, f| acc * f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn swap_rc(n: usize) -> Paratopism {
        let id: Vec<u8> = (0..n as u8).collect();
        Paratopism::from_parts([PointClass::Col, PointClass::Row, PointClass::Sym], [id.clone(), id.clone(), id])
            .unwrap()
    }

    #[test]
    fn group_axioms() {
        let g = Paratopism::from_cycles(3, "(1,4,7)(2,5,8)(3,6,9)").unwrap();
        assert_eq!(g.compose(&g.inverse()), Paratopism::identity(3));
        let l = LatinSquare::cyclic(3);
        assert_eq!(Paratopism::identity(3).apply(&l), l);
        assert_eq!(g.element_order(), 3);
        assert_eq!(g.fixed_classes(), 0);
    }

    #[test]
    fn text_formats_round_trip() {
        let g = Paratopism::from_cycles(3, "(1,4)(2,5)(3,6)(7,8)").unwrap();
        assert_eq!(parse_paratopism(&g.to_string()).unwrap(), g);
        assert_eq!(Paratopism::from_cycles(3, &g.to_cycle_string()).unwrap(), g);
        let two = format!("{}\n{}", g, swap_rc(3));
        assert_eq!(parse_paratopisms(&two).unwrap(), vec![g, swap_rc(3)]);
    }

    #[test]
    fn rejects_class_splitting_maps() {
        assert!(Paratopism::from_cycles(2, "(1,3)").is_err());
    }

    #[test]
    fn closure_orders() {
        assert_eq!(ParaGroup::closure(4, &[Paratopism::identity(4)], 10).unwrap().order(), 1);
        let step = |k: usize| -> Vec<u8> { (0..11).map(|i| ((i + k) % 11) as u8).collect() };
        let rot = Paratopism::from_parts(PointClass::ALL, [step(1), step(1), step(2)]).unwrap();
        let g = ParaGroup::closure(11, std::slice::from_ref(&rot), 100).unwrap();
        assert_eq!(g.order(), 11);
        assert!(g.stabilizes(&LatinSquare::cyclic(11)));
        assert!(matches!(ParaGroup::closure(11, &[rot], 5), Err(Error::CapExceeded(5))));
    }

    #[test]
    fn signature_of_identity() {
        let s = Paratopism::identity(11).cycle_signature();
        assert_eq!(s.cycles_string(), "1^33");
        assert_eq!(s.fixed_classes, 3);
        assert_eq!(swap_rc(11).cycle_signature().to_string(), "1^11 2^11 F=1");
    }

    #[test]
    fn cyclic_stabilizers() {
        let s3 = autoparatopy_group(&LatinSquare::cyclic(3));
        assert_eq!(s3.order, BigUint::from(108u32));
        assert_eq!(autotopy_group(&LatinSquare::cyclic(3)).order, BigUint::from(18u32));
        let g = s3.closure(3, 1000).unwrap();
        assert_eq!(g.order(), 108);
        assert!(g.stabilizes(&LatinSquare::cyclic(3)));
    }

    #[test]
    fn brute_force_stabilizer_order_three() {
        let l = LatinSquare::cyclic(3);
        let all = all_paratopisms(3);
        assert_eq!(all.len(), 1296);
        let par = all.iter().filter(|g| g.apply(&l) == l).count();
        let is = all.iter().filter(|g| g.is_isotopism() && g.apply(&l) == l).count();
        assert_eq!((par, is), (108, 18));
    }

    #[test]
    fn conjugacy_key_is_class_invariant() {
        let all = all_paratopisms(3);
        let g = Paratopism::from_cycles(3, "(1,4)(2,6)(3,5)(7,8)").unwrap();
        let key = g.conjugacy_key();
        for h in all.iter().step_by(37) {
            assert_eq!(h.conjugate(&g).conjugacy_key(), key);
            assert_eq!(h.conjugate(&g).cycle_signature(), g.cycle_signature());
        }
    }
}
