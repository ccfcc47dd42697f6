//! Isomorphism invariants of Latin squares via their incidence graphs.
//!
//! The incidence graph has one vertex per point (ids `0..3n`, in the global
//! point numbering) and one vertex per triple, joined to its three points.
//! Points of the same class never share a triple, so every automorphism
//! maps classes to classes and restricts to a paratopism.

use num_bigint::BigUint;

use crate::canon::{canonize, ColoredGraph};
use crate::group::Paratopism;
use crate::square::{LatinSquare, Point, PointClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Classes may be permuted.
    Paratopy,
    /// Classes are kept in place.
    Isotopy,
}

/// Lookup tables giving the third point of the triple through any two.
pub struct Completion {
    n: usize,
    rc: Vec<u8>,
    rs: Vec<u8>,
    cs: Vec<u8>,
}

impl Completion {
    pub fn new(l: &LatinSquare) -> Completion {
        let n = l.order();
        let mut rc = vec![0u8; n * n];
        let mut rs = vec![0u8; n * n];
        let mut cs = vec![0u8; n * n];
        for t in l.triples() {
            let (r, c, s) = (t.row as usize, t.col as usize, t.sym as usize);
            rc[r * n + c] = t.sym;
            rs[r * n + s] = t.col;
            cs[c * n + s] = t.row;
        }
        Completion { n, rc, rs, cs }
    }

    /// Index of the point of class `z` on the triple through `(x, a)` and `(y, b)`.
    pub fn third(&self, x: usize, a: usize, y: usize, b: usize) -> usize {
        let n = self.n;
        match (x, y) {
            (0, 1) => self.rc[a * n + b] as usize,
            (1, 0) => self.rc[b * n + a] as usize,
            (0, 2) => self.rs[a * n + b] as usize,
            (2, 0) => self.rs[b * n + a] as usize,
            (1, 2) => self.cs[a * n + b] as usize,
            (2, 1) => self.cs[b * n + a] as usize,
            _ => panic!("points must come from different classes"),
        }
    }

    /// Cycle type (descending) of the permutation of class `x+1` induced by
    /// two points `a`, `b` of class `x`.
    pub fn pair_cycle_type(&self, x: usize, a: usize, b: usize) -> Vec<u8> {
        let n = self.n;
        let y = (x + 1) % 3;
        let z = (x + 2) % 3;
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0u8;
            let mut j = s;
            while !seen[j] {
                seen[j] = true;
                let w = self.third(x, a, y, j);
                j = self.third(x, b, z, w);
                len += 1;
            }
            out.push(len);
        }
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }
}

/// A paratopy-invariant color for every point: points are ranked by the
/// sorted list of cycle types they form with the other points of their
/// class.
pub fn point_invariants(l: &LatinSquare) -> Vec<u32> {
    let n = l.order();
    let comp = Completion::new(l);
    let mut inv: Vec<Vec<Vec<u8>>> = Vec::with_capacity(3 * n);
    for x in 0..3 {
        for a in 0..n {
            let mut v: Vec<Vec<u8>> = (0..n).filter(|&b| b != a).map(|b| comp.pair_cycle_type(x, a, b)).collect();
            v.sort();
            inv.push(v);
        }
    }
    let mut distinct = inv.clone();
    distinct.sort();
    distinct.dedup();
    inv.iter().map(|v| distinct.binary_search(v).unwrap() as u32).collect()
}

/// Incidence graph of `l` with point colors refined by `point_invariants`
/// (and by class in isotopy mode).
pub fn latin_graph(l: &LatinSquare, mode: Mode) -> ColoredGraph {
    let n = l.order();
    let inv = point_invariants(l);
    let mut g = ColoredGraph::new(3 * n + n * n);
    let k = inv.iter().max().copied().unwrap_or(0) + 1;
    for p in 0..3 * n {
        let c = match mode {
            Mode::Paratopy => inv[p],
            Mode::Isotopy => (p / n) as u32 * k + inv[p],
        };
        g.set_color(p as u32, c);
    }
    for (i, t) in l.triples().into_iter().enumerate() {
        let v = (3 * n + i) as u32;
        g.set_color(v, u32::MAX);
        for p in t.point_ids(n) {
            g.add_edge(v, p as u32);
        }
    }
    g
}

/// Canonical data of a square under paratopy or isotopy.
#[derive(Clone, Debug)]
pub struct LatinForm {
    /// Compact certificate: point colors in label order, then the relabeled
    /// triples sorted.
    pub certificate: Vec<u64>,
    /// `labeling[p]` is the canonical label of point `p`.
    pub labeling: Vec<u32>,
    pub generators: Vec<Paratopism>,
    pub group_order: BigUint,
}

pub fn canonical_form(l: &LatinSquare, mode: Mode) -> LatinForm {
    let n = l.order();
    let g = latin_graph(l, mode);
    let c = canonize(&g);
    let points = 3 * n;
    let labeling: Vec<u32> = c.labeling[..points].to_vec();
    let mut cert: Vec<u64> = vec![0; points];
    for p in 0..points {
        cert[labeling[p] as usize] = g.color(p as u32) as u64;
    }
    let mut rows: Vec<u64> = l
        .triples()
        .iter()
        .map(|t| {
            let mut ls = t.point_ids(n).map(|p| labeling[p] as u64);
            ls.sort_unstable();
            (ls[0] << 32) | (ls[1] << 16) | ls[2]
        })
        .collect();
    rows.sort_unstable();
    cert.extend(rows);
    let generators = c
        .generators
        .iter()
        .map(|gen| {
            let img: Vec<u16> = gen[..points].iter().map(|&x| x as u16).collect();
            Paratopism::from_point_map(n, img).expect("incidence automorphisms respect classes")
        })
        .collect();
    LatinForm { certificate: cert, labeling, generators, group_order: c.group_order }
}

/// Paratopy certificate: equal iff the squares lie in the same main class.
pub fn certificate(l: &LatinSquare) -> Vec<u64> {
    canonical_form(l, Mode::Paratopy).certificate
}

/// Isotopy certificate: equal iff the squares are isotopic.
pub fn isotopy_certificate(l: &LatinSquare) -> Vec<u64> {
    canonical_form(l, Mode::Isotopy).certificate
}

/// Cycle types of all pairs of points of one class.
pub fn same_class_pair_types(l: &LatinSquare, class: PointClass) -> Vec<Vec<u8>> {
    let n = l.order();
    let comp = Completion::new(l);
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            out.push(comp.pair_cycle_type(class.index(), a, b));
        }
    }
    out
}

/// The point in class `class` at index `i`, as a global vertex id.
pub fn vertex(n: usize, class: PointClass, i: usize) -> usize {
    Point::new(class, i as u8).id(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::all_paratopisms;

    #[test]
    fn certificate_is_invariant() {
        let l = LatinSquare::from_array(&[[0u8, 1, 2, 3], [1, 0, 3, 2], [2, 3, 1, 0], [3, 2, 0, 1]]).unwrap();
        let c = certificate(&l);
        for g in all_paratopisms(4).iter().step_by(997) {
            assert_eq!(certificate(&g.apply(&l)), c);
        }
    }

    #[test]
    fn two_classes_at_order_four() {
        let z4 = LatinSquare::cyclic(4);
        let klein = LatinSquare::from_array(&[[0u8, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]]).unwrap();
        assert_ne!(certificate(&z4), certificate(&klein));
    }

    #[test]
    fn group_table_conjugates_are_isotopic() {
        let l = LatinSquare::cyclic(5);
        let t = crate::group::Paratopism::from_parts(
            [PointClass::Row, PointClass::Sym, PointClass::Col],
            [vec![0, 1, 2, 3, 4], vec![0, 1, 2, 3, 4], vec![0, 1, 2, 3, 4]],
        )
        .unwrap();
        assert_eq!(certificate(&t.apply(&l)), certificate(&l));
        assert_eq!(isotopy_certificate(&t.apply(&l)), isotopy_certificate(&l));
    }

    #[test]
    fn pair_cycle_types_agree_across_directions() {
        let l = LatinSquare::from_array(&[[0u8, 1, 2, 3, 4], [1, 2, 4, 0, 3], [2, 4, 3, 1, 0], [3, 0, 1, 4, 2], [4, 3, 0, 2, 1]]).unwrap();
        let comp = Completion::new(&l);
        // rows 0 and 1 as a permutation of columns, computed directly
        let mut direct = Vec::new();
        let mut seen = [false; 5];
        for s in 0..5 {
            let mut len = 0;
            let mut c = s;
            while !seen[c] {
                seen[c] = true;
                let sym = l.at(0, c);
                c = (0..5).find(|&c2| l.at(1, c2) == sym).unwrap();
                len += 1;
            }
            if len > 0 {
                direct.push(len as u8);
            }
        }
        direct.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(comp.pair_cycle_type(0, 0, 1), direct);
    }
}
