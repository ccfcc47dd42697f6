//! One-factorizations of `K_{n,n}` invariant under an involution.
//!
//! A Latin square is a one-factorization of the complete bipartite graph on
//! rows and columns together with a labeling of its one-factors by symbols.
//! If an involution `π` fixes the symbol class setwise, the squares it
//! stabilizes correspond to one-factorizations invariant under its
//! restriction `δ` to rows and columns whose factor orbits have the same
//! lengths as the cycles of `π` on symbols, times the `a1! a2! 2^a2` ways
//! to attach the labels.
//!
//! `LF(δ, a, G)` is the number of one-factorizations of `G` invariant under
//! `δ` with `a1` fixed factors and `a2` swapped pairs. It is accumulated
//! stage by stage over orbits of pairs `(G, δ)` under the group `Φ` of
//! permutations of rows and columns that preserve the bipartition: adding
//! one factor orbit `F` to a stored `H` contributes
//! `|Φ_(H∪F,δ)| / |Φ_(H,δ)| · LF(H)` to the orbit of `H ∪ F`, and the total
//! at the end of the stage is `a_i · LF(G)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::canon::{canonize, ColoredGraph};
use crate::error::{Error, Result};
use crate::factorial;
use crate::group::Paratopism;
use crate::square::PointClass;

/// A spanning subgraph of `K_{n,n}`: bit `c` of `rows[r]` is the edge
/// `r_r c_c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BipGraph {
    n: usize,
    rows: Vec<u32>,
}

impl BipGraph {
    pub fn empty(n: usize) -> BipGraph {
        assert!(n <= 32, "order above 32");
        BipGraph { n, rows: vec![0; n] }
    }

    pub fn complete(n: usize) -> BipGraph {
        let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        BipGraph { n, rows: vec![full; n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, r: usize, c: usize) -> bool {
        self.rows[r] >> c & 1 == 1
    }

    pub fn add_edge(&mut self, r: usize, c: usize) {
        self.rows[r] |= 1 << c;
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn complement(&self) -> BipGraph {
        let full = BipGraph::complete(self.n);
        BipGraph { n: self.n, rows: self.rows.iter().zip(&full.rows).map(|(a, f)| f & !a).collect() }
    }

    pub fn union(&self, other: &BipGraph) -> BipGraph {
        BipGraph { n: self.n, rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a | b).collect() }
    }

    pub fn minus(&self, other: &BipGraph) -> BipGraph {
        BipGraph { n: self.n, rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a & !b).collect() }
    }

    /// The common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let n = self.n;
        let d = self.rows.first().map(|r| r.count_ones() as usize).unwrap_or(0);
        let rows_ok = self.rows.iter().all(|r| r.count_ones() as usize == d);
        let cols_ok = (0..n).all(|c| (0..n).filter(|&r| self.has_edge(r, c)).count() == d);
        (rows_ok && cols_ok).then_some(d)
    }

    fn to_hex(&self) -> String {
        self.rows.iter().map(|r| format!("{r:08x}")).collect()
    }

    fn from_hex(n: usize, s: &str) -> Result<BipGraph> {
        if s.len() != 8 * n {
            return Err(Error::Parse(format!("graph hex of length {}", s.len())));
        }
        let rows = (0..n)
            .map(|i| u32::from_str_radix(&s[8 * i..8 * i + 8], 16).map_err(|_| Error::Parse("graph hex".into())))
            .collect::<Result<_>>()?;
        Ok(BipGraph { n, rows })
    }
}

/// An involution of the `2n` vertices preserving the bipartition: vertex
/// `i < n` is row `i`, vertex `n + j` is column `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Delta {
    n: usize,
    map: Vec<u8>,
}

impl Delta {
    pub fn identity(n: usize) -> Delta {
        Delta { n, map: (0..2 * n as u8).collect() }
    }

    pub fn new(n: usize, map: Vec<u8>) -> Result<Delta> {
        if map.len() != 2 * n || (0..2 * n).any(|v| map[map[v] as usize] as usize != v) {
            return Err(Error::Inconsistent("not an involution".into()));
        }
        let swaps = map[0] as usize >= n;
        for v in 0..2 * n {
            if ((map[v] as usize >= n) != (v >= n)) != swaps {
                return Err(Error::Inconsistent("does not preserve the bipartition".into()));
            }
        }
        Ok(Delta { n, map })
    }

    /// Restriction to rows and columns of an involution fixing the symbol
    /// class setwise, with the cycle counts `(a1, a2)` on symbols.
    pub fn from_paratopism(g: &Paratopism) -> Result<(Delta, AVec)> {
        let n = g.order_n();
        if !g.pow(2).is_identity() {
            return Err(Error::Unsupported("needs an element of order at most 2".into()));
        }
        if g.class_perm()[2] != PointClass::Sym {
            return Err(Error::Unsupported("the symbol class must be fixed setwise".into()));
        }
        let map: Vec<u8> = (0..2 * n).map(|p| g.image(p) as u8).collect();
        let a1 = (0..n).filter(|&s| g.image(2 * n + s) == 2 * n + s).count();
        Ok((Delta::new(n, map)?, AVec { a1, a2: (n - a1) / 2 }))
    }

    pub fn swaps_sides(&self) -> bool {
        self.map[0] as usize >= self.n
    }

    pub fn image(&self, v: usize) -> usize {
        self.map[v] as usize
    }

    /// Image of the edge `(r, c)` as a (row, column) pair.
    pub fn edge_image(&self, r: usize, c: usize) -> (usize, usize) {
        let n = self.n;
        let (x, y) = (self.image(r), self.image(n + c));
        if x < n {
            (x, y - n)
        } else {
            (y, x - n)
        }
    }

    fn to_hex(&self) -> String {
        self.map.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn from_hex(n: usize, s: &str) -> Result<Delta> {
        if s.len() != 4 * n {
            return Err(Error::Parse("delta hex".into()));
        }
        let map = (0..2 * n)
            .map(|i| u8::from_str_radix(&s[2 * i..2 * i + 2], 16).map_err(|_| Error::Parse("delta hex".into())))
            .collect::<Result<_>>()?;
        Delta::new(n, map)
    }
}

/// Numbers of factor orbits of length 1 and 2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AVec {
    pub a1: usize,
    pub a2: usize,
}

impl AVec {
    pub fn get(&self, i: usize) -> usize {
        if i == 1 {
            self.a1
        } else {
            self.a2
        }
    }

    pub fn plus(&self, i: usize) -> AVec {
        if i == 1 {
            AVec { a1: self.a1 + 1, a2: self.a2 }
        } else {
            AVec { a1: self.a1, a2: self.a2 + 1 }
        }
    }

    /// Degree of a graph with these factor orbits.
    pub fn degree(&self) -> usize {
        self.a1 + 2 * self.a2
    }
}

impl fmt::Display for AVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a1, self.a2)
    }
}

/// Canonical representative of a `Φ`-orbit of pairs `(G, δ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairKey {
    pub graph: BipGraph,
    pub delta: Delta,
}

impl PairKey {
    pub fn to_hex(&self) -> String {
        format!("{}:{}", self.graph.to_hex(), self.delta.to_hex())
    }

    pub fn from_hex(n: usize, s: &str) -> Result<PairKey> {
        let (g, d) = s.split_once(':').ok_or_else(|| Error::Parse("pair key".into()))?;
        Ok(PairKey { graph: BipGraph::from_hex(n, g)?, delta: Delta::from_hex(n, d)? })
    }
}

const FIXED: u32 = 0;
const MOVED: u32 = 1;
const PAIR2: u32 = 2;
const HUB: u32 = 3;

/// Canonical representative of the orbit of `(g, δ)` and the order of its
/// stabilizer in `Φ`.
pub fn canonical_pair(g: &BipGraph, delta: &Delta) -> (PairKey, BigUint) {
    let n = g.n;
    let mut cg = ColoredGraph::new(2 * n);
    for v in 0..2 * n {
        cg.set_color(v as u32, if delta.image(v) == v { FIXED } else { MOVED });
    }
    for r in 0..n {
        for c in 0..n {
            if g.has_edge(r, c) {
                cg.add_edge(r as u32, (n + c) as u32);
            }
        }
    }
    for v in 0..2 * n {
        let w = delta.image(v);
        if v < w {
            let a = cg.add_vertex(PAIR2);
            cg.add_edge(a, v as u32);
            cg.add_edge(a, w as u32);
        }
    }
    for side in 0..2 {
        let h = cg.add_vertex(HUB);
        for i in 0..n {
            cg.add_edge(h, (side * n + i) as u32);
        }
    }
    let canon = canonize(&cg);
    let label = &canon.labeling;
    // the side holding the vertex labeled 0 becomes the rows
    let first = (0..2 * n).min_by_key(|&v| label[v]).unwrap();
    let row_side = first / n;
    let mut new_index = vec![0usize; 2 * n];
    for side in 0..2 {
        let mut vs: Vec<usize> = (side * n..(side + 1) * n).collect();
        vs.sort_by_key(|&v| label[v]);
        let offset = if side == row_side { 0 } else { n };
        for (k, v) in vs.into_iter().enumerate() {
            new_index[v] = offset + k;
        }
    }
    let mut graph = BipGraph::empty(n);
    for r in 0..n {
        for c in 0..n {
            if g.has_edge(r, c) {
                let (x, y) = (new_index[r], new_index[n + c]);
                let (x, y) = if x < n { (x, y - n) } else { (y, x - n) };
                graph.add_edge(x, y);
            }
        }
    }
    let mut map = vec![0u8; 2 * n];
    for v in 0..2 * n {
        map[new_index[v]] = new_index[delta.image(v)] as u8;
    }
    (PairKey { graph, delta: Delta { n, map } }, canon.group_order)
}

/// A one-factor as the column matched to each row.
pub type Matching = Vec<u8>;

fn matching_graph(n: usize, m: &[u8]) -> BipGraph {
    let mut g = BipGraph::empty(n);
    for (r, &c) in m.iter().enumerate() {
        g.add_edge(r, c as usize);
    }
    g
}

fn delta_matching(delta: &Delta, m: &[u8]) -> Matching {
    let mut out = vec![0u8; m.len()];
    for (r, &c) in m.iter().enumerate() {
        let (x, y) = delta.edge_image(r, c as usize);
        out[x] = y as u8;
    }
    out
}

/// Factor orbits of length `i` inside `g`: for `i = 1` the one-factors
/// fixed by `δ`, for `i = 2` the pairs `{M, δM}` of disjoint one-factors.
/// Each orbit is returned as the union of its one-factors.
pub fn factor_orbits(g: &BipGraph, delta: &Delta, i: usize) -> Vec<BipGraph> {
    let n = g.n;
    let mut out = Vec::new();
    let mut m = vec![u8::MAX; n];
    let mut col_used = 0u32;
    fn rec(
        g: &BipGraph,
        delta: &Delta,
        i: usize,
        m: &mut Vec<u8>,
        col_used: &mut u32,
        out: &mut Vec<BipGraph>,
    ) {
        let n = g.n;
        let Some(r) = (0..n).find(|&r| m[r] == u8::MAX) else {
            let dm = delta_matching(delta, m);
            if i == 1 || *m < dm {
                let mut f = matching_graph(n, m);
                if i == 2 {
                    f = f.union(&matching_graph(n, &dm));
                }
                out.push(f);
            }
            return;
        };
        let mut avail = g.rows[r] & !*col_used;
        while avail != 0 {
            let c = avail.trailing_zeros() as usize;
            avail &= avail - 1;
            let (dr, dc) = delta.edge_image(r, c);
            if i == 1 {
                if (dr, dc) == (r, c) {
                    m[r] = c as u8;
                    *col_used |= 1 << c;
                    rec(g, delta, i, m, col_used, out);
                    *col_used &= !(1 << c);
                    m[r] = u8::MAX;
                } else if dr != r && dc != c && m[dr] == u8::MAX && *col_used >> dc & 1 == 0 && g.has_edge(dr, dc) {
                    m[r] = c as u8;
                    m[dr] = dc as u8;
                    *col_used |= (1 << c) | (1 << dc);
                    rec(g, delta, i, m, col_used, out);
                    *col_used &= !((1 << c) | (1 << dc));
                    m[r] = u8::MAX;
                    m[dr] = u8::MAX;
                }
            } else {
                // δ(e) must not lie in the same one-factor
                if (dr, dc) == (r, c) || m[dr] == dc as u8 || !g.has_edge(dr, dc) {
                    continue;
                }
                m[r] = c as u8;
                *col_used |= 1 << c;
                rec(g, delta, i, m, col_used, out);
                *col_used &= !(1 << c);
                m[r] = u8::MAX;
            }
        }
    }
    rec(g, delta, i, &mut m, &mut col_used, &mut out);
    out
}

/// One orbit of pairs with its running value.
#[derive(Clone, Debug)]
pub struct OrbitRecord {
    pub key: PairKey,
    pub aut_order: BigUint,
    /// `LF(δ, a, G)` once the stage is complete.
    pub value: BigRational,
}

/// All orbits reached after one stage.
#[derive(Clone, Debug)]
pub struct OrbitDatabase {
    pub n: usize,
    pub a: AVec,
    /// Length of the orbits added in the last stage, 0 for the start.
    pub last: usize,
    pub records: BTreeMap<PairKey, OrbitRecord>,
}

impl OrbitDatabase {
    /// The starting stage: the empty graph.
    pub fn start(delta: &Delta) -> OrbitDatabase {
        let n = delta.n;
        let (key, aut_order) = canonical_pair(&BipGraph::empty(n), delta);
        let mut records = BTreeMap::new();
        records.insert(key.clone(), OrbitRecord { key, aut_order, value: BigRational::one() });
        OrbitDatabase { n, a: AVec::default(), last: 0, records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// `LF` of the orbit containing `(g, δ)`, zero if it was not reached.
    pub fn lf(&self, g: &BipGraph, delta: &Delta) -> BigRational {
        let (key, _) = canonical_pair(g, delta);
        self.records.get(&key).map(|r| r.value.clone()).unwrap_or_else(BigRational::zero)
    }

    /// One line per record: key, stabilizer order, value as `p/q`.
    pub fn to_text(&self) -> String {
        let mut out = format!("# n={} a={} last={}\n", self.n, self.a, self.last);
        for r in self.records.values() {
            out.push_str(&format!("{} {} {}\n", r.key.to_hex(), r.aut_order, ratio_string(&r.value)));
        }
        out
    }

    pub fn parse(text: &str) -> Result<OrbitDatabase> {
        let mut lines = text.lines();
        let head = lines.next().ok_or_else(|| Error::Parse("empty database".into()))?;
        let field = |name: &str| -> Result<&str> {
            head.split_whitespace()
                .find_map(|w| w.strip_prefix(name))
                .ok_or_else(|| Error::Parse(format!("database header lacks {name}")))
        };
        let n: usize = field("n=")?.parse().map_err(|_| Error::Parse("n".into()))?;
        let a_text = field("a=")?.trim_matches(|c| c == '(' || c == ')');
        let (a1, a2) = a_text.split_once(',').ok_or_else(|| Error::Parse("a".into()))?;
        let a = AVec {
            a1: a1.parse().map_err(|_| Error::Parse("a1".into()))?,
            a2: a2.parse().map_err(|_| Error::Parse("a2".into()))?,
        };
        let last: usize = field("last=")?.parse().map_err(|_| Error::Parse("last".into()))?;
        let mut records = BTreeMap::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(Error::Parse(format!("database line {line:?}")));
            }
            let key = PairKey::from_hex(n, f[0])?;
            let aut_order: BigUint = f[1].parse().map_err(|_| Error::Parse("aut order".into()))?;
            let value: BigRational = f[2].parse().map_err(|_| Error::Parse("value".into()))?;
            records.insert(key.clone(), OrbitRecord { key, aut_order, value });
        }
        Ok(OrbitDatabase { n, a, last, records })
    }
}

fn ratio_string(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Order in which factor orbits are added.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AdditionOrder {
    /// Fixed factors first, then swapped pairs.
    Inc,
    /// Swapped pairs first.
    Dec,
}

impl std::str::FromStr for AdditionOrder {
    type Err = Error;
    fn from_str(s: &str) -> Result<AdditionOrder> {
        match s.to_ascii_lowercase().as_str() {
            "inc" => Ok(AdditionOrder::Inc),
            "dec" => Ok(AdditionOrder::Dec),
            _ => Err(Error::Parse(format!("addition order {s:?}"))),
        }
    }
}

/// Lengths of the orbits added at each stage.
pub fn schedule(target: AVec, order: AdditionOrder) -> Vec<usize> {
    let ones = std::iter::repeat_n(1, target.a1);
    let twos = std::iter::repeat_n(2, target.a2);
    match order {
        AdditionOrder::Inc => ones.chain(twos).collect(),
        AdditionOrder::Dec => twos.chain(ones).collect(),
    }
}

fn add_record(map: &mut BTreeMap<PairKey, OrbitRecord>, key: PairKey, aut_order: BigUint, value: BigRational) {
    match map.get_mut(&key) {
        Some(r) => r.value += value,
        None => {
            map.insert(key.clone(), OrbitRecord { key, aut_order, value });
        }
    }
}

/// Adds one factor orbit of length `i` to every stored orbit.
pub fn next_stage(prev: &OrbitDatabase, i: usize) -> Result<OrbitDatabase> {
    let a = prev.a.plus(i);
    let mut records: BTreeMap<PairKey, OrbitRecord> = prev
        .records
        .values()
        .collect::<Vec<_>>()
        .par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<PairKey, OrbitRecord>, h| {
            let free = h.key.graph.complement();
            for f in factor_orbits(&free, &h.key.delta, i) {
                let g = h.key.graph.union(&f);
                let (key, aut) = canonical_pair(&g, &h.key.delta);
                let inc = BigRational::new(BigInt::from(aut.clone()), BigInt::from(h.aut_order.clone())) * &h.value;
                add_record(&mut acc, key, aut, inc);
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, mut b| {
            if a.len() < b.len() {
                std::mem::swap(&mut a, &mut b);
            }
            for (key, r) in b {
                add_record(&mut a, key, r.aut_order, r.value);
            }
            a
        });
    let ai = BigRational::from_integer(BigInt::from(a.get(i)));
    for r in records.values_mut() {
        r.value = &r.value / &ai;
        if !r.value.is_integer() {
            return Err(Error::NonIntegral(format!("LF at stage {a} = {}", r.value)));
        }
    }
    Ok(OrbitDatabase { n: prev.n, a, last: i, records })
}

/// Runs every stage; `on_stage` sees each finished stage and may persist it.
pub fn forward_accumulate<F>(delta: &Delta, target: AVec, order: AdditionOrder, mut on_stage: F) -> Result<Vec<OrbitDatabase>>
where
    F: FnMut(&OrbitDatabase) -> Result<()>,
{
    let mut stages = vec![OrbitDatabase::start(delta)];
    on_stage(&stages[0])?;
    for i in schedule(target, order) {
        let next = next_stage(stages.last().unwrap(), i)?;
        on_stage(&next)?;
        stages.push(next);
    }
    Ok(stages)
}

/// Continues from a stored stage.
pub fn resume(from: OrbitDatabase, target: AVec, order: AdditionOrder) -> Result<OrbitDatabase> {
    let sched = schedule(target, order);
    let done = from.a.a1 + from.a.a2;
    let mut db = from;
    for &i in &sched[done..] {
        db = next_stage(&db, i)?;
    }
    Ok(db)
}

/// Checks `a_i · LF(a, G) = Σ_F LF(a - e_i, G - F)` over factor orbits `F`
/// of length `i` inside `G`, for every stored `G`.
pub fn backward_check(prev: &OrbitDatabase, cur: &OrbitDatabase) -> bool {
    let i = cur.last;
    if i == 0 {
        return true;
    }
    let ai = BigRational::from_integer(BigInt::from(cur.a.get(i)));
    cur.records.values().collect::<Vec<_>>().par_iter().all(|r| {
        let sum: BigRational = factor_orbits(&r.key.graph, &r.key.delta, i)
            .iter()
            .map(|f| prev.lf(&r.key.graph.minus(f), &r.key.delta))
            .fold(BigRational::zero(), |acc, x| acc + x);
        sum == &ai * &r.value
    })
}

/// `LF(δ, a + b, K)` from a stage `a` of one run and the complementary stage
/// `b` of another; both must come from the same `δ` up to conjugacy.
pub fn split_value(a_stage: &OrbitDatabase, b_stage: &OrbitDatabase, delta: &Delta) -> Result<BigRational> {
    let (_, phi_delta) = canonical_pair(&BipGraph::empty(delta.n), delta);
    let mut sum = BigRational::zero();
    for r in a_stage.records.values() {
        let rest = b_stage.lf(&r.key.graph.complement(), &r.key.delta);
        sum += BigRational::new(BigInt::from(phi_delta.clone()), BigInt::from(r.aut_order.clone())) * &r.value * rest;
    }
    let (a, b) = (a_stage.a, b_stage.a);
    let denom = binomial(BigUint::from(a.a1 + b.a1), BigUint::from(a.a1)) * binomial(BigUint::from(a.a2 + b.a2), BigUint::from(a.a2));
    Ok(sum / BigRational::from_integer(BigInt::from(denom)))
}

/// Compares every split of the target between an increasing and a
/// decreasing run with the final value. Returns the number of splits
/// checked, or an error naming the first failure.
pub fn split_check(inc: &[OrbitDatabase], dec: &[OrbitDatabase], delta: &Delta) -> Result<usize> {
    let total = inc.last().ok_or_else(|| Error::Inconsistent("empty run".into()))?;
    let target = total.a;
    let lf = total.records.values().next().map(|r| r.value.clone()).unwrap_or_else(BigRational::zero);
    let mut checked = 0;
    for a_stage in inc {
        let b = AVec { a1: target.a1 - a_stage.a.a1, a2: target.a2 - a_stage.a.a2 };
        let Some(b_stage) = dec.iter().find(|d| d.a == b) else { continue };
        let v = split_value(a_stage, b_stage, delta)?;
        if v != lf {
            return Err(Error::Inconsistent(format!("split {} + {} gives {v}, expected {lf}", a_stage.a, b)));
        }
        checked += 1;
    }
    Ok(checked)
}

/// `LF(δ, a, K_{n,n})` from the last stage of a run.
pub fn final_lf(stages: &[OrbitDatabase]) -> Result<BigUint> {
    let last = stages.last().ok_or_else(|| Error::Inconsistent("empty run".into()))?;
    if last.records.len() > 1 {
        return Err(Error::Inconsistent("final stage holds more than one orbit".into()));
    }
    match last.records.values().next() {
        None => Ok(BigUint::zero()),
        Some(r) => r
            .value
            .to_integer()
            .to_biguint()
            .ok_or_else(|| Error::Inconsistent("negative LF".into())),
    }
}

/// `a1! a2! 2^a2`, the number of ways to attach symbols.
pub fn label_factor(a: AVec) -> BigUint {
    factorial(a.a1) * factorial(a.a2) * (BigUint::one() << a.a2)
}

/// `|L_Π|` for `Π` trivial (`g = None`) or generated by an involution
/// fixing the symbol class setwise.
pub fn lf_with_symmetry(n: usize, g: Option<&Paratopism>, order: AdditionOrder) -> Result<BigUint> {
    let (delta, a) = match g {
        None => (Delta::identity(n), AVec { a1: n, a2: 0 }),
        Some(g) => Delta::from_paratopism(g)?,
    };
    let stages = forward_accumulate(&delta, a, order, |_| Ok(()))?;
    Ok(label_factor(a) * final_lf(&stages)?)
}

/// An involution conjugated by a class permutation so that it fixes the
/// symbol class setwise.
pub fn with_symbols_fixed(g: &Paratopism) -> Paratopism {
    let n = g.order_n();
    let cp = g.class_perm();
    let target = (0..3).find(|&x| cp[x].index() == x).unwrap_or(2);
    if target == 2 {
        return g.clone();
    }
    let id: Vec<u8> = (0..n as u8).collect();
    let mut classes = PointClass::ALL;
    classes.swap(target, 2);
    let swap = Paratopism::from_parts(classes, [id.clone(), id.clone(), id]).expect("class swap");
    swap.conjugate(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissible::{involution_representative, prime_order_types};
    use crate::cover::{CoverInstance, Limits};
    use crate::group::ParaGroup;

    fn run(delta: &Delta, a: AVec, order: AdditionOrder) -> Vec<OrbitDatabase> {
        forward_accumulate(delta, a, order, |_| Ok(())).unwrap()
    }

    #[test]
    fn unlabeled_counts() {
        let expected = [1u64, 1, 2, 24, 1344];
        for n in 1..=5 {
            let d = Delta::identity(n);
            let lf = final_lf(&run(&d, AVec { a1: n, a2: 0 }, AdditionOrder::Inc)).unwrap();
            assert_eq!(lf, BigUint::from(expected[n - 1]), "n={n}");
        }
    }

    #[test]
    fn k22_factor_orbits() {
        let k = BipGraph::complete(2);
        // (r0 r1)(c0 c1): both one-factors are fixed
        let d = Delta::new(2, vec![1, 0, 3, 2]).unwrap();
        assert_eq!(factor_orbits(&k, &d, 1).len(), 2);
        // (r0 r1) alone swaps the two one-factors
        let d = Delta::new(2, vec![1, 0, 2, 3]).unwrap();
        assert_eq!(factor_orbits(&k, &d, 2).len(), 1);
        assert_eq!(factor_orbits(&k, &d, 1).len(), 0);
    }

    #[test]
    fn stabilizer_order_by_brute_force() {
        // Φ for n = 2 has 8 elements; count those commuting with δ and fixing K_{2,2}
        let d = Delta::new(2, vec![1, 0, 3, 2]).unwrap();
        let (_, aut) = canonical_pair(&BipGraph::complete(2), &d);
        let mut count = 0;
        for swap in [false, true] {
            for pr in [[0usize, 1], [1, 0]] {
                for pc in [[0usize, 1], [1, 0]] {
                    let phi = |v: usize| -> usize {
                        let img = if v < 2 { pr[v] } else { 2 + pc[v - 2] };
                        if swap {
                            (img + 2) % 4
                        } else {
                            img
                        }
                    };
                    if (0..4).all(|v| phi(d.image(v)) == d.image(phi(v))) {
                        count += 1;
                    }
                }
            }
        }
        assert_eq!(aut, BigUint::from(count as u32));
    }

    #[test]
    fn conjugate_pairs_share_a_key() {
        let d = Delta::new(3, vec![1, 0, 2, 4, 3, 5]).unwrap();
        let e = Delta::new(3, vec![0, 2, 1, 3, 5, 4]).unwrap();
        assert_eq!(canonical_pair(&BipGraph::empty(3), &d).0, canonical_pair(&BipGraph::empty(3), &e).0);
        let mut g = BipGraph::empty(3);
        g.add_edge(0, 0);
        assert_ne!(canonical_pair(&g, &d).0, canonical_pair(&BipGraph::empty(3), &d).0);
    }

    #[test]
    fn involution_counts_match_cover_search() {
        for n in 2..=5 {
            for t in prime_order_types(n).into_iter().filter(|t| t.p == 2) {
                let g = involution_representative(&t, n);
                let group = ParaGroup::closure(n, std::slice::from_ref(&g), 2).unwrap();
                let direct = CoverInstance::build(&group, &[]).unwrap().count(Limits::default()).count;
                for order in [AdditionOrder::Inc, AdditionOrder::Dec] {
                    let lf = lf_with_symmetry(n, Some(&g), order).unwrap();
                    assert_eq!(lf, BigUint::from(direct), "n={n} {t:?} {order:?}");
                }
            }
        }
    }

    #[test]
    fn checks_pass_up_to_six() {
        for n in 2..=6 {
            let mut cases = vec![(Delta::identity(n), AVec { a1: n, a2: 0 })];
            for t in prime_order_types(n).into_iter().filter(|t| t.p == 2) {
                cases.push(Delta::from_paratopism(&with_symbols_fixed(&involution_representative(&t, n))).unwrap());
            }
            for (d, a) in cases {
                let inc = run(&d, a, AdditionOrder::Inc);
                let dec = run(&d, a, AdditionOrder::Dec);
                assert_eq!(final_lf(&inc).unwrap(), final_lf(&dec).unwrap(), "n={n} {d:?}");
                for w in inc.windows(2).chain(dec.windows(2)) {
                    assert!(backward_check(&w[0], &w[1]), "n={n} {d:?}");
                    for r in w[1].records.values() {
                        assert_eq!(r.key.graph.regular_degree(), Some(w[1].a.degree()));
                    }
                }
                assert!(split_check(&inc, &dec, &d).unwrap() >= 2, "n={n} {d:?}");
            }
        }
    }

    #[test]
    fn split_at_five_with_one_one() {
        let n = 5;
        for t in prime_order_types(n).into_iter().filter(|t| t.p == 2) {
            let g = involution_representative(&t, n);
            let (d, a) = Delta::from_paratopism(&g).unwrap();
            let inc = run(&d, a, AdditionOrder::Inc);
            let dec = run(&d, a, AdditionOrder::Dec);
            for w in inc.windows(2).chain(dec.windows(2)) {
                assert!(backward_check(&w[0], &w[1]), "{t:?}");
                assert_eq!(w[1].records.values().next().unwrap().key.graph.regular_degree(), Some(w[1].a.degree()));
            }
            assert!(split_check(&inc, &dec, &d).unwrap() >= 2);
        }
    }

    #[test]
    fn database_round_trip() {
        let g = involution_representative(&prime_order_types(4)[0], 4);
        let (d, a) = Delta::from_paratopism(&g).unwrap();
        for db in run(&d, a, AdditionOrder::Inc) {
            let back = OrbitDatabase::parse(&db.to_text()).unwrap();
            assert_eq!(back.to_text(), db.to_text());
        }
    }

    #[test]
    fn factor_orbits_match_brute_force() {
        let n = 4;
        let k = BipGraph::complete(n);
        let perms = crate::group::permutations(n);
        for t in prime_order_types(n).into_iter().filter(|t| t.p == 2) {
            let (d, _) = Delta::from_paratopism(&involution_representative(&t, n)).unwrap();
            let fixed = perms.iter().filter(|m| delta_matching(&d, m) == **m).count();
            let swapped = perms
                .iter()
                .filter(|m| {
                    let dm = delta_matching(&d, m);
                    m.iter().zip(&dm).all(|(a, b)| a != b)
                })
                .count();
            assert_eq!(factor_orbits(&k, &d, 1).len(), fixed);
            assert_eq!(factor_orbits(&k, &d, 2).len(), swapped / 2);
        }
    }
}
