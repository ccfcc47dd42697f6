//! Exact cover by dancing links, specialized to covering point pairs with
//! orbits of triples.
//!
//! Columns are the cross-class pairs still to be covered; each row is one
//! orbit of triples under a prescribed group. Optional secondary columns may
//! be covered at most once.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::group::ParaGroup;
use crate::square::{LatinSquare, Triple};

/// What a solution callback wants the search to do next.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Result of a search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOutcome {
    /// Solutions visited.
    pub count: u64,
    /// False when the search ended early (cap, budget, or callback).
    pub complete: bool,
    /// Search nodes expanded.
    pub nodes: u64,
}

/// Limits on a search. `None` means unlimited.
#[derive(Clone, Copy, Debug, Default)]
pub struct Limits {
    pub max_solutions: Option<u64>,
    pub max_nodes: Option<u64>,
}

/// A generic exact cover matrix in dancing-links form.
pub struct ExactCover {
    primary: usize,
    left: Vec<u32>,
    right: Vec<u32>,
    up: Vec<u32>,
    down: Vec<u32>,
    col: Vec<u32>,
    row_of: Vec<u32>,
    size: Vec<u32>,
    rows: usize,
}

impl ExactCover {
    /// Columns `0..primary` must be covered exactly once; columns
    /// `primary..primary + secondary` at most once.
    pub fn new(primary: usize, secondary: usize, rows: &[Vec<u32>]) -> ExactCover {
        let cols = primary + secondary;
        let root = cols;
        let headers = cols + 1;
        let total: usize = headers + rows.iter().map(Vec::len).sum::<usize>();
        let mut m = ExactCover {
            primary,
            left: vec![0; total],
            right: vec![0; total],
            up: vec![0; total],
            down: vec![0; total],
            col: vec![0; total],
            row_of: vec![u32::MAX; total],
            size: vec![0; headers],
            rows: rows.len(),
        };
        for c in 0..headers {
            m.up[c] = c as u32;
            m.down[c] = c as u32;
            m.col[c] = c as u32;
            m.left[c] = c as u32;
            m.right[c] = c as u32;
        }
        // link primary headers and root in a ring
        let mut ring: Vec<usize> = (0..primary).collect();
        ring.push(root);
        for i in 0..ring.len() {
            let a = ring[i];
            let b = ring[(i + 1) % ring.len()];
            m.right[a] = b as u32;
            m.left[b] = a as u32;
        }
        let mut next = headers;
        for (r, cs) in rows.iter().enumerate() {
            let first = next;
            for (k, &c) in cs.iter().enumerate() {
                let c = c as usize;
                assert!(c < cols, "column {c} out of range");
                let x = next;
                next += 1;
                m.col[x] = c as u32;
                m.row_of[x] = r as u32;
                m.up[x] = m.up[c];
                m.down[x] = c as u32;
                let last = m.up[c] as usize;
                m.down[last] = x as u32;
                m.up[c] = x as u32;
                m.size[c] += 1;
                if k == 0 {
                    m.left[x] = x as u32;
                    m.right[x] = x as u32;
                } else {
                    let prev = m.left[first] as usize;
                    m.left[x] = prev as u32;
                    m.right[x] = first as u32;
                    m.right[prev] = x as u32;
                    m.left[first] = x as u32;
                }
            }
        }
        m
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    fn root(&self) -> usize {
        self.size.len() - 1
    }

    fn cover(&mut self, c: usize) {
        let (l, r) = (self.left[c] as usize, self.right[c] as usize);
        self.right[l] = r as u32;
        self.left[r] = l as u32;
        let mut i = self.down[c] as usize;
        while i != c {
            let mut j = self.right[i] as usize;
            while j != i {
                let (u, d) = (self.up[j] as usize, self.down[j] as usize);
                self.down[u] = d as u32;
                self.up[d] = u as u32;
                self.size[self.col[j] as usize] -= 1;
                j = self.right[j] as usize;
            }
            i = self.down[i] as usize;
        }
    }

    fn uncover(&mut self, c: usize) {
        let mut i = self.up[c] as usize;
        while i != c {
            let mut j = self.left[i] as usize;
            while j != i {
                let (u, d) = (self.up[j] as usize, self.down[j] as usize);
                self.down[u] = j as u32;
                self.up[d] = j as u32;
                self.size[self.col[j] as usize] += 1;
                j = self.left[j] as usize;
            }
            i = self.up[i] as usize;
        }
        let (l, r) = (self.left[c] as usize, self.right[c] as usize);
        self.right[l] = c as u32;
        self.left[r] = c as u32;
    }

    /// Visits every exact cover of the primary columns, calling `visit` with
    /// the chosen row indices.
    pub fn solve<F>(&mut self, limits: Limits, mut visit: F) -> SolveOutcome
    where
        F: FnMut(&[usize]) -> Control,
    {
        let mut state = SearchState { count: 0, nodes: 0, stopped: false, chosen: Vec::new() };
        self.search(&mut state, &limits, &mut visit);
        SolveOutcome { count: state.count, complete: !state.stopped, nodes: state.nodes }
    }

    fn search<F>(&mut self, st: &mut SearchState, limits: &Limits, visit: &mut F)
    where
        F: FnMut(&[usize]) -> Control,
    {
        let root = self.root();
        if self.right[root] as usize == root {
            st.count += 1;
            if visit(&st.chosen) == Control::Stop || limits.max_solutions.is_some_and(|m| st.count >= m) {
                st.stopped = true;
            }
            return;
        }
        st.nodes += 1;
        if limits.max_nodes.is_some_and(|m| st.nodes > m) {
            st.stopped = true;
            return;
        }
        // minimum remaining candidates, ties to the smallest column index
        let mut best = usize::MAX;
        let mut best_size = u32::MAX;
        let mut c = self.right[root] as usize;
        while c != root {
            if self.size[c] < best_size || (self.size[c] == best_size && c < best) {
                best = c;
                best_size = self.size[c];
                if best_size == 0 {
                    break;
                }
            }
            c = self.right[c] as usize;
        }
        if best_size == 0 {
            return;
        }
        debug_assert!(best < self.primary);
        self.cover(best);
        let mut r = self.down[best] as usize;
        while r != best {
            st.chosen.push(self.row_of[r] as usize);
            let mut j = self.right[r] as usize;
            while j != r {
                self.cover(self.col[j] as usize);
                j = self.right[j] as usize;
            }
            self.search(st, limits, visit);
            let mut j = self.left[r] as usize;
            while j != r {
                self.uncover(self.col[j] as usize);
                j = self.left[j] as usize;
            }
            st.chosen.pop();
            if st.stopped {
                break;
            }
            r = self.down[r] as usize;
        }
        self.uncover(best);
    }
}

struct SearchState {
    count: u64,
    nodes: u64,
    stopped: bool,
    chosen: Vec<usize>,
}

/// Orbits of the group on all `n³` triples, each sorted, in order of their
/// smallest triple.
pub fn triple_orbits(group: &ParaGroup) -> Vec<Vec<Triple>> {
    let n = group.n();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for r in 0..n as u8 {
        for c in 0..n as u8 {
            for s in 0..n as u8 {
                let t = Triple::new(r, c, s);
                if seen.contains(&t) {
                    continue;
                }
                let mut orbit: Vec<Triple> = group.elements().iter().map(|g| g.apply_triple(t)).collect();
                orbit.sort_unstable();
                orbit.dedup();
                seen.extend(orbit.iter().copied());
                out.push(orbit);
            }
        }
    }
    out
}

/// True when no cross-class pair lies in two of the triples.
pub fn pair_disjoint(n: usize, triples: &[Triple]) -> bool {
    let mut used = HashSet::new();
    triples.iter().flat_map(|t| t.pair_ids(n)).all(|p| used.insert(p))
}

/// Covering the pairs left open by `fixed` with orbits of triples.
pub struct CoverInstance {
    n: usize,
    fixed: Vec<Triple>,
    /// Pair id of each column.
    columns: Vec<usize>,
    /// Orbits usable as rows.
    rows: Vec<Vec<Triple>>,
    row_columns: Vec<Vec<u32>>,
}

impl CoverInstance {
    /// Rows are the orbits of the group that are pair-disjoint internally and
    /// from `fixed`; columns are the pairs not covered by `fixed`.
    pub fn build(group: &ParaGroup, fixed: &[Triple]) -> Result<CoverInstance> {
        Self::build_from_orbits(group.n(), triple_orbits(group), fixed)
    }

    pub fn build_from_orbits(n: usize, orbits: Vec<Vec<Triple>>, fixed: &[Triple]) -> Result<CoverInstance> {
        let mut covered = vec![false; 3 * n * n];
        for p in fixed.iter().flat_map(|t| t.pair_ids(n)) {
            if covered[p] {
                return Err(Error::InvalidSquare("fixed triples share a pair".into()));
            }
            covered[p] = true;
        }
        let mut column_of = vec![u32::MAX; 3 * n * n];
        let mut columns = Vec::new();
        for p in 0..3 * n * n {
            if !covered[p] {
                column_of[p] = columns.len() as u32;
                columns.push(p);
            }
        }
        let fixed_set: HashSet<Triple> = fixed.iter().copied().collect();
        let mut rows = Vec::new();
        let mut row_columns = Vec::new();
        for orbit in orbits {
            if orbit.iter().any(|t| fixed_set.contains(t)) {
                continue;
            }
            if !pair_disjoint(n, &orbit) {
                continue;
            }
            let pairs: Vec<usize> = orbit.iter().flat_map(|t| t.pair_ids(n)).collect();
            if pairs.iter().any(|&p| covered[p]) {
                continue;
            }
            let mut cols: Vec<u32> = pairs.iter().map(|&p| column_of[p]).collect();
            cols.sort_unstable();
            row_columns.push(cols);
            rows.push(orbit);
        }
        Ok(CoverInstance { n, fixed: fixed.to_vec(), columns, rows, row_columns })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Triple>] {
        &self.rows
    }

    /// Reorders rows by `perm` (row `i` moves to `perm[i]`); used to check that
    /// counts do not depend on input order.
    pub fn permute_rows(&mut self, perm: &[usize]) {
        let mut rows = vec![Vec::new(); self.rows.len()];
        let mut cols = vec![Vec::new(); self.rows.len()];
        for (i, &p) in perm.iter().enumerate() {
            rows[p] = std::mem::take(&mut self.rows[i]);
            cols[p] = std::mem::take(&mut self.row_columns[i]);
        }
        self.rows = rows;
        self.row_columns = cols;
    }

    /// Visits every completion as a Latin square (fixed triples included).
    pub fn solve<F>(&self, limits: Limits, mut visit: F) -> SolveOutcome
    where
        F: FnMut(&LatinSquare) -> Control,
    {
        let mut dlx = ExactCover::new(self.columns.len(), 0, &self.row_columns);
        let n = self.n;
        dlx.solve(limits, |chosen| {
            let mut cells = vec![0u8; n * n];
            for t in self.fixed.iter().chain(chosen.iter().flat_map(|&r| self.rows[r].iter())) {
                cells[t.row as usize * n + t.col as usize] = t.sym;
            }
            visit(&LatinSquare::from_cells_unchecked(n, cells))
        })
    }

    /// Number of completions.
    pub fn count(&self, limits: Limits) -> SolveOutcome {
        let mut dlx = ExactCover::new(self.columns.len(), 0, &self.row_columns);
        dlx.solve(limits, |_| Control::Continue)
    }

    /// Splits the columns into classes linked by shared rows. Each class is
    /// an independent subproblem: its columns, then the rows touching them.
    pub fn components(&self) -> Vec<(Vec<u32>, Vec<usize>)> {
        let m = self.columns.len();
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for cols in &self.row_columns {
            for w in cols.windows(2) {
                let (a, b) = (find(&mut parent, w[0] as usize), find(&mut parent, w[1] as usize));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut index: HashMap<usize, usize> = HashMap::new();
        let mut out: Vec<(Vec<u32>, Vec<usize>)> = Vec::new();
        for c in 0..m {
            let r = find(&mut parent, c);
            let k = *index.entry(r).or_insert_with(|| {
                out.push((Vec::new(), Vec::new()));
                out.len() - 1
            });
            out[k].0.push(c as u32);
        }
        for (i, cols) in self.row_columns.iter().enumerate() {
            if let Some(&c) = cols.first() {
                let k = index[&find(&mut parent, c as usize)];
                out[k].1.push(i);
            }
        }
        out
    }

    /// True iff at least one completion exists; `None` if the node budget ran
    /// out first. Independent components are decided one at a time, each
    /// with the full budget.
    pub fn decide(&self, max_nodes: Option<u64>) -> Option<bool> {
        let mut undecided = false;
        for (cols, rows) in self.components() {
            let local: HashMap<u32, u32> = cols.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect();
            let sub: Vec<Vec<u32>> = rows.iter().map(|&r| self.row_columns[r].iter().map(|c| local[c]).collect()).collect();
            let mut dlx = ExactCover::new(cols.len(), 0, &sub);
            let out = dlx.solve(Limits { max_solutions: Some(1), max_nodes }, |_| Control::Stop);
            if out.count == 0 {
                if out.complete {
                    return Some(false);
                }
                undecided = true;
            }
        }
        if undecided {
            None
        } else {
            Some(true)
        }
    }

    /// Debug dump: one row per line, its triples as `r.c.s`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let parts: Vec<String> = row.iter().map(|t| format!("{}.{}.{}", t.row, t.col, t.sym)).collect();
            let _ = writeln!(out, "{}", parts.join(" "));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Paratopism;
    use crate::square::validate;
    use rand::prelude::*;
    use rand::rngs::StdRng;

    fn count_all(n: usize) -> u64 {
        let inst = CoverInstance::build(&ParaGroup::trivial(n), &[]).unwrap();
        inst.count(Limits::default()).count
    }

    #[test]
    fn order_two_instance() {
        let inst = CoverInstance::build(&ParaGroup::trivial(2), &[]).unwrap();
        assert_eq!((inst.row_count(), inst.column_count()), (8, 12));
        assert_eq!(inst.count(Limits::default()).count, 2);
    }

    #[test]
    fn small_square_counts() {
        assert_eq!(count_all(1), 1);
        assert_eq!(count_all(3), 12);
        assert_eq!(count_all(4), 576);
    }

    #[test]
    fn solutions_are_latin() {
        let inst = CoverInstance::build(&ParaGroup::trivial(4), &[]).unwrap();
        let mut seen = HashSet::new();
        inst.solve(Limits::default(), |l| {
            assert!(validate(4, &l.triples()).unwrap().is_ok());
            assert!(seen.insert(l.clone()));
            Control::Continue
        });
        assert_eq!(seen.len(), 576);
    }

    #[test]
    fn row_order_does_not_matter() {
        let mut inst = CoverInstance::build(&ParaGroup::trivial(4), &[]).unwrap();
        let mut perm: Vec<usize> = (0..inst.row_count()).collect();
        perm.shuffle(&mut StdRng::seed_from_u64(11));
        inst.permute_rows(&perm);
        assert_eq!(inst.count(Limits::default()).count, 576);
    }

    #[test]
    fn involution_orbits_have_size_one_or_two() {
        let g = Paratopism::from_cycles(3, "(2,3)(5,6)(8,9)").unwrap();
        let group = ParaGroup::closure(3, &[g], 4).unwrap();
        let orbits = triple_orbits(&group);
        assert!(orbits.iter().all(|o| o.len() == 1 || o.len() == 2));
        assert_eq!(orbits.iter().map(Vec::len).sum::<usize>(), 27);
    }

    #[test]
    fn empty_column_means_no_solution() {
        let fixed = [Triple::new(0, 0, 0), Triple::new(1, 1, 1)];
        let inst = CoverInstance::build(&ParaGroup::trivial(2), &fixed).unwrap();
        assert_eq!(inst.count(Limits::default()).count, 0);
        assert_eq!(inst.decide(None), Some(false));
    }

    #[test]
    fn caps_and_budgets() {
        let inst = CoverInstance::build(&ParaGroup::trivial(4), &[]).unwrap();
        let out = inst.count(Limits { max_solutions: Some(10), max_nodes: None });
        assert_eq!((out.count, out.complete), (10, false));
        let out = inst.count(Limits { max_solutions: None, max_nodes: Some(3) });
        assert!(!out.complete);
        assert_eq!(inst.decide(None), Some(true));
    }

    #[test]
    fn secondary_columns_may_stay_open() {
        // rows: {0}, {1, 2}, {0, 2}; primary 0..2, secondary 2
        let rows = vec![vec![0], vec![1, 2], vec![0, 2], vec![1]];
        let mut dlx = ExactCover::new(2, 1, &rows);
        let mut sols = Vec::new();
        dlx.solve(Limits::default(), |c| {
            let mut c = c.to_vec();
            c.sort();
            sols.push(c);
            Control::Continue
        });
        sols.sort();
        assert_eq!(sols, vec![vec![0, 1], vec![0, 3], vec![2, 3]]);
    }
}
