//! Canonical labeling of vertex-colored graphs.
//!
//! The engine is a plain individualization-refinement search in the style of
//! nauty: an ordered partition of the vertices is refined to an equitable
//! partition, a vertex of the first smallest non-singleton cell is
//! individualized, and the process recurses until the partition is discrete.
//! Every discrete partition is a leaf and yields a relabeled graph; the
//! canonical form is the leaf that is minimal under the key
//! `(refinement trace, relabeled graph)`.
//!
//! Automorphisms are discovered whenever two leaves produce the same key.
//! They prune the search (children in the same orbit of the pointwise
//! stabilizer of the current path are skipped) and give the exact order of
//! the automorphism group as the product of the orbit lengths along the
//! first path.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::One;

/// An undirected simple graph whose vertices carry colors.
///
/// Colors are ordered: canonical labels are assigned color by color in
/// increasing color order, so two graphs are isomorphic under a
/// color-preserving map iff their certificates agree.
#[derive(Clone, Debug, Default)]
pub struct ColoredGraph {
    adj: Vec<Vec<u32>>,
    color: Vec<u32>,
}

impl ColoredGraph {
    pub fn new(vertices: usize) -> Self {
        ColoredGraph {
            adj: vec![Vec::new(); vertices],
            color: vec![0; vertices],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    /// Appends a fresh vertex with the given color and returns its index.
    pub fn add_vertex(&mut self, color: u32) -> u32 {
        self.adj.push(Vec::new());
        self.color.push(color);
        (self.adj.len() - 1) as u32
    }

    pub fn add_edge(&mut self, u: u32, v: u32) {
        assert_ne!(u, v, "loops are not supported");
        self.adj[u as usize].push(v);
        self.adj[v as usize].push(u);
    }

    pub fn set_color(&mut self, v: u32, color: u32) {
        self.color[v as usize] = color;
    }

    pub fn color(&self, v: u32) -> u32 {
        self.color[v as usize]
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    fn normalize(&mut self) {
        for list in &mut self.adj {
            list.sort_unstable();
            list.dedup();
        }
    }

    /// True iff `perm` (a vertex map) preserves colors and adjacency.
    pub fn is_automorphism(&self, perm: &[u32]) -> bool {
        let n = self.vertex_count();
        if perm.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p as usize >= n || seen[p as usize] {
                return false;
            }
            seen[p as usize] = true;
        }
        let mut image: Vec<u32> = Vec::new();
        for v in 0..n {
            if self.color[v] != self.color[perm[v] as usize] {
                return false;
            }
            let mut target = self.adj[perm[v] as usize].clone();
            target.sort_unstable();
            target.dedup();
            image.clear();
            image.extend(self.adj[v].iter().map(|&u| perm[u as usize]));
            image.sort_unstable();
            image.dedup();
            if image != target {
                return false;
            }
        }
        true
    }
}

/// Result of canonizing a graph.
#[derive(Clone, Debug)]
pub struct Canonical {
    /// `labeling[v]` is the canonical label of vertex `v`.
    pub labeling: Vec<u32>,
    /// Complete isomorphism invariant: colors and adjacency rows in label order.
    pub certificate: Vec<u64>,
    /// Generators of the automorphism group, as vertex maps.
    pub generators: Vec<Vec<u32>>,
    /// Exact order of the automorphism group.
    pub group_order: BigUint,
}

impl Canonical {
    /// Inverse of the labeling: `vertex_at[label]`.
    pub fn vertex_at(&self) -> Vec<u32> {
        let mut inv = vec![0u32; self.labeling.len()];
        for (v, &l) in self.labeling.iter().enumerate() {
            inv[l as usize] = v as u32;
        }
        inv
    }
}

/// Computes the canonical labeling, certificate and automorphism group.
pub fn canonize(graph: &ColoredGraph) -> Canonical {
    let mut g = graph.clone();
    g.normalize();
    Search::new(&g).run()
}

fn mix(h: u64, x: u64) -> u64 {
    (h.rotate_left(7) ^ x).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

#[derive(Clone)]
struct Partition {
    lab: Vec<u32>,
    pos: Vec<u32>,
    /// Start position of the cell containing each vertex.
    start: Vec<u32>,
    /// End (exclusive) of the cell, indexed by cell start.
    end: Vec<u32>,
    cells: usize,
}

impl Partition {
    fn is_discrete(&self) -> bool {
        self.cells == self.lab.len()
    }

    /// First non-singleton cell of minimum size.
    fn target_cell(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        let mut i = 0;
        let n = self.lab.len();
        while i < n {
            let e = self.end[i] as usize;
            let size = e - i;
            if size > 1 && best.is_none_or(|(s, be)| size < be - s) {
                best = Some((i, e));
                if size == 2 {
                    break;
                }
            }
            i = e;
        }
        best
    }
}

struct Refiner {
    count: Vec<u32>,
    touched: Vec<u32>,
    marked: Vec<bool>,
    cells: Vec<u32>,
    in_queue: Vec<bool>,
    queue: VecDeque<u32>,
}

impl Refiner {
    fn new(n: usize) -> Self {
        Refiner {
            count: vec![0; n],
            touched: Vec::new(),
            marked: vec![false; n],
            cells: Vec::new(),
            in_queue: vec![false; n],
            queue: VecDeque::new(),
        }
    }

    fn push(&mut self, cell: u32) {
        if !self.in_queue[cell as usize] {
            self.in_queue[cell as usize] = true;
            self.queue.push_back(cell);
        }
    }

    /// Refines `p` to the coarsest equitable partition finer than it,
    /// returning a label-invariant hash of the splitting history.
    fn refine(&mut self, g: &ColoredGraph, p: &mut Partition) -> u64 {
        let mut h: u64 = 0x243F_6A88_85A3_08D3;
        while let Some(w) = self.queue.pop_front() {
            self.in_queue[w as usize] = false;
            let ws = w as usize;
            let we = p.end[ws] as usize;
            for i in ws..we {
                let v = p.lab[i] as usize;
                for &u in &g.adj[v] {
                    if self.count[u as usize] == 0 {
                        self.touched.push(u);
                    }
                    self.count[u as usize] += 1;
                }
            }
            for &u in &self.touched {
                let c = p.start[u as usize];
                if !self.marked[c as usize] {
                    self.marked[c as usize] = true;
                    self.cells.push(c);
                }
            }
            self.cells.sort_unstable();
            for ci in 0..self.cells.len() {
                let cs = self.cells[ci] as usize;
                self.marked[cs] = false;
                let ce = p.end[cs] as usize;
                if ce - cs == 1 {
                    continue;
                }
                let count = &self.count;
                p.lab[cs..ce].sort_unstable_by_key(|&v| count[v as usize]);
                let lo = count[p.lab[cs] as usize];
                let hi = count[p.lab[ce - 1] as usize];
                if lo == hi {
                    continue;
                }
                let was_queued = self.in_queue[cs];
                let mut frag_start = cs;
                let mut largest = (0usize, cs);
                let mut frags: Vec<usize> = Vec::new();
                h = mix(h, ws as u64);
                h = mix(h, cs as u64);
                for i in cs..=ce {
                    let boundary = i == ce
                        || count[p.lab[i] as usize] != count[p.lab[frag_start] as usize];
                    if boundary {
                        let size = i - frag_start;
                        h = mix(h, ((count[p.lab[frag_start] as usize] as u64) << 32) | size as u64);
                        for j in frag_start..i {
                            let v = p.lab[j] as usize;
                            p.pos[v] = j as u32;
                            p.start[v] = frag_start as u32;
                        }
                        p.end[frag_start] = i as u32;
                        if size > largest.0 {
                            largest = (size, frag_start);
                        }
                        frags.push(frag_start);
                        frag_start = i;
                    }
                }
                p.cells += frags.len() - 1;
                for &f in &frags {
                    if was_queued {
                        if f != cs {
                            self.in_queue[f] = true;
                            self.queue.push_back(f as u32);
                        }
                    } else if f != largest.1 {
                        self.in_queue[f] = true;
                        self.queue.push_back(f as u32);
                    }
                }
            }
            for &u in &self.touched {
                self.count[u as usize] = 0;
            }
            self.touched.clear();
            self.cells.clear();
        }
        mix(h, p.cells as u64)
    }
}

struct Leaf {
    traces: Vec<u64>,
    path: Vec<u32>,
    lab: Vec<u32>,
    cert: Vec<u64>,
}

struct Search<'g> {
    g: &'g ColoredGraph,
    n: usize,
    words: usize,
    refiner: Refiner,
    first: Option<Leaf>,
    best: Option<Leaf>,
    generators: Vec<Vec<u32>>,
    order: BigUint,
    first_path_done: bool,
}

enum Outcome {
    Continue,
    /// Abandon every node deeper than the given level.
    Jump(usize),
}

impl<'g> Search<'g> {
    fn new(g: &'g ColoredGraph) -> Self {
        let n = g.vertex_count();
        Search {
            g,
            n,
            words: n.div_ceil(64).max(1),
            refiner: Refiner::new(n.max(1)),
            first: None,
            best: None,
            generators: Vec::new(),
            order: BigUint::one(),
            first_path_done: false,
        }
    }

    fn initial_partition(&mut self) -> Partition {
        let n = self.n;
        let mut lab: Vec<u32> = (0..n as u32).collect();
        lab.sort_by_key(|&v| (self.g.color[v as usize], v));
        let mut p = Partition {
            lab,
            pos: vec![0; n],
            start: vec![0; n],
            end: vec![0; n],
            cells: 0,
        };
        let mut i = 0;
        while i < n {
            let c = self.g.color[p.lab[i] as usize];
            let mut j = i;
            while j < n && self.g.color[p.lab[j] as usize] == c {
                j += 1;
            }
            for k in i..j {
                let v = p.lab[k] as usize;
                p.pos[v] = k as u32;
                p.start[v] = i as u32;
            }
            p.end[i] = j as u32;
            p.cells += 1;
            self.refiner.push(i as u32);
            i = j;
        }
        p
    }

    fn run(mut self) -> Canonical {
        if self.n == 0 {
            return Canonical {
                labeling: Vec::new(),
                certificate: Vec::new(),
                generators: Vec::new(),
                group_order: BigUint::one(),
            };
        }
        let mut root = self.initial_partition();
        let mut color_hash = 0u64;
        for &v in &root.lab {
            color_hash = mix(color_hash, self.g.color[v as usize] as u64);
        }
        let t = mix(self.refiner.refine(self.g, &mut root), color_hash);
        let mut traces = vec![t];
        let mut path = Vec::new();
        self.explore(&root, &mut traces, &mut path);
        let best = self.best.take().expect("search visits at least one leaf");
        let mut labeling = vec![0u32; self.n];
        for (i, &v) in best.lab.iter().enumerate() {
            labeling[v as usize] = i as u32;
        }
        Canonical {
            labeling,
            certificate: best.cert,
            generators: self.generators,
            group_order: self.order,
        }
    }

    fn certificate(&self, p: &Partition) -> Vec<u64> {
        let n = self.n;
        let mut cert = vec![0u64; n + n * self.words];
        for (i, &v) in p.lab.iter().enumerate() {
            cert[i] = self.g.color[v as usize] as u64;
            let row = n + i * self.words;
            for &u in &self.g.adj[v as usize] {
                let j = p.pos[u as usize] as usize;
                cert[row + j / 64] |= 1u64 << (j % 64);
            }
        }
        cert
    }

    fn individualize(&mut self, p: &Partition, v: u32) -> (Partition, u64) {
        let mut q = p.clone();
        let cs = q.start[v as usize] as usize;
        let ce = q.end[cs] as usize;
        let pv = q.pos[v as usize] as usize;
        let other = q.lab[cs];
        q.lab.swap(cs, pv);
        q.pos[other as usize] = pv as u32;
        q.pos[v as usize] = cs as u32;
        q.end[cs] = cs as u32 + 1;
        q.end[cs + 1] = ce as u32;
        for k in cs + 1..ce {
            let u = q.lab[k] as usize;
            q.start[u] = cs as u32 + 1;
        }
        q.cells += 1;
        self.refiner.push(cs as u32);
        let t = self.refiner.refine(self.g, &mut q);
        (q, mix(t, cs as u64))
    }

    /// Union-find orbits of the generators that fix every vertex of `fixed`.
    fn stabilizer_orbits(&self, fixed: &[u32]) -> Vec<u32> {
        let mut parent: Vec<u32> = (0..self.n as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        for gen in &self.generators {
            if fixed.iter().any(|&f| gen[f as usize] != f) {
                continue;
            }
            for v in 0..self.n as u32 {
                let a = find(&mut parent, v);
                let b = find(&mut parent, gen[v as usize]);
                if a != b {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    parent[hi as usize] = lo;
                }
            }
        }
        (0..self.n as u32).map(|v| find(&mut parent, v)).collect()
    }

    fn explore(&mut self, p: &Partition, traces: &mut Vec<u64>, path: &mut Vec<u32>) -> Outcome {
        if p.is_discrete() {
            return self.leaf(p, traces, path);
        }
        let level = path.len();
        let (cs, ce) = p.target_cell().expect("non-discrete partition has a target cell");
        let mut children: Vec<u32> = p.lab[cs..ce].to_vec();
        children.sort_unstable();
        let on_first_path = match &self.first {
            None => true,
            Some(f) => f.path.len() > level && f.path[..level] == path[..],
        };
        let mut done: Vec<u32> = Vec::new();
        let mut gen_count = usize::MAX;
        let mut orbits: Vec<u32> = Vec::new();
        for &w in &children {
            if !done.is_empty() {
                if gen_count != self.generators.len() {
                    orbits = self.stabilizer_orbits(path);
                    gen_count = self.generators.len();
                }
                if done.iter().any(|&d| orbits[d as usize] == orbits[w as usize]) {
                    continue;
                }
            }
            done.push(w);
            let (q, t) = self.individualize(p, w);
            traces.push(t);
            path.push(w);
            let proceed = if !self.first_path_done {
                true
            } else {
                let d = traces.len();
                let f = self.first.as_ref().unwrap();
                let b = self.best.as_ref().unwrap();
                let eq_first = f.traces.len() >= d && f.traces[..d] == traces[..];
                let m = d.min(b.traces.len());
                let worse_than_best = traces[..m] > b.traces[..m];
                eq_first || !worse_than_best
            };
            let outcome = if proceed {
                self.explore(&q, traces, path)
            } else {
                Outcome::Continue
            };
            traces.pop();
            path.pop();
            if let Outcome::Jump(target) = outcome {
                if target < level {
                    return outcome;
                }
            }
        }
        if on_first_path {
            let first_child = self.first.as_ref().unwrap().path[level];
            let orbits = self.stabilizer_orbits(path);
            let rep = orbits[first_child as usize];
            let size = children.iter().filter(|&&c| orbits[c as usize] == rep).count();
            self.order *= BigUint::from(size);
        }
        Outcome::Continue
    }

    fn leaf(&mut self, p: &Partition, traces: &[u64], path: &[u32]) -> Outcome {
        let cert = self.certificate(p);
        if self.first.is_none() {
            let leaf = Leaf {
                traces: traces.to_vec(),
                path: path.to_vec(),
                lab: p.lab.clone(),
                cert,
            };
            self.best = Some(Leaf {
                traces: leaf.traces.clone(),
                path: leaf.path.clone(),
                lab: leaf.lab.clone(),
                cert: leaf.cert.clone(),
            });
            self.first = Some(leaf);
            self.first_path_done = true;
            return Outcome::Continue;
        }
        for which in [0, 1] {
            let reference = if which == 0 { self.first.as_ref() } else { self.best.as_ref() };
            let reference = reference.unwrap();
            if reference.traces.as_slice() == traces && reference.cert == cert {
                let mut gen = vec![0u32; self.n];
                for (i, &v) in reference.lab.iter().enumerate() {
                    gen[v as usize] = p.lab[i];
                }
                let divergence = reference
                    .path
                    .iter()
                    .zip(path)
                    .position(|(a, b)| a != b)
                    .unwrap_or(path.len().min(reference.path.len()));
                if gen.iter().enumerate().any(|(i, &x)| i as u32 != x) {
                    self.generators.push(gen);
                }
                return Outcome::Jump(divergence);
            }
        }
        let best = self.best.as_ref().unwrap();
        let better = match traces.cmp(best.traces.as_slice()) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Greater => false,
            std::cmp::Ordering::Equal => cert < best.cert,
        };
        if better {
            self.best = Some(Leaf {
                traces: traces.to_vec(),
                path: path.to_vec(),
                lab: p.lab.clone(),
                cert,
            });
        }
        Outcome::Continue
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand::rngs::StdRng;

    fn cycle(n: u32) -> ColoredGraph {
        let mut g = ColoredGraph::new(n as usize);
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
        }
        g
    }

    fn petersen() -> ColoredGraph {
        let mut g = ColoredGraph::new(10);
        for i in 0..5 {
            g.add_edge(i, (i + 1) % 5);
            g.add_edge(i, i + 5);
            g.add_edge(5 + i, 5 + (i + 2) % 5);
        }
        g
    }

    fn relabel(g: &ColoredGraph, perm: &[u32]) -> ColoredGraph {
        let mut h = ColoredGraph::new(g.vertex_count());
        for v in 0..g.vertex_count() as u32 {
            h.set_color(perm[v as usize], g.color(v));
            for &u in g.neighbors(v) {
                if u > v {
                    h.add_edge(perm[v as usize], perm[u as usize]);
                }
            }
        }
        h
    }

    fn brute_force_order(g: &ColoredGraph) -> u64 {
        let n = g.vertex_count();
        let mut perm: Vec<u32> = (0..n as u32).collect();
        let mut count = 0;
        loop {
            if g.is_automorphism(&perm) {
                count += 1;
            }
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
            perm.swap(i, j);
            perm[i + 1..].reverse();
        }
        count
    }

    #[test]
    fn known_group_orders() {
        assert_eq!(canonize(&cycle(7)).group_order, BigUint::from(14u32));
        assert_eq!(canonize(&petersen()).group_order, BigUint::from(120u32));
        let mut k5 = ColoredGraph::new(5);
        for i in 0..5 {
            for j in i + 1..5 {
                k5.add_edge(i, j);
            }
        }
        assert_eq!(canonize(&k5).group_order, BigUint::from(120u32));
        assert_eq!(canonize(&ColoredGraph::new(6)).group_order, BigUint::from(720u32));
        let mut cube = ColoredGraph::new(8);
        for v in 0..8u32 {
            for b in 0..3 {
                let u = v ^ (1 << b);
                if u > v {
                    cube.add_edge(v, u);
                }
            }
        }
        assert_eq!(canonize(&cube).group_order, BigUint::from(48u32));
    }

    #[test]
    fn colors_restrict_automorphisms() {
        let mut g = cycle(6);
        g.set_color(0, 1);
        assert_eq!(canonize(&g).group_order, BigUint::from(2u32));
    }

    #[test]
    fn random_graphs_match_brute_force_and_relabeling() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..60 {
            let n = rng.gen_range(1..=7u32);
            let mut g = ColoredGraph::new(n as usize);
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.4) {
                        g.add_edge(u, v);
                    }
                }
                g.set_color(u, rng.gen_range(0..2));
            }
            let c = canonize(&g);
            assert_eq!(c.group_order, BigUint::from(brute_force_order(&g)));
            for gen in &c.generators {
                assert!(g.is_automorphism(gen));
            }
            let mut perm: Vec<u32> = (0..n).collect();
            perm.shuffle(&mut rng);
            let h = relabel(&g, &perm);
            assert_eq!(canonize(&h).certificate, c.certificate);
        }
    }

    #[test]
    fn non_isomorphic_graphs_differ() {
        let c6 = cycle(6);
        let mut two_triangles = ColoredGraph::new(6);
        for base in [0, 3] {
            two_triangles.add_edge(base, base + 1);
            two_triangles.add_edge(base + 1, base + 2);
            two_triangles.add_edge(base + 2, base);
        }
        assert_ne!(canonize(&c6).certificate, canonize(&two_triangles).certificate);
    }

    #[test]
    fn strongly_regular_relabeling() {
        // Paley graph on 13 vertices: hard for refinement alone.
        let squares: Vec<u32> = (1..13u32).map(|x| x * x % 13).collect();
        let mut g = ColoredGraph::new(13);
        for u in 0..13u32 {
            for v in u + 1..13 {
                if squares.contains(&((v - u) % 13)) {
                    g.add_edge(u, v);
                }
            }
        }
        let c = canonize(&g);
        assert_eq!(c.group_order, BigUint::from(78u32));
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..5 {
            let mut perm: Vec<u32> = (0..13).collect();
            perm.shuffle(&mut rng);
            assert_eq!(canonize(&relabel(&g, &perm)).certificate, c.certificate);
        }
    }
}
