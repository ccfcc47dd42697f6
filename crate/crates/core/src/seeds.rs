//! Seeds: partial squares from which every square admitting a prescribed
//! group can be reached, their classification, extension and isomorph
//! rejection.
//!
//! A seed `(Π, T, S)` has a group `Π`, a small point set `T` of a prescribed
//! composition, and a union `S` of `Π`-orbits of triples in which every point
//! of `T` lies in exactly `n` blocks, every orbit meets `T`, no pair is
//! covered twice and, unless waived, some block contains all of `T`.
//!
//! Seeds are compared with a colored graph holding the points, the three
//! classes, the blocks, `T`, and one arrow gadget per nonidentity element of
//! `Π`. Its automorphisms are exactly the paratopisms normalizing `Π` and
//! fixing `T` and `S`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::admissible::{classify_order4, prime_order_types, prime_representative, subsquare_obstruction};
use crate::canon::{canonize, Canonical, ColoredGraph};
use crate::cover::{pair_disjoint, triple_orbits, Control, CoverInstance, Limits};
use crate::error::{Error, Result};
use crate::group::{autoparatopy_group, conjugating_element, gamma_order, ParaGroup, Paratopism};
use crate::square::{pair_points, LatinSquare, Point, Triple};

/// Size and composition of the point set `T`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct CompositionSpec {
    /// Points fixed by the group.
    pub fixed: usize,
    /// Points moved by the group.
    pub moved: usize,
    /// Points sharing one class, with no condition on fixedness.
    pub same_class: usize,
    /// `T` need not lie in a block.
    pub no_containment: bool,
}

impl CompositionSpec {
    pub fn size(&self) -> usize {
        self.fixed + self.moved + self.same_class
    }

    /// A spec that every square admitting `group` realizes: three fixed
    /// points in a block when fixed points occur in two classes (they then
    /// span a subsquare), one fixed and one moved point when fixed points
    /// occur in one class, one moved point otherwise.
    pub fn default_for(group: &ParaGroup) -> CompositionSpec {
        let fixed = fixed_points(group);
        let n = group.n();
        let classes = (0..3).filter(|x| fixed.iter().any(|&p| p / n == *x)).count();
        match classes {
            0 => CompositionSpec { moved: 1, ..Default::default() },
            1 => CompositionSpec { fixed: 1, moved: 1, ..Default::default() },
            _ => CompositionSpec { fixed: 3, ..Default::default() },
        }
    }
}

impl FromStr for CompositionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<CompositionSpec> {
        let mut spec = CompositionSpec::default();
        let mut chars = s.trim().chars().peekable();
        if s.trim().is_empty() {
            return Err(Error::Parse("empty composition".into()));
        }
        while let Some(c) = chars.next() {
            if c == 'n' {
                spec.no_containment = true;
                continue;
            }
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            let k: usize = digits.parse().map_err(|_| Error::Parse(format!("missing count after {c:?} in {s:?}")))?;
            match c {
                'f' => spec.fixed += k,
                'm' => spec.moved += k,
                'c' => spec.same_class += k,
                _ => return Err(Error::Parse(format!("unknown atom {c:?} in {s:?}"))),
            }
        }
        Ok(spec)
    }
}

impl fmt::Display for CompositionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in [(self.fixed, 'f'), (self.moved, 'm'), (self.same_class, 'c')] {
            if k > 0 {
                write!(f, "{c}{k}")?;
            }
        }
        if self.no_containment {
            write!(f, "n")?;
        }
        Ok(())
    }
}

fn fixed_points(group: &ParaGroup) -> Vec<usize> {
    (0..3 * group.n()).filter(|&p| group.elements().iter().all(|g| g.image(p) == p)).collect()
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    fn rec(items: &[usize], k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// All point sets of the given composition for `group`, each sorted.
pub fn t_candidates(group: &ParaGroup, spec: &CompositionSpec) -> Vec<Vec<usize>> {
    let n = group.n();
    let fixed = fixed_points(group);
    let moved: Vec<usize> = (0..3 * n).filter(|p| !fixed.contains(p)).collect();
    let mut partial: Vec<Vec<usize>> = Vec::new();
    for f in combinations(&fixed, spec.fixed) {
        for m in combinations(&moved, spec.moved) {
            partial.push(f.iter().chain(&m).copied().collect());
        }
    }
    let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
    for base in partial {
        if spec.same_class == 0 {
            let mut t = base;
            t.sort_unstable();
            out.insert(t);
            continue;
        }
        for x in 0..3 {
            let class: Vec<usize> = (x * n..(x + 1) * n).filter(|p| !base.contains(p)).collect();
            for c in combinations(&class, spec.same_class) {
                let mut t: Vec<usize> = base.iter().chain(&c).copied().collect();
                t.sort_unstable();
                out.insert(t);
            }
        }
    }
    out.into_iter().collect()
}

/// True iff the points of `t` lie in pairwise different classes and, when
/// there are three of them, form one of the blocks.
fn contained_in_block(n: usize, t: &[usize], blocks: &[Triple]) -> bool {
    let classes: BTreeSet<usize> = t.iter().map(|p| p / n).collect();
    if classes.len() != t.len() {
        return false;
    }
    blocks.iter().any(|b| {
        let ids = b.point_ids(n);
        t.iter().all(|p| ids.contains(p))
    })
}

const POINT: u32 = 0;
const T_POINT: u32 = 1;
const CLASS: u32 = 2;
const ELEMENT: u32 = 3;
const ARROW_TAIL: u32 = 4;
const ARROW_HEAD: u32 = 5;
const BLOCK: u32 = 6;
const OTHER_TRIPLE: u32 = 7;

/// Graph of a seed, optionally with the remaining triples of a square.
fn seed_graph(group: &ParaGroup, t: &[usize], s: &[Triple], rest: &[Triple]) -> ColoredGraph {
    let n = group.n();
    let m = 3 * n;
    let mut g = ColoredGraph::new(m);
    for p in 0..m {
        g.set_color(p as u32, if t.contains(&p) { T_POINT } else { POINT });
    }
    for x in 0..3 {
        let v = g.add_vertex(CLASS);
        for i in 0..n {
            g.add_edge(v, (x * n + i) as u32);
        }
    }
    for h in group.elements().iter().filter(|h| !h.is_identity()) {
        let e = g.add_vertex(ELEMENT);
        for p in 0..m {
            let tail = g.add_vertex(ARROW_TAIL);
            let head = g.add_vertex(ARROW_HEAD);
            g.add_edge(e, tail);
            g.add_edge(tail, p as u32);
            g.add_edge(tail, head);
            g.add_edge(head, h.image(p) as u32);
        }
    }
    for (triples, color) in [(s, BLOCK), (rest, OTHER_TRIPLE)] {
        for tr in triples {
            let v = g.add_vertex(color);
            for p in tr.point_ids(n) {
                g.add_edge(v, p as u32);
            }
        }
    }
    g
}

fn point_generators(n: usize, c: &Canonical) -> Vec<Paratopism> {
    c.generators
        .iter()
        .map(|gen| {
            let img: Vec<u16> = gen[..3 * n].iter().map(|&x| x as u16).collect();
            Paratopism::from_point_map(n, img).expect("seed graph automorphisms respect classes")
        })
        .filter(|g| !g.is_identity())
        .collect()
}

/// Generators of the normalizer of `group` in the paratopy group.
pub fn normalizer_generators(group: &ParaGroup) -> Vec<Paratopism> {
    let c = canonize(&seed_graph(group, &[], &[], &[]));
    point_generators(group.n(), &c)
}

/// A classified seed with its stabilizer.
#[derive(Clone, Debug, Serialize)]
pub struct Seed {
    #[serde(skip)]
    pub group: ParaGroup,
    pub spec: CompositionSpec,
    /// Point ids of `T`, sorted.
    pub t: Vec<usize>,
    /// Blocks of `S`, sorted.
    pub s: Vec<Triple>,
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub stabilizer_order: BigUint,
    #[serde(skip)]
    pub stabilizer_generators: Vec<Paratopism>,
}

impl Seed {
    fn from_parts(group: &ParaGroup, spec: CompositionSpec, t: Vec<usize>, mut s: Vec<Triple>) -> Seed {
        s.sort_unstable();
        let c = canonize(&seed_graph(group, &t, &s, &[]));
        Seed {
            group: group.clone(),
            spec,
            t,
            s,
            stabilizer_order: c.group_order.clone(),
            stabilizer_generators: point_generators(group.n(), &c),
        }
    }

    /// Checks the seed conditions directly: `S` is pair-disjoint and closed
    /// under the group, every point of `T` lies in `n` blocks, every orbit
    /// meets `T`, and `T` lies in a block unless `no_containment` is set.
    pub fn is_valid(&self) -> bool {
        let n = self.group.n();
        if !pair_disjoint(n, &self.s) {
            return false;
        }
        let set: HashSet<Triple> = self.s.iter().copied().collect();
        let closed = self.s.iter().all(|b| self.group.elements().iter().all(|g| set.contains(&g.apply_triple(*b))));
        let degree_ok = self.t.iter().all(|&p| self.s.iter().filter(|b| b.point_ids(n).contains(&p)).count() == n);
        let orbits_meet = self.s.iter().all(|b| {
            self.group.elements().iter().any(|g| {
                let ids = g.apply_triple(*b).point_ids(n);
                self.t.iter().any(|p| ids.contains(p))
            })
        });
        let contain = self.spec.no_containment || contained_in_block(n, &self.t, &self.s);
        closed && degree_ok && orbits_meet && contain
    }

    /// The seed stabilizer as a list of elements.
    pub fn stabilizer(&self, cap: usize) -> Result<ParaGroup> {
        ParaGroup::closure(self.group.n(), &self.stabilizer_generators, cap)
    }

    /// Every square containing the seed and admitting its group.
    pub fn extend<F>(&self, limits: Limits, visit: F) -> Result<crate::cover::SolveOutcome>
    where
        F: FnMut(&LatinSquare) -> Control,
    {
        Ok(CoverInstance::build(&self.group, &self.s)?.solve(limits, visit))
    }

    /// Text form: header `n |Π| spec`, generators in cycle notation, `T`
    /// and `S`.
    pub fn to_text(&self) -> String {
        let n = self.group.n();
        let gens = self.group.small_generating_set();
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", n, self.group.order(), self.spec);
        let _ = writeln!(out, "generators {}", gens.len());
        for g in &gens {
            let _ = writeln!(out, "{}", g.to_cycle_string());
        }
        let t: Vec<String> = self.t.iter().map(|&p| Point::from_id(p, n).to_string()).collect();
        let _ = writeln!(out, "T {}", t.join(" "));
        let s: Vec<String> = self.s.iter().map(|b| format!("{}.{}.{}", b.row, b.col, b.sym)).collect();
        let _ = writeln!(out, "S {}", s.join(" "));
        out
    }
}

/// Parses seeds written by [`Seed::to_text`], separated by blank lines.
pub fn parse_seeds(text: &str) -> Result<Vec<Seed>> {
    let mut out = Vec::new();
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.starts_with('#')).collect();
    let mut i = 0;
    let bad = |what: &str| Error::Parse(format!("seed file: {what}"));
    while i < lines.len() {
        if lines[i].is_empty() {
            i += 1;
            continue;
        }
        let head: Vec<&str> = lines[i].split_whitespace().collect();
        if head.len() != 3 {
            return Err(bad("header must be `n order spec`"));
        }
        let n: usize = head[0].parse().map_err(|_| bad("order"))?;
        let order: usize = head[1].parse().map_err(|_| bad("group order"))?;
        let spec: CompositionSpec = head[2].parse()?;
        let k: usize = lines
            .get(i + 1)
            .and_then(|l| l.strip_prefix("generators "))
            .and_then(|k| k.trim().parse().ok())
            .ok_or_else(|| bad("generators line"))?;
        let mut gens = Vec::new();
        for j in 0..k {
            let line = lines.get(i + 2 + j).ok_or_else(|| bad("missing generator"))?;
            gens.push(Paratopism::from_cycles(n, line)?);
        }
        let group = ParaGroup::closure(n, &gens, order.max(1))?;
        if group.order() != order {
            return Err(bad("group order does not match its generators"));
        }
        let t_line = lines.get(i + 2 + k).and_then(|l| l.strip_prefix('T')).ok_or_else(|| bad("T line"))?;
        let t: Vec<usize> = t_line
            .split_whitespace()
            .map(|tok| {
                let mut cs = tok.chars();
                let class = cs.next().and_then(|c| crate::square::PointClass::from_letter(c.to_ascii_uppercase())).ok_or_else(|| bad("point"))?;
                let idx: u8 = cs.as_str().parse().map_err(|_| bad("point index"))?;
                Ok(Point::new(class, idx).id(n))
            })
            .collect::<Result<_>>()?;
        let s_line = lines.get(i + 3 + k).and_then(|l| l.strip_prefix('S')).ok_or_else(|| bad("S line"))?;
        let s: Vec<Triple> = s_line
            .split_whitespace()
            .map(|tok| {
                let v: Vec<u8> = tok.split('.').map(|x| x.parse().map_err(|_| bad("triple"))).collect::<Result<_>>()?;
                if v.len() != 3 || v.iter().any(|&x| x as usize >= n) {
                    return Err(bad("triple"));
                }
                Ok(Triple::new(v[0], v[1], v[2]))
            })
            .collect::<Result<_>>()?;
        let seed = Seed::from_parts(&group, spec, t, s);
        if !seed.is_valid() {
            return Err(bad("seed violates the seed conditions"));
        }
        out.push(seed);
        i += 4 + k;
    }
    Ok(out)
}

/// Orbits of `group` on triples that meet `t` and cover no pair twice.
fn orbits_meeting(group: &ParaGroup, t: &[usize]) -> Vec<Vec<Triple>> {
    let n = group.n();
    triple_orbits(group)
        .into_iter()
        .filter(|o| o.iter().any(|b| b.point_ids(n).iter().any(|p| t.contains(p))))
        .filter(|o| pair_disjoint(n, o))
        .collect()
}

/// Pair ids containing a point of `t`.
fn pairs_at(n: usize, t: &[usize]) -> Vec<usize> {
    (0..3 * n * n)
        .filter(|&p| {
            let (a, b) = pair_points(p, n);
            t.contains(&a.id(n)) || t.contains(&b.id(n))
        })
        .collect()
}

/// Orbits of point sets under the normalizer; returns one set per orbit.
fn t_orbit_representatives(group: &ParaGroup, spec: &CompositionSpec) -> Vec<Vec<usize>> {
    let cands = t_candidates(group, spec);
    let index: HashMap<Vec<usize>, usize> = cands.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let gens = normalizer_generators(group);
    let mut parent: Vec<usize> = (0..cands.len()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for (i, t) in cands.iter().enumerate() {
        for g in &gens {
            let mut img: Vec<usize> = t.iter().map(|&p| g.image(p)).collect();
            img.sort_unstable();
            let j = index[&img];
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..cands.len()).filter(|&i| find(&mut parent, i) == i).map(|i| cands[i].clone()).collect()
}

/// One representative per isomorphism class of seeds for `group`.
///
/// For each orbit of point sets `T`, blocks are added one orbit at a time
/// and partial seeds are reduced to isomorphism classes after every step.
pub fn classify_seeds(group: &ParaGroup, spec: &CompositionSpec) -> Vec<Seed> {
    let n = group.n();
    let mut out = Vec::new();
    for t in t_orbit_representatives(group, spec) {
        let orbits = orbits_meeting(group, &t);
        let orbit_pairs: Vec<Vec<usize>> = orbits.iter().map(|o| o.iter().flat_map(|b| b.pair_ids(n)).collect()).collect();
        let needed = pairs_at(n, &t);
        let mut level: Vec<(Vec<usize>, Vec<bool>)> = vec![(Vec::new(), vec![false; 3 * n * n])];
        while !level.is_empty() {
            let mut next = Vec::new();
            let mut seen: HashSet<Vec<u64>> = HashSet::new();
            for (chosen, used) in &level {
                for (k, pairs) in orbit_pairs.iter().enumerate() {
                    if chosen.contains(&k) || pairs.iter().any(|&p| used[p]) {
                        continue;
                    }
                    let mut ch = chosen.clone();
                    ch.push(k);
                    ch.sort_unstable();
                    let mut u = used.clone();
                    for &p in pairs {
                        u[p] = true;
                    }
                    let blocks: Vec<Triple> = ch.iter().flat_map(|&i| orbits[i].iter().copied()).collect();
                    let cert = canonize(&seed_graph(group, &t, &blocks, &[])).certificate;
                    if !seen.insert(cert) {
                        continue;
                    }
                    let open: Vec<usize> = needed.iter().copied().filter(|&p| !u[p]).collect();
                    if open.is_empty() {
                        if spec.no_containment || contained_in_block(n, &t, &blocks) {
                            out.push(Seed::from_parts(group, *spec, t.clone(), blocks));
                        }
                        continue;
                    }
                    let feasible = open.iter().all(|&p| {
                        orbit_pairs.iter().enumerate().any(|(j, q)| {
                            !ch.contains(&j) && q.contains(&p) && q.iter().all(|&x| !u[x])
                        })
                    });
                    if feasible {
                        next.push((ch, u));
                    }
                }
            }
            level = next;
        }
    }
    out
}

/// Seeds by brute force: every admissible `T`, every exact cover of the
/// pairs at `T`, reduced by certificates. For small cases only.
pub fn classify_seeds_exhaustive(group: &ParaGroup, spec: &CompositionSpec) -> Vec<Seed> {
    let n = group.n();
    let mut certs: HashMap<Vec<u64>, Seed> = HashMap::new();
    for t in t_candidates(group, spec) {
        let orbits = orbits_meeting(group, &t);
        let needed = pairs_at(n, &t);
        let col: HashMap<usize, u32> = needed.iter().enumerate().map(|(i, &p)| (p, i as u32)).collect();
        let mut secondary: HashMap<usize, u32> = HashMap::new();
        let rows: Vec<Vec<u32>> = orbits
            .iter()
            .map(|o| {
                let mut cols: Vec<u32> = o
                    .iter()
                    .flat_map(|b| b.pair_ids(n))
                    .map(|p| match col.get(&p) {
                        Some(&c) => c,
                        None => {
                            let next = (needed.len() + secondary.len()) as u32;
                            *secondary.entry(p).or_insert(next)
                        }
                    })
                    .collect();
                cols.sort_unstable();
                cols
            })
            .collect();
        let mut dlx = crate::cover::ExactCover::new(needed.len(), secondary.len(), &rows);
        dlx.solve(Limits::default(), |chosen| {
            let blocks: Vec<Triple> = chosen.iter().flat_map(|&r| orbits[r].iter().copied()).collect();
            if spec.no_containment || contained_in_block(n, &t, &blocks) {
                let mut sorted = blocks.clone();
                sorted.sort_unstable();
                let cert = canonize(&seed_graph(group, &t, &sorted, &[])).certificate;
                certs.entry(cert).or_insert_with(|| Seed::from_parts(group, *spec, t.clone(), sorted));
            }
            Control::Continue
        });
    }
    certs.into_values().collect()
}

/// A seed of the class contained in a square.
#[derive(Clone, Debug)]
pub struct Occurrence {
    pub group: ParaGroup,
    pub t: Vec<usize>,
    pub s: Vec<Triple>,
}

/// Subgroups of `container` conjugate to `rep`. `rep` must be cyclic or a
/// Klein four-group.
pub fn conjugate_subgroups(container: &ParaGroup, rep: &ParaGroup) -> Result<Vec<ParaGroup>> {
    let n = container.n();
    let k = rep.order();
    let cyclic = rep.elements().iter().any(|g| g.element_order() == k);
    let mut found: BTreeSet<Vec<Paratopism>> = BTreeSet::new();
    if cyclic {
        for g in container.elements().iter().filter(|g| g.element_order() == k) {
            found.insert(ParaGroup::closure(n, std::slice::from_ref(g), k)?.elements().to_vec());
        }
    } else if k == 4 {
        let inv: Vec<&Paratopism> = container.elements().iter().filter(|g| g.element_order() == 2).collect();
        for i in 0..inv.len() {
            for j in i + 1..inv.len() {
                if inv[i].compose(inv[j]) == inv[j].compose(inv[i]) {
                    found.insert(ParaGroup::closure(n, &[inv[i].clone(), inv[j].clone()], 4)?.elements().to_vec());
                }
            }
        }
    } else {
        return Err(Error::Unsupported(format!("subgroups of order {k} that are not cyclic")));
    }
    let mut out = Vec::new();
    for elems in found {
        let sub = ParaGroup::closure(n, &elems, k)?;
        if conjugating_element(rep, &sub).is_some() {
            out.push(sub);
        }
    }
    Ok(out)
}

/// Point sets `T` valid for `sub` inside `l`; the blocks are then forced.
pub fn valid_t_sets(l: &LatinSquare, sub: &ParaGroup, spec: &CompositionSpec) -> Vec<Vec<usize>> {
    let n = l.order();
    let triples = l.triples();
    t_candidates(sub, spec)
        .into_iter()
        .filter(|t| spec.no_containment || contained_in_block(n, t, &triples))
        .collect()
}

fn forced_blocks(l: &LatinSquare, sub: &ParaGroup, t: &[usize]) -> Vec<Triple> {
    let n = l.order();
    let mut s: BTreeSet<Triple> = BTreeSet::new();
    for b in l.triples() {
        if b.point_ids(n).iter().any(|p| t.contains(p)) {
            for g in sub.elements() {
                s.insert(g.apply_triple(b));
            }
        }
    }
    s.into_iter().collect()
}

/// Every seed of the class of `rep` contained in `l`, given the
/// autoparatopy group of `l`.
pub fn occurrences(l: &LatinSquare, par: &ParaGroup, rep: &ParaGroup, spec: &CompositionSpec) -> Result<Vec<Occurrence>> {
    let mut out = Vec::new();
    for sub in conjugate_subgroups(par, rep)? {
        for t in valid_t_sets(l, &sub, spec) {
            let s = forced_blocks(l, &sub, &t);
            out.push(Occurrence { group: sub.clone(), t, s });
        }
    }
    Ok(out)
}

/// Number of seeds of the class of `rep` contained in `l`.
pub fn seeds_in(l: &LatinSquare, rep: &ParaGroup, spec: &CompositionSpec, cap: usize) -> Result<usize> {
    let par = autoparatopy_group(l).closure(l.order(), cap)?;
    Ok(occurrences(l, &par, rep, spec)?.len())
}

fn occurrence_certificate(l: &LatinSquare, group: &ParaGroup, t: &[usize], s: &[Triple]) -> Vec<u64> {
    let set: HashSet<Triple> = s.iter().copied().collect();
    let rest: Vec<Triple> = l.triples().into_iter().filter(|b| !set.contains(b)).collect();
    canonize(&seed_graph(group, t, s, &rest)).certificate
}

/// The two rejection tests: the seed lies in the canonical orbit of seed
/// occurrences of `l`, and `l` is the smallest square in its orbit under
/// the seed stabilizer. `occ` are the occurrences in `l`.
pub fn accept(l: &LatinSquare, seed: &Seed, stabilizer: &ParaGroup, occ: &[Occurrence]) -> bool {
    let own = occurrence_certificate(l, &seed.group, &seed.t, &seed.s);
    let canonical = occ.iter().map(|o| occurrence_certificate(l, &o.group, &o.t, &o.s)).min();
    if canonical.as_ref() != Some(&own) {
        return false;
    }
    stabilizer.elements().iter().all(|g| g.apply(l) >= *l)
}

/// Outcome of extending one seed.
#[derive(Clone, Debug, Serialize)]
pub struct SeedRun {
    pub seed_id: usize,
    pub extensions: u64,
    pub accepted: Vec<LatinSquare>,
    /// Sum over accepted squares of `seeds_in(L) / |Γ_L|`.
    #[serde(serialize_with = "serialize_ratio")]
    pub lhs_part: BigRational,
}

fn serialize_ratio<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Extends a seed and applies isomorph rejection to every extension. A
/// search cut short by `limits` is reported as an exhausted budget.
pub fn run_seed(seed_id: usize, seed: &Seed, rep: &ParaGroup, cap: usize, limits: Limits) -> Result<SeedRun> {
    let stab = seed.stabilizer(cap)?;
    let n = seed.group.n();
    let mut accepted = Vec::new();
    let mut lhs = BigRational::zero();
    let mut failure = None;
    let outcome = seed.extend(limits, |l| {
        let mut step = || -> Result<()> {
            let par = autoparatopy_group(l).closure(n, cap)?;
            let occ = occurrences(l, &par, rep, &seed.spec)?;
            if accept(l, seed, &stab, &occ) {
                lhs += BigRational::new(BigInt::from(occ.len()), BigInt::from(par.order()));
                accepted.push(l.clone());
            }
            Ok(())
        };
        match step() {
            Ok(()) => Control::Continue,
            Err(e) => {
                failure = Some(e);
                Control::Stop
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    if !outcome.complete {
        return Err(Error::BudgetExhausted);
    }
    Ok(SeedRun { seed_id, extensions: outcome.count, accepted, lhs_part: lhs })
}

/// Both sides of the double count for one class.
#[derive(Clone, Debug, Serialize)]
pub struct DoubleCount {
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub lhs: BigUint,
    #[serde(serialize_with = "crate::serialize_biguint")]
    pub rhs: BigUint,
}

impl DoubleCount {
    pub fn agrees(&self) -> bool {
        self.lhs == self.rhs
    }
}

fn integral(x: BigRational, what: &str) -> Result<BigUint> {
    if !x.is_integer() {
        return Err(Error::NonIntegral(format!("{what} = {x}")));
    }
    x.to_integer().to_biguint().ok_or_else(|| Error::Inconsistent(format!("{what} is negative")))
}

/// `|Γ| Σ_L seeds_in(L)/|Γ_L|` against `|Γ| Σ_seeds ext/|Γ_seed|`.
pub fn double_count(n: usize, seeds: &[Seed], runs: &[SeedRun]) -> Result<DoubleCount> {
    let gamma = BigRational::from_integer(BigInt::from(gamma_order(n)));
    let mut lhs = BigRational::zero();
    let mut rhs = BigRational::zero();
    for run in runs {
        lhs += &run.lhs_part;
        let seed = &seeds[run.seed_id];
        rhs += BigRational::new(BigInt::from(run.extensions), BigInt::from(seed.stabilizer_order.clone()));
    }
    Ok(DoubleCount { lhs: integral(lhs * &gamma, "lhs")?, rhs: integral(rhs * &gamma, "rhs")? })
}

/// An admissible group class with the spec used for its seeds.
#[derive(Clone, Debug, Serialize)]
pub struct AdmissibleClass {
    pub label: String,
    #[serde(skip)]
    pub group: ParaGroup,
    pub spec: CompositionSpec,
}

/// Groups of odd prime order and groups of order 4 with eligible
/// involutions and no subsquare obstruction.
pub fn admissible_classes(n: usize) -> Vec<AdmissibleClass> {
    let mut out = Vec::new();
    for (i, t) in prime_order_types(n).iter().enumerate() {
        if t.p == 2 {
            continue;
        }
        let g = prime_representative(t, n);
        let group = ParaGroup::closure(n, &[g], t.p).expect("prime order");
        let spec = CompositionSpec::default_for(&group);
        out.push(AdmissibleClass { label: format!("p{}-{}", t.p, i + 1), group, spec });
    }
    for (i, c) in classify_order4(n).into_iter().enumerate() {
        if subsquare_obstruction(&c.group).is_some() {
            continue;
        }
        let spec = CompositionSpec::default_for(&c.group);
        out.push(AdmissibleClass { label: format!("o4-{}", i + 1), group: c.group, spec });
    }
    out
}

/// Everything produced for one admissible class.
#[derive(Clone, Debug, Serialize)]
pub struct ClassRun {
    pub seeds: Vec<Seed>,
    pub runs: Vec<SeedRun>,
    pub double_count: DoubleCount,
}

impl ClassRun {
    pub fn accepted(&self) -> impl Iterator<Item = &LatinSquare> {
        self.runs.iter().flat_map(|r| r.accepted.iter())
    }
}

/// Classifies seeds, extends every seed and audits the double count.
pub fn run_class(group: &ParaGroup, spec: &CompositionSpec, cap: usize) -> Result<ClassRun> {
    let seeds = classify_seeds(group, spec);
    let runs = seeds.iter().enumerate().map(|(i, s)| run_seed(i, s, group, cap, Limits::default())).collect::<Result<Vec<_>>>()?;
    let double_count = double_count(group.n(), &seeds, &runs)?;
    Ok(ClassRun { seeds, runs, double_count })
}

/// Append-only record of finished seeds: `seed_id ext accepted lhs_part`.
#[derive(Clone, Debug, Default)]
pub struct RunLedger {
    pub records: Vec<(usize, u64, usize, BigRational)>,
}

impl RunLedger {
    pub fn parse(text: &str) -> Result<RunLedger> {
        let mut records = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')) {
            let f: Vec<&str> = line.split('\t').collect();
            let bad = || Error::Parse(format!("ledger line {line:?}"));
            if f.len() != 4 {
                return Err(bad());
            }
            let ratio: BigRational = f[3].parse().map_err(|_| bad())?;
            records.push((f[0].parse().map_err(|_| bad())?, f[1].parse().map_err(|_| bad())?, f[2].parse().map_err(|_| bad())?, ratio));
        }
        Ok(RunLedger { records })
    }

    pub fn line(run: &SeedRun) -> String {
        format!("{}\t{}\t{}\t{}\n", run.seed_id, run.extensions, run.accepted.len(), run.lhs_part)
    }

    pub fn done(&self, seed_id: usize) -> bool {
        self.records.iter().any(|r| r.0 == seed_id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissible::PrimeType;

    fn prime_group(n: usize, t: PrimeType) -> ParaGroup {
        ParaGroup::closure(n, &[prime_representative(&t, n)], t.p).unwrap()
    }

    #[test]
    fn spec_round_trip() {
        for s in ["f3", "f1m2", "c2n", "f3n", "m1", "f1m1"] {
            let spec: CompositionSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("x2".parse::<CompositionSpec>().is_err());
        assert!("f".parse::<CompositionSpec>().is_err());
    }

    #[test]
    fn level_search_matches_exhaustive_at_five() {
        for t in prime_order_types(5).into_iter().filter(|t| t.p != 2) {
            let g = prime_group(5, t);
            let spec = CompositionSpec::default_for(&g);
            let a = classify_seeds(&g, &spec);
            let b = classify_seeds_exhaustive(&g, &spec);
            assert_eq!(a.len(), b.len(), "{t:?}");
            assert!(a.iter().all(|s| s.is_valid()));
        }
    }

    #[test]
    fn totally_symmetric_square_has_165_pairs() {
        let n = 11;
        let l = LatinSquare::from_array(
            &(0..n).map(|r| (0..n).map(|c| ((2 * n - r - c) % n) as u8).collect::<Vec<u8>>()).collect::<Vec<_>>(),
        )
        .unwrap();
        let t = PrimeType { p: 3, f: [0, 0, 0], fixed_classes: 0 };
        let g = prime_group(n, t);
        assert!(g.stabilizes(&l));
        assert_eq!(valid_t_sets(&l, &g, &"c2n".parse().unwrap()).len(), 165);
    }

    #[test]
    fn seed_text_round_trip() {
        let g = prime_group(5, PrimeType { p: 5, f: [5, 0, 0], fixed_classes: 3 });
        let seeds = classify_seeds(&g, &"f1m1".parse().unwrap());
        assert!(!seeds.is_empty());
        let text: String = seeds.iter().map(|s| s.to_text() + "\n").collect();
        let back = parse_seeds(&text).unwrap();
        assert_eq!(back.len(), seeds.len());
        for (a, b) in seeds.iter().zip(&back) {
            assert_eq!((&a.t, &a.s, &a.stabilizer_order), (&b.t, &b.s, &b.stabilizer_order));
        }
    }

    #[test]
    fn double_count_small_orders() {
        for n in 3..=5 {
            for class in admissible_classes(n) {
                let run = run_class(&class.group, &class.spec, 1 << 20).unwrap();
                assert!(run.double_count.agrees(), "n={n} {} {:?}", class.label, run.double_count);
            }
        }
    }
}
