//! Latin squares as triple systems over the point classes rows, columns and
//! symbols.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the three point classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PointClass {
    Row,
    Col,
    Sym,
}

impl PointClass {
    pub const ALL: [PointClass; 3] = [PointClass::Row, PointClass::Col, PointClass::Sym];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> PointClass {
        Self::ALL[i]
    }

    pub fn letter(self) -> char {
        match self {
            PointClass::Row => 'R',
            PointClass::Col => 'C',
            PointClass::Sym => 'S',
        }
    }

    pub fn from_letter(c: char) -> Option<PointClass> {
        match c {
            'R' => Some(PointClass::Row),
            'C' => Some(PointClass::Col),
            'S' => Some(PointClass::Sym),
            _ => None,
        }
    }
}

/// A point `(class, index)`. Globally points are numbered `class * n + index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub class: PointClass,
    pub index: u8,
}

impl Point {
    pub fn new(class: PointClass, index: u8) -> Point {
        Point { class, index }
    }

    pub fn id(self, n: usize) -> usize {
        self.class.index() * n + self.index as usize
    }

    pub fn from_id(id: usize, n: usize) -> Point {
        Point { class: PointClass::from_index(id / n), index: (id % n) as u8 }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.class.letter().to_ascii_lowercase(), self.index)
    }
}

/// A triple holding one row, one column and one symbol.
///
/// The derived order compares row, then column, then symbol, which is the
/// lexicographic order on points with `R < C < S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub row: u8,
    pub col: u8,
    pub sym: u8,
}

impl Triple {
    pub fn new(row: u8, col: u8, sym: u8) -> Triple {
        Triple { row, col, sym }
    }

    pub fn get(self, class: PointClass) -> u8 {
        match class {
            PointClass::Row => self.row,
            PointClass::Col => self.col,
            PointClass::Sym => self.sym,
        }
    }

    /// Builds a triple from three points, one per class, in any order.
    pub fn from_points(points: [Point; 3]) -> Option<Triple> {
        let mut slots = [None; 3];
        for p in points {
            if slots[p.class.index()].replace(p.index).is_some() {
                return None;
            }
        }
        Some(Triple { row: slots[0]?, col: slots[1]?, sym: slots[2]? })
    }

    /// Global point ids `[row, col, sym]`.
    pub fn point_ids(self, n: usize) -> [usize; 3] {
        [self.row as usize, n + self.col as usize, 2 * n + self.sym as usize]
    }

    /// Indices of the three cross-class pairs inside the triple, in
    /// `0..3n²`: row-col pairs first, then row-sym, then col-sym.
    pub fn pair_ids(self, n: usize) -> [usize; 3] {
        let (r, c, s) = (self.row as usize, self.col as usize, self.sym as usize);
        [r * n + c, n * n + r * n + s, 2 * n * n + c * n + s]
    }
}

/// Decodes a pair index produced by [`Triple::pair_ids`].
pub fn pair_points(pair: usize, n: usize) -> (Point, Point) {
    let block = pair / (n * n);
    let a = ((pair % (n * n)) / n) as u8;
    let b = (pair % n) as u8;
    let (ca, cb) = match block {
        0 => (PointClass::Row, PointClass::Col),
        1 => (PointClass::Row, PointClass::Sym),
        _ => (PointClass::Col, PointClass::Sym),
    };
    (Point::new(ca, a), Point::new(cb, b))
}

/// A pair of points covered a wrong number of times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub pair: (Point, Point),
    pub covered: usize,
}

/// Outcome of [`validate`]: empty `violations` means the triples form a
/// Latin square.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every cross-class pair lies in exactly one triple.
///
/// Out-of-range indices and repeated triples are input errors rather than
/// violations.
pub fn validate(n: usize, triples: &[Triple]) -> Result<ValidityReport> {
    if n == 0 || n > 255 {
        return Err(Error::Unsupported(format!("order {n}")));
    }
    let mut seen = std::collections::HashSet::new();
    let mut cover = vec![0usize; 3 * n * n];
    for &t in triples {
        if t.row as usize >= n || t.col as usize >= n || t.sym as usize >= n {
            return Err(Error::InvalidSquare(format!("triple {t:?} out of range for order {n}")));
        }
        if !seen.insert(t) {
            return Err(Error::InvalidSquare(format!("duplicate triple {t:?}")));
        }
        for p in t.pair_ids(n) {
            cover[p] += 1;
        }
    }
    let violations = cover
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c != 1)
        .map(|(p, &c)| Violation { pair: pair_points(p, n), covered: c })
        .collect();
    Ok(ValidityReport { violations })
}

/// A Latin square of order `n`, stored as its array of symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatinSquare {
    n: usize,
    cells: Vec<u8>,
}

impl LatinSquare {
    pub fn order(&self) -> usize {
        self.n
    }

    /// Symbol in row `r`, column `c`.
    pub fn at(&self, r: usize, c: usize) -> u8 {
        self.cells[r * self.n + c]
    }

    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    /// Builds a square from a set of triples, rejecting anything that is not a
    /// Latin square.
    pub fn from_triples(n: usize, triples: &[Triple]) -> Result<LatinSquare> {
        let report = validate(n, triples)?;
        if let Some(v) = report.violations.first() {
            return Err(Error::InvalidSquare(format!(
                "pair ({}, {}) covered {} times",
                v.pair.0, v.pair.1, v.covered
            )));
        }
        let mut cells = vec![0u8; n * n];
        for t in triples {
            cells[t.row as usize * n + t.col as usize] = t.sym;
        }
        Ok(LatinSquare { n, cells })
    }

    /// Builds a square from an array of symbols, rejecting non-Latin arrays.
    pub fn from_array<R: AsRef<[u8]>>(rows: &[R]) -> Result<LatinSquare> {
        let n = rows.len();
        let mut triples = Vec::with_capacity(n * n);
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::InvalidSquare(format!("row {r} has {} entries, expected {n}", row.len())));
            }
            for (c, &s) in row.iter().enumerate() {
                triples.push(Triple::new(r as u8, c as u8, s));
            }
        }
        Self::from_triples(n, &triples)
    }

    /// Trusted constructor for internally generated cell arrays.
    pub(crate) fn from_cells_unchecked(n: usize, cells: Vec<u8>) -> LatinSquare {
        debug_assert_eq!(cells.len(), n * n);
        LatinSquare { n, cells }
    }

    pub fn to_array(&self) -> Vec<Vec<u8>> {
        self.cells.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// Triples in increasing order.
    pub fn triples(&self) -> Vec<Triple> {
        let n = self.n;
        (0..n * n)
            .map(|i| Triple::new((i / n) as u8, (i % n) as u8, self.cells[i]))
            .collect()
    }

    /// Cayley table of the cyclic group of order `n`.
    pub fn cyclic(n: usize) -> LatinSquare {
        let cells = (0..n * n).map(|i| ((i / n + i % n) % n) as u8).collect();
        LatinSquare { n, cells }
    }

    /// The third point of the unique triple through two points of different
    /// classes.
    pub fn complete_pair(&self, a: Point, b: Point) -> Point {
        let n = self.n;
        let mut idx = [None; 3];
        idx[a.class.index()] = Some(a.index as usize);
        idx[b.class.index()] = Some(b.index as usize);
        match idx {
            [Some(r), Some(c), None] => Point::new(PointClass::Sym, self.cells[r * n + c]),
            [Some(r), None, Some(s)] => {
                let c = (0..n).find(|&c| self.cells[r * n + c] as usize == s).unwrap();
                Point::new(PointClass::Col, c as u8)
            }
            [None, Some(c), Some(s)] => {
                let r = (0..n).find(|&r| self.cells[r * n + c] as usize == s).unwrap();
                Point::new(PointClass::Row, r as u8)
            }
            _ => panic!("points must come from different classes"),
        }
    }

    /// Writes the square in the text format: `n`, then one line per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for row in self.cells.chunks(self.n) {
            let line: Vec<String> = row.iter().map(|s| s.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for LatinSquare {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses zero or more squares in the text format, separated by blank lines.
pub fn parse_squares(text: &str) -> Result<Vec<LatinSquare>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.starts_with('#')).peekable();
    let mut squares = Vec::new();
    loop {
        while lines.peek().is_some_and(|l| l.is_empty()) {
            lines.next();
        }
        let Some(header) = lines.next() else { break };
        let n: usize = header
            .parse()
            .map_err(|_| Error::Parse(format!("expected order, found {header:?}")))?;
        let mut rows = Vec::with_capacity(n);
        for r in 0..n {
            let line = lines.next().ok_or_else(|| Error::Parse(format!("missing row {r}")))?;
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<u8>().map_err(|_| Error::Parse(format!("bad symbol {t:?}"))))
                .collect::<Result<Vec<u8>>>()?;
            rows.push(row);
        }
        squares.push(LatinSquare::from_array(&rows)?);
    }
    Ok(squares)
}

/// Hex encoding of a certificate, one word after another.
pub fn certificate_to_hex(cert: &[u64]) -> String {
    cert.iter().map(|w| format!("{w:016x}")).collect()
}

pub fn certificate_from_hex(hex: &str) -> Result<Vec<u64>> {
    let hex = hex.trim();
    if !hex.len().is_multiple_of(16) {
        return Err(Error::Parse("certificate length is not a multiple of 16".into()));
    }
    (0..hex.len() / 16)
        .map(|i| {
            u64::from_str_radix(&hex[16 * i..16 * i + 16], 16)
                .map_err(|e| Error::Parse(format!("certificate: {e}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_three_is_valid() {
        let l = LatinSquare::from_array(&[[0u8, 1, 2], [1, 2, 0], [2, 0, 1]]).unwrap();
        assert!(validate(3, &l.triples()).unwrap().is_ok());
        assert_eq!(l, LatinSquare::cyclic(3));
    }

    #[test]
    fn repeated_symbol_is_reported() {
        let triples = [
            Triple::new(0, 0, 0),
            Triple::new(0, 1, 0),
            Triple::new(1, 0, 1),
            Triple::new(1, 1, 1),
        ];
        let report = validate(2, &triples).unwrap();
        let pair = (Point::new(PointClass::Row, 0), Point::new(PointClass::Sym, 0));
        assert!(report.violations.contains(&Violation { pair, covered: 2 }));
        assert!(LatinSquare::from_array(&[[0u8, 0], [1, 1]]).is_err());
    }

    #[test]
    fn duplicates_and_range_are_errors() {
        let t = Triple::new(0, 0, 0);
        assert!(validate(1, &[t, t]).is_err());
        assert!(validate(1, &[Triple::new(0, 0, 1)]).is_err());
    }

    #[test]
    fn small_constructions() {
        let one = LatinSquare::from_array(&[[0u8]]).unwrap();
        assert_eq!(one.triples(), vec![Triple::new(0, 0, 0)]);
        let two = LatinSquare::from_array(&[[0u8, 1], [1, 0]]).unwrap();
        assert_eq!(two.triples().len(), 4);
    }

    #[test]
    fn text_round_trip() {
        let l = LatinSquare::cyclic(4);
        let parsed = parse_squares(&format!("{}\n{}", l.to_text(), LatinSquare::cyclic(2).to_text())).unwrap();
        assert_eq!(parsed, vec![l, LatinSquare::cyclic(2)]);
    }

    #[test]
    fn complete_pair_finds_third_point() {
        let l = LatinSquare::cyclic(5);
        let r = Point::new(PointClass::Row, 2);
        let s = Point::new(PointClass::Sym, 1);
        let c = l.complete_pair(r, s);
        assert_eq!(c, Point::new(PointClass::Col, 4));
        assert_eq!(l.complete_pair(c, s), r);
    }

    #[test]
    fn pair_ids_decode() {
        let n = 4;
        let t = Triple::new(1, 2, 3);
        let ids = t.pair_ids(n);
        assert_eq!(pair_points(ids[0], n), (Point::new(PointClass::Row, 1), Point::new(PointClass::Col, 2)));
        assert_eq!(pair_points(ids[2], n), (Point::new(PointClass::Col, 2), Point::new(PointClass::Sym, 3)));
    }

    #[test]
    fn hex_round_trip() {
        let cert = vec![0u64, 17, u64::MAX];
        assert_eq!(certificate_from_hex(&certificate_to_hex(&cert)).unwrap(), cert);
    }
}
