use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Config, CspaceError};

pub const DEFAULT_TOL: f64 = 0.05;

/// A docking event: `A(i)` x at station `i`, `B(j)` y at station `j`,
/// `AB(i, j)` both docked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GrammarSymbol {
    A(u8),
    B(u8),
    AB(u8, u8),
}

use GrammarSymbol::{A, AB, B};

/// Boundary zones counterclockwise from angle 0, one every `pi / 6`.
pub const CYCLIC_ORDER: [GrammarSymbol; 12] = [
    A(1),
    AB(1, 2),
    B(2),
    AB(3, 2),
    A(3),
    AB(3, 1),
    B(1),
    AB(2, 1),
    A(2),
    AB(2, 3),
    B(3),
    AB(1, 3),
];

impl GrammarSymbol {
    pub fn new_ab(i: u8, j: u8) -> Result<Self, CspaceError> {
        if !(1..=3).contains(&i) || !(1..=3).contains(&j) || i == j {
            return Err(CspaceError::BadToken(format!("AB{i}{j}")));
        }
        Ok(AB(i, j))
    }

    /// Position in [`CYCLIC_ORDER`].
    pub fn cyclic_index(self) -> usize {
        CYCLIC_ORDER
            .iter()
            .position(|&s| s == self)
            .expect("every symbol is in the cyclic order")
    }

    /// Midpoint angle of the zone on the unit circle.
    pub fn zone_midpoint(self) -> f64 {
        self.cyclic_index() as f64 * PI / 6.0
    }

    pub fn is_corner(self) -> bool {
        matches!(self, AB(..))
    }

    /// Whether `other` can be seen together with `self` on one stretch of
    /// the boundary: an AB symbol and either of its single-vehicle parts.
    pub fn adjoins(self, other: GrammarSymbol) -> bool {
        match (self, other) {
            (AB(i, _), A(k)) | (A(k), AB(i, _)) => i == k,
            (AB(_, j), B(k)) | (B(k), AB(_, j)) => j == k,
            _ => false,
        }
    }

    /// The zone on the unit circle for docking tolerance `tol`.
    pub fn boundary_arc(self, tol: f64) -> ZoneArc {
        let half = corner_half_width(tol);
        let mid = self.zone_midpoint();
        if self.is_corner() {
            ZoneArc {
                start: super::reduce_angle(mid - half),
                width: 2.0 * half,
            }
        } else {
            ZoneArc {
                start: super::reduce_angle(mid - PI / 6.0 + half),
                width: PI / 3.0 - 2.0 * half,
            }
        }
    }
}

/// Angular half-width of a corner zone on the unit circle.
pub fn corner_half_width(tol: f64) -> f64 {
    PI / 6.0 - (2.0 / 3.0) * (1.0 - tol).atan()
}

/// Counterclockwise arc `[start, start + width]`. Zero width is a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneArc {
    pub start: f64,
    pub width: f64,
}

impl ZoneArc {
    pub fn contains(&self, theta: f64) -> bool {
        let d = super::reduce_angle(theta - self.start);
        d <= self.width + 1e-12 || d > std::f64::consts::TAU - 1e-12
    }
}

pub fn boundary_angle(s: GrammarSymbol) -> ZoneArc {
    s.boundary_arc(0.0)
}

impl fmt::Display for GrammarSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            A(i) => write!(f, "A{i}"),
            B(j) => write!(f, "B{j}"),
            AB(i, j) => write!(f, "AB{i}{j}"),
        }
    }
}

impl FromStr for GrammarSymbol {
    type Err = CspaceError;

    fn from_str(tok: &str) -> Result<Self, CspaceError> {
        let bad = || CspaceError::BadToken(tok.to_string());
        let digit = |c: char| {
            c.to_digit(10)
                .map(|d| d as u8)
                .filter(|d| (1..=3).contains(d))
                .ok_or_else(bad)
        };
        let t = tok.trim().replace('_', "");
        let chars: Vec<char> = t.chars().collect();
        match chars.as_slice() {
            ['A', 'B', i, j] => {
                let (i, j) = (digit(*i)?, digit(*j)?);
                if i == j {
                    return Err(bad());
                }
                Ok(AB(i, j))
            }
            ['A', i] => Ok(A(digit(*i)?)),
            ['B', j] => Ok(B(digit(*j)?)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for GrammarSymbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GrammarSymbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Nonempty cyclic word over the docking grammar.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<GrammarSymbol>", into = "Vec<GrammarSymbol>")]
pub struct Word(Vec<GrammarSymbol>);

impl Word {
    pub fn new(symbols: Vec<GrammarSymbol>) -> Result<Self, CspaceError> {
        if symbols.is_empty() {
            return Err(CspaceError::EmptyWord);
        }
        Ok(Word(symbols))
    }

    pub fn parse(text: &str) -> Result<Self, CspaceError> {
        let syms = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()?;
        Word::new(syms)
    }

    pub fn symbols(&self) -> &[GrammarSymbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl TryFrom<Vec<GrammarSymbol>> for Word {
    type Error = CspaceError;
    fn try_from(v: Vec<GrammarSymbol>) -> Result<Self, CspaceError> {
        Word::new(v)
    }
}

impl From<Word> for Vec<GrammarSymbol> {
    fn from(w: Word) -> Self {
        w.0
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Current docking symbol. When both vehicles share an edge only the outer
/// one can be at its station.
pub fn docking_symbol(c: &Config, tol: f64) -> Option<GrammarSymbol> {
    let lim = 1.0 - tol;
    let dx = c.x.edge.filter(|_| c.x.value >= lim);
    let dy = c.y.edge.filter(|_| c.y.value >= lim);
    match (dx, dy) {
        (Some(i), Some(j)) if i == j => {
            if c.x.value >= c.y.value {
                Some(A(i.0 as u8))
            } else {
                Some(B(j.0 as u8))
            }
        }
        (Some(i), Some(j)) => Some(AB(i.0 as u8, j.0 as u8)),
        (Some(i), None) => Some(A(i.0 as u8)),
        (None, Some(j)) => Some(B(j.0 as u8)),
        (None, None) => None,
    }
}

/// Orientation (`+1` counterclockwise, `-1` clockwise) in which `w` walks
/// once around the boundary with every step moving strictly forward, if any.
pub fn monotone_orientation(w: &Word) -> Option<i8> {
    let idx: Vec<i64> = w.symbols().iter().map(|s| s.cyclic_index() as i64).collect();
    if idx.len() == 1 {
        return Some(1);
    }
    [1i8, -1].into_iter().find(|&s| {
        let mut total = 0;
        for k in 0..idx.len() {
            let step = (s as i64 * (idx[(k + 1) % idx.len()] - idx[k])).rem_euclid(12);
            if step == 0 {
                return false;
            }
            total += step;
        }
        total == 12
    })
}

/// Whether the cyclic word respects the boundary order in one direction
/// and goes around exactly once.
pub fn is_monotone(w: &Word) -> bool {
    monotone_orientation(w).is_some()
}

/// Every monotone word with at most `max_len` symbols, shortest first.
pub fn monotone_words(max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<GrammarSymbol>> = CYCLIC_ORDER.iter().map(|&s| vec![s]).collect();
    let mut by_len: Vec<Vec<Word>> = vec![Vec::new(); max_len + 1];
    while let Some(seq) = stack.pop() {
        let w = Word(seq.clone());
        if is_monotone(&w) {
            by_len[seq.len()].push(w);
        }
        if seq.len() < max_len {
            for s in CYCLIC_ORDER {
                if !seq.contains(&s) {
                    let mut next = seq.clone();
                    next.push(s);
                    stack.push(next);
                }
            }
        }
    }
    for mut words in by_len {
        words.sort_by_key(|w| w.to_string());
        out.extend(words);
    }
    out
}

#[cfg(test)]
mod tests {

    #[test]
    fn monotone_word_counts() {
        let all = monotone_words(4);
        let count = |n| all.iter().filter(|w| w.len() == n).count();
        // n rotations of each n-subset in either direction; pairs coincide.
        assert_eq!((count(1), count(2), count(3), count(4)), (12, 132, 1320, 3960));
    }
    use super::*;
    use crate::cspace::{from_disc, DiscPoint};

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn twelve_symbols() {
        let mut all = CYCLIC_ORDER.to_vec();
        all.sort();
        all.dedup();
        assert_eq!(all.len(), 12);
    }

    #[test]
    fn tokens() {
        assert_eq!("AB32".parse::<GrammarSymbol>().unwrap(), AB(3, 2));
        assert_eq!("A_1".parse::<GrammarSymbol>().unwrap(), A(1));
        assert!("AB11".parse::<GrammarSymbol>().is_err());
        assert!("C1".parse::<GrammarSymbol>().is_err());
        assert!("A4".parse::<GrammarSymbol>().is_err());
        assert_eq!(w("A1, B2 AB32").to_string(), "A1 B2 AB32");
        assert!(Word::parse("  ").is_err());
    }

    #[test]
    fn monotone_examples() {
        assert!(is_monotone(&w("A1 B2 A3")));
        // The same cycle walked clockwise.
        assert_eq!(monotone_orientation(&w("A1 A3 B2")), Some(-1));
        assert!(is_monotone(&w("A1 B2 A3 B1")));
        assert!(!is_monotone(&w("A1 A3 B2 B1")));
        assert!(is_monotone(&w("A1")));
        assert!(!is_monotone(&w("A1 A1")));
        assert!(!is_monotone(&w("A1 B1 A1 B1")));
    }

    #[test]
    fn docking() {
        let c = Config::at(1, 1.0, 2, 0.3).unwrap();
        assert_eq!(docking_symbol(&c, 0.05), Some(A(1)));
        let c = Config::at(3, 0.99, 2, 0.98).unwrap();
        assert_eq!(docking_symbol(&c, 0.05), Some(AB(3, 2)));
        let c = Config::at(1, 0.5, 2, 0.5).unwrap();
        assert_eq!(docking_symbol(&c, 0.05), None);
    }

    #[test]
    fn zones_match_disc_model() {
        for s in CYCLIC_ORDER {
            let mid = s.zone_midpoint();
            let c = from_disc(DiscPoint::new(1.0, mid).unwrap()).unwrap();
            assert_eq!(docking_symbol(&c, DEFAULT_TOL), Some(s), "{s}");
            let arc = s.boundary_arc(DEFAULT_TOL);
            for f in [0.01, 0.5, 0.99] {
                let theta = arc.start + f * arc.width;
                let c = from_disc(DiscPoint::new(1.0, theta).unwrap()).unwrap();
                assert_eq!(docking_symbol(&c, DEFAULT_TOL), Some(s), "{s} at {f}");
            }
        }
        assert_eq!(boundary_angle(AB(1, 2)).width, 0.0);
        assert!((boundary_angle(AB(1, 2)).start - PI / 6.0).abs() < 1e-15);
        assert!(boundary_angle(A(1)).contains(0.0));
        let total: f64 = CYCLIC_ORDER.iter().map(|s| s.boundary_arc(0.05).width).sum();
        assert!((total - std::f64::consts::TAU).abs() < 1e-12);
    }
}
