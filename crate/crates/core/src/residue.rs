//! Residues modulo `m`, finite and eventually periodic sequences over `Z/m`,
//! the quotient map `Z/2m -> Z/m`, and the catalog of named sequences.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported modulus. Residues are stored as `u8`.
pub const MAX_MODULUS: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("modulus must satisfy 2 <= m <= {MAX_MODULUS}, got {0}")]
    InvalidModulus(u32),
    #[error("symbol {symbol} at position {position} is not a residue mod {modulus}")]
    SymbolOutOfRange {
        symbol: u64,
        position: usize,
        modulus: u32,
    },
    #[error("period must be nonempty")]
    EmptyPeriod,
    #[error("malformed sequence literal {text:?}: {reason}")]
    Malformed { text: String, reason: String },
    #[error("prefix of length {requested} exceeds sequence length {available}")]
    PrefixTooLong { requested: usize, available: usize },
    #[error("modulus mismatch: expected {expected}, found {found}")]
    ModulusMismatch { expected: u32, found: u32 },
    #[error("unknown catalog sequence {0:?}")]
    UnknownName(String),
}

/// The modulus `m` of `Z/m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Modulus(u32);

impl Modulus {
    pub fn new(m: u32) -> Result<Self, SequenceError> {
        if (2..=MAX_MODULUS).contains(&m) {
            Ok(Modulus(m))
        } else {
            Err(SequenceError::InvalidModulus(m))
        }
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_usize(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_even(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// Least nonnegative representative of `v`.
    #[inline]
    pub fn reduce(self, v: u64) -> u8 {
        (v % self.0 as u64) as u8
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        let s = a as u32 + b as u32;
        (if s >= self.0 { s - self.0 } else { s }) as u8
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u32 * b as u32) % self.0) as u8
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        if a == 0 {
            0
        } else {
            (self.0 - a as u32) as u8
        }
    }

    /// `2m`, the modulus a lift lives in.
    pub fn doubled(self) -> Result<Modulus, SequenceError> {
        Modulus::new(self.0 * 2)
    }

    /// Units of `Z/m` in increasing order.
    pub fn units(self) -> Vec<u8> {
        (1..self.0)
            .filter(|&u| gcd(u, self.0) == 1)
            .map(|u| u as u8)
            .collect()
    }
}

impl TryFrom<u32> for Modulus {
    type Error = SequenceError;
    fn try_from(m: u32) -> Result<Self, Self::Error> {
        Modulus::new(m)
    }
}

impl From<Modulus> for u32 {
    fn from(m: Modulus) -> u32 {
        m.0
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A finite sequence of residues mod `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModSequence {
    modulus: Modulus,
    entries: Vec<u8>,
}

impl ModSequence {
    pub fn new(modulus: Modulus, entries: Vec<u8>) -> Result<Self, SequenceError> {
        if let Some((position, &symbol)) = entries
            .iter()
            .enumerate()
            .find(|(_, &e)| e as u32 >= modulus.get())
        {
            return Err(SequenceError::SymbolOutOfRange {
                symbol: symbol as u64,
                position,
                modulus: modulus.get(),
            });
        }
        Ok(ModSequence { modulus, entries })
    }

    /// Reduces arbitrary integers into `Z/m`.
    pub fn from_values(modulus: Modulus, values: impl IntoIterator<Item = u64>) -> Self {
        ModSequence {
            modulus,
            entries: values.into_iter().map(|v| modulus.reduce(v)).collect(),
        }
    }

    pub fn empty(modulus: Modulus) -> Self {
        ModSequence {
            modulus,
            entries: Vec::new(),
        }
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<u8> {
        self.entries
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn prefix(&self, l: usize) -> Result<ModSequence, SequenceError> {
        if l > self.len() {
            return Err(SequenceError::PrefixTooLong {
                requested: l,
                available: self.len(),
            });
        }
        Ok(ModSequence {
            modulus: self.modulus,
            entries: self.entries[..l].to_vec(),
        })
    }

    pub fn reversed(&self) -> ModSequence {
        let mut entries = self.entries.clone();
        entries.reverse();
        ModSequence {
            modulus: self.modulus,
            entries,
        }
    }

    /// Entrywise multiplication by `u`.
    pub fn scaled(&self, u: u8) -> ModSequence {
        let m = self.modulus;
        ModSequence {
            modulus: m,
            entries: self.entries.iter().map(|&e| m.mul(e, u)).collect(),
        }
    }

    pub fn concat(&self, other: &ModSequence) -> Result<ModSequence, SequenceError> {
        check_same_modulus(self.modulus, other.modulus)?;
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(ModSequence {
            modulus: self.modulus,
            entries,
        })
    }
}

impl fmt::Display for ModSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_symbols(f, self.modulus, &self.entries)
    }
}

/// `initial` followed by `period` repeated forever.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventuallyPeriodicSequence {
    initial: ModSequence,
    period: ModSequence,
}

impl EventuallyPeriodicSequence {
    pub fn new(initial: ModSequence, period: ModSequence) -> Result<Self, SequenceError> {
        check_same_modulus(initial.modulus, period.modulus)?;
        if period.is_empty() {
            return Err(SequenceError::EmptyPeriod);
        }
        Ok(EventuallyPeriodicSequence { initial, period })
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.initial.modulus
    }

    pub fn initial(&self) -> &ModSequence {
        &self.initial
    }

    pub fn period(&self) -> &ModSequence {
        &self.period
    }

    /// Entry at 0-based position `i`.
    #[inline]
    pub fn at(&self, i: usize) -> u8 {
        let k = self.initial.len();
        if i < k {
            self.initial.entries[i]
        } else {
            self.period.entries[(i - k) % self.period.len()]
        }
    }

    pub fn prefix(&self, l: usize) -> ModSequence {
        ModSequence {
            modulus: self.modulus(),
            entries: (0..l).map(|i| self.at(i)).collect(),
        }
    }

    /// Entries `start..end` (0-based, half open).
    pub fn window(&self, start: usize, end: usize) -> ModSequence {
        ModSequence {
            modulus: self.modulus(),
            entries: (start..end).map(|i| self.at(i)).collect(),
        }
    }
}

impl fmt::Display for EventuallyPeriodicSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_symbols(f, self.modulus(), self.initial.entries())?;
        f.write_str("(")?;
        write_symbols(f, self.modulus(), self.period.entries())?;
        f.write_str(")")
    }
}

/// Either kind of first row.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sequence {
    Finite(ModSequence),
    Periodic(EventuallyPeriodicSequence),
}

impl Sequence {
    pub fn modulus(&self) -> Modulus {
        match self {
            Sequence::Finite(s) => s.modulus(),
            Sequence::Periodic(s) => s.modulus(),
        }
    }

    /// `None` for infinite sequences.
    pub fn len(&self) -> Option<usize> {
        match self {
            Sequence::Finite(s) => Some(s.len()),
            Sequence::Periodic(_) => None,
        }
    }

    /// Only a finite sequence can be empty.
    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn prefix(&self, l: usize) -> Result<ModSequence, SequenceError> {
        match self {
            Sequence::Finite(s) => s.prefix(l),
            Sequence::Periodic(s) => Ok(s.prefix(l)),
        }
    }

    /// Length of the non-repeating part (the whole length when finite).
    pub fn initial_len(&self) -> usize {
        match self {
            Sequence::Finite(s) => s.len(),
            Sequence::Periodic(s) => s.initial().len(),
        }
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sequence::Finite(s) => s.fmt(f),
            Sequence::Periodic(s) => s.fmt(f),
        }
    }
}

impl From<ModSequence> for Sequence {
    fn from(s: ModSequence) -> Self {
        Sequence::Finite(s)
    }
}

impl From<EventuallyPeriodicSequence> for Sequence {
    fn from(s: EventuallyPeriodicSequence) -> Self {
        Sequence::Periodic(s)
    }
}

fn check_same_modulus(expected: Modulus, found: Modulus) -> Result<(), SequenceError> {
    if expected == found {
        Ok(())
    } else {
        Err(SequenceError::ModulusMismatch {
            expected: expected.get(),
            found: found.get(),
        })
    }
}

fn write_symbols(f: &mut fmt::Formatter<'_>, m: Modulus, entries: &[u8]) -> fmt::Result {
    if m.get() <= 10 {
        for &e in entries {
            write!(f, "{e}")?;
        }
    } else {
        for (i, &e) in entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
    }
    Ok(())
}

/// Parses `INIT` or `INIT(PERIOD)`.
///
/// For `m <= 10` every symbol is a single decimal digit; for larger moduli
/// symbols are comma-separated integers. A parenthesised period means the
/// period repeats forever.
pub fn parse_sequence(text: &str, m: Modulus) -> Result<Sequence, SequenceError> {
    let text = text.trim();
    let malformed = |reason: &str| SequenceError::Malformed {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    match text.find('(') {
        None => {
            if text.contains(')') {
                return Err(malformed("unbalanced ')'"));
            }
            let entries = parse_symbols(text, m, 0, text)?;
            Ok(Sequence::Finite(ModSequence {
                modulus: m,
                entries,
            }))
        }
        Some(open) => {
            if !text.ends_with(')') {
                return Err(malformed("period must close the literal"));
            }
            let init = &text[..open];
            let body = &text[open + 1..text.len() - 1];
            if body.contains('(') || body.contains(')') || init.contains(')') {
                return Err(malformed("nested or repeated parentheses"));
            }
            let initial = parse_symbols(init, m, 0, text)?;
            let period = parse_symbols(body, m, initial.len(), text)?;
            if period.is_empty() {
                return Err(SequenceError::EmptyPeriod);
            }
            Ok(Sequence::Periodic(EventuallyPeriodicSequence {
                initial: ModSequence {
                    modulus: m,
                    entries: initial,
                },
                period: ModSequence {
                    modulus: m,
                    entries: period,
                },
            }))
        }
    }
}

fn parse_symbols(
    part: &str,
    m: Modulus,
    offset: usize,
    whole: &str,
) -> Result<Vec<u8>, SequenceError> {
    let malformed = |reason: String| SequenceError::Malformed {
        text: whole.to_string(),
        reason,
    };
    let check = |value: u64, position: usize| {
        if value >= m.get() as u64 {
            Err(SequenceError::SymbolOutOfRange {
                symbol: value,
                position,
                modulus: m.get(),
            })
        } else {
            Ok(value as u8)
        }
    };
    if part.is_empty() {
        return Ok(Vec::new());
    }
    if m.get() <= 10 {
        part.chars()
            .enumerate()
            .map(|(i, c)| {
                let d = c
                    .to_digit(10)
                    .ok_or_else(|| malformed(format!("unexpected character {c:?}")))?;
                check(d as u64, offset + i)
            })
            .collect()
    } else {
        part.split(',')
            .enumerate()
            .map(|(i, tok)| {
                let tok = tok.trim();
                let v: u64 = tok
                    .parse()
                    .map_err(|_| malformed(format!("bad symbol {tok:?}")))?;
                check(v, offset + i)
            })
            .collect()
    }
}

/// Reduces a sequence mod `2m` entrywise to `target = m`.
pub fn project(t: &ModSequence, target: Modulus) -> Result<ModSequence, SequenceError> {
    if t.modulus.get() != 2 * target.get() {
        return Err(SequenceError::ModulusMismatch {
            expected: 2 * target.get(),
            found: t.modulus.get(),
        });
    }
    Ok(ModSequence {
        modulus: target,
        entries: t.entries.iter().map(|&e| target.reduce(e as u64)).collect(),
    })
}

/// A named sequence in its literal form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub modulus: u32,
    pub literal: &'static str,
}

impl CatalogEntry {
    pub fn sequence(&self) -> EventuallyPeriodicSequence {
        let m = Modulus::new(self.modulus).expect("catalog modulus");
        match parse_sequence(self.literal, m).expect("catalog literal") {
            Sequence::Periodic(s) => s,
            Sequence::Finite(_) => unreachable!("catalog entries are periodic"),
        }
    }
}

const fn entry(name: &'static str, modulus: u32, literal: &'static str) -> CatalogEntry {
    CatalogEntry {
        name,
        modulus,
        literal,
    }
}

/// Strongly balanced families over `Z/4` (lengths `8k` for `S`, `8k+7` for `T`)
/// and over `Z/2` (lengths `4k` for `Q`, `4k+3` for `R`).
pub const CATALOG: &[CatalogEntry] = &[
    entry("S1", 4, "01220232(212113220030232311200232)"),
    entry("S2", 4, "21210130(200132022112002110220130)"),
    entry("T1", 4, "0120021(212202102023032200322021)"),
    entry("T2", 4, "1000212(312223301210312003103232)"),
    entry("T3", 4, "1200210(220101222032222103000210)"),
    entry("T4", 4, "2102203(232002102021230022302203)"),
    entry("Q1", 2, "0100(001001011100)"),
    entry("Q2", 2, "(010010000111)"),
    entry("Q3", 2, "0101(011000011000)"),
    entry("Q4", 2, "0101(101000101000)"),
    entry("R1", 2, "001(010000100001)"),
    entry("R2", 2, "0011110(001101010110)"),
    entry("R3", 2, "010(000101000010)"),
    entry("R4", 2, "0100001(010010111100001010111111)"),
    entry("R5", 2, "0100001(100100001001)"),
    entry("R6", 2, "0101011(010101100011)"),
    entry("R7", 2, "0101011(010111111101011010011101)"),
    entry("R8", 2, "010(101110110010)"),
    entry("R9", 2, "100(001000010100)"),
    entry("R10", 2, "1000010(110001101010)"),
    entry("R11", 2, "1111101(011000110101)"),
    entry("R12", 2, "111(110110000111)"),
];

/// Images of the `Z/4` families under reduction mod 2.
pub const PROJECTIONS: &[(&str, &str)] = &[
    ("S1", "Q1"),
    ("S2", "Q3"),
    ("T1", "R3"),
    ("T2", "R10"),
    ("T3", "R9"),
    ("T4", "R3"),
];

pub fn catalog_entry(name: &str) -> Result<&'static CatalogEntry, SequenceError> {
    CATALOG
        .iter()
        .find(|e| e.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| SequenceError::UnknownName(name.to_string()))
}

pub fn catalog_sequence(name: &str) -> Result<EventuallyPeriodicSequence, SequenceError> {
    catalog_entry(name).map(CatalogEntry::sequence)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(v: u32) -> Modulus {
        Modulus::new(v).unwrap()
    }

    #[test]
    fn parses_s1_with_period() {
        let s = parse_sequence("01220232(212113220030232311200232)", m(4)).unwrap();
        let Sequence::Periodic(p) = &s else {
            panic!("expected periodic")
        };
        assert_eq!(p.initial().len(), 8);
        assert_eq!(p.period().len(), 24);
        assert_eq!(p, &catalog_sequence("S1").unwrap());
    }

    #[test]
    fn parses_empty_and_finite() {
        let s = parse_sequence("", m(4)).unwrap();
        assert_eq!(s, Sequence::Finite(ModSequence::empty(m(4))));
        let s = parse_sequence("0100203", m(4)).unwrap();
        assert_eq!(s.len(), Some(7));
        assert_eq!(s.to_string(), "0100203");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_sequence("0140", m(4)),
            Err(SequenceError::SymbolOutOfRange {
                symbol: 4,
                position: 2,
                ..
            })
        ));
        assert_eq!(
            parse_sequence("01()", m(4)),
            Err(SequenceError::EmptyPeriod)
        );
        assert!(matches!(
            parse_sequence("01(2", m(4)),
            Err(SequenceError::Malformed { .. })
        ));
        assert!(matches!(
            parse_sequence("0a1", m(4)),
            Err(SequenceError::Malformed { .. })
        ));
        assert!(matches!(
            parse_sequence("0(1)(2)", m(4)),
            Err(SequenceError::Malformed { .. })
        ));
        assert!(matches!(
            parse_sequence("1,2", m(4)),
            Err(SequenceError::Malformed { .. })
        ));
    }

    #[test]
    fn comma_form_for_large_moduli() {
        let s = parse_sequence("3,14(0, 20)", m(21)).unwrap();
        assert_eq!(s.to_string(), "3,14(0,20)");
        assert_eq!(s.prefix(5).unwrap().entries(), &[3, 14, 0, 20, 0]);
        assert!(matches!(
            parse_sequence("3,21", m(21)),
            Err(SequenceError::SymbolOutOfRange { symbol: 21, .. })
        ));
    }

    #[test]
    fn prefixes_of_catalog_entries() {
        let s1 = catalog_sequence("S1").unwrap();
        assert_eq!(s1.prefix(8).to_string(), "01220232");
        assert!(s1.prefix(0).is_empty());
        let q1 = catalog_sequence("Q1").unwrap();
        assert_eq!(q1.prefix(12).to_string(), "010000100101");
        let finite = parse_sequence("0100203", m(4)).unwrap();
        assert_eq!(
            finite.prefix(8),
            Err(SequenceError::PrefixTooLong {
                requested: 8,
                available: 7
            })
        );
    }

    #[test]
    fn projections() {
        let t = ModSequence::new(m(4), vec![0, 1, 2, 2, 0, 2, 3, 2]).unwrap();
        let p = project(&t, m(2)).unwrap();
        assert_eq!(p.to_string(), "01000010");
        assert_eq!(p, catalog_sequence("Q1").unwrap().prefix(8));
        assert!(project(&ModSequence::empty(m(4)), m(2)).unwrap().is_empty());
        let t2 = catalog_sequence("T2").unwrap().prefix(7);
        assert_eq!(
            project(&t2, m(2)).unwrap(),
            catalog_sequence("R10").unwrap().prefix(7)
        );
        assert!(matches!(
            project(&t, m(3)),
            Err(SequenceError::ModulusMismatch { .. })
        ));
    }

    #[test]
    fn catalog_images_under_projection() {
        for &(src, dst) in PROJECTIONS {
            let s = catalog_sequence(src).unwrap();
            let q = catalog_sequence(dst).unwrap();
            for l in [0, 7, 8, 31, 100, 257] {
                assert_eq!(
                    project(&s.prefix(l), m(2)).unwrap(),
                    q.prefix(l),
                    "{src}->{dst}"
                );
            }
        }
    }

    #[test]
    fn catalog_round_trips() {
        for e in CATALOG {
            let s = e.sequence();
            assert_eq!(s.to_string(), e.literal);
        }
        assert!(catalog_sequence("Z9").is_err());
        assert_eq!(catalog_entry("r10").unwrap().name, "R10");
    }

    #[test]
    fn modulus_bounds_and_units() {
        assert!(Modulus::new(1).is_err());
        assert!(Modulus::new(257).is_err());
        assert_eq!(m(6).units(), vec![1, 5]);
        assert_eq!(m(15).units(), vec![1, 2, 4, 7, 8, 11, 13, 14]);
        assert_eq!(m(4).neg(1), 3);
        assert_eq!(m(256).add(255, 1), 0);
    }
}
