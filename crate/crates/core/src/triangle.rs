//! Steinhaus triangles generated by Pascal's rule over `Z/m`, residue
//! multiplicities, balance tests and the incremental eastern-band update.

use std::fmt::Write as _;

use serde::ser::{Serialize, SerializeSeq, Serializer};
use thiserror::Error;

use crate::residue::{ModSequence, Modulus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangleError {
    #[error("strong balance is only defined for even moduli, got {0}")]
    OddModulus(u32),
    #[error("modulus mismatch: state is mod {state}, fresh entries are mod {fresh}")]
    ModulusMismatch { state: u32, fresh: u32 },
}

/// The triangle `∇S`: row 0 is `S`, each later cell is the sum of the two
/// cells above it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinhausTriangle {
    modulus: Modulus,
    rows: Vec<Vec<u8>>,
}

impl SteinhausTriangle {
    pub fn build(s: &ModSequence) -> Self {
        let m = s.modulus();
        let n = s.len();
        let mut rows = Vec::with_capacity(n);
        if n > 0 {
            rows.push(s.entries().to_vec());
            for i in 1..n {
                let prev = &rows[i - 1];
                let next: Vec<u8> = prev.windows(2).map(|w| m.add(w[0], w[1])).collect();
                rows.push(next);
            }
        }
        SteinhausTriangle { modulus: m, rows }
    }

    /// Wraps raw rows; row `i` must hold `n - i` residues.
    pub fn from_rows(modulus: Modulus, rows: Vec<Vec<u8>>) -> Option<Self> {
        let n = rows.len();
        let shaped = rows.iter().enumerate().all(|(i, r)| r.len() == n - i);
        let ranged = rows.iter().flatten().all(|&c| (c as u32) < modulus.get());
        (shaped && ranged).then_some(SteinhausTriangle { modulus, rows })
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// Side length.
    #[inline]
    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// `x_{i,j}` with 1-based indices as in the usual notation.
    pub fn cell(&self, i: usize, j: usize) -> Option<u8> {
        self.rows
            .get(i.checked_sub(1)?)?
            .get(j.checked_sub(1)?)
            .copied()
    }

    pub fn cells(&self) -> impl Iterator<Item = u8> + '_ {
        self.rows.iter().flatten().copied()
    }

    pub fn cell_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn first_row(&self) -> ModSequence {
        ModSequence::new(self.modulus, self.rows.first().cloned().unwrap_or_default())
            .expect("rows hold residues")
    }

    /// True iff every non-top cell is the sum of its two parents.
    pub fn satisfies_pascal(&self) -> bool {
        let m = self.modulus;
        self.rows.windows(2).all(|pair| {
            pair[1]
                .iter()
                .enumerate()
                .all(|(j, &c)| c == m.add(pair[0][j], pair[0][j + 1]))
        })
    }

    /// Left-right mirror image.
    pub fn mirrored(&self) -> SteinhausTriangle {
        SteinhausTriangle {
            modulus: self.modulus,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().rev().copied().collect())
                .collect(),
        }
    }

    pub fn multiplicities(&self) -> MultiplicityVector {
        MultiplicityVector::from_residues(self.modulus, self.cells())
    }

    pub fn eastern_state(&self) -> EasternState {
        EasternState {
            modulus: self.modulus,
            diagonal: self
                .rows
                .iter()
                .map(|r| *r.last().expect("nonempty row"))
                .collect(),
        }
    }

    /// Centered text layout, one line per row.
    pub fn render(&self) -> String {
        render_centered(self.modulus, self.rows.iter().map(Vec::as_slice), 0)
    }
}

/// Renders ragged rows centered around a common axis. `widest` is the
/// number of cells of the widest row, or 0 to use the first row.
pub(crate) fn render_centered<'a>(
    m: Modulus,
    rows: impl Iterator<Item = &'a [u8]> + Clone,
    widest: usize,
) -> String {
    let width = (m.get() - 1).to_string().len();
    let pitch = width + 1;
    let widest = if widest == 0 {
        rows.clone().map(<[u8]>::len).max().unwrap_or(0)
    } else {
        widest
    };
    let mut out = String::new();
    for row in rows {
        let indent = (widest - row.len()) * pitch / 2;
        out.extend(std::iter::repeat_n(' ', indent));
        for (j, c) in row.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{c:>width$}");
        }
        out.push('\n');
    }
    out
}

/// Occurrence count of each residue in a multiset over `Z/m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiplicityVector {
    modulus: Modulus,
    counts: Vec<u64>,
}

impl MultiplicityVector {
    pub fn zero(modulus: Modulus) -> Self {
        MultiplicityVector {
            modulus,
            counts: vec![0; modulus.as_usize()],
        }
    }

    /// `counts[j]` is the multiplicity of residue `j`; length must be `m`.
    pub fn from_counts(modulus: Modulus, counts: Vec<u64>) -> Option<Self> {
        (counts.len() == modulus.as_usize()).then_some(MultiplicityVector { modulus, counts })
    }

    pub fn constant(modulus: Modulus, value: u64) -> Self {
        MultiplicityVector {
            modulus,
            counts: vec![value; modulus.as_usize()],
        }
    }

    pub fn from_residues(modulus: Modulus, residues: impl IntoIterator<Item = u8>) -> Self {
        let mut v = MultiplicityVector::zero(modulus);
        for r in residues {
            v.counts[r as usize] += 1;
        }
        v
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, residue: u8) -> u64 {
        self.counts[residue as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// All residues occur equally often.
    pub fn is_balanced(&self) -> bool {
        self.counts.windows(2).all(|w| w[0] == w[1])
    }

    pub fn add_assign(&mut self, other: &MultiplicityVector) {
        assert_eq!(self.modulus, other.modulus, "modulus mismatch");
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn scaled(&self, k: u64) -> MultiplicityVector {
        MultiplicityVector {
            modulus: self.modulus,
            counts: self.counts.iter().map(|c| c * k).collect(),
        }
    }

    /// `self - other`, or `None` if some count would go negative.
    pub fn checked_sub(&self, other: &MultiplicityVector) -> Option<MultiplicityVector> {
        if self.modulus != other.modulus {
            return None;
        }
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()?;
        Some(MultiplicityVector {
            modulus: self.modulus,
            counts,
        })
    }
}

impl Serialize for MultiplicityVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.counts.len()))?;
        for c in &self.counts {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

pub fn build_triangle(s: &ModSequence) -> SteinhausTriangle {
    SteinhausTriangle::build(s)
}

pub fn multiplicities(t: &SteinhausTriangle) -> MultiplicityVector {
    t.multiplicities()
}

/// Streams the rows of `∇s` without keeping them.
pub fn triangle_multiplicities(s: &ModSequence) -> MultiplicityVector {
    let m = s.modulus();
    let mut counts = vec![0u64; m.as_usize()];
    let mut row = s.entries().to_vec();
    while !row.is_empty() {
        for &c in &row {
            counts[c as usize] += 1;
        }
        for j in 0..row.len() - 1 {
            row[j] = m.add(row[j], row[j + 1]);
        }
        row.pop();
    }
    MultiplicityVector { modulus: m, counts }
}

/// All residues occur equally often in `∇s`.
pub fn is_balanced(s: &ModSequence) -> bool {
    triangle_multiplicities(s).is_balanced()
}

/// `n(n+1)/2 ≡ 0 (mod m)`, necessary for a balanced triangle of side `n`.
pub fn admissible_length(n: usize, m: Modulus) -> bool {
    let n = n as u128;
    (n * (n + 1) / 2).is_multiple_of(m.get() as u128)
}

/// `flags[l]` tells whether `∇s[l]` is balanced, for `l = 0..=len(s)`.
///
/// One left-to-right pass over the eastern diagonal; `O(n^2)`.
pub fn balanced_prefix_flags(s: &ModSequence) -> Vec<bool> {
    let m = s.modulus();
    let mut counts = vec![0u64; m.as_usize()];
    let mut state = EasternState::empty(m);
    let mut flags = Vec::with_capacity(s.len() + 1);
    flags.push(true);
    for &y in s.entries() {
        state.push(y, |c| counts[c as usize] += 1);
        flags.push(counts.windows(2).all(|w| w[0] == w[1]));
    }
    flags
}

/// Strong balance for even `m`: `∇s[n - 2m·t]` is balanced for every
/// `0 <= t <= n/(2m)`.
pub fn is_strongly_balanced(s: &ModSequence) -> Result<bool, TriangleError> {
    let m = s.modulus();
    if !m.is_even() {
        return Err(TriangleError::OddModulus(m.get()));
    }
    let flags = balanced_prefix_flags(s);
    Ok(strongly_balanced_from_flags(&flags, s.len(), m))
}

/// Reads strong balance at length `n` off precomputed prefix flags.
pub fn strongly_balanced_from_flags(flags: &[bool], n: usize, m: Modulus) -> bool {
    let stride = 2 * m.as_usize();
    (0..=n / stride).all(|t| flags[n - stride * t])
}

/// Rightmost entry of every row of a triangle, top row first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EasternState {
    modulus: Modulus,
    diagonal: Vec<u8>,
}

impl EasternState {
    pub fn empty(modulus: Modulus) -> Self {
        EasternState {
            modulus,
            diagonal: Vec::new(),
        }
    }

    pub fn from_diagonal(modulus: Modulus, diagonal: Vec<u8>) -> Option<Self> {
        diagonal
            .iter()
            .all(|&c| (c as u32) < modulus.get())
            .then_some(EasternState { modulus, diagonal })
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn diagonal(&self) -> &[u8] {
        &self.diagonal
    }

    /// Side length of the triangle this state describes.
    pub fn n(&self) -> usize {
        self.diagonal.len()
    }

    /// Appends `y` to the first row, replacing the diagonal with the new
    /// eastern diagonal and reporting each new cell to `visit`.
    #[inline]
    pub fn push(&mut self, y: u8, mut visit: impl FnMut(u8)) {
        let m = self.modulus;
        let mut carry = y;
        visit(carry);
        for d in self.diagonal.iter_mut() {
            let next = m.add(*d, carry);
            *d = carry;
            carry = next;
            visit(carry);
        }
        self.diagonal.push(carry);
    }
}

pub fn eastern_state(t: &SteinhausTriangle) -> EasternState {
    t.eastern_state()
}

/// Multiplicities of `∇(prefix ‖ fresh)` minus those of `∇prefix`, where
/// `prefix` is the row described by `state`. Costs `O((n + w)·w)`.
pub fn extend_band(
    state: &EasternState,
    fresh: &ModSequence,
) -> Result<(MultiplicityVector, EasternState), TriangleError> {
    if state.modulus != fresh.modulus() {
        return Err(TriangleError::ModulusMismatch {
            state: state.modulus.get(),
            fresh: fresh.modulus().get(),
        });
    }
    let mut band = MultiplicityVector::zero(state.modulus);
    let mut next = state.clone();
    for &y in fresh.entries() {
        next.push(y, |c| band.counts[c as usize] += 1);
    }
    Ok((band, next))
}
