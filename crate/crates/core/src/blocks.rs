//! Block algebra for `∇S1[8k]`: the parallelogram product of adjacent
//! blocks, the fourteen building blocks, their multiplicity table, the
//! block tiling of the triangle and the eastern-band case formulas.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::residue::{catalog_sequence, ModSequence, Modulus};
use crate::triangle::{
    build_triangle, extend_band, render_centered, MultiplicityVector, SteinhausTriangle,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error("blocks differ in side length ({left} vs {right})")]
    SideMismatch { left: usize, right: usize },
    #[error("blocks differ in modulus ({left} vs {right})")]
    ModulusMismatch { left: u32, right: u32 },
    #[error("rows do not form a {kind:?} block")]
    BadShape { kind: BlockKind },
    #[error("band formulas need k >= 3, got {0}")]
    KTooSmall(usize),
    #[error("unknown block {0:?}")]
    UnknownBlock(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockKind {
    /// Rows of lengths `s, s-1, ..., 1`.
    Triangle,
    /// Rows of lengths `1, 2, ..., s, ..., 2, 1`.
    Lozenge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    modulus: Modulus,
    kind: BlockKind,
    side: usize,
    rows: Vec<Vec<u8>>,
}

fn row_lengths(kind: BlockKind, side: usize) -> Vec<usize> {
    match kind {
        BlockKind::Triangle => (1..=side).rev().collect(),
        BlockKind::Lozenge => (1..=side).chain((1..side).rev()).collect(),
    }
}

impl Block {
    pub fn new(modulus: Modulus, kind: BlockKind, rows: Vec<Vec<u8>>) -> Result<Self, BlockError> {
        let side = match kind {
            BlockKind::Triangle => rows.len(),
            BlockKind::Lozenge => rows.len().div_ceil(2),
        };
        let shaped = rows.iter().map(Vec::len).eq(row_lengths(kind, side))
            && rows.iter().flatten().all(|&c| (c as u32) < modulus.get());
        if !shaped {
            return Err(BlockError::BadShape { kind });
        }
        Ok(Block {
            modulus,
            kind,
            side,
            rows,
        })
    }

    /// Rows given as digit strings, for moduli up to 10.
    pub fn from_digits(
        modulus: Modulus,
        kind: BlockKind,
        rows: &[&str],
    ) -> Result<Self, BlockError> {
        let rows = rows
            .iter()
            .map(|r| r.bytes().map(|b| b.wrapping_sub(b'0')).collect())
            .collect();
        Block::new(modulus, kind, rows)
    }

    pub fn from_triangle(t: &SteinhausTriangle) -> Self {
        Block {
            modulus: t.modulus(),
            kind: BlockKind::Triangle,
            side: t.n(),
            rows: t.rows().to_vec(),
        }
    }

    pub fn zero(modulus: Modulus, kind: BlockKind, side: usize) -> Self {
        Block {
            modulus,
            kind,
            side,
            rows: row_lengths(kind, side)
                .into_iter()
                .map(|l| vec![0; l])
                .collect(),
        }
    }

    #[inline]
    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    #[inline]
    pub fn kind(&self) -> BlockKind {
        self.kind
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn rows_mut(&mut self) -> &mut [Vec<u8>] {
        &mut self.rows
    }

    pub fn cell_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Rows making up the two lower sides: all rows of a triangle, the
    /// lower half (widest row included) of a lozenge.
    fn lower_rows(&self) -> &[Vec<u8>] {
        match self.kind {
            BlockKind::Triangle => &self.rows,
            BlockKind::Lozenge => &self.rows[self.side.saturating_sub(1)..],
        }
    }

    /// Lower-right side, read top to bottom.
    pub fn lower_right_edge(&self) -> Vec<u8> {
        self.lower_rows().iter().map(|r| r[r.len() - 1]).collect()
    }

    /// Lower-left side, read top to bottom.
    pub fn lower_left_edge(&self) -> Vec<u8> {
        self.lower_rows().iter().map(|r| r[0]).collect()
    }

    pub fn multiplicities(&self) -> MultiplicityVector {
        MultiplicityVector::from_residues(self.modulus, self.rows.iter().flatten().copied())
    }

    /// Centered layout, widest row flush left.
    pub fn render(&self) -> String {
        render_centered(self.modulus, self.rows.iter().map(Vec::as_slice), self.side)
    }
}

/// The lozenge that Pascal's rule fills in below two adjacent blocks of
/// equal side `s`.
///
/// Only the lower-right side of `a` and the lower-left side of `b` matter.
/// With those sides `a_1..a_s` and `b_1..b_s` placed on the two upper sides
/// of the lozenge, the top cell is `a_1 + b_1` and every other cell is the
/// sum of its two parents.
pub fn star(a: &Block, b: &Block) -> Result<Block, BlockError> {
    if a.modulus != b.modulus {
        return Err(BlockError::ModulusMismatch {
            left: a.modulus.get(),
            right: b.modulus.get(),
        });
    }
    if a.side != b.side {
        return Err(BlockError::SideMismatch {
            left: a.side,
            right: b.side,
        });
    }
    Ok(star_edges(
        a.modulus,
        &a.lower_right_edge(),
        &b.lower_left_edge(),
    ))
}

/// The lozenge spanned by a right side `left` and a left side `right`.
pub fn star_edges(m: Modulus, left: &[u8], right: &[u8]) -> Block {
    let s = left.len();
    debug_assert_eq!(s, right.len());
    if s == 0 {
        return Block::zero(m, BlockKind::Lozenge, 0);
    }
    // Frame rows 1..=2s, columns 1..=s+1. Row i of the frame carries
    // left[i-1] at column s+1-i and right[i-1] at column s+1.
    let mut frame = vec![vec![0u8; s + 2]; 2 * s + 1];
    for i in 1..=s {
        frame[i][s + 1 - i] = left[i - 1];
        frame[i][s + 1] = right[i - 1];
    }
    let mut rows = Vec::with_capacity(2 * s - 1);
    for i in 2..=2 * s {
        let lo = if i <= s + 1 { s + 2 - i } else { 1 };
        let hi = s.min(2 * s + 1 - i);
        let mut row = Vec::with_capacity(hi + 1 - lo);
        for j in lo..=hi {
            let v = m.add(frame[i - 1][j], frame[i - 1][j + 1]);
            frame[i][j] = v;
            row.push(v);
        }
        rows.push(row);
    }
    Block {
        modulus: m,
        kind: BlockKind::Lozenge,
        side: s,
        rows,
    }
}

/// Names of the building blocks in table order.
pub const BLOCK_NAMES: [&str; 14] = [
    "A0", "A1", "A2", "A3", "B0", "B1", "B2", "B3", "C0", "C1", "C2", "C3", "D0", "E0",
];

/// Published contents of the building blocks, top row first. The `A`
/// blocks are triangles, the rest lozenges.
pub const GOLDEN_BLOCKS: [(&str, &[&str]); 14] = [
    (
        "A0",
        &[
            "01220232", "1302211", "032032", "31231", "0310", "301", "31", "0",
        ],
    ),
    (
        "A1",
        &[
            "21211322", "3332010", "221211", "03332", "3221", "103", "13", "0",
        ],
    ),
    (
        "A2",
        &[
            "00302323", "0332111", "321322", "13010", "0311", "302", "32", "1",
        ],
    ),
    (
        "A3",
        &[
            "11200232", "2320211", "112232", "23011", "1312", "003", "03", "3",
        ],
    ),
    (
        "B0",
        &[
            "0", "13", "301", "0311", "03020", "133221", "2021032", "22231312", "0010003",
            "011003", "12103", "3313", "200", "20", "2",
        ],
    ),
    (
        "B1",
        &[
            "2", "22", "301", "1312", "20032", "120311", "0323020", "03113221", "3020103",
            "322113", "10320", "1312", "003", "03", "3",
        ],
    ),
    (
        "B2",
        &[
            "0", "12", "333", "3221", "01032", "211312", "0320032", "13120311", "0032302",
            "031132", "30201", "3221", "103", "13", "0",
        ],
    ),
    (
        "B3",
        &[
            "0", "13", "301", "0311", "23020", "113221", "0201032", "32211312", "1032003",
            "131203", "00323", "0311", "302", "32", "1",
        ],
    ),
    (
        "C0",
        &[
            "2", "11", "020", "3221", "21032", "231312", "2100032", "03100311", "3010302",
            "311332", "02021", "2223", "001", "01", "1",
        ],
    ),
    (
        "C1",
        &[
            "2", "12", "032", "0311", "23020", "113221", "0201032", "32211312", "1032003",
            "131203", "00323", "0311", "302", "32", "1",
        ],
    ),
    (
        "C2",
        &[
            "0", "21", "032", "1312", "20032", "120311", "0323020", "03113221", "3020103",
            "322113", "10320", "1312", "003", "03", "3",
        ],
    ),
    (
        "C3",
        &[
            "2", "11", "020", "3221", "01032", "211312", "0320032", "13120311", "0032302",
            "031132", "30201", "3221", "103", "13", "0",
        ],
    ),
    (
        "D0",
        &[
            "0", "21", "032", "1312", "00032", "100311", "2103020", "33133221", "2002103",
            "202313", "22100", "0310", "301", "31", "0",
        ],
    ),
    (
        "E0",
        &[
            "2", "12", "032", "0311", "03020", "133221", "2021032", "22231312", "0010003",
            "011003", "12103", "3313", "200", "20", "2",
        ],
    ),
];

/// Published multiplicities of residues 0..3 per block, in `BLOCK_NAMES`
/// order.
pub const BLOCK_COUNTS: [[u64; 4]; 14] = [
    [9, 9, 9, 9],
    [5, 10, 11, 10],
    [8, 9, 8, 11],
    [7, 10, 11, 8],
    [20, 15, 14, 15],
    [16, 15, 16, 17],
    [15, 16, 15, 18],
    [16, 17, 14, 17],
    [17, 17, 17, 13],
    [15, 16, 17, 16],
    [17, 15, 15, 17],
    [16, 17, 16, 15],
    [20, 15, 14, 15],
    [19, 14, 17, 14],
];

/// Golden blocks parsed into `Block`s.
pub fn golden_blocks() -> Vec<(&'static str, Block)> {
    let m = Modulus::new(4).expect("4 is a modulus");
    GOLDEN_BLOCKS
        .iter()
        .map(|(name, rows)| {
            let kind = if name.starts_with('A') {
                BlockKind::Triangle
            } else {
                BlockKind::Lozenge
            };
            (
                *name,
                Block::from_digits(m, kind, rows).expect("golden block shape"),
            )
        })
        .collect()
}

/// Width of one block; `S1` splits into 8-symbol pieces.
pub const BLOCK_SIDE: usize = 8;

/// The building blocks of `∇S1[8k]`, recomputed from `S1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLibrary {
    /// The initial 8 symbols of `S1`.
    pub initial: ModSequence,
    /// The period of `S1` cut into three 8-symbol pieces.
    pub thirds: [ModSequence; 3],
    blocks: BTreeMap<&'static str, Block>,
}

impl BlockLibrary {
    pub fn get(&self, name: &str) -> Result<&Block, BlockError> {
        self.blocks
            .get(name)
            .ok_or_else(|| BlockError::UnknownBlock(name.to_string()))
    }

    fn at(&self, name: &str) -> &Block {
        &self.blocks[name]
    }

    /// Swaps in a different block under an existing name.
    pub fn replace(&mut self, name: &str, block: Block) -> Result<Block, BlockError> {
        let slot = self
            .blocks
            .get_mut(name)
            .ok_or_else(|| BlockError::UnknownBlock(name.to_string()))?;
        Ok(std::mem::replace(slot, block))
    }

    /// Blocks in table order.
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &Block)> + '_ {
        BLOCK_NAMES.iter().map(move |&n| (n, &self.blocks[n]))
    }
}

pub fn build_library() -> BlockLibrary {
    let s1 = catalog_sequence("S1").expect("S1 is in the catalog");
    let initial = s1.prefix(BLOCK_SIDE);
    let thirds = [1, 2, 3].map(|i| s1.window(i * BLOCK_SIDE, (i + 1) * BLOCK_SIDE));
    let a = [&initial, &thirds[0], &thirds[1], &thirds[2]]
        .map(|s| Block::from_triangle(&build_triangle(s)));
    let next = |row: &[Block; 4]| -> [Block; 4] {
        let pair = |i: usize, j: usize| star(&row[i], &row[j]).expect("equal sides");
        [pair(0, 1), pair(1, 2), pair(2, 3), pair(3, 1)]
    };
    let b = next(&a);
    let c = next(&b);
    let d0 = star(&c[0], &c[1]).expect("equal sides");
    let e0 = star(&d0, &c[3]).expect("equal sides");

    let mut blocks = BTreeMap::new();
    for (prefix, row) in [("A", a), ("B", b), ("C", c)] {
        for (i, block) in row.into_iter().enumerate() {
            let name = BLOCK_NAMES
                .iter()
                .find(|n| n.starts_with(prefix) && n.ends_with(&i.to_string()))
                .expect("named block");
            blocks.insert(*name, block);
        }
    }
    blocks.insert("D0", d0);
    blocks.insert("E0", e0);
    BlockLibrary {
        initial,
        thirds,
        blocks,
    }
}

/// Names of library blocks that differ from the published listing.
pub fn golden_mismatches(lib: &BlockLibrary) -> Vec<&'static str> {
    golden_blocks()
        .into_iter()
        .filter(|(name, golden)| lib.at(name) != golden)
        .map(|(name, _)| name)
        .collect()
}

/// Multiplicity vector of every block, in table order.
pub fn block_multiplicities(lib: &BlockLibrary) -> Vec<(&'static str, MultiplicityVector)> {
    lib.iter().map(|(n, b)| (n, b.multiplicities())).collect()
}

/// Multiplicity table as CSV: one row per residue, one column per block.
pub fn table_csv(table: &[(&str, MultiplicityVector)]) -> String {
    let mut out = String::from("residue");
    for (name, _) in table {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    let m = table.first().map_or(0, |(_, v)| v.counts().len());
    for r in 0..m {
        out.push_str(&r.to_string());
        for (_, v) in table {
            out.push(',');
            out.push_str(&v.counts()[r].to_string());
        }
        out.push('\n');
    }
    out
}

/// Block label at block-row `row` (0 = the top row of triangles) and
/// position `pos` from the western edge.
///
/// Row 0 is `A0` then `A1 A2 A3` repeating, row 1 is `B0` then `B1 B2 B3`
/// repeating. From row 2 on, the western block cycles `C0, D0, E0` and the
/// rest of the row runs through `C1 C2 C3`, shifted back one step per row.
pub fn block_label(row: usize, pos: usize) -> &'static str {
    const A: [&str; 3] = ["A1", "A2", "A3"];
    const B: [&str; 3] = ["B1", "B2", "B3"];
    const C: [&str; 3] = ["C1", "C2", "C3"];
    const WEST: [&str; 3] = ["C0", "D0", "E0"];
    match (row, pos) {
        (0, 0) => "A0",
        (0, p) => A[(p - 1) % 3],
        (1, 0) => "B0",
        (1, p) => B[(p - 1) % 3],
        (r, 0) => WEST[(r - 2) % 3],
        (r, p) => C[(p + 2 * r + 1) % 3],
    }
}

/// Block labels of `∇S1[8k]`: row `r` holds `k - r` blocks.
pub fn layout(k: usize) -> Vec<Vec<&'static str>> {
    (0..k)
        .map(|r| (0..k - r).map(|p| block_label(r, p)).collect())
        .collect()
}

/// Tiles `∇S1[8k]` from library blocks.
pub fn assemble(lib: &BlockLibrary, k: usize) -> SteinhausTriangle {
    let s = BLOCK_SIDE;
    let n = s * k;
    let mut rows: Vec<Vec<u8>> = (0..n).map(|i| vec![u8::MAX; n - i]).collect();
    for (r, labels) in layout(k).into_iter().enumerate() {
        for (p, label) in labels.into_iter().enumerate() {
            let block = lib.at(label);
            if r == 0 {
                for (i, row) in block.rows.iter().enumerate() {
                    rows[i][s * p..s * p + row.len()].copy_from_slice(row);
                }
            } else {
                for (t, row) in block.rows.iter().enumerate() {
                    let first_col = s * p + s.saturating_sub(t + 1);
                    let big_row = (r - 1) * s + 1 + t;
                    rows[big_row][first_col..first_col + row.len()].copy_from_slice(row);
                }
            }
        }
    }
    debug_assert!(rows.iter().flatten().all(|&c| c != u8::MAX));
    SteinhausTriangle::from_rows(lib.at("A0").modulus(), rows).expect("tiling fills every cell")
}

/// Outcome of checking the lower-side coincidences and the derived
/// product identities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeReport {
    /// `(block, partner, lower sides equal)`.
    pub coincidences: Vec<(&'static str, &'static str, bool)>,
    /// `(left, right, expected product, holds)`.
    pub identities: Vec<(&'static str, &'static str, &'static str, bool)>,
}

impl EdgeReport {
    pub fn all_hold(&self) -> bool {
        self.coincidences.iter().all(|c| c.2) && self.identities.iter().all(|i| i.3)
    }
}

pub const EDGE_COINCIDENCES: [(&str, &str); 4] =
    [("C1", "B3"), ("C2", "B1"), ("C3", "B2"), ("E0", "B0")];

pub const PRODUCT_IDENTITIES: [(&str, &str, &str); 4] = [
    ("C1", "C2", "C3"),
    ("C2", "C3", "C1"),
    ("C3", "C1", "C2"),
    ("E0", "C2", "C0"),
];

pub fn edge_report(lib: &BlockLibrary) -> EdgeReport {
    let coincidences = EDGE_COINCIDENCES
        .iter()
        .map(|&(x, y)| {
            let (bx, by) = (lib.at(x), lib.at(y));
            let same = bx.lower_left_edge() == by.lower_left_edge()
                && bx.lower_right_edge() == by.lower_right_edge();
            (x, y, same)
        })
        .collect();
    let identities = PRODUCT_IDENTITIES
        .iter()
        .map(|&(x, y, z)| {
            let holds = star(lib.at(x), lib.at(y)).is_ok_and(|p| &p == lib.at(z));
            (x, y, z, holds)
        })
        .collect();
    EdgeReport {
        coincidences,
        identities,
    }
}

pub fn verify_edge_coincidences(lib: &BlockLibrary) -> bool {
    edge_report(lib).all_hold()
}

/// Per-residue count of the eastern band `∇S1[8k] \ ∇S1[8k-8]` as given
/// by the three closed forms (`k = 3q`, `3q+1`, `3q+2`).
pub fn band_case_value(k: usize) -> Result<u64, BlockError> {
    if k < 3 {
        return Err(BlockError::KTooSmall(k));
    }
    let q = (k / 3) as u64;
    let base = [41, 57, 73][k % 3];
    Ok(base + 48 * (q - 1))
}

pub fn band_case_formula(k: usize) -> Result<MultiplicityVector, BlockError> {
    let m = Modulus::new(4).expect("4 is a modulus");
    Ok(MultiplicityVector::constant(m, band_case_value(k)?))
}

/// Blocks forming the eastern band for each class of `k` mod 3, besides
/// the `q - 1` copies of `C1, C2, C3`.
pub const BAND_CASE_BLOCKS: [&[&str]; 3] = [
    &["A2", "B1", "C0"],
    &["A3", "B2", "C1", "D0"],
    &["A1", "B3", "C2", "C3", "E0"],
];

/// The band computed three ways.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandCase {
    pub k: usize,
    pub formula: MultiplicityVector,
    /// Sum of the library blocks on the eastern edge of the tiling.
    pub from_blocks: MultiplicityVector,
    /// Incremental band of the first row itself.
    pub from_band: MultiplicityVector,
    /// Eastern-edge block labels, top to bottom.
    pub labels: Vec<&'static str>,
}

impl BandCase {
    /// All three routes agree and the per-residue count is a quarter of the
    /// band's cell count `64k - 28`.
    pub fn holds(&self) -> bool {
        let k = self.k as u64;
        self.formula == self.from_blocks
            && self.formula == self.from_band
            && 4 * self.formula.get(0) == 64 * k - 28
    }
}

pub fn band_case(lib: &BlockLibrary, k: usize) -> Result<BandCase, BlockError> {
    let formula = band_case_formula(k)?;
    let labels: Vec<&'static str> = (0..k).map(|r| block_label(r, k - 1 - r)).collect();
    let mut from_blocks = MultiplicityVector::zero(formula.modulus());
    for l in &labels {
        from_blocks.add_assign(&lib.at(l).multiplicities());
    }
    let s1 = catalog_sequence("S1").expect("S1 is in the catalog");
    let n = BLOCK_SIDE * k;
    let state = build_triangle(&s1.prefix(n - BLOCK_SIDE)).eastern_state();
    let (from_band, _) = extend_band(&state, &s1.window(n - BLOCK_SIDE, n)).expect("same modulus");
    Ok(BandCase {
        k,
        formula,
        from_blocks,
        from_band,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m4() -> Modulus {
        Modulus::new(4).unwrap()
    }

    fn block(kind: BlockKind, rows: &[&str]) -> Block {
        Block::from_digits(m4(), kind, rows).unwrap()
    }

    #[test]
    fn star_of_two_small_triangles() {
        let a = block(BlockKind::Triangle, &["01", "1"]);
        let b = block(BlockKind::Triangle, &["23", "1"]);
        let p = star(&a, &b).unwrap();
        assert_eq!(p, block(BlockKind::Lozenge, &["3", "00", "0"]));
    }

    #[test]
    fn star_of_two_small_lozenges() {
        let a = block(BlockKind::Lozenge, &["2", "23", "1"]);
        let b = block(BlockKind::Lozenge, &["3", "02", "2"]);
        let p = star(&a, &b).unwrap();
        assert_eq!(p, block(BlockKind::Lozenge, &["3", "01", "1"]));
    }

    #[test]
    fn star_of_zero_blocks_is_zero() {
        for s in 0..6 {
            let z = Block::zero(m4(), BlockKind::Triangle, s);
            let l = Block::zero(m4(), BlockKind::Lozenge, s);
            assert_eq!(
                star(&z, &l).unwrap(),
                Block::zero(m4(), BlockKind::Lozenge, s)
            );
        }
    }

    #[test]
    fn star_rejects_mismatches() {
        let a = Block::zero(m4(), BlockKind::Triangle, 2);
        let b = Block::zero(m4(), BlockKind::Triangle, 3);
        assert_eq!(
            star(&a, &b),
            Err(BlockError::SideMismatch { left: 2, right: 3 })
        );
        let c = Block::zero(Modulus::new(5).unwrap(), BlockKind::Triangle, 2);
        assert!(matches!(
            star(&a, &c),
            Err(BlockError::ModulusMismatch { .. })
        ));
        assert!(Block::from_digits(m4(), BlockKind::Lozenge, &["1", "12"]).is_err());
    }

    #[test]
    fn star_matches_pascal_below_adjacent_triangles() {
        let u = ModSequence::from_values(m4(), [3, 1, 0, 2, 2]);
        let v = ModSequence::from_values(m4(), [1, 1, 3, 0, 2]);
        let big = build_triangle(&u.concat(&v).unwrap());
        let p = star(
            &Block::from_triangle(&build_triangle(&u)),
            &Block::from_triangle(&build_triangle(&v)),
        )
        .unwrap();
        // Lozenge row t sits at triangle row t+1.
        for (t, row) in p.rows().iter().enumerate() {
            let first = if t < 5 { 4 - t } else { 0 };
            assert_eq!(&big.rows()[t + 1][first..first + row.len()], row.as_slice());
        }
    }

    #[test]
    fn library_matches_published_blocks() {
        let lib = build_library();
        assert_eq!(golden_mismatches(&lib), Vec::<&str>::new());
        assert_eq!(
            lib.get("A1").unwrap().rows()[0],
            vec![2, 1, 2, 1, 1, 3, 2, 2]
        );
        assert_eq!(lib.get("E0").unwrap().rows().last().unwrap(), &vec![2]);
        assert_eq!(
            &star(lib.get("A0").unwrap(), lib.get("A1").unwrap()).unwrap(),
            lib.get("B0").unwrap()
        );
        assert_eq!(lib.initial.to_string(), "01220232");
        assert_eq!(lib.thirds[1].to_string(), "00302323");
    }

    #[test]
    fn table_one() {
        let lib = build_library();
        let table = block_multiplicities(&lib);
        for ((name, v), expected) in table.iter().zip(BLOCK_COUNTS) {
            assert_eq!(v.counts(), expected, "{name}");
            let cells = if name.starts_with('A') { 36 } else { 64 };
            assert_eq!(v.total(), cells, "{name}");
        }
        let c: u64 = ["C1", "C2", "C3"]
            .iter()
            .map(|n| lib.get(n).unwrap().multiplicities().get(0))
            .sum();
        assert_eq!(c, 48);
        for r in 0..4u8 {
            let sum: u64 = ["C1", "C2", "C3"]
                .iter()
                .map(|n| lib.get(n).unwrap().multiplicities().get(r))
                .sum();
            assert_eq!(sum, 48);
        }
        let csv = table_csv(&table);
        assert!(csv.starts_with("residue,A0,A1,A2,A3,B0"));
        assert_eq!(csv.lines().nth(2).unwrap().split(',').nth(2), Some("10"));
    }

    #[test]
    fn layout_of_eight_block_rows() {
        let expected = [
            "A0 A1 A2 A3 A1 A2 A3 A1",
            "B0 B1 B2 B3 B1 B2 B3",
            "C0 C1 C2 C3 C1 C2",
            "D0 C3 C1 C2 C3",
            "E0 C2 C3 C1",
            "C0 C1 C2",
            "D0 C3",
            "E0",
        ];
        let got: Vec<String> = layout(8).iter().map(|r| r.join(" ")).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn assembly_matches_direct_build() {
        let lib = build_library();
        let s1 = catalog_sequence("S1").unwrap();
        assert_eq!(assemble(&lib, 0).n(), 0);
        assert_eq!(
            assemble(&lib, 1),
            build_triangle(&ModSequence::from_values(m4(), [0, 1, 2, 2, 0, 2, 3, 2]))
        );
        for k in [2, 3, 8, 12] {
            assert_eq!(
                assemble(&lib, k),
                build_triangle(&s1.prefix(8 * k)),
                "k={k}"
            );
        }
    }

    #[test]
    fn edge_coincidences() {
        let mut lib = build_library();
        let report = edge_report(&lib);
        assert!(report.all_hold(), "{report:?}");
        assert_eq!(report.coincidences.len(), 4);
        let c2 = star(lib.get("C3").unwrap(), lib.get("C1").unwrap()).unwrap();
        assert_eq!(&c2, lib.get("C2").unwrap());

        let mut e0 = lib.get("E0").unwrap().clone();
        let last = e0.rows_mut().last_mut().unwrap();
        last[0] = (last[0] + 1) % 4;
        lib.replace("E0", e0).unwrap();
        assert!(!verify_edge_coincidences(&lib));
    }

    #[test]
    fn band_cases() {
        assert_eq!(band_case_value(3), Ok(41));
        assert_eq!(band_case_value(4), Ok(57));
        assert_eq!(band_case_value(5), Ok(73));
        assert_eq!(band_case_value(6), Ok(89));
        assert_eq!(band_case_formula(2), Err(BlockError::KTooSmall(2)));
        let lib = build_library();
        for k in 3..=12 {
            let case = band_case(&lib, k).unwrap();
            assert!(case.holds(), "{case:?}");
            let mut labels = case.labels.clone();
            labels.sort_unstable();
            let q = k / 3;
            let mut expected: Vec<&str> = BAND_CASE_BLOCKS[k % 3].to_vec();
            for _ in 1..q {
                expected.extend(["C1", "C2", "C3"]);
            }
            expected.sort_unstable();
            assert_eq!(labels, expected, "k={k}");
        }
    }

    #[test]
    fn rendering_lozenge() {
        let l = block(BlockKind::Lozenge, &["3", "01", "1"]);
        assert_eq!(l.render(), " 3\n0 1\n 1\n");
    }
}
