//! Published reference values, kept as data so that any transcription or
//! computation drift shows up as a test failure.

/// A published generating function: its polynomial part and, when the
/// series is infinite, the constant tail `c·t^{n0}/(1 - t^{stride})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PublishedSeries {
    pub name: &'static str,
    pub terms: &'static [(usize, u64)],
    /// `(n0, c)`.
    pub tail: Option<(usize, u64)>,
}

impl PublishedSeries {
    /// Coefficient implied at exponent `n` (stride `stride` for the tail).
    pub fn coefficient(&self, n: usize, stride: usize) -> u64 {
        if let Some((n0, c)) = self.tail {
            if n >= n0 && (n - n0).is_multiple_of(stride) {
                return c;
            }
        }
        self.terms
            .iter()
            .find(|&&(e, _)| e == n)
            .map_or(0, |&(_, a)| a)
    }

    /// Last exponent of the polynomial part.
    pub fn last_term(&self) -> Option<usize> {
        self.terms.last().map(|&(n, _)| n)
    }
}

const fn series(
    name: &'static str,
    terms: &'static [(usize, u64)],
    tail: Option<(usize, u64)>,
) -> PublishedSeries {
    PublishedSeries { name, terms, tail }
}

/// Lifts from `Z/2` to `Z/4`; checkpoint stride 8.
pub const LIFTS_Z2_TO_Z4: [PublishedSeries; 16] = [
    series(
        "Q1",
        &[
            (0, 1),
            (8, 8),
            (16, 34),
            (24, 58),
            (32, 84),
            (40, 88),
            (48, 86),
            (56, 82),
            (64, 60),
            (72, 36),
            (80, 34),
            (88, 28),
            (96, 16),
        ],
        Some((104, 2)),
    ),
    series(
        "Q2",
        &[
            (0, 1),
            (8, 4),
            (16, 14),
            (24, 32),
            (32, 36),
            (40, 48),
            (48, 44),
            (56, 26),
            (64, 22),
            (72, 8),
            (80, 6),
            (88, 4),
            (96, 2),
        ],
        None,
    ),
    series(
        "Q3",
        &[
            (0, 1),
            (8, 8),
            (16, 28),
            (24, 46),
            (32, 78),
            (40, 124),
            (48, 118),
            (56, 96),
            (64, 78),
            (72, 60),
            (80, 28),
            (88, 20),
            (96, 14),
            (104, 10),
            (112, 4),
            (120, 6),
            (128, 4),
            (136, 6),
            (144, 4),
            (152, 2),
            (160, 2),
            (168, 2),
            (176, 2),
            (184, 2),
            (192, 2),
            (200, 2),
            (208, 4),
        ],
        Some((216, 2)),
    ),
    series(
        "Q4",
        &[
            (0, 1),
            (8, 8),
            (16, 26),
            (24, 42),
            (32, 66),
            (40, 62),
            (48, 52),
            (56, 36),
            (64, 26),
            (72, 12),
            (80, 6),
        ],
        None,
    ),
    series("R1", &[], None),
    series("R2", &[], None),
    series(
        "R3",
        &[
            (7, 10),
            (15, 38),
            (23, 70),
            (31, 88),
            (39, 76),
            (47, 54),
            (55, 44),
            (63, 28),
            (71, 16),
            (79, 8),
            (87, 4),
            (95, 4),
            (103, 4),
            (111, 4),
            (119, 4),
            (127, 6),
            (135, 4),
            (143, 6),
        ],
        Some((151, 4)),
    ),
    series(
        "R4",
        &[
            (7, 10),
            (15, 52),
            (23, 102),
            (31, 136),
            (39, 152),
            (47, 118),
            (55, 108),
            (63, 80),
            (71, 60),
            (79, 32),
            (87, 20),
            (95, 8),
            (103, 2),
        ],
        None,
    ),
    series("R5", &[(7, 10)], None),
    series(
        "R6",
        &[
            (7, 10),
            (15, 30),
            (23, 66),
            (31, 96),
            (39, 96),
            (47, 94),
            (55, 66),
            (63, 42),
            (71, 24),
            (79, 8),
            (87, 2),
            (95, 2),
        ],
        None,
    ),
    series(
        "R7",
        &[
            (7, 10),
            (15, 60),
            (23, 138),
            (31, 204),
            (39, 304),
            (47, 266),
            (55, 246),
            (63, 148),
            (71, 64),
            (79, 36),
            (87, 14),
            (95, 10),
            (103, 8),
        ],
        None,
    ),
    series("R8", &[(7, 10)], None),
    series(
        "R9",
        &[
            (7, 10),
            (15, 42),
            (23, 80),
            (31, 130),
            (39, 164),
            (47, 174),
            (55, 126),
            (63, 68),
            (71, 38),
            (79, 20),
            (87, 22),
            (95, 12),
            (103, 2),
            (111, 2),
            (119, 2),
            (127, 2),
            (135, 2),
            (143, 2),
            (151, 2),
            (159, 2),
            (167, 2),
            (175, 2),
            (183, 2),
            (191, 2),
            (199, 2),
            (207, 4),
        ],
        Some((215, 2)),
    ),
    series(
        "R10",
        &[
            (7, 10),
            (15, 58),
            (23, 98),
            (31, 130),
            (39, 160),
            (47, 138),
            (55, 132),
            (63, 84),
            (71, 64),
            (79, 34),
            (87, 14),
            (95, 8),
            (103, 6),
            (111, 2),
            (119, 2),
            (127, 4),
        ],
        Some((135, 2)),
    ),
    series(
        "R11",
        &[
            (7, 4),
            (15, 16),
            (23, 26),
            (31, 32),
            (39, 30),
            (47, 30),
            (55, 26),
            (63, 12),
            (71, 8),
            (79, 2),
        ],
        None,
    ),
    series("R12", &[(7, 4)], None),
];

/// Lifts from `Z/4` to `Z/8`; checkpoint stride 16. All polynomials.
pub const LIFTS_Z4_TO_Z8: [PublishedSeries; 6] = [
    series(
        "S1",
        &[(0, 1), (16, 16), (32, 46), (48, 32), (64, 14)],
        None,
    ),
    series(
        "S2",
        &[(0, 1), (16, 22), (32, 60), (48, 56), (64, 28), (80, 6)],
        None,
    ),
    series(
        "T1",
        &[
            (15, 14),
            (31, 40),
            (47, 40),
            (63, 24),
            (79, 8),
            (95, 2),
            (111, 2),
        ],
        None,
    ),
    series(
        "T2",
        &[(15, 30), (31, 66), (47, 76), (63, 32), (79, 12)],
        None,
    ),
    series(
        "T3",
        &[(15, 14), (31, 54), (47, 42), (63, 34), (79, 12), (95, 2)],
        None,
    ),
    series(
        "T4",
        &[(15, 14), (31, 54), (47, 64), (63, 40), (79, 10), (95, 2)],
        None,
    ),
];

pub fn published_series(name: &str) -> Option<&'static PublishedSeries> {
    LIFTS_Z2_TO_Z4
        .iter()
        .chain(LIFTS_Z4_TO_Z8.iter())
        .find(|s| s.name.eq_ignore_ascii_case(name))
}

/// Balanced first rows over `Z/6` of length 12.
pub const CENSUS_Z6_LENGTH12: u64 = 94_648;
/// Their classes under reversal and negation.
pub const CENSUS_Z6_LENGTH12_ORBITS: u64 = 23_662;

/// `(m, n)` admissible pairs with no balanced triangle.
pub const COUNTEREXAMPLES: [(u32, usize); 2] = [(15, 5), (21, 6)];
