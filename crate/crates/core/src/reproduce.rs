//! Registry of reproducible claims. Each claim recomputes a published value
//! and compares it against the golden data in [`crate::golden`] and
//! [`crate::blocks`].

use std::fmt;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::blocks::{
    assemble, band_case, band_case_value, block_multiplicities, build_library, edge_report,
    golden_mismatches, BLOCK_NAMES, BLOCK_COUNTS,
};
use crate::census::{count_balanced, orbit_count, CensusConfig, CensusError, SymmetryGroup};
use crate::golden::{
    PublishedSeries, CENSUS_Z6_LENGTH12, CENSUS_Z6_LENGTH12_ORBITS, COUNTEREXAMPLES,
    LIFTS_Z2_TO_Z4, LIFTS_Z4_TO_Z8,
};
use crate::lift::{
    brute_force_lifts, count_lifts, detect_tail, GenFunction, LiftError, LiftSearch, Tail,
};
use crate::residue::{catalog_sequence, Modulus, Sequence, SequenceError, CATALOG};
use crate::triangle::{build_triangle, is_strongly_balanced};

pub const THM3_HORIZON: usize = 400;
pub const THM4_HORIZON: usize = 256;
pub const DEFAULT_TAIL_WINDOW: usize = 8;
pub const ORACLE_LENGTHS: [usize; 4] = [7, 8, 15, 16];

#[derive(Debug, Error)]
pub enum ReproduceError {
    #[error("unknown claim `{0}`; run `reproduce --list`")]
    UnknownClaim(String),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Census(#[from] CensusError),
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub label: String,
    pub expected: String,
    pub measured: String,
    pub passed: bool,
}

impl Check {
    fn new(
        label: impl Into<String>,
        expected: impl fmt::Display,
        measured: impl fmt::Display,
    ) -> Self {
        let expected = expected.to_string();
        let measured = measured.to_string();
        Check {
            label: label.into(),
            passed: expected == measured,
            expected,
            measured,
        }
    }

    fn flag(label: impl Into<String>, holds: bool) -> Self {
        Check::new(label, true, holds)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimReport {
    pub id: String,
    pub description: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub elapsed_secs: f64,
}

impl ClaimReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Summary line plus every failing check (all checks when `verbose`).
    pub fn render(&self, verbose: bool) -> String {
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let mut out = format!(
            "{} {}: {} ({}/{} checks, {:.2}s)\n",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.description,
            passed,
            self.checks.len(),
            self.elapsed_secs
        );
        for c in &self.checks {
            if verbose || !c.passed {
                out.push_str(&format!(
                    "  [{}] {}: expected {}, measured {}\n",
                    if c.passed { "ok" } else { "FAIL" },
                    c.label,
                    c.expected,
                    c.measured
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClaimInfo {
    pub id: &'static str,
    pub description: &'static str,
    /// Takes more than a few seconds in an optimized build.
    pub slow: bool,
}

const fn info(id: &'static str, description: &'static str, slow: bool) -> ClaimInfo {
    ClaimInfo {
        id,
        description,
        slow,
    }
}

/// Top-level claims in acceptance order. Every lift series also has its
/// own id, e.g. `thm3-Q1` or `thm4-T2`.
pub const CLAIMS: [ClaimInfo; 10] = [
    info(
        "thm1",
        "S1, S2 at 8k and T1..T4 at 8k+7 strongly balanced mod 4 for k = 0..50",
        false,
    ),
    info(
        "thm2",
        "Q1..Q4 at 4k and R1..R12 at 4k+3 strongly balanced mod 2 for k = 0..200",
        false,
    ),
    info("table1", "multiplicities of the 14 building blocks", false),
    info(
        "lemma1",
        "block tiling of S1[8k] for k = 0..24 and the edge coincidences",
        false,
    ),
    info(
        "band-cases",
        "eastern band counts 41/57/73 + 48(q-1) for k = 3..20",
        false,
    ),
    info(
        "thm3",
        "strongly balanced lifts Z/2 -> Z/4, all 16 series up to n = 400",
        false,
    ),
    info(
        "thm4",
        "strongly balanced lifts Z/4 -> Z/8, all 6 polynomials up to n = 256",
        false,
    ),
    info(
        "oracle",
        "lift search equals brute force at n = 7, 8, 15, 16",
        false,
    ),
    info(
        "counterexamples",
        "no balanced triangle of side 5 mod 15 or side 6 mod 21",
        false,
    ),
    info(
        "census-z6",
        "94648 balanced rows of length 12 mod 6 in 23662 classes",
        true,
    ),
];

/// Every runnable id, including per-sequence ones.
pub fn claim_ids() -> Vec<String> {
    let mut ids: Vec<String> = CLAIMS.iter().map(|c| c.id.to_string()).collect();
    ids.extend(LIFTS_Z2_TO_Z4.iter().map(|s| format!("thm3-{}", s.name)));
    ids.extend(LIFTS_Z4_TO_Z8.iter().map(|s| format!("thm4-{}", s.name)));
    ids
}

pub struct Options<'a> {
    pub census: CensusConfig,
    pub tail_window: usize,
    /// Progress sink for long claims.
    pub progress: Option<&'a (dyn Fn(&str) + Sync)>,
}

impl Default for Options<'_> {
    fn default() -> Self {
        Options {
            census: CensusConfig::default(),
            tail_window: DEFAULT_TAIL_WINDOW,
            progress: None,
        }
    }
}

impl Options<'_> {
    fn note(&self, msg: &str) {
        if let Some(p) = self.progress {
            p(msg);
        }
    }
}

pub fn run_claim(id: &str, opts: &Options) -> Result<ClaimReport, ReproduceError> {
    let start = Instant::now();
    let lower = id.to_ascii_lowercase();
    let (id, description, checks) = if let Some(name) = lower.strip_prefix("thm3-") {
        let s = series_in(&LIFTS_Z2_TO_Z4, name)
            .ok_or_else(|| ReproduceError::UnknownClaim(id.into()))?;
        (
            format!("thm3-{}", s.name),
            format!("G_{} for lifts Z/2 -> Z/4", s.name),
            series_z2(s, opts)?,
        )
    } else if let Some(name) = lower.strip_prefix("thm4-") {
        let s = series_in(&LIFTS_Z4_TO_Z8, name)
            .ok_or_else(|| ReproduceError::UnknownClaim(id.into()))?;
        (
            format!("thm4-{}", s.name),
            format!("G_{} for lifts Z/4 -> Z/8", s.name),
            series_z4(s, opts)?,
        )
    } else {
        let claim = CLAIMS
            .iter()
            .find(|c| c.id == lower)
            .ok_or_else(|| ReproduceError::UnknownClaim(id.into()))?;
        let checks = match claim.id {
            "thm1" => strong_balance_suite(4, 50)?,
            "thm2" => strong_balance_suite(2, 200)?,
            "table1" => block_counts(),
            "lemma1" => tiling(),
            "band-cases" => band_cases(),
            "thm3" => concat(LIFTS_Z2_TO_Z4.iter().map(|s| series_z2(s, opts)))?,
            "thm4" => concat(LIFTS_Z4_TO_Z8.iter().map(|s| series_z4(s, opts)))?,
            "oracle" => oracle()?,
            "counterexamples" => counterexamples(opts)?,
            "census-z6" => census_z6(opts)?,
            _ => unreachable!("registry and dispatch agree"),
        };
        (claim.id.to_string(), claim.description.to_string(), checks)
    };
    Ok(ClaimReport {
        id,
        description,
        passed: checks.iter().all(|c| c.passed),
        checks,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

fn concat(
    parts: impl Iterator<Item = Result<Vec<Check>, ReproduceError>>,
) -> Result<Vec<Check>, ReproduceError> {
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

fn series_in<'a>(list: &'a [PublishedSeries], name: &str) -> Option<&'a PublishedSeries> {
    list.iter().find(|s| s.name.eq_ignore_ascii_case(name))
}

/// Strong balance of every catalog sequence over `Z/m` at lengths
/// `initial_len + 2m·k`.
fn strong_balance_suite(m: u32, k_max: usize) -> Result<Vec<Check>, ReproduceError> {
    let mut checks = Vec::new();
    for entry in CATALOG.iter().filter(|e| e.modulus == m) {
        let s = entry.sequence();
        let offset = s.initial().len() % (2 * m as usize);
        let prefix = s.prefix(offset + 2 * m as usize * k_max);
        let flags = crate::triangle::balanced_prefix_flags(&prefix);
        for k in 0..=k_max {
            let n = offset + 2 * m as usize * k;
            let holds = crate::triangle::strongly_balanced_from_flags(&flags, n, s.modulus());
            checks.push(Check::flag(
                format!("{}[{n}] strongly balanced", entry.name),
                holds,
            ));
        }
        // The flag shortcut is cross-checked against the direct test once
        // per sequence.
        let direct = is_strongly_balanced(&prefix).expect("even modulus");
        checks.push(Check::flag(
            format!(
                "{}[{}] strongly balanced (direct)",
                entry.name,
                prefix.len()
            ),
            direct,
        ));
    }
    Ok(checks)
}

fn block_counts() -> Vec<Check> {
    let lib = build_library();
    let mut checks: Vec<Check> = golden_mismatches(&lib)
        .into_iter()
        .map(|name| Check::new(format!("{name} cells"), "as printed", "differs"))
        .collect();
    let table = block_multiplicities(&lib);
    for ((name, mv), expected) in table.iter().zip(BLOCK_COUNTS.iter()) {
        checks.push(Check::new(
            format!("{name} multiplicities"),
            fmt_vec(expected),
            fmt_vec(mv.counts()),
        ));
        let sum = if name.starts_with('A') { 36 } else { 64 };
        checks.push(Check::new(format!("{name} column sum"), sum, mv.total()));
    }
    checks.push(Check::new("blocks", BLOCK_NAMES.len(), table.len()));
    checks
}

fn tiling() -> Vec<Check> {
    let lib = build_library();
    let s1 = catalog_sequence("S1").expect("catalog");
    let mut checks: Vec<Check> = (0..=24)
        .map(|k| {
            let tiled = assemble(&lib, k);
            let direct = build_triangle(&s1.prefix(8 * k));
            Check::flag(
                format!("assemble({k}) = triangle of S1[{}]", 8 * k),
                tiled == direct,
            )
        })
        .collect();
    let report = edge_report(&lib);
    for &(x, y, same) in &report.coincidences {
        checks.push(Check::flag(
            format!("lower sides of {x} and {y} coincide"),
            same,
        ));
    }
    for &(x, y, z, holds) in &report.identities {
        checks.push(Check::flag(format!("{x} * {y} = {z}"), holds));
    }
    checks
}

fn band_cases() -> Vec<Check> {
    let lib = build_library();
    (3..=20)
        .map(|k| {
            let case = band_case(&lib, k).expect("k >= 3");
            let value = band_case_value(k).expect("k >= 3");
            let measured = if case.holds() {
                case.from_band.get(0).to_string()
            } else {
                format!(
                    "formula {:?}, blocks {:?}, band {:?}",
                    case.formula.counts(),
                    case.from_blocks.counts(),
                    case.from_band.counts()
                )
            };
            Check::new(format!("band at k = {k}"), value, measured)
        })
        .collect()
}

/// Coefficients of `g` restricted to the chains the published series lives
/// on.
fn family_part(search: &LiftSearch, g: &GenFunction) -> GenFunction {
    let classes = search.family_classes();
    GenFunction {
        coefficients: g
            .coefficients
            .iter()
            .copied()
            .filter(|&(n, _)| classes.contains(&(n % g.stride)))
            .collect(),
        horizon: g.horizon,
        stride: g.stride,
        tail: None,
    }
}

fn compare_series(
    s: &PublishedSeries,
    horizon: usize,
    opts: &Options,
) -> Result<(GenFunction, Vec<Check>), ReproduceError> {
    opts.note(&format!("lifting {} to horizon {horizon}", s.name));
    let seq: Sequence = catalog_sequence(s.name)?.into();
    let search = LiftSearch::new(&seq)?;
    let g = count_lifts(&seq, horizon)?;
    let family = family_part(&search, &g);
    let skip_zero = s.terms.first().is_some_and(|&(n, _)| n != 0);
    let mut checks = Vec::new();
    for &(n, a) in &family.coefficients {
        if n == 0 && skip_zero {
            continue;
        }
        checks.push(Check::new(
            format!("{} a_{n}", s.name),
            s.coefficient(n, g.stride),
            a,
        ));
    }
    Ok((family, checks))
}

fn series_z2(s: &PublishedSeries, opts: &Options) -> Result<Vec<Check>, ReproduceError> {
    let (family, mut checks) = compare_series(s, THM3_HORIZON, opts)?;
    let detected = detect_tail(&family, opts.tail_window).tail;
    let expected = s.tail.map(|(n0, c)| Tail {
        n0,
        stride: family.stride,
        c,
    });
    checks.push(Check::new(
        format!("{} tail", s.name),
        fmt_tail(expected),
        fmt_tail(detected),
    ));
    Ok(checks)
}

fn series_z4(s: &PublishedSeries, opts: &Options) -> Result<Vec<Check>, ReproduceError> {
    let (family, mut checks) = compare_series(s, THM4_HORIZON, opts)?;
    let max = s.last_term().unwrap_or(0);
    checks.push(Check::new(
        format!("{} degree up to n = {THM4_HORIZON}", s.name),
        max,
        family.degree().unwrap_or(0),
    ));
    Ok(checks)
}

fn oracle() -> Result<Vec<Check>, ReproduceError> {
    let mut checks = Vec::new();
    for entry in CATALOG.iter().filter(|e| e.modulus == 2) {
        let seq: Sequence = entry.sequence().into();
        let horizon = *ORACLE_LENGTHS.iter().max().expect("nonempty");
        let g = count_lifts(&seq, horizon)?;
        for n in ORACLE_LENGTHS {
            let brute = brute_force_lifts(&seq, n)?;
            checks.push(Check::new(
                format!("{} a_{n}", entry.name),
                brute,
                g.coefficient(n),
            ));
        }
    }
    Ok(checks)
}

fn counterexamples(opts: &Options) -> Result<Vec<Check>, ReproduceError> {
    let mut checks = Vec::new();
    for (m, n) in COUNTEREXAMPLES {
        opts.note(&format!("census of length {n} mod {m}"));
        let report = count_balanced(modulus(m), n, &opts.census)?;
        checks.push(Check::new(
            format!(
                "balanced rows of length {n} mod {m} (of {})",
                report.total_sequences
            ),
            0,
            report.balanced_count,
        ));
    }
    Ok(checks)
}

fn census_z6(opts: &Options) -> Result<Vec<Check>, ReproduceError> {
    opts.note("census of length 12 mod 6");
    let report = orbit_count(modulus(6), 12, SymmetryGroup::ReversalUnits, &opts.census)?;
    Ok(vec![
        Check::new(
            "balanced rows of length 12 mod 6",
            CENSUS_Z6_LENGTH12,
            report.balanced_count,
        ),
        Check::new(
            format!("classes under {}", report.group.unwrap_or_default()),
            CENSUS_Z6_LENGTH12_ORBITS,
            report.orbit_count.unwrap_or(0),
        ),
    ])
}

fn modulus(m: u32) -> Modulus {
    Modulus::new(m).expect("registry moduli are valid")
}

fn fmt_vec(v: &[u64]) -> String {
    let parts: Vec<String> = v.iter().map(u64::to_string).collect();
    format!("({})", parts.join(","))
}

fn fmt_tail(t: Option<Tail>) -> String {
    t.map_or("none".into(), |t| {
        format!("({},{},{})", t.n0, t.stride, t.c)
    })
}
