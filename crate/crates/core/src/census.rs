//! Exhaustive census of balanced first rows over `Z/m` at a fixed length.
//!
//! Rows are grown left to right. Appending `y` to a row whose triangle has
//! eastern diagonal `d` adds the cells `b_i + y`, where `b` is the new
//! diagonal for `y = 0`, so all `m` children of a node share one `O(n)`
//! pass. A child is dropped as soon as some residue would exceed the
//! balanced target `n(n+1)/(2m)`.

use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::residue::{ModSequence, Modulus};
use crate::triangle::admissible_length;

/// Default cap on `m^n`, the size of the unpruned search space.
pub const DEFAULT_BUDGET: u128 = 1 << 34;

/// Environment variable overriding the budget.
pub const BUDGET_ENV: &str = "STEINHAUS_BUDGET";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error(
        "{m}^{n} candidates exceed the budget of {budget}; raise it with --budget or {BUDGET_ENV}"
    )]
    BudgetExceeded { m: u32, n: usize, budget: u128 },
}

/// Symmetries of the set of balanced rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryGroup {
    Identity,
    /// Row reversal (mirrors the triangle).
    Reversal,
    /// Multiplication by the units of `Z/m`.
    Units,
    /// Reversal combined with multiplication by units.
    #[default]
    ReversalUnits,
}

impl SymmetryGroup {
    /// Non-identity elements as `(reverse, unit)`.
    fn nontrivial_elements(self, m: Modulus) -> Vec<(bool, u8)> {
        let units = match self {
            SymmetryGroup::Identity | SymmetryGroup::Reversal => vec![1],
            SymmetryGroup::Units | SymmetryGroup::ReversalUnits => m.units(),
        };
        let reversals: &[bool] = match self {
            SymmetryGroup::Reversal | SymmetryGroup::ReversalUnits => &[false, true],
            _ => &[false],
        };
        reversals
            .iter()
            .flat_map(|&r| units.iter().map(move |&u| (r, u)))
            .filter(|&(r, u)| r || u != 1)
            .collect()
    }

    pub fn order(self, m: Modulus) -> usize {
        self.nontrivial_elements(m).len() + 1
    }

    pub fn describe(self, m: Modulus) -> String {
        let name = match self {
            SymmetryGroup::Identity => "identity".to_string(),
            SymmetryGroup::Reversal => "reversal".to_string(),
            SymmetryGroup::Units => format!("units of Z/{m}"),
            SymmetryGroup::ReversalUnits => format!("reversal x units of Z/{m}"),
        };
        format!("{name} (order {})", self.order(m))
    }
}

impl fmt::Display for SymmetryGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryGroup::Identity => "identity",
            SymmetryGroup::Reversal => "reversal",
            SymmetryGroup::Units => "units",
            SymmetryGroup::ReversalUnits => "reversal-units",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusConfig {
    /// Number of disjoint prefix groups searched in parallel.
    pub partitions: usize,
    /// Cap on `m^n`.
    pub budget: u128,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            partitions: 1,
            budget: DEFAULT_BUDGET,
        }
    }
}

impl CensusConfig {
    /// Default configuration with the budget taken from the environment
    /// when set.
    pub fn from_env() -> Self {
        let budget = std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_BUDGET);
        CensusConfig {
            budget,
            ..CensusConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    pub modulus: u32,
    pub length: usize,
    /// `m^n`.
    pub total_sequences: u128,
    pub balanced_count: u64,
    pub orbit_count: Option<u64>,
    pub group: Option<String>,
    /// Search-tree nodes visited.
    pub nodes: u64,
    pub partitions: usize,
    pub elapsed_secs: f64,
}

impl fmt::Display for CensusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "modulus          {}", self.modulus)?;
        writeln!(f, "length           {}", self.length)?;
        writeln!(f, "candidates       {}", self.total_sequences)?;
        writeln!(f, "balanced         {}", self.balanced_count)?;
        if let (Some(orbits), Some(group)) = (self.orbit_count, &self.group) {
            writeln!(f, "orbits           {orbits}")?;
            writeln!(f, "group            {group}")?;
        }
        writeln!(f, "nodes visited    {}", self.nodes)?;
        writeln!(f, "partitions       {}", self.partitions)?;
        write!(f, "elapsed          {:.3}s", self.elapsed_secs)
    }
}

fn total_sequences(m: Modulus, n: usize) -> u128 {
    (m.get() as u128).checked_pow(n as u32).unwrap_or(u128::MAX)
}

fn check_budget(m: Modulus, n: usize, budget: u128) -> Result<u128, CensusError> {
    let total = total_sequences(m, n);
    if total > budget {
        return Err(CensusError::BudgetExceeded {
            m: m.get(),
            n,
            budget,
        });
    }
    Ok(total)
}

#[derive(Debug, Default, Clone, Copy)]
struct Tally {
    balanced: u64,
    canonical: u64,
    nodes: u64,
}

impl std::ops::Add for Tally {
    type Output = Tally;
    fn add(self, o: Tally) -> Tally {
        Tally {
            balanced: self.balanced + o.balanced,
            canonical: self.canonical + o.canonical,
            nodes: self.nodes + o.nodes,
        }
    }
}

/// Depth-first walker over rows of length `n` whose partial triangles stay
/// within the balanced target. Per-depth state lives in flat buffers with
/// stride `n + 1`.
struct Walker {
    m: u8,
    n: usize,
    target: u32,
    counts: Vec<u32>,
    /// Eastern diagonal of the length-`d` prefix at `d * (n + 1)`.
    diagonals: Vec<u8>,
    /// Next diagonal for `y = 0` below depth `d`.
    bases: Vec<u8>,
    /// Histogram of `bases` at depth `d`, at `d * m`.
    hists: Vec<u32>,
    row: Vec<u8>,
    nodes: u64,
}

impl Walker {
    fn new(m: Modulus, n: usize) -> Self {
        let cells = n * (n + 1) / 2;
        let width = n + 1;
        Walker {
            m: m.get() as u8,
            n,
            target: (cells / m.as_usize()) as u32,
            counts: vec![0; m.as_usize()],
            diagonals: vec![0; width * width],
            bases: vec![0; width * width],
            hists: vec![0; width * m.as_usize()],
            row: Vec::with_capacity(n),
            nodes: 0,
        }
    }

    fn compute_base(&mut self, depth: usize) {
        let m = self.m;
        let width = self.n + 1;
        let diag = &self.diagonals[depth * width..depth * width + depth];
        let base = &mut self.bases[depth * width..depth * width + depth + 1];
        let hist = &mut self.hists[depth * m as usize..(depth + 1) * m as usize];
        hist.fill(0);
        let mut carry = 0u8;
        base[0] = 0;
        hist[0] = 1;
        for (slot, &d) in base[1..].iter_mut().zip(diag) {
            let s = carry as u16 + d as u16;
            carry = (if s >= m as u16 { s - m as u16 } else { s }) as u8;
            *slot = carry;
            hist[carry as usize] += 1;
        }
    }

    /// Whether appending `y` at `depth` keeps every residue within the
    /// target.
    #[inline]
    fn fits(&self, depth: usize, y: u8) -> bool {
        let m = self.m as usize;
        let hist = &self.hists[depth * m..(depth + 1) * m];
        let mut r = y as usize;
        for &h in hist {
            if self.counts[r] + h > self.target {
                return false;
            }
            r += 1;
            if r == m {
                r = 0;
            }
        }
        true
    }

    fn apply(&mut self, depth: usize, y: u8, sign: bool) {
        let m = self.m as usize;
        let hist = &self.hists[depth * m..(depth + 1) * m];
        let mut r = y as usize;
        for &h in hist {
            if sign {
                self.counts[r] += h;
            } else {
                self.counts[r] -= h;
            }
            r += 1;
            if r == m {
                r = 0;
            }
        }
    }

    /// Appends `y` after a successful `fits`.
    fn descend(&mut self, depth: usize, y: u8) {
        self.apply(depth, y, true);
        let m = self.m;
        let width = self.n + 1;
        let base = &self.bases[depth * width..depth * width + depth + 1];
        let next = &mut self.diagonals[(depth + 1) * width..(depth + 1) * width + depth + 1];
        for (slot, &b) in next.iter_mut().zip(base) {
            let s = b as u16 + y as u16;
            *slot = (if s >= m as u16 { s - m as u16 } else { s }) as u8;
        }
        self.row.push(y);
    }

    fn ascend(&mut self, depth: usize, y: u8) {
        self.row.pop();
        self.apply(depth, y, false);
    }

    /// Visits every completion of the current row; `leaf` returns `false`
    /// to stop the walk. Returns `false` if stopped.
    fn walk(&mut self, depth: usize, leaf: &mut dyn FnMut(&[u8]) -> bool) -> bool {
        self.nodes += 1;
        if depth == self.n {
            return leaf(&self.row);
        }
        self.compute_base(depth);
        let last = depth + 1 == self.n;
        for y in 0..self.m {
            if !self.fits(depth, y) {
                continue;
            }
            if last {
                self.row.push(y);
                self.nodes += 1;
                let go_on = leaf(&self.row);
                self.row.pop();
                if !go_on {
                    return false;
                }
                continue;
            }
            self.descend(depth, y);
            let go_on = self.walk(depth + 1, leaf);
            self.ascend(depth, y);
            if !go_on {
                return false;
            }
        }
        true
    }

    /// Forces `prefix` onto the walker; `false` if it already overflows.
    fn seed(&mut self, prefix: &[u8]) -> bool {
        for (depth, &y) in prefix.iter().enumerate() {
            self.compute_base(depth);
            if !self.fits(depth, y) {
                return false;
            }
            self.descend(depth, y);
        }
        true
    }
}

/// `true` iff no group element maps `row` to something lexicographically
/// smaller.
fn is_canonical(row: &[u8], elements: &[(bool, u8)], m: u8) -> bool {
    let n = row.len();
    elements.iter().all(|&(reverse, unit)| {
        for i in 0..n {
            let src = if reverse { row[n - 1 - i] } else { row[i] };
            let image = ((src as u16 * unit as u16) % m as u16) as u8;
            match image.cmp(&row[i]) {
                std::cmp::Ordering::Less => return false,
                std::cmp::Ordering::Greater => return true,
                std::cmp::Ordering::Equal => {}
            }
        }
        true
    })
}

/// Prefixes of length `depth` splitting the tree into at least
/// `partitions` pieces (or the whole tree when `n` is too short).
fn partition_prefixes(m: Modulus, n: usize, partitions: usize) -> Vec<Vec<u8>> {
    let mut depth = 0;
    let mut count: usize = 1;
    while count < partitions && depth < n {
        depth += 1;
        count = count.saturating_mul(m.as_usize());
    }
    let mut prefixes = vec![Vec::new()];
    for _ in 0..depth {
        prefixes = prefixes
            .into_iter()
            .flat_map(|p| {
                (0..m.get() as u8).map(move |y| {
                    let mut q = p.clone();
                    q.push(y);
                    q
                })
            })
            .collect();
    }
    prefixes
}

fn run_census(
    m: Modulus,
    n: usize,
    group: Option<SymmetryGroup>,
    config: &CensusConfig,
) -> Result<CensusReport, CensusError> {
    let start = Instant::now();
    let total = check_budget(m, n, config.budget)?;
    let partitions = config.partitions.max(1);
    let mut tally = Tally::default();
    if admissible_length(n, m) {
        let elements = group.map(|g| g.nontrivial_elements(m)).unwrap_or_default();
        let prefixes = partition_prefixes(m, n, partitions);
        let chunk = prefixes.len().div_ceil(partitions);
        tally = prefixes
            .par_chunks(chunk.max(1))
            .map(|chunk| {
                let mut acc = Tally::default();
                for prefix in chunk {
                    let mut walker = Walker::new(m, n);
                    if !walker.seed(prefix) {
                        continue;
                    }
                    let mut balanced = 0;
                    let mut canonical = 0;
                    walker.walk(prefix.len(), &mut |row| {
                        balanced += 1;
                        if group.is_some() && is_canonical(row, &elements, m.get() as u8) {
                            canonical += 1;
                        }
                        true
                    });
                    acc = acc
                        + Tally {
                            balanced,
                            canonical,
                            nodes: walker.nodes,
                        };
                }
                acc
            })
            .reduce(Tally::default, |a, b| a + b);
    }
    Ok(CensusReport {
        modulus: m.get(),
        length: n,
        total_sequences: total,
        balanced_count: tally.balanced,
        orbit_count: group.map(|_| tally.canonical),
        group: group.map(|g| g.describe(m)),
        nodes: tally.nodes,
        partitions,
        elapsed_secs: start.elapsed().as_secs_f64(),
    })
}

/// Number of rows of length `n` over `Z/m` with a balanced triangle.
/// Inadmissible lengths return 0 without searching.
pub fn count_balanced(
    m: Modulus,
    n: usize,
    config: &CensusConfig,
) -> Result<CensusReport, CensusError> {
    run_census(m, n, None, config)
}

/// As [`count_balanced`], also counting orbits under `group` by counting
/// rows that are lexicographically minimal in their orbit.
pub fn orbit_count(
    m: Modulus,
    n: usize,
    group: SymmetryGroup,
    config: &CensusConfig,
) -> Result<CensusReport, CensusError> {
    run_census(m, n, Some(group), config)
}

/// The first `limit` balanced rows in lexicographic order.
pub fn sample_balanced(
    m: Modulus,
    n: usize,
    limit: usize,
    config: &CensusConfig,
) -> Result<Vec<ModSequence>, CensusError> {
    check_budget(m, n, config.budget)?;
    let mut out = Vec::new();
    if limit == 0 || !admissible_length(n, m) {
        return Ok(out);
    }
    let mut walker = Walker::new(m, n);
    walker.walk(0, &mut |row| {
        out.push(ModSequence::new(m, row.to_vec()).expect("walker emits residues"));
        out.len() < limit
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangle::is_balanced;

    fn m(v: u32) -> Modulus {
        Modulus::new(v).unwrap()
    }

    fn brute_force(modulus: Modulus, n: usize) -> Vec<ModSequence> {
        let mv = modulus.get() as u64;
        (0..mv.pow(n as u32))
            .map(|mut code| {
                let mut row = vec![0u8; n];
                for slot in row.iter_mut().rev() {
                    *slot = (code % mv) as u8;
                    code /= mv;
                }
                ModSequence::new(modulus, row).unwrap()
            })
            .filter(is_balanced)
            .collect()
    }

    #[test]
    fn matches_brute_force_on_small_cases() {
        for (mv, n) in [
            (2, 3),
            (2, 4),
            (3, 5),
            (4, 7),
            (4, 8),
            (5, 4),
            (3, 8),
            (6, 3),
        ] {
            let expected = brute_force(m(mv), n);
            let report = count_balanced(m(mv), n, &CensusConfig::default()).unwrap();
            assert_eq!(report.balanced_count, expected.len() as u64, "m={mv} n={n}");
            let sample = sample_balanced(m(mv), n, usize::MAX, &CensusConfig::default()).unwrap();
            assert_eq!(sample, expected, "m={mv} n={n}");
        }
    }

    #[test]
    fn inadmissible_lengths_are_empty() {
        for n in [1, 2, 5, 6, 9] {
            assert!(!admissible_length(n, m(4)));
            let r = count_balanced(m(4), n, &CensusConfig::default()).unwrap();
            assert_eq!(r.balanced_count, 0);
            assert_eq!(r.nodes, 0);
            assert!(brute_force(m(4), n).is_empty());
        }
    }

    #[test]
    fn walker_diagonals_at_large_modulus() {
        let modulus = m(255);
        let prefix = [200u8, 250, 254, 131, 77, 254];
        let mut walker = Walker::new(modulus, prefix.len());
        walker.target = u32::MAX;
        assert!(walker.seed(&prefix));
        let width = prefix.len() + 1;
        let d = prefix.len();
        let seq = ModSequence::new(modulus, prefix.to_vec()).unwrap();
        let expected = crate::triangle::build_triangle(&seq).eastern_state();
        assert_eq!(
            &walker.diagonals[d * width..d * width + d],
            expected.diagonal()
        );
        let counts: Vec<u64> = walker.counts.iter().map(|&c| c as u64).collect();
        assert_eq!(
            counts,
            crate::triangle::triangle_multiplicities(&seq).counts()
        );
    }

    #[test]
    fn small_counterexample() {
        let r = count_balanced(m(15), 5, &CensusConfig::default()).unwrap();
        assert_eq!(r.balanced_count, 0);
        assert_eq!(r.total_sequences, 759_375);
    }

    #[test]
    fn samples_contain_known_rows() {
        let all7 = sample_balanced(m(4), 7, usize::MAX, &CensusConfig::default()).unwrap();
        assert!(all7.iter().any(|s| s.to_string() == "0100203"));
        let all8 = sample_balanced(m(4), 8, usize::MAX, &CensusConfig::default()).unwrap();
        assert!(all8.iter().any(|s| s.to_string() == "01220232"));
        let empty = sample_balanced(m(2), 0, usize::MAX, &CensusConfig::default()).unwrap();
        assert_eq!(empty, vec![ModSequence::empty(m(2))]);
        let first3 = sample_balanced(m(4), 7, 3, &CensusConfig::default()).unwrap();
        assert_eq!(first3.as_slice(), &all7[..3]);
    }

    #[test]
    fn orbits_by_brute_force() {
        let rows = brute_force(m(4), 7);
        let set: std::collections::BTreeSet<Vec<u8>> =
            rows.iter().map(|r| r.entries().to_vec()).collect();
        // Orbit representatives: minimum over reversal x units.
        let mut reps = std::collections::BTreeSet::new();
        for r in &set {
            let images: Vec<Vec<u8>> = [1u8, 3]
                .iter()
                .flat_map(|&u| {
                    let s = ModSequence::new(m(4), r.clone()).unwrap().scaled(u);
                    [s.entries().to_vec(), s.reversed().entries().to_vec()]
                })
                .collect();
            reps.insert(images.into_iter().min().unwrap());
        }
        let report = orbit_count(
            m(4),
            7,
            SymmetryGroup::ReversalUnits,
            &CensusConfig::default(),
        )
        .unwrap();
        assert_eq!(report.orbit_count, Some(reps.len() as u64));
        assert_eq!(report.balanced_count, set.len() as u64);
        let id = orbit_count(m(4), 7, SymmetryGroup::Identity, &CensusConfig::default()).unwrap();
        assert_eq!(id.orbit_count, Some(id.balanced_count));
    }

    #[test]
    fn partitions_do_not_change_counts() {
        let counts: Vec<(u64, Option<u64>)> = [1, 4, 16, 1000]
            .iter()
            .map(|&p| {
                let cfg = CensusConfig {
                    partitions: p,
                    ..CensusConfig::default()
                };
                let r = orbit_count(m(3), 8, SymmetryGroup::ReversalUnits, &cfg).unwrap();
                (r.balanced_count, r.orbit_count)
            })
            .collect();
        assert!(counts.windows(2).all(|w| w[0] == w[1]), "{counts:?}");
    }

    #[test]
    fn budget_guard() {
        let cfg = CensusConfig {
            budget: 1000,
            ..CensusConfig::default()
        };
        assert_eq!(
            count_balanced(m(4), 7, &cfg),
            Err(CensusError::BudgetExceeded {
                m: 4,
                n: 7,
                budget: 1000
            })
        );
        assert!(sample_balanced(m(4), 7, 1, &cfg).is_err());
    }

    #[test]
    fn group_descriptions() {
        assert_eq!(SymmetryGroup::ReversalUnits.order(m(6)), 4);
        assert_eq!(SymmetryGroup::ReversalUnits.order(m(5)), 8);
        assert_eq!(SymmetryGroup::Units.order(m(7)), 6);
        assert_eq!(
            SymmetryGroup::ReversalUnits.describe(m(6)),
            "reversal x units of Z/6 (order 4)"
        );
    }
}
