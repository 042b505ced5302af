//! Lifts of a sequence over `Z/m` to `Z/2m` whose Steinhaus triangles are
//! strongly balanced, and the generating function of their counts.
//!
//! Strong balance over `Z/2m` only constrains prefix lengths in one class
//! modulo the checkpoint stride `w = 2·(2m)`. Each admissible class is an
//! independent chain of checkpoints `c, c + w, c + 2w, ...`; the frontier of
//! a chain is the set of lifts that passed every checkpoint so far, and
//! `a_n` is its size at checkpoint `n`.
//!
//! Going from one checkpoint to the next appends `len` fresh symbols, each
//! with two possible lifts. Writing a lifted cell as `r + m·b` with
//! `r ∈ Z/m` fixed by the source row, the top bit `b` of every new cell is
//! an affine function over GF(2) of the `len` fresh lift bits: carries out
//! of `Z/m` depend only on the source. The band is balanced iff every fiber
//! `{r, r + m}` splits evenly, i.e. iff the Walsh-Hadamard transform of the
//! signed mask histogram of each fiber vanishes at the chosen bit vector.
//! One transform per fiber screens all `2^len` extensions of a candidate at
//! once.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::residue::{ModSequence, Modulus, Sequence, SequenceError};
use crate::triangle::{admissible_length, extend_band, is_balanced, EasternState};

/// Widest checkpoint step the spectral filter handles (`2^20` histogram
/// slots per fiber).
pub const MAX_STEP_BITS: usize = 20;

/// Largest length the brute-force oracle accepts.
pub const MAX_BRUTE_FORCE_LENGTH: usize = 24;

pub const DEFAULT_ENUMERATION_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LiftError {
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error("checkpoint stride {stride} exceeds the supported {MAX_STEP_BITS} bits")]
    StrideTooWide { stride: usize },
    #[error("brute force over 2^{n} lifts exceeds the limit of length {MAX_BRUTE_FORCE_LENGTH}")]
    TooLong { n: usize },
    #[error("frontier of {size} lifts at length {length} exceeds the cap {cap}")]
    CapExceeded {
        size: usize,
        length: usize,
        cap: usize,
    },
    #[error("length {requested} exceeds the finite source of length {available}")]
    BeyondSource { requested: usize, available: usize },
}

/// How a frontier is advanced between checkpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Walsh-Hadamard screening of all extensions at once.
    #[default]
    Spectral,
    /// Every extension through `extend_band`.
    Direct,
}

/// A surviving lift prefix and the eastern diagonal of its triangle.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LiftCandidate {
    pub entries: ModSequence,
    pub state: EasternState,
    /// Last checkpoint this lift passed.
    pub verified_length: usize,
}

impl LiftCandidate {
    fn root(target: Modulus) -> Self {
        LiftCandidate {
            entries: ModSequence::empty(target),
            state: EasternState::empty(target),
            verified_length: 0,
        }
    }
}

/// `c·t^{n0} / (1 - t^{stride})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Tail {
    pub n0: usize,
    pub stride: usize,
    pub c: u64,
}

/// Coefficients `a_n` of `G_S(t)` at every admissible `n` up to the
/// horizon; all other coefficients vanish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenFunction {
    pub coefficients: Vec<(usize, u64)>,
    pub horizon: usize,
    /// Checkpoint stride `w`.
    pub stride: usize,
    /// Conjectured rational tail, set only by [`detect_tail`].
    pub tail: Option<Tail>,
}

impl GenFunction {
    pub fn coefficient(&self, n: usize) -> u64 {
        self.coefficients
            .binary_search_by_key(&n, |&(e, _)| e)
            .map_or(0, |i| self.coefficients[i].1)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.coefficients.iter().copied().filter(|&(_, a)| a != 0)
    }

    /// Largest exponent with a nonzero coefficient.
    pub fn degree(&self) -> Option<usize> {
        self.nonzero().map(|(n, _)| n).last()
    }

    /// Human-readable series, e.g. `1 + 8t^8 + 34t^16`.
    pub fn series(&self) -> String {
        let mut terms: Vec<String> = self
            .nonzero()
            .filter(|&(n, _)| self.tail.is_none_or(|t| n < t.n0))
            .map(|(n, a)| match n {
                0 => a.to_string(),
                _ if a == 1 => format!("t^{n}"),
                _ => format!("{a}t^{n}"),
            })
            .collect();
        if let Some(t) = self.tail {
            terms.push(format!("{}t^{}/(1-t^{})", t.c, t.n0, t.stride));
        }
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }
}

/// JSON document for one generating-function computation.
#[derive(Debug, Clone, Serialize)]
pub struct LiftReport {
    pub sequence: String,
    pub modulus: u32,
    pub target: u32,
    pub coefficients: Vec<(usize, u64)>,
    pub tail: Option<Tail>,
}

impl LiftReport {
    pub fn new(name: &str, source: Modulus, g: &GenFunction) -> Self {
        LiftReport {
            sequence: name.to_string(),
            modulus: source.get(),
            target: source.get() * 2,
            coefficients: g.coefficients.clone(),
            tail: g.tail,
        }
    }
}

/// A lift search over one source sequence.
#[derive(Debug, Clone)]
pub struct LiftSearch<'a> {
    source: &'a Sequence,
    target: Modulus,
    method: Method,
}

impl<'a> LiftSearch<'a> {
    pub fn new(source: &'a Sequence) -> Result<Self, LiftError> {
        let target = source.modulus().doubled()?;
        let search = LiftSearch {
            source,
            target,
            method: Method::default(),
        };
        if search.stride() > MAX_STEP_BITS {
            return Err(LiftError::StrideTooWide {
                stride: search.stride(),
            });
        }
        Ok(search)
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn target(&self) -> Modulus {
        self.target
    }

    /// Checkpoint stride `2·(2m)`.
    pub fn stride(&self) -> usize {
        2 * self.target.as_usize()
    }

    /// Residue classes mod the stride holding admissible lengths.
    pub fn classes(&self) -> Vec<usize> {
        (0..self.stride())
            .filter(|&c| admissible_length(c, self.target))
            .collect()
    }

    /// Admissible classes congruent to the source's own checkpoint class
    /// `len(initial) mod 2m`. For the catalog families these are the
    /// lengths at which the source itself is strongly balanced: `8k` for
    /// `Q`, `8k + 7` for `R`, `16k` for `S`, `16k + 15` for `T`.
    pub fn family_classes(&self) -> Vec<usize> {
        let source_stride = 2 * self.source.modulus().as_usize();
        let own = self.source.initial_len() % source_stride;
        self.classes()
            .into_iter()
            .filter(|c| c % source_stride == own)
            .collect()
    }

    fn check_length(&self, n: usize) -> Result<(), LiftError> {
        match self.source.len() {
            Some(available) if n > available => Err(LiftError::BeyondSource {
                requested: n,
                available,
            }),
            _ => Ok(()),
        }
    }

    /// Advances every candidate to length `next`.
    pub fn advance(
        &self,
        frontier: &[LiftCandidate],
        next: usize,
    ) -> Result<Vec<LiftCandidate>, LiftError> {
        let Some(first) = frontier.first() else {
            return Ok(Vec::new());
        };
        let from = first.entries.len();
        debug_assert!(frontier.iter().all(|c| c.entries.len() == from));
        self.check_length(next)?;
        let fresh = self.source.prefix(next)?.entries()[from..].to_vec();
        if fresh.len() > MAX_STEP_BITS {
            return Err(LiftError::StrideTooWide {
                stride: fresh.len(),
            });
        }
        let m = self.source.modulus();
        let mut out: Vec<LiftCandidate> = match self.method {
            Method::Spectral => frontier
                .par_iter()
                .map_init(
                    || SpectralScratch::new(m, fresh.len()),
                    |scratch, cand| scratch.extend(cand, &fresh, self.target),
                )
                .flatten()
                .collect(),
            Method::Direct => frontier
                .par_iter()
                .flat_map_iter(|cand| direct_extend(cand, &fresh, m, self.target))
                .collect(),
        };
        for c in &mut out {
            c.verified_length = next;
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Frontier sizes at checkpoints `c, c + w, ...` up to `horizon`.
    fn chain_counts(
        &self,
        class: usize,
        horizon: usize,
        observer: &mut dyn FnMut(usize, u64),
    ) -> Result<Vec<(usize, u64)>, LiftError> {
        let mut frontier = vec![LiftCandidate::root(self.target)];
        let mut counts = Vec::new();
        let mut n = class;
        while n <= horizon {
            if !frontier.is_empty() {
                frontier = if n == 0 {
                    frontier
                } else {
                    self.advance(&frontier, n)?
                };
            }
            counts.push((n, frontier.len() as u64));
            observer(n, frontier.len() as u64);
            n += self.stride();
        }
        Ok(counts)
    }

    /// `a_n` at every admissible `n <= horizon`.
    pub fn count(&self, horizon: usize) -> Result<GenFunction, LiftError> {
        self.count_observed(horizon, &mut |_, _| {})
    }

    /// As [`LiftSearch::count`], reporting each checkpoint as it completes.
    pub fn count_observed(
        &self,
        horizon: usize,
        observer: &mut dyn FnMut(usize, u64),
    ) -> Result<GenFunction, LiftError> {
        self.count_classes(horizon, &self.classes(), observer)
    }

    /// Coefficients restricted to the given checkpoint classes.
    pub fn count_classes(
        &self,
        horizon: usize,
        classes: &[usize],
        observer: &mut dyn FnMut(usize, u64),
    ) -> Result<GenFunction, LiftError> {
        let horizon = match self.source.len() {
            Some(len) => horizon.min(len),
            None => horizon,
        };
        let mut coefficients = Vec::new();
        for &class in classes {
            coefficients.extend(self.chain_counts(class, horizon, observer)?);
        }
        coefficients.sort_unstable();
        Ok(GenFunction {
            coefficients,
            horizon,
            stride: self.stride(),
            tail: None,
        })
    }

    /// Surviving lifts of `S[n]`, sorted lexicographically.
    pub fn enumerate(&self, n: usize, cap: usize) -> Result<Vec<ModSequence>, LiftError> {
        self.check_length(n)?;
        if !admissible_length(n, self.target) {
            return Ok(Vec::new());
        }
        let w = self.stride();
        let mut frontier = vec![LiftCandidate::root(self.target)];
        let mut len = n % w;
        loop {
            if len > 0 {
                frontier = self.advance(&frontier, len)?;
            }
            if frontier.len() > cap {
                return Err(LiftError::CapExceeded {
                    size: frontier.len(),
                    length: len,
                    cap,
                });
            }
            if len == n || frontier.is_empty() {
                break;
            }
            len += w;
        }
        Ok(frontier.into_iter().map(|c| c.entries).collect())
    }
}

/// Generating-function coefficients of `s` up to `horizon`.
pub fn count_lifts(s: &Sequence, horizon: usize) -> Result<GenFunction, LiftError> {
    LiftSearch::new(s)?.count(horizon)
}

/// Coefficients on the source's own checkpoint classes only (see
/// [`LiftSearch::family_classes`]).
pub fn count_family_lifts(s: &Sequence, horizon: usize) -> Result<GenFunction, LiftError> {
    let search = LiftSearch::new(s)?;
    search.count_classes(horizon, &search.family_classes(), &mut |_, _| {})
}

pub fn enumerate_lifts(s: &Sequence, n: usize, cap: usize) -> Result<Vec<ModSequence>, LiftError> {
    LiftSearch::new(s)?.enumerate(n, cap)
}

/// Counts strongly balanced lifts of `s[n]` by trying all `2^n` of them,
/// testing each checkpoint prefix with a plain row-by-row balance check.
pub fn brute_force_lifts(s: &Sequence, n: usize) -> Result<u64, LiftError> {
    if n > MAX_BRUTE_FORCE_LENGTH {
        return Err(LiftError::TooLong { n });
    }
    let base = s.prefix(n)?;
    let m = s.modulus();
    let target = m.doubled()?;
    let stride = 2 * target.as_usize();
    let checkpoints: Vec<usize> = (0..=n / stride).map(|t| n - stride * t).collect();
    let mut count = 0;
    let mut lift = vec![0u8; n];
    for bits in 0u32..(1u32 << n) {
        for (i, (l, &r)) in lift.iter_mut().zip(base.entries()).enumerate() {
            *l = r + m.get() as u8 * ((bits >> i) & 1) as u8;
        }
        let t = ModSequence::new(target, lift.clone()).expect("lift residues");
        if checkpoints
            .iter()
            .all(|&l| is_balanced(&t.prefix(l).expect("checkpoint within length")))
        {
            count += 1;
        }
    }
    Ok(count)
}

/// Marks a tail when some chain ends in at least `window` equal nonzero
/// coefficients; `n0` is where that constant run starts. When several
/// chains qualify, the one whose run starts first is reported.
pub fn detect_tail(g: &GenFunction, window: usize) -> GenFunction {
    let window = window.max(2);
    let mut out = g.clone();
    out.tail = None;
    if g.stride == 0 {
        return out;
    }
    let mut best: Option<Tail> = None;
    for class in 0..g.stride {
        let chain: Vec<(usize, u64)> = g
            .coefficients
            .iter()
            .copied()
            .filter(|&(n, _)| n % g.stride == class)
            .collect();
        let Some(&(_, last)) = chain.last() else {
            continue;
        };
        if last == 0 {
            continue;
        }
        let run = chain.iter().rev().take_while(|&&(_, a)| a == last).count();
        if run < window {
            continue;
        }
        let n0 = chain[chain.len() - run].0;
        if best.is_none_or(|b| n0 < b.n0) {
            best = Some(Tail {
                n0,
                stride: g.stride,
                c: last,
            });
        }
    }
    out.tail = best;
    out
}

fn direct_extend(
    cand: &LiftCandidate,
    fresh: &[u8],
    m: Modulus,
    target: Modulus,
) -> Vec<LiftCandidate> {
    let len = fresh.len();
    let mut out = Vec::new();
    let mut lifted = vec![0u8; len];
    for bits in 0u32..(1u32 << len) {
        for (i, (l, &r)) in lifted.iter_mut().zip(fresh).enumerate() {
            *l = r + m.get() as u8 * ((bits >> i) & 1) as u8;
        }
        let fresh_lift = ModSequence::new(target, lifted.clone()).expect("lift residues");
        let (band, state) = extend_band(&cand.state, &fresh_lift).expect("same modulus");
        if band.is_balanced() {
            out.push(LiftCandidate {
                entries: cand.entries.concat(&fresh_lift).expect("same modulus"),
                state,
                verified_length: cand.verified_length,
            });
        }
    }
    out
}

/// A cell of the band as a function of the fresh lift bits `e`: its value
/// is `res + m·(bit ⊕ parity(mask & e))`.
#[derive(Debug, Clone, Copy)]
struct Form {
    res: u8,
    bit: u8,
    mask: u32,
}

/// Reusable buffers for one worker.
struct SpectralScratch {
    m: usize,
    /// `m` signed histograms over masks, fiber `r` at `r << len`.
    hist: Vec<i32>,
    fiber: Vec<u64>,
    diagonal: Vec<Form>,
}

impl SpectralScratch {
    fn new(m: Modulus, len: usize) -> Self {
        SpectralScratch {
            m: m.as_usize(),
            hist: vec![0; m.as_usize() << len],
            fiber: vec![0; m.as_usize()],
            diagonal: Vec::new(),
        }
    }

    fn extend(
        &mut self,
        cand: &LiftCandidate,
        fresh: &[u8],
        target: Modulus,
    ) -> Vec<LiftCandidate> {
        let m = self.m as u8;
        let len = fresh.len();
        let size = 1usize << len;
        self.hist.fill(0);
        self.fiber.fill(0);
        self.diagonal.clear();
        self.diagonal
            .extend(cand.state.diagonal().iter().map(|&v| Form {
                res: v % m,
                bit: v / m,
                mask: 0,
            }));

        let hist = &mut self.hist;
        let fiber = &mut self.fiber;
        let mut visit = |f: Form| {
            let slot = ((f.res as usize) << len) | f.mask as usize;
            hist[slot] += 1 - 2 * f.bit as i32;
            fiber[f.res as usize] += 1;
        };
        for (p, &r) in fresh.iter().enumerate() {
            let mut carry = Form {
                res: r,
                bit: 0,
                mask: 1 << p,
            };
            visit(carry);
            for d in self.diagonal.iter_mut() {
                let sum = d.res + carry.res;
                let over = (sum >= m) as u8;
                let next = Form {
                    res: sum - over * m,
                    bit: d.bit ^ carry.bit ^ over,
                    mask: d.mask ^ carry.mask,
                };
                *d = carry;
                carry = next;
                visit(carry);
            }
            self.diagonal.push(carry);
        }

        if self.fiber.windows(2).any(|w| w[0] != w[1]) || !self.fiber[0].is_multiple_of(2) {
            return Vec::new();
        }
        for r in 0..self.m {
            walsh_hadamard(&mut self.hist[r << len..(r + 1) << len]);
        }
        let mut out = Vec::new();
        for e in 0..size {
            if (0..self.m).all(|r| self.hist[(r << len) | e] == 0) {
                out.push(self.materialize(cand, fresh, e as u32, target));
            }
        }
        out
    }

    fn materialize(
        &self,
        cand: &LiftCandidate,
        fresh: &[u8],
        e: u32,
        target: Modulus,
    ) -> LiftCandidate {
        let m = self.m as u8;
        let eval = |f: &Form| f.res + m * (f.bit ^ ((f.mask & e).count_ones() & 1) as u8);
        let mut entries = cand.entries.entries().to_vec();
        entries.extend(
            fresh
                .iter()
                .enumerate()
                .map(|(p, &r)| r + m * ((e >> p) & 1) as u8),
        );
        let diagonal = self.diagonal.iter().map(eval).collect();
        LiftCandidate {
            entries: ModSequence::new(target, entries).expect("lift residues"),
            state: EasternState::from_diagonal(target, diagonal).expect("lift residues"),
            verified_length: cand.verified_length,
        }
    }
}

/// In-place Walsh-Hadamard transform: `a[e] <- Σ_x a[x]·(-1)^{|x & e|}`.
fn walsh_hadamard(a: &mut [i32]) {
    let n = a.len();
    let mut h = 1;
    while h < n {
        for block in a.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*x, *y);
                *x = u + v;
                *y = u - v;
            }
        }
        h *= 2;
    }
}
