//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use steinhaus::blocks::{self, build_library, star, BlockKind};
use steinhaus::census::{
    count_balanced, orbit_count, sample_balanced, CensusConfig, SymmetryGroup,
};
use steinhaus::golden::{published_series, LIFTS_Z2_TO_Z4};
use steinhaus::lift::{count_lifts, enumerate_lifts};
use steinhaus::reproduce::{run_claim, Options};
use steinhaus::residue::{catalog_sequence, project, ModSequence, Modulus, Sequence, CATALOG};
use steinhaus::triangle::{
    admissible_length, build_triangle, extend_band, is_balanced, is_strongly_balanced,
    triangle_multiplicities,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn claim(id: &str) -> Outcome {
    let r = run_claim(id, &Options::default()).map_err(|e| e.to_string())?;
    if r.passed {
        Ok(format!("{} checks", r.checks.len()))
    } else {
        Err(r.render(false))
    }
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn m(v: u32) -> Modulus {
    Modulus::new(v).unwrap()
}

fn criterion_1() -> Outcome {
    let s1 = catalog_sequence("S1").unwrap();
    ensure(is_strongly_balanced(&s1.prefix(400)).unwrap(), "S1[400]")?;
    let t3 = catalog_sequence("T3").unwrap();
    ensure(is_strongly_balanced(&t3.prefix(407)).unwrap(), "T3[407]")?;
    claim("thm1")
}

fn criterion_2() -> Outcome {
    let r12 = catalog_sequence("R12").unwrap();
    ensure(is_strongly_balanced(&r12.prefix(803)).unwrap(), "R12[803]")?;
    claim("thm2")
}

fn criterion_3() -> Outcome {
    let lib = build_library();
    let a1 = lib.get("A1").unwrap().multiplicities();
    ensure(
        a1.counts() == [5, 10, 11, 10],
        format!("A1 = {:?}", a1.counts()),
    )?;
    let c = ["C1", "C2", "C3"].map(|n| lib.get(n).unwrap().multiplicities());
    for r in 0..4 {
        ensure(
            c.iter().map(|v| v.get(r)).sum::<u64>() == 48,
            "C1+C2+C3 != 48",
        )?;
    }
    claim("table1")
}

fn criterion_4() -> Outcome {
    let mut lib = build_library();
    let mut e0 = lib.get("E0").unwrap().clone();
    let last = e0.rows().len() - 1;
    let cell = &mut e0.rows_mut()[last][0];
    *cell = (*cell + 1) % 4;
    lib.replace("E0", e0).unwrap();
    ensure(
        !blocks::verify_edge_coincidences(&lib),
        "mutated E0 still passes",
    )?;
    claim("lemma1")
}

fn criterion_5() -> Outcome {
    for (k, v) in [(3, 41), (4, 57), (5, 73), (6, 89)] {
        ensure(blocks::band_case_value(k).unwrap() == v, format!("k = {k}"))?;
    }
    claim("band-cases")
}

fn criterion_6() -> Outcome {
    let q1 = published_series("Q1").unwrap();
    let printed = [1, 8, 34, 58, 84, 88, 86, 82, 60, 36, 34, 28, 16];
    for (i, a) in printed.iter().enumerate() {
        ensure(q1.coefficient(8 * i, 8) == *a, "Q1 golden data")?;
    }
    claim("thm3")
}

fn criterion_7() -> Outcome {
    claim("thm4")
}

fn criterion_8() -> Outcome {
    claim("oracle")
}

fn criterion_9() -> Outcome {
    let a = count_balanced(m(15), 5, &CensusConfig::default()).unwrap();
    let b = count_balanced(m(21), 6, &CensusConfig::default()).unwrap();
    ensure(
        a.total_sequences == 759_375 && b.total_sequences == 85_766_121,
        "candidate totals",
    )?;
    claim("counterexamples")
}

fn criterion_10() -> Outcome {
    let cfg = CensusConfig {
        partitions: 64,
        ..CensusConfig::default()
    };
    let r = orbit_count(m(6), 12, SymmetryGroup::ReversalUnits, &cfg).map_err(|e| e.to_string())?;
    ensure(
        r.balanced_count == 94_648 && r.orbit_count == Some(23_662),
        format!("{} / {:?}", r.balanced_count, r.orbit_count),
    )?;
    Ok(format!("94648 / 23662 under {}", r.group.unwrap()))
}

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn row(max_m: u32, max_len: usize) -> impl Strategy<Value = ModSequence> {
    (2..=max_m).prop_flat_map(move |mv| {
        prop::collection::vec(0..mv as u8, 0..=max_len)
            .prop_map(move |e| ModSequence::new(m(mv), e).unwrap())
    })
}

fn property(name: &str, result: Result<(), String>, done: &mut Vec<String>) -> Result<(), String> {
    result.map_err(|e| format!("{name}: {e}"))?;
    done.push(name.to_string());
    Ok(())
}

fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner(cases)
        .run(&strategy, test)
        .map_err(|e| e.to_string())
}

fn criterion_11() -> Outcome {
    let mut done = Vec::new();

    property(
        "pascal invariant",
        run(256, row(16, 40), |s| {
            let t = build_triangle(&s);
            prop_assert!(t.satisfies_pascal());
            prop_assert_eq!(t.cell_count(), s.len() * (s.len() + 1) / 2);
            for i in 2..=s.len() {
                for j in 1..=s.len() + 1 - i {
                    let above = s
                        .modulus()
                        .add(t.cell(i - 1, j).unwrap(), t.cell(i - 1, j + 1).unwrap());
                    prop_assert_eq!(t.cell(i, j), Some(above));
                }
            }
            Ok(())
        }),
        &mut done,
    )?;

    property(
        "band consistency",
        run(
            256,
            (2u32..=16).prop_flat_map(|mv| {
                (
                    prop::collection::vec(0..mv as u8, 0..30),
                    prop::collection::vec(0..mv as u8, 1..20),
                )
                    .prop_map(move |(a, b)| {
                        (
                            ModSequence::new(m(mv), a).unwrap(),
                            ModSequence::new(m(mv), b).unwrap(),
                        )
                    })
            }),
            |(s, f)| {
                let joined = s.concat(&f).unwrap();
                let (band, next) = extend_band(&build_triangle(&s).eastern_state(), &f).unwrap();
                let mut sum = triangle_multiplicities(&s);
                sum.add_assign(&band);
                prop_assert_eq!(sum, triangle_multiplicities(&joined));
                prop_assert_eq!(next, build_triangle(&joined).eastern_state());
                Ok(())
            },
        ),
        &mut done,
    )?;

    // Catalog prefixes are strongly balanced at their checkpoints.
    let catalog_prefixes =
        (0..CATALOG.len(), 0usize..300).prop_map(|(i, n)| CATALOG[i].sequence().prefix(n));
    let random_even = prop_oneof![Just(2u32), Just(4), Just(6)].prop_flat_map(|mv| {
        prop::collection::vec(0..mv as u8, 0..=30)
            .prop_map(move |e| ModSequence::new(m(mv), e).unwrap())
    });
    property(
        "strong-balance heredity",
        run(512, prop_oneof![catalog_prefixes, random_even], |s| {
            let w = 2 * s.modulus().as_usize();
            if s.len() >= w && is_strongly_balanced(&s).unwrap() {
                prop_assert!(is_strongly_balanced(&s.prefix(s.len() - w).unwrap()).unwrap());
            }
            Ok(())
        }),
        &mut done,
    )?;

    property(
        "balanced implies admissible",
        run(1024, row(6, 12), |s| {
            if is_balanced(&s) {
                prop_assert!(admissible_length(s.len(), s.modulus()));
            }
            Ok(())
        })
        .and_then(|_| {
            // Exhaustive over Z/3 and Z/4.
            for (mv, n_max) in [(3u32, 8usize), (4, 7)] {
                for n in 0..=n_max {
                    let total = (mv as u64).pow(n as u32);
                    let balanced = (0..total)
                        .filter(|code| {
                            let mut c = *code;
                            let e: Vec<u8> = (0..n)
                                .map(|_| {
                                    let d = (c % mv as u64) as u8;
                                    c /= mv as u64;
                                    d
                                })
                                .collect();
                            is_balanced(&ModSequence::new(m(mv), e).unwrap())
                        })
                        .count();
                    ensure(
                        balanced == 0 || admissible_length(n, m(mv)),
                        format!("m={mv} n={n}"),
                    )?;
                }
            }
            Ok(())
        }),
        &mut done,
    )?;

    property(
        "symmetry closure",
        run(
            256,
            (2u32..=12).prop_flat_map(|mv| {
                let units = m(mv).units();
                (
                    prop::collection::vec(0..mv as u8, 0..=20),
                    prop::sample::select(units),
                )
                    .prop_map(move |(e, u)| (ModSequence::new(m(mv), e).unwrap(), u))
            }),
            |(s, u)| {
                let t = build_triangle(&s);
                prop_assert_eq!(build_triangle(&s.reversed()), t.mirrored());
                let scaled = build_triangle(&s.scaled(u));
                let expected: Vec<u8> = t.cells().map(|c| s.modulus().mul(c, u)).collect();
                prop_assert_eq!(scaled.cells().collect::<Vec<_>>(), expected);
                prop_assert_eq!(is_balanced(&s.reversed()), is_balanced(&s));
                prop_assert_eq!(is_balanced(&s.scaled(u)), is_balanced(&s));
                Ok(())
            },
        )
        .and_then(|_| {
            for (mv, n) in [(4u32, 8usize), (3, 8), (5, 4)] {
                let rows = sample_balanced(m(mv), n, usize::MAX, &CensusConfig::default()).unwrap();
                let set: std::collections::BTreeSet<_> = rows.iter().cloned().collect();
                for r in &rows {
                    ensure(set.contains(&r.reversed()), format!("reverse of {r}"))?;
                    for u in m(mv).units() {
                        ensure(set.contains(&r.scaled(u)), format!("{u}*{r}"))?;
                    }
                }
            }
            Ok(())
        }),
        &mut done,
    )?;

    property(
        "coefficient parity",
        (|| {
            for s in LIFTS_Z2_TO_Z4.iter() {
                let seq: Sequence = catalog_sequence(s.name).unwrap().into();
                let g = count_lifts(&seq, 400).map_err(|e| e.to_string())?;
                ensure(g.nonzero().all(|(n, a)| n == 0 || a % 2 == 0), s.name)?;
            }
            Ok(())
        })()
        .and_then(|_| {
            run(32, prop::collection::vec(0u8..2, 0..=48), |e| {
                let seq: Sequence = ModSequence::new(m(2), e).unwrap().into();
                let g = count_lifts(&seq, 48).unwrap();
                prop_assert!(g.nonzero().all(|(n, a)| n == 0 || a % 2 == 0));
                Ok(())
            })
        }),
        &mut done,
    )?;

    property(
        "prefix closure of lifts",
        run(24, (0..CATALOG.len(), 1usize..=5), |(i, t)| {
            let entry = &CATALOG[i];
            let seq: Sequence = entry.sequence().into();
            let w = 4 * entry.modulus as usize;
            let n = seq.initial_len() % w + w * t;
            let longer = enumerate_lifts(&seq, n, 1_000_000).unwrap();
            let shorter = enumerate_lifts(&seq, n - w, 1_000_000).unwrap();
            let shorter: std::collections::BTreeSet<_> = shorter.into_iter().collect();
            for l in &longer {
                prop_assert!(
                    shorter.contains(&l.prefix(n - w).unwrap()),
                    "{} at {}",
                    entry.name,
                    n
                );
            }
            Ok(())
        })
        .and_then(|_| {
            // Lifts of length 7 and 8 over Z/4 are exactly the balanced
            // rows, grouped by their reduction mod 2.
            for n in [7, 8] {
                let rows = sample_balanced(m(4), n, usize::MAX, &CensusConfig::default()).unwrap();
                let mut groups: BTreeMap<ModSequence, Vec<ModSequence>> = BTreeMap::new();
                for r in rows {
                    groups
                        .entry(project(&r, m(2)).unwrap())
                        .or_default()
                        .push(r);
                }
                for (p, members) in &groups {
                    let lifts = enumerate_lifts(&p.clone().into(), n, 1_000_000).unwrap();
                    ensure(&lifts == members, format!("lifts of {p}"))?;
                }
            }
            Ok(())
        }),
        &mut done,
    )?;

    property(
        "partition independence",
        run(
            48,
            (2u32..=6, 0usize..=9, 1usize..=200)
                .prop_filter("admissible", |(mv, n, _)| admissible_length(*n, m(*mv))),
            |(mv, n, p)| {
                let one = orbit_count(
                    m(mv),
                    n,
                    SymmetryGroup::ReversalUnits,
                    &CensusConfig::default(),
                )
                .unwrap();
                let cfg = CensusConfig {
                    partitions: p,
                    ..CensusConfig::default()
                };
                let many = orbit_count(m(mv), n, SymmetryGroup::ReversalUnits, &cfg).unwrap();
                prop_assert_eq!(one.balanced_count, many.balanced_count);
                prop_assert_eq!(one.orbit_count, many.orbit_count);
                Ok(())
            },
        ),
        &mut done,
    )?;

    // Lozenges only see the lower edges of their factors.
    let lib = build_library();
    let (a, b) = (lib.get("B1").unwrap(), lib.get("B2").unwrap());
    let mut a2 = a.clone();
    a2.rows_mut()[0][0] = (a2.rows()[0][0] + 1) % 4;
    ensure(
        a.kind() == BlockKind::Lozenge && star(a, b).unwrap() == star(&a2, b).unwrap(),
        "star locality",
    )?;
    done.push("star locality".into());

    Ok(done.join(", "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("strong balance of S1, S2, T1..T4 mod 4", criterion_1),
        ("strong balance of Q1..Q4, R1..R12 mod 2", criterion_2),
        ("building-block multiplicity table", criterion_3),
        ("block tiling and edge coincidences", criterion_4),
        ("band case formulas", criterion_5),
        ("lift series Z/2 -> Z/4 with tails", criterion_6),
        ("lift polynomials Z/4 -> Z/8", criterion_7),
        ("lift search against brute force", criterion_8),
        ("no balanced rows of length 5 mod 15, 6 mod 21", criterion_9),
        ("census of length 12 mod 6", criterion_10),
        ("property suites", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS  {name} [{detail}] ({secs:.2}s)",
                i + 1
            ),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.2}s)\n{why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
