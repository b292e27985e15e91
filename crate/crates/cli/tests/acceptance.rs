//! Acceptance gate: one PASS/FAIL line per criterion.

use std::collections::BTreeMap;

use clap::Parser;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use triortho_cli::{run, Cli};
use triortho_core::classify::{classify_with, describe_class, ClassRow, ClassifyOptions, RM36_REPRESENTATIVES};
use triortho_core::distance::{d_max_table, z_distance};
use triortho_core::level3::{brute_force_divisible, check_conditions_0_to_3, is_level3_divisible};
use triortho_core::magic::{
    decompose_form, eval_decomposition, run_shots, t_phase_from_set, Convention, ProtocolConfig, QuadraticFormZ4, Variant,
};
use triortho_core::rmpoly::are_affine_equivalent;
use triortho_core::triortho::{
    even_descendant, indicator_to_generator, odd_descendant, rank_g0_check, unitalize, DescendantCode, Parity,
    TriorthogonalSpace,
};
use triortho_core::RMPolynomial;

const GEN35: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/gen35.txt");
const CAP: usize = 5;

const FIVE: [(&str, usize); 5] = [
    ("1", 4),
    ("x1*x2 + x3*x4", 6),
    ("x1*x2 + x3*x4 + x5*x6", 6),
    ("x1*x2*x3 + x4*x5*x6", 7),
    ("x1*x2*x3*x4 + x5*x6*x7*x8", 8),
];

type Verdict = Result<String, String>;

/// Outcome of one criterion plus the text it produced, for the
/// determinism comparison.
struct Outcome {
    verdict: Verdict,
    artifact: String,
}

fn cli(args: &[&str]) -> (String, u8) {
    let parsed = Cli::try_parse_from(std::iter::once("triortho").chain(args.iter().copied())).expect("valid arguments");
    let out = run(&parsed).expect("command succeeds");
    (out.stdout, out.status)
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg.into()) }
}

fn five_spaces() -> Vec<TriorthogonalSpace> {
    FIVE.iter().map(|(p, m)| indicator_to_generator(&RMPolynomial::parse(p, Some(*m)).unwrap()).unwrap()).collect()
}

fn gen35() -> DescendantCode {
    DescendantCode::parse(&std::fs::read_to_string(GEN35).unwrap()).unwrap()
}

fn rm36_table() -> Outcome {
    let (stdout, status) = cli(&["classify-rm36", "--max-weight", "18"]);
    let check = || -> Result<String, String> {
        ensure(status == 0, format!("exit status {status}"))?;
        let rows: Vec<Value> = serde_json::from_str(&stdout).map_err(|e| e.to_string())?;
        let mut hist = BTreeMap::new();
        let mut reps = Vec::new();
        for r in &rows {
            let w = r["weight"].as_u64().unwrap() as usize;
            *hist.entry(w).or_insert(0) += 1;
            reps.push((w, RMPolynomial::parse(r["representative"].as_str().unwrap(), Some(6)).unwrap()));
        }
        ensure(hist == BTreeMap::from([(8, 1), (12, 1), (14, 1), (16, 5), (18, 2)]), format!("histogram {hist:?}"))?;
        for (w, s) in RM36_REPRESENTATIVES {
            let listed = RMPolynomial::parse(s, Some(6)).unwrap();
            let hits = reps.iter().filter(|(rw, p)| *rw == w && are_affine_equivalent(p, &listed, 4_000_000) == Some(true)).count();
            ensure(hits == 1, format!("{s} matched {hits} classes"))?;
        }
        Ok(format!("{} classes, histogram {hist:?}", rows.len()))
    };
    Outcome { verdict: check(), artifact: stdout }
}

fn small_classification() -> Outcome {
    let (stdout, status) = cli(&["classify", "--max-c", "30"]);
    let check = || -> Result<String, String> {
        ensure(status == 0, format!("exit status {status}"))?;
        let v: Value = serde_json::from_str(&stdout).map_err(|e| e.to_string())?;
        ensure(v["complete"] == Value::Bool(true), "incomplete search")?;
        let rows = v["rows"].as_array().unwrap();
        let weights: Vec<u64> = rows.iter().map(|r| r["weight"].as_u64().unwrap()).collect();
        ensure(weights == [16, 24, 28, 28, 30], format!("weights {weights:?}"))?;
        for (p, m) in FIVE {
            let want = RMPolynomial::parse(p, Some(m)).unwrap();
            let hit = rows.iter().any(|r| {
                r["m"].as_u64() == Some(m as u64)
                    && are_affine_equivalent(&RMPolynomial::parse(r["polynomial"].as_str().unwrap(), Some(m)).unwrap(), &want, 4_000_000)
                        == Some(true)
            });
            ensure(hit, format!("{p} missing"))?;
        }
        Ok(format!("weights {weights:?}"))
    };
    Outcome { verdict: check(), artifact: stdout }
}

fn named_codes() -> Outcome {
    let mut artifact = String::new();
    let check = |artifact: &mut String| -> Result<String, String> {
        let rm14 = &five_spaces()[0];
        let c15 = even_descendant(rm14, &[0]).map_err(|e| e.to_string())?;
        let c14 = even_descendant(rm14, &[0, 1]).map_err(|e| e.to_string())?;
        let d15 = z_distance(&c15, CAP).map_err(|e| e.to_string())?;
        let d14 = z_distance(&c14, CAP).map_err(|e| e.to_string())?;
        ensure((c15.n(), c15.k()) == (15, 1) && d15.value == Some(3) && d15.exact, format!("[[15,1,?]] gave {d15:?}"))?;
        ensure((c14.n(), c14.k()) == (14, 2) && d14.value == Some(2) && d14.exact, format!("[[14,2,?]] gave {d14:?}"))?;
        let (stdout, status) = cli(&["check", "--matrix", GEN35]);
        artifact.push_str(&stdout);
        let v: Value = serde_json::from_str(&stdout).unwrap();
        ensure(status == 0 && v["triorthogonal"] == Value::Bool(true), "gen35 not triorthogonal")?;
        ensure(v["n"] == 35 && v["k"] == 3, format!("gen35 reported {v}"))?;
        let (stdout, _) = cli(&["distance", "--code", GEN35, "--cap", "5"]);
        artifact.push_str(&stdout);
        let d: Value = serde_json::from_str(&stdout).unwrap();
        ensure(d["d"] == 3 && d["exact"] == Value::Bool(true), format!("gen35 distance {d}"))?;
        artifact.push_str(&format!("{d15:?}{d14:?}"));
        Ok("[[15,1,3]], [[14,2,2]], gen35 [[35,3,3]]".into())
    };
    let verdict = check(&mut artifact);
    Outcome { verdict, artifact }
}

fn dmax_bound(parent35: &TriorthogonalSpace) -> Outcome {
    let mut artifact = String::new();
    let mut check = || -> Result<String, String> {
        ensure(parent35.c() == 38, format!("gen35 parent has {} columns", parent35.c()))?;
        let mut spaces = five_spaces();
        spaces.push(parent35.clone());
        let mut best = 0;
        for s in &spaces {
            for parity in [Parity::Even, Parity::Odd] {
                let table = d_max_table(s, parity, CAP).map_err(|e| e.to_string())?;
                artifact.push_str(&format!("{parity:?} {table:?}\n"));
                for (k, d) in table {
                    let v = d.value.ok_or(format!("k={k} above cap"))?;
                    ensure(d.exact && v <= 3, format!("c={} k={k} d={v}", s.c()))?;
                    best = best.max(v);
                }
            }
        }
        Ok(format!("max d over 6 spaces, both parities, all k = {best}"))
    };
    Outcome { verdict: check(), artifact }
}

fn divisibility(corpus: &[TriorthogonalSpace]) -> Outcome {
    let mut artifact = String::new();
    let mut check = || -> Result<String, String> {
        let mut compared = 0;
        for s in corpus {
            let fast = is_level3_divisible(s);
            artifact.push_str(&format!("{} {} {:?}\n", s.c(), fast.divisible, fast.witness));
            if let Some(t) = &fast.witness {
                ensure(check_conditions_0_to_3(s.gen(), t), format!("witness fails on c={}", s.c()))?;
            }
            if s.c() - s.r() <= 20 {
                let slow = brute_force_divisible(s).map_err(|e| e.to_string())?;
                ensure(slow.divisible == fast.divisible, format!("verdicts differ on c={}", s.c()))?;
                compared += 1;
            }
        }
        let code3 = &five_spaces()[2];
        ensure(!is_level3_divisible(code3).divisible, "code 3 reported divisible")?;
        Ok(format!("{compared} spaces cross-checked, {} witnesses verified", corpus.len()))
    };
    Outcome { verdict: check(), artifact }
}

fn random_puncture(s: &TriorthogonalSpace, size: usize, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    (0..60).find_map(|_| {
        let p: Vec<usize> = sample(rng, s.c(), size).into_vec();
        s.restriction_rank(&p).ok().filter(|&r| r == size).map(|_| p)
    })
}

fn properties(rows: &[ClassRow], five: &[TriorthogonalSpace]) -> Outcome {
    let mut artifact = String::new();
    let mut check = || -> Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut codes = 0;
        for s in five {
            for k in 1..=s.r() {
                for trial in 0..6 {
                    let odd = trial % 2 == 1;
                    let size = if odd { k + 1 } else { k };
                    if 2 * size >= s.c() + usize::from(odd) {
                        continue;
                    }
                    let Some(p) = random_puncture(s, size, &mut rng) else { continue };
                    let code = if odd { odd_descendant(s, &p, p[0]) } else { even_descendant(s, &p) }.map_err(|e| e.to_string())?;
                    let d = z_distance(&code, CAP).map_err(|e| e.to_string())?;
                    artifact.push_str(&format!("{p:?} {odd} {:?}\n", d.value));
                    codes += 1;
                    if d.value.is_none_or(|v| v >= 2) {
                        ensure(code.n() >= 2 * code.k(), format!("n={} < 2k={}", code.n(), 2 * code.k()))?;
                        ensure(rank_g0_check(&code).map_err(|e| e.to_string())?, format!("rank(G0) bound fails for {p:?}"))?;
                    }
                }
            }
        }
        for row in rows {
            for t in [&row.dmax_even, &row.dmax_odd] {
                let vals: Vec<Option<usize>> = t.values().copied().collect();
                ensure(vals.windows(2).all(|w| w[1] <= w[0]), format!("{} not monotone: {vals:?}", row.polynomial))?;
            }
            for (k, d) in &row.dmax_odd {
                ensure(row.dmax_even.get(&(k + 1)) == Some(d), format!("{}: odd({k}) != even({})", row.polynomial, k + 1))?;
            }
        }
        Ok(format!("{codes} random descendants, {} class tables", rows.len()))
    };
    Outcome { verdict: check(), artifact }
}

fn appendix(corpus_g: &[DescendantCode]) -> Outcome {
    let mut artifact = String::new();
    let mut check = || -> Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for i in 0..1000 {
            let m = 1 + i % 10;
            let mut mat = vec![vec![0u8; m]; m];
            for a in 0..m {
                mat[a][a] = rng.gen_range(0..4);
                for b in a + 1..m {
                    let v = rng.gen_range(0..2);
                    mat[a][b] = v;
                    mat[b][a] = v;
                }
            }
            let f = QuadraticFormZ4::new(mat).map_err(|e| e.to_string())?;
            let (w, d) = decompose_form(&f);
            let r0 = f.mod2().rank();
            ensure(w.nrows() == r0 || w.nrows() == r0 + 1, format!("rows(W)={} r0={r0}", w.nrows()))?;
            ensure((0..1usize << m).all(|z| eval_decomposition(&w, &d, z) == f.eval_mask(z)), format!("form {i} mismatch"))?;
        }
        for g in corpus_g {
            let phase = t_phase_from_set(&g.stacked().transpose());
            ensure(phase.cubic.is_empty(), format!("cubic terms on n={}", g.n()))?;
        }
        let code15 = even_descendant(&five_spaces()[0], &[0]).map_err(|e| e.to_string())?;
        let delayed = ProtocolConfig { variant: Variant::Delayed, noise: 0.0, convention: Convention::Minus };
        let standard = ProtocolConfig { variant: Variant::Standard, ..delayed };
        let a = run_shots(&code15, &delayed, 10_000, 5).map_err(|e| e.to_string())?;
        let b = run_shots(&code15, &standard, 10_000, 6).map_err(|e| e.to_string())?;
        artifact.push_str(&format!("{a:?}\n{b:?}\n"));
        for s in [&a, &b] {
            ensure(s.min_fidelity_on_pass.is_some_and(|f| (f - 1.0).abs() < 1e-9), format!("fidelity {:?}", s.min_fidelity_on_pass))?;
        }
        ensure(a.max_s_injections <= 6, format!("max S injections {}", a.max_s_injections))?;
        ensure((b.mean_corrections - 7.5).abs() <= 0.15, format!("mean corrections {}", b.mean_corrections))?;
        Ok(format!("mean corrections {:.3}, max S injections {}", b.mean_corrections, a.max_s_injections))
    };
    Outcome { verdict: check(), artifact }
}

/// Runs criteria 1 to 7 once.
fn evaluate() -> Vec<(u8, &'static str, Outcome)> {
    let report = classify_with(&ClassifyOptions::new(38)).expect("classification runs");
    let rows: Vec<ClassRow> = report.classes.iter().map(|c| describe_class(c, CAP).expect("describable")).collect();
    let five = five_spaces();
    let mut corpus: Vec<TriorthogonalSpace> = five.clone();
    corpus.extend(report.classes.iter().filter(|c| c.weight > 30).map(|c| indicator_to_generator(&c.representative).unwrap()));
    let g35 = gen35();
    let parent35 = unitalize(&g35).expect("unital parent");
    let mut corpus_g = vec![g35.clone()];
    for s in &five {
        corpus_g.push(even_descendant(s, &[0]).unwrap());
    }
    let mut props = properties(&rows, &five);
    props.artifact.push_str(&serde_json::to_string(&rows).unwrap());
    if !report.exhaustive {
        props.verdict = Err("sweep over cases 1-9 was not exhaustive".into());
    }
    vec![
        (1, "RM(3,6) classes of weight <= 18", rm36_table()),
        (2, "classification for c <= 30", small_classification()),
        (3, "named codes and distances", named_codes()),
        (4, "d_max <= 3 with cap 5", dmax_bound(&parent35)),
        (5, "level-3 divisibility", divisibility(&corpus)),
        (6, "property suite", props),
        (7, "quadratic forms, T phases, protocol simulation", appendix(&corpus_g)),
    ]
}

#[test]
fn acceptance() {
    let first = evaluate();
    let second = evaluate();
    let mut failures = 0;
    for (id, name, outcome) in &first {
        match &outcome.verdict {
            Ok(detail) => println!("PASS criterion {id}: {name} ({detail})"),
            Err(why) => {
                failures += 1;
                println!("FAIL criterion {id}: {name} ({why})");
            }
        }
    }
    let identical = first.iter().zip(&second).all(|(a, b)| a.2.artifact == b.2.artifact && a.2.verdict == b.2.verdict);
    if identical {
        println!("PASS criterion 8: determinism (two runs byte-identical)");
    } else {
        failures += 1;
        println!("FAIL criterion 8: determinism (runs differ)");
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
