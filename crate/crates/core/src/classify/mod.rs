//! Classification of unital triorthogonal spaces and low-weight cubics.

mod base_pairs;
mod book;
mod kasami;
mod rm36;
mod stabilizer;
mod sweep;
mod tables;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

pub use base_pairs::{case_weights, enumerate_base_pairs, rm36_representative, BasePair, RM36_REPRESENTATIVES};
pub use book::{ClassBook, EquivalenceClass};
pub use kasami::kasami_tokura_classes;
pub use rm36::classify_rm36;
pub use stabilizer::{affine_class, random_automorphisms};
pub use sweep::{assemble, u_sweep, SweepOptions, SweepResult};

use crate::distance::{d_max_table, DistanceResult};
use crate::error::{Error, Result};
use crate::level3::is_level3_divisible;
use crate::rmpoly::RMPolynomial;
use crate::triortho::{indicator_to_generator, Parity};

/// Largest space size handled by the sweep.
pub const MAX_C: usize = 38;

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub max_c: usize,
    /// Include the `(12, x1(x2x3 + x4x5))` base pairs.
    pub heavy: bool,
    pub sweep: SweepOptions,
    /// Progress file for resuming an interrupted run.
    pub checkpoint: Option<PathBuf>,
}

impl ClassifyOptions {
    pub fn new(max_c: usize) -> Self {
        Self { max_c, heavy: false, sweep: SweepOptions::default(), checkpoint: None }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    pub classes: Vec<EquivalenceClass>,
    /// False when a sweep was cut short by its budget.
    pub exhaustive: bool,
    pub pairs_swept: usize,
}

#[derive(Serialize, Deserialize, Default)]
struct Checkpoint {
    max_c: usize,
    heavy: bool,
    pairs_done: usize,
    exhaustive: bool,
    found: Vec<(usize, String)>,
}

impl Checkpoint {
    fn load(path: &PathBuf, opts: &ClassifyOptions) -> Checkpoint {
        std::fs::read_to_string(path)
            .ok()
            .and_then(|s| serde_json::from_str::<Checkpoint>(&s).ok())
            .filter(|c| c.max_c == opts.max_c && c.heavy == opts.heavy)
            .unwrap_or(Checkpoint { max_c: opts.max_c, heavy: opts.heavy, exhaustive: true, ..Default::default() })
    }

    fn save(&self, path: &PathBuf) -> Result<()> {
        let io = |e: std::io::Error| Error::OutOfRange(format!("checkpoint {}: {e}", path.display()));
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, serde_json::to_string(self).expect("serializable")).map_err(io)?;
        std::fs::rename(&tmp, path).map_err(io)
    }
}

/// A space found by the sweep, reduced to its essential variables, if it
/// is a unital triorthogonal space.
fn as_space(p: &RMPolynomial, max_c: usize) -> Option<RMPolynomial> {
    let f = p.strip_linear_factors().ok()?;
    (f.m() >= 4 && f.degree() + 4 <= f.m() && f.weight() <= max_c && indicator_to_generator(&f).is_ok()).then_some(f)
}

/// Every unital triorthogonal space with at most `max_c ≤ 38` columns,
/// one per affine class of its indicator polynomial.
pub fn classify_unital_spaces(max_c: usize, heavy: bool) -> Result<Vec<EquivalenceClass>> {
    let mut opts = ClassifyOptions::new(max_c);
    opts.heavy = heavy;
    Ok(classify_with(&opts)?.classes)
}

pub fn classify_with(opts: &ClassifyOptions) -> Result<ClassifyReport> {
    let max_c = opts.max_c;
    if max_c > MAX_C {
        return Err(Error::OutOfRange(format!("max_c {max_c} exceeds {MAX_C}")));
    }
    let mut book = ClassBook::default();
    for p in kasami_tokura_classes(max_c) {
        book.insert(p, 1);
    }
    if max_c < 32 {
        return Ok(ClassifyReport { classes: book.finish(), exhaustive: true, pairs_swept: 0 });
    }
    book.insert(RMPolynomial::one(5), 1);
    let mut state = match &opts.checkpoint {
        Some(path) => Checkpoint::load(path, opts),
        None => Checkpoint { max_c, heavy: opts.heavy, exhaustive: true, ..Default::default() },
    };
    for (m, s) in &state.found {
        book.insert(RMPolynomial::parse(s, Some(*m))?, 1);
    }
    let last_case = if opts.heavy { 10 } else { 9 };
    let mut pair_no = 0;
    for case in 1..=last_case {
        let (wg, wh) = case_weights(case)?;
        let targets: Vec<usize> = (32..=max_c).step_by(2).filter(|&t| t >= wg + 2 * wh).collect();
        if targets.is_empty() {
            continue;
        }
        for pair in enumerate_base_pairs(case)? {
            pair_no += 1;
            if pair_no <= state.pairs_done {
                continue;
            }
            let res = u_sweep(&pair, &targets, &opts.sweep)?;
            state.exhaustive &= res.exhaustive;
            for (p, size) in res.polynomials.iter().zip(&res.orbit_sizes) {
                if let Some(f) = as_space(p, max_c) {
                    state.found.push((f.m(), f.to_string()));
                    book.insert(f, *size);
                }
            }
            state.pairs_done = pair_no;
            if let Some(path) = &opts.checkpoint {
                state.save(path)?;
            }
        }
    }
    Ok(ClassifyReport { classes: book.finish(), exhaustive: state.exhaustive, pairs_swept: pair_no })
}

/// Summary of one class: sizes, divisibility and best distances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassRow {
    pub polynomial: String,
    pub m: usize,
    /// Number of columns `c`.
    pub weight: usize,
    pub r: usize,
    pub unital: bool,
    pub divisible_level3: bool,
    /// Best distance per `k`; `None` above the cap.
    pub dmax_even: BTreeMap<usize, Option<usize>>,
    pub dmax_odd: BTreeMap<usize, Option<usize>>,
    pub unresolved: bool,
}

fn values(table: BTreeMap<usize, DistanceResult>) -> BTreeMap<usize, Option<usize>> {
    table.into_iter().map(|(k, d)| (k, d.value)).collect()
}

pub fn describe_class(class: &EquivalenceClass, cap: usize) -> Result<ClassRow> {
    let s = indicator_to_generator(&class.representative)?;
    Ok(ClassRow {
        polynomial: class.representative.to_string(),
        m: class.m,
        weight: class.weight,
        r: s.r(),
        unital: s.is_unital(),
        divisible_level3: is_level3_divisible(&s).divisible,
        dmax_even: values(d_max_table(&s, Parity::Even, cap)?),
        dmax_odd: values(d_max_table(&s, Parity::Odd, cap)?),
        unresolved: class.unresolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_classes_to_30() {
        let classes = classify_unital_spaces(30, false).unwrap();
        let w: Vec<usize> = classes.iter().map(|c| c.weight).collect();
        assert_eq!(w, vec![16, 24, 28, 28, 30]);
    }

    #[test]
    fn rejects_large_c() {
        assert!(matches!(classify_unital_spaces(40, false), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn rows_for_small_classes() {
        let classes = classify_unital_spaces(30, false).unwrap();
        let rows: Vec<ClassRow> = classes.iter().map(|c| describe_class(c, 5).unwrap()).collect();
        assert_eq!(rows[0].r, 5);
        assert!(rows[0].divisible_level3);
        assert!(rows.iter().all(|r| r.unital && r.r == r.m + 1));
        let d1: Vec<Option<usize>> = rows.iter().map(|r| r.dmax_even[&1]).collect();
        assert_eq!(d1, vec![Some(3); 5]);
    }

    #[test]
    fn sweep_to_32_adds_flat_five() {
        let report = classify_with(&ClassifyOptions::new(32)).unwrap();
        assert!(report.exhaustive);
        let at32: Vec<&EquivalenceClass> = report.classes.iter().filter(|c| c.weight == 32).collect();
        assert!(at32.iter().any(|c| c.m == 5 && c.representative.to_string() == "1"));
        assert!(at32.iter().all(|c| c.representative.degree() + 4 <= c.m));
    }
}
