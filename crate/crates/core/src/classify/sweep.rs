//! Exhaustive sweep over the quadratic part `u` for a fixed base pair.

use std::collections::VecDeque;

use super::base_pairs::BasePair;
use super::stabilizer::{random_automorphisms, schreier_fixers};
use super::tables::{affine_group_generators, BitSet, CoefficientSpace, IndexMap, PointMap};
use crate::error::{Error, Result};
use crate::f2core::BitVector;
use crate::rmpoly::{permute_xor_u64, AffineMap, RMPolynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepOptions {
    /// Number of `u` values examined.
    pub budget: usize,
    /// Examine `u` indices from the top down.
    pub descending: bool,
    pub seed: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { budget: 1 << 22, descending: false, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    /// One eight-variable polynomial per orbit of matching `u`.
    pub polynomials: Vec<RMPolynomial>,
    pub orbit_sizes: Vec<usize>,
    pub checked: usize,
    pub matched: usize,
    pub exhaustive: bool,
}

/// `x7·g + x8·h + x7·x8·u` on eight variables.
pub fn assemble(g: u64, h: u64, u: u64) -> RMPolynomial {
    RMPolynomial::from_truth(BitVector::from_words(256, vec![0, g, h, g ^ h ^ u]), 8).expect("256 points")
}

fn periods(t: u64) -> Vec<usize> {
    let mut basis: Vec<usize> = Vec::new();
    let mut reduced: Vec<usize> = Vec::new();
    for a in 1..64usize {
        if permute_xor_u64(t, a, 6) == t {
            let r = reduced.iter().fold(a, |r, &b| r.min(r ^ b));
            if r != 0 {
                reduced.push(r);
                reduced.sort_unstable_by(|x, y| y.cmp(x));
                basis.push(a);
            }
        }
    }
    basis
}

/// Affine maps of the six base variables fixing both `g` and `h`.
fn pair_stabilizer(g: &RMPolynomial, h: &RMPolynomial, seed: u64) -> Vec<AffineMap> {
    if h.is_zero() {
        return affine_group_generators(6);
    }
    let gens = random_automorphisms(h, 16, seed);
    if g.is_zero() {
        gens
    } else {
        schreier_fixers(g, &gens, 32)
    }
}

/// Maps on `u` that preserve the pair and the weights of all three slices.
fn u_generators(space: &CoefficientSpace, g: &RMPolynomial, h: &RMPolynomial, seed: u64) -> Vec<IndexMap> {
    let (gt, ht) = (g.table_u64(), h.table_u64());
    let mut out: Vec<IndexMap> = pair_stabilizer(g, h, seed)
        .iter()
        .map(|a| {
            let pm = PointMap::from_affine(a);
            space.affine_map(|t| pm.apply(t))
        })
        .collect();
    for a in periods(gt) {
        let dh = ht ^ permute_xor_u64(ht, a, 6);
        out.push(space.affine_map(|t| permute_xor_u64(t, a, 6) ^ dh));
    }
    for b in periods(ht) {
        let dg = gt ^ permute_xor_u64(gt, b, 6);
        out.push(space.affine_map(|t| permute_xor_u64(t, b, 6) ^ dg));
    }
    out
}

fn match_words(space: &CoefficientSpace, gt: u64, ht: u64, targets: &[usize], checked: impl Fn(usize) -> bool + Sync) -> Vec<u64> {
    let (wg, wh) = (gt.count_ones() as usize, ht.count_ones() as usize);
    let gh = gt ^ ht;
    let word = |w: usize| -> u64 {
        let mut bits = 0u64;
        for b in 0..64 {
            let idx = w * 64 + b;
            if !checked(idx) {
                continue;
            }
            let third = (gh ^ space.table(idx)).count_ones() as usize;
            if third >= wh && targets.contains(&(wg + wh + third)) {
                bits |= 1 << b;
            }
        }
        bits
    };
    let n = space.size() / 64;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(word).collect()
    }
    #[cfg(not(feature = "parallel"))]
    (0..n).map(word).collect()
}

/// Every `u` of degree at most 2 with `|g| + |h| + |g+h+u|` in `targets`
/// and `|h| ≤ |g+h+u|`, one per orbit of the pair's symmetries.
pub fn u_sweep(pair: &BasePair, targets: &[usize], opts: &SweepOptions) -> Result<SweepResult> {
    if pair.g.m() != 6 || pair.h.m() != 6 {
        return Err(Error::OutOfRange("base polynomials must have six variables".into()));
    }
    if pair.g.degree() > 3 || pair.h.degree() > 3 || pair.g.weight() > pair.h.weight() {
        return Err(Error::OutOfRange("base pair needs degree ≤ 3 and |g| ≤ |h|".into()));
    }
    let space = CoefficientSpace::new(6, 2);
    let size = space.size();
    let budget = opts.budget.min(size);
    let descending = opts.descending;
    let checked = move |idx: usize| if descending { idx >= size - budget } else { idx < budget };
    let (gt, ht) = (pair.g.table_u64(), pair.h.table_u64());
    let mut matches = BitSet::new(size);
    matches.words_mut().copy_from_slice(&match_words(&space, gt, ht, targets, checked));
    let matched = matches.count();
    let gens = u_generators(&space, &pair.g, &pair.h, opts.seed);
    let mut visited = BitSet::new(size);
    let mut polynomials = Vec::new();
    let mut orbit_sizes = Vec::new();
    let order: Vec<usize> = if descending { matches.iter_ones().rev().collect() } else { matches.iter_ones().collect() };
    for start in order {
        if !visited.insert(start) {
            continue;
        }
        let mut size = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for g in &gens {
                let v = g.apply(u);
                if visited.insert(v) {
                    debug_assert!(matches.get(v) || budget < space.size());
                    size += 1;
                    queue.push_back(v);
                }
            }
        }
        polynomials.push(assemble(gt, ht, space.table(start)));
        orbit_sizes.push(size);
    }
    Ok(SweepResult { polynomials, orbit_sizes, checked: budget, matched, exhaustive: budget == size })
}
