//! Affine classes of low-weight cubics on six variables.
//!
//! Words are searched in the form `x1·g + x2·h + x1·x2·u` with `g, h`
//! quadratic and `u` affine in `x3..x6`, then merged across flats.

use std::collections::VecDeque;

use super::book::{ClassBook, EquivalenceClass};
use super::tables::{affine_group_generators, BitSet, CoefficientSpace, IndexMap, PointMap};
use crate::error::{Error, Result};
use crate::rmpoly::{permute_xor_u64, RMPolynomial};

const SLICE: usize = 11;
const SPACE_BITS: usize = 2 * SLICE + 5;

struct Layout {
    quad: CoefficientSpace,
    lin: CoefficientSpace,
}

impl Layout {
    fn new() -> Self {
        Self { quad: CoefficientSpace::new(4, 2), lin: CoefficientSpace::new(4, 1) }
    }

    fn split(idx: usize) -> (usize, usize, usize) {
        (idx & 0x7ff, (idx >> SLICE) & 0x7ff, idx >> (2 * SLICE))
    }

    fn join(g: usize, h: usize, u: usize) -> usize {
        g | h << SLICE | u << (2 * SLICE)
    }

    fn slices(&self, idx: usize) -> (u64, u64, u64) {
        let (g, h, u) = Self::split(idx);
        (self.quad.table(g), self.quad.table(h), self.lin.table(u))
    }

    fn weight(&self, idx: usize) -> usize {
        let (g, h, u) = self.slices(idx);
        (g.count_ones() + h.count_ones() + (g ^ h ^ u).count_ones()) as usize
    }

    /// Six-variable table with `x1, x2` in the low bits.
    fn polynomial(&self, idx: usize) -> RMPolynomial {
        let (g, h, u) = self.slices(idx);
        let third = g ^ h ^ u;
        let mut t = 0u64;
        for y in 0..16 {
            t |= ((g >> y) & 1) << (4 * y + 1) | ((h >> y) & 1) << (4 * y + 2) | ((third >> y) & 1) << (4 * y + 3);
        }
        RMPolynomial::from_u64(t, 6)
    }
}

/// Maps on the packed index, one per generator.
enum Move {
    Slices(IndexMap, IndexMap),
    Swap,
    Shear,
    Lift(IndexMap, u64),
}

impl Move {
    fn apply(&self, lay: &Layout, idx: usize) -> usize {
        let (g, h, u) = Layout::split(idx);
        match self {
            Move::Slices(q, l) => Layout::join(q.apply(g), q.apply(h), l.apply(u)),
            Move::Swap => Layout::join(h, g, u),
            Move::Shear => {
                let t = lay.quad.table(g) ^ lay.quad.table(h) ^ lay.lin.table(u);
                Layout::join(g, lay.quad.index(t).expect("quadratic"), u)
            }
            Move::Lift(q, e) => {
                let e = *e as usize;
                let ht = lay.quad.table(h);
                let ut = lay.lin.table(u);
                let nu = permute_xor_u64(ut, e, 4) ^ ht ^ permute_xor_u64(ht, e, 4);
                Layout::join(q.apply(g), h, lay.lin.index(nu).expect("affine"))
            }
        }
    }
}

fn moves(lay: &Layout) -> Vec<Move> {
    let mut out: Vec<Move> = affine_group_generators(4)
        .iter()
        .map(|a| {
            let pm = PointMap::from_affine(a);
            Move::Slices(lay.quad.affine_map(|t| pm.apply(t)), lay.lin.affine_map(|t| pm.apply(t)))
        })
        .collect();
    out.push(Move::Swap);
    out.push(Move::Shear);
    out.push(Move::Lift(lay.quad.affine_map(|t| permute_xor_u64(t, 1, 4)), 1));
    out
}

/// Orbit representatives of nonzero words of weight at most `max_weight`
/// vanishing on the flat `x1 = x2 = 0`, with orbit sizes.
fn flat_orbits(max_weight: usize) -> Vec<(RMPolynomial, usize)> {
    let lay = Layout::new();
    let size = 1usize << SPACE_BITS;
    let word = |w: usize| -> u64 {
        (0..64).fold(0u64, |bits, b| {
            let idx = w * 64 + b;
            let wt = lay.weight(idx);
            if wt > 0 && wt <= max_weight { bits | 1 << b } else { bits }
        })
    };
    let mut matches = BitSet::new(size);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        matches.words_mut().par_iter_mut().enumerate().for_each(|(w, slot)| *slot = word(w));
    }
    #[cfg(not(feature = "parallel"))]
    for (w, slot) in matches.words_mut().iter_mut().enumerate() {
        *slot = word(w);
    }
    let gens = moves(&lay);
    let mut visited = BitSet::new(size);
    let mut out = Vec::new();
    for start in matches.iter_ones() {
        if !visited.insert(start) {
            continue;
        }
        let mut count = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for mv in &gens {
                let y = mv.apply(&lay, x);
                if visited.insert(y) {
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        out.push((lay.polynomial(start), count));
    }
    out
}

/// Affine classes of codewords of the third-order code on six variables
/// with weight in `1..=max_weight`, for `max_weight ≤ 18`.
pub fn classify_rm36(max_weight: usize) -> Result<Vec<EquivalenceClass>> {
    if max_weight > 18 {
        return Err(Error::OutOfRange(format!("max weight {max_weight} exceeds 18")));
    }
    let mut book = ClassBook::default();
    for (p, count) in flat_orbits(max_weight) {
        book.insert(p, count);
    }
    Ok(book.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::base_pairs::RM36_REPRESENTATIVES;
    use crate::classify::stabilizer::affine_class;
    use crate::rmpoly::are_affine_equivalent;
    use std::collections::BTreeMap;

    #[test]
    fn moves_preserve_weight_and_degree() {
        let lay = Layout::new();
        let gens = moves(&lay);
        for idx in [5usize, 1 << 20 | 77, 123_456_789, (1 << 27) - 1] {
            let p = lay.polynomial(idx);
            for mv in &gens {
                let q = lay.polynomial(mv.apply(&lay, idx));
                assert_eq!(q.weight(), p.weight());
                assert!(q.degree() <= 3);
                assert_eq!(are_affine_equivalent(&p, &q, 1_000_000), Some(true));
            }
        }
    }

    #[test]
    fn ten_classes_up_to_18() {
        let classes = classify_rm36(18).unwrap();
        let mut hist = BTreeMap::new();
        for c in &classes {
            *hist.entry(c.weight).or_insert(0) += 1;
            assert!(!c.unresolved);
        }
        assert_eq!(hist, BTreeMap::from([(8, 1), (12, 1), (14, 1), (16, 5), (18, 2)]));
        for (w, s) in RM36_REPRESENTATIVES {
            let rep = RMPolynomial::parse(s, Some(6)).unwrap();
            let hits = classes
                .iter()
                .filter(|c| c.weight == w && are_affine_equivalent(&c.representative, &rep, 2_000_000) == Some(true))
                .count();
            assert_eq!(hits, 1, "{s}");
        }
    }

    /// Weight distribution of the dual code by exhaustive enumeration.
    fn dual_distribution() -> Vec<u64> {
        let space = CoefficientSpace::new(6, 2);
        let mut a = vec![0u64; 65];
        for idx in 0..space.size() {
            a[space.table(idx).count_ones() as usize] += 1;
        }
        a
    }

    fn krawtchouk(n: i64, k: i64, x: i64) -> i128 {
        let binom = |a: i64, b: i64| -> i128 {
            if b < 0 || b > a {
                return 0;
            }
            (0..b).fold(1i128, |acc, i| acc * (a - i) as i128 / (i + 1) as i128)
        };
        (0..=k).map(|j| if j % 2 == 0 { 1 } else { -1 } * binom(x, j) * binom(n - x, k - j)).sum()
    }

    #[test]
    fn low_weight_counts_match_dual_transform() {
        let b = dual_distribution();
        let count = |w: i64| -> u64 {
            let s: i128 = (0..=64).map(|x| b[x as usize] as i128 * krawtchouk(64, w, x)).sum();
            (s / (1 << 22)) as u64
        };
        assert_eq!(count(8), 11160);
        let classes = classify_rm36(12).unwrap();
        for c in classes {
            assert_eq!(affine_class(&c.representative).len() as u64, count(c.weight as i64));
        }
    }
}
