//! Z distances of descendant codes and their maxima over puncture sets.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::f2core::BitMatrix;
use crate::triortho::{DescendantCode, Parity, TriorthogonalSpace};

pub const DEFAULT_CAP: usize = 5;

/// A distance known exactly up to `cap`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceResult {
    pub value: Option<usize>,
    pub cap: usize,
    pub exact: bool,
}

impl DistanceResult {
    fn from_capped(d: usize, cap: usize) -> Self {
        if d <= cap {
            Self { value: Some(d), cap, exact: true }
        } else {
            Self { value: None, cap, exact: false }
        }
    }
}

fn column_words(m: &BitMatrix) -> Result<Vec<u64>> {
    if m.nrows() > 64 {
        return Err(Error::OutOfRange(format!("{} rows exceed the 64-row column packing", m.nrows())));
    }
    Ok((0..m.ncols())
        .map(|j| (0..m.nrows()).filter(|&i| m.get(i, j)).fold(0u64, |acc, i| acc | 1 << i))
        .collect())
}

/// Smallest `w <= limit` such that some `w` distinct indices have images
/// summing to zero and raw columns summing to nonzero. Returns `limit + 1`
/// when there is none.
fn min_weight(images: &[u64], raw: &[u64], limit: usize) -> usize {
    let n = images.len();
    if limit == 0 {
        return 1;
    }
    if (0..n).any(|i| images[i] == 0 && raw[i] != 0) {
        return 1;
    }
    if limit == 1 {
        return 2;
    }
    let mut sorted: Vec<(u64, u64, usize)> = (0..n).map(|i| (images[i], raw[i], i)).collect();
    sorted.sort_unstable();
    for group in sorted.chunk_by(|a, b| a.0 == b.0) {
        if group.first().map(|g| g.1) != group.last().map(|g| g.1) {
            return 2;
        }
    }
    if limit == 2 {
        return 3;
    }
    for a in 0..n {
        for b in a + 1..n {
            let t = images[a] ^ images[b];
            let rs = raw[a] ^ raw[b];
            let start = sorted.partition_point(|e| e.0 < t);
            for e in sorted[start..].iter().take_while(|e| e.0 == t) {
                if e.2 != a && e.2 != b && e.1 != rs {
                    return 3;
                }
            }
        }
    }
    for w in 4..=limit {
        if exists_split(images, raw, w) {
            return w;
        }
    }
    limit + 1
}

fn subsets(n: usize, size: usize, mut f: impl FnMut(u64)) {
    fn rec(start: usize, n: usize, left: usize, mask: u64, f: &mut dyn FnMut(u64)) {
        if left == 0 {
            f(mask);
            return;
        }
        for i in start..=n - left {
            rec(i + 1, n, left - 1, mask | 1 << i, f);
        }
    }
    if size <= n {
        rec(0, n, size, 0, &mut f);
    }
}

fn fold_mask(mask: u64, v: &[u64]) -> u64 {
    let mut acc = 0;
    let mut m = mask;
    while m != 0 {
        acc ^= v[m.trailing_zeros() as usize];
        m &= m - 1;
    }
    acc
}

fn exists_split(images: &[u64], raw: &[u64], w: usize) -> bool {
    let n = images.len();
    let (a, b) = (w / 2, w - w / 2);
    let mut table: HashMap<u64, Vec<(u64, u64)>> = HashMap::new();
    subsets(n, b, |mask| {
        table.entry(fold_mask(mask, images)).or_default().push((mask, fold_mask(mask, raw)));
    });
    let mut found = false;
    subsets(n, a, |mask| {
        if found {
            return;
        }
        if let Some(list) = table.get(&fold_mask(mask, images)) {
            let r = fold_mask(mask, raw);
            found = list.iter().any(|&(m2, r2)| m2 & mask == 0 && r2 != r);
        }
    });
    found
}

/// Minimum weight of a Z logical operator, up to `cap`.
pub fn z_distance(code: &DescendantCode, cap: usize) -> Result<DistanceResult> {
    if code.k() == 0 {
        return Err(Error::NoLogicalQubits);
    }
    if code.n() > 64 {
        return Err(Error::OutOfRange(format!("n = {} exceeds 64", code.n())));
    }
    let raw = column_words(&code.stacked())?;
    let images = column_words(code.g0())?;
    Ok(DistanceResult::from_capped(min_weight(&images, &raw, cap), cap))
}

/// Columns of a puncture problem: `d(P)` is the least `|z|`, `z` outside
/// `P`, whose column sum lies in the span of the `P` columns and is nonzero.
struct PunctureProblem {
    cols: Vec<u64>,
}

impl PunctureProblem {
    fn rank(&self) -> usize {
        let mut basis: Vec<u64> = Vec::new();
        for &c in &self.cols {
            let r = basis.iter().fold(c, |r, &b| r.min(r ^ b));
            if r != 0 {
                basis.push(r);
            }
        }
        basis.len()
    }

    /// `best[l]` for `l in 1..=kmax`, each capped at `cap + 1`.
    fn max_table(&self, kmax: usize, cap: usize, ub: &[usize]) -> Vec<Option<usize>> {
        let c = self.cols.len();
        let best: Vec<AtomicUsize> = (0..=kmax).map(|_| AtomicUsize::new(0)).collect();
        let top = |first: usize| {
            let mut state = DfsState { images: self.cols.clone(), chosen: vec![false; c] };
            state.descend(self, first, 1, kmax, cap, ub, &best);
        };
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            (0..c).into_par_iter().for_each(top);
        }
        #[cfg(not(feature = "parallel"))]
        (0..c).for_each(top);
        best.iter()
            .map(|b| match b.load(Ordering::Relaxed) {
                0 => None,
                v => Some(v),
            })
            .collect()
    }
}

struct DfsState {
    images: Vec<u64>,
    chosen: Vec<bool>,
}

impl DfsState {
    #[allow(clippy::too_many_arguments)]
    fn descend(
        &mut self,
        prob: &PunctureProblem,
        x: usize,
        level: usize,
        kmax: usize,
        cap: usize,
        ub: &[usize],
        best: &[AtomicUsize],
    ) {
        let pivot = self.images[x];
        if pivot == 0 {
            return;
        }
        let low = pivot & pivot.wrapping_neg();
        let saved = self.images.clone();
        for img in self.images.iter_mut() {
            if *img & low != 0 {
                *img ^= pivot;
            }
        }
        self.chosen[x] = true;
        let (imgs, raws): (Vec<u64>, Vec<u64>) = (0..prob.cols.len())
            .filter(|&i| !self.chosen[i])
            .map(|i| (self.images[i], prob.cols[i]))
            .unzip();
        let d = min_weight(&imgs, &raws, cap.min(ub[level]));
        best[level].fetch_max(d, Ordering::Relaxed);
        let deeper_useful =
            (level + 1..=kmax).any(|l| d.min(ub[l]) > best[l].load(Ordering::Relaxed));
        if deeper_useful {
            for y in x + 1..prob.cols.len() {
                if !self.chosen[y] {
                    self.descend(prob, y, level + 1, kmax, cap, ub, best);
                }
            }
        }
        self.chosen[x] = false;
        self.images = saved;
    }
}

/// Counting bounds on `d` for a `k`-puncture of `c` columns in dimension `r`.
fn upper_bounds(c: usize, r: usize, kmax: usize, cap: usize) -> Vec<usize> {
    (0..=kmax)
        .map(|l| {
            let q = c.saturating_sub(l);
            let t = r.saturating_sub(l) as u32;
            let mut ub = cap + 1;
            if t == 0 {
                ub = 1;
            } else if t < 63 && q as u64 > (1u64 << t) - 1 {
                ub = 2;
            } else if t < 64 && q as u64 > 1u64 << (t - 1) {
                ub = 3;
            }
            ub.min(cap + 1)
        })
        .collect()
}

fn table_from(prob: &PunctureProblem, kmax: usize, cap: usize) -> Vec<Option<usize>> {
    let ub = upper_bounds(prob.cols.len(), prob.rank(), kmax, cap);
    prob.max_table(kmax, cap, &ub)
}

fn unital_columns(s: &TriorthogonalSpace) -> Result<Vec<u64>> {
    column_words(&s.unital_basis()?)
}

/// Largest even-descendant puncture size.
pub fn max_k_even(s: &TriorthogonalSpace) -> usize {
    s.r().min((s.c().saturating_sub(1)) / 2)
}

/// Largest odd-descendant `k`.
pub fn max_k_odd(s: &TriorthogonalSpace) -> usize {
    s.r().min(s.c() / 2).saturating_sub(1)
}

/// `d_max` over all even descendants for every feasible `k`.
pub fn d_max_table(s: &TriorthogonalSpace, parity: Parity, cap: usize) -> Result<BTreeMap<usize, DistanceResult>> {
    let kmax = match parity {
        Parity::Even => max_k_even(s),
        Parity::Odd => max_k_odd(s),
    };
    d_max_upto(s, parity, kmax, cap)
}

fn d_max_upto(s: &TriorthogonalSpace, parity: Parity, kmax: usize, cap: usize) -> Result<BTreeMap<usize, DistanceResult>> {
    let cols = unital_columns(s)?;
    let mut out = BTreeMap::new();
    if kmax == 0 {
        return Ok(out);
    }
    let table = match parity {
        Parity::Even => table_from(&PunctureProblem { cols }, kmax, cap),
        Parity::Odd => {
            let mut acc: Vec<Option<usize>> = vec![None; kmax + 1];
            for j in 0..cols.len() {
                let derived: Vec<u64> = cols
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != j)
                    .map(|(_, &c)| (c ^ cols[j]) >> 1)
                    .collect();
                let t = table_from(&PunctureProblem { cols: derived }, kmax, cap);
                for (a, b) in acc.iter_mut().zip(t) {
                    *a = (*a).max(b);
                }
            }
            acc
        }
    };
    for (k, v) in table.into_iter().enumerate().skip(1) {
        if let Some(d) = v {
            out.insert(k, DistanceResult::from_capped(d, cap));
        }
    }
    Ok(out)
}

fn check_k(s: &TriorthogonalSpace, k: usize, parity: Parity) -> Result<()> {
    if k == 0 {
        return Err(Error::NoLogicalQubits);
    }
    if !s.is_unital() {
        return Err(Error::NotUnital);
    }
    let feasible = match parity {
        Parity::Even => k <= max_k_even(s),
        Parity::Odd => k <= max_k_odd(s),
    };
    if !feasible {
        return Err(Error::NoValidPuncture(k));
    }
    Ok(())
}

/// Maximum Z distance over even descendants with `k` logical qubits.
pub fn d_max_even(s: &TriorthogonalSpace, k: usize, cap: usize) -> Result<DistanceResult> {
    check_k(s, k, Parity::Even)?;
    d_max_upto(s, Parity::Even, k, cap)?.remove(&k).ok_or(Error::NoValidPuncture(k))
}

/// Maximum Z distance over odd descendants with `k` logical qubits.
pub fn d_max_odd(s: &TriorthogonalSpace, k: usize, cap: usize) -> Result<DistanceResult> {
    check_k(s, k, Parity::Odd)?;
    d_max_upto(s, Parity::Odd, k, cap)?.remove(&k).ok_or(Error::NoValidPuncture(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2core::{kernel_basis, BitVector};
    use crate::rmpoly::RMPolynomial;
    use crate::triortho::{even_descendant, indicator_to_generator, odd_descendant};
    use proptest::prelude::*;

    fn space(s: &str, m: usize) -> TriorthogonalSpace {
        indicator_to_generator(&RMPolynomial::parse(s, Some(m)).unwrap()).unwrap()
    }

    fn brute_distance(code: &DescendantCode) -> Option<usize> {
        let ker = kernel_basis(code.g0());
        let mut best: Option<usize> = None;
        for mask in 1u64..(1 << ker.nrows()) {
            let z = ker.combine(&BitVector::from_words(ker.nrows(), vec![mask]));
            if !code.g1().mul_vec(&z).is_zero() {
                best = Some(best.map_or(z.weight(), |b| b.min(z.weight())));
            }
        }
        best
    }

    fn subsets_of(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        subsets(n, k, |m| out.push((0..n).filter(|i| m >> i & 1 == 1).collect()));
        out
    }

    fn brute_dmax(s: &TriorthogonalSpace, k: usize, parity: Parity) -> Option<usize> {
        let mut best = None;
        let p = if parity == Parity::Even { k } else { k + 1 };
        for set in subsets_of(s.c(), p) {
            if s.restriction_rank(&set).unwrap() != p {
                continue;
            }
            let codes: Vec<DescendantCode> = match parity {
                Parity::Even => vec![even_descendant(s, &set).unwrap()],
                Parity::Odd => set.iter().map(|&j| odd_descendant(s, &set, j).unwrap()).collect(),
            };
            for code in codes {
                let d = z_distance(&code, 10).unwrap().value.unwrap();
                best = Some(best.map_or(d, |b: usize| b.max(d)));
            }
        }
        best
    }

    #[test]
    fn named_distances() {
        let rm = space("1", 4);
        let c15 = even_descendant(&rm, &[0]).unwrap();
        assert_eq!(z_distance(&c15, 5).unwrap(), DistanceResult { value: Some(3), cap: 5, exact: true });
        let c14 = even_descendant(&rm, &[0, 1]).unwrap();
        assert_eq!(z_distance(&c14, 5).unwrap().value, Some(2));
        let gen35 = DescendantCode::parse(include_str!("../data/gen35.txt")).unwrap();
        assert_eq!(z_distance(&gen35, 5).unwrap().value, Some(3));
        let capped = z_distance(&c15, 2).unwrap();
        assert_eq!(capped, DistanceResult { value: None, cap: 2, exact: false });
    }

    #[test]
    fn k_zero_rejected() {
        let rm = space("1", 4);
        let c = odd_descendant(&rm, &[0], 0).unwrap();
        assert_eq!(z_distance(&c, 5), Err(Error::NoLogicalQubits));
        assert_eq!(d_max_odd(&rm, 0, 5), Err(Error::NoLogicalQubits));
    }

    #[test]
    fn rm14_dmax() {
        let rm = space("1", 4);
        assert_eq!(d_max_even(&rm, 1, 5).unwrap().value, Some(3));
        assert_eq!(d_max_even(&rm, 2, 5).unwrap().value, Some(2));
        assert_eq!(d_max_odd(&rm, 1, 5).unwrap().value, Some(2));
        assert_eq!(brute_dmax(&rm, 2, Parity::Even), Some(2));
        assert_eq!(brute_dmax(&rm, 1, Parity::Odd), Some(2));
        assert!(matches!(d_max_even(&rm, 9, 5), Err(Error::NoValidPuncture(9))));
    }

    #[test]
    fn dmax_matches_brute_force_small() {
        for (poly, m) in [("1", 4), ("x1*x2 + x3*x4", 6)] {
            let s = space(poly, m);
            let even = d_max_table(&s, Parity::Even, 6).unwrap();
            let odd = d_max_table(&s, Parity::Odd, 6).unwrap();
            for k in 1..=3.min(max_k_even(&s)) {
                assert_eq!(even[&k].value, brute_dmax(&s, k, Parity::Even), "{poly} even k={k}");
            }
            for k in 1..=2.min(max_k_odd(&s)) {
                assert_eq!(odd[&k].value, brute_dmax(&s, k, Parity::Odd), "{poly} odd k={k}");
            }
        }
    }

    #[test]
    fn upper_bounds_are_sound() {
        let ub = upper_bounds(16, 5, 7, 5);
        assert_eq!(ub[5], 1);
        // 15 columns in a 4-dim quotient fill every nonzero class
        assert_eq!(ub[1], 3);
        assert!(ub[2] <= 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn z_distance_matches_kernel_enumeration(pset in proptest::sample::subsequence((0..16).collect::<Vec<_>>(), 1..=5)) {
            let rm = space("1", 4);
            prop_assume!(rm.restriction_rank(&pset).unwrap() == pset.len() && 2 * pset.len() < 16);
            let code = even_descendant(&rm, &pset).unwrap();
            prop_assert!(code.n() <= 14 || pset.len() == 1);
            let fast = z_distance(&code, 16).unwrap().value;
            prop_assert_eq!(fast, brute_distance(&code));
            if fast.unwrap_or(0) >= 2 {
                prop_assert!(code.n() >= 2 * code.k());
            }
        }

    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn z_distance_matches_on_odd_descendants(pset in proptest::sample::subsequence((0..24).collect::<Vec<_>>(), 2..=5), pick in 0usize..5) {
            let s = space("x1*x2 + x3*x4", 6);
            prop_assume!(s.restriction_rank(&pset).unwrap() == pset.len());
            let j = pset[pick % pset.len()];
            let code = odd_descendant(&s, &pset, j).unwrap();
            let ker_dim = code.n() - code.g0().rank();
            prop_assume!(ker_dim <= 18);
            prop_assert_eq!(z_distance(&code, 30).unwrap().value, brute_distance(&code));
        }
    }
}
