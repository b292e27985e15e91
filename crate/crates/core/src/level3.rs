//! Level-3 divisibility of triorthogonal spaces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::f2core::{rref, BitMatrix};
use crate::triortho::{is_triorthogonal_space, TriorthogonalSpace};

/// Outcome of a divisibility test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisibilityVerdict {
    pub divisible: bool,
    /// All-odd vector over Z8 with `h·t ≡ 0 mod 8` on the space.
    pub witness: Option<Vec<u8>>,
    /// Even row of `UN` whose entry sum is `2 mod 4`.
    pub obstruction: Option<Vec<u8>>,
}

/// The reduced system: `[I | A]` after a column permutation and the pair
/// products `N` on the non-pivot block.
struct Reduced {
    c: usize,
    /// `perm[i]` is the original column of position `i`.
    perm: Vec<usize>,
    /// Rows of `A`, each a 0/1 vector of length `c - r`.
    a: Vec<Vec<u8>>,
    n: Vec<Vec<u8>>,
}

fn reduce_space(h: &BitMatrix) -> Reduced {
    let rr = rref(h);
    let c = h.ncols();
    let r = rr.rank;
    let mut perm = rr.pivots.clone();
    perm.extend((0..c).filter(|j| !rr.pivots.contains(j)));
    let a: Vec<Vec<u8>> = (0..r)
        .map(|i| perm[r..].iter().map(|&j| rr.reduced.get(i, j) as u8).collect())
        .collect();
    let mut n = Vec::new();
    for x in 0..r {
        for y in x + 1..r {
            n.push(a[x].iter().zip(&a[y]).map(|(p, q)| p & q).collect());
        }
    }
    Reduced { c, perm, a, n }
}

impl Reduced {
    /// Fills the pivot block so each basis row sums to zero mod 8.
    fn witness(&self, tail: &[u8]) -> Vec<u8> {
        let r = self.a.len();
        let mut t = vec![0u8; self.c];
        for (i, row) in self.a.iter().enumerate() {
            let s: u32 = row.iter().zip(tail).map(|(&x, &y)| x as u32 * y as u32).sum();
            t[self.perm[i]] = ((8 - s % 8) % 8) as u8;
        }
        for (k, &v) in tail.iter().enumerate() {
            t[self.perm[r + k]] = v;
        }
        t
    }
}

/// Integer elimination of `N` mirroring its F2 reduced row echelon form.
/// Returns the rows of `UN` reduced mod 4 and the pivot column of each
/// nonzero-mod-2 row.
fn eliminate(n: &[Vec<u8>], width: usize) -> (Vec<Vec<u8>>, Vec<Option<usize>>) {
    let mut rows: Vec<Vec<u8>> = n.iter().map(|r| r.iter().map(|&x| x % 4).collect()).collect();
    let mut pivots = vec![None; rows.len()];
    let mut next = 0;
    for col in 0..width {
        let Some(p) = (next..rows.len()).find(|&i| rows[i][col] % 2 == 1) else { continue };
        rows.swap(next, p);
        let piv = rows[next].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != next && row[col] % 2 == 1 {
                for (x, &y) in row.iter_mut().zip(&piv) {
                    *x = (*x + y) % 4;
                }
            }
        }
        pivots[next] = Some(col);
        next += 1;
    }
    (rows, pivots)
}

fn row_sum_mod4(row: &[u8]) -> u8 {
    (row.iter().map(|&x| x as u32).sum::<u32>() % 4) as u8
}

/// Decides level-3 divisibility by integer elimination of the pair-product
/// system.
pub fn is_level3_divisible(s: &TriorthogonalSpace) -> DivisibilityVerdict {
    let red = reduce_space(s.gen());
    let width = red.c - red.a.len();
    let (rows, pivots) = eliminate(&red.n, width);
    if let Some(rho) = rows
        .iter()
        .zip(&pivots)
        .find(|(row, piv)| piv.is_none() && row_sum_mod4(row) != 0)
        .map(|(row, _)| row.clone())
    {
        return DivisibilityVerdict { divisible: false, witness: None, obstruction: Some(rho) };
    }
    let mut v = vec![0u8; width];
    for (row, piv) in rows.iter().zip(&pivots) {
        if let Some(p) = piv {
            v[*p] = row_sum_mod4(row) / 2;
        }
    }
    let tail: Vec<u8> = v.iter().map(|&b| 1 + 2 * b).collect();
    let t = red.witness(&tail);
    debug_assert!(check_conditions_0_to_3(s.gen(), &t));
    DivisibilityVerdict { divisible: true, witness: Some(t), obstruction: None }
}

/// Validates `h` as a triorthogonal space before testing it.
pub fn divisibility_of_matrix(h: &BitMatrix) -> Result<DivisibilityVerdict> {
    if !is_triorthogonal_space(&h.row_basis()) {
        return Err(Error::NotTriorthogonal);
    }
    Ok(is_level3_divisible(&TriorthogonalSpace::new(h.clone())?))
}

pub const BRUTE_FORCE_MAX_FREE: usize = 24;

/// Exhaustive search over odd tails `1 + 2v`.
pub fn brute_force_divisible(s: &TriorthogonalSpace) -> Result<DivisibilityVerdict> {
    let red = reduce_space(s.gen());
    let width = red.c - red.a.len();
    if width > BRUTE_FORCE_MAX_FREE {
        return Err(Error::BudgetExceeded(format!("{width} free coordinates exceed {BRUTE_FORCE_MAX_FREE}")));
    }
    let masks: Vec<(u32, u32)> = red
        .n
        .iter()
        .map(|row| {
            let m = row.iter().enumerate().fold(0u32, |acc, (i, &b)| acc | (b as u32) << i);
            (m, m.count_ones())
        })
        .collect();
    for v in 0u32..(1u32 << width) {
        if masks.iter().all(|&(m, w)| (w + 2 * (m & v).count_ones()) % 4 == 0) {
            let tail: Vec<u8> = (0..width).map(|i| 1 + 2 * ((v >> i) & 1) as u8).collect();
            let t = red.witness(&tail);
            return Ok(DivisibilityVerdict { divisible: true, witness: Some(t), obstruction: None });
        }
    }
    let fast = is_level3_divisible(s);
    Ok(DivisibilityVerdict { divisible: false, witness: None, obstruction: fast.obstruction })
}

/// Conditions 0 to 3 for `t` against the rows of `h`.
pub fn check_conditions_0_to_3(h: &BitMatrix, t: &[u8]) -> bool {
    if t.len() != h.ncols() || t.iter().any(|&x| x % 2 == 0) {
        return false;
    }
    let dot = |rows: &[&crate::f2core::BitVector]| -> u32 {
        (0..t.len()).filter(|&j| rows.iter().all(|r| r.get(j))).map(|j| t[j] as u32).sum()
    };
    let rows = h.rows();
    for a in 0..rows.len() {
        if dot(&[&rows[a]]) % 8 != 0 {
            return false;
        }
        for b in a..rows.len() {
            if dot(&[&rows[a], &rows[b]]) % 4 != 0 {
                return false;
            }
            for c in b..rows.len() {
                if dot(&[&rows[a], &rows[b], &rows[c]]) % 2 != 0 {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2core::BitVector;
    use crate::rmpoly::RMPolynomial;
    use crate::triortho::indicator_to_generator;
    use proptest::prelude::*;

    fn space(s: &str, m: usize) -> TriorthogonalSpace {
        indicator_to_generator(&RMPolynomial::parse(s, Some(m)).unwrap()).unwrap()
    }

    const CORPUS: [(&str, usize); 5] = [
        ("1", 4),
        ("x1*x2 + x3*x4", 6),
        ("x1*x2 + x3*x4 + x5*x6", 6),
        ("x1*x2*x3 + x4*x5*x6", 7),
        ("x1*x2*x3*x4 + x5*x6*x7*x8", 8),
    ];

    /// Independent check: every element of the span, not just basis rows.
    fn span_divisible(s: &TriorthogonalSpace, t: &[u8]) -> bool {
        let r = s.r();
        (1u64..1 << r).all(|mask| {
            let h = s.gen().combine(&BitVector::from_words(r, vec![mask]));
            h.iter_ones().map(|j| t[j] as u32).sum::<u32>() % 8 == 0
        })
    }

    #[test]
    fn rm14_divisible() {
        let s = space("1", 4);
        let v = is_level3_divisible(&s);
        assert!(v.divisible);
        let t = v.witness.unwrap();
        assert!(check_conditions_0_to_3(s.gen(), &t));
        assert!(span_divisible(&s, &t));
    }

    #[test]
    fn code3_not_divisible() {
        let s = space("x1*x2 + x3*x4 + x5*x6", 6);
        let v = is_level3_divisible(&s);
        assert!(!v.divisible);
        let rho = v.obstruction.unwrap();
        assert!(rho.iter().all(|x| x % 2 == 0));
        assert_ne!(row_sum_mod4(&rho), 0);
        assert!(!brute_force_divisible(&s).unwrap().divisible);
        assert!(!check_conditions_0_to_3(s.gen(), &vec![1; s.c()]));
    }

    #[test]
    fn all_one_eight() {
        let s = TriorthogonalSpace::new(BitMatrix::from_strs(&["11111111"]).unwrap()).unwrap();
        let v = is_level3_divisible(&s);
        assert_eq!(v.witness, Some(vec![1; 8]));
    }

    #[test]
    fn fast_matches_brute_force_on_corpus() {
        for (p, m) in CORPUS {
            let s = space(p, m);
            let fast = is_level3_divisible(&s);
            let slow = brute_force_divisible(&s).unwrap();
            assert_eq!(fast.divisible, slow.divisible, "{p}");
            for t in [fast.witness, slow.witness].into_iter().flatten() {
                assert!(check_conditions_0_to_3(s.gen(), &t), "{p}");
                assert!(span_divisible(&s, &t), "{p}");
            }
        }
    }

    #[test]
    fn pair_products_sum_even() {
        for (p, m) in CORPUS {
            let red = reduce_space(space(p, m).gen());
            assert!(red.n.iter().all(|row| row.iter().map(|&x| x as u32).sum::<u32>() % 2 == 0));
        }
    }

    #[test]
    fn one_even_entry_fails() {
        let s = space("1", 4);
        let mut t = is_level3_divisible(&s).witness.unwrap();
        t[3] = (t[3] + 1) % 8;
        assert!(!check_conditions_0_to_3(s.gen(), &t));
    }

    #[test]
    fn rejects_non_triorthogonal_matrix() {
        let h = BitMatrix::from_strs(&["1100", "0110"]).unwrap();
        assert_eq!(divisibility_of_matrix(&h), Err(Error::NotTriorthogonal));
    }

    fn exists_odd_witness(h: &BitMatrix) -> bool {
        let c = h.ncols();
        (0u32..1 << (2 * c)).any(|code| {
            let t: Vec<u8> = (0..c).map(|j| (1 + 2 * ((code >> (2 * j)) & 3)) as u8).collect();
            check_conditions_0_to_3(h, &t)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn divisible_implies_triorthogonal(rows in proptest::collection::vec(1u8..=255, 1..3)) {
            let h = BitMatrix::from_rows(8, rows.iter().map(|&r| BitVector::from_words(8, vec![r as u64])).collect()).unwrap().row_basis();
            if exists_odd_witness(&h) {
                prop_assert!(is_triorthogonal_space(&h));
                let v = divisibility_of_matrix(&h).unwrap();
                prop_assert!(v.divisible);
            } else if is_triorthogonal_space(&h) {
                let s = TriorthogonalSpace::new(h.clone()).unwrap();
                prop_assert!(!is_level3_divisible(&s).divisible);
            }
        }
    }
}
