//! Unital triorthogonal spaces of size below 32 from the low-weight
//! codeword families of Reed-Muller codes.

use std::collections::BTreeMap;

use crate::rmpoly::RMPolynomial;

fn product(m: usize, vars: std::ops::Range<usize>) -> RMPolynomial {
    vars.fold(RMPolynomial::one(m), |acc, i| acc.mul(&RMPolynomial::var(m, i + 1)))
}

/// Family members of `RM(m-4, m)` below weight 32 for `m ≤ max_m`.
fn family_members(max_m: usize) -> Vec<RMPolynomial> {
    let mut out = Vec::new();
    for m in 4..=max_m {
        let s = m - 4;
        out.push(product(m, 0..s));
        for q in 3..=s {
            if m >= s + q {
                let head = product(m, 0..s - q);
                let tail = product(m, s - q..s).add(&product(m, s..s + q));
                out.push(head.mul(&tail));
            }
        }
        if s >= 2 {
            let head = product(m, 0..s - 2);
            let mut q = 2;
            while 2 * q <= m - s + 2 {
                let pairs = (0..q).fold(RMPolynomial::zero(m), |acc, i| {
                    let a = if i == 0 { s - 2 } else { s + 2 * i - 2 };
                    acc.add(&product(m, a..a + 2))
                });
                out.push(head.mul(&pairs));
                q += 1;
            }
        }
    }
    out
}

/// Indicator polynomials without linear factors of unital triorthogonal
/// spaces with at most `max_weight < 32` columns, one per class.
pub fn kasami_tokura_classes(max_weight: usize) -> Vec<RMPolynomial> {
    let mut seen: BTreeMap<(usize, usize, String), RMPolynomial> = BTreeMap::new();
    for p in family_members(12) {
        let Ok(f) = p.strip_linear_factors() else { continue };
        if f.m() >= 4 && f.degree() + 4 <= f.m() && f.weight() <= max_weight.min(31) {
            seen.entry((f.weight(), f.m(), f.to_string())).or_insert(f);
        }
    }
    seen.into_values().collect()
}
