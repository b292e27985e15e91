use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AffineMap, RMPolynomial};

fn elementary_moves(m: usize) -> Vec<AffineMap> {
    let mut moves = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i != j {
                moves.push(AffineMap::transvection(m, i, j));
            }
        }
        moves.push(AffineMap::translation(m, 1 << i));
    }
    for i in 0..m {
        for j in i + 1..m {
            moves.push(AffineMap::swap(m, i, j));
        }
    }
    moves
}

/// Heuristic search for an affine-equivalent polynomial with few monomials.
pub fn minimize_monomials(p: &RMPolynomial, budget: usize, seed: u64) -> RMPolynomial {
    minimize_monomials_with_map(p, budget, seed).0
}

/// As [`minimize_monomials`], also returning `a` with `result = p∘a`.
///
/// Best-improvement descent over elementary moves, restarted from the best
/// point with a few random moves once stuck. `budget` counts evaluated
/// candidates.
pub fn minimize_monomials_with_map(p: &RMPolynomial, budget: usize, seed: u64) -> (RMPolynomial, AffineMap) {
    let m = p.m();
    let moves = elementary_moves(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (p.clone(), AffineMap::identity(m));
    if moves.is_empty() || p.num_monomials() <= 1 {
        return best;
    }
    let mut cur = best.clone();
    let mut evals = 0usize;
    while evals < budget {
        let mut step: Option<(RMPolynomial, usize)> = None;
        for (idx, mv) in moves.iter().enumerate() {
            let cand = cur.0.apply_affine(mv).expect("same size");
            evals += 1;
            let bar = step.as_ref().map_or(cur.0.num_monomials(), |s| s.0.num_monomials());
            if cand.num_monomials() < bar {
                step = Some((cand, idx));
            }
            if evals >= budget {
                break;
            }
        }
        match step {
            Some((poly, idx)) => {
                cur = (poly, cur.1.compose(&moves[idx]));
                if cur.0.num_monomials() < best.0.num_monomials() {
                    best = cur.clone();
                    if best.0.num_monomials() <= 1 {
                        break;
                    }
                }
            }
            None => {
                cur = best.clone();
                let kicks = rng.gen_range(1..=3);
                for _ in 0..kicks {
                    let mv = moves.choose(&mut rng).expect("nonempty");
                    cur = (cur.0.apply_affine(mv).expect("same size"), cur.1.compose(mv));
                    evals += 1;
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scrambled(s: &str, m: usize, seed: u64) -> RMPolynomial {
        let p = RMPolynomial::parse(s, Some(m)).unwrap();
        let a = AffineMap::random(m, &mut ChaCha8Rng::seed_from_u64(seed));
        p.apply_affine(&a).unwrap()
    }

    #[test]
    fn single_monomial_is_fixed() {
        let p = RMPolynomial::parse("x1*x2*x3", Some(6)).unwrap();
        assert_eq!(minimize_monomials(&p, 1000, 0), p);
    }

    #[test]
    fn recovers_monomial_from_scramble() {
        for seed in 0..5 {
            let q = scrambled("x1*x2*x3", 6, seed);
            let (r, a) = minimize_monomials_with_map(&q, 20_000, 1);
            assert_eq!(r.num_monomials(), 1, "seed {seed}: {r}");
            assert_eq!(q.apply_affine(&a).unwrap(), r);
        }
    }

    #[test]
    fn recovers_quadratic_from_scramble() {
        for seed in 0..5 {
            let q = scrambled("x1*x2 + x3*x4", 6, seed);
            let r = minimize_monomials(&q, 20_000, 2);
            assert_eq!(r.num_monomials(), 2, "seed {seed}: {r}");
            assert_eq!(r.weight(), 24);
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let q = scrambled("x1*x2*x3 + x4*x5*x6", 7, 9);
        assert_eq!(minimize_monomials(&q, 3000, 5), minimize_monomials(&q, 3000, 5));
        assert!(minimize_monomials(&q, 3000, 5).num_monomials() <= q.num_monomials());
    }
}
