//! Affine automorphisms of small polynomials and orbits of truth tables.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::tables::{affine_group_generators, PointMap};
use crate::rmpoly::{AffineMap, Equivalence, EquivalenceSearch, RMPolynomial};

/// Elements `s` with `h∘s = h`, each obtained by solving `h∘b = h∘a` for
/// a random `a` and returning `b∘a⁻¹`.
pub fn random_automorphisms(h: &RMPolynomial, count: usize, seed: u64) -> Vec<AffineMap> {
    let m = h.m();
    if h.is_zero() || h.weight() == 1 << m {
        return affine_group_generators(m);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let search = EquivalenceSearch::default();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = AffineMap::random(m, &mut rng);
        let target = h.apply_affine(&a).expect("same size");
        if let Equivalence::Found(b) = search.find(h, &target) {
            let s = b.compose(&a.inverse());
            debug_assert_eq!(h.apply_affine(&s).as_ref(), Ok(h));
            out.push(s);
        }
    }
    out
}

/// Every table in the orbit of `start` under the maps.
pub fn orbit(start: u64, gens: &[PointMap]) -> Vec<u64> {
    let mut seen: HashSet<u64> = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        for g in gens {
            let next = g.apply(t);
            if seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    let mut out: Vec<u64> = seen.into_iter().collect();
    out.sort_unstable();
    out
}

/// All polynomials affine equivalent to `p` (as `2^m ≤ 64` tables).
pub fn affine_class(p: &RMPolynomial) -> Vec<u64> {
    let gens: Vec<PointMap> = affine_group_generators(p.m()).iter().map(PointMap::from_affine).collect();
    orbit(p.table_u64(), &gens)
}

/// Partitions sorted `elements` into orbits; returns `(representative,
/// size)` with the smallest element as representative.
pub fn orbit_representatives(elements: &[u64], gens: &[PointMap]) -> Vec<(u64, usize)> {
    let mut seen: HashSet<u64> = HashSet::with_capacity(elements.len());
    let mut reps = Vec::new();
    for &e in elements {
        if !seen.insert(e) {
            continue;
        }
        let mut size = 1;
        let mut queue = VecDeque::from([e]);
        while let Some(t) = queue.pop_front() {
            for g in gens {
                let next = g.apply(t);
                if seen.insert(next) {
                    size += 1;
                    queue.push_back(next);
                }
            }
        }
        reps.push((e, size));
    }
    reps
}

/// Elements of the subgroup generated by `gens` that also fix `g`,
/// as Schreier generators of the stabilizer of `g`. At most `limit`.
pub fn schreier_fixers(g: &RMPolynomial, gens: &[AffineMap], limit: usize) -> Vec<AffineMap> {
    let m = g.m();
    let pms: Vec<PointMap> = gens.iter().map(PointMap::from_affine).collect();
    let start = g.table_u64();
    let mut transversal: HashMap<u64, AffineMap> = HashMap::from([(start, AffineMap::identity(m))]);
    let mut order = vec![start];
    let mut i = 0;
    let mut out = Vec::new();
    let mut seen_out: HashSet<(Vec<usize>, usize)> = HashSet::new();
    while i < order.len() {
        let x = order[i];
        i += 1;
        for (s, pm) in gens.iter().zip(&pms) {
            let y = pm.apply(x);
            let tx = transversal[&x].compose(s);
            match transversal.get(&y) {
                None => {
                    transversal.insert(y, tx);
                    order.push(y);
                }
                Some(ty) => {
                    if out.len() < limit {
                        let fix = tx.compose(&ty.inverse());
                        let key = (fix.columns().to_vec(), fix.shift());
                        if key != (AffineMap::identity(m).columns().to_vec(), 0) && seen_out.insert(key) {
                            out.push(fix);
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> RMPolynomial {
        RMPolynomial::parse(s, Some(6)).unwrap()
    }

    #[test]
    fn class_sizes() {
        assert_eq!(affine_class(&p("x1*x2*x3")).len(), 11160);
        assert_eq!(affine_class(&p("x1*x2")).len(), 2604);
    }

    #[test]
    fn automorphisms_fix_polynomial() {
        let h = p("x1*x2*x3 + x4*x5*x6");
        for s in random_automorphisms(&h, 6, 2) {
            assert_eq!(h.apply_affine(&s).unwrap(), h);
        }
    }

    #[test]
    fn schreier_generators_fix_both() {
        let h = p("x1*x2*x3 + x4*x5*x6");
        let g = p("x1*x2*x4");
        let gens = random_automorphisms(&h, 8, 5);
        for s in schreier_fixers(&g, &gens, 10) {
            assert_eq!(h.apply_affine(&s).unwrap(), h);
            assert_eq!(g.apply_affine(&s).unwrap(), g);
        }
    }

    #[test]
    fn orbits_partition() {
        let h = p("x1*x2*x3 + x1*x4*x5");
        let gens: Vec<PointMap> = random_automorphisms(&h, 12, 1).iter().map(PointMap::from_affine).collect();
        let all = affine_class(&p("x1*x2*x3"));
        let reps = orbit_representatives(&all, &gens);
        assert_eq!(reps.iter().map(|r| r.1).sum::<usize>(), all.len());
    }
}
