//! Base pairs `(g, h)` anchoring degree-4 polynomials on eight variables.

use serde::Serialize;

use super::stabilizer::{affine_class, orbit_representatives, random_automorphisms};
use super::tables::PointMap;
use crate::error::{Error, Result};
use crate::rmpoly::RMPolynomial;

/// Class representatives of weight at most 18 among cubics on six
/// variables, by weight.
pub const RM36_REPRESENTATIVES: [(usize, &str); 10] = [
    (8, "x1*x2*x3"),
    (12, "x1*x2*x3 + x1*x4*x5"),
    (14, "x1*x2*x3 + x4*x5*x6"),
    (16, "x1*x2"),
    (16, "x1*x2 + x1*x3*x4"),
    (16, "x1*x2 + x1*x3*x4 + x1*x5*x6"),
    (16, "x1*x2*x3 + x2*x3 + x1*x4*x5"),
    (16, "x2*x3*x4 + x1*x3*x5 + x1*x2*x6"),
    (18, "x1*x2 + x2*x3*x5 + x1*x4*x6"),
    (18, "x1*x2*x3 + x2*x3*x4 + x1*x2*x5 + x1*x3*x6 + x4*x5*x6"),
];

pub fn rm36_representative(weight: usize) -> Vec<RMPolynomial> {
    RM36_REPRESENTATIVES
        .iter()
        .filter(|(w, _)| *w == weight)
        .map(|(_, s)| RMPolynomial::parse(s, Some(6)).expect("valid constant"))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasePair {
    #[serde(serialize_with = "as_string")]
    pub g: RMPolynomial,
    #[serde(serialize_with = "as_string")]
    pub h: RMPolynomial,
    pub case_id: u8,
}

fn as_string<S: serde::Serializer>(p: &RMPolynomial, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

/// Automorphisms drawn per stabilizer.
const STABILIZER_SAMPLES: usize = 24;

/// Minimum weights of `g`, `h` and the third slice for pairs of a case.
pub fn case_weights(case_id: u8) -> Result<(usize, usize)> {
    Ok(match case_id {
        1 => (0, 0),
        2 => (0, 8),
        3 => (0, 12),
        4 => (0, 14),
        5 => (0, 16),
        6 => (0, 18),
        7 => (8, 8),
        8 => (8, 12),
        9 => (8, 14),
        10 => (12, 12),
        other => return Err(Error::InvalidCase(other)),
    })
}

fn flat(points_origin: usize, dirs: &[usize]) -> RMPolynomial {
    let mut pts = vec![points_origin];
    for &d in dirs {
        let more: Vec<usize> = pts.iter().map(|&p| p ^ d).collect();
        pts.extend(more);
    }
    RMPolynomial::from_support(6, pts).expect("points in range")
}

/// Thirty-two second cubes against `x1x2x3`: subspaces meeting the
/// directions of its support in dimension 0 to 3, each translated by
/// the eight vectors of the complementary coordinates.
fn cube_pairs() -> Vec<RMPolynomial> {
    let (e1, e2, e3, e4, e5, e6) = (1, 2, 4, 8, 16, 32);
    let subspaces = [[e1, e2, e3], [e1, e2, e4], [e1, e4, e5], [e4, e5, e6]];
    let mut out = Vec::new();
    for dirs in subspaces {
        for a in 0..8usize {
            out.push(flat(0b111 ^ a, &dirs));
        }
    }
    out
}

/// Representatives of `g` of the given weight modulo automorphisms of `h`.
fn orbit_pairs(h: &RMPolynomial, g_weight: usize, case_id: u8) -> Vec<BasePair> {
    let gens: Vec<PointMap> = random_automorphisms(h, STABILIZER_SAMPLES, case_id as u64)
        .iter()
        .map(PointMap::from_affine)
        .collect();
    let class = affine_class(&rm36_representative(g_weight)[0]);
    orbit_representatives(&class, &gens)
        .into_iter()
        .map(|(t, _)| BasePair { g: RMPolynomial::from_u64(t, 6), h: h.clone(), case_id })
        .collect()
}

/// Base pairs of a case, with `|g| ≤ |h|`.
pub fn enumerate_base_pairs(case_id: u8) -> Result<Vec<BasePair>> {
    let zero = RMPolynomial::zero(6);
    let with_zero = |hs: Vec<RMPolynomial>| -> Vec<BasePair> {
        hs.into_iter().map(|h| BasePair { g: zero.clone(), h, case_id }).collect()
    };
    let (_, hw) = case_weights(case_id)?;
    Ok(match case_id {
        1 => with_zero(vec![zero.clone()]),
        2..=6 => with_zero(rm36_representative(hw)),
        7 => {
            let g = rm36_representative(8).remove(0);
            cube_pairs().into_iter().map(|h| BasePair { g: g.clone(), h, case_id }).collect()
        }
        8 | 10 => orbit_pairs(&rm36_representative(12)[0], if case_id == 8 { 8 } else { 12 }, case_id),
        9 => orbit_pairs(&rm36_representative(14)[0], 8, case_id),
        _ => unreachable!("case_weights rejects other ids"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn representative_weights() {
        for (w, s) in RM36_REPRESENTATIVES {
            let p = RMPolynomial::parse(s, Some(6)).unwrap();
            assert_eq!(p.weight(), w, "{s}");
            assert!(p.degree() <= 3);
        }
    }

    #[test]
    fn small_cases() {
        assert_eq!(enumerate_base_pairs(1).unwrap().len(), 1);
        assert_eq!(enumerate_base_pairs(5).unwrap().len(), 5);
        assert_eq!(enumerate_base_pairs(6).unwrap().len(), 2);
        assert_eq!(enumerate_base_pairs(11), Err(Error::InvalidCase(11)));
        assert_eq!(enumerate_base_pairs(0), Err(Error::InvalidCase(0)));
    }

    #[test]
    fn case7_has_32_cubes_covering_all() {
        let pairs = enumerate_base_pairs(7).unwrap();
        assert_eq!(pairs.len(), 32);
        let g = &pairs[0].g;
        assert!(pairs.iter().all(|p| p.h.weight() == 8 && p.h.degree() == 3 && &p.g == g));
        let gens: Vec<PointMap> = random_automorphisms(g, 24, 99).iter().map(PointMap::from_affine).collect();
        let mut covered: HashSet<u64> = HashSet::new();
        for p in &pairs {
            covered.extend(super::super::stabilizer::orbit(p.h.table_u64(), &gens));
        }
        assert_eq!(covered.len(), 11160);
    }

    #[test]
    fn cases_8_and_9_cover_every_cube() {
        for case in [8u8, 9] {
            let pairs = enumerate_base_pairs(case).unwrap();
            let h = pairs[0].h.clone();
            let gens: Vec<PointMap> = random_automorphisms(&h, 24, 1000).iter().map(PointMap::from_affine).collect();
            let mut covered: HashSet<u64> = HashSet::new();
            for p in &pairs {
                assert_eq!(p.g.weight(), 8);
                assert_eq!(p.h, h);
                covered.extend(super::super::stabilizer::orbit(p.g.table_u64(), &gens));
            }
            assert_eq!(covered.len(), 11160, "case {case}");
        }
    }
}
