//! Small truth tables packed in one word and coefficient-index spaces.

use crate::rmpoly::{moebius, AffineMap};

/// A point permutation `perm[v] = a(v)`, applied as `t ↦ t∘a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointMap {
    pub perm: Vec<u8>,
}

impl PointMap {
    pub fn from_affine(a: &AffineMap) -> Self {
        Self { perm: (0..1usize << a.m()).map(|v| a.apply_point(v) as u8).collect() }
    }

    pub fn apply(&self, t: u64) -> u64 {
        let mut out = 0u64;
        for (v, &p) in self.perm.iter().enumerate() {
            out |= ((t >> p) & 1) << v;
        }
        out
    }
}

/// Generators of the full affine group on `m` variables.
pub fn affine_group_generators(m: usize) -> Vec<AffineMap> {
    let mut gens = vec![AffineMap::translation(m, 1)];
    if m >= 2 {
        gens.push(AffineMap::swap(m, 0, 1));
        gens.push(AffineMap::transvection(m, 0, 1));
        let cols: Vec<usize> = (0..m).map(|i| 1 << ((i + 1) % m)).collect();
        gens.push(AffineMap::from_columns(m, cols, 0).expect("cycle is invertible"));
    }
    gens
}

/// ANF of a one-word truth table.
pub fn anf_u64(t: u64, m: usize) -> u64 {
    let mut w = [t];
    moebius(&mut w, m);
    w[0] & table_mask(m)
}

pub fn table_mask(m: usize) -> u64 {
    if m >= 6 { u64::MAX } else { (1u64 << (1 << m)) - 1 }
}

/// Polynomials of degree at most `d` in `m ≤ 6` variables, indexed by
/// the bits of their coefficient vector.
#[derive(Clone, Debug)]
pub struct CoefficientSpace {
    m: usize,
    monomials: Vec<u32>,
    position: [i8; 64],
    tables: Vec<u64>,
    chunks: Vec<Vec<u64>>,
}

impl CoefficientSpace {
    pub fn new(m: usize, d: usize) -> Self {
        let mut monomials: Vec<u32> = (0u32..1 << m).filter(|s| s.count_ones() as usize <= d).collect();
        monomials.sort_by_key(|s| (s.count_ones(), *s));
        let mut position = [-1i8; 64];
        for (i, &s) in monomials.iter().enumerate() {
            position[s as usize] = i as i8;
        }
        let tables: Vec<u64> = monomials
            .iter()
            .map(|&s| (0..1usize << m).filter(|&x| x as u32 & s == s).fold(0u64, |a, x| a | 1 << x))
            .collect();
        let chunks = tables
            .chunks(8)
            .map(|block| {
                (0..1usize << block.len())
                    .map(|bits| block.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).fold(0, |a, (_, &t)| a ^ t))
                    .collect()
            })
            .collect();
        Self { m, monomials, position, tables, chunks }
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn size(&self) -> usize {
        1 << self.dim()
    }

    pub fn table(&self, idx: usize) -> u64 {
        let mut t = 0;
        for (c, chunk) in self.chunks.iter().enumerate() {
            t ^= chunk[(idx >> (8 * c)) & 0xff];
        }
        t
    }

    /// Coefficient index of a table, if its degree fits.
    pub fn index(&self, t: u64) -> Option<usize> {
        let mut anf = anf_u64(t, self.m);
        let mut idx = 0usize;
        while anf != 0 {
            let s = anf.trailing_zeros() as usize;
            let p = self.position[s];
            if p < 0 {
                return None;
            }
            idx |= 1 << p;
            anf &= anf - 1;
        }
        Some(idx)
    }

    /// Tabulates an F2-affine map `idx ↦ f(idx)` from its values on the
    /// basis.
    pub fn affine_map(&self, f: impl Fn(u64) -> u64) -> IndexMap {
        let shift = self.index(f(0)).expect("map preserves the space");
        let images: Vec<usize> = self
            .tables
            .iter()
            .map(|&t| self.index(f(t)).expect("map preserves the space") ^ shift)
            .collect();
        IndexMap::new(shift, &images)
    }
}

/// An affine map on coefficient indices, evaluated bytewise.
#[derive(Clone, Debug)]
pub struct IndexMap {
    shift: usize,
    chunks: Vec<Vec<u32>>,
}

impl IndexMap {
    pub fn new(shift: usize, images: &[usize]) -> Self {
        let chunks = images
            .chunks(8)
            .map(|block| {
                (0..1usize << block.len())
                    .map(|bits| block.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).fold(0u32, |a, (_, &t)| a ^ t as u32))
                    .collect()
            })
            .collect();
        Self { shift, chunks }
    }

    pub fn apply(&self, idx: usize) -> usize {
        let mut out = self.shift;
        for (c, chunk) in self.chunks.iter().enumerate() {
            out ^= chunk[(idx >> (8 * c)) & 0xff] as usize;
        }
        out
    }
}

/// Fixed-size bitset over an index space.
pub struct BitSet {
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)] }
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    /// Sets bit `i`, returning whether it was clear.
    pub fn insert(&mut self, i: usize) -> bool {
        let fresh = !self.get(i);
        self.set(i);
        fresh
    }

    pub fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    pub fn iter_ones(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64).filter(move |b| bits >> b & 1 == 1).map(move |b| w * 64 + b)
        })
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmpoly::RMPolynomial;

    #[test]
    fn coefficient_round_trip() {
        let space = CoefficientSpace::new(6, 2);
        assert_eq!(space.dim(), 22);
        for idx in [0usize, 1, 5, 1 << 21, 0x2a_bcde, 0x3f_ffff] {
            assert_eq!(space.index(space.table(idx)), Some(idx));
        }
        let cubic = RMPolynomial::parse("x1*x2*x3", Some(6)).unwrap().table_u64();
        assert_eq!(space.index(cubic), None);
    }

    #[test]
    fn point_map_matches_apply_affine() {
        let a = AffineMap::from_columns(4, vec![0b0011, 0b0010, 0b1100, 0b1000], 0b0101).unwrap();
        let p = RMPolynomial::parse("x1*x2 + x3", Some(4)).unwrap();
        let direct = p.apply_affine(&a).unwrap().table_u64();
        assert_eq!(PointMap::from_affine(&a).apply(p.table_u64()), direct);
    }

    #[test]
    fn index_map_is_affine_action() {
        let space = CoefficientSpace::new(4, 2);
        let a = AffineMap::transvection(4, 2, 0);
        let pm = PointMap::from_affine(&AffineMap::translation(4, 3).compose(&a));
        let map = space.affine_map(|t| pm.apply(t));
        for idx in 0..space.size() {
            assert_eq!(space.table(map.apply(idx)), pm.apply(space.table(idx)));
        }
    }
}
