use rand::Rng;

use crate::error::{Error, Result};
use crate::f2core::{BitMatrix, BitVector};

/// Invertible affine map `v -> L v + ell` on `F2^m`, with points packed
/// as integers (bit `i` is coordinate `x_{i+1}`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap {
    m: usize,
    cols: Vec<usize>,
    ell: usize,
}

fn mask_rank(vs: &[usize]) -> usize {
    let mut basis: Vec<usize> = Vec::new();
    for &v in vs {
        let r = basis.iter().fold(v, |r, &b| r.min(r ^ b));
        if r != 0 {
            basis.push(r);
        }
    }
    basis.len()
}

impl AffineMap {
    pub fn new(l: &BitMatrix, ell: &BitVector) -> Result<Self> {
        let m = l.nrows();
        if l.ncols() != m {
            return Err(Error::LengthMismatch { expected: m, found: l.ncols() });
        }
        if ell.len() != m {
            return Err(Error::LengthMismatch { expected: m, found: ell.len() });
        }
        let cols = (0..m)
            .map(|j| (0..m).filter(|&i| l.get(i, j)).fold(0usize, |acc, i| acc | 1 << i))
            .collect();
        let ell = ell.iter_ones().fold(0usize, |acc, i| acc | 1 << i);
        Self::from_columns(m, cols, ell)
    }

    /// Map given by the images of the unit vectors and the translation.
    pub fn from_columns(m: usize, cols: Vec<usize>, ell: usize) -> Result<Self> {
        if cols.len() != m {
            return Err(Error::LengthMismatch { expected: m, found: cols.len() });
        }
        if mask_rank(&cols) != m {
            return Err(Error::SingularMap);
        }
        Ok(Self { m, cols, ell })
    }

    pub fn identity(m: usize) -> Self {
        Self { m, cols: (0..m).map(|i| 1 << i).collect(), ell: 0 }
    }

    pub fn translation(m: usize, e: usize) -> Self {
        Self { ell: e, ..Self::identity(m) }
    }

    /// Exchanges coordinates `i` and `j` (0-based).
    pub fn swap(m: usize, i: usize, j: usize) -> Self {
        let mut a = Self::identity(m);
        a.cols.swap(i, j);
        a
    }

    /// The substitution `x_i <- x_i + x_j` (0-based, `i != j`).
    pub fn transvection(m: usize, i: usize, j: usize) -> Self {
        let mut a = Self::identity(m);
        a.cols[j] |= 1 << i;
        a
    }

    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        loop {
            let cols: Vec<usize> = (0..m).map(|_| rng.gen_range(0..1usize << m)).collect();
            if mask_rank(&cols) == m {
                let ell = rng.gen_range(0..1usize << m);
                return Self { m, cols, ell };
            }
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn columns(&self) -> &[usize] {
        &self.cols
    }

    pub fn shift(&self) -> usize {
        self.ell
    }

    pub fn l(&self) -> BitMatrix {
        let mut l = BitMatrix::zeros(self.m, self.m);
        for (j, &c) in self.cols.iter().enumerate() {
            for i in 0..self.m {
                if c >> i & 1 == 1 {
                    l.set(i, j, true);
                }
            }
        }
        l
    }

    pub fn ell(&self) -> BitVector {
        BitVector::from_indices(self.m, (0..self.m).filter(|i| self.ell >> i & 1 == 1)).expect("in range")
    }

    #[inline]
    pub fn apply_linear(&self, v: usize) -> usize {
        let mut out = 0;
        let mut v = v;
        while v != 0 {
            let j = v.trailing_zeros() as usize;
            out ^= self.cols[j];
            v &= v - 1;
        }
        out
    }

    #[inline]
    pub fn apply_point(&self, v: usize) -> usize {
        self.apply_linear(v) ^ self.ell
    }

    /// `v -> self(other(v))`. Pulling back by `self` and then by `other`
    /// equals pulling back by the composite.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        assert_eq!(self.m, other.m);
        AffineMap {
            m: self.m,
            cols: other.cols.iter().map(|&c| self.apply_linear(c)).collect(),
            ell: self.apply_point(other.ell),
        }
    }

    pub fn inverse(&self) -> AffineMap {
        let mut inv_cols = vec![0usize; self.m];
        let mut rows: Vec<(usize, usize)> = self.cols.iter().enumerate().map(|(j, &c)| (c, 1 << j)).collect();
        for bit in 0..self.m {
            let p = (bit..self.m).find(|&r| rows[r].0 >> bit & 1 == 1).expect("invertible");
            rows.swap(bit, p);
            let piv = rows[bit];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != bit && row.0 >> bit & 1 == 1 {
                    row.0 ^= piv.0;
                    row.1 ^= piv.1;
                }
            }
        }
        for (bit, &(_, combo)) in rows.iter().enumerate() {
            inv_cols[bit] = combo;
        }
        let lin = AffineMap { m: self.m, cols: inv_cols, ell: 0 };
        let ell = lin.apply_linear(self.ell);
        AffineMap { ell, ..lin }
    }
}
