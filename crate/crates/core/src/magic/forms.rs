use serde::Serialize;

use crate::error::{Error, Result};
use crate::f2core::{BitMatrix, BitVector};

/// Symmetric integer matrix read as `z ↦ z·M·zᵀ mod 4` on binary `z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticFormZ4 {
    m: usize,
    mat: Vec<Vec<u8>>,
}

impl QuadraticFormZ4 {
    pub fn new(mat: Vec<Vec<u8>>) -> Result<Self> {
        let m = mat.len();
        for (i, row) in mat.iter().enumerate() {
            if row.len() != m {
                return Err(Error::LengthMismatch { expected: m, found: row.len() });
            }
            for j in 0..i {
                if (row[j] % 4) != (mat[j][i] % 4) {
                    return Err(Error::OutOfRange(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        let mat = mat.into_iter().map(|r| r.into_iter().map(|x| x % 4).collect()).collect();
        Ok(Self { m, mat })
    }

    pub fn zero(m: usize) -> Self {
        Self { m, mat: vec![vec![0; m]; m] }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> u8 {
        self.mat[i][j]
    }

    pub fn matrix(&self) -> &[Vec<u8>] {
        &self.mat
    }

    /// Entrywise sum mod 4.
    pub fn add(&self, other: &QuadraticFormZ4) -> Result<Self> {
        if other.m != self.m {
            return Err(Error::LengthMismatch { expected: self.m, found: other.m });
        }
        let mat = (0..self.m)
            .map(|i| (0..self.m).map(|j| (self.mat[i][j] + other.mat[i][j]) % 4).collect())
            .collect();
        Ok(Self { m: self.m, mat })
    }

    /// Value at the point whose coordinates are the bits of `z`.
    pub fn eval_mask(&self, z: usize) -> u8 {
        let mut acc = 0u32;
        for i in 0..self.m {
            if z >> i & 1 == 0 {
                continue;
            }
            acc += self.mat[i][i] as u32;
            for j in i + 1..self.m {
                if z >> j & 1 == 1 {
                    acc += 2 * self.mat[i][j] as u32;
                }
            }
        }
        (acc % 4) as u8
    }

    /// Reduction mod 2 as a binary matrix.
    pub fn mod2(&self) -> BitMatrix {
        let rows = (0..self.m)
            .map(|i| BitVector::from_bools(&(0..self.m).map(|j| self.mat[i][j] % 2 == 1).collect::<Vec<_>>()))
            .collect();
        BitMatrix::from_rows(self.m, rows).expect("square")
    }
}

pub fn eval_form(f: &QuadraticFormZ4, z: &BitVector) -> Result<u8> {
    if z.len() != f.m {
        return Err(Error::LengthMismatch { expected: f.m, found: z.len() });
    }
    let mask = z.iter_ones().fold(0usize, |acc, i| acc | 1 << i);
    Ok(f.eval_mask(mask))
}

/// `Vᵀ V` reduced mod 4 for binary `V`.
pub fn s_phase_from_set(v: &BitMatrix) -> QuadraticFormZ4 {
    let m = v.ncols();
    let mut mat = vec![vec![0u8; m]; m];
    for row in v.rows() {
        let ones: Vec<usize> = row.iter_ones().collect();
        for &i in &ones {
            for &j in &ones {
                mat[i][j] = (mat[i][j] + 1) % 4;
            }
        }
    }
    QuadraticFormZ4 { m, mat }
}

fn outer_add(b: &mut [u64], u: u64, v: u64) {
    for (i, row) in b.iter_mut().enumerate() {
        if u >> i & 1 == 1 {
            *row ^= v;
        }
    }
}

/// Writes `M` as `WᵀW + 2·diag(D)` with as few rows in `W` as the mod-2
/// reduction allows.
pub fn decompose_form(f: &QuadraticFormZ4) -> (BitMatrix, BitVector) {
    let m = f.m;
    assert!(m <= 64, "forms on more than 64 variables");
    let mut b: Vec<u64> = (0..m)
        .map(|i| (0..m).filter(|&j| f.mat[i][j] % 2 == 1).fold(0u64, |acc, j| acc | 1 << j))
        .collect();
    let mut squares: Vec<u64> = Vec::new();
    let mut planes: Vec<(u64, u64)> = Vec::new();
    loop {
        if let Some(i) = (0..m).find(|&i| b[i] >> i & 1 == 1) {
            let w = b[i];
            outer_add(&mut b, w, w);
            squares.push(w);
        } else if let Some(i) = (0..m).find(|&i| b[i] != 0) {
            let j = b[i].trailing_zeros() as usize;
            let (u, v) = (b[i], b[j]);
            outer_add(&mut b, u, v);
            outer_add(&mut b, v, u);
            planes.push((u, v));
        } else {
            break;
        }
    }
    if !planes.is_empty() {
        let mut w = squares.pop().unwrap_or(0);
        for (u, v) in planes {
            squares.push(w ^ u);
            squares.push(w ^ v);
            w ^= u ^ v;
        }
        squares.push(w);
    }
    squares.retain(|&w| w != 0);
    let rows: Vec<BitVector> = squares
        .iter()
        .map(|&w| BitVector::from_words(m, if m == 0 { vec![] } else { vec![w] }))
        .collect();
    let mut d = BitVector::zeros(m);
    for i in 0..m {
        let col = squares.iter().filter(|&&w| w >> i & 1 == 1).count() as u32;
        let diff = (f.mat[i][i] as u32 + 4 - col % 4) % 4;
        debug_assert_eq!(diff % 2, 0);
        d.set(i, diff == 2);
    }
    (BitMatrix::from_rows(m, rows).expect("row length"), d)
}

/// Value of `z·(WᵀW)·zᵀ + 2·z·diag(D)·zᵀ mod 4`.
pub fn eval_decomposition(w: &BitMatrix, d: &BitVector, z: usize) -> u8 {
    let mask = |v: &BitVector| v.iter_ones().fold(0usize, |acc, i| acc | 1 << i);
    let squares = w.rows().iter().filter(|r| (mask(r) & z).count_ones() % 2 == 1).count();
    let lin = (mask(d) & z).count_ones() as usize;
    ((squares + 2 * lin) % 4) as u8
}
