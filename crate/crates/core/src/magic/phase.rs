use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::f2core::BitMatrix;

/// Diagonal phase `exp(iπ/4 · φ(z))` with
/// `φ = 4·Σ cubic + 2·Σ quadratic + Σ linear (mod 8)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PhasePolynomial8 {
    pub m: usize,
    pub cubic: BTreeSet<(usize, usize, usize)>,
    pub quadratic: BTreeMap<(usize, usize), u8>,
    pub linear: BTreeMap<usize, u8>,
}

impl PhasePolynomial8 {
    pub fn identity(m: usize) -> Self {
        Self { m, ..Default::default() }
    }

    fn add_linear(&mut self, b: usize, c: u8) {
        let e = self.linear.entry(b).or_insert(0);
        *e = (*e + c) % 8;
        if *e == 0 {
            self.linear.remove(&b);
        }
    }

    fn add_quadratic(&mut self, b: usize, c: usize, x: u8) {
        let e = self.quadratic.entry((b, c)).or_insert(0);
        *e = (*e + x) % 4;
        if *e == 0 {
            self.quadratic.remove(&(b, c));
        }
    }

    fn toggle_cubic(&mut self, key: (usize, usize, usize)) {
        if !self.cubic.remove(&key) {
            self.cubic.insert(key);
        }
    }

    /// Phase exponent at the point whose coordinates are the bits of `z`.
    pub fn eval(&self, z: usize) -> u8 {
        let on = |i: usize| z >> i & 1 == 1;
        let mut acc = 0u32;
        for &(b, c, d) in &self.cubic {
            if on(b) && on(c) && on(d) {
                acc += 4;
            }
        }
        for (&(b, c), &x) in &self.quadratic {
            if on(b) && on(c) {
                acc += 2 * x as u32;
            }
        }
        for (&b, &x) in &self.linear {
            if on(b) {
                acc += x as u32;
            }
        }
        (acc % 8) as u8
    }

    /// Product of the two diagonal gates.
    pub fn compose(&self, other: &PhasePolynomial8) -> PhasePolynomial8 {
        let mut out = self.clone();
        out.m = self.m.max(other.m);
        for &k in &other.cubic {
            out.toggle_cubic(k);
        }
        for (&(b, c), &x) in &other.quadratic {
            out.add_quadratic(b, c, x);
        }
        for (&b, &x) in &other.linear {
            out.add_linear(b, x);
        }
        out
    }

    pub fn inverse(&self) -> PhasePolynomial8 {
        PhasePolynomial8 {
            m: self.m,
            cubic: self.cubic.clone(),
            quadratic: self.quadratic.iter().map(|(&k, &x)| (k, (4 - x) % 4)).filter(|&(_, x)| x != 0).collect(),
            linear: self.linear.iter().map(|(&k, &x)| (k, (8 - x) % 8)).filter(|&(_, x)| x != 0).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.cubic.is_empty() && self.quadratic.is_empty() && self.linear.is_empty()
    }
}

/// Phase of `∏_v exp(iπ/8 (1 - Z(v)))` over the rows `v` of `vset`.
pub fn t_phase_from_set(vset: &BitMatrix) -> PhasePolynomial8 {
    let mut out = PhasePolynomial8::identity(vset.ncols());
    for row in vset.rows() {
        let ones: Vec<usize> = row.iter_ones().collect();
        for (i, &b) in ones.iter().enumerate() {
            out.add_linear(b, 1);
            for (j, &c) in ones.iter().enumerate().skip(i + 1) {
                out.add_quadratic(b, c, 3);
                for &d in &ones[j + 1..] {
                    out.toggle_cubic((b, c, d));
                }
            }
        }
    }
    out
}

/// The diagonal Clifford that, applied after the T layer over the columns
/// of `g`, leaves `T` on every odd-weight row and nothing on even rows.
pub fn correction_sg(g: &BitMatrix) -> Result<PhasePolynomial8> {
    let rows = g.rows();
    for a in 0..rows.len() {
        for b in a + 1..rows.len() {
            let ab = rows[a].and(&rows[b]);
            if !ab.weight().is_multiple_of(2) || rows[b + 1..].iter().any(|c| !ab.overlap(c).is_multiple_of(2)) {
                return Err(Error::NotTriorthogonal);
            }
        }
    }
    let mut out = PhasePolynomial8::identity(g.nrows());
    for (b, rb) in rows.iter().enumerate() {
        let w = rb.weight();
        out.add_linear(b, ((8 - (w - w % 2) % 8) % 8) as u8);
        for (c, rc) in rows.iter().enumerate().skip(b + 1) {
            out.add_quadratic(b, c, (rb.overlap(rc) % 4) as u8);
        }
    }
    Ok(out)
}

/// Checks `x mod 2 = 2x³ + x² - 2x mod 8` and `x mod 2 = x² mod 4`.
pub fn mod8_identity_check() -> bool {
    let cubic = (0i64..8).all(|x| x % 2 == (2 * x * x * x + x * x - 2 * x).rem_euclid(8));
    let square = (0i64..4).all(|x| x % 2 == (x * x) % 4);
    cubic && square
}
