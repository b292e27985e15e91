//! Boolean functions as Reed–Muller polynomials.
//!
//! Variable `x_i` (1-based) is bit `i-1` of the truth-table index, and a
//! monomial is stored as the bitmask of its variables.

mod affine;
mod equivalence;
mod minimize;

use std::fmt;

pub use affine::AffineMap;
pub use equivalence::{affine_equivalence, are_affine_equivalent, Equivalence, EquivalenceSearch};
pub use minimize::{minimize_monomials, minimize_monomials_with_map};

use crate::error::{Error, Result};
use crate::f2core::BitVector;

/// Largest supported variable count.
pub const MAX_VARS: usize = 20;

/// In-place binary Möbius transform on a packed table of length `2^m`.
pub(crate) fn moebius(words: &mut [u64], m: usize) {
    const MASKS: [u64; 6] = [
        0x5555_5555_5555_5555,
        0x3333_3333_3333_3333,
        0x0F0F_0F0F_0F0F_0F0F,
        0x00FF_00FF_00FF_00FF,
        0x0000_FFFF_0000_FFFF,
        0x0000_0000_FFFF_FFFF,
    ];
    for (i, mask) in MASKS.iter().enumerate().take(m.min(6)) {
        let s = 1 << i;
        for w in words.iter_mut() {
            *w ^= (*w & mask) << s;
        }
    }
    for i in 6..m {
        let stride = 1usize << (i - 6);
        for block in words.chunks_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (h, l) in hi.iter_mut().zip(lo.iter()) {
                *h ^= *l;
            }
        }
    }
}

/// A Boolean function on `m` variables, kept both as ANF and truth table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RMPolynomial {
    m: usize,
    anf: BitVector,
    truth: BitVector,
}

impl RMPolynomial {
    pub fn zero(m: usize) -> Self {
        Self { m, anf: BitVector::zeros(1 << m), truth: BitVector::zeros(1 << m) }
    }

    pub fn one(m: usize) -> Self {
        Self::from_monomials(m, &[0])
    }

    /// The variable `x_i`, 1-based.
    pub fn var(m: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= m, "variable x{i} outside 1..={m}");
        Self::from_monomials(m, &[1 << (i - 1)])
    }

    /// Sum of monomials given as variable bitmasks; repeated masks cancel.
    pub fn from_monomials(m: usize, monomials: &[u32]) -> Self {
        let mut anf = BitVector::zeros(1 << m);
        for &mono in monomials {
            assert!((mono as usize) < (1 << m), "monomial uses variables beyond x{m}");
            anf.flip(mono as usize);
        }
        Self::from_anf(anf, m)
    }

    fn from_anf(anf: BitVector, m: usize) -> Self {
        let mut words = anf.words().to_vec();
        moebius(&mut words, m);
        let truth = BitVector::from_words(1 << m, words);
        Self { m, anf, truth }
    }

    /// Inverse of [`RMPolynomial::truth_table`].
    pub fn from_truth(truth: BitVector, m: usize) -> Result<Self> {
        if m > MAX_VARS {
            return Err(Error::OutOfRange(format!("{m} variables")));
        }
        if truth.len() != 1 << m {
            return Err(Error::LengthMismatch { expected: 1 << m, found: truth.len() });
        }
        let mut words = truth.words().to_vec();
        moebius(&mut words, m);
        let anf = BitVector::from_words(1 << m, words);
        Ok(Self { m, anf, truth })
    }

    /// Builds a polynomial on at most six variables from a 64-bit table.
    pub fn from_u64(table: u64, m: usize) -> Self {
        debug_assert!(m <= 6);
        Self::from_truth(BitVector::from_words(1 << m, vec![table]), m).expect("valid length")
    }

    /// Polynomial whose support is the given set of points.
    pub fn from_support(m: usize, points: impl IntoIterator<Item = usize>) -> Result<Self> {
        Self::from_truth(BitVector::from_indices(1 << m, points)?, m)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn truth_table(&self) -> &BitVector {
        &self.truth
    }

    pub fn anf(&self) -> &BitVector {
        &self.anf
    }

    /// The low word of the truth table; the whole table when `m <= 6`.
    pub fn table_u64(&self) -> u64 {
        self.truth.words()[0]
    }

    pub fn eval(&self, x: usize) -> bool {
        self.truth.get(x)
    }

    pub fn is_zero(&self) -> bool {
        self.anf.is_zero()
    }

    pub fn weight(&self) -> usize {
        self.truth.weight()
    }

    pub fn degree(&self) -> usize {
        self.anf.iter_ones().map(|s| s.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn monomials(&self) -> Vec<u32> {
        self.anf.iter_ones().map(|s| s as u32).collect()
    }

    pub fn num_monomials(&self) -> usize {
        self.anf.weight()
    }

    pub fn support(&self) -> Vec<usize> {
        self.truth.iter_ones().collect()
    }

    pub fn add(&self, other: &RMPolynomial) -> RMPolynomial {
        assert_eq!(self.m, other.m);
        Self { m: self.m, anf: self.anf.xor(&other.anf), truth: self.truth.xor(&other.truth) }
    }

    pub fn mul(&self, other: &RMPolynomial) -> RMPolynomial {
        assert_eq!(self.m, other.m);
        Self::from_truth(self.truth.and(&other.truth), self.m).expect("same length")
    }

    /// Re-embeds the polynomial into `m` variables (`m` at least the current count).
    pub fn extend_vars(&self, m: usize) -> RMPolynomial {
        assert!(m >= self.m);
        Self::from_monomials(m, &self.monomials())
    }

    /// `g(v) = p(L v + ell)`.
    pub fn apply_affine(&self, a: &AffineMap) -> Result<RMPolynomial> {
        if a.m() != self.m {
            return Err(Error::LengthMismatch { expected: self.m, found: a.m() });
        }
        Ok(self.pull_back(|v| a.apply_point(v)))
    }

    pub(crate) fn pull_back(&self, map: impl Fn(usize) -> usize) -> RMPolynomial {
        let n = 1usize << self.m;
        let mut t = BitVector::zeros(n);
        for v in 0..n {
            if self.truth.get(map(v)) {
                t.set(v, true);
            }
        }
        Self::from_truth(t, self.m).expect("same length")
    }

    /// `p(x + e)`.
    pub fn translate(&self, e: usize) -> RMPolynomial {
        self.pull_back(|v| v ^ e)
    }

    /// `p(x) + p(x + e)`.
    pub fn derivative(&self, e: usize) -> RMPolynomial {
        self.add(&self.translate(e))
    }

    /// Weight of the derivative in direction `e`, without building it.
    pub fn derivative_weight(&self, e: usize) -> usize {
        let n = 1usize << self.m;
        if n <= 64 {
            let t = self.table_u64();
            return (t ^ permute_xor_u64(t, e, self.m)).count_ones() as usize;
        }
        (0..n).filter(|&v| self.truth.get(v) != self.truth.get(v ^ e)).count()
    }

    /// Some nonconstant affine `u` with `supp(p) ⊆ {u = 1}`, scanning
    /// linear parts `a = 1, 2, …` and constant 0 before 1.
    pub fn linear_factor(&self) -> Result<Option<RMPolynomial>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let support = self.support();
        for a in 1..(1usize << self.m) {
            let first = (a & support[0]).count_ones() & 1;
            if support.iter().all(|&x| (a & x).count_ones() & 1 == first) {
                // u(x) = a·x + b with u = 1 on the support.
                let b = 1 ^ first as usize;
                let mut monos: Vec<u32> =
                    (0..self.m).filter(|i| a >> i & 1 == 1).map(|i| 1u32 << i).collect();
                if b == 1 {
                    monos.push(0);
                }
                return Ok(Some(Self::from_monomials(self.m, &monos)));
            }
        }
        Ok(None)
    }

    /// Dimension of the affine hull of the support, with an affine basis
    /// `(origin, directions)` of it. Zero polynomial has no hull.
    pub fn affine_hull(&self) -> Option<(usize, Vec<usize>)> {
        let support = self.support();
        let &origin = support.first()?;
        let mut basis: Vec<usize> = Vec::new();
        let mut reduced: Vec<usize> = Vec::new();
        for &x in &support[1..] {
            let d = x ^ origin;
            let mut r = d;
            for &b in &reduced {
                r = r.min(r ^ b);
            }
            if r != 0 {
                basis.push(d);
                reduced.push(r);
                reduced.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        Some((origin, basis))
    }

    /// Removes every linear factor by restricting the polynomial to the
    /// affine hull of its support, expressed in hull coordinates.
    pub fn strip_linear_factors(&self) -> Result<RMPolynomial> {
        let (origin, dirs) = self.affine_hull().ok_or(Error::ZeroPolynomial)?;
        let d = dirs.len();
        Ok(RMPolynomial::zero(d).pull_back_from(self, |y| {
            let mut x = origin;
            for (i, &dir) in dirs.iter().enumerate() {
                if y >> i & 1 == 1 {
                    x ^= dir;
                }
            }
            x
        }))
    }

    fn pull_back_from(&self, src: &RMPolynomial, map: impl Fn(usize) -> usize) -> RMPolynomial {
        let n = 1usize << self.m;
        let mut t = BitVector::zeros(n);
        for y in 0..n {
            if src.truth.get(map(y)) {
                t.set(y, true);
            }
        }
        Self::from_truth(t, self.m).expect("same length")
    }

    /// Affine invariants plus a heuristic monomial count.
    pub fn affine_fingerprint(&self) -> Fingerprint {
        let mut derivative_weights: Vec<usize> =
            (1..(1usize << self.m)).map(|e| self.derivative_weight(e)).collect();
        derivative_weights.sort_unstable();
        let minimized = minimize_monomials(self, 2_000, 0);
        Fingerprint {
            weight: self.weight(),
            degree: self.degree(),
            derivative_weights,
            min_monomials: minimized.num_monomials(),
        }
    }

    /// Parses `x1*x2 + x3*x4`; `m` defaults to the largest index used.
    pub fn parse(text: &str, m: Option<usize>) -> Result<RMPolynomial> {
        let perr = |message: String| Error::Parse { line: 1, message };
        let mut monos: Vec<u32> = Vec::new();
        let mut max_var = 0usize;
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(perr("empty polynomial".into()));
        }
        for term in compact.split('+') {
            if term.is_empty() {
                return Err(perr("empty term".into()));
            }
            let mut mask = 0u32;
            let mut zero = false;
            for tok in term.split('*') {
                match tok {
                    "1" => {}
                    "0" => zero = true,
                    t if t.starts_with('x') => {
                        let i: usize = t[1..].parse().map_err(|_| perr(format!("bad variable {t:?}")))?;
                        if i == 0 || i > MAX_VARS {
                            return Err(perr(format!("variable index {i} out of range")));
                        }
                        max_var = max_var.max(i);
                        mask |= 1 << (i - 1);
                    }
                    t => return Err(perr(format!("unexpected token {t:?}"))),
                }
            }
            if !zero {
                monos.push(mask);
            }
        }
        let m = match m {
            Some(m) if m < max_var => {
                return Err(perr(format!("uses x{max_var} but only {m} variables declared")))
            }
            Some(m) if m > MAX_VARS => return Err(Error::OutOfRange(format!("{m} variables"))),
            Some(m) => m,
            None => max_var,
        };
        Ok(Self::from_monomials(m, &monos))
    }
}

/// Permutes a table of at most six variables by `x -> x ^ e`.
pub(crate) fn permute_xor_u64(t: u64, e: usize, m: usize) -> u64 {
    const MASKS: [u64; 6] = [
        0x5555_5555_5555_5555,
        0x3333_3333_3333_3333,
        0x0F0F_0F0F_0F0F_0F0F,
        0x00FF_00FF_00FF_00FF,
        0x0000_FFFF_0000_FFFF,
        0x0000_0000_FFFF_FFFF,
    ];
    let mut t = t;
    for (i, mask) in MASKS.iter().enumerate().take(m) {
        if e >> i & 1 == 1 {
            let s = 1 << i;
            t = ((t & mask) << s) | ((t >> s) & mask);
        }
    }
    if m < 6 {
        t &= (1u64 << (1 << m)) - 1;
    }
    t
}

fn format_monomial(mask: u32) -> String {
    if mask == 0 {
        return "1".into();
    }
    (0..32).filter(|i| mask >> i & 1 == 1).map(|i| format!("x{}", i + 1)).collect::<Vec<_>>().join("*")
}

fn monomial_key(mask: u32) -> (bool, Vec<u32>) {
    (mask == 0, (0..32).filter(|i| mask >> i & 1 == 1).collect())
}

impl fmt::Display for RMPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut monos = self.monomials();
        if monos.is_empty() {
            return f.write_str("0");
        }
        monos.sort_by_key(|&m| monomial_key(m));
        let terms: Vec<String> = monos.into_iter().map(format_monomial).collect();
        f.write_str(&terms.join(" + "))
    }
}

impl fmt::Debug for RMPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RMPolynomial(m={}, {})", self.m, self)
    }
}

/// Dedup key for affine classes. The first three fields are invariants;
/// `min_monomials` is advisory.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct Fingerprint {
    pub weight: usize,
    pub degree: usize,
    pub derivative_weights: Vec<usize>,
    pub min_monomials: usize,
}

impl Fingerprint {
    /// The certified part of the fingerprint.
    pub fn invariant_key(&self) -> (usize, usize, &[usize]) {
        (self.weight, self.degree, &self.derivative_weights)
    }
}
