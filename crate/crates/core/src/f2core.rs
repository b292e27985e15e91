//! Dense linear algebra over F2 on bit-packed rows.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length vector over F2 packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self { len, words: vec![u64::MAX; words_for(len)] };
        v.clear_tail();
        v
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v = Self::zeros(len);
        for i in ones {
            if i >= len {
                return Err(Error::IndexOutOfRange { index: i, len });
            }
            v.set(i, true);
        }
        Ok(v)
    }

    /// Builds a vector from raw words; bits past `len` are discarded.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut v = Self { len, words };
        v.clear_tail();
        v
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product over F2, returned as the integer 0 or 1.
    pub fn dot(&self, other: &BitVector) -> u8 {
        debug_assert_eq!(self.len, other.len);
        let ones: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum();
        (ones & 1) as u8
    }

    /// Number of coordinates where both vectors are 1.
    pub fn overlap(&self, other: &BitVector) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut v = self.clone();
        v.xor_assign(other);
        v
    }

    pub fn and(&self, other: &BitVector) -> BitVector {
        debug_assert_eq!(self.len, other.len);
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        BitVector { len: self.len, words }
    }

    pub fn not(&self) -> BitVector {
        let mut v = BitVector { len: self.len, words: self.words.iter().map(|w| !w).collect() };
        v.clear_tail();
        v
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + t)
                }
            })
        })
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut v = BitVector::zeros(self.len + other.len);
        for i in self.iter_ones() {
            v.set(i, true);
        }
        for i in other.iter_ones() {
            v.set(self.len + i, true);
        }
        v
    }

    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    pub fn parse_bits(s: &str) -> Result<Self> {
        let mut bits = Vec::new();
        for ch in s.chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                c if c.is_whitespace() => {}
                c => return Err(Error::Parse { line: 1, message: format!("unexpected character {c:?}") }),
            }
        }
        Ok(Self::from_bools(&bits))
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({})", self.to_bit_string())
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

/// Returns `v` restricted to `coords`, in the given order.
pub fn restrict(v: &BitVector, coords: &[usize]) -> Result<BitVector> {
    let mut out = BitVector::zeros(coords.len());
    for (k, &c) in coords.iter().enumerate() {
        if c >= v.len() {
            return Err(Error::IndexOutOfRange { index: c, len: v.len() });
        }
        if v.get(c) {
            out.set(k, true);
        }
    }
    Ok(out)
}

/// Row-major dense matrix over F2.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

/// Output of [`rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: BitMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub transform: BitMatrix,
}

impl BitMatrix {
    pub fn new(cols: usize) -> Self {
        Self { cols, rows: Vec::new() }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { cols, rows: vec![BitVector::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        Self { cols: n, rows: (0..n).map(|i| BitVector::unit(n, i)).collect() }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch { expected: cols, found: bad.len() });
        }
        Ok(Self { cols, rows })
    }

    /// Builds a matrix from rows of '0'/'1' strings.
    pub fn from_strs(rows: &[&str]) -> Result<Self> {
        let parsed: Vec<BitVector> = rows.iter().map(|s| BitVector::parse_bits(s)).collect::<Result<_>>()?;
        let cols = parsed.first().map_or(0, |r| r.len());
        Self::from_rows(cols, parsed)
    }

    pub fn push_row(&mut self, row: BitVector) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::LengthMismatch { expected: self.cols, found: row.len() });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut BitVector {
        &mut self.rows[i]
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn column(&self, c: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            if row.get(c) {
                v.set(i, true);
            }
        }
        v
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.iter_ones() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.nrows() {
            return Err(Error::LengthMismatch { expected: self.cols, found: other.nrows() });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = BitVector::zeros(other.cols);
                for k in row.iter_ones() {
                    acc.xor_assign(&other.rows[k]);
                }
                acc
            })
            .collect();
        Ok(BitMatrix { cols: other.cols, rows })
    }

    /// The vector of inner products of each row with `v`.
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(v) == 1 {
                out.set(i, true);
            }
        }
        out
    }

    /// Left multiplication `vᵀ · self`: the sum of rows selected by `v`.
    pub fn combine(&self, v: &BitVector) -> BitVector {
        let mut acc = BitVector::zeros(self.cols);
        for i in v.iter_ones() {
            acc.xor_assign(&self.rows[i]);
        }
        acc
    }

    pub fn select_columns(&self, cols: &[usize]) -> Result<BitMatrix> {
        let rows = self.rows.iter().map(|r| restrict(r, cols)).collect::<Result<Vec<_>>>()?;
        Ok(BitMatrix { cols: cols.len(), rows })
    }

    pub fn select_rows(&self, rows: &[usize]) -> BitMatrix {
        BitMatrix { cols: self.cols, rows: rows.iter().map(|&i| self.rows[i].clone()).collect() }
    }

    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols && !(self.rows.is_empty() || other.rows.is_empty()) {
            return Err(Error::LengthMismatch { expected: self.cols, found: other.cols });
        }
        let cols = if self.rows.is_empty() { other.cols } else { self.cols };
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(BitMatrix { cols, rows })
    }

    pub fn rank(&self) -> usize {
        let mut basis: Vec<BitVector> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        for row in &self.rows {
            let mut v = row.clone();
            for (b, &p) in basis.iter().zip(&pivots) {
                if v.get(p) {
                    v.xor_assign(b);
                }
            }
            if let Some(p) = v.first_one() {
                basis.push(v);
                pivots.push(p);
            }
        }
        basis.len()
    }

    pub fn rref(&self) -> Rref {
        rref(self)
    }

    /// Independent rows spanning the same space, in echelon order.
    pub fn row_basis(&self) -> BitMatrix {
        let r = rref(self);
        BitMatrix { cols: self.cols, rows: r.reduced.rows[..r.rank].to_vec() }
    }

    pub fn contains_in_span(&self, v: &BitVector) -> bool {
        let mut ext = self.clone();
        ext.rows.push(v.clone());
        ext.rank() == self.rank()
    }

    /// Parses the text matrix format: rows of '0'/'1' with optional
    /// whitespace, ending at the first blank line after content.
    pub fn parse_text(text: &str) -> Result<BitMatrix> {
        let (m, _) = Self::parse_block(text.lines().enumerate())?;
        Ok(m)
    }

    pub(crate) fn parse_block<'a>(
        lines: impl Iterator<Item = (usize, &'a str)>,
    ) -> Result<(BitMatrix, Option<usize>)> {
        let mut rows = Vec::new();
        let mut cols: Option<usize> = None;
        for (idx, line) in lines {
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                if rows.is_empty() {
                    continue;
                }
                return Ok((Self { cols: cols.unwrap_or(0), rows }, Some(line_no)));
            }
            let row = BitVector::parse_bits(trimmed).map_err(|e| match e {
                Error::Parse { message, .. } => Error::Parse { line: line_no, message },
                other => other,
            })?;
            match cols {
                None => cols = Some(row.len()),
                Some(c) if c != row.len() => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("row has {} entries, expected {c}", row.len()),
                    })
                }
                _ => {}
            }
            rows.push(row);
        }
        Ok((Self { cols: cols.unwrap_or(0), rows }, None))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for row in &self.rows {
            s.push_str(&row.to_bit_string());
            s.push('\n');
        }
        s
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.rows.iter().map(|r| r.to_bit_string()).collect()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

/// Reduced row echelon form with the row-operation transform.
///
/// Pivots are chosen leftmost column first, topmost remaining row first.
pub fn rref(m: &BitMatrix) -> Rref {
    let n = m.nrows();
    let mut a = m.clone();
    let mut t = BitMatrix::identity(n);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m.ncols() {
        if r == n {
            break;
        }
        let Some(p) = (r..n).find(|&i| a.rows[i].get(c)) else { continue };
        a.rows.swap(r, p);
        t.rows.swap(r, p);
        let (pivot_row, pivot_t) = (a.rows[r].clone(), t.rows[r].clone());
        for i in 0..n {
            if i != r && a.rows[i].get(c) {
                a.rows[i].xor_assign(&pivot_row);
                t.rows[i].xor_assign(&pivot_t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref { reduced: a, rank: r, pivots, transform: t }
}

/// Basis of `{x : m·xᵀ = 0}`.
pub fn kernel_basis(m: &BitMatrix) -> BitMatrix {
    let r = rref(m);
    let cols = m.ncols();
    let mut is_pivot = vec![false; cols];
    for &p in &r.pivots {
        is_pivot[p] = true;
    }
    let mut out = BitMatrix::new(cols);
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = BitVector::unit(cols, free);
        for (i, &p) in r.pivots.iter().enumerate() {
            if r.reduced.rows[i].get(free) {
                v.set(p, true);
            }
        }
        out.rows.push(v);
    }
    out
}

/// Incremental echelon basis used for span membership and reduction.
#[derive(Clone, Debug, Default)]
pub struct EchelonBasis {
    rows: Vec<BitVector>,
    pivots: Vec<usize>,
}

impl EchelonBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let mut v = v.clone();
        for (b, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(b);
            }
        }
        v
    }

    /// Inserts `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: &BitVector) -> bool {
        let v = self.reduce(v);
        match v.first_one() {
            Some(p) => {
                self.rows.push(v);
                self.pivots.push(p);
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }
}
