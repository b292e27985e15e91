//! Triorthogonal spaces, descendant codes and the indicator-polynomial
//! correspondence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2core::{rref, BitMatrix, BitVector, EchelonBasis};
use crate::rmpoly::RMPolynomial;

/// Every triple of basis rows (with repeats) has even triple overlap.
pub fn is_triorthogonal_space(h: &BitMatrix) -> bool {
    let rows = h.rows();
    for a in 0..rows.len() {
        if !rows[a].weight().is_multiple_of(2) {
            return false;
        }
        for b in a..rows.len() {
            let ab = rows[a].and(&rows[b]);
            if !ab.weight().is_multiple_of(2) {
                return false;
            }
            if rows[b..].iter().any(|c| !ab.overlap(c).is_multiple_of(2)) {
                return false;
            }
        }
    }
    true
}

/// Pair and triple overlaps of distinct rows are even, `g1` rows have odd
/// weight and `g0` rows even weight.
pub fn verify_triorthogonal_matrix(g1: &BitMatrix, g0: &BitMatrix) -> bool {
    if g1.nrows() > 0 && g0.nrows() > 0 && g1.ncols() != g0.ncols() {
        return false;
    }
    if g1.rows().iter().any(|r| r.weight() % 2 != 1) || g0.rows().iter().any(|r| r.weight() % 2 != 0) {
        return false;
    }
    let rows: Vec<&BitVector> = g1.rows().iter().chain(g0.rows()).collect();
    for a in 0..rows.len() {
        for b in a + 1..rows.len() {
            let ab = rows[a].and(rows[b]);
            if !ab.weight().is_multiple_of(2) {
                return false;
            }
            if rows[b + 1..].iter().any(|c| !ab.overlap(c).is_multiple_of(2)) {
                return false;
            }
        }
    }
    true
}

/// A triorthogonal subspace held by a full-rank generator matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriorthogonalSpace {
    gen: BitMatrix,
    unital: bool,
}

impl TriorthogonalSpace {
    /// Reduces `gen` to a basis and checks triorthogonality.
    pub fn new(gen: BitMatrix) -> Result<Self> {
        let basis = gen.row_basis();
        if !is_triorthogonal_space(&basis) {
            return Err(Error::NotTriorthogonal);
        }
        let unital = basis.ncols() > 0 && basis.contains_in_span(&BitVector::ones(basis.ncols()));
        Ok(Self { gen: basis, unital })
    }

    pub fn gen(&self) -> &BitMatrix {
        &self.gen
    }

    pub fn r(&self) -> usize {
        self.gen.nrows()
    }

    pub fn c(&self) -> usize {
        self.gen.ncols()
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    /// Basis whose first row is the all-one vector.
    pub fn unital_basis(&self) -> Result<BitMatrix> {
        if !self.unital {
            return Err(Error::NotUnital);
        }
        let ones = BitVector::ones(self.c());
        let mut basis = EchelonBasis::new();
        basis.insert(&ones);
        let mut out = BitMatrix::new(self.c());
        out.push_row(ones)?;
        for row in self.gen.rows() {
            if basis.insert(row) {
                out.push_row(row.clone())?;
            }
        }
        Ok(out)
    }

    /// Rank of the restriction of the space to `coords`.
    pub fn restriction_rank(&self, coords: &[usize]) -> Result<usize> {
        Ok(self.gen.select_columns(coords)?.rank())
    }

    /// Same space up to column permutation, compared by sorted columns of
    /// the reduced basis.
    pub fn canonical_columns(&self) -> Vec<BitVector> {
        let mut cols: Vec<BitVector> = (0..self.c()).map(|j| self.gen.column(j)).collect();
        cols.sort();
        cols
    }
}

/// Parity of `n + k` for a descendant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl std::str::FromStr for Parity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            other => Err(Error::Parse { line: 0, message: format!("unknown parity {other:?}") }),
        }
    }
}

/// Puncture data recorded on a descendant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Origin {
    pub space: TriorthogonalSpace,
    pub puncture: Vec<usize>,
    pub distinguished: Option<usize>,
}

/// A triorthogonal matrix split into odd rows `g1` and even rows `g0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescendantCode {
    g1: BitMatrix,
    g0: BitMatrix,
    parity: Parity,
    origin: Option<Origin>,
}

impl DescendantCode {
    /// Validates the matrix conditions; dependent `g0` rows are reduced to a basis.
    pub fn new(g1: BitMatrix, g0: BitMatrix) -> Result<Self> {
        let n = if g1.nrows() > 0 { g1.ncols() } else { g0.ncols() };
        let g0 = match g0.nrows() {
            0 => BitMatrix::new(n),
            rows if g0.rank() < rows => g0.row_basis(),
            _ => g0,
        };
        let g1 = if g1.nrows() == 0 { BitMatrix::new(n) } else { g1 };
        if g1.ncols() != g0.ncols() {
            return Err(Error::LengthMismatch { expected: g1.ncols(), found: g0.ncols() });
        }
        if !verify_triorthogonal_matrix(&g1, &g0) {
            return Err(Error::NotTriorthogonal);
        }
        let parity = if (n + g1.nrows()) % 2 == 0 { Parity::Even } else { Parity::Odd };
        Ok(Self { g1, g0, parity, origin: None })
    }

    pub fn g1(&self) -> &BitMatrix {
        &self.g1
    }

    pub fn g0(&self) -> &BitMatrix {
        &self.g0
    }

    pub fn n(&self) -> usize {
        self.g1.ncols()
    }

    pub fn k(&self) -> usize {
        self.g1.nrows()
    }

    pub fn g0_rows(&self) -> usize {
        self.g0.nrows()
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn origin(&self) -> Option<&Origin> {
        self.origin.as_ref()
    }

    /// `[G1; G0]`.
    pub fn stacked(&self) -> BitMatrix {
        self.g1.vstack(&self.g0).expect("same width")
    }

    /// Basis of the Z-stabilizer space, the kernel of `[G1; G0]`.
    pub fn z_stabilizers(&self) -> BitMatrix {
        crate::f2core::kernel_basis(&self.stacked())
    }

    /// Code file text: G1 rows, a `---` line, G0 rows.
    pub fn to_text(&self) -> String {
        format!("{}---\n{}", self.g1.to_text(), self.g0.to_text())
    }

    pub fn to_json(&self) -> CodeJson {
        CodeJson {
            n: self.n(),
            k: self.k(),
            parity: self.parity,
            g1: self.g1.to_strings(),
            g0: self.g0.to_strings(),
        }
    }

    /// Reads either the text format or the JSON format.
    pub fn parse(input: &str) -> Result<Self> {
        if input.trim_start().starts_with('{') {
            let json: CodeJson = serde_json::from_str(input).map_err(|e| Error::Parse {
                line: e.line(),
                message: e.to_string(),
            })?;
            return json.into_code();
        }
        let lines: Vec<&str> = input.lines().collect();
        let sep = lines.iter().position(|l| l.trim() == "---").ok_or(Error::Parse {
            line: lines.len().max(1),
            message: "missing '---' separator".into(),
        })?;
        let (g1, _) = BitMatrix::parse_block(lines[..sep].iter().copied().enumerate())?;
        let (g0, _) = BitMatrix::parse_block(lines.iter().copied().enumerate().skip(sep + 1))?;
        let n = g1.ncols().max(g0.ncols());
        let g1 = if g1.nrows() == 0 { BitMatrix::new(n) } else { g1 };
        let g0 = if g0.nrows() == 0 { BitMatrix::new(n) } else { g0 };
        if g1.ncols() != g0.ncols() {
            return Err(Error::Parse {
                line: sep + 2,
                message: format!("G0 has {} columns, G1 has {}", g0.ncols(), g1.ncols()),
            });
        }
        Self::new(g1, g0)
    }
}

/// JSON form of a code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeJson {
    pub n: usize,
    pub k: usize,
    pub parity: Parity,
    pub g1: Vec<String>,
    pub g0: Vec<String>,
}

impl CodeJson {
    pub fn into_code(self) -> Result<DescendantCode> {
        let parse_rows = |rows: &[String]| -> Result<BitMatrix> {
            let mut m = BitMatrix::new(self.n);
            for (i, r) in rows.iter().enumerate() {
                let v = BitVector::parse_bits(r).map_err(|_| Error::Parse { line: i + 1, message: format!("bad row {r:?}") })?;
                m.push_row(v).map_err(|_| Error::Parse { line: i + 1, message: "row length differs from n".into() })?;
            }
            Ok(m)
        };
        let g1 = parse_rows(&self.g1)?;
        let g0 = parse_rows(&self.g0)?;
        if g1.nrows() != self.k {
            return Err(Error::Parse { line: 0, message: format!("k = {} but {} G1 rows", self.k, g1.nrows()) });
        }
        let code = DescendantCode::new(g1, g0)?;
        if code.parity != self.parity {
            return Err(Error::Parse { line: 0, message: "parity field disagrees with n + k".into() });
        }
        Ok(code)
    }
}

/// Generator `[1; x]` over the support of `p`, without checking triorthogonality.
pub fn indicator_matrix(p: &RMPolynomial) -> Result<BitMatrix> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if let Some(u) = p.linear_factor()? {
        return Err(Error::LinearFactor(u.to_string()));
    }
    let support = p.support();
    let mut h = BitMatrix::zeros(p.m() + 1, support.len());
    for (j, &x) in support.iter().enumerate() {
        h.set(0, j, true);
        for i in 0..p.m() {
            if x >> i & 1 == 1 {
                h.set(i + 1, j, true);
            }
        }
    }
    Ok(h)
}

/// The space whose generator columns are `(1, x)` for `p(x) = 1`.
pub fn indicator_to_generator(p: &RMPolynomial) -> Result<TriorthogonalSpace> {
    let h = indicator_matrix(p)?;
    if !is_triorthogonal_space(&h) {
        return Err(Error::NotTriorthogonal);
    }
    Ok(TriorthogonalSpace { unital: true, gen: h })
}

/// Reads the indicator polynomial off a generator with all-one first row.
pub fn generator_to_indicator(h: &BitMatrix) -> Result<RMPolynomial> {
    if h.nrows() == 0 || *h.row(0) != BitVector::ones(h.ncols()) {
        return Err(Error::FirstRowNotAllOne);
    }
    let m = h.nrows() - 1;
    let mut points = Vec::with_capacity(h.ncols());
    let mut seen = std::collections::HashSet::new();
    for j in 0..h.ncols() {
        let x = (0..m).filter(|&i| h.get(i + 1, j)).fold(0usize, |acc, i| acc | 1 << i);
        if !seen.insert(x) {
            return Err(Error::RepeatedColumn(j));
        }
        points.push(x);
    }
    RMPolynomial::from_support(m, points)
}

fn check_puncture(s: &TriorthogonalSpace, puncture: &[usize]) -> Result<Vec<usize>> {
    let mut sorted = puncture.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != puncture.len() {
        return Err(Error::OutOfRange("repeated coordinate in puncture set".into()));
    }
    if let Some(&bad) = sorted.iter().find(|&&i| i >= s.c()) {
        return Err(Error::IndexOutOfRange { index: bad, len: s.c() });
    }
    if !s.is_unital() {
        return Err(Error::NotUnital);
    }
    if s.restriction_rank(&sorted)? != sorted.len() {
        return Err(Error::RankDeficient);
    }
    Ok(sorted)
}

fn complement(c: usize, sorted: &[usize]) -> Vec<usize> {
    (0..c).filter(|i| sorted.binary_search(i).is_err()).collect()
}

/// Even descendant with `k = |P|`, `n = c - |P|`.
pub fn even_descendant(s: &TriorthogonalSpace, puncture: &[usize]) -> Result<DescendantCode> {
    let p = puncture.len();
    if 2 * p >= s.c() {
        return Err(Error::PunctureTooLarge { p, c: s.c() });
    }
    let sorted = check_puncture(s, puncture)?;
    let rest = complement(s.c(), &sorted);
    let order: Vec<usize> = sorted.iter().chain(&rest).copied().collect();
    let reduced = rref(&s.gen().select_columns(&order)?).reduced;
    let rest_cols: Vec<usize> = (p..s.c()).collect();
    let body = reduced.select_columns(&rest_cols)?;
    let g1 = body.select_rows(&(0..p).collect::<Vec<_>>());
    let g0 = body.select_rows(&(p..s.r()).collect::<Vec<_>>());
    let mut code = DescendantCode::new(g1, g0)?;
    code.origin = Some(Origin { space: s.clone(), puncture: sorted, distinguished: None });
    Ok(code)
}

/// Odd descendant with `k = |P| - 1`, `n = c - |P|`, distinguished `j ∈ P`.
pub fn odd_descendant(s: &TriorthogonalSpace, puncture: &[usize], j: usize) -> Result<DescendantCode> {
    let p = puncture.len();
    if 2 * p > s.c() {
        return Err(Error::PunctureTooLarge { p, c: s.c() });
    }
    if !puncture.contains(&j) {
        return Err(Error::NotInPunctureSet(j));
    }
    let sorted = check_puncture(s, puncture)?;
    let rest = complement(s.c(), &sorted);
    let others: Vec<usize> = sorted.iter().copied().filter(|&i| i != j).collect();
    let ones = BitVector::ones(s.c());
    let basis = s.unital_basis()?;
    let mut lower = BitMatrix::new(s.c());
    for row in &basis.rows()[1..] {
        let row = if row.get(j) { row.xor(&ones) } else { row.clone() };
        lower.push_row(row)?;
    }
    let order: Vec<usize> = others.iter().chain(&rest).copied().collect();
    let reduced = rref(&lower.select_columns(&order)?).reduced;
    let k = p - 1;
    let body = reduced.select_columns(&(k..order.len()).collect::<Vec<_>>())?;
    let g1 = body.select_rows(&(0..k).collect::<Vec<_>>());
    let g0 = body.select_rows(&(k..lower.nrows()).collect::<Vec<_>>());
    let mut code = DescendantCode::new(g1, g0)?;
    code.origin = Some(Origin { space: s.clone(), puncture: sorted, distinguished: Some(j) });
    Ok(code)
}

/// The unital parent of a triorthogonal matrix.
pub fn unitalize(code: &DescendantCode) -> Result<TriorthogonalSpace> {
    let (n, k) = (code.n(), code.k());
    let parent = match code.parity() {
        Parity::Odd => {
            let mut parent = BitMatrix::new(n + k + 1);
            parent.push_row(BitVector::ones(n + k + 1))?;
            for (i, row) in code.g1().rows().iter().enumerate() {
                parent.push_row(BitVector::unit(k + 1, 1 + i).concat(row))?;
            }
            for row in code.g0().rows() {
                parent.push_row(BitVector::zeros(k + 1).concat(row))?;
            }
            parent
        }
        Parity::Even => {
            let mut v = BitVector::ones(n);
            for row in code.g1().rows() {
                v.xor_assign(row);
            }
            let mut g0 = code.g0().clone();
            if !v.is_zero() && !g0.contains_in_span(&v) {
                g0.push_row(v)?;
            }
            let mut parent = BitMatrix::new(n + k);
            for (i, row) in code.g1().rows().iter().enumerate() {
                parent.push_row(BitVector::unit(k, i).concat(row))?;
            }
            for row in g0.rows() {
                parent.push_row(BitVector::zeros(k).concat(row))?;
            }
            parent
        }
    };
    TriorthogonalSpace::new(parent)
}

/// The rank bound on `G0` for codes with Z distance at least 2.
pub fn rank_g0_check(code: &DescendantCode) -> Result<bool> {
    if code.k() == 0 {
        return Ok(true);
    }
    let d = crate::distance::z_distance(code, 1)?;
    if d.exact && d.value == Some(1) {
        return Ok(true);
    }
    let r = match code.origin() {
        Some(o) => o.space.r(),
        None => unitalize(code)?.r(),
    };
    let rank = code.g0().rank();
    let bound = if r % 2 == 0 { 4 } else { 3 };
    Ok(rank >= bound)
}
