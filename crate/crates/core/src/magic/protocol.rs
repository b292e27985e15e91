use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::forms::{decompose_form, s_phase_from_set, QuadraticFormZ4};
use crate::error::{Error, Result};
use crate::f2core::{BitMatrix, BitVector};
use crate::triortho::DescendantCode;

/// Register size limit for exact simulation.
pub const MAX_REGISTER: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Each S correction is applied right after its T injection.
    Standard,
    /// All S corrections are merged and applied once at the end.
    Delayed,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Variant::Standard),
            "delayed" => Ok(Variant::Delayed),
            other => Err(Error::Parse { line: 0, message: format!("unknown variant {other:?}") }),
        }
    }
}

/// Which injection outcome triggers an S correction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `T` resource states; correct on `t = -1`.
    #[default]
    Minus,
    /// `T†` resource states; correct on `t = +1`.
    Plus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub variant: Variant,
    /// Probability of a Z flip on each input resource state.
    pub noise: f64,
    pub convention: Convention,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolTrace {
    /// `t_ℓ` as `+1` or `-1`.
    pub outcomes: Vec<i8>,
    pub correction_set: Vec<usize>,
    pub w: BitMatrix,
    pub d: BitVector,
    pub s_injection_count: usize,
    pub correction_count: usize,
    pub postselect_pass: bool,
    pub postselect_probability: f64,
    pub output_fidelity: f64,
}

fn mask(v: &BitVector) -> usize {
    v.iter_ones().fold(0, |a, i| a | 1 << i)
}

fn parity(x: usize) -> u8 {
    (x.count_ones() % 2) as u8
}

/// The Z4 form whose S gate cancels the Clifford part of the T layer.
fn correction_form(g: &BitMatrix) -> QuadraticFormZ4 {
    let m = g.nrows();
    let rows = g.rows();
    let mut mat = vec![vec![0u8; m]; m];
    for b in 0..m {
        let w = rows[b].weight();
        mat[b][b] = ((4 - ((w - w % 2) / 2) % 4) % 4) as u8;
        for c in b + 1..m {
            let half = (rows[b].overlap(&rows[c]) / 2 % 2) as u8;
            mat[b][c] = half;
            mat[c][b] = half;
        }
    }
    QuadraticFormZ4::new(mat).expect("symmetric")
}

fn apply_decomposition(phases: &mut [u8], w: &BitMatrix, d: &BitVector) {
    let rows: Vec<usize> = w.rows().iter().map(mask).collect();
    let dm = mask(d);
    for (z, ph) in phases.iter_mut().enumerate() {
        let squares: u32 = rows.iter().map(|&r| parity(r & z) as u32).sum();
        let lin = (dm & z).count_ones();
        *ph = ((*ph as u32 + 2 * squares + 4 * lin) % 8) as u8;
    }
}

/// Final phase exponents (units of π/4) on the `k + g0` register for a
/// fixed outcome record. `minus[ℓ]` is true when `t_ℓ = -1`; `flips[ℓ]`
/// marks a Z error on the `ℓ`-th resource state. Returns the phases, the
/// reduced `(W, D)` and the number of S injections.
pub fn protocol_phases(
    code: &DescendantCode,
    variant: Variant,
    convention: Convention,
    minus: &[bool],
    flips: &[bool],
) -> Result<(Vec<u8>, BitMatrix, BitVector, usize)> {
    let g = code.stacked();
    let m = g.nrows();
    let n = code.n();
    if m > MAX_REGISTER {
        return Err(Error::BudgetExceeded(format!("register of {m} qubits exceeds {MAX_REGISTER}")));
    }
    if minus.len() != n || flips.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: minus.len().min(flips.len()) });
    }
    let cols: Vec<usize> = (0..n).map(|l| mask(&g.column(l))).collect();
    let mut phases = vec![0u8; 1 << m];
    let mut corrected = Vec::new();
    for l in 0..n {
        let base: u8 = if convention == Convention::Minus { 1 } else { 7 };
        let theta = if flips[l] { (base + 4) % 8 } else { base };
        let s = minus[l] as u8;
        let needs = match convention {
            Convention::Minus => minus[l],
            Convention::Plus => !minus[l],
        };
        for (z, ph) in phases.iter_mut().enumerate() {
            let x = parity(cols[l] & z);
            let mut add = theta * (x ^ s);
            if needs && variant == Variant::Standard {
                add += 2 * x;
            }
            *ph = (*ph + add) % 8;
        }
        if needs {
            corrected.push(l);
        }
    }
    let sg = correction_form(&g);
    let form = match variant {
        Variant::Standard => sg,
        Variant::Delayed => {
            let v = BitMatrix::from_rows(m, corrected.iter().map(|&l| g.column(l)).collect())?;
            s_phase_from_set(&v).add(&sg)?
        }
    };
    let (w, d) = decompose_form(&form);
    apply_decomposition(&mut phases, &w, &d);
    let count = match variant {
        Variant::Standard => corrected.len() + w.nrows(),
        Variant::Delayed => w.nrows(),
    };
    Ok((phases, w, d, count))
}

/// Postselection probability and fidelity of the conditional output with
/// the ideal `k`-qubit magic state.
fn postselect(phases: &[u8], k: usize, m: usize) -> (f64, f64) {
    let amp = |ph: u8| Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4 * ph as f64);
    let norm = (1u64 << m) as f64;
    let g0 = m - k;
    let mut overlap = Complex64::new(0.0, 0.0);
    let mut prob = 0.0;
    for z1 in 0..1usize << k {
        let mut psi = Complex64::new(0.0, 0.0);
        for z0 in 0..1usize << g0 {
            psi += amp(phases[z1 | z0 << k]);
        }
        psi /= (norm * (1u64 << g0) as f64).sqrt();
        prob += psi.norm_sqr();
        let ideal = amp(z1.count_ones() as u8) / ((1u64 << k) as f64).sqrt();
        overlap += ideal.conj() * psi;
    }
    let fidelity = if prob > 1e-15 { overlap.norm_sqr() / prob } else { 0.0 };
    (prob, fidelity.min(1.0))
}

/// One shot of the distillation protocol.
pub fn simulate_protocol(code: &DescendantCode, config: &ProtocolConfig, rng: &mut ChaCha8Rng) -> Result<ProtocolTrace> {
    if code.k() == 0 {
        return Err(Error::NoLogicalQubits);
    }
    let n = code.n();
    let mut minus = Vec::with_capacity(n);
    let mut flips = Vec::with_capacity(n);
    for _ in 0..n {
        flips.push(config.noise > 0.0 && rng.gen_bool(config.noise.min(1.0)));
        minus.push(rng.gen_bool(0.5));
    }
    let (phases, w, d, s_injection_count) = protocol_phases(code, config.variant, config.convention, &minus, &flips)?;
    let m = code.k() + code.g0_rows();
    let (prob, fidelity) = postselect(&phases, code.k(), m);
    let pass = rng.gen_bool(prob.clamp(0.0, 1.0));
    let correction_set: Vec<usize> = (0..n)
        .filter(|&l| match config.convention {
            Convention::Minus => minus[l],
            Convention::Plus => !minus[l],
        })
        .collect();
    Ok(ProtocolTrace {
        outcomes: minus.iter().map(|&b| if b { -1 } else { 1 }).collect(),
        correction_count: correction_set.len(),
        correction_set,
        w,
        d,
        s_injection_count,
        postselect_pass: pass,
        postselect_probability: prob,
        output_fidelity: if pass { fidelity } else { 0.0 },
    })
}

/// Aggregate statistics over many shots.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShotSummary {
    pub shots: usize,
    pub pass_rate: f64,
    pub mean_fidelity_on_pass: Option<f64>,
    pub min_fidelity_on_pass: Option<f64>,
    pub mean_s_injections: f64,
    pub max_s_injections: usize,
    pub mean_corrections: f64,
}

pub fn run_shots(code: &DescendantCode, config: &ProtocolConfig, shots: usize, seed: u64) -> Result<ShotSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut passes, mut fid_sum, mut s_sum, mut s_max, mut c_sum) = (0usize, 0.0, 0usize, 0usize, 0usize);
    let mut fid_min: Option<f64> = None;
    for _ in 0..shots {
        let t = simulate_protocol(code, config, &mut rng)?;
        if t.postselect_pass {
            passes += 1;
            fid_sum += t.output_fidelity;
            fid_min = Some(fid_min.map_or(t.output_fidelity, |f| f.min(t.output_fidelity)));
        }
        s_sum += t.s_injection_count;
        s_max = s_max.max(t.s_injection_count);
        c_sum += t.correction_count;
    }
    let per = |x: f64| if shots == 0 { 0.0 } else { x / shots as f64 };
    Ok(ShotSummary {
        shots,
        pass_rate: per(passes as f64),
        mean_fidelity_on_pass: (passes > 0).then(|| fid_sum / passes as f64),
        min_fidelity_on_pass: fid_min,
        mean_s_injections: per(s_sum as f64),
        max_s_injections: s_max,
        mean_corrections: per(c_sum as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rmpoly::RMPolynomial;
    use crate::triortho::{even_descendant, indicator_to_generator};

    fn code15() -> DescendantCode {
        let s = indicator_to_generator(&RMPolynomial::one(4)).unwrap();
        even_descendant(&s, &[0]).unwrap()
    }

    fn config(variant: Variant, noise: f64) -> ProtocolConfig {
        ProtocolConfig { variant, noise, convention: Convention::Minus }
    }

    #[test]
    fn noiseless_15_to_1() {
        let code = code15();
        for variant in [Variant::Standard, Variant::Delayed] {
            let s = run_shots(&code, &config(variant, 0.0), 500, 3).unwrap();
            assert_eq!(s.pass_rate, 1.0);
            assert!(s.min_fidelity_on_pass.unwrap() > 1.0 - 1e-12);
            if variant == Variant::Delayed {
                assert!(s.max_s_injections <= 6);
            }
        }
    }

    #[test]
    fn variants_agree_on_every_outcome_record() {
        let code = code15();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let minus: Vec<bool> = (0..15).map(|_| rng.gen_bool(0.5)).collect();
            let flips: Vec<bool> = (0..15).map(|_| rng.gen_bool(0.1)).collect();
            for conv in [Convention::Minus, Convention::Plus] {
                let a = protocol_phases(&code, Variant::Standard, conv, &minus, &flips).unwrap();
                let b = protocol_phases(&code, Variant::Delayed, conv, &minus, &flips).unwrap();
                assert_eq!(a.0, b.0);
                assert!(b.3 <= code.k() + code.g0_rows() + 1);
            }
        }
    }

    #[test]
    fn binomial_corrections() {
        let s = run_shots(&code15(), &config(Variant::Standard, 0.0), 4000, 11).unwrap();
        assert!((s.mean_corrections - 7.5).abs() < 0.15, "{}", s.mean_corrections);
    }

    #[test]
    fn single_qubit_code() {
        let g1 = BitMatrix::from_strs(&["1"]).unwrap();
        let code = DescendantCode::new(g1, BitMatrix::new(1)).unwrap();
        for variant in [Variant::Standard, Variant::Delayed] {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            let t = simulate_protocol(&code, &config(variant, 0.0), &mut rng).unwrap();
            assert!(t.postselect_pass);
            assert!((t.output_fidelity - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_error_is_detected() {
        let code = code15();
        let minus = vec![false; 15];
        let mut flips = vec![false; 15];
        flips[4] = true;
        let (phases, ..) = protocol_phases(&code, Variant::Delayed, Convention::Minus, &minus, &flips).unwrap();
        let (prob, _) = postselect(&phases, 1, 5);
        assert!(prob < 1e-12);
    }

    #[test]
    fn errors() {
        let g0 = BitMatrix::from_strs(&["11"]).unwrap();
        let code = DescendantCode::new(BitMatrix::new(2), g0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(simulate_protocol(&code, &config(Variant::Delayed, 0.0), &mut rng), Err(Error::NoLogicalQubits));
        let n = 13 * 8 + 1;
        let g1 = BitMatrix::from_rows(n, vec![BitVector::unit(n, n - 1)]).unwrap();
        let blocks = (0..13).map(|b| BitVector::from_indices(n, b * 8..b * 8 + 8).unwrap()).collect();
        let big = DescendantCode::new(g1, BitMatrix::from_rows(n, blocks).unwrap()).unwrap();
        assert!(matches!(simulate_protocol(&big, &config(Variant::Delayed, 0.0), &mut rng), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn gen35_distills_three_states() {
        let gen35 = DescendantCode::parse(include_str!("../../data/gen35.txt")).unwrap();
        let s = run_shots(&gen35, &config(Variant::Delayed, 0.0), 50, 1).unwrap();
        assert_eq!(s.pass_rate, 1.0);
        assert!(s.min_fidelity_on_pass.unwrap() > 1.0 - 1e-12);
        assert!(s.max_s_injections <= 10);
    }
}
