//! Recurrence polynomials, the critical polynomial and its roots, and the
//! sl(2,ℝ) operator matrix.
//!
//! The spectral parameter ε is determined twice, by construction:
//!
//! 1. the three-term recurrence
//!    (2j−m)q·P_{m+1} = (ε−bm)·P_m − m(ℓ+m+1/2)·P_{m−1}, P₀ = 1,
//!    whose termination condition P_{2j+1}(ε) = 0 is the critical polynomial
//!    solved here by Sturm bisection on the equivalent tridiagonal matrix;
//! 2. the (2j+1)×(2j+1) matrix of
//!    J₋J₀ + (ℓ+j+1/2)J₋ + qJ₊ + bJ₀ + jb
//!    on the monomial basis {1, z, …, z^{2j}}, diagonalized independently.
//!
//! Agreement of the two spectra is a standing invariant of the crate.

use crate::linalg;
use thiserror::Error;

/// Hard cap on 2j: keeps double-precision recurrence coefficients bounded.
pub const MAX_TWO_J: u32 = 64;

/// Residual tolerance for accepting a critical-polynomial root, relative to
/// the polynomial's evaluation scale at the root.
pub const TOL_ROOT: f64 = 1e-12;

/// Eigenvalues whose imaginary part exceeds this (relative to the matrix
/// scale) are reported as a non-real ε regime rather than silently truncated.
pub const TOL_IMAG: f64 = 1e-8;

#[derive(Debug, Clone, Error)]
pub enum AlgebraError {
    #[error("invalid algebra parameters: {0}")]
    InvalidParams(String),
    #[error("exactly-solvable reduction (q = 0): no critical polynomial")]
    ExactlySolvableReduction,
    #[error("coefficient overflow while building P_{m} (2j = {two_j})")]
    Overflow { m: usize, two_j: u32 },
    #[error(
        "no real roots found for the critical polynomial (degree {degree}); \
         coefficients (ascending): {coeffs:?}"
    )]
    NoRealRoots { degree: usize, coeffs: Vec<f64> },
    #[error("eigenvalue with imaginary part {imag:.3e} exceeds tolerance {tol:.3e}")]
    ComplexEigenvalues { imag: f64, tol: f64 },
    #[error("gamma-function pole: requires ell > -1 for the factorial coefficients, got {ell}")]
    GammaPole { ell: f64 },
    #[error("coefficient recurrence singular at k = {k}: requires ell > -3/2, got {ell}")]
    SingularRecurrence { k: usize, ell: f64 },
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
}

/// The (ℓ, b, q, j) tuple steering both the recurrence and the sl(2,ℝ)
/// operator. `two_j` stores 2j so j may be integer or half-integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraParams {
    pub ell: f64,
    pub b: f64,
    pub q: f64,
    pub two_j: u32,
}

impl AlgebraParams {
    pub fn new(ell: f64, b: f64, q: f64, two_j: u32) -> Result<Self, AlgebraError> {
        if !(ell.is_finite() && b.is_finite() && q.is_finite()) {
            return Err(AlgebraError::InvalidParams(format!(
                "non-finite parameter (ell={ell}, b={b}, q={q})"
            )));
        }
        if two_j > MAX_TWO_J {
            return Err(AlgebraError::InvalidParams(format!(
                "2j = {two_j} exceeds the supported cap {MAX_TWO_J}"
            )));
        }
        Ok(Self { ell, b, q, two_j })
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Dimension of the invariant polynomial space, 2j + 1.
    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }
}

/// P₀ … P_{2j+1} as coefficient vectors in ascending powers of ε.
#[derive(Debug, Clone)]
pub struct SpectralTable {
    pub coeffs: Vec<Vec<f64>>,
    pub params: AlgebraParams,
}

impl SpectralTable {
    /// Coefficients of the critical polynomial P_{2j+1}, ascending.
    pub fn critical(&self) -> &[f64] {
        self.coeffs.last().expect("table always holds P_0..P_{2j+1}")
    }

    /// P_{2j+1}(ε) by Horner's rule.
    pub fn eval_critical(&self, eps: f64) -> f64 {
        horner(self.critical(), eps)
    }

    /// d/dε P_{2j+1}(ε).
    pub fn eval_critical_derivative(&self, eps: f64) -> f64 {
        let c = self.critical();
        let mut acc = 0.0;
        for k in (1..c.len()).rev() {
            acc = acc * eps + c[k] * k as f64;
        }
        acc
    }

    /// Σ |c_k| |ε|^k — the evaluation magnitude scale used for root residuals.
    pub fn critical_scale(&self, eps: f64) -> f64 {
        let mut acc = 0.0;
        let mut p = 1.0;
        for c in self.critical() {
            acc += c.abs() * p;
            p *= eps.abs();
        }
        acc.max(f64::MIN_POSITIVE)
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Kahan-compensated sum of a short list of terms.
fn compensated_sum(terms: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for &t in terms {
        let y = t - c;
        let u = s + y;
        c = (u - s) - y;
        s = u;
    }
    s
}

/// Build P₀ … P_{2j+1} from the recurrence. The terminal index m = 2j, where
/// the forward coefficient (2j−m)q vanishes, instead *defines*
/// P_{2j+1} := (ε−2jb)·P_{2j} − 2j(ℓ+2j+1/2)·P_{2j−1}; its vanishing is the
/// solvability condition.
pub fn build_spectral_table(params: &AlgebraParams) -> Result<SpectralTable, AlgebraError> {
    if params.q == 0.0 {
        return Err(AlgebraError::ExactlySolvableReduction);
    }
    let two_j = params.two_j as usize;
    let (ell, b, q) = (params.ell, params.b, params.q);

    let mut coeffs: Vec<Vec<f64>> = Vec::with_capacity(two_j + 2);
    coeffs.push(vec![1.0]); // P_0
    for m in 0..=two_j {
        // combine: next(ε) = (ε − b m) P_m − m(ℓ+m+1/2) P_{m−1}, then divide by
        // (2j−m)q except at the terminal step where that factor is 1 by the
        // termination convention.
        let m_f = m as f64;
        let div = if m == two_j {
            1.0
        } else {
            (two_j as f64 - m_f) * q
        };
        let p_m = &coeffs[m];
        let p_prev: &[f64] = if m >= 1 { &coeffs[m - 1] } else { &[] };
        let mut next = vec![0.0; m + 2];
        let back = m_f * (ell + m_f + 0.5);
        for k in 0..next.len() {
            let shifted = if k >= 1 && k - 1 < p_m.len() { p_m[k - 1] } else { 0.0 };
            let diag = if k < p_m.len() { -b * m_f * p_m[k] } else { 0.0 };
            let prev = if k < p_prev.len() { -back * p_prev[k] } else { 0.0 };
            let v = compensated_sum(&[shifted, diag, prev]) / div;
            if !v.is_finite() {
                return Err(AlgebraError::Overflow {
                    m: m + 1,
                    two_j: params.two_j,
                });
            }
            next[k] = v;
        }
        coeffs.push(next);
    }
    Ok(SpectralTable {
        coeffs,
        params: *params,
    })
}

/// The real roots of the critical polynomial, ascending; the algebraic
/// ε-spectrum.
#[derive(Debug, Clone)]
pub struct EpsilonSpectrum {
    pub roots: Vec<f64>,
    pub params: AlgebraParams,
}

/// Tridiagonal representation of the recurrence acting on (P₀, …, P_{2j}):
/// diagonal b·m, superdiagonal (2j−m)q, subdiagonal m(ℓ+m+1/2).
fn recurrence_tridiagonal(params: &AlgebraParams) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = params.dim();
    let (ell, b, q) = (params.ell, params.b, params.q);
    let diag: Vec<f64> = (0..n).map(|m| b * m as f64).collect();
    let sup: Vec<f64> = (0..n - 1)
        .map(|m| (params.two_j as f64 - m as f64) * q)
        .collect();
    let sub: Vec<f64> = (0..n - 1)
        .map(|m| (m as f64 + 1.0) * (ell + m as f64 + 1.5))
        .collect();
    (diag, sup, sub)
}

/// All real roots of P_{2j+1}, ascending, each polished by one Newton step on
/// the explicit coefficients; multiplicity preserved.
///
/// Root-finding goes through the tridiagonal matrix implied by the recurrence:
/// when every paired off-diagonal product is positive the matrix is
/// symmetrized by a diagonal similarity and bisected on Sturm sequences;
/// otherwise the sl(2,ℝ) matrix spectrum is used as a fallback.
pub fn epsilon_roots(table: &SpectralTable) -> Result<EpsilonSpectrum, AlgebraError> {
    let params = table.params;
    let n = params.dim();
    let (diag, sup, sub) = recurrence_tridiagonal(&params);

    let products: Vec<f64> = sup.iter().zip(sub.iter()).map(|(a, b)| a * b).collect();
    let mut roots: Vec<f64> = if products.iter().all(|&p| p > 0.0) || n == 1 {
        let off: Vec<f64> = products.iter().map(|p| p.sqrt()).collect();
        linalg::tridiag_lowest_eigenvalues(&diag, &off, n)
    } else {
        // fall back to the sl(2) matrix spectrum
        let mat = sl2_operator_matrix(&params);
        matrix_eigenvalues(&mat).map_err(|e| match e {
            AlgebraError::ComplexEigenvalues { .. } => AlgebraError::NoRealRoots {
                degree: n,
                coeffs: table.critical().to_vec(),
            },
            other => other,
        })?
    };

    // one Newton polish per root on the explicit critical polynomial
    for r in &mut roots {
        let d = table.eval_critical_derivative(*r);
        if d != 0.0 {
            let step = table.eval_critical(*r) / d;
            if step.is_finite() && step.abs() <= 1e-3 * r.abs().max(1.0) {
                *r -= step;
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());

    for &r in &roots {
        let residual = table.eval_critical(r).abs();
        if residual > TOL_ROOT * table.critical_scale(r) {
            return Err(AlgebraError::NoRealRoots {
                degree: n,
                coeffs: table.critical().to_vec(),
            });
        }
    }
    Ok(EpsilonSpectrum { roots, params })
}

/// Dense square matrix acting on the monomial basis {1, z, …, z^{2j}};
/// column k holds the image of z^k.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub dim: usize,
    data: Vec<f64>,
}

impl OperatorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.data[row * self.dim + col] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Matrix of J₋J₀ + (ℓ+j+1/2)J₋ + qJ₊ + bJ₀ + jb on {1, z, …, z^{2j}}, whose
/// eigenvalues are the algebraic ε. The generators act as
/// J₋ = d/dz, J₀ = z d/dz − j, J₊ = −z² d/dz + 2jz, giving
/// z^k ↦ k(ℓ+k+1/2) z^{k−1} + b k z^k + q(2j−k) z^{k+1}.
pub fn sl2_operator_matrix(params: &AlgebraParams) -> OperatorMatrix {
    let n = params.dim();
    let (ell, b, q) = (params.ell, params.b, params.q);
    let mut m = OperatorMatrix::zeros(n);
    for k in 0..n {
        let k_f = k as f64;
        if k >= 1 {
            m.set(k - 1, k, k_f * (ell + k_f + 0.5));
        }
        m.set(k, k, b * k_f);
        if k + 1 < n {
            m.set(k + 1, k, q * (params.two_j as f64 - k_f));
        }
    }
    m
}

fn is_tridiagonal(m: &OperatorMatrix) -> bool {
    let n = m.dim;
    for i in 0..n {
        for j in 0..n {
            if (i as isize - j as isize).abs() > 1 && m.at(i, j) != 0.0 {
                return false;
            }
        }
    }
    true
}

/// All eigenvalues of a square real matrix, ascending. Tridiagonal inputs
/// with positive paired off-diagonal products are symmetrized by a diagonal
/// similarity and sent through QL iteration; everything else is balanced,
/// reduced to Hessenberg form, and iterated with double shifts. Eigenvalues
/// with imaginary magnitude above [`TOL_IMAG`] (relative to the matrix scale)
/// are an error.
pub fn matrix_eigenvalues(mat: &OperatorMatrix) -> Result<Vec<f64>, AlgebraError> {
    let n = mat.dim;
    for i in 0..n {
        for j in 0..n {
            if !mat.at(i, j).is_finite() {
                return Err(AlgebraError::InvalidParams(format!(
                    "non-finite matrix entry at ({i}, {j})"
                )));
            }
        }
    }
    if n == 0 {
        return Ok(Vec::new());
    }

    let scale = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| mat.at(i, j).abs())
        .fold(0.0f64, f64::max)
        .max(1.0);

    if is_tridiagonal(mat) {
        // split into irreducible blocks where an off-diagonal product vanishes
        let mut eig: Vec<f64> = Vec::with_capacity(n);
        let mut start = 0usize;
        let mut all_real = true;
        let mut max_imag = 0.0f64;
        while start < n {
            let mut end = start;
            while end + 1 < n {
                let p = mat.at(end, end + 1) * mat.at(end + 1, end);
                if p == 0.0 {
                    break;
                }
                end += 1;
            }
            let len = end - start + 1;
            let diag: Vec<f64> = (start..=end).map(|i| mat.at(i, i)).collect();
            let prod: Vec<f64> = (start..end)
                .map(|i| mat.at(i, i + 1) * mat.at(i + 1, i))
                .collect();
            if prod.iter().all(|&p| p > 0.0) {
                let off: Vec<f64> = prod.iter().map(|p| p.sqrt()).collect();
                eig.extend(linalg::tridiag_eigenvalues_ql(&diag, &off)?);
            } else {
                // possibly complex block: Hessenberg iteration on the block
                let mut a = vec![0.0; len * len];
                for i in 0..len {
                    for j in 0..len {
                        a[i * len + j] = mat.at(start + i, start + j);
                    }
                }
                let w = linalg::hessenberg_eigenvalues(&mut a, len)?;
                for (re, im) in w {
                    if im.abs() > max_imag {
                        max_imag = im.abs();
                    }
                    if im.abs() > TOL_IMAG * scale {
                        all_real = false;
                    }
                    eig.push(re);
                }
            }
            start = end + 1;
        }
        if !all_real {
            return Err(AlgebraError::ComplexEigenvalues {
                imag: max_imag,
                tol: TOL_IMAG * scale,
            });
        }
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        return Ok(eig);
    }

    let mut a = mat.data.clone();
    linalg::balance(&mut a, n);
    linalg::hessenberg_reduce(&mut a, n);
    let w = linalg::hessenberg_eigenvalues(&mut a, n)?;
    let max_imag = w.iter().map(|x| x.1.abs()).fold(0.0f64, f64::max);
    if max_imag > TOL_IMAG * scale {
        return Err(AlgebraError::ComplexEigenvalues {
            imag: max_imag,
            tol: TOL_IMAG * scale,
        });
    }
    let mut eig: Vec<f64> = w.into_iter().map(|x| x.0).collect();
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(eig)
}

/// Coefficients c₀ … c_{2j} of the degree-2j polynomial solution of the
/// quasi-exactly-solvable ODE at spectral parameter ε, normalized so that
/// max |c_m| = 1.
///
/// Built from the factorial pattern
/// c_m = [(2j)!(2ℓ+1)!(ℓ+m)! / (2·m!(2j−m)!(2ℓ+1+2m)!)] · (4q)^m · P_m(ε)
/// with the factorials continued through ln Γ so any real ℓ > −1 works.
pub fn r_coefficients(params: &AlgebraParams, epsilon: f64) -> Result<Vec<f64>, AlgebraError> {
    if params.q == 0.0 {
        return Err(AlgebraError::ExactlySolvableReduction);
    }
    if params.ell <= -1.0 {
        return Err(AlgebraError::GammaPole { ell: params.ell });
    }
    let two_j = params.two_j as usize;
    let (ell, b, q) = (params.ell, params.b, params.q);

    // P_m(ε) by the value recurrence
    let mut p = Vec::with_capacity(two_j + 1);
    p.push(1.0);
    for m in 0..two_j.saturating_sub(0) {
        if m == two_j {
            break;
        }
        let m_f = m as f64;
        let prev = if m >= 1 { p[m - 1] } else { 0.0 };
        let v = ((epsilon - b * m_f) * p[m] - m_f * (ell + m_f + 0.5) * prev)
            / ((two_j as f64 - m_f) * q);
        if !v.is_finite() {
            return Err(AlgebraError::Overflow {
                m: m + 1,
                two_j: params.two_j,
            });
        }
        p.push(v);
    }

    let lg = linalg::ln_gamma;
    let base = lg(two_j as f64 + 1.0) + lg(2.0 * ell + 2.0) - (2.0f64).ln();
    let mut c = Vec::with_capacity(two_j + 1);
    for (m, &pm) in p.iter().enumerate() {
        let m_f = m as f64;
        let ln_k = base + lg(ell + m_f + 1.0)
            - lg(m_f + 1.0)
            - lg(two_j as f64 - m_f + 1.0)
            - lg(2.0 * ell + 2.0 * m_f + 2.0);
        let v = ln_k.exp() * (4.0 * q).powi(m as i32) * pm;
        if !v.is_finite() {
            return Err(AlgebraError::Overflow {
                m,
                two_j: params.two_j,
            });
        }
        c.push(v);
    }

    let max = c.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    if max > 0.0 {
        for v in &mut c {
            *v /= max;
        }
    }
    Ok(c)
}

/// Series coefficients of the polynomial ODE solution by the direct
/// coefficient recurrence
/// a_{k+1} = [(ε−bk)a_k − q(2j−k+1)a_{k−1}] / [(k+1)(k+ℓ+3/2)], a₀ = 1,
/// truncated at `degree`. Unlike [`r_coefficients`] this handles q = 0, where
/// ε = n·b terminates the series at degree n (the exactly-solvable ladder).
pub fn ode_series_coefficients(
    params: &AlgebraParams,
    epsilon: f64,
    degree: usize,
) -> Result<Vec<f64>, AlgebraError> {
    let (ell, b, q) = (params.ell, params.b, params.q);
    let two_j = params.two_j as f64;
    let mut a = Vec::with_capacity(degree + 1);
    a.push(1.0);
    for k in 0..degree {
        let k_f = k as f64;
        let denom = (k_f + 1.0) * (k_f + ell + 1.5);
        if denom == 0.0 {
            return Err(AlgebraError::SingularRecurrence { k, ell });
        }
        let prev = if k >= 1 { a[k - 1] } else { 0.0 };
        let v = ((epsilon - b * k_f) * a[k] - q * (two_j - k_f + 1.0) * prev) / denom;
        if !v.is_finite() {
            return Err(AlgebraError::Overflow {
                m: k + 1,
                two_j: params.two_j,
            });
        }
        a.push(v);
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(ell: f64, b: f64, q: f64, two_j: u32) -> AlgebraParams {
        AlgebraParams::new(ell, b, q, two_j).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
        assert!(
            (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0),
            "{what}: {a} vs {b}"
        );
    }

    /// Eq.-3 residual oracle: z R'' + (ℓ+3/2+z(b−qz)) R' + (−ε+2jqz) R at
    /// sample points, normalized by the largest term magnitude.
    fn ode_residual(params: &AlgebraParams, epsilon: f64, coeffs: &[f64], z: f64) -> f64 {
        let horner = |c: &[f64], x: f64| c.iter().rev().fold(0.0, |acc, &v| acc * x + v);
        let d1: Vec<f64> = coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        let d2: Vec<f64> = d1
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        let r = horner(coeffs, z);
        let rp = horner(&d1, z);
        let rpp = horner(&d2, z);
        let t1 = z * rpp;
        let t2 = (params.ell + 1.5 + z * (params.b - params.q * z)) * rp;
        let t3 = (-epsilon + params.two_j as f64 * params.q * z) * r;
        let scale = t1.abs().max(t2.abs()).max(t3.abs()).max(1e-300);
        (t1 + t2 + t3).abs() / scale
    }

    #[test]
    fn table_j0_terminal_step() {
        let t = build_spectral_table(&params(0.0, 0.0, 1.0, 0)).unwrap();
        assert_eq!(t.coeffs.len(), 2);
        assert_eq!(t.coeffs[0], vec![1.0]);
        assert_eq!(t.coeffs[1], vec![0.0, 1.0]); // P1 = ε
        let spec = epsilon_roots(&t).unwrap();
        assert_eq!(spec.roots, vec![0.0]);
    }

    #[test]
    fn table_j_half_hand_expansion() {
        // P2 = ε² − 3/2 for (ℓ=0, b=0, q=1, j=1/2)
        let t = build_spectral_table(&params(0.0, 0.0, 1.0, 1)).unwrap();
        let p2 = t.critical();
        let scale = p2[2];
        assert_close(p2[0] / scale, -1.5, 1e-14, "constant term");
        assert_close(p2[1] / scale, 0.0, 1e-14, "linear term");
        let spec = epsilon_roots(&t).unwrap();
        let root = (1.5f64).sqrt();
        assert_close(spec.roots[0], -root, 1e-12, "lower root");
        assert_close(spec.roots[1], root, 1e-12, "upper root");
        assert_close(spec.roots[1], 1.224745, 1e-6, "printed value");
    }

    #[test]
    fn table_j1_hand_expansion() {
        // P3 ∝ ε(ε² − 8) for (ℓ=0, b=0, q=1, j=1)
        let t = build_spectral_table(&params(0.0, 0.0, 1.0, 2)).unwrap();
        let p3 = t.critical();
        let lead = p3[3];
        assert_close(p3[1] / lead, -8.0, 1e-14, "ε coefficient");
        assert_close(p3[0] / lead, 0.0, 1e-14, "constant");
        assert_close(p3[2] / lead, 0.0, 1e-14, "ε²");
        let spec = epsilon_roots(&t).unwrap();
        let r = 8.0f64.sqrt();
        assert_close(spec.roots[0], -r, 1e-12, "-2√2");
        assert_close(spec.roots[1], 0.0, 1e-12, "0");
        assert_close(spec.roots[2], r, 1e-12, "+2√2");
    }

    #[test]
    fn degrees_and_initial_condition() {
        let t = build_spectral_table(&params(0.7, -1.3, 2.5, 5)).unwrap();
        assert_eq!(t.coeffs[0], vec![1.0]);
        for (m, c) in t.coeffs.iter().enumerate() {
            assert_eq!(c.len(), m + 1, "P_{m} must have degree {m}");
            assert!(c[m] != 0.0, "leading coefficient of P_{m}");
            assert!(c.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn q_zero_is_rejected() {
        let err = build_spectral_table(&params(0.0, 1.0, 0.0, 2)).unwrap_err();
        assert!(matches!(err, AlgebraError::ExactlySolvableReduction));
    }

    #[test]
    fn sl2_matrix_j_half_layout() {
        let m = sl2_operator_matrix(&params(0.25, 0.75, 2.0, 1));
        assert_eq!(m.dim, 2);
        assert_close(m.at(0, 0), 0.0, 1e-15, "a00");
        assert_close(m.at(0, 1), 0.25 + 1.5, 1e-15, "a01 = ℓ+3/2");
        assert_close(m.at(1, 0), 2.0, 1e-15, "a10 = q");
        assert_close(m.at(1, 1), 0.75, 1e-15, "a11 = b");
    }

    #[test]
    fn sl2_matrix_j0_is_zero() {
        let m = sl2_operator_matrix(&params(1.0, 2.0, 3.0, 0));
        assert_eq!(m.dim, 1);
        assert_eq!(m.at(0, 0), 0.0);
        assert_eq!(matrix_eigenvalues(&m).unwrap(), vec![0.0]);
    }

    #[test]
    fn sl2_eigenvalues_match_closed_form_j_half() {
        let m = sl2_operator_matrix(&params(0.0, 0.0, 1.0, 1));
        let eig = matrix_eigenvalues(&m).unwrap();
        let r = (1.5f64).sqrt();
        assert_close(eig[0], -r, 1e-12, "-√(3/2)");
        assert_close(eig[1], r, 1e-12, "+√(3/2)");
    }

    #[test]
    fn matrix_eigenvalues_examples() {
        // [[0, 3/2], [1, 0]] → ±√(3/2)
        let mut m = OperatorMatrix::zeros(2);
        m.set(0, 1, 1.5);
        m.set(1, 0, 1.0);
        let eig = matrix_eigenvalues(&m).unwrap();
        let r = (1.5f64).sqrt();
        assert_close(eig[0], -r, 1e-12, "low");
        assert_close(eig[1], r, 1e-12, "high");

        // identity 3x3 → {1, 1, 1}
        let mut id = OperatorMatrix::zeros(3);
        for i in 0..3 {
            id.set(i, i, 1.0);
        }
        let eig = matrix_eigenvalues(&id).unwrap();
        assert_eq!(eig.len(), 3);
        for e in eig {
            assert_close(e, 1.0, 1e-13, "identity");
        }

        // recurrence/algebra equivalence at j=1
        let m = sl2_operator_matrix(&params(0.0, 0.0, 1.0, 2));
        let eig = matrix_eigenvalues(&m).unwrap();
        let t = build_spectral_table(&params(0.0, 0.0, 1.0, 2)).unwrap();
        let roots = epsilon_roots(&t).unwrap().roots;
        for (a, b) in eig.iter().zip(roots.iter()) {
            assert_close(*a, *b, 1e-10, "matrix vs roots");
        }
    }

    #[test]
    fn complex_regime_is_flagged() {
        // q < 0 with ℓ = 0, b = 0, j = 1/2: P2 = ε² + q(ℓ+3/2) has no real roots
        let p = params(0.0, 0.0, -1.0, 1);
        let m = sl2_operator_matrix(&p);
        let err = matrix_eigenvalues(&m).unwrap_err();
        assert!(matches!(err, AlgebraError::ComplexEigenvalues { .. }));
        let t = build_spectral_table(&p).unwrap();
        let err = epsilon_roots(&t).unwrap_err();
        assert!(matches!(err, AlgebraError::NoRealRoots { .. }));
    }

    #[test]
    fn j_half_closed_form_roots_random_sweep() {
        // roots = (b ± √(b² + 4q(ℓ+3/2)))/2 across 100 seeded (ℓ, b, q)
        let mut s = 0xDEAD_BEEF_u64;
        let mut rng = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            s as f64 / u64::MAX as f64
        };
        for _ in 0..100 {
            let ell = -1.4 + 4.0 * rng(); // > -3/2
            let b = -3.0 + 6.0 * rng();
            let q = 0.05 + 5.0 * rng();
            let t = build_spectral_table(&params(ell, b, q, 1)).unwrap();
            let roots = epsilon_roots(&t).unwrap().roots;
            let disc = (b * b + 4.0 * q * (ell + 1.5)).sqrt();
            let lo = (b - disc) / 2.0;
            let hi = (b + disc) / 2.0;
            assert_close(roots[0], lo, 1e-12, "closed-form low");
            assert_close(roots[1], hi, 1e-12, "closed-form high");
        }
    }

    #[test]
    fn r_coefficients_j0_constant() {
        let c = r_coefficients(&params(0.0, 0.0, 1.0, 0), 0.0).unwrap();
        assert_eq!(c.len(), 1);
        assert_close(c[0], 1.0, 1e-15, "normalized constant");
    }

    #[test]
    fn r_coefficients_satisfy_ode_at_roots() {
        for (two_j, ell, b, q) in [
            (1u32, 0.0, 0.0, 1.0),
            (2, 0.0, 0.0, 1.0),
            (3, 0.5, -0.7, 2.0),
            (4, 1.25, 1.0, 0.5),
        ] {
            let p = params(ell, b, q, two_j);
            let t = build_spectral_table(&p).unwrap();
            let spec = epsilon_roots(&t).unwrap();
            for &eps in &spec.roots {
                let c = r_coefficients(&p, eps).unwrap();
                assert_eq!(c.len(), two_j as usize + 1);
                for i in 1..=5 {
                    let z = 0.4 * i as f64; // five sample points in (0, 2]
                    let res = ode_residual(&p, eps, &c, z);
                    assert!(
                        res < 1e-10,
                        "ODE residual {res:.3e} at z={z} for 2j={two_j}, ε={eps}"
                    );
                }
            }
        }
    }

    #[test]
    fn r_coefficients_match_series_recurrence() {
        // the factorial pattern and the direct series recurrence agree up to scale
        let p = params(0.85, -0.4, 1.7, 4);
        let t = build_spectral_table(&p).unwrap();
        for &eps in &epsilon_roots(&t).unwrap().roots {
            let c = r_coefficients(&p, eps).unwrap();
            let a = ode_series_coefficients(&p, eps, p.two_j as usize).unwrap();
            let scale = c[0] / a[0];
            for (cm, am) in c.iter().zip(a.iter()) {
                assert_close(*cm, scale * am, 1e-12, "pattern vs series");
            }
        }
    }

    #[test]
    fn series_recurrence_terminates_for_q0_ladder() {
        let p = params(0.3, 1.2, 0.0, 0);
        for n in 0..4usize {
            let eps = n as f64 * p.b;
            let a = ode_series_coefficients(&p, eps, n + 3).unwrap();
            for (k, &v) in a.iter().enumerate().skip(n + 1) {
                assert!(v.abs() < 1e-14, "a[{k}] = {v} should vanish for ε = {n}b");
            }
        }
    }

    #[test]
    fn gamma_pole_is_reported() {
        let err = r_coefficients(&params(-1.2, 0.0, 1.0, 1), 0.0).unwrap_err();
        assert!(matches!(err, AlgebraError::GammaPole { .. }));
    }

    #[test]
    fn two_j_cap_enforced() {
        assert!(AlgebraParams::new(0.0, 0.0, 1.0, 65).is_err());
        assert!(AlgebraParams::new(0.0, 0.0, 1.0, 64).is_ok());
    }
}
