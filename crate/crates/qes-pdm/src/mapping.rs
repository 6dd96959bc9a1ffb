//! The change-of-variable chain x → u → r, the weight function W, and
//! wavefunction assembly.
//!
//! u(x) = ∫√m dx is the mass-weighted arc length; the mapping r(x) solves
//! √(λ₀ + λ₁/r + λ₂/r²)·r′ = −√m. Three λ-specializations have closed
//! forms — r = −u² (sextic, λ₁ = 1/4), r = −2u (Coulomb-like, λ₀ = 1/4),
//! r = e^{−u} (Morse-like, λ₂ = 1) — and the general triple is integrated
//! with a fourth-order Runge–Kutta step, derivatives supplied by the defining
//! relation itself.
//!
//! Bound states are assembled as ψ = −(2r/r′²)·m·e^{−Ω}·Ř(r) with Ω′ = W.
//! W has an elementary antiderivative (logs plus a quadratic in r), so Ω is
//! evaluated in closed form rather than by quadrature; this matters because
//! W ~ −1/x near a radial origin and because any grid-frequency quadrature
//! noise would be amplified by the residual checker's difference stencils.

use crate::algebra::{self, AlgebraParams};
use crate::massprofile::{MassError, MassProfile};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum MappingError {
    #[error("grid needs at least 16 points, got {0}")]
    GridTooSmall(usize),
    #[error("invalid grid bounds [{0}, {1}]")]
    BadBounds(f64, f64),
    #[error("integrand not finite at x = {0}")]
    NonFiniteIntegrand(f64),
    #[error("u(x) is not strictly increasing at index {0}")]
    NotMonotone(usize),
    #[error("radicand λ₀ + λ₁/r + λ₂/r² = {radicand:.6e} not positive at x = {x}")]
    RadicandNonPositive { x: f64, radicand: f64 },
    #[error("r = 0 at x = {0} where 1/r is required")]
    DivisionByZeroR(f64),
    #[error("mapping anchor at x = {0} is singular (r or r′ vanishes); offset the grid")]
    SingularAnchor(f64),
    #[error("wavefunction assembly hit a flagged singular point at index {0}")]
    AssemblyAtSingularPoint(usize),
    #[error("e^(-Ω) overflows (Ω = {0:.3e}); truncate the domain")]
    PsiOverflow(f64),
    #[error("wavefunction is identically zero on the grid")]
    ZeroPsi,
    #[error(transparent)]
    Mass(#[from] MassError),
    #[error(transparent)]
    Algebra(#[from] algebra::AlgebraError),
}

/// Uniform grid on [x_min, x_max].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self, MappingError> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(MappingError::BadBounds(x_min, x_max));
        }
        if n < 16 {
            return Err(MappingError::GridTooSmall(n));
        }
        Ok(Self { x_min, x_max, n })
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + self.h() * i as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Same endpoints at doubled spacing (every other point); requires odd n.
    pub fn half_resolution(&self) -> Option<Grid> {
        if self.n % 2 == 1 && self.n >= 33 {
            Some(Grid {
                x_min: self.x_min,
                x_max: self.x_max,
                n: (self.n + 1) / 2,
            })
        } else {
            None
        }
    }
}

/// Which λ-specialization of the mapping relation is active.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FamilySpec {
    Sextic,
    Coulomb,
    Morse,
    General {
        lambda0: f64,
        lambda1: f64,
        lambda2: f64,
        r0: f64,
    },
}

impl FamilySpec {
    pub fn lambdas(&self) -> (f64, f64, f64) {
        match self {
            FamilySpec::Sextic => (0.0, 0.25, 0.0),
            FamilySpec::Coulomb => (0.25, 0.0, 0.0),
            FamilySpec::Morse => (0.0, 0.0, 1.0),
            FamilySpec::General {
                lambda0,
                lambda1,
                lambda2,
                ..
            } => (*lambda0, *lambda1, *lambda2),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Sextic => "sextic",
            FamilySpec::Coulomb => "coulomb",
            FamilySpec::Morse => "morse",
            FamilySpec::General { .. } => "general",
        }
    }

    /// Radial families place r = 0 at u = 0 and need the grid kept away
    /// from it.
    pub fn is_radial(&self) -> bool {
        matches!(self, FamilySpec::Sextic | FamilySpec::Coulomb)
    }
}

// ---------------------------------------------------------------------------
// cumulative quadrature
// ---------------------------------------------------------------------------

/// Cumulative integral of uniformly sampled `f`, fourth order. Every interior
/// interval uses the same interpolatory stencil h/24·(−1, 13, 13, −1), so the
/// local error varies smoothly with x instead of alternating at grid
/// frequency (which difference stencils downstream would amplify by 1/h²).
pub fn cumulative_integral(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        // trapezoid fallback for degenerate lengths
        for i in 1..n {
            out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
        }
        return out;
    }
    let c = h / 24.0;
    let mut sum = 0.0;
    let mut comp = 0.0;
    let kahan_add = |sum: &mut f64, comp: &mut f64, inc: f64| {
        let y = inc - *comp;
        let t = *sum + y;
        *comp = (t - *sum) - y;
        *sum = t;
    };
    for i in 0..n - 1 {
        let inc = if i == 0 {
            c * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3])
        } else if i == n - 2 {
            c * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1])
        } else {
            c * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2])
        };
        kahan_add(&mut sum, &mut comp, inc);
        out[i + 1] = sum;
    }
    out
}

/// Total integral of uniformly sampled `f` (same rule as
/// [`cumulative_integral`]).
pub fn integral(f: &[f64], h: f64) -> f64 {
    *cumulative_integral(f, h).last().unwrap_or(&0.0)
}

/// u(x) = ∫√m dx with u(x_min) = 0, on the grid. Strictly increasing.
pub fn integrate_u(p: &MassProfile, g: &Grid) -> Result<Vec<f64>, MappingError> {
    let mut f = Vec::with_capacity(g.n);
    for i in 0..g.n {
        let x = g.point(i);
        let (m, _, _) = p.eval(x)?;
        let v = m.sqrt();
        if !v.is_finite() {
            return Err(MappingError::NonFiniteIntegrand(x));
        }
        f.push(v);
    }
    let u = cumulative_integral(&f, g.h());
    for i in 1..u.len() {
        if u[i] <= u[i - 1] {
            return Err(MappingError::NotMonotone(i));
        }
    }
    Ok(u)
}

/// Arc length ∫√m dx from the physical origin up to `x_min`, used to seed
/// radial mappings so r = 0 falls strictly left of the grid. Falls back to
/// x_min·√m(x_min) when the profile is not evaluable below the grid.
pub fn radial_u_offset(p: &MassProfile, x_min: f64) -> f64 {
    if x_min <= 0.0 {
        return 0.0;
    }
    let panels = 64usize;
    let h = x_min / panels as f64;
    let mut acc = 0.0;
    let mut ok = true;
    for i in 0..=panels {
        let x = (i as f64 * h).min(x_min);
        let (m, _, _) = p.eval_unchecked(x);
        if !m.is_finite() || m < 0.0 {
            ok = false;
            break;
        }
        let w = if i == 0 || i == panels {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * m.sqrt();
    }
    if ok {
        acc * h / 3.0
    } else {
        let (m, _, _) = p.eval_unchecked(x_min);
        x_min * m.max(0.0).sqrt()
    }
}

/// The mapping samples r, r′, r″, r‴ on the grid.
#[derive(Debug, Clone)]
pub struct RSamples {
    pub r: Vec<f64>,
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    pub r3: Vec<f64>,
}

/// r(x) and its first three derivatives for the given family. Closed-form
/// families use the exact chain rule through (m, m′, m″); the general triple
/// integrates the defining relation with RK4 from `r0` and differentiates
/// through it.
pub fn map_r(
    fam: &FamilySpec,
    p: &MassProfile,
    g: &Grid,
    u: &[f64],
) -> Result<RSamples, MappingError> {
    let n = g.n;
    let mut out = RSamples {
        r: vec![0.0; n],
        r1: vec![0.0; n],
        r2: vec![0.0; n],
        r3: vec![0.0; n],
    };
    match fam {
        FamilySpec::Sextic | FamilySpec::Coulomb | FamilySpec::Morse => {
            for i in 0..n {
                let x = g.point(i);
                let (m, m1, m2) = p.eval(x)?;
                let sm = m.sqrt();
                let u1 = sm;
                let u2 = m1 / (2.0 * sm);
                let u3 = m2 / (2.0 * sm) - m1 * m1 / (4.0 * m * sm);
                let ui = u[i];
                match fam {
                    FamilySpec::Sextic => {
                        out.r[i] = -ui * ui;
                        out.r1[i] = -2.0 * ui * u1;
                        out.r2[i] = -2.0 * (u1 * u1 + ui * u2);
                        out.r3[i] = -2.0 * (3.0 * u1 * u2 + ui * u3);
                    }
                    FamilySpec::Coulomb => {
                        out.r[i] = -2.0 * ui;
                        out.r1[i] = -2.0 * u1;
                        out.r2[i] = -2.0 * u2;
                        out.r3[i] = -2.0 * u3;
                    }
                    FamilySpec::Morse => {
                        let e = (-ui).exp();
                        out.r[i] = e;
                        out.r1[i] = -u1 * e;
                        out.r2[i] = (u1 * u1 - u2) * e;
                        out.r3[i] = (-u1 * u1 * u1 + 3.0 * u1 * u2 - u3) * e;
                    }
                    FamilySpec::General { .. } => unreachable!(),
                }
            }
        }
        FamilySpec::General {
            lambda0,
            lambda1,
            lambda2,
            r0,
        } => {
            let (l0, l1, l2) = (*lambda0, *lambda1, *lambda2);
            let radicand = |r: f64, x: f64| -> Result<f64, MappingError> {
                if (l1 != 0.0 || l2 != 0.0) && r == 0.0 {
                    return Err(MappingError::DivisionByZeroR(x));
                }
                let mut val = l0;
                if l1 != 0.0 {
                    val += l1 / r;
                }
                if l2 != 0.0 {
                    val += l2 / (r * r);
                }
                if val <= 0.0 || !val.is_finite() {
                    return Err(MappingError::RadicandNonPositive { x, radicand: val });
                }
                Ok(val)
            };
            let slope = |x: f64, r: f64| -> Result<f64, MappingError> {
                let (m, _, _) = p.eval(x)?;
                Ok(-(m / radicand(r, x)?).sqrt())
            };
            let h = g.h();
            let mut r = *r0;
            for i in 0..n {
                let x = g.point(i);
                let (m, m1, m2) = p.eval(x)?;
                let gg = radicand(r, x)?;
                let gp = -l1 / (r * r) - 2.0 * l2 / (r * r * r);
                let gpp = 2.0 * l1 / (r * r * r) + 6.0 * l2 / (r * r * r * r);
                let (gp, gpp) = if l1 == 0.0 && l2 == 0.0 {
                    (0.0, 0.0)
                } else {
                    (gp, gpp)
                };
                let r1 = -(m / gg).sqrt();
                let r2d = (m1 - r1 * r1 * r1 * gp) / (2.0 * r1 * gg);
                let r3d = (m2 - 2.0 * r2d * r2d * gg - 5.0 * r1 * r1 * r2d * gp
                    - r1 * r1 * r1 * r1 * gpp)
                    / (2.0 * r1 * gg);
                out.r[i] = r;
                out.r1[i] = r1;
                out.r2[i] = r2d;
                out.r3[i] = r3d;
                if i + 1 < n {
                    let k1 = slope(x, r)?;
                    let k2 = slope(x + 0.5 * h, r + 0.5 * h * k1)?;
                    let k3 = slope(x + 0.5 * h, r + 0.5 * h * k2)?;
                    let k4 = slope(x + h, r + h * k3)?;
                    r += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
                }
            }
        }
    }
    Ok(out)
}

/// Pointwise defect of the mapping relation, √|λ₀ + λ₁/r + λ₂/r²|·r′ + √m.
/// Zero for an exact mapping. (For the sextic branch r < 0 makes the
/// radicand negative; the identity holds with the principal |·|^(1/2).)
pub fn family_ode_residual(
    fam: &FamilySpec,
    p: &MassProfile,
    g: &Grid,
    rs: &RSamples,
) -> Result<Vec<f64>, MappingError> {
    let (l0, l1, l2) = fam.lambdas();
    let mut out = Vec::with_capacity(g.n);
    for i in 0..g.n {
        let x = g.point(i);
        let (m, _, _) = p.eval(x)?;
        let r = rs.r[i];
        if r == 0.0 && (l1 != 0.0 || l2 != 0.0) {
            out.push(f64::NAN);
            continue;
        }
        let rad = l0 + l1 / r + l2 / (r * r);
        out.push(rad.abs().sqrt() * rs.r1[i] + m.sqrt());
    }
    Ok(out)
}

/// W = (1/4)·[2m′/m − 6r″/r′ + (1 − 2ℓ − 2br + 2qr²)·r′/r] pointwise.
/// Points where r or r′ vanish are flagged (NaN in the samples, index in the
/// second return), never silently skipped.
pub fn weight_w(
    params: &AlgebraParams,
    p: &MassProfile,
    g: &Grid,
    rs: &RSamples,
) -> Result<(Vec<f64>, Vec<usize>), MappingError> {
    let (ell, b, q) = (params.ell, params.b, params.q);
    let mut w = Vec::with_capacity(g.n);
    let mut flagged = Vec::new();
    for i in 0..g.n {
        let x = g.point(i);
        let (m, m1, _) = p.eval(x)?;
        let (r, r1, r2) = (rs.r[i], rs.r1[i], rs.r2[i]);
        if r == 0.0 || r1 == 0.0 {
            flagged.push(i);
            w.push(f64::NAN);
            continue;
        }
        let val = 0.25
            * (2.0 * m1 / m - 6.0 * r2 / r1 + (1.0 - 2.0 * ell - 2.0 * b * r + 2.0 * q * r * r) * r1 / r);
        w.push(val);
    }
    Ok((w, flagged))
}

/// Ω(x) = ∫ W dx with Ω(x_min) = 0, via the elementary antiderivative
/// (1/4)·[2 ln m − 6 ln|r′| + (1−2ℓ) ln|r| − 2br + qr²]. Exact pointwise.
pub fn omega_exact(
    params: &AlgebraParams,
    p: &MassProfile,
    g: &Grid,
    rs: &RSamples,
) -> Result<Vec<f64>, MappingError> {
    let (ell, b, q) = (params.ell, params.b, params.q);
    if rs.r[0] == 0.0 || rs.r1[0] == 0.0 {
        return Err(MappingError::SingularAnchor(g.point(0)));
    }
    let anti = |m: f64, r: f64, r1: f64| {
        0.25 * (2.0 * m.ln() - 6.0 * r1.abs().ln() + (1.0 - 2.0 * ell) * r.abs().ln()
            - 2.0 * b * r
            + q * r * r)
    };
    let (m0, _, _) = p.eval(g.point(0))?;
    let base = anti(m0, rs.r[0], rs.r1[0]);
    let mut omega = Vec::with_capacity(g.n);
    for i in 0..g.n {
        let (m, _, _) = p.eval(g.point(i))?;
        if rs.r[i] == 0.0 || rs.r1[i] == 0.0 {
            omega.push(f64::NAN);
            continue;
        }
        omega.push(anti(m, rs.r[i], rs.r1[i]) - base);
    }
    Ok(omega)
}

/// A full mapping table on a grid: the unit the potential constructors, the
/// oracle, and the wavefunction assembly consume.
#[derive(Debug, Clone)]
pub struct MappingSample {
    pub family: FamilySpec,
    pub grid: Grid,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub r: Vec<f64>,
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    pub r3: Vec<f64>,
    pub w: Vec<f64>,
    pub omega: Vec<f64>,
    /// Indices where W (and Ω) are undefined because r or r′ vanishes.
    pub singular: Vec<usize>,
}

impl MappingSample {
    /// Build the whole chain. `u_offset` shifts the arc length (radial
    /// families pass [`radial_u_offset`] so r = 0 sits left of the grid;
    /// zero keeps the raw u(x_min) = 0 convention).
    pub fn build(
        params: &AlgebraParams,
        family: FamilySpec,
        p: &MassProfile,
        g: &Grid,
        u_offset: f64,
    ) -> Result<Self, MappingError> {
        let mut u = integrate_u(p, g)?;
        if u_offset != 0.0 {
            for v in &mut u {
                *v += u_offset;
            }
        }
        let rs = map_r(&family, p, g, &u)?;
        let (w, singular) = weight_w(params, p, g, &rs)?;
        let omega = if singular.is_empty() {
            omega_exact(params, p, g, &rs)?
        } else {
            vec![f64::NAN; g.n]
        };
        Ok(Self {
            family,
            grid: *g,
            x: g.points(),
            u,
            r: rs.r,
            r1: rs.r1,
            r2: rs.r2,
            r3: rs.r3,
            w,
            omega,
            singular,
        })
    }

    pub fn r_samples(&self) -> RSamples {
        RSamples {
            r: self.r.clone(),
            r1: self.r1.clone(),
            r2: self.r2.clone(),
            r3: self.r3.clone(),
        }
    }
}

/// Assembled bound-state samples: ψ raw and L²-normalized.
#[derive(Debug, Clone)]
pub struct PsiSamples {
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
    pub norm: f64,
    pub node_count: usize,
}

/// ψ(x) = −(2r/r′²)·m·e^{−Ω}·Ř(r) for the polynomial with the given
/// coefficients (ascending powers of r).
pub fn assemble_psi_from_coefficients(
    coeffs: &[f64],
    p: &MassProfile,
    map: &MappingSample,
) -> Result<PsiSamples, MappingError> {
    if let Some(&i) = map.singular.first() {
        return Err(MappingError::AssemblyAtSingularPoint(i));
    }
    let n = map.grid.n;
    let mut raw = Vec::with_capacity(n);
    for i in 0..n {
        let (m, _, _) = p.eval(map.x[i])?;
        let omega = map.omega[i];
        if -omega > 700.0 {
            return Err(MappingError::PsiOverflow(omega));
        }
        let horner = coeffs.iter().rev().fold(0.0, |acc, &c| acc * map.r[i] + c);
        let v = -(2.0 * map.r[i] / (map.r1[i] * map.r1[i])) * m * (-omega).exp() * horner;
        raw.push(v);
    }
    let density: Vec<f64> = raw.iter().map(|v| v * v).collect();
    let norm2 = integral(&density, map.grid.h());
    if !(norm2.is_finite() && norm2 > 0.0) {
        return Err(MappingError::ZeroPsi);
    }
    let norm = norm2.sqrt();
    let normalized: Vec<f64> = raw.iter().map(|v| v / norm).collect();
    let node_count = count_nodes(&normalized);
    Ok(PsiSamples {
        raw,
        normalized,
        norm,
        node_count,
    })
}

/// ψ for the algebraic state at spectral parameter ε: the polynomial factor
/// comes from the coefficient pattern when q ≠ 0, and from the terminating
/// series (degree round(ε/b)) in the exactly-solvable q = 0 reduction.
pub fn assemble_psi(
    params: &AlgebraParams,
    epsilon: f64,
    p: &MassProfile,
    map: &MappingSample,
) -> Result<PsiSamples, MappingError> {
    let coeffs = if params.q != 0.0 {
        algebra::r_coefficients(params, epsilon)?
    } else {
        let degree = if params.b != 0.0 {
            (epsilon / params.b).round().max(0.0) as usize
        } else {
            0
        };
        algebra::ode_series_coefficients(params, epsilon, degree)?
    };
    assemble_psi_from_coefficients(&coeffs, p, map)
}

/// Interior sign changes of ψ, ignoring samples below 1e-8 of the peak.
pub fn count_nodes(psi: &[f64]) -> usize {
    let peak = psi.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    if peak == 0.0 {
        return 0;
    }
    let floor = 1e-8 * peak;
    let mut count = 0;
    let mut last_sign = 0i8;
    for &v in psi {
        if v.abs() < floor {
            continue;
        }
        let s = if v > 0.0 { 1 } else { -1 };
        if last_sign != 0 && s != last_sign {
            count += 1;
        }
        last_sign = s;
    }
    count
}

/// Fraction of ∫|ψ|² carried by the outer 10% of the domain; normalizable
/// when that tail ratio is below 1e-4.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormalizableReport {
    pub normalizable: bool,
    pub tail_ratio: f64,
}

pub fn check_normalizable(psi: &[f64], g: &Grid) -> NormalizableReport {
    let density: Vec<f64> = psi.iter().map(|v| v * v).collect();
    let total = integral(&density, g.h());
    if !(total.is_finite() && total > 0.0) {
        return NormalizableReport {
            normalizable: false,
            tail_ratio: 1.0,
        };
    }
    let cut = ((g.n - 1) as f64 * 0.9).ceil() as usize;
    let tail: Vec<f64> = density[cut..].to_vec();
    let tail_integral = integral(&tail, g.h());
    let tail_ratio = tail_integral / total;
    NormalizableReport {
        normalizable: tail_ratio < 1e-4,
        tail_ratio,
    }
}
