//! The general potential and the three explicit families (radial sextic,
//! Coulomb-like, Morse-like) with their closed-form energies.
//!
//! The family forms are the authoritative constructions for their mappings;
//! the general expression is kept both for arbitrary λ-triples and as a
//! cross-check. For constant mass the sextic family agrees with the general
//! expression identically; the Coulomb and Morse families differ from it by
//! the known offsets b²−(2ℓ+8j+5)q (a constant) and −(jq/2)e^{−2u}
//! respectively, which the verification report surfaces rather than hides.

use crate::algebra::{self, AlgebraParams};
use crate::mapping::MappingSample;
use crate::massprofile::{MassError, MassProfile};
use thiserror::Error;

/// Grid values with |V| above this bound are excluded from output and listed
/// in the curve's metadata.
pub const SINGULAR_V_BOUND: f64 = 1e12;

#[derive(Debug, Clone, Error)]
pub enum PotentialsError {
    #[error("ordering parameter {0} is not finite")]
    BadOrdering(&'static str),
    #[error("radial singularity: u = 0 at grid index {0}")]
    RadialSingularity(usize),
    #[error("e^(-4u) overflows for u = {0}; shrink the domain on the left")]
    MorseDomain(f64),
    #[error("exactly-solvable ladder requires q = 0, got q = {0}")]
    LadderNeedsQZero(f64),
    #[error(transparent)]
    Mass(#[from] MassError),
    #[error(transparent)]
    Algebra(#[from] algebra::AlgebraError),
}

/// Kinetic-operator ordering exponents (α, β); γ is always −1−α−β so the
/// constraint α+β+γ = −1 holds exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassOrdering {
    pub alpha: f64,
    pub beta: f64,
}

impl MassOrdering {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, PotentialsError> {
        if !alpha.is_finite() {
            return Err(PotentialsError::BadOrdering("alpha"));
        }
        if !beta.is_finite() {
            return Err(PotentialsError::BadOrdering("beta"));
        }
        Ok(Self { alpha, beta })
    }

    pub fn gamma(&self) -> f64 {
        -1.0 - self.alpha - self.beta
    }
}

/// A sampled potential with metadata. Singular points stay in `v` as
/// computed (possibly huge or NaN) but are listed in `excluded`; consumers
/// skip them.
#[derive(Debug, Clone)]
pub struct PotentialCurve {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub excluded: Vec<usize>,
    pub family: &'static str,
    pub params: AlgebraParams,
    pub ordering: MassOrdering,
    pub mass_text: String,
    pub energy: Option<f64>,
    pub epsilon: Option<f64>,
}

impl PotentialCurve {
    fn finish(mut self) -> Self {
        for (i, v) in self.v.iter().enumerate() {
            if !v.is_finite() || v.abs() > SINGULAR_V_BOUND {
                self.excluded.push(i);
            }
        }
        self.excluded.sort_unstable();
        self.excluded.dedup();
        self
    }

    /// Retained (non-excluded) points.
    pub fn retained(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.x
            .iter()
            .zip(self.v.iter())
            .enumerate()
            .filter(move |(i, _)| self.excluded.binary_search(i).is_err())
            .map(|(_, (x, v))| (*x, *v))
    }
}

/// The two mass-ordering terms shared by all three family potentials:
/// (α(α+β+1)+β+9/16)·m′²/(2m³) − (1+2β)·m″/(8m²).
fn family_mass_terms(ord: &MassOrdering, m: f64, m1: f64, m2: f64) -> f64 {
    let (a, b) = (ord.alpha, ord.beta);
    (a * (a + b + 1.0) + b + 9.0 / 16.0) * m1 * m1 / (2.0 * m * m * m)
        - (1.0 + 2.0 * b) * m2 / (8.0 * m * m)
}

/// Radial sextic family:
/// V = ℓ(ℓ+1)/(2u²) + ½(b²−(2ℓ+8j+5)q)u² + bqu⁴ + ½q²u⁶ + mass terms.
pub fn v_sextic(
    params: &AlgebraParams,
    ord: &MassOrdering,
    p: &MassProfile,
    map: &MappingSample,
) -> Result<PotentialCurve, PotentialsError> {
    let (ell, b, q) = (params.ell, params.b, params.q);
    let c = 2.0 * ell + 8.0 * params.j() + 5.0;
    let mut v = Vec::with_capacity(map.grid.n);
    for i in 0..map.grid.n {
        let u = map.u[i];
        if u == 0.0 {
            return Err(PotentialsError::RadialSingularity(i));
        }
        let (m, m1, m2) = p.eval(map.x[i])?;
        let u2 = u * u;
        let val = ell * (ell + 1.0) / (2.0 * u2)
            + 0.5 * (b * b - c * q) * u2
            + b * q * u2 * u2
            + 0.5 * q * q * u2 * u2 * u2
            + family_mass_terms(ord, m, m1, m2);
        v.push(val);
    }
    Ok(PotentialCurve {
        x: map.x.clone(),
        v,
        excluded: Vec::new(),
        family: "sextic",
        params: *params,
        ordering: *ord,
        mass_text: p.text.clone(),
        energy: None,
        epsilon: None,
    }
    .finish())
}

/// Sextic energy: E = (ℓ+3/2)·b + 2ε.
pub fn e_sextic(params: &AlgebraParams, epsilon: f64) -> f64 {
    (params.ell + 1.5) * params.b + 2.0 * epsilon
}

/// Coulomb-like family:
/// V = (ℓ(ℓ+1)−3/4)/(8u²) − (4ε+(2ℓ+3)b)/(4u) + 2bqu + 2q²u² + mass terms.
pub fn v_coulomb(
    params: &AlgebraParams,
    ord: &MassOrdering,
    p: &MassProfile,
    map: &MappingSample,
    epsilon: f64,
) -> Result<PotentialCurve, PotentialsError> {
    let (ell, b, q) = (params.ell, params.b, params.q);
    let mut v = Vec::with_capacity(map.grid.n);
    for i in 0..map.grid.n {
        let u = map.u[i];
        if u == 0.0 {
            return Err(PotentialsError::RadialSingularity(i));
        }
        let (m, m1, m2) = p.eval(map.x[i])?;
        let val = (ell * (ell + 1.0) - 0.75) / (8.0 * u * u)
            - (4.0 * epsilon + (2.0 * ell + 3.0) * b) / (4.0 * u)
            + 2.0 * b * q * u
            + 2.0 * q * q * u * u
            + family_mass_terms(ord, m, m1, m2);
        v.push(val);
    }
    Ok(PotentialCurve {
        x: map.x.clone(),
        v,
        excluded: Vec::new(),
        family: "coulomb",
        params: *params,
        ordering: *ord,
        mass_text: p.text.clone(),
        energy: None,
        epsilon: Some(epsilon),
    }
    .finish())
}

/// Coulomb energy: E = −½((2ℓ+8j+5)q − b²).
pub fn e_coulomb(params: &AlgebraParams) -> f64 {
    let c = 2.0 * params.ell + 8.0 * params.j() + 5.0;
    -0.5 * (c * params.q - params.b * params.b)
}

/// Morse-like family:
/// V = ½(ε+(ℓ/2+3/4)b)e^{−u} + ½(b²/4−(ℓ/2+j+5/4)q)e^{−2u}
///     − (bq/4)e^{−3u} + (q²/8)e^{−4u} + mass terms.
pub fn v_morse(
    params: &AlgebraParams,
    ord: &MassOrdering,
    p: &MassProfile,
    map: &MappingSample,
    epsilon: f64,
) -> Result<PotentialCurve, PotentialsError> {
    let (ell, b, q) = (params.ell, params.b, params.q);
    let j = params.j();
    if let Some(&u_min) = map
        .u
        .iter()
        .min_by(|a, c| a.partial_cmp(c).unwrap())
    {
        if -4.0 * u_min > 700.0 {
            return Err(PotentialsError::MorseDomain(u_min));
        }
    }
    let mut v = Vec::with_capacity(map.grid.n);
    for i in 0..map.grid.n {
        let e1 = (-map.u[i]).exp();
        let e2 = e1 * e1;
        let (m, m1, m2) = p.eval(map.x[i])?;
        let val = 0.5 * (epsilon + (ell / 2.0 + 0.75) * b) * e1
            + 0.5 * (b * b / 4.0 - (ell / 2.0 + j + 1.25) * q) * e2
            - (b * q / 4.0) * e1 * e2
            + (q * q / 8.0) * e2 * e2
            + family_mass_terms(ord, m, m1, m2);
        v.push(val);
    }
    Ok(PotentialCurve {
        x: map.x.clone(),
        v,
        excluded: Vec::new(),
        family: "morse",
        params: *params,
        ordering: *ord,
        mass_text: p.text.clone(),
        energy: None,
        epsilon: Some(epsilon),
    }
    .finish())
}

/// Morse energy: E = −(ℓ(ℓ+1)+1/4)/8.
pub fn e_morse(params: &AlgebraParams) -> f64 {
    -(params.ell * (params.ell + 1.0) + 0.25) / 8.0
}

/// The general (implicit) potential for an arbitrary mapping:
///
/// V = E + (1/m)·{ (β+1/4+α(α+β+1))m′²/(2m²) − βm″/(4m)
///                 + (3/8)(r″/r′)² − r‴/(4r′)
///                 + [b² − (2ℓ+8j+5)q + (4ε+b(2ℓ+3))/r + (ℓ(ℓ+1)−3/4)/r²
///                    − 2bqr + q²r²]·r′²/8 }.
///
/// Points where r or r′ vanish are flagged in `excluded`.
pub fn v_general(
    params: &AlgebraParams,
    ord: &MassOrdering,
    p: &MassProfile,
    map: &MappingSample,
    epsilon: f64,
    energy: f64,
) -> Result<PotentialCurve, PotentialsError> {
    let (ell, b, q) = (params.ell, params.b, params.q);
    let (alpha, beta) = (ord.alpha, ord.beta);
    let c = 2.0 * ell + 8.0 * params.j() + 5.0;
    let mut v = Vec::with_capacity(map.grid.n);
    let mut excluded = Vec::new();
    for i in 0..map.grid.n {
        let (r, r1, r2, r3) = (map.r[i], map.r1[i], map.r2[i], map.r3[i]);
        if r == 0.0 || r1 == 0.0 {
            excluded.push(i);
            v.push(f64::NAN);
            continue;
        }
        let (m, m1, m2) = p.eval(map.x[i])?;
        let line1 = (beta + 0.25 + alpha * (alpha + beta + 1.0)) * m1 * m1 / (2.0 * m * m)
            - beta * m2 / (4.0 * m)
            + 0.375 * (r2 / r1) * (r2 / r1)
            - r3 / (4.0 * r1);
        let bracket = b * b - c * q + (4.0 * epsilon + b * (2.0 * ell + 3.0)) / r
            + (ell * (ell + 1.0) - 0.75) / (r * r)
            - 2.0 * b * q * r
            + q * q * r * r;
        let val = energy + (line1 + bracket * r1 * r1 / 8.0) / m;
        v.push(val);
    }
    Ok(PotentialCurve {
        x: map.x.clone(),
        v,
        excluded,
        family: "general",
        params: *params,
        ordering: *ord,
        mass_text: p.text.clone(),
        energy: Some(energy),
        epsilon: Some(epsilon),
    }
    .finish())
}

/// One rung of the exactly-solvable q = 0 ladder: ε_n = n·b with a
/// terminating degree-n polynomial factor.
#[derive(Debug, Clone)]
pub struct ExactState {
    pub n: usize,
    pub epsilon: f64,
    pub coeffs: Vec<f64>,
}

/// The q = 0 reduction: the spectral problem degenerates to the infinite
/// ladder ε_n = n·b, n = 0, 1, 2, …; the series coefficients terminate at
/// degree n exactly. Returns the lowest `count` rungs.
pub fn exactly_solvable_states(
    params: &AlgebraParams,
    count: usize,
) -> Result<Vec<ExactState>, PotentialsError> {
    if params.q != 0.0 {
        return Err(PotentialsError::LadderNeedsQZero(params.q));
    }
    let mut out = Vec::with_capacity(count);
    for n in 0..count {
        let epsilon = n as f64 * params.b;
        let mut coeffs = algebra::ode_series_coefficients(params, epsilon, n)?;
        let peak = coeffs.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        if peak > 0.0 {
            for c in &mut coeffs {
                *c /= peak;
            }
        }
        out.push(ExactState { n, epsilon, coeffs });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::{radial_u_offset, FamilySpec, Grid};
    use std::collections::BTreeMap;

    fn constant_mass(domain: (f64, f64)) -> MassProfile {
        MassProfile::builtin("constant", BTreeMap::new(), domain).unwrap()
    }

    fn rational2(domain: (f64, f64)) -> MassProfile {
        MassProfile::builtin("rational2", BTreeMap::new(), domain).unwrap()
    }

    fn params(ell: f64, b: f64, q: f64, two_j: u32) -> AlgebraParams {
        AlgebraParams::new(ell, b, q, two_j).unwrap()
    }

    fn ordering(alpha: f64, beta: f64) -> MassOrdering {
        MassOrdering::new(alpha, beta).unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
        assert!(
            (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0),
            "{what}: {a} vs {b}"
        );
    }

    /// Constant-mass map with u(x) = x exactly (grid away from 0, offset by
    /// x_min so the arc length is measured from the physical origin).
    fn unit_mass_map(pars: &AlgebraParams, fam: FamilySpec, g: &Grid) -> (MassProfile, MappingSample) {
        let p = constant_mass((0.0, g.x_max + 1.0));
        let off = radial_u_offset(&p, g.x_min);
        let map = MappingSample::build(pars, fam, &p, g, off).unwrap();
        (p, map)
    }

    #[test]
    fn sextic_energy_hand_value() {
        assert_eq!(e_sextic(&params(1.0, 2.0, 1.0, 1), 0.0), 5.0);
    }

    #[test]
    fn sextic_constant_mass_curve() {
        // ℓ=0, b=0, q=1, j=1/2 ⇒ V = −4.5u² + 0.5u⁶, V(1) = −4
        let pars = params(0.0, 0.0, 1.0, 1);
        let g = Grid::new(0.25, 2.0, 57).unwrap();
        let (p, map) = unit_mass_map(&pars, FamilySpec::Sextic, &g);
        let curve = v_sextic(&pars, &ordering(0.0, -1.0), &p, &map).unwrap();
        assert!(curve.excluded.is_empty());
        for i in 0..g.n {
            let x = g.point(i);
            assert_close(map.u[i], x, 1e-13, "u = x");
            let expect = -4.5 * x * x + 0.5 * x.powi(6);
            assert_close(curve.v[i], expect, 1e-12, "V = -4.5x² + 0.5x⁶");
        }
        let i1 = 24; // x = 1
        assert_close(curve.x[i1], 1.0, 1e-15, "x grid point");
        assert_close(curve.v[i1], -4.0, 1e-12, "V(1) = -4");
    }

    #[test]
    fn sextic_q0_reduction_shape() {
        // q = 0 leaves only the u^{-2} and u² terms
        let pars = params(1.0, 2.0, 0.0, 1);
        let g = Grid::new(0.25, 2.0, 57).unwrap();
        let (p, map) = unit_mass_map(&pars, FamilySpec::Sextic, &g);
        let curve = v_sextic(&pars, &ordering(0.0, -1.0), &p, &map).unwrap();
        for i in 0..g.n {
            let u = map.u[i];
            let expect = 1.0 * 2.0 / (2.0 * u * u) + 0.5 * 4.0 * u * u;
            assert_close(curve.v[i], expect, 1e-12, "harmonic plus centrifugal");
        }
    }

    #[test]
    fn coulomb_energy_hand_values() {
        assert_eq!(e_coulomb(&params(0.0, 3.0, 1.0, 1)), 0.0);
        assert_eq!(e_coulomb(&params(0.0, 0.0, 1.0, 1)), -4.5);
    }

    #[test]
    fn coulomb_pointwise_hand_substitution() {
        // ℓ=0, b=0, q=0, ε=√(3/2): V(u) = −3/(32u²) − ε/u
        let pars = params(0.0, 0.0, 0.0, 1);
        let eps = (1.5f64).sqrt();
        let g = Grid::new(0.25, 2.0, 57).unwrap();
        let (p, map) = unit_mass_map(&pars, FamilySpec::Coulomb, &g);
        let curve = v_coulomb(&pars, &ordering(0.0, -1.0), &p, &map, eps).unwrap();
        for i in 0..g.n {
            let u = map.u[i];
            let expect = -3.0 / (32.0 * u * u) - eps / u;
            assert_close(curve.v[i], expect, 1e-12, "coulomb hand form");
        }
        // at u = 1 specifically, V = −3/32 − √(3/2)
        let i1 = 24;
        assert_close(map.u[i1], 1.0, 1e-13, "u = 1");
        assert_close(curve.v[i1], -3.0 / 32.0 - eps, 1e-12, "V(u=1)");
    }

    #[test]
    fn morse_energy_hand_values() {
        assert_eq!(e_morse(&params(0.0, 0.0, 1.0, 1)), -0.03125);
        assert_eq!(e_morse(&params(1.0, 5.0, 2.0, 3)), -0.28125);
    }

    #[test]
    fn morse_pointwise_hand_substitution() {
        // j=0, m=1, ℓ=0, b=0, q=2, ε=0 at u=0: V = ½(−(5/4)·2) + 4/8 = −0.75
        let pars = params(0.0, 0.0, 2.0, 0);
        let g = Grid::new(0.0, 2.0, 33).unwrap();
        let p = constant_mass((-1.0, 3.0));
        let map = MappingSample::build(&pars, FamilySpec::Morse, &p, &g, 0.0).unwrap();
        let curve = v_morse(&pars, &ordering(0.0, -1.0), &p, &map, 0.0).unwrap();
        assert_close(map.u[0], 0.0, 1e-15, "u(x_min) = 0");
        assert_close(curve.v[0], -0.75, 1e-13, "V at u=0");
    }

    #[test]
    fn general_matches_sextic_for_constant_mass() {
        let pars = params(0.0, 0.0, 1.0, 1);
        let eps = (1.5f64).sqrt();
        let g = Grid::new(0.25, 2.0, 57).unwrap();
        let (p, map) = unit_mass_map(&pars, FamilySpec::Sextic, &g);
        let ord = ordering(0.0, -1.0);
        let fam = v_sextic(&pars, &ord, &p, &map).unwrap();
        let gen = v_general(&pars, &ord, &p, &map, eps, e_sextic(&pars, eps)).unwrap();
        for i in 0..g.n {
            assert_close(gen.v[i], fam.v[i], 1e-10, "general vs sextic, m = 1");
        }
    }

    #[test]
    fn general_matches_sextic_for_varying_mass() {
        // the sextic family absorbs the weight contributions exactly, for any
        // ordering and any mass
        let pars = params(0.5, -0.8, 1.5, 2);
        let g = Grid::new(0.3, 2.2, 65).unwrap();
        let p = rational2((0.0, 3.0));
        let off = radial_u_offset(&p, g.x_min);
        let map = MappingSample::build(&pars, FamilySpec::Sextic, &p, &g, off).unwrap();
        let ord = ordering(-0.5, 0.25);
        let eps = 0.37; // need not be a root for this identity
        let fam = v_sextic(&pars, &ord, &p, &map).unwrap();
        let gen = v_general(&pars, &ord, &p, &map, eps, e_sextic(&pars, eps)).unwrap();
        for i in 0..g.n {
            assert_close(gen.v[i], fam.v[i], 1e-9, "general vs sextic, varying m");
        }
    }

    #[test]
    fn general_vs_coulomb_constant_offset() {
        // the published pair differs by the constant b² − (2ℓ+8j+5)q,
        // vanishing exactly on the b² = (2ℓ+8j+5)q locus
        let g = Grid::new(0.25, 2.0, 57).unwrap();
        let ord = ordering(0.0, -1.0);
        // on the locus: ℓ=0, j=1/2, q=1, b=3 ⇒ offset 0
        let pars = params(0.0, 3.0, 1.0, 1);
        let eps = 0.4;
        let (p, map) = unit_mass_map(&pars, FamilySpec::Coulomb, &g);
        let fam = v_coulomb(&pars, &ord, &p, &map, eps).unwrap();
        let gen = v_general(&pars, &ord, &p, &map, eps, e_coulomb(&pars)).unwrap();
        for i in 0..g.n {
            assert_close(gen.v[i], fam.v[i], 1e-9, "coulomb on the zero-offset locus");
        }
        // off the locus: pointwise difference equals the documented constant
        let pars = params(0.2, 1.0, 0.8, 2);
        let (p, map) = unit_mass_map(&pars, FamilySpec::Coulomb, &g);
        let fam = v_coulomb(&pars, &ord, &p, &map, eps).unwrap();
        let gen = v_general(&pars, &ord, &p, &map, eps, e_coulomb(&pars)).unwrap();
        let c = 2.0 * pars.ell + 8.0 * pars.j() + 5.0;
        let offset = pars.b * pars.b - c * pars.q;
        for i in 0..g.n {
            assert_close(gen.v[i] - fam.v[i], offset, 1e-9, "constant offset");
        }
    }

    #[test]
    fn general_vs_morse_offset() {
        // exact at j = 0; differs by −(jq/2)e^{−2u} otherwise
        let g = Grid::new(0.0, 2.0, 33).unwrap();
        let ord = ordering(0.0, -1.0);
        let p = constant_mass((-1.0, 3.0));
        let eps = 0.15;
        // j = 0: exact agreement
        let pars = params(0.4, 0.9, 1.1, 0);
        let map = MappingSample::build(&pars, FamilySpec::Morse, &p, &g, 0.0).unwrap();
        let fam = v_morse(&pars, &ord, &p, &map, eps).unwrap();
        let gen = v_general(&pars, &ord, &p, &map, eps, e_morse(&pars)).unwrap();
        for i in 0..g.n {
            assert_close(gen.v[i], fam.v[i], 1e-9, "morse at j=0");
        }
        // j = 1: documented e^{−2u} defect
        let pars = params(0.4, 0.9, 1.1, 2);
        let map = MappingSample::build(&pars, FamilySpec::Morse, &p, &g, 0.0).unwrap();
        let fam = v_morse(&pars, &ord, &p, &map, eps).unwrap();
        let gen = v_general(&pars, &ord, &p, &map, eps, e_morse(&pars)).unwrap();
        for i in 0..g.n {
            let expect = -(pars.j() * pars.q / 2.0) * (-2.0 * map.u[i]).exp();
            assert_close(gen.v[i] - fam.v[i], expect, 1e-9, "morse j>0 defect");
        }
    }

    #[test]
    fn ordering_terms_vanish_for_constant_mass() {
        let pars = params(0.3, 0.7, 1.3, 2);
        let g = Grid::new(0.25, 2.0, 57).unwrap();
        let (p, map) = unit_mass_map(&pars, FamilySpec::Sextic, &g);
        let mut s = 0xACE1_u64;
        let mut rng = move || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s as f64 / u64::MAX as f64) * 2.0 - 1.0
        };
        let base = v_sextic(&pars, &ordering(0.0, 0.0), &p, &map).unwrap();
        for _ in 0..8 {
            let ord = ordering(2.0 * rng(), 2.0 * rng());
            let curve = v_sextic(&pars, &ord, &p, &map).unwrap();
            for i in 0..g.n {
                assert!(
                    (curve.v[i] - base.v[i]).abs() < 1e-12,
                    "ordering must not matter for m = 1"
                );
            }
        }
    }

    #[test]
    fn ordering_difference_depends_only_on_mass_combos() {
        // V(α,β) − V(α′,β′) is a combination of m′²/m³ and m″/m² only
        let pars = params(0.0, 0.0, 1.0, 1);
        let g = Grid::new(0.3, 2.0, 57).unwrap();
        let p = rational2((0.0, 3.0));
        let off = radial_u_offset(&p, g.x_min);
        let map = MappingSample::build(&pars, FamilySpec::Sextic, &p, &g, off).unwrap();
        let o1 = ordering(-0.5, 0.0);
        let o2 = ordering(0.0, -1.0);
        let c1 = v_sextic(&pars, &o1, &p, &map).unwrap();
        let c2 = v_sextic(&pars, &o2, &p, &map).unwrap();
        for i in 0..g.n {
            let (m, m1, m2) = p.eval(map.x[i]).unwrap();
            let k1 = o1.alpha * (o1.alpha + o1.beta + 1.0) + o1.beta;
            let k2 = o2.alpha * (o2.alpha + o2.beta + 1.0) + o2.beta;
            let expect = (k1 - k2) * m1 * m1 / (2.0 * m * m * m)
                - 2.0 * (o1.beta - o2.beta) * m2 / (8.0 * m * m);
            assert_close(c1.v[i] - c2.v[i], expect, 1e-11, "isolated ordering terms");
        }
    }

    #[test]
    fn ladder_requires_q_zero() {
        let err = exactly_solvable_states(&params(0.0, 1.0, 1.0, 1), 3).unwrap_err();
        assert!(matches!(err, PotentialsError::LadderNeedsQZero(_)));
    }

    #[test]
    fn ladder_states_terminate() {
        let pars = params(0.3, 1.1, 0.0, 0);
        let states = exactly_solvable_states(&pars, 4).unwrap();
        assert_eq!(states.len(), 4);
        for s in &states {
            assert_close(s.epsilon, s.n as f64 * pars.b, 1e-15, "ε = n·b");
            assert_eq!(s.coeffs.len(), s.n + 1);
            assert!(s.coeffs[s.n].abs() > 0.0, "leading coefficient present");
        }
    }

    #[test]
    fn singular_points_excluded() {
        // drive |V| past the bound with a tiny u value: ℓ > 0 gives 1/u²
        let pars = params(3.0, 0.0, 1.0, 1);
        let g = Grid::new(1e-7, 1.0, 33).unwrap();
        let p = constant_mass((0.0, 2.0));
        let map = MappingSample::build(&pars, FamilySpec::Sextic, &p, &g, 1e-7).unwrap();
        let curve = v_sextic(&pars, &ordering(0.0, -1.0), &p, &map).unwrap();
        assert!(!curve.excluded.is_empty(), "near-origin point must be excluded");
        assert!(curve.retained().count() < g.n);
    }
}
