//! Quasi-exactly-solvable potential families for Schrödinger problems with a
//! position-dependent effective mass.
//!
//! The crate builds, for a chosen mass profile m(x) and algebra parameters
//! (ℓ, b, q, j), the finite algebraic part of a bound-state spectrum together
//! with the potential and wavefunctions that realize it:
//!
//! * [`algebra`] — the three-term recurrence polynomials, the critical
//!   polynomial and its roots (the ε-spectrum), and an independent sl(2,ℝ)
//!   matrix representation whose eigenvalues must coincide with those roots.
//! * [`massprofile`] — a small expression language for m(x) with exact
//!   symbolic first and second derivatives.
//! * [`mapping`] — the change-of-variable chain x → u → r, the weight
//!   function, and wavefunction assembly.
//! * [`potentials`] — the general potential and the sextic / Coulomb-like /
//!   Morse-like families with their closed-form energies.
//! * [`oracle`] — an independent finite-difference eigensolver for the
//!   symmetrized variable-mass Hamiltonian, plus a pointwise ODE-residual
//!   checker; every constructed (m, V, E, ψ) is validated against it.
//! * [`cli`] — configuration, pipeline orchestration, and the CSV/JSON
//!   reports behind the `qes-pdm` binary.
//!
//! See the crate examples for end-to-end usage of each capability.

pub mod algebra;
pub mod cli;
pub mod linalg;
pub mod mapping;
pub mod massprofile;
pub mod oracle;
pub mod potentials;

pub use algebra::{AlgebraParams, EpsilonSpectrum, OperatorMatrix, SpectralTable};
pub use mapping::{FamilySpec, Grid, MappingSample};
pub use massprofile::MassProfile;
pub use oracle::{DiscretizedOperator, OracleResult};
pub use potentials::{MassOrdering, PotentialCurve};
