//! Bohr-type inequalities for holomorphic maps into the closed unit polydisc.
//!
//! Maps are studied through one-variable slices `g_i(t) = F_i(t z0)`, each a
//! Schur-class function represented by a truncated Taylor series with an
//! explicit tail budget. On top of that the crate evaluates three refined
//! Bohr functionals plus the classical Bohr sum, computes their sharp radii,
//! searches extremal Möbius families for witnesses that the radii cannot be
//! enlarged, and reproduces the two-component maps showing that equal initial
//! moduli are required.
//!
//! ```
//! use bohr_core::{closed_form_radius, random_equimodular_slice, verify_theorem, FunctionalSpec};
//!
//! let spec = FunctionalSpec::Refined { p: 2 };
//! let r = closed_form_radius(&spec).unwrap();
//! let slice = random_equimodular_slice(7, 2, 64).unwrap();
//! assert!(verify_theorem(&slice, &spec, r).unwrap().holds);
//! ```

pub mod error;
pub mod functional;
pub mod scalar;
pub mod series;
pub mod sharpness;
pub mod slice;

pub use error::{BohrError, Result};
pub use functional::{
    eval_functional, eval_functional_with_phases, verify_theorem, verify_theorem_with_phases,
    FunctionalSpec, FunctionalValue, Verification, BOUND_TOLERANCE,
};
pub use scalar::{
    bisect_monotone, check_g2_factorization, closed_form_radius, solve_radius, Auxiliary,
    FactorizationCheck, RadiusEquation, RadiusResult, DEFAULT_SOLVER_TOL,
};
pub use series::{
    eval_series, mobius_series, random_schur_series, schur_series_from_parameters, tail_bound,
    MobiusSign, TailBoundKind, TailBudget, TermKind, TruncatedSeries, DEFAULT_TRUNCATION,
};
pub use sharpness::{
    extremal_slice, extremal_value, extremal_value_with, find_witness, find_witness_with,
    reproduce_counterexample, CounterexampleId, CounterexampleReport, SharpnessWitness,
    WitnessSearch, DEFAULT_LAMBDA_LEVELS,
};
pub use slice::{
    growth_bound, random_equimodular_slice, CoefficientNorms, ModulusEstimate, PolydiscSlice,
    DEFAULT_PHASES,
};
