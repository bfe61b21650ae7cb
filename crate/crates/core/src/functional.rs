//! The Bohr-type functionals and their two-sided evaluation on a slice.
//!
//! Each evaluation returns a [`FunctionalValue`] carrying both directions:
//!
//! * `upper` replaces modulus terms by closed-form bounds (the growth bound for
//!   `‖F‖`, the majorant `Σ Q_n r^n` for `‖F - F(0)‖`) and adds the geometric
//!   budget for the truncated sums. It never underestimates the functional, so
//!   "≤ 1" checks use it.
//! * `lower` samples modulus terms on the circle and shrinks them by the
//!   truncation tail; sums are truncated. It never overestimates, so "> 1"
//!   witnesses use it.

use serde::{Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

use crate::error::{check_unit_radius, domain, BohrError, Result};
use crate::scalar::closed_form_radius;
use crate::series::{geometric_tail, TermKind};
use crate::slice::{growth_bound, PolydiscSlice, DEFAULT_PHASES};

/// Absolute tolerance for every "≤ 1" check.
pub const BOUND_TOLERANCE: f64 = 1e-10;

/// Which Bohr-type functional to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionalSpec {
    /// `‖F(z)‖² + Σ ‖P_n(z)‖²`
    ImprovedSquared,
    /// `‖F(z) - F(0)‖ + ‖F(0)‖^p + Σ ‖P_n(z)‖ + (1/(1+‖a‖) + r/(1-r)) Σ ‖P_n(z)‖²`, `p ∈ {1, 2}`
    Refined { p: u8 },
    /// `‖F(ν(z))‖ + Σ ‖P_n(z)‖ + (1/(1+‖a‖) + r/(1-r)) Σ ‖P_n(z)‖²` with `ν` of order `k`
    Composed { k: u32 },
    /// `‖F(0)‖ + Σ ‖P_n(z)‖`
    Classical,
}

impl FunctionalSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Refined { p } if p != 1 && p != 2 => domain(format!("p = {p} must be 1 or 2")),
            Self::Composed { k: 0 } => domain("k must be at least 1"),
            _ => Ok(()),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::ImprovedSquared => "improved_squared",
            Self::Refined { .. } => "refined_p",
            Self::Composed { .. } => "composed_k",
            Self::Classical => "classical",
        }
    }

    pub fn p(&self) -> Option<u8> {
        match *self {
            Self::Refined { p } => Some(p),
            _ => None,
        }
    }

    pub fn k(&self) -> Option<u32> {
        match *self {
            Self::Composed { k } => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for FunctionalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Refined { p } => write!(f, "refined_p(p={p})"),
            Self::Composed { k } => write!(f, "composed_k(k={k})"),
            other => f.write_str(other.kind_name()),
        }
    }
}

/// Parses the kind name only; `refined_p` and `composed_k` default to `p = 1`, `k = 1`.
impl FromStr for FunctionalSpec {
    type Err = BohrError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "improved_squared" => Ok(Self::ImprovedSquared),
            "refined_p" => Ok(Self::Refined { p: 1 }),
            "composed_k" => Ok(Self::Composed { k: 1 }),
            "classical" => Ok(Self::Classical),
            other => domain(format!("unknown functional '{other}'")),
        }
    }
}

impl Serialize for FunctionalSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("FunctionalSpec", 3)?;
        st.serialize_field("kind", self.kind_name())?;
        st.serialize_field("p", &self.p())?;
        st.serialize_field("k", &self.k())?;
        st.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalValue {
    /// Value from sampled modulus terms and truncated sums, before any correction.
    pub truncated: f64,
    /// Budget for everything discarded by truncation.
    pub tail: f64,
    pub upper: f64,
    pub lower: f64,
}

/// Evaluates `spec` on the slice at `|t| = r` with the default phase grid.
pub fn eval_functional(
    s: &PolydiscSlice,
    spec: &FunctionalSpec,
    r: f64,
) -> Result<FunctionalValue> {
    eval_functional_with_phases(s, spec, r, DEFAULT_PHASES)
}

pub fn eval_functional_with_phases(
    s: &PolydiscSlice,
    spec: &FunctionalSpec,
    r: f64,
    phases: usize,
) -> Result<FunctionalValue> {
    if !matches!(spec, FunctionalSpec::Classical) && !s.is_equimodular() {
        return Err(BohrError::Precondition(
            "the slice is not equimodular: |g_i(0)| differs across components".into(),
        ));
    }
    evaluate(s, spec, r, phases)
}

/// Evaluation without the equimodular precondition, for counterexamples.
pub(crate) fn evaluate(
    s: &PolydiscSlice,
    spec: &FunctionalSpec,
    r: f64,
    phases: usize,
) -> Result<FunctionalValue> {
    spec.validate()?;
    check_unit_radius(r)?;
    if !s.is_certified() {
        return Err(BohrError::Certification(
            "functional evaluation needs Schur-certified components".into(),
        ));
    }
    let norms = s.coefficient_norms();
    let x = norms.a_norm;
    let n = s.truncation_order();

    let mut linear = 0.0;
    let mut square = 0.0;
    let mut rn = 1.0;
    for q in &norms.q {
        rn *= r;
        linear += q * rn;
        square += (q * rn) * (q * rn);
    }

    // Q_n <= max_i (1 - |a_i|^2) for certified components.
    let budget = s
        .components()
        .iter()
        .map(|c| c.coefficient_bound())
        .fold(0.0, f64::max);
    let linear_tail = geometric_tail(budget, n, r, TermKind::LinearSum);
    let square_tail = geometric_tail(budget, n, r, TermKind::SquareSum);
    let modulus_tail = geometric_tail(budget, n, r, TermKind::Modulus);
    let weight = 1.0 / (1.0 + x) + r / (1.0 - r);

    let value = match *spec {
        FunctionalSpec::ImprovedSquared => {
            let sampled = s.sup_modulus(r, phases)?.sampled;
            let certain = (sampled - modulus_tail).max(0.0);
            let bound = growth_bound(x, r);
            FunctionalValue {
                truncated: sampled * sampled + square,
                tail: square_tail,
                upper: bound * bound + square + square_tail,
                lower: certain * certain + square,
            }
        }
        FunctionalSpec::Refined { p } => {
            let increment = s.sup_increment(r, phases)?;
            let certain = (increment - modulus_tail).max(0.0);
            let rest = x.powi(p as i32) + linear + weight * square;
            let tail = 2.0 * linear_tail + weight * square_tail;
            FunctionalValue {
                truncated: increment + rest,
                tail,
                upper: linear + rest + tail,
                lower: certain + rest,
            }
        }
        FunctionalSpec::Composed { k } => {
            let composed = s.schwarz_compose(k as usize)?;
            let sampled = composed.sup_modulus(r, phases)?.sampled;
            let certain = (sampled - modulus_tail).max(0.0);
            let rest = linear + weight * square;
            let tail = linear_tail + weight * square_tail;
            FunctionalValue {
                truncated: sampled + rest,
                tail,
                upper: growth_bound(x, r.powi(k as i32)) + rest + tail,
                lower: certain + rest,
            }
        }
        FunctionalSpec::Classical => FunctionalValue {
            truncated: x + linear,
            tail: linear_tail,
            upper: x + linear + linear_tail,
            lower: x + linear,
        },
    };
    Ok(value)
}

/// Whether the functional stays below `1 + BOUND_TOLERANCE` at `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verification {
    pub holds: bool,
    pub value: FunctionalValue,
}

/// Checks the inequality `functional ≤ 1` at a radius not exceeding the sharp one.
pub fn verify_theorem(s: &PolydiscSlice, spec: &FunctionalSpec, r: f64) -> Result<Verification> {
    verify_theorem_with_phases(s, spec, r, DEFAULT_PHASES)
}

/// [`verify_theorem`] with an explicit phase count for the reported lower value.
pub fn verify_theorem_with_phases(
    s: &PolydiscSlice,
    spec: &FunctionalSpec,
    r: f64,
    phases: usize,
) -> Result<Verification> {
    let radius = closed_form_radius(spec)?;
    if r > radius + 1e-12 {
        return Err(BohrError::Precondition(format!(
            "r = {r} exceeds the sharp radius {radius} of {spec}"
        )));
    }
    if !s.is_equimodular() {
        return Err(BohrError::Precondition(
            "the slice is not equimodular".into(),
        ));
    }
    let value = eval_functional_with_phases(s, spec, r, phases)?;
    Ok(Verification {
        holds: value.upper <= 1.0 + BOUND_TOLERANCE,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{extremal_initial_value, improved_squared_radius};
    use crate::series::{mobius_series, MobiusSign, TruncatedSeries};
    use crate::slice::random_equimodular_slice;
    use num_complex::Complex64;

    fn single(s: TruncatedSeries) -> PolydiscSlice {
        PolydiscSlice::single(s)
    }

    #[test]
    fn identity_improved_squared() {
        let id = single(TruncatedSeries::identity(16).unwrap());
        let v = eval_functional(&id, &FunctionalSpec::ImprovedSquared, 0.5).unwrap();
        assert!((v.truncated - 0.5).abs() < 1e-15);
        assert!((v.upper - v.tail - 0.5).abs() < 1e-15);
        assert!(v.tail < 1e-10);
    }

    #[test]
    fn identity_classical() {
        let id = single(TruncatedSeries::identity(16).unwrap());
        let v = eval_functional(&id, &FunctionalSpec::Classical, 1.0 / 3.0).unwrap();
        assert!((v.truncated - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn extremal_improved_squared_equals_one() {
        let lambda = extremal_initial_value();
        let r = improved_squared_radius();
        let s = single(mobius_series(lambda, MobiusSign::Plus, 64).unwrap());
        let v = eval_functional(&s, &FunctionalSpec::ImprovedSquared, r).unwrap();
        let closed = 64.0 * r * r / (121.0 - 33.0 * r * r)
            + (11.0 * r + 33f64.sqrt()).powi(2) / (33f64.sqrt() * r + 11.0).powi(2);
        assert!((closed - 1.0).abs() < 1e-12);
        assert!((v.upper - 1.0).abs() < 1e-9);
        assert!((v.lower - 1.0).abs() < 1e-9);
    }

    #[test]
    fn refined_minus_family_closed_form() {
        let (lambda, r) = (0.9, 0.2);
        let s = single(mobius_series(lambda, MobiusSign::Minus, 64).unwrap());
        let v = eval_functional(&s, &FunctionalSpec::Refined { p: 1 }, r).unwrap();
        let l2 = 1.0 - lambda * lambda;
        let closed = l2 * r / (1.0 - lambda * r) + lambda + l2 * r / (1.0 - r);
        assert!((closed - 0.993_841_463_414_6).abs() < 1e-12);
        assert!((v.upper - closed).abs() < 1e-12);
        assert!((v.lower - closed).abs() < 1e-12);
    }

    #[test]
    fn composed_plus_family_closed_form() {
        let (lambda, r, k) = (0.7, 0.3, 2u32);
        let s = single(mobius_series(lambda, MobiusSign::Plus, 64).unwrap());
        let v = eval_functional(&s, &FunctionalSpec::Composed { k }, r).unwrap();
        let rk = r * r;
        let closed = (lambda + rk) / (1.0 + lambda * rk) + (1.0 - lambda * lambda) * r / (1.0 - r);
        assert!((v.upper - closed).abs() < 1e-12);
        assert!((v.lower - closed).abs() < 1e-12);
    }

    #[test]
    fn zero_slice_is_zero() {
        let zero = single(TruncatedSeries::constant(Complex64::default(), 64).unwrap());
        for spec in [
            FunctionalSpec::ImprovedSquared,
            FunctionalSpec::Refined { p: 1 },
            FunctionalSpec::Refined { p: 2 },
            FunctionalSpec::Composed { k: 3 },
            FunctionalSpec::Classical,
        ] {
            let r = closed_form_radius(&spec).unwrap();
            let out = verify_theorem(&zero, &spec, r).unwrap();
            assert!(out.holds);
            assert_eq!(out.value.truncated, 0.0, "{spec}: {:?}", out.value);
            assert_eq!(out.value.lower, 0.0, "{spec}: {:?}", out.value);
        }
    }

    #[test]
    fn unimodular_start_is_degenerate() {
        let a = Complex64::from_polar(1.0, 1.1);
        let s = PolydiscSlice::new(vec![
            TruncatedSeries::constant(a, 8).unwrap(),
            TruncatedSeries::constant(a.conj(), 8).unwrap(),
        ])
        .unwrap();
        assert!(s.coefficient_norms().q.iter().all(|&q| q == 0.0));
        for r in [0.0, 0.3, 0.9] {
            let v = eval_functional(&s, &FunctionalSpec::ImprovedSquared, r).unwrap();
            assert!((v.upper - 1.0).abs() < 1e-12);
            for spec in [
                FunctionalSpec::Refined { p: 2 },
                FunctionalSpec::Composed { k: 2 },
            ] {
                let v = eval_functional(&s, &spec, r).unwrap();
                assert!(v.upper <= 1.0 + 1e-12, "{spec} at {r}: {v:?}");
            }
        }
    }

    #[test]
    fn reduction_for_one_component() {
        for seed in 0..20 {
            let s = random_equimodular_slice(seed, 1, 32).unwrap();
            let g = &s.components()[0];
            let r = 0.55;
            let x = g.a0().norm();
            let bound = (x + r) / (1.0 + x * r);
            let sum: f64 = (1..=32)
                .map(|n| g.coeff(n).norm_sqr() * r.powi(2 * n as i32))
                .sum();
            let v = eval_functional(&s, &FunctionalSpec::ImprovedSquared, r).unwrap();
            assert!((v.upper - v.tail - (bound * bound + sum)).abs() < 1e-14);
        }
    }

    #[test]
    fn preconditions() {
        let uneven = PolydiscSlice::new(vec![
            mobius_series(0.6, MobiusSign::Plus, 8).unwrap(),
            mobius_series(0.9, MobiusSign::Plus, 8).unwrap(),
        ])
        .unwrap();
        assert!(matches!(
            eval_functional(&uneven, &FunctionalSpec::ImprovedSquared, 0.3),
            Err(BohrError::Precondition(_))
        ));
        assert!(eval_functional(&uneven, &FunctionalSpec::Classical, 0.3).is_ok());
        let id = single(TruncatedSeries::identity(8).unwrap());
        assert!(matches!(
            eval_functional(&id, &FunctionalSpec::ImprovedSquared, 1.0),
            Err(BohrError::Domain(_))
        ));
        assert!(matches!(
            verify_theorem(&id, &FunctionalSpec::Refined { p: 1 }, 0.3),
            Err(BohrError::Precondition(_))
        ));
        let raw = single(
            TruncatedSeries::new(Complex64::default(), vec![Complex64::new(0.5, 0.0)]).unwrap(),
        );
        assert!(matches!(
            eval_functional(&raw, &FunctionalSpec::Classical, 0.3),
            Err(BohrError::Certification(_))
        ));
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(
            "classical".parse::<FunctionalSpec>().unwrap(),
            FunctionalSpec::Classical
        );
        assert!("bogus".parse::<FunctionalSpec>().is_err());
        assert_eq!(
            FunctionalSpec::Refined { p: 2 }.to_string(),
            "refined_p(p=2)"
        );
    }
}
