//! Truncated Taylor expansions of scalar Schur-class functions.
//!
//! A [`TruncatedSeries`] stores `g(t) = a0 + c1 t + ... + cN t^N`. Series that
//! come out of a construction guaranteeing `|g| <= 1` on the unit disc carry a
//! `schur_certified` flag; for those the coefficient bound
//! `|c_n| <= 1 - |a0|^2` holds and yields geometric majorants for every
//! discarded tail (see [`tail_bound`]).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::TAU;

use crate::error::{check_unit_radius, domain, BohrError, Result};

/// Default truncation order used throughout the crate.
pub const DEFAULT_TRUNCATION: usize = 64;

/// Slack allowed when checking the coefficient bound of a certified series.
pub const COEFFICIENT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    a0: Complex64,
    coeffs: Vec<Complex64>,
    schur_certified: bool,
}

impl TruncatedSeries {
    /// Builds an uncertified series. `coeffs[n - 1]` is the coefficient of `t^n`.
    pub fn new(a0: Complex64, coeffs: Vec<Complex64>) -> Result<Self> {
        if !a0.norm().is_finite() || a0.norm() > 1.0 + COEFFICIENT_SLACK {
            return domain(format!("constant term modulus {} exceeds 1", a0.norm()));
        }
        if coeffs.is_empty() {
            return domain("truncation order must be at least 1");
        }
        if coeffs.iter().any(|c| !c.norm().is_finite()) {
            return domain("coefficients must be finite");
        }
        Ok(Self {
            a0,
            coeffs,
            schur_certified: false,
        })
    }

    /// Builds a series asserted to be the expansion of a Schur-class function.
    ///
    /// The assertion is checked against the coefficient bound; a violation is
    /// reported as a [`BohrError::Certification`].
    pub fn certified(a0: Complex64, coeffs: Vec<Complex64>) -> Result<Self> {
        let mut s = Self::new(a0, coeffs)?;
        let bound = s.coefficient_bound();
        if let Some((n, c)) = s
            .coeffs
            .iter()
            .enumerate()
            .find(|(_, c)| c.norm() > bound + COEFFICIENT_SLACK)
        {
            return Err(BohrError::Certification(format!(
                "|c_{}| = {} exceeds 1 - |a0|^2 = {}",
                n + 1,
                c.norm(),
                bound
            )));
        }
        s.schur_certified = true;
        Ok(s)
    }

    /// `t ↦ t`, truncated at order `n`.
    pub fn identity(n: usize) -> Result<Self> {
        mobius_series(0.0, MobiusSign::Plus, n)
    }

    /// The constant function `a0`.
    pub fn constant(a0: Complex64, n: usize) -> Result<Self> {
        Self::certified(a0, vec![Complex64::default(); n])
    }

    pub fn a0(&self) -> Complex64 {
        self.a0
    }

    /// Coefficients `c_1..c_N`.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of `t^n`; zero beyond the truncation order.
    pub fn coeff(&self, n: usize) -> Complex64 {
        match n {
            0 => self.a0,
            n => self.coeffs.get(n - 1).copied().unwrap_or_default(),
        }
    }

    pub fn truncation_order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_schur_certified(&self) -> bool {
        self.schur_certified
    }

    /// `1 - |a0|^2`, the bound on every `|c_n|` of a Schur-class function.
    pub fn coefficient_bound(&self) -> f64 {
        (1.0 - self.a0.norm_sqr()).max(0.0)
    }

    /// The series of `g(t^k)` truncated at the same order.
    pub(crate) fn compose_power(&self, k: usize) -> Self {
        let n = self.truncation_order();
        let mut coeffs = vec![Complex64::default(); n];
        for (j, c) in self.coeffs.iter().enumerate() {
            let idx = (j + 1) * k;
            if idx > n {
                break;
            }
            coeffs[idx - 1] = *c;
        }
        Self {
            a0: self.a0,
            coeffs,
            schur_certified: self.schur_certified,
        }
    }
}

/// Which member of the Möbius pair `(λ ± t) / (1 ± λ t)` to expand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MobiusSign {
    /// `(λ + t) / (1 + λ t)`
    Plus,
    /// `(λ - t) / (1 - λ t)`
    Minus,
}

/// Taylor expansion of the Möbius map `(λ ± t) / (1 ± λ t)` to order `n`.
///
/// Plus: `c_n = (-1)^(n-1) λ^(n-1) (1 - λ²)`. Minus: `c_n = -λ^(n-1) (1 - λ²)`.
pub fn mobius_series(lambda: f64, sign: MobiusSign, n: usize) -> Result<TruncatedSeries> {
    if !(0.0..1.0).contains(&lambda) {
        return domain(format!("lambda {lambda} must lie in [0, 1)"));
    }
    if n == 0 {
        return domain("truncation order must be at least 1");
    }
    let scale = 1.0 - lambda * lambda;
    let step = match sign {
        MobiusSign::Plus => -lambda,
        MobiusSign::Minus => lambda,
    };
    let first = match sign {
        MobiusSign::Plus => scale,
        MobiusSign::Minus => -scale,
    };
    let coeffs = std::iter::successors(Some(first), |c| Some(c * step))
        .take(n)
        .map(|c| Complex64::new(c, 0.0))
        .collect();
    Ok(TruncatedSeries {
        a0: Complex64::new(lambda, 0.0),
        coeffs,
        schur_certified: true,
    })
}

/// Rebuilds a Schur function from its Schur parameters `γ_0, γ_1, ...`.
///
/// Runs the inverse Schur step `f_j(t) = (γ_j + t f_{j+1}(t)) / (1 + conj(γ_j) t f_{j+1}(t))`
/// from the last parameter back to the first. A parameter of modulus one ends
/// the recursion (`f_j ≡ γ_j`); if none does, the innermost function is zero.
/// The result is in the Schur class for any parameters in the closed disc.
pub fn schur_series_from_parameters(params: &[Complex64], n: usize) -> Result<TruncatedSeries> {
    if n == 0 {
        return domain("truncation order must be at least 1");
    }
    if let Some(g) = params
        .iter()
        .find(|g| g.norm().is_nan() || g.norm() > 1.0 + COEFFICIENT_SLACK)
    {
        return domain(format!(
            "Schur parameter {g} lies outside the closed unit disc"
        ));
    }
    let len = n + 1;
    let mut f = vec![Complex64::default(); len];
    for &gamma in params.iter().rev() {
        if gamma.norm() >= 1.0 - 1e-15 {
            f.iter_mut().for_each(|c| *c = Complex64::default());
            f[0] = gamma / gamma.norm();
            continue;
        }
        // t * f_{j+1}
        let mut shifted = vec![Complex64::default(); len];
        shifted[1..].copy_from_slice(&f[..len - 1]);
        let mut num = shifted.clone();
        num[0] += gamma;
        let mut den: Vec<Complex64> = shifted.iter().map(|c| gamma.conj() * c).collect();
        den[0] += 1.0;
        f = divide_unit_series(&num, &den);
    }
    TruncatedSeries::certified(f[0], f[1..].to_vec())
}

/// Power-series quotient `num / den` for `den[0] = 1`, same length as the inputs.
fn divide_unit_series(num: &[Complex64], den: &[Complex64]) -> Vec<Complex64> {
    let mut q = Vec::with_capacity(num.len());
    for i in 0..num.len() {
        let acc = (1..=i).fold(num[i], |acc, j| acc - den[j] * q[i - j]);
        q.push(acc / den[0]);
    }
    q
}

/// Draws `count` Schur parameters uniformly from the open unit disc.
pub fn random_schur_parameters<R: Rng + ?Sized>(rng: &mut R, count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|_| {
            let modulus = rng.gen::<f64>().sqrt();
            Complex64::from_polar(modulus, TAU * rng.gen::<f64>())
        })
        .collect()
}

/// A reproducible random Schur-class series built from `n + 1` Schur parameters.
pub fn random_schur_series(seed: u64, n: usize) -> Result<TruncatedSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = random_schur_parameters(&mut rng, n + 1);
    schur_series_from_parameters(&params, n)
}

/// Evaluates the truncated series at `t`, `|t| < 1`.
pub fn eval_series(s: &TruncatedSeries, t: Complex64) -> Result<Complex64> {
    if t.norm().is_nan() || t.norm() >= 1.0 {
        return domain(format!("|t| = {} must be below 1", t.norm()));
    }
    Ok(eval_unchecked(s, t))
}

pub(crate) fn eval_unchecked(s: &TruncatedSeries, t: Complex64) -> Complex64 {
    s.coeffs
        .iter()
        .rev()
        .fold(Complex64::default(), |acc, c| (acc + c) * t)
        + s.a0
}

/// Which discarded tail a [`TailBudget`] bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TermKind {
    /// `Σ_{n>N} |c_n| r^n`
    LinearSum,
    /// `Σ_{n>N} |c_n|^2 r^{2n}`
    SquareSum,
    /// `|Σ_{n>N} c_n t^n|` for `|t| = r`
    Modulus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailBoundKind {
    Lemma1Geometric,
    MobiusExact,
    Custom,
}

/// Upper bound on a discarded tail at a fixed radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBudget {
    pub bound_kind: TailBoundKind,
    pub value: f64,
}

impl TailBudget {
    pub fn custom(value: f64) -> Result<Self> {
        if !(value >= 0.0 && value.is_finite()) {
            return domain(format!(
                "tail budget {value} must be finite and nonnegative"
            ));
        }
        Ok(Self {
            bound_kind: TailBoundKind::Custom,
            value,
        })
    }

    /// Exact tail of the Möbius family `(λ ± t)/(1 ± λt)` truncated at `n`.
    pub fn mobius_exact(lambda: f64, r: f64, n: usize, kind: TermKind) -> Result<Self> {
        check_unit_radius(r)?;
        if !(0.0..1.0).contains(&lambda) {
            return domain(format!("lambda {lambda} must lie in [0, 1)"));
        }
        let scale = 1.0 - lambda * lambda;
        let value = match kind {
            TermKind::LinearSum | TermKind::Modulus => {
                scale * (lambda * r).powi(n as i32) * r / (1.0 - lambda * r)
            }
            TermKind::SquareSum => {
                scale * scale * (lambda * r).powi(2 * n as i32) * r * r
                    / (1.0 - lambda * lambda * r * r)
            }
        };
        Ok(Self {
            bound_kind: TailBoundKind::MobiusExact,
            value,
        })
    }
}

/// Geometric majorant for the tail discarded by truncation, from `|c_n| <= 1 - |a0|^2`.
pub fn tail_bound(s: &TruncatedSeries, r: f64, kind: TermKind) -> Result<TailBudget> {
    check_unit_radius(r)?;
    if !s.schur_certified {
        return Err(BohrError::Certification(
            "tail bounds need a Schur-certified series".into(),
        ));
    }
    Ok(TailBudget {
        bound_kind: TailBoundKind::Lemma1Geometric,
        value: geometric_tail(s.coefficient_bound(), s.truncation_order(), r, kind),
    })
}

pub(crate) fn geometric_tail(bound: f64, n: usize, r: f64, kind: TermKind) -> f64 {
    if bound == 0.0 || r == 0.0 {
        return 0.0;
    }
    let first = r.powi(n as i32 + 1);
    match kind {
        TermKind::LinearSum | TermKind::Modulus => bound * first / (1.0 - r),
        TermKind::SquareSum => bound * bound * first * first / (1.0 - r * r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Long division of `(a + b t) / (1 + d t)`, independent of the closed form.
    fn long_division(a: f64, b: f64, d: f64, n: usize) -> Vec<f64> {
        let mut num = vec![0.0; n + 1];
        num[0] = a;
        if n >= 1 {
            num[1] = b;
        }
        let mut q = vec![0.0; n + 1];
        for i in 0..=n {
            q[i] = num[i] - if i > 0 { d * q[i - 1] } else { 0.0 };
        }
        q
    }

    #[test]
    fn mobius_identity_at_zero() {
        let s = mobius_series(0.0, MobiusSign::Plus, 3).unwrap();
        assert_eq!(s.a0(), c(0.0));
        assert_eq!(s.coeffs(), &[c(1.0), c(0.0), c(0.0)]);
    }

    #[test]
    fn mobius_matches_long_division() {
        let plus = mobius_series(0.5, MobiusSign::Plus, 3).unwrap();
        assert_eq!(plus.coeffs(), &[c(0.75), c(-0.375), c(0.1875)]);
        let minus = mobius_series(0.5, MobiusSign::Minus, 2).unwrap();
        assert_eq!(minus.a0(), c(0.5));
        assert_eq!(minus.coeffs(), &[c(-0.75), c(-0.375)]);

        for &lambda in &[0.1, 0.37, 0.9] {
            let oracle_plus = long_division(lambda, 1.0, lambda, 20);
            let oracle_minus = long_division(lambda, -1.0, -lambda, 20);
            let p = mobius_series(lambda, MobiusSign::Plus, 20).unwrap();
            let m = mobius_series(lambda, MobiusSign::Minus, 20).unwrap();
            for n in 0..=20 {
                assert!((p.coeff(n).re - oracle_plus[n]).abs() < 1e-14);
                assert!((m.coeff(n).re - oracle_minus[n]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn mobius_rejects_bad_lambda() {
        assert!(matches!(
            mobius_series(1.0, MobiusSign::Plus, 4),
            Err(BohrError::Domain(_))
        ));
        assert!(mobius_series(-0.1, MobiusSign::Minus, 4).is_err());
    }

    #[test]
    fn mobius_attains_coefficient_bound_at_first_index() {
        for &lambda in &[0.0, 0.3, 0.99] {
            let s = mobius_series(lambda, MobiusSign::Plus, 8).unwrap();
            assert!((s.coeff(1).norm() - (1.0 - lambda * lambda)).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_parameters_give_zero_function() {
        let s = schur_series_from_parameters(&[c(0.0); 9], 8).unwrap();
        assert_eq!(s.a0(), c(0.0));
        assert!(s.coeffs().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn single_parameter_then_unimodular_gives_mobius() {
        // (0.5, 1) terminates with f_1 ≡ 1, so f_0 = (0.5 + t) / (1 + 0.5 t).
        let s = schur_series_from_parameters(&[c(0.5), c(1.0)], 12).unwrap();
        let m = mobius_series(0.5, MobiusSign::Plus, 12).unwrap();
        assert_eq!(s.a0(), c(0.5));
        assert!((s.coeff(1) - c(0.75)).norm() < 1e-15);
        for n in 1..=12 {
            assert!((s.coeff(n) - m.coeff(n)).norm() < 1e-14);
            assert!(s.coeff(n).norm() <= 0.75 + 1e-15);
        }
    }

    #[test]
    fn lone_parameter_is_a_constant() {
        let s = schur_series_from_parameters(&[c(0.5)], 5).unwrap();
        assert_eq!(s.a0(), c(0.5));
        assert!(s.coeffs().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn random_series_is_reproducible_and_certified() {
        for seed in 0..100 {
            let s = random_schur_series(seed, 32).unwrap();
            assert_eq!(s, random_schur_series(seed, 32).unwrap());
            assert!(s.is_schur_certified());
            let bound = s.coefficient_bound();
            assert!(s.coeffs().iter().all(|c| c.norm() <= bound + 1e-12));
        }
        assert_ne!(
            random_schur_series(1, 16).unwrap(),
            random_schur_series(2, 16).unwrap()
        );
    }

    #[test]
    fn certified_constructor_rejects_violations() {
        let err = TruncatedSeries::certified(c(0.9), vec![c(0.5)]).unwrap_err();
        assert!(matches!(err, BohrError::Certification(_)));
        assert!(TruncatedSeries::new(c(1.5), vec![c(0.0)]).is_err());
        assert!(TruncatedSeries::new(c(0.5), vec![]).is_err());
    }

    #[test]
    fn eval_identity_and_origin() {
        let id = TruncatedSeries::identity(4).unwrap();
        assert_eq!(eval_series(&id, c(0.5)).unwrap(), c(0.5));
        let s = random_schur_series(7, 16).unwrap();
        assert_eq!(eval_series(&s, c(0.0)).unwrap(), s.a0());
        assert!(eval_series(&s, Complex64::new(0.6, 0.8)).is_err());
    }

    #[test]
    fn eval_mobius_against_closed_form() {
        let s = mobius_series(0.5, MobiusSign::Plus, 40).unwrap();
        let v = eval_series(&s, c(0.3)).unwrap();
        let exact = 0.8 / 1.15;
        let tail = tail_bound(&s, 0.3, TermKind::Modulus).unwrap().value;
        assert!((v.re - exact).abs() <= tail + 1e-15);
        assert!((exact - 0.695_652_173_913).abs() < 1e-12);
    }

    #[test]
    fn tail_bound_values() {
        let id = TruncatedSeries::identity(40).unwrap();
        let t = tail_bound(&id, 0.5, TermKind::LinearSum).unwrap();
        assert_eq!(t.bound_kind, TailBoundKind::Lemma1Geometric);
        assert!((t.value - 2f64.powi(-40)).abs() < 1e-25);

        let unimodular = TruncatedSeries::constant(Complex64::from_polar(1.0, 0.3), 8).unwrap();
        let any = random_schur_series(3, 8).unwrap();
        for kind in [TermKind::LinearSum, TermKind::SquareSum, TermKind::Modulus] {
            assert_eq!(tail_bound(&unimodular, 0.7, kind).unwrap().value, 0.0);
            assert_eq!(tail_bound(&any, 0.0, kind).unwrap().value, 0.0);
        }
    }

    #[test]
    fn tail_bound_errors() {
        let s = random_schur_series(0, 8).unwrap();
        assert!(matches!(
            tail_bound(&s, 1.0, TermKind::LinearSum),
            Err(BohrError::Domain(_))
        ));
        let raw = TruncatedSeries::new(c(0.0), vec![c(2.0)]).unwrap();
        assert!(matches!(
            tail_bound(&raw, 0.5, TermKind::LinearSum),
            Err(BohrError::Certification(_))
        ));
    }

    #[test]
    fn geometric_tail_dominates_exact_mobius_tail() {
        for &lambda in &[0.0, 0.5, 0.95] {
            for &r in &[0.2, 0.6, 0.9] {
                let s = mobius_series(lambda, MobiusSign::Plus, 16).unwrap();
                for kind in [TermKind::LinearSum, TermKind::SquareSum] {
                    let exact = TailBudget::mobius_exact(lambda, r, 16, kind).unwrap().value;
                    let bound = tail_bound(&s, r, kind).unwrap().value;
                    assert!(exact <= bound * (1.0 + 1e-12), "{lambda} {r} {kind:?}");
                }
            }
        }
    }

    #[test]
    fn compose_power_spreads_coefficients() {
        let s = mobius_series(0.5, MobiusSign::Plus, 6).unwrap();
        let sq = s.compose_power(2);
        assert_eq!(sq.coeff(2), s.coeff(1));
        assert_eq!(sq.coeff(4), s.coeff(2));
        assert_eq!(sq.coeff(6), s.coeff(3));
        assert_eq!(sq.coeff(1), c(0.0));
        assert_eq!(sq.truncation_order(), 6);
    }
}
