//! Polydisc-valued slices `t ↦ F(t z0) = (g_1(t), ..., g_m(t))`.
//!
//! All norms on the target are the componentwise maximum. A slice is
//! *equimodular* when every component starts at the same modulus
//! `|g_i(0)| = ‖F(0)‖_∞`, the hypothesis under which the sharp radii hold.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::TAU;

use crate::error::{check_unit_radius, domain, BohrError, Result};
use crate::series::{
    eval_unchecked, random_schur_parameters, schur_series_from_parameters, TruncatedSeries,
};

/// Default number of equally spaced phases used when sampling `|t| = r`.
pub const DEFAULT_PHASES: usize = 64;

const EQUIMODULAR_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct PolydiscSlice {
    components: Vec<TruncatedSeries>,
    equimodular: bool,
}

impl PolydiscSlice {
    /// Groups component series into a slice; they must share a truncation order.
    pub fn new(components: Vec<TruncatedSeries>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| BohrError::Domain("a slice needs at least one component".into()))?;
        let order = first.truncation_order();
        if components.iter().any(|c| c.truncation_order() != order) {
            return domain("all components must share the truncation order");
        }
        let base = first.a0().norm();
        let equimodular = components
            .iter()
            .all(|c| (c.a0().norm() - base).abs() <= EQUIMODULAR_TOL);
        Ok(Self {
            components,
            equimodular,
        })
    }

    pub fn single(series: TruncatedSeries) -> Self {
        Self {
            components: vec![series],
            equimodular: true,
        }
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.components
    }

    /// Number of components `m`.
    pub fn dimension(&self) -> usize {
        self.components.len()
    }

    pub fn truncation_order(&self) -> usize {
        self.components[0].truncation_order()
    }

    pub fn is_equimodular(&self) -> bool {
        self.equimodular
    }

    pub fn is_certified(&self) -> bool {
        self.components.iter().all(|c| c.is_schur_certified())
    }

    /// `‖F(0)‖_∞` and `Q_n = ‖P_n(z0)‖_∞ = max_i |c_n^(i)|`.
    pub fn coefficient_norms(&self) -> CoefficientNorms {
        let a_norm = self
            .components
            .iter()
            .map(|c| c.a0().norm())
            .fold(0.0, f64::max);
        let q = (1..=self.truncation_order())
            .map(|n| {
                self.components
                    .iter()
                    .map(|c| c.coeff(n).norm())
                    .fold(0.0, f64::max)
            })
            .collect();
        CoefficientNorms { a_norm, q }
    }

    /// Samples `max_i |g_i(t)|` over `t = r e^{iθ}` on `phases` equally spaced angles.
    ///
    /// The sampled value bounds the circle maximum from below (up to the
    /// truncation tail); `upper` is the growth bound `(‖a‖ + r) / (1 + ‖a‖ r)`.
    pub fn sup_modulus(&self, r: f64, phases: usize) -> Result<ModulusEstimate> {
        check_unit_radius(r)?;
        if phases == 0 {
            return domain("at least one phase is required");
        }
        let sampled = self.sample_max(r, phases, |c, t| eval_unchecked(c, t).norm());
        let a = self.coefficient_norms().a_norm;
        Ok(ModulusEstimate {
            sampled,
            upper: growth_bound(a, r),
        })
    }

    /// Sampled `max_i |g_i(t) - g_i(0)|` on the circle `|t| = r`.
    pub fn sup_increment(&self, r: f64, phases: usize) -> Result<f64> {
        check_unit_radius(r)?;
        if phases == 0 {
            return domain("at least one phase is required");
        }
        Ok(self.sample_max(r, phases, |c, t| (eval_unchecked(c, t) - c.a0()).norm()))
    }

    fn sample_max(
        &self,
        r: f64,
        phases: usize,
        f: impl Fn(&TruncatedSeries, Complex64) -> f64,
    ) -> f64 {
        (0..phases)
            .map(|j| Complex64::from_polar(r, TAU * j as f64 / phases as f64))
            .flat_map(|t| self.components.iter().map(move |c| (c, t)))
            .map(|(c, t)| f(c, t))
            .fold(0.0, f64::max)
    }

    /// Composes with the order-`k` Schwarz map, which acts on a slice as `t ↦ t^k`.
    ///
    /// Coefficients landing beyond the truncation order are dropped.
    pub fn schwarz_compose(&self, k: usize) -> Result<Self> {
        if k == 0 {
            return domain("Schwarz order k must be at least 1");
        }
        Ok(Self {
            components: self.components.iter().map(|c| c.compose_power(k)).collect(),
            equimodular: self.equimodular,
        })
    }
}

/// `(a + r) / (1 + a r)`: the sharp bound on `‖F(z)‖` for `‖F(0)‖ = a`, `‖z‖ = r`.
pub fn growth_bound(a: f64, r: f64) -> f64 {
    (a + r) / (1.0 + a * r)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientNorms {
    pub a_norm: f64,
    /// `q[n - 1] = Q_n`.
    pub q: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulusEstimate {
    pub sampled: f64,
    pub upper: f64,
}

/// A random equimodular slice with `m` components, reproducible from `seed`.
///
/// Every component is a Schur function built from random Schur parameters,
/// with the first parameter replaced by a common modulus and an independent
/// phase per component.
pub fn random_equimodular_slice(seed: u64, m: usize, n: usize) -> Result<PolydiscSlice> {
    if m == 0 {
        return domain("a slice needs at least one component");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modulus: f64 = rng.gen::<f64>().sqrt();
    let components = (0..m)
        .map(|_| {
            let mut params = random_schur_parameters(&mut rng, n + 1);
            params[0] = Complex64::from_polar(modulus, TAU * rng.gen::<f64>());
            schur_series_from_parameters(&params, n)
        })
        .collect::<Result<Vec<_>>>()?;
    PolydiscSlice::new(components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{mobius_series, MobiusSign};

    #[test]
    fn norms_of_identity() {
        let s = PolydiscSlice::single(TruncatedSeries::identity(5).unwrap());
        let norms = s.coefficient_norms();
        assert_eq!(norms.a_norm, 0.0);
        assert_eq!(norms.q, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn norms_of_mobius_pair() {
        let s = PolydiscSlice::new(vec![
            mobius_series(0.6, MobiusSign::Plus, 10).unwrap(),
            mobius_series(0.6, MobiusSign::Minus, 10).unwrap(),
        ])
        .unwrap();
        assert!(s.is_equimodular());
        let norms = s.coefficient_norms();
        assert_eq!(norms.a_norm, 0.6);
        for (i, q) in norms.q.iter().enumerate() {
            assert!((q - 0.64 * 0.6f64.powi(i as i32)).abs() < 1e-15);
        }
    }

    #[test]
    fn norms_of_non_equimodular_pair() {
        let s = PolydiscSlice::new(vec![
            mobius_series(0.6, MobiusSign::Plus, 10).unwrap(),
            mobius_series(0.95, MobiusSign::Plus, 10).unwrap(),
        ])
        .unwrap();
        assert!(!s.is_equimodular());
        let norms = s.coefficient_norms();
        assert_eq!(norms.a_norm, 0.95);
        assert!((norms.q[0] - 0.64).abs() < 1e-15);
    }

    #[test]
    fn mixed_orders_rejected() {
        let err = PolydiscSlice::new(vec![
            TruncatedSeries::identity(4).unwrap(),
            TruncatedSeries::identity(5).unwrap(),
        ]);
        assert!(err.is_err());
        assert!(PolydiscSlice::new(vec![]).is_err());
    }

    #[test]
    fn sup_modulus_identity_and_origin() {
        let id = PolydiscSlice::single(TruncatedSeries::identity(8).unwrap());
        for phases in [1, 7, 64] {
            assert!((id.sup_modulus(0.5, phases).unwrap().sampled - 0.5).abs() < 1e-15);
        }
        let s = random_equimodular_slice(4, 3, 16).unwrap();
        let a = s.coefficient_norms().a_norm;
        let est = s.sup_modulus(0.0, 64).unwrap();
        assert!((est.sampled - a).abs() < 1e-15);
        assert!((est.upper - a).abs() < 1e-15);
        assert!(s.sup_modulus(1.0, 64).is_err());
        assert!(s.sup_modulus(0.5, 0).is_err());
    }

    #[test]
    fn sup_modulus_of_mobius_meets_growth_bound() {
        for &lambda in &[0.1, 0.5, 0.8] {
            let s = PolydiscSlice::single(mobius_series(lambda, MobiusSign::Plus, 64).unwrap());
            let est = s.sup_modulus(0.4, 64).unwrap();
            let exact = (lambda + 0.4) / (1.0 + lambda * 0.4);
            assert!((est.sampled - exact).abs() < 1e-12);
            assert!((est.upper - exact).abs() < 1e-15);
        }
    }

    #[test]
    fn compose_identity_and_square() {
        let s = random_equimodular_slice(9, 2, 12).unwrap();
        assert_eq!(s.schwarz_compose(1).unwrap(), s);
        let id = PolydiscSlice::single(TruncatedSeries::identity(6).unwrap());
        let sq = id.schwarz_compose(2).unwrap();
        let c = &sq.components()[0];
        for n in 1..=6 {
            assert_eq!(c.coeff(n).re, if n == 2 { 1.0 } else { 0.0 });
        }
        assert!(id.schwarz_compose(0).is_err());
        // Beyond the truncation order only the constant survives.
        let far = id.schwarz_compose(7).unwrap();
        assert!(far.components()[0].coeffs().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn compose_mobius_against_closed_form() {
        let s = PolydiscSlice::single(mobius_series(0.5, MobiusSign::Plus, 64).unwrap());
        let sq = s.schwarz_compose(2).unwrap();
        let v = eval_unchecked(&sq.components()[0], Complex64::new(0.4, 0.0));
        assert!((v.re - 0.66 / 1.08).abs() < 1e-12);
        assert!((v.re - 0.611_111_111_111).abs() < 1e-12);
    }

    #[test]
    fn random_slices_are_equimodular_and_certified() {
        for seed in 0..50 {
            let s = random_equimodular_slice(seed, 1 + (seed as usize % 3), 24).unwrap();
            assert!(s.is_equimodular());
            assert!(s.is_certified());
            let norms = s.coefficient_norms();
            let bound = 1.0 - norms.a_norm * norms.a_norm;
            assert!(norms.q.iter().all(|&q| q <= bound + 1e-12));
        }
    }
}
