//! Auxiliary one- and two-variable functions behind the sharp radii, and a
//! bracketing solver for the composed-functional radius.
//!
//! Naming: `x` is `‖F(0)‖_∞`, `lambda` the extremal-family parameter, `r` the
//! radius and `k` the order of the Schwarz map.

use serde::Serialize;
use std::fmt;

use crate::error::{domain, BohrError, Result};
use crate::functional::FunctionalSpec;

/// `√(3/11)`, the initial value of the equality case for the squared functional.
pub fn extremal_initial_value() -> f64 {
    (3.0f64 / 11.0).sqrt()
}

/// `√(11/27)`, the sharp radius of the squared functional.
pub fn improved_squared_radius() -> f64 {
    (11.0f64 / 27.0).sqrt()
}

fn unit(name: &str, v: f64) -> Result<()> {
    if !(0.0..1.0).contains(&v) {
        return domain(format!("{name} = {v} must lie in [0, 1)"));
    }
    Ok(())
}

fn order(k: u32) -> Result<()> {
    if k == 0 {
        return domain("k must be at least 1");
    }
    Ok(())
}

/// `((x + r)/(1 + x r))² + r² (1 - x²)² / (1 - x² r²) - 1`
pub fn g1(x: f64, r: f64) -> Result<f64> {
    unit("x", x)?;
    unit("r", r)?;
    let m = (x + r) / (1.0 + x * r);
    Ok(m * m + r * r * (1.0 - x * x).powi(2) / (1.0 - x * x * r * r) - 1.0)
}

/// Closed-form `∂g1/∂r`.
pub fn g1_dr(x: f64, r: f64) -> Result<f64> {
    unit("x", x)?;
    unit("r", r)?;
    let s = 1.0 - x * x;
    let d = 1.0 - r * r * x * x;
    Ok(2.0 * s * (x + r) / (1.0 + x * r).powi(3)
        + 2.0 * r * s * s / d
        + 2.0 * r.powi(3) * x * x * s * s / (d * d))
}

/// The sextic numerator of `g1(x, √(11/27))`, in expanded form.
pub fn g2(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("x = {x} must lie in [0, 1]"));
    }
    let s33 = 33f64.sqrt();
    let coeffs = [
        -135.0,
        66.0 * s33,
        135.0,
        -132.0 * s33,
        -121.0,
        66.0 * s33,
        121.0,
    ];
    Ok(coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c))
}

/// `121 (x² - 1)(x + 5s)(x + 3s)(x - s)²` with `s = √(3/11)`.
pub fn g2_factored(x: f64) -> f64 {
    let s = extremal_initial_value();
    121.0 * (x * x - 1.0) * (x + 5.0 * s) * (x + 3.0 * s) * (x - s).powi(2)
}

/// `2 (1 + x) r / (1 - r) - 1`
pub fn g3(x: f64, r: f64) -> Result<f64> {
    unit("x", x)?;
    unit("r", r)?;
    Ok(2.0 * (1.0 + x) * r / (1.0 - r) - 1.0)
}

/// `(3r - 1) / (1 - r)`
pub fn g4(r: f64) -> Result<f64> {
    unit("r", r)?;
    Ok((3.0 * r - 1.0) / (1.0 - r))
}

/// `(1 + λ) r / (1 - λ r) + (1 + λ) r / (1 - r) - 1`
pub fn g5(lambda: f64, r: f64) -> Result<f64> {
    unit("lambda", lambda)?;
    unit("r", r)?;
    Ok((1.0 + lambda) * r / (1.0 - lambda * r) + (1.0 + lambda) * r / (1.0 - r) - 1.0)
}

/// `r / (1 - λ r) + r / (1 - r) - 1`
pub fn g6(lambda: f64, r: f64) -> Result<f64> {
    unit("lambda", lambda)?;
    unit("r", r)?;
    Ok(r / (1.0 - lambda * r) + r / (1.0 - r) - 1.0)
}

/// `(x + r^k) / (1 + x r^k) + (1 - x²) r / (1 - r)`
pub fn g7(x: f64, r: f64, k: u32) -> Result<f64> {
    unit("x", x)?;
    unit("r", r)?;
    order(k)?;
    let rk = r.powi(k as i32);
    Ok((x + rk) / (1.0 + x * rk) + (1.0 - x * x) * r / (1.0 - r))
}

/// `(1 - r^k) / (1 + r^k) - 2r / (1 - r)`; its root in `(0, 1)` is the composed radius.
pub fn g8(r: f64, k: u32) -> Result<f64> {
    unit("r", r)?;
    order(k)?;
    let rk = r.powi(k as i32);
    Ok((1.0 - rk) / (1.0 + rk) - 2.0 * r / (1.0 - r))
}

/// `((λ + r^k)/(1 + λ r^k) - 1) / (1 - λ) + (1 + λ) r / (1 - r)`
///
/// Evaluated through the identity `((λ + ρ)/(1 + λρ) - 1)/(1 - λ) = -(1 - ρ)/(1 + λρ)`,
/// which stays accurate as `λ → 1`.
pub fn g9(lambda: f64, r: f64, k: u32) -> Result<f64> {
    unit("lambda", lambda)?;
    unit("r", r)?;
    order(k)?;
    let rk = r.powi(k as i32);
    Ok(-(1.0 - rk) / (1.0 + lambda * rk) + (1.0 + lambda) * r / (1.0 - r))
}

/// One of the auxiliary functions with its arguments, for index-driven evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Auxiliary {
    G1 { x: f64, r: f64 },
    G2 { x: f64 },
    G3 { x: f64, r: f64 },
    G4 { r: f64 },
    G5 { lambda: f64, r: f64 },
    G6 { lambda: f64, r: f64 },
    G7 { x: f64, r: f64, k: u32 },
    G8 { r: f64, k: u32 },
    G9 { lambda: f64, r: f64, k: u32 },
}

impl Auxiliary {
    pub fn index(&self) -> u8 {
        match self {
            Self::G1 { .. } => 1,
            Self::G2 { .. } => 2,
            Self::G3 { .. } => 3,
            Self::G4 { .. } => 4,
            Self::G5 { .. } => 5,
            Self::G6 { .. } => 6,
            Self::G7 { .. } => 7,
            Self::G8 { .. } => 8,
            Self::G9 { .. } => 9,
        }
    }

    pub fn eval(&self) -> Result<f64> {
        match *self {
            Self::G1 { x, r } => g1(x, r),
            Self::G2 { x } => g2(x),
            Self::G3 { x, r } => g3(x, r),
            Self::G4 { r } => g4(r),
            Self::G5 { lambda, r } => g5(lambda, r),
            Self::G6 { lambda, r } => g6(lambda, r),
            Self::G7 { x, r, k } => g7(x, r, k),
            Self::G8 { r, k } => g8(r, k),
            Self::G9 { lambda, r, k } => g9(lambda, r, k),
        }
    }
}

/// Outcome of comparing the expanded and factored sextic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorizationCheck {
    pub samples: usize,
    pub max_abs_difference: f64,
    pub max_factored_value: f64,
}

impl FactorizationCheck {
    pub fn passed(&self) -> bool {
        self.max_abs_difference <= 1e-9 && self.max_factored_value <= 0.0
    }
}

/// Compares [`g2`] with [`g2_factored`] at `x = j / samples`, `j = 0..samples`.
pub fn check_g2_factorization(samples: usize) -> Result<FactorizationCheck> {
    if samples == 0 {
        return domain("at least one sample is required");
    }
    let mut max_abs_difference: f64 = 0.0;
    let mut max_factored_value = f64::NEG_INFINITY;
    for j in 0..samples {
        let x = j as f64 / samples as f64;
        let factored = g2_factored(x);
        max_abs_difference = max_abs_difference.max((g2(x)? - factored).abs());
        max_factored_value = max_factored_value.max(factored);
    }
    Ok(FactorizationCheck {
        samples,
        max_abs_difference,
        max_factored_value,
    })
}

/// Solved radius with its final bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusResult {
    pub radius: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub residual: f64,
    pub iterations: u32,
}

/// Equations whose unique root in `(0, 1)` is a radius.
pub enum RadiusEquation {
    /// `g8(r, k) = 0`.
    Theorem3 { k: u32 },
    /// Any strictly monotone function changing sign on the default bracket.
    Custom(Box<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for RadiusEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Theorem3 { k } => f.debug_struct("Theorem3").field("k", k).finish(),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

pub const BRACKET_LO: f64 = 1e-9;
pub const BRACKET_HI: f64 = 1.0 - 1e-9;
pub const DEFAULT_SOLVER_TOL: f64 = 1e-12;
pub const MAX_BISECTION_STEPS: u32 = 200;
const RESIDUAL_TOL: f64 = 1e-10;
const MONOTONICITY_SAMPLES: usize = 256;

/// Solves for the root on `[BRACKET_LO, BRACKET_HI]` by bisection.
pub fn solve_radius(equation: &RadiusEquation, tol: f64) -> Result<RadiusResult> {
    match equation {
        RadiusEquation::Theorem3 { k } => {
            order(*k)?;
            let k = *k;
            bisect_monotone(
                &|r| g8(r, k).unwrap_or(f64::NAN),
                BRACKET_LO,
                BRACKET_HI,
                tol,
            )
        }
        RadiusEquation::Custom(f) => bisect_monotone(f.as_ref(), BRACKET_LO, BRACKET_HI, tol),
    }
}

/// Bisection for a strictly monotone `f` with a sign change on `[lo, hi]`.
///
/// Monotonicity is checked on a uniform grid before iterating.
pub fn bisect_monotone<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<RadiusResult> {
    if tol.is_nan() || tol <= 0.0 || lo.is_nan() || hi.is_nan() || lo >= hi {
        return domain(format!("invalid bracket [{lo}, {hi}] or tolerance {tol}"));
    }
    let (f_lo, f_hi) = (f(lo), f(hi));
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo * f_hi > 0.0 {
        return Err(BohrError::Solver(format!(
            "no sign change on [{lo}, {hi}]: f = {f_lo}, {f_hi}"
        )));
    }
    let decreasing = f_hi < f_lo;
    let grid: Vec<f64> = (0..=MONOTONICITY_SAMPLES)
        .map(|j| f(lo + (hi - lo) * j as f64 / MONOTONICITY_SAMPLES as f64))
        .collect();
    let monotone = grid
        .windows(2)
        .all(|w| if decreasing { w[1] < w[0] } else { w[1] > w[0] });
    if !monotone {
        return Err(BohrError::Solver(
            "function is not strictly monotone".into(),
        ));
    }

    let (mut a, mut b) = (lo, hi);
    let mut iterations = 0;
    while b - a > tol {
        if iterations == MAX_BISECTION_STEPS {
            return Err(BohrError::Solver(format!(
                "bracket width {} after {iterations} steps",
                b - a
            )));
        }
        let mid = 0.5 * (a + b);
        let v = f(mid);
        if v == 0.0 {
            a = mid;
            b = mid;
        } else if (v > 0.0) == decreasing {
            a = mid;
        } else {
            b = mid;
        }
        iterations += 1;
    }
    let radius = 0.5 * (a + b);
    let residual = f(radius);
    if residual.abs() > RESIDUAL_TOL {
        return Err(BohrError::Solver(format!(
            "residual {residual} at {radius}"
        )));
    }
    Ok(RadiusResult {
        radius,
        bracket_lo: a,
        bracket_hi: b,
        residual,
        iterations,
    })
}

/// The sharp radius of each functional.
pub fn closed_form_radius(spec: &FunctionalSpec) -> Result<f64> {
    spec.validate()?;
    Ok(match *spec {
        FunctionalSpec::ImprovedSquared => improved_squared_radius(),
        FunctionalSpec::Refined { p: 1 } => 0.2,
        FunctionalSpec::Refined { .. } => 1.0 / 3.0,
        FunctionalSpec::Composed { k } => {
            solve_radius(&RadiusEquation::Theorem3 { k }, DEFAULT_SOLVER_TOL)?.radius
        }
        FunctionalSpec::Classical => 1.0 / 3.0,
    })
}
