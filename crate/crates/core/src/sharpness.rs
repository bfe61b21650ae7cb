//! Extremal Möbius families, witnesses that the sharp radii cannot be
//! enlarged, and the non-equimodular counterexamples.
//!
//! The extremal maps are `F(z) = g(l(z)) u` with a unimodular vector `u`.
//! Every functional term is a componentwise modulus, so rotating components by
//! unimodular factors changes nothing; `u = (1, ..., 1)` throughout.

use serde::Serialize;

use crate::error::{check_unit_radius, domain, BohrError, Result};
use crate::functional::{evaluate, FunctionalSpec};
use crate::scalar::{closed_form_radius, extremal_initial_value};
use crate::series::{mobius_series, MobiusSign, DEFAULT_TRUNCATION};
use crate::slice::{PolydiscSlice, DEFAULT_PHASES};

/// A witness must exceed 1 by more than this.
pub const WITNESS_MARGIN: f64 = 1e-12;

/// Default number of levels in the `λ = 1 - 2^-j` grid.
pub const DEFAULT_LAMBDA_LEVELS: u32 = 40;

/// The Möbius sign of the extremal family for each functional.
pub fn extremal_sign(spec: &FunctionalSpec) -> MobiusSign {
    match spec {
        FunctionalSpec::Refined { .. } => MobiusSign::Minus,
        _ => MobiusSign::Plus,
    }
}

/// `m` identical copies of the extremal Möbius series for `spec`.
pub fn extremal_slice(
    spec: &FunctionalSpec,
    lambda: f64,
    m: usize,
    n: usize,
) -> Result<PolydiscSlice> {
    spec.validate()?;
    if !(lambda > 0.0 && lambda < 1.0) {
        return domain(format!("lambda = {lambda} must lie in (0, 1)"));
    }
    if m == 0 {
        return domain("a slice needs at least one component");
    }
    let g = mobius_series(lambda, extremal_sign(spec), n)?;
    PolydiscSlice::new(vec![g; m])
}

/// Certificate that the functional exceeds 1 just beyond the sharp radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpnessWitness {
    pub theorem: FunctionalSpec,
    pub lambda: f64,
    pub r: f64,
    pub value_lower: f64,
    /// `value_lower - 1`.
    pub margin: f64,
}

/// Lower value of the functional on the extremal family at `(λ, r)`.
pub fn extremal_value(spec: &FunctionalSpec, lambda: f64, r: f64) -> Result<f64> {
    extremal_value_with(spec, lambda, r, &WitnessSearch::default())
}

/// [`extremal_value`] with explicit truncation order and phase count.
pub fn extremal_value_with(
    spec: &FunctionalSpec,
    lambda: f64,
    r: f64,
    search: &WitnessSearch,
) -> Result<f64> {
    let slice = extremal_slice(spec, lambda, 1, search.truncation)?;
    Ok(evaluate(&slice, spec, r, search.phases)?.lower)
}

/// Grid and numerical settings for a witness search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WitnessSearch {
    pub lambda_levels: u32,
    pub truncation: usize,
    pub phases: usize,
}

impl Default for WitnessSearch {
    fn default() -> Self {
        Self {
            lambda_levels: DEFAULT_LAMBDA_LEVELS,
            truncation: DEFAULT_TRUNCATION,
            phases: DEFAULT_PHASES,
        }
    }
}

/// The scan order: `√(3/11)` first for the squared functional, then `1 - 2^-j`.
pub fn lambda_grid(spec: &FunctionalSpec, levels: u32) -> Vec<f64> {
    let head = matches!(spec, FunctionalSpec::ImprovedSquared).then(extremal_initial_value);
    head.into_iter()
        .chain((1..=levels as i32).map(|j| 1.0 - 2f64.powi(-j)))
        .collect()
}

/// Returns the first `λ` on the grid whose extremal value exceeds `1 + WITNESS_MARGIN` at `r`.
pub fn find_witness(spec: &FunctionalSpec, r: f64, lambda_levels: u32) -> Result<SharpnessWitness> {
    find_witness_with(
        spec,
        r,
        &WitnessSearch {
            lambda_levels,
            ..WitnessSearch::default()
        },
    )
}

/// [`find_witness`] with explicit search settings.
pub fn find_witness_with(
    spec: &FunctionalSpec,
    r: f64,
    search: &WitnessSearch,
) -> Result<SharpnessWitness> {
    let lambda_levels = search.lambda_levels;
    check_unit_radius(r)?;
    let radius = closed_form_radius(spec)?;
    if r <= radius {
        return Err(BohrError::Precondition(format!(
            "r = {r} does not exceed the sharp radius {radius} of {spec}"
        )));
    }
    for lambda in lambda_grid(spec, lambda_levels) {
        let value_lower = extremal_value_with(spec, lambda, r, search)?;
        if value_lower > 1.0 + WITNESS_MARGIN {
            return Ok(SharpnessWitness {
                theorem: *spec,
                lambda,
                r,
                value_lower,
                margin: value_lower - 1.0,
            });
        }
    }
    Err(BohrError::Search(format!(
        "no witness for {spec} at r = {r} on {lambda_levels} grid levels"
    )))
}

/// The three two-component maps showing that equal initial moduli are needed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterexampleId {
    /// Plus-family pair against the squared functional; needs `√(1/3) < a1 < a2 < 1`.
    Ex1,
    /// Minus-family pair against the refined functional; needs `1/√2 < a1 < a2 < 1`.
    Ex2 { p: u8 },
    /// Plus-family pair against the composed functional; needs `0 < a1 < a2 < 1`.
    Ex3 { k: u32 },
}

impl CounterexampleId {
    pub fn spec(&self) -> FunctionalSpec {
        match *self {
            Self::Ex1 => FunctionalSpec::ImprovedSquared,
            Self::Ex2 { p } => FunctionalSpec::Refined { p },
            Self::Ex3 { k } => FunctionalSpec::Composed { k },
        }
    }

    /// The counterexample exercising a given functional, if there is one.
    pub fn for_spec(spec: &FunctionalSpec) -> Option<Self> {
        match *spec {
            FunctionalSpec::ImprovedSquared => Some(Self::Ex1),
            FunctionalSpec::Refined { p } => Some(Self::Ex2 { p }),
            FunctionalSpec::Composed { k } => Some(Self::Ex3 { k }),
            FunctionalSpec::Classical => None,
        }
    }

    fn lower_limit(&self) -> f64 {
        match self {
            Self::Ex1 => (1.0f64 / 3.0).sqrt(),
            Self::Ex2 { .. } => std::f64::consts::FRAC_1_SQRT_2,
            Self::Ex3 { .. } => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub example_id: CounterexampleId,
    pub a1: f64,
    pub a2: f64,
    pub r: f64,
    /// Rigorous lower value of the functional itself.
    pub value_lower: f64,
    /// Closed-form lower estimate at the given `a2`, from the per-index component bounds.
    pub chain_bound: f64,
    /// The same estimate in the limit `a2 → 1`.
    pub limit_bound: f64,
    pub success: bool,
}

/// Evaluates the functional on the non-equimodular pair `(g_{a1}, g_{a2})`.
pub fn reproduce_counterexample(
    example_id: CounterexampleId,
    a1: f64,
    a2: f64,
    r: f64,
    n: usize,
) -> Result<CounterexampleReport> {
    let spec = example_id.spec();
    spec.validate()?;
    let lo = example_id.lower_limit();
    if !(lo < a1 && a1 < a2 && a2 < 1.0) {
        return domain(format!(
            "parameters must satisfy {lo} < a1 < a2 < 1, got a1 = {a1}, a2 = {a2}"
        ));
    }
    if !(r > 0.0 && r < 1.0) {
        return domain(format!("r = {r} must lie in (0, 1)"));
    }
    let sign = extremal_sign(&spec);
    let slice = PolydiscSlice::new(vec![
        mobius_series(a1, sign, n)?,
        mobius_series(a2, sign, n)?,
    ])?;
    let value_lower = evaluate(&slice, &spec, r, DEFAULT_PHASES)?.lower;
    let (chain_bound, limit_bound) = chain_bounds(example_id, a1, a2, r);
    Ok(CounterexampleReport {
        example_id,
        a1,
        a2,
        r,
        value_lower,
        chain_bound,
        limit_bound,
        success: value_lower > 1.0,
    })
}

/// Lower estimates keeping component 1 for the leading indices and component 2
/// for the rest, as closed forms in `(a1, a2, r)`.
fn chain_bounds(id: CounterexampleId, a1: f64, a2: f64, r: f64) -> (f64, f64) {
    let s1 = 1.0 - a1 * a1;
    let s2 = 1.0 - a2 * a2;
    let weight = (1.0 + a2 * r) / ((1.0 - r) * (1.0 + a2));
    let limit_weight = (1.0 + r) / (2.0 * (1.0 - r));
    match id {
        CounterexampleId::Ex1 => {
            let head = s1 * s1 * r * r * (1.0 + a1 * a1 * r * r);
            let m = (a2 + r) / (1.0 + a2 * r);
            let chain = m * m + head + s2 * s2 * a2.powi(4) * r.powi(6) / (1.0 - a2 * a2 * r * r);
            (chain, 1.0 + head)
        }
        CounterexampleId::Ex2 { p } => {
            let lin = s1 * r * (1.0 + a1 * r + a1 * a1 * r * r);
            let sq = s1 * s1 * r * r * (1.0 + a1 * a1 * r * r + a1.powi(4) * r.powi(4));
            let chain = a2.powi(p as i32)
                + lin
                + s2 * a2.powi(3) * r.powi(4) / (1.0 - a2 * r)
                + weight * (sq + s2 * s2 * a2.powi(6) * r.powi(8) / (1.0 - a2 * a2 * r * r));
            (chain, 1.0 + lin + limit_weight * sq)
        }
        CounterexampleId::Ex3 { k } => {
            let rk = r.powi(k as i32);
            let chain = (a2 + rk) / (1.0 + a2 * rk)
                + s1 * r
                + s2 * a2 * r * r / (1.0 - a2 * r)
                + weight * s1 * s1 * r * r
                + weight * s2 * s2 * a2 * a2 * r.powi(4) / (1.0 - a2 * a2 * r * r);
            (chain, 1.0 + s1 * r + limit_weight * s1 * s1 * r * r)
        }
    }
}
