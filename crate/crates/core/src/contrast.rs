//! Contrast of a single positive operator.
//!
//! For a positive matrix `x` the contrast is
//! `Δ(x) = inf_{A > 0} ‖1 - x/A‖ = (λ_max - λ_min) / (λ_max + λ_min)`,
//! with `Δ(0) = 1`. Equivalently `Δ = (κ - 1)/(κ + 1)` for the condition
//! number `κ = ‖x‖‖x⁻¹‖` of an invertible `x`. Singular operators have
//! contrast 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_norm, inverse, spectral_bounds, sqrt_psd, HermitianMatrix, RectMatrix,
    SpectralBounds, PSD_TOL,
};
use crate::search::golden_section;

/// How a contrast value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContrastPath {
    /// Closed form from the extreme eigenvalues.
    Spectral,
    /// `(κ - 1)/(κ + 1)` from the norms of `x` and `x⁻¹`.
    InverseFormula,
    /// Direct minimization of `‖1 - x/A‖` over `A`.
    Scan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContrastReport {
    pub value: f64,
    pub path: ContrastPath,
    pub bounds: SpectralBounds,
    /// Minimizing scale `A*`; absent for the zero operator.
    pub optimal_scale: Option<f64>,
    pub singular: bool,
}

/// Settings for the brute-force scan over `λ = 1/A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// The bracket upper end is `bracket_expand * 2/(λ_min + λ_max)`.
    pub bracket_expand: f64,
    /// Final bracket width, relative to the initial bracket.
    pub golden_tol: f64,
    pub max_iters: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            bracket_expand: 10.0,
            golden_tol: 1e-10,
            max_iters: 200,
        }
    }
}

impl ScanConfig {
    fn validate(&self) -> Result<()> {
        if self.golden_tol.is_nan() || self.golden_tol <= 0.0 {
            return Err(Error::InvalidArgument("golden_tol must be positive".into()));
        }
        if self.bracket_expand.is_nan() || self.bracket_expand <= 1.0 {
            return Err(Error::InvalidArgument("bracket_expand must exceed 1".into()));
        }
        Ok(())
    }
}

/// Spectral bounds of `x`, rejecting matrices that are not PSD within
/// `PSD_TOL`.
pub fn psd_bounds(x: &HermitianMatrix) -> Result<SpectralBounds> {
    let b = spectral_bounds(x)?;
    if b.lo < -PSD_TOL * b.hi.max(1.0) {
        return Err(Error::NotPositive { min: b.lo });
    }
    Ok(b)
}

/// `(hi - lo)/(hi + lo)` with `lo` clamped at zero and `Δ(0) = 1`.
fn ratio(b: &SpectralBounds) -> f64 {
    let lo = b.lo_clamped();
    if b.hi <= 0.0 {
        return 1.0;
    }
    ((b.hi - lo) / (b.hi + lo)).clamp(0.0, 1.0)
}

fn report(b: SpectralBounds, value: f64, path: ContrastPath, optimal_scale: Option<f64>) -> ContrastReport {
    ContrastReport {
        value,
        path,
        bounds: b,
        optimal_scale,
        singular: b.is_singular(),
    }
}

fn midpoint_scale(b: &SpectralBounds) -> Option<f64> {
    (b.hi > 0.0).then(|| 0.5 * (b.hi + b.lo_clamped()))
}

/// Contrast of a PSD matrix from its extreme eigenvalues.
pub fn delta(x: &HermitianMatrix) -> Result<ContrastReport> {
    let b = psd_bounds(x)?;
    Ok(report(b, ratio(&b), ContrastPath::Spectral, midpoint_scale(&b)))
}

/// Contrast of an arbitrary Hermitian matrix, with a negative smallest
/// eigenvalue clamped to zero. Anything with a non-positive eigenvalue gets 1.
pub fn delta_clamped(h: &HermitianMatrix) -> Result<f64> {
    Ok(ratio(&spectral_bounds(h)?))
}

/// `(κ - 1)/(κ + 1)` with `κ = ‖x‖‖x⁻¹‖`.
pub fn delta_inverse_formula(x: &HermitianMatrix) -> Result<f64> {
    delta_via_inverse(x).map(|r| r.value)
}

/// Report form of [`delta_inverse_formula`].
pub fn delta_via_inverse(x: &HermitianMatrix) -> Result<ContrastReport> {
    let b = psd_bounds(x)?;
    let inv = inverse(x)?;
    let kappa = hermitian_norm(x)? * hermitian_norm(&inv)?;
    let value = ((kappa - 1.0) / (kappa + 1.0)).clamp(0.0, 1.0);
    Ok(ContrastReport {
        value,
        path: ContrastPath::InverseFormula,
        bounds: b,
        optimal_scale: midpoint_scale(&b),
        singular: false,
    })
}

/// `‖1 - λx‖` evaluated through the spectrum of the full matrix.
fn scaled_residual_norm(x: &HermitianMatrix, lambda: f64) -> f64 {
    let n = x.dim();
    let r = HermitianMatrix::identity(n)
        .sub(&x.scale(lambda))
        .expect("same dimension");
    hermitian_norm(&r).unwrap_or(f64::INFINITY)
}

/// Brute-force contrast: golden-section minimization of `‖1 - λx‖` over
/// `λ = 1/A`. The objective is a maximum of two absolute values of affine
/// functions of `λ`, hence unimodal.
pub fn delta_scan(x: &HermitianMatrix, cfg: &ScanConfig) -> Result<ContrastReport> {
    cfg.validate()?;
    let b = psd_bounds(x)?;
    if b.hi <= 0.0 {
        return Ok(report(b, 1.0, ContrastPath::Scan, None));
    }
    let upper = cfg.bracket_expand * 2.0 / (b.hi + b.lo_clamped());
    let lower = upper * f64::EPSILON;
    let tol = cfg.golden_tol * upper;
    let m = golden_section(|l| scaled_residual_norm(x, l), lower, upper, tol, cfg.max_iters)
        .ok_or(Error::NonConvergence {
            iters: cfg.max_iters,
        })?;
    Ok(report(
        b,
        m.value.clamp(0.0, 1.0),
        ContrastPath::Scan,
        Some(1.0 / m.x),
    ))
}

/// Minimizing scale `A* = (λ_min + λ_max)/2`.
pub fn optimal_scale(x: &HermitianMatrix) -> Result<f64> {
    let b = psd_bounds(x)?;
    midpoint_scale(&b).ok_or(Error::ZeroOperator)
}

/// `‖1 - x/A‖` at a given scale.
pub fn scale_objective(x: &HermitianMatrix, scale: f64) -> f64 {
    scaled_residual_norm(x, 1.0 / scale)
}

/// Contrast of the product `xy`, realized through the Hermitian matrix
/// `x^{1/2} y x^{1/2}`, which has the same nonzero spectrum. A singular
/// factor makes the product singular, so the result is 1.
pub fn delta_product(x: &HermitianMatrix, y: &HermitianMatrix) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    let bx = psd_bounds(x)?;
    let by = psd_bounds(y)?;
    if bx.is_singular() || by.is_singular() {
        return Ok(1.0);
    }
    let s = sqrt_psd(x)?;
    Ok(delta(&s.sandwich(y)?)?.value)
}

/// Contrast of `x²`.
pub fn delta_power2(x: &HermitianMatrix) -> Result<f64> {
    psd_bounds(x)?;
    Ok(delta(&x.square())?.value)
}

/// Membership in the cone `K_c = {x ≥ 0 : Δ(x) ≤ c}`, with `slack` added to `c`.
pub fn cone_member(x: &HermitianMatrix, c: f64, slack: f64) -> Result<bool> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::InvalidArgument(format!("cone level {c} outside [0, 1]")));
    }
    Ok(delta(x)?.value <= c + slack)
}

/// Both sides of
/// `(‖x+y‖ + 1/‖(x+y)⁻¹‖) Δ(x+y) ≤ (‖x‖ + 1/‖x⁻¹‖) Δ(x) + (‖y‖ + 1/‖y⁻¹‖) Δ(y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedTerms {
    pub lhs: f64,
    pub rhs: f64,
}

pub fn weighted_subadditivity_terms(x: &HermitianMatrix, y: &HermitianMatrix) -> Result<WeightedTerms> {
    let sum = x.add(y)?;
    let weighted = |h: &HermitianMatrix| -> Result<f64> {
        let r = delta(h)?;
        if r.singular {
            return Err(Error::SingularMatrix {
                min: r.bounds.lo,
                max: r.bounds.hi,
            });
        }
        Ok((r.bounds.hi + r.bounds.lo) * r.value)
    };
    let lx = weighted(x)?;
    let ly = weighted(y)?;
    Ok(WeightedTerms {
        lhs: weighted(&sum)?,
        rhs: lx + ly,
    })
}

/// Contrast of squared singular values: `min(Δ(MᵀM), Δ(MMᵀ))`. The larger
/// Gram matrix is singular unless `M` is square, so only the smaller one is
/// formed.
pub fn delta2(m: &RectMatrix) -> Result<f64> {
    let gram = if m.cols() <= m.rows() {
        m.gram_cols()
    } else {
        m.gram_rows()
    };
    Ok(delta(&gram)?.value)
}

/// Both Gram matrices evaluated, for checking the shortcut in [`delta2`].
pub fn delta2_both(m: &RectMatrix) -> Result<(f64, f64)> {
    Ok((delta(&m.gram_cols())?.value, delta(&m.gram_rows())?.value))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossTermBound {
    /// `Δ₂(M₁ + M₂)`.
    pub lhs: f64,
    /// `max(Δ₂(M₁), Δ₂(M₂), min(Δ(M₂ᵀM₁ + M₁ᵀM₂), Δ(M₂M₁ᵀ + M₁M₂ᵀ)))`.
    pub rhs: f64,
    pub equality_gap: f64,
}

/// Cross-term bound for the sum of two equally shaped matrices. The cross
/// terms are symmetric but may be indefinite; they are evaluated with
/// [`delta_clamped`].
pub fn cross_term_bound(m1: &RectMatrix, m2: &RectMatrix) -> Result<CrossTermBound> {
    let sum = m1.add(m2)?;
    let lhs = delta2(&sum)?;
    let cross = delta_clamped(&m1.cross_cols(m2)?)?.min(delta_clamped(&m1.cross_rows(m2)?)?);
    let rhs = delta2(m1)?.max(delta2(m2)?).max(cross);
    Ok(CrossTermBound {
        lhs,
        rhs,
        equality_gap: rhs - lhs,
    })
}
