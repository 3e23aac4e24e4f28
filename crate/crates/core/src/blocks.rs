//! Finite direct sums of full matrix algebras.
//!
//! An operator `x = ⊕ᵢ xᵢ` is stored as its list of PSD blocks. The center
//! of `⊕ᵢ 𝕄_{nᵢ}` consists of the blockwise scalars `⊕ᵢ cᵢ·1`, with
//! `‖z‖ = maxᵢ |cᵢ|`. Two contrasts live here: the blockwise supremum `Δ'`
//! and the central contrast `Δ_N(x) = inf ‖z - x/A‖` over unit-norm central
//! `z` and scales `A > 0`.

use serde::{Deserialize, Serialize};

use crate::contrast::{delta, delta_clamped, delta_power2, delta_product, psd_bounds, CrossTermBound};
use crate::contrast::delta2;
use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, RectMatrix, SpectralBounds};
use crate::search::grid_then_golden;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    blocks: Vec<HermitianMatrix>,
    labels: Vec<Option<String>>,
}

impl BlockOperator {
    pub fn new(blocks: Vec<HermitianMatrix>) -> Result<Self> {
        let labels = vec![None; blocks.len()];
        Self::with_labels(blocks, labels)
    }

    pub fn with_labels(blocks: Vec<HermitianMatrix>, labels: Vec<Option<String>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::EmptyInput);
        }
        if labels.len() != blocks.len() {
            return Err(Error::StructureMismatch(format!(
                "{} labels for {} blocks",
                labels.len(),
                blocks.len()
            )));
        }
        for b in &blocks {
            psd_bounds(b)?;
        }
        Ok(Self { blocks, labels })
    }

    /// Block-indicator projection: identity in block `j`, zero elsewhere.
    pub fn indicator(dims: &[usize], j: usize) -> Result<Self> {
        if j >= dims.len() {
            return Err(Error::InvalidArgument(format!("block {j} out of range")));
        }
        let blocks = dims
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                if n == 0 {
                    return Err(Error::EmptyMatrix);
                }
                Ok(HermitianMatrix::scaled_identity(n, if i == j { 1.0 } else { 0.0 }))
            })
            .collect::<Result<_>>()?;
        Self::new(blocks)
    }

    pub fn blocks(&self) -> &[HermitianMatrix] {
        &self.blocks
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(HermitianMatrix::dim).collect()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            blocks: self.blocks.iter().map(|b| b.scale(c)).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_structure(other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(Self {
            blocks,
            labels: self.labels.clone(),
        })
    }

    /// Same blocks in the order given by `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.len()];
        if perm.len() != self.len() || perm.iter().any(|&p| p >= self.len() || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument("not a permutation".into()));
        }
        Ok(Self {
            blocks: perm.iter().map(|&p| self.blocks[p].clone()).collect(),
            labels: perm.iter().map(|&p| self.labels[p].clone()).collect(),
        })
    }

    fn check_structure(&self, other: &Self) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::StructureMismatch(format!(
                "block dims {:?} vs {:?}",
                self.dims(),
                other.dims()
            )));
        }
        Ok(())
    }
}

/// Blockwise supremum `Δ'(x) = maxᵢ Δ(xᵢ)`.
pub fn delta_prime(b: &BlockOperator) -> Result<f64> {
    b.blocks
        .iter()
        .map(|x| delta(x).map(|r| r.value))
        .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))
}

/// Cone membership for `Δ'`.
pub fn prime_cone_member(b: &BlockOperator, c: f64, slack: f64) -> Result<bool> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::InvalidArgument(format!("cone level {c} outside [0, 1]")));
    }
    Ok(delta_prime(b)? <= c + slack)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentralSearchConfig {
    /// Grid points per round over the scale interval.
    pub scale_grid: usize,
    /// Coefficient grid points per block, used by [`delta_central_grid`].
    pub coeff_grid: usize,
    /// Zoom rounds before the final golden-section polish.
    pub refine_rounds: usize,
}

impl Default for CentralSearchConfig {
    fn default() -> Self {
        Self {
            scale_grid: 96,
            coeff_grid: 64,
            refine_rounds: 3,
        }
    }
}

impl CentralSearchConfig {
    fn validate(&self) -> Result<()> {
        if self.scale_grid < 2 || self.coeff_grid < 2 || self.refine_rounds < 2 {
            return Err(Error::InvalidArgument(
                "central search grids and rounds must all be at least 2".into(),
            ));
        }
        Ok(())
    }
}

/// Minimizer found by [`delta_central_detail`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralSearch {
    pub value: f64,
    /// Scale `A`; absent when every block is zero.
    pub scale: Option<f64>,
    /// Central coefficients `cᵢ`, with `max cᵢ = 1`.
    pub coefficients: Vec<f64>,
}

/// `max(|c - lo·u|, |c - hi·u|)`: norm of `c·1 - u·x` on one block.
fn block_gap(c: f64, b: &SpectralBounds, u: f64) -> f64 {
    (c - b.lo * u).abs().max((c - b.hi * u).abs())
}

/// Best coefficient in `[0, 1]` for one block at `u = 1/A`.
fn free_coefficient(b: &SpectralBounds, u: f64) -> f64 {
    (0.5 * (b.lo + b.hi) * u).clamp(0.0, 1.0)
}

/// Objective with block `j` pinned to coefficient 1 and the rest free.
fn pinned_objective(bounds: &[SpectralBounds], j: usize, u: f64) -> f64 {
    bounds
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let c = if i == j { 1.0 } else { free_coefficient(b, u) };
            block_gap(c, b, u)
        })
        .fold(0.0, f64::max)
}

fn clamped_bounds(b: &BlockOperator) -> Result<Vec<SpectralBounds>> {
    b.blocks
        .iter()
        .map(|x| {
            psd_bounds(x).map(|s| SpectralBounds {
                lo: s.lo_clamped(),
                hi: s.hi.max(0.0),
            })
        })
        .collect()
}

/// Central contrast `Δ_N`.
///
/// The norm constraint `max cᵢ = 1` means some block carries coefficient
/// exactly 1; for each choice of that block the remaining coefficients have
/// a closed-form optimum, and the resulting objective is convex in
/// `u = 1/A` on `[0, 2/maxᵢ λ_max(xᵢ)]` (beyond that interval it exceeds 1).
/// Each pinned problem is bracketed on a grid, zoomed and polished by golden
/// section; the answer is the minimum over pinned blocks.
pub fn delta_central_detail(b: &BlockOperator, cfg: &CentralSearchConfig) -> Result<CentralSearch> {
    cfg.validate()?;
    let bounds = clamped_bounds(b)?;
    let max_hi = bounds.iter().map(|s| s.hi).fold(0.0, f64::max);
    if max_hi <= 0.0 {
        let mut coefficients = vec![0.0; bounds.len()];
        coefficients[0] = 1.0;
        return Ok(CentralSearch {
            value: 1.0,
            scale: None,
            coefficients,
        });
    }
    let upper = 2.0 / max_hi;
    let mut best: Option<(usize, f64, f64)> = None;
    for j in 0..bounds.len() {
        let m = grid_then_golden(
            |u| pinned_objective(&bounds, j, u),
            0.0,
            upper,
            cfg.scale_grid,
            cfg.refine_rounds,
            1e-14 * upper,
        );
        if best.is_none_or(|(_, _, v)| m.value < v) {
            best = Some((j, m.x, m.value));
        }
    }
    let (j, u, value) = best.expect("at least one block");
    let coefficients = bounds
        .iter()
        .enumerate()
        .map(|(i, s)| if i == j { 1.0 } else { free_coefficient(s, u) })
        .collect();
    Ok(CentralSearch {
        value: value.clamp(0.0, 1.0),
        scale: (u > 0.0).then(|| 1.0 / u),
        coefficients,
    })
}

pub fn delta_central(b: &BlockOperator, cfg: &CentralSearchConfig) -> Result<f64> {
    delta_central_detail(b, cfg).map(|s| s.value)
}

/// Plain grid search for `Δ_N` over `u = 1/A` and per-block coefficient
/// grids, with no closed-form step. With `signed`, coefficients range over
/// `[-1, 1]` and the pinned block may take `±1`; otherwise `[0, 1]` and `1`.
/// Resolution is limited by the grids; used to cross-check
/// [`delta_central`] and the restriction to nonnegative coefficients.
pub fn delta_central_grid(b: &BlockOperator, cfg: &CentralSearchConfig, signed: bool) -> Result<f64> {
    cfg.validate()?;
    let bounds = clamped_bounds(b)?;
    let max_hi = bounds.iter().map(|s| s.hi).fold(0.0, f64::max);
    if max_hi <= 0.0 {
        return Ok(1.0);
    }
    let upper = 2.0 / max_hi;
    let c_lo = if signed { -1.0 } else { 0.0 };
    let coeffs: Vec<f64> = (0..cfg.coeff_grid)
        .map(|k| c_lo + (1.0 - c_lo) * k as f64 / (cfg.coeff_grid - 1) as f64)
        .collect();
    let pins: &[f64] = if signed { &[1.0, -1.0] } else { &[1.0] };
    let u_points = cfg.scale_grid * cfg.refine_rounds;
    let mut best = f64::INFINITY;
    for k in 0..u_points {
        let u = upper * k as f64 / (u_points - 1) as f64;
        let free: Vec<f64> = bounds
            .iter()
            .map(|s| coeffs.iter().map(|&c| block_gap(c, s, u)).fold(f64::INFINITY, f64::min))
            .collect();
        for j in 0..bounds.len() {
            for &pin in pins {
                let v = free
                    .iter()
                    .enumerate()
                    .map(|(i, &g)| if i == j { block_gap(pin, &bounds[i], u) } else { g })
                    .fold(0.0, f64::max);
                best = best.min(v);
            }
        }
    }
    Ok(best.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectSumBound {
    /// `Δ_N(⊕ xᵢ)`.
    pub lhs: f64,
    /// `supᵢ Δ(xᵢ)`.
    pub rhs: f64,
}

/// Both sides of `Δ_N(⊕ xᵢ) ≤ supᵢ Δ(xᵢ)`. The left side is a numeric
/// minimum; compare with a slack of about `2e-3`.
pub fn delta_direct_sum_bound(b: &BlockOperator, cfg: &CentralSearchConfig) -> Result<DirectSumBound> {
    Ok(DirectSumBound {
        lhs: delta_central(b, cfg)?,
        rhs: delta_prime(b)?,
    })
}

/// Blockwise products and squares for two operators with the same block
/// structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimeOps {
    pub x: f64,
    pub y: f64,
    pub xy: f64,
    pub yx: f64,
    pub x_squared: f64,
    pub y_squared: f64,
}

impl PrimeOps {
    /// `Δ'(xy) = Δ'(yx)`.
    pub fn product_symmetric(&self, tol: f64) -> bool {
        (self.xy - self.yx).abs() <= tol
    }

    /// `Δ'(xy) ≤ max(Δ'(x²), Δ'(y²))`.
    pub fn product_bounded(&self, tol: f64) -> bool {
        self.xy <= self.x_squared.max(self.y_squared) + tol
    }

    /// `Δ'(x²) ≤ 2Δ'(x)`.
    pub fn square_at_most_double(&self, tol: f64) -> bool {
        self.x_squared <= 2.0 * self.x + tol
    }

    /// `Δ'(x) ≤ Δ'(x²)`.
    pub fn square_dominates(&self, tol: f64) -> bool {
        self.x <= self.x_squared + tol
    }

    pub fn all_hold(&self, tol: f64) -> bool {
        self.product_symmetric(tol)
            && self.product_bounded(tol)
            && self.square_at_most_double(tol)
            && self.square_dominates(tol)
    }
}

pub fn delta_prime_ops(b1: &BlockOperator, b2: &BlockOperator) -> Result<PrimeOps> {
    b1.check_structure(b2)?;
    let mut out = PrimeOps {
        x: 0.0,
        y: 0.0,
        xy: 0.0,
        yx: 0.0,
        x_squared: 0.0,
        y_squared: 0.0,
    };
    for (x, y) in b1.blocks.iter().zip(&b2.blocks) {
        out.x = out.x.max(delta(x)?.value);
        out.y = out.y.max(delta(y)?.value);
        out.xy = out.xy.max(delta_product(x, y)?);
        out.yx = out.yx.max(delta_product(y, x)?);
        out.x_squared = out.x_squared.max(delta_power2(x)?);
        out.y_squared = out.y_squared.max(delta_power2(y)?);
    }
    Ok(out)
}

/// Multichannel image: one real matrix per channel, all the same shape.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelStack {
    channels: Vec<RectMatrix>,
}

impl ChannelStack {
    pub fn new(channels: Vec<RectMatrix>) -> Result<Self> {
        let first = channels.first().ok_or(Error::EmptyInput)?.shape();
        if let Some(c) = channels.iter().find(|c| c.shape() != first) {
            return Err(Error::ShapeMismatch {
                left: first,
                right: c.shape(),
            });
        }
        Ok(Self { channels })
    }

    pub fn channels(&self) -> &[RectMatrix] {
        &self.channels
    }

    pub fn shape(&self) -> (usize, usize) {
        self.channels[0].shape()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.channels.len() != other.channels.len() {
            return Err(Error::StructureMismatch(format!(
                "{} vs {} channels",
                self.channels.len(),
                other.channels.len()
            )));
        }
        let channels = self
            .channels
            .iter()
            .zip(&other.channels)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(Self { channels })
    }
}

/// Channelwise supremum of `Δ₂`.
pub fn delta2_prime(s: &ChannelStack) -> Result<f64> {
    s.channels
        .iter()
        .map(delta2)
        .try_fold(0.0f64, |m, v| v.map(|v| m.max(v)))
}

/// Multichannel cross-term bound:
/// `Δ'₂(M+N) ≤ max(Δ'₂(M), Δ'₂(N), min(sup_c Δ(N_cᵀM_c + M_cᵀN_c), sup_c Δ(N_cM_cᵀ + M_cN_cᵀ)))`.
pub fn delta2_prime_cross_bound(m: &ChannelStack, n: &ChannelStack) -> Result<CrossTermBound> {
    let lhs = delta2_prime(&m.add(n)?)?;
    let mut sup_cols = 0.0f64;
    let mut sup_rows = 0.0f64;
    for (a, b) in m.channels.iter().zip(&n.channels) {
        sup_cols = sup_cols.max(delta_clamped(&a.cross_cols(b)?)?);
        sup_rows = sup_rows.max(delta_clamped(&a.cross_rows(b)?)?);
    }
    let rhs = delta2_prime(m)?.max(delta2_prime(n)?).max(sup_cols.min(sup_rows));
    Ok(CrossTermBound {
        lhs,
        rhs,
        equality_gap: rhs - lhs,
    })
}
