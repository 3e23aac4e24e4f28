//! Small dense linear algebra: Hermitian matrices, a cyclic Jacobi
//! eigensolver, spectral bounds, operator norms, PSD square roots and
//! inverses.
//!
//! Complex Hermitian matrices are diagonalized through the real symmetric
//! embedding `[[Re, -Im], [Im, Re]]`, so one real kernel serves both fields.
//! The embedding doubles every eigenvalue; the doubled list is de-duplicated
//! by keeping every second sorted value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for symmetrizing caller-supplied entries.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Relative eigenvalue threshold below which a PSD matrix is singular.
pub const SINGULAR_RTOL: f64 = 1e-12;
/// Tolerance used when accepting a matrix as positive semidefinite.
pub const PSD_TOL: f64 = 1e-9;
/// Jacobi stops once the off-diagonal Frobenius norm is this fraction of `‖h‖_F`.
pub const JACOBI_RTOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense Hermitian matrix, stored row-major.
///
/// `im` is `None` for real symmetric matrices. Conjugate symmetry holds
/// exactly on the stored entries.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    dim: usize,
    re: Vec<f64>,
    im: Option<Vec<f64>>,
}

impl HermitianMatrix {
    /// Real symmetric matrix from row-major entries.
    pub fn from_real(dim: usize, entries: Vec<f64>) -> Result<Self> {
        Self::new(dim, entries, None)
    }

    /// Complex Hermitian matrix from row-major real and imaginary parts.
    pub fn from_complex(dim: usize, re: Vec<f64>, im: Vec<f64>) -> Result<Self> {
        Self::new(dim, re, Some(im))
    }

    /// Builds a matrix, symmetrizing entries whose mirror deviates by at most
    /// `HERMITIAN_TOL * max(1, max |entry|)` and rejecting anything beyond.
    pub fn new(dim: usize, re: Vec<f64>, im: Option<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        let len = dim * dim;
        if re.len() != len {
            return Err(Error::BadLength {
                expected: len,
                actual: re.len(),
            });
        }
        if let Some(im) = &im {
            if im.len() != len {
                return Err(Error::BadLength {
                    expected: len,
                    actual: im.len(),
                });
            }
        }
        for (k, v) in re
            .iter()
            .chain(im.iter().flat_map(|v| v.iter()))
            .enumerate()
        {
            if !v.is_finite() {
                let k = k % len;
                return Err(Error::NonFinite {
                    row: k / dim,
                    col: k % dim,
                });
            }
        }
        let scale = re
            .iter()
            .chain(im.iter().flat_map(|v| v.iter()))
            .fold(1.0f64, |acc, v| acc.max(v.abs()));
        let tol = HERMITIAN_TOL * scale;
        for i in 0..dim {
            for j in i..dim {
                let dr = (re[i * dim + j] - re[j * dim + i]).abs();
                let di = im
                    .as_ref()
                    .map_or(0.0, |im| (im[i * dim + j] + im[j * dim + i]).abs());
                let dev = dr.max(di);
                if dev > tol {
                    return Err(Error::NotHermitian {
                        row: i,
                        col: j,
                        deviation: dev,
                    });
                }
            }
        }
        Ok(Self::symmetrized(dim, re, im))
    }

    /// Averages each entry with the conjugate of its mirror. No tolerance
    /// check; used for results of products that are Hermitian in exact
    /// arithmetic.
    pub(crate) fn symmetrized(dim: usize, mut re: Vec<f64>, mut im: Option<Vec<f64>>) -> Self {
        for i in 0..dim {
            for j in i + 1..dim {
                let r = 0.5 * (re[i * dim + j] + re[j * dim + i]);
                re[i * dim + j] = r;
                re[j * dim + i] = r;
            }
        }
        if let Some(v) = im.as_mut() {
            for i in 0..dim {
                v[i * dim + i] = 0.0;
                for j in i + 1..dim {
                    let m = 0.5 * (v[i * dim + j] - v[j * dim + i]);
                    v[i * dim + j] = m;
                    v[j * dim + i] = -m;
                }
            }
            if v.iter().all(|&x| x == 0.0) {
                im = None;
            }
        }
        Self { dim, re, im }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidArgument("rows must form a square matrix".into()));
        }
        Self::from_real(dim, rows.concat())
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let mut re = vec![0.0; n * n];
        for (i, v) in values.iter().enumerate() {
            re[i * n + i] = *v;
        }
        Self::from_real(n, re)
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    pub fn scaled_identity(dim: usize, c: f64) -> Self {
        let mut re = vec![0.0; dim * dim];
        for i in 0..dim {
            re[i * dim + i] = c;
        }
        Self { dim, re, im: None }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::scaled_identity(dim, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_real(&self) -> bool {
        self.im.is_none()
    }

    /// Row-major real parts.
    pub fn re(&self) -> &[f64] {
        &self.re
    }

    /// Row-major imaginary parts, `None` for real matrices.
    pub fn im(&self) -> Option<&[f64]> {
        self.im.as_deref()
    }

    /// Entry `(i, j)` as `(re, im)`.
    pub fn get(&self, i: usize, j: usize) -> (f64, f64) {
        let k = i * self.dim + j;
        (self.re[k], self.im.as_ref().map_or(0.0, |v| v[k]))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.re[i * self.dim + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        let s: f64 = self
            .re
            .iter()
            .chain(self.im.iter().flat_map(|v| v.iter()))
            .map(|v| v * v)
            .sum();
        s.sqrt()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            re: self.re.iter().map(|v| v * c).collect(),
            im: self.im.as_ref().map(|v| v.iter().map(|x| x * c).collect()),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let re = zip_with(&self.re, &other.re, sign);
        let im = match (&self.im, &other.im) {
            (None, None) => None,
            (a, b) => {
                let zero = vec![0.0; self.re.len()];
                let a = a.as_ref().unwrap_or(&zero);
                let b = b.as_ref().unwrap_or(&zero);
                Some(zip_with(a, b, sign))
            }
        };
        Ok(Self::symmetrized(self.dim, re, im))
    }

    /// `self * other * self`, Hermitian whenever both factors are.
    pub fn sandwich(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let t = Dense::from(self).mul(&Dense::from(other));
        let p = t.mul(&Dense::from(self));
        Ok(p.into_hermitian())
    }

    /// `self * self`.
    pub fn square(&self) -> Self {
        let d = Dense::from(self);
        d.mul(&d).into_hermitian()
    }

    /// Real symmetric matrix whose spectrum is that of `self`, each value
    /// repeated twice for complex input.
    fn embedding(&self) -> (usize, Vec<f64>) {
        let n = self.dim;
        match &self.im {
            None => (n, self.re.clone()),
            Some(im) => {
                let m = 2 * n;
                let mut e = vec![0.0; m * m];
                for i in 0..n {
                    for j in 0..n {
                        let r = self.re[i * n + j];
                        let c = im[i * n + j];
                        e[i * m + j] = r;
                        e[(i + n) * m + (j + n)] = r;
                        e[i * m + (j + n)] = -c;
                        e[(i + n) * m + j] = c;
                    }
                }
                (m, e)
            }
        }
    }

    /// Applies `f` to the spectrum: `V f(Λ) V*`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let (m, e) = self.embedding();
        let (vals, vecs) = jacobi(e, m, true)?;
        let vecs = vecs.expect("vectors requested");
        let fv: Vec<f64> = vals.iter().map(|&l| f(l)).collect();
        let mut out = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let s: f64 = (0..m).map(|k| vecs[i * m + k] * fv[k] * vecs[j * m + k]).sum();
                out[i * m + j] = s;
                out[j * m + i] = s;
            }
        }
        let n = self.dim;
        if self.im.is_none() {
            return Ok(Self::symmetrized(n, out, None));
        }
        let mut re = vec![0.0; n * n];
        let mut im = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                re[i * n + j] = 0.5 * (out[i * m + j] + out[(i + n) * m + (j + n)]);
                im[i * n + j] = 0.5 * (out[(i + n) * m + j] - out[i * m + (j + n)]);
            }
        }
        Ok(Self::symmetrized(n, re, Some(im)))
    }
}

fn zip_with(a: &[f64], b: &[f64], sign: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + sign * y).collect()
}

/// General dense complex square matrix used for intermediate products.
#[derive(Debug, Clone)]
pub(crate) struct Dense {
    n: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<&HermitianMatrix> for Dense {
    fn from(h: &HermitianMatrix) -> Self {
        Self {
            n: h.dim,
            re: h.re.clone(),
            im: h.im.clone().unwrap_or_else(|| vec![0.0; h.re.len()]),
        }
    }
}

impl Dense {
    pub(crate) fn mul(&self, other: &Dense) -> Dense {
        let n = self.n;
        let mut re = vec![0.0; n * n];
        let mut im = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let (ar, ai) = (self.re[i * n + k], self.im[i * n + k]);
                if ar == 0.0 && ai == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let (br, bi) = (other.re[k * n + j], other.im[k * n + j]);
                    re[i * n + j] += ar * br - ai * bi;
                    im[i * n + j] += ar * bi + ai * br;
                }
            }
        }
        Dense { n, re, im }
    }

    pub(crate) fn into_hermitian(self) -> HermitianMatrix {
        let im = if self.im.iter().all(|&v| v == 0.0) {
            None
        } else {
            Some(self.im)
        };
        HermitianMatrix::symmetrized(self.n, self.re, im)
    }
}

/// Cyclic Jacobi on a real symmetric row-major matrix. Returns unsorted
/// eigenvalues and, on request, the eigenvectors as columns.
fn jacobi(mut a: Vec<f64>, n: usize, want_vectors: bool) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let mut v = want_vectors.then(|| {
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
        v
    });
    let fro = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = JACOBI_RTOL * fro;
    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut sweep = 0;
    loop {
        let off = off_norm(&a);
        if off <= tol {
            break;
        }
        if sweep == JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNonConvergence {
                sweeps: sweep,
                off_norm: off,
            });
        }
        sweep += 1;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let vals = (0..n).map(|i| a[i * n + i]).collect();
    Ok((vals, v))
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn eig_sym(h: &HermitianMatrix) -> Result<Vec<f64>> {
    let (m, e) = h.embedding();
    let (mut vals, _) = jacobi(e, m, false)?;
    vals.sort_by(f64::total_cmp);
    if h.is_real() {
        Ok(vals)
    } else {
        Ok(vals.into_iter().step_by(2).collect())
    }
}

/// Extreme points of the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBounds {
    /// Smallest eigenvalue.
    pub lo: f64,
    /// Largest eigenvalue.
    pub hi: f64,
}

impl SpectralBounds {
    /// Operator norm of the underlying Hermitian matrix.
    pub fn norm(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    /// `lo` with small negative round-off clamped to zero.
    pub fn lo_clamped(&self) -> f64 {
        self.lo.max(0.0)
    }

    /// True when `lo <= SINGULAR_RTOL * hi`. The zero matrix is singular.
    pub fn is_singular(&self) -> bool {
        self.lo <= SINGULAR_RTOL * self.hi
    }
}

pub fn spectral_bounds(h: &HermitianMatrix) -> Result<SpectralBounds> {
    let vals = eig_sym(h)?;
    Ok(SpectralBounds {
        lo: vals[0],
        hi: vals[vals.len() - 1],
    })
}

/// Operator norm of a Hermitian matrix, `max |λ|`.
pub fn hermitian_norm(h: &HermitianMatrix) -> Result<f64> {
    spectral_bounds(h).map(|b| b.norm())
}

/// True iff the smallest eigenvalue is at least `-tol * max(1, λ_max)`.
pub fn is_psd(h: &HermitianMatrix, tol: f64) -> bool {
    match spectral_bounds(h) {
        Ok(b) => b.lo >= -tol * b.hi.max(1.0),
        Err(_) => false,
    }
}

/// Principal square root of a PSD matrix.
pub fn sqrt_psd(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let b = spectral_bounds(h)?;
    if b.lo < -PSD_TOL * b.norm() {
        return Err(Error::NotPositive { min: b.lo });
    }
    h.map_spectrum(|l| l.max(0.0).sqrt())
}

/// Inverse through the eigendecomposition. Refuses matrices whose smallest
/// `|λ|` is at most `SINGULAR_RTOL` times the largest.
pub fn inverse(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let vals = eig_sym(h)?;
    let max_abs = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min_abs = vals.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if min_abs <= SINGULAR_RTOL * max_abs || max_abs == 0.0 {
        return Err(Error::SingularMatrix {
            min: vals[0],
            max: vals[vals.len() - 1],
        });
    }
    h.map_spectrum(|l| 1.0 / l)
}

/// Dense real `rows x cols` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RectMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RectMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != rows * cols {
            return Err(Error::BadLength {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: k / cols,
                col: k % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidArgument("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.get(i, j);
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: zip_with(&self.data, &other.data, 1.0),
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::ShapeMismatch {
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    /// `aᵀ b` for equally shaped `a`, `b` (cols x cols).
    fn inner_cols(a: &Self, b: &Self) -> Vec<f64> {
        let m = a.cols;
        let mut out = vec![0.0; m * m];
        for k in 0..a.rows {
            for i in 0..m {
                let aki = a.get(k, i);
                if aki == 0.0 {
                    continue;
                }
                for j in 0..m {
                    out[i * m + j] += aki * b.get(k, j);
                }
            }
        }
        out
    }

    /// `a bᵀ` for equally shaped `a`, `b` (rows x rows).
    fn inner_rows(a: &Self, b: &Self) -> Vec<f64> {
        let n = a.rows;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..a.cols).map(|k| a.get(i, k) * b.get(j, k)).sum();
            }
        }
        out
    }

    /// `MᵀM`, of size cols x cols.
    pub fn gram_cols(&self) -> HermitianMatrix {
        HermitianMatrix::symmetrized(self.cols, Self::inner_cols(self, self), None)
    }

    /// `MMᵀ`, of size rows x rows.
    pub fn gram_rows(&self) -> HermitianMatrix {
        HermitianMatrix::symmetrized(self.rows, Self::inner_rows(self, self), None)
    }

    /// `otherᵀ self + selfᵀ other` (cols x cols). Symmetric, generally indefinite.
    pub fn cross_cols(&self, other: &Self) -> Result<HermitianMatrix> {
        self.check_shape(other)?;
        let a = Self::inner_cols(other, self);
        let b = Self::inner_cols(self, other);
        Ok(HermitianMatrix::symmetrized(self.cols, zip_with(&a, &b, 1.0), None))
    }

    /// `other selfᵀ + self otherᵀ` (rows x rows).
    pub fn cross_rows(&self, other: &Self) -> Result<HermitianMatrix> {
        self.check_shape(other)?;
        let a = Self::inner_rows(other, self);
        let b = Self::inner_rows(self, other);
        Ok(HermitianMatrix::symmetrized(self.rows, zip_with(&a, &b, 1.0), None))
    }
}

/// Largest singular value, `sqrt(λ_max(MᵀM))`.
pub fn operator_norm(m: &RectMatrix) -> f64 {
    // A Gram matrix of finite entries always converges well inside the sweep cap.
    let hi = spectral_bounds(&m.gram_cols()).map_or(f64::NAN, |b| b.hi);
    hi.max(0.0).sqrt()
}
