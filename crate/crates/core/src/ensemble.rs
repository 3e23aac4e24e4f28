//! Seeded random matrix ensembles for property checks.
//!
//! Every generator takes the caller's RNG so suites are reproducible from a
//! single `u64` seed.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{HermitianMatrix, RectMatrix};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Square matrix with i.i.d. standard normal entries, row-major.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Vec<f64> {
    (0..rows * cols).map(|_| normal(rng)).collect()
}

/// Random rectangular matrix with standard normal entries.
pub fn gaussian_rect<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> RectMatrix {
    RectMatrix::new(rows, cols, gaussian(rng, rows, cols)).expect("nonempty shape")
}

/// Wishart sample `G Gᵀ` with `G` of size `n x k`. Rank-deficient when `k < n`.
pub fn wishart<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> HermitianMatrix {
    gaussian_rect(rng, n, k).gram_rows()
}

/// Complex Wishart sample `G G*`.
pub fn complex_wishart<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> HermitianMatrix {
    let gr = gaussian(rng, n, k);
    let gi = gaussian(rng, n, k);
    let mut re = vec![0.0; n * n];
    let mut im = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let (mut sr, mut si) = (0.0, 0.0);
            for l in 0..k {
                let (ar, ai) = (gr[i * k + l], gi[i * k + l]);
                // conj(g_jl)
                let (br, bi) = (gr[j * k + l], -gi[j * k + l]);
                sr += ar * br - ai * bi;
                si += ar * bi + ai * br;
            }
            re[i * n + j] = sr;
            im[i * n + j] = si;
        }
    }
    HermitianMatrix::symmetrized(n, re, Some(im))
}

/// Haar-ish random orthogonal matrix from Gram-Schmidt on a Gaussian matrix.
pub fn orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let mut q = gaussian(rng, n, n);
        if gram_schmidt_columns(&mut q, n) {
            return q;
        }
    }
}

/// Orthonormalizes the columns in place; false on (numerical) rank loss.
fn gram_schmidt_columns(q: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        // two passes for stability
        for _ in 0..2 {
            for p in 0..j {
                let d: f64 = (0..n).map(|i| q[i * n + j] * q[i * n + p]).sum();
                for i in 0..n {
                    q[i * n + j] -= d * q[i * n + p];
                }
            }
        }
        let norm = (0..n).map(|i| q[i * n + j].powi(2)).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return false;
        }
        for i in 0..n {
            q[i * n + j] /= norm;
        }
    }
    true
}

/// `Q diag(values) Qᵀ` for an explicit orthogonal `q`.
pub fn conjugate_diag(q: &[f64], values: &[f64]) -> HermitianMatrix {
    let n = values.len();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = (0..n).map(|k| q[i * n + k] * values[k] * q[j * n + k]).sum();
        }
    }
    HermitianMatrix::symmetrized(n, out, None)
}

/// Random rotation of a diagonal with the given eigenvalues.
pub fn rotated_diag<R: Rng + ?Sized>(rng: &mut R, values: &[f64]) -> HermitianMatrix {
    let q = orthogonal(rng, values.len());
    conjugate_diag(&q, values)
}

/// Eigenvalues log-uniform in `[10^-decades, 1]`.
pub fn log_uniform_spectrum<R: Rng + ?Sized>(rng: &mut R, n: usize, decades: f64) -> Vec<f64> {
    (0..n)
        .map(|_| 10f64.powf(-decades * rng.gen::<f64>()))
        .collect()
}

/// Random invertible PSD matrix with condition number at most `10^decades`.
pub fn invertible_psd<R: Rng + ?Sized>(rng: &mut R, n: usize, decades: f64) -> HermitianMatrix {
    let values = log_uniform_spectrum(rng, n, decades);
    rotated_diag(rng, &values)
}

/// PSD matrix with an exactly zero eigenvalue (up to rotation round-off).
pub fn singular_psd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianMatrix {
    let mut values = log_uniform_spectrum(rng, n, 3.0);
    let k = rng.gen_range(0..n);
    values[k] = 0.0;
    rotated_diag(rng, &values)
}

/// Pair sharing an eigenbasis, hence commuting.
pub fn commuting_pair<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (HermitianMatrix, HermitianMatrix) {
    let q = orthogonal(rng, n);
    let a = log_uniform_spectrum(rng, n, 2.0);
    let b = log_uniform_spectrum(rng, n, 2.0);
    (conjugate_diag(&q, &a), conjugate_diag(&q, &b))
}

/// Mixed ensemble used by the pair suites: Wishart, rotated diagonal,
/// near-singular and exactly singular samples.
pub fn mixed_psd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianMatrix {
    match rng.gen_range(0..5) {
        0 => wishart(rng, n, n),
        1 => {
            let k = rng.gen_range(1..=n);
            wishart(rng, n, k)
        }
        2 => invertible_psd(rng, n, 4.0),
        3 => {
            let mut values = log_uniform_spectrum(rng, n, 2.0);
            values[0] = 1e-10;
            rotated_diag(rng, &values)
        }
        _ => complex_wishart(rng, n, n),
    }
}

/// Extremal 2x2 pair for max-subadditivity: `X = diag(α₁, β₁)` and
/// `Y = U diag(α₂, β₂) U*` written out as
///
/// ```text
/// [ β₂ + (α₂-β₂)λ          (α₂-β₂) δ sqrt(λ(1-λ)) ]
/// [ (α₂-β₂) δ̄ sqrt(λ(1-λ))  α₂ + (β₂-α₂)λ         ]
/// ```
///
/// with `λ ∈ [0,1]` and `|δ| = 1` given by its phase.
pub fn make_unitary_mixed_psd(
    x_diag: (f64, f64),
    y_diag: (f64, f64),
    lambda: f64,
    delta_phase: f64,
) -> (HermitianMatrix, HermitianMatrix) {
    let (a1, b1) = x_diag;
    let (a2, b2) = y_diag;
    let x = HermitianMatrix::diag(&[a1, b1]).expect("2x2 diagonal");
    let off = (a2 - b2) * (lambda * (1.0 - lambda)).max(0.0).sqrt();
    let (dr, di) = (delta_phase.cos(), delta_phase.sin());
    let re = vec![
        b2 + (a2 - b2) * lambda,
        off * dr,
        off * dr,
        a2 + (b2 - a2) * lambda,
    ];
    let im = vec![0.0, off * di, -off * di, 0.0];
    let y = HermitianMatrix::symmetrized(2, re, Some(im));
    (x, y)
}

/// Random proper rotation of R^n (determinant +1).
pub fn rotation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> RectMatrix {
    let mut q = orthogonal(rng, n);
    if det_sign(&q, n) < 0.0 {
        for i in 0..n {
            q[i * n] = -q[i * n];
        }
    }
    RectMatrix::new(n, n, q).expect("square")
}

fn det_sign(a: &[f64], n: usize) -> f64 {
    let mut m = a.to_vec();
    let mut sign = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[i * n + c].abs().total_cmp(&m[j * n + c].abs()))
            .expect("nonempty");
        if m[p * n + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for k in 0..n {
                m.swap(p * n + k, c * n + k);
            }
            sign = -sign;
        }
        let piv = m[c * n + c];
        if piv < 0.0 {
            sign = -sign;
        }
        for r in c + 1..n {
            let f = m[r * n + c] / piv;
            for k in c..n {
                m[r * n + k] -= f * m[c * n + k];
            }
        }
    }
    sign
}
