#![allow(dead_code)]

use opcontrast::linalg::eig_sym;
use opcontrast::{BlockOperator, HermitianMatrix};

/// Spectral contrast from a known spectrum.
pub fn contrast_of_spectrum(values: &[f64]) -> f64 {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min).max(0.0);
    let hi = values.iter().cloned().fold(0.0, f64::max);
    if hi == 0.0 {
        1.0
    } else {
        (hi - lo) / (hi + lo)
    }
}

pub fn extreme_eigs(x: &HermitianMatrix) -> (f64, f64) {
    let e = eig_sym(x).unwrap();
    (e[0].max(0.0), e[e.len() - 1].max(0.0))
}

/// Central contrast by vertex enumeration.
///
/// With block `j` carrying coefficient 1 and `u = 1/A`, every block term is
/// the max of lines drawn from `{1 - lo·u, hi·u - 1, (hi - lo)/2·u}`, so the
/// objective is piecewise linear in `u` and its minimum sits at a pairwise
/// line intersection, a clamp breakpoint `u = 2/(lo + hi)`, or an end of
/// `[0, 2/max hi]`.
pub fn central_by_vertices(b: &BlockOperator) -> f64 {
    let bounds: Vec<(f64, f64)> = b.blocks().iter().map(extreme_eigs).collect();
    let top = bounds.iter().map(|p| p.1).fold(0.0, f64::max);
    if top == 0.0 {
        return 1.0;
    }
    let u_max = 2.0 / top;
    // lines as (intercept, slope)
    let mut lines = Vec::new();
    for &(lo, hi) in &bounds {
        lines.push((1.0, -lo));
        lines.push((-1.0, hi));
        lines.push((0.0, 0.5 * (hi - lo)));
    }
    let mut candidates = vec![0.0, u_max];
    for &(lo, hi) in &bounds {
        if lo + hi > 0.0 {
            candidates.push(2.0 / (lo + hi));
        }
    }
    for (k, &(a1, s1)) in lines.iter().enumerate() {
        for &(a2, s2) in &lines[k + 1..] {
            if s1 != s2 {
                candidates.push((a2 - a1) / (s1 - s2));
            }
        }
    }
    let objective = |j: usize, u: f64| -> f64 {
        bounds
            .iter()
            .enumerate()
            .map(|(i, &(lo, hi))| {
                let c = if i == j { 1.0 } else { (0.5 * (lo + hi) * u).clamp(0.0, 1.0) };
                (c - lo * u).abs().max((c - hi * u).abs())
            })
            .fold(0.0, f64::max)
    };
    let mut best = 1.0f64;
    for &u in candidates.iter().filter(|u| (0.0..=u_max).contains(*u)) {
        for j in 0..bounds.len() {
            best = best.min(objective(j, u));
        }
    }
    best
}

pub fn diag(v: &[f64]) -> HermitianMatrix {
    HermitianMatrix::diag(v).unwrap()
}
