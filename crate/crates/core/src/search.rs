//! Golden-section minimization of unimodal scalar functions.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
    pub iters: usize,
}

/// Minimizes a unimodal `f` on `[a, b]`, shrinking the bracket until its
/// width is at most `tol`. Returns `None` if `max_iters` is exhausted first.
pub fn golden_section<F>(f: F, mut a: f64, mut b: f64, tol: f64, max_iters: usize) -> Option<Minimum>
where
    F: Fn(f64) -> f64,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iters = 0;
    while (b - a).abs() > tol {
        if iters == max_iters {
            return None;
        }
        iters += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    // the endpoints are never evaluated; compare the interior survivors
    let (x, value) = if fc <= fd { (c, fc) } else { (d, fd) };
    Some(Minimum { x, value, iters })
}

/// Grid bracketing followed by golden section. `f` must be unimodal on
/// `[a, b]` for the result to be the global minimum.
pub fn grid_then_golden<F>(f: F, a: f64, b: f64, grid: usize, rounds: usize, tol: f64) -> Minimum
where
    F: Fn(f64) -> f64,
{
    let grid = grid.max(2);
    let (mut lo, mut hi) = (a, b);
    for _ in 0..rounds.max(1) {
        let step = (hi - lo) / (grid - 1) as f64;
        let (k, _) = (0..grid)
            .map(|k| (k, f(lo + step * k as f64)))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("grid is nonempty");
        let (nlo, nhi) = (
            (lo + step * (k as f64 - 1.0)).max(a),
            (lo + step * (k as f64 + 1.0)).min(b),
        );
        lo = nlo;
        hi = nhi;
    }
    let mut best = golden_section(&f, lo, hi, tol, 10_000).expect("iteration cap is generous");
    for edge in [a, b] {
        let v = f(edge);
        if v < best.value {
            best = Minimum {
                x: edge,
                value: v,
                iters: best.iters,
            };
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_minimum() {
        let m = golden_section(|x| (x - 1.3).powi(2), 0.0, 4.0, 1e-10, 200).unwrap();
        assert!((m.x - 1.3).abs() < 1e-9);
    }

    #[test]
    fn finds_v_shaped_kink() {
        let m = golden_section(|x: f64| (x - 0.25).abs(), 0.0, 1.0, 1e-12, 200).unwrap();
        assert!((m.x - 0.25).abs() < 1e-11);
    }

    #[test]
    fn reports_iteration_cap() {
        assert!(golden_section(|x| x * x, -1.0, 1.0, 1e-12, 5).is_none());
    }

    #[test]
    fn grid_handles_boundary_minimum() {
        let m = grid_then_golden(|x| x, 0.0, 1.0, 16, 3, 1e-12);
        assert_eq!(m.x, 0.0);
    }
}
