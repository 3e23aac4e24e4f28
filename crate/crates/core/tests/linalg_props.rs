mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use opcontrast::ensemble;
use opcontrast::linalg::{eig_sym, hermitian_norm, inverse, is_psd, operator_norm, sqrt_psd, spectral_bounds};
use opcontrast::{HermitianMatrix, RectMatrix};

fn symmetric(n: usize, seed: u64) -> HermitianMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = ensemble::gaussian_rect(&mut rng, n, n);
    let s = g.add(&g.transpose()).unwrap();
    HermitianMatrix::from_real(n, s.data().to_vec()).unwrap()
}

fn max_abs_diff(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    let d = a.sub(b).unwrap();
    hermitian_norm(&d).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigenvalues_sum_to_trace(n in 1usize..=12, seed in any::<u64>()) {
        let h = symmetric(n, seed);
        let e = eig_sym(&h).unwrap();
        let scale = h.frobenius_norm().max(1.0);
        prop_assert!((e.iter().sum::<f64>() - h.trace()).abs() <= 1e-10 * scale);
        prop_assert!(e.windows(2).all(|w| w[0] <= w[1]));
        let frob = e.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((frob - h.frobenius_norm()).abs() <= 1e-10 * scale);
    }

    #[test]
    fn spectrum_survives_rotation(n in 1usize..=10, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = ensemble::log_uniform_spectrum(&mut rng, n, 3.0);
        let h = ensemble::rotated_diag(&mut rng, &values);
        let mut want = values.clone();
        want.sort_by(f64::total_cmp);
        let got = eig_sym(&h).unwrap();
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() <= 1e-12, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn complex_wishart_is_psd_with_real_spectrum(n in 1usize..=8, k in 1usize..=8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = ensemble::complex_wishart(&mut rng, n, k);
        prop_assert!(is_psd(&h, 1e-9));
        let e = eig_sym(&h).unwrap();
        prop_assert_eq!(e.len(), n);
        let scale = h.frobenius_norm().max(1.0);
        prop_assert!((e.iter().sum::<f64>() - h.trace()).abs() <= 1e-10 * scale);
    }

    #[test]
    fn transpose_keeps_operator_norm(r in 1usize..=8, c in 1usize..=12, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = ensemble::gaussian_rect(&mut rng, r, c);
        let (a, b) = (operator_norm(&m), operator_norm(&m.transpose()));
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
    }

    #[test]
    fn square_root_reconstructs(n in 1usize..=8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = ensemble::wishart(&mut rng, n, n);
        let s = sqrt_psd(&x).unwrap();
        prop_assert!(is_psd(&s, 1e-9));
        prop_assert!(max_abs_diff(&s.square(), &x) <= 1e-9 * hermitian_norm(&x).unwrap().max(1.0));
    }

    #[test]
    fn inverse_is_an_involution(n in 1usize..=8, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = ensemble::invertible_psd(&mut rng, n, 3.0);
        let back = inverse(&inverse(&x).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&back, &x) <= 1e-9);
        let (b, bi) = (spectral_bounds(&x).unwrap(), spectral_bounds(&inverse(&x).unwrap()).unwrap());
        prop_assert!((bi.hi - 1.0 / b.lo).abs() <= 1e-9 * bi.hi);
    }
}

#[test]
fn rejects_malformed_matrices() {
    assert!(HermitianMatrix::from_real(2, vec![1.0, 2.0, 0.0, 1.0]).is_err());
    assert!(HermitianMatrix::from_real(2, vec![1.0, 2.0, 2.0]).is_err());
    assert!(HermitianMatrix::from_real(1, vec![f64::NAN]).is_err());
    assert!(HermitianMatrix::from_real(0, vec![]).is_err());
    assert!(RectMatrix::new(2, 2, vec![0.0; 3]).is_err());
    assert!(inverse(&HermitianMatrix::diag(&[1.0, 0.0]).unwrap()).is_err());
}

#[test]
fn gram_shapes() {
    let m = RectMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0]]).unwrap();
    assert_eq!(m.gram_cols().dim(), 3);
    assert_eq!(m.gram_rows(), common::diag(&[1.0, 4.0]));
    assert!((operator_norm(&m) - 2.0).abs() < 1e-12);
}
