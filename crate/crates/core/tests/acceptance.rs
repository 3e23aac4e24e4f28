//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p opcontrast --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{central_by_vertices, contrast_of_spectrum, diag};
use opcontrast::blocks::{
    delta2_prime, delta2_prime_cross_bound, delta_central, delta_central_grid, delta_direct_sum_bound,
    delta_prime, delta_prime_ops, ChannelStack,
};
use opcontrast::contrast::{
    cone_member, cross_term_bound, delta, delta2, delta_inverse_formula, delta_power2, delta_product,
    delta_scan, weighted_subadditivity_terms,
};
use opcontrast::ensemble;
use opcontrast::image::michelson_contrast;
use opcontrast::verify::{orthogonal_gaps, random_blocks, unit_perturbation};
use opcontrast::{BlockOperator, CentralSearchConfig, HermitianMatrix, RectMatrix, ScanConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Tracks the worst violation of `value ≤ 0` with a description of it.
struct Worst {
    excess: f64,
    what: String,
    cases: usize,
}

impl Worst {
    fn new() -> Self {
        Self {
            excess: f64::NEG_INFINITY,
            what: String::new(),
            cases: 0,
        }
    }

    fn check(&mut self, excess: f64, what: impl FnOnce() -> String) {
        self.cases += 1;
        if excess > self.excess {
            self.excess = excess;
            if excess > 0.0 {
                self.what = what();
            }
        }
    }

    fn outcome(&self, label: &str) -> Outcome {
        if self.excess > 0.0 {
            Err(format!("{label}: {} (excess {:.3e})", self.what, self.excess))
        } else {
            Ok(format!("{label}: {} cases", self.cases))
        }
    }
}

fn all(parts: Vec<Outcome>) -> Outcome {
    let (ok, bad): (Vec<_>, Vec<_>) = parts.into_iter().partition(Result::is_ok);
    if bad.is_empty() {
        Ok(ok.into_iter().map(Result::unwrap).collect::<Vec<_>>().join("; "))
    } else {
        Err(bad.into_iter().map(Result::unwrap_err).collect::<Vec<_>>().join("; "))
    }
}

fn exact(label: &str, got: f64, want: f64, tol: f64) -> Outcome {
    if (got - want).abs() <= tol {
        Ok(label.to_string())
    } else {
        Err(format!("{label}: got {got}, want {want}"))
    }
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xACCE_0000 + tag)
}

fn d(x: &HermitianMatrix) -> f64 {
    delta(x).unwrap().value
}

fn projection() -> HermitianMatrix {
    // rank-one projection onto (1, 1)/√2
    HermitianMatrix::from_real(2, vec![0.5, 0.5, 0.5, 0.5]).unwrap()
}

fn regressions() -> Outcome {
    let tol = 1e-12;
    let mut parts = vec![
        exact("diag(2,4)", d(&diag(&[2.0, 4.0])), 1.0 / 3.0, tol),
        exact("diag(3,9)", d(&diag(&[3.0, 9.0])), 0.5, tol),
        exact("diag(1,2)", d(&diag(&[1.0, 2.0])), 1.0 / 3.0, tol),
        exact("diag(2,3)", d(&diag(&[2.0, 3.0])), 0.2, tol),
        exact("identity", d(&HermitianMatrix::identity(4)), 0.0, tol),
        exact("zero", d(&HermitianMatrix::zeros(3)), 1.0, tol),
        exact("projection", d(&projection()), 1.0, tol),
    ];
    for l in [0.1, 0.5, 0.9] {
        parts.push(exact(&format!("diag(1,{l})"), d(&diag(&[1.0, l])), (1.0 - l) / (1.0 + l), tol));
    }
    all(parts).map(|_| "10 exact values".into())
}

fn oracle_equivalence() -> Outcome {
    let mut r = rng(2);
    let cfg = ScanConfig::default();
    let (mut scan_w, mut inv_w, mut arg_w, mut spec_w) = (Worst::new(), Worst::new(), Worst::new(), Worst::new());
    let mut unresolvable = 0;
    for k in 0..240 {
        let n = r.gen_range(2..=12);
        let (x, spectrum) = if k % 2 == 0 {
            (ensemble::wishart(&mut r, n, n), None)
        } else {
            let s = ensemble::log_uniform_spectrum(&mut r, n, 4.0);
            (ensemble::rotated_diag(&mut r, &s), Some(s))
        };
        let rep = delta(&x).unwrap();
        let scan = delta_scan(&x, &cfg).unwrap();
        scan_w.check((scan.value - rep.value).abs() - 1e-6, || format!("sample {k}, n={n}"));
        if let Some(s) = spectrum {
            spec_w.check((rep.value - contrast_of_spectrum(&s)).abs() - 1e-9, || format!("sample {k}"));
        }
        if rep.singular {
            continue;
        }
        let inv = delta_inverse_formula(&x).unwrap();
        inv_w.check((inv - rep.value).abs() - 1e-9, || format!("sample {k}, n={n}"));
        if rep.bounds.hi > opcontrast::verify::ARGMIN_RESOLVABLE_COND * rep.bounds.lo {
            unresolvable += 1;
            continue;
        }
        let (a, b) = (rep.optimal_scale.unwrap(), scan.optimal_scale.unwrap());
        arg_w.check((a - b).abs() / a - 1e-6, || format!("sample {k}: A*={a}, scan argmin={b}"));
    }
    all(vec![
        scan_w.outcome("scan"),
        inv_w.outcome("inverse formula"),
        arg_w.outcome("argmin"),
        spec_w.outcome("known spectrum"),
    ])
    .map(|s| format!("{s}; argmin skipped on {unresolvable} samples with condition > 1e8"))
}

fn weighted() -> Outcome {
    let mut r = rng(3);
    let (mut ineq, mut eq) = (Worst::new(), Worst::new());
    for k in 0..1000 {
        let n = r.gen_range(2..=10);
        let x = ensemble::invertible_psd(&mut r, n, 4.0);
        let y = ensemble::invertible_psd(&mut r, n, 4.0);
        let w = weighted_subadditivity_terms(&x, &y).unwrap();
        ineq.check(w.lhs - w.rhs - 1e-9, || format!("pair {k}"));
    }
    for k in 0..300 {
        let n = r.gen_range(2..=10);
        let y = ensemble::invertible_psd(&mut r, n, 4.0);
        for l in [0.5, 2.0, 7.0] {
            let w = weighted_subadditivity_terms(&y.scale(l), &y).unwrap();
            eq.check((w.lhs - w.rhs).abs() - 1e-10, || format!("sample {k}, λ={l}"));
        }
    }
    all(vec![ineq.outcome("inequality"), eq.outcome("x = λy equality")])
}

fn max_subadditivity() -> Outcome {
    let mut r = rng(4);
    let mut pairs = Worst::new();
    for k in 0..1200 {
        let n = r.gen_range(2..=16);
        let (x, y) = match k % 3 {
            0 => (ensemble::mixed_psd(&mut r, n), ensemble::mixed_psd(&mut r, n)),
            1 => ensemble::commuting_pair(&mut r, n),
            _ => {
                let mut s = ensemble::log_uniform_spectrum(&mut r, n, 2.0);
                s[0] = 1e-11;
                (ensemble::rotated_diag(&mut r, &s), ensemble::singular_psd(&mut r, n))
            }
        };
        let lhs = d(&x.add(&y).unwrap());
        pairs.check(lhs - d(&x).max(d(&y)) - 1e-9, || format!("pair {k}, n={n}"));
    }
    let mut lemma = Worst::new();
    for k in 0..600 {
        let mut pos = || 10f64.powf(r.gen_range(-3.0..=1.0));
        let (a1, b1, a2, b2) = (pos(), pos(), pos(), pos());
        let lambda = r.gen_range(0.0..=1.0);
        let phase = r.gen_range(0.0..2.0 * PI);
        let (x, y) = ensemble::make_unitary_mixed_psd((a1, b1), (a2, b2), lambda, phase);
        // Y has eigenvalues α₂, β₂ regardless of λ and the phase
        let dy = contrast_of_spectrum(&[a2, b2]);
        let lhs = d(&x.add(&y).unwrap());
        lemma.check(lhs - d(&x).max(dy) - 1e-9, || format!("lemma case {k}"));
    }
    all(vec![pairs.outcome("pairs"), lemma.outcome("2x2 family")])
}

fn products() -> Outcome {
    let mut r = rng(5);
    let mut w = Worst::new();
    for k in 0..1000 {
        let n = r.gen_range(2..=10);
        let x = ensemble::mixed_psd(&mut r, n);
        let y = ensemble::mixed_psd(&mut r, n);
        let (xy, yx) = (delta_product(&x, &y).unwrap(), delta_product(&y, &x).unwrap());
        let (x2, y2) = (delta_power2(&x).unwrap(), delta_power2(&y).unwrap());
        let dx = d(&x);
        let excess = [
            (xy - yx).abs() - 1e-9,
            xy - x2.max(y2) - 1e-9,
            x2 - 2.0 * dx - 1e-9,
            dx - x2 - 1e-9,
        ]
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
        w.check(excess, || format!("pair {k}: xy={xy} yx={yx} x²={x2} y²={y2} x={dx}"));
    }
    w.outcome("four claims")
}

fn continuity() -> Outcome {
    let mut parts = Vec::new();
    let seq: Vec<f64> = (1..=1000).map(|n| d(&diag(&[1.0, 1.0 / n as f64]))).collect();
    let monotone = seq.windows(2).all(|w| w[1] >= w[0]);
    parts.push(if monotone { Ok("monotone".into()) } else { Err("sequence not monotone".into()) });
    parts.push(if seq[999] >= 0.998 {
        Ok(format!("Δ(x_1000) = {:.9}", seq[999]))
    } else {
        Err(format!("Δ(x_1000) = {}", seq[999]))
    });
    let mut r = rng(6);
    let mut w = Worst::new();
    for k in 0..500 {
        let n = r.gen_range(2..=10);
        let x = ensemble::invertible_psd(&mut r, n, 3.0);
        let lo = delta(&x).unwrap().bounds.lo;
        let e = unit_perturbation(&mut r, n).unwrap();
        let eps = lo * 10f64.powf(r.gen_range(-8.0..=-4.0));
        let moved = d(&x.add(&e.scale(eps)).unwrap());
        w.check((moved - d(&x)).abs() - 10.0 * eps / lo, || format!("case {k}"));
    }
    parts.push(w.outcome("perturbations"));
    all(parts)
}

fn blocks_suite() -> Outcome {
    let cfg = CentralSearchConfig::default();
    let mut parts = Vec::new();
    let mut r = rng(7);

    let mut scalar = Worst::new();
    for k in 0..100 {
        let m = r.gen_range(1..=6);
        let blocks = (0..m).map(|_| diag(&[r.gen_range(0.0..=5.0)])).collect();
        let b = BlockOperator::new(blocks).unwrap();
        scalar.check(delta_central(&b, &cfg).unwrap() - 1e-3, || format!("case {k}"));
    }
    let lp = BlockOperator::new(vec![diag(&[1.0]), diag(&[0.5]), diag(&[0.0])]).unwrap();
    scalar.check(delta_central(&lp, &cfg).unwrap() - 1e-3, || "(1, 0.5, 0)".into());
    parts.push(scalar.outcome("scalar blocks"));

    let mut single = Worst::new();
    for k in 0..100 {
        let n = r.gen_range(1..=5);
        let x = ensemble::mixed_psd(&mut r, n);
        let b = BlockOperator::new(vec![x.clone()]).unwrap();
        single.check((delta_central(&b, &cfg).unwrap() - d(&x)).abs() - 1e-3, || format!("case {k}"));
    }
    parts.push(single.outcome("single block"));

    let (mut bound, mut vertex, mut grid) = (Worst::new(), Worst::new(), Worst::new());
    for k in 0..220 {
        let m = r.gen_range(1..=4);
        let b = random_blocks(&mut r, m).unwrap();
        let s = delta_direct_sum_bound(&b, &cfg).unwrap();
        bound.check(s.lhs - s.rhs - 2e-3, || format!("operator {k}"));
        vertex.check((s.lhs - central_by_vertices(&b)).abs() - 1e-3, || format!("operator {k}"));
        if k < 40 {
            let g = delta_central_grid(&b, &cfg, true).unwrap();
            grid.check(s.lhs - g - 1e-3, || format!("operator {k}: signed grid {g} beats {}", s.lhs));
        }
    }
    parts.push(bound.outcome("direct-sum bound"));
    parts.push(vertex.outcome("vertex oracle"));
    parts.push(grid.outcome("signed grid"));

    let mut prime = Worst::new();
    for k in 0..500 {
        let m = r.gen_range(1..=4);
        let x = random_blocks(&mut r, m).unwrap();
        let y = BlockOperator::new(x.dims().into_iter().map(|n| ensemble::mixed_psd(&mut r, n)).collect()).unwrap();
        let ops = delta_prime_ops(&x, &y).unwrap();
        let sum = delta_prime(&x.add(&y).unwrap()).unwrap();
        let excess = if ops.all_hold(1e-9) { sum - ops.x.max(ops.y) - 1e-9 } else { 1.0 };
        prime.check(excess, || format!("pair {k}: {ops:?}"));
    }
    parts.push(prime.outcome("blockwise theorems"));

    let mut ind = Worst::new();
    for k in 0..50 {
        let m = r.gen_range(1..=5);
        let dims: Vec<usize> = (0..m).map(|_| r.gen_range(1..=4)).collect();
        let j = r.gen_range(0..m);
        let p = BlockOperator::indicator(&dims, j).unwrap();
        ind.check(delta_central(&p, &cfg).unwrap() - 1e-3, || format!("case {k}"));
    }
    parts.push(ind.outcome("indicators"));
    all(parts)
}

fn channels_suite() -> Outcome {
    let mut parts = vec![
        exact(
            "delta2 diag(1,2)",
            delta2(&RectMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap()).unwrap(),
            0.6,
            1e-12,
        ),
        exact(
            "delta2 2x3",
            delta2(&RectMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0]]).unwrap()).unwrap(),
            0.6,
            1e-12,
        ),
        exact(
            "delta2 zero row and column",
            delta2(&RectMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap()).unwrap(),
            1.0,
            1e-12,
        ),
    ];
    let stack = ChannelStack::new(vec![
        RectMatrix::identity(2).unwrap(),
        RectMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap(),
    ])
    .unwrap();
    parts.push(exact("delta2_prime", delta2_prime(&stack).unwrap(), 0.6, 1e-12));

    let mut r = rng(8);
    let mut cross = Worst::new();
    for k in 0..1000 {
        let (rows, cols) = (r.gen_range(1..=8), r.gen_range(1..=12));
        let a = ensemble::gaussian_rect(&mut r, rows, cols);
        let b = if k % 4 == 0 {
            a.scale(r.gen_range(0.1..3.0))
                .add(&ensemble::gaussian_rect(&mut r, rows, cols).scale(0.05))
                .unwrap()
        } else {
            ensemble::gaussian_rect(&mut r, rows, cols)
        };
        let c = cross_term_bound(&a, &b).unwrap();
        cross.check(c.lhs - c.rhs - 1e-9, || format!("pair {k}, {rows}x{cols}"));
    }
    parts.push(cross.outcome("cross terms"));

    let mut stacks = Worst::new();
    for k in 0..200 {
        let (rows, cols) = (r.gen_range(1..=6), r.gen_range(1..=6));
        let mut make = || ChannelStack::new((0..3).map(|_| ensemble::gaussian_rect(&mut r, rows, cols)).collect()).unwrap();
        let (m, n) = (make(), make());
        let c = delta2_prime_cross_bound(&m, &n).unwrap();
        stacks.check(c.lhs - c.rhs - 1e-9, || format!("stack pair {k}"));
    }
    parts.push(stacks.outcome("three-channel stacks"));

    let gaps = orthogonal_gaps(200, 8).unwrap();
    let violated = gaps.iter().filter(|(l, r)| l > &(r + 1e-9)).count();
    let (lo, hi) = gaps
        .iter()
        .map(|(l, r)| r - l)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), g| (a.min(g), b.max(g)));
    parts.push(if violated == 0 {
        Ok(format!("rotation gaps in [{lo:.3e}, {hi:.3e}]"))
    } else {
        Err(format!("{violated} rotation pairs violate the bound"))
    });

    let mut mich = Worst::new();
    for k in 0..120 {
        let n = r.gen_range(1..=64);
        let mut s: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..=1.0)).collect();
        if k % 10 == 0 {
            s[0] = 0.0;
        }
        let m = michelson_contrast(&s).unwrap();
        mich.check((m - d(&diag(&s))).abs() - 1e-12, || format!("vector {k}"));
    }
    parts.push(mich.outcome("michelson"));
    all(parts)
}

fn counterexamples() -> Outcome {
    let x = diag(&[2.0, 4.0]);
    let y = diag(&[3.0, 9.0]);
    let x2 = diag(&[1.0, 2.0]);
    let y2 = diag(&[2.0, 3.0]);
    let p = diag(&[1.0, 0.0]);
    let q = diag(&[0.0, 1.0]);
    let ordered = |a: &HermitianMatrix, b: &HermitianMatrix| opcontrast::linalg::is_psd(&b.sub(a).unwrap(), 0.0);
    let mut parts = vec![
        exact("Δ(2,4)", d(&x), 1.0 / 3.0, 1e-12),
        exact("Δ(3,9)", d(&y), 0.5, 1e-12),
        exact("Δ(1,2)", d(&x2), 1.0 / 3.0, 1e-12),
        exact("Δ(2,3)", d(&y2), 0.2, 1e-12),
        exact("Δ(p)", d(&p), 1.0, 1e-12),
        exact("Δ(p⊥)", d(&q), 1.0, 1e-12),
        exact("Δ(p+p⊥)", d(&p.add(&q).unwrap()), 0.0, 1e-12),
    ];
    let shape = ordered(&x, &y) && ordered(&x2, &y2) && d(&x) < d(&y) && d(&x2) > d(&y2);
    parts.push(if shape { Ok("orderings".into()) } else { Err("orderings do not reproduce".into()) });
    parts.push(if !cone_member(&x, 0.3, 0.0).unwrap() && cone_member(&x, 1.0 / 3.0, 1e-15).unwrap() {
        Ok("cone".into())
    } else {
        Err("cone membership of diag(2,4)".into())
    });
    all(parts).map(|_| "non-monotone pairs and p/p⊥ reproduce".into())
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_opcontrast")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn cli_suite() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str, body: &[u8]| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.display().to_string()
    };
    let m = path("d.txt", b"2 2\n2 0\n0 4\n");
    let blocks = path("b.txt", b"# name: a\n2 2\n0 0\n0 1\n---\n# name: b\n1 1\n1\n");
    let img = path("c.pgm", b"P2\n3 2\n255\n128 128 128\n128 128 128\n");
    let bad_img = path("bad.pgm", b"P2\n3 2\n255\n1 2\n");
    let bad_m = path("bad.txt", b"2 2\n1 0\n0 x\n");
    let neg = path("neg.txt", b"2 2\n1 0\n0 -1\n");
    let ident = path("i.txt", b"2 2\n1 0\n0 1\n");

    let mut parts = Vec::new();
    let mut expect = |label: &str, args: &[&str], code: i32, needles: &[&str]| {
        let first = cli(args);
        let second = cli(args);
        let text = format!("{}{}", first.1, first.2);
        let mut problems = Vec::new();
        if first.0 != code {
            problems.push(format!("exit {} (want {code})", first.0));
        }
        if first != second {
            problems.push("output differs between runs".into());
        }
        for n in needles {
            if !text.contains(n) {
                problems.push(format!("missing {n:?}"));
            }
        }
        parts.push(if problems.is_empty() {
            Ok(label.to_string())
        } else {
            Err(format!("{label}: {}", problems.join(", ")))
        });
    };
    expect("delta", &["delta", &m], 0, &["delta = 0.333333333\n", "optimal_scale = 3.00000000\n"]);
    expect("delta --json", &["delta", &m, "--json"], 0, &["\"value\": 0.3333333333333333"]);
    expect("image", &["image", &img], 0, &["michelson.gray = 0\n", "michelson.max = 0\n"]);
    expect("blocks", &["blocks", &blocks], 0, &["delta_prime = 1.00000000\n", "direct_sum_bound = holds\n"]);
    expect("cone", &["cone", &ident, "--c", "0"], 0, &["member = true\n"]);
    expect("verify", &["verify", "--seeds", "1000"], 0, &["PASS  max-subadditivity"]);
    expect("malformed image", &["image", &bad_img], 2, &["offset"]);
    expect("malformed matrix", &["delta", &bad_m], 2, &["byte offset 10"]);
    expect("non-PSD", &["delta", &neg], 1, &["positive semidefinite"]);
    let (_, verify_out, _) = cli(&["verify", "--seeds", "1000"]);
    if verify_out.contains("FAIL") {
        parts.push(Err("verify reports a failing suite".into()));
    }
    all(parts)
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("exact regressions", regressions),
        ("oracle equivalence", oracle_equivalence),
        ("weighted subadditivity", weighted),
        ("max-subadditivity", max_subadditivity),
        ("products and squares", products),
        ("continuity and singular limit", continuity),
        ("block operators", blocks_suite),
        ("rectangular and multichannel", channels_suite),
        ("counterexamples", counterexamples),
        ("command line", cli_suite),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {:>2} {name} [{secs:.1}s]: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {:>2} {name} [{secs:.1}s]: {detail}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
