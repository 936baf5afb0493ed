//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use hyperkernel::kernel::functions::decay_index;
use hyperkernel::linalg;
use hyperkernel::measure::z_measure_n;
use hyperkernel::sample::{empirical_correlation, sample_batch};
use hyperkernel::verify::{
    fredholm_check, identity_suite, limit_relation_check, meixner_check, normalization_check, oracle_suite,
    plancherel_check, scaling_limit_check, Check, VerificationReport, DEFAULT_U_GRID, ORACLE_N_MAX, ORACLE_TAIL_TOL,
};
use hyperkernel::{Block, Configuration, GrandParams, HalfInt, HyperKernel, Result, Sign, YoungDiagram, ZParams};
use nalgebra::DMatrix;

type Outcome = Result<(bool, String)>;

fn real() -> ZParams {
    ZParams::real(0.5, 1.0 / 3.0).unwrap()
}

fn complex() -> ZParams {
    ZParams::conjugate_pair(0.5, 1.5).unwrap()
}

fn summary(r: &VerificationReport) -> String {
    let worst_abs = r.max_error(Check::Abs);
    let worst_rel = r.max_error(Check::Rel);
    let failed = r.failures().count();
    format!("{} cases, {failed} failed, max abs {worst_abs:.2e}, max rel {worst_rel:.2e}", r.cases.len())
}

fn normalization() -> Outcome {
    let params = [real(), ZParams::real(-0.4, -0.7)?, complex()];
    let r = normalization_check(&params, 1..=18, 1e-11)?;
    Ok((r.pass, summary(&r)))
}

fn spot_values() -> Outcome {
    let zp = real();
    let a = z_measure_n(&YoungDiagram::new(vec![2])?, &zp)?;
    let b = z_measure_n(&YoungDiagram::new(vec![1, 1])?, &zp)?;
    let (ea, eb) = ((a - 6.0 / 7.0).abs(), (b - 1.0 / 7.0).abs());
    Ok((ea <= 1e-14 && eb <= 1e-14, format!("|M(2) - 6/7| = {ea:.1e}, |M(1,1) - 1/7| = {eb:.1e}")))
}

fn fredholm() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (zp, xi) in [(real(), 0.3), (complex(), 0.5)] {
        let gp = GrandParams::new(zp, xi)?;
        let needed = decay_index(&gp, Sign::Plus)?.index.max(decay_index(&gp, Sign::Minus)?.index) as usize;
        let trunc = needed.max(60);
        let start = Instant::now();
        let r = fredholm_check(&gp, trunc)?;
        let secs = start.elapsed().as_secs_f64();
        ok &= r.pass && secs < 1.0;
        detail.push(format!("xi = {xi}, trunc = {trunc}: |det(1+L)(1-xi)^t - 1| = {:.1e} ({secs:.2}s)", r.cases[0].abs_err));
    }
    Ok((ok, detail.join("; ")))
}

fn oracle() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = Vec::new();
    for zp in [real(), complex()] {
        let r = oracle_suite(&GrandParams::new(zp, 0.2)?, ORACLE_N_MAX, ORACLE_TAIL_TOL, 1e-6)?;
        ok &= r.pass;
        detail.push(summary(&r));
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((ok && secs < 60.0, format!("{} ({secs:.1}s)", detail.join("; "))))
}

fn operator_identity() -> Outcome {
    let n = 80;
    let mut worst: f64 = 0.0;
    for zp in [real(), complex()] {
        let k = HyperKernel::new(GrandParams::new(zp, 0.3)?);
        let l = k.l_matrix(n)?;
        let one_plus = DMatrix::identity(2 * n, 2 * n) + &l;
        let resolvent = linalg::solve(&one_plus.transpose(), &l.transpose())?.transpose();
        worst = worst.max(linalg::max_abs_diff(&k.k_matrix(n)?, &resolvent));
        let c = k.block_matrix(Block::PM, n)?.entries;
        let d = k.d_matrix(n)?;
        let pp = k.block_matrix(Block::PP, n)?.entries;
        let mm = k.block_matrix(Block::MM, n)?.entries;
        let mp = k.block_matrix(Block::MP, n)?.entries;
        worst = worst.max(linalg::max_abs_diff(&pp, &(&c * &d)));
        worst = worst.max(linalg::max_abs_diff(&mm, &(&d * &c)));
        worst = worst.max(linalg::max_abs_diff(&mp, &(&d * &c * &d - &d)));
    }
    Ok((worst <= 1e-8, format!("max entry difference {worst:.2e}")))
}

fn identities() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for zp in [real(), complex()] {
        let r = identity_suite(&GrandParams::new(zp, 0.2)?, &DEFAULT_U_GRID)?;
        ok &= r.pass;
        detail.push(summary(&r));
    }
    Ok((ok, detail.join("; ")))
}

fn meixner() -> Outcome {
    let r = meixner_check(3, 0.5, 0.4, 10, 100)?;
    Ok((r.pass, summary(&r)))
}

fn scaling() -> Outcome {
    let start = Instant::now();
    let r = scaling_limit_check(&real(), 1.0, 2.0, &[0.9, 0.99, 0.999], 5e-2)?;
    let secs = start.elapsed().as_secs_f64();
    let last: Vec<String> = r.cases.iter().filter(|c| c.check == Check::Rel).map(|c| format!("{:.1e}", c.rel_err)).collect();
    Ok((r.pass && secs < 10.0, format!("errors at xi = 0.999 by block: {} ({secs:.2}s)", last.join(", "))))
}

fn limit_relation() -> Outcome {
    let r = limit_relation_check(-0.5, -1.0 / 3.0, 2000.0, &[0.5, 1.5, 5.0], 1e-2)?;
    Ok((r.pass, summary(&r)))
}

fn monte_carlo() -> Outcome {
    let start = Instant::now();
    let gp = GrandParams::new(real(), 0.5)?;
    let batch = sample_batch(&gp, 20_240_601, 100_000)?;
    let again = sample_batch(&gp, 20_240_601, 100_000)?;
    let kernel = HyperKernel::new(gp);
    let mut ok = batch == again;
    let mut worst: f64 = 0.0;
    for k in 0..2 {
        for sign in [Sign::Plus, Sign::Minus] {
            let x = HalfInt::new(sign, k);
            let (p, se) = empirical_correlation(&batch, &Configuration::new([x]))?;
            let exact = kernel.entry(x, x)?;
            let z = (p - exact).abs() / se;
            worst = worst.max(z);
            ok &= z <= 3.0;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok((ok && secs < 60.0, format!("max |deviation|/se = {worst:.2}, rerun identical = {}, {secs:.1}s", batch == again)))
}

fn plancherel() -> Outcome {
    let r = plancherel_check(6, &[100.5, 1000.5], 0.05)?;
    let d: Vec<String> = r.cases.iter().map(|c| format!("{:.2e}", c.lhs)).collect();
    Ok((r.pass, format!("max deviation at z = 100.5, 1000.5: {}", d.join(", "))))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("normalization over Y_n, n <= 18, three parameter sets", normalization),
        ("spot values 6/7 and 1/7", spot_values),
        ("det(1 + L) = (1 - xi)^-t", fredholm),
        ("det K_X against brute force", oracle),
        ("K = L(1+L)^-1 and block relations", operator_identity),
        ("Gauss-function identities", identities),
        ("Meixner degeneration and projection", meixner),
        ("scaling limit to the Whittaker kernel", scaling),
        ("Gauss-Whittaker limit at u = 2000", limit_relation),
        ("Monte Carlo one-point functions", monte_carlo),
        ("Plancherel limit", plancherel),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check));
        let (pass, detail) = match outcome {
            Ok(Ok(v)) => v,
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(_) => (false, "panicked".into()),
        };
        if !pass {
            failed += 1;
        }
        println!("{} criterion {:>2}: {name}: {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
