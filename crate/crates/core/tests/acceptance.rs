//! Acceptance suite. Runs every criterion at its stated tolerance and prints
//! one PASS/FAIL line each. Exits nonzero if a criterion fails that is not
//! listed in `KNOWN_UNATTAINABLE`.

use critval::cli::regression_checks;
use critval::limit_law::{
    case1_identity_check, default_grid, derivation_audit, gaussian_limit_report, growth_fit, is_decreasing,
    limit_total_mass, rbar_comparison, tabulate_rho, RhoSource,
};
use critval::random_matrices::{
    expected_abs_det_goe_exact, expected_abs_det_mc, expected_abs_det_shifted, rescale_correlation, rho_exact,
    selberg_z, selberg_z_quadrature, ExactRho, MatrixEnsemble, OnePointDensity,
};
use critval::report::Status;
use critval::rng::{derive_seed, stream};
use critval::torus::{build_spectrum, covariance_report, empirical_complexity, kac_rice_total, universality_check};
use critval::{omega_params, spectral_constants, UniformGrid};
use rand::Rng;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

/// Criteria whose faithful implementation is known to fail.
/// 14: over m in {4, 8, 16, 32}, ln C_m = (1/2) m ln m - m + O(ln m), so the
/// least-squares slope against (1/2) m ln m is about 0.5, not 1 +- 20%.
const KNOWN_UNATTAINABLE: &[u32] = &[14];

const SEED: u64 = 0x5eed_2024;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn c01() -> Outcome {
    let mut worst = 0.0f64;
    for m in 1..=50 {
        let c = spectral_constants(m).unwrap();
        worst = worst.max(c.s_identity_residual()).max(c.d_identity_residual());
    }
    outcome(worst <= 1e-12, format!("max relative residual {worst:.2e} (tol 1e-12)"))
}

fn c02() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (m, tol) in [(1u32, 1e-8), (2, 1e-8), (3, 1e-4)] {
        let q = selberg_z_quadrature(m, 1e-11).unwrap();
        let err = (q / selberg_z(m).unwrap() - 1.0).abs();
        pass &= err <= tol;
        parts.push(format!("m={m}: {err:.1e} (tol {tol:.0e})"));
    }
    outcome(pass, parts.join(", "))
}

fn c03() -> Outcome {
    let mut worst_z = 0.0f64;
    let mut tag = 0;
    for m in 1..=3 {
        for v in [0.5, 1.0] {
            for c in [0.0, 0.7, -1.3] {
                tag += 1;
                let exact = expected_abs_det_goe_exact(m, v, c).unwrap();
                let mc = expected_abs_det_mc(&MatrixEnsemble::goe(m, v).unwrap(), c, 200_000, derive_seed(SEED, tag))
                    .unwrap();
                worst_z = worst_z.max((mc.value - exact).abs() / mc.std_error);
            }
        }
    }
    let special = expected_abs_det_goe_exact(1, 0.5, 0.0).unwrap();
    let special_err = (special - (2.0 / std::f64::consts::PI).sqrt()).abs();
    outcome(
        worst_z <= 3.0 && special_err <= 1e-3,
        format!("max |z| {worst_z:.2} over 18 cases (tol 3); m=1,v=1/2,c=0 error {special_err:.1e} (tol 1e-3)"),
    )
}

fn c04() -> Outcome {
    let (mut worst_rel, mut worst_z) = (0.0f64, 0.0f64);
    let mut tag = 100;
    for m in 1..=3 {
        let v = 1.0;
        let rho = ExactRho::new(m + 1, v).unwrap();
        for k in [0.25, 0.5] {
            let u = 2.0 * k * v;
            for c in [0.0, 0.7, -1.3] {
                tag += 1;
                let sd = expected_abs_det_shifted(m, u, v, c, &rho).unwrap();
                let cs = sd.completed_square.unwrap();
                worst_rel = worst_rel.max((sd.general.value - cs).abs() / cs.abs());
                let mc = expected_abs_det_mc(&MatrixEnsemble::new(m, u, v).unwrap(), c, 200_000, derive_seed(SEED, tag))
                    .unwrap();
                worst_z = worst_z.max((mc.value - sd.general.value).abs() / mc.std_error);
            }
        }
    }
    outcome(
        worst_rel <= 1e-8 && worst_z <= 3.0,
        format!("forms differ by {worst_rel:.1e} (tol 1e-8); max |z| vs Monte Carlo {worst_z:.2} (tol 3)"),
    )
}

fn c05() -> Outcome {
    let mut worst = 0.0f64;
    let mut n = 0;
    let mut pass = true;
    for dim in 2..=6 {
        for c in regression_checks(dim, 200_000, derive_seed(SEED, 200 + dim as u64)).unwrap() {
            worst = worst.max(c.error);
            pass &= c.status == Status::Pass;
            n += 1;
        }
    }
    outcome(pass, format!("{n} conditional moments, max |z| {worst:.2} (tol 4)"))
}

fn c06() -> Outcome {
    let mut worst = 0.0f64;
    let c = 1.7;
    for n in 1..=4 {
        let v = 0.8;
        let base = rho_exact(n, v, UniformGrid::symmetric(3.0 * c, 100).unwrap()).unwrap();
        let scaled = rescale_correlation(&base, c).unwrap();
        let direct = ExactRho::new(n, v / (c * c)).unwrap();
        for x in UniformGrid::symmetric(3.0, 100).unwrap().points() {
            let d = direct.value(x);
            worst = worst.max((scaled.density.density_at(x) - d).abs() / d);
        }
    }
    outcome(worst <= 1e-10, format!("max relative error {worst:.1e} at 100 points, n=1..4 (tol 1e-10)"))
}

fn c07() -> Outcome {
    let mut rng = stream(SEED, 7);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let r = rng.random_range(1.0..5.0);
        let l = rng.random_range(-5.0..5.0);
        let y = rng.random_range(-5.0..5.0);
        worst = worst.max(case1_identity_check(r, l, y).unwrap());
    }
    outcome(worst <= 1e-12, format!("max residual {worst:.1e} over 10^4 inputs (tol 1e-12)"))
}

fn c08() -> Outcome {
    let grid = default_grid();
    let mut exact_worst = 0.0f64;
    for m in 1..=3 {
        let rho = ExactRho::new(m + 1, 1.0).unwrap();
        exact_worst = exact_worst.max(derivation_audit(m, 1.0, grid, &rho).unwrap());
    }
    let mc = tabulate_rho(2, RhoSource::MonteCarlo { samples: 200_000, seed: derive_seed(SEED, 8) }).unwrap();
    let mc_ks = derivation_audit(2, 2.0, grid, &mc).unwrap();
    outcome(
        exact_worst <= 1e-4 && mc_ks <= 0.01,
        format!("r=1 exact KS {exact_worst:.1e} (tol 1e-4); r=2 Monte Carlo KS {mc_ks:.1e} (tol 0.01)"),
    )
}

fn c09() -> Outcome {
    let entries = gaussian_limit_report(&[8, 16, 32, 64], 100_000, derive_seed(SEED, 9)).unwrap();
    let (strict, _) = is_decreasing(&entries);
    let last = entries.last().unwrap().ks;
    let ks: Vec<String> = entries.iter().map(|e| format!("{:.4}", e.ks)).collect();
    outcome(strict && last <= 0.05, format!("KS along m=8,16,32,64: [{}] (decreasing, last <= 0.05)", ks.join(", ")))
}

fn c10() -> Outcome {
    let a = rbar_comparison(16, 1.5, 20_000, derive_seed(SEED, 10)).unwrap();
    let b = rbar_comparison(64, 1.5, 20_000, derive_seed(SEED, 11)).unwrap();
    outcome(
        b.sup_error_inside < a.sup_error_inside && b.max_outside <= a.max_outside,
        format!(
            "inside sup {:.4} -> {:.4}; outside max {:.4} -> {:.4}",
            a.sup_error_inside, b.sup_error_inside, a.max_outside, b.max_outside
        ),
    )
}

fn c11() -> Outcome {
    let reports: Vec<_> =
        [20.0, 40.0, 80.0].iter().map(|&l| covariance_report(&build_spectrum(2, l).unwrap()).unwrap()).collect();
    let mut pass = reports.iter().all(|r| r.zeros_exact());
    let mut worst_final = 0.0f64;
    for (i, e) in reports[2].entries.iter().enumerate() {
        let Some(r80) = e.ratio else { continue };
        worst_final = worst_final.max((r80 - 1.0).abs());
        let devs: Vec<f64> = reports.iter().map(|r| (r.entries[i].ratio.unwrap() - 1.0).abs()).collect();
        pass &= devs[1] < devs[0] && devs[2] < devs[1];
    }
    pass &= worst_final <= 0.05;
    outcome(pass, format!("max |ratio - 1| at L=80: {worst_final:.4} (tol 0.05), monotone from L=20, zeros exact"))
}

fn c12() -> Outcome {
    let p = omega_params(2, 20.0, 1.0).unwrap();
    let s = Arc::new(build_spectrum(2, 20.0).unwrap());
    let emp = empirical_complexity(&s, p.omega, 200, derive_seed(SEED, 12), None).unwrap();
    let kr = kac_rice_total(&s, p.omega, 1_000_000, derive_seed(SEED, 13)).unwrap();
    let z = (emp.mean_count - kr.value).abs() / emp.std_error.hypot(kr.std_error);
    let morse_ok = emp.incomplete_fields == 0;
    outcome(
        z <= 3.0 && morse_ok,
        format!(
            "mean count {:.2} +- {:.2} vs Kac-Rice {:.2} +- {:.2}, |z| {z:.2} (tol 3); {} fields with nonzero Morse sum",
            emp.mean_count, emp.std_error, kr.value, kr.std_error, emp.incomplete_fields
        ),
    )
}

fn c13() -> Outcome {
    let (small, _, _) = universality_check(2, 15.0, 1.0, 300, derive_seed(SEED, 14), None).unwrap();
    let (large, _, _) = universality_check(2, 30.0, 1.0, 300, derive_seed(SEED, 15), None).unwrap();
    outcome(
        large.ks <= 0.08 && large.ks < small.ks,
        format!(
            "KS L=15 {:.4}, L=30 {:.4} (tol 0.08, noise floor {:.4})",
            small.ks, large.ks, large.ks_noise_floor
        ),
    )
}

fn c14() -> Outcome {
    let masses: Vec<_> = [4usize, 8, 16, 32]
        .iter()
        .map(|&m| limit_total_mass(m, RhoSource::MonteCarlo { samples: 20_000, seed: derive_seed(SEED, 16 + m as u64) }).unwrap())
        .collect();
    let fit = growth_fit(&masses).unwrap();
    let ln: Vec<String> = masses.iter().map(|t| format!("{:.3}", t.ln_value)).collect();
    outcome(
        (fit.slope - 1.0).abs() <= 0.2,
        format!("slope {:.3} (target 1 +- 0.2); ln C_m for m=4,8,16,32: [{}]", fit.slope, ln.join(", ")),
    )
}

fn run_cli(args: &[&str], out: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_critval"))
        .args(["--out", out.to_str().unwrap(), "--format", "json,csv,svg"])
        .args(args)
        .output()
        .unwrap()
}

fn c15() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let runs: [&[&str]; 4] = [
        &["constants", "--m", "3", "--L", "10", "--r", "2"],
        &["rmt-verify", "--samples", "2000"],
        &["limit-law", "--m", "2", "--r", "2", "--sweep", "8,16", "--sweep-samples", "2000", "--rbar", "16", "--rbar-samples", "2000"],
        &["simulate", "--L", "12", "--fields", "20", "--kr-samples", "20000", "--kr-density-samples", "2000"],
    ];
    let mut compared = 0;
    for (i, args) in runs.iter().enumerate() {
        let a = dir.path().join(format!("{i}a"));
        let b = dir.path().join(format!("{i}b"));
        run_cli(args, &a);
        let mut second: Vec<&str> = vec!["--threads", "1"];
        second.extend_from_slice(args);
        run_cli(&second, &b);
        let mut names: Vec<_> = std::fs::read_dir(&a)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| !n.ends_with(".timing.json"))
            .collect();
        names.sort();
        if names.is_empty() {
            return outcome(false, format!("{} produced no files", args[0]));
        }
        for n in names {
            let (x, y) = (std::fs::read(a.join(&n)).unwrap(), std::fs::read(b.join(&n)).unwrap());
            if x != y {
                return outcome(false, format!("{} differs between runs", n));
            }
            compared += 1;
        }
    }
    outcome(true, format!("{compared} CSV/JSON/SVG files byte-identical across reruns"))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 15] = [
        (1, "spectral constant identities, m = 1..50", c01),
        (2, "Selberg constant vs quadrature", c02),
        (3, "expected |det| of shifted GOE vs Monte Carlo", c03),
        (4, "expected |det| over S_m^{u,v}: forms and Monte Carlo", c04),
        (5, "Gaussian regression vs slice rejection", c05),
        (6, "one-point function rescaling identity", c06),
        (7, "case-1 convolution identity", c07),
        (8, "two constructions of sigma_{m,r}", c08),
        (9, "Gaussian limit trend of sigma_{m,1}", c09),
        (10, "rescaled one-point function vs semicircle", c10),
        (11, "torus covariance lattice sums", c11),
        (12, "Kac-Rice total vs empirical count", c12),
        (13, "torus universality at desk scale", c13),
        (14, "growth of the total mass constant", c14),
        (15, "CLI determinism", c15),
    ];
    let mut unexpected = Vec::new();
    for (id, name, f) in criteria {
        let t = Instant::now();
        let o = f();
        let secs = t.elapsed().as_secs_f64();
        let known = KNOWN_UNATTAINABLE.contains(&id);
        let tag = match (o.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known unattainable)",
            (false, false) => "FAIL",
        };
        println!("criterion {id:>2} {tag}: {name}: {} [{secs:.1}s]", o.detail);
        if !o.pass && !known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
