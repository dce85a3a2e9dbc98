//! Release acceptance checks. Each test covers one criterion end-to-end and
//! prints a single `acceptance N (...): PASS` / `... FAIL` line with the
//! measured values, so a test-runner log doubles as a release report.

use std::time::Instant;

use condcode_core::{
    closed_form_check, linearity_deviation, mi_from_pred_residual_pairs, monte_carlo_check,
    probability_grid, run_identity_suite, sample_joint, switch_channel, verify_residual_identity,
    empirical_mi, GrayImage, Joint2, Pmf, SweepConfig, SwitchSpec, IDENTITY_TOLERANCE,
};

fn uniform_pixel_prior() -> Pmf {
    Pmf::uniform(256, 0).unwrap()
}

fn column(table: &condcode_core::CurveTable, name: &str) -> usize {
    table.column(name).unwrap_or_else(|| panic!("column {name}"))
}

#[test]
fn acceptance_1_identity_suite() {
    let report = run_identity_suite(1000, 42).unwrap();
    let ok = report.max_residual_identity_error < IDENTITY_TOLERANCE
        && report.max_cmi_identity_error < IDENTITY_TOLERANCE
        && report.max_combined_identity_error < IDENTITY_TOLERANCE;
    println!(
        "acceptance 1 (identity suite, 1000 random models): {} — residual {:.3e}, \
         bottleneck subtraction {:.3e}, bottleneck combined {:.3e}, tolerance {:.0e}",
        if ok { "PASS" } else { "FAIL" },
        report.max_residual_identity_error,
        report.max_cmi_identity_error,
        report.max_combined_identity_error,
        IDENTITY_TOLERANCE,
    );
    assert!(ok, "identity residuals above tolerance: {report:?}");
}

#[test]
fn acceptance_2_closed_form() {
    let grid = probability_grid(101).unwrap();
    let (max_err, w_spread) = closed_form_check(255, &[0, 100, 255], &grid).unwrap();
    let ok = max_err < IDENTITY_TOLERANCE && w_spread <= 1e-12;
    println!(
        "acceptance 2 (closed form vs enumeration, N=255, w in {{0,100,255}}): {} — \
         max error {:.3e} (need < 1e-9), w spread {:.3e} (need <= 1e-12)",
        if ok { "PASS" } else { "FAIL" },
        max_err,
        w_spread,
    );
    assert!(ok);
}

#[test]
fn acceptance_3_error_probability_sweep_properties() {
    let table = condcode_core::sweep_p(&SweepConfig::default_p_sweep()).unwrap();
    let (ihr, ihc) = (column(&table, "h_residual"), column(&table, "h_cond"));
    let (ih7, ih6) = (column(&table, "h_cond_7"), column(&table, "h_cond_6"));
    let rows = &table.rows;

    let endpoints_ok = (rows[0][ihr] - rows[0][ihc]).abs() < 1e-9
        && (rows[rows.len() - 1][ihr] - rows[rows.len() - 1][ihc]).abs() < 1e-9;

    let strict_interior_ok = rows[1..rows.len() - 1]
        .iter()
        .all(|r| r[ihr] > r[ihc]);

    let mut max_second_diff = f64::NEG_INFINITY;
    for k in 1..rows.len() - 1 {
        let d2 = rows[k - 1][ihr] - 2.0 * rows[k][ihr] + rows[k + 1][ihr];
        max_second_diff = max_second_diff.max(d2);
    }
    let concave_ok = max_second_diff <= 1e-9;

    let starts_ok = rows[0][ih7] == 1.0 && rows[0][ih6] == 2.0;

    let crossing = |col: usize| {
        rows[1..rows.len() - 1]
            .iter()
            .any(|r| r[col] < r[ihr])
    };
    let crossing_ok = crossing(ih7) && crossing(ih6);

    let ok = endpoints_ok && strict_interior_ok && concave_ok && starts_ok && crossing_ok;
    println!(
        "acceptance 3 (error-probability sweep curve properties): {} — endpoints match: {}, \
         strict interior gap: {}, max second difference {:.3e} (need <= 1e-9), \
         bottleneck starts at (1.0, 2.0) bit: {}, bottleneck curves cross below H(r): {}",
        if ok { "PASS" } else { "FAIL" },
        endpoints_ok,
        strict_interior_ok,
        max_second_diff,
        starts_ok,
        crossing_ok,
    );
    assert!(ok);
}

#[test]
fn acceptance_4_noise_sweep_properties() {
    let table = condcode_core::sweep_sigma(&SweepConfig::default_sigma_sweep()).unwrap();
    let (ip, is) = (column(&table, "p"), column(&table, "sigma_p"));
    let (ihr, ihc, ih7) = (
        column(&table, "h_residual"),
        column(&table, "h_cond"),
        column(&table, "h_cond_7"),
    );
    let rows = &table.rows;

    // Clause a: no conditional-coding gain at p = 0 anywhere on the noise grid.
    let max_gap_p0 = rows
        .iter()
        .filter(|r| r[ip] == 0.0)
        .map(|r| r[ihr] - r[ihc])
        .fold(f64::NEG_INFINITY, f64::max);
    let a_ok = max_gap_p0 < 0.05;

    // Clause b: for p > 0 the gap is (approximately) constant in the noise
    // level: relative variation (max − min) / mean < 5% over sigma in [1, 20].
    let mut variations = Vec::new();
    for &p in &[0.1, 0.2, 0.4] {
        let gaps: Vec<f64> = rows
            .iter()
            .filter(|r| r[ip] == p && r[is] >= 1.0)
            .map(|r| r[ihr] - r[ihc])
            .collect();
        let (mut lo, mut hi, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
        for &g in &gaps {
            lo = lo.min(g);
            hi = hi.max(g);
            sum += g;
        }
        variations.push((p, (hi - lo) / (sum / gaps.len() as f64)));
    }
    let b_ok = variations.iter().all(|&(_, v)| v < 0.05);

    // Clause c: the bottlenecked and ideal conditional curves converge as the
    // noise grows: the gap at sigma = 20 is below 25% of its sigma = 0 value.
    let mut ratios = Vec::new();
    for &p in &[0.0, 0.1, 0.2, 0.4] {
        let diff_at = |sigma: f64| {
            rows.iter()
                .find(|r| r[ip] == p && r[is] == sigma)
                .map(|r| (r[ih7] - r[ihc]).abs())
                .expect("grid row present")
        };
        ratios.push((p, diff_at(20.0) / diff_at(0.0)));
    }
    let c_ok = ratios.iter().all(|&(_, v)| v < 0.25);

    let ok = a_ok && b_ok && c_ok;
    println!(
        "acceptance 4 (noise sweep curve properties): {} — p=0 max gap {:.6} bit \
         (need < 0.05); gap variation over sigma in [1,20]: {} (need < 5%); \
         bottleneck convergence ratios at sigma=20 vs 0: {} (need < 25%)",
        if ok { "PASS" } else { "FAIL" },
        max_gap_p0,
        variations
            .iter()
            .map(|(p, v)| format!("p={p}: {:.2}%", v * 100.0))
            .collect::<Vec<_>>()
            .join(", "),
        ratios
            .iter()
            .map(|(p, v)| format!("p={p}: {:.2}%", v * 100.0))
            .collect::<Vec<_>>()
            .join(", "),
    );
    assert!(
        ok,
        "noise sweep properties violated: p=0 max gap {max_gap_p0:.6}, \
         variations {variations:?}, convergence ratios {ratios:?}"
    );
}

#[test]
fn acceptance_5_monte_carlo_oracle() {
    let prior = uniform_pixel_prior();
    let channel = switch_channel(&SwitchSpec {
        n_max: 255,
        p: 0.5,
        w: 0,
    })
    .unwrap();
    let start = Instant::now();
    let large = monte_carlo_check(&prior, &channel, None, 1_000_000, 1).unwrap();
    let elapsed = start.elapsed();
    let small = monte_carlo_check(&prior, &channel, None, 1_000, 1).unwrap();
    let ok = large.dev_h_residual < 0.05
        && large.dev_h_cond < 0.05
        && large.dev_h_residual < small.dev_h_residual
        && large.dev_h_cond < small.dev_h_cond
        && elapsed.as_secs_f64() < 30.0;
    println!(
        "acceptance 5 (Monte Carlo oracle, switch p=0.5): {} — deviations at 10^6 samples: \
         H(r) {:.6}, H(x|x_p) {:.6} (need < 0.05); at 10^3 samples: {:.6}, {:.6} \
         (must shrink); runtime {:.2}s (need < 30s)",
        if ok { "PASS" } else { "FAIL" },
        large.dev_h_residual,
        large.dev_h_cond,
        small.dev_h_residual,
        small.dev_h_cond,
        elapsed.as_secs_f64(),
    );
    assert!(ok);
}

#[test]
fn acceptance_6_empirical_mi() {
    // Identical images: zero residual entropy forces MI = 0 exactly.
    let mut pixels = Vec::with_capacity(4096);
    for k in 0..4096usize {
        pixels.push((k * 31 % 256) as u8);
    }
    let img = GrayImage::new(64, 64, pixels.clone()).unwrap();
    let identical = empirical_mi(&img, &img).unwrap();

    // Constant prediction: H(x_p) = 0 forces MI = 0.
    let flat = GrayImage::new(64, 64, vec![128; 4096]).unwrap();
    let constant = empirical_mi(&img, &flat).unwrap();

    // Shifted-edge pair: residual and prediction are dependent, MI > 0.
    let (w, h) = (64usize, 64usize);
    let mut orig = vec![0u8; w * h];
    let mut pred = vec![0u8; w * h];
    for row in 0..h {
        for col in 0..w {
            orig[row * w + col] = if col < 32 { 50 } else { 200 };
            let shifted = col.saturating_sub(1);
            pred[row * w + col] = if shifted < 32 { 50 } else { 200 };
        }
    }
    let shifted_edge = empirical_mi(
        &GrayImage::new(w, h, orig).unwrap(),
        &GrayImage::new(w, h, pred).unwrap(),
    )
    .unwrap();

    // Sampling a known switch joint recovers its exact I(x_p; r).
    let prior = uniform_pixel_prior();
    let channel = switch_channel(&SwitchSpec {
        n_max: 255,
        p: 0.5,
        w: 0,
    })
    .unwrap();
    let exact_mi = verify_residual_identity(&prior, &channel)
        .unwrap()
        .mi_pred_residual;
    let joint = Joint2::from_channel(&prior, &channel).unwrap();
    let recovered = mi_from_pred_residual_pairs(
        sample_joint(&joint, 1_000_000, 5)
            .into_iter()
            .map(|(x, xp)| (xp as u8, (x - xp) as i16)),
    )
    .unwrap();
    let recovery_err = (recovered.mi - exact_mi).abs();

    let ok = identical.mi == 0.0
        && constant.mi == 0.0
        && shifted_edge.mi > 0.0
        && recovery_err < 0.05;
    println!(
        "acceptance 6 (empirical mutual information): {} — identical pair MI {:.3e} \
         (need exactly 0), constant prediction MI {:.3e} (need 0), shifted-edge MI {:.6} \
         (need > 0), sampled switch joint recovery error {:.6} (need < 0.05)",
        if ok { "PASS" } else { "FAIL" },
        identical.mi,
        constant.mi,
        shifted_edge.mi,
        recovery_err,
    );
    assert!(ok);
}

#[test]
fn acceptance_7_linearity_trend() {
    let grid = probability_grid(101).unwrap();
    let mut deviations = Vec::new();
    let mut n16_elapsed = 0.0;
    for k in [8u32, 10, 12, 14, 16] {
        let n = (1u32 << k) - 1;
        let start = Instant::now();
        let dev = linearity_deviation(n, &grid).unwrap();
        if k == 16 {
            n16_elapsed = start.elapsed().as_secs_f64();
        }
        deviations.push((n, dev));
    }
    let decreasing = deviations.windows(2).all(|w| w[1].1 < w[0].1);
    let ok = decreasing && n16_elapsed < 10.0;
    println!(
        "acceptance 7 (closed-form curve approaches a line as N grows): {} — deviations {} \
         (must strictly decrease); N=65535 case took {:.3}s (need < 10s)",
        if ok { "PASS" } else { "FAIL" },
        deviations
            .iter()
            .map(|(n, d)| format!("N={n}: {d:.9}"))
            .collect::<Vec<_>>()
            .join(", "),
        n16_elapsed,
    );
    assert!(ok);
}

#[test]
fn acceptance_8_cli_determinism() {
    use std::process::Command;

    let dir = tempfile::tempdir().unwrap();
    let orig_path = dir.path().join("orig.pgm");
    let pred_path = dir.path().join("pred.pgm");
    let mut orig = b"P5\n32 32\n255\n".to_vec();
    let mut pred = orig.clone();
    for k in 0..1024usize {
        orig.push((k % 256) as u8);
        pred.push((k % 256) as u8 ^ 1);
    }
    std::fs::write(&orig_path, orig).unwrap();
    std::fs::write(&pred_path, pred).unwrap();
    let orig_str = orig_path.to_str().unwrap();
    let pred_str = pred_path.to_str().unwrap();

    let commands: Vec<Vec<&str>> = vec![
        vec!["sweep-p", "--step", "0.25", "--output", "-"],
        vec![
            "sweep-sigma", "--p", "0,0.4", "--sigma-max", "4", "--step", "1", "--output", "-",
        ],
        vec!["verify", "--trials", "30", "--seed", "9"],
        vec!["mc", "--samples", "50000", "--seed", "3"],
        vec!["empirical-mi", orig_str, pred_str],
    ];

    let mut all_ok = true;
    for args in &commands {
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_condcode"))
                .args(args)
                .env_remove("CONDCODE_OUTPUT_DIR")
                .output()
                .expect("binary runs")
        };
        let first = run();
        let second = run();
        let ok = first.status.success()
            && second.status.success()
            && first.stdout == second.stdout
            && !first.stdout.is_empty();
        if !ok {
            all_ok = false;
            eprintln!(
                "non-deterministic or failing command {:?}: status {:?}/{:?}, \
                 stdout {} vs {} bytes",
                args,
                first.status,
                second.status,
                first.stdout.len(),
                second.stdout.len()
            );
        }
    }

    // File destinations must be byte-identical across runs too.
    let csv_path = dir.path().join("out.csv");
    let csv_str = csv_path.to_str().unwrap();
    let run_to_file = || {
        let status = Command::new(env!("CARGO_BIN_EXE_condcode"))
            .args(["sweep-p", "--step", "0.5", "--output", csv_str])
            .output()
            .expect("binary runs");
        assert!(status.status.success());
        std::fs::read(&csv_path).unwrap()
    };
    let bytes_a = run_to_file();
    let bytes_b = run_to_file();
    let files_ok = bytes_a == bytes_b && !bytes_a.is_empty();
    all_ok &= files_ok;

    println!(
        "acceptance 8 (repeated CLI runs are byte-identical): {} — {} stdout commands \
         checked, file output identical: {}",
        if all_ok { "PASS" } else { "FAIL" },
        commands.len(),
        files_ok,
    );
    assert!(all_ok);
}
