//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion, with
//! indented detail lines before it, and exits non-zero if any criterion fails.

use eventoptics::detector::DetectorState;
use eventoptics::fit::{find_extrema, moving_average, prominent_maxima, quarter_samples, Extremum};
use eventoptics::harness::{analyze, presets, run, run_replica, ExperimentConfig};
use eventoptics::quadrature::SimpsonOptions;
use eventoptics::rng::{detector_stream_id, rng_stream};
use eventoptics::stats::{estimate_dispersion, homogeneity};
use eventoptics::wave::{
    double_slit_maxima, gaussian_divergence_weight, gaussian_twin_intensity, virtual_pair_intensity,
    BiprismGeometry, Kernel, VirtualPair, WaveOracle,
};
use eventoptics::{CountsProfile, Result, Vec2, Window};
use std::process::ExitCode;
use std::time::Instant;

const LAMBDA: f64 = presets::WAVELENGTH;

/// Minimum column total for contingency tests.
const MIN_COLUMN: u64 = 50;

struct Outcome {
    pass: bool,
    summary: String,
}

fn detail(msg: impl AsRef<str>) {
    println!("    {}", msg.as_ref());
}

fn with_events(mut c: ExperimentConfig, events: u64, seed: u64) -> ExperimentConfig {
    c.total_events = events;
    c.seed = seed;
    c
}

fn conserved(p: &CountsProfile) -> bool {
    p.off_screen + p.absorbed + p.total_received() == p.total_events
}

fn double_slit() -> Result<Outcome> {
    let config = with_events(ExperimentConfig::double_slit(), 2_000_000, 11);
    let profile = run(&config)?;
    let analysis = analyze(&config, &profile)?;
    let rmse = analysis.report.normalized_rmse;

    let xs = profile.coordinates();
    let width = xs[1] - xs[0];
    let fired: Vec<f64> = profile.fired().iter().map(|&n| n as f64).collect();
    let q = quarter_samples(LAMBDA / presets::DOUBLE_SLIT_SEPARATION, width);
    let smooth = moving_average(&fired, 3);
    let mut sim: Vec<f64> = find_extrema(&xs, &smooth, Extremum::Maximum, q)
        .into_iter()
        .map(|m| m.0)
        .collect();
    sim.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    sim.truncate(5);
    sim.sort_by(f64::total_cmp);
    let theory = double_slit_maxima(presets::DOUBLE_SLIT_WIDTH, presets::DOUBLE_SLIT_SEPARATION, LAMBDA, 5);
    let offsets: Vec<f64> = sim.iter().zip(&theory).map(|(s, t)| (s - t).abs()).collect();
    let worst = offsets.iter().cloned().fold(0.0, f64::max);
    let maxima_ok = sim.len() == 5 && worst <= width;
    detail(format!(
        "events={} off_screen={} rmse={rmse:.4} scale={:.2}",
        profile.total_events, profile.off_screen, analysis.report.scale
    ));
    detail(format!(
        "central maxima sim={:?} theory={:?} worst offset={:.4} rad (detector width {:.4})",
        sim.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(),
        theory.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(),
        worst,
        width
    ));
    Ok(Outcome {
        pass: rmse <= 0.08 && maxima_ok && conserved(&profile),
        summary: format!(
            "double slit: rmse {rmse:.4} <= 0.08, five central maxima within one detector width (worst {:.2} widths)",
            worst / width
        ),
    })
}

fn two_beam() -> Result<Outcome> {
    let config = with_events(ExperimentConfig::two_beam(), 2_000_000, 12);
    let profile = run_replica(&config, 0)?;
    let analysis = analyze(&config, &profile)?;
    let rmse = analysis.report.normalized_rmse;

    // Dispersion of detector counts from independent replicas of the same run.
    let replicas: Vec<Vec<u64>> = (1..=8)
        .map(|r| run_replica(&config, r).map(|p| p.fired()))
        .collect::<Result<_>>()?;
    let phi = estimate_dispersion(&replicas, MIN_COLUMN)?;

    let n = profile.fired();
    let half = n.len() / 2;
    let left: Vec<u64> = n[..half].to_vec();
    let right: Vec<u64> = n[n.len() - half..].iter().rev().cloned().collect();
    let mirror = homogeneity(&left, &right, phi, MIN_COLUMN)?;
    let naive = homogeneity(&left, &right, 1.0, MIN_COLUMN)?;
    detail(format!(
        "events={} off_screen={} rmse={rmse:.4} scale={:.2}",
        profile.total_events, profile.off_screen, analysis.report.scale
    ));
    detail(format!(
        "mirror halves: dispersion φ={phi:.3} from 8 replicas, χ²/φ={:.1} on {} dof, p={:.3} (unscaled p={:.2e})",
        mirror.statistic, mirror.dof, mirror.p_value, naive.p_value
    ));
    Ok(Outcome {
        pass: rmse <= 0.08 && mirror.p_value >= 0.01 && conserved(&profile),
        summary: format!(
            "two beams: rmse {rmse:.4} <= 0.08, mirror symmetry p = {:.3} >= 0.01",
            mirror.p_value
        ),
    })
}

fn biprism() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, offset) in presets::BIPRISM_SCREEN_OFFSETS.into_iter().enumerate() {
        let config = with_events(ExperimentConfig::biprism(offset), 10_000_000, 20 + i as u64);
        let start = Instant::now();
        let profile = run(&config)?;
        let analysis = analyze(&config, &profile)?;
        let WaveOracle::Biprism(geometry) = config.wave_oracle()? else {
            unreachable!("biprism config yields the biprism oracle");
        };
        let predicted = geometry.predicted_period();
        let report = analysis.report;
        let sim_period = report.fringe_period_sim.unwrap_or(f64::NAN);
        let period_err = (sim_period - predicted).abs() / predicted;

        let xs = profile.coordinates();
        let step = xs[1] - xs[0];
        let q = quarter_samples(predicted, step);
        let fired: Vec<f64> = profile.fired().iter().map(|&n| n as f64).collect();
        let smooth = moving_average(&fired, q | 1);
        let overlap = geometry.biprism.exit_deflection() * offset;
        let range = ((overlap / predicted - 0.5).round() + 0.5) * predicted;
        let sim_fringes = prominent_maxima(&xs, &smooth, q, 0.15, range).len();
        let oracle_fringes = prominent_maxima(&xs, &analysis.theory.intensities, q, 0.15, range).len();
        let count_ok = sim_fringes.abs_diff(oracle_fringes) <= 1;

        // Diagnostic only: counts against the oracle divided by the messenger flux.
        let per_messenger: Vec<f64> = profile
            .rows
            .iter()
            .zip(&analysis.theory.intensities)
            .map(|(r, i)| if r.received > 0 { i / r.received as f64 } else { 0.0 })
            .collect();
        let (_, flux_rmse) = eventoptics::fit::fit_scale(&fired, &per_messenger)?;

        let ok = period_err <= 0.05
            && report.normalized_rmse <= 0.10
            && count_ok
            && conserved(&profile);
        pass &= ok;
        detail(format!(
            "X-X'={:.0}mm: period sim={:.2}um oracle={} predicted={:.2}um (err {:.1}%), rmse={:.4}, fringes sim={} oracle={} within ±{:.1}um, off_screen={} absorbed={} [{:.1}s] {}",
            offset * 1e3,
            sim_period * 1e6,
            report
                .fringe_period_theory
                .map_or("none".into(), |p| format!("{:.2}um", p * 1e6)),
            predicted * 1e6,
            100.0 * period_err,
            report.normalized_rmse,
            sim_fringes,
            oracle_fringes,
            range * 1e6,
            profile.off_screen,
            profile.absorbed,
            start.elapsed().as_secs_f64(),
            if ok { "ok" } else { "FAIL" }
        ));
        detail(format!(
            "X-X'={:.0}mm: diagnostic rmse of counts vs oracle/flux = {flux_rmse:.4}",
            offset * 1e3
        ));
        parts.push(format!(
            "{:.0}mm: period {:+.1}%, rmse {:.3}, fringes {}/{}",
            offset * 1e3,
            100.0 * (sim_period - predicted) / predicted,
            report.normalized_rmse,
            sim_fringes,
            oracle_fringes
        ));
    }
    Ok(Outcome {
        pass,
        summary: format!(
            "biprism (period within 5%, rmse <= 0.10, fringe count ±1): {}",
            parts.join("; ")
        ),
    })
}

fn detector_analytics() -> Result<Outcome> {
    let window = Window { lo: 0.0, hi: 1.0 };

    // Geometric convergence at γ = 0.5.
    let e = Vec2::from_angle(1.0);
    let p0 = Vec2::new(-0.3, 0.4);
    let mut d = DetectorState::new(0.5, window)?.with_memory(p0)?;
    let mut worst = 0.0f64;
    for i in 1..=50 {
        d.update(e)?;
        let want = 0.5f64.powi(i) * (p0 - e).norm();
        worst = worst.max(((d.p() - e).norm() - want).abs());
    }
    let converge_ok = worst <= 1e-12;

    // Alternating opposite phases at γ = 0.999.
    let mut d = DetectorState::new(0.999, window)?;
    let mut thresholds = rng_stream(41, detector_stream_id(0, 0));
    let transient = 20_000;
    let n = 100_000;
    let mut alternating_fires = 0;
    for k in 0..transient + n {
        let e = if k % 2 == 0 { Vec2::new(1.0, 0.0) } else { Vec2::new(-1.0, 0.0) };
        d.update(e)?;
        let fired = d.fire(thresholds.next_f64())?;
        if k >= transient && fired {
            alternating_fires += 1;
        }
    }
    let alternating_ok = alternating_fires <= 2;

    // Constant phase at γ = 0.999.
    let mut d = DetectorState::new(0.999, window)?;
    let e = Vec2::from_angle(0.4);
    let mut constant_fires = 0u64;
    let mut mean_prob = 0.0;
    for k in 0..transient + n {
        d.update(e)?;
        let prob = d.p().norm_sq().min(1.0);
        let fired = d.fire(thresholds.next_f64())?;
        if k >= transient {
            mean_prob += prob / n as f64;
            constant_fires += fired as u64;
        }
    }
    let freq = constant_fires as f64 / n as f64;
    let sigma = (mean_prob * (1.0 - mean_prob) / n as f64).sqrt();
    let constant_ok = (1.0 - freq) <= 3.0 * sigma;

    detail(format!("geometric convergence: worst deviation {worst:.2e} over 50 steps at γ=0.5"));
    detail(format!("alternating phases: {alternating_fires} clicks in {n} messages after {transient} transient"));
    detail(format!(
        "constant phase: frequency {freq:.7}, mean ‖p‖² {mean_prob:.9}, 3σ = {:.2e}",
        3.0 * sigma
    ));
    Ok(Outcome {
        pass: converge_ok && alternating_ok && constant_ok,
        summary: format!(
            "detector analytics: convergence error {worst:.1e} <= 1e-12, alternating clicks {alternating_fires} <= 2, constant frequency {freq:.6} within 3σ of 1"
        ),
    })
}

fn oracle_cross_check() -> Result<Outcome> {
    // d, σ ≪ X with the envelope well inside the paraxial regime.
    let (d, sigma, x) = (8.0 * LAMBDA, 4.0 * LAMBDA, 1e-3);
    let pair = VirtualPair {
        separation: d,
        sigma,
        distance: x,
        wavelength: LAMBDA,
        kernel: Kernel::Exact,
        quadrature: SimpsonOptions::default(),
    };
    let b = gaussian_divergence_weight(sigma, x, LAMBDA);
    let envelope = sigma / (2.0 * b).sqrt();
    let ys: Vec<f64> = (-400..=400).map(|k| k as f64 / 200.0 * envelope).collect();
    let numeric: Vec<f64> = ys
        .iter()
        .map(|&y| virtual_pair_intensity(y, &pair))
        .collect::<Result<_>>()?;
    let closed: Vec<f64> = ys
        .iter()
        .map(|&y| gaussian_twin_intensity(y, d, sigma, x, LAMBDA))
        .collect();
    let peak = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
    let (pn, pc) = (peak(&numeric), peak(&closed));
    let worst = numeric
        .iter()
        .zip(&closed)
        .map(|(n, c)| (n / pn - c / pc).abs())
        .fold(0.0, f64::max);

    // The biprism oracle must also honour its own symmetry and geometry.
    let config = ExperimentConfig::biprism(presets::BIPRISM_SCREEN_OFFSETS[2]);
    let WaveOracle::Biprism(geometry) = config.wave_oracle()? else {
        unreachable!("biprism config yields the biprism oracle");
    };
    let g = BiprismGeometry { ..geometry };
    let asym = [20e-6, 110e-6, 260e-6]
        .iter()
        .map(|&y| {
            let a = eventoptics::wave::biprism_intensity(y, &g)?;
            let b = eventoptics::wave::biprism_intensity(-y, &g)?;
            Ok((a - b).abs() / a.max(b))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    detail(format!(
        "two virtual sources d=8λ σ=4λ X=1mm, exact distance kernel vs closed form: worst peak-relative deviation {:.3e} over |y| <= 2σ_I ({:.1}um)",
        worst,
        2.0 * envelope * 1e6
    ));
    detail(format!("biprism oracle mirror asymmetry: {asym:.1e}"));
    Ok(Outcome {
        pass: worst <= 0.01 && asym <= 1e-4,
        summary: format!("oracle cross-check: numerical vs closed form within {:.3}% <= 1%", 100.0 * worst),
    })
}

fn determinism_and_conservation() -> Result<Outcome> {
    let config = with_events(ExperimentConfig::double_slit(), 1_000_000, 31);
    let a = analyze(&config, &run(&config)?)?.profile.to_csv();
    let b = analyze(&config, &run(&config)?)?.profile.to_csv();
    let identical = a == b;

    let mut replicated = with_events(ExperimentConfig::double_slit(), 2_500_000, 32);
    replicated.replicas = 4;
    let parts: Vec<CountsProfile> = (0..4).map(|r| run_replica(&replicated, r)).collect::<Result<_>>()?;
    let merged = eventoptics::replica_merge(&parts)?;
    let long = run(&with_events(ExperimentConfig::double_slit(), 10_000_000, 33))?;
    let phi = estimate_dispersion(&parts.iter().map(|p| p.fired()).collect::<Vec<_>>(), MIN_COLUMN)?;
    let h = homogeneity(&merged.fired(), &long.fired(), phi, MIN_COLUMN)?;

    let mut all_conserved = conserved(&merged) && conserved(&long) && parts.iter().all(conserved);
    for c in [
        with_events(ExperimentConfig::two_beam(), 300_000, 34),
        with_events(ExperimentConfig::biprism(7e-3), 300_000, 35),
    ] {
        let p = run(&c)?;
        all_conserved &= conserved(&p);
        detail(format!(
            "conservation {}: received {} + off_screen {} + absorbed {} = {}",
            eventoptics::config::ExperimentKind::of(&c).name(),
            p.total_received(),
            p.off_screen,
            p.absorbed,
            p.total_events
        ));
    }
    detail(format!("identical config and seed: CSV byte-identical = {identical} ({} bytes)", a.len()));
    detail(format!(
        "4 merged replicas of 2.5e6 vs one run of 1e7: φ={phi:.3}, χ²/φ={:.1} on {} dof, p={:.3}",
        h.statistic, h.dof, h.p_value
    ));
    Ok(Outcome {
        pass: identical && all_conserved && h.p_value >= 0.01,
        summary: format!(
            "determinism and conservation: byte-identical CSV, ledger balanced, replica homogeneity p = {:.3} >= 0.01",
            h.p_value
        ),
    })
}

fn main() -> ExitCode {
    type Criterion = fn() -> Result<Outcome>;
    let criteria: [(&str, Criterion); 6] = [
        ("1", double_slit),
        ("2", two_beam),
        ("3", biprism),
        ("4", detector_analytics),
        ("5", oracle_cross_check),
        ("6", determinism_and_conservation),
    ];
    let mut failures = 0;
    for (id, criterion) in criteria {
        let start = Instant::now();
        let (pass, summary) = match criterion() {
            Ok(o) => (o.pass, o.summary),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "[{}] criterion {id}: {summary} ({:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 6 criteria passed", 6 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
