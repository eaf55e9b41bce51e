//! The four subcommands: path synthesis, solution overlays, the
//! convergence study, and the verification suite.
//!
//! Everything here is deterministic given the resolved [`RunConfig`]:
//! seeds come from the config, panel seeds are derived by fixed offsets,
//! and files are written atomically (temp + rename) so a re-run either
//! reproduces a file byte-for-byte or replaces it whole.

use crate::config::RunConfig;
use crate::svg::Plot;
use crate::AppError;
use fsde::fbm::Hurst;
use fsde::frac::{young_integral_fractional, young_integral_riemann, YoungPair};
use fsde::grid::{PathLabel, SamplePath, TimeGrid};
use fsde::skew::{gap_constant, SkewParams, TransformFamily};
use fsde::solver::{
    convergence_study, solve_exact, solve_mollified, transform_identity_residual,
};
use fsde::stats::log_log_slope;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Figure-grid rows: the Brownian-limit row plus the two rough rows.
/// Panel seeds are `config.seed + index` in row-major order.
const PANEL_GRID: [(f64, [f64; 3]); 3] = [
    (0.5, [0.01, 0.5, 0.99]),
    (0.75, [0.1, 0.5, 0.99]),
    (0.95, [0.1, 0.5, 0.99]),
];

fn write_atomic(path: &Path, content: &[u8]) -> Result<(), AppError> {
    let io = |e: std::io::Error| AppError::Io(format!("cannot write '{}': {e}", path.display()));
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| AppError::Io(format!("cannot create '{}': {e}", parent.display())))?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, content).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

fn path_points(p: &SamplePath<f64>) -> Vec<(f64, f64)> {
    (0..p.grid().node_count()).map(|i| (p.grid().t(i), p.value(i))).collect()
}

fn driver(cfg: &RunConfig, hurst: f64, seed: u64) -> Result<SamplePath<f64>, AppError> {
    let h = Hurst::new(hurst)?;
    let grid = TimeGrid::new(cfg.horizon, cfg.steps)?;
    Ok(cfg.generator.to_generator().generate(h, grid, seed)?)
}

fn limit_suffix(hurst: f64) -> &'static str {
    if Hurst::new(hurst).map(|h| h.is_brownian_limit()).unwrap_or(false) {
        " (Brownian limit)"
    } else {
        ""
    }
}

pub fn cmd_fbm(cfg: &RunConfig) -> Result<(), AppError> {
    let b = driver(cfg, cfg.hurst, cfg.seed)?;
    let mut csv = Vec::new();
    b.write_csv(&mut csv).map_err(|e| AppError::Io(e.to_string()))?;
    let csv_path = cfg.out.join(format!("fbm_H{:.2}.csv", cfg.hurst));
    write_atomic(&csv_path, &csv)?;

    let title = format!(
        "fractional Brownian path, H = {:.2}{}",
        cfg.hurst,
        limit_suffix(cfg.hurst)
    );
    let mut plot = Plot::new(&title, "t", "B");
    plot.auto_color(
        &format!("{}, seed {}", cfg.generator.name(), cfg.seed),
        path_points(&b),
    );
    let svg_path = cfg.out.join(format!("fbm_H{:.2}.svg", cfg.hurst));
    write_atomic(&svg_path, plot.render().as_bytes())?;

    println!("wrote {}", csv_path.display());
    println!("wrote {}", svg_path.display());
    Ok(())
}

/// One (H, α) panel: driver + exact solution + one mollified solution per
/// configured index, as CSV columns and an SVG overlay.  The linearizing
/// identity is asserted on the exact solution before anything is written.
fn simulate_panel(cfg: &RunConfig, hurst: f64, alpha: f64, seed: u64) -> Result<(), AppError> {
    let b = driver(cfg, hurst, seed)?;
    let params = SkewParams::new(alpha, 0.0)?;
    let exact = solve_exact(&params, cfg.x0, &b)?;
    let resid = transform_identity_residual(&exact, &b)?;
    if resid > 1e-12 {
        return Err(AppError::Check(format!(
            "transform identity residual {resid:.3e} exceeds 1e-12 at H = {hurst}, alpha = {alpha}"
        )));
    }
    let mut mollified = Vec::with_capacity(cfg.n_list.len());
    for &n in &cfg.n_list {
        let p = SkewParams::new(alpha, 0.0)?.with_mollification(n)?;
        mollified.push((n, solve_mollified(&p, cfg.x0, &b)?));
    }

    let mut csv = String::from("t,B,x_exact");
    for (n, _) in &mollified {
        let _ = write!(csv, ",x_mollified_n{n}");
    }
    csv.push('\n');
    for i in 0..b.grid().node_count() {
        let _ = write!(csv, "{},{},{}", b.grid().t(i), b.value(i), exact.path().value(i));
        for (_, m) in &mollified {
            let _ = write!(csv, ",{}", m.path().value(i));
        }
        csv.push('\n');
    }
    let stem = format!("sim_H{hurst:.2}_a{alpha:.2}");
    let csv_path = cfg.out.join(format!("{stem}.csv"));
    write_atomic(&csv_path, csv.as_bytes())?;

    let title = format!(
        "skew SDE solution, H = {hurst:.2}, alpha = {alpha:.2}{}",
        limit_suffix(hurst)
    );
    let mut plot = Plot::new(&title, "t", "x");
    plot.reference("driver B", path_points(&b));
    plot.auto_color("exact", path_points(exact.path()));
    for (n, m) in &mollified {
        plot.auto_color(&format!("n = {n}"), path_points(m.path()));
    }
    let svg_path = cfg.out.join(format!("{stem}.svg"));
    write_atomic(&svg_path, plot.render().as_bytes())?;

    println!("wrote {}", csv_path.display());
    println!("wrote {}", svg_path.display());
    Ok(())
}

pub fn cmd_simulate(cfg: &RunConfig, grid_mode: bool) -> Result<(), AppError> {
    if !grid_mode {
        return simulate_panel(cfg, cfg.hurst, cfg.alpha, cfg.seed);
    }
    let mut idx = 0u64;
    for (hurst, alphas) in PANEL_GRID {
        for alpha in alphas {
            simulate_panel(cfg, hurst, alpha, cfg.seed + idx)?;
            idx += 1;
        }
    }
    // companion table of the transforms themselves at the coarsest index
    if let Some(&n) = cfg.n_list.iter().min() {
        let params = SkewParams::new(cfg.alpha, 0.0)?.with_mollification(n)?;
        let family = TransformFamily::new(params)?;
        let mut csv = Vec::new();
        family
            .write_transform_table(-1.0, 1.0, 401, &mut csv)
            .map_err(|e| AppError::Io(e.to_string()))?;
        let table_path = cfg.out.join(format!("transforms_n{n}.csv"));
        write_atomic(&table_path, &csv)?;
        println!("wrote {}", table_path.display());
    }
    Ok(())
}

pub fn cmd_converge(cfg: &RunConfig) -> Result<(), AppError> {
    if cfg.n_list.len() < 4 {
        return Err(AppError::Usage(format!(
            "the convergence study needs at least 4 mollification indices, got {}",
            cfg.n_list.len()
        )));
    }
    let b = driver(cfg, cfg.hurst, cfg.seed)?;
    let params = SkewParams::new(cfg.alpha, 0.0)?;
    let report = convergence_study(&params, cfg.x0, &b, &cfg.n_list)?;

    let mut csv = Vec::new();
    report.write_csv(&mut csv).map_err(|e| AppError::Io(e.to_string()))?;
    let csv_path = cfg.out.join("convergence.csv");
    write_atomic(&csv_path, &csv)?;

    let pts: Vec<(f64, f64)> =
        report.entries.iter().map(|&(n, e)| (f64::from(n), e)).collect();
    let mut plot = Plot::new(
        &format!("mollified-scheme error, H = {:.2}, alpha = {:.2}", cfg.hurst, cfg.alpha),
        "n",
        "sup error",
    );
    plot.log_log = true;
    match report.slope {
        Some(s) => {
            // 1/n guide anchored at the first measured point
            let (n0, e0) = pts[0];
            plot.reference(
                "slope -1 guide",
                pts.iter().map(|&(n, _)| (n, e0 * n0 / n)).collect(),
            );
            plot.auto_color("sup error", pts);
            plot.annotation = Some(format!("fitted slope {s:.3}"));
            println!("fitted slope: {s:.3}");
        }
        None => {
            plot.auto_color("sup error", pts);
            plot.annotation = Some("degenerate: zero error".into());
            println!("degenerate: zero error");
        }
    }
    let svg_path = cfg.out.join("convergence.svg");
    write_atomic(&svg_path, plot.render().as_bytes())?;

    println!("wrote {}", csv_path.display());
    println!("wrote {}", svg_path.display());
    Ok(())
}

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check_round_trip(cfg: &RunConfig) -> Result<Outcome, AppError> {
    let mut alphas = vec![0.1, 0.25, 0.4, 0.5, 0.6, 0.99];
    if !alphas.iter().any(|a| (a - cfg.alpha).abs() < 1e-15) {
        alphas.push(cfg.alpha);
    }
    let probes = 2000usize;
    let mut worst = 0.0f64;
    for &alpha in &alphas {
        for base in [0.0, 1.0] {
            let plain = SkewParams::new(alpha, base)?;
            for n in [1u32, 10, 100] {
                let family =
                    TransformFamily::new(SkewParams::new(alpha, base)?.with_mollification(n)?)?;
                let (x_lo, x_hi) = (base - 1.0, base + 1.0);
                for k in 0..probes {
                    let x = x_lo + (x_hi - x_lo) * k as f64 / (probes - 1) as f64;
                    worst = worst.max((plain.lambda_inv(plain.lambda(x)) - x).abs());
                    worst = worst.max((family.lambda_n_inv(family.lambda_n(x)) - x).abs());
                    // same probe count in y-space, spanning the image of the window
                    let y = plain.lambda(x_lo)
                        + (plain.lambda(x_hi) - plain.lambda(x_lo)) * k as f64
                            / (probes - 1) as f64;
                    worst = worst.max((plain.lambda(plain.lambda_inv(y)) - y).abs());
                    let yn = family.lambda_n(x_lo)
                        + (family.lambda_n(x_hi) - family.lambda_n(x_lo)) * k as f64
                            / (probes - 1) as f64;
                    worst = worst.max((family.lambda_n(family.lambda_n_inv(yn)) - yn).abs());
                }
            }
        }
    }
    Ok(if worst <= 1e-12 {
        Outcome::Pass(format!("max round-trip residual {worst:.2e}"))
    } else {
        Outcome::Fail(format!("max round-trip residual {worst:.2e} > 1e-12"))
    })
}

/// Brute-force inverse-gap levels for n = 2..2^10; used by both the decay
/// and the constant checks.
fn gap_levels(cfg: &RunConfig) -> Result<Vec<(f64, f64, f64)>, AppError> {
    let mut rows = Vec::new();
    for k in 1..=10u32 {
        let n = 2u32.pow(k);
        let family =
            TransformFamily::new(SkewParams::new(cfg.alpha, 0.0)?.with_mollification(n)?)?;
        let (fwd, inv) = family.sup_gap(50_000)?;
        rows.push((f64::from(n), fwd, inv));
    }
    Ok(rows)
}

fn check_gap_decay(rows: &[(f64, f64, f64)]) -> Outcome {
    if rows.iter().all(|&(_, _, inv)| inv == 0.0) {
        return Outcome::Skip("gap is identically zero at alpha = 0.5".into());
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|&(n, _, inv)| (n, inv)).collect();
    match log_log_slope(&pts) {
        Some(s) if (s + 1.0).abs() <= 0.05 => Outcome::Pass(format!("slope {s:.4}")),
        Some(s) => Outcome::Fail(format!("slope {s:.4} outside -1 +/- 0.05")),
        None => Outcome::Fail("slope fit degenerate with nonzero gaps".into()),
    }
}

fn check_gap_constant(cfg: &RunConfig, rows: &[(f64, f64, f64)]) -> Result<Outcome, AppError> {
    let c = gap_constant(cfg.alpha)?;
    let mut ratio = 0.0f64;
    for &(n, fwd, inv) in rows {
        ratio = ratio.max(n * fwd / c).max(n * inv / c);
    }
    Ok(if ratio <= 1.05 {
        Outcome::Pass(format!("max n*gap / C = {ratio:.4}"))
    } else {
        Outcome::Fail(format!("n*gap exceeds C(alpha) by {ratio:.4}x"))
    })
}

fn check_identity(cfg: &RunConfig, b: &SamplePath<f64>) -> Result<Outcome, AppError> {
    let exact = solve_exact(&SkewParams::new(cfg.alpha, 0.0)?, cfg.x0, b)?;
    let resid = transform_identity_residual(&exact, b)?;
    Ok(if resid <= 1e-12 {
        Outcome::Pass(format!("max node residual {resid:.2e}"))
    } else {
        Outcome::Fail(format!("max node residual {resid:.2e} > 1e-12"))
    })
}

fn check_domination(cfg: &RunConfig, b: &SamplePath<f64>) -> Result<Outcome, AppError> {
    let exact = solve_exact(&SkewParams::new(cfg.alpha, 0.0)?, cfg.x0, b)?;
    let mut detail = String::new();
    for &n in &cfg.n_list {
        let p = SkewParams::new(cfg.alpha, 0.0)?.with_mollification(n)?;
        let moll = solve_mollified(&p, cfg.x0, b)?;
        let mut sup = 0.0f64;
        for i in 0..b.grid().node_count() {
            sup = sup.max((moll.path().value(i) - exact.path().value(i)).abs());
        }
        let level = TransformFamily::new(p)?.sup_gap(200_000)?.1;
        if sup > level * (1.0 + 1e-9) {
            return Ok(Outcome::Fail(format!(
                "n = {n}: sup error {sup:.3e} exceeds gap level {level:.3e}"
            )));
        }
        detail = format!("n = {n}: sup error {sup:.3e} <= gap {level:.3e}");
    }
    Ok(Outcome::Pass(detail))
}

fn check_holder_bound(cfg: &RunConfig, b: &SamplePath<f64>) -> Result<Outcome, AppError> {
    if cfg.gamma >= cfg.hurst {
        return Ok(Outcome::Skip(format!(
            "needs gamma < hurst for a genuine Holder exponent (gamma = {}, hurst = {})",
            cfg.gamma, cfg.hurst
        )));
    }
    if cfg.alpha_tilde + cfg.gamma <= 1.0 {
        return Ok(Outcome::Skip(format!(
            "needs alpha-tilde + gamma > 1 (got {})",
            cfg.alpha_tilde + cfg.gamma
        )));
    }
    let report = fsde::frac::verify_frac_bound(b, cfg.alpha_tilde, cfg.gamma, 200, cfg.seed)?;
    Ok(if report.max_ratio <= 1.01 {
        Outcome::Pass(format!("max observed/bound ratio {:.4}", report.max_ratio))
    } else {
        Outcome::Fail(format!(
            "ratio {:.4} at pair {:?} exceeds 1.01",
            report.max_ratio, report.worst_pair
        ))
    })
}

fn check_young(cfg: &RunConfig) -> Result<Outcome, AppError> {
    // fixed-resolution cross-validation, independent of cfg.steps
    let steps = 1 << 12;
    let grid = TimeGrid::<f64>::new(1.0, steps)?;
    let fv: Vec<f64> = (0..=steps).map(|i| {
        let t = grid.t(i);
        (2.0 * t).sin() + 0.3 * t * t
    }).collect();
    let gv: Vec<f64> = (0..=steps).map(|i| {
        let t = grid.t(i);
        (1.7 * t).cos() - 0.2 * t
    }).collect();
    let f = SamplePath::new(grid, fv, PathLabel::Generic)?;
    let g = SamplePath::new(grid, gv, PathLabel::Generic)?;
    let pair = YoungPair::new(f, g, 0.5)?;
    let frac = young_integral_fractional(&pair, 0, steps)?;
    let riem = young_integral_riemann(&pair, 0, steps)?;
    let smooth_rel = (frac - riem).abs() / riem.abs();
    if smooth_rel > 1e-3 {
        return Ok(Outcome::Fail(format!(
            "smooth pair: fractional vs Riemann rel err {smooth_rel:.2e} > 1e-3"
        )));
    }

    // self-integral of a rough path against the exact chain rule; scan for
    // a seed whose endpoint is large enough for the relative target
    let h = Hurst::new(0.75)?;
    let mut seed = cfg.seed;
    let b = loop {
        let b = fsde::fbm::generate_circulant(h, TimeGrid::<f64>::new(1.0, steps)?, seed)?;
        if b.value(steps).abs() >= 1.0 {
            break b;
        }
        seed += 1;
    };
    let end = b.value(steps);
    let pair = YoungPair::new(b.clone(), b, 0.4)?;
    let frac = young_integral_fractional(&pair, 0, steps)?;
    let exact = 0.5 * end * end;
    let chain_rel = (frac - exact).abs() / exact.abs();
    Ok(if chain_rel <= 1e-3 {
        Outcome::Pass(format!(
            "rel err {smooth_rel:.1e} (smooth), {chain_rel:.1e} (chain rule, seed {seed})"
        ))
    } else {
        Outcome::Fail(format!("chain-rule rel err {chain_rel:.2e} > 1e-3 (seed {seed})"))
    })
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<(), AppError> {
    let b = driver(cfg, cfg.hurst, cfg.seed)?;
    let rows = gap_levels(cfg)?;
    let checks: Vec<(&str, Outcome)> = vec![
        ("transform round-trip", check_round_trip(cfg)?),
        ("inverse-gap decay rate", check_gap_decay(&rows)),
        ("gap constant bound", check_gap_constant(cfg, &rows)?),
        ("transform identity residual", check_identity(cfg, &b)?),
        ("scheme domination", check_domination(cfg, &b)?),
        ("holder derivative bound", check_holder_bound(cfg, &b)?),
        ("young integral cross-check", check_young(cfg)?),
    ];

    let mut failed = 0;
    for (name, outcome) in &checks {
        let (status, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("{name:<28} {status:<5} {detail}");
    }
    if failed > 0 {
        return Err(AppError::Check(format!("{failed} verification check(s) failed")));
    }
    Ok(())
}
