//! Scenario orchestration: config in, artifact directory out.

use std::path::{Path, PathBuf};
use std::sync::Mutex;

use log::{info, warn};

use super::config::{Scenario, ScenarioConfig};
use super::experiments::{
    alpha_scan_with, canonical_suite, reproduce, theorem1_suite, two_site_chain, DriveRun,
    ReproductionParams, AUTO_STEP_PRODUCT,
};
use super::output::{ArtifactDir, CsvTable, Summary};
use super::plot::LinePlot;
use crate::dynamics::{TimeGrid, STEP_WARN};
use crate::error::{Error, Result};
use crate::response::{log_log_slope, ResponseSeries, Theorem1Report};

const TIME_UNITS: &str = "units: hbar = 1; time in inverse energy units; entropies in nats";

/// What a run produced.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: Summary,
}

/// Run the configured scenario, writing into `out` (or the configured
/// output directory).
pub fn run_scenario(cfg: &ScenarioConfig, out: Option<&Path>) -> Result<RunReport> {
    let root = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.out_path());
    let dir = ArtifactDir::new(&root, cfg.hash())?;
    let mut files = vec![dir.text("effective_config.toml", &cfg.effective_file())?];
    info!("scenario {} -> {}", cfg.scenario, root.display());
    let summary = match cfg.scenario {
        Scenario::XxReproduce => xx_reproduce(cfg, &dir, &mut files)?,
        Scenario::AlphaScan => scan(cfg, &dir, &mut files)?,
        Scenario::Theorem1 => theorem1(cfg, &dir, &mut files)?,
        Scenario::CanonicalFdt => canonical(cfg, &dir, &mut files)?,
    };
    let p = dir.path("summary.json");
    summary.write(&p)?;
    files.push(p);
    Ok(RunReport {
        out_dir: root,
        files,
        summary,
    })
}

fn params(cfg: &ScenarioConfig, alpha: f64) -> ReproductionParams {
    ReproductionParams {
        sites: cfg.sites,
        lambda: cfg.lambda,
        coupling: cfg.coupling,
        boundary: cfg.boundary,
        site: cfg.site,
        k: cfg.k,
        alpha,
        period: cfg.period,
        t0: cfg.t0,
        t_max: cfg.t_max,
        dt: cfg.dt,
        pad: cfg.pad,
    }
}

/// Grid for the small two-qubit scenarios: the configured step, or one
/// meeting [`AUTO_STEP_PRODUCT`] for the given bound on `|H|`.
fn small_grid(cfg: &ScenarioConfig, norm_bound: f64) -> Result<TimeGrid> {
    match cfg.dt {
        Some(dt) => TimeGrid::new(cfg.t0, cfg.t_max, dt),
        None => TimeGrid::with_max_step(cfg.t0, cfg.t_max, AUTO_STEP_PRODUCT / norm_bound.max(1e-12)),
    }
}

fn svg(dir: &ArtifactDir, files: &mut Vec<PathBuf>, name: &str, plot: &LinePlot) -> Result<()> {
    files.push(dir.text(name, &plot.render(&dir.hash))?);
    Ok(())
}

fn times(grid: &TimeGrid) -> Vec<f64> {
    grid.times().collect()
}

fn run_table(run: &DriveRun) -> CsvTable {
    CsvTable::new(&["t", "drive", "ds_exact", "ds_linear", "d_expectation"])
        .comment(TIME_UNITS)
        .comment(format!(
            "alpha = {:e}; norm drift {:.3e}; step product {:.3e}",
            run.alpha, run.norm_drift, run.step_product
        ))
        .set("t", times(&run.grid))
        .set("drive", run.drive.clone())
        .set("ds_exact", run.delta_s_exact.values.clone())
        .set("ds_linear", run.delta_s_linear.values.clone())
        .set("d_expectation", run.delta_expectation.values.clone())
}

fn kernel_table(r_e: &ResponseSeries) -> CsvTable {
    CsvTable::new(&["lag", "r_e"])
        .comment("entropy response kernel; zero for negative lags")
        .set("lag", times(&r_e.grid))
        .set("r_e", r_e.values.clone())
}

fn warn_step(product: f64) {
    if product > STEP_WARN {
        warn!("step product {product:.3e} exceeds {STEP_WARN}; consider a smaller dt");
    }
}

fn xx_reproduce(cfg: &ScenarioConfig, dir: &ArtifactDir, files: &mut Vec<PathBuf>) -> Result<Summary> {
    let rep = reproduce(&params(cfg, cfg.alpha()))?;
    warn_step(rep.run.step_product);
    let ts = run_table(&rep.run);
    files.push(dir.csv("timeseries.csv", &ts)?);
    let kt = kernel_table(&rep.kernel);
    files.push(dir.csv("kernel.csv", &kt)?);

    let s = &rep.spectra;
    for other in [&s.drive, &s.exact, &s.linear] {
        if other.omegas != rep.chi.omegas {
            return Err(Error::Numerical("spectra were computed on different frequency grids".into()));
        }
    }
    let omegas = rep.chi.omegas.clone();
    let spec = CsvTable::new(&[
        "omega",
        "two_omega_over_j",
        "re_chi",
        "im_chi",
        "abs_drive",
        "abs_ds_exact",
        "abs_ds_linear",
    ])
    .comment("X(w) = dt sum_n x_n exp(i w t_n); omega in angular units")
    .set("two_omega_over_j", omegas.iter().map(|w| 2.0 * w / cfg.coupling).collect())
    .set("omega", omegas)
    .set("re_chi", rep.chi.re())
    .set("im_chi", rep.chi.im())
    .set("abs_drive", s.drive.abs())
    .set("abs_ds_exact", s.exact.abs())
    .set("abs_ds_linear", s.linear.abs());
    files.push(dir.csv("spectrum.csv", &spec)?);

    svg(dir, files, "timeseries.svg", &LinePlot::from_table("entropy change", &ts, "t", &["ds_exact", "ds_linear", "d_expectation"]))?;
    svg(dir, files, "drive.svg", &LinePlot::from_table("drive", &ts, "t", &["drive"]))?;
    svg(dir, files, "kernel.svg", &LinePlot::from_table("entropy response kernel", &kt, "lag", &["r_e"]))?;
    let w = 3.0 * rep.drive_peak.max(rep.chi_peak).max(1.0);
    svg(dir, files, "susceptibility.svg", &LinePlot::from_table("entropy susceptibility", &spec, "omega", &["re_chi", "im_chi"]).x_range(-w, w))?;
    svg(dir, files, "spectrum.svg", &LinePlot::from_table("|dS(w)|", &spec, "omega", &["abs_ds_exact", "abs_ds_linear"]).x_range(-w, w))?;

    let mut sum = Summary::new(&dir.hash, &cfg.scenario.to_string());
    sum.num("alpha", rep.run.alpha);
    sum.put("sites", cfg.sites);
    sum.num("coupling", cfg.coupling);
    sum.num("dt", rep.run.grid.dt);
    sum.put("samples", rep.run.grid.len());
    sum.num("norm_drift", rep.run.norm_drift);
    sum.num("step_product", rep.run.step_product);
    sum.num("drive_peak_omega", rep.drive_peak);
    sum.num("chi_peak_omega", rep.chi_peak);
    sum.num("drive_peak_two_omega_over_j", 2.0 * rep.drive_peak / cfg.coupling);
    sum.num("chi_peak_two_omega_over_j", 2.0 * rep.chi_peak / cfg.coupling);
    sum.num("spectral_deviation", rep.spectral_deviation);
    sum.num("off_peak_fraction", rep.off_peak_fraction);
    sum.num("kk_residual", rep.kk_residual);
    sum.num("product_identity_residual", rep.product_residual);
    sum.num("kernel_tail_ratio", rep.kernel_tail_ratio);
    sum.num("max_linear_residual", rep.run.max_linear_residual());
    sum.num("max_expectation_residual", rep.run.max_expectation_residual());
    sum.num("max_abs_ds_exact", rep.run.delta_s_exact.max_abs());
    Ok(sum)
}

fn scan(cfg: &ScenarioConfig, dir: &ArtifactDir, files: &mut Vec<PathBuf>) -> Result<Summary> {
    let written = Mutex::new(Vec::new());
    let index = |a: f64| cfg.alphas.iter().position(|x| *x == a).unwrap_or(0);
    let result = alpha_scan_with(&params(cfg, cfg.alpha()), &cfg.alphas, |run| {
        let name = format!("timeseries_{:02}.csv", index(run.alpha));
        let p = dir.csv(&name, &run_table(run))?;
        written.lock().expect("poisoned").push(p);
        Ok(())
    })?;
    let mut per_alpha = written.into_inner().expect("poisoned");
    per_alpha.sort();
    files.extend(per_alpha);
    for run in &result.runs {
        warn_step(run.step_product);
    }
    let kt = kernel_table(&result.kernel);
    files.push(dir.csv("kernel.csv", &kt)?);

    let mut t = CsvTable::new(&["alpha", "linear_residual", "expectation_residual", "expectation_ratio"])
        .comment("residuals are max over t; ratio is expectation_residual / alpha^2");
    for (i, a) in result.alphas.iter().enumerate() {
        let e = result.expectation_residuals[i];
        t.push_row(&[*a, result.linear_residuals[i], e, e / (a * a)]);
    }
    files.push(dir.csv("scan.csv", &t)?);
    let log_a: Vec<f64> = result.alphas.iter().map(|a| a.log10()).collect();
    svg(
        dir,
        files,
        "scan.svg",
        &LinePlot::new("residual against amplitude", "log10 alpha", "residual")
            .log_y()
            .line("exact - linear", &log_a, &result.linear_residuals)
            .line("exact - expectation", &log_a, &result.expectation_residuals),
    )?;

    let mut sum = Summary::new(&dir.hash, &cfg.scenario.to_string());
    sum.put("amplitudes", result.alphas.len());
    sum.num("dt", result.runs[0].grid.dt);
    sum.num("max_norm_drift", result.runs.iter().map(|r| r.norm_drift).fold(0.0, f64::max));
    sum.opt("linear_exponent", result.linear_exponent);
    sum.opt("expectation_exponent", result.expectation_exponent);
    sum.num("expectation_ratio_spread", result.expectation_ratio_spread);
    Ok(sum)
}

/// Slope of `y / ln(1/alpha)` against alpha; the product branch follows
/// `alpha^2 ln(1/alpha)` rather than a pure power.
fn log_corrected_exponent(r: &Theorem1Report) -> Option<f64> {
    if r.alphas.iter().any(|a| *a >= 1.0) || r.max_abs_delta_s_exact.iter().all(|y| *y <= 0.0) {
        return None;
    }
    let ys: Vec<f64> = r
        .alphas
        .iter()
        .zip(&r.max_abs_delta_s_exact)
        .map(|(a, y)| y / (1.0 / a).ln())
        .collect();
    log_log_slope(&r.alphas, &ys).ok()
}

fn theorem1_fields(sum: &mut Summary, prefix: &str, r: &Theorem1Report) {
    sum.put(&format!("{prefix}_zero_linear_response"), r.zero_linear_response());
    sum.put(&format!("{prefix}_ln_rho_a_diagonal"), r.ln_rho_a_diagonal);
    sum.num(&format!("{prefix}_ln_rho_a_defect"), r.ln_rho_a_defect);
    sum.put(&format!("{prefix}_floored_rank_deficit"), r.floored_rank_deficit);
    sum.num(&format!("{prefix}_hollow_max_diagonal"), r.delta_rho_a_hollow_maxdiag);
    sum.num(&format!("{prefix}_max_abs_ds_linear"), r.max_abs_delta_s_linear);
    sum.opt(&format!("{prefix}_alpha_scaling_exponent"), r.alpha_scaling_exponent);
    sum.put(&format!("{prefix}_exponent_within_0_15"), r.exponent_consistent(0.15));
    sum.opt(&format!("{prefix}_log_corrected_exponent"), log_corrected_exponent(r));
}

fn theorem1(cfg: &ScenarioConfig, dir: &ArtifactDir, files: &mut Vec<PathBuf>) -> Result<Summary> {
    let h_bound = (cfg.omega_a.abs() + cfg.omega_b.abs()).max(2.0 * cfg.omega_a.abs());
    let grid = small_grid(cfg, h_bound + cfg.alpha())?;
    let suite = theorem1_suite(cfg.omega_a, cfg.omega_b, &cfg.alphas, cfg.period, &grid)?;
    let mut t = CsvTable::new(&["alpha", "product_max_abs_ds_exact", "entangled_max_abs_ds_exact"])
        .comment("max over t of |dS_exact| for each branch");
    for (i, a) in cfg.alphas.iter().enumerate() {
        t.push_row(&[*a, suite.product.max_abs_delta_s_exact[i], suite.entangled.max_abs_delta_s_exact[i]]);
    }
    files.push(dir.csv("theorem1.csv", &t)?);
    let log_a: Vec<f64> = cfg.alphas.iter().map(|a| a.log10()).collect();
    svg(
        dir,
        files,
        "theorem1.svg",
        &LinePlot::new("exact entropy response", "log10 alpha", "max |dS|")
            .log_y()
            .line("product", &log_a, t.column("product_max_abs_ds_exact"))
            .line("entangled", &log_a, t.column("entangled_max_abs_ds_exact")),
    )?;
    let mut sum = Summary::new(&dir.hash, &cfg.scenario.to_string());
    sum.num("dt", grid.dt);
    sum.num("omega_a", cfg.omega_a);
    sum.num("omega_b", cfg.omega_b);
    theorem1_fields(&mut sum, "product", &suite.product);
    theorem1_fields(&mut sum, "entangled", &suite.entangled);
    Ok(sum)
}

fn canonical(cfg: &ScenarioConfig, dir: &ArtifactDir, files: &mut Vec<PathBuf>) -> Result<Summary> {
    let (h0, _) = two_site_chain(cfg.lambda, cfg.coupling);
    let grid = small_grid(cfg, h0.spectral_norm() + 0.5 * cfg.alpha().abs())?;
    let suite = canonical_suite(cfg.lambda, cfg.coupling, cfg.beta, cfg.alpha(), cfg.period, &grid, cfg.seed)?;
    let heat = &suite.heat;
    let ht = CsvTable::new(&["t", "drive", "ds_linear", "dq"])
        .comment(TIME_UNITS)
        .comment("dq = -(1/beta) ds_linear")
        .set("t", times(&grid))
        .set("drive", suite.drive.clone())
        .set("ds_linear", heat.delta_s_linear.values.clone())
        .set("dq", heat.delta_q.values.clone());
    files.push(dir.csv("heat.csv", &ht)?);
    let kt = CsvTable::new(&["lag", "r_e_over_beta", "r_subsystem_energy"])
        .set("lag", times(&heat.entropy_kernel.grid))
        .set("r_e_over_beta", heat.entropy_kernel.values.iter().map(|v| v / cfg.beta).collect())
        .set("r_subsystem_energy", heat.energy_kernel.values.clone());
    files.push(dir.csv("kernels.csv", &kt)?);
    let ft = CsvTable::new(&["omega", "correlation", "dissipative"])
        .comment("random 4-level model; lines binned to the nearest grid frequency")
        .set("omega", suite.fdt_omegas.clone())
        .set("correlation", suite.fdt_random.correlation.clone())
        .set("dissipative", suite.fdt_random.dissipative.clone());
    files.push(dir.csv("fdt.csv", &ft)?);
    svg(dir, files, "heat.svg", &LinePlot::from_table("subsystem heat", &ht, "t", &["ds_linear", "dq"]))?;
    svg(dir, files, "kernels.svg", &LinePlot::from_table("kernels", &kt, "lag", &["r_e_over_beta", "r_subsystem_energy"]))?;

    let mut sum = Summary::new(&dir.hash, &cfg.scenario.to_string());
    sum.num("beta", cfg.beta);
    sum.num("dt", grid.dt);
    sum.num("kernel_residual", heat.kernel_residual);
    sum.num("kubo_cross_check", heat.kubo_cross_check);
    sum.num("fdt_two_level_max_residual", suite.fdt_two_level.max_residual);
    sum.put("fdt_two_level_bins", suite.fdt_two_level.bins_checked);
    sum.num("fdt_random_max_residual", suite.fdt_random.max_residual);
    sum.put("fdt_random_bins", suite.fdt_random.bins_checked);
    sum.put("fdt_random_excluded_zero_bins", suite.fdt_random.excluded_zero_bins);
    sum.put("fdt_lines_outside", suite.fdt_random.lines_outside + suite.fdt_two_level.lines_outside);
    Ok(sum)
}
