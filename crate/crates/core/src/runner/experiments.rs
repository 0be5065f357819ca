//! Experiment building blocks shared by the command-line scenarios, the
//! examples and the acceptance tests.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::dynamics::{evolve_exact, DriveSignal, TimeGrid};
use crate::error::{Error, Result};
use crate::models::{
    bipartite_model, gibbs_state, site_perturbation, spin_wave_state, xx_chain_single_excitation,
    Boundary, XXChainSpec,
};
use crate::response::{
    delta_expectation_sa, delta_s_exact, delta_s_linear, entropy_kernel, heat_response,
    log_log_slope, reduced_density, theorem1_check, EntropyKernel, HeatResponse, Reduction,
    ResponseSeries, SeriesKind, Theorem1Report, Theorem1State,
};
use crate::signal::{
    fdt_check, fourier, fourier_samples, kk_residual, product_identity, relative_l2,
    susceptibility_ee, tail_ratio, FdtReport, KkDirection, Spectrum, Window,
};
use crate::tensor::{c, kron, pauli, CMatrix, DensityMatrix, Operator, PureState, QuantumState, C64};

/// Norm drift above which a run violates the integration contract.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;
/// Target for `dt * (|H0 - cI| + alpha_max |H1|)` when no step is given.
pub const AUTO_STEP_PRODUCT: f64 = 0.02;

/// Driven XX chain in the single-excitation sector: spin wave `k`, drive on
/// `site`, entropy of that same site.
#[derive(Clone, Debug)]
pub struct XxModel {
    pub spec: XXChainSpec,
    pub site: usize,
    pub k: usize,
    pub h0: Operator,
    pub h1: Operator,
    pub psi0: PureState,
    pub rho0: DensityMatrix,
    pub reduction: Reduction,
}

impl XxModel {
    pub fn new(spec: XXChainSpec, site: usize, k: usize) -> Result<Self> {
        let h0 = xx_chain_single_excitation(&spec)?;
        let h1 = site_perturbation(spec.sites, site)?;
        let psi0 = spin_wave_state(spec.sites, k)?;
        let rho0 = psi0.projector();
        Ok(Self {
            spec,
            site,
            k,
            h0,
            h1,
            psi0,
            rho0,
            reduction: Reduction::SingleExcitationSite(site),
        })
    }

    /// Ring with the stated drive conventions.
    pub fn ring(sites: usize, lambda: f64, coupling: f64) -> Result<Self> {
        Self::new(XXChainSpec::new(sites, lambda, coupling, Boundary::Periodic)?, 1, 1)
    }

    /// Largest step meeting [`AUTO_STEP_PRODUCT`] for amplitudes up to `alpha_max`.
    pub fn auto_step(&self, alpha_max: f64) -> f64 {
        let shift = self.h0.trace().re / self.h0.dim() as f64;
        let reduced = &self.h0 - &Operator::identity(self.h0.dim()).scale(shift);
        AUTO_STEP_PRODUCT / (reduced.spectral_norm() + alpha_max.abs() * self.h1.spectral_norm())
    }

    pub fn grid(&self, t0: f64, t_max: f64, dt: Option<f64>, alpha_max: f64) -> Result<TimeGrid> {
        match dt {
            Some(dt) => TimeGrid::new(t0, t_max, dt),
            None => TimeGrid::with_max_step(t0, t_max, self.auto_step(alpha_max)),
        }
    }

    pub fn entropy_kernel(&self) -> Result<EntropyKernel> {
        entropy_kernel(&self.rho0, &self.reduction, &self.h1, &self.h0, None)
    }

    /// `R_E` on the lags needed for `grid`.
    pub fn kernel_series(&self, kernel: &EntropyKernel, grid: &TimeGrid) -> Result<ResponseSeries> {
        kernel.kernel.series(grid.dt, grid.len(), SeriesKind::KuboEe)
    }

    /// Exact and linear entropy changes for one drive.
    pub fn drive_run(
        &self,
        kernel: &EntropyKernel,
        r_e: &ResponseSeries,
        drive: &DriveSignal,
        grid: &TimeGrid,
    ) -> Result<DriveRun> {
        let traj = evolve_exact(&self.h0, &self.h1, drive, &self.psi0, grid)?;
        traj.check_norm(NORM_DRIFT_LIMIT)?;
        let exact = delta_s_exact(&traj, &self.reduction)?;
        let expectation = delta_expectation_sa(&traj, &self.reduction, &kernel.observable)?;
        let linear = delta_s_linear(r_e, drive, grid)?;
        Ok(DriveRun {
            alpha: drive.alpha,
            grid: *grid,
            drive: drive.sample(grid),
            delta_s_exact: exact,
            delta_s_linear: linear,
            delta_expectation: expectation,
            norm_drift: traj.norm_drift,
            step_product: traj.step_product,
        })
    }
}

/// One driven trajectory with its linear prediction.
#[derive(Clone, Debug)]
pub struct DriveRun {
    pub alpha: f64,
    pub grid: TimeGrid,
    pub drive: Vec<f64>,
    pub delta_s_exact: ResponseSeries,
    pub delta_s_linear: ResponseSeries,
    /// `delta <s_A>` along the exact trajectory.
    pub delta_expectation: ResponseSeries,
    pub norm_drift: f64,
    pub step_product: f64,
}

impl DriveRun {
    pub fn max_linear_residual(&self) -> f64 {
        self.delta_s_exact.max_abs_diff(&self.delta_s_linear)
    }

    pub fn max_expectation_residual(&self) -> f64 {
        self.delta_s_exact.max_abs_diff(&self.delta_expectation)
    }
}

/// Spectral view of one drive run.
#[derive(Clone, Debug)]
pub struct RunSpectra {
    pub drive: Spectrum,
    pub exact: Spectrum,
    pub linear: Spectrum,
}

pub fn run_spectra(run: &DriveRun, pad: usize) -> Result<RunSpectra> {
    let g = &run.grid;
    Ok(RunSpectra {
        drive: fourier_samples(&run.drive, g.dt, g.t0, pad, Window::Rectangular)?,
        exact: fourier(&run.delta_s_exact, pad)?,
        linear: fourier(&run.delta_s_linear, pad)?,
    })
}

/// Relative L2 distance between `|X_exact(w)|` and `|X_linear(w)|`.
pub fn spectral_deviation(spectra: &RunSpectra) -> f64 {
    relative_l2(&spectra.exact.abs(), &spectra.linear.abs())
}

/// Positive-frequency peak of `|X|` away from the static bin.
pub fn positive_peak(spec: &Spectrum) -> f64 {
    spec.argmax_abs_in(0.5 * spec.d_omega() + 1e-12, f64::INFINITY)
        .unwrap_or(0.0)
}

/// Fraction of `sum |X|^2` lying outside windows of half-width `half_width`
/// around `+-centers`.
pub fn off_peak_fraction(spec: &Spectrum, centers: &[f64], half_width: f64) -> f64 {
    let mut total = 0.0;
    let mut outside = 0.0;
    for (w, v) in spec.omegas.iter().zip(&spec.values) {
        let p = v.norm_sqr();
        total += p;
        if centers.iter().all(|c| (w.abs() - c.abs()).abs() > half_width) {
            outside += p;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outside / total
    }
}

/// Everything the reproduction scenario reports for one amplitude.
#[derive(Clone, Debug)]
pub struct Reproduction {
    pub model: XxModel,
    pub run: DriveRun,
    pub kernel: ResponseSeries,
    pub chi: Spectrum,
    pub spectra: RunSpectra,
    pub kk_residual: f64,
    pub product_residual: f64,
    pub kernel_tail_ratio: f64,
    pub drive_peak: f64,
    pub chi_peak: f64,
    pub spectral_deviation: f64,
    pub off_peak_fraction: f64,
}

/// Half-width of the windows around the linear peaks used for the
/// off-peak weight.
pub const PEAK_WINDOW: f64 = 1.0;

#[derive(Clone, Copy, Debug)]
pub struct ReproductionParams {
    pub sites: usize,
    pub lambda: f64,
    pub coupling: f64,
    pub boundary: Boundary,
    pub site: usize,
    pub k: usize,
    pub alpha: f64,
    pub period: f64,
    pub t0: f64,
    pub t_max: f64,
    pub dt: Option<f64>,
    pub pad: usize,
}

impl ReproductionParams {
    /// Ring of `sites` spins with `J = 2`, `T = pi/2`, `t0 = -8`, `t_max = 40`.
    pub fn ring(sites: usize, alpha: f64) -> Self {
        Self {
            sites,
            lambda: 0.0,
            coupling: 2.0,
            boundary: Boundary::Periodic,
            site: 1,
            k: 1,
            alpha,
            period: 0.5 * PI,
            t0: -8.0,
            t_max: 40.0,
            dt: None,
            pad: 2,
        }
    }

    pub fn model(&self) -> Result<XxModel> {
        XxModel::new(
            XXChainSpec::new(self.sites, self.lambda, self.coupling, self.boundary)?,
            self.site,
            self.k,
        )
    }
}

pub fn reproduce(p: &ReproductionParams) -> Result<Reproduction> {
    let model = p.model()?;
    let grid = model.grid(p.t0, p.t_max, p.dt, p.alpha)?;
    let kernel = model.entropy_kernel()?;
    let r_e = model.kernel_series(&kernel, &grid)?;
    let drive = DriveSignal::gaussian_cosine(p.alpha, p.period)?;
    let run = model.drive_run(&kernel, &r_e, &drive, &grid)?;
    let chi = susceptibility_ee(&r_e, p.pad)?;
    let kk = kk_residual(&chi, KkDirection::ReFromIm)?;
    let prod = product_identity(&r_e, &run.drive, &run.delta_s_linear)?;
    let spectra = run_spectra(&run, p.pad)?;
    let drive_peak = positive_peak(&spectra.drive);
    let chi_peak = positive_peak(&chi);
    let deviation = spectral_deviation(&spectra);
    let off_peak = off_peak_fraction(&spectra.exact, &[drive_peak, chi_peak], PEAK_WINDOW);
    Ok(Reproduction {
        kernel_tail_ratio: tail_ratio(&r_e, 0.1),
        model,
        run,
        kernel: r_e,
        chi,
        spectra,
        kk_residual: kk,
        product_residual: prod.residual,
        drive_peak,
        chi_peak,
        spectral_deviation: deviation,
        off_peak_fraction: off_peak,
    })
}

/// Amplitude sweep with a shared grid (set by the largest amplitude).
#[derive(Clone, Debug)]
pub struct AlphaScan {
    pub alphas: Vec<f64>,
    pub runs: Vec<DriveRun>,
    pub kernel: ResponseSeries,
    /// `max_t |dS_exact - dS_linear|` per amplitude.
    pub linear_residuals: Vec<f64>,
    /// `max_t |dS_exact - d<s_A>|` per amplitude.
    pub expectation_residuals: Vec<f64>,
    pub linear_exponent: Option<f64>,
    pub expectation_exponent: Option<f64>,
    /// `(max - min) / min` of `expectation_residual / alpha^2`.
    pub expectation_ratio_spread: f64,
}

pub fn alpha_scan(p: &ReproductionParams, alphas: &[f64]) -> Result<AlphaScan> {
    alpha_scan_with(p, alphas, |_| Ok(()))
}

/// [`alpha_scan`] calling `on_run` for each finished amplitude, possibly
/// concurrently.
pub fn alpha_scan_with(
    p: &ReproductionParams,
    alphas: &[f64],
    on_run: impl Fn(&DriveRun) -> Result<()> + Sync,
) -> Result<AlphaScan> {
    if alphas.is_empty() {
        return Err(Error::Precondition("amplitude list is empty".into()));
    }
    let model = p.model()?;
    let alpha_max = alphas.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let grid = model.grid(p.t0, p.t_max, p.dt, alpha_max)?;
    let kernel = model.entropy_kernel()?;
    let r_e = model.kernel_series(&kernel, &grid)?;
    let base = DriveSignal::gaussian_cosine(1.0, p.period)?;
    let runs: Vec<DriveRun> = alphas
        .par_iter()
        .map(|&a| {
            let run = model.drive_run(&kernel, &r_e, &base.with_alpha(a), &grid)?;
            on_run(&run)?;
            Ok(run)
        })
        .collect::<Result<_>>()?;
    let lin: Vec<f64> = runs.iter().map(DriveRun::max_linear_residual).collect();
    let exp: Vec<f64> = runs.iter().map(DriveRun::max_expectation_residual).collect();
    let fit = |ys: &[f64]| {
        if alphas.len() >= 2 {
            log_log_slope(alphas, ys).ok()
        } else {
            None
        }
    };
    let ratios: Vec<f64> = exp.iter().zip(alphas).map(|(e, a)| e / (a * a)).collect();
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0_f64, f64::max);
    Ok(AlphaScan {
        alphas: alphas.to_vec(),
        linear_exponent: fit(&lin),
        expectation_exponent: fit(&exp),
        expectation_ratio_spread: (hi - lo) / lo,
        runs,
        kernel: r_e,
        linear_residuals: lin,
        expectation_residuals: exp,
    })
}

/// Both branches of the zero-response check on two qubits.
#[derive(Clone, Debug)]
pub struct Theorem1Suite {
    pub product: Theorem1Report,
    pub entangled: Theorem1Report,
}

/// Product branch: `H_A = w_a sz`, `H_B = w_b sz`, ground product state.
/// Entangled branch: `H0 = w_a (sz (x) I - I (x) sz)`, which has the Bell
/// state `(|00> + |11>)/sqrt 2` as an eigenstate. The product branch is
/// driven by `sx (x) sx`; the entangled branch by `sx (x) sz`, since the Bell
/// state is an eigenvector of `sx (x) sx` and would not move at all.
pub fn theorem1_suite(
    omega_a: f64,
    omega_b: f64,
    alphas: &[f64],
    period: f64,
    grid: &TimeGrid,
) -> Result<Theorem1Suite> {
    let h1 = kron(&pauli::x(), &pauli::x());
    let drive = DriveSignal::gaussian_cosine(1.0, period)?;
    let product_model = bipartite_model(&pauli::z().scale(omega_a), &pauli::z().scale(omega_b))?;
    let product = theorem1_check(
        &product_model,
        Theorem1State::ProductEigenstate { i: 0, j: 0 },
        &h1,
        &drive,
        alphas,
        grid,
    )?;
    let bell_model = bipartite_model(&pauli::z().scale(omega_a), &pauli::z().scale(-omega_a))?;
    let h1_bell = kron(&pauli::x(), &pauli::z());
    let entangled = theorem1_check(&bell_model, Theorem1State::MaximallyEntangled, &h1_bell, &drive, alphas, grid)?;
    Ok(Theorem1Suite { product, entangled })
}

/// Two-site XX chain in its full four-dimensional space, with a field
/// `lambda` and sz on site 1 as the perturbation.
pub fn two_site_chain(lambda: f64, coupling: f64) -> (Operator, Operator) {
    let sz = Operator::from_real_diagonal(&[-1.0, 1.0]);
    let id = pauli::identity();
    let hop = (&kron(&pauli::x(), &pauli::x()) + &kron(&pauli::y(), &pauli::y())).scale(coupling / 2.0);
    let field = (&kron(&sz, &id) + &kron(&id, &sz)).scale(lambda / 2.0);
    let h0 = &hop + &field;
    let h1 = kron(&sz.scale(0.5), &id);
    (h0, h1)
}

/// Canonical heat-response and fluctuation-dissipation checks.
#[derive(Clone, Debug)]
pub struct CanonicalSuite {
    pub beta: f64,
    pub h_a: Operator,
    pub heat: HeatResponse,
    pub grid: TimeGrid,
    pub drive: Vec<f64>,
    pub fdt_two_level: FdtReport,
    pub fdt_random: FdtReport,
    pub fdt_omegas: Vec<f64>,
}

/// Site-1 Hamiltonian of a thermal reduced state: `-(1/beta) ln rho_A`.
pub fn subsystem_hamiltonian(rho0: &DensityMatrix, beta: f64) -> Result<Operator> {
    let red = Reduction::partition(2, rho0.dim() / 2)?;
    let ra = reduced_density(&QuantumState::Mixed(rho0.clone()), &red)?;
    let obs = crate::response::entropy_observable(&ra, crate::tensor::DEFAULT_SPECTRAL_FLOOR)?;
    if obs.floored_rank_deficit > 0 {
        return Err(Error::SingularSpectrum {
            floored: obs.floored_rank_deficit,
        });
    }
    Ok(obs.s_a.scale(1.0 / beta))
}

/// Random Hermitian matrix with entries uniform in the unit square.
pub fn random_hermitian(n: usize, rng: &mut impl rand::Rng) -> Operator {
    let a = CMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    Operator::hermitian((&a + a.adjoint()) * c(0.5)).expect("symmetrized")
}

/// Uniform frequency grid covering all transitions of `h0`.
pub fn fdt_grid(h0: &Operator, d_omega: f64) -> Vec<f64> {
    let span = 2.0 * h0.spectral_norm() + 1.0;
    let k = (span / d_omega).ceil() as i64;
    (-k..=k).map(|i| i as f64 * d_omega).collect()
}

#[allow(clippy::too_many_arguments)]
pub fn canonical_suite(
    lambda: f64,
    coupling: f64,
    beta: f64,
    alpha: f64,
    period: f64,
    grid: &TimeGrid,
    seed: u64,
) -> Result<CanonicalSuite> {
    use rand::SeedableRng;
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Precondition(format!(
            "canonical suite needs a finite positive beta, got {beta}"
        )));
    }
    let (h0, h1) = two_site_chain(lambda, coupling);
    let rho0 = gibbs_state(&h0, beta)?;
    let h_a = subsystem_hamiltonian(&rho0, beta)?;
    let drive = DriveSignal::gaussian_cosine(alpha, period)?;
    let part = crate::tensor::BipartitePartition::new(2, 2)?;
    let heat = heat_response(&h_a, beta, part, &h1, &h0, &rho0, &drive, grid)?;

    let d_omega = 1e-3;
    let two_h0 = pauli::z().scale(0.5 * coupling);
    let fdt_two_level = fdt_check(&pauli::x(), &pauli::x(), &two_h0, beta, &fdt_grid(&two_h0, d_omega))?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let rh0 = random_hermitian(4, &mut rng);
    let ro = random_hermitian(4, &mut rng);
    let omegas = fdt_grid(&rh0, d_omega);
    let fdt_random = fdt_check(&ro, &ro, &rh0, beta, &omegas)?;
    Ok(CanonicalSuite {
        beta,
        h_a,
        heat,
        grid: *grid,
        drive: drive.sample(grid),
        fdt_two_level,
        fdt_random,
        fdt_omegas: omegas,
    })
}
