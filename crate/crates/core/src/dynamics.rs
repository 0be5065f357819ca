//! Driven time evolution under `H(t) = H0 + F(t) H1`.
//!
//! Two routes are provided and kept independent of each other:
//!
//! * [`evolve_exact`]: fixed-step classic RK4 on the state vector.
//! * [`delta_rho_linear`]: first-order state change
//!   `delta_rho(t) = -i int_{t0}^{t} [H1_I(tau - t), rho0] F(tau) dtau`
//!   by trapezoidal quadrature, with interaction-picture operators built from
//!   one cached eigendecomposition of `H0`.

use std::f64::consts::PI;

use log::warn;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tensor::{
    c, commutator, hermitian_eig, CMatrix, CVector, DensityMatrix, Eigen, Operator, PureState,
    QuantumState, C64,
};

/// `dt * |H|` above which a step-size warning is logged.
pub const STEP_WARN: f64 = 0.1;
/// `dt * |H|` above which integration is refused.
pub const STEP_LIMIT: f64 = 1.0;
/// Relative tolerance for the stationarity precondition `[rho0, H0] = 0`.
pub const STATIONARITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum DriveForm {
    /// `cos(2 pi t / T) exp(-t^2 / 2)`.
    GaussianCosine { period: f64 },
    /// Piecewise-linear interpolation of `(t, F)` samples, zero outside.
    Tabulated { times: Vec<f64>, values: Vec<f64> },
}

/// Drive `F(t) = alpha * f(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DriveSignal {
    pub alpha: f64,
    pub form: DriveForm,
}

impl DriveSignal {
    pub fn gaussian_cosine(alpha: f64, period: f64) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::Precondition(format!(
                "drive period must be positive, got {period}"
            )));
        }
        Ok(Self {
            alpha,
            form: DriveForm::GaussianCosine { period },
        })
    }

    pub fn tabulated(alpha: f64, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() || times.is_empty() {
            return Err(Error::Precondition(
                "tabulated drive needs equally many times and values".into(),
            ));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Precondition(
                "tabulated drive times must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            alpha,
            form: DriveForm::Tabulated { times, values },
        })
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self {
            alpha,
            form: self.form.clone(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.alpha * self.shape(t)
    }

    fn shape(&self, t: f64) -> f64 {
        match &self.form {
            DriveForm::GaussianCosine { period } => {
                (2.0 * PI * t / period).cos() * (-t * t / 2.0).exp()
            }
            DriveForm::Tabulated { times, values } => {
                if t < times[0] || t > times[times.len() - 1] {
                    return 0.0;
                }
                let i = times.partition_point(|&x| x <= t);
                if i == 0 {
                    return values[0];
                }
                if i >= times.len() {
                    return values[times.len() - 1];
                }
                let (t0, t1) = (times[i - 1], times[i]);
                let w = (t - t0) / (t1 - t0);
                values[i - 1] * (1.0 - w) + values[i] * w
            }
        }
    }

    /// `F` sampled on every grid point.
    pub fn sample(&self, grid: &TimeGrid) -> Vec<f64> {
        grid.times().map(|t| self.eval(t)).collect()
    }
}

/// Uniform grid `t_n = t0 + n dt`, n = 0..=steps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub t_max: f64,
    pub dt: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, t_max: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Grid(format!("dt must be positive, got {dt}")));
        }
        if !(t_max > t0) {
            return Err(Error::Grid(format!("t_max {t_max} must exceed t0 {t0}")));
        }
        let ratio = (t_max - t0) / dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::Grid(format!(
                "(t_max - t0)/dt = {ratio} is not an integer"
            )));
        }
        Ok(Self {
            t0,
            t_max,
            dt,
            steps: steps as usize,
        })
    }

    /// Grid covering `[t0, t_max]` with the largest step not exceeding `max_dt`.
    pub fn with_max_step(t0: f64, t_max: f64, max_dt: f64) -> Result<Self> {
        if !(max_dt > 0.0) {
            return Err(Error::Grid(format!("max step must be positive, got {max_dt}")));
        }
        let steps = ((t_max - t0) / max_dt).ceil().max(1.0) as usize;
        Self::from_steps(t0, t_max, steps)
    }

    pub fn from_steps(t0: f64, t_max: f64, steps: usize) -> Result<Self> {
        if steps == 0 || !(t_max > t0) {
            return Err(Error::Grid("grid needs at least one step".into()));
        }
        Ok(Self {
            t0,
            t_max,
            dt: (t_max - t0) / steps as f64,
            steps,
        })
    }

    /// Lag grid `0, dt, ..., (len-1) dt` used for response kernels.
    pub fn lags(dt: f64, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::Grid("lag grid needs at least two samples".into()));
        }
        Self::from_steps(0.0, dt * (len - 1) as f64, len - 1).map(|mut g| {
            g.dt = dt;
            g
        })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Number of samples, `steps + 1`.
    pub fn len(&self) -> usize {
        self.steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn time(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |n| self.time(n))
    }

    /// Index of the grid point at `t`.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let x = (t - self.t0) / self.dt;
        let n = x.round();
        if n < 0.0 || n as usize > self.steps || (x - n).abs() > 1e-9 {
            return Err(Error::Grid(format!("time {t} is not a grid point")));
        }
        Ok(n as usize)
    }

    pub fn same_spacing(&self, other: &TimeGrid) -> bool {
        (self.dt - other.dt).abs() <= 1e-12 * self.dt.max(other.dt)
    }
}

/// States sampled on every point of a grid.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub states: Vec<QuantumState>,
    /// Largest `|norm - 1|` (pure) or `|tr - 1|` (mixed) seen during the run.
    pub norm_drift: f64,
    /// `dt * |H|` bound used for the step-size contract.
    pub step_product: f64,
}

impl Trajectory {
    pub fn check_norm(&self, tol: f64) -> Result<()> {
        if self.norm_drift > tol {
            return Err(Error::Numerical(format!(
                "norm drift {:.3e} exceeds {tol:.1e}",
                self.norm_drift
            )));
        }
        Ok(())
    }
}

fn check_pair(h0: &Operator, h1: &Operator) -> Result<()> {
    if h0.dim() != h1.dim() {
        return Err(Error::DimensionMismatch {
            expected: h0.dim(),
            found: h1.dim(),
        });
    }
    for h in [h0, h1] {
        if !h.is_hermitian() {
            return Err(Error::NotHermitian {
                defect: h.hermiticity_defect(),
            });
        }
    }
    Ok(())
}

/// Cached eigendecomposition of `H0` for interaction-picture operators and
/// free propagation.
#[derive(Clone, Debug)]
pub struct FreeEvolution {
    eig: Eigen,
}

impl FreeEvolution {
    pub fn new(h0: &Operator) -> Result<Self> {
        Ok(Self {
            eig: hermitian_eig(h0)?,
        })
    }

    pub fn eigen(&self) -> &Eigen {
        &self.eig
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    /// `exp(-i H0 t) |psi>`.
    pub fn propagate(&self, psi: &PureState, t: f64) -> PureState {
        let v = self.eig.vectors.matrix();
        let mut coeffs = v.adjoint() * psi.amplitudes();
        for (k, e) in self.eig.values.iter().enumerate() {
            coeffs[k] *= C64::from_polar(1.0, -e * t);
        }
        PureState::unchecked(v * coeffs)
    }

    /// Prepares `H1` for repeated interaction-picture evaluation.
    pub fn interaction(&self, h1: &Operator) -> Result<InteractionPicture<'_>> {
        if h1.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: h1.dim(),
            });
        }
        Ok(InteractionPicture {
            free: self,
            h1_eigen: h1.to_basis(&self.eig.vectors).into_matrix(),
            hermitian: h1.is_hermitian(),
        })
    }
}

/// `H1` held in the eigenbasis of `H0`.
#[derive(Clone, Debug)]
pub struct InteractionPicture<'a> {
    free: &'a FreeEvolution,
    h1_eigen: CMatrix,
    hermitian: bool,
}

impl InteractionPicture<'_> {
    /// `exp(i H0 t) H1 exp(-i H0 t)` in the eigenbasis of `H0`.
    pub fn at_eigenbasis(&self, t: f64) -> CMatrix {
        let e = &self.free.eig.values;
        let n = e.len();
        CMatrix::from_fn(n, n, |m, k| {
            self.h1_eigen[(m, k)] * C64::from_polar(1.0, (e[m] - e[k]) * t)
        })
    }

    /// `exp(i H0 t) H1 exp(-i H0 t)`.
    pub fn at(&self, t: f64) -> Operator {
        let v = self.free.eig.vectors.matrix();
        Operator::from_parts(v * self.at_eigenbasis(t) * v.adjoint(), self.hermitian)
    }
}

/// `H1_I(t) = exp(i H0 t) H1 exp(-i H0 t)`, t measured from `t0`.
pub fn interaction_picture_op(h1: &Operator, h0: &Operator, t: f64) -> Result<Operator> {
    check_pair(h0, h1)?;
    let free = FreeEvolution::new(h0)?;
    let ip = free.interaction(h1)?;
    Ok(ip.at(t))
}

/// Splits off the scalar part `tr(H0)/d`, which only contributes a global
/// phase and is applied analytically.
fn traceless_part(h0: &Operator) -> (f64, Operator) {
    let shift = h0.trace().re / h0.dim() as f64;
    let reduced = h0
        .try_sub(&Operator::identity(h0.dim()).scale(shift))
        .expect("same dimension");
    (shift, reduced)
}

fn step_product(h0_reduced: &Operator, h1: &Operator, drive: &DriveSignal, grid: &TimeGrid) -> f64 {
    let f_max = grid
        .times()
        .chain(std::iter::once(grid.t_max))
        .fold(0.0_f64, |a, t| a.max(drive.eval(t).abs()));
    grid.dt * (h0_reduced.spectral_norm() + f_max * h1.spectral_norm())
}

fn check_step(product: f64) -> Result<()> {
    if product > STEP_LIMIT {
        return Err(Error::StepSize {
            product,
            limit: STEP_LIMIT,
        });
    }
    if product > STEP_WARN {
        warn!("dt * |H| = {product:.3} exceeds {STEP_WARN}; RK4 accuracy may suffer");
    }
    Ok(())
}

fn rk4_run(
    h0: &CMatrix,
    h1: &CMatrix,
    drive: &DriveSignal,
    psi0: &CVector,
    grid: &TimeGrid,
    shift: f64,
) -> (Vec<CVector>, f64) {
    let minus_i = C64::new(0.0, -1.0);
    let deriv = |t: f64, psi: &CVector| -> CVector {
        let f = drive.eval(t);
        let mut out = h0 * psi;
        if f != 0.0 {
            out += (h1 * psi) * c(f);
        }
        out * minus_i
    };
    let dt = grid.dt;
    let mut psi = psi0.clone();
    let mut out = Vec::with_capacity(grid.len());
    let mut drift = 0.0_f64;
    out.push(psi.clone());
    for n in 0..grid.steps() {
        let t = grid.time(n);
        let k1 = deriv(t, &psi);
        let k2 = deriv(t + 0.5 * dt, &(&psi + &k1 * c(0.5 * dt)));
        let k3 = deriv(t + 0.5 * dt, &(&psi + &k2 * c(0.5 * dt)));
        let k4 = deriv(t + dt, &(&psi + &k3 * c(dt)));
        psi += (k1 + k2 * c(2.0) + k3 * c(2.0) + k4) * c(dt / 6.0);
        drift = drift.max((psi.norm() - 1.0).abs());
        let elapsed = (n + 1) as f64 * dt;
        out.push(&psi * C64::from_polar(1.0, -shift * elapsed));
    }
    (out, drift)
}

/// Integrates `i d|psi>/dt = (H0 + F(t) H1)|psi>` with classic RK4.
///
/// The scalar part of `H0` is factored out as an exact phase. Norm drift is
/// measured and reported on the trajectory, never corrected.
pub fn evolve_exact(
    h0: &Operator,
    h1: &Operator,
    drive: &DriveSignal,
    psi0: &PureState,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    check_pair(h0, h1)?;
    if psi0.dim() != h0.dim() {
        return Err(Error::DimensionMismatch {
            expected: h0.dim(),
            found: psi0.dim(),
        });
    }
    let (shift, reduced) = traceless_part(h0);
    let product = step_product(&reduced, h1, drive, grid);
    check_step(product)?;
    let (states, drift) = rk4_run(
        reduced.matrix(),
        h1.matrix(),
        drive,
        psi0.amplitudes(),
        grid,
        shift,
    );
    Ok(Trajectory {
        grid: *grid,
        states: states
            .into_iter()
            .map(|v| QuantumState::Pure(PureState::unchecked(v)))
            .collect(),
        norm_drift: drift,
        step_product: product,
    })
}

/// Mixed initial state: each eigencomponent of `rho0` is evolved as a vector
/// and the density matrix is rebuilt from outer products.
pub fn evolve_exact_mixed(
    h0: &Operator,
    h1: &Operator,
    drive: &DriveSignal,
    rho0: &DensityMatrix,
    grid: &TimeGrid,
) -> Result<Trajectory> {
    check_pair(h0, h1)?;
    if rho0.dim() != h0.dim() {
        return Err(Error::DimensionMismatch {
            expected: h0.dim(),
            found: rho0.dim(),
        });
    }
    let (shift, reduced) = traceless_part(h0);
    let product = step_product(&reduced, h1, drive, grid);
    check_step(product)?;
    let eig = hermitian_eig(rho0.operator())?;
    let components: Vec<(f64, CVector)> = eig
        .values
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 1e-15)
        .map(|(k, &w)| (w, eig.vector(k)))
        .collect();
    let runs: Vec<(f64, Vec<CVector>, f64)> = components
        .par_iter()
        .map(|(w, v)| {
            let (states, drift) = rk4_run(reduced.matrix(), h1.matrix(), drive, v, grid, shift);
            (*w, states, drift)
        })
        .collect();
    let n = h0.dim();
    let mut drift = 0.0_f64;
    let mut states = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let mut rho = CMatrix::zeros(n, n);
        for (w, traj, _) in &runs {
            let v = &traj[i];
            rho += v * v.adjoint() * c(*w);
        }
        drift = drift.max((rho.trace().re - 1.0).abs());
        states.push(QuantumState::Mixed(DensityMatrix::from_operator_unchecked(
            Operator::from_parts(rho, true),
        )));
    }
    Ok(Trajectory {
        grid: *grid,
        states,
        norm_drift: drift,
        step_product: product,
    })
}

/// `|[rho0, H0]|_F <= tol * max(|H0|_F, 1)`.
pub fn check_stationary(rho0: &DensityMatrix, h0: &Operator) -> Result<()> {
    let residual = commutator(rho0.operator(), h0)?.frobenius_norm();
    if residual > STATIONARITY_TOL * h0.frobenius_norm().max(1.0) {
        return Err(Error::NonStationary { residual });
    }
    Ok(())
}

/// Trapezoid weights on `n + 1` equally spaced points.
pub(crate) fn trapezoid_weight(j: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else if j == 0 || j == n {
        0.5
    } else {
        1.0
    }
}

/// First-order state change `delta_rho(t)` at grid time `t`.
///
/// Quadrature is the trapezoid rule on the grid points in `[t0, t]`. The
/// result is Hermitian and traceless.
pub fn delta_rho_linear(
    rho0: &DensityMatrix,
    h0: &Operator,
    h1: &Operator,
    drive: &DriveSignal,
    t: f64,
    grid: &TimeGrid,
) -> Result<Operator> {
    check_pair(h0, h1)?;
    check_stationary(rho0, h0)?;
    let free = FreeEvolution::new(h0)?;
    let ip = free.interaction(h1)?;
    delta_rho_linear_with(&ip, rho0, drive, t, grid)
}

/// [`delta_rho_linear`] with a prepared interaction picture; the caller is
/// responsible for the stationarity precondition.
pub fn delta_rho_linear_with(
    ip: &InteractionPicture<'_>,
    rho0: &DensityMatrix,
    drive: &DriveSignal,
    t: f64,
    grid: &TimeGrid,
) -> Result<Operator> {
    let n = grid.index_of(t)?;
    let vecs = &ip.free.eig.vectors;
    let rho_e = rho0.operator().to_basis(vecs).into_matrix();
    let dim = rho_e.nrows();
    let mut acc = CMatrix::zeros(dim, dim);
    for j in 0..=n {
        let w = trapezoid_weight(j, n);
        let f = drive.eval(grid.time(j));
        if w == 0.0 || f == 0.0 {
            continue;
        }
        let h = ip.at_eigenbasis(grid.time(j) - t);
        let comm = &h * &rho_e - &rho_e * &h;
        acc += comm * c(w * f);
    }
    let acc = acc * C64::new(0.0, -grid.dt);
    let out = Operator::from_parts(acc, true).from_basis(vecs);
    Ok(out)
}

/// `delta_rho(t_n)` on every grid point in one pass.
///
/// Because `rho0` commutes with `H0`, the integrand factorizes as
/// `exp(-i H0 t) [H1_I(tau), rho0] exp(i H0 t)`, so the time integral is a
/// running trapezoid sum rotated to each output time.
pub fn delta_rho_linear_series(
    rho0: &DensityMatrix,
    h0: &Operator,
    h1: &Operator,
    drive: &DriveSignal,
    grid: &TimeGrid,
) -> Result<Vec<Operator>> {
    check_pair(h0, h1)?;
    check_stationary(rho0, h0)?;
    let free = FreeEvolution::new(h0)?;
    let ip = free.interaction(h1)?;
    let vecs = &free.eig.vectors;
    let e = &free.eig.values;
    let rho_e = rho0.operator().to_basis(vecs).into_matrix();
    let dim = rho_e.nrows();
    let integrand = |n: usize| -> CMatrix {
        let t = grid.time(n);
        let f = drive.eval(t);
        if f == 0.0 {
            return CMatrix::zeros(dim, dim);
        }
        let h = ip.at_eigenbasis(t);
        (&h * &rho_e - &rho_e * &h) * c(f)
    };
    let half = C64::new(0.0, -0.5 * grid.dt);
    let mut acc = CMatrix::zeros(dim, dim);
    let mut prev = integrand(0);
    let mut out = Vec::with_capacity(grid.len());
    out.push(Operator::zeros(dim));
    for n in 1..grid.len() {
        let next = integrand(n);
        acc += (&prev + &next) * half;
        prev = next;
        let t = grid.time(n);
        let rotated = CMatrix::from_fn(dim, dim, |m, k| {
            acc[(m, k)] * C64::from_polar(1.0, -(e[m] - e[k]) * t)
        });
        out.push(Operator::from_parts(rotated, true).from_basis(vecs));
    }
    Ok(out)
}
