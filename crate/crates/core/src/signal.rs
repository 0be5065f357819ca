//! Spectra of real time series and response kernels.
//!
//! Convention: `X(w) = dt * sum_n x(t_n) exp(i w t_n)`, on the angular
//! frequency grid `w_k = (k - M/2) * 2 pi / (M dt)`, `k = 0..M`, where `M` is
//! the zero-padded length. Frequencies are stored ascending.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::models::gibbs_state;
use crate::response::{causal_convolution, ResponseSeries};
use crate::tensor::{hermitian_eig, CMatrix, Operator, C64};

/// Default negative-time tolerance, relative to the peak, for causal spectra.
pub const CAUSALITY_TOL: f64 = 1e-8;
/// Bins where `|chi''|` is below this are not compared in the FDT check.
pub const FDT_SIGNAL_FLOOR: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    pub omegas: Vec<f64>,
    pub values: Vec<C64>,
    /// Sampling step of the underlying time series.
    pub dt: f64,
    /// Time of the first sample.
    pub t0: f64,
}

fn shifted_omegas(m: usize, dt: f64) -> Vec<f64> {
    let dw = 2.0 * PI / (m as f64 * dt);
    (0..m).map(|k| (k as f64 - (m / 2) as f64) * dw).collect()
}

impl Spectrum {
    /// Spectrum sampled from a closed form on `m` points spaced by `d_omega`,
    /// with the time origin at zero.
    pub fn from_fn(m: usize, d_omega: f64, f: impl Fn(f64) -> C64) -> Self {
        let dt = 2.0 * PI / (m as f64 * d_omega);
        let omegas = shifted_omegas(m, dt);
        let values = omegas.iter().map(|&w| f(w)).collect();
        Self {
            omegas,
            values,
            dt,
            t0: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn d_omega(&self) -> f64 {
        2.0 * PI / (self.len() as f64 * self.dt)
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn im(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.im).collect()
    }

    pub fn abs(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }

    /// `max_k |X(-w_k) - conj X(w_k)|`; the unpaired Nyquist bin is skipped.
    pub fn hermitian_defect(&self) -> f64 {
        let m = self.len();
        let c = m / 2;
        (1..m)
            .filter(|&k| 2 * c >= k && 2 * c - k < m)
            .map(|k| (self.values[2 * c - k] - self.values[k].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Frequency of the largest `|X|` among bins with `lo <= w <= hi`.
    pub fn argmax_abs_in(&self, lo: f64, hi: f64) -> Option<f64> {
        self.omegas
            .iter()
            .zip(&self.values)
            .filter(|(w, _)| **w >= lo && **w <= hi)
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(w, _)| *w)
    }

    fn check_same_grid(&self, other: &Spectrum) -> Result<()> {
        if self.len() != other.len() || (self.dt - other.dt).abs() > 1e-12 * self.dt {
            return Err(Error::Grid("spectra live on different frequency grids".into()));
        }
        Ok(())
    }
}

/// `sqrt(sum |a - b|^2 / sum |b|^2)`.
pub fn relative_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (num / den).sqrt()
    }
}

fn relative_l2_complex(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    if den == 0.0 {
        if num == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (num / den).sqrt()
    }
}

/// Continuum-normalized transform of complex samples zero-padded to length `m`.
pub fn fourier_complex(samples: &[C64], dt: f64, t0: f64, m: usize) -> Result<Spectrum> {
    if samples.is_empty() || m < samples.len() {
        return Err(Error::Grid(format!(
            "transform length {m} shorter than {} samples",
            samples.len()
        )));
    }
    if !(dt > 0.0) {
        return Err(Error::Grid(format!("dt must be positive, got {dt}")));
    }
    let mut buf = vec![C64::new(0.0, 0.0); m];
    buf[..samples.len()].copy_from_slice(samples);
    // the inverse direction is the unnormalized exp(+i ...) sum
    FftPlanner::new().plan_fft_inverse(m).process(&mut buf);
    let omegas = shifted_omegas(m, dt);
    let half = m / 2;
    let values = omegas
        .iter()
        .enumerate()
        .map(|(k, &w)| buf[(k + m - half) % m] * C64::from_polar(dt, w * t0))
        .collect();
    Ok(Spectrum {
        omegas,
        values,
        dt,
        t0,
    })
}

/// Rectangular-window transform of a real series padded by `pad`.
pub fn fourier(series: &ResponseSeries, pad: usize) -> Result<Spectrum> {
    fourier_windowed(series, pad, Window::Rectangular)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Window {
    Rectangular,
    /// Raised-cosine taper over the trailing `fraction` of the samples.
    CosineTaper { fraction: f64 },
}

impl Window {
    pub fn weights(&self, n: usize) -> Vec<f64> {
        match *self {
            Window::Rectangular => vec![1.0; n],
            Window::CosineTaper { fraction } => {
                let taper = ((n as f64 * fraction.clamp(0.0, 1.0)).round() as usize).min(n);
                (0..n)
                    .map(|i| {
                        let from_end = n - 1 - i;
                        if taper == 0 || from_end >= taper {
                            1.0
                        } else {
                            0.5 * (1.0 - (PI * from_end as f64 / taper as f64).cos())
                        }
                    })
                    .collect()
            }
        }
    }
}

pub fn fourier_windowed(series: &ResponseSeries, pad: usize, window: Window) -> Result<Spectrum> {
    fourier_samples(&series.values, series.grid.dt, series.grid.t0, pad, window)
}

/// Transform of real samples starting at `t0`, padded to `pad * len`.
pub fn fourier_samples(values: &[f64], dt: f64, t0: f64, pad: usize, window: Window) -> Result<Spectrum> {
    if pad == 0 {
        return Err(Error::Grid("zero-pad factor must be at least 1".into()));
    }
    let w = window.weights(values.len());
    let samples: Vec<C64> = values.iter().zip(&w).map(|(x, w)| C64::new(x * w, 0.0)).collect();
    fourier_complex(&samples, dt, t0, pad * values.len())
}

/// Samples `x(t0 + n dt)`, `n = 0..M`, whose transform is `spec`.
pub fn inverse_fourier(spec: &Spectrum) -> Vec<C64> {
    let m = spec.len();
    let half = m / 2;
    let mut buf = vec![C64::new(0.0, 0.0); m];
    for (k, (&w, &v)) in spec.omegas.iter().zip(&spec.values).enumerate() {
        buf[(k + m - half) % m] = v * C64::from_polar(1.0, -w * spec.t0);
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let scale = 1.0 / (m as f64 * spec.dt);
    buf.iter().map(|v| v * scale).collect()
}

/// `chi_E(w)`, the transform of the entropy kernel on its lag grid.
pub fn susceptibility_ee(r_e: &ResponseSeries, pad: usize) -> Result<Spectrum> {
    if r_e.grid.t0 != 0.0 {
        return Err(Error::Grid("kernel series must start at lag zero".into()));
    }
    fourier(r_e, pad)
}

/// Frequency-local product check between the kernel, drive and response.
#[derive(Clone, Debug)]
pub struct ProductIdentity {
    /// Relative L2 distance between the transform of the response and
    /// `chi_E * F` on a common grid.
    pub residual: f64,
    /// Largest difference between the supplied linear response and the
    /// prefix of the full convolution.
    pub prefix_mismatch: f64,
}

/// Compares the transform of the full causal convolution of `r_e` with the
/// drive samples against the product of the individual transforms.
///
/// The convolution is extended past the end of the drive (length
/// `N_R + N_F - 1`) so that the discrete identity is not spoiled by
/// truncation; its first `N_F` samples must reproduce `delta_s_linear`.
pub fn product_identity(
    r_e: &ResponseSeries,
    drive_samples: &[f64],
    delta_s_linear: &ResponseSeries,
) -> Result<ProductIdentity> {
    let dt = r_e.grid.dt;
    if !r_e.grid.same_spacing(&delta_s_linear.grid) || drive_samples.len() != delta_s_linear.values.len() {
        return Err(Error::Grid("kernel, drive and response grids disagree".into()));
    }
    let nr = r_e.values.len();
    let nf = drive_samples.len();
    let total = nr + nf - 1;
    let r = &r_e.values;
    let f = drive_samples;
    let full: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|n| {
            let lo = n.saturating_sub(nr - 1);
            let hi = n.min(nf - 1);
            let mut acc = 0.0;
            for j in lo..=hi {
                let mut w = 1.0;
                if j == 0 {
                    w *= 0.5;
                }
                if j == n {
                    w *= 0.5;
                }
                acc += w * r[n - j] * f[j];
            }
            acc * dt
        })
        .collect();
    let prefix = causal_convolution(r, f, dt);
    let prefix_mismatch = delta_s_linear
        .values
        .iter()
        .zip(&prefix)
        .fold(0.0_f64, |a, (x, y)| a.max((x - y).abs()));
    let m = (2 * total).next_power_of_two();
    let t0 = delta_s_linear.grid.t0;
    let to_c = |v: &[f64]| v.iter().map(|x| C64::new(*x, 0.0)).collect::<Vec<_>>();
    let chi = fourier_complex(&to_c(r), dt, 0.0, m)?;
    let fw = fourier_complex(&to_c(f), dt, t0, m)?;
    let ds = fourier_complex(&to_c(&full), dt, t0, m)?;
    let prod: Vec<C64> = chi.values.iter().zip(&fw.values).map(|(a, b)| a * b).collect();
    Ok(ProductIdentity {
        residual: relative_l2_complex(&ds.values, &prod),
        prefix_mismatch,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KkDirection {
    ImFromRe,
    ReFromIm,
}

/// Largest `|x(t)|` at negative times relative to the overall peak, read
/// from the inverse transform (second half of the periodic window).
pub fn causality_violation(spec: &Spectrum) -> f64 {
    let x = inverse_fourier(spec);
    let m = x.len();
    let peak = x.iter().fold(0.0_f64, |a, v| a.max(v.norm()));
    if peak == 0.0 {
        return 0.0;
    }
    // the origin sits at index -t0/dt
    let origin = (-spec.t0 / spec.dt).round() as isize;
    let neg = (1..=m / 2)
        .map(|s| x[((origin - s as isize).rem_euclid(m as isize)) as usize].norm())
        .fold(0.0_f64, f64::max);
    neg / peak
}

/// Discrete Kramers-Kronig reconstruction with the default causality check.
pub fn kramers_kronig(spec: &Spectrum, direction: KkDirection) -> Result<Spectrum> {
    kramers_kronig_with(spec, direction, Some(CAUSALITY_TOL), C64::new(0.0, 0.0))
}

/// Principal-value reconstruction on the periodic grid:
///
/// `Im X_k = (2/M) sum_{k-m odd} cot(pi (k-m)/M) Re X_m` and
/// `Re X_k = -(2/M) sum_{k-m odd} cot(pi (k-m)/M) Im X_m`.
///
/// The singular bin `m = k` never enters. The relation is exact for a causal
/// series padded to at least twice its length with its origin at `t0 = 0`,
/// up to the constant `dt * x(0)`, which the spectrum alone cannot fix. It is
/// supplied as `origin = x(0)` (zero for kernels that vanish at the origin;
/// a jump `R(0+)` contributes its midpoint `R(0+)/2`). The returned spectrum
/// carries the reconstructed component in the requested part and zero in the
/// other.
pub fn kramers_kronig_with(
    spec: &Spectrum,
    direction: KkDirection,
    causality_tol: Option<f64>,
    origin: C64,
) -> Result<Spectrum> {
    if spec.t0 != 0.0 {
        return Err(Error::Precondition("causal spectra must have their time origin at zero".into()));
    }
    if let Some(tol) = causality_tol {
        let ratio = causality_violation(spec);
        if ratio > tol {
            return Err(Error::NonCausal { ratio });
        }
    }
    let m = spec.len();
    let cot: Vec<f64> = (0..m)
        .map(|d| if d % 2 == 1 { 1.0 / (PI * d as f64 / m as f64).tan() } else { 0.0 })
        .collect();
    let source: Vec<f64> = match direction {
        KkDirection::ImFromRe => spec.re(),
        KkDirection::ReFromIm => spec.im(),
    };
    let sign = match direction {
        KkDirection::ImFromRe => 1.0,
        KkDirection::ReFromIm => -1.0,
    };
    let scale = sign * 2.0 / m as f64;
    let offset = match direction {
        KkDirection::ImFromRe => spec.dt * origin.im,
        KkDirection::ReFromIm => spec.dt * origin.re,
    };
    let out: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|k| {
            let mut acc = 0.0;
            for (j, s) in source.iter().enumerate() {
                let d = (k + m - j) % m;
                if d % 2 == 1 {
                    acc += cot[d] * s;
                }
            }
            acc * scale + offset
        })
        .collect();
    let values = out
        .into_iter()
        .map(|v| match direction {
            KkDirection::ImFromRe => C64::new(0.0, v),
            KkDirection::ReFromIm => C64::new(v, 0.0),
        })
        .collect();
    Ok(Spectrum {
        omegas: spec.omegas.clone(),
        values,
        dt: spec.dt,
        t0: spec.t0,
    })
}

/// Relative L2 error of the reconstructed component against the original.
pub fn kk_residual(spec: &Spectrum, direction: KkDirection) -> Result<f64> {
    let rec = kramers_kronig(spec, direction)?;
    spec.check_same_grid(&rec)?;
    Ok(match direction {
        KkDirection::ImFromRe => relative_l2(&rec.im(), &spec.im()),
        KkDirection::ReFromIm => relative_l2(&rec.re(), &spec.re()),
    })
}

/// `|R(t)|` over the trailing `fraction` of the kernel relative to its peak.
pub fn tail_ratio(series: &ResponseSeries, fraction: f64) -> f64 {
    let n = series.values.len();
    let start = n - ((n as f64 * fraction).ceil() as usize).clamp(1, n);
    let peak = series.max_abs();
    if peak == 0.0 {
        return 0.0;
    }
    series.values[start..].iter().fold(0.0_f64, |a, v| a.max(v.abs())) / peak
}

/// `chi''(w) = (1/2i) int exp(i w t) [R(t) - R(-t)] dt` for a causal kernel
/// on a lag grid, zero-extended to negative times. Negative times wrap into
/// the second half of the padded window, so `pad >= 2`.
pub fn dissipative_part(r: &ResponseSeries, pad: usize) -> Result<Spectrum> {
    if pad < 2 {
        return Err(Error::Grid("dissipative part needs a pad factor of at least 2".into()));
    }
    if r.grid.t0 != 0.0 {
        return Err(Error::Grid("kernel series must start at lag zero".into()));
    }
    let n = r.values.len();
    let m = pad * n;
    let mut odd = vec![C64::new(0.0, 0.0); m];
    for k in 1..n {
        odd[k] = C64::new(r.values[k], 0.0);
        odd[m - k] = C64::new(-r.values[k], 0.0);
    }
    let spec = fourier_complex(&odd, r.grid.dt, 0.0, m)?;
    let two_i = C64::new(0.0, 2.0);
    Ok(Spectrum {
        values: spec.values.iter().map(|v| v / two_i).collect(),
        ..spec
    })
}

/// Outcome of the fluctuation-dissipation comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct FdtReport {
    /// Largest `|C - RHS| / max(|C|, |RHS|)` over compared bins.
    pub max_residual: f64,
    pub bins_checked: usize,
    /// Bins containing zero-frequency lines, where `n_B + 1` has a pole.
    pub excluded_zero_bins: usize,
    /// Transition lines falling outside the frequency grid.
    pub lines_outside: usize,
    /// Binned `C~(w)` and `chi''(w)` on the supplied grid.
    pub correlation: Vec<f64>,
    pub dissipative: Vec<f64>,
}

/// `C~(w) = -2 [n_B(w) + 1] chi''(w)` from exact spectral sums in the
/// thermal state `exp(-beta H0)/Z`.
///
/// Lines at `w = E_m - E_n` carry `2 pi p_n X_nm` in `C~` and
/// `-pi (p_n - p_m) X_nm` in `chi''`, with `X_nm = O_nm (H1)_mn`, which must
/// be real. Lines are accumulated onto the nearest point of `omega_grid`
/// (uniform, ascending); the Bose factor is taken at each line's own
/// frequency.
pub fn fdt_check(o: &Operator, h1: &Operator, h0: &Operator, beta: f64, omega_grid: &[f64]) -> Result<FdtReport> {
    if h0.dim() > 16 {
        return Err(Error::Precondition(format!(
            "exact spectral sums limited to dimension 16, got {}",
            h0.dim()
        )));
    }
    for op in [o, h1] {
        if op.dim() != h0.dim() {
            return Err(Error::DimensionMismatch {
                expected: h0.dim(),
                found: op.dim(),
            });
        }
    }
    if omega_grid.len() < 2 {
        return Err(Error::Grid("frequency grid needs at least two points".into()));
    }
    let dw = omega_grid[1] - omega_grid[0];
    if !(dw > 0.0) || omega_grid.windows(2).any(|w| ((w[1] - w[0]) - dw).abs() > 1e-9 * dw) {
        return Err(Error::Grid("frequency grid must be uniform and ascending".into()));
    }
    let rho = gibbs_state(h0, beta)?;
    let eig = hermitian_eig(h0)?;
    let v = &eig.vectors;
    let p: Vec<f64> = (0..eig.dim())
        .map(|k| rho.operator().to_basis(v).get(k, k).re)
        .collect();
    let ot: CMatrix = o.to_basis(v).into_matrix();
    let ht: CMatrix = h1.to_basis(v).into_matrix();
    let nb = omega_grid.len();
    let mut corr = vec![0.0; nb];
    let mut chi = vec![0.0; nb];
    let mut rhs = vec![0.0; nb];
    let mut zero_bin = vec![false; nb];
    let mut outside = 0;
    let scale = ot.iter().chain(ht.iter()).fold(0.0_f64, |a, z| a.max(z.norm())).max(1e-300);
    for n in 0..eig.dim() {
        for m in 0..eig.dim() {
            let x = ot[(n, m)] * ht[(m, n)];
            if x.norm() == 0.0 {
                continue;
            }
            if x.im.abs() > 1e-12 * scale * scale {
                return Err(Error::Precondition(
                    "O_nm (H1)_mn must be real for the fluctuation-dissipation identity".into(),
                ));
            }
            let w = eig.values[m] - eig.values[n];
            let pos = ((w - omega_grid[0]) / dw).round();
            if pos < 0.0 || pos as usize >= nb {
                outside += 1;
                continue;
            }
            let b = pos as usize;
            let c_line = 2.0 * PI * p[n] * x.re;
            let chi_line = -PI * (p[n] - p[m]) * x.re;
            corr[b] += c_line;
            chi[b] += chi_line;
            if w.abs() <= 1e-12 * eig.values.iter().fold(1.0_f64, |a, e| a.max(e.abs())) {
                zero_bin[b] = true;
            } else {
                // -2 (n_B + 1) = -2 / (1 - exp(-beta w))
                rhs[b] += -2.0 / (-(-beta * w).exp_m1()) * chi_line;
            }
        }
    }
    let mut max_residual = 0.0_f64;
    let mut checked = 0;
    for b in 0..nb {
        if zero_bin[b] || chi[b].abs() <= FDT_SIGNAL_FLOOR {
            continue;
        }
        checked += 1;
        let r = (corr[b] - rhs[b]).abs() / corr[b].abs().max(rhs[b].abs());
        max_residual = max_residual.max(r);
    }
    Ok(FdtReport {
        max_residual,
        bins_checked: checked,
        excluded_zero_bins: zero_bin.iter().filter(|z| **z).count(),
        lines_outside: outside,
        correlation: corr,
        dissipative: chi,
    })
}
