//! Hamiltonians and initial states.
//!
//! The XX chain lives in its single-excitation sector: basis state `|j>`
//! (j = 1..L) carries the only up-spin on site `j`, which makes an L-site
//! chain an L-dimensional problem.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::tensor::{
    c, hermitian_eig, kron, BipartitePartition, CMatrix, CVector, DensityMatrix, Eigen, Operator,
    PureState, C64,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// `H0 = (lambda/2) sum_j sz_j + (J/2) sum_<jk> (sx_j sx_k + sy_j sy_k)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XXChainSpec {
    pub sites: usize,
    pub lambda: f64,
    pub coupling: f64,
    pub boundary: Boundary,
}

impl XXChainSpec {
    pub fn new(sites: usize, lambda: f64, coupling: f64, boundary: Boundary) -> Result<Self> {
        let spec = Self {
            sites,
            lambda,
            coupling,
            boundary,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::Precondition(format!(
                "chain needs at least 2 sites, got {}",
                self.sites
            )));
        }
        if !self.coupling.is_finite() || self.coupling == 0.0 {
            return Err(Error::Precondition(
                "coupling J must be finite and nonzero".into(),
            ));
        }
        if !self.lambda.is_finite() {
            return Err(Error::Precondition("field lambda must be finite".into()));
        }
        Ok(())
    }

    /// Energy of the spin wave `k` on the ring: `lambda (2 - L)/2 + 2J cos(2 pi k / L)`.
    pub fn ring_energy(&self, k: usize) -> f64 {
        self.field_offset() + 2.0 * self.coupling * (2.0 * PI * k as f64 / self.sites as f64).cos()
    }

    /// Diagonal entry contributed by the homogeneous field in this sector.
    pub fn field_offset(&self) -> f64 {
        self.lambda * (2.0 - self.sites as f64) / 2.0
    }
}

/// `L x L` matrix of the chain in the site-excitation basis.
pub fn xx_chain_single_excitation(spec: &XXChainSpec) -> Result<Operator> {
    spec.validate()?;
    let l = spec.sites;
    let mut m = CMatrix::from_diagonal_element(l, l, c(spec.field_offset()));
    for j in 0..l - 1 {
        m[(j, j + 1)] += c(spec.coupling);
        m[(j + 1, j)] += c(spec.coupling);
    }
    if spec.boundary == Boundary::Periodic {
        m[(0, l - 1)] += c(spec.coupling);
        m[(l - 1, 0)] += c(spec.coupling);
    }
    Operator::hermitian(m)
}

/// `a_j = exp(i 2 pi k j / L) / sqrt(L)`, j = 1..L.
pub fn spin_wave_state(sites: usize, k: usize) -> Result<PureState> {
    if k == 0 || k > sites {
        return Err(Error::IndexOutOfRange { index: k, max: sites });
    }
    let norm = 1.0 / (sites as f64).sqrt();
    let amps = CVector::from_iterator(
        sites,
        (1..=sites).map(|j| C64::from_polar(norm, 2.0 * PI * (k * j) as f64 / sites as f64)),
    );
    PureState::normalized(amps)
}

/// `sz_site / 2` restricted to the single-excitation sector.
pub fn site_perturbation(sites: usize, site: usize) -> Result<Operator> {
    if site == 0 || site > sites {
        return Err(Error::IndexOutOfRange {
            index: site,
            max: sites,
        });
    }
    let diag: Vec<f64> = (1..=sites)
        .map(|j| if j == site { 0.5 } else { -0.5 })
        .collect();
    Ok(Operator::from_real_diagonal(&diag))
}

/// Embeds single-excitation amplitudes into the full `2^L` spin space.
///
/// Site 1 is the most significant qubit and `|1>` is spin up, so the
/// excitation on site `j` sits at index `2^(L - j)`.
pub fn embed_single_excitation(state: &PureState) -> Result<PureState> {
    let l = state.dim();
    if l >= usize::BITS as usize - 1 || l > 24 {
        return Err(Error::Precondition(format!(
            "full-space embedding of {l} sites is too large"
        )));
    }
    let mut full = CVector::zeros(1 << l);
    for (j, a) in state.amplitudes().iter().enumerate() {
        full[1 << (l - 1 - j)] = *a;
    }
    PureState::normalized(full)
}

/// Non-interacting composite Hamiltonian `H_A (x) I + I (x) H_B`.
#[derive(Clone, Debug)]
pub struct BipartiteModel {
    pub h_a: Operator,
    pub h_b: Operator,
    pub h0: Operator,
    eig_a: Eigen,
    eig_b: Eigen,
}

impl BipartiteModel {
    pub fn partition(&self) -> BipartitePartition {
        BipartitePartition {
            d_a: self.h_a.dim(),
            d_b: self.h_b.dim(),
        }
    }

    pub fn eig_a(&self) -> &Eigen {
        &self.eig_a
    }

    pub fn eig_b(&self) -> &Eigen {
        &self.eig_b
    }

    /// Spectrum of `H0` as all pairwise sums, ascending.
    pub fn pair_energies(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self
            .eig_a
            .values
            .iter()
            .flat_map(|f| self.eig_b.values.iter().map(move |g| f + g))
            .collect();
        e.sort_by(f64::total_cmp);
        e
    }

    /// Distinct energies of `H0` with multiplicities.
    pub fn degeneracies(&self, tol: f64) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for v in self.pair_energies() {
            match out.last_mut() {
                Some((last, n)) if (v - *last).abs() <= tol => *n += 1,
                _ => out.push((v, 1)),
            }
        }
        out
    }

    pub fn is_degenerate(&self, tol: f64) -> bool {
        self.degeneracies(tol).iter().any(|&(_, n)| n > 1)
    }

    /// `|f_i> (x) |g_j>` with eigenvalues indexed ascending from 0.
    pub fn product_vector(&self, i: usize, j: usize) -> Result<PureState> {
        if i >= self.eig_a.dim() {
            return Err(Error::IndexOutOfRange {
                index: i + 1,
                max: self.eig_a.dim(),
            });
        }
        if j >= self.eig_b.dim() {
            return Err(Error::IndexOutOfRange {
                index: j + 1,
                max: self.eig_b.dim(),
            });
        }
        let v = self.eig_a.vector(i).kronecker(&self.eig_b.vector(j));
        PureState::normalized(v)
    }
}

pub fn bipartite_model(h_a: &Operator, h_b: &Operator) -> Result<BipartiteModel> {
    let eig_a = hermitian_eig(h_a)?;
    let eig_b = hermitian_eig(h_b)?;
    let h0 = kron(h_a, &Operator::identity(h_b.dim())).try_add(&kron(
        &Operator::identity(h_a.dim()),
        h_b,
    ))?;
    Ok(BipartiteModel {
        h_a: h_a.clone(),
        h_b: h_b.clone(),
        h0,
        eig_a,
        eig_b,
    })
}

/// `|f_i><f_i| (x) |g_j><g_j|`.
pub fn product_eigenstate(model: &BipartiteModel, i: usize, j: usize) -> Result<DensityMatrix> {
    Ok(model.product_vector(i, j)?.projector())
}

/// `(1/sqrt d) sum_i |i_A i_B>` as a state vector.
pub fn maximally_entangled_vector(d: usize) -> Result<PureState> {
    if d < 2 {
        return Err(Error::Precondition(format!(
            "maximally entangled state needs d >= 2, got {d}"
        )));
    }
    let mut v = CVector::zeros(d * d);
    let amp = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        v[i * d + i] = c(amp);
    }
    PureState::normalized(v)
}

/// `(1/d) sum_ij |i_A i_B><j_A j_B|`.
pub fn maximally_entangled_state(d: usize) -> Result<DensityMatrix> {
    Ok(maximally_entangled_vector(d)?.projector())
}

/// `exp(-beta H) / Z`, evaluated with the spectrum shifted to its minimum.
pub fn gibbs_state(h: &Operator, beta: f64) -> Result<DensityMatrix> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::Precondition(format!(
            "inverse temperature must be finite and >= 0, got {beta}"
        )));
    }
    let eig = hermitian_eig(h)?;
    let e_min = eig.values.first().copied().unwrap_or(0.0);
    let z: f64 = eig.values.iter().map(|e| (-beta * (e - e_min)).exp()).sum();
    let rho = eig.apply_real(|e| (-beta * (e - e_min)).exp() / z);
    Ok(DensityMatrix::from_operator_unchecked(rho))
}
