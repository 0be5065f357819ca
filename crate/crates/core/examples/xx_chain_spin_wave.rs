//! Single-excitation XX ring: spectrum and spin-wave eigenstates.

use ee_response::models::{spin_wave_state, xx_chain_single_excitation, Boundary, XXChainSpec};
use ee_response::tensor::hermitian_eig;

fn main() -> ee_response::Result<()> {
    let spec = XXChainSpec::new(8, 0.5, 2.0, Boundary::Periodic)?;
    let h = xx_chain_single_excitation(&spec)?;
    let eig = hermitian_eig(&h)?;
    println!("eigenvalues: {:?}", eig.values.iter().map(|e| format!("{e:.4}")).collect::<Vec<_>>());
    for k in 1..=spec.sites {
        let psi = spin_wave_state(spec.sites, k)?;
        let hpsi = h.apply(psi.amplitudes());
        let e = psi.amplitudes().dotc(&hpsi).re;
        let resid = (&hpsi - psi.amplitudes() * ee_response::tensor::C64::new(e, 0.0)).norm();
        println!("k = {k}: <H> = {e:+.6}, predicted {:+.6}, |H psi - E psi| = {resid:.1e}", spec.ring_energy(k));
    }
    Ok(())
}
