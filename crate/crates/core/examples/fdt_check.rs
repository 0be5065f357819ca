//! Fluctuation-dissipation check from exact thermal spectral sums.

use ee_response::runner::experiments::{fdt_grid, random_hermitian};
use ee_response::signal::fdt_check;
use ee_response::tensor::pauli;
use rand::SeedableRng;

fn main() -> ee_response::Result<()> {
    let h0 = pauli::z().scale(0.5);
    let r = fdt_check(&pauli::x(), &pauli::x(), &h0, 2.0, &fdt_grid(&h0, 1e-3))?;
    println!("two-level: {} bins, max residual {:.2e}", r.bins_checked, r.max_residual);

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let h0 = random_hermitian(4, &mut rng);
    let o = random_hermitian(4, &mut rng);
    for beta in [0.3, 1.0, 3.0] {
        let r = fdt_check(&o, &o, &h0, beta, &fdt_grid(&h0, 1e-3))?;
        println!("4-level, beta {beta}: {} bins ({} zero-frequency excluded), max residual {:.2e}",
            r.bins_checked, r.excluded_zero_bins, r.max_residual);
    }
    Ok(())
}
