//! Second-order scaling of the nonlinear remainder.

use ee_response::runner::experiments::{alpha_scan, ReproductionParams};

fn main() -> ee_response::Result<()> {
    let alphas = [0.01, 0.02, 0.04, 0.08];
    let s = alpha_scan(&ReproductionParams::ring(20, alphas[0]), &alphas)?;
    for (i, a) in s.alphas.iter().enumerate() {
        println!("alpha {a:.2}: |dS - dS_lin| {:.3e}, |dS - d<s_A>| {:.3e}", s.linear_residuals[i], s.expectation_residuals[i]);
    }
    println!("fitted exponents: {:?} {:?}", s.linear_exponent, s.expectation_exponent);
    println!("spread of expectation residual / alpha^2: {:.4}", s.expectation_ratio_spread);
    Ok(())
}
