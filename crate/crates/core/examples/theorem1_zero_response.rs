//! Vanishing first-order entropy response for eigenstates whose reduced log
//! commutes with the subsystem Hamiltonian.

use ee_response::dynamics::TimeGrid;
use ee_response::runner::experiments::theorem1_suite;

fn main() -> ee_response::Result<()> {
    let grid = TimeGrid::new(-8.0, 8.0, 0.005)?;
    let alphas = [0.01, 0.02, 0.04, 0.08];
    let suite = theorem1_suite(1.0, 0.6, &alphas, std::f64::consts::FRAC_PI_2, &grid)?;
    for (name, r) in [("product", &suite.product), ("entangled", &suite.entangled)] {
        println!("{name}: zero linear response {}, max |dS_lin| {:.1e}, hollow {:.1e}",
            r.zero_linear_response(), r.max_abs_delta_s_linear, r.delta_rho_a_hollow_maxdiag);
        println!("  max |dS_exact| per alpha: {:?}", r.max_abs_delta_s_exact);
        println!("  fitted exponent: {:?}", r.alpha_scaling_exponent);
    }
    Ok(())
}
