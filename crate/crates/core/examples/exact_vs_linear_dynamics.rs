//! RK4 trajectory of a driven ring against the linear density-matrix change.

use ee_response::dynamics::{delta_rho_linear, evolve_exact, DriveSignal};
use ee_response::runner::experiments::XxModel;

fn main() -> ee_response::Result<()> {
    let model = XxModel::ring(10, 0.0, 2.0)?;
    let grid = model.grid(-6.0, 6.0, Some(0.005), 0.05)?;
    let drive = DriveSignal::gaussian_cosine(0.05, std::f64::consts::FRAC_PI_2)?;
    let traj = evolve_exact(&model.h0, &model.h1, &drive, &model.psi0, &grid)?;
    println!("{} steps, dt = {:.4}, norm drift {:.2e}, step product {:.3}", grid.steps(), grid.dt, traj.norm_drift, traj.step_product);

    for t in [-2.0, 0.0, 2.0, 6.0] {
        let n = grid.index_of(t).expect("on grid");
        let exact = traj.states[n].density_matrix().into_operator().try_sub(model.rho0.operator())?;
        let linear = delta_rho_linear(&model.rho0, &model.h0, &model.h1, &drive, t, &grid)?;
        let resid = exact.try_sub(&linear)?.frobenius_norm();
        println!("t = {t:+.1}: |drho| = {:.3e}, |drho - drho_lin| = {resid:.3e}", exact.frobenius_norm());
    }
    Ok(())
}
