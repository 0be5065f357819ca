//! Entropy response kernel of the first site of a ring, and the linear
//! entropy change it predicts.

use ee_response::dynamics::DriveSignal;
use ee_response::response::delta_s_linear;
use ee_response::runner::experiments::XxModel;

fn main() -> ee_response::Result<()> {
    let model = XxModel::ring(20, 0.0, 2.0)?;
    let kernel = model.entropy_kernel()?;
    println!("{} spectral lines, imaginary defect on [0, 20] {:.1e}", kernel.kernel.lines().count(), kernel.kernel.imaginary_defect(0.01, 2000));
    for t in [0.0, 0.25, 0.5, 1.0, 2.0, 5.0] {
        println!("R_E({t:.2}) = {:+.8}", kernel.kernel.eval(t));
    }
    let grid = model.grid(-8.0, 20.0, None, 0.1)?;
    let r_e = model.kernel_series(&kernel, &grid)?;
    let drive = DriveSignal::gaussian_cosine(0.1, std::f64::consts::FRAC_PI_2)?;
    let ds = delta_s_linear(&r_e, &drive, &grid)?;
    println!("max |dS_linear| = {:.6e} over {} samples", ds.max_abs(), ds.values.len());
    Ok(())
}
