//! Kramers-Kronig reconstruction: a Lorentzian line and the entropy
//! susceptibility of a ring.

use ee_response::runner::experiments::XxModel;
use ee_response::signal::{kk_residual, kramers_kronig_with, relative_l2, susceptibility_ee, KkDirection, Spectrum};
use ee_response::tensor::C64;

fn main() -> ee_response::Result<()> {
    let (w0, eta) = (2.0, 0.05);
    let spec = Spectrum::from_fn(1 << 14, 0.01, |w| C64::new(1.0, 0.0) / C64::new(w0 - w, -eta));
    // sampled kernel i exp(-i w0 t - eta t) takes its midpoint i/2 at t = 0
    let re = kramers_kronig_with(&spec, KkDirection::ReFromIm, None, C64::new(0.0, 0.5))?;
    println!("Lorentzian: relative L2 error of Re from Im = {:.3e}", relative_l2(&re.re(), &spec.re()));

    let model = XxModel::ring(20, 0.0, 2.0)?;
    let kernel = model.entropy_kernel()?;
    let grid = model.grid(0.0, 40.0, None, 0.1)?;
    let chi = susceptibility_ee(&model.kernel_series(&kernel, &grid)?, 2)?;
    println!("ring: Re from Im residual {:.3e}", kk_residual(&chi, KkDirection::ReFromIm)?);
    println!("ring: Im from Re residual {:.3e}", kk_residual(&chi, KkDirection::ImFromRe)?);
    Ok(())
}
