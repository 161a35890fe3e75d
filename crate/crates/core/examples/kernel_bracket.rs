//! Derivatives of the Gaussian and periodized heat kernels in `L^1`, and the cb-norm bracket.

use nctorus::heat::cb_norm_bracket;
use nctorus::kernel::{gaussian_l1_1d, gaussian_l1_norm, periodized_l1_norm};
use nctorus::MultiIndex;

fn main() -> nctorus::Result<()> {
    let exact = 1.0 / std::f64::consts::PI.sqrt();
    let quad = gaussian_l1_1d(1, 1.0, 14.0);
    println!("||G_1'||_L1(R) = {quad:.15} vs 1/sqrt(pi) = {exact:.15}, rel {:.1e}", (quad / exact - 1.0).abs());

    let alpha = MultiIndex::new(&[1]);
    println!("\n{:>8} {:>12} {:>12} {:>12} {:>10}", "t", "gaussian", "periodized", "sup|M|", "upper t^1/2");
    for t in [1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1] {
        let g = gaussian_l1_norm(&alpha, t)?;
        let h = periodized_l1_norm(&alpha, t)?;
        let (lower, upper) = cb_norm_bracket(&alpha, t)?;
        println!("{t:>8.0e} {g:>12.6} {h:>12.6} {lower:>12.6} {:>10.6}", upper * t.sqrt());
    }
    // on the circle the periodized kernel loses mass once sqrt(t) is comparable to the period
    Ok(())
}
