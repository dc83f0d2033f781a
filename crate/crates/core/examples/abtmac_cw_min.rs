//! Minimum contention window chosen by ABTMAC, and the collision-count
//! estimator that feeds it.

use abtmac::abtmac::{
    calibrate_k_prime, cw_min, cw_min_exact, estimate_active_nodes, AbtmacParams,
};

fn main() -> abtmac::Result<()> {
    for (lambda, m) in [(0.5, 10), (0.55, 100), (0.7, 100)] {
        let p = AbtmacParams::with_target(lambda);
        println!(
            "lambda = {lambda}, M = {m}: bound {:.3} -> CW_min = {}",
            cw_min_exact(&p, m)?,
            cw_min(&p, m)?
        );
    }

    // K' such that 0.30 collisions per service means 10 stations
    let k = calibrate_k_prime(0.30, 10)?;
    for n_bar in [0.1, 0.3, 0.45, 0.6] {
        println!("n_bar = {n_bar}: M~ = {}", estimate_active_nodes(n_bar, k)?);
    }
    Ok(())
}
