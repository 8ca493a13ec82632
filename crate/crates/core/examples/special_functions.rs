//! Exponential integral and upper incomplete gamma on a few arguments.

use covert_relay::specfun::{ei_diff, expint_e1, expint_ei, upper_gamma};

fn main() -> covert_relay::Result<()> {
    for x in [-5.0, -0.5, 0.5, 5.0, 50.0] {
        println!("Ei({x:>5}) = {:.15e}", expint_ei(x)?);
    }
    println!("E1(2)         = {:.15e}", expint_e1(2.0)?);
    println!("E1(3) - E1(1) = {:.15e}", ei_diff(1.0, 3.0)?);
    for s in [1, 3, 8] {
        println!("Gamma({s}, 2.5) = {:.15e}", upper_gamma(s, 2.5)?);
    }
    Ok(())
}
