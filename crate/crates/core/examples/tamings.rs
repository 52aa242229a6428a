//! Couplings, tamings and period matrices, and the action of Sp(2n) on them.
//!
//! Run with `cargo run --example tamings`.

use emduality::linalg::max_abs_c;
use emduality::sampling::{random_em_pair, random_symplectic, rng};
use emduality::symplectic::{conjugate, fractional_action, gamma, gamma_inv, mu, period_matrix, taming_check};

fn main() -> emduality::Result<()> {
    let mut r = rng(1);
    let pair = random_em_pair(2, &mut r);
    println!("R = {:.4}I = {:.4}", pair.r, pair.i);

    let j = gamma(&pair);
    let c = taming_check(j.matrix())?;
    println!("J = {:.4}", j.matrix());
    println!("J² + 1: {:.1e}, symplectic: {:.1e}, ΩJ symmetric: {:.1e}", c.square, c.symplectic, c.asymmetry);

    let back = gamma_inv(&j)?;
    println!("round trip |ΔR| = {:.1e}", (&back.r - &pair.r).amax());

    // μ(J) = R + iI; the period matrix flips the sign of the real part.
    let tau = mu(&j)?;
    println!("μ(J) = {:.4}", tau.matrix());
    println!("N = {:.4}", period_matrix(&j)?);

    // μ intertwines conjugation and the fractional action.
    let a = random_symplectic(2, &mut r, 0.5);
    let lhs = mu(&conjugate(&a, &j)?)?;
    let rhs = fractional_action(&a, &tau)?;
    println!("|μ(AJA⁻¹) - A·μ(J)| = {:.1e}", max_abs_c(&(lhs.matrix() - rhs.matrix())));
    Ok(())
}
