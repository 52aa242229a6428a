//! Stabilizer and U-duality algebras of the builtin models.
//!
//! Run with `cargo run --example uduality`.

use emduality::duality::{find_killing_field, lift_killing_field, stab_sp_algebra, uduality_algebra, DEFAULT_SAMPLES};
use emduality::model::{builtin, BUILTIN_NAMES};

fn main() -> emduality::Result<()> {
    for name in BUILTIN_NAMES {
        let m = builtin(name)?;
        let points = m.chart.samples(DEFAULT_SAMPLES);
        let stab = stab_sp_algebra(&m, &points)?;
        let u = uduality_algebra(&m, &points)?;
        println!(
            "{name:>13}: dim stab = {}, (dim u, dim stab, dim iso) = ({}, {}, {}), gap {}",
            stab.dim, u.dim_u, u.dim_stab, u.dim_iso_pr, u.exactness_gap
        );
    }

    // The dilation of the upper half plane lifts for N = τ.
    let m = builtin("identity-tau")?;
    let xi = find_killing_field(&m.chart, "dilation")?;
    let lift = lift_killing_field(&m, &xi, &m.chart.samples(DEFAULT_SAMPLES))?;
    match lift.generator {
        Some(x) => println!("dilation lifts to {x:.4}"),
        None => println!("dilation does not lift (residual {:.1e})", lift.residual),
    }
    Ok(())
}
