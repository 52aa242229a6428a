//! Pointwise algebra of a twisted self-dual field strength.
//!
//! Run with `cargo run --example field_algebra`.

use emduality::field::{self, Metric, M4};
use emduality::model::builtin;

fn main() -> emduality::Result<()> {
    let m = builtin("axio-dilaton")?;
    let em = m.em_pair(&[0.2, 1.3])?;
    let j = m.taming(&[0.2, 1.3])?;
    let g = Metric::minkowski();

    let mut f1 = M4::zeros();
    f1[(0, 1)] = 0.5;
    let mut f2 = M4::zeros();
    f2[(2, 3)] = -0.3;
    let (f1, f2) = (f1 - f1.transpose(), f2 - f2.transpose());

    // V = (F, RF - I∗F) solves ∗V = -JV.
    let v = field::assemble_v(&g, &em, &[f1, f2])?;
    println!("|∗V + JV| = {:.1e}", field::twisted_self_duality_defect(&g, &j, &v)?);
    println!("|G⁺ - (R - iI)F⁺| = {:.1e}", field::cvcn_defect(&g, &em, &v)?);

    // Both forms of the electromagnetic stress tensor.
    let t = field::stress_gauge(&g, &j, &v)?;
    let te = field::stress_gauge_em(&g, &em, &[f1, f2])?;
    println!("T = {t:.4}");
    println!("|T - T(R, I)| = {:.1e}", (t - te).amax());
    Ok(())
}
