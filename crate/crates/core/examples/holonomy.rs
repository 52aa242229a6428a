//! Flat duality bundles given by generators and relations.
//!
//! Run with `cargo run --example holonomy`.

use emduality::holonomy::{autb_theta, centralizer_algebra, conjugacy_invariants, presentation_check, BundlePresentation};
use emduality::symplectic::Taming;
use emduality::RMat;

fn main() -> emduality::Result<()> {
    // Holonomy of a punctured torus: two hyperbolic generators, free group.
    let a = RMat::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 1.0]);
    let b = RMat::from_row_slice(2, 2, &[1.0, 0.0, 3.0, 1.0]);
    let p = BundlePresentation::new(1, vec![a.clone(), b], vec![])?;
    println!("presentation ok: {}", presentation_check(&p, 1e-10)?.pass);
    println!("centralizer dim: {}", centralizer_algebra(&p)?.dim);
    println!("traces up to length 2: {:?}", conjugacy_invariants(&p, 2)?);

    // A single generator has a one-dimensional centralizer.
    let single = BundlePresentation::new(1, vec![a], vec![])?;
    println!("single generator centralizer dim: {}", centralizer_algebra(&single)?.dim);

    // Trivial holonomy: everything commutes, and the taming cuts sp(4) to u(2).
    let trivial = BundlePresentation::new(2, vec![], vec![])?;
    println!(
        "trivial n=2: sp dim {}, with J0 dim {}",
        centralizer_algebra(&trivial)?.dim,
        autb_theta(&trivial, &Taming::standard(2))?.dim
    );
    Ok(())
}
