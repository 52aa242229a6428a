//! Real Killing spinors of AdS4 and the first-order system of their
//! bilinears.
//!
//! Run with `cargo run --release --example killing_spinors`.

use emduality::field::V4;
use emduality::spinor::{builtin_frame, integrate_killing, killing_residual, refinement_order, bilinear_search};

fn main() -> emduality::Result<()> {
    let lambda = 1.0;
    let eps0 = V4::new(1.0, 0.3, -0.2, 0.5);
    let mut prev = None;
    for n in [5, 9, 17] {
        let fr = builtin_frame("ads4-poincare", lambda, n)?;
        let int = integrate_killing(&fr, lambda, eps0)?;
        let res = killing_residual(&fr, &int.field)?;
        let best = &bilinear_search(&fr, &int.field)?[0];
        print!(
            "n = {n:>2}: residual {:.3e}, path defect {:.3e}, bilinears {:.3e} (l sign {}, λ sign {})",
            res.max,
            int.path_defect,
            best.report.worst(),
            best.l_sign,
            best.lambda_sign
        );
        if let Some((p, r)) = &prev {
            let (_, _, order) = refinement_order((p, r), (&fr.patch, &res))?;
            print!(", order {order:.3}");
        }
        println!();
        prev = Some((fr.patch.clone(), res));
    }
    Ok(())
}
