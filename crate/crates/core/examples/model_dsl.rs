//! Writing a period-matrix model, evaluating it and differentiating it.
//!
//! Run with `cargo run --example model_dsl`.

use emduality::model::parse_model;

const SOURCE: &str = "\
# Two vector multiplets coupled to one complex scalar.
name = two-field
chart = poincare
N[1,1] = tau
N[1,2] = 0.1*tau
N[2,2] = 2*tau - 1/tau
";

fn main() -> emduality::Result<()> {
    let model = parse_model(SOURCE)?;
    println!("{} with n_v = {}", model.name, model.nv);
    let p = [0.3, 1.4];
    println!("N(0.3 + 1.4i) = {:.4}", model.period(&p)?.matrix());
    println!("∂N/∂x1 = {:.4}", model.period_derivative(&p, 0)?);
    model.validate(&model.chart.samples(16))?;
    println!("Siegel on all samples; printed back:\n{}", model.to_source());

    // Errors carry positions.
    match parse_model("nv = 1\nN[1,1] = tau +* 2\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
