//! Stabilizer and U-duality algebras of a period-matrix model.
//!
//! An element `X ∈ sp(2n_v)` stabilizes the model when the infinitesimal
//! fractional action `δ_X N = (X_c + X_d N) - N (X_a + X_b N)` vanishes at
//! every scalar point.  A pair `(X, ξ)` with `ξ` a Killing field of the
//! scalar metric lies in the U-duality algebra when `δ_X N = ξ(N)`.  Both
//! conditions are imposed on a finite set of chart samples and solved as
//! real linear systems by SVD.

use num_complex::Complex64;

use crate::linalg::{self, max_abs_c};
use crate::model::{ChartKind, Env, Expr, Model, ScalarChart};
use crate::symplectic::{
    fractional_action, infinitesimal_action, sp_basis, SiegelPoint, SymplecticMatrix,
};
use crate::{CMat, Error, RMat, Result};

/// Singular values below this multiple of the largest one count as zero.
pub const RANK_TOL: f64 = 1e-8;
/// Tolerance on normalized residuals of lifts and algebra members.
pub const TOL_LIFT: f64 = 1e-8;
/// Number of chart samples used when none are given.
pub const DEFAULT_SAMPLES: usize = 16;
/// Fewer samples than this trigger a warning.
pub const MIN_SAMPLES: usize = 8;

/// A vector field on the scalar chart with polynomial-expression components.
#[derive(Debug, Clone)]
pub struct KillingField {
    pub name: String,
    pub components: Vec<Expr>,
}

impl KillingField {
    fn env(p: &[f64]) -> Env<'_> {
        Env {
            tau: Complex64::new(p[0], p.get(1).copied().unwrap_or(0.0)),
            coords: p,
        }
    }

    pub fn eval(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.components
            .iter()
            .map(|c| c.eval(&Self::env(p)).map(|z| z.re))
            .collect()
    }

    /// `∂_j ξ^i`, indexed `(i, j)`.
    pub fn jacobian(&self, p: &[f64]) -> Result<RMat> {
        let d = self.components.len();
        let mut m = RMat::zeros(d, d);
        for (i, c) in self.components.iter().enumerate() {
            for j in 0..d {
                m[(i, j)] = c.derivative(j).eval(&Self::env(p))?.re;
            }
        }
        Ok(m)
    }

    /// Largest entry of the Lie derivative `L_ξ 𝒢` at `p`.
    pub fn killing_defect(&self, chart: &ScalarChart, p: &[f64]) -> Result<f64> {
        let xi = self.eval(p)?;
        let dxi = self.jacobian(p)?;
        let g = chart.metric(p)?;
        let dg = chart.metric_derivatives(p)?;
        let mut lie = &dxi.transpose() * &g + &g * &dxi;
        for (k, dgk) in dg.iter().enumerate() {
            lie += dgk * xi[k];
        }
        Ok(linalg::max_abs(&lie))
    }
}

fn poly(src: &str, chart: &ScalarChart) -> Expr {
    crate::model::expr::parse(src, &chart.symbols()).expect("builtin field parses")
}

/// A basis of the Killing fields of the chart metric, checked on samples.
pub fn killing_basis(chart: &ScalarChart) -> Result<Vec<KillingField>> {
    let field = |name: String, comps: Vec<String>| KillingField {
        name,
        components: comps.iter().map(|s| poly(s, chart)).collect(),
    };
    let fields = match chart.kind {
        ChartKind::Poincare => vec![
            field("translation".into(), vec!["1".into(), "0".into()]),
            field("dilation".into(), vec!["x1".into(), "x2".into()]),
            field(
                "special".into(),
                vec!["x1^2 - x2^2".into(), "2*x1*x2".into()],
            ),
        ],
        ChartKind::Flat(k) => {
            let mut out = Vec::new();
            for i in 0..k {
                let comps = (0..k).map(|j| if i == j { "1" } else { "0" }.to_string()).collect();
                out.push(field(format!("translation-{}", i + 1), comps));
            }
            for i in 0..k {
                for j in i + 1..k {
                    let comps = (0..k)
                        .map(|l| {
                            if l == i {
                                format!("-x{}", j + 1)
                            } else if l == j {
                                format!("x{}", i + 1)
                            } else {
                                "0".into()
                            }
                        })
                        .collect();
                    out.push(field(format!("rotation-{}{}", i + 1, j + 1), comps));
                }
            }
            out
        }
    };
    for f in &fields {
        for p in chart.samples(8) {
            let d = f.killing_defect(chart, &p)?;
            if d > 1e-10 {
                return Err(Error::domain(format!("{} is not a Killing field", f.name), d, 1e-10));
            }
        }
    }
    Ok(fields)
}

/// Looks a Killing field up by position (zero based) or by name.
pub fn find_killing_field(chart: &ScalarChart, spec: &str) -> Result<KillingField> {
    let fields = killing_basis(chart)?;
    let hit = match spec.parse::<usize>() {
        Ok(k) => fields.get(k).cloned(),
        Err(_) => fields.iter().find(|f| f.name == spec).cloned(),
    };
    hit.ok_or_else(|| Error::NotFound {
        kind: "Killing field",
        name: spec.to_string(),
    })
}

/// Stacks the real and imaginary parts of the upper triangle of `m`.
fn push_upper(out: &mut Vec<f64>, m: &CMat) {
    let n = m.nrows();
    for i in 0..n {
        for j in i..n {
            out.push(m[(i, j)].re);
            out.push(m[(i, j)].im);
        }
    }
}

fn rows_per_sample(n: usize) -> usize {
    n * (n + 1)
}

/// Columns of the linearized stabilizer condition, one per basis element
/// of `sp(2n)`, evaluated at `points`.
fn stabilizer_matrix(model: &Model, points: &[Vec<f64>]) -> Result<RMat> {
    let basis = sp_basis(model.nv);
    let rows = rows_per_sample(model.nv) * points.len();
    let mut m = RMat::zeros(rows, basis.len());
    for (s, p) in points.iter().enumerate() {
        let tau = model.period(p)?;
        for (c, b) in basis.iter().enumerate() {
            let mut col = Vec::new();
            push_upper(&mut col, &infinitesimal_action(b, tau.matrix()));
            for (r, v) in col.into_iter().enumerate() {
                m[(s * rows_per_sample(model.nv) + r, c)] = v;
            }
        }
    }
    Ok(m)
}

/// `ξ(N)` at `p`.
pub fn killing_derivative(model: &Model, xi: &KillingField, p: &[f64]) -> Result<CMat> {
    let v = xi.eval(p)?;
    let mut out = CMat::zeros(model.nv, model.nv);
    for (k, vk) in v.iter().enumerate() {
        if *vk != 0.0 {
            out += model.period_derivative(p, k)? * Complex64::new(*vk, 0.0);
        }
    }
    Ok(out)
}

fn combine(coeffs: &[f64]) -> RMat {
    let n = ((((8 * coeffs.len() + 1) as f64).sqrt() - 1.0) / 4.0).round() as usize;
    sp_basis(n)
        .iter()
        .zip(coeffs)
        .fold(RMat::zeros(2 * n, 2 * n), |acc, (b, c)| acc + b * *c)
}

#[derive(Debug, Clone)]
pub struct StabilizerReport {
    pub dim: usize,
    /// Basis of the stabilizer, orthonormal in the coordinates of
    /// [`sp_basis`].
    pub basis: Vec<RMat>,
    /// Largest `|δ_X N| / max(1, |N|)` over the basis and samples.
    pub residual: f64,
    pub samples: usize,
    /// Dimensions computed on nested prefixes of the samples.
    pub prefix_dims: Vec<(usize, usize)>,
    pub warnings: Vec<String>,
}

fn check_samples(points: &[Vec<f64>], warnings: &mut Vec<String>) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Invalid("no sample points".into()));
    }
    if points.len() < MIN_SAMPLES {
        warnings.push(format!(
            "only {} samples; at least {MIN_SAMPLES} are recommended",
            points.len()
        ));
    }
    Ok(())
}

fn prefixes(len: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut k = MIN_SAMPLES;
    while k < len {
        out.push(k);
        k *= 2;
    }
    out.push(len);
    out
}

/// Largest normalized defect `|δ_X N(p)| / max(1, |N(p)|)` over `points`.
pub fn stabilizer_defect(model: &Model, x: &RMat, points: &[Vec<f64>]) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in points {
        let tau = model.period(p)?;
        let scale = max_abs_c(tau.matrix()).max(1.0);
        worst = worst.max(max_abs_c(&infinitesimal_action(x, tau.matrix())) / scale);
    }
    Ok(worst)
}

/// The stabilizer algebra `{X ∈ sp(2n_v) : δ_X N = 0 on the samples}`.
pub fn stab_sp_algebra(model: &Model, points: &[Vec<f64>]) -> Result<StabilizerReport> {
    let mut warnings = Vec::new();
    check_samples(points, &mut warnings)?;
    let mut prefix_dims = Vec::new();
    let mut last = None;
    for k in prefixes(points.len()) {
        let ns = linalg::null_space(&stabilizer_matrix(model, &points[..k])?, RANK_TOL);
        prefix_dims.push((k, ns.basis.len()));
        last = Some(ns);
    }
    let ns = last.expect("at least one prefix");
    let dims: Vec<usize> = prefix_dims.iter().map(|(_, d)| *d).collect();
    if points.len() >= 2 * MIN_SAMPLES && dims.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::Instability(format!(
            "stabilizer dimension changes with the sample count: {prefix_dims:?}"
        )));
    }
    let basis: Vec<RMat> = ns.basis.iter().map(|v| combine(v.as_slice())).collect();
    let mut residual = 0.0f64;
    for x in &basis {
        residual = residual.max(stabilizer_defect(model, x, points)?);
    }
    Ok(StabilizerReport {
        dim: basis.len(),
        basis,
        residual,
        samples: points.len(),
        prefix_dims,
        warnings,
    })
}

/// Outcome of lifting a Killing field to `sp(2n_v)`.
#[derive(Debug, Clone)]
pub struct Lift {
    pub field: String,
    /// The minimum-norm solution of `δ_X N = ξ(N)` when it solves the
    /// system within [`TOL_LIFT`].
    pub generator: Option<RMat>,
    /// `‖M c - b‖ / max(‖b‖, 1)` for the least-squares solution.
    pub residual: f64,
}

/// Solves `δ_X N = ξ(N)` on the samples in the least-squares sense.
pub fn lift_killing_field(model: &Model, xi: &KillingField, points: &[Vec<f64>]) -> Result<Lift> {
    check_samples(points, &mut Vec::new())?;
    let m = stabilizer_matrix(model, points)?;
    let mut b = Vec::with_capacity(m.nrows());
    for p in points {
        push_upper(&mut b, &killing_derivative(model, xi, p)?);
    }
    let b = nalgebra::DVector::from_vec(b);
    let c = linalg::lstsq(&m, &b, RANK_TOL);
    let residual = (&m * &c - &b).norm() / b.norm().max(1.0);
    Ok(Lift {
        field: xi.name.clone(),
        generator: (residual <= TOL_LIFT).then(|| combine(c.as_slice())),
        residual,
    })
}

#[derive(Debug, Clone)]
pub struct UDualityReport {
    pub dim_u: usize,
    pub dim_stab: usize,
    /// Dimension of the projection of the U-duality algebra to the Killing
    /// fields.
    pub dim_iso_pr: usize,
    /// `dim_u - dim_stab - dim_iso_pr`, zero when the sequence
    /// `0 → stab → u → iso_pr → 0` is exact.
    pub exactness_gap: i64,
    pub lifts: Vec<Lift>,
    /// Basis of the U-duality algebra as pairs `(X, ξ-coefficients)`.
    pub basis: Vec<(RMat, Vec<f64>)>,
    pub warnings: Vec<String>,
}

/// The U-duality algebra of `model` on the samples.
pub fn uduality_algebra(model: &Model, points: &[Vec<f64>]) -> Result<UDualityReport> {
    let stab = stab_sp_algebra(model, points)?;
    let fields = killing_basis(&model.chart)?;
    let msp = stabilizer_matrix(model, points)?;
    let nsp = msp.ncols();
    let mut m = RMat::zeros(msp.nrows(), nsp + fields.len());
    m.view_mut((0, 0), (msp.nrows(), nsp)).copy_from(&msp);
    for (j, f) in fields.iter().enumerate() {
        let mut col = Vec::with_capacity(msp.nrows());
        for p in points {
            push_upper(&mut col, &killing_derivative(model, f, p)?);
        }
        for (r, v) in col.into_iter().enumerate() {
            m[(r, nsp + j)] = -v;
        }
    }
    let ns = linalg::null_space(&m, RANK_TOL);
    let dim_u = ns.basis.len();
    let xi_part = RMat::from_fn(fields.len(), dim_u, |i, j| ns.basis[j][nsp + i]);
    let dim_iso_pr = linalg::rank(&xi_part, RANK_TOL);
    let basis = ns
        .basis
        .iter()
        .map(|v| {
            (
                combine(&v.as_slice()[..nsp]),
                v.as_slice()[nsp..].to_vec(),
            )
        })
        .collect();
    let lifts = fields
        .iter()
        .map(|f| lift_killing_field(model, f, points))
        .collect::<Result<Vec<_>>>()?;
    Ok(UDualityReport {
        dim_u,
        dim_stab: stab.dim,
        dim_iso_pr,
        exactness_gap: dim_u as i64 - stab.dim as i64 - dim_iso_pr as i64,
        lifts,
        basis,
        warnings: stab.warnings,
    })
}

/// Moves a chart point of the upper half plane by `τ ↦ (c + dτ)/(a + bτ)`.
pub fn mobius_point(f: &SymplecticMatrix, p: &[f64]) -> Result<Vec<f64>> {
    if f.n() != 1 || p.len() != 2 {
        return Err(Error::Dimension("Möbius maps act on the upper half plane".into()));
    }
    let tau = SiegelPoint::new(CMat::from_element(1, 1, Complex64::new(p[0], p[1])))?;
    let t = fractional_action(f, &tau)?.matrix()[(0, 0)];
    Ok(vec![t.re, t.im])
}

/// Largest `|A·N(p) - N(f(p))| / max(1, |N(f(p))|)` over the samples.
pub fn check_uduality_pair(
    model: &Model,
    f: &SymplecticMatrix,
    a: &SymplecticMatrix,
    points: &[Vec<f64>],
) -> Result<f64> {
    if model.chart.kind != ChartKind::Poincare {
        return Err(Error::Invalid("duality pairs need the Poincaré chart".into()));
    }
    if a.n() != model.nv {
        return Err(Error::Dimension(format!(
            "A acts on rank {}, model has rank {}",
            a.n(),
            model.nv
        )));
    }
    let mut worst = 0.0f64;
    for p in points {
        let lhs = fractional_action(a, &model.period(p)?)?;
        let rhs = model.period(&mobius_point(f, p)?)?;
        let scale = max_abs_c(rhs.matrix()).max(1.0);
        worst = worst.max(max_abs_c(&(lhs.matrix() - rhs.matrix())) / scale);
    }
    Ok(worst)
}

/// Largest `|g·N(p) - N(p)| / max(1, |N(p)|)`: how far the group element
/// `g` is from fixing the period matrix on the samples.
pub fn fixed_point_defect(model: &Model, g: &SymplecticMatrix, points: &[Vec<f64>]) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in points {
        let n = model.period(p)?;
        let scale = max_abs_c(n.matrix()).max(1.0);
        worst = worst.max(max_abs_c(&(fractional_action(g, &n)?.matrix() - n.matrix())) / scale);
    }
    Ok(worst)
}

/// [`fixed_point_defect`] of `exp(tX)` for every basis element and `t`.
pub fn flow_defect(model: &Model, basis: &[RMat], ts: &[f64], points: &[Vec<f64>]) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in basis {
        for &t in ts {
            let g = SymplecticMatrix::new(linalg::expm(&(x * t)))?;
            worst = worst.max(fixed_point_defect(model, &g, points)?);
        }
    }
    Ok(worst)
}

/// Largest deviation of `(-1)·N` from `N`, the check that the center of
/// `Sp(2n_v)` fixes every point.
pub fn central_fixed_point_defect(model: &Model, points: &[Vec<f64>]) -> Result<f64> {
    let minus = SymplecticMatrix::new(-RMat::identity(2 * model.nv, 2 * model.nv))?;
    let mut worst = 0.0f64;
    for p in points {
        let n = model.period(p)?;
        worst = worst.max(max_abs_c(&(fractional_action(&minus, &n)?.matrix() - n.matrix())));
    }
    Ok(worst)
}
