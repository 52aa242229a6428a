//! Pointwise algebra of forms with values in the duality bundle.
//!
//! Tensors are components in a coordinate basis at a single point of a
//! four-dimensional Lorentzian manifold with signature `(-, +, +, +)`.
//! Two-forms are antisymmetric `4×4` matrices `w_{ab}`.  The Hodge star is
//! `(∗w)_{ab} = ½ √|g| ε_{abcd} w^{cd}` with `ε_{0123} = 1`, so that
//! `∗∗ = -1` on two-forms.  A bundle-valued two-form is a list of `2n`
//! two-forms `(V^1..V^{2n})`, the first `n` electric and the last `n`
//! magnetic.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::symplectic::{omega, EmPair, Taming};
use crate::{Error, RMat, Result};

pub type M4 = Matrix4<f64>;
pub type V4 = Vector4<f64>;

/// Components of the Minkowski metric.
pub fn eta() -> M4 {
    M4::from_diagonal(&V4::new(-1.0, 1.0, 1.0, 1.0))
}

/// A Lorentzian metric at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    pub g: M4,
    pub inv: M4,
    /// `√|det g|`.
    pub vol: f64,
}

impl Metric {
    pub fn new(g: M4) -> Result<Self> {
        let scale = g.amax().max(1.0);
        let asym = (g - g.transpose()).amax() / scale;
        if asym > 1e-12 {
            return Err(Error::domain("metric must be symmetric", asym, 1e-12));
        }
        let eig = g.symmetric_eigen().eigenvalues;
        let neg = eig.iter().filter(|&&x| x < 0.0).count();
        let small = eig.iter().fold(f64::INFINITY, |a, x| a.min(x.abs()));
        if neg != 1 || small <= 1e-12 * scale {
            return Err(Error::domain(
                "metric must have signature (-, +, +, +)",
                small,
                1e-12 * scale,
            ));
        }
        let inv = g.try_inverse().expect("non-degenerate");
        Ok(Metric {
            g,
            inv,
            vol: g.determinant().abs().sqrt(),
        })
    }

    pub fn minkowski() -> Self {
        Metric::new(eta()).expect("Minkowski metric")
    }

    /// `w^{ab}`.
    pub fn raise2(&self, w: &M4) -> M4 {
        self.inv * w * self.inv
    }
}

/// Sign of the permutation `(a, b, c, d)` of `(0, 1, 2, 3)`, zero when an
/// index repeats.
pub fn levi_civita(a: usize, b: usize, c: usize, d: usize) -> f64 {
    let p = [a, b, c, d];
    let mut sign = 1.0;
    for i in 0..4 {
        for j in i + 1..4 {
            if p[i] == p[j] {
                return 0.0;
            }
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

pub fn hodge(g: &Metric, w: &M4) -> M4 {
    let up = g.raise2(w);
    let mut out = M4::zeros();
    for a in 0..4 {
        for b in 0..4 {
            if a == b {
                continue;
            }
            let mut s = 0.0;
            for c in 0..4 {
                for d in 0..4 {
                    s += levi_civita(a, b, c, d) * up[(c, d)];
                }
            }
            out[(a, b)] = 0.5 * g.vol * s;
        }
    }
    out
}

/// Complex version of [`hodge`].
pub fn hodge_c(g: &Metric, w: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let re = hodge(g, &w.map(|z| z.re));
    let im = hodge(g, &w.map(|z| z.im));
    re.zip_map(&im, Complex64::new)
}

/// `(α, β)_g = ½ α_{ab} β^{ab}`.
pub fn pair2(g: &Metric, a: &M4, b: &M4) -> f64 {
    0.5 * a.component_mul(&g.raise2(b)).sum()
}

/// `(α, β)_g = g^{ab} α_a β_b`.
pub fn pair1(g: &Metric, a: &V4, b: &V4) -> f64 {
    (a.transpose() * g.inv * b)[(0, 0)]
}

/// `(ρ₁ ⊘_g ρ₂)_{ab} = ρ₁_{ac} g^{cd} ρ₂_{bd}`.
pub fn oslash_g(g: &Metric, r1: &M4, r2: &M4) -> M4 {
    r1 * g.inv * r2.transpose()
}

/// A two-form with values in `S = R^{2n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoFormBlock(pub Vec<M4>);

impl TwoFormBlock {
    pub fn zeros(rank: usize) -> Self {
        TwoFormBlock(vec![M4::zeros(); rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    /// Applies a linear map of `S` componentwise.
    pub fn apply(&self, a: &RMat) -> TwoFormBlock {
        TwoFormBlock(
            (0..a.nrows())
                .map(|i| {
                    self.0
                        .iter()
                        .enumerate()
                        .fold(M4::zeros(), |acc, (j, v)| acc + v * a[(i, j)])
                })
                .collect(),
        )
    }

    pub fn hodge(&self, g: &Metric) -> TwoFormBlock {
        TwoFormBlock(self.0.iter().map(|v| hodge(g, v)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |a, v| a.max(v.amax()))
    }

    /// `(F, G)` split of a rank `2n` block.
    pub fn electric(&self) -> &[M4] {
        &self.0[..self.0.len() / 2]
    }

    pub fn magnetic(&self) -> &[M4] {
        &self.0[self.0.len() / 2..]
    }
}

impl Add for TwoFormBlock {
    type Output = TwoFormBlock;
    fn add(self, o: TwoFormBlock) -> TwoFormBlock {
        TwoFormBlock(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for TwoFormBlock {
    type Output = TwoFormBlock;
    fn sub(self, o: TwoFormBlock) -> TwoFormBlock {
        TwoFormBlock(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for TwoFormBlock {
    type Output = TwoFormBlock;
    fn mul(self, s: f64) -> TwoFormBlock {
        TwoFormBlock(self.0.iter().map(|a| a * s).collect())
    }
}

impl Neg for TwoFormBlock {
    type Output = TwoFormBlock;
    fn neg(self) -> TwoFormBlock {
        self * -1.0
    }
}

fn check_rank(v: &TwoFormBlock, n: usize) -> Result<()> {
    if v.rank() != 2 * n {
        return Err(Error::Dimension(format!(
            "two-form block has {} components, bundle rank is {}",
            v.rank(),
            2 * n
        )));
    }
    Ok(())
}

/// `V = (F, R F - I ∗F)`, the twisted self-dual completion of the electric
/// field strengths `F`.
pub fn assemble_v(g: &Metric, em: &EmPair, f: &[M4]) -> Result<TwoFormBlock> {
    let n = em.n();
    if f.len() != n {
        return Err(Error::Dimension(format!("{} field strengths for rank {n}", f.len())));
    }
    let star: Vec<M4> = f.iter().map(|x| hodge(g, x)).collect();
    let mut out = f.to_vec();
    for l in 0..n {
        let mut gl = M4::zeros();
        for s in 0..n {
            gl += f[s] * em.r[(l, s)] - star[s] * em.i[(l, s)];
        }
        out.push(gl);
    }
    Ok(TwoFormBlock(out))
}

/// `⋆V = J(∗V)`.
pub fn twisted_star(g: &Metric, j: &Taming, v: &TwoFormBlock) -> Result<TwoFormBlock> {
    check_rank(v, j.n())?;
    Ok(v.hodge(g).apply(j.matrix()))
}

/// `(½(V + ⋆V), ½(V - ⋆V))`, the components in the `+1` and `-1`
/// eigenspaces of `⋆`.  Twisted self-dual fields (`∗V = -JV`) lie in the
/// `+1` eigenspace.
pub fn project_sd(g: &Metric, j: &Taming, v: &TwoFormBlock) -> Result<(TwoFormBlock, TwoFormBlock)> {
    let s = twisted_star(g, j, v)?;
    Ok(((v.clone() + s.clone()) * 0.5, (v.clone() - s) * 0.5))
}

/// `max |∗V + JV|`.
pub fn twisted_self_duality_defect(g: &Metric, j: &Taming, v: &TwoFormBlock) -> Result<f64> {
    check_rank(v, j.n())?;
    Ok((v.hodge(g) + v.apply(j.matrix())).max_abs())
}

/// `V⁺ = ½(V - i∗V)`, componentwise.
pub fn complexify_plus(g: &Metric, v: &[M4]) -> Vec<Matrix4<Complex64>> {
    v.iter()
        .map(|x| {
            let s = hodge(g, x);
            x.zip_map(&s, |a, b| Complex64::new(0.5 * a, -0.5 * b))
        })
        .collect()
}

/// Largest entry of `G⁺ - (R - iI) F⁺` for `V = (F, G)`.
pub fn cvcn_defect(g: &Metric, em: &EmPair, v: &TwoFormBlock) -> Result<f64> {
    check_rank(v, em.n())?;
    let fp = complexify_plus(g, v.electric());
    let gp = complexify_plus(g, v.magnetic());
    let n = em.n();
    let mut worst = 0.0f64;
    for l in 0..n {
        let mut rhs = Matrix4::<Complex64>::zeros();
        for s in 0..n {
            rhs += fp[s] * Complex64::new(em.r[(l, s)], -em.i[(l, s)]);
        }
        worst = worst.max((gp[l] - rhs).map(|z| z.norm()).max());
    }
    Ok(worst)
}

/// A bundle-valued form of degree one or two.
#[derive(Debug, Clone, PartialEq)]
pub enum BundleForm {
    One(Vec<V4>),
    Two(TwoFormBlock),
}

/// `Σ Q_{AB} (α^A, β^B)_g` with `Q = ΩJ`.
pub fn twisted_pairing(g: &Metric, j: &Taming, a: &BundleForm, b: &BundleForm) -> Result<f64> {
    let q = j.metric();
    let d = 2 * j.n();
    let mut s = 0.0;
    match (a, b) {
        (BundleForm::One(x), BundleForm::One(y)) if x.len() == d && y.len() == d => {
            for i in 0..d {
                for k in 0..d {
                    s += q[(i, k)] * pair1(g, &x[i], &y[k]);
                }
            }
        }
        (BundleForm::Two(x), BundleForm::Two(y)) => {
            check_rank(x, j.n())?;
            check_rank(y, j.n())?;
            for i in 0..d {
                for k in 0..d {
                    s += q[(i, k)] * pair2(g, &x.0[i], &y.0[k]);
                }
            }
        }
        (BundleForm::One(_), BundleForm::One(_)) => {
            return Err(Error::Dimension("one-form block does not match bundle rank".into()))
        }
        _ => return Err(Error::Dimension("forms of different degree cannot be paired".into())),
    }
    Ok(s)
}

/// `Σ Q_{AB} V^A ⊘_g W^B` with `Q = ΩJ`.
pub fn oslash_q(g: &Metric, j: &Taming, v: &TwoFormBlock, w: &TwoFormBlock) -> Result<M4> {
    check_rank(v, j.n())?;
    check_rank(w, j.n())?;
    let q = j.metric();
    let mut out = M4::zeros();
    for a in 0..v.rank() {
        for b in 0..w.rank() {
            if q[(a, b)] != 0.0 {
                out += oslash_g(g, &v.0[a], &w.0[b]) * q[(a, b)];
            }
        }
    }
    Ok(out)
}

/// Gauge stress `T_{ab} = ω(V_{ac}, (JV)_b{}^c)`.
pub fn stress_gauge(g: &Metric, j: &Taming, v: &TwoFormBlock) -> Result<M4> {
    check_rank(v, j.n())?;
    let jv = v.apply(j.matrix());
    let om = omega(j.n());
    let mut out = M4::zeros();
    for a in 0..v.rank() {
        for b in 0..v.rank() {
            if om[(a, b)] != 0.0 {
                out += oslash_g(g, &v.0[a], &jv.0[b]) * om[(a, b)];
            }
        }
    }
    Ok(out)
}

/// Gauge stress in terms of the electric field strengths,
/// `2 I F_{ac} F_b{}^c - ½ g I F_{cd} F^{cd}`.
pub fn stress_gauge_em(g: &Metric, em: &EmPair, f: &[M4]) -> Result<M4> {
    let n = em.n();
    if f.len() != n {
        return Err(Error::Dimension(format!("{} field strengths for rank {n}", f.len())));
    }
    let mut out = M4::zeros();
    for l in 0..n {
        for s in 0..n {
            let i = em.i[(l, s)];
            if i != 0.0 {
                out += (oslash_g(g, &f[l], &f[s]) * 2.0 - g.g * pair2(g, &f[l], &f[s])) * i;
            }
        }
    }
    Ok(out)
}

/// Scalar stress `𝒢_ij ∂_aφ^i ∂_bφ^j - ½ g 𝒢_ij ∂φ^i·∂φ^j`, with
/// `dphi[i]` the gradient of `φ^i`.
pub fn stress_scalar(g: &Metric, chart_metric: &RMat, dphi: &[V4]) -> Result<M4> {
    let ns = dphi.len();
    if chart_metric.shape() != (ns, ns) {
        return Err(Error::Dimension("scalar metric does not match the gradients".into()));
    }
    let mut out = M4::zeros();
    for i in 0..ns {
        for k in 0..ns {
            let gik = chart_metric[(i, k)];
            if gik != 0.0 {
                out += (dphi[i] * dphi[k].transpose() - g.g * (0.5 * pair1(g, &dphi[i], &dphi[k]))) * gik;
            }
        }
    }
    Ok(out)
}
