//! Real Killing spinors on four-dimensional Lorentzian frame patches.
//!
//! The Clifford module is `R^4` with the real matrices
//!
//! ```text
//! γ0 = ε ⊗ 1,  γ1 = σ1 ⊗ 1,  γ2 = σ3 ⊗ σ1,  γ3 = σ3 ⊗ σ3,   ε = [[0, 1], [-1, 0]]
//! ```
//!
//! satisfying `γ_a γ_b + γ_b γ_a = 2 η_ab` with `η = diag(-1, 1, 1, 1)`.
//! The spinor covariant derivative is `∇_μ ε = ∂_μ ε + ¼ ω_μab γ^a γ^b ε`
//! and a real Killing spinor satisfies `∇_μ ε = (λ/2) γ_μ ε` with
//! `γ_μ = e^a_μ γ_a`.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

use crate::eom::geometry;
use crate::eom::grid::{d1, d1_fourth, GridPatch};
use crate::field::{eta, Metric, M4, V4};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CliffordRep {
    /// `γ_a` with lower frame index.
    pub gamma: [M4; 4],
    pub eta: M4,
}

fn kron(a: [[f64; 2]; 2], b: [[f64; 2]; 2]) -> M4 {
    M4::from_fn(|i, j| a[i / 2][j / 2] * b[i % 2][j % 2])
}

impl CliffordRep {
    pub fn new() -> Self {
        let one = [[1.0, 0.0], [0.0, 1.0]];
        let eps = [[0.0, 1.0], [-1.0, 0.0]];
        let s1 = [[0.0, 1.0], [1.0, 0.0]];
        let s3 = [[1.0, 0.0], [0.0, -1.0]];
        CliffordRep {
            gamma: [kron(eps, one), kron(s1, one), kron(s3, s1), kron(s3, s3)],
            eta: eta(),
        }
    }

    /// `γ^a = η^ab γ_b`.
    pub fn upper(&self, a: usize) -> M4 {
        self.gamma[a] * self.eta[(a, a)]
    }

    /// `γ5 = γ0 γ1 γ2 γ3`, with `γ5² = -1`.
    pub fn gamma5(&self) -> M4 {
        self.gamma[0] * self.gamma[1] * self.gamma[2] * self.gamma[3]
    }

    /// `γ_ab = ½[γ_a, γ_b]`.
    pub fn gamma_ab(&self, a: usize, b: usize) -> M4 {
        (self.gamma[a] * self.gamma[b] - self.gamma[b] * self.gamma[a]) * 0.5
    }

    /// Matrix `C = γ0` of the bilinear form `B(ε, χ) = εᵀ C χ`, for which
    /// `C γ_a` is symmetric.
    pub fn majorana_form(&self) -> M4 {
        self.gamma[0]
    }

    /// `v^a γ_a`.
    pub fn clifford(&self, v: &V4) -> M4 {
        (0..4).fold(M4::zeros(), |acc, a| acc + self.gamma[a] * v[a])
    }
}

impl Default for CliffordRep {
    fn default() -> Self {
        Self::new()
    }
}

pub fn clifford_rep() -> CliffordRep {
    CliffordRep::new()
}

/// Orthonormal coframe `e^a_μ` (row `a`, column `μ`) sampled on a patch.
#[derive(Debug, Clone)]
pub struct FramePatch {
    pub patch: GridPatch,
    pub frame: Vec<M4>,
    /// Inverse frame `E_a^μ` (row `μ`, column `a`).
    pub inverse: Vec<M4>,
}

impl FramePatch {
    pub fn new(patch: GridPatch, frame: Vec<M4>) -> Result<Self> {
        if frame.len() != patch.len() {
            return Err(Error::Dimension("one frame per node is required".into()));
        }
        let inverse = frame
            .iter()
            .map(|e| {
                let sv = e.singular_values();
                if sv.min() <= 1e-12 * sv.max() {
                    return Err(Error::Pole {
                        what: "frame".into(),
                        at: "singular vierbein".into(),
                    });
                }
                Ok(e.try_inverse().expect("non-singular"))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FramePatch {
            patch,
            frame,
            inverse,
        })
    }

    pub fn from_fn(patch: GridPatch, e: impl Fn([f64; 4]) -> M4) -> Result<Self> {
        let frame = (0..patch.len()).map(|i| e(patch.coords(i))).collect();
        Self::new(patch, frame)
    }

    /// `g_μν = e^a_μ e^b_ν η_ab`.
    pub fn metric(&self) -> Vec<M4> {
        let eta = eta();
        self.frame.iter().map(|e| e.transpose() * eta * e).collect()
    }
}

/// Frame `e^a_μ = Ω(x) δ^a_μ` of a conformally flat metric.
pub fn conformal_frame(patch: GridPatch, omega: impl Fn([f64; 4]) -> f64) -> Result<FramePatch> {
    FramePatch::from_fn(patch, |x| M4::identity() * omega(x))
}

/// Default patch of the Poincaré chart of AdS4, away from `z = x³ = 0`.
pub fn ads_patch(points: usize) -> Result<GridPatch> {
    GridPatch::new([0.0, 0.0, 0.0, 1.0], [0.5, 0.5, 0.5, 1.5], [points; 4])
}

/// Builtin frames: `minkowski` and `ads4-poincare`, the latter with
/// `e^a_μ = δ^a_μ / (λ x³)`.
pub fn builtin_frame(name: &str, lambda: f64, points: usize) -> Result<FramePatch> {
    match name {
        "minkowski" => {
            let patch = GridPatch::new([0.0; 4], [0.5; 4], [points; 4])?;
            FramePatch::from_fn(patch, |_| M4::identity())
        }
        "ads4-poincare" => {
            if !(lambda > 0.0) {
                return Err(Error::Invalid("the AdS4 frame needs λ > 0".into()));
            }
            conformal_frame(ads_patch(points)?, |x| 1.0 / (lambda * x[3]))
        }
        _ => Err(Error::NotFound {
            kind: "frame",
            name: name.to_string(),
        }),
    }
}

/// Christoffel symbols of the frame metric at every node from fourth-order
/// differences.
fn grid_christoffel(patch: &GridPatch, g: &[M4]) -> Vec<geometry::Christoffel> {
    (0..patch.len())
        .map(|i| {
            let dg: [M4; 4] = std::array::from_fn(|a| d1_fourth(patch, g, i, a));
            geometry::christoffel(&g[i].try_inverse().expect("metric is invertible"), &dg)
        })
        .collect()
}

/// Spin connection `ω_μab` at every node, stored as `[μ][(a, b)]`, from
/// fourth-order differences of the frame:
/// `ω_μ^a_b = e^a_ν (∂_μ E_b^ν + Γ^ν_μλ E_b^λ)`.
pub fn spin_connection(fr: &FramePatch) -> Result<Vec<[M4; 4]>> {
    let p = &fr.patch;
    if p.n.iter().any(|&n| n < 5) {
        return Err(Error::Invalid("the spin connection needs at least 5 points per axis".into()));
    }
    let g = fr.metric();
    let gamma = grid_christoffel(p, &g);
    let eta = eta();
    Ok((0..p.len())
        .map(|i| {
            std::array::from_fn(|mu| {
                let de = d1_fourth(p, &fr.inverse, i, mu);
                let mut cov = de;
                for nu in 0..4 {
                    for b in 0..4 {
                        let mut s = 0.0;
                        for l in 0..4 {
                            s += gamma[i][nu][(mu, l)] * fr.inverse[i][(l, b)];
                        }
                        cov[(nu, b)] += s;
                    }
                }
                eta * fr.frame[i] * cov
            })
        })
        .collect::<Vec<_>>())
}

/// `K_μ` with `dε/dx^μ = K_μ ε` for a Killing spinor of constant `λ`.
pub fn killing_connection(rep: &CliffordRep, omega: &[M4; 4], e: &M4, lambda: f64) -> [M4; 4] {
    std::array::from_fn(|mu| {
        let mut k = M4::zeros();
        for a in 0..4 {
            for b in 0..4 {
                if a != b && omega[mu][(a, b)] != 0.0 {
                    k -= rep.upper(a) * rep.upper(b) * (0.25 * omega[mu][(a, b)]);
                }
            }
            k += rep.gamma[a] * (0.5 * lambda * e[(a, mu)]);
        }
        k
    })
}

/// A real spinor per node.
#[derive(Debug, Clone)]
pub struct SpinorField {
    pub values: Vec<V4>,
    pub lambda: f64,
}

#[derive(Debug, Clone)]
pub struct KillingResidual {
    /// Nodes one step inside the patch.
    pub nodes: Vec<usize>,
    /// `|∇_μ ε - (λ/2) γ_μ ε|_∞` per node and direction.
    pub per_node: Vec<[f64; 4]>,
    pub max: f64,
}

pub fn killing_residual(fr: &FramePatch, eps: &SpinorField) -> Result<KillingResidual> {
    let rep = clifford_rep();
    let omega = spin_connection(fr)?;
    let nodes = fr.patch.interior(1);
    let mut per_node = Vec::with_capacity(nodes.len());
    let mut max = 0.0f64;
    for &i in &nodes {
        let k = killing_connection(&rep, &omega[i], &fr.frame[i], eps.lambda);
        let r: [f64; 4] = std::array::from_fn(|mu| {
            (d1(&fr.patch, &eps.values, i, mu) - k[mu] * eps.values[i]).amax()
        });
        max = r.iter().fold(max, |a, x| a.max(*x));
        per_node.push(r);
    }
    Ok(KillingResidual {
        nodes,
        per_node,
        max,
    })
}

/// Observed order of the Killing residual between a grid and its uniform
/// refinement (`2n - 1` points per axis over the same box), taken over the
/// physical nodes the two grids share.  Returns `(coarse max, fine max,
/// order)`.
pub fn refinement_order(
    coarse: (&GridPatch, &KillingResidual),
    fine: (&GridPatch, &KillingResidual),
) -> Result<(f64, f64, f64)> {
    let (pc, rc) = coarse;
    let (pf, rf) = fine;
    let nested = (0..4).all(|a| {
        pf.n[a] == 2 * pc.n[a] - 1 && pf.lo[a] == pc.lo[a] && pf.hi[a] == pc.hi[a]
    });
    if !nested {
        return Err(Error::Invalid("the fine grid is not a uniform refinement of the coarse one".into()));
    }
    let row_max = |r: &[f64; 4]| r.iter().copied().fold(0.0, f64::max);
    let fine_at: std::collections::HashMap<usize, usize> =
        rf.nodes.iter().enumerate().map(|(k, &n)| (n, k)).collect();
    let (mut cmax, mut fmax) = (0.0f64, 0.0f64);
    for (k, &node) in rc.nodes.iter().enumerate() {
        let m = pc.multi(node);
        let fi = pf.index(m.map(|x| 2 * x));
        let j = fine_at[&fi];
        cmax = cmax.max(row_max(&rc.per_node[k]));
        fmax = fmax.max(row_max(&rf.per_node[j]));
    }
    Ok((cmax, fmax, (cmax / fmax).log2()))
}

#[derive(Debug, Clone)]
pub struct KillingIntegration {
    pub field: SpinorField,
    /// `|ε_A - ε_B|_∞` at the far corner for the axis orders `(0, 1, 2, 3)`
    /// and `(3, 2, 1, 0)`.
    pub path_defect: f64,
}

/// Lagrange weights of the four nodes `start..start+4` at `t`.
fn lagrange4(start: isize, t: f64) -> [f64; 4] {
    let x: [f64; 4] = std::array::from_fn(|k| (start + k as isize) as f64);
    std::array::from_fn(|k| {
        (0..4)
            .filter(|&j| j != k)
            .map(|j| (t - x[j]) / (x[k] - x[j]))
            .product()
    })
}

fn sweep(fr: &FramePatch, conn: &[[M4; 4]], eps0: V4, order: [usize; 4]) -> Vec<V4> {
    let p = &fr.patch;
    let mut out = vec![V4::zeros(); p.len()];
    out[0] = eps0;
    for (s, &axis) in order.iter().enumerate() {
        let n = p.n[axis] as isize;
        let h = p.spacing(axis);
        let starts: Vec<usize> = (0..p.len())
            .filter(|&i| {
                let m = p.multi(i);
                m[axis] == 0 && order[s + 1..].iter().all(|&b| m[b] == 0)
            })
            .collect();
        for start in starts {
            for k in 0..n - 1 {
                let here = p.step(start, axis, k);
                let next = p.step(start, axis, k + 1);
                let w0 = (k - 1).clamp(0, n - 4);
                let wt = lagrange4(w0, k as f64 + 0.5);
                let kmid = (0..4).fold(M4::zeros(), |acc, j| {
                    acc + conn[p.step(start, axis, w0 + j as isize)][axis] * wt[j]
                });
                let k0 = conn[here][axis];
                let k1 = conn[next][axis];
                let y = out[here];
                let a = k0 * y;
                let b = kmid * (y + a * (0.5 * h));
                let c = kmid * (y + b * (0.5 * h));
                let d = k1 * (y + c * h);
                out[next] = y + (a + b * 2.0 + c * 2.0 + d) * (h / 6.0);
            }
        }
    }
    out
}

/// Transports `eps0` from the first node along coordinate lines with
/// fourth-order Runge–Kutta steps.
pub fn integrate_killing(fr: &FramePatch, lambda: f64, eps0: V4) -> Result<KillingIntegration> {
    if fr.patch.n.iter().any(|&n| n < 5) {
        return Err(Error::Invalid("integration needs at least 5 points per axis".into()));
    }
    let rep = clifford_rep();
    let omega = spin_connection(fr)?;
    let conn: Vec<[M4; 4]> = (0..fr.patch.len())
        .map(|i| killing_connection(&rep, &omega[i], &fr.frame[i], lambda))
        .collect();
    let values = sweep(fr, &conn, eps0, [0, 1, 2, 3]);
    let other = sweep(fr, &conn, eps0, [3, 2, 1, 0]);
    let last = fr.patch.len() - 1;
    Ok(KillingIntegration {
        path_defect: (values[last] - other[last]).amax(),
        field: SpinorField { values, lambda },
    })
}

/// Bilinears `u_μ = B(ε, γ_μ ε)` and a unit `l` with `B(ε, γ_μν ε) = u_μ l_ν - l_μ u_ν`.
///
/// `l` is fixed modulo `u` by `l = -Φ(·, w) / u(w)` with `w^ν = u_ν`.
pub fn bilinears(fr: &FramePatch, eps: &SpinorField) -> (Vec<V4>, Vec<V4>) {
    let rep = clifford_rep();
    let c = rep.majorana_form();
    let mut us = Vec::with_capacity(eps.values.len());
    let mut ls = Vec::with_capacity(eps.values.len());
    for (i, e) in eps.values.iter().enumerate() {
        let gmu: [M4; 4] = std::array::from_fn(|mu| {
            (0..4).fold(M4::zeros(), |acc, a| acc + rep.gamma[a] * fr.frame[i][(a, mu)])
        });
        let u = V4::from_fn(|mu, _| (e.transpose() * c * gmu[mu] * e)[(0, 0)]);
        let phi = M4::from_fn(|m, n| {
            let g = (gmu[m] * gmu[n] - gmu[n] * gmu[m]) * 0.5;
            (e.transpose() * c * g * e)[(0, 0)]
        });
        let uw = u.dot(&u);
        let l = if uw > 0.0 { -(phi * u) / uw } else { V4::zeros() };
        us.push(u);
        ls.push(l);
    }
    (us, ls)
}

#[derive(Debug, Clone)]
pub struct BilinearReport {
    /// `max |∇u - λ(u⊗l - l⊗u)|`.
    pub nabla_u: f64,
    /// `max |∇l - λ(l⊗l - g) - κ⊗u|`.
    pub nabla_l: f64,
    pub null: f64,
    pub unit: f64,
    pub orthogonal: f64,
    /// `max |∇_μ u_ν + ∇_ν u_μ|`.
    pub killing: f64,
    /// `max |dκ|` for a fitted `κ`, reported only.
    pub dkappa: Option<f64>,
    /// `u` is not identically zero.
    pub nontrivial: bool,
}

impl BilinearReport {
    pub fn worst(&self) -> f64 {
        [self.nabla_u, self.nabla_l, self.null, self.unit, self.orthogonal, self.killing]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Residuals of `∇u = λ u∧l`, `∇l = κ⊗u + λ(l⊗l - g)` and of the algebraic
/// constraints, on the nodes one step inside the patch.  With `kappa`
/// absent, `κ` is fitted per node by projecting onto `u`.
pub fn verify_bilinear_system(
    patch: &GridPatch,
    g: &[M4],
    u: &[V4],
    l: &[V4],
    kappa: Option<&[V4]>,
    lambda: f64,
) -> Result<BilinearReport> {
    let nodes = patch.interior(1);
    let mut rep = BilinearReport {
        nabla_u: 0.0,
        nabla_l: 0.0,
        null: 0.0,
        unit: 0.0,
        orthogonal: 0.0,
        killing: 0.0,
        dkappa: None,
        nontrivial: u.iter().any(|x| x.amax() > 1e-12),
    };
    let mut fitted = vec![V4::zeros(); patch.len()];
    for &i in &nodes {
        let metric = Metric::new(g[i])?;
        let dg: [M4; 4] = std::array::from_fn(|a| d1(patch, g, i, a));
        let gam = geometry::christoffel(&metric.inv, &dg);
        let cov = |f: &[V4]| {
            let d: [V4; 4] = std::array::from_fn(|a| d1(patch, f, i, a));
            M4::from_fn(|m, n| {
                let mut s = d[m][n];
                for r in 0..4 {
                    s -= gam[r][(m, n)] * f[i][r];
                }
                s
            })
        };
        let (ui, li) = (u[i], l[i]);
        let du = cov(u);
        let dl = cov(l);
        let wedge = ui * li.transpose() - li * ui.transpose();
        rep.nabla_u = rep.nabla_u.max((du - wedge * lambda).amax());
        let m = dl - (li * li.transpose() - g[i]) * lambda;
        let k = match kappa {
            Some(k) => k[i],
            None => {
                let uu = ui.dot(&ui);
                if uu > 0.0 {
                    m * ui / uu
                } else {
                    V4::zeros()
                }
            }
        };
        fitted[i] = k;
        rep.nabla_l = rep.nabla_l.max((m - k * ui.transpose()).amax());
        let dot = |a: &V4, b: &V4| (a.transpose() * metric.inv * b)[(0, 0)];
        rep.null = rep.null.max(dot(&ui, &ui).abs());
        rep.unit = rep.unit.max((dot(&li, &li) - 1.0).abs());
        rep.orthogonal = rep.orthogonal.max(dot(&ui, &li).abs());
        rep.killing = rep.killing.max((du + du.transpose()).amax());
    }
    if kappa.is_none() {
        let inner = patch.interior(2);
        if !inner.is_empty() {
            let mut worst = 0.0f64;
            for &i in &inner {
                let d: [V4; 4] = std::array::from_fn(|a| d1(patch, &fitted, i, a));
                for a in 0..4 {
                    for b in 0..4 {
                        worst = worst.max((d[a][b] - d[b][a]).abs());
                    }
                }
            }
            rep.dkappa = Some(worst);
        }
    }
    Ok(rep)
}

/// Outcome of one sign choice in [`bilinear_search`].
#[derive(Debug, Clone)]
pub struct SignChoice {
    pub l_sign: f64,
    pub lambda_sign: f64,
    pub report: BilinearReport,
}

/// Evaluates the first-order system for `(±l, ±λ)` and returns all four
/// choices, the best first.
pub fn bilinear_search(fr: &FramePatch, eps: &SpinorField) -> Result<Vec<SignChoice>> {
    let g = fr.metric();
    let (u, l) = bilinears(fr, eps);
    let mut out = Vec::new();
    for l_sign in [1.0, -1.0] {
        let ls: Vec<V4> = l.iter().map(|x| x * l_sign).collect();
        for lambda_sign in [1.0, -1.0] {
            let report = verify_bilinear_system(&fr.patch, &g, &u, &ls, None, lambda_sign * eps.lambda)?;
            out.push(SignChoice {
                l_sign,
                lambda_sign,
                report,
            });
        }
    }
    out.sort_by(|a, b| a.report.worst().total_cmp(&b.report.worst()));
    Ok(out)
}

pub type C4 = Vector4<Complex64>;

fn complexify(m: &M4) -> Matrix4<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Chiral projections `P± = ½(1 ± iγ5)` onto the eigenspaces of the
/// complex volume element `iγ5`, which squares to one.
pub fn chiral_projectors(rep: &CliffordRep) -> (Matrix4<Complex64>, Matrix4<Complex64>) {
    let g5 = complexify(&rep.gamma5()) * Complex64::new(0.0, 1.0);
    let id = Matrix4::<Complex64>::identity();
    let half = Complex64::new(0.5, 0.0);
    ((id - g5) * half, (id + g5) * half)
}

/// `T_w(ε₁ ⊕ ε₂)(v) = γ(v)(w ε₁ + w̄ ε₂)` for `ε₁` in the `-1` and `ε₂` in the
/// `+1` eigenspace of `iγ5`.
pub fn chiral_operator(rep: &CliffordRep, w: Complex64, eps1: &C4, eps2: &C4, v: &V4) -> C4 {
    complexify(&rep.clifford(v)) * (eps1 * w + eps2 * w.conj())
}

#[derive(Debug, Clone)]
pub struct ChiralCheck {
    pub warnings: Vec<String>,
    /// `|T_w(αε) - α T_w(ε)|` for a fixed complex `α`.
    pub linearity: f64,
    /// `|T_w(𝔠ε) - 𝔠 T_w(ε)|` with `𝔠` complex conjugation.
    pub conjugation: f64,
    /// For real `w` and the real part of `ε`:
    /// `|T_w(ε)(v) - (λ/2) γ(v) ε|` with `λ = 2w`.
    pub real_reduction: Option<f64>,
}

/// Algebraic checks of `T_w` over the frame vectors.  Inputs that are not
/// chiral are projected first, with a warning.
pub fn chiral_operator_check(w: Complex64, eps1: &C4, eps2: &C4) -> ChiralCheck {
    let rep = clifford_rep();
    let (pm, pp) = chiral_projectors(&rep);
    let mut warnings = Vec::new();
    let e1 = pm * eps1;
    let e2 = pp * eps2;
    if (e1 - eps1).camax() > 1e-12 || (e2 - eps2).camax() > 1e-12 {
        warnings.push("input is not chiral; projected onto the chiral halves".into());
    }
    let split = |e: &C4| (pm * e, pp * e);
    let alpha = Complex64::new(0.3, -1.7);
    let mut linearity = 0.0f64;
    let mut conjugation = 0.0f64;
    let mut real_reduction = (w.im == 0.0).then_some(0.0f64);
    let total = e1 + e2;
    let real = total.map(|z| Complex64::new(z.re, 0.0));
    let (r1, r2) = split(&real);
    for a in 0..4 {
        let v = V4::from_fn(|i, _| if i == a { 1.0 } else { 0.0 });
        let t = chiral_operator(&rep, w, &e1, &e2, &v);
        let ta = chiral_operator(&rep, w, &(e1 * alpha), &(e2 * alpha), &v);
        linearity = linearity.max((ta - t * alpha).camax());
        let (c1, c2) = split(&total.map(|z| z.conj()));
        let tc = chiral_operator(&rep, w, &c1, &c2, &v);
        conjugation = conjugation.max((tc - t.map(|z| z.conj())).camax());
        if let Some(r) = real_reduction.as_mut() {
            let lam = 2.0 * w.re;
            let tr = chiral_operator(&rep, w, &r1, &r2, &v);
            let expect = complexify(&rep.gamma[a]) * real * Complex64::new(lam / 2.0, 0.0);
            *r = r.max((tr - expect).camax());
        }
    }
    ChiralCheck {
        warnings,
        linearity,
        conjugation,
        real_reduction,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clifford_relations() {
        let rep = clifford_rep();
        for a in 0..4 {
            assert_eq!(rep.gamma[a].trace(), 0.0);
            for b in 0..4 {
                let ac = rep.gamma[a] * rep.gamma[b] + rep.gamma[b] * rep.gamma[a];
                assert_eq!(ac, M4::identity() * (2.0 * rep.eta[(a, b)]));
            }
        }
        let g5 = rep.gamma5();
        assert_eq!(g5 * g5, -M4::identity());
        let c = rep.majorana_form();
        for a in 0..4 {
            let s = c * rep.gamma[a];
            assert_eq!(s, s.transpose());
        }
    }

    #[test]
    fn lorentz_generators_close() {
        // [γ_ab, γ_cd] = 2(η_bc γ_ad - η_ac γ_bd - η_bd γ_ac + η_ad γ_bc).
        let r = clifford_rep();
        let e = r.eta;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let lhs = r.gamma_ab(a, b) * r.gamma_ab(c, d) - r.gamma_ab(c, d) * r.gamma_ab(a, b);
                        let rhs = (r.gamma_ab(a, d) * e[(b, c)] - r.gamma_ab(b, d) * e[(a, c)]
                            - r.gamma_ab(a, c) * e[(b, d)]
                            + r.gamma_ab(b, c) * e[(a, d)])
                            * 2.0;
                        assert!((lhs - rhs).amax() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn minkowski_constant_spinor_is_parallel() {
        let fr = builtin_frame("minkowski", 0.0, 5).unwrap();
        assert!(spin_connection(&fr).unwrap().iter().all(|w| w.iter().all(|m| *m == M4::zeros())));
        let eps = SpinorField {
            values: vec![V4::new(1.0, -0.5, 0.25, 2.0); fr.patch.len()],
            lambda: 0.0,
        };
        assert_eq!(killing_residual(&fr, &eps).unwrap().max, 0.0);
        let int = integrate_killing(&fr, 0.0, V4::new(1.0, 2.0, 3.0, 4.0)).unwrap();
        assert_eq!(int.path_defect, 0.0);
    }

    #[test]
    fn conformal_connection_matches_formula() {
        // ω_μab = η_aμ ∂_b ln Ω - η_μb ∂_a ln Ω.
        let patch = GridPatch::centered([0.1, 0.2, 0.3, 0.4], 0.01, 5).unwrap();
        let om = |x: [f64; 4]| (0.3 * x[0] - 0.2 * x[1] * x[1] + 0.5 * x[3]).exp();
        let dln = |x: [f64; 4]| V4::new(0.3, -0.4 * x[1], 0.0, 0.5);
        let fr = conformal_frame(patch.clone(), om).unwrap();
        let w = spin_connection(&fr).unwrap();
        let e = eta();
        for i in patch.interior(1) {
            let d = dln(patch.coords(i));
            for mu in 0..4 {
                let expect = M4::from_fn(|a, b| e[(a, mu)] * d[b] - e[(mu, b)] * d[a]);
                assert!((w[i][mu] - expect).amax() < 1e-8, "{}", (w[i][mu] - expect).amax());
            }
        }
    }

    #[test]
    fn chiral_operator_properties() {
        let rep = clifford_rep();
        let (pm, pp) = chiral_projectors(&rep);
        let raw = C4::new(
            Complex64::new(1.0, 0.2),
            Complex64::new(-0.3, 0.0),
            Complex64::new(0.5, -1.0),
            Complex64::new(0.0, 0.7),
        );
        let (e1, e2) = (pm * raw, pp * raw);
        let c = chiral_operator_check(Complex64::new(0.4, 0.9), &e1, &e2);
        assert!(c.warnings.is_empty());
        assert!(c.linearity < 1e-14 && c.conjugation < 1e-14);
        assert!(c.real_reduction.is_none());
        let c = chiral_operator_check(Complex64::new(0.6, 0.0), &raw, &raw);
        assert_eq!(c.warnings.len(), 1);
        assert!(c.real_reduction.unwrap() < 1e-14);
        let zero = chiral_operator(&rep, Complex64::new(0.0, 0.0), &e1, &e2, &V4::new(1.0, 2.0, 3.0, 4.0));
        assert_eq!(zero.camax(), 0.0);
    }

    #[test]
    fn zero_u_is_flagged_trivial() {
        let patch = GridPatch::centered([0.0; 4], 0.1, 4).unwrap();
        let g = vec![eta(); patch.len()];
        let u = vec![V4::zeros(); patch.len()];
        let l = vec![V4::new(0.0, 1.0, 0.0, 0.0); patch.len()];
        let r = verify_bilinear_system(&patch, &g, &u, &l, Some(&u), 0.0).unwrap();
        assert!(!r.nontrivial);
        assert_eq!(r.nabla_u, 0.0);
        assert_eq!(r.nabla_l, 0.0);
        let lp: Vec<V4> = l.iter().map(|x| x * 1.1f64.sqrt()).collect();
        let r = verify_bilinear_system(&patch, &g, &u, &lp, Some(&u), 0.0).unwrap();
        assert!((r.unit - 0.1).abs() < 1e-12);
    }
}
