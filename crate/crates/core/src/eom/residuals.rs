//! Residuals of the field equations at the nodes of a patch.
//!
//! At each node the residuals are
//!
//! * Einstein: `G_ab - T(𝒢)_ab - T(J)_ab`;
//! * scalar, local form:
//!   `∇_a(𝒢_ik ∂^aφ^i) - ½∂_k𝒢_ij ∂φ^i·∂φ^j - ½∂_kR F∗F - ½∂_kI F F`;
//! * scalar, bundle form: `𝒢_ik τ^i + ½(∗V, Ψ_k V)_{g,Q}` with `τ` the
//!   tension of `φ` and `Ψ_k = ∂_k J`;
//! * Maxwell: `dV`, reported through the components `(dV)_{abc}`,
//!   `a < b < c`.
//!
//! Derivatives of `g`, `φ` and `V` are central differences; derivatives of
//! the period matrix along the scalar manifold are exact.

use nalgebra::DVector;
use num_complex::Complex64;

use super::geometry::{self, Christoffel};
use super::grid::{d1, d2, GridPatch};
use super::transport::ChartMap;
use crate::field::{self, BundleForm, Metric, TwoFormBlock, M4, V4};
use crate::linalg;
use crate::model::Model;
use crate::symplectic::{self, EmPair, SymplecticMatrix, Taming};
use crate::{Error, RMat, Result};

/// Residuals are evaluated this many steps away from every face.
pub const STENCIL_MARGIN: usize = 2;
/// Smallest patch with at least three residual nodes per axis.
pub const MIN_POINTS: usize = 2 * STENCIL_MARGIN + 3;

/// A model together with a duality pair it has been transported along.
#[derive(Debug, Clone)]
pub struct Theory {
    pub model: Model,
    pub map: ChartMap,
    pub a: SymplecticMatrix,
}

/// Scalar-dependent data of a theory at one chart point.
#[derive(Debug, Clone)]
pub struct LocalData {
    pub em: EmPair,
    /// `(∂_k R, ∂_k I)`.
    pub d_em: Vec<(RMat, RMat)>,
    pub j: Taming,
    /// `Ψ_k = ∂_k J`.
    pub psi: Vec<RMat>,
    pub metric: RMat,
    pub metric_derivatives: Vec<RMat>,
    pub christoffel: Vec<RMat>,
}

impl Theory {
    pub fn new(model: Model) -> Self {
        let n = model.nv;
        Theory {
            model,
            map: ChartMap::Identity,
            a: SymplecticMatrix::identity(n),
        }
    }

    pub fn nv(&self) -> usize {
        self.model.nv
    }

    /// The theory `(f_*𝒢, A J(f⁻¹·) A⁻¹)`.
    pub fn pushforward(&self, f: &ChartMap, a: &SymplecticMatrix) -> Result<Theory> {
        f.check_isometry(&self.model.chart)?;
        if a.n() != self.nv() {
            return Err(Error::Dimension("A does not match the model rank".into()));
        }
        Ok(Theory {
            model: self.model.clone(),
            map: f.compose(&self.map)?,
            a: a.compose(&self.a),
        })
    }

    /// Scalar data at the chart point `q`.  The period matrix is
    /// `A·N(f⁻¹q)`; its derivative follows from
    /// `d(A·τ) = (d - (A·τ) b) dτ (a + bτ)⁻¹`.
    pub fn local(&self, q: &[f64]) -> Result<LocalData> {
        let chart = &self.model.chart;
        let inv = self.map.inverse();
        let p = inv.apply(q)?;
        let dinv = inv.jacobian(q)?;
        let ns = chart.dim();
        let n0 = self.model.period(&p)?;
        let n1 = symplectic::fractional_action(&self.a, &n0)?;
        let (_, b, _, d) = self.a.blocks();
        let (a_blk, ..) = self.a.blocks();
        let c = |m: &RMat| linalg::to_complex(m);
        let left = c(&d) - n1.matrix() * c(&b);
        let right = linalg::inverse_c(&(c(&a_blk) + c(&b) * n0.matrix()), "a + bN")?;
        let dn0: Vec<_> = (0..ns)
            .map(|l| self.model.period_derivative(&p, l))
            .collect::<Result<_>>()?;
        let j0 = self.model.taming(&p)?;
        let dj0: Vec<RMat> = (0..ns)
            .map(|l| self.model.taming_derivative(&p, l))
            .collect::<Result<_>>()?;
        let ainv = self.a.inverse();
        let mut d_em = Vec::with_capacity(ns);
        let mut psi = Vec::with_capacity(ns);
        for k in 0..ns {
            let mut dn = crate::CMat::zeros(self.nv(), self.nv());
            let mut dj = RMat::zeros(2 * self.nv(), 2 * self.nv());
            for l in 0..ns {
                let w = dinv[(l, k)];
                if w != 0.0 {
                    dn += &dn0[l] * Complex64::new(w, 0.0);
                    dj += &dj0[l] * w;
                }
            }
            let dn1 = &left * dn * &right;
            d_em.push((linalg::re(&dn1), linalg::im(&dn1)));
            psi.push(self.a.matrix() * dj * ainv.matrix());
        }
        Ok(LocalData {
            em: EmPair::new(n1.re(), n1.im())?,
            d_em,
            j: Taming::from_matrix_unchecked(self.a.matrix() * j0.matrix() * ainv.matrix()),
            psi,
            metric: chart.metric(q)?,
            metric_derivatives: chart.metric_derivatives(q)?,
            christoffel: chart.christoffel(q)?,
        })
    }
}

/// Sampled fields on a patch.
#[derive(Debug, Clone)]
pub struct FieldConfiguration {
    pub patch: GridPatch,
    pub metric: Vec<M4>,
    pub phi: Vec<DVector<f64>>,
    pub v: Vec<TwoFormBlock>,
    pub theory: Theory,
}

impl FieldConfiguration {
    /// Samples `g`, `φ` and the electric field strengths `F`, completing `F`
    /// to the twisted self-dual `V = (F, RF - I∗F)`.
    pub fn from_fn(
        patch: GridPatch,
        theory: Theory,
        metric: impl Fn([f64; 4]) -> M4,
        phi: impl Fn([f64; 4]) -> Vec<f64>,
        electric: impl Fn([f64; 4]) -> Vec<M4>,
    ) -> Result<Self> {
        let mut gs = Vec::with_capacity(patch.len());
        let mut ps = Vec::with_capacity(patch.len());
        let mut vs = Vec::with_capacity(patch.len());
        for i in 0..patch.len() {
            let x = patch.coords(i);
            let g = Metric::new(metric(x))?;
            let p = phi(x);
            let local = theory.local(&p)?;
            vs.push(field::assemble_v(&g, &local.em, &electric(x))?);
            gs.push(g.g);
            ps.push(DVector::from_vec(p));
        }
        Ok(FieldConfiguration {
            patch,
            metric: gs,
            phi: ps,
            v: vs,
            theory,
        })
    }

    pub fn with_theory(&self, theory: Theory) -> Self {
        FieldConfiguration {
            theory,
            ..self.clone()
        }
    }
}

/// Residuals at one node.
#[derive(Debug, Clone)]
pub struct NodeResidual {
    pub einstein: M4,
    pub scalar_local: DVector<f64>,
    pub scalar_global: DVector<f64>,
    /// `(dV^A)_{abc}` for `(a, b, c)` in `TRIPLES`.
    pub maxwell: Vec<[f64; 4]>,
}

pub const TRIPLES: [(usize, usize, usize); 4] = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)];

/// Jet of the fields at a node: values and coordinate derivatives.
#[derive(Debug, Clone)]
pub struct Jet {
    pub g: M4,
    pub dg: [M4; 4],
    pub ddg: [[M4; 4]; 4],
    pub phi: Vec<f64>,
    /// `dphi[a][i] = ∂_a φ^i`.
    pub dphi: [Vec<f64>; 4],
    pub ddphi: [[Vec<f64>; 4]; 4],
    pub v: TwoFormBlock,
    pub dv: [TwoFormBlock; 4],
}

fn box_op(ginv: &M4, gamma: &Christoffel, dphi: &[Vec<f64>; 4], ddphi: &[[Vec<f64>; 4]; 4], i: usize) -> f64 {
    let mut s = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            let mut t = ddphi[a][b][i];
            for c in 0..4 {
                t -= gamma[c][(a, b)] * dphi[c][i];
            }
            s += ginv[(a, b)] * t;
        }
    }
    s
}

/// Residuals from the jet of the fields at a node.
pub fn node_residual(theory: &Theory, jet: &Jet) -> Result<NodeResidual> {
    let metric = Metric::new(jet.g)?;
    let curv = geometry::curvature(&jet.g, &jet.dg, &jet.ddg)?;
    let local = theory.local(&jet.phi)?;
    let ns = jet.phi.len();
    let nv = theory.nv();
    if jet.v.rank() != 2 * nv {
        return Err(Error::Dimension("two-form block does not match the model".into()));
    }
    let grads: Vec<V4> = (0..ns)
        .map(|i| V4::from_fn(|a, _| jet.dphi[a][i]))
        .collect();
    let dot = |i: usize, j: usize| field::pair1(&metric, &grads[i], &grads[j]);
    let f = jet.v.electric();

    let t_scalar = field::stress_scalar(&metric, &local.metric, &grads)?;
    let t_gauge = field::stress_gauge_em(&metric, &local.em, f)?;
    let einstein = curv.einstein - t_scalar - t_gauge;

    let star_f: Vec<M4> = f.iter().map(|x| field::hodge(&metric, x)).collect();
    let boxes: Vec<f64> = (0..ns)
        .map(|i| box_op(&metric.inv, &curv.christoffel, &jet.dphi, &jet.ddphi, i))
        .collect();
    let star_v = BundleForm::Two(jet.v.hodge(&metric));
    let mut scalar_local = DVector::zeros(ns);
    let mut scalar_global = DVector::zeros(ns);
    for k in 0..ns {
        let mut lhs = 0.0;
        for i in 0..ns {
            lhs += local.metric[(i, k)] * boxes[i];
            for l in 0..ns {
                lhs += local.metric_derivatives[l][(i, k)] * dot(l, i);
            }
        }
        let mut rhs = 0.0;
        for i in 0..ns {
            for j in 0..ns {
                rhs += 0.5 * local.metric_derivatives[k][(i, j)] * dot(i, j);
            }
        }
        let (dr, di) = &local.d_em[k];
        for l in 0..nv {
            for s in 0..nv {
                rhs += dr[(l, s)] * field::pair2(&metric, &f[l], &star_f[s]);
                rhs += di[(l, s)] * field::pair2(&metric, &f[l], &f[s]);
            }
        }
        scalar_local[k] = lhs - rhs;

        let mut tension = 0.0;
        for i in 0..ns {
            let mut t = boxes[i];
            for j in 0..ns {
                for l in 0..ns {
                    t += local.christoffel[i][(j, l)] * dot(j, l);
                }
            }
            tension += local.metric[(i, k)] * t;
        }
        let psi_v = BundleForm::Two(jet.v.apply(&local.psi[k]));
        scalar_global[k] = tension + 0.5 * field::twisted_pairing(&metric, &local.j, &star_v, &psi_v)?;
    }

    let maxwell = (0..2 * nv)
        .map(|c| {
            std::array::from_fn(|t| {
                let (a, b, d) = TRIPLES[t];
                jet.dv[a].0[c][(b, d)] + jet.dv[b].0[c][(d, a)] + jet.dv[d].0[c][(a, b)]
            })
        })
        .collect();

    Ok(NodeResidual {
        einstein,
        scalar_local,
        scalar_global,
        maxwell,
    })
}

/// Residuals over the nodes one step inside the patch.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub nodes: Vec<usize>,
    pub einstein: Vec<M4>,
    pub scalar_local: Vec<DVector<f64>>,
    pub scalar_global: Vec<DVector<f64>>,
    pub maxwell: Vec<Vec<[f64; 4]>>,
    pub einstein_max: f64,
    pub scalar_max: f64,
    pub maxwell_max: f64,
    /// `max |local - bundle form|` of the scalar residual.
    pub assembly_gap: f64,
    /// Patch indices of the nodes with the largest Einstein, scalar and
    /// Maxwell residuals.
    pub worst: [usize; 3],
}

/// Finite-difference jet of `cfg` at an interior node.
pub fn jet_at(cfg: &FieldConfiguration, node: usize) -> Jet {
    let p = &cfg.patch;
    let phi: Vec<DVector<f64>> = cfg.phi.clone();
    let vec = |v: DVector<f64>| v.iter().copied().collect::<Vec<f64>>();
    Jet {
        g: cfg.metric[node],
        dg: std::array::from_fn(|a| d1(p, &cfg.metric, node, a)),
        ddg: std::array::from_fn(|a| std::array::from_fn(|b| d2(p, &cfg.metric, node, a, b))),
        phi: vec(phi[node].clone()),
        dphi: std::array::from_fn(|a| vec(d1(p, &phi, node, a))),
        ddphi: std::array::from_fn(|a| std::array::from_fn(|b| vec(d2(p, &phi, node, a, b)))),
        v: cfg.v[node].clone(),
        dv: std::array::from_fn(|a| d1(p, &cfg.v, node, a)),
    }
}

pub fn residuals(cfg: &FieldConfiguration) -> Result<ResidualReport> {
    if cfg.patch.n.iter().any(|&n| n < MIN_POINTS) {
        return Err(Error::Invalid(format!("residuals need at least {MIN_POINTS} points per axis")));
    }
    let nodes = cfg.patch.interior(STENCIL_MARGIN);
    let mut rep = ResidualReport {
        nodes: nodes.clone(),
        einstein: Vec::with_capacity(nodes.len()),
        scalar_local: Vec::with_capacity(nodes.len()),
        scalar_global: Vec::with_capacity(nodes.len()),
        maxwell: Vec::with_capacity(nodes.len()),
        einstein_max: 0.0,
        scalar_max: 0.0,
        maxwell_max: 0.0,
        assembly_gap: 0.0,
        worst: [0; 3],
    };
    for &node in &nodes {
        let r = node_residual(&cfg.theory, &jet_at(cfg, node))?;
        let e = r.einstein.amax();
        let s = r.scalar_local.amax();
        let m = r.maxwell.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
        if e > rep.einstein_max || rep.einstein.is_empty() {
            rep.einstein_max = e;
            rep.worst[0] = node;
        }
        if s > rep.scalar_max || rep.scalar_local.is_empty() {
            rep.scalar_max = s;
            rep.worst[1] = node;
        }
        if m > rep.maxwell_max || rep.maxwell.is_empty() {
            rep.maxwell_max = m;
            rep.worst[2] = node;
        }
        rep.assembly_gap = rep
            .assembly_gap
            .max((&r.scalar_local - &r.scalar_global).amax());
        rep.einstein.push(r.einstein);
        rep.scalar_local.push(r.scalar_local);
        rep.scalar_global.push(r.scalar_global);
        rep.maxwell.push(r.maxwell);
    }
    Ok(rep)
}

/// Largest twisted self-duality defect `|∗V + JV|` over all nodes.
pub fn self_duality_defect(cfg: &FieldConfiguration) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..cfg.patch.len() {
        let g = Metric::new(cfg.metric[i])?;
        let local = cfg.theory.local(cfg.phi[i].as_slice())?;
        worst = worst.max(field::twisted_self_duality_defect(&g, &local.j, &cfg.v[i])?);
    }
    Ok(worst)
}
