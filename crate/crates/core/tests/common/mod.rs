//! Measurements shared by the integration tests and the acceptance gate.
//! Each function returns the worst observed value so that callers choose
//! how to report it.

#![allow(dead_code)]

use std::f64::consts::PI;

use emduality::eom::residuals::{jet_at, node_residual, Jet};
use emduality::eom::{residuals, FieldConfiguration, GridPatch, Theory};
use emduality::field::{self, eta, Metric, TwoFormBlock, M4, V4};
use emduality::linalg::{max_abs, max_abs_c};
use emduality::model::builtin;
use emduality::sampling::{random_em_pair, random_symplectic, random_taming, rng, SampleRng};
use emduality::symplectic::{
    conjugate, fractional_action, gamma, gamma_inv, mu, mu_inv, EmPair, SiegelPoint, SymplecticMatrix,
};
use emduality::{CMat, RMat};
use nalgebra::Vector4;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn normal(r: &mut SampleRng) -> f64 {
    r.sample(StandardNormal)
}

/// `AᵀηA` for a random `A` near the identity: Lorentzian by Sylvester's law.
pub fn random_metric(r: &mut SampleRng) -> Metric {
    loop {
        let a = M4::identity() + M4::from_fn(|_, _| 0.3 * normal(r));
        if a.determinant().abs() > 0.1 {
            return Metric::new(a.transpose() * eta() * a).expect("Lorentzian");
        }
    }
}

pub fn random_two_form(r: &mut SampleRng) -> M4 {
    let m = M4::from_fn(|_, _| normal(r));
    m - m.transpose()
}

pub fn random_block(r: &mut SampleRng, rank: usize) -> TwoFormBlock {
    TwoFormBlock((0..rank).map(|_| random_two_form(r)).collect())
}

fn rel_c(a: &CMat, b: &CMat) -> f64 {
    max_abs_c(&(a - b)) / max_abs_c(b).max(1.0)
}

fn rel(a: &RMat, b: &RMat) -> f64 {
    max_abs(&(a - b)) / max_abs(b).max(1.0)
}

/// Worst relative round-trip error of `γ∘γ⁻¹`, `γ⁻¹∘γ`, `μ∘μ⁻¹` and
/// `μ⁻¹∘μ` over `count` random inputs of rank `n`.
pub fn roundtrip_error(n: usize, count: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let p = random_em_pair(n, &mut r);
        let j = gamma(&p);
        let back = gamma_inv(&j).unwrap();
        worst = worst.max(rel(&back.r, &p.r)).max(rel(&back.i, &p.i));
        let j2 = random_taming(n, &mut r);
        worst = worst.max(rel(gamma(&gamma_inv(&j2).unwrap()).matrix(), j2.matrix()));
        let tau = mu(&j2).unwrap();
        worst = worst.max(rel(mu_inv(&tau).unwrap().matrix(), j2.matrix()));
        let t2 = SiegelPoint::from_parts(&p.r, &p.i).unwrap();
        worst = worst.max(rel_c(mu(&mu_inv(&t2).unwrap()).unwrap().matrix(), t2.matrix()));
    }
    worst
}

/// Worst relative violation of `(AB)·τ = A·(B·τ)`, `1·τ = τ`,
/// `A⁻¹·(A·τ) = τ` and `μ(AJA⁻¹) = A·μ(J)` over `count` random pairs.
pub fn action_law_error(n: usize, count: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let id = SymplecticMatrix::identity(n);
    let mut worst = 0.0f64;
    for _ in 0..count {
        let a = random_symplectic(n, &mut r, 0.4);
        let b = random_symplectic(n, &mut r, 0.4);
        let j = random_taming(n, &mut r);
        let tau = mu(&j).unwrap();
        let ab = fractional_action(&a.compose(&b), &tau).unwrap();
        let a_b = fractional_action(&a, &fractional_action(&b, &tau).unwrap()).unwrap();
        worst = worst.max(rel_c(ab.matrix(), a_b.matrix()));
        worst = worst.max(rel_c(fractional_action(&id, &tau).unwrap().matrix(), tau.matrix()));
        let there = fractional_action(&a, &tau).unwrap();
        let back = fractional_action(&a.inverse(), &there).unwrap();
        worst = worst.max(rel_c(back.matrix(), tau.matrix()));
        let moved = mu(&conjugate(&a, &j).unwrap()).unwrap();
        worst = worst.max(rel_c(moved.matrix(), there.matrix()));
    }
    worst
}

/// Outcome of the twisted self-duality suite.
#[derive(Debug, Default)]
pub struct SelfDualStats {
    /// `|∗V + JV|` for `V = (F, RF - I∗F)`.
    pub assembled: f64,
    /// Distance of the lower block of a `⋆`-fixed field from `RF - I∗F`.
    pub fixed_is_assembled: f64,
    /// Smallest defect seen on anti-self-dual parts; must stay away from 0.
    pub anti_min: f64,
    pub cvcn: f64,
    /// `|∗∗w + w| / (‖∗‖² |w|)`, operator norms induced by the max norm.
    pub star_squared: f64,
    /// `|⋆⋆w - w| / (‖J‖² ‖∗‖² |w|)`.
    pub twisted_star_squared: f64,
    /// The same two defects divided by `|w|` only.
    pub raw_star_squared: f64,
    pub raw_twisted_star_squared: f64,
}

/// Induced max-norm of the Hodge star on two-forms, in the components
/// `w_ab`, `a < b`.
pub fn star_norm(g: &Metric) -> f64 {
    let mut rows = [0.0f64; 6];
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    for &(a, b) in &pairs {
        let mut e = M4::zeros();
        e[(a, b)] = 1.0;
        e[(b, a)] = -1.0;
        let s = field::hodge(g, &e);
        for (row, &(c, d)) in pairs.iter().enumerate() {
            rows[row] += s[(c, d)].abs();
        }
    }
    rows.into_iter().fold(0.0, f64::max)
}

/// Induced max-norm (largest row sum).
pub fn inf_norm(m: &RMat) -> f64 {
    m.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

pub fn self_duality_stats(count: usize, seed: u64) -> SelfDualStats {
    let mut r = rng(seed);
    let mut s = SelfDualStats {
        anti_min: f64::INFINITY,
        ..Default::default()
    };
    for k in 0..count {
        let n = 1 + k % 3;
        let g = random_metric(&mut r);
        let em = random_em_pair(n, &mut r);
        let j = gamma(&em);
        let f: Vec<M4> = (0..n).map(|_| random_two_form(&mut r)).collect();
        let v = field::assemble_v(&g, &em, &f).unwrap();
        let scale = v.max_abs().max(1.0);
        s.assembled = s.assembled.max(field::twisted_self_duality_defect(&g, &j, &v).unwrap() / scale);
        s.cvcn = s.cvcn.max(field::cvcn_defect(&g, &em, &v).unwrap() / scale);

        // Converse: a field fixed by the twisted star is determined by its
        // electric half.
        let w = random_block(&mut r, 2 * n);
        let (plus, minus) = field::project_sd(&g, &j, &w).unwrap();
        let rebuilt = field::assemble_v(&g, &em, plus.electric()).unwrap();
        let pscale = plus.max_abs().max(1.0);
        s.fixed_is_assembled = s.fixed_is_assembled.max((rebuilt - plus).max_abs() / pscale);
        let anti = field::twisted_self_duality_defect(&g, &j, &minus).unwrap() / minus.max_abs();
        s.anti_min = s.anti_min.min(anti);

        let x = random_two_form(&mut r);
        let ss = field::hodge(&g, &field::hodge(&g, &x));
        let sn = star_norm(&g);
        let raw = (ss + x).amax() / x.amax();
        s.raw_star_squared = s.raw_star_squared.max(raw);
        s.star_squared = s.star_squared.max(raw / (sn * sn));
        let once = field::twisted_star(&g, &j, &w).unwrap();
        let twice = field::twisted_star(&g, &j, &once).unwrap();
        let raw = (twice - w.clone()).max_abs() / w.max_abs();
        s.raw_twisted_star_squared = s.raw_twisted_star_squared.max(raw);
        s.twisted_star_squared = s.twisted_star_squared.max(raw / (inf_norm(j.matrix()).powi(2) * sn * sn));
    }
    s
}

/// Worst change of the gauge stress under `(J, V) ↦ (AJA⁻¹, AV)` and the
/// worst gap between the bundle form and the `(R, I)` form of the stress.
pub fn stress_invariance(count: usize, seed: u64) -> (f64, f64) {
    let mut r = rng(seed);
    let (mut inv, mut forms) = (0.0f64, 0.0f64);
    for k in 0..count {
        let n = 1 + k % 3;
        let g = random_metric(&mut r);
        let em = random_em_pair(n, &mut r);
        let j = gamma(&em);
        let f: Vec<M4> = (0..n).map(|_| random_two_form(&mut r)).collect();
        let v = field::assemble_v(&g, &em, &f).unwrap();
        let t = field::stress_gauge(&g, &j, &v).unwrap();
        let scale = t.amax().max(1.0);
        let a = random_symplectic(n, &mut r, 0.4);
        let t2 = field::stress_gauge(&g, &conjugate(&a, &j).unwrap(), &v.apply(a.matrix())).unwrap();
        inv = inv.max((t2 - t).amax() / scale);
        let te = field::stress_gauge_em(&g, &em, &f).unwrap();
        forms = forms.max((te - t).amax() / scale);
    }
    (inv, forms)
}

/// Polynomial manufactured fields.  `variant` picks one of three shapes.
pub fn manufactured(model: &str, variant: usize, points: usize) -> FieldConfiguration {
    let m = builtin(model).unwrap();
    let nv = m.nv;
    let patch = GridPatch::centered([0.1, -0.05, 0.02, 0.03], 0.1, points).unwrap();
    let c = [0.7, -0.4, 0.25][variant];
    FieldConfiguration::from_fn(
        patch,
        Theory::new(m),
        move |x| {
            let mut g = eta();
            g[(0, 0)] -= 0.1 * c * x[3] * x[3];
            g[(1, 1)] += 0.05 * x[0] * x[2];
            g[(1, 2)] += 0.04 * c * x[1];
            g[(2, 1)] += 0.04 * c * x[1];
            g[(3, 3)] += 0.03 * x[1] * x[1] * variant as f64;
            g
        },
        move |x| vec![0.2 * c + 0.3 * x[0] - 0.1 * x[1] * x[2], 1.3 + 0.2 * c * x[3] + 0.1 * x[0] * x[0]],
        move |x| {
            (0..nv)
                .map(|l| {
                    let s = (l + 1) as f64;
                    let mut f = M4::zeros();
                    f[(0, 1)] = 0.3 * c + 0.1 * s * x[2];
                    f[(0, 3)] = -0.2 * s + 0.05 * x[0] * x[1];
                    f[(2, 3)] = 0.15 * c * s * x[3];
                    f[(1, 2)] = 0.1 * variant as f64 - 0.07 * x[0];
                    f - f.transpose()
                })
                .collect()
        },
    )
    .unwrap()
}

/// `τ ↦ c/a + τ/a²` for random `a > 0` and `c`.
pub fn affine_mobius(r: &mut SampleRng) -> SymplecticMatrix {
    let a = (0.3 * normal(r)).exp();
    let c = 0.5 * normal(r);
    SymplecticMatrix::new(RMat::from_row_slice(2, 2, &[a, 0.0, c, 1.0 / a])).unwrap()
}

pub const HARNESS_MODELS: [&str; 3] = ["identity-tau", "axio-dilaton", "t3"];

/// Worst before/after gap, transported self-duality defect and local vs
/// global scalar gap over models × configurations × random `(f, A)`.
pub fn transport_harness(per_case: usize, seed: u64) -> (f64, f64, f64) {
    use emduality::eom::{equivariance_check, residuals::self_duality_defect, transport_config, ChartMap};
    let mut r = rng(seed);
    let (mut gap, mut sd, mut assembly) = (0.0f64, 0.0f64, 0.0f64);
    for model in HARNESS_MODELS {
        for variant in 0..3 {
            let cfg = manufactured(model, variant, 7);
            let nv = cfg.theory.nv();
            for k in 0..per_case {
                let a = random_symplectic(nv, &mut r, 0.5);
                // Alternate pure symplectic rotations with pairs whose chart
                // map is a random dilation and translation.  Those commute
                // with the difference stencils, so the gap is rounding only.
                let f = if k % 2 == 0 {
                    ChartMap::Identity
                } else {
                    ChartMap::Mobius(affine_mobius(&mut r))
                };
                let eq = equivariance_check(&f, &a, &cfg).unwrap();
                let scale = eq.before.einstein_max.max(eq.before.scalar_max).max(1.0);
                gap = gap.max(eq.max_gap() / scale);
                assembly = assembly.max(eq.before.assembly_gap).max(eq.after.assembly_gap);
                sd = sd.max(self_duality_defect(&transport_config(&f, &a, &cfg).unwrap()).unwrap());
            }
        }
    }
    (gap, sd, assembly)
}

/// All residuals of the vacuum: Minkowski, constant scalars, no field.
pub fn minkowski_vacuum() -> f64 {
    let mut worst = 0.0f64;
    for model in ["constant-i", "identity-tau", "axio-dilaton", "t3"] {
        let m = builtin(model).unwrap();
        let nv = m.nv;
        let cfg = FieldConfiguration::from_fn(
            GridPatch::centered([0.0; 4], 0.1, 7).unwrap(),
            Theory::new(m),
            |_| eta(),
            |_| vec![0.3, 1.1],
            move |_| vec![M4::zeros(); nv],
        )
        .unwrap();
        let rep = residuals(&cfg).unwrap();
        worst = worst.max(rep.einstein_max).max(rep.scalar_max).max(rep.maxwell_max);
    }
    worst
}

/// Smooth non-polynomial manufactured data for the convergence study:
/// `g_{μν} = η_{μν} + a_{μν} sin(k_{μν}·x + b_{μν})`,
/// `φ = (0.2 + 0.1 sin(x⁰ + 2x¹), 1.3 + 0.1 cos(x² - x³))` and a trigonometric
/// electric field on the axio-dilaton model.
pub struct Smooth {
    amp: M4,
    waves: [[V4; 4]; 4],
    phase: M4,
}

impl Smooth {
    pub fn new() -> Self {
        let mut amp = M4::zeros();
        let mut waves = [[V4::zeros(); 4]; 4];
        let mut phase = M4::zeros();
        for a in 0..4 {
            for b in a..4 {
                let s = (1 + a + 2 * b) as f64;
                amp[(a, b)] = 0.05 + 0.01 * s;
                waves[a][b] = Vector4::new(0.7 + 0.1 * s, -0.3 * s.sqrt(), 0.5, 1.1 - 0.05 * s);
                phase[(a, b)] = 0.3 * s;
                amp[(b, a)] = amp[(a, b)];
                waves[b][a] = waves[a][b];
                phase[(b, a)] = phase[(a, b)];
            }
        }
        Smooth { amp, waves, phase }
    }

    fn arg(&self, a: usize, b: usize, x: [f64; 4]) -> f64 {
        self.waves[a][b].dot(&V4::from(x)) + self.phase[(a, b)]
    }

    pub fn metric(&self, x: [f64; 4]) -> M4 {
        eta() + M4::from_fn(|a, b| self.amp[(a, b)] * self.arg(a, b, x).sin())
    }

    fn dmetric(&self, x: [f64; 4], c: usize) -> M4 {
        M4::from_fn(|a, b| self.amp[(a, b)] * self.waves[a][b][c] * self.arg(a, b, x).cos())
    }

    fn ddmetric(&self, x: [f64; 4], c: usize, d: usize) -> M4 {
        M4::from_fn(|a, b| {
            -self.amp[(a, b)] * self.waves[a][b][c] * self.waves[a][b][d] * self.arg(a, b, x).sin()
        })
    }

    pub fn phi(x: [f64; 4]) -> Vec<f64> {
        vec![0.2 + 0.1 * (x[0] + 2.0 * x[1]).sin(), 1.3 + 0.1 * (x[2] - x[3]).cos()]
    }

    fn dphi(x: [f64; 4], c: usize) -> Vec<f64> {
        let k0 = [1.0, 2.0, 0.0, 0.0][c];
        let k1 = [0.0, 0.0, 1.0, -1.0][c];
        vec![0.1 * k0 * (x[0] + 2.0 * x[1]).cos(), -0.1 * k1 * (x[2] - x[3]).sin()]
    }

    fn ddphi(x: [f64; 4], c: usize, d: usize) -> Vec<f64> {
        let k0 = [1.0, 2.0, 0.0, 0.0];
        let k1 = [0.0, 0.0, 1.0, -1.0];
        vec![
            -0.1 * k0[c] * k0[d] * (x[0] + 2.0 * x[1]).sin(),
            -0.1 * k1[c] * k1[d] * (x[2] - x[3]).cos(),
        ]
    }

    pub fn electric(x: [f64; 4]) -> Vec<M4> {
        (0..2)
            .map(|l| {
                let s = 1.0 + l as f64;
                let mut f = M4::zeros();
                f[(0, 1)] = 0.3 * (s * x[2] + 0.4).cos();
                f[(1, 3)] = 0.2 * (x[0] - s * x[1]).sin();
                f[(2, 3)] = -0.1 * s * (x[3] * PI).cos();
                f - f.transpose()
            })
            .collect()
    }

    pub fn config(&self, center: [f64; 4], h: f64) -> FieldConfiguration {
        FieldConfiguration::from_fn(
            GridPatch::centered(center, h, 7).unwrap(),
            Theory::new(builtin("axio-dilaton").unwrap()),
            |x| self.metric(x),
            Self::phi,
            Self::electric,
        )
        .unwrap()
    }

    /// Exact jet at `x`.  `V` and its derivatives do not enter the Einstein
    /// and scalar residuals beyond the node value; `dV` is left at zero.
    pub fn jet(&self, theory: &Theory, x: [f64; 4]) -> Jet {
        let g = Metric::new(self.metric(x)).unwrap();
        let em: EmPair = theory.local(&Self::phi(x)).unwrap().em;
        Jet {
            g: g.g,
            dg: std::array::from_fn(|c| self.dmetric(x, c)),
            ddg: std::array::from_fn(|c| std::array::from_fn(|d| self.ddmetric(x, c, d))),
            phi: Self::phi(x),
            dphi: std::array::from_fn(|c| Self::dphi(x, c)),
            ddphi: std::array::from_fn(|c| std::array::from_fn(|d| Self::ddphi(x, c, d))),
            v: field::assemble_v(&g, &em, &Self::electric(x)).unwrap(),
            dv: std::array::from_fn(|_| TwoFormBlock::zeros(4)),
        }
    }
}

impl Default for Smooth {
    fn default() -> Self {
        Self::new()
    }
}

/// Errors of the finite-difference Einstein and scalar residuals at the
/// center node against the exact ones, for each spacing.
pub fn convergence_errors(spacings: &[f64]) -> Vec<(f64, f64)> {
    let s = Smooth::new();
    let center = [0.1, 0.2, -0.1, 0.3];
    let mut out = Vec::new();
    for &h in spacings {
        let cfg = s.config(center, h);
        let node = cfg.patch.index([3; 4]);
        let fd = node_residual(&cfg.theory, &jet_at(&cfg, node)).unwrap();
        let exact = node_residual(&cfg.theory, &s.jet(&cfg.theory, center)).unwrap();
        out.push((
            (fd.einstein - exact.einstein).amax(),
            (fd.scalar_local - exact.scalar_local).amax(),
        ));
    }
    out
}

/// `(dim, linear residual, group-flow defect)` of the stabilizer algebra.
pub fn stabilizer_case(model: &str) -> (usize, f64, f64) {
    use emduality::duality::{flow_defect, stab_sp_algebra, DEFAULT_SAMPLES};
    let m = builtin(model).unwrap();
    let points = m.chart.samples(DEFAULT_SAMPLES);
    let rep = stab_sp_algebra(&m, &points).unwrap();
    let flow = flow_defect(&m, &rep.basis, &[0.1, 0.5, 1.0], &points).unwrap();
    (rep.dim, rep.residual, flow)
}

/// Distance of `X` from the diagonal of `so(2) ⊕ so(2)`, the rotations of
/// the planes `(x¹, y²)` and `(x², y¹)` (coordinates `(x¹, x², y¹, y²)`)
/// at equal rates.
pub fn diagonal_rotation_defect(x: &RMat) -> f64 {
    let scale = max_abs(x);
    let mut off = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let in_planes = matches!((i.min(j), i.max(j)), (0, 3) | (1, 2));
            if !in_planes {
                off = off.max(x[(i, j)].abs());
            }
        }
    }
    let antisym = max_abs(&(x + x.transpose()));
    let rates = (x[(0, 3)].abs() - x[(1, 2)].abs()).abs();
    let sq = x * x;
    let proportional = max_abs(&(&sq - RMat::identity(4, 4) * (sq.trace() / 4.0)));
    off.max(antisym).max(rates).max(proportional) / scale
}

/// Centralizer dimension of `g ∈ Sp(2)` in `sl(2)`, by rank of the linear
/// map `X ↦ Xg - gX` on the basis `H, E, F`.
pub fn centralizer_oracle(g: &RMat) -> usize {
    let basis = [
        RMat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]),
        RMat::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
        RMat::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]),
    ];
    let mut m = RMat::zeros(4, 3);
    for (k, x) in basis.iter().enumerate() {
        let c = x * g - g * x;
        for (r, v) in c.iter().enumerate() {
            m[(r, k)] = *v;
        }
    }
    3 - m.rank(1e-10 * max_abs(g).max(1.0))
}

/// Largest relative gap between the trace invariants of a presentation and
/// of its conjugate by a random symplectic matrix.
pub fn invariant_conjugation_gap(count: usize, seed: u64) -> f64 {
    use emduality::holonomy::{conjugacy_invariants, BundlePresentation};
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for k in 0..count {
        let n = 1 + k % 2;
        let gens: Vec<RMat> = (0..2).map(|_| random_symplectic(n, &mut r, 0.4).into_matrix()).collect();
        let c = random_symplectic(n, &mut r, 0.4);
        let conj: Vec<RMat> = gens.iter().map(|g| c.matrix() * g * c.inverse().matrix()).collect();
        let a = conjugacy_invariants(&BundlePresentation::new(n, gens, vec![]).unwrap(), 4).unwrap();
        let b = conjugacy_invariants(&BundlePresentation::new(n, conj, vec![]).unwrap(), 4).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x - y).abs() / x.abs().max(1.0));
        }
    }
    worst
}

/// Error of the finite-difference `Ric + 3λ²g` of the AdS4 Poincaré metric
/// `η/(λz)²` at a fixed point, for each spacing.
pub fn ads_ricci_errors(lambda: f64, spacings: &[f64]) -> Vec<f64> {
    use emduality::eom::geometry::curvature;
    use emduality::eom::grid::{d1, d2};
    let center = [0.25, 0.25, 0.25, 1.25];
    spacings
        .iter()
        .map(|&h| {
            let patch = GridPatch::centered(center, h, 5).unwrap();
            let g: Vec<M4> = (0..patch.len())
                .map(|i| eta() / (lambda * patch.coords(i)[3]).powi(2))
                .collect();
            let c = patch.index([2; 4]);
            let dg = std::array::from_fn(|a| d1(&patch, &g, c, a));
            let ddg = std::array::from_fn(|a| std::array::from_fn(|b| d2(&patch, &g, c, a, b)));
            let curv = curvature(&g[c], &dg, &ddg).unwrap();
            (curv.ricci + g[c] * (3.0 * lambda * lambda)).amax()
        })
        .collect()
}

/// Measurements of the Killing spinor suite on AdS4 with `9` and `17`
/// points per axis.
#[derive(Debug)]
pub struct SpinorStats {
    pub minkowski_residual: f64,
    pub residual: [f64; 2],
    pub order: f64,
    pub path_defect: [f64; 2],
    /// Worst first-order residual of the bilinears and the algebraic part.
    pub bilinear: [f64; 2],
    pub algebraic: f64,
    pub c_ratio: f64,
    pub wrong_lambda_residual: f64,
}

pub fn spinor_stats(lambda: f64) -> SpinorStats {
    use emduality::spinor::{builtin_frame, integrate_killing, killing_residual, refinement_order, bilinear_search};
    let eps0 = V4::new(1.0, 0.3, -0.2, 0.5);
    let flat = builtin_frame("minkowski", 0.0, 9).unwrap();
    let parallel = integrate_killing(&flat, 0.0, eps0).unwrap();
    let minkowski_residual = killing_residual(&flat, &parallel.field).unwrap().max;

    let coarse = builtin_frame("ads4-poincare", lambda, 9).unwrap();
    let fine = builtin_frame("ads4-poincare", lambda, 17).unwrap();
    let ic = integrate_killing(&coarse, lambda, eps0).unwrap();
    let jf = integrate_killing(&fine, lambda, eps0).unwrap();
    let rc = killing_residual(&coarse, &ic.field).unwrap();
    let rf = killing_residual(&fine, &jf.field).unwrap();
    let (_, _, order) = refinement_order((&coarse.patch, &rc), (&fine.patch, &rf)).unwrap();

    // Integrating with the wrong constant must not produce a Killing spinor.
    let wrong = integrate_killing(&coarse, 1.3 * lambda, eps0).unwrap();
    let mut wrong_field = wrong.field.clone();
    wrong_field.lambda = lambda;
    let wrong_lambda_residual = killing_residual(&coarse, &wrong_field).unwrap().max;

    let mut bilinear = [0.0; 2];
    let mut algebraic = 0.0f64;
    for (k, (fr, eps)) in [(&coarse, &ic.field), (&fine, &jf.field)].into_iter().enumerate() {
        let best = &bilinear_search(fr, eps).unwrap()[0];
        bilinear[k] = best.report.worst();
        algebraic = algebraic.max(best.report.null).max(best.report.unit).max(best.report.orthogonal);
    }
    let (hc, hf) = (coarse.patch.spacing(0), fine.patch.spacing(0));
    let c_ratio = (bilinear[1] / (hf * hf)) / (bilinear[0] / (hc * hc));
    SpinorStats {
        minkowski_residual,
        residual: [rc.max, rf.max],
        order,
        path_defect: [ic.path_defect, jf.path_defect],
        bilinear,
        algebraic,
        c_ratio,
        wrong_lambda_residual,
    }
}
