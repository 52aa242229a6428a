//! Transport of field configurations along duality pairs `(f, A)`.
//!
//! A pair made of an isometry `f` of the scalar chart and `A ∈ Sp(2n_v)`
//! sends a configuration `(g, φ, V)` of the theory `(𝒢, J)` to
//! `(g, f∘φ, AV)`, a configuration of the theory `(f_*𝒢, J')` with
//! `J'(q) = A J(f⁻¹q) A⁻¹`.  When `(f, A)` is a U-duality pair of the model
//! the transported theory coincides with the original one.

use nalgebra::DVector;
use num_complex::Complex64;

use super::residuals::{residuals, FieldConfiguration, ResidualReport};
use crate::duality::mobius_point;
use crate::field::TwoFormBlock;
use crate::linalg::{self, max_abs};
use crate::model::{ChartKind, ScalarChart};
use crate::symplectic::SymplecticMatrix;
use crate::{Error, RMat, Result};

/// Isometry of a scalar chart.
#[derive(Debug, Clone, PartialEq)]
pub enum ChartMap {
    Identity,
    /// `τ ↦ (c + dτ)/(a + bτ)` on the upper half plane.
    Mobius(SymplecticMatrix),
    /// `x ↦ L x + b`.
    Affine { lin: RMat, offset: Vec<f64> },
}

impl ChartMap {
    /// Parses `id`, `translate:s`, `scale:s`, `mobius:a,b,c,d` or
    /// `affine:l11,..,lkk;b1,..,bk`.
    pub fn parse(spec: &str) -> Result<ChartMap> {
        let bad = || Error::Invalid(format!("cannot read chart map `{spec}`"));
        let nums = |s: &str| -> Result<Vec<f64>> {
            s.split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
                .collect()
        };
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        let mobius = |v: [f64; 4]| -> Result<ChartMap> {
            Ok(ChartMap::Mobius(SymplecticMatrix::new(RMat::from_row_slice(2, 2, &v))?))
        };
        match kind {
            "id" | "identity" => Ok(ChartMap::Identity),
            "translate" => mobius([1.0, 0.0, nums(rest)?.first().copied().ok_or_else(bad)?, 1.0]),
            "scale" => {
                let s = nums(rest)?.first().copied().filter(|s| *s > 0.0).ok_or_else(bad)?;
                mobius([1.0 / s.sqrt(), 0.0, 0.0, s.sqrt()])
            }
            "mobius" => {
                let v = nums(rest)?;
                if v.len() != 4 {
                    return Err(bad());
                }
                mobius([v[0], v[1], v[2], v[3]])
            }
            "affine" => {
                let (l, b) = rest.split_once(';').ok_or_else(bad)?;
                let l = nums(l)?;
                let b = nums(b)?;
                let k = b.len();
                if l.len() != k * k {
                    return Err(bad());
                }
                Ok(ChartMap::Affine {
                    lin: RMat::from_row_slice(k, k, &l),
                    offset: b,
                })
            }
            _ => Err(bad()),
        }
    }

    pub fn apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        match self {
            ChartMap::Identity => Ok(p.to_vec()),
            ChartMap::Mobius(m) => mobius_point(m, p),
            ChartMap::Affine { lin, offset } => {
                if p.len() != offset.len() {
                    return Err(Error::Dimension("affine map and point differ in dimension".into()));
                }
                let x = lin * DVector::from_column_slice(p);
                Ok(x.iter().zip(offset).map(|(a, b)| a + b).collect())
            }
        }
    }

    pub fn inverse(&self) -> ChartMap {
        match self {
            ChartMap::Identity => ChartMap::Identity,
            ChartMap::Mobius(m) => ChartMap::Mobius(m.inverse()),
            ChartMap::Affine { lin, offset } => {
                let inv = lin.transpose();
                let b = -(&inv * DVector::from_column_slice(offset));
                ChartMap::Affine {
                    lin: inv,
                    offset: b.iter().copied().collect(),
                }
            }
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &ChartMap) -> Result<ChartMap> {
        Ok(match (self, inner) {
            (ChartMap::Identity, x) | (x, ChartMap::Identity) => x.clone(),
            (ChartMap::Mobius(a), ChartMap::Mobius(b)) => ChartMap::Mobius(a.compose(b)),
            (ChartMap::Affine { lin: l1, offset: b1 }, ChartMap::Affine { lin: l2, offset: b2 }) => {
                let b = l1 * DVector::from_column_slice(b2) + DVector::from_column_slice(b1);
                ChartMap::Affine {
                    lin: l1 * l2,
                    offset: b.iter().copied().collect(),
                }
            }
            _ => return Err(Error::Invalid("chart maps of different kinds".into())),
        })
    }

    /// Jacobian `∂f^i/∂x^j` at `p`.
    pub fn jacobian(&self, p: &[f64]) -> Result<RMat> {
        match self {
            ChartMap::Identity => Ok(RMat::identity(p.len(), p.len())),
            ChartMap::Mobius(m) => {
                let (a, b, _, _) = m.blocks();
                let den = Complex64::new(a[(0, 0)] + b[(0, 0)] * p[0], b[(0, 0)] * p[1]);
                let w = (den * den).inv();
                Ok(RMat::from_row_slice(2, 2, &[w.re, -w.im, w.im, w.re]))
            }
            ChartMap::Affine { lin, .. } => Ok(lin.clone()),
        }
    }

    /// Checks that the map is an isometry of `chart`.
    pub fn check_isometry(&self, chart: &ScalarChart) -> Result<()> {
        match (self, chart.kind) {
            (ChartMap::Identity, _) => Ok(()),
            (ChartMap::Mobius(m), ChartKind::Poincare) if m.n() == 1 => Ok(()),
            (ChartMap::Affine { lin, offset }, ChartKind::Flat(k)) if offset.len() == k => {
                let v = max_abs(&(lin.transpose() * lin - RMat::identity(k, k)));
                if v > 1e-12 {
                    return Err(Error::domain("affine chart map is not orthogonal", v, 1e-12));
                }
                Ok(())
            }
            _ => Err(Error::Invalid("chart map does not act on this chart".into())),
        }
    }
}

/// `(g, φ, V) ↦ (g, f∘φ, AV)` together with the transported theory.
pub fn transport_config(
    f: &ChartMap,
    a: &SymplecticMatrix,
    cfg: &FieldConfiguration,
) -> Result<FieldConfiguration> {
    let theory = cfg.theory.pushforward(f, a)?;
    let phi = cfg
        .phi
        .iter()
        .map(|p| f.apply(p.as_slice()).map(DVector::from_vec))
        .collect::<Result<Vec<_>>>()?;
    let v: Vec<TwoFormBlock> = cfg.v.iter().map(|v| v.apply(a.matrix())).collect();
    Ok(FieldConfiguration {
        patch: cfg.patch.clone(),
        metric: cfg.metric.clone(),
        phi,
        v,
        theory,
    })
}

/// Node-by-node comparison of residuals before and after transport.
#[derive(Debug, Clone)]
pub struct EquivarianceReport {
    pub before: ResidualReport,
    pub after: ResidualReport,
    /// `max |E' - E|`.
    pub einstein_gap: f64,
    /// `max |dV' - A dV|`.
    pub maxwell_gap: f64,
    /// `max |df(𝒢⁻¹ s) - 𝒢'⁻¹ s'|` for the scalar residual covectors.
    pub scalar_gap: f64,
}

impl EquivarianceReport {
    pub fn max_gap(&self) -> f64 {
        self.einstein_gap.max(self.maxwell_gap).max(self.scalar_gap)
    }
}

/// Residuals of `cfg` and of its transport along `(f, A)`.
pub fn equivariance_check(
    f: &ChartMap,
    a: &SymplecticMatrix,
    cfg: &FieldConfiguration,
) -> Result<EquivarianceReport> {
    let moved = transport_config(f, a, cfg)?;
    let before = residuals(cfg)?;
    let after = residuals(&moved)?;
    let mut einstein_gap = 0.0f64;
    let mut maxwell_gap = 0.0f64;
    let mut scalar_gap = 0.0f64;
    let chart = &cfg.theory.model.chart;
    for (k, &node) in before.nodes.iter().enumerate() {
        einstein_gap = einstein_gap.max((after.einstein[k] - before.einstein[k]).amax());
        let mw = &before.maxwell[k];
        for r in 0..mw.len() {
            for c in 0..4 {
                let mapped: f64 = (0..mw.len()).map(|s| a.matrix()[(r, s)] * mw[s][c]).sum();
                maxwell_gap = maxwell_gap.max((after.maxwell[k][r][c] - mapped).abs());
            }
        }
        let p = cfg.phi[node].as_slice();
        let q = moved.phi[node].as_slice();
        let up = linalg::inverse(&chart.metric(p)?, "scalar metric")? * &before.scalar_local[k];
        let up_after = linalg::inverse(&chart.metric(q)?, "scalar metric")? * &after.scalar_local[k];
        let pushed = f.jacobian(p)? * up;
        scalar_gap = scalar_gap.max((up_after - pushed).amax());
    }
    Ok(EquivarianceReport {
        before,
        after,
        einstein_gap,
        maxwell_gap,
        scalar_gap,
    })
}

