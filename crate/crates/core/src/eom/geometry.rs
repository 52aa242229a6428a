//! Curvature of a metric from its first and second derivatives at a point.

use crate::field::{Metric, M4};
use crate::Result;

/// `Γ^ρ_{μν}` stored as `[ρ][(μ, ν)]`.
pub type Christoffel = [M4; 4];

#[derive(Debug, Clone)]
pub struct Curvature {
    pub christoffel: Christoffel,
    pub ricci: M4,
    pub scalar: f64,
    pub einstein: M4,
}

/// `Γ^ρ_{μν} = ½ g^{ρσ}(∂_μ g_{σν} + ∂_ν g_{σμ} - ∂_σ g_{μν})`.
pub fn christoffel(ginv: &M4, dg: &[M4; 4]) -> Christoffel {
    let mut lower = [M4::zeros(); 4];
    for (s, low) in lower.iter_mut().enumerate() {
        for m in 0..4 {
            for n in 0..4 {
                low[(m, n)] = 0.5 * (dg[m][(s, n)] + dg[n][(s, m)] - dg[s][(m, n)]);
            }
        }
    }
    std::array::from_fn(|r| {
        (0..4).fold(M4::zeros(), |acc, s| acc + lower[s] * ginv[(r, s)])
    })
}

/// Curvature from `g`, `∂_λ g` (`dg[λ]`) and `∂_λ ∂_κ g` (`ddg[λ][κ]`).
pub fn curvature(g: &M4, dg: &[M4; 4], ddg: &[[M4; 4]; 4]) -> Result<Curvature> {
    let metric = Metric::new(*g)?;
    let ginv = metric.inv;
    let gamma = christoffel(&ginv, dg);
    // ∂_λ Γ^ρ_{μν}, stored as dgamma[λ][ρ].
    let dgamma: [[M4; 4]; 4] = std::array::from_fn(|l| {
        let dginv = -(ginv * dg[l] * ginv);
        let mut lower = [M4::zeros(); 4];
        let mut dlower = [M4::zeros(); 4];
        for s in 0..4 {
            for m in 0..4 {
                for n in 0..4 {
                    lower[s][(m, n)] = 0.5 * (dg[m][(s, n)] + dg[n][(s, m)] - dg[s][(m, n)]);
                    dlower[s][(m, n)] =
                        0.5 * (ddg[l][m][(s, n)] + ddg[l][n][(s, m)] - ddg[l][s][(m, n)]);
                }
            }
        }
        std::array::from_fn(|r| {
            (0..4).fold(M4::zeros(), |acc, s| {
                acc + lower[s] * dginv[(r, s)] + dlower[s] * ginv[(r, s)]
            })
        })
    });
    let mut ricci = M4::zeros();
    for m in 0..4 {
        for n in 0..4 {
            let mut s = 0.0;
            for r in 0..4 {
                s += dgamma[r][r][(m, n)] - dgamma[n][r][(m, r)];
                for l in 0..4 {
                    s += gamma[r][(r, l)] * gamma[l][(m, n)] - gamma[r][(n, l)] * gamma[l][(m, r)];
                }
            }
            ricci[(m, n)] = s;
        }
    }
    let scalar = ginv.component_mul(&ricci).sum();
    Ok(Curvature {
        christoffel: gamma,
        einstein: ricci - g * (0.5 * scalar),
        ricci,
        scalar,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::eta;

    #[test]
    fn flat_metric_has_no_curvature() {
        let c = curvature(&eta(), &[M4::zeros(); 4], &[[M4::zeros(); 4]; 4]).unwrap();
        assert_eq!(c.einstein, M4::zeros());
    }

    #[test]
    fn conformally_flat_ads_point() {
        // g = η / (λ z)² at z = x³: Ric = -3λ² g.
        let lam = 0.7;
        let z: f64 = 1.3;
        let c = 1.0 / (lam * z).powi(2);
        let dc = -2.0 / (lam * lam * z.powi(3));
        let ddc = 6.0 / (lam * lam * z.powi(4));
        let mut dg = [M4::zeros(); 4];
        dg[3] = eta() * dc;
        let mut ddg = [[M4::zeros(); 4]; 4];
        ddg[3][3] = eta() * ddc;
        let k = curvature(&(eta() * c), &dg, &ddg).unwrap();
        assert!((k.ricci + eta() * c * 3.0 * lam * lam).amax() < 1e-12);
    }
}
