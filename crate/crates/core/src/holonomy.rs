//! Flat duality bundles given by a presentation of their holonomy
//! representation.
//!
//! A bundle file is JSON:
//!
//! ```json
//! { "nv": 1,
//!   "generators": [ [[1, 1], [0, 1]], [[1, 0], [-1, 1]] ],
//!   "relations": [ [1, 2, -1, -2] ] }
//! ```
//!
//! Generators are symplectic matrices written as row arrays.  A relation is
//! a word in the generators, `k` standing for the `k`-th generator (one
//! based) and `-k` for its inverse; its product must be the identity.

use serde::{Deserialize, Serialize};

use crate::linalg::{self, max_abs};
use crate::symplectic::{sp_basis, sp_check, SymplecticMatrix, Taming, TOL_ALG};
use crate::{Error, RMat, Result};

/// Longest words used for trace invariants.
pub const MAX_WORD_LEN: usize = 6;

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BundleFile {
    nv: usize,
    generators: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    relations: Vec<Vec<i32>>,
}

#[derive(Debug, Clone)]
pub struct BundlePresentation {
    pub nv: usize,
    pub generators: Vec<RMat>,
    pub relations: Vec<Vec<i32>>,
}

/// Reads a matrix written as an array of rows.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<RMat> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(Error::Dimension("matrix rows must be non-empty and of equal length".into()));
    }
    Ok(RMat::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &RMat) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

impl BundlePresentation {
    pub fn new(nv: usize, generators: Vec<RMat>, relations: Vec<Vec<i32>>) -> Result<Self> {
        for (k, g) in generators.iter().enumerate() {
            if g.shape() != (2 * nv, 2 * nv) {
                return Err(Error::Dimension(format!(
                    "generator {} is {}x{}, expected {}x{}",
                    k + 1,
                    g.nrows(),
                    g.ncols(),
                    2 * nv,
                    2 * nv
                )));
            }
        }
        for rel in &relations {
            if let Some(bad) = rel
                .iter()
                .find(|&&l| l == 0 || l.unsigned_abs() as usize > generators.len())
            {
                return Err(Error::Invalid(format!("relation letter {bad} names no generator")));
            }
        }
        Ok(BundlePresentation {
            nv,
            generators,
            relations,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: BundleFile = serde_json::from_str(text).map_err(|e| Error::Format {
            path: "bundle".into(),
            message: e.to_string(),
        })?;
        let gens = f
            .generators
            .iter()
            .map(|g| matrix_from_rows(g))
            .collect::<Result<Vec<_>>>()?;
        Self::new(f.nv, gens, f.relations)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&BundleFile {
            nv: self.nv,
            generators: self.generators.iter().map(matrix_to_rows).collect(),
            relations: self.relations.clone(),
        })
        .expect("bundle serializes")
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Format { message, .. } => Error::Format {
                path: path.display().to_string(),
                message,
            },
            other => other,
        })
    }

    fn letter(&self, l: i32) -> RMat {
        let g = &self.generators[l.unsigned_abs() as usize - 1];
        if l > 0 {
            g.clone()
        } else {
            SymplecticMatrix::new(g.clone())
                .map(|s| s.inverse().into_matrix())
                .unwrap_or_else(|_| g.clone().try_inverse().unwrap_or_else(|| g.clone()))
        }
    }

    /// Product of the letters of `word`, left to right.
    pub fn word(&self, word: &[i32]) -> RMat {
        word.iter()
            .fold(RMat::identity(2 * self.nv, 2 * self.nv), |acc, &l| acc * self.letter(l))
    }
}

#[derive(Debug, Clone)]
pub struct PresentationDiagnostics {
    /// `|HᵀΩH - Ω|` per generator, relative to `‖H‖²`.
    pub generator_violations: Vec<f64>,
    /// `|W - 1|` per relation word.
    pub relation_violations: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks that the generators are symplectic and the relations hold.
pub fn presentation_check(p: &BundlePresentation, tol: f64) -> Result<PresentationDiagnostics> {
    let generator_violations = p
        .generators
        .iter()
        .map(|g| sp_check(g, tol).map(|c| c.violation))
        .collect::<Result<Vec<_>>>()?;
    let id = RMat::identity(2 * p.nv, 2 * p.nv);
    let relation_violations: Vec<f64> = p
        .relations
        .iter()
        .map(|r| max_abs(&(p.word(r) - &id)))
        .collect();
    let pass = generator_violations
        .iter()
        .chain(&relation_violations)
        .all(|v| *v <= tol);
    Ok(PresentationDiagnostics {
        generator_violations,
        relation_violations,
        tolerance: tol,
        pass,
    })
}

#[derive(Debug, Clone)]
pub struct AlgebraBasis {
    pub basis: Vec<RMat>,
    pub dim: usize,
    /// Largest commutator `|[X, H]|` over the basis and the constraints.
    pub residual: f64,
}

fn commutant(p: &BundlePresentation, extra: &[RMat]) -> Result<AlgebraBasis> {
    let diag = presentation_check(p, TOL_ALG)?;
    if let Some(v) = diag.generator_violations.iter().find(|v| **v > TOL_ALG) {
        return Err(Error::domain("bundle generator is not symplectic", *v, TOL_ALG));
    }
    let basis = sp_basis(p.nv);
    let d = 2 * p.nv;
    let constraints: Vec<&RMat> = p.generators.iter().chain(extra).collect();
    let mut m = RMat::zeros(d * d * constraints.len(), basis.len());
    for (c, h) in constraints.iter().enumerate() {
        for (k, b) in basis.iter().enumerate() {
            let comm = b * *h - *h * b;
            for (r, v) in comm.iter().enumerate() {
                m[(c * d * d + r, k)] = *v;
            }
        }
    }
    let ns = linalg::null_space(&m, 1e-10);
    let out: Vec<RMat> = ns
        .basis
        .iter()
        .map(|v| {
            basis
                .iter()
                .zip(v.iter())
                .fold(RMat::zeros(d, d), |acc, (b, c)| acc + b * *c)
        })
        .collect();
    let residual = out
        .iter()
        .flat_map(|x| constraints.iter().map(move |h| max_abs(&(x * *h - *h * x))))
        .fold(0.0, f64::max);
    Ok(AlgebraBasis {
        dim: out.len(),
        basis: out,
        residual,
    })
}

/// The centralizer of the holonomy group in `sp(2n_v)`.
pub fn centralizer_algebra(p: &BundlePresentation) -> Result<AlgebraBasis> {
    commutant(p, &[])
}

/// Infinitesimal automorphisms of the bundle that also preserve the flat
/// taming `J0`.
pub fn autb_theta(p: &BundlePresentation, j0: &Taming) -> Result<AlgebraBasis> {
    if j0.n() != p.nv {
        return Err(Error::Dimension("taming and bundle differ in rank".into()));
    }
    commutant(p, std::slice::from_ref(j0.matrix()))
}

/// Sorted traces of all reduced words of length `1..=max_len` in the
/// generators and their inverses.
pub fn conjugacy_invariants(p: &BundlePresentation, max_len: usize) -> Result<Vec<f64>> {
    if max_len == 0 || max_len > MAX_WORD_LEN {
        return Err(Error::Invalid(format!(
            "word length must be between 1 and {MAX_WORD_LEN}, got {max_len}"
        )));
    }
    let k = p.generators.len() as i32;
    let letters: Vec<i32> = (1..=k).chain((1..=k).map(|l| -l)).collect();
    let mats: Vec<RMat> = letters.iter().map(|&l| p.letter(l)).collect();
    let mut traces = Vec::new();
    let d = 2 * p.nv;
    let mut stack: Vec<(RMat, i32, usize)> = vec![(RMat::identity(d, d), 0, 0)];
    while let Some((m, last, len)) = stack.pop() {
        if len == max_len {
            continue;
        }
        for (l, g) in letters.iter().zip(&mats) {
            if *l == -last {
                continue;
            }
            let w = &m * g;
            traces.push(w.trace());
            stack.push((w, *l, len + 1));
        }
    }
    traces.sort_by(f64::total_cmp);
    Ok(traces)
}

/// Whether two invariant lists certify that the representations are not
/// conjugate.  Equal lists do not prove conjugacy.
pub fn invariants_distinguish(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() != b.len()
        || a
            .iter()
            .zip(b)
            .any(|(x, y)| (x - y).abs() > tol * x.abs().max(1.0))
}
