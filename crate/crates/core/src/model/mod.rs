//! Scalar-dependent period matrices.
//!
//! A model file is a list of statements, one per line, with `#` starting a
//! comment:
//!
//! ```text
//! name = axio-dilaton
//! nv = 2
//! chart = poincare        # or `flat` together with `dim = k`
//! N[1,1] = tau
//! N[2,2] = -1/tau
//! ```
//!
//! Only entries with `i ≤ j` are written; the lower triangle is filled by
//! symmetry and omitted entries are zero.  On the Poincaré chart the symbols
//! are `tau`, `conj(tau)`, `x1 = Re τ` and `x2 = Im τ`; on a flat chart of
//! dimension `k` they are `x1..xk`.  The value of an entry is read as the
//! point `R + iI` of the Siegel upper half space, with `R` and `I` the
//! coefficient matrices of the gauge kinetic terms.

pub mod expr;

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::linalg;
use crate::symplectic::{self, gamma, EmPair, SiegelPoint, Taming};
use crate::{CMat, Error, RMat, Result};
pub use expr::{Env, Expr, Symbols};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    /// Upper half plane with metric `(dx² + dy²)/y²`.
    Poincare,
    /// `R^k` with the Euclidean metric.
    Flat(usize),
}

/// Chart of the scalar manifold with a sampling box.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarChart {
    pub kind: ChartKind,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl ScalarChart {
    pub fn poincare() -> Self {
        ScalarChart {
            kind: ChartKind::Poincare,
            lo: vec![-1.0, 0.5],
            hi: vec![1.0, 2.0],
        }
    }

    pub fn flat(dim: usize) -> Self {
        ScalarChart {
            kind: ChartKind::Flat(dim),
            lo: vec![-1.0; dim],
            hi: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            ChartKind::Poincare => 2,
            ChartKind::Flat(k) => k,
        }
    }

    pub fn symbols(&self) -> Symbols {
        Symbols {
            tau: self.kind == ChartKind::Poincare,
            coords: self.dim(),
        }
    }

    fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "chart point has {} coordinates, chart has {}",
                p.len(),
                self.dim()
            )));
        }
        if self.kind == ChartKind::Poincare && p[1] <= 0.0 {
            return Err(Error::domain("Im τ must be positive", -p[1], 0.0));
        }
        Ok(())
    }

    /// The scalar metric `𝒢_ij(p)`.
    pub fn metric(&self, p: &[f64]) -> Result<RMat> {
        self.check_point(p)?;
        let d = self.dim();
        Ok(match self.kind {
            ChartKind::Poincare => RMat::identity(2, 2) / (p[1] * p[1]),
            ChartKind::Flat(_) => RMat::identity(d, d),
        })
    }

    /// `∂_k 𝒢_ij(p)` for each `k`.
    pub fn metric_derivatives(&self, p: &[f64]) -> Result<Vec<RMat>> {
        self.check_point(p)?;
        let d = self.dim();
        let mut out = vec![RMat::zeros(d, d); d];
        if self.kind == ChartKind::Poincare {
            out[1] = RMat::identity(2, 2) * (-2.0 / p[1].powi(3));
        }
        Ok(out)
    }

    /// Christoffel symbols `Γ^i_jk(p)`, indexed `[i][(j, k)]`.
    pub fn christoffel(&self, p: &[f64]) -> Result<Vec<RMat>> {
        let g = self.metric(p)?;
        let dg = self.metric_derivatives(p)?;
        let ginv = linalg::inverse(&g, "scalar metric")?;
        let d = self.dim();
        let mut out = vec![RMat::zeros(d, d); d];
        for (i, gi) in out.iter_mut().enumerate() {
            for j in 0..d {
                for k in 0..d {
                    let mut s = 0.0;
                    for l in 0..d {
                        s += ginv[(i, l)] * (dg[j][(l, k)] + dg[k][(l, j)] - dg[l][(j, k)]);
                    }
                    gi[(j, k)] = 0.5 * s;
                }
            }
        }
        Ok(out)
    }

    /// Deterministic quasi-random points of the sampling box.
    pub fn samples(&self, count: usize) -> Vec<Vec<f64>> {
        crate::sampling::halton_box(&self.lo, &self.hi, count)
    }
}

/// A period-matrix model `φ ↦ N(φ)`.
#[derive(Debug, Clone)]
pub struct Model {
    pub name: String,
    pub nv: usize,
    pub chart: ScalarChart,
    entries: Vec<((usize, usize), Expr)>,
    derivatives: Vec<Vec<((usize, usize), Expr)>>,
}

impl Model {
    /// Builds a model from upper-triangular entries (zero based).
    pub fn new(
        name: impl Into<String>,
        nv: usize,
        chart: ScalarChart,
        entries: Vec<((usize, usize), Expr)>,
    ) -> Result<Self> {
        if nv == 0 {
            return Err(Error::Dimension("nv must be positive".into()));
        }
        for ((i, j), _) in &entries {
            if i > j {
                return Err(Error::Invalid(format!(
                    "entry N[{},{}] lies below the diagonal",
                    i + 1,
                    j + 1
                )));
            }
            if *j >= nv {
                return Err(Error::Dimension(format!(
                    "entry N[{},{}] does not fit nv = {nv}",
                    i + 1,
                    j + 1
                )));
            }
        }
        let derivatives = (0..chart.dim())
            .map(|k| {
                entries
                    .iter()
                    .map(|(ij, e)| (*ij, e.derivative(k)))
                    .collect()
            })
            .collect();
        Ok(Model {
            name: name.into(),
            nv,
            chart,
            entries,
            derivatives,
        })
    }

    pub fn entries(&self) -> &[((usize, usize), Expr)] {
        &self.entries
    }

    fn assemble(&self, entries: &[((usize, usize), Expr)], p: &[f64]) -> Result<CMat> {
        self.chart.check_point(p)?;
        let tau = match self.chart.kind {
            ChartKind::Poincare => Complex64::new(p[0], p[1]),
            ChartKind::Flat(_) => Complex64::new(0.0, 0.0),
        };
        let env = Env { tau, coords: p };
        let mut n = CMat::zeros(self.nv, self.nv);
        for ((i, j), e) in entries {
            let v = e.eval(&env)?;
            n[(*i, *j)] = v;
            n[(*j, *i)] = v;
        }
        Ok(n)
    }

    /// `N(p)` without the positivity test.
    pub fn period_raw(&self, p: &[f64]) -> Result<CMat> {
        self.assemble(&self.entries, p)
    }

    /// `N(p)` as a point of the Siegel upper half space.
    pub fn period(&self, p: &[f64]) -> Result<SiegelPoint> {
        let n = self.period_raw(p)?;
        SiegelPoint::new(n).map_err(|e| Error::ModelInvalid {
            model: self.name.clone(),
            at: format!("{p:?}"),
            message: e.to_string(),
        })
    }

    /// `∂_k N(p)`.
    pub fn period_derivative(&self, p: &[f64], k: usize) -> Result<CMat> {
        let d = self
            .derivatives
            .get(k)
            .ok_or_else(|| Error::Dimension(format!("no chart coordinate {k}")))?;
        self.assemble(d, p)
    }

    pub fn em_pair(&self, p: &[f64]) -> Result<EmPair> {
        let n = self.period(p)?;
        EmPair::new(n.re(), n.im())
    }

    pub fn taming(&self, p: &[f64]) -> Result<Taming> {
        Ok(gamma(&self.em_pair(p)?))
    }

    /// `(∂_k R, ∂_k I)`.
    pub fn em_derivative(&self, p: &[f64], k: usize) -> Result<(RMat, RMat)> {
        let d = self.period_derivative(p, k)?;
        Ok((linalg::re(&d), linalg::im(&d)))
    }

    /// `∂_k J`.
    pub fn taming_derivative(&self, p: &[f64], k: usize) -> Result<RMat> {
        let pair = self.em_pair(p)?;
        let (dr, di) = self.em_derivative(p, k)?;
        Ok(symplectic::gamma_derivative(&pair, &dr, &di))
    }

    /// Checks `N` on the given chart points, returning the first failure.
    pub fn validate(&self, points: &[Vec<f64>]) -> Result<()> {
        for p in points {
            self.period(p)?;
        }
        Ok(())
    }

    /// Model file text that parses back to an equivalent model.
    pub fn to_source(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "name = {}", self.name);
        let _ = writeln!(s, "nv = {}", self.nv);
        match self.chart.kind {
            ChartKind::Poincare => {
                let _ = writeln!(s, "chart = poincare");
            }
            ChartKind::Flat(k) => {
                let _ = writeln!(s, "chart = flat");
                let _ = writeln!(s, "dim = {k}");
            }
        }
        for ((i, j), e) in &self.entries {
            let _ = writeln!(s, "N[{},{}] = {}", i + 1, j + 1, e);
        }
        s
    }
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Parses an entry target `N[i,j]`, returning zero-based indices.
fn parse_target(lhs: &str, line: usize, col: usize) -> Result<(usize, usize)> {
    let inner = lhs
        .strip_prefix("N[")
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| parse_err(line, col, format!("expected `N[i,j]`, found `{lhs}`")))?;
    let mut parts = inner.split(',').map(str::trim);
    let mut index = || -> Result<usize> {
        parts
            .next()
            .and_then(|t| t.parse::<usize>().ok())
            .filter(|&k| k >= 1)
            .map(|k| k - 1)
            .ok_or_else(|| parse_err(line, col, format!("bad index in `{lhs}`")))
    };
    let i = index()?;
    let j = index()?;
    if parts.next().is_some() {
        return Err(parse_err(line, col, format!("too many indices in `{lhs}`")));
    }
    Ok((i, j))
}

/// Parses a model file.
pub fn parse_model(text: &str) -> Result<Model> {
    let mut name = None;
    let mut nv: Option<usize> = None;
    let mut chart_kind = None;
    let mut dim: Option<usize> = None;
    let mut raw: Vec<((usize, usize), &str, usize, usize)> = Vec::new();

    for (ln, full) in text.lines().enumerate() {
        let line = ln + 1;
        let body = full.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let eq = body
            .find('=')
            .ok_or_else(|| parse_err(line, 1, "expected `key = value`"))?;
        let lhs = body[..eq].trim();
        let lhs_col = body.find(|c: char| !c.is_whitespace()).unwrap_or(0) + 1;
        let rhs = &body[eq + 1..];
        let rhs_col = body[..eq + 1].chars().count() + 1;
        let value = rhs.trim();
        let int = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| parse_err(line, rhs_col, format!("expected an integer, found `{v}`")))
        };
        match lhs {
            "name" => name = Some(value.to_string()),
            "nv" => nv = Some(int(value)?),
            "dim" => dim = Some(int(value)?),
            "chart" => {
                chart_kind = Some(match value {
                    "poincare" => "poincare",
                    "flat" => "flat",
                    other => {
                        return Err(parse_err(line, rhs_col, format!("unknown chart `{other}`")))
                    }
                })
            }
            _ if lhs.starts_with('N') => {
                let ij = parse_target(&lhs.replace(' ', ""), line, lhs_col)?;
                if ij.0 > ij.1 {
                    return Err(parse_err(
                        line,
                        lhs_col,
                        format!("entry N[{},{}] lies below the diagonal", ij.0 + 1, ij.1 + 1),
                    ));
                }
                if raw.iter().any(|(k, ..)| *k == ij) {
                    return Err(parse_err(
                        line,
                        lhs_col,
                        format!("entry N[{},{}] given twice", ij.0 + 1, ij.1 + 1),
                    ));
                }
                raw.push((ij, rhs, line, rhs_col));
            }
            other => return Err(parse_err(line, lhs_col, format!("unknown key `{other}`"))),
        }
    }

    let chart = match (chart_kind.unwrap_or("poincare"), dim) {
        ("poincare", None | Some(2)) => ScalarChart::poincare(),
        ("poincare", Some(d)) => {
            return Err(Error::Dimension(format!("the Poincaré chart has dimension 2, not {d}")))
        }
        (_, Some(d)) if d > 0 => ScalarChart::flat(d),
        _ => return Err(Error::Dimension("a flat chart needs `dim = k` with k > 0".into())),
    };
    let max_index = raw.iter().map(|((_, j), ..)| j + 1).max().unwrap_or(0);
    let nv = match nv {
        Some(n) if n < max_index => {
            return Err(Error::Dimension(format!(
                "declared nv = {n} but the entry table reaches index {max_index}"
            )))
        }
        Some(n) => n,
        None => max_index,
    };
    let symbols = chart.symbols();
    let mut entries = Vec::with_capacity(raw.len());
    for (ij, src, line, col) in raw {
        entries.push((ij, expr::parse_at(src, &symbols, line, col)?));
    }
    entries.sort_by_key(|(ij, _)| *ij);
    Model::new(name.unwrap_or_else(|| "unnamed".into()), nv, chart, entries)
}

/// Reads and parses a model file.
pub fn load_model(path: &std::path::Path) -> Result<Model> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_model(&text)
}

/// Names accepted by [`builtin`].  `constant-i` also accepts a rank suffix,
/// as in `constant-i:3`.
pub const BUILTIN_NAMES: [&str; 4] = ["constant-i", "identity-tau", "axio-dilaton", "t3"];

/// Source text of a builtin model.
pub fn builtin_source(name: &str) -> Result<String> {
    let not_found = || Error::NotFound {
        kind: "model",
        name: name.to_string(),
    };
    if let Some(rest) = name.strip_prefix("constant-i") {
        let n = match rest.strip_prefix(':') {
            Some(k) => k.parse::<usize>().ok().filter(|&k| k >= 1).ok_or_else(not_found)?,
            None if rest.is_empty() => 1,
            None => return Err(not_found()),
        };
        let mut s = format!("name = {name}\nnv = {n}\nchart = poincare\n");
        for k in 1..=n {
            let _ = writeln!(s, "N[{k},{k}] = i");
        }
        return Ok(s);
    }
    Ok(match name {
        "identity-tau" => "name = identity-tau\nnv = 1\nchart = poincare\nN[1,1] = tau\n".into(),
        "axio-dilaton" => "name = axio-dilaton\nnv = 2\nchart = poincare\n\
                           N[1,1] = tau\nN[2,2] = -1/tau\n"
            .into(),
        "t3" => "name = t3\nnv = 2\nchart = poincare\n\
                 N[1,1] = (tau^2/2)*(tau + 3*conj(tau))\n\
                 N[1,2] = -(3/2)*tau*(tau + conj(tau))\n\
                 N[2,2] = 3*(tau + conj(tau)) + (3/2)*(tau - conj(tau))\n"
            .into(),
        _ => return Err(not_found()),
    })
}

pub fn builtin(name: &str) -> Result<Model> {
    parse_model(&builtin_source(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn t3_imaginary_part() {
        let m = builtin("t3").unwrap();
        let im = m.period(&[0.0, 1.0]).unwrap().im();
        assert!(max_abs(&(im - RMat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 3.0]))) < 1e-14);
        let im = m.period(&[0.0, 2.0]).unwrap().im();
        assert!(max_abs(&(im - RMat::from_row_slice(2, 2, &[8.0, 0.0, 0.0, 6.0]))) < 1e-13);
    }

    #[test]
    fn builtins_are_valid_on_samples() {
        for name in BUILTIN_NAMES.iter().copied().chain(["constant-i:3"]) {
            let m = builtin(name).unwrap();
            m.validate(&m.chart.samples(16)).unwrap();
        }
        assert_eq!(builtin("constant-i:3").unwrap().nv, 3);
        assert!(matches!(builtin("nope"), Err(Error::NotFound { .. })));
    }

    #[test]
    fn entry_without_header() {
        let m = parse_model("N[1,1] = tau").unwrap();
        assert_eq!(m.nv, 1);
        let n = m.period(&[0.25, 1.5]).unwrap();
        assert_eq!(n.matrix()[(0, 0)], Complex64::new(0.25, 1.5));
    }

    #[test]
    fn rejections() {
        assert!(matches!(
            parse_model("nv = 2\nN[2,1] = tau"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_model("nv = 1\nN[1,2] = tau"),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            parse_model("chart = flat\ndim = 1\nN[1,1] = tau"),
            Err(Error::UnknownSymbol { line: 3, column: 10, .. })
        ));
        assert!(matches!(
            parse_model("N[1,1] = i\nN[1,1] = 2*i"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn indefinite_imaginary_part_is_reported() {
        let m = parse_model("N[1,1] = -tau").unwrap();
        assert!(matches!(m.period(&[0.0, 1.0]), Err(Error::ModelInvalid { .. })));
    }

    #[test]
    fn source_round_trip() {
        for name in BUILTIN_NAMES {
            let m = builtin(name).unwrap();
            let back = parse_model(&m.to_source()).unwrap();
            assert_eq!(back.entries(), m.entries());
        }
    }

    #[test]
    fn derivative_matches_difference() {
        let m = builtin("t3").unwrap();
        let p = [0.3, 1.2];
        let h = 1e-6;
        for k in 0..2 {
            let mut a = p;
            let mut b = p;
            a[k] += h;
            b[k] -= h;
            let fd = (m.period_raw(&a).unwrap() - m.period_raw(&b).unwrap()) / Complex64::new(2.0 * h, 0.0);
            let d = m.period_derivative(&p, k).unwrap();
            assert!(linalg::max_abs_c(&(fd - d)) < 1e-8);
        }
    }

    #[test]
    fn poincare_christoffel() {
        // Γ^x_xy = -1/y, Γ^y_xx = 1/y, Γ^y_yy = -1/y.
        let c = ScalarChart::poincare();
        let g = c.christoffel(&[0.0, 2.0]).unwrap();
        assert!((g[0][(0, 1)] + 0.5).abs() < 1e-15);
        assert!((g[1][(0, 0)] - 0.5).abs() < 1e-15);
        assert!((g[1][(1, 1)] + 0.5).abs() < 1e-15);
        assert_eq!(g[0][(0, 0)], 0.0);
    }
}
