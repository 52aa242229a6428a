//! The symplectic vector space `(S, ω)`, tamings, electromagnetic pairs and
//! the Siegel upper half space.
//!
//! `S = R^{2n}` carries the basis `(e_1..e_n, f_1..f_n)` and
//! `ω(x, y) = xᵀ Ω y` with `Ω = [[0, -1], [1, 0]]`.  A taming is a real
//! operator `J` with `J² = -1`, `Jᵀ Ω J = Ω` and `Ω J` positive definite.
//! An electromagnetic pair `(R, I)` has `R` symmetric and `I` symmetric
//! positive definite; it is sent to the taming
//!
//! ```text
//! J = [[ -I⁻¹R,        I⁻¹ ],
//!      [ -I - R I⁻¹ R,  R I⁻¹ ]]
//! ```
//!
//! and to the point `τ = R + iI` of the Siegel upper half space.  With
//! `A = [[a, b], [c, d]]` the fractional action is
//! `A·τ = (c + dτ)(a + bτ)⁻¹`, for which `μ(A J A⁻¹) = A·μ(J)`.

use nalgebra::DMatrix;

use crate::linalg::{self, max_abs, max_abs_c};
use crate::{CMat, Error, RMat, Result};

/// Tolerance of purely algebraic identities.
pub const TOL_ALG: f64 = 1e-10;
/// Tolerance of identities that pass through a matrix inversion.
pub const TOL_INV: f64 = 1e-8;

/// The matrix `Ω` of the standard symplectic form on `R^{2n}`.
pub fn omega(n: usize) -> RMat {
    let mut m = RMat::zeros(2 * n, 2 * n);
    for k in 0..n {
        m[(k, n + k)] = -1.0;
        m[(n + k, k)] = 1.0;
    }
    m
}

/// `ω(x, y) = xᵀ Ω y`.
pub fn omega_pairing(x: &nalgebra::DVector<f64>, y: &nalgebra::DVector<f64>) -> f64 {
    let n = x.len() / 2;
    (0..n).map(|k| x[n + k] * y[k] - x[k] * y[n + k]).sum()
}

fn half_dim(m: &RMat, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() % 2 != 0 || m.nrows() == 0 {
        return Err(Error::Dimension(format!(
            "{what} must be a non-empty square matrix of even size, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows() / 2)
}

/// Outcome of testing `AᵀΩA = Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpCheck {
    /// `max |AᵀΩA - Ω|` divided by `max(1, ‖A‖²)`.
    pub violation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Tests whether `a` preserves `ω` within `tol` (relative to `‖a‖²`).
pub fn sp_check(a: &RMat, tol: f64) -> Result<SpCheck> {
    let n = half_dim(a, "symplectic matrix")?;
    let om = omega(n);
    let scale = max_abs(a).powi(2).max(1.0);
    let violation = max_abs(&(a.transpose() * &om * a - &om)) / scale;
    Ok(SpCheck {
        violation,
        tolerance: tol,
        pass: violation <= tol,
    })
}

/// An element of `Sp(2n, R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    m: RMat,
}

impl SymplecticMatrix {
    pub fn new(m: RMat) -> Result<Self> {
        Self::with_tolerance(m, TOL_ALG)
    }

    pub fn with_tolerance(m: RMat, tol: f64) -> Result<Self> {
        let c = sp_check(&m, tol)?;
        if !c.pass {
            return Err(Error::domain("matrix is not symplectic", c.violation, tol));
        }
        Ok(SymplecticMatrix { m })
    }

    pub fn identity(n: usize) -> Self {
        SymplecticMatrix {
            m: RMat::identity(2 * n, 2 * n),
        }
    }

    pub fn n(&self) -> usize {
        self.m.nrows() / 2
    }

    pub fn matrix(&self) -> &RMat {
        &self.m
    }

    pub fn into_matrix(self) -> RMat {
        self.m
    }

    /// `A⁻¹ = -Ω Aᵀ Ω`.
    pub fn inverse(&self) -> SymplecticMatrix {
        let om = omega(self.n());
        SymplecticMatrix {
            m: -(&om * self.m.transpose() * &om),
        }
    }

    pub fn compose(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix {
            m: &self.m * &other.m,
        }
    }

    /// The blocks `(a, b, c, d)` of `A = [[a, b], [c, d]]`.
    pub fn blocks(&self) -> (RMat, RMat, RMat, RMat) {
        blocks(&self.m)
    }
}

pub(crate) fn blocks(m: &RMat) -> (RMat, RMat, RMat, RMat) {
    let n = m.nrows() / 2;
    (
        m.view((0, 0), (n, n)).into_owned(),
        m.view((0, n), (n, n)).into_owned(),
        m.view((n, 0), (n, n)).into_owned(),
        m.view((n, n), (n, n)).into_owned(),
    )
}

pub(crate) fn from_blocks(a: &RMat, b: &RMat, c: &RMat, d: &RMat) -> RMat {
    let n = a.nrows();
    let mut m = RMat::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, n)).copy_from(b);
    m.view_mut((n, 0), (n, n)).copy_from(c);
    m.view_mut((n, n), (n, n)).copy_from(d);
    m
}

/// Tests `XᵀΩ + ΩX = 0`, returning the largest violation.
pub fn sp_algebra_violation(x: &RMat) -> Result<f64> {
    let n = half_dim(x, "algebra element")?;
    let om = omega(n);
    Ok(max_abs(&(x.transpose() * &om + &om * x)))
}

/// Basis of `sp(2n, R)`: the matrices `-Ω S` where `S` is the symmetric
/// matrix with ones at `(i, j)` and `(j, i)`, `i ≤ j`, in lexicographic
/// order of `(i, j)`.
pub fn sp_basis(n: usize) -> Vec<RMat> {
    let om = omega(n);
    let d = 2 * n;
    let mut out = Vec::with_capacity(n * (2 * n + 1));
    for i in 0..d {
        for j in i..d {
            let mut s = RMat::zeros(d, d);
            s[(i, j)] = 1.0;
            s[(j, i)] = 1.0;
            out.push(-(&om * s));
        }
    }
    out
}

/// Coordinates of `x ∈ sp(2n)` in [`sp_basis`].
pub fn sp_coordinates(x: &RMat) -> Result<Vec<f64>> {
    let n = half_dim(x, "algebra element")?;
    // Ω(-ΩS) = S, so the symmetric matrix ΩX carries the coordinates.
    let s = omega(n) * x;
    let d = 2 * n;
    let mut out = Vec::with_capacity(n * (2 * n + 1));
    for i in 0..d {
        for j in i..d {
            out.push(s[(i, j)]);
        }
    }
    Ok(out)
}

/// An electromagnetic pair `(R, I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmPair {
    pub r: RMat,
    pub i: RMat,
}

impl EmPair {
    pub fn new(r: RMat, i: RMat) -> Result<Self> {
        if r.nrows() != r.ncols() || i.shape() != r.shape() || r.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "R is {}x{} and I is {}x{}",
                r.nrows(),
                r.ncols(),
                i.nrows(),
                i.ncols()
            )));
        }
        let scale = max_abs(&r).max(max_abs(&i)).max(1.0);
        let asym = linalg::asymmetry(&r).max(linalg::asymmetry(&i)) / scale;
        if asym > TOL_ALG {
            return Err(Error::domain("R and I must be symmetric", asym, TOL_ALG));
        }
        if !linalg::is_positive_definite(&i) {
            return Err(Error::domain(
                "I must be positive definite",
                -linalg::min_sym_eigenvalue(&i),
                0.0,
            ));
        }
        Ok(EmPair { r, i })
    }

    pub fn n(&self) -> usize {
        self.r.nrows()
    }
}

/// A taming of `(S, ω)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Taming {
    j: RMat,
}

/// Violations of the three taming conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TamingCheck {
    pub square: f64,
    pub symplectic: f64,
    pub asymmetry: f64,
    pub min_eigenvalue: f64,
}

impl TamingCheck {
    pub fn pass(&self, tol: f64) -> bool {
        self.square <= tol && self.symplectic <= tol && self.asymmetry <= tol && self.min_eigenvalue > 0.0
    }
}

pub fn taming_check(j: &RMat) -> Result<TamingCheck> {
    let n = half_dim(j, "taming")?;
    let om = omega(n);
    let scale = max_abs(j).powi(2).max(1.0);
    let id = RMat::identity(2 * n, 2 * n);
    let q = &om * j;
    Ok(TamingCheck {
        square: max_abs(&(j * j + &id)) / scale,
        symplectic: max_abs(&(j.transpose() * &om * j - &om)) / scale,
        asymmetry: linalg::asymmetry(&q) / scale.sqrt(),
        min_eigenvalue: linalg::min_sym_eigenvalue(&q),
    })
}

impl Taming {
    pub fn new(j: RMat) -> Result<Self> {
        let c = taming_check(&j)?;
        let worst = c.square.max(c.symplectic).max(c.asymmetry);
        if worst > TOL_INV {
            return Err(Error::domain("not a complex structure compatible with ω", worst, TOL_INV));
        }
        if !linalg::is_positive_definite(&(omega(j.nrows() / 2) * &j)) {
            return Err(Error::domain("ΩJ is not positive definite", -c.min_eigenvalue, 0.0));
        }
        Ok(Taming { j })
    }

    /// The standard taming `J₀ = -Ω`, image of `(R, I) = (0, 1)`.
    pub fn standard(n: usize) -> Self {
        Taming { j: -omega(n) }
    }

    pub fn n(&self) -> usize {
        self.j.nrows() / 2
    }

    pub fn matrix(&self) -> &RMat {
        &self.j
    }

    pub fn into_matrix(self) -> RMat {
        self.j
    }

    /// Builds a taming without checks, for values produced by operations
    /// that preserve the taming conditions.
    pub fn from_matrix_unchecked(j: RMat) -> Self {
        Taming { j }
    }

    /// The symmetric positive form `Q = ΩJ`, so that `Q(x, y) = ω(x, Jy)`.
    pub fn metric(&self) -> RMat {
        omega(self.n()) * &self.j
    }
}

/// A point of the Siegel upper half space.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelPoint {
    tau: CMat,
}

impl SiegelPoint {
    pub fn new(tau: CMat) -> Result<Self> {
        if tau.nrows() != tau.ncols() || tau.nrows() == 0 {
            return Err(Error::Dimension(format!(
                "period matrix must be square, got {}x{}",
                tau.nrows(),
                tau.ncols()
            )));
        }
        let scale = max_abs_c(&tau).max(1.0);
        let asym = linalg::asymmetry_c(&tau) / scale;
        if asym > TOL_ALG {
            return Err(Error::domain("period matrix must be symmetric", asym, TOL_ALG));
        }
        let im = linalg::im(&tau);
        if !linalg::is_positive_definite(&im) {
            return Err(Error::domain(
                "imaginary part must be positive definite",
                -linalg::min_sym_eigenvalue(&im),
                0.0,
            ));
        }
        Ok(SiegelPoint { tau })
    }

    pub fn from_parts(re: &RMat, im: &RMat) -> Result<Self> {
        Self::new(linalg::complex_from_parts(re, im))
    }

    pub fn n(&self) -> usize {
        self.tau.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.tau
    }

    pub fn re(&self) -> RMat {
        linalg::re(&self.tau)
    }

    pub fn im(&self) -> RMat {
        linalg::im(&self.tau)
    }
}

/// `Γ(R, I)`.
pub fn gamma(p: &EmPair) -> Taming {
    let iinv = p.i.clone().try_inverse().expect("I is positive definite");
    let a = -(&iinv * &p.r);
    let d = &p.r * &iinv;
    let c = -(&p.i + &p.r * &iinv * &p.r);
    Taming {
        j: from_blocks(&a, &iinv, &c, &d),
    }
}

/// Inverse of [`gamma`].
///
/// The columns of `F = [0; 1]` span the `f`-plane.  Solving
/// `F X + J F Y = [1; 0]` expresses `e_a` in the `J`-complex basis
/// `f_b`, and the coefficient matrices give `R = -Xᵀ`, `I = Yᵀ`.
pub fn gamma_inv(j: &Taming) -> Result<EmPair> {
    let n = j.n();
    let mut f = RMat::zeros(2 * n, n);
    f.view_mut((n, 0), (n, n)).fill_with_identity();
    let jf = j.matrix() * &f;
    let mut sys = RMat::zeros(2 * n, 2 * n);
    sys.view_mut((0, 0), (2 * n, n)).copy_from(&f);
    sys.view_mut((0, n), (2 * n, n)).copy_from(&jf);
    let mut rhs = RMat::zeros(2 * n, n);
    rhs.view_mut((0, 0), (n, n)).fill_with_identity();
    let sol = sys
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Instability("f-plane is not J-complex".into()))?;
    let x = sol.view((0, 0), (n, n)).transpose();
    let y = sol.view((n, 0), (n, n)).transpose();
    let r = -(&x + x.transpose()) * 0.5;
    let i = (&y + y.transpose()) * 0.5;
    EmPair::new(r, i)
}

/// `μ(J) = R + iI` where `(R, I) = Γ⁻¹(J)`.
pub fn mu(j: &Taming) -> Result<SiegelPoint> {
    let p = gamma_inv(j)?;
    SiegelPoint::from_parts(&p.r, &p.i)
}

/// `μ⁻¹(τ) = Γ(Re τ, Im τ)`.
pub fn mu_inv(tau: &SiegelPoint) -> Result<Taming> {
    Ok(gamma(&EmPair::new(tau.re(), tau.im())?))
}

/// The period matrix `𝒩 = -R + iI` of a taming, the matrix for which
/// `G⁺ = 𝒩̄ F⁺` in the electric-magnetic splitting.
pub fn period_matrix(j: &Taming) -> Result<CMat> {
    let p = gamma_inv(j)?;
    Ok(linalg::complex_from_parts(&(-p.r), &p.i))
}

/// `A·τ = (c + dτ)(a + bτ)⁻¹`.
pub fn fractional_action(a: &SymplecticMatrix, tau: &SiegelPoint) -> Result<SiegelPoint> {
    if a.n() != tau.n() {
        return Err(Error::Dimension(format!(
            "Sp(2·{}) cannot act on a {}x{} period matrix",
            a.n(),
            tau.n(),
            tau.n()
        )));
    }
    let (ab, bb, cb, db) = a.blocks();
    let t = tau.matrix();
    let den = linalg::to_complex(&ab) + linalg::to_complex(&bb) * t;
    let num = linalg::to_complex(&cb) + linalg::to_complex(&db) * t;
    let inv = linalg::inverse_c(&den, "a + bτ")?;
    SiegelPoint::new(num * inv)
}

/// Derivative of the fractional action at the identity in direction
/// `X ∈ sp(2n)`: `(X_c + X_d τ) - τ (X_a + X_b τ)`.
pub fn infinitesimal_action(x: &RMat, tau: &CMat) -> CMat {
    let (xa, xb, xc, xd) = blocks(x);
    let c = |m: &RMat| linalg::to_complex(m);
    c(&xc) + c(&xd) * tau - tau * (c(&xa) + c(&xb) * tau)
}

/// `A J A⁻¹`.
pub fn conjugate(a: &SymplecticMatrix, j: &Taming) -> Result<Taming> {
    if a.n() != j.n() {
        return Err(Error::Dimension("symplectic matrix and taming differ in size".into()));
    }
    Ok(Taming {
        j: a.matrix() * j.matrix() * a.inverse().matrix(),
    })
}

/// Derivative of the taming `Γ(R, I)` along a path with derivatives
/// `(dR, dI)`.
pub fn gamma_derivative(p: &EmPair, dr: &RMat, di: &RMat) -> RMat {
    let iinv = p.i.clone().try_inverse().expect("I is positive definite");
    let diinv = -(&iinv * di * &iinv);
    let a = -(&diinv * &p.r + &iinv * dr);
    let d = dr * &iinv + &p.r * &diinv;
    let c = -(di + dr * &iinv * &p.r + &p.r * &diinv * &p.r + &p.r * &iinv * dr);
    from_blocks(&a, &diinv, &c, &d)
}

/// Bilinear form `Q(x, y) = ω(x, J y)` on `S`.
pub fn taming_metric(j: &Taming) -> DMatrix<f64> {
    j.metric()
}
