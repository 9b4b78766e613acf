//! Finite-dimensional Euler-Arnold machinery.
//!
//! Everything here is exact (dense linear algebra on coefficient vectors),
//! which makes it the ground-truth substrate for the spectral solvers: the
//! geodesic right-hand sides for plain algebras and for semidirect, central,
//! Abelian, general and central-of-semidirect extensions, each assembled
//! from the implicitly defined maps `h`, `l`, `k`, `alpha^T` by dense solves
//! against the Gram matrices.
//!
//! Sign conventions, fixed once here and used everywhere:
//! * `ad(X)^T` is defined by `<ad(X)^T Y, Z> = <Y, [X, Z]>`;
//! * the coadjoint action is `(ad*(X)m, Y) = (m, -[X, Y])`;
//! * the geodesic (Euler) equation is `du/dt = -ad(u)^T u`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

/// Coefficient vector in a fixed basis of `g`, `V`, or a product thereof.
pub type Coef = DVector<f64>;

/// Default per-entry tolerance for the Jacobi identity at construction.
pub const JACOBI_TOL: f64 = 1e-12;
/// Consistency tolerance for derived extension data (1-cocycles, curvature
/// identity of general extensions).
pub const CONSISTENCY_TOL: f64 = 1e-10;

/// A Lie algebra given by structure constants plus a scalar product.
///
/// `c[i][j][k]` means `[e_i, e_j] = sum_k c[i][j][k] e_k`; `gram` is the
/// symmetric positive-definite matrix of `<e_i, e_j>`.
#[derive(Debug, Clone)]
pub struct FiniteLieAlgebra {
    dim: usize,
    c: Vec<f64>,
    gram: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl FiniteLieAlgebra {
    pub fn new(dim: usize, c: Vec<f64>, gram: DMatrix<f64>) -> Result<Self> {
        Self::with_jacobi_tol(dim, c, gram, JACOBI_TOL)
    }

    /// Extension algebras built by the oracle carry accumulated roundoff
    /// from dense solves, so they validate against a looser Jacobi bound.
    pub fn with_jacobi_tol(
        dim: usize,
        c: Vec<f64>,
        gram: DMatrix<f64>,
        jacobi_tol: f64,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidAlgebra("dimension must be positive".into()));
        }
        if c.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                got: c.len(),
            });
        }
        if gram.nrows() != dim || gram.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: gram.nrows(),
            });
        }
        let scale = c.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let idx = |i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    if (c[idx(i, j, k)] + c[idx(j, i, k)]).abs() > 1e-14 * scale {
                        return Err(Error::InvalidAlgebra(format!(
                            "structure constants not antisymmetric at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        // Jacobi: sum_cycl [[e_i,e_j],e_k] = 0, per output component.
        for i in 0..dim {
            for j in (i + 1)..dim {
                for k in (j + 1)..dim {
                    for l in 0..dim {
                        let mut r = 0.0;
                        for m in 0..dim {
                            r += c[idx(i, j, m)] * c[idx(m, k, l)];
                            r += c[idx(j, k, m)] * c[idx(m, i, l)];
                            r += c[idx(k, i, m)] * c[idx(m, j, l)];
                        }
                        if r.abs() > jacobi_tol * scale.powi(2).max(1.0) {
                            return Err(Error::InvalidAlgebra(format!(
                                "Jacobi identity fails on ({i},{j},{k}): residual {r:.3e}"
                            )));
                        }
                    }
                }
            }
        }
        let sym = (&gram - gram.transpose()).abs().max();
        if sym > 1e-12 * gram.abs().max().max(1.0) {
            return Err(Error::InvalidAlgebra("gram matrix not symmetric".into()));
        }
        let chol = Cholesky::new(gram.clone())
            .ok_or_else(|| Error::InvalidAlgebra("gram matrix not positive definite".into()))?;
        Ok(Self { dim, c, gram, chol })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    fn check_dim(&self, x: &Coef) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn inner(&self, x: &Coef, y: &Coef) -> f64 {
        (x.transpose() * &self.gram * y)[(0, 0)]
    }

    pub fn bracket(&self, x: &Coef, y: &Coef) -> Coef {
        let mut out = Coef::zeros(self.dim);
        for i in 0..self.dim {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..self.dim {
                if y[j] == 0.0 {
                    continue;
                }
                let w = x[i] * y[j];
                for k in 0..self.dim {
                    out[k] += w * self.structure_constant(i, j, k);
                }
            }
        }
        out
    }

    /// Matrix of `ad(x): y -> [x, y]` in the basis.
    pub fn ad_matrix(&self, x: &Coef) -> Result<DMatrix<f64>> {
        self.check_dim(x)?;
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..self.dim {
                for k in 0..self.dim {
                    m[(k, j)] += x[i] * self.structure_constant(i, j, k);
                }
            }
        }
        Ok(m)
    }

    /// `ad(x)^T = G^{-1} ad(x)^t G`, the metric adjoint of `ad(x)`.
    pub fn ad_transpose(&self, x: &Coef) -> Result<DMatrix<f64>> {
        let a = self.ad_matrix(x)?;
        let mut m = a.transpose() * &self.gram;
        self.chol.solve_mut(&mut m);
        Ok(m)
    }

    /// Right-hand side of the plain Euler equation, `-ad(u)^T u`.
    pub fn euler_rhs_plain(&self, u: &Coef) -> Result<Coef> {
        Ok(-(self.ad_transpose(u)? * u))
    }

    /// Residual of the inertia identity `A(-ad(u)^T u) = ad*(u) A(u)`,
    /// measured in the sup norm. Zero up to roundoff for any valid algebra.
    pub fn hamiltonian_residual(&self, u: &Coef) -> Result<f64> {
        self.check_dim(u)?;
        let m = &self.gram * u;
        let coad_rate = -(self.ad_matrix(u)?.transpose() * &m);
        let lhs = &self.gram * self.euler_rhs_plain(u)?;
        Ok((lhs - coad_rate).abs().max())
    }
}

/// The extension data `(b, omega)` for an extension of `g` by `V`, together
/// with a scalar product on `V`. When `h_bracket` is present `V` is itself
/// a Lie algebra `h` and the data describes a general extension.
#[derive(Debug, Clone)]
pub struct ExtensionData {
    dim_g: usize,
    dim_v: usize,
    /// `b(e_i)` as a matrix on `V`, one per basis vector of `g`.
    action: Vec<DMatrix<f64>>,
    /// `omega(e_i, e_j) in V`, flattened at `i * dim_g + j`.
    cocycle: Vec<DVector<f64>>,
    gram_v: DMatrix<f64>,
    chol_v: Cholesky<f64, Dyn>,
    /// Structure constants of `h` when `V` carries a bracket of its own.
    h_bracket: Option<Vec<f64>>,
    invariant: bool,
}

impl ExtensionData {
    pub fn new(
        alg: &FiniteLieAlgebra,
        action: Vec<DMatrix<f64>>,
        cocycle: Vec<DVector<f64>>,
        gram_v: DMatrix<f64>,
        h_bracket: Option<Vec<f64>>,
        invariant: bool,
    ) -> Result<Self> {
        let dim_g = alg.dim();
        let dim_v = gram_v.nrows();
        if action.len() != dim_g {
            return Err(Error::DimensionMismatch {
                expected: dim_g,
                got: action.len(),
            });
        }
        for b in &action {
            if b.nrows() != dim_v || b.ncols() != dim_v {
                return Err(Error::DimensionMismatch {
                    expected: dim_v,
                    got: b.nrows(),
                });
            }
        }
        if cocycle.len() != dim_g * dim_g {
            return Err(Error::DimensionMismatch {
                expected: dim_g * dim_g,
                got: cocycle.len(),
            });
        }
        for w in &cocycle {
            if w.len() != dim_v {
                return Err(Error::DimensionMismatch {
                    expected: dim_v,
                    got: w.len(),
                });
            }
        }
        let chol_v = Cholesky::new(gram_v.clone())
            .ok_or_else(|| Error::InvalidExtension("gram_V not positive definite".into()))?;
        let ext = Self {
            dim_g,
            dim_v,
            action,
            cocycle,
            gram_v,
            chol_v,
            h_bracket,
            invariant,
        };
        ext.validate(alg)?;
        Ok(ext)
    }

    fn validate(&self, alg: &FiniteLieAlgebra) -> Result<()> {
        let scale = self.scale();
        for i in 0..self.dim_g {
            for j in 0..self.dim_g {
                let r = (self.omega(i, j) + self.omega(j, i)).abs().max();
                if r > 1e-14 * scale {
                    return Err(Error::InvalidExtension(format!(
                        "cocycle not antisymmetric at ({i},{j})"
                    )));
                }
            }
        }
        // 2-cocycle identity, extended by the curvature term when V = h is
        // a Lie algebra (then it is automatic from the section formulas but
        // caller-supplied data must still satisfy it).
        for i in 0..self.dim_g {
            for j in 0..self.dim_g {
                for k in 0..self.dim_g {
                    let ei = basis(self.dim_g, i);
                    let ej = basis(self.dim_g, j);
                    let ek = basis(self.dim_g, k);
                    let mut lhs = self.omega_of(&alg.bracket(&ei, &ej), &ek);
                    lhs += self.omega_of(&alg.bracket(&ej, &ek), &ei);
                    lhs += self.omega_of(&alg.bracket(&ek, &ei), &ej);
                    let mut rhs = &self.action[i] * self.omega(j, k);
                    rhs += &self.action[j] * self.omega(k, i);
                    rhs += &self.action[k] * self.omega(i, j);
                    if (lhs - rhs).abs().max() > JACOBI_TOL * scale.powi(2).max(1.0) {
                        return Err(Error::InvalidExtension(format!(
                            "2-cocycle identity fails on ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        if self.invariant {
            for (i, b) in self.action.iter().enumerate() {
                let r = (b.transpose() * &self.gram_v + &self.gram_v * b).abs().max();
                if r > 1e-12 * scale {
                    return Err(Error::InvalidExtension(format!(
                        "gram_V is not g-invariant under b(e_{i})"
                    )));
                }
            }
        }
        if self.h_bracket.is_some() {
            // [b(X1), b(X2)] - b([X1, X2]) = ad_h(omega(X1, X2)).
            for i in 0..self.dim_g {
                for j in 0..self.dim_g {
                    let comm = &self.action[i] * &self.action[j] - &self.action[j] * &self.action[i];
                    let ei = basis(self.dim_g, i);
                    let ej = basis(self.dim_g, j);
                    let br = alg.bracket(&ei, &ej);
                    let mut b_br = DMatrix::zeros(self.dim_v, self.dim_v);
                    for (m, bm) in self.action.iter().enumerate() {
                        if br[m] != 0.0 {
                            b_br += bm * br[m];
                        }
                    }
                    let ad_om = self.ad_h_matrix(&self.omega(i, j).clone_owned());
                    let r = (comm - b_br - ad_om).abs().max();
                    if r > CONSISTENCY_TOL * scale.powi(2).max(1.0) {
                        return Err(Error::InvalidExtension(format!(
                            "curvature identity fails on ({i},{j}): residual {r:.3e}"
                        )));
                    }
                    // b(e_i) must be a derivation of h for the extension
                    // bracket to satisfy Jacobi.
                }
            }
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        let a = self
            .action
            .iter()
            .fold(1.0f64, |m, b| m.max(b.abs().max()));
        self.cocycle
            .iter()
            .fold(a, |m, w| m.max(w.abs().max()))
    }

    pub fn dim_v(&self) -> usize {
        self.dim_v
    }

    pub fn gram_v(&self) -> &DMatrix<f64> {
        &self.gram_v
    }

    pub fn is_invariant(&self) -> bool {
        self.invariant
    }

    pub fn has_h_bracket(&self) -> bool {
        self.h_bracket.is_some()
    }

    pub fn omega(&self, i: usize, j: usize) -> &DVector<f64> {
        &self.cocycle[i * self.dim_g + j]
    }

    pub fn omega_is_zero(&self) -> bool {
        self.cocycle.iter().all(|w| w.amax() == 0.0)
    }

    pub fn omega_of(&self, x: &Coef, y: &Coef) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim_v);
        for i in 0..self.dim_g {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..self.dim_g {
                if y[j] != 0.0 {
                    out += self.omega(i, j) * (x[i] * y[j]);
                }
            }
        }
        out
    }

    /// `b(x)` as a matrix on `V`.
    pub fn b_matrix(&self, x: &Coef) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim_v, self.dim_v);
        for (i, b) in self.action.iter().enumerate() {
            if x[i] != 0.0 {
                m += b * x[i];
            }
        }
        m
    }

    /// gram_V-adjoint of `b(x)`.
    pub fn b_transpose(&self, x: &Coef) -> DMatrix<f64> {
        let mut m = self.b_matrix(x).transpose() * &self.gram_v;
        self.chol_v.solve_mut(&mut m);
        m
    }

    pub fn inner_v(&self, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        (v.transpose() * &self.gram_v * w)[(0, 0)]
    }

    /// `h(v)` on `g`, defined by `<h(v)X1, X2>_g = <omega(X1, X2), v>_V`.
    pub fn h_map(&self, alg: &FiniteLieAlgebra, v: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim_g;
        let gv = &self.gram_v * v;
        // s[i][j] = <omega(e_i, e_j), v>_V; then G h(v) = s^t, h = G^{-1} s^t.
        let mut st = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                st[(j, i)] = self.omega(i, j).dot(&gv);
            }
        }
        alg.chol.solve(&st)
    }

    /// `l(v1, v2) in g`, defined by `<l(v1, v2), X>_g = <b(X)v1, v2>_V`.
    pub fn l_map(&self, alg: &FiniteLieAlgebra, v1: &DVector<f64>, v2: &DVector<f64>) -> Coef {
        let gv2 = &self.gram_v * v2;
        let mut w = Coef::zeros(self.dim_g);
        for i in 0..self.dim_g {
            w[i] = (&self.action[i] * v1).dot(&gv2);
        }
        alg.chol.solve(&w)
    }

    fn h_structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.h_bracket.as_ref().map_or(0.0, |c| c[(i * self.dim_v + j) * self.dim_v + k])
    }

    pub fn h_bracket_of(&self, f: &DVector<f64>, g: &DVector<f64>) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim_v);
        for i in 0..self.dim_v {
            for j in 0..self.dim_v {
                let w = f[i] * g[j];
                if w != 0.0 {
                    for k in 0..self.dim_v {
                        out[k] += w * self.h_structure_constant(i, j, k);
                    }
                }
            }
        }
        out
    }

    fn ad_h_matrix(&self, f: &DVector<f64>) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim_v, self.dim_v);
        for i in 0..self.dim_v {
            if f[i] == 0.0 {
                continue;
            }
            for j in 0..self.dim_v {
                for k in 0..self.dim_v {
                    m[(k, j)] += f[i] * self.h_structure_constant(i, j, k);
                }
            }
        }
        m
    }

    /// gram_V-adjoint of `ad_h(f)`.
    pub fn ad_h_transpose(&self, f: &DVector<f64>) -> DMatrix<f64> {
        let mut m = self.ad_h_matrix(f).transpose() * &self.gram_v;
        self.chol_v.solve_mut(&mut m);
        m
    }
}

fn basis(dim: usize, i: usize) -> Coef {
    let mut e = Coef::zeros(dim);
    e[i] = 1.0;
    e
}

/// A skew-adjoint map on `g` (with respect to the Gram matrix), as arises
/// from a real-valued 2-cocycle via `<k(X), Y> = omega(X, Y)`.
#[derive(Debug, Clone)]
pub struct SkewMap {
    mat: DMatrix<f64>,
}

impl SkewMap {
    pub fn new(alg: &FiniteLieAlgebra, mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != alg.dim() || mat.ncols() != alg.dim() {
            return Err(Error::DimensionMismatch {
                expected: alg.dim(),
                got: mat.nrows(),
            });
        }
        let scale = mat.abs().max().max(1.0);
        let r = (alg.gram() * &mat + mat.transpose() * alg.gram()).abs().max();
        if r > 1e-12 * scale * alg.gram().abs().max() {
            return Err(Error::InvalidExtension(
                "k map is not skew-adjoint with respect to the gram matrix".into(),
            ));
        }
        Ok(Self { mat })
    }

    /// Solve `<k(X), Y> = omega(X, Y)` for `k` given the scalar cocycle
    /// values `omega(e_i, e_j)`.
    pub fn from_cocycle(alg: &FiniteLieAlgebra, omega: &DMatrix<f64>) -> Result<Self> {
        // G k = s with s[(j, i)] = omega(e_i, e_j).
        let mat = alg.chol.solve(&omega.transpose());
        Self::new(alg, mat)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn apply(&self, x: &Coef) -> Coef {
        &self.mat * x
    }
}

/// A 1-cocycle `alpha: g -> V` for the action `b`, i.e.
/// `alpha([X1, X2]) = b(X1)alpha(X2) - b(X2)alpha(X1)`.
#[derive(Debug, Clone)]
pub struct OneCocycle {
    mat: DMatrix<f64>,
}

impl OneCocycle {
    pub fn new(alg: &FiniteLieAlgebra, ext: &ExtensionData, mat: DMatrix<f64>) -> Result<Self> {
        if mat.nrows() != ext.dim_v() || mat.ncols() != alg.dim() {
            return Err(Error::DimensionMismatch {
                expected: ext.dim_v(),
                got: mat.nrows(),
            });
        }
        let scale = mat.abs().max().max(1.0);
        for i in 0..alg.dim() {
            for j in 0..alg.dim() {
                let ei = basis(alg.dim(), i);
                let ej = basis(alg.dim(), j);
                let lhs = &mat * alg.bracket(&ei, &ej);
                let rhs = &ext.action[i] * (&mat * &ej) - &ext.action[j] * (&mat * &ei);
                if (lhs - rhs).abs().max() > CONSISTENCY_TOL * scale {
                    return Err(Error::InvalidExtension(format!(
                        "alpha is not a 1-cocycle on ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self { mat })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn apply(&self, x: &Coef) -> DVector<f64> {
        &self.mat * x
    }

    /// Gram adjoint `alpha^T: V -> g`, `<alpha^T(v), X>_g = <v, alpha(X)>_V`.
    pub fn transpose_apply(&self, alg: &FiniteLieAlgebra, ext: &ExtensionData, v: &DVector<f64>) -> Coef {
        let w = self.mat.transpose() * (ext.gram_v() * v);
        alg.chol.solve(&w)
    }
}

/// Geodesic equation on the semidirect product `V x| G` (Corollary-level
/// reduction of the Abelian case, `omega = 0`):
/// `du = -ad(u)^T u + l(f, f)`, `df = -b(u)^T f`; with a g-invariant
/// product on V this reduces to `du = -ad(u)^T u`, `df = b(u) f`.
pub fn euler_rhs_semidirect(
    alg: &FiniteLieAlgebra,
    ext: &ExtensionData,
    u: &Coef,
    f: &DVector<f64>,
) -> Result<(Coef, DVector<f64>)> {
    if !ext.omega_is_zero() {
        return Err(Error::InvalidExtension(
            "semidirect rhs requires omega = 0; use the Abelian rhs".into(),
        ));
    }
    let du_plain = alg.euler_rhs_plain(u)?;
    if ext.is_invariant() {
        let df = ext.b_matrix(u) * f;
        Ok((du_plain, df))
    } else {
        let du = du_plain + ext.l_map(alg, f, f);
        let df = -(ext.b_transpose(u) * f);
        Ok((du, df))
    }
}

/// Geodesic equation on a 1-dimensional central extension:
/// `du = -ad(u)^T u - a k(u)`, `da = 0`.
pub fn euler_rhs_central(
    alg: &FiniteLieAlgebra,
    k: &SkewMap,
    u: &Coef,
    a: f64,
) -> Result<(Coef, f64)> {
    let du = alg.euler_rhs_plain(u)? - k.apply(u) * a;
    Ok((du, 0.0))
}

/// Geodesic equation on the Abelian extension `V x|_omega G`:
/// `du = -ad(u)^T u - h(f)u + l(f, f)`, `df = -b(u)^T f`.
pub fn euler_rhs_abelian(
    alg: &FiniteLieAlgebra,
    ext: &ExtensionData,
    u: &Coef,
    f: &DVector<f64>,
) -> Result<(Coef, DVector<f64>)> {
    let du = alg.euler_rhs_plain(u)? - ext.h_map(alg, f) * u + ext.l_map(alg, f, f);
    let df = -(ext.b_transpose(u) * f);
    Ok((du, df))
}

/// Geodesic equation on a general extension of `g` by the Lie algebra `h`:
/// `du = -ad(u)^T u - h(rho)u + l(rho, rho)`,
/// `drho = -ad_h(rho)^T rho - b(u)^T rho`.
pub fn euler_rhs_general(
    alg: &FiniteLieAlgebra,
    ext: &ExtensionData,
    u: &Coef,
    rho: &DVector<f64>,
) -> Result<(Coef, DVector<f64>)> {
    if !ext.has_h_bracket() {
        return Err(Error::InvalidExtension(
            "general rhs requires h to carry a bracket".into(),
        ));
    }
    let du = alg.euler_rhs_plain(u)? - ext.h_map(alg, rho) * u + ext.l_map(alg, rho, rho);
    let drho = -(ext.ad_h_transpose(rho) * rho) - ext.b_transpose(u) * rho;
    Ok((du, drho))
}

/// Geodesic equation on the central extension of a semidirect product by
/// the 2-cocycle induced from a 1-cocycle `alpha`:
/// `du = -ad(u)^T u + a alpha^T(f)`, `df = b(u)f - a alpha(u)`, `da = 0`.
/// Requires a g-invariant scalar product on `V`.
pub fn euler_rhs_sd_central(
    alg: &FiniteLieAlgebra,
    ext: &ExtensionData,
    alpha: &OneCocycle,
    u: &Coef,
    f: &DVector<f64>,
    a: f64,
) -> Result<(Coef, DVector<f64>, f64)> {
    if !ext.is_invariant() {
        return Err(Error::InvalidExtension(
            "central-of-semidirect rhs requires a g-invariant product on V".into(),
        ));
    }
    let du = alg.euler_rhs_plain(u)? + alpha.transpose_apply(alg, ext, f) * a;
    let df = ext.b_matrix(u) * f - alpha.apply(u) * a;
    Ok((du, df, 0.0))
}

// --- stock algebras used across the test and oracle suites ---

/// so(3) with `[e_i, e_j] = eps_ijk e_k` and the given Gram matrix.
pub fn so3(gram: DMatrix<f64>) -> Result<FiniteLieAlgebra> {
    let mut c = vec![0.0; 27];
    let idx = |i: usize, j: usize, k: usize| (i * 3 + j) * 3 + k;
    for (i, j, k, s) in [
        (0, 1, 2, 1.0),
        (1, 0, 2, -1.0),
        (1, 2, 0, 1.0),
        (2, 1, 0, -1.0),
        (2, 0, 1, 1.0),
        (0, 2, 1, -1.0),
    ] {
        c[idx(i, j, k)] = s;
    }
    FiniteLieAlgebra::new(3, c, gram)
}

/// Abelian algebra of the given dimension with identity Gram matrix.
pub fn abelian(dim: usize) -> FiniteLieAlgebra {
    FiniteLieAlgebra::new(dim, vec![0.0; dim * dim * dim], DMatrix::identity(dim, dim)).unwrap()
}

/// Direct sum of two algebras with block-diagonal bracket and Gram matrix.
pub fn direct_sum(a: &FiniteLieAlgebra, b: &FiniteLieAlgebra) -> FiniteLieAlgebra {
    let n = a.dim() + b.dim();
    let mut c = vec![0.0; n * n * n];
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            for k in 0..a.dim() {
                c[idx(i, j, k)] = a.structure_constant(i, j, k);
            }
        }
    }
    for i in 0..b.dim() {
        for j in 0..b.dim() {
            for k in 0..b.dim() {
                c[idx(a.dim() + i, a.dim() + j, a.dim() + k)] = b.structure_constant(i, j, k);
            }
        }
    }
    let mut g = DMatrix::zeros(n, n);
    g.view_mut((0, 0), (a.dim(), a.dim())).copy_from(a.gram());
    g.view_mut((a.dim(), a.dim()), (b.dim(), b.dim())).copy_from(b.gram());
    FiniteLieAlgebra::new(n, c, g).unwrap()
}

/// Conjugate the structure constants by an invertible change of basis `t`
/// (new basis `f_i = sum_j t[j][i] e_j`), keeping the Jacobi identity valid
/// exactly. The Gram matrix transforms contravariantly.
pub fn change_basis(alg: &FiniteLieAlgebra, t: &DMatrix<f64>) -> Result<FiniteLieAlgebra> {
    let n = alg.dim();
    let t_inv = t
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidInput("change of basis must be invertible".into()))?;
    let mut c = vec![0.0; n * n * n];
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    for i in 0..n {
        let fi = t.column(i).clone_owned();
        for j in 0..n {
            let fj = t.column(j).clone_owned();
            let br = &t_inv * alg.bracket(&fi, &fj);
            for k in 0..n {
                c[idx(i, j, k)] = br[k];
            }
        }
    }
    let gram = t.transpose() * alg.gram() * t;
    FiniteLieAlgebra::with_jacobi_tol(n, c, gram, 1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn eye(n: usize) -> DMatrix<f64> {
        DMatrix::identity(n, n)
    }

    fn v(slice: &[f64]) -> Coef {
        Coef::from_row_slice(slice)
    }

    #[test]
    fn ad_matrix_so3_reads_off_structure_constants() {
        let alg = so3(eye(3)).unwrap();
        let m = alg.ad_matrix(&v(&[1.0, 0.0, 0.0])).unwrap();
        // e1 -> 0, e2 -> e3, e3 -> -e2
        assert_abs_diff_eq!((&m * v(&[0.0, 1.0, 0.0]) - v(&[0.0, 0.0, 1.0])).abs().max(), 0.0);
        assert_abs_diff_eq!((&m * v(&[0.0, 0.0, 1.0]) + v(&[0.0, 1.0, 0.0])).abs().max(), 0.0);
        assert_abs_diff_eq!((&m * v(&[1.0, 0.0, 0.0])).abs().max(), 0.0);
    }

    #[test]
    fn ad_matrix_zero_and_abelian() {
        let alg = so3(eye(3)).unwrap();
        assert_eq!(alg.ad_matrix(&v(&[0.0; 3])).unwrap().abs().max(), 0.0);
        let ab = abelian(4);
        assert_eq!(ab.ad_matrix(&v(&[1.0, -2.0, 0.5, 3.0])).unwrap().abs().max(), 0.0);
    }

    #[test]
    fn ad_matrix_dimension_mismatch() {
        let alg = so3(eye(3)).unwrap();
        assert!(alg.ad_matrix(&v(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn ad_transpose_euclidean_so3_is_negative_ad() {
        let alg = so3(eye(3)).unwrap();
        let x = v(&[0.3, -1.2, 0.7]);
        let at = alg.ad_transpose(&x).unwrap();
        let a = alg.ad_matrix(&x).unwrap();
        assert!((at + a).abs().max() < 1e-14);
        // ad(e1)^T e3 = e2
        let e1 = v(&[1.0, 0.0, 0.0]);
        let r = alg.ad_transpose(&e1).unwrap() * v(&[0.0, 0.0, 1.0]);
        assert!((r - v(&[0.0, 1.0, 0.0])).abs().max() < 1e-14);
    }

    #[test]
    fn ad_transpose_defining_relation() {
        let alg = so3(DMatrix::from_diagonal(&v(&[1.0, 2.0, 3.0]))).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x = Coef::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
            let y = Coef::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
            let z = Coef::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
            let lhs = alg.inner(&(alg.ad_transpose(&x).unwrap() * &y), &z);
            let rhs = alg.inner(&y, &alg.bracket(&x, &z));
            assert!((lhs - rhs).abs() <= 1e-12 * x.norm() * y.norm() * z.norm() + 1e-14);
        }
    }

    #[test]
    fn rigid_body_rhs() {
        // -ad(u)^T u = I^{-1}(u x I u) for so(3) with G = I = diag(1,2,3).
        let alg = so3(DMatrix::from_diagonal(&v(&[1.0, 2.0, 3.0]))).unwrap();
        let rhs = alg.euler_rhs_plain(&v(&[0.0, 1.0, 1.0])).unwrap();
        assert!((rhs - v(&[1.0, 0.0, 0.0])).abs().max() < 1e-13);
        // -ad(x)^T x = I^{-1}(x x I x) with x = (0,1,1): checked above.
        // Principal axis is an equilibrium.
        let still = alg.euler_rhs_plain(&v(&[1.0, 0.0, 0.0])).unwrap();
        assert!(still.abs().max() < 1e-14);
        // Abelian: zero rhs.
        let ab = abelian(3);
        assert_eq!(ab.euler_rhs_plain(&v(&[1.0, 2.0, 3.0])).unwrap().abs().max(), 0.0);
    }

    fn random_five_dim(rng: &mut ChaCha8Rng) -> FiniteLieAlgebra {
        // so(3) + abelian(2), conjugated by a random invertible basis change.
        let base = direct_sum(&so3(eye(3)).unwrap(), &abelian(2));
        loop {
            let t = DMatrix::from_fn(5, 5, |_, _| rng.gen_range(-1.0..1.0)) + eye(5) * 2.0;
            if let Ok(alg) = change_basis(&base, &t) {
                return alg;
            }
        }
    }

    #[test]
    fn hamiltonian_residual_vanishes() {
        let alg = so3(DMatrix::from_diagonal(&v(&[1.0, 2.0, 3.0]))).unwrap();
        assert!(alg.hamiltonian_residual(&v(&[0.0, 1.0, 1.0])).unwrap() < 1e-13);
        assert_eq!(alg.hamiltonian_residual(&v(&[0.0, 0.0, 0.0])).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let alg = random_five_dim(&mut rng);
            let u = Coef::from_fn(5, |_, _| rng.gen_range(-1.0..1.0));
            assert!(alg.hamiltonian_residual(&u).unwrap() <= 1e-12 * u.norm().powi(2).max(1.0));
        }
    }

    #[test]
    fn rejects_invalid_structure_constants() {
        // Break antisymmetry.
        let mut c = vec![0.0; 27];
        c[(0 * 3 + 1) * 3 + 2] = 1.0;
        assert!(FiniteLieAlgebra::new(3, c, eye(3)).is_err());
        // Break Jacobi: [e1,e2]=e3 and [e1,e3]=e1 leave a residual -e3 in
        // the cyclic sum over (e1,e2,e3).
        let mut c = vec![0.0; 27];
        let idx = |i: usize, j: usize, k: usize| (i * 3 + j) * 3 + k;
        c[idx(0, 1, 2)] = 1.0;
        c[idx(1, 0, 2)] = -1.0;
        c[idx(0, 2, 0)] = 1.0;
        c[idx(2, 0, 0)] = -1.0;
        assert!(FiniteLieAlgebra::new(3, c, eye(3)).is_err());
        // Indefinite gram.
        let mut g = eye(3);
        g[(2, 2)] = -1.0;
        assert!(so3(g).is_err());
    }

    fn so3_acting_on_r3(invariant: bool) -> (FiniteLieAlgebra, ExtensionData) {
        let alg = so3(eye(3)).unwrap();
        let hat = |x: &Coef| alg.ad_matrix(x).unwrap();
        let action: Vec<_> = (0..3)
            .map(|i| {
                let mut e = Coef::zeros(3);
                e[i] = 1.0;
                hat(&e)
            })
            .collect();
        let cocycle = vec![DVector::zeros(3); 9];
        let ext = ExtensionData::new(&alg, action, cocycle, eye(3), None, invariant).unwrap();
        (alg, ext)
    }

    #[test]
    fn semidirect_reductions() {
        let (alg, ext) = so3_acting_on_r3(false);
        let u = v(&[0.4, -0.2, 0.9]);
        // f = 0 reduces to the plain Euler rhs.
        let (du, df) = euler_rhs_semidirect(&alg, &ext, &u, &v(&[0.0; 3])).unwrap();
        assert!((du - alg.euler_rhs_plain(&u).unwrap()).abs().max() < 1e-14);
        assert_eq!(df.abs().max(), 0.0);
        // l(f, f) from the defining relation equals f x f = 0 for b = ad on so(3).
        let f = v(&[1.0, 2.0, -0.5]);
        let l = ext.l_map(&alg, &f, &f);
        assert!(l.abs().max() < 1e-14);
        // Invariant flag: du is the plain rhs for any f.
        let (alg, exti) = so3_acting_on_r3(true);
        let (du, df) = euler_rhs_semidirect(&alg, &exti, &u, &f).unwrap();
        assert!((du - alg.euler_rhs_plain(&u).unwrap()).abs().max() < 1e-14);
        assert!((df - ext.b_matrix(&u) * &f).abs().max() < 1e-14);
    }

    #[test]
    fn semidirect_rejects_nonzero_cocycle() {
        let alg = so3(eye(3)).unwrap();
        let (_, mut coc) = (0, vec![DVector::zeros(1); 9]);
        // Heisenberg-like cocycle on so(3) with V = R is not a cocycle in
        // general; use the invariant pairing cocycle omega(X,Y) = <e3,[X,Y]>
        // which satisfies the identity for b = 0.
        for i in 0..3 {
            for j in 0..3 {
                let mut ei = Coef::zeros(3);
                ei[i] = 1.0;
                let mut ej = Coef::zeros(3);
                ej[j] = 1.0;
                coc[i * 3 + j] = DVector::from_element(1, alg.bracket(&ei, &ej)[2]);
            }
        }
        let ext = ExtensionData::new(
            &alg,
            vec![DMatrix::zeros(1, 1); 3],
            coc,
            eye(1),
            None,
            false,
        )
        .unwrap();
        let u = v(&[1.0, 0.0, 0.0]);
        assert!(euler_rhs_semidirect(&alg, &ext, &u, &DVector::zeros(1)).is_err());
    }

    #[test]
    fn central_k_solve_against_bruteforce() {
        // k from omega via <k(X),Y> = omega(X,Y) on a random 4-dim algebra
        // (so(3) + R conjugated), checked against a dense solve of the
        // defining linear system.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let base = direct_sum(&so3(eye(3)).unwrap(), &abelian(1));
        let t = DMatrix::from_fn(4, 4, |_, _| rng.gen_range(-0.4..0.4)) + eye(4) * 1.5;
        let alg = change_basis(&base, &t).unwrap();
        // A valid scalar cocycle with b = 0 is any skew bilinear form that
        // vanishes on brackets; use omega(X, Y) = phi([X, Y]) complement? A
        // coboundary omega(X,Y) = phi([X,Y]) works for any linear phi.
        let phi = Coef::from_fn(4, |_, _| rng.gen_range(-1.0..1.0));
        let mut omega = DMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                let mut ei = Coef::zeros(4);
                ei[i] = 1.0;
                let mut ej = Coef::zeros(4);
                ej[j] = 1.0;
                omega[(i, j)] = phi.dot(&alg.bracket(&ei, &ej));
            }
        }
        let k = SkewMap::from_cocycle(&alg, &omega).unwrap();
        // Defining relation.
        for i in 0..4 {
            for j in 0..4 {
                let mut ei = Coef::zeros(4);
                ei[i] = 1.0;
                let mut ej = Coef::zeros(4);
                ej[j] = 1.0;
                let lhs = alg.inner(&k.apply(&ei), &ej);
                assert!((lhs - omega[(i, j)]).abs() < 1e-10);
            }
        }
        // Reductions.
        let u = Coef::from_fn(4, |_, _| rng.gen_range(-1.0..1.0));
        let (du, da) = euler_rhs_central(&alg, &k, &u, 0.0).unwrap();
        assert!((du - alg.euler_rhs_plain(&u).unwrap()).abs().max() < 1e-14);
        assert_eq!(da, 0.0);
        let (du0, _) = euler_rhs_central(&alg, &k, &Coef::zeros(4), 1.3).unwrap();
        assert!(du0.abs().max() < 1e-14);
    }

    #[test]
    fn skew_map_rejects_non_skew() {
        let alg = so3(eye(3)).unwrap();
        assert!(SkewMap::new(&alg, eye(3)).is_err());
    }

    #[test]
    fn abelian_reductions() {
        let (alg, ext) = so3_acting_on_r3(false);
        let u = v(&[0.4, -0.2, 0.9]);
        let f = v(&[1.0, 0.3, -0.6]);
        // omega = 0, b != 0: abelian rhs equals semidirect rhs.
        let (du_a, df_a) = euler_rhs_abelian(&alg, &ext, &u, &f).unwrap();
        let (du_s, df_s) = euler_rhs_semidirect(&alg, &ext, &u, &f).unwrap();
        assert!((du_a - du_s).abs().max() < 1e-13);
        assert!((df_a - df_s).abs().max() < 1e-13);
        // f = 0 reduces to plain.
        let (du, df) = euler_rhs_abelian(&alg, &ext, &u, &v(&[0.0; 3])).unwrap();
        assert!((du - alg.euler_rhs_plain(&u).unwrap()).abs().max() < 1e-14);
        assert_eq!(df.abs().max(), 0.0);
    }

    #[test]
    fn general_reduces_to_abelian_for_abelian_h() {
        let (alg, _) = so3_acting_on_r3(false);
        let hat = |x: &Coef| alg.ad_matrix(x).unwrap();
        let action: Vec<_> = (0..3)
            .map(|i| {
                let mut e = Coef::zeros(3);
                e[i] = 1.0;
                hat(&e)
            })
            .collect();
        let ext_h = ExtensionData::new(
            &alg,
            action.clone(),
            vec![DVector::zeros(3); 9],
            eye(3),
            Some(vec![0.0; 27]),
            false,
        )
        .unwrap();
        let ext_a = ExtensionData::new(
            &alg,
            action,
            vec![DVector::zeros(3); 9],
            eye(3),
            None,
            false,
        )
        .unwrap();
        let u = v(&[0.2, 0.8, -0.4]);
        let rho = v(&[-0.9, 0.1, 0.5]);
        let (du_g, dr_g) = euler_rhs_general(&alg, &ext_h, &u, &rho).unwrap();
        let (du_a, dr_a) = euler_rhs_abelian(&alg, &ext_a, &u, &rho).unwrap();
        assert!((du_g - du_a).abs().max() < 1e-13);
        assert!((dr_g - dr_a).abs().max() < 1e-13);
        // rho = 0 reduces to plain.
        let (du, dr) = euler_rhs_general(&alg, &ext_h, &u, &v(&[0.0; 3])).unwrap();
        assert!((du - alg.euler_rhs_plain(&u).unwrap()).abs().max() < 1e-14);
        assert_eq!(dr.abs().max(), 0.0);
        // Missing h bracket is rejected.
        assert!(euler_rhs_general(&alg, &ext_a, &u, &rho).is_err());
    }

    /// The coboundary `alpha(X) = [X, w]` is a 1-cocycle for `b = ad`.
    fn coboundary(alg: &FiniteLieAlgebra, ext: &ExtensionData, w: &Coef) -> OneCocycle {
        let mat = -alg.ad_matrix(w).unwrap();
        OneCocycle::new(alg, ext, mat).unwrap()
    }

    #[test]
    fn sd_central_reductions() {
        let (alg, ext) = so3_acting_on_r3(true);
        let alpha = coboundary(&alg, &ext, &v(&[0.3, -1.1, 0.7]));
        let u = v(&[0.4, -0.2, 0.9]);
        let f = v(&[1.0, 0.3, -0.6]);
        // a = 0 reduces to the invariant semidirect case.
        let (du, df, da) = euler_rhs_sd_central(&alg, &ext, &alpha, &u, &f, 0.0).unwrap();
        let (du_s, df_s) = euler_rhs_semidirect(&alg, &ext, &u, &f).unwrap();
        assert!((du - du_s).abs().max() < 1e-14);
        assert!((df - df_s).abs().max() < 1e-14);
        assert_eq!(da, 0.0);
        // u = 0: du = a alpha^T(f), df = 0.
        let a = 0.7;
        let (du, df, _) = euler_rhs_sd_central(&alg, &ext, &alpha, &v(&[0.0; 3]), &f, a).unwrap();
        assert!((du - alpha.transpose_apply(&alg, &ext, &f) * a).abs().max() < 1e-14);
        assert!(df.abs().max() < 1e-14);
    }

    #[test]
    fn one_cocycle_rejects_non_cocycle() {
        let (alg, ext) = so3_acting_on_r3(true);
        // A generic matrix is not a 1-cocycle for b = ad on so(3).
        let mut m = eye(3);
        m[(0, 1)] = 0.5;
        assert!(OneCocycle::new(&alg, &ext, m).is_err());
    }

    #[test]
    fn energy_orthogonality_across_extension_rhs() {
        // <rhs, state> in the full extension metric vanishes: geodesics
        // have constant speed.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (alg, ext) = so3_acting_on_r3(false);
        let (alg_i, ext_i) = so3_acting_on_r3(true);
        for _ in 0..20 {
            let u = Coef::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
            let f = Coef::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
            let (du, df) = euler_rhs_abelian(&alg, &ext, &u, &f).unwrap();
            let rate = alg.inner(&du, &u) + ext.inner_v(&df, &f);
            assert!(rate.abs() < 1e-12, "abelian energy rate {rate}");
            let (du, df) = euler_rhs_semidirect(&alg, &ext, &u, &f).unwrap();
            let rate = alg.inner(&du, &u) + ext.inner_v(&df, &f);
            assert!(rate.abs() < 1e-12, "semidirect energy rate {rate}");
            let alpha = coboundary(&alg_i, &ext_i, &v(&[0.3, -1.1, 0.7]));
            let a = rng.gen_range(-1.0..1.0);
            let (du, df, _) = euler_rhs_sd_central(&alg_i, &ext_i, &alpha, &u, &f, a).unwrap();
            let rate = alg_i.inner(&du, &u) + ext_i.inner_v(&df, &f);
            assert!(rate.abs() < 1e-12, "sd-central energy rate {rate}");
        }
    }
}
