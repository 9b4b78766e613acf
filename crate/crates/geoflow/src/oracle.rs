//! Independent verification substrate. Nothing here shares a code path
//! with the hand-coded right-hand sides it checks:
//!
//! * adjoint-identity residuals on bandwidth-restricted circle fields,
//!   where every bracket and product is exactly representable;
//! * full-bracket extension algebras built from `(g, V, b, omega)`, whose
//!   plain Euler equation is the ground truth for the structured
//!   semidirect / central / Abelian / general / central-of-semidirect
//!   right-hand sides;
//! * second-order finite-difference evaluations of every torus model on a
//!   refined grid.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{Coef, ExtensionData, FiniteLieAlgebra, OneCocycle};
use crate::error::{Error, Result};
use crate::models::{self, ModelId, ModelSpec, ModelState};
use crate::spectral1d::{self, Metric1D, Spectrum1D};
use crate::spectral2d::{curl, Field2D, VecField2D};
use crate::TWO_PI;

/// Three circle fields with |modes| <= N/3, so that `[X, Z] = X'Z - XZ'`
/// and all adjoint products stay inside the cutoff exactly.
pub struct BandLimitedTriple {
    pub x: Spectrum1D,
    pub y: Spectrum1D,
    pub z: Spectrum1D,
}

impl BandLimitedTriple {
    pub fn new(x: Spectrum1D, y: Spectrum1D, z: Spectrum1D) -> Result<Self> {
        let n = x.cutoff() as i64;
        let limit = n / 3;
        for (name, s) in [("x", &x), ("y", &y), ("z", &z)] {
            for k in (limit + 1)..=n {
                if s.coeff(k).norm() != 0.0 || s.coeff(-k).norm() != 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "triple component {name} has content beyond |k| = {limit}"
                    )));
                }
            }
        }
        Ok(Self { x, y, z })
    }

    pub fn random<R: rand::Rng>(n: usize, rng: &mut R) -> Self {
        let limit = (n / 3) as i64;
        Self {
            x: Spectrum1D::random_band(n, limit, rng),
            y: Spectrum1D::random_band(n, limit, rng),
            z: Spectrum1D::random_band(n, limit, rng),
        }
    }
}

/// `|<adT(X)Y, Z> - <Y, X'Z - XZ'>|` in the given metric, with exact
/// Parseval inner products.
pub fn adjoint_residual<F>(adt: F, metric: Metric1D, t: &BandLimitedTriple) -> f64
where
    F: Fn(&Spectrum1D, &Spectrum1D) -> Spectrum1D,
{
    let lhs = spectral1d::inner(&adt(&t.x, &t.y), &t.z, metric);
    let mut bracket = spectral1d::multiply(&t.x.deriv(1), &t.z);
    bracket.axpy(-1.0, &spectral1d::multiply(&t.x, &t.z.deriv(1)));
    let rhs = spectral1d::inner(&t.y, &bracket, metric);
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0)
}

// --- full-bracket extension algebras -------------------------------------

/// The extension of `g` by `V` as one flat Lie algebra on `V + g`
/// (coordinates ordered `[v; x]`), with bracket
/// `[(v1,X1),(v2,X2)] = ([v1,v2]_h + b(X1)v2 - b(X2)v1 + omega(X1,X2),
///                        [X1,X2])`
/// and block-diagonal Gram matrix. Jacobi is re-validated from scratch,
/// which catches invalid cocycle data independently.
pub fn extension_algebra(alg: &FiniteLieAlgebra, ext: &ExtensionData) -> Result<FiniteLieAlgebra> {
    let dg = alg.dim();
    let dv = ext.dim_v();
    let n = dv + dg;
    let mut c = vec![0.0; n * n * n];
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let mut set_bracket = |i: usize, j: usize, v_part: DVector<f64>, g_part: Coef| {
        for k in 0..dv {
            c[idx(i, j, k)] = v_part[k];
            c[idx(j, i, k)] = -v_part[k];
        }
        for k in 0..dg {
            c[idx(i, j, dv + k)] = g_part[k];
            c[idx(j, i, dv + k)] = -g_part[k];
        }
    };
    // [V_i, V_j] = [e_i, e_j]_h (zero unless V carries a bracket).
    for i in 0..dv {
        for j in (i + 1)..dv {
            let vb = ext.h_bracket_of(&unit(dv, i), &unit(dv, j));
            set_bracket(i, j, vb, Coef::zeros(dg));
        }
    }
    // [g_i, V_j] = b(e_i) V_j.
    for i in 0..dg {
        let b = ext.b_matrix(&unit(dg, i));
        for j in 0..dv {
            set_bracket(dv + i, j, b.column(j).clone_owned(), Coef::zeros(dg));
        }
    }
    // [g_i, g_j] = (omega(e_i, e_j), [e_i, e_j]_g).
    for i in 0..dg {
        for j in (i + 1)..dg {
            let gb = alg.bracket(&unit(dg, i), &unit(dg, j));
            set_bracket(dv + i, dv + j, ext.omega(i, j).clone_owned(), gb);
        }
    }
    let mut gram = DMatrix::zeros(n, n);
    gram.view_mut((0, 0), (dv, dv)).copy_from(ext.gram_v());
    gram.view_mut((dv, dv), (dg, dg)).copy_from(alg.gram());
    FiniteLieAlgebra::with_jacobi_tol(n, c, gram, 1e-10)
}

/// One-dimensional central extension `g + R` (coordinates `[x; a]`) by the
/// scalar cocycle matrix `omega[(i, j)] = omega(e_i, e_j)`.
pub fn central_extension_algebra(
    alg: &FiniteLieAlgebra,
    omega: &DMatrix<f64>,
) -> Result<FiniteLieAlgebra> {
    let dg = alg.dim();
    let n = dg + 1;
    let mut c = vec![0.0; n * n * n];
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    for i in 0..dg {
        for j in 0..dg {
            let gb = alg.bracket(&unit(dg, i), &unit(dg, j));
            for k in 0..dg {
                c[idx(i, j, k)] = gb[k];
            }
            c[idx(i, j, dg)] = omega[(i, j)];
        }
    }
    let mut gram = DMatrix::identity(n, n);
    gram.view_mut((0, 0), (dg, dg)).copy_from(alg.gram());
    FiniteLieAlgebra::with_jacobi_tol(n, c, gram, 1e-10)
}

/// Central extension of the semidirect product `V x| g` by the 2-cocycle
/// induced from a 1-cocycle `alpha`:
/// `Omega((v1,X1),(v2,X2)) = <alpha(X1), v2>_V - <alpha(X2), v1>_V`.
/// Coordinates `[v; x; a]`.
pub fn sd_central_extension_algebra(
    alg: &FiniteLieAlgebra,
    ext: &ExtensionData,
    alpha: &OneCocycle,
) -> Result<FiniteLieAlgebra> {
    if !ext.omega_is_zero() {
        return Err(Error::InvalidExtension(
            "the induced central extension starts from a semidirect product".into(),
        ));
    }
    let base = extension_algebra(alg, ext)?;
    let dv = ext.dim_v();
    let dg = alg.dim();
    let n = base.dim();
    let mut omega = DMatrix::zeros(n, n);
    for i in 0..dg {
        let av = alpha.apply(&unit(dg, i));
        let gav = ext.gram_v() * av;
        for j in 0..dv {
            omega[(dv + i, j)] = gav[j];
            omega[(j, dv + i)] = -gav[j];
        }
    }
    central_extension_algebra(&base, &omega)
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[i] = 1.0;
    e
}

/// Concatenate coefficient blocks into one flat vector.
pub fn stack(blocks: &[&DVector<f64>]) -> DVector<f64> {
    let n = blocks.iter().map(|b| b.len()).sum();
    let mut out = DVector::zeros(n);
    let mut at = 0;
    for b in blocks {
        out.rows_mut(at, b.len()).copy_from(*b);
        at += b.len();
    }
    out
}

// --- finite-difference cross-check ---------------------------------------

/// Square periodic grid of real samples, row-major with x fastest.
#[derive(Clone)]
struct Grid {
    n: usize,
    v: Vec<f64>,
}

impl Grid {
    fn from_field(f: &Field2D, n: usize) -> Self {
        Self {
            n,
            v: f.refine(n, n).sample(),
        }
    }

    fn constant(n: usize, c: f64) -> Self {
        Self { n, v: vec![c; n * n] }
    }

    fn map2(&self, o: &Grid, f: impl Fn(f64, f64) -> f64) -> Grid {
        Grid {
            n: self.n,
            v: self.v.iter().zip(o.v.iter()).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    fn mul(&self, o: &Grid) -> Grid {
        self.map2(o, |a, b| a * b)
    }

    fn add(&self, o: &Grid) -> Grid {
        self.map2(o, |a, b| a + b)
    }

    fn sub(&self, o: &Grid) -> Grid {
        self.map2(o, |a, b| a - b)
    }

    fn scale(&self, a: f64) -> Grid {
        Grid {
            n: self.n,
            v: self.v.iter().map(|x| a * x).collect(),
        }
    }

    fn shift(&self, di: i64, dj: i64) -> Grid {
        let n = self.n as i64;
        let mut out = vec![0.0; self.v.len()];
        for j in 0..n {
            for i in 0..n {
                let si = (i + di).rem_euclid(n);
                let sj = (j + dj).rem_euclid(n);
                out[(j * n + i) as usize] = self.v[(sj * n + si) as usize];
            }
        }
        Grid { n: self.n, v: out }
    }

    /// Second-order centered x-derivative.
    fn ddx(&self) -> Grid {
        let h = TWO_PI / self.n as f64;
        self.shift(1, 0).sub(&self.shift(-1, 0)).scale(0.5 / h)
    }

    fn ddy(&self) -> Grid {
        let h = TWO_PI / self.n as f64;
        self.shift(0, 1).sub(&self.shift(0, -1)).scale(0.5 / h)
    }

    fn max_abs(&self) -> f64 {
        self.v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

fn vec_grids(u: &VecField2D, n: usize) -> (Grid, Grid) {
    let gx = Grid::from_field(&u.x, n).add(&Grid::constant(n, u.mean[0]));
    let gy = Grid::from_field(&u.y, n).add(&Grid::constant(n, u.mean[1]));
    (gx, gy)
}

/// `(u . grad) f` by finite differences.
fn fd_advect(ux: &Grid, uy: &Grid, f: &Grid) -> Grid {
    ux.mul(&f.ddx()).add(&uy.mul(&f.ddy()))
}

fn stream_grids(omega: &Field2D, n: usize) -> Result<(Grid, Grid)> {
    // The Poisson solve is exact (spectral); the oracle independence lies
    // in the nonlinear terms and their signs, which are all formed by
    // finite differences.
    let (psi, _) = crate::spectral2d::stream_solve(omega)?;
    Ok((Grid::from_field(omega, n), Grid::from_field(&psi, n)))
}

fn alpha_m(u: &VecField2D, alpha2: f64) -> VecField2D {
    let g = |kx: i64, ky: i64| 1.0 + alpha2 * (kx * kx + ky * ky) as f64;
    VecField2D {
        x: u.x.multiplier(g),
        y: u.y.multiplier(g),
        mean: u.mean,
    }
}

/// Max-norm disagreement between the spectral right-hand side and an
/// independent second-order finite-difference evaluation on an `n x n`
/// grid, normalized by the larger of 1 and the rate magnitude. Models with
/// a pressure projection are compared through the curl, which the
/// projection leaves unchanged.
pub fn fd_residual(spec: &ModelSpec, s: &ModelState, n: usize) -> Result<f64> {
    let rate = models::rhs(spec, s)?;
    let p = &spec.params;
    let mut residuals: Vec<(Grid, Grid)> = Vec::new();
    match (s, &rate) {
        (ModelState::Vort2 { omega, mean_u }, ModelState::Vort2 { omega: dw, .. }) => {
            let (og, pg) = stream_grids(omega, n)?;
            let mut fd = fd_curl_bracket(&og, &pg);
            if spec.id == ModelId::QgBeta {
                fd = fd.sub(&pg.ddx().scale(p.beta));
            }
            let (mx, my) = (Grid::constant(n, mean_u[0]), Grid::constant(n, mean_u[1]));
            fd = fd.sub(&fd_advect(&mx, &my, &og));
            residuals.push((fd, Grid::from_field(dw, n)));
        }
        (
            ModelState::VortScalar2 { omega, scalar, mean_u },
            ModelState::VortScalar2 { omega: dw, scalar: ds, .. },
        ) => {
            let (og, pg) = stream_grids(omega, n)?;
            let sg = Grid::from_field(scalar, n);
            let (mx, my) = (Grid::constant(n, mean_u[0]), Grid::constant(n, mean_u[1]));
            let mut fdw = fd_curl_bracket(&og, &pg).sub(&fd_advect(&mx, &my, &og));
            let mut fds = fd_jacobian(&sg, &pg).scale(-1.0).sub(&fd_advect(&mx, &my, &sg));
            if spec.id == ModelId::Boussinesq {
                fdw = fdw.sub(&sg.ddx());
                fds = fds.add(&pg.ddx().scale(p.brunt * p.brunt));
            }
            residuals.push((fdw, Grid::from_field(dw, n)));
            residuals.push((fds, Grid::from_field(ds, n)));
        }
        (ModelState::VecPair2 { u, b }, ModelState::VecPair2 { u: du, b: db }) => {
            let (ux, uy) = vec_grids(u, n);
            let (bx, by) = vec_grids(b, n);
            // Momentum equation through the curl: for solenoidal fields
            // curl(-(u.grad)u + (B.grad)B) = -u.grad w + B.grad j.
            let wg = Grid::from_field(&curl(u), n);
            let jg = Grid::from_field(&curl(b), n);
            let fw = fd_advect(&ux, &uy, &wg)
                .scale(-1.0)
                .add(&fd_advect(&bx, &by, &jg));
            residuals.push((fw, Grid::from_field(&curl(du), n)));
            // Induction equation directly.
            let dbx = fd_advect(&ux, &uy, &bx).scale(-1.0).add(&fd_advect(&bx, &by, &ux));
            let dby = fd_advect(&ux, &uy, &by).scale(-1.0).add(&fd_advect(&bx, &by, &uy));
            residuals.push((dbx, Grid::from_field(&db.x, n)));
            residuals.push((dby, Grid::from_field(&db.y, n)));
        }
        (ModelState::VecScalar2 { u, rho }, ModelState::VecScalar2 { u: du, rho: drho }) => {
            let (ux, uy) = vec_grids(u, n);
            let rg = Grid::from_field(rho, n);
            // Force -b rho u_perp with u_perp = (-u2, u1); its curl for a
            // solenoidal u reduces to b u.grad(rho), so the momentum
            // equation through the curl reads -u.grad w + b u.grad rho.
            let wg = Grid::from_field(&curl(u), n);
            let fw = fd_advect(&ux, &uy, &wg)
                .scale(-1.0)
                .add(&fd_advect(&ux, &uy, &rg).scale(p.b));
            residuals.push((fw, Grid::from_field(&curl(du), n)));
            residuals.push((
                fd_advect(&ux, &uy, &rg).scale(-1.0),
                Grid::from_field(drho, n),
            ));
        }
        (ModelState::Vec2 { u }, ModelState::Vec2 { u: du }) => match spec.id {
            ModelId::TemplateMatching => {
                let (ux, uy) = vec_grids(u, n);
                let div = ux.ddx().add(&uy.ddy());
                let sq = ux.mul(&ux).add(&uy.mul(&uy));
                let fx = fd_advect(&ux, &uy, &ux)
                    .scale(-1.0)
                    .sub(&div.mul(&ux))
                    .sub(&sq.ddx().scale(0.5));
                let fy = fd_advect(&ux, &uy, &uy)
                    .scale(-1.0)
                    .sub(&div.mul(&uy))
                    .sub(&sq.ddy().scale(0.5));
                let (dux, duy) = vec_grids(du, n);
                residuals.push((fx, dux));
                residuals.push((fy, duy));
            }
            ModelId::Epdiff | ModelId::LaeAlpha => {
                let (ux, uy) = vec_grids(u, n);
                let m = alpha_m(u, p.alpha2);
                let dm = alpha_m(du, p.alpha2);
                if spec.id == ModelId::Epdiff {
                    // dm = -(u.grad)m - (grad u)^T m - (div u) m, directly.
                    let (mx, my) = vec_grids(&m, n);
                    let div = ux.ddx().add(&uy.ddy());
                    let fx = fd_advect(&ux, &uy, &mx)
                        .scale(-1.0)
                        .sub(&mx.mul(&ux.ddx()))
                        .sub(&my.mul(&uy.ddx()))
                        .sub(&div.mul(&mx));
                    let fy = fd_advect(&ux, &uy, &my)
                        .scale(-1.0)
                        .sub(&mx.mul(&ux.ddy()))
                        .sub(&my.mul(&uy.ddy()))
                        .sub(&div.mul(&my));
                    let (dmx, dmy) = vec_grids(&dm, n);
                    residuals.push((fx, dmx));
                    residuals.push((fy, dmy));
                } else {
                    // Projected: compare curls. For solenoidal u,
                    // curl(-(u.grad)m - (grad u)^T m) = -u.grad(curl m).
                    let qg = Grid::from_field(&curl(&m), n);
                    residuals.push((
                        fd_advect(&ux, &uy, &qg).scale(-1.0),
                        Grid::from_field(&curl(&dm), n),
                    ));
                }
            }
            _ => {
                return Err(Error::InvalidInput(
                    "finite-difference oracle covers torus models only".into(),
                ))
            }
        },
        _ => {
            return Err(Error::InvalidInput(
                "finite-difference oracle covers torus models only".into(),
            ))
        }
    }
    let mut worst = 0.0f64;
    for (fd, spectral) in residuals {
        let scale = spectral.max_abs().max(1.0);
        worst = worst.max(fd.sub(&spectral).max_abs() / scale);
    }
    Ok(worst)
}

/// A generic random state for the finite-difference cross-check. The band
/// is kept at |k| <= 3 so that the second-order truncation error of the
/// reference differences stays below the comparison tolerance at 512^2;
/// wider bands would test the difference stencil, not the model terms.
pub fn fd_state<R: rand::Rng>(spec: &ModelSpec, n: usize, rng: &mut R) -> Result<ModelState> {
    const KMAX: i64 = 2;
    let mean = [0.3, -0.2];
    let band = |rng: &mut R| {
        // Steeper decay than the run presets: the third derivatives that
        // enter the stencil truncation error stay O(1).
        let mut f = Field2D::zeros(n, n);
        for ky in -KMAX..=KMAX {
            for kx in 0..=KMAX {
                if kx == 0 && ky <= 0 {
                    continue;
                }
                let k2 = (kx * kx + ky * ky) as f64;
                let v = num_complex::Complex64::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                f.set_mode(kx, ky, v / (1.0 + k2 * k2));
            }
        }
        f
    };
    let solen = |rng: &mut R| {
        let mut u = crate::spectral2d::stream_solve(&band(rng)).unwrap().1;
        u.mean = mean;
        u
    };
    Ok(match spec.id {
        ModelId::Euler2d | ModelId::QgBeta => ModelState::Vort2 {
            omega: band(rng),
            mean_u: mean,
        },
        ModelId::Boussinesq | ModelId::PassiveScalar => ModelState::VortScalar2 {
            omega: band(rng),
            scalar: band(rng),
            mean_u: mean,
        },
        ModelId::Mhd2d => ModelState::VecPair2 {
            u: solen(rng),
            b: solen(rng),
        },
        ModelId::ChargedFluid => ModelState::VecScalar2 {
            u: solen(rng),
            rho: band(rng),
        },
        ModelId::TemplateMatching | ModelId::Epdiff => {
            // Compressible: add a gradient part to the solenoidal field.
            let chi = band(rng);
            let mut u = solen(rng);
            u.x = u.x.add(&chi.deriv(1, 0));
            u.y = u.y.add(&chi.deriv(0, 1));
            ModelState::Vec2 { u }
        }
        ModelId::LaeAlpha => ModelState::Vec2 { u: solen(rng) },
        _ => {
            return Err(Error::InvalidInput(
                "finite-difference oracle covers torus models only".into(),
            ))
        }
    })
}

/// `-{omega, psi}` by finite differences.
fn fd_curl_bracket(og: &Grid, pg: &Grid) -> Grid {
    fd_jacobian(og, pg).scale(-1.0)
}

fn fd_jacobian(f: &Grid, g: &Grid) -> Grid {
    f.ddx().mul(&g.ddy()).sub(&f.ddy().mul(&g.ddx()))
}
