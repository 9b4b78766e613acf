//! Pseudospectral calculus on the flat 2-torus `[0, 2pi)^2` and the
//! right-hand sides of the torus model catalog: Euler vorticity, beta-plane
//! quasigeostrophic flow, stratified Boussinesq, passive scalar transport,
//! in-plane ideal MHD, charged ideal fluid, template matching, EPDiff and
//! LAE-alpha.
//!
//! Orientation is fixed once: area form `dx dy`, stream function with
//! `laplacian(psi) = omega` and `u = (d_y psi, -d_x psi)`, so the scalar
//! "curl" paired with it is `d_y u1 - d_x u2`. Every sign downstream is
//! cross-validated against a finite-difference oracle rather than trusted.
//!
//! The harmonic (constant) part of a velocity field is carried as two
//! explicit reals next to the spectral array; the `k = 0` bins of the
//! components stay zero. That makes the totally-geodesic mean monitors
//! exact bookkeeping instead of a roundoff question.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{fft, par, TWO_PI};

/// Default grid; acceptance runs resolve their fields well below this.
pub const DEFAULT_GRID: usize = 128;

/// Real scalar field on the torus, stored as `nx * ny` FFT-order spectral
/// coefficients (index `j * nx + i` holds wavevector `(kx(i), ky(j))`),
/// truncated to the 2/3-rule band.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    nx: usize,
    ny: usize,
    c: Vec<Complex64>,
}

fn wavenumber(i: usize, n: usize) -> i64 {
    let i = i as i64;
    let n = n as i64;
    if i <= n / 2 {
        i
    } else {
        i - n
    }
}

impl Field2D {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        assert!(nx.is_power_of_two() && ny.is_power_of_two(), "grid must be powers of two");
        Self {
            nx,
            ny,
            c: vec![Complex64::ZERO; nx * ny],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Retained band: |kx| <= (nx-1)/3, |ky| <= (ny-1)/3.
    pub fn band(&self) -> (i64, i64) {
        (((self.nx - 1) / 3) as i64, ((self.ny - 1) / 3) as i64)
    }

    fn index(&self, kx: i64, ky: i64) -> usize {
        let i = kx.rem_euclid(self.nx as i64) as usize;
        let j = ky.rem_euclid(self.ny as i64) as usize;
        j * self.nx + i
    }

    pub fn coeff(&self, kx: i64, ky: i64) -> Complex64 {
        let (mx, my) = self.band();
        if kx.abs() > mx || ky.abs() > my {
            Complex64::ZERO
        } else {
            self.c[self.index(kx, ky)]
        }
    }

    /// Set mode `(kx, ky)` together with its Hermitian partner.
    pub fn set_mode(&mut self, kx: i64, ky: i64, v: Complex64) {
        let (mx, my) = self.band();
        assert!(kx.abs() <= mx && ky.abs() <= my, "mode ({kx},{ky}) out of band");
        let idx = self.index(kx, ky);
        self.c[idx] = v;
        if kx != 0 || ky != 0 {
            let pid = self.index(-kx, -ky);
            self.c[pid] = v.conj();
        } else {
            self.c[idx] = Complex64::new(v.re, 0.0);
        }
    }

    pub fn add_sin(&mut self, kx: i64, ky: i64, a: f64) {
        let cur = self.coeff(kx, ky);
        self.set_mode(kx, ky, cur + Complex64::new(0.0, -0.5 * a));
    }

    pub fn add_cos(&mut self, kx: i64, ky: i64, a: f64) {
        if kx == 0 && ky == 0 {
            let cur = self.coeff(0, 0);
            self.set_mode(0, 0, cur + Complex64::new(a, 0.0));
        } else {
            let cur = self.coeff(kx, ky);
            self.set_mode(kx, ky, cur + Complex64::new(0.5 * a, 0.0));
        }
    }

    pub fn mean(&self) -> f64 {
        self.c[0].re
    }

    pub fn set_mean(&mut self, v: f64) {
        self.c[0] = Complex64::new(v, 0.0);
    }

    /// `int f dx dy = (2 pi)^2 c_00`.
    pub fn integral(&self) -> f64 {
        TWO_PI * TWO_PI * self.c[0].re
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn max_coeff(&self) -> f64 {
        self.c.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }

    pub fn scale_mut(&mut self, a: f64) {
        for v in self.c.iter_mut() {
            *v *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale_mut(a);
        out
    }

    pub fn axpy(&mut self, a: f64, other: &Self) {
        assert_eq!((self.nx, self.ny), (other.nx, other.ny), "shape mismatch");
        for (s, o) in self.c.iter_mut().zip(other.c.iter()) {
            *s += a * o;
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Multiply by `(i kx)^ox (i ky)^oy`.
    pub fn deriv(&self, ox: u32, oy: u32) -> Self {
        let mut out = self.clone();
        let nx = self.nx;
        let ny = self.ny;
        par::for_each_chunk_mut(&mut out.c, nx, |j, row| {
            let ky = Complex64::new(0.0, wavenumber(j, ny) as f64).powu(oy);
            for (i, v) in row.iter_mut().enumerate() {
                let kx = Complex64::new(0.0, wavenumber(i, nx) as f64).powu(ox);
                *v *= kx * ky;
            }
        });
        out
    }

    pub fn deriv_x(&self) -> Self {
        self.deriv(1, 0)
    }

    pub fn deriv_y(&self) -> Self {
        self.deriv(0, 1)
    }

    /// Apply a real multiplier `g(kx, ky)` per mode.
    pub fn multiplier<F: Fn(i64, i64) -> f64 + Sync>(&self, g: F) -> Self {
        let mut out = self.clone();
        let nx = self.nx;
        let ny = self.ny;
        par::for_each_chunk_mut(&mut out.c, nx, |j, row| {
            let ky = wavenumber(j, ny);
            for (i, v) in row.iter_mut().enumerate() {
                *v *= g(wavenumber(i, nx), ky);
            }
        });
        out
    }

    /// Zero everything outside the 2/3 band and restore exact Hermitian
    /// symmetry inside it.
    pub fn dealias(&mut self) {
        let (mx, my) = self.band();
        let mut out = vec![Complex64::ZERO; self.c.len()];
        for ky in -my..=my {
            for kx in -mx..=mx {
                let a = self.c[self.index(kx, ky)];
                let b = self.c[self.index(-kx, -ky)];
                out[self.index(kx, ky)] = 0.5 * (a + b.conj());
            }
        }
        out[0] = Complex64::new(out[0].re, 0.0);
        self.c = out;
    }

    pub fn to_grid(&self) -> Vec<Complex64> {
        let mut buf = self.c.clone();
        fft2(&mut buf, self.nx, self.ny, false);
        buf
    }

    pub fn from_grid(mut buf: Vec<Complex64>, nx: usize, ny: usize) -> Self {
        fft2(&mut buf, nx, ny, true);
        let mut out = Self { nx, ny, c: buf };
        out.dealias();
        out
    }

    /// Real grid samples, row-major with x fastest.
    pub fn sample(&self) -> Vec<f64> {
        self.to_grid().iter().map(|v| v.re).collect()
    }

    pub fn linf(&self) -> f64 {
        self.to_grid().iter().fold(0.0f64, |m, v| m.max(v.re.abs()))
    }

    /// Embed exactly into a finer grid (band is preserved verbatim).
    pub fn refine(&self, nx: usize, ny: usize) -> Self {
        assert!(nx >= self.nx && ny >= self.ny);
        let mut out = Self::zeros(nx, ny);
        let (mx, my) = self.band();
        for ky in -my..=my {
            for kx in -mx..=mx {
                let v = self.c[self.index(kx, ky)];
                let idx = out.index(kx, ky);
                out.c[idx] = v;
            }
        }
        out
    }

    /// Band-limited random field, zero mean, decaying amplitudes.
    pub fn random_band<R: rand::Rng>(nx: usize, ny: usize, kmax: i64, rng: &mut R) -> Self {
        let mut out = Self::zeros(nx, ny);
        let (mx, my) = out.band();
        let kmax = kmax.min(mx).min(my);
        for ky in -kmax..=kmax {
            for kx in 0..=kmax {
                if kx == 0 && ky <= 0 {
                    continue;
                }
                let k2 = (kx * kx + ky * ky) as f64;
                let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                out.set_mode(kx, ky, v / (1.0 + k2));
            }
        }
        out
    }
}

/// In-place 2D transform: rows of length `nx`, then columns of length `ny`.
fn fft2(c: &mut [Complex64], nx: usize, ny: usize, analyze: bool) {
    let run = |buf: &mut [Complex64]| {
        if analyze {
            fft::analyze(buf);
        } else {
            fft::synthesize(buf);
        }
    };
    par::for_each_chunk_mut(c, nx, |_, row| run(row));
    let mut t = vec![Complex64::ZERO; nx * ny];
    par::fill_indexed(&mut t, |idx| {
        let i = idx / ny;
        let j = idx % ny;
        c[j * nx + i]
    });
    par::for_each_chunk_mut(&mut t, ny, |_, col| run(col));
    par::fill_indexed(c, |idx| {
        let j = idx / nx;
        let i = idx % nx;
        t[i * ny + j]
    });
}

/// De-aliased pointwise product of real fields.
pub fn multiply2(a: &Field2D, b: &Field2D) -> Field2D {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    let ga = a.to_grid();
    let gb = b.to_grid();
    let mut prod = vec![Complex64::ZERO; ga.len()];
    par::fill_indexed(&mut prod, |i| Complex64::new(ga[i].re * gb[i].re, 0.0));
    Field2D::from_grid(prod, a.nx, a.ny)
}

/// L2 inner product `(2 pi)^2 sum a_k conj(b_k)`.
pub fn inner2(a: &Field2D, b: &Field2D) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    let s: f64 = a
        .c
        .iter()
        .zip(b.c.iter())
        .map(|(x, y)| (x * y.conj()).re)
        .sum();
    TWO_PI * TWO_PI * s
}

/// `int f^p` computed on the de-aliased grid (trapezoid = exact spectral
/// quadrature for band-limited integrands up to the truncation bias of
/// cubic and higher powers).
pub fn grid_moment(f: &Field2D, p: u32) -> f64 {
    let g = f.sample();
    let cell = (TWO_PI / f.nx as f64) * (TWO_PI / f.ny as f64);
    g.iter().map(|v| v.powi(p as i32)).sum::<f64>() * cell
}

/// Vector field: two spectral components plus the harmonic (mean) part.
#[derive(Debug, Clone, PartialEq)]
pub struct VecField2D {
    pub x: Field2D,
    pub y: Field2D,
    pub mean: [f64; 2],
}

impl VecField2D {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self {
            x: Field2D::zeros(nx, ny),
            y: Field2D::zeros(nx, ny),
            mean: [0.0; 2],
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        self.x.shape()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.mean.iter().all(|v| v.is_finite())
    }

    pub fn scale_mut(&mut self, a: f64) {
        self.x.scale_mut(a);
        self.y.scale_mut(a);
        self.mean[0] *= a;
        self.mean[1] *= a;
    }

    pub fn axpy(&mut self, a: f64, other: &Self) {
        self.x.axpy(a, &other.x);
        self.y.axpy(a, &other.y);
        self.mean[0] += a * other.mean[0];
        self.mean[1] += a * other.mean[1];
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Spectral divergence `d_x u1 + d_y u2`.
    pub fn divergence(&self) -> Field2D {
        self.x.deriv_x().add(&self.y.deriv_y())
    }

    pub fn max_divergence(&self) -> f64 {
        self.divergence().max_coeff()
    }

    /// Component with the harmonic part folded into the `k = 0` bin; used
    /// when the field multiplies something.
    fn x_full(&self) -> Field2D {
        let mut f = self.x.clone();
        f.set_mean(f.mean() + self.mean[0]);
        f
    }

    fn y_full(&self) -> Field2D {
        let mut f = self.y.clone();
        f.set_mean(f.mean() + self.mean[1]);
        f
    }

    /// Sup norm of the full velocity magnitude on the grid.
    pub fn linf(&self) -> f64 {
        let gx = self.x.to_grid();
        let gy = self.y.to_grid();
        gx.iter()
            .zip(gy.iter())
            .fold(0.0f64, |m, (a, b)| {
                m.max(((a.re + self.mean[0]).powi(2) + (b.re + self.mean[1]).powi(2)).sqrt())
            })
    }

    /// Pull any harmonic content out of the spectral bins into `mean`.
    pub fn normalize_mean(&mut self) {
        self.mean[0] += self.x.mean();
        self.mean[1] += self.y.mean();
        self.x.set_mean(0.0);
        self.y.set_mean(0.0);
    }

    pub fn dealias(&mut self) {
        self.x.dealias();
        self.y.dealias();
        self.normalize_mean();
    }

    pub fn random_solenoidal<R: rand::Rng>(nx: usize, ny: usize, kmax: i64, rng: &mut R) -> Self {
        let omega = Field2D::random_band(nx, ny, kmax, rng);
        stream_solve(&omega).unwrap().1
    }
}

/// L2 inner product including the harmonic parts.
pub fn inner_vec(a: &VecField2D, b: &VecField2D) -> f64 {
    inner2(&a.x, &b.x)
        + inner2(&a.y, &b.y)
        + TWO_PI * TWO_PI * (a.mean[0] * b.mean[0] + a.mean[1] * b.mean[1])
}

/// Scalar curl `d_y u1 - d_x u2`; for `u = (d_y psi, -d_x psi)` this is
/// `laplacian(psi) = omega`.
pub fn curl(u: &VecField2D) -> Field2D {
    u.x.deriv_y().sub(&u.y.deriv_x())
}

/// Remove the gradient part per mode: `u_k -= k (k . u_k) / |k|^2`. The
/// harmonic part passes through untouched.
pub fn leray_project(v: &VecField2D) -> VecField2D {
    let (nx, ny) = v.shape();
    let mut out = v.clone();
    let (mx, my) = v.x.band();
    for ky in -my..=my {
        for kx in -mx..=mx {
            if kx == 0 && ky == 0 {
                continue;
            }
            let idx = v.x.index(kx, ky);
            let dot = kx as f64 * v.x.c[idx] + ky as f64 * v.y.c[idx];
            let k2 = (kx * kx + ky * ky) as f64;
            out.x.c[idx] -= kx as f64 * dot / k2;
            out.y.c[idx] -= ky as f64 * dot / k2;
        }
    }
    let _ = (nx, ny);
    out
}

/// Stream function and velocity of a zero-mean vorticity field:
/// `psi_k = -omega_k / |k|^2`, `u = (d_y psi, -d_x psi)`.
pub fn stream_solve(omega: &Field2D) -> Result<(Field2D, VecField2D)> {
    if omega.mean().abs() > 1e-12 || omega.c[0].im.abs() > 1e-12 {
        return Err(Error::InvalidInput(
            "vorticity must have zero mean for a periodic stream function".into(),
        ));
    }
    let psi = omega.multiplier(|kx, ky| {
        let k2 = (kx * kx + ky * ky) as f64;
        if k2 == 0.0 {
            0.0
        } else {
            -1.0 / k2
        }
    });
    let u = VecField2D {
        x: psi.deriv_y(),
        y: psi.deriv_x().scaled(-1.0),
        mean: [0.0; 2],
    };
    Ok((psi, u))
}

/// Poisson bracket `{f, g} = d_x f d_y g - d_y f d_x g`, de-aliased.
pub fn jacobian(f: &Field2D, g: &Field2D) -> Field2D {
    multiply2(&f.deriv_x(), &g.deriv_y()).sub(&multiply2(&f.deriv_y(), &g.deriv_x()))
}

/// Advection `(u . grad) f` with the harmonic part of `u` included.
fn advect_scalar(u: &VecField2D, f: &Field2D) -> Field2D {
    multiply2(&u.x_full(), &f.deriv_x()).add(&multiply2(&u.y_full(), &f.deriv_y()))
}

fn advect_vec(u: &VecField2D, v: &VecField2D) -> VecField2D {
    VecField2D {
        x: advect_scalar(u, &v.x),
        y: advect_scalar(u, &v.y),
        mean: [0.0; 2],
    }
}

/// Pull the `k = 0` bins of a raw rate into the mean slots.
fn split_mean(mut v: VecField2D) -> VecField2D {
    v.normalize_mean();
    v
}

fn require_solenoidal(u: &VecField2D, what: &str) -> Result<()> {
    if u.max_divergence() > 1e-10 {
        return Err(Error::InvalidInput(format!("{what} must be divergence-free")));
    }
    Ok(())
}

/// Vorticity rate of ideal 2D Euler: `-{omega, psi} - U . grad omega`;
/// the harmonic momentum is conserved, so the mean rate is zero.
pub fn rhs_euler_vorticity(omega: &Field2D, mean_u: [f64; 2]) -> Result<Field2D> {
    let (psi, _) = stream_solve(omega)?;
    let mut rate = jacobian(omega, &psi).scaled(-1.0);
    if mean_u != [0.0, 0.0] {
        rate.axpy(-mean_u[0], &omega.deriv_x());
        rate.axpy(-mean_u[1], &omega.deriv_y());
    }
    Ok(rate)
}

/// Beta-plane quasigeostrophic vorticity rate:
/// `-{omega, psi} - beta d_x psi - U . grad omega`.
pub fn rhs_qg(omega: &Field2D, beta: f64, mean_u: [f64; 2]) -> Result<Field2D> {
    let (psi, _) = stream_solve(omega)?;
    let mut rate = jacobian(omega, &psi).scaled(-1.0);
    rate.axpy(-beta, &psi.deriv_x());
    if mean_u != [0.0, 0.0] {
        rate.axpy(-mean_u[0], &omega.deriv_x());
        rate.axpy(-mean_u[1], &omega.deriv_y());
    }
    Ok(rate)
}

/// Stratified Boussinesq pair:
/// `d_t omega = -{omega, psi} - d_x xi`,
/// `d_t xi = -{xi, psi} + N^2 d_x psi`.
pub fn rhs_boussinesq(
    omega: &Field2D,
    xi: &Field2D,
    n_bv: f64,
    mean_u: [f64; 2],
) -> Result<(Field2D, Field2D)> {
    let (psi, _) = stream_solve(omega)?;
    let mut dw = jacobian(omega, &psi).scaled(-1.0);
    dw.axpy(-1.0, &xi.deriv_x());
    let mut dxi = jacobian(xi, &psi).scaled(-1.0);
    dxi.axpy(n_bv * n_bv, &psi.deriv_x());
    if mean_u != [0.0, 0.0] {
        dw.axpy(-mean_u[0], &omega.deriv_x());
        dw.axpy(-mean_u[1], &omega.deriv_y());
        dxi.axpy(-mean_u[0], &xi.deriv_x());
        dxi.axpy(-mean_u[1], &xi.deriv_y());
    }
    Ok((dw, dxi))
}

/// Ideal-fluid transport of a passive scalar: `(omega rate, -{f, psi})`.
pub fn rhs_passive_scalar(
    omega: &Field2D,
    f: &Field2D,
    mean_u: [f64; 2],
) -> Result<(Field2D, Field2D)> {
    let dw = rhs_euler_vorticity(omega, mean_u)?;
    let (psi, _) = stream_solve(omega)?;
    let mut df = jacobian(f, &psi).scaled(-1.0);
    if mean_u != [0.0, 0.0] {
        df.axpy(-mean_u[0], &f.deriv_x());
        df.axpy(-mean_u[1], &f.deriv_y());
    }
    Ok((dw, df))
}

/// Ideal MHD in velocity form:
/// `du = P(-(u.grad)u + (B.grad)B)`, `dB = -(u.grad)B + (B.grad)u`.
pub fn rhs_mhd(u: &VecField2D, b: &VecField2D) -> Result<(VecField2D, VecField2D)> {
    require_solenoidal(u, "velocity")?;
    require_solenoidal(b, "magnetic field")?;
    let mut raw = advect_vec(u, u);
    raw.scale_mut(-1.0);
    raw.axpy(1.0, &advect_vec(b, b));
    let du = leray_project(&split_mean(raw));
    let mut db = advect_vec(u, b);
    db.scale_mut(-1.0);
    db.axpy(1.0, &advect_vec(b, u));
    Ok((du, split_mean(db)))
}

/// Charged ideal fluid: `du = P(-(u.grad)u - b rho u_perp)`,
/// `drho = -(u.grad)rho`, with `u_perp = (-u2, u1)`.
pub fn rhs_charged_fluid(
    u: &VecField2D,
    rho: &Field2D,
    b: f64,
) -> Result<(VecField2D, Field2D)> {
    require_solenoidal(u, "velocity")?;
    let mut raw = advect_vec(u, u);
    raw.scale_mut(-1.0);
    raw.x.axpy(b, &multiply2(rho, &u.y_full()));
    raw.y.axpy(-b, &multiply2(rho, &u.x_full()));
    let du = leray_project(&split_mean(raw));
    let drho = advect_scalar(u, rho).scaled(-1.0);
    Ok((du, drho))
}

/// Template matching: `du = -(u.grad)u - (div u) u - 1/2 grad |u|^2`.
pub fn rhs_template_matching(u: &VecField2D) -> VecField2D {
    let mut raw = advect_vec(u, u);
    raw.scale_mut(-1.0);
    let div = u.divergence();
    raw.x.axpy(-1.0, &multiply2(&div, &u.x_full()));
    raw.y.axpy(-1.0, &multiply2(&div, &u.y_full()));
    let sq = multiply2(&u.x_full(), &u.x_full()).add(&multiply2(&u.y_full(), &u.y_full()));
    raw.x.axpy(-0.5, &sq.deriv_x());
    raw.y.axpy(-0.5, &sq.deriv_y());
    split_mean(raw)
}

fn alpha_momentum(u: &VecField2D, alpha2: f64) -> VecField2D {
    let g = |kx: i64, ky: i64| 1.0 + alpha2 * (kx * kx + ky * ky) as f64;
    VecField2D {
        x: u.x.multiplier(g),
        y: u.y.multiplier(g),
        mean: u.mean,
    }
}

fn alpha_invert(m: &VecField2D, alpha2: f64) -> VecField2D {
    let g = |kx: i64, ky: i64| 1.0 / (1.0 + alpha2 * (kx * kx + ky * ky) as f64);
    VecField2D {
        x: m.x.multiplier(g),
        y: m.y.multiplier(g),
        mean: m.mean,
    }
}

/// `(grad u)^T m`: component i is `m_j d_i u_j`.
fn grad_transpose(u: &VecField2D, m: &VecField2D) -> VecField2D {
    VecField2D {
        x: multiply2(&m.x_full(), &u.x.deriv_x()).add(&multiply2(&m.y_full(), &u.y.deriv_x())),
        y: multiply2(&m.x_full(), &u.x.deriv_y()).add(&multiply2(&m.y_full(), &u.y.deriv_y())),
        mean: [0.0; 2],
    }
}

/// EPDiff (higher-dimensional Camassa-Holm): with `m = (1 - alpha^2 lap)u`,
/// `dm = -(u.grad)m - (grad u)^T m - (div u) m`, returned as a u-rate.
pub fn rhs_epdiff(u: &VecField2D, alpha2: f64) -> Result<VecField2D> {
    if alpha2 <= 0.0 {
        return Err(Error::InvalidInput("alpha^2 must be positive".into()));
    }
    let m = alpha_momentum(u, alpha2);
    let mut dm = advect_vec(u, &m);
    dm.scale_mut(-1.0);
    dm.axpy(-1.0, &grad_transpose(u, &m));
    let div = u.divergence();
    dm.x.axpy(-1.0, &multiply2(&div, &m.x_full()));
    dm.y.axpy(-1.0, &multiply2(&div, &m.y_full()));
    Ok(alpha_invert(&split_mean(dm), alpha2))
}

/// LAE-alpha (averaged Euler): `dm = P(-(u.grad)m - (grad u)^T m)` with the
/// same alpha-momentum, u-rate by multiplier inversion.
pub fn rhs_lae_alpha(u: &VecField2D, alpha2: f64) -> Result<VecField2D> {
    if alpha2 <= 0.0 {
        return Err(Error::InvalidInput("alpha^2 must be positive".into()));
    }
    require_solenoidal(u, "velocity")?;
    let m = alpha_momentum(u, alpha2);
    let mut dm = advect_vec(u, &m);
    dm.scale_mut(-1.0);
    dm.axpy(-1.0, &grad_transpose(u, &m));
    Ok(alpha_invert(&leray_project(&split_mean(dm)), alpha2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const N: usize = 64;

    fn field() -> Field2D {
        Field2D::zeros(N, N)
    }

    fn close(a: &Field2D, b: &Field2D, tol: f64) {
        let d = a.sub(b).max_coeff();
        assert!(d <= tol, "fields differ by {d:.3e} > {tol:.1e}");
    }

    fn close_vec(a: &VecField2D, b: &VecField2D, tol: f64) {
        close(&a.x, &b.x, tol);
        close(&a.y, &b.y, tol);
        assert!((a.mean[0] - b.mean[0]).abs() <= tol);
        assert!((a.mean[1] - b.mean[1]).abs() <= tol);
    }

    #[test]
    fn grid_roundtrip() {
        let mut f = field();
        f.add_sin(1, 0, 1.0);
        f.add_cos(2, -3, 0.4);
        let back = Field2D::from_grid(f.to_grid(), N, N);
        close(&back, &f, 1e-14);
    }

    #[test]
    fn deriv_and_multiply() {
        let mut f = field();
        f.add_sin(1, 0, 1.0); // sin x
        let mut g = field();
        g.add_sin(0, 1, 1.0); // sin y
        // d_x sin x = cos x
        let mut want = field();
        want.add_cos(1, 0, 1.0);
        close(&f.deriv_x(), &want, 1e-14);
        // sin x sin y = (cos(x-y) - cos(x+y))/2
        let p = multiply2(&f, &g);
        let mut want = field();
        want.add_cos(1, -1, 0.5);
        want.add_cos(1, 1, -0.5);
        close(&p, &want, 1e-14);
    }

    #[test]
    fn jacobian_examples() {
        let mut f = field();
        f.add_sin(1, 0, 1.0);
        let mut g = field();
        g.add_sin(0, 1, 1.0);
        assert!(jacobian(&f, &f).max_coeff() < 1e-14);
        // {sin x, sin y} = cos x cos y
        let mut want = field();
        want.add_cos(1, 1, 0.5);
        want.add_cos(1, -1, 0.5);
        close(&jacobian(&f, &g), &want, 1e-14);
        let mut c = field();
        c.add_cos(0, 0, 2.0);
        assert!(jacobian(&f, &c).max_coeff() < 1e-14);
    }

    #[test]
    fn leray_examples() {
        // Gradient field is annihilated.
        let mut phi = field();
        phi.add_sin(2, 1, 0.7);
        phi.add_cos(1, -3, 0.4);
        let grad = VecField2D {
            x: phi.deriv_x(),
            y: phi.deriv_y(),
            mean: [0.3, -0.2],
        };
        let p = leray_project(&grad);
        assert!(p.x.max_coeff() < 1e-14);
        assert!(p.y.max_coeff() < 1e-14);
        assert_eq!(p.mean, [0.3, -0.2]);
        // Divergence-free input unchanged.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = VecField2D::random_solenoidal(N, N, 10, &mut rng);
        close_vec(&leray_project(&u), &u, 1e-14);
        // v = (sin x, sin x): the k=(1,0) mode of v1 is removed, v2 kept.
        let mut sx = field();
        sx.add_sin(1, 0, 1.0);
        let v = VecField2D {
            x: sx.clone(),
            y: sx.clone(),
            mean: [0.0; 2],
        };
        let p = leray_project(&v);
        assert!(p.x.max_coeff() < 1e-14);
        close(&p.y, &sx, 1e-14);
    }

    #[test]
    fn leray_idempotent_self_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let v = VecField2D {
                x: Field2D::random_band(N, N, 8, &mut rng),
                y: Field2D::random_band(N, N, 8, &mut rng),
                mean: [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
            };
            let w = VecField2D {
                x: Field2D::random_band(N, N, 8, &mut rng),
                y: Field2D::random_band(N, N, 8, &mut rng),
                mean: [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
            };
            let pv = leray_project(&v);
            close_vec(&leray_project(&pv), &pv, 1e-12);
            let lhs = inner_vec(&pv, &w);
            let rhs = inner_vec(&v, &leray_project(&w));
            assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
            assert!(pv.max_divergence() < 1e-12);
        }
    }

    #[test]
    fn stream_solve_examples() {
        // omega = sin y -> psi = -sin y, u = (-cos y, 0).
        let mut w = field();
        w.add_sin(0, 1, 1.0);
        let (psi, u) = stream_solve(&w).unwrap();
        let mut want_psi = field();
        want_psi.add_sin(0, 1, -1.0);
        close(&psi, &want_psi, 1e-14);
        let mut want_ux = field();
        want_ux.add_cos(0, 1, -1.0);
        close(&u.x, &want_ux, 1e-14);
        assert!(u.y.max_coeff() < 1e-14);
        // omega = 0 -> u = 0.
        let (_, u0) = stream_solve(&field()).unwrap();
        assert!(u0.x.max_coeff() == 0.0 && u0.y.max_coeff() == 0.0);
        // Round trip curl(u) = omega on random band-limited vorticity.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = Field2D::random_band(N, N, 12, &mut rng);
        let (_, u) = stream_solve(&w).unwrap();
        close(&curl(&u), &w, 1e-13);
        assert!(u.max_divergence() < 1e-13);
        // Nonzero mean rejected.
        let mut bad = field();
        bad.add_cos(0, 0, 1.0);
        assert!(stream_solve(&bad).is_err());
    }

    #[test]
    fn euler_vorticity_examples() {
        // Parallel shear omega = sin y is steady.
        let mut w = field();
        w.add_sin(0, 1, 1.0);
        assert!(rhs_euler_vorticity(&w, [0.0; 2]).unwrap().max_coeff() < 1e-14);
        // Taylor-Green omega = cos x + cos y is steady (psi = -omega).
        let mut tg = field();
        tg.add_cos(1, 0, 1.0);
        tg.add_cos(0, 1, 1.0);
        assert!(rhs_euler_vorticity(&tg, [0.0; 2]).unwrap().max_coeff() < 1e-13);
        // omega = sin x + cos 2y -> (3/2) cos x sin 2y with this
        // orientation (finite-difference oracle agrees; see oracle tests).
        let mut w = field();
        w.add_sin(1, 0, 1.0);
        w.add_cos(0, 2, 1.0);
        let rate = rhs_euler_vorticity(&w, [0.0; 2]).unwrap();
        // (3/2) cos x sin 2y = (3/4)(sin(2y+x) + sin(2y-x))
        let mut want = field();
        want.add_sin(1, 2, 0.75);
        want.add_sin(-1, 2, 0.75);
        close(&rate, &want, 1e-13);
        // Mean advection rotates the steady shear out of steadiness.
        let mut w = field();
        w.add_sin(0, 1, 1.0);
        let rate = rhs_euler_vorticity(&w, [0.0, 2.0]).unwrap();
        let mut want = field();
        want.add_cos(0, 1, -2.0);
        close(&rate, &want, 1e-13);
    }

    #[test]
    fn qg_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let w = Field2D::random_band(N, N, 10, &mut rng);
        close(
            &rhs_qg(&w, 0.0, [0.0; 2]).unwrap(),
            &rhs_euler_vorticity(&w, [0.0; 2]).unwrap(),
            1e-15,
        );
        // Zonal flow stays steady for any beta.
        let mut w = field();
        w.add_sin(0, 1, 1.0);
        assert!(rhs_qg(&w, 3.7, [0.0; 2]).unwrap().max_coeff() < 1e-14);
        // omega = sin x, beta = 1: rate = -d_x(-sin x) = cos x.
        let mut w = field();
        w.add_sin(1, 0, 1.0);
        let mut want = field();
        want.add_cos(1, 0, 1.0);
        close(&rhs_qg(&w, 1.0, [0.0; 2]).unwrap(), &want, 1e-13);
    }

    #[test]
    fn boussinesq_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = Field2D::random_band(N, N, 10, &mut rng);
        let (dw, dxi) = rhs_boussinesq(&w, &field(), 0.0, [0.0; 2]).unwrap();
        close(&dw, &rhs_euler_vorticity(&w, [0.0; 2]).unwrap(), 1e-15);
        assert!(dxi.max_coeff() < 1e-14);
        // omega = 0, xi = sin y: both rates vanish.
        let mut xi = field();
        xi.add_sin(0, 1, 1.0);
        let (dw, dxi) = rhs_boussinesq(&field(), &xi, 1.0, [0.0; 2]).unwrap();
        assert!(dw.max_coeff() < 1e-14 && dxi.max_coeff() < 1e-14);
        // omega = 0, xi = sin x, N = 2: dw = -cos x, dxi = 0.
        let mut xi = field();
        xi.add_sin(1, 0, 1.0);
        let (dw, dxi) = rhs_boussinesq(&field(), &xi, 2.0, [0.0; 2]).unwrap();
        let mut want = field();
        want.add_cos(1, 0, -1.0);
        close(&dw, &want, 1e-13);
        assert!(dxi.max_coeff() < 1e-14);
    }

    #[test]
    fn passive_scalar_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let w = Field2D::random_band(N, N, 10, &mut rng);
        let mut c = field();
        c.add_cos(0, 0, 1.0);
        let (_, df) = rhs_passive_scalar(&w, &c, [0.0; 2]).unwrap();
        assert!(df.max_coeff() < 1e-13);
        // f = omega: scalar rate locks to the vorticity rate.
        let (dw, df) = rhs_passive_scalar(&w, &w, [0.0; 2]).unwrap();
        close(&df, &dw, 1e-13);
        // omega = sin y, f = sin x -> df = cos x cos y.
        let mut w = field();
        w.add_sin(0, 1, 1.0);
        let mut f = field();
        f.add_sin(1, 0, 1.0);
        let (_, df) = rhs_passive_scalar(&w, &f, [0.0; 2]).unwrap();
        let mut want = field();
        want.add_cos(1, 1, 0.5);
        want.add_cos(1, -1, 0.5);
        close(&df, &want, 1e-13);
    }

    #[test]
    fn mhd_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let u = VecField2D::random_solenoidal(N, N, 10, &mut rng);
        // B = 0: velocity-form Euler; compare through the curl.
        let (du, db) = rhs_mhd(&u, &VecField2D::zeros(N, N)).unwrap();
        assert!(db.x.max_coeff() < 1e-14 && db.y.max_coeff() < 1e-14);
        let expect = rhs_euler_vorticity(&curl(&u), [0.0; 2]).unwrap();
        close(&curl(&du), &expect, 1e-10);
        // B = u: aligned Alfvenic steady state.
        let (du, db) = rhs_mhd(&u, &u).unwrap();
        assert!(du.x.max_coeff() < 1e-12 && du.y.max_coeff() < 1e-12);
        assert!(db.x.max_coeff() < 1e-12 && db.y.max_coeff() < 1e-12);
        // u = 0: du = P((B.grad)B), dB = 0.
        let b = VecField2D::random_solenoidal(N, N, 10, &mut rng);
        let (du, db) = rhs_mhd(&VecField2D::zeros(N, N), &b).unwrap();
        assert!(db.x.max_coeff() < 1e-14 && db.y.max_coeff() < 1e-14);
        let want = leray_project(&split_mean({
            let mut a = advect_vec(&b, &b);
            a.scale_mut(1.0);
            a
        }));
        close_vec(&du, &want, 1e-13);
        // Rates stay solenoidal.
        let (du, db) = rhs_mhd(&u, &b).unwrap();
        assert!(du.max_divergence() < 1e-11);
        assert!(db.max_divergence() < 1e-11);
        // Non-solenoidal input rejected.
        let mut bad = u.clone();
        bad.x.add_sin(1, 0, 1.0);
        assert!(rhs_mhd(&bad, &b).is_err());
    }

    #[test]
    fn charged_fluid_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = VecField2D::random_solenoidal(N, N, 10, &mut rng);
        let rho = Field2D::random_band(N, N, 10, &mut rng);
        // rho = 0 or b = 0: ideal Euler.
        let (du0, _) = rhs_charged_fluid(&u, &field(), 1.0).unwrap();
        let (du1, _) = rhs_charged_fluid(&u, &rho, 0.0).unwrap();
        close_vec(&du0, &du1, 1e-13);
        let expect = rhs_euler_vorticity(&curl(&u), [0.0; 2]).unwrap();
        close(&curl(&du0), &expect, 1e-10);
        // Constant rho: the Lorentz-type term is a gradient plus mean; the
        // vorticity evolution is unchanged.
        let mut c = field();
        c.add_cos(0, 0, 0.8);
        let (du, _) = rhs_charged_fluid(&u, &c, 1.3).unwrap();
        close(&curl(&du), &expect, 1e-10);
        // Scalar transport: drho = -(u.grad)rho.
        let (_, drho) = rhs_charged_fluid(&u, &rho, 1.0).unwrap();
        close(&drho, &advect_scalar(&u, &rho).scaled(-1.0), 1e-14);
    }

    #[test]
    fn template_matching_examples() {
        // Constant field is steady.
        let mut u = VecField2D::zeros(N, N);
        u.mean = [1.2, -0.7];
        let r = rhs_template_matching(&u);
        assert!(r.x.max_coeff() < 1e-14 && r.y.max_coeff() < 1e-14);
        assert!(r.mean[0].abs() < 1e-14 && r.mean[1].abs() < 1e-14);
        // u = (sin x, 0): all three terms equal (-sin x cos x, 0), total
        // (-(3/2) sin 2x, 0) - the 1D reduction.
        let mut u = VecField2D::zeros(N, N);
        u.x.add_sin(1, 0, 1.0);
        let r = rhs_template_matching(&u);
        let mut want = field();
        want.add_sin(2, 0, -1.5);
        close(&r.x, &want, 1e-13);
        assert!(r.y.max_coeff() < 1e-14);
        // u = (0, sin x): only the metric gradient survives.
        let mut u = VecField2D::zeros(N, N);
        u.y.add_sin(1, 0, 1.0);
        let r = rhs_template_matching(&u);
        let mut want = field();
        want.add_sin(2, 0, -0.5);
        close(&r.x, &want, 1e-13);
        assert!(r.y.max_coeff() < 1e-14);
    }

    #[test]
    fn epdiff_examples() {
        let mut u = VecField2D::zeros(N, N);
        u.mean = [0.4, 0.9];
        let r = rhs_epdiff(&u, 1.0).unwrap();
        assert!(r.x.max_coeff() < 1e-14 && r.mean[0].abs() < 1e-14);
        // u = (sin x, 0), alpha^2 = 1: the 1D Camassa-Holm reduction
        // (-(3/5) sin 2x, 0).
        let mut u = VecField2D::zeros(N, N);
        u.x.add_sin(1, 0, 1.0);
        let r = rhs_epdiff(&u, 1.0).unwrap();
        let mut want = field();
        want.add_sin(2, 0, -0.6);
        close(&r.x, &want, 1e-13);
        assert!(r.y.max_coeff() < 1e-14);
        // alpha^2 -> 0 approaches template matching.
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = VecField2D {
            x: Field2D::random_band(N, N, 6, &mut rng),
            y: Field2D::random_band(N, N, 6, &mut rng),
            mean: [0.0; 2],
        };
        let small = rhs_epdiff(&u, 1e-6).unwrap();
        let tm = rhs_template_matching(&u);
        let dx = small.sub(&tm);
        assert!(dx.x.max_coeff() < 1e-4 && dx.y.max_coeff() < 1e-4);
        assert!(rhs_epdiff(&u, 0.0).is_err());
    }

    #[test]
    fn lae_alpha_examples() {
        // Shear u = (-cos y, 0) is steady.
        let mut u = VecField2D::zeros(N, N);
        u.x.add_cos(0, 1, -1.0);
        let r = rhs_lae_alpha(&u, 0.7).unwrap();
        assert!(r.x.max_coeff() < 1e-13 && r.y.max_coeff() < 1e-13);
        // u = 0 -> 0.
        let r = rhs_lae_alpha(&VecField2D::zeros(N, N), 1.0).unwrap();
        assert!(r.x.max_coeff() == 0.0 && r.y.max_coeff() == 0.0);
        // alpha^2 -> 0: curl of the rate approaches the Euler vorticity rate.
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let u = VecField2D::random_solenoidal(N, N, 6, &mut rng);
        let r = rhs_lae_alpha(&u, 1e-6).unwrap();
        let expect = rhs_euler_vorticity(&curl(&u), [0.0; 2]).unwrap();
        close(&curl(&r), &expect, 1e-4);
        assert!(r.max_divergence() < 1e-11);
        assert!(rhs_lae_alpha(&u, -1.0).is_err());
    }

    #[test]
    fn energy_rates_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = Field2D::random_band(N, N, 10, &mut rng);
        // Vorticity models: energy = 1/2 sum |w_k|^2/|k|^2; rate pairs dw
        // against psi-weighted w.
        let inv_lap = |f: &Field2D| {
            f.multiplier(|kx, ky| {
                let k2 = (kx * kx + ky * ky) as f64;
                if k2 == 0.0 {
                    0.0
                } else {
                    1.0 / k2
                }
            })
        };
        for rate in [
            rhs_euler_vorticity(&w, [0.0; 2]).unwrap(),
            rhs_qg(&w, 1.5, [0.0; 2]).unwrap(),
        ] {
            let r = inner2(&rate, &inv_lap(&w));
            assert!(r.abs() < 1e-11, "vorticity energy rate {r:.3e}");
        }
        // Boussinesq: E = 1/2 int |u|^2 + 1/2 N^-2 int xi^2.
        let xi = Field2D::random_band(N, N, 10, &mut rng);
        let n_bv = 1.7;
        let (dw, dxi) = rhs_boussinesq(&w, &xi, n_bv, [0.0; 2]).unwrap();
        let r = inner2(&dw, &inv_lap(&w)) + inner2(&dxi, &xi) / (n_bv * n_bv);
        assert!(r.abs() < 1e-11, "boussinesq energy rate {r:.3e}");
        // MHD: E = 1/2 int |u|^2 + |B|^2.
        let u = VecField2D::random_solenoidal(N, N, 8, &mut rng);
        let b = VecField2D::random_solenoidal(N, N, 8, &mut rng);
        let (du, db) = rhs_mhd(&u, &b).unwrap();
        let r = inner_vec(&du, &u) + inner_vec(&db, &b);
        assert!(r.abs() < 1e-11, "mhd energy rate {r:.3e}");
        // Charged fluid: the Lorentz-type force is perpendicular to u.
        let rho = Field2D::random_band(N, N, 8, &mut rng);
        let (du, _) = rhs_charged_fluid(&u, &rho, 1.2).unwrap();
        let r = inner_vec(&du, &u);
        assert!(r.abs() < 1e-11, "charged energy rate {r:.3e}");
        // Template matching: L2 energy.
        let v = VecField2D {
            x: Field2D::random_band(N, N, 8, &mut rng),
            y: Field2D::random_band(N, N, 8, &mut rng),
            mean: [0.1, -0.3],
        };
        let r = inner_vec(&rhs_template_matching(&v), &v);
        assert!(r.abs() < 1e-11, "template energy rate {r:.3e}");
        // EPDiff / LAE-alpha: H1-alpha energy.
        let a2 = 0.6;
        let du = rhs_epdiff(&v, a2).unwrap();
        let r = inner_vec(&alpha_momentum(&du, a2), &v);
        assert!(r.abs() < 1e-11, "epdiff energy rate {r:.3e}");
        let du = rhs_lae_alpha(&u, a2).unwrap();
        let r = inner_vec(&alpha_momentum(&du, a2), &u);
        assert!(r.abs() < 1e-11, "lae energy rate {r:.3e}");
    }

    #[test]
    fn casimir_rates_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let w = Field2D::random_band(N, N, 8, &mut rng);
        let rate = rhs_euler_vorticity(&w, [0.0; 2]).unwrap();
        // Enstrophy rate int w dw: exact under de-aliasing.
        assert!(inner2(&rate, &w).abs() < 1e-11);
        // Cross-helicity rate for MHD: d/dt int u . B = 0.
        let u = VecField2D::random_solenoidal(N, N, 8, &mut rng);
        let b = VecField2D::random_solenoidal(N, N, 8, &mut rng);
        let (du, db) = rhs_mhd(&u, &b).unwrap();
        let r = inner_vec(&du, &b) + inner_vec(&u, &db);
        assert!(r.abs() < 1e-11, "cross-helicity rate {r:.3e}");
    }
}
