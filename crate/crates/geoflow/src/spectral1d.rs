//! Truncated Fourier calculus on the circle and the right-hand sides of
//! the 1D model catalog: Burgers, KdV, Camassa-Holm (plain and extended),
//! Hunter-Saxton and the five two-component systems.
//!
//! A [`Spectrum1D`] holds centered coefficients `c_k`, `k = -N..N`, of a
//! real function `u(x) = sum c_k e^{ikx}` on `[0, 2pi)`. Products go
//! through a collocation grid of at least `3N+1` points, which makes every
//! quadratic nonlinearity alias-free; Hermitian symmetry is re-enforced
//! after each product so roundoff cannot accumulate an imaginary part.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::{fft, TWO_PI};

/// Default cutoff; with 256 collocation points, 3N+1 <= 256 holds.
pub const DEFAULT_CUTOFF: usize = 85;

/// Band-limited real function on the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    n: usize,
    /// `2n+1` coefficients; index `i` holds mode `k = i - n`.
    c: Vec<Complex64>,
}

/// Inertia operator as a Fourier multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric1D {
    L2,
    H1,
}

impl Metric1D {
    pub fn lambda(self, k: i64) -> f64 {
        match self {
            Metric1D::L2 => 1.0,
            Metric1D::H1 => 1.0 + (k * k) as f64,
        }
    }
}

impl Spectrum1D {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            c: vec![Complex64::ZERO; 2 * n + 1],
        }
    }

    pub fn cutoff(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        let n = self.n as i64;
        if k < -n || k > n {
            Complex64::ZERO
        } else {
            self.c[(k + n) as usize]
        }
    }

    /// Set mode `k` and its Hermitian partner `-k` together.
    pub fn set_mode(&mut self, k: i64, v: Complex64) {
        let n = self.n as i64;
        assert!(k.unsigned_abs() as i64 <= n, "mode {k} out of band");
        self.c[(k + n) as usize] = v;
        if k != 0 {
            self.c[(n - k) as usize] = v.conj();
        } else {
            self.c[n as usize] = Complex64::new(v.re, 0.0);
        }
    }

    /// `a sin(kx)` contribution.
    pub fn add_sin(&mut self, k: i64, a: f64) {
        let cur = self.coeff(k);
        self.set_mode(k, cur + Complex64::new(0.0, -0.5 * a));
    }

    /// `a cos(kx)` contribution.
    pub fn add_cos(&mut self, k: i64, a: f64) {
        if k == 0 {
            let cur = self.coeff(0);
            self.set_mode(0, cur + Complex64::new(a, 0.0));
        } else {
            let cur = self.coeff(k);
            self.set_mode(k, cur + Complex64::new(0.5 * a, 0.0));
        }
    }

    pub fn mean(&self) -> f64 {
        self.c[self.n].re
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|v| v.norm_sqr() == 0.0)
    }

    pub fn max_coeff(&self) -> f64 {
        self.c.iter().fold(0.0f64, |m, v| m.max(v.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Fraction of the spectral energy carried by modes with |k| > 2N/3.
    /// A smooth solution keeps this near zero; a forming shock fills the
    /// band from below.
    pub fn upper_band_fraction(&self) -> f64 {
        let n = self.n as i64;
        let cut = 2 * n / 3;
        let mut total = 0.0;
        let mut upper = 0.0;
        for k in -n..=n {
            let e = self.coeff(k).norm_sqr();
            total += e;
            if k.abs() > cut {
                upper += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            upper / total
        }
    }

    pub fn enforce_hermitian(&mut self) {
        let n = self.n as i64;
        self.c[self.n].im = 0.0;
        for k in 1..=n {
            let a = self.c[(n + k) as usize];
            let b = self.c[(n - k) as usize];
            let avg = 0.5 * (a + b.conj());
            self.c[(n + k) as usize] = avg;
            self.c[(n - k) as usize] = avg.conj();
        }
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

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Self) {
        assert_eq!(self.n, other.n, "cutoff mismatch");
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

    /// Coefficient-wise multiplication by `(ik)^order`.
    pub fn deriv(&self, order: u32) -> Self {
        let mut out = self.clone();
        let n = self.n as i64;
        for k in -n..=n {
            let ik = Complex64::new(0.0, k as f64);
            out.c[(k + n) as usize] *= ik.powu(order);
        }
        out
    }

    /// Collocation grid length guaranteeing alias-free quadratic products.
    pub fn grid_len(&self) -> usize {
        (3 * self.n + 1).next_power_of_two()
    }

    /// Evaluate on an `m`-point uniform grid, `m >= 2n+1`.
    pub fn to_grid(&self, m: usize) -> Vec<Complex64> {
        assert!(m >= 2 * self.n + 1, "grid too small for band");
        let mut buf = vec![Complex64::ZERO; m];
        let n = self.n as i64;
        for k in -n..=n {
            let bin = k.rem_euclid(m as i64) as usize;
            buf[bin] = self.coeff(k);
        }
        fft::synthesize(&mut buf);
        buf
    }

    pub fn from_grid(buf: &mut Vec<Complex64>, n: usize) -> Self {
        fft::analyze(buf);
        let m = buf.len() as i64;
        let mut out = Self::zeros(n);
        for k in -(n as i64)..=(n as i64) {
            out.c[(k + n as i64) as usize] = buf[k.rem_euclid(m) as usize];
        }
        out.enforce_hermitian();
        out
    }

    /// Sample the function at grid points and return real values.
    pub fn sample(&self, m: usize) -> Vec<f64> {
        self.to_grid(m).iter().map(|v| v.re).collect()
    }

    /// Sup norm on the collocation grid.
    pub fn linf(&self) -> f64 {
        self.to_grid(self.grid_len())
            .iter()
            .fold(0.0f64, |m, v| m.max(v.re.abs()))
    }

    /// Band-limited random field with |k| <= kmax, unit-scale coefficients.
    pub fn random_band<R: rand::Rng>(n: usize, kmax: i64, rng: &mut R) -> Self {
        let mut out = Self::zeros(n);
        for k in 1..=kmax.min(n as i64) {
            let v = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            out.set_mode(k, v / (1.0 + (k * k) as f64).sqrt());
        }
        out
    }
}

/// De-aliased pointwise product.
pub fn multiply(s: &Spectrum1D, t: &Spectrum1D) -> Spectrum1D {
    assert_eq!(s.n, t.n, "cutoff mismatch");
    let m = s.grid_len();
    let a = s.to_grid(m);
    let b = t.to_grid(m);
    let mut prod: Vec<Complex64> = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| Complex64::new(x.re * y.re, 0.0))
        .collect();
    Spectrum1D::from_grid(&mut prod, s.n)
}

/// Apply the inertia multiplier `lambda_k`.
pub fn apply_inertia(s: &Spectrum1D, metric: Metric1D) -> Spectrum1D {
    let mut out = s.clone();
    let n = s.n as i64;
    for k in -n..=n {
        out.c[(k + n) as usize] *= metric.lambda(k);
    }
    out
}

/// Invert the inertia multiplier (division by `lambda_k >= 1`).
pub fn inertia_invert(m: &Spectrum1D, metric: Metric1D) -> Spectrum1D {
    let mut out = m.clone();
    let n = m.n as i64;
    for k in -n..=n {
        out.c[(k + n) as usize] /= metric.lambda(k);
    }
    out
}

/// Parseval inner product `<s, t>_metric = 2 pi sum lambda_k s_k conj(t_k)`.
pub fn inner(s: &Spectrum1D, t: &Spectrum1D, metric: Metric1D) -> f64 {
    assert_eq!(s.n, t.n, "cutoff mismatch");
    let n = s.n as i64;
    let mut acc = 0.0;
    for k in -n..=n {
        acc += metric.lambda(k) * (s.coeff(k) * t.coeff(k).conj()).re;
    }
    TWO_PI * acc
}

/// `ad(X)^T Y = A^{-1}(2 X' A(Y) + X (A(Y))')` for the multiplier metric
/// `A`; for L2 this is the closed form `2X'Y + XY'`.
pub fn ad_transpose(metric: Metric1D, x: &Spectrum1D, y: &Spectrum1D) -> Spectrum1D {
    let m = apply_inertia(y, metric);
    let mut r = multiply(&x.deriv(1), &m).scaled(2.0);
    r.axpy(1.0, &multiply(x, &m.deriv(1)));
    inertia_invert(&r, metric)
}

/// `du = -3 u u'`.
pub fn rhs_burgers(u: &Spectrum1D) -> Spectrum1D {
    multiply(u, &u.deriv(1)).scaled(-3.0)
}

/// `du = -3 u u' - 2a u'''`.
pub fn rhs_kdv(u: &Spectrum1D, a: f64) -> Spectrum1D {
    let mut out = rhs_burgers(u);
    out.axpy(-2.0 * a, &u.deriv(3));
    out
}

/// Camassa-Holm u-rate: with `m = u - u''`,
/// `dm = -u m' - 2 u' m - 2a u'''`, returned through `(1 - d^2)^{-1}`.
pub fn rhs_camassa_holm(u: &Spectrum1D, a: f64) -> Spectrum1D {
    let m = apply_inertia(u, Metric1D::H1);
    let mut dm = multiply(u, &m.deriv(1)).scaled(-1.0);
    dm.axpy(-2.0, &multiply(&u.deriv(1), &m));
    dm.axpy(-2.0 * a, &u.deriv(3));
    inertia_invert(&dm, Metric1D::H1)
}

/// Hunter-Saxton rate for the state `v = u''` (zero mean):
/// `dv = -2 u' v - u v'` with `u` reconstructed by double antiderivative.
pub fn rhs_hunter_saxton(v: &Spectrum1D) -> Result<Spectrum1D> {
    if v.mean().abs() > 1e-12 || v.coeff(0).im.abs() > 1e-12 {
        return Err(Error::InvalidInput(
            "Hunter-Saxton state v = u'' must have zero mean".into(),
        ));
    }
    let u = hs_reconstruct(v);
    let mut out = multiply(&u.deriv(1), v).scaled(-2.0);
    out.axpy(-1.0, &multiply(&u, &v.deriv(1)));
    Ok(out)
}

/// Zero-mean `u` with `u'' = v`.
pub fn hs_reconstruct(v: &Spectrum1D) -> Spectrum1D {
    let mut u = v.clone();
    let n = v.n as i64;
    for k in -n..=n {
        if k != 0 {
            u.c[(k + n) as usize] /= -((k * k) as f64);
        } else {
            u.c[n as usize] = Complex64::ZERO;
        }
    }
    u
}

/// The five two-component circle systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairVariant {
    L2,
    L2Sigma,
    H1,
    H1Sigma,
    L2AlphaCentral,
}

impl PairVariant {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "l2" => PairVariant::L2,
            "l2-sigma" => PairVariant::L2Sigma,
            "h1" => PairVariant::H1,
            "h1-sigma" => PairVariant::H1Sigma,
            "l2-alpha-central" => PairVariant::L2AlphaCentral,
            _ => return Err(Error::InvalidInput(format!("unknown pair variant `{s}`"))),
        })
    }

    /// Metric applied per component.
    pub fn metric(self) -> Metric1D {
        match self {
            PairVariant::H1 | PairVariant::H1Sigma => Metric1D::H1,
            _ => Metric1D::L2,
        }
    }
}

/// Two-component rates `(du, df)`; `a` enters only the alpha-central
/// variant. The H1 variants state the momentum rates and return velocity
/// rates after per-component inertia inversion. In the H1 u-equations the
/// coupling closes with the term `f' f''` (its pairing against `u` cancels
/// the `u f''' + u' f''` transport terms exactly; a third derivative there
/// would leak energy at rate `-int (f'')^2` on constant `u`).
pub fn rhs_two_component(
    u: &Spectrum1D,
    f: &Spectrum1D,
    variant: PairVariant,
    a: f64,
) -> (Spectrum1D, Spectrum1D) {
    let up = u.deriv(1);
    let fp = f.deriv(1);
    match variant {
        PairVariant::L2 | PairVariant::L2Sigma | PairVariant::L2AlphaCentral => {
            // du = -3uu' - ff' (+ sigma terms or central term).
            let mut du = multiply(u, &up).scaled(-3.0);
            du.axpy(-1.0, &multiply(f, &fp));
            // df = -uf' - u'f.
            let mut df = multiply(u, &fp).scaled(-1.0);
            df.axpy(-1.0, &multiply(&up, f));
            match variant {
                PairVariant::L2Sigma => {
                    du.axpy(1.0, &multiply(u, &fp));
                    du.axpy(2.0, &multiply(&up, f));
                }
                PairVariant::L2AlphaCentral => {
                    du.axpy(a, &f.deriv(2));
                    df.axpy(-a, &u.deriv(2));
                }
                _ => {}
            }
            (du, df)
        }
        PairVariant::H1 | PairVariant::H1Sigma => {
            let upp = u.deriv(2);
            let fpp = f.deriv(2);
            // dm_u = -3uu' + 2u'u'' + uu''' - ff' + f'f''.
            let mut dmu = multiply(u, &up).scaled(-3.0);
            dmu.axpy(2.0, &multiply(&up, &upp));
            dmu.axpy(1.0, &multiply(u, &u.deriv(3)));
            dmu.axpy(-1.0, &multiply(f, &fp));
            dmu.axpy(1.0, &multiply(&fp, &fpp));
            if variant == PairVariant::H1Sigma {
                dmu.axpy(-2.0, &multiply(&up, f));
                dmu.axpy(-1.0, &multiply(u, &fp));
                dmu.axpy(2.0, &multiply(&up, &fpp));
                dmu.axpy(1.0, &multiply(u, &f.deriv(3)));
            }
            // dm_f = -uf' - u'f + uf''' + u'f''.
            let mut dmf = multiply(u, &fp).scaled(-1.0);
            dmf.axpy(-1.0, &multiply(&up, f));
            dmf.axpy(1.0, &multiply(u, &f.deriv(3)));
            dmf.axpy(1.0, &multiply(&up, &fpp));
            (
                inertia_invert(&dmu, Metric1D::H1),
                inertia_invert(&dmf, Metric1D::H1),
            )
        }
    }
}
