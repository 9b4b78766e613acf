//! The model catalog: every geodesic flow shipped by the crate, with a
//! uniform state representation, right-hand-side dispatch, CFL step
//! selection and named initial-condition presets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral1d::{self, PairVariant, Spectrum1D};
use crate::spectral2d::{self, stream_solve, Field2D, VecField2D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelId {
    Burgers,
    Kdv,
    CamassaHolm,
    HunterSaxton,
    Euler2d,
    QgBeta,
    Boussinesq,
    PassiveScalar,
    Mhd2d,
    ChargedFluid,
    TemplateMatching,
    Epdiff,
    LaeAlpha,
    PairL2,
    PairL2Sigma,
    PairH1,
    PairH1Sigma,
    PairL2AlphaCentral,
}

/// Stable catalog order (also the `list-models` order).
pub const CATALOG: [ModelId; 18] = [
    ModelId::Burgers,
    ModelId::Kdv,
    ModelId::CamassaHolm,
    ModelId::HunterSaxton,
    ModelId::Euler2d,
    ModelId::QgBeta,
    ModelId::Boussinesq,
    ModelId::PassiveScalar,
    ModelId::Mhd2d,
    ModelId::ChargedFluid,
    ModelId::TemplateMatching,
    ModelId::Epdiff,
    ModelId::LaeAlpha,
    ModelId::PairL2,
    ModelId::PairL2Sigma,
    ModelId::PairH1,
    ModelId::PairH1Sigma,
    ModelId::PairL2AlphaCentral,
];

impl ModelId {
    pub fn name(self) -> &'static str {
        match self {
            ModelId::Burgers => "burgers",
            ModelId::Kdv => "kdv",
            ModelId::CamassaHolm => "camassa-holm",
            ModelId::HunterSaxton => "hunter-saxton",
            ModelId::Euler2d => "euler-2d",
            ModelId::QgBeta => "qg-beta",
            ModelId::Boussinesq => "boussinesq",
            ModelId::PassiveScalar => "passive-scalar",
            ModelId::Mhd2d => "mhd-2d",
            ModelId::ChargedFluid => "charged-fluid",
            ModelId::TemplateMatching => "template-matching",
            ModelId::Epdiff => "epdiff",
            ModelId::LaeAlpha => "lae-alpha",
            ModelId::PairL2 => "pair-l2",
            ModelId::PairL2Sigma => "pair-l2-sigma",
            ModelId::PairH1 => "pair-h1",
            ModelId::PairH1Sigma => "pair-h1-sigma",
            ModelId::PairL2AlphaCentral => "pair-l2-alpha-central",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        CATALOG
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::UnknownModel(s.to_string()))
    }

    pub fn is_one_dimensional(self) -> bool {
        matches!(
            self,
            ModelId::Burgers
                | ModelId::Kdv
                | ModelId::CamassaHolm
                | ModelId::HunterSaxton
                | ModelId::PairL2
                | ModelId::PairL2Sigma
                | ModelId::PairH1
                | ModelId::PairH1Sigma
                | ModelId::PairL2AlphaCentral
        )
    }

    pub fn pair_variant(self) -> Option<PairVariant> {
        Some(match self {
            ModelId::PairL2 => PairVariant::L2,
            ModelId::PairL2Sigma => PairVariant::L2Sigma,
            ModelId::PairH1 => PairVariant::H1,
            ModelId::PairH1Sigma => PairVariant::H1Sigma,
            ModelId::PairL2AlphaCentral => PairVariant::L2AlphaCentral,
            _ => return None,
        })
    }

    /// Models whose state must stay divergence-free.
    pub fn incompressible(self) -> bool {
        matches!(self, ModelId::Mhd2d | ModelId::ChargedFluid | ModelId::LaeAlpha)
    }

    /// Models carrying the totally-geodesic subalgebra monitors (harmonic
    /// part and scalar integral stay exactly zero when started at zero).
    pub fn monitored(self) -> bool {
        matches!(
            self,
            ModelId::Euler2d | ModelId::QgBeta | ModelId::Boussinesq | ModelId::PassiveScalar
        )
    }

    /// One-line structural description shown by `list-models`.
    pub fn structure(self) -> &'static str {
        match self {
            ModelId::Burgers => "L2 metric on circle diffeomorphisms; du = -3uu'",
            ModelId::Kdv => "Virasoro central extension of the L2 circle metric; du = -3uu' - 2au'''",
            ModelId::CamassaHolm => "H1 metric on circle diffeomorphisms (central term for a != 0); d(u-u'') = -um' - 2u'm - 2au'''",
            ModelId::HunterSaxton => "homogeneous H1 metric on the rotation quotient; d(u'') = -2u'u'' - uu'''",
            ModelId::Euler2d => "L2 metric on volume-preserving torus diffeomorphisms; dw = -{w, psi}",
            ModelId::QgBeta => "central extension of the area-preserving group by the Coriolis cocycle; dw = -{w, psi} - beta psi_x",
            ModelId::Boussinesq => "semidirect extension by buoyancy with stratification charge; dw = -{w, psi} - xi_x, dxi = -{xi, psi} + N^2 psi_x",
            ModelId::PassiveScalar => "semidirect product with advected scalars; df = -{f, psi}",
            ModelId::Mhd2d => "semidirect product with the frozen-in magnetic field; du = P(-(u.grad)u + (B.grad)B), dB = [B, u]",
            ModelId::ChargedFluid => "Abelian extension by the magnetic potential 2-cocycle; du = P(-(u.grad)u - b rho u_perp), drho = -(u.grad)rho",
            ModelId::TemplateMatching => "L2 metric on all torus diffeomorphisms; du = -(u.grad)u - (div u)u - grad|u|^2/2",
            ModelId::Epdiff => "H1-alpha metric on all torus diffeomorphisms; dm = -(u.grad)m - (grad u)^T m - (div u)m",
            ModelId::LaeAlpha => "H1-alpha metric on volume-preserving diffeomorphisms; dm = P(-(u.grad)m - (grad u)^T m)",
            ModelId::PairL2 => "semidirect product of circle diffeomorphisms with scalar fields, L2 metric",
            ModelId::PairL2Sigma => "Abelian extension with the sigma 2-cocycle, L2 metric",
            ModelId::PairH1 => "semidirect product with scalar fields, H1 metric per component",
            ModelId::PairH1Sigma => "Abelian extension with the sigma 2-cocycle, H1 metric per component",
            ModelId::PairL2AlphaCentral => "central extension of the semidirect product by the alpha(X) = X'' 1-cocycle",
        }
    }

    /// Parameters consulted by this model.
    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            ModelId::Kdv | ModelId::CamassaHolm | ModelId::PairL2AlphaCentral => &["a"],
            ModelId::QgBeta => &["beta"],
            ModelId::Boussinesq => &["brunt"],
            ModelId::ChargedFluid => &["b"],
            ModelId::Mhd2d => &["b0x", "b0y"],
            ModelId::Epdiff | ModelId::LaeAlpha => &["alpha2"],
            _ => &[],
        }
    }

    pub fn state_shape(self) -> &'static str {
        match self {
            ModelId::Burgers | ModelId::Kdv | ModelId::CamassaHolm => "u: circle spectrum",
            ModelId::HunterSaxton => "v = u'': circle spectrum, zero mean",
            ModelId::Euler2d | ModelId::QgBeta => "omega: torus field + harmonic velocity",
            ModelId::Boussinesq => "omega, xi: torus fields + harmonic velocity",
            ModelId::PassiveScalar => "omega, f: torus fields + harmonic velocity",
            ModelId::Mhd2d => "u, B: solenoidal torus vector fields",
            ModelId::ChargedFluid => "u: solenoidal vector field, rho: torus field",
            ModelId::TemplateMatching | ModelId::Epdiff => "u: torus vector field",
            ModelId::LaeAlpha => "u: solenoidal torus vector field",
            _ => "u, f: circle spectra",
        }
    }
}

/// Numeric parameters; each model reads the entries it declares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Central charge (KdV, extended Camassa-Holm, alpha-central pair).
    pub a: f64,
    /// Coriolis-gradient parameter.
    pub beta: f64,
    /// Brunt-Vaisala frequency.
    pub brunt: f64,
    /// Filter scale of the H1-alpha metrics.
    pub alpha2: f64,
    /// Charge-form coefficient.
    pub b: f64,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            a: 1.0,
            beta: 1.0,
            brunt: 1.0,
            alpha2: 1.0,
            b: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub id: ModelId,
    pub params: Params,
}

impl ModelSpec {
    pub fn new(id: ModelId) -> Self {
        Self {
            id,
            params: Params::default(),
        }
    }

    pub fn with_params(id: ModelId, params: Params) -> Self {
        Self { id, params }
    }
}

/// Uniform state container across the catalog.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelState {
    Wave1 { u: Spectrum1D },
    Pair1 { u: Spectrum1D, f: Spectrum1D },
    Vort2 { omega: Field2D, mean_u: [f64; 2] },
    VortScalar2 { omega: Field2D, scalar: Field2D, mean_u: [f64; 2] },
    VecPair2 { u: VecField2D, b: VecField2D },
    VecScalar2 { u: VecField2D, rho: Field2D },
    Vec2 { u: VecField2D },
}

impl ModelState {
    pub fn scale_mut(&mut self, a: f64) {
        match self {
            ModelState::Wave1 { u } => u.scale_mut(a),
            ModelState::Pair1 { u, f } => {
                u.scale_mut(a);
                f.scale_mut(a);
            }
            ModelState::Vort2 { omega, mean_u } => {
                omega.scale_mut(a);
                mean_u[0] *= a;
                mean_u[1] *= a;
            }
            ModelState::VortScalar2 { omega, scalar, mean_u } => {
                omega.scale_mut(a);
                scalar.scale_mut(a);
                mean_u[0] *= a;
                mean_u[1] *= a;
            }
            ModelState::VecPair2 { u, b } => {
                u.scale_mut(a);
                b.scale_mut(a);
            }
            ModelState::VecScalar2 { u, rho } => {
                u.scale_mut(a);
                rho.scale_mut(a);
            }
            ModelState::Vec2 { u } => u.scale_mut(a),
        }
    }

    /// `self += a * other`; shapes must match.
    pub fn axpy(&mut self, a: f64, other: &Self) {
        match (self, other) {
            (ModelState::Wave1 { u }, ModelState::Wave1 { u: v }) => u.axpy(a, v),
            (ModelState::Pair1 { u, f }, ModelState::Pair1 { u: v, f: g }) => {
                u.axpy(a, v);
                f.axpy(a, g);
            }
            (
                ModelState::Vort2 { omega, mean_u },
                ModelState::Vort2 { omega: o, mean_u: m },
            ) => {
                omega.axpy(a, o);
                mean_u[0] += a * m[0];
                mean_u[1] += a * m[1];
            }
            (
                ModelState::VortScalar2 { omega, scalar, mean_u },
                ModelState::VortScalar2 { omega: o, scalar: s, mean_u: m },
            ) => {
                omega.axpy(a, o);
                scalar.axpy(a, s);
                mean_u[0] += a * m[0];
                mean_u[1] += a * m[1];
            }
            (ModelState::VecPair2 { u, b }, ModelState::VecPair2 { u: v, b: c }) => {
                u.axpy(a, v);
                b.axpy(a, c);
            }
            (ModelState::VecScalar2 { u, rho }, ModelState::VecScalar2 { u: v, rho: r }) => {
                u.axpy(a, v);
                rho.axpy(a, r);
            }
            (ModelState::Vec2 { u }, ModelState::Vec2 { u: v }) => u.axpy(a, v),
            _ => panic!("state shape mismatch"),
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            ModelState::Wave1 { u } => u.is_finite(),
            ModelState::Pair1 { u, f } => u.is_finite() && f.is_finite(),
            ModelState::Vort2 { omega, mean_u } => {
                omega.is_finite() && mean_u.iter().all(|v| v.is_finite())
            }
            ModelState::VortScalar2 { omega, scalar, mean_u } => {
                omega.is_finite() && scalar.is_finite() && mean_u.iter().all(|v| v.is_finite())
            }
            ModelState::VecPair2 { u, b } => u.is_finite() && b.is_finite(),
            ModelState::VecScalar2 { u, rho } => u.is_finite() && rho.is_finite(),
            ModelState::Vec2 { u } => u.is_finite(),
        }
    }

    /// Largest spectral upper-band energy fraction across 1D components;
    /// drives the shock detector. 2D states report 0.
    pub fn upper_band_fraction(&self) -> f64 {
        match self {
            ModelState::Wave1 { u } => u.upper_band_fraction(),
            ModelState::Pair1 { u, f } => u.upper_band_fraction().max(f.upper_band_fraction()),
            _ => 0.0,
        }
    }

    /// Restore structural invariants after a step: Hermitian symmetry,
    /// de-aliased band, zero-mean constraints, solenoidality.
    pub fn renormalize(&mut self, spec: &ModelSpec) {
        match self {
            ModelState::Wave1 { u } => {
                u.enforce_hermitian();
                if spec.id == ModelId::HunterSaxton {
                    u.set_mode(0, num_complex::Complex64::ZERO);
                }
            }
            ModelState::Pair1 { u, f } => {
                u.enforce_hermitian();
                f.enforce_hermitian();
            }
            ModelState::Vort2 { omega, .. } => omega.dealias(),
            ModelState::VortScalar2 { omega, scalar, .. } => {
                omega.dealias();
                scalar.dealias();
            }
            ModelState::VecPair2 { u, b } => {
                u.dealias();
                b.dealias();
                *u = spectral2d::leray_project(u);
                *b = spectral2d::leray_project(b);
            }
            ModelState::VecScalar2 { u, rho } => {
                u.dealias();
                rho.dealias();
                *u = spectral2d::leray_project(u);
            }
            ModelState::Vec2 { u } => {
                u.dealias();
                if spec.id == ModelId::LaeAlpha {
                    *u = spectral2d::leray_project(u);
                }
            }
        }
    }
}

/// Right-hand side of the geodesic equation for the given model.
pub fn rhs(spec: &ModelSpec, s: &ModelState) -> Result<ModelState> {
    let p = &spec.params;
    match (spec.id, s) {
        (ModelId::Burgers, ModelState::Wave1 { u }) => Ok(ModelState::Wave1 {
            u: spectral1d::rhs_burgers(u),
        }),
        (ModelId::Kdv, ModelState::Wave1 { u }) => Ok(ModelState::Wave1 {
            u: spectral1d::rhs_kdv(u, p.a),
        }),
        (ModelId::CamassaHolm, ModelState::Wave1 { u }) => Ok(ModelState::Wave1 {
            u: spectral1d::rhs_camassa_holm(u, p.a),
        }),
        (ModelId::HunterSaxton, ModelState::Wave1 { u }) => Ok(ModelState::Wave1 {
            u: spectral1d::rhs_hunter_saxton(u)?,
        }),
        (id, ModelState::Pair1 { u, f }) if id.pair_variant().is_some() => {
            let (du, df) = spectral1d::rhs_two_component(u, f, id.pair_variant().unwrap(), p.a);
            Ok(ModelState::Pair1 { u: du, f: df })
        }
        (ModelId::Euler2d, ModelState::Vort2 { omega, mean_u }) => Ok(ModelState::Vort2 {
            omega: spectral2d::rhs_euler_vorticity(omega, *mean_u)?,
            mean_u: [0.0; 2],
        }),
        (ModelId::QgBeta, ModelState::Vort2 { omega, mean_u }) => Ok(ModelState::Vort2 {
            omega: spectral2d::rhs_qg(omega, p.beta, *mean_u)?,
            mean_u: [0.0; 2],
        }),
        (ModelId::Boussinesq, ModelState::VortScalar2 { omega, scalar, mean_u }) => {
            let (dw, dxi) = spectral2d::rhs_boussinesq(omega, scalar, p.brunt, *mean_u)?;
            Ok(ModelState::VortScalar2 {
                omega: dw,
                scalar: dxi,
                mean_u: [0.0; 2],
            })
        }
        (ModelId::PassiveScalar, ModelState::VortScalar2 { omega, scalar, mean_u }) => {
            let (dw, df) = spectral2d::rhs_passive_scalar(omega, scalar, *mean_u)?;
            Ok(ModelState::VortScalar2 {
                omega: dw,
                scalar: df,
                mean_u: [0.0; 2],
            })
        }
        (ModelId::Mhd2d, ModelState::VecPair2 { u, b }) => {
            let (du, db) = spectral2d::rhs_mhd(u, b)?;
            Ok(ModelState::VecPair2 { u: du, b: db })
        }
        (ModelId::ChargedFluid, ModelState::VecScalar2 { u, rho }) => {
            let (du, drho) = spectral2d::rhs_charged_fluid(u, rho, p.b)?;
            Ok(ModelState::VecScalar2 { u: du, rho: drho })
        }
        (ModelId::TemplateMatching, ModelState::Vec2 { u }) => Ok(ModelState::Vec2 {
            u: spectral2d::rhs_template_matching(u),
        }),
        (ModelId::Epdiff, ModelState::Vec2 { u }) => Ok(ModelState::Vec2 {
            u: spectral2d::rhs_epdiff(u, p.alpha2)?,
        }),
        (ModelId::LaeAlpha, ModelState::Vec2 { u }) => Ok(ModelState::Vec2 {
            u: spectral2d::rhs_lae_alpha(u, p.alpha2)?,
        }),
        _ => Err(Error::InvalidInput(format!(
            "state shape does not match model `{}`",
            spec.id.name()
        ))),
    }
}

/// Largest acceptable step: `cfl * min(1/adv, 2.8/disp)` where `adv`
/// bounds the advective frequency `|u| k_max` (accuracy-limited, so no
/// stability factor) and `disp` bounds the fastest linear oscillation
/// (2.8 is the RK4 imaginary-axis stability limit; those modes carry
/// negligible energy on smooth data, so stability is the only concern).
/// Returns `cap` for quiescent states.
pub fn cfl_dt(spec: &ModelSpec, s: &ModelState, cfl: f64, cap: f64) -> f64 {
    let p = &spec.params;
    let (adv, disp) = match s {
        ModelState::Wave1 { u } => {
            let k = u.cutoff() as f64;
            let d = match spec.id {
                ModelId::Kdv => 2.0 * p.a.abs() * k * k * k,
                ModelId::CamassaHolm => 2.0 * p.a.abs() * k * k * k / (1.0 + k * k),
                _ => 0.0,
            };
            (u.linf() * k, d)
        }
        ModelState::Pair1 { u, f } => {
            let k = u.cutoff() as f64;
            let d = if spec.id == ModelId::PairL2AlphaCentral {
                p.a.abs() * k * k
            } else {
                0.0
            };
            ((u.linf() + f.linf()) * k, d)
        }
        ModelState::Vort2 { omega, mean_u } | ModelState::VortScalar2 { omega, mean_u, .. } => {
            let (kx, ky) = omega.band();
            let k = kx.max(ky) as f64;
            let u = stream_solve(omega).map(|(_, u)| u.linf()).unwrap_or(0.0);
            let mean = (mean_u[0] * mean_u[0] + mean_u[1] * mean_u[1]).sqrt();
            let d = match spec.id {
                ModelId::QgBeta => p.beta.abs(),
                ModelId::Boussinesq => p.brunt.abs() + k,
                _ => 0.0,
            };
            ((u + mean) * k, d)
        }
        ModelState::VecPair2 { u, b } => {
            let (kx, ky) = u.x.band();
            ((u.linf() + b.linf()) * kx.max(ky) as f64, 0.0)
        }
        ModelState::VecScalar2 { u, rho } => {
            let (kx, ky) = u.x.band();
            (u.linf() * kx.max(ky) as f64, p.b.abs() * rho.linf())
        }
        ModelState::Vec2 { u } => {
            let (kx, ky) = u.x.band();
            (2.0 * u.linf() * kx.max(ky) as f64, 0.0)
        }
    };
    let mut dt = cap;
    if adv > 1e-12 {
        dt = dt.min(cfl / adv);
    }
    if disp > 1e-12 {
        dt = dt.min(cfl * 2.8 / disp);
    }
    dt
}

/// Named initial-condition presets; `n`/`nx, ny` give the resolution.
pub fn preset(spec: &ModelSpec, name: &str, n1: usize, n2: usize, seed: u64) -> Result<ModelState> {
    let id = spec.id;
    if id.is_one_dimensional() {
        let mut u = Spectrum1D::zeros(n1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match name {
            "sine" => u.add_sin(1, 1.0),
            "two-mode" => {
                u.add_sin(1, 1.0);
                u.add_cos(2, 0.5);
            }
            "random-band" => u = Spectrum1D::random_band(n1, (n1 as i64 / 4).max(4), &mut rng),
            _ => {
                return Err(Error::InvalidInput(format!(
                    "preset `{name}` is not defined for 1D models"
                )))
            }
        }
        if id == ModelId::HunterSaxton {
            // Interpret the preset as u and store v = u''.
            u = u.deriv(2);
        }
        if id.pair_variant().is_some() {
            let mut f = Spectrum1D::zeros(n1);
            f.add_cos(1, 0.5);
            f.add_sin(2, 0.25);
            return Ok(ModelState::Pair1 { u, f });
        }
        return Ok(ModelState::Wave1 { u });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut omega = Field2D::zeros(n1, n2);
    match name {
        "sine" => {
            omega.add_sin(1, 0, 1.0);
            omega.add_cos(0, 2, 1.0);
        }
        "two-mode" => {
            omega.add_sin(1, 0, 1.0);
            omega.add_cos(2, 0, 0.5);
        }
        "taylor-green" => {
            omega.add_cos(1, 0, 1.0);
            omega.add_cos(0, 1, 1.0);
        }
        "shear" => omega.add_sin(0, 1, 1.0),
        "random-band" => omega = Field2D::random_band(n1, n2, 6, &mut rng),
        _ => return Err(Error::InvalidInput(format!("unknown preset `{name}`"))),
    }
    let scalar = {
        let mut s = Field2D::zeros(n1, n2);
        s.add_sin(1, 1, 0.5);
        s.add_cos(2, -1, 0.25);
        s
    };
    Ok(match id {
        ModelId::Euler2d | ModelId::QgBeta => ModelState::Vort2 {
            omega,
            mean_u: [0.0; 2],
        },
        ModelId::Boussinesq | ModelId::PassiveScalar => ModelState::VortScalar2 {
            omega,
            scalar,
            mean_u: [0.0; 2],
        },
        ModelId::Mhd2d => {
            let (_, u) = stream_solve(&omega)?;
            let mut wb = Field2D::zeros(n1, n2);
            wb.add_cos(1, 1, 0.5);
            wb.add_sin(0, 2, 0.5);
            let (_, b) = stream_solve(&wb)?;
            ModelState::VecPair2 { u, b }
        }
        ModelId::ChargedFluid => {
            let (_, u) = stream_solve(&omega)?;
            ModelState::VecScalar2 { u, rho: scalar }
        }
        ModelId::TemplateMatching | ModelId::Epdiff | ModelId::LaeAlpha => {
            let (_, u) = stream_solve(&omega)?;
            ModelState::Vec2 { u }
        }
        _ => unreachable!("1D ids handled above"),
    })
}

/// Wrap a 1D velocity profile in the model's state shape; companion
/// fields start at zero. Hunter-Saxton stores v = u''.
pub fn state_from_profile(spec: &ModelSpec, u: Spectrum1D) -> Result<ModelState> {
    let id = spec.id;
    if !id.is_one_dimensional() {
        return Err(Error::InvalidInput(format!(
            "model `{}` takes a 2D state",
            id.name()
        )));
    }
    let u = if id == ModelId::HunterSaxton { u.deriv(2) } else { u };
    if id.pair_variant().is_some() {
        let f = Spectrum1D::zeros(u.cutoff());
        return Ok(ModelState::Pair1 { u, f });
    }
    Ok(ModelState::Wave1 { u })
}

/// Build a 2D state from a scalar vorticity; vector-valued models receive
/// the induced divergence-free velocity, companion fields start at zero.
pub fn state_from_vorticity(spec: &ModelSpec, omega: Field2D) -> Result<ModelState> {
    let (nx, ny) = omega.shape();
    Ok(match spec.id {
        ModelId::Euler2d | ModelId::QgBeta => ModelState::Vort2 {
            omega,
            mean_u: [0.0; 2],
        },
        ModelId::Boussinesq | ModelId::PassiveScalar => ModelState::VortScalar2 {
            omega,
            scalar: Field2D::zeros(nx, ny),
            mean_u: [0.0; 2],
        },
        ModelId::Mhd2d => ModelState::VecPair2 {
            u: stream_solve(&omega)?.1,
            b: VecField2D::zeros(nx, ny),
        },
        ModelId::ChargedFluid => ModelState::VecScalar2 {
            u: stream_solve(&omega)?.1,
            rho: Field2D::zeros(nx, ny),
        },
        ModelId::TemplateMatching | ModelId::Epdiff | ModelId::LaeAlpha => ModelState::Vec2 {
            u: stream_solve(&omega)?.1,
        },
        _ => {
            return Err(Error::InvalidInput(format!(
                "model `{}` takes a 1D state",
                spec.id.name()
            )))
        }
    })
}
