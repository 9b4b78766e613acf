//! Conserved quantities and monitor signals per model, plus drift reports
//! over recorded trajectories.
//!
//! Quadratic quantities are computed spectrally (Parseval) and judged
//! relative to their initial value; linear quantities (means, integrals)
//! are conserved to roundoff and judged absolutely; cubic and quartic
//! moments go through the de-aliased grid and carry a documented
//! truncation bias, so their tolerances are looser.

use crate::models::{ModelId, ModelSpec, ModelState};
use crate::spectral1d::{self, Metric1D, Spectrum1D};
use crate::spectral2d::{grid_moment, inner2, inner_vec, Field2D};
use crate::{Error, Result, TWO_PI};

/// Kinetic energy of the flow induced by a zero-mean vorticity field:
/// `1/2 sum |w_k|^2 / |k|^2` by Parseval, plus the harmonic part.
fn vorticity_kinetic(omega: &Field2D, mean_u: [f64; 2]) -> f64 {
    let psi_weighted = omega.multiplier(|kx, ky| {
        let k2 = (kx * kx + ky * ky) as f64;
        if k2 == 0.0 {
            0.0
        } else {
            1.0 / k2
        }
    });
    0.5 * inner2(omega, &psi_weighted)
        + 0.5 * TWO_PI * TWO_PI * (mean_u[0] * mean_u[0] + mean_u[1] * mean_u[1])
}

fn half_h1_alpha(u: &crate::spectral2d::VecField2D, alpha2: f64) -> f64 {
    let g = |kx: i64, ky: i64| 1.0 + alpha2 * (kx * kx + ky * ky) as f64;
    let m = crate::spectral2d::VecField2D {
        x: u.x.multiplier(g),
        y: u.y.multiplier(g),
        mean: u.mean,
    };
    0.5 * inner_vec(&m, u)
}

fn hs_energy(v: &Spectrum1D) -> f64 {
    // Homogeneous H1 energy 1/2 int u'^2 with v = u''.
    let mut acc = 0.0;
    for k in 1..=(v.cutoff() as i64) {
        acc += 2.0 * v.coeff(k).norm_sqr() / (k * k) as f64;
    }
    0.5 * TWO_PI * acc
}

/// Squared geodesic speed over two: the quantity every model conserves.
pub fn energy(spec: &ModelSpec, s: &ModelState) -> f64 {
    let p = &spec.params;
    match (spec.id, s) {
        (ModelId::Burgers, ModelState::Wave1 { u }) => {
            0.5 * spectral1d::inner(u, u, Metric1D::L2)
        }
        (ModelId::Kdv, ModelState::Wave1 { u }) => {
            0.5 * spectral1d::inner(u, u, Metric1D::L2) + 0.5 * p.a * p.a
        }
        (ModelId::CamassaHolm, ModelState::Wave1 { u }) => {
            0.5 * spectral1d::inner(u, u, Metric1D::H1) + 0.5 * p.a * p.a
        }
        (ModelId::HunterSaxton, ModelState::Wave1 { u }) => hs_energy(u),
        (id, ModelState::Pair1 { u, f }) => {
            let m = id.pair_variant().expect("pair state implies pair model").metric();
            let mut e = 0.5 * (spectral1d::inner(u, u, m) + spectral1d::inner(f, f, m));
            if id == ModelId::PairL2AlphaCentral {
                e += 0.5 * p.a * p.a;
            }
            e
        }
        (ModelId::Euler2d | ModelId::QgBeta, ModelState::Vort2 { omega, mean_u }) => {
            vorticity_kinetic(omega, *mean_u)
        }
        (ModelId::Boussinesq, ModelState::VortScalar2 { omega, scalar, mean_u }) => {
            // Stratification charge: the buoyancy variable enters the
            // extension metric as xi/N.
            vorticity_kinetic(omega, *mean_u) + 0.5 * inner2(scalar, scalar) / (p.brunt * p.brunt)
        }
        (ModelId::PassiveScalar, ModelState::VortScalar2 { omega, scalar, mean_u }) => {
            vorticity_kinetic(omega, *mean_u) + 0.5 * inner2(scalar, scalar)
        }
        (ModelId::Mhd2d, ModelState::VecPair2 { u, b }) => {
            0.5 * (inner_vec(u, u) + inner_vec(b, b))
        }
        (ModelId::ChargedFluid, ModelState::VecScalar2 { u, rho }) => {
            0.5 * (inner_vec(u, u) + inner2(rho, rho))
        }
        (ModelId::TemplateMatching, ModelState::Vec2 { u }) => 0.5 * inner_vec(u, u),
        (ModelId::Epdiff | ModelId::LaeAlpha, ModelState::Vec2 { u }) => {
            half_h1_alpha(u, p.alpha2)
        }
        _ => f64::NAN,
    }
}

/// How a drift is judged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    /// `|v - v0| / max(|v0|, 1e-14) <= bound`.
    Relative(f64),
    /// `|v - v0| <= bound`; used for linear quantities whose exact value
    /// is zero, where a relative test against epsilon is meaningless.
    Absolute(f64),
}

/// Declared tolerance per invariant name.
pub fn tolerance(name: &str) -> Tolerance {
    match name {
        // Quadratic, spectrally exact under de-aliasing.
        "enstrophy" | "scalar2" | "rho2" | "cross_helicity" => Tolerance::Relative(1e-8),
        // Cubic and quartic grid moments carry truncation bias.
        "omega3" | "omega4" => Tolerance::Relative(1e-4),
        "scalar3" | "rho3" => Tolerance::Relative(1e-6),
        // Linear integrals and harmonic components: conserved to roundoff.
        _ => Tolerance::Absolute(1e-11),
    }
}

/// Model-keyed conserved quantities, in stable order.
pub fn invariants(spec: &ModelSpec, s: &ModelState) -> Vec<(String, f64)> {
    let mut out: Vec<(String, f64)> = Vec::new();
    let mut push = |name: &str, v: f64| out.push((name.to_string(), v));
    match (spec.id, s) {
        (ModelId::Burgers | ModelId::Kdv, ModelState::Wave1 { u }) => {
            push("integral_u", TWO_PI * u.mean());
        }
        (ModelId::CamassaHolm, ModelState::Wave1 { u }) => {
            // int m = int u since int u'' = 0.
            push("integral_m", TWO_PI * u.mean());
        }
        (ModelId::HunterSaxton, ModelState::Wave1 { u }) => {
            push("integral_v", TWO_PI * u.mean());
        }
        (id, ModelState::Pair1 { u, f }) => {
            // int f (equivalently int(f - f'') for the H1 pairs) is an
            // exact-derivative rate in every variant; int u additionally
            // so except under the sigma cocycle.
            push("integral_f", TWO_PI * f.mean());
            if !matches!(id, ModelId::PairL2Sigma | ModelId::PairH1Sigma) {
                push("integral_u", TWO_PI * u.mean());
            }
        }
        (id @ (ModelId::Euler2d | ModelId::QgBeta), ModelState::Vort2 { omega, mean_u }) => {
            push("enstrophy", 0.5 * inner2(omega, omega));
            if id == ModelId::Euler2d {
                // With beta on, d/dt int w^p = -p beta int w^(p-1) psi_x,
                // which is an exact derivative only for p = 2; the higher
                // moments belong to the periodic problem at beta = 0.
                push("omega3", grid_moment(omega, 3));
                push("omega4", grid_moment(omega, 4));
            }
            push("mean_ux", mean_u[0]);
            push("mean_uy", mean_u[1]);
        }
        (ModelId::Boussinesq, ModelState::VortScalar2 { scalar, mean_u, .. }) => {
            // No standalone quadratic here: the buoyancy source exchanges
            // int xi^2 with the kinetic part, and only their weighted sum
            // (the energy) is conserved.
            push("integral_xi", scalar.integral());
            push("mean_ux", mean_u[0]);
            push("mean_uy", mean_u[1]);
        }
        (ModelId::PassiveScalar, ModelState::VortScalar2 { omega, scalar, mean_u }) => {
            push("enstrophy", 0.5 * inner2(omega, omega));
            push("omega3", grid_moment(omega, 3));
            push("integral_f", scalar.integral());
            push("scalar2", 0.5 * inner2(scalar, scalar));
            push("scalar3", grid_moment(scalar, 3));
            push("mean_ux", mean_u[0]);
            push("mean_uy", mean_u[1]);
        }
        (ModelId::Mhd2d, ModelState::VecPair2 { u, b }) => {
            push("cross_helicity", inner_vec(u, b));
        }
        (ModelId::ChargedFluid, ModelState::VecScalar2 { rho, .. }) => {
            push("integral_rho", rho.integral());
            push("rho2", 0.5 * inner2(rho, rho));
            push("rho3", grid_moment(rho, 3));
        }
        (ModelId::LaeAlpha, ModelState::Vec2 { u }) => {
            push("mean_ux", u.mean[0]);
            push("mean_uy", u.mean[1]);
        }
        _ => {}
    }
    out
}

/// One row of a drift report.
#[derive(Debug, Clone)]
pub struct DriftRow {
    pub name: String,
    pub initial: f64,
    pub fin: f64,
    pub drift: f64,
    pub tolerance: Tolerance,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct InvariantReport {
    pub rows: Vec<DriftRow>,
    pub pass: bool,
}

fn drift_row(name: &str, v0: f64, v1: f64) -> DriftRow {
    let tol = tolerance(name);
    let (drift, pass) = match tol {
        Tolerance::Relative(b) => {
            // The floor keeps quantities that start at exactly zero (odd
            // moments of symmetric data) from dividing roundoff by itself.
            let d = (v1 - v0).abs() / v0.abs().max(1.0);
            (d, d <= b)
        }
        Tolerance::Absolute(b) => {
            let d = (v1 - v0).abs();
            (d, d <= b)
        }
    };
    DriftRow {
        name: name.to_string(),
        initial: v0,
        fin: v1,
        drift,
        tolerance: tol,
        pass,
    }
}

/// Compare every recorded invariant (and the energy) against its initial
/// value, taking the worst drift over the whole trajectory.
pub fn invariant_report(traj: &crate::integrate::Trajectory) -> InvariantReport {
    let mut rows: Vec<DriftRow> = Vec::new();
    let e0 = traj.energies[0];
    let mut worst_e = e0;
    for &e in &traj.energies {
        if (e - e0).abs() > (worst_e - e0).abs() {
            worst_e = e;
        }
    }
    let mut row = drift_row("energy", e0, worst_e);
    row.tolerance = Tolerance::Relative(1e-8);
    row.pass = row.drift <= 1e-8;
    rows.push(row);
    if let Some(first) = traj.invariants.first() {
        for (idx, (name, v0)) in first.iter().enumerate() {
            let mut worst = *v0;
            for snap in &traj.invariants {
                let v = snap[idx].1;
                if (v - v0).abs() > (worst - v0).abs() {
                    worst = v;
                }
            }
            rows.push(drift_row(name, *v0, worst));
        }
    }
    let pass = rows.iter().all(|r| r.pass);
    InvariantReport { rows, pass }
}

/// Relative energy drift over a trajectory (worst recorded snapshot).
pub fn energy_drift(traj: &crate::integrate::Trajectory) -> f64 {
    let e0 = traj.energies[0];
    traj.energies
        .iter()
        .map(|e| (e - e0).abs())
        .fold(0.0f64, f64::max)
        / e0.abs().max(1e-14)
}

#[derive(Debug, Clone)]
pub struct MonitorReport {
    /// Max |harmonic velocity component| over the trajectory.
    pub max_mean: f64,
    /// Max |int f| of the carried scalar, when there is one.
    pub max_integral: f64,
    pub pass: bool,
}

/// Totally-geodesic subalgebra monitor: runs started with zero harmonic
/// part (and zero-integral scalar) must keep both at zero.
pub fn monitor_totally_geodesic(
    spec: &ModelSpec,
    traj: &crate::integrate::Trajectory,
) -> Result<MonitorReport> {
    if !spec.id.monitored() {
        return Err(Error::InvalidInput(format!(
            "model `{}` carries no totally-geodesic monitor",
            spec.id.name()
        )));
    }
    let mut max_mean = 0.0f64;
    let mut max_integral = 0.0f64;
    for s in &traj.states {
        match s {
            ModelState::Vort2 { mean_u, .. } => {
                max_mean = max_mean.max(mean_u[0].abs()).max(mean_u[1].abs());
            }
            ModelState::VortScalar2 { scalar, mean_u, .. } => {
                max_mean = max_mean.max(mean_u[0].abs()).max(mean_u[1].abs());
                max_integral = max_integral.max(scalar.integral().abs());
            }
            _ => {
                return Err(Error::InvalidInput(
                    "monitored models carry vorticity states".into(),
                ))
            }
        }
    }
    let pass = max_mean <= 1e-11 && max_integral <= 1e-11;
    Ok(MonitorReport {
        max_mean,
        max_integral,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{integrate, StepRule, StepperConfig};
    use crate::models::{preset, ModelSpec};

    #[test]
    fn energy_closed_forms() {
        // Burgers u = sin x: E = pi/2.
        let spec = ModelSpec::new(ModelId::Burgers);
        let s = preset(&spec, "sine", 85, 85, 0).unwrap();
        assert!((energy(&spec, &s) - std::f64::consts::PI / 2.0).abs() < 1e-12);
        // Camassa-Holm u = sin x (a = 0): E = pi.
        let mut p = crate::models::Params::default();
        p.a = 0.0;
        let spec = ModelSpec::with_params(ModelId::CamassaHolm, p);
        let s = preset(&spec, "sine", 85, 85, 0).unwrap();
        assert!((energy(&spec, &s) - std::f64::consts::PI).abs() < 1e-12);
        // Zero state.
        let z = ModelState::Wave1 {
            u: Spectrum1D::zeros(85),
        };
        let spec = ModelSpec::new(ModelId::Burgers);
        assert_eq!(energy(&spec, &z), 0.0);
    }

    #[test]
    fn burgers_invariants_stay_zero() {
        let spec = ModelSpec::new(ModelId::Burgers);
        let s = preset(&spec, "sine", 85, 85, 0).unwrap();
        let cfg = StepperConfig {
            rule: StepRule::Cfl(0.5),
            t_final: 0.2,
            record_stride: 50,
        };
        let out = integrate(&spec, &s, &cfg).unwrap();
        let rep = invariant_report(&out.trajectory);
        assert!(rep.pass, "{:?}", rep.rows);
    }

    #[test]
    fn monitor_rejects_unflagged_model() {
        let spec = ModelSpec::new(ModelId::Burgers);
        let s = preset(&spec, "sine", 85, 85, 0).unwrap();
        let cfg = StepperConfig {
            rule: StepRule::Cfl(0.5),
            t_final: 0.0,
            record_stride: 1,
        };
        let out = integrate(&spec, &s, &cfg).unwrap();
        assert!(monitor_totally_geodesic(&spec, &out.trajectory).is_err());
    }

    #[test]
    fn euler_monitor_passes() {
        let spec = ModelSpec::new(ModelId::Euler2d);
        let s = preset(&spec, "sine", 64, 64, 0).unwrap();
        let cfg = StepperConfig {
            rule: StepRule::Cfl(0.5),
            t_final: 0.25,
            record_stride: 5,
        };
        let out = integrate(&spec, &s, &cfg).unwrap();
        let rep = monitor_totally_geodesic(&spec, &out.trajectory).unwrap();
        assert!(rep.pass, "max mean {:.3e}", rep.max_mean);
    }
}
