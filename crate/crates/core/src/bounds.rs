//! Closed-form distortion bounds, radii of starlikeness/convexity/bounded
//! turning, and distortion of the fractional operators, each with a
//! sampling oracle that reports how far a concrete series sits from it.
//!
//! The distortion bounds use `Σ aₙ ≤ (A−B)(1−γ)/Ξ(2)`, which needs Ξ(n)
//! nondecreasing; the derivative and `D^δ` bounds also need Ξ(n)/(μn)
//! nondecreasing. [`weights_monotone`] checks both.

use serde::{Deserialize, Serialize};

use crate::classes::ClassParams;
use crate::fps::{DiskPoint, FractionalSeries, GeneralSeries};
use crate::geometry::{brute_force_radius, FunctionalKind, VerificationGrid};
use crate::operators::{derivative_ratio, frac_derivative, frac_integral, gamma, integral_ratio};
use crate::par::{self, Execution};
use crate::{Error, Result};

/// Closed form next to a sampled value. `margin` is positive when the
/// sample respects the bound, whichever direction the bound points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: String,
    pub closed_form: f64,
    pub oracle: f64,
    pub margin: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<DiskPoint>,
}

impl BoundReport {
    /// `margin ≥ −tol`.
    pub fn holds(&self, tol: f64) -> bool {
        self.margin >= -tol
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub lower: f64,
    pub upper: f64,
}

impl Envelope {
    fn around(center: f64, spread: f64, scale: f64) -> Self {
        Envelope { lower: scale * (center - spread), upper: scale * (center + spread) }
    }
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::OutsideDisk { r })
    }
}

/// C = (A−B)(1−γ)/Ξ(2).
pub fn sum_bound(p: &ClassParams) -> Result<f64> {
    let xi = p.xi_weight(2);
    if xi > 0.0 {
        Ok(p.rhs() / xi)
    } else {
        Err(Error::InvalidParams("Xi(2) must be positive for distortion bounds".into()))
    }
}

/// Whether Ξ(n) and Ξ(n)/(μn) are nondecreasing on `2..=n_max`.
pub fn weights_monotone(p: &ClassParams, n_max: u32) -> bool {
    let mu = p.mu();
    (2..n_max).all(|n| {
        let (a, b) = (p.xi_weight(n), p.xi_weight(n + 1));
        b >= a * (1.0 - 1e-12) && b / mu.times(n + 1) >= a / mu.times(n) * (1.0 - 1e-12)
    })
}

/// r ∓ C r^{2μ}.
pub fn distortion_bounds(p: &ClassParams, r: f64) -> Result<Envelope> {
    check_r(r)?;
    let c = sum_bound(p)?;
    Ok(Envelope::around(r, c * r.powf(2.0 * p.mu().value()), 1.0))
}

/// 1 ∓ 2μC r^{2μ−1}.
pub fn derivative_distortion_bounds(p: &ClassParams, r: f64) -> Result<Envelope> {
    check_r(r)?;
    let c = sum_bound(p)?;
    let two_mu = 2.0 * p.mu().value();
    Ok(Envelope::around(1.0, two_mu * c * r.powf(two_mu - 1.0), 1.0))
}

pub const DEFAULT_N_MAX: u32 = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusResult {
    pub radius: f64,
    pub minimizer_n: u32,
    /// Candidates, clamped to 1, never decrease past the minimizer, so
    /// truncating at `n_max` did not hide a smaller one.
    pub tail_monotone: bool,
}

/// `{Ξ(n)/((A−B)(1−γ)) · ρ(n)}^{1/(μn−1)}` for the given kind.
pub fn radius_candidate(kind: FunctionalKind, p: &ClassParams, psi: f64, n: u32) -> f64 {
    let x = p.mu().times(n);
    let rho = match kind {
        FunctionalKind::Starlike => (1.0 - psi) / (x - psi),
        FunctionalKind::Convex => (1.0 - psi) / (x * (x - psi)),
        FunctionalKind::BoundedTurning => (1.0 - psi) / x,
    };
    (p.xi_weight(n) / p.rhs() * rho).powf(1.0 / (x - 1.0))
}

pub fn radius(kind: FunctionalKind, p: &ClassParams, psi: f64, n_max: u32) -> Result<RadiusResult> {
    if !(0.0..1.0).contains(&psi) {
        return Err(Error::InvalidArgument(format!("psi = {psi} must lie in [0, 1)")));
    }
    if n_max < 16 {
        return Err(Error::InvalidArgument(format!("n_max = {n_max} must be >= 16")));
    }
    let candidates: Vec<f64> = (2..=n_max).map(|n| radius_candidate(kind, p, psi, n)).collect();
    let (i, best) = par::tree_argmin(&candidates).expect("at least 15 candidates");
    // candidates above 1 are clamped anyway, so only the clamped tail must rise
    let tail_monotone = candidates[i..]
        .windows(2)
        .all(|w| w[1].min(1.0) >= w[0].min(1.0) * (1.0 - 1e-12));
    Ok(RadiusResult { radius: best.min(1.0), minimizer_n: i as u32 + 2, tail_monotone })
}

/// Closed-form radius against the brute-force radius of the extremal
/// function at the minimizing index.
pub fn radius_report(kind: FunctionalKind, p: &ClassParams, psi: f64, tol: f64) -> Result<(RadiusResult, BoundReport)> {
    let res = radius(kind, p, psi, DEFAULT_N_MAX)?;
    let extremal = p.extremal_function(res.minimizer_n)?;
    let oracle = brute_force_radius(&extremal, kind, psi, tol)?;
    let closed_form = res.radius.min(1.0 - tol);
    let report = BoundReport {
        kind: format!("radius_{}", kind_name(kind)),
        closed_form,
        oracle,
        margin: oracle - closed_form,
        witness: Some(DiskPoint::real(oracle)?),
    };
    Ok((res, report))
}

fn kind_name(kind: FunctionalKind) -> &'static str {
    match kind {
        FunctionalKind::BoundedTurning => "bounded_turning",
        FunctionalKind::Starlike => "starlike",
        FunctionalKind::Convex => "convex",
    }
}

/// Bounds on |I^δ F| at |z| = r.
///
/// `G = Γ(2+δ) z^{−δ} I^δ F = z − Σ Υ(n) aₙ z^{μn}` with Υ decreasing, so
/// `|G| = r ∓ Υ(2)·C·r^{2μ}`, rescaled by `r^δ/Γ(2+δ)`.
pub fn frac_integral_distortion(p: &ClassParams, delta: f64, r: f64) -> Result<Envelope> {
    check_r(r)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("fractional integral order {delta} must be positive")));
    }
    let spread = integral_ratio(p.mu(), 2, delta) * sum_bound(p)?;
    Ok(Envelope::around(
        r,
        spread * r.powf(2.0 * p.mu().value()),
        r.powf(delta) / gamma(2.0 + delta),
    ))
}

/// Bounds on |D^δ F| at |z| = r.
///
/// `G = Γ(2−δ) z^δ D^δ F = z − Σ Ω(n)(μn) aₙ z^{μn}` and
/// `Σ μn aₙ ≤ 2μC`, so `|G| = r ∓ Ω(2)·2μC·r^{2μ}`, rescaled by `r^{−δ}/Γ(2−δ)`.
pub fn frac_derivative_distortion(p: &ClassParams, delta: f64, r: f64) -> Result<Envelope> {
    check_r(r)?;
    check_derivative_order(delta)?;
    let two_mu = 2.0 * p.mu().value();
    let spread = derivative_ratio(p.mu(), 2, delta) * two_mu * sum_bound(p)?;
    Ok(Envelope::around(r, spread * r.powf(two_mu), r.powf(-delta) / gamma(2.0 - delta)))
}

fn check_derivative_order(delta: f64) -> Result<()> {
    if (0.0..1.0).contains(&delta) {
        Ok(())
    } else {
        Err(Error::Domain(format!("fractional derivative order {delta} must lie in [0, 1)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiskKind {
    FracIntegral,
    FracDerivative,
}

/// Radius of the origin-centred disk containing the operator image: the
/// upper bound at r = 1. The same expression with the lower sign is kept
/// alongside for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiskRadius {
    pub upper: f64,
    pub lower_sign: f64,
}

pub fn disk_radius(kind: DiskKind, p: &ClassParams, delta: f64) -> Result<DiskRadius> {
    let (spread, scale) = match kind {
        DiskKind::FracIntegral => {
            if !(delta > 0.0 && delta.is_finite()) {
                return Err(Error::Domain(format!("fractional integral order {delta} must be positive")));
            }
            (integral_ratio(p.mu(), 2, delta) * sum_bound(p)?, 1.0 / gamma(2.0 + delta))
        }
        DiskKind::FracDerivative => {
            check_derivative_order(delta)?;
            let two_mu = 2.0 * p.mu().value();
            (derivative_ratio(p.mu(), 2, delta) * two_mu * sum_bound(p)?, 1.0 / gamma(2.0 - delta))
        }
    };
    Ok(DiskRadius { upper: scale * (1.0 + spread), lower_sign: scale * (1.0 - spread) })
}

/// Coefficient `(1)_{2μ−1}/(2−δ)_{2μ−1} · (A−B)(1−γ)/{…}` as printed in the
/// fractional distortion statements; `last` is the power on 2μ in the
/// final term of the denominator.
fn printed_factor(p: &ClassParams, delta: f64, last: i32) -> f64 {
    let mu = p.mu();
    let x = mu.times(2);
    let theta2 = p.phi().value(mu, 2);
    let lambda2 = p.psi().value(mu, 2);
    let k = p.k() as i32 - 1;
    let m = p.m() as i32 - 1;
    let den = (1.0 - p.b()) * (x.powi(k) * theta2 - x.powi(m) * lambda2) + p.rhs() * x.powi(last) * theta2;
    derivative_ratio(mu, 2, delta) * p.rhs() / den
}

/// The I^δ envelope in its printed form, `r^{μ+δ}/Γ(2+δ)·(1 ∓ P r^μ)`.
pub fn frac_integral_distortion_printed(p: &ClassParams, delta: f64, r: f64) -> Result<Envelope> {
    check_r(r)?;
    let mu = p.mu().value();
    let factor = printed_factor(p, delta, p.k() as i32 - 1);
    Ok(Envelope::around(1.0, factor * r.powf(mu), r.powf(mu + delta) / gamma(2.0 + delta)))
}

/// The D^δ envelope in its printed form, `r^{μ−δ}/Γ(2−δ)·(1 ∓ P r^{2μ})`.
pub fn frac_derivative_distortion_printed(p: &ClassParams, delta: f64, r: f64) -> Result<Envelope> {
    check_r(r)?;
    check_derivative_order(delta)?;
    let mu = p.mu().value();
    let factor = printed_factor(p, delta, p.m() as i32 - 1);
    Ok(Envelope::around(1.0, factor * r.powf(2.0 * mu), r.powf(mu - delta) / gamma(2.0 - delta)))
}

/// Angular resolution for the modulus oracles.
pub const ORACLE_SAMPLES: u32 = 1024;

/// Sampled min and max of |s| on `|z| = r`, with their locations.
pub fn modulus_extrema(
    s: &GeneralSeries,
    r: f64,
    grid: &VerificationGrid,
    exec: Execution,
) -> Result<((DiskPoint, f64), (DiskPoint, f64))> {
    check_r(r)?;
    let angles = grid.angles();
    let values = par::map(exec, &angles, |&t| s.eval_nonzero(r, t).norm());
    let (imin, vmin) = par::tree_argmin(&values).ok_or_else(|| Error::InvalidGrid("no angles".into()))?;
    let (imax, vmax) = par::tree_argmax(&values).expect("nonempty");
    Ok(((DiskPoint::new(r, angles[imin])?, vmin), (DiskPoint::new(r, angles[imax])?, vmax)))
}

fn envelope_reports(
    name: &str,
    env: Envelope,
    s: &GeneralSeries,
    r: f64,
) -> Result<[BoundReport; 2]> {
    let grid = VerificationGrid::new(vec![r], ORACLE_SAMPLES, 1e-3)?;
    let ((pmin, vmin), (pmax, vmax)) = modulus_extrema(s, r, &grid, Execution::default())?;
    Ok([
        BoundReport {
            kind: format!("{name}_lower"),
            closed_form: env.lower,
            oracle: vmin,
            margin: vmin - env.lower,
            witness: Some(pmin),
        },
        BoundReport {
            kind: format!("{name}_upper"),
            closed_form: env.upper,
            oracle: vmax,
            margin: env.upper - vmax,
            witness: Some(pmax),
        },
    ])
}

/// |F| on the circle against [`distortion_bounds`].
pub fn distortion_report(p: &ClassParams, f: &FractionalSeries, r: f64) -> Result<[BoundReport; 2]> {
    envelope_reports("distortion", distortion_bounds(p, r)?, &f.to_general(), r)
}

/// |F′| on the circle against [`derivative_distortion_bounds`].
pub fn derivative_distortion_report(p: &ClassParams, f: &FractionalSeries, r: f64) -> Result<[BoundReport; 2]> {
    envelope_reports(
        "derivative_distortion",
        derivative_distortion_bounds(p, r)?,
        &f.to_general().differentiate(),
        r,
    )
}

/// |I^δ F| on the circle against [`frac_integral_distortion`].
pub fn frac_integral_report(p: &ClassParams, f: &FractionalSeries, delta: f64, r: f64) -> Result<[BoundReport; 2]> {
    let image = frac_integral(&f.to_general(), delta)?;
    envelope_reports("frac_integral", frac_integral_distortion(p, delta, r)?, &image, r)
}

/// |D^δ F| on the circle against [`frac_derivative_distortion`].
pub fn frac_derivative_report(p: &ClassParams, f: &FractionalSeries, delta: f64, r: f64) -> Result<[BoundReport; 2]> {
    let image = frac_derivative(&f.to_general(), delta)?;
    envelope_reports("frac_derivative", frac_derivative_distortion(p, delta, r)?, &image, r)
}
