//! Grid-based numerical oracles.
//!
//! Everything here samples the slit disk directly and never consults the
//! closed-form bounds, so it can be used to check them.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundReport;
use crate::classes::{ClassParams, Verdict};
use crate::fps::{DiskPoint, FractionalSeries, GeneralSeries};
use crate::operators::apply_d;
use crate::par::{self, Execution};
use crate::{Error, Result};

/// Denominators below this are treated as poles.
pub const POLE_EPS: f64 = 1e-14;

/// Radial/angular sampling plan on the slit disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridJson", into = "GridJson")]
pub struct VerificationGrid {
    radii: Vec<f64>,
    angular_samples: u32,
    slit_margin: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GridJson {
    #[serde(default = "default_radii")]
    radii: Vec<f64>,
    #[serde(default = "default_angular")]
    angular_samples: u32,
    #[serde(default = "default_margin")]
    slit_margin: f64,
}

fn default_radii() -> Vec<f64> {
    vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99]
}

fn default_angular() -> u32 {
    1024
}

fn default_margin() -> f64 {
    1e-3
}

impl TryFrom<GridJson> for VerificationGrid {
    type Error = Error;

    fn try_from(j: GridJson) -> Result<Self> {
        VerificationGrid::new(j.radii, j.angular_samples, j.slit_margin)
    }
}

impl From<VerificationGrid> for GridJson {
    fn from(g: VerificationGrid) -> Self {
        GridJson { radii: g.radii, angular_samples: g.angular_samples, slit_margin: g.slit_margin }
    }
}

impl Default for VerificationGrid {
    fn default() -> Self {
        VerificationGrid {
            radii: default_radii(),
            angular_samples: default_angular(),
            slit_margin: default_margin(),
        }
    }
}

impl VerificationGrid {
    pub fn new(radii: Vec<f64>, angular_samples: u32, slit_margin: f64) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidGrid("no radii".into()));
        }
        if radii.iter().any(|r| !(*r > 0.0 && *r < 1.0)) {
            return Err(Error::InvalidGrid("radii must lie in (0, 1)".into()));
        }
        if radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid("radii must be strictly increasing".into()));
        }
        if angular_samples < 64 || !angular_samples.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "angular_samples = {angular_samples} must be a power of two >= 64"
            )));
        }
        if !(slit_margin > 0.0 && slit_margin < PI) {
            return Err(Error::InvalidGrid(format!("slit_margin = {slit_margin} out of range")));
        }
        Ok(VerificationGrid { radii, angular_samples, slit_margin })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn angular_samples(&self) -> u32 {
        self.angular_samples
    }

    pub fn slit_margin(&self) -> f64 {
        self.slit_margin
    }

    /// Angles `−π + 2πj/M` that stay `slit_margin` away from ±π; θ = 0 is
    /// always included.
    pub fn angles(&self) -> Vec<f64> {
        angles(self.angular_samples, self.slit_margin)
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        let angles = self.angles();
        self.radii
            .iter()
            .flat_map(|&r| angles.iter().map(move |&t| (r, t)))
            .collect()
    }
}

fn angles(samples: u32, slit_margin: f64) -> Vec<f64> {
    let step = 2.0 * PI / f64::from(samples);
    let half = samples / 2;
    (1..samples)
        .map(|j| (f64::from(j) - f64::from(half)) * step)
        .filter(|t| t.abs() <= PI - slit_margin)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKind {
    /// Re F′
    BoundedTurning,
    /// Re zF′/F
    Starlike,
    /// Re (1 + zF″/F′)
    Convex,
}

/// F, F′ and F″ prepared once for repeated evaluation of an order functional.
struct Functional {
    kind: FunctionalKind,
    f: GeneralSeries,
    d1: GeneralSeries,
    d2: GeneralSeries,
}

impl Functional {
    fn new(f: &FractionalSeries, kind: FunctionalKind) -> Self {
        let g = f.to_general();
        let d1 = g.differentiate();
        let d2 = d1.differentiate();
        Functional { kind, f: g, d1, d2 }
    }

    fn value(&self, r: f64, theta: f64) -> Result<Complex64> {
        let z = Complex64::from_polar(r, theta);
        match self.kind {
            FunctionalKind::BoundedTurning => Ok(self.d1.eval_nonzero(r, theta)),
            FunctionalKind::Starlike => {
                let f = self.f.eval_nonzero(r, theta);
                if f.norm() < POLE_EPS {
                    return Err(Error::Pole { r, theta });
                }
                Ok(z * self.d1.eval_nonzero(r, theta) / f)
            }
            FunctionalKind::Convex => {
                let d1 = self.d1.eval_nonzero(r, theta);
                if d1.norm() < POLE_EPS {
                    return Err(Error::Pole { r, theta });
                }
                Ok(1.0 + z * self.d2.eval_nonzero(r, theta) / d1)
            }
        }
    }

    fn min_re(&self, r: f64, angles: &[f64], exec: Execution) -> Result<f64> {
        let values = par::map(exec, angles, |&t| self.value(r, t).map(|v| v.re));
        let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
        Ok(par::tree_argmin(&values).map_or(f64::INFINITY, |(_, v)| v))
    }
}

/// Minimum over the sampled circle `|z| = r` of the real part of the
/// functional selected by `kind`.
pub fn min_re_functional(
    f: &FractionalSeries,
    kind: FunctionalKind,
    r: f64,
    samples: u32,
) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::OutsideDisk { r });
    }
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 angular samples".into()));
    }
    Functional::new(f, kind).min_re(r, &angles(samples, default_margin()), Execution::default())
}

/// Angular resolution used by [`brute_force_radius`].
pub const RADIUS_SEARCH_SAMPLES: u32 = 1024;

/// Largest `r` with `min Re(functional) ≥ psi` on `|z| = r`, by bisection.
///
/// The minimum is assumed non-increasing in `r`; a coarse scan over
/// r = 0.05, 0.10, …, 0.95 checks this first.
pub fn brute_force_radius(
    f: &FractionalSeries,
    kind: FunctionalKind,
    psi: f64,
    tol: f64,
) -> Result<f64> {
    if !(0.0..1.0).contains(&psi) {
        return Err(Error::InvalidArgument(format!("psi = {psi} must lie in [0, 1)")));
    }
    if !(tol > 0.0 && tol < 0.05) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} out of range")));
    }
    let functional = Functional::new(f, kind);
    let angles = angles(RADIUS_SEARCH_SAMPLES, default_margin());
    let exec = Execution::default();
    let min_at = |r: f64| functional.min_re(r, &angles, exec);
    // a pole on the circle is a violation of any order
    let holds = |r: f64| min_at(r).map(|m| m >= psi).unwrap_or(false);

    let coarse: Vec<f64> = (1..=19).map(|i| f64::from(i) * 0.05).collect();
    let mut previous = f64::INFINITY;
    for &r in &coarse {
        let Ok(m) = min_at(r) else { break };
        if m > previous + 1e-9 * previous.abs().max(1.0) {
            return Err(Error::NonMonotonic { r });
        }
        previous = m;
    }

    if !holds(tol) {
        return Err(Error::InvalidArgument(format!(
            "functional is already below {psi} near the origin"
        )));
    }
    let mut hi = 1.0 - tol;
    if holds(hi) {
        return Ok(hi);
    }
    let mut lo = tol;
    while hi - lo > 0.5 * tol {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// The ratio `D^k(F∗Φ)/D^m(F∗Ψ)` and its Möbius inversion.
struct Subordination {
    num: GeneralSeries,
    den: GeneralSeries,
    a: f64,
    b: f64,
    gamma: f64,
}

impl Subordination {
    fn new(p: &ClassParams, f: &FractionalSeries) -> Result<Self> {
        if f.mu() != p.mu() {
            return Err(Error::MuMismatch { left: p.mu(), right: f.mu() });
        }
        let phi = p.phi().to_series(p.mu(), f.truncation())?;
        let psi = p.psi().to_series(p.mu(), f.truncation())?;
        Ok(Subordination {
            num: apply_d(&f.hadamard(&phi)?, p.k()).to_general(),
            den: apply_d(&f.hadamard(&psi)?, p.m()).to_general(),
            a: p.a(),
            b: p.b(),
            gamma: p.gamma(),
        })
    }

    /// |w| where `t = (1−γ)(1+Aw)/(1+Bw) + γ`.
    fn abs_w(&self, r: f64, theta: f64) -> Result<f64> {
        let den = self.den.eval_nonzero(r, theta);
        if den.norm() < POLE_EPS {
            return Err(Error::Pole { r, theta });
        }
        let t = self.num.eval_nonzero(r, theta) / den;
        let u = (t - self.gamma) / (1.0 - self.gamma);
        let q = self.a - u * self.b;
        if q.norm() < POLE_EPS {
            return Err(Error::MobiusBlowUp { r, theta });
        }
        Ok(((u - 1.0) / q).norm())
    }

    fn max_abs_w(&self, points: &[(f64, f64)], exec: Execution) -> Result<(usize, f64)> {
        let values = par::map(exec, points, |&(r, t)| self.abs_w(r, t));
        let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
        par::tree_argmax(&values).ok_or_else(|| Error::InvalidGrid("empty grid".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_abs_w: f64,
    pub witness: DiskPoint,
}

/// Maximum of |w| over the grid; at most 1 everywhere is the numerical
/// signal that the subordination holds.
pub fn subordination_residual(
    p: &ClassParams,
    f: &FractionalSeries,
    grid: &VerificationGrid,
) -> Result<f64> {
    Ok(subordination_residual_with(p, f, grid, Execution::default())?.max_abs_w)
}

pub fn subordination_residual_with(
    p: &ClassParams,
    f: &FractionalSeries,
    grid: &VerificationGrid,
    exec: Execution,
) -> Result<ResidualReport> {
    let sub = Subordination::new(p, f)?;
    let points = grid.points();
    let (i, max_abs_w) = sub.max_abs_w(&points, exec)?;
    let (r, theta) = points[i];
    Ok(ResidualReport { max_abs_w, witness: DiskPoint::new(r, theta)? })
}

/// One row of the per-point dump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSample {
    pub r: f64,
    pub theta: f64,
    pub re_functional: f64,
    pub abs_w: f64,
}

pub fn grid_profile(
    p: &ClassParams,
    f: &FractionalSeries,
    kind: FunctionalKind,
    grid: &VerificationGrid,
    exec: Execution,
) -> Result<Vec<GridSample>> {
    let sub = Subordination::new(p, f)?;
    let functional = Functional::new(f, kind);
    let rows = par::map(exec, &grid.points(), |&(r, theta)| {
        Ok(GridSample {
            r,
            theta,
            re_functional: functional.value(r, theta)?.re,
            abs_w: sub.abs_w(r, theta)?,
        })
    });
    rows.into_iter().collect()
}

/// Writes `r,theta,re_functional,abs_w` rows.
pub fn write_grid_csv<W: Write>(rows: &[GridSample], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

/// Critical coefficient of `z − a z^{μn₀}` found from the grid alone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalCoefficient {
    /// `(r, a_r)`: largest `a` with `max |w| ≤ 1` on the circle `|z| = r`.
    pub per_radius: Vec<(f64, f64)>,
    /// Smallest `a_r`, i.e. the critical value over the whole grid.
    pub grid_value: f64,
    /// Quadratic extrapolation of the three outermost `a_r` to `r = 1`.
    pub extrapolated: f64,
}

/// Bisects, circle by circle, for the largest `a` keeping the single-term
/// series `z − a z^{μn₀}` inside the subordination target.
///
/// The grid never reaches `|z| = 1`, so the outermost circle overestimates
/// the critical value by a factor of roughly `r^{1−μn₀}`; the extrapolated
/// value removes that bias using only sampled circles.
pub fn critical_single_term_coefficient(
    p: &ClassParams,
    n0: u32,
    grid: &VerificationGrid,
    exec: Execution,
) -> Result<CriticalCoefficient> {
    if n0 < 2 {
        return Err(Error::InvalidArgument(format!("index {n0} must be >= 2")));
    }
    let angles = grid.angles();
    let truncation = n0.max(2);
    let violated = |a: f64, r: f64| -> Result<bool> {
        let f = FractionalSeries::single_term(p.mu(), crate::fps::Sign::Minus, n0, a, truncation)?;
        let sub = Subordination::new(p, &f)?;
        let points: Vec<(f64, f64)> = angles.iter().map(|&t| (r, t)).collect();
        Ok(match sub.max_abs_w(&points, exec) {
            Ok((_, w)) => w > 1.0,
            Err(Error::Pole { .. } | Error::MobiusBlowUp { .. }) => true,
            Err(e) => return Err(e),
        })
    };

    let mut per_radius = Vec::with_capacity(grid.radii().len());
    for &r in grid.radii() {
        let mut lo = 0.0;
        let mut hi = 1e-3;
        let mut doublings = 0;
        while !violated(hi, r)? {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > 60 {
                return Err(Error::InvalidArgument(format!(
                    "no violation found on |z| = {r} for any coefficient"
                )));
            }
        }
        for _ in 0..100 {
            if hi - lo <= 1e-14 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if violated(mid, r)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        per_radius.push((r, 0.5 * (lo + hi)));
    }
    let grid_value = per_radius.iter().map(|(_, a)| *a).fold(f64::INFINITY, f64::min);
    let extrapolated = extrapolate_to_one(&per_radius);
    Ok(CriticalCoefficient { per_radius, grid_value, extrapolated })
}

/// Lagrange interpolation through the last (up to three) points, at x = 1.
fn extrapolate_to_one(points: &[(f64, f64)]) -> f64 {
    let tail = &points[points.len().saturating_sub(3)..];
    tail.iter()
        .enumerate()
        .map(|(i, &(xi, yi))| {
            let basis: f64 = tail
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, &(xj, _))| (1.0 - xj) / (xi - xj))
                .product();
            yi * basis
        })
        .sum()
}

/// Default node count for integral means.
pub const DEFAULT_QUADRATURE: u32 = 4096;

fn commensurate(series: &GeneralSeries) -> bool {
    let Some(first) = series.terms().first() else { return true };
    series.terms().iter().all(|t| {
        let d = t.exponent - first.exponent;
        (d - d.round()).abs() < 1e-12
    })
}

fn midpoint_rule(series: &GeneralSeries, q: f64, r: f64, nodes: u32, exec: Execution) -> f64 {
    let h = 2.0 * PI / f64::from(nodes);
    let thetas: Vec<f64> = (0..nodes).map(|j| -PI + (f64::from(j) + 0.5) * h).collect();
    let values = par::map(exec, &thetas, |&t| series.eval_nonzero(r, t).norm().powf(q));
    par::tree_reduce(&values, &|a, b| a + b).unwrap_or(0.0) * h
}

/// ∫_{−π}^{π} |f(re^{iθ})|^q dθ by the midpoint rule on `quadrature_n` nodes.
///
/// When all exponents differ by integers the integrand is smooth and
/// periodic and the rule converges spectrally. Otherwise the principal
/// branch makes it non-periodic and two Richardson steps (nodes n, 2n, 4n)
/// are applied.
pub fn integral_mean(series: &GeneralSeries, q: f64, r: f64, quadrature_n: u32) -> Result<f64> {
    integral_mean_with(series, q, r, quadrature_n, Execution::default())
}

pub fn integral_mean_with(
    series: &GeneralSeries,
    q: f64,
    r: f64,
    quadrature_n: u32,
    exec: Execution,
) -> Result<f64> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::InvalidArgument(format!("q = {q} must be positive")));
    }
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::OutsideDisk { r });
    }
    if quadrature_n < 2 {
        return Err(Error::InvalidArgument("need at least 2 quadrature nodes".into()));
    }
    if commensurate(series) {
        return Ok(midpoint_rule(series, q, r, quadrature_n, exec));
    }
    let m1 = midpoint_rule(series, q, r, quadrature_n, exec);
    let m2 = midpoint_rule(series, q, r, 2 * quadrature_n, exec);
    let m4 = midpoint_rule(series, q, r, 4 * quadrature_n, exec);
    let r1 = (4.0 * m2 - m1) / 3.0;
    let r2 = (4.0 * m4 - m2) / 3.0;
    Ok((16.0 * r2 - r1) / 15.0)
}

/// Exact ∫_{−π}^{π} |f(re^{iθ})|² dθ on the principal branch.
///
/// Cross terms contribute `2 sin(πd)/d` for exponent gap `d`; for integer
/// gaps this is the Parseval sum `2π Σ cₖ² r^{2eₖ}`.
pub fn l2_integral_exact(series: &GeneralSeries, r: f64) -> f64 {
    let terms = series.terms();
    let mut total = 0.0;
    for (i, a) in terms.iter().enumerate() {
        for b in &terms[i..] {
            let d = b.exponent - a.exponent;
            let kernel = if d == 0.0 {
                2.0 * PI
            } else if (d - d.round()).abs() < 1e-12 {
                0.0
            } else {
                2.0 * (PI * d).sin() / d
            };
            let weight = if d == 0.0 { 1.0 } else { 2.0 };
            total += weight * a.coefficient * b.coefficient * r.powf(a.exponent + b.exponent) * kernel;
        }
    }
    total
}

/// Compares ∫|F|^q against ∫|F_{2μ}|^q for the n = 2 extremal function.
///
/// `closed_form` holds the extremal's integral, `oracle` the member's, and
/// `margin = closed_form − oracle`.
pub fn verify_integral_means_dominance(
    p: &ClassParams,
    f: &FractionalSeries,
    q: f64,
    r: f64,
) -> Result<BoundReport> {
    if p.is_member(f)? != Verdict::MemberCertified {
        return Err(Error::InvalidArgument("series is not a certified member".into()));
    }
    let left = integral_mean(&f.to_general(), q, r, DEFAULT_QUADRATURE)?;
    let right = integral_mean(&p.extremal_function(2)?.to_general(), q, r, DEFAULT_QUADRATURE)?;
    Ok(BoundReport {
        kind: format!("integral_means_q{q}"),
        closed_form: right,
        oracle: left,
        margin: right - left,
        witness: None,
    })
}

/// Dominance with the 1e−9 relative slack.
pub fn dominates(report: &BoundReport) -> bool {
    report.oracle <= report.closed_form * (1.0 + 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::Preset;
    use crate::fps::Sign;
    use crate::Mu;

    fn minus(mu: Mu, n: u32, a: f64) -> FractionalSeries {
        FractionalSeries::single_term(mu, Sign::Minus, n, a, 16).unwrap()
    }

    fn starlike() -> ClassParams {
        ClassParams::preset(Preset::StarlikeMu, Mu::ONE, 0.0).unwrap()
    }

    #[test]
    fn grid_validation_and_angles() {
        let g = VerificationGrid::default();
        let angles = g.angles();
        assert!(angles.contains(&0.0));
        assert!(angles.iter().all(|t| t.abs() <= PI - 1e-3));
        assert_eq!(angles.len(), 1023);
        assert!(VerificationGrid::new(vec![0.5, 0.4], 64, 1e-3).is_err());
        assert!(VerificationGrid::new(vec![0.5, 1.0], 64, 1e-3).is_err());
        assert!(VerificationGrid::new(vec![0.5], 100, 1e-3).is_err());
        assert!(VerificationGrid::new(vec![0.5], 32, 1e-3).is_err());
        assert!(VerificationGrid::new(vec![0.5], 64, 0.0).is_err());
        let j: VerificationGrid = serde_json::from_str(r#"{"angular_samples": 256}"#).unwrap();
        assert_eq!(j.radii().len(), 11);
    }

    #[test]
    fn identity_functionals_are_one() {
        let z = FractionalSeries::identity(Mu::ONE, 8).unwrap();
        for kind in [FunctionalKind::BoundedTurning, FunctionalKind::Starlike, FunctionalKind::Convex] {
            for r in [0.1, 0.5, 0.9] {
                assert!((min_re_functional(&z, kind, r, 256).unwrap() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn min_re_worked_examples() {
        let f = minus(Mu::ONE, 2, 0.5);
        let v = min_re_functional(&f, FunctionalKind::Starlike, 2.0 / 3.0, 1024).unwrap();
        assert!((v - 0.5).abs() < 1e-13);
        let g = minus(Mu::ONE, 2, 0.25);
        let v = min_re_functional(&g, FunctionalKind::Convex, 2.0 / 3.0, 1024).unwrap();
        assert!((v - 0.5).abs() < 1e-13);
        assert!(min_re_functional(&f, FunctionalKind::Starlike, 1.0, 64).is_err());
    }

    #[test]
    fn pole_is_reported() {
        // F′(z) = 1 − 2·0.8 z vanishes at z = 0.625
        let f = minus(Mu::ONE, 2, 0.8);
        let err = min_re_functional(&f, FunctionalKind::Convex, 0.625, 64).unwrap_err();
        assert!(matches!(err, Error::Pole { .. }));
    }

    #[test]
    fn brute_force_radius_examples() {
        let z = FractionalSeries::identity(Mu::ONE, 8).unwrap();
        let r = brute_force_radius(&z, FunctionalKind::Starlike, 0.5, 1e-6).unwrap();
        assert_eq!(r, 1.0 - 1e-6);
        let f = minus(Mu::ONE, 2, 0.5);
        let r = brute_force_radius(&f, FunctionalKind::Starlike, 0.5, 1e-9).unwrap();
        assert!((r - 2.0 / 3.0).abs() < 1e-8);
        let r = brute_force_radius(&f, FunctionalKind::Starlike, 0.0, 1e-6).unwrap();
        assert!(r >= 0.999);
        assert!(brute_force_radius(&f, FunctionalKind::Starlike, 1.0, 1e-6).is_err());
    }

    #[test]
    fn min_re_non_increasing_for_extremals() {
        for preset in [Preset::StarlikeMu, Preset::ConvexMu] {
            for mu in ["1", "3/2", "2"] {
                let p = ClassParams::preset(preset, mu.parse().unwrap(), 0.0).unwrap();
                for n in 2..=5 {
                    let f = p.extremal_function(n).unwrap();
                    for kind in [FunctionalKind::BoundedTurning, FunctionalKind::Starlike, FunctionalKind::Convex] {
                        let mut prev = f64::INFINITY;
                        for i in 1..=19 {
                            let r = 0.05 * f64::from(i);
                            let Ok(v) = min_re_functional(&f, kind, r, 512) else { break };
                            assert!(v <= prev + 1e-12, "{preset:?} mu={mu} n={n} {kind:?} r={r}");
                            prev = v;
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn residual_examples() {
        let p = starlike();
        let f = minus(Mu::ONE, 2, 0.5);
        let grid = VerificationGrid::new(vec![1e-6], 64, 1e-3).unwrap();
        assert!(subordination_residual(&p, &f, &grid).unwrap() < 1e-5);

        let grid = VerificationGrid::new((1..=99).map(|i| f64::from(i) / 100.0).collect(), 1024, 1e-3).unwrap();
        let w = subordination_residual(&p, &f, &grid).unwrap();
        assert!(w <= 1.0 + 1e-9 && w > 0.9, "{w}");

        let bad = minus(Mu::ONE, 2, 0.9);
        let report = subordination_residual_with(&p, &bad, &grid, Execution::Sequential).unwrap();
        assert!(report.max_abs_w > 1.0);
        assert_eq!(report.witness.theta(), 0.0);
    }

    #[test]
    fn residual_independent_of_execution() {
        let p = ClassParams::preset(Preset::ConvexMu, "3/2".parse().unwrap(), 0.2).unwrap();
        let f = FractionalSeries::new(p.mu(), Sign::Minus, 8, [(2, 0.05), (4, 0.01)]).unwrap();
        let grid = VerificationGrid::default();
        let a = subordination_residual_with(&p, &f, &grid, Execution::Sequential).unwrap();
        let b = subordination_residual_with(&p, &f, &grid, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn grid_csv_has_expected_columns() {
        let p = starlike();
        let f = minus(Mu::ONE, 2, 0.25);
        let grid = VerificationGrid::new(vec![0.5], 64, 1e-3).unwrap();
        let rows = grid_profile(&p, &f, FunctionalKind::Starlike, &grid, Execution::default()).unwrap();
        let mut buf = Vec::new();
        write_grid_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("r,theta,re_functional,abs_w\n"));
        assert_eq!(text.lines().count(), 64);
    }

    #[test]
    fn integral_mean_examples() {
        let z = FractionalSeries::identity(Mu::ONE, 4).unwrap().to_general();
        let v = integral_mean(&z, 2.0, 0.5, 256).unwrap();
        assert!((v - 1.570_796_326_794_9).abs() < 1e-12);

        let f = minus(Mu::ONE, 2, 0.5).to_general();
        let v = integral_mean(&f, 2.0, 0.5, 256).unwrap();
        assert!((v - 1.668_971_097_219_58).abs() < 1e-12);
        assert!((l2_integral_exact(&f, 0.5) - v).abs() < 1e-12);

        // q = 1 self-convergence against a 10× finer rule, and against mpmath
        let coarse = integral_mean(&f, 1.0, 0.5, 512).unwrap();
        let fine = integral_mean(&f, 1.0, 0.5, 5120).unwrap();
        assert!((coarse - fine).abs() < 1e-6);
        assert!((fine - 3.190_874_857_924_766).abs() < 1e-12);
        assert!(integral_mean(&f, 0.0, 0.5, 64).is_err());
        assert!(integral_mean(&f, 1.0, 1.0, 64).is_err());
    }

    #[test]
    fn fractional_exponent_integrals_match_reference() {
        // mpmath quad references for z − 0.2 z³ − 0.1 z^{4.5} at r = 0.6
        let mu: Mu = "3/2".parse().unwrap();
        let f = FractionalSeries::new(mu, Sign::Minus, 8, [(2, 0.2), (3, 0.1)]).unwrap().to_general();
        let refs = [(1.0, 3.780_472_136_198_073_4), (2.0, 2.280_033_105_959_174), (3.0, 1.378_288_887_914_716)];
        for (q, expected) in refs {
            let v = integral_mean(&f, q, 0.6, 4096).unwrap();
            assert!(((v - expected) / expected).abs() < 1e-10, "q={q}: {v} vs {expected}");
        }
        assert!(((l2_integral_exact(&f, 0.6) - refs[1].1) / refs[1].1).abs() < 1e-13);
    }

    #[test]
    fn quadrature_self_convergence() {
        let mu: Mu = "2".parse().unwrap();
        let f = FractionalSeries::new(mu, Sign::Minus, 8, [(2, 0.1), (3, 0.05)]).unwrap().to_general();
        let refs = [(1.0, 5.663_616_386_875_819), (2.0, 5.120_863_544_091_238), (3.0, 4.644_226_690_123_321_6)];
        for (q, expected) in refs {
            let a = integral_mean(&f, q, 0.9, 4096).unwrap();
            let b = integral_mean(&f, q, 0.9, 8192).unwrap();
            assert!(((a - b) / a).abs() < 1e-8);
            assert!(((a - expected) / expected).abs() < 1e-12);
        }
    }

    #[test]
    fn dominance_examples() {
        let p = starlike();
        let ext = p.extremal_function(2).unwrap();
        let rep = verify_integral_means_dominance(&p, &ext, 2.0, 0.5).unwrap();
        assert_eq!(rep.margin, 0.0);
        assert!(dominates(&rep));

        let f = minus(Mu::ONE, 2, 0.25);
        let rep = verify_integral_means_dominance(&p, &f, 2.0, 0.5).unwrap();
        assert!((rep.oracle - 2.0 * PI * 0.253_906_25).abs() < 1e-12);
        assert!((rep.closed_form - 2.0 * PI * 0.265_625).abs() < 1e-12);
        assert!(dominates(&rep));

        let spread = FractionalSeries::new(Mu::ONE, Sign::Minus, 8, [(2, 0.2), (3, 0.1)]).unwrap();
        assert!((p.coefficient_margin(&spread).unwrap() - 0.6).abs() < 1e-15);
        for r in [0.25, 0.5, 0.75, 0.9] {
            assert!(dominates(&verify_integral_means_dominance(&p, &spread, 2.0, r).unwrap()));
        }
        assert!(verify_integral_means_dominance(&p, &minus(Mu::ONE, 2, 0.9), 2.0, 0.5).is_err());
    }

    #[test]
    fn extrapolation_is_exact_for_quadratics() {
        let pts: Vec<(f64, f64)> = [0.9, 0.95, 0.99].iter().map(|&x| (x, 2.0 * x * x - x + 3.0)).collect();
        assert!((extrapolate_to_one(&pts) - 4.0).abs() < 1e-12);
        assert_eq!(extrapolate_to_one(&[(0.5, 7.0)]), 7.0);
    }

    #[test]
    fn critical_coefficient_single_case() {
        let p = starlike();
        let grid = VerificationGrid::new(vec![0.985, 0.99, 0.995], 2048, 1e-3).unwrap();
        let c = critical_single_term_coefficient(&p, 2, &grid, Execution::default()).unwrap();
        // violation at z = r needs a > 1/(2r) on the real axis
        assert!((c.grid_value - 0.5 / 0.995).abs() < 1e-9);
        assert!((c.extrapolated - 0.5).abs() < 1e-5);
    }
}
