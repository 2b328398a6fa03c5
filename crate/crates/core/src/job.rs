//! JSON job runner behind the `fracdisk` binary.
//!
//! A job names its command, class parameters, an optional series and an
//! options map. [`run`] never panics on bad input: it returns exit code 2
//! with an `{"error": {...}}` document instead. Floats in the output are
//! rounded to 9 significant digits so identical jobs give identical bytes.

use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::bounds::{self, BoundReport, DiskKind, Envelope};
use crate::classes::{ClassParams, Preset, Verdict};
use crate::fps::{FractionalSeries, GeneralSeries, SeriesJson};
use crate::geometry::{self, FunctionalKind, VerificationGrid, DEFAULT_QUADRATURE};
use crate::operators::{frac_derivative_higher, frac_integral};
use crate::par::Execution;
use crate::{Error, Mu, Result};

/// Tolerance for envelope containment checks.
pub const BOUND_TOL: f64 = 1e-9;
/// Largest accepted sweep length.
pub const MAX_STEPS: u32 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Member,
    Radius,
    Distort,
    Fracop,
    Means,
    Extremal,
    Verify,
    Sweep,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobSpec {
    pub command: Command,
    #[serde(default)]
    pub params: Option<Value>,
    #[serde(default)]
    pub series: Option<Value>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FracOp {
    Derivative,
    Integral,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub kind: Option<FunctionalKind>,
    pub psi: Option<f64>,
    pub r: Option<f64>,
    pub q: Option<f64>,
    pub delta: Option<f64>,
    pub n: Option<u32>,
    pub n_max: Option<u32>,
    pub tol: Option<f64>,
    pub op: Option<FracOp>,
    pub upsilon: Option<u32>,
    pub grid: Option<VerificationGrid>,
    pub quadrature_n: Option<u32>,
    pub sweep: Option<SweepSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepTarget {
    Radius,
    Distortion,
    DerivativeDistortion,
    FracIntegral,
    FracDerivative,
    Means,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Psi,
    Gamma,
    Delta,
    R,
    Q,
}

impl SweepVariable {
    fn name(self) -> &'static str {
        match self {
            SweepVariable::Psi => "psi",
            SweepVariable::Gamma => "gamma",
            SweepVariable::Delta => "delta",
            SweepVariable::R => "r",
            SweepVariable::Q => "q",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub target: SweepTarget,
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub steps: u32,
}

impl SweepSpec {
    /// `steps` evenly spaced values from `start` to `stop` inclusive.
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.steps == 0 {
            return Err(Error::InvalidArgument("sweep range is empty".into()));
        }
        if self.steps > MAX_STEPS {
            return Err(Error::InvalidArgument(format!("at most {MAX_STEPS} sweep steps")));
        }
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::InvalidArgument("sweep bounds must be finite".into()));
        }
        if self.steps == 1 {
            return Ok(vec![self.start]);
        }
        let last = f64::from(self.steps - 1);
        Ok((0..self.steps)
            .map(|i| self.start + (self.stop - self.start) * f64::from(i) / last)
            .collect())
    }
}

/// Everything a front end needs to finish a job.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    /// One JSON document followed by a newline.
    pub json: String,
    pub sweep_csv: Option<String>,
    pub grid_csv: Option<String>,
}

struct Computed {
    value: Value,
    violation: bool,
    sweep_csv: Option<String>,
    grid_csv: Option<String>,
}

impl Computed {
    fn plain(value: Value) -> Self {
        Computed { value, violation: false, sweep_csv: None, grid_csv: None }
    }
}

/// Parses and executes one job document.
pub fn run(input: &str, want_grid_csv: bool) -> Outcome {
    let job: JobSpec = match serde_json::from_str(input) {
        Ok(job) => job,
        Err(e) => return failure(2, "malformed_job", &e.to_string()),
    };
    match execute(&job, want_grid_csv) {
        Ok(c) => Outcome {
            code: i32::from(c.violation),
            json: render(&c.value),
            sweep_csv: c.sweep_csv,
            grid_csv: c.grid_csv,
        },
        Err(e) => failure(if e.is_violation() { 1 } else { 2 }, e.kind(), &e.to_string()),
    }
}

fn failure(code: i32, kind: &str, message: &str) -> Outcome {
    Outcome {
        code,
        json: render(&json!({"error": {"kind": kind, "message": message}})),
        sweep_csv: None,
        grid_csv: None,
    }
}

/// Rounds to 9 significant digits; −0 becomes 0.
pub fn round9(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    let y: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    if y == 0.0 {
        0.0
    } else {
        y
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round9(n.as_f64().expect("f64 number"));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Compact JSON with rounded floats and sorted keys.
pub fn render(v: &Value) -> String {
    let mut v = v.clone();
    round_value(&mut v);
    let mut out = serde_json::to_string(&v).expect("values serialize");
    out.push('\n');
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PresetJson {
    preset: Preset,
    #[serde(default)]
    mu: Mu,
    #[serde(default)]
    gamma: f64,
}

fn invalid(e: serde_json::Error) -> Error {
    Error::InvalidArgument(e.to_string())
}

/// Full parameter documents, or the `{"preset": ..., "mu": ..., "gamma": ...}` shorthand.
pub fn parse_params(v: &Value) -> Result<ClassParams> {
    if v.get("preset").is_some() {
        let p: PresetJson = serde_json::from_value(v.clone()).map_err(invalid)?;
        ClassParams::preset(p.preset, p.mu, p.gamma)
    } else {
        serde_json::from_value(v.clone()).map_err(|e| match e.to_string() {
            msg if msg.starts_with("invalid class parameters") => Error::InvalidParams(msg),
            msg => Error::InvalidArgument(msg),
        })
    }
}

/// A series without an explicit `mu` inherits the one from `params`.
pub fn parse_series(v: &Value, mu: Option<Mu>) -> Result<FractionalSeries> {
    let mut v = v.clone();
    if let (Value::Object(map), Some(mu)) = (&mut v, mu) {
        map.entry("mu").or_insert_with(|| Value::String(mu.to_string()));
    }
    let json: SeriesJson = serde_json::from_value(v).map_err(invalid)?;
    FractionalSeries::try_from(json)
}

struct Ctx<'a> {
    job: &'a JobSpec,
}

impl Ctx<'_> {
    fn opts(&self) -> &Options {
        &self.job.options
    }

    fn params(&self) -> Result<ClassParams> {
        let v = self.job.params.as_ref().ok_or_else(|| missing("params"))?;
        parse_params(v)
    }

    fn optional_params(&self) -> Result<Option<ClassParams>> {
        self.job.params.as_ref().map(parse_params).transpose()
    }

    fn series(&self, mu: Option<Mu>) -> Result<Option<FractionalSeries>> {
        self.job.series.as_ref().map(|v| parse_series(v, mu)).transpose()
    }

    fn required_series(&self, mu: Mu) -> Result<FractionalSeries> {
        self.series(Some(mu))?.ok_or_else(|| missing("series"))
    }

    fn r(&self) -> Result<f64> {
        let r = self.opts().r.ok_or_else(|| missing("options.r"))?;
        if r > 0.0 && r < 1.0 {
            Ok(r)
        } else {
            Err(Error::OutsideDisk { r })
        }
    }

    fn tol(&self) -> Result<f64> {
        let tol = self.opts().tol.unwrap_or(1e-6);
        if tol > 0.0 && tol < 0.05 {
            Ok(tol)
        } else {
            Err(Error::InvalidArgument(format!("tol = {tol} must lie in (0, 0.05)")))
        }
    }

    fn quadrature_n(&self) -> Result<u32> {
        let n = self.opts().quadrature_n.unwrap_or(DEFAULT_QUADRATURE);
        if (16..=1 << 20).contains(&n) {
            Ok(n)
        } else {
            Err(Error::InvalidArgument(format!("quadrature_n = {n} must lie in [16, 2^20]")))
        }
    }
}

fn missing(what: &str) -> Error {
    Error::InvalidArgument(format!("missing {what}"))
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn execute(job: &JobSpec, want_grid_csv: bool) -> Result<Computed> {
    let ctx = Ctx { job };
    match job.command {
        Command::Member => member(&ctx),
        Command::Radius => radius(&ctx),
        Command::Distort => distort(&ctx),
        Command::Fracop => fracop(&ctx),
        Command::Means => means(&ctx),
        Command::Extremal => extremal(&ctx),
        Command::Verify => verify(&ctx, want_grid_csv),
        Command::Sweep => sweep(&ctx),
    }
}

fn member(ctx: &Ctx) -> Result<Computed> {
    let p = ctx.params()?;
    let f = ctx.required_series(p.mu())?;
    let margin = p.coefficient_margin(&f)?;
    Ok(Computed::plain(json!({"verdict": p.is_member(&f)?, "margin": margin})))
}

fn radius(ctx: &Ctx) -> Result<Computed> {
    let p = ctx.params()?;
    let kind = ctx.opts().kind.unwrap_or(FunctionalKind::Starlike);
    let psi = ctx.opts().psi.unwrap_or(0.0);
    let tol = ctx.tol()?;
    let n_max = ctx.opts().n_max.unwrap_or(bounds::DEFAULT_N_MAX);
    let res = bounds::radius(kind, &p, psi, n_max)?;
    let extremal = p.extremal_function(res.minimizer_n)?;
    let oracle = geometry::brute_force_radius(&extremal, kind, psi, tol)?;
    let margin = oracle - res.radius.min(1.0 - tol);
    let mut c = Computed::plain(json!({
        "radius": res.radius,
        "minimizer_n": res.minimizer_n,
        "tail_monotone": res.tail_monotone,
        "oracle": oracle,
        "margin": margin,
    }));
    c.violation = margin < -2.0 * tol;
    Ok(c)
}

fn envelope_json(e: Envelope) -> Value {
    json!({"lower": e.lower, "upper": e.upper})
}

fn distort(ctx: &Ctx) -> Result<Computed> {
    let p = ctx.params()?;
    let r = ctx.r()?;
    let f = ctx.series(Some(p.mu()))?;
    let mut out = Map::new();
    out.insert("r".into(), json!(r));
    out.insert("weights_monotone".into(), json!(bounds::weights_monotone(&p, bounds::DEFAULT_N_MAX)));
    out.insert("distortion".into(), envelope_json(bounds::distortion_bounds(&p, r)?));
    out.insert(
        "derivative_distortion".into(),
        envelope_json(bounds::derivative_distortion_bounds(&p, r)?),
    );
    let mut reports: Vec<BoundReport> = Vec::new();
    if let Some(f) = &f {
        reports.extend(bounds::distortion_report(&p, f, r)?);
        reports.extend(bounds::derivative_distortion_report(&p, f, r)?);
    }
    if let Some(delta) = ctx.opts().delta {
        out.insert("delta".into(), json!(delta));
        out.insert(
            "frac_integral".into(),
            envelope_json(bounds::frac_integral_distortion(&p, delta, r)?),
        );
        out.insert(
            "frac_integral_printed".into(),
            envelope_json(bounds::frac_integral_distortion_printed(&p, delta, r)?),
        );
        let mut disks = Map::new();
        disks.insert("frac_integral".into(), to_value(&bounds::disk_radius(DiskKind::FracIntegral, &p, delta)?));
        if let Some(f) = &f {
            reports.extend(bounds::frac_integral_report(&p, f, delta, r)?);
        }
        if delta < 1.0 {
            out.insert(
                "frac_derivative".into(),
                envelope_json(bounds::frac_derivative_distortion(&p, delta, r)?),
            );
            out.insert(
                "frac_derivative_printed".into(),
                envelope_json(bounds::frac_derivative_distortion_printed(&p, delta, r)?),
            );
            disks.insert(
                "frac_derivative".into(),
                to_value(&bounds::disk_radius(DiskKind::FracDerivative, &p, delta)?),
            );
            if let Some(f) = &f {
                reports.extend(bounds::frac_derivative_report(&p, f, delta, r)?);
            }
        }
        out.insert("disk_radius".into(), Value::Object(disks));
    }
    let violation = reports.iter().any(|rep| !rep.holds(BOUND_TOL));
    if f.is_some() {
        out.insert("reports".into(), to_value(&reports));
    }
    Ok(Computed { value: Value::Object(out), violation, sweep_csv: None, grid_csv: None })
}

fn fracop(ctx: &Ctx) -> Result<Computed> {
    let mu = ctx.optional_params()?.map(|p| p.mu());
    let f = match ctx.series(mu)? {
        Some(f) => f,
        None => FractionalSeries::identity(mu.unwrap_or_default(), 2)?,
    };
    let op = ctx.opts().op.ok_or_else(|| missing("options.op"))?;
    let delta = ctx.opts().delta.ok_or_else(|| missing("options.delta"))?;
    let s = f.to_general();
    let image: GeneralSeries = match op {
        FracOp::Derivative => frac_derivative_higher(&s, delta, ctx.opts().upsilon.unwrap_or(0))?,
        FracOp::Integral => {
            if ctx.opts().upsilon.is_some() {
                return Err(Error::InvalidArgument("upsilon applies to derivatives only".into()));
            }
            frac_integral(&s, delta)?
        }
    };
    Ok(Computed::plain(json!({"terms": image.terms()})))
}

fn means(ctx: &Ctx) -> Result<Computed> {
    let p = ctx.params()?;
    let f = ctx.required_series(p.mu())?;
    let r = ctx.r()?;
    let q = ctx.opts().q.unwrap_or(2.0);
    let report = means_report(&p, &f, q, r, ctx.quadrature_n()?)?;
    let dominates = geometry::dominates(&report);
    let mut out = json!({"q": q, "r": r, "report": report, "dominates": dominates});
    if q == 2.0 {
        out["l2_exact"] = json!(geometry::l2_integral_exact(&f.to_general(), r));
    }
    let mut c = Computed::plain(out);
    c.violation = !dominates;
    Ok(c)
}

fn means_report(p: &ClassParams, f: &FractionalSeries, q: f64, r: f64, nodes: u32) -> Result<BoundReport> {
    if nodes == DEFAULT_QUADRATURE {
        return geometry::verify_integral_means_dominance(p, f, q, r);
    }
    if p.is_member(f)? != Verdict::MemberCertified {
        return Err(Error::InvalidArgument("series is not a certified member".into()));
    }
    let left = geometry::integral_mean(&f.to_general(), q, r, nodes)?;
    let right = geometry::integral_mean(&p.extremal_function(2)?.to_general(), q, r, nodes)?;
    Ok(BoundReport {
        kind: format!("integral_means_q{q}"),
        closed_form: right,
        oracle: left,
        margin: right - left,
        witness: None,
    })
}

fn extremal(ctx: &Ctx) -> Result<Computed> {
    let p = ctx.params()?;
    let n = ctx.opts().n.unwrap_or(2);
    let f = p.extremal_function(n)?;
    Ok(Computed::plain(json!({
        "n": n,
        "series": SeriesJson::from(f.clone()),
        "coefficient_bound": p.coefficient_bound(n),
        "margin": p.coefficient_margin(&f)?,
    })))
}

fn verify(ctx: &Ctx, want_grid_csv: bool) -> Result<Computed> {
    let p = ctx.params()?;
    let f = ctx.required_series(p.mu())?;
    let grid = ctx.opts().grid.clone().unwrap_or_default();
    let kind = ctx.opts().kind.unwrap_or(FunctionalKind::Starlike);
    let verdict = p.is_member(&f)?;
    let mut ok = verdict == Verdict::MemberCertified;
    let mut out = Map::new();
    out.insert("verdict".into(), to_value(&verdict));
    out.insert("margin".into(), json!(p.coefficient_margin(&f)?));

    let residual = match geometry::subordination_residual_with(&p, &f, &grid, Execution::default()) {
        Ok(rep) => {
            ok &= rep.max_abs_w <= 1.0 + BOUND_TOL;
            to_value(&rep)
        }
        Err(e) if e.is_violation() => {
            ok = false;
            json!({"error": {"kind": e.kind(), "message": e.to_string()}})
        }
        Err(e) => return Err(e),
    };
    out.insert("residual".into(), residual);

    if verdict == Verdict::MemberCertified {
        let mut reports = Vec::new();
        let mut mean_reports = Vec::new();
        for &r in grid.radii() {
            reports.extend(bounds::distortion_report(&p, &f, r)?);
            reports.extend(bounds::derivative_distortion_report(&p, &f, r)?);
            for q in [1.0, 2.0] {
                mean_reports.push(geometry::verify_integral_means_dominance(&p, &f, q, r)?);
            }
        }
        ok &= reports.iter().all(|rep| rep.holds(BOUND_TOL));
        ok &= mean_reports.iter().all(geometry::dominates);
        out.insert("bounds".into(), to_value(&reports));
        out.insert("means".into(), to_value(&mean_reports));
    }
    out.insert("ok".into(), json!(ok));

    let grid_csv = if want_grid_csv {
        let rows = geometry::grid_profile(&p, &f, kind, &grid, Execution::default())?;
        let rounded: Vec<geometry::GridSample> = rows
            .iter()
            .map(|s| geometry::GridSample {
                r: round9(s.r),
                theta: round9(s.theta),
                re_functional: round9(s.re_functional),
                abs_w: round9(s.abs_w),
            })
            .collect();
        let mut buf = Vec::new();
        geometry::write_grid_csv(&rounded, &mut buf).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Some(String::from_utf8(buf).expect("csv output is utf-8"))
    } else {
        None
    };
    Ok(Computed { value: Value::Object(out), violation: !ok, sweep_csv: None, grid_csv })
}

fn sweep(ctx: &Ctx) -> Result<Computed> {
    let spec = ctx.opts().sweep.clone().ok_or_else(|| missing("options.sweep"))?;
    let values = spec.values()?;
    let base = ctx.params()?;
    let series = ctx.series(Some(base.mu()))?;
    use SweepTarget as T;
    use SweepVariable as V;
    let allowed: &[V] = match spec.target {
        T::Radius => &[V::Psi, V::Gamma],
        T::Distortion | T::DerivativeDistortion => &[V::R, V::Gamma],
        T::FracIntegral | T::FracDerivative => &[V::R, V::Delta, V::Gamma],
        T::Means => &[V::R, V::Q, V::Gamma],
    };
    if !allowed.contains(&spec.variable) {
        return Err(Error::InvalidArgument(format!(
            "variable {} cannot be swept for this target",
            spec.variable.name()
        )));
    }
    let envelope = !matches!(spec.target, T::Radius | T::Means);
    let mut header = vec![spec.variable.name().to_string()];
    if envelope {
        header.extend(["lower", "upper", "oracle_min", "oracle_max", "margin"].map(String::from));
    } else {
        header.extend(["closed_form", "oracle", "margin"].map(String::from));
    }

    let tol = ctx.tol()?;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    let mut violation = false;
    for &v in &values {
        let p = if spec.variable == V::Gamma { base.with_gamma(v)? } else { base.clone() };
        let pick = |var: V, fallback: Option<f64>, name: &str| -> Result<f64> {
            if spec.variable == var {
                Ok(v)
            } else {
                fallback.ok_or_else(|| missing(name))
            }
        };
        let row = match spec.target {
            T::Radius => {
                let kind = ctx.opts().kind.unwrap_or(FunctionalKind::Starlike);
                let psi = pick(V::Psi, Some(ctx.opts().psi.unwrap_or(0.0)), "options.psi")?;
                let (_, rep) = bounds::radius_report(kind, &p, psi, tol)?;
                violation |= rep.margin < -2.0 * tol;
                vec![v, rep.closed_form, rep.oracle, rep.margin]
            }
            T::Means => {
                let r = pick(V::R, ctx.opts().r, "options.r")?;
                let q = pick(V::Q, Some(ctx.opts().q.unwrap_or(2.0)), "options.q")?;
                let f = match &series {
                    Some(f) => f.clone(),
                    None => p.extremal_function(2)?,
                };
                let rep = means_report(&p, &f, q, r, ctx.quadrature_n()?)?;
                violation |= !geometry::dominates(&rep);
                vec![v, rep.closed_form, rep.oracle, rep.margin]
            }
            _ => {
                let r = pick(V::R, ctx.opts().r, "options.r")?;
                let f = match &series {
                    Some(f) => f.clone(),
                    None => p.extremal_function(2)?,
                };
                let [lo, hi] = match spec.target {
                    T::Distortion => bounds::distortion_report(&p, &f, r)?,
                    T::DerivativeDistortion => bounds::derivative_distortion_report(&p, &f, r)?,
                    T::FracIntegral => {
                        let delta = pick(V::Delta, ctx.opts().delta, "options.delta")?;
                        bounds::frac_integral_report(&p, &f, delta, r)?
                    }
                    _ => {
                        let delta = pick(V::Delta, ctx.opts().delta, "options.delta")?;
                        bounds::frac_derivative_report(&p, &f, delta, r)?
                    }
                };
                let margin = lo.margin.min(hi.margin);
                violation |= margin < -BOUND_TOL;
                vec![v, lo.closed_form, hi.closed_form, lo.oracle, hi.oracle, margin]
            }
        };
        rows.push(row);
    }

    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::InvalidArgument(e.to_string());
    w.write_record(&header).map_err(io)?;
    for row in &rows {
        w.write_record(row.iter().map(|x| round9(*x).to_string())).map_err(io)?;
    }
    let csv_text = String::from_utf8(w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?)
        .expect("csv output is utf-8");
    let min_margin = rows.iter().map(|row| row[row.len() - 1]).fold(f64::INFINITY, f64::min);
    Ok(Computed {
        value: json!({"rows": rows.len(), "columns": header, "min_margin": min_margin, "ok": !violation}),
        violation,
        sweep_csv: Some(csv_text),
        grid_csv: None,
    })
}
