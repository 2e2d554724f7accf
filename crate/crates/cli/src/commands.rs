use std::fmt;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;
use serde_json::json;

use dualfrenet::curve::{classify_planar, classify_straight_line, dual_arc_length, frenet_with, CurveSpec};
use dualfrenet::line::{dual_to_line, line_pair_geometry, line_to_dual, Line3};
use dualfrenet::mannheim::{check_partner_ode, read_bundle, verify_theorems, write_bundle, PairOptions, PairSpec};
use dualfrenet::ruled::{dual_curve_to_ruled, export_mesh, RuledSurfacePatch};
use dualfrenet::selftest::{run_all, SelftestConfig, DEFAULT_SEED};
use dualfrenet::vector::{dual_angle, UnitDualVec3};
use dualfrenet::{DualScalar, DualVec3, Error, Tolerances};

use crate::{Command, Options, Output, TOL_SCALE_VAR};

const DEFAULT_SAMPLES: usize = 101;
const DEFAULT_U_SAMPLES: usize = 11;
const DEFAULT_U_RANGE: [f64; 2] = [-1.0, 1.0];

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input, bad flags.
    Malformed(String),
    Core(Error),
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Malformed(_) => "InvalidInput",
            CliError::Core(e) => e.name(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Malformed(_) | CliError::Core(Error::InvalidInput(_)) => 2,
            CliError::Core(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Malformed(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn malformed(m: impl Into<String>) -> CliError {
    CliError::Malformed(m.into())
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(malformed(format!("{name} must be positive and finite, got {x}")))
    }
}

fn tol_scale(env: Option<&str>) -> Result<f64> {
    match env {
        None => Ok(1.0),
        Some(v) => {
            let x: f64 = v
                .trim()
                .parse()
                .map_err(|_| malformed(format!("{TOL_SCALE_VAR}={v:?} is not a number")))?;
            positive(TOL_SCALE_VAR, x)
        }
    }
}

/// Flag overrides on top of `base`, then the environment scale.
fn tolerances(base: Tolerances, opts: &Options, scale: f64) -> Result<Tolerances> {
    let mut tol = base;
    if let Some(x) = opts.tol_thm {
        tol.theorem = positive("--tol-thm", x)?;
    }
    if let Some(x) = opts.tol_pair {
        tol.pair = positive("--tol-pair", x)?;
    }
    let tol = tol.scaled(scale);
    if !tol.is_valid() {
        return Err(malformed("tolerances must be positive and finite"));
    }
    Ok(tol)
}

fn input_path(opts: &Options) -> Result<&Path> {
    let p = opts.input.as_deref().ok_or_else(|| malformed("--input is required"))?;
    if !p.exists() {
        return Err(malformed(format!("{}: no such file or directory", p.display())));
    }
    Ok(p)
}

fn read_input(opts: &Options) -> Result<String> {
    let p = input_path(opts)?;
    fs::read_to_string(p).map_err(|e| malformed(format!("{}: {e}", p.display())))
}

fn samples(opts: &Options, min: usize) -> Result<Option<usize>> {
    match opts.samples {
        Some(n) if n < min => Err(malformed(format!("--samples must be at least {min}"))),
        n => Ok(n),
    }
}

/// Where the text output of `cmd` goes; `None` means stdout.
pub fn output_file<'a>(cmd: &Command, opts: &'a Options) -> Option<&'a Path> {
    match cmd {
        Command::MannheimGenerate => None,
        _ => opts.output.as_deref(),
    }
}

/// Run one command. The flag says whether everything it checked passed.
pub fn run(cmd: &Command, opts: &Options, env_scale: Option<&str>) -> Result<(Output, bool)> {
    let scale = tol_scale(env_scale)?;
    match cmd {
        Command::Frenet => frenet_table(opts, scale),
        Command::Classify => classify(opts, scale),
        Command::MannheimGenerate => generate(opts, scale),
        Command::MannheimVerify => verify(opts, scale),
        Command::Study => study(opts),
        Command::RuledExport => ruled_export(opts),
        Command::Selftest => selftest(opts, scale),
    }
}

fn curve_spec(opts: &Options) -> Result<CurveSpec> {
    Ok(CurveSpec::from_json(&read_input(opts)?)?)
}

fn frenet_table(opts: &Options, scale: f64) -> Result<(Output, bool)> {
    let tol = tolerances(Tolerances::default(), opts, scale)?;
    let c = curve_spec(opts)?.build()?;
    let grid = c.grid(samples(opts, 1)?.unwrap_or(DEFAULT_SAMPLES));
    let frames = grid
        .par_iter()
        .map(|&t| frenet_with(&c, t, &tol))
        .collect::<dualfrenet::Result<Vec<_>>>()?;
    let a = c.domain().0;
    let mut s = DualScalar::ZERO;
    let mut prev = a;
    let mut out = String::from("t,s,s_du");
    for v in ["t", "n", "b"] {
        for part in ["re", "du"] {
            for axis in ["x", "y", "z"] {
                out.push_str(&format!(",{v}_{part}_{axis}"));
            }
        }
    }
    out.push_str(",kappa_re,kappa_du,tau_re,tau_du\n");
    for (&t, f) in grid.iter().zip(&frames) {
        if t > prev {
            s += dual_arc_length(&c, prev, t)?;
            prev = t;
        }
        let mut row = vec![t, s.re, s.du];
        for v in [&f.t_vec, &f.n_vec, &f.b_vec] {
            row.extend(v.re().iter());
            row.extend(v.du().iter());
        }
        row.extend([f.kappa.re, f.kappa.du, f.tau.re, f.tau.du]);
        // shortest round-trip form, negative zero folded into zero
        let cells: Vec<String> = row.iter().map(|x| format!("{:?}", x + 0.0)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok((Output::Text(out), true))
}

fn classify(opts: &Options, scale: f64) -> Result<(Output, bool)> {
    let tol = tolerances(Tolerances::default(), opts, scale)?;
    let c = curve_spec(opts)?.build()?;
    let line = classify_straight_line(&c, &tol)?;
    let plane = classify_planar(&c, &tol)?;
    let v = json!({
        "straight_line": line.is_line,
        "planar": plane.is_planar,
        "details": { "straight_line": line, "planar": plane },
    });
    Ok((Output::Text(pretty(&v)), true))
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

fn pair_options(base: PairOptions, opts: &Options, scale: f64) -> Result<PairOptions> {
    let mut o = base;
    o.tol = tolerances(base.tol, opts, scale)?;
    if let Some(n) = samples(opts, 1)? {
        o.samples = n;
    }
    Ok(o)
}

fn generate(opts: &Options, scale: f64) -> Result<(Output, bool)> {
    let dir = opts
        .output
        .as_deref()
        .ok_or_else(|| malformed("mannheim-generate needs --output DIR"))?;
    let mut spec = PairSpec::from_json(&read_input(opts)?)?;
    if let Some(h) = opts.step {
        spec.step = positive("--step", h)?;
    }
    let options = pair_options(PairOptions::default(), opts, scale)?;
    let pair = spec.generate(&options)?;
    write_bundle(dir, &pair)?;
    Ok((Output::Done(pretty(&pair.summary())), true))
}

fn verify(opts: &Options, scale: f64) -> Result<(Output, bool)> {
    let bundle = read_bundle(input_path(opts)?)?;
    let options = pair_options(bundle.meta.options, opts, scale)?;
    let check = bundle.check(&options)?;
    let mut report = check.report;
    if let Some(pair) = &check.pair {
        report.extend(verify_theorems(pair)?);
        // the partner ODE is written for the offset measured along ñ
        let lambda = pair.lambda * -pair.sigma;
        report.extend(check_partner_ode(&pair.curve_c1, lambda, &options.tol)?);
        report.pair = Some(pair.summary());
    }
    let ok = check.pair.is_some() && report.pass();
    if !ok {
        eprintln!("PairValidationFailed: {:?}", report.failed());
    }
    Ok((Output::Text(report.to_json() + "\n"), ok))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLine {
    point: [f64; 3],
    direction: [f64; 3],
}

impl RawLine {
    fn line(&self) -> Result<Line3> {
        Ok(Line3::through(self.point.into(), self.direction.into())?)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StudyItem {
    Line(RawLine),
    Dual(DualVec3),
}

impl StudyItem {
    fn as_line(&self) -> Result<Line3> {
        match self {
            StudyItem::Line(l) => l.line(),
            StudyItem::Dual(v) => Ok(dual_to_line(v)?),
        }
    }

    fn as_dual(&self) -> Result<UnitDualVec3> {
        match self {
            StudyItem::Line(l) => Ok(line_to_dual(&l.line()?)?),
            StudyItem::Dual(v) => Ok(UnitDualVec3::new(*v, dualfrenet::vector::UNIT_SPHERE_TOL)?),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StudyInput {
    One(StudyItem),
    Pair([StudyItem; 2]),
}

fn study(opts: &Options) -> Result<(Output, bool)> {
    let input: StudyInput = serde_json::from_str(&read_input(opts)?)
        .map_err(|e| malformed(format!("expected a line, a dual vector, or an array of two: {e}")))?;
    let v = match input {
        StudyInput::One(StudyItem::Line(l)) => serde_json::to_value(line_to_dual(&l.line()?)?),
        StudyInput::One(StudyItem::Dual(d)) => serde_json::to_value(dual_to_line(&d)?),
        StudyInput::Pair([a, b]) => {
            let (la, lb) = (a.as_line()?, b.as_line()?);
            let g = line_pair_geometry(&la, &lb);
            let angle = match dual_angle(&a.as_dual()?, &b.as_dual()?) {
                Ok(th) => json!(th),
                Err(Error::AngleSingularity { .. }) => serde_json::Value::Null,
                Err(e) => return Err(e.into()),
            };
            Ok(json!({ "angle": g.angle, "distance": g.distance, "dual_angle": angle }))
        }
    }
    .expect("value serializes");
    Ok((Output::Text(pretty(&v)), true))
}

fn u_range(opts: &Options) -> Result<Option<(f64, f64)>> {
    match opts.u_range.as_deref() {
        None => Ok(None),
        Some(&[a, b]) if a.is_finite() && b.is_finite() && a < b => Ok(Some((a, b))),
        Some(r) => Err(malformed(format!("--u-range needs finite A < B, got {r:?}"))),
    }
}

fn ruled_export(opts: &Options) -> Result<(Output, bool)> {
    let text = read_input(opts)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| malformed(format!("input JSON: {e}")))?;
    let range = u_range(opts)?;
    let mut patch = if value.get("rulings").is_some() {
        RuledSurfacePatch::from_json(&text)?
    } else {
        let c = CurveSpec::from_json(&text)?.build()?;
        let grid = c.grid(samples(opts, 2)?.unwrap_or(DEFAULT_SAMPLES));
        let (a, b) = range.unwrap_or((DEFAULT_U_RANGE[0], DEFAULT_U_RANGE[1]));
        dual_curve_to_ruled(&c, &grid, (a, b))?
    };
    if let Some((a, b)) = range {
        patch.u_range = [a, b];
    }
    let n_u = opts.u_samples.unwrap_or(DEFAULT_U_SAMPLES);
    let mesh = export_mesh(&patch, n_u)?;
    if mesh.degenerate {
        eprintln!("warning: all rulings coincide; the mesh has zero area");
    }
    Ok((Output::Text(mesh.obj), true))
}

fn selftest(opts: &Options, scale: f64) -> Result<(Output, bool)> {
    let cfg = SelftestConfig {
        seed: opts.seed.unwrap_or(DEFAULT_SEED),
        tol_scale: scale,
    };
    let results = run_all(&cfg);
    let mut out = String::new();
    for r in &results {
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        out.push_str(&format!("{:>2} {verdict} {}: {}\n", r.id, r.title, r.detail));
    }
    let passed = results.iter().filter(|r| r.pass).count();
    out.push_str(&format!("{passed}/{} criteria passed\n", results.len()));
    Ok((Output::Text(out), passed == results.len()))
}
