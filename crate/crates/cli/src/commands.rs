use std::path::PathBuf;

use hyperex::functionals::{
    best_constant, constants_table, linear_grid, log_grid, mass_fraction, monotonicity_scan, Method, SharpConstant,
    SheetCount,
};
use hyperex::geometry::{HyperboloidParams, SpacetimePoint};
use hyperex::measures::{conv_point_oracle, ConvClosedForm, MeasureSpec, Region};
use hyperex::quad::QuadSpec;
use serde_json::{json, Value};

use crate::report::{csv, CsvCell, RunReport};
use crate::CliError;

/// What a command produced: the report, an optional CSV payload, and
/// whether a verification step failed.
pub struct Outcome {
    pub report: RunReport,
    pub csv: Option<String>,
    pub failed: bool,
}

impl Outcome {
    fn ok(report: RunReport) -> Self {
        Outcome { report, csv: None, failed: false }
    }
}

fn constant_json(c: &SharpConstant) -> Value {
    json!({
        "d": c.d,
        "p": c.p,
        "s": c.s,
        "sheet": c.sheet.to_string(),
        "symbolic": c.symbolic,
        "value": c.value,
    })
}

fn constants_csv(rows: &[SharpConstant]) -> String {
    let cells: Vec<Vec<CsvCell>> = rows
        .iter()
        .map(|c| {
            vec![
                CsvCell::Int(c.d as i64),
                CsvCell::Int(c.p as i64),
                CsvCell::Num(c.s),
                CsvCell::Text(c.sheet.to_string()),
                CsvCell::Text(c.symbolic.clone()),
                CsvCell::Num(c.value),
            ]
        })
        .collect();
    csv(&["d", "p", "s", "sheet", "symbolic", "value"], &cells)
}

pub fn constants(d: Option<usize>, p: Option<u32>, s: f64, sheet: SheetCount, seed: u64) -> Result<Outcome, CliError> {
    let mut report = RunReport::new("constants", seed);
    report.input("s", s).input("sheet", sheet.to_string());
    let rows = match (d, p) {
        (Some(d), Some(p)) => {
            report.input("d", d).input("p", p);
            let c = best_constant(d, p, s, sheet)?;
            report.output("symbolic", c.symbolic.clone()).output("value", c.value);
            vec![c]
        }
        (None, None) => {
            let table = constants_table(s)?;
            report.output("constants", table.iter().map(constant_json).collect::<Vec<_>>());
            table
        }
        _ => return Err(CliError::Usage("--d and --p must be given together".into())),
    };
    Ok(Outcome { csv: Some(constants_csv(&rows)), ..Outcome::ok(report) })
}

pub struct CurveArgs {
    pub d: usize,
    pub p: u32,
    pub s: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub points: usize,
    pub log_spacing: bool,
    pub method: Option<Method>,
    pub out: Option<PathBuf>,
}

pub fn curve(args: &CurveArgs, seed: u64) -> Result<Outcome, CliError> {
    let CurveArgs { d, p, s, a_min, a_max, points, log_spacing, .. } = *args;
    if !(a_min > 0.0 && a_min < a_max && a_max.is_finite()) {
        return Err(CliError::Usage(format!("need 0 < a-min < a-max, got [{a_min}, {a_max}]")));
    }
    if points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let limit = best_constant(d, p, s, SheetCount::One)?.value;
    let method = match args.method {
        Some(Method::Closed) if d == 3 => {
            return Err(CliError::Usage("no closed form is available for (3, 4); use --method quadrature".into()))
        }
        Some(m) => m,
        None if d == 3 => Method::Quadrature,
        None => Method::Closed,
    };
    let grid = if log_spacing { log_grid(a_min, a_max, points) } else { linear_grid(a_min, a_max, points) };
    let scan = monotonicity_scan(d, p, s, &grid, method, &QuadSpec::default())?;

    let mut report = RunReport::new("curve", seed);
    report
        .input("d", d)
        .input("p", p)
        .input("s", s)
        .input("a_min", a_min)
        .input("a_max", a_max)
        .input("points", points)
        .input("log_spacing", log_spacing)
        .input("method", method.to_string());
    if let Some(path) = &args.out {
        report.input("out", path.display().to_string());
    }
    let rows: Vec<Value> = scan
        .points
        .iter()
        .map(|pt| json!({ "a": pt.a, "q_value": pt.q_value, "limit_value": limit, "ratio": pt.q_value / limit }))
        .collect();
    let max_error = scan.points.iter().map(|pt| pt.error).fold(0.0, f64::max);
    report
        .output("limit_value", limit)
        .output("trend", scan.trend.to_string())
        .output("strictly_monotone", scan.strict)
        .output("below_limit", scan.points.iter().all(|pt| pt.q_value < limit))
        .output("points", rows)
        .error_estimate("q_value_max", max_error);
    let cells: Vec<Vec<CsvCell>> = scan
        .points
        .iter()
        .map(|pt| {
            vec![CsvCell::Num(pt.a), CsvCell::Num(pt.q_value), CsvCell::Num(limit), CsvCell::Num(pt.q_value / limit)]
        })
        .collect();
    Ok(Outcome { csv: Some(csv(&["a", "q_value", "limit_value", "ratio"], &cells)), ..Outcome::ok(report) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvMethod {
    Closed,
    Oracle,
}

pub fn conv(
    d: usize,
    n: usize,
    s: f64,
    xi: &str,
    tau: f64,
    method: ConvMethod,
    seed: u64,
) -> Result<Outcome, CliError> {
    let coords = xi
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(format!("cannot parse --xi '{xi}': {e}")))?;
    if coords.len() != d {
        return Err(CliError::Usage(format!("--xi has {} components, expected {d}", coords.len())));
    }
    if !tau.is_finite() || coords.iter().any(|c| !c.is_finite()) {
        return Err(CliError::Usage("point coordinates must be finite".into()));
    }
    let form = ConvClosedForm::new(d, n, s)?;
    if method == ConvMethod::Oracle && n != 2 {
        return Err(CliError::Usage(format!("the pointwise oracle covers n = 2 only, got n = {n}")));
    }
    let p = SpacetimePoint::new(coords.clone(), tau);
    let region = form.region(&p);
    let closed = form.eval(&p);

    let mut report = RunReport::new("conv", seed);
    report
        .input("d", d)
        .input("n", n)
        .input("s", s)
        .input("xi", coords)
        .input("tau", tau)
        .input("method", if method == ConvMethod::Closed { "closed" } else { "oracle" });
    report.output(
        "region",
        match region {
            Region::Interior => "interior",
            Region::Boundary => "boundary",
            Region::Outside => "outside",
        },
    );
    let mut warning = region == Region::Boundary;
    match (method, region) {
        (_, Region::Outside) => {
            report.output("value", 0.0).output("note", "outside-support");
        }
        (ConvMethod::Closed, _) => {
            report.output("value", closed);
        }
        (ConvMethod::Oracle, _) => {
            let spec = MeasureSpec::upper(HyperboloidParams::new(d, s)?);
            let oracle = conv_point_oracle(&spec, n, &p, &QuadSpec::default())?;
            warning |= oracle.ill_conditioned;
            report
                .output("value", oracle.value)
                .output("closed_value", closed)
                .output("abs_difference", (oracle.value - closed).abs())
                .error_estimate("value", oracle.error);
        }
    }
    report.output("boundary_warning", warning);
    Ok(Outcome::ok(report))
}

pub fn concentrate(d: usize, s: f64, a: f64, radius: f64, seed: u64) -> Result<Outcome, CliError> {
    if !(s > 0.0 && a > 0.0 && radius > 0.0) || !(s.is_finite() && a.is_finite() && radius.is_finite()) {
        return Err(CliError::Usage("--s, --a and --radius must be positive".into()));
    }
    let fraction = mass_fraction(d, s, a, radius)?;
    let mut report = RunReport::new("concentrate", seed);
    report.input("d", d).input("s", s).input("a", a).input("radius", radius);
    report
        .output("mass_fraction", fraction)
        .output("escaped_fraction", 1.0 - fraction)
        .output("regime", if fraction >= 0.5 { "vertex" } else { "spatial-infinity" });
    Ok(Outcome::ok(report))
}
