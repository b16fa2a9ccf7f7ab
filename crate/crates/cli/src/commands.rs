//! The subcommands. Inputs are parsed and validated in full before any
//! kernel is evaluated; rows are computed in parallel and kept in grid order.

use std::f64::consts::TAU;

use adsheat::kernels::{self, AdsKernelQuery, MaassKernelQuery};
use adsheat::radial_heat::hyperbolic_heat_kernel;
use adsheat::special::{self, ChebyshevOrder};
use adsheat::{verify, BallPoint, FiberAngle, HalfInteger, QuadratureConfig, SeriesConfig};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::json;

use crate::output::{Cell, Row, Table};
use crate::{params, Artifact, CliError, Normalization, Settings};

fn times(s: &Settings) -> Result<Vec<f64>, CliError> {
    let ts = s.list("t", Some(&[1.0]))?;
    if let Some(bad) = ts.iter().find(|&&t| !(t > 0.0)) {
        return Err(CliError::Usage(format!("--t: time {bad} must be positive")));
    }
    Ok(ts)
}

fn dims(s: &Settings) -> Result<Vec<u32>, CliError> {
    let ns = match s.raw("n") {
        Some(text) => params::parse_int_list("n", text)?,
        None => vec![1],
    };
    ns.into_iter()
        .map(|n| {
            u32::try_from(n)
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| CliError::Usage(format!("--n: dimension {n} must be at least 1")))
        })
        .collect()
}

fn kappas(s: &Settings) -> Result<Vec<HalfInteger>, CliError> {
    s.list("kappa", Some(&[0.0]))?
        .into_iter()
        .map(|k| {
            HalfInteger::from_f64(k)
                .map_err(|_| CliError::Usage(format!("--kappa: {k} is not a half-integer")))
        })
        .collect()
}

fn nonnegative(key: &str, values: Vec<f64>) -> Result<Vec<f64>, CliError> {
    if let Some(bad) = values.iter().find(|&&v| !(v >= 0.0)) {
        return Err(CliError::Usage(format!("--{key}: {bad} must be nonnegative")));
    }
    Ok(values)
}

/// `--w` / `--y` when either is present; the missing one is the origin.
fn points(s: &Settings) -> Result<Option<(BallPoint, BallPoint)>, CliError> {
    let parse = |key: &str| -> Result<Option<BallPoint>, CliError> {
        s.raw(key)
            .map(|text| {
                BallPoint::new(params::parse_point(key, text)?)
                    .map_err(|e| CliError::Usage(format!("--{key}: {e}")))
            })
            .transpose()
    };
    let (w, y) = match (parse("w")?, parse("y")?) {
        (None, None) => return Ok(None),
        (Some(w), None) => {
            let y = BallPoint::origin(w.dim())?;
            (w, y)
        }
        (None, Some(y)) => (BallPoint::origin(y.dim())?, y),
        (Some(w), Some(y)) => (w, y),
    };
    if w.dim() != y.dim() {
        return Err(CliError::Usage(format!(
            "--w has {} coordinates but --y has {}",
            w.dim(),
            y.dim()
        )));
    }
    if s.raw("d").is_some() || s.raw("grid").is_some() {
        return Err(CliError::Usage("give either --w/--y or --d, not both".into()));
    }
    if let Some(text) = s.raw("n") {
        if params::parse_int_list("n", text)? != vec![w.dim() as i64] {
            return Err(CliError::Usage(format!(
                "--n must match the {} coordinates of the points",
                w.dim()
            )));
        }
    }
    Ok(Some((w, y)))
}

fn is_origin(p: &BallPoint) -> bool {
    p.norm_sqr() == 0.0
}

fn run_rows<T, F>(inputs: &[T], f: F) -> Vec<Row>
where
    T: Sync,
    F: Fn(&T) -> Result<Vec<Cell>, adsheat::Error> + Sync,
{
    inputs.par_iter().map(|i| f(i).map_err(|e| e.to_string())).collect()
}

pub fn eval_hyperbolic(s: &Settings) -> Result<Table, CliError> {
    let ts = times(s)?;
    let ns = dims(s)?;
    let xs = nonnegative("x", s.swept("x", None)?)?;
    let mut inputs = Vec::new();
    for &t in &ts {
        for &n in &ns {
            for &x in &xs {
                inputs.push((t, n, x));
            }
        }
    }
    let rows = run_rows(&inputs, |&(t, n, x)| {
        let q = hyperbolic_heat_kernel(t, n, x)?;
        Ok(vec![Cell::Float(t), Cell::Int(n.into()), Cell::Float(x), Cell::Float(q)])
    });
    Ok(Table {
        command: "eval-hyperbolic",
        header: vec!["t", "n", "x", "q"],
        inputs: inputs
            .iter()
            .map(|&(t, n, x)| vec![Cell::Float(t), Cell::Int(n.into()), Cell::Float(x)])
            .collect(),
        rows,
    })
}

enum Geometry {
    Radial { n: u32, d: f64 },
    Points { w: BallPoint, y: BallPoint, d: f64 },
}

impl Geometry {
    fn n(&self) -> u32 {
        match self {
            Geometry::Radial { n, .. } => *n,
            Geometry::Points { w, .. } => w.dim() as u32,
        }
    }

    fn d(&self) -> f64 {
        match self {
            Geometry::Radial { d, .. } | Geometry::Points { d, .. } => *d,
        }
    }

    /// `(w, y)`, with `w` the origin in the radial case.
    fn pair(&self) -> Result<(BallPoint, BallPoint), adsheat::Error> {
        match self {
            Geometry::Radial { n, d } => Ok((
                BallPoint::origin(*n as usize)?,
                BallPoint::at_distance_from_origin(*n as usize, *d)?,
            )),
            Geometry::Points { w, y, .. } => Ok((w.clone(), y.clone())),
        }
    }
}

fn geometries(s: &Settings) -> Result<Vec<Geometry>, CliError> {
    if let Some((w, y)) = points(s)? {
        let d = adsheat::geometry::hyperbolic_distance(&w, &y)?;
        return Ok(vec![Geometry::Points { w, y, d }]);
    }
    let ns = dims(s)?;
    let ds = nonnegative("d", s.swept("d", Some(&[0.0]))?)?;
    let mut out = Vec::new();
    for &n in &ns {
        for &d in &ds {
            out.push(Geometry::Radial { n, d });
        }
    }
    Ok(out)
}

pub fn eval_maass(s: &Settings) -> Result<Table, CliError> {
    let ts = times(s)?;
    let ks = kappas(s)?;
    let geos = geometries(s)?;
    let cfg = s.quadrature()?;
    let mut inputs = Vec::new();
    for &t in &ts {
        for g in &geos {
            for &k in &ks {
                inputs.push((t, g, k));
            }
        }
    }
    let rows = run_rows(&inputs, |&(t, g, k)| {
        let (v, direct) = maass_pair(t, g, k, &cfg)?;
        Ok(vec![
            Cell::Float(t),
            Cell::Int(g.n().into()),
            Cell::Float(k.value()),
            Cell::Float(g.d()),
            Cell::Float(v.re),
            Cell::Float(v.im),
            Cell::Text("substituted".into()),
            Cell::Float((v - direct).norm()),
        ])
    });
    Ok(Table {
        command: "eval-maass",
        header: vec!["t", "n", "kappa", "d", "re_v", "im_v", "route", "route_discrepancy"],
        inputs: inputs
            .iter()
            .map(|&(t, g, k)| {
                vec![
                    Cell::Float(t),
                    Cell::Int(g.n().into()),
                    Cell::Float(k.value()),
                    Cell::Float(g.d()),
                ]
            })
            .collect(),
        rows,
    })
}

fn maass_pair(
    t: f64,
    g: &Geometry,
    k: HalfInteger,
    cfg: &QuadratureConfig,
) -> Result<(Complex64, Complex64), adsheat::Error> {
    match g {
        Geometry::Radial { n, d } => {
            let v = kernels::maass_kernel_radial(t, *n, k, *d, cfg)?;
            let direct = kernels::maass_kernel_radial_direct(t, *n, k, *d, cfg)?;
            Ok((Complex64::new(v, 0.0), Complex64::new(direct, 0.0)))
        }
        Geometry::Points { w, y, .. } => {
            let q = MaassKernelQuery::new(t, w.dim() as u32, k, w.clone(), y.clone())?;
            Ok((
                kernels::maass_kernel_substituted(&q, cfg)?,
                kernels::maass_kernel_direct(&q, cfg)?,
            ))
        }
    }
}

pub fn eval_ads(s: &Settings) -> Result<Table, CliError> {
    let ts = times(s)?;
    let thetas = s.list("theta", Some(&[0.0]))?;
    let geos = geometries(s)?;
    let cfg = s.quadrature()?;
    let s_cfg = s.series()?;
    let scale = match s.normalization()? {
        Normalization::Series => 1.0,
        Normalization::Theorem => 1.0 / TAU,
    };
    let mut inputs = Vec::new();
    for &t in &ts {
        for g in &geos {
            for &theta in &thetas {
                inputs.push((t, g, theta));
            }
        }
    }
    let rows = run_rows(&inputs, |&(t, g, theta)| {
        let angle = FiberAngle::new(theta)?;
        let (w, y) = g.pair()?;
        let at_origin = is_origin(&w);
        let q = AdsKernelQuery::new(t, g.n(), w, y, angle)?;
        let series = kernels::ads_kernel_series_detailed(&q, &s_cfg, &cfg)?;
        // the integral route is stated with the first point at the origin
        let discrepancy = if at_origin {
            let integral = kernels::ads_kernel_integral(t, g.n(), g.d(), angle, &s_cfg, &cfg)?;
            Cell::Float((integral - series.value / TAU).norm())
        } else {
            Cell::Empty
        };
        let value = series.value * scale;
        Ok(vec![
            Cell::Float(t),
            Cell::Int(g.n().into()),
            Cell::Float(g.d()),
            Cell::Float(theta),
            Cell::Float(value.re),
            Cell::Float(value.im),
            Cell::Int(2 * i64::from(series.k_max) + 1),
            discrepancy,
        ])
    });
    Ok(Table {
        command: "eval-ads",
        header: vec![
            "t",
            "n",
            "d",
            "theta",
            "re_s",
            "im_s",
            "series_terms_used",
            "route_discrepancy",
        ],
        inputs: inputs
            .iter()
            .map(|&(t, g, theta)| {
                vec![
                    Cell::Float(t),
                    Cell::Int(g.n().into()),
                    Cell::Float(g.d()),
                    Cell::Float(theta),
                ]
            })
            .collect(),
        rows,
    })
}

pub fn identity(s: &Settings) -> Result<Table, CliError> {
    let ts = times(s)?;
    let us = s.swept("u", Some(&[0.0]))?;
    let thetas = s.list("theta", Some(&[0.0]))?;
    let orders = match s.raw("m") {
        Some(text) => params::parse_int_list("m", text)?,
        None => (0..=12).collect(),
    };
    let orders: Vec<u32> = orders
        .into_iter()
        .map(|m| u32::try_from(m).map_err(|_| CliError::Usage(format!("--m: order {m} must be nonnegative"))))
        .collect::<Result<_, _>>()?;
    let k_max = s.scalar::<u32>("k-max")?.unwrap_or(30);

    let mut header_rows: Vec<(Vec<Cell>, Complex64, Complex64)> = Vec::new();
    for &t in &ts {
        for &u in &us {
            for &theta in &thetas {
                let lhs = kernels::theta_identity_lhs(t, u, theta, k_max);
                let rhs = kernels::theta_identity_rhs(t, u, theta, k_max);
                header_rows.push((
                    vec![
                        Cell::Text("theta".into()),
                        Cell::Empty,
                        Cell::Float(t),
                        Cell::Float(u),
                        Cell::Float(theta),
                    ],
                    lhs,
                    rhs,
                ));
            }
        }
    }
    for &m in &orders {
        for &u in &us {
            let lhs = special::gauss_2f1_terminating(ChebyshevOrder(m), (1.0 - u.cosh()) / 2.0);
            let rhs = (f64::from(m) * u).cosh();
            header_rows.push((
                vec![
                    Cell::Text("hypergeometric".into()),
                    Cell::Int(m.into()),
                    Cell::Empty,
                    Cell::Float(u),
                    Cell::Empty,
                ],
                Complex64::new(lhs, 0.0),
                Complex64::new(rhs, 0.0),
            ));
        }
    }
    let inputs: Vec<Vec<Cell>> = header_rows.iter().map(|r| r.0.clone()).collect();
    let rows = header_rows
        .into_iter()
        .map(|(mut cells, lhs, rhs)| {
            cells.extend([
                Cell::Float(lhs.re),
                Cell::Float(lhs.im),
                Cell::Float(rhs.re),
                Cell::Float(rhs.im),
                Cell::Float((lhs - rhs).norm()),
            ]);
            Ok(cells)
        })
        .collect();
    Ok(Table {
        command: "identity",
        header: vec![
            "identity",
            "m",
            "t",
            "u",
            "theta",
            "lhs_re",
            "lhs_im",
            "rhs_re",
            "rhs_im",
            "abs_difference",
        ],
        inputs,
        rows,
    })
}

pub fn verify(s: &Settings) -> Result<Artifact, CliError> {
    let suite = s.raw("suite").unwrap_or("all").to_string();
    if !verify::SUITES.contains(&suite.as_str()) {
        return Err(CliError::Usage(format!(
            "--suite: unknown suite '{suite}', expected one of {}",
            verify::SUITES.join(", ")
        )));
    }
    let seed = s.scalar::<u64>("seed")?.unwrap_or(42);
    let cfg = s.quadrature()?;
    let s_cfg: SeriesConfig = s.series()?;
    let outcomes = verify::run_suite(&suite, seed, &cfg, &s_cfg)?;
    let passed = outcomes.iter().all(|o| o.passed);
    let csv = Table {
        command: "verify",
        header: vec!["name", "passed", "threshold", "max_abs_residual", "max_rel_residual"],
        inputs: outcomes.iter().map(|o| vec![Cell::Text(o.name.clone())]).collect(),
        rows: outcomes
            .iter()
            .map(|o| {
                let opt = |v: Option<f64>| v.map_or(Cell::Empty, Cell::Float);
                Ok(vec![
                    Cell::Text(o.name.clone()),
                    Cell::Text(o.passed.to_string()),
                    Cell::Float(o.threshold),
                    opt(o.max_abs_residual),
                    opt(o.max_rel_residual),
                ])
            })
            .collect(),
    };
    let json = json!({
        "suite": suite,
        "seed": seed,
        "passed": passed,
        "checks": outcomes,
    });
    Ok(Artifact::Report { json, csv, passed })
}
