//! Subcommand implementations. Each returns the process exit code.

use crate::config::{DataSource, QuerySource, RunConfig};
use crate::failure::Failure;
use holecov::field::{regular_grid, DEFAULT_ANGLE_TOL};
use holecov::inference::{default_radius, domain_diameter, ObjectiveKind};
use holecov::kriging::KrigingSystem;
use holecov::models::FamilyTraits;
use holecov::rng::NormalStream;
use holecov::transforms::covariance_grid;
use holecov::{
    empirical_variogram, fit, split_sample_validate, Component, CovarianceModel, FitOptions, GaussianSimulator,
    IsotropicFamily, ModelKind, Objective, PairSet, SpatialDataset, Status,
};
use serde_json::{json, Map, Value};
use std::fs::File;
use std::io::{self, BufWriter, Write};

type Outcome = Result<i32, Failure>;

fn sink(cfg: &RunConfig) -> Result<Box<dyn Write>, Failure> {
    Ok(match &cfg.output {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
            }
            let f = File::create(p).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(io::stdout().lock()),
    })
}

/// Writes `{"config": ..., <payload fields>}`.
fn write_json(cfg: &RunConfig, payload: Value) -> Result<(), Failure> {
    let mut doc = Map::new();
    doc.insert("config".into(), cfg.to_json());
    if let Value::Object(fields) = payload {
        doc.extend(fields);
    }
    let mut out = sink(cfg)?;
    serde_json::to_writer_pretty(&mut out, &Value::Object(doc)).map_err(|e| Failure::input(e.to_string()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Writes a `# config: {...}` line followed by the CSV table.
fn write_csv(cfg: &RunConfig, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<(), Failure> {
    let mut out = sink(cfg)?;
    writeln!(out, "# config: {}", cfg.to_json())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn load_data(cfg: &RunConfig) -> Result<SpatialDataset, Failure> {
    let DataSource { path, x, y, value } = cfg.data.as_ref().ok_or_else(|| Failure::input("no data given"))?;
    Ok(SpatialDataset::load_csv(path, x, y, value)?)
}

/// Radial families of a model with the dimension each is used in.
fn families(model: &CovarianceModel) -> Vec<(IsotropicFamily, usize)> {
    let d = model.dim();
    match model.kind() {
        ModelKind::T1 { family, .. } | ModelKind::T2 { family, .. } | ModelKind::GeometricAniso { family, .. } => {
            vec![(*family, d)]
        }
        ModelKind::T3 { phi1, phi2, .. } => {
            let mut out = match phi1 {
                Component::Family(f) => vec![(*f, d)],
                Component::Model(m) => families(m),
            };
            out.push((*phi2, d));
            out
        }
        ModelKind::AxisProduct { phi1, phi2, .. } => vec![(*phi1, d), (*phi2, 1)],
        ModelKind::Scaled { base, .. } | ModelKind::OnAxis { base, .. } => families(base),
        ModelKind::Product { factors } => factors.iter().flat_map(families).collect(),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn check(cfg: &mut RunConfig) -> Outcome {
    let model = cfg.resolve_model()?;
    let cert = model.certificate().clone();
    println!("status: {}", cert.status);
    if let Some(q) = &cert.inequality {
        println!("binding inequality: {}", q.text);
        println!("condition: {}", q.condition);
        println!("evaluated: lhs = {}, rhs = {}", q.lhs, q.rhs);
    }
    for n in &cert.notes {
        println!("note: {n}");
    }
    let fams = families(&model);
    let mut traits = Vec::new();
    for (f, d) in &fams {
        let t: FamilyTraits = f.traits(*d);
        println!(
            "family {f} in R^{d}: twice differentiable at 0: {}; spectral density: {}; nonincreasing spectral density: {}",
            yes_no(t.twice_differentiable_at_origin),
            yes_no(t.has_spectral_density),
            yes_no(t.spectral_density_nonincreasing)
        );
        traits.push(json!({ "family": f, "dim": d, "traits": t }));
    }
    if cfg.output.is_some() {
        write_json(cfg, json!({ "certificate": cert, "families": traits }))?;
    }
    Ok(match cert.status {
        Status::Proved | Status::Numeric => 0,
        Status::Failed => 2,
        Status::Unchecked => 3,
    })
}

pub fn grid(cfg: &mut RunConfig) -> Outcome {
    let model = cfg.resolve_model()?;
    model.require_certified(cfg.allow_uncertified)?;
    let spec = cfg.grid.clone().ok_or_else(|| Failure::input("no grid given"))?;
    spec.validate()?;
    let [n1, n2] = spec.resolution;
    let g = covariance_grid(&model, spec.extent, n1, n2, spec.normalize)?;
    let [m1, m2] = g.argmin();
    eprintln!("C(0) = {}; min {} at ({m1}, {m2}); max {}", g.variance, g.min(), g.max());
    let rows = (0..n1 * n2).map(|k| vec![g.h1[k % n1], g.h2[k / n1], g.values[k]]);
    write_csv(cfg, &["h1", "h2", "C"], rows)?;
    Ok(0)
}

fn holdout_indices(cfg: &mut RunConfig, n: usize) -> Result<Vec<usize>, Failure> {
    let run_seed = cfg.seed;
    let h = cfg.holdout.as_mut().ok_or_else(|| Failure::input("no holdout given"))?;
    match (&h.indices, h.fraction) {
        (Some(ix), None) => Ok(ix.clone()),
        (None, Some(f)) => {
            if !(0.0..=1.0).contains(&f) {
                return Err(Failure::input(format!("holdout fraction {f} must lie in [0, 1]")));
            }
            let seed = *h.seed.get_or_insert(run_seed);
            let k = (f * n as f64).round() as usize;
            Ok(NormalStream::new(seed).sample_indices(n, k))
        }
        _ => Err(Failure::input("holdout needs exactly one of 'indices' or 'fraction'")),
    }
}

pub fn fit_cmd(cfg: &mut RunConfig) -> Outcome {
    let mut data = load_data(cfg)?;
    if cfg.holdout.is_some() {
        let held = holdout_indices(cfg, data.len())?;
        let train: Vec<usize> = (0..data.len()).filter(|i| !held.contains(i)).collect();
        data = data.subset(&train)?;
    }
    let spec = cfg.fit.as_mut().ok_or_else(|| Failure::input("no fit section given"))?;
    let init = spec.template.parameters(&spec.init)?;
    let defaults = FitOptions::default();
    let opts = FitOptions {
        max_evals: *spec.max_evals.get_or_insert(defaults.max_evals),
        restarts: *spec.restarts.get_or_insert(defaults.restarts),
        ..defaults
    };
    let pairs;
    let variograms;
    let (objective, observations) = match spec.objective {
        ObjectiveKind::Cl => {
            let radius = *spec.radius.get_or_insert_with(|| default_radius(&data));
            pairs = PairSet::new(&data, radius)?;
            (Objective::CompositeLikelihood(&pairs), pairs.n_pairs())
        }
        ObjectiveKind::Wls => {
            let max_lag = *spec.max_lag.get_or_insert_with(|| domain_diameter(&data) / 2.0);
            let width = *spec.lag_width.get_or_insert(max_lag / 10.0);
            variograms = spec
                .directions
                .iter()
                .map(|dir| empirical_variogram(&data, dir, DEFAULT_ANGLE_TOL, width, max_lag))
                .collect::<holecov::Result<Vec<_>>>()?;
            let bins = variograms.iter().map(|v| v.lag_centers.len()).sum();
            (Objective::LeastSquares(&variograms), bins)
        }
    };
    let result = fit(objective, &spec.template, &init, &opts)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let model = serde_json::to_value(&result.model).map_err(|e| Failure::numerical(e.to_string()))?;
    let under_determined = observations <= init.len();
    write_json(cfg, json!({ "result": result, "model": model }))?;
    if under_determined || !result.converged {
        eprintln!(
            "fit is not usable: {}",
            if under_determined { "too few observations for the parameters" } else { "optimizer did not converge" }
        );
        return Ok(2);
    }
    Ok(0)
}

fn load_queries(source: &QuerySource) -> Result<Vec<Vec<f64>>, Failure> {
    match source {
        QuerySource::Grid(g) => {
            g.validate()?;
            Ok(g.points())
        }
        QuerySource::Points { path, x, y } => {
            let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_path(path)?;
            let headers = rdr.headers()?.clone();
            let col = |name: &str| {
                headers
                    .iter()
                    .position(|h| h == name)
                    .ok_or_else(|| Failure::input(format!("{}: missing column '{name}'", path.display())))
            };
            let (ix, iy) = (col(x)?, col(y)?);
            let mut pts = Vec::new();
            for rec in rdr.records() {
                let rec = rec?;
                let line = rec.position().map_or(0, |p| p.line());
                let num = |i: usize| {
                    rec.get(i).and_then(|s| s.parse::<f64>().ok()).filter(|v| v.is_finite()).ok_or_else(|| {
                        Failure::input(format!("{}: line {line}: expected a finite number", path.display()))
                    })
                };
                pts.push(vec![num(ix)?, num(iy)?]);
            }
            if pts.is_empty() {
                return Err(Failure::input(format!("{}: no query points", path.display())));
            }
            Ok(pts)
        }
    }
}

pub fn krige(cfg: &mut RunConfig) -> Outcome {
    let model = cfg.resolve_model()?;
    let data = load_data(cfg)?;
    let queries = load_queries(cfg.queries.as_ref().ok_or_else(|| Failure::input("no queries given"))?)?;
    let system = KrigingSystem::new(&model, data.locations(), cfg.allow_uncertified)?;
    let r = system.predict(data.residuals(), &queries)?;
    let s = r.solver_report;
    eprintln!("jitter {:e}; condition estimate {:e}", s.jitter, s.condition_estimate);
    let rows = queries.iter().enumerate().map(|(k, q)| vec![q[0], q[1], r.predictions[k], r.kriging_variances[k]]);
    write_csv(cfg, &["x", "y", "prediction", "variance"], rows)?;
    Ok(0)
}

pub fn cv(cfg: &mut RunConfig) -> Outcome {
    let model = cfg.resolve_model()?;
    let data = load_data(cfg)?;
    let held = holdout_indices(cfg, data.len())?;
    let report = split_sample_validate(&model, &data, &held)?;
    eprintln!("RMSE {}; MAE {}; {} held out", report.rmse, report.mae, report.n_holdout);
    write_json(cfg, json!({ "holdout": held, "report": report }))?;
    Ok(0)
}

pub fn simulate(cfg: &mut RunConfig) -> Outcome {
    let model = cfg.resolve_model()?;
    let points = match (&cfg.lattice, &cfg.data) {
        (Some(l), _) => {
            if l.nx == 0 || l.ny == 0 || !(l.spacing > 0.0) {
                return Err(Failure::input("lattice needs nx, ny >= 1 and spacing > 0"));
            }
            regular_grid(l.nx, l.ny, l.spacing)
        }
        (None, Some(_)) => load_data(cfg)?.locations().to_vec(),
        (None, None) => return Err(Failure::input("no lattice or data locations given")),
    };
    if model.dim() != 2 {
        return Err(Failure::input(format!("simulation needs a planar model, got dimension {}", model.dim())));
    }
    let values = GaussianSimulator::new(&model, &points)?.sample(cfg.seed);
    let rows = points.iter().zip(&values).map(|(p, v)| vec![p[0], p[1], *v]);
    write_csv(cfg, &["x", "y", "value"], rows)?;
    Ok(0)
}
