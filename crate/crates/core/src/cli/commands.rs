use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::io::{self, csv_line, fmt_num, Config, Output};
use super::{
    Cli, CliError, Command, DecomposeArgs, Demo, DistanceArgs, DistanceKind, EuclidArgs, FieldKind,
    FirstvarArgs, Format, GeodesicArgs, MonotonicityArgs, PcaArgs, EXIT_NUMERICAL, EXIT_OK,
};
use crate::distances;
use crate::flagcore::{self, CovMatrix, FlagRep, FlagRepJson, WeightVector};
use crate::geodesic::{self, GeodesicState, ShootConfig, Termination};
use crate::linalg;
use crate::measures::{self, samples, Affine, Bump, FlagAtomJson, Kernel, PointCloudFlagfold, Radial, VectorField};
use crate::riemann::{pinch_by_name, PinchedMetric, SkewConvention};

pub(super) fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    let out = Output::new(cli.out.clone());
    match &cli.command {
        Command::Geodesic(a) => geodesic_cmd(cli, a, out),
        Command::Decompose(a) => decompose_cmd(cli, a, out),
        Command::Distance(a) => distance_cmd(cli, a, out),
        Command::Pca(a) => pca_cmd(cli, a, out),
        Command::Firstvar(a) => firstvar_cmd(cli, a, out),
        Command::Monotonicity(a) => monotonicity_cmd(cli, a, out),
        Command::EuclidGeodesic(a) => euclid_cmd(cli, a, out),
    }
}

fn format_or(cli: &Cli, default: Format) -> Format {
    cli.format.unwrap_or(default)
}

fn header(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|k| format!("{prefix}_{k}")).collect()
}

fn frame_header(n: usize) -> Vec<String> {
    let mut h = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            h.push(format!("U_{i}{j}"));
        }
    }
    h
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    linalg::matrix_to_rows(m)
}

fn geodesic_cmd(cli: &Cli, a: &GeodesicArgs, mut out: Output) -> Result<i32, CliError> {
    let cfg = Config::load(a.config.as_deref())?;
    let mu0 = cfg.vec(a.mu0.clone(), "mu0")?.ok_or_else(|| CliError::Input("mu0 is required".into()))?;
    let n = mu0.len();
    if let Some(declared) = cfg.usize(a.n, "n")? {
        if declared != n {
            return Err(CliError::Input(format!("n = {declared} but mu0 has {n} entries")));
        }
    }
    if n < 2 {
        return Err(CliError::Input("geodesics need n ≥ 2".into()));
    }
    let mu_dot0 = cfg
        .vec(a.mu_dot0.clone(), "mu_dot0")?
        .ok_or_else(|| CliError::Input("mu_dot0 is required".into()))?;
    let u0 = cfg.matrix(a.u0.clone(), "U0")?.unwrap_or_else(|| DMatrix::identity(n, n));
    let b0 = cfg.vec(a.b0.clone(), "B0")?.unwrap_or_else(|| vec![0.0; n * (n - 1) / 2]);
    let h = cfg.f64(a.h, "h")?.unwrap_or(1e-3);
    let steps = cfg.usize(a.steps, "N")?.unwrap_or(10_000);
    let mu_min = cfg.f64(a.mu_min, "mu_min")?.unwrap_or(geodesic::MU_MIN);
    let singular_tol = cfg.f64(a.singular_tol, "singular_tol")?.unwrap_or(geodesic::SINGULAR_TOL);
    let pinch = pinch_by_name(&cfg.string(a.pinch.clone(), "pinch")?.unwrap_or_else(|| "quarter-norm".into()))?;
    let convention = SkewConvention::by_name(&cfg.string(a.convention.clone(), "convention")?.unwrap_or_else(|| "frobenius".into()))?;
    if a.every == 0 {
        return Err(CliError::Input("--every must be at least 1".into()));
    }
    let metric = PinchedMetric::new(pinch, convention);
    let init = GeodesicState::initial_upper(&metric, WeightVector::new(mu0)?, mu_dot0, u0, &b0)?;
    let shoot_cfg = ShootConfig { h, max_steps: steps, mu_min, singular_tol };
    let traj = geodesic::shoot(&metric, &init, &shoot_cfg)?;
    let angles = geodesic::frame_angles(&traj.states)?;

    let last = traj.states.len() - 1;
    let keep: Vec<usize> = (0..traj.states.len()).filter(|&p| p % a.every == 0 || p == last).collect();
    match format_or(cli, Format::Csv) {
        Format::Csv => {
            let mut cols = vec!["t".to_string()];
            cols.extend(header("mu", n));
            cols.extend(header("lambda", n));
            cols.extend(frame_header(n));
            cols.push("theta1".into());
            cols.push("theta2".into());
            out.line(&cols.join(","));
            for &p in &keep {
                let s = &traj.states[p];
                let mut vals = vec![s.t];
                vals.extend(s.mu.iter());
                vals.extend(s.lambda().iter());
                vals.extend(linalg::row_major(&s.frame));
                vals.push(angles[p].0);
                vals.push(angles[p].1);
                out.line(&csv_line(vals));
            }
        }
        Format::Json => {
            let arr: Vec<Value> = keep
                .iter()
                .map(|&p| {
                    let s = &traj.states[p];
                    json!({
                        "t": s.t,
                        "mu": s.mu.as_slice(),
                        "lambda": s.lambda().as_slice(),
                        "U": rows(&s.frame),
                        "theta1": angles[p].0,
                        "theta2": angles[p].1,
                    })
                })
                .collect();
            out.json(&Value::Array(arr))?;
        }
    }

    if let Some(path) = &a.ellipsoids {
        let ell = geodesic::ellipsoid_frames(&traj)?;
        let arr: Vec<&geodesic::Ellipsoid> = keep.iter().map(|&p| &ell[p]).collect();
        io::write_json_file(path, &serde_json::to_value(arr).map_err(|e| CliError::Internal(e.to_string()))?)?;
    }

    let mut meta = json!({
        "termination": traj.termination.name(),
        "steps": last,
        "t_final": traj.last().t,
        "h": h,
        "convention": convention.name(),
        "pinch": metric.pinch().name(),
        "momentum_drift": traj.momentum_drift(&metric),
    });
    match &traj.termination {
        Termination::BoundaryHit { index } => meta["boundary_index"] = json!(index + 1),
        Termination::StepFailure(msg) => meta["detail"] = json!(msg),
        Termination::HorizonReached => {}
    }
    eprintln!("{meta}");
    if let Some(p) = out.path() {
        let mut side = p.as_os_str().to_owned();
        side.push(".meta.json");
        io::write_json_file(std::path::Path::new(&side), &meta)?;
    }
    out.finish()?;
    Ok(match traj.termination {
        Termination::StepFailure(_) => EXIT_NUMERICAL,
        _ => EXIT_OK,
    })
}

fn decompose_cmd(cli: &Cli, a: &DecomposeArgs, mut out: Output) -> Result<i32, CliError> {
    let m = io::matrix_from_value(&io::json_arg(&a.matrix)?, "matrix")?;
    let zero_tol = a.zero_tol.unwrap_or(flagcore::DEFAULT_ZERO_TOL);
    let s = CovMatrix::new(m)?;
    let rep = flagcore::decompose(&s)?.canonicalized();
    let n = rep.n();
    let ty = flagcore::type_of(rep.mu(), zero_tol)?;
    let lambda = rep.lambda();
    match format_or(cli, Format::Json) {
        Format::Json => out.json(&json!({
            "mu": rep.mu().as_slice(),
            "lambda": lambda.as_slice(),
            "frame": rows(rep.frame()),
            "type": ty.parts(),
            "dimension": flagcore::dimension(rep.mu()),
        }))?,
        Format::Csv => {
            let mut cols = header("mu", n);
            cols.extend(header("lambda", n));
            cols.extend(frame_header(n));
            cols.push("dimension".into());
            out.line(&cols.join(","));
            let mut vals: Vec<f64> = rep.mu().as_slice().to_vec();
            vals.extend(lambda.as_slice());
            vals.extend(linalg::row_major(rep.frame()));
            vals.push(flagcore::dimension(rep.mu()));
            out.line(&csv_line(vals));
        }
    }
    out.finish()?;
    Ok(EXIT_OK)
}

fn flag_operand(v: &Value, what: &str) -> Result<FlagRep, CliError> {
    if v.is_object() {
        let j: FlagRepJson = serde_json::from_value(v.clone())
            .map_err(|e| CliError::Input(format!("{what} must be {{mu, frame}}: {e}")))?;
        return Ok(FlagRep::try_from(j)?);
    }
    let s = CovMatrix::new(io::matrix_from_value(v, what)?)?;
    Ok(flagcore::decompose(&s)?)
}

fn distance_cmd(cli: &Cli, a: &DistanceArgs, mut out: Output) -> Result<i32, CliError> {
    let (va, vb) = (io::json_arg(&a.a)?, io::json_arg(&a.b)?);
    let d = match a.kind {
        DistanceKind::Euclidean => {
            let x = CovMatrix::new(io::matrix_from_value(&va, "first matrix")?)?;
            let y = CovMatrix::new(io::matrix_from_value(&vb, "second matrix")?)?;
            distances::euclidean_distance(&x, &y)?
        }
        DistanceKind::Krakus => distances::krakus_distance(&flag_operand(&va, "first flag")?, &flag_operand(&vb, "second flag")?)?,
        DistanceKind::Conic => distances::conic_distance(&flag_operand(&va, "first flag")?, &flag_operand(&vb, "second flag")?)?,
        DistanceKind::Grassmann => {
            let parse = |v: &Value, what: &str| -> Result<DMatrix<f64>, CliError> {
                let rows: Vec<Vec<f64>> = serde_json::from_value(v.clone())
                    .map_err(|e| CliError::Input(format!("{what} must be nested rows: {e}")))?;
                Ok(linalg::matrix_from_rows(&rows)?)
            };
            distances::grassmann_distance(&parse(&va, "first basis")?, &parse(&vb, "second basis")?, a.normalized)?
        }
    };
    let kind = format!("{:?}", a.kind).to_lowercase();
    match format_or(cli, Format::Csv) {
        Format::Csv => {
            out.line("kind,distance");
            out.line(&format!("{kind},{}", fmt_num(d)));
        }
        Format::Json => out.json(&json!({ "kind": kind, "distance": d }))?,
    }
    out.finish()?;
    Ok(EXIT_OK)
}

fn pca_cmd(cli: &Cli, a: &PcaArgs, mut out: Output) -> Result<i32, CliError> {
    let points = match (&a.input, a.demo) {
        (Some(path), None) => io::read_points_csv(path)?,
        (None, Some(demo)) => {
            let rng = || -> Result<ChaCha8Rng, CliError> {
                let seed = cli.seed.ok_or_else(|| CliError::Input("random demos need --seed".into()))?;
                Ok(ChaCha8Rng::seed_from_u64(seed))
            };
            match demo {
                Demo::Cylinder => samples::solid_cylinder(&mut rng()?, a.count, a.radius, a.extent)?,
                Demo::Sphere => samples::sphere(&mut rng()?, 3, a.count, a.radius)?,
                Demo::Plane => samples::grid_patch(3, 2, a.extent, a.count)?,
                Demo::Line => samples::grid_patch(3, 1, a.extent, a.count)?,
            }
        }
        _ => return Err(CliError::Input("pca needs exactly one of --input or --demo".into())),
    };
    let kernel = Kernel::by_name(&a.kernel)?;
    let w = measures::point_cloud_flagfold(&points, a.eta, kernel)?;
    write_flagfold(cli, &w, &mut out)?;
    out.finish()?;
    Ok(EXIT_OK)
}

fn write_flagfold(cli: &Cli, w: &PointCloudFlagfold, out: &mut Output) -> Result<(), CliError> {
    let n = w.n();
    match format_or(cli, Format::Json) {
        Format::Json => {
            let v = serde_json::to_value(w.to_json()).map_err(|e| CliError::Internal(e.to_string()))?;
            out.json(&v)?;
        }
        Format::Csv => {
            let mut cols = header("x", n);
            for i in 1..=n {
                for j in 1..=n {
                    cols.push(format!("S_{i}{j}"));
                }
            }
            cols.push("m".into());
            out.line(&cols.join(","));
            for atom in w.atoms() {
                let mut vals: Vec<f64> = atom.x.iter().copied().collect();
                vals.extend(linalg::row_major(atom.s.matrix()));
                vals.push(atom.m);
                out.line(&csv_line(vals));
            }
        }
    }
    Ok(())
}

fn read_flagfold(arg: &str) -> Result<PointCloudFlagfold, CliError> {
    let v = io::json_arg(arg)?;
    let atoms: Vec<FlagAtomJson> = serde_json::from_value(v)
        .map_err(|e| CliError::Input(format!("flagfold must be an array of {{x, S, m}}: {e}")))?;
    Ok(PointCloudFlagfold::from_json(atoms)?)
}

fn point(v: Option<&Vec<f64>>, n: usize, what: &str) -> Result<DVector<f64>, CliError> {
    match v {
        None => Ok(DVector::zeros(n)),
        Some(x) if x.len() == n => Ok(DVector::from_vec(x.clone())),
        Some(x) => Err(CliError::Input(format!("{what} has {} entries, expected {n}", x.len()))),
    }
}

fn firstvar_cmd(cli: &Cli, a: &FirstvarArgs, mut out: Output) -> Result<i32, CliError> {
    let w = read_flagfold(&a.input)?;
    let n = w.n();
    let field: Box<dyn VectorField> = match a.field {
        FieldKind::Affine => {
            let flat = a.matrix.as_ref().ok_or_else(|| CliError::Input("affine field needs --matrix".into()))?;
            let m = linalg::square_from_row_major(flat)?;
            Box::new(Affine::new(m, point(a.offset.as_ref(), n, "offset")?)?)
        }
        FieldKind::Radial => Box::new(Radial { center: point(a.center.as_ref(), n, "center")?, scale: a.scale }),
        FieldKind::Bump => {
            if a.component == 0 {
                return Err(CliError::Input("bump component is 1-based".into()));
            }
            Box::new(Bump::new(a.component - 1, point(a.center.as_ref(), n, "center")?, a.radius, a.amplitude)?)
        }
    };
    let v = measures::first_variation(&w, field.as_ref())?;
    match format_or(cli, Format::Csv) {
        Format::Csv => {
            out.line("first_variation");
            out.line(&fmt_num(v));
        }
        Format::Json => out.json(&json!({ "first_variation": v }))?,
    }
    out.finish()?;
    Ok(EXIT_OK)
}

fn monotonicity_cmd(cli: &Cli, a: &MonotonicityArgs, mut out: Output) -> Result<i32, CliError> {
    let w = read_flagfold(&a.input)?;
    let x = point(Some(&a.x), w.n(), "x")?;
    let radii = match &a.radii {
        Some(r) => r.clone(),
        None => {
            if a.count == 0 {
                return Err(CliError::Input("--count must be positive".into()));
            }
            if a.count == 1 {
                vec![a.rmin]
            } else {
                (0..a.count)
                    .map(|k| a.rmin + (a.rmax - a.rmin) * k as f64 / (a.count - 1) as f64)
                    .collect()
            }
        }
    };
    let ratios = measures::monotonicity_ratio(&w, &x, a.d_star, a.lambda, &radii)?;
    match format_or(cli, Format::Csv) {
        Format::Csv => {
            out.line("radius,ratio");
            for (r, q) in radii.iter().zip(&ratios) {
                out.line(&csv_line([*r, *q]));
            }
        }
        Format::Json => {
            let arr: Vec<Value> = radii.iter().zip(&ratios).map(|(r, q)| json!({"radius": r, "ratio": q})).collect();
            out.json(&Value::Array(arr))?;
        }
    }
    out.finish()?;
    Ok(EXIT_OK)
}

fn euclid_cmd(cli: &Cli, a: &EuclidArgs, mut out: Output) -> Result<i32, CliError> {
    let x = CovMatrix::new(io::matrix_from_value(&io::json_arg(&a.a)?, "first matrix")?)?;
    let y = CovMatrix::new(io::matrix_from_value(&io::json_arg(&a.b)?, "second matrix")?)?;
    let path = geodesic::euclidean_geodesic(&x, &y, a.steps)?;
    let n = x.n();
    match format_or(cli, Format::Csv) {
        Format::Csv => {
            let mut cols = vec!["s".to_string()];
            cols.extend(header("mu", n));
            cols.extend(header("lambda", n));
            cols.extend(frame_header(n));
            out.line(&cols.join(","));
            for (p, rep) in path.iter().enumerate() {
                let rep = rep.canonicalized();
                let mut vals = vec![p as f64 / a.steps as f64];
                vals.extend(rep.mu().as_slice());
                vals.extend(rep.lambda().as_slice());
                vals.extend(linalg::row_major(rep.frame()));
                out.line(&csv_line(vals));
            }
        }
        Format::Json => {
            let arr: Vec<Value> = path
                .iter()
                .enumerate()
                .map(|(p, rep)| {
                    let rep = rep.canonicalized();
                    json!({
                        "s": p as f64 / a.steps as f64,
                        "mu": rep.mu().as_slice(),
                        "lambda": rep.lambda().as_slice(),
                        "frame": rows(rep.frame()),
                    })
                })
                .collect();
            out.json(&Value::Array(arr))?;
        }
    }
    out.finish()?;
    Ok(EXIT_OK)
}
