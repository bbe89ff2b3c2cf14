use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use liquid_drop::ballmodel::{
    ball_energy_per_particle, dissociation_energy, dissociation_threshold, scale_invariant_ratio,
    virial_residual_of, BallCurveParams,
};
use liquid_drop::curve::{
    build_curve, diameter_monitor, kappa_threshold, relaxed_curve, rescaled_virial_residual,
    stability_probe, structural_checks, BindingCurve, DiameterReport, OptimizerConfig,
    StructuralReport,
};
use liquid_drop::decomposition::{
    concentration_report, select_split_radius, split, vanishing_sequence_demo, ConcentrationReport,
    RadiusSelection, SplitResult, VanishingReport,
};
use liquid_drop::geometry::{face_count_perimeter, io, Point3};
use liquid_drop::numeric::{bisect, GaussLegendre};
use liquid_drop::riesz::{axisymmetric_energy, ball_self_energy, riesz_energy_voxel, total_energy};
use liquid_drop::{Ball, BallConfiguration, EnergyBreakdown, Measure, RieszParams, Shape};

use crate::config::{parse_list, RunConfig};
use crate::CliError;

const UNITS: &str = "dimensionless model units";

fn numerical(e: liquid_drop::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

fn params(cfg: &RunConfig) -> Result<RieszParams, CliError> {
    let p = RieszParams::new(cfg.dim, cfg.lambda).map_err(|e| CliError::Config(e.to_string()))?;
    if p.dim() != 3 {
        return Err(CliError::Config(format!(
            "only dimension 3 is implemented, got {}",
            p.dim()
        )));
    }
    Ok(p)
}

fn require_coulomb(cfg: &RunConfig) -> Result<(), CliError> {
    if params(cfg)?.is_coulomb() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "`{}` is implemented for d = 3, lambda = 1 only",
            cfg.command
        )))
    }
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct Timings {
    command: String,
    seconds: f64,
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let start = Instant::now();
    match cfg.command.as_str() {
        "energy" => energy(cfg)?,
        "curve" => curve(cfg)?,
        "dissociate" => dissociate(cfg)?,
        "split" => split_demo(cfg)?,
        "stability" => stability(cfg)?,
        "converge" => converge(cfg)?,
        other => return Err(CliError::Config(format!("unknown command {other}"))),
    }
    // kept apart from the reports so those stay byte-identical across runs
    let timings = Timings {
        command: cfg.command.clone(),
        seconds: start.elapsed().as_secs_f64(),
    };
    write_file(&cfg.out, "timings.json", &to_json(&timings))
}

fn read_shape(path: &str) -> Result<Shape, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {path}: {e}")))?;
    io::parse_shape(&text).map_err(|e| CliError::Config(format!("{path}: {e}")))
}

#[derive(Serialize)]
struct EnergyReport<'a> {
    config: &'a RunConfig,
    config_hash: String,
    units: &'static str,
    representation: &'static str,
    /// Voxel spacing used when the exact path does not cover the kernel.
    voxelized_at: Option<f64>,
    breakdown: EnergyBreakdown,
    per_particle: f64,
    diameter: f64,
    virial_residual: f64,
    scale_invariant_ratio: f64,
}

fn energy(cfg: &RunConfig) -> Result<(), CliError> {
    let input = cfg
        .extra
        .get("input")
        .ok_or_else(|| CliError::Config("energy needs an input shape file".into()))?;
    let shape = read_shape(input)?;
    let p = params(cfg)?;
    let representation = match &shape {
        Shape::Balls(_) => "balls",
        Shape::Voxels(_) => "voxels",
        Shape::Axisymmetric(_) => "axisymmetric",
    };
    let (breakdown, voxelized_at) = match total_energy(&shape, &p) {
        Ok(b) => (b, None),
        Err(liquid_drop::Error::Unsupported(_)) => {
            let v = shape.voxelize(cfg.voxel_h).map_err(numerical)?;
            (
                total_energy(&Shape::Voxels(v), &p).map_err(numerical)?,
                Some(cfg.voxel_h),
            )
        }
        Err(e) => return Err(numerical(e)),
    };
    let report = EnergyReport {
        config: cfg,
        config_hash: cfg.hash(),
        units: UNITS,
        representation,
        voxelized_at,
        breakdown,
        per_particle: breakdown.per_particle().map_err(numerical)?,
        diameter: shape.diameter().map_err(numerical)?,
        virial_residual: virial_residual_of(&breakdown, &p),
        scale_invariant_ratio: scale_invariant_ratio(&breakdown).map_err(numerical)?,
    };
    println!(
        "volume {} perimeter {} riesz {} total {}",
        breakdown.volume, breakdown.perimeter, breakdown.riesz, breakdown.total
    );
    write_file(&cfg.out, "energy.json", &to_json(&report))
}

fn optimizer_config(cfg: &RunConfig) -> OptimizerConfig {
    OptimizerConfig {
        legendre_order: cfg.legendre_order,
        tolerance: cfg.tolerance,
        max_iterations: cfg.max_iterations,
        restarts: cfg.restarts,
        quadrature_order: cfg.quadrature_order,
        seed: cfg.seed,
        ..OptimizerConfig::default()
    }
}

#[derive(Serialize)]
struct CurveRow {
    mass: f64,
    energy_upper: f64,
    per_particle_upper: f64,
    relaxed_per_particle: f64,
    source: &'static str,
    ball_per_particle: f64,
    dissociation_k: u64,
    dissociation_per_particle: f64,
    shape_energy: Option<f64>,
    base_radius: Option<f64>,
    coefficients: Option<Vec<f64>>,
    evaluations: Option<usize>,
    /// `|𝓔(n) − 𝓔(2n)|` of the stored body between quadrature orders.
    quadrature_slack: Option<f64>,
    status: String,
}

#[derive(Serialize)]
struct CurveReport<'a> {
    config: &'a RunConfig,
    config_hash: String,
    seed: u64,
    units: &'static str,
    rows: Vec<CurveRow>,
    structural: StructuralReport,
    diameter: DiameterReport,
    /// `|Per − 2D|/𝓔` of the body at the estimated `A_*`, after rescaling it
    /// to its optimal size.
    virial_at_a_star: Option<f64>,
}

fn curve(cfg: &RunConfig) -> Result<(), CliError> {
    require_coulomb(cfg)?;
    let opt = optimizer_config(cfg);
    opt.validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let curve: BindingCurve = build_curve(&cfg.a_grid, &opt).map_err(numerical)?;
    let hash = cfg.hash();
    write_file(&cfg.out, "curve.csv", &curve.to_csv(&hash))?;

    let fine = GaussLegendre::new(2 * opt.quadrature_order);
    let per: Vec<f64> = curve.points.iter().map(|p| p.per_particle_upper).collect();
    let relaxed = relaxed_curve(&per);
    let mut max_slack = 0.0f64;
    let rows: Vec<CurveRow> = curve
        .points
        .iter()
        .zip(&relaxed)
        .map(|(p, &r)| {
            let slack = p.shape.as_ref().map(|s| {
                let again = axisymmetric_energy(&s.shape, &fine).total;
                (again - s.energy.total).abs() + opt.tolerance * s.energy.total
            });
            if let Some(s) = slack {
                max_slack = max_slack.max(s);
            }
            Ok(CurveRow {
                mass: p.mass,
                energy_upper: p.energy_upper,
                per_particle_upper: p.per_particle_upper,
                relaxed_per_particle: r,
                source: p.source.as_str(),
                ball_per_particle: ball_energy_per_particle(p.mass).map_err(numerical)?,
                dissociation_k: p.dissociation.k,
                dissociation_per_particle: p.dissociation.energy_per_particle,
                shape_energy: p.shape.as_ref().map(|s| s.energy.total),
                base_radius: p.shape.as_ref().map(|s| s.shape.base_radius()),
                coefficients: p.shape.as_ref().map(|s| s.shape.coefficients().to_vec()),
                evaluations: p.shape.as_ref().map(|s| s.evaluations),
                quadrature_slack: slack,
                status: p.status.clone(),
            })
        })
        .collect::<Result<_, CliError>>()?;
    let structural = structural_checks(&curve.masses(), &curve.energies(), 2.0 * max_slack)
        .map_err(numerical)?;
    let diameters: Vec<f64> = curve.points.iter().map(|p| p.diameter).collect();
    let diameter = diameter_monitor(&curve.masses(), &diameters);
    let virial_at_a_star = curve
        .points
        .iter()
        .find(|p| p.mass == structural.a_star)
        .and_then(|p| p.shape.as_ref())
        .map(|s| rescaled_virial_residual(&s.shape, &opt.rule()))
        .transpose()
        .map_err(numerical)?;
    println!(
        "{} points; A_* ~ {}, A_0 ~ {}, {} subadditivity violations",
        rows.len(),
        structural.a_star,
        structural.a_zero,
        structural.subadditivity_violations.len()
    );
    let report = CurveReport {
        config: cfg,
        config_hash: hash,
        seed: cfg.seed,
        units: UNITS,
        rows,
        structural,
        diameter,
        virial_at_a_star,
    };
    write_file(&cfg.out, "curve.json", &to_json(&report))
}

#[derive(Serialize)]
struct ThresholdRow {
    k: u64,
    closed_form: f64,
    bisection: f64,
}

#[derive(Serialize)]
struct DissociationReport<'a> {
    config: &'a RunConfig,
    config_hash: String,
    units: &'static str,
    ball_curve: BallCurveParams,
    thresholds: Vec<ThresholdRow>,
    /// Consecutive table masses between which the optimal ball count changes.
    switches: Vec<(f64, f64, u64, u64)>,
}

fn dissociate(cfg: &RunConfig) -> Result<(), CliError> {
    let amax: f64 = cfg.extra_value("amax", 20.0)?;
    let points: usize = cfg.extra_value("points", 100)?;
    let count: u64 = cfg.extra_value("thresholds", 5)?;
    if !(amax > 0.0) || points == 0 {
        return Err(CliError::Config("amax and points must be positive".into()));
    }
    let hash = cfg.hash();
    let mut csv = String::from("config_hash,A,k,e_tilde,e_ball,per_ball_mass\n");
    let mut switches = Vec::new();
    let mut prev: Option<(f64, u64)> = None;
    for i in 1..=points {
        let a = amax * i as f64 / points as f64;
        let d = dissociation_energy(a).map_err(numerical)?;
        let e_ball = ball_energy_per_particle(a).map_err(numerical)?;
        let _ = writeln!(
            csv,
            "{hash},{a},{},{},{e_ball},{}",
            d.k, d.energy_per_particle, d.per_ball_mass
        );
        if let Some((pa, pk)) = prev {
            if pk != d.k {
                switches.push((pa, a, pk, d.k));
            }
        }
        prev = Some((a, d.k));
    }
    write_file(&cfg.out, "dissociation.csv", &csv)?;
    let mut thresholds = Vec::new();
    for k in 1..=count {
        let closed_form = dissociation_threshold(k).map_err(numerical)?;
        let kf = k as f64;
        let diff = |a: f64| {
            ball_energy_per_particle(a / kf).unwrap_or(f64::NAN)
                - ball_energy_per_particle(a / (kf + 1.0)).unwrap_or(f64::NAN)
        };
        // a_k lies between k and k + 1 times the critical mass
        let bisection = bisect(
            diff,
            2.5 * kf,
            2.5 * (kf + 1.0),
            1e-13,
            "ball-count threshold",
        )
        .map_err(numerical)?;
        thresholds.push(ThresholdRow {
            k,
            closed_form,
            bisection,
        });
    }
    for t in &thresholds {
        println!("a_{} = {}", t.k, t.closed_form);
    }
    let report = DissociationReport {
        config: cfg,
        config_hash: hash,
        units: UNITS,
        ball_curve: BallCurveParams::coulomb(),
        thresholds,
        switches,
    };
    write_file(&cfg.out, "dissociation.json", &to_json(&report))
}

fn parse_point(value: &str) -> Result<Point3, CliError> {
    let v = parse_list("center", value)?;
    match v.as_slice() {
        [x, y, z] => Ok([*x, *y, *z]),
        _ => Err(CliError::Config(format!(
            "center `{value}`: expected x,y,z"
        ))),
    }
}

#[derive(Serialize)]
struct SplitReport<'a> {
    config: &'a RunConfig,
    config_hash: String,
    units: &'static str,
    center: Point3,
    selection: Option<RadiusSelection>,
    split: SplitResult,
    /// Cross energy between the inside part and translated copies of itself.
    vanishing: Option<VanishingReport>,
    concentration: ConcentrationReport,
}

fn split_demo(cfg: &RunConfig) -> Result<(), CliError> {
    let p = params(cfg)?;
    let shape = match cfg.extra.get("input") {
        Some(path) => read_shape(path)?,
        // two unit balls ten apart
        None => Shape::Balls(
            BallConfiguration::new(vec![
                Ball::new([0.0; 3], 1.0),
                Ball::new([10.0, 0.0, 0.0], 1.0),
            ])
            .map_err(numerical)?,
        ),
    };
    let set = shape.voxelize(cfg.voxel_h).map_err(numerical)?;
    let center = match cfg.extra.get("center") {
        Some(c) => parse_point(c)?,
        None => [0.0; 3],
    };
    let selection = match cfg.extra.get("radius") {
        Some(_) => None,
        None => {
            let lo = cfg.extra_value("r-lo", 2.0)?;
            let hi = cfg.extra_value("r-hi", 8.0)?;
            Some(
                select_split_radius(&set, lo, hi, &center)
                    .map_err(|e| CliError::Config(e.to_string()))?,
            )
        }
    };
    let radius = match &selection {
        Some(s) => s.radius,
        None => cfg.extra_value("radius", 0.0)?,
    };
    let result = split(&set, radius, &center, &p).map_err(|e| CliError::Config(e.to_string()))?;
    let vanishing = if result.inside.is_empty() {
        None
    } else {
        Some(vanishing_sequence_demo(&result.inside, &[10.0, 20.0, 40.0], &p).map_err(numerical)?)
    };
    println!(
        "r = {radius}: |F| = {}, |G| = {}, perimeter defect {}, riesz defect {}",
        result.inside_volume, result.outside_volume, result.perimeter_defect, result.riesz_defect
    );
    let report = SplitReport {
        config: cfg,
        config_hash: cfg.hash(),
        units: UNITS,
        center,
        selection,
        concentration: concentration_report(&set).map_err(numerical)?,
        split: result,
        vanishing,
    };
    write_file(&cfg.out, "split.json", &to_json(&report))
}

#[derive(Serialize)]
struct StabilityReport<'a> {
    config: &'a RunConfig,
    config_hash: String,
    units: &'static str,
    mode: usize,
    eps: f64,
    /// Sign change of `κ` on the grid range, by bisection.
    threshold: Option<f64>,
    threshold_half_eps: Option<f64>,
    threshold_double_quadrature: Option<f64>,
    /// Classical second-order prediction for the same mode.
    small_deformation_threshold: f64,
    note: Option<String>,
}

fn stability(cfg: &RunConfig) -> Result<(), CliError> {
    require_coulomb(cfg)?;
    let mode: usize = cfg.extra_value("mode", 2)?;
    let eps: f64 = cfg.extra_value("eps", 1e-3)?;
    if mode < 2 || !(eps > 0.0) {
        return Err(CliError::Config(
            "mode must be at least 2 and eps positive".into(),
        ));
    }
    let rule = GaussLegendre::new(cfg.quadrature_order);
    let fine = GaussLegendre::new(2 * cfg.quadrature_order);
    let hash = cfg.hash();
    let mut csv = String::from("config_hash,A,kappa,kappa_half_eps,status\n");
    for &a in &cfg.a_grid {
        let k1 = stability_probe(a, mode, eps, &rule);
        let k2 = stability_probe(a, mode, 0.5 * eps, &rule);
        let status = match (&k1, &k2) {
            (Ok(_), Ok(_)) => "ok".to_string(),
            (Err(e), _) | (_, Err(e)) => format!("failed: {e}").replace(',', ";"),
        };
        let _ = writeln!(
            csv,
            "{hash},{a},{},{},{status}",
            k1.unwrap_or(f64::NAN),
            k2.unwrap_or(f64::NAN)
        );
    }
    write_file(&cfg.out, "stability.csv", &csv)?;
    let lo = cfg.a_grid[0];
    let hi = *cfg.a_grid.last().expect("grid is non-empty");
    let search = |e: f64, r: &GaussLegendre| match kappa_threshold(mode, e, r, lo, hi, 1e-9) {
        Ok(t) => Ok(Some(t)),
        Err(liquid_drop::Error::NoBracket(_)) => Ok(None),
        Err(e) => Err(numerical(e)),
    };
    let threshold = search(eps, &rule)?;
    let l = mode as f64;
    let c = BallCurveParams::coulomb();
    let report = StabilityReport {
        config: cfg,
        config_hash: hash,
        units: UNITS,
        mode,
        eps,
        threshold,
        threshold_half_eps: search(0.5 * eps, &rule)?,
        threshold_double_quadrature: search(eps, &fine)?,
        small_deformation_threshold: c.p * (l + 2.0) * (2.0 * l + 1.0) / (10.0 * c.q),
        note: threshold
            .is_none()
            .then(|| "no sign change of kappa on the grid range".to_string()),
    };
    match threshold {
        Some(t) => println!("kappa_{mode} changes sign at A = {t}"),
        None => println!("kappa_{mode} has no sign change on [{lo}, {hi}]"),
    }
    write_file(&cfg.out, "stability.json", &to_json(&report))
}

#[derive(Serialize)]
struct ConvergeRow {
    h: f64,
    cells: usize,
    volume: f64,
    perimeter: f64,
    perimeter_error: f64,
    face_count_perimeter: f64,
    riesz: f64,
    riesz_error: f64,
}

#[derive(Serialize)]
struct ConvergeReport<'a> {
    config: &'a RunConfig,
    config_hash: String,
    units: &'static str,
    exact_perimeter: f64,
    exact_riesz: f64,
    rows: Vec<ConvergeRow>,
    /// Errors decrease along decreasing `h`.
    perimeter_monotone: bool,
    riesz_monotone: bool,
}

fn converge(cfg: &RunConfig) -> Result<(), CliError> {
    let p = params(cfg)?;
    let mut hs = parse_list(
        "h",
        cfg.extra.get("h").map_or("0.2,0.1,0.05", String::as_str),
    )?;
    if hs.is_empty() || hs.iter().any(|h| !(*h > 0.0)) {
        return Err(CliError::Config("spacings must be positive".into()));
    }
    hs.sort_by(|a, b| b.total_cmp(a));
    let ball = BallConfiguration::single(Ball::new([0.0; 3], 1.0));
    let exact_perimeter = ball.perimeter();
    let exact_riesz = ball_self_energy(1.0, &p).map_err(numerical)?;
    let hash = cfg.hash();
    let mut csv = String::from("config_hash,h,cells,volume,perimeter,perimeter_error,face_count_perimeter,riesz,riesz_error\n");
    let mut rows = Vec::new();
    for &h in &hs {
        let v = ball.voxelize(h).map_err(numerical)?;
        let perimeter = v.perimeter();
        let riesz = riesz_energy_voxel(&v, &p).map_err(numerical)?;
        let row = ConvergeRow {
            h,
            cells: v.count(),
            volume: v.volume(),
            perimeter,
            perimeter_error: (perimeter / exact_perimeter - 1.0).abs(),
            face_count_perimeter: face_count_perimeter(&v),
            riesz,
            riesz_error: (riesz / exact_riesz - 1.0).abs(),
        };
        let _ = writeln!(
            csv,
            "{hash},{},{},{},{},{},{},{},{}",
            row.h,
            row.cells,
            row.volume,
            row.perimeter,
            row.perimeter_error,
            row.face_count_perimeter,
            row.riesz,
            row.riesz_error
        );
        println!(
            "h = {h}: perimeter error {:.3e}, energy error {:.3e}",
            row.perimeter_error, row.riesz_error
        );
        rows.push(row);
    }
    write_file(&cfg.out, "converge.csv", &csv)?;
    let report = ConvergeReport {
        config: cfg,
        config_hash: hash,
        units: UNITS,
        exact_perimeter,
        exact_riesz,
        perimeter_monotone: rows
            .windows(2)
            .all(|w| w[1].perimeter_error < w[0].perimeter_error),
        riesz_monotone: rows.windows(2).all(|w| w[1].riesz_error < w[0].riesz_error),
        rows,
    };
    write_file(&cfg.out, "converge.json", &to_json(&report))
}
