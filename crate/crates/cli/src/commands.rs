use std::fs;
use std::io::Write;
use std::path::PathBuf;

use hypnap_core::certify::{certify as certify_grid, CertifyReport, Grid};
use hypnap_core::disk::to_disk;
use hypnap_core::format::{
    class_json, fmt_f64, parse_class_list, parse_triangle_json, point_json, trajectory_csv, trajectory_json,
    triangle_json, Json,
};
use hypnap_core::iteration::{contraction_report, run, StopCriterion};
use hypnap_core::napoleon::{napoleonic_residual, napoleonic_verdict, NapoleonicVerdict};
use hypnap_core::par::with_threads;
use hypnap_core::sampling::{random_class, sample_rng, sweep as sweep_samples};
use hypnap_core::{
    apex, canonicalize, classify, congruence_of, napoleonize as napoleonize_points, napoleonize_class,
    realize as realize_class, CongruenceClass, Error, Execution, HPoint, NapoleonParams, Orientation, Tolerances,
    Triangle,
};

use crate::{Common, Failure, Format};

/// Validated settings shared by all commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub class: Option<CongruenceClass>,
    pub triangle: Option<Triangle>,
    pub epsilon: Orientation,
    pub steps: usize,
    pub tol: Option<f64>,
    pub grid: Grid,
    pub seed: u64,
    pub samples: usize,
    pub d_max: f64,
    pub threads: usize,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    fn from_args(c: &Common) -> Result<Self, Failure> {
        let class = c.class.as_deref().map(parse_class_list).transpose()?;
        let triangle = match &c.triangle {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
                Some(parse_triangle_json(&text)?)
            }
            None => None,
        };
        if c.steps < 1 {
            return Err(Error::InvalidParameter("--steps must be at least 1".into()).into());
        }
        if let Some(t) = c.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidParameter(format!("--tol must be positive, got {t}")).into());
            }
        }
        let default = Grid::default();
        let grid = Grid {
            min: c.grid_min.unwrap_or(default.min),
            max: c.grid_max.unwrap_or(default.max),
            step: c.grid_step.unwrap_or(default.step),
        };
        grid.validate()?;
        Ok(Self {
            class,
            triangle,
            epsilon: c.epsilon,
            steps: c.steps,
            tol: c.tol,
            grid,
            seed: c.seed,
            samples: c.samples,
            d_max: c.d_max,
            threads: c.threads,
            format: c.format,
            out: c.out.clone(),
        })
    }

    fn require_class(&self) -> Result<CongruenceClass, Failure> {
        match (&self.class, &self.triangle) {
            (Some(c), _) => Ok(*c),
            (None, Some(t)) => Ok(congruence_of(t)?),
            (None, None) => Err(Failure::Usage("one of --class or --triangle is required".into())),
        }
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(path) => {
                fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| Failure::Io(format!("cannot write to stdout: {e}")))
            }
        }
    }
}

fn kind_name(c: &CongruenceClass, tol: f64) -> Result<Json, Error> {
    Ok(Json::str(format!("{:?}", classify(c, tol)?.kind)))
}

pub fn realize(args: &Common) -> Result<(), Failure> {
    let cfg = RunConfig::from_args(args)?;
    let c = cfg.require_class()?;
    let t = realize_class(&c)?;
    let json = Json::obj([
        ("class", class_json(&c)),
        ("vertices", Json::Arr(t.vertices().map(point_json).to_vec())),
    ]);
    cfg.emit(&json.render())
}

fn verdict_json(v: NapoleonicVerdict) -> Json {
    match v {
        NapoleonicVerdict::EquilateralInput => Json::str("equilateral_input"),
        NapoleonicVerdict::CogeodesicInput => Json::str("cogeodesic_input"),
        NapoleonicVerdict::Napoleonic { .. } => Json::str("napoleonic"),
        NapoleonicVerdict::NotNapoleonic { .. } => Json::str("not_napoleonic"),
    }
}

pub fn napoleonize(args: &Common) -> Result<(), Failure> {
    let cfg = RunConfig::from_args(args)?;
    let tols = Tolerances {
        class: cfg.tol.unwrap_or(Tolerances::default().class),
        ..Tolerances::default()
    };
    let p = NapoleonParams {
        epsilon: cfg.epsilon,
        tol: tols,
    };

    let mut fields = Vec::new();
    let class = match &cfg.triangle {
        Some(t) => {
            let r = napoleonize_points(t, &p)?;
            fields.push(("triangle", triangle_json(&r.triangle)));
            fields.push(("centroids", Json::Arr(r.centroids.map(point_json).to_vec())));
            congruence_of(&r.triangle)?
        }
        None => cfg.require_class()?.canonical(),
    };
    // the point route above already cross-checked this against the closed form
    let e = napoleonize_class(&class, &p)?;

    let mut residuals = Vec::new();
    for eps in Orientation::BOTH {
        let q = NapoleonParams {
            epsilon: eps,
            tol: tols,
        };
        residuals.push((eps.to_string(), Json::Num(napoleonic_residual(&class, &q)?)));
    }
    let mut out = vec![
        ("epsilon", Json::str(cfg.epsilon.to_string())),
        ("class", class_json(&class)),
        ("kind", kind_name(&class, tols.class)?),
        ("e_class", class_json(&e)),
        ("e_kind", kind_name(&e, tols.class)?),
        ("residual", Json::Num(napoleonic_residual(&class, &p)?)),
        ("residuals", Json::Obj(residuals)),
        ("verdict", verdict_json(napoleonic_verdict(&class, &p)?)),
    ];
    out.extend(fields);
    cfg.emit(&Json::obj(out).render())
}

pub fn iterate(args: &Common) -> Result<(), Failure> {
    let cfg = RunConfig::from_args(args)?;
    let start = match (&cfg.class, &cfg.triangle) {
        (None, None) => random_class(&mut sample_rng(cfg.seed, 0), cfg.d_max)?,
        _ => cfg.require_class()?,
    };
    let stop = StopCriterion {
        max_steps: cfg.steps,
        tol_point_limit: cfg.tol.unwrap_or(StopCriterion::default().tol_point_limit),
        ..StopCriterion::default()
    };
    let t = run(&start, cfg.epsilon, &stop)?;

    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => trajectory_csv(&t),
        Format::Json => trajectory_json(&t).render(),
    };

    let report = match contraction_report(&t) {
        Ok(r) => Json::obj([
            ("max_mu_ratio", Json::opt_num(r.max_mu_ratio)),
            ("max_gap_ratio", Json::opt_num(r.max_gap_ratio)),
            ("step_bound_excess", Json::Num(r.step_bound_excess)),
            ("max_d0_sq_after_small_gap", Json::opt_num(r.max_d0_sq_after_small_gap)),
            ("mu_bound_ok", Json::Bool(r.mu_bound_ok)),
            ("gap_bound_ok", Json::Bool(r.gap_bound_ok)),
            ("step_bound_ok", Json::Bool(r.step_bound_ok)),
            ("d0_bound_ok", Json::Bool(r.d0_bound_ok)),
            ("closure_ok", Json::Bool(r.closure_ok)),
            ("order_preserved", Json::Bool(r.order_preserved)),
            ("passed", Json::Bool(r.passed())),
        ]),
        Err(Error::InsufficientData(_)) => Json::Null,
        Err(e) => return Err(e.into()),
    };
    let last = t.last();
    let summary = Json::obj([
        ("epsilon", Json::str(cfg.epsilon.to_string())),
        ("start", class_json(&start.canonical())),
        ("termination", Json::str(format!("{:?}", t.termination))),
        ("steps", Json::Int(t.steps() as i64)),
        ("final", class_json(&last.class)),
        ("distance_to_point_limit", Json::Num(last.distance_to_point_limit())),
        ("point_checks", Json::Int(t.point_checks as i64)),
        ("report", report),
    ])
    .render();

    if cfg.out.is_some() {
        cfg.emit(&body)?;
        print!("{summary}");
    } else {
        cfg.emit(&body)?;
        eprint!("{summary}");
    }
    Ok(())
}

fn certify_json(r: &CertifyReport) -> Json {
    let cell = |d: Option<[f64; 3]>| d.map_or(Json::Null, |d| Json::nums(&d));
    let violations = r
        .violations
        .iter()
        .map(|v| {
            Json::obj([
                ("d", Json::nums(&v.d)),
                ("lhs", Json::Num(v.lhs)),
                ("rhs", Json::Num(v.rhs)),
                ("reason", Json::str(v.reason)),
            ])
        })
        .collect();
    Json::obj([
        (
            "grid",
            Json::obj([
                ("min", Json::Num(r.grid.min)),
                ("max", Json::Num(r.grid.max)),
                ("step", Json::Num(r.grid.step)),
                ("points_per_axis", Json::Int(r.grid.len() as i64)),
            ]),
        ),
        ("cells", Json::Int(r.cells as i64)),
        ("skipped_unrealizable", Json::Int(r.skipped_unrealizable as i64)),
        ("equilateral_cells", Json::Int(r.equilateral_cells as i64)),
        ("max_relative_error", Json::Num(r.max_relative_error)),
        ("max_relative_error_cell", cell(r.max_relative_error_cell)),
        ("min_rhs_non_equilateral", Json::opt_num(r.min_rhs_non_equilateral)),
        ("min_rhs_cell", cell(r.min_rhs_cell)),
        ("separated_cells", Json::Int(r.separated_cells as i64)),
        ("min_separated_bound_ratio", Json::opt_num(r.min_separated_bound_ratio)),
        ("violations", Json::Arr(violations)),
        ("passed", Json::Bool(r.passed())),
    ])
}

pub fn certify(args: &Common) -> Result<(), Failure> {
    let cfg = RunConfig::from_args(args)?;
    let report = with_threads(cfg.threads, || certify_grid(&cfg.grid, Execution::Parallel))?;
    cfg.emit(&certify_json(&report).render())?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Violation)
    }
}

pub fn sweep(args: &Common) -> Result<(), Failure> {
    let cfg = RunConfig::from_args(args)?;
    let report = with_threads(cfg.threads, || {
        sweep_samples(cfg.seed, cfg.samples, cfg.d_max, Execution::Parallel)
    })?;
    let orientations = report
        .orientations
        .iter()
        .map(|o| {
            Json::obj([
                ("epsilon", Json::str(o.epsilon.to_string())),
                ("min_abs_residual", Json::Num(o.min_abs_residual)),
                ("min_e_gap", Json::Num(o.min_e_gap)),
                ("max_r_i", Json::Num(o.max_r_i)),
                ("max_mu_ratio", Json::Num(o.max_mu_ratio)),
                ("min_r_d", Json::Num(o.min_r_d)),
                ("max_gap_recursion_error", Json::Num(o.max_gap_recursion_error)),
            ])
        })
        .collect();
    let json = Json::obj([
        ("seed", Json::Int(report.seed as i64)),
        ("samples", Json::Int(report.samples as i64)),
        ("d_max", Json::Num(report.d_max)),
        ("equilateral_samples", Json::Int(report.equilateral_samples as i64)),
        ("orientations", Json::Arr(orientations)),
        ("passed", Json::Bool(report.passed())),
    ]);
    cfg.emit(&json.render())?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Violation)
    }
}

pub fn project(args: &Common) -> Result<(), Failure> {
    let cfg = RunConfig::from_args(args)?;
    let t = match &cfg.triangle {
        Some(t) => canonicalize(t)?,
        None => realize_class(&cfg.require_class()?)?,
    };
    let v = t.vertices();
    let mut points: Vec<(String, HPoint)> = Vec::new();
    for (i, p) in v.iter().enumerate() {
        points.push((format!("P{i}"), *p));
    }
    for i in 0..3 {
        points.push((format!("Q{i}"), apex(v[(i + 1) % 3], v[(i + 2) % 3], cfg.epsilon)?));
    }
    let r = napoleonize_points(&t, &NapoleonParams::new(cfg.epsilon))?;
    for (i, p) in r.centroids.iter().enumerate() {
        points.push((format!("R{i}"), *p));
    }

    let text = match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("label,u,v\n");
            for (label, p) in &points {
                let q = to_disk(*p);
                s.push_str(&format!("{label},{},{}\n", fmt_f64(q.u), fmt_f64(q.v)));
            }
            s
        }
        Format::Json => {
            let items = points
                .iter()
                .map(|(label, p)| {
                    let q = to_disk(*p);
                    Json::obj([
                        ("label", Json::str(label.clone())),
                        ("u", Json::Num(q.u)),
                        ("v", Json::Num(q.v)),
                    ])
                })
                .collect();
            Json::obj([
                ("epsilon", Json::str(cfg.epsilon.to_string())),
                ("points", Json::Arr(items)),
            ])
            .render()
        }
    };
    cfg.emit(&text)
}
