//! Command-line front end.
//!
//! Every invocation produces a [`Report`].  Exit codes: 0 when every check
//! passes, 1 on a failed check or a numerical error, 2 on usage errors and
//! unknown names, 3 when an input file cannot be read or parsed.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use nalgebra::Vector4;
use serde_json::{json, Value};

use crate::duality::{
    central_fixed_point_defect, find_killing_field, flow_defect, lift_killing_field,
    stab_sp_algebra, uduality_algebra, DEFAULT_SAMPLES, RANK_TOL, TOL_LIFT,
};
use crate::eom::config::GridConfig;
use crate::eom::{equivariance_check, residuals, transport_config, ChartMap, FieldConfiguration};
use crate::eom::residuals::self_duality_defect;
use crate::holonomy::{
    autb_theta, centralizer_algebra, conjugacy_invariants, matrix_from_rows, presentation_check,
    BundlePresentation, MAX_WORD_LEN,
};
use crate::linalg::max_abs_c;
use crate::model::{builtin, builtin_source, parse_model, Model, BUILTIN_NAMES};
use crate::report::{complex_matrix, real_matrix, Check, InputDigest, Report};
use crate::sampling::DEFAULT_SEED;
use crate::spinor::{
    builtin_frame, integrate_killing, killing_residual, refinement_order, bilinear_search, FramePatch,
};
use crate::symplectic::{fractional_action, sp_check, SymplecticMatrix, Taming, TOL_ALG};
use crate::{Error, RMat, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FILE: i32 = 3;

/// Default starting spinor of the Killing integration.
const EPS0: [f64; 4] = [1.0, 0.3, -0.2, 0.5];

#[derive(Parser, Debug)]
#[command(name = "emduality", version, about = "Electromagnetic duality toolkit")]
struct Cli {
    /// Include the wall time in the report (makes reports non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
    /// Override a check tolerance, `name=value`; repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Builtin period-matrix models.
    Models {
        #[command(subcommand)]
        action: ModelsAction,
    },
    /// Stabilizer algebra of the period matrix in sp(2n).
    Stabilizer {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// U-duality algebra and its projections.
    Uduality {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Lift of a Killing field of the scalar chart to sp(2n).
    Lift {
        #[arg(long)]
        model: String,
        /// Index or name of a Killing field of the chart.
        #[arg(long)]
        killing: String,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Checks that (f, A) is a U-duality pair: N(f(p)) = A·N(p).
    PairCheck {
        #[arg(long)]
        model: String,
        #[arg(long = "f")]
        f: String,
        /// JSON file with the rows of A.
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
    },
    /// Centralizer of the holonomy in sp(2n), or in Aut(S, ω, J) with a taming.
    Centralizer {
        #[arg(long)]
        bundle: PathBuf,
        /// JSON file with the rows of a taming J.
        #[arg(long)]
        taming: Option<PathBuf>,
    },
    /// Trace invariants of reduced words in the generators.
    Invariants {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        maxlen: usize,
    },
    /// Twisted self-duality of a grid configuration.
    Selfdual {
        #[arg(long)]
        config: PathBuf,
    },
    /// Einstein, scalar and Maxwell residuals of a grid configuration.
    Residuals {
        #[arg(long)]
        config: PathBuf,
        /// Also require every residual to vanish within this tolerance.
        #[arg(long)]
        require_solution: Option<f64>,
    },
    /// Residuals before and after transport along (f, A).
    Transport {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "f")]
        f: String,
        #[arg(long = "A")]
        a: PathBuf,
    },
    /// Integrates a Killing spinor on a builtin frame and measures convergence.
    SpinorCheck {
        #[arg(long)]
        frame: String,
        #[arg(long)]
        lambda: f64,
        /// Points per axis of the coarse grid; the fine grid has 2n - 1.
        #[arg(long, default_value_t = 9)]
        points: usize,
    },
    /// First-order system of the spinor bilinears (u, l).
    #[command(name = "thm53", visible_alias = "bilinears")]
    Bilinears {
        #[arg(long)]
        frame: String,
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 9)]
        points: usize,
    },
}

#[derive(Subcommand, Debug)]
enum ModelsAction {
    List,
    Show { name: String },
}

/// Result of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Option<Report>,
    /// Text for standard error (usage and help).
    pub message: Option<String>,
}

/// Tolerance lookup with command-line overrides.
struct Ctx {
    overrides: BTreeMap<String, f64>,
    digest: InputDigest,
}

impl Ctx {
    fn tol(&self, name: &str, default: f64) -> f64 {
        self.overrides.get(name).copied().unwrap_or(default)
    }

    fn read(&mut self, path: &Path) -> Result<String> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        self.digest.add(&path.display().to_string(), text.as_bytes());
        Ok(text)
    }

    /// A builtin name, or a path to a model file.
    fn model(&mut self, spec: &str) -> Result<Model> {
        if builtin_source(spec).is_ok() {
            return builtin(spec);
        }
        let path = Path::new(spec);
        if spec.contains('/') || spec.contains('.') || path.exists() {
            let text = self.read(path)?;
            return parse_model(&text).map_err(|e| file_error(path, e));
        }
        Err(Error::NotFound {
            kind: "model",
            name: spec.to_string(),
        })
    }

    fn matrix(&mut self, path: &Path) -> Result<RMat> {
        let text = self.read(path)?;
        let rows: Vec<Vec<f64>> = serde_json::from_str(&text).map_err(|e| Error::Format {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        matrix_from_rows(&rows).map_err(|e| file_error(path, e))
    }

    fn bundle(&mut self, path: &Path) -> Result<BundlePresentation> {
        let text = self.read(path)?;
        BundlePresentation::from_json(&text).map_err(|e| file_error(path, e))
    }

    fn config(&mut self, path: &Path) -> Result<FieldConfiguration> {
        let text = self.read(path)?;
        let cfg = GridConfig::from_json(&text).map_err(|e| file_error(path, e))?;
        let base = path.parent();
        if let Some(file) = &cfg.model_file {
            let p = base.map_or_else(|| PathBuf::from(file), |b| b.join(file));
            let model_text = self.read(&p)?;
            parse_model(&model_text).map_err(|e| file_error(&p, e))?;
        }
        cfg.build(base)
    }
}

/// Attaches a path to parse errors so they count as file errors.
fn file_error(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse { .. } | Error::UnknownSymbol { .. } | Error::Format { .. } => Error::Format {
            path: path.display().to_string(),
            message: e.to_string(),
        },
        other => other,
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } | Error::Format { .. } => EXIT_FILE,
        Error::NotFound { .. } | Error::Invalid(_) => EXIT_USAGE,
        _ => EXIT_CHECK,
    }
}

fn seed_from_env() -> std::result::Result<u64, String> {
    match std::env::var("EMDUALITY_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| format!("EMDUALITY_SEED must be an unsigned integer, got `{s}`")),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// Runs one invocation; `argv` excludes the program name.
pub fn run<S: AsRef<str>>(argv: &[S]) -> Outcome {
    let args: Vec<String> = argv.iter().map(|s| s.as_ref().to_string()).collect();
    let mut report = Report::new(args.clone(), DEFAULT_SEED);
    let mut digest = InputDigest::new();
    for a in &args {
        digest.add("arg", a.as_bytes());
    }
    report.inputs_digest = digest.hex();
    let cli = match Cli::try_parse_from(std::iter::once("emduality".to_string()).chain(args)) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome {
                    code: EXIT_OK,
                    report: None,
                    message: Some(text),
                };
            }
            report.error = Some(format!("usage: {}", e.kind()));
            return Outcome {
                code: EXIT_USAGE,
                report: Some(report),
                message: Some(text),
            };
        }
    };
    match seed_from_env() {
        Ok(s) => report.seed = s,
        Err(msg) => {
            report.error = Some(msg.clone());
            return Outcome {
                code: EXIT_USAGE,
                report: Some(report),
                message: Some(msg),
            };
        }
    }
    let mut overrides = BTreeMap::new();
    for t in &cli.tol {
        match t.split_once('=').map(|(k, v)| (k.trim(), v.trim().parse::<f64>())) {
            Some((k, Ok(v))) if v >= 0.0 => {
                overrides.insert(k.to_string(), v);
            }
            _ => {
                let msg = format!("cannot read tolerance override `{t}`");
                report.error = Some(msg.clone());
                return Outcome {
                    code: EXIT_USAGE,
                    report: Some(report),
                    message: Some(msg),
                };
            }
        }
    }
    let mut ctx = Ctx {
        overrides,
        digest,
    };
    let start = Instant::now();
    let result = dispatch(&cli.command, &mut ctx, &mut report);
    report.inputs_digest = ctx.digest.hex();
    if !ctx.overrides.is_empty() {
        report.set("tolerance_overrides", json!(ctx.overrides));
        for name in ctx.overrides.keys() {
            if report.check(name).is_none() {
                report.warnings.push(format!("tolerance override `{name}` matches no check"));
            }
        }
    }
    if cli.timing {
        report.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    let code = match result {
        Ok(()) if report.passed() => EXIT_OK,
        Ok(()) => EXIT_CHECK,
        Err(e) => {
            report.error = Some(e.to_string());
            exit_code(&e)
        }
    };
    Outcome {
        code,
        message: report.error.clone(),
        report: Some(report),
    }
}

fn dispatch(cmd: &Command, ctx: &mut Ctx, r: &mut Report) -> Result<()> {
    match cmd {
        Command::Models { action } => models(action, ctx, r),
        Command::Stabilizer { model, samples } => stabilizer(ctx, r, model, *samples),
        Command::Uduality { model, samples } => uduality(ctx, r, model, *samples),
        Command::Lift {
            model,
            killing,
            samples,
        } => lift(ctx, r, model, killing, *samples),
        Command::PairCheck {
            model,
            f,
            a,
            samples,
        } => pair_check(ctx, r, model, f, a, *samples),
        Command::Centralizer { bundle, taming } => centralizer(ctx, r, bundle, taming.as_deref()),
        Command::Invariants { bundle, maxlen } => invariants(ctx, r, bundle, *maxlen),
        Command::Selfdual { config } => selfdual(ctx, r, config),
        Command::Residuals {
            config,
            require_solution,
        } => residual_cmd(ctx, r, config, *require_solution),
        Command::Transport { config, f, a } => transport(ctx, r, config, f, a),
        Command::SpinorCheck {
            frame,
            lambda,
            points,
        } => spinor_check(ctx, r, frame, *lambda, *points),
        Command::Bilinears {
            frame,
            lambda,
            points,
        } => bilinears(ctx, r, frame, *lambda, *points),
    }
}

fn models(action: &ModelsAction, ctx: &mut Ctx, r: &mut Report) -> Result<()> {
    match action {
        ModelsAction::List => {
            r.set("models", json!(BUILTIN_NAMES));
            r.set("parametrized", json!(["constant-i:N"]));
            Ok(())
        }
        ModelsAction::Show { name } => {
            let m = ctx.model(name)?;
            r.set("name", m.name.clone());
            r.set("nv", m.nv);
            r.set("chart", format!("{:?}", m.chart.kind));
            r.set("source", m.to_source());
            let points = m.chart.samples(DEFAULT_SAMPLES);
            let valid = m.validate(&points);
            r.push(Check::equals(
                "siegel_on_samples",
                if valid.is_ok() { 0.0 } else { 1.0 },
                0.0,
                0.0,
            ));
            if let Err(e) = valid {
                r.warnings.push(e.to_string());
            } else {
                let p = &points[0];
                r.set("sample_point", json!(p));
                r.set("period_matrix", complex_matrix(m.period(p)?.matrix()));
            }
            Ok(())
        }
    }
}

fn stabilizer(ctx: &mut Ctx, r: &mut Report, spec: &str, samples: usize) -> Result<()> {
    let model = ctx.model(spec)?;
    let points = model.chart.samples(samples);
    let rep = stab_sp_algebra(&model, &points)?;
    r.set("model", model.name.clone());
    r.set("dim_stab_sp", rep.dim);
    r.set("samples", rep.samples);
    r.set("prefix_dims", json!(rep.prefix_dims));
    r.set("basis", Value::Array(rep.basis.iter().map(real_matrix).collect()));
    r.warnings.extend(rep.warnings.iter().cloned());
    r.push(Check::at_most("linear_residual", rep.residual, ctx.tol("linear_residual", RANK_TOL)));
    let flow = flow_defect(&model, &rep.basis, &[0.1, 0.5, 1.0], &points)?;
    r.push(Check::at_most("group_flow", flow, ctx.tol("group_flow", 1e-8)));
    let central = central_fixed_point_defect(&model, &points)?;
    r.push(Check::at_most("central_fixed_point", central, ctx.tol("central_fixed_point", 0.0)));
    if rep.dim == 0 {
        r.set(
            "note",
            "algebra dim 0; discrete part not computed beyond the center {±Id}",
        );
    }
    Ok(())
}

fn uduality(ctx: &mut Ctx, r: &mut Report, spec: &str, samples: usize) -> Result<()> {
    let model = ctx.model(spec)?;
    let points = model.chart.samples(samples);
    let rep = uduality_algebra(&model, &points)?;
    r.set("model", model.name.clone());
    r.set("dim_u", rep.dim_u);
    r.set("dim_stab_sp", rep.dim_stab);
    r.set("dim_iso_pr", rep.dim_iso_pr);
    r.set("exactness_gap", rep.exactness_gap);
    let lifts: Vec<Value> = rep
        .lifts
        .iter()
        .map(|l| {
            json!({
                "field": l.field,
                "residual": l.residual,
                "generator": l.generator.as_ref().map(real_matrix),
            })
        })
        .collect();
    r.set("lifts", Value::Array(lifts));
    r.set(
        "basis",
        Value::Array(
            rep.basis
                .iter()
                .map(|(x, xi)| json!({"sp": real_matrix(x), "killing": xi}))
                .collect(),
        ),
    );
    r.warnings.extend(rep.warnings.iter().cloned());
    r.set(
        "note",
        "algebra level only; components of the group beyond the identity component are not computed",
    );
    r.push(Check::equals("exactness_gap", rep.exactness_gap as f64, 0.0, 0.0));
    let worst = rep
        .lifts
        .iter()
        .filter(|l| l.generator.is_some())
        .fold(0.0f64, |a, l| a.max(l.residual));
    r.push(Check::at_most("lift_residual", worst, ctx.tol("lift_residual", TOL_LIFT)));
    Ok(())
}

fn lift(ctx: &mut Ctx, r: &mut Report, spec: &str, killing: &str, samples: usize) -> Result<()> {
    let model = ctx.model(spec)?;
    let xi = find_killing_field(&model.chart, killing)?;
    let points = model.chart.samples(samples);
    let l = lift_killing_field(&model, &xi, &points)?;
    r.set("model", model.name.clone());
    r.set("field", l.field.clone());
    r.set("lifted", l.generator.is_some());
    r.set("generator", l.generator.as_ref().map_or(Value::Null, real_matrix));
    r.push(Check::at_most("lift_residual", l.residual, ctx.tol("lift_residual", TOL_LIFT)));
    Ok(())
}

/// Largest relative `|A·N(p) - N(f(p))|` over the samples.
fn pair_defect(model: &Model, f: &ChartMap, a: &SymplecticMatrix, points: &[Vec<f64>]) -> Result<f64> {
    let mut worst = 0.0f64;
    for p in points {
        let lhs = fractional_action(a, &model.period(p)?)?;
        let rhs = model.period(&f.apply(p)?)?;
        let scale = max_abs_c(rhs.matrix()).max(1.0);
        worst = worst.max(max_abs_c(&(lhs.matrix() - rhs.matrix())) / scale);
    }
    Ok(worst)
}

/// Reads `A`, recording its symplectic violation as a check.
fn symplectic_input(ctx: &mut Ctx, r: &mut Report, path: &Path) -> Result<Option<SymplecticMatrix>> {
    let m = ctx.matrix(path)?;
    let tol = ctx.tol("symplectic", TOL_ALG);
    let c = sp_check(&m, tol)?;
    r.push(Check::at_most("symplectic", c.violation, tol));
    Ok(if c.violation <= tol {
        Some(SymplecticMatrix::with_tolerance(m, tol)?)
    } else {
        None
    })
}

fn pair_check(ctx: &mut Ctx, r: &mut Report, spec: &str, f: &str, a: &Path, samples: usize) -> Result<()> {
    let model = ctx.model(spec)?;
    let f = ChartMap::parse(f)?;
    f.check_isometry(&model.chart)?;
    r.set("model", model.name.clone());
    let Some(a) = symplectic_input(ctx, r, a)? else {
        return Ok(());
    };
    if a.n() != model.nv {
        return Err(Error::Dimension(format!("A has rank {}, the model {}", a.n(), model.nv)));
    }
    let points = model.chart.samples(samples);
    let d = pair_defect(&model, &f, &a, &points)?;
    r.push(Check::at_most("pair_defect", d, ctx.tol("pair_defect", TOL_LIFT)));
    Ok(())
}

fn centralizer(ctx: &mut Ctx, r: &mut Report, bundle: &Path, taming: Option<&Path>) -> Result<()> {
    let p = ctx.bundle(bundle)?;
    let tol = ctx.tol("presentation", TOL_ALG);
    let diag = presentation_check(&p, tol)?;
    let worst = diag
        .generator_violations
        .iter()
        .chain(&diag.relation_violations)
        .fold(0.0f64, |a, x| a.max(*x));
    r.push(Check::at_most("presentation", worst, tol));
    let n = p.nv;
    r.set("nv", n);
    r.set("dim_sp", n * (2 * n + 1));
    let alg = match taming {
        Some(path) => {
            let j = Taming::new(ctx.matrix(path)?).map_err(|e| file_error(path, e))?;
            r.set("algebra", "aut(S, omega, J) ∩ centralizer");
            autb_theta(&p, &j)?
        }
        None => {
            r.set("algebra", "centralizer in sp(2n)");
            centralizer_algebra(&p)?
        }
    };
    r.set("dim", alg.dim);
    r.set("basis", Value::Array(alg.basis.iter().map(real_matrix).collect()));
    r.push(Check::at_most("basis_residual", alg.residual, ctx.tol("basis_residual", 1e-10)));
    Ok(())
}

fn invariants(ctx: &mut Ctx, r: &mut Report, bundle: &Path, maxlen: usize) -> Result<()> {
    if maxlen > MAX_WORD_LEN {
        return Err(Error::Invalid(format!("--maxlen is limited to {MAX_WORD_LEN}")));
    }
    let p = ctx.bundle(bundle)?;
    let tol = ctx.tol("presentation", TOL_ALG);
    let diag = presentation_check(&p, tol)?;
    let worst = diag
        .generator_violations
        .iter()
        .chain(&diag.relation_violations)
        .fold(0.0f64, |a, x| a.max(*x));
    r.push(Check::at_most("presentation", worst, tol));
    let inv = conjugacy_invariants(&p, maxlen)?;
    r.set("maxlen", maxlen);
    r.set("invariants", json!(inv));
    Ok(())
}

fn grid_meta(cfg: &FieldConfiguration) -> Value {
    json!({
        "lo": cfg.patch.lo,
        "hi": cfg.patch.hi,
        "points": cfg.patch.n,
        "model": cfg.theory.model.name,
    })
}

fn selfdual(ctx: &mut Ctx, r: &mut Report, path: &Path) -> Result<()> {
    let cfg = ctx.config(path)?;
    r.set("grid", grid_meta(&cfg));
    r.set("convention", "*V = -J V, the +1 eigenspace of the twisted star J*");
    r.set("twisted_star_eigenvalue", 1);
    let d = self_duality_defect(&cfg)?;
    r.push(Check::at_most("self_duality", d, ctx.tol("self_duality", 1e-10)));
    Ok(())
}

fn residual_cmd(ctx: &mut Ctx, r: &mut Report, path: &Path, solution: Option<f64>) -> Result<()> {
    let cfg = ctx.config(path)?;
    r.set("grid", grid_meta(&cfg));
    let d = self_duality_defect(&cfg)?;
    if d > 1e-10 {
        r.warnings.push(format!("configuration is not twisted self-dual (defect {d:.3e})"));
    }
    let rep = residuals(&cfg)?;
    let count = rep.nodes.len().max(1) as f64;
    let mean_e = rep.einstein.iter().map(|e| e.amax()).sum::<f64>() / count;
    let mean_s = rep.scalar_local.iter().map(|s| s.amax()).sum::<f64>() / count;
    let mean_m = rep
        .maxwell
        .iter()
        .map(|m| m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs())))
        .sum::<f64>()
        / count;
    r.set(
        "residuals",
        json!({
            "einstein": {"max": rep.einstein_max, "mean": mean_e},
            "scalar": {"max": rep.scalar_max, "mean": mean_s},
            "maxwell": {"max": rep.maxwell_max, "mean": mean_m},
        }),
    );
    r.set(
        "worst_nodes",
        json!({
            "einstein": cfg.patch.coords(rep.worst[0]),
            "scalar": cfg.patch.coords(rep.worst[1]),
            "maxwell": cfg.patch.coords(rep.worst[2]),
        }),
    );
    r.set("nodes", rep.nodes.len());
    r.push(Check::at_most("scalar_assembly_gap", rep.assembly_gap, ctx.tol("scalar_assembly_gap", 1e-9)));
    if let Some(tol) = solution {
        r.push(Check::at_most("einstein_max", rep.einstein_max, ctx.tol("einstein_max", tol)));
        r.push(Check::at_most("scalar_max", rep.scalar_max, ctx.tol("scalar_max", tol)));
        r.push(Check::at_most("maxwell_max", rep.maxwell_max, ctx.tol("maxwell_max", tol)));
    }
    Ok(())
}

fn transport(ctx: &mut Ctx, r: &mut Report, path: &Path, f: &str, a: &Path) -> Result<()> {
    let cfg = ctx.config(path)?;
    r.set("grid", grid_meta(&cfg));
    let f = ChartMap::parse(f)?;
    let Some(a) = symplectic_input(ctx, r, a)? else {
        return Ok(());
    };
    let eq = equivariance_check(&f, &a, &cfg)?;
    let moved = transport_config(&f, &a, &cfg)?;
    let tol = 1e-9;
    r.push(Check::at_most("einstein_gap", eq.einstein_gap, ctx.tol("einstein_gap", tol)));
    r.push(Check::at_most("maxwell_gap", eq.maxwell_gap, ctx.tol("maxwell_gap", tol)));
    r.push(Check::at_most("scalar_gap", eq.scalar_gap, ctx.tol("scalar_gap", tol)));
    let sd = self_duality_defect(&moved)?;
    r.push(Check::at_most("transported_self_duality", sd, ctx.tol("transported_self_duality", 1e-10)));
    r.set(
        "before",
        json!({"einstein": eq.before.einstein_max, "scalar": eq.before.scalar_max, "maxwell": eq.before.maxwell_max}),
    );
    r.set(
        "after",
        json!({"einstein": eq.after.einstein_max, "scalar": eq.after.scalar_max, "maxwell": eq.after.maxwell_max}),
    );
    // Whether the transported theory is the original one.
    let model = &cfg.theory.model;
    if a.n() == model.nv {
        let points = model.chart.samples(DEFAULT_SAMPLES);
        match pair_defect(model, &f, &a, &points) {
            Ok(d) => {
                r.set("uduality_pair_defect", d);
                r.set("same_theory", d <= TOL_LIFT);
            }
            Err(e) => r.warnings.push(format!("pair defect not computed: {e}")),
        }
    }
    Ok(())
}

fn frames(name: &str, lambda: f64, points: usize) -> Result<(FramePatch, FramePatch)> {
    if points < 5 {
        return Err(Error::Invalid("--points must be at least 5".into()));
    }
    Ok((builtin_frame(name, lambda, points)?, builtin_frame(name, lambda, 2 * points - 1)?))
}

fn spinor_check(ctx: &mut Ctx, r: &mut Report, frame: &str, lambda: f64, points: usize) -> Result<()> {
    let (coarse, fine) = frames(frame, lambda, points)?;
    let eps0 = Vector4::from(EPS0);
    let ic = integrate_killing(&coarse, lambda, eps0)?;
    let jf = integrate_killing(&fine, lambda, eps0)?;
    let rc = killing_residual(&coarse, &ic.field)?;
    let rf = killing_residual(&fine, &jf.field)?;
    r.set("frame", frame);
    r.set("lambda", lambda);
    r.set("points", json!([points, 2 * points - 1]));
    r.set("killing_residual", json!([rc.max, rf.max]));
    r.set("path_defect", json!([ic.path_defect, jf.path_defect]));
    let exact = ctx.tol("killing_exact", 1e-14);
    if rc.max <= exact && rf.max <= exact {
        r.push(Check::at_most("killing_exact", rc.max.max(rf.max), exact));
        r.push(Check::at_most("path_defect", ic.path_defect.max(jf.path_defect), exact));
    } else {
        let (_, _, order) = refinement_order((&coarse.patch, &rc), (&fine.patch, &rf))?;
        r.set("residual_order", order);
        r.push(Check::within("residual_order", order, 1.8, 2.2));
        r.push(Check::at_most(
            "path_defect_ratio",
            jf.path_defect / ic.path_defect,
            ctx.tol("path_defect_ratio", 1.0),
        ));
    }
    Ok(())
}

fn bilinears(ctx: &mut Ctx, r: &mut Report, frame: &str, lambda: f64, points: usize) -> Result<()> {
    let (coarse, fine) = frames(frame, lambda, points)?;
    let eps0 = Vector4::from(EPS0);
    let mut worst = Vec::new();
    let mut hs = Vec::new();
    for (k, fr) in [&coarse, &fine].into_iter().enumerate() {
        let int = integrate_killing(fr, lambda, eps0)?;
        let choices = bilinear_search(fr, &int.field)?;
        let best = &choices[0];
        let rep = &best.report;
        if !rep.nontrivial {
            r.warnings.push("the bilinear u vanishes identically".into());
        }
        let key = if k == 0 { "coarse" } else { "fine" };
        r.set(
            key,
            json!({
                "points": fr.patch.n[0],
                "l_sign": best.l_sign,
                "lambda_sign": best.lambda_sign,
                "nabla_u": rep.nabla_u,
                "nabla_l": rep.nabla_l,
                "null": rep.null,
                "unit": rep.unit,
                "orthogonal": rep.orthogonal,
                "killing": rep.killing,
                "dkappa": rep.dkappa,
                "all_choices": choices.iter().map(|c| json!({
                    "l_sign": c.l_sign, "lambda_sign": c.lambda_sign, "worst": c.report.worst()
                })).collect::<Vec<_>>(),
            }),
        );
        let alg = rep.null.max(rep.unit).max(rep.orthogonal);
        r.push(Check::at_most(&format!("algebraic_{key}"), alg, ctx.tol("algebraic", 1e-10)));
        worst.push(rep.worst());
        hs.push(fr.patch.spacing(0));
    }
    let exact = ctx.tol("bilinear_exact", 1e-12);
    if worst[1] <= exact {
        r.push(Check::at_most("bilinear_exact", worst[1], exact));
    } else {
        let c: Vec<f64> = worst.iter().zip(&hs).map(|(w, h)| w / (h * h)).collect();
        r.set("c_constant", json!(c));
        // A stable constant moves by less than a factor √2 per halving.
        r.push(Check::within("c_ratio", c[1] / c[0], 0.5f64.sqrt(), 2.0f64.sqrt()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors() {
        assert_eq!(run(&["frobnicate"]).code, EXIT_USAGE);
        assert_eq!(run(&["models", "show", "unknown"]).code, EXIT_USAGE);
        assert_eq!(run(&["stabilizer", "--model", "no/such/file.model"]).code, EXIT_FILE);
        assert_eq!(run(&["--help"]).code, EXIT_OK);
    }

    #[test]
    fn models_list() {
        let out = run(&["models", "list"]);
        assert_eq!(out.code, 0);
        assert_eq!(out.report.unwrap().data["models"][3], "t3");
    }

    #[test]
    fn stabilizer_axio_dilaton() {
        let out = run(&["stabilizer", "--model", "axio-dilaton"]);
        let rep = out.report.unwrap();
        assert_eq!(out.code, 0, "{}", rep.to_json());
        assert_eq!(rep.data["dim_stab_sp"], 1);
    }

    #[test]
    fn uduality_t3() {
        let out = run(&["uduality", "--model", "t3"]);
        let rep = out.report.unwrap();
        assert_eq!(out.code, 0, "{}", rep.to_json());
        assert_eq!(
            (rep.data["dim_u"].clone(), rep.data["dim_stab_sp"].clone(), rep.data["dim_iso_pr"].clone()),
            (json!(3), json!(0), json!(3))
        );
        assert_eq!(rep.data["exactness_gap"], 0);
    }

    #[test]
    fn deterministic() {
        let a = run(&["uduality", "--model", "identity-tau"]).report.unwrap().to_json();
        let b = run(&["uduality", "--model", "identity-tau"]).report.unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn tolerance_override() {
        let out = run(&["stabilizer", "--model", "t3", "--tol", "linear_residual=-1"]);
        assert_eq!(out.code, EXIT_USAGE);
        let out = run(&["lift", "--model", "identity-tau", "--killing", "0", "--tol", "lift_residual=0.5"]);
        let rep = out.report.unwrap();
        assert_eq!(rep.check("lift_residual").unwrap().tolerance, 0.5);
    }
}
