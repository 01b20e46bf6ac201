//! Batch front end: parses JSON configs, dispatches subcommands, writes
//! CSV/JSON tables. Exit codes: 0 success, 2 invalid config or I/O
//! failure, 3 when --strict is set and a verdict-bearing subcommand comes
//! back inconclusive.

mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use config::{load_body, load_measure, load_phi, MeasureKind};
use logvex::sections::PairStatus;
use logvex::{
    bp_experiment, bp_experiment_uniform, build_pathological_phi, exceptional_set_measure,
    fact_check, induction_diagnostics, ldp_scan, rectangle_demo, section_measure, witness_search,
    DominanceVerdict, Est, FactStatus, LdpVerdict, Method, TailBracket, WitnessOutcome,
};
use report::{emit, envelope, num, opt_num, resolve_format, Format, Table};

#[derive(Parser)]
#[command(
    name = "logvex",
    version,
    about = "Measures e^{-phi(||x||_L)} on convex bodies: masses, tails, sections, diagnostics"
)]
struct Cli {
    /// Output file; format inferred from the extension (.csv / .json)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Force the output format regardless of extension
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Exit 3 when a verdict-bearing subcommand is inconclusive
    #[arg(long, global = true)]
    strict: bool,

    /// Worker threads (default: LOGVEX_THREADS, else all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Monte Carlo sample budget for paths without closed forms
    #[arg(long, global = true, default_value_t = 200_000)]
    budget: u64,

    /// Seed for all Monte Carlo estimates
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Debug)]
struct Grid(Vec<f64>);

/// start:end:count with an optional :lin / :log suffix (default lin).
fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let log = match parts.len() {
        3 => false,
        4 => match parts[3] {
            "lin" => false,
            "log" => true,
            other => return Err(format!("grid spacing must be lin or log, got `{other}`")),
        },
        _ => return Err("grid must be start:end:count[:lin|:log]".into()),
    };
    let start: f64 = parts[0].parse().map_err(|e| format!("grid start: {e}"))?;
    let end: f64 = parts[1].parse().map_err(|e| format!("grid end: {e}"))?;
    let count: usize = parts[2].parse().map_err(|e| format!("grid count: {e}"))?;
    if count == 0 {
        return Err("grid count must be >= 1".into());
    }
    if count == 1 {
        return Ok(Grid(vec![start]));
    }
    if log && (!(start > 0.0) || !(end > 0.0)) {
        return Err("log spacing needs positive endpoints".into());
    }
    let n = (count - 1) as f64;
    let pts = (0..count)
        .map(|i| {
            let f = i as f64 / n;
            if log {
                start * (end / start).powf(f)
            } else {
                start + (end - start) * f
            }
        })
        .collect();
    Ok(Grid(pts))
}

#[derive(Subcommand)]
enum Cmd {
    /// mu(tK) over a grid of dilations t
    Mass {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        body: PathBuf,
        #[arg(long, value_parser = parse_grid)]
        grid: Grid,
    },
    /// Certified bracket for the complement mass mu((tK)^c)
    Tail {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        body: PathBuf,
        #[arg(long, value_parser = parse_grid)]
        grid: Grid,
    },
    /// Large-deviation ratio rho(t) with window suprema and trend verdict
    LdpScan {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        body: PathBuf,
        #[arg(long, value_parser = parse_grid)]
        grid: Grid,
        /// Window factor w: suprema run over [t, w t]
        #[arg(long, default_value_t = 2.0)]
        window: f64,
        /// Acceptance band half-width around -1
        #[arg(long, default_value_t = 0.15)]
        delta: f64,
    },
    /// Moment ladder F_m, ratios X_m and Y, and the by-parts inequality
    Induction {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long, value_parser = parse_grid)]
        grid: Grid,
        #[arg(long, default_value_t = 3)]
        mmax: u32,
    },
    /// Piecewise-quadratic phi with ln phi' > phi at every knot
    PathologicalPhi {
        #[arg(long)]
        kmax: usize,
    },
    /// Doubling search for t with mu(t R L) > mu(tK), certified bounds only
    Witness {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        body: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        r_scale: f64,
        #[arg(long, default_value_t = 0.5)]
        t0: f64,
        #[arg(long, default_value_t = 20.0)]
        tmax: f64,
    },
    /// Hyperplane section measures mu_{n-1}(rK cap xi-perp) over a grid of r
    Sections {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        body: PathBuf,
        /// Section direction, comma separated, e.g. 0,0,1
        #[arg(long, value_delimiter = ',', required = true)]
        xi: Vec<f64>,
        #[arg(long, value_parser = parse_grid)]
        grid: Grid,
    },
    /// Section dominance over (r, xi) grids plus the mass comparison
    BpExperiment {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        body_k: PathBuf,
        #[arg(long)]
        body_l: PathBuf,
        #[arg(long, value_parser = parse_grid)]
        grid: Grid,
        /// Direction net size (default 64 * dimension)
        #[arg(long)]
        net: Option<usize>,
    },
    /// Exact |tB cap Omega| <= |tOmega cap Omega| on a log grid
    RectangleDemo {
        #[arg(long, default_value_t = 0.01)]
        tmin: f64,
        #[arg(long, default_value_t = 10.0)]
        tmax: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// |K| <= |RL| implies mu(K) <= mu(RL): certified check with replay
    FactCheck {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        body: PathBuf,
        #[arg(long)]
        r: f64,
    },
    /// Lebesgue measure of {t: mu((tK)^c) < e^{-alpha phi(t)}} on a grid
    ExceptionalSet {
        #[arg(long)]
        measure: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 10.0)]
        tmax: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
}

struct Output {
    json: String,
    table: Table,
    inconclusive: bool,
    summary: String,
}

fn method_str(m: Method) -> &'static str {
    match m {
        Method::Exact => "exact",
        Method::Quadrature => "quadrature",
        Method::MonteCarlo => "monte_carlo",
    }
}

fn status_str(s: PairStatus) -> &'static str {
    match s {
        PairStatus::Holds => "holds",
        PairStatus::Fails => "fails",
        PairStatus::Inconclusive => "inconclusive",
    }
}

fn norm_measure(path: &Path) -> Result<logvex::Measure, String> {
    match load_measure(path)? {
        MeasureKind::Norm(m) => Ok(m),
        MeasureKind::Uniform(_) => Err(format!(
            "{}: this subcommand needs a phi-based measure, not uniform_on",
            path.display()
        )),
    }
}

#[derive(Serialize, Deserialize)]
struct MassRow {
    t: f64,
    estimate: Est,
}

fn run_mass(measure: &Path, body: &Path, grid: &[f64], budget: u64, seed: u64) -> Result<Output, String> {
    let mk = load_measure(measure)?;
    let k = load_body(body)?;
    let rows: Vec<MassRow> = grid
        .iter()
        .map(|&t| -> Result<MassRow, String> {
            let estimate = match &mk {
                MeasureKind::Norm(m) => m.log_mass(&k, t, budget, seed),
                MeasureKind::Uniform(u) => u.log_mass(&k, t, budget, seed),
            }
            .map_err(|e| e.to_string())?;
            Ok(MassRow { t, estimate })
        })
        .collect::<Result<_, _>>()?;
    let mut table =
        Table::new(&["t", "log_mass", "abs_log_error", "method", "count", "degenerate"]);
    for r in &rows {
        table.row(vec![
            num(r.t),
            num(r.estimate.log_value),
            num(r.estimate.abs_log_error),
            method_str(r.estimate.method).into(),
            r.estimate.count.to_string(),
            r.estimate.degenerate.to_string(),
        ]);
    }
    Ok(Output { json: envelope("mass", &rows), table, inconclusive: false, summary: String::new() })
}

#[derive(Serialize, Deserialize)]
struct TailRow {
    t: f64,
    bracket: TailBracket<f64>,
}

fn run_tail(measure: &Path, body: &Path, grid: &[f64], budget: u64, seed: u64) -> Result<Output, String> {
    let m = norm_measure(measure)?;
    let k = load_body(body)?;
    let rows: Vec<TailRow> = grid
        .iter()
        .map(|&t| -> Result<TailRow, String> {
            let bracket = m.tail_log_bracket(&k, t, budget, seed).map_err(|e| e.to_string())?;
            Ok(TailRow { t, bracket })
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&[
        "t",
        "lower_log",
        "lower_err",
        "point_log",
        "point_err",
        "upper_log",
        "upper_err",
        "clamped",
    ]);
    for r in &rows {
        table.row(vec![
            num(r.t),
            num(r.bracket.lower.log_value),
            num(r.bracket.lower.abs_log_error),
            num(r.bracket.point.log_value),
            num(r.bracket.point.abs_log_error),
            num(r.bracket.upper.log_value),
            num(r.bracket.upper.abs_log_error),
            r.bracket.clamped.to_string(),
        ]);
    }
    Ok(Output { json: envelope("tail", &rows), table, inconclusive: false, summary: String::new() })
}

fn run_ldp_scan(
    measure: &Path,
    body: &Path,
    grid: &[f64],
    window: f64,
    delta: f64,
    budget: u64,
    seed: u64,
) -> Result<Output, String> {
    let m = norm_measure(measure)?;
    let k = load_body(body)?;
    let rep = ldp_scan(&m, &k, grid, window, delta, budget, seed).map_err(|e| e.to_string())?;
    let mut table = Table::new(&["t", "rho", "rho_lo", "rho_hi", "window_sup"]);
    for r in &rep.rows {
        table.row(vec![num(r.t), num(r.rho), num(r.rho_lo), num(r.rho_hi), num(r.window_sup)]);
    }
    let verdict = match rep.verdict {
        LdpVerdict::Consistent => "consistent",
        LdpVerdict::Inconclusive => "inconclusive",
        LdpVerdict::EmptyGrid => "empty_grid",
    };
    Ok(Output {
        json: envelope("ldp_scan", &rep),
        table,
        inconclusive: rep.verdict != LdpVerdict::Consistent,
        summary: format!("verdict: {verdict} ({})", rep.detail),
    })
}

fn run_induction(measure: &Path, grid: &[f64], m_max: u32) -> Result<Output, String> {
    let phi = load_phi(measure)?;
    let rep = induction_diagnostics(&phi, m_max, grid).map_err(|e| e.to_string())?;
    let mut header: Vec<String> = vec!["t".into(), "phi".into(), "dphi".into()];
    for m in 0..=m_max {
        header.push(format!("ln_f{m}"));
    }
    for m in 1..=m_max {
        header.push(format!("x{m}"));
    }
    header.extend(["y".into(), "xy_product".into(), "excluded".into(), "ibp_margin".into()]);
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut table = Table::new(&header_refs);
    for r in &rep.rows {
        let mut cells = vec![num(r.t), num(r.phi_t), num(r.dphi_t)];
        cells.extend(r.ln_f.iter().map(|&v| num(v)));
        cells.extend(r.x.iter().map(|&v| num(v)));
        if r.excluded {
            cells.extend(std::iter::repeat(String::new()).take(m_max as usize - r.x.len()));
        }
        cells.push(opt_num(r.y));
        cells.push(opt_num(r.xy_product));
        cells.push(r.excluded.to_string());
        cells.push(num(r.ibp_margin));
        table.row(cells);
    }
    Ok(Output {
        json: envelope("induction", &rep),
        table,
        inconclusive: false,
        summary: String::new(),
    })
}

fn run_pathological(k_max: usize) -> Result<Output, String> {
    let (_, rep) = build_pathological_phi(k_max).map_err(|e| e.to_string())?;
    let mut table =
        Table::new(&["k", "log2_alpha", "t_k", "t_k_frac_log2", "interior", "sharp"]);
    for knot in &rep.knots {
        table.row(vec![
            knot.k.to_string(),
            knot.log2_alpha.map(|v| v.to_string()).unwrap_or_default(),
            num(knot.t_k),
            num(knot.t_k_frac_log2),
            knot.t_k_interior.to_string(),
            knot.sharp.to_string(),
        ]);
    }
    Ok(Output {
        json: envelope("pathological_phi", &rep),
        table,
        inconclusive: false,
        summary: String::new(),
    })
}

fn run_witness(
    measure: &Path,
    body: &Path,
    r_scale: f64,
    t0: f64,
    t_max: f64,
) -> Result<Output, String> {
    let m = norm_measure(measure)?;
    let k = load_body(body)?;
    let outcome = witness_search(&m, &k, r_scale, &m.body, t0, t_max).map_err(|e| e.to_string())?;
    let mut table = Table::new(&["t", "k_tail_lower", "ref_tail_upper", "separated"]);
    let empty = Vec::new();
    let steps = match &outcome {
        WitnessOutcome::Witness { steps, .. } | WitnessOutcome::Inconclusive { steps, .. } => steps,
        WitnessOutcome::NoneFound { .. } => &empty,
    };
    for s in steps {
        table.row(vec![
            num(s.t),
            num(s.k_tail_lower),
            num(s.ref_tail_upper),
            s.separated.to_string(),
        ]);
    }
    let (inconclusive, summary) = match &outcome {
        WitnessOutcome::Witness { t, .. } => (false, format!("witness at t = {t}")),
        WitnessOutcome::NoneFound { inradius, .. } => {
            (false, format!("none found: R L inside K (inradius {inradius})"))
        }
        WitnessOutcome::Inconclusive { detail, .. } => (true, format!("inconclusive: {detail}")),
    };
    Ok(Output { json: envelope("witness", &outcome), table, inconclusive, summary })
}

#[derive(Serialize, Deserialize)]
struct SectionRow {
    r: f64,
    estimate: Est,
}

#[derive(Serialize, Deserialize)]
struct SectionsReport {
    xi: Vec<f64>,
    rows: Vec<SectionRow>,
}

fn run_sections(
    measure: &Path,
    body: &Path,
    xi: &[f64],
    grid: &[f64],
    budget: u64,
    seed: u64,
) -> Result<Output, String> {
    let m = norm_measure(measure)?;
    let k = load_body(body)?;
    let rows: Vec<SectionRow> = grid
        .iter()
        .map(|&r| -> Result<SectionRow, String> {
            let estimate =
                section_measure(&m, &k, xi, r, budget, seed).map_err(|e| e.to_string())?;
            Ok(SectionRow { r, estimate })
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&["r", "log_section", "abs_log_error", "method", "count"]);
    for r in &rows {
        table.row(vec![
            num(r.r),
            num(r.estimate.log_value),
            num(r.estimate.abs_log_error),
            method_str(r.estimate.method).into(),
            r.estimate.count.to_string(),
        ]);
    }
    let rep = SectionsReport { xi: xi.to_vec(), rows };
    Ok(Output {
        json: envelope("sections", &rep),
        table,
        inconclusive: false,
        summary: String::new(),
    })
}

fn run_bp_experiment(
    measure: &Path,
    body_k: &Path,
    body_l: &Path,
    grid: &[f64],
    net: Option<usize>,
    budget: u64,
    seed: u64,
) -> Result<Output, String> {
    let mk = load_measure(measure)?;
    let k = load_body(body_k)?;
    let l = load_body(body_l)?;
    let net_size = net.unwrap_or(64 * k.dim());
    let rep = match &mk {
        MeasureKind::Norm(m) => {
            bp_experiment(m, &k, &l, grid, net_size, budget, seed).map_err(|e| e.to_string())?
        }
        MeasureKind::Uniform(u) => bp_experiment_uniform(u, &k, &l, grid, net_size, budget, seed)
            .map_err(|e| e.to_string())?,
    };
    let mut table = Table::new(&["r", "xi", "k_log", "k_err", "l_log", "l_err", "status"]);
    for row in &rep.rows {
        let xi = row.xi.iter().map(|&v| num(v)).collect::<Vec<_>>().join(";");
        table.row(vec![
            num(row.r),
            xi,
            num(row.k.log_value),
            num(row.k.abs_log_error),
            num(row.l.log_value),
            num(row.l.abs_log_error),
            status_str(row.status).into(),
        ]);
    }
    let hyp = match &rep.hypothesis {
        DominanceVerdict::Holds => "holds".to_string(),
        DominanceVerdict::FailsAt { r, .. } => format!("fails at r = {r}"),
        DominanceVerdict::Inconclusive { unresolved } => {
            format!("inconclusive ({unresolved} unresolved pairs)")
        }
    };
    let inconclusive = matches!(rep.hypothesis, DominanceVerdict::Inconclusive { .. })
        || rep.conclusion == Some(logvex::sections::MassConclusion::Inconclusive);
    let summary = format!(
        "hypothesis: {hyp}; counterexample_certified: {}",
        rep.counterexample_certified
    );
    Ok(Output { json: envelope("bp_experiment", &rep), table, inconclusive, summary })
}

fn run_rectangle_demo(t_min: f64, t_max: f64, points: usize) -> Result<Output, String> {
    if points == 0 {
        return Err("rectangle demo needs at least one grid point".into());
    }
    let grid = parse_grid(&format!("{t_min}:{t_max}:{points}:log"))?;
    let rep = rectangle_demo(&grid.0).map_err(|e| e.to_string())?;
    let mut table = Table::new(&["t", "area_ball", "area_omega", "pass"]);
    for r in &rep.rows {
        table.row(vec![num(r.t), num(r.area_ball), num(r.area_omega), r.pass.to_string()]);
    }
    Ok(Output {
        json: envelope("rectangle_demo", &rep),
        table,
        inconclusive: false,
        summary: format!("all_pass: {}", rep.all_pass),
    })
}

fn run_fact_check(measure: &Path, body: &Path, r: f64, budget: u64, seed: u64) -> Result<Output, String> {
    let m = norm_measure(measure)?;
    let k = load_body(body)?;
    let rep = fact_check(&m, &k, r, budget, seed).map_err(|e| e.to_string())?;
    let mut table = Table::new(&["s", "lhs_log", "lhs_err", "rhs_log", "ok"]);
    for row in &rep.inner {
        table.row(vec![
            num(row.s),
            num(row.lhs.log_value),
            num(row.lhs.abs_log_error),
            num(row.rhs),
            row.ok.to_string(),
        ]);
    }
    let status = match rep.status {
        FactStatus::Holds => "holds",
        FactStatus::HypothesisViolated => "hypothesis_violated",
        FactStatus::Fails => "fails",
        FactStatus::Inconclusive => "inconclusive",
    };
    Ok(Output {
        json: envelope("fact_check", &rep),
        table,
        inconclusive: rep.status == FactStatus::Inconclusive,
        summary: format!("status: {status}"),
    })
}

fn run_exceptional_set(measure: &Path, alpha: f64, t_max: f64, step: f64) -> Result<Output, String> {
    let phi = load_phi(measure)?;
    let rep = exceptional_set_measure(&phi, alpha, t_max, step).map_err(|e| e.to_string())?;
    let mut table =
        Table::new(&["alpha", "t_max", "step", "measure", "points_in", "first_in", "last_in"]);
    table.row(vec![
        num(rep.alpha),
        num(rep.t_max),
        num(rep.step),
        num(rep.measure),
        rep.points_in.to_string(),
        opt_num(rep.first_in),
        opt_num(rep.last_in),
    ]);
    Ok(Output {
        json: envelope("exceptional_set", &rep),
        table,
        inconclusive: false,
        summary: String::new(),
    })
}

fn dispatch(cli: &Cli) -> Result<Output, String> {
    let (budget, seed) = (cli.budget, cli.seed);
    match &cli.cmd {
        Cmd::Mass { measure, body, grid } => run_mass(measure, body, &grid.0, budget, seed),
        Cmd::Tail { measure, body, grid } => run_tail(measure, body, &grid.0, budget, seed),
        Cmd::LdpScan { measure, body, grid, window, delta } => {
            run_ldp_scan(measure, body, &grid.0, *window, *delta, budget, seed)
        }
        Cmd::Induction { measure, grid, mmax } => run_induction(measure, &grid.0, *mmax),
        Cmd::PathologicalPhi { kmax } => run_pathological(*kmax),
        Cmd::Witness { measure, body, r_scale, t0, tmax } => {
            run_witness(measure, body, *r_scale, *t0, *tmax)
        }
        Cmd::Sections { measure, body, xi, grid } => {
            run_sections(measure, body, xi, &grid.0, budget, seed)
        }
        Cmd::BpExperiment { measure, body_k, body_l, grid, net } => {
            run_bp_experiment(measure, body_k, body_l, &grid.0, *net, budget, seed)
        }
        Cmd::RectangleDemo { tmin, tmax, points } => run_rectangle_demo(*tmin, *tmax, *points),
        Cmd::FactCheck { measure, body, r } => run_fact_check(measure, body, *r, budget, seed),
        Cmd::ExceptionalSet { measure, alpha, tmax, step } => {
            run_exceptional_set(measure, *alpha, *tmax, *step)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.or_else(|| {
        std::env::var("LOGVEX_THREADS").ok().and_then(|v| v.parse().ok())
    });
    if let Some(n) = threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let output = match dispatch(&cli) {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let text = match resolve_format(cli.out.as_deref(), cli.format) {
        Format::Csv => output.table.to_csv(),
        Format::Json => output.json,
    };
    if let Err(e) = emit(cli.out.as_deref(), &text) {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(2);
    }
    if !output.summary.is_empty() {
        eprintln!("{}", output.summary);
    }
    if cli.strict && output.inconclusive {
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}
