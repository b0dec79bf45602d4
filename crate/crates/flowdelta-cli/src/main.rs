use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use flowdelta::classify::{self, Window, DEGENERATE, UNCLASSIFIABLE};
use flowdelta::io::{self, catalog, table, IoError, OutputKind, Scenario};
use flowdelta::{delta, Execution, SourceTerm, State, SystemParams};

mod check;

/// Exit code when `--strict` meets an unclassifiable right state.
const EXIT_UNCLASSIFIABLE: u8 = 4;

#[derive(Parser)]
#[command(name = "flowdelta", version, about = "Riemann problems with a time-dependent source and delta shocks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Lax-Friedrichs solver and compare with the analytic pattern.
    Solve(Common),
    /// Classify a grid of right states around the left state.
    Regions(Common),
    /// Write the wave curves through the left state.
    Curves(Common),
    /// Integrate the delta shock between the left and right states.
    Delta(Common),
    /// Mark right states reached by an overcompressive delta.
    Scan(Common),
    /// Print the case of the left state and its transitions.
    CaseId(CaseArgs),
    /// List catalog entries or write them out as config files.
    Catalog(CatalogArgs),
    /// Solve catalog entries in parallel, one directory each.
    Batch(BatchArgs),
    /// Randomized consistency checks of the wave constructions.
    Check(CheckArgs),
}

#[derive(Args)]
struct Common {
    /// Scenario file.
    #[arg(long, conflicts_with = "entry")]
    config: Option<PathBuf>,
    /// Named catalog entry instead of a scenario file.
    #[arg(long)]
    entry: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "flowdelta-out")]
    out: PathBuf,
    /// Extra snapshot or map time; may be repeated.
    #[arg(long = "time")]
    times: Vec<f64>,
    /// Cells of the solver grid, or per axis of a state-space grid.
    #[arg(long)]
    grid: Option<usize>,
    /// State-space window as RHO_MAX,U_MIN,U_MAX.
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true)]
    window: Option<Window>,
    /// Exit with code 4 if any right state cannot be classified.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    no_renormalize: bool,
    /// Run sequentially.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct CaseArgs {
    #[arg(long, conflicts_with = "entry")]
    config: Option<PathBuf>,
    #[arg(long)]
    entry: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a_exp: Option<f64>,
    #[arg(long, default_value_t = 5.0)]
    rho_bar: f64,
    #[arg(long, default_value_t = 3.0)]
    left_rho: f64,
    #[arg(long, allow_hyphen_values = true)]
    left_u: Option<f64>,
    /// Source pieces as `t:value, t:value`.
    #[arg(long, default_value = "0:0", allow_hyphen_values = true)]
    source: String,
    /// Last time searched for transitions; defaults to the scenario end time.
    #[arg(long)]
    horizon: Option<f64>,
}

#[derive(Args)]
struct CatalogArgs {
    /// Write one `NAME.cfg` per entry into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BatchArgs {
    #[arg(long, default_value = "flowdelta-out")]
    out: PathBuf,
    /// Only entries whose name contains this text.
    #[arg(long)]
    filter: Option<String>,
    /// Write only `summary.json` per entry.
    #[arg(long)]
    summary_only: bool,
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
}

#[derive(Debug)]
enum Failure {
    Io(IoError),
    Unclassifiable(usize),
    Check(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Io(e)
    }
}

impl From<flowdelta::Error> for Failure {
    fn from(e: flowdelta::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.into())
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(e) => e.exit_code() as u8,
            Failure::Unclassifiable(_) => EXIT_UNCLASSIFIABLE,
            Failure::Check(_) => 3,
        }
    }

    fn record(&self) -> serde_json::Value {
        let (kind, message) = match self {
            Failure::Io(e) => (e.kind(), e.to_string()),
            Failure::Unclassifiable(n) => ("unclassifiable", format!("{n} right states could not be classified")),
            Failure::Check(m) => ("check", m.clone()),
        };
        serde_json::json!({ "error": kind, "message": message, "exit_code": self.code() })
    }
}

type Outcome = Result<(), Failure>;

fn parse_window(s: &str) -> Result<Window, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [r, lo, hi] => Window::new(r, lo, hi).map_err(|e| e.to_string()),
        _ => Err("expected RHO_MAX,U_MIN,U_MAX".into()),
    }
}

fn parse_pieces(s: &str) -> Result<SourceTerm, Failure> {
    let invalid = |m: String| Failure::Io(IoError::Validation(m));
    let mut pieces = Vec::new();
    for p in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (t, v) = p.split_once(':').ok_or_else(|| invalid(format!("source piece {p:?} is not t:value")))?;
        let t = t.trim().parse::<f64>().map_err(|e| invalid(format!("{t:?}: {e}")))?;
        let v = v.trim().parse::<f64>().map_err(|e| invalid(format!("{v:?}: {e}")))?;
        pieces.push((t, v));
    }
    Ok(SourceTerm::new(pieces)?)
}

fn load(config: Option<&Path>, entry: Option<&str>) -> Result<(String, Scenario), Failure> {
    match (config, entry) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Io(IoError::Validation(format!("cannot read {}: {e}", path.display()))))?;
            let name = path.file_stem().map_or("scenario".into(), |s| s.to_string_lossy().into_owned());
            Ok((name, io::parse_config(&text)?))
        }
        (None, Some(name)) => catalog::find(name)
            .map(|e| (e.name, e.scenario))
            .ok_or_else(|| Failure::Io(IoError::Validation(format!("no catalog entry named {name:?}")))),
        (None, None) => Err(Failure::Io(IoError::Validation("give --config FILE or --entry NAME".into()))),
    }
}

/// `30` rather than `30.000000000000004`.
fn fmt_time(t: f64) -> String {
    let s = format!("{t:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

impl Common {
    fn exec(&self) -> Execution {
        if self.sequential { Execution::Sequential } else { Execution::Parallel }
    }

    fn scenario(&self) -> Result<(String, Scenario), Failure> {
        let (name, mut s) = load(self.config.as_deref(), self.entry.as_deref())?;
        if !self.times.is_empty() {
            s.times.extend(&self.times);
            s.times.sort_by(f64::total_cmp);
            s.times.dedup();
        }
        if self.no_renormalize {
            s.renormalize = false;
        }
        Ok((name, s))
    }

    /// Times for state-space products: `--time`, else the scenario's list, else 0.
    fn map_times(&self, s: &Scenario) -> Vec<f64> {
        match (&self.times[..], &s.times[..]) {
            ([], []) => vec![0.0],
            ([], ts) => ts.to_vec(),
            (ts, _) => ts.to_vec(),
        }
    }

    fn map_grid(&self) -> usize {
        self.grid.unwrap_or(100)
    }
}

fn cmd_solve(c: &Common) -> Outcome {
    let (name, mut s) = c.scenario()?;
    if let Some(n) = c.grid {
        s.grid.n_cells = n;
        s.grid = flowdelta::solver::Grid::centered(n, s.grid.dx);
    }
    let outcome = io::solve(&name, &s, c.exec())?;
    let summary = io::write_solve(&c.out, &s, &outcome)?;
    println!("{}", io::run::profile_title(&summary));
    println!("expected:  {}", summary.expected_sequence.as_deref().unwrap_or("-"));
    println!("extracted: {}", summary.extracted_sequence);
    println!("wrote {} files to {}", summary.manifest.len(), c.out.display());
    if c.strict && summary.region.is_none() {
        return Err(Failure::Unclassifiable(1));
    }
    Ok(())
}

fn cmd_regions(c: &Common) -> Outcome {
    let (_, s) = c.scenario()?;
    let w = c.window.unwrap_or_default();
    fs::create_dir_all(&c.out)?;
    let mut bad = 0;
    for t in c.map_times(&s) {
        let map = classify::region_map(&s.params, s.left, t, w, c.map_grid(), c.exec())?;
        let cells = table::region_rows(&map);
        let curves = table::curve_rows(&map.overlays);
        let tag = fmt_time(t);
        table::write_csv_file(&c.out.join(format!("regions_t{tag}.csv")), &cells)?;
        table::write_csv_file(&c.out.join(format!("curves_t{tag}.csv")), &curves)?;
        let title = format!("Regions at t = {tag}");
        fs::write(c.out.join(format!("regions_t{tag}.svg")), io::svg::state_space_svg(&cells, &curves, &title))?;
        let n = map.labels.iter().filter(|l| l.as_str() == UNCLASSIFIABLE).count();
        let degenerate = map.labels.iter().any(|l| l == DEGENERATE);
        println!("t = {tag}: {}{}", map.distinct().join(", "), if degenerate { " (left state degenerate)" } else { "" });
        bad += n;
    }
    if c.strict && bad > 0 {
        return Err(Failure::Unclassifiable(bad));
    }
    Ok(())
}

fn cmd_curves(c: &Common) -> Outcome {
    let (_, s) = c.scenario()?;
    let w = c.window.unwrap_or_default();
    fs::create_dir_all(&c.out)?;
    let (rho, _) = w.axes(c.grid.unwrap_or(400));
    for t in c.map_times(&s) {
        let curves = table::curve_rows(&classify::wave_curves(&s.params, s.left, t, &w, &rho));
        let tag = fmt_time(t);
        table::write_csv_file(&c.out.join(format!("curves_t{tag}.csv")), &curves)?;
        let title = format!("Wave curves at t = {tag}");
        fs::write(c.out.join(format!("curves_t{tag}.svg")), io::svg::state_space_svg(&[], &curves, &title))?;
        println!("t = {tag}: {} curve points", curves.len());
    }
    Ok(())
}

fn cmd_delta(c: &Common) -> Outcome {
    let (_, s) = c.scenario()?;
    let dt = (s.t_end / 2000.0).max(delta::DEFAULT_DT);
    let traj = delta::integrate_delta(&s.params, s.left, s.right, s.t_end, dt)?;
    fs::create_dir_all(&c.out)?;
    table::write_csv_file(&c.out.join("delta.csv"), &table::trajectory_rows(&traj))?;
    let k = traj.times.len() - 1;
    println!("initial speed {}", traj.speed[0]);
    println!("t = {}: x = {}, strength = {}", traj.times[k], traj.x[k], traj.zeta[k]);
    println!("overcompressive throughout: {}", traj.stays_overcompressive(&s.params));
    Ok(())
}

fn cmd_scan(c: &Common) -> Outcome {
    let (_, s) = c.scenario()?;
    let w = c.window.unwrap_or_default();
    let (rho, u) = w.axes(c.map_grid());
    fs::create_dir_all(&c.out)?;
    for t in c.map_times(&s) {
        let scan = delta::scan_overcompressive(&s.params, s.left, t, &rho, &u, delta::DEFAULT_DT, c.exec());
        let cells = table::scan_rows(&scan);
        let curves = table::curve_rows(&classify::wave_curves(&s.params, s.left, t, &w, &rho));
        let tag = fmt_time(t);
        table::write_csv_file(&c.out.join(format!("scan_t{tag}.csv")), &cells)?;
        let title = format!("Overcompressive deltas at t = {tag}");
        fs::write(c.out.join(format!("scan_t{tag}.svg")), io::svg::state_space_svg(&cells, &curves, &title))?;
        let n = scan.admissible.iter().filter(|&&a| a).count();
        println!("t = {tag}: {n} of {} cells admissible, {} flagged", scan.admissible.len(), scan.flagged.len());
    }
    Ok(())
}

fn cmd_case_id(a: &CaseArgs) -> Outcome {
    let (params, left, horizon) = match (a.config.as_deref(), a.entry.as_deref()) {
        (None, None) => {
            let (Some(a_exp), Some(left_u)) = (a.a_exp, a.left_u) else {
                return Err(Failure::Io(IoError::Validation("give --config, --entry or --a-exp with --left-u".into())));
            };
            let params = SystemParams::new(a_exp, a.rho_bar, parse_pieces(&a.source)?)?;
            (params, State::new(a.left_rho, left_u), a.horizon.unwrap_or(100.0))
        }
        (config, entry) => {
            let (_, s) = load(config, entry)?;
            (s.params, s.left, a.horizon.unwrap_or(s.t_end))
        }
    };
    let case = classify::case_id(&params, left, 0.0)?;
    let mut line = case.to_string();
    for tr in classify::case_transitions(&params, left, horizon)? {
        line.push_str(&format!("; transition to {} at t={}", tr.to, fmt_time(tr.t)));
    }
    println!("{line}");
    Ok(())
}

fn cmd_catalog(a: &CatalogArgs) -> Outcome {
    let entries = catalog::catalog();
    match &a.out {
        None => {
            let mut out = std::io::stdout().lock();
            for e in &entries {
                if writeln!(out, "{:<28} {}", e.name, e.title).is_err() {
                    break;
                }
            }
        }
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for e in &entries {
                let text = format!("# {}\n{}", e.title, io::render_config(&e.scenario));
                fs::write(dir.join(format!("{}.cfg", e.name)), text)?;
            }
            println!("wrote {} scenario files to {}", entries.len(), dir.display());
        }
    }
    Ok(())
}

fn cmd_batch(a: &BatchArgs) -> Outcome {
    let entries: Vec<_> = catalog::catalog()
        .into_iter()
        .filter(|e| e.scenario.wants(OutputKind::Profiles))
        .filter(|e| a.filter.as_deref().map_or(true, |f| e.name.contains(f)))
        .collect();
    let exec = if a.sequential { Execution::Sequential } else { Execution::Parallel };
    let results = io::run::run_catalog(&entries, exec);
    let mut failed = 0;
    let mut first_error = None;
    for (e, r) in entries.iter().zip(results) {
        let dir = a.out.join(&e.name);
        match r {
            Ok(outcome) => {
                let summary = if a.summary_only {
                    fs::create_dir_all(&dir)?;
                    let mut s = outcome.summary.clone();
                    s.manifest = vec!["summary.json".into()];
                    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&s).map_err(IoError::from)? + "\n")?;
                    s
                } else {
                    io::write_solve(&dir, &e.scenario, &outcome)?
                };
                let agree = match summary.sequences_agree {
                    Some(true) => "ok",
                    Some(false) => "differs",
                    None => "-",
                };
                println!("{:<28} {:<12} {:<24} {agree}", e.name, summary.region.as_deref().unwrap_or("-"), summary.extracted_sequence);
            }
            Err(err) => {
                failed += 1;
                println!("{:<28} error: {err}", e.name);
                first_error.get_or_insert(err);
            }
        }
    }
    println!("{} entries, {failed} failed", entries.len());
    match first_error {
        Some(e) => Err(Failure::Io(e)),
        None => Ok(()),
    }
}

fn cmd_check(a: &CheckArgs) -> Outcome {
    let report = check::run(a.seed, a.samples);
    println!("{report}");
    if report.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} of {} checks failed", report.failures.len(), report.checked)))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(c) => cmd_solve(c),
        Command::Regions(c) => cmd_regions(c),
        Command::Curves(c) => cmd_curves(c),
        Command::Delta(c) => cmd_delta(c),
        Command::Scan(c) => cmd_scan(c),
        Command::CaseId(a) => cmd_case_id(a),
        Command::Catalog(a) => cmd_catalog(a),
        Command::Batch(a) => cmd_batch(a),
        Command::Check(a) => cmd_check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.record());
            ExitCode::from(f.code())
        }
    }
}
