//! Command-line front end for evasion path analysis.

mod config;

use std::io::{Read as _, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use config::Config;
use evasion_core::analysis::{
    analyze, analyze_boundary, events_json, extract_boundary_data, extract_witness_in, run_direct,
    verify_witness, witness_json, AnalysisOptions, AnalysisReport, BoundaryData, Mode,
};
use evasion_core::rasterize::GridSpec;
use evasion_core::render::render_frames;
use evasion_core::scenario::{builtin_scenario, load_scenario, save_scenario, Scenario};
use evasion_core::zigzag::{interleave, EventOptions};
use evasion_core::EvasionError;

#[derive(Parser, Debug)]
#[command(
    name = "evasion-kit",
    version,
    about = "Decide and enumerate evasion paths in mobile sensor networks"
)]
struct Cli {
    #[command(flatten)]
    opts: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Cells across the domain diameter.
    #[arg(long, global = true)]
    resolution: Option<usize>,
    /// Largest allowed cell side; overrides the resolution.
    #[arg(long, global = true)]
    cell_size: Option<f64>,
    /// Time slices per cobordism.
    #[arg(long, global = true)]
    fine_samples: Option<usize>,
    /// Width of event windows.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    element_cap: Option<usize>,
    #[arg(long, global = true)]
    witness_cap: Option<usize>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Also write SVG frames at the sample times.
    #[arg(long, global = true)]
    render: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze a scenario file (`-` reads standard input).
    Analyze {
        scenario: String,
        #[arg(long, default_value = "direct", value_parser = ["direct", "boundary", "oracle"])]
        mode: String,
    },
    /// List the critical events and the interleaving sample times.
    Events { scenario: String },
    /// Extract the witness path of one enumerated limit element.
    Witness {
        scenario: String,
        #[arg(long)]
        element: usize,
    },
    /// Print a builtin scenario.
    Generate {
        name: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run all three modes and compare their verdicts.
    Compare { scenario: String },
    /// Write the boundary-only data of a planar scenario.
    BoundaryData { scenario: String },
    /// Write SVG frames at the given times.
    Render {
        scenario: String,
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        times: Vec<f64>,
    },
}

struct Failure {
    code: u8,
    kind: String,
    detail: String,
}

impl Failure {
    fn usage(detail: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "usage".into(),
            detail: detail.into(),
        }
    }
}

impl From<EvasionError> for Failure {
    fn from(e: EvasionError) -> Self {
        let code = match e {
            EvasionError::Malformed(_)
            | EvasionError::Invalid { .. }
            | EvasionError::UnknownScenario(_) => 2,
            _ => 1,
        };
        Failure {
            code,
            kind: e.kind().into(),
            detail: e.to_string(),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

struct Settings {
    config: Config,
    opts: AnalysisOptions,
}

impl Settings {
    fn from_overrides(o: &Overrides) -> Outcome<Settings> {
        let mut c = match &o.config {
            Some(p) => Config::load(p).map_err(Failure::usage)?,
            None => Config::default(),
        };
        if let Some(v) = o.resolution {
            c.resolution = v;
            c.cell_size = None;
        }
        if o.cell_size.is_some() {
            c.cell_size = o.cell_size;
        }
        c.fine_time_samples = o.fine_samples.unwrap_or(c.fine_time_samples);
        c.tol = o.tol.unwrap_or(c.tol);
        c.element_cap = o.element_cap.unwrap_or(c.element_cap);
        c.witness_cap = o.witness_cap.unwrap_or(c.witness_cap);
        if let Some(d) = &o.output_dir {
            c.output_dir = d.clone();
        }
        c.render |= o.render;
        c.validate().map_err(Failure::usage)?;
        let opts = AnalysisOptions {
            events: EventOptions {
                tol: c.tol,
                ..EventOptions::default()
            },
            element_cap: c.element_cap,
            witness_cap: c.witness_cap,
            max_fine_samples: c.max_fine_samples.max(c.fine_time_samples),
            oracle_slices: c.oracle_slices,
            max_scan_samples: AnalysisOptions::default().max_scan_samples,
        };
        Ok(Settings { config: c, opts })
    }

    fn grid(&self, s: &Scenario) -> Outcome<GridSpec> {
        let c = &self.config;
        Ok(match c.cell_size {
            Some(h) => GridSpec::with_cell_size(s, h, c.fine_time_samples)?,
            None => GridSpec::new(s, c.resolution, c.fine_time_samples)?,
        })
    }
}

/// Reads a file, standard input for `-`, or `builtin:<name>[:<seed>]`.
fn read_document(arg: &str, seed: u64) -> Outcome<String> {
    if let Some(rest) = arg.strip_prefix("builtin:") {
        let (name, seed) = match rest.split_once(':') {
            Some((n, s)) => (
                n,
                s.parse()
                    .map_err(|_| Failure::usage(format!("bad seed `{s}`")))?,
            ),
            None => (rest, seed),
        };
        return Ok(save_scenario(&builtin_scenario(name, seed)?));
    }
    if arg == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::usage(format!("standard input: {e}")))?;
        return Ok(text);
    }
    std::fs::read_to_string(arg).map_err(|e| Failure::usage(format!("{arg}: {e}")))
}

fn read_scenario(arg: &str, st: &Settings) -> Outcome<Scenario> {
    Ok(load_scenario(&read_document(arg, st.config.seed)?)?)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn write_frames(s: &Scenario, g: &GridSpec, st: &Settings, report: &AnalysisReport) -> Outcome<()> {
    let times: Vec<f64> = report.fibers.iter().map(|f| f.t).collect();
    render_frames(s, g, &times, &report.witnesses, &st.config.output_dir)?;
    Ok(())
}

fn cmd_analyze(arg: &str, mode: &str, st: &Settings) -> Outcome<String> {
    let mode = Mode::parse(mode).ok_or_else(|| Failure::usage(format!("unknown mode `{mode}`")))?;
    let text = read_document(arg, st.config.seed)?;
    if mode == Mode::Boundary {
        let doc: Value =
            serde_json::from_str(&text).map_err(|e| EvasionError::Malformed(e.to_string()))?;
        if doc.get("image_partitions").is_some() {
            let bd: BoundaryData =
                serde_json::from_value(doc).map_err(|e| EvasionError::Malformed(e.to_string()))?;
            return Ok(analyze_boundary(&bd, &st.opts)?.to_json_string());
        }
    }
    let s = load_scenario(&text)?;
    let g = st.grid(&s)?;
    let report = analyze(&s, &g, mode, &st.opts)?;
    if st.config.render {
        write_frames(&s, &g, st, &report)?;
    }
    Ok(report.to_json_string())
}

fn cmd_events(arg: &str, st: &Settings) -> Outcome<String> {
    let s = read_scenario(arg, st)?;
    let g = st.grid(&s)?;
    let events = evasion_core::zigzag::detect_events_with(&s, &g, &st.opts.events)?;
    let samples = interleave(&events, s.time_base);
    Ok(pretty(
        &json!({"events": events_json(&events.events), "samples": samples}),
    ))
}

fn cmd_witness(arg: &str, element: usize, st: &Settings) -> Outcome<String> {
    let s = read_scenario(arg, st)?;
    let g = st.grid(&s)?;
    let opts = AnalysisOptions {
        element_cap: element.saturating_add(1),
        ..st.opts
    };
    let run = run_direct(&s, &g, &opts)?;
    let el = run.limit.elements.get(element).ok_or_else(|| {
        EvasionError::Precondition(format!(
            "element index {element} is out of range for a limit of cardinality {}",
            run.limit.cardinality
        ))
    })?;
    let w = extract_witness_in(&s, &g, &run.zigzags, el, &opts)?;
    let mut v = witness_json(&w, s.dimension);
    v["verified"] = json!(verify_witness(&s, &g, &w).is_ok());
    Ok(pretty(&v))
}

fn verdict(r: Result<AnalysisReport, EvasionError>) -> (Option<bool>, Value) {
    match r {
        Ok(r) => (Some(r.exists), {
            let j = r.to_json();
            json!({"exists": r.exists, "limit_cardinality": j["limit_cardinality"]})
        }),
        Err(e) => (None, json!({"error": e.kind(), "detail": e.to_string()})),
    }
}

fn cmd_compare(arg: &str, st: &Settings) -> Outcome<String> {
    let s = read_scenario(arg, st)?;
    let g = st.grid(&s)?;
    let mut modes = vec![Mode::Direct, Mode::Oracle];
    if s.dimension == 2 {
        modes.insert(1, Mode::Boundary);
    }
    let mut out = serde_json::Map::new();
    let mut verdicts = Vec::new();
    for m in modes {
        let (v, j) = verdict(analyze(&s, &g, m, &st.opts));
        verdicts.push(v);
        out.insert(m.as_str().into(), j);
    }
    let failed = verdicts.iter().any(Option::is_none);
    let agree = !failed && verdicts.windows(2).all(|w| w[0] == w[1]);
    out.insert("agree".into(), json!(agree));
    let text = pretty(&Value::Object(out));
    if agree {
        Ok(text)
    } else {
        print!("{text}");
        Err(Failure {
            code: 1,
            kind: if failed {
                "analysis_failed"
            } else {
                "disagreement"
            }
            .into(),
            detail: "the analysis modes do not agree on existence".into(),
        })
    }
}

fn cmd_boundary_data(arg: &str, st: &Settings) -> Outcome<String> {
    let s = read_scenario(arg, st)?;
    let g = st.grid(&s)?;
    let bd = extract_boundary_data(&s, &g, &st.opts)?;
    Ok(pretty(
        &serde_json::to_value(&bd).expect("boundary data serializes"),
    ))
}

fn cmd_render(arg: &str, times: &[f64], st: &Settings) -> Outcome<String> {
    let s = read_scenario(arg, st)?;
    for &t in times {
        s.time_base.normalize(t)?;
    }
    if times.is_empty() {
        return Ok(pretty(&json!({"files": []})));
    }
    let g = st.grid(&s)?;
    let (witnesses, note) = match analyze(&s, &g, Mode::Direct, &st.opts) {
        Ok(r) => (r.witnesses, Value::Null),
        Err(e) => (Vec::new(), json!(e.to_string())),
    };
    let files = render_frames(&s, &g, times, &witnesses, &st.config.output_dir)?;
    let names: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    Ok(pretty(&json!({"files": names, "witness_error": note})))
}

fn run(cli: Cli) -> Outcome<String> {
    let st = Settings::from_overrides(&cli.opts)?;
    match &cli.command {
        Command::Analyze { scenario, mode } => cmd_analyze(scenario, mode, &st),
        Command::Events { scenario } => cmd_events(scenario, &st),
        Command::Witness { scenario, element } => cmd_witness(scenario, *element, &st),
        Command::Generate { name, seed } => Ok(save_scenario(&builtin_scenario(
            name,
            seed.unwrap_or(st.config.seed),
        )?)),
        Command::Compare { scenario } => cmd_compare(scenario, &st),
        Command::BoundaryData { scenario } => cmd_boundary_data(scenario, &st),
        Command::Render { scenario, times } => cmd_render(scenario, times, &st),
    }
}

fn configure_threads() -> Outcome<()> {
    let Ok(v) = std::env::var("EVASION_KIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v.parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::usage(format!(
            "EVASION_KIT_THREADS must be a positive integer, got `{v}`"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(e.to_string()))
}

fn fail(f: Failure) -> ExitCode {
    eprintln!("{}", json!({"error": f.kind, "detail": f.detail}));
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(Failure::usage(e.to_string().trim_end())),
    };
    if let Err(f) = configure_threads() {
        return fail(f);
    }
    match run(cli) {
        Ok(text) => {
            let mut out = std::io::stdout().lock();
            if out
                .write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(f) => fail(f),
    }
}
