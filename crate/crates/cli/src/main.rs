use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use eupgame_core::literal::{parse_measurement, parse_state};
use eupgame_core::measure::{sample_outcomes_on_a, state_bound_term};
use eupgame_core::report::{self, format_sig6};
use eupgame_core::{
    bound_term, correlation_report, overlap_c, play_game, shannon_entropy, BoundOptions, CorrelationOptions,
    CorrelationReport, Error, GameOptions, GameSpec, ProbabilityVector, ProjectiveMeasurement, Subsystem,
};

const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_OUTPUT: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "eupgame", version, about = "Correlation measures and k-party entropic uncertainty games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Entropies, mutual information, classical correlations, discord and k_opt of a state.
    Analyze(Common),
    /// Correlation table over the mixed Bell family a|psi+><psi+| + (1-a)|11><11|.
    Sweep(Common),
    /// Play the k-party uncertainty game with the given measurements.
    Game(Common),
    /// State-independent uncertainty term of a measurement list.
    Bound(Common),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct Common {
    /// mixed-bell:<a> | werner:<p> | random:<seed>:<d>:<rank> | file:<path>
    #[arg(long)]
    state: Option<String>,

    /// z | x | y | bloch:<theta>:<phi> (repeatable)
    #[arg(long = "measure", num_args = 1.., action = clap::ArgAction::Append)]
    measure: Vec<String>,

    /// Sweep range: a_min a_max steps
    #[arg(long, num_args = 3, value_names = ["A_MIN", "A_MAX", "STEPS"])]
    range: Option<Vec<String>>,

    /// Measurement-angle grid THETAxPHI
    #[arg(long, default_value = "181x361")]
    grid: String,

    /// Bloch-ball grid RxTHETAxPHI for the bound term
    #[arg(long, default_value = "51x91x180")]
    ball_grid: String,

    /// Grid points polished by Nelder-Mead
    #[arg(long, default_value_t = 10)]
    refine: usize,

    /// Optimize classical correlations over measurements on B instead of A
    #[arg(long)]
    swap: bool,

    /// Monte Carlo shots per measurement (game only)
    #[arg(long, default_value_t = 0)]
    shots: u64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output file (standard output when absent)
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Numeric(String),
    Output(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Numeric(_) => EXIT_NUMERIC,
            Failure::Output(_) => EXIT_OUTPUT,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Numeric(m) | Failure::Output(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numeric() {
            Failure::Numeric(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("eupgame: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(command: Command) -> Outcome<()> {
    match command {
        Command::Analyze(c) => run_analyze(&c),
        Command::Sweep(c) => run_sweep(&c),
        Command::Game(c) => run_game(&c),
        Command::Bound(c) => run_bound(&c),
    }
}

fn parse_grid(spec: &str, parts: usize) -> Outcome<Vec<usize>> {
    let values: Vec<usize> = spec
        .split(['x', 'X'])
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Failure::Input(format!("grid `{spec}` must be {parts} integers joined by `x`")))?;
    if values.len() != parts {
        return Err(Failure::Input(format!("grid `{spec}` must have {parts} components")));
    }
    Ok(values)
}

fn correlation_options(c: &Common) -> Outcome<CorrelationOptions> {
    let g = parse_grid(&c.grid, 2)?;
    Ok(CorrelationOptions {
        theta_steps: g[0],
        phi_steps: g[1],
        refine_starts: c.refine,
        measured: if c.swap { Subsystem::B } else { Subsystem::A },
    })
}

fn bound_options(c: &Common) -> Outcome<BoundOptions> {
    let g = parse_grid(&c.ball_grid, 3)?;
    Ok(BoundOptions { r_steps: g[0], theta_steps: g[1], phi_steps: g[2], refine_starts: c.refine })
}

fn require_state(c: &Common) -> Outcome<(String, eupgame_core::DensityMatrix)> {
    let lit = c.state.clone().ok_or_else(|| Failure::Input("--state is required".into()))?;
    let rho = parse_state(&lit)?;
    Ok((lit, rho))
}

fn measurements(c: &Common) -> Outcome<Vec<ProjectiveMeasurement>> {
    c.measure.iter().map(|m| parse_measurement(m).map_err(Failure::from)).collect()
}

fn emit(c: &Common, text: &str) -> Outcome<()> {
    match &c.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Output(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Output(format!("cannot write standard output: {e}")))
        }
    }
}

fn to_json(v: &Value) -> Outcome<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::Numeric(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Two-column `field,value` rendering of a flat JSON object.
fn field_csv(v: &Value) -> String {
    let mut out = String::from("field,value\n");
    if let Value::Object(map) = v {
        for (k, val) in map {
            let cell = match val {
                Value::Number(n) => n.as_f64().map(format_sig6).unwrap_or_else(|| n.to_string()),
                Value::String(s) => s.clone(),
                other => other.to_string().replace(',', ";"),
            };
            out.push_str(&format!("{k},{cell}\n"));
        }
    }
    out
}

fn analyze_json(lit: &str, r: &CorrelationReport) -> Outcome<Value> {
    let mut v = serde_json::to_value(r).map_err(|e| Failure::Numeric(e.to_string()))?;
    if let Value::Object(map) = &mut v {
        map.insert("state".into(), json!(lit));
        let ratio = r.ratio();
        let ratio = if ratio.is_finite() { json!(ratio) } else { json!(format_sig6(ratio)) };
        map.insert("ratio".into(), ratio);
    }
    Ok(v)
}

fn run_analyze(c: &Common) -> Outcome<()> {
    let (lit, rho) = require_state(c)?;
    let report = correlation_report(&rho, &correlation_options(c)?)?;
    match c.format.unwrap_or(Format::Json) {
        Format::Json => emit(c, &to_json(&analyze_json(&lit, &report)?)?),
        Format::Csv => {
            let r = &report;
            let header = "state,S_A,S_B,S_AB,S_A_given_B,I,C,D,ratio,k_opt,opt_theta,opt_phi,opt_min_avg_entropy,optimizer_evals,discord_clamped,measured_subsystem";
            let row = [
                lit.replace(',', ";"),
                format_sig6(r.s_a),
                format_sig6(r.s_b),
                format_sig6(r.s_ab),
                format_sig6(r.s_a_given_b),
                format_sig6(r.mutual_information),
                format_sig6(r.classical),
                format_sig6(r.discord),
                format_sig6(r.ratio()),
                r.k_opt.to_string(),
                format_sig6(r.opt_angles.theta),
                format_sig6(r.opt_angles.phi),
                format_sig6(r.opt_min_avg_entropy),
                r.optimizer_evals.to_string(),
                r.discord_clamped.to_string(),
                format!("{:?}", r.measured_subsystem),
            ];
            emit(c, &format!("{header}\n{}\n", row.join(",")))
        }
    }
}

fn run_sweep(c: &Common) -> Outcome<()> {
    let range = c.range.as_ref().ok_or_else(|| Failure::Input("--range a_min a_max steps is required".into()))?;
    let num = |s: &str| s.parse::<f64>().map_err(|_| Failure::Input(format!("bad range value `{s}`")));
    let steps: usize = range[2].parse().map_err(|_| Failure::Input(format!("bad step count `{}`", range[2])))?;
    let points = report::sweep_points(num(&range[0])?, num(&range[1])?, steps)?;
    let rows = report::mixed_bell_sweep(&points, &correlation_options(c)?)?;
    match c.format.unwrap_or(Format::Csv) {
        Format::Csv => emit(c, &report::sweep_csv(&rows)),
        Format::Json => emit(c, &to_json(&serde_json::to_value(&rows).map_err(|e| Failure::Numeric(e.to_string()))?)?),
    }
}

fn run_game(c: &Common) -> Outcome<()> {
    let (lit, rho) = require_state(c)?;
    let ms = measurements(c)?;
    let spec = GameSpec::new(rho.clone(), ms.clone())?;
    let opts = GameOptions { correlation: correlation_options(c)?, bound: bound_options(c)? };
    let report = play_game(&spec, &opts)?;
    let mut v = serde_json::to_value(&report).map_err(|e| Failure::Numeric(e.to_string()))?;
    if let Value::Object(map) = &mut v {
        map.insert("state".into(), json!(lit));
        if c.shots > 0 {
            let mut sampled = Vec::new();
            for (i, m) in ms.iter().enumerate() {
                let counts = sample_outcomes_on_a(&rho, m, c.shots, c.seed.wrapping_add(i as u64))?;
                let freqs = counts.iter().map(|&n| n as f64 / c.shots as f64).collect();
                let h = shannon_entropy(&ProbabilityVector::new(freqs)?);
                sampled.push(json!({ "measurement": m.label(), "counts": counts, "empirical_H": h }));
            }
            map.insert("shots".into(), json!(c.shots));
            map.insert("seed".into(), json!(c.seed));
            map.insert("sampled".into(), Value::Array(sampled));
        }
    }
    match c.format.unwrap_or(Format::Json) {
        Format::Json => emit(c, &to_json(&v)?),
        Format::Csv => emit(c, &field_csv(&v)),
    }
}

fn run_bound(c: &Common) -> Outcome<()> {
    let ms = measurements(c)?;
    let bound = bound_term(&ms, &bound_options(c)?)?;
    let mut v = serde_json::to_value(&bound).map_err(|e| Failure::Numeric(e.to_string()))?;
    if let Value::Object(map) = &mut v {
        map.insert("measurements".into(), json!(ms.iter().map(|m| m.label()).collect::<Vec<_>>()));
        if let [a, b] = &ms[..] {
            map.insert("minus_log2_c".into(), json!(-overlap_c(a, b)?.log2()));
        }
        if let Some(lit) = &c.state {
            let rho_a = parse_state(lit)?.reduced(Subsystem::A)?;
            map.insert("state".into(), json!(lit));
            map.insert("state_bound_term".into(), json!(state_bound_term(&rho_a, &ms)?));
        }
    }
    match c.format.unwrap_or(Format::Json) {
        Format::Json => emit(c, &to_json(&v)?),
        Format::Csv => emit(c, &field_csv(&v)),
    }
}
