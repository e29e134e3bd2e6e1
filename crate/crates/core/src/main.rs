use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use bacon_shor::circuit::Circuit;
use bacon_shor::code::{CodeSpec, Gauge, RoundType};
use bacon_shor::cost::{protocol_report, table_csv, Protocol, TimingProfile};
use bacon_shor::counting::{count, curve, curve_csv, pseudothreshold, result_record, CountOptions};
use bacon_shor::decoder::build_decoder_table;
use bacon_shor::error::Error;
use bacon_shor::exrec::{assemble, ExRecOptions, GateLabel};
use bacon_shor::ft::{check_two_row_criterion, piece_count, range_metrics, PieceStrategy, TwoRowVerdict};
use bacon_shor::gadgets::{
    ccz_3x3, ckz_depth_reduced, ckz_round_robin, two_transversal_ccz, verify_logical_action, LogicalGate,
};
use bacon_shor::noise::{ModelFamily, NoiseModel};

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "bsft", version, about = "Bacon-Shor fault-tolerant gadgets: build, check, count, cost")]
struct Cli {
    /// JSON file with default settings; flags on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the resolved configuration and exit.
    #[arg(long, global = true)]
    show_config: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Build a gadget circuit and write it as JSON.
    Build {
        /// ckz, ckz-round-robin, ccz3x3 or two-transversal
        gadget: Option<String>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Static fault-tolerance and logical-action report for a circuit file.
    Check {
        file: Option<PathBuf>,
        /// Code shape, needed only for bare circuit files.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Exact exREC counting, failure curves and pseudothresholds.
    Threshold {
        /// I, H, CNOT or CCZ
        gate: Option<String>,
        #[arg(long = "gate", value_name = "GATE")]
        gate_flag: Option<String>,
        #[arg(long)]
        model: Option<String>,
        /// Explicit rates p_ccz,p_cnot,p_1q,p_i,p_m; reports that single point.
        #[arg(long)]
        p_rates: Option<String>,
        /// log:LO:HI:N, lin:LO:HI:N or a comma list.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Resource table for the magic-state and Bacon-Shor CCZ protocols.
    Cost {
        /// magic7, magic9 or bs3x3 (all when omitted)
        protocol: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the syndrome lookup table of one EC round as JSON.
    ExportDecoder {
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// type1 or type2
        #[arg(long)]
        round: Option<String>,
        /// Gauge fixed before the round: Z or X.
        #[arg(long)]
        gauge: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Keys accepted in a config file.
#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    m: Option<usize>,
    n: Option<usize>,
    k: Option<usize>,
    gadget: Option<String>,
    gate: Option<String>,
    model: Option<String>,
    p_rates: Option<Vec<f64>>,
    grid: Option<String>,
    workers: Option<usize>,
    out: Option<PathBuf>,
    protocol: Option<String>,
    round: Option<String>,
    gauge: Option<String>,
    file: Option<PathBuf>,
    max_configs: Option<u64>,
}

#[derive(Serialize, Debug, Clone)]
struct RunConfig {
    command: String,
    m: usize,
    n: usize,
    k: usize,
    gadget: String,
    gate: String,
    model: String,
    p_rates: Option<Vec<f64>>,
    grid: String,
    workers: usize,
    out: Option<PathBuf>,
    protocol: Option<String>,
    round: String,
    gauge: String,
    file: Option<PathBuf>,
    max_configs: u64,
    config_file: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: String::new(),
            m: 3,
            n: 3,
            k: 2,
            gadget: "ckz".into(),
            gate: "I".into(),
            model: "uniform".into(),
            p_rates: None,
            grid: "log:1e-5:1e-2:31".into(),
            workers: 0,
            out: None,
            protocol: None,
            round: "type1".into(),
            gauge: "Z".into(),
            file: None,
            max_configs: CountOptions::default().max_configs,
            config_file: None,
        }
    }
}

enum Failure {
    Usage(String),
    Verify(String),
    Solver(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoCrossing { .. } | Error::BudgetExceeded { .. } | Error::InfeasibleBudget { .. } => {
                Failure::Solver(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn resolve(cli: Cli) -> Run<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        let f: FileConfig = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
        set(&mut cfg.m, f.m);
        set(&mut cfg.n, f.n);
        set(&mut cfg.k, f.k);
        set(&mut cfg.gadget, f.gadget);
        set(&mut cfg.gate, f.gate);
        set(&mut cfg.model, f.model);
        set(&mut cfg.grid, f.grid);
        set(&mut cfg.workers, f.workers);
        set(&mut cfg.round, f.round);
        set(&mut cfg.gauge, f.gauge);
        set(&mut cfg.max_configs, f.max_configs);
        cfg.p_rates = f.p_rates.or(cfg.p_rates);
        cfg.out = f.out.or(cfg.out);
        cfg.protocol = f.protocol.or(cfg.protocol);
        cfg.file = f.file.or(cfg.file);
        cfg.config_file = Some(path.clone());
    }
    match cli.cmd {
        Cmd::Build { gadget, m, n, k, out } => {
            cfg.command = "build".into();
            set(&mut cfg.gadget, gadget);
            set(&mut cfg.m, m);
            set(&mut cfg.n, n);
            set(&mut cfg.k, k);
            cfg.out = out.or(cfg.out);
        }
        Cmd::Check { file, m, n } => {
            cfg.command = "check".into();
            cfg.file = file.or(cfg.file);
            set(&mut cfg.m, m);
            set(&mut cfg.n, n);
        }
        Cmd::Threshold { gate, gate_flag, model, p_rates, grid, workers, out } => {
            cfg.command = "threshold".into();
            if gate.is_some() && gate_flag.is_some() && gate != gate_flag {
                return Err(usage("conflicting gate arguments"));
            }
            set(&mut cfg.gate, gate.or(gate_flag));
            set(&mut cfg.model, model);
            set(&mut cfg.grid, grid);
            set(&mut cfg.workers, workers);
            if let Some(s) = p_rates {
                cfg.p_rates = Some(parse_list(&s)?);
            }
            cfg.out = out.or(cfg.out);
        }
        Cmd::Cost { protocol, out } => {
            cfg.command = "cost".into();
            cfg.protocol = protocol.or(cfg.protocol);
            cfg.out = out.or(cfg.out);
        }
        Cmd::ExportDecoder { m, n, round, gauge, out } => {
            cfg.command = "export-decoder".into();
            set(&mut cfg.m, m);
            set(&mut cfg.n, n);
            set(&mut cfg.round, round);
            set(&mut cfg.gauge, gauge);
            cfg.out = out.or(cfg.out);
        }
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Run<()> {
    if cfg.m < 2 || cfg.n < 2 {
        return Err(usage(format!("code dimensions must be at least 2, got {}x{}", cfg.m, cfg.n)));
    }
    match cfg.command.as_str() {
        "build" => {
            if !GADGETS.contains(&cfg.gadget.as_str()) {
                return Err(usage(format!("unknown gadget {:?}; expected one of {GADGETS:?}", cfg.gadget)));
            }
        }
        "check" if cfg.file.is_none() => return Err(usage("check needs a circuit file")),
        "threshold" => {
            cfg.gate.parse::<GateLabel>()?;
            cfg.model.parse::<ModelFamily>()?;
            parse_grid(&cfg.grid)?;
            if let Some(r) = &cfg.p_rates {
                rates_model(r)?;
            }
        }
        "cost" => {
            if let Some(p) = &cfg.protocol {
                p.parse::<Protocol>()?;
            }
        }
        "export-decoder" => {
            parse_round(&cfg.round)?;
            parse_gauge(&cfg.gauge)?;
        }
        _ => {}
    }
    Ok(())
}

const GADGETS: [&str; 4] = ["ckz", "ckz-round-robin", "ccz3x3", "two-transversal"];

fn parse_list(s: &str) -> Run<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| usage(format!("bad number {x:?}: {e}"))))
        .collect()
}

fn parse_grid(s: &str) -> Run<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [kind @ ("log" | "lin"), lo, hi, steps] => {
            let (lo, hi): (f64, f64) = (
                lo.parse().map_err(|_| usage(format!("bad grid bound {lo:?}")))?,
                hi.parse().map_err(|_| usage(format!("bad grid bound {hi:?}")))?,
            );
            let steps: usize = steps.parse().map_err(|_| usage(format!("bad grid size {steps:?}")))?;
            if steps == 0 || !(lo <= hi) || (*kind == "log" && lo <= 0.0) {
                return Err(usage(format!("bad grid {s:?}")));
            }
            let at = |t: f64| if *kind == "log" { lo * (hi / lo).powf(t) } else { lo + (hi - lo) * t };
            if steps == 1 {
                vec![lo]
            } else {
                (0..steps).map(|i| at(i as f64 / (steps - 1) as f64)).collect()
            }
        }
        [_] => parse_list(s)?,
        _ => return Err(usage(format!("bad grid {s:?}"))),
    };
    if grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(usage(format!("grid points must lie in [0, 1]: {s:?}")));
    }
    Ok(grid)
}

fn rates_model(r: &[f64]) -> Run<NoiseModel> {
    match r {
        &[ccz, cnot, q1, i, meas] => Ok(NoiseModel::new(ccz, cnot, q1, i, meas)?),
        _ => Err(usage("--p-rates takes five values: p_ccz,p_cnot,p_1q,p_i,p_m")),
    }
}

fn parse_round(s: &str) -> Run<RoundType> {
    match s.to_ascii_lowercase().as_str() {
        "type1" | "1" => Ok(RoundType::Type1),
        "type2" | "2" => Ok(RoundType::Type2),
        _ => Err(usage(format!("unknown round type {s:?}"))),
    }
}

fn parse_gauge(s: &str) -> Run<Gauge> {
    match s {
        "Z" | "z" => Ok(Gauge::Z),
        "X" | "x" => Ok(Gauge::X),
        _ => Err(usage(format!("unknown gauge {s:?}"))),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Run<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Circuit file written by `build`: the circuit plus what `check` needs.
#[derive(Serialize, Deserialize)]
struct GadgetFile {
    gadget: String,
    m: usize,
    n: usize,
    k: usize,
    /// Whether the gadget relies on a dedicated trailing EC, so that a
    /// two-row violation is expected.
    special_tec: bool,
    circuit: Circuit,
}

fn cmd_build(cfg: &RunConfig) -> Run<()> {
    let (m, n, k) = (cfg.m, cfg.n, cfg.k);
    let (circuit, m, n, k, special_tec) = match cfg.gadget.as_str() {
        "ckz" => (ckz_depth_reduced(m, n, k)?, m, n, k, false),
        "ckz-round-robin" => (ckz_round_robin(m, n, k)?, m, n, k, false),
        "ccz3x3" => (ccz_3x3(), 3, 3, 2, true),
        "two-transversal" => (two_transversal_ccz(m, n)?, m, n, 2, false),
        g => return Err(usage(format!("unknown gadget {g:?}"))),
    };
    eprintln!(
        "{}: {} gates, depth {}, {} qubits",
        cfg.gadget,
        circuit.gate_count(),
        circuit.depth(),
        circuit.n_qubits()
    );
    let file = GadgetFile { gadget: cfg.gadget.clone(), m, n, k, special_tec, circuit };
    let json = serde_json::to_string_pretty(&file).expect("serializable");
    emit(cfg.out.as_deref(), &(json + "\n"))
}

fn cmd_check(cfg: &RunConfig) -> Run<()> {
    let path = cfg.file.as_ref().expect("validated");
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let file = match serde_json::from_str::<GadgetFile>(&text) {
        Ok(f) => f,
        Err(_) => {
            let circuit = Circuit::from_json(&text)?;
            let k = circuit.blocks.len().saturating_sub(1);
            GadgetFile { gadget: "circuit".into(), m: cfg.m, n: cfg.n, k, special_tec: false, circuit }
        }
    };
    let c = &file.circuit;
    c.validate()?;
    let code = CodeSpec::new(file.m, file.n, Gauge::Z)?;
    if c.blocks.iter().any(|b| b.len != code.n_qubits()) {
        return Err(usage(format!("blocks do not match a {}x{} code", file.m, file.n)));
    }
    let mut ok = true;

    let verdict = check_two_row_criterion(c, code)?;
    match &verdict {
        TwoRowVerdict::Pass => println!("two-row criterion: PASS"),
        TwoRowVerdict::Violations(v) if file.special_tec => {
            println!("two-row criterion: VIOLATED at {} gates (warning: dedicated TEC registered)", v.len())
        }
        TwoRowVerdict::Violations(v) => {
            println!("two-row criterion: VIOLATED at {} gates", v.len());
            ok = false;
        }
    }

    let strategy = if file.gadget == "two-transversal" { PieceStrategy::TwoTransversal } else { PieceStrategy::Plain };
    let pieces = piece_count(file.m, file.n, file.k as u32, strategy);
    println!("piece count: {pieces} ({strategy:?})");

    let r = range_metrics(c, code);
    println!(
        "range: r_x = {}, r_y = {}, depth = {}, bound saturated: {}",
        r.r_x, r.r_y, r.depth, r.bound_saturated
    );

    let action = verify_logical_action(c, code, LogicalGate::MultiControlledZ)?;
    if action.passed {
        println!("logical action: PASS ({} checks)", action.checked);
    } else {
        println!("logical action: FAIL ({} of {} checks)", action.mismatches.len(), action.checked);
        for msg in action.mismatches.iter().take(5) {
            println!("  {msg}");
        }
        ok = false;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Verify("verification failed".into()))
    }
}

#[derive(Serialize)]
struct PointReport {
    gate: GateLabel,
    rates: NoiseModel,
    p2_fail: f64,
    one_minus_p2_succ: f64,
    configs: u64,
}

fn cmd_threshold(cfg: &RunConfig) -> Run<()> {
    let gate: GateLabel = cfg.gate.parse()?;
    let family: ModelFamily = cfg.model.parse()?;
    let code = CodeSpec::new(cfg.m, cfg.n, Gauge::Z)?;
    let ex = assemble(gate, code, ExRecOptions::default())?;
    let counts = count(&ex, CountOptions { max_configs: cfg.max_configs, workers: cfg.workers })?;
    eprintln!("{gate:?}: {} fault configurations", counts.configs);

    if let Some(r) = &cfg.p_rates {
        let model = rates_model(r)?;
        let (f, s) = counts.evaluate(&model);
        let rep = PointReport { gate, rates: model, p2_fail: f, one_minus_p2_succ: 1.0 - s, configs: counts.configs };
        let json = serde_json::to_string_pretty(&rep).expect("serializable");
        return emit(cfg.out.as_deref(), &(json + "\n"));
    }

    let grid = parse_grid(&cfg.grid)?;
    let rows = curve(&counts, family, &grid)?;
    let summary = serde_json::to_string_pretty(&result_record(&counts, family, &grid)).expect("serializable");
    match &cfg.out {
        Some(p) => {
            emit(Some(p), &curve_csv(&rows))?;
            emit(Some(&p.with_extension("summary.json")), &(summary + "\n"))?;
        }
        None => {
            print!("{}", curve_csv(&rows));
            eprintln!("{summary}");
        }
    }
    let th = pseudothreshold(&counts, family)?;
    eprintln!("pseudothreshold ({}): lower {:.4e}, upper {:.4e}", family.name(), th.lower, th.upper);
    Ok(())
}

fn cmd_cost(cfg: &RunConfig) -> Run<()> {
    let protocols = match &cfg.protocol {
        Some(p) => vec![p.parse::<Protocol>()?],
        None => Protocol::ALL.to_vec(),
    };
    let profile = TimingProfile::default();
    let rows = protocols
        .into_iter()
        .map(|p| Ok((p, protocol_report(p, &profile)?)))
        .collect::<Run<Vec<_>>>()?;
    emit(cfg.out.as_deref(), &table_csv(&rows)?)
}

fn cmd_export_decoder(cfg: &RunConfig) -> Run<()> {
    let code = CodeSpec::new(cfg.m, cfg.n, parse_gauge(&cfg.gauge)?)?;
    let table = build_decoder_table(code, parse_round(&cfg.round)?)?;
    emit(cfg.out.as_deref(), &(table.to_json() + "\n"))
}

fn run(cli: Cli) -> Run<()> {
    let show = cli.show_config;
    let cfg = resolve(cli)?;
    if show {
        println!("{}", serde_json::to_string_pretty(&cfg).expect("serializable"));
        return Ok(());
    }
    match cfg.command.as_str() {
        "build" => cmd_build(&cfg),
        "check" => cmd_check(&cfg),
        "threshold" => cmd_threshold(&cfg),
        "cost" => cmd_cost(&cfg),
        "export-decoder" => cmd_export_decoder(&cfg),
        other => Err(usage(format!("unknown command {other:?}"))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_SOLVER)
        }
    }
}
