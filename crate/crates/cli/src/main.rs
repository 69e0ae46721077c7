//! `era`: run, verify, tamper with and measure ERA auctions.
//!
//! Exit codes: 0 success or accept, 1 verification reject, 2 usage, input or
//! protocol error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use era_core::auction::{
    patch_verify, verify_auction, AttestedLookup, AuctionConfig, Fault, InternalResult,
    OrderingTranscript, World,
};
use era_core::bulletin::Board;
use era_core::group::GroupParams;
use era_core::harness::{
    cost_report, latency_sample, mapped_bid_sweep, storage_report, LatencyClock,
};
use era_core::ope::{MappedBidLookup, OpeTable};

const BOARD_FILE: &str = "board.log";
const REVEALS_FILE: &str = "reveals.log";
const AGENT_FILE: &str = "agent.tsv";
const STATE_FILE: &str = "state.json";
const RESULTS_FILE: &str = "results.json";

#[derive(Parser)]
#[command(name = "era", version, about = "Verifiable second-price ad auctions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Initialize and run one auction, writing the board and prover files.
    Run {
        /// Flat `key = value` configuration file.
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Directory for board.log, reveals.log, agent.tsv, state.json and results.json.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Check a finished auction from its board and ordering transcript.
    Verify {
        board: PathBuf,
        reveals: PathBuf,
        /// Look mapped payments up in this agent table instead of the board attestation.
        #[arg(long)]
        agent: Option<PathBuf>,
    },
    /// Re-run the auction recorded in a state file with one injected fault.
    Tamper {
        board: PathBuf,
        #[arg(value_parser = parse_fault)]
        fault: Fault,
        /// Defaults to state.json next to the board.
        #[arg(long)]
        state: Option<PathBuf>,
        /// Directory for the corrupted board.log, reveals.log and results.json.
        #[arg(long, default_value = "tampered")]
        out: PathBuf,
    },
    /// The auctioneer's audit: list networks whose internal results disagree with the board.
    Patch {
        board: PathBuf,
        /// Defaults to results.json next to the board.
        #[arg(long)]
        results: Option<PathBuf>,
        /// Defaults to state.json next to the board.
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Benchmark sweeps as CSV.
    #[command(subcommand)]
    Bench(Bench),
    /// Bytes held by the exchange, the agent and each network.
    Storage {
        board: PathBuf,
        /// Defaults to agent.tsv next to the board, if present.
        #[arg(long)]
        agent: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Overrides {
    /// Override one configuration key, e.g. `--set l=100`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Bench {
    /// Latency of the parallel network model against a single auctioneer.
    /// Columns: l,w,rep,era_ms,benchmark_ms,wall_ms.
    Latency {
        #[arg(long, value_delimiter = ',', required = true)]
        l: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        w: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Clock::Measured)]
        clock: Clock,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time for one bidder to fetch a mapped bid. Columns: z,t,group_bits,elapsed_ms.
    Mapped {
        #[arg(long, value_delimiter = ',', required = true)]
        z: Vec<usize>,
        #[arg(long, default_value_t = 32)]
        t: u32,
        #[arg(long, default_value_t = 128)]
        group_bits: u64,
        #[arg(long, default_value_t = 3)]
        reps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-phase time and storage of one auction.
    /// Columns: phase,size,elapsed_ms,exchange_bytes,agent_bytes,network_bytes_mean.
    Cost {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Clock {
    Measured,
    Counted,
}

enum Failure {
    Reject(String),
    Error(String),
}

type Outcome = Result<(), Failure>;

fn error(e: impl std::fmt::Display) -> Failure {
    Failure::Error(e.to_string())
}

fn parse_fault(s: &str) -> Result<Fault, String> {
    s.parse().map_err(|e: era_core::auction::UnknownFault| {
        let kinds: Vec<&str> = Fault::ALL.iter().map(|f| f.name()).collect();
        format!("{e}; expected one of {}", kinds.join(", "))
    })
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| error(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Outcome {
    fs::write(path, contents).map_err(|e| error(format!("{}: {e}", path.display())))
}

fn sibling(board: &Path, explicit: Option<PathBuf>, name: &str) -> PathBuf {
    explicit.unwrap_or_else(|| board.with_file_name(name))
}

fn load_config(path: &Path, overrides: &Overrides) -> Result<AuctionConfig, Failure> {
    let mut cfg = AuctionConfig::parse(&read(path)?).map_err(error)?;
    for kv in &overrides.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| error(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        cfg.set(k.trim(), v.trim()).map_err(error)?;
    }
    cfg.validate().map_err(error)?;
    Ok(cfg)
}

fn load_world(path: &Path) -> Result<World, Failure> {
    serde_json::from_str(&read(path)?).map_err(|e| error(format!("{}: {e}", path.display())))
}

fn load_board(path: &Path) -> Result<Board, Failure> {
    Board::load(path).map_err(|e| error(format!("{}: {e}", path.display())))
}

fn write_run(
    out: &Path,
    board: &Board,
    transcript: &OrderingTranscript,
    results: &[InternalResult],
) -> Outcome {
    fs::create_dir_all(out).map_err(|e| error(format!("{}: {e}", out.display())))?;
    write(&out.join(BOARD_FILE), &board.to_text())?;
    write(&out.join(REVEALS_FILE), &transcript.to_text())?;
    let json = serde_json::to_string_pretty(results).map_err(error)?;
    write(&out.join(RESULTS_FILE), &json)
}

fn run(config: &Path, overrides: &Overrides, out: &Path) -> Outcome {
    let cfg = load_config(config, overrides)?;
    let world = World::init(&cfg).map_err(error)?;
    let run = world.run().map_err(error)?;
    write_run(out, &run.board, &run.transcript, &run.results)?;
    write(&out.join(AGENT_FILE), &world.agent.table.to_file_string())?;
    write(
        &out.join(STATE_FILE),
        &serde_json::to_string(&world).map_err(error)?,
    )?;
    println!("winner\t{}", run.outcome.winner);
    println!("payment_cents\t{}", run.outcome.payment_cents);
    println!("winner_network\t{}", run.outcome.winner_network);
    println!("board\t{}", out.join(BOARD_FILE).display());
    Ok(())
}

fn verify(board: &Path, reveals: &Path, agent: Option<&Path>) -> Outcome {
    let board = load_board(board)?;
    let transcript = OrderingTranscript::from_text(&board.header().auctioneer_key, &read(reveals)?)
        .map_err(|e| error(format!("{}: {e}", reveals.display())))?;
    let table;
    let lookup: &dyn MappedBidLookup = match agent {
        Some(path) => {
            table = OpeTable::from_file_str(&read(path)?)
                .map_err(|e| error(format!("{}: {e}", path.display())))?;
            &table
        }
        None => &AttestedLookup(&board),
    };
    match verify_auction(&board, &transcript, lookup) {
        Ok(()) => {
            println!("accept");
            Ok(())
        }
        Err(r) => Err(Failure::Reject(r.to_string())),
    }
}

fn tamper(board: &Path, fault: Fault, state: Option<PathBuf>, out: &Path) -> Outcome {
    let world = load_world(&sibling(board, state, STATE_FILE))?;
    let honest = world.run().map_err(error)?;
    if honest.board.to_text() != read(board)? {
        return Err(error("board does not match the state file"));
    }
    let run = world.execute(Some(fault)).map_err(error)?;
    write_run(out, &run.board, &run.transcript, &run.results)?;
    println!("fault\t{fault}");
    println!("board\t{}", out.join(BOARD_FILE).display());
    Ok(())
}

fn patch(board: &Path, results: Option<PathBuf>, state: Option<PathBuf>) -> Outcome {
    let world = load_world(&sibling(board, state, STATE_FILE))?;
    let results_path = sibling(board, results, RESULTS_FILE);
    let results: Vec<InternalResult> = serde_json::from_str(&read(&results_path)?)
        .map_err(|e| error(format!("{}: {e}", results_path.display())))?;
    let board = load_board(board)?;
    let blamed = patch_verify(&world.auctioneer.keys, &board, &results);
    if blamed.is_empty() {
        println!("blamed\tnone");
    } else {
        let ids: Vec<String> = blamed.iter().map(u32::to_string).collect();
        println!("blamed\t{}", ids.join(","));
    }
    Ok(())
}

fn csv_out<T: serde::Serialize>(rows: &[T], out: Option<&Path>) -> Outcome {
    let sink: Box<dyn Write> = match out {
        Some(p) => {
            Box::new(fs::File::create(p).map_err(|e| error(format!("{}: {e}", p.display())))?)
        }
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for row in rows {
        w.serialize(row).map_err(error)?;
    }
    w.flush().map_err(error)
}

fn bench(cmd: Bench) -> Outcome {
    match cmd {
        Bench::Latency {
            l,
            w,
            reps,
            seed,
            clock,
            out,
        } => {
            if l.iter().chain(&w).any(|&x| x == 0) || reps == 0 {
                return Err(error("sweep values must be positive"));
            }
            let clock = match clock {
                Clock::Measured => LatencyClock::Measured,
                Clock::Counted => LatencyClock::Counted,
            };
            let mut rows = Vec::new();
            for &l in &l {
                for &w in &w {
                    for rep in 0..reps {
                        rows.push(latency_sample(l, w, rep, seed, clock));
                    }
                }
            }
            csv_out(&rows, out.as_deref())
        }
        Bench::Mapped {
            z,
            t,
            group_bits,
            reps,
            seed,
            out,
        } => {
            #[derive(serde::Serialize)]
            struct Row {
                z: usize,
                t: u32,
                group_bits: u64,
                elapsed_ms: f64,
            }
            let group = GroupParams::generate(group_bits, &seed.to_be_bytes()).map_err(error)?;
            let times = mapped_bid_sweep(&z, t, &group, reps, seed).map_err(error)?;
            let rows: Vec<Row> = z
                .into_iter()
                .zip(times)
                .map(|(z, d)| Row {
                    z,
                    t,
                    group_bits,
                    elapsed_ms: d.as_secs_f64() * 1e3,
                })
                .collect();
            csv_out(&rows, out.as_deref())
        }
        Bench::Cost {
            config,
            overrides,
            out,
        } => {
            let cfg = load_config(&config, &overrides)?;
            csv_out(&cost_report(&cfg).map_err(error)?, out.as_deref())
        }
    }
}

fn storage(board_path: &Path, agent: Option<PathBuf>) -> Outcome {
    let board = load_board(board_path)?;
    let agent_bytes = match agent {
        Some(p) => read(&p)?.len(),
        None => fs::read_to_string(board_path.with_file_name(AGENT_FILE))
            .map(|s| s.len())
            .unwrap_or(0),
    };
    let report = storage_report(&board, agent_bytes);
    println!("exchange_bytes\t{}", report.exchange_bytes);
    println!("agent_bytes\t{}", report.agent_bytes);
    println!("network_bytes_mean\t{:.1}", report.mean_network_bytes());
    for (id, bytes) in &report.network_bytes {
        println!("network\t{id}\t{bytes}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            overrides,
            out,
        } => run(&config, &overrides, &out),
        Command::Verify {
            board,
            reveals,
            agent,
        } => verify(&board, &reveals, agent.as_deref()),
        Command::Tamper {
            board,
            fault,
            state,
            out,
        } => tamper(&board, fault, state, &out),
        Command::Patch {
            board,
            results,
            state,
        } => patch(&board, results, state),
        Command::Bench(b) => bench(b),
        Command::Storage { board, agent } => storage(&board, agent),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Reject(msg)) => {
            println!("reject: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Error(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
