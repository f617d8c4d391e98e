use std::collections::VecDeque;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::sync::mpsc::{self, RecvTimeoutError, Sender};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use clap::{Parser, ValueEnum};
use preproj::quiver::DynkinType;
use preproj::suites::{run_suite, RunConfig, Status, Suite, Verdict, WeightMode, Workspace};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Resolution,
    Hochschild,
    Cyclic,
    Deformation,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

/// Verify the structure theory of centrally extended preprojective algebras.
#[derive(Parser, Debug)]
#[command(name = "verify", version)]
struct Args {
    /// Dynkin type: A, D or E.
    #[arg(long = "type")]
    kind: DynkinType,
    #[arg(long)]
    rank: usize,
    /// `rho` or `random:<seed>`.
    #[arg(long, default_value = "rho")]
    weight: WeightMode,
    #[arg(long, value_enum, default_value = "all")]
    suite: Vec<SuiteArg>,
    /// Degree cap for the algebra build (at least 2h-2).
    #[arg(long)]
    degree_cap: Option<usize>,
    /// Series truncation order (defaults: 40 with an algebra, 60 for profile identities).
    #[arg(long)]
    order: Option<usize>,
    /// Seed for the trace functional and the deformation parameters.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Report file; the report goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Per-suite timeout in seconds.
    #[arg(long, default_value_t = 900)]
    timeout: u64,
    /// Worker threads for suites.
    #[arg(long, default_value_t = 2)]
    jobs: usize,
    /// Number of random deformation parameter draws.
    #[arg(long, default_value_t = 3)]
    deformation_seeds: usize,
    /// Order N of the formal line Q[e]/e^N used for flatness.
    #[arg(long, default_value_t = 2)]
    formal_order: usize,
    /// Largest Coxeter number for which an algebra is built.
    #[arg(long, default_value_t = 8)]
    max_coxeter: usize,
}

impl Args {
    fn config(&self) -> RunConfig {
        let mut cfg = RunConfig::new(self.kind, self.rank);
        cfg.weight = self.weight;
        cfg.suites = if self.suite.iter().any(|s| matches!(s, SuiteArg::All)) {
            Suite::ALL.to_vec()
        } else {
            let mut v: Vec<Suite> = self
                .suite
                .iter()
                .map(|s| match s {
                    SuiteArg::Resolution => Suite::Resolution,
                    SuiteArg::Hochschild => Suite::Hochschild,
                    SuiteArg::Cyclic => Suite::Cyclic,
                    _ => Suite::Deformation,
                })
                .collect();
            v.dedup();
            v
        };
        cfg.degree_cap = self.degree_cap;
        if let Some(n) = self.order {
            cfg.order = n;
            cfg.profile_order = n;
        }
        cfg.seed = self.seed;
        cfg.deformation_seeds = self.deformation_seeds;
        cfg.formal_order = self.formal_order;
        cfg.max_coxeter = self.max_coxeter;
        cfg
    }
}

enum Event {
    Started(usize),
    Verdict(usize, Verdict),
    Finished(usize),
}

fn spawn_worker(
    queue: Arc<Mutex<VecDeque<usize>>>,
    suites: Arc<Vec<Suite>>,
    cfg: Arc<RunConfig>,
    ws: Option<Arc<Workspace>>,
    tx: Sender<Event>,
) {
    thread::spawn(move || loop {
        let Some(i) = queue.lock().expect("queue lock").pop_front() else {
            return;
        };
        if tx.send(Event::Started(i)).is_err() {
            return;
        }
        run_suite(suites[i], &cfg, ws.as_deref(), &mut |v| {
            let _ = tx.send(Event::Verdict(i, v));
        });
        let _ = tx.send(Event::Finished(i));
    });
}

/// Runs the suites on a bounded pool. A suite that exceeds the timeout keeps
/// the verdicts it already produced plus a timeout row.
fn dispatch(cfg: RunConfig, ws: Option<Workspace>, jobs: usize, timeout: Duration) -> Vec<Verdict> {
    let suites = Arc::new(cfg.suites.clone());
    let n = suites.len();
    let cfg = Arc::new(cfg);
    let ws = ws.map(Arc::new);
    let queue = Arc::new(Mutex::new((0..n).collect::<VecDeque<_>>()));
    let (tx, rx) = mpsc::channel();
    for _ in 0..jobs.clamp(1, n.max(1)) {
        spawn_worker(queue.clone(), suites.clone(), cfg.clone(), ws.clone(), tx.clone());
    }

    let mut results: Vec<Vec<Verdict>> = vec![Vec::new(); n];
    let mut started: Vec<Option<Instant>> = vec![None; n];
    let mut closed = vec![false; n];
    let name = format!("{}{}", cfg.kind, cfg.rank);
    while closed.iter().any(|c| !c) {
        let now = Instant::now();
        let wait = (0..n)
            .filter(|&i| !closed[i])
            .filter_map(|i| started[i].map(|s| (s + timeout).saturating_duration_since(now)))
            .min()
            .unwrap_or(timeout);
        match rx.recv_timeout(wait) {
            Ok(Event::Started(i)) => started[i] = Some(Instant::now()),
            Ok(Event::Verdict(i, v)) if !closed[i] => results[i].push(v),
            Ok(Event::Finished(i)) => closed[i] = true,
            Ok(Event::Verdict(..)) => {}
            Err(RecvTimeoutError::Timeout) => {
                for i in 0..n {
                    let expired = started[i].is_some_and(|s| s.elapsed() >= timeout);
                    if !closed[i] && expired {
                        closed[i] = true;
                        let mut v = Verdict::new(
                            suites[i],
                            "suite_timeout",
                            &name,
                            false,
                            format!("stopped after {}s; rows above are partial", timeout.as_secs()),
                        );
                        v.status = Status::Timeout;
                        results[i].push(v);
                        spawn_worker(queue.clone(), suites.clone(), cfg.clone(), ws.clone(), tx.clone());
                    }
                }
            }
            Err(RecvTimeoutError::Disconnected) => break,
        }
    }
    results.into_iter().flatten().collect()
}

fn tsv(verdicts: &[Verdict]) -> String {
    let mut s = String::from("suite\tcheck\tquiver\torder\tstatus\tdetail\n");
    for v in verdicts {
        s.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            v.suite,
            v.check,
            v.quiver,
            v.order.map(|o| o.to_string()).unwrap_or_default(),
            v.status,
            v.detail.replace(['\t', '\n'], " ")
        ));
    }
    s
}

fn json(cfg: &RunConfig, algebra: Option<&(Vec<String>, serde_json::Value)>, verdicts: &[Verdict]) -> String {
    let report = serde_json::json!({
        "quiver": format!("{}{}", cfg.kind, cfg.rank),
        "weight": cfg.weight.to_string(),
        "mu": algebra.map(|a| &a.0),
        "seed": cfg.seed,
        "suites": cfg.suites,
        "algebra": algebra.map(|a| &a.1),
        "passed": verdicts.iter().all(Verdict::passed),
        "verdicts": verdicts,
    });
    serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
}

fn summary(verdicts: &[Verdict]) -> String {
    let w = verdicts.iter().map(|v| v.check.len()).max().unwrap_or(5).max(5);
    let mut s = format!("{:<12} {:<w$} {:<8} {:<13} detail\n", "suite", "check", "quiver", "status");
    for v in verdicts {
        s.push_str(&format!(
            "{:<12} {:<w$} {:<8} {:<13} {}\n",
            v.suite.to_string(),
            v.check,
            v.quiver,
            v.status.to_string(),
            v.detail
        ));
    }
    let passed = verdicts.iter().filter(|v| v.passed()).count();
    s.push_str(&format!("{passed}/{} checks passed\n", verdicts.len()));
    s
}

fn run(args: Args) -> Result<bool> {
    let cfg = args.config();
    cfg.validate()?;
    let ws = if cfg.suites.iter().any(|s| s.needs_algebra()) {
        Some(Workspace::build(&cfg).context("building the algebra")?)
    } else {
        None
    };
    let algebra = ws.as_ref().map(|w| (w.mu.to_strings(), w.alg.to_json()));
    let verdicts = dispatch(cfg.clone(), ws, args.jobs, Duration::from_secs(args.timeout));
    let body = match args.format {
        Format::Tsv => tsv(&verdicts),
        Format::Json => json(&cfg, algebra.as_ref(), &verdicts),
    };
    let table = summary(&verdicts);
    match &args.out {
        Some(path) => {
            fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
            print!("{table}");
        }
        None => {
            eprint!("{table}");
            std::io::stdout().write_all(body.as_bytes())?;
        }
    }
    Ok(verdicts.iter().all(Verdict::passed))
}

fn main() {
    let code = match run(Args::parse()) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    };
    let _ = std::io::stdout().flush();
    // Timed-out suites may still be running on detached threads.
    std::process::exit(code);
}
