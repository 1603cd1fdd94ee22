//! One function per subcommand; each returns the report text.

use std::path::Path;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use heatcomp_core::circuits::examples;
use heatcomp_core::machines::oscillator::{root_engine_all, OscillatorRun};
use heatcomp_core::*;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::args::{Command, ExampleCircuit, GateSetArg, Global, OscillatorMode};
use crate::io::{parse_mode, read_input, to_json, write_text, CliError, CliResult, Literals};

pub struct Context {
    pub global: Global,
    pub lits: Literals,
    pub cancel: Arc<AtomicBool>,
}

impl Context {
    pub fn new(global: Global, cancel: Arc<AtomicBool>) -> CliResult<Self> {
        let mode = parse_mode(&global.scalar_mode, global.precision)?;
        Ok(Context { lits: Literals { precision: global.precision, mode }, global, cancel })
    }

    fn ensemble(&self) -> CliResult<Ensemble> {
        let text = read_input(self.global.input.as_deref())?;
        Ok(parse_ensemble(&text, self.global.precision, self.lits.mode)?)
    }

    fn progress(&self, msg: &str) {
        if !self.global.quiet {
            eprintln!("heatcomp: {msg}");
        }
    }
}

fn permutation(images: Vec<usize>, dim: usize) -> CliResult<Permutation> {
    if images.len() != dim {
        return Err(CliError::precondition(format!("--perm has {} entries, the ensemble has {dim} states", images.len())));
    }
    Ok(Permutation::from_images(images)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KnapsackDoc {
    e_a: String,
    gaps: Vec<String>,
    t_a: String,
    t_b: String,
}

fn random_knapsack(n: usize, seed: u64) -> CliResult<KnapsackInstance> {
    if n > 16 {
        return Err(CliError::precondition(format!("--random {n} exceeds 16 items")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let int = |v: i64| BigRational::from_integer(v.into());
    loop {
        let gaps = (0..n).map(|_| int(rng.random_range(1..=40))).collect();
        let t_b = int(rng.random_range(1..=4));
        let t_a = &t_b * BigRational::new(rng.random_range(11..=40).into(), 10.into());
        let e_a = int(rng.random_range(1..=80));
        // Degenerate draws are rejected by the constructor; redraw.
        if let Ok(inst) = KnapsackInstance::new(e_a, gaps, t_a, t_b) {
            return Ok(inst);
        }
    }
}

fn parse_window(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::precondition(format!("--window expects N or NxM, got `{s}`"));
    match s.split_once(['x', 'X']) {
        Some((a, b)) => Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)),
        None => {
            let n = s.trim().parse().map_err(|_| bad())?;
            Ok((n, n))
        }
    }
}

/// Writes a DOT rendering of `flow` to `path`, or stdout when absent.
pub fn emit_dot(flow: &FlowField, path: Option<&Path>) -> CliResult<()> {
    write_text(path, &flow.to_dot())
}

fn filter_run(mut run: OscillatorRun, n: Option<usize>) -> CliResult<Value> {
    if let Some(n) = n {
        run.images.retain(|im| im.input.first() == Some(&n));
        if run.images.is_empty() {
            return Err(CliError::precondition(format!("input {n} is outside the probed range")));
        }
    }
    serde_json::to_value(run).map_err(|e| CliError::Internal(e.to_string()))
}

/// Runs one subcommand. Most commands return JSON; `flow-dot` writes DOT itself.
pub fn dispatch(ctx: &Context, cmd: Command) -> CliResult<()> {
    let l = &ctx.lits;
    let report: Value = match cmd {
        Command::Optimal => {
            let ens = ctx.ensemble()?;
            optimal_engine(&ens).to_json(&ens)
        }
        Command::Gain { perm } => {
            let ens = ctx.ensemble()?;
            let p = permutation(perm, ens.dim())?;
            json!({ "permutation": p.images(), "gain": energy_gain(&ens, p.images())?.to_string() })
        }
        Command::SwapCheck { e_a, t_a, e_b, t_b } => {
            let (ea, eb) = (l.scalar("e-a", &e_a)?, l.scalar("e-b", &e_b)?);
            let (ta, tb) = (l.temperature("t-a", &t_a)?, l.temperature("t-b", &t_b)?);
            json!({ "feasible": swap_engine_feasible(&ea, &ta, &eb, &tb)? })
        }
        Command::Threshold { hot, cold, ratio } => {
            let t = gap_threshold(hot, cold)?.map(|r| Scalar::Exact(r).to_string());
            match ratio {
                None => json!({ "threshold": t }),
                Some(r) => {
                    let r = l.scalar("ratio", &r)?;
                    json!({ "threshold": t, "ratio": r.to_string(), "witness": gap_engine_exists(hot, cold, &r) })
                }
            }
        }
        Command::Copies { probs, levels, n_max } => {
            let p = probs.iter().map(|s| l.scalar("probs", s)).collect::<CliResult<Vec<_>>>()?;
            let e = levels.iter().map(|s| l.scalar("levels", s)).collect::<CliResult<Vec<_>>>()?;
            json!({ "result": copies_witness(&p, &e, n_max)? })
        }
        Command::CircuitSearch { max_gates, gate_set, max_states } => {
            let ens = ctx.ensemble()?;
            let quiet = ctx.global.quiet;
            let opts = SearchOptions {
                gate_set: match gate_set {
                    GateSetArg::Toffoli => GateSet::Toffoli,
                    GateSetArg::All => GateSet::All,
                },
                max_gates,
                max_states,
                cancel: Some(ctx.cancel.clone()),
                progress: Some(Arc::new(move |len, count| {
                    if !quiet {
                        eprintln!("heatcomp: length {len} done, {count} distinct permutations");
                    }
                })),
            };
            let r = search_min_circuit(&ens, &opts)?;
            if r.partial {
                ctx.progress("search stopped early; the report is partial");
            }
            serde_json::to_value(r).map_err(|e| CliError::Internal(e.to_string()))?
        }
        Command::CircuitSim { circuit, example, width, hot } => {
            let c = match (circuit, example) {
                (_, Some(ExampleCircuit::Fig2)) => examples::fig2(),
                (_, Some(ExampleCircuit::Fig4Left)) => examples::fig4_left(),
                (_, Some(ExampleCircuit::Fig4Right)) => examples::fig4_right(),
                (Some(path), None) => {
                    let width = width.ok_or_else(|| CliError::precondition("--circuit needs --width"))?;
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| CliError::precondition(format!("reading {}: {e}", path.display())))?;
                    Circuit::parse(&text, width, hot)?
                }
                (None, None) => return Err(CliError::precondition("circuit-sim needs --circuit or --example")),
            };
            let p = simulate(&c);
            let gain = match ctx.global.input {
                Some(_) => Some(circuit_gain(&c, &ctx.ensemble()?)?.to_string()),
                None => None,
            };
            let cycles: Vec<_> = p.cycles().into_iter().filter(|c| c.len() > 1).collect();
            json!({ "circuit": c, "permutation": p.images(), "cycles": cycles, "gain": gain })
        }
        Command::Knapsack { random } => {
            let inst = match random {
                Some(n) => random_knapsack(n, ctx.global.seed)?,
                None => {
                    let text = read_input(ctx.global.input.as_deref())?;
                    let doc: KnapsackDoc = serde_json::from_str(&text).map_err(|e| CliError::precondition(format!("knapsack input: {e}")))?;
                    let gaps = doc.gaps.iter().map(|g| l.rational("gaps", g)).collect::<CliResult<Vec<_>>>()?;
                    KnapsackInstance::new(l.rational("e_a", &doc.e_a)?, gaps, l.rational("t_a", &doc.t_a)?, l.rational("t_b", &doc.t_b)?)?
                }
            };
            let r = knapsack_solve(&inst)?;
            json!({ "instance": inst, "report": r })
        }
        Command::Majority { n, hot } => {
            serde_json::to_value(majority_engine(n, l.temperature("hot", &hot)?)?).map_err(|e| CliError::Internal(e.to_string()))?
        }
        Command::Refrigerator { n, t } => {
            serde_json::to_value(refrigerator(n, l.temperature("t", &t)?)?).map_err(|e| CliError::Internal(e.to_string()))?
        }
        Command::ThreeLevel { e, q } => {
            let pair = three_level_engine(&l.scalar("e", &e)?, &l.scalar("q", &q)?)?;
            let gadgets = if pair.is_canonical() { Some(three_level_gates(&pair)?) } else { None };
            json!({ "e": pair.e, "q": pair.q, "canonical": pair.is_canonical(), "map": pair.table(), "gadgets": gadgets })
        }
        Command::Oscillator { mode, k, n, m, cutoff, c, max_total } => match mode {
            OscillatorMode::Sqrt => filter_run(root_engine_all(2, cutoff)?, n)?,
            OscillatorMode::RootK => filter_run(root_engine_all(k, cutoff)?, n)?,
            OscillatorMode::Square => {
                let c = l.rational("c", &c)?;
                match n {
                    Some(n) => serde_json::to_value(square_engine(n, m, &c)?).map_err(|e| CliError::Internal(e.to_string()))?,
                    None => filter_run(power_engine_all(2, &c, max_total)?, None)?,
                }
            }
            OscillatorMode::PowerK => filter_run(power_engine_all(k, &l.rational("c", &c)?, max_total)?, n)?,
        },
        Command::ConvertBase { value, n_a, n_b, e_a, e_b } => {
            let r = radix_convert(value, n_a, n_b, &l.rational("e-a", &e_a)?, &l.rational("e-b", &e_b)?)?;
            serde_json::to_value(r).map_err(|e| CliError::Internal(e.to_string()))?
        }
        Command::FlowDot { e, q, window, report } => {
            let flow = term_order_flow(&l.scalar("e", &e)?, &l.scalar("q", &q)?, parse_window(&window)?)?;
            emit_dot(&flow, ctx.global.output.as_deref())?;
            if let Some(path) = report {
                write_text(Some(&path), &to_json(&flow.to_json())?)?;
            }
            ctx.progress(&format!("{} arrows, {} moving", flow.arrows.len(), flow.moving));
            return Ok(());
        }
        Command::Embed { perm, widths } => {
            let ens = ctx.ensemble()?;
            let p = match perm {
                Some(images) => permutation(images, ens.dim())?,
                None => optimal_engine(&ens).permutation,
            };
            serde_json::to_value(fidelity_series(&ens, &p, &widths)?).map_err(|e| CliError::Internal(e.to_string()))?
        }
    };
    write_text(ctx.global.output.as_deref(), &to_json(&report)?)
}
