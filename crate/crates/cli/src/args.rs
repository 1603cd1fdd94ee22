use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "heatcomp", version, about = "Optimal unitary heat engines and the machines they compute with")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Input document: a path, `-` for stdin, or inline JSON starting with `{`.
    #[arg(long, short, global = true)]
    pub input: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// `rational` keeps exact literals exact; `real` or `real:BITS` converts everything.
    #[arg(long, global = true, default_value = "rational")]
    pub scalar_mode: String,
    /// Default working precision in bits for real scalars.
    #[arg(long, global = true, env = "HEATCOMP_PRECISION", default_value_t = heatcomp_core::DEFAULT_PRECISION)]
    pub precision: usize,
    /// Seed for randomized instance generation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Suppress progress lines on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Optimal engine of the input ensemble.
    Optimal,
    /// Energy gain of a given permutation on the input ensemble.
    Gain {
        /// Comma-separated images, `pi(0),pi(1),...`.
        #[arg(long, value_delimiter = ',', required = true)]
        perm: Vec<usize>,
    },
    /// Whether exchanging one excitation between two qubits extracts energy.
    SwapCheck {
        #[arg(long)]
        e_a: String,
        #[arg(long)]
        t_a: String,
        #[arg(long)]
        e_b: String,
        #[arg(long)]
        t_b: String,
    },
    /// Least `T_A / T_B` admitting an engine on equal-gap qubits.
    Threshold {
        #[arg(long)]
        hot: usize,
        #[arg(long)]
        cold: usize,
        /// Also search for a witness at this temperature ratio.
        #[arg(long)]
        ratio: Option<String>,
    },
    /// Smallest number of copies of a state whose tensor power admits an engine.
    Copies {
        #[arg(long, value_delimiter = ',', required = true)]
        probs: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<String>,
        #[arg(long, default_value_t = 12)]
        n_max: u32,
    },
    /// Exhaustive search for the shortest gate sequence with positive gain.
    CircuitSearch {
        #[arg(long, default_value_t = 5)]
        max_gates: usize,
        #[arg(long, value_enum, default_value_t = GateSetArg::Toffoli)]
        gate_set: GateSetArg,
        /// Stop with a partial result after storing this many permutations.
        #[arg(long)]
        max_states: Option<usize>,
    },
    /// Simulates a circuit and, given an ensemble, reports its gain.
    CircuitSim {
        /// Gate list, one `NOT t` / `CNOT c t` / `TOFFOLI a b t` per line (1-based wires).
        #[arg(long, conflicts_with = "example")]
        circuit: Option<PathBuf>,
        #[arg(long, value_enum)]
        example: Option<ExampleCircuit>,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long, default_value_t = 0)]
        hot: usize,
    },
    /// Knapsack decision via the hot-qubit engine.
    Knapsack {
        /// Generate a random instance with this many items instead of reading input.
        #[arg(long)]
        random: Option<usize>,
    },
    /// Majority engine on 2n hot qubits and one cold qubit.
    Majority {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "infinite")]
        hot: String,
    },
    /// Refrigerator cooling one qubit among 2n + 1 at a common temperature.
    Refrigerator {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1/ln3")]
        t: String,
    },
    /// Two three-level systems, their engine table, and the logic gadgets.
    ThreeLevel {
        #[arg(long, default_value = "3/4")]
        e: String,
        #[arg(long, default_value = "3")]
        q: String,
    },
    /// Harmonic-oscillator calculators.
    Oscillator {
        #[arg(value_enum)]
        mode: OscillatorMode,
        /// Number of modes for `root-k` and `power-k`.
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Probe a single input (roots) or first mode (powers); all inputs otherwise.
        #[arg(long)]
        n: Option<usize>,
        /// Second-mode occupation for `square`.
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long, default_value_t = 200)]
        cutoff: usize,
        /// Gap ratio between hot and cold modes for powers.
        #[arg(long, default_value = "10000")]
        c: String,
        /// Largest total input for powers.
        #[arg(long, default_value_t = 12)]
        max_total: usize,
    },
    /// Base conversion with two digit registers.
    ConvertBase {
        #[arg(long)]
        value: usize,
        #[arg(long)]
        n_a: usize,
        #[arg(long)]
        n_b: usize,
        #[arg(long, default_value = "100")]
        e_a: String,
        #[arg(long, default_value = "1")]
        e_b: String,
    },
    /// Lattice flow field of the two-oscillator engine as a DOT graph.
    FlowDot {
        #[arg(long, default_value = "sqrt2")]
        e: String,
        #[arg(long, default_value = "sqrt3")]
        q: String,
        /// `N` for an N x N window or `NxM`.
        #[arg(long, default_value = "12")]
        window: String,
        /// Also write the JSON flow report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Energy-conserving embedding of an engine and its fidelity series.
    Embed {
        /// Permutation to embed; the optimal engine when omitted.
        #[arg(long, value_delimiter = ',')]
        perm: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![16usize, 64, 256, 1024])]
        widths: Vec<usize>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateSetArg {
    Toffoli,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleCircuit {
    Fig2,
    Fig4Left,
    Fig4Right,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OscillatorMode {
    Sqrt,
    Square,
    RootK,
    PowerK,
}
