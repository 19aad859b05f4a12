//! Command-line and config-file options.
//!
//! Every subcommand's options exist in two layers: flags, and a TOML table of
//! the same keys (kebab-case) in the file given by `--config`. A flag wins
//! over the file; an option absent from both takes the command's default.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Discrete and continuous-time quantum walk experiments")]
pub struct Cli {
    /// TOML file with defaults for any subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default: $QWALK_OUT_DIR, then the current directory).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// File stem for the CSV outputs (default: the command name).
    #[arg(long, global = true)]
    pub output: Option<String>,
    /// Worker threads for parallel sweeps (default: available parallelism).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coined walk on a graph, or on the column-reduced glued trees (`--graph mapped:B=2,N=10`).
    Walk(WalkArgs),
    /// Continuous-time walk on an adjacency Hamiltonian or the glued-trees column chain.
    CtWalk(CtWalkArgs),
    #[command(subcommand)]
    Sweep(SweepCommand),
    #[command(subcommand)]
    Analyze(AnalyzeCommand),
}

#[derive(Debug, Subcommand)]
pub enum SweepCommand {
    /// First exit peak against tree depth N.
    Depth(DepthArgs),
    /// First exit peak against branching B.
    Branching(BranchingArgs),
    /// Lattice spread over families of initial coin phases.
    Phases(PhasesArgs),
    /// Entanglement oscillation amplitude over initial (α, β).
    Landscape(LandscapeArgs),
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Period of the walk on K_{d,d} from state fidelity.
    BipartitePeriod(PeriodArgs),
    /// Fourier blocks U_k of the Grover walk on K_{d,d}.
    FourierBlocks(FourierArgs),
    /// Transmission probability through the glue junction.
    Transmission(TransmissionArgs),
}

macro_rules! layered {
    ($(#[$m:meta])* pub struct $name:ident { $($(#[$fm:meta])* pub $f:ident: Option<$t:ty>,)* }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Default, Args, Deserialize)]
        #[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
        pub struct $name {
            $($(#[$fm])* pub $f: Option<$t>,)*
        }

        impl $name {
            pub fn over(self, file: Self) -> Self {
                Self { $($f: self.$f.or(file.$f),)* }
            }
        }
    };
}

layered! {
    pub struct WalkArgs {
        /// Graph spec, e.g. `line:5001`, `lattice:tri6,60`, `gluedtrees:B=2,N=4,seed=7`, `mapped:B=2,N=10`.
        #[arg(long)]
        pub graph: Option<String>,
        /// Coin spec, e.g. `hadamard`, `bias:0.2`, `grover:6`; `grover|dft` on mapped graphs.
        #[arg(long)]
        pub coin: Option<String>,
        /// Initial coin state: `sym`, `L`, `R`, `uniform`, `split`, `eta:η,β`, `alpha:α,β`, `phaseidx:k…`, `vec:z…`.
        #[arg(long)]
        pub init: Option<String>,
        /// Start vertex (default: entrance, lattice centre, or vertex 0).
        #[arg(long)]
        pub start: Option<usize>,
        #[arg(long)]
        pub steps: Option<usize>,
        /// Comma list of `dist`, `entropy`, `spread`, `exit`, `fidelity`.
        #[arg(long)]
        pub obs: Option<String>,
        /// Root coin on glued trees (`sigmax`, `sym2d`, `grover` or a coin spec); coin for low-degree vertices elsewhere.
        #[arg(long)]
        pub end: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        pub end_phase: Option<f64>,
        /// Glue seed, overriding any `seed=` in the graph spec.
        #[arg(long)]
        pub seed: Option<u64>,
    }
}

layered! {
    pub struct CtWalkArgs {
        /// Graph spec; `mapped:B=2,N=10` selects the column chain.
        #[arg(long)]
        pub graph: Option<String>,
        /// Hopping rate γ on adjacency Hamiltonians.
        #[arg(long)]
        pub gamma: Option<f64>,
        #[arg(long)]
        pub start: Option<usize>,
        /// Vertex whose probability is the `exit` column (default: the graph's exit).
        #[arg(long)]
        pub target: Option<usize>,
        /// Number of time intervals; rows are t = k·dt for k = 0..=steps.
        #[arg(long)]
        pub steps: Option<usize>,
        #[arg(long)]
        pub dt: Option<f64>,
        /// Comma list of `dist`, `exit`.
        #[arg(long)]
        pub obs: Option<String>,
        #[arg(long)]
        pub seed: Option<u64>,
    }
}

layered! {
    pub struct DepthArgs {
        /// `ct`, `grover` or `dft`.
        #[arg(long)]
        pub coin: Option<String>,
        #[arg(long = "B")]
        #[serde(alias = "B")]
        pub b: Option<usize>,
        /// Depths: `a:b`, `a:b:step` (inclusive) or a comma list.
        #[arg(long = "N")]
        #[serde(alias = "N")]
        pub n: Option<String>,
        /// Root coin: `sigmax`, `sym2d`, `grover` or a coin spec.
        #[arg(long)]
        pub end: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        pub end_phase: Option<f64>,
    }
}

layered! {
    pub struct BranchingArgs {
        #[arg(long)]
        pub coin: Option<String>,
        /// Branchings: `a:b`, `a:b:step` (inclusive) or a comma list.
        #[arg(long = "B")]
        #[serde(alias = "B")]
        pub b: Option<String>,
        #[arg(long = "N")]
        #[serde(alias = "N")]
        pub n: Option<usize>,
        #[arg(long)]
        pub end: Option<String>,
        #[arg(long, allow_negative_numbers = true)]
        pub end_phase: Option<f64>,
    }
}

layered! {
    pub struct PhasesArgs {
        /// `cart4`, `tri6` or `diag8`.
        #[arg(long)]
        pub lattice: Option<String>,
        /// `grover`, `dft` or a coin spec of the lattice degree.
        #[arg(long)]
        pub coin: Option<String>,
        /// `free`, `all` or `subset`.
        #[arg(long)]
        pub set: Option<String>,
        #[arg(long)]
        pub t: Option<usize>,
        /// `flip` (arrive on the slot pointing back) or `move`.
        #[arg(long)]
        pub shift: Option<String>,
    }
}

layered! {
    pub struct LandscapeArgs {
        #[arg(long)]
        pub coin: Option<String>,
        #[arg(long)]
        pub steps: Option<usize>,
        /// Trailing steps over which the amplitude is measured.
        #[arg(long)]
        pub window: Option<usize>,
        /// Grid points for α on [0, π/2].
        #[arg(long)]
        pub alpha_points: Option<usize>,
        /// Grid points for β on [0, π].
        #[arg(long)]
        pub beta_points: Option<usize>,
    }
}

layered! {
    pub struct PeriodArgs {
        #[arg(long)]
        pub d: Option<usize>,
        /// `grover`, `dft` or a coin spec.
        #[arg(long)]
        pub coin: Option<String>,
        #[arg(long)]
        pub init: Option<String>,
        /// Longest period searched.
        #[arg(long)]
        pub max: Option<usize>,
        #[arg(long)]
        pub tol: Option<f64>,
    }
}

layered! {
    pub struct FourierArgs {
        #[arg(long)]
        pub d: Option<usize>,
    }
}

layered! {
    pub struct TransmissionArgs {
        #[arg(long = "B")]
        #[serde(alias = "B")]
        pub b: Option<f64>,
        /// Grid points for κ on [0, π].
        #[arg(long)]
        pub points: Option<usize>,
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub out_dir: Option<PathBuf>,
    pub output: Option<String>,
    pub workers: Option<usize>,
    pub walk: WalkArgs,
    pub ct_walk: CtWalkArgs,
    pub sweep: SweepFile,
    pub analyze: AnalyzeFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SweepFile {
    pub depth: DepthArgs,
    pub branching: BranchingArgs,
    pub phases: PhasesArgs,
    pub landscape: LandscapeArgs,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct AnalyzeFile {
    pub bipartite_period: PeriodArgs,
    pub fourier_blocks: FourierArgs,
    pub transmission: TransmissionArgs,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Settings shared by every command after layering.
#[derive(Debug, Clone)]
pub struct Common {
    pub out_dir: PathBuf,
    pub output: Option<String>,
    pub workers: Option<usize>,
}

impl Common {
    pub fn resolve(cli: &Cli, file: &FileConfig) -> Self {
        let out_dir = cli
            .out_dir
            .clone()
            .or_else(|| file.out_dir.clone())
            .or_else(|| std::env::var_os("QWALK_OUT_DIR").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        Self {
            out_dir,
            output: cli.output.clone().or_else(|| file.output.clone()),
            workers: cli.workers.or(file.workers),
        }
    }

    pub fn stem<'a>(&'a self, default: &'a str) -> &'a str {
        self.output.as_deref().unwrap_or(default)
    }
}

/// Parses `a:b`, `a:b:step` (inclusive) or `x,y,z`.
pub fn parse_range(field: &str, s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Config(format!("{field}: '{s}' is not a range or list"));
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
    let values = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let (lo, hi, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err(bad()),
        };
        if step == 0 || lo > hi {
            return Err(bad());
        }
        (lo..=hi).step_by(step).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err(bad());
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("N", "3:6").unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(parse_range("N", "10:30:10").unwrap(), vec![10, 20, 30]);
        assert_eq!(parse_range("N", "5,9").unwrap(), vec![5, 9]);
        assert!(parse_range("N", "9:5").is_err());
        assert!(parse_range("N", "1:x").is_err());
    }

    #[test]
    fn flags_override_file() {
        let file: FileConfig = toml::from_str(
            "workers = 3\n[walk]\ngraph = \"line:11\"\nsteps = 4\n[sweep.depth]\nB = 3\nN = \"5:9\"\n",
        )
        .unwrap();
        let flags = WalkArgs {
            steps: Some(7),
            ..WalkArgs::default()
        };
        let w = flags.over(file.walk);
        assert_eq!(w.graph.as_deref(), Some("line:11"));
        assert_eq!(w.steps, Some(7));
        assert_eq!(file.sweep.depth.b, Some(3));
        assert_eq!(file.workers, Some(3));
        assert!(toml::from_str::<FileConfig>("[walk]\ngraf = \"line:3\"\n").is_err());
    }
}
