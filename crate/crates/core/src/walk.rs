//! Discrete-time coined walk: state preparation, the coin-then-shift step
//! and multi-step runs.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::coins::CoinSpec;
use crate::error::{Error, Result};
use crate::graphs::PortGraph;
use crate::numerics::{norm_sqr, ComplexMatrix, C64, ONE, ZERO};
use crate::observables::{coin_entropy, spread_deviation, ObservableSeries, Record};

/// Coin part of a localized initial state.
///
/// Two-dimensional forms use the line ordering (L, R).
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCoinState {
    /// `√η|L⟩ + √(1−η)e^{iβ}|R⟩`
    Bias { eta: f64, beta: f64 },
    /// `cos α|L⟩ + sin α e^{iβ}|R⟩`, so that `η = cos²α`
    Angles { alpha: f64, beta: f64 },
    /// `Σ_j e^{iφ_j}|j⟩ / √d`
    Phases(Vec<f64>),
    /// Explicit unit vector.
    Vector(Vec<C64>),
    /// Equal weight on the occupied ports of the start vertex.
    UniformOverPorts,
    /// `+1/√d` on the first half of the ports, `−1/√d` on the rest.
    HalfSplit,
}

impl InitialCoinState {
    /// The symmetric line state `(|L⟩ + i|R⟩)/√2`.
    pub fn symmetric() -> Self {
        InitialCoinState::Angles {
            alpha: std::f64::consts::FRAC_PI_4,
            beta: std::f64::consts::FRAC_PI_2,
        }
    }

    /// Phases `π·k_j/d` from integer multipliers.
    pub fn phase_indices(indices: &[u32]) -> Self {
        let d = indices.len() as f64;
        InitialCoinState::Phases(
            indices
                .iter()
                .map(|&k| std::f64::consts::PI * k as f64 / d)
                .collect(),
        )
    }

    /// Coin vector on `ports` inside a `coin_dim` register.
    pub fn coin_vector(&self, coin_dim: usize, ports: &[usize]) -> Result<Vec<C64>> {
        let two_dim = || -> Result<()> {
            if coin_dim != 2 {
                return Err(Error::Dimension(format!(
                    "two-component coin state on a {coin_dim}-dimensional coin"
                )));
            }
            Ok(())
        };
        let v = match self {
            InitialCoinState::Bias { eta, beta } => {
                two_dim()?;
                if !(0.0..=1.0).contains(eta) {
                    return Err(Error::Parameter(format!("eta={eta} outside [0,1]")));
                }
                vec![
                    C64::new(eta.sqrt(), 0.0),
                    C64::from_polar((1.0 - eta).sqrt(), *beta),
                ]
            }
            InitialCoinState::Angles { alpha, beta } => {
                two_dim()?;
                vec![
                    C64::new(alpha.cos(), 0.0),
                    C64::from_polar(alpha.sin(), *beta),
                ]
            }
            InitialCoinState::Phases(phases) => {
                if phases.len() != coin_dim {
                    return Err(Error::Dimension(format!(
                        "{} phases for a {coin_dim}-dimensional coin",
                        phases.len()
                    )));
                }
                let s = 1.0 / (coin_dim as f64).sqrt();
                phases.iter().map(|&p| C64::from_polar(s, p)).collect()
            }
            InitialCoinState::Vector(v) => {
                if v.len() != coin_dim {
                    return Err(Error::Dimension(format!(
                        "coin vector of length {} for a {coin_dim}-dimensional coin",
                        v.len()
                    )));
                }
                v.clone()
            }
            InitialCoinState::UniformOverPorts | InitialCoinState::HalfSplit => {
                let k = ports.len();
                if k == 0 {
                    return Err(Error::Empty("start vertex has no ports".into()));
                }
                let s = 1.0 / (k as f64).sqrt();
                let split = matches!(self, InitialCoinState::HalfSplit);
                let mut v = vec![ZERO; coin_dim];
                for (i, &c) in ports.iter().enumerate() {
                    let sign = if split && i >= k / 2 { -1.0 } else { 1.0 };
                    v[c] = C64::new(sign * s, 0.0);
                }
                v
            }
        };
        let n = norm_sqr(&v);
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("coin state has squared norm {n}")));
        }
        Ok(v)
    }
}

impl fmt::Display for InitialCoinState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |xs: &[f64]| xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        match self {
            InitialCoinState::Bias { eta, beta } => write!(f, "eta:{eta},{beta}"),
            InitialCoinState::Angles { alpha, beta } => write!(f, "alpha:{alpha},{beta}"),
            InitialCoinState::Phases(p) => write!(f, "phases:{}", list(p)),
            InitialCoinState::Vector(v) => {
                let parts: Vec<String> = v.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect();
                write!(f, "vec:{}", parts.join(","))
            }
            InitialCoinState::UniformOverPorts => f.write_str("uniform"),
            InitialCoinState::HalfSplit => f.write_str("split"),
        }
    }
}

fn parse_floats(field: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(field, format!("'{x}' is not a number")))
        })
        .collect()
}

fn parse_complex(s: &str) -> Result<C64> {
    let t = s.trim();
    let bad = || Error::parse("init", format!("'{t}' is not a complex number"));
    if let Some(body) = t.strip_suffix('i') {
        let cut = body
            .char_indices()
            .skip(1)
            .filter(|&(i, ch)| (ch == '+' || ch == '-') && !body[..i].ends_with(['e', 'E']))
            .map(|(i, _)| i)
            .last();
        return match cut {
            Some(i) => Ok(C64::new(
                body[..i].parse().map_err(|_| bad())?,
                body[i..].parse().map_err(|_| bad())?,
            )),
            None => {
                let im = match body {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    b => b.parse().map_err(|_| bad())?,
                };
                Ok(C64::new(0.0, im))
            }
        };
    }
    Ok(C64::new(t.parse().map_err(|_| bad())?, 0.0))
}

impl FromStr for InitialCoinState {
    type Err = Error;

    /// `sym`, `L`, `R`, `uniform`, `split`, `eta:<η>,<β>`, `alpha:<α>,<β>`,
    /// `phases:<φ…>` (radians), `phaseidx:<k…>` (φ = πk/d), `vec:<z…>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        let pair = |field: &str| -> Result<(f64, f64)> {
            match parse_floats(field, rest)?.as_slice() {
                [a, b] => Ok((*a, *b)),
                _ => Err(Error::parse("init", format!("{field} takes two numbers"))),
            }
        };
        match head.to_ascii_lowercase().as_str() {
            "sym" | "symmetric" => Ok(Self::symmetric()),
            "l" => Ok(InitialCoinState::Bias { eta: 1.0, beta: 0.0 }),
            "r" => Ok(InitialCoinState::Bias { eta: 0.0, beta: 0.0 }),
            "uniform" => Ok(InitialCoinState::UniformOverPorts),
            "split" | "ring" => Ok(InitialCoinState::HalfSplit),
            "eta" => pair("eta").map(|(eta, beta)| InitialCoinState::Bias { eta, beta }),
            "alpha" => pair("alpha").map(|(alpha, beta)| InitialCoinState::Angles { alpha, beta }),
            "phases" => parse_floats("init", rest).map(InitialCoinState::Phases),
            "phaseidx" => {
                let idx = rest
                    .split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<u32>()
                            .map_err(|_| Error::parse("init", format!("'{x}' is not an index")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(InitialCoinState::phase_indices(&idx))
            }
            "vec" => rest
                .split(',')
                .map(parse_complex)
                .collect::<Result<Vec<_>>>()
                .map(InitialCoinState::Vector),
            other => Err(Error::parse("init", format!("unknown initial state '{other}'"))),
        }
    }
}

/// Per-vertex coin operators, each embedded in the full coin register with
/// identity on unused slots.
#[derive(Debug, Clone)]
pub struct CoinField {
    coin_dim: usize,
    ops: Vec<ComplexMatrix>,
    which: Vec<u32>,
}

impl CoinField {
    /// `local(deg)` supplies the coin for vertices of degree `deg`, either
    /// `deg × deg` or a `(deg+1)`-dimensional padded block whose last slot is
    /// the identity.
    pub fn from_fn(
        graph: &PortGraph,
        mut local: impl FnMut(usize) -> Result<ComplexMatrix>,
    ) -> Result<Self> {
        let d = graph.coin_dim();
        let mut by_degree: HashMap<usize, ComplexMatrix> = HashMap::new();
        let mut by_pattern: HashMap<Vec<usize>, u32> = HashMap::new();
        let mut ops = Vec::new();
        let mut which = Vec::with_capacity(graph.vertex_count());
        for v in 0..graph.vertex_count() {
            let ports = graph.ports(v);
            if let Some(&k) = by_pattern.get(ports) {
                which.push(k);
                continue;
            }
            let deg = ports.len();
            if !by_degree.contains_key(&deg) {
                by_degree.insert(deg, leading_block(local(deg)?, deg)?);
            }
            let block = &by_degree[&deg];
            let mut op = ComplexMatrix::identity(d);
            for (i, &ci) in ports.iter().enumerate() {
                for (j, &cj) in ports.iter().enumerate() {
                    op[(ci, cj)] = block[(i, j)];
                }
            }
            let k = ops.len() as u32;
            ops.push(op);
            by_pattern.insert(ports.to_vec(), k);
            which.push(k);
        }
        Ok(Self {
            coin_dim: d,
            ops,
            which,
        })
    }

    /// The same coin everywhere; the graph must be regular with degree equal
    /// to the coin dimension.
    pub fn uniform(graph: &PortGraph, coin: &ComplexMatrix) -> Result<Self> {
        Self::from_fn(graph, |deg| {
            if deg != coin.rows() {
                return Err(Error::Dimension(format!(
                    "{}-dimensional coin at a vertex of degree {deg}",
                    coin.rows()
                )));
            }
            Ok(coin.clone())
        })
    }

    /// Bulk coin from `spec`; vertices of other degree use `end` if given,
    /// otherwise the same family resized (Grover, DFT).
    pub fn from_spec(graph: &PortGraph, spec: &CoinSpec, end: Option<&CoinSpec>) -> Result<Self> {
        Self::from_fn(graph, |deg| {
            if deg == spec.dim() {
                return spec.build();
            }
            if let Some(e) = end {
                if e.dim() == deg || e.dim() == deg + 1 {
                    return e.build();
                }
                return Err(Error::Dimension(format!(
                    "end coin of dimension {} at a vertex of degree {deg}",
                    e.dim()
                )));
            }
            match spec.resized(deg) {
                Some(s) => s.build(),
                None => Err(Error::Dimension(format!(
                    "coin '{spec}' has dimension {} but a vertex has degree {deg}",
                    spec.dim()
                ))),
            }
        })
    }

    pub fn coin_dim(&self) -> usize {
        self.coin_dim
    }

    /// Embedded operator at `v`.
    pub fn at(&self, v: usize) -> &ComplexMatrix {
        &self.ops[self.which[v] as usize]
    }
}

fn leading_block(m: ComplexMatrix, deg: usize) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::Dimension("coin must be square".into()));
    }
    if m.rows() == deg {
        return Ok(m);
    }
    if m.rows() == deg + 1 {
        let last = deg;
        let padded = (0..deg).all(|i| m[(i, last)] == ZERO && m[(last, i)] == ZERO)
            && (m[(last, last)] - ONE).norm() < 1e-12;
        if padded {
            let mut b = ComplexMatrix::zeros(deg, deg);
            for i in 0..deg {
                for j in 0..deg {
                    b[(i, j)] = m[(i, j)];
                }
            }
            return Ok(b);
        }
    }
    Err(Error::Dimension(format!(
        "{}-dimensional coin does not fit a vertex of degree {deg}",
        m.rows()
    )))
}

/// Amplitudes over `vertex * coin_dim + slot` and the step counter.
#[derive(Debug, Clone)]
pub struct WalkState<'g> {
    graph: &'g PortGraph,
    amps: Vec<C64>,
    scratch: Vec<C64>,
    t: usize,
}

impl<'g> WalkState<'g> {
    pub fn from_amplitudes(graph: &'g PortGraph, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != graph.state_dim() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for a state space of {}",
                amps.len(),
                graph.state_dim()
            )));
        }
        Ok(Self {
            graph,
            scratch: vec![ZERO; amps.len()],
            amps,
            t: 0,
        })
    }

    pub fn graph(&self) -> &'g PortGraph {
        self.graph
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, v: usize, c: usize) -> C64 {
        self.amps[v * self.graph.coin_dim() + c]
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn vertex_probabilities(&self) -> Vec<f64> {
        self.amps
            .chunks_exact(self.graph.coin_dim())
            .map(norm_sqr)
            .collect()
    }

    /// `|⟨other|self⟩|`
    pub fn overlap(&self, other: &[C64]) -> f64 {
        self.amps
            .iter()
            .zip(other)
            .map(|(a, b)| b.conj() * a)
            .sum::<C64>()
            .norm()
    }
}

/// Product state with all amplitude on `vertex`.
pub fn prepare<'g>(
    graph: &'g PortGraph,
    vertex: usize,
    coin: &InitialCoinState,
) -> Result<WalkState<'g>> {
    if vertex >= graph.vertex_count() {
        return Err(Error::Parameter(format!(
            "start vertex {vertex} outside 0..{}",
            graph.vertex_count()
        )));
    }
    let d = graph.coin_dim();
    let c = coin.coin_vector(d, graph.ports(vertex))?;
    let mut amps = vec![ZERO; graph.state_dim()];
    amps[vertex * d..(vertex + 1) * d].copy_from_slice(&c);
    WalkState::from_amplitudes(graph, amps)
}

/// One step `S·(C ⊗ 𝟙)`.
pub fn step(state: &mut WalkState<'_>, coins: &CoinField) -> Result<()> {
    let d = state.graph.coin_dim();
    if coins.coin_dim() != d || coins.which.len() != state.graph.vertex_count() {
        return Err(Error::Dimension(format!(
            "coin field of dimension {} for a graph with coin dimension {d}",
            coins.coin_dim()
        )));
    }
    let shift = state.graph.shift_permutation();
    let (amps, out) = (&state.amps, &mut state.scratch);
    for (v, block) in amps.chunks_exact(d).enumerate() {
        let op = coins.at(v);
        for c in 0..d {
            let row = op.row(c);
            let mut acc = ZERO;
            for (m, a) in row.iter().zip(block) {
                acc += m * a;
            }
            out[shift[v * d + c]] = acc;
        }
    }
    std::mem::swap(&mut state.amps, &mut state.scratch);
    state.t += 1;
    Ok(())
}

/// Per-step measurements recorded by [`run`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observer {
    Distribution,
    Entropy,
    /// Spread deviation over sites reachable from the start vertex.
    Spread,
    /// Probability at the graph's exit vertex.
    Exit,
    /// `|⟨ψ(0)|ψ(t)⟩|`
    Fidelity,
}

impl FromStr for Observer {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dist" | "distribution" => Ok(Observer::Distribution),
            "entropy" => Ok(Observer::Entropy),
            "spread" => Ok(Observer::Spread),
            "exit" => Ok(Observer::Exit),
            "fidelity" => Ok(Observer::Fidelity),
            other => Err(Error::parse("obs", format!("unknown observable '{other}'"))),
        }
    }
}

impl fmt::Display for Observer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Observer::Distribution => "dist",
            Observer::Entropy => "entropy",
            Observer::Spread => "spread",
            Observer::Exit => "exit",
            Observer::Fidelity => "fidelity",
        })
    }
}

/// Runs `steps` steps from `state`, recording at t = 0 and after each step.
///
/// Fails with an invariant error if the norm drifts beyond 1e−9.
pub fn run(
    mut state: WalkState<'_>,
    coins: &CoinField,
    steps: usize,
    observers: &[Observer],
    start: usize,
) -> Result<ObservableSeries> {
    let graph = state.graph;
    let wants = |o: Observer| observers.contains(&o);
    let layers = wants(Observer::Spread).then(|| graph.reachable_layers(start, state.t + steps));
    let exit = if wants(Observer::Exit) {
        Some(graph.exit().ok_or_else(|| {
            Error::Parameter("exit probability needs a graph with an exit vertex".into())
        })?)
    } else {
        None
    };
    let initial = state.amps.clone();
    let d = graph.coin_dim();

    let mut series = ObservableSeries::default();
    for k in 0..=steps {
        if k > 0 {
            step(&mut state, coins)?;
        }
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Invariant(format!(
                "norm drifted to {norm} at t={}",
                state.t
            )));
        }
        let need_probs = wants(Observer::Distribution) || layers.is_some();
        let probs = need_probs.then(|| state.vertex_probabilities());
        let spread = match &layers {
            Some(l) => Some(spread_deviation(probs.as_ref().expect("probs"), &l[state.t])?),
            None => None,
        };
        series.push(Record {
            t: state.t,
            distribution: if wants(Observer::Distribution) { probs } else { None },
            entropy: if wants(Observer::Entropy) {
                Some(coin_entropy(&state.amps, d)?)
            } else {
                None
            },
            spread,
            exit: exit.map(|x| norm_sqr(&state.amps[x * d..(x + 1) * d])),
            fidelity: wants(Observer::Fidelity).then(|| state.overlap(&initial)),
            norm,
        });
    }
    Ok(series)
}

/// Global-phase-insensitive closeness test `|⟨a|b⟩| ≥ 1 − tol`.
pub fn same_state(a: &[C64], b: &[C64], tol: f64) -> bool {
    let ov: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    ov.norm() >= 1.0 - tol
}
