//! Fourier blocks of the K_{d,d} walk, the column-reduced glued-trees walks,
//! first-peak extraction, scaling fits and initial-state sweeps.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::coins::{grover, uniform_eigenphase, CoinSpec};
use crate::ctwalk::GluedLineExit;
use crate::error::{Error, Result};
use crate::graphs::{
    build_bipartite, build_glued_trees, build_lattice_with, build_line, GluedTreesSpec, LatticeKind, LatticeShift,
};
use crate::numerics::{ensure_unitary, ComplexMatrix, C64, ONE, ZERO};
use crate::observables::{density_entropy, detect_period, oscillation_amplitude, ObservableSeries, Record};
use crate::walk::{prepare, run, step, CoinField, InitialCoinState, Observer};

/// `U_k = S_k · C_d^{(G)}` on the labels `(−1, +1, −3, +3, …)` of K_{d,d},
/// with `S_k|k,c⟩ = ω^{ck}|k,−c⟩` and `ω = e^{2πi/2d}`. For odd `d` the
/// self-paired label `d` sits last.
pub fn bipartite_fourier_block(d: usize, k: i64) -> Result<ComplexMatrix> {
    if d < 2 {
        return Err(Error::Parameter(format!("K_{{d,d}} needs d ≥ 2, got {d}")));
    }
    let n = 2 * d as i64;
    let labels = fourier_labels(d);
    let omega = |e: i64| C64::from_polar(1.0, 2.0 * PI * e.rem_euclid(n) as f64 / n as f64);
    let mut s = ComplexMatrix::zeros(d, d);
    for (col, &c) in labels.iter().enumerate() {
        let target = (-c).rem_euclid(n);
        let row = labels
            .iter()
            .position(|&l| l.rem_euclid(n) == target)
            .expect("label set closed under negation");
        s[(row, col)] = omega(c * k);
    }
    s.matmul(&grover(d)?)
}

fn fourier_labels(d: usize) -> Vec<i64> {
    let mut labels = Vec::with_capacity(d);
    let mut c = 1;
    while labels.len() + 1 < d || (labels.len() < d && d % 2 == 0) {
        labels.push(-c);
        labels.push(c);
        c += 2;
    }
    if d % 2 == 1 {
        labels.push(d as i64);
    }
    labels
}

/// `cos θ_k` of the non-real eigenvalue pair of `U_k`:
/// `(1/d) Σ_c cos(2πck/N)` over all `d` labels.
pub fn fourier_block_cos_theta(d: usize, k: i64) -> f64 {
    let n = 2.0 * d as f64;
    fourier_labels(d)
        .iter()
        .map(|&c| (2.0 * PI * (c * k) as f64 / n).cos())
        .sum::<f64>()
        / d as f64
}

fn check_branching(b: usize) -> Result<()> {
    if b < 2 {
        return Err(Error::Parameter(format!("branching B={b} must be at least 2")));
    }
    Ok(())
}

/// Column-reduced Grover coin, `(R_I, L_I) → (R_O, L_O)`.
pub fn map_grover_coin(b: usize) -> Result<ComplexMatrix> {
    check_branching(b)?;
    let bf = b as f64;
    let diag = 2.0 * bf.sqrt() / (bf + 1.0);
    let off = (bf - 1.0) / (bf + 1.0);
    ComplexMatrix::from_real_rows(&[&[diag, off], &[-off, diag]])
}

/// Column-reduced DFT coin under root-zero labelling, `(R_I, L_I) → (R_O, L_O)`.
pub fn map_dft_coin(b: usize) -> Result<ComplexMatrix> {
    check_branching(b)?;
    let bf = b as f64;
    let diag = (bf / (bf + 1.0)).sqrt();
    let off = 1.0 / (bf + 1.0).sqrt();
    ComplexMatrix::from_real_rows(&[&[diag, -off], &[off, diag]])
}

/// `map_grover_coin(B)` as `B → ∞`.
pub fn map_grover_limit() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]).expect("2x2")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MappedCoin {
    Grover,
    Dft,
}

impl MappedCoin {
    pub fn matrix(self, b: usize) -> Result<ComplexMatrix> {
        match self {
            MappedCoin::Grover => map_grover_coin(b),
            MappedCoin::Dft => map_dft_coin(b),
        }
    }

    /// Bulk coin on the full graph (vertex degree `B + 1`).
    pub fn full_spec(self, b: usize) -> CoinSpec {
        match self {
            MappedCoin::Grover => CoinSpec::Grover { d: b + 1 },
            MappedCoin::Dft => CoinSpec::Dft { d: b + 1 },
        }
    }
}

/// Symmetric coin at the two roots: `e^{iφ}·inner` on the `B` tree ports.
#[derive(Debug, Clone, PartialEq)]
pub struct EndCoin {
    pub inner: CoinSpec,
    pub phase: f64,
}

impl EndCoin {
    /// Grover coin of dimension `B`, which is σ_x at `B = 2`.
    pub fn grover(b: usize) -> Self {
        Self {
            inner: CoinSpec::Grover { d: b },
            phase: 0.0,
        }
    }

    pub fn padded_spec(&self) -> CoinSpec {
        CoinSpec::PaddedEnd {
            inner: Box::new(self.inner.clone()),
            end_phase: self.phase,
        }
    }

    /// Phase of the reflection `R_O = e^{iφ₁} L_I` this coin induces.
    pub fn reflection_phase(&self) -> Result<f64> {
        Ok(self.phase + uniform_eigenphase(&self.inner.build()?)?)
    }
}

/// 2×2 coin system of the column-reduced glued-trees walk.
#[derive(Debug, Clone)]
pub struct MappedLineSpec {
    pub b: usize,
    pub n: usize,
    /// Acts on `(R_I, L_I) → (R_O, L_O)` in the entrance-side tree.
    pub left: ComplexMatrix,
    /// The left coin with L and R exchanged, for the exit-side tree.
    pub right: ComplexMatrix,
    pub entrance_phase: f64,
    pub exit_phase: f64,
}

impl MappedLineSpec {
    pub fn new(b: usize, n: usize, left: ComplexMatrix, entrance_phase: f64, exit_phase: f64) -> Result<Self> {
        check_branching(b)?;
        if n < 1 {
            return Err(Error::Parameter("depth N must be at least 1".into()));
        }
        if left.rows() != 2 || !left.is_square() {
            return Err(Error::Dimension("mapped coin must be 2x2".into()));
        }
        ensure_unitary(&left)?;
        let swap = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]])?;
        let right = swap.matmul(&left)?.matmul(&swap)?;
        Ok(Self {
            b,
            n,
            left,
            right,
            entrance_phase,
            exit_phase,
        })
    }

    /// Same end coin at entrance and exit.
    pub fn from_coin(b: usize, n: usize, coin: MappedCoin, end: &EndCoin) -> Result<Self> {
        let phase = end.reflection_phase()?;
        Self::new(b, n, coin.matrix(b)?, phase, phase)
    }

    pub fn columns(&self) -> usize {
        2 * self.n + 2
    }
}

/// Stepper for the column-reduced walk. Per column it holds the incoming
/// amplitudes `(R_I, L_I)`; the walk starts with `L_I = 1` at the entrance,
/// which is the uniform superposition over the entrance's tree ports.
#[derive(Debug, Clone)]
pub struct MappedLine<'a> {
    spec: &'a MappedLineSpec,
    r_in: Vec<C64>,
    l_in: Vec<C64>,
    r_out: Vec<C64>,
    l_out: Vec<C64>,
    t: usize,
}

impl<'a> MappedLine<'a> {
    pub fn new(spec: &'a MappedLineSpec) -> Self {
        let cols = spec.columns();
        let mut l_in = vec![ZERO; cols];
        l_in[0] = ONE;
        Self {
            spec,
            r_in: vec![ZERO; cols],
            l_in,
            r_out: vec![ZERO; cols],
            l_out: vec![ZERO; cols],
            t: 0,
        }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn step(&mut self) {
        let s = self.spec;
        let last = s.columns() - 1;
        // columns beyond t are still empty
        let hi = self.t.min(last);
        let entrance = C64::from_polar(1.0, s.entrance_phase);
        let exit = C64::from_polar(1.0, s.exit_phase);
        let (a, b) = (&s.left, &s.right);
        let (la, lb, lc, ld) = (a[(0, 0)], a[(0, 1)], a[(1, 0)], a[(1, 1)]);
        let (ra, rb, rc, rd) = (b[(0, 0)], b[(0, 1)], b[(1, 0)], b[(1, 1)]);
        for j in 0..=hi {
            let (ri, li) = (self.r_in[j], self.l_in[j]);
            let (ro, lo) = if j == 0 {
                (entrance * li, ZERO)
            } else if j == last {
                (ZERO, exit * ri)
            } else if j <= s.n {
                (la * ri + lb * li, lc * ri + ld * li)
            } else {
                (ra * ri + rb * li, rc * ri + rd * li)
            };
            self.r_out[j] = ro;
            self.l_out[j] = lo;
        }
        let top = (hi + 1).min(last);
        self.r_in[0] = ZERO;
        self.r_in[1..=top].copy_from_slice(&self.r_out[..top]);
        self.l_in[..hi].copy_from_slice(&self.l_out[1..=hi]);
        self.l_in[hi] = ZERO;
        self.t += 1;
    }

    pub fn column_probabilities(&self) -> Vec<f64> {
        self.r_in
            .iter()
            .zip(&self.l_in)
            .map(|(r, l)| r.norm_sqr() + l.norm_sqr())
            .collect()
    }

    pub fn exit_probability(&self) -> f64 {
        let last = self.spec.columns() - 1;
        self.r_in[last].norm_sqr() + self.l_in[last].norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.column_probabilities().iter().sum()
    }

    /// Coin entropy in the (towards-root, away-from-root) basis, which
    /// equals the full-graph entropy under root-zero labelling.
    pub fn coin_entropy(&self) -> Result<f64> {
        let mut rho = ComplexMatrix::zeros(2, 2);
        for j in 0..self.spec.columns() {
            let (par, ch) = if j <= self.spec.n {
                (self.r_in[j], self.l_in[j])
            } else {
                (self.l_in[j], self.r_in[j])
            };
            rho[(0, 0)] += par * par.conj();
            rho[(0, 1)] += par * ch.conj();
            rho[(1, 1)] += ch * ch.conj();
        }
        rho[(1, 0)] = rho[(0, 1)].conj();
        density_entropy(&rho)
    }
}

/// Runs the column-reduced walk for `steps` steps, recording exit
/// probability and coin entropy (and column probabilities on request).
pub fn mapped_line_walk(spec: &MappedLineSpec, steps: usize, columns: bool) -> Result<ObservableSeries> {
    let mut walk = MappedLine::new(spec);
    let mut series = ObservableSeries::default();
    for k in 0..=steps {
        if k > 0 {
            walk.step();
        }
        let norm = walk.norm_sqr();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Invariant(format!("norm drifted to {norm} at t={k}")));
        }
        series.push(Record {
            t: k,
            distribution: columns.then(|| walk.column_probabilities()),
            entropy: Some(walk.coin_entropy()?),
            exit: Some(walk.exit_probability()),
            norm,
            ..Record::default()
        });
    }
    Ok(series)
}

/// The coined walk on the full glued-trees graph from the uniform state at
/// the entrance, with `coin` in the bulk and `end` at both roots.
pub fn glued_trees_walk(
    spec: GluedTreesSpec,
    coin: MappedCoin,
    end: &EndCoin,
    steps: usize,
    observers: &[Observer],
) -> Result<ObservableSeries> {
    let g = build_glued_trees(spec)?;
    let field = CoinField::from_spec(&g, &coin.full_spec(spec.branching), Some(&end.padded_spec()))?;
    let entrance = g.entrance().expect("glued trees have an entrance");
    let state = prepare(&g, entrance, &InitialCoinState::UniformOverPorts)?;
    run(state, &field, steps, observers, entrance)
}

/// `|⟨ψ₀|ψ_t⟩|` for `t = 0..=steps` on K_{d,d} started at vertex 0.
pub fn bipartite_fidelity(d: usize, coin: &CoinSpec, init: &InitialCoinState, steps: usize) -> Result<Vec<f64>> {
    let g = build_bipartite(d)?;
    let field = CoinField::from_spec(&g, coin, None)?;
    let state = prepare(&g, 0, init)?;
    Ok(run(state, &field, steps, &[Observer::Fidelity], 0)?.fidelities())
}

/// Smallest `p ≤ max_steps` with `|⟨ψ₀|ψ_p⟩| ≥ 1 − tol` on K_{d,d}, or `None`.
pub fn bipartite_period(
    d: usize,
    coin: &CoinSpec,
    init: &InitialCoinState,
    max_steps: usize,
    tol: f64,
) -> Result<Option<usize>> {
    Ok(detect_period(&bipartite_fidelity(d, coin, init, max_steps)?, tol))
}

/// `|2i√B sin κ / ((B−1) cos κ + (B+1) sin κ)|²`.
pub fn transmission_probability(b: f64, kappa: f64) -> Result<f64> {
    if !(kappa > 0.0 && kappa < PI) {
        return Err(Error::Parameter(format!("momentum {kappa} outside (0, π)")));
    }
    let num = C64::new(0.0, 2.0 * b.sqrt() * kappa.sin());
    let den = C64::new((b - 1.0) * kappa.cos() + (b + 1.0) * kappa.sin(), 0.0);
    Ok((num / den).norm_sqr())
}

/// Index of the first local maximum strictly inside `lo..=hi`; a plateau
/// resolves to its earliest point.
pub fn first_local_max(values: &[f64], lo: usize, hi: usize) -> Option<usize> {
    let hi = hi.min(values.len().saturating_sub(1));
    (lo + 1..hi).find(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WalkKind {
    Continuous,
    GroverDiscrete,
    DftDiscrete,
}

impl FromStr for WalkKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ct" | "continuous" => Ok(WalkKind::Continuous),
            "grover" => Ok(WalkKind::GroverDiscrete),
            "dft" => Ok(WalkKind::DftDiscrete),
            other => Err(Error::parse("coin", format!("unknown walk kind '{other}'"))),
        }
    }
}

impl fmt::Display for WalkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WalkKind::Continuous => "ct",
            WalkKind::GroverDiscrete => "grover",
            WalkKind::DftDiscrete => "dft",
        })
    }
}

/// Time step of the continuous-time peak search grid.
pub const CT_GRID: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub t: f64,
    pub probability: f64,
}

/// First exit peak of the continuous-time column chain on the grid
/// `0.1·k` inside `[N, 4N]`.
pub fn ct_first_peak(b: usize, n: usize) -> Result<Peak> {
    const CHUNK: usize = 128;
    let prop = GluedLineExit::new(b, n)?;
    let (lo, hi) = (10 * n, 40 * n);
    let mut window: Vec<f64> = Vec::new();
    let mut start = lo;
    while start <= hi {
        let count = CHUNK.min(hi + 1 - start);
        window.extend(prop.exit_series(start as f64 * CT_GRID, CT_GRID, count));
        start += count;
        if let Some(i) = first_local_max(&window, 0, window.len() - 1) {
            let k = lo + i;
            return Ok(Peak {
                t: k as f64 * CT_GRID,
                probability: window[i],
            });
        }
    }
    Err(Error::PeakNotFound {
        start: n as f64,
        end: 4.0 * n as f64,
    })
}

/// Search window `[2N, t_end]` for the discrete first peak, where `t_end`
/// is `3N` stretched by the inverse forward amplitude of the mapped coin.
pub fn discrete_window(spec: &MappedLineSpec) -> (usize, usize) {
    let speed = spec.left[(0, 0)].norm().max(1e-3);
    let n = spec.n as f64;
    (2 * spec.n, (3.0 * n / speed).ceil() as usize)
}

/// First exit peak of the discrete column-reduced walk. The exit column
/// has odd index, so only odd steps carry exit probability and the search
/// runs over those.
pub fn discrete_first_peak(spec: &MappedLineSpec) -> Result<Peak> {
    let (lo, hi) = discrete_window(spec);
    let mut walk = MappedLine::new(spec);
    let mut odd: Vec<f64> = Vec::new();
    while walk.t() < hi + 2 {
        walk.step();
        if walk.t() % 2 == 1 {
            odd.push(walk.exit_probability());
            // odd[i] is step 2i + 1
            let m = odd.len();
            if m >= 3 {
                let i = m - 2;
                let t = 2 * i + 1;
                if t > lo && t < hi && odd[i] > odd[i - 1] && odd[i] >= odd[i + 1] {
                    return Ok(Peak {
                        t: t as f64,
                        probability: odd[i],
                    });
                }
            }
        }
    }
    Err(Error::PeakNotFound {
        start: lo as f64,
        end: hi as f64,
    })
}

/// First exit peak for one `(kind, B, N)`.
pub fn first_peak(kind: WalkKind, b: usize, n: usize, end: &EndCoin) -> Result<Peak> {
    match kind {
        WalkKind::Continuous => ct_first_peak(b, n),
        WalkKind::GroverDiscrete => discrete_first_peak(&MappedLineSpec::from_coin(b, n, MappedCoin::Grover, end)?),
        WalkKind::DftDiscrete => discrete_first_peak(&MappedLineSpec::from_coin(b, n, MappedCoin::Dft, end)?),
    }
}

/// Power law `y ≈ prefactor · x^exponent` fitted on log–log axes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub points: Vec<(f64, f64)>,
    /// Points used in the regression after dropping the smallest 20%.
    pub used: usize,
    pub exponent: f64,
    pub prefactor: f64,
    /// Root-mean-square residual in natural-log units.
    pub residual: f64,
}

impl ScalingFit {
    pub fn fit(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 5 {
            return Err(Error::Parameter(format!(
                "scaling fit needs at least 5 points, got {}",
                points.len()
            )));
        }
        if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
            return Err(Error::Parameter("scaling fit needs positive data".into()));
        }
        let mut sorted = points.to_vec();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let drop = sorted.len() / 5;
        let logs: Vec<(f64, f64)> = sorted[drop..].iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
        let m = logs.len() as f64;
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
        let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
        let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx == 0.0 {
            return Err(Error::Parameter("scaling fit needs distinct abscissae".into()));
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let residual = (logs
            .iter()
            .map(|p| (p.1 - intercept - slope * p.0).powi(2))
            .sum::<f64>()
            / m)
            .sqrt();
        Ok(Self {
            points: points.to_vec(),
            used: logs.len(),
            exponent: slope,
            prefactor: intercept.exp(),
            residual,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeakSweep {
    /// `(parameter, peak)` in parameter order.
    pub peaks: Vec<(usize, Peak)>,
    pub fit: ScalingFit,
}

fn sweep(params: &[usize], f: impl Fn(usize) -> Result<Peak> + Sync) -> Result<PeakSweep> {
    let peaks: Vec<(usize, Peak)> = params
        .par_iter()
        .map(|&p| f(p).map(|peak| (p, peak)))
        .collect::<Result<_>>()?;
    let points: Vec<(f64, f64)> = peaks.iter().map(|(p, k)| (*p as f64, k.probability)).collect();
    Ok(PeakSweep {
        fit: ScalingFit::fit(&points)?,
        peaks,
    })
}

/// First-peak exit probability against depth `N` at fixed `B`.
pub fn sweep_depth(kind: WalkKind, b: usize, depths: &[usize], end: &EndCoin) -> Result<PeakSweep> {
    sweep(depths, |n| first_peak(kind, b, n, end))
}

/// First-peak exit probability against branching `B` at fixed `N`; the end
/// coin is rebuilt for each `B` from `end(B)`.
pub fn sweep_branching(
    kind: WalkKind,
    n: usize,
    branchings: &[usize],
    end: impl Fn(usize) -> EndCoin + Sync,
) -> Result<PeakSweep> {
    sweep(branchings, |b| first_peak(kind, b, n, &end(b)))
}

/// Families of initial phase vectors `φ_j = π·k_j/d` with `k_0 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseSet {
    /// `k_j ∈ 0..d` for the `d − 1` free slots: `d^{d−1}` vectors.
    FreeSlots,
    /// `k_j ∈ 0..d` for all `d` slots: `d^d` vectors.
    AllSlots,
    /// `k_j ∈ {0, d−1}` on the free slots, then every ordering of
    /// `1..d` on the free slots: `2^{d−1} + (d−1)!` vectors.
    EndpointsAndPermutations,
}

impl FromStr for PhaseSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "free" => Ok(PhaseSet::FreeSlots),
            "all" => Ok(PhaseSet::AllSlots),
            "subset" => Ok(PhaseSet::EndpointsAndPermutations),
            other => Err(Error::parse("phases", format!("unknown phase set '{other}'"))),
        }
    }
}

impl fmt::Display for PhaseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhaseSet::FreeSlots => "free",
            PhaseSet::AllSlots => "all",
            PhaseSet::EndpointsAndPermutations => "subset",
        })
    }
}

fn next_permutation(v: &mut [u32]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

impl PhaseSet {
    /// Phase multipliers `k_j` in enumeration order.
    pub fn enumerate(self, d: usize) -> Result<Vec<Vec<u32>>> {
        if d < 2 {
            return Err(Error::Dimension(format!("phase set for d={d}")));
        }
        let odometer = |slots: usize, first: usize| -> Vec<Vec<u32>> {
            let total = d.pow(slots as u32);
            (0..total)
                .map(|mut i| {
                    let mut k = vec![0u32; d];
                    for s in (first..d).rev() {
                        k[s] = (i % d) as u32;
                        i /= d;
                    }
                    k
                })
                .collect()
        };
        Ok(match self {
            PhaseSet::FreeSlots => odometer(d - 1, 1),
            PhaseSet::AllSlots => odometer(d, 0),
            PhaseSet::EndpointsAndPermutations => {
                let top = (d - 1) as u32;
                let mut out: Vec<Vec<u32>> = (0..1usize << (d - 1))
                    .map(|bits| {
                        let mut k = vec![0u32; d];
                        for s in 1..d {
                            if bits >> (d - 1 - s) & 1 == 1 {
                                k[s] = top;
                            }
                        }
                        k
                    })
                    .collect();
                let mut perm: Vec<u32> = (1..d as u32).collect();
                loop {
                    let mut k = vec![0u32];
                    k.extend_from_slice(&perm);
                    out.push(k);
                    if !next_permutation(&mut perm) {
                        break;
                    }
                }
                out
            }
        })
    }
}

/// Outcome of a phase sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSweep {
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    /// First phase vector attaining the minimum.
    pub argmin: Vec<u32>,
    /// Spread deviation per phase vector, in enumeration order.
    pub values: Vec<f64>,
}

/// Amplitudes on the reachable set after `steps` steps from each coin basis
/// state at the lattice centre: `basis[r][c][j]`.
struct BasisEvolution {
    d: usize,
    per_site: Vec<Vec<C64>>,
}

impl BasisEvolution {
    fn new(kind: LatticeKind, rule: LatticeShift, coin: &ComplexMatrix, steps: usize) -> Result<Self> {
        let g = build_lattice_with(kind, steps + 1, rule)?;
        let d = g.coin_dim();
        let field = CoinField::uniform(&g, coin)?;
        let origin = g.center().expect("lattice centre");
        let reachable = g.reachable_layers(origin, steps).pop().expect("layer");
        let mut per_site = vec![vec![ZERO; d * d]; reachable.len()];
        for j in 0..d {
            let mut e = vec![ZERO; d];
            e[j] = ONE;
            let mut s = prepare(&g, origin, &InitialCoinState::Vector(e))?;
            for _ in 0..steps {
                step(&mut s, &field)?;
            }
            for b in g.boundary() {
                if (0..d).any(|c| s.amplitude(b, c) != ZERO) {
                    return Err(Error::Invariant("amplitude reached the lattice boundary".into()));
                }
            }
            let mut leaked = 1.0;
            for (r, &v) in reachable.iter().enumerate() {
                for c in 0..d {
                    let a = s.amplitude(v, c);
                    per_site[r][c * d + j] = a;
                    leaked -= a.norm_sqr();
                }
            }
            if leaked.abs() > 1e-9 {
                return Err(Error::Invariant("probability outside the reachable set".into()));
            }
        }
        Ok(Self { d, per_site })
    }

    fn spread(&self, phases: &[f64]) -> f64 {
        let d = self.d;
        let s = 1.0 / (d as f64).sqrt();
        let w: Vec<C64> = phases.iter().map(|&p| C64::from_polar(s, p)).collect();
        let mean = 1.0 / self.per_site.len() as f64;
        self.per_site
            .iter()
            .map(|m| {
                let p: f64 = (0..d)
                    .map(|c| {
                        m[c * d..(c + 1) * d]
                            .iter()
                            .zip(&w)
                            .map(|(a, b)| a * b)
                            .sum::<C64>()
                            .norm_sqr()
                    })
                    .sum();
                (p - mean).powi(2)
            })
            .sum()
    }
}

/// Spread deviation after `steps` steps for every phase vector in `set`,
/// starting at the lattice centre with coin state `Σ e^{iφ_j}|j⟩/√d`.
pub fn initial_state_sweep(
    kind: LatticeKind,
    rule: LatticeShift,
    coin: &CoinSpec,
    set: PhaseSet,
    steps: usize,
) -> Result<PhaseSweep> {
    let d = kind.degree();
    if coin.dim() != d {
        return Err(Error::Dimension(format!(
            "{}-dimensional coin on a degree-{d} lattice",
            coin.dim()
        )));
    }
    let basis = BasisEvolution::new(kind, rule, &coin.build()?, steps)?;
    let vectors = set.enumerate(d)?;
    let scale = PI / d as f64;
    let values: Vec<f64> = vectors
        .par_iter()
        .map(|k| {
            let phases: Vec<f64> = k.iter().map(|&x| x as f64 * scale).collect();
            basis.spread(&phases)
        })
        .collect();
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    Ok(PhaseSweep {
        count: values.len(),
        mean: values.iter().sum::<f64>() / values.len() as f64,
        min: values[best],
        argmin: vectors[best].clone(),
        values,
    })
}

/// Spread deviation after `steps` steps for one coin state at the centre.
pub fn lattice_spread(
    kind: LatticeKind,
    rule: LatticeShift,
    coin: &CoinSpec,
    init: &InitialCoinState,
    steps: usize,
) -> Result<f64> {
    let basis = BasisEvolution::new(kind, rule, &coin.build()?, steps)?;
    let d = kind.degree();
    let v = init.coin_vector(d, &(0..d).collect::<Vec<_>>())?;
    let mean = 1.0 / basis.per_site.len() as f64;
    Ok(basis
        .per_site
        .iter()
        .map(|m| {
            let p: f64 = (0..d)
                .map(|c| {
                    m[c * d..(c + 1) * d]
                        .iter()
                        .zip(&v)
                        .map(|(a, b)| a * b)
                        .sum::<C64>()
                        .norm_sqr()
                })
                .sum();
            (p - mean).powi(2)
        })
        .sum())
}

/// Entanglement series on the line for every `cos α|L⟩ + sin α e^{iβ}|R⟩`,
/// built from the two basis evolutions: `gram[t][(a,b)]` holds
/// `Σ_x ψ_a(x) ψ_b(x)†` for `a, b ∈ {L, R}`.
pub struct LineEntanglement {
    gram: Vec<[[ComplexMatrix; 2]; 2]>,
}

impl LineEntanglement {
    pub fn new(coin: &CoinSpec, steps: usize) -> Result<Self> {
        let g = build_line(steps + 1)?;
        let field = CoinField::uniform(&g, &coin.build()?)?;
        let origin = g.center().expect("line centre");
        let mut states = [0usize, 1].map(|j| {
            let mut e = vec![ZERO; 2];
            e[j] = ONE;
            prepare(&g, origin, &InitialCoinState::Vector(e))
        });
        for s in &states {
            if let Err(e) = s {
                return Err(e.clone());
            }
        }
        let mut gram = Vec::with_capacity(steps + 1);
        for k in 0..=steps {
            if k > 0 {
                for s in states.iter_mut() {
                    step(s.as_mut().expect("prepared"), &field)?;
                }
            }
            let amps = [0, 1].map(|j| states[j].as_ref().expect("prepared").amplitudes());
            let block = |a: usize, b: usize| {
                let mut m = ComplexMatrix::zeros(2, 2);
                for (x, y) in amps[a].chunks_exact(2).zip(amps[b].chunks_exact(2)) {
                    for c in 0..2 {
                        for c2 in 0..2 {
                            m[(c, c2)] += x[c] * y[c2].conj();
                        }
                    }
                }
                m
            };
            gram.push([[block(0, 0), block(0, 1)], [block(1, 0), block(1, 1)]]);
        }
        Ok(Self { gram })
    }

    pub fn steps(&self) -> usize {
        self.gram.len() - 1
    }

    /// `E_c(t)` for `t = 0..=steps`.
    pub fn entropy_series(&self, alpha: f64, beta: f64) -> Result<Vec<f64>> {
        let w = [C64::new(alpha.cos(), 0.0), C64::from_polar(alpha.sin(), beta)];
        self.gram
            .iter()
            .map(|g| {
                let mut rho = ComplexMatrix::zeros(2, 2);
                for a in 0..2 {
                    for b in 0..2 {
                        let f = w[a] * w[b].conj();
                        for c in 0..2 {
                            for c2 in 0..2 {
                                rho[(c, c2)] += f * g[a][b][(c, c2)];
                            }
                        }
                    }
                }
                rho[(1, 0)] = rho[(0, 1)].conj();
                density_entropy(&rho)
            })
            .collect()
    }
}

/// Oscillation amplitude of `E_c` over the trailing `window` steps of a
/// `steps`-step line walk, for each `(α, β)` pair: `grid[i][j]` belongs to
/// `alphas[i]`, `betas[j]`.
pub fn entanglement_landscape(
    coin: &CoinSpec,
    steps: usize,
    window: usize,
    alphas: &[f64],
    betas: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let ent = LineEntanglement::new(coin, steps)?;
    alphas
        .par_iter()
        .map(|&a| {
            betas
                .iter()
                .map(|&b| oscillation_amplitude(&ent.entropy_series(a, b)?, window))
                .collect()
        })
        .collect()
}

/// Least-squares `y ≈ A·f(x)` through the origin; returns `(A, R²)`.
pub fn fit_scaled(xs: &[f64], ys: &[f64], f: impl Fn(f64) -> f64) -> (f64, f64) {
    let fx: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let a = fx.iter().zip(ys).map(|(u, y)| u * y).sum::<f64>() / fx.iter().map(|u| u * u).sum::<f64>();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_res: f64 = fx.iter().zip(ys).map(|(u, y)| (y - a * u).powi(2)).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    (a, 1.0 - ss_res / ss_tot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{is_unitary, unitary_eigenvalues};

    #[test]
    fn fourier_labels_pair_up() {
        assert_eq!(fourier_labels(2), vec![-1, 1]);
        assert_eq!(fourier_labels(3), vec![-1, 1, 3]);
        assert_eq!(fourier_labels(4), vec![-1, 1, -3, 3]);
        assert_eq!(fourier_labels(5), vec![-1, 1, -3, 3, 5]);
    }

    #[test]
    fn fourier_blocks_have_period_four() {
        for d in 2..=8 {
            for k in 1..=2 * d as i64 {
                let u = bipartite_fourier_block(d, k).unwrap();
                let u4 = u.pow(4).unwrap();
                assert!(u4.max_abs_diff(&ComplexMatrix::identity(d)) < 1e-10, "d={d} k={k}");
                for z in unitary_eigenvalues(&u).unwrap() {
                    let near = [ONE, -ONE, C64::new(0.0, 1.0), C64::new(0.0, -1.0)]
                        .iter()
                        .any(|r| (z - r).norm() < 1e-10);
                    assert!(near, "d={d} k={k} eigenvalue {z}");
                }
            }
        }
    }

    #[test]
    fn fourier_block_cos_theta_matches_eigenvalues() {
        for d in 2..=8 {
            for k in 1..=2 * d as i64 {
                let ct = fourier_block_cos_theta(d, k);
                let eig = unitary_eigenvalues(&bipartite_fourier_block(d, k).unwrap()).unwrap();
                assert!(eig.iter().any(|z| (z.re - ct).abs() < 1e-10), "d={d} k={k}");
            }
        }
    }

    #[test]
    fn mapped_coin_examples() {
        let g = map_grover_coin(2).unwrap();
        let s = 2.0 * 2f64.sqrt() / 3.0;
        let want = ComplexMatrix::from_real_rows(&[&[s, 1.0 / 3.0], &[-1.0 / 3.0, s]]).unwrap();
        assert!(g.max_abs_diff(&want) < 1e-15);
        for b in [2, 3, 10, 1000, 1_000_000] {
            assert!(is_unitary(&map_grover_coin(b).unwrap(), 1e-12).unwrap());
            assert!(is_unitary(&map_dft_coin(b).unwrap(), 1e-12).unwrap());
        }
        assert!(matches!(map_grover_coin(1), Err(Error::Parameter(_))));
        assert!(matches!(map_dft_coin(0), Err(Error::Parameter(_))));
    }

    #[test]
    fn right_coin_exchanges_l_and_r() {
        let spec = MappedLineSpec::from_coin(3, 2, MappedCoin::Grover, &EndCoin::grover(3)).unwrap();
        let l = &spec.left;
        let r = &spec.right;
        assert_eq!(r[(0, 0)], l[(1, 1)]);
        assert_eq!(r[(0, 1)], l[(1, 0)]);
        assert_eq!(r[(1, 0)], l[(0, 1)]);
        assert_eq!(r[(1, 1)], l[(0, 0)]);
    }

    #[test]
    fn end_coin_phases() {
        assert!(EndCoin::grover(2).reflection_phase().unwrap().abs() < 1e-15);
        let sym = EndCoin {
            inner: CoinSpec::Symmetric2D,
            phase: 0.0,
        };
        assert!((sym.reflection_phase().unwrap() - PI / 4.0).abs() < 1e-14);
    }

    #[test]
    fn transmission_examples() {
        let p = transmission_probability(2.0, PI / 2.0).unwrap();
        assert!((p - 8.0 / 9.0).abs() < 1e-15);
        assert!((transmission_probability(1.0, PI / 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((transmission_probability(50.0, PI / 2.0).unwrap() - 200.0 / 2601.0).abs() < 1e-15);
        assert!(transmission_probability(2.0, 0.0).is_err());
        assert!(transmission_probability(2.0, PI).is_err());
    }

    #[test]
    fn local_max_rules() {
        let v = [0.0, 1.0, 0.5, 2.0, 0.1];
        assert_eq!(first_local_max(&v, 0, 4), Some(1));
        assert_eq!(first_local_max(&v, 1, 4), Some(3));
        assert_eq!(first_local_max(&[0.0, 1.0, 1.0, 0.0], 0, 3), Some(1));
        assert_eq!(first_local_max(&[0.0, 1.0, 2.0, 3.0], 0, 3), None);
    }

    #[test]
    fn mapped_walk_conserves_norm_and_never_reaches_exit_early() {
        let spec = MappedLineSpec::from_coin(2, 10, MappedCoin::Grover, &EndCoin::grover(2)).unwrap();
        let s = mapped_line_walk(&spec, 60, true).unwrap();
        let exits = s.exits();
        assert!(exits[..21].iter().all(|&p| p == 0.0));
        assert!(exits[21] > 0.0);
        for r in s.records() {
            assert!((r.norm - 1.0).abs() < 1e-12);
            let cols = r.distribution.as_ref().unwrap();
            // column parity follows step parity
            for (j, p) in cols.iter().enumerate() {
                if (j + r.t) % 2 == 1 {
                    assert_eq!(*p, 0.0);
                }
            }
        }
    }

    #[test]
    fn bipartite_periods() {
        let uniform = InitialCoinState::UniformOverPorts;
        for d in 2..=6 {
            let p = bipartite_period(d, &CoinSpec::Grover { d }, &uniform, 20, 1e-10).unwrap();
            assert_eq!(p, Some(4), "d={d}");
        }
        let dft = |d| bipartite_period(d, &CoinSpec::Dft { d }, &uniform, 200, 1e-6).unwrap();
        assert_eq!(dft(3), Some(12));
        assert_eq!(dft(4), None);
    }

    #[test]
    fn scaling_fit_recovers_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0, 160.0]
            .iter()
            .map(|&x: &f64| (x, 3.0 * x.powf(-0.75)))
            .collect();
        let fit = ScalingFit::fit(&pts).unwrap();
        assert!((fit.exponent + 0.75).abs() < 1e-12);
        assert!((fit.prefactor - 3.0).abs() < 1e-12);
        assert_eq!(fit.used, 4);
        assert!(ScalingFit::fit(&pts[..4]).is_err());
    }

    #[test]
    fn phase_set_sizes() {
        assert_eq!(PhaseSet::FreeSlots.enumerate(6).unwrap().len(), 7776);
        assert_eq!(PhaseSet::AllSlots.enumerate(4).unwrap().len(), 256);
        let sub = PhaseSet::EndpointsAndPermutations.enumerate(8).unwrap();
        assert_eq!(sub.len(), 128 + 5040);
        assert!(sub.iter().all(|k| k[0] == 0));
        assert_eq!(sub[127], vec![0, 7, 7, 7, 7, 7, 7, 7]);
        assert_eq!(sub[128], vec![0, 1, 2, 3, 4, 5, 6, 7]);
        assert_eq!(sub.last().unwrap(), &vec![0, 7, 6, 5, 4, 3, 2, 1]);
        let free = PhaseSet::FreeSlots.enumerate(3).unwrap();
        assert_eq!(free[1], vec![0, 0, 1]);
        assert_eq!(free[8], vec![0, 2, 2]);
    }
}
