//! Measurements on walk states and on recorded series.

use crate::error::{Error, Result};
use crate::numerics::{hermitian_eigenvalues, ComplexMatrix, C64, ZERO};

/// Eigenvalues in `[−CLAMP, 0)` are round-off and count as zero.
const CLAMP: f64 = 1e-12;

/// One time step of a recorded run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record {
    pub t: usize,
    pub distribution: Option<Vec<f64>>,
    pub entropy: Option<f64>,
    pub spread: Option<f64>,
    pub exit: Option<f64>,
    pub fidelity: Option<f64>,
    pub norm: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservableSeries {
    records: Vec<Record>,
}

impl ObservableSeries {
    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn entropies(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.entropy).collect()
    }

    pub fn spreads(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.spread).collect()
    }

    pub fn exits(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.exit).collect()
    }

    pub fn fidelities(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.fidelity).collect()
    }

    pub fn distributions(&self) -> Vec<&[f64]> {
        self.records
            .iter()
            .filter_map(|r| r.distribution.as_deref())
            .collect()
    }
}

/// Reduced coin density matrix `ρ[c, c′] = Σ_v ψ(v,c) ψ*(v,c′)`.
pub fn coin_density(amps: &[C64], coin_dim: usize) -> ComplexMatrix {
    let mut rho = ComplexMatrix::zeros(coin_dim, coin_dim);
    for block in amps.chunks_exact(coin_dim) {
        if block.iter().all(|z| *z == ZERO) {
            continue;
        }
        for c in 0..coin_dim {
            for c2 in c..coin_dim {
                rho[(c, c2)] += block[c] * block[c2].conj();
            }
        }
    }
    for c in 0..coin_dim {
        rho[(c, c)] = C64::new(rho[(c, c)].re, 0.0);
        for c2 in c + 1..coin_dim {
            rho[(c2, c)] = rho[(c, c2)].conj();
        }
    }
    rho
}

/// Base-2 von Neumann entropy of a density matrix.
pub fn density_entropy(rho: &ComplexMatrix) -> Result<f64> {
    let eig = hermitian_eigenvalues(rho)?;
    let mut s = 0.0;
    for &l in &eig {
        if l < -CLAMP {
            return Err(Error::Invariant(format!(
                "density matrix eigenvalue {l} below zero"
            )));
        }
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Coin–position entanglement `E_c` in bits for a pure joint state laid out
/// as `vertex * coin_dim + slot`.
pub fn coin_entropy(amps: &[C64], coin_dim: usize) -> Result<f64> {
    if coin_dim == 0 || amps.len() % coin_dim != 0 {
        return Err(Error::Dimension(format!(
            "{} amplitudes do not split into coin blocks of {coin_dim}",
            amps.len()
        )));
    }
    density_entropy(&coin_density(amps, coin_dim))
}

/// `Σ_{r ∈ reachable} (P(r) − 1/N)²` with `N = |reachable|`.
pub fn spread_deviation(probs: &[f64], reachable: &[usize]) -> Result<f64> {
    if reachable.is_empty() {
        return Err(Error::Empty("reachable set".into()));
    }
    let mean = 1.0 / reachable.len() as f64;
    Ok(reachable.iter().map(|&r| (probs[r] - mean).powi(2)).sum())
}

fn check_window(len: usize, t: usize) -> Result<()> {
    if t == 0 {
        return Err(Error::Parameter("averaging window of length 0".into()));
    }
    if len < t {
        return Err(Error::Parameter(format!(
            "series of length {len} shorter than window {t}"
        )));
    }
    Ok(())
}

/// `(1/T) Σ_{t<T} P_t`.
pub fn time_avg_distribution(series: &[&[f64]], t: usize) -> Result<Vec<f64>> {
    check_window(series.len(), t)?;
    let n = series[0].len();
    let mut avg = vec![0.0; n];
    for p in &series[..t] {
        if p.len() != n {
            return Err(Error::Dimension("distributions of unequal length".into()));
        }
        for (a, x) in avg.iter_mut().zip(p.iter()) {
            *a += x;
        }
    }
    avg.iter_mut().for_each(|a| *a /= t as f64);
    Ok(avg)
}

/// `(1/T) Σ_{t<T} E_t`.
pub fn time_avg_entropy(series: &[f64], t: usize) -> Result<f64> {
    check_window(series.len(), t)?;
    Ok(series[..t].iter().sum::<f64>() / t as f64)
}

/// `½ Σ |P − Q|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Dimension(format!(
            "distributions of length {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// `max − min` over the last `window` entries.
pub fn oscillation_amplitude(series: &[f64], window: usize) -> Result<f64> {
    check_window(series.len(), window)?;
    let tail = &series[series.len() - window..];
    let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}

/// Smallest `p > 0` with `fidelity[p] ≥ 1 − tol`, where `fidelity[t]` is
/// `|⟨ψ(0)|ψ(t)⟩|`.
pub fn detect_period(fidelity: &[f64], tol: f64) -> Option<usize> {
    (1..fidelity.len()).find(|&p| fidelity[p] >= 1.0 - tol)
}
