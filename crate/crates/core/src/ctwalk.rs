//! Continuous-time walks `e^{−iHt}` on adjacency Hamiltonians and on the
//! column-reduced glued-trees chain.

use crate::error::{Error, Result};
use crate::graphs::PortGraph;
use crate::numerics::{norm_sqr, Propagator, RealMatrix, TridiagonalEigen, C64, NORM_TOL, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub enum CtSource {
    Adjacency,
    /// Column chain of a glued-trees graph with branching `b` and depth `n`.
    GluedLine { b: usize, n: usize },
}

#[derive(Debug, Clone)]
pub struct CtSpec {
    pub h: RealMatrix,
    pub gamma: f64,
    pub source: CtSource,
}

impl CtSpec {
    pub fn dim(&self) -> usize {
        self.h.dim()
    }
}

/// `H = γA`.
pub fn adjacency_hamiltonian(graph: &PortGraph, gamma: f64) -> CtSpec {
    let mut h = RealMatrix::zeros(graph.vertex_count());
    for (u, w) in graph.edges() {
        h[(u, w)] = gamma;
        h[(w, u)] = gamma;
    }
    CtSpec {
        h,
        gamma,
        source: CtSource::Adjacency,
    }
}

/// Off-diagonal couplings of the column chain with `γ = B^{−1/2}`: 1 within
/// each tree and `√B` across the glue.
pub fn glued_line_couplings(b: usize, n: usize) -> Result<Vec<f64>> {
    if b < 2 {
        return Err(Error::Parameter(format!("branching B={b} must be at least 2")));
    }
    if n < 1 {
        return Err(Error::Parameter("depth N must be at least 1".into()));
    }
    let mut off = vec![1.0; 2 * n + 1];
    off[n] = (b as f64).sqrt();
    Ok(off)
}

/// Tridiagonal `(2N+2)`-dimensional Hamiltonian of the column chain.
pub fn glued_line_hamiltonian(b: usize, n: usize) -> Result<CtSpec> {
    let off = glued_line_couplings(b, n)?;
    Ok(CtSpec {
        h: RealMatrix::tridiagonal(&vec![0.0; 2 * n + 2], &off)?,
        gamma: 1.0 / (b as f64).sqrt(),
        source: CtSource::GluedLine { b, n },
    })
}

/// `|⟨exit| e^{−iHt} |entrance⟩|²` at each time, with a norm check on the
/// full evolved state.
pub fn ct_exit_series(spec: &CtSpec, entrance: usize, exit: usize, times: &[f64]) -> Result<Vec<f64>> {
    let n = spec.dim();
    if entrance >= n || exit >= n {
        return Err(Error::Parameter(format!(
            "entrance {entrance} / exit {exit} outside 0..{n}"
        )));
    }
    let prop = Propagator::new(&spec.h)?;
    let mut psi0 = vec![ZERO; n];
    psi0[entrance] = C64::new(1.0, 0.0);
    let coeffs = prop.decompose(&psi0)?;
    times
        .iter()
        .map(|&t| {
            let psi = prop.evolve_decomposed(&coeffs, t);
            let norm = norm_sqr(&psi);
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::Invariant(format!("norm {norm} at t={t}")));
            }
            Ok(psi[exit].norm_sqr())
        })
        .collect()
}

/// Entrance-to-exit propagation on the column chain, tracking only the two
/// end rows of the eigenvector matrix.
#[derive(Debug, Clone)]
pub struct GluedLineExit {
    eig: TridiagonalEigen,
    exit: usize,
}

impl GluedLineExit {
    pub fn new(b: usize, n: usize) -> Result<Self> {
        let off = glued_line_couplings(b, n)?;
        let exit = 2 * n + 1;
        Ok(Self {
            eig: TridiagonalEigen::new(&vec![0.0; exit + 1], &off, &[0, exit])?,
            exit,
        })
    }

    /// Exit probabilities at `t0 + k·dt` for `k < count`.
    pub fn exit_series(&self, t0: f64, dt: f64, count: usize) -> Vec<f64> {
        self.eig
            .transition_series(0, self.exit, t0, dt, count)
            .expect("tracked rows")
            .iter()
            .map(|z| z.norm_sqr())
            .collect()
    }

    pub fn exit_probability(&self, t: f64) -> f64 {
        self.eig
            .transition_amplitude(0, self.exit, t)
            .expect("tracked rows")
            .norm_sqr()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_cycle, build_glued_trees, GluedTreesSpec, Labeling};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn adjacency_examples() {
        let tri = adjacency_hamiltonian(&build_cycle(3).unwrap(), 1.0);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(tri.h[(i, j)], if i == j { 0.0 } else { 1.0 });
            }
        }
        // six vertices: entrance, two left leaves, two right leaves, exit
        let g = build_glued_trees(GluedTreesSpec::new(2, 1, 3, Labeling::RandomConsistent)).unwrap();
        let h = adjacency_hamiltonian(&g, 0.5);
        let mut want = RealMatrix::zeros(6);
        for (u, w) in [(0, 1), (0, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 5), (4, 5)] {
            want[(u, w)] = 0.5;
            want[(w, u)] = 0.5;
        }
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(h.h[(i, j)], want[(i, j)]);
            }
        }
    }

    #[test]
    fn line_hamiltonian_examples() {
        let s = glued_line_hamiltonian(2, 2).unwrap();
        let (_, off) = s.h.as_tridiagonal().unwrap();
        assert_eq!(off, vec![1.0, 1.0, 2f64.sqrt(), 1.0, 1.0]);
        let s = glued_line_hamiltonian(4, 3).unwrap();
        assert_eq!(s.h[(3, 4)], 2.0);
        assert_eq!(s.dim(), 8);
        assert!(matches!(glued_line_hamiltonian(1, 3), Err(Error::Parameter(_))));
    }

    #[test]
    fn exit_series_examples() {
        let spec = CtSpec {
            h: RealMatrix::tridiagonal(&[0.0, 0.0], &[1.0]).unwrap(),
            gamma: 1.0,
            source: CtSource::Adjacency,
        };
        let p = ct_exit_series(&spec, 0, 1, &[0.0, FRAC_PI_2]).unwrap();
        assert_eq!(p[0], 0.0);
        assert!((p[1] - 1.0).abs() < 1e-14);
        assert!(ct_exit_series(&spec, 0, 2, &[0.0]).is_err());
    }

    #[test]
    fn tracked_rows_match_full_propagation() {
        let spec = glued_line_hamiltonian(3, 6).unwrap();
        let times: Vec<f64> = (0..40).map(|k| 0.37 * k as f64).collect();
        let full = ct_exit_series(&spec, 0, 13, &times).unwrap();
        let fast = GluedLineExit::new(3, 6).unwrap();
        for (t, p) in times.iter().zip(&full) {
            assert!((fast.exit_probability(*t) - p).abs() < 1e-12);
        }
        for (a, b) in fast.exit_series(0.0, 0.37, 40).iter().zip(&full) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn time_reversal_symmetry() {
        let spec = glued_line_hamiltonian(2, 5).unwrap();
        let times: Vec<f64> = (0..30).map(|k| 0.5 * k as f64).collect();
        let fwd = ct_exit_series(&spec, 0, 11, &times).unwrap();
        let back = ct_exit_series(&spec, 11, 0, &times).unwrap();
        for (a, b) in fwd.iter().zip(&back) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
