//! Coin operator families.
//!
//! Basis orderings are fixed per graph family (see [`crate::graphs`]): line
//! coins act on (L, R); Cartesian lattice coins on (−x, +x, −y, +y).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::{ensure_unitary, ComplexMatrix, C64, ONE, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub enum CoinSpec {
    /// Most general 2×2 coin with bias `rho` and phases `theta`, `phi`.
    General { rho: f64, theta: f64, phi: f64 },
    Hadamard,
    /// Real 2×2 coin of bias `rho`; `rho = 0` is σ_x.
    Bias { rho: f64 },
    Grover { d: usize },
    Dft { d: usize },
    /// (1/√2)[[1, i], [i, 1]].
    Symmetric2D,
    /// `inner` times e^{i·end_phase}, padded with a trailing 1.
    PaddedEnd { inner: Box<CoinSpec>, end_phase: f64 },
}

impl CoinSpec {
    pub fn dim(&self) -> usize {
        match self {
            CoinSpec::General { .. }
            | CoinSpec::Hadamard
            | CoinSpec::Bias { .. }
            | CoinSpec::Symmetric2D => 2,
            CoinSpec::Grover { d } | CoinSpec::Dft { d } => *d,
            CoinSpec::PaddedEnd { inner, .. } => inner.dim() + 1,
        }
    }

    pub fn build(&self) -> Result<ComplexMatrix> {
        build_coin(self)
    }

    /// Same family at dimension `d`, for families defined in every dimension.
    pub fn resized(&self, d: usize) -> Option<CoinSpec> {
        match self {
            CoinSpec::Grover { .. } => Some(CoinSpec::Grover { d }),
            CoinSpec::Dft { .. } => Some(CoinSpec::Dft { d }),
            _ => None,
        }
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Parameter(format!("coin bias rho={rho} outside [0, 1]")));
    }
    Ok(())
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::Dimension(format!("coin dimension {d} < 2")));
    }
    Ok(())
}

pub fn build_coin(spec: &CoinSpec) -> Result<ComplexMatrix> {
    let m = match spec {
        CoinSpec::General { rho, theta, phi } => {
            check_rho(*rho)?;
            let a = rho.sqrt();
            let b = (1.0 - rho).sqrt();
            ComplexMatrix::from_rows(vec![
                vec![C64::new(a, 0.0), C64::from_polar(b, *theta)],
                vec![C64::from_polar(b, *phi), -C64::from_polar(a, theta + phi)],
            ])?
        }
        CoinSpec::Hadamard => {
            return build_coin(&CoinSpec::General {
                rho: 0.5,
                theta: 0.0,
                phi: 0.0,
            })
        }
        CoinSpec::Bias { rho } => {
            check_rho(*rho)?;
            let a = rho.sqrt();
            let b = (1.0 - rho).sqrt();
            ComplexMatrix::from_real_rows(&[&[a, b], &[b, -a]])?
        }
        CoinSpec::Grover { d } => grover(*d)?,
        CoinSpec::Dft { d } => dft(*d)?,
        CoinSpec::Symmetric2D => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            ComplexMatrix::from_rows(vec![
                vec![C64::new(h, 0.0), C64::new(0.0, h)],
                vec![C64::new(0.0, h), C64::new(h, 0.0)],
            ])?
        }
        CoinSpec::PaddedEnd { inner, end_phase } => {
            return pad_end_coin(&build_coin(inner)?, *end_phase)
        }
    };
    ensure_unitary(&m)?;
    Ok(m)
}

/// Grover diffusion coin: entries 2/d − δ_ij.
pub fn grover(d: usize) -> Result<ComplexMatrix> {
    check_dim(d)?;
    let mut m = ComplexMatrix::zeros(d, d);
    let off = 2.0 / d as f64;
    for r in 0..d {
        for c in 0..d {
            m[(r, c)] = C64::new(if r == c { off - 1.0 } else { off }, 0.0);
        }
    }
    Ok(m)
}

/// Discrete Fourier transform coin with ω = e^{2πi/d}.
pub fn dft(d: usize) -> Result<ComplexMatrix> {
    check_dim(d)?;
    let mut m = ComplexMatrix::zeros(d, d);
    let norm = 1.0 / (d as f64).sqrt();
    for r in 0..d {
        for c in 0..d {
            // Reduce the exponent mod d so large dimensions keep full accuracy.
            let k = (r * c) % d;
            m[(r, c)] = C64::from_polar(norm, 2.0 * PI * k as f64 / d as f64);
        }
    }
    Ok(m)
}

/// Coin for a root vertex of a glued-trees graph: [[e^{iφ}·inner, 0], [0, 1]].
pub fn pad_end_coin(inner: &ComplexMatrix, end_phase: f64) -> Result<ComplexMatrix> {
    if !inner.is_square() || inner.rows() == 0 {
        return Err(Error::Dimension(format!(
            "end coin needs a square inner block, got {}x{}",
            inner.rows(),
            inner.cols()
        )));
    }
    ensure_unitary(inner)?;
    let b = inner.rows();
    let phase = C64::from_polar(1.0, end_phase);
    let mut m = ComplexMatrix::zeros(b + 1, b + 1);
    for r in 0..b {
        for c in 0..b {
            m[(r, c)] = phase * inner[(r, c)];
        }
    }
    m[(b, b)] = ONE;
    Ok(m)
}

/// Phase picked up by the uniform superposition under `coin`, provided the
/// uniform vector is an eigenvector (as it is for every symmetric end coin).
pub fn uniform_eigenphase(coin: &ComplexMatrix) -> Result<f64> {
    let d = coin.rows();
    let u = vec![C64::new(1.0 / (d as f64).sqrt(), 0.0); d];
    let image = coin.mul_vec(&u)?;
    let overlap: C64 = u.iter().zip(&image).map(|(a, b)| a * b).sum();
    let residual: f64 = image
        .iter()
        .zip(&u)
        .map(|(x, y)| (x - overlap * y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > 1e-10 || (overlap.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::Parameter(
            "uniform coin state is not an eigenvector of the end coin".into(),
        ));
    }
    Ok(overlap.arg())
}

impl fmt::Display for CoinSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoinSpec::General { rho, theta, phi } => write!(f, "general:{rho},{theta},{phi}"),
            CoinSpec::Hadamard => write!(f, "hadamard"),
            CoinSpec::Bias { rho } => write!(f, "bias:{rho}"),
            CoinSpec::Grover { d } => write!(f, "grover:{d}"),
            CoinSpec::Dft { d } => write!(f, "dft:{d}"),
            CoinSpec::Symmetric2D => write!(f, "sym2d"),
            CoinSpec::PaddedEnd { inner, end_phase } => write!(f, "padded:{end_phase}:{inner}"),
        }
    }
}

fn parse_f64(field: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::parse(field, format!("'{s}' is not a number")))
}

impl FromStr for CoinSpec {
    type Err = Error;

    /// Accepts `hadamard`, `bias:0.2`, `general:0.5,0,0`, `grover:6`, `dft:8`,
    /// `sym2d` and `padded:<phase>:<inner>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let spec = match name.to_ascii_lowercase().as_str() {
            "hadamard" | "had" => CoinSpec::Hadamard,
            "sym2d" => CoinSpec::Symmetric2D,
            "bias" => CoinSpec::Bias {
                rho: parse_f64("coin", args)?,
            },
            "general" => {
                let parts: Vec<&str> = args.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::parse("coin", "general needs rho,theta,phi"));
                }
                CoinSpec::General {
                    rho: parse_f64("coin", parts[0])?,
                    theta: parse_f64("coin", parts[1])?,
                    phi: parse_f64("coin", parts[2])?,
                }
            }
            "grover" | "dft" => {
                let d: usize = args
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse("coin", format!("'{args}' is not a dimension")))?;
                if name.eq_ignore_ascii_case("grover") {
                    CoinSpec::Grover { d }
                } else {
                    CoinSpec::Dft { d }
                }
            }
            "padded" => {
                let (phase, inner) = args
                    .split_once(':')
                    .ok_or_else(|| Error::parse("coin", "padded needs <phase>:<inner>"))?;
                CoinSpec::PaddedEnd {
                    inner: Box::new(inner.parse()?),
                    end_phase: parse_f64("coin", phase)?,
                }
            }
            other => return Err(Error::parse("coin", format!("unknown coin family '{other}'"))),
        };
        Ok(spec)
    }
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_rows(vec![vec![ZERO, ONE], vec![ONE, ZERO]]).expect("2x2")
}
