//! Dense complex linear algebra sized for coin operators and small Hamiltonians.
//!
//! Everything here is row-major `Vec` storage with no external BLAS. The
//! Hermitian eigensolver is cyclic Jacobi; symmetric tridiagonal matrices
//! (the column-reduced glued-trees Hamiltonians) go through implicit QL,
//! optionally tracking only a few rows of the eigenvector matrix so that
//! a single transition amplitude costs O(n²) instead of O(n³).

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Unitarity tolerance applied to every constructed coin and shift.
pub const UNITARY_TOL: f64 = 1e-10;
/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// (relative to the Frobenius norm of the input, floored at 1).
pub const JACOBI_TOL: f64 = 1e-12;
/// Allowed drift of ‖ψ‖² away from one.
pub const NORM_TOL: f64 = 1e-10;

const HERMITIAN_TOL: f64 = 1e-10;
const SYMMETRIC_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;
const MAX_QL_ITERATIONS: usize = 200;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_vec(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
                .collect(),
        )
    }

    pub fn diagonal(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)];
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.data[k * other.cols + c];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * factor).collect(),
        }
    }

    pub fn pow(&self, exponent: u32) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("power of a non-square matrix".into()));
        }
        let mut acc = Self::identity(self.rows);
        for _ in 0..exponent {
            acc = acc.matmul(self)?;
        }
        Ok(acc)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
    }

    /// Maximum of |M_ij − conj(M_ji)|; `None` if not square.
    pub fn hermitian_deviation(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let mut dev = 0.0_f64;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        Some(dev)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation().is_some_and(|d| d <= tol)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix dimensions must agree")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(r) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Dense real square matrix; used for Hamiltonians.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    n: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("real matrix must be square".into()));
        }
        Ok(Self {
            n,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        })
    }

    /// Symmetric tridiagonal matrix from its diagonal and off-diagonal.
    pub fn tridiagonal(diag: &[f64], off: &[f64]) -> Result<Self> {
        if off.len() + 1 != diag.len() {
            return Err(Error::Dimension(format!(
                "tridiagonal: {} diagonal vs {} off-diagonal entries",
                diag.len(),
                off.len()
            )));
        }
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        for (i, &e) in off.iter().enumerate() {
            m[(i, i + 1)] = e;
            m[(i + 1, i)] = e;
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn symmetric_deviation(&self) -> f64 {
        let mut dev = 0.0_f64;
        for r in 0..self.n {
            for c in r + 1..self.n {
                dev = dev.max((self[(r, c)] - self[(c, r)]).abs());
            }
        }
        dev
    }

    pub fn check_symmetric(&self, tol: f64) -> Result<()> {
        let deviation = self.symmetric_deviation();
        if deviation > tol {
            return Err(Error::Symmetry { tol, deviation });
        }
        Ok(())
    }

    /// Returns (diagonal, off-diagonal) when every entry outside the three
    /// central bands is exactly zero.
    pub fn as_tridiagonal(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        for r in 0..self.n {
            for c in 0..self.n {
                if r.abs_diff(c) > 1 && self[(r, c)] != 0.0 {
                    return None;
                }
            }
        }
        let diag = (0..self.n).map(|i| self[(i, i)]).collect();
        let off = (0..self.n.saturating_sub(1))
            .map(|i| self[(i, i + 1)])
            .collect();
        Some((diag, off))
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.n,
            cols: self.n,
            data: self.data.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.n + c]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.n + c]
    }
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(C64::norm_sqr).sum()
}

/// ⟨a|b⟩ with the first argument conjugated.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// True iff every entry of M†M − 𝟙 has modulus at most `tol`.
pub fn is_unitary(m: &ComplexMatrix, tol: f64) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "unitarity test on a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let gram = m.adjoint().matmul(m)?;
    Ok(gram.max_abs_diff(&ComplexMatrix::identity(m.rows())) <= tol)
}

pub fn ensure_unitary(m: &ComplexMatrix) -> Result<()> {
    if is_unitary(m, UNITARY_TOL)? {
        Ok(())
    } else {
        Err(Error::Unitarity { tol: UNITARY_TOL })
    }
}

/// Eigenvalues (descending) and eigenvectors (columns) of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn new(m: &ComplexMatrix) -> Result<Self> {
        let deviation = m
            .hermitian_deviation()
            .ok_or_else(|| Error::Dimension("eigenproblem on a non-square matrix".into()))?;
        if deviation > HERMITIAN_TOL {
            return Err(Error::Symmetry {
                tol: HERMITIAN_TOL,
                deviation,
            });
        }
        let (values, vectors) = jacobi(m.clone(), true);
        let vectors = vectors.expect("vectors requested");
        let n = m.rows();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let mut sorted = ComplexMatrix::zeros(n, n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for r in 0..n {
                sorted[(r, new_col)] = vectors[(r, old_col)];
            }
        }
        Ok(Self {
            values: order.iter().map(|&i| values[i]).collect(),
            vectors: sorted,
        })
    }
}

/// All eigenvalues of a Hermitian matrix in descending order.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let deviation = m
        .hermitian_deviation()
        .ok_or_else(|| Error::Dimension("eigenproblem on a non-square matrix".into()))?;
    if deviation > HERMITIAN_TOL {
        return Err(Error::Symmetry {
            tol: HERMITIAN_TOL,
            deviation,
        });
    }
    let (mut values, _) = jacobi(m.clone(), false);
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

// Cyclic complex Jacobi. Each rotation first removes the phase of a_pq with a
// diagonal unitary, then applies the real symmetric rotation that zeroes it.
fn jacobi(mut a: ComplexMatrix, want_vectors: bool) -> (Vec<f64>, Option<ComplexMatrix>) {
    let n = a.rows();
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));
    let threshold = JACOBI_TOL * a.frobenius_norm().max(1.0);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = a[(p, q)];
                let mag = g.norm();
                if mag <= f64::MIN_POSITIVE {
                    continue;
                }
                let phase = g / mag;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sc = phase.conj() * s;
                let sp = phase * s;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - sc * akq;
                    a[(k, q)] = akp * s + phase.conj() * c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - sp * aqk;
                    a[(q, k)] = apk * s + phase * c * aqk;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * c - sc * vkq;
                        v[(k, q)] = vkp * s + phase.conj() * c * vkq;
                    }
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)].re).collect(), v)
}

/// Eigenvalues of a unitary matrix, as Rayleigh quotients on the
/// eigenvectors of the Hermitian part of `e^{−ia}U` for a generic `a`.
pub fn unitary_eigenvalues(u: &ComplexMatrix) -> Result<Vec<C64>> {
    if !is_unitary(u, UNITARY_TOL)? {
        return Err(Error::Unitarity { tol: UNITARY_TOL });
    }
    let tilt = C64::from_polar(1.0, -0.618_033_988_749_895);
    let n = u.rows();
    let rotated = u.scale(tilt);
    let adj = rotated.adjoint();
    let mut h = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            h[(r, c)] = (rotated[(r, c)] + adj[(r, c)]) * 0.5;
        }
    }
    let eig = HermitianEigen::new(&h)?;
    Ok((0..n)
        .map(|k| {
            let v: Vec<C64> = (0..n).map(|r| eig.vectors[(r, k)]).collect();
            let uv = u.mul_vec(&v).expect("square");
            inner(&v, &uv)
        })
        .collect())
}

/// Implicit-shift QL on a symmetric tridiagonal matrix.
///
/// `tracked` lists basis indices whose rows of the eigenvector matrix are
/// accumulated: `rows[r][k]` is component `tracked[r]` of eigenvector `k`.
/// Column rotations act on each row of the eigenvector matrix independently,
/// which is what makes partial tracking exact.
#[derive(Debug, Clone)]
pub struct TridiagonalEigen {
    pub values: Vec<f64>,
    pub tracked: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
}

impl TridiagonalEigen {
    pub fn new(diag: &[f64], off: &[f64], tracked: &[usize]) -> Result<Self> {
        let n = diag.len();
        if off.len() + 1 != n {
            return Err(Error::Dimension(format!(
                "tridiagonal: {} diagonal vs {} off-diagonal entries",
                n,
                off.len()
            )));
        }
        if let Some(&bad) = tracked.iter().find(|&&k| k >= n) {
            return Err(Error::Dimension(format!(
                "tracked row {bad} outside dimension {n}"
            )));
        }
        let mut d = diag.to_vec();
        let mut e = off.to_vec();
        e.push(0.0);
        let mut z: Vec<Vec<f64>> = tracked
            .iter()
            .map(|&k| {
                let mut row = vec![0.0; n];
                row[k] = 1.0;
                row
            })
            .collect();

        for l in 0..n {
            let mut iterations = 0;
            loop {
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                iterations += 1;
                if iterations > MAX_QL_ITERATIONS {
                    return Err(Error::Invariant(
                        "tridiagonal QL failed to converge".into(),
                    ));
                }
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = (g * g + 1.0).sqrt();
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c, mut p) = (1.0_f64, 1.0_f64, 0.0_f64);
                let mut deflated = false;
                let mut i = m;
                while i > l {
                    i -= 1;
                    let f = s * e[i];
                    let b = c * e[i];
                    r = (f * f + g * g).sqrt();
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for row in z.iter_mut() {
                        let f = row[i + 1];
                        row[i + 1] = s * row[i] + c * f;
                        row[i] = c * row[i] - s * f;
                    }
                }
                if deflated {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }
        Ok(Self {
            values: d,
            tracked: tracked.to_vec(),
            rows: z,
        })
    }

    /// ⟨to| e^{−iHt} |from⟩ for two tracked indices.
    pub fn transition_amplitude(&self, from: usize, to: usize, t: f64) -> Result<C64> {
        let (a, b) = (self.row_of(from)?, self.row_of(to)?);
        Ok(self
            .values
            .iter()
            .zip(a.iter().zip(b))
            .map(|(&lambda, (&x, &y))| C64::from_polar(x * y, -lambda * t))
            .sum())
    }

    /// `transition_amplitude` at `t0 + k·dt` for `k < count`, advancing each
    /// eigen-phase by a fixed rotation.
    pub fn transition_series(&self, from: usize, to: usize, t0: f64, dt: f64, count: usize) -> Result<Vec<C64>> {
        let (a, b) = (self.row_of(from)?, self.row_of(to)?);
        let mut phase: Vec<C64> = self
            .values
            .iter()
            .zip(a.iter().zip(b))
            .map(|(&lambda, (&x, &y))| C64::from_polar(x * y, -lambda * t0))
            .collect();
        let turn: Vec<C64> = self.values.iter().map(|&l| C64::from_polar(1.0, -l * dt)).collect();
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            out.push(phase.iter().sum());
            phase.iter_mut().zip(&turn).for_each(|(p, r)| *p *= r);
        }
        Ok(out)
    }

    pub fn row_of(&self, index: usize) -> Result<&[f64]> {
        self.tracked
            .iter()
            .position(|&k| k == index)
            .map(|r| self.rows[r].as_slice())
            .ok_or_else(|| Error::Dimension(format!("row {index} was not tracked")))
    }
}

/// Full eigendecomposition of a real symmetric Hamiltonian, reused across
/// any number of evolution times.
#[derive(Debug, Clone)]
pub struct Propagator {
    values: Vec<f64>,
    vectors: ComplexMatrix,
}

impl Propagator {
    pub fn new(h: &RealMatrix) -> Result<Self> {
        h.check_symmetric(SYMMETRIC_TOL)?;
        let n = h.dim();
        if let Some((diag, off)) = h.as_tridiagonal() {
            let all: Vec<usize> = (0..n).collect();
            let eig = TridiagonalEigen::new(&diag, &off, &all)?;
            let mut vectors = ComplexMatrix::zeros(n, n);
            for (r, row) in eig.rows.iter().enumerate() {
                for (k, &x) in row.iter().enumerate() {
                    vectors[(r, k)] = C64::new(x, 0.0);
                }
            }
            return Ok(Self {
                values: eig.values,
                vectors,
            });
        }
        let eig = HermitianEigen::new(&h.to_complex())?;
        Ok(Self {
            values: eig.values,
            vectors: eig.vectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// Coefficients of `v` in the eigenbasis.
    pub fn decompose(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "state of length {} for a {}-dimensional Hamiltonian",
                v.len(),
                self.dim()
            )));
        }
        let n = self.dim();
        Ok((0..n)
            .map(|k| (0..n).map(|r| self.vectors[(r, k)].conj() * v[r]).sum())
            .collect())
    }

    /// e^{−iHt} applied to a state already expressed in the eigenbasis.
    pub fn evolve_decomposed(&self, coeffs: &[C64], t: f64) -> Vec<C64> {
        let n = self.dim();
        let phased: Vec<C64> = coeffs
            .iter()
            .zip(&self.values)
            .map(|(&c, &lambda)| c * C64::from_polar(1.0, -lambda * t))
            .collect();
        (0..n)
            .map(|r| (0..n).map(|k| self.vectors[(r, k)] * phased[k]).sum())
            .collect()
    }

    pub fn evolve(&self, t: f64, v: &[C64]) -> Result<Vec<C64>> {
        let coeffs = self.decompose(v)?;
        Ok(self.evolve_decomposed(&coeffs, t))
    }
}

/// exp(−iHt)·v via the full eigendecomposition of the real symmetric `h`.
pub fn evolve_exp(h: &RealMatrix, t: f64, v: &[C64]) -> Result<Vec<C64>> {
    Propagator::new(h)?.evolve(t, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn hadamard() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[FRAC_1_SQRT_2, FRAC_1_SQRT_2], &[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]])
            .unwrap()
    }

    #[test]
    fn unitarity_examples() {
        assert!(is_unitary(&ComplexMatrix::identity(2), 1e-12).unwrap());
        assert!(is_unitary(&hadamard(), 1e-12).unwrap());
        let d = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]).unwrap();
        assert!(!is_unitary(&d, 1e-6).unwrap());
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(is_unitary(&rect, 1e-6), Err(Error::Dimension(_))));
    }

    #[test]
    fn eigenvalue_examples() {
        let half = ComplexMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 0.5]]).unwrap();
        assert_eq!(hermitian_eigenvalues(&half).unwrap(), vec![0.5, 0.5]);

        let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let ev = hermitian_eigenvalues(&sx).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] + 1.0).abs() < 1e-12);

        let g = 1.0 / 3.0;
        let grover3 = ComplexMatrix::from_real_rows(&[
            &[-g, 2.0 * g, 2.0 * g],
            &[2.0 * g, -g, 2.0 * g],
            &[2.0 * g, 2.0 * g, -g],
        ])
        .unwrap();
        let ev = hermitian_eigenvalues(&grover3).unwrap();
        for (got, want) in ev.iter().zip([1.0, -1.0, -1.0]) {
            assert!((got - want).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn complex_hermitian_eigenvalues() {
        // σ_y has eigenvalues ±1 and purely imaginary off-diagonals.
        let sy = ComplexMatrix::from_rows(vec![vec![ZERO, -I], vec![I, ZERO]]).unwrap();
        let eig = HermitianEigen::new(&sy).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-12);
        assert!((eig.values[1] + 1.0).abs() < 1e-12);
        let back = &(&eig.vectors * &ComplexMatrix::diagonal(&[ONE, -ONE])) * &eig.vectors.adjoint();
        assert!(back.max_abs_diff(&sy) < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::Symmetry { .. })));
        let h = RealMatrix::from_rows(&[&[0.0, 1.0], &[0.5, 0.0]]).unwrap();
        assert!(matches!(
            evolve_exp(&h, 1.0, &[ONE, ZERO]),
            Err(Error::Symmetry { .. })
        ));
    }

    #[test]
    fn evolve_examples() {
        let zero = RealMatrix::zeros(2);
        let v = vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let out = evolve_exp(&zero, 3.7, &v).unwrap();
        assert!(out.iter().zip(&v).all(|(a, b)| (a - b).norm() < 1e-14));

        let sx = RealMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let out = evolve_exp(&sx, FRAC_PI_2, &[ONE, ZERO]).unwrap();
        assert!(out[0].norm() < 1e-12);
        assert!((out[1] - C64::new(0.0, -1.0)).norm() < 1e-12);

        for t in [0.1, 0.7, 1.3, 2.9] {
            let out = evolve_exp(&sx, t, &[ONE, ZERO]).unwrap();
            assert!((out[1].norm_sqr() - t.sin().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_and_tridiagonal_paths_agree() {
        let diag = [0.3, -0.2, 0.0, 0.5, 0.1, -0.4];
        let off = [1.0, 0.7, 1.4, 0.2, 0.9];
        let tri = RealMatrix::tridiagonal(&diag, &off).unwrap();
        let via_ql = Propagator::new(&tri).unwrap();
        let via_jacobi = {
            let eig = HermitianEigen::new(&tri.to_complex()).unwrap();
            Propagator {
                values: eig.values,
                vectors: eig.vectors,
            }
        };
        let mut v = vec![ZERO; 6];
        v[0] = ONE;
        for t in [0.0, 0.5, 2.0, 7.5] {
            let a = via_ql.evolve(t, &v).unwrap();
            let b = via_jacobi.evolve(t, &v).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-10);
            }
            let partial = TridiagonalEigen::new(&diag, &off, &[0, 5]).unwrap();
            let amp = partial.transition_amplitude(0, 5, t).unwrap();
            assert!((amp - a[5]).norm() < 1e-10);
        }
    }

    fn random_hermitian(n: usize, entries: &[f64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        let mut it = entries.iter().cycle();
        for r in 0..n {
            m[(r, r)] = C64::new(*it.next().unwrap(), 0.0);
            for c in r + 1..n {
                let z = C64::new(*it.next().unwrap(), *it.next().unwrap());
                m[(r, c)] = z;
                m[(c, r)] = z.conj();
            }
        }
        m
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn eigenvalue_sum_matches_trace(
            n in 1usize..=12,
            entries in proptest::collection::vec(-1.0f64..1.0, 150),
        ) {
            let m = random_hermitian(n, &entries);
            let ev = hermitian_eigenvalues(&m).unwrap();
            prop_assert_eq!(ev.len(), n);
            let sum: f64 = ev.iter().sum();
            prop_assert!((sum - m.trace().re).abs() <= 1e-10);
            prop_assert!(ev.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn evolution_group_property(
            n in 2usize..=8,
            entries in proptest::collection::vec(-1.0f64..1.0, 64),
            t1 in 0.0f64..5.0,
            t2 in 0.0f64..5.0,
        ) {
            let mut h = RealMatrix::zeros(n);
            let mut it = entries.iter().cycle();
            for r in 0..n {
                for c in r..n {
                    let x = *it.next().unwrap();
                    h[(r, c)] = x;
                    h[(c, r)] = x;
                }
            }
            let mut v: Vec<C64> = (0..n).map(|k| C64::new(1.0 + k as f64, -(k as f64))).collect();
            let norm = norm_sqr(&v).sqrt();
            v.iter_mut().for_each(|x| *x /= norm);

            let prop = Propagator::new(&h).unwrap();
            let direct = prop.evolve(t1 + t2, &v).unwrap();
            let stepped = prop.evolve(t2, &prop.evolve(t1, &v).unwrap()).unwrap();
            prop_assert!((norm_sqr(&direct) - 1.0).abs() <= 1e-10);
            for (a, b) in direct.iter().zip(&stepped) {
                prop_assert!((a - b).norm() <= 1e-8);
            }
        }
    }
}
