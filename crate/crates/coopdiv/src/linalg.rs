//! Small dense complex matrices and the log-det mutual-information kernel.
//!
//! Everything here is sized for cooperative-frame models (dimension a few
//! dozen at most), so the implementation favors clarity and numerical
//! robustness over asymptotics: complex Cholesky factorization, triangular
//! solves, and `log2 det(I + S N^{-1})` evaluated by whitening `S` with the
//! Cholesky factor of `N` before factoring `I + S_whitened`.

use num_complex::Complex64;

use crate::{Error, Result};

/// Absolute tolerance for the Hermitian-symmetry check.
const HERMITIAN_TOL: f64 = 1e-12;

/// Relative pivot tolerance: a factorization pivot below `1e-12 * trace`
/// signals a model-construction bug rather than a borderline matrix, because
/// every valid noise covariance contains an identity destination-noise
/// component.
const PIVOT_TOL_SCALE: f64 = 1e-12;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self { n_rows, n_cols, data: vec![Complex64::ZERO; n_rows * n_cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    /// Builds a matrix from a row-major closure.
    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    #[inline]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n_cols + j] = v;
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.n_cols, self.n_rows, |i, j| self.get(j, i).conj())
    }

    pub fn mul(&self, rhs: &CMatrix) -> Result<CMatrix> {
        if self.n_cols != rhs.n_rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.n_rows, self.n_cols, rhs.n_rows, rhs.n_cols
            )));
        }
        let mut out = CMatrix::zeros(self.n_rows, rhs.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..rhs.n_cols {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    fn max_hermitian_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n_rows {
            for j in i..self.n_cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// A square complex matrix checked to be Hermitian at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Wraps `m`, verifying `m[i][j] == conj(m[j][i])` to 1e-12 absolute.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.n_rows != m.n_cols {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.n_rows, m.n_cols
            )));
        }
        let worst = m.max_hermitian_asymmetry();
        if worst > HERMITIAN_TOL {
            return Err(Error::NotHermitian(worst));
        }
        Ok(Self(m))
    }

    /// Zero matrix of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    /// Accumulates `scale * col * col^H` onto `self`. The rank-one update is
    /// applied symmetrically so the invariant holds exactly.
    pub fn add_outer_product(&mut self, scale: f64, col: &[Complex64]) {
        let n = self.dim();
        assert_eq!(col.len(), n, "outer-product column length must match dimension");
        if scale == 0.0 {
            return;
        }
        for i in 0..n {
            for j in i..n {
                let v = self.0.get(i, j) + scale * col[i] * col[j].conj();
                self.0.set(i, j, v);
                if j != i {
                    self.0.set(j, i, v.conj());
                } else {
                    // keep the diagonal exactly real
                    self.0.set(i, i, Complex64::new(v.re, 0.0));
                }
            }
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.n_rows
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0.get(i, j)
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn trace_real(&self) -> f64 {
        (0..self.dim()).map(|i| self.0.get(i, i).re).sum()
    }
}

/// Lower-triangular complex Cholesky factor `L` with `L L^H = m`.
///
/// Pivots below `PIVOT_TOL_SCALE * max(trace, 1)` are rejected as
/// non-positive-definite.
pub(crate) fn cholesky(m: &HermitianMatrix) -> Result<CMatrix> {
    let n = m.dim();
    let tol = PIVOT_TOL_SCALE * m.trace_real().abs().max(1.0);
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = m.get(j, j).re;
        for k in 0..j {
            d -= l.get(j, k).norm_sqr();
        }
        if d <= tol || d.is_nan() {
            return Err(Error::NotPositiveDefinite { pivot: d, tol });
        }
        let dj = d.sqrt();
        l.set(j, j, Complex64::new(dj, 0.0));
        for i in (j + 1)..n {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k).conj();
            }
            l.set(i, j, s / dj);
        }
    }
    Ok(l)
}

/// Solves `L x = b` for lower-triangular `L`, overwriting `b` columns.
fn forward_solve_columns(l: &CMatrix, b: &mut CMatrix) {
    let n = l.n_rows();
    for col in 0..b.n_cols() {
        for i in 0..n {
            let mut s = b.get(i, col);
            for k in 0..i {
                s -= l.get(i, k) * b.get(k, col);
            }
            b.set(i, col, s / l.get(i, i));
        }
    }
}

/// `log2 det(I + S N^{-1})` for a positive-semidefinite signal covariance
/// `S` and a positive-definite noise covariance `N`, in bits.
///
/// Evaluated in whitened form: with `N = L L^H`, the value equals
/// `log2 det(I + L^{-1} S L^{-H})`, and `I + W` is factored by a second
/// Cholesky so the determinant is a product of real positive pivots.
pub fn logdet_ipm(signal_cov: &HermitianMatrix, noise_cov: &HermitianMatrix) -> Result<f64> {
    let n = noise_cov.dim();
    if signal_cov.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "signal covariance is {}x{} but noise covariance is {}x{}",
            signal_cov.dim(),
            signal_cov.dim(),
            n,
            n
        )));
    }
    if n == 0 {
        return Ok(0.0);
    }
    let l = cholesky(noise_cov)?;
    // W = L^{-1} S L^{-H}
    let mut y = signal_cov.as_matrix().clone();
    forward_solve_columns(&l, &mut y); // y = L^{-1} S
    let mut yh = y.adjoint();
    forward_solve_columns(&l, &mut yh); // yh = L^{-1} S^H L^{-H} = (L^{-1} S L^{-H})^H
    let w = yh.adjoint();
    // Symmetrize to scrub roundoff before the second factorization.
    let mut iw = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = 0.5 * (w.get(i, j) + w.get(j, i).conj());
            iw.set(i, j, if i == j { Complex64::new(v.re + 1.0, 0.0) } else { v });
        }
    }
    let iw = HermitianMatrix::new(iw)?;
    let lf = cholesky(&iw)?;
    let mut logdet = 0.0;
    for i in 0..n {
        logdet += 2.0 * lf.get(i, i).re.log2();
    }
    // The determinant of I + W is >= 1, so the value is nonnegative up to
    // factorization roundoff.
    Ok(logdet.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn herm(entries: &[&[(f64, f64)]]) -> HermitianMatrix {
        let n = entries.len();
        let m = CMatrix::from_fn(n, n, |i, j| {
            let (re, im) = entries[i][j];
            Complex64::new(re, im)
        });
        HermitianMatrix::new(m).unwrap()
    }

    #[test]
    fn zero_signal_gives_zero_bits() {
        for dim in 1..5 {
            let s = HermitianMatrix::zeros(dim);
            let n = HermitianMatrix::new(CMatrix::identity(dim)).unwrap();
            assert_eq!(logdet_ipm(&s, &n).unwrap(), 0.0);
        }
    }

    #[test]
    fn scalar_reduces_to_shannon() {
        let rho = 7.25;
        let mut s = HermitianMatrix::zeros(1);
        s.add_outer_product(rho, &[Complex64::ONE]);
        let n = HermitianMatrix::new(CMatrix::identity(1)).unwrap();
        let got = logdet_ipm(&s, &n).unwrap();
        assert!((got - (1.0 + rho).log2()).abs() < 1e-14);
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let s = HermitianMatrix::zeros(2);
        let n = HermitianMatrix::new(CMatrix::identity(3)).unwrap();
        assert!(matches!(logdet_ipm(&s, &n), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn rejects_non_positive_definite_noise() {
        let s = HermitianMatrix::zeros(2);
        let n = HermitianMatrix::zeros(2);
        assert!(matches!(logdet_ipm(&s, &n), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::identity(2);
        m.set(0, 1, Complex64::new(1.0, 0.5));
        m.set(1, 0, Complex64::new(1.0, 0.5)); // should be the conjugate
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn naf_frame_covariances_match_cofactor_expansion() {
        // Unit gains, E = rho = 10, unit noise variances, repetition gain at
        // the energy-constraint equality: the frame's 2x2 signal and noise
        // covariances evaluated against an ad - bc cofactor expansion.
        let e = 10.0f64;
        let b = (e / (e + 1.0)).sqrt();
        let s11 = e;
        let s12 = Complex64::new(b * e, 0.0); // g1 g2* b* h* E with unit gains
        let s22 = e + b * b * e;
        let n22 = 1.0 + b * b;
        let s = herm(&[
            &[(s11, 0.0), (s12.re, -s12.im)],
            &[(s12.re, s12.im), (s22, 0.0)],
        ]);
        let n = herm(&[&[(1.0, 0.0), (0.0, 0.0)], &[(0.0, 0.0), (n22, 0.0)]]);
        // det(I + S N^{-1}) = (1 + s11)(1 + s22/n22) - |s12|^2 / n22
        let expect = ((1.0 + s11) * (1.0 + s22 / n22) - s12.norm_sqr() / n22).log2();
        let got = logdet_ipm(&s, &n).unwrap();
        assert!((got - expect).abs() < 1e-12, "got {got}, expected {expect}");
    }

    #[test]
    fn matches_hand_2x2_determinant() {
        // 2x2 with a complex cross term, checked against the cofactor
        // expansion of det(I + S N^{-1}) done by hand.
        let s = herm(&[
            &[(3.0, 0.0), (1.0, -2.0)],
            &[(1.0, 2.0), (6.0, 0.0)],
        ]);
        let n = herm(&[
            &[(1.0, 0.0), (0.25, 0.5)],
            &[(0.25, -0.5), (2.0, 0.0)],
        ]);
        // det(N), det(N + S) via ad - bc; det(I + S N^{-1}) = det(N+S)/det(N).
        let det_n = 1.0 * 2.0 - Complex64::new(0.25, 0.5).norm_sqr();
        let ns_off = Complex64::new(0.25 + 1.0, 0.5 - 2.0);
        let det_ns = 4.0 * 8.0 - ns_off.norm_sqr();
        let expect = (det_ns / det_n).log2();
        let got = logdet_ipm(&s, &n).unwrap();
        assert!((got - expect).abs() < 1e-12, "got {got}, expected {expect}");
    }
}
