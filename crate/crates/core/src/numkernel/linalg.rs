//! Log-determinants, numerical rank, eigenvalue growth and block assembly.

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::model::ComplexMatrix;

const HERMITIAN_RTOL: f64 = 1e-9;

fn c(re: f64) -> Complex<f64> {
    Complex::new(re, 0.0)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Largest entrywise modulus, 0 for empty matrices.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn ensure_square(m: &ComplexMatrix, what: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "{what} must be square, got {}×{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn ensure_hermitian(m: &ComplexMatrix) -> Result<()> {
    let scale = max_abs(m).max(1.0);
    if max_abs(&(m - m.adjoint())) > HERMITIAN_RTOL * scale {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(())
}

/// log2|m| for Hermitian positive definite `m`, via Cholesky.
pub fn logdet_hpd(m: &ComplexMatrix) -> Result<f64> {
    ensure_square(m, "logdet input")?;
    ensure_hermitian(m)?;
    let chol = m.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l_dirty();
    let mut acc = 0.0;
    for k in 0..m.nrows() {
        // complex sqrt never fails, so a negative pivot shows up as an imaginary diagonal
        let Complex { re: d, im } = l[(k, k)];
        if d.is_nan() || d <= 0.0 || !d.is_finite() || im.abs() > 1e-8 * d {
            return Err(Error::NotPositiveDefinite);
        }
        acc += d.log2();
    }
    Ok(2.0 * acc)
}

/// log2|σ²·A·A^H + I|, the workhorse of every Gaussian capacity term.
pub fn logdet_gram_plus_identity(a: &ComplexMatrix, sigma2: f64) -> Result<f64> {
    let g = a * a.adjoint() * c(sigma2) + identity(a.nrows());
    logdet_hpd(&g)
}

/// Default relative threshold: max(rows, cols)·1e−12.
pub fn default_rtol(m: &ComplexMatrix) -> f64 {
    m.nrows().max(m.ncols()) as f64 * 1e-12
}

/// Number of singular values above `rtol · σ_max`.
pub fn numerical_rank(m: &ComplexMatrix, rtol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rtol * smax).count()
}

/// `numerical_rank` with the default threshold.
pub fn rank(m: &ComplexMatrix) -> usize {
    numerical_rank(m, default_rtol(m))
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    ensure_square(m, "eigenvalue input")?;
    let h = (m + m.adjoint()) * c(0.5);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

pub const DEFAULT_POWER_RATIO: f64 = 1024.0;
pub const DEFAULT_GROWTH_FRACTION: f64 = 0.1;

/// Counts eigenvalues that grow with σ².
///
/// `r_lo` and `r_hi` are one covariance evaluated at σ²_lo and
/// `power_ratio`·σ²_lo. Eigenvalues of the form η·σ² + a scale by the power
/// ratio; bounded ones stay put. The count of sorted pairs whose ratio beats
/// `growth_fraction · power_ratio` is the DoF.
pub fn eig_growth_count(
    r_lo: &ComplexMatrix,
    r_hi: &ComplexMatrix,
    power_ratio: f64,
    growth_fraction: f64,
) -> Result<usize> {
    if r_lo.shape() != r_hi.shape() {
        return Err(Error::ShapeMismatch(format!(
            "covariances differ in shape: {:?} vs {:?}",
            r_lo.shape(),
            r_hi.shape()
        )));
    }
    let lo = hermitian_eigenvalues(r_lo)?;
    let hi = hermitian_eigenvalues(r_hi)?;
    let threshold = growth_fraction * power_ratio;
    Ok(lo
        .iter()
        .zip(&hi)
        .filter(|(&l, &h)| h > threshold * l.max(0.0) && h > 0.0)
        .count())
}

/// Kronecker product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Block-diagonal assembly.
pub fn block_diag(blocks: &[&ComplexMatrix]) -> ComplexMatrix {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let (mut r, mut k) = (0, 0);
    for b in blocks {
        out.view_mut((r, k), b.shape()).copy_from(b);
        r += b.nrows();
        k += b.ncols();
    }
    out
}

/// Horizontal concatenation; all blocks must share a row count.
pub fn hstack(blocks: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    if blocks.iter().any(|b| b.nrows() != rows) {
        return Err(Error::ShapeMismatch("hstack row counts differ".into()));
    }
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let mut k = 0;
    for b in blocks {
        out.view_mut((0, k), b.shape()).copy_from(b);
        k += b.ncols();
    }
    Ok(out)
}

/// Vertical concatenation; all blocks must share a column count.
pub fn vstack(blocks: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    if blocks.iter().any(|b| b.ncols() != cols) {
        return Err(Error::ShapeMismatch("vstack column counts differ".into()));
    }
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let mut r = 0;
    for b in blocks {
        out.view_mut((r, 0), b.shape()).copy_from(b);
        r += b.nrows();
    }
    Ok(out)
}

/// Column-major vectorisation as an `n·m × 1` matrix.
pub fn vec_col(m: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(m.len(), 1, m.as_slice())
}

/// Real scalar as a complex entry.
pub fn real(x: f64) -> Complex<f64> {
    c(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::rng::{cn_matrix, substream};

    fn diag(vals: &[f64]) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(vals.len(), vals.len());
        for (k, &v) in vals.iter().enumerate() {
            m[(k, k)] = c(v);
        }
        m
    }

    #[test]
    fn logdet_examples() {
        assert_eq!(logdet_hpd(&identity(3)).unwrap(), 0.0);
        assert!((logdet_hpd(&diag(&[2.0, 4.0])).unwrap() - 3.0).abs() < 1e-14);
        let mut rng = substream(3, "test", 0);
        let a = cn_matrix(&mut rng, 4, 6);
        assert!(logdet_gram_plus_identity(&a, 1.0).unwrap() >= 0.0);
    }

    #[test]
    fn logdet_rejects_indefinite_and_non_square() {
        assert!(matches!(
            logdet_hpd(&diag(&[1.0, -1.0])),
            Err(Error::NotPositiveDefinite)
        ));
        assert!(matches!(
            logdet_hpd(&ComplexMatrix::zeros(2, 3)),
            Err(Error::ShapeMismatch(_))
        ));
        let mut skew = identity(2);
        skew[(0, 1)] = c(0.5);
        assert!(logdet_hpd(&skew).is_err());
    }

    #[test]
    fn logdet_ill_conditioned() {
        let m = diag(&[1e10, 1.0, 3.0]);
        let want = (3e10f64).log2();
        let got = logdet_hpd(&m).unwrap();
        assert!(((got - want) / want).abs() < 1e-8);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&identity(3)), 3);
        let mut rng = substream(5, "test", 0);
        let u = cn_matrix(&mut rng, 4, 1);
        let v = cn_matrix(&mut rng, 1, 3);
        assert_eq!(rank(&(u * v)), 1);
        assert_eq!(rank(&ComplexMatrix::zeros(3, 2)), 0);
        assert_eq!(rank(&ComplexMatrix::zeros(0, 2)), 0);
    }

    #[test]
    fn growth_single() {
        let lo = 1024.0;
        let hi = lo * DEFAULT_POWER_RATIO;
        let r = |s: f64| diag(&[s + 1.0, 2.0]);
        assert_eq!(
            eig_growth_count(&r(lo), &r(hi), DEFAULT_POWER_RATIO, DEFAULT_GROWTH_FRACTION).unwrap(),
            1
        );
        let r4 = |s: f64| identity(4) * c(s + 1.0);
        assert_eq!(
            eig_growth_count(
                &r4(lo),
                &r4(hi),
                DEFAULT_POWER_RATIO,
                DEFAULT_GROWTH_FRACTION
            )
            .unwrap(),
            4
        );
        assert!(eig_growth_count(&identity(2), &identity(3), 2.0, 0.1).is_err());
    }

    #[test]
    fn block_helpers() {
        let a = identity(2);
        let b = diag(&[5.0]);
        let d = block_diag(&[&a, &b]);
        assert_eq!(d.shape(), (3, 3));
        assert_eq!(d[(2, 2)], c(5.0));
        assert_eq!(d[(0, 2)], c(0.0));
        assert_eq!(hstack(&[&a, &a]).unwrap().shape(), (2, 4));
        assert_eq!(vstack(&[&a, &a]).unwrap().shape(), (4, 2));
        assert!(hstack(&[&a, &b]).is_err());
        let k = kron(&a, &b);
        assert_eq!(k, diag(&[5.0, 5.0]));
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(3.0), c(4.0)]);
        let v = vec_col(&m);
        assert_eq!(v[(1, 0)], c(3.0));
    }
}
