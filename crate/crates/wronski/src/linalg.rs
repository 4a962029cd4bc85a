//! Thin wrappers around dense linear algebra for small complex matrices.
//!
//! Everything downstream works with `DMatrix<Complex<f64>>` at desk scale
//! (dimension ≤ a few dozen), so the only concerns here are determinism and
//! sane error reporting, not performance.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("eigenvalue iteration failed to converge")]
    EigenFailure,
    #[error("singular linear system")]
    Singular,
}

/// Eigenvalues of a complex matrix, read off the triangular Schur factor.
pub fn eigvals(m: &DMatrix<C64>) -> Result<Vec<C64>, LinalgError> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigvals needs a square matrix");
    match n {
        0 => Ok(Vec::new()),
        1 => Ok(vec![m[(0, 0)]]),
        _ => {
            let schur = m
                .clone()
                .try_schur(f64::EPSILON, 100_000)
                .ok_or(LinalgError::EigenFailure)?;
            let t = schur.unpack().1;
            Ok((0..n).map(|i| t[(i, i)]).collect())
        }
    }
}

/// Eigenvalue/eigenvector pairs of a complex matrix with distinct
/// eigenvalues, sorted by eigenvalue (real part, then imaginary part).
///
/// Vectors come from triangular back-substitution on the Schur factor and
/// are normalized with the largest entry real positive, so repeated calls
/// agree bitwise.
pub fn eig_pairs(m: &DMatrix<C64>) -> Result<Vec<(C64, DVector<C64>)>, LinalgError> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eig_pairs needs a square matrix");
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![(m[(0, 0)], DVector::from_element(1, C64::new(1.0, 0.0)))]);
    }
    let schur = m
        .clone()
        .try_schur(f64::EPSILON, 100_000)
        .ok_or(LinalgError::EigenFailure)?;
    let (q, t) = schur.unpack();
    let scale = t.iter().fold(0.0f64, |a, z| a.max(z.norm())).max(1.0);
    let mut pairs = Vec::with_capacity(n);
    for i in 0..n {
        let lambda = t[(i, i)];
        let mut y = DVector::from_element(n, C64::new(0.0, 0.0));
        y[i] = C64::new(1.0, 0.0);
        for j in (0..i).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for k in (j + 1)..=i {
                acc += t[(j, k)] * y[k];
            }
            let pivot = t[(j, j)] - lambda;
            if pivot.norm() <= 1e-12 * scale {
                return Err(LinalgError::EigenFailure);
            }
            y[j] = -acc / pivot;
        }
        let mut v = &q * y;
        let norm = v.norm();
        if norm == 0.0 {
            return Err(LinalgError::EigenFailure);
        }
        let lead = v
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap();
        let phase = lead / C64::new(lead.norm(), 0.0);
        v /= phase * C64::new(norm, 0.0);
        pairs.push((lambda, v));
    }
    pairs.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    Ok(pairs)
}

/// Solves `m·x = b` by LU with partial pivoting.
pub fn solve(m: &DMatrix<C64>, b: &DVector<C64>) -> Result<DVector<C64>, LinalgError> {
    m.clone().lu().solve(b).ok_or(LinalgError::Singular)
}

/// Matrix inverse by LU.
pub fn inverse(m: &DMatrix<C64>) -> Result<DMatrix<C64>, LinalgError> {
    m.clone().lu().try_inverse().ok_or(LinalgError::Singular)
}

/// Singular values, largest first.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let sv = m.clone().svd(false, false).singular_values;
    let mut out: Vec<f64> = sv.iter().copied().collect();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// Numeric rank with a relative singular-value cutoff.
pub fn rank(m: &DMatrix<C64>, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    let smax = sv.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Orthonormal basis of the (right) nullspace with a relative cutoff.
///
/// Wide inputs are padded with zero rows so the full right factor is
/// available from the thin SVD.
pub fn nullspace(m: &DMatrix<C64>, rel_tol: f64) -> Vec<DVector<C64>> {
    let (r, c) = (m.nrows(), m.ncols());
    let work = if r < c {
        let mut padded = DMatrix::<C64>::zeros(c, c);
        padded.view_mut((0, 0), (r, c)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = work.clone().svd(true, true);
    let v_t = svd.v_t.expect("svd requested with vectors");
    let sv = svd.singular_values;
    let smax = sv.iter().fold(0.0f64, |a, &b| a.max(b));
    let mut out = Vec::new();
    for k in 0..sv.len() {
        if smax == 0.0 || sv[k] <= rel_tol * smax {
            let row = v_t.row(k);
            out.push(DVector::from_iterator(c, row.iter().map(|z| z.conj())));
        }
    }
    out
}

/// Two-norm condition estimate `σ_max / σ_min`.
pub fn condition(m: &DMatrix<C64>) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut out: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Largest entry magnitude.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.norm()))
}

/// Largest imaginary part magnitude.
pub fn max_imag(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0f64, |a, z| a.max(z.im.abs()))
}

/// Real part, entrywise.
pub fn real_part(m: &DMatrix<C64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re)
}

/// Embeds a real matrix into the complex scalars.
pub fn complexify(m: &DMatrix<f64>) -> DMatrix<C64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| C64::new(m[(i, j)], 0.0))
}
