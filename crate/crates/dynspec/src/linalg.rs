//! Dense complex matrices: SVD, singular-value truncation, Moore-Penrose
//! pseudo-inverse, eigenvalues, and the spectral-projector oracles used to
//! identify which eigenvalues a trajectory can reveal.
//!
//! Decompositions are delegated to nalgebra; everything here stays small
//! (matrices up to ~100x100), dense, and double precision.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Domain("matrix dimensions must be positive".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("matrix contains non-finite entries".into()));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Domain("matrix needs at least one row".into()));
        }
        let c = rows[0].len();
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Dimension { expected: c, got: row.len() });
            }
            entries.extend_from_slice(row);
        }
        Self::new(r, c, entries)
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let converted: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&converted)
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * n + i] = v;
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

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension { expected: self.cols, got: rhs.rows });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entries[i * self.cols + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.entries[i * rhs.cols + j] += a * rhs.entries[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self.entries[i * self.cols + j] * v[j])
                    .sum()
            })
            .collect())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Dimension {
                expected: self.rows * self.cols,
                got: rhs.rows * rhs.cols,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a + b)
            .collect();
        Self::new(self.rows, self.cols, entries)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[j * self.rows + i] = self.entries[i * self.cols + j].conj();
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Spectral norm (largest singular value).
    pub fn spectral_norm(&self) -> Result<f64> {
        Ok(svd(self)?.singular_values.first().copied().unwrap_or(0.0))
    }

    /// Matrix power by repeated squaring. `pow(0)` is the identity.
    pub fn matrix_power(&self, mut exponent: u64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Domain("matrix power of a non-square matrix".into()));
        }
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        while exponent > 0 {
            if exponent & 1 == 1 {
                result = result.mul(&base)?;
            }
            exponent >>= 1;
            if exponent > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }

}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.entries[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[r * self.cols + c]
    }
}

/// Singular value decomposition A = U diag(sigma) V*.
///
/// `u` has orthonormal columns spanning the left singular directions and `v`
/// the right ones; `singular_values` are sorted nonincreasing.
#[derive(Clone, Debug)]
pub struct SvdFactors {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl SvdFactors {
    /// U diag(sigma) V*.
    pub fn reconstruct(&self) -> Result<ComplexMatrix> {
        let sigma = ComplexMatrix::diagonal(
            &self
                .singular_values
                .iter()
                .map(|&s| Complex64::new(s, 0.0))
                .collect::<Vec<_>>(),
        );
        self.u.mul(&sigma)?.mul(&self.v.adjoint())
    }
}

/// Applies the plane rotation to columns `p` and `q` of a column-major set.
fn rotate_pair(
    cols: &mut [Vec<Complex64>],
    p: usize,
    q: usize,
    phase: Complex64,
    cs: f64,
    sn: f64,
) {
    debug_assert!(p < q);
    let conj = phase.conj();
    let (head, tail) = cols.split_at_mut(q);
    for (a, b) in head[p].iter_mut().zip(tail[0].iter_mut()) {
        let x = *a;
        let y = *b * conj;
        *a = x * cs - y * sn;
        *b = x * sn + y * cs;
    }
}

/// One-sided Jacobi SVD.
///
/// Right-multiplies plane rotations until the working columns are mutually
/// orthogonal; their norms are the singular values and the accumulated
/// rotations form V. Quadratically convergent and accurate down to the
/// smallest singular values at the sizes this crate handles.
pub fn svd(a: &ComplexMatrix) -> Result<SvdFactors> {
    if a.rows() < a.cols() {
        // factor the adjoint and swap the roles of U and V
        let f = svd(&a.adjoint())?;
        return Ok(SvdFactors {
            u: f.v,
            singular_values: f.singular_values,
            v: f.u,
        });
    }
    let m = a.rows();
    let n = a.cols();
    // column-major working copies
    let mut b: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..m).map(|i| a[(i, j)]).collect())
        .collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            col[j] = Complex64::new(1.0, 0.0);
            col
        })
        .collect();

    let norm_sqr = |col: &[Complex64]| col.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let inner = |x: &[Complex64], y: &[Complex64]| {
        x.iter()
            .zip(y)
            .map(|(p, q)| p.conj() * q)
            .sum::<Complex64>()
    };

    let mut converged = false;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                let app = norm_sqr(&b[p]);
                let aqq = norm_sqr(&b[q]);
                let apq = inner(&b[p], &b[q]);
                let mag = apq.norm();
                if app == 0.0 || aqq == 0.0 || mag <= 1e-30 {
                    continue;
                }
                let rel = mag / (app * aqq).sqrt();
                off = off.max(rel);
                if rel <= 1e-15 {
                    continue;
                }
                // phase-align column q so the coupling becomes real, then
                // apply the classical symmetric Jacobi rotation
                let phase = apq / mag;
                let zeta = (aqq - app) / (2.0 * mag);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate_pair(&mut b, p, q, phase, cs, sn);
                rotate_pair(&mut v, p, q, phase, cs, sn);
            }
        }
        if off <= 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged {
        // one final measurement: accept if the residual coupling is tiny
        let mut worst = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                let app = norm_sqr(&b[p]);
                let aqq = norm_sqr(&b[q]);
                if app == 0.0 || aqq == 0.0 {
                    continue;
                }
                worst = worst.max(inner(&b[p], &b[q]).norm() / (app * aqq).sqrt());
            }
        }
        if worst > 1e-10 {
            return Err(Error::Numerical(format!(
                "jacobi SVD did not converge (residual coupling {worst:.2e})"
            )));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = b.iter().map(|col| norm_sqr(col).sqrt()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite"));

    let sigma_max = order.first().map_or(0.0, |&i| norms[i]);
    let negligible = sigma_max * (m.max(n) as f64) * f64::EPSILON;
    let mut u_cols: Vec<Option<Vec<Complex64>>> = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    let mut v_sorted = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        values.push(norms[src]);
        for i in 0..n {
            v_sorted[(i, dst)] = v[src][i];
        }
        if norms[src] > negligible && norms[src] > 0.0 {
            u_cols.push(Some(b[src].iter().map(|z| z / norms[src]).collect()));
        } else {
            u_cols.push(None); // completed below
        }
    }

    // complete left singular vectors for (numerically) zero singular values
    let mut filled: Vec<Vec<Complex64>> =
        u_cols.iter().flatten().cloned().collect();
    for slot in u_cols.iter_mut() {
        if slot.is_some() {
            continue;
        }
        let mut chosen = None;
        for k in 0..m {
            let mut cand = vec![Complex64::new(0.0, 0.0); m];
            cand[k] = Complex64::new(1.0, 0.0);
            for existing in &filled {
                let coeff = inner(existing, &cand);
                for i in 0..m {
                    cand[i] -= existing[i] * coeff;
                }
            }
            let norm = norm_sqr(&cand).sqrt();
            if norm > 0.5 {
                chosen = Some(cand.iter().map(|z| z / norm).collect::<Vec<_>>());
                break;
            }
        }
        let col = chosen.ok_or_else(|| {
            Error::Numerical("failed to complete an orthonormal basis".into())
        })?;
        filled.push(col.clone());
        *slot = Some(col);
    }

    let mut u_sorted = ComplexMatrix::zeros(m, n);
    for (j, col) in u_cols.iter().enumerate() {
        let col = col.as_ref().expect("all slots filled");
        for i in 0..m {
            u_sorted[(i, j)] = col[i];
        }
    }
    Ok(SvdFactors {
        u: u_sorted,
        singular_values: values,
        v: v_sorted,
    })
}

/// Keep exactly the singular values in [gamma, inf) and rebuild the matrix.
/// The threshold interval is closed: a singular value equal to `gamma` stays.
pub fn truncate_singular(a: &ComplexMatrix, gamma: f64) -> Result<ComplexMatrix> {
    if !(gamma > 0.0) {
        return Err(Error::Domain(format!("threshold {gamma} must be > 0")));
    }
    let mut factors = svd(a)?;
    for s in factors.singular_values.iter_mut() {
        if *s < gamma {
            *s = 0.0;
        }
    }
    factors.reconstruct()
}

/// Moore-Penrose pseudo-inverse via SVD.
///
/// Rank decisions use the standard relative cutoff max(rows, cols) * eps *
/// sigma_max; algorithmic truncation with an explicit threshold is handled
/// separately by `truncate_singular`.
pub fn pseudo_inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let factors = svd(a)?;
    let sigma_max = factors.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = a.rows().max(a.cols()) as f64 * f64::EPSILON * sigma_max;
    let inverted: Vec<Complex64> = factors
        .singular_values
        .iter()
        .map(|&s| {
            if s > cutoff && s > 0.0 {
                Complex64::new(1.0 / s, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    let sigma_inv = ComplexMatrix::diagonal(&inverted);
    factors.v.mul(&sigma_inv)?.mul(&factors.u.adjoint())
}

/// All eigenvalues with algebraic multiplicity.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::Domain("eigenvalues of a non-square matrix".into()));
    }
    let eig = a
        .to_nalgebra()
        .eigenvalues()
        .ok_or_else(|| Error::Numerical("eigenvalue iteration did not converge".into()))?;
    Ok(eig.iter().copied().collect())
}

pub fn determinant(a: &ComplexMatrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::Domain("determinant of a non-square matrix".into()));
    }
    Ok(a.to_nalgebra().determinant())
}

/// Greedy nearest-neighbor pairing of estimated eigenvalues to references.
///
/// Repeatedly matches the globally closest unmatched (estimate, reference)
/// pair; distance ties break by estimate magnitude, then real part. Returns
/// `(estimate_index, reference_index)` pairs, one per reference (requires
/// len(estimates) >= len(references)).
pub fn match_eigenvalues(estimates: &[Complex64], references: &[Complex64]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    let mut est_used = vec![false; estimates.len()];
    let mut ref_used = vec![false; references.len()];
    let rounds = references.len().min(estimates.len());
    for _ in 0..rounds {
        let mut best: Option<(f64, usize, usize)> = None;
        for (i, &e) in estimates.iter().enumerate() {
            if est_used[i] {
                continue;
            }
            for (j, &r) in references.iter().enumerate() {
                if ref_used[j] {
                    continue;
                }
                let d = (e - r).norm();
                let better = match best {
                    None => true,
                    Some((bd, bi, _)) => {
                        d < bd - 1e-12
                            || ((d - bd).abs() <= 1e-12
                                && (e.norm(), e.re) < (estimates[bi].norm(), estimates[bi].re))
                    }
                };
                if better {
                    best = Some((d, i, j));
                }
            }
        }
        let (_, i, j) = best.expect("unmatched pair exists");
        est_used[i] = true;
        ref_used[j] = true;
        pairs.push((i, j));
    }
    pairs
}

/// Distinct eigenvalues of a matrix after clustering nearly equal ones.
/// Returns (value, multiplicity) sorted by real then imaginary part.
fn clustered_eigenvalues(a: &ComplexMatrix, tol: f64) -> Result<Vec<(Complex64, usize)>> {
    let mut eigs = eigenvalues(a)?;
    eigs.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).expect("finite"));
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for e in eigs {
        match clusters.iter_mut().find(|(c, _)| (*c - e).norm() <= tol) {
            Some((c, count)) => {
                // running mean keeps the cluster center stable
                *c = (*c * (*count as f64) + e) / (*count as f64 + 1.0);
                *count += 1;
            }
            None => clusters.push((e, 1)),
        }
    }
    Ok(clusters)
}

/// Spectral projectors of a (numerically) diagonalizable matrix, one per
/// distinct eigenvalue, built as Lagrange polynomials in the matrix.
///
/// Fails with a numerical error when the projector identities sum(P) = I and
/// P^2 = P do not hold, which flags a non-diagonalizable input.
pub fn spectral_projectors(a: &ComplexMatrix) -> Result<Vec<(Complex64, ComplexMatrix)>> {
    if !a.is_square() {
        return Err(Error::Domain("projectors of a non-square matrix".into()));
    }
    let n = a.rows();
    let scale = a.frobenius_norm().max(1.0);
    let clusters = clustered_eigenvalues(a, 1e-6 * scale)?;
    let mut projectors = Vec::with_capacity(clusters.len());
    for (i, &(lambda_i, _)) in clusters.iter().enumerate() {
        let mut p = ComplexMatrix::identity(n);
        for (j, &(lambda_j, _)) in clusters.iter().enumerate() {
            if i == j {
                continue;
            }
            let shifted = a.sub(&ComplexMatrix::identity(n).scale(lambda_j))?;
            p = p.mul(&shifted)?.scale(Complex64::new(1.0, 0.0) / (lambda_i - lambda_j));
        }
        projectors.push((lambda_i, p));
    }
    // projector identities certify diagonalizability
    let mut sum = ComplexMatrix::zeros(n, n);
    for (_, p) in &projectors {
        sum = sum.add(p)?;
        let idem = p.mul(p)?.sub(p)?;
        if idem.frobenius_norm() > 1e-6 * scale.max(p.frobenius_norm()) {
            return Err(Error::Numerical(
                "spectral projector is not idempotent; matrix is not numerically diagonalizable"
                    .into(),
            ));
        }
    }
    let residual = sum.sub(&ComplexMatrix::identity(n))?.frobenius_norm();
    if residual > 1e-6 * (n as f64).sqrt() {
        return Err(Error::Numerical(
            "spectral projectors do not resolve the identity".into(),
        ));
    }
    Ok(projectors)
}

/// Brute-force oracle for the eigenvalues a trajectory can reveal: the k-th
/// powers of eigenvalues alpha of `m` with |alpha| = lambda (tolerance 1e-8)
/// whose eigenspace carries a nonzero component of `theta` (norm > 1e-8).
///
/// Returns the deduplicated set sorted by real then imaginary part.
pub fn distinct_eigen_oracle(
    m: &ComplexMatrix,
    theta: &[Complex64],
    k: u32,
    lambda: f64,
) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::Domain("oracle requires a square matrix".into()));
    }
    if theta.len() != m.rows() {
        return Err(Error::Dimension { expected: m.rows(), got: theta.len() });
    }
    let mut out: Vec<Complex64> = Vec::new();
    for (alpha, p) in spectral_projectors(m)? {
        if (alpha.norm() - lambda).abs() > 1e-8 {
            continue;
        }
        let component = p.mul_vec(theta)?;
        let norm = component.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 1e-8 {
            continue;
        }
        let powered = alpha.powu(k);
        if !out.iter().any(|z| (*z - powered).norm() <= 1e-8) {
            out.push(powered);
        }
    }
    out.sort_by(|x, y| (x.re, x.im).partial_cmp(&(y.re, y.im)).expect("finite"));
    Ok(out)
}

/// Spectral part of a diagonalizable matrix carried by its unit-circle
/// eigenvalues: sum of lambda P_lambda over |lambda| = 1 (tolerance 1e-8).
pub fn unit_spectral_part(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (lambda, p) in spectral_projectors(m)? {
        if (lambda.norm() - 1.0).abs() <= 1e-8 {
            out = out.add(&p.scale(lambda))?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha12Rng, rows: usize, cols: usize) -> ComplexMatrix {
        let entries = (0..rows * cols)
            .map(|_| {
                c(
                    rng.sample::<f64, _>(rand_distr::StandardNormal),
                    rng.sample::<f64, _>(rand_distr::StandardNormal),
                )
            })
            .collect();
        ComplexMatrix::new(rows, cols, entries).unwrap()
    }

    fn permshrink() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[
            vec![0.0, 0.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 0.7],
        ])
        .unwrap()
    }

    #[test]
    fn svd_identity_and_diagonal() {
        let f = svd(&ComplexMatrix::identity(4)).unwrap();
        for s in &f.singular_values {
            assert_abs_diff_eq!(*s, 1.0, epsilon = 1e-12);
        }

        let d = ComplexMatrix::diagonal(&[c(3.0, 0.0), c(1.0, 0.0), c(0.1, 0.0)]);
        let f = svd(&d).unwrap();
        assert_abs_diff_eq!(f.singular_values[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.singular_values[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.singular_values[2], 0.1, epsilon = 1e-12);
    }

    #[test]
    fn svd_reconstructs_random_matrices() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for _ in 0..10 {
            let a = random_matrix(&mut rng, 5, 5);
            let f = svd(&a).unwrap();
            let err = f.reconstruct().unwrap().sub(&a).unwrap().frobenius_norm();
            assert!(err < 1e-9 * a.frobenius_norm().max(1.0), "err = {err}");
            // sorted nonincreasing
            for w in f.singular_values.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn truncate_examples() {
        let d = ComplexMatrix::diagonal(&[c(3.0, 0.0), c(1.0, 0.0), c(0.1, 0.0)]);
        let t = truncate_singular(&d, 0.5).unwrap();
        assert_abs_diff_eq!(t[(0, 0)].re, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t[(1, 1)].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t[(2, 2)].re, 0.0, epsilon = 1e-12);

        // threshold above the norm wipes everything
        let z = truncate_singular(&d, 10.0).unwrap();
        assert!(z.frobenius_norm() < 1e-12);

        // the interval is closed: a singular value equal to gamma is kept
        let b = ComplexMatrix::diagonal(&[c(3.0, 0.0), c(1.0, 0.0), c(0.5, 0.0)]);
        let t = truncate_singular(&b, 0.5).unwrap();
        assert_abs_diff_eq!(t[(2, 2)].re, 0.5, epsilon = 1e-12);

        assert!(truncate_singular(&d, 0.0).is_err());
    }

    #[test]
    fn truncate_noop_when_all_kept_and_spectral_bound() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..8 {
            let a = random_matrix(&mut rng, 4, 4);
            let f = svd(&a).unwrap();
            let smallest = *f.singular_values.last().unwrap();
            if smallest > 1e-6 {
                let t = truncate_singular(&a, smallest * 0.999).unwrap();
                assert!(t.sub(&a).unwrap().frobenius_norm() < 1e-10);
            }
            for gamma in [0.3, 1.0, 2.5] {
                let t = truncate_singular(&a, gamma).unwrap();
                let diff = a.sub(&t).unwrap().spectral_norm().unwrap();
                assert!(diff < gamma, "spectral diff {diff} not below gamma {gamma}");
            }
        }
    }

    #[test]
    fn pseudo_inverse_examples_and_axioms() {
        let id = ComplexMatrix::identity(3);
        assert!(pseudo_inverse(&id).unwrap().sub(&id).unwrap().frobenius_norm() < 1e-12);

        let d = ComplexMatrix::diagonal(&[c(2.0, 0.0), c(0.0, 0.0)]);
        let p = pseudo_inverse(&d).unwrap();
        assert_abs_diff_eq!(p[(0, 0)].re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p[(1, 1)].re, 0.0, epsilon = 1e-12);

        // rank-3 5x5: all four axioms to 1e-8
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let b = random_matrix(&mut rng, 5, 3);
        let cmat = random_matrix(&mut rng, 3, 5);
        let a = b.mul(&cmat).unwrap();
        let p = pseudo_inverse(&a).unwrap();
        let apa = a.mul(&p).unwrap().mul(&a).unwrap();
        let pap = p.mul(&a).unwrap().mul(&p).unwrap();
        assert!(apa.sub(&a).unwrap().frobenius_norm() < 1e-8);
        assert!(pap.sub(&p).unwrap().frobenius_norm() < 1e-8);
        let ap = a.mul(&p).unwrap();
        let pa = p.mul(&a).unwrap();
        assert!(ap.adjoint().sub(&ap).unwrap().frobenius_norm() < 1e-8);
        assert!(pa.adjoint().sub(&pa).unwrap().frobenius_norm() < 1e-8);
    }

    #[test]
    fn pseudo_inverse_matches_inverse_when_well_conditioned() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        // diagonally dominant, hence comfortably invertible
        let mut a = random_matrix(&mut rng, 4, 4);
        for i in 0..4 {
            a[(i, i)] += c(6.0, 0.0);
        }
        let p = pseudo_inverse(&a).unwrap();
        let residual = a.mul(&p).unwrap().sub(&ComplexMatrix::identity(4)).unwrap();
        assert!(residual.frobenius_norm() < 1e-8);
    }

    #[test]
    fn eigenvalues_examples() {
        let d = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)]);
        let mut eigs = eigenvalues(&d).unwrap();
        eigs.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        assert!((eigs[0] - c(-1.0, 0.0)).norm() < 1e-10);
        assert!((eigs[1] - c(0.0, 1.0)).norm() < 1e-10);
        assert!((eigs[2] - c(1.0, 0.0)).norm() < 1e-10);

        // nilpotent Jordan block: all zeros
        let n = ComplexMatrix::from_real_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0],
        ])
        .unwrap();
        for e in eigenvalues(&n).unwrap() {
            assert!(e.norm() < 1e-10);
        }

        assert!(eigenvalues(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn eigenvalue_product_matches_determinant() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        for _ in 0..6 {
            let a = random_matrix(&mut rng, 5, 5);
            let eigs = eigenvalues(&a).unwrap();
            let prod: Complex64 = eigs.iter().product();
            let det = determinant(&a).unwrap();
            assert!(
                (prod - det).norm() <= 1e-6 * det.norm().max(1.0),
                "prod {prod} vs det {det}"
            );
        }
    }

    #[test]
    fn permshrink_fifth_power_spectrum() {
        let m5 = permshrink().matrix_power(5).unwrap();
        let eigs = eigenvalues(&m5).unwrap();
        let half = 3.0f64.sqrt() / 2.0;
        let expected = [
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(-0.5, -half),
            c(-0.5, half),
            c(0.7f64.powi(5), 0.0),
        ];
        let pairs = match_eigenvalues(&eigs, &expected);
        for (ei, ri) in pairs {
            assert!(
                (eigs[ei] - expected[ri]).norm() < 1e-8,
                "{} vs {}",
                eigs[ei],
                expected[ri]
            );
        }
    }

    #[test]
    fn distinct_oracle_examples() {
        let id = ComplexMatrix::identity(3);
        let theta = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        let set = distinct_eigen_oracle(&id, &theta, 1, 1.0).unwrap();
        assert_eq!(set.len(), 1);
        assert!((set[0] - c(1.0, 0.0)).norm() < 1e-10);

        // theta carries no weight on the unit eigenvalue
        let d = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.5, 0.0)]);
        let theta = vec![c(0.0, 0.0), c(1.0, 0.0)];
        assert!(distinct_eigen_oracle(&d, &theta, 1, 1.0).unwrap().is_empty());
    }

    #[test]
    fn distinct_oracle_permshrink() {
        // a generic direction reveals exactly {1, -1/2 +- i sqrt(3)/2} for k = 5
        let m = permshrink();
        let theta = vec![
            c(0.43, 0.0),
            c(-0.61, 0.0),
            c(0.32, 0.0),
            c(0.55, 0.0),
            c(0.21, 0.0),
        ];
        let set = distinct_eigen_oracle(&m, &theta, 5, 1.0).unwrap();
        assert_eq!(set.len(), 3);
        let half = 3.0f64.sqrt() / 2.0;
        for want in [c(1.0, 0.0), c(-0.5, half), c(-0.5, -half)] {
            assert!(
                set.iter().any(|z| (*z - want).norm() < 1e-8),
                "missing {want}"
            );
        }
    }

    #[test]
    fn unit_part_of_permshrink_zeroes_the_shrink_direction() {
        let m1 = unit_spectral_part(&permshrink()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((m1[(i, j)] - permshrink()[(i, j)]).norm() < 1e-9);
            }
        }
        assert!(m1[(4, 4)].norm() < 1e-9);
    }

    #[test]
    fn pseudo_inverse_perturbation_bound() {
        // truncated pinv of A + E stays within 8 C |A~+|^2 (sqrt(d)+1)/sqrt(N)
        let mut rng = ChaCha12Rng::seed_from_u64(33);
        let d = 5usize;
        let mut a = random_matrix(&mut rng, d, d);
        for i in 0..d {
            a[(i, i)] += c(4.0, 0.0);
        }
        let a_pinv = pseudo_inverse(&a).unwrap();
        let a_pinv_norm = a_pinv.spectral_norm().unwrap();
        let cconst = 2.0;
        for n in [16u64, 256, 4096, 65536] {
            let e_raw = random_matrix(&mut rng, d, d);
            let target = cconst / (n as f64).sqrt();
            let e = e_raw.scale(c(target / e_raw.spectral_norm().unwrap(), 0.0));
            let perturbed = a.add(&e).unwrap();
            let truncated = truncate_singular(&perturbed, target).unwrap();
            let diff = pseudo_inverse(&truncated)
                .unwrap()
                .sub(&a_pinv)
                .unwrap()
                .spectral_norm()
                .unwrap();
            let bound =
                8.0 * cconst * a_pinv_norm * a_pinv_norm * ((d as f64).sqrt() + 1.0) / (n as f64).sqrt();
            assert!(diff <= bound, "N={n}: {diff} > {bound}");
        }
    }

    #[test]
    fn stacked_rows_share_the_common_null_space() {
        // rows x_k^T M_k with common null space: the stack's null space matches
        let mut rng = ChaCha12Rng::seed_from_u64(44);
        let d = 5usize;
        let kill = 2usize; // common null space dimension
        let mut ms = Vec::new();
        for _ in 0..d {
            let b = random_matrix(&mut rng, d, d);
            let mut m = b;
            // zero the last `kill` columns: null space contains span(e_{d-kill}..e_{d-1})
            for r in 0..d {
                for ccol in d - kill..d {
                    m[(r, ccol)] = c(0.0, 0.0);
                }
            }
            ms.push(m);
        }
        let mut rows = Vec::new();
        for mk in &ms {
            let x: Vec<Complex64> = (0..d)
                .map(|_| c(rng.sample::<f64, _>(rand_distr::StandardNormal), 0.0))
                .collect();
            // x^T M_k as a row
            let row: Vec<Complex64> = (0..d)
                .map(|j| (0..d).map(|i| x[i] * mk[(i, j)]).sum())
                .collect();
            rows.push(row);
        }
        let stack = ComplexMatrix::from_rows(&rows).unwrap();
        let f = svd(&stack).unwrap();
        let rank = f.singular_values.iter().filter(|s| **s > 1e-10).count();
        assert_eq!(rank, d - kill);
        // the known null directions are annihilated
        for ccol in d - kill..d {
            let mut basis = vec![c(0.0, 0.0); d];
            basis[ccol] = c(1.0, 0.0);
            let image = stack.mul_vec(&basis).unwrap();
            let norm: f64 = image.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!(norm < 1e-10);
        }
    }

    #[test]
    fn match_eigenvalues_is_deterministic_and_greedy() {
        let est = [c(0.99, 0.0), c(0.0, 0.01), c(-0.5, 0.87)];
        let refs = [c(1.0, 0.0), c(-0.5, 0.866), c(0.0, 0.0)];
        let pairs = match_eigenvalues(&est, &refs);
        assert_eq!(pairs.len(), 3);
        // each reference claimed exactly once
        let mut seen = [false; 3];
        for (_, r) in &pairs {
            assert!(!seen[*r]);
            seen[*r] = true;
        }
        // nearest pairs win: 0.99 -> 1.0, -0.5+0.87i -> -0.5+0.866i, 0.01i -> 0
        assert!(pairs.contains(&(0, 0)));
        assert!(pairs.contains(&(2, 1)));
        assert!(pairs.contains(&(1, 2)));
    }
}
