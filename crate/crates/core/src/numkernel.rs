//! Minimal dense complex linear-algebra kernel.
//!
//! Everything here operates on row-major [`CMat`] values. Eigendecomposition
//! is delegated to LAPACK (zheev via `ndarray-linalg`); the rest are thin
//! dense routines sized for Hilbert spaces of at most a few thousand
//! dimensions, so no sparse formats are used.

use ndarray::prelude::*;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense complex matrix, row-major.
pub type CMat = Array2<C64>;
/// Dense complex vector.
pub type CVec = Array1<C64>;

/// Relative tolerance accepted for Hermiticity checks before eigensolving.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are real and ascending; `eigenvectors` holds the
/// corresponding orthonormal eigenvectors as columns, so
/// `A = V diag(eigenvalues) V^dag`.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    pub eigenvalues: Array1<f64>,
    pub eigenvectors: CMat,
}

/// Conjugate transpose.
pub fn adjoint(a: &CMat) -> CMat {
    let mut out = a.t().to_owned();
    out.mapv_inplace(|z| z.conj());
    out
}

/// Frobenius norm.
pub fn frobenius_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `|| A - A^dag ||_F`, the departure from Hermiticity.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    frobenius_norm(&(a - &adjoint(a)))
}

/// `|| U^dag U - I ||_F`, the departure from unitarity.
pub fn unitarity_defect(u: &CMat) -> f64 {
    let n = u.nrows();
    let mut g = adjoint(u).dot(u);
    for i in 0..n {
        g[(i, i)] -= C64::new(1.0, 0.0);
    }
    frobenius_norm(&g)
}

fn check_square(a: &CMat) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(A + A^dag)/2` to absorb round-off before
/// the solve; inputs whose asymmetry exceeds `1e-10 * max(1, ||A||_F)` are
/// rejected rather than silently symmetrized.
pub fn hermitian_eig(a: &CMat) -> Result<HermitianSpectrum> {
    check_square(a)?;
    let scale = frobenius_norm(a).max(1.0);
    let defect = hermiticity_defect(a);
    let tol = HERMITICITY_TOL * scale;
    if defect > tol {
        return Err(Error::NotHermitian { defect, tol });
    }
    let sym = (a + &adjoint(a)).mapv(|z| z * 0.5);
    let (vals, vecs) = sym.eigh(UPLO::Lower)?;
    // LAPACK reads the row-major buffer column-major and so decomposes
    // conj(A); conjugating the eigenvectors restores the decomposition of A
    // itself. The eigenvalues are unaffected.
    let vecs = vecs.mapv(|z| z.conj());
    Ok(HermitianSpectrum {
        eigenvalues: vals,
        eigenvectors: vecs,
    })
}

/// `exp(-i H t)` for Hermitian `H`, via the spectral decomposition.
///
/// The spectral route keeps the result exactly unitary up to round-off,
/// which scaling-and-squaring does not guarantee.
pub fn expm_skew(h: &CMat, t: f64) -> Result<CMat> {
    let spec = hermitian_eig(h)?;
    Ok(unitary_from_spectrum(&spec, t))
}

/// `V diag(exp(-i lambda t)) V^dag` for a precomputed spectrum.
pub fn unitary_from_spectrum(spec: &HermitianSpectrum, t: f64) -> CMat {
    let phases: CVec = spec
        .eigenvalues
        .mapv(|l| (C64::new(0.0, -1.0) * l * t).exp());
    // Scale columns of V by the phases, then multiply by V^dag.
    let scaled = &spec.eigenvectors * &phases.view().insert_axis(Axis(0));
    scaled.dot(&adjoint(&spec.eigenvectors))
}

/// Kronecker product `A (x) B`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = CMat::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            let mut block = out.slice_mut(s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
            block.assign(&b.mapv(|z| z * aij));
        }
    }
    out
}

fn check_dims(rho: &CMat, dims: &[usize]) -> Result<usize> {
    let n = check_square(rho)?;
    let prod: usize = dims.iter().product();
    if prod != n || dims.iter().any(|&d| d == 0) {
        return Err(Error::DimensionMismatch(format!(
            "factors {:?} do not multiply to matrix size {}",
            dims, n
        )));
    }
    Ok(n)
}

/// Decompose a flat index into per-factor indices (row-major convention:
/// the first factor varies slowest).
fn multi_index(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

fn flat_index(multi: &[usize], dims: &[usize]) -> usize {
    let mut idx = 0;
    for (k, &d) in dims.iter().enumerate() {
        idx = idx * d + multi[k];
    }
    idx
}

/// Partial trace over the factors *not* listed in `keep`.
///
/// `dims` factorizes the Hilbert space (first factor slowest); `keep` lists
/// the factor positions to retain, in ascending order. Preserves the trace.
pub fn partial_trace(rho: &CMat, dims: &[usize], keep: &[usize]) -> Result<CMat> {
    let n = check_dims(rho, dims)?;
    if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "keep list {:?} invalid for {} factors",
            keep,
            dims.len()
        )));
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let mut out = CMat::zeros((out_dim, out_dim));
    for i in 0..n {
        let mi = multi_index(i, dims);
        let row_kept: Vec<usize> = keep.iter().map(|&k| mi[k]).collect();
        let row_out = flat_index(&row_kept, &kept_dims);
        for j in 0..n {
            let mj = multi_index(j, dims);
            // Traced factors must coincide on row and column.
            if (0..dims.len())
                .filter(|k| !keep.contains(k))
                .any(|k| mi[k] != mj[k])
            {
                continue;
            }
            let col_kept: Vec<usize> = keep.iter().map(|&k| mj[k]).collect();
            out[(row_out, flat_index(&col_kept, &kept_dims))] += rho[(i, j)];
        }
    }
    Ok(out)
}

/// Transpose the indices of the single factor `which`, leaving the others
/// untouched. An involution that preserves trace and Hermiticity.
pub fn partial_transpose(rho: &CMat, dims: &[usize], which: usize) -> Result<CMat> {
    let n = check_dims(rho, dims)?;
    if which >= dims.len() {
        return Err(Error::DimensionMismatch(format!(
            "factor {} out of range for {} factors",
            which,
            dims.len()
        )));
    }
    let mut out = CMat::zeros((n, n));
    for i in 0..n {
        let mi = multi_index(i, dims);
        for j in 0..n {
            let mut mj = multi_index(j, dims);
            let mut mi2 = mi.clone();
            mi2[which] = mj[which];
            mj[which] = mi[which];
            out[(flat_index(&mi2, dims), flat_index(&mj, dims))] = rho[(i, j)];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pauli_x() -> CMat {
        array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
    }

    #[test]
    fn eig_identity() {
        let spec = hermitian_eig(&CMat::eye(2)).unwrap();
        assert!((spec.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((spec.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_diagonal_is_sorted_ascending() {
        let a = array![[c(3.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]];
        let spec = hermitian_eig(&a).unwrap();
        assert!((spec.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((spec.eigenvalues[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eig_pauli_x() {
        // Characteristic polynomial l^2 - 1 = 0 by hand.
        let spec = hermitian_eig(&pauli_x()).unwrap();
        assert!((spec.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((spec.eigenvalues[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eig_reconstructs() {
        let a = array![
            [c(2.0, 0.0), c(0.5, 0.25), c(0.0, -1.0)],
            [c(0.5, -0.25), c(-1.0, 0.0), c(0.75, 0.0)],
            [c(0.0, 1.0), c(0.75, 0.0), c(0.25, 0.0)]
        ];
        let spec = hermitian_eig(&a).unwrap();
        let lam = spec.eigenvalues.mapv(|l| c(l, 0.0));
        let recon = (&spec.eigenvectors * &lam.view().insert_axis(Axis(0)))
            .dot(&adjoint(&spec.eigenvectors));
        assert!(frobenius_norm(&(&recon - &a)) <= 1e-10 * frobenius_norm(&a).max(1.0));
        assert!(unitarity_defect(&spec.eigenvectors) <= 1e-10);
    }

    #[test]
    fn eig_rejects_non_square_and_non_hermitian() {
        let rect = CMat::zeros((2, 3));
        assert!(matches!(
            hermitian_eig(&rect),
            Err(Error::NotSquare { .. })
        ));
        let mut skew = CMat::zeros((2, 2));
        skew[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            hermitian_eig(&skew),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn expm_zero_generator() {
        let u = expm_skew(&CMat::zeros((3, 3)), 1.7).unwrap();
        assert!(frobenius_norm(&(&u - &CMat::eye(3))) < 1e-14);
    }

    #[test]
    fn expm_pauli_x_pi() {
        // exp(-i pi sigma_x) = -I by spectral calculus.
        let u = expm_skew(&pauli_x(), std::f64::consts::PI).unwrap();
        let minus_i = CMat::eye(2).mapv(|z| -z);
        assert!(frobenius_norm(&(&u - &minus_i)) < 1e-12);
    }

    #[test]
    fn expm_is_unitary() {
        let a = array![
            [c(1.0, 0.0), c(0.3, 0.4)],
            [c(0.3, -0.4), c(-0.7, 0.0)]
        ];
        for &t in &[0.0, 0.1, 2.5, 17.0] {
            let u = expm_skew(&a, t).unwrap();
            assert!(unitarity_defect(&u) <= 1e-10);
        }
    }

    #[test]
    fn partial_trace_of_product() {
        let a = array![
            [c(1.0, 0.0), c(0.2, 0.1)],
            [c(0.2, -0.1), c(0.5, 0.0)]
        ];
        let b = array![
            [c(0.7, 0.0), c(0.0, 0.3)],
            [c(0.0, -0.3), c(0.9, 0.0)]
        ];
        let prod = kron(&a, &b);
        let tr_b = b[(0, 0)] + b[(1, 1)];
        let reduced = partial_trace(&prod, &[2, 2], &[0]).unwrap();
        let expect = a.mapv(|z| z * tr_b);
        for ((i, j), v) in expect.indexed_iter() {
            assert!((reduced[(i, j)] - v).norm() < 1e-12);
        }
        // And the complementary trace.
        let reduced_b = partial_trace(&prod, &[2, 2], &[1]).unwrap();
        let tr_a = a[(0, 0)] + a[(1, 1)];
        for ((i, j), v) in b.indexed_iter() {
            assert!((reduced_b[(i, j)] - v * tr_a).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_transpose_involution_and_bell() {
        // |Phi+><Phi+| partial transpose has eigenvalue -1/2 (4x4 eigensolve
        // of the hand-assembled matrix).
        let h = 0.5;
        let mut bell = CMat::zeros((4, 4));
        bell[(0, 0)] = c(h, 0.0);
        bell[(0, 3)] = c(h, 0.0);
        bell[(3, 0)] = c(h, 0.0);
        bell[(3, 3)] = c(h, 0.0);
        let pt = partial_transpose(&bell, &[2, 2], 1).unwrap();
        let back = partial_transpose(&pt, &[2, 2], 1).unwrap();
        assert!(frobenius_norm(&(&back - &bell)) < 1e-14);
        let spec = hermitian_eig(&pt).unwrap();
        assert!((spec.eigenvalues[0] + 0.5).abs() < 1e-12);
        // Trace preserved.
        let tr: C64 = pt.diag().iter().sum();
        assert!((tr.re - 1.0).abs() < 1e-12 && tr.im.abs() < 1e-14);
    }

    #[test]
    fn dimension_errors() {
        let m = CMat::zeros((4, 4));
        assert!(partial_trace(&m, &[3, 2], &[0]).is_err());
        assert!(partial_transpose(&m, &[2, 2], 2).is_err());
    }
}
