//! Resonant evolution of two identical two-level atoms coupled to one field
//! mode, in the rotating-wave approximation with equal couplings.
//!
//! Two independent routes are provided:
//!
//! * [`analytic_elements`] evaluates the closed-form matrix elements
//!   `U_ij(n -> m)` of the evolution operator between Fock levels, obtained
//!   by applying the ladder operators of each operator-valued entry onto the
//!   ket and evaluating operator functions of the number operator at the
//!   intermediate Fock level.
//! * [`OraclePropagator`] numerically exponentiates the full joint
//!   Hamiltonian and serves as the brute-force reference that the analytic
//!   elements are validated against.
//!
//! Throughout, `hbar = 1`, the atomic basis is ordered
//! `{|ee>, |eg>, |ge>, |gg>}` and joint indices are `4*n + atomic`.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numkernel::{self, CMat, CVec, HermitianSpectrum};

/// Atomic basis size (two qubits).
pub const ATOM_DIM: usize = 4;

/// Rabi frequency of the symmetric two-atom manifold at photon number `n`:
/// `omega = sqrt(2 gamma^2 (2n + 1))`.
#[derive(Debug, Clone, Copy)]
pub struct RabiFrequency {
    pub n: usize,
    pub gamma: f64,
    pub omega: f64,
}

/// `Omega_n = sqrt(2 gamma^2 (2n + 1))`.
pub fn rabi(n: usize, gamma: f64) -> Result<RabiFrequency> {
    if gamma <= 0.0 || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "coupling rate must be positive, got {gamma}"
        )));
    }
    Ok(RabiFrequency {
        n,
        gamma,
        omega: gamma * (2.0 * (2.0 * n as f64 + 1.0)).sqrt(),
    })
}

/// Closed-form scalar matrix elements of the evolution operator at Fock
/// input level `n`. Element `u_ij` is the amplitude for the atomic
/// transition `j -> i` (1-based labels as in the operator matrix), with the
/// field level shift fixed by photon-number conservation:
///
/// * `u11, u22, u23, u33, u44` keep the field at `n`;
/// * `u12, u24` absorb one photon (`n -> n-1`);
/// * `u21, u42` emit one photon (`n -> n+1`);
/// * `u14` absorbs two (`n -> n-2`), `u41` emits two (`n -> n+2`).
///
/// Elements whose final level would be negative are zero.
#[derive(Debug, Clone, Copy)]
pub struct PropagatorElements {
    pub n: usize,
    pub gamma_t: f64,
    pub u11: C64,
    pub u22: C64,
    pub u23: C64,
    pub u33: C64,
    pub u44: C64,
    pub u12: C64,
    pub u24: C64,
    pub u21: C64,
    pub u42: C64,
    pub u14: C64,
    pub u41: C64,
}

/// Evaluate the closed forms at Fock level `n` and time `t`.
///
/// All expressions reduce to functions of the dimensionless product
/// `gamma * t` through the Rabi angles `Omega_k t`.
pub fn analytic_elements(n: usize, gamma: f64, t: f64) -> PropagatorElements {
    let nf = n as f64;
    let re = |x: f64| C64::new(x, 0.0);
    let im = |x: f64| C64::new(0.0, x);

    // Rabi angles at the field levels reached by the ladder operators.
    let theta = |k: f64| gamma * t * (2.0 * (2.0 * k + 1.0)).sqrt();
    let th_n = theta(nf);
    let th_up = theta(nf + 1.0);

    // (cos x - 1) written as -2 sin^2(x/2) to avoid cancellation.
    let cos_m1 = |x: f64| -2.0 * (0.5 * x).sin().powi(2);
    // sin(Omega_k t)/ (Omega_k / gamma): the gamma in the prefactor cancels
    // against 1/Omega, leaving sin(theta)/sqrt(2(2k+1)).
    let sin_over = |th: f64, k: f64| th.sin() / (2.0 * (2.0 * k + 1.0)).sqrt();
    // 2 gamma^2 (cos(Omega_k t) - 1) / Omega_k^2 = (cos(theta_k) - 1)/(2k+1).
    let cos_over = |th: f64, k: f64| cos_m1(th) / (2.0 * k + 1.0);

    let u11 = re(1.0 + (nf + 1.0) * cos_over(th_up, nf + 1.0));
    let u22 = re((0.5 * th_n).cos().powi(2));
    let u23 = re(-(0.5 * th_n).sin().powi(2));
    let u33 = u22;
    let u44 = if n == 0 {
        re(1.0)
    } else {
        let th_dn = theta(nf - 1.0);
        re(1.0 + nf * cos_over(th_dn, nf - 1.0))
    };

    let u12 = if n == 0 {
        re(0.0)
    } else {
        im(-(nf.sqrt()) * sin_over(th_n, nf))
    };
    let u24 = if n == 0 {
        re(0.0)
    } else {
        let th_dn = theta(nf - 1.0);
        im(-(nf.sqrt()) * sin_over(th_dn, nf - 1.0))
    };
    let u21 = im(-((nf + 1.0).sqrt()) * sin_over(th_up, nf + 1.0));
    let u42 = im(-((nf + 1.0).sqrt()) * sin_over(th_n, nf));

    let u14 = if n < 2 {
        re(0.0)
    } else {
        let th_dn = theta(nf - 1.0);
        re((nf * (nf - 1.0)).sqrt() * cos_over(th_dn, nf - 1.0))
    };
    let u41 = re(((nf + 1.0) * (nf + 2.0)).sqrt() * cos_over(th_up, nf + 1.0));

    PropagatorElements {
        n,
        gamma_t: gamma * t,
        u11,
        u22,
        u23,
        u33,
        u44,
        u12,
        u24,
        u21,
        u42,
        u14,
        u41,
    }
}

/// Interaction Hamiltonian `gamma * sum_i (a sigma_i^+ + a^dag sigma_i^-)`
/// on `field_dim` Fock levels, joint index `4*n + atomic`.
pub fn build_hamiltonian(field_dim: usize, gamma: f64) -> Result<CMat> {
    if field_dim < 2 {
        return Err(Error::InvalidParameter(format!(
            "field dimension must be at least 2, got {field_dim}"
        )));
    }
    if gamma <= 0.0 || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "coupling rate must be positive, got {gamma}"
        )));
    }
    let dim = ATOM_DIM * field_dim;
    let mut h = CMat::zeros((dim, dim));
    // sigma_i^+ raises atom i: atom 1 maps |ge>->|ee>, |gg>->|eg>;
    // atom 2 maps |eg>->|ee>, |gg>->|ge>.
    let raises: [(usize, usize); 4] = [(2, 0), (3, 1), (1, 0), (3, 2)];
    for n in 1..field_dim {
        let amp = C64::new(gamma * (n as f64).sqrt(), 0.0);
        for &(from, to) in &raises {
            // a sigma^+ : |n, from> -> sqrt(n) |n-1, to>, plus h.c.
            let col = ATOM_DIM * n + from;
            let row = ATOM_DIM * (n - 1) + to;
            h[(row, col)] += amp;
            h[(col, row)] += amp;
        }
    }
    Ok(h)
}

/// Total excitation operator `a^dag a + sum_i |e>_i<e|` on the joint space.
pub fn excitation_operator(field_dim: usize) -> CMat {
    let dim = ATOM_DIM * field_dim;
    let mut op = CMat::zeros((dim, dim));
    for n in 0..field_dim {
        for j in 0..ATOM_DIM {
            // Atomic excitation count: |ee>=2, |eg>=|ge>=1, |gg>=0.
            let atoms = match j {
                0 => 2,
                1 | 2 => 1,
                _ => 0,
            };
            let idx = ATOM_DIM * n + j;
            op[(idx, idx)] = C64::new((n + atoms) as f64, 0.0);
        }
    }
    op
}

/// Numerically exponentiated joint evolution operator.
#[derive(Debug, Clone)]
pub struct JointUnitary {
    pub field_dim: usize,
    pub matrix: CMat,
}

/// `exp(-i H t)` on the full joint space, via the spectral route.
pub fn joint_unitary_oracle(field_dim: usize, gamma: f64, t: f64) -> Result<JointUnitary> {
    let h = build_hamiltonian(field_dim, gamma)?;
    Ok(JointUnitary {
        field_dim,
        matrix: numkernel::expm_skew(&h, t)?,
    })
}

/// Cached spectral decomposition of the joint Hamiltonian, for evaluating
/// the evolution operator (or pieces of it) at many times without repeating
/// the eigensolve. Immutable after construction; shareable across workers.
pub struct OraclePropagator {
    field_dim: usize,
    gamma: f64,
    spectrum: HermitianSpectrum,
}

impl OraclePropagator {
    pub fn new(field_dim: usize, gamma: f64) -> Result<Self> {
        let h = build_hamiltonian(field_dim, gamma)?;
        Ok(OraclePropagator {
            field_dim,
            gamma,
            spectrum: numkernel::hermitian_eig(&h)?,
        })
    }

    pub fn field_dim(&self) -> usize {
        self.field_dim
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Eigenvalues of the joint Hamiltonian, ascending.
    pub fn spectrum_eigenvalues(&self) -> &Array1<f64> {
        &self.spectrum.eigenvalues
    }

    /// Orthonormal eigenvectors of the joint Hamiltonian, as columns.
    pub fn spectrum_eigenvectors(&self) -> &CMat {
        &self.spectrum.eigenvectors
    }

    fn phases(&self, t: f64) -> CVec {
        self.spectrum
            .eigenvalues
            .mapv(|l| (C64::new(0.0, -1.0) * l * t).exp())
    }

    /// Full `U(t)`.
    pub fn unitary(&self, t: f64) -> CMat {
        numkernel::unitary_from_spectrum(&self.spectrum, t)
    }

    /// The 4x4 field block `<m| U(t) |n>` straight from the spectral form,
    /// without materializing the full matrix.
    pub fn block(&self, m: usize, n: usize, t: f64) -> CMat {
        let phases = self.phases(t);
        let v = &self.spectrum.eigenvectors;
        let rows = v.slice(s![ATOM_DIM * m..ATOM_DIM * (m + 1), ..]);
        let cols = v.slice(s![ATOM_DIM * n..ATOM_DIM * (n + 1), ..]);
        let scaled = &rows * &phases.view().insert_axis(Axis(0));
        let cols_dag = cols.mapv(|z| z.conj()).reversed_axes();
        scaled.dot(&cols_dag)
    }

    /// All blocks `<m| U(t) |n>` for `m = n + offset`, `offset` in
    /// `-band..=band`, indexed as `blocks[n][offset + band]`. Blocks falling
    /// outside the space are absent (`None`). One phase evaluation is shared
    /// across the whole band.
    pub fn banded_blocks(&self, t: f64, band: usize, n_max: usize) -> Vec<Vec<Option<CMat>>> {
        let phases = self.phases(t);
        let v = &self.spectrum.eigenvectors;
        let width = 2 * band + 1;
        let mut out = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let cols = v.slice(s![ATOM_DIM * n..ATOM_DIM * (n + 1), ..]);
            let cols_dag = cols.mapv(|z| z.conj()).reversed_axes();
            let mut row = Vec::with_capacity(width);
            for k in 0..width {
                let m = n as isize + k as isize - band as isize;
                if m < 0 || m as usize >= self.field_dim {
                    row.push(None);
                    continue;
                }
                let m = m as usize;
                let rows = v.slice(s![ATOM_DIM * m..ATOM_DIM * (m + 1), ..]);
                let scaled = &rows * &phases.view().insert_axis(Axis(0));
                row.push(Some(scaled.dot(&cols_dag)));
            }
            out.push(row);
        }
        out
    }

    /// Evolve a pure joint state given as a (field level, atomic amplitude)
    /// expansion: `psi = |fock> (x) sum_j amps[j] |j>`.
    pub fn evolve_product(&self, fock: usize, amps: &[C64; ATOM_DIM], t: f64) -> CVec {
        let v = &self.spectrum.eigenvectors;
        let dim = v.nrows();
        // w = V^dag psi, assembled from the relevant rows of V.
        let mut w = CVec::zeros(dim);
        for (j, &aj) in amps.iter().enumerate() {
            if aj.norm_sqr() == 0.0 {
                continue;
            }
            let row = v.slice(s![ATOM_DIM * fock + j, ..]);
            ndarray::Zip::from(&mut w).and(&row).for_each(|w, &r| {
                *w += r.conj() * aj;
            });
        }
        let phases = self.phases(t);
        w.zip_mut_with(&phases, |w, &p| *w *= p);
        v.dot(&w)
    }
}

/// Worst absolute disagreement between the closed-form elements for input
/// level `n` and the corresponding entries of a full joint unitary.
/// Elements whose final level falls outside the space are compared
/// against zero.
pub fn element_oracle_defect(
    u: &CMat,
    field_dim: usize,
    n: usize,
    e: &PropagatorElements,
) -> f64 {
    let entry = |m: isize, row_atom: usize, col_atom: usize| -> C64 {
        if m < 0 || m as usize >= field_dim {
            return C64::new(0.0, 0.0);
        }
        u[(ATOM_DIM * m as usize + row_atom, ATOM_DIM * n + col_atom)]
    };
    let ni = n as isize;
    [
        (entry(ni, 0, 0), e.u11),
        (entry(ni, 1, 1), e.u22),
        (entry(ni, 1, 2), e.u23),
        (entry(ni, 2, 2), e.u33),
        (entry(ni, 3, 3), e.u44),
        (entry(ni - 1, 0, 1), e.u12),
        (entry(ni - 1, 1, 3), e.u24),
        (entry(ni + 1, 1, 0), e.u21),
        (entry(ni + 1, 3, 1), e.u42),
        (entry(ni - 2, 0, 3), e.u14),
        (entry(ni + 2, 3, 0), e.u41),
    ]
    .iter()
    .map(|(got, want)| (got - want).norm())
    .fold(0.0, f64::max)
}
