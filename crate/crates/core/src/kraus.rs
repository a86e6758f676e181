//! The thermal-field quantum channel on the two-atom state: five Kraus
//! operators per Fock level, weighted by the thermal distribution.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::numkernel::{self, CMat};
use crate::propagator::{analytic_elements, ATOM_DIM};
use crate::thermal::FockTruncation;

/// Hermiticity tolerance accepted for density matrices.
pub const HERM_TOL: f64 = 1e-10;
/// Eigenvalue floor: matrices with eigenvalues below `-PSD_TOL` are rejected.
pub const PSD_TOL: f64 = 1e-10;
/// Trace tolerance for externally supplied states.
pub const TRACE_TOL: f64 = 1e-12;

/// A validated 4x4 two-atom density matrix in the basis
/// `{|ee>, |eg>, |ge>, |gg>}`. Hermitian and positive semidefinite within
/// tolerance; unit trace within `TRACE_TOL` for externally constructed
/// states, or within an explicit deficit bound for channel outputs (the
/// channel does not renormalize, so truncation tails show up as a trace
/// deficit rather than being silently hidden).
#[derive(Debug, Clone)]
pub struct AtomDensityMatrix {
    matrix: CMat,
}

impl AtomDensityMatrix {
    pub fn new(matrix: CMat) -> Result<Self> {
        Self::with_trace_tolerance(matrix, TRACE_TOL)
    }

    /// Validate with a caller-supplied trace window, for states carrying a
    /// known truncation deficit.
    pub fn with_trace_tolerance(matrix: CMat, trace_tol: f64) -> Result<Self> {
        if matrix.dim() != (ATOM_DIM, ATOM_DIM) {
            return Err(Error::InvalidDensityMatrix(format!(
                "expected 4x4, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = numkernel::hermiticity_defect(&matrix);
        if herm > HERM_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "Hermiticity defect {herm:.3e}"
            )));
        }
        let tr: C64 = matrix.diag().iter().sum();
        if (tr.re - 1.0).abs() > trace_tol || tr.im.abs() > trace_tol.max(1e-12) {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {tr} outside tolerance {trace_tol:.3e}"
            )));
        }
        let spec = numkernel::hermitian_eig(&matrix)?;
        if spec.eigenvalues[0] < -PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {:.3e}",
                spec.eigenvalues[0]
            )));
        }
        Ok(AtomDensityMatrix { matrix })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diag().iter().map(|z| z.re).sum()
    }

    /// How far below one the trace sits (clamped at zero).
    pub fn trace_deficit(&self) -> f64 {
        (1.0 - self.trace()).max(0.0)
    }

    /// Pure state on computational basis index `i`.
    pub fn pure_basis(i: usize) -> Self {
        let mut m = CMat::zeros((ATOM_DIM, ATOM_DIM));
        m[(i, i)] = C64::new(1.0, 0.0);
        AtomDensityMatrix { matrix: m }
    }

    /// Pure state from an (unnormalized) amplitude vector.
    pub fn pure_from_amplitudes(amps: &[C64; ATOM_DIM]) -> Self {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let mut m = CMat::zeros((ATOM_DIM, ATOM_DIM));
        for i in 0..ATOM_DIM {
            for j in 0..ATOM_DIM {
                m[(i, j)] = amps[i] * amps[j].conj() / (norm * norm);
            }
        }
        AtomDensityMatrix { matrix: m }
    }

    /// Exchange the two atoms (swap `|eg>` and `|ge>` indices).
    pub fn swapped(&self) -> Self {
        let perm = [0usize, 2, 1, 3];
        let mut m = CMat::zeros((ATOM_DIM, ATOM_DIM));
        for i in 0..ATOM_DIM {
            for j in 0..ATOM_DIM {
                m[(i, j)] = self.matrix[(perm[i], perm[j])];
            }
        }
        AtomDensityMatrix { matrix: m }
    }
}

/// The five Kraus operators at Fock level `n`.
///
/// `K1` preserves the field energy, `K2`/`K4` absorb one/two photons,
/// `K3`/`K5` emit one/two. The one-photon operators act through the
/// symmetric state `|s> = (|eg> + |ge>)/sqrt(2)`; every operator
/// annihilates the antisymmetric state, which is dark.
#[derive(Debug, Clone)]
pub struct KrausSet {
    pub n: usize,
    pub operators: [CMat; 5],
}

fn symmetric_ket() -> [C64; ATOM_DIM] {
    let inv = C64::new(1.0 / 2f64.sqrt(), 0.0);
    [C64::new(0.0, 0.0), inv, inv, C64::new(0.0, 0.0)]
}

fn outer(ket: &[C64; ATOM_DIM], bra: &[C64; ATOM_DIM], scale: C64) -> CMat {
    let mut m = CMat::zeros((ATOM_DIM, ATOM_DIM));
    for i in 0..ATOM_DIM {
        for j in 0..ATOM_DIM {
            m[(i, j)] = scale * ket[i] * bra[j].conj();
        }
    }
    m
}

fn basis_ket(i: usize) -> [C64; ATOM_DIM] {
    let mut k = [C64::new(0.0, 0.0); ATOM_DIM];
    k[i] = C64::new(1.0, 0.0);
    k
}

/// Assemble the Kraus set at Fock level `n` from the closed-form propagator
/// elements.
pub fn build_kraus_set(n: usize, gamma: f64, t: f64) -> KrausSet {
    let e = analytic_elements(n, gamma, t);
    let s = symmetric_ket();
    let ee = basis_ket(0);
    let gg = basis_ket(3);
    let rt2 = C64::new(2f64.sqrt(), 0.0);

    let mut k1 = CMat::zeros((ATOM_DIM, ATOM_DIM));
    k1[(0, 0)] = e.u11;
    k1[(1, 1)] = e.u22;
    k1[(2, 2)] = e.u33;
    k1[(3, 3)] = e.u44;
    k1[(1, 2)] = e.u23;
    k1[(2, 1)] = e.u23;

    let k2 = outer(&ee, &s, rt2 * e.u12) + outer(&s, &gg, rt2 * e.u24);
    let k3 = outer(&s, &ee, rt2 * e.u21) + outer(&gg, &s, rt2 * e.u42);
    let k4 = outer(&ee, &gg, e.u14);
    let k5 = outer(&gg, &ee, e.u41);

    KrausSet {
        n,
        operators: [k1, k2, k3, k4, k5],
    }
}

/// Apply the thermal channel: `rho(t) = sum_{n<=N} sum_mu P_n K rho K^dag`.
///
/// The output trace is left unrenormalized; the deficit (bounded by the
/// truncation tail) is visible through [`AtomDensityMatrix::trace_deficit`].
pub fn apply_channel(
    rho0: &AtomDensityMatrix,
    trunc: &FockTruncation,
    gamma: f64,
    t: f64,
) -> Result<AtomDensityMatrix> {
    let mut out = CMat::zeros((ATOM_DIM, ATOM_DIM));
    for n in 0..=trunc.cutoff() {
        let p = trunc.weight(n);
        if p == 0.0 {
            continue;
        }
        let set = build_kraus_set(n, gamma, t);
        for k in &set.operators {
            let branch = k.dot(rho0.matrix()).dot(&numkernel::adjoint(k));
            out.zip_mut_with(&branch, |o, &b| *o += b * p);
        }
    }
    AtomDensityMatrix::with_trace_tolerance(out, 2.0 * trunc.tail_mass() + 1e-10)
}

/// Departure of the weighted completeness sum from the identity:
/// the largest-magnitude eigenvalue of
/// `sum_{n<=N, mu} P_n K^dag K - I`.
///
/// At `t = 0` only `K1 = I` survives, so the defect equals the truncation
/// tail mass exactly; at any time it stays within a small multiple of it.
pub fn completeness_defect(trunc: &FockTruncation, gamma: f64, t: f64) -> f64 {
    let mut sum = CMat::zeros((ATOM_DIM, ATOM_DIM));
    for n in 0..=trunc.cutoff() {
        let p = trunc.weight(n);
        if p == 0.0 {
            continue;
        }
        let set = build_kraus_set(n, gamma, t);
        for k in &set.operators {
            let gram = numkernel::adjoint(k).dot(k);
            sum.zip_mut_with(&gram, |s, &g| *s += g * p);
        }
    }
    for i in 0..ATOM_DIM {
        sum[(i, i)] -= C64::new(1.0, 0.0);
    }
    // The defect matrix is Hermitian; its spectral norm is the max |eig|.
    match numkernel::hermitian_eig(&sum) {
        Ok(spec) => spec
            .eigenvalues
            .iter()
            .map(|l| l.abs())
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::frobenius_norm;
    use crate::propagator::OraclePropagator;
    use crate::thermal::choose_truncation;

    fn antisymmetric_state() -> AtomDensityMatrix {
        let inv = C64::new(1.0 / 2f64.sqrt(), 0.0);
        AtomDensityMatrix::pure_from_amplitudes(&[
            C64::new(0.0, 0.0),
            inv,
            -inv,
            C64::new(0.0, 0.0),
        ])
    }

    #[test]
    fn identity_channel_at_t0() {
        let set = build_kraus_set(3, 1.0, 0.0);
        assert!(frobenius_norm(&(&set.operators[0] - &CMat::eye(ATOM_DIM))) < 1e-14);
        for k in &set.operators[1..] {
            assert!(frobenius_norm(k) < 1e-14);
        }
    }

    #[test]
    fn vacuum_has_no_absorption() {
        // No photon to absorb at n = 0.
        let set = build_kraus_set(0, 1.0, 1.3);
        assert!(frobenius_norm(&set.operators[1]) < 1e-15, "K2 nonzero");
        assert!(frobenius_norm(&set.operators[3]) < 1e-15, "K4 nonzero");
    }

    #[test]
    fn kraus_k3_matches_oracle_blocks() {
        // K3 at n=1 is built from <.,2|U|.,1> entries.
        let (gamma, t) = (1.0, 1.0);
        let oracle = OraclePropagator::new(6, gamma).unwrap();
        let block = oracle.block(2, 1, t);
        let set = build_kraus_set(1, gamma, t);
        let k3 = &set.operators[2];
        let inv = 1.0 / 2f64.sqrt();
        // <s,2|U|ee,1> = sqrt(2) U21 = k3[(s), ee] expressed on |s>.
        let s_ee = (block[(1, 0)] + block[(2, 0)]) * inv;
        let k3_s_ee = (k3[(1, 0)] + k3[(2, 0)]) * inv;
        assert!((s_ee - k3_s_ee).norm() < 1e-10);
        // <gg,2|U|s,1> = sqrt(2) U42.
        let gg_s = (block[(3, 1)] + block[(3, 2)]) * inv;
        let k3_gg_s = (k3[(3, 1)] + k3[(3, 2)]) * inv;
        assert!((gg_s - k3_gg_s).norm() < 1e-10);
    }

    #[test]
    fn kraus_operators_kill_dark_state() {
        let a = antisymmetric_state();
        for n in 0..4 {
            let set = build_kraus_set(n, 1.0, 0.9);
            for (mu, k) in set.operators.iter().enumerate() {
                let mapped = k.dot(a.matrix()).dot(&numkernel::adjoint(k));
                if mu == 0 {
                    // K1 preserves the antisymmetric ray.
                    let d = frobenius_norm(&(&mapped - a.matrix()));
                    assert!(d < 1e-12, "K1 moves |a> at n={n}");
                } else {
                    assert!(frobenius_norm(&mapped) < 1e-24, "K{} acts on |a>", mu + 1);
                }
            }
        }
    }

    #[test]
    fn channel_identity_at_t0() {
        let trunc = choose_truncation(1.0, 1e-12).unwrap();
        let rho = AtomDensityMatrix::pure_from_amplitudes(&[
            C64::new(0.5, 0.0),
            C64::new(0.5, 0.0),
            C64::new(0.0, 0.5),
            C64::new(-0.5, 0.0),
        ]);
        let out = apply_channel(&rho, &trunc, 1.0, 0.0).unwrap();
        let scale = 1.0 - trunc.tail_mass();
        let expect = rho.matrix().mapv(|z| z * scale);
        assert!(frobenius_norm(&(out.matrix() - &expect)) < 1e-13);
    }

    #[test]
    fn dark_state_is_invariant() {
        let a = antisymmetric_state();
        for &nbar in &[0.1, 1.0, 10.0] {
            let trunc = choose_truncation(nbar, 1e-12).unwrap();
            for &t in &[0.5, 2.0, 7.5, 20.0] {
                let out = apply_channel(&a, &trunc, 1.0, t).unwrap();
                let scale = 1.0 - trunc.tail_mass();
                let expect = a.matrix().mapv(|z| z * scale);
                assert!(
                    frobenius_norm(&(out.matrix() - &expect)) <= 1e-10,
                    "nbar={nbar} t={t}"
                );
            }
        }
    }

    #[test]
    fn channel_matches_traced_joint_evolution() {
        // |ee>, nbar = 1, gamma t = 2 against the partial trace of the
        // jointly evolved state.
        let (gamma, t, nbar) = (1.0, 2.0, 1.0);
        let trunc = choose_truncation(nbar, 1e-12).unwrap();
        let rho0 = AtomDensityMatrix::pure_basis(0);
        let channel = apply_channel(&rho0, &trunc, gamma, t).unwrap();

        let field_dim = trunc.field_dim();
        let oracle = OraclePropagator::new(field_dim, gamma).unwrap();
        let u = oracle.unitary(t);
        let mut rho_e = CMat::zeros((field_dim, field_dim));
        for n in 0..=trunc.cutoff() {
            rho_e[(n, n)] = C64::new(trunc.weight(n), 0.0);
        }
        let joint0 = numkernel::kron(&rho_e, rho0.matrix());
        let joint_t = u.dot(&joint0).dot(&numkernel::adjoint(&u));
        let traced = numkernel::partial_trace(&joint_t, &[field_dim, ATOM_DIM], &[1]).unwrap();
        let d = frobenius_norm(&(channel.matrix() - &traced));
        assert!(d <= 1e-10, "channel/oracle distance {d}");
    }

    #[test]
    fn completeness_defect_at_t0_equals_tail() {
        let trunc = choose_truncation(1.0, 1e-6).unwrap();
        let defect = completeness_defect(&trunc, 1.0, 0.0);
        assert!((defect - trunc.tail_mass()).abs() < 1e-15);
    }

    #[test]
    fn completeness_defect_thermal() {
        let trunc = choose_truncation(1.0, 1e-12).unwrap();
        for &t in &[0.5, 5.0, 20.0] {
            assert!(completeness_defect(&trunc, 1.0, t) <= 1e-11);
        }
    }

    #[test]
    fn completeness_defect_vacuum() {
        let trunc = choose_truncation(0.0, 1e-12).unwrap();
        for &t in &[0.0, 1.0, 8.0, 20.0] {
            assert!(completeness_defect(&trunc, 1.0, t) <= 1e-14);
        }
    }

    #[test]
    fn channel_commutes_with_atom_swap() {
        let trunc = choose_truncation(0.7, 1e-12).unwrap();
        let rho = AtomDensityMatrix::pure_from_amplitudes(&[
            C64::new(0.3, 0.1),
            C64::new(0.7, 0.0),
            C64::new(0.1, -0.4),
            C64::new(0.2, 0.2),
        ]);
        let swapped_first = apply_channel(&rho.swapped(), &trunc, 1.0, 1.7).unwrap();
        let swapped_last = apply_channel(&rho, &trunc, 1.0, 1.7).unwrap().swapped();
        let d = frobenius_norm(&(swapped_first.matrix() - swapped_last.matrix()));
        assert!(d < 1e-12);
    }

    #[test]
    fn each_branch_is_psd_on_pure_input() {
        // Each Kraus branch maps a pure state to an unnormalized pure state.
        let rho = AtomDensityMatrix::pure_from_amplitudes(&[
            C64::new(0.6, 0.0),
            C64::new(0.0, 0.4),
            C64::new(0.4, 0.0),
            C64::new(0.2, -0.2),
        ]);
        for n in 0..3 {
            let set = build_kraus_set(n, 1.0, 1.1);
            for k in &set.operators {
                let branch = k.dot(rho.matrix()).dot(&numkernel::adjoint(k));
                let spec = numkernel::hermitian_eig(&branch).unwrap();
                assert!(spec.eigenvalues[0] >= -1e-12);
                // Rank <= 1: second-largest eigenvalue vanishes.
                assert!(spec.eigenvalues[2].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn invalid_density_matrices_rejected() {
        // Non-Hermitian.
        let mut m = CMat::eye(ATOM_DIM).mapv(|z| z * 0.25);
        m[(0, 1)] = C64::new(0.3, 0.0);
        assert!(AtomDensityMatrix::new(m).is_err());
        // Wrong trace.
        let m = CMat::eye(ATOM_DIM);
        assert!(AtomDensityMatrix::new(m).is_err());
        // Negative eigenvalue.
        let mut m = CMat::zeros((ATOM_DIM, ATOM_DIM));
        m[(0, 0)] = C64::new(1.5, 0.0);
        m[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(AtomDensityMatrix::new(m).is_err());
    }
}
