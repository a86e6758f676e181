//! Entanglement quantities for the two-atom state: negativity from the
//! partial transpose, closed-form partial-transpose spectra for the
//! diagonal state family, the Fock-state criterion for atoms starting in
//! the ground state, and two-qubit entanglement of formation.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::kraus::AtomDensityMatrix;
use crate::numkernel::{self, CMat};
use crate::propagator::ATOM_DIM;

/// Partial-transpose eigenvalues above `-NEG_EIG_TOL` count as nonnegative.
pub const NEG_EIG_TOL: f64 = 1e-11;
/// Negativity at or below this threshold is reported as separable.
pub const SEPARABLE_TOL: f64 = 1e-10;

/// Negativity of a two-qubit state: `-2` times the sum of the negative
/// partial-transpose eigenvalues. Zero exactly when the state is separable;
/// one for Bell states.
#[derive(Debug, Clone)]
pub struct NegativityResult {
    pub value: f64,
    pub negative_eigenvalues: Vec<f64>,
}

impl NegativityResult {
    pub fn is_separable(&self) -> bool {
        self.value <= SEPARABLE_TOL
    }
}

/// Negativity via partial transposition over the second atom.
pub fn negativity(rho: &AtomDensityMatrix) -> Result<NegativityResult> {
    let pt = numkernel::partial_transpose(rho.matrix(), &[2, 2], 1)?;
    let spec = numkernel::hermitian_eig(&pt)?;
    let negative_eigenvalues: Vec<f64> = spec
        .eigenvalues
        .iter()
        .copied()
        .filter(|&l| l < -NEG_EIG_TOL)
        .collect();
    let value = -2.0 * negative_eigenvalues.iter().sum::<f64>();
    Ok(NegativityResult {
        value,
        negative_eigenvalues,
    })
}

/// Populations of a state in the `{|ee>, |s>, |a>, |gg>}` frame, extracted
/// as plain projections `<x|rho|x>`. For the states reached by the thermal
/// channel from diagonal inputs these four numbers determine the whole
/// matrix.
#[derive(Debug, Clone, Copy)]
pub struct DiagonalCoefficients {
    pub a_e: f64,
    pub a_s: f64,
    pub a_a: f64,
    pub a_g: f64,
}

impl DiagonalCoefficients {
    /// Project a simulated state onto the four populations.
    pub fn from_state(rho: &AtomDensityMatrix) -> Self {
        let m = rho.matrix();
        let mid_diag = m[(1, 1)].re + m[(2, 2)].re;
        let mid_cross = (m[(1, 2)] + m[(2, 1)]).re;
        DiagonalCoefficients {
            a_e: m[(0, 0)].re,
            a_s: 0.5 * (mid_diag + mid_cross),
            a_a: 0.5 * (mid_diag - mid_cross),
            a_g: m[(3, 3)].re,
        }
    }

    /// Rebuild the density matrix `a_e|ee><ee| + a_s|s><s| + a_a|a><a| +
    /// a_g|gg><gg|`, normalized to unit trace.
    pub fn assemble(&self) -> Result<AtomDensityMatrix> {
        for (name, v) in [
            ("a_e", self.a_e),
            ("a_s", self.a_s),
            ("a_a", self.a_a),
            ("a_g", self.a_g),
        ] {
            if v < -1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "coefficient {name} = {v} is negative"
                )));
            }
        }
        let total = self.a_e + self.a_s + self.a_a + self.a_g;
        if total <= 0.0 {
            return Err(Error::InvalidParameter(
                "coefficients sum to zero".into(),
            ));
        }
        let mut m = CMat::zeros((ATOM_DIM, ATOM_DIM));
        m[(0, 0)] = C64::new(self.a_e / total, 0.0);
        m[(3, 3)] = C64::new(self.a_g / total, 0.0);
        let mid = 0.5 * (self.a_s + self.a_a) / total;
        let cross = 0.5 * (self.a_s - self.a_a) / total;
        m[(1, 1)] = C64::new(mid, 0.0);
        m[(2, 2)] = C64::new(mid, 0.0);
        m[(1, 2)] = C64::new(cross, 0.0);
        m[(2, 1)] = C64::new(cross, 0.0);
        AtomDensityMatrix::new(m)
    }
}

/// Partial-transpose spectrum of the family
/// `a_e|ee><ee| + a_s|s><s| + a_g|gg><gg|` (the states reached from `|ee>`
/// or `|gg>`): a doubly degenerate `mu_o` plus the pair `mu_-`, `mu_+`.
#[derive(Debug, Clone, Copy)]
pub struct PtSpectrumEe {
    pub mu_o: f64,
    pub mu_minus: f64,
    pub mu_plus: f64,
}

impl PtSpectrumEe {
    pub fn eigenvalues(&self) -> [f64; 4] {
        [self.mu_o, self.mu_o, self.mu_minus, self.mu_plus]
    }

    /// Negative exactly when `a_s > 2 sqrt(a_e a_g)`.
    pub fn is_entangled(&self) -> bool {
        self.mu_minus < -NEG_EIG_TOL
    }
}

/// Closed-form partial-transpose eigenvalues for the diagonal family above
/// (the `a_a` coefficient must vanish; it does for evolution out of `|ee>`
/// or `|gg>`).
pub fn analytic_pt_eigenvalues_ee(coeffs: &DiagonalCoefficients) -> Result<PtSpectrumEe> {
    let (a_e, a_s, a_g) = (coeffs.a_e, coeffs.a_s, coeffs.a_g);
    let disc = (a_e - a_g).powi(2) + a_s.powi(2);
    if disc < 0.0 || !disc.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "invalid discriminant {disc} from coefficients {coeffs:?}"
        )));
    }
    let root = disc.sqrt();
    Ok(PtSpectrumEe {
        mu_o: 0.5 * a_s,
        mu_minus: 0.5 * (a_e + a_g - root),
        mu_plus: 0.5 * (a_e + a_g + root),
    })
}

/// Entanglement margin for atoms prepared in product thermal mixtures:
/// `(a_s - a_a) - 2 sqrt(a_e a_g)`. Positive exactly when the evolved state
/// is entangled (for the physically reached branch `a_s >= a_a`).
pub fn mixed_entanglement_condition(coeffs: &DiagonalCoefficients) -> Result<f64> {
    if coeffs.a_e < -1e-12 || coeffs.a_g < -1e-12 {
        return Err(Error::InvalidParameter(format!(
            "negative population: a_e={}, a_g={}",
            coeffs.a_e, coeffs.a_g
        )));
    }
    let product = (coeffs.a_e.max(0.0)) * (coeffs.a_g.max(0.0));
    Ok((coeffs.a_s - coeffs.a_a) - 2.0 * product.sqrt())
}

/// Two-photon/one-photon amplitude ratio entering the Fock-state
/// criterion; zero at `ell = 1` where the two-photon channel is absent.
fn fock_gg_coupling(ell: usize) -> f64 {
    if ell <= 1 {
        0.0
    } else {
        let lf = ell as f64;
        2.0 * (lf * (lf - 1.0)).sqrt() / (2.0 * lf - 1.0)
    }
}

/// Entanglement criterion for atoms starting in `|gg>` under a Fock-state
/// field `|ell>`, as a function of `c = cos(Omega_{ell-1} t)`:
///
/// `E_g = (1-c)/(2l-1) * [ l(1+c) - k |l(1+c) - 1| ]`,
/// `k = 2 sqrt(l(l-1))/(2l-1)`
///
/// which equals twice the gap `A_s - sqrt(A_e A_g)` of the evolved state.
/// Positive exactly when the atoms are entangled; identically zero for the
/// vacuum (`ell = 0`). The maximum over `c` is `1/ell`, at `c = -1 + 1/ell`.
pub fn fock_gg_criterion(ell: usize, c: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&c) {
        return Err(Error::InvalidParameter(format!(
            "cosine argument {c} outside [-1, 1]"
        )));
    }
    if ell == 0 {
        return Ok(0.0);
    }
    let lf = ell as f64;
    let x = lf * (1.0 + c);
    let k = fock_gg_coupling(ell);
    Ok((1.0 - c) / (2.0 * lf - 1.0) * (x - k * (x - 1.0).abs()))
}

/// Sign-change threshold `c_s`: the criterion is positive for `c > c_s`.
/// Equals `-1` at `ell = 1`; `~ -0.757` at `ell = 2`; decreases for larger
/// `ell`.
pub fn fock_gg_threshold(ell: usize) -> Result<f64> {
    if ell == 0 {
        return Err(Error::InvalidParameter(
            "threshold undefined for the vacuum".into(),
        ));
    }
    if ell == 1 {
        return Ok(-1.0);
    }
    let lf = ell as f64;
    let k = fock_gg_coupling(ell);
    // Solve l(1+c) = k (1 - l(1+c)) on the lower branch.
    Ok(-1.0 + k / (lf * (1.0 + k)))
}

/// Numerically locate the maximum of the criterion over `c` by piecewise
/// quadratic calculus. Returns `(argmax_c, max_value)`.
pub fn fock_gg_argmax(ell: usize) -> Result<(f64, f64)> {
    if ell == 0 {
        return Err(Error::InvalidParameter(
            "criterion vanishes identically for the vacuum".into(),
        ));
    }
    let lf = ell as f64;
    let k = fock_gg_coupling(ell);
    let breakpoint = -1.0 + 1.0 / lf;
    // On each side of the breakpoint, E = (1-c)(p + q c)/(2l-1).
    let mut candidates = vec![-1.0, breakpoint, 1.0];
    for (p, q, lo, hi) in [
        (lf * (1.0 + k) - k, lf * (1.0 + k), -1.0, breakpoint),
        (lf * (1.0 - k) + k, lf * (1.0 - k), breakpoint, 1.0),
    ] {
        if q.abs() > 0.0 {
            let vertex = (q - p) / (2.0 * q);
            if vertex > lo && vertex < hi {
                candidates.push(vertex);
            }
        }
    }
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for c in candidates {
        let e = fock_gg_criterion(ell, c)?;
        if e > best.1 {
            best = (c, e);
        }
    }
    Ok(best)
}

fn spin_flip(rho: &CMat) -> CMat {
    // (sigma_y (x) sigma_y) conj(rho) (sigma_y (x) sigma_y): the product of
    // Pauli-y factors reduces to the real antidiagonal (-1, 1, 1, -1).
    let sign = [-1.0, 1.0, 1.0, -1.0];
    let mut out = CMat::zeros((ATOM_DIM, ATOM_DIM));
    for i in 0..ATOM_DIM {
        for j in 0..ATOM_DIM {
            out[(i, j)] =
                C64::new(sign[i] * sign[j], 0.0) * rho[(3 - i, 3 - j)].conj();
        }
    }
    out
}

fn matrix_sqrt_psd(rho: &CMat) -> Result<CMat> {
    let spec = numkernel::hermitian_eig(rho)?;
    let roots: Array1<C64> = spec
        .eigenvalues
        .mapv(|l| C64::new(l.max(0.0).sqrt(), 0.0));
    let scaled = &spec.eigenvectors * &roots.view().insert_axis(Axis(0));
    Ok(scaled.dot(&numkernel::adjoint(&spec.eigenvectors)))
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence(rho: &CMat) -> Result<f64> {
    let valid = AtomDensityMatrix::with_trace_tolerance(rho.clone(), 1e-8)?;
    let rho = valid.matrix();
    let flipped = spin_flip(rho);
    // Eigenvalues of rho * rho~ equal those of the Hermitian
    // sqrt(rho) rho~ sqrt(rho).
    let root = matrix_sqrt_psd(rho)?;
    let herm = root.dot(&flipped).dot(&root);
    let spec = numkernel::hermitian_eig(&herm)?;
    let mut lambdas: Vec<f64> = spec
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// Entanglement of formation of a two-qubit density matrix, via the
/// concurrence: `h((1 + sqrt(1 - C^2))/2)` with `h` the binary entropy.
pub fn eof_two_qubit(rho: &CMat) -> Result<f64> {
    let c = concurrence(rho)?;
    let x = 0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt());
    Ok(binary_entropy(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bell_phi_plus() -> AtomDensityMatrix {
        let inv = C64::new(1.0 / 2f64.sqrt(), 0.0);
        AtomDensityMatrix::pure_from_amplitudes(&[
            inv,
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            inv,
        ])
    }

    fn werner(p: f64) -> AtomDensityMatrix {
        let bell = bell_phi_plus();
        let m = bell.matrix().mapv(|z| z * p)
            + CMat::eye(ATOM_DIM).mapv(|z| z * ((1.0 - p) / 4.0));
        AtomDensityMatrix::new(m).unwrap()
    }

    #[test]
    fn negativity_bell_state() {
        let e = negativity(&bell_phi_plus()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        assert!(!e.is_separable());
    }

    #[test]
    fn negativity_product_state() {
        let e = negativity(&AtomDensityMatrix::pure_basis(0)).unwrap();
        assert_eq!(e.value, 0.0);
        assert!(e.is_separable());
        assert!(e.negative_eigenvalues.is_empty());
    }

    #[test]
    fn negativity_werner_half() {
        // Analytic partial-transpose eigenvalue (1 - 3p)/4 at p = 1/2.
        let e = negativity(&werner(0.5)).unwrap();
        assert!((e.value - 0.25).abs() < 1e-12);
    }

    #[test]
    fn pt_spectrum_pure_ee() {
        let coeffs = DiagonalCoefficients {
            a_e: 1.0,
            a_s: 0.0,
            a_a: 0.0,
            a_g: 0.0,
        };
        let spec = analytic_pt_eigenvalues_ee(&coeffs).unwrap();
        let mut eigs = spec.eigenvalues();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(eigs, [0.0, 0.0, 0.0, 1.0]);
        assert!(!spec.is_entangled());
    }

    #[test]
    fn pt_spectrum_matches_numeric_oracle() {
        // Populations 0.25 / 0.5 / 0.25 in the |ee>, 2A_s|s><s|, |gg>
        // normalization of the diagonal family: after unit-trace
        // normalization the projections become 1/6, 2/3, 1/6.
        let coeffs = DiagonalCoefficients {
            a_e: 1.0 / 6.0,
            a_s: 2.0 / 3.0,
            a_a: 0.0,
            a_g: 1.0 / 6.0,
        };
        let rho = coeffs.assemble().unwrap();
        let analytic = analytic_pt_eigenvalues_ee(&coeffs).unwrap();
        assert!(analytic.mu_minus < 0.0, "state should be entangled");
        let pt = numkernel::partial_transpose(rho.matrix(), &[2, 2], 1).unwrap();
        let numeric = numkernel::hermitian_eig(&pt).unwrap();
        let mut expect = analytic.eigenvalues();
        expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in numeric.eigenvalues.iter().zip(expect.iter()) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        // And this family's verdict agrees with the numeric negativity.
        let e = negativity(&rho).unwrap();
        assert!((e.value - (-2.0 * analytic.mu_minus)).abs() < 1e-10);
    }

    #[test]
    fn pt_spectrum_random_coefficients_match_oracle() {
        // Deterministic sweep over the coefficient simplex.
        let mut k = 0u32;
        for ae in [0.0, 0.1, 0.3, 0.6] {
            for as_ in [0.0, 0.2, 0.5, 0.9] {
                for ag in [0.0, 0.15, 0.4] {
                    if ae + as_ + ag <= 0.0 {
                        continue;
                    }
                    k += 1;
                    let total = ae + as_ + ag;
                    let coeffs = DiagonalCoefficients {
                        a_e: ae / total,
                        a_s: as_ / total,
                        a_a: 0.0,
                        a_g: ag / total,
                    };
                    let rho = coeffs.assemble().unwrap();
                    let analytic = analytic_pt_eigenvalues_ee(&coeffs).unwrap();
                    let pt =
                        numkernel::partial_transpose(rho.matrix(), &[2, 2], 1).unwrap();
                    let numeric = numkernel::hermitian_eig(&pt).unwrap();
                    let mut expect = analytic.eigenvalues();
                    expect.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    for (got, want) in numeric.eigenvalues.iter().zip(expect.iter()) {
                        assert!((got - want).abs() < 1e-10);
                    }
                }
            }
        }
        assert!(k > 20);
    }

    #[test]
    fn fock_criterion_vacuum_is_zero() {
        for c in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert_eq!(fock_gg_criterion(0, c).unwrap(), 0.0);
        }
    }

    #[test]
    fn fock_criterion_domain() {
        assert!(fock_gg_criterion(2, 1.2).is_err());
        assert!(fock_gg_criterion(2, -1.0000001).is_err());
    }

    #[test]
    fn fock_criterion_max_is_inverse_ell() {
        for ell in 1..=6usize {
            let (argmax, max) = fock_gg_argmax(ell).unwrap();
            let lf = ell as f64;
            assert!((max - 1.0 / lf).abs() < 1e-12, "ell={ell}: max {max}");
            assert!(
                (argmax - (-1.0 + 1.0 / lf)).abs() < 1e-12,
                "ell={ell}: argmax {argmax}"
            );
            // Grid scan confirms nothing beats the analytic maximum.
            let grid_best = (0..=20000)
                .map(|i| fock_gg_criterion(ell, -1.0 + i as f64 / 10000.0).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(grid_best <= max + 1e-12);
        }
    }

    #[test]
    fn fock_threshold_values() {
        assert_eq!(fock_gg_threshold(1).unwrap(), -1.0);
        // ell = 2: c_s = -1 + 2 sqrt(2) / (2 (sqrt(2)+1)^2) ~ -0.757359.
        let cs2 = fock_gg_threshold(2).unwrap();
        assert!((cs2 - (-0.7574)).abs() < 0.005, "c_s(2) = {cs2}");
        // The threshold really is the sign change of the criterion.
        for ell in 1..=5usize {
            let cs = fock_gg_threshold(ell).unwrap();
            let above = fock_gg_criterion(ell, (cs + 1e-6).min(1.0)).unwrap();
            assert!(above > 0.0, "ell={ell} just above threshold: {above}");
            if cs > -1.0 {
                let below = fock_gg_criterion(ell, cs - 1e-6).unwrap();
                assert!(below < 0.0, "ell={ell} just below threshold: {below}");
            }
        }
        // c_s peaks at ell = 2 and then declines.
        let c3 = fock_gg_threshold(3).unwrap();
        let c4 = fock_gg_threshold(4).unwrap();
        assert!(cs2 > c3 && c3 > c4);
    }

    #[test]
    fn mixed_condition_balanced_is_separable() {
        let coeffs = DiagonalCoefficients {
            a_e: 0.2,
            a_s: 0.3,
            a_a: 0.3,
            a_g: 0.2,
        };
        assert!(mixed_entanglement_condition(&coeffs).unwrap() <= 0.0);
    }

    #[test]
    fn mixed_condition_reduces_to_gg_form() {
        // lambda = 0 evolution has a_a = 0: margin is a_s - 2 sqrt(a_e a_g).
        let coeffs = DiagonalCoefficients {
            a_e: 0.04,
            a_s: 0.5,
            a_a: 0.0,
            a_g: 0.46,
        };
        let margin = mixed_entanglement_condition(&coeffs).unwrap();
        let expect = 0.5 - 2.0 * (0.04f64 * 0.46).sqrt();
        assert!((margin - expect).abs() < 1e-14);
    }

    #[test]
    fn mixed_condition_sign_matches_negativity() {
        for ae in [0.01, 0.1, 0.25] {
            for as_ in [0.1, 0.3, 0.6] {
                for aa in [0.0, 0.05, as_ * 0.8] {
                    let ag: f64 = 1.0 - ae - as_ - aa;
                    if ag < 0.0 {
                        continue;
                    }
                    let coeffs = DiagonalCoefficients {
                        a_e: ae,
                        a_s: as_,
                        a_a: aa,
                        a_g: ag,
                    };
                    let margin = mixed_entanglement_condition(&coeffs).unwrap();
                    let e = negativity(&coeffs.assemble().unwrap()).unwrap();
                    if margin > 1e-9 {
                        assert!(e.value > 0.0, "{coeffs:?}");
                    } else if margin < -1e-9 {
                        assert!(e.is_separable(), "{coeffs:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn eof_bell_and_product() {
        assert!((eof_two_qubit(bell_phi_plus().matrix()).unwrap() - 1.0).abs() < 1e-10);
        assert!(eof_two_qubit(AtomDensityMatrix::pure_basis(2).matrix()).unwrap() < 1e-12);
        // Arbitrary product state.
        let a = AtomDensityMatrix::pure_from_amplitudes(&[
            C64::new(0.6, 0.0),
            C64::new(0.8, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ]);
        assert!(eof_two_qubit(a.matrix()).unwrap() < 1e-10);
    }

    #[test]
    fn eof_werner_closed_form() {
        // C = (3p - 1)/2 = 0.7 at p = 0.8.
        let rho = werner(0.8);
        let c = concurrence(rho.matrix()).unwrap();
        assert!((c - 0.7).abs() < 1e-10);
        let expect = binary_entropy(0.5 * (1.0 + 0.51f64.sqrt()));
        assert!((eof_two_qubit(rho.matrix()).unwrap() - expect).abs() < 1e-10);
    }
}
