//! End-to-end experiments: initial states, joint evolution with partial
//! traces, atom-atom and atom-field sweeps over interaction time.

use ndarray::prelude::*;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::entanglement::{eof_two_qubit, negativity};
use crate::error::{Error, Result};
use crate::kraus::{apply_channel, AtomDensityMatrix};
use crate::numkernel::{self, CMat};
use crate::propagator::{analytic_elements, OraclePropagator, ATOM_DIM};
use crate::thermal::{choose_truncation, thermal_weight, FockTruncation};

/// Largest joint dimension (field levels times four atomic states) the
/// dense paths will accept.
pub const MAX_JOINT_DIM: usize = 4096;

/// Initial preparation of the atom pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialKind {
    Ee,
    Eg,
    Gg,
    /// Product of identical single-atom thermal mixtures with excited-state
    /// population `lambda`.
    Mixed(f64),
}

/// Parameters of one sweep experiment.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub initial: InitialKind,
    pub nbar: f64,
    pub gamma: f64,
    pub t_grid: Vec<f64>,
    pub epsilon: f64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if let InitialKind::Mixed(lambda) = self.initial {
            if !(0.0..=1.0).contains(&lambda) {
                return Err(Error::InvalidParameter(format!(
                    "lambda must lie in [0, 1], got {lambda}"
                )));
            }
        }
        if self.nbar < 0.0 {
            return Err(Error::InvalidParameter("nbar must be nonnegative".into()));
        }
        if self.gamma <= 0.0 {
            return Err(Error::InvalidParameter("gamma must be positive".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidParameter("epsilon must lie in (0, 1)".into()));
        }
        match self.t_grid.first() {
            Some(&t0) if t0 == 0.0 => {}
            _ => {
                return Err(Error::InvalidParameter(
                    "time grid must start at 0".into(),
                ))
            }
        }
        if self.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "time grid must be strictly ascending".into(),
            ));
        }
        Ok(())
    }
}

/// Uniform grid of `steps` points from 0 to `tmax` inclusive.
pub fn uniform_grid(tmax: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![0.0];
    }
    (0..steps)
        .map(|k| tmax * k as f64 / (steps - 1) as f64)
        .collect()
}

/// Initial two-atom density matrix for a scenario kind.
pub fn initial_state(kind: InitialKind) -> Result<AtomDensityMatrix> {
    match kind {
        InitialKind::Ee => Ok(AtomDensityMatrix::pure_basis(0)),
        InitialKind::Eg => Ok(AtomDensityMatrix::pure_basis(1)),
        InitialKind::Gg => Ok(AtomDensityMatrix::pure_basis(3)),
        InitialKind::Mixed(lambda) => {
            if !(0.0..=1.0).contains(&lambda) {
                return Err(Error::InvalidParameter(format!(
                    "lambda must lie in [0, 1], got {lambda}"
                )));
            }
            let mut m = CMat::zeros((ATOM_DIM, ATOM_DIM));
            let weights = [
                lambda * lambda,
                lambda * (1.0 - lambda),
                lambda * (1.0 - lambda),
                (1.0 - lambda) * (1.0 - lambda),
            ];
            for (i, w) in weights.into_iter().enumerate() {
                m[(i, i)] = C64::new(w, 0.0);
            }
            AtomDensityMatrix::new(m)
        }
    }
}

/// Reduced state of one atom plus the field, stored field-major
/// (index `2 * fock + atom`).
#[derive(Debug, Clone)]
pub struct AtomFieldState {
    pub field_dim: usize,
    pub matrix: CMat,
}

impl AtomFieldState {
    pub fn trace(&self) -> f64 {
        self.matrix.diag().iter().map(|z| z.re).sum()
    }
}

/// Joint evolution machinery for one `(truncation, gamma)` pair: the
/// Hamiltonian eigensolve happens once here and is reused across times and
/// initial states. Read-only after construction.
pub struct JointEvolver {
    trunc: FockTruncation,
    gamma: f64,
    oracle: OraclePropagator,
}

/// A decomposed initial state, ready for repeated evolution: one column per
/// (Fock level, pure atomic component), already rotated into the
/// Hamiltonian eigenbasis and weighted by `sqrt(P_n q_k)`.
pub struct PreparedState {
    columns: CMat,
}

impl JointEvolver {
    pub fn new(trunc: FockTruncation, gamma: f64) -> Result<Self> {
        let field_dim = trunc.field_dim();
        let dim = ATOM_DIM * field_dim;
        if dim > MAX_JOINT_DIM {
            return Err(Error::DimensionGuard {
                dim,
                limit: MAX_JOINT_DIM,
            });
        }
        Ok(JointEvolver {
            gamma,
            oracle: OraclePropagator::new(field_dim, gamma)?,
            trunc,
        })
    }

    pub fn truncation(&self) -> &FockTruncation {
        &self.trunc
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn oracle(&self) -> &OraclePropagator {
        &self.oracle
    }

    /// Decompose `P_n |n><n| (x) rho0` into weighted pure product states and
    /// rotate them into the eigenbasis.
    pub fn prepare(&self, rho0: &AtomDensityMatrix) -> Result<PreparedState> {
        let spec = numkernel::hermitian_eig(rho0.matrix())?;
        let mut components: Vec<(f64, [C64; ATOM_DIM])> = Vec::new();
        for k in 0..ATOM_DIM {
            let q = spec.eigenvalues[k];
            if q > 1e-14 {
                let mut amps = [C64::new(0.0, 0.0); ATOM_DIM];
                for j in 0..ATOM_DIM {
                    amps[j] = spec.eigenvectors[(j, k)];
                }
                components.push((q, amps));
            }
        }
        let v = self.oracle.spectrum_eigenvectors();
        let dim = v.nrows();
        let ncols = (self.trunc.cutoff() + 1) * components.len();
        let mut columns = CMat::zeros((dim, ncols));
        let mut col = 0;
        for n in 0..=self.trunc.cutoff() {
            let p = self.trunc.weight(n);
            for (q, amps) in &components {
                if p > 0.0 {
                    let w = (p * q).sqrt();
                    // V^dag column of |n>(x)|amps| is a 4-row combination.
                    for j in 0..ATOM_DIM {
                        if amps[j].norm_sqr() == 0.0 {
                            continue;
                        }
                        let row = v.slice(s![ATOM_DIM * n + j, ..]);
                        let mut dst = columns.slice_mut(s![.., col]);
                        ndarray::Zip::from(&mut dst).and(&row).for_each(|d, &r| {
                            *d += r.conj() * amps[j] * w;
                        });
                    }
                }
                col += 1;
            }
        }
        Ok(PreparedState { columns })
    }

    fn evolved_columns(&self, prep: &PreparedState, t: f64) -> CMat {
        let phases = self
            .oracle
            .spectrum_eigenvalues()
            .mapv(|l| (C64::new(0.0, -1.0) * l * t).exp());
        let scaled = &prep.columns * &phases.view().insert_axis(Axis(1));
        self.oracle.spectrum_eigenvectors().dot(&scaled)
    }

    /// Full joint density matrix at time `t`.
    pub fn evolve(&self, prep: &PreparedState, t: f64) -> CMat {
        let y = self.evolved_columns(prep, t);
        let y_dag = numkernel::adjoint(&y);
        y.dot(&y_dag)
    }

    /// Reduced atom-field state at time `t`, tracing out the other atom.
    pub fn atom_field(
        &self,
        prep: &PreparedState,
        t: f64,
        keep_atom: usize,
    ) -> Result<AtomFieldState> {
        if keep_atom != 1 && keep_atom != 2 {
            return Err(Error::InvalidParameter(format!(
                "keep_atom must be 1 or 2, got {keep_atom}"
            )));
        }
        let y = self.evolved_columns(prep, t);
        let field_dim = self.trunc.field_dim();
        let ncols = y.ncols();
        // Regroup the traced atom's index into the column dimension; the
        // partial trace then becomes Z Z^dag.
        let mut z = CMat::zeros((2 * field_dim, 2 * ncols));
        for m in 0..field_dim {
            for c in 0..ncols {
                for i in 0..2 {
                    for j in 0..2 {
                        let amp = y[(ATOM_DIM * m + 2 * i + j, c)];
                        let (row, col) = if keep_atom == 1 {
                            (2 * m + i, 2 * c + j)
                        } else {
                            (2 * m + j, 2 * c + i)
                        };
                        z[(row, col)] = amp;
                    }
                }
            }
        }
        let z_dag = numkernel::adjoint(&z);
        Ok(AtomFieldState {
            field_dim,
            matrix: z.dot(&z_dag),
        })
    }
}

/// One-shot joint evolution `U (rho_E (x) rho_s) U^dag` on the guarded
/// dense space. For sweeps, build a [`JointEvolver`] instead and reuse it.
pub fn joint_evolve(
    rho0: &AtomDensityMatrix,
    trunc: &FockTruncation,
    gamma: f64,
    t: f64,
) -> Result<CMat> {
    let evolver = JointEvolver::new(trunc.clone(), gamma)?;
    let prep = evolver.prepare(rho0)?;
    Ok(evolver.evolve(&prep, t))
}

/// Trace a joint state over one atom. `keep_atom = 1` keeps atom 1.
pub fn atom_field_state(joint: &CMat, keep_atom: usize) -> Result<AtomFieldState> {
    if joint.nrows() % ATOM_DIM != 0 {
        return Err(Error::DimensionMismatch(format!(
            "joint dimension {} is not a multiple of {}",
            joint.nrows(),
            ATOM_DIM
        )));
    }
    let field_dim = joint.nrows() / ATOM_DIM;
    let keep: &[usize] = match keep_atom {
        1 => &[0, 1],
        2 => &[0, 2],
        _ => {
            return Err(Error::InvalidParameter(format!(
                "keep_atom must be 1 or 2, got {keep_atom}"
            )))
        }
    };
    let matrix = numkernel::partial_trace(joint, &[field_dim, 2, 2], keep)?;
    Ok(AtomFieldState { field_dim, matrix })
}

/// Average entanglement of formation over local projections of the
/// atom-field state onto consecutive Fock pairs, maximized over the two
/// pair alignments. A local-projection average cannot increase
/// entanglement, so this lower-bounds the atom-field entanglement.
pub fn projected_lower_bound(af: &AtomFieldState) -> Result<f64> {
    let mut best: f64 = 0.0;
    for start in 0..2usize {
        let mut avg = 0.0;
        let mut m = start;
        while m + 1 < af.field_dim {
            let levels = [m, m + 1];
            let mut sigma = CMat::zeros((4, 4));
            for (a, &ma) in levels.iter().enumerate() {
                for (b, &mb) in levels.iter().enumerate() {
                    for i in 0..2 {
                        for j in 0..2 {
                            // Qubit pair ordering (atom, pair member).
                            sigma[(2 * i + a, 2 * j + b)] =
                                af.matrix[(2 * ma + i, 2 * mb + j)];
                        }
                    }
                }
            }
            let p: f64 = sigma.diag().iter().map(|z| z.re).sum();
            if p > 1e-14 {
                let normalized = sigma.mapv(|z| z / p);
                avg += p * eof_two_qubit(&normalized)?;
            }
            m += 2;
        }
        best = best.max(avg);
    }
    Ok(best)
}

/// Positivity witness for atom-field entanglement out of `|ee>`:
/// `P_0^2 |U21(0,1)|^2 (U11(0,0))^2`, the weight of the `{|e,1>, |e,0>,
/// |g,1>, |g,0>}` block. Strictly positive except at isolated Rabi nodes.
pub fn witness_ee(gamma: f64, t: f64, nbar: f64) -> Result<f64> {
    let p0 = thermal_weight(0, nbar)?;
    let e = analytic_elements(0, gamma, t);
    Ok(p0 * p0 * e.u21.norm_sqr() * e.u11.re * e.u11.re)
}

/// Which quantity a sweep records at each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    AtomAtomNegativity,
    AtomFieldLowerBound,
}

#[derive(Debug, Clone, Copy)]
pub struct SweepPoint {
    pub gamma_t: f64,
    pub value: f64,
    pub trace_deficit: f64,
}

/// A computed sweep: one measure value per grid time.
#[derive(Debug, Clone)]
pub struct SweepSeries {
    pub config: ScenarioConfig,
    pub measure_kind: MeasureKind,
    pub points: Vec<SweepPoint>,
    pub truncation_cutoff: usize,
    pub tail_mass: f64,
}

/// Run a sweep. Atom-atom measures go through the Kraus channel; atom-field
/// measures go through the joint evolution. Grid points are evaluated in
/// parallel with read-only shared caches.
pub fn sweep(config: &ScenarioConfig, measure_kind: MeasureKind) -> Result<SweepSeries> {
    config.validate()?;
    let trunc = choose_truncation(config.nbar, config.epsilon)?;
    let rho0 = initial_state(config.initial)?;
    let points: Vec<SweepPoint> = match measure_kind {
        MeasureKind::AtomAtomNegativity => config
            .t_grid
            .par_iter()
            .map(|&t| -> Result<SweepPoint> {
                let rho = apply_channel(&rho0, &trunc, config.gamma, t)?;
                let e = negativity(&rho)?;
                Ok(SweepPoint {
                    gamma_t: config.gamma * t,
                    value: e.value,
                    trace_deficit: rho.trace_deficit(),
                })
            })
            .collect::<Result<_>>()?,
        MeasureKind::AtomFieldLowerBound => {
            let evolver = JointEvolver::new(trunc.clone(), config.gamma)?;
            let prep = evolver.prepare(&rho0)?;
            config
                .t_grid
                .par_iter()
                .map(|&t| -> Result<SweepPoint> {
                    let af = evolver.atom_field(&prep, t, 1)?;
                    let value = projected_lower_bound(&af)?;
                    Ok(SweepPoint {
                        gamma_t: config.gamma * t,
                        value,
                        trace_deficit: (1.0 - af.trace()).max(0.0),
                    })
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(SweepSeries {
        config: config.clone(),
        measure_kind,
        points,
        truncation_cutoff: trunc.cutoff(),
        tail_mass: trunc.tail_mass(),
    })
}
