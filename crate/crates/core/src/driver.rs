//! The OA-VQE eigensolver: minimize the energy at level 0, freeze the optimal
//! circuit, then minimize the same energy through the stacked circuit at the
//! next level, and so on.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ansatz::{prepare, stack, ActiveSpace, Ansatz, Exponentiation, Family};
use crate::circuit::Circuit;
use crate::linalg::{hermitian_eigenvalues, CMatrix};
use crate::optimizer::{minimize, OptProblem, DEFAULT_EVALS_PER_DIM, DEFAULT_TOLERANCE};
use crate::pauli::PauliSum;
use crate::statevector::Statevector;
use crate::{Error, Result};

/// Amplitude allowed to leak out of the active space under the Hamiltonian.
const SUPPORT_TOLERANCE: f64 = 1e-9;
/// Fraction of each coordinate's range used to perturb restart points.
const RESTART_SPREAD: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSettings {
    pub max_evals_per_dim: usize,
    pub tolerance: f64,
    /// Starting points per level; the first is the box centre.
    pub restarts: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self { max_evals_per_dim: DEFAULT_EVALS_PER_DIM, tolerance: DEFAULT_TOLERANCE, restarts: 3 }
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub hamiltonian: PauliSum,
    pub space: ActiveSpace,
    pub family: Family,
    pub n_levels: usize,
    pub exponentiation: Exponentiation,
    pub optimizer: OptimizerSettings,
    pub seed: u64,
}

impl SolverConfig {
    /// All levels of the space, dense exponentiation, default optimizer.
    pub fn new(hamiltonian: PauliSum, space: ActiveSpace, family: Family) -> Self {
        let n_levels = space.dim();
        Self {
            hamiltonian,
            space,
            family,
            n_levels,
            exponentiation: Exponentiation::Dense,
            optimizer: OptimizerSettings::default(),
            seed: 0,
        }
    }
}

/// `E(psi) = <psi|H|psi>`. One instance serves every level.
pub struct EnergyObjective {
    hamiltonian: PauliSum,
    fingerprint: String,
}

impl EnergyObjective {
    pub fn new(hamiltonian: PauliSum) -> Result<Self> {
        hamiltonian.ensure_hermitian()?;
        let fingerprint = format!("{:x}", Sha256::digest(hamiltonian.to_text().as_bytes()));
        Ok(Self { hamiltonian, fingerprint })
    }

    pub fn energy(&self, state: &Statevector) -> Result<f64> {
        self.hamiltonian.expectation(state)
    }

    /// SHA-256 of the Hamiltonian's text form.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelResult {
    pub level: usize,
    pub energy: f64,
    pub parameters: Vec<f64>,
    /// Cost evaluations summed over restarts.
    pub evaluations: usize,
    pub converged: bool,
    /// Best cost reached from each starting point.
    pub restart_costs: Vec<f64>,
    /// `(evaluation index, cost)` of the winning restart.
    pub trace: Vec<(usize, f64)>,
    pub objective_fingerprint: String,
    /// Text form of the frozen circuit.
    pub circuit: String,
}

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub family: Family,
    pub exponentiation: Exponentiation,
    pub space: ActiveSpace,
    pub levels: Vec<LevelResult>,
    pub frozen: Vec<Circuit>,
    pub states: Vec<Statevector>,
    /// `overlaps[k][l] = <psi_k|psi_l>`.
    pub overlaps: Vec<Vec<Complex64>>,
}

#[derive(Serialize)]
struct SpectrumReport<'a> {
    family: String,
    exponentiation: Exponentiation,
    basis: Vec<String>,
    energies: Vec<f64>,
    max_off_diagonal_overlap: f64,
    overlap_re: Vec<Vec<f64>>,
    overlap_im: Vec<Vec<f64>>,
    levels: &'a [LevelResult],
}

impl SpectrumResult {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }

    pub fn max_off_diagonal_overlap(&self) -> f64 {
        max_off_diagonal(&self.overlaps)
    }

    /// JSON report: energies, per-level parameters and traces, and the
    /// overlap matrix split into real and imaginary parts.
    pub fn to_json(&self) -> serde_json::Value {
        let part = |f: fn(&Complex64) -> f64| self.overlaps.iter().map(|r| r.iter().map(f).collect()).collect();
        let report = SpectrumReport {
            family: self.family.to_string(),
            exponentiation: self.exponentiation,
            basis: self.space.labels(),
            energies: self.energies(),
            max_off_diagonal_overlap: self.max_off_diagonal_overlap(),
            overlap_re: part(|c| c.re),
            overlap_im: part(|c| c.im),
            levels: &self.levels,
        };
        serde_json::to_value(report).expect("report is plain data")
    }
}

pub fn max_off_diagonal(overlaps: &[Vec<Complex64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (k, row) in overlaps.iter().enumerate() {
        for (l, v) in row.iter().enumerate() {
            if k != l {
                worst = worst.max(v.norm());
            }
        }
    }
    worst
}

fn check_support(h: &PauliSum, space: &ActiveSpace) -> Result<()> {
    if h.n_qubits() != space.n_qubits() {
        return Err(Error::DimensionMismatch { expected: space.n_qubits(), found: h.n_qubits() });
    }
    let mut inside = vec![false; 1 << space.n_qubits()];
    for z in space.basis() {
        inside[z.0] = true;
    }
    for i in 0..space.dim() {
        let image = h.apply(&space.reference_state(i)?)?;
        let leak: f64 = image.iter().enumerate().filter(|(b, _)| !inside[*b]).map(|(_, a)| a.norm_sqr()).sum();
        if leak.sqrt() > SUPPORT_TOLERANCE {
            return Err(Error::InvalidParameters(format!(
                "Hamiltonian maps basis state {} out of the active space (leaked norm {:.3e})",
                space.labels()[i],
                leak.sqrt()
            )));
        }
    }
    Ok(())
}

/// `<z_a|H|z_b>` over the active basis.
pub fn restricted_matrix(h: &PauliSum, space: &ActiveSpace) -> Result<CMatrix> {
    if h.n_qubits() != space.n_qubits() {
        return Err(Error::DimensionMismatch { expected: space.n_qubits(), found: h.n_qubits() });
    }
    let mut m = CMatrix::zeros(space.dim(), space.dim());
    for b in 0..space.dim() {
        let image = h.apply(&space.reference_state(b)?)?;
        for (a, z) in space.basis().iter().enumerate() {
            m[(a, b)] = image[z.0];
        }
    }
    Ok(m)
}

/// Ascending eigenvalues of `H` restricted to the active space.
pub fn exact_spectrum(h: &PauliSum, space: &ActiveSpace) -> Result<Vec<f64>> {
    h.ensure_hermitian()?;
    Ok(hermitian_eigenvalues(&restricted_matrix(h, space)?))
}

fn starting_points(lo: &[f64], hi: &[f64], count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mid: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
    let mut out = vec![mid.clone()];
    for _ in 1..count {
        let p = (0..mid.len())
            .map(|i| {
                let half = 0.5 * RESTART_SPREAD * (hi[i] - lo[i]);
                (mid[i] + rng.gen_range(-half..=half)).clamp(lo[i], hi[i])
            })
            .collect();
        out.push(p);
    }
    out
}

pub fn solve(config: &SolverConfig) -> Result<SpectrumResult> {
    let space = &config.space;
    if config.n_levels == 0 || config.n_levels > space.dim() {
        return Err(Error::Config(format!("n_levels must be in 1..={}, got {}", space.dim(), config.n_levels)));
    }
    if config.optimizer.restarts == 0 {
        return Err(Error::Config("optimizer.restarts must be at least 1".into()));
    }
    let objective = EnergyObjective::new(config.hamiltonian.clone())?;
    check_support(&config.hamiltonian, space)?;
    let ansatz = Ansatz::new(config.family, space.clone(), config.exponentiation)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut frozen: Vec<Circuit> = Vec::with_capacity(config.n_levels);
    let mut levels = Vec::with_capacity(config.n_levels);
    let mut states = Vec::with_capacity(config.n_levels);
    for level in 0..config.n_levels {
        let (lo, hi) = ansatz.bounds(level);
        let dim = lo.len();
        // an invalid parameter vector is a bug, not a cost; surface it after the run
        let failure = std::sync::Mutex::new(None::<Error>);
        let cost = |x: &[f64]| -> f64 {
            match prepare(&ansatz, level, x, &frozen).and_then(|s| objective.energy(&s)) {
                Ok(e) => e,
                Err(e) => {
                    failure.lock().unwrap().get_or_insert(e);
                    f64::NAN
                }
            }
        };
        let starts = starting_points(&lo, &hi, if dim == 0 { 1 } else { config.optimizer.restarts }, &mut rng);
        let mut best = None;
        let mut restart_costs = Vec::with_capacity(starts.len());
        let mut evaluations = 0;
        for initial in starts {
            let problem = OptProblem {
                lower: lo.clone(),
                upper: hi.clone(),
                initial,
                cost: &cost,
                max_evals: config.optimizer.max_evals_per_dim * dim.max(1),
                tolerance: config.optimizer.tolerance,
                seed: rng.gen(),
            };
            let outcome = minimize(&problem);
            if let Some(e) = failure.lock().unwrap().take() {
                return Err(e);
            }
            let r = outcome?;
            evaluations += r.evaluations;
            restart_costs.push(r.best_cost);
            if best.as_ref().is_none_or(|b: &crate::optimizer::OptResult| r.best_cost < b.best_cost) {
                best = Some(r);
            }
        }
        let best = best.expect("at least one start");
        let circuit = ansatz.circuit(level, &best.best_point)?;
        let state = stack(space, level, &circuit, &frozen)?;
        levels.push(LevelResult {
            level,
            energy: objective.energy(&state)?,
            parameters: best.best_point,
            evaluations,
            converged: best.converged,
            restart_costs,
            trace: best.trace,
            objective_fingerprint: objective.fingerprint().to_string(),
            circuit: circuit.to_text(),
        });
        frozen.push(circuit);
        states.push(state);
    }
    let overlaps = overlap_matrix(&states)?;
    Ok(SpectrumResult {
        family: config.family,
        exponentiation: config.exponentiation,
        space: space.clone(),
        levels,
        frozen,
        states,
        overlaps,
    })
}

fn overlap_matrix(states: &[Statevector]) -> Result<Vec<Vec<Complex64>>> {
    states.iter().map(|a| states.iter().map(|b| a.inner_product(b)).collect()).collect()
}

/// Rebuilds every prepared state from the frozen circuits and returns all
/// pairwise inner products.
pub fn verify_orthogonality(result: &SpectrumResult) -> Result<Vec<Vec<Complex64>>> {
    let states = (0..result.frozen.len())
        .map(|l| stack(&result.space, l, &result.frozen[l], &result.frozen[..l]))
        .collect::<Result<Vec<_>>>()?;
    overlap_matrix(&states)
}
