//! Gates, circuits and the symmetrized Trotter compiler.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::linalg::{exp_i_hermitian, phase_aligned_norm, unitarity_deviation, CMatrix};
use crate::pauli::{Pauli, PauliSum, PauliWord};
use crate::statevector::{check_qubits, check_targets, Statevector};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance on the unitarity of an explicit matrix gate.
pub const GATE_UNITARY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    X,
    H,
    S,
    Sdag,
    /// `diag(e^{-i angle/2}, e^{i angle/2})`
    Rz(f64),
    /// Control is the first target.
    Cnot,
    /// Hamming-weight preserving rotation between `|01>` and `|10>`.
    AGate { theta: f64, phi: f64 },
    DenseUnitary(CMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl Gate {
    pub fn x(q: usize) -> Self {
        Self { kind: GateKind::X, targets: vec![q] }
    }

    pub fn h(q: usize) -> Self {
        Self { kind: GateKind::H, targets: vec![q] }
    }

    pub fn s(q: usize) -> Self {
        Self { kind: GateKind::S, targets: vec![q] }
    }

    pub fn sdag(q: usize) -> Self {
        Self { kind: GateKind::Sdag, targets: vec![q] }
    }

    pub fn rz(q: usize, angle: f64) -> Self {
        Self { kind: GateKind::Rz(angle), targets: vec![q] }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self { kind: GateKind::Cnot, targets: vec![control, target] }
    }

    pub fn agate(a: usize, b: usize, theta: f64, phi: f64) -> Self {
        Self { kind: GateKind::AGate { theta, phi }, targets: vec![a, b] }
    }

    pub fn dense(matrix: CMatrix, targets: Vec<usize>) -> Result<Self> {
        let dim = 1usize << targets.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: matrix.nrows() });
        }
        let dev = unitarity_deviation(&matrix);
        if dev > GATE_UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { kind: GateKind::DenseUnitary(matrix), targets })
    }

    /// A matrix over the whole register in statevector index order (qubit 0
    /// as the least significant bit).
    pub fn full_register(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows().trailing_zeros() as usize;
        Self::dense(matrix, (0..n).rev().collect())
    }

    pub fn arity(&self) -> usize {
        match self.kind {
            GateKind::Cnot | GateKind::AGate { .. } => 2,
            GateKind::DenseUnitary(ref m) => m.nrows().trailing_zeros() as usize,
            _ => 1,
        }
    }

    /// Matrix on the targets, first target as the most significant bit.
    pub fn matrix(&self) -> CMatrix {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let i = Complex64::new(0.0, 1.0);
        match &self.kind {
            GateKind::X => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            GateKind::H => CMatrix::from_row_slice(2, 2, &[ONE * r, ONE * r, ONE * r, -ONE * r]),
            GateKind::S => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, i]),
            GateKind::Sdag => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -i]),
            GateKind::Rz(a) => CMatrix::from_row_slice(
                2,
                2,
                &[Complex64::from_polar(1.0, -a / 2.0), ZERO, ZERO, Complex64::from_polar(1.0, a / 2.0)],
            ),
            GateKind::Cnot => {
                let mut m = CMatrix::zeros(4, 4);
                m[(0, 0)] = ONE;
                m[(1, 1)] = ONE;
                m[(2, 3)] = ONE;
                m[(3, 2)] = ONE;
                m
            }
            GateKind::AGate { theta, phi } => agate_matrix(*theta, *phi),
            GateKind::DenseUnitary(m) => m.clone(),
        }
    }

    fn apply(&self, state: &mut Statevector) {
        let i = Complex64::new(0.0, 1.0);
        match &self.kind {
            GateKind::X => state.apply_x(self.targets[0]),
            GateKind::S => state.apply_diag_1q(ONE, i, self.targets[0]),
            GateKind::Sdag => state.apply_diag_1q(ONE, -i, self.targets[0]),
            GateKind::Rz(a) => state.apply_diag_1q(
                Complex64::from_polar(1.0, -a / 2.0),
                Complex64::from_polar(1.0, a / 2.0),
                self.targets[0],
            ),
            GateKind::Cnot => state.apply_cnot(self.targets[0], self.targets[1]),
            _ => state.apply_matrix(&self.matrix(), &self.targets),
        }
    }

    fn to_text_line(&self) -> String {
        let targets = self.targets.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ");
        match &self.kind {
            GateKind::X => format!("X {targets}"),
            GateKind::H => format!("H {targets}"),
            GateKind::S => format!("S {targets}"),
            GateKind::Sdag => format!("SDG {targets}"),
            GateKind::Rz(a) => format!("RZ {targets} {a:?}"),
            GateKind::Cnot => format!("CNOT {targets}"),
            GateKind::AGate { theta, phi } => format!("A {targets} {theta:?} {phi:?}"),
            GateKind::DenseUnitary(m) => format!("DENSE {targets} {}x{}", m.nrows(), m.ncols()),
        }
    }
}

/// The A gate on `|00>, |01>, |10>, |11>`: identity on `|00>` and `|11>`,
/// `|01> -> cos(theta)|01> + e^{-i phi} sin(theta)|10>` and
/// `|10> -> e^{i phi} sin(theta)|01> - cos(theta)|10>`.
pub fn agate_matrix(theta: f64, phi: f64) -> CMatrix {
    let (s, c) = theta.sin_cos();
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 0)] = ONE;
    m[(3, 3)] = ONE;
    m[(1, 1)] = ONE * c;
    m[(2, 1)] = Complex64::from_polar(s, -phi);
    m[(1, 2)] = Complex64::from_polar(s, phi);
    m[(2, 2)] = -ONE * c;
    m
}

/// An ordered gate list with a tracked global phase (radians).
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    global_phase: f64,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        Ok(Self { n_qubits, gates: Vec::new(), global_phase: 0.0 })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn global_phase(&self) -> f64 {
        self.global_phase
    }

    pub fn add_global_phase(&mut self, phase: f64) {
        self.global_phase += phase;
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        check_targets(&gate.targets, self.n_qubits)?;
        if gate.targets.len() != gate.arity() {
            return Err(Error::InvalidTargets {
                targets: gate.targets.clone(),
                reason: format!("gate acts on {} qubits", gate.arity()),
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    /// Appends `other`'s gates, so `other` acts after `self`.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: other.n_qubits });
        }
        self.gates.extend(other.gates.iter().cloned());
        self.global_phase += other.global_phase;
        Ok(())
    }

    pub fn run(&self, input: &Statevector) -> Result<Statevector> {
        if input.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: input.n_qubits() });
        }
        let mut state = input.clone();
        self.run_in_place(&mut state);
        Ok(state)
    }

    pub(crate) fn run_in_place(&self, state: &mut Statevector) {
        for gate in &self.gates {
            gate.apply(state);
        }
        if self.global_phase != 0.0 {
            state.scale(Complex64::from_polar(1.0, self.global_phase));
        }
    }

    /// Dense matrix: product of embedded gate matrices in circuit order, times
    /// the global phase.
    pub fn unitary(&self) -> Result<CMatrix> {
        let dim = 1usize << self.n_qubits;
        let mut u = CMatrix::identity(dim, dim);
        for gate in &self.gates {
            u = embed(&gate.matrix(), &gate.targets, self.n_qubits) * u;
        }
        Ok(u * Complex64::from_polar(1.0, self.global_phase))
    }

    /// Line-oriented `GATE targets params` listing, headed by the qubit count
    /// and global phase.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# qubits {} phase {:?}", self.n_qubits, self.global_phase);
        for gate in &self.gates {
            out.push_str(&gate.to_text_line());
            out.push('\n');
        }
        out
    }
}

/// Embeds a `2^k x 2^k` matrix acting on `targets` into the full space.
pub fn embed(m: &CMatrix, targets: &[usize], n_qubits: usize) -> CMatrix {
    let dim = 1usize << n_qubits;
    let k = targets.len();
    let local = |index: usize| -> usize {
        targets
            .iter()
            .enumerate()
            .map(|(j, &t)| ((index >> t) & 1) << (k - 1 - j))
            .sum()
    };
    let mask: usize = targets.iter().map(|&t| 1usize << t).sum();
    CMatrix::from_fn(dim, dim, |row, col| {
        if row & !mask == col & !mask {
            m[(local(row), local(col))]
        } else {
            ZERO
        }
    })
}

/// Circuit for `exp(i theta P / 2)`: basis rotations, a CNOT parity ladder
/// over the non-identity qubits, `Rz(-theta)` on the last of them, then the
/// mirror image.
pub fn compile_pauli_rotation(word: &PauliWord, theta: f64) -> Result<Circuit> {
    let support = word.support();
    let Some(&last) = support.last() else {
        return Err(Error::IdentityRotation);
    };
    let mut c = Circuit::new(word.n_qubits())?;
    for &q in &support {
        match word.get(q) {
            Pauli::X => c.push(Gate::h(q))?,
            Pauli::Y => {
                c.push(Gate::sdag(q))?;
                c.push(Gate::h(q))?;
            }
            _ => {}
        }
    }
    for pair in support.windows(2) {
        c.push(Gate::cnot(pair[0], pair[1]))?;
    }
    c.push(Gate::rz(last, -theta))?;
    for pair in support.windows(2).rev() {
        c.push(Gate::cnot(pair[0], pair[1]))?;
    }
    for &q in &support {
        match word.get(q) {
            Pauli::X => c.push(Gate::h(q))?,
            Pauli::Y => {
                c.push(Gate::h(q))?;
                c.push(Gate::s(q))?;
            }
            _ => {}
        }
    }
    Ok(c)
}

/// `exp(i * global_angle * hamiltonian)` approximated by `order_r`
/// repetitions of the symmetrized product formula.
#[derive(Clone, Debug)]
pub struct TrotterPlan {
    pub hamiltonian: PauliSum,
    pub global_angle: f64,
    pub order_r: u32,
}

impl TrotterPlan {
    pub fn new(hamiltonian: PauliSum, global_angle: f64, order_r: u32) -> Result<Self> {
        if order_r == 0 {
            return Err(Error::InvalidParameters("Trotter order must be at least 1".into()));
        }
        Ok(Self { hamiltonian, global_angle, order_r })
    }
}

/// Each repetition sweeps the terms forward then backward in canonical order,
/// every factor `exp(i angle c_k P_k / 2r)`. Identity terms contribute only to
/// the tracked global phase.
pub fn trotterize(plan: &TrotterPlan) -> Result<Circuit> {
    if plan.order_r == 0 {
        return Err(Error::InvalidParameters("Trotter order must be at least 1".into()));
    }
    let terms = plan.hamiltonian.real_terms()?;
    let r = plan.order_r as f64;
    let mut factors = Vec::with_capacity(terms.len());
    let mut circuit = Circuit::new(plan.hamiltonian.n_qubits())?;
    for (word, coeff) in &terms {
        if word.is_identity() {
            circuit.add_global_phase(plan.global_angle * coeff);
        } else {
            // two half-angle factors per repetition make theta = angle * c / r
            factors.push(compile_pauli_rotation(word, plan.global_angle * coeff / r)?);
        }
    }
    for _ in 0..plan.order_r {
        for f in factors.iter().chain(factors.iter().rev()) {
            circuit.append(f)?;
        }
    }
    Ok(circuit)
}

/// Operator-norm distance, modulo global phase, between the compiled product
/// formula for `exp(i angle H)` and the exact exponential.
pub fn trotter_error(h: &PauliSum, angle: f64, order_r: u32) -> Result<f64> {
    let compiled = trotterize(&TrotterPlan::new(h.clone(), angle, order_r)?)?.unitary()?;
    Ok(phase_aligned_norm(&compiled, &exp_i_hermitian(&h.to_dense()?, angle)))
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}
