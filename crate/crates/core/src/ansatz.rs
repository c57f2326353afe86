//! Self-orthogonalizing state-preparation circuits.
//!
//! A level-`l` circuit `V_l` acts trivially (up to a phase) on the reference
//! states `|z_i>` with `i < l` and maps `|z_l>` into the span of `|z_{>=l}>`.
//! Three families are provided: a chain of A gates over a one-qubit-per-orbital
//! register, and hyperspherical "cluster" operators `T_l` exponentiated as
//! `exp(i pi (T_l + T_l†)/2)` over either a compact register or a
//! Jordan-Wigner Fock space.

use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{trotterize, Circuit, Gate, TrotterPlan};
use crate::linalg::{exp_i_hermitian, CMatrix};
use crate::pauli::{jordan_wigner, projector_to_pauli, FermionOperatorString, Ladder, PauliSum};
use crate::statevector::{check_qubits, BasisIndex, Statevector};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Encoding {
    /// One qubit per orbital, single-particle states of Hamming weight one.
    ReciprocalOrbital,
    /// Each orbital is one computational basis state.
    Compact,
    /// Fixed-particle-number Fock states under the Jordan-Wigner mapping.
    JordanWignerFock,
}

/// The ordered computational basis vectors `|z_0>, |z_1>, ...` spanning the
/// subspace in which eigenstates are sought.
#[derive(Clone, Debug)]
pub struct ActiveSpace {
    n_qubits: usize,
    basis: Vec<BasisIndex>,
    encoding: Encoding,
    transitions: OnceLock<std::result::Result<Vec<PauliSum>, String>>,
}

impl PartialEq for ActiveSpace {
    fn eq(&self, other: &Self) -> bool {
        self.n_qubits == other.n_qubits && self.basis == other.basis && self.encoding == other.encoding
    }
}

impl ActiveSpace {
    pub fn new(n_qubits: usize, basis: Vec<BasisIndex>, encoding: Encoding) -> Result<Self> {
        check_qubits(n_qubits)?;
        if basis.is_empty() {
            return Err(Error::InvalidParameters("empty active space".into()));
        }
        for (i, z) in basis.iter().enumerate() {
            z.check(n_qubits)?;
            if basis[..i].contains(z) {
                return Err(Error::InvalidParameters(format!("duplicate basis vector {}", z.label(n_qubits))));
            }
        }
        match encoding {
            Encoding::ReciprocalOrbital => {
                if let Some(z) = basis.iter().find(|z| z.weight() != 1) {
                    return Err(Error::Encoding(format!(
                        "reciprocal-orbital basis vector {} must have Hamming weight one",
                        z.label(n_qubits)
                    )));
                }
            }
            Encoding::JordanWignerFock => {
                let w = basis[0].weight();
                if let Some(z) = basis.iter().find(|z| z.weight() != w) {
                    return Err(Error::Encoding(format!(
                        "Fock basis vector {} does not have particle number {w}",
                        z.label(n_qubits)
                    )));
                }
            }
            Encoding::Compact => {}
        }
        Ok(Self { n_qubits, basis, encoding, transitions: OnceLock::new() })
    }

    /// `|100..>, |010..>, ...`: orbital `i` on qubit `i`.
    pub fn reciprocal_orbital(n_orbitals: usize) -> Result<Self> {
        check_qubits(n_orbitals)?;
        let basis = (0..n_orbitals).map(|i| BasisIndex(1 << i)).collect();
        Self::new(n_orbitals, basis, Encoding::ReciprocalOrbital)
    }

    /// Every basis state of the register, in ascending ket-label order
    /// (`|00>, |01>, |10>, |11>` for two qubits).
    pub fn compact(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let basis = labels_ascending(n_qubits).map(|l| BasisIndex::from_label(&l)).collect::<Result<_>>()?;
        Self::new(n_qubits, basis, Encoding::Compact)
    }

    /// All states with `n_particles` occupied modes, in descending ket-label
    /// order (`|1100>, |1010>, |1001>, |0110>, |0101>, |0011>` for 2 in 4).
    pub fn jordan_wigner_fock(n_modes: usize, n_particles: usize) -> Result<Self> {
        check_qubits(n_modes)?;
        if n_particles > n_modes {
            return Err(Error::InvalidParameters(format!("{n_particles} particles in {n_modes} modes")));
        }
        let mut labels: Vec<String> =
            labels_ascending(n_modes).filter(|l| l.chars().filter(|&c| c == '1').count() == n_particles).collect();
        labels.reverse();
        let basis = labels.iter().map(|l| BasisIndex::from_label(l)).collect::<Result<_>>()?;
        Self::new(n_modes, basis, Encoding::JordanWignerFock)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of basis vectors `N`.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisIndex] {
        &self.basis
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn labels(&self) -> Vec<String> {
        self.basis.iter().map(|z| z.label(self.n_qubits)).collect()
    }

    pub fn reference_state(&self, i: usize) -> Result<Statevector> {
        let z = self.basis.get(i).ok_or(Error::IndexOutOfRange { index: i, n_qubits: self.n_qubits })?;
        Statevector::from_basis(self.n_qubits, *z)
    }

    /// `<z_i| m |z_j>` over the active basis.
    pub fn restrict(&self, m: &CMatrix) -> CMatrix {
        CMatrix::from_fn(self.dim(), self.dim(), |i, j| m[(self.basis[i].0, self.basis[j].0)])
    }

    /// Active-space amplitudes `<z_i|state>`.
    pub fn project(&self, state: &Statevector) -> Vec<Complex64> {
        self.basis.iter().map(|z| state.amplitude(*z)).collect()
    }

    /// The operator `|z_a><z_b|` for active indices `a, b`, expressed in this
    /// space's encoding.
    pub fn transition(&self, a: usize, b: usize) -> Result<&PauliSum> {
        let n = self.dim();
        if a >= n || b >= n {
            return Err(Error::IndexOutOfRange { index: a.max(b), n_qubits: self.n_qubits });
        }
        let table = self.transitions.get_or_init(|| self.build_transitions().map_err(|e| e.to_string()));
        match table {
            Ok(t) => Ok(&t[a * n + b]),
            Err(msg) => Err(Error::Encoding(msg.clone())),
        }
    }

    fn build_transitions(&self) -> Result<Vec<PauliSum>> {
        let n = self.n_qubits;
        match self.encoding {
            Encoding::Compact => {
                let mut out = Vec::with_capacity(self.dim() * self.dim());
                for &za in &self.basis {
                    for &zb in &self.basis {
                        out.push(projector_to_pauli(za, zb, n)?);
                    }
                }
                Ok(out)
            }
            Encoding::JordanWignerFock => {
                let vacuum = projector_to_pauli(BasisIndex(0), BasisIndex(0), n)?;
                let creators = self
                    .basis
                    .iter()
                    .map(|&z| jordan_wigner(&creation_string(z, n), n))
                    .collect::<Result<Vec<_>>>()?;
                let mut out = Vec::with_capacity(self.dim() * self.dim());
                for ca in &creators {
                    let left = ca.multiply(&vacuum)?;
                    for cb in &creators {
                        out.push(left.multiply(&cb.adjoint())?);
                    }
                }
                Ok(out)
            }
            Encoding::ReciprocalOrbital => {
                Err(Error::Encoding("hyperspherical operators need a compact or jordan-wigner-fock space".into()))
            }
        }
    }
}

fn labels_ascending(n: usize) -> impl Iterator<Item = String> {
    (0..1usize << n).map(move |v| format!("{v:0n$b}"))
}

/// `A†_z`: creation operators for the occupied modes of `z`, highest mode
/// leftmost.
pub fn creation_string(z: BasisIndex, n_modes: usize) -> FermionOperatorString {
    let factors = (0..n_modes).rev().filter(|&p| z.bit(p)).map(|p| (p, Ladder::Create)).collect();
    FermionOperatorString::new(factors, Complex64::new(1.0, 0.0))
}

/// How `Omega_l = exp(i pi H_l)` is realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exponentiation {
    /// Exact dense matrix exponential.
    Dense,
    /// Symmetrized product formula with the given order.
    Trotter(u32),
}

impl fmt::Display for Exponentiation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponentiation::Dense => write!(f, "dense"),
            Exponentiation::Trotter(r) => write!(f, "{r}"),
        }
    }
}

impl std::str::FromStr for Exponentiation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("dense") {
            return Ok(Exponentiation::Dense);
        }
        match s.parse::<u32>() {
            Ok(r) if r >= 1 => Ok(Exponentiation::Trotter(r)),
            _ => Err(Error::Config(format!("trotter order must be `dense` or a positive integer, got {s:?}"))),
        }
    }
}

impl Serialize for Exponentiation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponentiation::Dense => s.serialize_str("dense"),
            Exponentiation::Trotter(r) => s.serialize_u32(*r),
        }
    }
}

impl<'de> Deserialize<'de> for Exponentiation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Order(u32),
            Name(String),
        }
        let raw = Raw::deserialize(d)?;
        let text = match raw {
            Raw::Order(r) => r.to_string(),
            Raw::Name(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Hyperspherical amplitude parameters for level `l` over `N` basis vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct HypersphericalParams {
    pub t: Vec<f64>,
    /// Phases in turns.
    pub alpha: Vec<f64>,
    pub level: usize,
}

impl HypersphericalParams {
    pub fn new(level: usize, t: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        let p = Self { t, alpha, level };
        p.validate()?;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.t.len()
    }

    /// Free parameters at `level`: `t_l..t_{N-2}` then `alpha_{l+1}..alpha_{N-1}`.
    pub fn n_free(level: usize, n: usize) -> usize {
        2 * n.saturating_sub(level + 1)
    }

    /// Builds parameters from the free-coordinate vector. Phases are reduced
    /// modulo one turn; `t` values must already lie in `[0, 1]`.
    pub fn from_free(level: usize, n: usize, free: &[f64]) -> Result<Self> {
        if level >= n {
            return Err(Error::InvalidParameters(format!("level {level} outside active space of size {n}")));
        }
        let k = n - 1 - level;
        if free.len() != 2 * k {
            return Err(Error::InvalidParameters(format!("expected {} free parameters, got {}", 2 * k, free.len())));
        }
        let mut t = vec![0.0; n];
        let mut alpha = vec![0.0; n];
        t[level..n - 1].copy_from_slice(&free[..k]);
        t[n - 1] = 1.0;
        for (a, &x) in alpha[level + 1..].iter_mut().zip(&free[k..]) {
            *a = x.rem_euclid(1.0);
        }
        Self::new(level, t, alpha)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.t.len();
        let bad = |msg: String| Err(Error::InvalidParameters(msg));
        if n == 0 || self.alpha.len() != n {
            return bad(format!("t and alpha lengths {} and {} must match and be nonzero", n, self.alpha.len()));
        }
        if self.level >= n {
            return bad(format!("level {} outside active space of size {n}", self.level));
        }
        for (z, (&t, &a)) in self.t.iter().zip(&self.alpha).enumerate() {
            if !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&a) {
                return bad(format!("parameter out of [0, 1] at index {z}: t = {t}, alpha = {a}"));
            }
            if z < self.level && t != 0.0 {
                return bad(format!("t[{z}] must be 0 below level {}", self.level));
            }
            if z <= self.level && a != 0.0 {
                return bad(format!("alpha[{z}] must be 0 up to level {}", self.level));
            }
        }
        if self.t[n - 1] != 1.0 {
            return bad(format!("t[{}] must be 1", n - 1));
        }
        Ok(())
    }
}

/// `phi_z = r_z exp(2 pi i alpha_z)` with
/// `r_z = sin(pi t_z / 2) prod_{i<z} cos(pi t_i / 2)`.
pub fn amplitudes(p: &HypersphericalParams) -> Result<Vec<Complex64>> {
    p.validate()?;
    let mut out = Vec::with_capacity(p.dim());
    let mut carry = 1.0;
    for (&t, &a) in p.t.iter().zip(&p.alpha) {
        let (s, c) = (PI * t / 2.0).sin_cos();
        out.push(Complex64::from_polar(s * carry, 2.0 * PI * a));
        carry *= c;
    }
    for amp in &mut out[..p.level] {
        *amp = Complex64::new(0.0, 0.0);
    }
    Ok(out)
}

/// `T_l = sum_{z<l} |z><z| + sum_{z>=l} phi_z |z><l|`.
pub fn build_t(p: &HypersphericalParams, space: &ActiveSpace) -> Result<PauliSum> {
    if p.dim() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: p.dim() });
    }
    let phi = amplitudes(p)?;
    let l = p.level;
    let mut t = PauliSum::zero(space.n_qubits());
    for z in 0..l {
        t = t.add(space.transition(z, z)?)?;
    }
    for (z, &amp) in phi.iter().enumerate().skip(l) {
        if amp.norm() > 0.0 {
            t = t.add(&space.transition(z, l)?.scale(amp))?;
        }
    }
    Ok(t)
}

/// `H_l = (T_l + T_l†) / 2`.
pub fn build_generator(p: &HypersphericalParams, space: &ActiveSpace) -> Result<PauliSum> {
    let t = build_t(p, space)?;
    let mut h = t.add(&t.adjoint())?.scale(Complex64::new(0.5, 0.0));
    // drop the rounding residue left on the imaginary parts
    h = PauliSum::from_terms(h.n_qubits(), h.iter().map(|(w, c)| (*w, Complex64::new(c.re, 0.0))))?;
    Ok(h)
}

/// `Omega_l = exp(i pi H_l)` as a circuit.
pub fn build_omega(p: &HypersphericalParams, space: &ActiveSpace, exponentiation: Exponentiation) -> Result<Circuit> {
    let h = build_generator(p, space)?;
    match exponentiation {
        Exponentiation::Dense => {
            let u = exp_i_hermitian(&h.to_dense()?, PI);
            let mut c = Circuit::new(space.n_qubits())?;
            c.push(Gate::full_register(u)?)?;
            Ok(c)
        }
        Exponentiation::Trotter(r) => trotterize(&TrotterPlan::new(h, PI, r)?),
    }
}

/// One `(theta, phi)` pair per A gate; level `l` uses `N - 1 - l` gates.
#[derive(Clone, Debug, PartialEq)]
pub struct AGateChainParams {
    pub angles: Vec<(f64, f64)>,
    pub level: usize,
}

impl AGateChainParams {
    pub fn from_free(level: usize, free: &[f64]) -> Result<Self> {
        if !free.len().is_multiple_of(2) {
            return Err(Error::InvalidParameters("A-gate parameters come in (theta, phi) pairs".into()));
        }
        Ok(Self { angles: free.chunks(2).map(|c| (c[0], c[1])).collect(), level })
    }
}

/// A gates on consecutive orbital pairs starting at orbital `l`.
pub fn build_agate_chain(p: &AGateChainParams, space: &ActiveSpace) -> Result<Circuit> {
    if space.encoding() != Encoding::ReciprocalOrbital {
        return Err(Error::Encoding("A-gate chains need a reciprocal-orbital space".into()));
    }
    let n = space.dim();
    if p.level >= n || p.angles.len() != n - 1 - p.level {
        return Err(Error::InvalidParameters(format!(
            "level {} chain over {n} orbitals needs {} gates, got {}",
            p.level,
            n.saturating_sub(p.level + 1),
            p.angles.len()
        )));
    }
    let qubit = |i: usize| space.basis()[i].0.trailing_zeros() as usize;
    let mut c = Circuit::new(space.n_qubits())?;
    for (j, &(theta, phi)) in p.angles.iter().enumerate() {
        let i = p.level + j;
        c.push(Gate::agate(qubit(i), qubit(i + 1), theta, phi))?;
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    AGateChain,
    HypersphericalCompact,
    HypersphericalManyBody,
}

impl Family {
    pub fn encoding(self) -> Encoding {
        match self {
            Family::AGateChain => Encoding::ReciprocalOrbital,
            Family::HypersphericalCompact => Encoding::Compact,
            Family::HypersphericalManyBody => Encoding::JordanWignerFock,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::AGateChain => "a-gate-chain",
            Family::HypersphericalCompact => "hyperspherical-compact",
            Family::HypersphericalManyBody => "hyperspherical-many-body",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Family::AGateChain, Family::HypersphericalCompact, Family::HypersphericalManyBody]
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown ansatz family {s:?}")))
    }
}

/// Range of each A-gate angle; wider than one period so every angle has an
/// interior representative.
const ANGLE_RANGE: (f64, f64) = (-1.5 * PI, 1.5 * PI);
/// Range of each phase coordinate in turns, reduced modulo one before use.
const PHASE_RANGE: (f64, f64) = (-0.5, 1.5);

/// A circuit family bound to an active space and an exponentiation mode.
#[derive(Clone, Debug)]
pub struct Ansatz {
    family: Family,
    space: ActiveSpace,
    exponentiation: Exponentiation,
}

impl Ansatz {
    pub fn new(family: Family, space: ActiveSpace, exponentiation: Exponentiation) -> Result<Self> {
        if space.encoding() != family.encoding() {
            return Err(Error::Encoding(format!(
                "{family} needs a {:?} active space, got {:?}",
                family.encoding(),
                space.encoding()
            )));
        }
        if let Exponentiation::Trotter(0) = exponentiation {
            return Err(Error::InvalidParameters("Trotter order must be at least 1".into()));
        }
        Ok(Self { family, space, exponentiation })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn space(&self) -> &ActiveSpace {
        &self.space
    }

    pub fn exponentiation(&self) -> Exponentiation {
        self.exponentiation
    }

    pub fn n_params(&self, level: usize) -> usize {
        2 * self.space.dim().saturating_sub(level + 1)
    }

    /// Optimizer box for the free parameters at `level`.
    pub fn bounds(&self, level: usize) -> (Vec<f64>, Vec<f64>) {
        let k = self.n_params(level) / 2;
        match self.family {
            Family::AGateChain => (vec![ANGLE_RANGE.0; 2 * k], vec![ANGLE_RANGE.1; 2 * k]),
            _ => {
                let mut lo = vec![0.0; k];
                let mut hi = vec![1.0; k];
                lo.extend(std::iter::repeat_n(PHASE_RANGE.0, k));
                hi.extend(std::iter::repeat_n(PHASE_RANGE.1, k));
                (lo, hi)
            }
        }
    }

    /// `V_l(params)`.
    pub fn circuit(&self, level: usize, params: &[f64]) -> Result<Circuit> {
        match self.family {
            Family::AGateChain => build_agate_chain(&AGateChainParams::from_free(level, params)?, &self.space),
            _ => {
                let p = HypersphericalParams::from_free(level, self.space.dim(), params)?;
                build_omega(&p, &self.space, self.exponentiation)
            }
        }
    }
}

/// `Omega_0 ... Omega_{l-1} V_l(params) |z_l>`: the new circuit acts first,
/// then the frozen ones from the highest index down.
pub fn prepare(ansatz: &Ansatz, level: usize, params: &[f64], frozen: &[Circuit]) -> Result<Statevector> {
    if frozen.len() != level {
        return Err(Error::InvalidParameters(format!(
            "level {level} needs {level} frozen circuits, got {}",
            frozen.len()
        )));
    }
    let v = ansatz.circuit(level, params)?;
    stack(ansatz.space(), level, &v, frozen)
}

/// `frozen[0] ... frozen[l-1] top |z_l>`.
pub fn stack(space: &ActiveSpace, level: usize, top: &Circuit, frozen: &[Circuit]) -> Result<Statevector> {
    let mut state = space.reference_state(level)?;
    if top.n_qubits() != state.n_qubits() {
        return Err(Error::DimensionMismatch { expected: state.n_qubits(), found: top.n_qubits() });
    }
    top.run_in_place(&mut state);
    for c in frozen.iter().rev() {
        if c.n_qubits() != state.n_qubits() {
            return Err(Error::DimensionMismatch { expected: state.n_qubits(), found: c.n_qubits() });
        }
        c.run_in_place(&mut state);
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_free(ansatz: &Ansatz, level: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let (lo, hi) = ansatz.bounds(level);
        lo.iter().zip(&hi).map(|(a, b)| rng.gen_range(*a..=*b)).collect()
    }

    #[test]
    fn spaces_follow_listed_orders() {
        let r = ActiveSpace::reciprocal_orbital(4).unwrap();
        assert_eq!(r.labels(), ["1000", "0100", "0010", "0001"]);
        let cpt = ActiveSpace::compact(2).unwrap();
        assert_eq!(cpt.labels(), ["00", "01", "10", "11"]);
        let fock = ActiveSpace::jordan_wigner_fock(4, 2).unwrap();
        assert_eq!(fock.labels(), ["1100", "1010", "1001", "0110", "0101", "0011"]);
    }

    #[test]
    fn space_validation() {
        assert!(ActiveSpace::new(2, vec![BasisIndex(1), BasisIndex(1)], Encoding::Compact).is_err());
        assert!(ActiveSpace::new(2, vec![BasisIndex(3)], Encoding::ReciprocalOrbital).is_err());
        assert!(ActiveSpace::new(3, vec![BasisIndex(3), BasisIndex(1)], Encoding::JordanWignerFock).is_err());
        assert!(ActiveSpace::new(2, vec![BasisIndex(4)], Encoding::Compact).is_err());
    }

    #[test]
    fn creation_string_is_descending() {
        let z = BasisIndex::from_label("0011").unwrap();
        assert_eq!(creation_string(z, 4).factors, vec![(3, Ladder::Create), (2, Ladder::Create)]);
    }

    #[test]
    fn amplitude_examples() {
        let a = amplitudes(&HypersphericalParams::new(0, vec![0., 0., 0., 1.], vec![0.; 4]).unwrap()).unwrap();
        assert_eq!(a, vec![c(0., 0.), c(0., 0.), c(0., 0.), c(1., 0.)]);

        let a = amplitudes(&HypersphericalParams::new(0, vec![1., 0.3, 0.6, 1.], vec![0.; 4]).unwrap()).unwrap();
        assert!((a[0] - c(1., 0.)).norm() < 1e-15);
        assert!(a[1..].iter().all(|x| x.norm() < 1e-15));

        // hand evaluation of the product formula at t = 1/2
        let a = amplitudes(&HypersphericalParams::new(0, vec![0.5, 0.5, 0.5, 1.], vec![0.; 4]).unwrap()).unwrap();
        let expected = [0.5f64.sqrt(), 0.5, 0.125f64.sqrt(), 0.125f64.sqrt()];
        for (x, e) in a.iter().zip(expected) {
            assert!((x.re - e).abs() < 1e-12 && x.im.abs() < 1e-15);
        }
        assert!((a.iter().map(|x| x.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parameter_validation() {
        assert!(HypersphericalParams::new(0, vec![1.2, 1.0], vec![0.0, 0.0]).is_err());
        assert!(HypersphericalParams::new(0, vec![0.5, 0.5], vec![0.0, 0.0]).is_err());
        assert!(HypersphericalParams::new(1, vec![0.5, 1.0], vec![0.0, 0.0]).is_err());
        assert!(HypersphericalParams::new(1, vec![0.0, 1.0], vec![0.0, 0.0]).is_ok());
        assert!(HypersphericalParams::new(1, vec![0.0, 1.0], vec![0.0, 0.3]).is_err());
        assert!(HypersphericalParams::new(1, vec![0.0, 1.0], vec![0.2, 0.3]).is_err());
        assert!(HypersphericalParams::new(0, vec![0.5, 1.0], vec![0.1, 0.3]).is_err());
        assert!(amplitudes(&HypersphericalParams { t: vec![-0.1, 1.0], alpha: vec![0.0; 2], level: 0 }).is_err());
    }

    #[test]
    fn from_free_wraps_phases() {
        let p = HypersphericalParams::from_free(1, 4, &[0.2, 0.4, 1.25, -0.25]).unwrap();
        assert_eq!(p.t, vec![0.0, 0.2, 0.4, 1.0]);
        assert_eq!(p.alpha, vec![0.0, 0.0, 0.25, 0.75]);
        assert_eq!(HypersphericalParams::n_free(1, 4), 4);
        assert!(HypersphericalParams::from_free(1, 4, &[0.2]).is_err());
    }

    #[test]
    fn t_operator_columns() {
        let space = ActiveSpace::compact(2).unwrap();
        let p = HypersphericalParams::new(0, vec![0.3, 0.7, 0.2, 1.0], vec![0.0, 0.1, 0.6, 0.9]).unwrap();
        let phi = amplitudes(&p).unwrap();
        let t = space.restrict(&build_t(&p, &space).unwrap().to_dense().unwrap());
        for z in 0..4 {
            assert!((t[(z, 0)] - phi[z]).norm() < 1e-12);
        }

        let p = HypersphericalParams::new(2, vec![0.0, 0.0, 0.4, 1.0], vec![0.0, 0.0, 0.0, 0.35]).unwrap();
        let t = build_t(&p, &space).unwrap().to_dense().unwrap();
        for i in 0..2 {
            let zi = space.basis()[i].0;
            for row in 0..4 {
                let expected = if row == zi { 1.0 } else { 0.0 };
                assert!((t[(row, zi)] - c(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn fock_encoding_matches_compact_construction() {
        let fock = ActiveSpace::jordan_wigner_fock(4, 2).unwrap();
        let compact = ActiveSpace::compact(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for level in 0..3 {
            let free: Vec<f64> = (0..HypersphericalParams::n_free(level, 6)).map(|_| rng.gen::<f64>()).collect();
            let p = HypersphericalParams::from_free(level, 6, &free).unwrap();
            let tf = fock.restrict(&build_t(&p, &fock).unwrap().to_dense().unwrap());
            // compact space on three qubits restricted to its first six vectors
            let basis6 = compact.basis()[..6].to_vec();
            let six = ActiveSpace::new(3, basis6, Encoding::Compact).unwrap();
            let tc = six.restrict(&build_t(&p, &six).unwrap().to_dense().unwrap());
            assert!(max_abs_diff(&tf, &tc) < 1e-12, "level {level}");
        }
        // the Fock operator must vanish outside the two-particle sector
        let p = HypersphericalParams::from_free(0, 6, &[0.3; 10]).unwrap();
        let full = build_t(&p, &fock).unwrap().to_dense().unwrap();
        for row in 0..16usize {
            for col in 0..16usize {
                if row.count_ones() != 2 || col.count_ones() != 2 {
                    assert!(full[(row, col)].norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn dense_omega_structure() {
        let space = ActiveSpace::compact(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for level in 0..4 {
            let free: Vec<f64> = (0..HypersphericalParams::n_free(level, 4)).map(|_| rng.gen::<f64>()).collect();
            let p = HypersphericalParams::from_free(level, 4, &free).unwrap();
            let u = space.restrict(&build_omega(&p, &space, Exponentiation::Dense).unwrap().unitary().unwrap());
            for i in 0..level {
                assert!(u[(i, level)].norm() < 1e-10);
                assert!((u[(i, i)].norm() - 1.0).abs() < 1e-10);
            }
            // prepares phi_l up to a global phase
            let phi = amplitudes(&p).unwrap();
            let overlap: Complex64 = (0..4).map(|z| phi[z].conj() * u[(z, level)]).sum();
            assert!((overlap.norm() - 1.0).abs() < 1e-10, "level {level}: {overlap}");
        }
    }

    #[test]
    fn trotter_leakage_shrinks_with_order() {
        let space = ActiveSpace::compact(2).unwrap();
        let p = HypersphericalParams::from_free(1, 4, &[0.35, 0.6, 0.2, 0.7]).unwrap();
        let leakage = |r: u32| {
            let u = build_omega(&p, &space, Exponentiation::Trotter(r)).unwrap().unitary().unwrap();
            let col = space.basis()[1].0;
            u[(space.basis()[0].0, col)].norm()
        };
        let (l1, l3) = (leakage(1), leakage(3));
        assert!(l3 < l1, "{l1} {l3}");
    }

    #[test]
    fn agate_chain_examples() {
        let space = ActiveSpace::reciprocal_orbital(4).unwrap();
        let ansatz = Ansatz::new(Family::AGateChain, space.clone(), Exponentiation::Dense).unwrap();
        let state = prepare(&ansatz, 0, &[0.0, 0.4, 0.0, -1.0, 0.0, 2.0], &[]).unwrap();
        assert!((state.amplitude(space.basis()[0]).norm() - 1.0).abs() < 1e-15);

        let v1 = build_agate_chain(&AGateChainParams { angles: vec![(0.7, 0.2), (1.1, -0.4)], level: 1 }, &space)
            .unwrap();
        assert_eq!(v1.len(), 2);
        assert_eq!(v1.gates()[0].targets, vec![1, 2]);
        let out = v1.run(&space.reference_state(1).unwrap()).unwrap();
        assert_eq!(out.amplitude(space.basis()[0]), c(0.0, 0.0));
        assert!(out.amplitude(space.basis()[2]).norm() > 0.1);

        assert!(build_agate_chain(&AGateChainParams { angles: vec![(0.1, 0.1)], level: 0 }, &space).is_err());
        let compact = ActiveSpace::compact(2).unwrap();
        assert!(build_agate_chain(&AGateChainParams { angles: vec![(0.1, 0.1); 3], level: 0 }, &compact).is_err());
    }

    #[test]
    fn agate_chain_reaches_every_orbital() {
        // theta = pi/2 transfers the excitation fully; stop the transfer at orbital k
        let space = ActiveSpace::reciprocal_orbital(4).unwrap();
        let half = std::f64::consts::FRAC_PI_2;
        for k in 0..4 {
            let angles: Vec<(f64, f64)> = (0..3).map(|j| (if j < k { half } else { 0.0 }, 0.0)).collect();
            let circ = build_agate_chain(&AGateChainParams { angles, level: 0 }, &space).unwrap();
            let out = circ.run(&space.reference_state(0).unwrap()).unwrap();
            assert!((out.amplitude(space.basis()[k]).norm() - 1.0).abs() < 1e-12, "orbital {k}");
        }
    }

    #[test]
    fn family_encoding_must_match() {
        assert!(Ansatz::new(Family::AGateChain, ActiveSpace::compact(2).unwrap(), Exponentiation::Dense).is_err());
        assert!(Ansatz::new(
            Family::HypersphericalManyBody,
            ActiveSpace::jordan_wigner_fock(4, 2).unwrap(),
            Exponentiation::Trotter(0)
        )
        .is_err());
        let space = ActiveSpace::reciprocal_orbital(3).unwrap();
        assert!(build_t(&HypersphericalParams::from_free(0, 3, &[0.1; 4]).unwrap(), &space).is_err());
    }

    #[test]
    fn prepare_checks_frozen_count() {
        let ansatz = Ansatz::new(Family::HypersphericalCompact, ActiveSpace::compact(1).unwrap(), Exponentiation::Dense)
            .unwrap();
        assert!(prepare(&ansatz, 1, &[], &[]).is_err());
        let s = prepare(&ansatz, 0, &[0.5, 0.5], &[]).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stacked_states_are_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cases = [
            (Family::AGateChain, ActiveSpace::reciprocal_orbital(4).unwrap()),
            (Family::HypersphericalCompact, ActiveSpace::compact(2).unwrap()),
            (Family::HypersphericalManyBody, ActiveSpace::jordan_wigner_fock(4, 2).unwrap()),
        ];
        for (family, space) in cases {
            let ansatz = Ansatz::new(family, space.clone(), Exponentiation::Dense).unwrap();
            let mut frozen = Vec::new();
            let mut states: Vec<Statevector> = Vec::new();
            for level in 0..space.dim() {
                let free = random_free(&ansatz, level, &mut rng);
                let state = prepare(&ansatz, level, &free, &frozen).unwrap();
                for prev in &states {
                    assert!(prev.inner_product(&state).unwrap().norm() < 1e-10, "{family} level {level}");
                }
                states.push(state);
                frozen.push(ansatz.circuit(level, &free).unwrap());
            }
        }
    }
}
