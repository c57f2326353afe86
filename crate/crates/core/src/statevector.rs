//! Dense n-qubit statevectors.
//!
//! Basis index convention: bit `j` of an index is the state of qubit `j`, and
//! qubit 0 is the leftmost character of a ket label. The label `"1000"`
//! therefore names index 1, and `"0001"` names index 8.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{unitarity_deviation, CMatrix};
use crate::{Error, Result, MAX_DENSE_QUBITS};

/// Tolerance on `u† u = I` accepted by [`Statevector::apply_unitary`].
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// A computational basis state index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BasisIndex(pub usize);

impl BasisIndex {
    /// Parses a ket label such as `"1000"`; the leftmost character is qubit 0.
    pub fn from_label(label: &str) -> Result<Self> {
        let mut value = 0usize;
        for (j, ch) in label.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => value |= 1 << j,
                _ => return Err(Error::Parse(format!("invalid ket label {label:?}"))),
            }
        }
        Ok(BasisIndex(value))
    }

    pub fn label(self, n_qubits: usize) -> String {
        (0..n_qubits)
            .map(|j| if self.bit(j) { '1' } else { '0' })
            .collect()
    }

    pub fn bit(self, qubit: usize) -> bool {
        (self.0 >> qubit) & 1 == 1
    }

    pub fn weight(self) -> u32 {
        self.0.count_ones()
    }

    pub fn check(self, n_qubits: usize) -> Result<Self> {
        if self.0 < (1usize << n_qubits) {
            Ok(self)
        } else {
            Err(Error::IndexOutOfRange { index: self.0, n_qubits })
        }
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn check_qubits(n_qubits: usize) -> Result<()> {
    if (1..=MAX_DENSE_QUBITS).contains(&n_qubits) {
        Ok(())
    } else {
        Err(Error::QubitCount(n_qubits))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    pub fn from_basis(n_qubits: usize, z: BasisIndex) -> Result<Self> {
        check_qubits(n_qubits)?;
        z.check(n_qubits)?;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[z.0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    /// Wraps raw amplitudes, normalizing them. Fails on a zero vector or a
    /// length that is not a power of two.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::DimensionMismatch { expected: len.next_power_of_two().max(2), found: len });
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_qubits(n_qubits)?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameters("statevector has zero or non-finite norm".into()));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, z: BasisIndex) -> Complex64 {
        self.amplitudes[z.0]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`, conjugating `self`.
    pub fn inner_product(&self, other: &Statevector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: other.n_qubits });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Returns a new state with `u` applied to `targets`. The first target is
    /// the most significant bit of `u`'s row index.
    pub fn apply_unitary(&self, u: &CMatrix, targets: &[usize]) -> Result<Statevector> {
        check_targets(targets, self.n_qubits)?;
        let dim = 1usize << targets.len();
        if u.nrows() != dim || u.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: u.nrows() });
        }
        let dev = unitarity_deviation(u);
        if dev > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(dev));
        }
        let mut out = self.clone();
        out.apply_matrix(u, targets);
        Ok(out)
    }

    /// In-place application without validation; callers guarantee distinct,
    /// in-range targets and a square matrix of matching size.
    pub(crate) fn apply_matrix(&mut self, u: &CMatrix, targets: &[usize]) {
        match targets.len() {
            1 => self.apply_1q(
                [[u[(0, 0)], u[(0, 1)]], [u[(1, 0)], u[(1, 1)]]],
                targets[0],
            ),
            _ => self.apply_kq(u, targets),
        }
    }

    pub(crate) fn apply_1q(&mut self, m: [[Complex64; 2]; 2], target: usize) {
        let bit = 1usize << target;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | bit];
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    /// Diagonal single-qubit gate `diag(d0, d1)`.
    pub(crate) fn apply_diag_1q(&mut self, d0: Complex64, d1: Complex64, target: usize) {
        let bit = 1usize << target;
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            *a *= if i & bit == 0 { d0 } else { d1 };
        }
    }

    pub(crate) fn apply_x(&mut self, target: usize) {
        let bit = 1usize << target;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                self.amplitudes.swap(i, i | bit);
            }
        }
    }

    pub(crate) fn apply_cnot(&mut self, control: usize, target: usize) {
        let (c, t) = (1usize << control, 1usize << target);
        for i in 0..self.amplitudes.len() {
            if i & c != 0 && i & t == 0 {
                self.amplitudes.swap(i, i | t);
            }
        }
    }

    fn apply_kq(&mut self, u: &CMatrix, targets: &[usize]) {
        let k = targets.len();
        let dim = 1usize << k;
        let mask: usize = targets.iter().map(|&t| 1usize << t).sum();
        // offset of each local index within the full index space
        let offsets: Vec<usize> = (0..dim)
            .map(|local| {
                (0..k)
                    .filter(|&j| (local >> (k - 1 - j)) & 1 == 1)
                    .map(|j| 1usize << targets[j])
                    .sum()
            })
            .collect();
        let mut buf = vec![Complex64::new(0.0, 0.0); dim];
        for base in 0..self.amplitudes.len() {
            if base & mask != 0 {
                continue;
            }
            for (local, off) in offsets.iter().enumerate() {
                buf[local] = self.amplitudes[base | off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, b) in buf.iter().enumerate() {
                    acc += u[(row, col)] * b;
                }
                self.amplitudes[base | off] = acc;
            }
        }
    }

    pub(crate) fn scale(&mut self, factor: Complex64) {
        for a in &mut self.amplitudes {
            *a *= factor;
        }
    }
}

pub(crate) fn check_targets(targets: &[usize], n_qubits: usize) -> Result<()> {
    let invalid = |reason: &str| Error::InvalidTargets { targets: targets.to_vec(), reason: reason.into() };
    if targets.is_empty() {
        return Err(invalid("no targets"));
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= n_qubits {
            return Err(invalid("qubit out of range"));
        }
        if targets[..i].contains(&t) {
            return Err(invalid("duplicate qubit"));
        }
    }
    Ok(())
}
