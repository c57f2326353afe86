//! Pauli-word algebra, projector expansion and the Jordan-Wigner mapping.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::CMatrix;
use crate::statevector::{check_qubits, BasisIndex, Statevector};
use crate::{Error, Result};

/// Coefficients with magnitude below this are dropped after every simplify.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// Imaginary residue tolerated on a Hermitian coefficient or expectation value.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const IM: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Phase `p` and letter `c` with `self * other = p * c`.
    fn product(self, other: Pauli) -> (Complex64, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, b) => (ONE, b),
            (a, I) => (ONE, a),
            (a, b) if a == b => (ONE, I),
            (X, Y) => (IM, Z),
            (Y, Z) => (IM, X),
            (Z, X) => (IM, Y),
            (Y, X) => (-IM, Z),
            (Z, Y) => (-IM, X),
            (X, Z) => (-IM, Y),
            _ => unreachable!(),
        }
    }
}

/// A tensor product of single-qubit Pauli operators, stored as x/z bit masks
/// with bit `j` describing qubit `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliWord {
    n_qubits: usize,
    x: u64,
    z: u64,
}

impl PauliWord {
    pub fn identity(n_qubits: usize) -> Self {
        Self { n_qubits, x: 0, z: 0 }
    }

    pub fn from_letters(letters: &[Pauli]) -> Self {
        let mut w = Self::identity(letters.len());
        for (j, &p) in letters.iter().enumerate() {
            w.set(j, p);
        }
        w
    }

    /// Single letter `p` on `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Self {
        let mut w = Self::identity(n_qubits);
        w.set(qubit, p);
        w
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        Pauli::from_bits((self.x >> qubit) & 1 == 1, (self.z >> qubit) & 1 == 1)
    }

    pub fn set(&mut self, qubit: usize, p: Pauli) {
        let (x, z) = p.bits();
        let bit = 1u64 << qubit;
        self.x = if x { self.x | bit } else { self.x & !bit };
        self.z = if z { self.z | bit } else { self.z & !bit };
    }

    pub fn letters(&self) -> Vec<Pauli> {
        (0..self.n_qubits).map(|j| self.get(j)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Qubits carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n_qubits).filter(|&j| self.get(j) != Pauli::I).collect()
    }

    /// Phase and word of the product `self * other`.
    pub fn multiply(&self, other: &PauliWord) -> (Complex64, PauliWord) {
        debug_assert_eq!(self.n_qubits, other.n_qubits);
        let mut phase = ONE;
        let mut out = PauliWord::identity(self.n_qubits);
        let active = (self.x | self.z) & (other.x | other.z);
        for j in 0..self.n_qubits {
            if (active >> j) & 1 == 1 {
                let (p, letter) = self.get(j).product(other.get(j));
                phase *= p;
                out.set(j, letter);
            } else {
                out.set(j, if self.get(j) != Pauli::I { self.get(j) } else { other.get(j) });
            }
        }
        (phase, out)
    }

    /// Image of a basis state: `P|b> = phase * |b'>`.
    pub fn apply_to_basis(&self, b: usize) -> (Complex64, usize) {
        let n_y = (self.x & self.z).count_ones();
        let sign = if (b as u64 & self.z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        let phase = IM.powu(n_y) * sign;
        (phase, b ^ self.x as usize)
    }

    pub fn commutes_with(&self, other: &PauliWord) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }
}

impl Ord for PauliWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n_qubits.cmp(&other.n_qubits).then_with(|| {
            for j in 0..self.n_qubits {
                match self.get(j).cmp(&other.get(j)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for PauliWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.letters() {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|c| Pauli::from_char(c).ok_or_else(|| Error::Parse(format!("invalid Pauli letter {c:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        check_qubits(letters.len()).map_err(|_| Error::Parse(format!("unsupported word length in {s:?}")))?;
        Ok(Self::from_letters(&letters))
    }
}

/// A linear combination of Pauli words, kept in canonical (lexicographic)
/// term order.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliWord, Complex64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        Self { n_qubits, terms: BTreeMap::new() }
    }

    pub fn identity(n_qubits: usize, coefficient: Complex64) -> Self {
        Self::from_word(PauliWord::identity(n_qubits), coefficient)
    }

    pub fn from_word(word: PauliWord, coefficient: Complex64) -> Self {
        let mut s = Self::zero(word.n_qubits());
        s.add_term(word, coefficient);
        s
    }

    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliWord, Complex64)>,
    {
        let mut s = Self::zero(n_qubits);
        for (w, c) in terms {
            if w.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch { expected: n_qubits, found: w.n_qubits() });
            }
            s.add_term(w, c);
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&PauliWord, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, word: &PauliWord) -> Complex64 {
        self.terms.get(word).copied().unwrap_or(ZERO)
    }

    /// Adds `coefficient * word`, merging with an existing term and pruning
    /// the result if it cancels.
    pub fn add_term(&mut self, word: PauliWord, coefficient: Complex64) {
        debug_assert_eq!(word.n_qubits(), self.n_qubits);
        let entry = self.terms.entry(word).or_insert(ZERO);
        *entry += coefficient;
        if entry.norm() < PRUNE_THRESHOLD {
            self.terms.remove(&word);
        }
    }

    fn accumulate(&mut self, word: PauliWord, coefficient: Complex64) {
        *self.terms.entry(word).or_insert(ZERO) += coefficient;
    }

    pub fn simplify(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_THRESHOLD);
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_dims(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.accumulate(*w, *c);
        }
        out.simplify();
        Ok(out)
    }

    pub fn scale(&self, factor: Complex64) -> PauliSum {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.simplify();
        out
    }

    /// Operator product `self * other`, like terms merged.
    pub fn multiply(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_dims(other)?;
        let mut out = PauliSum::zero(self.n_qubits);
        for (wa, ca) in &self.terms {
            for (wb, cb) in &other.terms {
                let (phase, w) = wa.multiply(wb);
                out.accumulate(w, phase * ca * cb);
            }
        }
        out.simplify();
        Ok(out)
    }

    /// Hermitian conjugate; every Pauli word is Hermitian, so only the
    /// coefficients change.
    pub fn adjoint(&self) -> PauliSum {
        PauliSum {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(w, c)| (*w, c.conj())).collect(),
        }
    }

    /// Largest imaginary part over all coefficients.
    pub fn hermiticity_residue(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_residue() <= 1e-12
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        let residue = self.hermiticity_residue();
        if residue > 1e-12 {
            Err(Error::NotHermitian(format!("largest imaginary coefficient {residue:.3e}")))
        } else {
            Ok(())
        }
    }

    /// Real coefficients of a Hermitian sum, in canonical order.
    pub fn real_terms(&self) -> Result<Vec<(PauliWord, f64)>> {
        self.ensure_hermitian()?;
        Ok(self.terms.iter().map(|(w, c)| (*w, c.re)).collect())
    }

    /// `self |state>` as raw amplitudes.
    pub fn apply(&self, state: &Statevector) -> Result<Vec<Complex64>> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: state.n_qubits() });
        }
        let amps = state.amplitudes();
        let mut out = vec![ZERO; amps.len()];
        for (w, c) in &self.terms {
            for (b, a) in amps.iter().enumerate() {
                let (phase, b2) = w.apply_to_basis(b);
                out[b2] += c * phase * a;
            }
        }
        Ok(out)
    }

    /// `<state|self|state>` for a Hermitian sum.
    pub fn expectation(&self, state: &Statevector) -> Result<f64> {
        self.ensure_hermitian()?;
        let value: Complex64 = self
            .apply(state)?
            .iter()
            .zip(state.amplitudes())
            .map(|(h, a)| a.conj() * h)
            .sum();
        if value.im.abs() > HERMITIAN_TOLERANCE {
            return Err(Error::NotHermitian(format!("expectation value has imaginary part {:.3e}", value.im)));
        }
        Ok(value.re)
    }

    pub fn to_dense(&self) -> Result<CMatrix> {
        check_qubits(self.n_qubits)?;
        let dim = 1usize << self.n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        for (w, c) in &self.terms {
            for col in 0..dim {
                let (phase, row) = w.apply_to_basis(col);
                m[(row, col)] += c * phase;
            }
        }
        Ok(m)
    }

    /// One term per line: `<re> <im> <letters>`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (w, c) in &self.terms {
            out.push_str(&format!("{:?} {:?} {}\n", c.re, c.im, w));
        }
        out
    }

    /// Inverse of [`PauliSum::to_text`]. Blank lines and `#` comments are
    /// skipped; the qubit count comes from the first word.
    pub fn parse_text(text: &str) -> Result<PauliSum> {
        let mut sum: Option<PauliSum> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse(format!("line {}: {msg}: {raw:?}", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(err("expected `<re> <im> <letters>`"));
            }
            let re: f64 = fields[0].parse().map_err(|_| err("bad real part"))?;
            let im: f64 = fields[1].parse().map_err(|_| err("bad imaginary part"))?;
            if !re.is_finite() || !im.is_finite() {
                return Err(err("non-finite coefficient"));
            }
            let word: PauliWord = fields[2].parse()?;
            let sum = sum.get_or_insert_with(|| PauliSum::zero(word.n_qubits()));
            if word.n_qubits() != sum.n_qubits {
                return Err(err("inconsistent word length"));
            }
            sum.add_term(word, Complex64::new(re, im));
        }
        sum.ok_or_else(|| Error::Parse("no terms".into()))
    }

    fn check_dims(&self, other: &PauliSum) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            Err(Error::DimensionMismatch { expected: self.n_qubits, found: other.n_qubits })
        } else {
            Ok(())
        }
    }
}

/// Pauli expansion of `|z><z'|` from the single-qubit dictionary
/// `|0><0| = (I+Z)/2`, `|1><1| = (I-Z)/2`, `|0><1| = (X+iY)/2`,
/// `|1><0| = (X-iY)/2`.
pub fn projector_to_pauli(z: BasisIndex, z_prime: BasisIndex, n_qubits: usize) -> Result<PauliSum> {
    check_qubits(n_qubits)?;
    z.check(n_qubits)?;
    z_prime.check(n_qubits)?;
    let half = Complex64::new(0.5, 0.0);
    let mut acc: Vec<(PauliWord, Complex64)> = vec![(PauliWord::identity(n_qubits), ONE)];
    for q in 0..n_qubits {
        let factors: [(Pauli, Complex64); 2] = match (z.bit(q), z_prime.bit(q)) {
            (false, false) => [(Pauli::I, half), (Pauli::Z, half)],
            (true, true) => [(Pauli::I, half), (Pauli::Z, -half)],
            (false, true) => [(Pauli::X, half), (Pauli::Y, IM * 0.5)],
            (true, false) => [(Pauli::X, half), (Pauli::Y, -IM * 0.5)],
        };
        acc = acc
            .into_iter()
            .flat_map(|(w, c)| {
                factors.iter().map(move |&(p, f)| {
                    let mut w2 = w;
                    w2.set(q, p);
                    (w2, c * f)
                })
            })
            .collect();
    }
    PauliSum::from_terms(n_qubits, acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// A product of fermionic ladder operators, leftmost factor acting last.
#[derive(Clone, Debug, PartialEq)]
pub struct FermionOperatorString {
    pub factors: Vec<(usize, Ladder)>,
    pub coefficient: Complex64,
}

impl FermionOperatorString {
    pub fn new(factors: Vec<(usize, Ladder)>, coefficient: Complex64) -> Self {
        Self { factors, coefficient }
    }

    pub fn create(mode: usize) -> Self {
        Self::new(vec![(mode, Ladder::Create)], ONE)
    }

    pub fn annihilate(mode: usize) -> Self {
        Self::new(vec![(mode, Ladder::Annihilate)], ONE)
    }
}

/// `a_p -> (prod_{q<p} Z_q)(X_p + iY_p)/2`, with `a†_p` its adjoint.
pub fn ladder_to_pauli(mode: usize, ladder: Ladder, n_qubits: usize) -> Result<PauliSum> {
    check_qubits(n_qubits)?;
    if mode >= n_qubits {
        return Err(Error::IndexOutOfRange { index: mode, n_qubits });
    }
    let mut x = PauliWord::identity(n_qubits);
    for q in 0..mode {
        x.set(q, Pauli::Z);
    }
    let mut y = x;
    x.set(mode, Pauli::X);
    y.set(mode, Pauli::Y);
    let y_coeff = match ladder {
        Ladder::Annihilate => IM * 0.5,
        Ladder::Create => -IM * 0.5,
    };
    PauliSum::from_terms(n_qubits, [(x, Complex64::new(0.5, 0.0)), (y, y_coeff)])
}

pub fn jordan_wigner(op: &FermionOperatorString, n_qubits: usize) -> Result<PauliSum> {
    let mut out = PauliSum::identity(n_qubits, op.coefficient);
    for &(mode, ladder) in &op.factors {
        out = out.multiply(&ladder_to_pauli(mode, ladder, n_qubits)?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn word(s: &str) -> PauliWord {
        s.parse().unwrap()
    }

    fn sum(terms: &[(&str, Complex64)]) -> PauliSum {
        let n = terms[0].0.len();
        PauliSum::from_terms(n, terms.iter().map(|(w, k)| (word(w), *k))).unwrap()
    }

    // Independent dense construction of a word by explicit Kronecker products,
    // qubit 0 as the least significant index bit.
    fn dense_word(w: &PauliWord) -> CMatrix {
        let single = |p: Pauli| match p {
            Pauli::I => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ONE]),
            Pauli::X => CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
            Pauli::Y => CMatrix::from_row_slice(2, 2, &[ZERO, -IM, IM, ZERO]),
            Pauli::Z => CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        };
        let mut m = CMatrix::from_element(1, 1, ONE);
        for j in 0..w.n_qubits() {
            m = single(w.get(j)).kronecker(&m);
        }
        m
    }

    fn dense_sum(s: &PauliSum) -> CMatrix {
        let dim = 1 << s.n_qubits();
        let mut m = CMatrix::zeros(dim, dim);
        for (w, k) in s.iter() {
            m += dense_word(w) * *k;
        }
        m
    }

    #[test]
    fn multiplication_table() {
        let xy = sum(&[("X", ONE)]).multiply(&sum(&[("Y", ONE)])).unwrap();
        assert_eq!(xy, sum(&[("Z", IM)]));

        let zz = sum(&[("ZZ", ONE)]).multiply(&sum(&[("ZZ", ONE)])).unwrap();
        assert_eq!(zz, sum(&[("II", ONE)]));

        let p = sum(&[("XI", ONE)]).multiply(&sum(&[("ZZ", ONE)])).unwrap();
        assert_eq!(p, sum(&[("YZ", -IM)]));

        assert!(sum(&[("X", ONE)]).multiply(&sum(&[("XX", ONE)])).is_err());
    }

    #[test]
    fn canonical_order_is_lexicographic() {
        let s = sum(&[("ZI", ONE), ("IX", ONE), ("XY", ONE), ("II", ONE), ("IZ", ONE)]);
        let order: Vec<String> = s.iter().map(|(w, _)| w.to_string()).collect();
        assert_eq!(order, ["II", "IX", "IZ", "XY", "ZI"]);
    }

    #[test]
    fn cancellation_prunes() {
        let a = sum(&[("XZ", ONE), ("ZZ", c(0.5, 0.0))]);
        let b = sum(&[("XZ", -ONE)]);
        let s = a.add(&b).unwrap();
        assert_eq!(s.len(), 1);
        let tiny = sum(&[("XZ", c(1e-13, 0.0))]);
        assert!(tiny.is_empty());
    }

    #[test]
    fn expectation_values() {
        let zero = Statevector::from_basis(1, BasisIndex(0)).unwrap();
        assert!((sum(&[("Z", ONE)]).expectation(&zero).unwrap() - 1.0).abs() < 1e-15);
        let plus = Statevector::from_amplitudes(vec![ONE, ONE]).unwrap();
        assert!((sum(&[("X", ONE)]).expectation(&plus).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(sum(&[("X", IM)]).expectation(&plus), Err(Error::NotHermitian(_))));
        let two = Statevector::from_basis(2, BasisIndex(0)).unwrap();
        assert!(sum(&[("X", ONE)]).expectation(&two).is_err());
    }

    #[test]
    fn projector_dictionary() {
        let p00 = projector_to_pauli(BasisIndex(0), BasisIndex(0), 1).unwrap();
        assert_eq!(p00, sum(&[("I", c(0.5, 0.)), ("Z", c(0.5, 0.))]));
        let p01 = projector_to_pauli(BasisIndex(0), BasisIndex(1), 1).unwrap();
        assert_eq!(p01, sum(&[("X", c(0.5, 0.)), ("Y", c(0., 0.5))]));
        assert!(projector_to_pauli(BasisIndex(4), BasisIndex(0), 2).is_err());
    }

    #[test]
    fn two_qubit_transition_projector() {
        // |01><10| in ket labels; expected terms expanded by hand from the dictionary
        let z = BasisIndex::from_label("01").unwrap();
        let zp = BasisIndex::from_label("10").unwrap();
        let p = projector_to_pauli(z, zp, 2).unwrap();
        let expected = sum(&[
            ("XX", c(0.25, 0.)),
            ("XY", c(0., -0.25)),
            ("YX", c(0., 0.25)),
            ("YY", c(0.25, 0.)),
        ]);
        assert_eq!(p.len(), 4);
        for (w, k) in expected.iter() {
            assert!((p.coefficient(w) - k).norm() < 1e-15, "{w}");
        }
        let mut elementary = CMatrix::zeros(4, 4);
        elementary[(z.0, zp.0)] = ONE;
        assert!(max_abs_diff(&dense_sum(&p), &elementary) < 1e-15);
    }

    #[test]
    fn jordan_wigner_single_mode() {
        let a_dag = jordan_wigner(&FermionOperatorString::create(0), 1).unwrap();
        assert_eq!(a_dag, sum(&[("X", c(0.5, 0.)), ("Y", c(0., -0.5))]));
        let number = FermionOperatorString::new(vec![(0, Ladder::Create), (0, Ladder::Annihilate)], ONE);
        assert_eq!(jordan_wigner(&number, 1).unwrap(), sum(&[("I", c(0.5, 0.)), ("Z", c(-0.5, 0.))]));
        assert!(jordan_wigner(&FermionOperatorString::create(2), 2).is_err());
    }

    #[test]
    fn jordan_wigner_hopping_matches_dense_factors() {
        let op = FermionOperatorString::new(vec![(1, Ladder::Create), (0, Ladder::Annihilate)], ONE);
        let mapped = jordan_wigner(&op, 2).unwrap();
        assert_eq!(mapped.len(), 4);
        let a1_dag = dense_sum(&sum(&[("ZX", c(0.5, 0.)), ("ZY", c(0., -0.5))]));
        let a0 = dense_sum(&sum(&[("XI", c(0.5, 0.)), ("YI", c(0., 0.5))]));
        assert!(max_abs_diff(&dense_sum(&mapped), &(a1_dag * a0)) < 1e-15);
        // moves the particle from mode 0 (index 1) to mode 1 (index 2)
        assert!((dense_sum(&mapped)[(2, 1)] - ONE).norm() < 1e-15);
    }

    #[test]
    fn anticommutators_on_four_modes() {
        let n = 4;
        let id = crate::linalg::identity(16);
        for p in 0..n {
            for q in 0..n {
                let a = ladder_to_pauli(p, Ladder::Annihilate, n).unwrap().to_dense().unwrap();
                let b = ladder_to_pauli(q, Ladder::Create, n).unwrap().to_dense().unwrap();
                let anti = &a * &b + &b * &a;
                let expected = if p == q { id.clone() } else { CMatrix::zeros(16, 16) };
                assert!(max_abs_diff(&anti, &expected) < 1e-12, "{{a_{p}, a†_{q}}}");
                let a2 = ladder_to_pauli(q, Ladder::Annihilate, n).unwrap().to_dense().unwrap();
                assert!(max_abs_diff(&(&a * &a2 + &a2 * &a), &CMatrix::zeros(16, 16)) < 1e-12);
            }
        }
    }

    #[test]
    fn to_dense_examples() {
        let m = sum(&[("I", c(0.5, 0.)), ("Z", c(0.5, 0.))]).to_dense().unwrap();
        assert_eq!(m, CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]));
        let x = sum(&[("X", ONE)]).to_dense().unwrap();
        assert_eq!(x, CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]));
        let s = sum(&[("XY", c(0.3, 0.)), ("ZI", c(-1.2, 0.1)), ("IY", c(0.0, 2.0))]);
        assert!(max_abs_diff(&s.to_dense().unwrap(), &dense_sum(&s)) < 1e-15);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let s = sum(&[("XIYZ", c(0.5, 0.)), ("ZZII", c(-0.125, 1e-3))]);
        let text = s.to_text();
        assert!(text.contains("0.5 0.0 XIYZ"));
        assert_eq!(PauliSum::parse_text(&text).unwrap(), s);
        assert!(PauliSum::parse_text("").is_err());
        assert!(PauliSum::parse_text("0.5 XI").is_err());
        assert!(PauliSum::parse_text("0.5 0 XQ").is_err());
        assert!(PauliSum::parse_text("0.5 0 XI\n1 0 X").is_err());
        let commented = PauliSum::parse_text("# header\n\n1 0 ZZ  # trailing\n").unwrap();
        assert_eq!(commented, sum(&[("ZZ", ONE)]));
    }

    fn pauli_sum_strategy(n: usize) -> impl Strategy<Value = PauliSum> {
        let letter = prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)];
        let term = (prop::collection::vec(letter, n), -1.0f64..1.0, -1.0f64..1.0);
        prop::collection::vec(term, 1..6).prop_map(move |terms| {
            PauliSum::from_terms(n, terms.into_iter().map(|(l, re, im)| (PauliWord::from_letters(&l), c(re, im)))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn multiplication_matches_dense(
            (a, b) in (1usize..=3).prop_flat_map(|n| (pauli_sum_strategy(n), pauli_sum_strategy(n)))
        ) {
            let prod = a.multiply(&b).unwrap();
            let dense = dense_sum(&a) * dense_sum(&b);
            prop_assert!(max_abs_diff(&prod.to_dense().unwrap(), &dense) < 1e-12);
        }

        #[test]
        fn projector_is_elementary_matrix(n in 1usize..=3, zi in 0usize..8, zj in 0usize..8) {
            let dim = 1usize << n;
            let (z, zp) = (BasisIndex(zi % dim), BasisIndex(zj % dim));
            let p = projector_to_pauli(z, zp, n).unwrap();
            let mut elementary = CMatrix::zeros(dim, dim);
            elementary[(z.0, zp.0)] = ONE;
            prop_assert!(max_abs_diff(&p.to_dense().unwrap(), &elementary) < 1e-15);
        }

        #[test]
        fn expectation_matches_quadratic_form(
            s in pauli_sum_strategy(3),
            amps in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8),
        ) {
            let h = s.add(&s.adjoint()).unwrap();
            let state = Statevector::from_amplitudes(amps.into_iter().map(|(a, b)| c(a, b)).collect());
            prop_assume!(state.is_ok());
            let state = state.unwrap();
            let v = nalgebra::DVector::from_column_slice(state.amplitudes());
            let dense = (v.adjoint() * dense_sum(&h) * &v)[(0, 0)];
            prop_assert!((h.expectation(&state).unwrap() - dense.re).abs() < 1e-10);
        }
    }
}
