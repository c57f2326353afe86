//! Benchmark Hamiltonians: a simple-cubic sp3 tight-binding model and the
//! minimal-basis hydrogen molecule.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ansatz::{ActiveSpace, Encoding};
use crate::linalg::{hermiticity_deviation, CMatrix};
use crate::pauli::{jordan_wigner, FermionOperatorString, Ladder, Pauli, PauliSum, PauliWord};
use crate::{Error, Result};

/// Nearest-neighbour Slater-Koster parameters (eV) of a simple-cubic lattice
/// with one s and three p orbitals per site.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TightBindingParams {
    pub eps_s: f64,
    pub eps_p: f64,
    pub v_ss_sigma: f64,
    pub v_sp_sigma: f64,
    pub v_pp_sigma: f64,
    pub v_pp_pi: f64,
    /// Angstrom.
    pub lattice_constant: f64,
}

impl Default for TightBindingParams {
    fn default() -> Self {
        Self {
            eps_s: -14.0,
            eps_p: 0.0,
            v_ss_sigma: -1.0,
            v_sp_sigma: 1.0,
            v_pp_sigma: 2.0,
            v_pp_pi: -0.5,
            lattice_constant: 1.0,
        }
    }
}

impl TightBindingParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.eps_s,
            self.eps_p,
            self.v_ss_sigma,
            self.v_sp_sigma,
            self.v_pp_sigma,
            self.v_pp_pi,
            self.lattice_constant,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("tight-binding parameters must be finite".into()));
        }
        if self.lattice_constant <= 0.0 {
            return Err(Error::Config("lattice constant must be positive".into()));
        }
        Ok(())
    }
}

/// A wave vector in units of `pi / a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KPoint(pub [f64; 3]);

impl KPoint {
    /// High-symmetry points of the simple-cubic Brillouin zone.
    pub fn named(label: &str) -> Result<Self> {
        Ok(KPoint(match label {
            "G" | "Γ" | "Gamma" => [0.0, 0.0, 0.0],
            "X" => [1.0, 0.0, 0.0],
            "M" => [1.0, 1.0, 0.0],
            "R" => [1.0, 1.0, 1.0],
            _ => return Err(Error::Config(format!("unknown high-symmetry point {label:?}; expected G, X, M or R"))),
        }))
    }

    fn lerp(self, other: KPoint, f: f64) -> KPoint {
        KPoint(std::array::from_fn(|i| self.0[i] + f * (other.0[i] - self.0[i])))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KPath {
    pub waypoints: Vec<String>,
    pub samples_per_segment: usize,
}

impl Default for KPath {
    fn default() -> Self {
        Self { waypoints: ["G", "X", "M", "G", "R"].map(String::from).to_vec(), samples_per_segment: 10 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KSample {
    pub index: usize,
    /// Waypoint name at segment ends, empty in between.
    pub label: String,
    pub segment: usize,
    /// Position within the segment, in `[0, 1]`.
    pub segment_fraction: f64,
    pub k: KPoint,
}

impl KPath {
    /// Points along the path: each segment contributes `samples_per_segment`
    /// points and the final waypoint closes the path. A single waypoint gives
    /// one sample.
    pub fn samples(&self) -> Result<Vec<KSample>> {
        if self.waypoints.is_empty() {
            return Err(Error::Config("k-path needs at least one waypoint".into()));
        }
        let points = self.waypoints.iter().map(|w| KPoint::named(w)).collect::<Result<Vec<_>>>()?;
        if points.len() > 1 && self.samples_per_segment == 0 {
            return Err(Error::Config("samples_per_segment must be positive".into()));
        }
        let mut out = Vec::new();
        for seg in 0..points.len().saturating_sub(1) {
            for j in 0..self.samples_per_segment {
                let f = j as f64 / self.samples_per_segment as f64;
                out.push(KSample {
                    index: out.len(),
                    label: if j == 0 { self.waypoints[seg].clone() } else { String::new() },
                    segment: seg,
                    segment_fraction: f,
                    k: points[seg].lerp(points[seg + 1], f),
                });
            }
        }
        let last = points.len() - 1;
        out.push(KSample {
            index: out.len(),
            label: self.waypoints[last].clone(),
            segment: last.saturating_sub(1),
            segment_fraction: if last == 0 { 0.0 } else { 1.0 },
            k: points[last],
        });
        Ok(out)
    }
}

/// Bloch Hamiltonian in the orbital order (s, p_x, p_y, p_z).
pub fn bloch_hamiltonian(p: &TightBindingParams, k: KPoint) -> CMatrix {
    // k is in units of pi/a, so k_i a = pi k_i
    let ka: [f64; 3] = std::array::from_fn(|i| PI * k.0[i]);
    let cos: [f64; 3] = ka.map(f64::cos);
    let sin: [f64; 3] = ka.map(f64::sin);
    let mut h = CMatrix::zeros(4, 4);
    h[(0, 0)] = Complex64::new(p.eps_s + 2.0 * p.v_ss_sigma * (cos[0] + cos[1] + cos[2]), 0.0);
    for i in 0..3 {
        let sp = Complex64::new(0.0, 2.0 * p.v_sp_sigma * sin[i]);
        h[(0, i + 1)] = sp;
        h[(i + 1, 0)] = sp.conj();
        let (j, l) = ((i + 1) % 3, (i + 2) % 3);
        h[(i + 1, i + 1)] =
            Complex64::new(p.eps_p + 2.0 * p.v_pp_sigma * cos[i] + 2.0 * p.v_pp_pi * (cos[j] + cos[l]), 0.0);
    }
    h
}

/// Maps a Hermitian orbital-basis matrix onto qubits.
///
/// Reciprocal-orbital: one qubit per orbital,
/// `sum_p h_pp (I - Z_p)/2 + sum_{p<q} [Re h_pq (X_p X_q + Y_p Y_q)/2 + Im h_pq (Y_p X_q - X_p Y_q)/2]`.
/// Compact: `sum h_zz' |z><z'|` over the compact basis of `log2(dim)` qubits.
pub fn encode_band_hamiltonian(h: &CMatrix, encoding: Encoding) -> Result<PauliSum> {
    let dev = hermiticity_deviation(h);
    if dev > 1e-12 {
        return Err(Error::NotHermitian(format!("orbital matrix deviates by {dev:.3e}")));
    }
    let n = h.nrows();
    match encoding {
        Encoding::ReciprocalOrbital => {
            let mut out = PauliSum::zero(n);
            let half = |x: f64| Complex64::new(0.5 * x, 0.0);
            for p in 0..n {
                let d = h[(p, p)].re;
                out.add_term(PauliWord::identity(n), half(d));
                out.add_term(PauliWord::single(n, p, Pauli::Z), half(-d));
                for q in p + 1..n {
                    let pair = |a: Pauli, b: Pauli| {
                        let mut w = PauliWord::single(n, p, a);
                        w.set(q, b);
                        w
                    };
                    let (re, im) = (h[(p, q)].re, h[(p, q)].im);
                    out.add_term(pair(Pauli::X, Pauli::X), half(re));
                    out.add_term(pair(Pauli::Y, Pauli::Y), half(re));
                    out.add_term(pair(Pauli::Y, Pauli::X), half(im));
                    out.add_term(pair(Pauli::X, Pauli::Y), half(-im));
                }
            }
            Ok(out)
        }
        Encoding::Compact => {
            if !n.is_power_of_two() || n < 2 {
                return Err(Error::Encoding(format!("compact encoding needs a power-of-two dimension, got {n}")));
            }
            let space = ActiveSpace::compact(n.trailing_zeros() as usize)?;
            let mut out = PauliSum::zero(space.n_qubits());
            for a in 0..n {
                for b in 0..n {
                    if h[(a, b)].norm() > 0.0 {
                        out = out.add(&space.transition(a, b)?.scale(h[(a, b)]))?;
                    }
                }
            }
            Ok(out)
        }
        Encoding::JordanWignerFock => Err(Error::Encoding("band Hamiltonians use reciprocal-orbital or compact".into())),
    }
}

/// Active space matching [`encode_band_hamiltonian`] for an `n`-orbital model.
pub fn band_active_space(n_orbitals: usize, encoding: Encoding) -> Result<ActiveSpace> {
    match encoding {
        Encoding::ReciprocalOrbital => ActiveSpace::reciprocal_orbital(n_orbitals),
        Encoding::Compact if n_orbitals.is_power_of_two() && n_orbitals >= 2 => {
            ActiveSpace::compact(n_orbitals.trailing_zeros() as usize)
        }
        _ => Err(Error::Encoding(format!("no {encoding:?} band space for {n_orbitals} orbitals"))),
    }
}

/// Second-quantized electronic integrals over spin-orbitals. `two_body` is the
/// coefficient of `a†_p a†_q a_r a_s` in
/// `H = E_nuc + sum h_pq a†_p a_q + 1/2 sum h_pqrs a†_p a†_q a_r a_s`,
/// i.e. the physicist integral `<pq|sr>`.
#[derive(Clone, Debug, PartialEq)]
pub struct MolecularIntegrals {
    pub bond_length: f64,
    pub nuclear_repulsion: f64,
    pub one_body: Vec<Vec<f64>>,
    pub two_body: Vec<Vec<Vec<Vec<f64>>>>,
    pub n_spin_orbitals: usize,
    pub n_electrons: usize,
}

const SYMMETRY_TOLERANCE: f64 = 1e-10;

impl MolecularIntegrals {
    pub fn validate(&self) -> Result<()> {
        let n = self.n_spin_orbitals;
        let bad = |msg: String| Err(Error::Integrals(format!("bond length {}: {msg}", self.bond_length)));
        if n == 0 || n > crate::MAX_DENSE_QUBITS {
            return bad(format!("unsupported spin-orbital count {n}"));
        }
        if self.n_electrons > n {
            return bad(format!("{} electrons in {n} spin-orbitals", self.n_electrons));
        }
        if !self.bond_length.is_finite() || self.bond_length <= 0.0 || !self.nuclear_repulsion.is_finite() {
            return bad("bond length and nuclear repulsion must be finite, bond length positive".into());
        }
        if self.one_body.len() != n || self.one_body.iter().any(|r| r.len() != n) {
            return bad(format!("one_body must be {n}x{n}"));
        }
        let shape_ok = self.two_body.len() == n
            && self.two_body.iter().all(|a| {
                a.len() == n && a.iter().all(|b| b.len() == n && b.iter().all(|c| c.len() == n))
            });
        if !shape_ok {
            return bad(format!("two_body must be {n}x{n}x{n}x{n}"));
        }
        for p in 0..n {
            for q in 0..n {
                let v = self.one_body[p][q];
                if !v.is_finite() {
                    return bad(format!("one_body[{p}][{q}] is not finite"));
                }
                if (v - self.one_body[q][p]).abs() > SYMMETRY_TOLERANCE {
                    return bad(format!("one_body is not Hermitian at ({p}, {q})"));
                }
            }
        }
        let g = |p: usize, q: usize, r: usize, s: usize| self.two_body[p][q][r][s];
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let v = g(p, q, r, s);
                        if !v.is_finite() {
                            return bad(format!("two_body[{p}][{q}][{r}][{s}] is not finite"));
                        }
                        let partners = [("particle exchange", g(q, p, s, r)), ("hermiticity", g(s, r, q, p)), ("real orbitals", g(s, q, r, p))];
                        for (name, w) in partners {
                            if (v - w).abs() > SYMMETRY_TOLERANCE {
                                return bad(format!("two_body violates {name} symmetry at ({p}, {q}, {r}, {s})"));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Jordan-Wigner qubit Hamiltonian of the molecule.
pub fn build_molecular_hamiltonian(m: &MolecularIntegrals) -> Result<PauliSum> {
    m.validate()?;
    let n = m.n_spin_orbitals;
    let mut h = PauliSum::identity(n, Complex64::new(m.nuclear_repulsion, 0.0));
    let mut add = |factors: Vec<(usize, Ladder)>, coeff: f64| -> Result<()> {
        if coeff != 0.0 {
            let mapped = jordan_wigner(&FermionOperatorString::new(factors, Complex64::new(coeff, 0.0)), n)?;
            h = h.add(&mapped)?;
        }
        Ok(())
    };
    for p in 0..n {
        for q in 0..n {
            add(vec![(p, Ladder::Create), (q, Ladder::Annihilate)], m.one_body[p][q])?;
            for r in 0..n {
                for s in 0..n {
                    let factors = vec![(p, Ladder::Create), (q, Ladder::Create), (r, Ladder::Annihilate), (s, Ladder::Annihilate)];
                    add(factors, 0.5 * m.two_body[p][q][r][s])?;
                }
            }
        }
    }
    // exact cancellations leave rounding noise on the imaginary parts
    PauliSum::from_terms(n, h.iter().map(|(w, c)| (*w, Complex64::new(c.re, 0.0))))
        .and_then(|clean| {
            let residue = h.hermiticity_residue();
            if residue > 1e-10 {
                Err(Error::NotHermitian(format!("molecular Hamiltonian has imaginary residue {residue:.3e}")))
            } else {
                Ok(clean)
            }
        })
}

/// Fixed-particle-number Fock space for a molecule.
pub fn molecular_active_space(m: &MolecularIntegrals) -> Result<ActiveSpace> {
    ActiveSpace::jordan_wigner_fock(m.n_spin_orbitals, m.n_electrons)
}

/// On-disk integral fixture. `two_body` holds physicist integrals
/// `<pq|rs> = ∫ φp*(1) φq*(2) φr(1) φs(2) / r12`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IntegralFile {
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub generator: String,
    pub spin_orbital_order: Vec<String>,
    pub two_body_convention: String,
    pub geometries: Vec<GeometryRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeometryRecord {
    pub bond_length: f64,
    pub nuclear_repulsion: f64,
    pub n_spin_orbitals: usize,
    pub n_electrons: usize,
    #[serde(default)]
    pub hartree_fock_energy: Option<f64>,
    pub one_body: Vec<Vec<f64>>,
    pub two_body: Vec<Vec<Vec<Vec<f64>>>>,
}

pub fn parse_integrals(text: &str) -> Result<Vec<MolecularIntegrals>> {
    if text.trim().is_empty() {
        return Err(Error::Parse("integral file is empty".into()));
    }
    let file: IntegralFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("integral file: {e}")))?;
    if !file.two_body_convention.trim_start().starts_with("physicist") {
        return Err(Error::Integrals(format!(
            "unsupported two_body_convention {:?}; expected physicist <pq|rs>",
            file.two_body_convention
        )));
    }
    if file.geometries.is_empty() {
        return Err(Error::Integrals("no geometries".into()));
    }
    let mut out = Vec::with_capacity(file.geometries.len());
    for g in file.geometries {
        if g.n_spin_orbitals != file.spin_orbital_order.len() {
            return Err(Error::Integrals(format!(
                "bond length {}: {} spin-orbitals but spin_orbital_order lists {}",
                g.bond_length,
                g.n_spin_orbitals,
                file.spin_orbital_order.len()
            )));
        }
        let n = g.n_spin_orbitals;
        let physicist = &g.two_body;
        let shape_ok = physicist.len() == n
            && physicist.iter().all(|a| a.len() == n && a.iter().all(|b| b.len() == n && b.iter().all(|c| c.len() == n)));
        if !shape_ok {
            return Err(Error::Integrals(format!("bond length {}: two_body must be {n}x{n}x{n}x{n}", g.bond_length)));
        }
        let two_body = (0..n)
            .map(|p| (0..n).map(|q| (0..n).map(|r| (0..n).map(|s| physicist[p][q][s][r]).collect()).collect()).collect())
            .collect();
        let m = MolecularIntegrals {
            bond_length: g.bond_length,
            nuclear_repulsion: g.nuclear_repulsion,
            one_body: g.one_body,
            two_body,
            n_spin_orbitals: n,
            n_electrons: g.n_electrons,
        };
        m.validate()?;
        out.push(m);
    }
    out.sort_by(|a, b| a.bond_length.total_cmp(&b.bond_length));
    Ok(out)
}

pub fn load_integrals(path: impl AsRef<Path>) -> Result<Vec<MolecularIntegrals>> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Config(format!("cannot read integral file {}: {e}", path.as_ref().display())))?;
    parse_integrals(&text)
}

/// Path of the bundled H2 fixture.
pub fn bundled_h2_fixture() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join("h2_sto3g.json")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigenvalues, max_abs_diff};
    use crate::statevector::{BasisIndex, Statevector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let a = CMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        (&a + a.adjoint()) * c(0.5, 0.0)
    }

    #[test]
    fn gamma_point_closed_forms() {
        let p = TightBindingParams::default();
        let h = bloch_hamiltonian(&p, KPoint::named("G").unwrap());
        assert!((h[(0, 0)].re - (p.eps_s + 6.0 * p.v_ss_sigma)).abs() < 1e-14);
        for i in 1..4 {
            assert!((h[(i, i)].re - (p.eps_p + 2.0 * p.v_pp_sigma + 4.0 * p.v_pp_pi)).abs() < 1e-14);
        }
        for r in 0..4 {
            for col in 0..4 {
                if r != col {
                    assert!(h[(r, col)].norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn bloch_matrix_symmetries() {
        let p = TightBindingParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let k = KPoint([rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]);
            let h = bloch_hamiltonian(&p, k);
            assert!(hermiticity_deviation(&h) < 1e-14);
            let minus = bloch_hamiltonian(&p, KPoint(k.0.map(|x| -x)));
            assert!(max_abs_diff(&h, &minus.map(|x| x.conj())) < 1e-14);
        }
    }

    #[test]
    fn x_point_spectrum() {
        // at X the s-p_x block couples through sin(pi) = 0, so the matrix is diagonal
        let p = TightBindingParams::default();
        let h = bloch_hamiltonian(&p, KPoint::named("X").unwrap());
        let mut expected = vec![
            p.eps_s + 2.0 * p.v_ss_sigma * (-1.0 + 2.0),
            p.eps_p - 2.0 * p.v_pp_sigma + 4.0 * p.v_pp_pi,
            p.eps_p + 2.0 * p.v_pp_sigma + 2.0 * p.v_pp_pi * (-1.0 + 1.0),
            p.eps_p + 2.0 * p.v_pp_sigma + 2.0 * p.v_pp_pi * (-1.0 + 1.0),
        ];
        expected.sort_by(f64::total_cmp);
        let got = hermitian_eigenvalues(&h);
        for (a, b) in got.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-12, "{got:?} vs {expected:?}");
        }
    }

    #[test]
    fn k_path_sampling() {
        let samples = KPath::default().samples().unwrap();
        assert_eq!(samples.len(), 41);
        assert_eq!(samples[0].label, "G");
        assert_eq!(samples[10].label, "X");
        assert_eq!(samples[40].label, "R");
        assert_eq!(samples[40].k, KPoint([1.0, 1.0, 1.0]));
        assert!((samples[5].k.0[0] - 0.5).abs() < 1e-15);
        let single = KPath { waypoints: vec!["G".into()], samples_per_segment: 10 }.samples().unwrap();
        assert_eq!(single.len(), 1);
        assert!(KPath { waypoints: vec!["Q".into()], samples_per_segment: 1 }.samples().is_err());
        assert!(KPath { waypoints: vec![], samples_per_segment: 1 }.samples().is_err());
    }

    #[test]
    fn encodings_examples() {
        let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.5, 0.), c(-1.0, 0.), c(2.0, 0.), c(3.5, 0.)]));
        let compact = encode_band_hamiltonian(&diag, Encoding::Compact).unwrap();
        let space = ActiveSpace::compact(2).unwrap();
        for z in 0..4 {
            let e = compact.expectation(&space.reference_state(z).unwrap()).unwrap();
            assert!((e - diag[(z, z)].re).abs() < 1e-14);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = random_hermitian(&mut rng, 4);
        let recip = encode_band_hamiltonian(&h, Encoding::ReciprocalOrbital).unwrap();
        let s = Statevector::from_basis(4, BasisIndex::from_label("1000").unwrap()).unwrap();
        assert!((recip.expectation(&s).unwrap() - h[(0, 0)].re).abs() < 1e-14);
        let restricted = ActiveSpace::reciprocal_orbital(4).unwrap().restrict(&recip.to_dense().unwrap());
        assert!(max_abs_diff(&restricted, &h) < 1e-14);
        let not_hermitian = CMatrix::from_fn(2, 2, |r, col| c((r * 2 + col) as f64, 0.0));
        assert!(encode_band_hamiltonian(&not_hermitian, Encoding::Compact).is_err());
    }

    #[test]
    fn both_encodings_share_spectra() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let h = random_hermitian(&mut rng, 4);
            let want = hermitian_eigenvalues(&h);
            for enc in [Encoding::ReciprocalOrbital, Encoding::Compact] {
                let space = band_active_space(4, enc).unwrap();
                let dense = encode_band_hamiltonian(&h, enc).unwrap().to_dense().unwrap();
                let got = hermitian_eigenvalues(&space.restrict(&dense));
                for (a, b) in got.iter().zip(&want) {
                    assert!((a - b).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn nuclear_repulsion_only() {
        let n = 4;
        let m = MolecularIntegrals {
            bond_length: 1.0,
            nuclear_repulsion: 0.7,
            one_body: vec![vec![0.0; n]; n],
            two_body: vec![vec![vec![vec![0.0; n]; n]; n]; n],
            n_spin_orbitals: n,
            n_electrons: 2,
        };
        let h = build_molecular_hamiltonian(&m).unwrap();
        assert_eq!(h, PauliSum::identity(4, c(0.7, 0.0)));
    }

    #[test]
    fn fixture_loads_and_validates() {
        let all = load_integrals(bundled_h2_fixture()).unwrap();
        assert_eq!(all.len(), 12);
        assert!((all[0].bond_length - 0.3).abs() < 1e-12);
        assert!((all[11].bond_length - 2.5).abs() < 1e-12);
        assert!(all.windows(2).all(|w| w[0].bond_length < w[1].bond_length));
    }

    #[test]
    fn integral_file_errors() {
        assert!(matches!(parse_integrals(""), Err(Error::Parse(_))));
        assert!(matches!(parse_integrals("{"), Err(Error::Parse(_))));
        let text = std::fs::read_to_string(bundled_h2_fixture()).unwrap();
        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["geometries"][0]["one_body"][0][1] = serde_json::json!(0.123);
        let err = parse_integrals(&doc.to_string()).unwrap_err().to_string();
        assert!(err.contains("one_body is not Hermitian at (0, 1)"), "{err}");

        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["geometries"][0]["two_body"][0][1][2][3] = serde_json::json!(0.5);
        let err = parse_integrals(&doc.to_string()).unwrap_err().to_string();
        assert!(err.contains("two_body violates"), "{err}");

        let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        doc["two_body_convention"] = serde_json::json!("chemist (pq|rs)");
        assert!(parse_integrals(&doc.to_string()).is_err());
    }

    #[test]
    fn molecular_hamiltonian_properties() {
        let all = load_integrals(bundled_h2_fixture()).unwrap();
        let eq = all.iter().find(|m| (m.bond_length - 0.74).abs() < 1e-9).unwrap();
        let h = build_molecular_hamiltonian(eq).unwrap();
        assert!(h.is_hermitian());
        let dense = h.to_dense().unwrap();
        // particle-number conservation
        let number = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            16,
            (0..16usize).map(|b| c(b.count_ones() as f64, 0.0)),
        ));
        assert!(max_abs_diff(&(&dense * &number), &(&number * &dense)) < 1e-10);
        let space = molecular_active_space(eq).unwrap();
        let block = hermitian_eigenvalues(&space.restrict(&dense));
        let full = hermitian_eigenvalues(&dense);
        assert!((block[0] - full[0]).abs() < 1e-10);
        // reference value from an independent pyscf FCI at 0.74 angstrom
        assert!((block[0] - -1.137284).abs() < 1e-5, "{block:?}");
        assert!(block[3] - block[1] < 1e-8);
    }
}
