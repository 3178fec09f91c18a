//! Pauli-string arithmetic and the Jordan-Wigner images of Majorana operators.
//!
//! A [`PauliTerm`] is stored as a pair of bitmasks `(x, z)` plus a complex
//! coefficient. Qubit `q` carries the letter `X` if only bit `q` of `x` is
//! set, `Z` if only bit `q` of `z` is set, `Y` if both. The operator it
//! denotes is the literal tensor product of letters, scaled by the
//! coefficient; internally we use the decomposition `sigma = i^{|x & z|} *
//! X^x * Z^z` to track phases through products.
//!
//! Majorana operators are normalized so that `{chi_i, chi_j} = delta_ij`,
//! which puts a factor `1/sqrt(2)` on every Jordan-Wigner image:
//! `chi_{2k-1} -> Z^{k-1} X / sqrt(2)` and `chi_{2k} -> Z^{k-1} Y / sqrt(2)`,
//! with qubit 0 the least-significant bit of computational-basis indices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest qubit count for which dense matrices are materialized.
pub const DEFAULT_QUBIT_CAP: usize = 12;

/// Tolerance for merging coefficients and asserting Hermiticity.
pub const CANON_TOL: f64 = 1e-12;

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Axis {
    I,
    X,
    Y,
    Z,
}

impl Axis {
    fn from_bits(x: bool, z: bool) -> Axis {
        match (x, z) {
            (false, false) => Axis::I,
            (true, false) => Axis::X,
            (true, true) => Axis::Y,
            (false, true) => Axis::Z,
        }
    }

    fn to_char(self) -> char {
        match self {
            Axis::I => 'I',
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

/// A single Pauli string with a complex coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    n_qubits: usize,
    x: u64,
    z: u64,
    pub coeff: Complex64,
}

impl PauliTerm {
    pub fn identity(n_qubits: usize) -> PauliTerm {
        PauliTerm { n_qubits, x: 0, z: 0, coeff: Complex64::new(1.0, 0.0) }
    }

    pub fn from_masks(n_qubits: usize, x: u64, z: u64, coeff: Complex64) -> PauliTerm {
        assert!(n_qubits <= 64);
        let mask = if n_qubits == 64 { u64::MAX } else { (1u64 << n_qubits) - 1 };
        PauliTerm { n_qubits, x: x & mask, z: z & mask, coeff }
    }

    /// Parse an axes string like `"XYZI"`, qubit 0 first.
    pub fn from_axes(axes: &str, coeff: Complex64) -> Result<PauliTerm> {
        let mut x = 0u64;
        let mut z = 0u64;
        for (q, c) in axes.chars().enumerate() {
            if q >= 64 {
                return Err(Error::Parse("axes string longer than 64 qubits".into()));
            }
            match c {
                'I' => {}
                'X' => x |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q;
                }
                'Z' => z |= 1 << q,
                other => return Err(Error::Parse(format!("invalid Pauli letter '{other}'"))),
            }
        }
        Ok(PauliTerm { n_qubits: axes.chars().count(), x, z, coeff })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn axis(&self, q: usize) -> Axis {
        Axis::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    pub fn axes_string(&self) -> String {
        (0..self.n_qubits).map(|q| self.axis(q).to_char()).collect()
    }

    pub fn is_identity_string(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// True when the string contains only I and Z letters.
    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn adjoint(&self) -> PauliTerm {
        let mut t = self.clone();
        t.coeff = t.coeff.conj();
        t
    }

    /// Pauli-group product `self * other` with exact phase tracking.
    pub fn multiply(&self, other: &PauliTerm) -> Result<PauliTerm> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch(self.n_qubits, other.n_qubits));
        }
        let c1 = (self.x & self.z).count_ones();
        let c2 = (other.x & other.z).count_ones();
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let c3 = (x & z).count_ones();
        // sigma1 sigma2 = i^(c1 + c2 - c3) * (-1)^|z1 & x2| * sigma3
        let mut exp = (c1 + c2 + 8 - c3) % 4;
        if (self.z & other.x).count_ones() % 2 == 1 {
            exp = (exp + 2) % 4;
        }
        Ok(PauliTerm { n_qubits: self.n_qubits, x, z, coeff: self.coeff * other.coeff * I_POWERS[exp as usize] })
    }

    /// Whole-string commutation: true iff the symplectic form vanishes.
    pub fn commutes(&self, other: &PauliTerm) -> Result<bool> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitMismatch(self.n_qubits, other.n_qubits));
        }
        let anti = (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        Ok(anti % 2 == 0)
    }

    /// Eigenvalue sign of a diagonal string on basis state `j`.
    /// Only meaningful when `is_diagonal()` holds.
    pub fn diagonal_sign(&self, j: u64) -> f64 {
        debug_assert!(self.is_diagonal());
        if (self.z & j).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Apply the term to basis state `|j>`: returns `(j', amplitude)`.
    pub fn apply_basis(&self, j: u64) -> (u64, Complex64) {
        let c = (self.x & self.z).count_ones() % 4;
        let mut amp = self.coeff * I_POWERS[c as usize];
        if (self.z & j).count_ones() % 2 == 1 {
            amp = -amp;
        }
        (j ^ self.x, amp)
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for j in 0..dim as u64 {
            let (row, amp) = self.apply_basis(j);
            m[(row as usize, j as usize)] += amp;
        }
        m
    }
}

/// 1-based index of a Majorana operator in a register of `n_majorana` of them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MajoranaIndex {
    index: usize,
    n_majorana: usize,
}

impl MajoranaIndex {
    pub fn new(index: usize, n_majorana: usize) -> Result<MajoranaIndex> {
        if n_majorana < 4 || n_majorana % 2 != 0 {
            return Err(Error::InvalidMajoranaCount(n_majorana));
        }
        if index < 1 || index > n_majorana {
            return Err(Error::MajoranaIndexOutOfRange { index, n_majorana });
        }
        Ok(MajoranaIndex { index, n_majorana })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn n_majorana(&self) -> usize {
        self.n_majorana
    }
}

/// Jordan-Wigner image of a single Majorana operator, normalized so that
/// `{chi_i, chi_j} = delta_ij`.
pub fn majorana_to_pauli(idx: MajoranaIndex, n_qubits: usize) -> Result<PauliTerm> {
    if idx.n_majorana() > 2 * n_qubits {
        return Err(Error::MajoranaIndexOutOfRange { index: idx.index(), n_majorana: 2 * n_qubits });
    }
    let i = idx.index();
    let k = (i + 1) / 2; // site, 1-based
    let tail = (1u64 << (k - 1)) - 1; // Z on qubits 0..k-2
    let site = 1u64 << (k - 1);
    let (x, z) = if i % 2 == 1 {
        (site, tail)
    } else {
        (site, tail | site)
    };
    Ok(PauliTerm::from_masks(n_qubits, x, z, Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)))
}

/// Pauli image of the ordered quartic `chi_i chi_j chi_k chi_l`, `i<j<k<l`.
/// The result is Hermitian for distinct indices, hence the coefficient is
/// real (asserted to `CANON_TOL`).
pub fn majorana_quartic(i: usize, j: usize, k: usize, l: usize, n_qubits: usize) -> Result<PauliTerm> {
    if !(i < j && j < k && k < l) {
        return Err(Error::NonIncreasingIndices(i, j, k, l));
    }
    let n_major = 2 * n_qubits;
    let mut term = majorana_to_pauli(MajoranaIndex::new(i, n_major)?, n_qubits)?;
    for idx in [j, k, l] {
        let factor = majorana_to_pauli(MajoranaIndex::new(idx, n_major)?, n_qubits)?;
        term = term.multiply(&factor)?;
    }
    if term.coeff.im.abs() > CANON_TOL {
        return Err(Error::NotHermitian(term.coeff.im.abs()));
    }
    term.coeff = Complex64::new(term.coeff.re, 0.0);
    Ok(term)
}

/// A Hermitian linear combination of Pauli strings.
#[derive(Clone, Debug)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> PauliSum {
        PauliSum { n_qubits, terms: Vec::new() }
    }

    pub fn from_terms(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<PauliSum> {
        for t in &terms {
            if t.n_qubits() != n_qubits {
                return Err(Error::QubitMismatch(t.n_qubits(), n_qubits));
            }
        }
        let mut sum = PauliSum { n_qubits, terms };
        sum.canonicalize();
        Ok(sum)
    }

    pub fn push(&mut self, term: PauliTerm) -> Result<()> {
        if term.n_qubits() != self.n_qubits {
            return Err(Error::QubitMismatch(term.n_qubits(), self.n_qubits));
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Merge duplicate axes-strings and drop coefficients below `CANON_TOL`.
    pub fn canonicalize(&mut self) {
        self.terms.sort_by_key(|t| (t.x, t.z));
        let mut merged: Vec<PauliTerm> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.x == t.x && last.z == t.z => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff.norm() > CANON_TOL);
        self.terms = merged;
    }

    /// Verify all coefficients are real after canonicalization.
    pub fn assert_hermitian(&self) -> Result<()> {
        for t in &self.terms {
            if t.coeff.im.abs() > CANON_TOL {
                return Err(Error::NotHermitian(t.coeff.im.abs()));
            }
        }
        Ok(())
    }

    /// Dense matrix of the sum; `O(terms * 2^n)`.
    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        self.to_matrix_capped(DEFAULT_QUBIT_CAP)
    }

    pub fn to_matrix_capped(&self, cap: usize) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > cap {
            return Err(Error::QubitCapExceeded(self.n_qubits, cap));
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for t in &self.terms {
            for j in 0..dim as u64 {
                let (row, amp) = t.apply_basis(j);
                m[(row as usize, j as usize)] += amp;
            }
        }
        Ok(m)
    }

    /// Structured-text form: one `"AXES, coefficient"` line per term.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.terms {
            out.push_str(&format!("{}, {:.17e}\n", t.axes_string(), t.coeff.re));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<PauliSum> {
        let mut n_qubits = 0;
        let mut terms = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (axes, coeff) = line
                .split_once(',')
                .ok_or_else(|| Err::<(), _>(Error::Parse(format!("bad line '{line}'"))).unwrap_err())?;
            let axes = axes.trim();
            let value: f64 = coeff
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad coefficient in '{line}': {e}")))?;
            n_qubits = n_qubits.max(axes.chars().count());
            terms.push(PauliTerm::from_axes(axes, Complex64::new(value, 0.0))?);
        }
        PauliSum::from_terms(n_qubits, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Independent dense oracle: build the matrix of a Pauli string by
    /// Kronecker products of 2x2 letter matrices (qubit 0 least significant,
    /// so it is the *rightmost* Kronecker factor).
    pub(crate) fn kron_oracle(term: &PauliTerm) -> DMatrix<Complex64> {
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let zero = Complex64::new(0.0, 0.0);
        let mat = |a: Axis| -> DMatrix<Complex64> {
            match a {
                Axis::I => DMatrix::from_row_slice(2, 2, &[one, zero, zero, one]),
                Axis::X => DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]),
                Axis::Y => DMatrix::from_row_slice(2, 2, &[zero, -i, i, zero]),
                Axis::Z => DMatrix::from_row_slice(2, 2, &[one, zero, zero, -one]),
            }
        };
        let mut m = DMatrix::from_element(1, 1, term.coeff);
        for q in (0..term.n_qubits()).rev() {
            m = m.kronecker(&mat(term.axis(q)));
        }
        m
    }

    fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
        (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn rand_term(n: usize, seed: u64) -> PauliTerm {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let mask = (1u64 << n) - 1;
        PauliTerm::from_masks(
            n,
            rng.gen::<u64>() & mask,
            rng.gen::<u64>() & mask,
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        )
    }

    #[test]
    fn jw_convention_base_cases() {
        let t1 = majorana_to_pauli(MajoranaIndex::new(1, 6).unwrap(), 3).unwrap();
        assert_eq!(t1.axes_string(), "XII");
        assert_abs_diff_eq!(t1.coeff.re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        let t2 = majorana_to_pauli(MajoranaIndex::new(2, 6).unwrap(), 3).unwrap();
        assert_eq!(t2.axes_string(), "YII");
        let t3 = majorana_to_pauli(MajoranaIndex::new(3, 6).unwrap(), 3).unwrap();
        assert_eq!(t3.axes_string(), "ZXI");
        assert_abs_diff_eq!(t3.coeff.re, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn majorana_index_validation() {
        assert!(MajoranaIndex::new(0, 6).is_err());
        assert!(MajoranaIndex::new(7, 6).is_err());
        assert!(MajoranaIndex::new(1, 5).is_err());
        assert!(MajoranaIndex::new(1, 2).is_err());
    }

    #[test]
    fn anticommutation_normalization() {
        // {chi_i, chi_j} = delta_ij as dense matrices.
        let n = 3;
        for i in 1..=6 {
            for j in 1..=6 {
                let a = kron_oracle(&majorana_to_pauli(MajoranaIndex::new(i, 6).unwrap(), n).unwrap());
                let b = kron_oracle(&majorana_to_pauli(MajoranaIndex::new(j, 6).unwrap(), n).unwrap());
                let anti = &a * &b + &b * &a;
                let expected = if i == j {
                    DMatrix::identity(8, 8)
                } else {
                    DMatrix::zeros(8, 8)
                };
                assert!(max_abs_diff(&anti, &expected) < 1e-12, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn single_qubit_products() {
        let x = PauliTerm::from_axes("X", Complex64::new(1.0, 0.0)).unwrap();
        let y = PauliTerm::from_axes("Y", Complex64::new(1.0, 0.0)).unwrap();
        let xy = x.multiply(&y).unwrap();
        assert_eq!(xy.axes_string(), "Z");
        assert_abs_diff_eq!(xy.coeff.im, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(xy.coeff.re, 0.0, epsilon = 1e-15);
        let xx = x.multiply(&x).unwrap();
        assert_eq!(xx.axes_string(), "I");
        assert_abs_diff_eq!(xx.coeff.re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn two_qubit_product_matches_matrix_oracle() {
        let a = PauliTerm::from_axes("XZ", Complex64::new(1.0, 0.0)).unwrap();
        let b = PauliTerm::from_axes("ZX", Complex64::new(1.0, 0.0)).unwrap();
        let prod = a.multiply(&b).unwrap();
        let oracle = kron_oracle(&a) * kron_oracle(&b);
        assert!(max_abs_diff(&kron_oracle(&prod), &oracle) < 1e-12);
        assert_eq!(prod.axes_string(), "YY");
    }

    #[test]
    fn commutes_examples() {
        let x = PauliTerm::from_axes("X", Complex64::new(1.0, 0.0)).unwrap();
        let z = PauliTerm::from_axes("Z", Complex64::new(1.0, 0.0)).unwrap();
        assert!(!x.commutes(&z).unwrap());
        let xx = PauliTerm::from_axes("XX", Complex64::new(1.0, 0.0)).unwrap();
        let zz = PauliTerm::from_axes("ZZ", Complex64::new(1.0, 0.0)).unwrap();
        assert!(xx.commutes(&zz).unwrap());
    }

    #[test]
    fn commutes_agrees_with_dense_commutator() {
        for seed in 0..1000u64 {
            let a = rand_term(3, 2 * seed);
            let b = rand_term(3, 2 * seed + 1);
            let ma = kron_oracle(&a);
            let mb = kron_oracle(&b);
            let comm = &ma * &mb - &mb * &ma;
            let vanishes = comm.iter().map(|c| c.norm()).fold(0.0, f64::max) < 1e-12;
            assert_eq!(a.commutes(&b).unwrap(), vanishes, "seed {seed}");
        }
    }

    #[test]
    fn quartic_base_case() {
        let t = majorana_quartic(1, 2, 3, 4, 2).unwrap();
        assert_eq!(t.axes_string(), "ZZ");
        assert_abs_diff_eq!(t.coeff.re, -0.25, epsilon = 1e-15);
        // cross-check against the product of four dense JW matrices
        let mut m = DMatrix::identity(4, 4).map(|v: f64| Complex64::new(v, 0.0));
        for i in 1..=4 {
            m = m * kron_oracle(&majorana_to_pauli(MajoranaIndex::new(i, 4).unwrap(), 2).unwrap());
        }
        assert!(max_abs_diff(&kron_oracle(&t), &m) < 1e-12);
    }

    #[test]
    fn quartic_is_hermitian() {
        let t = majorana_quartic(1, 3, 5, 6, 3).unwrap();
        let m = kron_oracle(&t);
        assert!(max_abs_diff(&m, &m.adjoint()) < 1e-12);
        assert!(majorana_quartic(1, 3, 3, 5, 3).is_err());
    }

    #[test]
    fn pauli_sum_matrix_examples() {
        let z = PauliSum::from_terms(1, vec![PauliTerm::from_axes("Z", Complex64::new(1.0, 0.0)).unwrap()]).unwrap();
        let m = z.to_matrix().unwrap();
        assert_abs_diff_eq!(m[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 1)].re, -1.0, epsilon = 1e-15);

        let half_x =
            PauliSum::from_terms(1, vec![PauliTerm::from_axes("X", Complex64::new(0.5, 0.0)).unwrap()]).unwrap();
        let m = half_x.to_matrix().unwrap();
        assert_abs_diff_eq!(m[(0, 1)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(0, 0)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn pauli_sum_matrix_matches_kron_oracle() {
        let terms: Vec<PauliTerm> = (0..5).map(|s| rand_term(3, 100 + s)).collect();
        let sum = PauliSum::from_terms(3, terms.clone()).unwrap();
        let mut oracle = DMatrix::zeros(8, 8);
        for t in &terms {
            oracle += kron_oracle(t);
        }
        assert!(max_abs_diff(&sum.to_matrix().unwrap(), &oracle) < 1e-12);
    }

    #[test]
    fn canonicalization_merges_duplicates() {
        let one = Complex64::new(1.0, 0.0);
        let sum = PauliSum::from_terms(
            2,
            vec![
                PauliTerm::from_axes("XZ", one).unwrap(),
                PauliTerm::from_axes("XZ", 2.0 * one).unwrap(),
                PauliTerm::from_axes("ZZ", one).unwrap(),
                PauliTerm::from_axes("II", -one).unwrap(),
                PauliTerm::from_axes("II", one).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(sum.len(), 2);
    }

    #[test]
    fn text_round_trip() {
        let sum = PauliSum::from_terms(
            4,
            vec![
                PauliTerm::from_axes("XYZI", Complex64::new(-0.25, 0.0)).unwrap(),
                PauliTerm::from_axes("ZZII", Complex64::new(0.125, 0.0)).unwrap(),
            ],
        )
        .unwrap();
        let text = sum.to_text();
        let parsed = PauliSum::from_text(&text).unwrap();
        assert_eq!(parsed.to_text(), text);
    }

    #[test]
    fn cap_is_enforced() {
        let sum = PauliSum::new(13);
        assert!(matches!(sum.to_matrix(), Err(Error::QubitCapExceeded(13, 12))));
    }

    proptest! {
        #[test]
        fn multiply_matches_dense_oracle(s1 in 0u64..10_000, s2 in 0u64..10_000) {
            let a = rand_term(3, s1);
            let b = rand_term(3, s2.wrapping_add(1 << 32));
            let prod = a.multiply(&b).unwrap();
            let oracle = kron_oracle(&a) * kron_oracle(&b);
            prop_assert!(max_abs_diff(&kron_oracle(&prod), &oracle) < 1e-12);
        }

        #[test]
        fn multiply_is_associative(s1 in 0u64..10_000, s2 in 0u64..10_000, s3 in 0u64..10_000) {
            let a = rand_term(3, s1);
            let b = rand_term(3, s2.wrapping_add(1 << 33));
            let c = rand_term(3, s3.wrapping_add(1 << 34));
            let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(left.x_mask(), right.x_mask());
            prop_assert_eq!(left.z_mask(), right.z_mask());
            prop_assert!((left.coeff - right.coeff).norm() < 1e-12);
        }
    }
}
