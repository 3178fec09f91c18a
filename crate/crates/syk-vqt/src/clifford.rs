//! Clifford conjugation of Pauli strings and simultaneous diagonalization of
//! commuting clusters.
//!
//! The diagonalizer synthesis is symplectic Gaussian elimination over GF(2):
//! a basis of the cluster's span is reduced generator by generator to a
//! single `Z` on a fresh pivot qubit using S (Y -> X), CNOT (clear extra X),
//! CZ = H.CNOT.H (clear extra Z), and a final H (X -> Z). Every original
//! member is a product of basis elements, so it conjugates to a Z/I-only
//! string.

use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliTerm};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    Cnot { control: usize, target: usize },
}

#[derive(Clone, Debug, Default)]
pub struct CliffordCircuit {
    pub gates: Vec<CliffordGate>,
}

impl CliffordCircuit {
    pub fn identity() -> CliffordCircuit {
        CliffordCircuit { gates: Vec::new() }
    }

    pub fn is_identity(&self) -> bool {
        self.gates.is_empty()
    }

    /// Conjugate `term` by the circuit: returns `C P C^dagger`.
    pub fn conjugate(&self, term: &PauliTerm) -> PauliTerm {
        let mut t = term.clone();
        for g in &self.gates {
            t = conjugate_gate(*g, &t);
        }
        t
    }

    /// Gate sequence of the inverse circuit (S^dagger emitted as S.S.S).
    pub fn inverse_gates(&self) -> Vec<CliffordGate> {
        let mut out = Vec::with_capacity(self.gates.len());
        for g in self.gates.iter().rev() {
            match *g {
                CliffordGate::S(q) => out.extend([CliffordGate::S(q); 3]),
                other => out.push(other),
            }
        }
        out
    }
}

/// Single-gate conjugation `G P G^dagger` in the letters representation.
fn conjugate_gate(gate: CliffordGate, term: &PauliTerm) -> PauliTerm {
    let mut x = term.x_mask();
    let mut z = term.z_mask();
    let mut coeff = term.coeff;
    match gate {
        CliffordGate::H(q) => {
            let bit = 1u64 << q;
            let xq = x & bit != 0;
            let zq = z & bit != 0;
            if xq && zq {
                coeff = -coeff; // Y -> -Y
            }
            x = (x & !bit) | if zq { bit } else { 0 };
            z = (z & !bit) | if xq { bit } else { 0 };
        }
        CliffordGate::S(q) => {
            let bit = 1u64 << q;
            if x & bit != 0 {
                if z & bit != 0 {
                    coeff = -coeff; // Y -> -X
                }
                z ^= bit; // X -> Y, Y -> X
            }
        }
        CliffordGate::Cnot { control, target } => {
            let cb = 1u64 << control;
            let tb = 1u64 << target;
            let xc = x & cb != 0;
            let zc = z & cb != 0;
            let xt = x & tb != 0;
            let zt = z & tb != 0;
            if xc && zt && (xt == zc) {
                coeff = -coeff;
            }
            if xc {
                x ^= tb;
            }
            if zt {
                z ^= cb;
            }
        }
    }
    PauliTerm::from_masks(term.n_qubits(), x, z, coeff)
}

/// A set of mutually commuting terms of a `PauliSum`, together with a
/// Clifford circuit that maps every member to a Z/I-only string.
#[derive(Clone, Debug)]
pub struct CommutingCluster {
    pub member_indices: Vec<usize>,
    pub diagonalizer: CliffordCircuit,
}

impl CommutingCluster {
    /// Diagonalized image of member `i` of the parent sum.
    pub fn diagonalized(&self, h: &PauliSum, member: usize) -> PauliTerm {
        self.diagonalizer.conjugate(&h.terms()[member])
    }
}

/// GF(2) row reduction of the (x|z) vectors; returns an independent basis.
fn gf2_basis(terms: &[(u64, u64)]) -> Vec<(u64, u64)> {
    let mut basis: Vec<(u64, u64)> = Vec::new();
    for &(x, z) in terms {
        let mut vx = x;
        let mut vz = z;
        for &(bx, bz) in &basis {
            let pivot = leading_bit(bx, bz);
            if get_bit(vx, vz, pivot) {
                vx ^= bx;
                vz ^= bz;
            }
        }
        if vx != 0 || vz != 0 {
            basis.push((vx, vz));
            // keep basis in echelon form
            basis.sort_by_key(|&(bx, bz)| std::cmp::Reverse(leading_bit(bx, bz)));
        }
    }
    basis
}

fn leading_bit(x: u64, z: u64) -> u32 {
    // treat the 128-bit vector (x, z); highest set position
    if x != 0 {
        64 + (63 - x.leading_zeros())
    } else {
        63 - z.leading_zeros()
    }
}

fn get_bit(x: u64, z: u64, pos: u32) -> bool {
    if pos >= 64 {
        x >> (pos - 64) & 1 == 1
    } else {
        z >> pos & 1 == 1
    }
}

/// Synthesize a Clifford circuit that conjugates every term of a mutually
/// commuting set to a Z/I-only string.
pub fn synthesize_diagonalizer(terms: &[PauliTerm], n_qubits: usize) -> CliffordCircuit {
    let masks: Vec<(u64, u64)> = terms.iter().map(|t| (t.x_mask(), t.z_mask())).collect();
    if masks.iter().all(|&(x, _)| x == 0) {
        return CliffordCircuit::identity();
    }
    let mut basis = gf2_basis(&masks);
    let mut gates: Vec<CliffordGate> = Vec::new();
    let mut used = 0u64;

    let apply = |gs: &[CliffordGate], basis: &mut Vec<(u64, u64)>| {
        for (bx, bz) in basis.iter_mut() {
            let mut t = PauliTerm::from_masks(n_qubits, *bx, *bz, num_complex::Complex64::new(1.0, 0.0));
            for g in gs {
                t = conjugate_gate(*g, &t);
            }
            *bx = t.x_mask();
            *bz = t.z_mask();
        }
    };

    for gi in 0..basis.len() {
        let (x, _z) = basis[gi];
        if x == 0 {
            continue; // already diagonal
        }
        let pivot = (x & !used).trailing_zeros() as usize;
        debug_assert!(x & !used != 0, "X support confined to used pivots");
        let mut step: Vec<CliffordGate> = Vec::new();
        // Y -> X on every qubit where the generator has Y
        let (x0, z0) = basis[gi];
        let mut y_bits = x0 & z0;
        while y_bits != 0 {
            let q = y_bits.trailing_zeros() as usize;
            step.push(CliffordGate::S(q));
            y_bits &= y_bits - 1;
        }
        apply(&step, &mut basis);
        gates.extend(step.drain(..));
        // clear X on every non-pivot qubit
        let (x1, _) = basis[gi];
        let mut extra_x = x1 & !(1u64 << pivot);
        while extra_x != 0 {
            let q = extra_x.trailing_zeros() as usize;
            step.push(CliffordGate::Cnot { control: pivot, target: q });
            extra_x &= extra_x - 1;
        }
        apply(&step, &mut basis);
        gates.extend(step.drain(..));
        // clear Z on every non-pivot qubit via CZ = H.CNOT.H
        let (_, z2) = basis[gi];
        let mut extra_z = z2 & !(1u64 << pivot);
        while extra_z != 0 {
            let q = extra_z.trailing_zeros() as usize;
            step.push(CliffordGate::H(q));
            step.push(CliffordGate::Cnot { control: pivot, target: q });
            step.push(CliffordGate::H(q));
            extra_z &= extra_z - 1;
        }
        apply(&step, &mut basis);
        gates.extend(step.drain(..));
        // single X on the pivot -> single Z
        debug_assert_eq!(basis[gi].0, 1u64 << pivot);
        debug_assert_eq!(basis[gi].1, 0);
        step.push(CliffordGate::H(pivot));
        apply(&step, &mut basis);
        gates.extend(step.drain(..));
        used |= 1u64 << pivot;
    }
    debug_assert!(basis.iter().all(|&(x, _)| x == 0));
    CliffordCircuit { gates }
}

/// Partition the terms of `h` into mutually commuting clusters (greedy
/// coloring of the non-commutation graph, highest degree first) and attach a
/// diagonalizing Clifford circuit to each cluster.
pub fn cluster_commuting(h: &PauliSum) -> Result<Vec<CommutingCluster>> {
    let m = h.len();
    if m == 0 {
        return Err(Error::InvalidParameter("cannot cluster an empty PauliSum".into()));
    }
    let terms = h.terms();
    let mut anti: Vec<Vec<usize>> = vec![Vec::new(); m];
    for i in 0..m {
        for j in (i + 1)..m {
            if !terms[i].commutes(&terms[j])? {
                anti[i].push(j);
                anti[j].push(i);
            }
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(anti[i].len()), i));

    let mut color: Vec<Option<usize>> = vec![None; m];
    let mut n_colors = 0;
    for &i in &order {
        let mut taken = vec![false; n_colors];
        for &j in &anti[i] {
            if let Some(c) = color[j] {
                taken[c] = true;
            }
        }
        let c = taken.iter().position(|&t| !t).unwrap_or_else(|| {
            n_colors += 1;
            n_colors - 1
        });
        color[i] = Some(c);
    }

    let mut clusters = Vec::with_capacity(n_colors);
    for c in 0..n_colors {
        let member_indices: Vec<usize> = (0..m).filter(|&i| color[i] == Some(c)).collect();
        let members: Vec<PauliTerm> = member_indices.iter().map(|&i| terms[i].clone()).collect();
        let diagonalizer = synthesize_diagonalizer(&members, h.n_qubits());
        clusters.push(CommutingCluster { member_indices, diagonalizer });
    }
    Ok(clusters)
}
