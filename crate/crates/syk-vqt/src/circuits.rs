//! Parameterized circuits and exact statevector simulation.
//!
//! Conventions: `RZ(t) = exp(-i t Z / 2)`, `RY(t) = exp(-i t Y / 2)`,
//! `PAULI_ROT(t, P) = exp(-i t P)` for a Hermitian Pauli string `P`.
//! Basis index bit `q` is qubit `q` (qubit 0 least significant).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::clifford::{CliffordGate, CommutingCluster};
use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliTerm};

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Rz { qubit: usize, param: usize },
    Ry { qubit: usize, param: usize },
    Cnot { control: usize, target: usize },
    H { qubit: usize },
    S { qubit: usize },
    /// exp(-i t P) with P given by letter masks (unit coefficient).
    PauliRot { param: usize, x_mask: u64, z_mask: u64 },
}

impl Gate {
    pub fn param_index(&self) -> Option<usize> {
        match *self {
            Gate::Rz { param, .. } | Gate::Ry { param, .. } | Gate::PauliRot { param, .. } => Some(param),
            _ => None,
        }
    }

    fn dump_line(&self) -> String {
        match *self {
            Gate::Rz { qubit, param } => format!("RZ q{qubit} p{param}"),
            Gate::Ry { qubit, param } => format!("RY q{qubit} p{param}"),
            Gate::Cnot { control, target } => format!("CNOT q{control} q{target}"),
            Gate::H { qubit } => format!("H q{qubit}"),
            Gate::S { qubit } => format!("S q{qubit}"),
            Gate::PauliRot { param, x_mask, z_mask } => {
                format!("PROT p{param} x{x_mask:x} z{z_mask:x}")
            }
        }
    }
}

impl From<CliffordGate> for Gate {
    fn from(g: CliffordGate) -> Gate {
        match g {
            CliffordGate::H(q) => Gate::H { qubit: q },
            CliffordGate::S(q) => Gate::S { qubit: q },
            CliffordGate::Cnot { control, target } => Gate::Cnot { control, target },
        }
    }
}

/// An ordered list of gates with layer boundaries (gate index where each
/// layer starts).
#[derive(Clone, Debug)]
pub struct CircuitProgram {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    pub n_params: usize,
    pub layers: Vec<usize>,
}

impl CircuitProgram {
    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Cnot { .. })).count()
    }

    /// One-gate-per-line text dump.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(&g.dump_line());
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(n_qubits: usize, index: u64) -> StateVector {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[index as usize] = Complex64::new(1.0, 0.0);
        StateVector { amplitudes }
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Apply a gate in place; `adjoint` applies the inverse.
pub fn apply_gate(amps: &mut [Complex64], gate: &Gate, params: &[f64], adjoint: bool) {
    let sign = if adjoint { -1.0 } else { 1.0 };
    match *gate {
        Gate::Rz { qubit, param } => {
            let half = sign * params[param] / 2.0;
            let e_minus = Complex64::from_polar(1.0, -half);
            let e_plus = Complex64::from_polar(1.0, half);
            for (j, a) in amps.iter_mut().enumerate() {
                *a *= if j >> qubit & 1 == 0 { e_minus } else { e_plus };
            }
        }
        Gate::Ry { qubit, param } => {
            let half = sign * params[param] / 2.0;
            let (s, c) = half.sin_cos();
            let bit = 1usize << qubit;
            for j in 0..amps.len() {
                if j & bit == 0 {
                    let a0 = amps[j];
                    let a1 = amps[j | bit];
                    amps[j] = c * a0 - s * a1;
                    amps[j | bit] = s * a0 + c * a1;
                }
            }
        }
        Gate::Cnot { control, target } => {
            let cb = 1usize << control;
            let tb = 1usize << target;
            for j in 0..amps.len() {
                if j & cb != 0 && j & tb == 0 {
                    amps.swap(j, j | tb);
                }
            }
        }
        Gate::H { qubit } => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let bit = 1usize << qubit;
            for j in 0..amps.len() {
                if j & bit == 0 {
                    let a0 = amps[j];
                    let a1 = amps[j | bit];
                    amps[j] = s * (a0 + a1);
                    amps[j | bit] = s * (a0 - a1);
                }
            }
        }
        Gate::S { qubit } => {
            let phase = Complex64::new(0.0, sign);
            let bit = 1usize << qubit;
            for (j, a) in amps.iter_mut().enumerate() {
                if j & bit != 0 {
                    *a *= phase;
                }
            }
        }
        Gate::PauliRot { param, x_mask, z_mask } => {
            let theta = sign * params[param];
            let (s, c) = theta.sin_cos();
            let cos = Complex64::new(c, 0.0);
            let minus_i_sin = Complex64::new(0.0, -s);
            if x_mask == 0 {
                // diagonal generator: pure phases
                for (j, a) in amps.iter_mut().enumerate() {
                    let sgn = if (z_mask & j as u64).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    *a *= cos + sgn * minus_i_sin;
                }
            } else {
                // exp(-i t P) = cos t - i sin t P, with P^2 = I
                let gen = PauliTerm::from_masks(64, x_mask, z_mask, Complex64::new(1.0, 0.0));
                let scratch: Vec<Complex64> = amps.to_vec();
                for (j, val) in scratch.iter().enumerate() {
                    let (out, amp) = gen.apply_basis(j as u64);
                    let target = out as usize;
                    amps[target] = cos * scratch[target] + minus_i_sin * amp * val;
                    let _ = j;
                }
            }
        }
    }
}

/// Run the program on basis state `input`.
pub fn simulate(prog: &CircuitProgram, params: &[f64], input: u64) -> Result<StateVector> {
    if params.len() != prog.n_params {
        return Err(Error::DimensionMismatch(format!(
            "expected {} parameters, got {}",
            prog.n_params,
            params.len()
        )));
    }
    if input >= 1 << prog.n_qubits {
        return Err(Error::InvalidParameter(format!("basis index {input} out of range")));
    }
    let mut state = StateVector::basis(prog.n_qubits, input);
    for g in &prog.gates {
        apply_gate(&mut state.amplitudes, g, params, false);
    }
    Ok(state)
}

/// Dense unitary of a gate slice (columns built by simulation).
pub fn dense_unitary(gates: &[Gate], n_qubits: usize, params: &[f64]) -> DMatrix<Complex64> {
    let dim = 1usize << n_qubits;
    let mut u = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[col] = Complex64::new(1.0, 0.0);
        for g in gates {
            apply_gate(&mut amps, g, params, false);
        }
        for row in 0..dim {
            u[(row, col)] = amps[row];
        }
    }
    u
}

/// Hardware-efficient ansatz: per layer, Rz.Ry.Rz on every qubit followed by
/// a ring of CNOTs (a single CNOT for two qubits).
pub fn build_vqc1(n_qubits: usize, n_layers: usize) -> Result<CircuitProgram> {
    if n_qubits < 2 {
        return Err(Error::InvalidParameter("VQC1 requires at least 2 qubits".into()));
    }
    if n_layers < 1 {
        return Err(Error::InvalidParameter("VQC1 requires at least 1 layer".into()));
    }
    let mut gates = Vec::new();
    let mut layers = Vec::new();
    let mut p = 0;
    for _ in 0..n_layers {
        layers.push(gates.len());
        for q in 0..n_qubits {
            gates.push(Gate::Rz { qubit: q, param: p });
            gates.push(Gate::Ry { qubit: q, param: p + 1 });
            gates.push(Gate::Rz { qubit: q, param: p + 2 });
            p += 3;
        }
        if n_qubits == 2 {
            gates.push(Gate::Cnot { control: 0, target: 1 });
        } else {
            for q in 0..n_qubits {
                gates.push(Gate::Cnot { control: q, target: (q + 1) % n_qubits });
            }
        }
    }
    Ok(CircuitProgram { n_qubits, gates, n_params: p, layers })
}

/// Order clusters the way VQC2 consumes them: descending size, ties broken
/// by first member index.
pub fn vqc2_cluster_order(clusters: &[CommutingCluster]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..clusters.len()).collect();
    order.sort_by_key(|&i| (std::cmp::Reverse(clusters[i].member_indices.len()), clusters[i].member_indices[0]));
    order
}

/// Hamiltonian-based ansatz: per layer, for each cluster apply the
/// diagonalizer, one Z-string rotation per member, then the inverse
/// diagonalizer. One parameter per Hamiltonian term per layer.
pub fn build_vqc2(h: &PauliSum, clusters: &[CommutingCluster], n_layers: usize) -> Result<CircuitProgram> {
    let covered: usize = clusters.iter().map(|c| c.member_indices.len()).sum();
    if covered != h.len() {
        return Err(Error::DimensionMismatch(format!(
            "clusters cover {covered} terms, Hamiltonian has {}",
            h.len()
        )));
    }
    if n_layers < 1 {
        return Err(Error::InvalidParameter("VQC2 requires at least 1 layer".into()));
    }
    let order = vqc2_cluster_order(clusters);
    let mut gates = Vec::new();
    let mut layers = Vec::new();
    let mut p = 0;
    for _ in 0..n_layers {
        layers.push(gates.len());
        for &ci in &order {
            let cluster = &clusters[ci];
            gates.extend(cluster.diagonalizer.gates.iter().map(|&g| Gate::from(g)));
            for &mi in &cluster.member_indices {
                let diag = cluster.diagonalized(h, mi);
                debug_assert!(diag.is_diagonal());
                gates.push(Gate::PauliRot { param: p, x_mask: 0, z_mask: diag.z_mask() });
                p += 1;
            }
            gates.extend(cluster.diagonalizer.inverse_gates().into_iter().map(Gate::from));
        }
    }
    Ok(CircuitProgram { n_qubits: h.n_qubits(), gates, n_params: p, layers })
}

/// Exact basis probabilities of a normalized state.
pub fn basis_probabilities(psi: &StateVector) -> Vec<f64> {
    psi.amplitudes.iter().map(|a| a.norm_sqr()).collect()
}

/// Multinomial shot-noise emulation: empirical frequencies of `shots` draws.
pub fn sampled_probabilities(p: &[f64], shots: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut counts = vec![0usize; p.len()];
    let mut cdf: Vec<f64> = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for &pi in p {
        acc += pi;
        cdf.push(acc);
    }
    for _ in 0..shots {
        let u: f64 = rng.gen_range(0.0..1.0);
        let idx = cdf.partition_point(|&c| c < u).min(p.len() - 1);
        counts[idx] += 1;
    }
    counts.into_iter().map(|c| c as f64 / shots as f64).collect()
}

/// rho = sum_i p_i U2 |b_i><b_i| U2^dagger = U2 diag(p) U2^dagger.
pub fn assemble_mixed_state(p: &[f64], prog2: &CircuitProgram, phi: &[f64]) -> Result<DMatrix<Complex64>> {
    let dim = 1usize << prog2.n_qubits;
    if p.len() != dim {
        return Err(Error::DimensionMismatch(format!("probability vector length {} != {dim}", p.len())));
    }
    let u = dense_unitary(&prog2.gates, prog2.n_qubits, phi);
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        dim,
        p.iter().map(|&pi| Complex64::new(pi, 0.0)),
    ));
    Ok(&u * diag * u.adjoint())
}
