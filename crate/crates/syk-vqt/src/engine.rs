//! The free-energy variational loop.
//!
//! The loss is `F(theta, phi) = sum_i p_i(theta) d_i(phi) - S(p)/beta` with
//! `p` the VQC1 basis probabilities and `d = diag(U2^dagger H U2)`. VQC2 is
//! evaluated in a block form: the parameter-free Clifford segments between
//! rotation clusters are precomputed as dense matrices, so a loss evaluation
//! is one diagonal scaling plus one matrix sandwich per cluster, and the
//! full analytic gradient comes out of a single backward sweep.

use std::cell::RefCell;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuits::{
    apply_gate, assemble_mixed_state, basis_probabilities, build_vqc1, build_vqc2, sampled_probabilities,
    simulate, vqc2_cluster_order, CircuitProgram, Gate,
};
use crate::clifford::{cluster_commuting, CommutingCluster};
use crate::error::{Error, Result};
use crate::oracle::{
    diagonalize, exact_observables, fidelity, thermal_density_matrix, DensityMatrix, SpectralDecomposition,
};
use crate::pauli::{PauliSum, PauliTerm};
use crate::syk::{derive_seed, sample_instance, SykInstance, SykParams};

/// The nine-point inverse-temperature grid from 1 to 35 in steps of 4.25.
pub fn default_beta_grid() -> Vec<f64> {
    (0..9).map(|i| 1.0 + 4.25 * i as f64).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    /// L-BFGS with backtracking line search and analytic gradients.
    QuasiNewton,
    NelderMead,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EscalationPolicy {
    /// Alternate incrementing VQC1 then VQC2, starting with VQC1.
    AlternateVqc1First,
    AlternateVqc2First,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VqtConfig {
    pub beta_grid: Vec<f64>,
    pub target_fidelity: f64,
    /// Per-circuit layer budget.
    pub max_layers: usize,
    pub optimizer: OptimizerKind,
    pub loss_tolerance: f64,
    pub max_iterations: usize,
    pub init_seed: u64,
    pub escalation: EscalationPolicy,
    /// Joint (theta, phi) minimization; alternating sweeps when false.
    pub joint: bool,
    /// Shot-noise emulation for the intermediate measurement (None = exact).
    pub shots: Option<usize>,
    /// Check fidelity every this many iterations and stop as soon as the
    /// target is reached (None = optimize to convergence first). Cuts large-N
    /// runtime substantially when only the fidelity gate matters.
    pub fidelity_check_every: Option<usize>,
    /// Reuse the previous beta's optimized parameters and layer counts when
    /// sweeping an ascending beta grid.
    pub warm_start_across_beta: bool,
}

impl Default for VqtConfig {
    fn default() -> VqtConfig {
        VqtConfig {
            beta_grid: default_beta_grid(),
            target_fidelity: 0.9,
            max_layers: 10,
            optimizer: OptimizerKind::QuasiNewton,
            loss_tolerance: 1e-8,
            max_iterations: 2000,
            init_seed: 0,
            escalation: EscalationPolicy::AlternateVqc1First,
            joint: true,
            shots: None,
            fidelity_check_every: None,
            warm_start_across_beta: false,
        }
    }
}

impl VqtConfig {
    pub fn validate(&self) -> Result<()> {
        if self.beta_grid.is_empty() || self.beta_grid.iter().any(|&b| b <= 0.0 || !b.is_finite()) {
            return Err(Error::InvalidParameter("beta grid must be non-empty and positive".into()));
        }
        if !(self.target_fidelity > 0.0 && self.target_fidelity <= 1.0) {
            return Err(Error::InvalidParameter("target fidelity must be in (0, 1]".into()));
        }
        if self.max_layers < 1 {
            return Err(Error::InvalidParameter("max_layers must be >= 1".into()));
        }
        Ok(())
    }
}

/// Classical Shannon entropy in nats, with 0 ln 0 = 0.
pub fn shannon_entropy(p: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    let mut s = 0.0;
    for &pi in p {
        if pi < -1e-12 {
            return Err(Error::InvalidParameter(format!("negative probability {pi}")));
        }
        total += pi;
        if pi > 0.0 {
            s -= pi * pi.ln();
        }
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!("probabilities sum to {total}")));
    }
    Ok(s.max(0.0))
}

/// One diagonal rotation cluster inside VQC2.
struct RotBlock {
    param_offset: usize,
    z_masks: Vec<u64>,
}

/// Free-energy loss for fixed circuit shapes. Parameter vector layout:
/// `[theta (VQC1) | phi (VQC2)]`.
pub struct FreeEnergyModel {
    pub prog1: CircuitProgram,
    pub prog2: CircuitProgram,
    h_mat: DMatrix<Complex64>,
    blocks: Vec<RotBlock>,
    /// Fixed Clifford segments; `trans[0]` precedes block 1,
    /// `trans[k]` follows block `k`.
    trans: Vec<DMatrix<Complex64>>,
    pub beta: f64,
    dim: usize,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl FreeEnergyModel {
    pub fn new(
        h: &PauliSum,
        clusters: &[CommutingCluster],
        layers1: usize,
        layers2: usize,
        beta: f64,
    ) -> Result<FreeEnergyModel> {
        let n = h.n_qubits();
        let dim = 1usize << n;
        let prog1 = build_vqc1(n, layers1)?;
        let prog2 = build_vqc2(h, clusters, layers2)?;
        let h_mat = h.to_matrix()?;

        let order = vqc2_cluster_order(clusters);
        // dense Clifford per cluster, in VQC2 order
        let cliffords: Vec<DMatrix<Complex64>> = order
            .iter()
            .map(|&ci| {
                let gates: Vec<Gate> = clusters[ci].diagonalizer.gates.iter().map(|&g| Gate::from(g)).collect();
                crate::circuits::dense_unitary(&gates, n, &[])
            })
            .collect();
        let k = order.len();
        let mut blocks = Vec::with_capacity(k * layers2);
        let mut trans = Vec::with_capacity(k * layers2 + 1);
        let mut param = 0usize;
        for layer in 0..layers2 {
            for (pos, &ci) in order.iter().enumerate() {
                let cluster = &clusters[ci];
                if layer == 0 && pos == 0 {
                    trans.push(cliffords[0].clone());
                } else {
                    let prev = if pos == 0 { k - 1 } else { pos - 1 };
                    trans.push(&cliffords[pos] * cliffords[prev].adjoint());
                }
                let z_masks: Vec<u64> =
                    cluster.member_indices.iter().map(|&mi| cluster.diagonalized(h, mi).z_mask()).collect();
                blocks.push(RotBlock { param_offset: param, z_masks });
                param += cluster.member_indices.len();
            }
        }
        trans.push(cliffords[k - 1].adjoint());
        debug_assert_eq!(param, prog2.n_params);
        Ok(FreeEnergyModel {
            n_theta: prog1.n_params,
            n_phi: prog2.n_params,
            prog1,
            prog2,
            h_mat,
            blocks,
            trans,
            beta,
            dim,
        })
    }

    pub fn n_params(&self) -> usize {
        self.n_theta + self.n_phi
    }

    fn split<'a>(&self, params: &'a [f64]) -> Result<(&'a [f64], &'a [f64])> {
        if params.len() != self.n_params() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} parameters, got {}",
                self.n_params(),
                params.len()
            )));
        }
        Ok(params.split_at(self.n_theta))
    }

    pub fn probabilities(&self, theta: &[f64]) -> Result<Vec<f64>> {
        Ok(basis_probabilities(&simulate(&self.prog1, theta, 0)?))
    }

    /// Accumulated rotation phase per basis state for one block.
    fn block_phases(&self, block: &RotBlock, phi: &[f64]) -> Vec<f64> {
        let mut phases = vec![0.0; self.dim];
        for (t, &mask) in block.z_masks.iter().enumerate() {
            let angle = phi[block.param_offset + t];
            for (j, ph) in phases.iter_mut().enumerate() {
                if (mask & j as u64).count_ones() % 2 == 0 {
                    *ph += angle;
                } else {
                    *ph -= angle;
                }
            }
        }
        phases
    }

    fn scale_diag(&self, m: &mut DMatrix<Complex64>, phases: &[f64], sign: f64) {
        // m <- D m D^dagger with D = diag(exp(-i sign phase_j))
        let d: Vec<Complex64> = phases.iter().map(|&p| Complex64::from_polar(1.0, -sign * p)).collect();
        for col in 0..self.dim {
            for row in 0..self.dim {
                m[(row, col)] *= d[row] * d[col].conj();
            }
        }
    }

    fn sandwich(m: &DMatrix<Complex64>, t: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        t * m * t.adjoint()
    }

    fn sandwich_adj(m: &DMatrix<Complex64>, t: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        t.adjoint() * m * t
    }

    /// rho = U2 diag(p) U2^dagger.
    fn forward_density(&self, p: &[f64], phi: &[f64]) -> DMatrix<Complex64> {
        let mut a = DMatrix::from_fn(self.dim, self.dim, |r, c| {
            if r == c {
                Complex64::new(p[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        a = Self::sandwich(&a, &self.trans[0]);
        for (k, block) in self.blocks.iter().enumerate() {
            let phases = self.block_phases(block, phi);
            self.scale_diag(&mut a, &phases, 1.0);
            a = Self::sandwich(&a, &self.trans[k + 1]);
        }
        a
    }

    fn energy_of(&self, rho: &DMatrix<Complex64>) -> f64 {
        let mut e = Complex64::new(0.0, 0.0);
        for j in 0..self.dim {
            for k in 0..self.dim {
                e += rho[(j, k)] * self.h_mat[(k, j)];
            }
        }
        e.re
    }

    /// Loss only (used inside line searches).
    pub fn loss(&self, params: &[f64]) -> Result<f64> {
        let (theta, phi) = self.split(params)?;
        let p = self.probabilities(theta)?;
        let s = shannon_entropy(&p)?;
        let rho = self.forward_density(&p, phi);
        Ok(self.energy_of(&rho) - s / self.beta)
    }

    /// Loss and the full analytic gradient `[dL/dtheta | dL/dphi]`.
    pub fn loss_grad(&self, params: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (theta, phi) = self.split(params)?;
        let psi = simulate(&self.prog1, theta, 0)?;
        let p = basis_probabilities(&psi);
        let s = shannon_entropy(&p)?;
        let mut a = self.forward_density(&p, phi);
        let energy = self.energy_of(&a);
        let loss = energy - s / self.beta;

        let mut grad = vec![0.0; self.n_params()];
        // backward sweep for the phi gradient; ends with B = U2^dagger H U2
        let mut b = self.h_mat.clone();
        let n_blocks = self.blocks.len();
        for k in (0..n_blocks).rev() {
            a = Self::sandwich_adj(&a, &self.trans[k + 1]);
            b = Self::sandwich_adj(&b, &self.trans[k + 1]);
            // row/col sums of M_{jk} = A_{jk} B_{kj}
            let mut row = vec![Complex64::new(0.0, 0.0); self.dim];
            let mut col = vec![Complex64::new(0.0, 0.0); self.dim];
            for j in 0..self.dim {
                for kk in 0..self.dim {
                    let m = a[(j, kk)] * b[(kk, j)];
                    row[j] += m;
                    col[kk] += m;
                }
            }
            let block = &self.blocks[k];
            for (t, &mask) in block.z_masks.iter().enumerate() {
                let mut sum = Complex64::new(0.0, 0.0);
                for j in 0..self.dim {
                    let diff = row[j] - col[j];
                    if (mask & j as u64).count_ones() % 2 == 0 {
                        sum += diff;
                    } else {
                        sum -= diff;
                    }
                }
                grad[self.n_theta + block.param_offset + t] = sum.im;
            }
            let phases = self.block_phases(block, phi);
            self.scale_diag(&mut a, &phases, -1.0);
            self.scale_diag(&mut b, &phases, -1.0);
        }
        a = Self::sandwich_adj(&a, &self.trans[0]);
        b = Self::sandwich_adj(&b, &self.trans[0]);
        let _ = a;
        let d: Vec<f64> = (0..self.dim).map(|j| b[(j, j)].re).collect();

        // theta gradient: adjoint differentiation of <psi| C |psi> with the
        // diagonal observable C_jj = d_j + (ln p_j + 1)/beta
        let c: Vec<f64> = (0..self.dim).map(|j| d[j] + (p[j].max(1e-300).ln() + 1.0) / self.beta).collect();
        let mut cur = psi.amplitudes.clone();
        let mut lam: Vec<Complex64> = cur.iter().zip(&c).map(|(&a, &cj)| a * cj).collect();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.dim];
        for gate in self.prog1.gates.iter().rev() {
            if let Some(pidx) = gate.param_index() {
                // generator P/2 with P the single-qubit Pauli of the gate
                let (x_mask, z_mask) = match *gate {
                    Gate::Rz { qubit, .. } => (0u64, 1u64 << qubit),
                    Gate::Ry { qubit, .. } => (1u64 << qubit, 1u64 << qubit),
                    _ => unreachable!(),
                };
                let gen = PauliTerm::from_masks(64, x_mask, z_mask, Complex64::new(0.5, 0.0));
                for v in scratch.iter_mut() {
                    *v = Complex64::new(0.0, 0.0);
                }
                for (j, &amp) in cur.iter().enumerate() {
                    let (out, coeff) = gen.apply_basis(j as u64);
                    scratch[out as usize] += coeff * amp;
                }
                let inner: Complex64 = lam.iter().zip(&scratch).map(|(l, s)| l.conj() * s).sum();
                grad[pidx] = 2.0 * inner.im;
            }
            apply_gate(&mut cur, gate, theta, true);
            apply_gate(&mut lam, gate, theta, true);
        }
        Ok((loss, grad))
    }

    /// Prepared density matrix for diagnostics, using the stated
    /// probability vector (exact or shot-sampled).
    pub fn prepared_state(&self, p: &[f64], params: &[f64]) -> Result<DensityMatrix> {
        let (_, phi) = self.split(params)?;
        let rho = assemble_mixed_state(p, &self.prog2, phi)?;
        let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
        DensityMatrix::new(rho)
    }
}

/// Standalone loss evaluation from raw parameter vectors; builds the circuit
/// structure from scratch.
pub fn free_energy_loss(theta: &[f64], phi: &[f64], inst: &SykInstance, beta: f64) -> Result<f64> {
    let clusters = cluster_commuting(&inst.hamiltonian)?;
    let n = inst.hamiltonian.n_qubits();
    let layers1 = theta.len() / (3 * n).max(1);
    let layers2 = phi.len() / inst.hamiltonian.len().max(1);
    let model = FreeEnergyModel::new(&inst.hamiltonian, &clusters, layers1.max(1), layers2.max(1), beta)?;
    let mut params = theta.to_vec();
    params.extend_from_slice(phi);
    model.loss(&params)
}

struct OptimOutcome {
    x: Vec<f64>,
    loss: f64,
    iterations: usize,
    converged: bool,
}

/// L-BFGS (memory 10) with Armijo backtracking.
fn lbfgs<FG, F>(
    mut f_grad: FG,
    mut f_only: F,
    x0: Vec<f64>,
    max_iter: usize,
    tol: f64,
) -> Result<OptimOutcome>
where
    FG: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
    F: FnMut(&[f64]) -> Result<f64>,
{
    const MEM: usize = 10;
    let n = x0.len();
    let mut x = x0;
    let (mut fx, mut g) = f_grad(&x)?;
    let mut s_hist: Vec<Vec<f64>> = Vec::new();
    let mut y_hist: Vec<Vec<f64>> = Vec::new();
    let mut rho_hist: Vec<f64> = Vec::new();
    let mut stall = 0usize;
    let mut iterations = 0usize;
    for _ in 0..max_iter {
        iterations += 1;
        let gnorm = g.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        if gnorm < 1e-8 {
            return Ok(OptimOutcome { x, loss: fx, iterations, converged: true });
        }
        // two-loop recursion
        let mut q = g.clone();
        let m = s_hist.len();
        let mut alphas = vec![0.0; m];
        for i in (0..m).rev() {
            let alpha = rho_hist[i] * dot(&s_hist[i], &q);
            alphas[i] = alpha;
            axpy(&mut q, -alpha, &y_hist[i]);
        }
        if m > 0 {
            let gamma = dot(&s_hist[m - 1], &y_hist[m - 1]) / dot(&y_hist[m - 1], &y_hist[m - 1]).max(1e-300);
            for v in q.iter_mut() {
                *v *= gamma;
            }
        }
        for i in 0..m {
            let beta = rho_hist[i] * dot(&y_hist[i], &q);
            axpy(&mut q, alphas[i] - beta, &s_hist[i]);
        }
        let mut dir: Vec<f64> = q.iter().map(|&v| -v).collect();
        let mut descent = dot(&dir, &g);
        if descent >= 0.0 {
            // fall back to steepest descent
            dir = g.iter().map(|&v| -v).collect();
            descent = -dot(&g, &g);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }
        // Armijo backtracking
        let mut step = 1.0;
        let c1 = 1e-4;
        let mut accepted = false;
        let mut x_new = vec![0.0; n];
        for _ in 0..30 {
            for i in 0..n {
                x_new[i] = x[i] + step * dir[i];
            }
            let f_new = f_only(&x_new)?;
            if f_new <= fx + c1 * step * descent {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return Ok(OptimOutcome { x, loss: fx, iterations, converged: stall > 0 });
        }
        let (f_acc, g_new) = f_grad(&x_new)?;
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 {
            s_hist.push(s);
            y_hist.push(y);
            rho_hist.push(1.0 / sy);
            if s_hist.len() > MEM {
                s_hist.remove(0);
                y_hist.remove(0);
                rho_hist.remove(0);
            }
        }
        let improvement = fx - f_acc;
        x = x_new;
        fx = f_acc;
        g = g_new;
        if improvement.abs() < tol * (1.0 + fx.abs()) {
            stall += 1;
            if stall >= 3 {
                return Ok(OptimOutcome { x, loss: fx, iterations, converged: true });
            }
        } else {
            stall = 0;
        }
    }
    Ok(OptimOutcome { x, loss: fx, iterations, converged: false })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(acc: &mut [f64], alpha: f64, v: &[f64]) {
    for (a, &b) in acc.iter_mut().zip(v) {
        *a += alpha * b;
    }
}

/// Nelder-Mead simplex, gradient-free alternative.
fn nelder_mead<F>(mut f: F, x0: Vec<f64>, max_iter: usize, tol: f64) -> Result<OptimOutcome>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.clone()];
    for i in 0..n {
        let mut v = x0.clone();
        v[i] += 0.25;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect::<Result<_>>()?;
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];
        if (values[worst] - values[best]).abs() < tol * (1.0 + values[best].abs()) {
            return Ok(OptimOutcome { x: simplex[best].clone(), loss: values[best], iterations, converged: true });
        }
        let mut centroid = vec![0.0; n];
        for (i, v) in simplex.iter().enumerate() {
            if i != worst {
                for (c, &vi) in centroid.iter_mut().zip(v) {
                    *c += vi / n as f64;
                }
            }
        }
        let point = |coef: f64, centroid: &[f64], worst_v: &[f64]| -> Vec<f64> {
            centroid.iter().zip(worst_v).map(|(&c, &w)| c + coef * (c - w)).collect()
        };
        let refl = point(1.0, &centroid, &simplex[worst]);
        let f_refl = f(&refl)?;
        if f_refl < values[best] {
            let exp = point(2.0, &centroid, &simplex[worst]);
            let f_exp = f(&exp)?;
            if f_exp < f_refl {
                simplex[worst] = exp;
                values[worst] = f_exp;
            } else {
                simplex[worst] = refl;
                values[worst] = f_refl;
            }
        } else if f_refl < values[second_worst] {
            simplex[worst] = refl;
            values[worst] = f_refl;
        } else {
            let contr = point(-0.5, &centroid, &simplex[worst]);
            let f_contr = f(&contr)?;
            if f_contr < values[worst] {
                simplex[worst] = contr;
                values[worst] = f_contr;
            } else {
                // shrink toward the best vertex
                let best_v = simplex[best].clone();
                for i in 0..=n {
                    if i != best {
                        for (v, &b) in simplex[i].iter_mut().zip(&best_v) {
                            *v = b + 0.5 * (*v - b);
                        }
                        values[i] = f(&simplex[i])?;
                    }
                }
            }
        }
    }
    let best = (0..=n).min_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap()).unwrap();
    Ok(OptimOutcome { x: simplex[best].clone(), loss: values[best], iterations, converged: false })
}

/// Per-(instance, beta) variational record.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThermalResult {
    pub beta: f64,
    pub loss: f64,
    pub energy: f64,
    pub shannon_entropy: f64,
    pub purity: f64,
    pub fidelity: f64,
    pub layers1: usize,
    pub layers2: usize,
    pub n_params1: usize,
    pub n_params2: usize,
    pub cnot_count: usize,
    pub iterations: usize,
    pub wall_time_s: f64,
    pub converged: bool,
    /// Every loss value evaluated during optimization (line searches
    /// included), for the free-energy lower-bound property test.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub optimizer_trace: Vec<f64>,
    /// Optimized parameters, kept for replay and cross-beta warm starts.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub theta: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phi: Vec<f64>,
}

/// Jointly optimize (theta, phi) at one beta, escalating layers until the
/// fidelity target or the layer budget is hit. Returns the best result seen.
pub fn optimize_at_beta(
    inst: &SykInstance,
    spec: &SpectralDecomposition,
    clusters: &[CommutingCluster],
    beta: f64,
    config: &VqtConfig,
    warm_start: Option<&ThermalResult>,
) -> Result<ThermalResult> {
    config.validate()?;
    let start = Instant::now();
    let h = &inst.hamiltonian;
    let n = h.n_qubits();
    let rho_exact = thermal_density_matrix(spec, beta)?;

    let mut layers1 = warm_start.map_or(1, |w| w.layers1);
    let mut layers2 = warm_start.map_or(1, |w| w.layers2);
    let mut next_is_vqc1 = config.escalation == EscalationPolicy::AlternateVqc1First;
    let mut theta: Vec<f64> = warm_start.map_or_else(Vec::new, |w| w.theta.clone());
    let mut phi: Vec<f64> = warm_start.map_or_else(Vec::new, |w| w.phi.clone());
    let mut best: Option<ThermalResult> = None;
    let trace: RefCell<Vec<f64>> = RefCell::new(Vec::new());
    // loss of the trivial trial state (uniform p, phi = 0); any run that ends
    // above it got stuck, since that point is reachable by hand
    let trace_h: f64 = 0.0; // SYK has no identity term
    let uniform_bound = trace_h / (1usize << n) as f64 - (n as f64) * 2.0f64.ln() / beta;

    let mut rng = ChaCha12Rng::seed_from_u64(derive_seed(config.init_seed, inst.params.seed ^ beta.to_bits()));
    loop {
        let model = FreeEnergyModel::new(h, clusters, layers1, layers2, beta)?;
        // layer escalation keeps existing parameters; new ones start at zero
        theta.resize(model.n_theta, 0.0);
        phi.resize(model.n_phi, 0.0);
        if theta.iter().all(|&v| v == 0.0) {
            for v in theta.iter_mut() {
                *v = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
            }
        }

        let evaluate = |p_stated: &[f64], x: &[f64]| -> Result<(f64, DensityMatrix)> {
            let rho_prepared = model.prepared_state(p_stated, x)?;
            let fid = fidelity(&rho_exact, &rho_prepared)?;
            Ok((fid, rho_prepared))
        };
        let stated = |x: &[f64]| -> Result<Vec<f64>> {
            let (th, _) = x.split_at(model.n_theta);
            let p = model.probabilities(th)?;
            Ok(match config.shots {
                Some(shots) => {
                    let mut shot_rng =
                        ChaCha12Rng::seed_from_u64(derive_seed(config.init_seed ^ 0x5107, inst.params.seed));
                    sampled_probabilities(&p, shots, &mut shot_rng)
                }
                None => p,
            })
        };

        // candidate = (x, loss, fidelity, iterations, converged)
        let mut attempt_best: Option<(Vec<f64>, f64, f64, usize, bool)> = None;
        'restarts: for restart in 0..4 {
            let mut x: Vec<f64> = theta.iter().chain(phi.iter()).copied().collect();
            if restart > 0 {
                for v in x.iter_mut().take(model.n_theta) {
                    *v = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
                }
            }
            let chunk = config.fidelity_check_every.unwrap_or(config.max_iterations).max(1);
            let mut iters = 0usize;
            let mut loss;
            let mut converged;
            loop {
                let outcome = match config.optimizer {
                    OptimizerKind::QuasiNewton => lbfgs(
                        |p| {
                            let (l, g) = model.loss_grad(p)?;
                            trace.borrow_mut().push(l);
                            Ok((l, g))
                        },
                        |p| {
                            let l = model.loss(p)?;
                            trace.borrow_mut().push(l);
                            Ok(l)
                        },
                        x,
                        chunk.min(config.max_iterations - iters),
                        config.loss_tolerance,
                    )?,
                    OptimizerKind::NelderMead => nelder_mead(
                        |p| {
                            let l = model.loss(p)?;
                            trace.borrow_mut().push(l);
                            Ok(l)
                        },
                        x,
                        chunk.min(config.max_iterations - iters),
                        config.loss_tolerance,
                    )?,
                };
                x = outcome.x;
                loss = outcome.loss;
                iters += outcome.iterations;
                converged = outcome.converged;
                if converged || iters >= config.max_iterations {
                    break;
                }
                if config.fidelity_check_every.is_some() {
                    let (fid, _) = evaluate(&stated(&x)?, &x)?;
                    if fid >= config.target_fidelity {
                        let better = attempt_best.as_ref().map_or(true, |b| fid > b.2);
                        if better {
                            attempt_best = Some((x.clone(), loss, fid, iters, true));
                        }
                        break 'restarts;
                    }
                }
            }
            let (fid, _) = evaluate(&stated(&x)?, &x)?;
            let better = attempt_best.as_ref().map_or(true, |b| fid > b.2);
            if better {
                attempt_best = Some((x, loss, fid, iters, converged));
            }
            let good_enough =
                fid >= config.target_fidelity || (converged && loss <= uniform_bound + 1e-9);
            if good_enough {
                break;
            }
        }
        let (x, loss, fid, iterations, converged) = attempt_best
            .ok_or_else(|| Error::OptimizerFailure(format!("no optimizer outcome at beta {beta}")))?;
        let (theta_opt, phi_opt) = x.split_at(model.n_theta);
        theta = theta_opt.to_vec();
        phi = phi_opt.to_vec();

        let p_stated = stated(&x)?;
        let (_, rho_prepared) = evaluate(&p_stated, &x)?;
        let s = shannon_entropy(&p_stated)?;
        let energy = loss + s / beta;
        let result = ThermalResult {
            beta,
            loss,
            energy,
            shannon_entropy: s,
            purity: rho_prepared.purity(),
            fidelity: fid,
            layers1,
            layers2,
            n_params1: model.n_theta,
            n_params2: model.n_phi,
            cnot_count: model.prog1.cnot_count() + model.prog2.cnot_count(),
            iterations,
            wall_time_s: start.elapsed().as_secs_f64(),
            converged,
            optimizer_trace: Vec::new(),
            theta: theta.clone(),
            phi: phi.clone(),
        };
        // monotone escalation: the best-so-far result is retained
        if best.as_ref().map_or(true, |b| result.fidelity > b.fidelity) {
            best = Some(result);
        }
        if best.as_ref().unwrap().fidelity >= config.target_fidelity {
            break;
        }
        if layers1 >= config.max_layers && layers2 >= config.max_layers {
            break;
        }
        // alternate escalation, skipping a circuit already at its budget
        if (next_is_vqc1 && layers1 < config.max_layers) || layers2 >= config.max_layers {
            layers1 += 1;
        } else {
            layers2 += 1;
        }
        next_is_vqc1 = !next_is_vqc1;
    }
    let mut best = best.unwrap();
    best.wall_time_s = start.elapsed().as_secs_f64();
    best.optimizer_trace = trace.into_inner();
    Ok(best)
}

/// Exact and variational record for one (instance, beta) point.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointRecord {
    pub instance_index: usize,
    pub seed: u64,
    pub beta: f64,
    pub exact_free_energy: f64,
    pub exact_energy: f64,
    pub exact_entropy: f64,
    pub exact_purity: f64,
    pub exact_ground_energy: f64,
    pub exact_max_energy: f64,
    pub ln_partition: f64,
    pub result: ThermalResult,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

fn mean_std(values: &[f64]) -> MeanStd {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    MeanStd { mean, std: var.sqrt() }
}

/// Disorder-average summary at one beta: exact bands and variational means.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SummaryRow {
    pub beta: f64,
    pub exact_free_energy: MeanStd,
    pub exact_energy: MeanStd,
    pub exact_entropy: MeanStd,
    pub exact_purity: MeanStd,
    pub var_free_energy: MeanStd,
    pub var_energy: MeanStd,
    pub var_entropy: MeanStd,
    pub var_purity: MeanStd,
    pub mean_fidelity: f64,
    pub mean_layers1: f64,
    pub mean_layers2: f64,
    pub mean_cnots: f64,
    pub mean_ground_energy: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub points: Vec<PointRecord>,
    pub summary: Vec<SummaryRow>,
    /// Messages for points whose optimization failed outright.
    pub failures: Vec<String>,
}

/// Run `n_instances` seeded disorder realizations through the full beta
/// grid. Instance seeds derive from the template's seed; records are ordered
/// by (instance, beta) regardless of scheduling.
pub fn run_ensemble(template: &SykParams, n_instances: usize, config: &VqtConfig) -> Result<EnsembleReport> {
    if n_instances < 1 {
        return Err(Error::InvalidParameter("n_instances must be >= 1".into()));
    }
    config.validate()?;
    let instance_results: Vec<Result<(Vec<PointRecord>, Vec<String>)>> = (0..n_instances)
        .into_par_iter()
        .map(|idx| {
            let mut params = *template;
            params.seed = derive_seed(template.seed, idx as u64);
            let inst = sample_instance(&params)?;
            let spec = diagonalize(&inst.hamiltonian)?;
            let clusters = cluster_commuting(&inst.hamiltonian)?;
            let mut records = Vec::new();
            let mut failures = Vec::new();
            let mut previous: Option<ThermalResult> = None;
            for &beta in &config.beta_grid {
                let exact = exact_observables(&spec, beta)?;
                let warm = if config.warm_start_across_beta { previous.as_ref() } else { None };
                match optimize_at_beta(&inst, &spec, &clusters, beta, config, warm) {
                    Ok(result) => {
                        previous = Some(result.clone());
                        records.push(PointRecord {
                            instance_index: idx,
                            seed: params.seed,
                            beta,
                            exact_free_energy: exact.free_energy,
                            exact_energy: exact.energy,
                            exact_entropy: exact.entropy,
                            exact_purity: exact.purity,
                            exact_ground_energy: spec.ground_energy(),
                            exact_max_energy: spec.max_energy(),
                            ln_partition: spec.ln_partition(beta),
                            result,
                        });
                    }
                    Err(e) => failures.push(format!("instance {idx} beta {beta}: {e}")),
                }
            }
            Ok((records, failures))
        })
        .collect();
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for r in instance_results {
        let (recs, fails) = r?;
        points.extend(recs);
        failures.extend(fails);
    }
    points.sort_by(|a, b| (a.instance_index, a.beta.to_bits()).cmp(&(b.instance_index, b.beta.to_bits())));
    let summary = summarize(&points, &config.beta_grid);
    Ok(EnsembleReport { points, summary, failures })
}

pub fn summarize(points: &[PointRecord], beta_grid: &[f64]) -> Vec<SummaryRow> {
    beta_grid
        .iter()
        .map(|&beta| {
            let at: Vec<&PointRecord> = points.iter().filter(|p| p.beta == beta).collect();
            let collect = |f: &dyn Fn(&PointRecord) -> f64| -> Vec<f64> { at.iter().map(|p| f(p)).collect() };
            SummaryRow {
                beta,
                exact_free_energy: mean_std(&collect(&|p| p.exact_free_energy)),
                exact_energy: mean_std(&collect(&|p| p.exact_energy)),
                exact_entropy: mean_std(&collect(&|p| p.exact_entropy)),
                exact_purity: mean_std(&collect(&|p| p.exact_purity)),
                var_free_energy: mean_std(&collect(&|p| p.result.loss)),
                var_energy: mean_std(&collect(&|p| p.result.energy)),
                var_entropy: mean_std(&collect(&|p| p.result.shannon_entropy)),
                var_purity: mean_std(&collect(&|p| p.result.purity)),
                mean_fidelity: mean_std(&collect(&|p| p.result.fidelity)).mean,
                mean_layers1: mean_std(&collect(&|p| p.result.layers1 as f64)).mean,
                mean_layers2: mean_std(&collect(&|p| p.result.layers2 as f64)).mean,
                mean_cnots: mean_std(&collect(&|p| p.result.cnot_count as f64)).mean,
                mean_ground_energy: mean_std(&collect(&|p| p.exact_ground_energy)).mean,
            }
        })
        .collect()
}

/// Resource accounting in the shape of the layer/parameter/CNOT tables.
pub fn resource_report(points: &[PointRecord]) -> Result<String> {
    if points.is_empty() {
        return Err(Error::InvalidParameter("no results to report".into()));
    }
    let mut betas: Vec<f64> = points.iter().map(|p| p.beta).collect();
    betas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    betas.dedup();
    let params_per_layer = mean_std(
        &points.iter().map(|p| p.result.n_params2 as f64 / p.result.layers2 as f64).collect::<Vec<_>>(),
    );
    let mut out = String::new();
    out.push_str(&format!("VQC2 trainable parameters per layer: {:.1}\n", params_per_layer.mean));
    out.push_str("beta    <l1>    <l2>    <cnots>\n");
    for &beta in &betas {
        let at: Vec<&PointRecord> = points.iter().filter(|p| p.beta == beta).collect();
        let l1 = at.iter().map(|p| p.result.layers1 as f64).sum::<f64>() / at.len() as f64;
        let l2 = at.iter().map(|p| p.result.layers2 as f64).sum::<f64>() / at.len() as f64;
        let cn = at.iter().map(|p| p.result.cnot_count as f64).sum::<f64>() / at.len() as f64;
        out.push_str(&format!("{beta:<7} {l1:<7.2} {l2:<7.2} {cn:<7.1}\n"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syk::sample_dense;
    use approx::assert_abs_diff_eq;

    #[test]
    fn shannon_entropy_examples() {
        let mut p = vec![0.0; 8];
        p[0] = 1.0;
        assert_abs_diff_eq!(shannon_entropy(&p).unwrap(), 0.0, epsilon = 1e-15);
        let uniform = vec![1.0 / 8.0; 8];
        assert_abs_diff_eq!(shannon_entropy(&uniform).unwrap(), 3.0 * 2.0f64.ln(), epsilon = 1e-12);
        let p = vec![0.5, 0.25, 0.25, 0.0];
        assert_abs_diff_eq!(shannon_entropy(&p).unwrap(), 1.5 * 2.0f64.ln(), epsilon = 1e-12);
        assert!(shannon_entropy(&[0.5, 0.6]).is_err());
        assert!(shannon_entropy(&[1.1, -0.1]).is_err());
    }

    fn setup(n: usize, seed: u64) -> (SykInstance, Vec<CommutingCluster>) {
        let inst = sample_dense(&SykParams::dense(n, seed)).unwrap();
        let clusters = cluster_commuting(&inst.hamiltonian).unwrap();
        (inst, clusters)
    }

    #[test]
    fn loss_matches_direct_evaluation() {
        // loss must equal Tr[rho_VQC2 H] - S/beta computed via the dense
        // assembled state, an independent route
        let (inst, clusters) = setup(6, 21);
        let beta = 3.0;
        let model = FreeEnergyModel::new(&inst.hamiltonian, &clusters, 2, 1, beta).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let params: Vec<f64> = (0..model.n_params()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let loss = model.loss(&params).unwrap();

        let (theta, phi) = params.split_at(model.n_theta);
        let p = model.probabilities(theta).unwrap();
        let rho = assemble_mixed_state(&p, &model.prog2, phi).unwrap();
        let h = inst.hamiltonian.to_matrix().unwrap();
        let e = (&rho * &h).trace().re;
        let s = shannon_entropy(&p).unwrap();
        assert_abs_diff_eq!(loss, e - s / beta, epsilon = 1e-9);
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        let (inst, clusters) = setup(6, 33);
        let beta = 2.5;
        let model = FreeEnergyModel::new(&inst.hamiltonian, &clusters, 1, 1, beta).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let params: Vec<f64> = (0..model.n_params()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (_, grad) = model.loss_grad(&params).unwrap();
        let h = 1e-6;
        for i in 0..model.n_params() {
            let mut plus = params.clone();
            let mut minus = params.clone();
            plus[i] += h;
            minus[i] -= h;
            let fd = (model.loss(&plus).unwrap() - model.loss(&minus).unwrap()) / (2.0 * h);
            // 1e-7 absolute floor: central differences of a flat direction
            // bottom out at round-off (~eps*|f|/h)
            let scale = fd.abs().max(grad[i].abs()).max(1e-3);
            assert!(
                (grad[i] - fd).abs() / scale < 1e-4 || (grad[i] - fd).abs() < 1e-7,
                "param {i}: analytic {} vs fd {fd}",
                grad[i]
            );
        }
    }

    #[test]
    fn loss_identity_when_p_concentrated() {
        // phi = 0 and p = delta_0: loss = <b_0|H|b_0> = H_00
        let (inst, clusters) = setup(6, 8);
        let beta = 4.0;
        let model = FreeEnergyModel::new(&inst.hamiltonian, &clusters, 1, 1, beta).unwrap();
        // VQC1 with all parameters zero maps |0..0> to itself
        let params = vec![0.0; model.n_params()];
        let loss = model.loss(&params).unwrap();
        let h = inst.hamiltonian.to_matrix().unwrap();
        assert_abs_diff_eq!(loss, h[(0, 0)].re, epsilon = 1e-10);
    }

    #[test]
    fn gibbs_bogoliubov_holds_for_random_parameters() {
        let (inst, clusters) = setup(6, 55);
        let spec = diagonalize(&inst.hamiltonian).unwrap();
        for &beta in &[1.0, 9.5, 35.0] {
            let model = FreeEnergyModel::new(&inst.hamiltonian, &clusters, 1, 1, beta).unwrap();
            let bound = -spec.ln_partition(beta) / beta;
            let mut rng = ChaCha12Rng::seed_from_u64(beta.to_bits());
            for _ in 0..20 {
                let params: Vec<f64> = (0..model.n_params()).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let loss = model.loss(&params).unwrap();
                assert!(loss >= bound - 1e-9, "loss {loss} below bound {bound} at beta {beta}");
            }
        }
    }

    #[test]
    fn optimize_beta_one_single_layer() {
        let (inst, clusters) = setup(6, 3);
        let spec = diagonalize(&inst.hamiltonian).unwrap();
        let config = VqtConfig::default();
        let result = optimize_at_beta(&inst, &spec, &clusters, 1.0, &config, None).unwrap();
        assert!(result.fidelity >= 0.9, "fidelity {}", result.fidelity);
        assert_eq!(result.layers1, 1);
        assert_eq!(result.layers2, 1);
        // result invariant: F = <H> - S/beta
        assert_abs_diff_eq!(
            result.loss,
            result.energy - result.shannon_entropy / result.beta,
            epsilon = 1e-9
        );
        // every evaluated loss respects the exact free-energy lower bound
        let bound = -spec.ln_partition(1.0) / 1.0;
        for &l in &result.optimizer_trace {
            assert!(l >= bound - 1e-9);
        }
    }

    #[test]
    fn maximally_mixed_limit() {
        let (inst, clusters) = setup(6, 4);
        let spec = diagonalize(&inst.hamiltonian).unwrap();
        let mut config = VqtConfig::default();
        config.beta_grid = vec![1e-3];
        let result = optimize_at_beta(&inst, &spec, &clusters, 1e-3, &config, None).unwrap();
        let n = 3.0;
        assert!(result.shannon_entropy >= 0.99 * n * 2.0f64.ln(), "S = {}", result.shannon_entropy);
        assert!(result.purity <= 1.05 / 8.0, "P = {}", result.purity);
    }

    #[test]
    fn determinism_of_optimization() {
        let (inst, clusters) = setup(6, 12);
        let spec = diagonalize(&inst.hamiltonian).unwrap();
        let config = VqtConfig::default();
        let a = optimize_at_beta(&inst, &spec, &clusters, 5.25, &config, None).unwrap();
        let b = optimize_at_beta(&inst, &spec, &clusters, 5.25, &config, None).unwrap();
        assert_eq!(a.loss, b.loss);
        assert_eq!(a.fidelity, b.fidelity);
        assert_eq!(a.optimizer_trace, b.optimizer_trace);
    }

    #[test]
    fn nelder_mead_reaches_target_at_beta_one() {
        let (inst, clusters) = setup(6, 3);
        let spec = diagonalize(&inst.hamiltonian).unwrap();
        let mut config = VqtConfig::default();
        config.optimizer = OptimizerKind::NelderMead;
        config.max_iterations = 5000;
        let result = optimize_at_beta(&inst, &spec, &clusters, 1.0, &config, None).unwrap();
        assert!(result.fidelity >= 0.9, "fidelity {}", result.fidelity);
    }

    #[test]
    fn ensemble_bookkeeping() {
        let template = SykParams::dense(6, 42);
        let mut config = VqtConfig::default();
        config.beta_grid = vec![1.0, 9.5];
        let report = run_ensemble(&template, 3, &config).unwrap();
        assert_eq!(report.points.len(), 6);
        assert!(report.failures.is_empty());
        assert_eq!(report.summary.len(), 2);
        // summary means equal direct recomputation
        for row in &report.summary {
            let at: Vec<&PointRecord> = report.points.iter().filter(|p| p.beta == row.beta).collect();
            let mean = at.iter().map(|p| p.exact_energy).sum::<f64>() / at.len() as f64;
            assert_abs_diff_eq!(row.exact_energy.mean, mean, epsilon = 1e-12);
        }
        // deterministic replay
        let report2 = run_ensemble(&template, 3, &config).unwrap();
        for (a, b) in report.points.iter().zip(&report2.points) {
            assert_eq!(a.result.loss, b.result.loss);
            assert_eq!(a.result.fidelity, b.result.fidelity);
        }
    }

    #[test]
    fn resource_report_shape() {
        let template = SykParams::dense(6, 42);
        let mut config = VqtConfig::default();
        config.beta_grid = vec![1.0];
        let report = run_ensemble(&template, 2, &config).unwrap();
        let table = resource_report(&report.points).unwrap();
        assert!(table.contains("parameters per layer: 15.0"));
        assert!(table.contains("beta"));
    }
}
