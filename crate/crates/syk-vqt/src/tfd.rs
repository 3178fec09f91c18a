//! Thermofield-double preparation on a doubled register.
//!
//! System A occupies Majoranas 1..N (low qubits), system B occupies
//! N+1..2N (high qubits), both under one Jordan-Wigner chain so that the
//! cross coupling i mu sum_j chi_A^j chi_B^j is Hermitian. Tracing out B
//! from the coupled ground state approximates the thermal state of A at a
//! temperature set by mu.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::{
    diagonalize, diagonalize_matrix, fidelity, partial_trace, thermal_density_matrix, DensityMatrix, Keep,
    SpectralDecomposition, DEGENERACY_TOL,
};
use crate::pauli::{majorana_quartic, majorana_to_pauli, MajoranaIndex, PauliSum};
use crate::syk::SykInstance;

/// Sign convention for the B-side Hamiltonian copy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HbConvention {
    /// H_B built from the B Majoranas with the couplings used verbatim.
    #[default]
    Same,
    /// H_B with every coupling negated.
    SignFlipped,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TfdParams {
    pub mu: f64,
    pub convention: HbConvention,
}

/// H = H_A + H_B + i mu sum_j chi_A^j chi_B^j on N qubits (2N Majoranas).
pub fn build_tfd_hamiltonian(inst: &SykInstance, params: &TfdParams) -> Result<PauliSum> {
    if !(params.mu.is_finite() && params.mu >= 0.0) {
        return Err(Error::InvalidParameter(format!("mu must be finite and >= 0, got {}", params.mu)));
    }
    let n_maj = inst.params.n_majorana;
    let n_qubits = n_maj; // doubled system: 2N Majoranas on N qubits
    let hb_sign = match params.convention {
        HbConvention::Same => 1.0,
        HbConvention::SignFlipped => -1.0,
    };
    let mut terms = Vec::new();
    for c in &inst.couplings {
        let mut a = majorana_quartic(c.i, c.j, c.k, c.l, n_qubits)?;
        a.coeff *= c.value;
        terms.push(a);
        let mut b = majorana_quartic(c.i + n_maj, c.j + n_maj, c.k + n_maj, c.l + n_maj, n_qubits)?;
        b.coeff *= hb_sign * c.value;
        terms.push(b);
    }
    for j in 1..=n_maj {
        let a = majorana_to_pauli(MajoranaIndex::new(j, 2 * n_maj)?, n_qubits)?;
        let b = majorana_to_pauli(MajoranaIndex::new(j + n_maj, 2 * n_maj)?, n_qubits)?;
        let mut term = a.multiply(&b)?;
        term.coeff *= Complex64::new(0.0, params.mu);
        terms.push(term);
    }
    let sum = PauliSum::from_terms(n_qubits, terms)?;
    sum.assert_hermitian()?;
    Ok(sum)
}

/// Analytic TFD vector of H_A at inverse temperature beta:
/// sum_i sqrt(p_i) |E_i>_A (x) |E_i^*>_B. Its B-trace is exactly rho_beta.
pub fn analytic_tfd_vector(spec: &SpectralDecomposition, beta: f64) -> Result<DVector<Complex64>> {
    let p = spec.thermal_probabilities(beta);
    let d = spec.energies.len();
    let mut v = DVector::from_element(d * d, Complex64::new(0.0, 0.0));
    for (i, &pi) in p.iter().enumerate() {
        if pi == 0.0 {
            continue;
        }
        let w = pi.sqrt();
        let col = spec.eigenvectors.column(i);
        // A is the low factor: index = a + d*b
        for a in 0..d {
            for b in 0..d {
                v[a + d * b] += Complex64::new(w, 0.0) * col[a] * col[b].conj();
            }
        }
    }
    Ok(v)
}

#[derive(Clone, Debug)]
pub struct TfdGroundState {
    pub energy: f64,
    pub state: DVector<Complex64>,
    /// Set when the coupled ground space is (numerically) degenerate, in
    /// which case the traced-out state is basis-dependent.
    pub degenerate: bool,
}

pub fn tfd_ground_state(h_tfd: &PauliSum) -> Result<TfdGroundState> {
    let spec = diagonalize_matrix(&h_tfd.to_matrix()?)?;
    let degenerate = spec.energies[1] - spec.energies[0] < DEGENERACY_TOL;
    Ok(TfdGroundState {
        energy: spec.energies[0],
        state: spec.eigenvectors.column(0).into_owned(),
        degenerate,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FidelityPoint {
    pub mu: f64,
    pub beta: f64,
    pub fidelity: f64,
}

/// Fidelity of Tr_B |g(mu)><g(mu)| against rho_beta(H_A) over a
/// (mu, beta) grid, plus the best beta per mu.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FidelityMap {
    pub points: Vec<FidelityPoint>,
    pub mu_grid: Vec<f64>,
    pub beta_grid: Vec<f64>,
    /// (mu, argmax-beta, max fidelity) rows.
    pub ridge: Vec<(f64, f64, f64)>,
    pub degenerate_mus: Vec<f64>,
}

impl FidelityMap {
    pub fn at(&self, mu: f64, beta: f64) -> Option<f64> {
        self.points.iter().find(|p| p.mu == mu && p.beta == beta).map(|p| p.fidelity)
    }
}

pub fn tfd_fidelity_map(
    inst: &SykInstance,
    mu_grid: &[f64],
    beta_grid: &[f64],
    convention: HbConvention,
) -> Result<FidelityMap> {
    if mu_grid.is_empty() || beta_grid.is_empty() {
        return Err(Error::InvalidParameter("mu and beta grids must be non-empty".into()));
    }
    let spec_a = diagonalize(&inst.hamiltonian)?;
    let n = inst.params.n_qubits();
    let thermal: Vec<DensityMatrix> =
        beta_grid.iter().map(|&b| thermal_density_matrix(&spec_a, b)).collect::<Result<_>>()?;
    let mut points = Vec::with_capacity(mu_grid.len() * beta_grid.len());
    let mut ridge = Vec::with_capacity(mu_grid.len());
    let mut degenerate_mus = Vec::new();
    for &mu in mu_grid {
        let h_tfd = build_tfd_hamiltonian(inst, &TfdParams { mu, convention })?;
        let ground = tfd_ground_state(&h_tfd)?;
        if ground.degenerate {
            degenerate_mus.push(mu);
        }
        let rho_full = DensityMatrix::from_pure(ground.state.as_slice())?;
        let rho_a = partial_trace(&rho_full, Keep::Low(n))?;
        let mut best = (beta_grid[0], -1.0);
        for (bi, &beta) in beta_grid.iter().enumerate() {
            let f = fidelity(&thermal[bi], &rho_a)?;
            if f > best.1 {
                best = (beta, f);
            }
            points.push(FidelityPoint { mu, beta, fidelity: f });
        }
        ridge.push((mu, best.0, best.1));
    }
    Ok(FidelityMap {
        points,
        mu_grid: mu_grid.to_vec(),
        beta_grid: beta_grid.to_vec(),
        ridge,
        degenerate_mus,
    })
}

/// Round trip: the analytic TFD vector of H_A traced over B reproduces the
/// thermal state. Returns the fidelity (expected > 1 - 1e-9).
pub fn tfd_round_trip(inst: &SykInstance, beta: f64) -> Result<f64> {
    let spec = diagonalize(&inst.hamiltonian)?;
    let v = analytic_tfd_vector(&spec, beta)?;
    let n = inst.params.n_qubits();
    let rho_a = partial_trace(&DensityMatrix::from_pure(v.as_slice())?, Keep::Low(n))?;
    let rho_beta = thermal_density_matrix(&spec, beta)?;
    fidelity(&rho_beta, &rho_a)
}
