//! Three independent evolution engines for the one-excitation sector.
//!
//! * [`evolve_closed_form`] — analytic binomial amplitudes, valid only for
//!   the engineered coupling profile;
//! * [`evolve_matrix_exp`] — brute-force `exp(-iHt)` through the dense
//!   eigensolver, valid for any couplings and detunings;
//! * [`evolve_two_mode`] — beam-splitter dynamics of two bosonic modes
//!   sharing `N+1` quanta, which is unitarily equivalent to the engineered
//!   chain and serves as a third cross-check.
//!
//! The first two return lab-frame states (free phases reattached via
//! [`frame_phase`]); the two-mode engine lives purely in the interaction
//! picture.

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::model::{
    build_hamiltonian, frame_phase, ArraySector, Basis, BasisState, QubitLevel, SystemParams,
};

/// Largest chain length for which `(N+1)!` factors are evaluated; beyond
/// this the log-gamma sums lose nothing but the physics is out of scope.
pub const MAX_CAVITIES: usize = 170;

/// Complex amplitudes over the [`Basis`] enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Array1<C64>,
}

impl StateVector {
    pub fn zero(basis: Basis) -> Self {
        Self {
            amplitudes: Array1::zeros(basis.dim()),
        }
    }

    /// Unit vector on a single basis state.
    pub fn basis_state(basis: Basis, state: BasisState) -> Self {
        let mut v = Self::zero(basis);
        v.amplitudes[basis.index(state)] = C64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn basis(&self) -> Basis {
        Basis::for_dim(self.dim()).expect("state vector has a valid basis dimension")
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨self|other⟩` with the left argument conjugated.
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn population(&self, basis: Basis, state: BasisState) -> f64 {
        self.amplitudes[basis.index(state)].norm_sqr()
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `√(binomial(n, k))` through log-factorials; exact to f64 rounding for
/// every `n` this crate admits.
fn sqrt_binomial(n: usize, k: usize) -> f64 {
    (0.5 * (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k))).exp()
}

/// `(-i)^k`
fn minus_i_pow(k: usize) -> C64 {
    match k % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, -1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, 1.0),
    }
}

/// Interaction-picture amplitude for the excitation to sit at chain
/// position `k` (0 = `q1`, `1..=N` = cavities, `N+1` = `q2`) a time `jt`
/// after starting on `q1`:
///
/// ```text
/// c_k = √(binom(N+1, k)) · (cos jt)^{N+1-k} · (-i sin jt)^k
/// ```
pub fn amplitude_ck(n_cavities: usize, k: usize, jt: f64) -> Result<C64> {
    if n_cavities == 0 || n_cavities > MAX_CAVITIES {
        return Err(Error::InvalidParameter(format!(
            "n_cavities must be in 1..={MAX_CAVITIES}"
        )));
    }
    let top = n_cavities + 1;
    if k > top {
        return Err(Error::OutOfRange(format!(
            "chain position {k} outside 0..={top}"
        )));
    }
    let c = jt.cos();
    let s = jt.sin();
    let magnitude = sqrt_binomial(top, k) * c.powi((top - k) as i32) * s.powi(k as i32);
    Ok(minus_i_pow(k) * magnitude)
}

/// Probability that a quantum placed on `q1` has arrived on `q2` after a
/// phase `jt`, i.e. `sin(jt)^{2(N+1)}`. Reaches one at `jt = π/2`.
pub fn transfer_probability(n_cavities: usize, jt: f64) -> f64 {
    jt.sin().powi(2 * (n_cavities as i32 + 1))
}

/// Closed-form lab-frame evolution; valid only for engineered couplings
/// and for initial states supported on `ArrayGround` and `Q1Excited`
/// (the protocol sector before the transfer starts).
pub fn evolve_closed_form(
    params: &SystemParams,
    initial: &StateVector,
    t: f64,
) -> Result<StateVector> {
    if !params.has_engineered_couplings() {
        return Err(Error::NonEngineeredCouplings(
            "the binomial propagator is derived for the perfect-transfer profile only".into(),
        ));
    }
    let basis = Basis::new(params.n_cavities());
    if initial.dim() != basis.dim() {
        return Err(Error::InvalidParameter(format!(
            "state dimension {} does not match basis dimension {}",
            initial.dim(),
            basis.dim()
        )));
    }
    let n = params.n_cavities();
    let block = basis.block_dim();
    let ground = basis.sector_index(ArraySector::Ground);
    let leak: f64 = (0..basis.dim())
        .filter(|i| {
            let s = i % block;
            s != 0 && s != ground
        })
        .map(|i| initial.amplitudes[i].norm_sqr())
        .sum();
    if leak > 1e-12 {
        return Err(Error::UnsupportedState(format!(
            "closed-form evolution starts from q1/ground support only; \
             found population {leak:.3e} elsewhere"
        )));
    }

    let jt = params.j_unit() * t;
    let mut out = StateVector::zero(basis);
    for (q3, offset) in [(QubitLevel::G, 0), (QubitLevel::E, block)] {
        let a_ground = initial.amplitudes[offset + ground];
        if a_ground.norm_sqr() > 0.0 {
            let st = BasisState::new(ArraySector::Ground, q3);
            out.amplitudes[offset + ground] += a_ground * frame_phase(params, t, st);
        }
        let a_q1 = initial.amplitudes[offset];
        if a_q1.norm_sqr() > 0.0 {
            for k in 0..=(n + 1) {
                let ck = amplitude_ck(n, k, jt)?;
                let st = basis.state(offset + k);
                out.amplitudes[offset + k] += a_q1 * ck * frame_phase(params, t, st);
            }
        }
    }
    Ok(out)
}

/// Interaction-picture propagation `ψ(t) = exp(-i H_int t) ψ(0)` through
/// the dense eigensolver, with no lab-frame phases attached. Used by the
/// open-system module, which integrates in the same frame.
pub fn evolve_interaction_picture(
    params: &SystemParams,
    initial: &StateVector,
    t: f64,
) -> StateVector {
    let h = build_hamiltonian(params);
    assert_eq!(
        initial.dim(),
        h.dim(),
        "state dimension must match the Hamiltonian"
    );
    let (w, v) = linalg::eigh(h.matrix());
    let dim = h.dim();
    // coefficients in the eigenbasis
    let mut coeff: Array1<C64> = Array1::zeros(dim);
    for k in 0..dim {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..dim {
            acc += v[[i, k]].conj() * initial.amplitudes[i];
        }
        coeff[k] = acc * C64::new(0.0, -w[k] * t).exp();
    }
    let mut out = StateVector {
        amplitudes: Array1::zeros(dim),
    };
    for i in 0..dim {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..dim {
            acc += v[[i, k]] * coeff[k];
        }
        out.amplitudes[i] = acc;
    }
    out
}

/// Brute-force lab-frame evolution for arbitrary couplings and detunings.
pub fn evolve_matrix_exp(params: &SystemParams, initial: &StateVector, t: f64) -> StateVector {
    let basis = Basis::new(params.n_cavities());
    let mut out = evolve_interaction_picture(params, initial, t);
    for i in 0..basis.dim() {
        out.amplitudes[i] *= frame_phase(params, t, basis.state(i));
    }
    out
}

/// Fock amplitudes of two coupled bosonic modes holding `n_quanta` quanta
/// in total, over the basis `|n_quanta - n, n⟩` for `n = 0..=n_quanta`.
///
/// The engineered chain maps onto this system with chain position `k`
/// corresponding to `|n_quanta - k, k⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    pub amplitudes: Array1<C64>,
}

impl TwoModeState {
    /// State with all quanta in the first mode, `|n_quanta, 0⟩`.
    pub fn all_in_first(n_quanta: usize) -> Self {
        Self::fock(n_quanta, 0)
    }

    /// Basis state `|n_quanta - n, n⟩`.
    pub fn fock(n_quanta: usize, n: usize) -> Self {
        assert!(n <= n_quanta);
        let mut amplitudes = Array1::zeros(n_quanta + 1);
        amplitudes[n] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn n_quanta(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Beam-splitter evolution `exp(-i H̃ t)` with `H̃ = J(ã₁†ã₂ + ã₁ã₂†)`,
/// expanded over binomial double sums for each Fock component.
pub fn evolve_two_mode(initial: &TwoModeState, jt: f64) -> TwoModeState {
    let total = initial.n_quanta();
    let cos = jt.cos();
    let sin = jt.sin();
    let mut out: Array1<C64> = Array1::zeros(total + 1);
    for n in 0..=total {
        let a_in = initial.amplitudes[n];
        if a_in.norm_sqr() == 0.0 {
            continue;
        }
        let ln_norm_in = 0.5 * (ln_factorial(total - n) + ln_factorial(n));
        // (ã₁†cos - iã₂†sin)^{total-n} (ã₂†cos - iã₁†sin)^{n} |0,0⟩
        for k in 0..=(total - n) {
            for l in 0..=n {
                let n_out = n + k - l;
                let ln_norm_out = 0.5 * (ln_factorial(total - n_out) + ln_factorial(n_out));
                let weight =
                    (ln_factorial(total - n) - ln_factorial(k) - ln_factorial(total - n - k)
                        + ln_factorial(n)
                        - ln_factorial(l)
                        - ln_factorial(n - l)
                        + ln_norm_out
                        - ln_norm_in)
                        .exp();
                let trig = cos.powi((total - k - l) as i32) * sin.powi((k + l) as i32);
                out[n_out] += a_in * minus_i_pow(k + l) * weight * trig;
            }
        }
    }
    TwoModeState { amplitudes: out }
}

/// Which closed-system propagator a pipeline should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvolutionEngine {
    ClosedForm,
    MatrixExp,
}

impl EvolutionEngine {
    pub fn evolve(
        &self,
        params: &SystemParams,
        initial: &StateVector,
        t: f64,
    ) -> Result<StateVector> {
        match self {
            Self::ClosedForm => evolve_closed_form(params, initial, t),
            Self::MatrixExp => Ok(evolve_matrix_exp(params, initial, t)),
        }
    }
}
