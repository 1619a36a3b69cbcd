//! Pure qubit states: constructors, seeded sampling, binary-coefficient
//! enumeration, the reference-state registry and the MMES search.

mod mmes;
mod registry;

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result, C64};

pub use mmes::{balanced_bipartitions, find_mmes, mean_balanced_purity, MmesSearch};
pub use registry::{
    registry_get, table1_reference, Registry, StateRegistryEntry, TableRow, TABLE1,
};

/// Largest register handled by the constructors.
pub const MAX_QUBITS: usize = 14;

const NORM_TOL: f64 = 1e-12;

/// A normalized amplitude vector over `n` qubits, big-endian indexed.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<C64>,
    label: Option<String>,
}

impl PureState {
    /// Wraps an amplitude vector that is already normalized.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amplitudes.len())?;
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!(
                "amplitudes have squared norm {norm_sq}, expected 1"
            )));
        }
        Ok(PureState {
            n_qubits,
            amplitudes,
            label: None,
        })
    }

    /// Normalizes an arbitrary nonzero amplitude vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let n_qubits = qubits_for_len(amplitudes.len())?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::domain("cannot normalize a zero or non-finite vector"));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(PureState {
            n_qubits,
            amplitudes,
            label: None,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::domain("inner product of states of different size"));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Applies a 2x2 matrix `[[u00, u01], [u10, u11]]` to one qubit.
    ///
    /// The result is renormalized, so passing a non-unitary matrix yields the
    /// normalized image rather than an error.
    pub fn apply_single_qubit(&self, qubit: usize, u: [[C64; 2]; 2]) -> Result<PureState> {
        if qubit >= self.n_qubits {
            return Err(Error::domain(format!(
                "qubit {qubit} out of range for {} qubits",
                self.n_qubits
            )));
        }
        let mask = 1usize << (self.n_qubits - 1 - qubit);
        let mut out = self.amplitudes.clone();
        for i in (0..self.dim()).filter(|i| i & mask == 0) {
            let (a0, a1) = (self.amplitudes[i], self.amplitudes[i | mask]);
            out[i] = u[0][0] * a0 + u[0][1] * a1;
            out[i | mask] = u[1][0] * a0 + u[1][1] * a1;
        }
        let mut st = PureState::normalized(out)?;
        st.label = self.label.clone();
        Ok(st)
    }

    /// Relabels qubits: qubit `q` of `self` becomes qubit `perm[q]` of the
    /// result.
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<PureState> {
        let n = self.n_qubits;
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(Error::domain("permutation must be a bijection on the qubits"));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let mut j = 0usize;
            for (q, &p) in perm.iter().enumerate() {
                if i >> (n - 1 - q) & 1 == 1 {
                    j |= 1 << (n - 1 - p);
                }
            }
            out[j] = *a;
        }
        Ok(PureState {
            n_qubits: n,
            amplitudes: out,
            label: self.label.clone(),
        })
    }
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::domain(format!(
            "amplitude vector length {len} is not 2^n with n >= 1"
        )));
    }
    Ok(len.trailing_zeros() as usize)
}

fn check_qubits(n: usize, min: usize, max: usize) -> Result<()> {
    if n < min || n > max {
        return Err(Error::domain(format!(
            "qubit count {n} outside [{min}, {max}]"
        )));
    }
    Ok(())
}

fn zeros(n: usize) -> Vec<C64> {
    vec![C64::new(0.0, 0.0); 1 << n]
}

pub fn make_basis_state(n: usize, index: usize) -> Result<PureState> {
    check_qubits(n, 1, MAX_QUBITS)?;
    if index >= 1 << n {
        return Err(Error::domain(format!(
            "basis index {index} out of range for {n} qubits"
        )));
    }
    let mut amps = zeros(n);
    amps[index] = C64::new(1.0, 0.0);
    Ok(PureState::new(amps)?.with_label(format!("|{index:0n$b}>")))
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn make_ghz(n: usize) -> Result<PureState> {
    check_qubits(n, 2, MAX_QUBITS)?;
    let mut amps = zeros(n);
    amps[0] = C64::new(FRAC_1_SQRT_2, 0.0);
    amps[(1 << n) - 1] = C64::new(FRAC_1_SQRT_2, 0.0);
    Ok(PureState::normalized(amps)?.with_label("GHZ"))
}

/// Four-qubit `(|1111⟩ + e^{iα}|0000⟩)/√2`.
pub fn make_ghz_phase(alpha: f64) -> PureState {
    let alpha = alpha.rem_euclid(TAU);
    let mut amps = zeros(4);
    amps[0] = C64::from_polar(FRAC_1_SQRT_2, alpha);
    amps[15] = C64::new(FRAC_1_SQRT_2, 0.0);
    PureState::normalized(amps)
        .expect("two unit-modulus amplitudes")
        .with_label("GHZ_PHASE")
}

/// Equal superposition of the `n` single-excitation basis states.
pub fn make_w(n: usize) -> Result<PureState> {
    check_qubits(n, 2, MAX_QUBITS)?;
    let mut amps = zeros(n);
    let a = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    for k in 0..n {
        amps[1 << k] = a;
    }
    Ok(PureState::normalized(amps)?.with_label("W"))
}

/// Gaussian amplitudes (real and imaginary parts i.i.d. standard normal),
/// normalized. The same `(n, seed)` always gives identical amplitudes.
pub fn random_gaussian_state(n: usize, seed: u64) -> Result<PureState> {
    check_qubits(n, 1, 10)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(gaussian_state_from(n, &mut rng))
}

pub(crate) fn gaussian_state_from<R: rand::Rng>(n: usize, rng: &mut R) -> PureState {
    let amps: Vec<C64> = (0..1usize << n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        })
        .collect();
    // A Gaussian draw of an exactly zero vector has probability zero.
    PureState::normalized(amps).expect("nonzero gaussian vector")
}

/// Number of nonzero 0/1 coefficient assignments over `n` qubits.
pub fn binary_state_count(n: usize) -> u64 {
    (1u64 << (1u64 << n)) - 1
}

/// The normalized state whose basis coefficient `k` is bit `k` of `mask`.
pub fn binary_state(n: usize, mask: u64) -> Result<PureState> {
    check_qubits(n, 1, 5)?;
    if mask == 0 || mask > binary_state_count(n) {
        return Err(Error::domain(format!(
            "assignment mask {mask} is not a nonzero {}-bit pattern",
            1 << n
        )));
    }
    let amps: Vec<C64> = (0..1usize << n)
        .map(|k| C64::new((mask >> k & 1) as f64, 0.0))
        .collect();
    Ok(PureState::normalized(amps)?.with_label(format!("binary:{mask}")))
}

/// Every nonzero 0/1 assignment of the `2^n` basis coefficients, in
/// increasing mask order.
pub fn enumerate_binary_states(n: usize) -> Result<impl Iterator<Item = PureState>> {
    check_qubits(n, 1, 5)?;
    Ok((1..=binary_state_count(n))
        .map(move |mask| binary_state(n, mask).expect("mask in range")))
}
