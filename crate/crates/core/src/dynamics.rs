//! Pauli-string Hamiltonians of interaction order 1 to 4 on a four-qubit
//! chain and exact unitary evolution through their spectral decomposition.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::{
    entropy::{hermitian_part, MAX_DENSE_QUBITS},
    qinformation::q_information_reduced,
    states::PureState,
    Error, Result, C64,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const AXES: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// `(flips the bit, phase applied to |bit⟩)`.
    fn action(self, bit: bool) -> (bool, C64) {
        match (self, bit) {
            (Pauli::I, _) => (false, C64::new(1.0, 0.0)),
            (Pauli::X, _) => (true, C64::new(1.0, 0.0)),
            // Y|0> = i|1>, Y|1> = -i|0>
            (Pauli::Y, false) => (true, C64::new(0.0, 1.0)),
            (Pauli::Y, true) => (true, C64::new(0.0, -1.0)),
            (Pauli::Z, false) => (false, C64::new(1.0, 0.0)),
            (Pauli::Z, true) => (false, C64::new(-1.0, 0.0)),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// `coefficient · P_0 ⊗ P_1 ⊗ … ⊗ P_{n-1}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PauliString {
    pub letters: Vec<Pauli>,
    pub coefficient: f64,
}

impl PauliString {
    /// `axis` on each of `sites`, identity elsewhere.
    pub fn on_sites(n: usize, sites: &[usize], axis: Pauli, coefficient: f64) -> Self {
        let mut letters = vec![Pauli::I; n];
        for &s in sites {
            letters[s] = axis;
        }
        PauliString {
            letters,
            coefficient,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Image of basis state `x`: `(row index, amplitude)`.
    fn column(&self, x: usize) -> (usize, C64) {
        let n = self.n_qubits();
        let mut y = x;
        let mut amp = C64::new(self.coefficient, 0.0);
        for (q, p) in self.letters.iter().enumerate() {
            let mask = 1 << (n - 1 - q);
            let (flip, phase) = p.action(x & mask != 0);
            if flip {
                y ^= mask;
            }
            amp *= phase;
        }
        (y, amp)
    }

    pub fn to_matrix(&self) -> DMatrix<C64> {
        let d = 1 << self.n_qubits();
        let mut m = DMatrix::zeros(d, d);
        for x in 0..d {
            let (y, a) = self.column(x);
            m[(y, x)] += a;
        }
        m
    }

    fn apply_into(&self, psi: &[C64], out: &mut [C64]) {
        for (x, a) in psi.iter().enumerate() {
            let (y, c) = self.column(x);
            out[y] += c * a;
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+} ", self.coefficient)?;
        self.letters.iter().try_for_each(|p| write!(f, "{p}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Couplings {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
}

impl Default for Couplings {
    fn default() -> Self {
        Couplings {
            jx: 1.0,
            jy: 1.0,
            jz: 1.0,
        }
    }
}

impl Couplings {
    fn along(&self, axis: Pauli) -> f64 {
        match axis {
            Pauli::X => self.jx,
            Pauli::Y => self.jy,
            Pauli::Z => self.jz,
            Pauli::I => 0.0,
        }
    }
}

/// Which interaction clusters the order-2 and order-3 sums run over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Bonds {
    /// Starting sites `0..3`: three bonds `(i, i+1)`, three triples
    /// `(i, i+1, i+2 mod 4)`.
    #[default]
    Printed,
    /// Starting sites `0..4`, every index modulo 4: four bonds, four triples.
    Periodic,
}

#[derive(Clone, Debug, Serialize)]
pub struct Hamiltonian {
    pub n_qubits: usize,
    pub order: usize,
    pub couplings: Couplings,
    pub bonds: Bonds,
    pub terms: Vec<PauliString>,
}

/// The order-`order` chain Hamiltonian on four qubits:
///
/// - 1: `-Σ_i (X_i + Y_i + Z_i)`
/// - 2: `-(1/2) Σ_i Σ_a J_a σ^a_i σ^a_{i+1}`
/// - 3: `-(1/3) Σ_i Σ_a J_a σ^a_i σ^a_{i+1} σ^a_{i+2}`
/// - 4: `-(1/4) Σ_a J_a σ^a_1 σ^a_2 σ^a_3 σ^a_4`
///
/// Site indices wrap modulo 4. Couplings do not enter order 1.
pub fn build_hamiltonian(order: usize, n: usize, couplings: Couplings, bonds: Bonds) -> Result<Hamiltonian> {
    if n != 4 {
        return Err(Error::domain(format!("chain Hamiltonians are defined on 4 qubits, got {n}")));
    }
    if !(1..=4).contains(&order) {
        return Err(Error::domain(format!("interaction order {order} not in 1..=4")));
    }
    let starts = match (order, bonds) {
        (1, _) => n,
        (4, _) => 1,
        (_, Bonds::Printed) => n - 1,
        (_, Bonds::Periodic) => n,
    };
    let prefactor = -1.0 / order as f64;
    let mut terms = Vec::new();
    for i in 0..starts {
        let sites: Vec<usize> = (0..order).map(|k| (i + k) % n).collect();
        for axis in Pauli::AXES {
            let j = if order == 1 { 1.0 } else { couplings.along(axis) };
            terms.push(PauliString::on_sites(n, &sites, axis, prefactor * j));
        }
    }
    Ok(Hamiltonian {
        n_qubits: n,
        order,
        couplings,
        bonds,
        terms,
    })
}

impl Hamiltonian {
    pub fn to_matrix(&self) -> Result<DMatrix<C64>> {
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::Resource(format!(
                "{}-qubit Hamiltonian too large to materialize",
                self.n_qubits
            )));
        }
        let d = 1 << self.n_qubits;
        Ok(self
            .terms
            .iter()
            .fold(DMatrix::zeros(d, d), |acc, t| acc + t.to_matrix()))
    }

    /// `H|ψ⟩` without materializing `H`.
    pub fn apply(&self, psi: &PureState) -> Result<Vec<C64>> {
        self.check(psi)?;
        let mut out = vec![C64::new(0.0, 0.0); psi.dim()];
        for t in &self.terms {
            t.apply_into(psi.amplitudes(), &mut out);
        }
        Ok(out)
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, psi: &PureState) -> Result<f64> {
        let h = self.apply(psi)?;
        Ok(psi
            .amplitudes()
            .iter()
            .zip(&h)
            .map(|(a, b)| (a.conj() * b).re)
            .sum())
    }

    fn check(&self, psi: &PureState) -> Result<()> {
        if psi.n_qubits() != self.n_qubits {
            return Err(Error::domain(format!(
                "state has {} qubits, Hamiltonian acts on {}",
                psi.n_qubits(),
                self.n_qubits
            )));
        }
        Ok(())
    }
}

/// Cached eigendecomposition `H = V diag(E) V†`; evolves states exactly at
/// any time.
#[derive(Clone, Debug)]
pub struct Propagator {
    n_qubits: usize,
    energies: Vec<f64>,
    vectors: DMatrix<C64>,
}

impl Propagator {
    pub fn new(h: &Hamiltonian) -> Result<Self> {
        let m = hermitian_part(&h.to_matrix()?);
        let eig = m.symmetric_eigen();
        Ok(Propagator {
            n_qubits: h.n_qubits,
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `exp(-iHt)|ψ⟩`.
    pub fn evolve(&self, psi: &PureState, t: f64) -> Result<PureState> {
        if psi.n_qubits() != self.n_qubits {
            return Err(Error::domain(format!(
                "state has {} qubits, propagator acts on {}",
                psi.n_qubits(),
                self.n_qubits
            )));
        }
        let v = DVector::from_column_slice(psi.amplitudes());
        let mut c = self.vectors.adjoint() * v;
        for (ci, e) in c.iter_mut().zip(&self.energies) {
            *ci *= C64::from_polar(1.0, -e * t);
        }
        let out = &self.vectors * c;
        let mut st = PureState::normalized(out.iter().copied().collect())?;
        if let Some(l) = psi.label() {
            st = st.with_label(l);
        }
        Ok(st)
    }
}

/// One-shot evolution; decomposes `h` on every call.
pub fn evolve(psi: &PureState, h: &Hamiltonian, t: f64) -> Result<PureState> {
    h.check(psi)?;
    Propagator::new(h)?.evolve(psi, t)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, steps: usize) -> Result<Self> {
        if !(t_start < t_end) || !t_start.is_finite() || !t_end.is_finite() {
            return Err(Error::domain(format!("time grid needs t_start < t_end, got [{t_start}, {t_end}]")));
        }
        if steps < 2 {
            return Err(Error::domain("time grid needs at least 2 points"));
        }
        Ok(TimeGrid { t_start, t_end, steps })
    }

    /// Time of grid point `k`; both endpoints are included.
    pub fn time(&self, k: usize) -> f64 {
        if k + 1 == self.steps {
            return self.t_end;
        }
        self.t_start + (self.t_end - self.t_start) * k as f64 / (self.steps - 1) as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.steps).map(|k| self.time(k))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimePoint {
    pub step: usize,
    pub t: f64,
    pub omega_q: f64,
}

/// Reduced Q-information (qubit 0 traced) of `exp(-iHt)|ψ0⟩` on every grid
/// point. `H` is diagonalized once; points are evaluated in parallel and
/// returned in grid order.
pub fn sweep_q_information(psi0: &PureState, h: &Hamiltonian, grid: &TimeGrid) -> Result<Vec<TimePoint>> {
    h.check(psi0)?;
    let prop = Propagator::new(h)?;
    sweep_with(&prop, psi0, grid)
}

pub fn sweep_with(prop: &Propagator, psi0: &PureState, grid: &TimeGrid) -> Result<Vec<TimePoint>> {
    (0..grid.steps)
        .into_par_iter()
        .map(|step| {
            let t = grid.time(step);
            let psi = prop.evolve(psi0, t)?;
            Ok(TimePoint {
                step,
                t,
                omega_q: q_information_reduced(&psi, 0)?.omega,
            })
        })
        .collect()
}
