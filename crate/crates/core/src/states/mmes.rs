//! Search for maximally multipartite entangled states: pure states that
//! minimize the average purity of their reduced states over all balanced
//! bipartitions.
//!
//! Each restart draws a Gaussian state from a seed derived from
//! `(seed, restart)` and runs projected gradient descent on the unit sphere
//! with Armijo backtracking. A converged restart is accepted when its reduced
//! Q-information matches the reference value for that register size; the
//! four-qubit minimizers are degenerate in Q-information, so several restarts
//! may be needed.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{
    entropy::scatter_offsets, experiments::derive_seed, qinformation::q_information_reduced,
    Error, Result, C64,
};

use super::{gaussian_state_from, registry::table1_reference, PureState};

/// Subsets of size `n / 2`; for even `n` only the half containing qubit 0,
/// so each bipartition appears once.
pub fn balanced_bipartitions(n: usize) -> Vec<Vec<usize>> {
    let k = n / 2;
    let mut out = Vec::new();
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize != k {
            continue;
        }
        // qubit q <-> bit (n - 1 - q)
        let subset: Vec<usize> = (0..n).filter(|q| mask >> (n - 1 - q) & 1 == 1).collect();
        if n % 2 == 1 || subset.first() == Some(&0) {
            out.push(subset);
        }
    }
    out
}

/// Mean of `Tr ρ_A²` over the balanced bipartitions `A`.
pub fn mean_balanced_purity(psi: &PureState) -> f64 {
    PurityObjective::new(psi.n_qubits()).value(psi.amplitudes())
}

struct Cut {
    keep: Vec<usize>,
    rest: Vec<usize>,
}

struct PurityObjective {
    cuts: Vec<Cut>,
}

impl PurityObjective {
    fn new(n: usize) -> Self {
        let cuts = balanced_bipartitions(n)
            .into_iter()
            .map(|a| {
                let b: Vec<usize> = (0..n).filter(|q| !a.contains(q)).collect();
                Cut {
                    keep: scatter_offsets(&a, n),
                    rest: scatter_offsets(&b, n),
                }
            })
            .collect();
        PurityObjective { cuts }
    }

    fn reshape(cut: &Cut, amps: &[C64]) -> DMatrix<C64> {
        DMatrix::from_fn(cut.keep.len(), cut.rest.len(), |a, r| {
            amps[cut.keep[a] | cut.rest[r]]
        })
    }

    fn value(&self, amps: &[C64]) -> f64 {
        let total: f64 = self
            .cuts
            .iter()
            .map(|cut| {
                let m = Self::reshape(cut, amps);
                (&m * m.adjoint()).iter().map(|z| z.norm_sqr()).sum::<f64>()
            })
            .sum();
        total / self.cuts.len() as f64
    }

    /// Objective and its gradient with respect to the real and imaginary
    /// parts, packed as a complex vector: `4 ρ_A M_A` per cut.
    fn value_and_gradient(&self, amps: &[C64]) -> (f64, Vec<C64>) {
        let scale = 1.0 / self.cuts.len() as f64;
        let mut grad = vec![C64::new(0.0, 0.0); amps.len()];
        let mut value = 0.0;
        for cut in &self.cuts {
            let m = Self::reshape(cut, amps);
            let rho = &m * m.adjoint();
            value += rho.iter().map(|z| z.norm_sqr()).sum::<f64>();
            let g = &rho * &m;
            for a in 0..cut.keep.len() {
                for r in 0..cut.rest.len() {
                    grad[cut.keep[a] | cut.rest[r]] += g[(a, r)] * (4.0 * scale);
                }
            }
        }
        (value * scale, grad)
    }
}

fn normalize(v: &mut [C64]) {
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
}

#[derive(Clone, Debug)]
pub struct MmesOutcome {
    pub state: PureState,
    pub purity: f64,
    pub omega: f64,
    pub restarts: usize,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct MmesSearch {
    pub n: usize,
    pub seed: u64,
    /// Budget of objective evaluations summed over all restarts.
    pub max_iters: usize,
    pub grad_tol: f64,
    pub omega_tol: f64,
}

impl MmesSearch {
    pub fn new(n: usize, seed: u64) -> Self {
        MmesSearch {
            n,
            seed,
            max_iters: 200_000,
            grad_tol: 1e-8,
            omega_tol: 1e-2,
        }
    }

    pub fn max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn run(&self) -> Result<MmesOutcome> {
        if !(4..=6).contains(&self.n) {
            return Err(Error::domain(format!(
                "MMES search supports 4 to 6 qubits, got {}",
                self.n
            )));
        }
        let target = table1_reference("MMES", self.n).expect("reference for n in 4..=6");
        let objective = PurityObjective::new(self.n);
        let mut used = 0usize;
        let mut best: Option<(f64, f64)> = None; // (omega, purity)

        for restart in 0.. {
            if used >= self.max_iters {
                break;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, "mmes", restart));
            let mut psi = gaussian_state_from(self.n, &mut rng).amplitudes().to_vec();
            let (purity, converged) = self.descend(&objective, &mut psi, &mut used);
            let state = PureState::normalized(psi)?.with_label("MMES");
            let omega = q_information_reduced(&state, 0)?.omega;
            if best.is_none_or(|(o, _)| (omega - target).abs() < (o - target).abs()) {
                best = Some((omega, purity));
            }
            if converged && (omega - target).abs() <= self.omega_tol {
                return Ok(MmesOutcome {
                    state,
                    purity,
                    omega,
                    restarts: restart as usize + 1,
                    iterations: used,
                });
            }
        }
        let (best_omega, best_purity) = best.unwrap_or((f64::NAN, f64::NAN));
        Err(Error::Convergence {
            best_omega,
            best_purity,
        })
    }

    /// Projected gradient descent; returns the final objective and whether
    /// the tangent gradient fell below tolerance within the budget.
    fn descend(&self, objective: &PurityObjective, psi: &mut Vec<C64>, used: &mut usize) -> (f64, bool) {
        let mut step = 1.0;
        let (mut f, mut g) = objective.value_and_gradient(psi);
        *used += 1;
        loop {
            // tangent projection: g - Re<psi, g> psi
            let radial: f64 = psi.iter().zip(&g).map(|(p, q)| (p.conj() * q).re).sum();
            let tangent: Vec<C64> = g.iter().zip(psi.iter()).map(|(q, p)| q - p * radial).collect();
            let gnorm_sq: f64 = tangent.iter().map(|z| z.norm_sqr()).sum();
            if gnorm_sq.sqrt() < self.grad_tol {
                return (f, true);
            }
            let mut accepted = false;
            while *used < self.max_iters {
                let mut trial: Vec<C64> = psi.iter().zip(&tangent).map(|(p, t)| p - t * step).collect();
                normalize(&mut trial);
                let (ft, gt) = objective.value_and_gradient(&trial);
                *used += 1;
                if ft <= f - 1e-4 * step * gnorm_sq {
                    *psi = trial;
                    f = ft;
                    g = gt;
                    step *= 1.5;
                    accepted = true;
                    break;
                }
                step *= 0.5;
                if step < 1e-14 {
                    // no descent possible at machine precision
                    return (f, true);
                }
            }
            if !accepted {
                return (f, false);
            }
        }
    }
}

pub fn find_mmes(n: usize, seed: u64, max_iters: usize) -> Result<PureState> {
    MmesSearch::new(n, seed).max_iters(max_iters).run().map(|o| o.state)
}
