//! O-information and its quantum counterpart.
//!
//! For `n` parts with joint entropy `S`, single-part entropies `S_i` and
//! leave-one-out entropies `S_{-i}`:
//!
//! ```text
//! Ω = (n - 2) S + Σ_i (S_i - S_{-i})
//! ```
//!
//! Shannon entropies give the classical measure on a [`JointDistribution`];
//! von Neumann entropies give the Q-information of a density matrix. Parts
//! are single qubits throughout.

use serde::Serialize;

use crate::{
    entropy::{partial_trace, shannon_entropy, EntropySource},
    states::PureState,
    Error, Result,
};

const PMF_TOL: f64 = 1e-12;

/// Probability mass function over a product of finite alphabets, stored
/// row-major (the first variable varies slowest).
#[derive(Clone, Debug)]
pub struct JointDistribution {
    cardinalities: Vec<usize>,
    pmf: Vec<f64>,
}

impl JointDistribution {
    pub fn new(cardinalities: Vec<usize>, pmf: Vec<f64>) -> Result<Self> {
        if cardinalities.is_empty() || cardinalities.contains(&0) {
            return Err(Error::domain("cardinalities must be positive"));
        }
        let size: usize = cardinalities.iter().product();
        if pmf.len() != size {
            return Err(Error::domain(format!(
                "pmf has {} entries, product space has {size}",
                pmf.len()
            )));
        }
        if let Some(p) = pmf.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::domain(format!("invalid probability {p}")));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > PMF_TOL {
            return Err(Error::domain(format!("pmf sums to {total}, not 1")));
        }
        Ok(JointDistribution { cardinalities, pmf })
    }

    /// Joint distribution of `n` binary variables.
    pub fn bits(n: usize, pmf: Vec<f64>) -> Result<Self> {
        Self::new(vec![2; n], pmf)
    }

    pub fn n_vars(&self) -> usize {
        self.cardinalities.len()
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Marginal over `vars`, in ascending variable order.
    pub fn marginal(&self, vars: &[usize]) -> Vec<f64> {
        let mut vars = vars.to_vec();
        vars.sort_unstable();
        vars.dedup();
        let size: usize = vars.iter().map(|&v| self.cardinalities[v]).product();
        let mut out = vec![0.0; size];
        let mut digits = vec![0usize; self.n_vars()];
        for &p in &self.pmf {
            let idx = vars
                .iter()
                .fold(0, |acc, &v| acc * self.cardinalities[v] + digits[v]);
            out[idx] += p;
            // odometer increment, last variable fastest
            for v in (0..digits.len()).rev() {
                digits[v] += 1;
                if digits[v] < self.cardinalities[v] {
                    break;
                }
                digits[v] = 0;
            }
        }
        out
    }

    pub fn entropy_of(&self, vars: &[usize]) -> f64 {
        shannon_entropy(&self.marginal(vars))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "part")]
pub enum TermRole {
    /// Entropy of all parts together.
    Joint,
    /// Entropy of one part.
    Single(usize),
    /// Entropy of every part but one.
    Complement(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyTerm {
    pub role: TermRole,
    pub label: String,
    pub bits: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QInfoResult {
    pub omega: f64,
    pub n_parts: usize,
    pub term_breakdown: Vec<EntropyTerm>,
}

impl QInfoResult {
    fn assemble(joint: f64, singles: Vec<(usize, f64)>, complements: Vec<(usize, f64)>) -> Self {
        let n = singles.len();
        let mut terms = Vec::with_capacity(2 * n + 1);
        terms.push(EntropyTerm {
            role: TermRole::Joint,
            label: "S(all)".into(),
            bits: joint,
        });
        terms.extend(singles.into_iter().map(|(i, bits)| EntropyTerm {
            role: TermRole::Single(i),
            label: format!("S({i})"),
            bits,
        }));
        terms.extend(complements.into_iter().map(|(i, bits)| EntropyTerm {
            role: TermRole::Complement(i),
            label: format!("S(-{i})"),
            bits,
        }));
        let mut r = QInfoResult {
            omega: 0.0,
            n_parts: n,
            term_breakdown: terms,
        };
        r.omega = r.recombine();
        r
    }

    /// Recomputes `Ω` from the stored entropy terms.
    pub fn recombine(&self) -> f64 {
        let n = self.n_parts as f64;
        self.term_breakdown
            .iter()
            .map(|t| match t.role {
                TermRole::Joint => (n - 2.0) * t.bits,
                TermRole::Single(_) => t.bits,
                TermRole::Complement(_) => -t.bits,
            })
            .sum()
    }

    pub fn term(&self, role: TermRole) -> Option<f64> {
        self.term_breakdown
            .iter()
            .find(|t| t.role == role)
            .map(|t| t.bits)
    }
}

/// Classical O-information of a joint distribution, in bits.
pub fn classical_o_information(p: &JointDistribution) -> Result<QInfoResult> {
    let n = p.n_vars();
    if n < 2 {
        return Err(Error::domain("O-information needs at least two variables"));
    }
    let all: Vec<usize> = (0..n).collect();
    let joint = p.entropy_of(&all);
    let singles = all.iter().map(|&i| (i, p.entropy_of(&[i]))).collect();
    let complements = all
        .iter()
        .map(|&i| (i, p.entropy_of(&without(&all, i))))
        .collect();
    Ok(QInfoResult::assemble(joint, singles, complements))
}

/// Q-information of `source` with one qubit per part.
///
/// `parts` must list every label of the source exactly once.
pub fn q_information<S: EntropySource + ?Sized>(source: &S, parts: &[usize]) -> Result<QInfoResult> {
    let labels = source.labels();
    if parts.len() < 2 {
        return Err(Error::domain("Q-information needs at least two parts"));
    }
    let mut sorted = parts.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != parts.len() {
        return Err(Error::domain("partition has overlapping parts"));
    }
    let mut expected = labels.clone();
    expected.sort_unstable();
    if sorted != expected {
        return Err(Error::domain(format!(
            "partition {parts:?} does not cover labels {labels:?}"
        )));
    }
    let joint = source.subsystem_entropy(parts)?;
    let mut singles = Vec::with_capacity(parts.len());
    let mut complements = Vec::with_capacity(parts.len());
    for &i in parts {
        singles.push((i, source.subsystem_entropy(&[i])?));
        complements.push((i, source.subsystem_entropy(&without(parts, i))?));
    }
    Ok(QInfoResult::assemble(joint, singles, complements))
}

/// Q-information over all labels of `source`.
pub fn q_information_all<S: EntropySource + ?Sized>(source: &S) -> Result<QInfoResult> {
    q_information(source, &source.labels())
}

/// The mixed state left after tracing one qubit out of a pure state, seen
/// through the entropies of its marginals. Every marginal of the reduced
/// state is a marginal of the pure state, so Schmidt symmetry applies.
struct ReducedPure<'a> {
    psi: &'a PureState,
    traced: usize,
}

impl EntropySource for ReducedPure<'_> {
    fn labels(&self) -> Vec<usize> {
        without(&(0..self.psi.n_qubits()).collect::<Vec<_>>(), self.traced)
    }

    fn subsystem_entropy(&self, subset: &[usize]) -> Result<f64> {
        if subset.contains(&self.traced) {
            return Err(Error::domain(format!("qubit {} was traced out", self.traced)));
        }
        self.psi.subsystem_entropy(subset)
    }
}

/// Q-information of `psi` with qubit `traced` traced out; for four qubits
/// this is `S_BCD - S_BC - S_BD - S_CD + S_B + S_C + S_D`.
pub fn q_information_reduced(psi: &PureState, traced: usize) -> Result<QInfoResult> {
    check_traced(psi, traced)?;
    let reduced = ReducedPure { psi, traced };
    q_information_all(&reduced)
}

/// Same quantity as [`q_information_reduced`], computed by materializing the
/// reduced density matrix and diagonalizing every marginal of it.
pub fn q_information_reduced_dense(psi: &PureState, traced: usize) -> Result<QInfoResult> {
    check_traced(psi, traced)?;
    let keep = without(&(0..psi.n_qubits()).collect::<Vec<_>>(), traced);
    let rho = partial_trace(psi, &keep)?;
    q_information(&rho, &keep)
}

fn check_traced(psi: &PureState, traced: usize) -> Result<()> {
    if psi.n_qubits() < 3 {
        return Err(Error::domain("reduced Q-information needs at least 3 qubits"));
    }
    if traced >= psi.n_qubits() {
        return Err(Error::domain(format!("unknown qubit label {traced}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyBounds {
    pub lower: f64,
    pub upper: f64,
}

impl EntropyBounds {
    pub fn contains(&self, omega: f64, slack: f64) -> bool {
        omega >= self.lower - slack && omega <= self.upper + slack
    }
}

/// `-2 min_X S_{-X} ≤ Ω ≤ 2 min_X S_X` over the four qubits `X`.
pub fn q_information_bounds(psi: &PureState) -> Result<EntropyBounds> {
    require_four(psi)?;
    let all = [0, 1, 2, 3];
    let mut min_single = f64::INFINITY;
    let mut min_complement = f64::INFINITY;
    for x in all {
        min_single = min_single.min(psi.subsystem_entropy(&[x])?);
        min_complement = min_complement.min(psi.subsystem_entropy(&without(&all, x))?);
    }
    Ok(EntropyBounds {
        lower: -2.0 * min_complement,
        upper: 2.0 * min_single,
    })
}

/// `max - min` of the reduced Q-information over the choice of traced qubit.
///
/// Zero up to roundoff for four qubits; for larger registers it is a
/// diagnostic only.
pub fn traced_choice_spread(psi: &PureState) -> Result<f64> {
    let values = (0..psi.n_qubits())
        .map(|t| q_information_reduced(psi, t).map(|r| r.omega))
        .collect::<Result<Vec<_>>>()?;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(max - min)
}

fn require_four(psi: &PureState) -> Result<()> {
    if psi.n_qubits() != 4 {
        return Err(Error::domain(format!(
            "bounds are defined for 4 qubits, got {}",
            psi.n_qubits()
        )));
    }
    Ok(())
}

fn without(labels: &[usize], drop: usize) -> Vec<usize> {
    labels.iter().copied().filter(|&l| l != drop).collect()
}
