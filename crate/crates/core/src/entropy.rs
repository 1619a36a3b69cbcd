//! Density matrices, partial traces and von Neumann entropy.
//!
//! Qubits carry integer labels. Inside a matrix of `m` qubits the label at
//! position `p` occupies bit `m - 1 - p` of the row/column index, matching the
//! big-endian convention of [`PureState`].

use nalgebra::DMatrix;

use crate::{states::PureState, Error, Result, C64};

/// Largest pure state [`density_of`] will materialize.
pub const MAX_DENSE_QUBITS: usize = 12;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[PSD_FLOOR, 0)` are roundoff and clamp to zero.
const PSD_FLOOR: f64 = -1e-8;

#[derive(Clone, Debug)]
pub struct DensityMatrix {
    labels: Vec<usize>,
    matrix: DMatrix<C64>,
}

/// Entropy in bits.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct EntropyBits(pub f64);

impl EntropyBits {
    pub fn bits(self) -> f64 {
        self.0
    }
}

impl DensityMatrix {
    /// Validates shape, label uniqueness, Hermiticity and unit trace.
    pub fn new(labels: Vec<usize>, matrix: DMatrix<C64>) -> Result<Self> {
        check_unique(&labels)?;
        let dim = 1usize
            .checked_shl(labels.len() as u32)
            .ok_or_else(|| Error::Resource("too many labels".into()))?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::domain(format!(
                "matrix is {}x{}, expected {dim}x{dim} for {} qubits",
                matrix.nrows(),
                matrix.ncols(),
                labels.len()
            )));
        }
        let asym = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| (matrix[(i, j)] - matrix[(j, i)].conj()).norm())
            .fold(0.0, f64::max);
        if asym > HERMITIAN_TOL {
            return Err(Error::domain(format!("matrix not Hermitian (deviation {asym:e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::domain(format!("trace {tr} differs from 1")));
        }
        Ok(DensityMatrix { labels, matrix })
    }

    /// A diagonal (classical) state with the given probabilities, labelled
    /// `0..n`.
    pub fn from_diagonal(probs: &[f64]) -> Result<Self> {
        let n = qubits_for_dim(probs.len())?;
        let mut m = DMatrix::zeros(probs.len(), probs.len());
        for (i, &p) in probs.iter().enumerate() {
            m[(i, i)] = C64::new(p, 0.0);
        }
        DensityMatrix::new((0..n).collect(), m)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// `U ρ U†` with the same labels.
    pub fn conjugated(&self, unitary: &DMatrix<C64>) -> Result<DensityMatrix> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::domain("unitary dimension mismatch"));
        }
        let m = unitary * &self.matrix * unitary.adjoint();
        DensityMatrix::new(self.labels.clone(), hermitian_part(&m))
    }

    /// Reduced state on `keep`; kept labels stay in their original order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let split = Split::new(&self.labels, keep)?;
        if split.rest_pos.is_empty() {
            return Ok(self.clone());
        }
        let m = self.labels.len();
        let ko = scatter_offsets(&split.keep_pos, m);
        let ro = scatter_offsets(&split.rest_pos, m);
        let d = ko.len();
        let out = DMatrix::from_fn(d, d, |a, b| {
            ro.iter()
                .map(|&r| self.matrix[(ko[a] | r, ko[b] | r)])
                .sum::<C64>()
        });
        Ok(DensityMatrix {
            labels: split.keep_labels,
            matrix: out,
        })
    }
}

/// Anything that can deliver the entropy of a subset of its qubits.
pub trait EntropySource {
    /// Qubit labels the source is defined over.
    fn labels(&self) -> Vec<usize>;

    /// Von Neumann entropy (bits) of the marginal on `subset`.
    fn subsystem_entropy(&self, subset: &[usize]) -> Result<f64>;
}

impl EntropySource for DensityMatrix {
    fn labels(&self) -> Vec<usize> {
        self.labels.clone()
    }

    fn subsystem_entropy(&self, subset: &[usize]) -> Result<f64> {
        Ok(von_neumann_entropy(&self.partial_trace(subset)?)?.bits())
    }
}

/// Pure states use Schmidt symmetry: a subset and its complement have equal
/// entropy, so only the smaller marginal is ever diagonalized.
impl EntropySource for PureState {
    fn labels(&self) -> Vec<usize> {
        (0..self.n_qubits()).collect()
    }

    fn subsystem_entropy(&self, subset: &[usize]) -> Result<f64> {
        let all = EntropySource::labels(self);
        let split = Split::new(&all, subset)?;
        if split.rest_pos.is_empty() {
            return Ok(0.0);
        }
        let smaller = if split.keep_pos.len() <= split.rest_pos.len() {
            split.keep_labels
        } else {
            split.rest_pos
        };
        let rho = reduced_from_pure(self, &smaller)?;
        Ok(von_neumann_entropy(&rho)?.bits())
    }
}

/// `|ψ⟩⟨ψ|`.
pub fn density_of(state: &PureState) -> Result<DensityMatrix> {
    if state.n_qubits() > MAX_DENSE_QUBITS {
        return Err(Error::Resource(format!(
            "refusing to materialize a {}-qubit density matrix",
            state.n_qubits()
        )));
    }
    let v = nalgebra::DVector::from_column_slice(state.amplitudes());
    Ok(DensityMatrix {
        labels: (0..state.n_qubits()).collect(),
        matrix: &v * v.adjoint(),
    })
}

/// Partial trace of either a density matrix or a pure state.
pub trait PartialTrace {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix>;
}

impl PartialTrace for DensityMatrix {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        DensityMatrix::partial_trace(self, keep)
    }
}

impl PartialTrace for PureState {
    fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        reduced_from_pure(self, keep)
    }
}

pub fn partial_trace<T: PartialTrace + ?Sized>(x: &T, keep: &[usize]) -> Result<DensityMatrix> {
    x.partial_trace(keep)
}

/// Reduced state of a pure state by contracting the amplitude vector over
/// the traced qubits, `O(4^k · 2^(n-k))` for `k` kept qubits.
fn reduced_from_pure(state: &PureState, keep: &[usize]) -> Result<DensityMatrix> {
    let n = state.n_qubits();
    let all: Vec<usize> = (0..n).collect();
    let split = Split::new(&all, keep)?;
    if split.keep_pos.len() > MAX_DENSE_QUBITS {
        return Err(Error::Resource(format!(
            "reduced state on {} qubits is too large",
            split.keep_pos.len()
        )));
    }
    let ko = scatter_offsets(&split.keep_pos, n);
    let ro = scatter_offsets(&split.rest_pos, n);
    let amps = state.amplitudes();
    let m = DMatrix::from_fn(ko.len(), ro.len(), |a, r| amps[ko[a] | ro[r]]);
    Ok(DensityMatrix {
        labels: split.keep_labels,
        matrix: &m * m.adjoint(),
    })
}

/// Eigenvalues of the Hermitian part `(M + M†)/2`, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let sym = hermitian_part(m);
    let mut ev: Vec<f64> = if sym.nrows() == 1 {
        vec![sym[(0, 0)].re]
    } else {
        sym.symmetric_eigenvalues().iter().copied().collect()
    };
    ev.sort_by(f64::total_cmp);
    ev
}

pub(crate) fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()).scale(0.5)
}

/// `-Σ λ log₂ λ` over the spectrum of `rho`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<EntropyBits> {
    spectrum_entropy(&hermitian_eigenvalues(&rho.matrix)).map(EntropyBits)
}

/// Entropy in bits of a spectrum, clamping roundoff negatives to zero.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < PSD_FLOOR {
            return Err(Error::NotAState { eigenvalue: l });
        }
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s.max(0.0))
}

/// Shannon entropy in bits, `0 log 0 = 0`.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
    rho.matrix.iter().map(|z| z.norm_sqr()).sum()
}

struct Split {
    keep_labels: Vec<usize>,
    keep_pos: Vec<usize>,
    rest_pos: Vec<usize>,
}

impl Split {
    /// Positions (within `labels`) of the kept and traced qubits. Kept
    /// labels come back in `labels` order.
    fn new(labels: &[usize], keep: &[usize]) -> Result<Split> {
        if keep.is_empty() {
            return Err(Error::domain("keep set must be nonempty"));
        }
        check_unique(keep)?;
        if let Some(bad) = keep.iter().find(|k| !labels.contains(k)) {
            return Err(Error::domain(format!("unknown qubit label {bad}")));
        }
        let (keep_pos, rest_pos): (Vec<usize>, Vec<usize>) =
            (0..labels.len()).partition(|&p| keep.contains(&labels[p]));
        Ok(Split {
            keep_labels: keep_pos.iter().map(|&p| labels[p]).collect(),
            keep_pos,
            rest_pos,
        })
    }
}

/// For each value `v` of a `positions.len()`-bit register, the index
/// contribution of writing `v`'s bits (most significant first) into the
/// given positions of an `m`-qubit index.
pub(crate) fn scatter_offsets(positions: &[usize], m: usize) -> Vec<usize> {
    let k = positions.len();
    (0..1usize << k)
        .map(|v| {
            positions
                .iter()
                .enumerate()
                .filter(|(j, _)| v >> (k - 1 - j) & 1 == 1)
                .fold(0, |acc, (_, &p)| acc | 1 << (m - 1 - p))
        })
        .collect()
}

fn check_unique(labels: &[usize]) -> Result<()> {
    for (i, a) in labels.iter().enumerate() {
        if labels[..i].contains(a) {
            return Err(Error::domain(format!("duplicate qubit label {a}")));
        }
    }
    Ok(())
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::domain(format!("dimension {dim} is not 2^n")));
    }
    Ok(dim.trailing_zeros() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_basis_state, make_ghz, random_gaussian_state};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn density_of_simple_states() {
        let zero = make_basis_state(1, 0).unwrap();
        let rho = density_of(&zero).unwrap();
        assert_eq!(rho.matrix(), &DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]));

        let plus = PureState::new(vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)]).unwrap();
        let rho = density_of(&plus).unwrap();
        assert!(rho.matrix().iter().all(|z| (z - c(0.5)).norm() < 1e-15));

        let psi = random_gaussian_state(5, 3).unwrap();
        assert!((purity(&density_of(&psi).unwrap()) - 1.0).abs() < 1e-10);
        assert!(density_of(&make_ghz(13).unwrap()).is_err());
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let bell = make_ghz(2).unwrap();
        let r = partial_trace(&bell, &[0]).unwrap();
        let half = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.0), c(0.0), c(0.5)]);
        assert!(max_diff(r.matrix(), &half) < 1e-15);
        assert!((von_neumann_entropy(&r).unwrap().bits() - 1.0).abs() < 1e-12);
        assert!((purity(&r) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn product_state_marginal() {
        // |01>, keep qubit 1 -> |1><1|
        let s = make_basis_state(2, 0b01).unwrap();
        let r = partial_trace(&s, &[1]).unwrap();
        assert_eq!(r.labels(), &[1]);
        assert!((r.matrix()[(1, 1)] - c(1.0)).norm() < 1e-15);
        assert!(r.matrix()[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn ghz4_three_qubit_marginal() {
        // Direct contraction: only |0000> and |1111> contribute, and they
        // differ on the traced qubit, so coherences vanish.
        let g = make_ghz(4).unwrap();
        let r = partial_trace(&g, &[1, 2, 3]).unwrap();
        let mut expect = DMatrix::zeros(8, 8);
        expect[(0, 0)] = c(0.5);
        expect[(7, 7)] = c(0.5);
        assert!(max_diff(r.matrix(), &expect) < 1e-15);
        let one = partial_trace(&g, &[2]).unwrap();
        assert!((purity(&one) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pure_and_dense_traces_agree() {
        let psi = random_gaussian_state(5, 11).unwrap();
        let rho = density_of(&psi).unwrap();
        for keep in [vec![0], vec![4, 1], vec![0, 2, 3], vec![1, 2, 3, 4]] {
            let a = partial_trace(&psi, &keep).unwrap();
            let b = partial_trace(&rho, &keep).unwrap();
            assert_eq!(a.labels(), b.labels());
            assert!(max_diff(a.matrix(), b.matrix()) < 1e-13);
        }
    }

    #[test]
    fn keep_order_does_not_matter() {
        let psi = random_gaussian_state(4, 2).unwrap();
        let a = partial_trace(&psi, &[3, 1]).unwrap();
        let b = partial_trace(&psi, &[1, 3]).unwrap();
        assert_eq!(a.labels(), &[1, 3]);
        assert!(max_diff(a.matrix(), b.matrix()) < 1e-15);
    }

    #[test]
    fn trace_errors() {
        let psi = random_gaussian_state(3, 0).unwrap();
        assert!(partial_trace(&psi, &[3]).is_err());
        assert!(partial_trace(&psi, &[]).is_err());
        assert!(partial_trace(&psi, &[1, 1]).is_err());
        let rho = density_of(&psi).unwrap().partial_trace(&[0, 2]).unwrap();
        assert!(rho.partial_trace(&[1]).is_err());
        assert_eq!(rho.partial_trace(&[2]).unwrap().labels(), &[2]);
    }

    #[test]
    fn entropy_values() {
        let pure = density_of(&random_gaussian_state(3, 5).unwrap()).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap().bits().abs() < 1e-9);
        let skew = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        let s = von_neumann_entropy(&skew).unwrap().bits();
        let binary = -(0.75f64 * 0.75f64.log2()) - 0.25 * 0.25f64.log2();
        assert!((s - binary).abs() < 1e-12);
        assert!((s - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn negative_eigenvalue_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.1), c(0.0), c(0.0), c(-0.1)]);
        let rho = DensityMatrix::new(vec![0], m).unwrap();
        match von_neumann_entropy(&rho) {
            Err(Error::NotAState { eigenvalue }) => assert!((eigenvalue + 0.1).abs() < 1e-12),
            other => panic!("expected NotAState, got {other:?}"),
        }
        // roundoff-size negatives are clamped
        assert_eq!(spectrum_entropy(&[1.0, -1e-11]).unwrap(), 0.0);
    }

    #[test]
    fn constructor_validation() {
        let bad_trace = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.0), c(0.0), c(0.4)]);
        assert!(DensityMatrix::new(vec![0], bad_trace).is_err());
        let non_herm = DMatrix::from_row_slice(
            2,
            2,
            &[c(0.5), C64::new(0.1, 0.1), C64::new(0.1, 0.1), c(0.5)],
        );
        assert!(DensityMatrix::new(vec![0], non_herm).is_err());
        assert!(DensityMatrix::new(vec![0, 0], DMatrix::identity(4, 4).scale(0.25)).is_err());
        assert!(DensityMatrix::new(vec![0], DMatrix::identity(4, 4).scale(0.25)).is_err());
    }

    #[test]
    fn schmidt_route_matches_dense_route() {
        let psi = random_gaussian_state(6, 9).unwrap();
        let rho = density_of(&psi).unwrap();
        for subset in [vec![0], vec![1, 4], vec![0, 2, 5], vec![1, 2, 3, 4, 5]] {
            let a = psi.subsystem_entropy(&subset).unwrap();
            let b = rho.subsystem_entropy(&subset).unwrap();
            assert!((a - b).abs() < 1e-10, "{subset:?}: {a} vs {b}");
        }
        assert_eq!(psi.subsystem_entropy(&[0, 1, 2, 3, 4, 5]).unwrap(), 0.0);
    }
}
