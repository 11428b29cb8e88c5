//! Regular graphs, sticky chains and their spectral expansion.
//!
//! Every matrix here is a column-stochastic random walk matrix: column `i`
//! holds the distribution of the next state when the walk sits at `i`.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type Matrix = DMatrix<f64>;

/// Tolerance for stochasticity, stationarity and weight normalization.
pub const CONSTRUCTION_TOL: f64 = 1e-12;
/// Absolute tolerance promised by [`spectral_expansion`].
pub const SPECTRAL_TOL: f64 = 1e-10;
/// Above this size the expansion is computed by power iteration instead of SVD.
pub const FULL_SVD_MAX_N: usize = 512;

const POWER_ITER_TOL: f64 = 1e-12;
const POWER_ITER_MAX: usize = 100_000;
const PAIRING_RETRIES: usize = 100;

/// A column-stochastic chain with stationary state weights and a `{0,1}` labeling.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledChain {
    matrix: Matrix,
    weights: Vec<f64>,
    labels: Vec<u8>,
}

impl LabeledChain {
    /// Validates and wraps a chain.  `weights` must be a probability vector
    /// that `matrix` leaves invariant.
    pub fn new(matrix: Matrix, weights: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 || matrix.ncols() != n {
            return invalid(format!(
                "transition matrix must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        if weights.len() != n || labels.len() != n {
            return invalid(format!(
                "expected {n} weights and labels, got {} and {}",
                weights.len(),
                labels.len()
            ));
        }
        check_column_stochastic(&matrix)?;
        check_weights(&weights)?;
        if let Some(&bad) = labels.iter().find(|&&l| l > 1) {
            return invalid(format!("labels must be 0 or 1, found {bad}"));
        }
        check_stationary(&matrix, &weights)?;
        Ok(Self {
            matrix,
            weights,
            labels,
        })
    }

    /// A regular-graph chain: uniform weights, and the matrix must be doubly stochastic.
    pub fn regular(matrix: Matrix, labels: Vec<u8>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 {
            return invalid("empty transition matrix");
        }
        check_row_sums(&matrix)?;
        Self::new(matrix, vec![1.0 / n as f64; n], labels)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// `(p0, p1)`: total weight carried by each label.
    pub fn label_weights(&self) -> (f64, f64) {
        label_weights(&self.weights, &self.labels)
    }

    /// True when the weights are uniform and every row also sums to one.
    pub fn is_regular(&self) -> bool {
        let n = self.n() as f64;
        self.weights
            .iter()
            .all(|w| (w - 1.0 / n).abs() <= CONSTRUCTION_TOL)
            && check_row_sums(&self.matrix).is_ok()
    }

    /// The step that forgets the current state and redraws from the weights;
    /// for uniform weights this is the complete graph.
    pub fn independent_step(&self) -> Matrix {
        independent_step(&self.weights)
    }

    /// Same chain with a different labeling.
    pub fn with_labels(&self, labels: Vec<u8>) -> Result<Self> {
        Self::new(self.matrix.clone(), self.weights.clone(), labels)
    }

    pub fn to_graph_file(&self) -> GraphFile {
        GraphFile {
            n: self.n(),
            matrix: (0..self.n())
                .map(|i| self.matrix.column(i).iter().copied().collect())
                .collect(),
            weights: self.weights.clone(),
            labels: self.labels.clone(),
        }
    }

    pub fn from_graph_file(file: &GraphFile) -> Result<Self> {
        let n = file.n;
        if file.matrix.len() != n || file.matrix.iter().any(|c| c.len() != n) {
            return invalid(format!("graph file matrix must be {n} columns of length {n}"));
        }
        let matrix = Matrix::from_fn(n, n, |j, i| file.matrix[i][j]);
        Self::new(matrix, file.weights.clone(), file.labels.clone())
    }
}

/// On-disk graph description.  `matrix[i]` is column `i`, i.e. the
/// distribution of the next state when leaving state `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub matrix: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub labels: Vec<u8>,
}

pub(crate) fn label_weights(weights: &[f64], labels: &[u8]) -> (f64, f64) {
    let p1: f64 = weights
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 1)
        .map(|(w, _)| w)
        .sum();
    let p0: f64 = weights
        .iter()
        .zip(labels)
        .filter(|(_, &l)| l == 0)
        .map(|(w, _)| w)
        .sum();
    (p0, p1)
}

pub(crate) fn independent_step(weights: &[f64]) -> Matrix {
    let n = weights.len();
    Matrix::from_fn(n, n, |j, _| weights[j])
}

pub(crate) fn check_column_stochastic(m: &Matrix) -> Result<()> {
    for (i, col) in m.column_iter().enumerate() {
        if let Some(x) = col.iter().find(|x| !x.is_finite() || **x < 0.0 || **x > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "entry {x} in column {i} is not a probability"
            )));
        }
        let s: f64 = col.iter().sum();
        if (s - 1.0).abs() > CONSTRUCTION_TOL {
            return invalid(format!("column {i} sums to {s}, not 1"));
        }
    }
    Ok(())
}

fn check_row_sums(m: &Matrix) -> Result<()> {
    for (j, row) in m.row_iter().enumerate() {
        let s: f64 = row.iter().sum();
        if (s - 1.0).abs() > CONSTRUCTION_TOL {
            return invalid(format!("row {j} sums to {s}; matrix is not doubly stochastic"));
        }
    }
    Ok(())
}

pub(crate) fn check_weights(weights: &[f64]) -> Result<()> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return invalid("weights must be finite and nonnegative");
    }
    let s: f64 = weights.iter().sum();
    if (s - 1.0).abs() > CONSTRUCTION_TOL {
        return invalid(format!("weights sum to {s}, not 1"));
    }
    Ok(())
}

pub(crate) fn check_stationary(m: &Matrix, weights: &[f64]) -> Result<()> {
    let w = DVector::from_column_slice(weights);
    let image = m * &w;
    let gap = (image - w).amax();
    if gap > CONSTRUCTION_TOL {
        return invalid(format!("weights are not stationary (max deviation {gap})"));
    }
    Ok(())
}

/// The walk matrix of the `n`-vertex complete graph with self-loops.
pub fn complete_graph(n: usize) -> Result<Matrix> {
    if n == 0 {
        return invalid("complete graph needs at least one vertex");
    }
    Ok(Matrix::from_element(n, n, 1.0 / n as f64))
}

fn check_label_split(p: (f64, f64)) -> Result<()> {
    let (p0, p1) = p;
    if !(p0 > 0.0 && p1 > 0.0) || (p0 + p1 - 1.0).abs() > CONSTRUCTION_TOL {
        return invalid(format!("label weights ({p0}, {p1}) must be positive and sum to 1"));
    }
    Ok(())
}

/// Smallest admissible stickiness for label weights `p`.
pub fn sticky_lambda_min(p: (f64, f64)) -> f64 {
    -(p.0 / p.1).min(p.1 / p.0)
}

fn check_sticky_lambda(lambda: f64, p: (f64, f64)) -> Result<()> {
    let lo = sticky_lambda_min(p);
    if !lambda.is_finite() || lambda > 1.0 || lambda < lo - 1e-15 {
        return Err(Error::NegativeProbability(format!(
            "lambda = {lambda} is outside [{lo}, 1] for p = ({}, {})",
            p.0, p.1
        )));
    }
    Ok(())
}

fn sticky_step(lambda: f64, p: (f64, f64), from: usize, to: usize) -> f64 {
    let target = if to == 0 { p.0 } else { p.1 };
    let stay = if from == to { lambda } else { 0.0 };
    ((1.0 - lambda) * target + stay).max(0.0)
}

/// The two-state sticky chain: from label `b` move to `b'` with probability
/// `(1 - lambda) p_{b'} + lambda [b = b']`.
pub fn sticky_chain(lambda: f64, p: (f64, f64)) -> Result<LabeledChain> {
    check_label_split(p)?;
    check_sticky_lambda(lambda, p)?;
    let m = Matrix::from_fn(2, 2, |to, from| sticky_step(lambda, p, from, to));
    LabeledChain::new(m, vec![p.0, p.1], vec![0, 1])
}

/// The sticky walk on `n` vertices: the first `n p0` vertices carry label 0,
/// and all vertices inside a label class are interchangeable.
pub fn sticky_expanded(lambda: f64, p: (f64, f64), n: usize) -> Result<LabeledChain> {
    check_label_split(p)?;
    check_sticky_lambda(lambda, p)?;
    let n0 = p.0 * n as f64;
    let n0_int = n0.round();
    if n == 0 || (n0 - n0_int).abs() > 1e-9 || n0_int < 1.0 || n0_int > (n - 1) as f64 {
        return invalid(format!(
            "class sizes n*p = ({n0}, {}) must be positive integers",
            n as f64 - n0
        ));
    }
    let n0 = n0_int as usize;
    let class_size = [n0 as f64, (n - n0) as f64];
    let class = |v: usize| usize::from(v >= n0);
    let m = Matrix::from_fn(n, n, |to, from| {
        let (a, b) = (class(from), class(to));
        sticky_step(lambda, p, a, b) / class_size[b]
    });
    let labels = (0..n).map(|v| class(v) as u8).collect();
    LabeledChain::regular(m, labels)
}

/// `(1 - mu) J + mu P` where `P` sends vertex `i` to `perm[i]`.
pub fn mix_with_permutation(mu: f64, perm: &[usize]) -> Result<Matrix> {
    if !(0.0..=1.0).contains(&mu) {
        return invalid(format!("mixing weight {mu} is outside [0, 1]"));
    }
    let n = perm.len();
    if n == 0 {
        return invalid("empty permutation");
    }
    let mut seen = vec![false; n];
    for &k in perm {
        if k >= n || std::mem::replace(&mut seen[k], true) {
            return invalid("perm is not a bijection of 0..n");
        }
    }
    let mut m = Matrix::from_element(n, n, (1.0 - mu) / n as f64);
    for (i, &k) in perm.iter().enumerate() {
        m[(k, i)] += mu;
    }
    Ok(m)
}

/// The cycle `i -> i + 1 mod n`.
pub fn cycle_shift(n: usize) -> Vec<usize> {
    (0..n).map(|i| (i + 1) % n).collect()
}

/// A uniformly random permutation of `0..n`, deterministic in `seed`.
pub fn random_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    perm
}

/// Vertex `v` gets label `v mod 2`.
pub fn alternating_labels(n: usize) -> Vec<u8> {
    (0..n).map(|v| (v % 2) as u8).collect()
}

/// Output of the configuration-model generator.
#[derive(Clone, Debug)]
pub struct RandomRegular {
    pub matrix: Matrix,
    /// False when every retry produced a loop or a repeated edge and the last
    /// multigraph pairing was kept.
    pub simple: bool,
    pub attempts: usize,
}

/// Random `d`-regular (multi)graph on `n` vertices via the configuration model,
/// returned as the walk matrix `A / d`.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<RandomRegular> {
    if d < 3 {
        return invalid(format!("degree must be at least 3, got {d}"));
    }
    if n == 0 || !(n * d).is_multiple_of(2) {
        return invalid(format!("n * d = {} must be even and positive", n * d));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut attempts = 0;
    let simple = loop {
        attempts += 1;
        stubs.shuffle(&mut rng);
        let simple = pairing_is_simple(&stubs);
        if simple || attempts >= PAIRING_RETRIES {
            break simple;
        }
    };
    if !simple {
        log::warn!("random_regular({n}, {d}, {seed}): keeping a multigraph after {attempts} pairings");
    }
    let mut adj = Matrix::zeros(n, n);
    for pair in stubs.chunks_exact(2) {
        let (a, b) = (pair[0], pair[1]);
        adj[(a, b)] += 1.0;
        adj[(b, a)] += 1.0;
    }
    Ok(RandomRegular {
        matrix: adj / d as f64,
        simple,
        attempts,
    })
}

fn pairing_is_simple(stubs: &[usize]) -> bool {
    let mut edges = HashSet::with_capacity(stubs.len() / 2);
    stubs.chunks_exact(2).all(|pair| {
        let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
        a != b && edges.insert((a, b))
    })
}

/// Largest singular value of an arbitrary matrix (the spectral norm).
pub fn operator_norm(m: &Matrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    if m.nrows().max(m.ncols()) <= FULL_SVD_MAX_N {
        m.clone().singular_values().max()
    } else {
        power_iteration_norm(m)
    }
}

fn power_iteration_norm(m: &Matrix) -> f64 {
    let gram = m.transpose() * m;
    let n = gram.nrows();
    // Deterministic start with no special alignment.
    let mut x = DVector::from_fn(n, |i, _| 1.0 + ((i * 7919) % 104_729) as f64 / 104_729.0);
    x /= x.norm();
    let mut estimate = 0.0;
    for _ in 0..POWER_ITER_MAX {
        let y = &gram * &x;
        let next = y.norm();
        if next == 0.0 {
            return 0.0;
        }
        x = y / next;
        if (next - estimate).abs() <= POWER_ITER_TOL * next.max(1.0) {
            estimate = next;
            break;
        }
        estimate = next;
    }
    estimate.sqrt()
}

/// `||W - J||` for a doubly stochastic walk matrix.
pub fn matrix_expansion(m: &Matrix) -> Result<f64> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return invalid("expansion needs a square nonempty matrix");
    }
    check_column_stochastic(m)?;
    check_row_sums(m)?;
    Ok(operator_norm(&(m - complete_graph(n)?)))
}

/// Expansion of a single walk step with respect to the state weights.
///
/// Uniform weights require a doubly stochastic matrix and use `||W - J||`.
/// A two-state step with stationary weights uses its second eigenvalue
/// `|w00 + w11 - 1|`, which is `|lambda|` for a sticky chain.
pub fn step_expansion(m: &Matrix, weights: &[f64]) -> Result<f64> {
    let n = weights.len();
    let uniform = weights
        .iter()
        .all(|w| (w - 1.0 / n as f64).abs() <= CONSTRUCTION_TOL);
    if uniform {
        return matrix_expansion(m);
    }
    if n == 2 {
        check_column_stochastic(m)?;
        check_stationary(m, weights)?;
        return Ok((m[(0, 0)] + m[(1, 1)] - 1.0).abs());
    }
    invalid("spectral expansion needs a doubly stochastic matrix or a two-state chain")
}

/// `lambda(G) = ||G restricted to the complement of the all-ones vector||`.
pub fn spectral_expansion(chain: &LabeledChain) -> Result<f64> {
    step_expansion(chain.matrix(), chain.weights())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn assert_matrix_eq(a: &Matrix, b: &Matrix, tol: f64) {
        assert_eq!(a.shape(), b.shape());
        for (x, y) in a.iter().zip(b.iter()) {
            assert_abs_diff_eq!(x, y, epsilon = tol);
        }
    }

    #[test]
    fn complete_graph_entries() {
        assert_eq!(complete_graph(2).unwrap(), Matrix::from_element(2, 2, 0.5));
        assert_eq!(complete_graph(1).unwrap(), Matrix::from_element(1, 1, 1.0));
        assert!(matches!(complete_graph(0), Err(Error::InvalidArgument(_))));
        for n in [1, 3, 8, 17] {
            assert_abs_diff_eq!(matrix_expansion(&complete_graph(n).unwrap()).unwrap(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sticky_chain_tables() {
        let j = sticky_chain(0.0, (0.5, 0.5)).unwrap();
        assert_matrix_eq(j.matrix(), &Matrix::from_element(2, 2, 0.5), 1e-15);
        let g = sticky_chain(0.5, (0.5, 0.5)).unwrap();
        let expected = Matrix::from_row_slice(2, 2, &[0.75, 0.25, 0.25, 0.75]);
        assert_matrix_eq(g.matrix(), &expected, 1e-15);
        assert!(matches!(
            sticky_chain(-1.5, (0.25, 0.75)),
            Err(Error::NegativeProbability(_))
        ));
        assert!(matches!(sticky_chain(1.01, (0.5, 0.5)), Err(Error::NegativeProbability(_))));
        // Boundary of the jumpy range is admissible.
        let edge = sticky_chain(-1.0 / 3.0, (0.25, 0.75)).unwrap();
        assert!(edge.matrix().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn sticky_expanded_collapses() {
        let g = sticky_expanded(0.5, (0.5, 0.5), 4).unwrap();
        let collapsed = sticky_chain(0.5, (0.5, 0.5)).unwrap();
        for from in 0..4 {
            for to_class in 0..2 {
                let block_sum: f64 = (0..4)
                    .filter(|&v| g.labels()[v] as usize == to_class)
                    .map(|v| g.matrix()[(v, from)])
                    .sum();
                let from_class = g.labels()[from] as usize;
                assert_abs_diff_eq!(block_sum, collapsed.matrix()[(to_class, from_class)], epsilon = 1e-15);
            }
        }
        for lambda in [-0.7, 0.0, 0.3, 1.0] {
            let two = sticky_expanded(lambda, (0.5, 0.5), 2).unwrap();
            let chain = sticky_chain(lambda, (0.5, 0.5)).unwrap();
            assert_matrix_eq(two.matrix(), chain.matrix(), 1e-15);
        }
        assert!(matches!(
            sticky_expanded(0.2, (1.0 / 3.0, 2.0 / 3.0), 4),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn expansion_of_sticky_graphs() {
        let g = sticky_expanded(0.3, (0.5, 0.5), 4).unwrap();
        assert_abs_diff_eq!(spectral_expansion(&g).unwrap(), 0.3, epsilon = 1e-10);
        let g = sticky_expanded(-0.2, (0.5, 0.5), 4).unwrap();
        assert_abs_diff_eq!(spectral_expansion(&g).unwrap(), 0.2, epsilon = 1e-10);
        let g = sticky_expanded(0.3, (0.25, 0.75), 8).unwrap();
        assert_abs_diff_eq!(spectral_expansion(&g).unwrap(), 0.3, epsilon = 1e-10);
        let two = sticky_chain(-0.25, (0.25, 0.75)).unwrap();
        assert_abs_diff_eq!(spectral_expansion(&two).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn permutation_mix() {
        let shift = cycle_shift(16);
        assert_matrix_eq(
            &mix_with_permutation(0.0, &shift).unwrap(),
            &complete_graph(16).unwrap(),
            1e-15,
        );
        let id: Vec<usize> = (0..5).collect();
        let m = mix_with_permutation(1.0, &id).unwrap();
        assert_matrix_eq(&m, &Matrix::identity(5, 5), 0.0);
        assert_abs_diff_eq!(matrix_expansion(&m).unwrap(), 1.0, epsilon = 1e-10);
        let m = mix_with_permutation(0.01, &shift).unwrap();
        assert_abs_diff_eq!(matrix_expansion(&m).unwrap(), 0.01, epsilon = 1e-10);
        assert!(mix_with_permutation(1.5, &shift).is_err());
        assert!(mix_with_permutation(0.5, &[0, 0, 1]).is_err());
    }

    #[test]
    fn random_regular_is_deterministic_and_doubly_stochastic() {
        let a = random_regular(4, 3, 7).unwrap();
        for col in a.matrix.column_iter() {
            assert_abs_diff_eq!(col.sum(), 1.0, epsilon = 1e-12);
        }
        assert_eq!(a.matrix, a.matrix.transpose());
        let b = random_regular(4, 3, 7).unwrap();
        assert_eq!(a.matrix, b.matrix);
        let big = random_regular(50, 20, 1).unwrap();
        let chain = LabeledChain::regular(big.matrix, alternating_labels(50)).unwrap();
        assert!(spectral_expansion(&chain).unwrap() < 1.0);
        assert!(matches!(random_regular(5, 3, 1), Err(Error::InvalidArgument(_))));
        assert!(random_regular(6, 2, 1).is_err());
    }

    #[test]
    fn power_iteration_agrees_with_svd() {
        let m = mix_with_permutation(0.37, &random_permutation(40, 5)).unwrap();
        let d = &m - complete_graph(40).unwrap();
        let svd = d.clone().singular_values().max();
        assert_abs_diff_eq!(power_iteration_norm(&d), svd, epsilon = 1e-8);
    }

    #[test]
    fn rejects_bad_chains() {
        let m = Matrix::from_row_slice(2, 2, &[0.9, 0.5, 0.2, 0.5]);
        assert!(LabeledChain::new(m, vec![0.5, 0.5], vec![0, 1]).is_err());
        let m = complete_graph(2).unwrap();
        assert!(LabeledChain::new(m.clone(), vec![0.5, 0.5], vec![0, 2]).is_err());
        assert!(LabeledChain::new(m.clone(), vec![0.6, 0.5], vec![0, 1]).is_err());
        // J is stationary only for its own uniform weights when viewed as a regular graph.
        let sticky = sticky_chain(0.4, (0.25, 0.75)).unwrap();
        assert!(LabeledChain::new(sticky.matrix().clone(), vec![0.5, 0.5], vec![0, 1]).is_err());
        assert!(step_expansion(sticky.matrix(), &[0.25, 0.75]).is_ok());
        let three = Matrix::from_row_slice(3, 3, &[0.5, 0.0, 0.5, 0.5, 0.5, 0.0, 0.0, 0.5, 0.5]);
        assert!(step_expansion(&three, &[0.2, 0.3, 0.5]).is_err());
    }

    #[test]
    fn graph_file_is_column_major() {
        let chain = sticky_chain(0.2, (0.25, 0.75)).unwrap();
        let file = chain.to_graph_file();
        assert_abs_diff_eq!(file.matrix[0][1], chain.matrix()[(1, 0)]);
        assert_eq!(LabeledChain::from_graph_file(&file).unwrap(), chain);
    }

    proptest! {
        #[test]
        fn sticky_chain_is_affine_in_lambda(q in 0.02f64..0.98, frac in 0.0f64..1.0) {
            let p = (1.0 - q, q);
            let lo = sticky_lambda_min(p);
            let lambda = lo + frac * (1.0 - lo);
            let g = sticky_chain(lambda, p).unwrap();
            for i in 0..2 {
                let col = g.matrix().column(i);
                prop_assert!(col.iter().all(|&x| x >= 0.0));
                prop_assert!((col.sum() - 1.0).abs() <= 1e-15);
                for j in 0..2 {
                    let jp = if j == 0 { p.0 } else { p.1 };
                    let id = if i == j { 1.0 } else { 0.0 };
                    let decomposed = (1.0 - lambda) * jp + lambda * id;
                    prop_assert!((g.matrix()[(j, i)] - decomposed).abs() <= 1e-15);
                }
            }
        }

        #[test]
        fn permutation_mix_has_expansion_mu(mu in 0.0f64..=1.0, n in 1usize..24, seed in any::<u64>()) {
            let m = mix_with_permutation(mu, &random_permutation(n, seed)).unwrap();
            let lambda = matrix_expansion(&m).unwrap();
            if n == 1 {
                prop_assert!(lambda.abs() <= 1e-10);
            } else {
                prop_assert!((lambda - mu).abs() <= 1e-10);
            }
        }

        #[test]
        fn expansion_invariant_under_relabeling(seed in any::<u64>(), relabel_seed in any::<u64>()) {
            let g = random_regular(12, 4, seed).unwrap().matrix;
            let sigma = random_permutation(12, relabel_seed);
            let relabeled = Matrix::from_fn(12, 12, |j, i| g[(sigma[j], sigma[i])]);
            let a = matrix_expansion(&g).unwrap();
            let b = matrix_expansion(&relabeled).unwrap();
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }
}
