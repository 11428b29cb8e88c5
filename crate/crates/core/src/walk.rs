//! Exact walk-sum distributions.
//!
//! The dynamic program tracks `Pr[walk is at v and the labels seen so far sum
//! to j]` and advances one transition at a time, so a length-`t` walk on `n`
//! states costs `O(t^2 n^2)`.  [`brute_force_walk_sum`] enumerates vertex
//! paths and [`sample_walk_sum`] draws Monte-Carlo samples; both exist to
//! cross-check the dynamic program.

use rand::distr::{Distribution, weighted::WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dist::IntegerDistribution;
use crate::error::{invalid, Error, Result};
use crate::graph::{check_column_stochastic, check_stationary, check_weights, label_weights, LabeledChain, Matrix};

/// Round-off below this magnitude is clamped to zero; anything more negative is an error.
pub const NEGATIVE_DUST: f64 = 1e-15;
/// Path-count ceiling for [`brute_force_walk_sum`].
pub const BRUTE_FORCE_MAX_PATHS: f64 = 1e7;

/// Size caps for the dynamic program.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DpLimits {
    pub max_t: usize,
    pub max_n: usize,
}

impl Default for DpLimits {
    fn default() -> Self {
        Self {
            max_t: 4096,
            max_n: 512,
        }
    }
}

impl DpLimits {
    fn check(&self, n: usize, t: usize) -> Result<()> {
        if t == 0 {
            return invalid("walk length must be at least 1");
        }
        if t > self.max_t || n > self.max_n {
            return Err(Error::ResourceLimit(format!(
                "walk of length {t} on {n} states exceeds the caps t <= {}, n <= {}",
                self.max_t, self.max_n
            )));
        }
        Ok(())
    }
}

/// A time-inhomogeneous walk: `steps[i]` drives the move from the `i`-th to the
/// `(i+1)`-th vertex, so the walk visits `steps.len() + 1` vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct GraphSequence {
    steps: Vec<Matrix>,
    weights: Vec<f64>,
    labels: Vec<u8>,
}

impl GraphSequence {
    pub fn new(steps: Vec<Matrix>, weights: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        let n = weights.len();
        if n == 0 || labels.len() != n {
            return invalid("weights and labels must be nonempty and of equal length");
        }
        check_weights(&weights)?;
        if labels.iter().any(|&l| l > 1) {
            return invalid("labels must be 0 or 1");
        }
        for (i, m) in steps.iter().enumerate() {
            if m.shape() != (n, n) {
                return invalid(format!("step {i} has shape {:?}, expected ({n}, {n})", m.shape()));
            }
            check_column_stochastic(m)?;
            check_stationary(m, &weights)?;
        }
        Ok(Self {
            steps,
            weights,
            labels,
        })
    }

    /// Every step equal to the chain's matrix.
    pub fn constant(chain: &LabeledChain, t: usize) -> Result<Self> {
        if t == 0 {
            return invalid("walk length must be at least 1");
        }
        Ok(Self {
            steps: vec![chain.matrix().clone(); t - 1],
            weights: chain.weights().to_vec(),
            labels: chain.labels().to_vec(),
        })
    }

    /// Walk on `chain` whose steps at [`cut_points`]`(t, parts)` are replaced by
    /// independent redraws, splitting it into `parts` independent sub-walks.
    pub fn with_independent_cuts(chain: &LabeledChain, t: usize, parts: usize) -> Result<Self> {
        let mut seq = Self::constant(chain, t)?;
        let reset = chain.independent_step();
        for cut in cut_points(t, parts)? {
            seq.steps[cut - 1] = reset.clone();
        }
        Ok(seq)
    }

    /// Walk length (number of visited vertices).
    pub fn t(&self) -> usize {
        self.steps.len() + 1
    }

    pub fn steps(&self) -> &[Matrix] {
        &self.steps
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn label_weights(&self) -> (f64, f64) {
        label_weights(&self.weights, &self.labels)
    }

    /// Copy with `steps[index]` replaced.
    pub fn replace_step(&self, index: usize, step: Matrix) -> Result<Self> {
        if index >= self.steps.len() {
            return invalid(format!("step index {index} out of range for {} steps", self.steps.len()));
        }
        let mut steps = self.steps.clone();
        steps[index] = step;
        Self::new(steps, self.weights.clone(), self.labels.clone())
    }
}

/// Boundaries `floor(k t / parts)` for `k = 1..parts`.  A boundary `c` means the
/// `c`-th vertex starts a fresh sub-walk.
pub fn cut_points(t: usize, parts: usize) -> Result<Vec<usize>> {
    if parts == 0 || parts > t {
        return invalid(format!("cannot split a length-{t} walk into {parts} parts"));
    }
    Ok((1..parts).map(|k| k * t / parts).collect())
}

/// Part lengths matching [`cut_points`].
pub fn near_equal_parts(t: usize, parts: usize) -> Result<Vec<usize>> {
    let mut bounds = vec![0];
    bounds.extend(cut_points(t, parts)?);
    bounds.push(t);
    Ok(bounds.windows(2).map(|w| w[1] - w[0]).collect())
}

struct SumTable {
    width: usize,
    cells: Vec<f64>,
}

impl SumTable {
    fn start(weights: &[f64], labels: &[u8], t: usize) -> Self {
        let width = t + 1;
        let mut cells = vec![0.0; weights.len() * width];
        for (v, (&w, &l)) in weights.iter().zip(labels).enumerate() {
            cells[v * width + l as usize] = w;
        }
        Self { width, cells }
    }

    /// Advance one step; `reach` is the largest partial sum present so far.
    fn advance(&mut self, step: &Matrix, labels: &[u8], reach: usize) {
        let n = labels.len();
        let w = self.width;
        let mut next = vec![0.0; self.cells.len()];
        for (to, &label) in labels.iter().enumerate() {
            let shift = label as usize;
            let dst = &mut next[to * w + shift..to * w + shift + reach + 1];
            for from in 0..n {
                let p = step[(to, from)];
                if p == 0.0 {
                    continue;
                }
                let src = &self.cells[from * w..from * w + reach + 1];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += p * s;
                }
            }
        }
        self.cells = next;
    }

    fn marginal(&self) -> Result<Vec<f64>> {
        let mut probs = vec![0.0; self.width];
        for row in self.cells.chunks_exact(self.width) {
            for (acc, x) in probs.iter_mut().zip(row) {
                *acc += x;
            }
        }
        clamp_dust(&mut probs)?;
        Ok(probs)
    }
}

fn clamp_dust(probs: &mut [f64]) -> Result<()> {
    let mut clamped = 0;
    for x in probs.iter_mut() {
        if *x < -NEGATIVE_DUST {
            return Err(Error::NegativeProbability(format!("walk-sum mass {x} below round-off level")));
        }
        if *x < 0.0 {
            *x = 0.0;
            clamped += 1;
        }
    }
    if clamped > 0 {
        log::warn!("clamped {clamped} negative round-off masses to zero");
    }
    Ok(())
}

fn run_dp<'a>(
    weights: &[f64],
    labels: &[u8],
    steps: impl Iterator<Item = &'a Matrix>,
    t: usize,
) -> Result<IntegerDistribution> {
    let mut table = SumTable::start(weights, labels, t);
    for (reach, step) in (1..t).zip(steps) {
        table.advance(step, labels, reach);
    }
    IntegerDistribution::new(0, table.marginal()?)
}

/// Exact distribution of the label sum of a length-`t` walk started from the
/// chain's weights.  Support is all of `[0..t]`.
pub fn walk_sum_distribution(chain: &LabeledChain, t: usize) -> Result<IntegerDistribution> {
    walk_sum_distribution_with_limits(chain, t, DpLimits::default())
}

pub fn walk_sum_distribution_with_limits(
    chain: &LabeledChain,
    t: usize,
    limits: DpLimits,
) -> Result<IntegerDistribution> {
    limits.check(chain.n(), t)?;
    run_dp(
        chain.weights(),
        chain.labels(),
        std::iter::repeat_n(chain.matrix(), t - 1),
        t,
    )
}

pub fn walk_sum_distribution_seq(seq: &GraphSequence) -> Result<IntegerDistribution> {
    walk_sum_distribution_seq_with_limits(seq, DpLimits::default())
}

pub fn walk_sum_distribution_seq_with_limits(seq: &GraphSequence, limits: DpLimits) -> Result<IntegerDistribution> {
    let t = seq.t();
    limits.check(seq.weights.len(), t)?;
    run_dp(&seq.weights, &seq.labels, seq.steps.iter(), t)
}

/// Enumerates all `n^t` vertex paths.  Used as an oracle for the dynamic program.
pub fn brute_force_walk_sum(chain: &LabeledChain, t: usize) -> Result<IntegerDistribution> {
    if t == 0 {
        return invalid("walk length must be at least 1");
    }
    let n = chain.n();
    if (n as f64).powi(t as i32) > BRUTE_FORCE_MAX_PATHS {
        return Err(Error::ResourceLimit(format!("{n}^{t} paths exceed the enumeration guard")));
    }
    let m = chain.matrix();
    let labels = chain.labels();
    let mut probs = vec![0.0; t + 1];
    let mut path = vec![0usize; t];
    loop {
        let mut prob = chain.weights()[path[0]];
        for w in path.windows(2) {
            prob *= m[(w[1], w[0])];
        }
        let sum: usize = path.iter().map(|&v| labels[v] as usize).sum();
        probs[sum] += prob;
        // Odometer increment of the path.
        let mut k = t;
        loop {
            if k == 0 {
                return IntegerDistribution::new(0, probs);
            }
            k -= 1;
            path[k] += 1;
            if path[k] < n {
                break;
            }
            path[k] = 0;
        }
    }
}

/// Histogram (indexed by sum `0..=t`) of `m` sampled walk sums.
pub fn sample_walk_sum(chain: &LabeledChain, t: usize, seed: u64, m: usize) -> Result<Vec<u64>> {
    if t == 0 || m == 0 {
        return invalid("sampling needs t >= 1 and m >= 1");
    }
    let bad = |e: rand::distr::weighted::Error| Error::InvalidArgument(e.to_string());
    let start = WeightedIndex::new(chain.weights()).map_err(bad)?;
    let columns = chain
        .matrix()
        .column_iter()
        .map(|col| WeightedIndex::new(col.iter().copied()).map_err(bad))
        .collect::<Result<Vec<_>>>()?;
    let labels = chain.labels();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hist = vec![0u64; t + 1];
    for _ in 0..m {
        let mut v = start.sample(&mut rng);
        let mut sum = labels[v] as usize;
        for _ in 1..t {
            v = columns[v].sample(&mut rng);
            sum += labels[v] as usize;
        }
        hist[sum] += 1;
    }
    Ok(hist)
}

/// Normalizes a histogram into a distribution on `[0..len)`.
pub fn empirical_distribution(hist: &[u64]) -> Result<IntegerDistribution> {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return invalid("empty histogram");
    }
    IntegerDistribution::new(0, hist.iter().map(|&c| c as f64 / total as f64).collect())
}
