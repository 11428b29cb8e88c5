//! Finitely supported distributions on the integers and the operations the
//! verifiers need: distances, convolution, moments, tails and centered
//! characteristic functions.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Mass tolerance accepted by [`IntegerDistribution::new`].
pub const MASS_TOL: f64 = 1e-9;

/// Probability masses on the consecutive integers `offset, offset + 1, ...`.
///
/// Endpoint masses are kept even when tiny; nothing is truncated.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegerDistribution {
    offset: i64,
    probs: Vec<f64>,
}

impl IntegerDistribution {
    pub fn new(offset: i64, probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return invalid("distribution needs at least one support point");
        }
        if let Some(x) = probs.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidArgument(format!("mass {x} is not a probability")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return invalid(format!("masses sum to {total}, not 1"));
        }
        Ok(Self { offset, probs })
    }

    pub fn point_mass(at: i64) -> Self {
        Self {
            offset: at,
            probs: vec![1.0],
        }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Largest support point stored.
    pub fn max_point(&self) -> i64 {
        self.offset + self.probs.len() as i64 - 1
    }

    pub fn prob(&self, j: i64) -> f64 {
        if j < self.offset {
            return 0.0;
        }
        self.probs.get((j - self.offset) as usize).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(k, &x)| (self.offset + k as i64, x))
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Mean and variance (second central moment).
    pub fn mean_variance(&self) -> (f64, f64) {
        let mean: f64 = self.iter().map(|(j, x)| j as f64 * x).sum();
        let var = self
            .iter()
            .map(|(j, x)| {
                let d = j as f64 - mean;
                d * d * x
            })
            .sum();
        (mean, var)
    }

    /// `j,prob` CSV with 17 significant digits per probability.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,prob\n");
        for (j, x) in self.iter() {
            writeln!(out, "{j},{x:.16e}").unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("j,prob") {
            return Err(Error::Parse("distribution CSV must start with header j,prob".into()));
        }
        let mut rows = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let (j, x) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad CSV row {line:?}")))?;
            let j: i64 = j.trim().parse().map_err(|e| Error::Parse(format!("{e}: {j:?}")))?;
            let x: f64 = x.trim().parse().map_err(|e| Error::Parse(format!("{e}: {x:?}")))?;
            rows.push((j, x));
        }
        if rows.is_empty() {
            return Err(Error::Parse("distribution CSV has no rows".into()));
        }
        rows.sort_by_key(|r| r.0);
        let offset = rows[0].0;
        let mut probs = vec![0.0; (rows[rows.len() - 1].0 - offset + 1) as usize];
        for (j, x) in rows {
            probs[(j - offset) as usize] += x;
        }
        Self::new(offset, probs)
    }
}

pub fn bernoulli(p: f64) -> Result<IntegerDistribution> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("Bernoulli parameter {p} is outside [0, 1]"));
    }
    IntegerDistribution::new(0, vec![1.0 - p, p])
}

/// `Bin(t, p)` on `[0..t]`, built by the ratio recurrence outward from the
/// mode and normalized once at the end.
pub fn binomial(t: usize, p: f64) -> Result<IntegerDistribution> {
    if !(0.0..=1.0).contains(&p) {
        return invalid(format!("binomial parameter {p} is outside [0, 1]"));
    }
    let mut probs = vec![0.0; t + 1];
    if p == 0.0 {
        probs[0] = 1.0;
    } else if p == 1.0 {
        probs[t] = 1.0;
    } else {
        let odds = p / (1.0 - p);
        let mode = (((t + 1) as f64 * p).floor() as usize).min(t);
        probs[mode] = 1.0;
        for k in mode..t {
            probs[k + 1] = probs[k] * (t - k) as f64 / (k + 1) as f64 * odds;
        }
        for k in (0..mode).rev() {
            probs[k] = probs[k + 1] * (k + 1) as f64 / (t - k) as f64 / odds;
        }
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|x| *x /= total);
    }
    IntegerDistribution::new(0, probs)
}

/// Union support range of two distributions.
fn joint_range(a: &IntegerDistribution, b: &IntegerDistribution) -> std::ops::RangeInclusive<i64> {
    a.offset.min(b.offset)..=a.max_point().max(b.max_point())
}

pub fn tv_distance(a: &IntegerDistribution, b: &IntegerDistribution) -> f64 {
    (0.5 * lp_distances(a, b).0).min(1.0)
}

/// `(l1, l2)` norms of the mass-function difference.
pub fn lp_distances(a: &IntegerDistribution, b: &IntegerDistribution) -> (f64, f64) {
    let (mut l1, mut l2) = (0.0, 0.0);
    for j in joint_range(a, b) {
        let d = (a.prob(j) - b.prob(j)).abs();
        l1 += d;
        l2 += d * d;
    }
    (l1, l2.sqrt())
}

/// Largest gap between the two CDFs.
pub fn kolmogorov_distance(a: &IntegerDistribution, b: &IntegerDistribution) -> f64 {
    let (mut fa, mut fb, mut gap) = (0.0, 0.0, 0.0f64);
    for j in joint_range(a, b) {
        fa += a.prob(j);
        fb += b.prob(j);
        gap = gap.max((fa - fb).abs());
    }
    gap
}

/// `sum |a_j - b_j|` over support points with `|j - center| >= c`.
pub fn tail_l1(a: &IntegerDistribution, b: &IntegerDistribution, center: f64, c: f64) -> f64 {
    joint_range(a, b)
        .filter(|&j| (j as f64 - center).abs() >= c)
        .map(|j| (a.prob(j) - b.prob(j)).abs())
        .sum()
}

/// Distribution of the sum of independent draws from `a` and `b`.
pub fn convolve(a: &IntegerDistribution, b: &IntegerDistribution) -> IntegerDistribution {
    let mut probs = vec![0.0; a.probs.len() + b.probs.len() - 1];
    for (i, &x) in a.probs.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (k, &y) in b.probs.iter().enumerate() {
            probs[i + k] += x * y;
        }
    }
    IntegerDistribution {
        offset: a.offset + b.offset,
        probs,
    }
}

/// Convolution of a nonempty list of distributions, left to right.
pub fn convolve_all<'a>(parts: impl IntoIterator<Item = &'a IntegerDistribution>) -> Option<IntegerDistribution> {
    parts.into_iter().fold(None, |acc, d| match acc {
        None => Some(d.clone()),
        Some(acc) => Some(convolve(&acc, d)),
    })
}

/// `sum_j exp(-i theta (j - center)) a_j` for `theta` in `[-pi, pi]`.
pub fn centered_char_fn(a: &IntegerDistribution, center: f64, theta: f64) -> Result<Complex64> {
    if !(-PI..=PI).contains(&theta) {
        return invalid(format!("theta = {theta} is outside [-pi, pi]"));
    }
    Ok(a
        .iter()
        .map(|(j, x)| Complex64::from_polar(x, -theta * (j as f64 - center)))
        .sum())
}

/// `points` equally spaced angles from `-pi` to `pi` inclusive.
pub fn theta_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let step = 2.0 * PI / (points - 1) as f64;
            let mut grid: Vec<f64> = (0..points).map(|k| -PI + k as f64 * step).collect();
            grid[points - 1] = PI;
            grid
        }
    }
}

/// Characteristic-function dump as `theta,re,im,abs` CSV.
pub fn char_fn_csv(a: &IntegerDistribution, center: f64, thetas: &[f64]) -> Result<String> {
    let mut out = String::from("theta,re,im,abs\n");
    for &theta in thetas {
        let z = centered_char_fn(a, center, theta)?;
        writeln!(out, "{theta:.16e},{:.16e},{:.16e},{:.16e}", z.re, z.im, z.norm()).unwrap();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn dist(offset: i64, probs: &[f64]) -> IntegerDistribution {
        IntegerDistribution::new(offset, probs.to_vec()).unwrap()
    }

    fn arb_dist() -> impl Strategy<Value = IntegerDistribution> {
        (-3i64..3, prop::collection::vec(0.0f64..1.0, 1..8)).prop_filter_map("zero mass", |(off, w)| {
            let s: f64 = w.iter().sum();
            (s > 1e-3).then(|| IntegerDistribution::new(off, w.iter().map(|x| x / s).collect()).unwrap())
        })
    }

    #[test]
    fn distances_on_point_masses() {
        let a = IntegerDistribution::point_mass(0);
        let b = IntegerDistribution::point_mass(1);
        assert_eq!(tv_distance(&a, &a), 0.0);
        assert_eq!(tv_distance(&a, &b), 1.0);
        assert_eq!(lp_distances(&a, &a), (0.0, 0.0));
        let (l1, l2) = lp_distances(&a, &b);
        assert_eq!(l1, 2.0);
        assert_abs_diff_eq!(l2, 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(kolmogorov_distance(&a, &a), 0.0);
        assert_eq!(kolmogorov_distance(&a, &b), 1.0);
    }

    #[test]
    fn binomial_values() {
        let b = binomial(2, 0.5).unwrap();
        assert_eq!(b.probs(), &[0.25, 0.5, 0.25]);
        assert_eq!(binomial(5, 0.0).unwrap().prob(0), 1.0);
        assert_eq!(binomial(5, 1.0).unwrap().prob(5), 1.0);
        assert_eq!(binomial(0, 0.3).unwrap().probs(), &[1.0]);
        for (t, p) in [(64, 0.5), (100, 0.25), (4096, 0.75), (7, 0.01)] {
            let b = binomial(t, p).unwrap();
            let (m, v) = b.mean_variance();
            assert_abs_diff_eq!(m, t as f64 * p, epsilon = 1e-9 * t as f64);
            assert_abs_diff_eq!(v, t as f64 * p * (1.0 - p), epsilon = 1e-8 * t as f64);
        }
        // Direct product formula for a small case.
        let b = binomial(10, 0.3).unwrap();
        let direct = 120.0 * 0.3f64.powi(3) * 0.7f64.powi(7);
        assert_abs_diff_eq!(b.prob(3), direct, epsilon = 1e-15);
    }

    #[test]
    fn convolution_identities() {
        let p = 0.3;
        let bb = convolve(&bernoulli(p).unwrap(), &bernoulli(p).unwrap());
        let bin = binomial(2, p).unwrap();
        assert!(lp_distances(&bb, &bin).0 < 1e-15);
        let a = dist(-1, &[0.2, 0.5, 0.3]);
        assert_eq!(convolve(&a, &IntegerDistribution::point_mass(0)), a);
        let shifted = convolve(&a, &IntegerDistribution::point_mass(4));
        assert_eq!(shifted.offset(), 3);
    }

    #[test]
    fn tails() {
        let a = binomial(10, 0.5).unwrap();
        let b = dist(0, &[0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5]);
        assert_abs_diff_eq!(tail_l1(&a, &b, 5.0, 0.0), lp_distances(&a, &b).0, epsilon = 1e-15);
        assert_eq!(tail_l1(&a, &b, 5.0, 5.5), 0.0);
        assert!(tail_l1(&a, &b, 5.0, 5.0) > 0.0);
    }

    #[test]
    fn char_fn_values() {
        let a = dist(0, &[0.25, 0.75]);
        let z = centered_char_fn(&a, 0.75, 0.0).unwrap();
        assert_abs_diff_eq!(z.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
        for theta in [-3.0, -1.0, 0.4, 2.9] {
            let z = centered_char_fn(&a, 0.75, theta).unwrap();
            let expected = Complex64::from_polar(0.25, theta * 0.75) + Complex64::from_polar(0.75, -theta * 0.25);
            assert_abs_diff_eq!((z - expected).norm(), 0.0, epsilon = 1e-15);
        }
        assert!(centered_char_fn(&a, 0.0, 3.5).is_err());
        let g = theta_grid(129);
        assert_eq!(g.len(), 129);
        assert_eq!(g[0], -PI);
        assert_eq!(g[128], PI);
        assert_eq!(g[64], 0.0);
    }

    #[test]
    fn csv_round_trip_and_format() {
        let a = dist(0, &[0.375, 0.25, 0.375]);
        let csv = a.to_csv();
        assert_eq!(
            csv,
            "j,prob\n0,3.7500000000000000e-1\n1,2.5000000000000000e-1\n2,3.7500000000000000e-1\n"
        );
        assert_eq!(IntegerDistribution::from_csv(&csv).unwrap(), a);
        assert!(IntegerDistribution::from_csv("x,y\n").is_err());
    }

    #[test]
    fn rejects_non_distributions() {
        assert!(IntegerDistribution::new(0, vec![]).is_err());
        assert!(IntegerDistribution::new(0, vec![0.5, 0.6]).is_err());
        assert!(IntegerDistribution::new(0, vec![1.5, -0.5]).is_err());
        assert!(bernoulli(1.2).is_err());
    }

    /// Trapezoid rule for `(1/2pi) int |a^ - b^|^2` over `[-pi, pi]`.
    fn quadrature_l2_sq(a: &IntegerDistribution, b: &IntegerDistribution, points: usize) -> f64 {
        let grid = theta_grid(points);
        let h = 2.0 * PI / (points - 1) as f64;
        let f = |th: f64| (centered_char_fn(a, 0.0, th).unwrap() - centered_char_fn(b, 0.0, th).unwrap()).norm_sqr();
        let inner: f64 = grid[1..points - 1].iter().map(|&th| f(th)).sum();
        h * (inner + 0.5 * (f(grid[0]) + f(grid[points - 1]))) / (2.0 * PI)
    }

    proptest! {
        #[test]
        fn metric_axioms(a in arb_dist(), b in arb_dist(), c in arb_dist()) {
            let metrics: [fn(&IntegerDistribution, &IntegerDistribution) -> f64; 4] = [
                tv_distance,
                |x, y| lp_distances(x, y).0,
                |x, y| lp_distances(x, y).1,
                kolmogorov_distance,
            ];
            for d in metrics {
                prop_assert!(d(&a, &b) >= 0.0);
                prop_assert!((d(&a, &b) - d(&b, &a)).abs() <= 1e-14);
                prop_assert!(d(&a, &a) <= 1e-14);
                prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-14);
            }
            prop_assert!(kolmogorov_distance(&a, &b) <= tv_distance(&a, &b) + 1e-14);
            prop_assert!(tv_distance(&a, &b) <= 1.0);
        }

        #[test]
        fn tail_l1_non_increasing(a in arb_dist(), b in arb_dist(), center in -3.0f64..3.0, c in 0.0f64..6.0, dc in 0.0f64..3.0) {
            prop_assert!(tail_l1(&a, &b, center, c + dc) <= tail_l1(&a, &b, center, c) + 1e-15);
        }

        #[test]
        fn convolution_multiplies_char_fns(a in arb_dist(), b in arb_dist(), ca in -2.0f64..2.0, cb in -2.0f64..2.0, theta in -PI..PI) {
            let ab = convolve(&a, &b);
            prop_assert!((ab.total_mass() - 1.0).abs() <= 1e-12);
            let lhs = centered_char_fn(&ab, ca + cb, theta).unwrap();
            let rhs = centered_char_fn(&a, ca, theta).unwrap() * centered_char_fn(&b, cb, theta).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-12);
            prop_assert!(lhs.norm() <= 1.0 + 1e-12);
        }

        #[test]
        fn parseval(a in arb_dist(), b in arb_dist()) {
            let direct = lp_distances(&a, &b).1.powi(2);
            let quad = quadrature_l2_sq(&a, &b, 4096);
            prop_assert!((direct - quad).abs() <= 1e-6 * direct.max(1e-300) || (direct - quad).abs() < 1e-15);
        }
    }
}
