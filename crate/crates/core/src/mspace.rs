//! Finite metric measure spaces with a dominating function.
//!
//! A [`Space`] stores the full distance table, the atomic weights
//! `μ({xᵢ})`, the dominating function `λ` and the structural constants
//! derived from them:
//!
//! * `c_lambda`, the tightest constant with `λ(x, r) ≤ C_λ·λ(x, r/2)` on the
//!   canonical radius grid,
//! * `c_tilde`, the tightest constant with `λ(x, r) ≤ C̃·λ(y, r)` whenever
//!   `d(x, y) ≤ r`,
//! * `beta0`, the doubling threshold, set 1% above
//!   `max(C_λ^(3·log₂6), 6^n)`.
//!
//! Balls are closed: `B(x, r) = {y : d(x, y) ≤ r}`.
//!
//! The canonical radius grid holds every distinct pairwise distance together
//! with its dilates by `6ᵏ` and `(6/5)·6ᵏ` (`k ≥ 0`), capped at six times the
//! diameter. Radii below the minimal distance only ever produce singletons;
//! the space exposes one such radius, [`Space::atom_radius`], equal to a
//! 36th of the minimal distance, so that `6B` of an atom is still the atom.

use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry;
use crate::math;
use crate::report::{ArgMax, BallSummary, VerificationReport, Witness};

/// Relative slack applied to closed-ball membership tests.
pub const RADIUS_SLACK: f64 = 1e-12;

/// Above this many points the triangle inequality is sampled.
pub const EXHAUSTIVE_TRIANGLE_LIMIT: usize = 256;
pub const SAMPLED_TRIANGLES: usize = 100_000;
const TRIANGLE_SEED: u64 = 0x6d65_7472_6963;

/// `beta0` is this factor above its lower bound.
pub const BETA0_MARGIN: f64 = 1.01;

/// Ratio between a dominating radius and the atom radius of a space.
pub const ATOM_DIVISOR: f64 = 36.0;

/// How `λ(x, r)` is given.
#[derive(Debug, Clone, PartialEq)]
pub enum DominatingSpec {
    /// `λ(x, r) = c·rᵏ`, the same for every point.
    Power { c: f64, k: f64 },
    /// Per-point step function: `values[x][j]` is `λ(x, radii[j])`, and an
    /// off-table radius is rounded up to the next table radius. Radii above
    /// the last entry use the last value.
    Table { radii: Vec<f64>, values: Vec<Vec<f64>> },
}

/// A finite metric measure space with a dominating function.
#[derive(Debug, Clone)]
pub struct Space {
    n: usize,
    dist: Vec<f64>,
    weights: Vec<f64>,
    lambda: DominatingSpec,
    dim_n: f64,
    c_lambda: f64,
    c_tilde: f64,
    beta0: f64,
    grid: Vec<f64>,
    atom_radius: f64,
    total_mass: f64,
    diameter: f64,
    min_distance: f64,
    // Per center: point indices sorted by (distance, index), the sorted
    // distances, and prefix sums of the weights in that order.
    order: Vec<u32>,
    sorted_dist: Vec<f64>,
    prefix_mass: Vec<f64>,
}

/// Builds and validates a space.
///
/// `distances` is the row-major `n × n` table. When `dim_n` is `None` it
/// defaults to `log₂` of the estimated geometric doubling constant (or 1 if
/// that is not positive).
pub fn build_space(
    distances: Vec<f64>,
    weights: Vec<f64>,
    lambda: DominatingSpec,
    dim_n: Option<f64>,
) -> Result<Space> {
    let n = weights.len();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    if distances.len() != n * n {
        return Err(Error::DimensionMismatch {
            what: "distance table",
            expected: n * n,
            found: distances.len(),
        });
    }
    for (index, &w) in weights.iter().enumerate() {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::NonpositiveWeight { index, value: w });
        }
    }
    validate_metric(n, &distances)?;
    validate_lambda(n, &lambda)?;

    let (order, sorted_dist, prefix_mass) = neighbor_tables(n, &distances, &weights);
    let total_mass = prefix_mass[n];
    let mut diameter = 0.0f64;
    let mut min_distance = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = distances[i * n + j];
            diameter = diameter.max(d);
            min_distance = min_distance.min(d);
        }
    }
    if n == 1 {
        min_distance = 0.0;
    }
    let grid = radius_grid(n, &distances, diameter);
    let atom_radius = if n == 1 { 1.0 } else { min_distance / ATOM_DIVISOR };

    let mut space = Space {
        n,
        dist: distances,
        weights,
        lambda,
        dim_n: 1.0,
        c_lambda: 1.0,
        c_tilde: 1.0,
        beta0: 1.0,
        grid,
        atom_radius,
        total_mass,
        diameter,
        min_distance,
        order,
        sorted_dist,
        prefix_mass,
    };

    let dim_n = match dim_n {
        Some(d) => d,
        None => {
            let n0 = estimate_geometric_doubling(&space);
            let d = math::log2(n0 as f64);
            if d > 0.0 {
                d
            } else {
                1.0
            }
        }
    };
    if !(dim_n.is_finite() && dim_n > 0.0) {
        return Err(Error::InvalidParameter {
            name: "dim_n",
            value: dim_n,
            reason: "must be a positive real",
        });
    }
    if let DominatingSpec::Power { k, .. } = space.lambda {
        if k > dim_n {
            return Err(Error::InvalidParameter {
                name: "lambda.k",
                value: k,
                reason: "power exponent must lie in [0, dim_n]",
            });
        }
    }
    space.dim_n = dim_n;
    space.c_lambda = space.tightest_c_lambda();
    space.c_tilde = space.tightest_c_tilde();
    space.beta0 = BETA0_MARGIN * space.beta0_lower_bound();
    Ok(space)
}

/// Builds a space from coordinates with the Euclidean metric.
pub fn from_coords(
    coords: &[Vec<f64>],
    weights: Vec<f64>,
    lambda: DominatingSpec,
    dim_n: Option<f64>,
) -> Result<Space> {
    build_space(euclidean_distances(coords)?, weights, lambda, dim_n)
}

/// Row-major Euclidean distance table; exactly symmetric by construction.
pub fn euclidean_distances(coords: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = coords.len();
    let dim = coords.first().map_or(0, Vec::len);
    for (i, c) in coords.iter().enumerate() {
        if c.len() != dim {
            return Err(Error::DimensionMismatch {
                what: "coordinate vector",
                expected: dim,
                found: c.len(),
            });
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "coordinates",
                index: i,
            });
        }
    }
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let s: f64 = coords[i]
                .iter()
                .zip(&coords[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let d = math::sqrt(s);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    Ok(dist)
}

fn validate_metric(n: usize, d: &[f64]) -> Result<()> {
    for i in 0..n {
        for j in 0..n {
            let v = d[i * n + j];
            if !v.is_finite() || v < 0.0 {
                return Err(Error::MetricViolation {
                    triple: (i, j, j),
                    reason: "distance must be finite and nonnegative",
                });
            }
            if i == j && v != 0.0 {
                return Err(Error::MetricViolation {
                    triple: (i, i, i),
                    reason: "nonzero diagonal",
                });
            }
            if i != j && v == 0.0 {
                return Err(Error::MetricViolation {
                    triple: (i, j, j),
                    reason: "distinct points at distance zero",
                });
            }
            if j > i {
                let w = d[j * n + i];
                if math::abs(v - w) > RADIUS_SLACK * v.max(w) {
                    return Err(Error::MetricViolation {
                        triple: (i, j, i),
                        reason: "asymmetric distance",
                    });
                }
            }
        }
    }
    let violates = |a: usize, b: usize, c: usize| {
        let lhs = d[a * n + c];
        let rhs = d[a * n + b] + d[b * n + c];
        lhs > rhs * (1.0 + RADIUS_SLACK)
    };
    if n <= EXHAUSTIVE_TRIANGLE_LIMIT {
        for a in 0..n {
            for c in (a + 1)..n {
                for b in 0..n {
                    if b != a && b != c && violates(a, b, c) {
                        return Err(Error::MetricViolation {
                            triple: (a, b, c),
                            reason: "triangle inequality fails: d(a,c) > d(a,b) + d(b,c)",
                        });
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(TRIANGLE_SEED);
        for _ in 0..SAMPLED_TRIANGLES {
            let (a, b, c) = (
                rng.random_range(0..n),
                rng.random_range(0..n),
                rng.random_range(0..n),
            );
            if violates(a, b, c) {
                return Err(Error::MetricViolation {
                    triple: (a, b, c),
                    reason: "triangle inequality fails: d(a,c) > d(a,b) + d(b,c)",
                });
            }
        }
    }
    Ok(())
}

fn validate_lambda(n: usize, spec: &DominatingSpec) -> Result<()> {
    match spec {
        DominatingSpec::Power { c, k } => {
            if !(c.is_finite() && *c > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "lambda.c",
                    value: *c,
                    reason: "must be a positive real",
                });
            }
            if !(k.is_finite() && *k >= 0.0) {
                return Err(Error::InvalidParameter {
                    name: "lambda.k",
                    value: *k,
                    reason: "must be a nonnegative real",
                });
            }
        }
        DominatingSpec::Table { radii, values } => {
            if radii.is_empty() {
                return Err(Error::DimensionMismatch {
                    what: "lambda table radii",
                    expected: 1,
                    found: 0,
                });
            }
            for (j, &r) in radii.iter().enumerate() {
                let prev = if j == 0 { 0.0 } else { radii[j - 1] };
                if !(r.is_finite() && r > prev) {
                    return Err(Error::InvalidParameter {
                        name: "lambda.radii",
                        value: r,
                        reason: "table radii must be positive and strictly increasing",
                    });
                }
            }
            if values.len() != n {
                return Err(Error::DimensionMismatch {
                    what: "lambda table rows",
                    expected: n,
                    found: values.len(),
                });
            }
            for (point, row) in values.iter().enumerate() {
                if row.len() != radii.len() {
                    return Err(Error::DimensionMismatch {
                        what: "lambda table row",
                        expected: radii.len(),
                        found: row.len(),
                    });
                }
                for (j, &v) in row.iter().enumerate() {
                    let prev = if j == 0 { 0.0 } else { row[j - 1] };
                    if !(v.is_finite() && v > 0.0 && v >= prev) {
                        return Err(Error::LambdaNotMonotone {
                            point,
                            radius: radii[j],
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

fn neighbor_tables(n: usize, d: &[f64], w: &[f64]) -> (Vec<u32>, Vec<f64>, Vec<f64>) {
    let mut order = Vec::with_capacity(n * n);
    let mut sorted = Vec::with_capacity(n * n);
    let mut prefix = Vec::with_capacity(n * (n + 1));
    let mut idx: Vec<u32> = (0..n as u32).collect();
    for c in 0..n {
        let row = &d[c * n..(c + 1) * n];
        idx.sort_by(|&a, &b| {
            row[a as usize]
                .total_cmp(&row[b as usize])
                .then(a.cmp(&b))
        });
        let mut acc = 0.0;
        prefix.push(0.0);
        for &j in &idx {
            order.push(j);
            sorted.push(row[j as usize]);
            acc += w[j as usize];
            prefix.push(acc);
        }
    }
    (order, sorted, prefix)
}

fn radius_grid(n: usize, d: &[f64], diameter: f64) -> Vec<f64> {
    let mut base: Vec<f64> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            base.push(d[i * n + j]);
        }
    }
    let cap = 6.0 * diameter * (1.0 + RADIUS_SLACK);
    let base = sorted_distinct(base);
    let mut grid = Vec::new();
    for &r in &base {
        for start in [r, 1.2 * r] {
            let mut s = start;
            while s <= cap {
                grid.push(s);
                s *= 6.0;
            }
        }
    }
    sorted_distinct(grid)
}

fn sorted_distinct(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for x in v {
        match out.last() {
            Some(&last) if x - last <= RADIUS_SLACK * x => {}
            _ => out.push(x),
        }
    }
    out
}

impl Space {
    pub fn point_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn distance(&self, x: usize, y: usize) -> f64 {
        self.dist[x * self.n + y]
    }

    /// Row-major distance table.
    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, x: usize) -> f64 {
        self.weights[x]
    }

    pub fn lambda_spec(&self) -> &DominatingSpec {
        &self.lambda
    }

    pub fn dim_n(&self) -> f64 {
        self.dim_n
    }

    pub fn c_lambda(&self) -> f64 {
        self.c_lambda
    }

    pub fn c_tilde(&self) -> f64 {
        self.c_tilde
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    /// `max(C_λ^(3·log₂6), 6^n)`; `beta0` must exceed this.
    pub fn beta0_lower_bound(&self) -> f64 {
        let a = math::pow(self.c_lambda, 3.0 * math::log2(6.0));
        let b = math::pow(6.0, self.dim_n);
        a.max(b)
    }

    /// Canonical radius grid, sorted ascending.
    pub fn radius_grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn atom_radius(&self) -> f64 {
        self.atom_radius
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Smallest distance between distinct points (0 for a single point).
    pub fn min_distance(&self) -> f64 {
        self.min_distance
    }

    pub(crate) fn check_point(&self, x: usize) -> Result<()> {
        if x >= self.n {
            return Err(Error::PointOutOfRange {
                index: x,
                len: self.n,
            });
        }
        Ok(())
    }

    /// Points sorted by distance from `center`, nearest first.
    pub fn neighbors(&self, center: usize) -> &[u32] {
        &self.order[center * self.n..(center + 1) * self.n]
    }

    /// Distances from `center` in [`Space::neighbors`] order.
    pub fn sorted_distances(&self, center: usize) -> &[f64] {
        &self.sorted_dist[center * self.n..(center + 1) * self.n]
    }

    /// Number of points in the closed ball `B(center, radius)`.
    #[inline]
    pub fn ball_count(&self, center: usize, radius: f64) -> usize {
        let bound = radius + radius * RADIUS_SLACK;
        self.sorted_distances(center).partition_point(|&d| d <= bound)
    }

    /// `μ(B(center, radius))`.
    #[inline]
    pub fn ball_measure(&self, center: usize, radius: f64) -> f64 {
        let m = self.ball_count(center, radius);
        self.prefix_mass[center * (self.n + 1) + m]
    }

    /// Measure of the `m` nearest points of `center`.
    #[inline]
    pub(crate) fn prefix_measure(&self, center: usize, m: usize) -> f64 {
        self.prefix_mass[center * (self.n + 1) + m]
    }

    /// `λ(x, r)`. For the power form, `r = 0` returns the limit `c·0ᵏ`.
    pub fn lambda(&self, x: usize, r: f64) -> f64 {
        match &self.lambda {
            DominatingSpec::Power { c, k } => c * math::pow(r, *k),
            DominatingSpec::Table { radii, values } => {
                let j = radii.partition_point(|&t| t < r * (1.0 - RADIUS_SLACK));
                let j = j.min(radii.len() - 1);
                values[x][j]
            }
        }
    }

    /// `λ(x, r)` for use as a denominator: radius 0 or a zero value is an
    /// error, never a division by zero.
    pub fn lambda_positive(&self, x: usize, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Err(Error::LambdaAtZero { point: x });
        }
        let v = self.lambda(x, r);
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::LambdaAtZero { point: x })
        }
    }

    fn tightest_c_lambda(&self) -> f64 {
        let points = match self.lambda {
            DominatingSpec::Power { .. } => 1,
            DominatingSpec::Table { .. } => self.n,
        };
        let mut c = 1.0f64;
        for x in 0..points {
            for &r in &self.grid {
                let half = self.lambda(x, r / 2.0);
                if half > 0.0 {
                    c = c.max(self.lambda(x, r) / half);
                }
            }
        }
        c
    }

    fn tightest_c_tilde(&self) -> f64 {
        if matches!(self.lambda, DominatingSpec::Power { .. }) {
            return 1.0;
        }
        let mut c = 1.0f64;
        for x in 0..self.n {
            for y in 0..self.n {
                if x == y {
                    continue;
                }
                let dxy = self.distance(x, y);
                let start = self.grid.partition_point(|&r| r < dxy * (1.0 - RADIUS_SLACK));
                for &r in &self.grid[start..] {
                    c = c.max(self.lambda(x, r) / self.lambda(y, r));
                }
            }
        }
        c
    }
}

/// `λ(x, r)` with argument checks.
pub fn lambda_eval(space: &Space, x: usize, r: f64) -> Result<f64> {
    space.check_point(x)?;
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            reason: "radius must be a nonnegative real",
        });
    }
    Ok(space.lambda(x, r))
}

/// Checks `μ(B(x, r)) ≤ λ(x, r)` for every point and grid radius, and
/// re-asserts the halving and comparability chains with the stored constants.
pub fn check_upper_doubling(space: &Space) -> VerificationReport {
    let mut report = VerificationReport::new("upper-doubling");
    let mut worst: ArgMax<(usize, f64)> = ArgMax::new();
    let mut halving = 0.0f64;
    let mut compat = 0.0f64;
    for x in 0..space.n {
        for &r in &space.grid {
            let lam = space.lambda(x, r);
            let mu = space.ball_measure(x, r);
            let ratio = if lam > 0.0 { mu / lam } else { f64::INFINITY };
            worst.offer(ratio, || (x, r));
            let half = space.lambda(x, r / 2.0);
            if half > 0.0 {
                halving = halving.max(lam / (space.c_lambda * half));
            }
        }
    }
    for x in 0..space.n {
        for y in 0..space.n {
            if x == y {
                continue;
            }
            let dxy = space.distance(x, y);
            let start = space
                .grid
                .partition_point(|&r| r < dxy * (1.0 - RADIUS_SLACK));
            if matches!(space.lambda, DominatingSpec::Power { .. }) {
                // λ does not depend on the point.
                compat = compat.max(1.0 / space.c_tilde);
                continue;
            }
            for &r in &space.grid[start..] {
                compat = compat.max(space.lambda(x, r) / (space.c_tilde * space.lambda(y, r)));
            }
        }
    }
    report.fitted_constant = worst.value;
    report.metric("max_mu_over_lambda", worst.value);
    report.metric("max_halving_ratio_over_c_lambda", halving);
    report.metric("max_compat_ratio_over_c_tilde", compat);
    report.metric("c_lambda", space.c_lambda);
    report.metric("c_tilde", space.c_tilde);
    report.metric("beta0", space.beta0);
    if worst.value > 1.0 + 1e-12 {
        if let Some((x, r)) = worst.witness {
            let ball = geometry::Ball::new(space, x, r);
            report.witness = Some(Witness {
                ball: Some(BallSummary::from(&ball)),
                ..Witness::default()
            });
        }
        report.fail("μ(B(x,r)) exceeds λ(x,r) on a grid ball");
    }
    if halving > 1.0 + 1e-12 {
        report.fail("λ(x,r) ≤ C_λ·λ(x,r/2) fails with the stored C_λ");
    }
    if compat > 1.0 + 1e-12 {
        report.fail("λ(x,r) ≤ C̃·λ(y,r) fails with the stored C̃");
    }
    if space.beta0 <= space.beta0_lower_bound() {
        report.fail("beta0 is not above max(C_λ^(3·log₂6), 6^n)");
    }
    report
}

/// Re-checks the metric axioms on a built space: exhaustively up to 64
/// points, otherwise on 10⁵ seeded random triples.
pub fn check_metric(space: &Space, seed: u64) -> VerificationReport {
    let mut report = VerificationReport::new("metric-axioms").with_seed(seed);
    let n = space.n;
    let mut worst: ArgMax<(usize, usize, usize)> = ArgMax::new();
    let mut check = |a: usize, b: usize, c: usize| {
        let excess = space.distance(a, c) - space.distance(a, b) - space.distance(b, c);
        worst.offer(excess.max(0.0), || (a, b, c));
    };
    let mut triples = 0usize;
    if n <= 64 {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    check(a, b, c);
                    triples += 1;
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..SAMPLED_TRIANGLES {
            check(
                rng.random_range(0..n),
                rng.random_range(0..n),
                rng.random_range(0..n),
            );
            triples += 1;
        }
    }
    let mut asym = 0.0f64;
    let mut diag = 0.0f64;
    for a in 0..n {
        diag = diag.max(math::abs(space.distance(a, a)));
        for b in 0..n {
            asym = asym.max(math::abs(space.distance(a, b) - space.distance(b, a)));
            if a != b && space.distance(a, b) <= 0.0 {
                report.fail("distinct points at distance zero");
            }
        }
    }
    let slack = RADIUS_SLACK * space.diameter.max(1.0) * 2.0;
    report.fitted_constant = worst.value;
    report.metric("triples_checked", triples as f64);
    report.metric("max_triangle_excess", worst.value);
    report.metric("max_asymmetry", asym);
    if worst.value > slack {
        let (a, b, c) = worst.witness.unwrap_or_default();
        report.witness = Some(Witness {
            points: vec![a, b, c],
            ..Witness::default()
        });
        report.fail("triangle inequality violated");
    }
    if asym > slack || diag > 0.0 {
        report.fail("distance table not symmetric with zero diagonal");
    }
    report
}

/// Upper bound on the geometric doubling constant `N₀` by greedy set cover.
///
/// Every canonical ball `B(x, r)` is covered by balls `B(z, r/2)` with
/// centers anywhere in the space, picking at each step the center covering
/// the most uncovered members (lowest index on ties). Returns the largest
/// cover size; 1 for a single point.
pub fn estimate_geometric_doubling(space: &Space) -> usize {
    use fixedbitset::FixedBitSet;
    let n = space.n;
    let mut best = 1usize;
    let mut cover_sets: Vec<FixedBitSet> = Vec::new();
    let mut candidates: Vec<usize> = Vec::new();
    for (center, radius) in geometry::distinct_ball_generators(space) {
        let members = geometry::Ball::new(space, center, radius);
        if members.size() <= 1 {
            continue;
        }
        let half = radius / 2.0;
        cover_sets.clear();
        candidates.clear();
        for z in 0..n {
            if space.distance(center, z) > (radius + half) * (1.0 + RADIUS_SLACK) {
                continue;
            }
            let mut set = FixedBitSet::with_capacity(n);
            for y in members.members().ones() {
                if space.distance(z, y) <= half * (1.0 + RADIUS_SLACK) {
                    set.insert(y);
                }
            }
            if !set.is_clear() {
                candidates.push(z);
                cover_sets.push(set);
            }
        }
        let mut uncovered = members.members().clone();
        let mut used = 0usize;
        while !uncovered.is_clear() {
            let mut pick = 0usize;
            let mut pick_count = 0usize;
            for (i, set) in cover_sets.iter().enumerate() {
                let c = set.intersection_count(&uncovered);
                if c > pick_count {
                    pick = i;
                    pick_count = c;
                }
            }
            debug_assert!(pick_count > 0, "every member covers itself");
            uncovered.difference_with(&cover_sets[pick]);
            used += 1;
        }
        best = best.max(used);
    }
    best
}
