//! Seeded space and test-function generators, and the experiments that fit
//! the constants of the boundedness and pointwise estimates.
//!
//! Every random draw derives from `(seed, trial)` through [`trial_seed`], so
//! reports are reproducible bit for bit and independent of evaluation order.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldFunction;
use crate::geometry::{
    distinct_ball_generators, greedy_disjoint_cover, n_bq, shell_ratio, six_pow,
    smallest_doubling_dilate,
    Ball, CanonicalFamily,
};
use crate::maximal::{
    doubling_maximal_in, fractional_maximal_in, lp_norm, sharp_maximal_batch_in,
    sharp_maximal_in, weak_type_check_in, MaximalConfig,
};
use crate::math;
use crate::mspace::{build_space, check_metric, check_upper_doubling, euclidean_distances};
use crate::mspace::{DominatingSpec, Space};
use crate::operators::{
    apply_fractional_integral, commutator, multilinear_commutator, nested_commutator,
    sigma_subsets, standard_kernel, verify_product_expansion, FractionalKernel,
};
use crate::rbmo::{
    john_nirenberg_check_in, rbmo_norm_in, telescoping_check_in, DEFAULT_RHO,
};
use crate::report::{ArgMax, VerificationReport, Witness};

/// Largest multilinear order the experiments accept.
pub const MAX_EXPERIMENT_ORDER: usize = 4;

/// Relative slack of the exact suites.
pub const EXACT_SLACK: f64 = 1e-10;

/// Mixes a base seed and a trial index into an independent stream seed.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    // splitmix64 finalizer over a golden-ratio stride.
    let mut z = seed ^ trial.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn rng_for(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(seed, trial))
}

/// Generated point clouds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceFamily {
    /// `n` points `0, 1, …, n−1` on a line.
    Grid1d { n: usize },
    /// `side × side` unit lattice in the plane.
    Grid2d { side: usize },
    /// `n` uniform points in the unit square.
    Random { n: usize, seed: u64 },
    /// `n` points in Gaussian clumps (standard deviation 0.05) around
    /// uniform cluster centers.
    Clustered { n: usize, clusters: usize, seed: u64 },
}

impl SpaceFamily {
    /// Parses `grid1d:N`, `grid2d:SIDE`, `random:N:SEED` and
    /// `clustered:N:CLUSTERS:SEED`.
    pub fn parse(spec: &str) -> Option<Self> {
        let mut parts = spec.split(':');
        let tag = parts.next()?;
        let nums: Vec<u64> = parts.map(|p| p.parse().ok()).collect::<Option<_>>()?;
        let family = match (tag, nums.as_slice()) {
            ("grid1d", [n]) => Self::Grid1d { n: *n as usize },
            ("grid2d", [side]) => Self::Grid2d {
                side: *side as usize,
            },
            ("random", [n, seed]) => Self::Random {
                n: *n as usize,
                seed: *seed,
            },
            ("clustered", [n, c, seed]) => Self::Clustered {
                n: *n as usize,
                clusters: *c as usize,
                seed: *seed,
            },
            _ => return None,
        };
        (family.point_count() > 0).then_some(family)
    }

    pub fn label(&self) -> String {
        match self {
            Self::Grid1d { n } => format!("grid1d:{n}"),
            Self::Grid2d { side } => format!("grid2d:{side}"),
            Self::Random { n, seed } => format!("random:{n}:{seed}"),
            Self::Clustered { n, clusters, seed } => format!("clustered:{n}:{clusters}:{seed}"),
        }
    }

    pub fn point_count(&self) -> usize {
        match *self {
            Self::Grid1d { n } | Self::Random { n, .. } | Self::Clustered { n, .. } => n,
            Self::Grid2d { side } => side * side,
        }
    }

    /// The `dim_n` used for generated spaces, and the exponent of their `λ`.
    pub fn dimension(&self) -> f64 {
        match self {
            Self::Grid1d { .. } => 1.0,
            _ => 2.0,
        }
    }

    /// The same geometry with four times as many points.
    pub fn refined(&self) -> Self {
        match *self {
            Self::Grid1d { n } => Self::Grid1d { n: 4 * n },
            Self::Grid2d { side } => Self::Grid2d { side: 2 * side },
            Self::Random { n, seed } => Self::Random { n: 4 * n, seed },
            Self::Clustered { n, clusters, seed } => Self::Clustered {
                n: 4 * n,
                clusters,
                seed,
            },
        }
    }

    /// The same family drawn with another seed; grids are unchanged.
    pub fn reseeded(&self, seed: u64) -> Self {
        match *self {
            Self::Random { n, .. } => Self::Random { n, seed },
            Self::Clustered { n, clusters, .. } => Self::Clustered { n, clusters, seed },
            other => other,
        }
    }

    pub fn coordinates(&self) -> Vec<Vec<f64>> {
        match *self {
            Self::Grid1d { n } => (0..n).map(|i| vec![i as f64]).collect(),
            Self::Grid2d { side } => (0..side * side)
                .map(|i| vec![(i % side) as f64, (i / side) as f64])
                .collect(),
            Self::Random { n, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..n)
                    .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
                    .collect()
            }
            Self::Clustered { n, clusters, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let clusters = clusters.max(1);
                let centers: Vec<(f64, f64)> = (0..clusters)
                    .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
                    .collect();
                let spread = Normal::new(0.0, 0.05).expect("valid deviation");
                (0..n)
                    .map(|i| {
                        let (cx, cy) = centers[i % clusters];
                        vec![cx + spread.sample(&mut rng), cy + spread.sample(&mut rng)]
                    })
                    .collect()
            }
        }
    }
}

/// Point masses of generated spaces.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightScheme {
    /// Every point has mass 1.
    #[default]
    Uniform,
    /// Independent log-normal masses `exp(N(0, 0.5²))`.
    Lognormal { seed: u64 },
    /// `μ({x_i}) = (1 + i)^{−exponent}`.
    PowerLaw { exponent: f64 },
}

impl WeightScheme {
    pub fn weights(&self, n: usize) -> Vec<f64> {
        match *self {
            Self::Uniform => vec![1.0; n],
            Self::Lognormal { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let dist = LogNormal::new(0.0, 0.5).expect("valid parameters");
                (0..n).map(|_| dist.sample(&mut rng)).collect()
            }
            Self::PowerLaw { exponent } => (0..n)
                .map(|i| math::pow(1.0 + i as f64, -exponent))
                .collect(),
        }
    }
}

/// Builds a generated space with `λ(x, r) = c·rᵏ`, `k = dim_n`, and `c` the
/// tightest constant (times `1 + 1e−9`) with `μ(B(x,r)) ≤ λ(x,r)` at every
/// grid radius, the atom radius and six times the atom radius.
pub fn generate_space(family: &SpaceFamily, weights: &WeightScheme) -> Result<Space> {
    let n = family.point_count();
    if n == 0 {
        return Err(Error::EmptySpace);
    }
    let coords = family.coordinates();
    let distances = euclidean_distances(&coords)?;
    let w = weights.weights(n);
    let k = family.dimension();
    let probe = build_space(
        distances.clone(),
        w.clone(),
        DominatingSpec::Power { c: 1.0, k },
        Some(k),
    )?;
    let mut radii: Vec<f64> = probe.radius_grid().to_vec();
    radii.push(probe.atom_radius());
    radii.push(6.0 * probe.atom_radius());
    let mut c = 0.0f64;
    for x in 0..n {
        for &r in &radii {
            if r > 0.0 {
                c = c.max(probe.ball_measure(x, r) / math::pow(r, k));
            }
        }
    }
    build_space(
        distances,
        w,
        DominatingSpec::Power {
            c: c * (1.0 + 1e-9),
            k,
        },
        Some(k),
    )
}

/// `log(1 + d(x, x₀)/d_min)`, the standard RBMO symbol of the experiments.
pub fn log_distance_field(space: &Space, x0: usize) -> Result<FieldFunction> {
    space.check_point(x0)?;
    let dmin = if space.point_count() > 1 {
        space.min_distance()
    } else {
        1.0
    };
    FieldFunction::new(
        (0..space.point_count())
            .map(|x| math::ln(1.0 + space.distance(x, x0) / dmin))
            .collect(),
    )
}

/// Kinds of generated test functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestScheme {
    /// Indicator of point `j mod n` for the `j`-th function.
    Indicator,
    /// Indicator of a random ball.
    Ball,
    /// Independent random signs.
    Sign,
    /// `exp(−d(x, x₀))` around a random `x₀`.
    Decay,
    /// `log(1 + d(x, x₀)/d_min)` around a random `x₀`.
    LogDistance,
    /// Cycles through a random point indicator, ball, sign and decay.
    Mixed,
}

/// `count` deterministic test functions; with `mean_zero` each has its
/// `μ`-mean subtracted.
pub fn generate_test_functions(
    space: &Space,
    scheme: TestScheme,
    count: usize,
    seed: u64,
    mean_zero: bool,
) -> Result<Vec<FieldFunction>> {
    if count == 0 {
        return Err(Error::InvalidParameter {
            name: "count",
            value: 0.0,
            reason: "at least one test function is required",
        });
    }
    let n = space.point_count();
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let mut rng = rng_for(seed, j as u64);
        let values = match scheme {
            TestScheme::Indicator => indicator(n, j % n),
            TestScheme::Mixed => match j % 4 {
                0 => {
                    let x = rng.random_range(0..n);
                    indicator(n, x)
                }
                1 => ball_indicator(space, &mut rng),
                2 => signs(n, &mut rng),
                _ => decay(space, &mut rng),
            },
            TestScheme::Ball => ball_indicator(space, &mut rng),
            TestScheme::Sign => signs(n, &mut rng),
            TestScheme::Decay => decay(space, &mut rng),
            TestScheme::LogDistance => {
                let x0 = rng.random_range(0..n);
                log_distance_field(space, x0)?.into_vec()
            }
        };
        let f = FieldFunction::new(values)?;
        out.push(if mean_zero { subtract_mean(space, &f) } else { f });
    }
    Ok(out)
}

fn indicator(n: usize, x: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[x] = 1.0;
    v
}

fn ball_indicator(space: &Space, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = space.point_count();
    let c = rng.random_range(0..n);
    let r = space.sorted_distances(c)[rng.random_range(0..n)];
    let ball = Ball::new(space, c, r);
    (0..n).map(|x| if ball.contains(x) { 1.0 } else { 0.0 }).collect()
}

fn signs(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

fn decay(space: &Space, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let x0 = rng.random_range(0..space.point_count());
    (0..space.point_count())
        .map(|x| math::exp(-space.distance(x, x0)))
        .collect()
}

/// `f − (1/‖μ‖)·Σ f·μ`.
pub fn subtract_mean(space: &Space, f: &FieldFunction) -> FieldFunction {
    let s: f64 = f
        .values()
        .iter()
        .zip(space.weights())
        .map(|(v, w)| v * w)
        .sum();
    f.shifted(-(s / space.total_mass()))
}

fn default_epsilon() -> f64 {
    1.0
}

fn default_k() -> usize {
    1
}

/// Parameters of a bound experiment. The target exponent `q` is always
/// derived from `1/q = 1/p − α/n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub space: SpaceFamily,
    #[serde(default)]
    pub weights: WeightScheme,
    pub alpha: f64,
    pub p: f64,
    pub r: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_k")]
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn dim_n(&self) -> f64 {
        self.space.dimension()
    }

    /// `q` with `1/q = 1/p − α/n`.
    pub fn q(&self) -> f64 {
        1.0 / (1.0 / self.p - self.alpha / self.dim_n())
    }

    /// Checks `0 < α < n`, `1 < p < n/α`, `1 < r < p`, `0 < ε ≤ 1`,
    /// `1 ≤ k ≤ 4` and at least one trial.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim_n();
        let infeasible = |msg: String| Err(Error::ConfigInfeasible(msg));
        if !(self.alpha > 0.0 && self.alpha < n) {
            return infeasible(format!("alpha = {} must lie in (0, {n})", self.alpha));
        }
        if !(self.p > 1.0 && self.p * self.alpha < n) {
            return infeasible(format!(
                "p = {} must satisfy 1 < p < n/alpha = {}",
                self.p,
                n / self.alpha
            ));
        }
        if !(self.r > 1.0 && self.r < self.p) {
            return infeasible(format!("r = {} must satisfy 1 < r < p = {}", self.r, self.p));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return infeasible(format!("epsilon = {} must lie in (0, 1]", self.epsilon));
        }
        if !(1..=MAX_EXPERIMENT_ORDER).contains(&self.k) {
            return infeasible(format!("k = {} must lie in 1..={MAX_EXPERIMENT_ORDER}", self.k));
        }
        if self.trials == 0 {
            return infeasible("trials must be positive".into());
        }
        Ok(())
    }
}

/// Space, kernel and trial functions of one experiment.
struct Setup {
    space: Space,
    kernel: FractionalKernel,
    functions: Vec<FieldFunction>,
}

fn setup(config: &ExperimentConfig) -> Result<Setup> {
    config.validate()?;
    let space = generate_space(&config.space, &config.weights)?;
    let kernel = standard_kernel(&space, config.alpha, config.epsilon)?;
    let functions =
        generate_test_functions(&space, TestScheme::Mixed, config.trials, config.seed, false)?;
    Ok(Setup {
        space,
        kernel,
        functions,
    })
}

fn check_symbol_len(space: &Space, b: &FieldFunction) -> Result<()> {
    if b.len() != space.point_count() {
        return Err(Error::DimensionMismatch {
            what: "symbol",
            expected: space.point_count(),
            found: b.len(),
        });
    }
    Ok(())
}

/// Fits `max_j ‖T f_j‖_q / (scale·‖f_j‖_p)` over the trial functions. A
/// zero `f_j` records ratio 0 and counts as skipped.
fn fit_ratios(
    id: &str,
    config: &ExperimentConfig,
    s: &Setup,
    scale: f64,
    op: impl Fn(&FieldFunction) -> Result<FieldFunction>,
) -> Result<VerificationReport> {
    let q = config.q();
    let mut report = VerificationReport::new(id).with_seed(config.seed);
    let mut worst: ArgMax<(usize, usize)> = ArgMax::new();
    let mut skipped = 0usize;
    for (j, f) in s.functions.iter().enumerate() {
        let fp = lp_norm(&s.space, f, config.p)?;
        if fp == 0.0 {
            skipped += 1;
            report.ratios.push(0.0);
            continue;
        }
        let g = op(f)?;
        let ratio = lp_norm(&s.space, &g, q)? / (scale * fp);
        report.ratios.push(ratio);
        worst.offer(ratio, || (j, argmax_abs(&g)));
    }
    report.fitted_constant = worst.value;
    if let Some((trial, point)) = worst.witness {
        report.witness = Some(Witness {
            trial: Some(trial),
            point: Some(point),
            ..Witness::default()
        });
    }
    report.metric("points", s.space.point_count() as f64);
    report.metric("alpha", config.alpha);
    report.metric("p", config.p);
    report.metric("q", q);
    report.metric("symbol_norm", scale);
    report.metric("skipped", skipped as f64);
    if !worst.value.is_finite() {
        report.fail("fitted constant is not finite");
    }
    Ok(report)
}

fn argmax_abs(g: &FieldFunction) -> usize {
    let mut best = ArgMax::new();
    for (x, v) in g.values().iter().enumerate() {
        best.offer(math::abs(*v), || x);
    }
    best.witness.unwrap_or(0)
}

/// `‖I_α f‖_q ≤ C‖f‖_p`: fits `C` over the trial functions.
pub fn bound_experiment_i(config: &ExperimentConfig) -> Result<VerificationReport> {
    let s = setup(config)?;
    fit_ratios("bound-fractional-integral", config, &s, 1.0, |f| {
        apply_fractional_integral(&s.space, &s.kernel, f)
    })
}

/// `‖[b, I_α]f‖_q ≤ C‖b‖_*‖f‖_p`: fits `C` over the trial functions.
pub fn bound_experiment_commutator(
    config: &ExperimentConfig,
    b: &FieldFunction,
) -> Result<VerificationReport> {
    let s = setup(config)?;
    check_symbol_len(&s.space, b)?;
    let family = CanonicalFamily::build(&s.space)?;
    let norm = rbmo_norm_in(&s.space, &family, b, DEFAULT_RHO)?.norm_value;
    if norm == 0.0 {
        return Err(Error::ZeroRbmo { index: 0 });
    }
    fit_ratios("bound-commutator", config, &s, norm, |f| {
        commutator(&s.space, &s.kernel, b, f)
    })
}

/// `‖I_{α,b⃗} f‖_q ≤ C·Π‖b_i‖_*·‖f‖_p` for `1 ≤ k ≤ 4`. With one symbol
/// this is [`bound_experiment_commutator`].
pub fn bound_experiment_multilinear(
    config: &ExperimentConfig,
    b_vec: &[FieldFunction],
) -> Result<VerificationReport> {
    check_order(b_vec.len())?;
    if b_vec.len() == 1 {
        return bound_experiment_commutator(config, &b_vec[0]);
    }
    let s = setup(config)?;
    let family = CanonicalFamily::build(&s.space)?;
    let norms = symbol_norms(&s.space, &family, b_vec)?;
    let scale: f64 = norms.iter().product();
    let mut report = fit_ratios("bound-multilinear", config, &s, scale, |f| {
        multilinear_commutator(&s.space, &s.kernel, b_vec, f)
    })?;
    report.metric("k", b_vec.len() as f64);
    Ok(report)
}

fn check_order(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter {
            name: "k",
            value: 0.0,
            reason: "at least one symbol is required",
        });
    }
    if k > MAX_EXPERIMENT_ORDER {
        return Err(Error::KTooLarge {
            k,
            max: MAX_EXPERIMENT_ORDER,
        });
    }
    Ok(())
}

/// `‖b_i‖_*` for every symbol; a zero norm is [`Error::ZeroRbmo`].
fn symbol_norms(
    space: &Space,
    family: &CanonicalFamily,
    b_vec: &[FieldFunction],
) -> Result<Vec<f64>> {
    let mut norms = Vec::with_capacity(b_vec.len());
    for (index, b) in b_vec.iter().enumerate() {
        check_symbol_len(space, b)?;
        let v = rbmo_norm_in(space, family, b, DEFAULT_RHO)?.norm_value;
        if v == 0.0 {
            return Err(Error::ZeroRbmo { index });
        }
        norms.push(v);
    }
    Ok(norms)
}

/// Which sharp maximal domination to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domination {
    /// `M^{♯,(α)}(I_α f) ≤ C·M^{(α)}_{r,(5)} f`.
    FractionalIntegral,
    /// `M^{♯,(α)}([b,I_α]f) ≤ C‖b‖_*[M^{(α)}_{r,(5)}f + M_{r,(6)}(I_α f) + I_α(|f|)]`.
    Commutator,
    /// `M^{♯,(α)}(I_{α,b⃗}f) ≤ C‖b⃗‖_*{M_{r,(6)}(I_α f) + M^{(α)}_{r,(5)}f}
    ///  + C·Σ_{i=1}^{k−1} Σ_{σ∈C_i^k} ‖b⃗_σ‖_*·M_{r,(6)}(I_{α,b⃗_{σ′}} f)`.
    Multilinear,
}

impl Domination {
    pub fn label(&self) -> &'static str {
        match self {
            Self::FractionalIntegral => "fractional-integral",
            Self::Commutator => "commutator",
            Self::Multilinear => "multilinear",
        }
    }
}

/// Number of terms on the right side of the multilinear domination:
/// `2 + Σ_{i=1}^{k−1} binomial(k, i)`, counted by enumerating the subsets.
pub fn multilinear_rhs_terms(k: usize) -> Result<usize> {
    check_order(k)?;
    let mut terms = 2;
    for i in 1..k {
        terms += sigma_subsets(k, i)?.len();
    }
    Ok(terms)
}

/// Right side of the multilinear domination for one `f`, with the number
/// of terms it summed.
fn multilinear_rhs(
    space: &Space,
    family: &CanonicalFamily,
    kernel: &FractionalKernel,
    b_vec: &[FieldFunction],
    norms: &[f64],
    f: &FieldFunction,
    m5: &MaximalConfig,
    m6: &MaximalConfig,
) -> Result<(FieldFunction, usize)> {
    let k = b_vec.len();
    let total: f64 = norms.iter().product();
    let i_f = apply_fractional_integral(space, kernel, f)?;
    let mut rhs = fractional_maximal_in(space, family, &i_f, m6)?
        .axpy(1.0, &fractional_maximal_in(space, family, f, m5)?)
        .scaled(total);
    let mut terms = 2;
    for i in 1..k {
        for s in sigma_subsets(k, i)? {
            let weight: f64 = s.sigma.iter().map(|&j| norms[j - 1]).product();
            let sub: Vec<FieldFunction> = s.pick_complement(b_vec).into_iter().cloned().collect();
            let g = multilinear_commutator(space, kernel, &sub, f)?;
            rhs = fractional_maximal_in(space, family, &g, m6)?.axpy(weight, &rhs);
            terms += 1;
        }
    }
    Ok((rhs, terms))
}

/// Pointwise sharp maximal domination over all trial functions.
///
/// Reports the largest `LHS/RHS` over points with `RHS > 0` as the fitted
/// constant, with per-trial maxima as ratios. A point with `RHS = 0` and
/// `LHS > 0` is [`Error::DominationDegenerate`].
pub fn pointwise_domination_check(
    config: &ExperimentConfig,
    variant: Domination,
    b_vec: &[FieldFunction],
) -> Result<VerificationReport> {
    let s = setup(config)?;
    let space = &s.space;
    let kernel = &s.kernel;
    match variant {
        Domination::FractionalIntegral => {}
        Domination::Commutator if b_vec.len() != 1 => {
            return Err(Error::InvalidParameter {
                name: "k",
                value: b_vec.len() as f64,
                reason: "the commutator domination takes exactly one symbol",
            })
        }
        _ => check_order(b_vec.len())?,
    }
    let family = CanonicalFamily::build(space)?;
    let norms = if variant == Domination::FractionalIntegral {
        Vec::new()
    } else {
        symbol_norms(space, &family, b_vec)?
    };
    let alpha = config.alpha;
    let m5 = MaximalConfig::new(space, config.r, 5.0, alpha)?;
    let m6 = MaximalConfig::new(space, config.r, 6.0, 0.0)?;

    let mut lhs_inputs = Vec::with_capacity(s.functions.len());
    for f in &s.functions {
        lhs_inputs.push(match variant {
            Domination::FractionalIntegral => apply_fractional_integral(space, kernel, f)?,
            Domination::Commutator => commutator(space, kernel, &b_vec[0], f)?,
            Domination::Multilinear => multilinear_commutator(space, kernel, b_vec, f)?,
        });
    }
    let mut lhs = Vec::with_capacity(lhs_inputs.len());
    for chunk in lhs_inputs.chunks(32) {
        for parts in sharp_maximal_batch_in(space, &family, chunk, alpha)? {
            lhs.push(parts.oscillation.axpy(1.0, &parts.pair));
        }
    }

    let mut report = VerificationReport::new(format!("domination-{}", variant.label()))
        .with_seed(config.seed);
    let mut worst: ArgMax<(usize, usize)> = ArgMax::new();
    let mut degenerate = 0usize;
    let mut terms = 0usize;
    for (j, f) in s.functions.iter().enumerate() {
        let rhs = match variant {
            Domination::FractionalIntegral => {
                terms = 1;
                fractional_maximal_in(space, &family, f, &m5)?
            }
            Domination::Commutator => {
                terms = 3;
                let i_f = apply_fractional_integral(space, kernel, f)?;
                let i_abs = apply_fractional_integral(space, kernel, &f.abs())?;
                fractional_maximal_in(space, &family, f, &m5)?
                    .axpy(1.0, &fractional_maximal_in(space, &family, &i_f, &m6)?)
                    .axpy(1.0, &i_abs)
                    .scaled(norms[0])
            }
            Domination::Multilinear => {
                let (rhs, t) =
                    multilinear_rhs(space, &family, kernel, b_vec, &norms, f, &m5, &m6)?;
                terms = t;
                rhs
            }
        };
        let mut trial_max: f64 = 0.0;
        for x in 0..space.point_count() {
            let (l, r) = (lhs[j][x], rhs[x]);
            if r == 0.0 {
                if l > 0.0 {
                    return Err(Error::DominationDegenerate {
                        point: x,
                        trial: j,
                        lhs: l,
                    });
                }
                degenerate += 1;
                continue;
            }
            let ratio = l / r;
            trial_max = trial_max.max(ratio);
            worst.offer(ratio, || (j, x));
        }
        report.ratios.push(trial_max);
    }
    report.fitted_constant = worst.value;
    if let Some((trial, point)) = worst.witness {
        report.witness = Some(Witness {
            trial: Some(trial),
            point: Some(point),
            ..Witness::default()
        });
    }
    report.metric("rhs_terms", terms as f64);
    report.metric("degenerate_points", degenerate as f64);
    report.metric("r", config.r);
    if !worst.value.is_finite() {
        report.fail("fitted constant is not finite");
    }
    Ok(report)
}

/// Properties of `K^(β)` over concentric chains `B ⊆ Q ⊆ R`, for
/// `β ∈ {0, n/2}`.
///
/// Asserted exactly (up to [`EXACT_SLACK`]):
/// * `K_{B,Q} ≤ K_{B,R}` and `K_{B,Q} ≤ 1 + N_{B,Q}` on all chains;
/// * `K_{Q,R} ≤ K_{B,R}` on 6-adic chains `Q = 6ⁱB`, `R = 6ʲB`, where it
///   is an index shift of the same sum;
/// * `K_{B,Q} ≤ 3` when `r_Q ≤ 36·r_B`.
///
/// Fitted: the quasi-triangle constant `K_{B,R}/(K_{B,Q} + K_{Q,R})` (the
/// reported constant); `K_{Q,R}/K_{B,R}` over all chains as
/// `inner_monotonicity`, which may exceed 1 off the 6-adic chains;
/// `comparable_bound`; and `K_{B,6ᴺB}` with `6B, …, 6^{N−1}B` not doubling
/// as `non_doubling_bound`.
pub fn k_properties_suite(space: &Space) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("k-properties");
    let gens = distinct_ball_generators(space);
    let n_points = space.point_count();
    let beta0 = space.beta0();
    let mut triangle: ArgMax<(usize, f64, f64, f64)> = ArgMax::new();
    let mut inner = 0.0f64;
    let mut comparable = 0.0f64;
    let mut non_doubling = 0.0f64;
    let mut violations = 0usize;
    let mut chains = 0usize;
    let mut adic_chains = 0usize;
    let mut first_violation: Option<(usize, f64, f64)> = None;
    let mut violate = |c: usize, rb: f64, rq: f64, count: &mut usize| {
        *count += 1;
        first_violation.get_or_insert((c, rb, rq));
    };
    let k_table = |c: usize, r: f64, top: f64, exponent: f64| -> Result<Vec<f64>> {
        let max_n = n_bq(r, top)?;
        let mut t = Vec::with_capacity(max_n as usize + 1);
        let mut acc = 1.0;
        t.push(acc);
        for k in 1..=max_n {
            acc += math::pow(shell_ratio(space, c, r, k)?, exponent);
            t.push(acc);
        }
        Ok(t)
    };
    for beta in [0.0, 0.5 * space.dim_n()] {
        let exponent = 1.0 - beta / space.dim_n();
        for c in 0..n_points {
            let radii: Vec<f64> = gens.iter().filter(|g| g.0 == c).map(|g| g.1).collect();
            let m = radii.len();
            let top = radii[m - 1];
            // tables[i][N]: K^(β) for inner radius radii[i] and N_{B,Q} = N.
            let tables: Vec<Vec<f64>> = radii
                .iter()
                .map(|&r| k_table(c, r, top, exponent))
                .collect::<Result<_>>()?;
            let mut kk = vec![0.0f64; m * m];
            let mut nn = vec![0u32; m * m];
            for i in 0..m {
                for j in i..m {
                    let n = n_bq(radii[i], radii[j])?;
                    nn[i * m + j] = n;
                    kk[i * m + j] = tables[i][n as usize];
                }
            }
            for i in 0..m {
                for j in i..m {
                    let kbq = kk[i * m + j];
                    let n = nn[i * m + j];
                    if kbq > (1.0 + f64::from(n)) * (1.0 + EXACT_SLACK) {
                        violate(c, radii[i], radii[j], &mut violations);
                    }
                    if radii[j] <= 36.0 * radii[i] * (1.0 + EXACT_SLACK) {
                        comparable = comparable.max(kbq);
                    }
                    for l in j..m {
                        chains += 1;
                        let kbr = kk[i * m + l];
                        let kqr = kk[j * m + l];
                        if kbq > kbr {
                            violate(c, radii[i], radii[l], &mut violations);
                        }
                        inner = inner.max(kqr / kbr);
                        triangle.offer(kbr / (kbq + kqr), || (c, radii[i], radii[j], radii[l]));
                    }
                }
            }

            // 6-adic chains, with each K recomputed from its own inner ball.
            for (i, &r) in radii.iter().enumerate() {
                let steps = tables[i].len() - 1;
                for a in 0..=steps {
                    let rq = six_pow(a as u32) * r;
                    let kq = k_table(c, rq, six_pow(steps as u32) * r, exponent)?;
                    for b in a..=steps {
                        adic_chains += 1;
                        let kqr = kq[b - a];
                        let kbr = tables[i][b];
                        if kqr > kbr * (1.0 + EXACT_SLACK) || tables[i][a] > kbr {
                            violate(c, rq, six_pow(b as u32) * r, &mut violations);
                        }
                    }
                }
                // K_{B,6ᴺB} with 6B, …, 6^{N−1}B not doubling.
                let mut nd = 1usize;
                while nd < steps {
                    let rr = six_pow(nd as u32) * r;
                    if space.ball_measure(c, 6.0 * rr) <= beta0 * space.ball_measure(c, rr) {
                        break;
                    }
                    nd += 1;
                }
                if steps >= 1 {
                    non_doubling = non_doubling.max(tables[i][nd.min(steps)]);
                }
            }
        }
    }
    report.fitted_constant = triangle.value;
    report.metric("chains", chains as f64);
    report.metric("adic_chains", adic_chains as f64);
    report.metric("violations", violations as f64);
    report.metric("inner_monotonicity", inner);
    report.metric("comparable_bound", comparable);
    report.metric("non_doubling_bound", non_doubling);
    if let Some((c, rb, rq)) = first_violation {
        report.witness = Some(Witness {
            ball: Some((&Ball::new(space, c, rb)).into()),
            other_ball: Some((&Ball::new(space, c, rq)).into()),
            ..Witness::default()
        });
        report.fail(format!("{violations} exact K property violations"));
    } else if let Some((c, rb, _, rr)) = triangle.witness {
        report.witness = Some(Witness {
            ball: Some((&Ball::new(space, c, rb)).into()),
            other_ball: Some((&Ball::new(space, c, rr)).into()),
            ..Witness::default()
        });
    }
    if comparable > 3.0 * (1.0 + EXACT_SLACK) {
        report.fail("K exceeds 1 + N for comparable balls");
    }
    Ok(report)
}

/// Largest `max(0, lhs − rhs)` relative to `1 + |rhs|`.
fn excess(lhs: f64, rhs: f64) -> f64 {
    (lhs - rhs).max(0.0) / (1.0 + math::abs(rhs))
}

fn exact_report(id: &str, seed: u64, worst: ArgMax<usize>, what: &str) -> VerificationReport {
    let mut report = VerificationReport::new(id).with_seed(seed);
    report.fitted_constant = worst.value;
    if worst.value > EXACT_SLACK {
        report.witness = worst.witness.map(|x| Witness {
            point: Some(x),
            ..Witness::default()
        });
        report.fail(format!("{what}: discrepancy {:e}", worst.value));
    }
    report
}

/// The exact property suite on one generated space. Each property is one
/// report; all pass up to a relative slack of [`EXACT_SLACK`].
pub fn exact_suite(
    family_spec: &SpaceFamily,
    weights: &WeightScheme,
    seed: u64,
) -> Result<Vec<VerificationReport>> {
    let space = generate_space(family_spec, weights)?;
    let family = CanonicalFamily::build(&space)?;
    let n = space.point_count();
    let dim = space.dim_n();
    let alpha = 0.4 * dim;
    let kernel = standard_kernel(&space, alpha, 1.0)?;
    let fs = generate_test_functions(&space, TestScheme::Mixed, 12, seed, false)?;
    let bs = generate_test_functions(&space, TestScheme::LogDistance, 4, seed ^ 0xb5, false)?;
    let mut rng = rng_for(seed, u64::MAX);
    let mut out = Vec::new();

    out.push(check_metric(&space, seed));
    out.push(check_upper_doubling(&space));

    // |f| ≤ N f.
    let mut worst = ArgMax::new();
    for f in &fs {
        let nf = doubling_maximal_in(&space, &family, f)?;
        for x in 0..n {
            worst.offer(excess(math::abs(f[x]), nf[x]), || x);
        }
    }
    out.push(exact_report("doubling-maximal-dominates", seed, worst, "|f| > Nf"));

    // M_r ≤ M_s for r < s.
    let mut worst = ArgMax::new();
    for beta in [0.0, 0.25 * dim] {
        let rs: Vec<f64> = [1.0, 1.5, 2.0, 3.0]
            .into_iter()
            .filter(|r| beta == 0.0 || r * beta < dim)
            .collect();
        for f in &fs {
            let mut prev: Option<FieldFunction> = None;
            for &r in &rs {
                let cfg = MaximalConfig::new(&space, r, 5.0, beta)?;
                let m = fractional_maximal_in(&space, &family, f, &cfg)?;
                if let Some(p) = &prev {
                    for x in 0..n {
                        worst.offer(excess(p[x], m[x]), || x);
                    }
                }
                prev = Some(m);
            }
        }
    }
    out.push(exact_report("fractional-maximal-monotone-in-r", seed, worst, "M_r > M_s"));

    out.push(k_properties_suite(&space)?.with_seed(seed));
    out.push(covering_check(&space, &family, seed)?);

    // [c, I_α] f = 0.
    let mut worst = ArgMax::new();
    for (j, f) in fs.iter().enumerate() {
        let c = 1.0 + j as f64 * 0.75;
        let g = commutator(&space, &kernel, &FieldFunction::constant(n, c), f)?;
        let scale = 1.0 + c * apply_fractional_integral(&space, &kernel, &f.abs())?.max_abs();
        for x in 0..n {
            worst.offer(math::abs(g[x]) / scale, || x);
        }
    }
    out.push(exact_report("commutator-constant-symbol", seed, worst, "[c, I] f ≠ 0"));

    // Closed form against the nested recursion, k ≤ 4.
    let mut worst = ArgMax::new();
    for k in 1..=MAX_EXPERIMENT_ORDER {
        for f in fs.iter().take(4) {
            let closed = multilinear_commutator(&space, &kernel, &bs[..k], f)?;
            let nested = nested_commutator(&space, &kernel, &bs[..k], f)?;
            let scale = 1.0 + closed.max_abs().max(nested.max_abs());
            for x in 0..n {
                worst.offer(math::abs(closed[x] - nested[x]) / scale, || x);
            }
        }
    }
    out.push(exact_report("multilinear-closed-form", seed, worst, "closed ≠ nested"));

    // Product expansion with k = 3 on sampled (y, z) and B̃.
    let pairs: Vec<(usize, usize)> = (0..64)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
        .collect();
    let tildes: Vec<Ball> = (0..8)
        .map(|_| {
            let b = family.ball(rng.random_range(0..family.len()));
            smallest_doubling_dilate(&space, b).1
        })
        .collect();
    let mut expansion = verify_product_expansion(&space, &bs[..3], &pairs, &tildes)?;
    expansion.seed = Some(seed);
    out.push(expansion);

    // RBMO shift and scale invariance.
    let mut worst = ArgMax::new();
    for (j, b) in bs.iter().enumerate() {
        let base = rbmo_norm_in(&space, &family, b, DEFAULT_RHO)?.norm_value;
        let shifted = rbmo_norm_in(&space, &family, &b.shifted(3.5), DEFAULT_RHO)?.norm_value;
        let scaled = rbmo_norm_in(&space, &family, &b.scaled(-2.5), DEFAULT_RHO)?.norm_value;
        worst.offer(math::abs(shifted - base) / (1.0 + base), || j);
        worst.offer(math::abs(scaled - 2.5 * base) / (1.0 + 2.5 * base), || j);
    }
    let mut rbmo = exact_report("rbmo-shift-scale", seed, worst, "RBMO norm not invariant");
    rbmo.witness = None;
    out.push(rbmo);

    // Sharp maximal shift invariance.
    let mut worst = ArgMax::new();
    for f in fs.iter().take(6) {
        let a = sharp_maximal_in(&space, &family, f, 0.0)?;
        let b = sharp_maximal_in(&space, &family, &f.shifted(-1.75), 0.0)?;
        let scale = 1.0 + f.max_abs();
        for x in 0..n {
            worst.offer(math::abs(a[x] - b[x]) / scale, || x);
        }
    }
    out.push(exact_report("sharp-maximal-shift", seed, worst, "sharp maximal not shift invariant"));

    // Regenerating with the same seed reproduces every input.
    let again = generate_test_functions(&space, TestScheme::Mixed, 12, seed, false)?;
    let family_again = CanonicalFamily::build(&generate_space(family_spec, weights)?)?;
    let same_family = family_again.len() == family.len()
        && family
            .balls()
            .iter()
            .zip(family_again.balls())
            .all(|(a, b)| a.members() == b.members() && a.radius() == b.radius());
    let mut det = VerificationReport::new("seed-determinism").with_seed(seed);
    if again != fs || !same_family {
        det.fail("regenerated inputs differ");
    }
    out.push(det);
    Ok(out)
}

/// Greedy disjoint selection from one random family ball per point:
/// checks disjointness and that every selected member lies in some
/// `5B` of the kept balls.
pub fn covering_check(
    space: &Space,
    family: &CanonicalFamily,
    seed: u64,
) -> Result<VerificationReport> {
    let mut rng = rng_for(seed, u64::MAX - 1);
    let balls: Vec<Ball> = (0..space.point_count())
        .map(|x| {
            let list = family.containing(x);
            family.ball(list[rng.random_range(0..list.len())] as usize).clone()
        })
        .collect();
    let kept = greedy_disjoint_cover(space, &balls, 5.0)?;
    let mut report = VerificationReport::new("covering").with_seed(seed);
    report.metric("candidates", balls.len() as f64);
    report.metric("kept", kept.len() as f64);
    for (i, a) in kept.iter().enumerate() {
        for b in &kept[i + 1..] {
            if !a.is_disjoint_from(b) {
                report.witness = Some(Witness {
                    ball: Some(a.into()),
                    other_ball: Some(b.into()),
                    ..Witness::default()
                });
                report.fail("selected balls overlap");
                return Ok(report);
            }
        }
    }
    let dilated: Vec<Ball> = kept
        .iter()
        .map(|b| Ball::new(space, b.center(), 5.0 * b.radius()))
        .collect();
    for ball in &balls {
        for x in ball.member_indices() {
            if !dilated.iter().any(|d| d.contains(x)) {
                report.witness = Some(Witness {
                    point: Some(x),
                    ..Witness::default()
                });
                report.fail("a member escapes every 5B");
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// `max/min` of positive values; infinite when some value is not positive.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if values.is_empty() || !(min > 0.0) || !max.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Passes iff the fitted constants agree within `factor`.
pub fn stability_report(id: &str, fitted: &[f64], factor: f64) -> VerificationReport {
    let mut report = VerificationReport::new(id);
    let s = spread(fitted);
    report.ratios = fitted.to_vec();
    report.fitted_constant = s;
    report.metric("factor", factor);
    if !(s <= factor) {
        report.fail(format!("fitted constants spread by {s:.4} > {factor}"));
    }
    report
}

/// Smallest `C` in the weak-type estimate over `count` mixed test
/// functions, each at 16 levels `max(Mf)·100^{−j/15}`.
pub fn weak_type_suite(
    space: &Space,
    family: &CanonicalFamily,
    config: &MaximalConfig,
    count: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let fs = generate_test_functions(space, TestScheme::Mixed, count, seed, false)?;
    let mut report = VerificationReport::new("weak-type-suite").with_seed(seed);
    let mut worst: ArgMax<usize> = ArgMax::new();
    for (j, f) in fs.iter().enumerate() {
        let top = fractional_maximal_in(space, family, f, config)?.max_abs();
        if top == 0.0 {
            report.ratios.push(0.0);
            continue;
        }
        let levels: Vec<f64> = (0..16)
            .map(|i| top * math::pow(100.0, -(i as f64) / 15.0))
            .collect();
        let r = weak_type_check_in(space, family, f, config, &levels)?;
        report.ratios.push(r.fitted_constant);
        worst.offer(r.fitted_constant, || j);
    }
    report.fitted_constant = worst.value;
    report.witness = worst.witness.map(|j| Witness {
        trial: Some(j),
        ..Witness::default()
    });
    report.metric("q", config.weak_exponent(space));
    if !worst.value.is_finite() {
        report.fail("weak-type constant is not finite");
    }
    Ok(report)
}

/// `‖M^{(β)}_{r,(η)} f‖_q / ‖f‖_p` with `1/q = 1/p − β/n`, `r < p < n/β`;
/// with `β = 0` this is the `Lᵖ` bound of `M_{r,(η)}` for `p > r`.
pub fn strong_type_suite(
    space: &Space,
    family: &CanonicalFamily,
    config: &MaximalConfig,
    p: f64,
    count: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let n = space.dim_n();
    if !(p > config.r && p * config.beta < n) {
        return Err(Error::ConfigInfeasible(format!(
            "p = {p} must satisfy r < p < n/beta"
        )));
    }
    let q = 1.0 / (1.0 / p - config.beta / n);
    let fs = generate_test_functions(space, TestScheme::Mixed, count, seed, false)?;
    let mut report = VerificationReport::new("strong-type-suite").with_seed(seed);
    let mut worst: ArgMax<usize> = ArgMax::new();
    for (j, f) in fs.iter().enumerate() {
        let fp = lp_norm(space, f, p)?;
        if fp == 0.0 {
            report.ratios.push(0.0);
            continue;
        }
        let m = fractional_maximal_in(space, family, f, config)?;
        let ratio = lp_norm(space, &m, q)? / fp;
        report.ratios.push(ratio);
        worst.offer(ratio, || j);
    }
    report.fitted_constant = worst.value;
    report.witness = worst.witness.map(|j| Witness {
        trial: Some(j),
        ..Witness::default()
    });
    report.metric("p", p);
    report.metric("q", q);
    if !worst.value.is_finite() {
        report.fail("strong-type constant is not finite");
    }
    Ok(report)
}

/// `‖N f‖_p / ‖M^{♯,(β)} f‖_p` over mean-zero mixed test functions.
pub fn sharp_control_suite(
    space: &Space,
    family: &CanonicalFamily,
    beta: f64,
    p: f64,
    count: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let fs = generate_test_functions(space, TestScheme::Mixed, count, seed, true)?;
    let parts = sharp_maximal_batch_in(space, family, &fs, beta)?;
    let mut report = VerificationReport::new("sharp-controls-doubling-maximal").with_seed(seed);
    let mut worst: ArgMax<usize> = ArgMax::new();
    for (j, (f, part)) in fs.iter().zip(&parts).enumerate() {
        let sharp = part.oscillation.axpy(1.0, &part.pair);
        let denom = lp_norm(space, &sharp, p)?;
        if denom == 0.0 {
            if f.max_abs() > 0.0 {
                report.fail("sharp maximal vanishes on a nonzero mean-zero function");
            }
            report.ratios.push(0.0);
            continue;
        }
        let ratio = lp_norm(space, &doubling_maximal_in(space, family, f)?, p)? / denom;
        report.ratios.push(ratio);
        worst.offer(ratio, || j);
    }
    report.fitted_constant = worst.value;
    report.witness = worst.witness.map(|j| Witness {
        trial: Some(j),
        ..Witness::default()
    });
    report.metric("beta", beta);
    report.metric("p", p);
    if !worst.value.is_finite() {
        report.fail("sharp control constant is not finite");
    }
    Ok(report)
}

/// Telescoping, John–Nirenberg (`p ∈ {1, 2, 4}`) and `ρ`-dependence
/// (`max/min` of the norm over `ρ ∈ {2, 6, 10}`) over the given symbols.
/// Each report's fitted constant is the maximum over symbols. The same
/// spread of the oscillation term alone is the metric `oscillation_spread`.
pub fn rbmo_suite(
    space: &Space,
    family: &CanonicalFamily,
    symbols: &[FieldFunction],
    seed: u64,
) -> Result<Vec<VerificationReport>> {
    let mut tele = VerificationReport::new("rbmo-telescoping-suite").with_seed(seed);
    let mut jn = VerificationReport::new("rbmo-john-nirenberg-suite").with_seed(seed);
    let mut rho = VerificationReport::new("rbmo-rho-dependence").with_seed(seed);
    let mut median = 0.0f64;
    let mut osc_spread = 1.0f64;
    for b in symbols {
        let t = telescoping_check_in(space, family, b)?;
        tele.ratios.push(t.fitted_constant);
        tele.fitted_constant = tele.fitted_constant.max(t.fitted_constant);
        median = median.max(t.get_metric("median_fitted").unwrap_or(0.0));
        let j = john_nirenberg_check_in(space, family, b, &[1.0, 2.0, 4.0])?;
        jn.ratios.push(j.fitted_constant);
        jn.fitted_constant = jn.fitted_constant.max(j.fitted_constant);
        let estimates: Vec<_> = [2.0, 6.0, 10.0]
            .into_iter()
            .map(|r| rbmo_norm_in(space, family, b, r))
            .collect::<Result<_>>()?;
        let norms: Vec<f64> = estimates.iter().map(|e| e.norm_value).collect();
        let osc: Vec<f64> = estimates.iter().map(|e| e.oscillation_term).collect();
        if osc.iter().any(|&v| v > 0.0) {
            osc_spread = osc_spread.max(spread(&osc));
        }
        let s = if norms.iter().all(|&v| v == 0.0) {
            1.0
        } else {
            spread(&norms)
        };
        rho.ratios.push(s);
        rho.fitted_constant = rho.fitted_constant.max(s);
    }
    tele.metric("median_fitted", median);
    rho.metric("oscillation_spread", osc_spread);
    let mut out = vec![tele, jn, rho];
    for r in &mut out {
        if !r.fitted_constant.is_finite() {
            r.fail("fitted constant is not finite");
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn config(space: SpaceFamily) -> ExperimentConfig {
        ExperimentConfig {
            space,
            weights: WeightScheme::Uniform,
            alpha: 0.4,
            p: 2.0,
            r: 1.5,
            epsilon: 1.0,
            k: 1,
            trials: 6,
            seed: 3,
        }
    }

    #[test]
    fn space_family_parsing() {
        assert_eq!(SpaceFamily::parse("grid1d:16"), Some(SpaceFamily::Grid1d { n: 16 }));
        assert_eq!(SpaceFamily::parse("grid2d:8").unwrap().point_count(), 64);
        assert_eq!(
            SpaceFamily::parse("random:64:7"),
            Some(SpaceFamily::Random { n: 64, seed: 7 })
        );
        assert_eq!(SpaceFamily::parse("clustered:40:4:2").unwrap().label(), "clustered:40:4:2");
        for bad in ["grid1d", "grid1d:0", "grid3d:4", "random:64", "grid1d:x", ""] {
            assert_eq!(SpaceFamily::parse(bad), None, "{bad}");
        }
        assert_eq!(SpaceFamily::Grid1d { n: 64 }.refined(), SpaceFamily::Grid1d { n: 256 });
        assert_eq!(SpaceFamily::Grid2d { side: 4 }.refined().point_count(), 64);
    }

    #[test]
    fn generated_spaces_are_upper_doubling() {
        for fam in ["grid1d:20", "grid2d:5", "random:30:1", "clustered:30:3:1"] {
            for w in [
                WeightScheme::Uniform,
                WeightScheme::Lognormal { seed: 2 },
                WeightScheme::PowerLaw { exponent: 0.5 },
            ] {
                let s = generate_space(&SpaceFamily::parse(fam).unwrap(), &w).unwrap();
                assert!(check_upper_doubling(&s).pass, "{fam} {w:?}");
                assert!(s.ball_measure(0, s.atom_radius()) <= s.lambda(0, s.atom_radius()));
            }
        }
    }

    #[test]
    fn test_function_contracts() {
        let s = generate_space(&SpaceFamily::Grid1d { n: 8 }, &WeightScheme::Uniform).unwrap();
        let basis = generate_test_functions(&s, TestScheme::Indicator, 8, 0, false).unwrap();
        for (j, f) in basis.iter().enumerate() {
            for x in 0..8 {
                assert_eq!(f[x], if x == j { 1.0 } else { 0.0 });
            }
        }
        let zero = subtract_mean(&s, &FieldFunction::constant(8, 1.0));
        assert_eq!(zero.max_abs(), 0.0);
        for scheme in [
            TestScheme::Ball,
            TestScheme::Sign,
            TestScheme::Decay,
            TestScheme::LogDistance,
            TestScheme::Mixed,
        ] {
            let a = generate_test_functions(&s, scheme, 5, 11, true).unwrap();
            let b = generate_test_functions(&s, scheme, 5, 11, true).unwrap();
            assert_eq!(a, b);
            for f in &a {
                let mean: f64 = f.values().iter().sum::<f64>() / 8.0;
                assert!(mean.abs() < 1e-12);
            }
        }
        assert!(generate_test_functions(&s, TestScheme::Sign, 0, 0, false).is_err());
        assert_ne!(trial_seed(1, 0), trial_seed(1, 1));
        assert_ne!(trial_seed(1, 0), trial_seed(2, 0));
    }

    #[test]
    fn config_validation_and_q() {
        let c = config(SpaceFamily::Grid1d { n: 16 });
        assert!(c.validate().is_ok());
        assert!((1.0 / c.q() - (0.5 - 0.4)).abs() < 1e-15);
        let mut bad = c.clone();
        bad.p = 2.5;
        assert!(matches!(bad.validate(), Err(Error::ConfigInfeasible(_))));
        assert!(matches!(bound_experiment_i(&bad), Err(Error::ConfigInfeasible(_))));
        let mut bad = c.clone();
        bad.r = 2.0;
        assert!(bad.validate().is_err());
        let mut bad = c.clone();
        bad.k = 5;
        assert!(bad.validate().is_err());
        let mut bad = c;
        bad.alpha = 1.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn bound_experiments_basic() {
        let c = config(SpaceFamily::Grid1d { n: 16 });
        let a = bound_experiment_i(&c).unwrap();
        let b = bound_experiment_i(&c).unwrap();
        assert_eq!(a, b);
        assert!(a.pass && a.fitted_constant > 0.0);
        assert_eq!(a.ratios.len(), 6);

        let s = generate_space(&c.space, &c.weights).unwrap();
        let sym = log_distance_field(&s, 0).unwrap();
        assert_eq!(
            bound_experiment_commutator(&c, &FieldFunction::constant(16, 1.0)),
            Err(Error::ZeroRbmo { index: 0 })
        );
        let one = bound_experiment_commutator(&c, &sym).unwrap();
        assert_eq!(bound_experiment_multilinear(&c, &[sym.clone()]).unwrap(), one);
        let twice = bound_experiment_commutator(&c, &sym.scaled(2.0)).unwrap();
        assert_eq!(twice.ratios, one.ratios);
        assert_eq!(
            bound_experiment_multilinear(&c, &[sym.clone(), FieldFunction::constant(16, 2.0)]),
            Err(Error::ZeroRbmo { index: 1 })
        );
        assert!(matches!(
            bound_experiment_multilinear(&c, &vec![sym; 5]),
            Err(Error::KTooLarge { .. })
        ));
    }

    #[test]
    fn rhs_term_counts() {
        assert_eq!(multilinear_rhs_terms(1).unwrap(), 2);
        assert_eq!(multilinear_rhs_terms(2).unwrap(), 4);
        assert_eq!(multilinear_rhs_terms(3).unwrap(), 8);
        assert_eq!(multilinear_rhs_terms(4).unwrap(), 16);
        assert!(multilinear_rhs_terms(0).is_err());
    }

    #[test]
    fn dominations_run_on_a_small_grid() {
        let mut c = config(SpaceFamily::Grid1d { n: 16 });
        c.p = 2.25;
        c.r = 2.0;
        let s = generate_space(&c.space, &c.weights).unwrap();
        let b1 = log_distance_field(&s, 0).unwrap();
        let b2 = log_distance_field(&s, 15).unwrap();
        let fi = pointwise_domination_check(&c, Domination::FractionalIntegral, &[]).unwrap();
        assert!(fi.pass && fi.fitted_constant > 0.0);
        let cm = pointwise_domination_check(&c, Domination::Commutator, &[b1.clone()]).unwrap();
        assert_eq!(cm.get_metric("rhs_terms"), Some(3.0));
        let ml = pointwise_domination_check(&c, Domination::Multilinear, &[b1.clone(), b2]).unwrap();
        assert_eq!(ml.get_metric("rhs_terms"), Some(4.0));
        assert!(pointwise_domination_check(&c, Domination::Commutator, &[]).is_err());
    }

    #[test]
    fn k_properties_on_small_spaces() {
        for fam in ["grid1d:12", "random:24:3"] {
            let s = generate_space(&SpaceFamily::parse(fam).unwrap(), &WeightScheme::Lognormal { seed: 1 })
                .unwrap();
            let r = k_properties_suite(&s).unwrap();
            assert!(r.pass, "{fam}: {r:?}");
            assert_eq!(r.get_metric("violations"), Some(0.0));
            assert!(r.get_metric("comparable_bound").unwrap() <= 3.0);
            assert!(r.fitted_constant > 0.0 && r.fitted_constant <= 1.0);
        }
    }

    #[test]
    fn exact_suite_passes_and_is_deterministic() {
        let fam = SpaceFamily::Grid2d { side: 4 };
        let a = exact_suite(&fam, &WeightScheme::Lognormal { seed: 5 }, 9).unwrap();
        for r in &a {
            assert!(r.pass, "{r:?}");
        }
        assert_eq!(a.len(), 12);
        assert_eq!(a, exact_suite(&fam, &WeightScheme::Lognormal { seed: 5 }, 9).unwrap());
    }

    #[test]
    fn suites_on_a_small_random_space() {
        let s = generate_space(&SpaceFamily::Random { n: 32, seed: 1 }, &WeightScheme::Uniform).unwrap();
        let fam = CanonicalFamily::build(&s).unwrap();
        let cfg = MaximalConfig::new(&s, 1.5, 5.0, 0.5).unwrap();
        assert!(weak_type_suite(&s, &fam, &cfg, 4, 0).unwrap().pass);
        assert!(strong_type_suite(&s, &fam, &cfg, 2.0, 4, 0).unwrap().pass);
        assert!(strong_type_suite(&s, &fam, &cfg, 1.2, 4, 0).is_err());
        assert!(sharp_control_suite(&s, &fam, 0.0, 2.0, 4, 0).unwrap().pass);
        let syms = vec![log_distance_field(&s, 0).unwrap(), FieldFunction::constant(32, 1.0)];
        let r = rbmo_suite(&s, &fam, &syms, 0).unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|x| x.pass));
        assert_eq!(r[2].ratios[1], 1.0);
    }

    #[test]
    fn stability_helpers() {
        assert_eq!(spread(&[1.0, 2.0, 1.5]), 2.0);
        assert_eq!(spread(&[0.0, 1.0]), f64::INFINITY);
        assert!(stability_report("x", &[1.0, 1.9], 2.0).pass);
        assert!(!stability_report("x", &[1.0, 2.1], 2.0).pass);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn bound_ratio_is_scale_invariant(seed in 0u64..1000) {
            let mut c = config(SpaceFamily::Grid1d { n: 12 });
            c.seed = seed;
            c.trials = 3;
            let s = setup(&c).unwrap();
            let base = fit_ratios("t", &c, &s, 1.0, |f| apply_fractional_integral(&s.space, &s.kernel, f)).unwrap();
            let scaled = fit_ratios("t", &c, &s, 1.0, |f| {
                apply_fractional_integral(&s.space, &s.kernel, &f.scaled(8.0)).map(|g| g.scaled(0.125))
            }).unwrap();
            prop_assert_eq!(base.ratios, scaled.ratios);
        }
    }
}
