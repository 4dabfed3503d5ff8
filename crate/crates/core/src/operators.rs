//! Fractional kernels, the fractional integral and its commutators.
//!
//! On an atomic space the fractional integral of `f` at `x` is the finite
//! sum `Σ_{y≠x} K(x,y)·f(y)·μ({y})`. The `y = x` term is dropped: the kernel
//! is not defined on the diagonal.

use alloc::vec;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::FieldFunction;
use crate::geometry::Ball;
use crate::math;
use crate::mspace::Space;
use crate::rbmo::mean_on_ball;
use crate::report::{ArgMax, VerificationReport, Witness};

/// Largest supported multilinear commutator order.
pub const MAX_COMMUTATOR_ORDER: usize = 6;

/// Admissibility scale `C` in `C·d(x,x′) ≤ d(x,y)` unless set explicitly.
pub const DEFAULT_REGULARITY_SCALE: f64 = 2.0;

/// Spaces up to this size get every regularity triple checked.
pub const EXHAUSTIVE_REGULARITY_LIMIT: usize = 48;
pub const SAMPLED_REGULARITY_TRIPLES: usize = 1_000_000;
pub const DEFAULT_REGULARITY_SEED: u64 = 0x7265_6775_6c61;

/// A fractional kernel of order `alpha` and regularity `epsilon`, tabulated
/// off the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalKernel {
    alpha: f64,
    epsilon: f64,
    n: usize,
    values: Vec<f64>,
    size_constant: f64,
    regularity_constant: f64,
    regularity_scale: f64,
}

fn check_order(space: &Space, alpha: f64, epsilon: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < space.dim_n()) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "kernel order must lie in (0, dim_n)",
        });
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            value: epsilon,
            reason: "regularity must lie in (0, 1]",
        });
    }
    Ok(())
}

impl FractionalKernel {
    /// Wraps a row-major `n × n` table; diagonal entries are ignored. The
    /// size constant is measured and the regularity constant is fitted with
    /// [`check_kernel_regularity`] at the default seed.
    pub fn from_table(
        space: &Space,
        alpha: f64,
        epsilon: f64,
        mut values: Vec<f64>,
        regularity_scale: f64,
    ) -> Result<Self> {
        check_order(space, alpha, epsilon)?;
        let n = space.point_count();
        if values.len() != n * n {
            return Err(Error::DimensionMismatch {
                what: "kernel table",
                expected: n * n,
                found: values.len(),
            });
        }
        if !(regularity_scale >= 1.0 && regularity_scale.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "regularity_scale",
                value: regularity_scale,
                reason: "must be at least 1",
            });
        }
        for x in 0..n {
            values[x * n + x] = 0.0;
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "kernel table",
                index,
            });
        }
        let mut kernel = Self {
            alpha,
            epsilon,
            n,
            values,
            size_constant: 0.0,
            regularity_constant: 0.0,
            regularity_scale,
        };
        kernel.size_constant = measured_size_constant(space, &kernel)?;
        kernel.regularity_constant =
            check_kernel_regularity(space, &kernel, DEFAULT_REGULARITY_SEED).fitted_constant;
        Ok(kernel)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn point_count(&self) -> usize {
        self.n
    }

    /// `K(x, y)` for `x ≠ y`; 0 on the diagonal, which is never used.
    #[inline]
    pub fn value(&self, x: usize, y: usize) -> f64 {
        self.values[x * self.n + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.values[x * self.n..(x + 1) * self.n]
    }

    /// Declared constant of the size condition.
    pub fn size_constant(&self) -> f64 {
        self.size_constant
    }

    pub fn regularity_constant(&self) -> f64 {
        self.regularity_constant
    }

    pub fn regularity_scale(&self) -> f64 {
        self.regularity_scale
    }

    /// `t·K`, with both declared constants scaled by `|t|`.
    pub fn scaled(&self, t: f64) -> Self {
        let mut k = self.clone();
        for v in &mut k.values {
            *v *= t;
        }
        k.size_constant *= math::abs(t);
        k.regularity_constant *= math::abs(t);
        k
    }

    /// Overrides the declared size constant (what [`check_kernel_size`]
    /// compares against).
    pub fn with_declared_size(mut self, c: f64) -> Self {
        self.size_constant = c;
        self
    }

    /// Off-diagonal `(i, j, K(i, j))` triplets in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n;
        (0..n * n)
            .filter(move |idx| idx / n != idx % n)
            .map(move |idx| (idx / n, idx % n, self.values[idx]))
    }
}

/// `K(x, y) = λ(x, d(x,y))^{α/n − 1}`, which meets the size condition with
/// constant exactly 1.
pub fn standard_kernel(space: &Space, alpha: f64, epsilon: f64) -> Result<FractionalKernel> {
    check_order(space, alpha, epsilon)?;
    let n = space.point_count();
    let exponent = alpha / space.dim_n() - 1.0;
    let mut values = vec![0.0; n * n];
    for x in 0..n {
        for y in 0..n {
            if x != y {
                let lam = space.lambda_positive(x, space.distance(x, y))?;
                values[x * n + y] = math::pow(lam, exponent);
            }
        }
    }
    FractionalKernel::from_table(space, alpha, epsilon, values, DEFAULT_REGULARITY_SCALE)
}

fn check_kernel_space(space: &Space, kernel: &FractionalKernel) -> Result<()> {
    if kernel.n != space.point_count() {
        return Err(Error::DimensionMismatch {
            what: "kernel",
            expected: space.point_count(),
            found: kernel.n,
        });
    }
    Ok(())
}

/// `max_{x≠y} |K(x,y)|·λ(x,d(x,y))^{1−α/n}`.
pub fn measured_size_constant(space: &Space, kernel: &FractionalKernel) -> Result<f64> {
    Ok(size_scan(space, kernel)?.value)
}

fn size_scan(space: &Space, kernel: &FractionalKernel) -> Result<ArgMax<(usize, usize)>> {
    check_kernel_space(space, kernel)?;
    let n = space.point_count();
    let exponent = 1.0 - kernel.alpha / space.dim_n();
    let mut worst = ArgMax::new();
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let lam = space.lambda_positive(x, space.distance(x, y))?;
            let v = math::abs(kernel.value(x, y)) * math::pow(lam, exponent);
            worst.offer(v, || (x, y));
        }
    }
    Ok(worst)
}

/// Size condition `|K(x,y)| ≤ C/λ(x,d(x,y))^{1−α/n}` against the declared
/// constant.
pub fn check_kernel_size(space: &Space, kernel: &FractionalKernel) -> VerificationReport {
    let mut report = VerificationReport::new("kernel-size");
    match size_scan(space, kernel) {
        Ok(worst) => {
            report.fitted_constant = worst.value;
            report.metric("declared_size_constant", kernel.size_constant);
            if let Some((x, y)) = worst.witness {
                report.witness = Some(Witness {
                    points: vec![x, y],
                    ..Witness::default()
                });
            }
            if worst.value > kernel.size_constant * (1.0 + 1e-12) {
                report.fail("size condition exceeds the declared constant");
            }
        }
        Err(e) => report.fail(alloc::format!("{e}")),
    }
    report
}

/// Regularity condition, fitted over admissible triples `(x, x′, y)` with
/// `C·d(x,x′) ≤ d(x,y)` and `y ∉ {x, x′}`:
///
/// `[|K(x,y)−K(x′,y)| + |K(y,x)−K(y,x′)|]·d(x,y)^ε·λ(x,d(x,y))^{1−α/n} / d(x,x′)^ε`.
///
/// Exhaustive up to [`EXHAUSTIVE_REGULARITY_LIMIT`] points, otherwise
/// [`SAMPLED_REGULARITY_TRIPLES`] uniform samples drawn from `seed`.
pub fn check_kernel_regularity(
    space: &Space,
    kernel: &FractionalKernel,
    seed: u64,
) -> VerificationReport {
    let mut report = VerificationReport::new("kernel-regularity").with_seed(seed);
    if let Err(e) = check_kernel_space(space, kernel) {
        report.fail(alloc::format!("{e}"));
        return report;
    }
    let n = space.point_count();
    let exponent = 1.0 - kernel.alpha / space.dim_n();
    let eps = kernel.epsilon;
    let scale = kernel.regularity_scale;
    let mut worst: ArgMax<(usize, usize, usize)> = ArgMax::new();
    let mut admissible = 0usize;
    let mut eval = |x: usize, xp: usize, y: usize, worst: &mut ArgMax<(usize, usize, usize)>| {
        if x == xp || y == x || y == xp {
            return;
        }
        let dxx = space.distance(x, xp);
        let dxy = space.distance(x, y);
        if scale * dxx > dxy {
            return;
        }
        admissible += 1;
        let diff = math::abs(kernel.value(x, y) - kernel.value(xp, y))
            + math::abs(kernel.value(y, x) - kernel.value(y, xp));
        let lam = space.lambda(x, dxy);
        let v = diff * math::pow(dxy / dxx, eps) * math::pow(lam, exponent);
        worst.offer(v, || (x, xp, y));
    };
    if n <= EXHAUSTIVE_REGULARITY_LIMIT {
        for x in 0..n {
            for xp in 0..n {
                for y in 0..n {
                    eval(x, xp, y, &mut worst);
                }
            }
        }
        report.metric("triples_examined", (n * n * n) as f64);
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..SAMPLED_REGULARITY_TRIPLES {
            let (x, xp, y) = (
                rng.random_range(0..n),
                rng.random_range(0..n),
                rng.random_range(0..n),
            );
            eval(x, xp, y, &mut worst);
        }
        report.metric("triples_examined", SAMPLED_REGULARITY_TRIPLES as f64);
    }
    report.metric("admissible_triples", admissible as f64);
    report.metric("regularity_scale", scale);
    report.fitted_constant = worst.value;
    if admissible == 0 {
        report.message = Some("vacuous pass: no admissible triple".into());
    } else if let Some((x, xp, y)) = worst.witness {
        report.witness = Some(Witness {
            points: vec![x, xp, y],
            ..Witness::default()
        });
    }
    if !worst.value.is_finite() {
        report.fail("regularity constant is not finite");
    }
    report
}

fn check_field(space: &Space, kernel: &FractionalKernel, f: &FieldFunction) -> Result<()> {
    check_kernel_space(space, kernel)?;
    f.check_len(space.point_count(), "field function")
}

/// `(I_α f)(x) = Σ_{y≠x} K(x,y)·f(y)·μ({y})`.
pub fn apply_fractional_integral(
    space: &Space,
    kernel: &FractionalKernel,
    f: &FieldFunction,
) -> Result<FieldFunction> {
    check_field(space, kernel, f)?;
    let fw: Vec<f64> = f
        .values()
        .iter()
        .zip(space.weights())
        .map(|(v, w)| v * w)
        .collect();
    Ok(FieldFunction::from_vec_unchecked(apply_weighted(kernel, &fw)))
}

// The diagonal of the table is zero, so a full dot product drops y = x.
fn apply_weighted(kernel: &FractionalKernel, fw: &[f64]) -> Vec<f64> {
    (0..kernel.n)
        .map(|x| kernel.row(x).iter().zip(fw).map(|(k, v)| k * v).sum())
        .collect()
}

/// `[b, I_α]f = b·I_α f − I_α(b·f)`.
pub fn commutator(
    space: &Space,
    kernel: &FractionalKernel,
    b: &FieldFunction,
    f: &FieldFunction,
) -> Result<FieldFunction> {
    b.check_len(space.point_count(), "commutator symbol")?;
    let i_f = apply_fractional_integral(space, kernel, f)?;
    let i_bf = apply_fractional_integral(space, kernel, &b.product(f))?;
    Ok(i_bf.axpy(-1.0, &b.product(&i_f)))
}

fn check_symbols(space: &Space, b_vec: &[FieldFunction]) -> Result<()> {
    if b_vec.is_empty() {
        return Err(Error::InvalidParameter {
            name: "k",
            value: 0.0,
            reason: "a multilinear commutator needs at least one symbol",
        });
    }
    if b_vec.len() > MAX_COMMUTATOR_ORDER {
        return Err(Error::KTooLarge {
            k: b_vec.len(),
            max: MAX_COMMUTATOR_ORDER,
        });
    }
    for b in b_vec {
        b.check_len(space.point_count(), "commutator symbol")?;
    }
    Ok(())
}

/// `I_{α,b⃗} f = [b_k, [b_{k−1}, …, [b_1, I_α]]] f` through its closed form
/// `Σ_{y≠x} Π_i (b_i(x) − b_i(y))·K(x,y)·f(y)·μ({y})`.
pub fn multilinear_commutator(
    space: &Space,
    kernel: &FractionalKernel,
    b_vec: &[FieldFunction],
    f: &FieldFunction,
) -> Result<FieldFunction> {
    check_field(space, kernel, f)?;
    check_symbols(space, b_vec)?;
    let n = space.point_count();
    let fw: Vec<f64> = f
        .values()
        .iter()
        .zip(space.weights())
        .map(|(v, w)| v * w)
        .collect();
    let mut out = Vec::with_capacity(n);
    for x in 0..n {
        let row = kernel.row(x);
        let mut acc = 0.0;
        for y in 0..n {
            if y == x {
                continue;
            }
            let mut prod = row[y] * fw[y];
            for b in b_vec {
                prod *= b[x] - b[y];
            }
            acc += prod;
        }
        out.push(acc);
    }
    Ok(FieldFunction::from_vec_unchecked(out))
}

/// The same operator through the nested definition
/// `T_j f = b_j·T_{j−1} f − T_{j−1}(b_j f)`, `T_0 = I_α`. Costs `2ᵏ`
/// applications of `I_α`; kept as an independent reference path.
pub fn nested_commutator(
    space: &Space,
    kernel: &FractionalKernel,
    b_vec: &[FieldFunction],
    f: &FieldFunction,
) -> Result<FieldFunction> {
    check_field(space, kernel, f)?;
    for b in b_vec {
        b.check_len(space.point_count(), "commutator symbol")?;
    }
    match b_vec.split_last() {
        None => apply_fractional_integral(space, kernel, f),
        Some((last, rest)) => {
            let t_f = nested_commutator(space, kernel, rest, f)?;
            let t_bf = nested_commutator(space, kernel, rest, &last.product(f))?;
            Ok(t_bf.axpy(-1.0, &last.product(&t_f)))
        }
    }
}

/// A subset `σ` of `{1, …, k}` together with its complement `σ′`, both
/// strictly increasing and 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexSubset {
    pub k: usize,
    pub sigma: Vec<usize>,
    pub sigma_prime: Vec<usize>,
}

impl IndexSubset {
    /// `b⃗_σ` picked out of `b_vec` (1-based indices).
    pub fn pick<'a, T>(&self, items: &'a [T]) -> Vec<&'a T> {
        self.sigma.iter().map(|&i| &items[i - 1]).collect()
    }

    /// `b⃗_{σ′}` picked out of `b_vec`.
    pub fn pick_complement<'a, T>(&self, items: &'a [T]) -> Vec<&'a T> {
        self.sigma_prime.iter().map(|&i| &items[i - 1]).collect()
    }
}

/// All `i`-element subsets of `{1, …, k}` in lexicographic order, with
/// complements.
pub fn sigma_subsets(k: usize, i: usize) -> Result<Vec<IndexSubset>> {
    if i > k {
        return Err(Error::InvalidParameter {
            name: "i",
            value: i as f64,
            reason: "subset size must not exceed k",
        });
    }
    let mut out = Vec::new();
    let mut current: Vec<usize> = (1..=i).collect();
    loop {
        let sigma_prime = (1..=k).filter(|j| !current.contains(j)).collect();
        out.push(IndexSubset {
            k,
            sigma: current.clone(),
            sigma_prime,
        });
        // Advance to the next combination.
        let mut pos = i;
        while pos > 0 && current[pos - 1] == k - i + pos {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        current[pos - 1] += 1;
        for j in pos..i {
            current[j] = current[j - 1] + 1;
        }
    }
    Ok(out)
}

/// Checks the expansion
/// `Π_i (b_i(z) − m_i) = Σ_{i=0}^{k} Σ_{σ∈C_i^k} [b(z)−b(y)]_{σ′}·[b(y)−m]_σ`
/// with `m_i` the mean of `b_i` over each given ball, for every `(y, z)`.
pub fn verify_product_expansion(
    space: &Space,
    b_vec: &[FieldFunction],
    pairs: &[(usize, usize)],
    balls: &[Ball],
) -> Result<VerificationReport> {
    check_symbols(space, b_vec)?;
    for &(y, z) in pairs {
        space.check_point(y)?;
        space.check_point(z)?;
    }
    let k = b_vec.len();
    let mut subsets = Vec::new();
    for i in 0..=k {
        subsets.extend(sigma_subsets(k, i)?);
    }
    let mut report = VerificationReport::new("product-expansion");
    let mut worst: ArgMax<(usize, usize, usize)> = ArgMax::new();
    let mut magnitude = 0.0f64;
    for (bi, ball) in balls.iter().enumerate() {
        let means: Vec<f64> = b_vec.iter().map(|b| mean_on_ball(space, b, ball)).collect();
        for &(y, z) in pairs {
            let lhs: f64 = (0..k).map(|i| b_vec[i][z] - means[i]).product();
            let mut rhs = 0.0;
            for s in &subsets {
                let mut term = 1.0;
                for &j in &s.sigma_prime {
                    term *= b_vec[j - 1][z] - b_vec[j - 1][y];
                }
                for &j in &s.sigma {
                    term *= b_vec[j - 1][y] - means[j - 1];
                }
                magnitude = magnitude.max(math::abs(term));
                rhs += term;
            }
            magnitude = magnitude.max(math::abs(lhs));
            worst.offer(math::abs(lhs - rhs), || (bi, y, z));
        }
    }
    report.fitted_constant = worst.value;
    report.metric("max_discrepancy", worst.value);
    report.metric("max_magnitude", magnitude);
    report.metric("terms", subsets.len() as f64);
    if worst.value > 1e-10 * (1.0 + magnitude) {
        if let Some((bi, y, z)) = worst.witness {
            report.witness = Some(Witness {
                ball: Some((&balls[bi]).into()),
                points: vec![y, z],
                ..Witness::default()
            });
        }
        report.fail("product expansion discrepancy above 1e-10");
    }
    Ok(report)
}
