//! Ball means and RBMO norm estimates over the canonical ball family.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::FieldFunction;
use crate::geometry::{
    n_from_thresholds, six_pow, tilde_radius, Ball, BallPair, CanonicalFamily, PrefixSums,
};
use crate::math;
use crate::mspace::Space;
use crate::report::{ArgMax, VerificationReport, Witness};

/// Default inflation `ρ` of the oscillation term.
pub const DEFAULT_RHO: f64 = 6.0;

/// `m_B(f) = (1/μ(B))·Σ_B f·μ`.
pub fn mean_on_ball(space: &Space, f: &FieldFunction, ball: &Ball) -> f64 {
    let s: f64 = ball
        .member_indices()
        .map(|x| f[x] * space.weight(x))
        .sum();
    s / ball.measure()
}

/// Lower `μ`-median of `f` on `ball`: the smallest value `t` taken on the
/// ball with `μ({f ≤ t} ∩ B) ≥ μ(B)/2`. Minimizes `∫_B |f − t| dμ`.
pub fn weighted_median(space: &Space, f: &FieldFunction, ball: &Ball) -> f64 {
    let mut members: Vec<usize> = ball.member_indices().collect();
    members.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
    median_of_sorted(space, f, &members, ball.measure())
}

fn median_of_sorted(space: &Space, f: &FieldFunction, sorted: &[usize], measure: f64) -> f64 {
    let half = 0.5 * measure;
    let mut acc = 0.0;
    for &x in sorted {
        acc += space.weight(x);
        if acc >= half * (1.0 - 1e-15) {
            return f[x];
        }
    }
    f[*sorted.last().expect("balls are nonempty")]
}

/// An RBMO norm estimate: the larger of the oscillation and pair terms,
/// with the balls where each was attained.
#[derive(Debug, Clone, PartialEq)]
pub struct RbmoEstimate {
    pub norm_value: f64,
    pub rho: f64,
    pub oscillation_term: f64,
    pub pair_term: f64,
    pub witness_osc: Option<Ball>,
    pub witness_pair: Option<BallPair>,
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 1.0 && rho.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "rho",
            value: rho,
            reason: "must exceed 1",
        });
    }
    Ok(())
}

/// Means of `f` on every family ball and on its `B̃`.
pub(crate) struct FamilyMeans {
    pub ball: Vec<f64>,
    pub tilde: Vec<f64>,
}

impl FamilyMeans {
    pub fn new(space: &Space, family: &CanonicalFamily, f: &FieldFunction) -> Self {
        let fw: Vec<f64> = f
            .values()
            .iter()
            .zip(space.weights())
            .map(|(v, w)| v * w)
            .collect();
        let sums = PrefixSums::new(space, &fw);
        let mean = |b: &Ball| sums.prefix(b.center(), b.size()) / b.measure();
        Self {
            ball: family.balls().iter().map(mean).collect(),
            tilde: (0..family.len()).map(|i| mean(family.tilde(i))).collect(),
        }
    }
}

/// `(1/μ(ρB))·Σ_B |f − m|·μ`.
fn oscillation(space: &Space, f: &FieldFunction, ball: &Ball, m: f64, rho: f64) -> f64 {
    let c = ball.center();
    let s: f64 = space.neighbors(c)[..ball.size()]
        .iter()
        .map(|&y| math::abs(f[y as usize] - m) * space.weight(y as usize))
        .sum();
    s / space.ball_measure(c, rho * ball.radius())
}

/// [`rbmo_norm_in`] over a freshly built canonical family.
pub fn rbmo_norm(space: &Space, b: &FieldFunction, rho: f64) -> Result<RbmoEstimate> {
    let family = CanonicalFamily::build(space)?;
    rbmo_norm_in(space, &family, b, rho)
}

/// The RBMO norm with the `m_{B̃}` normalization:
///
/// `max( max_B (1/μ(ρB))∫_B|b − m_{B̃}b| dμ, max_{B⊆Q doubling} |m_B b − m_Q b|/K_{B,Q} )`.
pub fn rbmo_norm_in(
    space: &Space,
    family: &CanonicalFamily,
    b: &FieldFunction,
    rho: f64,
) -> Result<RbmoEstimate> {
    check_rho(rho)?;
    b.check_len(space.point_count(), "rbmo symbol")?;
    let means = FamilyMeans::new(space, family, b);
    let mut osc: ArgMax<usize> = ArgMax::new();
    for (i, ball) in family.balls().iter().enumerate() {
        osc.offer(oscillation(space, b, ball, means.tilde[i], rho), || i);
    }
    let mut pair: ArgMax<(usize, usize)> = ArgMax::new();
    for i in 0..family.len() {
        if !family.is_doubling(i) {
            continue;
        }
        let table = family.k_table(space, i, 0.0)?;
        let thresholds = family.n_thresholds(i);
        for q in family.supersets(i) {
            if !family.is_doubling(q) {
                continue;
            }
            let n = n_from_thresholds(&thresholds, family.ball(q).radius());
            let v = math::abs(means.ball[i] - means.ball[q]) / table[n];
            pair.offer(v, || (i, q));
        }
    }
    finish(family, rho, osc, pair)
}

fn finish(
    family: &CanonicalFamily,
    rho: f64,
    osc: ArgMax<usize>,
    pair: ArgMax<(usize, usize)>,
) -> Result<RbmoEstimate> {
    let witness_pair = match pair.witness {
        Some((i, q)) => Some(BallPair::new(family.ball(i).clone(), family.ball(q).clone())?),
        None => None,
    };
    Ok(RbmoEstimate {
        norm_value: osc.value.max(pair.value),
        rho,
        oscillation_term: osc.value,
        pair_term: pair.value,
        witness_osc: osc.witness.map(|i| family.ball(i).clone()),
        witness_pair,
    })
}

/// Lower `μ`-medians of `f` on every family ball.
pub(crate) fn family_medians(space: &Space, family: &CanonicalFamily, f: &FieldFunction) -> Vec<f64> {
    let order = value_order(f);
    family
        .balls()
        .iter()
        .map(|ball| median_in_order(space, f, &order, ball))
        .collect()
}

fn value_order(f: &FieldFunction) -> Vec<usize> {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|&a, &b| f[a].total_cmp(&f[b]).then(a.cmp(&b)));
    order
}

fn median_in_order(space: &Space, f: &FieldFunction, order: &[usize], ball: &Ball) -> f64 {
    let sorted: Vec<usize> = order.iter().copied().filter(|&x| ball.contains(x)).collect();
    median_of_sorted(space, f, &sorted, ball.measure())
}

/// [`rbmo_norm_assignment_in`] over a freshly built canonical family.
pub fn rbmo_norm_assignment(space: &Space, b: &FieldFunction, rho: f64) -> Result<RbmoEstimate> {
    let family = CanonicalFamily::build(space)?;
    rbmo_norm_assignment_in(space, &family, b, rho)
}

/// The RBMO constant for the concrete assignment `b_B` = lower `μ`-median
/// of `b` on `B`:
///
/// `max( max_B (1/μ(ρB))∫_B|b − b_B| dμ, max_{B⊆Q} |b_B − b_Q|/K_{B,Q} )`,
/// the pair term running over all nested family balls, doubling or not.
pub fn rbmo_norm_assignment_in(
    space: &Space,
    family: &CanonicalFamily,
    b: &FieldFunction,
    rho: f64,
) -> Result<RbmoEstimate> {
    check_rho(rho)?;
    b.check_len(space.point_count(), "rbmo symbol")?;
    let medians = family_medians(space, family, b);
    let mut osc: ArgMax<usize> = ArgMax::new();
    for (i, ball) in family.balls().iter().enumerate() {
        osc.offer(oscillation(space, b, ball, medians[i], rho), || i);
    }
    let mut pair: ArgMax<(usize, usize)> = ArgMax::new();
    for i in 0..family.len() {
        let table = family.k_table(space, i, 0.0)?;
        let thresholds = family.n_thresholds(i);
        for q in family.supersets(i) {
            if medians[i] == medians[q] {
                continue;
            }
            let n = n_from_thresholds(&thresholds, family.ball(q).radius());
            let v = math::abs(medians[i] - medians[q]) / table[n];
            pair.offer(v, || (i, q));
        }
    }
    finish(family, rho, osc, pair)
}

/// Telescoping estimate over every family ball `B` and every `k ≥ 1` up to
/// the first `6ᵏ(6/5)B` that covers the space:
///
/// `|m_{B̃}(b) − m_{(6ᵏ(6/5)B)~}(b)| ≤ C·k·‖b‖_*`
///
/// with `‖b‖_*` from [`rbmo_norm_in`] at `ρ = 6`. The fitted `C` is the
/// largest ratio. The same sweep with medians, `|b_B − b_{6ᵏ(6/5)B}|`
/// against the median-assignment constant, is reported as the metric
/// `median_fitted`. A constant `b` is a vacuous pass.
pub fn telescoping_check(space: &Space, b: &FieldFunction) -> Result<VerificationReport> {
    let family = CanonicalFamily::build(space)?;
    telescoping_check_in(space, &family, b)
}

pub fn telescoping_check_in(
    space: &Space,
    family: &CanonicalFamily,
    b: &FieldFunction,
) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("rbmo-telescoping");
    let norm = rbmo_norm_in(space, family, b, DEFAULT_RHO)?.norm_value;
    report.metric("rbmo_norm", norm);
    if norm == 0.0 {
        report.message = Some("vacuous pass: b has zero RBMO norm".into());
        return Ok(report);
    }
    let assignment_norm = rbmo_norm_assignment_in(space, family, b, DEFAULT_RHO)?.norm_value;
    report.metric("median_rbmo_norm", assignment_norm);

    let n = space.point_count();
    let fw: Vec<f64> = b
        .values()
        .iter()
        .zip(space.weights())
        .map(|(v, w)| v * w)
        .collect();
    let sums = PrefixSums::new(space, &fw);
    let mean_at = |c: usize, r: f64| {
        let m = space.ball_count(c, r);
        sums.prefix(c, m) / space.prefix_measure(c, m)
    };
    let order = value_order(b);
    let medians = family_medians(space, family, b);
    let mut worst: ArgMax<(usize, u32)> = ArgMax::new();
    let mut worst_median: ArgMax<(usize, u32)> = ArgMax::new();
    for (i, ball) in family.balls().iter().enumerate() {
        let c = ball.center();
        let m0 = mean_at(c, tilde_radius(space, c, ball.radius()).1);
        let mut k = 1u32;
        loop {
            let r = six_pow(k) * 1.2 * ball.radius();
            let (_, tr) = tilde_radius(space, c, r);
            let diff = math::abs(m0 - mean_at(c, tr));
            worst.offer(diff / (f64::from(k) * norm), || (i, k));
            if assignment_norm > 0.0 {
                let big = Ball::new(space, c, r);
                let med = median_in_order(space, b, &order, &big);
                let v = math::abs(medians[i] - med) / (f64::from(k) * assignment_norm);
                worst_median.offer(v, || (i, k));
            }
            if space.ball_count(c, r) == n {
                break;
            }
            k += 1;
        }
    }
    report.fitted_constant = worst.value;
    report.metric("median_fitted", worst_median.value);
    if let Some((i, k)) = worst.witness {
        let ball = family.ball(i);
        let outer = Ball::new(space, ball.center(), six_pow(k) * 1.2 * ball.radius());
        report.witness = Some(Witness {
            ball: Some(ball.into()),
            other_ball: Some((&outer).into()),
            ..Witness::default()
        });
    }
    if !(worst.value.is_finite() && worst_median.value.is_finite()) {
        report.fail("telescoping constant is not finite");
    }
    Ok(report)
}

/// John–Nirenberg-type estimate: for each `p` in `p_grid`,
///
/// `C_p = max_B {(1/μ(ρB))∫_B |b − m_{B̃}b|ᵖ dμ}^{1/p} / ‖b‖_*`
///
/// at `ρ = 6`. The per-`p` constants are the report ratios, in grid order,
/// and the fitted constant is their maximum.
pub fn john_nirenberg_check(
    space: &Space,
    b: &FieldFunction,
    p_grid: &[f64],
) -> Result<VerificationReport> {
    let family = CanonicalFamily::build(space)?;
    john_nirenberg_check_in(space, &family, b, p_grid)
}

pub fn john_nirenberg_check_in(
    space: &Space,
    family: &CanonicalFamily,
    b: &FieldFunction,
    p_grid: &[f64],
) -> Result<VerificationReport> {
    for &p in p_grid {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "exponents must lie in [1, ∞)",
            });
        }
    }
    let mut report = VerificationReport::new("rbmo-john-nirenberg");
    let norm = rbmo_norm_in(space, family, b, DEFAULT_RHO)?.norm_value;
    report.metric("rbmo_norm", norm);
    if norm == 0.0 {
        report.message = Some("vacuous pass: b has zero RBMO norm".into());
        return Ok(report);
    }
    let means = FamilyMeans::new(space, family, b);
    let mut overall: ArgMax<usize> = ArgMax::new();
    for &p in p_grid {
        let mut best: ArgMax<usize> = ArgMax::new();
        for (i, ball) in family.balls().iter().enumerate() {
            let c = ball.center();
            let m = means.tilde[i];
            let s: f64 = space.neighbors(c)[..ball.size()]
                .iter()
                .map(|&y| math::pow(math::abs(b[y as usize] - m), p) * space.weight(y as usize))
                .sum();
            let v = math::pow(s / space.ball_measure(c, DEFAULT_RHO * ball.radius()), 1.0 / p);
            best.offer(v / norm, || i);
        }
        report.ratios.push(best.value);
        report.metric(format!("C_p{p}"), best.value);
        if let Some(i) = best.witness {
            overall.offer(best.value, || i);
        }
    }
    report.fitted_constant = overall.value;
    if let Some(i) = overall.witness {
        report.witness = Some(Witness {
            ball: Some(family.ball(i).into()),
            ..Witness::default()
        });
    }
    if !report.ratios.iter().all(|v| v.is_finite()) {
        report.fail("John–Nirenberg constant is not finite");
    }
    Ok(report)
}
