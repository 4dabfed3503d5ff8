//! Closed balls and the ball calculus on a [`Space`].
//!
//! Doubling means `(6, β₀)`-doubling unless stated otherwise: `μ(6B) ≤ β₀·μ(B)`.
//! Ball inclusion and disjointness are always tested on member sets.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::math;
use crate::mspace::{Space, RADIUS_SLACK};

/// Default cap on the size of a [`CanonicalFamily`].
pub const DEFAULT_FAMILY_CAP: usize = 200_000;

/// A closed ball `B(center, radius)` with its member set and measure cached.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: usize,
    radius: f64,
    members: FixedBitSet,
    size: usize,
    measure: f64,
}

impl Ball {
    /// The closed ball around `center`. Panics if `center` is out of range.
    pub fn new(space: &Space, center: usize, radius: f64) -> Self {
        let n = space.point_count();
        let m = space.ball_count(center, radius);
        let mut members = FixedBitSet::with_capacity(n);
        for &y in &space.neighbors(center)[..m] {
            members.insert(y as usize);
        }
        Self {
            center,
            radius,
            members,
            size: m,
            measure: space.prefix_measure(center, m),
        }
    }

    /// Like [`Ball::new`] with argument checks.
    pub fn try_new(space: &Space, center: usize, radius: f64) -> Result<Self> {
        space.check_point(center)?;
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "radius",
                value: radius,
                reason: "must be a nonnegative real",
            });
        }
        Ok(Self::new(space, center, radius))
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn members(&self) -> &FixedBitSet {
        &self.members
    }

    /// Member indices in increasing order.
    pub fn member_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.contains(x)
    }

    /// Member-set inclusion `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Ball) -> bool {
        self.size <= other.size && self.members.is_subset(&other.members)
    }

    pub fn is_disjoint_from(&self, other: &Ball) -> bool {
        self.members.is_disjoint(&other.members)
    }

    /// Whether the ball is the whole space.
    pub fn is_saturated(&self) -> bool {
        self.size == self.members.len()
    }
}

/// `factor·B`: same center, radius scaled.
pub fn dilate(space: &Space, ball: &Ball, factor: f64) -> Result<Ball> {
    if !(factor.is_finite() && factor > 0.0) {
        return Err(Error::InvalidParameter {
            name: "factor",
            value: factor,
            reason: "dilation factor must be positive",
        });
    }
    Ok(Ball::new(space, ball.center, factor * ball.radius))
}

/// Whether `μ(alpha·B) ≤ beta·μ(B)`.
pub fn is_doubling(space: &Space, ball: &Ball, alpha: f64, beta: f64) -> Result<bool> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "doubling dilation must exceed 1",
        });
    }
    if !(beta > 1.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "doubling constant must exceed 1",
        });
    }
    Ok(doubling_test(space, ball, alpha, beta))
}

#[inline]
fn doubling_test(space: &Space, ball: &Ball, alpha: f64, beta: f64) -> bool {
    space.ball_measure(ball.center, alpha * ball.radius) <= beta * ball.measure
}

/// `(6, β₀)`-doubling test.
#[inline]
pub fn is_default_doubling(space: &Space, ball: &Ball) -> bool {
    doubling_test(space, ball, 6.0, space.beta0())
}

#[inline]
pub(crate) fn six_pow(k: u32) -> f64 {
    let mut p = 1.0;
    for _ in 0..k {
        p *= 6.0;
    }
    p
}

/// The smallest `(6, β₀)`-doubling ball `6ᵏB`, `k ≥ 0`, and its `k`.
///
/// Terminates because some `6ᵏB` is the whole space, which is doubling.
pub fn smallest_doubling_dilate(space: &Space, ball: &Ball) -> (u32, Ball) {
    let (k, r) = tilde_radius(space, ball.center, ball.radius);
    if k == 0 {
        (0, ball.clone())
    } else {
        (k, Ball::new(space, ball.center, r))
    }
}

/// `k` and radius of `B̃` for `B = B(center, radius)`, without building it.
pub(crate) fn tilde_radius(space: &Space, center: usize, radius: f64) -> (u32, f64) {
    let beta0 = space.beta0();
    let mut k = 0u32;
    let mut r = radius;
    loop {
        if space.ball_measure(center, 6.0 * r) <= beta0 * space.ball_measure(center, r) {
            return (k, r);
        }
        k += 1;
        // A zero radius never grows; jump to an atom so the loop advances.
        r = if radius > 0.0 {
            six_pow(k) * radius
        } else {
            six_pow(k - 1) * space.atom_radius()
        };
    }
}

/// Sums of per-point values over the nearest-neighbor prefixes of every
/// center, so a ball sum is one lookup.
#[derive(Debug, Clone)]
pub(crate) struct PrefixSums {
    n: usize,
    sums: Vec<f64>,
}

impl PrefixSums {
    pub fn new(space: &Space, values: &[f64]) -> Self {
        let n = space.point_count();
        let mut sums = Vec::with_capacity(n * (n + 1));
        for c in 0..n {
            let mut acc = 0.0;
            sums.push(acc);
            for &y in space.neighbors(c) {
                acc += values[y as usize];
                sums.push(acc);
            }
        }
        Self { n, sums }
    }

    #[inline]
    pub fn prefix(&self, center: usize, count: usize) -> f64 {
        self.sums[center * (self.n + 1) + count]
    }
}

/// `N_{B,Q}`: the smallest integer `N ≥ 0` with `6ᴺ·r_B ≥ r_Q`.
///
/// Returns 0 when `r_Q ≤ r_B`, which happens for member-set nested pairs
/// with different centers.
pub fn n_bq(inner_radius: f64, outer_radius: f64) -> Result<u32> {
    if !(inner_radius > 0.0 && inner_radius.is_finite()) {
        return Err(Error::DegenerateBall);
    }
    let target = outer_radius * (1.0 - RADIUS_SLACK);
    let mut n = 0u32;
    while six_pow(n) * inner_radius < target {
        n += 1;
    }
    Ok(n)
}

/// `μ(6ᵏB) / λ(x_B, 6ᵏ r_B)`, the `k`-th shell ratio of `K^(β)`.
pub fn shell_ratio(space: &Space, center: usize, radius: f64, k: u32) -> Result<f64> {
    let r = six_pow(k) * radius;
    let mu = space.ball_measure(center, r);
    Ok(mu / space.lambda_positive(center, r)?)
}

fn check_beta(space: &Space, beta: f64) -> Result<()> {
    if !(beta >= 0.0 && beta < space.dim_n()) {
        return Err(Error::InvalidParameter {
            name: "beta",
            value: beta,
            reason: "must lie in [0, dim_n)",
        });
    }
    Ok(())
}

/// `K^(β)_{B,Q} = 1 + Σ_{k=1}^{N_{B,Q}} [μ(6ᵏB)/λ(x_B, 6ᵏr_B)]^{1−β/n}`.
pub fn k_coefficient(space: &Space, inner: &Ball, outer: &Ball, beta: f64) -> Result<f64> {
    check_beta(space, beta)?;
    let n = n_bq(inner.radius, outer.radius)?;
    let exponent = 1.0 - beta / space.dim_n();
    let mut k_value = 1.0;
    for k in 1..=n {
        k_value += math::pow(shell_ratio(space, inner.center, inner.radius, k)?, exponent);
    }
    Ok(k_value)
}

/// An inner/outer ball pair with `N_{B,Q}` cached.
#[derive(Debug, Clone, PartialEq)]
pub struct BallPair {
    pub inner: Ball,
    pub outer: Ball,
    pub n_bq: u32,
}

impl BallPair {
    pub fn new(inner: Ball, outer: Ball) -> Result<Self> {
        let n_bq = n_bq(inner.radius, outer.radius)?;
        Ok(Self { inner, outer, n_bq })
    }

    pub fn k_coefficient(&self, space: &Space, beta: f64) -> Result<f64> {
        k_coefficient(space, &self.inner, &self.outer, beta)
    }
}

/// Every `(center, radius)` that generates a distinct ball around its
/// center: the atom radius, then each distinct distance to another point.
pub(crate) fn distinct_ball_generators(space: &Space) -> Vec<(usize, f64)> {
    let n = space.point_count();
    let mut out = Vec::new();
    for c in 0..n {
        out.push((c, space.atom_radius()));
        let sorted = space.sorted_distances(c);
        let mut last = 0.0f64;
        for &d in &sorted[1..] {
            if d > last * (1.0 + RADIUS_SLACK) {
                out.push((c, d));
                last = d;
            }
        }
    }
    out
}

/// The canonical ball family with the per-ball data every maximal operator
/// and RBMO estimate needs.
///
/// Contains every ball `B(c, r)` with `c` a point and `r` either the atom
/// radius or a grid radius, deduplicated by member set keeping the smallest
/// generating radius (lowest center on ties), ordered by center then radius.
/// Grid radii between two consecutive distances from `c` give the same
/// member set as the smaller distance, so only distances are enumerated.
#[derive(Debug, Clone)]
pub struct CanonicalFamily {
    balls: Vec<Ball>,
    doubling: Vec<bool>,
    tilde: Vec<Ball>,
    tilde_k: Vec<u32>,
    measure6: Vec<f64>,
    shells: Vec<Vec<f64>>,
    containing: Vec<Vec<u32>>,
    max_radius: f64,
}

/// Builds the canonical family with the default cap.
pub fn canonical_ball_family(space: &Space) -> Result<CanonicalFamily> {
    CanonicalFamily::build_with_cap(space, DEFAULT_FAMILY_CAP)
}

impl CanonicalFamily {
    pub fn build(space: &Space) -> Result<Self> {
        Self::build_with_cap(space, DEFAULT_FAMILY_CAP)
    }

    pub fn build_with_cap(space: &Space, cap: usize) -> Result<Self> {
        let mut gens = distinct_ball_generators(space);
        gens.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let mut seen: BTreeMap<FixedBitSet, usize> = BTreeMap::new();
        let mut balls: Vec<Ball> = Vec::new();
        for (c, r) in gens {
            let ball = Ball::new(space, c, r);
            if seen.contains_key(&ball.members) {
                continue;
            }
            seen.insert(ball.members.clone(), balls.len());
            balls.push(ball);
            if balls.len() > cap {
                return Err(Error::FamilyTooLarge {
                    size: balls.len(),
                    cap,
                });
            }
        }
        drop(seen);
        balls.sort_by(|a, b| a.center.cmp(&b.center).then(a.radius.total_cmp(&b.radius)));

        let max_radius = balls.iter().fold(0.0f64, |m, b| m.max(b.radius));
        let n = space.point_count();
        let mut doubling = Vec::with_capacity(balls.len());
        let mut tilde = Vec::with_capacity(balls.len());
        let mut tilde_k = Vec::with_capacity(balls.len());
        let mut measure6 = Vec::with_capacity(balls.len());
        let mut shells = Vec::with_capacity(balls.len());
        let mut containing = alloc::vec![Vec::new(); n];
        for (i, b) in balls.iter().enumerate() {
            doubling.push(is_default_doubling(space, b));
            let (k, t) = smallest_doubling_dilate(space, b);
            tilde_k.push(k);
            tilde.push(t);
            measure6.push(space.ball_measure(b.center, 6.0 * b.radius));
            let top = n_bq(b.radius, max_radius)?;
            let mut s = Vec::with_capacity(top as usize);
            for k in 1..=top {
                s.push(shell_ratio(space, b.center, b.radius, k)?);
            }
            shells.push(s);
            for x in b.members.ones() {
                containing[x].push(i as u32);
            }
        }
        Ok(Self {
            balls,
            doubling,
            tilde,
            tilde_k,
            measure6,
            shells,
            containing,
            max_radius,
        })
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn ball(&self, i: usize) -> &Ball {
        &self.balls[i]
    }

    pub fn is_doubling(&self, i: usize) -> bool {
        self.doubling[i]
    }

    /// `B̃` of ball `i`.
    pub fn tilde(&self, i: usize) -> &Ball {
        &self.tilde[i]
    }

    /// The `k` with `B̃ = 6ᵏB` for ball `i`.
    pub fn tilde_k(&self, i: usize) -> u32 {
        self.tilde_k[i]
    }

    /// `μ(6B)` of ball `i`.
    pub fn measure6(&self, i: usize) -> f64 {
        self.measure6[i]
    }

    /// Indices of the balls containing point `x`.
    pub fn containing(&self, x: usize) -> &[u32] {
        &self.containing[x]
    }

    pub fn max_radius(&self) -> f64 {
        self.max_radius
    }

    /// Shell ratios `μ(6ᵏB)/λ(x_B, 6ᵏr_B)` for `k = 1..` up to the largest
    /// `N_{B,Q}` any family ball `Q` can produce.
    pub fn shell_ratios(&self, i: usize) -> &[f64] {
        &self.shells[i]
    }

    /// `K^(β)_{B,Q}` for `B` = ball `i` and every `N = 0..`, as a lookup
    /// table indexed by `N_{B,Q}`. Identical to [`k_coefficient`].
    pub fn k_table(&self, space: &Space, i: usize, beta: f64) -> Result<Vec<f64>> {
        check_beta(space, beta)?;
        let exponent = 1.0 - beta / space.dim_n();
        let mut table = Vec::with_capacity(self.shells[i].len() + 1);
        let mut acc = 1.0;
        table.push(acc);
        for &u in &self.shells[i] {
            acc += math::pow(u, exponent);
            table.push(acc);
        }
        Ok(table)
    }

    /// Radii `6ᴺ·r_B` for `N = 0..`, the thresholds that decide `N_{B,Q}`.
    pub(crate) fn n_thresholds(&self, i: usize) -> Vec<f64> {
        let r = self.balls[i].radius;
        (0..=self.shells[i].len() as u32)
            .map(|k| six_pow(k) * r)
            .collect()
    }

    /// Indices of the family balls `Q ≠ B` with `B ⊆ Q` (member sets), for
    /// `B` = ball `i`, in increasing index order.
    pub fn supersets(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let inner = &self.balls[i];
        // Any superset contains every member, so scan the shortest list.
        let pivot = inner
            .members
            .ones()
            .min_by_key(|&x| (self.containing[x].len(), x))
            .expect("balls are nonempty");
        self.containing[pivot]
            .iter()
            .map(|&q| q as usize)
            .filter(move |&q| q != i && inner.is_subset_of(&self.balls[q]))
    }

    /// Indices of the doubling balls.
    pub fn doubling_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.doubling[i]).collect()
    }
}

/// `N_{B,Q}` from precomputed thresholds; must agree with [`n_bq`].
#[inline]
pub(crate) fn n_from_thresholds(thresholds: &[f64], outer_radius: f64) -> usize {
    let target = outer_radius * (1.0 - RADIUS_SLACK);
    let mut n = 0;
    while n + 1 < thresholds.len() && thresholds[n] < target {
        n += 1;
    }
    n
}

/// Greedy disjoint selection with the covering guarantee.
///
/// Balls are visited by decreasing radius (ties by center, then input
/// order) and kept when disjoint from every ball kept so far. Every input
/// member then lies in some `dilation·B` for a kept `B`; this is verified
/// and a failure is reported as [`Error::CoverGuaranteeFailed`].
pub fn greedy_disjoint_cover(space: &Space, balls: &[Ball], dilation: f64) -> Result<Vec<Ball>> {
    if !(dilation >= 5.0 && dilation.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "dilation",
            value: dilation,
            reason: "covering dilation must be at least 5",
        });
    }
    let n = space.point_count();
    let mut order: Vec<usize> = (0..balls.len()).collect();
    order.sort_by(|&a, &b| {
        balls[b]
            .radius
            .total_cmp(&balls[a].radius)
            .then(balls[a].center.cmp(&balls[b].center))
            .then(a.cmp(&b))
    });
    let mut taken = FixedBitSet::with_capacity(n);
    let mut kept = Vec::new();
    for i in order {
        let b = &balls[i];
        if b.members.is_disjoint(&taken) {
            taken.union_with(&b.members);
            kept.push(b.clone());
        }
    }
    let mut input_union = FixedBitSet::with_capacity(n);
    for b in balls {
        input_union.union_with(&b.members);
    }
    let mut covered = FixedBitSet::with_capacity(n);
    for b in &kept {
        covered.union_with(&dilate(space, b, dilation)?.members);
    }
    if let Some(point) = input_union.difference(&covered).next() {
        return Err(Error::CoverGuaranteeFailed { point });
    }
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate_space, SpaceFamily, WeightScheme};
    use crate::mspace::{build_space, DominatingSpec};
    use crate::testutil::{line, two_point};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random64(seed: u64) -> Space {
        generate_space(&SpaceFamily::Random { n: 64, seed }, &WeightScheme::Uniform).unwrap()
    }

    fn members(b: &Ball) -> Vec<usize> {
        b.member_indices().collect()
    }

    #[test]
    fn two_point_family_has_three_balls() {
        let s = two_point();
        let fam = canonical_ball_family(&s).unwrap();
        assert_eq!(fam.len(), 3);
        let sets: Vec<(usize, f64, Vec<usize>)> = fam
            .balls()
            .iter()
            .map(|b| (b.center(), b.radius(), members(b)))
            .collect();
        assert_eq!(
            sets,
            vec![(0, 1.0 / 36.0, vec![0]), (0, 1.0, vec![0, 1]), (1, 1.0 / 36.0, vec![1])]
        );
    }

    #[test]
    fn single_point_family() {
        let s = build_space(vec![0.0], vec![3.0], DominatingSpec::Power { c: 3.0, k: 1.0 }, None)
            .unwrap();
        let fam = canonical_ball_family(&s).unwrap();
        assert_eq!(fam.len(), 1);
        assert_eq!(fam.ball(0).measure(), 3.0);
    }

    #[test]
    fn family_matches_brute_force_on_a_line() {
        // Every distinct member set of a closed ball around some center.
        let s = line(7);
        let fam = canonical_ball_family(&s).unwrap();
        let mut brute: Vec<Vec<usize>> = Vec::new();
        for c in 0..7 {
            for r in 0..7 {
                let m = members(&Ball::new(&s, c, r as f64));
                if !brute.contains(&m) {
                    brute.push(m);
                }
            }
        }
        assert_eq!(fam.len(), brute.len());
        for b in fam.balls() {
            assert!(brute.contains(&members(b)));
        }
    }

    #[test]
    fn family_cap_is_enforced() {
        let s = line(10);
        assert!(matches!(
            CanonicalFamily::build_with_cap(&s, 5),
            Err(Error::FamilyTooLarge { cap: 5, .. })
        ));
    }

    #[test]
    fn dilation_examples() {
        let s = two_point();
        let b = Ball::new(&s, 0, 0.5);
        assert_eq!(members(&dilate(&s, &b, 1.0).unwrap()), members(&b));
        assert_eq!(members(&dilate(&s, &b, 6.0).unwrap()), vec![0, 1]);
        let big = Ball::new(&s, 1, 5.0);
        assert!(dilate(&s, &big, 6.0).unwrap().is_saturated());
        assert!(dilate(&s, &b, 0.0).is_err());
    }

    #[test]
    fn doubling_examples() {
        let s = two_point();
        let whole = Ball::new(&s, 0, 1.0);
        assert!(is_default_doubling(&s, &whole));
        let atom = Ball::new(&s, 0, 0.5);
        assert!(s.beta0() > 2.0);
        assert!(is_default_doubling(&s, &atom));

        let heavy = build_space(
            vec![0.0, 1.0, 1.0, 0.0],
            vec![1.0, 1e6],
            DominatingSpec::Power { c: 2e6, k: 1.0 },
            Some(1.0),
        )
        .unwrap();
        let a = Ball::new(&heavy, 0, 0.5);
        assert!(!is_doubling(&heavy, &a, 6.0, 2.0).unwrap());
        assert!(is_doubling(&heavy, &a, 1.0, 2.0).is_err());
    }

    #[test]
    fn smallest_doubling_dilate_examples() {
        let s = two_point();
        let b = Ball::new(&s, 0, 1.0 / 36.0);
        assert_eq!(smallest_doubling_dilate(&s, &b).0, 0);
        let sat = Ball::new(&s, 0, 10.0);
        assert_eq!(smallest_doubling_dilate(&s, &sat), (0, sat.clone()));

        // A far heavy outlier: B(a, 20) = {a, b} but 6B takes in the outlier.
        let d = vec![0.0, 1.0, 100.0, 1.0, 0.0, 99.0, 100.0, 99.0, 0.0];
        let s = build_space(d, vec![1.0, 1.0, 1000.0], DominatingSpec::Power { c: 2000.0, k: 1.0 }, Some(1.0))
            .unwrap();
        let b = Ball::new(&s, 0, 20.0);
        assert!(s.ball_measure(0, 120.0) > s.beta0() * b.measure());
        let (k, t) = smallest_doubling_dilate(&s, &b);
        assert_eq!(k, 1);
        assert_eq!(t.radius(), 120.0);
        assert!(t.is_saturated());
    }

    #[test]
    fn k_coefficient_hand_case() {
        let s = two_point();
        let inner = Ball::new(&s, 0, 1.0);
        let outer = Ball::new(&s, 0, 36.0);
        assert_eq!(n_bq(1.0, 36.0).unwrap(), 2);
        let k = k_coefficient(&s, &inner, &outer, 0.0).unwrap();
        assert!((k - (1.0 + 1.0 / 6.0 + 1.0 / 36.0)).abs() < 1e-12);
        assert_eq!(k_coefficient(&s, &inner, &inner, 0.0).unwrap(), 1.0);
        let six = Ball::new(&s, 0, 6.0);
        assert!(k_coefficient(&s, &inner, &six, 0.0).unwrap() <= 2.0);
        let zero = Ball::new(&s, 0, 0.0);
        assert_eq!(k_coefficient(&s, &zero, &outer, 0.0), Err(Error::DegenerateBall));
        assert!(k_coefficient(&s, &inner, &outer, 1.0).is_err());
    }

    #[test]
    fn k_table_matches_direct_evaluation() {
        let s = random64(3);
        let fam = canonical_ball_family(&s).unwrap();
        for beta in [0.0, 1.0] {
            for i in (0..fam.len()).step_by(97) {
                let table = fam.k_table(&s, i, beta).unwrap();
                let thresholds = fam.n_thresholds(i);
                for q in (0..fam.len()).step_by(31) {
                    let (b, qb) = (fam.ball(i), fam.ball(q));
                    if qb.radius() > fam.max_radius() {
                        continue;
                    }
                    let n = n_bq(b.radius(), qb.radius()).unwrap() as usize;
                    assert_eq!(n, n_from_thresholds(&thresholds, qb.radius()));
                    let direct = k_coefficient(&s, b, qb, beta).unwrap();
                    assert_eq!(table[n], direct);
                }
            }
        }
    }

    #[test]
    fn supersets_match_brute_force() {
        let s = random64(1);
        let fam = canonical_ball_family(&s).unwrap();
        for i in (0..fam.len()).step_by(53) {
            let fast: Vec<usize> = fam.supersets(i).collect();
            let slow: Vec<usize> = (0..fam.len())
                .filter(|&q| q != i && fam.ball(i).is_subset_of(fam.ball(q)))
                .collect();
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn cover_examples() {
        let s = line(10);
        let disjoint = vec![Ball::new(&s, 0, 0.5), Ball::new(&s, 4, 1.0), Ball::new(&s, 8, 0.5)];
        assert_eq!(greedy_disjoint_cover(&s, &disjoint, 5.0).unwrap().len(), 3);
        let twins = vec![Ball::new(&s, 3, 1.0), Ball::new(&s, 3, 1.0)];
        assert_eq!(greedy_disjoint_cover(&s, &twins, 5.0).unwrap().len(), 1);
        assert!(greedy_disjoint_cover(&s, &twins, 4.0).is_err());
    }

    #[test]
    fn cover_on_random_space() {
        let s = random64(0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let grid = s.radius_grid();
        let balls: Vec<Ball> = (0..200)
            .map(|_| Ball::new(&s, rng.random_range(0..64), grid[rng.random_range(0..grid.len() / 3)]))
            .collect();
        let kept = greedy_disjoint_cover(&s, &balls, 5.0).unwrap();
        for (i, a) in kept.iter().enumerate() {
            for b in &kept[i + 1..] {
                assert!(a.is_disjoint_from(b));
            }
        }
        for b in &balls {
            for x in b.member_indices() {
                assert!(kept.iter().any(|k| s.distance(k.center(), x) <= 5.0 * k.radius() * (1.0 + 1e-12)));
            }
        }
    }

    proptest! {
        #[test]
        fn tilde_is_the_first_doubling_dilate(seed in 0u64..40, pick in 0usize..10_000) {
            let s = generate_space(
                &SpaceFamily::Random { n: 24, seed },
                &WeightScheme::Lognormal { seed },
            ).unwrap();
            let fam = canonical_ball_family(&s).unwrap();
            let i = pick % fam.len();
            let b = fam.ball(i);
            let k = fam.tilde_k(i);
            prop_assert_eq!(fam.tilde(i).radius(), six_pow(k) * b.radius());
            prop_assert!(is_default_doubling(&s, fam.tilde(i)));
            for j in 0..k {
                prop_assert!(!is_default_doubling(&s, &Ball::new(&s, b.center(), six_pow(j) * b.radius())));
            }
            for &u in fam.shell_ratios(i) {
                prop_assert!((0.0..=1.0).contains(&u));
            }
        }

        #[test]
        fn k_is_monotone_in_the_outer_ball(seed in 0u64..40, c in 0usize..24, a in 0usize..40, b in 0usize..40) {
            let s = generate_space(&SpaceFamily::Random { n: 24, seed }, &WeightScheme::Uniform).unwrap();
            let grid = s.radius_grid();
            let (ra, rb) = (grid[a % grid.len()], grid[b % grid.len()]);
            let (lo, hi) = if ra <= rb { (ra, rb) } else { (rb, ra) };
            let inner = Ball::new(&s, c, s.atom_radius());
            let k_lo = k_coefficient(&s, &inner, &Ball::new(&s, c, lo), 0.5).unwrap();
            let k_hi = k_coefficient(&s, &inner, &Ball::new(&s, c, hi), 0.5).unwrap();
            prop_assert!(k_lo <= k_hi);
            let n = n_bq(inner.radius(), hi).unwrap();
            prop_assert!(k_hi <= 1.0 + f64::from(n));
        }
    }
}
