//! Maximal operators over the canonical ball family, `Lᵖ(μ)` norms and the
//! weak-type level-set check.
//!
//! Every supremum over balls containing `x` is a maximum over the family
//! balls whose member set contains `x`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::FieldFunction;
use crate::geometry::{n_from_thresholds, CanonicalFamily, PrefixSums};
use crate::math;
use crate::mspace::Space;
use crate::rbmo::FamilyMeans;
use crate::report::{ArgMax, VerificationReport, Witness};

/// `(Σ |f|ᵖ·μ)^{1/p}`, or `max |f|` for `p = ∞`.
pub fn lp_norm(space: &Space, f: &FieldFunction, p: f64) -> Result<f64> {
    f.check_len(space.point_count(), "field function")?;
    if p == f64::INFINITY {
        return Ok(f.max_abs());
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            reason: "exponent must lie in [1, ∞]",
        });
    }
    // Normalizing by max |f| keeps the norm exactly homogeneous under
    // power-of-two scalings and avoids overflow.
    let top = f.max_abs();
    if top == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = f
        .values()
        .iter()
        .zip(space.weights())
        .map(|(v, w)| math::pow(math::abs(*v) / top, p) * w)
        .sum();
    Ok(top * math::pow(s, 1.0 / p))
}

/// Spreads a per-ball value to the ball's members, keeping the maximum.
fn spread_max(space: &Space, family: &CanonicalFamily, values: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0f64; space.point_count()];
    for (i, ball) in family.balls().iter().enumerate() {
        let v = values[i];
        for &y in &space.neighbors(ball.center())[..ball.size()] {
            let slot = &mut out[y as usize];
            if v > *slot {
                *slot = v;
            }
        }
    }
    out
}

/// [`doubling_maximal_in`] over a freshly built canonical family.
pub fn doubling_maximal(space: &Space, f: &FieldFunction) -> Result<FieldFunction> {
    let family = CanonicalFamily::build(space)?;
    doubling_maximal_in(space, &family, f)
}

/// `N f(x) = max over doubling B ∋ x of (1/μ(B))·Σ_B |f|·μ`.
///
/// The atom `{x}` is always doubling, so `N f(x) ≥ |f(x)|`.
pub fn doubling_maximal_in(
    space: &Space,
    family: &CanonicalFamily,
    f: &FieldFunction,
) -> Result<FieldFunction> {
    f.check_len(space.point_count(), "field function")?;
    let aw: Vec<f64> = f
        .values()
        .iter()
        .zip(space.weights())
        .map(|(v, w)| math::abs(*v) * w)
        .collect();
    let sums = PrefixSums::new(space, &aw);
    let values: Vec<f64> = family
        .balls()
        .iter()
        .enumerate()
        .map(|(i, b)| {
            if b.size() == 1 && family.is_doubling(i) {
                // Exact, where (|f|·μ)/μ may round below |f|.
                math::abs(f[b.center()])
            } else if family.is_doubling(i) {
                sums.prefix(b.center(), b.size()) / b.measure()
            } else {
                // Means are nonnegative; a non-doubling ball never wins.
                -1.0
            }
        })
        .collect();
    Ok(FieldFunction::from_vec_unchecked(spread_max(space, family, &values)))
}

/// The two suprema of the sharp maximal operator at each point.
#[derive(Debug, Clone, PartialEq)]
pub struct SharpParts {
    /// `max_{B∋x} (1/μ(6B))·Σ_B |f − m_{B̃}f|·μ` over all family balls.
    pub oscillation: FieldFunction,
    /// `max over doubling B ⊆ Q, B ∋ x, of |m_B f − m_Q f| / K^(β)_{B,Q}`.
    pub pair: FieldFunction,
}

/// [`sharp_maximal_in`] over a freshly built canonical family.
pub fn sharp_maximal(space: &Space, f: &FieldFunction, beta: f64) -> Result<FieldFunction> {
    let family = CanonicalFamily::build(space)?;
    sharp_maximal_in(space, &family, f, beta)
}

/// `M^{♯,(β)} f`: the sum of the oscillation and pair suprema of
/// [`SharpParts`].
pub fn sharp_maximal_in(
    space: &Space,
    family: &CanonicalFamily,
    f: &FieldFunction,
    beta: f64,
) -> Result<FieldFunction> {
    let parts = sharp_maximal_parts_in(space, family, f, beta)?;
    Ok(parts.oscillation.axpy(1.0, &parts.pair))
}

pub fn sharp_maximal_parts_in(
    space: &Space,
    family: &CanonicalFamily,
    f: &FieldFunction,
    beta: f64,
) -> Result<SharpParts> {
    let mut parts = sharp_maximal_batch_in(space, family, core::slice::from_ref(f), beta)?;
    Ok(parts.pop().expect("one input, one output"))
}

/// [`SharpParts`] for several functions, sharing one sweep over the nested
/// doubling pairs.
pub fn sharp_maximal_batch_in(
    space: &Space,
    family: &CanonicalFamily,
    fs: &[FieldFunction],
    beta: f64,
) -> Result<Vec<SharpParts>> {
    for f in fs {
        f.check_len(space.point_count(), "field function")?;
    }
    // Validates beta before any work.
    if !family.is_empty() {
        family.k_table(space, 0, beta)?;
    }
    let means: Vec<FamilyMeans> = fs.iter().map(|f| FamilyMeans::new(space, family, f)).collect();
    let m = fs.len();
    let mut pair = vec![0.0f64; family.len() * m];
    for i in 0..family.len() {
        if !family.is_doubling(i) {
            continue;
        }
        let table = family.k_table(space, i, beta)?;
        let thresholds = family.n_thresholds(i);
        let slots = &mut pair[i * m..(i + 1) * m];
        for q in family.supersets(i) {
            if !family.is_doubling(q) {
                continue;
            }
            let k = table[n_from_thresholds(&thresholds, family.ball(q).radius())];
            for (slot, mf) in slots.iter_mut().zip(&means) {
                let v = math::abs(mf.ball[i] - mf.ball[q]) / k;
                if v > *slot {
                    *slot = v;
                }
            }
        }
    }
    let mut out = Vec::with_capacity(m);
    for (j, f) in fs.iter().enumerate() {
        let mut osc = Vec::with_capacity(family.len());
        for (i, ball) in family.balls().iter().enumerate() {
            let c = ball.center();
            let mean = means[j].tilde[i];
            let s: f64 = space.neighbors(c)[..ball.size()]
                .iter()
                .map(|&y| math::abs(f[y as usize] - mean) * space.weight(y as usize))
                .sum();
            osc.push(s / family.measure6(i));
        }
        let pj: Vec<f64> = (0..family.len()).map(|i| pair[i * m + j]).collect();
        out.push(SharpParts {
            oscillation: FieldFunction::from_vec_unchecked(spread_max(space, family, &osc)),
            pair: FieldFunction::from_vec_unchecked(spread_max(space, family, &pj)),
        });
    }
    Ok(out)
}

/// Parameters of the fractional maximal operator `M^{(β)}_{r,(η)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaximalConfig {
    pub r: f64,
    pub eta: f64,
    pub beta: f64,
}

impl MaximalConfig {
    /// Checks `r ≥ 1`, `η ≥ 5`, `0 ≤ β < dim_n` and `r < dim_n/β`.
    pub fn new(space: &Space, r: f64, eta: f64, beta: f64) -> Result<Self> {
        let cfg = Self { r, eta, beta };
        cfg.validate(space)?;
        Ok(cfg)
    }

    pub fn validate(&self, space: &Space) -> Result<()> {
        let n = space.dim_n();
        if !(self.r >= 1.0 && self.r.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "r",
                value: self.r,
                reason: "must be a finite real at least 1",
            });
        }
        if !(self.eta >= 5.0 && self.eta.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "eta",
                value: self.eta,
                reason: "must be at least 5",
            });
        }
        if !(self.beta >= 0.0 && self.beta < n) {
            return Err(Error::InvalidParameter {
                name: "beta",
                value: self.beta,
                reason: "must lie in [0, dim_n)",
            });
        }
        if self.beta > 0.0 && self.r * self.beta >= n {
            return Err(Error::InvalidParameter {
                name: "r",
                value: self.r,
                reason: "must be below dim_n/beta",
            });
        }
        Ok(())
    }

    /// The weak-type exponent `n·r/(n − β·r)`.
    pub fn weak_exponent(&self, space: &Space) -> f64 {
        let n = space.dim_n();
        n * self.r / (n - self.beta * self.r)
    }
}

/// [`fractional_maximal_in`] over a freshly built canonical family.
pub fn fractional_maximal(
    space: &Space,
    f: &FieldFunction,
    config: &MaximalConfig,
) -> Result<FieldFunction> {
    let family = CanonicalFamily::build(space)?;
    fractional_maximal_in(space, &family, f, config)
}

/// `M^{(β)}_{r,(η)} f(x) = max_{B∋x} { μ(ηB)^{−(1−βr/n)}·Σ_B |f|ʳ·μ }^{1/r}`.
pub fn fractional_maximal_in(
    space: &Space,
    family: &CanonicalFamily,
    f: &FieldFunction,
    config: &MaximalConfig,
) -> Result<FieldFunction> {
    config.validate(space)?;
    f.check_len(space.point_count(), "field function")?;
    let r = config.r;
    let aw: Vec<f64> = f
        .values()
        .iter()
        .zip(space.weights())
        .map(|(v, w)| math::pow(math::abs(*v), r) * w)
        .collect();
    let sums = PrefixSums::new(space, &aw);
    let exponent = 1.0 - config.beta * r / space.dim_n();
    let values: Vec<f64> = family
        .balls()
        .iter()
        .map(|b| {
            let s = sums.prefix(b.center(), b.size());
            let big = space.ball_measure(b.center(), config.eta * b.radius());
            math::pow(s / math::pow(big, exponent), 1.0 / r)
        })
        .collect();
    Ok(FieldFunction::from_vec_unchecked(spread_max(space, family, &values)))
}

/// [`weak_type_check_in`] over a freshly built canonical family.
pub fn weak_type_check(
    space: &Space,
    f: &FieldFunction,
    config: &MaximalConfig,
    levels: &[f64],
) -> Result<VerificationReport> {
    let family = CanonicalFamily::build(space)?;
    weak_type_check_in(space, &family, f, config, levels)
}

/// For each level `t`, the smallest `C` with
/// `μ({M^{(β)}_{r,(η)} f > t}) ≤ (C‖f‖_r/t)^q`, `q = nr/(n − βr)`,
/// that is `C = t·μ(E_t)^{1/q}/‖f‖_r`. Ratios are per level in grid order;
/// the fitted constant is their maximum.
pub fn weak_type_check_in(
    space: &Space,
    family: &CanonicalFamily,
    f: &FieldFunction,
    config: &MaximalConfig,
    levels: &[f64],
) -> Result<VerificationReport> {
    if let Some(&bad) = levels.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidParameter {
            name: "level",
            value: bad,
            reason: "levels must be positive",
        });
    }
    let m = fractional_maximal_in(space, family, f, config)?;
    let norm = lp_norm(space, f, config.r)?;
    let q = config.weak_exponent(space);
    let mut report = VerificationReport::new("weak-type");
    report.metric("q", q);
    report.metric("f_norm_r", norm);
    if norm == 0.0 {
        report.ratios = vec![0.0; levels.len()];
        report.message = Some("vacuous pass: f is zero".into());
        return Ok(report);
    }
    let mut worst: ArgMax<usize> = ArgMax::new();
    for (j, &t) in levels.iter().enumerate() {
        let measure: f64 = (0..space.point_count())
            .filter(|&x| m[x] > t)
            .map(|x| space.weight(x))
            .sum();
        let c = t * math::pow(measure, 1.0 / q) / norm;
        report.ratios.push(c);
        worst.offer(c, || j);
    }
    report.fitted_constant = worst.value;
    if let Some(j) = worst.witness {
        report.metric("worst_level", levels[j]);
        report.witness = Some(Witness {
            points: (0..space.point_count()).filter(|&x| m[x] > levels[j]).collect(),
            ..Witness::default()
        });
    }
    if !worst.value.is_finite() {
        report.fail(format!("weak-type constant is not finite: {}", worst.value));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate_space, SpaceFamily, WeightScheme};
    use crate::testutil::two_point;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ff(v: &[f64]) -> FieldFunction {
        FieldFunction::new(v.to_vec()).unwrap()
    }

    fn random_field(seed: u64, n: usize) -> FieldFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ff(&(0..n).map(|_| rng.random_range(-2.0..2.0)).collect::<Vec<_>>())
    }

    fn small_space(seed: u64) -> Space {
        generate_space(
            &SpaceFamily::Random { n: 20, seed },
            &WeightScheme::Lognormal { seed },
        )
        .unwrap()
    }

    #[test]
    fn lp_norm_examples() {
        let s = two_point();
        assert_eq!(lp_norm(&s, &ff(&[0.0, 0.0]), 2.0).unwrap(), 0.0);
        assert!((lp_norm(&s, &ff(&[1.0, 1.0]), 2.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(lp_norm(&s, &ff(&[-3.0, 2.0]), f64::INFINITY).unwrap(), 3.0);
        assert!(lp_norm(&s, &ff(&[1.0, 1.0]), 0.5).is_err());
        assert!(lp_norm(&s, &ff(&[1.0]), 2.0).is_err());
    }

    #[test]
    fn two_point_doubling_maximal() {
        // Balls {a}, {b}, {a,b}, all doubling.
        let s = two_point();
        let n = doubling_maximal(&s, &ff(&[0.0, 2.0])).unwrap();
        assert_eq!(n.values(), &[1.0, 2.0]);
        let c = doubling_maximal(&s, &ff(&[3.0, 3.0])).unwrap();
        assert_eq!(c.values(), &[3.0, 3.0]);
    }

    #[test]
    fn two_point_sharp_maximal() {
        // Oscillation: only {a,b} is nonzero, (|0−½| + |1−½|)/μ(6·{a,b}) = ½.
        // Pairs {a} ⊆ {a,b} and {b} ⊆ {a,b}: N = 2 from r = 1/36 to 1, shell
        // ratios μ/λ = 1/(1/3) = 3 and 2/2 = 1, so K = 5 and |½|/5 = 0.1.
        let s = two_point();
        let fam = CanonicalFamily::build(&s).unwrap();
        let parts = sharp_maximal_parts_in(&s, &fam, &ff(&[0.0, 1.0]), 0.0).unwrap();
        for x in 0..2 {
            assert!((parts.oscillation[x] - 0.5).abs() < 1e-12);
            assert!((parts.pair[x] - 0.1).abs() < 1e-12);
        }
        let m = sharp_maximal(&s, &ff(&[0.0, 1.0]), 0.0).unwrap();
        assert!((m[0] - 0.6).abs() < 1e-12 && (m[1] - 0.6).abs() < 1e-12);
        assert_eq!(sharp_maximal(&s, &ff(&[4.0, 4.0]), 0.0).unwrap().max_abs(), 0.0);
        assert!(sharp_maximal(&s, &ff(&[0.0, 1.0]), 1.0).is_err());
    }

    #[test]
    fn two_point_fractional_maximal() {
        // r = 1, η = 5, β = 0, f = (1, 0): {a} gives 1/μ(5·{a}) = 1, {a,b}
        // gives 1/μ(5·{a,b}) = ½, {b} gives 0.
        let s = two_point();
        let cfg = MaximalConfig::new(&s, 1.0, 5.0, 0.0).unwrap();
        let m = fractional_maximal(&s, &ff(&[1.0, 0.0]), &cfg).unwrap();
        assert_eq!(m.values(), &[1.0, 0.5]);
    }

    #[test]
    fn config_validation() {
        let s = generate_space(&SpaceFamily::Grid2d { side: 3 }, &WeightScheme::Uniform).unwrap();
        assert!(MaximalConfig::new(&s, 1.5, 5.0, 0.5).is_ok());
        assert!(MaximalConfig::new(&s, 0.5, 5.0, 0.0).is_err());
        assert!(MaximalConfig::new(&s, 1.5, 4.0, 0.0).is_err());
        assert!(MaximalConfig::new(&s, 1.5, 5.0, 2.0).is_err());
        assert!(MaximalConfig::new(&s, 4.0, 5.0, 0.5).is_err());
        let cfg = MaximalConfig::new(&s, 1.5, 5.0, 0.5).unwrap();
        assert!((cfg.weak_exponent(&s) - 2.0 * 1.5 / (2.0 - 0.75)).abs() < 1e-15);
    }

    #[test]
    fn weak_type_degenerate_cases() {
        let s = small_space(1);
        let cfg = MaximalConfig::new(&s, 1.5, 5.0, 0.5).unwrap();
        let zero = weak_type_check(&s, &FieldFunction::zeros(20), &cfg, &[0.1, 1.0]).unwrap();
        assert!(zero.pass);
        assert_eq!(zero.ratios, vec![0.0, 0.0]);
        let f = random_field(3, 20);
        let top = fractional_maximal(&s, &f, &cfg).unwrap().max_abs();
        let rep = weak_type_check(&s, &f, &cfg, &[top * 1.01, top * 0.5]).unwrap();
        assert_eq!(rep.ratios[0], 0.0);
        assert!(rep.ratios[1] > 0.0 && rep.pass);
        assert!(weak_type_check(&s, &f, &cfg, &[0.0]).is_err());
    }

    #[test]
    fn power_of_two_scaling_is_exact() {
        let s = small_space(2);
        let fam = CanonicalFamily::build(&s).unwrap();
        let f = random_field(5, 20);
        let g = f.scaled(4.0);
        assert_eq!(lp_norm(&s, &g, 2.5).unwrap(), 4.0 * lp_norm(&s, &f, 2.5).unwrap());
        assert_eq!(
            doubling_maximal_in(&s, &fam, &g).unwrap(),
            doubling_maximal_in(&s, &fam, &f).unwrap().scaled(4.0)
        );
        assert_eq!(
            sharp_maximal_in(&s, &fam, &g, 0.5).unwrap(),
            sharp_maximal_in(&s, &fam, &f, 0.5).unwrap().scaled(4.0)
        );
    }

    #[test]
    fn batch_matches_single() {
        let s = small_space(3);
        let fam = CanonicalFamily::build(&s).unwrap();
        let fs: Vec<FieldFunction> = (0..3).map(|i| random_field(10 + i, 20)).collect();
        let batch = sharp_maximal_batch_in(&s, &fam, &fs, 1.0).unwrap();
        for (f, parts) in fs.iter().zip(&batch) {
            assert_eq!(&sharp_maximal_parts_in(&s, &fam, f, 1.0).unwrap(), parts);
        }
    }

    proptest! {
        #[test]
        fn pointwise_invariants(seed in 0u64..200, t in 0.01f64..100.0, c in -5.0f64..5.0) {
            let s = small_space(seed % 8);
            let fam = CanonicalFamily::build(&s).unwrap();
            let f = random_field(seed, 20);
            let n = doubling_maximal_in(&s, &fam, &f).unwrap();
            let sup = f.max_abs();
            for x in 0..20 {
                prop_assert!(n[x] >= f[x].abs());
                prop_assert!(n[x] <= sup * (1.0 + 1e-15));
            }
            let nt = doubling_maximal_in(&s, &fam, &f.scaled(t)).unwrap();
            prop_assert!(nt.max_abs_diff(&n.scaled(t)) <= 1e-13 * t * sup);

            let m = sharp_maximal_in(&s, &fam, &f, 0.5).unwrap();
            prop_assert!(m.values().iter().all(|&v| v >= 0.0));
            let shifted = sharp_maximal_in(&s, &fam, &f.shifted(c), 0.5).unwrap();
            prop_assert!(shifted.max_abs_diff(&m) <= 1e-10 * (1.0 + sup + c.abs()));

            for (r1, r2) in [(1.0, 1.5), (1.5, 2.5), (1.0, 3.0)] {
                let a = fractional_maximal_in(&s, &fam, &f, &MaximalConfig::new(&s, r1, 5.0, 0.0).unwrap()).unwrap();
                let b = fractional_maximal_in(&s, &fam, &f, &MaximalConfig::new(&s, r2, 5.0, 0.0).unwrap()).unwrap();
                for x in 0..20 {
                    prop_assert!(a[x] <= b[x] * (1.0 + 1e-12));
                }
            }
        }
    }
}
