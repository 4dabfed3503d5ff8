//! Acceptance gate: runs the seven criteria in order, each against its time
//! budget, and prints one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

use std::time::{Duration, Instant};

use fracint::cli::default_rbmo_symbols;
use fracint_core::geometry::{k_coefficient, CanonicalFamily};
use fracint_core::harness::{
    bound_experiment_commutator, bound_experiment_i, bound_experiment_multilinear, exact_suite,
    generate_space, log_distance_field, multilinear_rhs_terms, pointwise_domination_check,
    rbmo_suite, sharp_control_suite, spread, strong_type_suite, weak_type_suite, Domination,
    ExperimentConfig, SpaceFamily, WeightScheme,
};
use fracint_core::maximal::{
    doubling_maximal, fractional_maximal, lp_norm, sharp_maximal_parts_in, MaximalConfig,
};
use fracint_core::mspace::{build_space, check_upper_doubling};
use fracint_core::operators::{
    apply_fractional_integral, commutator, multilinear_commutator, standard_kernel,
};
use fracint_core::rbmo::{mean_on_ball, rbmo_norm, rbmo_norm_assignment};
use fracint_core::{Ball, DominatingSpec, FieldFunction, Space};

/// Largest ρ-dependence ratio measured on random:64 over seeds 0 to 4.
const FROZEN_RHO_RATIO: f64 = 1.0;

/// Fitted constants measured when the baselines were frozen. Drift beyond
/// a factor 2 is flagged in the output but does not fail a criterion.
const BASELINES: &[(&str, f64)] = &[
    ("fi-64", 0.336),
    ("fi-256", 0.373),
    ("comm-64", 0.155),
    ("ml-64", 0.0555),
    ("dom-fi", 0.23),
    ("dom-comm", 0.136),
    ("dom-ml", 0.042),
    ("weak", 0.98),
    ("strong", 1.08),
    ("sharp", 0.96),
];

type Outcome = Result<Vec<String>, String>;

struct Check {
    notes: Vec<String>,
    failures: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self {
            notes: Vec::new(),
            failures: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn baseline(&mut self, key: &str, value: f64) {
        let base = BASELINES
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .expect("baseline key");
        let drift = spread(&[value, base]);
        let flag = if drift > 2.0 { " DRIFT" } else { "" };
        self.note(format!("{key}={value:.4} (baseline {base}){flag}"));
    }

    fn finish(self) -> Outcome {
        if self.failures.is_empty() {
            Ok(self.notes)
        } else {
            Err(self.failures.join("; "))
        }
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn field(v: &[f64]) -> FieldFunction {
    FieldFunction::new(v.to_vec()).unwrap()
}

fn criterion_1() -> Outcome {
    let mut c = Check::new();
    let mut reports = 0;
    for seed in 0..5u64 {
        let families = [
            SpaceFamily::Grid1d { n: 16 },
            SpaceFamily::Grid2d { side: 8 },
            SpaceFamily::Random { n: 64, seed },
        ];
        for family in &families {
            let run = || exact_suite(family, &WeightScheme::Uniform, seed).map_err(|e| e.to_string());
            let a = run()?;
            let b = run()?;
            reports += a.len();
            for r in &a {
                c.require(
                    r.pass,
                    format!("{} seed {seed} {}: {:?}", family.label(), r.id, r.message),
                );
            }
            let ja = serde_json::to_string(&a).unwrap();
            let jb = serde_json::to_string(&b).unwrap();
            c.require(ja == jb, format!("{} seed {seed}: reports differ between runs", family.label()));
        }
    }
    c.note(format!("{reports} reports"));
    c.finish()
}

/// Points a, b at distance 1, unit masses, λ(x, r) = 2r, n = 1.
fn two_point() -> Space {
    build_space(
        vec![0.0, 1.0, 1.0, 0.0],
        vec![1.0, 1.0],
        DominatingSpec::Power { c: 2.0, k: 1.0 },
        Some(1.0),
    )
    .unwrap()
}

/// Brute-force quantities on a two-point space, computed straight from the
/// definitions without the library's ball machinery.
mod brute {
    pub const D: [[f64; 2]; 2] = [[0.0, 1.0], [1.0, 0.0]];
    pub const MU: [f64; 2] = [1.0, 1.0];

    pub fn lambda(r: f64) -> f64 {
        2.0 * r
    }

    pub fn ball_mass(c: usize, r: f64) -> f64 {
        (0..2).filter(|&y| D[c][y] <= r).map(|y| MU[y]).sum()
    }

    pub fn kernel(x: usize, y: usize, alpha: f64) -> f64 {
        if x == y {
            0.0
        } else {
            lambda(D[x][y]).powf(alpha - 1.0)
        }
    }

    pub fn integral(f: [f64; 2], alpha: f64) -> [f64; 2] {
        let at = |x: usize| (0..2).map(|y| kernel(x, y, alpha) * f[y] * MU[y]).sum();
        [at(0), at(1)]
    }

    /// `1 + Σ_{k=1}^{N} (μ(6ᵏB)/λ(6ᵏr))`, N the first k with 6ᵏr ≥ r_Q.
    pub fn k_coeff(c: usize, r_b: f64, r_q: f64) -> f64 {
        let mut k = 1.0;
        let mut r = r_b;
        while r < r_q * (1.0 - 1e-12) {
            r *= 6.0;
            k += ball_mass(c, r) / lambda(r);
        }
        k
    }
}

fn criterion_2() -> Outcome {
    let mut c = Check::new();
    let tol = 1e-12;
    let s = two_point();
    let alpha = 0.5;
    let kernel = standard_kernel(&s, alpha, 1.0).map_err(|e| e.to_string())?;

    let kab = brute::kernel(0, 1, alpha);
    c.require(close(kab, 0.5f64.sqrt(), tol), "brute kernel");
    c.require(close(kernel.value(0, 1), kab, tol), "kernel value K(a, b)");

    let f = [0.0, 1.0];
    let lib = apply_fractional_integral(&s, &kernel, &field(&f)).unwrap();
    let want = brute::integral(f, alpha);
    c.require(close(lib[0], want[0], tol) && close(lib[1], want[1], tol), "I f");

    // [b, I] f(a) = b(a)·I f(a) − I(b f)(a) with b = (0, 1), f = 1.
    let b = [0.0, 1.0];
    let comm_a = b[0] * brute::integral([1.0, 1.0], alpha)[0] - brute::integral(b, alpha)[0];
    let lib = commutator(&s, &kernel, &field(&b), &field(&[1.0, 1.0])).unwrap();
    c.require(close(lib[0], comm_a, tol), "commutator at a");

    // k = 2: Σ_y (b(a) − b(y))²·K(a, y)·f(y)·μ(y).
    let ml_a: f64 = (0..2)
        .map(|y| (b[0] - b[y]).powi(2) * brute::kernel(0, y, alpha) * brute::MU[y])
        .sum();
    let lib = multilinear_commutator(&s, &kernel, &[field(&b), field(&b)], &field(&[1.0, 1.0])).unwrap();
    c.require(close(lib[0], ml_a, tol), "multilinear k = 2 at a");

    let lib = k_coefficient(&s, &Ball::new(&s, 0, 1.0), &Ball::new(&s, 0, 36.0), 0.0).unwrap();
    c.require(close(lib, brute::k_coeff(0, 1.0, 36.0), tol), "K from B(a,1) to B(a,36)");
    c.require(close(lib, 1.0 + 1.0 / 6.0 + 1.0 / 36.0, tol), "K hand value");
    let atom = s.atom_radius();
    let lib = k_coefficient(&s, &Ball::new(&s, 0, atom), &Ball::new(&s, 0, 1.0), 0.0).unwrap();
    c.require(close(lib, brute::k_coeff(0, atom, 1.0), tol) && close(lib, 5.0, tol), "K from atom to {a, b}");

    let both = Ball::new(&s, 0, 1.0);
    c.require(close(mean_on_ball(&s, &field(&f), &both), 0.5, tol), "mean on {a, b}");
    c.require(
        close(lp_norm(&s, &field(&[1.0, 1.0]), 2.0).unwrap(), 2f64.sqrt(), tol),
        "L2 norm of 1",
    );

    // N f: every ball is doubling here, so N f(x) is the largest mean of
    // |f| over balls containing x: {x} and {a, b}.
    let f2 = [0.0, 2.0];
    let whole = (f2[0] + f2[1]) / 2.0;
    let lib = doubling_maximal(&s, &field(&f2)).unwrap();
    c.require(close(lib[0], whole.max(f2[0]), tol) && close(lib[1], whole.max(f2[1]), tol), "N f");

    // M_{1,(5)} f(x) = max over balls B ∋ x of ∫_B |f| / μ(5B).
    let f3 = [1.0, 0.0];
    let cfg = MaximalConfig::new(&s, 1.0, 5.0, 0.0).unwrap();
    let lib = fractional_maximal(&s, &field(&f3), &cfg).unwrap();
    let mut want = [0.0f64; 2];
    for center in 0..2 {
        for r in [atom, 1.0] {
            let members: Vec<usize> = (0..2).filter(|&y| brute::D[center][y] <= r).collect();
            let v = members.iter().map(|&y| f3[y].abs() * brute::MU[y]).sum::<f64>()
                / brute::ball_mass(center, 5.0 * r);
            for &x in &members {
                want[x] = want[x].max(v);
            }
        }
    }
    c.require(close(lib[0], want[0], tol) && close(lib[1], want[1], tol), "fractional maximal");

    // Sharp maximal of b: oscillation 1/2 on {a, b} about its own mean;
    // pair term |m_{a} b − m_{ab} b|/K = (1/2)/5.
    let family = CanonicalFamily::build(&s).unwrap();
    let parts = sharp_maximal_parts_in(&s, &family, &field(&b), 0.0).unwrap();
    for x in 0..2 {
        c.require(close(parts.oscillation[x], 0.5, tol), "sharp oscillation");
        c.require(close(parts.pair[x], 0.5 / 5.0, tol), "sharp pair");
    }

    let est = rbmo_norm(&s, &field(&b), 6.0).unwrap();
    c.require(close(est.norm_value, 0.5, tol) && close(est.pair_term, 0.1, tol), "RBMO norm");
    let est = rbmo_norm_assignment(&s, &field(&b), 6.0).unwrap();
    c.require(close(est.norm_value, 0.5, tol) && close(est.pair_term, 0.2, tol), "assignment RBMO norm");

    let heavy = build_space(
        vec![0.0, 1.0, 1.0, 0.0],
        vec![1.0, 3.0],
        DominatingSpec::Power { c: 2.0, k: 1.0 },
        Some(1.0),
    )
    .unwrap();
    let r = check_upper_doubling(&heavy);
    c.require(!r.pass && close(r.fitted_constant, 2.0, tol), "upper doubling failure ratio");
    c.note(format!("hand values matched to {tol:e}"));
    c.finish()
}

fn grid_config(n: usize, seed: u64, trials: usize, k: usize) -> ExperimentConfig {
    ExperimentConfig {
        space: SpaceFamily::Grid1d { n },
        weights: WeightScheme::Uniform,
        alpha: 0.4,
        p: 2.0,
        r: 1.5,
        epsilon: 1.0,
        k,
        trials,
        seed,
    }
}

const SEEDS: [u64; 3] = [0, 1, 2];

fn criterion_3() -> Outcome {
    let mut c = Check::new();
    let mut by_size = Vec::new();
    for n in [64usize, 256] {
        let mut fitted = Vec::new();
        for seed in SEEDS {
            let r = bound_experiment_i(&grid_config(n, seed, 50, 1)).map_err(|e| e.to_string())?;
            c.require(r.pass && r.fitted_constant.is_finite(), format!("n={n} seed={seed} not finite"));
            fitted.push(r.fitted_constant);
        }
        let s = spread(&fitted);
        c.require(s <= 1.2, format!("n={n}: seed spread {s:.4} > 1.2"));
        c.note(format!("n={n} seed spread {s:.4}"));
        by_size.push(fitted);
    }
    for (i, seed) in SEEDS.iter().enumerate() {
        let s = spread(&[by_size[0][i], by_size[1][i]]);
        c.require(s <= 1.5, format!("seed={seed}: size ratio {s:.4} > 1.5"));
    }
    let top = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
    c.baseline("fi-64", top(&by_size[0]));
    c.baseline("fi-256", top(&by_size[1]));
    c.finish()
}

fn criterion_4() -> Outcome {
    let mut c = Check::new();
    let mut sizes = Vec::new();
    for n in [64usize, 256] {
        let space = generate_space(&SpaceFamily::Grid1d { n }, &WeightScheme::Uniform).unwrap();
        let b0 = log_distance_field(&space, 0).unwrap();
        let b1 = log_distance_field(&space, n - 1).unwrap();
        let mut comm = Vec::new();
        let mut ml = Vec::new();
        for seed in SEEDS {
            let err = |e: fracint_core::Error| e.to_string();
            let r = bound_experiment_commutator(&grid_config(n, seed, 50, 1), &b0).map_err(err)?;
            let r2 = bound_experiment_commutator(&grid_config(n, seed, 50, 1), &b0.scaled(2.0)).map_err(err)?;
            c.require(r.ratios == r2.ratios, format!("n={n} seed={seed}: commutator not invariant under b -> 2b"));
            comm.push(r.fitted_constant);

            let bv = [b0.clone(), b1.clone()];
            let r = bound_experiment_multilinear(&grid_config(n, seed, 50, 2), &bv).map_err(err)?;
            let r2 = bound_experiment_multilinear(&grid_config(n, seed, 50, 2), &[b0.scaled(2.0), b1.clone()])
                .map_err(err)?;
            c.require(r.ratios == r2.ratios, format!("n={n} seed={seed}: multilinear not invariant under b -> 2b"));
            ml.push(r.fitted_constant);
        }
        for (name, v) in [("commutator", &comm), ("multilinear", &ml)] {
            let s = spread(v);
            c.require(s <= 2.0, format!("n={n} {name}: seed spread {s:.4} > 2"));
            c.note(format!("n={n} {name} spread {s:.3}"));
        }
        if n == 64 {
            c.baseline("comm-64", comm.iter().cloned().fold(0.0, f64::max));
            c.baseline("ml-64", ml.iter().cloned().fold(0.0, f64::max));
        }
        sizes.push((comm[0], ml[0]));
    }
    c.note(format!(
        "size ratios (reported only) comm {:.3} ml {:.3}",
        spread(&[sizes[0].0, sizes[1].0]),
        spread(&[sizes[0].1, sizes[1].1])
    ));
    c.finish()
}

fn criterion_5() -> Outcome {
    let mut c = Check::new();
    for k in 1..=4 {
        let want = 2 + (1..k).map(|i| binomial(k, i)).sum::<usize>();
        c.require(multilinear_rhs_terms(k) == Ok(want), format!("term count k={k}"));
    }
    let space = generate_space(&SpaceFamily::Grid1d { n: 64 }, &WeightScheme::Uniform).unwrap();
    let b0 = log_distance_field(&space, 0).unwrap();
    let b1 = log_distance_field(&space, 63).unwrap();
    let variants = [
        (Domination::FractionalIntegral, vec![], "dom-fi"),
        (Domination::Commutator, vec![b0.clone()], "dom-comm"),
        (Domination::Multilinear, vec![b0, b1], "dom-ml"),
    ];
    for (variant, bs, key) in variants {
        let mut fitted = Vec::new();
        for seed in 0..5 {
            let cfg = ExperimentConfig {
                space: SpaceFamily::Grid1d { n: 64 },
                weights: WeightScheme::Uniform,
                alpha: 0.4,
                p: 2.25,
                r: 2.0,
                epsilon: 1.0,
                k: bs.len().max(1),
                trials: 100,
                seed,
            };
            // A point with RHS = 0 and LHS > 0 is an error, so Ok means the
            // degenerate points all had LHS = 0 exactly.
            let r = pointwise_domination_check(&cfg, variant, &bs)
                .map_err(|e| format!("{} seed {seed}: {e}", variant.label()))?;
            c.require(r.pass && r.fitted_constant.is_finite(), format!("{} seed {seed}", variant.label()));
            if variant == Domination::Multilinear {
                c.require(r.get_metric("rhs_terms") == Some(4.0), "multilinear rhs_terms metric");
            }
            fitted.push(r.fitted_constant);
        }
        let s = spread(&fitted);
        c.require(s <= 2.0, format!("{}: seed spread {s:.4} > 2", variant.label()));
        c.baseline(key, fitted.iter().cloned().fold(0.0, f64::max));
    }
    c.finish()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn criterion_6() -> Outcome {
    let mut c = Check::new();
    let (mut weak, mut strong, mut strong0, mut sharp) = (vec![], vec![], vec![], vec![]);
    for seed in 0..5 {
        let space = generate_space(&SpaceFamily::Random { n: 128, seed }, &WeightScheme::Uniform).unwrap();
        let family = CanonicalFamily::build(&space).unwrap();
        let err = |e: fracint_core::Error| e.to_string();
        let cfg = MaximalConfig::new(&space, 1.5, 5.0, 0.5).map_err(err)?;
        let cfg0 = MaximalConfig::new(&space, 1.5, 5.0, 0.0).map_err(err)?;
        let reports = [
            weak_type_suite(&space, &family, &cfg, 20, seed).map_err(err)?,
            strong_type_suite(&space, &family, &cfg, 2.0, 20, seed).map_err(err)?,
            strong_type_suite(&space, &family, &cfg0, 2.0, 20, seed).map_err(err)?,
            // Draws mean-zero test functions only.
            sharp_control_suite(&space, &family, 0.0, 2.0, 20, seed).map_err(err)?,
        ];
        for (r, v) in reports.iter().zip([&mut weak, &mut strong, &mut strong0, &mut sharp]) {
            c.require(r.pass && r.fitted_constant.is_finite(), format!("{} seed {seed}", r.id));
            v.push(r.fitted_constant);
        }
    }
    for (name, v) in [("weak", &weak), ("strong", &strong), ("strong-beta0", &strong0), ("sharp", &sharp)] {
        let s = spread(v);
        c.require(s <= 2.0, format!("{name}: seed spread {s:.4} > 2"));
    }
    let top = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
    c.baseline("weak", top(&weak));
    c.baseline("strong", top(&strong));
    c.baseline("sharp", top(&sharp));
    c.finish()
}

fn criterion_7() -> Outcome {
    let mut c = Check::new();
    let (mut tele, mut jn, mut rho, mut osc) = (vec![], vec![], vec![], vec![]);
    for seed in 0..5 {
        let space = generate_space(&SpaceFamily::Random { n: 64, seed }, &WeightScheme::Uniform).unwrap();
        let family = CanonicalFamily::build(&space).unwrap();
        let symbols = default_rbmo_symbols(&space, seed).map_err(|e| e.message)?;
        let reports = rbmo_suite(&space, &family, &symbols, seed).map_err(|e| e.to_string())?;
        for r in &reports {
            c.require(r.pass && r.fitted_constant.is_finite(), format!("{} seed {seed}", r.id));
        }
        tele.push(reports[0].fitted_constant);
        jn.push(reports[1].fitted_constant);
        rho.push(reports[2].fitted_constant);
        osc.push(reports[2].get_metric("oscillation_spread").unwrap_or(f64::NAN));
    }
    for (name, v) in [("telescoping", &tele), ("john-nirenberg", &jn)] {
        let s = spread(v);
        c.require(s <= 2.0, format!("{name}: seed spread {s:.4} > 2"));
        c.note(format!("{name} spread {s:.3}"));
    }
    let worst = rho.iter().cloned().fold(0.0, f64::max);
    c.require(
        worst <= FROZEN_RHO_RATIO * 1.5,
        format!("rho ratio {worst:.4} > {:.2}", FROZEN_RHO_RATIO * 1.5),
    );
    c.note(format!(
        "rho ratio {worst:.4}, oscillation-only spread {:.3}",
        osc.iter().cloned().fold(0.0, f64::max)
    ));
    c.finish()
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 7] = [
        ("exact suite", 60, criterion_1),
        ("two-point oracle", 1, criterion_2),
        ("fractional integral stability", 120, criterion_3),
        ("commutator and multilinear stability", 300, criterion_4),
        ("pointwise dominations", 300, criterion_5),
        ("weak and strong type", 120, criterion_6),
        ("RBMO suites", 60, criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(budget);
        let (status, detail) = match (&outcome, over) {
            (Ok(notes), false) => ("PASS", notes.join(", ")),
            (Ok(notes), true) => ("FAIL", format!("over the {budget} s budget; {}", notes.join(", "))),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!(
            "criterion {} {status} {name} ({:.2} s / {budget} s): {detail}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
