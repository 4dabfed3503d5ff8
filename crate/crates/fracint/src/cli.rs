//! Argument parsing and dispatch. Every run writes exactly one
//! [`Document`]; the exit status is 0 iff every report in it passes.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use fracint_core::geometry::{k_coefficient, n_bq};
use fracint_core::harness::{
    bound_experiment_commutator, bound_experiment_i, bound_experiment_multilinear, covering_check,
    exact_suite, generate_space, generate_test_functions, k_properties_suite,
    pointwise_domination_check, rbmo_suite, sharp_control_suite, stability_report,
    strong_type_suite, weak_type_suite, Domination, ExperimentConfig, SpaceFamily, TestScheme,
    WeightScheme,
};
use fracint_core::maximal::{
    doubling_maximal, fractional_maximal, sharp_maximal, weak_type_check, MaximalConfig,
};
use fracint_core::mspace::{check_metric, check_upper_doubling, estimate_geometric_doubling};
use fracint_core::operators::{
    apply_fractional_integral, check_kernel_regularity, check_kernel_size, commutator,
    multilinear_commutator, standard_kernel,
};
use fracint_core::rbmo::{rbmo_norm, rbmo_norm_assignment, DEFAULT_RHO};
use fracint_core::report::BallSummary;
use fracint_core::{Ball, CanonicalFamily, FieldFunction, Space, VerificationReport};
use serde_json::json;

use crate::error::{CliError, EXIT_ASSERTION, EXIT_INPUT};
use crate::formats::{
    kernel_triplets, load_experiment_config, load_function, load_space, parse_weights, Document,
    Format, SpaceFile,
};

#[derive(Debug, Parser)]
#[command(
    name = "fracint",
    version,
    about = "Fractional integrals, maximal operators and RBMO on finite metric measure spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Space file, or grid1d:N, grid2d:SIDE, random:N:SEED, clustered:N:CLUSTERS:SEED.
    #[arg(long, global = true)]
    pub space: Option<String>,
    /// Masses for generated spaces: uniform, lognormal:SEED or powerlaw:EXPONENT.
    #[arg(long, global = true, default_value = "uniform")]
    pub weights: String,
    /// Function file (JSON array or whitespace list), const:C, indicator:X or logdist:X.
    #[arg(long, global = true)]
    pub function: Option<String>,
    /// Symbol b, same forms as --function; repeat for a vector of symbols.
    #[arg(long = "b", global = true)]
    pub b: Vec<String>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Kernel regularity.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub r: Option<f64>,
    #[arg(long, global = true, default_value_t = 5.0)]
    pub eta: f64,
    #[arg(long, global = true, default_value_t = 0.0)]
    pub beta: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_RHO)]
    pub rho: f64,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Record wall times (makes reports nondeterministic).
    #[arg(long, global = true)]
    pub timing: bool,
    /// Also write one CSV row per trial ratio.
    #[arg(long, global = true)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Validate a space and report its constants.
    SpaceCheck {
        /// Write the space as a distance-matrix space file.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Check the size and regularity of the standard kernel.
    KernelCheck {
        /// Write the kernel as (i, j, value) triplets.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Apply the fractional integral to --function.
    Apply,
    /// Apply the commutator with one --b to --function.
    Commutator,
    /// Apply the multilinear commutator with the --b vector to --function.
    Multilinear,
    /// Fractional maximal operator, or the doubling maximal operator.
    Maximal {
        #[arg(long)]
        doubling: bool,
    },
    /// Sharp maximal operator at order --beta.
    Sharp,
    /// RBMO norm estimate of the symbol.
    Rbmo {
        /// Use the assignment (median) form of the norm.
        #[arg(long)]
        assignment: bool,
    },
    /// K coefficient between two concentric balls.
    Kcoeff {
        #[arg(long)]
        center: usize,
        #[arg(long)]
        inner: f64,
        #[arg(long)]
        outer: f64,
    },
    /// Greedy disjoint cover over the canonical family.
    Cover,
    /// Weak-type estimate of the fractional maximal operator.
    Weaktype,
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Experiment config (JSON with the experiment field names).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also rerun at two more seeds (and a refined space for the bound
        /// experiments) and require agreement within this factor.
        #[arg(long)]
        stability: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Exact,
    Bound,
    Commutator,
    Multilinear,
    DominationIntegral,
    DominationCommutator,
    DominationMultilinear,
    Weak,
    Strong,
    Sharp,
    Rbmo,
    Kprops,
    Cover,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::SpaceCheck { .. } => "space-check",
            Self::KernelCheck { .. } => "kernel-check",
            Self::Apply => "apply",
            Self::Commutator => "commutator",
            Self::Multilinear => "multilinear",
            Self::Maximal { .. } => "maximal",
            Self::Sharp => "sharp",
            Self::Rbmo { .. } => "rbmo",
            Self::Kcoeff { .. } => "kcoeff",
            Self::Cover => "cover",
            Self::Weaktype => "weaktype",
            Self::Verify { .. } => "verify",
        }
    }
}

/// Parses `args` (program name first), runs, writes the document and
/// returns the exit status.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_INPUT),
            };
        }
    };
    ExitCode::from(execute(&cli))
}

/// Runs a parsed invocation and returns its exit status.
pub fn execute(cli: &Cli) -> u8 {
    let mut ctx = Ctx {
        o: &cli.opts,
        doc: Document::new(cli.command.name()),
    };
    let start = Instant::now();
    let mut code = match ctx.dispatch(&cli.command) {
        Ok(()) if ctx.doc.reports.iter().all(|r| r.pass) => 0,
        Ok(()) => {
            for r in ctx.doc.reports.iter().filter(|r| !r.pass) {
                eprintln!("{} failed: {}", r.id, r.message.as_deref().unwrap_or("no message"));
            }
            EXIT_ASSERTION
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ctx.doc.error = Some(crate::formats::ErrorInfo {
                exit_code: e.code,
                message: e.message,
            });
            e.code
        }
    };
    if cli.opts.timing {
        let t = start.elapsed().as_secs_f64();
        for r in &mut ctx.doc.reports {
            r.wall_time_s.get_or_insert(t);
        }
    } else {
        for r in &mut ctx.doc.reports {
            r.wall_time_s = None;
        }
    }
    if let Err(e) = ctx.doc.write(cli.opts.format, cli.opts.out.as_deref()) {
        eprintln!("error: --out: {e}");
        code = code.max(EXIT_INPUT);
    }
    if let Some(path) = &cli.opts.table {
        if let Err(e) = ctx.doc.write_table(path) {
            eprintln!("error: --table: {e}");
            code = code.max(EXIT_INPUT);
        }
    }
    code
}

struct Ctx<'a> {
    o: &'a Options,
    doc: Document,
}

fn required<T: Copy>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::input(format!("{flag} is required")))
}

fn write_json(path: &Path, value: &impl serde::Serialize, flag: &str) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    std::fs::write(path, text + "\n")
        .map_err(|e| CliError::input(format!("{flag}: cannot write {}: {e}", path.display())))
}

impl Ctx<'_> {
    fn space(&mut self) -> Result<Space, CliError> {
        let spec = self
            .o
            .space
            .as_deref()
            .ok_or_else(|| CliError::input("--space is required"))?;
        self.doc.input("space", spec);
        let weights = self.weights()?;
        load_space(spec, &weights)
    }

    /// A built-in space generator, for suites that regenerate or refine.
    fn family(&mut self) -> Result<SpaceFamily, CliError> {
        let spec = self
            .o
            .space
            .as_deref()
            .ok_or_else(|| CliError::input("--space is required"))?;
        self.doc.input("space", spec);
        SpaceFamily::parse(spec).ok_or_else(|| {
            CliError::input(format!("--space: '{spec}' is not a built-in generator"))
        })
    }

    fn weights(&mut self) -> Result<WeightScheme, CliError> {
        self.doc.input("weights", &self.o.weights);
        parse_weights(&self.o.weights)
    }

    fn function(&mut self, space: &Space) -> Result<FieldFunction, CliError> {
        let spec = self
            .o
            .function
            .as_deref()
            .ok_or_else(|| CliError::input("--function is required"))?;
        self.doc.input("function", spec);
        load_function(spec, space, "--function")
    }

    fn symbols(&mut self, space: &Space) -> Result<Vec<FieldFunction>, CliError> {
        self.doc.input("b", &self.o.b);
        self.o
            .b
            .iter()
            .map(|s| load_function(s, space, "--b"))
            .collect()
    }

    fn num(&mut self, name: &str, v: Option<f64>) -> Result<f64, CliError> {
        let v = required(v, &format!("--{name}"))?;
        self.doc.input(name, v);
        Ok(v)
    }

    fn with_default(&mut self, name: &str, v: f64) -> f64 {
        self.doc.input(name, v);
        v
    }

    fn seed(&mut self) -> u64 {
        self.doc.input("seed", self.o.seed);
        self.o.seed
    }

    fn trials(&mut self, default: usize) -> usize {
        let t = self.o.trials.unwrap_or(default);
        self.doc.input("trials", t);
        t
    }

    fn maximal_config(&mut self, space: &Space) -> Result<MaximalConfig, CliError> {
        let r = self.o.r.unwrap_or(1.0);
        let r = self.with_default("r", r);
        let eta = self.with_default("eta", self.o.eta);
        let beta = self.with_default("beta", self.o.beta);
        Ok(MaximalConfig::new(space, r, eta, beta)?)
    }

    fn dispatch(&mut self, command: &Command) -> Result<(), CliError> {
        match command {
            Command::SpaceCheck { export } => self.space_check(export.as_deref()),
            Command::KernelCheck { export } => self.kernel_check(export.as_deref()),
            Command::Apply | Command::Commutator | Command::Multilinear => self.apply(command),
            Command::Maximal { doubling } => {
                let space = self.space()?;
                let f = self.function(&space)?;
                let v = if *doubling {
                    self.doc.input("doubling", true);
                    doubling_maximal(&space, &f)?
                } else {
                    let cfg = self.maximal_config(&space)?;
                    fractional_maximal(&space, &f, &cfg)?
                };
                self.doc.values = Some(v.into_vec());
                Ok(())
            }
            Command::Sharp => {
                let space = self.space()?;
                let f = self.function(&space)?;
                let beta = self.with_default("beta", self.o.beta);
                self.doc.values = Some(sharp_maximal(&space, &f, beta)?.into_vec());
                Ok(())
            }
            Command::Rbmo { assignment } => self.rbmo(*assignment),
            Command::Kcoeff {
                center,
                inner,
                outer,
            } => self.kcoeff(*center, *inner, *outer),
            Command::Cover => {
                let space = self.space()?;
                let seed = self.seed();
                let family = CanonicalFamily::build(&space)?;
                self.doc.reports.push(covering_check(&space, &family, seed)?);
                Ok(())
            }
            Command::Weaktype => self.weaktype(),
            Command::Verify {
                suite,
                config,
                stability,
            } => self.verify(*suite, config.as_deref(), *stability),
        }
    }

    fn space_check(&mut self, export: Option<&Path>) -> Result<(), CliError> {
        let space = self.space()?;
        let seed = self.seed();
        self.doc.reports.push(check_metric(&space, seed));
        self.doc.reports.push(check_upper_doubling(&space));
        let family_size = CanonicalFamily::build(&space).ok().map(|f| f.len());
        self.doc.data = Some(json!({
            "points": space.point_count(),
            "dim_n": space.dim_n(),
            "c_lambda": space.c_lambda(),
            "c_tilde": space.c_tilde(),
            "beta0": space.beta0(),
            "total_mass": space.total_mass(),
            "diameter": space.diameter(),
            "min_distance": space.min_distance(),
            "geometric_doubling": estimate_geometric_doubling(&space),
            "family_size": family_size,
        }));
        if let Some(path) = export {
            write_json(path, &SpaceFile::export(&space), "--export")?;
        }
        Ok(())
    }

    fn kernel_check(&mut self, export: Option<&Path>) -> Result<(), CliError> {
        let space = self.space()?;
        let alpha = self.num("alpha", self.o.alpha)?;
        let eps = self.with_default("epsilon", self.o.epsilon);
        let seed = self.seed();
        let kernel = standard_kernel(&space, alpha, eps)?;
        self.doc.reports.push(check_kernel_size(&space, &kernel));
        self.doc
            .reports
            .push(check_kernel_regularity(&space, &kernel, seed));
        self.doc.data = Some(json!({
            "size_constant": kernel.size_constant(),
            "regularity_constant": kernel.regularity_constant(),
            "regularity_scale": kernel.regularity_scale(),
        }));
        if let Some(path) = export {
            write_json(path, &kernel_triplets(&kernel), "--export")?;
        }
        Ok(())
    }

    fn apply(&mut self, command: &Command) -> Result<(), CliError> {
        let space = self.space()?;
        let alpha = self.num("alpha", self.o.alpha)?;
        let eps = self.with_default("epsilon", self.o.epsilon);
        let f = self.function(&space)?;
        let kernel = standard_kernel(&space, alpha, eps)?;
        let v = match command {
            Command::Commutator => {
                let bs = self.symbols(&space)?;
                if bs.len() != 1 {
                    return Err(CliError::input(format!(
                        "--b: the commutator takes exactly one symbol, got {}",
                        bs.len()
                    )));
                }
                commutator(&space, &kernel, &bs[0], &f)?
            }
            Command::Multilinear => {
                let bs = self.symbols(&space)?;
                if bs.is_empty() {
                    return Err(CliError::input("--b: at least one symbol is required"));
                }
                multilinear_commutator(&space, &kernel, &bs, &f)?
            }
            _ => apply_fractional_integral(&space, &kernel, &f)?,
        };
        self.doc.values = Some(v.into_vec());
        Ok(())
    }

    fn rbmo(&mut self, assignment: bool) -> Result<(), CliError> {
        let space = self.space()?;
        let b = match self.o.b.len() {
            0 => self.function(&space)?,
            1 => self.symbols(&space)?.remove(0),
            n => return Err(CliError::input(format!("--b: expected one symbol, got {n}"))),
        };
        let rho = self.with_default("rho", self.o.rho);
        let est = if assignment {
            self.doc.input("assignment", true);
            rbmo_norm_assignment(&space, &b, rho)?
        } else {
            rbmo_norm(&space, &b, rho)?
        };
        let summary = |ball: &Ball| BallSummary::from(ball);
        self.doc.data = Some(json!({
            "norm": est.norm_value,
            "rho": est.rho,
            "oscillation_term": est.oscillation_term,
            "pair_term": est.pair_term,
            "witness_oscillation": est.witness_osc.as_ref().map(summary),
            "witness_pair": est.witness_pair.as_ref().map(|p| [summary(&p.inner), summary(&p.outer)]),
        }));
        self.doc.values = Some(vec![est.norm_value]);
        Ok(())
    }

    fn kcoeff(&mut self, center: usize, inner: f64, outer: f64) -> Result<(), CliError> {
        let space = self.space()?;
        self.doc.input("center", center);
        self.doc.input("inner", inner);
        self.doc.input("outer", outer);
        let beta = self.with_default("beta", self.o.beta);
        let b = Ball::try_new(&space, center, inner).map_err(|e| CliError::from(e).context("--inner"))?;
        let q = Ball::try_new(&space, center, outer).map_err(|e| CliError::from(e).context("--outer"))?;
        let k = k_coefficient(&space, &b, &q, beta).map_err(|e| match e {
            fracint_core::Error::DegenerateBall => CliError::from(e).context("--inner"),
            e => CliError::from(e),
        })?;
        self.doc.data = Some(json!({
            "k": k,
            "n_bq": n_bq(inner, outer)?,
            "inner": BallSummary::from(&b),
            "outer": BallSummary::from(&q),
        }));
        self.doc.values = Some(vec![k]);
        Ok(())
    }

    fn weaktype(&mut self) -> Result<(), CliError> {
        let space = self.space()?;
        let cfg = self.maximal_config(&space)?;
        if self.o.function.is_some() {
            let f = self.function(&space)?;
            let top = fractional_maximal(&space, &f, &cfg)?.max_abs();
            if top == 0.0 {
                return Err(CliError::precondition("--function: the maximal function vanishes"));
            }
            let levels: Vec<f64> = (0..16)
                .map(|i| top * 100f64.powf(-(i as f64) / 15.0))
                .collect();
            self.doc.reports.push(weak_type_check(&space, &f, &cfg, &levels)?);
        } else {
            let trials = self.trials(20);
            let seed = self.seed();
            let family = CanonicalFamily::build(&space)?;
            self.doc
                .reports
                .push(weak_type_suite(&space, &family, &cfg, trials, seed)?);
        }
        Ok(())
    }

    fn experiment_config(&mut self, path: Option<&Path>, k: usize) -> Result<ExperimentConfig, CliError> {
        let cfg = match path {
            Some(p) => {
                let text = p.to_string_lossy();
                self.doc.input("config", &*text);
                load_experiment_config(&text)?
            }
            None => ExperimentConfig {
                space: self.family()?,
                weights: self.weights()?,
                alpha: required(self.o.alpha, "--alpha")?,
                p: required(self.o.p, "--p")?,
                r: required(self.o.r, "--r")?,
                epsilon: self.o.epsilon,
                k,
                trials: self.o.trials.unwrap_or(50),
                seed: self.o.seed,
            },
        };
        self.doc.input("experiment", &cfg);
        Ok(cfg)
    }

    fn verify(&mut self, suite: Suite, config: Option<&Path>, stability: Option<f64>) -> Result<(), CliError> {
        if let Some(f) = stability {
            if !(f >= 1.0) {
                return Err(CliError::precondition(format!("--stability: factor {f} must be at least 1")));
            }
            self.doc.input("stability", f);
        }
        match suite {
            Suite::Exact => {
                let family = self.family()?;
                let weights = self.weights()?;
                let seed = self.seed();
                self.doc.reports = exact_suite(&family, &weights, seed)?;
            }
            Suite::Kprops => {
                let space = self.space()?;
                self.doc.reports.push(k_properties_suite(&space)?);
            }
            Suite::Cover => {
                let space = self.space()?;
                let seed = self.seed();
                let family = CanonicalFamily::build(&space)?;
                self.doc.reports.push(covering_check(&space, &family, seed)?);
            }
            Suite::Bound
            | Suite::Commutator
            | Suite::Multilinear
            | Suite::DominationIntegral
            | Suite::DominationCommutator
            | Suite::DominationMultilinear => {
                let symbols = default_symbols(suite, &self.o.b);
                let k = symbols.len().max(1);
                let cfg = self.experiment_config(config, k)?;
                self.doc.input("b", &symbols);
                let run = |cfg: &ExperimentConfig| fitted_experiment(suite, cfg, &symbols);
                let base = run(&cfg)?;
                let c0 = base.fitted_constant;
                self.doc.reports.push(base);
                if let Some(factor) = stability {
                    let mut fitted = vec![c0];
                    for s in 1..3 {
                        let c = ExperimentConfig {
                            seed: cfg.seed.wrapping_add(s),
                            ..cfg.clone()
                        };
                        fitted.push(run(&c)?.fitted_constant);
                    }
                    self.doc
                        .reports
                        .push(stability_report("seed-stability", &fitted, factor));
                    let refined = ExperimentConfig {
                        space: cfg.space.refined(),
                        ..cfg.clone()
                    };
                    let c1 = run(&refined)?.fitted_constant;
                    self.doc
                        .reports
                        .push(stability_report("refinement-stability", &[c0, c1], factor));
                }
            }
            Suite::Weak | Suite::Strong | Suite::Sharp | Suite::Rbmo => {
                let space = self.space()?;
                let family = CanonicalFamily::build(&space)?;
                let seed = self.seed();
                let trials = self.trials(20);
                let cfg = match suite {
                    Suite::Weak | Suite::Strong => Some(self.maximal_config(&space)?),
                    _ => None,
                };
                let p = match suite {
                    Suite::Strong | Suite::Sharp => Some(self.num("p", self.o.p)?),
                    _ => None,
                };
                let beta = self.with_default("beta", self.o.beta);
                let symbols = self.symbols(&space)?;
                let run = |seed: u64| -> Result<Vec<VerificationReport>, CliError> {
                    Ok(match suite {
                        Suite::Weak => vec![weak_type_suite(
                            &space,
                            &family,
                            cfg.as_ref().expect("set above"),
                            trials,
                            seed,
                        )?],
                        Suite::Strong => vec![strong_type_suite(
                            &space,
                            &family,
                            cfg.as_ref().expect("set above"),
                            p.expect("set above"),
                            trials,
                            seed,
                        )?],
                        Suite::Sharp => vec![sharp_control_suite(
                            &space,
                            &family,
                            beta,
                            p.expect("set above"),
                            trials,
                            seed,
                        )?],
                        _ => {
                            let bs = if symbols.is_empty() {
                                default_rbmo_symbols(&space, seed)?
                            } else {
                                symbols.clone()
                            };
                            rbmo_suite(&space, &family, &bs, seed)?
                        }
                    })
                };
                let base = run(seed)?;
                if let Some(factor) = stability {
                    let others = [run(seed.wrapping_add(1))?, run(seed.wrapping_add(2))?];
                    let mut extra = Vec::new();
                    for (i, r) in base.iter().enumerate() {
                        let fitted: Vec<f64> = std::iter::once(r.fitted_constant)
                            .chain(others.iter().map(|o| o[i].fitted_constant))
                            .collect();
                        extra.push(stability_report(&format!("{}-seed-stability", r.id), &fitted, factor));
                    }
                    self.doc.reports.extend(base);
                    self.doc.reports.extend(extra);
                } else {
                    self.doc.reports.extend(base);
                }
            }
        }
        Ok(())
    }
}

/// Symbols named on the command line, or log-distance fields from the
/// first and last points.
fn default_symbols(suite: Suite, given: &[String]) -> Vec<String> {
    if !given.is_empty() {
        return given.to_vec();
    }
    match suite {
        Suite::Commutator | Suite::DominationCommutator => vec!["logdist:0".into()],
        Suite::Multilinear | Suite::DominationMultilinear => {
            vec!["logdist:0".into(), "logdist:last".into()]
        }
        _ => Vec::new(),
    }
}

/// Four log-distance and four sign symbols.
pub fn default_rbmo_symbols(space: &Space, seed: u64) -> Result<Vec<FieldFunction>, CliError> {
    let mut bs = generate_test_functions(space, TestScheme::LogDistance, 4, seed, false)?;
    bs.extend(generate_test_functions(space, TestScheme::Sign, 4, seed, false)?);
    Ok(bs)
}

fn fitted_experiment(
    suite: Suite,
    cfg: &ExperimentConfig,
    symbols: &[String],
) -> Result<VerificationReport, CliError> {
    // Symbols are loaded per space so refined runs get their own fields.
    let space = generate_space(&cfg.space, &cfg.weights)?;
    let bs: Vec<FieldFunction> = symbols
        .iter()
        .map(|s| load_function(s, &space, "--b"))
        .collect::<Result<_, _>>()?;
    let report = match suite {
        Suite::Bound => bound_experiment_i(cfg)?,
        Suite::Commutator => {
            if bs.len() != 1 {
                return Err(CliError::input("--b: the commutator takes exactly one symbol"));
            }
            bound_experiment_commutator(cfg, &bs[0])?
        }
        Suite::Multilinear => bound_experiment_multilinear(cfg, &bs)?,
        Suite::DominationIntegral => {
            pointwise_domination_check(cfg, Domination::FractionalIntegral, &[])?
        }
        Suite::DominationCommutator => pointwise_domination_check(cfg, Domination::Commutator, &bs)?,
        _ => pointwise_domination_check(cfg, Domination::Multilinear, &bs)?,
    };
    Ok(report)
}
