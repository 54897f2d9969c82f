//! Command-line front end.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::axioms::{check_axioms, check_pigeonhole, Axiom, ColoringSweep};
use crate::canonize::{
    agreement, avoidance_check, canonical_ramsey_number, canonize_ctx, lemma_suite, level_matching_check,
    oracle_canonize, property_p_check, CanonReport,
};
use crate::catalog::{Space, DEFAULT_ENUM_CAP};
use crate::colorings::{generate, ColoringSpec};
use crate::error::{Error, Result};
use crate::fronts::{is_front, uniform_front, Coloring, Front, FrontFile};
use crate::instance::InstanceSpec;
use crate::mixing::{
    mixing_table, transitivity_check, weak_mix_monotonicity_check, weak_mixing_detect, MixContext, MixDecision,
};
use crate::model::InstanceKind;
use crate::report::{Report, RunConfig, Verdict};

pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ramsey-canon",
    version,
    about = "Finite-truncation checks for topological Ramsey spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exhaustive axiom checks and pigeonhole runs.
    VerifyAxioms {
        #[command(flatten)]
        common: Common,
        /// Longest base approximation for pigeonhole runs.
        #[arg(long, default_value_t = 2)]
        max_len: usize,
        /// Random colorings per base when exhaustive sweeps are too large.
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Writes the front (and kernel, if a coloring is given).
    EnumerateFront(Common),
    /// Mixing table after fusion; non-transitive triples are findings.
    MixingTable(Common),
    /// Transitivity of mixing at equal depths.
    Transitivity(Common),
    /// Weak mixing patterns between rows of unequal depth.
    WeakMixing(Common),
    /// Guided canonization, optionally cross-checked by the oracle.
    Canonize(Common),
    /// Canonical Ramsey number by kernel enumeration.
    ErNumber {
        #[arg(short = 'n', long, default_value_t = 1)]
        arity: usize,
        #[arg(short = 'm', long)]
        target: usize,
        /// Largest number of kernels enumerated in total.
        #[arg(long, default_value_t = 5_000_000)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canonizes, then runs the lemma checks and instance assumption checks.
    LemmaSuite(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Instance kind and parameters, e.g. `ellentuck N=6`, `fin blocks=4 span_cap=2`, `tree b=2 h=3`.
    pub spec: Vec<String>,
    /// Instance description file, instead of positional arguments.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// `AU<n>` or a front file.
    #[arg(long, default_value = "AU2")]
    pub front: String,
    /// Generator name (constant, injective, min, max, minmax, union, parity, random[:seed[:k]]).
    #[arg(long)]
    pub coloring: Option<String>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub mu: u64,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    pub depth_budget: u64,
    #[arg(long, default_value_t = 3)]
    pub retries: usize,
    #[arg(long, default_value_t = DEFAULT_ENUM_CAP as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub enum_cap: u64,
    /// Run the brute-force oracle and report agreement.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What a run produced: exit code, the JSON document for standard output
/// (absent when written to `--out`), and a message for standard error.
#[derive(Debug, Default, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: Option<String>,
    pub stderr: Option<String>,
}

/// A group of reports sharing one verdict.
#[derive(Debug, Serialize)]
struct Bundle {
    check: String,
    verdict: Verdict,
    reports: Vec<Report>,
    config: RunConfig,
}

impl Bundle {
    fn new(check: &str, reports: Vec<Report>, config: &RunConfig) -> Self {
        let verdict = reports.iter().fold(Verdict::Pass, |v, r| v.and(r.verdict));
        Bundle {
            check: check.into(),
            verdict,
            reports,
            config: config.clone(),
        }
    }
}

struct Setup {
    space: Space,
    config: RunConfig,
}

impl Common {
    fn setup(&self) -> Result<Setup> {
        let spec = match (&self.instance, self.spec.split_first()) {
            (Some(path), None) => InstanceSpec::load(path)?,
            (None, Some((kind, params))) => InstanceSpec::parse_args(kind, params)?,
            (Some(_), Some(_)) => return Err(Error::Input("give either --instance or a positional instance".into())),
            (None, None) => return Err(Error::Input("no instance given".into())),
        };
        let space = spec.build_with_cap(self.enum_cap as usize)?;
        let mut config = RunConfig::for_space(&space)
            .with_mu(self.mu as usize)
            .with_seed(self.seed);
        config.depth_budget = self.depth_budget as usize;
        config.retries = self.retries;
        config.enum_cap = self.enum_cap as usize;
        config.span_cap = spec.span_cap();
        Ok(Setup { space, config })
    }

    fn front(&self, space: &Space) -> Result<(Front, Option<Coloring>)> {
        let f = self.front.trim();
        let level = f.strip_prefix("AU").map(|r| r.trim_start_matches('_'));
        if let Some(n) = level.and_then(|n| n.parse::<usize>().ok()) {
            return Ok((uniform_front(space, n)?, None));
        }
        let text = std::fs::read_to_string(f).map_err(|e| Error::Input(format!("front '{f}': {e}")))?;
        let file: FrontFile = serde_json::from_str(&text).map_err(|e| Error::Input(format!("front '{f}': {e}")))?;
        file.load(space)
    }

    fn coloring_spec(&self) -> Result<Option<ColoringSpec>> {
        match self.coloring.as_deref() {
            None => Ok(None),
            Some("random") => Ok(Some(ColoringSpec::random(self.seed))),
            Some(text) => text.parse().map(Some),
        }
    }

    /// Front plus coloring; a generator given on the command line wins over
    /// a kernel stored in the front file.
    fn colored_front(&self, space: &Space) -> Result<(Front, Coloring)> {
        let (front, stored) = self.front(space)?;
        let coloring = match (self.coloring_spec()?, stored) {
            (Some(spec), _) => generate(&front, &spec),
            (None, Some(c)) => c,
            (None, None) => {
                return Err(Error::Input(
                    "a coloring is required (--coloring or a kernel in the front file)".into(),
                ))
            }
        };
        Ok((front, coloring))
    }

    fn context(&self, setup: &Setup) -> Result<MixContext> {
        let (front, coloring) = self.colored_front(&setup.space)?;
        MixContext::new(&setup.space, &front, &coloring, setup.config.mu)
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Budget { .. } | Error::TruncationTooShallow { .. } | Error::Exhausted { .. } | Error::NoInnerWitness => {
            Verdict::Undecided.exit_code()
        }
        _ => EXIT_USAGE,
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Parses arguments and runs one subcommand.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return Outcome {
                code,
                stdout: None,
                stderr: Some(e.render().to_string()),
            };
        }
    };
    let out_path = match &cli.command {
        Command::ErNumber { out, .. } => out.clone(),
        Command::VerifyAxioms { common, .. } => common.out.clone(),
        Command::EnumerateFront(c)
        | Command::MixingTable(c)
        | Command::Transitivity(c)
        | Command::WeakMixing(c)
        | Command::Canonize(c)
        | Command::LemmaSuite(c) => c.out.clone(),
    };
    match dispatch(&cli.command) {
        Ok((verdict, json, note)) => {
            let mut outcome = Outcome {
                code: verdict.exit_code(),
                stdout: None,
                stderr: note,
            };
            match out_path {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, &json) {
                        return Outcome {
                            code: EXIT_USAGE,
                            stdout: None,
                            stderr: Some(format!("cannot write {}: {e}", path.display())),
                        };
                    }
                }
                None => outcome.stdout = Some(json),
            }
            outcome
        }
        Err(e) => Outcome {
            code: error_code(&e),
            stdout: None,
            stderr: Some(format!("error: {e}")),
        },
    }
}

type Dispatched = (Verdict, String, Option<String>);

pub fn dispatch(command: &Command) -> Result<Dispatched> {
    match command {
        Command::VerifyAxioms {
            common,
            max_len,
            samples,
        } => {
            let setup = common.setup()?;
            let (space, config) = (&setup.space, &setup.config);
            let mut reports: Vec<Report> = Axiom::ALL.iter().map(|&a| check_axioms(space, a, config)).collect();
            let sweep = match space.model().kind() {
                InstanceKind::Ellentuck => ColoringSweep::Exhaustive {
                    max_extensions: 12,
                    fallback: *samples,
                },
                _ => ColoringSweep::Random { count: *samples },
            };
            reports.push(check_pigeonhole(space, *max_len, sweep, config));
            let bundle = Bundle::new("verify-axioms", reports, config);
            Ok((bundle.verdict, to_json(&bundle), None))
        }
        Command::EnumerateFront(common) => {
            let setup = common.setup()?;
            let (front, stored) = common.front(&setup.space)?;
            let coloring = match common.coloring_spec()? {
                Some(spec) => Some(generate(&front, &spec)),
                None => stored,
            };
            let check = is_front(&setup.space, front.members(), &front.scope, &front.base)?;
            let verdict = if check.is_front { Verdict::Pass } else { Verdict::Fail };
            let report = Report::new("enumerate-front", verdict, &setup.config)
                .with_witness(
                    serde_json::to_value(FrontFile::from_front(&front, coloring.as_ref())).expect("serializes"),
                )
                .with_details(json!({
                    "members": front.len(),
                    "max_len": front.max_len(),
                    "classes": coloring.as_ref().map(Coloring::classes),
                    "front_check": check,
                }));
            Ok((verdict, to_json(&report), None))
        }
        Command::MixingTable(common) | Command::Transitivity(common) => {
            let setup = common.setup()?;
            let ctx = common.context(&setup)?;
            let table = mixing_table(&ctx, &ctx.front().scope, setup.config.depth_budget)?;
            let tr = transitivity_check(&table);
            let render = table.render();
            if matches!(command, Command::MixingTable(_)) {
                let n = table.rows.len();
                let pairs: Vec<_> = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .map(|(i, j)| json!({ "i": i, "j": j, "verdict": table.entries[i][j] }))
                    .collect();
                let found = !(tr.equal_depth.is_empty() && tr.unequal_depth.is_empty());
                let verdict = if found {
                    Verdict::Fail
                } else if table.undecided() > 0 {
                    Verdict::Undecided
                } else {
                    Verdict::Pass
                };
                let report = Report::new("mixing-table", verdict, &setup.config)
                    .with_witness(json!({
                        "reduct": table.reduct.to_string(),
                        "rows": table.rows.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                        "depths": table.depths,
                        "pairs": pairs,
                    }))
                    .with_details(json!({
                        "undecided": table.undecided(),
                        "excluded": table.excluded.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                        "fuse_refinements": table.fuse_refinements,
                        "non_transitive": tr,
                    }));
                Ok((verdict, to_json(&report), Some(render)))
            } else {
                let verdict = if !tr.equal_depth.is_empty() {
                    Verdict::Fail
                } else if tr.undecided_pairs > 0 {
                    Verdict::Undecided
                } else {
                    Verdict::Pass
                };
                let report = Report::new("transitivity", verdict, &setup.config)
                    .with_witness(serde_json::to_value(&tr).expect("serializes"))
                    .with_details(json!({ "reduct": table.reduct.to_string(), "rows": table.rows.len() }));
                Ok((verdict, to_json(&report), None))
            }
        }
        Command::WeakMixing(common) => {
            let setup = common.setup()?;
            let ctx = common.context(&setup)?;
            let table = mixing_table(&ctx, &ctx.front().scope, setup.config.depth_budget)?;
            let x = &table.reduct;
            let mut detections = Vec::new();
            for (i, s) in table.rows.iter().enumerate() {
                for (j, t) in table.rows.iter().enumerate() {
                    let unequal = matches!((table.depths[i], table.depths[j]), (Some(a), Some(b)) if a < b);
                    if !unequal || table.entries[i][j] != MixDecision::Mixes {
                        continue;
                    }
                    if let Some(w) = weak_mixing_detect(&ctx, x, s, t)? {
                        detections.push(json!({
                            "s": s.to_string(), "t": t.to_string(), "w": w.w.to_string(),
                            "any_remainder": w.any_remainder, "remainder_above": w.remainder_above,
                        }));
                    }
                }
            }
            let mono = weak_mix_monotonicity_check(&ctx, x, &setup.config)?;
            let verdict = mono.verdict;
            let report = Report::new("weak-mixing", verdict, &setup.config)
                .with_witness(json!(detections))
                .with_details(json!({ "reduct": x.to_string(), "monotonicity": mono }));
            Ok((verdict, to_json(&report), None))
        }
        Command::Canonize(common) => {
            let setup = common.setup()?;
            let ctx = common.context(&setup)?;
            let report = canonize_with_oracle(&ctx, common.oracle, &setup.config)?;
            Ok((report.verdict, to_json(&report), None))
        }
        Command::ErNumber {
            arity, target, budget, ..
        } => {
            let r = canonical_ramsey_number(*arity, *target, *budget)?;
            let config = RunConfig {
                enum_cap: *budget,
                instance: "ellentuck".into(),
                ..RunConfig::default()
            };
            let report = Report::new("er-number", Verdict::Pass, &config)
                .with_witness(json!({ "value": r.value }))
                .with_details(serde_json::to_value(&r).expect("serializes"));
            Ok((Verdict::Pass, to_json(&report), None))
        }
        Command::LemmaSuite(common) => {
            let setup = common.setup()?;
            let ctx = common.context(&setup)?;
            let config = &setup.config;
            let canon = canonize_with_oracle(&ctx, common.oracle, config)?;
            let mut reports = Vec::new();
            match (&canon.witness, &canon.phi) {
                (Some(x), Some(phi)) => reports.push(lemma_suite(&ctx, x, phi, config)?),
                _ => reports.push(
                    Report::new("lemma-suite", Verdict::Undecided, config).with_details(json!({
                        "reason": "canonize found no witness", "diagnostics": canon.diagnostics,
                    })),
                ),
            }
            reports.push(property_p_check(&ctx, config)?);
            for n in 0..ctx.front().max_len() {
                reports.push(level_matching_check(&setup.space, n, config));
            }
            reports.push(avoidance_check(&setup.space, config)?);
            let bundle = Bundle::new("lemma-suite", reports, config);
            Ok((bundle.verdict, to_json(&bundle), None))
        }
    }
}

/// Canonize and, when asked, compare against the oracle.
pub fn canonize_with_oracle(ctx: &MixContext, oracle: bool, config: &RunConfig) -> Result<CanonReport> {
    let mut report = canonize_ctx(ctx, config)?;
    if !oracle {
        return Ok(report);
    }
    let space = ctx.space();
    let o = oracle_canonize(space, ctx.front(), ctx.coloring(), config.enum_cap)?;
    let agrees = match (&report.witness, &report.phi) {
        (Some(x), Some(phi)) => agreement(space, ctx.front(), x, phi, &o)?.agrees,
        _ => false,
    };
    report.oracle_agreement = Some(agrees);
    if !agrees && report.verdict == Verdict::Pass {
        report.verdict = Verdict::Fail;
        report
            .diagnostics
            .push("oracle disagrees with the guided witness".into());
    }
    report.diagnostics.push(format!(
        "oracle: {} witnesses of length {}",
        o.witnesses.len(),
        o.length
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_3() {
        assert_eq!(run(["ramsey-canon", "no-such-command"]).code, EXIT_USAGE);
        assert_eq!(run(["ramsey-canon", "verify-axioms"]).code, EXIT_USAGE);
        assert_eq!(
            run(["ramsey-canon", "canonize", "ellentuck", "N=4", "--mu", "0"]).code,
            EXIT_USAGE
        );
        assert_eq!(run(["ramsey-canon", "canonize", "ellentuck", "N=4"]).code, EXIT_USAGE);
        assert_eq!(run(["ramsey-canon", "--help"]).code, 0);
    }

    #[test]
    fn front_parsing() {
        let o = run([
            "ramsey-canon",
            "enumerate-front",
            "ellentuck",
            "N=4",
            "--front",
            "AU_2",
            "--coloring",
            "min",
        ]);
        assert_eq!(o.code, 0);
        let v: serde_json::Value = serde_json::from_str(o.stdout.as_deref().unwrap()).unwrap();
        assert_eq!(v["details"]["members"], json!(6));
    }
}
