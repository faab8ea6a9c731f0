//! Command-line surface of the `eisen` binary.
//!
//! Every subcommand runs one verification sweep or computation and produces
//! [`Report`]s: `--json` emits the report array, otherwise a one-line-per-
//! report summary is printed.  Exit codes: 0 all passed, 1 something failed,
//! 2 usage error, 3 nothing failed but something was flagged for inspection.
//!
//! [`run_command`] is the pure dispatch used by tests; [`main_entry`] adds
//! argument parsing, output routing, and the exit code.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::arith;
use crate::bernoulli::{beta_genfun_check, vanish_symmetry_check};
use crate::cyclotomic::{eta_block_sum, eta_block_sum_closed, CycNum};
use crate::dz::{dz_dim, verify_sum_formula};
use crate::gamma::{
    parse_col_label, rank_and_pivots, row_labels, solve, verify_null_space, GammaLambdaAssignment,
};
use crate::numeric::{
    frakz_numeric, frakz_pv, gbtz_sign_probe, verify_dbsf_numeric, NumericValue, ProbeSign,
};
use crate::qseries::{f2_series, g_prime_series, g_series, verify_divisor_identity, SymbolVec};
use crate::report::{exit_code, to_json_string, Report};
use crate::shuffle::{verify_double_shuffle, verify_i_identities};
use crate::{Error, QSeries, Result};

/// Series truncation used when `--truncation` is absent; the environment
/// variable `EISEN_DEFAULT_TRUNCATION` overrides the built-in 50.
pub fn default_truncation() -> usize {
    std::env::var("EISEN_DEFAULT_TRUNCATION")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(50)
}

#[derive(Parser, Debug)]
#[command(
    name = "eisen",
    version,
    about = "Exact and numeric checks for level-N double Eisenstein series",
    arg_required_else_help = true
)]
pub struct Cli {
    /// Emit the report array as JSON instead of the line summary.
    #[arg(long, global = true)]
    pub json: bool,

    /// Write the output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Bound worker parallelism for sweeps.
    #[arg(long, global = true, value_name = "J")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact identity sweeps.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Solve the defining linear system for assignment constants.
    #[command(subcommand)]
    Solve(SolveCommand),
    /// Rank, nullity, and pivot structure of the constraint system.
    Rank(RankArgs),
    /// Formal double zeta spaces: dimensions and sum formulas.
    #[command(subcommand)]
    Dz(DzCommand),
    /// Floating-point corroboration of the convergent identities.
    #[command(subcommand)]
    Numeric(NumericCommand),
    /// Serialize series to JSON.
    #[command(subcommand)]
    Export(ExportCommand),
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Root-of-unity block sums against their closed form.
    EtaSums(LevelSweepArgs),
    /// The q-series divisor identity, coefficient by coefficient.
    DivisorIdentity(DivisorIdentityArgs),
    /// Stuffle and shuffle decompositions of corrected product series.
    DoubleShuffle(DoubleShuffleArgs),
    /// Formal bilinear identities behind the shuffle decomposition.
    IIdentities(IIdentitiesArgs),
    /// Kernel vectors of the constraint system against lowered identities.
    NullSpace(NullSpaceArgs),
    /// Beta constants: generating function and conjugation symmetry.
    Beta(BetaArgs),
}

#[derive(Subcommand, Debug)]
pub enum SolveCommand {
    /// Back-substitute the reduced system for gamma and lambda symbols.
    Gamma(SolveGammaArgs),
}

#[derive(Subcommand, Debug)]
pub enum DzCommand {
    /// Generators, relations, rank, and dimension at one weight.
    Dims(DimsArgs),
    /// Membership of the two weighted sum formulas in the relation row space.
    SumFormula(SumFormulaArgs),
}

#[derive(Subcommand, Debug)]
pub enum NumericCommand {
    /// Double-shuffle decompositions of products of convergent values.
    Dbsf(DbsfArgs),
    /// Symmetrized one-variable sums against their finite closed forms.
    Frakz(FrakzArgs),
    /// Resolve the sign shift between the order-one constant and its series.
    SignProbe(LevelSweepArgs),
}

#[derive(Subcommand, Debug)]
pub enum ExportCommand {
    /// One series as JSON: { "level", "truncation", "coeffs" }.
    Series(ExportSeriesArgs),
}

/// Either one `--level` or a `--max-level` sweep starting at the smallest
/// level the task supports.
#[derive(Args, Debug)]
pub struct LevelSweepArgs {
    /// Run at this single level.
    #[arg(long, value_name = "N")]
    pub level: Option<u32>,
    /// Run at every level from the task minimum through N.
    #[arg(long, value_name = "N")]
    pub max_level: Option<u32>,
}

impl LevelSweepArgs {
    fn levels(&self, min: u32) -> Result<Vec<u32>> {
        match (self.level, self.max_level) {
            (Some(n), None) if n >= min => Ok(vec![n]),
            (Some(n), None) => Err(Error::Usage(format!(
                "--level must be at least {} (got {})",
                min, n
            ))),
            (None, Some(m)) if m >= min => Ok((min..=m).collect()),
            (None, Some(m)) => Err(Error::Usage(format!(
                "--max-level must be at least {} (got {})",
                min, m
            ))),
            (Some(_), Some(_)) => Err(Error::Usage("give --level or --max-level, not both".into())),
            (None, None) => Err(Error::Usage("give --level or --max-level".into())),
        }
    }
}

#[derive(Args, Debug)]
pub struct DivisorIdentityArgs {
    #[command(flatten)]
    pub levels: LevelSweepArgs,
    /// Check coefficients of q^1 through q^M.
    #[arg(long, value_name = "M", default_value_t = 200)]
    pub max_m: u32,
}

#[derive(Args, Debug)]
pub struct DoubleShuffleArgs {
    #[arg(long, value_name = "N")]
    pub level: u32,
    /// Check every order pair with r + s up to this weight.
    #[arg(long, value_name = "K", default_value_t = 6)]
    pub max_weight: u32,
    /// Series truncation (default 50, or EISEN_DEFAULT_TRUNCATION).
    #[arg(long, value_name = "M")]
    pub truncation: Option<usize>,
    /// Constants to use: solve with zero free values, or the built-in
    /// hand-written solution (levels 1-3).
    #[arg(long, value_enum, default_value = "solved-zero")]
    pub assignment: AssignmentName,
    /// Negative control: add q^P to the evaluated gamma^{a,b} series and
    /// report where the sweep breaks instead of validating up front.
    #[arg(long, value_name = "A,B,P")]
    pub perturb_gamma: Option<String>,
    /// Negative control: add q^P to the evaluated lambda^{a,b} series.
    #[arg(long, value_name = "A,B,P")]
    pub perturb_lambda: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AssignmentName {
    /// Solve the linear system with every free column set to zero.
    SolvedZero,
    /// The displayed closed-form solution, available at levels 1, 2, 3.
    Explicit,
}

impl AssignmentName {
    fn as_str(self) -> &'static str {
        match self {
            AssignmentName::SolvedZero => "solved-zero",
            AssignmentName::Explicit => "explicit",
        }
    }

    /// Materializes the named assignment at the given level.
    pub fn resolve(self, level: u32, truncation: usize) -> Result<GammaLambdaAssignment> {
        match self {
            AssignmentName::SolvedZero => Ok(solve(level, &HashMap::new(), truncation)?.assignment),
            AssignmentName::Explicit => GammaLambdaAssignment::explicit(level),
        }
    }
}

#[derive(Args, Debug)]
pub struct IIdentitiesArgs {
    #[arg(long, value_name = "N")]
    pub level: u32,
    /// Check every weight from 2 through K.
    #[arg(long, value_name = "K", default_value_t = 6)]
    pub max_weight: u32,
}

#[derive(Args, Debug)]
pub struct NullSpaceArgs {
    #[arg(long, value_name = "N")]
    pub level: u32,
    /// Series truncation for the residual checks.
    #[arg(long, value_name = "M")]
    pub truncation: Option<usize>,
}

#[derive(Args, Debug)]
pub struct BetaArgs {
    #[arg(long, value_name = "N")]
    pub level: u32,
    /// Compare generating-function coefficients through this order.
    #[arg(long, value_name = "K", default_value_t = 12)]
    pub orders: u32,
    /// Check the conjugation symmetry through this order.
    #[arg(long, value_name = "K", default_value_t = 12)]
    pub max_n: u32,
}

#[derive(Args, Debug)]
pub struct SolveGammaArgs {
    #[arg(long, value_name = "N")]
    pub level: u32,
    /// Free-column values: "zero", or a JSON file mapping column labels
    /// like "gamma(0,1)" to symbol vectors { "F": [...], "G": [...] }.
    #[arg(long, value_name = "zero|FILE", default_value = "zero")]
    pub free: String,
    /// Series truncation for the consistency check.
    #[arg(long, value_name = "M")]
    pub truncation: Option<usize>,
    /// Include the evaluated q-series next to each symbol.
    #[arg(long)]
    pub emit_series: bool,
}

#[derive(Args, Debug)]
pub struct RankArgs {
    #[command(flatten)]
    pub levels: LevelSweepArgs,
}

#[derive(Args, Debug)]
pub struct DimsArgs {
    #[arg(long, value_name = "N")]
    pub level: u32,
    #[arg(long, value_name = "K")]
    pub weight: u32,
    /// Restrict residues by the gcd-one condition.
    #[arg(long)]
    pub pure: bool,
}

#[derive(Args, Debug)]
pub struct SumFormulaArgs {
    #[arg(long, value_name = "N")]
    pub level: u32,
    #[arg(long, value_name = "K")]
    pub weight: u32,
    #[arg(long, value_name = "A", default_value_t = 0)]
    pub residue: u32,
}

#[derive(Args, Debug)]
pub struct DbsfArgs {
    #[arg(long, value_name = "N")]
    pub level: u32,
    /// Check every order pair with r, s >= 2 and r + s up to this weight.
    #[arg(long, value_name = "K", default_value_t = 8)]
    pub max_weight: u32,
    /// Allowed discrepancy beyond the accumulated tail bounds.
    #[arg(long, value_name = "T", default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct FrakzArgs {
    #[arg(long, value_name = "N")]
    pub level: u32,
    /// Check orders 1 through K.
    #[arg(long, value_name = "K", default_value_t = 8)]
    pub max_n: u32,
    #[arg(long, value_name = "T", default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeriesFamily {
    /// Multiple divisor generating series for given residues and orders.
    G,
    /// Its weighted derivative companion (one residue, one order).
    GPrime,
    /// The weight-two correction series (one residue).
    F2,
}

#[derive(Args, Debug)]
pub struct ExportSeriesArgs {
    #[arg(long, value_name = "N")]
    pub level: u32,
    #[arg(long, value_enum)]
    pub family: SeriesFamily,
    /// Comma-separated residues, outermost first.
    #[arg(long, value_name = "A,B,...", default_value = "0")]
    pub residues: String,
    /// Comma-separated orders, matching the residues.
    #[arg(long, value_name = "R,S,...")]
    pub orders: Option<String>,
    #[arg(long, value_name = "M")]
    pub truncation: Option<usize>,
}

fn parse_u32_list(s: &str, what: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Usage(format!("bad {} list {:?}", what, s)))
        })
        .collect()
}

fn cyc_json(value: &CycNum) -> Value {
    Value::from(value.coord_strings())
}

fn numeric_json(v: &NumericValue) -> Value {
    json!({
        "value": [v.value.re, v.value.im],
        "error_bound": v.error_bound,
    })
}

/// Enumerates all coordinate vectors with entry t in 0..=bounds[t].
fn boxed_vectors(bounds: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &b in bounds {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=b).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

// ---------------------------------------------------------------------------
// Subcommand executors.  Each returns the reports in a deterministic order.
// ---------------------------------------------------------------------------

fn exec_eta_sums(args: &LevelSweepArgs) -> Result<Vec<Report>> {
    let levels = args.levels(2)?;
    let mut reports: Vec<Report> = levels
        .par_iter()
        .map(|&level| {
            let started = Instant::now();
            let mut report = Report::new("eta-block-sums", level);
            let exponents: Vec<u32> = arith::factorize(level as u64)
                .iter()
                .map(|&(_, k)| k)
                .collect();
            let mut cases = 0usize;
            for alpha in boxed_vectors(&exponents) {
                if alpha == exponents {
                    continue; // empty block
                }
                let ell_bounds: Vec<u32> = exponents.iter().map(|&k| k + 1).collect();
                for ell in boxed_vectors(&ell_bounds) {
                    cases += 1;
                    let sum = eta_block_sum(level, &alpha, &ell)?;
                    let closed = eta_block_sum_closed(level, &alpha, &ell)?;
                    if sum != closed {
                        report.fail(json!({
                            "alpha": alpha,
                            "ell": ell,
                            "block_sum": cyc_json(&sum),
                            "closed_form": cyc_json(&closed),
                        }));
                    }
                }
            }
            report.detail(json!({ "cases": cases }));
            Ok(report.finish(started))
        })
        .collect::<Result<_>>()?;
    reports.sort_by_key(|r| r.level);
    Ok(reports)
}

fn exec_divisor_identity(args: &DivisorIdentityArgs) -> Result<Vec<Report>> {
    let levels = args.levels.levels(2)?;
    let mut reports: Vec<Report> = levels
        .par_iter()
        .map(|&level| {
            let started = Instant::now();
            let mut report = Report::new("divisor-identity", level).param("max_m", args.max_m);
            let checks = (1..=args.max_m)
                .into_par_iter()
                .map(|m| verify_divisor_identity(level, m))
                .collect::<Result<Vec<_>>>()?;
            let mut mismatches = 0usize;
            for check in &checks {
                if !check.pass() {
                    mismatches += 1;
                    if report.counterexamples.len() < 5 {
                        report.fail(json!({
                            "m": check.m,
                            "lhs": cyc_json(&check.lhs),
                            "rhs": cyc_json(&check.rhs),
                        }));
                    }
                }
            }
            if mismatches > 0 {
                report.status = crate::report::Status::Fail;
            }
            report.detail(json!({ "checked_m": args.max_m, "mismatches": mismatches }));
            Ok(report.finish(started))
        })
        .collect::<Result<_>>()?;
    reports.sort_by_key(|r| r.level);
    Ok(reports)
}

fn exec_double_shuffle(args: &DoubleShuffleArgs) -> Result<Vec<Report>> {
    let started = Instant::now();
    let truncation = args.truncation.unwrap_or_else(default_truncation);
    let mut report = Report::new("double-shuffle", args.level)
        .param("max_weight", args.max_weight)
        .param("truncation", truncation as u64)
        .param("assignment", args.assignment.as_str());
    let mut assignment = args.assignment.resolve(args.level, truncation)?;
    let parse_bump = |s: &str| -> Result<(u32, u32, usize)> {
        let parts = parse_u32_list(s, "perturbation")?;
        match parts[..] {
            [a, b, p] => Ok((a, b, p as usize)),
            _ => Err(Error::Usage(format!("bad perturbation triple {:?}", s))),
        }
    };
    let mut validate_first = true;
    if let Some(triple) = &args.perturb_gamma {
        let (a, b, power) = parse_bump(triple)?;
        assignment.perturb_gamma(a, b, power, CycNum::one(args.level));
        report
            .parameters
            .insert("perturb_gamma".into(), json!(triple));
        validate_first = false;
    }
    if let Some(triple) = &args.perturb_lambda {
        let (a, b, power) = parse_bump(triple)?;
        assignment.perturb_lambda(a, b, power, CycNum::one(args.level));
        report
            .parameters
            .insert("perturb_lambda".into(), json!(triple));
        validate_first = false;
    }
    match verify_double_shuffle(
        args.level,
        &assignment,
        args.max_weight,
        truncation,
        validate_first,
    ) {
        Ok(sweep) => {
            let mut by_weight: std::collections::BTreeMap<u32, usize> =
                std::collections::BTreeMap::new();
            for row in &sweep.rows {
                *by_weight.entry(row.r + row.s).or_default() += 1;
                if let Some(power) = row.first_bad_power {
                    report.fail(json!({
                        "a": row.a,
                        "b": row.b,
                        "r": row.r,
                        "s": row.s,
                        "relation": row.relation.as_str(),
                        "first_bad_power": power,
                    }));
                }
            }
            for (weight, relations) in by_weight {
                report.detail(json!({ "weight": weight, "relations": relations }));
            }
        }
        Err(Error::AssignmentUnsatisfied(labels)) => {
            report.fail(json!({ "unsatisfied_constraints": labels }));
        }
        Err(e) => return Err(e),
    }
    Ok(vec![report.finish(started)])
}

fn exec_i_identities(args: &IIdentitiesArgs) -> Result<Vec<Report>> {
    let started = Instant::now();
    let mut report = Report::new("i-identities", args.level).param("max_weight", args.max_weight);
    if args.max_weight < 2 {
        return Err(Error::BadOrder(args.max_weight));
    }
    for k in 2..=args.max_weight {
        let check = verify_i_identities(args.level, k)?;
        report.detail(json!({
            "weight": k,
            "residue_pairs": args.level * args.level,
            "failures": check.failures.len(),
        }));
        for failure in check.failures {
            report.fail(json!({ "weight": k, "instance": failure }));
        }
    }
    Ok(vec![report.finish(started)])
}

fn exec_null_space(args: &NullSpaceArgs) -> Result<Vec<Report>> {
    let started = Instant::now();
    let truncation = args.truncation.unwrap_or_else(default_truncation);
    let mut report = Report::new("null-space", args.level).param("truncation", truncation as u64);
    let check = verify_null_space(args.level, truncation)?;
    report.detail(json!({
        "kernel_dim": check.kernel_dim,
        "expected_dim": check.expected_dim,
        "vectors_independent": check.vectors_independent,
    }));
    if check.kernel_dim != check.expected_dim || !check.vectors_independent {
        report.fail(json!({
            "kernel_dim": check.kernel_dim,
            "expected_dim": check.expected_dim,
            "vectors_independent": check.vectors_independent,
        }));
    }
    for d in &check.per_divisor {
        report.detail(json!({
            "divisor": d.d,
            "annihilates": d.annihilates,
            "series_vanishes": d.series_vanishes,
            "symbol_matches_lift": d.symbol_matches_lift,
        }));
        if !(d.annihilates && d.series_vanishes && d.symbol_matches_lift) {
            report.fail(json!({
                "divisor": d.d,
                "annihilates": d.annihilates,
                "series_vanishes": d.series_vanishes,
                "symbol_matches_lift": d.symbol_matches_lift,
            }));
        }
    }
    Ok(vec![report.finish(started)])
}

fn exec_beta(args: &BetaArgs) -> Result<Vec<Report>> {
    let started = Instant::now();
    let mut report = Report::new("beta-constants", args.level)
        .param("orders", args.orders)
        .param("max_n", args.max_n);
    for a in 0..args.level.max(1) {
        let check = beta_genfun_check(args.level, a, args.orders)?;
        if !check.pass() {
            report.fail(json!({
                "residue": a,
                "mismatched_orders": check.mismatches,
            }));
        }
    }
    report.detail(json!({
        "genfun_residues": args.level,
        "genfun_orders": args.orders,
    }));
    for n in 1..=args.max_n {
        let check = vanish_symmetry_check(args.level, n)?;
        if !check.pass() {
            report.fail(json!({
                "order": n,
                "asymmetric_residues": check.failures,
            }));
        }
    }
    report.detail(json!({ "symmetry_orders": args.max_n }));
    Ok(vec![report.finish(started)])
}

fn exec_solve_gamma(args: &SolveGammaArgs) -> Result<Vec<Report>> {
    let started = Instant::now();
    let truncation = args.truncation.unwrap_or_else(default_truncation);
    let mut report = Report::new("solve-gamma", args.level)
        .param("truncation", truncation as u64)
        .param("free", args.free.as_str());

    let mut free_values = HashMap::new();
    if args.free != "zero" {
        let text = std::fs::read_to_string(&args.free)?;
        let object: Value = serde_json::from_str(&text)?;
        let map = object
            .as_object()
            .ok_or_else(|| Error::Usage("free-value file must be a JSON object".into()))?;
        for (label, symbol) in map {
            let col = parse_col_label(args.level, label)?;
            free_values.insert(col, SymbolVec::from_json(args.level, symbol)?);
        }
    }

    let result = solve(args.level, &free_values, truncation)?;
    report.detail(json!({
        "pivot_cols": result.pivot_cols.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "free_cols": result.free_cols.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "residuals_vanish": result.residuals_vanish,
    }));
    let n = args.level;
    for a in 0..n {
        for b in 0..n {
            if a <= b {
                let mut row = json!({
                    "column": format!("lambda({},{})", a, b),
                    "symbol": result.assignment.lambda(a, b).to_json(),
                });
                if args.emit_series {
                    row["series"] = result.assignment.lambda_series(a, b, truncation).to_json();
                }
                report.detail(row);
            }
            let mut row = json!({
                "column": format!("gamma({},{})", a, b),
                "symbol": result.assignment.gamma(a, b).to_json(),
            });
            if args.emit_series {
                row["series"] = result.assignment.gamma_series(a, b, truncation).to_json();
            }
            report.detail(row);
        }
    }
    if !result.residuals_vanish {
        report.fail(json!({
            "nonvanishing_residuals": result
                .residuals
                .iter()
                .filter(|r| !r.is_zero())
                .map(|r| r.to_json())
                .collect::<Vec<_>>(),
        }));
    }
    for equation in &result.check.equations {
        if let Some(power) = equation.first_bad_power {
            report.fail(json!({
                "equation": equation.label,
                "first_bad_power": power,
            }));
        }
    }
    Ok(vec![report.finish(started)])
}

fn exec_rank(args: &RankArgs) -> Result<Vec<Report>> {
    let levels = args.levels.levels(1)?;
    let mut reports: Vec<Report> = levels
        .par_iter()
        .map(|&level| {
            let started = Instant::now();
            let mut report = Report::new("rank", level);
            let check = rank_and_pivots(level)?;
            let nullity = row_labels(level).len() - check.rank;
            let mut row = json!({
                "rank": check.rank,
                "nullity": nullity,
                "expected_rank": check.expected_rank,
                "pivots_match": check.pivot_cols == check.expected_pivot_cols,
            });
            if level <= 8 {
                row["pivot_cols"] = Value::from(
                    check
                        .pivot_cols
                        .iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>(),
                );
            }
            report.detail(row);
            if !check.pass() {
                let first_bad = check
                    .pivot_cols
                    .iter()
                    .zip(&check.expected_pivot_cols)
                    .find(|(got, want)| got != want)
                    .map(|(got, want)| json!({ "got": got.to_string(), "want": want.to_string() }));
                report.fail(json!({
                    "rank": check.rank,
                    "expected_rank": check.expected_rank,
                    "first_pivot_mismatch": first_bad,
                }));
            }
            Ok(report.finish(started))
        })
        .collect::<Result<_>>()?;
    reports.sort_by_key(|r| r.level);
    Ok(reports)
}

fn exec_dims(args: &DimsArgs) -> Result<Vec<Report>> {
    let started = Instant::now();
    let mut report = Report::new("dz-dims", args.level)
        .param("weight", args.weight)
        .param("pure", args.pure);
    let dims = dz_dim(args.level, args.weight, args.pure)?;
    report.detail(json!({
        "generators": dims.generators,
        "relations": dims.relation_rows,
        "distinct_relations": dims.distinct_rows,
        "rank": dims.rank,
        "dim": dims.dim,
        "doubles_generators": dims.doubles_generators,
        "doubles_rank": dims.doubles_rank,
        "doubles_dim": dims.doubles_dim,
        "printed_bound": dims.printed_bound,
        "note": dims.note,
    }));
    if dims.note.is_some() {
        report.flag();
    }
    Ok(vec![report.finish(started)])
}

fn exec_sum_formula(args: &SumFormulaArgs) -> Result<Vec<Report>> {
    let started = Instant::now();
    let mut report = Report::new("sum-formula", args.level)
        .param("weight", args.weight)
        .param("residue", args.residue);
    let check = verify_sum_formula(args.level, args.weight, args.residue)?;
    let witness_json = |witness: &[((u32, u32, u32), arith::Rat)]| -> Value {
        witness
            .iter()
            .map(|((a, b, r), coeff)| json!({ "row": [a, b, r], "coeff": coeff.to_string() }))
            .collect()
    };
    report.detail(json!({
        "odd_member": check.odd_pass,
        "odd_witness": witness_json(&check.odd_witness),
    }));
    report.detail(json!({
        "even_member": check.even_pass,
        "even_witness": witness_json(&check.even_witness),
    }));
    if !check.odd_pass {
        report.fail(json!({ "side": "odd", "member": false }));
    }
    if !check.even_pass {
        report.fail(json!({ "side": "even", "member": false }));
    }
    Ok(vec![report.finish(started)])
}

fn exec_dbsf(args: &DbsfArgs) -> Result<Vec<Report>> {
    let started = Instant::now();
    let mut report = Report::new("numeric-dbsf", args.level)
        .param("max_weight", args.max_weight)
        .param("tolerance", args.tol);
    if args.max_weight < 4 {
        return Err(Error::Usage(
            "--max-weight must be at least 4 (orders start at 2)".into(),
        ));
    }
    let n = args.level;
    let mut cells = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for r in 2..args.max_weight {
                for s in 2..args.max_weight {
                    if r + s <= args.max_weight {
                        cells.push((a, b, r, s));
                    }
                }
            }
        }
    }
    let checks = cells
        .par_iter()
        .map(|&(a, b, r, s)| verify_dbsf_numeric(args.level, a, b, r, s, args.tol))
        .collect::<Result<Vec<_>>>()?;
    let mut failures = 0usize;
    for check in &checks {
        if !check.pass() {
            failures += 1;
            if report.counterexamples.len() < 5 {
                report.fail(json!({
                    "a": check.a,
                    "b": check.b,
                    "r": check.r,
                    "s": check.s,
                    "product": check.product,
                    "stuffle_sum": check.stuffle_sum,
                    "shuffle_sum": check.shuffle_sum,
                    "stuffle_tolerance": check.stuffle_tolerance,
                    "shuffle_tolerance": check.shuffle_tolerance,
                }));
            }
        }
    }
    if failures > 0 {
        report.status = crate::report::Status::Fail;
    }
    report.detail(json!({ "cells": cells.len(), "failures": failures }));
    Ok(vec![report.finish(started)])
}

fn exec_frakz(args: &FrakzArgs) -> Result<Vec<Report>> {
    let started = Instant::now();
    let mut report = Report::new("numeric-frakz", args.level)
        .param("max_n", args.max_n)
        .param("tolerance", args.tol);
    if args.max_n < 1 {
        return Err(Error::Usage("--max-n must be at least 1".into()));
    }
    let n_level = args.level;
    // Finite closed form via root-of-unity weighted Bernoulli sums.
    let bernoulli_cells: Vec<(u32, u32)> = (0..n_level)
        .flat_map(|a| (1..=args.max_n).map(move |n| (a, n)))
        .collect();
    let bernoulli_checks = bernoulli_cells
        .par_iter()
        .map(|&(a, n)| {
            let sum = frakz_numeric(n_level, a, n)?;
            let closed = crate::numeric::frakz_vs_bernoulli(n_level, a, n, args.tol)?;
            Ok((a, n, sum, closed))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut bernoulli_failures = 0usize;
    for (a, n, sum, matches) in &bernoulli_checks {
        if !matches {
            bernoulli_failures += 1;
            report.fail(json!({
                "check": "bernoulli-closed-form",
                "residue": a,
                "n": n,
                "series": numeric_json(sum),
            }));
        }
    }
    report.detail(json!({
        "bernoulli_cells": bernoulli_cells.len(),
        "bernoulli_failures": bernoulli_failures,
    }));

    // Principal-value symmetric sums against the half-sum closed form for
    // orders where both are available.
    let pv_top = args.max_n.min(4);
    let mut pv_cells = Vec::new();
    for a in 0..n_level {
        for n in 2..=pv_top {
            pv_cells.push((a, n));
        }
    }
    let pv_checks = pv_cells
        .par_iter()
        .map(|&(a, n)| {
            let pv = frakz_pv(n_level, a, n, 1_000_000);
            let closed = frakz_numeric(n_level, a, n)?;
            Ok((a, n, pv, closed))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut pv_failures = 0usize;
    for (a, n, pv, closed) in &pv_checks {
        let gap = (pv.value - closed.value).norm();
        if gap > args.tol + pv.error_bound + closed.error_bound {
            pv_failures += 1;
            report.fail(json!({
                "check": "principal-value-vs-half-sum",
                "residue": a,
                "n": n,
                "principal_value": numeric_json(pv),
                "half_sum": numeric_json(closed),
            }));
        }
    }
    report.detail(json!({
        "principal_value_cells": pv_cells.len(),
        "principal_value_failures": pv_failures,
    }));
    Ok(vec![report.finish(started)])
}

fn exec_sign_probe(args: &LevelSweepArgs) -> Result<Vec<Report>> {
    let levels = args.levels(1)?;
    let mut reports: Vec<Report> = levels
        .par_iter()
        .map(|&level| {
            let started = Instant::now();
            let mut report = Report::new("sign-probe", level);
            let mut signs = Vec::new();
            let mut anomaly = false;
            for a in 0..level {
                let probe = gbtz_sign_probe(level, a, 1e-9)?;
                let sign = match probe.sign {
                    ProbeSign::Plus => "plus",
                    ProbeSign::Minus => "minus",
                    ProbeSign::Anomaly => "anomaly",
                };
                report.detail(json!({
                    "residue": a,
                    "constant": [probe.beta_one.re, probe.beta_one.im],
                    "series_over_2pii": [probe.z_over_2pii.re, probe.z_over_2pii.im],
                    "sign": sign,
                    "higher_orders_match": probe.higher_orders_match,
                }));
                if matches!(probe.sign, ProbeSign::Anomaly) || !probe.higher_orders_match {
                    anomaly = true;
                } else {
                    signs.push(sign);
                }
            }
            signs.dedup();
            if anomaly {
                report.flag();
            } else if signs.len() > 1 {
                report.fail(json!({ "inconsistent_signs": signs }));
            } else {
                report.detail(json!({
                    "resolved_sign": signs.first().copied().unwrap_or("n/a"),
                }));
            }
            Ok(report.finish(started))
        })
        .collect::<Result<_>>()?;
    reports.sort_by_key(|r| r.level);
    Ok(reports)
}

/// Builds the requested series; shared by `export series` and its tests.
pub fn export_series(args: &ExportSeriesArgs) -> Result<QSeries> {
    let truncation = args.truncation.unwrap_or_else(default_truncation);
    let residues = parse_u32_list(&args.residues, "residue")?;
    match args.family {
        SeriesFamily::G => {
            let orders = parse_u32_list(
                args.orders
                    .as_deref()
                    .ok_or_else(|| Error::Usage("--family g needs --orders".into()))?,
                "order",
            )?;
            if orders.len() != residues.len() {
                return Err(Error::Usage(
                    "--residues and --orders must have the same length".into(),
                ));
            }
            g_series(args.level, &residues, &orders, truncation)
        }
        SeriesFamily::GPrime => {
            let orders = parse_u32_list(
                args.orders
                    .as_deref()
                    .ok_or_else(|| Error::Usage("--family g-prime needs --orders".into()))?,
                "order",
            )?;
            if residues.len() != 1 || orders.len() != 1 {
                return Err(Error::Usage(
                    "--family g-prime takes one residue and one order".into(),
                ));
            }
            Ok(g_prime_series(
                args.level,
                residues[0],
                orders[0],
                truncation,
            ))
        }
        SeriesFamily::F2 => {
            if residues.len() != 1 {
                return Err(Error::Usage("--family f2 takes one residue".into()));
            }
            if args.orders.is_some() {
                return Err(Error::Usage("--family f2 takes no --orders".into()));
            }
            Ok(f2_series(args.level, residues[0], truncation))
        }
    }
}

fn exec_export_series(args: &ExportSeriesArgs) -> Result<Vec<Report>> {
    let started = Instant::now();
    let series = export_series(args)?;
    let mut report = Report::new("export-series", args.level)
        .param("family", format!("{:?}", args.family).to_lowercase())
        .param("residues", args.residues.as_str())
        .param("truncation", series.truncation() as u64);
    report.detail(series.to_json());
    Ok(vec![report.finish(started)])
}

/// Executes one parsed command and returns its reports.  Errors signal
/// usage or domain problems (exit code 2), not failed verifications.
pub fn run_command(cli: &Cli) -> Result<Vec<Report>> {
    match &cli.command {
        Command::Verify(VerifyCommand::EtaSums(a)) => exec_eta_sums(a),
        Command::Verify(VerifyCommand::DivisorIdentity(a)) => exec_divisor_identity(a),
        Command::Verify(VerifyCommand::DoubleShuffle(a)) => exec_double_shuffle(a),
        Command::Verify(VerifyCommand::IIdentities(a)) => exec_i_identities(a),
        Command::Verify(VerifyCommand::NullSpace(a)) => exec_null_space(a),
        Command::Verify(VerifyCommand::Beta(a)) => exec_beta(a),
        Command::Solve(SolveCommand::Gamma(a)) => exec_solve_gamma(a),
        Command::Rank(a) => exec_rank(a),
        Command::Dz(DzCommand::Dims(a)) => exec_dims(a),
        Command::Dz(DzCommand::SumFormula(a)) => exec_sum_formula(a),
        Command::Numeric(NumericCommand::Dbsf(a)) => exec_dbsf(a),
        Command::Numeric(NumericCommand::Frakz(a)) => exec_frakz(a),
        Command::Numeric(NumericCommand::SignProbe(a)) => exec_sign_probe(a),
        Command::Export(ExportCommand::Series(a)) => exec_export_series(a),
    }
}

/// One line per report, plus a final tally.
pub fn render_human(reports: &[Report]) -> String {
    let mut out = String::new();
    let mut pass = 0usize;
    let mut fail = 0usize;
    let mut flagged = 0usize;
    for r in reports {
        let tag = match r.status {
            crate::report::Status::Pass => {
                pass += 1;
                "PASS"
            }
            crate::report::Status::Fail => {
                fail += 1;
                "FAIL"
            }
            crate::report::Status::Flagged => {
                flagged += 1;
                "FLAG"
            }
        };
        let mut params = String::new();
        for (key, value) in &r.parameters {
            let _ = write!(params, " {}={}", key, value);
        }
        let _ = writeln!(
            out,
            "[{}] {} level={}{} ({} ms)",
            tag, r.task, r.level, params, r.wall_ms
        );
        for c in r.counterexamples.iter().take(3) {
            let _ = writeln!(out, "  counterexample: {}", c);
        }
        if r.counterexamples.len() > 3 {
            let _ = writeln!(out, "  ... {} more", r.counterexamples.len() - 3);
        }
        if r.status == crate::report::Status::Flagged {
            for d in &r.details {
                if let Some(note) = d.get("note").and_then(Value::as_str) {
                    let _ = writeln!(out, "  note: {}", note);
                }
            }
        }
    }
    let _ = writeln!(
        out,
        "{} report(s): {} pass, {} fail, {} flagged",
        reports.len(),
        pass,
        fail,
        flagged
    );
    out
}

/// Full binary entry point: parse, run, render, and return the exit code.
pub fn main_entry<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be positive");
            return 2;
        }
        // Best effort: fails harmlessly if a pool was already installed.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let reports = match run_command(&cli) {
        Ok(reports) => reports,
        Err(e) => {
            eprintln!("error: {}", e);
            return 2;
        }
    };
    let text = if cli.json {
        to_json_string(&reports)
    } else if let Command::Export(ExportCommand::Series(_)) = &cli.command {
        // The series itself is the artifact; print it directly.
        let mut s =
            serde_json::to_string_pretty(&reports[0].details[0]).expect("series serialization");
        s.push('\n');
        s
    } else {
        render_human(&reports)
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {}", path.display(), e);
                return 2;
            }
        }
        None => print!("{}", text),
    }
    exit_code(&reports)
}
