//! One function per subcommand. Each returns a [`Report`] and writes its
//! files into the output directory; verdicts live in the report, errors in
//! the `Result`.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use povmw::boxworld::{
    pr_max_bound, scan_example_strategy, sharp_simulable_bound, EXAMPLE_PAYOFF, EXAMPLE_TOL,
};
use povmw::classical::{
    classical_bound, classical_bound_grid, feasibility, sym_adaptive_feasibility, Constraints,
    FeasibilityResult, Target, FEASIBLE_TOL, INFEASIBLE_EVIDENCE_TOL,
};
use povmw::quantum::born_correlation;
use povmw::search::SearchConfig;
use povmw::tasks::{membership, payoff, RegionTask, TargetSet, TaskSpec, TARGET_IDS};
use povmw::Correlation;
use serde_json::json;

use crate::report::{Checked, Report};
use crate::scenario::Scenario;
use crate::svg::{region_csv, region_rows, region_svg};
use crate::table::{parse_inline_table, read_correlation_csv, write_correlation_csv};

/// Tolerance for payoff values computed from exact strategies.
pub const PAYOFF_TOL: f64 = 1e-12;
/// Tolerance for target-set membership of simulated correlations.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn cmd_simulate(path: &Path, out: Option<&Path>) -> Result<Report> {
    let scenario = Scenario::load(path)?;
    let out: PathBuf = out
        .map(Path::to_path_buf)
        .or_else(|| scenario.out.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let (rho, povms) = scenario.resolve()?;
    let corr = born_correlation(&rho, &povms)?;
    let mut report = Report::new("simulate", scenario.seed, None);
    report.set("scenario", &scenario)?;
    report.set("outcomes", corr.outcomes())?;
    report.set(
        "correlation",
        Checked::new(0.0, povmw::correlation::NORM_TOL),
    )?;
    report.set("probabilities", corr.probs())?;
    if let Some(task) = scenario.task()? {
        let v = payoff(&task, &corr)?;
        report.set("task", task.id.as_str())?;
        report.set("payoff", Checked::new(v, PAYOFF_TOL))?;
        report.line(format!("payoff[{}] = {v:.12}", task.id));
    }
    let ids: Vec<String> = if scenario.targets.is_empty() {
        TARGET_IDS.iter().map(|s| s.to_string()).collect()
    } else {
        scenario.targets.clone()
    };
    let mut verdicts = Vec::new();
    for id in ids {
        let set = TargetSet::parse(&id, None, None, None, None)?;
        if corr.outcomes() != [set.k(), set.k()] {
            if !scenario.targets.is_empty() {
                bail!("target {id} expects a {0}x{0} correlation", set.k());
            }
            continue;
        }
        let m = membership(&corr, &set, MEMBERSHIP_TOL);
        report.line(format!("member of {id}: {}", m.member));
        verdicts.push(json!({ "set": id, "member": m.member, "fitted": m.fitted, "tol": m.tol }));
    }
    report.set("membership", verdicts)?;
    ensure_dir(&out)?;
    write_correlation_csv(&out.join("correlation.csv"), &corr)?;
    report.write(&out)?;
    Ok(report)
}

pub struct BoundArgs {
    pub task: String,
    pub oracle: bool,
    pub resolution: usize,
    pub seed: u64,
    pub restarts: usize,
}

pub fn cmd_bound(args: &BoundArgs, out: &Path) -> Result<Report> {
    let task: TaskSpec = args.task.parse()?;
    let cfg = SearchConfig::for_bounds(args.seed).with_restarts(args.restarts);
    let r = classical_bound(&task, &cfg)?;
    let mut report = Report::new("bound", Some(args.seed), Some(args.restarts));
    report.set("task", task.id.as_str())?;
    report.set("bound", Checked::new(r.value, cfg.ftol))?;
    report.set("restarts_used", r.restarts_used)?;
    report.set(
        "witness",
        json!({ "state": r.state, "maps": r.maps, "correlation": r.correlation }),
    )?;
    report.line(format!(
        "classical bound[{}] = {:.12e} ({} restarts)",
        task.id, r.value, r.restarts_used
    ));
    if args.oracle {
        let g = classical_bound_grid(&task, args.resolution)?;
        let tol = 2.0 / args.resolution as f64;
        let gap = r.value - g.value;
        report.set(
            "oracle",
            json!({ "value": g.value, "resolution": args.resolution, "model": g.model }),
        )?;
        report.set(
            "agreement",
            json!({ "gap": Checked::new(gap, tol), "agrees": gap.abs() <= tol }),
        )?;
        report.line(format!(
            "grid oracle (resolution {}) = {:.12e}, gap {gap:.3e}",
            args.resolution, g.value
        ));
    }
    ensure_dir(out)?;
    write_correlation_csv(&out.join("correlation.csv"), &r.correlation)?;
    report.write(out)?;
    Ok(report)
}

pub enum TargetArg {
    Set(TargetSet),
    Inline(String),
    Csv(PathBuf),
    Named(String),
}

/// Named targets: `uniform9`, `uniform16`, `uniformK` for any square K.
fn named_target(name: &str) -> Result<Correlation> {
    let n: usize = name
        .strip_prefix("uniform")
        .and_then(|s| s.parse().ok())
        .with_context(|| format!("unknown target `{name}`"))?;
    let k = (n as f64).sqrt().round() as usize;
    if k * k != n || k == 0 {
        bail!("`{name}`: {n} is not a square number of outcome pairs");
    }
    Ok(Correlation::uniform(vec![k, k]))
}

pub struct FeasibleArgs {
    pub target: TargetArg,
    pub d: usize,
    pub identical: bool,
    pub adaptive: bool,
    pub canonical: bool,
    pub seed: u64,
    pub restarts: usize,
}

fn feasibility_json(r: &FeasibilityResult) -> serde_json::Value {
    json!({
        "status": r.status,
        "analytic": r.proof.is_some(),
        "proof": r.proof,
        "proof_text": r.proof.as_ref().map(|c| c.to_string()),
        "best_residual": r.best_residual,
        "feasible_tol": FEASIBLE_TOL,
        "evidence_tol": INFEASIBLE_EVIDENCE_TOL,
        "restarts_used": r.restarts_used,
        "model": r.model,
        "witness": r.witness,
        "closest": r.closest,
        "target": r.target,
    })
}

pub fn cmd_feasible(args: &FeasibleArgs, out: &Path) -> Result<Report> {
    let cfg = SearchConfig::for_infeasibility(args.seed).with_restarts(args.restarts);
    let target = match &args.target {
        TargetArg::Set(s) => Target::Set(*s),
        TargetArg::Inline(s) => Target::Point(parse_inline_table(s)?),
        TargetArg::Csv(p) => Target::Point(read_correlation_csv(p)?),
        TargetArg::Named(n) => Target::Point(named_target(n)?),
    };
    let r = if args.adaptive {
        sym_adaptive_feasibility(&target.correlation()?, &cfg)?
    } else {
        let constraints = Constraints {
            identical_maps: args.identical,
            adaptive_pair: false,
            canonical: args.canonical,
        };
        feasibility(&target, args.d, constraints, &cfg)?
    };
    let mut report = Report::new("feasible", Some(args.seed), Some(args.restarts));
    report.set("target_label", target.label())?;
    report.set("d", args.d)?;
    report.set("result", feasibility_json(&r))?;
    report.line(format!(
        "status: {:?}{}; best residual {:.3e} after {} restarts",
        r.status,
        r.proof
            .as_ref()
            .map(|c| format!(" (analytic: {c})"))
            .unwrap_or_default(),
        r.best_residual,
        r.restarts_used
    ));
    ensure_dir(out)?;
    write_correlation_csv(&out.join("correlation.csv"), &r.closest)?;
    report.write(out)?;
    Ok(report)
}

pub fn cmd_region(task: RegionTask, points: usize, out: &Path) -> Result<Report> {
    let rows = region_rows(task, points)?;
    ensure_dir(out)?;
    std::fs::write(out.join("region.csv"), region_csv(&rows)?)?;
    std::fs::write(out.join("region.svg"), region_svg(task, &rows))?;
    let mut report = Report::new("region", None, None);
    report.set("task", task.code())?;
    report.set("boundaries", task.boundaries())?;
    report.set("mi_one_crossing", povmw::tasks::mi_threshold_crossing(task))?;
    report.set("points", rows.len())?;
    let [b1, b2] = task.boundaries();
    report.line(format!(
        "region {}: boundaries x = {b1:.12}, {b2:.12}",
        task.code()
    ));
    report.write(out)?;
    Ok(report)
}

pub struct BoxworldArgs {
    pub seed: u64,
    pub restarts: usize,
    pub scan_points: usize,
}

pub fn cmd_boxworld(args: &BoxworldArgs, out: &Path) -> Result<Report> {
    let cfg = SearchConfig::for_bounds(args.seed).with_restarts(args.restarts);
    let scan = scan_example_strategy(args.scan_points);
    let sharp = sharp_simulable_bound(&cfg)?;
    let pr = pr_max_bound(&cfg)?;
    let mut report = Report::new("boxworld", Some(args.seed), Some(args.restarts));
    report.set(
        "example_scan",
        json!({
            "best_p1": scan.best_p1,
            "best_payoff": scan.best_payoff,
            "target": Checked::new(EXAMPLE_PAYOFF, EXAMPLE_TOL),
            "p1_at_target": scan.p1_at_target,
            "reaches_target": scan.p1_at_target.is_some(),
        }),
    )?;
    report.set("sharp_simulable_bound", &sharp)?;
    report.set("pr_max_bound", &pr)?;
    report.line(format!(
        "example strategy: max payoff {:.6} at p1 = {:.6}{}",
        scan.best_payoff,
        scan.best_p1,
        if scan.p1_at_target.is_some() {
            ""
        } else {
            " (0.15 not reached)"
        }
    ));
    report.line(format!("sharp-simulable bound = {:.9}", sharp.value));
    report.line(format!("PR-model maximum = {:.9}", pr.value));
    ensure_dir(out)?;
    write_correlation_csv(&out.join("correlation.csv"), &pr.correlation)?;
    report.write(out)?;
    Ok(report)
}
