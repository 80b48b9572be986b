use rayon::prelude::*;
use serde::Serialize;

use opcalc::bounds::{lipschitz_rank_bound_check, rank_estimate_check_pairs, rank_factor};
use opcalc::counterexample::{
    analyze_growth, build_instance_with, EpsilonRule, EtaEvaluation, SurrogateContext,
};
use opcalc::selfcheck::{run_selfcheck, SelfcheckOptions, Status};
use opcalc::{Error, SchattenIndex};

use crate::config::{OutputTarget, RunConfig};
use crate::error::CliError;
use crate::output::{open, write_rows};

pub const GROWTH_HEADER: [&str; 7] = [
    "N",
    "p",
    "lhs",
    "perturbation",
    "ratio",
    "sqrt_N",
    "besov_surrogate",
];
pub const BOUNDS_HEADER: [&str; 9] = [
    "check", "N", "p", "trial", "lhs", "bound", "ratio", "holds", "note",
];
pub const SELFCHECK_HEADER: [&str; 4] = ["module", "item", "status", "detail"];
pub const SKIP_NOTE: &str = "requires p ≥ 2";

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    AssertionFailed,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub p: String,
    pub lhs: f64,
    pub perturbation: f64,
    pub ratio: f64,
    #[serde(rename = "sqrt_N")]
    pub sqrt_n: f64,
    pub besov_surrogate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsRow {
    pub check: &'static str,
    #[serde(rename = "N")]
    pub n: usize,
    pub p: String,
    pub trial: Option<usize>,
    pub lhs: Option<f64>,
    pub bound: Option<f64>,
    pub ratio: Option<f64>,
    pub holds: Option<bool>,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfcheckRow {
    pub module: &'static str,
    pub item: &'static str,
    pub status: String,
    pub detail: String,
}

/// Sorted by value, `inf` last, duplicates removed.
fn sorted_p(list: &[SchattenIndex]) -> Vec<SchattenIndex> {
    let mut ps = list.to_vec();
    ps.sort_by(|a, b| a.value().total_cmp(&b.value()));
    ps.dedup();
    ps
}

fn sorted_n(list: &[usize]) -> Vec<usize> {
    let mut ns = list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    ns
}

pub fn growth(
    cfg: &RunConfig,
    epsilon: Option<EpsilonRule>,
    eta: EtaEvaluation,
) -> Result<Verdict, CliError> {
    let ctx = SurrogateContext::new(cfg.grid_l, cfg.grid_m)?;
    let ps = sorted_p(&cfg.p_list);
    let rule = epsilon.unwrap_or(EpsilonRule::Constant(1.0));
    // validate every ε before any heavy work
    for &n in &cfg.n_list {
        rule.epsilon(n)
            .map_err(|e| CliError::config("epsilon", e.to_string()))?;
    }

    let cells: Vec<opcalc::Result<Vec<GrowthRow>>> = sorted_n(&cfg.n_list)
        .into_par_iter()
        .map(|n| {
            let inst = build_instance_with(n, eta)?;
            let analysis = analyze_growth(&inst, rule.epsilon(n)?, &ctx)?;
            Ok(ps
                .iter()
                .map(|&p| {
                    let r = analysis.record(p);
                    GrowthRow {
                        n,
                        p: p.to_string(),
                        lhs: r.lhs,
                        perturbation: r.perturbation,
                        ratio: r.ratio,
                        sqrt_n: r.sqrt_n(),
                        besov_surrogate: r.besov_surrogate,
                    }
                })
                .collect())
        })
        .collect();
    let rows: Vec<GrowthRow> = cells
        .into_iter()
        .collect::<opcalc::Result<Vec<_>>>()?
        .concat();

    let mut w = open(&cfg.output)?;
    write_rows(&mut *w, cfg.format, &GROWTH_HEADER, &rows)?;

    let bad: Vec<&GrowthRow> = rows
        .iter()
        .filter(|r| {
            let err = (r.ratio - r.sqrt_n).abs();
            err.is_nan() || err > opcalc::counterexample::GROWTH_RTOL * r.sqrt_n
        })
        .collect();
    for r in &bad {
        eprintln!(
            "ratio {} differs from sqrt(N) = {} at N = {}, p = {}",
            r.ratio, r.sqrt_n, r.n, r.p
        );
    }
    Ok(if bad.is_empty() {
        Verdict::Pass
    } else {
        Verdict::AssertionFailed
    })
}

pub fn bounds(cfg: &RunConfig) -> Result<Verdict, CliError> {
    let cells: Vec<(usize, SchattenIndex)> = sorted_n(&cfg.n_list)
        .into_iter()
        .flat_map(|n| sorted_p(&cfg.p_list).into_iter().map(move |p| (n, p)))
        .collect();
    let (trials, seed) = (cfg.trials, cfg.seed);

    let results: Vec<opcalc::Result<Vec<BoundsRow>>> = cells
        .par_iter()
        .map(|&(n, p)| {
            let mut rows = Vec::new();
            let ps = p.to_string();
            match rank_estimate_check_pairs(n, p, trials, seed) {
                Ok(report) => rows.extend(report.trials.iter().map(|t| {
                    let bound = rank_factor(n, p) * t.reference_norm * t.perturbation;
                    BoundsRow {
                        check: "pairs",
                        n,
                        p: ps.clone(),
                        trial: Some(t.trial),
                        lhs: Some(t.delta_f_p),
                        bound: Some(bound),
                        ratio: Some(t.ratio),
                        holds: Some(t.holds()),
                        note: String::new(),
                    }
                })),
                Err(Error::RequiresPAtLeastTwo(_)) if trials > 0 => rows.push(BoundsRow {
                    check: "pairs",
                    n,
                    p: ps.clone(),
                    trial: None,
                    lhs: None,
                    bound: None,
                    ratio: None,
                    holds: None,
                    note: SKIP_NOTE.to_string(),
                }),
                Err(Error::RequiresPAtLeastTwo(_)) => {}
                Err(e) => return Err(e),
            }
            let report = lipschitz_rank_bound_check(n, p, trials, seed)?;
            rows.extend(report.trials.iter().map(|t| BoundsRow {
                check: "lipschitz",
                n,
                p: ps.clone(),
                trial: Some(t.trial),
                lhs: Some(t.lhs),
                bound: Some(t.rhs),
                ratio: t.ratio.is_finite().then_some(t.ratio),
                holds: Some(t.holds()),
                note: String::new(),
            }));
            Ok(rows)
        })
        .collect();
    let rows: Vec<BoundsRow> = results
        .into_iter()
        .collect::<opcalc::Result<Vec<_>>>()?
        .concat();

    let mut w = open(&cfg.output)?;
    write_rows(&mut *w, cfg.format, &BOUNDS_HEADER, &rows)?;

    let failures = rows.iter().filter(|r| r.holds == Some(false)).count();
    if failures > 0 {
        eprintln!("{failures} trials violate a proven inequality");
    }
    Ok(if failures == 0 {
        Verdict::Pass
    } else {
        Verdict::AssertionFailed
    })
}

pub fn selfcheck(cfg: &RunConfig, eta: EtaEvaluation, n_given: bool) -> Result<Verdict, CliError> {
    let defaults = SelfcheckOptions::default();
    let opts = SelfcheckOptions {
        seed: cfg.seed,
        half_width: cfg.grid_l,
        grid_m: cfg.grid_m,
        strict: cfg.strict,
        eta,
        n_list: if n_given {
            cfg.n_list.clone()
        } else {
            defaults.n_list
        },
        p_list: cfg.p_list.clone(),
        trials: cfg.trials,
    };
    let report = run_selfcheck(&opts);

    let mut stdout = std::io::stdout().lock();
    use std::io::Write;
    for item in &report.items {
        writeln!(stdout, "{item}")?;
    }
    writeln!(
        stdout,
        "{} passed, {} warnings, {} failed",
        report.count(Status::Pass),
        report.count(Status::Warn),
        report.count(Status::Fail)
    )?;
    stdout.flush()?;

    if let OutputTarget::File(_) = cfg.output {
        let rows: Vec<SelfcheckRow> = report
            .items
            .iter()
            .map(|i| SelfcheckRow {
                module: i.module,
                item: i.name,
                status: i.status.to_string(),
                detail: i.detail.clone(),
            })
            .collect();
        let mut w = open(&cfg.output)?;
        write_rows(&mut *w, cfg.format, &SELFCHECK_HEADER, &rows)?;
    }
    Ok(if report.passed() {
        Verdict::Pass
    } else {
        Verdict::AssertionFailed
    })
}
