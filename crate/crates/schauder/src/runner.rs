//! Parallel ensemble runs. Members are independent; reports come back in
//! (ε, member) order whatever the thread count.

use rayon::prelude::*;

use schauder_core::harness::{
    check_elliptic, run_member, run_member_rescaled, summarize, ExperimentConfig, ProbeKind, ProbeOutput, RatioReport,
};

use crate::error::{Error, Result};

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Validation("--threads must be at least 1".into()));
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Pool(e.to_string()))
}

fn precheck(cfg: &ExperimentConfig, kind: ProbeKind) -> Result<()> {
    cfg.validate()?;
    match kind {
        ProbeKind::InitialValue => {
            let s = cfg.operator.scaling();
            if s.dim() < 2 || s.weight(0) != 2 || s.weights()[1..].iter().any(|&w| w != 1) {
                return Err(Error::Validation("the ivp probe needs the parabolic scaling (2, 1, ..., 1)".into()));
            }
        }
        ProbeKind::Local { rho } if !(rho > 0.0) => return Err(Error::Validation("rho must be positive".into())),
        _ => check_elliptic(cfg)?,
    }
    Ok(())
}

/// Every (member, ε) of the configured ensemble.
pub fn run_probe(cfg: &ExperimentConfig, kind: ProbeKind, threads: Option<usize>) -> Result<ProbeOutput> {
    precheck(cfg, kind)?;
    let jobs: Vec<(usize, usize)> =
        (0..cfg.eps_list.len()).flat_map(|e| (0..cfg.ensemble).map(move |m| (e, m))).collect();
    let reports: Vec<RatioReport> = pool(threads)?.install(|| {
        jobs.par_iter()
            .map(|&(e, m)| run_member(cfg, kind, m, e))
            .collect::<std::result::Result<Vec<_>, _>>()
    })?;
    let summary = summarize(&reports);
    Ok(ProbeOutput { reports, summary, label: "window-restricted".into() })
}

/// The given members at every ε, jointly rescaled by `r`, paired with the
/// unscaled reports.
pub fn run_rescaled(
    cfg: &ExperimentConfig,
    kind: ProbeKind,
    members: &[usize],
    r: f64,
    threads: Option<usize>,
) -> Result<Vec<(RatioReport, RatioReport)>> {
    precheck(cfg, kind)?;
    let jobs: Vec<(usize, usize)> =
        (0..cfg.eps_list.len()).flat_map(|e| members.iter().map(move |&m| (e, m))).collect();
    Ok(pool(threads)?.install(|| {
        jobs.par_iter()
            .map(|&(e, m)| Ok((run_member(cfg, kind, m, e)?, run_member_rescaled(cfg, kind, m, e, r)?)))
            .collect::<std::result::Result<Vec<_>, schauder_core::Error>>()
    })?)
}
