//! JSON and CSV renderings of the core reports.
//!
//! Non-finite numbers become `null` in JSON; infinite ratios are also marked
//! by `rhs_zero`.

use std::fmt::Write as _;

use serde_json::{json, Value};

use schauder_core::coeff_bounds::{ProbeReport, WeightSystem};
use schauder_core::harness::{EpsSummary, ProbeOutput, RatioReport};
use schauder_core::liouville::{KernelBasis, SymbolZero};
use schauder_core::norms::{NormReport, Witness};
use schauder_core::ops::{EllipticityReport, SymbolCheck};
use schauder_core::{LatticeWindow, C64};

fn complex(v: C64) -> Value {
    json!([v.re, v.im])
}

pub fn window_json(w: &LatticeWindow) -> Value {
    json!({
        "d": w.dim(),
        "s": w.scaling().weights(),
        "eps": w.eps(),
        "lo": w.lo(),
        "hi": w.hi(),
        "label": "window-restricted",
    })
}

pub fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::None => Value::Null,
        Witness::Pair { x, y } => json!({ "x": x, "y": y }),
        Witness::Triple { x, y, z } => json!({ "x": x, "y": y, "z": z }),
        Witness::Scale { x, lambda, member } => json!({ "x": x, "lambda": lambda, "member": member }),
    }
}

pub fn norm_json(r: &NormReport) -> Value {
    let fit = r.fit.as_ref().map(|p| {
        json!({
            "center": p.center.coords(),
            "value": p.value,
            "coefficients": p.coefficients.iter().map(|(b, c)| json!({ "beta": b.entries(), "nu": complex(*c) })).collect::<Vec<_>>(),
        })
    });
    json!({
        "name": r.name,
        "value": r.value,
        "eta": r.eta,
        "alpha": r.alpha,
        "gamma": r.gamma,
        "radius": r.radius,
        "witness": witness_json(&r.witness),
        "window": window_json(&r.window),
        "fit": fit,
    })
}

fn witness_cell(w: &Witness) -> String {
    let idx = |v: &[i64]| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
    match w {
        Witness::None => String::new(),
        Witness::Pair { x, y } => format!("x={};y={}", idx(x), idx(y)),
        Witness::Triple { x, y, z } => format!("x={};y={};z={}", idx(x), idx(y), idx(z)),
        Witness::Scale { x, lambda, member } => format!("x={};lambda={lambda:e};member={member}", idx(x)),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.16e}")).unwrap_or_default()
}

pub const NORM_CSV_HEADER: &str = "name,value,eta,alpha,gamma,radius,witness,eps";

pub fn norm_csv_row(r: &NormReport) -> String {
    format!(
        "{},{:.16e},{},{},{},{},{},{:.16e}",
        r.name,
        r.value,
        opt(r.eta),
        opt(r.alpha),
        opt(r.gamma),
        opt(r.radius),
        witness_cell(&r.witness),
        r.window.eps()
    )
}

pub fn symbol_check_json(c: &SymbolCheck) -> Value {
    json!({
        "verdict": c.verdict.as_str(),
        "min_ratio": c.min_ratio,
        "modulus": c.modulus,
        "witness": c.witness,
        "symbol": complex(c.symbol),
        "samples": c.samples,
    })
}

pub fn ellipticity_json(r: &EllipticityReport) -> Value {
    json!({
        "verdict": r.overall.as_str(),
        "eps": r.eps,
        "resolution": r.resolution,
        "continuum": symbol_check_json(&r.continuum),
        "discrete": symbol_check_json(&r.discrete),
    })
}

pub fn kernel_json(k: &KernelBasis) -> Value {
    json!({
        "eta": k.eta,
        "eps": k.eps,
        "dim": k.dim(),
        "monomials": k.monomials.iter().map(|m| m.entries().to_vec()).collect::<Vec<_>>(),
        "basis": k.basis.iter().map(|b| b.iter().map(|c| complex(*c)).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

pub fn zero_json(z: &SymbolZero) -> Value {
    json!({
        "theta": z.theta,
        "symbol": complex(z.symbol),
        "residual": z.residual,
        "verified": z.verified,
    })
}

pub fn weights_json(w: &WeightSystem) -> Value {
    let entries: Vec<Value> = w
        .indices
        .iter()
        .enumerate()
        .map(|(i, b)| {
            json!({
                "beta": b.entries(),
                "kappa": w.kappa[i],
                "rho": w.rho[i],
                "absorption": w.absorption_sum(i),
            })
        })
        .collect();
    json!({
        "s": w.scaling.weights(),
        "delta": w.delta,
        "eps_levels": w.eps_level.iter().map(|(k, v)| json!({ "degree": k, "eps": v })).collect::<Vec<_>>(),
        "indices": entries,
        "worst_ratio": w.worst_ratio(),
        "verified": w.verify(),
    })
}

pub fn probe_report_json(p: &ProbeReport) -> Value {
    json!({
        "coefficients": p.coefficients.iter().map(|(b, c)| json!({ "beta": b.entries(), "nu": complex(*c) })).collect::<Vec<_>>(),
        "ratios": p.ratios,
        "probes": p.probes,
        "offsets": p.offsets,
        "residual": p.residual,
    })
}

pub fn ratio_json(r: &RatioReport) -> Value {
    json!({
        "member": r.member,
        "eps": r.eps,
        "lhs": r.lhs,
        "lhs_witness": witness_json(&r.lhs_witness),
        "operator_term": r.operator_term,
        "fit_term": r.fit_term,
        "initial_term": r.initial_term,
        "sup_term": r.sup_term,
        "rhs": r.rhs,
        "ratio": r.ratio,
        "rhs_zero": r.rhs_zero,
        "solver_residual": r.solver_residual,
        "window": window_json(&r.window),
    })
}

pub fn summary_json(s: &EpsSummary) -> Value {
    json!({
        "eps": s.eps,
        "count": s.count,
        "flagged": s.flagged,
        "max": s.max,
        "median": s.median,
        "min": s.min,
    })
}

pub fn probe_output_json(p: &ProbeOutput) -> Value {
    json!({
        "label": p.label,
        "summary": p.summary.iter().map(summary_json).collect::<Vec<_>>(),
        "reports": p.reports.iter().map(ratio_json).collect::<Vec<_>>(),
    })
}

pub const RATIO_CSV_HEADER: &str = "member,eps,lhs,operator_term,fit_term,initial_term,sup_term,rhs,ratio,rhs_zero,solver_residual,lhs_witness,label";

/// One row per (member, ε).
pub fn ratio_csv(reports: &[RatioReport]) -> String {
    let mut out = String::from(RATIO_CSV_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{},{},{:.16e},{:.16e},{},{:.16e},{},window-restricted",
            r.member,
            r.eps,
            r.lhs,
            r.operator_term,
            r.fit_term,
            opt(r.initial_term),
            opt(r.sup_term),
            r.rhs,
            r.ratio,
            r.rhs_zero,
            r.solver_residual,
            witness_cell(&r.lhs_witness)
        );
    }
    out
}
