//! Full analysis of a scenario, weak-probe sweeps, and their text/CSV renderings.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::inequality::{evaluate_all, InequalityRecord, RelationId};
use crate::metrics::{
    delta_a, delta_b, epsilon_sq_joint, epsilon_sq_system, eta_sq_joint, eta_sq_lindblad, eta_sq_system, is_qnd,
    is_unbiased, lindblad_decomposition, three_state_cross_term, unbiased_dispersion, NoiseReport,
};
use crate::operator::{commutator_bound, max_norm};
use crate::quasiprob::{
    quasi_mean_squared_difference, tmh_disturbance_distribution, tmh_error_distribution,
    weak_probe_disturbance_distribution, weak_probe_error_distribution, QuasiDistribution,
};
use crate::retrodiction::{interdictive_disturbance, retrodictive_error, retrodictive_state};
use crate::scenario::Scenario;
use crate::tol;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize)]
pub struct NoiseSection {
    pub delta: f64,
    pub system: NoiseReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub joint: Option<NoiseReport>,
    pub quasi: f64,
    pub three_state: (f64, f64),
    pub unbiased: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dispersion: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DisturbanceSection {
    pub delta: f64,
    pub system: NoiseReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub joint: Option<NoiseReport>,
    pub quasi: f64,
    pub lindblad: f64,
    pub qnd: bool,
    /// `max |L_k(B)|` per outcome.
    pub lindblad_norms: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutcomeSection {
    pub label: String,
    pub probability: f64,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub retro_epsilon_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub retro_epsilon_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interdictive_eta_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub retro_commutator: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema_version: &'static str,
    pub name: String,
    pub digest: String,
    pub dimension: usize,
    pub noise: NoiseSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disturbance: Option<DisturbanceSection>,
    pub outcomes: Vec<OutcomeSection>,
    pub tmh_error: QuasiDistribution,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmh_disturbance: Option<QuasiDistribution>,
    pub inequalities: Vec<InequalityRecord>,
    /// `epsilon_A eta_B < C_AB` for this scenario.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub heisenberg_form_violated: Option<bool>,
}

fn cross_check(what: &str, a: f64, b: f64) -> Result<()> {
    if (a - b).abs() > tol::CROSS_CHECK * a.abs().max(b.abs()).max(1.0) {
        return Err(Error::InternalConsistency(format!("{what}: {a} vs {b}")));
    }
    Ok(())
}

pub fn analyze(scenario: &Scenario) -> Result<AnalysisReport> {
    let (rho, a, inst, m) = (
        &scenario.state,
        &scenario.observable_a,
        &scenario.instrument,
        &scenario.values_m,
    );

    let system = epsilon_sq_system(inst, m, a, rho)?;
    let joint = scenario.model().map(|md| epsilon_sq_joint(md, m, a, rho)).transpose()?;
    let tmh_error = tmh_error_distribution(rho, a, inst, m)?;
    let quasi = quasi_mean_squared_difference(&tmh_error);
    cross_check("epsilon^2 quasi vs system", quasi, system.second_moment)?;
    if let Some(j) = &joint {
        cross_check("epsilon^2 joint vs system", j.second_moment, system.second_moment)?;
    }
    let three_state = three_state_cross_term(inst, m, a, rho)?;
    cross_check("three-state identity", three_state.0, three_state.1)?;
    let unbiased = is_unbiased(inst, m, a)?;
    let noise = NoiseSection {
        delta: delta_a(inst, m, a, rho)?,
        system,
        joint,
        quasi,
        three_state,
        unbiased,
        dispersion: if unbiased {
            Some(unbiased_dispersion(inst, m, a, rho)?)
        } else {
            None
        },
    };

    let (disturbance, tmh_disturbance) = match &scenario.observable_b {
        Some(b) => {
            let system = eta_sq_system(inst, b, rho)?;
            let joint = scenario.model().map(|md| eta_sq_joint(md, b, rho)).transpose()?;
            let dist = tmh_disturbance_distribution(rho, b, inst)?;
            let quasi = quasi_mean_squared_difference(&dist);
            let lindblad = eta_sq_lindblad(inst, b, rho)?;
            cross_check("eta^2 quasi vs system", quasi, system.second_moment)?;
            cross_check("eta^2 Lindblad vs system", lindblad, system.second_moment)?;
            if let Some(j) = &joint {
                cross_check("eta^2 joint vs system", j.second_moment, system.second_moment)?;
            }
            let lindblad_norms = inst
                .labels()
                .map(|l| {
                    Ok((
                        l.to_string(),
                        max_norm(lindblad_decomposition(inst, l, b)?.lindblad_part.matrix()),
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            let section = DisturbanceSection {
                delta: delta_b(inst, b, rho)?,
                system,
                joint,
                quasi,
                lindblad,
                qnd: is_qnd(inst, b),
                lindblad_norms,
            };
            (Some(section), Some(dist))
        }
        None => (None, None),
    };

    let probabilities = inst.probabilities(rho)?;
    let values = m.ordered(inst)?;
    let mut outcomes = Vec::with_capacity(inst.len());
    for ((label, p), v) in inst.labels().zip(probabilities).zip(values) {
        let live = inst.effect(label)?.trace() > tol::NULL_PROBABILITY;
        let mut o = OutcomeSection {
            label: label.to_string(),
            probability: p,
            value: v,
            retro_epsilon_a: None,
            retro_epsilon_b: None,
            interdictive_eta_b: None,
            retro_commutator: None,
        };
        if live {
            o.retro_epsilon_a = Some(retrodictive_error(inst, label, a)?);
            if let Some(b) = &scenario.observable_b {
                o.retro_epsilon_b = Some(retrodictive_error(inst, label, b)?);
                o.interdictive_eta_b = Some(interdictive_disturbance(inst, label, b)?);
                o.retro_commutator = Some(commutator_bound(a, b, &retrodictive_state(inst, label)?.state)?);
            }
        }
        outcomes.push(o);
    }

    let inequalities = evaluate_all(scenario)?;
    let heisenberg_form_violated = inequalities
        .iter()
        .find(|r| r.relation == RelationId::NaiveErrorDisturbance)
        .map(|r| !r.satisfied);
    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        name: scenario.name().to_string(),
        digest: scenario.digest(),
        dimension: scenario.dim(),
        noise,
        disturbance,
        outcomes,
        tmh_error,
        tmh_disturbance,
        inequalities,
        heisenberg_form_violated,
    })
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let n = &self.noise;
        let _ = writeln!(
            s,
            "scenario {} (d = {}, digest {})",
            self.name, self.dimension, self.digest
        );
        let _ = writeln!(s, "\nestimation noise");
        let _ = writeln!(s, "  delta_A              {:.9}", clean(n.delta, 9));
        let _ = writeln!(s, "  epsilon^2 (system)   {:.9}", n.system.second_moment);
        if let Some(j) = &n.joint {
            let _ = writeln!(s, "  epsilon^2 (joint)    {:.9}", j.second_moment);
        }
        let _ = writeln!(s, "  epsilon^2 (quasi)    {:.9}", n.quasi);
        let _ = writeln!(
            s,
            "  components           first {:.6}  second {:.6}  cross {:.6}",
            n.system.components.first, n.system.components.second, n.system.components.cross
        );
        let _ = writeln!(s, "  unbiased             {}", n.unbiased);
        if let Some(d) = n.dispersion {
            let _ = writeln!(s, "  dispersion           {d:.9}");
        }
        if let Some(d) = &self.disturbance {
            let _ = writeln!(s, "\ndisturbance");
            let _ = writeln!(s, "  delta_B              {:.9}", clean(d.delta, 9));
            let _ = writeln!(s, "  eta^2 (system)       {:.9}", d.system.second_moment);
            if let Some(j) = &d.joint {
                let _ = writeln!(s, "  eta^2 (joint)        {:.9}", j.second_moment);
            }
            let _ = writeln!(s, "  eta^2 (quasi)        {:.9}", d.quasi);
            let _ = writeln!(s, "  eta^2 (Lindblad)     {:.9}", d.lindblad);
            let _ = writeln!(s, "  QND                  {}", d.qnd);
        }
        let _ = writeln!(s, "\noutcomes");
        let _ = writeln!(
            s,
            "  {:<8} {:>10} {:>12} {:>12} {:>12} {:>12}",
            "label", "p_k", "m_k", "eps_A,k", "eps_B,k", "eta_B,k"
        );
        for o in &self.outcomes {
            let _ = writeln!(
                s,
                "  {:<8} {:>10.6} {:>12.6} {:>12} {:>12} {:>12}",
                o.label,
                o.probability,
                o.value,
                fmt_opt(o.retro_epsilon_a),
                fmt_opt(o.retro_epsilon_b),
                fmt_opt(o.interdictive_eta_b)
            );
        }
        if !self.inequalities.is_empty() {
            let _ = writeln!(s, "\nrelations");
            for r in &self.inequalities {
                let _ = writeln!(
                    s,
                    "  {:<28} lhs {:>12.6}  rhs {:>12.6}  margin {:>12.3e}  {}",
                    r.relation.name(),
                    r.lhs,
                    r.rhs,
                    r.margin,
                    match (r.satisfied, r.relation.is_universal()) {
                        (true, _) => "ok",
                        (false, true) => "VIOLATED",
                        (false, false) => "fails",
                    }
                );
            }
        }
        if self.heisenberg_form_violated == Some(true) {
            let _ = writeln!(
                s,
                "\nnote: epsilon_A eta_B < C_AB here, so the naive Heisenberg form fails"
            );
        }
        s
    }
}

/// Round-off below the printed precision shows as `0`, not `-0`.
fn clean(x: f64, digits: i32) -> f64 {
    if x.abs() < 0.5 * 10f64.powi(-digits) {
        0.0
    } else {
        x
    }
}

/// `row_label,col_label,row_value,col_value,weight`.
pub fn distribution_csv(dist: &QuasiDistribution) -> String {
    let mut s = String::from("row_label,col_label,row_value,col_value,weight\n");
    for (r, c, rv, cv, w) in dist.cells() {
        let _ = writeln!(s, "{r},{c},{rv:e},{cv:e},{w:e}");
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub g: f64,
    pub error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disturbance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub error_slope: Option<f64>,
    pub disturbance_slope: Option<f64>,
}

/// Least-squares slope of `ln err` against `ln g`; `None` when fewer than two
/// points have a resolvable error.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, e)| *e > 1e-14)
        .map(|(g, e)| (g.ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

/// Max-norm distance between weak-probe and TMH tables for each strength.
pub fn weak_sweep(scenario: &Scenario, g_list: &[f64]) -> Result<SweepTable> {
    if g_list.is_empty() {
        return Err(Error::InvalidArgument("empty strength list".into()));
    }
    let (rho, a, inst, m) = (
        &scenario.state,
        &scenario.observable_a,
        &scenario.instrument,
        &scenario.values_m,
    );
    let tmh = tmh_error_distribution(rho, a, inst, m)?;
    let tmh_b = scenario
        .observable_b
        .as_ref()
        .map(|b| tmh_disturbance_distribution(rho, b, inst))
        .transpose()?;
    let rows = g_list
        .par_iter()
        .map(|&g| {
            let error = weak_probe_error_distribution(rho, a, inst, m, g)?.max_abs_diff(&tmh)?;
            let disturbance = match (&scenario.observable_b, &tmh_b) {
                (Some(b), Some(t)) => Some(weak_probe_disturbance_distribution(rho, b, inst, g)?.max_abs_diff(t)?),
                _ => None,
            };
            Ok(SweepRow { g, error, disturbance })
        })
        .collect::<Result<Vec<_>>>()?;
    let error_slope = log_log_slope(&rows.iter().map(|r| (r.g, r.error)).collect::<Vec<_>>());
    let disturbance_slope = tmh_b.as_ref().and_then(|_| {
        log_log_slope(
            &rows
                .iter()
                .filter_map(|r| r.disturbance.map(|d| (r.g, d)))
                .collect::<Vec<_>>(),
        )
    });
    Ok(SweepTable {
        rows,
        error_slope,
        disturbance_slope,
    })
}

impl SweepTable {
    /// `g,error,disturbance` rows, then a `slope` row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("g,error,disturbance\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:e},{}",
                r.g,
                r.error,
                r.disturbance.map_or(String::new(), |d| format!("{d:e}"))
            );
        }
        let slope = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:.6}"));
        let _ = writeln!(s, "slope,{},{}", slope(self.error_slope), slope(self.disturbance_slope));
        s
    }
}
