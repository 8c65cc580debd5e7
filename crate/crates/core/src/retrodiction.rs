//! Single-outcome quantities: retrodictive states built from a normalized effect,
//! interdictive states built from a normalized operation, and the error and
//! disturbance they define without reference to a preparation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instrument::Instrument;
use crate::operator::{
    check_dim, expectation, expectation_and_variance, spectral_decompose, trace_product, ComplexMatrix, Density,
    Hermitian,
};
use crate::quasiprob::QuasiDistribution;
use crate::tol;

/// `P_k / Tr P_k`.
#[derive(Debug, Clone)]
pub struct RetrodictiveState {
    pub state: Density,
    pub source_outcome: String,
    pub source_trace: f64,
}

fn outcome_trace(inst: &Instrument, label: &str) -> Result<(usize, f64)> {
    let k = inst.index_of(label)?;
    let trace = inst.pom()[k].trace();
    if trace <= tol::NULL_PROBABILITY {
        return Err(Error::NullOutcome {
            label: label.to_string(),
            trace,
        });
    }
    Ok((k, trace))
}

pub fn retrodictive_state(inst: &Instrument, label: &str) -> Result<RetrodictiveState> {
    let (k, trace) = outcome_trace(inst, label)?;
    let state = Density::new(inst.pom()[k].scale(1.0 / trace))?;
    Ok(RetrodictiveState {
        state,
        source_outcome: label.to_string(),
        source_trace: trace,
    })
}

/// The normalized operation `X -> A_k(X) / Tr P_k`.
#[derive(Debug, Clone)]
pub struct InterdictiveState {
    pub outcome: String,
    pub normalizer: f64,
    kraus: Vec<ComplexMatrix>,
}

impl InterdictiveState {
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let d = x.nrows();
        self.kraus
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, m| acc + m * x * m.adjoint())
            .unscale(self.normalizer)
    }

    pub fn adjoint_apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let d = x.nrows();
        self.kraus
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, m| acc + m.adjoint() * x * m)
            .unscale(self.normalizer)
    }
}

pub fn interdictive_state(inst: &Instrument, label: &str) -> Result<InterdictiveState> {
    let (k, trace) = outcome_trace(inst, label)?;
    Ok(InterdictiveState {
        outcome: label.to_string(),
        normalizer: trace,
        kraus: inst.outcomes()[k].operators.clone(),
    })
}

/// Variance of `A` in the retrodictive state of outcome `label`.
pub fn retrodictive_error_sq(inst: &Instrument, label: &str, a: &Hermitian) -> Result<f64> {
    check_dim("retrodictive error", inst.dim(), a.dim())?;
    let retro = retrodictive_state(inst, label)?;
    Ok(expectation_and_variance(a, &retro.state)?.1)
}

/// Standard deviation `epsilon_{A,k}`.
pub fn retrodictive_error(inst: &Instrument, label: &str, a: &Hermitian) -> Result<f64> {
    Ok(retrodictive_error_sq(inst, label, a)?.sqrt())
}

/// `table[b][b'] = Tr[Pi_b' A_k(Pi_b)] / Tr P_k` over the eigen-branches of `B`.
pub fn interdictive_joint_distribution(inst: &Instrument, label: &str, b: &Hermitian) -> Result<QuasiDistribution> {
    check_dim("interdictive distribution", inst.dim(), b.dim())?;
    let inter = interdictive_state(inst, label)?;
    let spectral = spectral_decompose(b, tol::DEGENERACY)?;
    let table = spectral
        .branches
        .iter()
        .map(|prior| {
            let out = inter.apply(prior.projector.matrix());
            spectral
                .branches
                .iter()
                .map(|post| trace_product(post.projector.matrix(), &out).re)
                .collect()
        })
        .collect();
    let labels: Vec<String> = (0..spectral.len()).map(|i| i.to_string()).collect();
    Ok(QuasiDistribution {
        row_labels: labels.clone(),
        col_labels: labels,
        row_values: spectral.values(),
        col_values: spectral.values(),
        table,
    })
}

/// `eta^2_{B,k} = sum (B_b - B_b')^2 p(b, b'|k)`.
pub fn interdictive_disturbance_sq(inst: &Instrument, label: &str, b: &Hermitian) -> Result<f64> {
    let dist = interdictive_joint_distribution(inst, label, b)?;
    Ok(crate::quasiprob::quasi_mean_squared_difference(&dist).max(0.0))
}

pub fn interdictive_disturbance(inst: &Instrument, label: &str, b: &Hermitian) -> Result<f64> {
    Ok(interdictive_disturbance_sq(inst, label, b)?.sqrt())
}

/// Quantities in the retrodictive state conditioned on the posterior branch `b'`,
/// `A*_k(Pi_b') / Tr A*_k(Pi_b')`. Second moments are squared deviations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RestrictedMetrics {
    pub p_posterior: f64,
    pub eps_a_sq: f64,
    pub eps_b_sq: f64,
    pub eta_b_sq: f64,
    pub retro_mean_b: f64,
    pub posterior_value: f64,
}

pub fn restricted_metrics(
    inst: &Instrument,
    label: &str,
    posterior: usize,
    a: &Hermitian,
    b: &Hermitian,
) -> Result<RestrictedMetrics> {
    check_dim("restricted metrics", inst.dim(), a.dim())?;
    check_dim("restricted metrics", inst.dim(), b.dim())?;
    let inter = interdictive_state(inst, label)?;
    let spectral = spectral_decompose(b, tol::DEGENERACY)?;
    let branch = spectral.branches.get(posterior).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "posterior branch {posterior} out of range ({} branches)",
            spectral.len()
        ))
    })?;
    let weighted = Hermitian::symmetrize(inter.adjoint_apply(branch.projector.matrix()));
    let p_posterior = weighted.trace();
    if p_posterior <= tol::NULL_PROBABILITY {
        return Err(Error::ZeroPosterior {
            label: label.to_string(),
            posterior: posterior.to_string(),
            probability: p_posterior,
        });
    }
    let state = Density::new(weighted.scale(1.0 / p_posterior))?;
    let (_, eps_a_sq) = expectation_and_variance(a, &state)?;
    let (retro_mean_b, eps_b_sq) = expectation_and_variance(b, &state)?;
    let mut eta_b_sq = 0.0;
    for prior in &spectral.branches {
        let diff = prior.value - branch.value;
        eta_b_sq += diff * diff * expectation(&prior.projector, &state)?;
    }
    Ok(RestrictedMetrics {
        p_posterior,
        eps_a_sq,
        eps_b_sq,
        eta_b_sq: eta_b_sq.max(0.0),
        retro_mean_b,
        posterior_value: branch.value,
    })
}
