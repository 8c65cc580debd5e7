//! Terletsky-Margenau-Hill joint quasiprobabilities for noise and disturbance,
//! conditional weak values, and a two-outcome weak probe that approaches them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instrument::{solve_contextual_values, Instrument, ValueAssignment};
use crate::operator::{
    check_dim, expectation, jordan_product, max_norm, spectral_decompose, trace_product, ComplexMatrix, Density,
    Hermitian, SpectralDecomposition,
};
use crate::tol;

/// Dense real table with labelled, valued rows and columns. Entries may be negative.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiDistribution {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub row_values: Vec<f64>,
    pub col_values: Vec<f64>,
    pub table: Vec<Vec<f64>>,
}

impl QuasiDistribution {
    pub fn total(&self) -> f64 {
        self.table.iter().flatten().sum()
    }

    pub fn row_marginals(&self) -> Vec<f64> {
        self.table.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_marginals(&self) -> Vec<f64> {
        (0..self.col_labels.len())
            .map(|j| self.table.iter().map(|r| r[j]).sum())
            .collect()
    }

    pub fn min_entry(&self) -> f64 {
        self.table.iter().flatten().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest entrywise difference between two tables of the same shape.
    pub fn max_abs_diff(&self, other: &QuasiDistribution) -> Result<f64> {
        if self.row_labels.len() != other.row_labels.len() || self.col_labels.len() != other.col_labels.len() {
            return Err(Error::DimensionMismatch {
                context: "quasi-distribution comparison",
                expected: self.row_labels.len() * self.col_labels.len(),
                found: other.row_labels.len() * other.col_labels.len(),
            });
        }
        Ok(self
            .table
            .iter()
            .flatten()
            .zip(other.table.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// `(row label, col label, row value, col value, weight)` per cell, row-major.
    pub fn cells(&self) -> impl Iterator<Item = (&str, &str, f64, f64, f64)> + '_ {
        self.table.iter().enumerate().flat_map(move |(i, row)| {
            row.iter().enumerate().map(move |(j, &w)| {
                (
                    self.row_labels[i].as_str(),
                    self.col_labels[j].as_str(),
                    self.row_values[i],
                    self.col_values[j],
                    w,
                )
            })
        })
    }
}

fn branch_labels(spectral: &SpectralDecomposition) -> Vec<String> {
    (0..spectral.len()).map(|i| i.to_string()).collect()
}

/// `table[a][k] = <Pi_a * P_k>`, rows are the eigen-branches of `A`, columns the outcomes.
pub fn tmh_error_distribution(
    rho: &Density,
    a: &Hermitian,
    inst: &Instrument,
    m: &ValueAssignment,
) -> Result<QuasiDistribution> {
    check_dim("error distribution", inst.dim(), a.dim())?;
    check_dim("error distribution", inst.dim(), rho.dim())?;
    let spectral = spectral_decompose(a, tol::DEGENERACY)?;
    let col_values = m.ordered(inst)?;
    let mut table = Vec::with_capacity(spectral.len());
    for branch in &spectral.branches {
        let row = inst
            .pom()
            .iter()
            .map(|p| expectation(&jordan_product(&branch.projector, p)?, rho))
            .collect::<Result<Vec<_>>>()?;
        table.push(row);
    }
    Ok(QuasiDistribution {
        row_labels: branch_labels(&spectral),
        col_labels: inst.labels().map(str::to_string).collect(),
        row_values: spectral.values(),
        col_values,
        table,
    })
}

/// `table[b'][b] = <Q_b' * Pi_b>` with `Q_b' = A*[1](Pi_b')`.
pub fn tmh_disturbance_distribution(rho: &Density, b: &Hermitian, inst: &Instrument) -> Result<QuasiDistribution> {
    check_dim("disturbance distribution", inst.dim(), b.dim())?;
    check_dim("disturbance distribution", inst.dim(), rho.dim())?;
    let spectral = spectral_decompose(b, tol::DEGENERACY)?;
    let mut table = Vec::with_capacity(spectral.len());
    for posterior in &spectral.branches {
        let q = inst.adjoint_nonselective(&posterior.projector)?;
        let row = spectral
            .branches
            .iter()
            .map(|prior| expectation(&jordan_product(&q, &prior.projector)?, rho))
            .collect::<Result<Vec<_>>>()?;
        table.push(row);
    }
    let labels = branch_labels(&spectral);
    Ok(QuasiDistribution {
        row_labels: labels.clone(),
        col_labels: labels,
        row_values: spectral.values(),
        col_values: spectral.values(),
        table,
    })
}

/// `sum (row value - col value)^2 * weight`.
pub fn quasi_mean_squared_difference(dist: &QuasiDistribution) -> f64 {
    dist.cells().map(|(_, _, r, c, w)| (r - c) * (r - c) * w).sum()
}

/// `Re Tr(P_k Pi_a rho) / Tr(P_k rho)`.
pub fn conditional_weak_value(rho: &Density, projector: &Hermitian, effect: &Hermitian) -> Result<f64> {
    check_dim("weak value", rho.dim(), projector.dim())?;
    check_dim("weak value", rho.dim(), effect.dim())?;
    let p = expectation(effect, rho)?;
    if p <= tol::NULL_PROBABILITY {
        return Err(Error::ZeroProbabilityConditioning { probability: p });
    }
    let num = trace_product(&(effect.matrix() * projector.matrix()), rho.matrix()).re;
    Ok(num / p)
}

/// Two-outcome probe of a projector `Pi`:
/// `M_+- = sqrt((1+-g)/2) Pi + sqrt((1-+g)/2) (I - Pi)` with values `n_+- = (1 +- 1/g)/2`.
#[derive(Debug, Clone)]
pub struct WeakProbe {
    projector: Hermitian,
    strength: f64,
    kraus: [ComplexMatrix; 2],
    calibration: [f64; 2],
}

impl WeakProbe {
    pub fn new(projector: &Hermitian, strength: f64) -> Result<Self> {
        if !(strength > 0.0 && strength <= 1.0) {
            return Err(Error::InvalidStrength(strength));
        }
        let p = projector.matrix();
        let idempotency = max_norm(&(p * p - p));
        if idempotency > tol::HERMITIAN {
            return Err(Error::InvalidArgument(format!(
                "probe target is not a projector (|P^2 - P| = {idempotency:e})"
            )));
        }
        let d = projector.dim();
        let complement = ComplexMatrix::identity(d, d) - p;
        let g = strength;
        let hi = ((1.0 + g) / 2.0).sqrt();
        let lo = ((1.0 - g) / 2.0).max(0.0).sqrt();
        let kraus = [p.scale(hi) + complement.scale(lo), p.scale(lo) + complement.scale(hi)];
        let calibration = [(1.0 + 1.0 / g) / 2.0, (1.0 - 1.0 / g) / 2.0];

        let effects = kraus.clone().map(|k| Hermitian::symmetrize(k.adjoint() * k));
        let rank = projector.trace().round() as usize;
        if rank > 0 && rank < d {
            let solved = solve_contextual_values(&effects, projector)?;
            let gap = solved
                .iter()
                .zip(calibration)
                .map(|(s, c)| (s - c).abs())
                .fold(0.0, f64::max);
            if gap > tol::EXPRESSIBLE * calibration[0].abs().max(1.0) {
                return Err(Error::InternalConsistency(format!(
                    "probe calibration {solved:?} differs from closed form {calibration:?}"
                )));
            }
        }
        Ok(Self {
            projector: projector.clone(),
            strength,
            kraus,
            calibration,
        })
    }

    pub fn projector(&self) -> &Hermitian {
        &self.projector
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn kraus(&self) -> &[ComplexMatrix; 2] {
        &self.kraus
    }

    pub fn calibration(&self) -> [f64; 2] {
        self.calibration
    }

    /// `sum_l n_l M_l X M_l^dagger`.
    fn calibrated_operation(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.kraus
            .iter()
            .zip(self.calibration)
            .fold(ComplexMatrix::zeros(x.nrows(), x.ncols()), |acc, (m, n)| {
                acc + (m * x * m.adjoint()).scale(n)
            })
    }
}

/// Probe `Pi_a` with strength `g`, then measure the instrument:
/// `table[a][k] = sum_l n_l Tr[P_k M_l rho M_l^dagger]`.
pub fn weak_probe_error_distribution(
    rho: &Density,
    a: &Hermitian,
    inst: &Instrument,
    m: &ValueAssignment,
    g: f64,
) -> Result<QuasiDistribution> {
    if !(g > 0.0 && g <= 1.0) {
        return Err(Error::InvalidStrength(g));
    }
    let mut dist = tmh_error_distribution(rho, a, inst, m)?;
    let spectral = spectral_decompose(a, tol::DEGENERACY)?;
    for (row, branch) in dist.table.iter_mut().zip(&spectral.branches) {
        let probe = WeakProbe::new(&branch.projector, g)?;
        let after = probe.calibrated_operation(rho.matrix());
        for (cell, effect) in row.iter_mut().zip(inst.pom()) {
            *cell = trace_product(effect.matrix(), &after).re;
        }
    }
    Ok(dist)
}

/// Probe `Pi_b` with strength `g`, apply the instrument nonselectively, then
/// project onto `Pi_b'`: `table[b'][b] = sum_l n_l Tr[Pi_b' A(M_l rho M_l^dagger)]`.
pub fn weak_probe_disturbance_distribution(
    rho: &Density,
    b: &Hermitian,
    inst: &Instrument,
    g: f64,
) -> Result<QuasiDistribution> {
    if !(g > 0.0 && g <= 1.0) {
        return Err(Error::InvalidStrength(g));
    }
    let mut dist = tmh_disturbance_distribution(rho, b, inst)?;
    let spectral = spectral_decompose(b, tol::DEGENERACY)?;
    let d = inst.dim();
    for (j, prior) in spectral.branches.iter().enumerate() {
        let probe = WeakProbe::new(&prior.projector, g)?;
        let probed = probe.calibrated_operation(rho.matrix());
        let after = (0..inst.len()).fold(ComplexMatrix::zeros(d, d), |acc, k| {
            acc + inst.operation_matrix(k, &probed)
        });
        for (i, posterior) in spectral.branches.iter().enumerate() {
            dist.table[i][j] = trace_product(posterior.projector.matrix(), &after).re;
        }
    }
    Ok(dist)
}
