//! Mean-squared noise and disturbance of an instrument: the bias `delta`, the
//! second moments `epsilon^2` / `eta^2` in the joint system-detector picture and
//! in the reduced system picture, and the identities that relate them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instrument::{solve_contextual_values, IndirectModel, Instrument, ValueAssignment};
use crate::operator::{
    check_dim, commutator, expectation, jordan_product, max_norm, spectral_decompose, tensor_product, trace_product,
    ComplexMatrix, Density, Hermitian,
};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Picture {
    Joint,
    System,
    Quasi,
}

/// The three terms of a second moment written as `first + second - cross`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Components {
    pub first: f64,
    pub second: f64,
    pub cross: f64,
}

/// First and second moment of a noise (or difference) operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseReport {
    pub delta: f64,
    pub second_moment: f64,
    pub picture: Picture,
    pub components: Components,
}

/// Clips round-off negatives in `[-1e-9, 0)`; anything lower is a numerical failure.
pub(crate) fn clip_second_moment(value: f64, what: &str) -> Result<f64> {
    if value < -tol::SECOND_MOMENT {
        Err(Error::Numeric(format!("{what} came out negative: {value:e}")))
    } else {
        Ok(value.max(0.0))
    }
}

/// `delta_A = <A_e[m] - A>`.
pub fn delta_a(inst: &Instrument, m: &ValueAssignment, a: &Hermitian, rho: &Density) -> Result<f64> {
    let ae = inst.effective_observable(m)?;
    Ok(expectation(&ae, rho)? - expectation(a, rho)?)
}

/// `epsilon_A^2 = <A_e[m^2] + A^2 - 2 A_e[m]*A>` evaluated on the system.
pub fn epsilon_sq_system(inst: &Instrument, m: &ValueAssignment, a: &Hermitian, rho: &Density) -> Result<NoiseReport> {
    check_dim("noise", inst.dim(), a.dim())?;
    let ae = inst.effective_observable(m)?;
    let ae2 = inst.effective_observable(&m.squared())?;
    let first = expectation(&ae2, rho)?;
    let second = expectation(&a.square(), rho)?;
    let cross = 2.0 * expectation(&jordan_product(&ae, a)?, rho)?;
    Ok(NoiseReport {
        delta: expectation(&ae, rho)? - expectation(a, rho)?,
        second_moment: clip_second_moment(first + second - cross, "epsilon^2")?,
        picture: Picture::System,
        components: Components { first, second, cross },
    })
}

fn joint_moments(
    heisenberg: &ComplexMatrix,
    heisenberg_sq: &ComplexMatrix,
    reference: &ComplexMatrix,
    joint_state: &ComplexMatrix,
    what: &str,
) -> Result<NoiseReport> {
    let diff = heisenberg - reference;
    let second_moment = trace_product(&(&diff * &diff), joint_state).re;
    let first = trace_product(heisenberg_sq, joint_state).re;
    let second = trace_product(&(reference * reference), joint_state).re;
    let cross = trace_product(&(heisenberg * reference + reference * heisenberg), joint_state).re;
    Ok(NoiseReport {
        delta: trace_product(&diff, joint_state).re,
        second_moment: clip_second_moment(second_moment, what)?,
        picture: Picture::Joint,
        components: Components { first, second, cross },
    })
}

/// `<N^2>` with `N = U^dagger (1 (x) M[m]) U - A (x) 1` on `rho_S (x) rho_D`.
pub fn epsilon_sq_joint(
    model: &IndirectModel,
    m: &ValueAssignment,
    a: &Hermitian,
    rho: &Density,
) -> Result<NoiseReport> {
    check_dim("joint noise", model.system_dim(), a.dim())?;
    let ds = model.system_dim();
    let id_s = ComplexMatrix::identity(ds, ds);
    let id_d = ComplexMatrix::identity(model.detector_dim(), model.detector_dim());
    let meter = model.detector_observable(m)?;
    let meter_sq = model.detector_observable(&m.squared())?;
    let h = model.heisenberg(&tensor_product(&id_s, &meter));
    let h2 = model.heisenberg(&tensor_product(&id_s, &meter_sq));
    let reference = tensor_product(a.matrix(), &id_d);
    joint_moments(&h, &h2, &reference, &model.joint_state(rho)?, "joint epsilon^2")
}

/// Both sides of `2<A_e*A> = <(1+A) A_e (1+A)> - <A_e> - <A A_e A>`, where the
/// right side uses the unnormalized preparations `(1+A) rho (1+A)` and `A rho A`.
pub fn three_state_cross_term(
    inst: &Instrument,
    m: &ValueAssignment,
    a: &Hermitian,
    rho: &Density,
) -> Result<(f64, f64)> {
    let ae = inst.effective_observable(m)?;
    let lhs = 2.0 * expectation(&jordan_product(&ae, a)?, rho)?;
    let d = a.dim();
    let shifted = ComplexMatrix::identity(d, d) + a.matrix();
    let rho_shifted = &shifted * rho.matrix() * &shifted;
    let rho_sandwich = a.matrix() * rho.matrix() * a.matrix();
    let rhs = trace_product(ae.matrix(), &rho_shifted).re
        - trace_product(ae.matrix(), rho.matrix()).re
        - trace_product(ae.matrix(), &rho_sandwich).re;
    Ok((lhs, rhs))
}

/// `delta_B = Tr[B (rho' - rho)]` with `rho'` the nonselective post-measurement state.
pub fn delta_b(inst: &Instrument, b: &Hermitian, rho: &Density) -> Result<f64> {
    let after = inst.apply_nonselective(rho)?;
    Ok(expectation(b, &after)? - expectation(b, rho)?)
}

/// `eta_B^2 = <(B^2)' + B^2 - 2 B'*B>` with `X' = A*[1](X)`.
pub fn eta_sq_system(inst: &Instrument, b: &Hermitian, rho: &Density) -> Result<NoiseReport> {
    let b2 = b.square();
    let perturbed = inst.adjoint_nonselective(b)?;
    let perturbed_sq = inst.adjoint_nonselective(&b2)?;
    let first = expectation(&perturbed_sq, rho)?;
    let second = expectation(&b2, rho)?;
    let cross = 2.0 * expectation(&jordan_product(&perturbed, b)?, rho)?;
    Ok(NoiseReport {
        delta: expectation(&perturbed, rho)? - expectation(b, rho)?,
        second_moment: clip_second_moment(first + second - cross, "eta^2")?,
        picture: Picture::System,
        components: Components { first, second, cross },
    })
}

/// `<D^2>` with `D = U^dagger (B (x) 1) U - B (x) 1` on `rho_S (x) rho_D`.
pub fn eta_sq_joint(model: &IndirectModel, b: &Hermitian, rho: &Density) -> Result<NoiseReport> {
    check_dim("joint disturbance", model.system_dim(), b.dim())?;
    let id_d = ComplexMatrix::identity(model.detector_dim(), model.detector_dim());
    let reference = tensor_product(b.matrix(), &id_d);
    let h = model.heisenberg(&reference);
    let h2 = model.heisenberg(&tensor_product(b.square().matrix(), &id_d));
    joint_moments(&h, &h2, &reference, &model.joint_state(rho)?, "joint eta^2")
}

/// `L[M^dagger](B) = -(M^dagger [M, B] - [M^dagger, B] M)/2`.
pub fn lindblad_term(m: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let md = m.adjoint();
    (&md * commutator(m, b) - commutator(&md, b) * m).scale(-0.5)
}

/// `A*_k(B) = P_k*B + L_k(B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladSplit {
    pub jordan_part: Hermitian,
    pub lindblad_part: Hermitian,
}

pub fn lindblad_decomposition(inst: &Instrument, label: &str, b: &Hermitian) -> Result<LindbladSplit> {
    let k = inst.index_of(label)?;
    check_dim("Lindblad decomposition", inst.dim(), b.dim())?;
    let jordan_part = jordan_product(&inst.pom()[k], b)?;
    let d = inst.dim();
    let sum = inst.outcomes()[k]
        .operators
        .iter()
        .fold(ComplexMatrix::zeros(d, d), |acc, m| acc + lindblad_term(m, b.matrix()));
    Ok(LindbladSplit {
        jordan_part,
        lindblad_part: Hermitian::symmetrize(sum),
    })
}

/// `sum_k L_k(X)` over all outcomes.
pub fn total_lindblad(inst: &Instrument, x: &Hermitian) -> Result<Hermitian> {
    let d = inst.dim();
    let mut sum = ComplexMatrix::zeros(d, d);
    for label in inst.labels() {
        sum += lindblad_decomposition(inst, label, x)?.lindblad_part.matrix();
    }
    Ok(Hermitian::symmetrize(sum))
}

/// `eta_B^2 = sum_k <L_k(B^2) - 2 B*L_k(B)>`, built from the Lindblad terms only.
pub fn eta_sq_lindblad(inst: &Instrument, b: &Hermitian, rho: &Density) -> Result<f64> {
    let l_b = total_lindblad(inst, b)?;
    let l_b2 = total_lindblad(inst, &b.square())?;
    let value = expectation(&l_b2, rho)? - 2.0 * expectation(&jordan_product(b, &l_b)?, rho)?;
    clip_second_moment(value, "Lindblad eta^2")
}

/// `max |A_e[m] - A|`.
pub fn bias_deviation(inst: &Instrument, m: &ValueAssignment, a: &Hermitian) -> Result<f64> {
    let ae = inst.effective_observable(m)?;
    check_dim("bias", ae.dim(), a.dim())?;
    Ok(max_norm(&(ae.matrix() - a.matrix())))
}

/// `A_e[m] = A` to within `1e-8`.
pub fn is_unbiased(inst: &Instrument, m: &ValueAssignment, a: &Hermitian) -> Result<bool> {
    Ok(bias_deviation(inst, m, a)? <= tol::UNBIASED)
}

/// Every Kraus operator commutes with `B` to within `1e-9`.
pub fn is_qnd(inst: &Instrument, b: &Hermitian) -> bool {
    b.dim() == inst.dim()
        && inst
            .outcomes()
            .iter()
            .flat_map(|s| &s.operators)
            .all(|m| max_norm(&commutator(m, b.matrix())) <= tol::QND)
}

/// Dispersion of an unbiased estimate, `sum_k m_k^2 p_k - sum_a A_a^2 p_a`.
///
/// When `A^2` lies in the POM span the value is also computed from the
/// second-moment contextual values, `sum_k (m_k^2 - m^(2)_k) p_k`, and the two
/// routes must agree to `1e-9`.
pub fn unbiased_dispersion(inst: &Instrument, m: &ValueAssignment, a: &Hermitian, rho: &Density) -> Result<f64> {
    let deviation = bias_deviation(inst, m, a)?;
    if deviation > tol::UNBIASED {
        return Err(Error::BiasedInstrument { deviation });
    }
    let probs = inst.probabilities(rho)?;
    let values = m.ordered(inst)?;
    let raw: f64 = values.iter().zip(&probs).map(|(v, p)| v * v * p).sum();
    let spectral = spectral_decompose(a, tol::DEGENERACY)?;
    let mut reference = 0.0;
    for branch in &spectral.branches {
        reference += branch.value * branch.value * expectation(&branch.projector, rho)?;
    }
    let eigen_form = clip_second_moment(raw - reference, "dispersion")?;
    match solve_contextual_values(inst.pom(), &a.square()) {
        Ok(m2) => {
            let contextual: f64 = values
                .iter()
                .zip(&m2)
                .zip(&probs)
                .map(|((v, w), p)| (v * v - w) * p)
                .sum();
            if (contextual - eigen_form).abs() > tol::CROSS_CHECK {
                return Err(Error::InternalConsistency(format!(
                    "dispersion from eigenvalues ({eigen_form}) and from second-moment values ({contextual}) disagree"
                )));
            }
            Ok(eigen_form)
        }
        Err(Error::NotExpressible { .. }) => Ok(eigen_form),
        Err(e) => Err(e),
    }
}
