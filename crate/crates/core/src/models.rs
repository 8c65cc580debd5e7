//! Ready-made instruments and system-detector models used throughout the
//! examples and tests.

use crate::error::{Error, Result};
use crate::instrument::{IndirectModel, Instrument, KrausSet, ValueAssignment};
use crate::operator::{spectral_decompose, ComplexMatrix, ComplexVector, Density, Hermitian, C64};
use crate::tol;

fn diag(values: &[f64]) -> ComplexMatrix {
    Hermitian::from_real_diagonal(values).into_matrix()
}

/// Projective measurement in the computational basis, outcomes `"0".."d-1"`.
pub fn computational(dim: usize) -> Instrument {
    let sets = (0..dim)
        .map(|i| KrausSet::new(i.to_string(), vec![Density::basis(dim, i).matrix().clone()]))
        .collect();
    Instrument::from_kraus(sets).expect("computational basis is complete")
}

/// Computational-basis readout vectors labelled `"0".."d-1"`.
pub fn computational_readout(dim: usize) -> Vec<(String, ComplexVector)> {
    (0..dim)
        .map(|i| {
            let mut v = ComplexVector::zeros(dim);
            v[i] = C64::new(1.0, 0.0);
            (i.to_string(), v)
        })
        .collect()
}

/// Single-outcome instrument that does nothing.
pub fn identity(dim: usize) -> Instrument {
    Instrument::from_kraus(vec![KrausSet::new("id", vec![ComplexMatrix::identity(dim, dim)])])
        .expect("identity is complete")
}

/// Two-outcome qubit instrument with `P_+- = (I +- cos(theta) sigma_z)/2` and
/// Kraus operators `sqrt(P_+-)`.
pub fn theta_pom(theta: f64) -> Result<Instrument> {
    let c = theta.cos();
    let a = ((1.0 + c) / 2.0).max(0.0).sqrt();
    let b = ((1.0 - c) / 2.0).max(0.0).sqrt();
    Instrument::from_kraus(vec![
        KrausSet::new("+", vec![diag(&[a, b])]),
        KrausSet::new("-", vec![diag(&[b, a])]),
    ])
}

/// `m_+- = +-1/cos(theta)`, which makes the theta POM an unbiased estimator of `sigma_z`.
pub fn theta_pom_unbiased_values(theta: f64) -> ValueAssignment {
    let v = 1.0 / theta.cos();
    ValueAssignment::new([("+", v), ("-", -v)]).expect("two distinct labels")
}

/// Diagonal two-outcome qubit POM `P_1 = diag(p11, p12)`, `P_2 = I - P_1`,
/// realised with square-root Kraus operators. Outcomes are `"1"` and `"2"`.
pub fn diagonal_pom(p11: f64, p12: f64) -> Result<Instrument> {
    if !(0.0..=1.0).contains(&p11) || !(0.0..=1.0).contains(&p12) {
        return Err(Error::InvalidArgument(format!(
            "diagonal POM entries must lie in [0, 1], got ({p11}, {p12})"
        )));
    }
    Instrument::from_kraus(vec![
        KrausSet::new("1", vec![diag(&[p11.sqrt(), p12.sqrt()])]),
        KrausSet::new("2", vec![diag(&[(1.0 - p11).sqrt(), (1.0 - p12).sqrt()])]),
    ])
}

/// Projective measurement of `observable`'s eigen-branches with the eigenvalues
/// assigned as values. Outcomes are labelled by branch index.
pub fn projective(observable: &Hermitian) -> Result<(Instrument, ValueAssignment)> {
    let spectral = spectral_decompose(observable, tol::DEGENERACY)?;
    let sets = spectral
        .branches
        .iter()
        .enumerate()
        .map(|(i, b)| KrausSet::new(i.to_string(), vec![b.projector.matrix().clone()]))
        .collect();
    let inst = Instrument::from_kraus(sets)?;
    let values = ValueAssignment::new(
        spectral
            .branches
            .iter()
            .enumerate()
            .map(|(i, b)| (i.to_string(), b.value)),
    )?;
    Ok((inst, values))
}

fn ry(angle: f64) -> ComplexMatrix {
    let (s, c) = (angle / 2.0).sin_cos();
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[C64::new(c, 0.), C64::new(-s, 0.), C64::new(s, 0.), C64::new(c, 0.)],
    )
}

/// CNOT coupling (system controls detector), detector prepared in `|0>`,
/// computational readout. Realises a projective `sigma_z` measurement.
pub fn cnot_model() -> Result<IndirectModel> {
    let mut u = ComplexMatrix::zeros(4, 4);
    for (r, c) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        u[(r, c)] = C64::new(1.0, 0.0);
    }
    IndirectModel::new(2, Density::basis(2, 0), u, computational_readout(2))
}

/// `U = |0><0| (x) Ry(theta) + |1><1| (x) Ry(pi - theta)` with the detector in
/// `|0>`; outcomes `"+"`/`"-"` reproduce the theta POM.
pub fn controlled_rotation_model(theta: f64) -> Result<IndirectModel> {
    let p0 = Density::basis(2, 0).matrix().clone();
    let p1 = Density::basis(2, 1).matrix().clone();
    let u = p0.kronecker(&ry(theta)) + p1.kronecker(&ry(std::f64::consts::PI - theta));
    let readout = computational_readout(2)
        .into_iter()
        .zip(["+", "-"])
        .map(|((_, v), l)| (l.to_string(), v))
        .collect();
    IndirectModel::new(2, Density::basis(2, 0), u, readout)
}
