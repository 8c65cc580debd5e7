//! Quantum instruments: outcome-indexed Kraus families, their POMs, and the
//! contextual values that turn an instrument into an estimator of an observable.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::operator::{
    check_dim, eigh, ensure_finite, ensure_square, max_norm, tensor_product, ComplexMatrix, ComplexVector, Density,
    Hermitian, C64,
};
use crate::tol;

/// The Kraus operators `M_{k,l}` for one outcome `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    pub label: String,
    pub operators: Vec<ComplexMatrix>,
}

impl KrausSet {
    pub fn new(label: impl Into<String>, operators: Vec<ComplexMatrix>) -> Self {
        Self {
            label: label.into(),
            operators,
        }
    }
}

/// A real value `m_k` per outcome label, in declaration order.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueAssignment {
    entries: Vec<(String, f64)>,
}

impl ValueAssignment {
    pub fn new<S: Into<String>>(entries: impl IntoIterator<Item = (S, f64)>) -> Result<Self> {
        let entries: Vec<(String, f64)> = entries.into_iter().map(|(l, v)| (l.into(), v)).collect();
        for (i, (label, value)) in entries.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite);
            }
            if entries[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { entries })
    }

    /// The same value on every outcome of `inst`.
    pub fn constant(inst: &Instrument, value: f64) -> Self {
        Self {
            entries: inst.labels().map(|l| (l.to_string(), value)).collect(),
        }
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.entries.iter().find(|(l, _)| l == label).map(|(_, v)| *v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            entries: self.entries.iter().map(|(l, v)| (l.clone(), f(*v))).collect(),
        }
    }

    /// `m_k^2` per outcome.
    pub fn squared(&self) -> Self {
        self.map(|v| v * v)
    }

    /// Values in the outcome order of `inst`.
    pub fn ordered(&self, inst: &Instrument) -> Result<Vec<f64>> {
        inst.labels()
            .map(|l| self.get(l).ok_or_else(|| Error::MissingLabel(l.to_string())))
            .collect()
    }
}

/// A validated quantum instrument with its POM cached.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    outcomes: Vec<KrausSet>,
    dim: usize,
    effects: Vec<Hermitian>,
}

impl Instrument {
    pub fn from_kraus(sets: Vec<KrausSet>) -> Result<Self> {
        let first = sets
            .first()
            .and_then(|s| s.operators.first())
            .ok_or_else(|| Error::InvalidArgument("instrument needs at least one Kraus operator".into()))?;
        let dim = first.nrows();
        for (i, set) in sets.iter().enumerate() {
            if sets[..i].iter().any(|s| s.label == set.label) {
                return Err(Error::DuplicateLabel(set.label.clone()));
            }
            if set.operators.is_empty() {
                return Err(Error::EmptyOutcome(set.label.clone()));
            }
            for op in &set.operators {
                ensure_square(op)?;
                ensure_finite(op)?;
                check_dim("Kraus operator", dim, op.nrows())?;
            }
            if set.operators.iter().all(|op| max_norm(op) == 0.0) {
                return Err(Error::EmptyOutcome(set.label.clone()));
            }
        }
        let effects: Vec<Hermitian> = sets
            .iter()
            .map(|set| {
                let sum = set
                    .operators
                    .iter()
                    .fold(ComplexMatrix::zeros(dim, dim), |acc, m| acc + m.adjoint() * m);
                Hermitian::symmetrize(sum)
            })
            .collect();
        let total = effects
            .iter()
            .fold(ComplexMatrix::zeros(dim, dim), |acc, p| acc + p.matrix());
        let deviation = max_norm(&(total - ComplexMatrix::identity(dim, dim)));
        if deviation > tol::COMPLETENESS {
            return Err(Error::CompletenessViolation { deviation });
        }
        for (set, effect) in sets.iter().zip(&effects) {
            let min = effect.eigenvalues()?.last().copied().unwrap_or(0.0);
            if min < -tol::EFFECT_POSITIVITY {
                return Err(Error::NonPositiveEffect {
                    label: set.label.clone(),
                    min_eigenvalue: min,
                });
            }
        }
        Ok(Self {
            outcomes: sets,
            dim,
            effects,
        })
    }

    /// Kraus operators `M_{k,l} = sqrt(p_l) <k|U|l>` over the eigen-decomposition
    /// `rho_D = sum_l p_l |l><l|` of the detector state.
    pub fn from_indirect(model: &IndirectModel) -> Result<Self> {
        let (weights, vectors) = eigh(model.detector_state.op())?;
        let branches: Vec<(f64, ComplexVector)> = weights
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > tol::DETECTOR_WEIGHT)
            .map(|(i, &p)| (p, vectors.column(i).into_owned()))
            .collect();
        let sets = model
            .readout
            .iter()
            .map(|(label, k)| {
                let operators = branches
                    .iter()
                    .map(|(p, l)| model.detector_block(k, l).scale(p.sqrt()))
                    .collect();
                KrausSet::new(label.clone(), operators)
            })
            .collect();
        Self::from_kraus(sets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[KrausSet] {
        &self.outcomes
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.outcomes.iter().map(|s| s.label.as_str())
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.outcomes
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn kraus(&self, label: &str) -> Result<&[ComplexMatrix]> {
        Ok(&self.outcomes[self.index_of(label)?].operators)
    }

    /// POM elements `P_k = sum_l M_{k,l}^dagger M_{k,l}` in outcome order.
    pub fn pom(&self) -> &[Hermitian] {
        &self.effects
    }

    pub fn effect(&self, label: &str) -> Result<&Hermitian> {
        Ok(&self.effects[self.index_of(label)?])
    }

    /// Outcome probabilities `Tr(P_k rho)` in outcome order.
    pub fn probabilities(&self, rho: &Density) -> Result<Vec<f64>> {
        check_dim("outcome probabilities", self.dim, rho.dim())?;
        Ok(self
            .effects
            .iter()
            .map(|p| crate::operator::trace_product(p.matrix(), rho.matrix()).re)
            .collect())
    }

    /// `sum_l M X M^dagger` for outcome index `k` on an arbitrary matrix.
    pub(crate) fn operation_matrix(&self, k: usize, x: &ComplexMatrix) -> ComplexMatrix {
        self.outcomes[k]
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, m| {
                acc + m * x * m.adjoint()
            })
    }

    /// `sum_l M^dagger X M` for outcome index `k` on an arbitrary matrix.
    pub(crate) fn adjoint_matrix(&self, k: usize, x: &ComplexMatrix) -> ComplexMatrix {
        self.outcomes[k]
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, m| {
                acc + m.adjoint() * x * m
            })
    }

    /// Unnormalized post-measurement state `A_k(rho)`; its trace is `p_k`.
    pub fn apply_selective(&self, label: &str, rho: &Density) -> Result<Hermitian> {
        let k = self.index_of(label)?;
        check_dim("selective operation", self.dim, rho.dim())?;
        Ok(Hermitian::symmetrize(self.operation_matrix(k, rho.matrix())))
    }

    /// `A[1](rho) = sum_k A_k(rho)`.
    pub fn apply_nonselective(&self, rho: &Density) -> Result<Density> {
        check_dim("nonselective operation", self.dim, rho.dim())?;
        let sum = (0..self.len()).fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, k| {
            acc + self.operation_matrix(k, rho.matrix())
        });
        Density::new(Hermitian::symmetrize(sum))
    }

    /// Heisenberg-picture operation `A*_k(X)`.
    pub fn adjoint_apply(&self, label: &str, x: &Hermitian) -> Result<Hermitian> {
        let k = self.index_of(label)?;
        check_dim("adjoint operation", self.dim, x.dim())?;
        Ok(Hermitian::symmetrize(self.adjoint_matrix(k, x.matrix())))
    }

    /// `A*[1](X) = sum_k A*_k(X)`, e.g. the perturbed observable `B'`.
    pub fn adjoint_nonselective(&self, x: &Hermitian) -> Result<Hermitian> {
        check_dim("adjoint operation", self.dim, x.dim())?;
        let sum = (0..self.len()).fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, k| {
            acc + self.adjoint_matrix(k, x.matrix())
        });
        Ok(Hermitian::symmetrize(sum))
    }

    /// `A_e[m] = sum_k m_k P_k`.
    pub fn effective_observable(&self, m: &ValueAssignment) -> Result<Hermitian> {
        let values = m.ordered(self)?;
        let sum = self
            .effects
            .iter()
            .zip(&values)
            .fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, (p, &v)| {
                acc + p.matrix().scale(v)
            });
        Ok(Hermitian::symmetrize(sum))
    }

    /// Minimum-norm contextual values for `target`, labelled by outcome.
    pub fn contextual_values(&self, target: &Hermitian) -> Result<ValueAssignment> {
        let values = solve_contextual_values(&self.effects, target)?;
        Ok(ValueAssignment {
            entries: self.labels().map(String::from).zip(values).collect(),
        })
    }
}

/// Real coordinates of a Hermitian matrix, scaled so the Euclidean norm is the
/// Frobenius norm.
fn hermitian_coordinates(m: &ComplexMatrix) -> Vec<f64> {
    let d = m.nrows();
    let mut out = Vec::with_capacity(d * d);
    let r2 = std::f64::consts::SQRT_2;
    for i in 0..d {
        out.push(m[(i, i)].re);
        for j in (i + 1)..d {
            out.push(r2 * m[(i, j)].re);
            out.push(r2 * m[(i, j)].im);
        }
    }
    out
}

/// Minimum-norm least-squares solution of `sum_k m_k P_k = target`.
///
/// Fails with [`Error::NotExpressible`] when the best fit leaves a max-norm
/// residual above `1e-8`.
pub fn solve_contextual_values(pom: &[Hermitian], target: &Hermitian) -> Result<Vec<f64>> {
    let n = pom.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty POM".into()));
    }
    let d = target.dim();
    for p in pom {
        check_dim("contextual values", d, p.dim())?;
    }
    let rows = d * d;
    let mut design = DMatrix::<f64>::zeros(rows, n);
    for (k, p) in pom.iter().enumerate() {
        for (r, v) in hermitian_coordinates(p.matrix()).into_iter().enumerate() {
            design[(r, k)] = v;
        }
    }
    let rhs = DVector::from_vec(hermitian_coordinates(target.matrix()));
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let eps = 1e-12 * smax.max(1.0);
    let solution = svd.solve(&rhs, eps).map_err(|e| Error::Numeric(e.to_string()))?;
    let values: Vec<f64> = solution.iter().copied().collect();

    let fit = pom
        .iter()
        .zip(&values)
        .fold(ComplexMatrix::zeros(d, d), |acc, (p, &v)| acc + p.matrix().scale(v));
    let residual = max_norm(&(fit - target.matrix()));
    if residual > tol::EXPRESSIBLE {
        return Err(Error::NotExpressible { residual });
    }
    Ok(values)
}

/// A system coupled to a detector by a unitary and read out in a fixed basis.
#[derive(Debug, Clone, PartialEq)]
pub struct IndirectModel {
    system_dim: usize,
    detector_state: Density,
    unitary: ComplexMatrix,
    readout: Vec<(String, ComplexVector)>,
}

impl IndirectModel {
    pub fn new(
        system_dim: usize,
        detector_state: Density,
        unitary: ComplexMatrix,
        readout: Vec<(String, ComplexVector)>,
    ) -> Result<Self> {
        let dd = detector_state.dim();
        ensure_square(&unitary)?;
        ensure_finite(&unitary)?;
        check_dim("coupling unitary", system_dim * dd, unitary.nrows())?;
        let deviation =
            max_norm(&(unitary.adjoint() * &unitary - ComplexMatrix::identity(system_dim * dd, system_dim * dd)));
        if deviation > tol::UNITARY {
            return Err(Error::NotUnitary { deviation });
        }
        check_dim("readout basis size", dd, readout.len())?;
        let mut worst: f64 = 0.0;
        for (i, (label, v)) in readout.iter().enumerate() {
            check_dim("readout vector", dd, v.len())?;
            if readout[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
            for (j, (_, w)) in readout.iter().enumerate() {
                let overlap = v.dotc(w);
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((overlap - C64::new(expected, 0.0)).norm());
            }
        }
        if worst > tol::UNITARY {
            return Err(Error::ReadoutNotOrthonormal { deviation: worst });
        }
        Ok(Self {
            system_dim,
            detector_state,
            unitary,
            readout,
        })
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn detector_dim(&self) -> usize {
        self.detector_state.dim()
    }

    pub fn detector_state(&self) -> &Density {
        &self.detector_state
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn readout(&self) -> &[(String, ComplexVector)] {
        &self.readout
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.readout.iter().map(|(l, _)| l.as_str())
    }

    /// System operator `<k|U|l>` for detector vectors `k`, `l`.
    pub(crate) fn detector_block(&self, k: &ComplexVector, l: &ComplexVector) -> ComplexMatrix {
        let ds = self.system_dim;
        let dd = self.detector_dim();
        ComplexMatrix::from_fn(ds, ds, |i, j| {
            let mut acc = C64::new(0.0, 0.0);
            for a in 0..dd {
                for b in 0..dd {
                    acc += k[a].conj() * self.unitary[(i * dd + a, j * dd + b)] * l[b];
                }
            }
            acc
        })
    }

    /// Detector observable `M[m] = sum_k m_k |k><k|`.
    pub fn detector_observable(&self, m: &ValueAssignment) -> Result<ComplexMatrix> {
        let dd = self.detector_dim();
        let mut out = ComplexMatrix::zeros(dd, dd);
        for (label, v) in &self.readout {
            let value = m.get(label).ok_or_else(|| Error::MissingLabel(label.clone()))?;
            out += (v * v.adjoint()).scale(value);
        }
        Ok(out)
    }

    /// `rho_S (x) rho_D`.
    pub fn joint_state(&self, rho: &Density) -> Result<ComplexMatrix> {
        check_dim("joint state", self.system_dim, rho.dim())?;
        Ok(tensor_product(rho.matrix(), self.detector_state.matrix()))
    }

    /// `U^dagger X U` for a joint operator `X`.
    pub fn heisenberg(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.unitary.adjoint() * x * &self.unitary
    }

    /// Post-interaction joint state `U (rho_S (x) rho_D) U^dagger`.
    pub fn evolve(&self, rho: &Density) -> Result<ComplexMatrix> {
        Ok(&self.unitary * self.joint_state(rho)? * self.unitary.adjoint())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;
    use crate::operator::{partial_trace, pauli, trace_product, Keep};

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        max_norm(&(a - b)) <= tol
    }

    #[test]
    fn from_kraus_examples() {
        let proj = models::computational(2);
        assert_eq!(proj.len(), 2);
        for theta in [0.0, 0.3, 1.0, std::f64::consts::FRAC_PI_2, 2.5] {
            assert!(models::theta_pom(theta).unwrap().len() == 2);
        }
        let half = KrausSet::new("0", vec![ComplexMatrix::identity(2, 2).scale(0.5)]);
        assert!(matches!(
            Instrument::from_kraus(vec![half]),
            Err(Error::CompletenessViolation { .. })
        ));
        let dup = vec![
            KrausSet::new("a", vec![Density::basis(2, 0).matrix().clone()]),
            KrausSet::new("a", vec![Density::basis(2, 1).matrix().clone()]),
        ];
        assert_eq!(Instrument::from_kraus(dup), Err(Error::DuplicateLabel("a".into())));
        let mismatch = vec![
            KrausSet::new("a", vec![Density::basis(2, 0).matrix().clone()]),
            KrausSet::new("b", vec![Density::basis(3, 1).matrix().clone()]),
        ];
        assert!(matches!(
            Instrument::from_kraus(mismatch),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn pom_examples() {
        let proj = models::computational(2);
        assert!(close(proj.pom()[0].matrix(), Density::basis(2, 0).matrix(), 0.0));
        assert!(close(proj.pom()[1].matrix(), Density::basis(2, 1).matrix(), 0.0));

        let theta = models::theta_pom(std::f64::consts::FRAC_PI_3).unwrap();
        let plus = Hermitian::from_real_diagonal(&[0.75, 0.25]);
        let minus = Hermitian::from_real_diagonal(&[0.25, 0.75]);
        assert!(close(theta.pom()[0].matrix(), plus.matrix(), 1e-15));
        assert!(close(theta.pom()[1].matrix(), minus.matrix(), 1e-15));

        let diag = models::diagonal_pom(0.7, 0.2).unwrap();
        assert!(close(
            diag.pom()[0].matrix(),
            Hermitian::from_real_diagonal(&[0.7, 0.2]).matrix(),
            1e-15
        ));
        assert!(close(
            diag.pom()[1].matrix(),
            Hermitian::from_real_diagonal(&[0.3, 0.8]).matrix(),
            1e-15
        ));
    }

    #[test]
    fn selective_examples() {
        let proj = models::computational(2);
        let zero = Density::basis(2, 0);
        let out = proj.apply_selective("0", &zero).unwrap();
        assert!(close(out.matrix(), zero.matrix(), 0.0));
        let plus = Density::qubit([1.0, 0.0, 0.0]).unwrap();
        let out = proj.apply_selective("0", &plus).unwrap();
        assert!(close(out.matrix(), &zero.matrix().scale(0.5), 1e-15));
        assert!((out.trace() - 0.5).abs() < 1e-15);
        assert_eq!(
            proj.apply_selective("7", &plus).unwrap_err(),
            Error::UnknownLabel("7".into())
        );

        let theta = models::theta_pom(0.8).unwrap();
        let rho = Density::qubit([0.1, -0.6, 0.3]).unwrap();
        for label in ["+", "-"] {
            let tr = theta.apply_selective(label, &rho).unwrap().trace();
            let p = trace_product(theta.effect(label).unwrap().matrix(), rho.matrix()).re;
            assert!((tr - p).abs() < 1e-12);
        }
    }

    #[test]
    fn nonselective_examples() {
        let proj = models::computational(2);
        let plus = Density::qubit([1.0, 0.0, 0.0]).unwrap();
        let out = proj.apply_nonselective(&plus).unwrap();
        assert!(close(out.matrix(), Density::maximally_mixed(2).matrix(), 1e-15));

        // sqrt(P_+-) are diagonal, so the coherence is multiplied by
        // sqrt(p+(1-p)) twice: 2*sqrt((1+c)/2 (1-c)/2) = |sin(theta)|
        let theta = 0.9f64;
        let inst = models::theta_pom(theta).unwrap();
        let out = inst.apply_nonselective(&plus).unwrap();
        let a = ((1.0 + theta.cos()) / 2.0).sqrt();
        let b = ((1.0 - theta.cos()) / 2.0).sqrt();
        let oracle = 0.5 * (a * b + b * a);
        assert!((out.matrix()[(0, 1)].re - oracle).abs() < 1e-15);
        assert!((oracle - 0.5 * theta.sin()).abs() < 1e-15);
        assert!((out.op().trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adjoint_examples() {
        let proj = models::computational(2);
        for (i, label) in ["0", "1"].iter().enumerate() {
            let p = proj.adjoint_apply(label, &Hermitian::identity(2)).unwrap();
            assert_eq!(&p, &proj.pom()[i]);
            let z = proj.adjoint_apply(label, &pauli::z()).unwrap();
            let sign = if i == 0 { 1.0 } else { -1.0 };
            assert!(close(z.matrix(), &proj.pom()[i].matrix().scale(sign), 0.0));
        }
    }

    #[test]
    fn effective_observable_examples() {
        let proj = models::computational(2);
        let m = ValueAssignment::new([("0", 1.0), ("1", -1.0)]).unwrap();
        assert!(close(
            proj.effective_observable(&m).unwrap().matrix(),
            pauli::z().matrix(),
            0.0
        ));

        let theta = std::f64::consts::FRAC_PI_3;
        let inst = models::theta_pom(theta).unwrap();
        let m = models::theta_pom_unbiased_values(theta);
        assert!(close(
            inst.effective_observable(&m).unwrap().matrix(),
            pauli::z().matrix(),
            1e-15
        ));

        let ones = ValueAssignment::constant(&inst, 1.0);
        assert!(close(
            inst.effective_observable(&ones).unwrap().matrix(),
            &ComplexMatrix::identity(2, 2),
            1e-15
        ));

        let partial = ValueAssignment::new([("+", 1.0)]).unwrap();
        assert_eq!(
            inst.effective_observable(&partial).unwrap_err(),
            Error::MissingLabel("-".into())
        );
    }

    #[test]
    fn contextual_value_examples() {
        // closed form for a diagonal two-outcome POM
        let (p11, p12) = (0.75f64, 0.25f64);
        let (p21, p22) = (1.0 - p11, 1.0 - p12);
        let (a1, a2) = (1.0f64, -1.0f64);
        let det = p11 * p22 - p21 * p12;
        let m1 = (p22 * a1 - p21 * a2) / det;
        let m2 = -(p12 * a1 - p11 * a2) / det;
        assert!((m1 - 2.0).abs() < 1e-15 && (m2 + 2.0).abs() < 1e-15);
        let inst = models::diagonal_pom(p11, p12).unwrap();
        let m = solve_contextual_values(inst.pom(), &pauli::z()).unwrap();
        assert!((m[0] - m1).abs() < 1e-10 && (m[1] - m2).abs() < 1e-10);

        let proj = models::computational(3);
        let target = Hermitian::from_real_diagonal(&[2.0, -0.5, 7.0]);
        let m = solve_contextual_values(proj.pom(), &target).unwrap();
        for (got, want) in m.iter().zip([2.0, -0.5, 7.0]) {
            assert!((got - want).abs() < 1e-10);
        }

        let theta = std::f64::consts::FRAC_PI_3;
        let inst = models::theta_pom(theta).unwrap();
        let m2 = solve_contextual_values(inst.pom(), &pauli::z().square()).unwrap();
        // sigma_z^2 = I: a_j -> a_j^2 = 1 gives m_+ = m_- = 1
        assert!((m2[0] - 1.0).abs() < 1e-10 && (m2[1] - 1.0).abs() < 1e-10);

        assert!(matches!(
            solve_contextual_values(inst.pom(), &pauli::x()),
            Err(Error::NotExpressible { .. })
        ));
    }

    #[test]
    fn indirect_examples() {
        let cnot = models::cnot_model().unwrap();
        let inst = Instrument::from_indirect(&cnot).unwrap();
        assert_eq!(inst.outcomes()[0].operators.len(), 1);
        assert!(close(
            &inst.outcomes()[0].operators[0],
            Density::basis(2, 0).matrix(),
            1e-15
        ));
        assert!(close(
            &inst.outcomes()[1].operators[0],
            Density::basis(2, 1).matrix(),
            1e-15
        ));

        let rho_d = Density::qubit([0.0, 0.3, 0.5]).unwrap();
        let trivial = IndirectModel::new(
            2,
            rho_d.clone(),
            ComplexMatrix::identity(4, 4),
            models::computational_readout(2),
        )
        .unwrap();
        let inst = Instrument::from_indirect(&trivial).unwrap();
        for (k, p) in inst.pom().iter().enumerate() {
            let expected = ComplexMatrix::identity(2, 2).scale(rho_d.matrix()[(k, k)].re);
            assert!(close(p.matrix(), &expected, 1e-12));
        }
    }

    #[test]
    fn controlled_rotation_reproduces_theta_pom() {
        let theta = 0.7f64;
        let model = models::controlled_rotation_model(theta).unwrap();
        // oracle: explicit 4x4 product U (|s><s| (x) |0><0|) U^dagger
        let u = model.unitary();
        let mut pom = [[0.0f64; 2]; 2];
        for s in 0..2 {
            for k in 0..2 {
                // <s,0| U^dagger (1 (x) |k><k|) U |s,0> = |U[(s,k),(s,0)]|^2 summed over system out
                let mut acc = 0.0;
                for s_out in 0..2 {
                    acc += u[(s_out * 2 + k, s * 2)].norm_sqr();
                }
                pom[k][s] = acc;
            }
        }
        let inst = Instrument::from_indirect(&model).unwrap();
        let direct = models::theta_pom(theta).unwrap();
        for (k, row) in pom.iter().enumerate() {
            for (s, expected) in row.iter().enumerate() {
                assert!((inst.pom()[k].matrix()[(s, s)].re - expected).abs() < 1e-12);
            }
            assert!(close(inst.pom()[k].matrix(), direct.pom()[k].matrix(), 1e-12));
        }
    }

    #[test]
    fn probability_three_ways() {
        let model = models::controlled_rotation_model(1.1).unwrap();
        let inst = Instrument::from_indirect(&model).unwrap();
        let rho = Density::qubit([0.2, 0.5, -0.4]).unwrap();
        let joint = model.evolve(&rho).unwrap();
        let reduced = partial_trace(&joint, (2, 2), Keep::Detector).unwrap();
        let system = inst.probabilities(&rho).unwrap();
        for (k, (_, v)) in model.readout().iter().enumerate() {
            let proj = tensor_product(&ComplexMatrix::identity(2, 2), &(v * v.adjoint()));
            let p_joint = trace_product(&proj, &joint).re;
            let p_det = (v.adjoint() * &reduced * v)[(0, 0)].re;
            assert!((p_joint - system[k]).abs() < 1e-10);
            assert!((p_det - system[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn indirect_model_gates() {
        let bad_u = ComplexMatrix::identity(4, 4).scale(1.1);
        assert!(matches!(
            IndirectModel::new(2, Density::basis(2, 0), bad_u, models::computational_readout(2)),
            Err(Error::NotUnitary { .. })
        ));
        let mut readout = models::computational_readout(2);
        readout[1].1 = readout[0].1.clone();
        assert!(matches!(
            IndirectModel::new(2, Density::basis(2, 0), ComplexMatrix::identity(4, 4), readout),
            Err(Error::ReadoutNotOrthonormal { .. })
        ));
    }
}
