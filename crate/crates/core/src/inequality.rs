//! Uncertainty relations between preparation spreads, estimation noise and
//! disturbance, evaluated as `lhs >= rhs` records with margins.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instrument::ValueAssignment;
use crate::metrics::{epsilon_sq_system, eta_sq_system};
use crate::models;
use crate::operator::{
    commutator_bound, expectation, expectation_and_variance, jordan_product, pauli, spectral_decompose, Density,
    Hermitian,
};
use crate::random::generate_random;
use crate::retrodiction::{interdictive_disturbance, restricted_metrics, retrodictive_error, retrodictive_state};
use crate::scenario::{Apparatus, Meta, Scenario};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationId {
    Heisenberg,
    Schrodinger,
    Ozawa,
    Hall,
    Weston,
    BranciardErrorError,
    BranciardErrorDisturbance,
    Hofmann1,
    Hofmann2,
    Hofmann3,
    /// `epsilon_A eta_B >= C_AB`, which is not a theorem.
    NaiveErrorDisturbance,
}

impl RelationId {
    pub const UNIVERSAL: [RelationId; 10] = [
        RelationId::Heisenberg,
        RelationId::Schrodinger,
        RelationId::Ozawa,
        RelationId::Hall,
        RelationId::Weston,
        RelationId::BranciardErrorError,
        RelationId::BranciardErrorDisturbance,
        RelationId::Hofmann1,
        RelationId::Hofmann2,
        RelationId::Hofmann3,
    ];

    pub fn all() -> impl Iterator<Item = RelationId> {
        Self::UNIVERSAL.into_iter().chain([RelationId::NaiveErrorDisturbance])
    }

    pub fn is_universal(self) -> bool {
        self != RelationId::NaiveErrorDisturbance
    }

    pub fn name(self) -> &'static str {
        match self {
            RelationId::Heisenberg => "heisenberg",
            RelationId::Schrodinger => "schrodinger",
            RelationId::Ozawa => "ozawa",
            RelationId::Hall => "hall",
            RelationId::Weston => "weston",
            RelationId::BranciardErrorError => "branciard-error-error",
            RelationId::BranciardErrorDisturbance => "branciard-error-disturbance",
            RelationId::Hofmann1 => "hofmann-1",
            RelationId::Hofmann2 => "hofmann-2",
            RelationId::Hofmann3 => "hofmann-3",
            RelationId::NaiveErrorDisturbance => "naive-error-disturbance",
        }
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One outcome `k` (and posterior branch `b'` for Hofmann-2) of a per-outcome relation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubRecord {
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub posterior: Option<String>,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityRecord {
    pub relation: RelationId,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub satisfied: bool,
    pub inputs_digest: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sub_records: Vec<SubRecord>,
}

impl InequalityRecord {
    fn new(relation: RelationId, lhs: f64, rhs: f64, digest: &str) -> Result<Self> {
        if !lhs.is_finite() || !rhs.is_finite() {
            return Err(Error::Numeric(format!("{relation}: non-finite side ({lhs}, {rhs})")));
        }
        let margin = lhs - rhs;
        Ok(Self {
            relation,
            lhs,
            rhs,
            margin,
            satisfied: margin >= -tol::SATISFACTION,
            inputs_digest: digest.to_string(),
            sub_records: Vec::new(),
        })
    }

    /// Summary sides come from the tightest sub-record.
    fn from_subs(relation: RelationId, subs: Vec<SubRecord>, digest: &str) -> Result<Self> {
        let worst = subs
            .iter()
            .min_by(|a, b| a.margin.total_cmp(&b.margin))
            .ok_or_else(|| Error::Numeric(format!("{relation}: no outcome with nonzero weight")))?;
        let mut rec = Self::new(relation, worst.lhs, worst.rhs, digest)?;
        rec.sub_records = subs;
        Ok(rec)
    }
}

/// Spreads, noise and disturbance shared by the ensemble relations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ingredients {
    pub sigma_a: f64,
    pub sigma_b: f64,
    pub commutator: f64,
    pub covariance: f64,
    pub epsilon_a: f64,
    pub eta_b: f64,
    pub epsilon_b: Option<f64>,
    pub sigma_a_est: f64,
    pub sigma_b_est: Option<f64>,
}

fn value_spread(scenario: &Scenario, values: &ValueAssignment) -> Result<f64> {
    let p = scenario.instrument.probabilities(&scenario.state)?;
    let v = values.ordered(&scenario.instrument)?;
    let mean: f64 = v.iter().zip(&p).map(|(x, p)| x * p).sum();
    let second: f64 = v.iter().zip(&p).map(|(x, p)| x * x * p).sum();
    Ok((second - mean * mean).max(0.0).sqrt())
}

fn need_b<'a>(scenario: &'a Scenario, relation: &'static str) -> Result<&'a Hermitian> {
    scenario.observable_b.as_ref().ok_or(Error::MissingIngredient {
        relation,
        ingredient: "observable_B",
    })
}

impl Ingredients {
    pub fn compute(scenario: &Scenario) -> Result<Self> {
        let b = need_b(scenario, "ensemble relations")?;
        let (rho, a, inst) = (&scenario.state, &scenario.observable_a, &scenario.instrument);
        let (mean_a, var_a) = expectation_and_variance(a, rho)?;
        let (mean_b, var_b) = expectation_and_variance(b, rho)?;
        let covariance = expectation(&jordan_product(a, b)?, rho)? - mean_a * mean_b;
        let epsilon_a = epsilon_sq_system(inst, &scenario.values_m, a, rho)?
            .second_moment
            .sqrt();
        let eta_b = eta_sq_system(inst, b, rho)?.second_moment.sqrt();
        let epsilon_b = scenario
            .values_mb
            .as_ref()
            .map(|mb| epsilon_sq_system(inst, mb, b, rho).map(|r| r.second_moment.sqrt()))
            .transpose()?;
        let sigma_b_est = scenario
            .values_mb
            .as_ref()
            .map(|mb| value_spread(scenario, mb))
            .transpose()?;
        Ok(Self {
            sigma_a: var_a.sqrt(),
            sigma_b: var_b.sqrt(),
            commutator: commutator_bound(a, b, rho)?,
            covariance,
            epsilon_a,
            eta_b,
            epsilon_b,
            sigma_a_est: value_spread(scenario, &scenario.values_m)?,
            sigma_b_est,
        })
    }

    fn epsilon_b(&self, relation: &'static str) -> Result<f64> {
        self.epsilon_b.ok_or(Error::MissingIngredient {
            relation,
            ingredient: "values_mB",
        })
    }

    /// `sqrt(sigma_A^2 sigma_B^2 - C^2)`, with round-off negatives clipped.
    fn branciard_root(&self) -> Result<f64> {
        let prod = self.sigma_a * self.sigma_a * self.sigma_b * self.sigma_b;
        let radicand = prod - self.commutator * self.commutator;
        if radicand < -1e-12 * prod.max(1.0) {
            return Err(Error::NegativeRadicand(radicand));
        }
        Ok(radicand.max(0.0).sqrt())
    }
}

/// `sigma_A^2 e_B^2 + e_A^2 sigma_B^2 + 2 e_A e_B sqrt(sigma_A^2 sigma_B^2 - C^2) >= C^2`.
fn branciard(ing: &Ingredients, e_a: f64, e_b: f64) -> Result<(f64, f64)> {
    let root = ing.branciard_root()?;
    let lhs = ing.sigma_a.powi(2) * e_b * e_b + e_a * e_a * ing.sigma_b.powi(2) + 2.0 * e_a * e_b * root;
    Ok((lhs, ing.commutator * ing.commutator))
}

fn live_outcomes(scenario: &Scenario) -> Vec<&str> {
    let inst = &scenario.instrument;
    inst.labels()
        .zip(inst.pom())
        .filter(|(_, p)| p.trace() > tol::NULL_PROBABILITY)
        .map(|(l, _)| l)
        .collect()
}

fn sub(outcome: &str, posterior: Option<String>, lhs: f64, rhs: f64) -> SubRecord {
    SubRecord {
        outcome: outcome.to_string(),
        posterior,
        lhs,
        rhs,
        margin: lhs - rhs,
    }
}

fn hofmann(relation: RelationId, scenario: &Scenario, digest: &str) -> Result<InequalityRecord> {
    let b = need_b(scenario, relation.name())?;
    let (a, inst) = (&scenario.observable_a, &scenario.instrument);
    let mut subs = Vec::new();
    for label in live_outcomes(scenario) {
        match relation {
            RelationId::Hofmann1 | RelationId::Hofmann3 => {
                let retro = retrodictive_state(inst, label)?;
                let c_k = commutator_bound(a, b, &retro.state)?;
                let e_a = retrodictive_error(inst, label, a)?;
                let other = if relation == RelationId::Hofmann1 {
                    retrodictive_error(inst, label, b)?
                } else {
                    interdictive_disturbance(inst, label, b)?
                };
                subs.push(sub(label, None, e_a * other, c_k));
            }
            _ => {
                let branches = spectral_decompose(b, tol::DEGENERACY)?.len();
                for j in 0..branches {
                    match restricted_metrics(inst, label, j, a, b) {
                        Ok(r) => {
                            let e_a = r.eps_a_sq.sqrt();
                            subs.push(sub(
                                label,
                                Some(j.to_string()),
                                e_a * r.eta_b_sq.sqrt(),
                                e_a * r.eps_b_sq.sqrt(),
                            ));
                        }
                        Err(Error::ZeroPosterior { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }
    InequalityRecord::from_subs(relation, subs, digest)
}

fn evaluate_with(
    relation: RelationId,
    scenario: &Scenario,
    ing: Option<&Ingredients>,
    digest: &str,
) -> Result<InequalityRecord> {
    if matches!(
        relation,
        RelationId::Hofmann1 | RelationId::Hofmann2 | RelationId::Hofmann3
    ) {
        return hofmann(relation, scenario, digest);
    }
    need_b(scenario, relation.name())?;
    let owned;
    let ing = match ing {
        Some(i) => i,
        None => {
            owned = Ingredients::compute(scenario)?;
            &owned
        }
    };
    let c = ing.commutator;
    let (sa, sb, ea, eb_dist) = (ing.sigma_a, ing.sigma_b, ing.epsilon_a, ing.eta_b);
    let (lhs, rhs) = match relation {
        RelationId::Heisenberg => (sa * sb, c),
        RelationId::Schrodinger => (sa * sb, (ing.covariance.powi(2) + c * c).sqrt()),
        RelationId::Ozawa => (ea * eb_dist + ea * sb + sa * eb_dist, c),
        RelationId::Hall => {
            let eb = ing.epsilon_b("hall")?;
            (ea * eb + ea * sb + sa * eb, c)
        }
        RelationId::Weston => {
            let eb = ing.epsilon_b("weston")?;
            let sb_est = ing.sigma_b_est.ok_or(Error::MissingIngredient {
                relation: "weston",
                ingredient: "values_mB",
            })?;
            (ea * (sb + sb_est) / 2.0 + eb * (sa + ing.sigma_a_est) / 2.0, c)
        }
        RelationId::BranciardErrorError => branciard(ing, ea, ing.epsilon_b("branciard-error-error")?)?,
        RelationId::BranciardErrorDisturbance => branciard(ing, ea, eb_dist)?,
        RelationId::NaiveErrorDisturbance => (ea * eb_dist, c),
        RelationId::Hofmann1 | RelationId::Hofmann2 | RelationId::Hofmann3 => unreachable!(),
    };
    InequalityRecord::new(relation, lhs, rhs, digest)
}

pub fn evaluate(relation: RelationId, scenario: &Scenario) -> Result<InequalityRecord> {
    evaluate_with(relation, scenario, None, &scenario.digest())
}

/// Every relation the scenario has ingredients for, in `RelationId` order.
pub fn evaluate_all(scenario: &Scenario) -> Result<Vec<InequalityRecord>> {
    evaluate_set(scenario, RelationId::all())
}

fn evaluate_set(scenario: &Scenario, relations: impl Iterator<Item = RelationId>) -> Result<Vec<InequalityRecord>> {
    if scenario.observable_b.is_none() {
        return Ok(Vec::new());
    }
    let digest = scenario.digest();
    let ing = Ingredients::compute(scenario)?;
    let mut out = Vec::new();
    for relation in relations {
        match evaluate_with(relation, scenario, Some(&ing), &digest) {
            Ok(r) => out.push(r),
            Err(Error::MissingIngredient { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of the `index`-th scenario of dimension `dim` in a sweep.
pub fn subseed(seed: u64, dim: usize, index: usize) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(dim as u64)) ^ index as u64)
}

/// Outcome count cycles through `1..=d^2 + 1`.
fn sweep_outcomes(dim: usize, index: usize) -> usize {
    1 + index % (dim * dim + 1)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub scenarios: usize,
    pub records: Vec<InequalityRecord>,
    pub min_margin: BTreeMap<RelationId, f64>,
}

impl SweepSummary {
    pub fn all_satisfied(&self) -> bool {
        self.records.iter().all(|r| r.satisfied)
    }
}

fn sweep_jobs(dims: &[usize], outcomes: Option<usize>, count: usize, seed: u64) -> Result<Vec<(usize, usize, u64)>> {
    if count == 0 || dims.is_empty() {
        return Err(Error::InvalidArgument(
            "sweep needs count >= 1 and at least one dimension".into(),
        ));
    }
    Ok(dims
        .iter()
        .flat_map(|&d| {
            (0..count).map(move |i| (d, outcomes.unwrap_or_else(|| sweep_outcomes(d, i)), subseed(seed, d, i)))
        })
        .collect())
}

/// Evaluates every universal relation on `count` random scenarios per dimension,
/// cycling the outcome count through `1..=d^2 + 1`. Output does not depend on
/// thread scheduling.
pub fn random_sweep(dims: &[usize], count: usize, seed: u64) -> Result<SweepSummary> {
    sweep(sweep_jobs(dims, None, count, seed)?)
}

/// As [`random_sweep`] with a fixed number of outcomes.
pub fn random_sweep_with_outcomes(dims: &[usize], outcomes: usize, count: usize, seed: u64) -> Result<SweepSummary> {
    sweep(sweep_jobs(dims, Some(outcomes), count, seed)?)
}

fn sweep(jobs: Vec<(usize, usize, u64)>) -> Result<SweepSummary> {
    let per_scenario = jobs
        .par_iter()
        .map(|&(d, n, s)| evaluate_set(&generate_random(d, n, s)?, RelationId::UNIVERSAL.into_iter()))
        .collect::<Result<Vec<_>>>()?;
    let mut min_margin = BTreeMap::new();
    for r in per_scenario.iter().flatten() {
        let e = min_margin.entry(r.relation).or_insert(f64::INFINITY);
        *e = f64::min(*e, r.margin);
    }
    Ok(SweepSummary {
        scenarios: jobs.len(),
        records: per_scenario.into_iter().flatten().collect(),
        min_margin,
    })
}

/// Projective `sigma_z` measurement, `A = sigma_z`, `B = sigma_x`,
/// `rho = (I + y sigma_y)/2`: `epsilon_A = 0` while `C_AB = |y|`.
pub fn projective_violation_scenario(y: f64) -> Result<Scenario> {
    let (inst, m) = models::projective(&pauli::z())?;
    Scenario::new(
        Meta {
            name: Some("projective-violation".into()),
            description: Some("projective sigma_z measurement disturbing sigma_x".into()),
        },
        Density::qubit([0.0, y, 0.0])?,
        pauli::z(),
        Some(pauli::x()),
        Apparatus::Kraus,
        inst,
        m,
        None,
        None,
    )
}

/// The scenario with the most negative `epsilon_A eta_B - C_AB`, among the
/// analytic projective construction and `count` random scenarios per dimension.
pub fn heisenberg_form_violation_search(
    dims: &[usize],
    count: usize,
    seed: u64,
) -> Result<(Scenario, InequalityRecord)> {
    violation_search(sweep_jobs(dims, None, count, seed)?)
}

/// As [`heisenberg_form_violation_search`] with a fixed number of outcomes.
pub fn heisenberg_form_violation_search_with_outcomes(
    dims: &[usize],
    outcomes: usize,
    count: usize,
    seed: u64,
) -> Result<(Scenario, InequalityRecord)> {
    violation_search(sweep_jobs(dims, Some(outcomes), count, seed)?)
}

fn violation_search(jobs: Vec<(usize, usize, u64)>) -> Result<(Scenario, InequalityRecord)> {
    let candidates = jobs
        .par_iter()
        .map(|&(d, n, s)| {
            let sc = generate_random(d, n, s)?;
            let rec = evaluate(RelationId::NaiveErrorDisturbance, &sc)?;
            Ok((sc, rec))
        })
        .collect::<Result<Vec<_>>>()?;
    let analytic = projective_violation_scenario(0.8)?;
    let rec = evaluate(RelationId::NaiveErrorDisturbance, &analytic)?;
    let best = std::iter::once((analytic, rec))
        .chain(candidates)
        .min_by(|a, b| a.1.margin.total_cmp(&b.1.margin))
        .expect("at least the analytic candidate");
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instrument::Instrument;
    use crate::operator::C64;
    use std::f64::consts::FRAC_PI_3;

    fn scenario(state: Density, a: Hermitian, b: Hermitian, inst: Instrument, m: ValueAssignment) -> Scenario {
        Scenario::new(
            Meta::default(),
            state,
            a,
            Some(b),
            Apparatus::Kraus,
            inst,
            m,
            None,
            None,
        )
        .unwrap()
    }

    #[test]
    fn heisenberg_equality_case() {
        let (inst, m) = models::projective(&pauli::x()).unwrap();
        let s = scenario(Density::basis(2, 0), pauli::x(), pauli::y(), inst, m);
        let r = evaluate(RelationId::Heisenberg, &s).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-12 && (r.rhs - 1.0).abs() < 1e-12);
        assert!(r.margin.abs() < 1e-12 && r.satisfied);
        let schr = evaluate(RelationId::Schrodinger, &s).unwrap();
        assert!(schr.margin <= r.margin + 1e-12);
    }

    #[test]
    fn ozawa_versus_naive() {
        let s = projective_violation_scenario(0.8).unwrap();
        let oz = evaluate(RelationId::Ozawa, &s).unwrap();
        assert!((oz.rhs - 0.8).abs() < 1e-12);
        let (sa, _) = expectation_and_variance(&pauli::z(), &s.state).unwrap();
        assert!(sa.abs() < 1e-12);
        // epsilon_A = 0, so lhs = sigma_A eta_B = 1 * sqrt(2)
        assert!((oz.lhs - 2f64.sqrt()).abs() < 1e-12);
        assert!(oz.satisfied);
        let naive = evaluate(RelationId::NaiveErrorDisturbance, &s).unwrap();
        assert!(naive.margin <= -0.8 + 1e-9);
        assert!(!naive.satisfied);
    }

    #[test]
    fn hofmann1_theta_pom() {
        let t = FRAC_PI_3;
        let inst = models::theta_pom(t).unwrap();
        let m = models::theta_pom_unbiased_values(t);
        let s = scenario(Density::maximally_mixed(2), pauli::z(), pauli::x(), inst, m);
        let r = evaluate(RelationId::Hofmann1, &s).unwrap();
        assert_eq!(r.sub_records.len(), 2);
        for sr in &r.sub_records {
            assert!((sr.lhs - t.sin()).abs() < 1e-12);
            assert!(sr.rhs.abs() < 1e-12);
            assert!((sr.margin - t.sin()).abs() < 1e-12);
        }
        for rel in [RelationId::Hofmann2, RelationId::Hofmann3] {
            assert!(evaluate(rel, &s).unwrap().satisfied);
        }
    }

    #[test]
    fn missing_ingredients() {
        let (inst, m) = models::projective(&pauli::z()).unwrap();
        let s = scenario(Density::maximally_mixed(2), pauli::z(), pauli::x(), inst, m);
        assert!(matches!(
            evaluate(RelationId::Weston, &s),
            Err(Error::MissingIngredient { .. })
        ));
        assert!(matches!(
            evaluate(RelationId::Hall, &s),
            Err(Error::MissingIngredient { .. })
        ));
        let all = evaluate_all(&s).unwrap();
        assert!(all
            .iter()
            .all(|r| !matches!(r.relation, RelationId::Hall | RelationId::Weston)));
        assert!(all.iter().any(|r| r.relation == RelationId::Ozawa));
    }

    #[test]
    fn joint_estimation_relations() {
        // unsharp joint measurement of sigma_z and sigma_x through four outcomes
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut sets = Vec::new();
        let mut mz = Vec::new();
        let mut mx = Vec::new();
        for (i, (z, x)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
            .into_iter()
            .enumerate()
        {
            let eff = pauli::z()
                .scale(z * s * 0.9)
                .add(&pauli::x().scale(x * s * 0.9))
                .unwrap();
            let eff = Hermitian::identity(2).add(&eff).unwrap().scale(0.25);
            let (vals, vecs) = crate::operator::eigh(&eff).unwrap();
            let root = &vecs
                * crate::operator::ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    2,
                    vals.iter().map(|v| C64::new(v.max(0.0).sqrt(), 0.0)),
                ))
                * vecs.adjoint();
            sets.push(crate::instrument::KrausSet::new(i.to_string(), vec![root]));
            mz.push((i.to_string(), z / (s * 0.9)));
            mx.push((i.to_string(), x / (s * 0.9)));
        }
        let inst = Instrument::from_kraus(sets).unwrap();
        let sc = Scenario::new(
            Meta::default(),
            Density::qubit([0.1, 0.7, 0.2]).unwrap(),
            pauli::z(),
            Some(pauli::x()),
            Apparatus::Kraus,
            inst,
            ValueAssignment::new(mz).unwrap(),
            None,
            Some(ValueAssignment::new(mx).unwrap()),
        )
        .unwrap();
        let all = evaluate_all(&sc).unwrap();
        assert_eq!(all.len(), 11);
        for r in all.iter().filter(|r| r.relation.is_universal()) {
            assert!(r.satisfied, "{}: margin {}", r.relation, r.margin);
        }
    }

    #[test]
    fn sweep_is_deterministic_and_satisfied() {
        let a = random_sweep(&[2, 3], 40, 42).unwrap();
        let b = random_sweep(&[2, 3], 40, 42).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.scenarios, 80);
        for (rel, m) in &a.min_margin {
            assert!(*m >= -1e-9, "{rel}: {m}");
        }
        assert!(random_sweep(&[2], 0, 1).is_err());
    }

    #[test]
    fn violation_search() {
        let (best, rec) = heisenberg_form_violation_search(&[2], 50, 7).unwrap();
        assert!(rec.margin <= -0.8 + 1e-9);
        assert_eq!(best.dim(), 2);
        // A = B = sigma_z with a QND projective measurement has C = 0: no violation
        let (inst, m) = models::projective(&pauli::z()).unwrap();
        let s = scenario(
            Density::qubit([0.3, 0.3, 0.3]).unwrap(),
            pauli::z(),
            pauli::z(),
            inst,
            m,
        );
        assert!(evaluate(RelationId::NaiveErrorDisturbance, &s).unwrap().satisfied);
    }
}
