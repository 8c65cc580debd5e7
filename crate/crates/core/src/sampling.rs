//! Monte Carlo outcome sampling.
//!
//! Shot `i` of a run with seed `s` uses the 64-bit word at position `2i` of the
//! ChaCha8 keystream for `s`, so runs are reproducible and the work can be split
//! across threads in any order.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instrument::solve_contextual_values;
use crate::metrics::is_unbiased;
use crate::operator::{spectral_decompose, trace_product, Hermitian};
use crate::scenario::Scenario;
use crate::tol;

const CHUNK: u64 = 1 << 16;

/// Estimate of `sum_k f_k p_k` from empirical frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub standard_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub order: u32,
    pub estimate: Estimate,
    pub exact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRun {
    pub seed: u64,
    pub shots: u64,
    pub labels: Vec<String>,
    pub counts: Vec<u64>,
    /// `counts[k][b']` when `B` is present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_counts: Option<Vec<Vec<u64>>>,
    pub mean: Estimate,
    /// `sum m^(n)_k p_k` for `n = 1..4`, where `A^n` lies in the POM span.
    pub moments: Vec<MomentEstimate>,
    /// `sum (m_k^2 - m^(2)_k) p_k`, only for unbiased values.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_sq: Option<Estimate>,
}

impl SampleRun {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sample run serializes")
    }
}

/// `u64 -> [0, 1)` with 53 bits.
fn unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    p.iter()
        .map(|x| {
            acc += x.max(0.0);
            acc
        })
        .collect()
}

fn draw_counts(probabilities: &[f64], shots: u64, seed: u64) -> Vec<u64> {
    let cdf = cumulative(probabilities);
    let total = *cdf.last().expect("non-empty distribution");
    let chunks = shots.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(shots);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_word_pos(2 * start as u128);
            let mut counts = vec![0u64; cdf.len()];
            for _ in start..end {
                let u = unit(rng.next_u64()) * total;
                let k = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                counts[k] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; cdf.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

fn estimate(f: &[f64], freq: &[f64], shots: u64) -> Estimate {
    let mean: f64 = f.iter().zip(freq).map(|(x, p)| x * p).sum();
    let second: f64 = f.iter().zip(freq).map(|(x, p)| x * x * p).sum();
    Estimate {
        value: mean,
        standard_error: ((second - mean * mean).max(0.0) / shots as f64).sqrt(),
    }
}

fn power(a: &Hermitian, n: u32) -> Hermitian {
    (1..n).fold(a.clone(), |acc, _| Hermitian::symmetrize(acc.matrix() * a.matrix()))
}

pub fn sample(scenario: &Scenario, shots: u64, seed: u64) -> Result<SampleRun> {
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let inst = &scenario.instrument;
    let rho = &scenario.state;
    let n = inst.len();
    let (counts, pair_counts) = match &scenario.observable_b {
        Some(b) => {
            let branches = spectral_decompose(b, tol::DEGENERACY)?;
            let mut joint = Vec::with_capacity(n * branches.len());
            for k in 0..n {
                let after = inst.operation_matrix(k, rho.matrix());
                for br in &branches.branches {
                    joint.push(trace_product(br.projector.matrix(), &after).re);
                }
            }
            let flat = draw_counts(&joint, shots, seed);
            let pairs: Vec<Vec<u64>> = flat.chunks(branches.len()).map(<[u64]>::to_vec).collect();
            (pairs.iter().map(|r| r.iter().sum()).collect(), Some(pairs))
        }
        None => (draw_counts(&inst.probabilities(rho)?, shots, seed), None),
    };
    let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / shots as f64).collect();
    let m = scenario.values_m.ordered(inst)?;
    let mean = estimate(&m, &freq, shots);

    let a = &scenario.observable_a;
    let mut moments = Vec::new();
    let mut second_values = None;
    for order in 1..=4 {
        let target = power(a, order);
        match solve_contextual_values(inst.pom(), &target) {
            Ok(values) => {
                moments.push(MomentEstimate {
                    order,
                    estimate: estimate(&values, &freq, shots),
                    exact: crate::operator::expectation(&target, rho)?,
                });
                if order == 2 {
                    second_values = Some(values);
                }
            }
            Err(Error::NotExpressible { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let epsilon_sq = match second_values {
        Some(m2) if is_unbiased(inst, &scenario.values_m, a)? => {
            let f: Vec<f64> = m.iter().zip(&m2).map(|(v, w)| v * v - w).collect();
            Some(estimate(&f, &freq, shots))
        }
        _ => None,
    };
    Ok(SampleRun {
        seed,
        shots,
        labels: inst.labels().map(str::to_string).collect(),
        counts,
        pair_counts,
        mean,
        moments,
        epsilon_sq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instrument::ValueAssignment;
    use crate::models;
    use crate::operator::{expectation, pauli, Density};
    use crate::scenario::{Apparatus, Meta};

    fn theta_scenario(with_b: bool) -> Scenario {
        let t = std::f64::consts::FRAC_PI_3;
        Scenario::new(
            Meta::default(),
            Density::qubit([0.2, 0.1, 0.6]).unwrap(),
            pauli::z(),
            with_b.then(pauli::x),
            Apparatus::Kraus,
            models::theta_pom(t).unwrap(),
            models::theta_pom_unbiased_values(t),
            None,
            None,
        )
        .unwrap()
    }

    #[test]
    fn single_shot_and_determinism() {
        let s = theta_scenario(true);
        let run = sample(&s, 1, 3).unwrap();
        assert_eq!(run.counts.iter().sum::<u64>(), 1);
        let a = sample(&s, 100_000, 9).unwrap();
        let b = sample(&s, 100_000, 9).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.counts, sample(&s, 100_000, 10).unwrap().counts);
        assert!(sample(&s, 0, 1).is_err());
    }

    #[test]
    fn prefix_streams_agree() {
        // shots are indexed by keystream position, so a longer run extends a shorter one
        let probs = [0.3, 0.7];
        let short = draw_counts(&probs, CHUNK, 5);
        let long = draw_counts(&probs, 2 * CHUNK, 5);
        let second = {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            rng.set_word_pos(2 * CHUNK as u128);
            let mut c = [0u64; 2];
            for _ in 0..CHUNK {
                c[usize::from(unit(rng.next_u64()) >= 0.3)] += 1;
            }
            c
        };
        assert_eq!(long[0], short[0] + second[0]);
    }

    #[test]
    fn estimates_match_analytic() {
        let s = theta_scenario(false);
        let run = sample(&s, 200_000, 7).unwrap();
        let exact = expectation(&pauli::z(), &s.state).unwrap();
        assert!((run.mean.value - exact).abs() < 5.0 * run.mean.standard_error);
        let eps = run.epsilon_sq.unwrap();
        assert!((eps.value - 3.0).abs() <= 5.0 * eps.standard_error + 1e-12);
        assert_eq!(run.moments.len(), 4);
        for mo in &run.moments {
            assert!((mo.estimate.value - mo.exact).abs() <= 5.0 * mo.estimate.standard_error + 1e-12);
        }
    }

    #[test]
    fn pair_counts_marginalize() {
        let s = theta_scenario(true);
        let run = sample(&s, 5000, 1).unwrap();
        let pairs = run.pair_counts.unwrap();
        for (row, c) in pairs.iter().zip(&run.counts) {
            assert_eq!(row.iter().sum::<u64>(), *c);
        }
        let biased = Scenario::new(
            Meta::default(),
            Density::maximally_mixed(2),
            pauli::z(),
            None,
            Apparatus::Kraus,
            models::theta_pom(0.5).unwrap(),
            ValueAssignment::new([("+", 1.0), ("-", -1.0)]).unwrap(),
            None,
            None,
        )
        .unwrap();
        assert!(sample(&biased, 100, 1).unwrap().epsilon_sq.is_none());
    }
}
