//! Seeded random states, observables, instruments and scenarios.
//!
//! All generators draw from `ChaCha8Rng`, so a seed fixes the output on every
//! platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::instrument::{solve_contextual_values, IndirectModel, Instrument, KrausSet, ValueAssignment};
use crate::models::computational_readout;
use crate::operator::{ComplexMatrix, Density, Hermitian, C64};
use crate::scenario::{Apparatus, Meta, Scenario};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries i.i.d. standard complex Gaussian.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// `G G^dagger / Tr(G G^dagger)`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Density {
    let g = complex_gaussian(rng, dim, dim);
    let w = &g * g.adjoint();
    let t = w.trace().re;
    Density::from_matrix(w.unscale(t)).expect("Wishart matrix is a valid state")
}

/// `(G + G^dagger)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Hermitian {
    let g = complex_gaussian(rng, dim, dim);
    Hermitian::symmetrize((&g + g.adjoint()).scale(0.5))
}

/// Haar-distributed `rows x cols` isometry (`rows >= cols`), from the QR
/// decomposition of a Gaussian matrix with the phases of `R` moved into `Q`.
pub fn haar_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let qr = complex_gaussian(rng, rows, cols).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    haar_isometry(rng, dim, dim)
}

/// `n` single-Kraus outcomes `"0".."n-1"` cut from a Haar isometry `C^d -> C^(d n)`.
pub fn random_instrument<R: Rng + ?Sized>(rng: &mut R, dim: usize, n_outcomes: usize) -> Result<Instrument> {
    let v = haar_isometry(rng, dim * n_outcomes, dim);
    let sets = (0..n_outcomes)
        .map(|k| KrausSet::new(k.to_string(), vec![v.rows(k * dim, dim).into_owned()]))
        .collect();
    Instrument::from_kraus(sets)
}

/// Haar coupling, random mixed detector state, computational readout.
pub fn random_indirect_model<R: Rng + ?Sized>(
    rng: &mut R,
    system_dim: usize,
    detector_dim: usize,
) -> Result<IndirectModel> {
    let u = haar_unitary(rng, system_dim * detector_dim);
    let rho_d = random_density(rng, detector_dim);
    IndirectModel::new(system_dim, rho_d, u, computational_readout(detector_dim))
}

/// Contextual values for `target` when it lies in the POM span, else the outcome indices.
pub fn values_or_indices(inst: &Instrument, target: &Hermitian) -> Result<ValueAssignment> {
    let values = match solve_contextual_values(inst.pom(), target) {
        Ok(v) => v,
        Err(Error::NotExpressible { .. }) => (0..inst.len()).map(|k| k as f64).collect(),
        Err(e) => return Err(e),
    };
    ValueAssignment::new(inst.labels().map(str::to_string).zip(values))
}

pub fn generate_random(dim: usize, n_outcomes: usize, seed: u64) -> Result<Scenario> {
    if dim < 2 || n_outcomes < 1 {
        return Err(Error::InvalidArgument(format!(
            "random scenarios need dim >= 2 and at least one outcome (got dim {dim}, {n_outcomes} outcomes)"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let state = random_density(&mut rng, dim);
    let a = random_hermitian(&mut rng, dim);
    let b = random_hermitian(&mut rng, dim);
    let inst = random_instrument(&mut rng, dim, n_outcomes)?;
    let m = values_or_indices(&inst, &a)?;
    let mb = values_or_indices(&inst, &b)?;
    Scenario::new(
        Meta {
            name: Some(format!("random-d{dim}-k{n_outcomes}-s{seed}")),
            description: None,
        },
        state,
        a,
        Some(b),
        Apparatus::Kraus,
        inst,
        m,
        None,
        Some(mb),
    )
}
