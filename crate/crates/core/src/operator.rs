//! Dense complex linear algebra for finite-dimensional observables and states.
//!
//! All operators are stored as dense `nalgebra` matrices. Tensor products put
//! the system factor first and the detector factor second, so `A (x) 1` acts
//! on the system of a joint system-detector space.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// Largest entry modulus.
pub fn max_norm(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub(crate) fn ensure_square(m: &ComplexMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

pub(crate) fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}

/// `Tr(AB)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

/// A Hermitian operator. The stored matrix is exactly Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitian {
    mat: ComplexMatrix,
}

impl Hermitian {
    /// Accepts `m` if `max |M - M^dagger| <= 1e-9`, then stores `(M + M^dagger)/2`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        ensure_square(&m)?;
        ensure_finite(&m)?;
        let deviation = max_norm(&(&m - m.adjoint()));
        if deviation > tol::HERMITIAN {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::symmetrize(m))
    }

    /// Symmetrizes a matrix that is Hermitian by construction (up to round-off).
    pub(crate) fn symmetrize(m: ComplexMatrix) -> Self {
        let adj = m.adjoint();
        Self {
            mat: (m + adj).scale(0.5),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: ComplexMatrix::zeros(dim, dim),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        let mut mat = ComplexMatrix::zeros(d, d);
        for (i, &v) in diag.iter().enumerate() {
            mat[(i, i)] = C64::new(v, 0.0);
        }
        Self { mat }
    }

    /// `|v><v|` for the given (not renormalized) vector.
    pub fn outer(v: &ComplexVector) -> Self {
        Self::symmetrize(v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { mat: self.mat.scale(s) }
    }

    pub fn add(&self, other: &Hermitian) -> Result<Self> {
        check_dim("operator sum", self.dim(), other.dim())?;
        Ok(Self {
            mat: &self.mat + &other.mat,
        })
    }

    pub fn sub(&self, other: &Hermitian) -> Result<Self> {
        check_dim("operator difference", self.dim(), other.dim())?;
        Ok(Self {
            mat: &self.mat - &other.mat,
        })
    }

    pub fn square(&self) -> Self {
        Self::symmetrize(&self.mat * &self.mat)
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eigh(self)?.0)
    }
}

/// Eigenvalues (descending) and matching eigenvector columns.
pub fn eigh(a: &Hermitian) -> Result<(Vec<f64>, ComplexMatrix)> {
    let eig = SymmetricEigen::try_new(a.mat.clone(), EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numeric("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..a.dim()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(a.dim(), a.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

/// Pauli matrices.
pub mod pauli {
    use super::{ComplexMatrix, Hermitian, C64};

    pub fn x() -> Hermitian {
        Hermitian::symmetrize(ComplexMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0., 0.), C64::new(1., 0.), C64::new(1., 0.), C64::new(0., 0.)],
        ))
    }

    pub fn y() -> Hermitian {
        Hermitian::symmetrize(ComplexMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0., 0.), C64::new(0., -1.), C64::new(0., 1.), C64::new(0., 0.)],
        ))
    }

    pub fn z() -> Hermitian {
        Hermitian::from_real_diagonal(&[1.0, -1.0])
    }
}

/// Positive semidefinite, unit-trace Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    op: Hermitian,
}

impl Density {
    /// Eigenvalues down to `-1e-9` are clipped to zero and the result renormalized.
    pub fn new(op: Hermitian) -> Result<Self> {
        let trace = op.trace();
        if (trace - 1.0).abs() > tol::TRACE {
            return Err(Error::TraceNotOne { trace });
        }
        let (values, vectors) = eigh(&op)?;
        let min = values.last().copied().unwrap_or(0.0);
        if min < -tol::NEGATIVE_EIGENVALUE {
            return Err(Error::NotPositive { min_eigenvalue: min });
        }
        let op = if min < 0.0 {
            let clipped: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
            let diag = ComplexMatrix::from_diagonal(&DVector::from_iterator(
                clipped.len(),
                clipped.iter().map(|&v| C64::new(v, 0.0)),
            ));
            Hermitian::symmetrize(&vectors * diag * vectors.adjoint())
        } else {
            op
        };
        let t = op.trace();
        Ok(Self { op: op.scale(1.0 / t) })
    }

    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        Self::new(Hermitian::new(m)?)
    }

    /// Pure state `|psi><psi|/<psi|psi>`.
    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        let norm = psi.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidArgument("pure state vector has zero norm".into()));
        }
        Ok(Self {
            op: Hermitian::outer(&psi.unscale(norm)),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            op: Hermitian::identity(dim).scale(1.0 / dim as f64),
        }
    }

    /// Qubit state `(I + r . sigma)/2`, `|r| <= 1`.
    pub fn qubit(bloch: [f64; 3]) -> Result<Self> {
        let m = Hermitian::identity(2).matrix()
            + pauli::x().matrix().scale(bloch[0])
            + pauli::y().matrix().scale(bloch[1])
            + pauli::z().matrix().scale(bloch[2]);
        Self::from_matrix(m.scale(0.5))
    }

    /// Computational basis state `|index><index|`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut diag = vec![0.0; dim];
        diag[index] = 1.0;
        Self {
            op: Hermitian::from_real_diagonal(&diag),
        }
    }

    pub fn op(&self) -> &Hermitian {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }
}

/// `Tr(A rho)` for a Hermitian `A`.
pub fn expectation(a: &Hermitian, rho: &Density) -> Result<f64> {
    check_dim("expectation", rho.dim(), a.dim())?;
    Ok(trace_product(a.matrix(), rho.matrix()).re)
}

/// Symmetric Jordan product `(AB + BA)/2`.
pub fn jordan_product(a: &Hermitian, b: &Hermitian) -> Result<Hermitian> {
    check_dim("Jordan product", a.dim(), b.dim())?;
    let ab = a.matrix() * b.matrix();
    let ba = b.matrix() * a.matrix();
    Ok(Hermitian::symmetrize((ab + ba).scale(0.5)))
}

/// `|<[A, B]>/2i|`.
pub fn commutator_bound(a: &Hermitian, b: &Hermitian, rho: &Density) -> Result<f64> {
    check_dim("commutator bound", a.dim(), b.dim())?;
    check_dim("commutator bound", a.dim(), rho.dim())?;
    let c = commutator(a.matrix(), b.matrix());
    let z = trace_product(&c, rho.matrix()) / C64::new(0.0, 2.0);
    Ok(z.norm())
}

/// Mean `Tr(A rho)` and variance `Tr(A^2 rho) - mean^2` (clipped at zero).
pub fn expectation_and_variance(a: &Hermitian, rho: &Density) -> Result<(f64, f64)> {
    let mean = expectation(a, rho)?;
    let second = expectation(&a.square(), rho)?;
    Ok((mean, (second - mean * mean).max(0.0)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub value: f64,
    pub projector: Hermitian,
}

/// Spectral resolution `A = sum_a A_a Pi_a` with degenerate eigenvalues merged.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub branches: Vec<Branch>,
    pub group_tol: f64,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.branches.iter().map(|b| b.value).collect()
    }

    pub fn projectors(&self) -> Vec<&Hermitian> {
        self.branches.iter().map(|b| &b.projector).collect()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.branches.first().map_or(0, |b| b.projector.dim());
        self.branches.iter().fold(ComplexMatrix::zeros(d, d), |acc, b| {
            acc + b.projector.matrix().scale(b.value)
        })
    }
}

/// Eigen-branches sorted by descending eigenvalue. Eigenvalues within
/// `group_tol * (1 + |lambda|)` of the first member of a group share one branch.
pub fn spectral_decompose(a: &Hermitian, group_tol: f64) -> Result<SpectralDecomposition> {
    let (values, vectors) = eigh(a)?;
    let d = a.dim();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..values.len() {
        match groups.last_mut() {
            Some(g) if (values[g[0]] - values[i]).abs() <= group_tol * (1.0 + values[g[0]].abs()) => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let branches = groups
        .into_iter()
        .map(|g| {
            let value = g.iter().map(|&i| values[i]).sum::<f64>() / g.len() as f64;
            let proj = g.iter().fold(ComplexMatrix::zeros(d, d), |acc, &i| {
                let v = vectors.column(i);
                acc + v * v.adjoint()
            });
            Branch {
                value,
                projector: Hermitian::symmetrize(proj),
            }
        })
        .collect();
    Ok(SpectralDecomposition { branches, group_tol })
}

/// Kronecker product, left factor is the system.
pub fn tensor_product(x: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
    x.kronecker(y)
}

/// Which factor of a bipartite operator survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    System,
    Detector,
}

pub fn partial_trace(x: &ComplexMatrix, dims: (usize, usize), keep: Keep) -> Result<ComplexMatrix> {
    let (ds, dd) = dims;
    ensure_square(x)?;
    check_dim("partial trace", ds * dd, x.nrows())?;
    Ok(match keep {
        Keep::System => ComplexMatrix::from_fn(ds, ds, |i, j| (0..dd).map(|k| x[(i * dd + k, j * dd + k)]).sum()),
        Keep::Detector => ComplexMatrix::from_fn(dd, dd, |i, j| (0..ds).map(|s| x[(s * dd + i, s * dd + j)]).sum()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
        a.shape() == b.shape() && max_norm(&(a - b)) <= tol
    }

    #[test]
    fn jordan_examples() {
        let i2 = Hermitian::identity(2);
        let x = pauli::x();
        let y = pauli::y();
        assert!(close(jordan_product(&i2, &x).unwrap().matrix(), x.matrix(), 0.0));
        assert!(close(
            jordan_product(&x, &y).unwrap().matrix(),
            &ComplexMatrix::zeros(2, 2),
            0.0
        ));
        assert!(close(jordan_product(&x, &x).unwrap().matrix(), i2.matrix(), 0.0));
        assert!(matches!(
            jordan_product(&x, &Hermitian::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn commutator_bound_examples() {
        let x = pauli::x();
        let y = pauli::y();
        let zero = Density::basis(2, 0);
        assert!((commutator_bound(&x, &y, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(commutator_bound(&x, &x, &zero).unwrap(), 0.0);
        let mixed = Density::maximally_mixed(2);
        assert!(commutator_bound(&x, &y, &mixed).unwrap() < 1e-15);
    }

    #[test]
    fn spectral_examples() {
        let z = spectral_decompose(&pauli::z(), tol::DEGENERACY).unwrap();
        assert_eq!(z.len(), 2);
        assert!((z.branches[0].value - 1.0).abs() < 1e-14);
        assert!((z.branches[1].value + 1.0).abs() < 1e-14);
        assert!(close(
            z.branches[0].projector.matrix(),
            Density::basis(2, 0).matrix(),
            1e-14
        ));
        assert!(close(
            z.branches[1].projector.matrix(),
            Density::basis(2, 1).matrix(),
            1e-14
        ));

        let id = spectral_decompose(&Hermitian::identity(3), tol::DEGENERACY).unwrap();
        assert_eq!(id.len(), 1);
        assert!((id.branches[0].value - 1.0).abs() < 1e-14);
        assert!(close(
            id.branches[0].projector.matrix(),
            &ComplexMatrix::identity(3, 3),
            1e-12
        ));
    }

    #[test]
    fn spectral_reconstruction_of_fixed_hermitian() {
        let m = ComplexMatrix::from_row_slice(
            4,
            4,
            &[
                c(1.3, 0.0),
                c(0.2, -0.7),
                c(-0.4, 0.1),
                c(0.0, 0.9),
                c(0.2, 0.7),
                c(-0.8, 0.0),
                c(0.5, 0.5),
                c(0.3, 0.0),
                c(-0.4, -0.1),
                c(0.5, -0.5),
                c(0.1, 0.0),
                c(-1.1, 0.2),
                c(0.0, -0.9),
                c(0.3, 0.0),
                c(-1.1, -0.2),
                c(2.0, 0.0),
            ],
        );
        let a = Hermitian::new(m.clone()).unwrap();
        let s = spectral_decompose(&a, tol::DEGENERACY).unwrap();
        // oracle: resum lambda * Pi entry by entry
        let mut resum = ComplexMatrix::zeros(4, 4);
        for b in &s.branches {
            for i in 0..4 {
                for j in 0..4 {
                    resum[(i, j)] += b.projector.matrix()[(i, j)] * b.value;
                }
            }
        }
        assert!(close(&resum, &m, 1e-9));
        let values = s.values();
        assert!(values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn expectation_variance_examples() {
        let zero = Density::basis(2, 0);
        let (m, v) = expectation_and_variance(&pauli::z(), &zero).unwrap();
        assert!((m - 1.0).abs() < 1e-15 && v.abs() < 1e-15);
        let (m, v) = expectation_and_variance(&pauli::x(), &zero).unwrap();
        assert!(m.abs() < 1e-15 && (v - 1.0).abs() < 1e-15);
        let (m, v) = expectation_and_variance(&pauli::z(), &Density::maximally_mixed(2)).unwrap();
        assert!(m.abs() < 1e-15 && (v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tensor_examples() {
        let i2 = ComplexMatrix::identity(2, 2);
        assert_eq!(tensor_product(&i2, &i2), ComplexMatrix::identity(4, 4));
        let zi = tensor_product(pauli::z().matrix(), &i2);
        let expected = Hermitian::from_real_diagonal(&[1., 1., -1., -1.]);
        assert_eq!(&zi, expected.matrix());
        let p = tensor_product(Density::basis(2, 0).matrix(), Density::basis(2, 1).matrix());
        assert_eq!(&p, Density::basis(4, 1).matrix());
    }

    #[test]
    fn partial_trace_examples() {
        let rho = Density::qubit([0.3, -0.2, 0.5]).unwrap();
        let sigma = ComplexMatrix::from_row_slice(2, 2, &[c(2.0, 0.), c(0.5, 0.1), c(0.5, -0.1), c(1.0, 0.)]);
        let joint = tensor_product(rho.matrix(), &sigma);
        let sys = partial_trace(&joint, (2, 2), Keep::System).unwrap();
        assert!(close(&sys, &rho.matrix().scale(3.0), 1e-14));
        let det = partial_trace(&joint, (2, 2), Keep::Detector).unwrap();
        assert!(close(&det, &sigma, 1e-14));

        let s = 0.5f64.sqrt();
        let bell = ComplexVector::from_vec(vec![c(s, 0.), c(0., 0.), c(0., 0.), c(s, 0.)]);
        let proj = &bell * bell.adjoint();
        let reduced = partial_trace(&proj, (2, 2), Keep::System).unwrap();
        assert!(close(&reduced, &ComplexMatrix::identity(2, 2).scale(0.5), 1e-15));

        assert!(partial_trace(&proj, (3, 2), Keep::System).is_err());
    }

    #[test]
    fn hermitian_gate_and_symmetrization() {
        let mut m = pauli::y().into_matrix();
        m[(0, 1)] += c(5e-10, 0.0);
        let h = Hermitian::new(m.clone()).unwrap();
        assert_eq!(h.matrix(), &h.matrix().adjoint());
        m[(0, 1)] += c(1e-6, 0.0);
        assert!(matches!(Hermitian::new(m), Err(Error::NotHermitian { .. })));
        let mut bad = ComplexMatrix::identity(2, 2);
        bad[(0, 0)] = c(f64::NAN, 0.0);
        assert_eq!(Hermitian::new(bad), Err(Error::NonFinite));
    }

    #[test]
    fn density_gates() {
        let half = Hermitian::from_real_diagonal(&[0.5, 0.4]);
        assert!(matches!(Density::new(half), Err(Error::TraceNotOne { .. })));
        let neg = Hermitian::from_real_diagonal(&[1.1, -0.1]);
        assert!(matches!(Density::new(neg), Err(Error::NotPositive { .. })));
        let tiny = Hermitian::from_real_diagonal(&[1.0 + 5e-10, -5e-10]);
        let rho = Density::new(tiny).unwrap();
        assert!(rho.op().eigenvalues().unwrap().iter().all(|&v| v >= 0.0));
        assert!((rho.op().trace() - 1.0).abs() < 1e-15);
    }
}
