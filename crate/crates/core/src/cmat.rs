//! Dense complex matrices and the handful of decompositions the library
//! leans on: operator norms, Hermitian eigendecompositions, polar parts, and
//! Hilbert-Schmidt orthonormalization of matrix families.

use alloc::string::ToString;
use alloc::vec::Vec;

use nalgebra::{Complex, DMatrix, DVector};
// Under `no_std` the f64 math methods (sqrt, powi) come from this trait;
// with std the inherent methods shadow it, so the import looks unused there.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Complex scalar.
pub type Cx = Complex<f64>;

/// Dense complex matrix.
pub type CMatrix = DMatrix<Cx>;

/// Shorthand for a complex scalar.
#[inline]
pub fn c(re: f64, im: f64) -> Cx {
    Complex::new(re, im)
}

/// Real scalar promoted to a complex one.
#[inline]
pub fn cr(re: f64) -> Cx {
    Complex::new(re, 0.0)
}

/// Modulus of a complex scalar.
#[inline]
pub fn cabs(z: Cx) -> f64 {
    z.norm_sqr().sqrt()
}

/// Matrix unit `e_{ij}` in `M_n`.
pub fn e_matrix(n: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, n);
    m[(i, j)] = cr(1.0);
    m
}

/// Operator norm (largest singular value), computed through a Hermitian
/// eigendecomposition of the smaller Gram matrix.  The general-purpose
/// complex singular value decomposition is avoided throughout this module:
/// it can return inconsistent factors on rank-deficient input with repeated
/// singular values.
pub fn op_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let g = if m.nrows() <= m.ncols() {
        m * m.adjoint()
    } else {
        m.adjoint() * m
    };
    let g = (&g + &g.adjoint()) * cr(0.5);
    let top = hermitian_eigen(&g).0.last().copied().unwrap_or(0.0);
    top.max(0.0).sqrt()
}

/// Frobenius norm.
pub fn frob_norm(m: &CMatrix) -> f64 {
    m.norm()
}

/// Hilbert-Schmidt inner product `tr(a* b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Cx {
    debug_assert_eq!(a.shape(), b.shape());
    let mut acc = cr(0.0);
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.conj() * y;
    }
    acc
}

/// Whether `m` is Hermitian up to relative tolerance `tol`.
pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = frob_norm(m).max(1.0);
    frob_norm(&(m - m.adjoint())) <= tol * scale
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending and the
/// eigenvector columns permuted to match.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let se = nalgebra::SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[a]
            .partial_cmp(&se.eigenvalues[b])
            .unwrap_or(core::cmp::Ordering::Equal)
    });
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &se.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eig_hermitian(m: &CMatrix) -> f64 {
    hermitian_eigen(m).0.first().copied().unwrap_or(0.0)
}

/// Polar decomposition `m = unitary * positive` of a square matrix, together
/// with the extreme singular values used for conditioning decisions.
pub struct PolarParts {
    pub unitary: CMatrix,
    pub positive: CMatrix,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

/// Polar parts of a square matrix, computed from the Hermitian
/// eigendecomposition of `m* m`: the positive factor is its square root and
/// the unitary factor is `m` times the (pseudo)inverse of that root.
pub fn polar(m: &CMatrix) -> Result<PolarParts> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(
            "polar decomposition needs a square matrix".to_string(),
        ));
    }
    let n = m.nrows();
    let g = m.adjoint() * m;
    let g = (&g + &g.adjoint()) * cr(0.5);
    let (vals, vecs) = hermitian_eigen(&g);
    let sigmas: Vec<f64> = vals.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let sigma_min = sigmas.first().copied().unwrap_or(0.0);
    let sigma_max = sigmas.last().copied().unwrap_or(0.0);
    let diag = |entries: &dyn Fn(usize) -> f64| {
        DMatrix::from_fn(n, n, |i, j| if i == j { cr(entries(i)) } else { cr(0.0) })
    };
    let positive = &vecs * diag(&|i| sigmas[i]) * vecs.adjoint();
    let inv = |i: usize| if sigmas[i] > 0.0 { 1.0 / sigmas[i] } else { 0.0 };
    let unitary = m * &vecs * diag(&inv) * vecs.adjoint();
    Ok(PolarParts {
        unitary,
        positive,
        sigma_min,
        sigma_max,
    })
}

/// Row-major vectorization of a matrix.
pub fn vectorize(m: &CMatrix) -> DVector<Cx> {
    let (r, c_) = m.shape();
    DVector::from_fn(r * c_, |k, _| m[(k / c_, k % c_)])
}

/// Inverse of [`vectorize`] for a known shape.
pub fn unvectorize(v: &DVector<Cx>, rows: usize, cols: usize) -> CMatrix {
    debug_assert_eq!(v.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Hilbert-Schmidt orthonormal basis of the span of `family`, with the
/// numerical rank decided by column-pivoted QR diagonal entries above
/// `tol` times the largest one.  The result is verified to reproduce every
/// input within a small residual before it is returned.
pub fn orthonormal_span(family: &[CMatrix], tol: f64) -> Result<(usize, Vec<CMatrix>)> {
    if family.is_empty() {
        return Ok((0, Vec::new()));
    }
    let (rows, cols) = family[0].shape();
    for m in family {
        if m.shape() != (rows, cols) {
            return Err(Error::DimensionMismatch(
                "orthonormalization input shapes differ".to_string(),
            ));
        }
    }
    let scale = family.iter().map(frob_norm).fold(0.0f64, f64::max);
    if scale == 0.0 {
        return Ok((0, Vec::new()));
    }
    // Family members as columns, so the column space is the span.
    let stacked = DMatrix::from_fn(rows * cols, family.len(), |p, j| {
        family[j][(p / cols, p % cols)]
    });
    let qr = stacked.col_piv_qr();
    let q = qr.q();
    let r = qr.r();
    let k = q.ncols().min(r.nrows());
    let rmax = (0..k).map(|i| cabs(r[(i, i)])).fold(0.0f64, f64::max);
    let mut basis = Vec::new();
    for i in 0..k {
        if cabs(r[(i, i)]) > tol * rmax {
            let col = q.column(i);
            basis.push(CMatrix::from_fn(rows, cols, |a, b| col[a * cols + b]));
        }
    }
    for m in family {
        let (_, residual) = span_coordinates(&basis, m);
        if residual > 1e-6 * scale {
            return Err(Error::NumericalCheckFailed(
                "orthonormalization failed to reproduce its input".to_string(),
            ));
        }
    }
    Ok((basis.len(), basis))
}

/// Coordinates of `x` in an orthonormal family plus the residual norm of the
/// part of `x` outside the span.
pub fn span_coordinates(basis: &[CMatrix], x: &CMatrix) -> (Vec<Cx>, f64) {
    let mut coords = Vec::with_capacity(basis.len());
    let mut rest = x.clone();
    for b in basis {
        let c_ = hs_inner(b, x);
        rest -= b * c_;
        coords.push(c_);
    }
    (coords, frob_norm(&rest))
}

/// Submatrix on the given row and column index sets.
pub fn select(m: &CMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Evaluates the polynomial `sum coeffs[i] * m^i` (coefficient 0 scales the
/// identity).
pub fn mat_poly(m: &CMatrix, coeffs: &[f64]) -> CMatrix {
    let n = m.nrows();
    let mut acc = CMatrix::zeros(n, n);
    let mut power = CMatrix::identity(n, n);
    for (i, &co) in coeffs.iter().enumerate() {
        if i > 0 {
            power = &power * m;
        }
        acc += &power * cr(co);
    }
    acc
}

/// Uniform draw in `[-1, 1)` from a seeded generator.
pub fn uniform_pm1<R: rand_core::RngCore>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64) / ((1u64 << 53) as f64) * 2.0 - 1.0
}
