//! Residual checks for candidate representation data.
//!
//! Every function here takes concrete matrices claimed to satisfy some
//! relation and reports how far they are from satisfying it, so callers can
//! certify supplied data instead of trusting it.  The checks cover the
//! isometry relations of a candidate shift family, commutation of a weight
//! image with shift words, two corner certificates (a matrix-unit corner
//! and a two-projection spectral corner), and the generator dictionary of a
//! corner-algebra representation.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;


use crate::cmat::{self, cr, CMatrix};
use crate::error::{Error, Result};
use crate::fock::{HERMITIAN_TOL, POSITIVE_TOL};
use crate::matalg::{is_matrix_unit_family, MatrixUnitReport};
use crate::quotient::{CornerAlgebraModel, CornerFamily};
use crate::word::Word;

/// Tolerance for spectrum membership checks.
pub const SPECTRUM_TOL: f64 = 1e-8;

/// Residuals of the defining relations of a shift family.
#[derive(Debug, Clone, Copy)]
pub struct CuntzResiduals {
    /// Largest operator-norm defect of `S_i* S_i` from the identity.
    pub isometry_defect: f64,
    /// Largest operator norm of `S_i* S_j` over `i != j`.
    pub orthogonality_defect: f64,
    /// Operator-norm defect of `sum_i S_i S_i*` from the identity.
    pub completeness_defect: f64,
}

/// Measures how far a family of candidate isometries is from satisfying the
/// shift relations.  Truncated models cannot satisfy them exactly: cutting
/// the space at a top level forces both the isometry defect and the
/// completeness defect to be at least one.
pub fn cuntz_residuals(isometries: &[CMatrix]) -> Result<CuntzResiduals> {
    let n = validate_family(isometries)?;
    let ident = CMatrix::identity(n, n);
    let mut isometry_defect = 0.0f64;
    let mut orthogonality_defect = 0.0f64;
    let mut range_sum = CMatrix::zeros(n, n);
    for (i, s) in isometries.iter().enumerate() {
        let sh = s.adjoint();
        for (j, t) in isometries.iter().enumerate() {
            let prod = &sh * t;
            if i == j {
                isometry_defect = isometry_defect.max(cmat::op_norm(&(&prod - &ident)));
            } else {
                orthogonality_defect = orthogonality_defect.max(cmat::op_norm(&prod));
            }
        }
        range_sum += s * &sh;
    }
    let completeness_defect = cmat::op_norm(&(&range_sum - &ident));
    Ok(CuntzResiduals {
        isometry_defect,
        orthogonality_defect,
        completeness_defect,
    })
}

fn validate_family(isometries: &[CMatrix]) -> Result<usize> {
    let Some(first) = isometries.first() else {
        return Err(Error::InvalidSpec("need at least one candidate isometry".to_string()));
    };
    if !first.is_square() {
        return Err(Error::DimensionMismatch("candidate isometries must be square".to_string()));
    }
    let n = first.nrows();
    for s in isometries {
        if s.shape() != (n, n) {
            return Err(Error::DimensionMismatch(
                "candidate isometries must share one ambient dimension".to_string(),
            ));
        }
    }
    Ok(n)
}

/// Worst-case commutation defect of a weight image against shift words of a
/// fixed length.
#[derive(Debug, Clone)]
pub struct CommutationReport {
    /// Largest operator norm of `W S_alpha - S_alpha W`.
    pub residual: f64,
    /// A word attaining the largest defect.
    pub worst_word: Word,
}

/// Measures `max ||W S_alpha - S_alpha W||` over all words `alpha` of the
/// given length in the candidate isometries.
pub fn commutation_residual(
    weight: &CMatrix,
    isometries: &[CMatrix],
    word_len: usize,
) -> Result<CommutationReport> {
    let n = validate_family(isometries)?;
    if weight.shape() != (n, n) {
        return Err(Error::DimensionMismatch(
            "weight image must match the isometry dimension".to_string(),
        ));
    }
    let d = isometries.len();
    if d > u8::MAX as usize {
        return Err(Error::DimensionTooLarge("too many isometries".to_string()));
    }
    let count = crate::word::level_dim(d, word_len)?;
    if count.checked_mul(n * n).map_or(true, |c| c > (1usize << 26)) {
        return Err(Error::DimensionTooLarge(format!(
            "{count} words of length {word_len} at dimension {n} is too large"
        )));
    }
    let mut best = CommutationReport {
        residual: -1.0,
        worst_word: Word::empty(),
    };
    for idx in 0..count {
        let word = Word::from_index(d, word_len, idx);
        let mut op = CMatrix::identity(n, n);
        for &letter in word.letters() {
            op = &isometries[(letter - 1) as usize] * &op;
        }
        let defect = cmat::op_norm(&(&(weight * &op) - &(&op * weight)));
        if defect > best.residual {
            best = CommutationReport {
                residual: defect,
                worst_word: word,
            };
        }
    }
    Ok(best)
}

/// Shared validation for the two corner certificates: checks shapes, that
/// `q` is a projection, that `x` and `y` live in its corner, and returns
/// the defect numbers together with an orthonormal basis of the range of
/// `q`.
struct CornerData {
    projection_residual: f64,
    support_residual: f64,
    corner_basis: CMatrix,
}

fn corner_data(x: &CMatrix, y: &CMatrix, q: &CMatrix) -> Result<CornerData> {
    if !q.is_square() {
        return Err(Error::DimensionMismatch("corner projection must be square".to_string()));
    }
    let n = q.nrows();
    if x.shape() != (n, n) || y.shape() != (n, n) {
        return Err(Error::DimensionMismatch(
            "corner certificate inputs must share one ambient dimension".to_string(),
        ));
    }
    let projection_residual =
        cmat::op_norm(&(&(q * q) - q)) + cmat::op_norm(&(&q.adjoint() - q));
    let mut support_residual = 0.0f64;
    for m in [x, y] {
        let inside = &(q * m) * q;
        support_residual = support_residual.max(cmat::op_norm(&(m - &inside)));
    }
    let (vals, vecs) = cmat::hermitian_eigen(&((q + &q.adjoint()) * cr(0.5)));
    let keep: Vec<usize> = (0..n).filter(|&i| vals[i] > 0.5).collect();
    if keep.is_empty() {
        return Err(Error::InvalidSpec("corner projection has trivial range".to_string()));
    }
    let corner_basis = cmat::select(&vecs, &(0..n).collect::<Vec<_>>(), &keep);
    Ok(CornerData {
        projection_residual,
        support_residual,
        corner_basis,
    })
}

fn compress_to_corner(basis: &CMatrix, m: &CMatrix) -> CMatrix {
    &(&basis.adjoint() * m) * basis
}

/// Outcome of the matrix-unit corner certificate.
#[derive(Debug, Clone)]
pub struct CornerUnitReport {
    /// Defect of the supplied corner projection from being a projection.
    pub projection_residual: f64,
    /// How far `x` and `y` stick out of the corner.
    pub support_residual: f64,
    /// Matrix-unit relation residuals of the derived family.
    pub units: MatrixUnitReport,
    /// Rank of the corner.
    pub corner_dim: usize,
    /// True when every residual is within tolerance.
    pub ok: bool,
}

/// Certifies that a pair `(x, y)` inside the corner of `q` generates a copy
/// of the 2x2 matrix algebra: the derived family `f_11 = (x - q)/2`,
/// `f_22 = q - f_11`, `f_12 = f_11 (y - 2q)`, `f_21 = f_12*` must satisfy
/// the matrix-unit relations on the range of `q`.
pub fn matrix_unit_corner_check(
    x: &CMatrix,
    y: &CMatrix,
    q: &CMatrix,
    tol: f64,
) -> Result<CornerUnitReport> {
    let data = corner_data(x, y, q)?;
    let f11 = (x - q) * cr(0.5);
    let f22 = q - &f11;
    let f12 = &f11 * &(y - &(q * cr(2.0)));
    let f21 = f12.adjoint();
    let grid = vec![
        vec![
            compress_to_corner(&data.corner_basis, &f11),
            compress_to_corner(&data.corner_basis, &f12),
        ],
        vec![
            compress_to_corner(&data.corner_basis, &f21),
            compress_to_corner(&data.corner_basis, &f22),
        ],
    ];
    let units = is_matrix_unit_family(&grid, tol)?;
    let corner_dim = data.corner_basis.ncols();
    let scale = cmat::op_norm(x).max(cmat::op_norm(y)).max(1.0);
    let ok = units.ok
        && data.projection_residual <= tol * scale
        && data.support_residual <= tol * scale;
    Ok(CornerUnitReport {
        projection_residual: data.projection_residual,
        support_residual: data.support_residual,
        units,
        corner_dim,
        ok,
    })
}

/// Outcome of the two-projection spectral certificate.
#[derive(Debug, Clone)]
pub struct SpectralPairReport {
    pub projection_residual: f64,
    pub support_residual: f64,
    /// Largest distance of an eigenvalue of `x` (on the corner) from `{1, 2}`.
    pub x_spectrum_defect: f64,
    /// Largest distance of an eigenvalue of `y` (on the corner) from `{1, 2}`.
    pub y_spectrum_defect: f64,
    /// Operator norm of `x + y - 3q`.
    pub sum_residual: f64,
    /// Projection defect of `t_1 = (2y - x)/3`.
    pub t1_residual: f64,
    /// Projection defect of `t_2 = (2x - y)/3`.
    pub t2_residual: f64,
    /// Operator norm of `t_1 t_2`.
    pub orthogonality_residual: f64,
    pub ok: bool,
}

/// Certifies that a pair `(x, y)` inside the corner of `q` comes from two
/// orthogonal projections summing to `q`: both must have spectrum in
/// `{1, 2}` on the corner, `x + y` must equal `3q`, and the combinations
/// `(2y - x)/3` and `(2x - y)/3` must be orthogonal projections.
pub fn spectral_pair_corner_check(
    x: &CMatrix,
    y: &CMatrix,
    q: &CMatrix,
    tol: f64,
) -> Result<SpectralPairReport> {
    let data = corner_data(x, y, q)?;
    let gx = compress_to_corner(&data.corner_basis, x);
    let gy = compress_to_corner(&data.corner_basis, y);
    for (name, g) in [("x", &gx), ("y", &gy)] {
        if !cmat::is_hermitian(g, HERMITIAN_TOL) {
            return Err(Error::NotHermitian(format!("corner compression of {name}")));
        }
    }
    let spectrum_defect = |g: &CMatrix| -> f64 {
        let (vals, _) = cmat::hermitian_eigen(g);
        vals.iter()
            .map(|&v| (v - 1.0).abs().min((v - 2.0).abs()))
            .fold(0.0, f64::max)
    };
    let x_spectrum_defect = spectrum_defect(&gx);
    let y_spectrum_defect = spectrum_defect(&gy);
    let r = gx.nrows();
    let ident = CMatrix::identity(r, r);
    let sum_residual = cmat::op_norm(&(&(&gx + &gy) - &(&ident * cr(3.0))));
    let t1 = (&(&gy * cr(2.0)) - &gx) * cr(1.0 / 3.0);
    let t2 = (&(&gx * cr(2.0)) - &gy) * cr(1.0 / 3.0);
    let proj_defect = |t: &CMatrix| -> f64 {
        cmat::op_norm(&(&(t * t) - t)) + cmat::op_norm(&(&t.adjoint() - t))
    };
    let t1_residual = proj_defect(&t1);
    let t2_residual = proj_defect(&t2);
    let orthogonality_residual = cmat::op_norm(&(&t1 * &t2));
    let scale = cmat::op_norm(x).max(cmat::op_norm(y)).max(1.0);
    let spec_tol = SPECTRUM_TOL.max(tol);
    let ok = data.projection_residual <= tol * scale
        && data.support_residual <= tol * scale
        && x_spectrum_defect <= spec_tol
        && y_spectrum_defect <= spec_tol
        && sum_residual <= tol * scale
        && t1_residual <= tol * scale
        && t2_residual <= tol * scale
        && orthogonality_residual <= tol * scale;
    Ok(SpectralPairReport {
        projection_residual: data.projection_residual,
        support_residual: data.support_residual,
        x_spectrum_defect,
        y_spectrum_defect,
        sum_residual,
        t1_residual,
        t2_residual,
        orthogonality_residual,
        ok,
    })
}

/// Candidate representation data for a corner-algebra dictionary check.
#[derive(Debug, Clone)]
pub struct RepData {
    /// Candidate shift images; the first one drives the dictionary.  May be
    /// empty when the family period is one.
    pub isometries: Vec<CMatrix>,
    /// Candidate image of the weight generator.
    pub weight: CMatrix,
    /// Images of the corner model basis elements, in basis order.
    pub corner_images: Vec<CMatrix>,
}

/// Outcome of the corner generator dictionary check.
#[derive(Debug, Clone)]
pub struct CornerRepReport {
    /// Largest defect of `pi(a) pi(b) - pi(ab)` over basis pairs.
    pub multiplicativity_defect: f64,
    /// Largest defect of `pi(a)* - pi(a*)` over the basis.
    pub adjoint_defect: f64,
    /// Largest defect of the generator dictionary
    /// `pi(f(gen_m)) = U_1^m f(W) U_1^(q-m) (U_1^q)*` over monomials `f` of
    /// degree at most three and `0 <= m <= q`.
    pub dictionary_defect: f64,
    /// For period-one families: largest `||W U_i - U_i W||`.
    pub weight_commutation: Option<f64>,
    /// For period-one families: largest distance of an eigenvalue of the
    /// weight image from the model spectrum.
    pub spectrum_defect: Option<f64>,
    /// For period-one families: smallest eigenvalue of the weight image.
    pub positivity_margin: Option<f64>,
    pub ok: bool,
}

/// Checks candidate representation data against a corner model: the basis
/// images must multiply and star like the model basis, and the model
/// generators must match the shift-and-weight dictionary built from the
/// first isometry image and the weight image.
pub fn corner_rep_check(
    model: &CornerAlgebraModel,
    data: &RepData,
    tol: f64,
) -> Result<CornerRepReport> {
    let dim = model.algebra.dim();
    if data.corner_images.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "need one image per basis element: expected {dim}, got {}",
            data.corner_images.len()
        )));
    }
    let Some(first_image) = data.corner_images.first() else {
        return Err(Error::InvalidSpec("corner model has an empty basis".to_string()));
    };
    if !first_image.is_square() {
        return Err(Error::DimensionMismatch("basis images must be square".to_string()));
    }
    let n = first_image.nrows();
    for m in data.corner_images.iter().chain(data.isometries.iter()) {
        if m.shape() != (n, n) {
            return Err(Error::DimensionMismatch(
                "all representation data must share one ambient dimension".to_string(),
            ));
        }
    }
    if data.weight.shape() != (n, n) {
        return Err(Error::DimensionMismatch(
            "weight image must match the ambient dimension".to_string(),
        ));
    }
    let q = model.family().period() - 1;
    if q >= 1 && data.isometries.is_empty() {
        return Err(Error::InvalidSpec(
            "the dictionary for period at least two needs a shift image".to_string(),
        ));
    }

    let pi = |w: &CMatrix| -> Result<CMatrix> {
        let (coords, residual) = model.algebra.coordinates(w);
        let ctol = 1e-8 * cmat::frob_norm(w).max(1.0);
        if residual > ctol {
            return Err(Error::OutsideSpan {
                residual,
                tol: ctol,
            });
        }
        let mut out = CMatrix::zeros(n, n);
        for (c, img) in coords.iter().zip(&data.corner_images) {
            out += img * *c;
        }
        Ok(out)
    };

    let basis = model.algebra.basis();
    let mut multiplicativity_defect = 0.0f64;
    let mut adjoint_defect = 0.0f64;
    for (i, a) in basis.iter().enumerate() {
        adjoint_defect = adjoint_defect.max(cmat::op_norm(
            &(&data.corner_images[i].adjoint() - &pi(&a.adjoint())?),
        ));
        for (j, b) in basis.iter().enumerate() {
            let product = pi(&(a * b))?;
            let image_product = &data.corner_images[i] * &data.corner_images[j];
            multiplicativity_defect =
                multiplicativity_defect.max(cmat::op_norm(&(&image_product - &product)));
        }
    }

    let mut u_pow = vec![CMatrix::identity(n, n)];
    for m in 1..=q {
        let next = &data.isometries[0] * &u_pow[m - 1];
        u_pow.push(next);
    }
    let mut dictionary_defect = 0.0f64;
    for m in 0..=q {
        let gen = if m % 2 == 0 {
            model.gen_a.clone()
        } else {
            model.gen_b.clone().unwrap_or_else(|| model.gen_a.clone())
        };
        for deg in 0..4usize {
            let mut coeffs = vec![0.0f64; deg + 1];
            coeffs[deg] = 1.0;
            let lhs = pi(&cmat::mat_poly(&gen, &coeffs))?;
            let fw = cmat::mat_poly(&data.weight, &coeffs);
            let rhs = &(&(&u_pow[m] * &fw) * &u_pow[q - m]) * &u_pow[q].adjoint();
            dictionary_defect = dictionary_defect.max(cmat::op_norm(&(&lhs - &rhs)));
        }
    }

    let scale = cmat::op_norm(&data.weight).max(1.0);
    let check_tol = tol.max(1e-10) * scale;
    let mut ok = multiplicativity_defect <= check_tol
        && adjoint_defect <= check_tol
        && dictionary_defect <= check_tol;

    let (mut weight_commutation, mut spectrum_defect, mut positivity_margin) = (None, None, None);
    if let CornerFamily::PeriodOne { .. } = model.family() {
        if !cmat::is_hermitian(&data.weight, HERMITIAN_TOL) {
            return Err(Error::NotHermitian("weight image".to_string()));
        }
        let commutation = data
            .isometries
            .iter()
            .map(|u| cmat::op_norm(&(&(&data.weight * u) - &(u * &data.weight))))
            .fold(0.0f64, f64::max);
        let model_spectrum: Vec<f64> = (0..model.gen_a.nrows()).map(|i| model.gen_a[(i, i)].re).collect();
        let (vals, _) = cmat::hermitian_eigen(&data.weight);
        let spec = vals
            .iter()
            .map(|&v| {
                model_spectrum
                    .iter()
                    .map(|&lam| (v - lam).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max);
        let margin = cmat::min_eig_hermitian(&data.weight);
        ok = ok
            && commutation <= check_tol
            && spec <= SPECTRUM_TOL.max(tol) * scale
            && margin > POSITIVE_TOL * scale;
        weight_commutation = Some(commutation);
        spectrum_defect = Some(spec);
        positivity_margin = Some(margin);
    }

    Ok(CornerRepReport {
        multiplicativity_defect,
        adjoint_defect,
        dictionary_defect,
        weight_commutation,
        spectrum_defect,
        positivity_margin,
        ok,
    })
}
