//! Finite-dimensional `*`-algebras of complex matrices: generation by closure
//! under products and adjoints, decomposition into simple summands via a
//! random central element, the ideal lattice, matrix-unit relation checks,
//! and a two-coordinate test for joint polynomial identities of two
//! generating pairs.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use rand_core::SeedableRng;

use crate::cmat::{self, cr, CMatrix, Cx};
// Under `no_std` the f64 math methods (sqrt, powi) come from this trait;
// with std the inherent methods shadow it, so the import looks unused there.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Default relative singular-value threshold for rank decisions.
pub const RANK_TOL: f64 = 1e-9;

/// Relative eigenvalue gap below which two clusters are considered merged.
pub const CLUSTER_GAP_REL: f64 = 1e-6;

/// Maximum number of seeded central-element draws before giving up.
pub const MAX_CENTRAL_DRAWS: usize = 5;

/// Largest ambient matrix dimension accepted by the algebra routines.
pub const MAX_AMBIENT: usize = 512;

/// Cap on the memory of one stacked-basis decomposition, in matrix entries.
const MAX_STACK_ENTRIES: usize = 1 << 26;

/// A span of matrices closed under products and adjoints, stored as a
/// Hilbert-Schmidt orthonormal basis.
#[derive(Debug, Clone)]
pub struct StarAlgebra {
    ambient_dim: usize,
    basis: Vec<CMatrix>,
    contains_identity: bool,
}

impl StarAlgebra {
    /// Wraps a spanning family that is already closed under products and
    /// adjoints; closure is verified to tolerance `tol` and rejected if it
    /// fails.
    pub fn from_span(family: &[CMatrix], ambient_dim: usize, tol: f64) -> Result<Self> {
        check_ambient(ambient_dim)?;
        for m in family {
            if m.shape() != (ambient_dim, ambient_dim) {
                return Err(Error::DimensionMismatch(
                    "spanning family must consist of square ambient matrices".to_string(),
                ));
            }
        }
        let (_, basis) = cmat::orthonormal_span(family, tol)?;
        let alg = StarAlgebra {
            ambient_dim,
            contains_identity: identity_in_span(&basis, ambient_dim, tol),
            basis,
        };
        let resid = alg.closure_residual();
        if resid > tol.max(1e-12) * 10.0 {
            return Err(Error::NumericalCheckFailed(format!(
                "spanning family is not closed under products/adjoints (residual {resid:e})"
            )));
        }
        Ok(alg)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Linear dimension of the algebra.
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Hilbert-Schmidt orthonormal basis.
    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn contains_identity(&self) -> bool {
        self.contains_identity
    }

    /// Coordinates of `x` in the basis and the norm of the component of `x`
    /// outside the span.
    pub fn coordinates(&self, x: &CMatrix) -> (Vec<Cx>, f64) {
        cmat::span_coordinates(&self.basis, x)
    }

    /// Norm of the component of `x` outside the span.
    pub fn membership_residual(&self, x: &CMatrix) -> f64 {
        self.coordinates(x).1
    }

    /// Reconstructs the element with the given coordinates.
    pub fn from_coordinates(&self, coords: &[Cx]) -> CMatrix {
        let mut acc = CMatrix::zeros(self.ambient_dim, self.ambient_dim);
        for (b, &c_) in self.basis.iter().zip(coords) {
            acc += b * c_;
        }
        acc
    }

    /// Worst membership residual of basis products and adjoints.
    pub fn closure_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for b in &self.basis {
            worst = worst.max(self.membership_residual(&b.adjoint()));
            for b2 in &self.basis {
                worst = worst.max(self.membership_residual(&(b * b2)));
            }
        }
        worst
    }
}

fn check_ambient(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::DimensionMismatch("ambient dimension must be positive".to_string()));
    }
    if n > MAX_AMBIENT {
        return Err(Error::DimensionTooLarge(format!(
            "ambient dimension {n} exceeds the supported {MAX_AMBIENT}"
        )));
    }
    Ok(())
}

fn identity_in_span(basis: &[CMatrix], n: usize, tol: f64) -> bool {
    let ident = CMatrix::identity(n, n);
    let (_, residual) = cmat::span_coordinates(basis, &ident);
    residual <= tol.max(1e-12) * (n as f64).sqrt()
}

fn check_stack_size(rows: usize, n: usize) -> Result<()> {
    if rows.saturating_mul(n * n) > MAX_STACK_ENTRIES {
        return Err(Error::DimensionTooLarge(format!(
            "stacked basis of {rows} matrices of dimension {n} exceeds the supported scale"
        )));
    }
    Ok(())
}

/// Generates the unital `*`-algebra spanned by `generators` inside
/// `M_(ambient_dim)`: starting from the identity, the generators, and their
/// adjoints, products are added and the span re-orthonormalized until the
/// dimension stabilizes.  Rank decisions use singular values above
/// `tol * sigma_max`.
pub fn generate_algebra(
    generators: &[CMatrix],
    ambient_dim: usize,
    tol: f64,
) -> Result<StarAlgebra> {
    check_ambient(ambient_dim)?;
    for g in generators {
        if g.shape() != (ambient_dim, ambient_dim) {
            return Err(Error::DimensionMismatch(format!(
                "generator must be {ambient_dim}x{ambient_dim}, got {}x{}",
                g.nrows(),
                g.ncols()
            )));
        }
    }
    let mut seed: Vec<CMatrix> = Vec::with_capacity(2 * generators.len() + 1);
    seed.push(CMatrix::identity(ambient_dim, ambient_dim));
    for g in generators {
        seed.push(g.clone());
        seed.push(g.adjoint());
    }
    check_stack_size(seed.len(), ambient_dim)?;
    let (mut rank, mut basis) = cmat::orthonormal_span(&seed, tol)?;

    let max_passes = ambient_dim * ambient_dim + 1;
    for _ in 0..max_passes {
        let mut candidates = Vec::with_capacity(rank * rank + 2 * rank);
        candidates.extend(basis.iter().cloned());
        candidates.extend(basis.iter().map(|b| b.adjoint()));
        for x in &basis {
            for y in &basis {
                candidates.push(x * y);
            }
        }
        check_stack_size(candidates.len(), ambient_dim)?;
        let (new_rank, new_basis) = cmat::orthonormal_span(&candidates, tol)?;
        let stable = new_rank == rank;
        rank = new_rank;
        basis = new_basis;
        if stable {
            return Ok(StarAlgebra {
                ambient_dim,
                contains_identity: identity_in_span(&basis, ambient_dim, tol),
                basis,
            });
        }
    }
    Err(Error::DimensionNotStabilized(max_passes))
}

/// Decomposition of a unital `*`-algebra into simple summands.
#[derive(Debug, Clone)]
pub struct WedderburnReport {
    /// Linear dimension of the algebra.
    pub algebra_dim: usize,
    /// Dimension of the center, i.e. the number of summands.
    pub center_dim: usize,
    /// Sizes `n_i` of the full matrix summands `M_(n_i)`.
    pub block_sizes: Vec<usize>,
    /// Central projections, one per summand, in the same order.
    pub projections: Vec<CMatrix>,
    /// Mean eigenvalue of the separating central element on each summand.
    pub central_values: Vec<f64>,
    /// Seed used for the central-element draws.
    pub seed: u64,
    /// Number of central-element draws consumed.
    pub draws_used: usize,
    /// Worst commutation residual of the projections with the basis.
    pub commutation_residual: f64,
    /// Worst membership residual of the projections in the algebra span.
    pub membership_residual: f64,
}

/// Splits a unital `*`-algebra into simple summands: the center is solved as
/// the common null space of the commutator maps, a seeded random self-adjoint
/// central element is drawn, and its eigenvalue clusters give the central
/// projections; the summand size `n_i` is recovered from the dimension of the
/// compressed algebra.
pub fn wedderburn(alg: &StarAlgebra, seed: u64, tol: f64) -> Result<WedderburnReport> {
    if !alg.contains_identity() {
        return Err(Error::MissingIdentity);
    }
    let n = alg.ambient_dim();
    let dim = alg.dim();
    let basis = alg.basis();

    // Center: coefficient vectors c with sum_j c_j [b_j, b_i] = 0 for all i.
    check_stack_size(dim * dim, n)?;
    let rows = dim * n * n;
    let mut commutator_map = CMatrix::zeros(rows, dim);
    for (j, bj) in basis.iter().enumerate() {
        for (i, bi) in basis.iter().enumerate() {
            let comm = bj * bi - bi * bj;
            for r in 0..n {
                for c_ in 0..n {
                    commutator_map[(i * n * n + r * n + c_, j)] = comm[(r, c_)];
                }
            }
        }
    }
    // Nullspace through the Gram matrix: `G w = 0` exactly when every
    // commutator combination vanishes.  Squaring costs precision, so the
    // effective threshold floors at 1e-7 on the singular-value scale; the
    // separation between zero and nonzero directions here is many orders
    // larger.
    let gram = commutator_map.adjoint() * &commutator_map;
    let gram = (&gram + &gram.adjoint()) * cr(0.5);
    let (vals, vecs) = cmat::hermitian_eigen(&gram);
    let lam_max = vals.last().copied().unwrap_or(0.0).max(0.0);
    let thr = tol.max(1e-7).powi(2) * lam_max.max(1.0);
    let null_cols: Vec<usize> = (0..dim).filter(|&i| vals[i] <= thr).collect();
    let center_dim = null_cols.len();
    if center_dim == 0 {
        return Err(Error::NumericalCheckFailed(
            "center collapsed to zero; the identity should always be central".to_string(),
        ));
    }
    let mut center: Vec<CMatrix> = Vec::with_capacity(center_dim);
    for &col in &null_cols {
        let coords: Vec<Cx> = (0..dim).map(|j| vecs[(j, col)]).collect();
        center.push(alg.from_coordinates(&coords));
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut last_err = Error::CenterSplitFailed(MAX_CENTRAL_DRAWS);
    for draw in 1..=MAX_CENTRAL_DRAWS {
        let mut g = CMatrix::zeros(n, n);
        for z in &center {
            let co = cmat::c(cmat::uniform_pm1(&mut rng), cmat::uniform_pm1(&mut rng));
            g += z * co;
        }
        let h = (&g + &g.adjoint()) * cr(0.5);
        match split_by_central_element(alg, &h, center_dim, tol) {
            Ok(mut report) => {
                report.seed = seed;
                report.draws_used = draw;
                report.algebra_dim = dim;
                report.center_dim = center_dim;
                return Ok(report);
            }
            Err(e) => last_err = e,
        }
    }
    match last_err {
        Error::CenterSplitFailed(_) => Err(Error::CenterSplitFailed(MAX_CENTRAL_DRAWS)),
        other => Err(other),
    }
}

fn split_by_central_element(
    alg: &StarAlgebra,
    h: &CMatrix,
    center_dim: usize,
    tol: f64,
) -> Result<WedderburnReport> {
    let n = alg.ambient_dim();
    let (vals, vecs) = cmat::hermitian_eigen(h);
    let scale = vals.iter().fold(1.0f64, |a, &v| a.max(v.abs()));
    let gap = CLUSTER_GAP_REL * scale;

    let mut clusters: Vec<(usize, usize)> = Vec::new();
    let mut start = 0usize;
    for i in 1..=vals.len() {
        if i == vals.len() || vals[i] - vals[i - 1] > gap {
            clusters.push((start, i));
            start = i;
        }
    }
    if clusters.len() != center_dim {
        return Err(Error::CenterSplitFailed(1));
    }

    let mut projections = Vec::with_capacity(center_dim);
    let mut central_values = Vec::with_capacity(center_dim);
    for &(lo, hi) in &clusters {
        let mut p = CMatrix::zeros(n, n);
        for i in lo..hi {
            let v = vecs.column(i);
            p += &v * v.adjoint();
        }
        projections.push(p);
        central_values.push(vals[lo..hi].iter().sum::<f64>() / (hi - lo) as f64);
    }

    let mut commutation_residual = 0.0f64;
    let mut membership_residual = 0.0f64;
    for p in &projections {
        membership_residual = membership_residual.max(alg.membership_residual(p));
        for b in alg.basis() {
            let comm = p * b - b * p;
            commutation_residual = commutation_residual.max(cmat::frob_norm(&comm));
        }
    }
    let check_tol = (tol * 1e3).max(1e-8);
    if commutation_residual > check_tol || membership_residual > check_tol {
        return Err(Error::CenterSplitFailed(1));
    }

    let mut block_sizes = Vec::with_capacity(center_dim);
    for p in &projections {
        let compressed: Vec<CMatrix> = alg.basis().iter().map(|b| p * b * p).collect();
        let (corner_dim, _) = cmat::orthonormal_span(&compressed, tol)?;
        let size = (corner_dim as f64).sqrt().round() as usize;
        if size * size != corner_dim {
            return Err(Error::NumericalCheckFailed(format!(
                "compressed summand dimension {corner_dim} is not a perfect square"
            )));
        }
        block_sizes.push(size);
    }
    let total: usize = block_sizes.iter().map(|s| s * s).sum();
    if total != alg.dim() {
        return Err(Error::NumericalCheckFailed(format!(
            "summand sizes {block_sizes:?} do not account for the algebra dimension {}",
            alg.dim()
        )));
    }

    Ok(WedderburnReport {
        algebra_dim: alg.dim(),
        center_dim,
        block_sizes,
        projections,
        central_values,
        seed: 0,
        draws_used: 0,
        commutation_residual,
        membership_residual,
    })
}

/// A set of summand indices (0-based) describing a two-sided ideal of a
/// semisimple algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealMask {
    /// Sorted summand indices.
    pub members: Vec<usize>,
    /// Whether the ideal is neither zero nor the whole algebra.
    pub nontrivial: bool,
}

/// All `2^m` ideals of a semisimple algebra with `m` summands, ordered by
/// size and then lexicographically.
pub fn ideal_lattice(report: &WedderburnReport) -> Result<Vec<IdealMask>> {
    let m = report.center_dim;
    if m > 20 {
        return Err(Error::LatticeTooLarge { summands: m });
    }
    let mut masks = Vec::with_capacity(1usize << m);
    for bits in 0u32..(1u32 << m) {
        let members: Vec<usize> = (0..m).filter(|i| bits & (1 << i) != 0).collect();
        let nontrivial = !members.is_empty() && members.len() < m;
        masks.push(IdealMask { members, nontrivial });
    }
    masks.sort_by(|a, b| (a.members.len(), &a.members).cmp(&(b.members.len(), &b.members)));
    Ok(masks)
}

/// Residuals of the matrix-unit relations for a square grid of candidates.
#[derive(Debug, Clone)]
pub struct MatrixUnitReport {
    /// Worst operator-norm residual of `t_ab t_ce - delta_bc t_ae`.
    pub product_defect: f64,
    /// Operator-norm residual of `sum_a t_aa - I`.
    pub sum_defect: f64,
    /// Worst residual of `t_ab* - t_ba` (informational).
    pub adjoint_defect: f64,
    /// Whether products and the diagonal sum hold to the given tolerance.
    pub ok: bool,
}

/// Checks the matrix-unit relations `t_ab t_ce = delta_bc t_ae` and
/// `sum_a t_aa = I` for a grid `units[a][b]`.
pub fn is_matrix_unit_family(units: &[Vec<CMatrix>], tol: f64) -> Result<MatrixUnitReport> {
    let m = units.len();
    if m == 0 {
        return Err(Error::DimensionMismatch("empty matrix-unit grid".to_string()));
    }
    if m > 32 {
        return Err(Error::DimensionTooLarge(format!(
            "matrix-unit grid with {m} rows exceeds the supported 32"
        )));
    }
    let n = units[0][0].nrows();
    for row in units {
        if row.len() != m {
            return Err(Error::DimensionMismatch("matrix-unit grid is not square".to_string()));
        }
        for t in row {
            if t.shape() != (n, n) {
                return Err(Error::DimensionMismatch(
                    "matrix-unit entries must share one square shape".to_string(),
                ));
            }
        }
    }

    let mut product_defect = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            for c_ in 0..m {
                for e in 0..m {
                    let prod = &units[a][b] * &units[c_][e];
                    let expect = if b == c_ {
                        units[a][e].clone()
                    } else {
                        CMatrix::zeros(n, n)
                    };
                    product_defect = product_defect.max(cmat::op_norm(&(prod - expect)));
                }
            }
        }
    }

    let mut diag_sum = CMatrix::zeros(n, n);
    for (a, row) in units.iter().enumerate() {
        diag_sum += &row[a];
    }
    let sum_defect = cmat::op_norm(&(diag_sum - CMatrix::identity(n, n)));

    let mut adjoint_defect = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            adjoint_defect =
                adjoint_defect.max(cmat::op_norm(&(units[a][b].adjoint() - &units[b][a])));
        }
    }

    Ok(MatrixUnitReport {
        product_defect,
        sum_defect,
        adjoint_defect,
        ok: product_defect <= tol && sum_defect <= tol,
    })
}

/// Outcome of the two-coordinate identity test.
#[derive(Debug, Clone)]
pub struct CorrespondenceReport {
    /// Dimension of the algebra generated by the paired block-diagonal
    /// generators.
    pub dim_pair: usize,
    /// Dimension generated by the first pair alone.
    pub dim_left: usize,
    /// Dimension generated by the second pair alone.
    pub dim_right: usize,
    /// Whether both coordinate projections are injective, i.e. the two pairs
    /// satisfy exactly the same polynomial identities.
    pub holds: bool,
}

/// Tests whether the self-adjoint pairs `(a1, b1)` and `(a2, b2)` satisfy the
/// same polynomial identities, by comparing the dimension of the algebra
/// generated by `(a1 + a2, b1 + b2)` acting block-diagonally against the
/// dimensions generated by each pair alone.
pub fn identity_correspondence_test(
    a1: &CMatrix,
    b1: &CMatrix,
    a2: &CMatrix,
    b2: &CMatrix,
    tol: f64,
) -> Result<CorrespondenceReport> {
    for (name, m) in [("a1", a1), ("b1", b1), ("a2", a2), ("b2", b2)] {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!("{name} must be square")));
        }
        if !cmat::is_hermitian(m, 1e-9) {
            return Err(Error::NotHermitian(name.to_string()));
        }
    }
    if a1.nrows() != b1.nrows() || a2.nrows() != b2.nrows() {
        return Err(Error::DimensionMismatch(
            "each pair must act on one space".to_string(),
        ));
    }
    let n1 = a1.nrows();
    let n2 = a2.nrows();
    let dim_left = generate_algebra(&[a1.clone(), b1.clone()], n1, tol)?.dim();
    let dim_right = generate_algebra(&[a2.clone(), b2.clone()], n2, tol)?.dim();

    let embed = |x: &CMatrix, y: &CMatrix| {
        let mut m = CMatrix::zeros(n1 + n2, n1 + n2);
        m.view_mut((0, 0), (n1, n1)).copy_from(x);
        m.view_mut((n1, n1), (n2, n2)).copy_from(y);
        m
    };
    let dim_pair = generate_algebra(&[embed(a1, a2), embed(b1, b2)], n1 + n2, tol)?.dim();
    Ok(CorrespondenceReport {
        dim_pair,
        dim_left,
        dim_right,
        holds: dim_pair == dim_left && dim_pair == dim_right,
    })
}
