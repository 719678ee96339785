//! The finite-dimensional corner algebra attached to an eventually periodic
//! weight sequence, the swap action on its summands, corner-to-corner
//! compressions, invariant ideals, the simplicity decision, a direct-limit
//! connecting map, and a truncation probe estimating the corner algebra from
//! finite levels.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;


use crate::cmat::{self, cr, CMatrix};
use crate::error::{Error, Result};
use crate::fock::{WeightSpec, HERMITIAN_TOL, POSITIVE_TOL};
use crate::matalg::{
    self, generate_algebra, ideal_lattice, wedderburn, IdealMask, StarAlgebra, WedderburnReport,
    CLUSTER_GAP_REL,
};
use crate::word;

/// Seed used for the model-internal summand separation when the caller does
/// not supply one.
pub const DEFAULT_MODEL_SEED: u64 = 17;

/// Relative residual above which an element counts as outside a span.
const SPAN_RESIDUAL_TOL: f64 = 1e-8;

/// Weight families whose corner algebra has an exact finite-dimensional
/// model.
#[derive(Debug, Clone)]
pub enum CornerFamily {
    /// Alternating two-block tail over `d = 2` with period 2: identity
    /// weights below `tail_start`, then blocks alternating between `A` and
    /// `B` under growing identity factors.
    AlternatingPeriodTwo {
        tail_start: usize,
        a: CMatrix,
        b: CMatrix,
    },
    /// Exactly period-one tail: the weight block commutes with the shift up
    /// to vanishing defect, and the corner algebra is the algebra of
    /// functions on the spectrum of the tail block.
    PeriodOne { d: usize, block: CMatrix },
}

impl CornerFamily {
    /// Alphabet size of the family.
    pub fn d(&self) -> usize {
        match self {
            CornerFamily::AlternatingPeriodTwo { .. } => 2,
            CornerFamily::PeriodOne { d, .. } => *d,
        }
    }

    /// Tail period of the family.
    pub fn period(&self) -> usize {
        match self {
            CornerFamily::AlternatingPeriodTwo { .. } => 2,
            CornerFamily::PeriodOne { .. } => 1,
        }
    }
}

/// Finite-dimensional model of the corner algebra: a concrete `*`-algebra
/// together with the images of the two corner generators and its summand
/// decomposition in a canonical order.
#[derive(Debug, Clone)]
pub struct CornerAlgebraModel {
    family: CornerFamily,
    tol: f64,
    /// The model algebra.
    pub algebra: StarAlgebra,
    /// Image of the weight generator (`A (+) B` for the alternating family,
    /// the diagonal of distinct eigenvalues for the period-one family).
    pub gen_a: CMatrix,
    /// Image of the shifted weight generator (`B (+) A`); absent for the
    /// period-one family, where it coincides with `gen_a`.
    pub gen_b: Option<CMatrix>,
    /// Summand decomposition, re-numbered canonically.
    pub report: WedderburnReport,
}

impl CornerAlgebraModel {
    pub fn family(&self) -> &CornerFamily {
        &self.family
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Ambient dimension of the model algebra.
    pub fn ambient_dim(&self) -> usize {
        self.algebra.ambient_dim()
    }

    /// `d^q` where `q = period - 1`: the outer matrix factor of the
    /// pre-corner coordinates.
    pub fn outer_dim(&self) -> usize {
        let q = self.family.period() - 1;
        word::level_dim(self.family.d(), q).expect("small exponent")
    }
}

fn validate_positive(name: &str, m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!("{name} must be square")));
    }
    if !cmat::is_hermitian(m, HERMITIAN_TOL) {
        return Err(Error::NotHermitian(name.to_string()));
    }
    let scale = cmat::op_norm(m).max(1.0);
    if cmat::min_eig_hermitian(m) <= POSITIVE_TOL * scale {
        return Err(Error::NotPositiveDefinite(name.to_string()));
    }
    Ok(())
}

/// Orders summand indices by the given key rows, descending, comparing one
/// component at a time with a relative epsilon; ties keep the original
/// order.
fn canonical_order(keys: &[Vec<f64>], ascending: bool) -> Vec<usize> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&x, &y| {
        for (a, b) in keys[x].iter().zip(&keys[y]) {
            let eps = 1e-9 * a.abs().max(b.abs()).max(1.0);
            if (a - b).abs() > eps {
                let ord = a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal);
                return if ascending { ord } else { ord.reverse() };
            }
        }
        x.cmp(&y)
    });
    order
}

fn reorder_report(report: &mut WedderburnReport, order: &[usize]) {
    report.block_sizes = order.iter().map(|&i| report.block_sizes[i]).collect();
    report.projections = order.iter().map(|&i| report.projections[i].clone()).collect();
    report.central_values = order.iter().map(|&i| report.central_values[i]).collect();
}

/// Builds the corner algebra model for a family.
///
/// For the alternating family the model is the `*`-algebra generated by
/// `A (+) B` and `B (+) A`; summands are numbered by decreasing trace of the
/// central projection against the sum of the generators, then against the
/// first generator.  For the period-one family the model is the diagonal
/// algebra on the distinct eigenvalues of the block, numbered by ascending
/// eigenvalue.
pub fn build_corner_model(family: &CornerFamily, seed: u64, tol: f64) -> Result<CornerAlgebraModel> {
    match family {
        CornerFamily::AlternatingPeriodTwo { tail_start, a, b } => {
            let n = word::level_dim(2, *tail_start)?;
            for (name, m) in [("A", a), ("B", b)] {
                validate_positive(name, m)?;
                if m.shape() != (n, n) {
                    return Err(Error::DimensionMismatch(format!(
                        "{name} must be {n}x{n} for tail_start {tail_start}"
                    )));
                }
            }
            let s = 2 * n;
            let mut gen_a = CMatrix::zeros(s, s);
            gen_a.view_mut((0, 0), (n, n)).copy_from(a);
            gen_a.view_mut((n, n), (n, n)).copy_from(b);
            let mut gen_b = CMatrix::zeros(s, s);
            gen_b.view_mut((0, 0), (n, n)).copy_from(b);
            gen_b.view_mut((n, n), (n, n)).copy_from(a);

            let algebra = generate_algebra(&[gen_a.clone(), gen_b.clone()], s, tol)?;
            let mut report = wedderburn(&algebra, seed, tol)?;
            let sum = &gen_a + &gen_b;
            let keys: Vec<Vec<f64>> = report
                .projections
                .iter()
                .map(|p| {
                    vec![
                        (p * &sum).trace().re,
                        (p * &gen_a).trace().re,
                        p.trace().re,
                    ]
                })
                .collect();
            let order = canonical_order(&keys, false);
            reorder_report(&mut report, &order);
            Ok(CornerAlgebraModel {
                family: family.clone(),
                tol,
                algebra,
                gen_a,
                gen_b: Some(gen_b),
                report,
            })
        }
        CornerFamily::PeriodOne { d, block } => {
            if *d == 0 {
                return Err(Error::InvalidSpec("alphabet size d must be at least 1".to_string()));
            }
            validate_positive("tail block", block)?;
            let (vals, _) = cmat::hermitian_eigen(block);
            let scale = vals.iter().fold(1.0f64, |acc, &v| acc.max(v.abs()));
            let gap = CLUSTER_GAP_REL * scale;
            let mut distinct: Vec<f64> = Vec::new();
            let mut cluster_start = 0usize;
            for i in 1..=vals.len() {
                if i == vals.len() || vals[i] - vals[i - 1] > gap {
                    let mean = vals[cluster_start..i].iter().sum::<f64>() / (i - cluster_start) as f64;
                    distinct.push(mean);
                    cluster_start = i;
                }
            }
            let m = distinct.len();
            let gen_a = CMatrix::from_fn(m, m, |i, j| if i == j { cr(distinct[i]) } else { cr(0.0) });
            let family_basis: Vec<CMatrix> = (0..m).map(|i| cmat::e_matrix(m, i, i)).collect();
            let algebra = StarAlgebra::from_span(&family_basis, m, tol)?;
            let mut report = wedderburn(&algebra, seed, tol)?;
            let keys: Vec<Vec<f64>> = report
                .projections
                .iter()
                .map(|p| vec![(p * &gen_a).trace().re / p.trace().re.max(1e-300)])
                .collect();
            let order = canonical_order(&keys, true);
            reorder_report(&mut report, &order);
            Ok(CornerAlgebraModel {
                family: family.clone(),
                tol,
                algebra,
                gen_a,
                gen_b: None,
                report,
            })
        }
    }
}

/// The swap action on the corner model: conjugation by the flip that
/// exchanges the two halves of the alternating model, together with the
/// induced permutation of the summands.
#[derive(Debug, Clone)]
pub struct SwapAction {
    /// The flip matrix implementing the action.
    pub flip: CMatrix,
    /// Image of each summand index under the action.
    pub permutation: Vec<usize>,
}

impl SwapAction {
    /// Applies the action to a model element.
    pub fn apply(&self, w: &CMatrix) -> CMatrix {
        &(&self.flip * w) * &self.flip
    }

    /// Orbits of the permutation, each sorted, ordered by smallest member.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let m = self.permutation.len();
        let mut seen = vec![false; m];
        let mut orbits = Vec::new();
        for start in 0..m {
            if seen[start] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut cur = start;
            while !seen[cur] {
                seen[cur] = true;
                orbit.push(cur);
                cur = self.permutation[cur];
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits
    }
}

/// Computes the swap action of an alternating-family model: conjugation by
/// the flip of the two halves, which exchanges the two generators.  Verifies
/// that the action maps the model algebra to itself and induces an
/// involutive permutation of the summands.
pub fn swap_action(model: &CornerAlgebraModel) -> Result<SwapAction> {
    let CornerFamily::AlternatingPeriodTwo { tail_start, .. } = &model.family else {
        return Err(Error::OutOfScope(
            "the swap action is defined for the alternating two-block family".to_string(),
        ));
    };
    let n = word::level_dim(2, *tail_start)?;
    let s = 2 * n;
    let mut flip = CMatrix::zeros(s, s);
    for i in 0..n {
        flip[(i, n + i)] = cr(1.0);
        flip[(n + i, i)] = cr(1.0);
    }

    for b in model.algebra.basis() {
        let image = &(&flip * b) * &flip;
        let residual = model.algebra.membership_residual(&image);
        if residual > SPAN_RESIDUAL_TOL {
            return Err(Error::NumericalCheckFailed(format!(
                "swap image leaves the model algebra (residual {residual:e})"
            )));
        }
    }

    let m = model.report.center_dim;
    let mut permutation = vec![usize::MAX; m];
    for (i, p) in model.report.projections.iter().enumerate() {
        let image = &(&flip * p) * &flip;
        let mut best = (f64::INFINITY, usize::MAX);
        for (j, q) in model.report.projections.iter().enumerate() {
            let dist = cmat::frob_norm(&(&image - q));
            if dist < best.0 {
                best = (dist, j);
            }
        }
        if best.0 > SPAN_RESIDUAL_TOL {
            return Err(Error::NumericalCheckFailed(format!(
                "swap image of summand {i} matches no summand (distance {:e})",
                best.0
            )));
        }
        permutation[i] = best.1;
    }
    let mut hit = vec![false; m];
    for &j in &permutation {
        if j == usize::MAX || hit[j] {
            return Err(Error::NumericalCheckFailed(
                "swap does not permute the summands".to_string(),
            ));
        }
        hit[j] = true;
    }
    for i in 0..m {
        if permutation[permutation[i]] != i {
            return Err(Error::NumericalCheckFailed(
                "swap permutation is not an involution".to_string(),
            ));
        }
    }
    Ok(SwapAction { flip, permutation })
}

/// An element of the pre-corner coordinates `M_(outer) (x) span(model)`,
/// stored as one matrix with every outer block validated against the model
/// span.
#[derive(Debug, Clone)]
pub struct CornerElement {
    outer_dim: usize,
    inner_dim: usize,
    mat: CMatrix,
}

impl CornerElement {
    /// Wraps a matrix in `M_(outer * inner)`, validating every inner block
    /// against the model span.
    pub fn new(model: &CornerAlgebraModel, mat: CMatrix) -> Result<Self> {
        let outer = model.outer_dim();
        let inner = model.ambient_dim();
        let n = outer * inner;
        if mat.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "corner element must be {n}x{n}, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let element = CornerElement {
            outer_dim: outer,
            inner_dim: inner,
            mat,
        };
        for i in 0..outer {
            for j in 0..outer {
                let w = element.block(i, j);
                let residual = model.algebra.membership_residual(&w);
                let tol = SPAN_RESIDUAL_TOL * cmat::frob_norm(&w).max(1.0);
                if residual > tol {
                    return Err(Error::OutsideSpan { residual, tol });
                }
            }
        }
        Ok(element)
    }

    /// Builds `sum e_(ij) (x) blocks[i][j]`.
    pub fn from_outer_blocks(model: &CornerAlgebraModel, blocks: &[Vec<CMatrix>]) -> Result<Self> {
        let outer = model.outer_dim();
        let inner = model.ambient_dim();
        if blocks.len() != outer || blocks.iter().any(|row| row.len() != outer) {
            return Err(Error::DimensionMismatch(format!(
                "need a {outer}x{outer} grid of inner blocks"
            )));
        }
        let mut mat = CMatrix::zeros(outer * inner, outer * inner);
        for (i, row) in blocks.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                if w.shape() != (inner, inner) {
                    return Err(Error::DimensionMismatch(format!(
                        "inner blocks must be {inner}x{inner}"
                    )));
                }
                mat.view_mut((i * inner, j * inner), (inner, inner)).copy_from(w);
            }
        }
        CornerElement::new(model, mat)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn outer_dim(&self) -> usize {
        self.outer_dim
    }

    /// The inner block at outer position `(i, j)`.
    pub fn block(&self, i: usize, j: usize) -> CMatrix {
        self.mat
            .view((i * self.inner_dim, j * self.inner_dim), (self.inner_dim, self.inner_dim))
            .into_owned()
    }
}

/// Compression of a pre-corner element between corner copies `i` and `j`:
/// picks the `(i, j)` outer block and returns it under the swap action,
/// spread along the outer diagonal.
pub fn compress(
    model: &CornerAlgebraModel,
    i: usize,
    j: usize,
    x: &CornerElement,
) -> Result<CornerElement> {
    let outer = model.outer_dim();
    if x.outer_dim() != outer || x.inner_dim != model.ambient_dim() {
        return Err(Error::DimensionMismatch(
            "corner element does not match the model".to_string(),
        ));
    }
    if i >= outer || j >= outer {
        return Err(Error::DimensionMismatch(format!(
            "outer indices ({i}, {j}) out of range for dimension {outer}"
        )));
    }
    let w = x.block(i, j);
    let swapped = match &model.family {
        CornerFamily::AlternatingPeriodTwo { .. } => swap_action(model)?.apply(&w),
        CornerFamily::PeriodOne { .. } => w,
    };
    let inner = model.ambient_dim();
    let mut out = CMatrix::zeros(outer * inner, outer * inner);
    for t in 0..outer {
        out.view_mut((t * inner, t * inner), (inner, inner)).copy_from(&swapped);
    }
    CornerElement::new(model, out)
}

/// Nontrivial ideals of the corner model that survive the swap action: for
/// the alternating family these are the summand sets fixed by the swap
/// permutation; for the period-one family every nontrivial ideal qualifies.
pub fn invariant_ideals(model: &CornerAlgebraModel) -> Result<Vec<IdealMask>> {
    let lattice = ideal_lattice(&model.report)?;
    match &model.family {
        CornerFamily::AlternatingPeriodTwo { .. } => {
            let action = swap_action(model)?;
            Ok(lattice
                .into_iter()
                .filter(|mask| {
                    if !mask.nontrivial {
                        return false;
                    }
                    let mut image: Vec<usize> =
                        mask.members.iter().map(|&i| action.permutation[i]).collect();
                    image.sort_unstable();
                    image == mask.members
                })
                .collect())
        }
        CornerFamily::PeriodOne { .. } => {
            Ok(lattice.into_iter().filter(|mask| mask.nontrivial).collect())
        }
    }
}

/// Verdict of the simplicity decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Simple,
    NotSimple,
    OutOfScope,
}

/// Outcome of the simplicity decision for a corner family.
#[derive(Debug, Clone)]
pub struct SimplicityReport {
    pub verdict: Verdict,
    /// A nontrivial invariant summand set witnessing non-simplicity, when
    /// one exists.
    pub witness: Option<IdealMask>,
    /// Summand sizes of the corner model in canonical order.
    pub block_sizes: Vec<usize>,
    /// Orbits of the swap action on the summands (singletons for the
    /// period-one family).
    pub orbits: Vec<Vec<usize>>,
    /// Plain-language justification of the verdict.
    pub reason: String,
}

/// Decides simplicity of the quotient algebra attached to a corner family:
/// with `d > 1` the quotient is simple exactly when no nontrivial summand
/// set is invariant under the swap action; with `d = 1` it is never simple.
pub fn decide_simplicity(family: &CornerFamily, seed: u64, tol: f64) -> Result<SimplicityReport> {
    let model = build_corner_model(family, seed, tol)?;
    match family {
        CornerFamily::AlternatingPeriodTwo { .. } => {
            let action = swap_action(&model)?;
            let orbits = action.orbits();
            let invariant = invariant_ideals(&model)?;
            if invariant.is_empty() {
                Ok(SimplicityReport {
                    verdict: Verdict::Simple,
                    witness: None,
                    block_sizes: model.report.block_sizes.clone(),
                    orbits,
                    reason: "no nontrivial summand set is invariant under the swap action"
                        .to_string(),
                })
            } else {
                Ok(SimplicityReport {
                    verdict: Verdict::NotSimple,
                    witness: Some(invariant[0].clone()),
                    block_sizes: model.report.block_sizes.clone(),
                    orbits,
                    reason: "a nontrivial summand set is invariant under the swap action"
                        .to_string(),
                })
            }
        }
        CornerFamily::PeriodOne { d, .. } => {
            let m = model.report.center_dim;
            let orbits: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
            let block_sizes = model.report.block_sizes.clone();
            if *d == 1 {
                let witness = if m >= 2 {
                    Some(IdealMask {
                        members: vec![0],
                        nontrivial: true,
                    })
                } else {
                    None
                };
                Ok(SimplicityReport {
                    verdict: Verdict::NotSimple,
                    witness,
                    block_sizes,
                    orbits,
                    reason: "with a one-letter alphabet the weight tail is gauge-periodic and the quotient is never simple"
                        .to_string(),
                })
            } else if m == 1 {
                Ok(SimplicityReport {
                    verdict: Verdict::Simple,
                    witness: None,
                    block_sizes,
                    orbits,
                    reason: "the tail block has a single eigenvalue, so the corner algebra is trivial"
                        .to_string(),
                })
            } else {
                Ok(SimplicityReport {
                    verdict: Verdict::NotSimple,
                    witness: Some(IdealMask {
                        members: vec![0],
                        nontrivial: true,
                    }),
                    block_sizes,
                    orbits,
                    reason: "every spectral summand of the tail block generates a proper invariant ideal"
                        .to_string(),
                })
            }
        }
    }
}

/// Classifies a weight spec into a corner family when one applies; returns
/// the reason it does not otherwise.
pub fn classify_weight_spec(ws: &WeightSpec) -> core::result::Result<CornerFamily, String> {
    use crate::fock::WeightKind;
    match ws.kind() {
        WeightKind::AlternatingTail { tail_start, a, b } => Ok(CornerFamily::AlternatingPeriodTwo {
            tail_start: *tail_start,
            a: a.clone(),
            b: b.clone(),
        }),
        WeightKind::Identity => Ok(CornerFamily::PeriodOne {
            d: ws.d(),
            block: CMatrix::identity(1, 1),
        }),
        WeightKind::EventuallyPeriodic {
            period,
            tail_start,
            blocks,
        } => {
            if *period != 1 {
                return Err(format!(
                    "no exact corner model for an eventually periodic tail of period {period}"
                ));
            }
            let block = blocks[*tail_start].clone();
            if !cmat::is_hermitian(&block, HERMITIAN_TOL) {
                return Err("the period-one tail block must be Hermitian".to_string());
            }
            let scale = cmat::op_norm(&block).max(1.0);
            if cmat::min_eig_hermitian(&block) <= POSITIVE_TOL * scale {
                return Err("the period-one tail block must be positive definite".to_string());
            }
            Ok(CornerFamily::PeriodOne {
                d: ws.d(),
                block,
            })
        }
        WeightKind::ExplicitList(_) => Err(
            "an explicit block list carries no periodicity certificate for the tail".to_string(),
        ),
    }
}

/// Direct-limit connecting map on concrete coordinates: views `x` as an
/// element of `M_D (x) M_(corner_dim)` and inserts an identity factor of
/// size `insert_dim` between the two, giving an element of
/// `M_D (x) M_(insert_dim) (x) M_(corner_dim)`.
pub fn connecting_map(x: &CMatrix, corner_dim: usize, insert_dim: usize) -> Result<CMatrix> {
    if !x.is_square() {
        return Err(Error::DimensionMismatch("connecting map input must be square".to_string()));
    }
    if corner_dim == 0 || insert_dim == 0 {
        return Err(Error::DimensionMismatch(
            "corner and inserted dimensions must be positive".to_string(),
        ));
    }
    let n = x.nrows();
    if n % corner_dim != 0 {
        return Err(Error::DimensionMismatch(format!(
            "input dimension {n} is not a multiple of the corner dimension {corner_dim}"
        )));
    }
    let outer = n / corner_dim;
    let out_n = outer * insert_dim * corner_dim;
    if out_n > matalg::MAX_AMBIENT * 64 {
        return Err(Error::DimensionTooLarge(format!(
            "connecting map output dimension {out_n} exceeds the supported scale"
        )));
    }
    let mut out = CMatrix::zeros(out_n, out_n);
    for u in 0..outer {
        for v in 0..outer {
            let block = x.view((u * corner_dim, v * corner_dim), (corner_dim, corner_dim));
            for r in 0..insert_dim {
                let ro = (u * insert_dim + r) * corner_dim;
                let co = (v * insert_dim + r) * corner_dim;
                out.view_mut((ro, co), (corner_dim, corner_dim)).copy_from(&block);
            }
        }
    }
    Ok(out)
}

/// One window of the corner truncation probe.
#[derive(Debug, Clone, Copy)]
pub struct ProbePoint {
    /// First level of the window.
    pub window_start: usize,
    /// Ambient dimension of the direct-summed corner compressions.
    pub ambient_dim: usize,
    /// Dimension of the algebra generated by the compressed generators.
    pub algebra_dim: usize,
}

/// Estimates the corner algebra from finite levels.  For each window of one
/// period `{k, ..., k+p-1}` the corner generators
/// `S_(1^m) f(Z) S_(1^(q-m)) S_(1^q)*` (monomials `f` up to degree three,
/// `0 <= m <= q`, `q = p-1`) are compressed to the corner of words starting
/// with `1^q`, direct-summed over the window, and the dimension of the
/// algebra they generate is reported.  A stabilizing dimension sequence is
/// evidence of a finite-dimensional corner algebra.
pub fn corner_probe_series(
    ws: &WeightSpec,
    period: usize,
    max_level: usize,
    tol: f64,
) -> Result<Vec<ProbePoint>> {
    if period == 0 {
        return Err(Error::InvalidSpec("period must be at least 1".to_string()));
    }
    let d = ws.d();
    let q = period - 1;
    if max_level < q + period {
        return Err(Error::TruncationTooSmall(format!(
            "need K >= 2p - 1, got K={max_level}, p={period}"
        )));
    }

    // Powers 0..=3 of every weight block the windows touch.
    let top = max_level;
    let mut powers: Vec<Vec<CMatrix>> = Vec::with_capacity(top + 1);
    for level in 0..=top {
        let z = ws.block(level)?;
        let n = z.nrows();
        let mut pw = Vec::with_capacity(4);
        pw.push(CMatrix::identity(n, n));
        for t in 1..4 {
            let next = &pw[t - 1] * &z;
            pw.push(next);
        }
        powers.push(pw);
    }

    let mut series = Vec::new();
    for k in q..=(max_level + 1 - period) {
        let corner_dims: Vec<usize> = (k..k + period)
            .map(|j| word::level_dim(d, j - q))
            .collect::<Result<_>>()?;
        let ambient: usize = corner_dims.iter().sum();
        if ambient > matalg::MAX_AMBIENT {
            return Err(Error::DimensionTooLarge(format!(
                "probe window starting at level {k} needs ambient dimension {ambient}"
            )));
        }
        let offsets: Vec<usize> = corner_dims
            .iter()
            .scan(0usize, |acc, &d_| {
                let o = *acc;
                *acc += d_;
                Some(o)
            })
            .collect();

        let mut generators = Vec::with_capacity(4 * (q + 1));
        for m in 0..=q {
            for deg in 0..4usize {
                let mut g = CMatrix::zeros(ambient, ambient);
                for (w, j) in (k..k + period).enumerate() {
                    let cd = corner_dims[w];
                    let block = &powers[j - m][deg];
                    let corner = cmat::select(
                        block,
                        &(0..cd).collect::<Vec<_>>(),
                        &(0..cd).collect::<Vec<_>>(),
                    );
                    g.view_mut((offsets[w], offsets[w]), (cd, cd)).copy_from(&corner);
                }
                generators.push(g);
            }
        }
        let algebra = generate_algebra(&generators, ambient, tol)?;
        series.push(ProbePoint {
            window_start: k,
            ambient_dim: ambient,
            algebra_dim: algebra.dim(),
        });
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matalg::RANK_TOL;

    fn diag(entries: &[f64]) -> CMatrix {
        let n = entries.len();
        CMatrix::from_fn(n, n, |i, j| if i == j { cr(entries[i]) } else { cr(0.0) })
    }

    fn family_two_block(a: CMatrix, b: CMatrix) -> CornerFamily {
        CornerFamily::AlternatingPeriodTwo {
            tail_start: 1,
            a,
            b,
        }
    }

    fn full_grid(model: &CornerAlgebraModel, w: &CMatrix) -> CornerElement {
        let outer = model.outer_dim();
        let grid: Vec<Vec<CMatrix>> = (0..outer)
            .map(|_| (0..outer).map(|_| w.clone()).collect())
            .collect();
        CornerElement::from_outer_blocks(model, &grid).unwrap()
    }

    #[test]
    fn model_dimensions_for_three_tails() {
        let m2 = build_corner_model(
            &family_two_block(
                diag(&[3.0, 1.0]),
                CMatrix::from_row_slice(2, 2, &[cr(2.0), cr(1.0), cr(1.0), cr(2.0)]),
            ),
            DEFAULT_MODEL_SEED,
            RANK_TOL,
        )
        .unwrap();
        assert_eq!(m2.algebra.dim(), 4);
        assert_eq!(m2.report.block_sizes, vec![2]);

        let c2 = build_corner_model(
            &family_two_block(diag(&[1.0, 2.0]), diag(&[2.0, 1.0])),
            DEFAULT_MODEL_SEED,
            RANK_TOL,
        )
        .unwrap();
        assert_eq!(c2.algebra.dim(), 2);
        assert_eq!(c2.report.block_sizes, vec![1, 1]);

        let c3 = build_corner_model(
            &family_two_block(diag(&[3.0, 3.0]), diag(&[3.0, 1.0])),
            DEFAULT_MODEL_SEED,
            RANK_TOL,
        )
        .unwrap();
        assert_eq!(c3.algebra.dim(), 3);
        assert_eq!(c3.report.block_sizes, vec![1, 1, 1]);
    }

    #[test]
    fn swap_cycle_structure() {
        let model = build_corner_model(
            &family_two_block(diag(&[1.0, 2.0]), diag(&[2.0, 1.0])),
            DEFAULT_MODEL_SEED,
            RANK_TOL,
        )
        .unwrap();
        let action = swap_action(&model).unwrap();
        assert_eq!(action.permutation, vec![1, 0]);
        assert_eq!(action.orbits(), vec![vec![0, 1]]);

        let model = build_corner_model(
            &family_two_block(diag(&[3.0, 3.0]), diag(&[3.0, 1.0])),
            DEFAULT_MODEL_SEED,
            RANK_TOL,
        )
        .unwrap();
        let action = swap_action(&model).unwrap();
        // The canonical first summand is fixed; the other two trade places.
        assert_eq!(action.permutation[0], 0);
        assert_eq!(action.orbits(), vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn swap_exchanges_generators() {
        let model = build_corner_model(
            &family_two_block(
                diag(&[3.0, 1.0]),
                CMatrix::from_row_slice(2, 2, &[cr(2.0), cr(1.0), cr(1.0), cr(2.0)]),
            ),
            DEFAULT_MODEL_SEED,
            RANK_TOL,
        )
        .unwrap();
        let action = swap_action(&model).unwrap();
        let gen_b = model.gen_b.clone().unwrap();
        assert!(cmat::frob_norm(&(action.apply(&model.gen_a) - &gen_b)) < 1e-12);
        assert!(cmat::frob_norm(&(action.apply(&gen_b) - &model.gen_a)) < 1e-12);
    }

    #[test]
    fn compression_golden_lines() {
        // Diagonal-swap tail: J_1 and J_2 coordinates trade places.
        let model = build_corner_model(
            &family_two_block(diag(&[1.0, 2.0]), diag(&[2.0, 1.0])),
            DEFAULT_MODEL_SEED,
            RANK_TOL,
        )
        .unwrap();
        let gen_b = model.gen_b.clone().unwrap();
        let j1 = &gen_b * cr(2.0) - &model.gen_a;
        let j2 = &model.gen_a * cr(2.0) - &gen_b;
        for (input, expect) in [(j1.clone(), j2.clone()), (j2, j1)] {
            let x = full_grid(&model, &input);
            for i in 0..2 {
                for j in 0..2 {
                    let out = compress(&model, i, j, &x).unwrap();
                    for t in 0..2 {
                        assert!(cmat::frob_norm(&(out.block(t, t) - &expect)) < 1e-10);
                    }
                    assert!(cmat::frob_norm(&out.block(0, 1)) < 1e-12);
                }
            }
        }

        // Scalar-plus-diagonal tail: one invariant line, two trading places.
        let model = build_corner_model(
            &family_two_block(diag(&[3.0, 3.0]), diag(&[3.0, 1.0])),
            DEFAULT_MODEL_SEED,
            RANK_TOL,
        )
        .unwrap();
        let gen_b = model.gen_b.clone().unwrap();
        let ident = CMatrix::identity(4, 4);
        let j1 = &model.gen_a + &gen_b - &ident * cr(4.0);
        let j2 = &ident * cr(3.0) - &gen_b;
        let j3 = &ident * cr(3.0) - &model.gen_a;
        for (input, expect) in [(j1.clone(), j1), (j2.clone(), j3.clone()), (j3, j2)] {
            let x = full_grid(&model, &input);
            let out = compress(&model, 0, 1, &x).unwrap();
            for t in 0..2 {
                assert!(cmat::frob_norm(&(out.block(t, t) - &expect)) < 1e-10);
            }
        }
    }

    #[test]
    fn compression_unit_line() {
        let model = build_corner_model(
            &family_two_block(diag(&[1.0, 2.0]), diag(&[2.0, 1.0])),
            DEFAULT_MODEL_SEED,
            RANK_TOL,
        )
        .unwrap();
        let inner = model.ambient_dim();
        let ident = CMatrix::identity(inner, inner);
        let zero = CMatrix::zeros(inner, inner);
        // x = e_(0,1) (x) I.
        let x = CornerElement::from_outer_blocks(
            &model,
            &[vec![zero.clone(), ident.clone()], vec![zero.clone(), zero.clone()]],
        )
        .unwrap();
        let hit = compress(&model, 0, 1, &x).unwrap();
        assert!(cmat::frob_norm(&(hit.block(0, 0) - &ident)) < 1e-12);
        let miss = compress(&model, 1, 0, &x).unwrap();
        assert!(cmat::frob_norm(miss.matrix()) < 1e-12);
    }

    #[test]
    fn corner_element_rejects_outside_span() {
        let model = build_corner_model(
            &family_two_block(diag(&[1.0, 2.0]), diag(&[2.0, 1.0])),
            DEFAULT_MODEL_SEED,
            RANK_TOL,
        )
        .unwrap();
        // e_{01} is not in the diagonal model span.
        let bad = cmat::e_matrix(4, 0, 1);
        let err = full_grid_err(&model, &bad);
        assert!(matches!(err, Error::OutsideSpan { .. }));
    }

    fn full_grid_err(model: &CornerAlgebraModel, w: &CMatrix) -> Error {
        let outer = model.outer_dim();
        let grid: Vec<Vec<CMatrix>> = (0..outer)
            .map(|_| (0..outer).map(|_| w.clone()).collect())
            .collect();
        CornerElement::from_outer_blocks(model, &grid).unwrap_err()
    }

    #[test]
    fn simplicity_three_ways() {
        let rep = decide_simplicity(
            &family_two_block(
                diag(&[3.0, 1.0]),
                CMatrix::from_row_slice(2, 2, &[cr(2.0), cr(1.0), cr(1.0), cr(2.0)]),
            ),
            DEFAULT_MODEL_SEED,
            RANK_TOL,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Simple);
        assert_eq!(rep.block_sizes, vec![2]);

        let rep = decide_simplicity(
            &family_two_block(diag(&[1.0, 2.0]), diag(&[2.0, 1.0])),
            DEFAULT_MODEL_SEED,
            RANK_TOL,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Simple);
        assert_eq!(rep.orbits, vec![vec![0, 1]]);

        let rep = decide_simplicity(
            &family_two_block(diag(&[3.0, 3.0]), diag(&[3.0, 1.0])),
            DEFAULT_MODEL_SEED,
            RANK_TOL,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::NotSimple);
        let witness = rep.witness.unwrap();
        assert_eq!(witness.members, vec![0]);
    }

    #[test]
    fn invariant_masks_match_orbit_unions() {
        let model = build_corner_model(
            &family_two_block(diag(&[3.0, 3.0]), diag(&[3.0, 1.0])),
            DEFAULT_MODEL_SEED,
            RANK_TOL,
        )
        .unwrap();
        let masks = invariant_ideals(&model).unwrap();
        let sets: Vec<Vec<usize>> = masks.iter().map(|m| m.members.clone()).collect();
        assert_eq!(sets, vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn period_one_decisions() {
        // Multiple eigenvalues with d > 1: never simple, first summand witnesses.
        let rep = decide_simplicity(
            &CornerFamily::PeriodOne {
                d: 2,
                block: diag(&[1.0, 2.0]),
            },
            DEFAULT_MODEL_SEED,
            RANK_TOL,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::NotSimple);
        assert_eq!(rep.block_sizes, vec![1, 1]);
        assert_eq!(rep.witness.unwrap().members, vec![0]);

        // Single eigenvalue with d > 1: the unweighted case, simple.
        let rep = decide_simplicity(
            &CornerFamily::PeriodOne {
                d: 2,
                block: CMatrix::identity(1, 1),
            },
            DEFAULT_MODEL_SEED,
            RANK_TOL,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::Simple);

        // d = 1 is never simple, with or without an ideal witness.
        let rep = decide_simplicity(
            &CornerFamily::PeriodOne {
                d: 1,
                block: diag(&[1.0, 2.0]),
            },
            DEFAULT_MODEL_SEED,
            RANK_TOL,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::NotSimple);
        assert!(rep.witness.is_some());

        let rep = decide_simplicity(
            &CornerFamily::PeriodOne {
                d: 1,
                block: CMatrix::identity(1, 1),
            },
            DEFAULT_MODEL_SEED,
            RANK_TOL,
        )
        .unwrap();
        assert_eq!(rep.verdict, Verdict::NotSimple);
        assert!(rep.witness.is_none());
    }

    #[test]
    fn connecting_map_inserts_identity() {
        // x = e_(01) (x) w in M_2 (x) M_2.
        let w = CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(2.0), cr(3.0), cr(4.0)]);
        let mut x = CMatrix::zeros(4, 4);
        x.view_mut((0, 2), (2, 2)).copy_from(&w);
        let y = connecting_map(&x, 2, 3).unwrap();
        assert_eq!(y.nrows(), 12);
        // Expect e_(01) (x) I_3 (x) w.
        for r in 0..3 {
            let block = y.view((r * 2, 6 + r * 2), (2, 2)).into_owned();
            assert!(cmat::frob_norm(&(block - &w)) < 1e-15);
        }
        assert!((cmat::frob_norm(&y) - 3.0f64.sqrt() * cmat::frob_norm(&x)).abs() < 1e-12);
    }

    #[test]
    fn probe_stabilizes_on_alternating_tails() {
        let cases: [(CMatrix, CMatrix, usize); 3] = [
            (
                diag(&[3.0, 1.0]),
                CMatrix::from_row_slice(2, 2, &[cr(2.0), cr(1.0), cr(1.0), cr(2.0)]),
                4,
            ),
            (diag(&[1.0, 2.0]), diag(&[2.0, 1.0]), 2),
            (diag(&[3.0, 3.0]), diag(&[3.0, 1.0]), 3),
        ];
        for (a, b, want) in cases {
            let ws = WeightSpec::alternating_tail(1, a, b).unwrap();
            let series = corner_probe_series(&ws, 2, 6, RANK_TOL).unwrap();
            let tail: Vec<usize> = series
                .iter()
                .filter(|p| p.window_start >= 2)
                .map(|p| p.algebra_dim)
                .collect();
            assert!(!tail.is_empty());
            assert!(tail.iter().all(|&d_| d_ == want), "dims {tail:?} want {want}");
        }
    }

    /// The probe computes its compressed generators block by block; this
    /// pins them against genuine truncated-operator products.
    #[test]
    fn probe_generators_match_operator_route() {
        use crate::fock::{creation_word_op, weight_op, TruncatedFockOperator};
        use crate::word::Word;

        let ws = WeightSpec::alternating_tail(
            1,
            diag(&[3.0, 1.0]),
            CMatrix::from_row_slice(2, 2, &[cr(2.0), cr(1.0), cr(1.0), cr(2.0)]),
        )
        .unwrap();
        let q = 1usize;
        let max_level = 4usize;
        let z = weight_op(&ws, max_level).unwrap();
        for j in 2..=max_level {
            for m in 0..=q {
                for deg in 0..4usize {
                    let mut coeffs = vec![0.0f64; deg + 1];
                    coeffs[deg] = 1.0;
                    let fz = TruncatedFockOperator::from_matrix(
                        2,
                        max_level,
                        cmat::mat_poly(z.matrix(), &coeffs),
                    )
                    .unwrap();
                    let up = creation_word_op(2, max_level, &Word::new(&vec![1u8; m], 2).unwrap())
                        .unwrap();
                    let mid =
                        creation_word_op(2, max_level, &Word::new(&vec![1u8; q - m], 2).unwrap())
                            .unwrap();
                    let down = creation_word_op(2, max_level, &Word::new(&vec![1u8; q], 2).unwrap())
                        .unwrap()
                        .adjoint();
                    let op = &(&(&up * &fz) * &mid) * &down;
                    let level_block = op.block(j, j);
                    let cd = word::level_dim(2, j - q).unwrap();
                    let idx: Vec<usize> = (0..cd).collect();
                    let operator_corner = cmat::select(&level_block, &idx, &idx);

                    let zj = ws.block(j - m).unwrap();
                    let blockwise = cmat::select(&cmat::mat_poly(&zj, &coeffs), &idx, &idx);
                    assert!(
                        cmat::frob_norm(&(&operator_corner - &blockwise)) < 1e-12,
                        "mismatch at level {j}, m={m}, degree {deg}"
                    );
                }
            }
        }
    }
}
