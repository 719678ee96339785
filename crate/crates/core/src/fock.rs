//! Operators on the truncated Fock space: creation operators, weight
//! operators built from a level-indexed rule, gauge projections, weight
//! positivization, and defect measurements for asymptotic periodicity of the
//! weight tail.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;


use crate::cmat::{self, cr, CMatrix};
use crate::error::{Error, Result};
use crate::word::{self, Word};

/// Relative singular-value threshold below which a block counts as singular.
pub const SINGULARITY_TOL: f64 = 1e-12;

/// Relative tolerance for Hermitian input validation.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Relative tolerance for positive-definiteness validation.
pub const POSITIVE_TOL: f64 = 1e-10;

/// Largest materialized weight block (dense `d^k x d^k`).
pub const MAX_BLOCK_DIM: usize = 4096;

/// Largest truncated-space dimension for full operator construction.
pub const MAX_SPACE_DIM: usize = 10_000;

fn check_block_dim(n: usize) -> Result<()> {
    if n > MAX_BLOCK_DIM {
        return Err(Error::DimensionTooLarge(format!(
            "weight block dimension {n} exceeds the supported {MAX_BLOCK_DIM}"
        )));
    }
    Ok(())
}

fn singular_extremes(m: &CMatrix) -> (f64, f64) {
    match cmat::polar(m) {
        Ok(parts) => (parts.sigma_min, parts.sigma_max),
        Err(_) => (0.0, 0.0),
    }
}

fn check_invertible(m: &CMatrix, level: usize) -> Result<()> {
    let (smin, smax) = singular_extremes(m);
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    if !(ratio > SINGULARITY_TOL) {
        return Err(Error::SingularWeight { level, ratio });
    }
    Ok(())
}

/// `I_t (x) m` without forming the identity factor explicitly.
fn kron_identity_left(t: usize, m: &CMatrix) -> CMatrix {
    let (r, c_) = m.shape();
    let mut out = CMatrix::zeros(t * r, t * c_);
    for b in 0..t {
        out.view_mut((b * r, b * c_), (r, c_)).copy_from(m);
    }
    out
}

/// Rule producing one invertible weight block `Z_k` in `M_{d^k}` per level.
#[derive(Debug, Clone)]
pub enum WeightKind {
    /// `Z_k = I` for every level.
    Identity,
    /// Finitely many explicit blocks `Z_0, ..., Z_L`.
    ExplicitList(Vec<CMatrix>),
    /// Blocks `Z_0, ..., Z_{N+p-1}` given explicitly; beyond them the exact
    /// tail rule `Z_k = I_{d^p} (x) Z_{k-p}`.
    EventuallyPeriodic {
        period: usize,
        tail_start: usize,
        blocks: Vec<CMatrix>,
    },
    /// The alternating two-block family over `d = 2`: identity blocks below
    /// level `N`, then `Z_{N+m} = I_{2^m} (x) (A if m even, B if m odd)`.
    AlternatingTail {
        tail_start: usize,
        a: CMatrix,
        b: CMatrix,
    },
}

/// A weight sequence: the alphabet size `d` together with a block rule.
#[derive(Debug, Clone)]
pub struct WeightSpec {
    d: usize,
    kind: WeightKind,
}

/// Bounds of the materialized weight prefix.
#[derive(Debug, Clone, Copy)]
pub struct PrefixBounds {
    /// Smallest singular value over the checked levels.
    pub lower: f64,
    /// Largest operator norm over the checked levels.
    pub upper: f64,
}

impl WeightSpec {
    /// The unweighted sequence `Z_k = I`.
    pub fn identity(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidSpec("alphabet size d must be at least 1".to_string()));
        }
        Ok(WeightSpec {
            d,
            kind: WeightKind::Identity,
        })
    }

    fn validate_block_shape(d: usize, k: usize, m: &CMatrix) -> Result<()> {
        let n = word::level_dim(d, k)?;
        if m.shape() != (n, n) {
            return Err(Error::InvalidSpec(format!(
                "block at level {k} must be {n}x{n}, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        check_block_dim(n)
    }

    fn validate_degree_zero(blocks: &[CMatrix]) -> Result<()> {
        let z0 = &blocks[0];
        if z0.shape() != (1, 1) || cmat::cabs(z0[(0, 0)] - cr(1.0)) > 1e-12 {
            return Err(Error::InvalidSpec(
                "the degree-zero block must be the 1x1 scalar 1".to_string(),
            ));
        }
        Ok(())
    }

    /// Weight sequence from explicit blocks `Z_0, ..., Z_L`.
    pub fn explicit(d: usize, blocks: Vec<CMatrix>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidSpec("alphabet size d must be at least 1".to_string()));
        }
        if blocks.is_empty() {
            return Err(Error::InvalidSpec("need at least the degree-zero block".to_string()));
        }
        Self::validate_degree_zero(&blocks)?;
        for (k, m) in blocks.iter().enumerate() {
            Self::validate_block_shape(d, k, m)?;
            check_invertible(m, k)?;
        }
        Ok(WeightSpec {
            d,
            kind: WeightKind::ExplicitList(blocks),
        })
    }

    /// Weight sequence with prefix `Z_0, ..., Z_{N+p-1}` and the exact tail
    /// rule `Z_k = I_{d^p} (x) Z_{k-p}` from level `N + p` on.
    pub fn eventually_periodic(
        d: usize,
        period: usize,
        tail_start: usize,
        blocks: Vec<CMatrix>,
    ) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidSpec("alphabet size d must be at least 1".to_string()));
        }
        if period == 0 {
            return Err(Error::InvalidSpec("period must be at least 1".to_string()));
        }
        if blocks.len() != tail_start + period {
            return Err(Error::InvalidSpec(format!(
                "need exactly tail_start + period = {} blocks, got {}",
                tail_start + period,
                blocks.len()
            )));
        }
        Self::validate_degree_zero(&blocks)?;
        for (k, m) in blocks.iter().enumerate() {
            Self::validate_block_shape(d, k, m)?;
            check_invertible(m, k)?;
        }
        Ok(WeightSpec {
            d,
            kind: WeightKind::EventuallyPeriodic {
                period,
                tail_start,
                blocks,
            },
        })
    }

    /// The alternating two-block family: `d = 2`, identity blocks below level
    /// `tail_start`, block `A` there, `I_2 (x) B` next, and the period-two
    /// tail rule afterwards.  `A` and `B` must be positive definite on
    /// `C^(2^tail_start)`.
    pub fn alternating_tail(tail_start: usize, a: CMatrix, b: CMatrix) -> Result<Self> {
        let n = word::level_dim(2, tail_start)?;
        check_block_dim(n)?;
        for (name, m) in [("A", &a), ("B", &b)] {
            if m.shape() != (n, n) {
                return Err(Error::InvalidSpec(format!(
                    "{name} must be {n}x{n} for tail_start {tail_start}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if !cmat::is_hermitian(m, HERMITIAN_TOL) {
                return Err(Error::NotHermitian(format!("tail block {name}")));
            }
            let scale = cmat::op_norm(m).max(1.0);
            if cmat::min_eig_hermitian(m) <= POSITIVE_TOL * scale {
                return Err(Error::NotPositiveDefinite(format!("tail block {name}")));
            }
        }
        Ok(WeightSpec {
            d: 2,
            kind: WeightKind::AlternatingTail { tail_start, a, b },
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// Materializes the block `Z_k`.
    pub fn block(&self, k: usize) -> Result<CMatrix> {
        let n = word::level_dim(self.d, k)?;
        check_block_dim(n)?;
        match &self.kind {
            WeightKind::Identity => Ok(CMatrix::identity(n, n)),
            WeightKind::ExplicitList(blocks) => blocks.get(k).cloned().ok_or_else(|| {
                Error::LevelOutOfRange {
                    level: k,
                    reason: format!("explicit list ends at level {}", blocks.len() - 1),
                }
            }),
            WeightKind::EventuallyPeriodic {
                period,
                tail_start,
                blocks,
            } => {
                if k < blocks.len() {
                    Ok(blocks[k].clone())
                } else {
                    let base = tail_start + (k - tail_start) % period;
                    let reps = word::level_dim(self.d, k - base)?;
                    Ok(kron_identity_left(reps, &blocks[base]))
                }
            }
            WeightKind::AlternatingTail { tail_start, a, b } => {
                if k < *tail_start {
                    Ok(CMatrix::identity(n, n))
                } else {
                    let m = k - tail_start;
                    let reps = word::level_dim(2, m)?;
                    let base = if m % 2 == 0 { a } else { b };
                    Ok(kron_identity_left(reps, base))
                }
            }
        }
    }

    /// Checks invertibility and boundedness of the blocks up to level
    /// `max_level` and reports the extreme values found.
    pub fn validate_prefix(&self, max_level: usize) -> Result<PrefixBounds> {
        let mut lower = f64::INFINITY;
        let mut upper = 0.0f64;
        for k in 0..=max_level {
            let z = self.block(k)?;
            check_invertible(&z, k)?;
            let (smin, smax) = singular_extremes(&z);
            lower = lower.min(smin);
            upper = upper.max(smax);
        }
        Ok(PrefixBounds { lower, upper })
    }
}

/// A complex matrix on the truncated Fock space, carrying the grading by word
/// length.  Arithmetic between operators on different spaces panics; data
/// errors are reported by the constructors.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedFockOperator {
    d: usize,
    max_level: usize,
    mat: CMatrix,
}

impl TruncatedFockOperator {
    pub fn zero(d: usize, max_level: usize) -> Result<Self> {
        let n = checked_space_dim(d, max_level)?;
        Ok(TruncatedFockOperator {
            d,
            max_level,
            mat: CMatrix::zeros(n, n),
        })
    }

    pub fn identity(d: usize, max_level: usize) -> Result<Self> {
        let n = checked_space_dim(d, max_level)?;
        Ok(TruncatedFockOperator {
            d,
            max_level,
            mat: CMatrix::identity(n, n),
        })
    }

    /// Wraps an existing matrix of the right dimension.
    pub fn from_matrix(d: usize, max_level: usize, mat: CMatrix) -> Result<Self> {
        let n = checked_space_dim(d, max_level)?;
        if mat.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "matrix must be {n}x{n} for d={d}, K={max_level}, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(TruncatedFockOperator { d, max_level, mat })
    }

    /// Projection onto the words of length `k`.
    pub fn level_projection(d: usize, max_level: usize, k: usize) -> Result<Self> {
        if k > max_level {
            return Err(Error::LevelOutOfRange {
                level: k,
                reason: format!("truncation ends at level {max_level}"),
            });
        }
        let mut op = Self::zero(d, max_level)?;
        let off = word::level_offset(d, k)?;
        let n = word::level_dim(d, k)?;
        for i in 0..n {
            op.mat[(off + i, off + i)] = cr(1.0);
        }
        Ok(op)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Copy of the block mapping level `col_level` into level `row_level`.
    pub fn block(&self, row_level: usize, col_level: usize) -> CMatrix {
        assert!(
            row_level <= self.max_level && col_level <= self.max_level,
            "block level out of range"
        );
        let ro = word::level_offset(self.d, row_level).expect("validated dimension");
        let co = word::level_offset(self.d, col_level).expect("validated dimension");
        let rd = word::level_dim(self.d, row_level).expect("validated dimension");
        let cd = word::level_dim(self.d, col_level).expect("validated dimension");
        self.mat.view((ro, co), (rd, cd)).into_owned()
    }

    /// Overwrites the block mapping level `col_level` into level `row_level`.
    pub fn set_block(&mut self, row_level: usize, col_level: usize, block: &CMatrix) -> Result<()> {
        let rd = word::level_dim(self.d, row_level)?;
        let cd = word::level_dim(self.d, col_level)?;
        if row_level > self.max_level || col_level > self.max_level {
            return Err(Error::LevelOutOfRange {
                level: row_level.max(col_level),
                reason: format!("truncation ends at level {}", self.max_level),
            });
        }
        if block.shape() != (rd, cd) {
            return Err(Error::DimensionMismatch(format!(
                "block for levels ({row_level}, {col_level}) must be {rd}x{cd}"
            )));
        }
        let ro = word::level_offset(self.d, row_level)?;
        let co = word::level_offset(self.d, col_level)?;
        self.mat.view_mut((ro, co), (rd, cd)).copy_from(block);
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        TruncatedFockOperator {
            d: self.d,
            max_level: self.max_level,
            mat: self.mat.adjoint(),
        }
    }

    pub fn scale(&self, s: crate::cmat::Cx) -> Self {
        TruncatedFockOperator {
            d: self.d,
            max_level: self.max_level,
            mat: &self.mat * s,
        }
    }

    pub fn op_norm(&self) -> f64 {
        cmat::op_norm(&self.mat)
    }

    fn assert_same_space(&self, rhs: &Self) {
        assert!(
            self.d == rhs.d && self.max_level == rhs.max_level,
            "operators live on different truncated spaces"
        );
    }
}

fn checked_space_dim(d: usize, max_level: usize) -> Result<usize> {
    if d == 0 {
        return Err(Error::InvalidSpec("alphabet size d must be at least 1".to_string()));
    }
    let n = word::space_dim(d, max_level)?;
    if n > MAX_SPACE_DIM {
        return Err(Error::DimensionTooLarge(format!(
            "truncated space dimension {n} exceeds the supported {MAX_SPACE_DIM}"
        )));
    }
    Ok(n)
}

impl core::ops::Mul for &TruncatedFockOperator {
    type Output = TruncatedFockOperator;
    fn mul(self, rhs: Self) -> TruncatedFockOperator {
        self.assert_same_space(rhs);
        TruncatedFockOperator {
            d: self.d,
            max_level: self.max_level,
            mat: &self.mat * &rhs.mat,
        }
    }
}

impl core::ops::Add for &TruncatedFockOperator {
    type Output = TruncatedFockOperator;
    fn add(self, rhs: Self) -> TruncatedFockOperator {
        self.assert_same_space(rhs);
        TruncatedFockOperator {
            d: self.d,
            max_level: self.max_level,
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl core::ops::Sub for &TruncatedFockOperator {
    type Output = TruncatedFockOperator;
    fn sub(self, rhs: Self) -> TruncatedFockOperator {
        self.assert_same_space(rhs);
        TruncatedFockOperator {
            d: self.d,
            max_level: self.max_level,
            mat: &self.mat - &rhs.mat,
        }
    }
}

/// Creation operator for one letter: sends the basis word `w` of length
/// `k < K` to `letter . w` and kills the top level.
pub fn creation_op(d: usize, max_level: usize, letter: u8) -> Result<TruncatedFockOperator> {
    if letter == 0 || letter as usize > d {
        return Err(Error::LetterOutOfRange { letter, d });
    }
    let mut op = TruncatedFockOperator::zero(d, max_level)?;
    for k in 0..max_level {
        let n = word::level_dim(d, k)?;
        let src = word::level_offset(d, k)?;
        let dst = word::level_offset(d, k + 1)? + (letter as usize - 1) * n;
        for i in 0..n {
            op.mat[(dst + i, src + i)] = cr(1.0);
        }
    }
    Ok(op)
}

/// Creation operator for a word: the product of the letter operators, sending
/// `w` to `alpha . w` whenever the result still fits in the truncation.
pub fn creation_word_op(d: usize, max_level: usize, alpha: &Word) -> Result<TruncatedFockOperator> {
    for &l in alpha.letters() {
        if l == 0 || l as usize > d {
            return Err(Error::LetterOutOfRange { letter: l, d });
        }
    }
    let mut op = TruncatedFockOperator::zero(d, max_level)?;
    let m = alpha.len();
    if m > max_level {
        return Ok(op);
    }
    let alpha_idx = alpha.index_within_level(d);
    for k in 0..=(max_level - m) {
        let n = word::level_dim(d, k)?;
        let src = word::level_offset(d, k)?;
        let dst = word::level_offset(d, k + m)? + alpha_idx * n;
        for i in 0..n {
            op.mat[(dst + i, src + i)] = cr(1.0);
        }
    }
    Ok(op)
}

/// Block-diagonal operator from one block per level.
pub fn block_diag_op(
    d: usize,
    max_level: usize,
    blocks: &[CMatrix],
) -> Result<TruncatedFockOperator> {
    if blocks.len() != max_level + 1 {
        return Err(Error::DimensionMismatch(format!(
            "need {} blocks for K={max_level}, got {}",
            max_level + 1,
            blocks.len()
        )));
    }
    let mut op = TruncatedFockOperator::zero(d, max_level)?;
    for (k, b) in blocks.iter().enumerate() {
        op.set_block(k, k, b)?;
    }
    Ok(op)
}

/// The weight operator: block-diagonal with blocks `Z_0, ..., Z_K`.
pub fn weight_op(ws: &WeightSpec, max_level: usize) -> Result<TruncatedFockOperator> {
    let mut blocks = Vec::with_capacity(max_level + 1);
    for k in 0..=max_level {
        blocks.push(ws.block(k)?);
    }
    block_diag_op(ws.d(), max_level, &blocks)
}

/// Keeps exactly the blocks mapping level `k` to level `k + j`; out-of-range
/// `j` gives the zero operator.
pub fn gauge_project(x: &TruncatedFockOperator, j: isize) -> TruncatedFockOperator {
    let mut out = TruncatedFockOperator::zero(x.d, x.max_level).expect("shape already validated");
    for col in 0..=x.max_level {
        let row = col as isize + j;
        if row < 0 || row > x.max_level as isize {
            continue;
        }
        let row = row as usize;
        let b = x.block(row, col);
        out.set_block(row, col, &b).expect("block shapes agree");
    }
    out
}

/// Result of positivizing a weight sequence: positive blocks `Z'_k` and the
/// block-diagonal unitary implementing the conjugation.
#[derive(Debug, Clone)]
pub struct Positivized {
    d: usize,
    max_level: usize,
    /// Positive blocks, one per level.
    pub zprime: Vec<CMatrix>,
    /// Unitary blocks, one per level.
    pub unitary: Vec<CMatrix>,
}

impl Positivized {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    /// Block-diagonal operator with the positive blocks.
    pub fn weight_op(&self) -> Result<TruncatedFockOperator> {
        block_diag_op(self.d, self.max_level, &self.zprime)
    }

    /// Block-diagonal unitary.
    pub fn unitary_op(&self) -> Result<TruncatedFockOperator> {
        block_diag_op(self.d, self.max_level, &self.unitary)
    }

    /// Smallest eigenvalue of each positive block.
    pub fn min_eigs(&self) -> Vec<f64> {
        self.zprime.iter().map(cmat::min_eig_hermitian).collect()
    }

    /// Largest residual `|| U* (Z S_i) U - Z' S_i ||` over the letters.
    pub fn conjugation_residual(&self, ws: &WeightSpec) -> Result<f64> {
        let z = weight_op(ws, self.max_level)?;
        let zp = self.weight_op()?;
        let u = self.unitary_op()?;
        let u_adj = u.adjoint();
        let mut worst = 0.0f64;
        for letter in 1..=self.d as u8 {
            let s = creation_op(self.d, self.max_level, letter)?;
            let lhs = &(&u_adj * &(&z * &s)) * &u;
            let rhs = &zp * &s;
            worst = worst.max((&lhs - &rhs).op_norm());
        }
        Ok(worst)
    }
}

/// Conjugates the weight sequence to positive blocks level by level: the
/// unitary at level `k` is the polar factor of `Z_k (I_d (x) U_{k-1})`, and
/// the positive block is the corresponding positive part.
pub fn positivize(ws: &WeightSpec, max_level: usize) -> Result<Positivized> {
    let d = ws.d();
    let mut unitary: Vec<CMatrix> = vec![CMatrix::identity(1, 1)];
    let mut zprime: Vec<CMatrix> = vec![ws.block(0)?];
    for k in 1..=max_level {
        let zk = ws.block(k)?;
        let lifted = kron_identity_left(d, &unitary[k - 1]);
        let parts = cmat::polar(&(&zk * &lifted))?;
        let ratio = if parts.sigma_max > 0.0 {
            parts.sigma_min / parts.sigma_max
        } else {
            0.0
        };
        if !(ratio > SINGULARITY_TOL) {
            return Err(Error::SingularWeight { level: k, ratio });
        }
        unitary.push(parts.unitary);
        zprime.push(parts.positive);
    }
    Ok(Positivized {
        d,
        max_level,
        zprime,
        unitary,
    })
}

/// Defect `|| I_{d^p} (x) Z_k - Z_{k+p} ||` measuring how far the weight tail
/// is from exact periodicity at level `k`.
pub fn asymptotic_period_defect(ws: &WeightSpec, period: usize, k: usize) -> Result<f64> {
    if period == 0 {
        return Err(Error::InvalidSpec("period must be at least 1".to_string()));
    }
    let zk = ws.block(k)?;
    let zkp = ws.block(k + period)?;
    let reps = word::level_dim(ws.d(), period)?;
    let lifted = kron_identity_left(reps, &zk);
    Ok(cmat::op_norm(&(lifted - zkp)))
}

/// The defect sequence for `k = 0, ..., K - p`.
pub fn asymptotic_period_series(
    ws: &WeightSpec,
    period: usize,
    max_level: usize,
) -> Result<Vec<(usize, f64)>> {
    if period == 0 {
        return Err(Error::InvalidSpec("period must be at least 1".to_string()));
    }
    if max_level < period {
        return Err(Error::TruncationTooSmall(format!(
            "need K >= p, got K={max_level}, p={period}"
        )));
    }
    let mut series = Vec::with_capacity(max_level - period + 1);
    for k in 0..=max_level - period {
        series.push((k, asymptotic_period_defect(ws, period, k)?));
    }
    Ok(series)
}

/// Measures the same periodicity defect through the operator model: for each
/// `k <= K - p` it forms `sum over |alpha| = p of S_alpha Z S_alpha*` with
/// genuine truncated matrices and returns
/// `|| P_{k+p} (sum - Z) P_{k+p} ||`.
pub fn commutant_defect_series(
    ws: &WeightSpec,
    period: usize,
    max_level: usize,
) -> Result<Vec<(usize, f64)>> {
    if period == 0 {
        return Err(Error::InvalidSpec("period must be at least 1".to_string()));
    }
    if max_level < period + 2 {
        return Err(Error::TruncationTooSmall(format!(
            "need K >= p + 2, got K={max_level}, p={period}"
        )));
    }
    let d = ws.d();
    let z = weight_op(ws, max_level)?;
    let mut sum = TruncatedFockOperator::zero(d, max_level)?;
    for alpha in word::words_of_length(d, period)? {
        let s = creation_word_op(d, max_level, &alpha)?;
        sum = &sum + &(&(&s * &z) * &s.adjoint());
    }
    let mut series = Vec::with_capacity(max_level - period + 1);
    for k in 0..=max_level - period {
        let block = sum.block(k + period, k + period) - ws.block(k + period)?;
        series.push((k, cmat::op_norm(&block)));
    }
    Ok(series)
}

/// The three level-`k` block identities of the alternating two-block family,
/// comparing operator-model compressions against the predicted closed forms.
#[derive(Debug, Clone)]
pub struct TailAlternation {
    /// Level at which the blocks were compressed.
    pub level: usize,
    /// `level - tail_start - 1`, whose parity decides which block appears.
    pub offset: usize,
    /// Compressions of `S_1 S_1* Z`, `S_1 Z S_1*`, and `S_1 S_1*`.
    pub computed: Vec<CMatrix>,
    /// Predicted closed forms for the same three operators.
    pub predicted: Vec<CMatrix>,
    /// Relative operator-norm errors, matching `computed`.
    pub rel_errors: Vec<f64>,
    /// Largest of the relative errors.
    pub max_rel_err: f64,
}

/// Computes the level-`k` compressions of `S_1 S_1* Z`, `S_1 Z S_1*`, and
/// `S_1 S_1*` for the alternating family with the given tail blocks, and
/// compares them against the predicted alternation: with `l = k - N - 1`
/// even the pair `(B, A)` appears, with `l` odd the pair `(A, B)`, always
/// under a leading `e_11 (x) I_{2^l}` factor.
pub fn tail_alternation_blocks(
    tail_start: usize,
    a: &CMatrix,
    b: &CMatrix,
    level: usize,
    max_level: usize,
) -> Result<TailAlternation> {
    if level < tail_start + 1 {
        return Err(Error::LevelOutOfRange {
            level,
            reason: format!("alternation starts at level {}", tail_start + 1),
        });
    }
    if max_level < level {
        return Err(Error::TruncationTooSmall(format!(
            "need K >= level, got K={max_level}, level={level}"
        )));
    }
    let ws = WeightSpec::alternating_tail(tail_start, a.clone(), b.clone())?;
    let z = weight_op(&ws, max_level)?;
    let s1 = creation_op(2, max_level, 1)?;
    let s1_adj = s1.adjoint();
    let range_proj = &s1 * &s1_adj;
    let shift_weight = &range_proj * &z;
    let weight_inside = &s1 * &(&z * &s1_adj);

    let computed = vec![
        shift_weight.block(level, level),
        weight_inside.block(level, level),
        range_proj.block(level, level),
    ];

    let l = level - tail_start - 1;
    let reps = word::level_dim(2, l)?;
    let e11 = cmat::e_matrix(2, 0, 0);
    let lead = |tail: &CMatrix| e11.kronecker(&kron_identity_left(reps, tail));
    let n_dim = word::level_dim(2, tail_start)?;
    let (first, second) = if l % 2 == 0 { (b, a) } else { (a, b) };
    let predicted = vec![
        lead(first),
        lead(second),
        lead(&CMatrix::identity(n_dim, n_dim)),
    ];

    let rel_errors: Vec<f64> = computed
        .iter()
        .zip(&predicted)
        .map(|(c_, p)| cmat::op_norm(&(c_ - p)) / cmat::op_norm(p))
        .collect();
    let max_rel_err = rel_errors.iter().fold(0.0f64, |acc, &e| acc.max(e));
    Ok(TailAlternation {
        level,
        offset: l,
        computed,
        predicted,
        rel_errors,
        max_rel_err,
    })
}

/// Residuals of the exact truncated creation relations: the largest entry of
/// `S_i* S_j - delta_ij (I - P_K)` over all letter pairs, and of
/// `sum S_i S_i* - (I - P_0)`.
pub fn creation_identity_defects(d: usize, max_level: usize) -> Result<(f64, f64)> {
    let ops: Vec<TruncatedFockOperator> = (1..=d as u8)
        .map(|l| creation_op(d, max_level, l))
        .collect::<Result<_>>()?;
    let ident = TruncatedFockOperator::identity(d, max_level)?;
    let top = TruncatedFockOperator::level_projection(d, max_level, max_level)?;
    let bottom = TruncatedFockOperator::level_projection(d, max_level, 0)?;
    let co_top = &ident - &top;
    let co_bottom = &ident - &bottom;

    let mut pair_defect = 0.0f64;
    for (i, si) in ops.iter().enumerate() {
        for (j, sj) in ops.iter().enumerate() {
            let prod = &si.adjoint() * sj;
            let target = if i == j {
                co_top.clone()
            } else {
                TruncatedFockOperator::zero(d, max_level)?
            };
            let diff = &prod - &target;
            let worst = diff.matrix().iter().fold(0.0f64, |a, z| a.max(cmat::cabs(*z)));
            pair_defect = pair_defect.max(worst);
        }
    }

    let mut sum = TruncatedFockOperator::zero(d, max_level)?;
    for s in &ops {
        sum = &sum + &(s * &s.adjoint());
    }
    let diff = &sum - &co_bottom;
    let sum_defect = diff.matrix().iter().fold(0.0f64, |a, z| a.max(cmat::cabs(*z)));
    Ok((pair_defect, sum_defect))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmat::{c, frob_norm};

    fn diag2(x: f64, y: f64) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[cr(x), cr(0.0), cr(0.0), cr(y)])
    }

    #[test]
    fn alternating_tail_blocks_closed_form() {
        let a = diag2(3.0, 1.0);
        let b = CMatrix::from_row_slice(2, 2, &[cr(2.0), cr(1.0), cr(1.0), cr(2.0)]);
        let ws = WeightSpec::alternating_tail(1, a.clone(), b.clone()).unwrap();
        assert_eq!(ws.block(0).unwrap(), CMatrix::identity(1, 1));
        assert_eq!(ws.block(1).unwrap(), a);
        assert_eq!(ws.block(2).unwrap(), kron_identity_left(2, &b));
        // One period later the tail repeats with an extra identity factor.
        assert_eq!(ws.block(3).unwrap(), kron_identity_left(4, &a));
        assert_eq!(ws.block(4).unwrap(), kron_identity_left(8, &b));
    }

    #[test]
    fn alternating_tail_rejects_indefinite_blocks() {
        let a = diag2(3.0, -1.0);
        let b = diag2(1.0, 1.0);
        assert!(matches!(
            WeightSpec::alternating_tail(1, a, b),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn creation_matrix_entries() {
        let s1 = creation_op(2, 2, 1).unwrap();
        let s2 = creation_op(2, 2, 2).unwrap();
        // Space: {empty, 1, 2, 11, 12, 21, 22}.
        let mut want1 = CMatrix::zeros(7, 7);
        want1[(1, 0)] = cr(1.0);
        want1[(3, 1)] = cr(1.0);
        want1[(4, 2)] = cr(1.0);
        assert_eq!(s1.matrix(), &want1);
        let mut want2 = CMatrix::zeros(7, 7);
        want2[(2, 0)] = cr(1.0);
        want2[(5, 1)] = cr(1.0);
        want2[(6, 2)] = cr(1.0);
        assert_eq!(s2.matrix(), &want2);
    }

    #[test]
    fn creation_word_matches_letter_product() {
        let d = 2;
        let k = 4;
        for letters in [[1u8, 2].as_slice(), &[2, 2], &[1, 1]] {
            let w = Word::new(letters, d).unwrap();
            let direct = creation_word_op(d, k, &w).unwrap();
            let mut prod = TruncatedFockOperator::identity(d, k).unwrap();
            for &l in letters {
                prod = &prod * &creation_op(d, k, l).unwrap();
            }
            assert_eq!(direct.matrix(), prod.matrix());
        }
    }

    #[test]
    fn exact_truncated_relations() {
        for (d, k) in [(1usize, 4usize), (2, 3), (3, 2)] {
            let (pair, sum) = creation_identity_defects(d, k).unwrap();
            assert_eq!(pair, 0.0);
            assert_eq!(sum, 0.0);
        }
    }

    #[test]
    fn gauge_projection_blocks() {
        let d = 2;
        let k = 3;
        let mut rng = 1u64;
        let mut next = move || {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((rng >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        let n = word::space_dim(d, k).unwrap();
        let x = TruncatedFockOperator::from_matrix(
            d,
            k,
            CMatrix::from_fn(n, n, |_, _| c(next(), next())),
        )
        .unwrap();
        // The diagonal projections sum back to x.
        let mut total = TruncatedFockOperator::zero(d, k).unwrap();
        for j in -(k as isize)..=(k as isize) {
            let pj = gauge_project(&x, j);
            // Only blocks with the right offset survive.
            for r in 0..=k {
                for c_ in 0..=k {
                    let blk = pj.block(r, c_);
                    if r as isize - c_ as isize != j {
                        assert_eq!(frob_norm(&blk), 0.0);
                    }
                }
            }
            total = &total + &pj;
        }
        assert!(frob_norm(&(total.matrix() - x.matrix())) < 1e-12);
        // Out-of-range offsets vanish.
        assert_eq!(gauge_project(&x, (k + 1) as isize).op_norm(), 0.0);
    }

    #[test]
    fn positivize_permutation_weight() {
        // Z_1 = [[0, 2], [1, 0]] has polar parts ([[0,1],[1,0]], diag(1, 2)).
        let z1 = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(2.0), cr(1.0), cr(0.0)]);
        let ws = WeightSpec::explicit(2, vec![CMatrix::identity(1, 1), z1]).unwrap();
        let pos = positivize(&ws, 1).unwrap();
        assert!(frob_norm(&(&pos.zprime[1] - diag2(1.0, 2.0))) < 1e-12);
        let flip = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)]);
        assert!(frob_norm(&(&pos.unitary[1] - flip)) < 1e-12);
        assert!(pos.conjugation_residual(&ws).unwrap() < 1e-12);
    }

    #[test]
    fn periodic_family_has_zero_tail_defect() {
        let a = diag2(3.0, 1.0);
        let b = CMatrix::from_row_slice(2, 2, &[cr(2.0), cr(1.0), cr(1.0), cr(2.0)]);
        let ws = WeightSpec::alternating_tail(1, a, b).unwrap();
        for k in 1..=5 {
            assert_eq!(asymptotic_period_defect(&ws, 2, k).unwrap(), 0.0);
        }
        // Below the tail the defect is genuinely nonzero.
        assert!(asymptotic_period_defect(&ws, 2, 0).unwrap() > 0.5);
    }

    #[test]
    fn bump_family_defect_closed_form() {
        // Z_k = I + (1/k) e_11 for k >= 1 has period-1 defect exactly 1/k.
        let d = 2usize;
        let levels = 6usize;
        let mut blocks = vec![CMatrix::identity(1, 1)];
        for k in 1..=levels {
            let n = word::level_dim(d, k).unwrap();
            let mut m = CMatrix::identity(n, n);
            m[(0, 0)] += cr(1.0 / k as f64);
            blocks.push(m);
        }
        let ws = WeightSpec::explicit(d, blocks).unwrap();
        for k in 1..levels {
            let defect = asymptotic_period_defect(&ws, 1, k).unwrap();
            assert!((defect - 1.0 / k as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn operator_route_matches_block_route() {
        let a = diag2(3.0, 1.0);
        let b = CMatrix::from_row_slice(2, 2, &[cr(2.0), cr(1.0), cr(1.0), cr(2.0)]);
        let ws = WeightSpec::alternating_tail(1, a, b).unwrap();
        let max_level = 5;
        let via_ops = commutant_defect_series(&ws, 2, max_level).unwrap();
        let via_blocks = asymptotic_period_series(&ws, 2, max_level).unwrap();
        for ((k1, d1), (k2, d2)) in via_ops.iter().zip(&via_blocks) {
            assert_eq!(k1, k2);
            assert!((d1 - d2).abs() <= 1e-12);
        }
    }

    #[test]
    fn tail_alternation_small_case() {
        let a = diag2(3.0, 1.0);
        let b = CMatrix::from_row_slice(2, 2, &[cr(2.0), cr(1.0), cr(1.0), cr(2.0)]);
        for level in 2..=5 {
            let alt = tail_alternation_blocks(1, &a, &b, level, 6).unwrap();
            assert!(alt.max_rel_err <= 1e-12, "level {level}: {}", alt.max_rel_err);
        }
    }

    #[test]
    fn validate_prefix_bounds() {
        let z1 = diag2(0.5, 4.0);
        let ws = WeightSpec::explicit(2, vec![CMatrix::identity(1, 1), z1]).unwrap();
        let bounds = ws.validate_prefix(1).unwrap();
        assert!((bounds.lower - 0.5).abs() < 1e-12);
        assert!((bounds.upper - 4.0).abs() < 1e-12);
    }

    #[test]
    fn explicit_list_rejects_singular_block() {
        let z1 = CMatrix::from_row_slice(2, 2, &[cr(1.0), cr(1.0), cr(1.0), cr(1.0)]);
        assert!(matches!(
            WeightSpec::explicit(2, vec![CMatrix::identity(1, 1), z1]),
            Err(Error::SingularWeight { level: 1, .. })
        ));
    }
}
