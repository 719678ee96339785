//! Integration checks for the corner-algebra layer: model dimensions against
//! a joint-pattern counting oracle on diagonal tails, probe consistency, the
//! swap involution, orbit and ideal structure, and the connecting map.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use weighted_cuntz::cmat::{self, c, cr, CMatrix};
use weighted_cuntz::fock::WeightSpec;
use weighted_cuntz::matalg::RANK_TOL;
use weighted_cuntz::quotient::{
    build_corner_model, classify_weight_spec, compress, connecting_map, corner_probe_series,
    decide_simplicity, invariant_ideals, swap_action, CornerElement, CornerFamily, Verdict,
    DEFAULT_MODEL_SEED,
};

fn diag(entries: &[f64]) -> CMatrix {
    let n = entries.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { cr(entries[i]) } else { cr(0.0) })
}

fn family(a: &CMatrix, b: &CMatrix) -> CornerFamily {
    CornerFamily::AlternatingPeriodTwo {
        tail_start: 1,
        a: a.clone(),
        b: b.clone(),
    }
}

/// Random positive diagonal entries from a small pool, so that coincidence
/// patterns between the two tail blocks vary across seeds.
fn rand_tail(rng: &mut ChaCha8Rng) -> (CMatrix, CMatrix) {
    let pool = [1.0, 2.0, 3.0];
    let mut draw = || pool[(rng.next_u32() % 3) as usize];
    let a = diag(&[draw(), draw()]);
    let b = diag(&[draw(), draw()]);
    (a, b)
}

/// Independent dimension count for diagonal tails: the model generators are
/// diagonal, so the algebra dimension is the number of distinct joint
/// diagonal patterns.
fn joint_pattern_count(a: &CMatrix, b: &CMatrix) -> usize {
    let pairs = [
        (a[(0, 0)].re, b[(0, 0)].re),
        (a[(1, 1)].re, b[(1, 1)].re),
        (b[(0, 0)].re, a[(0, 0)].re),
        (b[(1, 1)].re, a[(1, 1)].re),
    ];
    let mut distinct: Vec<(f64, f64)> = Vec::new();
    for p in pairs {
        if !distinct.iter().any(|q| q.0 == p.0 && q.1 == p.1) {
            distinct.push(p);
        }
    }
    distinct.len()
}

#[test]
fn model_dimension_matches_joint_pattern_oracle() {
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let (a, b) = rand_tail(&mut rng);
        let expected = joint_pattern_count(&a, &b);
        let model = build_corner_model(&family(&a, &b), DEFAULT_MODEL_SEED, RANK_TOL).unwrap();
        assert_eq!(model.algebra.dim(), expected, "seed {seed}");
        // Diagonal generators make the model commutative: summands are lines.
        assert!(model.report.block_sizes.iter().all(|&s| s == 1));
        assert_eq!(model.report.block_sizes.len(), expected);
    }
}

#[test]
fn probe_dimension_stabilizes_to_the_model_dimension() {
    for seed in 0..6u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(600 + seed);
        let (a, b) = rand_tail(&mut rng);
        let expected = joint_pattern_count(&a, &b);
        let ws = WeightSpec::alternating_tail(1, a, b).unwrap();
        let series = corner_probe_series(&ws, 2, 5, RANK_TOL).unwrap();
        let settled: Vec<usize> = series
            .iter()
            .filter(|p| p.window_start >= 2)
            .map(|p| p.algebra_dim)
            .collect();
        assert!(!settled.is_empty());
        assert!(
            settled.iter().all(|&d| d == expected),
            "seed {seed}: {settled:?} vs {expected}"
        );
    }
}

#[test]
fn swap_action_is_an_involution_on_the_model() {
    for seed in 0..6u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(700 + seed);
        let (a, b) = rand_tail(&mut rng);
        let model = build_corner_model(&family(&a, &b), DEFAULT_MODEL_SEED, RANK_TOL).unwrap();
        let action = swap_action(&model).unwrap();

        // The summand permutation squares to the identity.
        let m = action.permutation.len();
        for i in 0..m {
            assert!(action.permutation[i] < m);
            assert_eq!(action.permutation[action.permutation[i]], i);
        }

        // The orbits partition the summand set.
        let mut seen = vec![false; m];
        for orbit in action.orbits() {
            for &i in &orbit {
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));

        // Applying the swap twice returns every basis element.
        for w in model.algebra.basis() {
            let back = action.apply(&action.apply(w));
            assert!(cmat::frob_norm(&(&back - w)) <= 1e-10);
        }

        // The swap exchanges the two generator images.
        let gen_b = model.gen_b.clone().unwrap();
        assert!(cmat::frob_norm(&(action.apply(&model.gen_a) - &gen_b)) <= 1e-10);
        assert!(cmat::frob_norm(&(action.apply(&gen_b) - &model.gen_a)) <= 1e-10);
    }
}

#[test]
fn invariant_ideals_are_exactly_unions_of_orbits() {
    for seed in 0..8u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(800 + seed);
        let (a, b) = rand_tail(&mut rng);
        let model = build_corner_model(&family(&a, &b), DEFAULT_MODEL_SEED, RANK_TOL).unwrap();
        let orbits = swap_action(&model).unwrap().orbits();
        let masks = invariant_ideals(&model).unwrap();

        // Every reported mask is a nontrivial union of orbits.
        let m = model.report.block_sizes.len();
        for mask in &masks {
            assert!(mask.nontrivial);
            assert!(!mask.members.is_empty() && mask.members.len() < m);
            for orbit in &orbits {
                let hits = orbit.iter().filter(|i| mask.members.contains(i)).count();
                assert!(hits == 0 || hits == orbit.len(), "mask splits an orbit");
            }
        }

        // Every nontrivial union of orbits is reported: there are
        // 2^(#orbits) - 2 of them.
        let expected = (1usize << orbits.len()) - 2;
        assert_eq!(masks.len(), expected, "seed {seed}");
    }
}

#[test]
fn simplicity_verdict_matches_the_orbit_count() {
    for seed in 0..12u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(900 + seed);
        let (a, b) = rand_tail(&mut rng);
        let report = decide_simplicity(&family(&a, &b), DEFAULT_MODEL_SEED, RANK_TOL).unwrap();
        let single_orbit = report.orbits.len() == 1;
        match report.verdict {
            Verdict::Simple => {
                assert!(single_orbit, "seed {seed}");
                assert!(report.witness.is_none());
            }
            Verdict::NotSimple => {
                assert!(!single_orbit, "seed {seed}");
                let witness = report.witness.as_ref().expect("witness present");
                assert!(witness.nontrivial);
            }
            Verdict::OutOfScope => panic!("alternating family is in scope"),
        }
    }
}

#[test]
fn compression_is_multiplicative_on_outer_matrix_units() {
    let model = build_corner_model(
        &family(&diag(&[3.0, 1.0]), &diag(&[2.0, 2.0])),
        DEFAULT_MODEL_SEED,
        RANK_TOL,
    )
    .unwrap();
    let dim = model.algebra.dim();
    let inner = model.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(321);
    let rand_member = |rng: &mut ChaCha8Rng| {
        let coords: Vec<_> = (0..dim)
            .map(|_| c(cmat::uniform_pm1(rng), cmat::uniform_pm1(rng)))
            .collect();
        model.algebra.from_coordinates(&coords)
    };
    let zero = CMatrix::zeros(inner, inner);
    for (i, j, l) in [(0usize, 0usize, 1usize), (0, 1, 0), (1, 0, 1), (1, 1, 0)] {
        let w = rand_member(&mut rng);
        let v = rand_member(&mut rng);
        let mut x_blocks = vec![vec![zero.clone(), zero.clone()], vec![zero.clone(), zero.clone()]];
        x_blocks[i][j] = w;
        let mut y_blocks = vec![vec![zero.clone(), zero.clone()], vec![zero.clone(), zero.clone()]];
        y_blocks[j][l] = v;
        let x = CornerElement::from_outer_blocks(&model, &x_blocks).unwrap();
        let y = CornerElement::from_outer_blocks(&model, &y_blocks).unwrap();
        let xy = CornerElement::new(&model, x.matrix() * y.matrix()).unwrap();

        let lhs = compress(&model, i, j, &x).unwrap().matrix()
            * compress(&model, j, l, &y).unwrap().matrix();
        let rhs = compress(&model, i, l, &xy).unwrap();
        let scale = cmat::frob_norm(rhs.matrix()).max(1.0);
        assert!(cmat::frob_norm(&(&lhs - rhs.matrix())) <= 1e-10 * scale);
    }
}

#[test]
fn compression_respects_adjoints() {
    let model = build_corner_model(
        &family(&diag(&[1.0, 2.0]), &diag(&[2.0, 1.0])),
        DEFAULT_MODEL_SEED,
        RANK_TOL,
    )
    .unwrap();
    let dim = model.algebra.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(4321);
    let coords: Vec<_> = (0..4 * dim)
        .map(|_| c(cmat::uniform_pm1(&mut rng), cmat::uniform_pm1(&mut rng)))
        .collect();
    let blocks: Vec<Vec<CMatrix>> = (0..2)
        .map(|i| {
            (0..2)
                .map(|j| model.algebra.from_coordinates(&coords[(2 * i + j) * dim..(2 * i + j + 1) * dim]))
                .collect()
        })
        .collect();
    let x = CornerElement::from_outer_blocks(&model, &blocks).unwrap();
    let x_adj = CornerElement::new(&model, x.matrix().adjoint()).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let lhs = compress(&model, i, j, &x).unwrap().matrix().adjoint();
            let rhs = compress(&model, j, i, &x_adj).unwrap();
            assert!(cmat::frob_norm(&(&lhs - rhs.matrix())) <= 1e-10);
        }
    }
}

#[test]
fn connecting_map_is_a_unital_isometric_homomorphism() {
    let corner_dim = 4;
    let insert_dim = 4;
    let outer = 2;
    let n = outer * corner_dim;
    let mut rng = ChaCha8Rng::seed_from_u64(2468);
    let rand_mat = |rng: &mut ChaCha8Rng| {
        CMatrix::from_fn(n, n, |_, _| c(cmat::uniform_pm1(rng), cmat::uniform_pm1(rng)))
    };

    let ident = CMatrix::identity(n, n);
    let ident_out = connecting_map(&ident, corner_dim, insert_dim).unwrap();
    let big = n * insert_dim;
    assert!(cmat::frob_norm(&(&ident_out - &CMatrix::identity(big, big))) == 0.0);

    for _ in 0..6 {
        let x = rand_mat(&mut rng);
        let y = rand_mat(&mut rng);
        let fx = connecting_map(&x, corner_dim, insert_dim).unwrap();
        let fy = connecting_map(&y, corner_dim, insert_dim).unwrap();
        let fxy = connecting_map(&(&x * &y), corner_dim, insert_dim).unwrap();
        let scale = cmat::frob_norm(&fxy).max(1.0);
        assert!(cmat::frob_norm(&(&(&fx * &fy) - &fxy)) <= 1e-12 * scale);

        let nx = cmat::op_norm(&x);
        let nfx = cmat::op_norm(&fx);
        assert!((nx - nfx).abs() <= 1e-9 * nx.max(1.0));

        let fx_adj = connecting_map(&x.adjoint(), corner_dim, insert_dim).unwrap();
        assert!(cmat::frob_norm(&(&fx.adjoint() - &fx_adj)) == 0.0);
    }
}

#[test]
fn weight_specs_classify_into_corner_families() {
    let a = diag(&[3.0, 1.0]);
    let b = CMatrix::from_row_slice(2, 2, &[cr(2.0), cr(1.0), cr(1.0), cr(2.0)]);
    let ws = WeightSpec::alternating_tail(1, a.clone(), b.clone()).unwrap();
    match classify_weight_spec(&ws).unwrap() {
        CornerFamily::AlternatingPeriodTwo { tail_start, a: fa, b: fb } => {
            assert_eq!(tail_start, 1);
            assert!(cmat::frob_norm(&(&fa - &a)) == 0.0);
            assert!(cmat::frob_norm(&(&fb - &b)) == 0.0);
        }
        other => panic!("expected the alternating family, got {other:?}"),
    }

    let ws = WeightSpec::identity(3).unwrap();
    match classify_weight_spec(&ws).unwrap() {
        CornerFamily::PeriodOne { d, block } => {
            assert_eq!(d, 3);
            assert_eq!(block.nrows(), 1);
        }
        other => panic!("expected a period-one family, got {other:?}"),
    }

    let ws = WeightSpec::explicit(2, vec![CMatrix::identity(1, 1), diag(&[1.0, 2.0])]).unwrap();
    assert!(classify_weight_spec(&ws).is_err());
}

#[test]
fn period_one_families_follow_the_spectrum_rule() {
    // One letter: never simple; two or more summands produce a witness.
    let report = decide_simplicity(
        &CornerFamily::PeriodOne { d: 1, block: diag(&[1.0, 2.0]) },
        DEFAULT_MODEL_SEED,
        RANK_TOL,
    )
    .unwrap();
    assert_eq!(report.verdict, Verdict::NotSimple);
    assert!(report.witness.is_some());

    // Several letters, one spectral value: the corner algebra is trivial.
    let report = decide_simplicity(
        &CornerFamily::PeriodOne { d: 2, block: diag(&[2.0, 2.0]) },
        DEFAULT_MODEL_SEED,
        RANK_TOL,
    )
    .unwrap();
    assert_eq!(report.verdict, Verdict::Simple);

    // Several letters, several spectral values: every summand set is
    // invariant, so the quotient cannot be simple.
    let report = decide_simplicity(
        &CornerFamily::PeriodOne { d: 2, block: diag(&[1.0, 2.0]) },
        DEFAULT_MODEL_SEED,
        RANK_TOL,
    )
    .unwrap();
    assert_eq!(report.verdict, Verdict::NotSimple);
    assert!(report.witness.is_some());
}
