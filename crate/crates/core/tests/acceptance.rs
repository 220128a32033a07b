//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Tolerances and budgets are pinned here; every criterion states its own
//! runtime limit which is asserted against wall-clock time.

use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;

use ck_core::cocycle::{chain_identities, innerness_defect, witness_search, CocycleChain};
use ck_core::cyclotomic::RootScalar;
use ck_core::element::{CKElement, Generator};
use ck_core::endo::{
    diagonalize_commuting_family, lambda_apply, unitary_of_endo, ActionSpec, QFUnitary,
};
use ck_core::ktheory::{determinant, is_o2, k_groups, smith_normal_form, IntMatrix};
use ck_core::matrix::ZeroOneMatrix;
use ck_core::oracle::TruncatedRep;
use ck_core::rng::SplitMix64;
use ck_core::rokhlin::{build_averaged_unitary, RokhlinModel};
use ck_core::shift::{
    corner_formula_check, fullness_witness, phi, solve_phi_preimage, surjectivity_report,
    DilationElement, PreimageVerdict,
};

fn fib() -> Arc<ZeroOneMatrix> {
    ZeroOneMatrix::from_rows(&[&[1, 1], &[1, 0]]).unwrap().shared()
}

fn full(n: usize) -> Arc<ZeroOneMatrix> {
    ZeroOneMatrix::full(n).shared()
}

fn perm2() -> Arc<ZeroOneMatrix> {
    ZeroOneMatrix::from_rows(&[&[0, 1], &[1, 0]]).unwrap().shared()
}

fn gen(m: &Arc<ZeroOneMatrix>, g: Generator) -> CKElement {
    CKElement::generator(m, g).unwrap()
}

fn finish(name: &str, started: Instant, limit_secs: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed < limit_secs,
        "{name}: took {elapsed:.2}s, limit {limit_secs}s"
    );
    println!("{name}: PASS ({elapsed:.2}s)");
}

/// Random exact unitary in the level-one commutant span over the full 2x2
/// matrix: a word in diagonal twelfth roots, the swap, and an exact
/// Hadamard-like rotation with entries in Q(i).
fn random_unitary_full2(m: &Arc<ZeroOneMatrix>, rng: &mut SplitMix64) -> CKElement {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let i = RootScalar::root_of_unity(4, 1);
    let a = RootScalar::one().sub(&i).scale(&half); // (1 - i)/2
    let b = RootScalar::one().add(&i).scale(&half); // (1 + i)/2
    let hadamard = CKElement::from_terms(
        m,
        [
            ((vec![1], vec![1]), a.clone()),
            ((vec![1], vec![2]), b.clone()),
            ((vec![2], vec![1]), b),
            ((vec![2], vec![2]), a),
        ],
    )
    .unwrap();
    let swap = CKElement::from_terms(
        m,
        [
            ((vec![1], vec![2]), RootScalar::one()),
            ((vec![2], vec![1]), RootScalar::one()),
        ],
    )
    .unwrap();
    let mut acc = CKElement::unit(m);
    for _ in 0..4 {
        let factor = match rng.next_below(3) {
            0 => {
                let z1 = RootScalar::root_of_unity(12, rng.next_below(12) as i64);
                let z2 = RootScalar::root_of_unity(12, rng.next_below(12) as i64);
                gen(m, Generator::P(1))
                    .scale(&z1)
                    .add(&gen(m, Generator::P(2)).scale(&z2))
                    .unwrap()
            }
            1 => swap.clone(),
            _ => hadamard.clone(),
        };
        acc = acc.multiply(&factor).unwrap();
    }
    acc
}

#[test]
fn criterion_01_ck_relation_suite() {
    let started = Instant::now();
    for matrix in [fib(), full(2), perm2()] {
        let one = CKElement::unit(&matrix);
        let rep = TruncatedRep::new(&matrix, 12);
        let mut sum = CKElement::zero(&matrix);
        for i in matrix.letters() {
            let si = gen(&matrix, Generator::S(i));
            sum = sum.add(&gen(&matrix, Generator::P(i))).unwrap();
            for j in matrix.letters() {
                let sj = gen(&matrix, Generator::S(j));
                let prod = si.adjoint().multiply(&sj).unwrap();
                if i != j {
                    assert!(prod.is_zero(), "s_{i}* s_{j} != 0");
                    assert!(rep
                        .oracle_check(&prod, &CKElement::zero(&matrix), 2, 1e-9)
                        .unwrap());
                }
            }
            let lhs = si.adjoint().multiply(&si).unwrap();
            let mut rhs = CKElement::zero(&matrix);
            for j in matrix.letters() {
                if matrix.entry(i, j) {
                    let pj = gen(&matrix, Generator::P(j));
                    rhs = rhs.add(&pj).unwrap();
                }
            }
            assert!(lhs.equals(&rhs).unwrap(), "relation 2 fails at {i}");
            assert!(rep.oracle_check(&lhs, &rhs, 2, 1e-9).unwrap());
        }
        assert!(sum.equals(&one).unwrap(), "sum of range projections");
        assert!(rep.oracle_check(&sum, &one, 2, 1e-9).unwrap());
    }
    finish("criterion 01 (CK relation suite)", started, 10.0);
}

#[test]
fn criterion_02_aperiodicity() {
    let started = Instant::now();
    assert_eq!(fib().aperiodicity_exponent(), Some(2));
    let identity = ZeroOneMatrix::from_rows(&[&[1, 0], &[0, 1]]).unwrap();
    assert_eq!(identity.aperiodicity_exponent(), None);
    for n in [2, 3, 4] {
        assert_eq!(full(n).aperiodicity_exponent(), Some(1));
    }
    finish("criterion 02 (aperiodicity)", started, 1.0);
}

#[test]
fn criterion_03_ktheory() {
    let started = Instant::now();
    let kg = k_groups(&fib());
    assert!(kg.k0_trivial() && kg.k1_trivial());
    assert!(is_o2(&fib()).is_o2);
    let kg = k_groups(&full(4));
    assert_eq!(kg.k0_string(), "Z3");
    let mut rng = SplitMix64::new(3);
    for _ in 0..200 {
        let m: IntMatrix = (0..4)
            .map(|_| {
                (0..4)
                    .map(|_| BigInt::from(rng.next_below(19) as i64 - 9))
                    .collect()
            })
            .collect();
        let snf = smith_normal_form(&m);
        assert!(snf.verify(&m), "U M V != D");
        assert!(snf.divisibility_chain_holds());
        let one = BigInt::from(1);
        assert!(determinant(&snf.left) == one || determinant(&snf.left) == -one.clone());
        assert!(determinant(&snf.right) == one || determinant(&snf.right) == -one);
    }
    finish("criterion 03 (K-theory and SNF)", started, 5.0);
}

#[test]
fn criterion_04_correspondence_laws() {
    let started = Instant::now();
    let m = full(2);
    let mut rng = SplitMix64::new(4);
    for trial in 0..100 {
        let u = random_unitary_full2(&m, &mut rng);
        let w = random_unitary_full2(&m, &mut rng);
        let qu = QFUnitary::new(u.clone()).expect("generated unitary is admissible");
        // Roundtrip: the unitary of the induced endomorphism is u itself.
        let back = unitary_of_endo(&qu.as_endo()).unwrap();
        assert!(back.element().equals(&u).unwrap(), "roundtrip, trial {trial}");
        // Homomorphism law on the generators.
        let uw = u.multiply(&w).unwrap();
        for i in m.letters() {
            let s = gen(&m, Generator::S(i));
            let lhs = lambda_apply(&u, &lambda_apply(&w, &s).unwrap()).unwrap();
            let rhs = lambda_apply(&uw, &s).unwrap();
            assert!(lhs.equals(&rhs).unwrap(), "homomorphism law, trial {trial}");
        }
    }
    finish("criterion 04 (correspondence laws)", started, 30.0);
}

#[test]
fn criterion_05_chain_identities() {
    let started = Instant::now();
    let fib_action = ActionSpec::diagonal(vec![2], vec![vec![0, 1]])
        .verify(&fib())
        .unwrap();
    let chain = CocycleChain::build(fib_action.unitary(0), 4).unwrap();
    chain_identities(&chain, 2).unwrap();

    let gauge = ActionSpec::diagonal(vec![3], vec![vec![1, 1]])
        .verify(&full(2))
        .unwrap();
    let chain = CocycleChain::build(gauge.unitary(0), 4).unwrap();
    chain_identities(&chain, 3).unwrap();
    finish("criterion 05 (chain identities)", started, 30.0);
}

#[test]
fn criterion_06_averaging_bound() {
    let started = Instant::now();
    for r in [3usize, 5, 10, 20] {
        for order in [2u32, 3, 4] {
            for blocks in [1, 2] {
                let model = if blocks == 1 {
                    RokhlinModel::scalar_cycles(r, order)
                } else {
                    RokhlinModel::block2_cycles(r, order)
                };
                let (_, report) = build_averaged_unitary(&model).unwrap();
                assert!(
                    report.defect <= report.bound,
                    "defect {} above bound {} (r={r}, order={order}, blocks={blocks})",
                    report.defect,
                    report.bound
                );
                println!(
                    "  averaging r={r} order={order} blocks={blocks}: \
                     defect {:.6} <= bound {:.6}",
                    report.defect, report.bound
                );
            }
        }
    }
    let model = RokhlinModel::scalar_cycles(10, 2);
    let (_, report) = build_averaged_unitary(&model).unwrap();
    let exact = 2.0 * (std::f64::consts::PI / 20.0).sin();
    assert!((report.defect - exact).abs() < 1e-6);
    assert!((report.defect - 0.3129).abs() < 1e-4);
    assert!((report.bound - 0.6283).abs() < 1e-4);
    finish("criterion 06 (averaging bound)", started, 10.0);
}

#[test]
fn criterion_07_surjectivity_obstruction() {
    let started = Instant::now();
    // Fibonacci: target p_1 is obstructed, forced candidate q_1 = 1.
    match solve_phi_preimage(&fib(), 1).unwrap() {
        PreimageVerdict::NoSolution { candidate, .. } => {
            let q1 = gen(&fib(), Generator::Q(1));
            assert!(candidate.equals(&q1).unwrap());
        }
        PreimageVerdict::Solution { .. } => panic!("expected an obstruction"),
    }
    // Permutation matrix: solvable for every target.
    for i in perm2().letters() {
        assert!(matches!(
            solve_phi_preimage(&perm2(), i).unwrap(),
            PreimageVerdict::Solution { .. }
        ));
    }
    for matrix in [fib(), perm2(), full(2), full(3)] {
        let report = surjectivity_report(&matrix).unwrap();
        assert_eq!(report.all_solvable, report.permutation);
    }
    finish("criterion 07 (surjectivity obstruction)", started, 1.0);
}

#[test]
fn criterion_08_corner_and_fullness() {
    let started = Instant::now();
    let m = fib();
    let mut rng = SplitMix64::new(8);
    let basis1 = CKElement::diagonal_commutant_basis(&m, 1);
    let basis2 = CKElement::diagonal_commutant_basis(&m, 2);
    let random_diagonal = |rng: &mut SplitMix64| {
        let mut x = CKElement::zero(&m);
        for b in basis1.iter().chain(basis2.iter()) {
            let c = RootScalar::root_of_unity(12, rng.next_below(12) as i64).scale(
                &BigRational::new(
                    BigInt::from(rng.next_below(5) as i64 - 2),
                    BigInt::from(1 + rng.next_below(2) as i64),
                ),
            );
            x = x.add(&b.scale(&c)).unwrap();
        }
        x
    };
    for trial in 0..3 {
        let x = random_diagonal(&mut rng);
        for class_i in 1..=2 {
            for class_j in 1..=2 {
                for k in 1..=4 {
                    let report = corner_formula_check(&m, class_i, class_j, k, &x).unwrap();
                    assert!(
                        report.equal,
                        "corner formula trial {trial} ({class_i},{class_j},{k})"
                    );
                }
            }
        }
    }
    // Fullness witness with a nonzero certificate.
    let p2 = gen(&m, Generator::P(2));
    for class_j in 1..=2 {
        let w = fullness_witness(&m, 2, class_j, &p2).unwrap();
        assert!(!w.certificate.is_zero());
        assert!(w.power >= 2);
        assert!(m.admits(&w.mu));
    }
    finish("criterion 08 (corner formula and fullness)", started, 30.0);
}

#[test]
fn criterion_09_ad_equals_lambda() {
    let started = Instant::now();
    let full2 = full(2);
    let fibm = fib();
    let gauge_u = QFUnitary::new(CKElement::unit(&full2).neg()).unwrap();
    let fib_u = ActionSpec::diagonal(vec![2], vec![vec![0, 1]])
        .verify(&fibm)
        .unwrap()
        .unitary(0)
        .clone();
    let mut rng = SplitMix64::new(9);
    for trial in 0..50 {
        // Half the unitaries live over the full matrix, half are diagonal
        // over the Fibonacci matrix (its commutant is diagonal-only).
        let (w, u) = if trial % 2 == 0 {
            (random_unitary_full2(&full2, &mut rng), &gauge_u)
        } else {
            let z1 = RootScalar::root_of_unity(12, rng.next_below(12) as i64);
            let z2 = RootScalar::root_of_unity(12, rng.next_below(12) as i64);
            let w = gen(&fibm, Generator::P(1))
                .scale(&z1)
                .add(&gen(&fibm, Generator::P(2)).scale(&z2))
                .unwrap();
            (w, &fib_u)
        };
        // innerness_defect verifies ad(w) = lambda_(w phi(w)*) on all
        // generators before measuring the defect.
        let defect = innerness_defect(&w, u).unwrap();
        assert!(defect.is_finite());
        // Direct check as well.
        let v = w.multiply(&phi(&w).adjoint()).unwrap();
        for i in w.matrix().letters() {
            let s = CKElement::generator(w.matrix(), Generator::S(i)).unwrap();
            let ad = w.multiply(&s).unwrap().multiply(&w.adjoint()).unwrap();
            let lam = lambda_apply(&v, &s).unwrap();
            assert!(ad.equals(&lam).unwrap(), "trial {trial} letter {i}");
        }
    }
    finish("criterion 09 (ad(w) = lambda)", started, 10.0);
}

#[test]
fn criterion_10_diagonalization() {
    let started = Instant::now();
    let mut rng = SplitMix64::new(10);
    // Exact unitaries over the full 3x3 matrix: diagonal roots, a cycle,
    // and the Hadamard-like rotation acting on the first two letters.
    let m3 = full(3);
    let random_unitary_full3 = |rng: &mut SplitMix64| {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let i = RootScalar::root_of_unity(4, 1);
        let a = RootScalar::one().sub(&i).scale(&half);
        let b = RootScalar::one().add(&i).scale(&half);
        let mut acc = CKElement::unit(&m3);
        for _ in 0..3 {
            let factor = match rng.next_below(3) {
                0 => {
                    let mut d = CKElement::zero(&m3);
                    for l in 1..=3u8 {
                        let z = RootScalar::root_of_unity(12, rng.next_below(12) as i64);
                        d = d
                            .add(&CKElement::generator(&m3, Generator::P(l)).unwrap().scale(&z))
                            .unwrap();
                    }
                    d
                }
                1 => CKElement::from_terms(
                    &m3,
                    [
                        ((vec![2], vec![1]), RootScalar::one()),
                        ((vec![3], vec![2]), RootScalar::one()),
                        ((vec![1], vec![3]), RootScalar::one()),
                    ],
                )
                .unwrap(),
                _ => CKElement::from_terms(
                    &m3,
                    [
                        ((vec![1], vec![1]), a.clone()),
                        ((vec![1], vec![2]), b.clone()),
                        ((vec![2], vec![1]), b.clone()),
                        ((vec![2], vec![2]), a.clone()),
                        ((vec![3], vec![3]), RootScalar::one()),
                    ],
                )
                .unwrap(),
            };
            acc = acc.multiply(&factor).unwrap();
        }
        acc
    };
    for trial in 0..20 {
        let (matrix, conjugator) = if trial % 2 == 0 {
            let m = full(2);
            let v = random_unitary_full2(&m, &mut rng);
            (m, v)
        } else {
            (m3.clone(), random_unitary_full3(&mut rng))
        };
        // Commuting family: two exact diagonal unitaries of order 12,
        // conjugated by the same known unitary.
        let family: Vec<QFUnitary> = (0..2)
            .map(|_| {
                let mut d = CKElement::zero(&matrix);
                for l in matrix.letters() {
                    let z = RootScalar::root_of_unity(12, rng.next_below(12) as i64);
                    d = d
                        .add(
                            &CKElement::generator(&matrix, Generator::P(l))
                                .unwrap()
                                .scale(&z),
                        )
                        .unwrap();
                }
                let conj = conjugator
                    .multiply(&d)
                    .unwrap()
                    .multiply(&conjugator.adjoint())
                    .unwrap();
                QFUnitary::new(conj).expect("conjugated diagonal stays admissible")
            })
            .collect();
        let diag = diagonalize_commuting_family(&family, 12).unwrap();
        assert!(
            diag.certificate <= 1e-10,
            "trial {trial}: certificate {}",
            diag.certificate
        );
    }
    finish("criterion 10 (diagonalization)", started, 30.0);
}

#[test]
fn criterion_11_witness_search_sanity() {
    let started = Instant::now();
    // Gauge flip on the full 2x2 matrix and the parity action over the
    // Fibonacci matrix, levels 0..6, seed 0.
    let flip = ActionSpec::diagonal(vec![2], vec![vec![1, 1]])
        .verify(&full(2))
        .unwrap();
    let parity = ActionSpec::diagonal(vec![2], vec![vec![0, 1]])
        .verify(&fib())
        .unwrap();
    for (name, action) in [("gauge flip", &flip), ("parity", &parity)] {
        let trace = witness_search(action, 0, 6, 1e-9, 1500, 0).unwrap();
        assert!(
            (trace.defects[0] - 2.0).abs() < 1e-12,
            "{name}: level-0 defect {}",
            trace.defects[0]
        );
        for pair in trace.defects.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-12, "{name}: trace must not increase");
        }
        let line: Vec<String> = trace.defects.iter().map(|d| format!("{d:.6}")).collect();
        println!("  witness trace ({name}): {}", line.join(" "));
    }
    finish("criterion 11 (witness search sanity)", started, 300.0);
}

#[test]
fn criterion_12_dilation_laws() {
    let started = Instant::now();
    let m = fib();
    let p1 = gen(&m, Generator::P(1));
    let p2 = gen(&m, Generator::P(2));
    let a = DilationElement::new(0, p1.clone()).unwrap();
    let b = DilationElement::new(1, phi(&p1)).unwrap();
    assert!(a.equals(&b, 8).unwrap(), "identification law");
    let roundtrip = a.apply_shift().apply_shift_inverse();
    assert!(a.equals(&roundtrip, 8).unwrap(), "shift then inverse");
    let other = a.apply_shift_inverse().apply_shift();
    assert!(a.equals(&other, 8).unwrap(), "inverse then shift");
    let c = DilationElement::new(0, p2).unwrap();
    assert!(!a.equals(&c, 8).unwrap(), "distinct projections stay distinct");
    finish("criterion 12 (dilation laws)", started, 10.0);
}
