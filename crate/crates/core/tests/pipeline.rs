//! Cross-module integration: the kernel-form pair elements behind each
//! diagram `Lambda` generator are valid equal-permutation equal-degree
//! pairs, and the parity rule used by the diagram commutator verdict
//! agrees with honest commutator arithmetic in the reduced braid group.

use bcc_core::braidvk::{vk_presentation, FactorizationFile};
use bcc_core::diagram::{build_cp1xcp1, build_doublecover, build_f1, solve_lambda, CommutatorVerdict};
use bcc_core::fpgroup::Presentation;
use bcc_core::tbraid::{BTilde, BTilde2Elem, PTildeElem};
use bcc_core::words::FreeWord;

/// The kernel element attached to one Lambda generator `(kappa, lambda)`:
/// the pair `(u_1^kappa eta^{kappa(kappa-1)/2}, u_1^lambda eta^{...})`.
fn kernel_pair(group: &BTilde, kappa: i64, lambda: i64) -> BTilde2Elem {
    let n = group.n();
    let side = |k: i64| {
        group.from_pure(
            PTildeElem::u(n, 1).pow(k).mul(&PTildeElem::eta(n).pow(k * (k - 1) / 2)).unwrap(),
        )
    };
    BTilde2Elem::new(group, side(kappa), side(lambda)).expect("degree-0 pure pairs always match")
}

#[test]
fn kernel_form_pairs_are_valid_and_drive_the_parity_rule() {
    let n = 5;
    let group = BTilde::new(n);
    let u2 = group.from_pure(PTildeElem::u(n, 2));
    let eta = PTildeElem::eta(n);
    let diagrams = [
        solve_lambda(&build_cp1xcp1(3, 2).unwrap()).unwrap(),
        solve_lambda(&build_cp1xcp1(4, 2).unwrap()).unwrap(),
        solve_lambda(&build_f1(4, 3).unwrap()).unwrap(),
        solve_lambda(&build_doublecover(2, 1, 3, 2).unwrap()).unwrap(),
    ];
    for report in &diagrams {
        let mut eta1 = false;
        let mut eta2 = false;
        for &(kappa, lambda) in &report.lambda_gens {
            let pair = kernel_pair(&group, kappa, lambda);
            // Definition of the pair group: equal permutation and degree
            assert!(pair.x.is_degree_zero_pure());
            assert!(pair.y.is_degree_zero_pure());
            // commuting each side against u_2 yields eta^kappa / eta^lambda;
            // this is the arithmetic behind the parity rule
            let cx = group.commutator(&pair.x, &u2);
            let cy = group.commutator(&pair.y, &u2);
            assert_eq!(cx.pure_part(), &eta.pow(kappa), "kappa = {kappa}");
            assert_eq!(cy.pure_part(), &eta.pow(lambda), "lambda = {lambda}");
            eta1 |= kappa.rem_euclid(2) == 1;
            eta2 |= lambda.rem_euclid(2) == 1;
        }
        let expected = match (eta1, eta2) {
            (true, true) => CommutatorVerdict::Trivial,
            (true, false) => CommutatorVerdict::Z2ViaEta2,
            (false, true) => CommutatorVerdict::Z2ViaEta1,
            (false, false) => CommutatorVerdict::Z2xZ2,
        };
        assert_eq!(report.commutator, expected, "template {}", report.template);
    }
}

#[test]
fn halftwist_parametrization_matches_s1_conjugation() {
    // the half-twist with endpoints (2,3) and twisting integer k equals
    // both x_2 u_2^k eta^{k(k-1)/2} and s_1^{-k} x_2 s_1^k: the identity
    // behind the one-shared-endpoint braid relation
    use bcc_core::words::BraidWord;
    let n = 4;
    let group = BTilde::new(n);
    let x2 = group.eval(&BraidWord::generator(n, 2));
    let s1 = PTildeElem::s1(n);
    for k in -4..=4i64 {
        let direct = group.mul(
            &x2,
            &group.from_pure(
                PTildeElem::u(n, 2).pow(k).mul(&PTildeElem::eta(n).pow(k * (k - 1) / 2)).unwrap(),
            ),
        );
        let conjugated = group.mul(
            &group.mul(&group.from_pure(s1.pow(-k)), &x2),
            &group.from_pure(s1.pow(k)),
        );
        assert_eq!(direct, conjugated, "k = {k}");
        assert_eq!(group.halftwist((2, 3), k), direct, "k = {k}");
        assert_eq!(group.classify_halftwist(&direct), Some(((2, 3), k)));
    }
}

#[test]
fn adjacent_square_commutators_give_eta() {
    // [x^2, y^2] = eta for any two adjacent half-twists
    for n in 3..=5 {
        let group = BTilde::new(n);
        for a in 1..n {
            for b in a + 1..=n {
                for c in 1..n {
                    for d in c + 1..=n {
                        let overlap = [a, b].iter().filter(|&&e| e == c || e == d).count();
                        if overlap != 1 {
                            continue;
                        }
                        let x = group.halftwist((a, b), 1);
                        let y = group.halftwist((c, d), -2);
                        let x2 = group.mul(&x, &x);
                        let y2 = group.mul(&y, &y);
                        let comm = group.commutator(&x2, &y2);
                        assert_eq!(comm.pure_part(), &PTildeElem::eta(n));
                    }
                }
            }
        }
    }
}

/// Signed crossing counts per unordered strand pair: an abelianization of
/// the pure braid group computed with no group theory at all, just strand
/// tracking. Pairs are keyed by initial strand labels (1-based, a < b).
fn linking_numbers(w: &bcc_core::words::BraidWord) -> std::collections::BTreeMap<(usize, usize), i64> {
    let n = w.strands();
    let mut at: Vec<usize> = (1..=n).collect(); // strand label at each position
    let mut cross = std::collections::BTreeMap::new();
    for &l in w.letters() {
        let k = l.unsigned_abs() as usize - 1;
        let (s, t) = (at[k], at[k + 1]);
        let key = (s.min(t), s.max(t));
        *cross.entry(key).or_insert(0i64) += if l > 0 { 1 } else { -1 };
        at.swap(k, k + 1);
    }
    cross
}

/// The standard pure braid generator on strands (a, b):
/// `x_{b-1} ... x_{a+1} x_a^2 x_{a+1}^{-1} ... x_{b-1}^{-1}`.
fn pure_generator(n: usize, a: usize, b: usize) -> bcc_core::words::BraidWord {
    let mut letters: Vec<i32> = ((a + 1)..b).rev().map(|k| k as i32).collect();
    letters.push(a as i32);
    letters.push(a as i32);
    letters.extend(((a + 1)..b).map(|k| -(k as i32)));
    bcc_core::words::BraidWord::from_letters(n, &letters)
}

fn ab_row(e: &bcc_core::tbraid::BTildeElem) -> Vec<i64> {
    assert!(e.is_pure());
    let mut row = vec![e.pure_part().alpha()];
    row.extend_from_slice(e.pure_part().beta());
    row
}

#[test]
fn pure_part_abelianization_matches_linking_numbers() {
    // for a pure braid word, the (alpha, beta) data of its normal form is
    // determined by the linking numbers: w = prod A_{ab}^{lk_ab} in the
    // abelianized pure subgroup. The right side needs only crossing counts
    // and the images of the standard pure generators.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for n in 3..=5usize {
        let group = BTilde::new(n);
        let mut gen_rows = std::collections::BTreeMap::new();
        for a in 1..n {
            for b in a + 1..=n {
                let e = group.eval(&pure_generator(n, a, b));
                assert!(e.is_pure(), "A[{a},{b}] must be pure");
                gen_rows.insert((a, b), ab_row(&e));
            }
        }
        for _ in 0..60 {
            // random product of conjugated pure generators
            let mut word = bcc_core::words::BraidWord::identity(n);
            for _ in 0..rng.gen_range(1..5) {
                let len = rng.gen_range(0..6);
                let conj_letters: Vec<i32> = (0..len)
                    .map(|_| {
                        let i = rng.gen_range(1..n as i32);
                        if rng.gen_bool(0.5) {
                            i
                        } else {
                            -i
                        }
                    })
                    .collect();
                let g = bcc_core::words::BraidWord::from_letters(n, &conj_letters);
                let a = rng.gen_range(1..n);
                let b = rng.gen_range(a + 1..=n);
                let core = pure_generator(n, a, b);
                let core = if rng.gen_bool(0.5) { core.inverse() } else { core };
                word = word.concat(&g).concat(&core).concat(&g.inverse());
            }
            assert!(word.permutation().is_identity());
            let lhs = ab_row(&group.eval(&word));
            let lk = linking_numbers(&word);
            let mut rhs = vec![0i64; n];
            for (&(a, b), &c) in &lk {
                assert_eq!(c.rem_euclid(2), 0, "pure words cross evenly");
                let row = &gen_rows[&(a, b)];
                for (r, v) in rhs.iter_mut().zip(row) {
                    *r += (c / 2) * v;
                }
            }
            assert_eq!(lhs, rhs, "word {:?}", word);
        }
    }
}

#[test]
fn conjugation_acts_on_u_classes_as_the_symmetric_group_on_roots() {
    // in the abelianized pure subgroup the u-classes form the A_{n-1} root
    // lattice (u_i the i-th simple root e_i - e_{i+1}); conjugation by g
    // must send the class of u_i to the root e_{pi(i)} - e_{pi(i+1)} for
    // pi the permutation of g. The expected row needs only pi.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4096);
    let root_coords = |a: usize, b: usize, n: usize| -> Vec<i64> {
        // e_a - e_b in simple-root coordinates, sign included
        let mut row = vec![0i64; n - 1];
        let (lo, hi, sign) = if a < b { (a, b, 1) } else { (b, a, -1) };
        for k in lo..hi {
            row[k - 1] = sign;
        }
        row
    };
    for n in 3..=5usize {
        let group = BTilde::new(n);
        for _ in 0..100 {
            let len = rng.gen_range(0..10);
            let letters: Vec<i32> = (0..len)
                .map(|_| {
                    let i = rng.gen_range(1..n as i32);
                    if rng.gen_bool(0.5) {
                        i
                    } else {
                        -i
                    }
                })
                .collect();
            let g = group.eval(&bcc_core::words::BraidWord::from_letters(n, &letters));
            let pi = g.perm().clone();
            for i in 1..n {
                let ui = group.from_pure(PTildeElem::u(n, i));
                let conj = group.conjugate(&ui, &g);
                assert!(conj.is_pure());
                assert_eq!(conj.pure_part().alpha(), 0);
                let expected = root_coords(pi.image(i), pi.image(i + 1), n);
                assert_eq!(conj.pure_part().beta(), &expected[..], "u_{i} by {:?}", pi);
            }
        }
    }
}

#[test]
fn presentation_json_is_shared_between_modules() {
    // the Van Kampen output exports to the shared presentation schema and
    // re-imports with the same abelianization
    let file: FactorizationFile = serde_json::from_str(
        r#"{ "strands": 2,
             "factors": [ { "conjugator": [], "core": 1, "exp": 1 },
                          { "conjugator": [], "core": 1, "exp": 1 } ] }"#,
    )
    .unwrap();
    let f = file.into_factorization().unwrap();
    let vk = vk_presentation(&f, true, false).unwrap();
    let exported = vk.presentation.export();
    let text = serde_json::to_string(&exported).unwrap();
    let parsed: bcc_core::fpgroup::PresentationExport = serde_json::from_str(&text).unwrap();
    let back = Presentation::import(&parsed).unwrap();
    assert_eq!(back.abelianization(), vk.presentation.abelianization());
    assert_eq!(back.abelianization().to_string(), "Z_2");
}

#[test]
fn theta_kernel_abelianization_for_tiny_covers() {
    // a smooth branch curve carries the double-cover representation: every
    // meridian maps to the same transposition. The kernel of theta in the
    // complement group (which is Z for the smooth model) is the even part,
    // again Z: the subgroup presentation must abelianize to Z.
    let d = 3;
    let factors: Vec<_> = bcc_core::words::BraidWord::full_twist(d)
        .letters()
        .iter()
        .map(|&l| (bcc_core::braidvk::HalfTwistSpec::standard(d, l as usize), 1))
        .collect();
    let f = bcc_core::braidvk::BraidFactorization::new(d, factors).unwrap();
    let vk = vk_presentation(&f, false, false).unwrap();
    let theta =
        bcc_core::braidvk::MonodromyRep::new(2, vec![(1, 2), (1, 2), (1, 2)]).unwrap();
    let verdict = bcc_core::braidvk::validate_theta(&vk, &theta);
    assert!(verdict.pass(), "{:?}", verdict.violations);
    for r in vk.presentation.relators() {
        assert!(theta.image_of(r).is_identity());
    }
    let images: Vec<_> = (1..=3).map(|g| theta.generator_image(g)).collect();
    let table = bcc_core::fpgroup::CosetTable::from_permutation_action(&images);
    assert_eq!(table.index(), 2);
    let sub = bcc_core::fpgroup::reidemeister_schreier(&vk.presentation, &table).unwrap();
    assert_eq!(sub.abelianization().to_string(), "Z");
}

#[test]
fn wire_format_matches_documented_shape() {
    let f = bcc_core::braidvk::conic_factorization();
    let wire = FactorizationFile::from_factorization(&f);
    let value = serde_json::to_value(&wire).unwrap();
    assert_eq!(value["schema"], 1);
    assert_eq!(value["strands"], 2);
    assert_eq!(value["factors"][0]["core"], 1);
    assert_eq!(value["factors"][0]["exp"], 1);
    assert!(value["factors"][0]["conjugator"].as_array().unwrap().is_empty());
}

#[test]
fn freeword_substitution_is_consistent_with_theta_images() {
    // image_of agrees with substituting transpositions: spot check
    let theta = bcc_core::braidvk::MonodromyRep::new(4, vec![(1, 2), (2, 3), (3, 4)]).unwrap();
    let w = FreeWord::from_letters(3, &[1, 2, -1, 3, 3]);
    let img = theta.image_of(&w);
    let expect = theta
        .generator_image(1)
        .then(&theta.generator_image(2))
        .then(&theta.generator_image(1))
        .then(&theta.generator_image(3))
        .then(&theta.generator_image(3));
    assert_eq!(img, expect);
}
