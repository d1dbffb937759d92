use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sma_core::diag::spectral_idempotents;
use sma_core::jordan::{
    classify_jordan, embedding_map, jordan_embeds_into, synthesize_jordan, LinearMapOnSMA,
};
use sma_core::quasiorder::is_increasing;
use sma_core::rankpres::{
    bounded_rank_preserver_check, certify_rank_one_preserver, classify_rank_preserver,
    nontrivial_g_rank_witness, rank_identity_check, VerdictKind,
};
use sma_core::selftest::{
    induced_map, random_class_union, random_in_sma, random_invertible, random_invertible_in,
    random_relation,
};
use sma_core::transmap::random_trivial_map;
use sma_core::{
    all_transitive_trivial, random_transitive_map, GaussianRational as G, Matrix, QuasiOrder, Rational,
    RationalMatrix, Scalar, TransitiveMap, TrivialityCertificate,
};

fn gaussian() -> impl Strategy<Value = G> {
    (-20i64..=20, 1i64..=6, -20i64..=20, 1i64..=6).prop_map(|(a, b, c, d)| G::from_parts(a, b, c, d))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Relations whose connected classes have at most three points.
fn small_block_relation(r: &mut ChaCha8Rng, n: usize) -> QuasiOrder {
    let mut edges = Vec::new();
    let mut start = 0;
    while start < n {
        let size = r.gen_range(1..=3).min(n - start);
        for i in start..start + size {
            for j in start..start + size {
                if i != j && r.gen_bool(0.5) {
                    edges.push((i, j));
                }
            }
        }
        start += size;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), r);
    let edges: Vec<(usize, usize)> = edges.into_iter().map(|(i, j)| (perm[i], perm[j])).collect();
    QuasiOrder::from_edges(n, &edges, true).unwrap()
}

proptest! {
    #[test]
    fn field_axioms(a in gaussian(), b in gaussian(), c in gaussian()) {
        prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
        prop_assert_eq!((a.clone() * b.clone()).conj(), a.conj() * b.conj());
        if a != G::from(0) {
            prop_assert_eq!(a.clone() * (G::from(1) / a.clone()), G::from(1));
        }
        prop_assert_eq!(a.to_string().parse::<G>().unwrap(), a);
    }

    #[test]
    fn rank_and_inverse(seed: u64, n in 1usize..6) {
        let mut r = rng(seed);
        let a = random_in_sma(&QuasiOrder::full(n), &mut r);
        prop_assert_eq!(a.rank(), a.transpose().rank());
        let s = random_invertible(n, &mut r);
        prop_assert!((&s * &s.inverse().unwrap()).is_identity());
        let kernel = a.kernel();
        prop_assert_eq!(kernel.len() + a.rank(), n);
        for v in kernel {
            prop_assert!((&a * &Matrix::column(v)).is_zero());
        }
    }

    #[test]
    fn closure_and_block_form(seed: u64, n in 1usize..8) {
        let rho = random_relation(n, &mut rng(seed));
        prop_assert_eq!(QuasiOrder::from_edges(n, &rho.pairs(), false).unwrap(), rho.clone());
        prop_assert!((0..n).all(|i| rho.contains(i, i)));
        prop_assert_eq!(rho.reverse().reverse(), rho.clone());
        let bt = rho.block_triangular_form();
        let permuted = rho.permuted(&bt.perm);
        let mut block = Vec::new();
        for (b, &size) in bt.sizes.iter().enumerate() {
            block.extend(std::iter::repeat_n(b, size));
        }
        for (i, j) in permuted.pairs() {
            prop_assert!(block[i] <= block[j]);
        }
        let classes = rho.approx_classes();
        let mut seen: Vec<usize> = classes.blocks.iter().flatten().copied().collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
    }

    #[test]
    fn triviality_certificates_check_out(seed: u64, n in 2usize..7) {
        let mut r = rng(seed);
        let rho = random_relation(n, &mut r);
        let g = random_transitive_map::<G>(&rho, r.gen());
        match g.triviality_witness() {
            TrivialityCertificate::Separator(s) => {
                prop_assert_eq!(TransitiveMap::from_separator(rho.clone(), &s).unwrap(), g.clone());
                prop_assert!(g.rectangle_minor_condition().is_ok());
            }
            TrivialityCertificate::Violation { walk, product } => {
                prop_assert_ne!(product.clone(), G::from(1));
                prop_assert_eq!(g.walk_product(&walk), product);
            }
        }
        if all_transitive_trivial(&rho) {
            prop_assert!(g.is_trivial());
        }
        prop_assert!(random_trivial_map::<G>(&rho, &mut r).is_trivial());
    }

    #[test]
    fn spectral_decomposition(seed: u64, n in 1usize..6) {
        let mut r = rng(seed);
        let s = random_invertible(n, &mut r);
        let d = Matrix::diag((0..n).map(|_| G::from(r.gen_range(-2..=2))).collect());
        let a = &(&s * &d) * &s.inverse().unwrap();
        let dec = spectral_idempotents(&a).unwrap();
        prop_assert!(dec.verify(&a));
        let idem = dec.idempotents();
        let mut sum = Matrix::zeros(n, n);
        for (k, e) in idem.iter().enumerate() {
            sum = &sum + e;
            for (l, f) in idem.iter().enumerate() {
                let prod = e * f;
                let expected = if k == l { prod == *e } else { prod.is_zero() };
                prop_assert!(expected);
            }
        }
        prop_assert!(sum.is_identity());
    }

    #[test]
    fn synthesized_maps_are_jordan_and_classify_back(seed: u64, n in 1usize..6) {
        let mut r = rng(seed);
        let rho = random_relation(n, &mut r);
        let u = random_class_union(&rho, &mut r);
        let s = random_invertible(n, &mut r);
        let g = random_transitive_map::<G>(&rho, r.gen());
        let phi = synthesize_jordan(&rho, &s, &u, &g).unwrap();
        prop_assert!(phi.is_jordan_homomorphism());
        prop_assert_eq!(phi.image_rank(), rho.len());
        let form = classify_jordan(&phi).unwrap();
        prop_assert_eq!(form.reconstruct().unwrap(), phi);
    }

    #[test]
    fn embedding_certificates(seed: u64, n in 1usize..5) {
        let mut r = rng(seed);
        let a = random_relation(n, &mut r);
        let b = random_relation(n, &mut r);
        if let Some((u, perm)) = jordan_embeds_into(&a, &b) {
            prop_assert!(is_increasing(&a.rho_u(&u).unwrap(), &b, &perm));
            let phi: LinearMapOnSMA<G> = embedding_map(&a, &u, &perm).unwrap();
            prop_assert!(phi.check_images_in(&b).is_ok());
            prop_assert!(phi.is_jordan_homomorphism());
        }
        prop_assert!(jordan_embeds_into(&a, &a).is_some());
    }

    #[test]
    fn rank_identity(seed: u64, n in 1usize..9) {
        let mut r = rng(seed);
        let rho = random_relation(n, &mut r);
        let u = random_class_union(&rho, &mut r);
        let x = random_in_sma(&rho, &mut r);
        prop_assert!(rank_identity_check(&rho, &u, &x).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_forms_preserve_rank_and_classify(seed: u64, n in 1usize..6) {
        let mut r = rng(seed);
        let rho = random_relation(n, &mut r);
        let u = random_class_union(&rho, &mut r);
        let t = random_invertible(n, &mut r);
        let sep: Vec<G> = (0..n).map(|_| G::from(r.gen_range(1..=3))).collect();
        let g = TransitiveMap::from_separator(rho.clone(), &sep).unwrap();
        let phi = synthesize_jordan(&rho, &t, &u, &g).unwrap();
        prop_assert!(bounded_rank_preserver_check(&phi, n, seed).unwrap().is_none());
        prop_assert_eq!(classify_rank_preserver(&phi).unwrap().kind, VerdictKind::RankPreserver);
    }

    #[test]
    fn nontrivial_maps_have_verified_witnesses(seed: u64, n in 3usize..8) {
        let mut r = rng(seed);
        let rho = random_relation(n, &mut r);
        let g = random_transitive_map::<G>(&rho, r.gen());
        match nontrivial_g_rank_witness(&g) {
            Ok(a) => {
                prop_assert!(!g.is_trivial());
                prop_assert!(rho.check_support(&a).is_ok());
                prop_assert_ne!(g.apply_induced(&a).unwrap().rank(), a.rank());
                prop_assert_eq!(classify_rank_preserver(&induced_map(&g)).unwrap().kind, VerdictKind::Neither);
            }
            Err(e) => {
                prop_assert_eq!(e, sma_core::Error::GIsTrivial);
                prop_assert!(g.is_trivial());
            }
        }
    }

    #[test]
    fn rank_one_certification_matches_minors(seed: u64, n in 2usize..6) {
        let mut r = rng(seed);
        let rho = random_relation(n, &mut r);
        let u = random_class_union(&rho, &mut r);
        let s = random_invertible_in(&QuasiOrder::full(n), &mut r);
        let g = random_transitive_map::<G>(&rho, r.gen());
        let phi = synthesize_jordan(&rho, &s, &u, &g).unwrap();
        let verdict = certify_rank_one_preserver(&phi).unwrap();
        let minors_ok = g.rectangle_minor_condition().is_ok();
        prop_assert_eq!(verdict.kind == VerdictKind::RankOnePreserver, minors_ok);
    }

    /// Classes of at most three points: every transitive map is trivial and every
    /// Jordan embedding preserves rank.
    #[test]
    fn small_classes_force_rank_preservation(seed: u64, n in 1usize..7) {
        let mut r = rng(seed);
        let rho = small_block_relation(&mut r, n);
        prop_assert!(rho.approx_classes().blocks.iter().all(|b| b.len() <= 3));
        prop_assert!(all_transitive_trivial(&rho));
        let u = random_class_union(&rho, &mut r);
        let s = random_invertible(n, &mut r);
        let g = random_transitive_map::<G>(&rho, r.gen());
        let phi = synthesize_jordan(&rho, &s, &u, &g).unwrap();
        prop_assert_eq!(classify_rank_preserver(&phi).unwrap().kind, VerdictKind::RankPreserver);
        prop_assert_eq!(certify_rank_one_preserver(&phi).unwrap().kind, VerdictKind::RankOnePreserver);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rational_scalars_round_trip(seed: u64, n in 1usize..5) {
        let mut r = rng(seed);
        let rho = random_relation(n, &mut r);
        let u = random_class_union(&rho, &mut r);
        let s = RationalMatrix::from_fn(n, n, |i, j| {
            Rational::from_i64(if i == j { r.gen_range(1..=3) } else { r.gen_range(-1..=1) } * (1 + (i > j) as i64))
        });
        prop_assume!(s.rank() == n);
        let g = random_transitive_map::<Rational>(&rho, r.gen());
        let phi = synthesize_jordan(&rho, &s, &u, &g).unwrap();
        let form = classify_jordan(&phi).unwrap();
        prop_assert_eq!(form.reconstruct().unwrap(), phi);
    }
}
