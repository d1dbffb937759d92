//! Randomized invariant suites and brute-force oracles.
//!
//! Each suite is deterministic in its seed and reports the first failing case.

use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diag::simultaneous_diagonalize_in_sma;
use crate::fixtures;
use crate::jordan::{
    algebra_embeds_into, all_algebra_automorphisms_inner, classify_jordan, embedding_map,
    extends_to_full_jordan_automorphism, jordan_embeds_into, synthesize_jordan, LinearMapOnSMA,
};
use crate::quasiorder::{is_increasing, QuasiOrder};
use crate::rankpres::{
    bounded_rank_preserver_check, classify_rank_preserver, nontrivial_g_rank_witness,
    rank_form_map, rank_identity_check, VerdictKind,
};
use crate::transmap::{random_transitive_map, TransitiveMap};
use crate::{GaussianRational as G, Matrix};

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
    pub elapsed: Duration,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

fn run_suite(
    name: &'static str,
    cases: usize,
    seed: u64,
    mut case: impl FnMut(&mut ChaCha8Rng) -> Result<(), String>,
) -> SuiteOutcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut first_failure = None;
    for k in 0..cases {
        if let Err(msg) = case(&mut rng) {
            failures += 1;
            first_failure.get_or_insert(format!("case {k}: {msg}"));
        }
    }
    SuiteOutcome {
        name,
        cases,
        failures,
        first_failure,
        elapsed: start.elapsed(),
    }
}

fn small_entry<R: Rng>(rng: &mut R) -> G {
    let re = rng.gen_range(-2..=2);
    if rng.gen_bool(0.15) {
        G::from_parts(re, 1, rng.gen_range(-1..=1), 1)
    } else {
        G::from(re)
    }
}

/// Closure of a random relation with edge density drawn per call.
pub fn random_quasi_order<R: Rng>(n: usize, rng: &mut R) -> QuasiOrder {
    let p = [0.1, 0.25, 0.4][rng.gen_range(0..3)];
    let edges: Vec<(usize, usize)> = (0..n)
        .cartesian_product(0..n)
        .filter(|&(i, j)| i != j && rng.gen_bool(p))
        .collect();
    QuasiOrder::from_edges(n, &edges, true).expect("indices in range")
}

/// Height-two relation: random pairs from a lower to an upper layer. Its
/// undirected cycles carry nontrivial transitive maps.
pub fn random_bipartite_order<R: Rng>(n: usize, rng: &mut R) -> QuasiOrder {
    let lower = (n / 2 + rng.gen_range(0..=1)).clamp(1, n);
    let edges: Vec<(usize, usize)> = (0..lower)
        .cartesian_product(lower..n)
        .filter(|_| rng.gen_bool(0.8))
        .collect();
    QuasiOrder::from_edges(n, &edges, false).expect("height two is transitive")
}

/// Either generator with equal probability.
pub fn random_relation<R: Rng>(n: usize, rng: &mut R) -> QuasiOrder {
    if rng.gen_bool(0.5) {
        random_quasi_order(n, rng)
    } else {
        random_bipartite_order(n, rng)
    }
}

/// A union of randomly chosen connected classes.
pub fn random_class_union<R: Rng>(rho: &QuasiOrder, rng: &mut R) -> Vec<usize> {
    let mut u: Vec<usize> = rho
        .approx_classes()
        .blocks
        .into_iter()
        .filter(|_| rng.gen_bool(0.5))
        .flatten()
        .collect();
    u.sort_unstable();
    u
}

/// A random element of `A_ρ`.
pub fn random_in_sma<R: Rng>(rho: &QuasiOrder, rng: &mut R) -> Matrix {
    let n = rho.n();
    Matrix::from_fn(n, n, |i, j| {
        if rho.contains(i, j) && rng.gen_bool(0.6) {
            small_entry(rng)
        } else {
            G::from(0)
        }
    })
}

/// A random invertible element of `A_ρ`, falling back to a diagonal one.
pub fn random_invertible_in<R: Rng>(rho: &QuasiOrder, rng: &mut R) -> Matrix {
    for _ in 0..50 {
        let m = random_in_sma(rho, rng);
        if m.rank() == rho.n() {
            return m;
        }
    }
    Matrix::diag((0..rho.n()).map(|_| G::from(rng.gen_range(1..=3))).collect())
}

pub fn random_invertible<R: Rng>(n: usize, rng: &mut R) -> Matrix {
    random_invertible_in(&QuasiOrder::full(n), rng)
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Synthesized Jordan embeddings classify back to themselves.
pub fn round_trip_suite(cases: usize, max_n: usize, seed: u64) -> SuiteOutcome {
    run_suite("round-trip", cases, seed, |rng| {
        let n = rng.gen_range(1..=max_n);
        let rho = random_relation(n, rng);
        let u = random_class_union(&rho, rng);
        let s = random_invertible(n, rng);
        let g = random_transitive_map::<G>(&rho, rng.gen());
        let phi = synthesize_jordan(&rho, &s, &u, &g).map_err(|e| e.to_string())?;
        let form = classify_jordan(&phi).map_err(|e| format!("{rho:?} U={u:?}: {e}"))?;
        let back = form.reconstruct().map_err(|e| e.to_string())?;
        check(back == phi, || format!("reconstruction differs on {rho:?}"))
    })
}

/// `r(X) = r(PX + (I−P)X^t)` for class unions `U`.
pub fn rank_identity_suite(cases: usize, max_n: usize, seed: u64) -> SuiteOutcome {
    run_suite("rank-identity", cases, seed, |rng| {
        let n = rng.gen_range(1..=max_n);
        let rho = random_relation(n, rng);
        let u = random_class_union(&rho, rng);
        let x = random_in_sma(&rho, rng);
        let ok = rank_identity_check(&rho, &u, &x).map_err(|e| e.to_string())?;
        check(ok, || format!("{rho:?} U={u:?} X={x:?}"))
    })
}

/// Commuting diagonalizable families built inside random structural algebras.
pub fn diagonalization_suite(cases: usize, max_n: usize, seed: u64) -> SuiteOutcome {
    run_suite("diagonalization", cases, seed, |rng| {
        let n = rng.gen_range(1..=max_n);
        let rho = random_relation(n, rng);
        let s = random_invertible_in(&rho, rng);
        let s_inv = s.inverse().map_err(|e| e.to_string())?;
        let family: Vec<Matrix> = (0..rng.gen_range(1..=3))
            .map(|_| {
                let d = Matrix::diag((0..n).map(|_| small_entry(rng)).collect());
                &(&s * &d) * &s_inv
            })
            .collect();
        let t = simultaneous_diagonalize_in_sma(&rho, &family).map_err(|e| format!("{rho:?}: {e}"))?;
        let t_inv = t.inverse().map_err(|e| e.to_string())?;
        rho.check_support(&t).map_err(|e| e.to_string())?;
        rho.check_support(&t_inv).map_err(|e| e.to_string())?;
        check(
            family.iter().all(|f| (&(&t_inv * f) * &t).is_diagonal()),
            || format!("not diagonal on {rho:?}"),
        )
    })
}

/// Induced map of `g` with `S = I` and every class in `U`.
pub fn induced_map(g: &TransitiveMap<G>) -> LinearMapOnSMA<G> {
    let rho = g.rho();
    let n = rho.n();
    synthesize_jordan(rho, &Matrix::identity(n), &(0..n).collect::<Vec<_>>(), g)
        .expect("identity similarity")
}

/// Separator verdicts agree with sampled rank preservation of `g*`, and every
/// violation comes with a verified witness.
pub fn triviality_rank_suite(cases: usize, max_n: usize, seed: u64) -> SuiteOutcome {
    run_suite("triviality-vs-rank", cases, seed, |rng| {
        let n = rng.gen_range(2..=max_n.max(2));
        let rho = if rng.gen_bool(0.75) { random_bipartite_order(n, rng) } else { random_quasi_order(n, rng) };
        let g = random_transitive_map::<G>(&rho, rng.gen());
        let phi = induced_map(&g);
        let sampled = bounded_rank_preserver_check(&phi, n, rng.gen()).map_err(|e| e.to_string())?;
        if g.is_trivial() {
            return check(sampled.is_none(), || format!("trivial g fails rank on {rho:?}"));
        }
        check(sampled.is_some(), || format!("nontrivial g passes sampled ranks on {rho:?}"))?;
        let a = nontrivial_g_rank_witness(&g).map_err(|e| e.to_string())?;
        rho.check_support(&a).map_err(|e| e.to_string())?;
        let image = g.apply_induced(&a).map_err(|e| e.to_string())?;
        check(image.rank() != a.rank(), || "witness keeps the rank".into())
    })
}

/// Maps `L·T(P(·) + (I−P)(·)^t)T⁻¹` preserve ranks and classify back to their form.
pub fn rank_form_suite(cases: usize, max_n: usize, seed: u64) -> SuiteOutcome {
    run_suite("rank-preserver-form", cases, seed, |rng| {
        let n = rng.gen_range(1..=max_n);
        let rho = random_relation(n, rng);
        let u = random_class_union(&rho, rng);
        let t = random_invertible(n, rng);
        let left = if rng.gen_bool(0.5) { Matrix::identity(n) } else { random_invertible(n, rng) };
        let inner = synthesize_jordan(&rho, &t, &u, &TransitiveMap::trivial(rho.clone()))
            .map_err(|e| e.to_string())?;
        let phi = inner.compose_outer(&left, &Matrix::identity(n));
        let sampled = bounded_rank_preserver_check(&phi, n, rng.gen()).map_err(|e| e.to_string())?;
        check(sampled.is_none(), || format!("rank form fails sampled ranks on {rho:?}"))?;
        let verdict = classify_rank_preserver(&phi).map_err(|e| e.to_string())?;
        check(verdict.kind == VerdictKind::RankPreserver, || format!("{:?} on {rho:?}", verdict.kind))?;
        let back = rank_form_map(&rho, &verdict.certificate).map_err(|e| e.to_string())?;
        check(back == phi, || "certificate does not reconstruct".into())
    })
}

/// Class unions of `rho` by brute force over subsets of points.
pub fn all_class_unions(rho: &QuasiOrder) -> Vec<Vec<usize>> {
    let n = rho.n();
    (0..1u64 << n)
        .map(|mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|u| rho.class_union_mask(u).is_ok())
        .collect()
}

/// Existence of Jordan and of algebra embeddings by enumerating every `(U, π)`.
pub fn brute_force_embeddings(rho: &QuasiOrder, target: &QuasiOrder) -> (bool, bool) {
    let n = rho.n();
    if n != target.n() {
        return (false, false);
    }
    let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
    let increasing = |src: &QuasiOrder| perms.iter().any(|p| is_increasing(src, target, p));
    let algebra = increasing(rho);
    let jordan = all_class_unions(rho)
        .iter()
        .any(|u| increasing(&rho.rho_u(u).expect("class union")));
    (jordan, algebra)
}

/// Embedding searches agree with brute force on every ordered pair of the census,
/// and returned certificates are verified Jordan embeddings.
pub fn embedding_census_suite() -> SuiteOutcome {
    let census = fixtures::census();
    let pairs: Vec<(usize, usize)> = (0..census.len()).cartesian_product(0..census.len()).collect();
    let mut k = 0;
    run_suite("embedding-census", pairs.len(), 0, |_| {
        let (a, b) = pairs[k];
        k += 1;
        let ((an, rho), (bn, target)) = (&census[a], &census[b]);
        let (jordan, algebra) = brute_force_embeddings(rho, target);
        let found = jordan_embeds_into(rho, target);
        check(found.is_some() == jordan, || format!("{an} → {bn}: jordan search disagrees"))?;
        check(
            algebra_embeds_into(rho, target).is_some() == algebra,
            || format!("{an} → {bn}: algebra search disagrees"),
        )?;
        if let Some((u, perm)) = found {
            let phi: LinearMapOnSMA<G> = embedding_map(rho, &u, &perm).map_err(|e| e.to_string())?;
            phi.check_images_in(target).map_err(|e| format!("{an} → {bn}: {e}"))?;
            check(phi.is_jordan_homomorphism(), || format!("{an} → {bn}: not Jordan"))?;
            check(phi.image_rank() == rho.len(), || format!("{an} → {bn}: not injective"))?;
        }
        Ok(())
    })
}

/// Every transitive map among `samples` random ones is trivial.
fn sampled_all_trivial(rho: &QuasiOrder, samples: usize, seed: u64) -> bool {
    (0..samples as u64).all(|k| random_transitive_map::<G>(rho, seed + k).is_trivial())
}

/// Every algebra automorphism of `A_ρ` is inner, by enumerating the automorphisms
/// of `ρ` and testing `(π(j), j) ∈ ρ`, with triviality of transitive maps sampled.
pub fn brute_force_inner(rho: &QuasiOrder, seed: u64) -> bool {
    let n = rho.n();
    let perms_ok = (0..n)
        .permutations(n)
        .filter(|p| is_increasing(rho, rho, p))
        .all(|p| (0..n).all(|j| rho.contains(p[j], j)));
    perms_ok && sampled_all_trivial(rho, 40, seed)
}

/// Every Jordan automorphism of `A_ρ` extends to `M_n`, by enumerating all
/// `(U, π)` shapes and testing multiplicativity or antimultiplicativity.
pub fn brute_force_extends(rho: &QuasiOrder, seed: u64) -> bool {
    let n = rho.n();
    let shapes_ok = all_class_unions(rho).iter().all(|u| {
        let rho_u = rho.rho_u(u).expect("class union");
        (0..n)
            .permutations(n)
            .filter(|p| is_increasing(&rho_u, rho, p))
            .all(|p| {
                let phi: LinearMapOnSMA<G> = embedding_map(rho, u, &p).expect("valid shape");
                phi.is_multiplicative() || phi.is_antimultiplicative()
            })
    });
    shapes_ok && sampled_all_trivial(rho, 40, seed)
}

/// Inner and extension predicates agree with brute force on the census.
pub fn automorphism_predicate_suite(seed: u64) -> SuiteOutcome {
    let census = fixtures::census();
    let mut k = 0;
    run_suite("automorphism-predicates", census.len(), seed, |_| {
        let (name, rho) = &census[k];
        k += 1;
        check(
            all_algebra_automorphisms_inner(rho) == brute_force_inner(rho, seed),
            || format!("{name}: inner predicate disagrees"),
        )?;
        check(
            extends_to_full_jordan_automorphism(rho) == brute_force_extends(rho, seed),
            || format!("{name}: extension predicate disagrees"),
        )
    })
}

/// Every suite, sized for a quick interactive run.
pub fn run_all(seed: u64, max_n: usize) -> Vec<SuiteOutcome> {
    vec![
        round_trip_suite(200, max_n.min(6), seed),
        rank_identity_suite(1000, max_n.min(8), seed),
        diagonalization_suite(100, max_n.min(6), seed),
        triviality_rank_suite(100, max_n.min(6), seed),
        rank_form_suite(50, max_n.min(5), seed),
        embedding_census_suite(),
        automorphism_predicate_suite(seed),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_oracles_on_small_relations() {
        assert_eq!(brute_force_embeddings(&QuasiOrder::diagonal(3), &fixtures::wedge()), (true, true));
        assert_eq!(brute_force_embeddings(&fixtures::vee(), &fixtures::wedge()), (true, false));
        assert!(brute_force_inner(&QuasiOrder::upper_triangular(3), 0));
        assert!(!brute_force_inner(&QuasiOrder::diagonal(2), 0));
        assert!(!brute_force_extends(&fixtures::rectangle(), 0));
        assert_eq!(all_class_unions(&fixtures::relation(4, &[(1, 2), (3, 4)])).len(), 4);
    }

    #[test]
    fn quick_suites_pass() {
        for outcome in [
            round_trip_suite(20, 4, 1),
            rank_identity_suite(50, 5, 1),
            diagonalization_suite(10, 4, 1),
            triviality_rank_suite(10, 4, 1),
            rank_form_suite(10, 4, 1),
        ] {
            assert!(outcome.passed(), "{}: {:?}", outcome.name, outcome.first_failure);
        }
    }
}
