//! Rank-one and rank preservers on `A_ρ`: samplers, certified decisions, and
//! counterexample witnesses built from alternating chains.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Pair, Result};
use crate::jordan::{classify_jordan, CanonicalJordanForm, LinearMapOnSMA};
use crate::matrix::DenseMatrix;
use crate::quasiorder::{QuasiOrder, Rectangle};
use crate::scalar::Scalar;
use crate::transmap::{TransitiveMap, TrivialityCertificate};

/// Seed used when a decision procedure falls back on sampling.
const INTERNAL_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictKind {
    RankOnePreserver,
    RankPreserver,
    Neither,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::RankOnePreserver => "RankOnePreserver",
            VerdictKind::RankPreserver => "RankPreserver",
            VerdictKind::Neither => "Neither",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample<T> {
    pub matrix: DenseMatrix<T>,
    pub rank: usize,
    pub image_rank: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate<T> {
    /// A Jordan embedding whose weights pass every rectangle minor.
    Jordan(CanonicalJordanForm<T>),
    /// `φ(X) = L · T(P X + (I−P) X^t)T⁻¹` with `L = φ(I)` invertible.
    RankForm {
        left: DenseMatrix<T>,
        t: DenseMatrix<T>,
        u: Vec<usize>,
    },
    Counterexample(Counterexample<T>),
    /// Units on which the Jordan identity fails; no rank counterexample was found.
    JordanViolation((Pair, Pair)),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreserverVerdict<T> {
    pub kind: VerdictKind,
    pub certificate: Certificate<T>,
}

impl<T: Scalar> PreserverVerdict<T> {
    fn neither(c: Counterexample<T>) -> Self {
        PreserverVerdict {
            kind: VerdictKind::Neither,
            certificate: Certificate::Counterexample(c),
        }
    }
}

fn counterexample<T: Scalar>(
    phi: &LinearMapOnSMA<T>,
    x: DenseMatrix<T>,
    reason: &str,
) -> Result<Counterexample<T>> {
    let image_rank = phi.apply(&x)?.rank();
    Ok(Counterexample {
        rank: x.rank(),
        image_rank,
        matrix: x,
        reason: reason.to_string(),
    })
}

fn nonzero_small<R: Rng>(rng: &mut R) -> i64 {
    *[-2i64, -1, 1, 2].choose(rng).unwrap()
}

/// A random `uv*` with `supp u × supp v ⊆ ρ`.
pub fn random_rank_one<T: Scalar, R: Rng>(rho: &QuasiOrder, rng: &mut R) -> DenseMatrix<T> {
    let n = rho.n();
    let first = rng.gen_range(0..n);
    let mut rows = vec![first];
    let mut cols: Vec<usize> = rho.successors(first).collect();
    let mut others: Vec<usize> = (0..n).filter(|&i| i != first).collect();
    others.shuffle(rng);
    for r in others {
        if rng.gen_bool(0.5) {
            let narrowed: Vec<usize> = cols.iter().copied().filter(|&c| rho.contains(r, c)).collect();
            if !narrowed.is_empty() {
                rows.push(r);
                cols = narrowed;
            }
        }
    }
    let mut chosen: Vec<usize> = cols.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    if chosen.is_empty() {
        chosen.push(*cols.choose(rng).unwrap());
    }
    let mut u = vec![T::zero(); n];
    let mut v = vec![T::zero(); n];
    for r in rows {
        u[r] = T::from_i64(nonzero_small(rng));
    }
    for c in chosen {
        v[c] = T::from_i64(nonzero_small(rng));
    }
    DenseMatrix::outer(&u, &v)
}

pub fn sample_rank_one_in_sma<T: Scalar>(rho: &QuasiOrder, count: usize, seed: u64) -> Vec<DenseMatrix<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_rank_one(rho, &mut rng)).collect()
}

/// A random element of `A_ρ` of rank exactly `k`: sums of `k` random rank-one
/// elements, retried, then a diagonal fallback.
pub fn random_rank_k<T: Scalar, R: Rng>(rho: &QuasiOrder, k: usize, rng: &mut R) -> Option<DenseMatrix<T>> {
    let n = rho.n();
    if k > n {
        return None;
    }
    if k == 0 {
        return Some(DenseMatrix::zeros(n, n));
    }
    for _ in 0..30 {
        let mut x = DenseMatrix::zeros(n, n);
        for _ in 0..k {
            x = &x + &random_rank_one(rho, rng);
        }
        if x.rank() == k {
            return Some(x);
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let mut x = DenseMatrix::zeros(n, n);
    for &i in &idx[..k] {
        x.set(i, i, T::from_i64(nonzero_small(rng)));
    }
    Some(x)
}

/// First sample whose image does not have rank one.
pub fn is_rank_one_preserver_sampled<T: Scalar>(
    phi: &LinearMapOnSMA<T>,
    samples: &[DenseMatrix<T>],
) -> Result<Option<Counterexample<T>>> {
    for x in samples {
        let r = phi.apply(x)?.rank();
        if r != 1 {
            return Ok(Some(counterexample(phi, x.clone(), "rank-one matrix maps to rank ≠ 1")?));
        }
    }
    Ok(None)
}

/// `E_ij + E_il + E_kj + E_kl`
pub fn rectangle_indicator<T: Scalar>(n: usize, r: &Rectangle) -> DenseMatrix<T> {
    let mut x = DenseMatrix::zeros(n, n);
    for i in [r.rows.0, r.rows.1] {
        for j in [r.cols.0, r.cols.1] {
            x.set(i, j, T::one());
        }
    }
    x
}

fn is_unital<T: Scalar>(phi: &LinearMapOnSMA<T>) -> Result<bool> {
    Ok(phi.apply(&DenseMatrix::identity(phi.n()))?.is_identity())
}

/// Certified rank-one preservation for unital maps and for Jordan maps with
/// nonvanishing unit images.
pub fn certify_rank_one_preserver<T: Scalar>(phi: &LinearMapOnSMA<T>) -> Result<PreserverVerdict<T>> {
    if phi.jordan_violation().is_some() {
        if !is_unital(phi)? {
            return Err(Error::NotUnital);
        }
        let samples = sample_rank_one_in_sma(phi.rho(), 1000, INTERNAL_SEED);
        let structural: Vec<DenseMatrix<T>> = phi
            .rho()
            .rectangles()
            .iter()
            .map(|r| rectangle_indicator(phi.n(), r))
            .collect();
        let all: Vec<DenseMatrix<T>> = structural.into_iter().chain(samples).collect();
        return match is_rank_one_preserver_sampled(phi, &all)? {
            Some(c) => Ok(PreserverVerdict::neither(c)),
            None => Err(Error::InternalInconsistency(
                "unital map preserves sampled rank-one matrices but is not Jordan".into(),
            )),
        };
    }
    let form = classify_jordan(phi)?;
    match form.g.rectangle_minor_condition() {
        Ok(()) => Ok(PreserverVerdict {
            kind: VerdictKind::RankOnePreserver,
            certificate: Certificate::Jordan(form),
        }),
        Err(v) => {
            let x = rectangle_indicator(phi.n(), &v.rectangle);
            Ok(PreserverVerdict::neither(counterexample(
                phi,
                x,
                "rectangle minor of the weights is nonzero",
            )?))
        }
    }
}

/// Minimal chain `a = i_0, …, i_m = b` whose consecutive pairs alternate in
/// direction. The tag records the shape:
///
/// | case | first pair    | last pair       | `m`  |
/// |------|---------------|-----------------|------|
/// | 1    | `(a, i_1)`    | `(i_{m−1}, b)`  | odd  |
/// | 2    | `(a, i_1)`    | `(b, i_{m−1})`  | even |
/// | 3    | `(i_1, a)`    | `(i_{m−1}, b)`  | even |
/// | 4    | `(i_1, a)`    | `(b, i_{m−1})`  | odd  |
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternatingChain {
    pub case: u8,
    pub seq: Vec<usize>,
}

impl AlternatingChain {
    pub fn m(&self) -> usize {
        self.seq.len() - 1
    }

    /// The listed strict pairs, in order.
    pub fn pairs(&self) -> Vec<Pair> {
        let forward_first = self.case <= 2;
        self.seq
            .windows(2)
            .enumerate()
            .map(|(t, w)| {
                // Odd steps (1-based) point forward in cases (1)–(2).
                if (t % 2 == 0) == forward_first {
                    (w[0], w[1])
                } else {
                    (w[1], w[0])
                }
            })
            .collect()
    }
}

fn chain_within(rho: &QuasiOrder, allowed: &[bool], a: usize, b: usize) -> Result<AlternatingChain> {
    let n = rho.n();
    let mut prev = vec![usize::MAX; n];
    prev[a] = a;
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        if x == b {
            break;
        }
        for y in 0..n {
            if allowed[y] && prev[y] == usize::MAX && y != x && (rho.contains(x, y) || rho.contains(y, x)) {
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    if prev[b] == usize::MAX {
        return Err(Error::NotEquivalent(a, b));
    }
    let mut seq = vec![b];
    while *seq.last().unwrap() != a {
        seq.push(prev[*seq.last().unwrap()]);
    }
    seq.reverse();
    let m = seq.len() - 1;
    let forward = rho.contains(a, seq[1]);
    let case = match (forward, m % 2 == 1) {
        (true, true) => 1,
        (true, false) => 2,
        (false, false) => 3,
        (false, true) => 4,
    };
    let chain = AlternatingChain { case, seq };
    if chain.pairs().iter().any(|&(i, j)| !rho.contains(i, j)) {
        return Err(Error::InternalInconsistency(
            "shortest chain does not alternate".into(),
        ));
    }
    Ok(chain)
}

/// Shortest chain between `a` and `b` in the undirected graph on `ρ^×`.
pub fn chain_of_alternating_pairs(rho: &QuasiOrder, a: usize, b: usize) -> Result<AlternatingChain> {
    let n = rho.n();
    for index in [a, b] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, n });
        }
    }
    if a == b {
        return Err(Error::NotEquivalent(a, b));
    }
    chain_within(rho, &vec![true; n], a, b)
}

/// For in-neighbours `a ≠ b` of `v`: the rectangle `{a,b} × {b,v}` when the
/// chain has length one, else the ±1 chain matrix with column `v` the
/// alternating sum of the chain columns. Case (2) chains only.
fn chain_probe<T: Scalar>(rho: &QuasiOrder, chain: &AlternatingChain, v: usize) -> Option<DenseMatrix<T>> {
    let n = rho.n();
    let (a, b) = (chain.seq[0], *chain.seq.last().unwrap());
    let mut x = DenseMatrix::zeros(n, n);
    if chain.m() == 1 {
        let (top, bottom) = if rho.contains(a, b) { (a, b) } else { (b, a) };
        for i in [top, bottom] {
            for j in [bottom, v] {
                x.set(i, j, T::one());
            }
        }
        return Some(x);
    }
    if chain.case != 2 {
        return None;
    }
    let s = &chain.seq;
    let half = chain.m() / 2;
    for t in 0..half {
        let sign = if t % 2 == 0 { T::one() } else { -T::one() };
        x.set(s[2 * t], s[2 * t + 1], sign.clone());
        x.set(s[2 * t + 2], s[2 * t + 1], sign);
    }
    x.set(a, v, T::one());
    x.set(b, v, if (half - 1).is_multiple_of(2) { T::one() } else { -T::one() });
    Some(x)
}

fn strict_in_neighbours(rho: &QuasiOrder, v: usize, below: usize) -> Vec<usize> {
    (0..below).filter(|&i| i != v && rho.contains(i, v)).collect()
}

/// Witness for a weight map `h ≡ 1` on `{0..v}²` differing at in-neighbours
/// `a`, `b` of `v`, connected inside `{0..v}`.
fn witness_for_pair<T: Scalar>(
    rho: &QuasiOrder,
    h: &TransitiveMap<T>,
    v: usize,
    a: usize,
    b: usize,
) -> Result<DenseMatrix<T>> {
    let allowed: Vec<bool> = (0..rho.n()).map(|i| i < v).collect();
    let chain = chain_within(rho, &allowed, a, b)?;
    let m = chain.m();
    if m == 1 || chain.case == 2 {
        return Ok(chain_probe(rho, &chain, v).expect("case (2) or length one"));
    }
    let c = if chain.case == 1 { chain.seq[m - 1] } else { chain.seq[1] };
    if h.weight(a, v) != h.weight(c, v) {
        witness_for_pair(rho, h, v, a, c)
    } else {
        witness_for_pair(rho, h, v, c, b)
    }
}

/// A matrix `A ∈ A_ρ` with `rank g*(A) ≠ rank A`, for nontrivial `g`.
pub fn nontrivial_g_rank_witness<T: Scalar>(g: &TransitiveMap<T>) -> Result<DenseMatrix<T>> {
    if g.is_trivial() {
        return Err(Error::GIsTrivial);
    }
    let rho = g.rho();
    let n = rho.n();
    // Least prefix on which g stops being trivial; v is its last element.
    let k = (1..=n)
        .find(|&k| !g.restrict_prefix(k).is_trivial())
        .expect("g is nontrivial on the whole set");
    let v = k - 1;
    let TrivialityCertificate::Separator(s) = g.restrict_prefix(v).triviality_witness() else {
        unreachable!("prefix before v is trivial");
    };
    let scale = |i: usize| if i == v { T::one() } else { s[i].clone() };
    // h(i,j) = s(j)/s(i) g(i,j) has h ≡ 1 below v and h* = D⁻¹g*(·)D.
    let prefix = g.restrict_prefix(k);
    let weights = prefix
        .weights()
        .iter()
        .map(|(&(i, j), w)| ((i, j), scale(j).div_ref(&scale(i)).mul_ref(w)))
        .collect();
    let h = TransitiveMap::validate(prefix.rho().clone(), weights)?;

    let a = find_violating_pair(&h, v).map(|(a, b)| witness_for_pair(h.rho(), &h, v, a, b));
    let a = match a {
        Some(found) => found?,
        None => {
            let ht = h.transpose();
            let (a, b) = find_violating_pair(&ht, v).ok_or_else(|| {
                Error::InternalInconsistency("no violating pair at the extension vertex".into())
            })?;
            witness_for_pair(ht.rho(), &ht, v, a, b)?.transpose()
        }
    };
    let a = a.padded(n, n);
    let before = a.rank();
    let after = g.apply_induced(&a)?.rank();
    if before == after {
        return Err(Error::InternalInconsistency("witness does not change the rank".into()));
    }
    Ok(a)
}

/// In-neighbours `a < b` of `v`, connected below `v`, with `h(a,v) ≠ h(b,v)`.
fn find_violating_pair<T: Scalar>(h: &TransitiveMap<T>, v: usize) -> Option<(usize, usize)> {
    let rho = h.rho();
    let below = rho.restrict_prefix(v);
    let classes = below.approx_classes();
    let ins = strict_in_neighbours(rho, v, v);
    for (x, &a) in ins.iter().enumerate() {
        for &b in &ins[x + 1..] {
            if classes.block_of(a) == classes.block_of(b) && h.weight(a, v) != h.weight(b, v) {
                return Some((a, b));
            }
        }
    }
    None
}

/// Full decision for linear rank preservers, with non-unital maps reduced by `φ(I)⁻¹`.
pub fn classify_rank_preserver<T: Scalar>(phi: &LinearMapOnSMA<T>) -> Result<PreserverVerdict<T>> {
    let n = phi.n();
    let id = DenseMatrix::identity(n);
    let phi_i = phi.apply(&id)?;
    let Ok(left_inv) = phi_i.inverse() else {
        return Ok(PreserverVerdict::neither(counterexample(
            phi,
            id,
            "fails unitality: the image of the identity is singular",
        )?));
    };
    let psi = phi.compose_outer(&left_inv, &id);
    let form = match classify_jordan(&psi) {
        Ok(form) => form,
        Err(Error::VanishingUnitImage(p)) => {
            return Ok(PreserverVerdict::neither(counterexample(
                phi,
                DenseMatrix::unit(n, p.0, p.1),
                "fails rank: a unit maps to zero",
            )?));
        }
        Err(Error::NotJordan(pair)) => {
            let probe = bounded_rank_preserver_check(phi, n, INTERNAL_SEED)?;
            return Ok(match probe {
                Some(c) => PreserverVerdict::neither(c),
                None => PreserverVerdict {
                    kind: VerdictKind::Neither,
                    certificate: Certificate::JordanViolation(pair),
                },
            });
        }
        Err(e) => return Err(e),
    };
    match form.g.triviality_witness() {
        TrivialityCertificate::Separator(s) => {
            let gamma = DenseMatrix::diag(
                (0..n)
                    .map(|j| if form.u.contains(&j) { s[j].clone() } else { s[j].recip() })
                    .collect(),
            );
            let t = &form.s * &gamma;
            let certificate = Certificate::RankForm {
                left: phi_i,
                t,
                u: form.u,
            };
            if rank_form_map(phi.rho(), &certificate)? != *phi {
                return Err(Error::InternalInconsistency(
                    "rank preserver form does not reproduce the map".into(),
                ));
            }
            Ok(PreserverVerdict {
                kind: VerdictKind::RankPreserver,
                certificate,
            })
        }
        TrivialityCertificate::Violation { .. } => {
            let a = nontrivial_g_rank_witness(&form.g)?;
            let c = counterexample(phi, a, "fails rank: the associated transitive map is nontrivial")?;
            if c.rank == c.image_rank {
                return Err(Error::InternalInconsistency("rank witness does not transfer".into()));
            }
            Ok(PreserverVerdict::neither(c))
        }
    }
}

/// The map described by a [`Certificate::RankForm`].
pub fn rank_form_map<T: Scalar>(rho: &QuasiOrder, cert: &Certificate<T>) -> Result<LinearMapOnSMA<T>> {
    let Certificate::RankForm { left, t, u } = cert else {
        return Err(Error::PreconditionViolated("not a rank-preserver form".into()));
    };
    let inner = crate::jordan::synthesize_jordan(rho, t, u, &TransitiveMap::trivial(rho.clone()))?;
    Ok(inner.compose_outer(left, &DenseMatrix::identity(rho.n())))
}

/// `r(X) = r(PX + (I−P)X^t)` for a class union `U`.
pub fn rank_identity_check<T: Scalar>(rho: &QuasiOrder, u: &[usize], x: &DenseMatrix<T>) -> Result<bool> {
    let mask = rho.class_union_mask(u)?;
    rho.check_support(x)?;
    let n = rho.n();
    let xt = x.transpose();
    let mixed = DenseMatrix::from_fn(n, n, |i, j| {
        if mask[i] {
            x.get(i, j).clone()
        } else {
            xt.get(i, j).clone()
        }
    });
    Ok(x.rank() == mixed.rank())
}

/// Rectangle indicators and alternating-chain matrices of `A_ρ`, the shapes on
/// which non-rank-preserving induced maps are forced to fail.
pub fn structural_probes<T: Scalar>(rho: &QuasiOrder) -> Vec<DenseMatrix<T>> {
    let n = rho.n();
    let mut out: Vec<DenseMatrix<T>> = rho
        .rectangles()
        .iter()
        .map(|r| rectangle_indicator(n, r))
        .collect();
    for transposed in [false, true] {
        let r = if transposed { rho.reverse() } else { rho.clone() };
        for v in 0..n {
            let allowed: Vec<bool> = (0..n).map(|i| i != v).collect();
            let ins = strict_in_neighbours(&r, v, n);
            for (x, &a) in ins.iter().enumerate() {
                for &b in &ins[x + 1..] {
                    let Ok(chain) = chain_within(&r, &allowed, a, b) else {
                        continue;
                    };
                    if let Some(m) = chain_probe::<T>(&r, &chain, v) {
                        out.push(if transposed { m.transpose() } else { m });
                    }
                }
            }
        }
    }
    out
}

/// Checks `rank φ(X) = rank X` on structural probes and random samples of
/// every rank `1..=max_rank`.
pub fn bounded_rank_preserver_check<T: Scalar>(
    phi: &LinearMapOnSMA<T>,
    max_rank: usize,
    seed: u64,
) -> Result<Option<Counterexample<T>>> {
    let rho = phi.rho();
    for x in structural_probes::<T>(rho) {
        let r = x.rank();
        if r >= 1 && r <= max_rank && phi.apply(&x)?.rank() != r {
            return Ok(Some(counterexample(phi, x, "fails rank on a structural probe")?));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 1..=max_rank.min(rho.n()) {
        for _ in 0..40 {
            let Some(x) = random_rank_k::<T, _>(rho, k, &mut rng) else {
                continue;
            };
            if phi.apply(&x)?.rank() != k {
                return Ok(Some(counterexample(phi, x, "fails rank on a random sample")?));
            }
        }
    }
    Ok(None)
}
