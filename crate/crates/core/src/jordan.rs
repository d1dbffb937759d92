//! Linear maps on `A_ρ` given by unit images, Jordan homomorphism recognition,
//! the canonical form `X ↦ S(P g*(X) + (I−P) g*(X)^t)S⁻¹`, and embedding searches.

use std::collections::BTreeMap;

use crate::diag::simultaneous_diagonalize_in_sma;
use crate::error::{Error, Pair, Result};
use crate::matrix::DenseMatrix;
use crate::quasiorder::{is_increasing, permutation_matrix, Permutation, QuasiOrder};
use crate::scalar::Scalar;
use crate::transmap::{all_transitive_trivial, TransitiveMap};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearMapOnSMA<T> {
    rho: QuasiOrder,
    images: BTreeMap<Pair, DenseMatrix<T>>,
}

/// `S`, the class union `U` where `P = Σ_{i∈U} E_ii`, the transitive map `g`,
/// and, for maps into a given codomain algebra, `π` with `S = S' R_π`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalJordanForm<T> {
    pub s: DenseMatrix<T>,
    pub u: Vec<usize>,
    pub g: TransitiveMap<T>,
    pub perm: Option<Permutation>,
}

/// `S E_ij S⁻¹` as an outer product.
fn conjugate_unit<T: Scalar>(s: &DenseMatrix<T>, s_inv: &DenseMatrix<T>, i: usize, j: usize) -> DenseMatrix<T> {
    let n = s.rows();
    DenseMatrix::from_fn(n, n, |r, c| s.get(r, i).mul_ref(s_inv.get(j, c)))
}

impl<T: Scalar> LinearMapOnSMA<T> {
    /// One `n × n` image per pair of `ρ`, no more and no fewer.
    pub fn new(rho: QuasiOrder, images: BTreeMap<Pair, DenseMatrix<T>>) -> Result<Self> {
        let n = rho.n();
        for (&p, m) in &images {
            if p.0 >= n || p.1 >= n || !rho.contains(p.0, p.1) {
                return Err(Error::SupportViolation(p));
            }
            if m.rows() != n || m.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "image of ({},{}) is {}x{}, expected {n}x{n}",
                    p.0 + 1,
                    p.1 + 1,
                    m.rows(),
                    m.cols()
                )));
            }
        }
        if let Some(p) = rho.pairs().into_iter().find(|p| !images.contains_key(p)) {
            return Err(Error::PreconditionViolated(format!(
                "no image given for the unit ({},{})",
                p.0 + 1,
                p.1 + 1
            )));
        }
        Ok(LinearMapOnSMA { rho, images })
    }

    pub fn from_fn(rho: QuasiOrder, f: impl Fn(usize, usize) -> DenseMatrix<T>) -> Self {
        let images = rho.pairs().into_iter().map(|(i, j)| ((i, j), f(i, j))).collect();
        LinearMapOnSMA { rho, images }
    }

    pub fn identity(rho: QuasiOrder) -> Self {
        let n = rho.n();
        Self::from_fn(rho, |i, j| DenseMatrix::unit(n, i, j))
    }

    /// `X ↦ X^t`
    pub fn transpose_map(rho: QuasiOrder) -> Self {
        let n = rho.n();
        Self::from_fn(rho, |i, j| DenseMatrix::unit(n, j, i))
    }

    pub fn rho(&self) -> &QuasiOrder {
        &self.rho
    }

    pub fn images(&self) -> &BTreeMap<Pair, DenseMatrix<T>> {
        &self.images
    }

    pub fn image(&self, i: usize, j: usize) -> &DenseMatrix<T> {
        &self.images[&(i, j)]
    }

    pub fn n(&self) -> usize {
        self.rho.n()
    }

    /// `Σ X_ij φ(E_ij)`
    pub fn apply(&self, x: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        self.rho.check_support(x)?;
        let n = self.n();
        let mut out = DenseMatrix::zeros(n, n);
        for (i, j) in x.support() {
            out = &out + &self.images[&(i, j)].scale(x.get(i, j));
        }
        Ok(out)
    }

    /// `X ↦ A φ(X) B`
    pub fn compose_outer(&self, a: &DenseMatrix<T>, b: &DenseMatrix<T>) -> Self {
        LinearMapOnSMA {
            rho: self.rho.clone(),
            images: self
                .images
                .iter()
                .map(|(&p, m)| (p, &(a * m) * b))
                .collect(),
        }
    }

    /// First unit pair on which `φ(a∘b) = φ(a)∘φ(b)` fails.
    pub fn jordan_violation(&self) -> Option<(Pair, Pair)> {
        let pairs = self.rho.pairs();
        let n = self.n();
        for (x, &(i, j)) in pairs.iter().enumerate() {
            let a = &self.images[&(i, j)];
            for &(k, l) in &pairs[x..] {
                let b = &self.images[&(k, l)];
                // E_ij ∘ E_kl = δ_jk E_il + δ_li E_kj
                let mut lhs = DenseMatrix::zeros(n, n);
                if j == k {
                    lhs = &lhs + &self.images[&(i, l)];
                }
                if l == i {
                    lhs = &lhs + &self.images[&(k, j)];
                }
                let rhs = &(a * b) + &(b * a);
                if lhs != rhs {
                    return Some(((i, j), (k, l)));
                }
            }
        }
        None
    }

    pub fn is_jordan_homomorphism(&self) -> bool {
        self.jordan_violation().is_none()
    }

    fn product_law_holds(&self, anti: bool) -> bool {
        let pairs = self.rho.pairs();
        let n = self.n();
        pairs.iter().all(|&(i, j)| {
            pairs.iter().all(|&(k, l)| {
                let lhs = if j == k {
                    self.images[&(i, l)].clone()
                } else {
                    DenseMatrix::zeros(n, n)
                };
                let (a, b) = (&self.images[&(i, j)], &self.images[&(k, l)]);
                lhs == if anti { b * a } else { a * b }
            })
        })
    }

    /// `φ(ab) = φ(a)φ(b)` on all units.
    pub fn is_multiplicative(&self) -> bool {
        self.product_law_holds(false)
    }

    /// `φ(ab) = φ(b)φ(a)` on all units.
    pub fn is_antimultiplicative(&self) -> bool {
        self.product_law_holds(true)
    }

    /// Rank of the `n² × |ρ|` matrix of vectorized unit images.
    pub fn image_rank(&self) -> usize {
        let cols: Vec<Vec<T>> = self.images.values().map(DenseMatrix::vectorize).collect();
        let n2 = self.n() * self.n();
        DenseMatrix::from_fn(n2, cols.len(), |r, c| cols[c][r].clone()).rank()
    }

    /// Errors with the first unit image supported outside `target`.
    pub fn check_images_in(&self, target: &QuasiOrder) -> Result<()> {
        for m in self.images.values() {
            target.check_support(m)?;
        }
        Ok(())
    }
}

impl<T: Scalar> CanonicalJordanForm<T> {
    /// Rebuilds the represented map.
    pub fn reconstruct(&self) -> Result<LinearMapOnSMA<T>> {
        synthesize_jordan(self.g.rho(), &self.s, &self.u, &self.g)
    }

    /// `P = Σ_{i∈U} E_ii`
    pub fn p(&self) -> DenseMatrix<T> {
        let n = self.s.rows();
        DenseMatrix::diag(
            (0..n)
                .map(|i| if self.u.contains(&i) { T::one() } else { T::zero() })
                .collect(),
        )
    }

    /// `S'` in `S = S' R_π`, when a permutation is recorded.
    pub fn codomain_factor(&self) -> Option<DenseMatrix<T>> {
        self.perm
            .as_ref()
            .map(|perm| &self.s * &permutation_matrix::<T>(perm).transpose())
    }
}

/// `E_ij ↦ S(P g(i,j)E_ij + (I−P) g(i,j)E_ji)S⁻¹`
pub fn synthesize_jordan<T: Scalar>(
    rho: &QuasiOrder,
    s: &DenseMatrix<T>,
    u: &[usize],
    g: &TransitiveMap<T>,
) -> Result<LinearMapOnSMA<T>> {
    if g.rho() != rho {
        return Err(Error::PreconditionViolated(
            "transitive map is defined on a different relation".into(),
        ));
    }
    let mask = rho.class_union_mask(u)?;
    if s.rows() != rho.n() || s.cols() != rho.n() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} similarity for n = {}",
            s.rows(),
            s.cols(),
            rho.n()
        )));
    }
    let s_inv = s.inverse()?;
    let images = rho
        .pairs()
        .into_iter()
        .map(|(i, j)| {
            let unit = if mask[i] {
                conjugate_unit(s, &s_inv, i, j)
            } else {
                conjugate_unit(s, &s_inv, j, i)
            };
            ((i, j), unit.scale(&g.weight(i, j)))
        })
        .collect();
    Ok(LinearMapOnSMA {
        rho: rho.clone(),
        images,
    })
}

fn inconsistent(what: &str) -> Error {
    Error::InternalInconsistency(what.to_string())
}

/// Canonical form of a Jordan embedding with nonvanishing unit images.
pub fn classify_jordan<T: Scalar>(phi: &LinearMapOnSMA<T>) -> Result<CanonicalJordanForm<T>> {
    let rho = phi.rho();
    let n = rho.n();
    if let Some((&p, _)) = phi.images.iter().find(|(_, m)| m.is_zero()) {
        return Err(Error::VanishingUnitImage(p));
    }
    if let Some(v) = phi.jordan_violation() {
        return Err(Error::NotJordan(v));
    }

    // Columns of S₀ span the ranges of the rank-one idempotents φ(E_ii).
    let mut s0 = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let p = phi.image(i, i);
        let j = (0..n)
            .find(|&j| (0..n).any(|r| !p.get(r, j).is_zero()))
            .expect("nonzero image");
        let col = p.col(j);
        let lead = col.iter().find(|v| !v.is_zero()).unwrap().clone();
        for (r, v) in col.iter().enumerate() {
            s0.set(r, i, v.div_ref(&lead));
        }
    }
    let s0_inv = s0
        .inverse()
        .map_err(|_| inconsistent("diagonal unit images do not span"))?;

    // Read off the multiplicative and antimultiplicative parts of ψ = S₀⁻¹φS₀.
    let mut multiplicative = vec![false; n];
    let mut weights: BTreeMap<Pair, T> = BTreeMap::new();
    let mut transposed: BTreeMap<Pair, bool> = BTreeMap::new();
    for (i, j) in rho.strict_part() {
        let psi = &(&s0_inv * phi.image(i, j)) * &s0;
        let support: Vec<Pair> = psi.support().collect();
        match support.as_slice() {
            [(a, b)] if (*a, *b) == (i, j) => {
                weights.insert((i, j), psi.get(i, j).clone());
                transposed.insert((i, j), false);
                multiplicative[i] = true;
                multiplicative[j] = true;
            }
            [(a, b)] if (*a, *b) == (j, i) => {
                weights.insert((i, j), psi.get(j, i).clone());
                transposed.insert((i, j), true);
            }
            _ => return Err(inconsistent("unit image is not a multiple of a unit")),
        }
    }
    let u: Vec<usize> = (0..n).filter(|&i| multiplicative[i]).collect();
    rho.class_union_mask(&u)
        .map_err(|_| inconsistent("multiplicative part is not a union of classes"))?;
    if transposed.iter().any(|(&(i, _), &t)| t == multiplicative[i]) {
        return Err(inconsistent("a class mixes multiplicative and antimultiplicative units"));
    }
    let g = TransitiveMap::validate(rho.clone(), weights)
        .map_err(|e| inconsistent(&format!("extracted weights: {e}")))?;
    let form = CanonicalJordanForm {
        s: s0,
        u,
        g,
        perm: None,
    };
    if form.reconstruct()? != *phi {
        return Err(inconsistent("reconstruction differs from the input"));
    }
    Ok(form)
}

/// Canonical form with `S = S' R_π`, `S' ∈ A_ρ'` invertible, and `π`
/// `(ρ^U, ρ')`-increasing.
pub fn classify_into_codomain<T: Scalar>(
    phi: &LinearMapOnSMA<T>,
    target: &QuasiOrder,
) -> Result<CanonicalJordanForm<T>> {
    let form = classify_jordan(phi)?;
    let rho = phi.rho();
    let n = rho.n();
    if target.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "codomain relation on {} points, domain on {n}",
            target.n()
        )));
    }
    phi.check_images_in(target)?;

    let lambda = DenseMatrix::diag((1..=n as i64).map(T::from_i64).collect());
    let image = phi.apply(&lambda)?;
    let t = simultaneous_diagonalize_in_sma(target, std::slice::from_ref(&image))?;
    let t_inv = t.inverse()?;
    let d = &(&t_inv * &image) * &t;
    // d has the value k + 1 at position π(k).
    let mut perm = vec![usize::MAX; n];
    for p in 0..n {
        let k = (0..n)
            .find(|&k| *d.get(p, p) == T::from_i64(k as i64 + 1))
            .ok_or_else(|| inconsistent("spectrum of φ(Λ) is not 1..n"))?;
        perm[k] = p;
    }

    // S = T R_π Δ with Δ diagonal; absorb Δ into the weights.
    let r = permutation_matrix::<T>(&perm);
    let tr = &t * &r;
    let delta = &tr.inverse()? * &form.s;
    if !delta.is_diagonal() {
        return Err(inconsistent("refactored similarity is not T R_π times a diagonal"));
    }
    let mask = rho.class_union_mask(&form.u)?;
    let weights = rho
        .strict_part()
        .into_iter()
        .map(|(i, j)| {
            let (di, dj) = (delta.get(i, i), delta.get(j, j));
            let scale = if mask[i] { di.div_ref(dj) } else { dj.div_ref(di) };
            ((i, j), form.g.weight(i, j).mul_ref(&scale))
        })
        .collect();
    let g = TransitiveMap::validate(rho.clone(), weights)
        .map_err(|e| inconsistent(&format!("rescaled weights: {e}")))?;
    let rho_u = rho.rho_u(&form.u)?;
    if !is_increasing(&rho_u, target, &perm) {
        return Err(inconsistent("extracted permutation is not increasing"));
    }
    let refined = CanonicalJordanForm {
        s: tr,
        u: form.u,
        g,
        perm: Some(perm),
    };
    if refined.reconstruct()? != *phi {
        return Err(inconsistent("reconstruction differs from the input"));
    }
    Ok(refined)
}

/// Class unions in decreasing size, lexicographic among equal sizes.
fn class_unions(rho: &QuasiOrder) -> Vec<Vec<usize>> {
    let blocks = rho.approx_classes().blocks;
    let mut unions: Vec<Vec<usize>> = (0..1u64 << blocks.len())
        .map(|mask| {
            let mut u: Vec<usize> = (0..blocks.len())
                .filter(|&b| mask >> b & 1 == 1)
                .flat_map(|b| blocks[b].iter().copied())
                .collect();
            u.sort_unstable();
            u
        })
        .collect();
    unions.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    unions
}

/// A class union `U` and a `(ρ^U, ρ')`-increasing permutation, if any exist.
pub fn jordan_embeds_into(rho: &QuasiOrder, target: &QuasiOrder) -> Option<(Vec<usize>, Permutation)> {
    if rho.n() != target.n() {
        return None;
    }
    class_unions(rho).into_iter().find_map(|u| {
        let rho_u = rho.rho_u(&u).expect("class union");
        rho_u
            .increasing_permutations(target, 1)
            .into_iter()
            .next()
            .map(|perm| (u, perm))
    })
}

/// `X ↦ R_π(P X + (I−P) X^t)R_π⁻¹`
pub fn embedding_map<T: Scalar>(rho: &QuasiOrder, u: &[usize], perm: &[usize]) -> Result<LinearMapOnSMA<T>> {
    synthesize_jordan(rho, &permutation_matrix(perm), u, &TransitiveMap::trivial(rho.clone()))
}

pub fn algebra_embeds_into(rho: &QuasiOrder, target: &QuasiOrder) -> Option<Permutation> {
    rho.increasing_permutations(target, 1).into_iter().next()
}

/// At most one connected class has two or more elements.
pub fn multiplicativity_dichotomy(rho: &QuasiOrder) -> bool {
    rho.approx_classes().blocks.iter().filter(|b| b.len() >= 2).count() <= 1
}

pub fn extends_to_full_jordan_automorphism(rho: &QuasiOrder) -> bool {
    all_transitive_trivial(rho) && multiplicativity_dichotomy(rho)
}

pub fn all_algebra_automorphisms_inner(rho: &QuasiOrder) -> bool {
    all_transitive_trivial(rho) && rho.automorphisms_fix_two_sided_classes()
}
