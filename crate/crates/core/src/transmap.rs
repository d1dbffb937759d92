//! Transitive weight maps `g : ρ → K^×` and the automorphisms `g*` they induce.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Pair, Result};
use crate::lattice::smith_normal_form;
use crate::matrix::DenseMatrix;
use crate::quasiorder::{QuasiOrder, Rectangle};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitiveMap<T> {
    rho: QuasiOrder,
    weights: BTreeMap<Pair, T>,
}

/// One step of a walk in the undirected graph on `ρ^×`. A forward step along
/// `(a, b)` goes from `a` to `b` and contributes `g(a, b)`; a backward step goes
/// from `b` to `a` and contributes `g(a, b)⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkStep {
    pub edge: Pair,
    pub forward: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TrivialityCertificate<T> {
    /// `g(i, j) = s(i) / s(j)` on every strict pair.
    Separator(Vec<T>),
    /// A closed walk whose weight product is not 1.
    Violation { walk: Vec<WalkStep>, product: T },
}

impl<T> TrivialityCertificate<T> {
    pub fn is_separator(&self) -> bool {
        matches!(self, TrivialityCertificate::Separator(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinorViolation<T> {
    pub rectangle: Rectangle,
    /// `g(i,j)g(k,l) − g(i,l)g(k,j)`
    pub minor: T,
}

pub(crate) fn pow_i64<T: Scalar>(x: &T, k: i64) -> T {
    let base = if k < 0 { x.recip() } else { x.clone() };
    let mut e = k.unsigned_abs();
    let mut acc = T::one();
    let mut b = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul_ref(&b);
        }
        b = b.mul_ref(&b);
        e >>= 1;
    }
    acc
}

impl<T: Scalar> TransitiveMap<T> {
    /// Checks that `weights` covers exactly `ρ^×`, is nonzero, and is transitive.
    pub fn validate(rho: QuasiOrder, weights: BTreeMap<Pair, T>) -> Result<Self> {
        if let Some((&p, _)) = weights
            .iter()
            .find(|(&(i, j), _)| i == j || i >= rho.n() || j >= rho.n() || !rho.contains(i, j))
        {
            return Err(Error::SupportViolation(p));
        }
        let strict = rho.strict_part();
        if let Some(&p) = strict.iter().find(|p| !weights.contains_key(p)) {
            return Err(Error::MissingWeight(p));
        }
        if let Some((&p, _)) = weights.iter().find(|(_, w)| w.is_zero()) {
            return Err(Error::ZeroWeight(p));
        }
        let g = TransitiveMap { rho, weights };
        for &(i, j) in &strict {
            for k in g.rho.successors(j) {
                if k == j {
                    continue;
                }
                if g.weight(i, j).mul_ref(&g.weight(j, k)) != g.weight(i, k) {
                    return Err(Error::NotTransitive {
                        first: (i, j),
                        second: (j, k),
                    });
                }
            }
        }
        Ok(g)
    }

    /// `g ≡ 1`
    pub fn trivial(rho: QuasiOrder) -> Self {
        let weights = rho.strict_part().into_iter().map(|p| (p, T::one())).collect();
        TransitiveMap { rho, weights }
    }

    /// `g(i, j) = s(i) / s(j)`
    pub fn from_separator(rho: QuasiOrder, s: &[T]) -> Result<Self> {
        let weights = rho
            .strict_part()
            .into_iter()
            .map(|(i, j)| ((i, j), s[i].div_ref(&s[j])))
            .collect();
        Self::validate(rho, weights)
    }

    pub fn rho(&self) -> &QuasiOrder {
        &self.rho
    }

    pub fn weights(&self) -> &BTreeMap<Pair, T> {
        &self.weights
    }

    /// `g(i, j)`, with `g ≡ 1` on the diagonal. Panics off `ρ`.
    pub fn weight(&self, i: usize, j: usize) -> T {
        if i == j {
            return T::one();
        }
        self.weights
            .get(&(i, j))
            .unwrap_or_else(|| panic!("({i},{j}) is not in the relation"))
            .clone()
    }

    pub fn is_identically_one(&self) -> bool {
        self.weights.values().all(One::is_one)
    }

    /// `g*(X)`: entrywise scaling by `g`.
    pub fn apply_induced(&self, x: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        self.rho.check_support(x)?;
        Ok(DenseMatrix::from_fn(x.rows(), x.cols(), |i, j| {
            let v = x.get(i, j);
            if v.is_zero() || i == j {
                v.clone()
            } else {
                v.mul_ref(&self.weights[&(i, j)])
            }
        }))
    }

    /// `g^t(j, i) = g(i, j)` on `ρ^t`.
    pub fn transpose(&self) -> Self {
        TransitiveMap {
            rho: self.rho.reverse(),
            weights: self.weights.iter().map(|(&(i, j), w)| ((j, i), w.clone())).collect(),
        }
    }

    /// Restriction to `{0..k}`.
    pub fn restrict_prefix(&self, k: usize) -> Self {
        TransitiveMap {
            rho: self.rho.restrict_prefix(k),
            weights: self
                .weights
                .iter()
                .filter(|(&(i, j), _)| i < k && j < k)
                .map(|(&p, w)| (p, w.clone()))
                .collect(),
        }
    }

    /// Potentials by breadth-first search from the least element of each
    /// component, then a check of every strict pair.
    pub fn triviality_witness(&self) -> TrivialityCertificate<T> {
        let n = self.rho.n();
        let mut s: Vec<Option<T>> = vec![None; n];
        // Step from the parent into each vertex.
        let mut parent: Vec<Option<(usize, WalkStep)>> = vec![None; n];
        for root in 0..n {
            if s[root].is_some() {
                continue;
            }
            s[root] = Some(T::one());
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                let sv = s[v].clone().unwrap();
                for w in 0..n {
                    if w == v || s[w].is_some() {
                        continue;
                    }
                    let (value, step) = if self.rho.contains(v, w) {
                        (
                            sv.div_ref(&self.weight(v, w)),
                            WalkStep { edge: (v, w), forward: true },
                        )
                    } else if self.rho.contains(w, v) {
                        (
                            sv.mul_ref(&self.weight(w, v)),
                            WalkStep { edge: (w, v), forward: false },
                        )
                    } else {
                        continue;
                    };
                    s[w] = Some(value);
                    parent[w] = Some((v, step));
                    queue.push_back(w);
                }
            }
        }
        let s: Vec<T> = s.into_iter().map(Option::unwrap).collect();
        for (&(i, j), w) in &self.weights {
            if s[i].div_ref(&s[j]) == *w {
                continue;
            }
            let down_i = root_path(&parent, i);
            let down_j = root_path(&parent, j);
            let common = down_i
                .iter()
                .zip(&down_j)
                .take_while(|(a, b)| a == b)
                .count();
            let mut walk: Vec<WalkStep> = down_j[common..].to_vec();
            walk.push(WalkStep { edge: (i, j), forward: false });
            walk.extend(down_i[common..].iter().rev().map(|st| WalkStep {
                edge: st.edge,
                forward: !st.forward,
            }));
            let product = self.walk_product(&walk);
            return TrivialityCertificate::Violation { walk, product };
        }
        TrivialityCertificate::Separator(s)
    }

    pub fn walk_product(&self, walk: &[WalkStep]) -> T {
        walk.iter().fold(T::one(), |acc, st| {
            let w = self.weight(st.edge.0, st.edge.1);
            if st.forward {
                acc.mul_ref(&w)
            } else {
                acc.div_ref(&w)
            }
        })
    }

    pub fn is_trivial(&self) -> bool {
        self.triviality_witness().is_separator()
    }

    /// First rectangle whose weight minor is nonzero, if any.
    pub fn rectangle_minor_condition(&self) -> std::result::Result<(), MinorViolation<T>> {
        for rectangle in self.rho.rectangles() {
            let Rectangle { rows: (i, k), cols: (j, l) } = rectangle;
            let minor = self
                .weight(i, j)
                .mul_ref(&self.weight(k, l))
                .sub_ref(&self.weight(i, l).mul_ref(&self.weight(k, j)));
            if !minor.is_zero() {
                return Err(MinorViolation { rectangle, minor });
            }
        }
        Ok(())
    }
}

/// Steps from the component root down to `v`.
fn root_path(parent: &[Option<(usize, WalkStep)>], mut v: usize) -> Vec<WalkStep> {
    let mut steps = Vec::new();
    while let Some((p, step)) = parent[v] {
        steps.push(step);
        v = p;
    }
    steps.reverse();
    steps
}

/// Rows of the relation lattice: `e_ij + e_jk − e_ik`, and `e_ij + e_ji` for
/// two-sided pairs, over the strict pairs in row-major order.
fn relation_rows(rho: &QuasiOrder) -> (Vec<Pair>, Vec<Vec<BigInt>>) {
    let edges = rho.strict_part();
    let index: HashMap<Pair, usize> = edges.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let mut rows = Vec::new();
    for &(i, j) in &edges {
        for k in rho.successors(j) {
            if k == j {
                continue;
            }
            let mut row = vec![BigInt::zero(); edges.len()];
            row[index[&(i, j)]] += 1;
            row[index[&(j, k)]] += 1;
            if k != i {
                row[index[&(i, k)]] -= 1;
            }
            rows.push(row);
        }
    }
    (edges, rows)
}

/// Whether every transitive map on `ρ` into `ℂ^×` is trivial: the kernel of
/// the boundary map equals the relation lattice.
pub fn all_transitive_trivial(rho: &QuasiOrder) -> bool {
    let (edges, rows) = relation_rows(rho);
    if edges.is_empty() {
        return true;
    }
    let components = rho.approx_classes().len();
    let boundary_rank = rho.n() - components;
    let kernel_rank = edges.len() - boundary_rank;
    if rows.is_empty() {
        return kernel_rank == 0;
    }
    let snf = smith_normal_form(&rows, edges.len());
    snf.rank() == kernel_rank && snf.diag.iter().all(|d| d.is_zero() || d.is_one())
}

/// Roots of unity in `T` whose order divides `d`.
fn units_of_order_dividing<T: Scalar>(d: &BigInt) -> Vec<T> {
    let mut out = vec![T::one()];
    for order in [2u32, 3, 4, 6] {
        if !(d % BigInt::from(order)).is_zero() {
            continue;
        }
        if let Some(z) = T::root_of_unity(order) {
            let mut p = z.clone();
            while !p.is_one() {
                if !out.contains(&p) {
                    out.push(p.clone());
                }
                p = p.mul_ref(&z);
            }
        }
    }
    out
}

/// A random transitive map: a random character of `ℤ^(ρ^×) / R` read off a
/// Smith normal form of the relation matrix. Free coordinates get values
/// `±2^a` (times any further unit the field has); torsion coordinates get roots
/// of unity of admissible order.
pub fn random_transitive_map<T: Scalar>(rho: &QuasiOrder, seed: u64) -> TransitiveMap<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (edges, rows) = relation_rows(rho);
    let e = edges.len();
    let (diag, v) = if rows.is_empty() {
        let id = (0..e)
            .map(|i| (0..e).map(|j| BigInt::from((i == j) as i32)).collect())
            .collect();
        (Vec::new(), id)
    } else {
        let snf = smith_normal_form(&rows, e);
        (snf.diag, snf.v)
    };
    let all_units = units_of_order_dividing::<T>(&BigInt::from(12));
    let two = T::from_i64(2);
    let generators: Vec<T> = (0..e)
        .map(|i| {
            let d = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
            if d.is_zero() {
                let a = rng.gen_range(-2i64..=2);
                let unit = if rng.gen_bool(0.25) {
                    all_units.choose(&mut rng).unwrap().clone()
                } else {
                    T::one()
                };
                pow_i64(&two, a).mul_ref(&unit)
            } else {
                units_of_order_dividing::<T>(&d).choose(&mut rng).unwrap().clone()
            }
        })
        .collect();
    let weights = edges
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let w = generators.iter().enumerate().fold(T::one(), |acc, (i, z)| {
                let exp = v[k][i].to_i64().expect("small exponent");
                if exp == 0 {
                    acc
                } else {
                    acc.mul_ref(&pow_i64(z, exp))
                }
            });
            (p, w)
        })
        .collect();
    TransitiveMap::validate(rho.clone(), weights).expect("characters are transitive")
}

/// A random separator-induced map, `s(i) = ±2^a`.
pub fn random_trivial_map<T: Scalar>(rho: &QuasiOrder, rng: &mut impl Rng) -> TransitiveMap<T> {
    let two = T::from_i64(2);
    let s: Vec<T> = (0..rho.n())
        .map(|_| {
            let v = pow_i64(&two, rng.gen_range(-2i64..=2));
            if rng.gen_bool(0.5) {
                -v
            } else {
                v
            }
        })
        .collect();
    TransitiveMap::from_separator(rho.clone(), &s).expect("separators are transitive")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{GaussianRational as G, Matrix};

    fn qo(n: usize, edges: &[(usize, usize)]) -> QuasiOrder {
        let e: Vec<Pair> = edges.iter().map(|&(i, j)| (i - 1, j - 1)).collect();
        QuasiOrder::from_edges(n, &e, true).unwrap()
    }

    fn map(rho: &QuasiOrder, w: &[((usize, usize), i64)]) -> Result<TransitiveMap<G>> {
        let mut weights: BTreeMap<Pair, G> =
            rho.strict_part().into_iter().map(|p| (p, G::from(1))).collect();
        for &((i, j), v) in w {
            weights.insert((i - 1, j - 1), G::from(v));
        }
        TransitiveMap::validate(rho.clone(), weights)
    }

    fn rect4() -> QuasiOrder {
        qo(4, &[(1, 3), (1, 4), (2, 3), (2, 4)])
    }

    #[test]
    fn validation() {
        assert!(map(&rect4(), &[((1, 4), 2)]).is_ok());
        let t3 = QuasiOrder::upper_triangular(3);
        assert!(map(&t3, &[((1, 2), 2), ((2, 3), 3), ((1, 3), 6)]).is_ok());
        assert_eq!(
            map(&t3, &[((1, 2), 2), ((2, 3), 3), ((1, 3), 5)]),
            Err(Error::NotTransitive { first: (0, 1), second: (1, 2) })
        );
        assert_eq!(map(&t3, &[((1, 2), 0)]), Err(Error::ZeroWeight((0, 1))));
        let full = QuasiOrder::full(2);
        assert!(matches!(
            map(&full, &[((1, 2), 2)]),
            Err(Error::NotTransitive { .. })
        ));
        assert!(map(&full, &[((1, 2), 2), ((2, 1), -1)]).is_err());
        let mut w = BTreeMap::new();
        w.insert((0, 1), G::from(1));
        assert_eq!(
            TransitiveMap::validate(full.clone(), w),
            Err(Error::MissingWeight((1, 0)))
        );
    }

    #[test]
    fn induced_map() {
        let g = map(&rect4(), &[((1, 4), 2)]).unwrap();
        let x = Matrix::from_i64_rows(&[&[0, 0, 1, 1], &[0, 0, 1, 1], &[0; 4], &[0; 4]]);
        let gx = g.apply_induced(&x).unwrap();
        assert_eq!(
            gx,
            Matrix::from_i64_rows(&[&[0, 0, 1, 2], &[0, 0, 1, 1], &[0; 4], &[0; 4]])
        );
        let d = Matrix::diag([1, 2, 3, 4].map(G::from).to_vec());
        assert_eq!(g.apply_induced(&d).unwrap(), d);
        assert_eq!(
            g.apply_induced(&Matrix::unit(4, 3, 0)),
            Err(Error::SupportViolation((3, 0)))
        );
    }

    #[test]
    fn witnesses() {
        let t3 = QuasiOrder::upper_triangular(3);
        assert_eq!(
            TransitiveMap::<G>::trivial(t3.clone()).triviality_witness(),
            TrivialityCertificate::Separator(vec![G::from(1); 3])
        );
        let g = map(&t3, &[((1, 2), 2), ((2, 3), 3), ((1, 3), 6)]).unwrap();
        match g.triviality_witness() {
            TrivialityCertificate::Separator(s) => {
                // Normalised at the first element; proportional to (6, 3, 1).
                assert_eq!(s, vec![G::from(1), G::from_parts(1, 2, 0, 1), G::from_parts(1, 6, 0, 1)]);
            }
            other => panic!("{other:?}"),
        }

        let g = map(&rect4(), &[((1, 4), 2)]).unwrap();
        let TrivialityCertificate::Violation { walk, product } = g.triviality_witness() else {
            panic!("nontrivial map")
        };
        let expect = [((0, 3), true), ((1, 3), false), ((1, 2), true), ((0, 2), false)];
        assert_eq!(
            walk,
            expect
                .iter()
                .map(|&(edge, forward)| WalkStep { edge, forward })
                .collect::<Vec<_>>()
        );
        assert_eq!(product, G::from(2));
    }

    #[test]
    fn rectangle_minors() {
        let g = map(&rect4(), &[((1, 4), 2)]).unwrap();
        let v = g.rectangle_minor_condition().unwrap_err();
        assert_eq!(v.rectangle, Rectangle { rows: (0, 1), cols: (2, 3) });
        assert_eq!(v.minor, G::from(-1));
        assert!(TransitiveMap::<G>::trivial(rect4()).rectangle_minor_condition().is_ok());
        let t2 = QuasiOrder::upper_triangular(2);
        assert!(map(&t2, &[((1, 2), 5)]).unwrap().rectangle_minor_condition().is_ok());
    }

    #[test]
    fn lattice_decision() {
        assert!(all_transitive_trivial(&QuasiOrder::diagonal(4)));
        assert!(all_transitive_trivial(&QuasiOrder::upper_triangular(5)));
        assert!(all_transitive_trivial(&QuasiOrder::full(3)));
        assert!(!all_transitive_trivial(&rect4()));
    }

    #[test]
    fn generator_reaches_nontrivial_maps() {
        let rho = rect4();
        let found = (0..50).any(|seed| {
            let g: TransitiveMap<G> = random_transitive_map(&rho, seed);
            let ratio = g.weight(0, 2).mul_ref(&g.weight(1, 3))
                / g.weight(0, 3).mul_ref(&g.weight(1, 2));
            !ratio.is_one()
        });
        assert!(found);
        let t3 = QuasiOrder::upper_triangular(3);
        for seed in 0..20 {
            let g: TransitiveMap<G> = random_transitive_map(&t3, seed);
            assert!(g.is_trivial());
        }
        let d: TransitiveMap<G> = random_transitive_map(&QuasiOrder::diagonal(3), 7);
        assert!(d.weights().is_empty());
    }
}
