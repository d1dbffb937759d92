//! Quasi-orders on `{0..n}` stored as one bit row per element.

use std::collections::{BTreeSet, BinaryHeap};
use std::cmp::Reverse;
use std::fmt;

use crate::error::{Error, Pair, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

/// `perm[i]` is the image of `i`.
pub type Permutation = Vec<usize>;

pub const MAX_N: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuasiOrder {
    n: usize,
    rows: Vec<u64>,
}

/// A partition of `{0..n}` into blocks, each sorted, blocks ordered by least element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPartition {
    pub blocks: Vec<Vec<usize>>,
}

impl ClassPartition {
    fn from_labels(labels: &[usize]) -> Self {
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let mut index_of = std::collections::HashMap::new();
        for (i, &l) in labels.iter().enumerate() {
            let b = *index_of.entry(l).or_insert_with(|| {
                blocks.push(Vec::new());
                blocks.len() - 1
            });
            blocks[b].push(i);
        }
        ClassPartition { blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Index of the block containing `i`.
    pub fn block_of(&self, i: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.contains(&i))
            .expect("element outside the partition")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockTriangularForm {
    pub perm: Permutation,
    pub sizes: Vec<usize>,
    /// `presence[a][b]`: the full block `(a, b)` lies in the permuted relation.
    pub presence: Vec<Vec<bool>>,
}

/// Rows `{i, k}` and columns `{j, l}` with `i < k`, `j < l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rectangle {
    pub rows: (usize, usize),
    pub cols: (usize, usize),
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::DimensionMismatch(format!(
            "quasi-order size {n} outside 1..={MAX_N}"
        )));
    }
    Ok(())
}

impl QuasiOrder {
    /// Builds `Δ_n ∪ edges` (0-based) and either closes it transitively or
    /// checks that it is already transitive.
    pub fn from_edges(n: usize, edges: &[Pair], close: bool) -> Result<Self> {
        check_n(n)?;
        let mut rows: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        for &(i, j) in edges {
            for index in [i, j] {
                if index >= n {
                    return Err(Error::IndexOutOfRange { index, n });
                }
            }
            rows[i] |= 1 << j;
        }
        let mut q = QuasiOrder { n, rows };
        if close {
            q.close();
        } else if let Some((first, second)) = q.transitivity_violation() {
            return Err(Error::NotClosed { first, second });
        }
        Ok(q)
    }

    /// Relation from a predicate; the diagonal is always added.
    pub fn from_fn(n: usize, close: bool, f: impl Fn(usize, usize) -> bool) -> Result<Self> {
        let edges: Vec<Pair> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| f(i, j))
            .collect();
        Self::from_edges(n, &edges, close)
    }

    /// `Δ_n`
    pub fn diagonal(n: usize) -> Self {
        Self::from_edges(n, &[], false).expect("valid size")
    }

    /// All of `{0..n}²`.
    pub fn full(n: usize) -> Self {
        Self::from_fn(n, false, |_, _| true).expect("valid size")
    }

    /// Upper-triangular pattern `{(i, j) : i ≤ j}`.
    pub fn upper_triangular(n: usize) -> Self {
        Self::from_fn(n, false, |i, j| i <= j).expect("valid size")
    }

    fn close(&mut self) {
        for k in 0..self.n {
            let row_k = self.rows[k];
            for i in 0..self.n {
                if self.rows[i] >> k & 1 == 1 {
                    self.rows[i] |= row_k;
                }
            }
        }
    }

    fn transitivity_violation(&self) -> Option<(Pair, Pair)> {
        for i in 0..self.n {
            for j in 0..self.n {
                if !self.contains(i, j) {
                    continue;
                }
                let missing = self.rows[j] & !self.rows[i];
                if missing != 0 {
                    let k = missing.trailing_zeros() as usize;
                    return Some(((i, j), (j, k)));
                }
            }
        }
        None
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    /// Number of pairs, `|ρ|`.
    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All pairs in row-major order.
    pub fn pairs(&self) -> Vec<Pair> {
        (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.contains(i, j))
            .collect()
    }

    /// `ρ^×`, row-major.
    pub fn strict_part(&self) -> Vec<Pair> {
        self.pairs().into_iter().filter(|&(i, j)| i != j).collect()
    }

    /// Elements `j` with `(i, j) ∈ ρ`.
    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let row = self.rows[i];
        (0..self.n).filter(move |&j| row >> j & 1 == 1)
    }

    pub fn out_degree(&self, i: usize) -> usize {
        self.rows[i].count_ones() as usize
    }

    pub fn in_degree(&self, j: usize) -> usize {
        self.rows.iter().filter(|r| *r >> j & 1 == 1).count()
    }

    /// `ρ^t`
    pub fn reverse(&self) -> Self {
        Self::from_fn(self.n, false, |i, j| self.contains(j, i)).expect("reverse of a quasi-order")
    }

    /// `{(π(i), π(j)) : (i, j) ∈ ρ}`
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut rows = vec![0u64; self.n];
        for (i, j) in self.pairs() {
            rows[perm[i]] |= 1 << perm[j];
        }
        QuasiOrder { n: self.n, rows }
    }

    /// The restriction to `{0..k}`.
    pub fn restrict_prefix(&self, k: usize) -> Self {
        let mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        QuasiOrder {
            n: k,
            rows: self.rows[..k].iter().map(|r| r & mask).collect(),
        }
    }

    /// Classes of mutual relation.
    pub fn two_sided_classes(&self) -> ClassPartition {
        let labels: Vec<usize> = (0..self.n)
            .map(|i| (0..self.n).find(|&j| self.contains(i, j) && self.contains(j, i)).unwrap())
            .collect();
        ClassPartition::from_labels(&labels)
    }

    /// Connected components of the undirected graph on `ρ^×`.
    pub fn approx_classes(&self) -> ClassPartition {
        let mut label: Vec<Option<usize>> = vec![None; self.n];
        for root in 0..self.n {
            if label[root].is_some() {
                continue;
            }
            label[root] = Some(root);
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                for w in 0..self.n {
                    if label[w].is_none() && (self.contains(v, w) || self.contains(w, v)) {
                        label[w] = Some(root);
                        stack.push(w);
                    }
                }
            }
        }
        let labels: Vec<usize> = label.into_iter().map(Option::unwrap).collect();
        ClassPartition::from_labels(&labels)
    }

    /// `P_C` for every connected class `C`, in class order.
    pub fn central_idempotents<T: Scalar>(&self) -> Vec<DenseMatrix<T>> {
        self.approx_classes()
            .blocks
            .iter()
            .map(|block| {
                DenseMatrix::diag(
                    (0..self.n)
                        .map(|i| if block.contains(&i) { T::one() } else { T::zero() })
                        .collect(),
                )
            })
            .collect()
    }

    /// Permutation making the relation block upper-triangular with full
    /// diagonal blocks, one block per two-sided class.
    pub fn block_triangular_form(&self) -> BlockTriangularForm {
        let classes = self.two_sided_classes();
        let p = classes.len();
        let rep = |a: usize| classes.blocks[a][0];
        let mut indegree = vec![0usize; p];
        for a in 0..p {
            for b in 0..p {
                if a != b && self.contains(rep(a), rep(b)) {
                    indegree[b] += 1;
                }
            }
        }
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..p).filter(|&a| indegree[a] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(p);
        while let Some(Reverse(a)) = ready.pop() {
            order.push(a);
            for b in 0..p {
                if a != b && self.contains(rep(a), rep(b)) {
                    indegree[b] -= 1;
                    if indegree[b] == 0 {
                        ready.push(Reverse(b));
                    }
                }
            }
        }
        let mut perm = vec![0; self.n];
        let mut next = 0;
        for &a in &order {
            for &i in &classes.blocks[a] {
                perm[i] = next;
                next += 1;
            }
        }
        let sizes = order.iter().map(|&a| classes.blocks[a].len()).collect();
        let presence = order
            .iter()
            .map(|&a| order.iter().map(|&b| self.contains(rep(a), rep(b))).collect())
            .collect();
        BlockTriangularForm {
            perm,
            sizes,
            presence,
        }
    }

    /// Every rectangle once, in lexicographic order.
    pub fn rectangles(&self) -> Vec<Rectangle> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for k in i + 1..self.n {
                let common = self.rows[i] & self.rows[k];
                for j in 0..self.n {
                    if common >> j & 1 == 0 {
                        continue;
                    }
                    for l in j + 1..self.n {
                        if common >> l & 1 == 1 {
                            out.push(Rectangle {
                                rows: (i, k),
                                cols: (j, l),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// Up to `limit` permutations `π` with `(π(i), π(j)) ∈ target` for all
    /// `(i, j) ∈ self`. The search is exhaustive, so an empty result means none exist.
    pub fn increasing_permutations(&self, target: &QuasiOrder, limit: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        if self.n != target.n || limit == 0 {
            return out;
        }
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&v| (Reverse(self.out_degree(v)), Reverse(self.in_degree(v)), v));
        let target_out: Vec<usize> = (0..self.n).map(|w| target.out_degree(w)).collect();
        let target_in: Vec<usize> = (0..self.n).map(|w| target.in_degree(w)).collect();
        let mut search = PermSearch {
            src: self,
            dst: target,
            order,
            target_out,
            target_in,
            image: vec![usize::MAX; self.n],
            used: 0,
            limit,
            out: &mut out,
        };
        search.extend(0);
        out
    }

    /// Checks that `members` is a union of connected classes and returns it as a mask.
    pub fn class_union_mask(&self, members: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.n];
        for &i in members {
            if i >= self.n {
                return Err(Error::IndexOutOfRange { index: i, n: self.n });
            }
            mask[i] = true;
        }
        for block in self.approx_classes().blocks {
            if block.iter().any(|&i| mask[i]) {
                if let Some(&i) = block.iter().find(|&&i| !mask[i]) {
                    return Err(Error::NotClassUnion(i));
                }
            }
        }
        Ok(mask)
    }

    /// `(ρ ∩ U×U) ∪ (ρ^t ∩ U^c×U^c)`
    pub fn rho_u(&self, members: &[usize]) -> Result<Self> {
        let mask = self.class_union_mask(members)?;
        Self::from_fn(self.n, false, |i, j| {
            if mask[i] && mask[j] {
                self.contains(i, j)
            } else if !mask[i] && !mask[j] {
                self.contains(j, i)
            } else {
                false
            }
        })
    }

    pub fn automorphisms(&self) -> Vec<Permutation> {
        self.increasing_permutations(self, usize::MAX)
    }

    pub fn automorphisms_fix_two_sided_classes(&self) -> bool {
        let classes = self.two_sided_classes();
        self.automorphisms().iter().all(|perm| {
            classes
                .blocks
                .iter()
                .all(|b| b.iter().all(|&i| b.contains(&perm[i])))
        })
    }

    /// Errors with the first nonzero entry outside the relation.
    pub fn check_support<T: Scalar>(&self, m: &DenseMatrix<T>) -> Result<()> {
        if m.rows() != self.n || m.cols() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a relation on {} points",
                m.rows(),
                m.cols(),
                self.n
            )));
        }
        match m.support().find(|&(i, j)| !self.contains(i, j)) {
            Some(p) => Err(Error::SupportViolation(p)),
            None => Ok(()),
        }
    }
}

struct PermSearch<'a> {
    src: &'a QuasiOrder,
    dst: &'a QuasiOrder,
    order: Vec<usize>,
    target_out: Vec<usize>,
    target_in: Vec<usize>,
    image: Vec<usize>,
    used: u64,
    limit: usize,
    out: &'a mut Vec<Permutation>,
}

impl PermSearch<'_> {
    fn extend(&mut self, depth: usize) {
        if self.out.len() >= self.limit {
            return;
        }
        if depth == self.order.len() {
            self.out.push(self.image.clone());
            return;
        }
        let v = self.order[depth];
        let n = self.src.n;
        // Try v ↦ v first so the identity is found first whenever it works.
        let candidates = std::iter::once(v).chain((0..n).filter(move |&w| w != v));
        for w in candidates {
            if self.used >> w & 1 == 1
                || self.target_out[w] < self.src.out_degree(v)
                || self.target_in[w] < self.src.in_degree(v)
            {
                continue;
            }
            let compatible = self.order[..depth].iter().all(|&u| {
                let pu = self.image[u];
                (!self.src.contains(u, v) || self.dst.contains(pu, w))
                    && (!self.src.contains(v, u) || self.dst.contains(w, pu))
            });
            if !compatible {
                continue;
            }
            self.image[v] = w;
            self.used |= 1 << w;
            self.extend(depth + 1);
            self.used &= !(1 << w);
            self.image[v] = usize::MAX;
            if self.out.len() >= self.limit {
                return;
            }
        }
    }
}

/// Checks the defining property of an increasing permutation directly.
pub fn is_increasing(src: &QuasiOrder, dst: &QuasiOrder, perm: &[usize]) -> bool {
    src.n == dst.n && src.pairs().iter().all(|&(i, j)| dst.contains(perm[i], perm[j]))
}

pub fn inverse_permutation(perm: &[usize]) -> Permutation {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

/// The permutation matrix `R` with `R e_k = e_{π(k)}`, so `R E_ij R⁻¹ = E_{π(i)π(j)}`.
pub fn permutation_matrix<T: Scalar>(perm: &[usize]) -> DenseMatrix<T> {
    let n = perm.len();
    DenseMatrix::from_fn(n, n, |i, j| if perm[j] == i { T::one() } else { T::zero() })
}

impl fmt::Display for QuasiOrder {
    /// `.qo` syntax: `n`, then the strict pairs 1-based.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.n)?;
        for (i, j) in self.strict_part() {
            writeln!(f, "{} {}", i + 1, j + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for QuasiOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: BTreeSet<(usize, usize)> =
            self.strict_part().into_iter().map(|(i, j)| (i + 1, j + 1)).collect();
        write!(f, "QuasiOrder(n={}, strict={:?})", self.n, pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Matrix;

    fn qo(n: usize, edges: &[(usize, usize)]) -> QuasiOrder {
        let e: Vec<Pair> = edges.iter().map(|&(i, j)| (i - 1, j - 1)).collect();
        QuasiOrder::from_edges(n, &e, true).unwrap()
    }

    fn sets(p: &ClassPartition) -> Vec<Vec<usize>> {
        p.blocks.iter().map(|b| b.iter().map(|i| i + 1).collect()).collect()
    }

    #[test]
    fn closure_and_validation() {
        let rho = qo(3, &[(1, 2), (1, 3), (2, 3), (3, 2)]);
        assert_eq!(rho.len(), 7);
        assert_eq!(QuasiOrder::from_edges(3, &[], true).unwrap(), QuasiOrder::diagonal(3));
        assert_eq!(
            QuasiOrder::from_edges(3, &[(0, 1), (1, 2)], false),
            Err(Error::NotClosed {
                first: (0, 1),
                second: (1, 2)
            })
        );
        assert!(matches!(
            QuasiOrder::from_edges(2, &[(0, 2)], true),
            Err(Error::IndexOutOfRange { index: 2, n: 2 })
        ));
    }

    #[test]
    fn reverse_and_strict_part() {
        assert_eq!(
            QuasiOrder::upper_triangular(3).reverse(),
            QuasiOrder::from_fn(3, false, |i, j| i >= j).unwrap()
        );
        assert!(QuasiOrder::diagonal(4).strict_part().is_empty());
        assert_eq!(qo(3, &[(1, 2), (1, 3)]).reverse(), qo(3, &[(2, 1), (3, 1)]));
    }

    #[test]
    fn classes() {
        let rho = qo(3, &[(1, 2), (1, 3), (2, 3), (3, 2)]);
        assert_eq!(sets(&rho.two_sided_classes()), vec![vec![1], vec![2, 3]]);
        assert_eq!(QuasiOrder::upper_triangular(3).two_sided_classes().len(), 3);
        assert_eq!(QuasiOrder::full(3).two_sided_classes().len(), 1);

        let rect = qo(4, &[(1, 3), (1, 4), (2, 3), (2, 4)]);
        assert_eq!(sets(&rect.approx_classes()), vec![vec![1, 2, 3, 4]]);
        let two = qo(5, &[(1, 2), (4, 5)]);
        assert_eq!(sets(&two.approx_classes()), vec![vec![1, 2], vec![3], vec![4, 5]]);
    }

    #[test]
    fn central_idempotents_of_two_components() {
        let two = qo(5, &[(1, 2), (4, 5)]);
        let ps: Vec<Matrix> = two.central_idempotents();
        let expected: Vec<Matrix> = vec![
            Matrix::diag([1, 1, 0, 0, 0].map(Into::into).to_vec()),
            Matrix::diag([0, 0, 1, 0, 0].map(Into::into).to_vec()),
            Matrix::diag([0, 0, 0, 1, 1].map(Into::into).to_vec()),
        ];
        assert_eq!(ps, expected);
        let one: Vec<Matrix> = QuasiOrder::full(3).central_idempotents();
        assert_eq!(one, vec![Matrix::identity(3)]);
    }

    #[test]
    fn block_form_examples() {
        let rho = qo(3, &[(1, 2), (1, 3), (2, 3), (3, 2)]);
        let bt = rho.block_triangular_form();
        assert_eq!(bt.perm, vec![0, 1, 2]);
        assert_eq!(bt.sizes, vec![1, 2]);
        assert!(bt.presence[0][1]);

        let lam = qo(3, &[(2, 1), (3, 1)]);
        let bt = lam.block_triangular_form();
        assert_eq!(bt.perm, vec![2, 0, 1]);
        assert_eq!(bt.sizes, vec![1, 1, 1]);
        assert!(is_upper(&lam.permuted(&bt.perm)));

        let bt = QuasiOrder::diagonal(4).block_triangular_form();
        assert_eq!(bt.perm, vec![0, 1, 2, 3]);
        assert!(bt.presence.iter().enumerate().all(|(a, row)| row
            .iter()
            .enumerate()
            .all(|(b, &p)| p == (a == b))));
    }

    fn is_upper(q: &QuasiOrder) -> bool {
        q.pairs().iter().all(|&(i, j)| i <= j)
    }

    #[test]
    fn rectangle_listing() {
        let rect = qo(4, &[(1, 3), (1, 4), (2, 3), (2, 4)]);
        assert_eq!(
            rect.rectangles(),
            vec![Rectangle {
                rows: (0, 1),
                cols: (2, 3)
            }]
        );
        assert!(QuasiOrder::upper_triangular(2).rectangles().is_empty());
        assert!(QuasiOrder::upper_triangular(3).rectangles().contains(&Rectangle {
            rows: (0, 1),
            cols: (1, 2)
        }));
    }

    #[test]
    fn permutation_search() {
        let t2 = QuasiOrder::upper_triangular(2);
        assert!(t2.increasing_permutations(&t2, 10).contains(&vec![0, 1]));
        let v = qo(3, &[(1, 2), (1, 3)]);
        let lambda = qo(3, &[(2, 1), (3, 1)]);
        assert!(v.increasing_permutations(&lambda, usize::MAX).is_empty());
        assert!(v
            .increasing_permutations(&QuasiOrder::upper_triangular(3), usize::MAX)
            .contains(&vec![0, 1, 2]));
    }

    #[test]
    fn rho_u_examples() {
        let two = qo(5, &[(1, 2), (4, 5)]);
        assert_eq!(two.rho_u(&[0, 1, 2, 3, 4]).unwrap(), two);
        assert_eq!(two.rho_u(&[]).unwrap(), two.reverse());
        assert_eq!(two.rho_u(&[0, 1]).unwrap(), qo(5, &[(1, 2), (5, 4)]));
        assert_eq!(two.rho_u(&[0]), Err(Error::NotClassUnion(1)));
    }

    #[test]
    fn automorphism_examples() {
        let d2 = QuasiOrder::diagonal(2);
        assert_eq!(d2.automorphisms().len(), 2);
        assert!(!d2.automorphisms_fix_two_sided_classes());
        let t2 = QuasiOrder::upper_triangular(2);
        assert_eq!(t2.automorphisms(), vec![vec![0, 1]]);
        assert!(t2.automorphisms_fix_two_sided_classes());
        let f2 = QuasiOrder::full(2);
        assert_eq!(f2.automorphisms().len(), 2);
        assert!(f2.automorphisms_fix_two_sided_classes());
    }

    #[test]
    fn permutation_matrix_conjugates_units() {
        let perm = vec![1, 2, 0];
        let r: Matrix = permutation_matrix(&perm);
        let rinv = r.inverse().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let conj = &(&r * &Matrix::unit(3, i, j)) * &rinv;
                assert_eq!(conj, Matrix::unit(3, perm[i], perm[j]));
            }
        }
    }
}
