//! Dense row-major matrices over an exact [`Scalar`] field.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Pair, Result};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            entries: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        DenseMatrix { rows, cols, entries }
    }

    /// Matrix unit `E_ij` of size `n` (0-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.set(i, j, T::one());
        m
    }

    pub fn diag(values: Vec<T>) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (k, v) in values.into_iter().enumerate() {
            m.set(k, k, v);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// Convenience constructor from small integers.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| T::from_i64(v)).collect())
                .collect(),
        )
        .expect("rectangular literal")
    }

    /// Column vector.
    pub fn column(values: Vec<T>) -> Self {
        let n = values.len();
        DenseMatrix {
            rows: n,
            cols: 1,
            entries: values,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(T::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn is_diagonal(&self) -> bool {
        self.support().all(|(i, j)| i == j)
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.support().all(|(i, j)| i <= j)
    }

    /// Positions of nonzero entries, row-major.
    pub fn support(&self) -> impl Iterator<Item = Pair> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, _)| (k / self.cols, k % self.cols))
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols))
            .map(|k| self.get(k, k).clone())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn conjugate_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|v| v.mul_ref(c))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add_ref(b))
                .collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.sub_ref(b))
                .collect(),
        })
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.entries[idx] = out.entries[idx].add_ref(&a.mul_ref(b));
                }
            }
        }
        Ok(out)
    }

    /// `AB + BA`
    pub fn jordan_product(&self, other: &Self) -> Result<Self> {
        self.multiply(other)?.try_add(&other.multiply(self)?)
    }

    /// Reduced row echelon form and its pivot columns. Pivots are the first
    /// nonzero entry found scanning columns left to right, rows top to bottom.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).recip();
            for j in c..m.cols {
                let v = m.get(r, j).mul_ref(&inv);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let v = m.get(i, j).sub_ref(&f.mul_ref(m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "inverse of a {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let aug = Self::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                T::one()
            } else {
                T::zero()
            }
        });
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::Singular);
        }
        Ok(Self::from_fn(n, n, |i, j| red.get(i, n + j).clone()))
    }

    /// Basis of `{x : Mx = 0}` as column vectors.
    pub fn kernel(&self) -> Vec<Vec<T>> {
        let (red, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![T::zero(); self.cols];
                x[f] = T::one();
                for (r, &p) in pivots.iter().enumerate() {
                    x[p] = -red.get(r, f).clone();
                }
                x
            })
            .collect()
    }

    /// Indices of the columns chosen as pivots by elimination: a basis of the
    /// column space drawn from the matrix's own columns.
    pub fn independent_columns(&self) -> Vec<usize> {
        self.rref().1
    }

    /// True iff the matrix is nonzero and every 2×2 minor vanishes.
    pub fn is_rank_one_by_minors(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        for i in 0..self.rows {
            for k in i + 1..self.rows {
                for j in 0..self.cols {
                    for l in j + 1..self.cols {
                        let minor = self
                            .get(i, j)
                            .mul_ref(self.get(k, l))
                            .sub_ref(&self.get(i, l).mul_ref(self.get(k, j)));
                        if !minor.is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// `(u, v)` with `M = u v*`, `u` the first nonzero column scaled to leading entry 1.
    pub fn rank_one_factor(&self) -> Result<(Vec<T>, Vec<T>)> {
        let rank = self.rank();
        if rank != 1 {
            return Err(Error::RankNotOne(rank));
        }
        let j0 = (0..self.cols)
            .find(|&j| (0..self.rows).any(|i| !self.get(i, j).is_zero()))
            .expect("nonzero matrix has a nonzero column");
        let col = self.col(j0);
        let i0 = col.iter().position(|v| !v.is_zero()).unwrap();
        let lead = col[i0].clone();
        let u: Vec<T> = col.iter().map(|v| v.div_ref(&lead)).collect();
        // M_{i0, j} = u_{i0} conj(v_j) = conj(v_j)
        let v: Vec<T> = self.row(i0).iter().map(T::conj).collect();
        Ok((u, v))
    }

    /// `u v*`
    pub fn outer(u: &[T], v: &[T]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i].mul_ref(&v[j].conj()))
    }

    /// `n²`-length row-major vectorisation.
    pub fn vectorize(&self) -> Vec<T> {
        self.entries.clone()
    }

    /// Submatrix on the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Trivially embed into a larger zero matrix at the top-left corner.
    pub fn padded(&self, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else {
                T::zero()
            }
        })
    }
}

impl<'a, T: Scalar> Mul<&'a DenseMatrix<T>> for &'a DenseMatrix<T> {
    type Output = DenseMatrix<T>;
    fn mul(self, rhs: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.multiply(rhs).expect("matrix dimensions")
    }
}

impl<'a, T: Scalar> Add<&'a DenseMatrix<T>> for &'a DenseMatrix<T> {
    type Output = DenseMatrix<T>;
    fn add(self, rhs: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.try_add(rhs).expect("matrix dimensions")
    }
}

impl<'a, T: Scalar> Sub<&'a DenseMatrix<T>> for &'a DenseMatrix<T> {
    type Output = DenseMatrix<T>;
    fn sub(self, rhs: &DenseMatrix<T>) -> DenseMatrix<T> {
        self.try_sub(rhs).expect("matrix dimensions")
    }
}

impl<T: Scalar> Neg for &DenseMatrix<T> {
    type Output = DenseMatrix<T>;
    fn neg(self) -> DenseMatrix<T> {
        self.map(|v| -v.clone())
    }
}

impl<T: fmt::Display> fmt::Display for DenseMatrix<T> {
    /// The `.gm` body: one row per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.entries[i * self.cols..(i + 1) * self.cols]
                .iter()
                .map(ToString::to_string)
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl<T: fmt::Debug> fmt::Debug for DenseMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.entries[i * self.cols..(i + 1) * self.cols]
                .iter()
                .map(|v| format!("{v:?}"))
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::GaussianRational as G;

    type M = DenseMatrix<G>;

    #[test]
    fn jordan_products_of_units() {
        let e11 = M::unit(2, 0, 0);
        let e12 = M::unit(2, 0, 1);
        assert_eq!(e11.jordan_product(&e12).unwrap(), e12);
        assert!(e12.jordan_product(&e12).unwrap().is_zero());
    }

    #[test]
    fn inverse_of_shear() {
        let a = M::from_i64_rows(&[&[1, 1], &[0, 1]]);
        let inv = a.inverse().unwrap();
        assert_eq!(inv, M::from_i64_rows(&[&[1, -1], &[0, 1]]));
        assert!((&a * &inv).is_identity());
        assert_eq!(M::from_i64_rows(&[&[1, 2], &[2, 4]]).inverse(), Err(Error::Singular));
        assert!(matches!(
            M::zeros(2, 3).inverse(),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn rank_one_examples() {
        let e12 = M::unit(3, 0, 1);
        assert!(e12.is_rank_one_by_minors());
        let (u, v) = e12.rank_one_factor().unwrap();
        assert_eq!(u, vec![G::from(1), G::from(0), G::from(0)]);
        assert_eq!(v, vec![G::from(0), G::from(1), G::from(0)]);

        let id2 = &M::unit(3, 0, 0) + &M::unit(3, 1, 1);
        assert!(!id2.is_rank_one_by_minors());

        let block = M::from_fn(4, 4, |i, j| G::from((i < 2 && j >= 2) as i64));
        assert!(block.is_rank_one_by_minors());
        let (u, v) = block.rank_one_factor().unwrap();
        assert_eq!(u, [1, 1, 0, 0].map(G::from).to_vec());
        assert_eq!(v, [0, 0, 1, 1].map(G::from).to_vec());
        assert_eq!(M::outer(&u, &v), block);

        assert_eq!(M::zeros(2, 2).rank_one_factor(), Err(Error::RankNotOne(0)));
    }

    #[test]
    fn conjugation_convention() {
        let i = G::i();
        let m = M::from_rows(vec![vec![i.clone(), G::from(1)], vec![G::from(0), G::from(0)]])
            .unwrap();
        let (u, v) = m.rank_one_factor().unwrap();
        assert_eq!(M::outer(&u, &v), m);
        assert_eq!(v[0], -i);
        assert_eq!(m.conjugate_transpose().get(0, 0), &-G::i());
    }

    #[test]
    fn kernel_spans_nullspace() {
        let m = M::from_i64_rows(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = m.kernel();
        assert_eq!(k.len(), 2);
        for x in k {
            assert!((&m * &M::column(x)).is_zero());
        }
    }
}
