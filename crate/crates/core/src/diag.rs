//! Spectral idempotents and simultaneous diagonalization by similarities taken
//! from the structural matrix algebra itself.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::poly::Poly;
use crate::quasiorder::{permutation_matrix, QuasiOrder};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralDecomposition<T> {
    /// `(λ, P_λ)` in [`Scalar::canonical_cmp`] order of `λ`.
    pub pairs: Vec<(T, DenseMatrix<T>)>,
}

impl<T: Scalar> SpectralDecomposition<T> {
    pub fn eigenvalues(&self) -> Vec<T> {
        self.pairs.iter().map(|(l, _)| l.clone()).collect()
    }

    pub fn idempotents(&self) -> Vec<DenseMatrix<T>> {
        self.pairs.iter().map(|(_, p)| p.clone()).collect()
    }

    /// Orthogonality, `Σ P_λ = I` and `Σ λ P_λ = A`.
    pub fn verify(&self, a: &DenseMatrix<T>) -> bool {
        let n = a.rows();
        let mut sum = DenseMatrix::zeros(n, n);
        let mut weighted = DenseMatrix::zeros(n, n);
        for (x, (l, p)) in self.pairs.iter().enumerate() {
            for (y, (_, q)) in self.pairs.iter().enumerate() {
                let pq = p * q;
                if (x == y && pq != *p) || (x != y && !pq.is_zero()) {
                    return false;
                }
            }
            sum = &sum + p;
            weighted = &weighted + &p.scale(l);
        }
        sum.is_identity() && weighted == *a
    }
}

fn check_square<T: Scalar>(a: &DenseMatrix<T>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix is not square",
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

/// Monic minimal polynomial: the first linear dependency among `I, A, A², …`.
pub fn minimal_polynomial<T: Scalar>(a: &DenseMatrix<T>) -> Result<Poly<T>> {
    check_square(a)?;
    let n = a.rows();
    let mut powers = vec![DenseMatrix::identity(n).vectorize()];
    let mut current = DenseMatrix::identity(n);
    loop {
        current = &current * a;
        powers.push(current.vectorize());
        let k = powers.len();
        let stacked = DenseMatrix::from_fn(n * n, k, |r, c| powers[c][r].clone());
        if let Some(coeffs) = stacked.kernel().into_iter().next() {
            return Ok(Poly::new(coeffs).monic());
        }
    }
}

fn poly_at<T: Scalar>(p: &Poly<T>, a: &DenseMatrix<T>) -> DenseMatrix<T> {
    let n = a.rows();
    p.coeffs.iter().rev().fold(DenseMatrix::zeros(n, n), |acc, c| {
        &(&acc * a) + &DenseMatrix::identity(n).scale(c)
    })
}

/// Eigenvalues and spectral idempotents via Lagrange polynomials in `A`.
pub fn spectral_idempotents<T: Scalar>(a: &DenseMatrix<T>) -> Result<SpectralDecomposition<T>> {
    let minpoly = minimal_polynomial(a)?;
    if !minpoly.is_squarefree() {
        return Err(Error::NotDiagonalizable);
    }
    let roots = T::roots_in_field(&minpoly);
    if Some(roots.len()) != minpoly.degree() {
        return Err(Error::IrrationalSpectrum);
    }
    let pairs = roots
        .iter()
        .map(|l| {
            let lagrange = roots
                .iter()
                .filter(|m| *m != l)
                .fold(Poly::one(), |acc, m| {
                    let denom = l.sub_ref(m).recip();
                    acc.mul(&Poly::new(vec![-m.mul_ref(&denom), denom]))
                });
            (l.clone(), poly_at(&lagrange, a))
        })
        .collect();
    let dec = SpectralDecomposition { pairs };
    if !dec.verify(a) {
        return Err(Error::InternalInconsistency(
            "spectral idempotents fail their identities".into(),
        ));
    }
    Ok(dec)
}

fn check_commuting<T: Scalar>(family: &[DenseMatrix<T>]) -> Result<()> {
    for (x, f) in family.iter().enumerate() {
        check_square(f)?;
        if f.rows() != family[0].rows() {
            return Err(Error::DimensionMismatch("family members differ in size".into()));
        }
        for (y, g) in family.iter().enumerate().skip(x + 1) {
            if f * g != g * f {
                return Err(Error::PreconditionViolated(format!(
                    "members {} and {} do not commute",
                    x + 1,
                    y + 1
                )));
            }
        }
    }
    Ok(())
}

/// `T` upper-triangular with `T⁻¹PT` diagonal for each member: column `j` of `T`
/// is column `j` of the member with a 1 at `(j, j)`.
pub fn idempotent_family_triangular_similarity<T: Scalar>(
    family: &[DenseMatrix<T>],
) -> Result<DenseMatrix<T>> {
    let violated = |what: &str| Err(Error::PreconditionViolated(what.to_string()));
    let Some(first) = family.first() else {
        return violated("family is empty");
    };
    let n = first.rows();
    let mut sum = DenseMatrix::zeros(n, n);
    for (x, p) in family.iter().enumerate() {
        if !p.is_square() || p.rows() != n {
            return violated("members are not square of equal size");
        }
        if !p.is_upper_triangular() {
            return violated("member is not upper-triangular");
        }
        if p.is_zero() {
            return violated("member is zero");
        }
        for (y, q) in family.iter().enumerate() {
            let pq = p * q;
            if x == y && pq != *p {
                return violated("member is not idempotent");
            }
            if x != y && !pq.is_zero() {
                return violated("members are not orthogonal");
            }
        }
        sum = &sum + p;
    }
    if !sum.is_identity() {
        return violated("members do not sum to the identity");
    }
    let mut t = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let p = family
            .iter()
            .find(|p| p.get(j, j).is_one())
            .expect("diagonals of the members partition the identity");
        for i in 0..=j {
            t.set(i, j, p.get(i, j).clone());
        }
    }
    Ok(t)
}

/// Nonzero products `P¹_λ₁ ⋯ Pᵐ_λₘ` of the spectral idempotents of the members.
pub fn joint_idempotents<T: Scalar>(family: &[DenseMatrix<T>]) -> Result<Vec<DenseMatrix<T>>> {
    let n = family.first().map_or(0, DenseMatrix::rows);
    let mut joint = vec![DenseMatrix::identity(n)];
    for f in family {
        let dec = spectral_idempotents(f)?;
        joint = joint
            .iter()
            .flat_map(|q| dec.pairs.iter().map(move |(_, p)| q * p))
            .filter(|qp| !qp.is_zero())
            .collect();
    }
    Ok(joint)
}

/// `U` with `U F U⁻¹` upper-triangular (in fact diagonal) for every member.
pub fn common_triangularizer<T: Scalar>(family: &[DenseMatrix<T>]) -> Result<DenseMatrix<T>> {
    if family.is_empty() {
        return Err(Error::PreconditionViolated("family is empty".into()));
    }
    check_commuting(family)?;
    let n = family[0].rows();
    // Range bases of the joint idempotents, ordered by source column so a
    // diagonal family gets `U = I`.
    let mut columns: Vec<(usize, Vec<T>)> = Vec::with_capacity(n);
    for q in joint_idempotents(family)? {
        for j in q.independent_columns() {
            columns.push((j, q.col(j)));
        }
    }
    columns.sort_by_key(|(j, _)| *j);
    let w = DenseMatrix::from_fn(n, n, |i, j| columns[j].1[i].clone());
    w.inverse()
}

fn block_diagonal<T: Scalar>(blocks: &[DenseMatrix<T>]) -> DenseMatrix<T> {
    let n: usize = blocks.iter().map(DenseMatrix::rows).sum();
    let mut out = DenseMatrix::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                out.set(offset + i, offset + j, b.get(i, j).clone());
            }
        }
        offset += b.rows();
    }
    out
}

/// `S ∈ A_ρ` invertible with `S⁻¹ F S` diagonal for every member of a commuting
/// family of diagonalizable matrices supported in `ρ`.
pub fn simultaneous_diagonalize_in_sma<T: Scalar>(
    rho: &QuasiOrder,
    family: &[DenseMatrix<T>],
) -> Result<DenseMatrix<T>> {
    let n = rho.n();
    for f in family {
        rho.check_support(f)?;
    }
    if family.is_empty() {
        return Ok(DenseMatrix::identity(n));
    }
    check_commuting(family)?;

    // Make the relation block upper-triangular with full diagonal blocks.
    let bt = rho.block_triangular_form();
    let r: DenseMatrix<T> = permutation_matrix(&bt.perm);
    let r_inv = r.transpose();
    let permuted: Vec<DenseMatrix<T>> = family.iter().map(|f| &(&r * f) * &r_inv).collect();

    // Diagonalize the diagonal blocks independently.
    let mut u_blocks = Vec::with_capacity(bt.sizes.len());
    let mut offset = 0;
    for &size in &bt.sizes {
        let idx: Vec<usize> = (offset..offset + size).collect();
        let blocks: Vec<DenseMatrix<T>> = permuted.iter().map(|f| f.select(&idx, &idx)).collect();
        u_blocks.push(if size == 1 {
            DenseMatrix::identity(1)
        } else {
            common_triangularizer(&blocks)?
        });
        offset += size;
    }
    let u = block_diagonal(&u_blocks);
    let u_inv = u.inverse()?;
    let triangular: Vec<DenseMatrix<T>> =
        permuted.iter().map(|f| &(&u * f) * &u_inv).collect();

    // Refined idempotent family of the now upper-triangular members.
    let t = idempotent_family_triangular_similarity(&joint_idempotents(&triangular)?)?;
    let inner = &u_inv * &t;
    let s = &(&r_inv * &inner) * &r;

    let s_inv = s.inverse()?;
    rho.check_support(&s)?;
    rho.check_support(&s_inv)?;
    for f in family {
        if !(&(&s_inv * f) * &s).is_diagonal() {
            return Err(Error::InternalInconsistency(
                "similarity does not diagonalize the family".into(),
            ));
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{GaussianRational as G, Matrix};

    #[test]
    fn spectral_examples() {
        let d = Matrix::diag(vec![G::from(1), G::from(2)]);
        let dec = spectral_idempotents(&d).unwrap();
        assert_eq!(
            dec.pairs,
            vec![(G::from(1), Matrix::unit(2, 0, 0)), (G::from(2), Matrix::unit(2, 1, 1))]
        );

        let a = Matrix::from_i64_rows(&[&[0, 1], &[0, 1]]);
        let dec = spectral_idempotents(&a).unwrap();
        assert_eq!(
            dec.pairs,
            vec![
                (G::from(0), Matrix::from_i64_rows(&[&[1, -1], &[0, 0]])),
                (G::from(1), a.clone())
            ]
        );

        assert_eq!(
            spectral_idempotents(&Matrix::from_i64_rows(&[&[0, 1], &[0, 0]])),
            Err(Error::NotDiagonalizable)
        );
        assert_eq!(
            spectral_idempotents(&Matrix::from_i64_rows(&[&[0, 2], &[1, 0]])),
            Err(Error::IrrationalSpectrum)
        );
        // Rotation by a quarter turn has spectrum ±i.
        let rot = Matrix::from_i64_rows(&[&[0, -1], &[1, 0]]);
        assert_eq!(spectral_idempotents(&rot).unwrap().eigenvalues(), vec![-G::i(), G::i()]);
        let id = spectral_idempotents(&Matrix::identity(3)).unwrap();
        assert_eq!(id.pairs.len(), 1);
    }

    #[test]
    fn triangular_similarity_examples() {
        let units: Vec<Matrix> = (0..3).map(|k| Matrix::unit(3, k, k)).collect();
        assert!(idempotent_family_triangular_similarity(&units).unwrap().is_identity());

        let fam = vec![
            Matrix::from_i64_rows(&[&[1, 1], &[0, 0]]),
            Matrix::from_i64_rows(&[&[0, -1], &[0, 1]]),
        ];
        let t = idempotent_family_triangular_similarity(&fam).unwrap();
        assert_eq!(t, Matrix::from_i64_rows(&[&[1, -1], &[0, 1]]));
        let t_inv = t.inverse().unwrap();
        for p in &fam {
            assert!((&(&t_inv * p) * &t).is_diagonal());
        }

        let a = Matrix::from_i64_rows(&[&[0, 1], &[0, 1]]);
        let t = idempotent_family_triangular_similarity(&spectral_idempotents(&a).unwrap().idempotents())
            .unwrap();
        assert_eq!(t, Matrix::from_i64_rows(&[&[1, 1], &[0, 1]]));
        assert_eq!(
            &(&t.inverse().unwrap() * &a) * &t,
            Matrix::diag(vec![G::from(0), G::from(1)])
        );

        assert!(matches!(
            idempotent_family_triangular_similarity(&[Matrix::unit(2, 0, 0)]),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn triangularizer_examples() {
        let f = Matrix::from_i64_rows(&[&[1, 0], &[1, 2]]);
        let u = common_triangularizer(std::slice::from_ref(&f)).unwrap();
        assert!((&(&u * &f) * &u.inverse().unwrap()).is_upper_triangular());
        let d = Matrix::diag(vec![G::from(3), G::from(1)]);
        assert!(common_triangularizer(&[d]).unwrap().is_identity());
        let a = Matrix::from_i64_rows(&[&[2, 1, 0], &[1, 2, 0], &[0, 0, 1]]);
        let fam = [a.clone(), &a * &a];
        let u = common_triangularizer(&fam).unwrap();
        let ui = u.inverse().unwrap();
        for m in &fam {
            assert!((&(&u * m) * &ui).is_upper_triangular());
        }
    }

    #[test]
    fn sma_pipeline_examples() {
        let t2 = QuasiOrder::upper_triangular(2);
        let a = Matrix::from_i64_rows(&[&[0, 1], &[0, 1]]);
        let s = simultaneous_diagonalize_in_sma(&t2, std::slice::from_ref(&a)).unwrap();
        assert_eq!(s, Matrix::from_i64_rows(&[&[1, 1], &[0, 1]]));
        let s2 = simultaneous_diagonalize_in_sma(&t2, &[a.clone(), Matrix::identity(2)]).unwrap();
        assert_eq!(s2, s);

        let d = Matrix::diag(vec![G::from(2), G::from(5), G::from(2)]);
        let rho = QuasiOrder::from_edges(3, &[(1, 0), (2, 0)], true).unwrap();
        let s = simultaneous_diagonalize_in_sma(&rho, std::slice::from_ref(&d)).unwrap();
        assert_eq!(&(&s.inverse().unwrap() * &d) * &s, d);

        assert_eq!(
            simultaneous_diagonalize_in_sma(&t2, &[Matrix::unit(2, 1, 0)]),
            Err(Error::SupportViolation((1, 0)))
        );
    }

    #[test]
    fn pipeline_with_two_sided_block() {
        // ρ: {1} below the two-sided class {2,3}; a member conjugated by an element of A_ρ.
        let rho = QuasiOrder::from_edges(3, &[(0, 1), (0, 2), (1, 2), (2, 1)], true).unwrap();
        let s0 = Matrix::from_i64_rows(&[&[1, 2, -1], &[0, 1, 1], &[0, 1, 2]]);
        let d = Matrix::diag(vec![G::from(1), G::from(2), G::from(3)]);
        let a = &(&s0 * &d) * &s0.inverse().unwrap();
        let s = simultaneous_diagonalize_in_sma(&rho, std::slice::from_ref(&a)).unwrap();
        assert!((&(&s.inverse().unwrap() * &a) * &s).is_diagonal());
        rho.check_support(&s).unwrap();
    }
}
