//! Small named relations, weight maps and linear maps with known answers.

use std::collections::BTreeMap;

use crate::error::Pair;
use crate::jordan::LinearMapOnSMA;
use crate::quasiorder::QuasiOrder;
use crate::transmap::TransitiveMap;
use crate::{GaussianRational, Matrix};

/// Closure of the diagonal plus 1-based `edges`.
pub fn relation(n: usize, edges: &[(usize, usize)]) -> QuasiOrder {
    let e: Vec<Pair> = edges.iter().map(|&(i, j)| (i - 1, j - 1)).collect();
    QuasiOrder::from_edges(n, &e, true).expect("fixture indices in range")
}

/// Weights equal to one except at the listed 1-based pairs.
pub fn weights(rho: &QuasiOrder, overrides: &[((usize, usize), i64)]) -> TransitiveMap<GaussianRational> {
    let mut w: BTreeMap<Pair, GaussianRational> = rho
        .strict_part()
        .into_iter()
        .map(|p| (p, GaussianRational::from(1)))
        .collect();
    for &((i, j), v) in overrides {
        w.insert((i - 1, j - 1), GaussianRational::from(v));
    }
    TransitiveMap::validate(rho.clone(), w).expect("fixture weights are transitive")
}

/// One point below two: `{(1,2), (1,3)}`.
pub fn vee() -> QuasiOrder {
    relation(3, &[(1, 2), (1, 3)])
}

/// Two points below one: `{(2,1), (3,1)}`.
pub fn wedge() -> QuasiOrder {
    relation(3, &[(2, 1), (3, 1)])
}

/// `{1,2} × {3,4}`: the smallest relation admitting a nontrivial transitive map.
pub fn rectangle() -> QuasiOrder {
    relation(4, &[(1, 3), (1, 4), (2, 3), (2, 4)])
}

/// Rectangle weights with `g(1,4) = 2`.
pub fn rectangle_weights() -> TransitiveMap<GaussianRational> {
    weights(&rectangle(), &[((1, 4), 2)])
}

/// Zig-zag on ten points closed into a cycle through `(1,10)` and `(9,10)`.
pub fn zigzag10() -> QuasiOrder {
    relation(
        10,
        &[(1, 2), (1, 10), (3, 2), (3, 4), (5, 4), (5, 6), (7, 6), (7, 8), (9, 8), (9, 10)],
    )
}

/// `g(9,10) = 2`, all other weights one.
pub fn zigzag10_weights() -> TransitiveMap<GaussianRational> {
    weights(&zigzag10(), &[((9, 10), 2)])
}

/// The rank-four matrix on which the zig-zag weights raise the rank.
pub fn zigzag10_witness() -> Matrix {
    let mut a = Matrix::zeros(10, 10);
    for (i, j, v) in [
        (1, 2, 1),
        (1, 10, 1),
        (3, 2, 1),
        (3, 4, -1),
        (5, 4, -1),
        (5, 6, 1),
        (7, 6, 1),
        (7, 8, -1),
        (9, 8, -1),
        (9, 10, -1),
    ] {
        a.set(i - 1, j - 1, GaussianRational::from(v));
    }
    a
}

/// `{(1,2), (1,3), (2,3), (3,2)}`: a relation whose Jordan embeddings factor
/// in more than one way.
pub fn two_way_factorization() -> QuasiOrder {
    relation(3, &[(1, 2), (1, 3), (2, 3), (3, 2)])
}

/// Non-unital rank-one preserver on `{(1,3), (2,3)}` sending `E_11` to `E_33`
/// and fixing the other units.
pub fn non_unital_rank_one_preserver() -> LinearMapOnSMA<GaussianRational> {
    LinearMapOnSMA::from_fn(relation(3, &[(1, 3), (2, 3)]), |i, j| {
        if (i, j) == (0, 0) {
            Matrix::unit(3, 2, 2)
        } else {
            Matrix::unit(3, i, j)
        }
    })
}

/// Diagonal map with `E_ii ↦ E_ii` for `i < n` and `E_nn` to the all-ones
/// leading `(n−1)`-block: preserves every rank below `n` yet `φ(I)` is singular.
pub fn bordered_diagonal_map(n: usize) -> LinearMapOnSMA<GaussianRational> {
    LinearMapOnSMA::from_fn(QuasiOrder::diagonal(n), |i, _| {
        if i + 1 < n {
            Matrix::unit(n, i, i)
        } else {
            Matrix::from_fn(n, n, |r, c| GaussianRational::from((r + 1 < n && c + 1 < n) as i64))
        }
    })
}

/// Twelve relations on at most four points used for embedding censuses.
pub fn census() -> Vec<(&'static str, QuasiOrder)> {
    vec![
        ("diagonal3", QuasiOrder::diagonal(3)),
        ("chain3", QuasiOrder::upper_triangular(3)),
        ("full3", QuasiOrder::full(3)),
        ("vee", vee()),
        ("wedge", wedge()),
        ("two-way", two_way_factorization()),
        ("diagonal4", QuasiOrder::diagonal(4)),
        ("chain4", QuasiOrder::upper_triangular(4)),
        ("full4", QuasiOrder::full(4)),
        ("rectangle", rectangle()),
        ("zigzag4", relation(4, &[(1, 2), (3, 2), (3, 4)])),
        ("two-chains", relation(4, &[(1, 2), (3, 4)])),
    ]
}
