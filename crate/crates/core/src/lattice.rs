//! Smith normal form over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// `u · m · v = diag(diag)` with `u`, `v` unimodular.
#[derive(Debug, Clone)]
pub struct Smith {
    /// Invariant factors, nonnegative, each dividing the next nonzero one.
    pub diag: Vec<BigInt>,
    pub u: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i32)).collect())
        .collect()
}

/// `row[a] -= q · row[b]`
fn row_axpy(m: &mut [Vec<BigInt>], a: usize, b: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (src, dst) = if a < b {
        let (lo, hi) = m.split_at_mut(b);
        (&hi[0], &mut lo[a])
    } else {
        let (lo, hi) = m.split_at_mut(a);
        (&lo[b], &mut hi[0])
    };
    for (d, s) in dst.iter_mut().zip(src) {
        *d -= q * s;
    }
}

fn col_axpy(m: &mut [Vec<BigInt>], a: usize, b: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for row in m.iter_mut() {
        let t = q * &row[b];
        row[a] -= t;
    }
}

fn col_swap(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

pub fn smith_normal_form(m: &[Vec<BigInt>], cols: usize) -> Smith {
    let rows = m.len();
    let mut a: Vec<Vec<BigInt>> = m.to_vec();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let steps = rows.min(cols);
    let mut diag = Vec::with_capacity(steps);
    for t in 0..steps {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by(|&(i, j), &(k, l)| a[i][j].abs().cmp(&a[k][l].abs()));
        let Some((pi, pj)) = pivot else {
            diag.extend(std::iter::repeat_n(BigInt::zero(), steps - t));
            break;
        };
        a.swap(t, pi);
        u.swap(t, pi);
        col_swap(&mut a, t, pj);
        col_swap(&mut v, t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    u.swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_axpy(&mut a, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                if !a[t][j].is_zero() {
                    col_swap(&mut a, t, j);
                    col_swap(&mut v, t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Enforce divisibility of the remaining block by the pivot.
            let bad = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !(&a[i][j] % &a[t][t]).is_zero())
            });
            match bad {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    row_axpy(&mut a, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -x.clone();
            }
            for x in u[t].iter_mut() {
                *x = -x.clone();
            }
        }
        diag.push(a[t][t].clone());
    }
    Smith { diag, u, v }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>], inner: usize, cols: usize) -> Vec<Vec<BigInt>> {
        a.iter()
            .map(|row| {
                (0..cols)
                    .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                    .collect()
            })
            .collect()
    }

    fn check(m: Vec<Vec<BigInt>>, cols: usize, expected: &[i64]) {
        let s = smith_normal_form(&m, cols);
        assert_eq!(s.diag, expected.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
        let um = mul(&s.u, &m, m.len(), cols);
        let umv = mul(&um, &s.v, cols, cols);
        for (i, row) in umv.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j && i < s.diag.len() { s.diag[i].clone() } else { BigInt::zero() };
                assert_eq!(*x, want, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn known_forms() {
        check(big(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]), 3, &[2, 6, 12]);
        check(big(&[&[1, 1], &[1, -1]]), 2, &[1, 2]);
        check(big(&[&[0, 0], &[0, 0], &[0, 3]]), 2, &[3, 0]);
        check(big(&[&[4, 6]]), 2, &[2]);
    }
}
