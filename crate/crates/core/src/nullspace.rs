//! Exact integer nullspaces by fraction-free elimination.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

fn row_content(row: &[BigInt]) -> BigInt {
    row.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

fn divide_out(row: &mut [BigInt]) {
    let g = row_content(row);
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// Primitive, with the last nonzero entry positive. Zero stays zero.
pub fn normalize(v: &mut [BigInt]) {
    divide_out(v);
    if v.iter().rev().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in v.iter_mut() {
            *x = -&*x;
        }
    }
}

/// Reduced echelon form over ℤ: every pivot column is zero outside its pivot
/// row, and every row is primitive. Returns the pivot columns in row order.
pub fn integer_rref(m: &mut Vec<Vec<BigInt>>) -> Vec<usize> {
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(found) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, found);
        divide_out(&mut m[r]);
        if m[r][c].is_negative() {
            for x in m[r].iter_mut() {
                *x = -&*x;
            }
        }
        let pivot_row = m[r].clone();
        let p = &pivot_row[c];
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = &*x * p - &f * y;
            }
            divide_out(row);
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    pivots
}

/// An integer basis of `{x : M x = 0}`, one vector per free column, each primitive.
pub fn integer_nullspace(matrix: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let cols = matrix.first().map_or(0, Vec::len);
    let mut m = matrix.to_vec();
    let pivots = integer_rref(&mut m);
    let scale = pivots
        .iter()
        .enumerate()
        .fold(BigInt::one(), |l, (i, &c)| l.lcm(&m[i][c]));
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![BigInt::zero(); cols];
            v[f] = scale.clone();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = -(&m[i][f] * &scale / &m[i][c]);
            }
            normalize(&mut v);
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn times(m: &[Vec<BigInt>], v: &[BigInt]) -> Vec<BigInt> {
        m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    #[test]
    fn small_nullspaces() {
        let m = big(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = integer_nullspace(&m);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(times(&m, v).iter().all(Zero::is_zero));
        }
        let m = big(&[&[2, 0], &[0, 3]]);
        assert!(integer_nullspace(&m).is_empty());
        let m = big(&[&[2, 3]]);
        assert_eq!(integer_nullspace(&m), big(&[&[-3, 2]]));
    }

    proptest! {
        #[test]
        fn nullspace_vectors_are_annihilated_and_independent(
            rows in prop::collection::vec(prop::collection::vec(-5i64..5, 6), 1..6),
        ) {
            let m: Vec<Vec<BigInt>> =
                rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
            let ns = integer_nullspace(&m);
            let mut echelon = m.clone();
            let rank = integer_rref(&mut echelon).len();
            prop_assert_eq!(ns.len(), 6 - rank);
            for v in &ns {
                prop_assert!(times(&m, v).iter().all(Zero::is_zero));
                prop_assert!(v.iter().any(|x| !x.is_zero()));
            }
            let mut basis = ns.clone();
            if !basis.is_empty() {
                prop_assert_eq!(integer_rref(&mut basis).len(), ns.len());
            }
        }
    }
}
