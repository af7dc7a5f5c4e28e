//! Dense Gaussian elimination over [`Scalar`].

use crate::scalar::Scalar;

fn pivot_row<S: Scalar>(rows: &[Vec<S>], col: usize, from: usize, tol: f64) -> Option<usize> {
    if S::EXACT {
        (from..rows.len()).find(|&r| !rows[r][col].is_zero())
    } else {
        (from..rows.len())
            .filter(|&r| !rows[r][col].approx_zero(tol))
            .max_by(|&a, &b| {
                rows[a][col]
                    .abs()
                    .partial_cmp(&rows[b][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    }
}

/// Reduces `rows` to row echelon form in place and returns the pivot columns.
/// Only the first `cols` columns are used as pivots.
fn eliminate<S: Scalar>(rows: &mut [Vec<S>], cols: usize, tol: f64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        if next == rows.len() {
            break;
        }
        let Some(r) = pivot_row(rows, col, next, tol) else {
            continue;
        };
        rows.swap(next, r);
        let pivot = rows[next][col].clone();
        for below in next + 1..rows.len() {
            if rows[below][col].is_zero() {
                continue;
            }
            let factor = rows[below][col].clone() / pivot.clone();
            for c in col..rows[below].len() {
                let delta = factor.clone() * rows[next][c].clone();
                rows[below][c] = rows[below][c].clone() - delta;
            }
        }
        pivots.push(col);
        next += 1;
    }
    pivots
}

/// Rank of a (possibly non-square) matrix.
pub fn rank<S: Scalar>(matrix: &[Vec<S>], tol: f64) -> usize {
    let cols = matrix.first().map_or(0, Vec::len);
    let mut rows = matrix.to_vec();
    eliminate(&mut rows, cols, tol).len()
}

/// Solves the square system `a x = b`; `None` when `a` is singular.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S], tol: f64) -> Option<Vec<S>> {
    let n = a.len();
    let mut rows: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    if eliminate(&mut rows, n, tol).len() < n {
        return None;
    }
    let mut x = vec![S::zero(); n];
    for i in (0..n).rev() {
        let mut acc = rows[i][n].clone();
        for j in i + 1..n {
            acc = acc - rows[i][j].clone() * x[j].clone();
        }
        x[i] = acc / rows[i][i].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| ratio(v, 1)).collect())
            .collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        assert_eq!(rank(&m(&[&[1, 2], &[2, 4]]), 0.0), 1);
        assert_eq!(rank(&m(&[&[1, 2, 3], &[0, 1, 1]]), 0.0), 2);
        assert_eq!(rank(&m(&[&[0, 0]]), 0.0), 0);
    }

    #[test]
    fn solves_exactly() {
        let x = solve(&m(&[&[2, 1], &[1, 3]]), &[ratio(3, 1), ratio(5, 1)], 0.0).unwrap();
        assert_eq!(x, vec![ratio(4, 5), ratio(7, 5)]);
        assert!(solve(&m(&[&[1, 1], &[2, 2]]), &[ratio(1, 1), ratio(2, 1)], 0.0).is_none());
    }

    #[test]
    fn solves_in_floats() {
        let a = vec![vec![0.0, 1.0], vec![1.0, 1.0]];
        let x = solve(&a, &[2.0, 3.0], 1e-12).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }
}
