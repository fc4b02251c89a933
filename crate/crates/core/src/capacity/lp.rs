//! Exact phase-one simplex over the rationals.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Returns some `y >= 0` in `n` variables with `a·y = b`, or `None` when no
/// such `y` exists. Pivoting follows Bland's rule, so the method terminates.
pub(crate) fn feasible_point(
    n: usize,
    a: &[Vec<BigRational>],
    b: &[BigRational],
) -> Option<Vec<BigRational>> {
    let rows = a.len();
    debug_assert!(a.iter().all(|r| r.len() == n) && b.len() == rows);
    if rows == 0 {
        return Some(vec![BigRational::zero(); n]);
    }
    // columns: n originals, rows artificials, then the right-hand side
    let width = n + rows + 1;
    let mut t: Vec<Vec<BigRational>> = Vec::with_capacity(rows + 1);
    for (i, (row, rhs)) in a.iter().zip(b).enumerate() {
        let flip = rhs.is_negative();
        let mut r = vec![BigRational::zero(); width];
        for (j, x) in row.iter().enumerate() {
            r[j] = if flip { -x.clone() } else { x.clone() };
        }
        r[n + i] = BigRational::one();
        r[width - 1] = if flip { -rhs.clone() } else { rhs.clone() };
        t.push(r);
    }
    // objective row: minimise the artificial sum, stored as reduced costs
    let mut obj = vec![BigRational::zero(); width];
    for r in &t {
        for j in 0..width {
            if j < n || j == width - 1 {
                obj[j] -= &r[j];
            }
        }
    }
    t.push(obj);
    let mut basis: Vec<usize> = (n..n + rows).collect();

    loop {
        let Some(enter) = (0..width - 1).find(|&j| t[rows][j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..rows {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((p, _)) = leave else {
            // the artificial objective is bounded below by zero
            unreachable!("phase one cannot be unbounded");
        };
        pivot(&mut t, p, enter);
        basis[p] = enter;
    }

    if !t[rows][width - 1].is_zero() {
        return None;
    }
    let mut y = vec![BigRational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            y[bv] = t[i][width - 1].clone();
        }
    }
    Some(y)
}

fn pivot(t: &mut [Vec<BigRational>], p: usize, q: usize) {
    let inv = t[p][q].recip();
    for x in t[p].iter_mut() {
        *x *= &inv;
    }
    let prow = t[p].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == p || row[q].is_zero() {
            continue;
        }
        let f = row[q].clone();
        for (x, px) in row.iter_mut().zip(&prow) {
            if !px.is_zero() {
                *x -= &f * px;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn q(x: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(x))
    }

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| q(x)).collect())
            .collect()
    }

    fn satisfies(a: &[Vec<BigRational>], b: &[BigRational], y: &[BigRational]) -> bool {
        y.iter().all(|x| !x.is_negative())
            && a.iter().zip(b).all(|(row, rhs)| {
                row.iter().zip(y).map(|(c, v)| c * v).sum::<BigRational>() == *rhs
            })
    }

    #[test]
    fn small_systems() {
        let a = mat(&[&[1, 1], &[1, -1]]);
        let b = vec![q(4), q(2)];
        let y = feasible_point(a[0].len(), &a, &b).unwrap();
        assert_eq!(y, vec![q(3), q(1)]);

        let a = mat(&[&[1, 1]]);
        assert!(feasible_point(a[0].len(), &a, &[q(-1)]).is_none());

        let a = mat(&[&[1, -1], &[-1, 1]]);
        assert!(feasible_point(a[0].len(), &a, &[q(1), q(1)]).is_none());
        assert!(feasible_point(a[0].len(), &a, &[q(1), q(-1)]).is_some());

        assert_eq!(feasible_point(0, &[], &[]), Some(vec![]));
    }

    #[test]
    fn degenerate_redundant_rows() {
        let a = mat(&[&[1, 2, 3], &[2, 4, 6], &[0, 0, 0]]);
        let b = vec![q(6), q(12), q(0)];
        let y = feasible_point(a[0].len(), &a, &b).unwrap();
        assert!(satisfies(&a, &b, &y));
    }

    proptest! {
        #[test]
        fn planted_solutions_are_found(
            coeffs in prop::collection::vec(-3i64..=3, 12),
            sol in prop::collection::vec(0i64..=4, 4),
        ) {
            let a: Vec<Vec<BigRational>> = coeffs.chunks(4).map(|r| r.iter().map(|&x| q(x)).collect()).collect();
            let b: Vec<BigRational> = a.iter().map(|r| r.iter().zip(&sol).map(|(c, &s)| c * q(s)).sum()).collect();
            let y = feasible_point(a[0].len(), &a, &b);
            prop_assert!(y.is_some());
            prop_assert!(satisfies(&a, &b, &y.unwrap()));
        }

        #[test]
        fn answers_are_sound(
            coeffs in prop::collection::vec(-2i64..=2, 6),
            rhs in prop::collection::vec(-3i64..=3, 3),
        ) {
            let a: Vec<Vec<BigRational>> = coeffs.chunks(2).map(|r| r.iter().map(|&x| q(x)).collect()).collect();
            let b: Vec<BigRational> = rhs.iter().map(|&x| q(x)).collect();
            match feasible_point(a[0].len(), &a, &b) {
                Some(y) => prop_assert!(satisfies(&a, &b, &y)),
                None => {
                    // no point on the quarter grid works either
                    for i in 0..=24 {
                        for j in 0..=24 {
                            let y = [BigRational::new(BigInt::from(i), BigInt::from(4)), BigRational::new(BigInt::from(j), BigInt::from(4))];
                            prop_assert!(!satisfies(&a, &b, &y));
                        }
                    }
                }
            }
        }
    }
}
