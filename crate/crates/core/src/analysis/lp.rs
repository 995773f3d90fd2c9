//! Exact phase-one simplex: a point of `{x ≥ 0 : A x = b}`.

use num_traits::{Signed, Zero};

use crate::matrix::Matrix;
use crate::rational::{zero, Q};

/// Returns some `x ≥ 0` with `a x = b`, or `None` when there is none.
/// Pivoting follows Bland's rule, so it terminates.
pub fn feasible_point(a: &Matrix, b: &[Q]) -> Option<Vec<Q>> {
    let (m, n) = a.shape();
    assert_eq!(b.len(), m, "right-hand side length");
    let width = n + m + 1;
    // Rows 0..m are constraints, row m is the phase-one objective.
    let mut tab = vec![vec![zero(); width]; m + 1];
    for i in 0..m {
        let flip = b[i].is_negative();
        for j in 0..n {
            tab[i][j] = if flip { -a.get(i, j) } else { a.get(i, j).clone() };
        }
        tab[i][n + i] = Q::from_integer(1.into());
        tab[i][width - 1] = if flip { -&b[i] } else { b[i].clone() };
    }
    for j in 0..n {
        tab[m][j] = -(0..m).fold(zero(), |acc, i| acc + &tab[i][j]);
    }
    tab[m][width - 1] = -(0..m).fold(zero(), |acc, i| acc + &tab[i][width - 1]);
    let mut basis: Vec<usize> = (n..n + m).collect();

    while let Some(enter) = (0..n + m).find(|&j| tab[m][j].is_negative()) {
        let mut leave: Option<(usize, Q)> = None;
        for i in 0..m {
            if tab[i][enter].is_positive() {
                let ratio = &tab[i][width - 1] / &tab[i][enter];
                let better = match &leave {
                    None => true,
                    Some((l, r)) => ratio < *r || (ratio == *r && basis[i] < basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // The phase-one objective is bounded below by zero.
        let (row, _) = leave.expect("phase one is bounded");
        pivot(&mut tab, row, enter);
        basis[row] = enter;
    }
    if !tab[m][width - 1].is_zero() {
        return None;
    }
    let mut x = vec![zero(); n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = tab[i][width - 1].clone();
        }
    }
    Some(x)
}

fn pivot(tab: &mut [Vec<Q>], row: usize, col: usize) {
    let p = tab[row][col].clone();
    for v in tab[row].iter_mut() {
        *v /= &p;
    }
    let pivot_row = tab[row].clone();
    for (i, r) in tab.iter_mut().enumerate() {
        if i == row || r[col].is_zero() {
            continue;
        }
        let f = r[col].clone();
        for (v, pv) in r.iter_mut().zip(&pivot_row) {
            if !pv.is_zero() {
                *v -= &f * pv;
            }
        }
    }
}
