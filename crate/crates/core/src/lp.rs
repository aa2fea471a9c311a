//! Exact LP feasibility over the rationals: a dense phase-I simplex with
//! Bland's anti-cycling rule and dual extraction for infeasibility
//! certificates.
//!
//! The solver decides `∃x ≥ 0 : Ax = b` exactly. On success it returns a
//! basic feasible point; on failure a vector `y` with `yᵀA ≤ 0` and
//! `yᵀb > 0`, verified before returning. Exact arithmetic makes degenerate
//! pivots common, hence the smallest-index rule everywhere.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    /// A nonnegative solution of `Ax = b`.
    Feasible(Vec<BigRational>),
    /// A separating vector: `yᵀA_j ≤ 0` for every column, `yᵀb > 0`.
    Infeasible(Vec<BigRational>),
}

/// Decides feasibility of `{x ≥ 0 : Ax = b}` for a dense rational matrix.
pub fn solve_feasibility(a: &[Vec<BigRational>], b: &[BigRational]) -> Result<LpOutcome> {
    let m = a.len();
    if b.len() != m {
        return Err(Error::InvalidModel("LP shape mismatch".into()));
    }
    let n = a.first().map_or(0, Vec::len);
    if a.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidModel("LP rows differ in length".into()));
    }

    // Flip rows to make b nonnegative, remembering signs.
    let mut signs = vec![BigRational::one(); m];
    let mut tableau: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    let mut rhs: Vec<BigRational> = Vec::with_capacity(m);
    for i in 0..m {
        if b[i].is_negative() {
            signs[i] = -BigRational::one();
            tableau.push(a[i].iter().map(|v| -v).collect());
            rhs.push(-&b[i]);
        } else {
            tableau.push(a[i].clone());
            rhs.push(b[i].clone());
        }
    }

    // Phase-I: minimize the sum of artificial variables. Columns 0..n are
    // the original variables, n..n+m the artificials (identity).
    // basis[i] = column index basic in row i.
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Reduced-cost row for the original columns plus objective value:
    // c̄_j = -Σ_i tableau[i][j] initially, z = Σ_i rhs[i].
    let mut zrow: Vec<BigRational> = (0..n + m)
        .map(|j| {
            if j < n {
                -tableau.iter().map(|row| &row[j]).sum::<BigRational>()
            } else {
                BigRational::zero()
            }
        })
        .collect();
    let mut zval: BigRational = rhs.iter().sum();

    // Carry the artificial block explicitly: extend each row with the
    // identity so pivoting is uniform across all n + m columns.
    for (i, row) in tableau.iter_mut().enumerate() {
        let mut ident = vec![BigRational::zero(); m];
        ident[i] = BigRational::one();
        row.extend(ident);
    }

    loop {
        // Bland: entering column = smallest index with negative reduced cost.
        let entering = (0..n + m).find(|&j| zrow[j].is_negative());
        let Some(entering) = entering else {
            break;
        };
        // Ratio test with smallest-index tie break on the basis variable.
        let mut leaving: Option<usize> = None;
        let mut best: Option<BigRational> = None;
        for i in 0..m {
            if tableau[i][entering].is_positive() {
                let ratio = &rhs[i] / &tableau[i][entering];
                let better = match &best {
                    None => true,
                    Some(cur) => {
                        ratio < *cur
                            || (ratio == *cur
                                && basis[i] < basis[leaving.expect("leaving set with best")])
                    }
                };
                if better {
                    best = Some(ratio);
                    leaving = Some(i);
                }
            }
        }
        let Some(pivot_row) = leaving else {
            // Unbounded phase-I objective cannot happen (bounded below by 0).
            return Err(Error::InvalidModel("phase-I became unbounded".into()));
        };

        // Pivot.
        let pivot = tableau[pivot_row][entering].clone();
        for v in tableau[pivot_row].iter_mut() {
            *v /= &pivot;
        }
        rhs[pivot_row] /= &pivot;
        for i in 0..m {
            if i == pivot_row || tableau[i][entering].is_zero() {
                continue;
            }
            let factor = tableau[i][entering].clone();
            let pivot_row_vals = tableau[pivot_row].clone();
            for (j, v) in tableau[i].iter_mut().enumerate() {
                *v -= &factor * &pivot_row_vals[j];
            }
            let delta = &factor * &rhs[pivot_row];
            rhs[i] -= delta;
        }
        if !zrow[entering].is_zero() {
            let factor = zrow[entering].clone();
            for (j, v) in zrow.iter_mut().enumerate() {
                *v -= &factor * &tableau[pivot_row][j];
            }
            // Objective decreases by |c̄_j|·θ.
            zval += &factor * &rhs[pivot_row];
        }
        basis[pivot_row] = entering;
    }

    if zval.is_zero() {
        let mut x = vec![BigRational::zero(); n];
        for (i, &bj) in basis.iter().enumerate() {
            if bj < n {
                x[bj] = rhs[i].clone();
            }
        }
        // Exactness check before returning.
        for i in 0..m {
            let lhs: BigRational = (0..n).map(|j| &a[i][j] * &x[j]).sum();
            if lhs != b[i] {
                return Err(Error::InvalidModel(
                    "internal: simplex produced a non-solution".into(),
                ));
            }
        }
        Ok(LpOutcome::Feasible(x))
    } else {
        // y_i = 1 - c̄_{artificial i}, then unflip the row signs.
        let mut y: Vec<BigRational> = (0..m)
            .map(|i| BigRational::one() - &zrow[n + i])
            .collect();
        for i in 0..m {
            y[i] = &y[i] * &signs[i];
        }
        // Verification: yᵀA ≤ 0 on all columns, yᵀb > 0.
        #[allow(clippy::needless_range_loop)]
        for j in 0..n {
            let dot: BigRational = (0..m).map(|i| &y[i] * &a[i][j]).sum();
            if dot.is_positive() {
                return Err(Error::InvalidModel(
                    "internal: dual certificate fails on a column".into(),
                ));
            }
        }
        let dot_b: BigRational = (0..m).map(|i| &y[i] * &b[i]).sum();
        if !dot_b.is_positive() {
            return Err(Error::InvalidModel(
                "internal: dual certificate fails on the right-hand side".into(),
            ));
        }
        Ok(LpOutcome::Infeasible(y))
    }
}
