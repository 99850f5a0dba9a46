use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Default relative rank tolerance, `1e-10 * max(rows, cols)`.
pub fn default_rel_tol(rows: usize, cols: usize) -> f64 {
    1e-10 * rows.max(cols).max(1) as f64
}

/// Singular values in decreasing order.
pub fn singular_values(m: &DenseMatrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.to_nalgebra().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `rel_tol * σ_max`.
pub fn numerical_rank(m: &DenseMatrix, rel_tol: f64) -> usize {
    rank_from_singular_values(&singular_values(m), rel_tol)
}

pub fn rank_from_singular_values(sv: &[f64], rel_tol: f64) -> usize {
    match sv.first() {
        Some(&max) if max > 0.0 => sv.iter().filter(|s| **s > rel_tol * max).count(),
        _ => 0,
    }
}

/// Rank with [`default_rel_tol`].
pub fn rank(m: &DenseMatrix) -> usize {
    numerical_rank(m, default_rel_tol(m.rows(), m.cols()))
}

/// `σ_max / σ_min` over the `min(rows, cols)` singular values; `+inf` when
/// `σ_min` underflows.
pub fn condition_number(m: &DenseMatrix) -> f64 {
    condition_from_singular_values(&singular_values(m))
}

pub fn condition_from_singular_values(sv: &[f64]) -> f64 {
    match (sv.first(), sv.last()) {
        (Some(&max), Some(&min)) if min > f64::MIN_POSITIVE && max.is_finite() => max / min,
        _ => f64::INFINITY,
    }
}

/// Solution of a least-squares problem.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    /// `unknowns x rhs_columns`.
    pub solution: DenseMatrix,
    /// Frobenius norm of `M X - rhs`.
    pub residual: f64,
    /// Column order chosen by pivoting.
    pub pivots: Vec<usize>,
}

/// Minimise `||M X - rhs||_F` by Householder QR with column pivoting.
///
/// Each row of `rhs` is the right-hand side of the matching equation.
/// Pivot ties go to the lowest column index. Fails when `M` has numerical
/// rank below its column count at [`default_rel_tol`].
pub fn solve_least_squares(m: &DenseMatrix, rhs: &DenseMatrix) -> Result<LeastSquares> {
    solve_least_squares_with_tol(m, rhs, default_rel_tol(m.rows(), m.cols()))
}

pub fn solve_least_squares_with_tol(
    m: &DenseMatrix,
    rhs: &DenseMatrix,
    rel_tol: f64,
) -> Result<LeastSquares> {
    let (rows, k) = m.shape();
    if rhs.rows() != rows {
        return Err(Error::DimensionMismatch(format!(
            "{rows} equations but {} right-hand sides",
            rhs.rows()
        )));
    }
    if rows < k {
        return Err(Error::RankDeficient {
            rank: rows,
            required: k,
            context: "fewer equations than unknowns".into(),
        });
    }
    let q = rhs.cols();
    // Column-major working copy of M.
    let mut cols: Vec<Vec<f64>> = (0..k).map(|j| m.column(j)).collect();
    let mut b = rhs.clone();
    let mut pivots: Vec<usize> = (0..k).collect();
    let mut r00 = 0.0f64;

    for j in 0..k {
        let norm2 = |c: &Vec<f64>| c[j..].iter().map(|v| v * v).sum::<f64>();
        let mut best = j;
        let mut best_norm = norm2(&cols[j]);
        for (c, col) in cols.iter().enumerate().skip(j + 1) {
            let n = norm2(col);
            if n > best_norm {
                best = c;
                best_norm = n;
            }
        }
        if best != j {
            cols.swap(j, best);
            pivots.swap(j, best);
        }
        let alpha_norm = best_norm.sqrt();
        if j == 0 {
            r00 = alpha_norm;
        }
        if alpha_norm <= rel_tol * r00 || alpha_norm == 0.0 {
            return Err(Error::RankDeficient {
                rank: j,
                required: k,
                context: "least-squares system".into(),
            });
        }
        let x0 = cols[j][j];
        let alpha = if x0 >= 0.0 { -alpha_norm } else { alpha_norm };
        let mut v: Vec<f64> = cols[j][j..].to_vec();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        cols[j][j] = alpha;
        for t in cols[j][j + 1..].iter_mut() {
            *t = 0.0;
        }
        if vnorm2 == 0.0 {
            continue;
        }
        for col in cols.iter_mut().skip(j + 1) {
            let dot: f64 = v.iter().zip(&col[j..]).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, vi) in col[j..].iter_mut().zip(&v) {
                *c -= f * vi;
            }
        }
        for c in 0..q {
            let dot: f64 = v
                .iter()
                .enumerate()
                .map(|(i, vi)| vi * b.get(j + i, c))
                .sum();
            let f = 2.0 * dot / vnorm2;
            for (i, vi) in v.iter().enumerate() {
                let cur = b.get(j + i, c);
                b.set(j + i, c, cur - f * vi);
            }
        }
    }

    let residual = (k..rows)
        .flat_map(|i| b.row(i).to_vec())
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt();

    let mut z = DenseMatrix::zeros(k, q);
    for c in 0..q {
        for i in (0..k).rev() {
            let mut acc = b.get(i, c);
            for t in i + 1..k {
                acc -= cols[t][i] * z.get(t, c);
            }
            z.set(i, c, acc / cols[i][i]);
        }
    }
    let mut solution = DenseMatrix::zeros(k, q);
    for (i, &p) in pivots.iter().enumerate() {
        for c in 0..q {
            solution.set(p, c, z.get(i, c));
        }
    }
    Ok(LeastSquares {
        solution,
        residual,
        pivots,
    })
}

/// Column-wise Kronecker product: column `j` of the result is
/// `ga[:, j] ⊗ gb[:, j]`, so row `α * gb.rows() + β` is `ga[α, j] * gb[β, j]`.
pub fn khatri_rao_columns(ga: &DenseMatrix, gb: &DenseMatrix) -> Result<DenseMatrix> {
    if ga.cols() != gb.cols() {
        return Err(Error::DimensionMismatch(format!(
            "Khatri-Rao factors have {} and {} columns",
            ga.cols(),
            gb.cols()
        )));
    }
    let kb = gb.rows();
    Ok(DenseMatrix::from_fn(ga.rows() * kb, ga.cols(), |r, j| {
        ga.get(r / kb, j) * gb.get(r % kb, j)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::random_dense;
    use itertools::Itertools;

    #[test]
    fn identity_rank_and_condition() {
        let id = DenseMatrix::identity(4);
        assert_eq!(rank(&id), 4);
        assert!((condition_number(&id) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn duplicated_column_drops_rank() {
        let mut m = random_dense(6, 4, 3);
        for i in 0..6 {
            let v = m.get(i, 0);
            m.set(i, 3, v);
        }
        assert_eq!(rank(&m), 3);
    }

    #[test]
    fn random_wide_is_full_rank() {
        for seed in 0..100 {
            assert_eq!(rank(&random_dense(6, 10, seed)), 6);
        }
    }

    #[test]
    fn diagonal_condition() {
        let m = DenseMatrix::from_rows(&[vec![10.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((condition_number(&m) - 10.0).abs() < 1e-12);
        assert_eq!(condition_number(&DenseMatrix::zeros(2, 2)), f64::INFINITY);
    }

    #[test]
    fn vandermonde_condition_matches_high_precision() {
        // Nodes 1..4, columns p^0..p^3. Reference computed with 50-digit arithmetic.
        let v = DenseMatrix::from_fn(4, 4, |i, j| ((i + 1) as f64).powi(j as i32));
        let reference = 1.171_012_685_914_953_6e3;
        assert!((condition_number(&v) - reference).abs() / reference < 1e-6);
    }

    #[test]
    fn identity_system_returns_rhs() {
        let rhs = random_dense(3, 2, 5);
        let ls = solve_least_squares(&DenseMatrix::identity(3), &rhs).unwrap();
        assert!(ls.solution.distance(&rhs) < 1e-15);
        assert!(ls.residual < 1e-15);
    }

    #[test]
    fn planted_solution_square_and_overdetermined() {
        for rows in [4, 5] {
            let m = random_dense(rows, 4, 11);
            let x = random_dense(4, 3, 12);
            let rhs = m.matmul(&x).unwrap();
            let ls = solve_least_squares(&m, &rhs).unwrap();
            assert!(ls.solution.distance(&x) < 1e-10);
            assert!(ls.residual < 1e-10);
        }
    }

    #[test]
    fn inconsistent_system_reports_residual() {
        let m = DenseMatrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        let rhs = DenseMatrix::from_rows(&[vec![0.0], vec![2.0]]).unwrap();
        let ls = solve_least_squares(&m, &rhs).unwrap();
        assert!((ls.solution.get(0, 0) - 1.0).abs() < 1e-14);
        assert!((ls.residual - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rank_deficient_system_fails() {
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]]).unwrap();
        let rhs = DenseMatrix::zeros(3, 1);
        assert!(matches!(
            solve_least_squares(&m, &rhs),
            Err(Error::RankDeficient { rank: 1, required: 2, .. })
        ));
    }

    #[test]
    fn pivot_ties_prefer_lowest_index() {
        let ls = solve_least_squares(&DenseMatrix::identity(3), &DenseMatrix::zeros(3, 1)).unwrap();
        assert_eq!(ls.pivots, vec![0, 1, 2]);
    }

    #[test]
    fn khatri_rao_of_indicators() {
        let ga = DenseMatrix::identity(2);
        let gb = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let g = khatri_rao_columns(&ga, &gb).unwrap();
        // e_0 ⊙ e_1 → e_1, e_1 ⊙ e_0 → e_3.
        assert_eq!(g.column(0), vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(g.column(1), vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn khatri_rao_with_ones_stacks_copies() {
        let gb = random_dense(2, 5, 4);
        let g = khatri_rao_columns(&DenseMatrix::from_fn(3, 5, |_, _| 1.0), &gb).unwrap();
        for a in 0..3 {
            assert_eq!(g.window(2 * a, 0, 2, 5), gb);
        }
        assert!(khatri_rao_columns(&gb, &DenseMatrix::zeros(1, 4)).is_err());
    }

    #[test]
    fn small_class_system_is_mds() {
        // 2x5 factors shaped like a class system with four uncoded columns.
        let c = random_dense(2, 2, 8);
        let ga = DenseMatrix::from_rows(&[
            vec![1.0, 1.0, 0.0, 0.0, c.get(0, 0)],
            vec![0.0, 0.0, 1.0, 1.0, c.get(0, 1)],
        ])
        .unwrap();
        let gb = DenseMatrix::from_rows(&[
            vec![c.get(1, 0), 0.7, -0.3, 0.9, 0.4],
            vec![0.5, c.get(1, 1), 0.8, -0.6, -0.2],
        ])
        .unwrap();
        let g = khatri_rao_columns(&ga, &gb).unwrap();
        for cols in (0..5).combinations(4) {
            assert_eq!(rank(&g.select_columns(&cols)), 4, "{cols:?}");
        }
    }
}
