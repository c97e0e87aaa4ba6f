//! Dense nonnegative least squares for the small systems produced by the
//! stationarity analysis (at most a handful of active constraints).
//!
//! Classic active-set iteration: grow a passive set by the most positive
//! dual coordinate, solve the unconstrained subproblem by normal equations,
//! and interpolate back to feasibility whenever a passive coefficient would
//! turn negative. Coefficients outside the passive set are exactly zero.

#[derive(Debug, Clone)]
pub(crate) struct NnlsSolution {
    pub coefficients: Vec<f64>,
    pub residual: f64,
}

fn residual_vector(columns: &[Vec<f64>], target: &[f64], coefficients: &[f64]) -> Vec<f64> {
    let mut r = target.to_vec();
    for (col, &c) in columns.iter().zip(coefficients) {
        if c != 0.0 {
            for (ri, &vi) in r.iter_mut().zip(col) {
                *ri -= c * vi;
            }
        }
    }
    r
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves the `k x k` normal equations `gram * x = rhs` by Gaussian
/// elimination with partial pivoting. `None` when the system is singular.
fn solve_normal_equations(gram: &mut [Vec<f64>], rhs: &mut [f64]) -> Option<Vec<f64>> {
    let k = rhs.len();
    let scale = gram
        .iter()
        .flat_map(|row| row.iter().map(|v| v.abs()))
        .fold(0.0f64, f64::max)
        .max(1.0);
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&a, &b| gram[a][col].abs().total_cmp(&gram[b][col].abs()))
            .unwrap();
        if gram[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        gram.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..k {
            let factor = gram[row][col] / gram[col][col];
            if factor != 0.0 {
                for j in col..k {
                    gram[row][j] -= factor * gram[col][j];
                }
                rhs[row] -= factor * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; k];
    for col in (0..k).rev() {
        let mut acc = rhs[col];
        for j in col + 1..k {
            acc -= gram[col][j] * x[j];
        }
        x[col] = acc / gram[col][col];
    }
    Some(x)
}

/// Least-squares coefficients over the passive subset, zeros elsewhere.
fn passive_least_squares(
    columns: &[Vec<f64>],
    target: &[f64],
    passive: &[bool],
) -> Option<Vec<f64>> {
    let members: Vec<usize> = (0..columns.len()).filter(|&j| passive[j]).collect();
    if members.is_empty() {
        return Some(vec![0.0; columns.len()]);
    }
    let k = members.len();
    let mut gram = vec![vec![0.0; k]; k];
    let mut rhs = vec![0.0; k];
    for (a, &ja) in members.iter().enumerate() {
        rhs[a] = dot(&columns[ja], target);
        for (b, &jb) in members.iter().enumerate() {
            gram[a][b] = dot(&columns[ja], &columns[jb]);
        }
    }
    let sub = solve_normal_equations(&mut gram, &mut rhs)?;
    let mut full = vec![0.0; columns.len()];
    for (a, &j) in members.iter().enumerate() {
        full[j] = sub[a];
    }
    Some(full)
}

/// Minimizes `||target - sum_j coefficients[j] * columns[j]||` over
/// `coefficients >= 0`.
pub(crate) fn nnls(columns: &[Vec<f64>], target: &[f64]) -> NnlsSolution {
    let k = columns.len();
    assert!(k > 0, "nnls needs at least one column");
    for col in columns {
        assert_eq!(col.len(), target.len(), "column/target dimension mismatch");
    }

    let dual_tol = 1e-12 * (1.0 + norm(target));
    let mut coefficients = vec![0.0f64; k];
    let mut passive = vec![false; k];
    let mut banned = vec![false; k];
    let mut residual = target.to_vec();
    let mut prev_norm = norm(&residual);

    let max_outer = 3 * k + 10;
    for _ in 0..max_outer {
        // Dual vector over the free set; the largest positive entry is the
        // steepest-descent candidate.
        let mut best: Option<(usize, f64)> = None;
        for (j, col) in columns.iter().enumerate() {
            if passive[j] || banned[j] {
                continue;
            }
            let w = dot(col, &residual);
            if w > dual_tol && best.map(|(_, bw)| w > bw).unwrap_or(true) {
                best = Some((j, w));
            }
        }
        let Some((enter, _)) = best else { break };
        passive[enter] = true;

        let max_inner = 3 * k + 10;
        for _ in 0..max_inner {
            let Some(candidate) = passive_least_squares(columns, target, &passive) else {
                // Singular subsystem: the entering column is linearly
                // dependent on the current passive set and adds nothing.
                passive[enter] = false;
                banned[enter] = true;
                break;
            };
            let feasible = (0..k).filter(|&j| passive[j]).all(|j| candidate[j] > 0.0);
            if feasible {
                coefficients = candidate;
                break;
            }
            // Back off along the segment to the first coefficient that hits
            // zero, drop it from the passive set, and re-solve.
            let mut alpha = 1.0f64;
            for j in 0..k {
                if passive[j] && candidate[j] <= 0.0 {
                    let denom = coefficients[j] - candidate[j];
                    if denom > 0.0 {
                        alpha = alpha.min(coefficients[j] / denom);
                    } else {
                        alpha = 0.0;
                    }
                }
            }
            for j in 0..k {
                if passive[j] {
                    coefficients[j] += alpha * (candidate[j] - coefficients[j]);
                    if coefficients[j] <= 1e-14 {
                        coefficients[j] = 0.0;
                        passive[j] = false;
                        banned.fill(false);
                    }
                }
            }
        }

        residual = residual_vector(columns, target, &coefficients);
        let cur_norm = norm(&residual);
        if prev_norm - cur_norm < 1e-12 {
            break;
        }
        prev_norm = cur_norm;
    }

    let residual = norm(&residual_vector(columns, target, &coefficients));
    NnlsSolution { coefficients, residual }
}
