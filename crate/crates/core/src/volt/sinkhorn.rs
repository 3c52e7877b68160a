//! Entropy-regularised optimal transport on a sparse support, solved with
//! log-domain Sinkhorn iterations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinkhornParams {
    pub epsilon: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for SinkhornParams {
    fn default() -> Self {
        Self {
            epsilon: 0.1,
            max_iter: 500,
            tol: 1e-6,
        }
    }
}

/// Marginals plus the permitted cells and their costs. Cells not listed are
/// forbidden (infinite cost).
#[derive(Clone, Debug, PartialEq)]
pub struct TransportProblem {
    rows: usize,
    cols: usize,
    row_marginals: Vec<f64>,
    col_marginals: Vec<f64>,
    cells: Vec<(usize, usize, f64)>,
}

impl TransportProblem {
    pub fn sparse(
        row_marginals: Vec<f64>,
        col_marginals: Vec<f64>,
        cells: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        let (rows, cols) = (row_marginals.len(), col_marginals.len());
        for &(i, j, c) in &cells {
            if i >= rows || j >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "cell ({i}, {j}) outside a {rows}x{cols} plan"
                )));
            }
            if c.is_nan() {
                return Err(Error::DimensionMismatch(format!("cost at ({i}, {j}) is NaN")));
            }
        }
        if row_marginals.iter().chain(&col_marginals).any(|&m| !(m >= 0.0) || !m.is_finite()) {
            return Err(Error::DimensionMismatch("marginals must be finite and non-negative".into()));
        }
        let cells = cells.into_iter().filter(|c| c.2.is_finite()).collect();
        Ok(Self {
            rows,
            cols,
            row_marginals,
            col_marginals,
            cells,
        })
    }

    /// Dense cost matrix; `f64::INFINITY` marks forbidden cells.
    pub fn dense(cost: &[Vec<f64>], row_marginals: Vec<f64>, col_marginals: Vec<f64>) -> Result<Self> {
        if cost.len() != row_marginals.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} cost rows vs {} row marginals",
                cost.len(),
                row_marginals.len()
            )));
        }
        let mut cells = Vec::new();
        for (i, row) in cost.iter().enumerate() {
            if row.len() != col_marginals.len() {
                return Err(Error::DimensionMismatch(format!(
                    "cost row {i} has {} entries vs {} column marginals",
                    row.len(),
                    col_marginals.len()
                )));
            }
            cells.extend(row.iter().enumerate().map(|(j, &c)| (i, j, c)));
        }
        Self::sparse(row_marginals, col_marginals, cells)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportPlan {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>,
    pub row_marginals: Vec<f64>,
    pub col_marginals: Vec<f64>,
}

impl TransportPlan {
    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.rows];
        for &(i, _, v) in &self.entries {
            s[i] += v;
        }
        s
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.cols];
        for &(_, j, v) in &self.entries {
            s[j] += v;
        }
        s
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.cols]; self.rows];
        for &(i, j, v) in &self.entries {
            m[i][j] += v;
        }
        m
    }

    /// Largest absolute deviation of any row or column sum from its marginal.
    pub fn max_violation(&self) -> f64 {
        let r = self.row_sums().iter().zip(&self.row_marginals).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let c = self.col_sums().iter().zip(&self.col_marginals).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        r.max(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinkhornReport {
    pub iterations: usize,
    pub max_violation: f64,
    pub converged: bool,
}

fn log_sum_exp(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + values.map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Iterations spent at each coarser epsilon before moving on.
const STAGE_ITERS: usize = 20;
/// Anderson acceleration memory.
const ANDERSON_DEPTH: usize = 5;

/// Solves the small regularised least-squares problem min |r - D·gamma| by
/// normal equations and Gaussian elimination.
fn least_squares(d: &[Vec<f64>], r: &[f64]) -> Option<Vec<f64>> {
    let m = d.len();
    let mut a = vec![vec![0.0; m + 1]; m];
    let scale: f64 = d.iter().map(|col| col.iter().map(|x| x * x).sum::<f64>()).sum::<f64>().max(1e-300);
    for i in 0..m {
        for j in 0..m {
            a[i][j] = d[i].iter().zip(&d[j]).map(|(x, y)| x * y).sum();
        }
        a[i][i] += 1e-10 * scale;
        a[i][m] = d[i].iter().zip(r).map(|(x, y)| x * y).sum();
    }
    for c in 0..m {
        let p = (c..m).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))?;
        a.swap(c, p);
        if a[c][c].abs() < 1e-300 {
            return None;
        }
        for rr in c + 1..m {
            let k = a[rr][c] / a[c][c];
            for cc in c..=m {
                a[rr][cc] -= k * a[c][cc];
            }
        }
    }
    let mut x = vec![0.0; m];
    for c in (0..m).rev() {
        let s: f64 = (c + 1..m).map(|k| a[c][k] * x[k]).sum();
        x[c] = (a[c][m] - s) / a[c][c];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Alternating row/column scaling in the log domain until the largest
/// marginal violation drops below `tol` or `max_iter` is reached. A
/// non-converged plan is still returned; check the report.
///
/// Epsilon is annealed from the cost scale down to `params.epsilon`,
/// warm-starting the potentials, which skips most of the plateau plain
/// scaling shows at small epsilon. At the final epsilon the row potentials
/// are Anderson-accelerated; columns are always solved exactly, so the row
/// marginals carry the whole violation.
pub fn sinkhorn(problem: &TransportProblem, params: &SinkhornParams) -> Result<(TransportPlan, SinkhornReport)> {
    if !(params.epsilon > 0.0) {
        return Err(Error::InvalidConfig(format!("epsilon must be positive, got {}", params.epsilon)));
    }
    let (rows, cols) = (problem.rows, problem.cols);
    let mut by_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); rows];
    let mut by_col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); cols];
    for &(i, j, c) in &problem.cells {
        by_row[i].push((j, c));
        by_col[j].push((i, c));
    }
    let log_r: Vec<f64> = problem.row_marginals.iter().map(|m| m.ln()).collect();
    let log_c: Vec<f64> = problem.col_marginals.iter().map(|m| m.ln()).collect();

    let mut schedule = Vec::new();
    let cost_scale = problem.cells.iter().map(|c| c.2.abs()).fold(0.0, f64::max);
    let mut e = params.epsilon;
    while e < cost_scale {
        e *= 2.0;
        schedule.push(e);
    }
    schedule.reverse();
    schedule.push(params.epsilon);

    // Potentials are stored unscaled: plan_ij = exp((f_i + g_j - cost_ij) / eps).
    let solve = |out: &mut [f64], other: &[f64], lines: &[Vec<(usize, f64)>], log_m: &[f64], eps: f64| {
        for (x, (line, &lm)) in out.iter_mut().zip(lines.iter().zip(log_m)) {
            *x = if lm == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                eps * (lm - log_sum_exp(line.iter().map(|&(o, c)| (other[o] - c) / eps)))
            };
        }
    };
    let row_violation = |f: &[f64], g: &[f64], eps: f64| {
        by_row
            .iter()
            .enumerate()
            .map(|(i, line)| {
                let s: f64 = line.iter().map(|&(j, c)| ((f[i] + g[j] - c) / eps).exp()).sum();
                (s - problem.row_marginals[i]).abs()
            })
            .fold(0.0, f64::max)
    };

    let mut f = vec![0.0f64; rows];
    let mut g = vec![0.0f64; cols];
    let mut iterations = 0;
    let last_stage = schedule.len() - 1;
    for (stage, &eps) in schedule.iter().enumerate() {
        let final_stage = stage == last_stage;
        if iterations > 0 {
            solve(&mut g, &f, &by_col, &log_c, eps);
            if row_violation(&f, &g, eps) < params.tol {
                continue;
            }
        }
        // (iterate, map output) pairs for Anderson mixing.
        let mut memory: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
        let mut best: Option<(Vec<f64>, f64)> = None;
        let (mut restarts, mut plain_steps) = (0usize, 0usize);
        let mut stage_iters = 0;
        while iterations < params.max_iter && (final_stage || stage_iters < STAGE_ITERS) {
            iterations += 1;
            stage_iters += 1;
            solve(&mut g, &f, &by_col, &log_c, eps);
            let mut t = f.clone();
            solve(&mut t, &g, &by_row, &log_r, eps);
            if !final_stage {
                f = t;
                solve(&mut g, &f, &by_col, &log_c, eps);
                if row_violation(&f, &g, eps) < params.tol {
                    break;
                }
                continue;
            }
            let v = row_violation(&f, &g, eps);
            if v < params.tol {
                break;
            }
            match &best {
                Some((bf, bv)) if !(v <= 10.0 * bv) => {
                    // Extrapolation overshot: restart from the best point and
                    // take a growing run of plain steps before mixing again.
                    f = bf.clone();
                    memory.clear();
                    restarts += 1;
                    plain_steps = 10 * restarts;
                    continue;
                }
                Some((_, bv)) if v >= *bv => {}
                _ => best = Some((f.clone(), v)),
            }
            if plain_steps > 0 {
                plain_steps -= 1;
                f = t;
                continue;
            }
            memory.push((f.clone(), t.clone()));
            if memory.len() > ANDERSON_DEPTH + 1 {
                memory.remove(0);
            }
            f = t;
            if memory.len() >= 2 {
                let finite: Vec<usize> = (0..rows).filter(|&i| memory.iter().all(|(x, y)| x[i].is_finite() && y[i].is_finite())).collect();
                let resid = |k: usize| -> Vec<f64> { finite.iter().map(|&i| memory[k].1[i] - memory[k].0[i]).collect() };
                let last = memory.len() - 1;
                let r_last = resid(last);
                let diffs: Vec<Vec<f64>> = (0..last)
                    .map(|k| {
                        let (a, b) = (resid(k + 1), resid(k));
                        a.iter().zip(&b).map(|(x, y)| x - y).collect()
                    })
                    .collect();
                if let Some(gamma) = least_squares(&diffs, &r_last) {
                    for &i in &finite {
                        let shift: f64 = (0..last).map(|k| gamma[k] * (memory[k + 1].1[i] - memory[k].1[i])).sum();
                        f[i] = memory[last].1[i] - shift;
                    }
                }
            }
        }
        if final_stage {
            solve(&mut g, &f, &by_col, &log_c, eps);
            if let Some((bf, bv)) = best {
                if row_violation(&f, &g, eps) > bv {
                    f = bf;
                    solve(&mut g, &f, &by_col, &log_c, eps);
                }
            }
        } else {
            solve(&mut g, &f, &by_col, &log_c, eps);
        }
    }
    let eps = params.epsilon;

    let entries: Vec<(usize, usize, f64)> = problem
        .cells
        .iter()
        .map(|&(i, j, c)| {
            let v = ((f[i] + g[j] - c) / eps).exp();
            (i, j, if v.is_finite() { v } else { 0.0 })
        })
        .collect();
    let plan = TransportPlan {
        rows,
        cols,
        entries,
        row_marginals: problem.row_marginals.clone(),
        col_marginals: problem.col_marginals.clone(),
    };
    let max_violation = plan.max_violation();
    let converged = max_violation < params.tol;
    Ok((
        plan,
        SinkhornReport {
            iterations,
            max_violation,
            converged,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Plain iterative proportional fitting on the Gibbs kernel, in the
    /// linear domain.
    fn ipf_oracle(cost: &[Vec<f64>], r: &[f64], c: &[f64], eps: f64) -> Vec<Vec<f64>> {
        let mut k: Vec<Vec<f64>> = cost.iter().map(|row| row.iter().map(|x| (-x / eps).exp()).collect()).collect();
        for _ in 0..20_000 {
            for (i, row) in k.iter_mut().enumerate() {
                let s: f64 = row.iter().sum();
                row.iter_mut().for_each(|x| *x *= r[i] / s);
            }
            for j in 0..c.len() {
                let s: f64 = k.iter().map(|row| row[j]).sum();
                k.iter_mut().for_each(|row| row[j] *= c[j] / s);
            }
        }
        k
    }

    #[test]
    fn one_by_one() {
        let p = TransportProblem::dense(&[vec![0.3]], vec![1.0], vec![1.0]).unwrap();
        let (plan, rep) = sinkhorn(&p, &SinkhornParams::default()).unwrap();
        assert_eq!(rep.iterations, 1);
        assert!(rep.converged);
        assert!((plan.to_dense()[0][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_two_by_two() {
        let p = TransportProblem::dense(&[vec![1.0, 1.0], vec![1.0, 1.0]], vec![0.5, 0.5], vec![0.5, 0.5]).unwrap();
        let (plan, rep) = sinkhorn(&p, &SinkhornParams::default()).unwrap();
        assert!(rep.converged);
        for row in plan.to_dense() {
            for v in row {
                assert!((v - 0.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn random_instance_matches_ipf() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cost: Vec<Vec<f64>> = (0..5).map(|_| (0..7).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
        let mut r: Vec<f64> = (0..5).map(|_| rng.gen_range(0.1..1.0)).collect();
        let mut c: Vec<f64> = (0..7).map(|_| rng.gen_range(0.1..1.0)).collect();
        let (sr, sc): (f64, f64) = (r.iter().sum(), c.iter().sum());
        r.iter_mut().for_each(|x| *x /= sr);
        c.iter_mut().for_each(|x| *x /= sc);
        let p = TransportProblem::dense(&cost, r.clone(), c.clone()).unwrap();
        let (plan, rep) = sinkhorn(&p, &SinkhornParams::default()).unwrap();
        assert!(rep.converged, "{rep:?}");
        assert!(plan.max_violation() <= 1e-6);
        let oracle = ipf_oracle(&cost, &r, &c, 0.1);
        for (a, b) in plan.to_dense().iter().flatten().zip(oracle.iter().flatten()) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }

    #[test]
    fn forbidden_cells_stay_empty() {
        let inf = f64::INFINITY;
        let cost = vec![vec![0.0, inf], vec![0.5, 0.2]];
        let p = TransportProblem::dense(&cost, vec![0.4, 0.6], vec![0.5, 0.5]).unwrap();
        let (plan, rep) = sinkhorn(&p, &SinkhornParams::default()).unwrap();
        assert!(rep.converged);
        let d = plan.to_dense();
        assert_eq!(d[0][1], 0.0);
        assert!((d[0][0] - 0.4).abs() < 1e-6);
        assert!(plan.entries().iter().all(|e| e.2 >= 0.0));
    }

    #[test]
    fn non_convergence_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cost: Vec<Vec<f64>> = (0..6).map(|_| (0..6).map(|_| rng.gen_range(0.0..5.0)).collect()).collect();
        let p = TransportProblem::dense(&cost, vec![1.0 / 6.0; 6], vec![1.0 / 6.0; 6]).unwrap();
        let params = SinkhornParams {
            epsilon: 0.01,
            max_iter: 1,
            tol: 1e-12,
        };
        let (_, rep) = sinkhorn(&p, &params).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 1);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            TransportProblem::dense(&[vec![0.0, 1.0]], vec![1.0], vec![1.0]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            TransportProblem::sparse(vec![1.0], vec![1.0], vec![(0, 3, 0.0)]),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
