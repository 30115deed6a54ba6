//! Shared test oracles, independent of the library's computation paths:
//! an explicit feature-map construction of the reference kernel and a
//! projected-gradient solver for the SVM duals.

use grkneg::eigen::{sym_eigen, REL_TOL};
use grkneg::kernel::rbf_kernel;
use grkneg::matrix::Matrix;

/// Map points through `diag(1/sqrt(lambda_r)) U_r^T Kc_R.` and take inner
/// products, with the centering done by explicit double loops. Returns the
/// oracle train kernel (`P x P`) and test kernel (`P x Y`).
pub fn feature_map_oracle(
    pos: &Matrix,
    refs: &Matrix,
    test: &Matrix,
    sigma: f64,
) -> (Matrix, Matrix) {
    let r = refs.cols();
    let k_rr = rbf_kernel(refs, refs, sigma).unwrap();

    let mut row_mean = vec![0.0; r];
    let mut grand = 0.0;
    for i in 0..r {
        for j in 0..r {
            row_mean[i] += k_rr.get(i, j);
            grand += k_rr.get(i, j);
        }
        row_mean[i] /= r as f64;
    }
    grand /= (r * r) as f64;
    let centered = Matrix::from_fn(r, r, |i, j| {
        k_rr.get(i, j) - row_mean[i] - row_mean[j] + grand
    })
    .unwrap();

    let eig = sym_eigen(&centered).unwrap();
    let lambda_max = eig.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let kept: Vec<usize> = (0..r)
        .filter(|&i| eig.eigenvalues[i] > 0.0 && eig.eigenvalues[i] > REL_TOL * lambda_max)
        .collect();

    let embed = |x: &Matrix| -> Matrix {
        let k_rx = rbf_kernel(refs, x, sigma).unwrap();
        let cols = x.cols();
        let mut col_mean = vec![0.0; cols];
        for j in 0..cols {
            for i in 0..r {
                col_mean[j] += k_rx.get(i, j);
            }
            col_mean[j] /= r as f64;
        }
        let mut out = Matrix::zeros(kept.len(), cols);
        for (row, &comp) in kept.iter().enumerate() {
            let scale = 1.0 / eig.eigenvalues[comp].sqrt();
            for j in 0..cols {
                let mut acc = 0.0;
                for i in 0..r {
                    let centered_entry = k_rx.get(i, j) - col_mean[j] - row_mean[i] + grand;
                    acc += eig.eigenvectors.get(i, comp) * centered_entry;
                }
                out.set(row, j, scale * acc);
            }
        }
        out
    };

    let fp = embed(pos);
    let fy = embed(test);
    let mut train = Matrix::zeros(pos.cols(), pos.cols());
    for i in 0..pos.cols() {
        for j in 0..pos.cols() {
            let mut acc = 0.0;
            for d in 0..kept.len() {
                acc += fp.get(d, i) * fp.get(d, j);
            }
            train.set(i, j, acc);
        }
    }
    let mut cross = Matrix::zeros(pos.cols(), test.cols());
    for i in 0..pos.cols() {
        for j in 0..test.cols() {
            let mut acc = 0.0;
            for d in 0..kept.len() {
                acc += fp.get(d, i) * fy.get(d, j);
            }
            cross.set(i, j, acc);
        }
    }
    (train, cross)
}

/// A box-and-hyperplane QP: `min 1/2 a^T Q a + p^T a` subject to
/// `0 <= a <= upper` and `y^T a = target`.
pub struct QpProblem {
    pub q: Matrix,
    pub p: Vec<f64>,
    pub y: Vec<f64>,
    pub upper: Vec<f64>,
    pub target: f64,
}

impl QpProblem {
    pub fn objective(&self, a: &[f64]) -> f64 {
        let n = a.len();
        let mut acc = 0.0;
        for i in 0..n {
            if a[i] == 0.0 {
                continue;
            }
            let mut dot = 0.0;
            for j in 0..n {
                dot += self.q.get(i, j) * a[j];
            }
            acc += a[i] * dot;
        }
        0.5 * acc + self.p.iter().zip(a).map(|(p, a)| p * a).sum::<f64>()
    }

    fn gradient(&self, a: &[f64]) -> Vec<f64> {
        let n = a.len();
        let mut g = self.p.clone();
        for i in 0..n {
            if a[i] == 0.0 {
                continue;
            }
            for (t, gt) in g.iter_mut().enumerate() {
                *gt += self.q.get(i, t) * a[i];
            }
        }
        g
    }
}

/// Euclidean projection onto the feasible set by bisection over the
/// hyperplane multiplier.
pub fn project(v: &[f64], y: &[f64], upper: &[f64], target: f64) -> Vec<f64> {
    let clip_at = |lam: f64| -> Vec<f64> {
        v.iter()
            .zip(y)
            .zip(upper)
            .map(|((&vi, &yi), &ui)| (vi - lam * yi).clamp(0.0, ui))
            .collect()
    };
    let dot = |a: &[f64]| -> f64 { a.iter().zip(y).map(|(ai, yi)| ai * yi).sum() };

    let bound = v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
        + upper.iter().fold(0.0f64, |m, x| m.max(x.abs()))
        + target.abs()
        + 1.0;
    let mut lo = -bound;
    let mut hi = bound;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dot(&clip_at(mid)) - target > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    clip_at(0.5 * (lo + hi))
}

/// Accelerated projected-gradient (FISTA with function-value restarts).
/// Stops once the objective has plateaued to floating-point resolution;
/// panics if it never does, since a sloppy oracle is worse than none.
pub fn solve_projected_gradient(problem: &QpProblem) -> (Vec<f64>, f64) {
    let n = problem.p.len();
    let lipschitz = estimate_lipschitz(&problem.q).max(1e-12);
    let step = 1.0 / (1.01 * lipschitz);
    let gradient_step = |at: &[f64]| -> Vec<f64> {
        let g = problem.gradient(at);
        let stepped: Vec<f64> = at.iter().zip(&g).map(|(a, gi)| a - step * gi).collect();
        project(&stepped, &problem.y, &problem.upper, problem.target)
    };

    let mut x = project(&vec![0.0; n], &problem.y, &problem.upper, problem.target);
    let mut f_cur = problem.objective(&x);
    let mut x_prev = x.clone();
    let mut t = 1.0f64;
    let mut consecutive_restarts = 0u32;
    let mut f_at_last_check = f64::INFINITY;
    let mut flat_checks = 0u32;

    let max_iter = 2_000_000usize;
    for iter in 0..max_iter {
        let y: Vec<f64> = if t > 1.0 {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let beta = (t - 1.0) / t_next;
            x.iter()
                .zip(&x_prev)
                .map(|(a, b)| a + beta * (a - b))
                .collect()
        } else {
            x.clone()
        };
        let x_new = gradient_step(&y);
        let f_new = problem.objective(&x_new);

        if f_new > f_cur {
            // momentum overshoot: restart from the current point. Two
            // restarts in a row mean even the plain step cannot descend,
            // i.e. the floating-point floor.
            consecutive_restarts += 1;
            if consecutive_restarts >= 2 {
                return (x, f_cur);
            }
            t = 1.0;
            x_prev = x.clone();
            continue;
        }
        consecutive_restarts = 0;
        x_prev = std::mem::replace(&mut x, x_new);
        f_cur = f_new;
        t = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());

        if iter % 64 == 0 {
            if (f_at_last_check - f_cur).abs() <= 1e-13 * f_cur.abs().max(1.0) {
                flat_checks += 1;
                if flat_checks >= 3 {
                    return (x, f_cur);
                }
            } else {
                flat_checks = 0;
            }
            f_at_last_check = f_cur;
        }
    }
    panic!("projected-gradient oracle failed to plateau within {max_iter} iterations");
}

fn estimate_lipschitz(q: &Matrix) -> f64 {
    // power iteration for the largest eigenvalue magnitude
    let n = q.rows();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut lambda = 0.0;
    for _ in 0..50 {
        let mut w = vec![0.0; n];
        for i in 0..n {
            let row = q.row(i);
            let mut acc = 0.0;
            for (r, vj) in row.iter().zip(&v) {
                acc += r * vj;
            }
            w[i] = acc;
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 1.0;
        }
        lambda = norm;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
    }
    lambda
}
