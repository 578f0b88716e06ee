//! Penalized logistic regression (IRLS / damped Newton) and ridge regression,
//! both fitted on standardized columns so coefficient magnitudes are comparable.

use serde::{Deserialize, Serialize};

use super::linalg::{solve_spd_with_ridge, SquareMatrix};
use super::LearnerError;

/// Columns whose standard deviation falls below this are treated as constant.
const CONSTANT_SD: f64 = 1e-12;

/// Column centering and scaling learned from training data. Constant columns
/// are inactive and carry no coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub sds: Vec<f64>,
    pub active: Vec<bool>,
}

impl Standardizer {
    pub fn fit(columns: &[Vec<f64>]) -> Self {
        let mut means = Vec::with_capacity(columns.len());
        let mut sds = Vec::with_capacity(columns.len());
        let mut active = Vec::with_capacity(columns.len());
        for c in columns {
            let n = c.len() as f64;
            let mean = c.iter().sum::<f64>() / n;
            let var = c.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            let sd = var.sqrt();
            means.push(mean);
            sds.push(sd);
            active.push(sd > CONSTANT_SD * mean.abs().max(1.0));
        }
        Self { means, sds, active }
    }

    /// Standardized copies of the active columns, in order.
    pub fn transform_active(&self, columns: &[Vec<f64>]) -> Vec<Vec<f64>> {
        columns
            .iter()
            .enumerate()
            .filter(|(j, _)| self.active[*j])
            .map(|(j, c)| c.iter().map(|v| (v - self.means[j]) / self.sds[j]).collect())
            .collect()
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|a| **a).count()
    }
}

/// Fitted linear predictor on standardized columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub standardizer: Standardizer,
    pub intercept: f64,
    /// One coefficient per original column; zero for inactive columns.
    pub coefficients: Vec<f64>,
    pub iterations: usize,
    pub gradient_norm: f64,
}

impl LinearModel {
    pub fn linear_predictor(&self, columns: &[Vec<f64>]) -> Vec<f64> {
        let n = columns.first().map_or(0, |c| c.len());
        let mut eta = vec![self.intercept; n];
        for (j, c) in columns.iter().enumerate() {
            let b = self.coefficients[j];
            if b == 0.0 || !self.standardizer.active[j] {
                continue;
            }
            let (m, s) = (self.standardizer.means[j], self.standardizer.sds[j]);
            for (e, v) in eta.iter_mut().zip(c) {
                *e += b * (v - m) / s;
            }
        }
        eta
    }

    pub fn abs_coefficients(&self) -> Vec<f64> {
        self.coefficients.iter().map(|b| b.abs()).collect()
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^x) without overflow.
#[inline]
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Mean-scaled penalized negative log-likelihood of logistic regression on a
/// fixed design: `J(b) = (1/n) [ sum_i softplus(eta_i) - y_i eta_i + (lambda/2) |b_slopes|^2 ]`,
/// with `b[0]` the unpenalized intercept.
#[derive(Debug, Clone)]
pub struct PenalizedLogistic<'a> {
    columns: &'a [Vec<f64>],
    y: &'a [f64],
    lambda: f64,
}

impl<'a> PenalizedLogistic<'a> {
    pub fn new(columns: &'a [Vec<f64>], y: &'a [f64], lambda: f64) -> Self {
        Self { columns, y, lambda }
    }

    pub fn dim(&self) -> usize {
        self.columns.len() + 1
    }

    fn eta(&self, beta: &[f64]) -> Vec<f64> {
        let mut eta = vec![beta[0]; self.y.len()];
        for (c, b) in self.columns.iter().zip(&beta[1..]) {
            for (e, v) in eta.iter_mut().zip(c) {
                *e += b * v;
            }
        }
        eta
    }

    pub fn objective(&self, beta: &[f64]) -> f64 {
        let n = self.y.len() as f64;
        let eta = self.eta(beta);
        let nll: f64 = eta.iter().zip(self.y).map(|(e, y)| softplus(*e) - y * e).sum();
        let pen: f64 = beta[1..].iter().map(|b| b * b).sum::<f64>() * 0.5 * self.lambda;
        (nll + pen) / n
    }

    pub fn gradient(&self, beta: &[f64]) -> Vec<f64> {
        let n = self.y.len() as f64;
        let resid: Vec<f64> = self.eta(beta).iter().zip(self.y).map(|(e, y)| sigmoid(*e) - y).collect();
        let mut g = Vec::with_capacity(self.dim());
        g.push(resid.iter().sum::<f64>() / n);
        for (c, b) in self.columns.iter().zip(&beta[1..]) {
            let dot: f64 = c.iter().zip(&resid).map(|(x, r)| x * r).sum();
            g.push((dot + self.lambda * b) / n);
        }
        g
    }

    fn hessian(&self, beta: &[f64]) -> SquareMatrix {
        let n = self.y.len() as f64;
        let w: Vec<f64> = self.eta(beta).iter().map(|e| {
            let p = sigmoid(*e);
            p * (1.0 - p)
        }).collect();
        weighted_gram(self.columns, &w, self.lambda, n)
    }
}

/// `(1/n) [X1^T W X1 + lambda * diag(0, 1, ..., 1)]` where `X1` has a leading column of ones.
fn weighted_gram(columns: &[Vec<f64>], w: &[f64], lambda: f64, n: f64) -> SquareMatrix {
    let d = columns.len() + 1;
    let mut h = SquareMatrix::zeros(d);
    let weighted: Vec<Vec<f64>> = columns.iter().map(|c| c.iter().zip(w).map(|(x, w)| x * w).collect()).collect();
    h.set(0, 0, w.iter().sum::<f64>() / n);
    for a in 0..columns.len() {
        let v = weighted[a].iter().sum::<f64>() / n;
        h.set(0, a + 1, v);
        h.set(a + 1, 0, v);
        for b in a..columns.len() {
            let v = weighted[a].iter().zip(&columns[b]).map(|(x, y)| x * y).sum::<f64>() / n;
            h.set(a + 1, b + 1, v);
            h.set(b + 1, a + 1, v);
        }
        let diag = h.get(a + 1, a + 1) + lambda / n;
        h.set(a + 1, a + 1, diag);
    }
    h
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn fit_logistic(
    columns: &[Vec<f64>],
    y: &[f64],
    l2_penalty: f64,
    max_iter: usize,
    tol: f64,
) -> Result<LinearModel, LearnerError> {
    let standardizer = Standardizer::fit(columns);
    let z = standardizer.transform_active(columns);
    let problem = PenalizedLogistic::new(&z, y, l2_penalty);

    let n = y.len() as f64;
    let prevalence = (y.iter().sum::<f64>() / n).clamp(1e-6, 1.0 - 1e-6);
    let mut beta = vec![0.0; problem.dim()];
    beta[0] = (prevalence / (1.0 - prevalence)).ln();
    let mut value = problem.objective(&beta);
    let mut grad = problem.gradient(&beta);
    let mut iterations = 0;

    while inf_norm(&grad) > tol {
        if iterations >= max_iter {
            return Err(LearnerError::NonConvergence { iterations, gradient_norm: inf_norm(&grad) });
        }
        iterations += 1;
        let h = problem.hessian(&beta);
        let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
        let (step, _) = solve_spd_with_ridge(&h, &neg)
            .ok_or(LearnerError::NonConvergence { iterations, gradient_norm: inf_norm(&grad) })?;
        let slope: f64 = step.iter().zip(&grad).map(|(s, g)| s * g).sum();
        // Backtracking line search on the penalized objective. Near the optimum the
        // objective stops resolving changes, so a step that leaves it flat but
        // shrinks the gradient is also accepted.
        let grad_norm = inf_norm(&grad);
        let flat = 1e-13 * (1.0 + value.abs());
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand: Vec<f64> = beta.iter().zip(&step).map(|(b, s)| b + t * s).collect();
            let v = problem.objective(&cand);
            let armijo = v <= value + 1e-4 * t * slope;
            if armijo || (v - value).abs() <= flat {
                let g = problem.gradient(&cand);
                if armijo || inf_norm(&g) < grad_norm {
                    beta = cand;
                    value = v;
                    grad = g;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            return Err(LearnerError::NonConvergence { iterations, gradient_norm: grad_norm });
        }
    }

    Ok(expand(standardizer, beta, iterations, inf_norm(&grad)))
}

pub(crate) fn fit_ridge(
    columns: &[Vec<f64>],
    y: &[f64],
    l2_penalty: f64,
    max_iter: usize,
    tol: f64,
) -> Result<LinearModel, LearnerError> {
    let standardizer = Standardizer::fit(columns);
    let z = standardizer.transform_active(columns);
    let n = y.len() as f64;
    let y_mean = y.iter().sum::<f64>() / n;
    let yc: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let k = z.len();

    // (1/n)(Z^T Z + lambda I) b = (1/n) Z^T y_c; columns are centered so the
    // intercept decouples and equals the response mean.
    let mut gram = SquareMatrix::zeros(k);
    for a in 0..k {
        for b in a..k {
            let v = z[a].iter().zip(&z[b]).map(|(x, y)| x * y).sum::<f64>() / n;
            gram.set(a, b, v);
            gram.set(b, a, v);
        }
    }
    gram.add_diagonal(l2_penalty / n);
    let rhs: Vec<f64> = z.iter().map(|c| c.iter().zip(&yc).map(|(x, y)| x * y).sum::<f64>() / n).collect();
    let scale = 1.0 + inf_norm(&rhs);

    let mut coef = vec![0.0; k];
    let mut iterations = 0;
    let mut grad_norm = inf_norm(&rhs);
    if k > 0 {
        loop {
            let grad: Vec<f64> = gram.mul_vec(&coef).iter().zip(&rhs).map(|(a, b)| a - b).collect();
            grad_norm = inf_norm(&grad);
            if grad_norm <= tol * scale {
                break;
            }
            if iterations >= max_iter {
                return Err(LearnerError::NonConvergence { iterations, gradient_norm: grad_norm });
            }
            iterations += 1;
            let neg: Vec<f64> = grad.iter().map(|g| -g).collect();
            let (step, _) = solve_spd_with_ridge(&gram, &neg)
                .ok_or(LearnerError::NonConvergence { iterations, gradient_norm: grad_norm })?;
            for (c, s) in coef.iter_mut().zip(&step) {
                *c += s;
            }
        }
    }
    let mut beta = Vec::with_capacity(k + 1);
    beta.push(y_mean);
    beta.extend(coef);
    Ok(expand(standardizer, beta, iterations, grad_norm))
}

/// Maps `[intercept, active slopes...]` back onto every original column.
fn expand(standardizer: Standardizer, beta: Vec<f64>, iterations: usize, gradient_norm: f64) -> LinearModel {
    let mut slopes = beta[1..].iter();
    let coefficients = standardizer
        .active
        .iter()
        .map(|&a| if a { *slopes.next().unwrap() } else { 0.0 })
        .collect();
    LinearModel { standardizer, intercept: beta[0], coefficients, iterations, gradient_norm }
}
