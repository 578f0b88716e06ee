//! Dense symmetric positive-definite solves for the small normal-equation
//! systems of the linear-family learners.

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SquareMatrix {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![0.0; dim * dim] }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn add_diagonal(&mut self, v: f64) {
        for i in 0..self.dim {
            self.data[i * self.dim + i] += v;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|r| self.data[r * self.dim..(r + 1) * self.dim].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }
}

/// Lower Cholesky factor, or `None` when the matrix is not numerically positive definite.
pub(crate) fn cholesky(a: &SquareMatrix) -> Option<SquareMatrix> {
    let n = a.dim;
    let mut l = SquareMatrix::zeros(n);
    for j in 0..n {
        let mut d = a.get(j, j);
        for k in 0..j {
            d -= l.get(j, k) * l.get(j, k);
        }
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let d = d.sqrt();
        l.set(j, j, d);
        for i in (j + 1)..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, s / d);
        }
    }
    Some(l)
}

pub(crate) fn cholesky_solve(l: &SquareMatrix, b: &[f64]) -> Vec<f64> {
    let n = l.dim;
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l.get(i, k) * y[k];
        }
        y[i] = s / l.get(i, i);
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in (i + 1)..n {
            s -= l.get(k, i) * y[k];
        }
        y[i] = s / l.get(i, i);
    }
    y
}

/// Solves `a x = b`, adding a growing ridge to the diagonal when the
/// factorization breaks down. Returns the solution and the ridge used.
pub(crate) fn solve_spd_with_ridge(a: &SquareMatrix, b: &[f64]) -> Option<(Vec<f64>, f64)> {
    if let Some(l) = cholesky(a) {
        return Some((cholesky_solve(&l, b), 0.0));
    }
    let scale = (a.trace().abs() / a.dim.max(1) as f64).max(1e-300);
    let mut ridge = scale * 1e-12;
    for _ in 0..12 {
        let mut shifted = a.clone();
        shifted.add_diagonal(ridge);
        if let Some(l) = cholesky(&shifted) {
            return Some((cholesky_solve(&l, b), ridge));
        }
        ridge *= 100.0;
    }
    None
}
