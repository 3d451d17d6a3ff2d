//! Quadrature rules used across the grid, entropy and van Hove modules.

use nalgebra::{DMatrix, SymmetricEigen};

/// Gauss rule for the unit Gaussian weight g(u) = e^{−u²/2}/√(2π).
///
/// Weights sum to one, so `Σ w_q f(u_q) ≈ ∫ f g`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
        let jacobi = DMatrix::from_fn(n, n, |i, j| {
            if i + 1 == j || j + 1 == i {
                (i.max(j) as f64).sqrt()
            } else {
                0.0
            }
        });
        let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
        nodes.sort_by(f64::total_cmp);

        // Newton polish on ψ_n, then Christoffel weights 1/Σψ_k².
        let weights = nodes
            .iter_mut()
            .map(|x| {
                for _ in 0..3 {
                    let (pn, pn1) = orthonormal_pair(n, *x);
                    let step = pn / ((n as f64).sqrt() * pn1);
                    if step.is_finite() {
                        *x -= step;
                    }
                }
                let mut sum = 0.0;
                let (mut prev, mut cur) = (0.0, 1.0);
                for k in 0..n {
                    sum += cur * cur;
                    let next = (*x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
                    prev = cur;
                    cur = next;
                }
                1.0 / sum
            })
            .collect();
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// (ψ_n(x), ψ_{n−1}(x)) for the orthonormal probabilists' Hermite family.
fn orthonormal_pair(n: usize, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = (x * cur - (k as f64).sqrt() * prev) / ((k + 1) as f64).sqrt();
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Gauss–Legendre rule on [−1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let (nodes, weights) = (1..=n)
            .map(|i| {
                let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
                let mut dp = 1.0;
                for _ in 0..100 {
                    let (p, d) = legendre_with_derivative(n, x);
                    dp = d;
                    let dx = p / d;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                let (_, d) = legendre_with_derivative(n, x);
                if d.is_finite() {
                    dp = d;
                }
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .rev()
            .unzip();
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// ∫_a^b f.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        half * self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(mid + half * x)).sum::<f64>()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Chebyshev–Lobatto nodes on [0, t] in increasing order (first node 0, last node t).
pub fn chebyshev_lobatto(n_nodes: usize, t: f64) -> Vec<f64> {
    assert!(n_nodes >= 2);
    let n = n_nodes - 1;
    (0..=n)
        .map(|i| 0.5 * t * (1.0 - (std::f64::consts::PI * i as f64 / n as f64).cos()))
        .collect()
}

/// Matrix `S` with `(S f)_i ≈ ∫_0^{t_i} f` for samples of `f` on [`chebyshev_lobatto`] nodes.
///
/// Built by fitting the interpolating polynomial in the Chebyshev basis and
/// integrating it term by term.
pub fn chebyshev_integration_matrix(n_nodes: usize, t: f64) -> DMatrix<f64> {
    assert!(n_nodes >= 2);
    let n = n_nodes - 1;
    // Nodes in x ∈ [−1, 1] increasing: x_i = −cos(πi/n).
    let x: Vec<f64> = (0..=n).map(|i| -(std::f64::consts::PI * i as f64 / n as f64).cos()).collect();
    let cheb = |k: usize, x: f64| (k as f64 * x.clamp(-1.0, 1.0).acos()).cos();
    let mut out = DMatrix::zeros(n_nodes, n_nodes);
    for j in 0..=n {
        // Chebyshev coefficients of the Lagrange basis polynomial for node j.
        let coeffs: Vec<f64> = (0..=n)
            .map(|k| {
                let end = |i: usize| if i == 0 || i == n { 0.5 } else { 1.0 };
                2.0 / n as f64 * end(j) * end(k) * cheb(k, x[j])
            })
            .collect();
        // Antiderivative coefficients.
        let mut anti = vec![0.0; n + 2];
        for (k, &c) in coeffs.iter().enumerate() {
            match k {
                0 => anti[1] += c,
                1 => anti[2] += 0.25 * c,
                _ => {
                    anti[k + 1] += c / (2.0 * (k + 1) as f64);
                    anti[k - 1] -= c / (2.0 * (k - 1) as f64);
                }
            }
        }
        let eval = |x: f64| anti.iter().enumerate().map(|(k, a)| a * cheb(k, x)).sum::<f64>();
        let base = eval(-1.0);
        for i in 0..=n {
            out[(i, j)] = 0.5 * t * (eval(x[i]) - base);
        }
    }
    out
}

/// Composite trapezoid weights for `n` equally spaced nodes of spacing `h`.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    if n >= 1 {
        w[0] = 0.5 * h;
        w[n - 1] = 0.5 * h;
    }
    w
}

/// Double-exponential (tanh-sinh) quadrature of `f` over [a, b].
///
/// Halves the step until successive estimates agree to `tol` (relative) or
/// the level cap is reached.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let half = 0.5 * (b - a);
    let frac_pi_2 = std::f64::consts::FRAC_PI_2;
    let t_max = 3.2;
    let term = |t: f64| {
        let u = frac_pi_2 * t.sinh();
        let cu = u.cosh();
        let x = u.tanh();
        // distance to the nearer endpoint, computed without cancellation
        let dist = half / (u.abs().exp() * cu);
        let w = frac_pi_2 * t.cosh() / (cu * cu);
        let arg = if x >= 0.0 { b - dist } else { a + dist };
        if dist <= 0.0 || !w.is_finite() {
            0.0
        } else {
            w * f(arg)
        }
    };
    let mut h = 0.5;
    let mut sum = term(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        let t = k as f64 * h;
        sum += term(t) + term(-t);
        k += 1;
    }
    let mut estimate = half * h * sum;
    for _level in 0..10 {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_max {
            let t = k as f64 * h;
            sum += term(t) + term(-t);
            k += 2;
        }
        let next = half * h * sum;
        let done = (next - estimate).abs() <= tol * next.abs().max(1e-300);
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}
