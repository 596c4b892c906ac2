//! Gauss-Legendre rules, generic over precision.

use crate::real::Real;

#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// `n`-point rule on `[-1, 1]`; nodes ascending.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let half = n.div_ceil(2);
        let tol = T::epsilon() * T::from_f64(4.0);
        let two = T::from_f64(2.0);
        for i in 0..half {
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut x = T::from_f64(guess);
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= tol {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = two / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> Vec<(T, T)> {
        let half = T::from_f64(0.5);
        let c = half * (a + b);
        let h = half * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| (c + h * x, h * w))
            .collect()
    }
}

impl GaussLegendre<f64> {
    /// Composite rule over `[a, b]` split into `panels` equal pieces.
    pub fn integrate_composite<V, F>(&self, a: f64, b: f64, panels: usize, mut f: F) -> V
    where
        V: std::ops::Add<Output = V> + std::ops::Mul<f64, Output = V> + Default,
        F: FnMut(f64) -> V,
    {
        let width = (b - a) / panels as f64;
        let mut acc = V::default();
        for p in 0..panels {
            let lo = a + width * p as f64;
            for (x, w) in self.mapped(lo, lo + width) {
                acc = acc + f(x) * w;
            }
        }
        acc
    }
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::from_usize(k);
        let p2 = ((T::from_usize(2 * k - 1)) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (T::one(), T::zero());
    }
    let d = T::from_usize(n) * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}
