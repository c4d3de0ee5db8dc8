//! Gauss-Legendre rules, periodic trapezoid grids and fixed-order summation.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule; nodes from Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 1 { x } else { p1 };
                let pn1 = if n == 1 { 1.0 } else { p0 };
                dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
                let dx = pn / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (c + h * x, h * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let terms: Vec<f64> = self.on(a, b).map(|(x, w)| w * f(x)).collect();
        pairwise_sum(&terms)
    }

    pub fn integrate_c<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let terms: Vec<Complex64> = self.on(a, b).map(|(x, w)| f(x) * w).collect();
        pairwise_sum_c(&terms)
    }

    /// Composite rule over `panels` equal sub-intervals.
    pub fn composite<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let h = (b - a) / panels as f64;
        let parts: Vec<f64> =
            (0..panels).map(|k| self.integrate(a + k as f64 * h, a + (k + 1) as f64 * h, &mut f)).collect();
        pairwise_sum(&parts)
    }

    pub fn composite_c<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> Complex64 {
        let h = (b - a) / panels as f64;
        let parts: Vec<Complex64> =
            (0..panels).map(|k| self.integrate_c(a + k as f64 * h, a + (k + 1) as f64 * h, &mut f)).collect();
        pairwise_sum_c(&parts)
    }
}

/// Pairwise (cascade) summation; the result depends only on the input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_c(xs: &[Complex64]) -> Complex64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_c(&xs[..mid]) + pairwise_sum_c(&xs[mid..])
}

/// Streaming pairwise accumulator: same grouping as [`pairwise_sum`] over
/// blocks of `2^k` terms, without storing the terms.
#[derive(Clone, Debug, Default)]
pub struct PairwiseAcc {
    stack: Vec<(u32, f64)>,
    block: f64,
    count: u32,
}

impl PairwiseAcc {
    const BLOCK: u32 = 64;

    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        self.block += x;
        self.count += 1;
        if self.count == Self::BLOCK {
            let mut level = 0u32;
            let mut v = self.block;
            while let Some(&(l, top)) = self.stack.last() {
                if l != level {
                    break;
                }
                self.stack.pop();
                v += top;
                level += 1;
            }
            self.stack.push((level, v));
            self.block = 0.0;
            self.count = 0;
        }
    }

    pub fn total(&self) -> f64 {
        let mut s = self.block;
        for &(_, v) in self.stack.iter().rev() {
            s += v;
        }
        s
    }
}

/// Complex counterpart of [`PairwiseAcc`].
#[derive(Clone, Debug, Default)]
pub struct PairwiseAccC {
    re: PairwiseAcc,
    im: PairwiseAcc,
}

impl PairwiseAccC {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn total(&self) -> Complex64 {
        Complex64::new(self.re.total(), self.im.total())
    }
}

/// Smooth step from 0 at `t <= 0` to 1 at `t >= 1`, `C^infinity`:
/// `e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)})`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}
