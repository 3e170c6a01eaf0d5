use rayon::prelude::*;

use crate::linalg::CMat;
use crate::{Error, Result};

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid("quadrature order must be positive"));
        }
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Ok(GaussLegendre { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to `[0, b]`.
    pub fn on_interval(&self, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (0.5 * b * (x + 1.0), 0.5 * b * w))
    }
}

/// `P_n(x)` and `P_n'(x)`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    (p1, n as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// Values that can be summed with real weights.
pub trait Accumulate: Send + Sync + Sized {
    fn zero_like(&self) -> Self;
    fn add_scaled(&mut self, other: &Self, w: f64);
}

impl Accumulate for CMat {
    fn zero_like(&self) -> Self {
        CMat::zeros(self.nrows(), self.ncols())
    }

    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += other * crate::C64::from(w);
    }
}

impl Accumulate for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }

    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += other * w;
    }
}

/// Depth-first nested quadrature for iterated integrals
/// `int_{t > u_1 > ... > u_j > 0} S_j(u_1, ..., u_j)` where
/// `S_j = step(S_{j-1}, j, u_j)` and `S_0 = init`.
///
/// Returns the integrals for every depth `0..=depth`. Each level uses the
/// Gauss-Legendre rule on `[0, u_{j-1}]`, so the cost is `sum_j q^j` steps.
pub fn nested_simplex<S, F>(depth: usize, t: f64, rule: &GaussLegendre, init: S, step: F) -> Vec<S>
where
    S: Accumulate + Clone,
    F: Fn(&S, usize, f64) -> S + Sync,
{
    let mut out: Vec<S> = Vec::with_capacity(depth + 1);
    out.push(init.clone());
    if depth == 0 {
        return out;
    }
    // depth-1 zeros are only known after the first step; compute top level in parallel
    let tops: Vec<Vec<Option<S>>> = rule
        .on_interval(t)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(u, w)| {
            let s1 = step(&init, 1, u);
            let mut acc: Vec<Option<S>> = (0..depth).map(|_| None).collect();
            descend(&s1, 1, u, w, depth, rule, &step, &mut acc);
            acc
        })
        .collect();
    for j in 0..depth {
        let mut total: Option<S> = None;
        for top in &tops {
            if let Some(v) = &top[j] {
                match &mut total {
                    Some(tt) => tt.add_scaled(v, 1.0),
                    None => {
                        let mut z = v.zero_like();
                        z.add_scaled(v, 1.0);
                        total = Some(z);
                    }
                }
            }
        }
        out.push(total.expect("rule has nodes"));
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn descend<S, F>(state: &S, level: usize, u: f64, weight: f64, depth: usize, rule: &GaussLegendre, step: &F, acc: &mut [Option<S>])
where
    S: Accumulate + Clone,
    F: Fn(&S, usize, f64) -> S,
{
    match &mut acc[level - 1] {
        Some(a) => a.add_scaled(state, weight),
        slot @ None => {
            let mut z = state.zero_like();
            z.add_scaled(state, weight);
            *slot = Some(z);
        }
    }
    if level == depth {
        return;
    }
    for (v, w) in rule.on_interval(u) {
        let next = step(state, level + 1, v);
        descend(&next, level + 1, v, weight * w, depth, rule, step, acc);
    }
}

/// `int_{0 <= t_1 <= ... <= t_k <= t} f(t_1, ..., t_k)` by nested Gauss-Legendre,
/// with `t_j` integrated over `[0, t_{j+1}]`.
pub fn simplex_integrate<F>(k: usize, f: F, t: f64, quad_order: usize) -> Result<CMat>
where
    F: Fn(&[f64]) -> CMat + Sync,
{
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("integration bound must be finite and nonnegative, got {t}")));
    }
    let rule = GaussLegendre::new(quad_order)?;
    if k == 0 {
        return Ok(f(&[]));
    }
    #[derive(Clone)]
    struct Times(Vec<f64>, Option<CMat>);
    impl Accumulate for Times {
        fn zero_like(&self) -> Self {
            Times(Vec::new(), self.1.as_ref().map(|m| m.zero_like()))
        }
        fn add_scaled(&mut self, other: &Self, w: f64) {
            if let (Some(a), Some(b)) = (&mut self.1, &other.1) {
                a.add_scaled(b, w);
            }
        }
    }
    let levels = nested_simplex(k, t, &rule, Times(Vec::new(), None), |s, level, u| {
        let mut times = s.0.clone();
        times.push(u);
        let value = if level == k {
            // times were generated largest first
            let asc: Vec<f64> = times.iter().rev().copied().collect();
            Some(f(&asc))
        } else {
            None
        };
        Times(times, value)
    });
    Ok(levels[k].1.clone().expect("leaf values present"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;

    #[test]
    fn gauss_legendre_exactness() {
        let r = GaussLegendre::new(5).unwrap();
        let sum: f64 = r.weights().iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
        // x^8 integrates to 2/9 exactly with 5 nodes
        let v: f64 = r.nodes().iter().zip(r.weights()).map(|(x, w)| w * x.powi(8)).sum();
        assert!((v - 2.0 / 9.0).abs() < 1e-14);
        let r16 = GaussLegendre::new(16).unwrap();
        assert!((r16.nodes()[15] - 0.989_400_934_991_649_9).abs() < 1e-14);
    }

    #[test]
    fn simplex_volume_and_separable() {
        let one = |_: &[f64]| CMat::from_element(1, 1, C64::from(1.0));
        let v = simplex_integrate(3, one, 1.0, 16).unwrap();
        assert!((v[(0, 0)].re - 1.0 / 6.0).abs() < 1e-14);
        let v = simplex_integrate(4, one, 2.0, 16).unwrap();
        assert!((v[(0, 0)].re - 16.0 / 24.0).abs() < 1e-13);
        // prod t_j over the ordered 2-simplex: t^4 / 8
        let prod = |ts: &[f64]| CMat::from_element(1, 1, C64::from(ts.iter().product::<f64>()));
        let v = simplex_integrate(2, prod, 1.0, 16).unwrap();
        assert!((v[(0, 0)].re - 0.125).abs() < 1e-14);
        // ordering: t_1 <= t_2, so int t_2 = 1/3 and int t_1 = 1/6
        let last = |ts: &[f64]| CMat::from_element(1, 1, C64::from(ts[1]));
        assert!((simplex_integrate(2, last, 1.0, 8).unwrap()[(0, 0)].re - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        let one = |_: &[f64]| CMat::zeros(1, 1);
        assert!(simplex_integrate(2, one, -1.0, 4).is_err());
        assert!(simplex_integrate(2, one, 1.0, 0).is_err());
    }
}
