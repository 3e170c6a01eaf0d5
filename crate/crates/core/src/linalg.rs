//! Small dense helpers over `nalgebra` complex matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
pub use num_complex::Complex64 as C64;

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `max|a - b| / max(max|a|, max|b|)`, and 0 when both vanish.
pub fn rel_diff(a: &CMat, b: &CMat) -> f64 {
    let scale = max_abs(a).max(max_abs(b));
    if scale == 0.0 {
        0.0
    } else {
        max_abs_diff(a, b) / scale
    }
}

/// Largest entry of `a - a^*`.
pub fn hermiticity_residue(a: &CMat) -> f64 {
    max_abs_diff(a, &a.adjoint())
}

pub fn spectral_norm(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().svd(false, false).singular_values.max()
}

/// Eigen-decomposition of a Hermitian matrix; the input is symmetrized first.
pub fn hermitian_eigen(a: &CMat) -> (DVector<f64>, CMat) {
    let sym = (a + a.adjoint()) * C64::from(0.5);
    let eig = SymmetricEigen::new(sym);
    (eig.eigenvalues, eig.eigenvectors)
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian(a: &CMat) -> f64 {
    hermitian_eigen(a).0.iter().map(|x| x.abs()).sum()
}

/// `f(a)` for Hermitian `a`, with `f` applied to the spectrum.
pub fn hermitian_function(a: &CMat, f: impl Fn(f64) -> C64) -> CMat {
    let (vals, vecs) = hermitian_eigen(a);
    let mut scaled = vecs.clone();
    for (j, &lam) in vals.iter().enumerate() {
        let z = f(lam);
        for x in scaled.column_mut(j).iter_mut() {
            *x *= z;
        }
    }
    scaled * vecs.adjoint()
}

/// `exp(-i t h)` for Hermitian `h`.
pub fn propagator(h: &CMat, t: f64) -> CMat {
    hermitian_function(h, |lam| C64::from_polar(1.0, -lam * t))
}

/// Precomputed spectral data of a Hermitian generator, for repeated propagators.
#[derive(Clone, Debug)]
pub struct Spectral {
    vals: DVector<f64>,
    vecs: CMat,
}

impl Spectral {
    pub fn new(h: &CMat) -> Self {
        let (vals, vecs) = hermitian_eigen(h);
        Spectral { vals, vecs }
    }

    /// `exp(-i t h)`.
    pub fn propagator(&self, t: f64) -> CMat {
        let mut scaled = self.vecs.clone();
        for (j, &lam) in self.vals.iter().enumerate() {
            let z = C64::from_polar(1.0, -lam * t);
            for x in scaled.column_mut(j).iter_mut() {
                *x *= z;
            }
        }
        scaled * self.vecs.adjoint()
    }
}

pub fn vec_norm(v: &CVec) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Natural log of `n!`, tabulated.
pub fn ln_factorial(n: usize) -> f64 {
    use std::sync::OnceLock;
    const TABLE: usize = 1 << 14;
    static LNF: OnceLock<Vec<f64>> = OnceLock::new();
    let table = LNF.get_or_init(|| {
        let mut v = Vec::with_capacity(TABLE);
        v.push(0.0);
        for k in 1..TABLE {
            v.push(v[k - 1] + (k as f64).ln());
        }
        v
    });
    if n < TABLE {
        table[n]
    } else {
        table[TABLE - 1] + (TABLE..=n).map(|k| (k as f64).ln()).sum::<f64>()
    }
}

pub fn ln_binomial(n: usize, k: usize) -> f64 {
    debug_assert!(k <= n);
    let k = k.min(n - k);
    if k <= 4096 {
        // avoids cancelling two large log-factorials
        (0..k).map(|j| ((n - j) as f64 / (j + 1) as f64).ln()).sum()
    } else {
        ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
    }
}

/// `ln(n! / prod m_i!)` with `n = sum m_i`.
pub fn ln_multinomial(m: &[u16]) -> f64 {
    let mut total = 0usize;
    let mut acc = 0.0;
    for &mi in m {
        total += mi as usize;
        acc += ln_binomial(total, mi as usize);
    }
    acc
}

/// Binomial coefficient as `f64`; exact for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for j in 0..k {
        r = r * (n - j) as f64 / (j + 1) as f64;
    }
    r.round()
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn propagator_is_unitary_and_matches_eigen() {
        let h = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.3, -0.2), c(0.3, 0.2), c(-0.5, 0.0)]);
        let u = propagator(&h, 0.7);
        assert!(max_abs_diff(&(u.adjoint() * &u), &identity(2)) < 1e-13);
        let s = Spectral::new(&h);
        assert!(max_abs_diff(&s.propagator(0.7), &u) < 1e-13);
        // derivative at 0 is -i h
        let eps = 1e-6;
        let d = (propagator(&h, eps) - propagator(&h, -eps)) / C64::from(2.0 * eps);
        assert!(max_abs_diff(&d, &(h * (-I))) < 1e-8);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(2, 3), 0.0);
        assert!((ln_binomial(40, 20) - binomial(40, 20).ln()).abs() < 1e-10);
    }

    #[test]
    fn slope_of_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| -2.0 * v + 1.0).collect();
        assert!((ls_slope(&x, &y) + 2.0).abs() < 1e-14);
    }
}
