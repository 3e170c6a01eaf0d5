use super::basis::{basis, check_budget, product_state, sector_dim, split_isometry};
use super::operator::{quantization_prefactor, quantize, QuantizationParams, SectorOperator};
use crate::linalg::{spectral_norm, trace_norm_hermitian, vec_norm, CMat, CVec, C64};
use crate::{Error, Result};

/// Normalized vector in the symmetric `n`-particle sector.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorState {
    modes: usize,
    particles: usize,
    amplitudes: CVec,
}

impl SectorState {
    pub fn new(modes: usize, particles: usize, amplitudes: CVec) -> Result<Self> {
        let d = sector_dim(modes, particles);
        if amplitudes.len() != d {
            return Err(Error::mismatch(format!("state needs {d} amplitudes, got {}", amplitudes.len())));
        }
        let nrm = vec_norm(&amplitudes);
        if (nrm - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!("state must be normalized, norm is {nrm}")));
        }
        Ok(SectorState { modes, particles, amplitudes })
    }

    /// `phi^{(x)n}` for a unit vector `phi`.
    pub fn product(phi: &[C64], particles: usize) -> Result<Self> {
        check_budget(phi.len(), particles)?;
        let v = CVec::from_vec(product_state(phi, particles));
        SectorState::new(phi.len(), particles, v)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    /// Apply a unitary on the sector.
    pub fn evolve(&self, u: &CMat) -> Result<Self> {
        if u.nrows() != self.amplitudes.len() {
            return Err(Error::mismatch("propagator does not match sector"));
        }
        Ok(SectorState { amplitudes: u * &self.amplitudes, ..*self })
    }

    pub fn expectation(&self, op: &SectorOperator) -> Result<C64> {
        if op.modes() != self.modes || op.particles() != self.particles {
            return Err(Error::mismatch("operator and state live on different sectors"));
        }
        Ok(self.amplitudes.dotc(&(op.matrix() * &self.amplitudes)))
    }
}

/// Density matrix on the symmetric `p`-particle sector.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    modes: usize,
    particles: usize,
    mat: CMat,
}

impl DensityMatrix {
    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// Pure product state `(|phi><phi|)^{(x)p}`, `phi` normalized.
    pub fn product(phi: &[C64], particles: usize) -> Self {
        let v = CVec::from_vec(product_state(phi, particles));
        DensityMatrix { modes: phi.len(), particles, mat: &v * v.adjoint() }
    }

    /// `tr(a Gamma)`.
    pub fn expectation(&self, a: &SectorOperator) -> Result<C64> {
        if a.modes() != self.modes || a.particles() != self.particles {
            return Err(Error::mismatch("operator and density matrix live on different sectors"));
        }
        Ok((a.matrix() * &self.mat).trace())
    }

    /// Trace norm of the difference, the sum of absolute eigenvalues.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.mat.shape() != other.mat.shape() || self.modes != other.modes {
            return Err(Error::mismatch("density matrices live on different sectors"));
        }
        Ok(trace_norm_hermitian(&(&self.mat - &other.mat)))
    }
}

/// `p`-particle reduced density matrix `tr_{p+1..n} |Phi><Phi|`.
pub fn marginal(state: &SectorState, p: usize) -> Result<DensityMatrix> {
    let n = state.particles;
    if p == 0 || p > n {
        return Err(Error::invalid(format!("marginal order must lie in 1..={n}, got {p}")));
    }
    let m = state.modes;
    let j = split_isometry(m, n, p);
    let dp = basis(m, p).dim();
    let dr = basis(m, n - p).dim();
    let split = j.as_ref() * &state.amplitudes;
    // rows of `x` index the kept particles, columns the traced ones
    let x = CMat::from_row_slice(dp, dr, split.as_slice());
    Ok(DensityMatrix { modes: m, particles: p, mat: &x * x.adjoint() })
}

/// `A(a)(psi) = <psi^{(x)p}, a psi^{(x)p}>`.
pub fn product_expectation(a: &SectorOperator, psi: &[C64]) -> Result<C64> {
    if psi.len() != a.modes() {
        return Err(Error::mismatch("vector and operator have different mode counts"));
    }
    let v = CVec::from_vec(product_state(psi, a.particles()));
    Ok(v.dotc(&(a.matrix() * &v)))
}

/// Discrepancy between the quantum expectation in a product state and the
/// classical value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantizationError {
    pub measured: f64,
    pub closed_form: f64,
    pub bound: f64,
}

/// Compares `<phi^{(x)n}, A_N(a) phi^{(x)n}>` with `A(a)(sqrt(nu) phi)` for a
/// unit vector `phi`. The bound is `nu^p p^2 / n ||a||`, i.e. `p^2/N ||a||` at `nu = 1`.
pub fn quantization_error(a: &SectorOperator, phi: &[C64], q: QuantizationParams) -> Result<QuantizationError> {
    let norm = phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!("psi must be normalized, norm is {norm}")));
    }
    let p = a.particles();
    let state = SectorState::product(phi, q.particles())?;
    let lhs = state.expectation(&quantize(a, q)?)?;
    let classical = product_expectation(a, phi)?;
    let nu_p = q.nu().powi(p as i32);
    let measured = (lhs - classical * nu_p).norm();
    let closed_form = (quantization_prefactor(p, q) - nu_p).abs() * classical.norm();
    let bound = nu_p * (p * p) as f64 / q.particles() as f64 * spectral_norm(a.matrix());
    Ok(QuantizationError { measured, closed_form, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff};

    #[test]
    fn product_marginal_is_product() {
        let phi = [c(0.6, 0.0), c(0.0, 0.8)];
        let st = SectorState::product(&phi, 5).unwrap();
        for p in 1..=3 {
            let g = marginal(&st, p).unwrap();
            assert!((g.trace().re - 1.0).abs() < 1e-13);
            assert!(max_abs_diff(g.matrix(), DensityMatrix::product(&phi, p).matrix()) < 1e-13);
        }
    }

    #[test]
    fn quantization_error_example() {
        // p = 2, N = 10, identity has A(a)(psi) = 1: measured 0.1, bound 0.4
        let a = SectorOperator::identity(2, 2);
        let phi = [c(1.0, 0.0), c(0.0, 0.0)];
        let q = QuantizationParams::new(10.0, 10).unwrap();
        let e = quantization_error(&a, &phi, q).unwrap();
        assert!((e.measured - 0.1).abs() < 1e-13);
        assert!((e.bound - 0.4).abs() < 1e-13);
        assert!((e.closed_form - e.measured).abs() < 1e-13);
    }

    #[test]
    fn marginal_rejects_bad_order() {
        let st = SectorState::product(&[c(1.0, 0.0)], 3).unwrap();
        assert!(marginal(&st, 0).is_err());
        assert!(marginal(&st, 4).is_err());
    }
}
