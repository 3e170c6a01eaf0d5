use crate::fock::{contract_maps, product_state, sector_dim, SectorOperator};
use crate::linalg::{CMat, CVec, C64, I};
use crate::{Error, Result};

/// Kernel of the classical observable `psi -> <psi^{(x)q}, a psi^{(x)p}>`,
/// a map from the symmetric `p`-particle to the `q`-particle sector.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalObservable {
    modes: usize,
    q: usize,
    p: usize,
    mat: CMat,
}

impl ClassicalObservable {
    pub fn new(modes: usize, q: usize, p: usize, mat: CMat) -> Result<Self> {
        let shape = (sector_dim(modes, q), sector_dim(modes, p));
        if mat.shape() != shape {
            return Err(Error::mismatch(format!("kernel must be {shape:?}, got {:?}", mat.shape())));
        }
        Ok(ClassicalObservable { modes, q, p, mat })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Output particle number.
    pub fn q(&self) -> usize {
        self.q
    }

    /// Input particle number.
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn is_gauge_invariant(&self) -> bool {
        self.p == self.q
    }

    /// Pointwise product `A(a) A(b)`, represented by `P+ (a (x) b) P+`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.modes != other.modes {
            return Err(Error::mismatch("observables on different mode spaces"));
        }
        let mat = contract_maps(self.modes, &self.mat, (self.p, self.q), &other.mat, (other.p, other.q), 0);
        ClassicalObservable::new(self.modes, self.q + other.q, self.p + other.p, mat)
    }

    pub(crate) fn from_parts(modes: usize, q: usize, p: usize, mat: CMat) -> Self {
        ClassicalObservable { modes, q, p, mat }
    }
}

impl From<SectorOperator> for ClassicalObservable {
    fn from(a: SectorOperator) -> Self {
        let (modes, p) = (a.modes(), a.particles());
        ClassicalObservable { modes, q: p, p, mat: a.into_matrix() }
    }
}

/// `A(a)(psi) = <psi^{(x)q}, a psi^{(x)p}>`.
pub fn observable(a: &ClassicalObservable, psi: &[C64]) -> Result<C64> {
    if psi.len() != a.modes {
        return Err(Error::mismatch(format!("vector has {} modes, observable {}", psi.len(), a.modes)));
    }
    let vin = CVec::from_vec(product_state(psi, a.p));
    let vout = CVec::from_vec(product_state(psi, a.q));
    Ok(vout.dotc(&(&a.mat * vin)))
}

/// Poisson bracket `{A(a), A(b)} = i (p_a q_b A(a ._1 b) - p_b q_a A(b ._1 a))`
/// for the symplectic form with `i d psi / dt = dH / d conj(psi)`.
/// For gauge-invariant observables this is `i p q A([a, b]_1)`.
pub fn poisson_bracket(a: &ClassicalObservable, b: &ClassicalObservable) -> Result<ClassicalObservable> {
    if a.modes != b.modes {
        return Err(Error::mismatch("observables on different mode spaces"));
    }
    if a.p == 0 || b.p == 0 || a.q == 0 || b.q == 0 {
        return Err(Error::invalid("bracket needs observables of degree at least one on each side"));
    }
    let m = a.modes;
    let ab = contract_maps(m, &a.mat, (a.p, a.q), &b.mat, (b.p, b.q), 1);
    let ba = contract_maps(m, &b.mat, (b.p, b.q), &a.mat, (a.p, a.q), 1);
    let (q, p) = (a.q + b.q - 1, a.p + b.p - 1);
    let mat = ab * (I * (a.p * b.q) as f64) - ba * (I * (b.p * a.q) as f64);
    ClassicalObservable::new(m, q, p, mat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn one_body_bracket_is_commutator() {
        let a = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let b = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let oa = ClassicalObservable::new(2, 1, 1, a.clone()).unwrap();
        let ob = ClassicalObservable::new(2, 1, 1, b.clone()).unwrap();
        let br = poisson_bracket(&oa, &ob).unwrap();
        let expect = (&a * &b - &b * &a) * I;
        assert!((br.matrix() - expect).iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn product_evaluates_to_product() {
        let psi = [c(0.3, 0.4), c(-0.2, 0.6)];
        let a = ClassicalObservable::new(2, 1, 2, CMat::from_fn(2, 3, |i, j| c(i as f64 + 0.5, j as f64))).unwrap();
        let b = ClassicalObservable::new(2, 2, 1, CMat::from_fn(3, 2, |i, j| c(j as f64, 1.0 - i as f64))).unwrap();
        let lhs = observable(&a.product(&b).unwrap(), &psi).unwrap();
        let rhs = observable(&a, &psi).unwrap() * observable(&b, &psi).unwrap();
        assert!((lhs - rhs).norm() < 1e-13);
    }
}
