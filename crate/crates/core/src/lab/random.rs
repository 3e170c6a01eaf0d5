use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::fock::{sector_dim, ModeSpace, SectorOperator};
use crate::linalg::{spectral_norm, CMat, C64};
use crate::{Error, Result};

// stream tags keep draws for different objects independent under one seed
const OBSERVABLE: u64 = 1;
const ONE_BODY: u64 = 2;
const PAIR: u64 = 3;
const VECTOR: u64 = 4;

/// ChaCha8 seeded from `seed`, on a stream fixed by the object kind and its shape.
pub fn stream(seed: u64, kind: u64, a: usize, b: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((kind << 48) | ((a as u64 & 0xffff) << 24) | (b as u64 & 0xff_ffff));
    rng
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, d: usize) -> CMat {
    CMat::from_fn(d, d, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// `(X + X^*) / 2` for complex Gaussian `X`, scaled to spectral norm `scale`.
fn hermitian(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> CMat {
    let x = gaussian_matrix(rng, d);
    let herm = (&x + x.adjoint()) * C64::from(0.5);
    let s = spectral_norm(&herm);
    let scaled = herm * C64::from(scale / s);
    // exact Hermitian symmetry after rounding
    CMat::from_fn(d, d, |i, j| if i <= j { scaled[(i, j)] } else { scaled[(j, i)].conj() })
}

/// Seeded Hermitian `p`-particle observable on `C^M` with spectral norm 1.
pub fn random_observable(seed: u64, p: usize, modes: usize) -> Result<SectorOperator> {
    if p == 0 || modes == 0 {
        return Err(Error::invalid("need p >= 1 and M >= 1"));
    }
    let d = sector_dim(modes, p);
    let mut mat = hermitian(&mut stream(seed, OBSERVABLE, p, modes), d, 1.0);
    for i in 0..d {
        mat[(i, i)].im = 0.0;
    }
    SectorOperator::new(modes, p, mat)
}

/// Seeded mode space: Hermitian `h` with `||h|| = 1` and a pair interaction with `||W|| = w_norm`.
pub fn random_mode_space(seed: u64, modes: usize, w_norm: f64) -> Result<ModeSpace> {
    if modes == 0 || !(w_norm >= 0.0) {
        return Err(Error::invalid("need M >= 1 and a nonnegative interaction norm"));
    }
    let h = hermitian(&mut stream(seed, ONE_BODY, modes, 1), modes, 1.0);
    let w = hermitian(&mut stream(seed, PAIR, modes, 2), sector_dim(modes, 2), 1.0) * C64::from(w_norm);
    ModeSpace::new(h, w, None)
}

/// Seeded complex vector of Euclidean norm `norm`.
pub fn random_vector(seed: u64, modes: usize, norm: f64) -> Vec<C64> {
    let mut rng = stream(seed, VECTOR, modes, 1);
    let v: Vec<C64> = (0..modes).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let s = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z * (norm / s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermiticity_residue;

    #[test]
    fn observable_properties() {
        for p in 1..=3 {
            let a = random_observable(11, p, 3).unwrap();
            assert_eq!(a, random_observable(11, p, 3).unwrap());
            assert!(hermiticity_residue(a.matrix()) <= 1e-15);
            assert!((spectral_norm(a.matrix()) - 1.0).abs() < 1e-12);
        }
        assert_ne!(random_observable(11, 1, 3).unwrap(), random_observable(12, 1, 3).unwrap());
    }

    #[test]
    fn streams_are_distinct() {
        let h = random_mode_space(5, 2, 1.0).unwrap();
        let a = random_observable(5, 1, 2).unwrap();
        assert_ne!(h.h(), a.matrix());
        assert!((h.interaction_norm() - 1.0).abs() < 1e-12);
    }
}
