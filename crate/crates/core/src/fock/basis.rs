use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::linalg::{binomial, ln_binomial, ln_multinomial, CMat, C64};
use crate::{Error, Result};

/// Occupation numbers, one entry per mode.
pub type Occupation = Vec<u16>;

/// Orthonormal occupation basis of the symmetric `n`-particle sector over `C^M`.
///
/// States are ordered lexicographically descending, so the one-particle sector
/// lists modes in their natural order.
#[derive(Debug)]
pub struct SectorBasis {
    modes: usize,
    particles: usize,
    occupations: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

impl SectorBasis {
    fn build(modes: usize, particles: usize) -> Self {
        let mut occupations = Vec::with_capacity(sector_dim(modes, particles));
        let mut cur = vec![0u16; modes];
        fill(&mut cur, 0, particles, &mut occupations);
        let index = occupations.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect();
        SectorBasis { modes, particles, occupations, index }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dim(&self) -> usize {
        self.occupations.len()
    }

    pub fn occupations(&self) -> &[Occupation] {
        &self.occupations
    }

    pub fn occupation(&self, i: usize) -> &Occupation {
        &self.occupations[i]
    }

    pub fn index_of(&self, occ: &[u16]) -> Option<usize> {
        self.index.get(occ).copied()
    }
}

fn fill(cur: &mut Occupation, mode: usize, left: usize, out: &mut Vec<Occupation>) {
    if mode + 1 == cur.len() {
        cur[mode] = left as u16;
        out.push(cur.clone());
        return;
    }
    for k in (0..=left).rev() {
        cur[mode] = k as u16;
        fill(cur, mode + 1, left - k, out);
    }
    cur[mode] = 0;
}

/// `binom(n + M - 1, n)`.
pub fn sector_dim(modes: usize, particles: usize) -> usize {
    if modes == 0 {
        return usize::from(particles == 0);
    }
    binomial(particles + modes - 1, particles) as usize
}

/// Largest sector dimension for which dense matrices are built.
pub const DENSE_BUDGET: usize = 4000;

pub fn check_budget(modes: usize, particles: usize) -> Result<()> {
    let dim = sector_dim(modes, particles);
    if dim > DENSE_BUDGET {
        Err(Error::Budget { dim, limit: DENSE_BUDGET })
    } else {
        Ok(())
    }
}

/// Shared basis of the `n`-particle sector. Bases are cached.
pub fn sector_basis(modes: usize, particles: usize) -> Result<Arc<SectorBasis>> {
    if modes == 0 {
        return Err(Error::invalid("mode count must be positive"));
    }
    let dim = sector_dim(modes, particles);
    if dim > 50 * DENSE_BUDGET {
        return Err(Error::Budget { dim, limit: 50 * DENSE_BUDGET });
    }
    Ok(basis(modes, particles))
}

pub(crate) fn basis(modes: usize, particles: usize) -> Arc<SectorBasis> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<SectorBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(b) = cache.lock().unwrap().get(&(modes, particles)) {
        return b.clone();
    }
    let b = Arc::new(SectorBasis::build(modes, particles));
    cache.lock().unwrap().entry((modes, particles)).or_insert(b).clone()
}

/// Overlap of the symmetric state `|m>` with `|alpha> (x) |m - alpha>`,
/// where both factors are normalized symmetric states.
pub(crate) fn split_coefficient(m: &[u16], alpha: &[u16]) -> f64 {
    let s: usize = m.iter().map(|&x| x as usize).sum();
    let p: usize = alpha.iter().map(|&x| x as usize).sum();
    let mut ln = -ln_binomial(s, p);
    for (&mi, &ai) in m.iter().zip(alpha) {
        ln += ln_binomial(mi as usize, ai as usize);
    }
    (0.5 * ln).exp()
}

/// Isometry from the `s`-particle sector into `sector(p) (x) sector(s - p)`.
///
/// Row index is `alpha * dim(s - p) + beta`, matching `kronecker` ordering.
pub(crate) fn split_isometry(modes: usize, s: usize, p: usize) -> Arc<CMat> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize, usize), Arc<CMat>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(j) = cache.lock().unwrap().get(&(modes, s, p)) {
        return j.clone();
    }
    let bs = basis(modes, s);
    let bp = basis(modes, p);
    let bq = basis(modes, s - p);
    let mut j = CMat::zeros(bp.dim() * bq.dim(), bs.dim());
    let mut rest = vec![0u16; modes];
    for (col, m) in bs.occupations().iter().enumerate() {
        for (ai, alpha) in bp.occupations().iter().enumerate() {
            if alpha.iter().zip(m).any(|(a, x)| a > x) {
                continue;
            }
            for k in 0..modes {
                rest[k] = m[k] - alpha[k];
            }
            let bi = bq.index_of(&rest).expect("complement lies in sector");
            j[(ai * bq.dim() + bi, col)] = C64::from(split_coefficient(m, alpha));
        }
    }
    let j = Arc::new(j);
    cache.lock().unwrap().entry((modes, s, p)).or_insert(j).clone()
}

/// Coefficients of `psi^{(x)n}` in the occupation basis:
/// `sqrt(n!/prod m_i!) prod psi_i^{m_i}`, evaluated in log space.
pub fn product_state(psi: &[C64], particles: usize) -> Vec<C64> {
    let b = basis(psi.len(), particles);
    b.occupations()
        .iter()
        .map(|m| {
            let mut ln = 0.5 * ln_multinomial(m);
            let mut phase = 0.0;
            for (k, &mk) in m.iter().enumerate() {
                if mk == 0 {
                    continue;
                }
                let r = psi[k].norm();
                if r == 0.0 {
                    return C64::new(0.0, 0.0);
                }
                ln += mk as f64 * r.ln();
                phase += mk as f64 * psi[k].arg();
            }
            C64::from_polar(ln.exp(), phase)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, max_abs_diff};

    #[test]
    fn order_and_dims() {
        let b = basis(3, 2);
        assert_eq!(b.dim(), 6);
        assert_eq!(b.occupation(0), &vec![2, 0, 0]);
        assert_eq!(b.occupation(1), &vec![1, 1, 0]);
        assert_eq!(b.occupation(5), &vec![0, 0, 2]);
        let one = basis(4, 1);
        for k in 0..4 {
            assert_eq!(one.occupation(k)[k], 1);
        }
        assert_eq!(sector_dim(1, 7), 1);
        assert_eq!(basis(2, 0).dim(), 1);
    }

    #[test]
    fn split_isometry_is_isometric() {
        for (m, s, p) in [(2, 3, 1), (3, 4, 2), (3, 2, 0), (2, 5, 5)] {
            let j = split_isometry(m, s, p);
            let d = sector_dim(m, s);
            assert!(max_abs_diff(&(j.adjoint() * j.as_ref()), &identity(d)) < 1e-13);
        }
    }

    #[test]
    fn product_state_is_normalized() {
        let psi = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        for n in [1, 3, 10, 200] {
            let v = product_state(&psi, n);
            let nrm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            assert!((nrm - 1.0).abs() < 1e-12, "n={n}: {nrm}");
        }
    }
}
