use super::basis::check_budget;
use super::mode_space::ModeSpace;
use super::operator::{contract_maps, QuantizationParams, SectorOperator};
use crate::linalg::{binomial, identity, CMat, C64};
use crate::Result;

/// `P+ (a (x) 1^{(n-p)}) P+` on the `n`-particle sector, `n >= p`.
pub(crate) fn lift(a: &SectorOperator, n: usize) -> CMat {
    let p = a.particles();
    let rest = crate::fock::basis::sector_dim(a.modes(), n - p);
    contract_maps(a.modes(), a.matrix(), (p, p), &identity(rest), (n - p, n - p), 0)
}

/// `sum_i h_i` on the `n`-particle sector.
pub fn one_body_sum(h: &CMat, n: usize) -> Result<SectorOperator> {
    let m = h.nrows();
    check_budget(m, n)?;
    let op = SectorOperator::new(m, 1, h.clone())?;
    Ok(SectorOperator::from_parts(m, n, lift(&op, n) * C64::from(n as f64)))
}

/// `H_N = sum_i (h + v)_i + (1/N) sum_{i<j} W_ij` on the `n`-particle sector.
pub fn build_hamiltonian(ms: &ModeSpace, q: QuantizationParams) -> Result<SectorOperator> {
    let n = q.particles();
    let m = ms.modes();
    check_budget(m, n)?;
    let mut h = one_body_sum(&ms.one_body(), n)?.into_matrix();
    if n >= 2 {
        let w = SectorOperator::new(m, 2, ms.w().clone())?;
        h += lift(&w, n) * C64::from(binomial(n, 2) / q.big_n());
    }
    Ok(SectorOperator::from_parts(m, n, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::quantize;
    use crate::linalg::{c, max_abs_diff};

    #[test]
    fn matches_quantized_form() {
        let h = CMat::from_row_slice(2, 2, &[c(0.2, 0.0), c(0.5, 0.1), c(0.5, -0.1), c(1.0, 0.0)]);
        let ms = ModeSpace::with_pair_table(h, &[1.0, 0.5, 0.5, -0.3], None).unwrap();
        for (n_big, n) in [(4.0, 4), (3.0, 5), (7.5, 2)] {
            let q = QuantizationParams::new(n_big, n).unwrap();
            let hn = build_hamiltonian(&ms, q).unwrap();
            let a_h = quantize(&SectorOperator::new(2, 1, ms.one_body()).unwrap(), q).unwrap();
            let a_w = quantize(&SectorOperator::new(2, 2, ms.w().clone()).unwrap(), q).unwrap();
            let rhs = (a_h.matrix() + a_w.matrix() * C64::from(0.5)) * C64::from(n_big);
            assert!(max_abs_diff(hn.matrix(), &rhs) < 1e-12);
            assert!(hn.is_hermitian(1e-12));
        }
    }
}
