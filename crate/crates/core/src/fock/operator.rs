use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use super::basis::{basis, check_budget, sector_dim, split_coefficient, split_isometry};
use crate::linalg::{binomial, hermiticity_residue, identity, rel_diff, CMat, C64};
use crate::{Error, Result};

/// Bounded operator on the symmetric `p`-particle sector over `C^M`.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorOperator {
    modes: usize,
    particles: usize,
    mat: CMat,
}

impl SectorOperator {
    pub fn new(modes: usize, particles: usize, mat: CMat) -> Result<Self> {
        if modes == 0 {
            return Err(Error::invalid("mode count must be positive"));
        }
        let d = sector_dim(modes, particles);
        if mat.shape() != (d, d) {
            return Err(Error::mismatch(format!(
                "{}-particle sector over {} modes has dimension {d}, got {:?}",
                particles,
                modes,
                mat.shape()
            )));
        }
        Ok(SectorOperator { modes, particles, mat })
    }

    pub fn identity(modes: usize, particles: usize) -> Self {
        let d = sector_dim(modes, particles);
        SectorOperator { modes, particles, mat: identity(d) }
    }

    pub fn zero(modes: usize, particles: usize) -> Self {
        let d = sector_dim(modes, particles);
        SectorOperator { modes, particles, mat: CMat::zeros(d, d) }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn adjoint(&self) -> Self {
        SectorOperator { mat: self.mat.adjoint(), ..*self }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        hermiticity_residue(&self.mat) <= tol
    }

    pub fn scale(&self, z: C64) -> Self {
        SectorOperator { mat: &self.mat * z, ..*self }
    }

    /// Sum of two operators on the same sector.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_sector(other)?;
        Ok(SectorOperator { mat: &self.mat + &other.mat, ..*self })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_sector(other)?;
        Ok(SectorOperator { mat: &self.mat - &other.mat, ..*self })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_sector(other)?;
        Ok(SectorOperator { mat: &self.mat * &other.mat, ..*self })
    }

    fn same_sector(&self, other: &Self) -> Result<()> {
        if self.modes != other.modes || self.particles != other.particles {
            return Err(Error::mismatch(format!(
                "sectors ({}, {}) and ({}, {}) differ",
                self.modes, self.particles, other.modes, other.particles
            )));
        }
        Ok(())
    }

    pub(crate) fn from_parts(modes: usize, particles: usize, mat: CMat) -> Self {
        debug_assert_eq!(mat.nrows(), sector_dim(modes, particles));
        SectorOperator { modes, particles, mat }
    }
}

/// Semiclassical parameter `N` and the particle number `n` of the sector acted on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantizationParams {
    big_n: f64,
    particles: usize,
}

impl QuantizationParams {
    pub fn new(big_n: f64, particles: usize) -> Result<Self> {
        if !(big_n.is_finite() && big_n > 0.0) {
            return Err(Error::invalid(format!("N must be positive, got {big_n}")));
        }
        if particles == 0 {
            return Err(Error::invalid("particle number must be at least 1"));
        }
        Ok(QuantizationParams { big_n, particles })
    }

    pub fn big_n(&self) -> f64 {
        self.big_n
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    /// `n / N`.
    pub fn nu(&self) -> f64 {
        self.particles as f64 / self.big_n
    }
}

/// `n (n-1) ... (n-p+1) / N^p`, i.e. `(p!/N^p) binom(n, p)`.
pub fn quantization_prefactor(p: usize, q: QuantizationParams) -> f64 {
    let n = q.particles;
    if p > n {
        return 0.0;
    }
    (0..p).map(|j| (n - j) as f64 / q.big_n).product()
}

/// `A_N(a)` restricted to the `n`-particle sector:
/// `(p!/N^p) binom(n, p) P+ (a (x) 1) P+`, and 0 when `n < p`.
pub fn quantize(a: &SectorOperator, q: QuantizationParams) -> Result<SectorOperator> {
    let modes = a.modes;
    let p = a.particles;
    let n = q.particles;
    check_budget(modes, n)?;
    let bn = basis(modes, n);
    let d = bn.dim();
    if p > n {
        return Ok(SectorOperator::zero(modes, n));
    }
    let pref = quantization_prefactor(p, q);
    let bp = basis(modes, p);
    let mut out = CMat::zeros(d, d);
    let mut rho = vec![0u16; modes];
    let mut target = vec![0u16; modes];
    for (col, m_in) in bn.occupations().iter().enumerate() {
        for (j, mu_in) in bp.occupations().iter().enumerate() {
            if mu_in.iter().zip(m_in).any(|(x, y)| x > y) {
                continue;
            }
            for k in 0..modes {
                rho[k] = m_in[k] - mu_in[k];
            }
            let s_in = split_coefficient(m_in, mu_in);
            for (i, mu_out) in bp.occupations().iter().enumerate() {
                let aij = a.mat[(i, j)];
                if aij == C64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..modes {
                    target[k] = rho[k] + mu_out[k];
                }
                let row = bn.index_of(&target).expect("target in sector");
                out[(row, col)] += aij * (pref * s_in * split_coefficient(&target, mu_out));
            }
        }
    }
    Ok(SectorOperator { modes, particles: n, mat: out })
}

/// Nonzero entries of a sparse matrix, row-major.
struct Sparse {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl Sparse {
    fn from_dense(m: &CMat) -> Self {
        let mut entries = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                if z != C64::new(0.0, 0.0) {
                    entries.push((i, j, z));
                }
            }
        }
        Sparse { rows: m.nrows(), cols: m.ncols(), entries }
    }

    /// `self * x` for a row-major `x` with `ncols` columns.
    fn apply(&self, x: &[C64], ncols: usize) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.rows * ncols];
        for &(i, j, v) in &self.entries {
            let (dst, src) = (&mut out[i * ncols..(i + 1) * ncols], &x[j * ncols..(j + 1) * ncols]);
            for (d, s) in dst.iter_mut().zip(src) {
                *d += v * s;
            }
        }
        out
    }
}

struct ContractionPlan {
    left: Sparse,
    middle: Sparse,
    right: Sparse,
    d_pad_in: usize,
    d_pad_out: usize,
}

/// Matrices of `P+ (a (x) 1) (1 (x) b) P+` that do not depend on `a` and `b`.
fn plan(modes: usize, a_in: usize, a_out: usize, b_in: usize, b_out: usize, r: usize) -> Arc<ContractionPlan> {
    type Key = (usize, usize, usize, usize, usize, usize);
    static CACHE: OnceLock<RwLock<HashMap<Key, Arc<ContractionPlan>>>> = OnceLock::new();
    let key = (modes, a_in, a_out, b_in, b_out, r);
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.read().unwrap().get(&key) {
        return p.clone();
    }
    let s_in = a_in - r + b_in;
    let s_out = a_out + b_out - r;
    let d_pad_in = sector_dim(modes, a_in - r);
    let d_pad_out = sector_dim(modes, b_out - r);
    let right = split_isometry(modes, s_in, a_in - r);
    let regroup = identity(d_pad_in).kronecker(split_isometry(modes, b_out, r).as_ref());
    let merge = split_isometry(modes, a_in, a_in - r).adjoint().kronecker(&identity(d_pad_out));
    let middle = merge * regroup;
    let left = split_isometry(modes, s_out, a_out).adjoint();
    let p = Arc::new(ContractionPlan {
        left: Sparse::from_dense(&left),
        middle: Sparse::from_dense(&middle),
        right: Sparse::from_dense(&right),
        d_pad_in,
        d_pad_out,
    });
    cache.write().unwrap().entry(key).or_insert(p).clone()
}

/// `P+ (a (x) 1^{(b_out - r)}) (1^{(a_in - r)} (x) b) P+` for sector maps
/// `a: a_in -> a_out` and `b: b_in -> b_out` given as raw matrices.
/// The identity factors are applied blockwise and the isometries as sparse maps.
pub(crate) fn contract_maps(
    modes: usize,
    a: &CMat,
    (a_in, a_out): (usize, usize),
    b: &CMat,
    (b_in, b_out): (usize, usize),
    r: usize,
) -> CMat {
    assert!(r <= a_in && r <= b_out, "contraction order exceeds available slots");
    let pl = plan(modes, a_in, a_out, b_in, b_out, r);
    let zero = C64::new(0.0, 0.0);
    let n = pl.right.cols;
    let (db_out, db_in) = b.shape();
    let (da_out, da_in) = a.shape();
    debug_assert_eq!(pl.right.rows, pl.d_pad_in * db_in);
    // x = (1 (x) b) right, rows indexed (gamma, delta) -> gamma * db_out + delta
    let mut x = vec![zero; pl.d_pad_in * db_out * n];
    let bs = b.as_slice();
    for &(row, c, v) in &pl.right.entries {
        let (g, nu) = (row / db_in, row % db_in);
        let col = &bs[nu * db_out..(nu + 1) * db_out];
        for (d, bv) in col.iter().enumerate() {
            x[(g * db_out + d) * n + c] += bv * v;
        }
    }
    let y = pl.middle.apply(&x, n);
    // z = (a (x) 1) y
    let dpo = pl.d_pad_out;
    let mut z = vec![zero; da_out * dpo * n];
    for o in 0..da_out {
        for e in 0..da_in {
            let w = a[(o, e)];
            if w == zero {
                continue;
            }
            let dst = &mut z[o * dpo * n..(o + 1) * dpo * n];
            let src = &y[e * dpo * n..(e + 1) * dpo * n];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += w * s;
            }
        }
    }
    let out = pl.left.apply(&z, n);
    CMat::from_row_slice(pl.left.rows, n, &out)
}

/// `a ._r b = P+ (a (x) 1^{(q-r)}) (1^{(p-r)} (x) b) P+` on the `(p+q-r)` sector.
pub fn contract(a: &SectorOperator, b: &SectorOperator, r: usize) -> Result<SectorOperator> {
    if a.modes != b.modes {
        return Err(Error::mismatch("operands live on different mode spaces"));
    }
    let (p, q) = (a.particles, b.particles);
    if r > p.min(q) {
        return Err(Error::invalid(format!("contraction order {r} exceeds min({p}, {q})")));
    }
    let s = p + q - r;
    check_budget(a.modes, s)?;
    let mat = contract_maps(a.modes, &a.mat, (p, p), &b.mat, (q, q), r);
    Ok(SectorOperator { modes: a.modes, particles: s, mat })
}

/// `[a, b]_r = a ._r b - b ._r a`.
pub fn contracted_commutator(a: &SectorOperator, b: &SectorOperator, r: usize) -> Result<SectorOperator> {
    contract(a, b, r)?.sub(&contract(b, a, r)?)
}

/// Coefficient `binom(p, r) binom(q, r) r! / N^r` of the product formula.
pub fn product_coefficient(p: usize, q: usize, r: usize, big_n: f64) -> f64 {
    let r_fact: f64 = (1..=r).map(|j| j as f64).product();
    binomial(p, r) * binomial(q, r) * r_fact / big_n.powi(r as i32)
}

/// Right-hand side of the product formula, `sum_r c_r A_N(a ._r b)`.
pub fn quantized_product_expansion(
    a: &SectorOperator,
    b: &SectorOperator,
    q: QuantizationParams,
) -> Result<SectorOperator> {
    let mut acc = SectorOperator::zero(a.modes, q.particles);
    for r in 0..=a.particles.min(b.particles) {
        let c = product_coefficient(a.particles, b.particles, r, q.big_n);
        acc = acc.add(&quantize(&contract(a, b, r)?, q)?.scale(C64::from(c)))?;
    }
    Ok(acc)
}

/// Commutator formula: `sum_{r>=1} c_r A_N([a, b]_r)`.
pub fn quantized_commutator_expansion(
    a: &SectorOperator,
    b: &SectorOperator,
    q: QuantizationParams,
) -> Result<SectorOperator> {
    let mut acc = SectorOperator::zero(a.modes, q.particles);
    for r in 1..=a.particles.min(b.particles) {
        let c = product_coefficient(a.particles, b.particles, r, q.big_n);
        acc = acc.add(&quantize(&contracted_commutator(a, b, r)?, q)?.scale(C64::from(c)))?;
    }
    Ok(acc)
}

/// Relative deviation between `A_N(a) A_N(b)` and the product formula.
pub fn quantized_product_check(a: &SectorOperator, b: &SectorOperator, q: QuantizationParams) -> Result<f64> {
    let lhs = quantize(a, q)?.mul(&quantize(b, q)?)?;
    let rhs = quantized_product_expansion(a, b, q)?;
    Ok(rel_diff(lhs.matrix(), rhs.matrix()))
}
