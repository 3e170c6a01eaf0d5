use num_bigint::BigUint;

use super::quadrature::Accumulate;
use crate::fock::basis::split_isometry;
use crate::fock::{contract_maps, sector_dim, ModeSpace, SectorOperator};
use crate::linalg::{binomial, identity, CMat, Spectral, C64, I};
use crate::{Error, Result};

/// Free dynamics `exp(i t h)` on every sector.
#[derive(Clone, Debug)]
pub struct FreeEvolution {
    modes: usize,
    spectral: Spectral,
}

impl FreeEvolution {
    pub fn new(h: &CMat) -> Self {
        FreeEvolution { modes: h.nrows(), spectral: Spectral::new(h) }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// `exp(i t h)` on `C^M`.
    pub fn one_body(&self, t: f64) -> CMat {
        self.spectral.propagator(-t)
    }

    /// `Gamma(exp(i t h))` restricted to the `s`-particle sector.
    pub fn sector(&self, t: f64, s: usize) -> CMat {
        second_quantized(&self.one_body(t), s)
    }

    /// `a_t = Gamma(e^{ith}) a Gamma(e^{-ith})` for a map from the `p_in` to the `p_out` sector.
    pub fn evolve_map(&self, a: &CMat, p_in: usize, p_out: usize, t: f64) -> CMat {
        let u = self.one_body(t);
        second_quantized(&u, p_out) * a * second_quantized(&u, p_in).adjoint()
    }

    pub fn evolve(&self, a: &SectorOperator, t: f64) -> SectorOperator {
        let p = a.particles();
        SectorOperator::new(self.modes, p, self.evolve_map(a.matrix(), p, p, t)).expect("shape preserved")
    }
}

/// `u^{(x)s}` restricted to the symmetric `s`-particle sector.
pub fn second_quantized(u: &CMat, s: usize) -> CMat {
    let m = u.nrows();
    let mut g = identity(1);
    for r in 1..=s {
        let j = split_isometry(m, r, 1);
        g = j.adjoint() * u.kronecker(&g) * j.as_ref();
    }
    g
}

/// `e^{itH_0} a e^{-itH_0}` with `H_0 = sum_i (h + v)_i`.
pub fn free_evolve(ms: &ModeSpace, a: &SectorOperator, t: f64) -> Result<SectorOperator> {
    if a.modes() != ms.modes() {
        return Err(Error::mismatch("observable and mode space have different mode counts"));
    }
    Ok(FreeEvolution::new(&ms.one_body()).evolve(a, t))
}

/// How the external potential enters the expansion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PotentialMode {
    /// `v` is part of the free dynamics; only `W` vertices appear.
    #[default]
    Folded,
    /// Free dynamics by `h` alone; `v` enters as a one-body vertex.
    Split,
}

/// The vertex operators at one time.
pub(crate) struct Vertices {
    w: CMat,
    v: Option<CMat>,
}

/// Interaction-picture data for an expansion around a fixed observable.
pub(crate) struct Expansion {
    pub modes: usize,
    pub p: usize,
    pub free: FreeEvolution,
    w: CMat,
    v: Option<CMat>,
    pub max_loops: usize,
    pub max_potentials: usize,
    pub particle_cap: Option<usize>,
}

impl Expansion {
    pub fn new(ms: &ModeSpace, p: usize, mode: PotentialMode, max_loops: usize, particle_cap: Option<usize>) -> Self {
        let (free, v) = match mode {
            PotentialMode::Folded => (FreeEvolution::new(&ms.one_body()), None),
            PotentialMode::Split => (FreeEvolution::new(ms.h()), ms.v().cloned()),
        };
        let max_potentials = if v.is_some() { usize::MAX } else { 0 };
        Expansion { modes: ms.modes(), p, free, w: ms.w().clone(), v, max_loops, max_potentials, particle_cap }
    }

    pub fn vertices(&self, tau: f64) -> Vertices {
        let u = self.free.one_body(tau);
        let g2 = second_quantized(&u, 2);
        Vertices { w: &g2 * &self.w * g2.adjoint(), v: self.v.as_ref().map(|v| &u * v * u.adjoint()) }
    }

    pub fn initial(&self, a: &SectorOperator, t: f64) -> Family {
        let mut f = Family::empty(0, self.max_loops, 0);
        f.set(0, 0, self.free.evolve(a, t).into_matrix());
        f
    }

    /// Level `j` family from level `j - 1` at vertex time `tau`.
    pub fn step(&self, prev: &Family, j: usize, tau: f64) -> Family {
        let vx = self.vertices(tau);
        let lmax = self.max_loops.min(j);
        let mmax = self.max_potentials.min(j);
        let mut next = Family::empty(j, lmax, mmax);
        for l in 0..=lmax {
            for m in 0..=mmax.min(j - l) {
                let size = self.p + j - l - m;
                if self.particle_cap.is_some_and(|c| size > c) {
                    continue;
                }
                let mut acc: Option<CMat> = None;
                let mut add = |x: CMat| match &mut acc {
                    Some(a) => *a += x,
                    None => acc = Some(x),
                };
                if let Some(g) = prev.get(l, m) {
                    let s = size - 1;
                    add(self.bracket(&vx.w, 2, g, s, 1) * (I * s as f64));
                }
                if l >= 1 {
                    if let Some(g) = prev.get(l - 1, m) {
                        let s = size;
                        if s >= 2 {
                            add(self.bracket(&vx.w, 2, g, s, 2) * (I * binomial(s, 2)));
                        }
                    }
                }
                if m >= 1 {
                    if let (Some(g), Some(v)) = (prev.get(l, m - 1), &vx.v) {
                        let s = size;
                        add(self.bracket(v, 1, g, s, 1) * (I * s as f64));
                    }
                }
                if let Some(x) = acc {
                    next.set(l, m, x);
                }
            }
        }
        next
    }

    /// `[x, g]_r` with `x` on `q` particles and `g` on `s` particles.
    fn bracket(&self, x: &CMat, q: usize, g: &CMat, s: usize, r: usize) -> CMat {
        contract_maps(self.modes, x, (q, q), g, (s, s), r) - contract_maps(self.modes, g, (s, s), x, (q, q), r)
    }
}

/// All `G^{(j, l, m)}` of one level, indexed by loops and potential vertices.
#[derive(Clone, Debug)]
pub struct Family {
    level: usize,
    mmax: usize,
    entries: Vec<Option<CMat>>,
}

impl Family {
    fn empty(level: usize, lmax: usize, mmax: usize) -> Self {
        Family { level, mmax, entries: vec![None; (lmax + 1) * (mmax + 1)] }
    }

    fn idx(&self, l: usize, m: usize) -> Option<usize> {
        let i = l * (self.mmax + 1) + m;
        (m <= self.mmax && i < self.entries.len()).then_some(i)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn get(&self, l: usize, m: usize) -> Option<&CMat> {
        self.idx(l, m).and_then(|i| self.entries[i].as_ref())
    }

    fn set(&mut self, l: usize, m: usize, x: CMat) {
        let i = self.idx(l, m).expect("index in range");
        self.entries[i] = Some(x);
    }

    /// `(l, m, G)` for every nonzero entry.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &CMat)> {
        let w = self.mmax + 1;
        self.entries.iter().enumerate().filter_map(move |(i, e)| e.as_ref().map(|g| (i / w, i % w, g)))
    }
}

impl Accumulate for Family {
    fn zero_like(&self) -> Self {
        Family {
            level: self.level,
            mmax: self.mmax,
            entries: self.entries.iter().map(|e| e.as_ref().map(|g| g.zero_like())).collect(),
        }
    }

    fn add_scaled(&mut self, other: &Self, w: f64) {
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            if let Some(b) = b {
                match a {
                    Some(a) => a.add_scaled(b, w),
                    None => *a = Some(b * C64::from(w)),
                }
            }
        }
    }
}

/// Parameters of one expansion coefficient `G^{(k, l, m)}_{t, t_1, ..., t_k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopTermRequest {
    pub k: usize,
    pub l: usize,
    pub m: usize,
    /// Vertex times; `times[j - 1]` enters at recursion depth `j`.
    pub times: Vec<f64>,
    pub t: f64,
}

/// `G^{(k, l, m)}`, an operator on `p + k - l - m` particles, from the recursion
///
/// `G^{(k,l,m)} = i s [W, G^{(k-1,l,m)}]_1 + i binom(s', 2) [W, G^{(k-1,l-1,m)}]_2 + i s' [V, G^{(k-1,l,m-1)}]_1`
///
/// with `s`, `s'` the particle numbers of the operands, vertices evolved freely
/// to `t_k`, and `G^{(0,0,0)} = a_t`. Potential vertices require [`PotentialMode::Split`].
pub fn g_term(ms: &ModeSpace, a: &SectorOperator, req: &LoopTermRequest, mode: PotentialMode) -> Result<SectorOperator> {
    if a.modes() != ms.modes() {
        return Err(Error::mismatch("observable and mode space have different mode counts"));
    }
    if req.times.len() != req.k {
        return Err(Error::invalid(format!("need {} vertex times, got {}", req.k, req.times.len())));
    }
    let p = a.particles();
    let size = p + req.k;
    if req.l + req.m > req.k {
        return Ok(SectorOperator::zero(ms.modes(), size.saturating_sub(req.l + req.m).max(1)));
    }
    let size = size - req.l - req.m;
    if req.m > 0 && (mode == PotentialMode::Folded || ms.v().is_none()) {
        return Ok(SectorOperator::zero(ms.modes(), size));
    }
    let ex = Expansion::new(ms, p, mode, req.l, None);
    let mut fam = ex.initial(a, req.t);
    for (j, &tau) in req.times.iter().enumerate() {
        fam = ex.step(&fam, j + 1, tau);
    }
    let mat = fam.get(req.l, req.m).cloned().unwrap_or_else(|| {
        let d = sector_dim(ms.modes(), size);
        CMat::zeros(d, d)
    });
    SectorOperator::new(ms.modes(), size, mat)
}

/// Number of elementary summands obtained by expanding every commutator and
/// index sum in the recursion for `G^{(k, l, m)}`.
pub fn elementary_term_count(p: usize, k: usize, l: usize, m: usize) -> BigUint {
    let mut table = vec![vec![vec![BigUint::from(0u32); m + 1]; l + 1]; k + 1];
    table[0][0][0] = BigUint::from(1u32);
    for j in 1..=k {
        for ll in 0..=l.min(j) {
            for mm in 0..=m.min(j - ll) {
                let size = p + j - ll - mm;
                let mut c = BigUint::from(0u32);
                // tree: sum over i < size of [W_{i,size}, G (x) 1], two sides each
                if ll + mm < j {
                    c += &table[j - 1][ll][mm] * BigUint::from(2 * (size - 1));
                }
                // loop: sum over pairs i < j of [W_ij, G]
                if ll >= 1 {
                    c += &table[j - 1][ll - 1][mm] * BigUint::from(size * (size - 1));
                }
                // potential: sum over i of [V_i, G]
                if mm >= 1 {
                    c += &table[j - 1][ll][mm - 1] * BigUint::from(2 * size);
                }
                table[j][ll][mm] = c;
            }
        }
    }
    table[k][l][m].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff, propagator};

    #[test]
    fn second_quantized_matches_sector_exponential() {
        let h = CMat::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.5, 0.2), c(0.5, -0.2), c(-1.0, 0.0)]);
        let fe = FreeEvolution::new(&h);
        for s in 0..=4 {
            let h0 = crate::fock::one_body_sum(&h, s.max(1)).unwrap();
            if s == 0 {
                continue;
            }
            let direct = propagator(h0.matrix(), -0.7);
            assert!(max_abs_diff(&fe.sector(0.7, s), &direct) < 1e-12);
        }
    }

    #[test]
    fn elementary_counts_small() {
        assert_eq!(elementary_term_count(1, 1, 0, 0), BigUint::from(2u32));
        assert_eq!(elementary_term_count(1, 1, 1, 0), BigUint::from(0u32));
        assert_eq!(elementary_term_count(2, 1, 1, 0), BigUint::from(2u32));
        // 2^k p (p+1) ... (p+k-1) for trees
        assert_eq!(elementary_term_count(2, 3, 0, 0), BigUint::from(8u32 * 2 * 3 * 4));
    }
}
