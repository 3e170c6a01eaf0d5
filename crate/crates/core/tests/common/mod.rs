//! Independent reference constructions used by the integration tests.
#![allow(dead_code)]

use meanfield_core::fock::{sector_basis, SectorOperator};
use meanfield_core::linalg::{CMat, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = C64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in 0..i {
            let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMat {
    CMat::from_fn(r, c, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_unit(rng: &mut ChaCha8Rng, m: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..m).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn occupation_of(seq: &[usize], m: usize) -> Vec<u16> {
    let mut occ = vec![0u16; m];
    for &x in seq {
        occ[x] += 1;
    }
    occ
}

fn all_sequences(m: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..m).map(move |x| {
                    let mut t = s.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// Embedding of the symmetric sector into the full tensor power, `M^s x dim`.
pub fn symmetric_embedding(m: usize, s: usize) -> CMat {
    let basis = sector_basis(m, s).unwrap();
    let seqs = all_sequences(m, s);
    let mut e = CMat::zeros(seqs.len(), basis.dim());
    for (row, seq) in seqs.iter().enumerate() {
        let occ = occupation_of(seq, m);
        let col = basis.occupations().iter().position(|o| *o == occ).unwrap();
        let w: f64 = occ.iter().map(|&k| factorial(k as usize)).product();
        e[(row, col)] = C64::from((w / factorial(s)).sqrt());
    }
    e
}

/// Action of a sector operator on the full tensor power (zero off the symmetric part).
pub fn full_operator(a: &SectorOperator) -> CMat {
    let e = symmetric_embedding(a.modes(), a.particles());
    &e * a.matrix() * e.adjoint()
}

/// `a ._r b` from the full tensor product and explicit projectors.
pub fn dense_contract(a: &SectorOperator, b: &SectorOperator, r: usize) -> CMat {
    let m = a.modes();
    let (p, q) = (a.particles(), b.particles());
    let s = p + q - r;
    let id = |k: usize| CMat::identity(m.pow(k as u32), m.pow(k as u32));
    let left = full_operator(a).kronecker(&id(q - r));
    let right = id(p - r).kronecker(&full_operator(b));
    let e = symmetric_embedding(m, s);
    e.adjoint() * left * right * e
}

/// Apply `a_k` (annihilation) or `a_k^*` to an occupation vector.
fn ladder(occ: &mut [u16], k: usize, create: bool) -> f64 {
    if create {
        occ[k] += 1;
        (occ[k] as f64).sqrt()
    } else if occ[k] == 0 {
        0.0
    } else {
        let c = (occ[k] as f64).sqrt();
        occ[k] -= 1;
        c
    }
}

/// `N^{-p} sum a(x; y) psi*(x_p)...psi*(x_1) psi(y_1)...psi(y_p)` on the `n`-sector,
/// built from ladder operators acting on occupation vectors.
pub fn ladder_quantize(a: &SectorOperator, big_n: f64, n: usize) -> CMat {
    let m = a.modes();
    let p = a.particles();
    let kernel = full_operator(a);
    let seqs = all_sequences(m, p);
    let basis = sector_basis(m, n).unwrap();
    let d = basis.dim();
    let mut out = CMat::zeros(d, d);
    for (col, start) in basis.occupations().iter().enumerate() {
        for (yi, y) in seqs.iter().enumerate() {
            let mut occ = start.clone();
            let mut amp = 1.0;
            for &k in y.iter() {
                amp *= ladder(&mut occ, k, false);
            }
            if amp == 0.0 {
                continue;
            }
            for (xi, x) in seqs.iter().enumerate() {
                let kxy = kernel[(xi, yi)];
                if kxy.norm() == 0.0 {
                    continue;
                }
                let mut o2 = occ.clone();
                let mut amp2 = amp;
                for &k in x.iter().rev() {
                    amp2 *= ladder(&mut o2, k, true);
                }
                let row = basis.occupations().iter().position(|o| *o == o2).unwrap();
                out[(row, col)] += kxy * amp2;
            }
        }
    }
    out / C64::from(big_n.powi(p as i32))
}

/// `Gamma^{(p)}` by tracing out the full tensor representation of the state.
pub fn dense_marginal(m: usize, n: usize, amplitudes: &[C64], p: usize) -> CMat {
    let e = symmetric_embedding(m, n);
    let v = &e * meanfield_core::linalg::CVec::from_column_slice(amplitudes);
    let kept = m.pow(p as u32);
    let traced = m.pow((n - p) as u32);
    let x = CMat::from_row_slice(kept, traced, v.as_slice());
    let full = &x * x.adjoint();
    let ep = symmetric_embedding(m, p);
    ep.adjoint() * full * ep
}

/// `<psi^{(x)q}, a psi^{(x)p}>` by explicit tensor contraction.
pub fn dense_classical(a_full: &CMat, psi: &[C64], q: usize, p: usize) -> C64 {
    let m = psi.len();
    let tensor = |k: usize| {
        all_sequences(m, k).iter().map(|s| s.iter().map(|&x| psi[x]).product::<C64>()).collect::<Vec<_>>()
    };
    let tq = tensor(q);
    let tp = tensor(p);
    let mut acc = C64::new(0.0, 0.0);
    for (i, x) in tq.iter().enumerate() {
        for (j, y) in tp.iter().enumerate() {
            acc += x.conj() * a_full[(i, j)] * y;
        }
    }
    acc
}

/// `i^k [P_{t_k}, ... [P_{t_1}, e^{itH_0} A_N(a) e^{-itH_0}]]` on the `n`-sector with
/// `P_s = e^{isH_0} (H_N - H_0) e^{-isH_0}`; `H_0` excludes `v` when `split`.
pub fn direct_multiple_commutator(
    ms: &meanfield_core::fock::ModeSpace,
    a: &SectorOperator,
    big_n: f64,
    n: usize,
    times: &[f64],
    t: f64,
    split: bool,
) -> CMat {
    use meanfield_core::fock::{build_hamiltonian, one_body_sum, quantize, QuantizationParams};
    use meanfield_core::linalg::{propagator, I};
    let q = QuantizationParams::new(big_n, n).unwrap();
    let h_free = if split { ms.h().clone() } else { ms.one_body() };
    let h0 = one_body_sum(&h_free, n).unwrap().into_matrix();
    let hint = build_hamiltonian(ms, q).unwrap().into_matrix() - &h0;
    let conj = |x: &CMat, s: f64| {
        let u = propagator(&h0, -s); // e^{ish0}
        &u * x * u.adjoint()
    };
    let mut x = conj(quantize(a, q).unwrap().matrix(), t);
    for &s in times {
        let p = conj(&hint, s);
        x = (&p * &x - &x * &p) * I;
    }
    x
}
