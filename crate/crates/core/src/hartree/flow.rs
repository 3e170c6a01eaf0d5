use crate::fock::ModeSpace;
use crate::linalg::{vec_norm, CMat, CVec, Spectral, C64, I};
use crate::{Error, Result};

/// Hartree flow `i d psi/dt = h psi + (W contracted with |psi><psi|) psi` on `C^M`,
/// integrated in the interaction picture of `h` with step-doubling RK4.
#[derive(Clone, Debug)]
pub struct HartreeFlow {
    modes: usize,
    h: CMat,
    spectral: Spectral,
    kernel: Vec<C64>,
    interacting: bool,
    tol: f64,
}

/// State and conserved quantities at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub psi: Vec<C64>,
    pub norm: f64,
    pub energy: f64,
}

pub const DEFAULT_TOL: f64 = 1e-11;

impl HartreeFlow {
    pub fn new(ms: &ModeSpace) -> Self {
        Self::with_tolerance(ms, DEFAULT_TOL)
    }

    /// `tol` bounds the local error per step.
    pub fn with_tolerance(ms: &ModeSpace, tol: f64) -> Self {
        let h = ms.one_body();
        let interacting = ms.w().iter().any(|z| z.norm() > 0.0);
        HartreeFlow { modes: ms.modes(), spectral: Spectral::new(&h), h, kernel: ms.interaction_kernel(), interacting, tol }
    }

    /// `W(psi)_x = sum_{y,u,v} W(x,y;u,v) conj(psi_y) psi_u psi_v`.
    pub fn mean_field(&self, psi: &CVec) -> CVec {
        let m = self.modes;
        let mut out = CVec::zeros(m);
        for x in 0..m {
            let mut acc = C64::new(0.0, 0.0);
            for y in 0..m {
                let cy = psi[y].conj();
                for u in 0..m {
                    for v in 0..m {
                        acc += self.kernel[((x * m + y) * m + u) * m + v] * cy * psi[u] * psi[v];
                    }
                }
            }
            out[x] = acc;
        }
        out
    }

    /// `H(psi) = <psi, h psi> + 1/2 <psi (x) psi, W psi (x) psi>`.
    pub fn energy(&self, psi: &[C64]) -> f64 {
        let v = CVec::from_column_slice(psi);
        let kin = v.dotc(&(&self.h * &v)).re;
        kin + 0.5 * v.dotc(&self.mean_field(&v)).re
    }

    fn rhs(&self, s: f64, phi: &CVec) -> CVec {
        // phi = e^{ish} psi
        let back = self.spectral.propagator(s);
        let fwd = self.spectral.propagator(-s);
        let psi = &back * phi;
        (fwd * self.mean_field(&psi)) * (-I)
    }

    fn rk4(&self, s: f64, y: &CVec, dt: f64) -> CVec {
        let half = C64::from(0.5 * dt);
        let k1 = self.rhs(s, y);
        let k2 = self.rhs(s + 0.5 * dt, &(y + &k1 * half));
        let k3 = self.rhs(s + 0.5 * dt, &(y + &k2 * half));
        let k4 = self.rhs(s + dt, &(y + &k3 * C64::from(dt)));
        y + (k1 + k2 * C64::from(2.0) + k3 * C64::from(2.0) + k4) * C64::from(dt / 6.0)
    }

    /// `psi(t)` from `psi(0) = psi0`; negative `t` runs backwards.
    pub fn evolve(&self, psi0: &[C64], t: f64) -> Result<Vec<C64>> {
        if psi0.len() != self.modes {
            return Err(Error::mismatch(format!("vector has {} modes, expected {}", psi0.len(), self.modes)));
        }
        if !t.is_finite() {
            return Err(Error::invalid("t must be finite"));
        }
        let y0 = CVec::from_column_slice(psi0);
        if !self.interacting || t == 0.0 {
            return Ok((self.spectral.propagator(t) * y0).as_slice().to_vec());
        }
        let sign = t.signum();
        let total = t.abs();
        let scale = vec_norm(&y0).max(1.0);
        let mut s = 0.0;
        let mut y = y0;
        let mut dt = (0.05 * total).min(0.05);
        while s < total {
            if s + dt > total {
                dt = total - s;
            }
            let sd = sign * dt;
            let full = self.rk4(sign * s, &y, sd);
            let mid = self.rk4(sign * s, &y, 0.5 * sd);
            let two = self.rk4(sign * (s + 0.5 * dt), &mid, 0.5 * sd);
            let err = vec_norm(&(&two - &full)) / 15.0;
            if err <= self.tol * scale {
                y = &two + (&two - &full) / C64::from(15.0);
                s += dt;
            }
            let factor = if err == 0.0 { 2.0 } else { (0.9 * (self.tol * scale / err).powf(0.2)).clamp(0.2, 2.0) };
            dt *= factor;
            if dt < 1e-14 * total.max(1.0) && s < total {
                return Err(Error::StepUnderflow { t: sign * s });
            }
        }
        Ok((self.spectral.propagator(t) * y).as_slice().to_vec())
    }

    /// States, norms and energies on an increasing time grid starting from `psi0` at 0.
    pub fn trajectory(&self, psi0: &[C64], times: &[f64]) -> Result<Vec<TrajectoryPoint>> {
        let mut out = Vec::with_capacity(times.len());
        let mut cur = psi0.to_vec();
        let mut last = 0.0;
        for &t in times {
            if t < last {
                return Err(Error::invalid("time grid must be nondecreasing and start at or after 0"));
            }
            cur = self.evolve(&cur, t - last)?;
            last = t;
            let norm = cur.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            out.push(TrajectoryPoint { t, norm, energy: self.energy(&cur), psi: cur.clone() });
        }
        Ok(out)
    }
}

/// `psi(t)` under the Hartree flow of `ms`.
pub fn evolve(ms: &ModeSpace, psi0: &[C64], t: f64) -> Result<Vec<C64>> {
    HartreeFlow::new(ms).evolve(psi0, t)
}
