use super::observable::{observable, ClassicalObservable};
use crate::dyson::{nested_simplex, FreeEvolution, GaussLegendre};
use crate::fock::{contract_maps, ModeSpace};
use crate::linalg::{CMat, C64, I};
use crate::dyson::second_quantized;
use crate::{Error, Result};

struct TreeStepper {
    modes: usize,
    q: usize,
    p: usize,
    free: FreeEvolution,
    w: CMat,
}

impl TreeStepper {
    fn new(ms: &ModeSpace, a: &ClassicalObservable) -> Result<Self> {
        if a.modes() != ms.modes() {
            return Err(Error::mismatch("observable and mode space have different mode counts"));
        }
        Ok(TreeStepper { modes: ms.modes(), q: a.q(), p: a.p(), free: FreeEvolution::new(&ms.one_body()), w: ms.w().clone() })
    }

    fn initial(&self, a: &ClassicalObservable, t: f64) -> CMat {
        self.free.evolve_map(a.matrix(), a.p(), a.q(), t)
    }

    /// `T^{(j)} = i q' P+ W_{q',q'+1} (T (x) 1) P+ - i p' P+ (T (x) 1) W_{p',p'+1} P+`
    /// with `q'`, `p'` the output and input particle numbers of `T = T^{(j-1)}`.
    fn step(&self, t_prev: &CMat, j: usize, tau: f64) -> CMat {
        let (qo, pi) = (self.q + j - 1, self.p + j - 1);
        let g2 = second_quantized(&self.free.one_body(tau), 2);
        let w = &g2 * &self.w * g2.adjoint();
        let left = contract_maps(self.modes, &w, (2, 2), t_prev, (pi, qo), 1);
        let right = contract_maps(self.modes, t_prev, (pi, qo), &w, (2, 2), 1);
        left * (I * qo as f64) - right * (I * pi as f64)
    }
}

/// Tree coefficient `T^{(k)}_{t, t_1, ..., t_k}(a)`, a map from `p + k` to `q + k` particles.
pub fn tree_term(ms: &ModeSpace, a: &ClassicalObservable, times: &[f64], t: f64) -> Result<ClassicalObservable> {
    let st = TreeStepper::new(ms, a)?;
    let mut cur = st.initial(a, t);
    for (j, &tau) in times.iter().enumerate() {
        cur = st.step(&cur, j + 1, tau);
    }
    let k = times.len();
    ClassicalObservable::new(ms.modes(), a.q() + k, a.p() + k, cur)
}

/// Values `A(int T^{(k)})(psi)` for `k = 0..=K`; their sum approximates
/// `A(a)(psi(t))` with `psi(t)` the Hartree evolution of `psi`.
pub fn tree_series_terms(
    ms: &ModeSpace,
    a: &ClassicalObservable,
    psi: &[C64],
    t: f64,
    k_max: usize,
    quad_order: usize,
) -> Result<Vec<C64>> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("t must be finite and nonnegative, got {t}")));
    }
    let st = TreeStepper::new(ms, a)?;
    let rule = GaussLegendre::new(quad_order)?;
    let levels = nested_simplex(k_max, t, &rule, st.initial(a, t), |x, j, u| st.step(x, j, u));
    levels
        .into_iter()
        .enumerate()
        .map(|(k, mat)| observable(&ClassicalObservable::from_parts(ms.modes(), a.q() + k, a.p() + k, mat), psi))
        .collect()
}

/// `sum_{k <= K} A(int T^{(k)})(psi)`.
pub fn tree_series(
    ms: &ModeSpace,
    a: &ClassicalObservable,
    psi: &[C64],
    t: f64,
    k_max: usize,
    quad_order: usize,
) -> Result<C64> {
    Ok(tree_series_terms(ms, a, psi, t, k_max, quad_order)?.into_iter().sum())
}
