use serde::{Deserialize, Serialize};

use super::basis::{basis, sector_dim};
use crate::linalg::{hermiticity_residue, spectral_norm, CMat, C64};
use crate::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-12;

/// One-particle space `C^M` with one-body part `h`, optional external
/// potential `v`, and a two-body interaction `W` on the symmetric pair sector.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSpace {
    modes: usize,
    h: CMat,
    v: Option<CMat>,
    w: CMat,
    pair_table: Option<Vec<f64>>,
}

impl ModeSpace {
    /// General interaction given on the symmetric 2-particle sector.
    pub fn new(h: CMat, w: CMat, v: Option<CMat>) -> Result<Self> {
        let modes = h.nrows();
        if modes == 0 || h.ncols() != modes {
            return Err(Error::mismatch(format!("h must be square and nonempty, got {:?}", h.shape())));
        }
        let d2 = sector_dim(modes, 2);
        if w.shape() != (d2, d2) {
            return Err(Error::mismatch(format!("W must be {d2}x{d2}, got {:?}", w.shape())));
        }
        check_hermitian("h", &h)?;
        check_hermitian("W", &w)?;
        if let Some(v) = &v {
            if v.shape() != (modes, modes) {
                return Err(Error::mismatch(format!("v must be {modes}x{modes}")));
            }
            check_hermitian("v", v)?;
        }
        Ok(ModeSpace { modes, h, v, w, pair_table: None })
    }

    /// Interaction diagonal in the product basis: `W(e_x (x) e_y) = w[x][y] e_x (x) e_y`.
    /// `w` is row-major `M x M`, real and symmetric.
    pub fn with_pair_table(h: CMat, w: &[f64], v: Option<CMat>) -> Result<Self> {
        let modes = h.nrows();
        if w.len() != modes * modes {
            return Err(Error::mismatch(format!("pair table needs {} entries, got {}", modes * modes, w.len())));
        }
        for x in 0..modes {
            for y in 0..modes {
                if (w[x * modes + y] - w[y * modes + x]).abs() > HERMITIAN_TOL {
                    return Err(Error::invalid("pair table must be symmetric"));
                }
            }
        }
        let b2 = basis(modes, 2);
        let mut wm = CMat::zeros(b2.dim(), b2.dim());
        for (i, occ) in b2.occupations().iter().enumerate() {
            let modes_hit: Vec<usize> =
                occ.iter().enumerate().flat_map(|(k, &c)| std::iter::repeat_n(k, c as usize)).collect();
            wm[(i, i)] = C64::from(w[modes_hit[0] * modes + modes_hit[1]]);
        }
        let mut ms = ModeSpace::new(h, wm, v)?;
        ms.pair_table = Some(w.to_vec());
        Ok(ms)
    }

    /// Free particles.
    pub fn free(h: CMat) -> Result<Self> {
        let d2 = sector_dim(h.nrows(), 2);
        ModeSpace::new(h, CMat::zeros(d2, d2), None)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Kinetic part without the external potential.
    pub fn h(&self) -> &CMat {
        &self.h
    }

    pub fn v(&self) -> Option<&CMat> {
        self.v.as_ref()
    }

    pub fn w(&self) -> &CMat {
        &self.w
    }

    pub fn pair_table(&self) -> Option<&[f64]> {
        self.pair_table.as_deref()
    }

    /// `h + v`, the one-body operator used when the potential is not split off.
    pub fn one_body(&self) -> CMat {
        match &self.v {
            Some(v) => &self.h + v,
            None => self.h.clone(),
        }
    }

    /// Operator norm of `W`; equals `max |w_xy|` for a pair table.
    pub fn interaction_norm(&self) -> f64 {
        spectral_norm(&self.w)
    }

    /// Same space with the interaction replaced by zero.
    pub fn without_interaction(&self) -> Self {
        let d2 = self.w.nrows();
        ModeSpace { w: CMat::zeros(d2, d2), pair_table: self.pair_table.as_ref().map(|t| vec![0.0; t.len()]), ..self.clone() }
    }

    /// Same space with the potential folded into `h`.
    pub fn folded(&self) -> Self {
        ModeSpace { h: self.one_body(), v: None, ..self.clone() }
    }

    /// Kernel `W(x, y; u, v)` of the interaction on `C^M (x) C^M`, indexed
    /// `[((x * M + y) * M + u) * M + v]`.
    pub fn interaction_kernel(&self) -> Vec<C64> {
        let m = self.modes;
        let b2 = basis(m, 2);
        // embedding coefficient <e_x (x) e_y | occ>
        let emb = |x: usize, y: usize| -> (usize, f64) {
            let mut occ = vec![0u16; m];
            occ[x] += 1;
            occ[y] += 1;
            let idx = b2.index_of(&occ).unwrap();
            (idx, if x == y { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 })
        };
        let mut k = vec![C64::new(0.0, 0.0); m * m * m * m];
        for x in 0..m {
            for y in 0..m {
                let (i, ci) = emb(x, y);
                for u in 0..m {
                    for v in 0..m {
                        let (j, cj) = emb(u, v);
                        k[((x * m + y) * m + u) * m + v] = self.w[(i, j)] * (ci * cj);
                    }
                }
            }
        }
        k
    }

    pub fn to_doc(&self) -> ModeSpaceDoc {
        ModeSpaceDoc {
            modes: self.modes,
            h: flatten(&self.h),
            w_pair: self.pair_table.clone(),
            w: if self.pair_table.is_some() { None } else { Some(flatten(&self.w)) },
            v: self.v.as_ref().map(flatten),
        }
    }

    pub fn from_doc(doc: &ModeSpaceDoc) -> Result<Self> {
        let m = doc.modes;
        if m == 0 {
            return Err(Error::config("M", "must be positive"));
        }
        let h = unflatten(&doc.h, m).map_err(|e| Error::config("h", e))?;
        let v = match &doc.v {
            Some(v) => Some(unflatten(v, m).map_err(|e| Error::config("v", e))?),
            None => None,
        };
        let lift = |field: &str, e: Error| Error::config(field, e.to_string());
        match (&doc.w_pair, &doc.w) {
            (Some(t), None) => ModeSpace::with_pair_table(h, t, v).map_err(|e| lift("w_pair", e)),
            (None, Some(w)) => {
                let d2 = sector_dim(m, 2);
                let w = unflatten(w, d2).map_err(|e| Error::config("W", e))?;
                ModeSpace::new(h, w, v).map_err(|e| lift("W", e))
            }
            (None, None) => ModeSpace::free(h).map_err(|e| lift("h", e)),
            (Some(_), Some(_)) => Err(Error::config("W", "give either w_pair or W, not both")),
        }
    }
}

fn check_hermitian(name: &str, a: &CMat) -> Result<()> {
    let res = hermiticity_residue(a);
    if res > HERMITIAN_TOL {
        return Err(Error::invalid(format!("{name} is not Hermitian (residue {res:e})")));
    }
    Ok(())
}

/// Row-major list of `[re, im]` pairs.
pub fn flatten(a: &CMat) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            out.push(a[(i, j)]);
        }
    }
    out
}

pub fn unflatten(v: &[C64], d: usize) -> std::result::Result<CMat, String> {
    if v.len() != d * d {
        return Err(format!("expected {} entries, got {}", d * d, v.len()));
    }
    Ok(CMat::from_row_slice(d, d, v))
}

/// Serialized form of a [`ModeSpace`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpaceDoc {
    #[serde(rename = "M")]
    pub modes: usize,
    pub h: Vec<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_pair: Option<Vec<f64>>,
    #[serde(rename = "W", default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<C64>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn h2() -> CMat {
        CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.5, 0.1), c(0.5, -0.1), c(1.0, 0.0)])
    }

    #[test]
    fn pair_table_diagonal() {
        let ms = ModeSpace::with_pair_table(h2(), &[1.0, 0.5, 0.5, -0.3], None).unwrap();
        let w = ms.w();
        assert_eq!(w[(0, 0)], c(1.0, 0.0));
        assert_eq!(w[(1, 1)], c(0.5, 0.0));
        assert_eq!(w[(2, 2)], c(-0.3, 0.0));
        assert!((ms.interaction_norm() - 1.0).abs() < 1e-14);
        let k = ms.interaction_kernel();
        // diagonal kernel: W(x,y;x,y) = w_xy on the symmetric part
        assert!((k[((0 * 2 + 1) * 2 + 0) * 2 + 1] - c(0.25, 0.0)).norm() < 1e-14);
        assert!((k[((0 * 2 + 1) * 2 + 1) * 2 + 0] - c(0.25, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let bad = CMat::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(ModeSpace::free(bad).is_err());
        assert!(ModeSpace::with_pair_table(h2(), &[1.0, 0.2, 0.3, 1.0], None).is_err());
    }

    #[test]
    fn doc_round_trip() {
        let ms = ModeSpace::with_pair_table(h2(), &[1.0, 0.5, 0.5, -0.3], Some(h2())).unwrap();
        let json = serde_json::to_string(&ms.to_doc()).unwrap();
        let back: ModeSpaceDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(ModeSpace::from_doc(&back).unwrap(), ms);
        assert_eq!(serde_json::to_string(&back).unwrap(), json);
    }
}
