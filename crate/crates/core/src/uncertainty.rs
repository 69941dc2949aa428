//! Operating domain of the uncertain parameters and its corner sets.
//!
//! Three quantities are uncertain: the two current components and the
//! vehicle speed through water. Each carries a relative variance, so the
//! operating domain is a hyper-rectangle around the nominal values and only
//! its vertices are evaluated. Perturbations are relative per sample, which
//! means a zero current component carries no uncertainty.
//!
//! Corners are not guaranteed to bracket interior extrema; results built on
//! them should be analysed afterwards rather than trusted blindly.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flowfield::{FlowSample, Jacobian};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct UncertaintyDomain {
    pub rel_var_u: f64,
    pub rel_var_v: f64,
    pub rel_var_speed: f64,
}

impl UncertaintyDomain {
    pub fn new(rel_var_u: f64, rel_var_v: f64, rel_var_speed: f64) -> Result<Self> {
        let d = Self { rel_var_u, rel_var_v, rel_var_speed };
        d.validate()?;
        Ok(d)
    }

    /// The same percentage (e.g. `5.0`) on all three axes.
    pub fn from_percent(pct: f64) -> Result<Self> {
        Self::new(pct / 100.0, pct / 100.0, pct / 100.0)
    }

    pub fn nominal() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        for f in [self.rel_var_u, self.rel_var_v, self.rel_var_speed] {
            if !(0.0..1.0).contains(&f) {
                return Err(Error::InvalidConfig("variance fractions must lie in [0, 1)"));
            }
        }
        Ok(())
    }

    pub fn is_nominal(&self) -> bool {
        self.rel_var_u == 0.0 && self.rel_var_v == 0.0 && self.rel_var_speed == 0.0
    }

    /// Every sign combination over the non-degenerate axes, ordered
    /// lexicographically in `(sign_u, sign_v, sign_speed)`. A degenerate axis
    /// contributes sign 0 only, so all-zero fractions give the single
    /// nominal set.
    pub fn corner_sets(&self) -> Vec<ParameterSet> {
        fn signs(frac: f64) -> &'static [i8] {
            if frac > 0.0 {
                &[-1, 1]
            } else {
                &[0]
            }
        }
        let mut out = Vec::with_capacity(8);
        for &su in signs(self.rel_var_u) {
            for &sv in signs(self.rel_var_v) {
                for &ss in signs(self.rel_var_speed) {
                    out.push(ParameterSet {
                        sign_u: su,
                        sign_v: sv,
                        sign_speed: ss,
                        rel_var_u: self.rel_var_u,
                        rel_var_v: self.rel_var_v,
                        rel_var_speed: self.rel_var_speed,
                    });
                }
            }
        }
        out
    }

    /// Largest of the two current fractions.
    pub fn max_current_var(&self) -> f64 {
        self.rel_var_u.max(self.rel_var_v)
    }
}

/// One vertex of the operating domain.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ParameterSet {
    pub sign_u: i8,
    pub sign_v: i8,
    pub sign_speed: i8,
    pub rel_var_u: f64,
    pub rel_var_v: f64,
    pub rel_var_speed: f64,
}

impl ParameterSet {
    /// No perturbation at all.
    pub fn nominal() -> Self {
        Self::default()
    }

    fn scale_u(&self) -> f64 {
        1.0 + f64::from(self.sign_u) * self.rel_var_u
    }

    fn scale_v(&self) -> f64 {
        1.0 + f64::from(self.sign_v) * self.rel_var_v
    }

    pub fn perturb_flow(&self, s: FlowSample) -> FlowSample {
        FlowSample { u: s.u * self.scale_u(), v: s.v * self.scale_v() }
    }

    /// Partials scale with the component they differentiate.
    pub fn perturb_jacobian(&self, j: Jacobian) -> Jacobian {
        let (a, b) = (self.scale_u(), self.scale_v());
        Jacobian { du_dx: j.du_dx * a, du_dy: j.du_dy * a, dv_dx: j.dv_dx * b, dv_dy: j.dv_dy * b }
    }

    pub fn perturb_speed(&self, v_veh_bf: f64) -> Result<f64> {
        let s = v_veh_bf * (1.0 + f64::from(self.sign_speed) * self.rel_var_speed);
        if s > 0.0 {
            Ok(s)
        } else {
            Err(Error::NonPositiveSpeed(s))
        }
    }
}
