//! Current models: the analytic meandering jet and gridded samples.
//!
//! The jet is defined through the stream function
//!
//! ```text
//! phi(x, y, t) = 1 - tanh((y - B(t) cos(k(x - c t))) / sqrt(1 + k^2 B(t)^2 sin^2(k(x - c t))))
//! B(t)         = B0 + eps cos(omega t + theta)
//! u = -dphi/dy,  v = dphi/dx
//! ```
//!
//! Every velocity evaluation through [`FlowProvider::flow_at`] is tallied as
//! one current model call (CMC).

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::counters::CallCounters;
use crate::error::{Error, Result};
use crate::geom::{Point, Region};

/// Safety factor applied on top of the sampled maximum current speed.
pub const SPEED_BOUND_SAFETY: f64 = 1.05;

/// Default finite-difference step for [`FlowProvider::flow_jacobian`].
pub const DEFAULT_JACOBIAN_STEP: f64 = 1e-4;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FlowSample {
    /// Eastward component.
    pub u: f64,
    /// Northward component.
    pub v: f64,
}

impl FlowSample {
    pub const ZERO: FlowSample = FlowSample { u: 0.0, v: 0.0 };

    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn speed(&self) -> f64 {
        libm::hypot(self.u, self.v)
    }

    pub fn as_point(&self) -> Point {
        Point::new(self.u, self.v)
    }
}

/// Spatial partial derivatives of the current.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jacobian {
    pub du_dx: f64,
    pub du_dy: f64,
    pub dv_dx: f64,
    pub dv_dy: f64,
}

impl Jacobian {
    pub fn divergence(&self) -> f64 {
        self.du_dx + self.dv_dy
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JetParams {
    pub b0: f64,
    pub eps: f64,
    pub omega: f64,
    pub theta: f64,
    pub k: f64,
    pub c: f64,
}

impl Default for JetParams {
    fn default() -> Self {
        Self { b0: 1.2, eps: 0.3, omega: 0.4, theta: FRAC_PI_2, k: 0.84, c: 0.12 }
    }
}

impl JetParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.b0, self.eps, self.omega, self.theta, self.k, self.c];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("jet parameters must be finite"));
        }
        if self.k == 0.0 {
            return Err(Error::InvalidConfig("jet wavenumber k must be non-zero"));
        }
        Ok(())
    }
}

/// Meander amplitude `B(t)`.
pub fn meander_amplitude(t: f64, p: &JetParams) -> f64 {
    p.b0 + p.eps * libm::cos(p.omega * t + p.theta)
}

/// Stream function of the meandering jet.
pub fn stream_value(x: f64, y: f64, t: f64, p: &JetParams) -> f64 {
    let b = meander_amplitude(t, p);
    let phase = p.k * (x - p.c * t);
    let s = libm::sin(phase);
    let denom = libm::sqrt(1.0 + p.k * p.k * b * b * s * s);
    1.0 - libm::tanh((y - b * libm::cos(phase)) / denom)
}

/// Closed-form velocity of the jet.
///
/// With `xi = k(x - ct)`, `D = sqrt(1 + k^2 B^2 sin^2 xi)`, `N = y - B cos xi`
/// and `eta = N / D`:
///
/// ```text
/// u = sech^2(eta) / D
/// v = -sech^2(eta) * (k B sin xi / D - N k^3 B^2 sin xi cos xi / D^3)
/// ```
pub fn jet_velocity(x: f64, y: f64, t: f64, p: &JetParams) -> FlowSample {
    let b = meander_amplitude(t, p);
    let xi = p.k * (x - p.c * t);
    let (s, c) = (libm::sin(xi), libm::cos(xi));
    let d2 = 1.0 + p.k * p.k * b * b * s * s;
    let d = libm::sqrt(d2);
    let n = y - b * c;
    let eta = n / d;
    // 1/cosh^2 rather than 1 - tanh^2: no cancellation in the saturated tails.
    let ch = libm::cosh(eta);
    let sech2 = 1.0 / (ch * ch);
    let deta_dx = p.k * b * s / d - n * p.k * p.k * p.k * b * b * s * c / (d2 * d);
    FlowSample { u: sech2 / d, v: -sech2 * deta_dx }
}

/// Currents sampled on a regular-in-index (not necessarily uniform) lattice.
///
/// Arrays are stored flat in `[time][y][x]` order.
#[derive(Clone, Debug, PartialEq)]
pub struct GriddedField {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ts: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
}

impl GriddedField {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, ts: Vec<f64>, u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || ys.len() < 2 {
            return Err(Error::InvalidField("spatial axes need at least two samples"));
        }
        if ts.is_empty() {
            return Err(Error::InvalidField("time axis is empty"));
        }
        for axis in [&xs, &ys, &ts] {
            if axis.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidField("axis values must be finite"));
            }
            if axis.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidField("axes must be strictly increasing"));
            }
        }
        let len = xs.len() * ys.len() * ts.len();
        if u.len() != len || v.len() != len {
            return Err(Error::InvalidField("array sizes do not match the axes"));
        }
        if u.iter().chain(v.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidField("current values must be finite"));
        }
        Ok(Self { xs, ys, ts, u, v })
    }

    /// A field that holds `sample` everywhere on `region`, for all times.
    pub fn uniform(region: Region, sample: FlowSample) -> Result<Self> {
        let xs = alloc::vec![region.x_min, region.x_max];
        let ys = alloc::vec![region.y_min, region.y_max];
        Self::new(xs, ys, alloc::vec![0.0], alloc::vec![sample.u; 4], alloc::vec![sample.v; 4])
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn ts(&self) -> &[f64] {
        &self.ts
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn region(&self) -> Region {
        Region::new(self.xs[0], self.xs[self.xs.len() - 1], self.ys[0], self.ys[self.ys.len() - 1])
    }

    fn at(&self, k: usize, j: usize, i: usize) -> (f64, f64) {
        let idx = (k * self.ys.len() + j) * self.xs.len() + i;
        (self.u[idx], self.v[idx])
    }

    fn bilinear(&self, k: usize, (i, wx): (usize, f64), (j, wy): (usize, f64)) -> (f64, f64) {
        let (u00, v00) = self.at(k, j, i);
        let (u10, v10) = self.at(k, j, i + 1);
        let (u01, v01) = self.at(k, j + 1, i);
        let (u11, v11) = self.at(k, j + 1, i + 1);
        let u0 = lerp(u00, u10, wx);
        let u1 = lerp(u01, u11, wx);
        let v0 = lerp(v00, v10, wx);
        let v1 = lerp(v01, v11, wx);
        (lerp(u0, u1, wy), lerp(v0, v1, wy))
    }

    /// Bilinear in space, linear in time. Times outside the sampled span
    /// clamp to the nearest slice; positions outside are an error.
    pub fn interpolate(&self, x: f64, y: f64, t: f64) -> Result<FlowSample> {
        let (Some(cx), Some(cy)) = (cell(&self.xs, x), cell(&self.ys, y)) else {
            return Err(Error::OutOfDomain { x, y });
        };
        let nt = self.ts.len();
        let (u, v) = if nt == 1 || t <= self.ts[0] {
            self.bilinear(0, cx, cy)
        } else if t >= self.ts[nt - 1] {
            self.bilinear(nt - 1, cx, cy)
        } else {
            let (k, wt) = cell(&self.ts, t).expect("time within span");
            let (ua, va) = self.bilinear(k, cx, cy);
            let (ub, vb) = self.bilinear(k + 1, cx, cy);
            (lerp(ua, ub, wt), lerp(va, vb, wt))
        };
        Ok(FlowSample { u, v })
    }
}

fn lerp(a: f64, b: f64, w: f64) -> f64 {
    a + (b - a) * w
}

/// Lower cell index and fractional weight of `q` on a strictly increasing axis.
fn cell(axis: &[f64], q: f64) -> Option<(usize, f64)> {
    let n = axis.len();
    if !(q >= axis[0] && q <= axis[n - 1]) {
        return None;
    }
    let i = axis.partition_point(|&a| a <= q).saturating_sub(1).min(n - 2);
    Some((i, (q - axis[i]) / (axis[i + 1] - axis[i])))
}

/// Source of current vectors. Immutable and shareable between threads.
#[derive(Clone, Debug, PartialEq)]
pub enum FlowProvider {
    Jet(JetParams),
    Gridded(GriddedField),
}

impl FlowProvider {
    fn sample(&self, x: f64, y: f64, t: f64) -> Result<FlowSample> {
        if !(x.is_finite() && y.is_finite() && t.is_finite()) {
            return Err(Error::NonFinite);
        }
        match self {
            FlowProvider::Jet(p) => Ok(jet_velocity(x, y, t, p)),
            FlowProvider::Gridded(g) => g.interpolate(x, y, t),
        }
    }

    /// Current at `(x, y, t)`; counts one CMC.
    pub fn flow_at(&self, x: f64, y: f64, t: f64, counters: &CallCounters) -> Result<FlowSample> {
        counters.add_cmc(1);
        self.sample(x, y, t)
    }

    /// Central finite differences of [`flow_at`](Self::flow_at) with spacing
    /// `step`. Four samples give all four partials; counts four CMC.
    pub fn flow_jacobian(&self, x: f64, y: f64, t: f64, step: f64, counters: &CallCounters) -> Result<Jacobian> {
        let xp = self.flow_at(x + step, y, t, counters)?;
        let xm = self.flow_at(x - step, y, t, counters)?;
        let yp = self.flow_at(x, y + step, t, counters)?;
        let ym = self.flow_at(x, y - step, t, counters)?;
        let h2 = 2.0 * step;
        Ok(Jacobian {
            du_dx: (xp.u - xm.u) / h2,
            du_dy: (yp.u - ym.u) / h2,
            dv_dx: (xp.v - xm.v) / h2,
            dv_dy: (yp.v - ym.v) / h2,
        })
    }
}

/// Sampling density for [`max_speed_bound`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub nx: usize,
    pub ny: usize,
    pub nt: usize,
}

impl Default for Lattice {
    fn default() -> Self {
        Self { nx: 64, ny: 64, nt: 16 }
    }
}

/// `i`-th of `n` evenly spaced values over `[lo, hi]`, endpoints included.
pub fn lattice_coord(lo: f64, hi: f64, i: usize, n: usize) -> f64 {
    if n <= 1 {
        lo
    } else {
        lo + (hi - lo) * (i as f64) / ((n - 1) as f64)
    }
}

/// Upper bound on the current speed over `region` and `[t_start, t_end]`:
/// the lattice maximum of `|(u, v)|` times [`SPEED_BOUND_SAFETY`].
pub fn max_speed_bound(
    provider: &FlowProvider,
    region: Region,
    (t_start, t_end): (f64, f64),
    lattice: Lattice,
    counters: &CallCounters,
) -> Result<f64> {
    if region.is_empty() {
        return Err(Error::InvalidConfig("speed bound region is empty"));
    }
    let mut max = 0.0f64;
    for it in 0..lattice.nt {
        let t = lattice_coord(t_start, t_end, it, lattice.nt);
        for iy in 0..lattice.ny {
            let y = lattice_coord(region.y_min, region.y_max, iy, lattice.ny);
            for ix in 0..lattice.nx {
                let x = lattice_coord(region.x_min, region.x_max, ix, lattice.nx);
                max = max.max(provider.flow_at(x, y, t, counters)?.speed());
            }
        }
    }
    Ok(max * SPEED_BOUND_SAFETY)
}
