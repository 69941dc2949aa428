//! Checks the jet velocity and its finite-difference Jacobian against exact
//! derivatives of the stream function computed with hyper-dual numbers.

use std::ops::{Add, Div, Mul, Sub};

use flowpath_core::flowfield::{jet_velocity, meander_amplitude, stream_value, DEFAULT_JACOBIAN_STEP};
use flowpath_core::{CallCounters, FlowProvider, JetParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `a + b e1 + c e2 + d e1 e2` with `e1^2 = e2^2 = 0`.
#[derive(Clone, Copy, Debug)]
struct HyperDual {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl HyperDual {
    fn cst(a: f64) -> Self {
        Self { a, b: 0.0, c: 0.0, d: 0.0 }
    }

    fn chain(self, g: f64, g1: f64, g2: f64) -> Self {
        Self { a: g, b: g1 * self.b, c: g1 * self.c, d: g1 * self.d + g2 * self.b * self.c }
    }

    fn sin(self) -> Self {
        self.chain(self.a.sin(), self.a.cos(), -self.a.sin())
    }

    fn cos(self) -> Self {
        self.chain(self.a.cos(), -self.a.sin(), -self.a.cos())
    }

    fn sqrt(self) -> Self {
        let s = self.a.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.a))
    }

    fn tanh(self) -> Self {
        let t = self.a.tanh();
        let s2 = 1.0 - t * t;
        self.chain(t, s2, -2.0 * t * s2)
    }

    fn recip(self) -> Self {
        let r = 1.0 / self.a;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
}

impl Add for HyperDual {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self { a: self.a + o.a, b: self.b + o.b, c: self.c + o.c, d: self.d + o.d }
    }
}

impl Sub for HyperDual {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self { a: self.a - o.a, b: self.b - o.b, c: self.c - o.c, d: self.d - o.d }
    }
}

impl Mul for HyperDual {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self {
            a: self.a * o.a,
            b: self.a * o.b + self.b * o.a,
            c: self.a * o.c + self.c * o.a,
            d: self.a * o.d + self.b * o.c + self.c * o.b + self.d * o.a,
        }
    }
}

impl Div for HyperDual {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

fn stream(x: HyperDual, y: HyperDual, t: f64, p: &JetParams) -> HyperDual {
    let b = HyperDual::cst(meander_amplitude(t, p));
    let k = HyperDual::cst(p.k);
    let phase = k * (x - HyperDual::cst(p.c * t));
    let s = phase.sin();
    let denom = (HyperDual::cst(1.0) + k * k * b * b * s * s).sqrt();
    HyperDual::cst(1.0) - ((y - b * phase.cos()) / denom).tanh()
}

/// (phi_x, phi_y, phi_xx, phi_xy, phi_yy)
fn stream_derivatives(x: f64, y: f64, t: f64, p: &JetParams) -> (f64, f64, f64, f64, f64) {
    let hd = |a, b, c| HyperDual { a, b, c, d: 0.0 };
    let mixed = stream(hd(x, 1.0, 0.0), hd(y, 0.0, 1.0), t, p);
    let xx = stream(hd(x, 1.0, 1.0), HyperDual::cst(y), t, p);
    let yy = stream(HyperDual::cst(x), hd(y, 1.0, 1.0), t, p);
    (mixed.b, mixed.c, xx.d, mixed.d, yy.d)
}

fn random_point(rng: &mut ChaCha8Rng, p: &JetParams) -> (f64, f64, f64) {
    let x = rng.gen_range(0.0..12.0);
    let t = rng.gen_range(0.0..50.0);
    // stay within the active band around the jet axis
    let axis = meander_amplitude(t, p) * (p.k * (x - p.c * t)).cos();
    (x, axis + rng.gen_range(-2.0..2.0), t)
}

#[test]
fn hyper_dual_stream_value_matches_library() {
    let p = JetParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let (x, y, t) = random_point(&mut rng, &p);
        let v = stream(HyperDual::cst(x), HyperDual::cst(y), t, &p).a;
        assert!((v - stream_value(x, y, t, &p)).abs() < 1e-14);
    }
}

#[test]
fn closed_form_velocity_matches_exact_stream_derivatives() {
    let p = JetParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let (x, y, t) = random_point(&mut rng, &p);
        let (phx, phy, ..) = stream_derivatives(x, y, t, &p);
        let s = jet_velocity(x, y, t, &p);
        let scale = phx.hypot(phy).max(1e-300);
        assert!((s.u + phy).abs() / scale < 1e-12, "u at ({x},{y},{t})");
        assert!((s.v - phx).abs() / scale < 1e-12, "v at ({x},{y},{t})");
    }
}

#[test]
fn finite_difference_jacobian_matches_exact_second_derivatives() {
    let p = JetParams::default();
    let prov = FlowProvider::Jet(p);
    let counters = CallCounters::new();
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (x, y, t) = random_point(&mut rng, &p);
        let (_, _, pxx, pxy, pyy) = stream_derivatives(x, y, t, &p);
        let exact = [-pxy, -pyy, pxx, pxy];
        let j = prov.flow_jacobian(x, y, t, DEFAULT_JACOBIAN_STEP, &counters).unwrap();
        let fd = [j.du_dx, j.du_dy, j.dv_dx, j.dv_dy];
        let scale = exact.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-6);
        for (a, b) in fd.iter().zip(exact) {
            worst = worst.max((a - b).abs() / scale);
        }
    }
    assert!(worst < 1e-5, "worst relative error {worst}");
    assert_eq!(counters.snapshot().cmc, 400);
}

#[test]
fn jet_is_divergence_free() {
    let p = JetParams::default();
    let prov = FlowProvider::Jet(p);
    let counters = CallCounters::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let x = rng.gen_range(0.0..12.0);
        let y = rng.gen_range(-4.0..4.0);
        let t = rng.gen_range(0.0..50.0);
        let j = prov.flow_jacobian(x, y, t, 1e-4, &counters).unwrap();
        assert!(j.divergence().abs() < 1e-6, "divergence {} at ({x},{y},{t})", j.divergence());
    }
}

#[test]
fn flow_is_a_pure_function() {
    let prov = FlowProvider::Jet(JetParams::default());
    let c = CallCounters::new();
    let a = prov.flow_at(3.1, 0.7, 9.2, &c).unwrap();
    let b = prov.flow_at(3.1, 0.7, 9.2, &c).unwrap();
    assert_eq!(a, b);
    assert_eq!(c.snapshot().cmc, 2);
}
