//! Independent reference computations for the integration tests. Nothing
//! here calls into the library's numerics; states are plain tuples.

#![allow(dead_code)]

use rand::Rng;

pub const GAMMA: f64 = 1.4;

/// (rho, u, p)
pub type Prim = (f64, f64, f64);

pub fn sound(rho: f64, p: f64) -> f64 {
    (GAMMA * p / rho).sqrt()
}

pub fn conserved((rho, u, p): Prim) -> [f64; 3] {
    [rho, rho * u, p / (GAMMA - 1.0) + 0.5 * rho * u * u]
}

pub fn flux((rho, u, p): Prim) -> [f64; 3] {
    let e = p / (GAMMA - 1.0) + 0.5 * rho * u * u;
    [rho * u, rho * u * u + p, u * (e + p)]
}

/// Velocity change across a single wave connecting a state of pressure
/// `pk` and density `rk` to pressure `p`.
pub fn velocity_jump(p: f64, rk: f64, pk: f64) -> f64 {
    if p > pk {
        let a = 2.0 / ((GAMMA + 1.0) * rk);
        let b = pk * (GAMMA - 1.0) / (GAMMA + 1.0);
        (p - pk) * (a / (p + b)).sqrt()
    } else {
        let ck = sound(rk, pk);
        let expo = (GAMMA - 1.0) / (2.0 * GAMMA);
        2.0 * ck / (GAMMA - 1.0) * ((p / pk).powf(expo) - 1.0)
    }
}

/// Star pressure and velocity by bisection on the pressure function.
pub fn bisect_star(l: Prim, r: Prim) -> (f64, f64) {
    let g = |p: f64| velocity_jump(p, l.0, l.2) + velocity_jump(p, r.0, r.2) + (r.1 - l.1);
    let mut lo = 0.0f64;
    let mut hi = l.2.max(r.2);
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    let u = 0.5 * (l.1 + r.1) + 0.5 * (velocity_jump(p, r.0, r.2) - velocity_jump(p, l.0, l.2));
    (p, u)
}

pub fn generates_vacuum(l: Prim, r: Prim) -> bool {
    2.0 * (sound(l.0, l.2) + sound(r.0, r.2)) / (GAMMA - 1.0) <= r.1 - l.1
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Random Riemann data that does not generate vacuum.
pub fn random_admissible<R: Rng>(rng: &mut R) -> (Prim, Prim) {
    loop {
        let l = (
            log_uniform(rng, 0.05, 20.0),
            rng.gen_range(-5.0..5.0),
            log_uniform(rng, 0.01, 1000.0),
        );
        let r = (
            log_uniform(rng, 0.05, 20.0),
            rng.gen_range(-5.0..5.0),
            log_uniform(rng, 0.01, 1000.0),
        );
        if !generates_vacuum(l, r) {
            return (l, r);
        }
    }
}

/// Largest component of `|F(b) - F(a) - s (W(b) - W(a))|` relative to the
/// flux scale.
pub fn rankine_hugoniot_residual(a: Prim, b: Prim, s: f64) -> f64 {
    let (fa, fb) = (flux(a), flux(b));
    let (wa, wb) = (conserved(a), conserved(b));
    let mut worst = 0.0f64;
    for k in 0..3 {
        let scale = fa[k].abs().max(fb[k].abs()).max((s * wa[k]).abs()).max((s * wb[k]).abs()).max(1e-300);
        worst = worst.max((fb[k] - fa[k] - s * (wb[k] - wa[k])).abs() / scale);
    }
    worst
}

/// Total variation of a sequence.
pub fn total_variation(v: &[f64]) -> f64 {
    v.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Relative difference with a floor on the scale.
pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}
