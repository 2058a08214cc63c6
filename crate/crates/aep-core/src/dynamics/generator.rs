//! Exact application of the generator to cylinder functions, and the
//! instantaneous currents. Test machinery: everything here enumerates moves
//! explicitly and is meant for small lattices.

use super::rates::{glauber_density, jump_rate};
use super::simulate::{AngleKind, ModelParams};
use crate::lattice::{Configuration, Direction, TWO_PI, ALL_DIRECTIONS};
use std::f64::consts::PI;

pub const DEFAULT_QUADRATURE: usize = 4096;

/// `(N^2 L + N L^WA) f`: sum over all licit exchanges weighted by the full
/// displacement rates.
pub fn apply_exchange_part(
    f: &dyn Fn(&Configuration) -> f64,
    config: &Configuration,
    params: &ModelParams,
) -> f64 {
    let geom = config.geometry();
    let base = f(config);
    let mut acc = 0.0;
    for x in geom.iter_sites() {
        if !config.is_occupied(x) {
            continue;
        }
        for &d in &ALL_DIRECTIONS {
            let y = geom.neighbor(x, d);
            if config.is_occupied(y) {
                continue;
            }
            let rate = jump_rate(config, x, d, params.lambda).expect("occupied source");
            if rate != 0.0 {
                acc += rate * (f(&config.swapped(x, y)) - base);
            }
        }
    }
    acc
}

/// `L^G f` by periodic trapezoid quadrature with `q` nodes (continuum), or
/// the exact two-atom sum (two-type restriction).
pub fn apply_glauber_part(
    f: &dyn Fn(&Configuration) -> f64,
    config: &Configuration,
    params: &ModelParams,
    q: usize,
) -> f64 {
    let base = f(config);
    let mut acc = 0.0;
    for x in config.geometry().iter_sites() {
        if !config.is_occupied(x) {
            continue;
        }
        match params.kind {
            AngleKind::Continuum => {
                let mut site_acc = 0.0;
                for j in 0..q {
                    let theta = TWO_PI * j as f64 / q as f64;
                    let c = glauber_density(config, x, params.beta, theta).unwrap();
                    site_acc += c * (f(&config.with_angle(x, theta).unwrap()) - base);
                }
                acc += site_acc * TWO_PI / q as f64;
            }
            AngleKind::TwoType => {
                let up = super::rates::two_type_up_probability(config, x, params.beta);
                acc += up * (f(&config.with_angle(x, 0.0).unwrap()) - base)
                    + (1.0 - up) * (f(&config.with_angle(x, PI).unwrap()) - base);
            }
        }
    }
    acc
}

/// The full accelerated generator `L_N f = N^2 (L + L^WA / N) f + L^G f`.
pub fn apply_generator(
    f: &dyn Fn(&Configuration) -> f64,
    config: &Configuration,
    params: &ModelParams,
    q: usize,
) -> f64 {
    apply_exchange_part(f, config, params) + apply_glauber_part(f, config, params, q)
}

/// Symmetric current with intensity `omega` across the edge `(x, x + e_i)`:
/// `eta^w_x (1 - eta_{x+e_i}) - eta^w_{x+e_i} (1 - eta_x)`.
pub fn current_sym(
    config: &Configuration,
    x: usize,
    axis: usize,
    omega: &dyn Fn(f64) -> f64,
) -> f64 {
    let d = if axis == 0 { Direction::XPlus } else { Direction::YPlus };
    let y = config.geometry().neighbor(x, d);
    let (ex, ey) = (config.is_occupied(x), config.is_occupied(y));
    let wx = config.weighted_occupancy(x, omega);
    let wy = config.weighted_occupancy(y, omega);
    wx * (1.0 - ey as u8 as f64) - wy * (1.0 - ex as u8 as f64)
}

/// Weakly asymmetric current with intensity `omega`:
/// `eta^{w li}_x (1 - eta_{x+e_i}) + eta^{w li}_{x+e_i} (1 - eta_x)` with
/// `l_1 = lambda cos`, `l_2 = lambda sin`.
pub fn current_asym(
    config: &Configuration,
    x: usize,
    axis: usize,
    omega: &dyn Fn(f64) -> f64,
    lambda: f64,
) -> f64 {
    let d = if axis == 0 { Direction::XPlus } else { Direction::YPlus };
    let y = config.geometry().neighbor(x, d);
    let li = |t: f64| {
        if axis == 0 {
            lambda * t.cos()
        } else {
            lambda * t.sin()
        }
    };
    let (ex, ey) = (config.is_occupied(x), config.is_occupied(y));
    let wx = config.weighted_occupancy(x, |t| omega(t) * li(t));
    let wy = config.weighted_occupancy(y, |t| omega(t) * li(t));
    wx * (1.0 - ey as u8 as f64) + wy * (1.0 - ex as u8 as f64)
}

/// Alignment current `gamma^w` at `x`:
/// `eta_x int c_{x,beta}(theta, eta)(w(theta) - w(theta_x)) dtheta`.
pub fn alignment_rate(
    config: &Configuration,
    x: usize,
    omega: &dyn Fn(f64) -> f64,
    beta: f64,
    q: usize,
) -> f64 {
    if !config.is_occupied(x) {
        return 0.0;
    }
    let w0 = omega(config.angle_at(x));
    let mut acc = 0.0;
    for j in 0..q {
        let theta = TWO_PI * j as f64 / q as f64;
        acc += glauber_density(config, x, beta, theta).unwrap() * (omega(theta) - w0);
    }
    acc * TWO_PI / q as f64
}
