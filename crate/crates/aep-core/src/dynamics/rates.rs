//! Jump and alignment rates of the process.

use crate::error::{Error, Result};
use crate::lattice::{Configuration, Direction, TWO_PI, ALL_DIRECTIONS};
use rand::Rng;
use std::f64::consts::PI;

/// Modified Bessel function of the first kind, order zero. Power series for
/// small arguments, asymptotic expansion beyond; relative accuracy ~1e-14
/// across the split.
pub fn bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 18.0 {
        // all-positive series, no cancellation
        let q = x * x / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..200 {
            term *= q / ((k * k) as f64);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        sum
    } else {
        // I0(x) ~ e^x / sqrt(2 pi x) * sum_k prod_{j<=k}(2j-1)^2 / (k! (8x)^k)
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..30u32 {
            let odd = (2 * k - 1) as f64;
            term *= odd * odd / (k as f64 * 8.0 * x);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        x.exp() / (TWO_PI * x).sqrt() * sum
    }
}

/// Resultant vector of the occupied neighbors of `x`:
/// `sum_y eta_y (cos theta_y, sin theta_y)` in polar form `(R, phi)`.
pub fn resultant(config: &Configuration, x: usize) -> (f64, f64) {
    let geom = config.geometry();
    let mut cx = 0.0;
    let mut cy = 0.0;
    for &d in &ALL_DIRECTIONS {
        let y = geom.neighbor(x, d);
        if config.is_occupied(y) {
            let t = config.angle_at(y);
            cx += t.cos();
            cy += t.sin();
        }
    }
    let r = cx.hypot(cy);
    let phi = if r > 0.0 { cy.atan2(cx) } else { 0.0 };
    (r, phi)
}

/// The alignment density `c_{x,beta}(theta, eta)`. Normalized to integrate to
/// one over the circle: the exponent reduces to `beta R cos(theta - phi)`,
/// whose normalizer is `2 pi I0(beta R)`.
pub fn glauber_density(config: &Configuration, x: usize, beta: f64, theta: f64) -> Result<f64> {
    if !config.is_occupied(x) {
        return Err(Error::EmptySite(x));
    }
    let (r, phi) = resultant(config, x);
    let kappa = beta * r;
    Ok((kappa * (theta - phi).cos()).exp() / (TWO_PI * bessel_i0(kappa)))
}

/// Samples the von Mises law with the given location and concentration
/// (Best–Fisher rejection; exact).
pub fn sample_von_mises(location: f64, kappa: f64, rng: &mut impl Rng) -> f64 {
    if kappa < 1e-9 {
        return rng.gen::<f64>() * TWO_PI;
    }
    let tau = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let rho = (tau - (2.0 * tau).sqrt()) / (2.0 * kappa);
    let r = (1.0 + rho * rho) / (2.0 * rho);
    loop {
        let u1: f64 = rng.gen();
        let u2: f64 = rng.gen();
        let z = (PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = kappa * (r - f);
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let u3: f64 = rng.gen();
            let angle = if u3 > 0.5 { f.acos() } else { -f.acos() };
            let t = (location + angle) % TWO_PI;
            return if t < 0.0 { t + TWO_PI } else { t };
        }
    }
}

/// Samples a new angle for the particle at `x` from `c_{x,beta}(., eta)`.
pub fn sample_glauber_angle(config: &Configuration, x: usize, beta: f64, rng: &mut impl Rng) -> f64 {
    let (r, phi) = resultant(config, x);
    sample_von_mises(phi, beta * r, rng)
}

/// Alignment probabilities of the two-type restriction: the density
/// renormalized over the atoms {0, pi}. Returns the probability of angle 0.
pub fn two_type_up_probability(config: &Configuration, x: usize, beta: f64) -> f64 {
    let geom = config.geometry();
    let mut s = 0.0;
    for &d in &ALL_DIRECTIONS {
        let y = geom.neighbor(x, d);
        if config.is_occupied(y) {
            s += config.angle_at(y).cos(); // +1 or -1 for two-type states
        }
    }
    let (a, b) = ((beta * s).exp(), (-beta * s).exp());
    a / (a + b)
}

/// Drift component along axis `i`: `lambda_1 = lambda cos(theta)`,
/// `lambda_2 = lambda sin(theta)`.
pub fn drift_component(lambda: f64, theta: f64, axis: usize) -> f64 {
    match axis {
        0 => lambda * theta.cos(),
        _ => lambda * theta.sin(),
    }
}

/// Jump rate of the particle at `x` in direction `d`:
/// `N^2 (1 + delta lambda_i(theta_x) / N)` when the target is empty, zero
/// when the exclusion rule cancels the jump.
pub fn jump_rate(config: &Configuration, x: usize, d: Direction, lambda: f64) -> Result<f64> {
    if !config.is_occupied(x) {
        return Err(Error::EmptySite(x));
    }
    let geom = config.geometry();
    if config.is_occupied(geom.neighbor(x, d)) {
        return Ok(0.0);
    }
    let n = geom.side() as f64;
    let li = drift_component(lambda, config.angle_at(x), d.axis());
    Ok(n * n * (1.0 + d.sign() * li / n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::TorusGeometry;
    use crate::rng::substream;

    /// Quadrature oracle: I0(x) = (1/pi) int_0^pi exp(x cos t) dt.
    fn i0_oracle(x: f64) -> f64 {
        let q = 1 << 16;
        let mut acc = 0.0;
        for j in 0..=q {
            let w = if j == 0 || j == q { 0.5 } else { 1.0 };
            acc += w * (x * (PI * j as f64 / q as f64).cos()).exp();
        }
        acc / q as f64
    }

    #[test]
    fn bessel_matches_quadrature_oracle() {
        for &x in &[0.0, 0.3, 1.0, 2.5, 5.0, 10.0, 17.9, 18.1, 25.0, 60.0] {
            let got = bessel_i0(x);
            let want = i0_oracle(x);
            assert!(
                ((got - want) / want).abs() < 1e-12,
                "I0({x}): {got} vs {want}"
            );
        }
        assert_eq!(bessel_i0(0.0), 1.0);
    }

    fn config_with(n: usize, sites: &[(usize, f64)]) -> Configuration {
        let mut c = Configuration::empty(TorusGeometry::new(n));
        for &(s, t) in sites {
            c.occupy(s, t);
        }
        c
    }

    #[test]
    fn isolated_particle_has_uniform_density() {
        let c = config_with(5, &[(12, 1.0)]);
        for k in 0..10 {
            let t = TWO_PI * k as f64 / 10.0;
            assert!((glauber_density(&c, 12, 3.0, t).unwrap() - 1.0 / TWO_PI).abs() < 1e-15);
        }
    }

    #[test]
    fn density_normalizes_to_one() {
        // one neighbor at angle 0 -> von Mises(0, beta); trapezoid at 2^14 nodes
        let geom = TorusGeometry::new(5);
        let mut c = Configuration::empty(geom);
        c.occupy(geom.index(2, 2), 0.3);
        c.occupy(geom.index(3, 2), 0.0);
        let x = geom.index(2, 2);
        for &beta in &[0.0, 0.7, 2.0, 6.0] {
            let q = 1 << 14;
            let mut acc = 0.0;
            for j in 0..q {
                acc += glauber_density(&c, x, beta, TWO_PI * j as f64 / q as f64).unwrap();
            }
            acc *= TWO_PI / q as f64;
            assert!((acc - 1.0).abs() < 1e-10, "beta={beta}: integral {acc}");
        }
    }

    #[test]
    fn density_peaks_at_resultant_direction() {
        let geom = TorusGeometry::new(5);
        let mut c = Configuration::empty(geom);
        let x = geom.index(2, 2);
        c.occupy(x, 0.0);
        c.occupy(geom.index(1, 2), 0.4);
        c.occupy(geom.index(2, 3), 1.9);
        c.occupy(geom.index(2, 1), 2.4);
        let (r, phi) = resultant(&c, x);
        assert!(r > 0.0);
        // grid argmax oracle
        let q = 1 << 14;
        let (mut best_t, mut best_v) = (0.0, f64::MIN);
        for j in 0..q {
            let t = TWO_PI * j as f64 / q as f64;
            let v = glauber_density(&c, x, 1.5, t).unwrap();
            if v > best_v {
                best_v = v;
                best_t = t;
            }
        }
        let phi = if phi < 0.0 { phi + TWO_PI } else { phi };
        assert!((best_t - phi).abs() < TWO_PI / q as f64 * 2.0);
    }

    #[test]
    fn beta_zero_sampler_is_uniform() {
        // Kolmogorov-Smirnov on 1e5 draws
        let c = config_with(5, &[(0, 0.5), (1, 1.0)]);
        let mut rng = substream(21, "vm");
        let n = 100_000;
        let mut draws: Vec<f64> = (0..n)
            .map(|_| sample_glauber_angle(&c, 0, 0.0, &mut rng))
            .collect();
        draws.sort_by(f64::total_cmp);
        let ks = draws
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let f = t / TWO_PI;
                (f - i as f64 / n as f64).abs().max((i + 1) as f64 / n as f64 - f)
            })
            .fold(0.0f64, f64::max);
        // 1% critical value: 1.63 / sqrt(n)
        assert!(ks < 1.63 / (n as f64).sqrt(), "KS = {ks}");
    }

    #[test]
    fn aligned_neighbors_give_centered_samples() {
        // all 4 neighbors at pi/3, beta = 2: circular mean within 3 sigma
        let geom = TorusGeometry::new(5);
        let mut c = Configuration::empty(geom);
        let x = geom.index(2, 2);
        c.occupy(x, 0.0);
        for &d in &ALL_DIRECTIONS {
            c.occupy(geom.neighbor(x, d), PI / 3.0);
        }
        let mut rng = substream(22, "vm");
        let n = 100_000;
        let (mut sx, mut sy) = (0.0, 0.0);
        for _ in 0..n {
            let t = sample_glauber_angle(&c, x, 2.0, &mut rng);
            sx += t.cos();
            sy += t.sin();
        }
        let mean = sy.atan2(sx);
        // dispersion of the circular mean: sigma ~ 1/(sqrt(n) * sqrt(kappa R1))
        // with kappa = 8; use a generous direct bound via sample variance
        let kappa = 8.0f64;
        let r1 = bessel_i0_derivative_ratio(kappa);
        let sigma = 1.0 / ((n as f64).sqrt() * (kappa * r1).sqrt());
        assert!((mean - PI / 3.0).abs() < 3.0 * sigma, "mean {mean}");
    }

    /// I1/I0 via quadrature (mean resultant length of the von Mises law).
    fn bessel_i0_derivative_ratio(kappa: f64) -> f64 {
        let q = 1 << 14;
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..q {
            let t = TWO_PI * j as f64 / q as f64;
            let w = (kappa * t.cos()).exp();
            num += w * t.cos();
            den += w;
        }
        num / den
    }

    #[test]
    fn sampler_matches_density_histogram() {
        // chi^2 between 1e5 samples and the binned density, 1% level
        let geom = TorusGeometry::new(5);
        let mut c = Configuration::empty(geom);
        let x = geom.index(2, 2);
        c.occupy(x, 0.0);
        c.occupy(geom.index(1, 2), 0.4);
        c.occupy(geom.index(2, 3), 5.1);
        c.occupy(geom.index(3, 2), 2.2);
        let beta = 1.7;
        let m = 24;
        let mut rng = substream(23, "vm");
        let n = 100_000;
        let mut bins = vec![0usize; m];
        for _ in 0..n {
            let t = sample_glauber_angle(&c, x, beta, &mut rng);
            bins[((t / TWO_PI * m as f64) as usize).min(m - 1)] += 1;
        }
        // expected bin masses by fine quadrature of the density
        let sub = 64;
        let mut chi2 = 0.0;
        for (b, &obs) in bins.iter().enumerate() {
            let mut mass = 0.0;
            for j in 0..sub {
                let t = TWO_PI * (b as f64 + (j as f64 + 0.5) / sub as f64) / m as f64;
                mass += glauber_density(&c, x, beta, t).unwrap();
            }
            mass *= TWO_PI / (m * sub) as f64;
            let e = mass * n as f64;
            chi2 += (obs as f64 - e).powi(2) / e;
        }
        // 23 dof, 1% critical value 41.64
        assert!(chi2 < 41.64, "chi2 = {chi2}");
    }

    #[test]
    fn two_type_probability_reduces_to_spin_count() {
        let geom = TorusGeometry::new(4);
        let mut c = Configuration::empty(geom);
        let x = geom.index(1, 1);
        c.occupy(x, 0.0);
        c.occupy(geom.index(0, 1), 0.0);
        c.occupy(geom.index(2, 1), 0.0);
        c.occupy(geom.index(1, 0), PI);
        // s = 2 - 1 = 1
        let beta = 0.8f64;
        let want = beta.exp() / (beta.exp() + (-beta).exp());
        assert!((two_type_up_probability(&c, x, beta) - want).abs() < 1e-15);
        assert_eq!(two_type_up_probability(&c, x, 0.0), 0.5);
    }

    #[test]
    fn jump_rates_follow_the_rate_table() {
        let geom = TorusGeometry::new(8);
        let n2 = 64.0;
        let mut c = Configuration::empty(geom);
        let x = geom.index(3, 3);
        c.occupy(x, 0.0);
        let lam = 2.0;
        // theta = 0, +e1, empty target -> N^2 (1 + lambda/N)
        let r = jump_rate(&c, x, Direction::XPlus, lam).unwrap();
        assert!((r - n2 * (1.0 + lam / 8.0)).abs() < 1e-12);
        let r = jump_rate(&c, x, Direction::XMinus, lam).unwrap();
        assert!((r - n2 * (1.0 - lam / 8.0)).abs() < 1e-12);
        // theta = pi/2: cos = 0, both x-rates are N^2
        c.set_angle(x, PI / 2.0).unwrap();
        for d in [Direction::XPlus, Direction::XMinus] {
            assert!((jump_rate(&c, x, d, lam).unwrap() - n2).abs() < 1e-9);
        }
        // occupied target cancels the jump
        c.occupy(geom.index(4, 3), 1.0);
        assert_eq!(jump_rate(&c, x, Direction::XPlus, lam).unwrap(), 0.0);
        // empty source rejected
        assert!(jump_rate(&c, geom.index(0, 0), Direction::XPlus, lam).is_err());
    }

    #[test]
    fn symmetric_rates_are_exchange_symmetric() {
        // lambda = 0: rate(x -> y) = rate(y -> x) whenever both moves are licit
        let geom = TorusGeometry::new(6);
        let mut rng = substream(24, "rates");
        for _ in 0..50 {
            let mut c = Configuration::empty(geom);
            for s in geom.iter_sites() {
                if rng.gen::<f64>() < 0.5 {
                    c.occupy(s, rng.gen::<f64>() * TWO_PI);
                }
            }
            for s in geom.iter_sites() {
                for &d in &ALL_DIRECTIONS {
                    let y = geom.neighbor(s, d);
                    if c.is_occupied(s) && !c.is_occupied(y) {
                        let fwd = jump_rate(&c, s, d, 0.0).unwrap();
                        let back = jump_rate(&c.swapped(s, y), y, d.opposite(), 0.0).unwrap();
                        assert_eq!(fwd, back);
                    }
                }
            }
        }
    }
}
