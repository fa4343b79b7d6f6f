//! Special functions used by the heat kernel.

/// `erf`, `erfc` from libm.
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Surface area of the unit sphere `S^{n-1}` in `R^n`.
pub fn sphere_area(n: u32) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / libm::tgamma(h)
}

/// Volume of the unit ball in `R^n`.
pub fn ball_volume(n: u32) -> f64 {
    sphere_area(n) / n as f64
}

/// `e^{-z} z^{-ν} I_ν(z)` for `ν ≥ -1/2` and `z ≥ 0`.
///
/// Power series for moderate `z`, Hankel asymptotics beyond.
pub fn scaled_bessel_i_ratio(nu: f64, z: f64) -> f64 {
    if z < 0.0 {
        return f64::NAN;
    }
    if z <= 25.0 {
        let q = 0.25 * z * z;
        let mut term = 2f64.powf(-nu) / libm::tgamma(nu + 1.0);
        let mut sum = term;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= q / (k * (k + nu));
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        return sum * (-z).exp();
    }
    let mu = 4.0 * nu * nu;
    let mut term: f64 = 1.0;
    let mut sum: f64 = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let j = (2 * k - 1) as f64;
        term *= -(mu - j * j) / (k as f64 * 8.0 * z);
        if term.abs() > prev || term.abs() < 1e-17 * sum.abs() {
            break;
        }
        sum += term;
        prev = term.abs();
    }
    sum / (2.0 * std::f64::consts::PI * z).sqrt() * z.powf(-nu)
}
