//! Special functions used by the distance laws and bound evaluators.
//!
//! Generic wrappers delegate to `statrs` in `f64`.

use crate::scalar::Scalar;

pub fn gamma<T: Scalar>(x: T) -> T {
    T::lit(statrs::function::gamma::gamma(x.as_f64()))
}

pub fn ln_gamma<T: Scalar>(x: T) -> T {
    T::lit(statrs::function::gamma::ln_gamma(x.as_f64()))
}

/// ln((n)!) for integer n.
pub fn ln_factorial<T: Scalar>(n: u32) -> T {
    T::lit(statrs::function::factorial::ln_factorial(u64::from(n)))
}

/// Upper regularized incomplete gamma Q(a, x) = Γ(a, x)/Γ(a).
pub fn gamma_q<T: Scalar>(a: T, x: T) -> T {
    if x <= T::zero() {
        return T::one();
    }
    T::lit(statrs::function::gamma::gamma_ur(a.as_f64(), x.as_f64()))
}

/// Q(n, x) for positive integer n via the finite Poisson sum
/// e^{-x} Σ_{k<n} x^k/k!. Exact for the chi-square(2n) beamforming gain tail.
pub fn gamma_q_int<T: Scalar>(n: u32, x: T) -> T {
    if x <= T::zero() {
        return T::one();
    }
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..n {
        term = term * x / T::from_usize_lossy(k as usize);
        sum += term;
    }
    (-x).exp() * sum
}

/// P(n, x) = 1 − Q(n, x) for positive integer n. Below x = n the tail series
/// e^{-x} Σ_{k≥n} x^k/k! avoids the cancellation in 1 − Q.
pub fn gamma_p_int<T: Scalar>(n: u32, x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    if x >= T::from_usize_lossy(n as usize) {
        return T::one() - gamma_q_int(n, x);
    }
    let mut term = (T::from_usize_lossy(n as usize) * x.ln() - x - ln_factorial::<T>(n)).exp();
    let mut sum = term;
    let mut k = n as usize;
    while term > sum * T::epsilon() {
        k += 1;
        term = term * x / T::from_usize_lossy(k);
        sum += term;
    }
    sum
}

/// Exponential integral E1(x) = ∫_x^∞ e^{-t}/t dt, x > 0.
pub fn exp_integral_e1<T: Scalar>(x: T) -> T {
    if x <= T::zero() {
        return T::infinity();
    }
    match statrs::function::exponential::integral(x.as_f64(), 1) {
        Some(v) => T::lit(v),
        None => T::nan(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_p_int_small_argument() {
        // P(6, 1e-3) ≈ x^6/6! (1 − 6x/7)
        let x = 1e-3f64;
        let approx = x.powi(6) / 720.0 * (1.0 - 6.0 * x / 7.0);
        assert_relative_eq!(gamma_p_int(6, x), approx, max_relative = 1e-6);
        for &(n, x) in &[(1u32, 0.3f64), (3, 2.9), (3, 3.1), (10, 4.0)] {
            assert_relative_eq!(gamma_p_int(n, x), 1.0 - gamma_q_int(n, x), max_relative = 1e-12);
        }
    }

    #[test]
    fn gamma_integer_and_half() {
        assert_relative_eq!(gamma(4.0_f64), 6.0, max_relative = 1e-12);
        assert_relative_eq!(
            gamma(2.5_f64),
            0.75 * std::f64::consts::PI.sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn integer_q_matches_statrs() {
        for n in 1..6u32 {
            for &x in &[0.1, 1.0, 3.3, 12.0] {
                let a = gamma_q_int(n, x);
                let b = gamma_q(f64::from(n), x);
                assert_relative_eq!(a, b, max_relative = 1e-10);
            }
        }
        assert_eq!(gamma_q_int(3, 0.0_f64), 1.0);
    }

    #[test]
    fn e1_reference_values() {
        // A&S table 5.1
        assert_relative_eq!(exp_integral_e1(1.0_f64), 0.219_383_934_395_520_3, max_relative = 1e-10);
        assert_relative_eq!(exp_integral_e1(0.5_f64), 0.559_773_594_776_160_8, max_relative = 1e-10);
        assert!(exp_integral_e1(0.0_f64).is_infinite());
    }
}
