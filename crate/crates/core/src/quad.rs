//! Globally adaptive Gauss–Kronrod (7/15) quadrature and bracketing root search.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

// Gauss weights for the odd Kronrod nodes 1, 3, 5 and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_intervals: usize,
}

impl<T: Scalar> Default for QuadOptions<T> {
    fn default() -> Self {
        QuadOptions {
            abs_tol: T::lit(1e-10),
            rel_tol: T::lit(1e-8),
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_error: T,
    pub intervals: usize,
}

#[derive(Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    value: T,
    err: T,
}

fn gk15<T: Scalar, F: Fn(T) -> T>(f: &F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut res_k = fc * T::lit(WGK[7]);
    let mut res_g = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        res_k += T::lit(WGK[j]) * (f1 + f2);
        if j % 2 == 1 {
            res_g += T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    let value = res_k * half_len;
    let err = ((res_k - res_g) * half_len).abs();
    (value, err)
}

/// Integrates `f` over the finite interval [a, b].
pub fn integrate<T, F>(f: F, a: T, b: T, opts: &QuadOptions<T>) -> Result<QuadResult<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if a == b {
        return Ok(QuadResult {
            value: T::zero(),
            abs_error: T::zero(),
            intervals: 0,
        });
    }
    if b < a {
        let r = integrate(f, b, a, opts)?;
        return Ok(QuadResult {
            value: -r.value,
            ..r
        });
    }

    let (v0, e0) = gk15(&f, a, b);
    let mut segments = vec![Segment {
        a,
        b,
        value: v0,
        err: e0,
    }];
    let mut total = v0;
    let mut total_err = e0;
    let floor = T::tol_floor();

    loop {
        if !total.is_finite() {
            return Err(quad_failure(a, b, total, total_err, segments.len()));
        }
        let target = opts.abs_tol.max(opts.rel_tol * total.abs()).max(floor * total.abs());
        if total_err <= target {
            return Ok(QuadResult {
                value: total,
                abs_error: total_err,
                intervals: segments.len(),
            });
        }
        if segments.len() >= opts.max_intervals {
            return Err(quad_failure(a, b, total, total_err, segments.len()));
        }

        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |acc, (i, s)| {
                if s.err > acc.1 {
                    (i, s.err)
                } else {
                    acc
                }
            });
        let seg = segments.swap_remove(worst);
        let mid = T::lit(0.5) * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval collapsed to machine resolution
            return Err(quad_failure(a, b, total, total_err, segments.len() + 1));
        }
        let (vl, el) = gk15(&f, seg.a, mid);
        let (vr, er) = gk15(&f, mid, seg.b);
        total += vl + vr - seg.value;
        segments.push(Segment {
            a: seg.a,
            b: mid,
            value: vl,
            err: el,
        });
        segments.push(Segment {
            a: mid,
            b: seg.b,
            value: vr,
            err: er,
        });
        // recompute to avoid drift from repeated subtraction
        total_err = segments.iter().fold(T::zero(), |s, g| s + g.err);
    }
}

/// Integrates `f` over [a, ∞) with the map x = a + t/(1 − t).
pub fn integrate_to_inf<T, F>(f: F, a: T, opts: &QuadOptions<T>) -> Result<QuadResult<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let g = |t: T| {
        if t >= T::one() {
            return T::zero();
        }
        let s = T::one() - t;
        let x = a + t / s;
        let v = f(x) / (s * s);
        if v.is_finite() {
            v
        } else {
            T::zero()
        }
    };
    integrate(g, T::zero(), T::one(), opts)
}

fn quad_failure<T: Scalar>(a: T, b: T, v: T, e: T, n: usize) -> Error {
    Error::Quadrature {
        lower: a.as_f64(),
        upper: b.as_f64(),
        estimate: v.as_f64(),
        abs_error: e.as_f64(),
        intervals: n,
    }
}

/// Bisection on a sign-changing bracket [lo, hi]. Returns x with |hi − lo| ≤ tol.
pub fn bisect<T, F>(f: F, mut lo: T, mut hi: T, tol: T) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if (flo > T::zero()) == (fhi > T::zero()) {
        return Err(Error::RootFinding(format!(
            "no sign change on [{lo}, {hi}] (f = {flo}, {fhi})"
        )));
    }
    let tol = tol.max(T::epsilon() * (lo.abs() + hi.abs()));
    for _ in 0..400 {
        let mid = T::lit(0.5) * (lo + hi);
        if (hi - lo).abs() <= tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Ok(mid);
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(T::lit(0.5) * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, &QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, 0.0, epsilon = 1e-12);
        let r = integrate(|x: f64| x.powi(6), -1.0, 1.0, &QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, 2.0 / 7.0, max_relative = 1e-13);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let o = QuadOptions::default();
        let a = integrate(f64::sin, 0.0, 1.0, &o).unwrap().value;
        let b = integrate(f64::sin, 1.0, 0.0, &o).unwrap().value;
        assert_relative_eq!(a, -b, max_relative = 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 ln x dx = −1
        let r = integrate(|x: f64| x.ln(), 0.0, 1.0, &QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, -1.0, max_relative = 1e-8);
    }

    #[test]
    fn improper_gaussian() {
        let r = integrate_to_inf(|x: f64| (-x * x).exp(), 0.0, &QuadOptions::default()).unwrap();
        assert_relative_eq!(r.value, std::f64::consts::PI.sqrt() / 2.0, max_relative = 1e-9);
    }

    #[test]
    fn f32_path() {
        let o = QuadOptions {
            abs_tol: 1e-6_f32,
            rel_tol: 1e-5,
            max_intervals: 500,
        };
        let r = integrate(|x: f32| x.exp(), 0.0, 1.0, &o).unwrap();
        assert!((r.value - (std::f32::consts::E - 1.0)).abs() < 1e-5);
    }

    #[test]
    fn nonconvergence_reports() {
        let o = QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-14,
            max_intervals: 3,
        };
        let e = integrate(|x: f64| (1.0 / x).sin(), 1e-6, 1.0, &o).unwrap_err();
        assert!(matches!(e, Error::Quadrature { .. }));
    }

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert_relative_eq!(r, 2f64.sqrt(), max_relative = 1e-13);
        assert!(bisect(|x: f64| x * x + 1.0, 0.0, 1.0, 1e-12).is_err());
    }
}
