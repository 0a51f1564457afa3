//! Scalar functions of the dimensionless momentum `t = p/c` that make up the
//! relativistic kinetic, gradient and exchange energy densities.
//!
//! All closed forms that subtract nearly equal quantities at small `t` switch
//! to a power series below [`SERIES_CROSSOVER`]. Series coefficients are
//! generated from the binomial expansions of the derivatives
//! `tf'(t) = 8t^2(sqrt(1+t^2) - 1)` and `g'(t) = 2t^2/sqrt(1+t^2)`, so they are
//! exact to all orders rather than truncated by hand.

use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};
use std::f64::consts::PI;

/// Below this argument `tf` and the exchange bracket `g` use their series.
pub const SERIES_CROSSOVER: f64 = 0.5;
/// Below this argument `f^2` uses its (cancellation-free, but cheaper) series.
pub const F_SQ_SERIES_CROSSOVER: f64 = 1e-4;

/// The scalar functions, for tabulation and generic checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarFn {
    FSq,
    F,
    Tf,
    TfPrime,
    X,
    WeizsackerBracket,
}

impl ScalarFn {
    pub const ALL: [ScalarFn; 6] = [
        ScalarFn::FSq,
        ScalarFn::F,
        ScalarFn::Tf,
        ScalarFn::TfPrime,
        ScalarFn::X,
        ScalarFn::WeizsackerBracket,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScalarFn::FSq => "f_sq",
            ScalarFn::F => "F",
            ScalarFn::Tf => "tf",
            ScalarFn::TfPrime => "tf_prime",
            ScalarFn::X => "X",
            ScalarFn::WeizsackerBracket => "weizsacker_bracket",
        }
    }

    pub fn eval(self, t: f64) -> Result<f64> {
        match self {
            ScalarFn::FSq => f_sq(t),
            ScalarFn::F => f_int(t),
            ScalarFn::Tf => tf_fn(t),
            ScalarFn::TfPrime => tf_fn_prime(t),
            ScalarFn::X => x_fn(t),
            ScalarFn::WeizsackerBracket => weizsacker_bracket(t),
        }
    }
}

fn check(op: &'static str, t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        Err(Error::domain(op, format!("argument must be >= 0, got {t}")))
    } else {
        Ok(())
    }
}

/// `arsinh(t) = ln(t + sqrt(1+t^2))`, written through `ln_1p` so it keeps full
/// relative precision for small `t`.
#[inline]
pub fn arsinh(t: f64) -> f64 {
    if t > 1e150 {
        return (2.0 * t).ln();
    }
    let s = (1.0 + t * t).sqrt();
    (t + t * t / (1.0 + s)).ln_1p()
}

/// `t / sqrt(1+t^2)` without overflow.
#[inline]
fn t_over_root(t: f64) -> f64 {
    if t > 1.0 {
        1.0 / (1.0 + 1.0 / (t * t)).sqrt()
    } else {
        t / (1.0 + t * t).sqrt()
    }
}

/// `t^2 / (1+t^2)` without overflow.
#[inline]
fn t2_over_1pt2(t: f64) -> f64 {
    if t > 1.0 {
        1.0 / (1.0 + 1.0 / (t * t))
    } else {
        t * t / (1.0 + t * t)
    }
}

pub mod raw {
    //! Unchecked evaluations for hot loops; callers guarantee `t >= 0`.
    use super::*;

    #[inline]
    pub fn f_sq(t: f64) -> f64 {
        if t < F_SQ_SERIES_CROSSOVER {
            f_sq_series(t)
        } else {
            f_sq_closed(t)
        }
    }

    /// `f(t)^2 / t`, the bracket bounded by its maximum 1.658...; equals 1 at 0.
    #[inline]
    pub fn weizsacker_bracket(t: f64) -> f64 {
        if t < F_SQ_SERIES_CROSSOVER {
            let t2 = t * t;
            1.0 + t2 * (1.5 - t2 * (47.0 / 24.0))
        } else {
            1.0 / (1.0 + t * t).sqrt() + 2.0 * t * arsinh(t) / (1.0 + t * t)
        }
    }

    #[inline]
    pub fn tf(t: f64) -> f64 {
        if t < SERIES_CROSSOVER {
            tf_series(t)
        } else {
            tf_closed(t)
        }
    }

    #[inline]
    pub fn tf_prime(t: f64) -> f64 {
        let t2 = t * t;
        8.0 * t2 * t2 / ((1.0 + t2).sqrt() + 1.0)
    }

    /// `g(t) = t sqrt(1+t^2) - arsinh(t)`, the bracket inside the exchange term.
    #[inline]
    pub fn exchange_bracket(t: f64) -> f64 {
        if t < SERIES_CROSSOVER {
            g_series(t)
        } else {
            g_closed(t)
        }
    }

    #[inline]
    pub fn x(t: f64) -> f64 {
        let g = exchange_bracket(t);
        let t2 = t * t;
        2.0 * t2 * t2 - 3.0 * g * g
    }
}

pub(crate) fn f_sq_series(t: f64) -> f64 {
    let t2 = t * t;
    t * (1.0 + t2 * (1.5 - t2 * (47.0 / 24.0 - t2 * (521.0 / 240.0))))
}

pub(crate) fn f_sq_closed(t: f64) -> f64 {
    t_over_root(t) + 2.0 * t2_over_1pt2(t) * arsinh(t)
}

/// `8 sum_{k>=1} C(1/2, k) t^{2k+3} / (2k+3)`.
pub(crate) fn tf_series(t: f64) -> f64 {
    let t2 = t * t;
    let mut binom = 0.5; // C(1/2, 1)
    let mut power = t2 * t2 * t; // t^5
    let mut sum = 0.0;
    for k in 1..200 {
        let term = binom * power / (2 * k + 3) as f64;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        binom *= (0.5 - k as f64) / (k + 1) as f64;
        power *= t2;
    }
    8.0 * sum
}

pub(crate) fn tf_closed(t: f64) -> f64 {
    let s = (1.0 + t * t).sqrt();
    t * (2.0 * t * t + 1.0) * s - arsinh(t) - 8.0 / 3.0 * t * t * t
}

/// `2 sum_{k>=0} C(-1/2, k) t^{2k+3} / (2k+3)`.
pub(crate) fn g_series(t: f64) -> f64 {
    let t2 = t * t;
    let mut binom = 1.0;
    let mut power = t2 * t;
    let mut sum = 0.0;
    for k in 0..200 {
        let term = binom * power / (2 * k + 3) as f64;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        binom *= (-0.5 - k as f64) / (k + 1) as f64;
        power *= t2;
    }
    2.0 * sum
}

pub(crate) fn g_closed(t: f64) -> f64 {
    t * (1.0 + t * t).sqrt() - arsinh(t)
}

/// `f(t)^2 = t (t^2+1)^{-1/2} + 2 t^2 (t^2+1)^{-1} arsinh(t)`.
pub fn f_sq(t: f64) -> Result<f64> {
    check("f_sq", t)?;
    Ok(raw::f_sq(t))
}

/// `(sqrt(1+t^2) + 2t arsinh t) / (1+t^2) = f(t)^2 / t`.
pub fn weizsacker_bracket(t: f64) -> Result<f64> {
    check("weizsacker_bracket", t)?;
    Ok(raw::weizsacker_bracket(t))
}

/// `F(t) = int_0^t f(s) ds`.
///
/// Evaluated as `int_0^{sqrt t} 2u f(u^2) du`, which removes the `sqrt(s)`
/// behaviour of `f` at the origin.
pub fn f_int(t: f64) -> Result<f64> {
    check("F_int", t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    quad::integrate(
        |u| 2.0 * u * raw::f_sq(u * u).sqrt(),
        0.0,
        t.sqrt(),
        QuadOptions { rel_tol: 1e-13, abs_tol: 0.0, max_panels: 2000 },
    )
}

/// Relativistic Thomas-Fermi kinetic integrand
/// `tf(t) = t(t^2+1)^{3/2} + t^3(t^2+1)^{1/2} - arsinh(t) - 8t^3/3`.
pub fn tf_fn(t: f64) -> Result<f64> {
    check("tf_fn", t)?;
    Ok(raw::tf(t))
}

/// `tf'(t) = 8t^2 (sqrt(1+t^2) - 1)`, evaluated as `8t^4 / (sqrt(1+t^2) + 1)`.
pub fn tf_fn_prime(t: f64) -> Result<f64> {
    check("tf_fn_prime", t)?;
    Ok(raw::tf_prime(t))
}

/// Relativistic exchange integrand `X(t) = 2t^4 - 3[t(t^2+1)^{1/2} - arsinh t]^2`.
pub fn x_fn(t: f64) -> Result<f64> {
    check("x_fn", t)?;
    Ok(raw::x(t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub argmax: f64,
    pub value: f64,
}

/// Maximum over `t >= 0` of the Weizsacker bracket; about 1.6582901122 at
/// `t ~ 1.4463`.
pub fn weizsacker_bracket_max() -> Maximum {
    // coarse log scan
    let (lt, _) = quad::maximize(|lt: f64| raw::weizsacker_bracket(lt.exp()), -7.0, 7.0, 281, 1e-3);
    let t0 = lt.exp();
    let (argmax, value) =
        quad::maximize(raw::weizsacker_bracket, 0.5 * t0, 2.0 * t0, 41, 1e-11);
    Maximum { argmax, value }
}

/// `eta_0(alpha) = sup_{t>0} X(t) / t^alpha` for `alpha` in `[0, 4]`.
///
/// For `alpha = 4` the supremum is the `t -> 0+` limit 2 of `X(t)/t^4`; for
/// `alpha < 4` that limit is 0 and the supremum is interior.
pub fn eta0(alpha: f64) -> Result<Maximum> {
    if !(0.0..=4.0).contains(&alpha) {
        return Err(Error::domain("eta0", format!("alpha must lie in [0, 4], got {alpha}")));
    }
    let ratio = |lt: f64| {
        let t = lt.exp();
        raw::x(t) * (-alpha * lt).exp()
    };
    let (lt, _) = quad::maximize(ratio, -8.0 * std::f64::consts::LN_10, 7.0, 601, 1e-3);
    let (lt, value) = quad::maximize(ratio, lt - 0.05, lt + 0.05, 21, 1e-11);
    let limit_at_zero = if alpha == 4.0 { 2.0 } else { 0.0 };
    if limit_at_zero >= value {
        Ok(Maximum { argmax: 0.0, value: limit_at_zero })
    } else {
        Ok(Maximum { argmax: lt.exp(), value })
    }
}

/// `eta = eta_0(3) / (4 pi)`, the coefficient in `X(rho) <= eta c N`.
pub fn exchange_eta() -> f64 {
    static ETA: std::sync::OnceLock<f64> = std::sync::OnceLock::new();
    *ETA.get_or_init(|| eta0(3.0).expect("alpha = 3 is in range").value / (4.0 * PI))
}

/// `3 eta_0(3) / (8 pi) = (3/2) eta`: with `X(t) <= eta_0 t^3` and
/// `int p^3 = 3 pi^2 N`, the exchange energy obeys `X(rho) <= (3/2) eta c N`.
pub fn exchange_particle_coefficient() -> f64 {
    1.5 * exchange_eta()
}

/// Relative difference between series and closed form at each switch point,
/// as `(function, t, |series - closed| / |closed|)`.
pub fn crossover_agreement() -> Vec<(&'static str, f64, f64)> {
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    let (tc, fc) = (SERIES_CROSSOVER, F_SQ_SERIES_CROSSOVER);
    vec![
        ("f_sq", fc, rel(f_sq_series(fc), f_sq_closed(fc))),
        ("tf", tc, rel(tf_series(tc), tf_closed(tc))),
        ("g", tc, rel(g_series(tc), g_closed(tc))),
    ]
}

/// Sharp constant in `tf(t) <= C t^5`: sup of `tf(t)/t^5`, the `t -> 0` limit.
pub fn tf_quintic_constant() -> Maximum {
    let (lt, value) =
        quad::maximize(|lt: f64| raw::tf(lt.exp()) * (-5.0 * lt).exp(), -12.0, 7.0, 400, 1e-6);
    if value < 0.8 {
        Maximum { argmax: 0.0, value: 0.8 }
    } else {
        Maximum { argmax: lt.exp(), value }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_grid(n: usize, lo: f64, hi: f64) -> Vec<f64> {
        let (a, b) = (lo.ln(), hi.ln());
        (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
    }

    #[test]
    fn negative_arguments_rejected() {
        for f in ScalarFn::ALL {
            assert!(matches!(f.eval(-1e-3), Err(Error::Domain { .. })), "{}", f.name());
            assert!(f.eval(f64::NAN).is_err());
        }
    }

    #[test]
    fn values_at_zero() {
        for f in [ScalarFn::FSq, ScalarFn::F, ScalarFn::Tf, ScalarFn::TfPrime, ScalarFn::X] {
            assert_eq!(f.eval(0.0).unwrap(), 0.0, "{}", f.name());
        }
        assert_eq!(weizsacker_bracket(0.0).unwrap(), 1.0);
    }

    #[test]
    fn f_sq_at_one_and_large_t() {
        // 1/sqrt(2) + arsinh(1)
        let expected = std::f64::consts::FRAC_1_SQRT_2 + 1f64.asinh();
        assert!((f_sq(1.0).unwrap() - expected).abs() < 1e-15);
        assert!((f_sq(1.0).unwrap() - 1.588_480_368_206_090_5).abs() < 1e-14);
        let t = 1e6;
        assert!((f_sq(t).unwrap() - 2.0 * (2.0 * t).ln() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn branches_agree_at_crossovers() {
        let t = SERIES_CROSSOVER;
        assert!(((tf_series(t) - tf_closed(t)) / tf_closed(t)).abs() < 1e-12);
        assert!(((g_series(t) - g_closed(t)) / g_closed(t)).abs() < 1e-12);
        let t = F_SQ_SERIES_CROSSOVER;
        assert!(((f_sq_series(t) - f_sq_closed(t)) / f_sq_closed(t)).abs() < 1e-12);
    }

    #[test]
    fn series_leading_coefficients() {
        let t: f64 = 1e-3;
        assert!((tf_fn(t).unwrap() / t.powi(5) - 0.8).abs() < 1e-6);
        assert!((x_fn(t).unwrap() / t.powi(4) - 2.0).abs() < 1e-5);
        assert!((g_series(t) / t.powi(3) - 2.0 / 3.0).abs() < 1e-6);
        assert!((f_sq(t).unwrap() / t - 1.0).abs() < 1e-5);
    }

    #[test]
    fn tf_over_t4_limit() {
        let t: f64 = 1e3;
        let r = (tf_fn(t).unwrap() + 8.0 * t.powi(3) / 3.0) / t.powi(4);
        assert!((r - 2.0).abs() < 1e-5, "{r}");
        let big: f64 = 1e6;
        let r = tf_fn(big).unwrap() / big.powi(4);
        assert!(r <= 2.0 && r >= 2.0 - 1e-5, "{r}");
    }

    #[test]
    fn tf_prime_positive() {
        for t in log_grid(500, 1e-4, 1e4) {
            assert!(tf_fn_prime(t).unwrap() > 0.0);
        }
    }

    #[test]
    fn bracket_max_value() {
        let m = weizsacker_bracket_max();
        assert!((m.value - 1.658_290_113).abs() < 1e-8, "{m:?}");
        assert!(weizsacker_bracket(1e6).unwrap() < 1e-4);
    }

    #[test]
    fn eta0_values() {
        let e3 = eta0(3.0).unwrap();
        assert!((e3.value - 1.15).abs() < 0.01);
        assert!((e3.value / (4.0 * PI) - 0.0914).abs() < 0.001);
        assert!((eta0(4.0).unwrap().value - 2.0).abs() < 1e-12);
        // X(t)/t^4 approaches 2 from below
        let t: f64 = 1e-5;
        assert!((2.0 - x_fn(t).unwrap() / t.powi(4)).abs() < 1e-9);
        assert!(eta0(4.5).is_err());
        assert!(eta0(-0.1).is_err());
        assert!(eta0(0.0).unwrap().value > 0.0);
    }

    #[test]
    fn quintic_constant_is_four_fifths() {
        let c = tf_quintic_constant();
        assert_eq!(c.value, 0.8);
        for t in log_grid(2000, 1e-4, 1e4) {
            assert!(tf_fn(t).unwrap() <= 0.8 * t.powi(5) * (1.0 + 1e-14));
        }
    }
}
