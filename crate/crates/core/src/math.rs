//! Scalar numerics shared by the demappers, the decoder and density evolution.
//!
//! LLRs are `ln P(b=0|·) - ln P(b=1|·)`: positive values favour bit 0.

use libm::{erfc, exp, fabs, log, log1p, pow, sqrt};

use crate::{Error, Result};

/// Magnitude at which LLRs saturate.
pub const LLR_CLAMP: f64 = 40.0;

/// Clamps an LLR to `[-LLR_CLAMP, LLR_CLAMP]`.
#[inline]
pub fn clamp_llr(l: f64) -> f64 {
    l.clamp(-LLR_CLAMP, LLR_CLAMP)
}

/// `ln(1 + e^x)` without overflow.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + log1p(exp(-x))
    } else {
        log1p(exp(x))
    }
}

/// `ln(e^a + e^b)`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + log1p(exp(lo - hi))
}

/// Exact check-node combination `2·atanh(tanh(a/2)·tanh(b/2))`.
///
/// Evaluated in the form `sign·min(|a|,|b|) + ln(1+e^{-|a+b|}) - ln(1+e^{-|a-b|})`,
/// which is exact and stable; inputs are clamped first so saturated values
/// stay finite. An erasure (`0`) on either side yields exactly `0`.
#[inline]
pub fn boxplus(a: f64, b: f64) -> f64 {
    let a = clamp_llr(a);
    let b = clamp_llr(b);
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    let min = fabs(a).min(fabs(b));
    sign * min + log1p(exp(-fabs(a + b))) - log1p(exp(-fabs(a - b)))
}

/// Min-sum approximation of [`boxplus`].
#[inline]
pub fn boxplus_min_sum(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    sign * fabs(a).min(fabs(b))
}

/// Hard decision on an LLR: `1` iff negative.
#[inline]
pub fn hard(l: f64) -> u8 {
    u8::from(l < 0.0)
}

/// Per-sample mutual-information loss `log2(1 + e^{-(1-2b)·L})`.
///
/// For a true posterior LLR `L` of a uniform bit `b`, `1 - E[loss]` is `I(B; L)`.
#[inline]
pub fn mi_loss(llr: f64, bit: u8) -> f64 {
    let signed = if bit == 0 { llr } else { -llr };
    softplus(-signed) / core::f64::consts::LN_2
}

/// Gaussian tail `Q(x) = P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / core::f64::consts::SQRT_2)
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -(p * log(p) + (1.0 - p) * log(1.0 - p)) / core::f64::consts::LN_2
    }
}

/// `E[f(X)]` for `X ~ N(mean, std²)` by composite Simpson over `mean ± 12 std`.
pub fn gaussian_expectation(mean: f64, std: f64, f: impl Fn(f64) -> f64) -> f64 {
    if std == 0.0 {
        return f(mean);
    }
    const INTERVALS: usize = 1200;
    let lo = mean - 12.0 * std;
    let h = 24.0 * std / INTERVALS as f64;
    let norm = 1.0 / (std * sqrt(2.0 * core::f64::consts::PI));
    let weight = |x: f64| {
        let z = (x - mean) / std;
        norm * exp(-0.5 * z * z) * f(x)
    };
    let mut acc = weight(lo) + weight(lo + 24.0 * std);
    for i in 1..INTERVALS {
        let x = lo + i as f64 * h;
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * weight(x);
    }
    acc * h / 3.0
}

/// Capacity (bits) of a binary-input channel whose LLR is consistent Gaussian
/// with mean `mu` and variance `2·mu`.
pub fn j_capacity(mu: f64) -> f64 {
    if mu <= 0.0 {
        return 0.0;
    }
    if mu.is_infinite() {
        return 1.0;
    }
    let loss = gaussian_expectation(mu, sqrt(2.0 * mu), |l| mi_loss(l, 0));
    (1.0 - loss).clamp(0.0, 1.0)
}

/// Inverse of [`j_capacity`]: the LLR mean achieving capacity `c`.
///
/// Capacity `1` maps to an infinite mean.
pub fn j_inverse(c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::InvalidParameter("capacity outside [0, 1]"));
    }
    if c == 0.0 {
        return Ok(0.0);
    }
    if c >= 1.0 {
        return Ok(f64::INFINITY);
    }
    let mut hi = 1.0;
    while j_capacity(hi) < c {
        hi *= 2.0;
        if hi > 1e6 {
            // J saturates at 1 in double precision long before this.
            return Ok(f64::INFINITY);
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if j_capacity(mid) < c {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Coefficients of the two-piece φ approximation used by Gaussian-approximated
/// density evolution:
///
/// `φ(x) = exp(a·x^γ + b)` for `0 ≤ x < switch`,
/// `φ(x) = sqrt(π/x)·exp(-x/4)·(1 - c/x)` for `x ≥ switch`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiApprox {
    /// Exponent scale `a` of the low piece.
    pub a: f64,
    /// Power `γ` of the low piece.
    pub gamma: f64,
    /// Offset `b` of the low piece.
    pub b: f64,
    /// Correction `c` of the high piece.
    pub c: f64,
    /// Switch-over point between the pieces.
    pub switch: f64,
}

impl Default for PhiApprox {
    fn default() -> Self {
        Self {
            a: -0.4527,
            gamma: 0.86,
            b: 0.0218,
            c: 10.0 / 7.0,
            switch: 10.0,
        }
    }
}

impl PhiApprox {
    /// `ln φ(x)`, with `φ` capped at 1.
    pub fn ln_phi(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x.is_infinite() {
            return f64::NEG_INFINITY;
        }
        let v = if x < self.switch {
            self.a * pow(x, self.gamma) + self.b
        } else {
            0.5 * log(core::f64::consts::PI / x) - x / 4.0 + log(1.0 - self.c / x)
        };
        v.min(0.0)
    }

    /// Inverse of [`Self::ln_phi`]: the smallest `x` with `ln φ(x) = target`.
    pub fn ln_phi_inverse(&self, target: f64) -> Result<f64> {
        if target >= 0.0 {
            return Ok(0.0);
        }
        if target == f64::NEG_INFINITY {
            return Ok(f64::INFINITY);
        }
        let low = pow((target - self.b) / self.a, 1.0 / self.gamma);
        if low < self.switch {
            return Ok(low);
        }
        let f = |x: f64| 0.5 * log(core::f64::consts::PI / x) - x / 4.0 + log(1.0 - self.c / x);
        let mut lo = self.switch;
        let mut hi = 2.0 * self.switch;
        while f(hi) > target {
            hi *= 2.0;
            if !hi.is_finite() {
                return Err(Error::Numeric("phi inversion diverged"));
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-12 * hi {
                return Ok(0.5 * (lo + hi));
            }
        }
        Err(Error::Numeric("phi inversion did not converge"))
    }

    /// Mean of the check-node output of two consistent Gaussian LLRs.
    pub fn check_mean(&self, mu_a: f64, mu_b: f64) -> Result<f64> {
        let la = self.ln_phi(mu_a);
        let lb = self.ln_phi(mu_b);
        // 1 - (1-φa)(1-φb) = φa + φb - φa·φb, kept in the log domain.
        let ln_t = if la.max(lb) > -30.0 {
            let (pa, pb) = (exp(la), exp(lb));
            log(pa + pb - pa * pb)
        } else {
            log_add_exp(la, lb)
        };
        self.ln_phi_inverse(ln_t.min(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tanh_boxplus(a: f64, b: f64) -> f64 {
        2.0 * libm::atanh(libm::tanh(a / 2.0) * libm::tanh(b / 2.0))
    }

    #[test]
    fn boxplus_matches_tanh_rule() {
        for &(a, b) in &[(0.3, -1.2), (2.5, 3.0), (-7.0, -0.01), (10.0, 4.0), (0.0, 5.0)] {
            assert!((boxplus(a, b) - tanh_boxplus(a, b)).abs() < 1e-12, "{a} {b}");
        }
        assert_eq!(boxplus(0.0, 40.0), 0.0);
        assert!((boxplus(f64::INFINITY, -3.0) + 3.0).abs() < 1e-12);
        assert!(boxplus(f64::INFINITY, f64::NEG_INFINITY) < -39.0);
        assert_eq!(boxplus_min_sum(-2.0, 5.0), -2.0);
    }

    #[test]
    fn q_and_entropy() {
        assert!((q_function(0.0) - 0.5).abs() < 1e-15);
        assert!((q_function(1.0) - 0.158_655_253_931_457_05).abs() < 1e-12);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0), 0.0);
    }

    #[test]
    fn j_function_endpoints_and_inverse() {
        assert_eq!(j_capacity(0.0), 0.0);
        assert_eq!(j_capacity(f64::INFINITY), 1.0);
        // BiAWGN with sigma = 1: mu = 2/sigma^2 = 2, capacity ≈ 0.4859.
        assert!((j_capacity(2.0) - 0.4859).abs() < 1e-3);
        for &c in &[0.01, 0.2, 0.5, 0.9, 0.999] {
            let mu = j_inverse(c).unwrap();
            assert!((j_capacity(mu) - c).abs() < 1e-9, "c={c}");
        }
        assert_eq!(j_inverse(1.0).unwrap(), f64::INFINITY);
        assert!(j_inverse(1.5).is_err());
    }

    #[test]
    fn phi_regression_values() {
        let phi = PhiApprox::default();
        assert_eq!(phi.ln_phi(0.0), 0.0);
        assert!((phi.ln_phi(1.0) - (-0.4527 + 0.0218)).abs() < 1e-15);
        let expected_20 = 0.5 * log(core::f64::consts::PI / 20.0) - 5.0 + log(1.0 - 1.0 / 14.0);
        assert!((phi.ln_phi(20.0) - expected_20).abs() < 1e-15);
        for &x in &[0.5, 3.0, 9.0, 12.0, 80.0, 4000.0] {
            let back = phi.ln_phi_inverse(phi.ln_phi(x)).unwrap();
            assert!((back - x).abs() < 1e-8 * x, "x={x} back={back}");
        }
    }

    #[test]
    fn check_mean_degrades() {
        let phi = PhiApprox::default();
        for &mu in &[0.5, 2.0, 8.0, 30.0, 500.0] {
            let m = phi.check_mean(mu, mu).unwrap();
            assert!(m < mu && m > 0.0, "mu={mu} m={m}");
        }
        assert_eq!(phi.check_mean(f64::INFINITY, f64::INFINITY).unwrap(), f64::INFINITY);
        assert_eq!(phi.check_mean(0.0, 7.0).unwrap(), 0.0);
    }

    #[test]
    fn mi_loss_symmetry() {
        assert!((mi_loss(0.0, 0) - 1.0).abs() < 1e-15);
        assert!((mi_loss(3.0, 0) - mi_loss(-3.0, 1)).abs() < 1e-15);
        assert!(mi_loss(40.0, 0) < 1e-15);
    }
}
