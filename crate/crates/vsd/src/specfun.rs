//! Special-function evaluators: Gamma, digamma and the two-parameter
//! Mittag-Leffler function on the negative real axis.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Lanczos approximation, g = 7 with 9 coefficients (Numerical Recipes set).
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Evaluation policy for the Mittag-Leffler function.
///
/// The power series is used for `|z| <= asymptotic_switch`; beyond that the
/// algebraic asymptotic expansion is tried first and a Hankel-type integral
/// representation serves as the certified fallback (see `mittag_leffler`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlSeriesConfig {
    /// Maximum number of power-series (and asymptotic) terms.
    pub series_terms: usize,
    /// Threshold on |z| separating the series branch from the far branch.
    pub asymptotic_switch: f64,
    /// Requested absolute accuracy of the returned value.
    pub tolerance: f64,
}

impl Default for MlSeriesConfig {
    fn default() -> Self {
        Self {
            series_terms: 120,
            asymptotic_switch: 5.0,
            tolerance: 1e-12,
        }
    }
}

impl MlSeriesConfig {
    pub fn validate(&self) -> Result<()> {
        if self.series_terms < 20 {
            return Err(Error::Argument(format!(
                "series_terms must be >= 20, got {}",
                self.series_terms
            )));
        }
        if !(self.asymptotic_switch > 0.0) {
            return Err(Error::Argument("asymptotic_switch must be positive".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Argument("tolerance must be positive".into()));
        }
        Ok(())
    }
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection formula; safe because callers exclude nonpositive integers.
        PI / ((PI * x).sin() * gamma_unchecked(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = LANCZOS_COEF[0];
        for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Gamma function for real non-pole arguments.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() || is_nonpositive_integer(x) {
        return Err(Error::Domain(format!("gamma undefined at {x}")));
    }
    Ok(gamma_unchecked(x))
}

/// 1/Gamma(x), extended by zero at the poles.
pub fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / gamma_unchecked(x)
    }
}

/// Bernoulli numbers B_2 .. B_14 for the digamma asymptotic tail.
const BERNOULLI: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

/// Digamma function psi(x) = Gamma'(x)/Gamma(x) for x > 0.
///
/// Recurrence shift to x >= 6 followed by the asymptotic series.
pub fn digamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("digamma requires x > 0, got {x}")));
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < 6.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut tail = 0.0;
    let mut p = inv2;
    for (n, &b) in BERNOULLI.iter().enumerate() {
        tail += b / (2.0 * (n as f64 + 1.0)) * p;
        p *= inv2;
    }
    Ok(shift + x.ln() - 0.5 / x - tail)
}

/// Outcome of one evaluation branch together with its error estimate.
struct BranchValue {
    value: f64,
    err: f64,
}

/// Kahan-summed power series sum_k z^k / Gamma(alpha k + beta).
///
/// The error estimate accounts for cancellation: alternating terms can grow
/// many orders of magnitude above the tiny final sum.
fn ml_series(alpha: f64, beta: f64, z: f64, max_terms: usize) -> BranchValue {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut zk = 1.0f64;
    let mut max_term = 0.0f64;
    let mut converged = false;
    for k in 0..max_terms {
        let term = zk * recip_gamma(alpha * k as f64 + beta);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        max_term = max_term.max(term.abs());
        if term.abs() <= 1e-17 * sum.abs().max(1e-300) && k > 4 {
            converged = true;
            break;
        }
        zk *= z;
    }
    let cancel = max_term * 1e-15;
    let trunc = if converged { 0.0 } else { f64::INFINITY };
    BranchValue {
        value: sum,
        err: cancel + trunc,
    }
}

/// Algebraic asymptotic expansion -sum_{k>=1} z^{-k}/Gamma(beta - alpha k),
/// truncated optimally (before the first growing term).
fn ml_asymptotic(alpha: f64, beta: f64, z: f64, max_terms: usize) -> BranchValue {
    let zinv = 1.0 / z;
    let mut sum = 0.0f64;
    let mut zk = zinv;
    let mut prev = f64::INFINITY;
    let mut err = f64::INFINITY;
    for k in 1..=max_terms {
        let term = -zk * recip_gamma(beta - alpha * k as f64);
        let mag = term.abs();
        if mag > 0.0 {
            if mag >= prev {
                // Terms started growing: stop at the optimal truncation point.
                err = mag;
                break;
            }
            prev = mag;
        }
        sum += term;
        err = mag;
        if mag <= 1e-17 * sum.abs().max(1e-300) {
            break;
        }
        zk *= zinv;
    }
    BranchValue { value: sum, err }
}

/// Integral representation of E_{alpha,beta}(z) for 0 < alpha < 1 and z < 0
/// (the negative axis lies outside the sector |arg z| <= alpha*pi, so no
/// residue terms arise):
///
///   E(z) = (1/pi) * int_0^inf e^{-t} t^{alpha-beta}
///          [t^alpha sin(pi(1-beta)) - z sin(pi(1-beta+alpha))]
///          / (t^{2alpha} - 2 t^alpha z cos(alpha pi) + z^2) dt,
///
/// after the substitution r = t^alpha in the Hankel-contour form. Requires
/// beta < 1 + alpha for integrability at t = 0.
fn ml_integral(alpha: f64, beta: f64, z: f64) -> BranchValue {
    let s1 = (PI * (1.0 - beta)).sin();
    let s2 = (PI * (1.0 - beta + alpha)).sin();
    let c = (PI * alpha).cos();

    // Power substitution t = w^m removes the t^{alpha-beta} endpoint
    // singularity; m >= 1/(1 + alpha - beta) makes the integrand bounded.
    let m = (1.0 / (1.0 + alpha - beta)).ceil().clamp(1.0, 8.0);
    let w_max = 46.0f64.powf(1.0 / m); // e^{-46} ~ 1e-20 truncation

    let integrand = |w: f64| -> f64 {
        let t = w.powf(m);
        let ta = t.powf(alpha);
        let num = ta * s1 - z * s2;
        let den = ta * ta - 2.0 * ta * z * c + z * z;
        (-t).exp() * t.powf(alpha - beta) * num / den * m * w.powf(m - 1.0)
    };

    let (nodes, weights) = gauss_legendre(12);
    let panels = 24;
    let hw = w_max / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let a = p as f64 * hw;
        for (x, w) in nodes.iter().zip(weights.iter()) {
            let wp = a + 0.5 * hw * (x + 1.0);
            sum += w * 0.5 * hw * integrand(wp);
        }
    }
    let value = sum / PI;
    BranchValue {
        value,
        err: 1e-12 * value.abs().max(1.0),
    }
}

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(z) for
/// alpha in (0, 1], beta > 0 and z <= 0.
pub fn mittag_leffler(alpha: f64, beta: f64, z: f64, cfg: &MlSeriesConfig) -> Result<f64> {
    cfg.validate()?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("alpha must be in (0,1], got {alpha}")));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    if !(z <= 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("z must be a finite nonpositive real, got {z}")));
    }
    if z == 0.0 {
        return Ok(recip_gamma(beta));
    }
    if alpha == 1.0 && beta == 1.0 {
        return Ok(z.exp());
    }

    let tol = cfg.tolerance.max(1e-10);
    if z.abs() <= cfg.asymptotic_switch {
        let s = ml_series(alpha, beta, z, cfg.series_terms);
        if s.err <= tol {
            return Ok(s.value);
        }
        // Heavy cancellation (small alpha): the integral form is exact on the
        // negative axis for alpha < 1 and has no cancellation.
        if alpha < 1.0 && beta < 1.0 + alpha {
            return Ok(ml_integral(alpha, beta, z).value);
        }
        return Ok(s.value);
    }

    if alpha == 1.0 {
        // Not covered by the sector representation; series is the best we do.
        return Ok(ml_series(alpha, beta, z, cfg.series_terms).value);
    }
    let a = ml_asymptotic(alpha, beta, z, cfg.series_terms);
    if a.err <= tol {
        return Ok(a.value);
    }
    if beta < 1.0 + alpha {
        return Ok(ml_integral(alpha, beta, z).value);
    }
    Ok(a.value)
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Chebyshev-based initial guess.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
