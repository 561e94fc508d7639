//! The variable exponent alpha(t), the weakly singular kernel
//! k(t) = t^{-alpha(t)}/Gamma(1-alpha(t)), and its perturbation split
//! k = beta_{1-alpha0} + gtilde with exact convolution weights.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::specfun::{digamma_fn, recip_gamma};

/// Callable supplying (alpha(t), alpha'(t)).
pub type ExponentFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

#[derive(Clone)]
pub enum ExponentKind {
    /// alpha(t) = a0 + slope * t.
    Affine { a0: f64, slope: f64 },
    /// User-supplied (alpha, alpha') pair; validity is checked by sampling.
    Custom(ExponentFn),
}

impl fmt::Debug for ExponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExponentKind::Affine { a0, slope } => {
                write!(f, "Affine {{ a0: {a0}, slope: {slope} }}")
            }
            ExponentKind::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// The variable fractional order with its derivative and validity horizon.
#[derive(Debug, Clone)]
pub struct ExponentProfile {
    kind: ExponentKind,
    bound_check_t: f64,
}

const VALIDITY_SAMPLES: usize = 10_000;

impl ExponentProfile {
    pub fn affine(a0: f64, slope: f64, horizon: f64) -> Result<Self> {
        Self::new(ExponentKind::Affine { a0, slope }, horizon)
    }

    pub fn custom(f: ExponentFn, horizon: f64) -> Result<Self> {
        Self::new(ExponentKind::Custom(f), horizon)
    }

    pub fn new(kind: ExponentKind, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) {
            return Err(Error::Argument("exponent horizon must be positive".into()));
        }
        let p = Self {
            kind,
            bound_check_t: horizon,
        };
        // 0 < alpha(t) < 1 on [0, T], checked by sampling; exact for affine.
        for i in 0..=VALIDITY_SAMPLES {
            let t = horizon * i as f64 / VALIDITY_SAMPLES as f64;
            let (a, _) = p.eval_unchecked(t);
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::Domain(format!(
                    "alpha({t}) = {a} leaves (0,1) on the horizon [0, {horizon}]"
                )));
            }
        }
        Ok(p)
    }

    pub fn horizon(&self) -> f64 {
        self.bound_check_t
    }

    pub fn alpha0(&self) -> f64 {
        self.eval_unchecked(0.0).0
    }

    fn eval_unchecked(&self, t: f64) -> (f64, f64) {
        match &self.kind {
            ExponentKind::Affine { a0, slope } => (a0 + slope * t, *slope),
            ExponentKind::Custom(f) => f(t),
        }
    }

    /// (alpha(t), alpha'(t)) for t in [0, T].
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        if !(0.0..=self.bound_check_t).contains(&t) {
            return Err(Error::Domain(format!(
                "t = {t} outside exponent horizon [0, {}]",
                self.bound_check_t
            )));
        }
        Ok(self.eval_unchecked(t))
    }
}

/// Evaluators for k(t) and the split k = beta_{1-alpha0} + gtilde.
#[derive(Debug, Clone)]
pub struct KernelSplit {
    profile: ExponentProfile,
    alpha0: f64,
    t_end: f64,
    /// 1/Gamma(1 - alpha0), cached.
    rg0: f64,
}

/// Fitted Lemma-2.2-style bound constants for gtilde and gtilde'.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelBoundReport {
    pub c_g: f64,
    pub c_gp: f64,
    pub pass: bool,
}

impl KernelSplit {
    pub fn new(profile: ExponentProfile) -> Self {
        let alpha0 = profile.alpha0();
        let t_end = profile.horizon();
        let rg0 = recip_gamma(1.0 - alpha0);
        Self {
            profile,
            alpha0,
            t_end,
            rg0,
        }
    }

    pub fn profile(&self) -> &ExponentProfile {
        &self.profile
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// k(t) = t^{-alpha(t)} / Gamma(1 - alpha(t)), t > 0.
    pub fn eval_abel_kernel(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("Abel kernel is singular at t = {t}")));
        }
        let (alpha, _) = self.profile.eval(t)?;
        Ok(t.powf(-alpha) * recip_gamma(1.0 - alpha))
    }

    /// The constant-order branch beta_{1-alpha0}(t) = t^{-alpha0}/Gamma(1-alpha0).
    pub fn eval_beta0(&self, t: f64) -> f64 {
        t.powf(-self.alpha0) * self.rg0
    }

    /// gtilde(t) = k(t) - t^{-alpha0}/Gamma(1-alpha0), with gtilde(0) = 0.
    pub fn eval_gtilde(&self, t: f64) -> Result<f64> {
        if t < 0.0 {
            return Err(Error::Domain(format!("gtilde requires t >= 0, got {t}")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        Ok(self.eval_abel_kernel(t)? - self.eval_beta0(t))
    }

    /// Analytic derivative of the closed-form difference:
    /// gtilde'(t) = k(t) [ -alpha'(t) ln t - alpha(t)/t + psi(1-alpha(t)) alpha'(t) ]
    ///              + alpha0 t^{-alpha0-1} / Gamma(1-alpha0).
    pub fn eval_gtilde_prime(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("gtilde' requires t > 0, got {t}")));
        }
        let (alpha, alpha_p) = self.profile.eval(t)?;
        let k = t.powf(-alpha) * recip_gamma(1.0 - alpha);
        let log_deriv = -alpha_p * t.ln() - alpha / t + digamma_fn(1.0 - alpha)? * alpha_p;
        Ok(k * log_deriv + self.alpha0 * t.powf(-self.alpha0 - 1.0) * self.rg0)
    }

    /// Exact cell integrals of gtilde' over the time cells [t_j, t_{j+1}]:
    /// weights[j] = gtilde(t_{j+1}) - gtilde(t_j), which telescope to
    /// gtilde(t_n). No pointwise quadrature touches the singularity at 0.
    pub fn convolution_weights(&self, dt: f64, n: usize) -> Result<Vec<f64>> {
        if !(dt > 0.0) {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        if n as f64 * dt > self.t_end * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "n*dt = {} exceeds the kernel horizon {}",
                n as f64 * dt,
                self.t_end
            )));
        }
        let mut prev = 0.0; // gtilde(0)
        let mut weights = Vec::with_capacity(n);
        for j in 1..=n {
            let g = self.eval_gtilde((j as f64 * dt).min(self.t_end))?;
            weights.push(g - prev);
            prev = g;
        }
        Ok(weights)
    }

    /// Fit the real-axis bound constants
    /// C_g = max |gtilde| / (t^{1-alpha0} (1+|ln t|)) and
    /// C_gp = max |gtilde'| / (t^{-alpha0} (1+|ln t|)) over the grid, and
    /// check that the constants are not blowing up toward t -> 0.
    pub fn verify_kernel_bounds(&self, t_grid: &[f64]) -> Result<KernelBoundReport> {
        if t_grid.is_empty() {
            return Err(Error::Argument("kernel bound grid is empty".into()));
        }
        let mut c_g = 0.0f64;
        let mut c_gp = 0.0f64;
        let mut c_g_small = 0.0f64;
        let mut c_gp_small = 0.0f64;
        for &t in t_grid {
            if !(t > 0.0 && t <= self.t_end) {
                return Err(Error::Argument(format!(
                    "grid point {t} outside (0, {}]",
                    self.t_end
                )));
            }
            let envelope = 1.0 + t.ln().abs();
            let rg = self.eval_gtilde(t)?.abs() / (t.powf(1.0 - self.alpha0) * envelope);
            let rgp = self.eval_gtilde_prime(t)?.abs() / (t.powf(-self.alpha0) * envelope);
            c_g = c_g.max(rg);
            c_gp = c_gp.max(rgp);
            if t < 1e-2 {
                c_g_small = c_g_small.max(rg);
                c_gp_small = c_gp_small.max(rgp);
            }
        }
        let stable = |small: f64, all: f64| small <= 10.0 * all.max(f64::MIN_POSITIVE) || small == 0.0;
        let pass = c_g.is_finite()
            && c_gp.is_finite()
            && stable(c_g_small, c_g)
            && stable(c_gp_small, c_gp);
        Ok(KernelBoundReport { c_g, c_gp, pass })
    }
}
