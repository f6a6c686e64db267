//! Nonlinearity profiles `f`, the Bogomolny functional `I(w) = ∫_0^w |f|`, and the
//! structural hypotheses a profile must satisfy for the continuity theorem.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{adaptive_simpson, QuadratureError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("profile `{profile}` produced a non-finite value at u = {u}")]
    NonFinite { profile: String, u: f64 },
    #[error("unknown profile `{0}` (expected adkins_nappi, linear, cubic, sine or power)")]
    UnknownProfile(String),
    #[error("profile `{profile}` is missing parameter `{param}`")]
    MissingParameter { profile: String, param: String },
    #[error("invalid profile parameter: {0}")]
    InvalidParameter(String),
    #[error("model parameters invalid: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// A built-in nonlinearity profile. Every built-in is odd in `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Profile {
    /// `f(u) = u - sin u cos u`, the equivariant Adkins–Nappi nonlinearity.
    AdkinsNappi,
    /// `f(u) = u`.
    Linear,
    /// `f(u) = u^3`.
    Cubic,
    /// `f(u) = sin u`.
    Sine,
    /// `f(u) = u |u|^(p-1)`.
    Power { exponent: f64 },
}

impl Profile {
    /// Looks a profile up by name; `power` reads its `exponent` from `params`.
    pub fn from_name<'a, I>(name: &str, params: I) -> Result<Self, ProfileError>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let params: Vec<(&str, f64)> = params.into_iter().collect();
        let lookup = |key: &str| params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let profile = match name {
            "adkins_nappi" => Profile::AdkinsNappi,
            "linear" => Profile::Linear,
            "cubic" => Profile::Cubic,
            "sine" => Profile::Sine,
            "power" => {
                let exponent = lookup("exponent").ok_or_else(|| ProfileError::MissingParameter {
                    profile: name.into(),
                    param: "exponent".into(),
                })?;
                if !(exponent.is_finite() && exponent >= 1.0) {
                    return Err(ProfileError::InvalidParameter(format!(
                        "power exponent must be >= 1, got {exponent}"
                    )));
                }
                Profile::Power { exponent }
            }
            other => return Err(ProfileError::UnknownProfile(other.into())),
        };
        Ok(profile)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Profile::AdkinsNappi => "adkins_nappi",
            Profile::Linear => "linear",
            Profile::Cubic => "cubic",
            Profile::Sine => "sine",
            Profile::Power { .. } => "power",
        }
    }

    pub fn f(&self, u: f64) -> f64 {
        match *self {
            Profile::AdkinsNappi => adkins_nappi_f(u),
            Profile::Linear => u,
            Profile::Cubic => u * u * u,
            Profile::Sine => u.sin(),
            Profile::Power { exponent } => u * u.abs().powf(exponent - 1.0),
        }
    }

    pub fn f_prime(&self, u: f64) -> f64 {
        match *self {
            // 1 - cos 2u, written without cancellation
            Profile::AdkinsNappi => 2.0 * u.sin().powi(2),
            Profile::Linear => 1.0,
            Profile::Cubic => 3.0 * u * u,
            Profile::Sine => u.cos(),
            Profile::Power { exponent } => exponent * u.abs().powf(exponent - 1.0),
        }
    }

    /// `f(u) f'(u)`, the numerator of the singular potential force.
    #[inline]
    pub fn force(&self, u: f64) -> f64 {
        match *self {
            Profile::Linear => u,
            Profile::Cubic => 3.0 * u.powi(5),
            _ => self.f(u) * self.f_prime(u),
        }
    }

    /// Closed-form `∫_0^w |f|`, when one is known.
    pub fn closed_form_bogomolny(&self, w: f64) -> Option<f64> {
        let s = w.signum();
        let a = w.abs();
        match *self {
            // f >= 0 on [0, ∞) since sin 2v <= 2v; antiderivative v²/2 - sin²v/2
            Profile::AdkinsNappi => Some(s * 0.5 * adkins_nappi_gap(a)),
            Profile::Linear => Some(s * 0.5 * a * a),
            Profile::Cubic => Some(s * 0.25 * a.powi(4)),
            Profile::Power { exponent } => Some(s * a.powf(exponent + 1.0) / (exponent + 1.0)),
            Profile::Sine => None,
        }
    }

    /// `(f(u), f'(u))`, rejecting non-finite results.
    pub fn eval_pair(&self, u: f64) -> Result<(f64, f64), ProfileError> {
        let pair = (self.f(u), self.f_prime(u));
        if pair.0.is_finite() && pair.1.is_finite() {
            Ok(pair)
        } else {
            Err(ProfileError::NonFinite { profile: self.to_string(), u })
        }
    }

    /// Oriented Bogomolny functional `I(w) = ∫_0^w |f(v)| dv`.
    pub fn bogomolny(&self, w: f64) -> Result<f64, ProfileError> {
        if let Some(v) = self.closed_form_bogomolny(w) {
            return Ok(v);
        }
        self.bogomolny_quadrature(w)
    }

    /// `I(w)` by adaptive Simpson, ignoring any closed form.
    pub fn bogomolny_quadrature(&self, w: f64) -> Result<f64, ProfileError> {
        Ok(adaptive_simpson(|v| self.f(v).abs(), 0.0, w)?)
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Power { exponent } => write!(f, "power(p={exponent})"),
            other => f.write_str(other.name()),
        }
    }
}

fn adkins_nappi_f(u: f64) -> f64 {
    if u.abs() < 1e-2 {
        // u - sin(2u)/2 = Σ_{k≥1} (-1)^{k+1} (2u)^{2k+1} / (2 (2k+1)!)
        let x = 2.0 * u;
        let x2 = x * x;
        x * x2 * (1.0 / 12.0 - x2 * (1.0 / 240.0 - x2 * (1.0 / 10080.0 - x2 / 725760.0)))
    } else {
        u - u.sin() * u.cos()
    }
}

/// `a² - sin² a`, by series where the direct form cancels.
fn adkins_nappi_gap(a: f64) -> f64 {
    if a < 1e-2 {
        let a2 = a * a;
        a2 * a2 * (1.0 / 3.0 - a2 * (2.0 / 45.0 - a2 * (1.0 / 315.0 - a2 * 2.0 / 14175.0)))
    } else {
        a * a - a.sin().powi(2)
    }
}

/// Spatial dimension `n` and singularity exponent `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: u32,
    pub alpha: f64,
}

impl ModelParams {
    pub fn new(n: u32, alpha: f64) -> Result<Self, ProfileError> {
        let p = ModelParams { n, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        if self.n < 2 {
            return Err(ProfileError::InvalidModel(format!("n must be >= 2, got {}", self.n)));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(ProfileError::InvalidModel(format!("alpha must be > 0, got {}", self.alpha)));
        }
        Ok(())
    }

    /// `max{2(n-1), n+1}`.
    pub fn alpha_threshold(&self) -> f64 {
        let n = self.n as f64;
        (2.0 * (n - 1.0)).max(n + 1.0)
    }

    pub fn n_minus_one(&self) -> f64 {
        self.n as f64 - 1.0
    }
}

/// A complete model: dimension, exponent and nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub params: ModelParams,
    pub profile: Profile,
}

impl Model {
    pub fn new(n: u32, alpha: f64, profile: Profile) -> Result<Self, ProfileError> {
        Ok(Model { params: ModelParams::new(n, alpha)?, profile })
    }

    /// `((n-1)/2) sin²u / r² + f²(u) / (2 r^alpha)`, given `1/r²` and `1/r^alpha`.
    #[inline]
    pub fn potential(&self, u: f64, inv_r2: f64, inv_r_alpha: f64) -> f64 {
        let f = self.profile.f(u);
        0.5 * self.params.n_minus_one() * u.sin().powi(2) * inv_r2 + 0.5 * f * f * inv_r_alpha
    }
}

/// Outcome of a sampled hypothesis check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledCheck {
    pub ok: bool,
    /// Always true: these are sampled, not proven.
    pub sampled: bool,
    pub witness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub profile: String,
    pub n: u32,
    pub alpha: f64,
    pub alpha_threshold: f64,
    pub alpha_ok: bool,
    pub f_zero_ok: bool,
    pub f_prime_at_zero: f64,
    pub f_prime_zero_ok: bool,
    pub sign_condition: SampledCheck,
    pub divergence: SampledCheck,
    /// `I(W) / I(W/2)` at the upper end `W` of the sampled range.
    pub divergence_growth_ratio: f64,
}

impl HypothesisReport {
    pub fn exact_ok(&self) -> bool {
        self.alpha_ok && self.f_zero_ok && self.f_prime_zero_ok
    }

    pub fn sampled_ok(&self) -> bool {
        self.sign_condition.ok && self.divergence.ok
    }

    pub fn all_ok(&self) -> bool {
        self.exact_ok() && self.sampled_ok()
    }
}

/// Growth ratio `I(W)/I(W/2)` must exceed this for the divergence probe to pass.
pub const DIVERGENCE_GROWTH_MIN: f64 = 1.2;

/// Checks the continuity theorem's hypotheses on `(profile, params)`.
///
/// The `alpha` threshold, `f(0) = 0` and `f'(0) != 0` are checked exactly. The sign
/// condition `u f(u) f'(u) >= 0` is sampled on `range` (scanning outward from 0, so the
/// witness is the violation of smallest magnitude), and divergence of `I` is probed by
/// the growth heuristic `I(W)/I(W/2) > 1.2`.
pub fn check_hypotheses(
    profile: &Profile,
    params: &ModelParams,
    range: (f64, f64),
    samples: usize,
) -> Result<HypothesisReport, ProfileError> {
    let (lo, hi) = range;
    if !(lo <= 0.0 && hi >= 0.0 && lo < hi) {
        return Err(ProfileError::InvalidParameter(format!(
            "sample range [{lo}, {hi}] must contain 0"
        )));
    }
    if samples < 100 {
        return Err(ProfileError::InvalidParameter(format!("need >= 100 samples, got {samples}")));
    }
    let threshold = params.alpha_threshold();
    let f_prime_at_zero = profile.f_prime(0.0);

    let mut points: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    points.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(b.total_cmp(a)));
    let witness = points
        .into_iter()
        .find(|&u| u * profile.f(u) * profile.f_prime(u) < 0.0);

    let w = hi;
    let i_full = profile.bogomolny(w)?;
    let i_half = profile.bogomolny(0.5 * w)?;
    let ratio = if i_half != 0.0 { i_full / i_half } else { 0.0 };
    let divergence_ok = w > 0.0 && ratio > DIVERGENCE_GROWTH_MIN;

    Ok(HypothesisReport {
        profile: profile.to_string(),
        n: params.n,
        alpha: params.alpha,
        alpha_threshold: threshold,
        alpha_ok: params.alpha >= threshold,
        f_zero_ok: profile.f(0.0) == 0.0,
        f_prime_at_zero,
        f_prime_zero_ok: f_prime_at_zero != 0.0,
        sign_condition: SampledCheck { ok: witness.is_none(), sampled: true, witness },
        divergence: SampledCheck {
            ok: divergence_ok,
            sampled: true,
            witness: if divergence_ok { None } else { Some(w) },
        },
        divergence_growth_ratio: ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const BUILTINS: [Profile; 5] = [
        Profile::AdkinsNappi,
        Profile::Linear,
        Profile::Cubic,
        Profile::Sine,
        Profile::Power { exponent: 2.5 },
    ];

    #[test]
    fn eval_pair_examples() {
        assert_eq!(Profile::AdkinsNappi.eval_pair(0.0).unwrap(), (0.0, 0.0));
        let (f, fp) = Profile::AdkinsNappi.eval_pair(PI / 2.0).unwrap();
        assert!((f - PI / 2.0).abs() < 1e-15);
        assert!((fp - 2.0).abs() < 1e-15);
        assert_eq!(Profile::Linear.eval_pair(3.0).unwrap(), (3.0, 1.0));
    }

    #[test]
    fn eval_pair_rejects_non_finite() {
        let err = Profile::Power { exponent: 3.0 }.eval_pair(f64::MAX).unwrap_err();
        assert!(matches!(err, ProfileError::NonFinite { .. }));
    }

    #[test]
    fn adkins_nappi_series_matches_direct_form() {
        for &u in &[1e-2_f64, -1e-2, 0.0099, 5e-3] {
            let direct = u - u.sin() * u.cos();
            let series = adkins_nappi_f(u * (1.0 - 1e-12));
            assert!((direct - series).abs() < 1e-15, "u={u}");
        }
        // tiny arguments keep the sign of u
        assert!(adkins_nappi_f(1e-7) > 0.0);
        assert!(adkins_nappi_f(-1e-7) < 0.0);
    }

    #[test]
    fn bogomolny_examples() {
        for p in BUILTINS {
            assert_eq!(p.bogomolny(0.0).unwrap(), 0.0);
        }
        assert_eq!(Profile::Linear.bogomolny(2.0).unwrap(), 2.0);
        assert_eq!(Profile::Linear.bogomolny(-2.0).unwrap(), -2.0);
        let v = Profile::AdkinsNappi.bogomolny(PI).unwrap();
        assert!((v - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn closed_forms_agree_with_quadrature() {
        for p in BUILTINS {
            for &w in &[-7.3, -1.0, 0.4, 2.0, PI, 9.9] {
                if let Some(exact) = p.closed_form_bogomolny(w) {
                    let q = p.bogomolny_quadrature(w).unwrap();
                    assert!((exact - q).abs() <= 1e-8 * (1.0 + exact.abs()), "{p} w={w}: {exact} vs {q}");
                }
            }
        }
    }

    #[test]
    fn sine_uses_quadrature() {
        assert!(Profile::Sine.closed_form_bogomolny(1.0).is_none());
        let v = Profile::Sine.bogomolny(2.0 * PI).unwrap();
        assert!((v - 4.0).abs() < 1e-8);
    }

    #[test]
    fn hypotheses_adkins_nappi() {
        let r = check_hypotheses(&Profile::AdkinsNappi, &ModelParams::new(3, 4.0).unwrap(), (-10.0, 10.0), 1000)
            .unwrap();
        assert!(r.alpha_ok);
        assert_eq!(r.alpha_threshold, 4.0);
        assert!(r.f_zero_ok);
        assert!(!r.f_prime_zero_ok);
        assert!(r.sign_condition.ok);
        assert!(!r.exact_ok());
    }

    #[test]
    fn hypotheses_linear_n2() {
        let r = check_hypotheses(&Profile::Linear, &ModelParams::new(2, 3.0).unwrap(), (-10.0, 10.0), 1000).unwrap();
        assert_eq!(r.alpha_threshold, 3.0);
        assert!(r.all_ok(), "{r:?}");
        assert_eq!(r.divergence_growth_ratio, 4.0);
    }

    #[test]
    fn hypotheses_sine_violates_sign_condition() {
        let r = check_hypotheses(&Profile::Sine, &ModelParams::new(3, 4.0).unwrap(), (-10.0, 10.0), 1000).unwrap();
        assert!(!r.sign_condition.ok);
        let w = r.sign_condition.witness.unwrap();
        assert!(w * w.sin() * w.cos() < 0.0);
        assert!(3.0 * 3.0f64.sin() * 3.0f64.cos() < 0.0);
        // divergence of ∫|sin| is linear growth
        assert!(r.divergence.ok);
    }

    #[test]
    fn hypotheses_reject_bad_sampling() {
        let p = ModelParams::new(3, 4.0).unwrap();
        assert!(check_hypotheses(&Profile::Linear, &p, (1.0, 2.0), 1000).is_err());
        assert!(check_hypotheses(&Profile::Linear, &p, (-1.0, 1.0), 50).is_err());
    }

    #[test]
    fn model_params_validation() {
        assert!(ModelParams::new(1, 4.0).is_err());
        assert!(ModelParams::new(3, 0.0).is_err());
        assert!(ModelParams::new(3, f64::NAN).is_err());
    }

    #[test]
    fn profile_lookup() {
        assert_eq!(Profile::from_name("linear", []).unwrap(), Profile::Linear);
        assert_eq!(
            Profile::from_name("power", [("exponent", 3.0)]).unwrap(),
            Profile::Power { exponent: 3.0 }
        );
        assert!(Profile::from_name("power", []).is_err());
        assert!(Profile::from_name("tanh", []).is_err());
    }

    proptest! {
        #[test]
        fn derivative_matches_central_difference(u in -10.0f64..10.0) {
            let h = 1e-4;
            for p in BUILTINS {
                let fd = (p.f(u + h) - p.f(u - h)) / (2.0 * h);
                // C·h² with C covering |f'''|/6 and the rounding floor
                let tol = 50.0 * h * h * (1.0 + u.abs().powi(2)) + 1e-9;
                prop_assert!((p.f_prime(u) - fd).abs() <= tol, "{} at {}: {} vs {}", p, u, p.f_prime(u), fd);
            }
        }

        #[test]
        fn bogomolny_sign_property(w in -10.0f64..10.0) {
            for p in BUILTINS {
                let i = p.bogomolny(w).unwrap();
                prop_assert!(i * w >= 0.0);
                if w != 0.0 {
                    prop_assert!(i * w > 0.0);
                }
            }
        }

        #[test]
        fn bogomolny_monotone(a in -10.0f64..10.0, d in 0.0f64..5.0) {
            for p in BUILTINS {
                prop_assert!(p.bogomolny(a + d).unwrap() >= p.bogomolny(a).unwrap() - 1e-12);
            }
        }

        #[test]
        fn alpha_flag_is_exact_comparison(n in 2u32..12, alpha in 0.01f64..30.0) {
            let params = ModelParams::new(n, alpha).unwrap();
            let r = check_hypotheses(&Profile::Linear, &params, (-1.0, 1.0), 100).unwrap();
            let direct = alpha >= (2.0 * (n as f64 - 1.0)).max(n as f64 + 1.0);
            prop_assert_eq!(r.alpha_ok, direct);
        }
    }
}
