//! Closed-form scalar fields on ℍⁿ and the transforms that act on them.
//!
//! Two families carry all the structure:
//!
//! - the bubbles K·|t + i|z|² + μ·z + κ|^{−(Q−2)/2} with Im κ > |μ|²/4
//!   (so the modulus never vanishes), μ·z = Σ μ_j z_j;
//! - the one-parameter profiles f_β(z, t) = |t + i|z|² + iβ|^{−ν/2},
//!   the μ = 0, κ = iβ bubbles with a free decay exponent ν.
//!
//! Around them: the radius map λ(ξ) = |w̄′ − iβ|^{1/2} that makes f_β a
//! fixed point of reflection, the generalized Kelvin transform
//! (λ/d)^{Q−2}·u∘Φ, and the asymptotic functionals α_f (decay
//! coefficient) and β_f recovered from samples along rays to infinity.

use std::sync::Arc;

use num_complex::Complex64;

use crate::crmaps::GCRInversion;
use crate::error::{Error, Result};
use crate::hgroup::{dist, homogeneous_dimension, koranyi_norm, HPoint};

/// Parameters of a bubble K·|t + i|z|² + μ·z + κ|^{−(Q−2)/2}.
///
/// Validation is strict — `Im κ > |μ|²/4` with no ε-slack — because a
/// degenerate parameter set is a caller bug, not a numerical edge case.
#[derive(Debug, Clone, PartialEq)]
pub struct BubbleParams {
    k: f64,
    mu: Vec<Complex64>,
    kappa: Complex64,
}

impl BubbleParams {
    pub fn new(k: f64, mu: Vec<Complex64>, kappa: Complex64) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::Domain {
                op: "BubbleParams",
                reason: "μ must have length n >= 1".into(),
            });
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::Domain {
                op: "BubbleParams",
                reason: format!("K must be positive and finite, got {k}"),
            });
        }
        let mu_sq: f64 = mu.iter().map(|c| c.norm_sqr()).sum();
        if !(kappa.im > mu_sq / 4.0) {
            return Err(Error::Domain {
                op: "BubbleParams",
                reason: format!(
                    "need Im κ > |μ|²/4 strictly: Im κ = {}, |μ|²/4 = {}",
                    kappa.im,
                    mu_sq / 4.0
                ),
            });
        }
        Ok(BubbleParams { k, mu, kappa })
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn mu(&self) -> &[Complex64] {
        &self.mu
    }

    pub fn kappa(&self) -> Complex64 {
        self.kappa
    }

    /// Same shape, different amplitude.
    pub fn with_k(&self, k: f64) -> Result<Self> {
        BubbleParams::new(k, self.mu.clone(), self.kappa)
    }

    /// |μ|² = Σ |μ_j|².
    pub fn mu_norm_sq(&self) -> f64 {
        self.mu.iter().map(|c| c.norm_sqr()).sum()
    }

    /// The complex affine symbol q(a) = t + i|z|² + μ·z + κ whose modulus
    /// the bubble is a power of.
    pub fn q(&self, a: &HPoint) -> Complex64 {
        let mu_dot_z: Complex64 = self.mu.iter().zip(a.z()).map(|(m, z)| m * z).sum();
        a.w() + mu_dot_z + self.kappa
    }

    /// Where the bubble attains its maximum: the unique minimizer of |q|,
    /// (z*, t*) = (−iμ̄/2, −Re κ).
    pub fn max_point(&self) -> HPoint {
        let z = self
            .mu
            .iter()
            .map(|m| Complex64::new(0.0, -0.5) * m.conj())
            .collect();
        HPoint::new(z, -self.kappa.re)
    }

    /// Parameters of u ∘ τ_{ξ′} with ξ′ = [`Self::max_point`]: the
    /// left-translated bubble has μ = 0 and κ = i(Im κ − |μ|²/4), i.e. it
    /// is K·f_β with β = Im κ − |μ|²/4 (and ν = Q−2). Exact, not a fit.
    pub fn centered(&self) -> BubbleParams {
        let beta = self.kappa.im - self.mu_norm_sq() / 4.0;
        BubbleParams {
            k: self.k,
            mu: vec![Complex64::new(0.0, 0.0); self.n()],
            kappa: Complex64::new(0.0, beta),
        }
    }
}

/// Parameters of f_β(z, t) = |t + i|z|² + iβ|^{−ν/2}.
///
/// Any real ν is accepted for bare evaluation; the decay functionals
/// additionally need ν > 0, enforced where they are computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FBetaParams {
    pub nu: f64,
    pub beta: f64,
}

/// A positive scalar field on ℍⁿ: one of the closed-form families, or an
/// opaque caller-supplied function (used for stress tests and
/// counterexamples). Evaluation is pure; cloning is cheap.
#[derive(Clone)]
pub enum ScalarField {
    Bubble(BubbleParams),
    FBeta { n: usize, params: FBetaParams },
    Blackbox {
        n: usize,
        eval: BlackboxFn,
    },
}

/// Shared pointer to an opaque field evaluator.
pub type BlackboxFn = Arc<dyn Fn(&HPoint) -> Result<f64> + Send + Sync>;

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScalarField::Bubble(p) => f.debug_tuple("Bubble").field(p).finish(),
            ScalarField::FBeta { n, params } => f
                .debug_struct("FBeta")
                .field("n", n)
                .field("params", params)
                .finish(),
            ScalarField::Blackbox { n, .. } => {
                f.debug_struct("Blackbox").field("n", n).finish_non_exhaustive()
            }
        }
    }
}

impl ScalarField {
    pub fn bubble(params: BubbleParams) -> Self {
        ScalarField::Bubble(params)
    }

    pub fn fbeta(n: usize, params: FBetaParams) -> Self {
        ScalarField::FBeta { n, params }
    }

    pub fn blackbox(
        n: usize,
        eval: impl Fn(&HPoint) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        ScalarField::Blackbox {
            n,
            eval: Arc::new(eval),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            ScalarField::Bubble(p) => p.n(),
            ScalarField::FBeta { n, .. } => *n,
            ScalarField::Blackbox { n, .. } => *n,
        }
    }

    pub fn eval(&self, a: &HPoint) -> Result<f64> {
        match self {
            ScalarField::Bubble(p) => bubble_eval(p, a),
            ScalarField::FBeta { params, .. } => fbeta_eval(params, a),
            ScalarField::Blackbox { eval, .. } => eval(a),
        }
    }
}

/// K·|q(a)|^{−(Q−2)/2}; note (Q−2)/2 = n. Never singular thanks to the
/// parameter invariant: |q| ≥ Im q = |z + iμ̄/2|² + (Im κ − |μ|²/4) > 0.
pub fn bubble_eval(p: &BubbleParams, a: &HPoint) -> Result<f64> {
    if a.n() != p.n() {
        return Err(Error::Dimension {
            op: "bubble_eval",
            expected: p.n(),
            got: a.n(),
        });
    }
    Ok(p.k * p.q(a).norm().powf(-(p.n() as f64)))
}

/// f_β(a) = |t + i|z|² + iβ|^{−ν/2}. Singular where the modulus
/// vanishes, which happens only for β ≤ 0 (at |z|² = −β, t = 0).
pub fn fbeta_eval(p: &FBetaParams, a: &HPoint) -> Result<f64> {
    let m = (a.w() + Complex64::new(0.0, p.beta)).norm();
    if m == 0.0 {
        return Err(Error::Singular {
            op: "fbeta_eval",
            reason: format!(
                "|t + i|z|² + iβ| = 0 at t = {}, |z|² = {}, β = {}",
                a.t(),
                a.z_norm_sq(),
                p.beta
            ),
        });
    }
    Ok(m.powf(-p.nu / 2.0))
}

/// The radius map λ(ξ) = |w̄′ − iβ|^{1/2}, w′ = t′ + i|z′|². Satisfies
/// λ(ξ)^ν f_β(ξ) = 1 identically (|w̄′ − iβ| = |w′ + iβ|), which is the
/// α = 1 case of the scaling identity tying radius to field value.
pub fn lambda_of_xi(p: &FBetaParams, xi: &HPoint) -> Result<f64> {
    let m = (xi.w().conj() - Complex64::new(0.0, p.beta)).norm();
    if m == 0.0 {
        return Err(Error::Domain {
            op: "lambda_of_xi",
            reason: format!(
                "degenerate radius: w̄′ − iβ = 0 at t′ = {}, |z′|² = {}, β = {}",
                xi.t(),
                xi.z_norm_sq(),
                p.beta
            ),
        });
    }
    Ok(m.sqrt())
}

/// Generalized Kelvin transform of `u` with center ξ, radius λ, phase β:
///
/// ```text
/// u_{ξ,λ}^β(η) = (λ / d(η, ξ))^{Q−2} · u(Φ_{ξ,λ}^β(η))
/// ```
///
/// Composes Φ on the fly; no caching, so the double-transform test
/// exercises exactly the code under test.
pub fn kelvin(u: &ScalarField, xi: &HPoint, lambda: f64, beta: f64, eta: &HPoint) -> Result<f64> {
    let phi = GCRInversion::new(xi.clone(), lambda, beta)?;
    kelvin_with(u, &phi, eta)
}

/// [`kelvin`] against a prebuilt inversion — the hot-loop variant used by
/// sampling code.
pub fn kelvin_with(u: &ScalarField, phi: &GCRInversion, eta: &HPoint) -> Result<f64> {
    let d = dist(eta, phi.xi())?;
    if d == 0.0 {
        return Err(Error::Singular {
            op: "kelvin",
            reason: "evaluation at the transform center".into(),
        });
    }
    let q = homogeneous_dimension(eta.n()) as f64;
    Ok((phi.lambda() / d).powf(q - 2.0) * u.eval(&phi.apply(eta)?)?)
}

/// Relative residual of the ν-homogeneous reflection law
///
/// ```text
/// f_β(ζ) = (λ(ξ)/d(ζ, ξ))^ν · f_β(Φ_{ξ,λ(ξ)}^β(ζ)),
/// ```
///
/// the identity that makes f_β the fixed point of its own reflections at
/// the radius [`lambda_of_xi`] — for *every* ν, not just the conformal
/// exponent Q−2.
pub fn fbeta_reflection_residual(p: &FBetaParams, xi: &HPoint, zeta: &HPoint) -> Result<f64> {
    let lambda = lambda_of_xi(p, xi)?;
    let phi = GCRInversion::new(xi.clone(), lambda, p.beta)?;
    let d = dist(zeta, xi)?;
    if d == 0.0 {
        return Err(Error::Singular {
            op: "fbeta_reflection_residual",
            reason: "ζ = ξ".into(),
        });
    }
    let lhs = fbeta_eval(p, zeta)?;
    let rhs = (lambda / d).powf(p.nu) * fbeta_eval(p, &phi.apply(zeta)?)?;
    Ok((lhs - rhs).abs() / lhs.abs().max(rhs.abs()))
}

/// Sampling radii for the decay functionals, in Korányi gauge.
pub const ALPHA_RADII: [f64; 3] = [1e2, 1e3, 1e4];

/// Relative disagreement across rays beyond which the field is declared
/// outside the admissible (ν-decay) class.
pub const ALPHA_RAY_AGREEMENT: f64 = 1e-3;

/// Estimate the decay coefficient α_f = lim |ζ|_H^ν f(ζ) and the induced
/// parameter β_f = α_f^{2/ν}·f(0)^{−2/ν}.
///
/// Samples g(R) = R^ν f along 2n+2 rays — the t-axis in both directions
/// and the 2n real coordinate directions in z — at gauge radii
/// [`ALPHA_RADII`], then extrapolates each ray to R = ∞ by a quadratic
/// Neville scheme in x = 1/R². (For the closed-form families the error
/// is O(R⁻²) on z-rays and O(R⁻⁴) on the t-axis, so x is the natural
/// variable; validated against the exact α.) Refuses to answer — a
/// no-limit error — when the per-ray increments fail to shrink or the
/// ray limits disagree beyond [`ALPHA_RAY_AGREEMENT`] relative.
pub fn alpha_beta_of(f: &ScalarField, nu: f64) -> Result<(f64, f64)> {
    if !(nu > 0.0) {
        return Err(Error::Domain {
            op: "alpha_beta_of",
            reason: format!("decay exponent must be positive, got {nu}"),
        });
    }
    let n = f.n();
    let mut ray_limits = Vec::with_capacity(2 * n + 2);
    for ray in rays(n) {
        let mut g = [0.0f64; 3];
        for (i, &r) in ALPHA_RADII.iter().enumerate() {
            let p = ray(r);
            g[i] = koranyi_norm(&p).powf(nu) * f.eval(&p)?;
        }
        let d1 = (g[1] - g[0]).abs();
        let d2 = (g[2] - g[1]).abs();
        if d2 > d1.max(1e-6 * (1.0 + g[2].abs())) {
            return Err(Error::NoLimit {
                op: "alpha_beta_of",
                reason: format!(
                    "ray samples {g:?} are not settling (increments {d1:.3e} → {d2:.3e})"
                ),
            });
        }
        let x: Vec<f64> = ALPHA_RADII.iter().map(|r| 1.0 / (r * r)).collect();
        ray_limits.push(neville_at_zero(&x, &g));
    }
    let mean = ray_limits.iter().sum::<f64>() / ray_limits.len() as f64;
    let spread = ray_limits
        .iter()
        .map(|v| (v - mean).abs())
        .fold(0.0, f64::max);
    if spread > ALPHA_RAY_AGREEMENT * mean.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NoLimit {
            op: "alpha_beta_of",
            reason: format!(
                "ray limits {ray_limits:?} disagree by {spread:.3e} relative to mean {mean:.3e}"
            ),
        });
    }
    let alpha = mean;
    let f0 = f.eval(&HPoint::identity(n))?;
    if !(alpha > 0.0) || !(f0 > 0.0) {
        return Err(Error::Domain {
            op: "alpha_beta_of",
            reason: format!("need α > 0 and f(0) > 0, got α = {alpha}, f(0) = {f0}"),
        });
    }
    let beta = alpha.powf(2.0 / nu) * f0.powf(-2.0 / nu);
    Ok((alpha, beta))
}

/// The 2n+2 sampling rays, each parametrized by gauge radius: t-axis up,
/// t-axis down, then ±-free positive directions x_j and y_j.
fn rays(n: usize) -> Vec<Box<dyn Fn(f64) -> HPoint>> {
    let mut out: Vec<Box<dyn Fn(f64) -> HPoint>> = Vec::with_capacity(2 * n + 2);
    out.push(Box::new(move |r: f64| {
        HPoint::new(vec![Complex64::new(0.0, 0.0); n], r * r)
    }));
    out.push(Box::new(move |r: f64| {
        HPoint::new(vec![Complex64::new(0.0, 0.0); n], -r * r)
    }));
    for j in 0..n {
        for im in [false, true] {
            out.push(Box::new(move |r: f64| {
                let mut z = vec![Complex64::new(0.0, 0.0); n];
                z[j] = if im {
                    Complex64::new(0.0, r)
                } else {
                    Complex64::new(r, 0.0)
                };
                HPoint::new(z, 0.0)
            }));
        }
    }
    out
}

/// Value at 0 of the quadratic through (x_i, g_i): two Richardson stages.
fn neville_at_zero(x: &[f64], g: &[f64]) -> f64 {
    let p01 = (x[0] * g[1] - x[1] * g[0]) / (x[0] - x[1]);
    let p12 = (x[1] * g[2] - x[2] * g[1]) / (x[1] - x[2]);
    (x[0] * p12 - x[2] * p01) / (x[0] - x[2])
}

// ── JSON field specifications ────────────────────────────────────────────
//
// The on-disk schema shared by the CLI and the test corpus:
//
//   {"kind":"bubble","n":1,"K":1.0,"mu":[[0.1,-0.2]],"kappa":[0.0,1.0]}
//   {"kind":"fbeta","n":1,"nu":2.0,"beta":4.0}
//
// Complex numbers are [re, im] pairs. Unknown or missing fields are
// rejected with a message naming the offender.

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct BubbleSpecJson {
    #[allow(dead_code)]
    kind: String,
    n: usize,
    #[serde(rename = "K")]
    k: f64,
    mu: Vec<[f64; 2]>,
    kappa: [f64; 2],
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct FBetaSpecJson {
    #[allow(dead_code)]
    kind: String,
    n: usize,
    nu: f64,
    beta: f64,
}

/// Parse a field from its JSON spec. Errors carry the failing field or
/// the parameter-validation reason verbatim.
pub fn field_from_json(s: &str) -> Result<ScalarField> {
    let value: serde_json::Value = serde_json::from_str(s).map_err(|e| Error::Parse {
        what: "field spec".into(),
        reason: e.to_string(),
    })?;
    let kind = value
        .get("kind")
        .and_then(|k| k.as_str())
        .ok_or_else(|| Error::Parse {
            what: "field spec".into(),
            reason: "missing or non-string \"kind\" (expected \"bubble\" or \"fbeta\")".into(),
        })?;
    match kind {
        "bubble" => {
            let spec: BubbleSpecJson =
                serde_json::from_value(value).map_err(|e| Error::Parse {
                    what: "bubble field spec".into(),
                    reason: e.to_string(),
                })?;
            if spec.mu.len() != spec.n {
                return Err(Error::Parse {
                    what: "bubble field spec".into(),
                    reason: format!("\"mu\" has {} entries but \"n\" = {}", spec.mu.len(), spec.n),
                });
            }
            let mu = spec.mu.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
            let kappa = Complex64::new(spec.kappa[0], spec.kappa[1]);
            Ok(ScalarField::bubble(BubbleParams::new(spec.k, mu, kappa)?))
        }
        "fbeta" => {
            let spec: FBetaSpecJson =
                serde_json::from_value(value).map_err(|e| Error::Parse {
                    what: "fbeta field spec".into(),
                    reason: e.to_string(),
                })?;
            if spec.n == 0 {
                return Err(Error::Parse {
                    what: "fbeta field spec".into(),
                    reason: "\"n\" must be at least 1".into(),
                });
            }
            Ok(ScalarField::fbeta(
                spec.n,
                FBetaParams {
                    nu: spec.nu,
                    beta: spec.beta,
                },
            ))
        }
        other => Err(Error::Parse {
            what: "field spec".into(),
            reason: format!("unknown kind {other:?} (expected \"bubble\" or \"fbeta\")"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hgroup::{self, group_mul};
    use crate::rng;
    use rand::Rng;

    fn pt1(re: f64, im: f64, t: f64) -> HPoint {
        HPoint::new(vec![Complex64::new(re, im)], t)
    }

    fn random_bubble(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> BubbleParams {
        let mu: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let mu_sq: f64 = mu.iter().map(|c| c.norm_sqr()).sum();
        let kappa = Complex64::new(
            rng.gen_range(-1.0..1.0),
            mu_sq / 4.0 + rng.gen_range(0.2..2.0),
        );
        BubbleParams::new(rng.gen_range(0.5..3.0), mu, kappa).unwrap()
    }

    #[test]
    fn bubble_point_values_and_validation() {
        // n = 1, K = 1, μ = 0, κ = i: value |i|^{−1} = 1 at the origin.
        let p = BubbleParams::new(
            1.0,
            vec![Complex64::new(0.0, 0.0)],
            Complex64::new(0.0, 1.0),
        )
        .unwrap();
        assert_eq!(bubble_eval(&p, &HPoint::identity(1)).unwrap(), 1.0);

        // Strictness of Im κ > |μ|²/4.
        assert!(BubbleParams::new(
            1.0,
            vec![Complex64::new(2.0, 0.0)],
            Complex64::new(0.0, 1.0),
        )
        .is_err());
        assert!(BubbleParams::new(
            0.0,
            vec![Complex64::new(0.0, 0.0)],
            Complex64::new(0.0, 1.0),
        )
        .is_err());
    }

    #[test]
    fn bubble_decays_like_gauge_to_minus_q_minus_2() {
        let mut rng = rng::root(20);
        for n in [1usize, 2] {
            let p = random_bubble(&mut rng, n);
            let a = HPoint::new(vec![Complex64::new(0.0, 0.0); n], 1e6); // gauge 10³
            let q = homogeneous_dimension(n) as f64;
            let scaled = koranyi_norm(&a).powf(q - 2.0) * bubble_eval(&p, &a).unwrap();
            assert!(
                (scaled - p.k()).abs() <= 1e-3 * p.k(),
                "n={n}: {scaled} vs K={}",
                p.k()
            );
        }
    }

    #[test]
    fn bubble_with_zero_mu_is_a_scaled_fbeta() {
        let p = BubbleParams::new(
            2.5,
            vec![Complex64::new(0.0, 0.0); 2],
            Complex64::new(0.0, 1.7),
        )
        .unwrap();
        let f = FBetaParams { nu: 4.0, beta: 1.7 }; // ν = Q−2 at n = 2
        let mut rng = rng::root(21);
        for _ in 0..100 {
            let a = hgroup::random_in_box(&mut rng, 2, 2.0, 4.0);
            let lhs = bubble_eval(&p, &a).unwrap();
            let rhs = 2.5 * fbeta_eval(&f, &a).unwrap();
            assert!((lhs - rhs).abs() <= 1e-14 * lhs);
        }
    }

    #[test]
    fn fbeta_point_values() {
        let p = FBetaParams { nu: 2.0, beta: 4.0 };
        assert_eq!(fbeta_eval(&p, &HPoint::identity(1)).unwrap(), 0.25); // β^{−ν/2}
        let on_axis = fbeta_eval(&p, &pt1(0.0, 0.0, 3.0)).unwrap();
        assert!((on_axis - 25.0f64.powf(-0.5)).abs() < 1e-15); // (t²+β²)^{−ν/4}
        let flat = FBetaParams { nu: 0.0, beta: 2.0 };
        assert_eq!(fbeta_eval(&flat, &pt1(1.0, -2.0, 0.5)).unwrap(), 1.0);
        // Vanishing modulus: β = −|z|², t = 0.
        let sing = FBetaParams { nu: 2.0, beta: -1.0 };
        assert!(fbeta_eval(&sing, &pt1(1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn radius_map_values_and_consistency() {
        let p = FBetaParams { nu: 2.0, beta: 4.0 };
        assert_eq!(lambda_of_xi(&p, &HPoint::identity(1)).unwrap(), 2.0);
        let at_t3 = lambda_of_xi(&p, &pt1(0.0, 0.0, 3.0)).unwrap();
        assert!((at_t3 - 5.0f64.sqrt()).abs() < 1e-15);

        // λ(ξ)^ν f_β(ξ) = 1 identically.
        let mut rng = rng::root(22);
        for _ in 0..300 {
            let nu = rng.gen_range(0.5..5.0);
            let beta = rng.gen_range(0.2..4.0);
            let p = FBetaParams { nu, beta };
            let xi = hgroup::random_in_box(&mut rng, 2, 2.0, 4.0);
            let prod = lambda_of_xi(&p, &xi).unwrap().powf(nu) * fbeta_eval(&p, &xi).unwrap();
            assert!((prod - 1.0).abs() <= 1e-12, "got {prod}");
        }

        // Degenerate: ξ = 0, β = 0.
        let z = FBetaParams { nu: 2.0, beta: 0.0 };
        assert!(lambda_of_xi(&z, &HPoint::identity(1)).is_err());
    }

    #[test]
    fn reflection_law_at_the_symmetric_radius() {
        let mut rng = rng::root(23);
        for _ in 0..50 {
            let n = 1 + rng.gen_range(0..3usize);
            let p = FBetaParams {
                nu: rng.gen_range(0.5..5.0),
                beta: rng.gen_range(0.3..3.0),
            };
            let xi = hgroup::random_in_box(&mut rng, n, 1.5, 2.0);
            for _ in 0..20 {
                let zeta = hgroup::random_in_box(&mut rng, n, 2.0, 4.0);
                if dist(&zeta, &xi).unwrap() < 1e-2 {
                    continue;
                }
                let res = fbeta_reflection_residual(&p, &xi, &zeta).unwrap();
                assert!(res <= 1e-10, "residual {res}");
            }
        }
    }

    #[test]
    fn kelvin_fixes_fbeta_and_is_an_involution() {
        let mut rng = rng::root(24);
        let p = FBetaParams { nu: 4.0, beta: 1.3 }; // ν = Q−2 at n = 2
        let u = ScalarField::fbeta(2, p);
        let xi = HPoint::new(vec![Complex64::new(0.3, -0.1), Complex64::new(0.0, 0.6)], 0.8);
        let lambda = lambda_of_xi(&p, &xi).unwrap();
        for _ in 0..200 {
            let eta = hgroup::random_in_box(&mut rng, 2, 2.0, 4.0);
            if dist(&eta, &xi).unwrap() < 1e-2 {
                continue;
            }
            let k = kelvin(&u, &xi, lambda, p.beta, &eta).unwrap();
            let direct = u.eval(&eta).unwrap();
            assert!((k - direct).abs() <= 1e-10 * direct, "{k} vs {direct}");
        }

        // Double Kelvin at an arbitrary (non-symmetric) radius returns u.
        let bubble = ScalarField::bubble(random_bubble(&mut rng, 2));
        for _ in 0..100 {
            let eta = hgroup::random_in_box(&mut rng, 2, 2.0, 4.0);
            if dist(&eta, &xi).unwrap() < 1e-2 {
                continue;
            }
            let phi = GCRInversion::new(xi.clone(), 1.7, 0.9).unwrap();
            let once = {
                let inner = bubble.clone();
                let xi = xi.clone();
                ScalarField::blackbox(2, move |h: &HPoint| {
                    kelvin(&inner, &xi, 1.7, 0.9, h)
                })
            };
            let twice = kelvin_with(&once, &phi, &eta).unwrap();
            let direct = bubble.eval(&eta).unwrap();
            assert!(
                (twice - direct).abs() <= 1e-9 * direct.abs().max(1.0),
                "{twice} vs {direct}"
            );
        }

        // Constant field, center 0, |η|_H = λ: the factor is 1.
        let one = ScalarField::blackbox(1, |_| Ok(1.0));
        let eta = pt1(0.0, 0.0, 2.25); // gauge 1.5
        let v = kelvin(&one, &HPoint::identity(1), 1.5, 0.4, &eta).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kelvin_rejects_the_center() {
        let u = ScalarField::fbeta(1, FBetaParams { nu: 2.0, beta: 1.0 });
        let xi = pt1(0.1, 0.2, 0.3);
        assert!(kelvin(&u, &xi, 1.0, 1.0, &xi).is_err());
    }

    #[test]
    fn translating_a_bubble_to_its_max_gives_a_pure_profile() {
        let mut rng = rng::root(25);
        for n in [1usize, 2, 3] {
            let p = random_bubble(&mut rng, n);
            let xi = p.max_point();
            let c = p.centered();
            assert!(c.mu().iter().all(|m| m.norm() == 0.0));
            assert!(c.kappa().re == 0.0 && c.kappa().im > 0.0);
            for _ in 0..50 {
                let a = hgroup::random_in_box(&mut rng, n, 2.0, 4.0);
                let translated = bubble_eval(&p, &group_mul(&xi, &a).unwrap()).unwrap();
                let direct = bubble_eval(&c, &a).unwrap();
                assert!(
                    (translated - direct).abs() <= 1e-12 * direct,
                    "n={n}: {translated} vs {direct}"
                );
            }
            // And the max really sits at the origin of the translated field.
            let at_zero = bubble_eval(&c, &HPoint::identity(n)).unwrap();
            for _ in 0..50 {
                let a = hgroup::random_in_box(&mut rng, n, 1.0, 1.0);
                assert!(bubble_eval(&c, &a).unwrap() <= at_zero * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn decay_functionals_on_the_closed_forms() {
        // f_β: α = 1, β_f = β.
        let p = FBetaParams { nu: 2.0, beta: 1.6 };
        let (a, b) = alpha_beta_of(&ScalarField::fbeta(1, p), 2.0).unwrap();
        assert!((a - 1.0).abs() <= 1e-6, "α = {a}");
        assert!((b - 1.6).abs() <= 1e-6, "β_f = {b}");

        // K·f_β: α = K, β_f still β.
        let k = 3.0;
        let scaled = ScalarField::blackbox(1, move |h: &HPoint| Ok(k * fbeta_eval(&p, h)?));
        let (a, b) = alpha_beta_of(&scaled, 2.0).unwrap();
        assert!((a - 3.0).abs() <= 3.0 * 1e-6, "α = {a}");
        assert!((b - 1.6).abs() <= 1e-5, "β_f = {b}");

        // Constant field: no decay, no limit.
        let flat = ScalarField::blackbox(1, |_| Ok(1.0));
        assert!(matches!(
            alpha_beta_of(&flat, 2.0),
            Err(Error::NoLimit { .. })
        ));
    }

    #[test]
    fn json_specs_round_trip_and_reject_junk() {
        let f = field_from_json(r#"{"kind":"fbeta","n":1,"nu":2.0,"beta":4.0}"#).unwrap();
        assert_eq!(f.eval(&HPoint::identity(1)).unwrap(), 0.25);

        let b = field_from_json(
            r#"{"kind":"bubble","n":2,"K":1.5,"mu":[[0.1,-0.2],[0.0,0.3]],"kappa":[0.2,1.0]}"#,
        )
        .unwrap();
        assert_eq!(b.n(), 2);
        assert!(b.eval(&HPoint::identity(2)).unwrap() > 0.0);

        for bad in [
            r#"{"n":1,"nu":2.0,"beta":4.0}"#,                          // no kind
            r#"{"kind":"gauss","n":1}"#,                               // unknown kind
            r#"{"kind":"fbeta","n":1,"nu":2.0}"#,                      // missing beta
            r#"{"kind":"fbeta","n":1,"nu":2.0,"beta":4.0,"x":1}"#,     // extra field
            r#"{"kind":"fbeta","n":0,"nu":2.0,"beta":4.0}"#,           // n = 0
            r#"{"kind":"bubble","n":2,"K":1.0,"mu":[[0,0]],"kappa":[0,1]}"#, // n mismatch
            r#"{"kind":"bubble","n":1,"K":1.0,"mu":[[9,0]],"kappa":[0,1]}"#, // invariant
            r#"{"kind":"fbeta","#,                                     // truncated
        ] {
            assert!(field_from_json(bad).is_err(), "accepted: {bad}");
        }
    }
}
