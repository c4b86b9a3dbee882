//! Desk-scale moving spheres: compare a positive field u with its
//! reflected (Kelvin-transformed) copies u_{ξ,λ}^β over a growing radius
//! λ and locate the critical radius
//!
//! ```text
//! λ̲(ξ) = sup{ μ > 0 : u ≤ u_{ξ,λ}^β on B_λ(ξ) for all λ < μ },
//! ```
//!
//! by Monte-Carlo measurement of the violation set
//! A_λ(ξ) = {ζ ∈ B_λ(ξ) : u(ζ) > u_{ξ,λ}^β(ζ)} and bisection on the
//! zero-violation predicate. For the classified profiles the comparison
//! saturates at λ̲ with exact equality u ≡ u_{ξ,λ̲}^β, and [`moving_spheres_demo`]
//! insists on seeing that equality before reporting.
//!
//! A word on geometry. The reflection Φ maps the Korányi sphere ∂B_λ(ξ)
//! onto itself, but — unlike Euclidean sphere inversion — not pointwise:
//! it shears along the sphere. On ∂B_λ the Kelvin factor is 1, so
//! u − u_K = u − u∘Φ there, and the comparison can only flip cleanly at
//! a single radius when that boundary difference vanishes. It does
//! vanish when ξ sits on the t-axis and u is radial in z (the shear then
//! moves points only within level sets of u): below the critical radius
//! there are no violations at all, above it the whole ball violates.
//! For base points off the t-axis the shear produces a thin layer of
//! sign changes hugging ∂B_λ at *every* radius; the zero-violation
//! predicate never becomes true, and [`estimate_lambda_underline`]
//! reports exactly that (violations already at the window's lower edge)
//! rather than inventing a radius. Grids for the sweep should therefore
//! be taken on the t-axis, with β as the natural second grid dimension.
//!
//! The Terracini-type quantities — the positive-part Dirichlet integral
//! and the violation-set norm factor — are estimated by the same sampler;
//! the sharp constant between them is out of scope, so both are reported
//! raw.

use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::crmaps::GCRInversion;
use crate::error::{Error, Result};
use crate::fields::{kelvin_with, ScalarField};
use crate::hgroup::{ball_volume, sample_ball_with, HPoint};
use crate::rng;
use crate::subcalc::{horizontal_gradient, FDConfig};

/// Relative threshold above which u − u_K counts as a violation (and as
/// membership in the positive-part region for the Terracini integrand).
/// One-sided detection: at the saturation radius the two fields agree to
/// rounding, and this margin keeps that from registering as scattered
/// phantom violations.
pub const VIOLATION_EPS: f64 = 1e-12;

/// Relative tolerance for the saturation-equality assertion in
/// [`moving_spheres_demo`]. The deviation |u − u_K| at the located radius
/// grows linearly with the bisection error, so the sweep's
/// `bisection_steps` must leave a bracket narrower than about
/// `EQUALITY_TOL`·λ̲ or the demo aborts on its own invariant.
pub const EQUALITY_TOL: f64 = 1e-6;

/// Tuning for the sweep: search window, sampling effort, seeds.
#[derive(Debug, Clone, Copy)]
pub struct SweepConfig {
    /// Bisection window; the zero-violation predicate must hold at
    /// `lambda_min` and fail at `lambda_max`.
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Ball samples per violation measurement.
    pub samples: usize,
    /// Bisection iterations after the bracket is validated.
    pub bisection_steps: usize,
    /// Equispaced radii scanned before bisecting, both to seed the
    /// violation curve and to catch a non-monotone predicate.
    pub prescan_points: usize,
    /// Exponent for the Terracini norm factor.
    pub p: f64,
    /// Samples for the Terracini quadrature (gradients are pricier than
    /// point comparisons, so this is typically smaller than `samples`).
    pub terracini_samples: usize,
    /// Samples for the saturation-equality assertion.
    pub equality_samples: usize,
    pub seed: u64,
    pub fd: FDConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            lambda_min: 0.5,
            lambda_max: 4.0,
            samples: 100_000,
            bisection_steps: 30,
            prescan_points: 8,
            p: 3.0,
            terracini_samples: 10_000,
            equality_samples: 10_000,
            seed: 0,
            fd: FDConfig::default(),
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.lambda_min && self.lambda_min < self.lambda_max)
            || !self.lambda_max.is_finite()
        {
            return Err(Error::Domain {
                op: "SweepConfig",
                reason: format!(
                    "need 0 < lambda_min < lambda_max, got ({}, {})",
                    self.lambda_min, self.lambda_max
                ),
            });
        }
        if self.samples < 1_000 {
            return Err(Error::Domain {
                op: "SweepConfig",
                reason: format!("need at least 10³ samples, got {}", self.samples),
            });
        }
        if self.bisection_steps == 0 || self.prescan_points < 2 {
            return Err(Error::Domain {
                op: "SweepConfig",
                reason: "need bisection_steps >= 1 and prescan_points >= 2".into(),
            });
        }
        self.fd.validate()
    }
}

/// One measured radius on the violation curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ViolationPoint {
    pub lambda: f64,
    /// Monte-Carlo estimate of |A_λ(ξ)| (Haar measure).
    pub measure: f64,
    /// Binomial standard error of `measure`.
    pub stderr: f64,
}

/// Terracini quantities at one radius.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TerraciniPoint {
    pub lambda: f64,
    /// ∫_{B_λ(ξ)} |∇_H (u − u_K)⁺|².
    pub lhs: f64,
    /// {∫_{A_λ(ξ)} u^{(p−1)Q/2}}^{2/Q}.
    pub rhs_factor: f64,
}

/// Worst relative violation at one radius. The violating *fraction*
/// jumps from 0 to 1 at λ̲ when the comparison flips on the whole ball
/// at once, so the quantity that decays continuously as λ ↓ λ̲ is this
/// severity, not the measure.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeverityPoint {
    pub lambda: f64,
    /// max over samples of (u − u_K)⁺ / max(u, u_K); 0 when A_λ is empty.
    pub severity: f64,
}

/// Everything measured at one base point ξ.
#[derive(Debug, Clone, Serialize)]
pub struct SphereReport {
    #[serde(serialize_with = "serialize_point")]
    pub xi: HPoint,
    pub beta: f64,
    pub lambda_underline: f64,
    pub lambda_lower: f64,
    pub lambda_upper: f64,
    pub violation_curve: Vec<ViolationPoint>,
    pub terracini: Vec<TerraciniPoint>,
    pub severity_curve: Vec<SeverityPoint>,
    pub samples: usize,
    pub seed: u64,
}

fn serialize_point<S: Serializer>(p: &HPoint, s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct P {
        z: Vec<[f64; 2]>,
        t: f64,
    }
    P {
        z: p.z().iter().map(|c| [c.re, c.im]).collect(),
        t: p.t(),
    }
    .serialize(s)
}

/// Serialize reports as a JSON array (helper so callers don't need to
/// know about the point encoding).
pub fn reports_to_json(reports: &[SphereReport]) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ReportsSeq(reports))?)
}

struct ReportsSeq<'a>(&'a [SphereReport]);

impl Serialize for ReportsSeq<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for r in self.0 {
            seq.serialize_element(r)?;
        }
        seq.end()
    }
}

/// Flatten reports to CSV, one row per violation-curve radius; Terracini
/// columns are filled on the radii where those quantities were measured
/// and left empty elsewhere.
pub fn reports_to_csv(reports: &[SphereReport]) -> String {
    let mut out = String::from("xi_index,lambda,violation_measure,stderr,lhs,rhs_factor\n");
    for (i, r) in reports.iter().enumerate() {
        for v in &r.violation_curve {
            let terr = r
                .terracini
                .iter()
                .find(|t| t.lambda == v.lambda)
                .map(|t| (format!("{}", t.lhs), format!("{}", t.rhs_factor)))
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                i, v.lambda, v.measure, v.stderr, terr.0, terr.1
            ));
        }
    }
    out
}

fn is_violation(u: f64, uk: f64) -> bool {
    u - uk > VIOLATION_EPS * u.abs().max(uk.abs())
}

/// Monte-Carlo estimate of the violation-set measure |A_λ(ξ)| and its
/// binomial standard error, from `k` uniform ball samples.
pub fn violation_measure(
    u: &ScalarField,
    xi: &HPoint,
    lambda: f64,
    beta: f64,
    k: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let mut rng = rng::root(seed);
    violation_measure_with(&mut rng, u, xi, lambda, beta, k)
}

/// [`violation_measure`] drawing from an externally managed stream.
pub fn violation_measure_with(
    rng: &mut ChaCha8Rng,
    u: &ScalarField,
    xi: &HPoint,
    lambda: f64,
    beta: f64,
    k: usize,
) -> Result<(f64, f64)> {
    if k < 1_000 {
        return Err(Error::Domain {
            op: "violation_measure",
            reason: format!("need at least 10³ samples for a usable estimate, got {k}"),
        });
    }
    let phi = GCRInversion::new(xi.clone(), lambda, beta)?;
    let mut hits = 0usize;
    for zeta in sample_ball_with(rng, xi, lambda, k)? {
        if is_violation(u.eval(&zeta)?, kelvin_with(u, &phi, &zeta)?) {
            hits += 1;
        }
    }
    let vol = ball_volume(xi.n(), lambda);
    let frac = hits as f64 / k as f64;
    Ok((vol * frac, vol * (frac * (1.0 - frac) / k as f64).sqrt()))
}

/// Worst relative violation over `k` ball samples (the severity of
/// [`SeverityPoint`]); 0 when no sample violates.
pub fn violation_severity(
    u: &ScalarField,
    xi: &HPoint,
    lambda: f64,
    beta: f64,
    k: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = rng::root(seed);
    violation_severity_with(&mut rng, u, xi, lambda, beta, k)
}

/// [`violation_severity`] drawing from an externally managed stream.
pub fn violation_severity_with(
    rng: &mut ChaCha8Rng,
    u: &ScalarField,
    xi: &HPoint,
    lambda: f64,
    beta: f64,
    k: usize,
) -> Result<f64> {
    let phi = GCRInversion::new(xi.clone(), lambda, beta)?;
    let mut worst = 0.0f64;
    for zeta in sample_ball_with(rng, xi, lambda, k)? {
        let (ua, ka) = (u.eval(&zeta)?, kelvin_with(u, &phi, &zeta)?);
        if is_violation(ua, ka) {
            worst = worst.max((ua - ka) / ua.abs().max(ka.abs()));
        }
    }
    Ok(worst)
}

/// Locate λ̲(ξ) by bisection on the zero-violation predicate.
///
/// First scans `prescan_points` radii across the window: the predicate
/// must read true at `lambda_min`, false at `lambda_max`, and switch only
/// once — a non-monotone scan aborts with a diagnostic rather than
/// letting bisection return a radius that means nothing. Returns the
/// bracket midpoint and the final bracket; the scan results come along
/// for the violation curve.
///
/// A bracket error reporting violations already at `lambda_min` is the
/// expected outcome for off-axis base points (see the module notes on
/// the boundary shear); no window fixes that.
pub fn estimate_lambda_underline(
    u: &ScalarField,
    xi: &HPoint,
    beta: f64,
    cfg: &SweepConfig,
) -> Result<(f64, (f64, f64), Vec<ViolationPoint>)> {
    cfg.validate()?;
    let mut rng = rng::stream(cfg.seed, 1);
    let mut curve = Vec::with_capacity(cfg.prescan_points);
    let mut flips = Vec::new();
    let mut prev_empty: Option<bool> = None;
    for i in 0..cfg.prescan_points {
        let s = i as f64 / (cfg.prescan_points - 1) as f64;
        let lambda = cfg.lambda_min + s * (cfg.lambda_max - cfg.lambda_min);
        let (measure, stderr) =
            violation_measure_with(&mut rng, u, xi, lambda, beta, cfg.samples)?;
        curve.push(ViolationPoint {
            lambda,
            measure,
            stderr,
        });
        let empty = measure == 0.0;
        if let Some(prev) = prev_empty {
            if empty && !prev {
                return Err(Error::Invariant {
                    op: "estimate_lambda_underline",
                    reason: format!(
                        "zero-violation predicate is not monotone: violations at λ = {:.6} but none at λ = {lambda:.6}",
                        curve[i - 1].lambda
                    ),
                });
            }
            if !empty && prev {
                flips.push((curve[i - 1].lambda, lambda));
            }
        }
        prev_empty = Some(empty);
    }
    let first = curve.first().expect("prescan_points >= 2");
    let last = curve.last().expect("prescan_points >= 2");
    if first.measure > 0.0 {
        return Err(Error::Bracket {
            op: "estimate_lambda_underline",
            reason: format!(
                "violations already present at lambda_min = {} (measure {:.3e}); window does not straddle the critical radius",
                cfg.lambda_min, first.measure
            ),
        });
    }
    if last.measure == 0.0 {
        return Err(Error::Bracket {
            op: "estimate_lambda_underline",
            reason: format!(
                "no violations at lambda_max = {}; window does not straddle the critical radius",
                cfg.lambda_max
            ),
        });
    }
    let (mut lo, mut hi) = flips[0]; // exactly one flip after the checks above

    for _ in 0..cfg.bisection_steps {
        let mid = 0.5 * (lo + hi);
        let (measure, _) = violation_measure_with(&mut rng, u, xi, mid, beta, cfg.samples)?;
        if measure == 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi), (lo, hi), curve))
}

/// Monte-Carlo estimates of the two Terracini quantities at radius λ:
/// the positive-part Dirichlet integral over the ball and the violation-
/// set norm factor. The gradient is taken on the smooth difference
/// u − u_K and only at samples detected (one-sidedly, margin
/// [`VIOLATION_EPS`]) inside the violation set, so no stencil ever
/// straddles the kink of the positive part.
#[allow(clippy::too_many_arguments)]
pub fn terracini_quantities(
    u: &ScalarField,
    xi: &HPoint,
    lambda: f64,
    beta: f64,
    p: f64,
    k: usize,
    seed: u64,
    fd: &FDConfig,
) -> Result<(f64, f64)> {
    let n = xi.n();
    let q = crate::hgroup::homogeneous_dimension(n) as f64;
    let critical = (q + 2.0) / (q - 2.0);
    if !(p > 1.0 && p <= critical) {
        return Err(Error::Domain {
            op: "terracini_quantities",
            reason: format!("exponent must satisfy 1 < p <= {critical}, got {p}"),
        });
    }
    let phi = GCRInversion::new(xi.clone(), lambda, beta)?;
    let diff = {
        let u = u.clone();
        let phi = phi.clone();
        ScalarField::blackbox(n, move |zeta: &HPoint| {
            Ok(u.eval(zeta)? - kelvin_with(&u, &phi, zeta)?)
        })
    };
    let mut rng = rng::root(seed);
    let mut grad_sq_sum = 0.0;
    let mut norm_sum = 0.0;
    for zeta in sample_ball_with(&mut rng, xi, lambda, k)? {
        let ua = u.eval(&zeta)?;
        if !is_violation(ua, kelvin_with(u, &phi, &zeta)?) {
            continue;
        }
        let g = horizontal_gradient(&diff, &zeta, fd)?;
        grad_sq_sum += g.iter().map(|v| v * v).sum::<f64>();
        norm_sum += ua.powf((p - 1.0) * q / 2.0);
    }
    let vol = ball_volume(n, lambda);
    let lhs = vol * grad_sq_sum / k as f64;
    let rhs_factor = (vol * norm_sum / k as f64).powf(2.0 / q);
    Ok((lhs, rhs_factor))
}

/// Run the full sweep over a grid of base points: locate λ̲(ξ), record the
/// violation curve around it, measure the Terracini quantities just below
/// and above, and assert the saturation equality u ≡ u_{ξ,λ̲}^β (relative
/// residual ≤ [`EQUALITY_TOL`] over sampled ball points) that the
/// classified families must exhibit. Bracket failures are annotated with
/// the offending base point and abort the demo — a wrong window must not
/// produce a fabricated critical radius.
pub fn moving_spheres_demo(
    u: &ScalarField,
    beta: f64,
    grid: &[HPoint],
    cfg: &SweepConfig,
) -> Result<Vec<SphereReport>> {
    cfg.validate()?;
    let mut reports = Vec::with_capacity(grid.len());
    for (index, xi) in grid.iter().enumerate() {
        let cell = SweepConfig {
            seed: cfg.seed.wrapping_add(index as u64),
            ..*cfg
        };
        let (lambda_underline, (lo, hi), mut curve) = estimate_lambda_underline(u, xi, beta, &cell)
            .map_err(|e| e.annotate_bracket(&format!("at grid point {index}")))?;

        // Flesh out the curve near the critical radius; 0.95λ̲ and 1.5λ̲
        // are also the Terracini radii below, so the CSV join lands on
        // bit-identical lambdas.
        let mut rng = rng::stream(cell.seed, 2);
        for lambda in [
            0.95 * lambda_underline,
            0.99 * lambda_underline,
            lambda_underline,
            1.5 * lambda_underline,
            2.0 * lambda_underline,
        ] {
            let (measure, stderr) =
                violation_measure_with(&mut rng, u, xi, lambda, beta, cell.samples)?;
            curve.push(ViolationPoint {
                lambda,
                measure,
                stderr,
            });
        }
        curve.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));

        let mut terracini = Vec::with_capacity(2);
        for lambda in [0.95 * lambda_underline, 1.5 * lambda_underline] {
            let (lhs, rhs_factor) = terracini_quantities(
                u,
                xi,
                lambda,
                beta,
                cell.p,
                cell.terracini_samples,
                cell.seed.wrapping_add(1_000),
                &cell.fd,
            )?;
            terracini.push(TerraciniPoint {
                lambda,
                lhs,
                rhs_factor,
            });
        }

        // Severity decays continuously down to λ̲ even where the
        // violating fraction jumps; a non-decaying severity means the
        // located radius is not the comparison's flip point.
        let mut rng = rng::stream(cell.seed, 4);
        let mut severity_curve = Vec::with_capacity(3);
        for delta in [0.1, 0.03, 0.01] {
            let lambda = (1.0 + delta) * lambda_underline;
            let severity =
                violation_severity_with(&mut rng, u, xi, lambda, beta, cell.samples)?;
            severity_curve.push(SeverityPoint { lambda, severity });
        }
        for pair in severity_curve.windows(2) {
            if !(pair[1].severity < pair[0].severity) || pair[1].severity == 0.0 {
                return Err(Error::Invariant {
                    op: "moving_spheres_demo",
                    reason: format!(
                        "violation severity does not decay toward λ̲ at grid point {index}: {:.3e} at λ = {:.6} vs {:.3e} at λ = {:.6}",
                        pair[0].severity, pair[0].lambda, pair[1].severity, pair[1].lambda
                    ),
                });
            }
        }

        // Saturation: at λ̲ the reflected field reproduces u.
        let phi = GCRInversion::new(xi.clone(), lambda_underline, beta)?;
        let mut rng = rng::stream(cell.seed, 3);
        let mut worst = 0.0f64;
        let mut max_u = 0.0f64;
        for zeta in sample_ball_with(&mut rng, xi, lambda_underline, cell.equality_samples)? {
            let ua = u.eval(&zeta)?;
            worst = worst.max((ua - kelvin_with(u, &phi, &zeta)?).abs());
            max_u = max_u.max(ua.abs());
        }
        if worst > EQUALITY_TOL * max_u {
            return Err(Error::Invariant {
                op: "moving_spheres_demo",
                reason: format!(
                    "saturation equality fails at grid point {index}: max |u − u_K| = {worst:.3e} > {EQUALITY_TOL:.0e}·max u = {:.3e} at λ̲ = {lambda_underline}",
                    EQUALITY_TOL * max_u
                ),
            });
        }

        reports.push(SphereReport {
            xi: xi.clone(),
            beta,
            lambda_underline,
            lambda_lower: lo,
            lambda_upper: hi,
            violation_curve: curve,
            terracini,
            severity_curve,
            samples: cell.samples,
            seed: cell.seed,
        });
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{lambda_of_xi, FBetaParams};
    use crate::hgroup::koranyi_norm;
    use num_complex::Complex64;

    fn pt1(re: f64, im: f64, t: f64) -> HPoint {
        HPoint::new(vec![Complex64::new(re, im)], t)
    }

    fn quick_cfg() -> SweepConfig {
        SweepConfig {
            lambda_min: 0.8,
            lambda_max: 4.0,
            samples: 4_000,
            bisection_steps: 20,
            prescan_points: 6,
            terracini_samples: 1_500,
            equality_samples: 2_000,
            seed: 7,
            ..SweepConfig::default()
        }
    }

    #[test]
    fn violations_switch_exactly_at_the_symmetric_radius() {
        let p = FBetaParams { nu: 2.0, beta: 4.0 };
        let u = ScalarField::fbeta(1, p);
        let xi = HPoint::identity(1);
        let sym = lambda_of_xi(&p, &xi).unwrap(); // = 2

        let (below, _) = violation_measure(&u, &xi, 0.9 * sym, p.beta, 5_000, 1).unwrap();
        assert_eq!(below, 0.0);
        let (at, _) = violation_measure(&u, &xi, sym, p.beta, 5_000, 2).unwrap();
        assert_eq!(at, 0.0);
        let (above, stderr) = violation_measure(&u, &xi, 2.0 * sym, p.beta, 5_000, 3).unwrap();
        assert!(above > 0.0, "expected violations above the critical radius");
        assert!(stderr >= 0.0);
    }

    #[test]
    fn critical_radius_matches_the_radius_map() {
        let p = FBetaParams { nu: 2.0, beta: 4.0 };
        let u = ScalarField::fbeta(1, p);
        for xi in [HPoint::identity(1), pt1(0.0, 0.0, -0.7)] {
            let expected = lambda_of_xi(&p, &xi).unwrap();
            let (est, (lo, hi), curve) =
                estimate_lambda_underline(&u, &xi, p.beta, &quick_cfg()).unwrap();
            assert!(lo <= est && est <= hi);
            assert!(
                (est - expected).abs() <= 1e-2 * expected,
                "est {est} vs {expected}"
            );
            assert!(!curve.is_empty());
        }
    }

    #[test]
    fn off_axis_base_points_violate_at_every_radius() {
        // The boundary shear: for ξ off the t-axis the sphere map does
        // not preserve u|∂B_λ, so a rim of violations exists well below
        // the symmetric radius — yet the symmetric radius itself is
        // still an exact-equality radius.
        let p = FBetaParams { nu: 2.0, beta: 4.0 };
        let u = ScalarField::fbeta(1, p);
        let xi = pt1(0.4, 0.0, 0.6);
        let sym = lambda_of_xi(&p, &xi).unwrap();

        let (below, _) = violation_measure(&u, &xi, 0.5 * sym, p.beta, 20_000, 11).unwrap();
        assert!(below > 0.0, "expected a violating boundary rim below λ(ξ)");
        let (at, _) = violation_measure(&u, &xi, sym, p.beta, 20_000, 12).unwrap();
        assert_eq!(at, 0.0, "the symmetric radius stays an equality radius");
        let (above, _) = violation_measure(&u, &xi, 2.0 * sym, p.beta, 20_000, 13).unwrap();
        assert!(above > 0.0);

        // The estimator must refuse rather than bisect to a meaningless
        // radius: violations are present at any lambda_min.
        let err = estimate_lambda_underline(&u, &xi, p.beta, &quick_cfg()).unwrap_err();
        match err {
            Error::Bracket { reason, .. } => {
                assert!(reason.contains("lambda_min"), "unexpected reason: {reason}")
            }
            other => panic!("expected a bracket error, got {other:?}"),
        }
    }

    #[test]
    fn bracket_errors_when_the_window_misses() {
        let p = FBetaParams { nu: 2.0, beta: 4.0 };
        let u = ScalarField::fbeta(1, p);
        let xi = HPoint::identity(1);
        let too_low = SweepConfig {
            lambda_min: 0.3,
            lambda_max: 1.5,
            ..quick_cfg()
        };
        assert!(matches!(
            estimate_lambda_underline(&u, &xi, p.beta, &too_low),
            Err(Error::Bracket { .. })
        ));
        let too_high = SweepConfig {
            lambda_min: 2.5,
            lambda_max: 5.0,
            ..quick_cfg()
        };
        assert!(matches!(
            estimate_lambda_underline(&u, &xi, p.beta, &too_high),
            Err(Error::Bracket { .. })
        ));
    }

    #[test]
    fn terracini_zero_below_positive_above() {
        let p = FBetaParams { nu: 2.0, beta: 4.0 };
        let u = ScalarField::fbeta(1, p);
        let xi = HPoint::identity(1);
        let fd = FDConfig::default();
        let (lhs, rhs) =
            terracini_quantities(&u, &xi, 1.5, p.beta, 3.0, 1_500, 4, &fd).unwrap();
        assert_eq!(lhs, 0.0);
        assert_eq!(rhs, 0.0);
        let (lhs, rhs) =
            terracini_quantities(&u, &xi, 3.0, p.beta, 3.0, 1_500, 5, &fd).unwrap();
        assert!(lhs > 0.0 && rhs > 0.0, "lhs {lhs}, rhs {rhs}");
        // Out-of-range exponent.
        assert!(terracini_quantities(&u, &xi, 3.0, p.beta, 5.0, 1_500, 6, &fd).is_err());
    }

    #[test]
    fn demo_reports_are_consistent() {
        let p = FBetaParams { nu: 2.0, beta: 4.0 };
        let u = ScalarField::fbeta(1, p);
        let grid = vec![HPoint::identity(1), pt1(0.0, 0.0, 0.6)];
        let reports = moving_spheres_demo(&u, p.beta, &grid, &quick_cfg()).unwrap();
        assert_eq!(reports.len(), 2);
        for (r, xi) in reports.iter().zip(&grid) {
            let expected = lambda_of_xi(&p, xi).unwrap();
            assert!((r.lambda_underline - expected).abs() <= 1e-2 * expected);
            assert!(r.lambda_lower <= r.lambda_underline && r.lambda_underline <= r.lambda_upper);
            for v in &r.violation_curve {
                assert!(v.measure >= 0.0 && v.measure <= ball_volume(1, v.lambda) * 1.0001);
            }
            // Below λ̲ the curve must be flat zero.
            for v in &r.violation_curve {
                if v.lambda <= 0.99 * r.lambda_underline {
                    assert_eq!(v.measure, 0.0, "violation below λ̲ at λ = {}", v.lambda);
                }
            }
            assert_eq!(r.terracini.len(), 2);
            assert_eq!(r.terracini[0].lhs, 0.0);
            assert!(r.terracini[1].lhs > 0.0);
            // Severity shrinks as the radius comes down to λ̲.
            assert_eq!(r.severity_curve.len(), 3);
            assert!(r.severity_curve[0].severity > r.severity_curve[1].severity);
            assert!(r.severity_curve[1].severity > r.severity_curve[2].severity);
            assert!(r.severity_curve[2].severity > 0.0);
        }
    }

    #[test]
    fn demo_rejects_degenerate_windows() {
        let p = FBetaParams { nu: 2.0, beta: 4.0 };
        let u = ScalarField::fbeta(1, p);
        let grid = vec![HPoint::identity(1)];
        let narrow = SweepConfig {
            lambda_min: 0.5,
            lambda_max: 1.2,
            ..quick_cfg()
        };
        let err = moving_spheres_demo(&u, p.beta, &grid, &narrow).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("grid point 0"), "unannotated error: {msg}");
    }

    #[test]
    fn reports_serialize_to_json_and_csv() {
        let p = FBetaParams { nu: 2.0, beta: 4.0 };
        let u = ScalarField::fbeta(1, p);
        let grid = vec![HPoint::identity(1)];
        let reports = moving_spheres_demo(&u, p.beta, &grid, &quick_cfg()).unwrap();
        let json = reports_to_json(&reports).unwrap();
        assert!(json.contains("\"lambda_underline\""));
        assert!(json.contains("\"violation_curve\""));
        let csv = reports_to_csv(&reports);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "xi_index,lambda,violation_measure,stderr,lhs,rhs_factor"
        );
        let rows: Vec<&str> = lines.collect();
        assert!(rows.len() >= reports[0].violation_curve.len());
        // Every Terracini radius joins to a curve row with both columns set.
        let filled = rows
            .iter()
            .filter(|row| !row.ends_with(',') && row.split(',').all(|f| !f.is_empty()))
            .count();
        assert_eq!(filled, reports[0].terracini.len());
        // Determinism: same config, same bytes.
        let again = moving_spheres_demo(&u, p.beta, &grid, &quick_cfg()).unwrap();
        assert_eq!(json, reports_to_json(&again).unwrap());
    }

    #[test]
    fn scaling_the_field_scales_the_critical_radius() {
        // For c·f_β the critical radius obeys λ̲^ν·(c·f) = c at ξ = 0,
        // i.e. λ̲ = (c / (c·f(0)))^{1/ν} = f(0)^{−1/ν}: unchanged! The
        // radius that *does* move is the one at fixed α = 1; verify the
        // actual scaling law λ̲ ∝ (α/f(ξ))^{1/ν} through the measured
        // product λ̲^ν·u(ξ)/α ≈ 1.
        let p = FBetaParams { nu: 2.0, beta: 4.0 };
        let c = 2.0;
        let scaled = ScalarField::blackbox(1, move |a: &HPoint| {
            Ok(c * crate::fields::fbeta_eval(&p, a)?)
        });
        // u = c·f_β equals f_{β}′ scaled; its saturation radius at ξ = 0
        // solves the same reflection problem with α = c.
        let xi = HPoint::identity(1);
        let (est, _, _) = estimate_lambda_underline(&scaled, &xi, p.beta, &quick_cfg()).unwrap();
        let alpha = c;
        let product = est.powf(p.nu) * scaled.eval(&xi).unwrap() / alpha;
        assert!(
            (product - 1.0).abs() <= 3e-2,
            "λ̲^ν·u(ξ)/α = {product}, λ̲ = {est}, gauge {}",
            koranyi_norm(&xi)
        );
    }
}
