//! Seeded verification suite over the crate's analytic identities.
//!
//! Each registered check pairs a name with a numerical experiment: draw
//! seeded random inputs, evaluate both sides of one identity, track the
//! worst discrepancy, and compare it against a tolerance. A [`CheckResult`]
//! records the verdict together with the worst offending input, printed as
//! exact hex floats so any reported failure can be replayed bit-for-bit.
//!
//! Checks are registered statically; [`registered_checks`] lists them and
//! [`default_suite`] instantiates every check at its default sample count
//! and tolerance. Each check also carries an *anchor* — a stable
//! cross-reference tag identifying the statement under test. Anchors are
//! interface data: downstream tooling keys on them, and they do not change.
//!
//! Two reliability rules govern the runner:
//!
//! * **Fail soft.** A check that aborts (domain error, failed bracket, …)
//!   becomes a failing result with `max_err = f64::MAX`, never a panic.
//!   Unknown check names and malformed specs are rejected up front, before
//!   any check executes.
//! * **Determinism.** Each check draws from its own stream of the suite
//!   seed, keyed by registry position, so its verdict — including the
//!   serialized report — is byte-identical across runs and unaffected by
//!   which other checks share the suite.

use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::crmaps::{
    cr_inversion, fixed_point_center, involution_scale, CRMap, GCRInversion, Primitive,
};
use crate::error::{Error, Result};
use crate::fields::{
    alpha_beta_of, fbeta_eval, fbeta_reflection_residual, lambda_of_xi, BubbleParams, FBetaParams,
    ScalarField,
};
use crate::hgroup::{
    coord_distance, dilate, dist, group_inv, group_mul, homogeneous_dimension, koranyi_norm,
    random_in_box, random_unitary, HPoint,
};
use crate::movesphere::{moving_spheres_demo, terracini_quantities, SweepConfig};
use crate::rng;
use crate::subcalc::{
    calc_lemma_derivative_checks, li_monticelli_check, pde_residual_ratio,
    subcritical_residual_check, well_conditioned, FDConfig,
};

/// Violation threshold used by [`theorem13_falsifier`]; a candidate
/// counterexample must beat it by a factor of ten to count.
pub const FALSIFIER_TOL: f64 = 1e-10;

// ── specs and results ────────────────────────────────────────────────────

/// One check instance: which identity to exercise and at what strength.
#[derive(Debug, Clone)]
pub struct CheckSpec {
    /// Registry name, e.g. `"group-axioms"`.
    pub name: String,
    /// Stable cross-reference tag for the statement under test.
    pub anchor: String,
    /// Ambient dimensions n to draw inputs in.
    pub dimensions: Vec<usize>,
    /// Sampling effort; the unit is check-specific (random inputs,
    /// parameter sets, Monte-Carlo points per radius, …) but larger is
    /// always more thorough.
    pub samples: usize,
    /// Suite seed; combined with the check's registry position to give
    /// each check an independent random stream.
    pub seed: u64,
    /// Pass iff the measured `max_err` does not exceed this.
    pub tolerance: f64,
}

impl CheckSpec {
    /// Structural validation, run for the whole suite before anything
    /// executes: sampling effort at least 1, a finite non-negative
    /// tolerance (zero is allowed — it demands exactness and will fail
    /// any finite-difference check), and dimensions in 1..=8.
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config {
                reason: format!("check '{}': samples must be at least 1", self.name),
            });
        }
        if !self.tolerance.is_finite() || self.tolerance < 0.0 {
            return Err(Error::Config {
                reason: format!(
                    "check '{}': tolerance must be finite and non-negative, got {}",
                    self.name, self.tolerance
                ),
            });
        }
        if self.dimensions.is_empty() {
            return Err(Error::Config {
                reason: format!("check '{}': dimensions must be non-empty", self.name),
            });
        }
        if let Some(&bad) = self.dimensions.iter().find(|&&n| n == 0 || n > 8) {
            return Err(Error::Config {
                reason: format!(
                    "check '{}': dimensions must lie in 1..=8, got {bad}",
                    self.name
                ),
            });
        }
        Ok(())
    }
}

/// Verdict of one executed check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    /// Worst discrepancy observed; `f64::MAX` when the check aborted.
    pub max_err: f64,
    /// Replayable description of the input achieving `max_err`, with all
    /// floats in exact hex notation.
    pub worst_input: String,
    /// Measured wall-clock runtime. Serialization pins this field to 0 so
    /// reports are byte-stable across runs; the measured value stays on
    /// the struct for interactive display.
    pub runtime_ms: f64,
}

impl Serialize for CheckResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CheckResult", 5)?;
        st.serialize_field("name", &self.name)?;
        st.serialize_field("pass", &self.pass)?;
        st.serialize_field("max_err", &self.max_err)?;
        st.serialize_field("worst_input", &self.worst_input)?;
        st.serialize_field("runtime_ms", &0.0)?;
        st.end()
    }
}

/// Serialize results as a pretty-printed JSON array (the report format).
pub fn results_to_json(results: &[CheckResult]) -> Result<String> {
    Ok(serde_json::to_string_pretty(results)?)
}

/// What a check function reports back to the runner.
struct Outcome {
    max_err: f64,
    worst_input: String,
}

/// Running maximum plus a lazily rendered description of where it
/// occurred; rendering only happens when the maximum improves, so check
/// loops stay cheap.
struct Worst {
    err: f64,
    input: Option<String>,
}

impl Worst {
    fn new() -> Self {
        Worst {
            err: 0.0,
            input: None,
        }
    }

    fn update(&mut self, err: f64, input: impl FnOnce() -> String) {
        if self.input.is_none() || err > self.err {
            self.err = err.max(self.err);
            self.input = Some(input());
        }
    }

    fn finish(self) -> Outcome {
        Outcome {
            max_err: self.err,
            worst_input: self.input.unwrap_or_else(|| "no samples drawn".into()),
        }
    }
}

// ── registry ─────────────────────────────────────────────────────────────

type CheckFn = fn(&CheckSpec, &mut ChaCha8Rng) -> Result<Outcome>;

struct Registered {
    name: &'static str,
    anchor: &'static str,
    dimensions: &'static [usize],
    samples: usize,
    tolerance: f64,
    run: CheckFn,
}

/// Append new checks at the end: the registry index doubles as the RNG
/// stream id, and reordering would silently change every check's draws.
static REGISTRY: &[Registered] = &[
    Registered {
        name: "group-axioms",
        anchor: "§2.1",
        dimensions: &[1, 2, 3],
        samples: 10_000,
        tolerance: 1e-12,
        run: check_group_axioms,
    },
    Registered {
        name: "norm-homogeneity",
        anchor: "Eq. (2.4)",
        dimensions: &[1, 2, 3],
        samples: 10_000,
        tolerance: 1e-13,
        run: check_norm_homogeneity,
    },
    Registered {
        name: "inversion-norm",
        anchor: "§2.2",
        dimensions: &[1, 2, 3],
        samples: 10_000,
        tolerance: 1e-12,
        run: check_inversion_norm,
    },
    Registered {
        name: "reflection-identity",
        anchor: "Lemma 2.3",
        dimensions: &[1, 2, 3],
        samples: 10_000,
        tolerance: 1e-10,
        run: check_reflection_identity,
    },
    Registered {
        name: "involution",
        anchor: "Lemma 2.4",
        dimensions: &[1, 2, 3],
        samples: 10_000,
        tolerance: 1e-10,
        run: check_involution,
    },
    Registered {
        name: "ball-swap",
        anchor: "Lemma 2.3",
        dimensions: &[1, 2, 3],
        samples: 10_000,
        tolerance: 1e-10,
        run: check_ball_swap,
    },
    Registered {
        name: "functional-equation",
        anchor: "Eq. (1.6)",
        dimensions: &[1, 2, 3],
        samples: 21_000,
        tolerance: 1e-10,
        run: check_functional_equation,
    },
    Registered {
        name: "conformal-identity",
        anchor: "Lemma 2.1",
        dimensions: &[1],
        samples: 100,
        tolerance: 1e-5,
        run: check_conformal_identity,
    },
    Registered {
        name: "bubble-pde-residual",
        anchor: "Eq. (1.2)",
        dimensions: &[1, 2],
        samples: 10,
        tolerance: 1e-5,
        run: check_bubble_pde,
    },
    Registered {
        name: "subcritical-factor",
        anchor: "Corollary 2.2",
        dimensions: &[1],
        samples: 60,
        tolerance: 1e-5,
        run: check_subcritical_factor,
    },
    Registered {
        name: "radius-map-identity",
        anchor: "Prop. 4.1",
        dimensions: &[1, 2, 3],
        samples: 10_000,
        tolerance: 1e-10,
        run: check_radius_map,
    },
    Registered {
        name: "decay-functionals",
        anchor: "Eq. (1.9)",
        dimensions: &[1, 2],
        samples: 8,
        tolerance: 1e-3,
        run: check_decay_functionals,
    },
    Registered {
        name: "fixed-point",
        anchor: "Lemma 4.3",
        dimensions: &[1, 2, 3],
        samples: 6,
        tolerance: 1e-8,
        run: check_fixed_point,
    },
    Registered {
        name: "derivative-identities",
        anchor: "§5 Steps 1–4",
        dimensions: &[1, 2],
        samples: 60,
        tolerance: 1e-6,
        run: check_derivative_identities,
    },
    Registered {
        name: "falsifier-witness",
        anchor: "Theorem 1.3",
        dimensions: &[1],
        samples: 2_000,
        tolerance: 1e-10,
        run: check_falsifier,
    },
    Registered {
        name: "moving-spheres-axis",
        anchor: "§7 Steps 1–3",
        dimensions: &[1],
        samples: 15_000,
        tolerance: 1e-2,
        run: check_moving_spheres_axis,
    },
    Registered {
        name: "terracini-quadrature",
        anchor: "Lemma 6.1",
        dimensions: &[1],
        samples: 2_000,
        tolerance: 1e-12,
        run: check_terracini,
    },
];

/// `(name, anchor)` for every registered check, in execution order.
pub fn registered_checks() -> Vec<(&'static str, &'static str)> {
    REGISTRY.iter().map(|r| (r.name, r.anchor)).collect()
}

/// Every registered check at its default dimensions, effort and
/// tolerance, bound to `seed`.
pub fn default_suite(seed: u64) -> Vec<CheckSpec> {
    REGISTRY
        .iter()
        .map(|r| CheckSpec {
            name: r.name.into(),
            anchor: r.anchor.into(),
            dimensions: r.dimensions.to_vec(),
            samples: r.samples,
            seed,
            tolerance: r.tolerance,
        })
        .collect()
}

fn lookup(name: &str) -> Option<(usize, &'static Registered)> {
    REGISTRY.iter().enumerate().find(|(_, r)| r.name == name)
}

/// Run `suite` sequentially and collect every verdict.
///
/// All specs are validated first; an unknown name or malformed spec is a
/// configuration error and nothing executes. After that the runner never
/// bails: a check whose body errors out becomes a failing [`CheckResult`]
/// with `max_err = f64::MAX` and the error message as its `worst_input`.
pub fn run_suite(suite: &[CheckSpec]) -> Result<Vec<CheckResult>> {
    let mut planned = Vec::with_capacity(suite.len());
    for spec in suite {
        let (index, reg) = lookup(&spec.name).ok_or_else(|| Error::Config {
            reason: format!(
                "unknown check name '{}'; run list-checks for the registry",
                spec.name
            ),
        })?;
        spec.validate()?;
        planned.push((index, reg, spec));
    }

    let mut results = Vec::with_capacity(planned.len());
    for (index, reg, spec) in planned {
        let start = Instant::now();
        let mut stream = rng::stream(spec.seed, index as u64);
        let outcome = (reg.run)(spec, &mut stream);
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        results.push(match outcome {
            Ok(o) => CheckResult {
                name: spec.name.clone(),
                pass: o.max_err <= spec.tolerance,
                max_err: o.max_err,
                worst_input: o.worst_input,
                runtime_ms,
            },
            Err(e) => CheckResult {
                name: spec.name.clone(),
                pass: false,
                max_err: f64::MAX,
                worst_input: format!("check aborted: {e}"),
                runtime_ms,
            },
        });
    }
    Ok(results)
}

// ── individual checks ────────────────────────────────────────────────────

fn per_dim(spec: &CheckSpec) -> usize {
    (spec.samples / spec.dimensions.len()).max(1)
}

/// Associativity, identity and inverses of the group law, in coordinates.
fn check_group_axioms(spec: &CheckSpec, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst = Worst::new();
    for &n in &spec.dimensions {
        let e = HPoint::identity(n);
        for _ in 0..per_dim(spec) {
            let a = random_in_box(rng, n, 1.5, 2.0);
            let b = random_in_box(rng, n, 1.5, 2.0);
            let c = random_in_box(rng, n, 1.5, 2.0);
            let assoc = coord_distance(
                &group_mul(&group_mul(&a, &b)?, &c)?,
                &group_mul(&a, &group_mul(&b, &c)?)?,
            )?;
            let ident = coord_distance(&group_mul(&a, &e)?, &a)?
                .max(coord_distance(&group_mul(&e, &a)?, &a)?);
            let inv = coord_distance(&group_mul(&a, &group_inv(&a))?, &e)?;
            let err = assoc.max(ident).max(inv);
            worst.update(err, || {
                format!(
                    "n = {n}; a = {}; b = {}; c = {}",
                    fmt_point(&a),
                    fmt_point(&b),
                    fmt_point(&c)
                )
            });
        }
    }
    Ok(worst.finish())
}

/// ‖δ_λ a‖ = λ‖a‖, relative.
fn check_norm_homogeneity(spec: &CheckSpec, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst = Worst::new();
    for &n in &spec.dimensions {
        for _ in 0..per_dim(spec) {
            let a = random_in_box(rng, n, 1.5, 2.0);
            let lam: f64 = rng.gen_range(0.1..10.0);
            let lhs = koranyi_norm(&dilate(lam, &a)?);
            let rhs = lam * koranyi_norm(&a);
            worst.update(relative(lhs, rhs), || {
                format!("n = {n}; λ = {}; a = {}", hex_float(lam), fmt_point(&a))
            });
        }
    }
    Ok(worst.finish())
}

/// ‖𝒥a‖·‖a‖ = 1 away from the origin.
fn check_inversion_norm(spec: &CheckSpec, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst = Worst::new();
    for &n in &spec.dimensions {
        for _ in 0..per_dim(spec) {
            let a = random_in_box(rng, n, 1.5, 2.0);
            let err = (koranyi_norm(&cr_inversion(&a)?) * koranyi_norm(&a) - 1.0).abs();
            worst.update(err, || format!("n = {n}; a = {}", fmt_point(&a)));
        }
    }
    Ok(worst.finish())
}

fn random_phi(
    rng: &mut ChaCha8Rng,
    n: usize,
) -> Result<(GCRInversion, HPoint, f64, f64)> {
    let xi = random_in_box(rng, n, 1.0, 1.5);
    let lambda: f64 = rng.gen_range(0.3..2.5);
    // β > 0 keeps t′ + i(|z′|² + β) away from 0, so the rotation phase
    // is well defined for every base point.
    let beta: f64 = rng.gen_range(0.2..5.0);
    let phi = GCRInversion::new(xi.clone(), lambda, beta)?;
    Ok((phi, xi, lambda, beta))
}

/// d(Φζ, ξ)·d(ζ, ξ) = λ², relative to λ².
fn check_reflection_identity(spec: &CheckSpec, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst = Worst::new();
    for &n in &spec.dimensions {
        for _ in 0..per_dim(spec) {
            let (phi, xi, lambda, beta) = random_phi(rng, n)?;
            let zeta = box_point_away(rng, n, 1.5, 2.0, &xi, 1e-2)?;
            let d = dist(&zeta, &xi)?;
            let product = dist(&phi.apply(&zeta)?, &xi)? * d;
            let err = (product - lambda * lambda).abs() / (lambda * lambda);
            worst.update(err, || {
                format!(
                    "n = {n}; ξ = {}; λ = {}; β = {}; ζ = {}",
                    fmt_point(&xi),
                    hex_float(lambda),
                    hex_float(beta),
                    fmt_point(&zeta)
                )
            });
        }
    }
    Ok(worst.finish())
}

/// Φ∘Φ = id away from the center, in scaled coordinates.
fn check_involution(spec: &CheckSpec, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst = Worst::new();
    for &n in &spec.dimensions {
        for _ in 0..per_dim(spec) {
            let (phi, xi, lambda, beta) = random_phi(rng, n)?;
            let zeta = box_point_away(rng, n, 1.5, 2.0, &xi, 0.05)?;
            let round = phi.apply(&phi.apply(&zeta)?)?;
            let err = coord_distance(&round, &zeta)? / involution_scale(&zeta);
            worst.update(err, || {
                format!(
                    "n = {n}; ξ = {}; λ = {}; β = {}; ζ = {}",
                    fmt_point(&xi),
                    hex_float(lambda),
                    hex_float(beta),
                    fmt_point(&zeta)
                )
            });
        }
    }
    Ok(worst.finish())
}

/// Φ exchanges the inside and outside of B_λ(ξ); the error is how far an
/// image lands on the wrong side of the sphere, relative to λ.
fn check_ball_swap(spec: &CheckSpec, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst = Worst::new();
    for &n in &spec.dimensions {
        for _ in 0..per_dim(spec) {
            let (phi, xi, lambda, beta) = random_phi(rng, n)?;
            let g_in: f64 = rng.gen_range(1e-3 * lambda..0.999 * lambda);
            let inside = point_at_gauge(rng, &xi, g_in)?;
            let out_err = (lambda - dist(&phi.apply(&inside)?, &xi)?).max(0.0) / lambda;

            let g_out: f64 = rng.gen_range(1.001 * lambda..3.0 * lambda);
            let outside = point_at_gauge(rng, &xi, g_out)?;
            let in_err = (dist(&phi.apply(&outside)?, &xi)? - lambda).max(0.0) / lambda;

            worst.update(out_err.max(in_err), || {
                format!(
                    "n = {n}; ξ = {}; λ = {}; β = {}; inside ζ = {}; outside ζ = {}",
                    fmt_point(&xi),
                    hex_float(lambda),
                    hex_float(beta),
                    fmt_point(&inside),
                    fmt_point(&outside)
                )
            });
        }
    }
    Ok(worst.finish())
}

/// f_β reproduces itself under reflection at the radius map's radius:
/// f_β(ζ) = (λ(ξ)/d)^ν f_β(Φζ) for every ν, β, ξ.
fn check_functional_equation(spec: &CheckSpec, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    const POINTS_PER_CONFIG: usize = 100;
    let mut worst = Worst::new();
    for &n in &spec.dimensions {
        let configs = (per_dim(spec) / POINTS_PER_CONFIG).max(1);
        for _ in 0..configs {
            let p = FBetaParams {
                nu: rng.gen_range(0.5..6.0),
                beta: rng.gen_range(0.2..6.0),
            };
            let xi = random_in_box(rng, n, 1.2, 1.5);
            for _ in 0..POINTS_PER_CONFIG {
                let zeta = box_point_away(rng, n, 1.5, 2.0, &xi, 1e-2)?;
                let err = fbeta_reflection_residual(&p, &xi, &zeta)?;
                worst.update(err, || {
                    format!(
                        "n = {n}; ν = {}; β = {}; ξ = {}; ζ = {}",
                        hex_float(p.nu),
                        hex_float(p.beta),
                        fmt_point(&xi),
                        fmt_point(&zeta)
                    )
                });
            }
        }
    }
    Ok(worst.finish())
}

/// A smooth positive non-solution used where a check must not secretly
/// rely on solving the critical equation.
fn mixed_field(n: usize) -> Result<ScalarField> {
    let fb = ScalarField::fbeta(
        n,
        FBetaParams {
            nu: 2.0 * n as f64,
            beta: 2.5,
        },
    );
    let mu: Vec<Complex64> = (0..n)
        .map(|k| Complex64::new(0.15 * (k as f64 + 1.0), -0.1))
        .collect();
    let bub = ScalarField::bubble(BubbleParams::new(1.3, mu, Complex64::new(0.3, 1.4))?);
    Ok(ScalarField::blackbox(n, move |a: &HPoint| {
        Ok(fb.eval(a)? + 0.5 * bub.eval(a)?)
    }))
}

/// Equivariance of u ↦ u^{−(Q+2)/(Q−2)}Δ_H u under CR-map pullback with
/// the |J_ψ|^{(Q−2)/(2Q)} weight, finite-difference on both sides, for
/// several chains including the full generalized inversion.
fn check_conformal_identity(spec: &CheckSpec, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let fd = FDConfig::default();
    let mut worst = Worst::new();
    for &n in &spec.dimensions {
        let u = mixed_field(n)?;
        let shift = random_in_box(rng, n, 0.8, 1.0);
        // Inversion centered outside the sampling box, so no stencil can
        // straddle the singularity.
        let mut far_z = vec![Complex64::new(0.0, 0.0); n];
        far_z[0] = Complex64::new(2.5, 0.0);
        let phi = GCRInversion::new(HPoint::new(far_z, 3.0), 1.1, 2.0)?;
        let chains: Vec<(CRMap, &str)> = vec![
            (CRMap::identity(), "identity"),
            (
                CRMap::new(vec![Primitive::Translate(shift), Primitive::Dilate(0.8)])?,
                "translate∘dilate",
            ),
            (
                CRMap::new(vec![
                    Primitive::Rotate(random_unitary(rng, n)),
                    Primitive::Iota,
                ])?,
                "rotate∘flip",
            ),
            (phi.as_crmap(), "generalized inversion"),
        ];
        let pts_per_chain = (per_dim(spec) / chains.len()).max(1);
        for (psi, label) in &chains {
            let points: Vec<HPoint> = (0..pts_per_chain)
                .map(|_| random_in_box(rng, n, 1.1, 1.4))
                .collect();
            let err = li_monticelli_check(&u, psi, &points, &fd)?;
            worst.update(err, || {
                format!("n = {n}; chain = {label}; {} points", points.len())
            });
        }
    }
    Ok(worst.finish())
}

/// −Δ_H u / u^{(Q+2)/(Q−2)} is spatially constant for the closed-form
/// family, equals its classified constant, and rescaling the amplitude
/// normalizes the ratio to 1.
fn check_bubble_pde(spec: &CheckSpec, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    const POINTS: usize = 40;
    let fd = FDConfig::default();
    let mut worst = Worst::new();
    for &n in &spec.dimensions {
        let q = homogeneous_dimension(n) as f64;
        let p_crit = (q + 2.0) / (q - 2.0);
        for _ in 0..per_dim(spec) {
            let k: f64 = rng.gen_range(0.5..2.0);
            let mu: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)))
                .collect();
            let mu_sq: f64 = mu.iter().map(|m| m.norm_sqr()).sum();
            let kappa = Complex64::new(
                rng.gen_range(-0.8..0.8),
                mu_sq / 4.0 + rng.gen_range(0.5..2.0),
            );
            let params = BubbleParams::new(k, mu, kappa)?;
            let u = ScalarField::bubble(params.clone());
            let points: Vec<HPoint> = (0..POINTS)
                .map(|_| random_well_conditioned(rng, &params))
                .collect::<Result<_>>()?;

            let (mean, spread) = pde_residual_ratio(&u, p_crit, &points, &fd)?;
            let closed =
                (n as f64).powi(2) * (4.0 * kappa.im - mu_sq) * k.powf(-2.0 / n as f64);
            // Amplitude rescale K ↦ K·mean^{1/(p−1)} turns the measured
            // ratio into exactly 1 for a true member of the family.
            let scaled = ScalarField::bubble(params.with_k(k * mean.powf(1.0 / (p_crit - 1.0)))?);
            let (mean_scaled, _) = pde_residual_ratio(&scaled, p_crit, &points, &fd)?;

            let err = spread
                .abs()
                .max(relative(mean, closed))
                .max((mean_scaled - 1.0).abs());
            worst.update(err, || {
                format!(
                    "n = {n}; K = {}; μ = {}; κ = {}",
                    hex_float(k),
                    fmt_complex_list(params.mu()),
                    fmt_complex(kappa)
                )
            });
        }
    }
    Ok(worst.finish())
}

/// Transform law of the reflected field at a subcritical exponent: the
/// defect factor (λ/d)^{(Q+2)−(Q−2)p}, which degenerates to 1 exactly at
/// the critical p.
fn check_subcritical_factor(spec: &CheckSpec, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let fd = FDConfig::default();
    let mut worst = Worst::new();
    for &n in &spec.dimensions {
        let q = homogeneous_dimension(n) as f64;
        let crit = (q + 2.0) / (q - 2.0);
        let u = ScalarField::fbeta(
            n,
            FBetaParams {
                nu: 3.0,
                beta: 2.0,
            },
        );
        for p in [(1.0 + crit) / 2.0, crit] {
            let xi = random_in_box(rng, n, 0.4, 0.6);
            let lambda: f64 = rng.gen_range(0.8..1.5);
            let beta: f64 = rng.gen_range(0.5..4.0);
            let count = (per_dim(spec) / 2).max(1);
            let points: Vec<HPoint> = (0..count)
                .map(|_| box_point_away(rng, n, 1.5, 2.0, &xi, 0.4))
                .collect::<Result<_>>()?;
            let err = subcritical_residual_check(&u, p, &xi, lambda, beta, &points, &fd)?;
            worst.update(err, || {
                format!(
                    "n = {n}; p = {}; ξ = {}; λ = {}; β = {}",
                    hex_float(p),
                    fmt_point(&xi),
                    hex_float(lambda),
                    hex_float(beta)
                )
            });
        }
    }
    Ok(worst.finish())
}

/// λ(ξ)^ν · f_β(ξ) = 1: the radius map inverts the profile's own decay.
fn check_radius_map(spec: &CheckSpec, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst = Worst::new();
    for &n in &spec.dimensions {
        for _ in 0..per_dim(spec) {
            let p = FBetaParams {
                nu: rng.gen_range(0.5..6.0),
                beta: rng.gen_range(0.2..6.0),
            };
            let xi = random_in_box(rng, n, 1.2, 1.5);
            let lam = lambda_of_xi(&p, &xi)?;
            let err = (lam.powf(p.nu) * fbeta_eval(&p, &xi)? - 1.0).abs();
            worst.update(err, || {
                format!(
                    "n = {n}; ν = {}; β = {}; ξ = {}",
                    hex_float(p.nu),
                    hex_float(p.beta),
                    fmt_point(&xi)
                )
            });
        }
    }
    Ok(worst.finish())
}

/// The asymptotic functionals recover (α, β) = (1, β) from f_β.
fn check_decay_functionals(spec: &CheckSpec, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst = Worst::new();
    for &n in &spec.dimensions {
        for _ in 0..per_dim(spec) {
            let nu: f64 = rng.gen_range(1.8..4.5);
            let beta: f64 = rng.gen_range(0.6..4.5);
            let f = ScalarField::fbeta(n, FBetaParams { nu, beta });
            let (alpha_est, beta_est) = alpha_beta_of(&f, nu)?;
            let err = (alpha_est - 1.0).abs().max((beta_est - beta).abs());
            worst.update(err, || {
                format!(
                    "n = {n}; ν = {}; β = {}; α̂ = {}; β̂ = {}",
                    hex_float(nu),
                    hex_float(beta),
                    hex_float(alpha_est),
                    hex_float(beta_est)
                )
            });
        }
    }
    Ok(worst.finish())
}

/// The center equation Φ_{ξ,λ(ξ)}^β(ζ) = 0 has a gauge-small solution ξ*
/// for far-out base points, found by damped fixed-point iteration; the
/// error is the recomputed residual |Φ_{ξ*,λ(ξ*)}^β(ζ)|. Base points sit
/// on the t-axis, the iteration's contraction regime; z-dominant bases
/// stall the damped iteration and surface as no-convergence errors.
fn check_fixed_point(spec: &CheckSpec, _rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst = Worst::new();
    for &n in &spec.dimensions {
        let zeros = vec![Complex64::new(0.0, 0.0); n];
        let bases = [
            HPoint::new(zeros.clone(), 1e6),
            HPoint::new(zeros.clone(), -1e6),
            HPoint::new(zeros.clone(), 1e4),
        ];
        for beta in [1.0, 4.0] {
            for zeta in &bases {
                let p = FBetaParams { nu: 2.0, beta };
                let star = fixed_point_center(|xi| lambda_of_xi(&p, xi), beta, zeta, 0.1)?;
                let phi = GCRInversion::new(star.clone(), lambda_of_xi(&p, &star)?, beta)?;
                let residual = koranyi_norm(&phi.apply(zeta)?);
                worst.update(residual, || {
                    format!(
                        "n = {n}; β = {}; ζ = {}; ξ* = {} (gauge {})",
                        hex_float(beta),
                        fmt_point(zeta),
                        fmt_point(&star),
                        hex_float(koranyi_norm(&star))
                    )
                });
            }
        }
    }
    Ok(worst.finish())
}

/// First-derivative structure of max-at-origin profiles: the t-relation
/// everywhere, the x/y-relations on the t = 0 slice, and affinity of
/// f(·,0)^{−2/ν} in |z|² with slope α^{−2/ν}.
fn check_derivative_identities(spec: &CheckSpec, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let fd = FDConfig::default();
    let mut worst = Worst::new();
    for &n in &spec.dimensions {
        let zeros = vec![Complex64::new(0.0, 0.0); n];
        let bubble_k = 1.7;
        let configs: Vec<(ScalarField, f64, f64, &str)> = vec![
            (
                ScalarField::fbeta(
                    n,
                    FBetaParams {
                        nu: 2.5,
                        beta: 3.0,
                    },
                ),
                2.5,
                1.0,
                "decay profile",
            ),
            (
                ScalarField::bubble(BubbleParams::new(
                    bubble_k,
                    zeros,
                    Complex64::new(0.0, 1.2),
                )?),
                2.0 * n as f64,
                bubble_k,
                "centered bubble",
            ),
        ];
        let pts_per_config = (per_dim(spec) / configs.len()).max(1);
        for (f, nu, alpha, label) in &configs {
            let points: Vec<HPoint> = (0..pts_per_config)
                .map(|_| random_in_box(rng, n, 0.9, 1.2))
                .collect();
            let rep = calc_lemma_derivative_checks(f, *nu, *alpha, &points, &fd)?;
            let err = rep
                .t_identity
                .max(rep.x_identity)
                .max(rep.y_identity)
                .max(rep.affine_residual)
                .max(relative(rep.affine_slope, alpha.powf(-2.0 / nu)));
            worst.update(err, || {
                format!(
                    "n = {n}; {label} (ν = {}, α = {}); {} points",
                    hex_float(*nu),
                    hex_float(*alpha),
                    points.len()
                )
            });
        }
    }
    Ok(worst.finish())
}

/// The randomized falsifier stays silent on fields that satisfy the
/// exterior comparison (constants), fires on the reflected profile above
/// its saturation radius, and finds exact balance at the radius map.
fn check_falsifier(spec: &CheckSpec, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let n = spec.dimensions[0];
    let mut worst = Worst::new();

    // Balance at the symmetric radius: residuals at rounding level, far
    // below anything the falsifier would accept.
    for _ in 0..50 {
        let p = FBetaParams {
            nu: rng.gen_range(1.0..4.0),
            beta: rng.gen_range(0.5..5.0),
        };
        let xi = random_in_box(rng, n, 1.0, 1.2);
        let zeta = box_point_away(rng, n, 1.5, 2.0, &xi, 1e-2)?;
        let err = fbeta_reflection_residual(&p, &xi, &zeta)?;
        worst.update(err, || {
            format!(
                "balance residual at ν = {}, β = {}, ξ = {}, ζ = {}",
                hex_float(p.nu),
                hex_float(p.beta),
                fmt_point(&xi),
                fmt_point(&zeta)
            )
        });
    }

    let constant = ScalarField::blackbox(n, |_: &HPoint| Ok(1.0));
    if let Some(w) =
        theorem13_falsifier(&constant, 2.0, 4.0, spec.samples, spec.seed.wrapping_add(1 << 34))?
    {
        worst.update(1.0, || {
            format!(
                "constant field produced a spurious witness: ξ = {}, λ = {}, ζ = {}, excess = {}",
                fmt_point(&w.xi),
                hex_float(w.lambda),
                fmt_point(&w.zeta),
                hex_float(w.excess)
            )
        });
    }

    let f = ScalarField::fbeta(
        n,
        FBetaParams {
            nu: 2.0,
            beta: 4.0,
        },
    );
    match theorem13_falsifier(&f, 2.0, 4.0, spec.samples, spec.seed.wrapping_add(2 << 34))? {
        Some(_) => {}
        None => worst.update(1.0, || {
            format!(
                "no witness for the reflected profile within {} trials",
                spec.samples
            )
        }),
    }

    Ok(worst.finish())
}

/// End-to-end sweep on axis base points: the located flip radius agrees
/// with the radius map, with empty violation sets below the bracket and a
/// non-trivial set above.
fn check_moving_spheres_axis(spec: &CheckSpec, _rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let p = FBetaParams {
        nu: 2.0,
        beta: 4.0,
    };
    let u = ScalarField::fbeta(1, p);
    let grid = [
        HPoint::identity(1),
        HPoint::new(vec![Complex64::new(0.0, 0.0)], 0.6),
    ];
    let cfg = SweepConfig {
        lambda_min: 0.8,
        lambda_max: 4.0,
        samples: spec.samples,
        // Deep enough that the located radius lands inside the demo's
        // own saturation-equality tolerance (relative 1e-6).
        bisection_steps: 22,
        prescan_points: 6,
        p: 2.5,
        terracini_samples: 1_500,
        equality_samples: 3_000,
        // Keep the demo's internal streams clear of the suite's own
        // (seed, stream) pairs.
        seed: spec.seed.wrapping_add(1 << 32),
        fd: FDConfig::default(),
    };
    let reports = moving_spheres_demo(&u, p.beta, &grid, &cfg)?;

    let mut worst = Worst::new();
    for (r, xi) in reports.iter().zip(grid.iter()) {
        let target = lambda_of_xi(&p, xi)?;
        let err = (r.lambda_underline - target).abs() / target;
        worst.update(err, || {
            format!(
                "ξ = {}; located λ = {}; radius map gives {}",
                fmt_point(xi),
                hex_float(r.lambda_underline),
                hex_float(target)
            )
        });
        for v in &r.violation_curve {
            if v.lambda < r.lambda_lower && v.measure != 0.0 {
                worst.update(1.0, || {
                    format!(
                        "nonzero violation measure {} below the bracket, at λ = {} (ξ = {})",
                        hex_float(v.measure),
                        hex_float(v.lambda),
                        fmt_point(xi)
                    )
                });
            }
        }
        let top = r
            .violation_curve
            .iter()
            .max_by(|a, b| a.lambda.total_cmp(&b.lambda))
            .expect("demo always returns a non-empty curve");
        if top.measure <= 0.0 {
            worst.update(1.0, || {
                format!(
                    "no violations above the flip radius at λ = {} (ξ = {})",
                    hex_float(top.lambda),
                    fmt_point(xi)
                )
            });
        }
    }
    Ok(worst.finish())
}

/// Both Terracini quantities vanish identically below the flip radius and
/// are strictly positive above it.
fn check_terracini(spec: &CheckSpec, _rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let beta = 4.0;
    let u = ScalarField::fbeta(
        1,
        FBetaParams {
            nu: 2.0,
            beta,
        },
    );
    let fd = FDConfig::default();
    let configs = [
        (HPoint::identity(1), 1.5, 3.0),
        (HPoint::new(vec![Complex64::new(0.0, 0.0)], 0.5), 1.6, 3.0),
    ];
    let mut worst = Worst::new();
    for (i, (xi, below, above)) in configs.iter().enumerate() {
        let seed = spec.seed.wrapping_add((1 << 33) + i as u64);
        let (lhs, rhs) =
            terracini_quantities(&u, xi, *below, beta, 2.5, spec.samples, seed, &fd)?;
        worst.update(lhs.max(rhs), || {
            format!(
                "below the flip radius: ξ = {}, λ = {}, lhs = {}, rhs factor = {}",
                fmt_point(xi),
                hex_float(*below),
                hex_float(lhs),
                hex_float(rhs)
            )
        });
        let (lhs, rhs) =
            terracini_quantities(&u, xi, *above, beta, 2.5, spec.samples, seed + 7, &fd)?;
        if !(lhs > 0.0 && rhs > 0.0) {
            worst.update(1.0, || {
                format!(
                    "degenerate quantities above the flip radius: ξ = {}, λ = {}, lhs = {}, rhs factor = {}",
                    fmt_point(xi),
                    hex_float(*above),
                    hex_float(lhs),
                    hex_float(rhs)
                )
            });
        }
    }
    Ok(worst.finish())
}

// ── falsifier ────────────────────────────────────────────────────────────

/// A concrete failure of the exterior comparison u ≥ u_K: at `zeta`,
/// outside B_`lambda`(`xi`), the reflected field exceeds the field by
/// `excess`.
#[derive(Debug, Clone)]
pub struct FalsifierWitness {
    pub xi: HPoint,
    pub lambda: f64,
    pub zeta: HPoint,
    pub excess: f64,
}

/// Randomized search for a counterexample to the exterior comparison
/// u(ζ) ≥ (λ/d(ζ,ξ))^ν u(Φ_{ξ,λ}^β ζ) over random centers ξ, radii λ
/// and exterior points ζ.
///
/// A candidate only counts when its excess clears ten times
/// [`FALSIFIER_TOL`] on the local scale, so rounding noise can never
/// masquerade as a counterexample; the first surviving witness is
/// returned, `None` if all `trials` candidates satisfy the comparison.
pub fn theorem13_falsifier(
    f: &ScalarField,
    nu: f64,
    beta: f64,
    trials: usize,
    seed: u64,
) -> Result<Option<FalsifierWitness>> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::Domain {
            op: "theorem13_falsifier",
            reason: format!("decay exponent must be positive and finite, got {nu}"),
        });
    }
    let n = f.n();
    let mut rng = rng::root(seed);
    for _ in 0..trials {
        let xi = random_in_box(&mut rng, n, 1.0, 1.5);
        let lambda: f64 = rng.gen_range(0.5..5.0);
        let gauge: f64 = rng.gen_range(1.0001 * lambda..5.0 * lambda);
        let zeta = point_at_gauge(&mut rng, &xi, gauge)?;
        let d = dist(&zeta, &xi)?;
        if d <= lambda {
            // Rounding pushed the sample onto the wrong side; skip it.
            continue;
        }
        let phi = GCRInversion::new(xi.clone(), lambda, beta)?;
        let u_here = f.eval(&zeta)?;
        let u_reflected = (lambda / d).powf(nu) * f.eval(&phi.apply(&zeta)?)?;
        let excess = u_reflected - u_here;
        let scale = u_here.abs().max(u_reflected.abs()).max(1e-300);
        if excess > 10.0 * FALSIFIER_TOL * scale {
            return Ok(Some(FalsifierWitness {
                xi,
                lambda,
                zeta,
                excess,
            }));
        }
    }
    Ok(None)
}

// ── samplers and formatting ──────────────────────────────────────────────

fn relative(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Box sample at distance at least `min_d` from `center`.
fn box_point_away(
    rng: &mut ChaCha8Rng,
    n: usize,
    z_half: f64,
    t_half: f64,
    center: &HPoint,
    min_d: f64,
) -> Result<HPoint> {
    for _ in 0..10_000 {
        let a = random_in_box(rng, n, z_half, t_half);
        if dist(&a, center)? >= min_d {
            return Ok(a);
        }
    }
    Err(Error::Domain {
        op: "box_point_away",
        reason: format!("no sample at distance ≥ {min_d} from the center in 10000 draws"),
    })
}

/// ξ·δ with |δ|_H = `target`: a box sample rescaled to the requested
/// gauge, i.e. a point at exact distance `target` from ξ.
fn point_at_gauge(rng: &mut ChaCha8Rng, xi: &HPoint, target: f64) -> Result<HPoint> {
    loop {
        let dir = random_in_box(rng, xi.n(), 1.0, 1.0);
        let g = koranyi_norm(&dir);
        if g < 1e-9 {
            continue;
        }
        return group_mul(xi, &dilate(target / g, &dir)?);
    }
}

/// Box sample in the closed-form family's well-conditioned region.
fn random_well_conditioned(rng: &mut ChaCha8Rng, params: &BubbleParams) -> Result<HPoint> {
    for _ in 0..10_000 {
        let a = random_in_box(rng, params.n(), 1.2, 1.6);
        if well_conditioned(params.q(&a).norm(), &a) {
            return Ok(a);
        }
    }
    Err(Error::Domain {
        op: "random_well_conditioned",
        reason: "no well-conditioned sample in 10000 draws".into(),
    })
}

/// Exact hexadecimal rendering of a double: sign, hex mantissa, binary
/// exponent. Round-trips bit-for-bit, so a reported worst input can be
/// replayed without decimal loss.
fn hex_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let mant = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        if mant == 0 {
            return format!("{sign}0x0p+0");
        }
        return format!("{sign}0x0.{mant:013x}p-1022");
    }
    format!("{sign}0x1.{mant:013x}p{:+}", exp - 1023)
}

fn fmt_complex(c: Complex64) -> String {
    if c.im.is_sign_negative() {
        format!("{}-{}i", hex_float(c.re), hex_float(-c.im))
    } else {
        format!("{}+{}i", hex_float(c.re), hex_float(c.im))
    }
}

fn fmt_complex_list(cs: &[Complex64]) -> String {
    let parts: Vec<String> = cs.iter().map(|&c| fmt_complex(c)).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_point(a: &HPoint) -> String {
    format!("(z = {}, t = {})", fmt_complex_list(a.z()), hex_float(a.t()))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Inverse of `hex_float` for the round-trip test: every piece of the
    /// rendered string is a power-of-two operation, so reassembly is
    /// exact.
    fn parse_hex(s: &str) -> f64 {
        match s {
            "NaN" => return f64::NAN,
            "inf" => return f64::INFINITY,
            "-inf" => return f64::NEG_INFINITY,
            _ => {}
        }
        let (neg, rest) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s),
        };
        let rest = rest.strip_prefix("0x").unwrap();
        let (mant, exp) = rest.split_once('p').unwrap();
        let exp: i32 = exp.parse().unwrap();
        let (lead, frac) = mant.split_once('.').unwrap_or((mant, ""));
        let mut value = u64::from_str_radix(lead, 16).unwrap() as f64;
        if !frac.is_empty() {
            value += u64::from_str_radix(frac, 16).unwrap() as f64
                / 16f64.powi(frac.len() as i32);
        }
        let v = value * 2f64.powi(exp);
        if neg {
            -v
        } else {
            v
        }
    }

    #[test]
    fn hex_floats_round_trip() {
        assert_eq!(hex_float(1.0), "0x1.0000000000000p+0");
        assert_eq!(hex_float(-2.5), "-0x1.4000000000000p+1");
        assert_eq!(hex_float(0.0), "0x0p+0");
        assert_eq!(hex_float(f64::INFINITY), "inf");
        assert_eq!(hex_float(f64::NAN), "NaN");
        assert!(hex_float(f64::MIN_POSITIVE / 2.0).starts_with("0x0."));

        let mut rng = rng::root(99);
        for _ in 0..1000 {
            let x: f64 = (rng.gen::<f64>() - 0.5) * 10f64.powi(rng.gen_range(-12..12));
            assert_eq!(parse_hex(&hex_float(x)).to_bits(), x.to_bits(), "{x}");
        }
        let sub = f64::MIN_POSITIVE / 3.0;
        assert_eq!(parse_hex(&hex_float(sub)).to_bits(), sub.to_bits());
    }

    #[test]
    fn registry_names_are_unique_and_anchored()
 {
        let checks = registered_checks();
        assert!(checks.len() >= 12);
        let mut names: Vec<&str> = checks.iter().map(|(n, _)| *n).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), checks.len(), "duplicate check names");
        for (name, anchor) in &checks {
            assert!(!anchor.is_empty(), "check '{name}' has an empty anchor");
        }
        let anchors: Vec<&str> = checks.iter().map(|(_, a)| *a).collect();
        for required in [
            "Eq. (1.6)",
            "Lemma 2.1",
            "Lemma 2.3",
            "Lemma 2.4",
            "Prop. 4.1",
            "Lemma 4.3",
            "§5 Steps 1–4",
            "Corollary 2.2",
        ] {
            assert!(anchors.contains(&required), "missing anchor '{required}'");
        }
    }

    #[test]
    fn default_suite_matches_the_registry() {
        let suite = default_suite(5);
        assert_eq!(suite.len(), registered_checks().len());
        for (spec, (name, anchor)) in suite.iter().zip(registered_checks()) {
            assert_eq!(spec.name, name);
            assert_eq!(spec.anchor, anchor);
            assert_eq!(spec.seed, 5);
            spec.validate().unwrap();
        }
    }

    #[test]
    fn unknown_names_are_rejected_before_anything_runs() {
        let mut suite = default_suite(1);
        suite.push(CheckSpec {
            name: "no-such-check".into(),
            anchor: String::new(),
            dimensions: vec![1],
            samples: 10,
            seed: 1,
            tolerance: 1.0,
        });
        let err = run_suite(&suite).unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
        assert!(err.to_string().contains("no-such-check"));
    }

    #[test]
    fn malformed_specs_are_configuration_errors() {
        let base = CheckSpec {
            name: "group-axioms".into(),
            anchor: "§2.1".into(),
            dimensions: vec![1],
            samples: 10,
            seed: 0,
            tolerance: 1e-10,
        };
        let mut bad = base.clone();
        bad.samples = 0;
        assert!(matches!(run_suite(&[bad]), Err(Error::Config { .. })));
        let mut bad = base.clone();
        bad.tolerance = -1.0;
        assert!(matches!(run_suite(&[bad]), Err(Error::Config { .. })));
        let mut bad = base.clone();
        bad.tolerance = f64::NAN;
        assert!(matches!(run_suite(&[bad]), Err(Error::Config { .. })));
        let mut bad = base.clone();
        bad.dimensions = vec![];
        assert!(matches!(run_suite(&[bad]), Err(Error::Config { .. })));
        let mut bad = base.clone();
        bad.dimensions = vec![0];
        assert!(matches!(run_suite(&[bad]), Err(Error::Config { .. })));
        // Zero tolerance is legitimate: it demands exactness.
        let mut exact = base;
        exact.tolerance = 0.0;
        exact.validate().unwrap();
    }

    #[test]
    fn empty_suite_yields_empty_results() {
        assert!(run_suite(&[]).unwrap().is_empty());
    }

    #[test]
    fn zero_tolerance_fails_finite_difference_checks() {
        let spec = CheckSpec {
            name: "conformal-identity".into(),
            anchor: "Lemma 2.1".into(),
            dimensions: vec![1],
            samples: 8,
            seed: 3,
            tolerance: 0.0,
        };
        let results = run_suite(&[spec]).unwrap();
        assert!(!results[0].pass);
        assert!(results[0].max_err > 0.0 && results[0].max_err.is_finite());
    }

    #[test]
    fn aborting_checks_fail_soft() {
        // 1 sample is structurally valid for the runner but below the
        // sweep's own minimum, so the check aborts mid-flight.
        let spec = CheckSpec {
            name: "moving-spheres-axis".into(),
            anchor: "§7 Steps 1–3".into(),
            dimensions: vec![1],
            samples: 1,
            seed: 3,
            tolerance: 1e-2,
        };
        let results = run_suite(&[spec]).unwrap();
        assert!(!results[0].pass);
        assert_eq!(results[0].max_err, f64::MAX);
        assert!(results[0].worst_input.contains("aborted"));
    }

    #[test]
    fn results_serialize_with_a_fixed_layout() {
        let r = CheckResult {
            name: "x".into(),
            pass: true,
            max_err: 1.5,
            worst_input: "w".into(),
            runtime_ms: 12.5,
        };
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"name":"x","pass":true,"max_err":1.5,"worst_input":"w","runtime_ms":0.0}"#
        );
    }

    fn small_spec(name: &str, samples: usize, seed: u64) -> CheckSpec {
        let (_, reg) = lookup(name).unwrap();
        CheckSpec {
            name: name.into(),
            anchor: reg.anchor.into(),
            dimensions: reg.dimensions.to_vec(),
            samples,
            seed,
            tolerance: reg.tolerance,
        }
    }

    #[test]
    fn results_do_not_depend_on_suite_composition() {
        let alone = run_suite(&[small_spec("radius-map-identity", 200, 11)]).unwrap();
        let paired = run_suite(&[
            small_spec("group-axioms", 50, 11),
            small_spec("radius-map-identity", 200, 11),
        ])
        .unwrap();
        assert_eq!(
            alone[0].max_err.to_bits(),
            paired[1].max_err.to_bits(),
            "a check's draws must be keyed by registry position, not suite position"
        );
        assert_eq!(alone[0].worst_input, paired[1].worst_input);
    }

    #[test]
    fn reports_are_byte_identical_across_runs() {
        let suite = vec![
            small_spec("group-axioms", 300, 42),
            small_spec("functional-equation", 400, 42),
            small_spec("radius-map-identity", 300, 42),
        ];
        let a = results_to_json(&run_suite(&suite).unwrap()).unwrap();
        let b = results_to_json(&run_suite(&suite).unwrap()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"runtime_ms\": 0.0"));
    }

    #[test]
    fn falsifier_accepts_constants_and_refutes_the_profile() {
        let constant = ScalarField::blackbox(1, |_: &HPoint| Ok(1.0));
        assert!(theorem13_falsifier(&constant, 2.0, 4.0, 500, 9)
            .unwrap()
            .is_none());

        let f = ScalarField::fbeta(
            1,
            FBetaParams {
                nu: 2.0,
                beta: 4.0,
            },
        );
        let w = theorem13_falsifier(&f, 2.0, 4.0, 2_000, 9)
            .unwrap()
            .expect("the reflected profile violates the exterior comparison above saturation");
        // Re-verify the witness from scratch.
        let d = dist(&w.zeta, &w.xi).unwrap();
        assert!(d > w.lambda);
        let phi = GCRInversion::new(w.xi.clone(), w.lambda, 4.0).unwrap();
        let reflected =
            (w.lambda / d).powf(2.0) * f.eval(&phi.apply(&w.zeta).unwrap()).unwrap();
        let direct = f.eval(&w.zeta).unwrap();
        assert!((reflected - direct - w.excess).abs() <= 1e-15 * reflected.abs());
        assert!(w.excess > 10.0 * FALSIFIER_TOL * reflected.abs().max(direct.abs()));
    }

    #[test]
    fn falsifier_rejects_bad_exponents() {
        let f = ScalarField::blackbox(1, |_: &HPoint| Ok(1.0));
        assert!(theorem13_falsifier(&f, 0.0, 1.0, 10, 0).is_err());
        assert!(theorem13_falsifier(&f, f64::NAN, 1.0, 10, 0).is_err());
    }

    #[test]
    fn the_default_suite_passes() {
        let results = run_suite(&default_suite(42)).unwrap();
        for r in &results {
            assert!(
                r.pass,
                "check '{}' failed: max_err = {:.3e}, worst input: {}",
                r.name, r.max_err, r.worst_input
            );
        }
    }
}
