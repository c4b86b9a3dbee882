//! CR maps of ℍⁿ: the five primitives, their compositions, Jacobian
//! magnitudes, and the generalized inversion Φ_{ξ,λ}^β.
//!
//! The primitives are left translation τ_ξ, dilation δ_λ, rotation ρ_M,
//! the flip ι(z, t) = (z̄, −t), and the inversion
//!
//! ```text
//! 𝒥(z, t) = (z/w, −t/|w|²),   w = t + i|z|²,
//! ```
//!
//! which sends the gauge sphere of radius r to the sphere of radius 1/r.
//! A [`CRMap`] is a finite composition of these; the generalized inversion
//!
//! ```text
//! Φ_{ξ,λ}^β = τ_ξ ∘ ρ_{M_{ξ,β}} ∘ δ_{λ²} ∘ 𝒥 ∘ ι ∘ τ_ξ⁻¹
//! ```
//!
//! is an involution of ℍⁿ \ {ξ} that swaps the gauge ball B_λ(ξ) with its
//! exterior and satisfies the reflection law d(Φζ, ξ)·d(ζ, ξ) = λ². The
//! diagonal phase matrix M_{ξ,β} is exactly what makes the involution
//! property come out; see [`build_m`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hgroup::{
    dilate, group_inv, group_mul, homogeneous_dimension, koranyi_norm, rotate, HPoint, Unitary,
};

/// Below this |w| = |t + i|z|²| the inversion is treated as singular:
/// dividing through would overflow to Inf instead of failing loudly.
pub const CRINV_W_GUARD: f64 = 1e-300;

/// Iteration budget for [`fixed_point_center`].
pub const FIXED_POINT_MAX_ITERS: usize = 10_000;

/// Convergence threshold (Korányi gauge of the image) for
/// [`fixed_point_center`].
pub const FIXED_POINT_TOL: f64 = 1e-8;

/// ι(z, t) = (z̄, −t). An involution that preserves the gauge.
pub fn iota(a: &HPoint) -> HPoint {
    HPoint::new(a.z().iter().map(|c| c.conj()).collect(), -a.t())
}

/// The inversion 𝒥(z, t) = (z/w, −t/|w|²), w = t + i|z|².
///
/// |𝒥(a)|_H = 1/|a|_H, since |w| = |a|_H². Errors out at (and
/// numerically indistinguishably near) the group identity, the map's
/// only singularity.
pub fn cr_inversion(a: &HPoint) -> Result<HPoint> {
    let w = a.w();
    let wn = w.norm();
    if wn < CRINV_W_GUARD {
        return Err(Error::Singular {
            op: "cr_inversion",
            reason: format!("|t + i|z|²| = {wn:.3e} is below the {CRINV_W_GUARD:.0e} guard"),
        });
    }
    let z = a.z().iter().map(|c| c / w).collect();
    Ok(HPoint::new(z, -a.t() / w.norm_sqr()))
}

/// One step of a [`CRMap`] chain.
#[derive(Debug, Clone)]
pub enum Primitive {
    /// Left translation a ↦ ξ·a.
    Translate(HPoint),
    /// Anisotropic dilation δ_λ, λ > 0.
    Dilate(f64),
    /// Rotation (Mz, t), M unitary.
    Rotate(Unitary),
    /// The flip ι.
    Iota,
    /// The inversion 𝒥.
    CRInv,
}

/// A finite composition of [`Primitive`]s, stored in the order the
/// composition is written: `chain[0]` acts *last*, matching how a formula
/// like τ_ξ ∘ ρ_M ∘ δ reads left to right. Chains are never simplified
/// algebraically — at this scale correctness beats speed.
#[derive(Debug, Clone)]
pub struct CRMap {
    chain: Vec<Primitive>,
}

impl CRMap {
    /// Validates eagerly what can be validated without a point: dilation
    /// factors must be positive and finite.
    pub fn new(chain: Vec<Primitive>) -> Result<Self> {
        for p in &chain {
            if let Primitive::Dilate(l) = p {
                if !(*l > 0.0) || !l.is_finite() {
                    return Err(Error::Domain {
                        op: "CRMap",
                        reason: format!("dilation factor must be positive and finite, got {l}"),
                    });
                }
            }
        }
        Ok(CRMap { chain })
    }

    /// The empty chain: the identity map.
    pub fn identity() -> Self {
        CRMap { chain: Vec::new() }
    }

    pub fn chain(&self) -> &[Primitive] {
        &self.chain
    }

    /// Apply the composition to `a`, rightmost primitive first.
    pub fn eval(&self, a: &HPoint) -> Result<HPoint> {
        let mut p = a.clone();
        for prim in self.chain.iter().rev() {
            p = apply_primitive(prim, &p)?;
        }
        Ok(p)
    }
}

fn apply_primitive(prim: &Primitive, p: &HPoint) -> Result<HPoint> {
    match prim {
        Primitive::Translate(xi) => group_mul(xi, p),
        Primitive::Dilate(l) => dilate(*l, p),
        Primitive::Rotate(m) => rotate(m, p),
        Primitive::Iota => Ok(iota(p)),
        Primitive::CRInv => cr_inversion(p),
    }
}

/// |det J_ψ| at `a`, as the product of the primitive determinant
/// magnitudes along the orbit of `a` through the chain:
/// translations, rotations and ι contribute 1; δ_λ contributes λ^Q; and 𝒥
/// evaluated at a point p contributes |p|_H^{−2Q}. (Q = 2n + 2, the
/// Jacobian being taken in the 2n+1 real coordinates.)
pub fn jacobian_det_abs(psi: &CRMap, a: &HPoint) -> Result<f64> {
    let q = homogeneous_dimension(a.n()) as f64;
    let mut p = a.clone();
    let mut det = 1.0;
    for prim in psi.chain().iter().rev() {
        if let Primitive::Dilate(l) = prim {
            det *= l.powf(q);
        }
        if let Primitive::CRInv = prim {
            det *= koranyi_norm(&p).powf(-2.0 * q);
        }
        p = apply_primitive(prim, &p)?;
    }
    Ok(det)
}

/// The phase matrix M_{ξ,β} = diag(e^{iθ_1}, …, e^{iθ_n}) with, writing
/// ξ = (z′, t′),
///
/// ```text
/// θ_k = 2 arg z′_k + arg(t′ + i|z′|² + iβ)   if z′_k ≠ 0,
/// θ_k = 0                                    otherwise.
/// ```
///
/// `arg` is the principal branch (−π, π]; the choice is immaterial since
/// only e^{iθ_k} is ever used. The formula is undefined when some
/// z′_k ≠ 0 but t′ + i|z′|² + iβ = 0 (which needs β = −|z′|², t′ = 0);
/// that is rejected as a domain error rather than silently picking a
/// convention.
pub fn build_m(xi: &HPoint, beta: f64) -> Result<Unitary> {
    let wb = xi.w() + Complex64::new(0.0, beta);
    let any_z = xi.z().iter().any(|c| c.norm_sqr() != 0.0);
    if any_z && wb.norm() == 0.0 {
        return Err(Error::Domain {
            op: "build_m",
            reason: format!(
                "t′ + i|z′|² + iβ = 0 at t′ = {}, |z′|² = {}, β = {beta}: phase undefined",
                xi.t(),
                xi.z_norm_sq()
            ),
        });
    }
    let base = wb.arg();
    let phases: Vec<f64> = xi
        .z()
        .iter()
        .map(|c| {
            if c.norm_sqr() == 0.0 {
                0.0
            } else {
                2.0 * c.arg() + base
            }
        })
        .collect();
    Ok(Unitary::diagonal(&phases))
}

/// The generalized inversion Φ_{ξ,λ}^β, kept with its phase matrix so
/// repeated applications don't rebuild it.
#[derive(Debug, Clone)]
pub struct GCRInversion {
    xi: HPoint,
    lambda: f64,
    beta: f64,
    m: Unitary,
}

impl GCRInversion {
    pub fn new(xi: HPoint, lambda: f64, beta: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain {
                op: "GCRInversion",
                reason: format!("radius must be positive and finite, got {lambda}"),
            });
        }
        let m = build_m(&xi, beta)?;
        Ok(GCRInversion {
            xi,
            lambda,
            beta,
            m,
        })
    }

    pub fn xi(&self) -> &HPoint {
        &self.xi
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The defining composition as an explicit chain,
    /// τ_ξ ∘ ρ_{M_{ξ,β}} ∘ δ_{λ²} ∘ 𝒥 ∘ ι ∘ τ_ξ⁻¹.
    pub fn as_crmap(&self) -> CRMap {
        CRMap {
            chain: vec![
                Primitive::Translate(self.xi.clone()),
                Primitive::Rotate(self.m.clone()),
                Primitive::Dilate(self.lambda * self.lambda),
                Primitive::CRInv,
                Primitive::Iota,
                Primitive::Translate(group_inv(&self.xi)),
            ],
        }
    }

    /// Evaluate Φ_{ξ,λ}^β(ζ). Singular exactly (and only) at ζ = ξ,
    /// where the inner 𝒥 would receive the identity.
    pub fn apply(&self, zeta: &HPoint) -> Result<HPoint> {
        self.as_crmap().eval(zeta)
    }
}

/// Search for the center ξ* at which the generalized inversion built from
/// a caller-supplied radius map λ(·) sends `zeta` to the group identity.
///
/// Iterates T(ξ) := (Φ_{ξ,λ(ξ)}^β(ζ))⁻¹·ξ from ξ₀ = 0. When the full step
/// increases the residual |Φ(ζ)|_H, the step is damped by 0.5 (linear
/// interpolation in coordinates) and taken anyway. Stops as soon as the
/// residual drops below [`FIXED_POINT_TOL`]; gives up after
/// [`FIXED_POINT_MAX_ITERS`] with the last residual attached.
///
/// `eps` is the caller's promise about the answer: for `zeta` far enough
/// out the fixed point is gauge-small, and a converged ξ* with
/// |ξ*|_H > eps means `zeta` was not in the contraction regime — reported
/// as a domain error instead of returned as if trustworthy.
///
/// The iteration contracts fast for t-dominant base points. A `zeta`
/// with a sizable z-component excites a near-neutral mode that the 0.5
/// damping cannot remove; such runs stall above the threshold and come
/// back as no-convergence errors with the stalled residual attached.
pub fn fixed_point_center(
    lambda_of: impl Fn(&HPoint) -> Result<f64>,
    beta: f64,
    zeta: &HPoint,
    eps: f64,
) -> Result<HPoint> {
    let n = zeta.n();
    let residual_of = |xi: &HPoint| -> Result<f64> {
        let phi = GCRInversion::new(xi.clone(), lambda_of(xi)?, beta)?;
        Ok(koranyi_norm(&phi.apply(zeta)?))
    };

    let mut xi = HPoint::identity(n);
    let mut res = residual_of(&xi)?;
    for iter in 0..FIXED_POINT_MAX_ITERS {
        if res <= FIXED_POINT_TOL {
            let gauge = koranyi_norm(&xi);
            if gauge > eps {
                return Err(Error::Domain {
                    op: "fixed_point_center",
                    reason: format!(
                        "converged to |ξ*|_H = {gauge:.3e} > ε = {eps:.3e}; base point is not far enough out"
                    ),
                });
            }
            return Ok(xi);
        }
        let phi = GCRInversion::new(xi.clone(), lambda_of(&xi)?, beta)?;
        let image = phi.apply(zeta)?;
        let full = group_mul(&group_inv(&image), &xi)?;
        let full_res = residual_of(&full)?;
        if full_res <= res {
            xi = full;
            res = full_res;
        } else {
            let damped = lerp_coords(&xi, &full, 0.5);
            res = residual_of(&damped)?;
            xi = damped;
        }
        if iter + 1 == FIXED_POINT_MAX_ITERS {
            return Err(Error::NoConvergence {
                op: "fixed_point_center",
                iterations: FIXED_POINT_MAX_ITERS,
                residual: res,
                threshold: FIXED_POINT_TOL,
            });
        }
    }
    // Loop bound is FIXED_POINT_MAX_ITERS ≥ 1; the final iteration either
    // returned Ok or the NoConvergence above.
    unreachable!("fixed_point_center loop exited without returning")
}

/// Coordinatewise (1−s)·a + s·b; the damping step of the fixed-point
/// iteration works in global coordinates, not in the group.
fn lerp_coords(a: &HPoint, b: &HPoint, s: f64) -> HPoint {
    let z = a
        .z()
        .iter()
        .zip(b.z())
        .map(|(x, y)| x * (1.0 - s) + y * s)
        .collect();
    HPoint::new(z, a.t() * (1.0 - s) + b.t() * s)
}

/// A gauge-ball-sized sanity bound used by tests: |Φζ − ζ| style checks
/// scale with 1 + |ζ|_H², so tolerances are stated against this.
pub fn involution_scale(zeta: &HPoint) -> f64 {
    let g = koranyi_norm(zeta);
    1.0 + g * g
}

#[allow(dead_code)]
fn _assert_send_sync() {
    fn ok<T: Send + Sync>() {}
    ok::<CRMap>();
    ok::<GCRInversion>();
}
