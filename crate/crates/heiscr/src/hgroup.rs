//! The Heisenberg group ℍⁿ = ℂⁿ × ℝ and its metric geometry.
//!
//! Points are pairs (z, t) with z ∈ ℂⁿ, t ∈ ℝ, multiplied by
//!
//! ```text
//! (z, t)·(z′, t′) = (z + z′, t + t′ + 2 Im⟨z, z′⟩),   ⟨z, z′⟩ = Σ z_j conj(z′_j)
//! ```
//!
//! so the identity is (0, 0) and ξ⁻¹ = −ξ. The gauge |(z,t)|_H =
//! (|z|⁴ + t²)^{1/4} is homogeneous of degree one under the anisotropic
//! dilations δ_λ(z, t) = (λz, λ²t), and d(a, b) = |b⁻¹·a|_H is a
//! left-invariant distance. Haar measure is Lebesgue measure on ℝ^{2n+1},
//! which scales as λ^Q under δ_λ with Q = 2n + 2 the homogeneous dimension.
//!
//! Everything here is a pure function of its inputs; `HPoint` and
//! [`Unitary`] are immutable once built.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rng;

/// Homogeneous dimension Q = 2n + 2 of ℍⁿ.
pub fn homogeneous_dimension(n: usize) -> usize {
    2 * n + 2
}

/// A point (z, t) ∈ ℍⁿ. The dimension n is `z.len()` and is fixed per
/// point; binary operations require equal n on both sides.
#[derive(Debug, Clone, PartialEq)]
pub struct HPoint {
    z: Vec<Complex64>,
    t: f64,
}

impl HPoint {
    /// Build a point from trusted coordinates. Debug builds verify
    /// finiteness; untrusted input (CLI, JSON) should go through
    /// [`HPoint::try_new`] instead.
    pub fn new(z: Vec<Complex64>, t: f64) -> Self {
        debug_assert!(!z.is_empty(), "HPoint needs n >= 1");
        debug_assert!(
            t.is_finite() && z.iter().all(|c| c.re.is_finite() && c.im.is_finite()),
            "HPoint coordinates must be finite"
        );
        HPoint { z, t }
    }

    /// Build a point from untrusted coordinates, rejecting n = 0 and any
    /// non-finite component.
    pub fn try_new(z: Vec<Complex64>, t: f64) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::Domain {
                op: "HPoint",
                reason: "n must be at least 1".into(),
            });
        }
        if !t.is_finite() || z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Domain {
                op: "HPoint",
                reason: "coordinates must be finite".into(),
            });
        }
        Ok(HPoint { z, t })
    }

    /// Group identity (0, 0) in dimension n.
    pub fn identity(n: usize) -> Self {
        HPoint::new(vec![Complex64::new(0.0, 0.0); n], 0.0)
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }

    pub fn z(&self) -> &[Complex64] {
        &self.z
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// |z|² = Σ |z_j|².
    pub fn z_norm_sq(&self) -> f64 {
        self.z.iter().map(|c| c.norm_sqr()).sum()
    }

    /// The complex coordinate w = t + i|z|² that controls every inversion
    /// formula in this crate; the point is a group identity iff w = 0.
    pub fn w(&self) -> Complex64 {
        Complex64::new(self.t, self.z_norm_sq())
    }
}

fn check_same_n(op: &'static str, a: &HPoint, b: &HPoint) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::Dimension {
            op,
            expected: a.n(),
            got: b.n(),
        });
    }
    Ok(())
}

/// Group product a·b = (z_a + z_b, t_a + t_b + 2 Im⟨z_a, z_b⟩).
pub fn group_mul(a: &HPoint, b: &HPoint) -> Result<HPoint> {
    check_same_n("group_mul", a, b)?;
    let z: Vec<Complex64> = a.z.iter().zip(&b.z).map(|(x, y)| x + y).collect();
    let im_inner: f64 = a
        .z
        .iter()
        .zip(&b.z)
        .map(|(x, y)| (x * y.conj()).im)
        .sum();
    Ok(HPoint::new(z, a.t + b.t + 2.0 * im_inner))
}

/// Group inverse a⁻¹ = −a (componentwise negation).
pub fn group_inv(a: &HPoint) -> HPoint {
    HPoint::new(a.z.iter().map(|c| -c).collect(), -a.t)
}

/// Korányi gauge |a|_H = (|z|⁴ + t²)^{1/4}; zero iff a is the identity.
pub fn koranyi_norm(a: &HPoint) -> f64 {
    let zs = a.z_norm_sq();
    (zs * zs + a.t * a.t).powf(0.25)
}

/// Left-invariant gauge distance d(a, b) = |b⁻¹·a|_H.
pub fn dist(a: &HPoint, b: &HPoint) -> Result<f64> {
    check_same_n("dist", a, b)?;
    let rel = group_mul(&group_inv(b), a)?;
    Ok(koranyi_norm(&rel))
}

/// Anisotropic dilation δ_λ(z, t) = (λz, λ²t), λ > 0. A group
/// automorphism: δ_λ(a·b) = δ_λ(a)·δ_λ(b).
pub fn dilate(lambda: f64, a: &HPoint) -> Result<HPoint> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain {
            op: "dilate",
            reason: format!("dilation factor must be positive and finite, got {lambda}"),
        });
    }
    Ok(HPoint::new(
        a.z.iter().map(|c| lambda * c).collect(),
        lambda * lambda * a.t,
    ))
}

/// Unitary n×n matrix, validated on construction: matrices with
/// ‖M·M* − I‖_∞ entrywise above 1e-12 are rejected outright, never
/// re-orthonormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    /// Row-major entries, `rows[i][j]` = M_{ij}.
    rows: Vec<Vec<Complex64>>,
}

/// Entrywise tolerance for the unitarity check M·M* = I.
pub const UNITARY_TOL: f64 = 1e-12;

impl Unitary {
    pub fn new(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Domain {
                op: "Unitary",
                reason: "matrix must be square with n >= 1".into(),
            });
        }
        // M·M* = I entrywise: Σ_k M_{ik} conj(M_{jk}) = δ_{ij}.
        for i in 0..n {
            for j in 0..n {
                let s: Complex64 = (0..n).map(|k| rows[i][k] * rows[j][k].conj()).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                let dev = (s - target).norm();
                if !(dev <= UNITARY_TOL) {
                    return Err(Error::Domain {
                        op: "Unitary",
                        reason: format!(
                            "M·M* deviates from identity by {dev:.3e} at entry ({i},{j}), tolerance {UNITARY_TOL:.0e}"
                        ),
                    });
                }
            }
        }
        Ok(Unitary { rows })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect();
        Unitary { rows }
    }

    /// Diagonal unitary diag(e^{iθ_1}, …, e^{iθ_n}).
    pub fn diagonal(phases: &[f64]) -> Self {
        let n = phases.len();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            Complex64::from_polar(1.0, phases[i])
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                    })
                    .collect()
            })
            .collect();
        Unitary { rows }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Matrix–vector product Mz.
    pub fn apply(&self, z: &[Complex64]) -> Vec<Complex64> {
        self.rows
            .iter()
            .map(|row| row.iter().zip(z).map(|(m, x)| m * x).sum())
            .collect()
    }

    /// Conjugate transpose M* = M⁻¹.
    pub fn adjoint(&self) -> Unitary {
        let n = self.n();
        let rows = (0..n)
            .map(|i| (0..n).map(|j| self.rows[j][i].conj()).collect())
            .collect();
        Unitary { rows }
    }
}

/// Rotation ρ_M(z, t) = (Mz, t); preserves the Korányi gauge because
/// |Mz| = |z| for unitary M.
pub fn rotate(m: &Unitary, a: &HPoint) -> Result<HPoint> {
    if m.n() != a.n() {
        return Err(Error::Dimension {
            op: "rotate",
            expected: a.n(),
            got: m.n(),
        });
    }
    Ok(HPoint::new(m.apply(&a.z), a.t))
}

/// Largest absolute difference across the 2n+1 real coordinates of two
/// points. The right yardstick for "these points should be equal":
/// unlike the gauge of b⁻¹·a, it does not take a square root of a tiny
/// t-discrepancy and so stays at rounding scale for rounding-scale
/// disagreements.
pub fn coord_distance(a: &HPoint, b: &HPoint) -> Result<f64> {
    check_same_n("coord_distance", a, b)?;
    let mut worst = (a.t - b.t).abs();
    for (x, y) in a.z.iter().zip(&b.z) {
        worst = worst.max((x.re - y.re).abs()).max((x.im - y.im).abs());
    }
    Ok(worst)
}

/// Lebesgue (= Haar) volume of the gauge ball B_λ in ℍⁿ:
///
/// ```text
/// vol(B_λ) = λ^Q · πⁿ/(n−1)! · B(n/2, 3/2)
/// ```
///
/// obtained by integrating the slice thickness 2√(1 − |z|⁴) over |z| ≤ 1
/// and substituting u = |z|⁴. For n = 1, 2, 3 this is π²/2, 2π²/3, π⁴/16
/// times λ^Q.
pub fn ball_volume(n: usize, lambda: f64) -> f64 {
    let q = homogeneous_dimension(n) as f64;
    let pi_pow = std::f64::consts::PI.powi(n as i32);
    let fact: f64 = (1..n).map(|k| k as f64).product();
    let beta = gamma_half(n as u32) * gamma_half(3) / gamma_half(n as u32 + 3);
    lambda.powf(q) * pi_pow / fact * beta
}

/// Γ(k/2) for integer k ≥ 1, via Γ(1/2) = √π, Γ(1) = 1 and the
/// recurrence Γ(x+1) = xΓ(x). Only these arguments ever arise here, so a
/// general-purpose gamma dependency would be dead weight.
fn gamma_half(k: u32) -> f64 {
    match k {
        1 => std::f64::consts::PI.sqrt(),
        2 => 1.0,
        _ => (f64::from(k) / 2.0 - 1.0) * gamma_half(k - 2),
    }
}

/// Draw `k` points uniformly (w.r.t. Haar = Lebesgue measure) from the
/// gauge ball B_λ(ξ), deterministically from `seed`.
///
/// Rejection-samples the box [−λ,λ]^{2n} × [−λ², λ²] around the identity,
/// keeps points with gauge < λ, then left-translates by ξ. Left-invariance
/// of Lebesgue measure under the group makes the translated draw uniform
/// in B_λ(ξ), and identical seeds give ξ·(draws around 0) verbatim. The
/// acceptance rate is vol(B_1)/2^{2n+1} (≈ 0.62 at n = 1), so the loop
/// terminates quickly for every n of interest.
pub fn sample_ball(xi: &HPoint, lambda: f64, k: usize, seed: u64) -> Result<Vec<HPoint>> {
    let mut rng = rng::root(seed);
    sample_ball_with(&mut rng, xi, lambda, k)
}

/// [`sample_ball`] on an externally managed generator (e.g. a per-task
/// stream), for callers interleaving several stochastic estimates.
pub fn sample_ball_with(
    rng: &mut ChaCha8Rng,
    xi: &HPoint,
    lambda: f64,
    k: usize,
) -> Result<Vec<HPoint>> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain {
            op: "sample_ball",
            reason: format!("radius must be positive and finite, got {lambda}"),
        });
    }
    let n = xi.n();
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let z: Vec<Complex64> = (0..n)
            .map(|_| {
                Complex64::new(
                    rng.gen_range(-lambda..=lambda),
                    rng.gen_range(-lambda..=lambda),
                )
            })
            .collect();
        let t = rng.gen_range(-lambda * lambda..=lambda * lambda);
        let p = HPoint::new(z, t);
        if koranyi_norm(&p) < lambda {
            out.push(group_mul(xi, &p)?);
        }
    }
    Ok(out)
}

/// Uniform draw from the box [−z_half, z_half]^{2n} × [−t_half, t_half];
/// the workhorse behind randomized identity checks.
pub fn random_in_box(rng: &mut ChaCha8Rng, n: usize, z_half: f64, t_half: f64) -> HPoint {
    let z = (0..n)
        .map(|_| {
            Complex64::new(
                rng.gen_range(-z_half..=z_half),
                rng.gen_range(-z_half..=z_half),
            )
        })
        .collect();
    HPoint::new(z, rng.gen_range(-t_half..=t_half))
}

/// Haar-random unitary: orthonormalize a complex Gaussian matrix
/// (Gram–Schmidt with phase fix). Used only to generate test rotations.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> Unitary {
    use rand_distr::StandardNormal;
    loop {
        let mut cols: Vec<Vec<Complex64>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                    })
                    .collect()
            })
            .collect();
        let mut ok = true;
        for j in 0..n {
            for i in 0..j {
                let proj: Complex64 =
                    (0..n).map(|k| cols[i][k].conj() * cols[j][k]).sum();
                let against = cols[i].clone();
                for (c, &a) in cols[j].iter_mut().zip(&against) {
                    *c -= proj * a;
                }
            }
            let norm: f64 = cols[j].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            for c in cols[j].iter_mut() {
                *c /= norm;
            }
        }
        if !ok {
            continue;
        }
        // cols are orthonormal columns; rows[i][j] = M_{ij} = cols[j][i].
        let rows = (0..n)
            .map(|i| (0..n).map(|j| cols[j][i]).collect())
            .collect();
        if let Ok(u) = Unitary::new(rows) {
            return u;
        }
    }
}
