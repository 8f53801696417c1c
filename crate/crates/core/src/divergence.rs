//! The Bregman divergence D_Ψ, its one-sided variant D⁺_Ψ, the algebraic
//! identities it satisfies, the Ψ-angle, and the extended divergence
//! D_{ℓ,Ψ} through a nonlinear embedding.

use crate::embeddings::Embedding;
use crate::error::{Error, Result};
use crate::potentials::Potential;
use crate::spaces::{norm, pairing, SpaceKind, SpacePoint};

/// Divergence value with domain flags. The raw value is stored unclipped;
/// +∞ encodes "right argument outside the domain interior" (and left
/// argument outside the effective domain).
#[derive(Clone, Copy, Debug)]
pub struct DivergenceValue {
    pub value: f64,
    pub left_in_domain: bool,
    pub right_in_interior: bool,
}

impl DivergenceValue {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// D_Ψ(x, y) = Ψ(x) − Ψ(y) − ⟨x − y, ∇Ψ(y)⟩, with +∞ whenever y is outside
/// the domain interior or x outside the effective domain.
pub fn bregman(psi: &Potential, x: &SpacePoint, y: &SpacePoint) -> Result<DivergenceValue> {
    let evx = psi.eval(x)?;
    let evy = psi.eval(y)?;
    let left_in_domain = evx.value.is_finite();
    let right_in_interior = evy.in_interior;
    let value = match (&evy.gradient, left_in_domain && right_in_interior) {
        (Some(gy), true) => evx.value - evy.value - pairing(&x.sub(y), gy)?,
        _ => f64::INFINITY,
    };
    Ok(DivergenceValue { value, left_in_domain, right_in_interior })
}

/// The Bregman–Fenchel form Ψ(x) + Ψ*(∇Ψ(y)) − ⟨x, ∇Ψ(y)⟩ (equal to
/// `bregman` on interiors; used as a cross-check).
pub fn bregman_fenchel_form(psi: &Potential, x: &SpacePoint, y: &SpacePoint) -> Result<f64> {
    let evx = psi.eval(x)?;
    let gy = psi.grad(y)?;
    let conj = psi.conjugate_eval(&gy)?;
    Ok(evx.value + conj.value - pairing(x, &gy)?)
}

/// One-sided divergence D⁺_Ψ(x, y) = Ψ(x) − Ψ(y) − D⁺Ψ(y; x−y), defined for
/// y anywhere in the effective domain. The right directional derivative is
/// computed by Richardson extrapolation over a geometric step ladder
/// (1e-2 … 1e-7); a ladder diverging monotonically beyond 1e6·scale declares
/// the derivative infinite and the divergence +∞.
pub fn one_sided_bregman(psi: &Potential, x: &SpacePoint, y: &SpacePoint) -> Result<f64> {
    let fy = psi.eval(y)?.value;
    if !fy.is_finite() {
        return Ok(f64::INFINITY);
    }
    let fx = psi.eval(x)?.value;
    if !fx.is_finite() {
        return Ok(f64::INFINITY);
    }
    let h = x.sub(y);
    if h.euclid_norm() == 0.0 {
        return Ok(0.0);
    }
    let scale = 1.0 + fx.abs() + fy.abs();

    // Forward differences d(t) = (Ψ(y + t h) − Ψ(y))/t; by convexity these
    // are finite for t ∈ (0, 1] and nonincreasing as t ↓ 0.
    let ratio = 0.1f64;
    let mut ladder = Vec::new();
    let mut t = 1e-2;
    while t >= 0.99e-7 {
        let mut yt = y.clone();
        yt.axpy(t, &h);
        let ft = psi.eval(&yt)?.value;
        if !ft.is_finite() {
            return Ok(f64::INFINITY);
        }
        ladder.push((ft - fy) / t);
        t *= ratio;
    }
    // A convergent ladder d(t) = L + c₁t + … contracts its successive
    // differences by the step ratio; a ladder sliding to −∞ (boundary y)
    // does not. Declare the derivative −∞ (and D⁺ = +∞) on a monotone
    // decreasing ladder whose differences fail to contract, or once the
    // values pass −1e6·scale.
    let monotone_down = ladder.windows(2).all(|w| w[1] <= w[0] + 1e-14 * scale);
    let diffs: Vec<f64> = ladder.windows(2).map(|w| w[0] - w[1]).collect();
    let contracts = match (diffs.first(), diffs.last()) {
        (Some(d0), Some(dl)) => *dl <= 0.5 * d0.abs() + 1e-12 * scale,
        _ => true,
    };
    if monotone_down
        && ((!contracts && diffs[0] > 1e-9 * scale)
            || ladder.last().copied().unwrap_or(0.0) < -1e6 * scale)
    {
        return Ok(f64::INFINITY);
    }

    // Richardson (Neville) extrapolation in powers of t.
    let mut table = ladder.clone();
    let n = table.len();
    for m in 1..n {
        let r = ratio.powi(m as i32);
        for i in 0..(n - m) {
            table[i] = (table[i + 1] - r * table[i]) / (1.0 - r);
        }
    }
    let deriv = table[0];
    Ok(fx - fy - deriv)
}

/// Residuals of the five divergence identities at interior points
/// (each normalized by 1 + the magnitudes entering it).
#[derive(Clone, Copy, Debug)]
pub struct IdentityReport {
    pub affine_scaling: f64,
    pub symmetric_sum: f64,
    pub cosine: f64,
    pub quadruple: f64,
    pub dual_swap: f64,
}

impl IdentityReport {
    pub fn max_abs(&self) -> f64 {
        self.affine_scaling
            .max(self.symmetric_sum)
            .max(self.cosine)
            .max(self.quadruple)
            .max(self.dual_swap)
    }
}

/// Evaluate the affine-scaling, symmetric-sum, generalized-cosine, quadruple,
/// and dual-swap identities at interior points x, y, z, w, with weights
/// λ₁, λ₂ ≥ 0 and an affine shift (a, c) for the scaling law.
#[allow(clippy::too_many_arguments)]
pub fn identity_suite(
    psi: &Potential,
    x: &SpacePoint,
    y: &SpacePoint,
    z: &SpacePoint,
    w: &SpacePoint,
    lambda1: f64,
    lambda2: f64,
    affine: (&SpacePoint, f64),
) -> Result<IdentityReport> {
    for (name, pt) in [("x", x), ("y", y), ("z", z), ("w", w)] {
        if !psi.in_interior(pt) {
            return Err(Error::Precondition(format!(
                "identity suite requires interior points; {name} is not interior"
            )));
        }
    }
    let gx = psi.grad(x)?;
    let gy = psi.grad(y)?;

    let d = |a: &SpacePoint, b: &SpacePoint| -> Result<f64> { Ok(bregman(psi, a, b)?.value) };
    let dxy = d(x, y)?;
    let dyx = d(y, x)?;
    let dzx = d(z, x)?;
    let dzy = d(z, y)?;
    let dwx = d(w, x)?;
    let dwy = d(w, y)?;

    // Affine scaling: D over λ₁Ψ + λ₂·Hilbert + affine splits into the sum.
    let hilbert = match psi.space.kind {
        SpaceKind::Vector => Potential::hilbert(psi.space.n),
        SpaceKind::HermitianMatrix => {
            Potential::squared_norm(crate::spaces::SpaceDescriptor::frobenius(psi.space.n))
        }
    };
    let combined = Potential::scaled_sum(
        vec![(lambda1, psi.clone()), (lambda2, hilbert.clone())],
        Some((affine.0.clone(), affine.1)),
    )?;
    let lhs = bregman(&combined, x, y)?.value;
    let rhs = lambda1 * dxy + lambda2 * bregman(&hilbert, x, y)?.value;
    let affine_scaling = (lhs - rhs).abs() / (1.0 + lhs.abs() + rhs.abs());

    // Symmetric sum: D(x,y) + D(y,x) = ⟨x−y, ∇Ψ(x)−∇Ψ(y)⟩.
    let sym_rhs = pairing(&x.sub(y), &gx.sub(&gy))?;
    let symmetric_sum = (dxy + dyx - sym_rhs).abs() / (1.0 + dxy.abs() + dyx.abs());

    // Generalized cosine: D(z,x) = D(z,y) + D(y,x) − ⟨z−y, ∇Ψ(x)−∇Ψ(y)⟩.
    let cos_rhs = dzy + dyx - pairing(&z.sub(y), &gx.sub(&gy))?;
    let cosine = (dzx - cos_rhs).abs() / (1.0 + dzx.abs() + cos_rhs.abs());

    // Quadruple: D(z,x) + D(w,y) = D(z,y) + D(w,x) − ⟨z−w, ∇Ψ(x)−∇Ψ(y)⟩.
    let quad_lhs = dzx + dwy;
    let quad_rhs = dzy + dwx - pairing(&z.sub(w), &gx.sub(&gy))?;
    let quadruple = (quad_lhs - quad_rhs).abs() / (1.0 + quad_lhs.abs() + quad_rhs.abs());

    // Dual swap: D_Ψ(x,y) = D_{Ψ*}(∇Ψ(y), ∇Ψ(x)).
    let star = psi.conjugate_potential();
    let swapped = bregman(&star, &gy, &gx)?.value;
    let dual_swap = (dxy - swapped).abs() / (1.0 + dxy.abs() + swapped.abs());

    Ok(IdentityReport { affine_scaling, symmetric_sum, cosine, quadruple, dual_swap })
}

/// Ψ-angle data: the arccos of the clamped ratio, plus the raw ratio
/// (the printed denominator carries the factor 2, kept verbatim; in the
/// Hilbert case this is arccos(cos θ / 2), not the Euclidean angle).
#[derive(Clone, Copy, Debug)]
pub struct PsiAngle {
    pub angle: f64,
    pub raw_ratio: f64,
}

/// ∠_Ψ(x−y, z−y) = arccos(⟨x−y, ∇Ψ(z)−∇Ψ(y)⟩ / (2‖x−y‖‖z−y‖)).
pub fn psi_angle(psi: &Potential, x: &SpacePoint, y: &SpacePoint, z: &SpacePoint) -> Result<PsiAngle> {
    let xy = x.sub(y);
    let zy = z.sub(y);
    let nx = norm(&psi.space, &xy);
    let nz = norm(&psi.space, &zy);
    if nx == 0.0 || nz == 0.0 {
        return Err(Error::Precondition("psi_angle needs x ≠ y and z ≠ y".into()));
    }
    if !(psi.in_interior(y) && psi.in_interior(z)) {
        return Err(Error::Precondition("psi_angle needs interior y and z".into()));
    }
    let num = pairing(&xy, &psi.grad(z)?.sub(&psi.grad(y)?))?;
    let raw_ratio = num / (2.0 * nx * nz);
    Ok(PsiAngle { angle: raw_ratio.clamp(-1.0, 1.0).acos(), raw_ratio })
}

/// Extended divergence D_{ℓ,Ψ}(φ, ψ) = D_Ψ(ℓ(φ), ℓ(ψ)).
pub fn extended_bregman(
    ell: &Embedding,
    psi: &Potential,
    phi: &SpacePoint,
    rho: &SpacePoint,
) -> Result<DivergenceValue> {
    let a = ell.apply(phi)?;
    let b = ell.apply(rho)?;
    bregman(psi, &a, &b)
}
