//! Nonlinear coordinate maps ℓ between state sets and model spaces: Mazur
//! maps on vectors and Hermitian matrices, the Lozanovskii factorization map
//! and its inverse on unit spheres, the spin-factor base map, and the D_γ
//! divergence family evaluated through them.

use crate::error::{Error, Result};
use crate::gauges::Gauge;
use crate::potentials::Potential;
use crate::spaces::{
    matrix_function, norm, normalized_duality_map, pairing, polar_decompose, trace_norm,
    NormSpec, PointData, SpaceDescriptor, SpaceKind, SpacePoint,
};

/// Domain on which an embedding is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EmbeddingDomain {
    FullSpace,
    PositiveCone,
    UnitBall,
    UnitSphere,
    /// Spin-factor base K = {(x, 1) : ‖x‖ ≤ 1}.
    Base,
}

#[derive(Clone, Debug)]
pub enum EmbeddingKind {
    Identity,
    /// ℓ_{γ₁,γ₂}(x) = λ·u_x|x|^{γ₂/γ₁}, componentwise sgn(x)|x|^{γ₂/γ₁} on
    /// vectors.
    Mazur { g1: f64, g2: f64, lambda: f64 },
    /// Lozanovskii factorization map from the positive unit sphere of L₁
    /// onto the positive unit sphere of the target space, extended to the
    /// unit ball radially (ℓ(0) = 0).
    Lozanovskii { target: SpaceDescriptor },
    /// ℓ_{/ℝ}: base point (x, 1) ↦ x; points are (n+1)-vectors with the last
    /// coordinate λ.
    SpinFactor { inner: SpaceDescriptor },
}

/// Bijection ℓ between a state set and a model space, with inverse and
/// continuity metadata.
#[derive(Clone, Debug)]
pub struct Embedding {
    pub kind: EmbeddingKind,
    pub domain: EmbeddingDomain,
    /// Claimed Lipschitz–Hölder exponent on the stated domain, when the
    /// theory provides one.
    pub holder_exponent: Option<f64>,
    /// Coordinate space of state-side points.
    pub state_space: SpaceDescriptor,
}

impl Embedding {
    pub fn identity(space: SpaceDescriptor) -> Embedding {
        Embedding {
            kind: EmbeddingKind::Identity,
            domain: EmbeddingDomain::FullSpace,
            holder_exponent: Some(1.0),
            state_space: space,
        }
    }

    /// Mazur map with scale λ. State-side points carry `coords` (their norm
    /// field is formal: the natural state norm is ‖·‖₁, see `trace_norm`).
    pub fn mazur(coords: SpaceDescriptor, g1: f64, g2: f64, lambda: f64) -> Result<Embedding> {
        if !(g1 > 0.0 && g2 > 0.0 && lambda > 0.0) {
            return Err(Error::Validation(
                "mazur map needs positive exponents and scale".into(),
            ));
        }
        Ok(Embedding {
            kind: EmbeddingKind::Mazur { g1, g2, lambda },
            domain: EmbeddingDomain::FullSpace,
            holder_exponent: Some((g2 / g1).min(1.0)),
            state_space: coords,
        })
    }

    /// The map ℓ_γ = ℓ_{1,γ} from trace-normed states into L_{1/γ}.
    pub fn mazur_gamma(coords: SpaceDescriptor, gamma: f64) -> Result<Embedding> {
        Embedding::mazur(coords, 1.0, gamma, 1.0)
    }

    pub fn lozanovskii(target: SpaceDescriptor) -> Embedding {
        // ℓ_X is (1−γ)/γ-Hölder for 1/γ-uniformly Fréchet differentiable X;
        // for the p-norm families here γ = 1/min(2,p).
        let p = target.norm.outer_p();
        let holder = (p.min(2.0) - 1.0).min(1.0);
        Embedding {
            kind: EmbeddingKind::Lozanovskii { target: target.clone() },
            domain: EmbeddingDomain::UnitSphere,
            holder_exponent: Some(holder),
            state_space: match target.kind {
                SpaceKind::Vector => SpaceDescriptor::euclidean(target.n),
                SpaceKind::HermitianMatrix => SpaceDescriptor::frobenius(target.n),
            },
        }
    }

    pub fn spin_factor(inner: SpaceDescriptor) -> Result<Embedding> {
        if inner.kind != SpaceKind::Vector {
            return Err(Error::Unsupported(
                "spin factor embeddings take vector inner spaces".into(),
            ));
        }
        let state = SpaceDescriptor::euclidean(inner.n + 1);
        Ok(Embedding {
            kind: EmbeddingKind::SpinFactor { inner },
            domain: EmbeddingDomain::Base,
            holder_exponent: Some(1.0),
            state_space: state,
        })
    }

    /// Model space receiving ℓ's values.
    pub fn output_space(&self) -> SpaceDescriptor {
        match &self.kind {
            EmbeddingKind::Identity => self.state_space.clone(),
            EmbeddingKind::Mazur { g2, .. } => {
                let p = 1.0 / g2;
                if p > 1.0 && p.is_finite() {
                    match self.state_space.kind {
                        SpaceKind::Vector => {
                            SpaceDescriptor::vector(self.state_space.n, NormSpec::p(p)).unwrap()
                        }
                        SpaceKind::HermitianMatrix => {
                            SpaceDescriptor::hermitian(self.state_space.n, NormSpec::schatten(p))
                                .unwrap()
                        }
                    }
                } else {
                    // Formal coordinates when the target exponent leaves (1,∞).
                    self.state_space.clone()
                }
            }
            EmbeddingKind::Lozanovskii { target } => target.clone(),
            EmbeddingKind::SpinFactor { inner } => inner.clone(),
        }
    }

    pub fn apply(&self, x: &SpacePoint) -> Result<SpacePoint> {
        match &self.kind {
            EmbeddingKind::Identity => Ok(x.clone()),
            EmbeddingKind::Mazur { g1, g2, lambda } => {
                Ok(mazur(*g1, *g2, x)?.scale(*lambda).with_space(&self.output_space()))
            }
            EmbeddingKind::Lozanovskii { target } => {
                // Ball extension ‖z‖₁ · ℓ_X(z/‖z‖₁), ℓ_X(0) = 0.
                let r = trace_norm(x);
                if r == 0.0 {
                    return Ok(SpacePoint::zeros(target));
                }
                let y = lozanovskii_forward(target, &x.scale(1.0 / r))?;
                Ok(y.scale(r))
            }
            EmbeddingKind::SpinFactor { inner } => {
                let v = spin_point_from_vector(x, inner)?;
                spin_embed(&v)
            }
        }
    }

    pub fn inverse_apply(&self, y: &SpacePoint) -> Result<SpacePoint> {
        match &self.kind {
            EmbeddingKind::Identity => Ok(y.clone()),
            EmbeddingKind::Mazur { g1, g2, lambda } => Ok(mazur(*g2, *g1, &y.scale(1.0 / lambda))?
                .with_space(&self.state_space)),
            EmbeddingKind::Lozanovskii { target } => {
                let r = norm(target, &y.with_space(target));
                if r == 0.0 {
                    return Ok(SpacePoint::zeros(&self.state_space));
                }
                let z = lozanovskii_inverse(target, &y.scale(1.0 / r))?;
                Ok(z.scale(r).with_space(&self.state_space))
            }
            EmbeddingKind::SpinFactor { inner } => {
                let v = spin_lift(&y.with_space(inner))?;
                Ok(spin_point_to_vector(&v, &self.state_space))
            }
        }
    }
}

/// Mazur map u_x|x|^{γ₂/γ₁}: componentwise power on vectors, polar power on
/// Hermitian matrices. The output keeps the input's coordinate descriptor.
pub fn mazur(g1: f64, g2: f64, x: &SpacePoint) -> Result<SpacePoint> {
    let e = g2 / g1;
    match &x.data {
        PointData::Vector(v) => {
            let out: Vec<f64> = v
                .iter()
                .map(|t| if *t == 0.0 { 0.0 } else { t.signum() * t.abs().powf(e) })
                .collect();
            SpacePoint::from_vec(&x.space, out)
        }
        PointData::Matrix(_) => {
            let parts = polar_decompose(x)?;
            let eigs = parts.eigenvalues.as_ref().expect("matrix polar carries eigenvalues");
            let basis = parts.basis.as_ref().expect("matrix polar carries a basis");
            let vals: Vec<f64> = eigs
                .iter()
                .map(|t| if *t == 0.0 { 0.0 } else { t.signum() * t.abs().powf(e) })
                .collect();
            Ok(SpacePoint {
                space: x.space.clone(),
                data: PointData::Matrix(crate::spaces::matrix_from_eigen(basis, &vals)),
            })
        }
    }
}

/// Σ|λᵢ(x)|^r (the r-th power of the Schatten/ℓ_r norm), used for the Mazur
/// norm interlock ‖ℓ(x)‖_{1/γ₂}^{1/γ₂} = ‖x‖_{1/γ₁}^{1/γ₁}.
pub fn power_sum_of_spectrum(x: &SpacePoint, r: f64) -> f64 {
    match &x.data {
        PointData::Vector(v) => v.iter().map(|t| t.abs().powf(r)).sum(),
        PointData::Matrix(_) => {
            let (eigs, _) = crate::spaces::eigen_sorted(x).expect("validated Hermitian point");
            eigs.iter().map(|t| t.abs().powf(r)).sum()
        }
    }
}

/// D_γ(φ, ψ) for γ ∈ (0,1) on trace-class points (vectors as the diagonal
/// case):
///
///   (1/(1−γ))‖φ‖₁ + (1/γ)‖ψ‖₁ − (1/(γ(1−γ))) Re tr(u_φ|φ|^γ u_ψ|ψ|^{1−γ}).
///
/// The cross term enters with a minus sign: substituting λ = 1, β = γ,
/// α = γ(1−γ) into the verified formula for D_{λℓ_γ,Ψ_{φ_{α,β}}} forces it,
/// and D_γ(φ,φ) = 0 fails otherwise.
pub fn d_gamma(phi: &SpacePoint, psi_pt: &SpacePoint, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Validation(format!("d_gamma needs gamma in (0,1), got {gamma}")));
    }
    let a = mazur(1.0, gamma, phi)?;
    let b = mazur(1.0, 1.0 - gamma, psi_pt)?;
    let cross = pairing(&a, &b)?;
    Ok(trace_norm(phi) / (1.0 - gamma) + trace_norm(psi_pt) / gamma
        - cross / (gamma * (1.0 - gamma)))
}

/// The same D_γ evaluated through the embedding route
/// D_{ℓ_γ, Ψ_{φ_{γ(1−γ),γ}}}: an independent code path used to cross-check
/// the closed form.
pub fn d_gamma_via_embedding(
    phi: &SpacePoint,
    psi_pt: &SpacePoint,
    gamma: f64,
) -> Result<f64> {
    let ell = Embedding::mazur_gamma(phi.space.clone(), gamma)?;
    let model = ell.output_space();
    let psi = Potential::gauge(model, Gauge::power(gamma * (1.0 - gamma), gamma)?);
    Ok(crate::divergence::extended_bregman(&ell, &psi, phi, psi_pt)?.value)
}

/// Lozanovskii inverse ℓ_X⁻¹(x) = |j(x)|·x on the unit sphere of X;
/// the output lies on the unit sphere of L₁.
pub fn lozanovskii_inverse(space: &SpaceDescriptor, x: &SpacePoint) -> Result<SpacePoint> {
    let r = norm(space, &x.with_space(space));
    if (r - 1.0).abs() > 1e-10 {
        return Err(Error::Precondition(format!(
            "lozanovskii_inverse needs a unit-sphere point, got norm {r}"
        )));
    }
    let j = normalized_duality_map(space, &x.with_space(space));
    match (&j.data, &x.data) {
        (PointData::Vector(jj), PointData::Vector(xv)) => {
            let out: Vec<f64> = jj.iter().zip(xv.iter()).map(|(a, b)| a.abs() * b).collect();
            SpacePoint::from_vec(&x.space, out)
        }
        (PointData::Matrix(_), PointData::Matrix(xm)) => {
            // x and j(x) share an eigenbasis, so |j(x)|x is Hermitian.
            let jabs = matrix_function(&j.with_space(&x.space), f64::abs)?;
            let prod = jabs.data.as_matrix() * xm;
            SpacePoint::from_matrix(&x.space, prod)
        }
        _ => unreachable!(),
    }
}

/// Lozanovskii forward map: given z on the positive unit sphere of L₁,
/// produce y on the positive unit sphere of X with |j(y)|·y = z. Closed
/// forms per norm family (blockwise for block_pq); the defining residual is
/// verified and a failure is reported rather than returned silently.
pub fn lozanovskii_forward(space: &SpaceDescriptor, z: &SpacePoint) -> Result<SpacePoint> {
    let tol = 1e-8;
    // Positivity and unit trace norm.
    let t1 = trace_norm(z);
    if (t1 - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(format!(
            "lozanovskii_forward needs ‖z‖₁ = 1, got {t1}"
        )));
    }
    let y = match (&space.norm, &z.data) {
        (NormSpec::P { p }, PointData::Vector(v)) => {
            check_nonnegative_vec(v.as_slice())?;
            let out: Vec<f64> = v.iter().map(|t| t.max(0.0).powf(1.0 / p)).collect();
            SpacePoint::from_vec(space, out)?
        }
        (NormSpec::WeightedP { p, weights }, PointData::Vector(v)) => {
            check_nonnegative_vec(v.as_slice())?;
            let out: Vec<f64> = v
                .iter()
                .zip(weights.iter())
                .map(|(t, w)| (t.max(0.0) / w).powf(1.0 / p))
                .collect();
            SpacePoint::from_vec(space, out)?
        }
        (NormSpec::BlockPq { p, q, block_len }, PointData::Vector(v)) => {
            check_nonnegative_vec(v.as_slice())?;
            let mut out = vec![0.0; v.len()];
            for (b, chunk) in v.as_slice().chunks(*block_len).enumerate() {
                let sb: f64 = chunk.iter().map(|t| t.max(0.0)).sum();
                if sb == 0.0 {
                    continue;
                }
                let nb = sb.powf(1.0 / p);
                for (i, t) in chunk.iter().enumerate() {
                    out[b * block_len + i] = (t.max(0.0) * nb.powf(q - p)).powf(1.0 / q);
                }
            }
            SpacePoint::from_vec(space, out)?
        }
        (NormSpec::SchattenP { p }, PointData::Matrix(_)) => {
            let (eigs, _) = crate::spaces::eigen_sorted(z)?;
            if eigs.iter().any(|t| *t < -1e-10) {
                return Err(Error::Precondition(
                    "lozanovskii_forward needs a PSD matrix".into(),
                ));
            }
            matrix_function(&z.with_space(space), |t| t.max(0.0).powf(1.0 / p))?
        }
        _ => {
            return Err(Error::Shape("norm family does not match point kind".into()));
        }
    };
    // Defining residual |j(y)|y = z.
    let back = lozanovskii_inverse(space, &y.with_space(space))?;
    let resid = back.sub(&z.with_space(&back.space)).euclid_norm();
    if resid > tol {
        return Err(Error::NotConverged(format!(
            "lozanovskii_forward residual {resid:.3e} exceeds {tol:.0e}"
        )));
    }
    Ok(y)
}

fn check_nonnegative_vec(v: &[f64]) -> Result<()> {
    if v.iter().any(|t| *t < -1e-10) {
        return Err(Error::Precondition(
            "lozanovskii_forward needs a nonnegative point".into(),
        ));
    }
    Ok(())
}

/// Point of a generalized spin factor V = X ⊕ ℝ.
#[derive(Clone, Debug)]
pub struct SpinFactorPoint {
    pub x: SpacePoint,
    pub lambda: f64,
}

impl SpinFactorPoint {
    /// Order: v ≥ 0 iff λ ≥ ‖x‖_X.
    pub fn is_positive(&self) -> bool {
        self.lambda >= norm(&self.x.space, &self.x)
    }

    /// ‖v‖ = max{|λ|, ‖x‖_X}.
    pub fn v_norm(&self) -> f64 {
        self.lambda.abs().max(norm(&self.x.space, &self.x))
    }

    /// Base membership: λ = 1 and ‖x‖ ≤ 1 (equivalently v ≥ 0 with λ = 1).
    pub fn in_base(&self) -> bool {
        (self.lambda - 1.0).abs() <= 1e-12 && norm(&self.x.space, &self.x) <= 1.0 + 1e-12
    }
}

/// ℓ_{/ℝ}: (x, 1) ↦ x on the base.
pub fn spin_embed(v: &SpinFactorPoint) -> Result<SpacePoint> {
    if (v.lambda - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "spin embedding needs λ = 1, got {}",
            v.lambda
        )));
    }
    if norm(&v.x.space, &v.x) > 1.0 + 1e-12 {
        return Err(Error::Precondition("spin embedding needs ‖x‖ ≤ 1".into()));
    }
    Ok(v.x.clone())
}

/// Inverse of ℓ_{/ℝ}: re-attach λ = 1.
pub fn spin_lift(x: &SpacePoint) -> Result<SpinFactorPoint> {
    if norm(&x.space, x) > 1.0 + 1e-12 {
        return Err(Error::Precondition("spin lift needs ‖x‖ ≤ 1".into()));
    }
    Ok(SpinFactorPoint { x: x.clone(), lambda: 1.0 })
}

fn spin_point_from_vector(p: &SpacePoint, inner: &SpaceDescriptor) -> Result<SpinFactorPoint> {
    let v = p.data.as_vector();
    if v.len() != inner.n + 1 {
        return Err(Error::Shape("spin point needs n+1 coordinates".into()));
    }
    let x = SpacePoint::from_vec(inner, v.as_slice()[..inner.n].to_vec())?;
    Ok(SpinFactorPoint { x, lambda: v[inner.n] })
}

fn spin_point_to_vector(v: &SpinFactorPoint, state: &SpaceDescriptor) -> SpacePoint {
    let mut out = v.x.data.as_vector().as_slice().to_vec();
    out.push(v.lambda);
    SpacePoint::from_vec(state, out).expect("dimensions agree by construction")
}

/// Apply a CPTP map given by Kraus operators to a Hermitian point.
pub fn apply_cptp(kraus: &[nalgebra::DMatrix<num_complex::Complex64>], rho: &SpacePoint) -> Result<SpacePoint> {
    let m = rho.data.as_matrix();
    let n = m.nrows();
    let mut out = nalgebra::DMatrix::zeros(n, n);
    for k in kraus {
        out += k * m * k.adjoint();
    }
    SpacePoint::from_matrix(&rho.space, out)
}

/// Projection of a state-space set specified by its ℓ-image: apply ℓ, run
/// the left (resp. right) projection in the model space, and pull the result
/// back through ℓ⁻¹. The certificates live in the image, where D_{ℓ,Ψ}
/// equals D_Ψ identically.
pub fn pullback_project(
    ell: &Embedding,
    psi: &Potential,
    image_set: &crate::convex_sets::ConvexSet,
    side: crate::projections::Side,
    y: &SpacePoint,
    tol: f64,
) -> Result<crate::projections::ProjectionResult> {
    let image_point = ell.apply(y)?;
    let mut result = match side {
        crate::projections::Side::Left => {
            crate::projections::left_project(psi, image_set, &image_point, tol)?
        }
        crate::projections::Side::Right => {
            crate::projections::right_project(psi, image_set, &image_point, tol)?
        }
    };
    result.point = ell.inverse_apply(&result.point)?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex_sets::ConvexSet;
    use crate::divergence::{bregman, extended_bregman};
    use crate::projections::Side;
    use crate::sampling;

    fn vecp(space: &SpaceDescriptor, xs: &[f64]) -> SpacePoint {
        SpacePoint::from_vec(space, xs.to_vec()).unwrap()
    }

    #[test]
    fn mazur_examples() {
        let m = SpaceDescriptor::frobenius(2);
        // γ₁ = γ₂: identity.
        let x = SpacePoint::from_diagonal(&m, &[0.7, -0.2]).unwrap();
        assert!(mazur(0.5, 0.5, &x).unwrap().sub(&x).euclid_norm() < 1e-12);

        // diag(4,0), γ: 1 → 1/2.
        let x = SpacePoint::from_diagonal(&m, &[4.0, 0.0]).unwrap();
        let y = mazur(1.0, 0.5, &x).unwrap();
        assert!(y.sub(&SpacePoint::from_diagonal(&m, &[2.0, 0.0]).unwrap()).euclid_norm() < 1e-12);

        // [[0,1],[1,0]] has eigenvalues ±1: any power of |x| is I, so the
        // image is the sign part, i.e. x itself.
        let mut mm = nalgebra::DMatrix::zeros(2, 2);
        mm[(0, 1)] = num_complex::Complex64::new(1.0, 0.0);
        mm[(1, 0)] = num_complex::Complex64::new(1.0, 0.0);
        let x = SpacePoint::from_matrix(&m, mm).unwrap();
        assert!(mazur(1.0, 0.5, &x).unwrap().sub(&x).euclid_norm() < 1e-10);
    }

    #[test]
    fn mazur_norm_interlock_and_involution() {
        let m = SpaceDescriptor::frobenius(3);
        for i in 0..100u64 {
            let mut rng = sampling::rng_for(9100, i);
            let x = sampling::gaussian_point(&m, 1.0, &mut rng);
            let (g1, g2) = (1.0, 0.4);
            let y = mazur(g1, g2, &x).unwrap();
            let a = power_sum_of_spectrum(&y, 1.0 / g2);
            let b = power_sum_of_spectrum(&x, 1.0 / g1);
            assert!((a - b).abs() <= 1e-10 * (1.0 + b));
            let back = mazur(g2, g1, &y).unwrap();
            assert!(back.sub(&x).euclid_norm() <= 1e-9 * (1.0 + x.euclid_norm()));
        }
    }

    #[test]
    fn d_gamma_examples() {
        let m = SpaceDescriptor::frobenius(2);
        // Identity of indiscernibles.
        let mut rng = sampling::rng_for(9200, 0);
        let rho = sampling::density_matrix(&m, &mut rng);
        assert!(d_gamma(&rho, &rho, 0.5).unwrap().abs() < 1e-12);

        // Commuting diagonals at γ = ½: 2‖√p − √q‖².
        let s = SpaceDescriptor::euclidean(3);
        let p = vecp(&s, &[0.2, 0.5, 0.3]);
        let q = vecp(&s, &[0.4, 0.4, 0.2]);
        let d = d_gamma(&p, &q, 0.5).unwrap();
        let hell: f64 = (0..3)
            .map(|i| {
                (p.data.as_vector()[i].sqrt() - q.data.as_vector()[i].sqrt()).powi(2)
            })
            .sum();
        assert!((d - 2.0 * hell).abs() < 1e-12);

        // diag(1,0) vs diag(1/2,1/2) at γ = ½ → 4 − 2√2.
        let a = SpacePoint::from_diagonal(&m, &[1.0, 0.0]).unwrap();
        let b = SpacePoint::from_diagonal(&m, &[0.5, 0.5]).unwrap();
        let d = d_gamma(&a, &b, 0.5).unwrap();
        assert!((d - (4.0 - 2.0 * 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn d_gamma_matches_embedding_route() {
        let m = SpaceDescriptor::frobenius(4);
        for (gi, gamma) in [0.3, 0.5, 0.7].into_iter().enumerate() {
            for i in 0..50u64 {
                let mut rng = sampling::rng_for(9300 + gi as u64, i);
                let rho = sampling::density_matrix(&m, &mut rng);
                let sig = sampling::density_matrix(&m, &mut rng);
                let closed = d_gamma(&rho, &sig, gamma).unwrap();
                let composed = d_gamma_via_embedding(&rho, &sig, gamma).unwrap();
                assert!(
                    (closed - composed).abs() <= 1e-10 * (1.0 + closed.abs()),
                    "gamma {gamma}: {closed} vs {composed}"
                );
                assert!(closed >= -1e-12);
            }
        }
    }

    #[test]
    fn d_gamma_scale_identity() {
        // D_{λℓ_γ, Ψ_{φ_{α,β}}} = D_{ℓ_γ, Ψ_{φ_{αλ^{−1/β},β}}}.
        let s = SpaceDescriptor::euclidean(3);
        let (gamma, alpha, beta, lambda) = (0.4, 0.7, 0.3, 2.5);
        let ell_scaled = Embedding::mazur(s.clone(), 1.0, gamma, lambda).unwrap();
        let ell_plain = Embedding::mazur(s.clone(), 1.0, gamma, 1.0).unwrap();
        let model = ell_plain.output_space();
        let psi_scaled = Potential::gauge(model.clone(), Gauge::power(alpha, beta).unwrap());
        let psi_plain = Potential::gauge(
            model,
            Gauge::power(alpha * lambda.powf(-1.0 / beta), beta).unwrap(),
        );
        for i in 0..100u64 {
            let mut rng = sampling::rng_for(9400, i);
            let x = sampling::positive_point(&s, 1.0, &mut rng);
            let y = sampling::positive_point(&s, 1.0, &mut rng);
            let a = extended_bregman(&ell_scaled, &psi_scaled, &x, &y).unwrap().value;
            let b = extended_bregman(&ell_plain, &psi_plain, &x, &y).unwrap().value;
            assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn hellinger_composition() {
        // ℓ = Mazur γ=1/2 on positive vectors, Ψ = Hilbert: the literal
        // composition gives ½‖√φ − √ψ‖².
        let s = SpaceDescriptor::euclidean(3);
        let ell = Embedding::mazur_gamma(s.clone(), 0.5).unwrap();
        let psi = Potential::squared_norm(ell.output_space());
        let phi = vecp(&s, &[0.3, 0.5, 0.2]);
        let rho = vecp(&s, &[0.25, 0.25, 0.5]);
        let d = extended_bregman(&ell, &psi, &phi, &rho).unwrap().value;
        let hell: f64 = (0..3)
            .map(|i| (phi.data.as_vector()[i].sqrt() - rho.data.as_vector()[i].sqrt()).powi(2))
            .sum();
        assert!((d - 0.5 * hell).abs() < 1e-12);
        // Identity embedding reduces to the plain divergence.
        let id = Embedding::identity(ell.output_space());
        let a = vecp(&id.state_space, &[0.3, 0.1, 0.7]);
        let b = vecp(&id.state_space, &[0.2, 0.4, 0.4]);
        assert_eq!(
            extended_bregman(&id, &psi, &a, &b).unwrap().value,
            bregman(&psi, &a, &b).unwrap().value
        );
    }

    #[test]
    fn lozanovskii_examples() {
        // ℓ₂: x = (3/5, 4/5) ↦ x² = (9/25, 16/25).
        let s = SpaceDescriptor::euclidean(2);
        let x = vecp(&s, &[0.6, 0.8]);
        let z = lozanovskii_inverse(&s, &x).unwrap();
        assert!(z.sub(&vecp(&s, &[0.36, 0.64])).euclid_norm() < 1e-12);
        assert!((trace_norm(&z) - 1.0).abs() < 1e-12);

        // Positive point on the ℓ_p sphere maps to x^p.
        let sp = SpaceDescriptor::vector(3, NormSpec::p(3.0)).unwrap();
        let mut rng = sampling::rng_for(9500, 0);
        let raw = sampling::positive_point(&sp, 1.0, &mut rng);
        let xs = raw.scale(1.0 / crate::spaces::norm(&sp, &raw));
        let z = lozanovskii_inverse(&sp, &xs).unwrap();
        for i in 0..3 {
            let expect = xs.data.as_vector()[i].powf(3.0);
            assert!((z.data.as_vector()[i] - expect).abs() < 1e-10);
        }
        // Forward inverts it.
        let back = lozanovskii_forward(&sp, &z).unwrap();
        assert!(back.sub(&xs.with_space(&back.space)).euclid_norm() < 1e-9);
    }

    #[test]
    fn lozanovskii_round_trips_all_families() {
        let spaces = vec![
            SpaceDescriptor::vector(4, NormSpec::p(2.5)).unwrap(),
            SpaceDescriptor::vector(4, NormSpec::WeightedP {
                p: 3.0,
                weights: vec![0.5, 1.0, 2.0, 1.5],
            })
            .unwrap(),
            SpaceDescriptor::vector(4, NormSpec::BlockPq { p: 3.0, q: 1.5, block_len: 2 })
                .unwrap(),
            SpaceDescriptor::hermitian(3, NormSpec::schatten(2.5)).unwrap(),
        ];
        for (si, sp) in spaces.iter().enumerate() {
            for i in 0..50u64 {
                let mut rng = sampling::rng_for(9600 + si as u64, i);
                let raw = sampling::positive_point(sp, 1.0, &mut rng);
                let x = raw.scale(1.0 / crate::spaces::norm(sp, &raw));
                let z = lozanovskii_inverse(sp, &x).unwrap();
                assert!((trace_norm(&z) - 1.0).abs() < 1e-9, "family {si}");
                let back = lozanovskii_forward(sp, &z).unwrap();
                assert!(
                    back.sub(&x.with_space(&back.space)).euclid_norm() <= 1e-8,
                    "family {si}"
                );
                // Vertex fixed point.
            }
        }
        // z = eᵢ is a fixed point of the forward map.
        let sp = SpaceDescriptor::vector(3, NormSpec::p(2.0)).unwrap();
        let e1 = vecp(&sp, &[1.0, 0.0, 0.0]);
        let y = lozanovskii_forward(&sp, &e1).unwrap();
        assert!(y.sub(&e1).euclid_norm() < 1e-12);
    }

    #[test]
    fn spin_factor_examples() {
        let inner = SpaceDescriptor::euclidean(2);
        let base_center = SpinFactorPoint { x: SpacePoint::zeros(&inner), lambda: 1.0 };
        assert!(base_center.is_positive());
        assert!((base_center.v_norm() - 1.0).abs() < 1e-15);
        assert!(spin_embed(&base_center).unwrap().euclid_norm() == 0.0);

        let extreme = SpinFactorPoint { x: vecp(&inner, &[1.0, 0.0]), lambda: 1.0 };
        assert!(extreme.in_base());
        assert!((crate::spaces::norm(&inner, &spin_embed(&extreme).unwrap()) - 1.0).abs() < 1e-12);

        // ℓ_{/ℝ} is affine on the base: convex combinations map to convex
        // combinations.
        let a = SpinFactorPoint { x: vecp(&inner, &[0.5, 0.2]), lambda: 1.0 };
        let b = SpinFactorPoint { x: vecp(&inner, &[-0.3, 0.4]), lambda: 1.0 };
        let t = 0.3;
        let mix = SpinFactorPoint {
            x: a.x.scale(t).add(&b.x.scale(1.0 - t)),
            lambda: 1.0,
        };
        let lhs = spin_embed(&mix).unwrap();
        let rhs = spin_embed(&a).unwrap().scale(t).add(&spin_embed(&b).unwrap().scale(1.0 - t));
        assert!(lhs.sub(&rhs).euclid_norm() < 1e-15);

        // λ ≠ 1 is rejected.
        let off = SpinFactorPoint { x: vecp(&inner, &[0.0, 0.0]), lambda: 0.5 };
        assert!(spin_embed(&off).is_err());
        // Order and norm invariants.
        let neg = SpinFactorPoint { x: vecp(&inner, &[2.0, 0.0]), lambda: 1.0 };
        assert!(!neg.is_positive());
        assert!((neg.v_norm() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn spin_embedding_round_trip() {
        let inner = SpaceDescriptor::vector(2, NormSpec::p(3.0)).unwrap();
        let ell = Embedding::spin_factor(inner.clone()).unwrap();
        let v = vecp(&ell.state_space, &[0.3, -0.4, 1.0]);
        let x = ell.apply(&v).unwrap();
        assert!((x.data.as_vector()[0] - 0.3).abs() < 1e-15);
        let back = ell.inverse_apply(&x).unwrap();
        assert!(back.sub(&v).euclid_norm() < 1e-15);
    }

    #[test]
    fn pullback_projection_mazur_hyperplane() {
        // Densities whose square roots satisfy a linear constraint: pull the
        // image hyperplane projection back and compare with brute force over
        // the primal curve.
        let s = SpaceDescriptor::euclidean(2);
        let ell = Embedding::mazur_gamma(s.clone(), 0.5).unwrap();
        let model = ell.output_space();
        let psi = Potential::squared_norm(model.clone());
        let a = vecp(&model.dual(), &[1.0, 2.0]);
        let k = ConvexSet::hyperplane(a, 1.0).unwrap();
        let y = vecp(&s, &[0.9, 0.4]);
        let r = pullback_project(&ell, &psi, &k, Side::Left, &y, 1e-11).unwrap();
        assert!(r.converged);
        // Brute force over the curve {x ≥ 0 : √x₁ + 2√x₂ = 1} parametrized
        // by u = √x₁ ∈ [0, 1].
        let mut best = (f64::INFINITY, r.point.clone());
        for i in 0..=200_000 {
            let u = i as f64 / 200_000.0;
            let v = (1.0 - u) / 2.0;
            let cand = vecp(&s, &[u * u, v * v]);
            let d = extended_bregman(&ell, &psi, &cand, &y).unwrap().value;
            if d < best.0 {
                best = (d, cand);
            }
        }
        assert!(r.point.sub(&best.1).euclid_norm() < 1e-4, "{:?} vs {:?}", r.point, best.1);
    }

    #[test]
    fn pullback_projection_density_trace_slice() {
        // Mazur on 2×2 densities with the image constrained to the Schatten
        // trace slice: certificates transfer through ℓ.
        let m = SpaceDescriptor::frobenius(2);
        let gamma = 0.5;
        let ell = Embedding::mazur_gamma(m.clone(), gamma).unwrap();
        let model = ell.output_space();
        let psi = Potential::gauge(
            model.clone(),
            Gauge::power(gamma * (1.0 - gamma), gamma).unwrap(),
        );
        let k = ConvexSet::psd_trace_slice(model.clone(), 1.0).unwrap();
        let mut rng = sampling::rng_for(9700, 3);
        let y = sampling::density_matrix(&m, &mut rng).scale(1.4);
        let r = pullback_project(&ell, &psi, &k, Side::Left, &y, 1e-8).unwrap();
        assert!(r.converged, "{r:?}");
        assert!(r.variational_residual <= 1e-6, "{r:?}");
        // The pulled-back point's image sits on the slice.
        let img = ell.apply(&r.point).unwrap();
        assert!(k.contains(&img, 1e-6).unwrap());
    }

    #[test]
    fn cptp_monotonicity_of_d_gamma() {
        let m = SpaceDescriptor::frobenius(2);
        for i in 0..100u64 {
            let mut rng = sampling::rng_for(9800, i);
            let rho = sampling::density_matrix(&m, &mut rng);
            let sig = sampling::density_matrix(&m, &mut rng);
            let kraus = sampling::random_kraus_ops(2, 3, &mut rng);
            let rho2 = apply_cptp(&kraus, &rho).unwrap();
            let sig2 = apply_cptp(&kraus, &sig).unwrap();
            for gamma in [0.3, 0.5, 0.8] {
                let before = d_gamma(&rho, &sig, gamma).unwrap();
                let after = d_gamma(&rho2, &sig2, gamma).unwrap();
                assert!(
                    after <= before + 1e-9,
                    "gamma {gamma}: {after} > {before}"
                );
            }
        }
    }

    #[test]
    fn mazur_holder_slope_on_unit_ball() {
        // Empirical log-log slope of ‖ℓ(x) − ℓ(y)‖ vs ‖x − y‖₁ stays ≥ γ − 0.05.
        let s = SpaceDescriptor::euclidean(4);
        let gamma = 0.5;
        let ell = Embedding::mazur_gamma(s.clone(), gamma).unwrap();
        let mut pts = Vec::new();
        for i in 0..400u64 {
            let mut rng = sampling::rng_for(9900, i);
            let x = sampling::gaussian_point(&s, 0.3, &mut rng);
            let scale = 10f64.powf(-1.0 - 4.0 * (i % 5) as f64 / 4.0);
            let y = x.add(&sampling::gaussian_point(&s, scale, &mut rng));
            if trace_norm(&x) > 1.0 || trace_norm(&y) > 1.0 {
                continue;
            }
            let dx = trace_norm(&x.sub(&y));
            let dy = crate::spaces::norm(
                &ell.output_space(),
                &ell.apply(&x).unwrap().sub(&ell.apply(&y).unwrap()),
            );
            if dx > 0.0 && dy > 0.0 {
                pts.push((dx.ln(), dy.ln()));
            }
        }
        let slope = crate::metrology::fit_slope(&pts);
        assert!(slope >= gamma - 0.05, "slope {slope}");
    }
}
