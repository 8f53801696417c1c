//! The catalog of proper convex Euler–Legendre potentials behind one uniform
//! evaluation interface: separable vector potentials (KL, Burg, Fermi–Dirac,
//! α-family, power sums), their spectral lifts to Hermitian matrices, gauge
//! potentials, squared norms, and quadratic forms.
//!
//! Every potential knows its value, gradient, conjugate, conjugate gradient,
//! and the action of its Hessian (used by the Newton solvers); domain
//! membership is encoded in the returned values (+∞ outside the effective
//! domain, gradient absent outside the interior), never by panicking.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gauges::Gauge;
use crate::spaces::{
    eigen_sorted, matrix_from_eigen, norm, normalized_duality_map, NormSpec, PointData,
    SpaceDescriptor, SpaceKind, SpacePoint,
};

/// Value, gradient, and interiority of a potential at a point. The gradient
/// is present exactly when the point lies in the interior of the effective
/// domain.
#[derive(Clone, Debug)]
pub struct PotentialEval {
    pub value: f64,
    pub gradient: Option<SpacePoint>,
    pub in_interior: bool,
}

/// Separable scalar building blocks ψ with Ψ(x) = Σ ψ(xᵢ).
#[derive(Clone, Debug, PartialEq)]
enum Separable {
    /// t log t − t on t ≥ 0 (0 log 0 = 0); conjugate exp.
    Kl,
    /// −log t on t > 0; conjugate −log(−s) − 1 on s < 0.
    Burg,
    /// t log t + (1−t) log(1−t) on [0,1]; conjugate log(1 + eˢ).
    FermiDirac,
    /// (tᵅ − 1)/(α−1) on t ≥ 0 for α ∈ (0,1);
    /// (tᵅ − 1)/(1−α) on t > 0 for α < 0.
    Alpha { alpha: f64 },
    /// γ|t|^{1/γ} on ℝ for γ ∈ (0,1); conjugate (1−γ)|s|^{1/(1−γ)}.
    PowerSum { gamma: f64 },
}

impl Separable {
    fn value(&self, t: f64) -> f64 {
        match self {
            Separable::Kl => {
                if t < 0.0 {
                    f64::INFINITY
                } else if t == 0.0 {
                    0.0
                } else {
                    t * t.ln() - t
                }
            }
            Separable::Burg => {
                if t <= 0.0 {
                    f64::INFINITY
                } else {
                    -t.ln()
                }
            }
            Separable::FermiDirac => {
                if !(0.0..=1.0).contains(&t) {
                    f64::INFINITY
                } else {
                    let a = if t == 0.0 { 0.0 } else { t * t.ln() };
                    let b = if t == 1.0 { 0.0 } else { (1.0 - t) * (1.0 - t).ln() };
                    a + b
                }
            }
            Separable::Alpha { alpha } => {
                if *alpha > 0.0 {
                    if t < 0.0 {
                        f64::INFINITY
                    } else {
                        (t.powf(*alpha) - 1.0) / (alpha - 1.0)
                    }
                } else if t <= 0.0 {
                    f64::INFINITY
                } else {
                    (t.powf(*alpha) - 1.0) / (1.0 - alpha)
                }
            }
            Separable::PowerSum { gamma } => gamma * t.abs().powf(1.0 / gamma),
        }
    }

    fn in_interior(&self, t: f64) -> bool {
        match self {
            Separable::Kl | Separable::Burg => t > 0.0,
            Separable::FermiDirac => t > 0.0 && t < 1.0,
            Separable::Alpha { .. } => t > 0.0,
            Separable::PowerSum { .. } => true,
        }
    }

    fn d1(&self, t: f64) -> f64 {
        match self {
            Separable::Kl => t.ln(),
            Separable::Burg => -1.0 / t,
            Separable::FermiDirac => (t / (1.0 - t)).ln(),
            Separable::Alpha { alpha } => {
                if *alpha > 0.0 {
                    alpha / (alpha - 1.0) * t.powf(alpha - 1.0)
                } else {
                    alpha / (1.0 - alpha) * t.powf(alpha - 1.0)
                }
            }
            Separable::PowerSum { gamma } => {
                if t == 0.0 {
                    0.0
                } else {
                    t.signum() * t.abs().powf(1.0 / gamma - 1.0)
                }
            }
        }
    }

    fn d2(&self, t: f64) -> f64 {
        match self {
            Separable::Kl => 1.0 / t,
            Separable::Burg => 1.0 / (t * t),
            Separable::FermiDirac => 1.0 / t + 1.0 / (1.0 - t),
            Separable::Alpha { alpha } => {
                if *alpha > 0.0 {
                    alpha * t.powf(alpha - 2.0)
                } else {
                    -alpha * t.powf(alpha - 2.0)
                }
            }
            Separable::PowerSum { gamma } => {
                let e = 1.0 / gamma - 2.0;
                if t == 0.0 {
                    if e > 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    (1.0 / gamma - 1.0) * t.abs().powf(e)
                }
            }
        }
    }

    fn conj_value(&self, s: f64) -> f64 {
        match self {
            Separable::Kl => s.exp(),
            Separable::Burg => {
                if s >= 0.0 {
                    f64::INFINITY
                } else {
                    -(-s).ln() - 1.0
                }
            }
            Separable::FermiDirac => s.max(0.0) + (-s.abs()).exp().ln_1p(),
            Separable::Alpha { alpha } => {
                if *alpha > 0.0 {
                    if s >= 0.0 {
                        f64::INFINITY
                    } else {
                        (s * (alpha - 1.0) / alpha).powf(alpha / (alpha - 1.0))
                            + 1.0 / (alpha - 1.0)
                    }
                } else if s > 0.0 {
                    f64::INFINITY
                } else if s == 0.0 {
                    1.0 / (1.0 - alpha)
                } else {
                    -((1.0 - alpha) * s / alpha).powf(alpha / (alpha - 1.0)) + 1.0 / (1.0 - alpha)
                }
            }
            Separable::PowerSum { gamma } => (1.0 - gamma) * s.abs().powf(1.0 / (1.0 - gamma)),
        }
    }

    fn conj_in_interior(&self, s: f64) -> bool {
        match self {
            Separable::Kl | Separable::FermiDirac | Separable::PowerSum { .. } => true,
            Separable::Burg | Separable::Alpha { .. } => s < 0.0,
        }
    }

    fn conj_d1(&self, s: f64) -> f64 {
        match self {
            Separable::Kl => s.exp(),
            Separable::Burg => -1.0 / s,
            Separable::FermiDirac => 1.0 / (1.0 + (-s).exp()),
            Separable::Alpha { alpha } => {
                if *alpha > 0.0 {
                    (s * (alpha - 1.0) / alpha).powf(1.0 / (alpha - 1.0))
                } else {
                    ((1.0 - alpha) * s / alpha).powf(1.0 / (alpha - 1.0))
                }
            }
            Separable::PowerSum { gamma } => {
                if s == 0.0 {
                    0.0
                } else {
                    s.signum() * s.abs().powf(gamma / (1.0 - gamma))
                }
            }
        }
    }

    fn conj_d2(&self, s: f64) -> f64 {
        match self {
            Separable::Kl => s.exp(),
            Separable::Burg => 1.0 / (s * s),
            Separable::FermiDirac => {
                let sig = 1.0 / (1.0 + (-s).exp());
                sig * (1.0 - sig)
            }
            Separable::Alpha { alpha } => {
                if *alpha > 0.0 {
                    let u = s * (alpha - 1.0) / alpha;
                    u.powf((2.0 - alpha) / (alpha - 1.0)) / alpha.abs() * (1.0 - alpha).signum()
                } else {
                    let u = (1.0 - alpha) * s / alpha;
                    -u.powf((2.0 - alpha) / (alpha - 1.0)) / alpha
                }
            }
            Separable::PowerSum { gamma } => {
                let e = gamma / (1.0 - gamma) - 1.0;
                if s == 0.0 {
                    if e > 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    gamma / (1.0 - gamma) * s.abs().powf(e)
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
enum Kind {
    /// Ψ_φ(x) = ∫₀^{‖x‖} φ for a gauge φ.
    Gauge(Gauge),
    /// Σ ψ(xᵢ) for a separable scalar ψ (vector spaces only; matrices get a
    /// spectral lift wrapping the vector version).
    Separable(Separable),
    /// ½‖x‖²_X in the space's own norm.
    SquaredNorm,
    /// ½⟨Sx, x⟩ for symmetric positive definite S (vector spaces).
    Quadratic { s: DMatrix<f64>, s_inv: DMatrix<f64> },
    /// f∘λ for a permutation-symmetric vector potential f.
    SpectralLift { inner: Box<Potential> },
    /// Formal conjugate: eval and conjugate_eval swapped.
    Conjugate { inner: Box<Potential> },
    /// Σ λᵢΨᵢ + ⟨a,·⟩ + c. Supports eval only (no closed conjugate).
    ScaledSum { terms: Vec<(f64, Potential)>, affine: Option<(SpacePoint, f64)> },
}

/// A proper convex potential on a model space.
#[derive(Clone, Debug)]
pub struct Potential {
    pub space: SpaceDescriptor,
    kind: Kind,
}

impl Potential {
    pub fn gauge(space: SpaceDescriptor, gauge: Gauge) -> Potential {
        Potential { space, kind: Kind::Gauge(gauge) }
    }

    /// ½‖x‖² in the space's norm (the Hilbert potential when p = 2).
    pub fn squared_norm(space: SpaceDescriptor) -> Potential {
        Potential { space, kind: Kind::SquaredNorm }
    }

    /// The Hilbert potential ½‖x‖₂² on ℝⁿ.
    pub fn hilbert(n: usize) -> Potential {
        Potential::squared_norm(SpaceDescriptor::euclidean(n))
    }

    pub fn kl(space: SpaceDescriptor) -> Potential {
        Potential::separable(space, Separable::Kl)
    }

    pub fn burg(space: SpaceDescriptor) -> Potential {
        Potential::separable(space, Separable::Burg)
    }

    pub fn fermi_dirac(space: SpaceDescriptor) -> Potential {
        Potential::separable(space, Separable::FermiDirac)
    }

    pub fn alpha_family(space: SpaceDescriptor, alpha: f64) -> Result<Potential> {
        if !alpha.is_finite() || alpha >= 1.0 || alpha == 0.0 {
            return Err(Error::Validation(format!(
                "alpha family needs alpha in (0,1) or alpha < 0, got {alpha}"
            )));
        }
        Ok(Potential::separable(space, Separable::Alpha { alpha }))
    }

    pub fn power_sum(space: SpaceDescriptor, gamma: f64) -> Result<Potential> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::Validation(format!(
                "power sum needs gamma in (0,1), got {gamma}"
            )));
        }
        Ok(Potential::separable(space, Separable::PowerSum { gamma }))
    }

    fn separable(space: SpaceDescriptor, sep: Separable) -> Potential {
        match space.kind {
            SpaceKind::Vector => Potential { space, kind: Kind::Separable(sep) },
            SpaceKind::HermitianMatrix => {
                let inner = Potential {
                    space: SpaceDescriptor::euclidean(space.n),
                    kind: Kind::Separable(sep),
                };
                Potential { space, kind: Kind::SpectralLift { inner: Box::new(inner) } }
            }
        }
    }

    /// ½⟨Tx, x⟩. Accepts T whose symmetric part is positive definite with
    /// smallest eigenvalue ≥ 1e-8; the symmetric part is what defines the
    /// potential.
    pub fn quadratic(space: SpaceDescriptor, t: DMatrix<f64>) -> Result<Potential> {
        if space.kind != SpaceKind::Vector {
            return Err(Error::Unsupported("quadratic potentials act on vector spaces".into()));
        }
        if t.nrows() != space.n || t.ncols() != space.n {
            return Err(Error::Shape(format!(
                "quadratic operator must be {0}x{0}",
                space.n
            )));
        }
        let s = (&t + t.transpose()) * 0.5;
        let eig = s.clone().symmetric_eigen();
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min >= 1e-8) {
            return Err(Error::Validation(format!(
                "quadratic operator needs a positive definite symmetric part (min eigenvalue {min:.3e})"
            )));
        }
        let mut inv_vals = eig.eigenvalues.clone();
        inv_vals.iter_mut().for_each(|v| *v = 1.0 / *v);
        let s_inv = &eig.eigenvectors * DMatrix::from_diagonal(&inv_vals) * eig.eigenvectors.transpose();
        Ok(Potential { space, kind: Kind::Quadratic { s, s_inv } })
    }

    /// Lift a permutation-symmetric vector potential to Hermitian matrices as
    /// f∘λ. Symmetry is spot-checked on random permutations.
    pub fn spectral_lift(space: SpaceDescriptor, inner: Potential) -> Result<Potential> {
        if space.kind != SpaceKind::HermitianMatrix {
            return Err(Error::Unsupported("spectral lifts produce matrix potentials".into()));
        }
        if inner.space.kind != SpaceKind::Vector || inner.space.n != space.n {
            return Err(Error::Shape(format!(
                "inner potential must act on vectors of length {}",
                space.n
            )));
        }
        // Permutation-symmetry spot check.
        let mut rng = crate::sampling::rng_for(0x5ec7, 0);
        for _ in 0..8 {
            let x = crate::sampling::positive_point(&inner.space, 1.0, &mut rng);
            let v = x.data.as_vector().clone();
            let mut perm: Vec<usize> = (0..v.len()).collect();
            for i in (1..perm.len()).rev() {
                let j = rand::Rng::random_range(&mut rng, 0..=i);
                perm.swap(i, j);
            }
            let permuted: Vec<f64> = perm.iter().map(|&i| v[i]).collect();
            let xp = SpacePoint::from_vec(&inner.space, permuted)?;
            let a = inner.eval(&x)?.value;
            let b = inner.eval(&xp)?.value;
            if (a - b).abs() > 1e-10 * (1.0 + a.abs()) {
                return Err(Error::Validation(
                    "spectral lift requires a permutation-symmetric inner potential".into(),
                ));
            }
        }
        Ok(Potential { space, kind: Kind::SpectralLift { inner: Box::new(inner) } })
    }

    /// Formal conjugate potential Ψ*: evaluating it evaluates the conjugate
    /// data of Ψ; its conjugate is Ψ again.
    pub fn conjugate_potential(&self) -> Potential {
        match &self.kind {
            Kind::Conjugate { inner } => (**inner).clone(),
            _ => Potential {
                space: self.space.dual(),
                kind: Kind::Conjugate { inner: Box::new(self.clone()) },
            },
        }
    }

    /// Weighted sum Σ λᵢΨᵢ plus an affine term ⟨a,·⟩ + c: supports values,
    /// gradients, and Hessians, but has no closed conjugate.
    pub fn scaled_sum(
        terms: Vec<(f64, Potential)>,
        affine: Option<(SpacePoint, f64)>,
    ) -> Result<Potential> {
        let space = terms
            .first()
            .map(|(_, p)| p.space.clone())
            .ok_or_else(|| Error::Validation("scaled sum needs at least one term".into()))?;
        for (lam, p) in &terms {
            if *lam < 0.0 {
                return Err(Error::Validation("scaled sum weights must be nonnegative".into()));
            }
            if !p.space.same_coordinates(&space) {
                return Err(Error::Shape("scaled sum terms live on different spaces".into()));
            }
        }
        Ok(Potential { space, kind: Kind::ScaledSum { terms, affine } })
    }

    /// True when ∇Ψ is the identity on coordinates (the Hilbert cases);
    /// projections collapse to Euclidean ones then.
    pub fn is_identity_gradient(&self) -> bool {
        let norm_is_euclidean = matches!(
            (&self.space.norm, self.space.kind),
            (NormSpec::P { p }, SpaceKind::Vector) if (*p - 2.0).abs() < 1e-12
        ) || matches!(
            (&self.space.norm, self.space.kind),
            (NormSpec::SchattenP { p }, SpaceKind::HermitianMatrix) if (*p - 2.0).abs() < 1e-12
        );
        match &self.kind {
            Kind::SquaredNorm => norm_is_euclidean,
            Kind::Gauge(Gauge::Power { alpha, beta }) => {
                norm_is_euclidean && (*alpha - 1.0).abs() < 1e-12 && (*beta - 0.5).abs() < 1e-12
            }
            Kind::Separable(Separable::PowerSum { gamma }) => (*gamma - 0.5).abs() < 1e-12,
            Kind::Quadratic { s, .. } => {
                let n = s.nrows();
                (s - DMatrix::<f64>::identity(n, n)).norm() < 1e-12
            }
            Kind::SpectralLift { inner } => inner.is_identity_gradient(),
            Kind::Conjugate { inner } => inner.is_identity_gradient(),
            _ => false,
        }
    }

    /// Whether the potential is a separable sum Σψ(xᵢ) over vector
    /// coordinates.
    pub fn is_separable(&self) -> bool {
        matches!(self.kind, Kind::Separable(_))
    }

    /// Whether the potential is a gauge potential Ψ_φ (the squared norm is
    /// Ψ_{φ_{1,1/2}}).
    pub fn is_gauge(&self) -> bool {
        matches!(self.kind, Kind::Gauge(_) | Kind::SquaredNorm)
    }

    /// Whether the domain interior is exactly the (strictly) positive
    /// orthant / definite cone, so positivity constraints never bind.
    pub fn positive_domain(&self) -> bool {
        match &self.kind {
            Kind::Separable(sep) => {
                matches!(sep, Separable::Kl | Separable::Burg | Separable::Alpha { .. })
            }
            Kind::SpectralLift { inner } => inner.positive_domain(),
            _ => false,
        }
    }

    /// Whether the effective domain is the whole space.
    pub fn full_domain(&self) -> bool {
        match &self.kind {
            Kind::Gauge(_) | Kind::SquaredNorm | Kind::Quadratic { .. } => true,
            Kind::Separable(sep) => matches!(sep, Separable::PowerSum { .. }),
            Kind::SpectralLift { inner } => inner.full_domain(),
            Kind::Conjugate { inner } => match &inner.kind {
                Kind::Separable(sep) => matches!(
                    sep,
                    Separable::Kl | Separable::FermiDirac | Separable::PowerSum { .. }
                ),
                Kind::SpectralLift { inner } => Potential::full_domain(&Potential {
                    space: inner.space.clone(),
                    kind: Kind::Conjugate { inner: inner.clone() },
                }),
                _ => inner.full_domain(),
            },
            Kind::ScaledSum { terms, .. } => terms.iter().all(|(_, p)| p.full_domain()),
        }
    }

    fn check_point(&self, x: &SpacePoint) -> Result<()> {
        if !x.space.same_coordinates(&self.space) {
            return Err(Error::Shape("point does not live on the potential's space".into()));
        }
        if !x.data.is_finite() {
            return Err(Error::Validation("point data contains NaN or infinity".into()));
        }
        Ok(())
    }

    /// Value, gradient, and interiority at x.
    pub fn eval(&self, x: &SpacePoint) -> Result<PotentialEval> {
        self.check_point(x)?;
        Ok(match &self.kind {
            Kind::Gauge(g) => {
                let gp = crate::gauges::GaugePotential::new(self.space.clone(), g.clone());
                let value = crate::gauges::psi_phi_value(&gp, x);
                let gradient = crate::gauges::duality_map(&gp, x)?;
                PotentialEval { value, gradient: Some(gradient), in_interior: true }
            }
            Kind::Separable(sep) => {
                let v = x.data.as_vector();
                let value: f64 = v.iter().map(|t| sep.value(*t)).sum();
                let interior = v.iter().all(|t| sep.in_interior(*t));
                let gradient = if interior && value.is_finite() {
                    Some(SpacePoint {
                        space: self.space.dual(),
                        data: PointData::Vector(DVector::from_iterator(
                            v.len(),
                            v.iter().map(|t| sep.d1(*t)),
                        )),
                    })
                } else {
                    None
                };
                PotentialEval { value, gradient, in_interior: interior && value.is_finite() }
            }
            Kind::SquaredNorm => {
                let r = norm(&self.space, x);
                PotentialEval {
                    value: 0.5 * r * r,
                    gradient: Some(normalized_duality_map(&self.space, x)),
                    in_interior: true,
                }
            }
            Kind::Quadratic { s, .. } => {
                let v = x.data.as_vector();
                let sv = s * v;
                PotentialEval {
                    value: 0.5 * v.dot(&sv),
                    gradient: Some(SpacePoint {
                        space: self.space.dual(),
                        data: PointData::Vector(sv),
                    }),
                    in_interior: true,
                }
            }
            Kind::SpectralLift { inner } => {
                let (eigs, basis) = eigen_sorted(x)?;
                let lam = SpacePoint {
                    space: inner.space.clone(),
                    data: PointData::Vector(eigs.clone()),
                };
                let ev = inner.eval(&lam)?;
                let gradient = ev.gradient.as_ref().map(|g| SpacePoint {
                    space: self.space.dual(),
                    data: PointData::Matrix(matrix_from_eigen(&basis, g.data.as_vector().as_slice())),
                });
                PotentialEval { value: ev.value, gradient, in_interior: ev.in_interior }
            }
            Kind::Conjugate { inner } => {
                let mut ev = inner.conjugate_eval(x)?;
                if let Some(g) = &mut ev.gradient {
                    *g = g.with_space(&self.space.dual());
                }
                ev
            }
            Kind::ScaledSum { terms, affine } => {
                let mut value = 0.0f64;
                let mut gradient = SpacePoint::zeros(&self.space.dual());
                let mut interior = true;
                for (lam, p) in terms {
                    let ev = p.eval(x)?;
                    value += lam * ev.value;
                    interior &= ev.in_interior;
                    match ev.gradient {
                        Some(g) if interior => gradient.axpy(*lam, &g),
                        _ => interior = false,
                    }
                }
                if let Some((a, c)) = affine {
                    value += crate::spaces::pairing(x, a)? + c;
                    gradient.axpy(1.0, &a.with_space(&gradient.space.clone()));
                }
                PotentialEval {
                    value,
                    gradient: if interior && value.is_finite() { Some(gradient) } else { None },
                    in_interior: interior && value.is_finite(),
                }
            }
        })
    }

    /// Value, gradient, and interiority of the conjugate Ψ* at a dual point.
    pub fn conjugate_eval(&self, y: &SpacePoint) -> Result<PotentialEval> {
        self.check_point(y)?;
        Ok(match &self.kind {
            Kind::Gauge(g) => {
                let dual_space = self.space.dual();
                let gp = crate::gauges::GaugePotential::new(dual_space, g.inverse());
                let value = crate::gauges::psi_phi_value(&gp, &y.with_space(&gp.space));
                let gradient = crate::gauges::duality_map(&gp, &y.with_space(&gp.space))?;
                PotentialEval {
                    value,
                    gradient: Some(gradient.with_space(&self.space)),
                    in_interior: true,
                }
            }
            Kind::Separable(sep) => {
                let v = y.data.as_vector();
                let value: f64 = v.iter().map(|t| sep.conj_value(*t)).sum();
                let interior = v.iter().all(|t| sep.conj_in_interior(*t));
                let gradient = if interior && value.is_finite() {
                    Some(SpacePoint {
                        space: self.space.clone(),
                        data: PointData::Vector(DVector::from_iterator(
                            v.len(),
                            v.iter().map(|t| sep.conj_d1(*t)),
                        )),
                    })
                } else {
                    None
                };
                PotentialEval { value, gradient, in_interior: interior && value.is_finite() }
            }
            Kind::SquaredNorm => {
                let dual_space = self.space.dual();
                let r = norm(&dual_space, y);
                PotentialEval {
                    value: 0.5 * r * r,
                    gradient: Some(
                        normalized_duality_map(&dual_space, &y.with_space(&dual_space))
                            .with_space(&self.space),
                    ),
                    in_interior: true,
                }
            }
            Kind::Quadratic { s_inv, .. } => {
                let v = y.data.as_vector();
                let siv = s_inv * v;
                PotentialEval {
                    value: 0.5 * v.dot(&siv),
                    gradient: Some(SpacePoint {
                        space: self.space.clone(),
                        data: PointData::Vector(siv),
                    }),
                    in_interior: true,
                }
            }
            Kind::SpectralLift { inner } => {
                let (eigs, basis) = eigen_sorted(y)?;
                let lam = SpacePoint {
                    space: inner.space.clone(),
                    data: PointData::Vector(eigs.clone()),
                };
                let ev = inner.conjugate_eval(&lam)?;
                let gradient = ev.gradient.as_ref().map(|g| SpacePoint {
                    space: self.space.clone(),
                    data: PointData::Matrix(matrix_from_eigen(&basis, g.data.as_vector().as_slice())),
                });
                PotentialEval { value: ev.value, gradient, in_interior: ev.in_interior }
            }
            Kind::Conjugate { inner } => {
                let mut ev = inner.eval(y)?;
                if let Some(g) = &mut ev.gradient {
                    *g = g.with_space(&self.space);
                }
                ev
            }
            Kind::ScaledSum { .. } => {
                return Err(Error::Unsupported(
                    "scaled sums have no closed-form conjugate".into(),
                ))
            }
        })
    }

    /// Gradient at an interior point, as an error otherwise.
    pub fn grad(&self, x: &SpacePoint) -> Result<SpacePoint> {
        self.eval(x)?.gradient.ok_or_else(|| {
            Error::Domain("gradient requested outside the domain interior".into())
        })
    }

    /// Gradient of the conjugate (the inverse of ∇Ψ for Euler–Legendre Ψ).
    pub fn conj_grad(&self, y: &SpacePoint) -> Result<SpacePoint> {
        self.conjugate_eval(y)?.gradient.ok_or_else(|| {
            Error::Domain("conjugate gradient requested outside the conjugate interior".into())
        })
    }

    pub fn in_interior(&self, x: &SpacePoint) -> bool {
        self.eval(x).map(|e| e.in_interior).unwrap_or(false)
    }

    /// Action of ∇²Ψ(x) on a direction h (both in primal coordinates;
    /// the result is a dual-coordinate point).
    pub fn hess_apply(&self, x: &SpacePoint, h: &SpacePoint) -> Result<SpacePoint> {
        self.check_point(x)?;
        match &self.kind {
            Kind::Separable(sep) => {
                let v = x.data.as_vector();
                let hv = h.data.as_vector();
                let out = DVector::from_iterator(
                    v.len(),
                    v.iter()
                        .zip(hv.iter())
                        .map(|(t, d)| if *d == 0.0 { 0.0 } else { sep.d2(*t) * d }),
                );
                Ok(SpacePoint { space: self.space.dual(), data: PointData::Vector(out) })
            }
            Kind::Quadratic { s, .. } => Ok(SpacePoint {
                space: self.space.dual(),
                data: PointData::Vector(s * h.data.as_vector()),
            }),
            Kind::Gauge(g) => match (&self.space.norm, self.space.kind) {
                (NormSpec::P { p }, SpaceKind::Vector) => {
                    let r = norm(&self.space, x);
                    Ok(SpacePoint {
                        space: self.space.dual(),
                        data: PointData::Vector(norm_composite_hess(
                            *p,
                            r,
                            g.value(r),
                            g.derivative(r),
                            x.data.as_vector(),
                            h.data.as_vector(),
                        )),
                    })
                }
                (NormSpec::SchattenP { .. }, SpaceKind::HermitianMatrix) => {
                    self.spectral_gauge_hess(g, x, h, false)
                }
                _ => self.fd_hess_apply(x, h, false),
            },
            Kind::SquaredNorm => match (&self.space.norm, self.space.kind) {
                (NormSpec::P { p }, SpaceKind::Vector) => {
                    let r = norm(&self.space, x);
                    Ok(SpacePoint {
                        space: self.space.dual(),
                        data: PointData::Vector(norm_composite_hess(
                            *p,
                            r,
                            r,
                            1.0,
                            x.data.as_vector(),
                            h.data.as_vector(),
                        )),
                    })
                }
                (NormSpec::SchattenP { .. }, SpaceKind::HermitianMatrix) => {
                    self.spectral_gauge_hess(&Gauge::normalized(), x, h, false)
                }
                _ => self.fd_hess_apply(x, h, false),
            },
            Kind::SpectralLift { inner } => spectral_hess_apply(inner, x, h, false, &self.space),
            Kind::Conjugate { inner } => inner.conj_hess_apply(x, h),
            Kind::ScaledSum { terms, .. } => {
                let mut out = SpacePoint::zeros(&self.space.dual());
                for (lam, p) in terms {
                    let hp = p.hess_apply(x, h)?;
                    out.axpy(*lam, &hp);
                }
                Ok(out)
            }
        }
    }

    /// Action of ∇²Ψ*(y) on a dual direction h.
    pub fn conj_hess_apply(&self, y: &SpacePoint, h: &SpacePoint) -> Result<SpacePoint> {
        self.check_point(y)?;
        match &self.kind {
            Kind::Separable(sep) => {
                let v = y.data.as_vector();
                let hv = h.data.as_vector();
                let out = DVector::from_iterator(
                    v.len(),
                    v.iter().zip(hv.iter()).map(|(t, d)| sep.conj_d2(*t) * d),
                );
                Ok(SpacePoint { space: self.space.clone(), data: PointData::Vector(out) })
            }
            Kind::Quadratic { s_inv, .. } => Ok(SpacePoint {
                space: self.space.clone(),
                data: PointData::Vector(s_inv * h.data.as_vector()),
            }),
            Kind::Gauge(g) => {
                let dual = Potential::gauge(self.space.dual(), g.inverse());
                let out = dual.hess_apply(&y.with_space(&dual.space), &h.with_space(&dual.space))?;
                Ok(out.with_space(&self.space))
            }
            Kind::SquaredNorm => {
                let dual = Potential::squared_norm(self.space.dual());
                let out = dual.hess_apply(&y.with_space(&dual.space), &h.with_space(&dual.space))?;
                Ok(out.with_space(&self.space))
            }
            Kind::SpectralLift { inner } => spectral_hess_apply(inner, y, h, true, &self.space),
            Kind::Conjugate { inner } => inner.hess_apply(y, h),
            Kind::ScaledSum { .. } => Err(Error::Unsupported(
                "scaled sums have no closed-form conjugate".into(),
            )),
        }
    }

    fn spectral_gauge_hess(
        &self,
        g: &Gauge,
        x: &SpacePoint,
        h: &SpacePoint,
        conj: bool,
    ) -> Result<SpacePoint> {
        // Gauge on a Schatten-p space is the spectral lift of the same gauge
        // on the vector p-norm space.
        let p = self.space.norm.outer_p();
        let inner = Potential::gauge(
            SpaceDescriptor::vector(self.space.n, NormSpec::p(p))
                .expect("norm exponent already validated"),
            g.clone(),
        );
        spectral_hess_apply(&inner, x, h, conj, &self.space)
    }

    /// Central-difference Hessian action fallback for norms without an
    /// analytic second derivative here (weighted and block norms).
    fn fd_hess_apply(&self, x: &SpacePoint, h: &SpacePoint, conj: bool) -> Result<SpacePoint> {
        let step = 1e-6 * x.euclid_norm().max(1.0) / h.euclid_norm().max(1e-300);
        let mut xp = x.clone();
        xp.axpy(step, h);
        let mut xm = x.clone();
        xm.axpy(-step, h);
        let (gp, gm) = if conj {
            (self.conj_grad(&xp)?, self.conj_grad(&xm)?)
        } else {
            (self.grad(&xp)?, self.grad(&xm)?)
        };
        Ok(gp.sub(&gm).scale(1.0 / (2.0 * step)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use crate::spaces::pairing;

    fn vecp(space: &SpaceDescriptor, xs: &[f64]) -> SpacePoint {
        SpacePoint::from_vec(space, xs.to_vec()).unwrap()
    }

    /// Every catalog potential over a small vector space, with a sampler for
    /// interior points of its domain.
    fn vector_catalog(n: usize) -> Vec<(Potential, fn(&SpaceDescriptor, &mut rand_chacha::ChaCha8Rng) -> SpacePoint)> {
        fn gaussian(s: &SpaceDescriptor, rng: &mut rand_chacha::ChaCha8Rng) -> SpacePoint {
            sampling::gaussian_point(s, 1.0, rng)
        }
        fn positive(s: &SpaceDescriptor, rng: &mut rand_chacha::ChaCha8Rng) -> SpacePoint {
            sampling::positive_point(s, 1.0, rng)
        }
        fn unit(s: &SpaceDescriptor, rng: &mut rand_chacha::ChaCha8Rng) -> SpacePoint {
            sampling::interval_point(s, 0.0, 1.0, rng)
        }
        let e = SpaceDescriptor::euclidean(n);
        let p3 = SpaceDescriptor::vector(n, NormSpec::p(3.0)).unwrap();
        let mut t = DMatrix::identity(n, n) * 2.0;
        t[(0, 0)] = 3.0;
        vec![
            (Potential::gauge(p3.clone(), Gauge::power(1.0, 0.25).unwrap()), gaussian),
            (Potential::power_sum(e.clone(), 0.4).unwrap(), gaussian),
            (Potential::kl(e.clone()), positive),
            (Potential::burg(e.clone()), positive),
            (Potential::fermi_dirac(e.clone()), unit),
            (Potential::alpha_family(e.clone(), 0.5).unwrap(), positive),
            (Potential::alpha_family(e.clone(), -1.0).unwrap(), positive),
            (Potential::squared_norm(p3.clone()), gaussian),
            (Potential::quadratic(e.clone(), t).unwrap(), gaussian),
        ]
    }

    #[test]
    fn kl_value_example() {
        let s = SpaceDescriptor::euclidean(2);
        let psi = Potential::kl(s.clone());
        let x = vecp(&s, &[1.0, std::f64::consts::E]);
        let ev = psi.eval(&x).unwrap();
        assert!((ev.value + 1.0).abs() < 1e-12);
        assert!(ev.in_interior);
    }

    #[test]
    fn burg_domain_boundary() {
        let s = SpaceDescriptor::euclidean(2);
        let psi = Potential::burg(s.clone());
        let ev = psi.eval(&vecp(&s, &[1.0, 0.0])).unwrap();
        assert!(ev.value.is_infinite());
        assert!(ev.gradient.is_none());
        assert!(!ev.in_interior);
    }

    #[test]
    fn quadratic_example() {
        let s = SpaceDescriptor::euclidean(2);
        let psi = Potential::quadratic(s.clone(), DMatrix::identity(2, 2) * 2.0).unwrap();
        let ev = psi.eval(&vecp(&s, &[1.0, 1.0])).unwrap();
        assert!((ev.value - 2.0).abs() < 1e-14);
        let g = ev.gradient.unwrap();
        assert!((g.data.as_vector()[0] - 2.0).abs() < 1e-14);
        // Conjugate: ½⟨T⁻¹y, y⟩ = ½⟨(1,1),(2,2)⟩ = 2 at y = (2,2), matching
        // the direct sup computation Ψ*(y) = ‖y‖²/4.
        let cv = psi.conjugate_eval(&vecp(&s.dual(), &[2.0, 2.0])).unwrap();
        assert!((cv.value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn quadratic_requires_positive_definite_part() {
        let s = SpaceDescriptor::euclidean(2);
        let mut t = DMatrix::identity(2, 2);
        t[(1, 1)] = -0.5;
        assert!(Potential::quadratic(s, t).is_err());
    }

    #[test]
    fn kl_conjugate_example() {
        let s = SpaceDescriptor::euclidean(2);
        let psi = Potential::kl(s.clone());
        let cv = psi.conjugate_eval(&vecp(&s.dual(), &[0.0, 0.0])).unwrap();
        assert!((cv.value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn burg_conjugate_example() {
        let s = SpaceDescriptor::euclidean(2);
        let psi = Potential::burg(s.clone());
        let cv = psi.conjugate_eval(&vecp(&s.dual(), &[-1.0, -1.0])).unwrap();
        assert!((cv.value + 2.0).abs() < 1e-14);
        // Outside the conjugate domain the value is +∞.
        let out = psi.conjugate_eval(&vecp(&s.dual(), &[0.5, -1.0])).unwrap();
        assert!(out.value.is_infinite() && out.gradient.is_none());
    }

    #[test]
    fn spectral_examples() {
        let m = SpaceDescriptor::frobenius(2);
        let kl = Potential::kl(m.clone());
        let x = SpacePoint::from_diagonal(&m, &[1.0, std::f64::consts::E]).unwrap();
        assert!((kl.eval(&x).unwrap().value + 1.0).abs() < 1e-10);

        let burg = Potential::burg(m.clone());
        let singular = SpacePoint::from_diagonal(&m, &[1.0, 0.0]).unwrap();
        assert!(burg.eval(&singular).unwrap().value.is_infinite());

        let ps = Potential::power_sum(m.clone(), 0.5).unwrap();
        let mut mm = DMatrix::zeros(2, 2);
        mm[(0, 0)] = Complex64::new(2.0, 0.0);
        mm[(1, 1)] = Complex64::new(2.0, 0.0);
        mm[(0, 1)] = Complex64::new(1.0, 0.0);
        mm[(1, 0)] = Complex64::new(1.0, 0.0);
        let y = SpacePoint::from_matrix(&m, mm).unwrap();
        assert!((ps.eval(&y).unwrap().value - 5.0).abs() < 1e-10);
    }

    #[test]
    fn spectral_lift_rejects_asymmetric_inner() {
        let m = SpaceDescriptor::frobenius(2);
        let e = SpaceDescriptor::euclidean(2);
        let mut t = DMatrix::identity(2, 2);
        t[(0, 0)] = 5.0;
        let asym = Potential::quadratic(e, t).unwrap();
        assert!(Potential::spectral_lift(m, asym).is_err());
    }

    #[test]
    fn gradients_match_finite_differences() {
        for (pi, (psi, sample)) in vector_catalog(3).into_iter().enumerate() {
            for i in 0..200u64 {
                let mut rng = sampling::rng_for(900 + pi as u64, i);
                let x = sample(&psi.space, &mut rng);
                let ev = psi.eval(&x).unwrap();
                let g = match ev.gradient {
                    Some(g) => g,
                    None => continue,
                };
                let scale = g.euclid_norm().max(1.0);
                let h = 1e-5 * x.euclid_norm().max(1.0);
                for k in 0..3 {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    if let PointData::Vector(v) = &mut xp.data {
                        v[k] += h;
                    }
                    if let PointData::Vector(v) = &mut xm.data {
                        v[k] -= h;
                    }
                    let (fp, fm) = (psi.eval(&xp).unwrap().value, psi.eval(&xm).unwrap().value);
                    if !(fp.is_finite() && fm.is_finite()) {
                        continue;
                    }
                    let fd = (fp - fm) / (2.0 * h);
                    let rel = (fd - g.data.as_vector()[k]).abs() / scale;
                    assert!(rel <= 1e-5, "potential {pi} coord {k}: rel {rel}");
                }
            }
        }
    }

    #[test]
    fn conjugate_gradient_inverts_gradient() {
        for (pi, (psi, sample)) in vector_catalog(3).into_iter().enumerate() {
            for i in 0..100u64 {
                let mut rng = sampling::rng_for(1400 + pi as u64, i);
                let x = sample(&psi.space, &mut rng);
                let g = match psi.eval(&x).unwrap().gradient {
                    Some(g) => g,
                    None => continue,
                };
                let back = psi.conj_grad(&g).unwrap();
                let err = back.sub(&x.with_space(&back.space)).euclid_norm();
                assert!(err <= 1e-8 * (1.0 + x.euclid_norm()), "potential {pi}: err {err}");
            }
        }
    }

    #[test]
    fn fenchel_inequality_and_equality() {
        for (pi, (psi, sample)) in vector_catalog(3).into_iter().enumerate() {
            for i in 0..100u64 {
                let mut rng = sampling::rng_for(2100 + pi as u64, i);
                let x = sample(&psi.space, &mut rng);
                let ev = psi.eval(&x).unwrap();
                // Inequality at a random dual point.
                let y = sampling::gaussian_point(&psi.space.dual(), 1.0, &mut rng);
                let cv = psi.conjugate_eval(&y).unwrap();
                if ev.value.is_finite() && cv.value.is_finite() {
                    let gap = ev.value + cv.value - pairing(&x, &y).unwrap();
                    let scale = 1.0 + ev.value.abs() + cv.value.abs();
                    assert!(gap >= -1e-10 * scale, "potential {pi}: gap {gap}");
                }
                // Equality at y = ∇Ψ(x).
                if let Some(g) = ev.gradient {
                    let cv = psi.conjugate_eval(&g).unwrap();
                    let gap = ev.value + cv.value - pairing(&x, &g).unwrap();
                    let scale = 1.0 + ev.value.abs() + cv.value.abs();
                    assert!(gap.abs() <= 1e-9 * scale, "potential {pi}: equality gap {gap}");
                }
            }
        }
    }

    #[test]
    fn spectral_unitary_invariance_and_covariance() {
        let m = SpaceDescriptor::frobenius(3);
        let psis = [
            Potential::kl(m.clone()),
            Potential::burg(m.clone()),
            Potential::power_sum(m.clone(), 0.5).unwrap(),
            Potential::alpha_family(m.clone(), 0.5).unwrap(),
        ];
        for (pi, psi) in psis.iter().enumerate() {
            for i in 0..100u64 {
                let mut rng = sampling::rng_for(3000 + pi as u64, i);
                let x = sampling::positive_point(&m, 1.0, &mut rng);
                let u = sampling::random_unitary(3, &mut rng);
                let xr = SpacePoint::from_matrix(&m, &u * x.data.as_matrix() * u.adjoint())
                    .unwrap();
                let (a, b) = (psi.eval(&x).unwrap(), psi.eval(&xr).unwrap());
                assert!((a.value - b.value).abs() <= 1e-9 * (1.0 + a.value.abs()));
                let (ga, gb) = (a.gradient.unwrap(), b.gradient.unwrap());
                let rotated =
                    SpacePoint::from_matrix(&m.dual(), &u * ga.data.as_matrix() * u.adjoint())
                        .unwrap();
                assert!(
                    rotated.sub(&gb).euclid_norm() <= 1e-8 * (1.0 + ga.euclid_norm()),
                    "potential {pi}"
                );
            }
        }
    }

    #[test]
    fn hessian_matches_gradient_differences() {
        // The Newton solvers lean on hess_apply; compare against directional
        // finite differences of the gradient.
        let mut cases = vector_catalog(3);
        let m = SpaceDescriptor::hermitian(3, NormSpec::schatten(3.0)).unwrap();
        fn positive_m(s: &SpaceDescriptor, rng: &mut rand_chacha::ChaCha8Rng) -> SpacePoint {
            sampling::positive_point(s, 1.0, rng)
        }
        cases.push((Potential::kl(SpaceDescriptor::frobenius(3)), positive_m));
        cases.push((Potential::gauge(m, Gauge::power(1.0, 0.25).unwrap()), positive_m));
        for (pi, (psi, sample)) in cases.into_iter().enumerate() {
            for i in 0..40u64 {
                let mut rng = sampling::rng_for(3700 + pi as u64, i);
                let x = sample(&psi.space, &mut rng);
                if !psi.in_interior(&x) {
                    continue;
                }
                let h = sampling::gaussian_point(&psi.space, 1.0, &mut rng);
                let hx = psi.hess_apply(&x, &h).unwrap();
                let t = 1e-6 * x.euclid_norm().max(1.0) / h.euclid_norm().max(1e-12);
                let mut xp = x.clone();
                xp.axpy(t, &h);
                let mut xm = x.clone();
                xm.axpy(-t, &h);
                if !(psi.in_interior(&xp) && psi.in_interior(&xm)) {
                    continue;
                }
                let fd = psi.grad(&xp).unwrap().sub(&psi.grad(&xm).unwrap()).scale(1.0 / (2.0 * t));
                let err = fd.sub(&hx).euclid_norm() / (1.0 + hx.euclid_norm());
                assert!(err <= 2e-4, "potential {pi} sample {i}: hessian err {err}");
            }
        }
    }

    #[test]
    fn conjugate_potential_round_trip() {
        let s = SpaceDescriptor::euclidean(3);
        let psi = Potential::kl(s.clone());
        let star = psi.conjugate_potential();
        let y = vecp(&s.dual(), &[0.1, -0.3, 0.5]);
        // Ψ*(y) via either route.
        assert!(
            (star.eval(&y).unwrap().value - psi.conjugate_eval(&y).unwrap().value).abs() < 1e-14
        );
        // (Ψ*)* = Ψ.
        let x = vecp(&s, &[0.4, 1.0, 2.0]);
        assert!(
            (star.conjugate_eval(&x).unwrap().value - psi.eval(&x).unwrap().value).abs() < 1e-14
        );
    }

    #[test]
    fn identity_gradient_detection() {
        assert!(Potential::hilbert(3).is_identity_gradient());
        assert!(Potential::squared_norm(SpaceDescriptor::frobenius(2)).is_identity_gradient());
        assert!(!Potential::kl(SpaceDescriptor::euclidean(2)).is_identity_gradient());
        assert!(
            !Potential::squared_norm(SpaceDescriptor::vector(2, NormSpec::p(3.0)).unwrap())
                .is_identity_gradient()
        );
    }
}

/// Hessian action of Ψ(x) = G(‖x‖_p) on vectors, where G' = φ and G'' = φ':
/// H·h = [φ'(r) − (p−1)φ(r)/r]·⟨u,h⟩·u + (p−1)φ(r) r^{1−p} |xᵢ|^{p−2} hᵢ
/// with u = ∇‖·‖_p(x).
fn norm_composite_hess(
    p: f64,
    r: f64,
    phi: f64,
    dphi: f64,
    x: &DVector<f64>,
    h: &DVector<f64>,
) -> DVector<f64> {
    let n = x.len();
    if r == 0.0 {
        return DVector::zeros(n);
    }
    let u = DVector::from_iterator(
        n,
        x.iter().map(|t| r.powf(1.0 - p) * t.abs().powf(p - 1.0) * t.signum()),
    );
    let uh = u.dot(h);
    let c1 = dphi - (p - 1.0) * phi / r;
    let c2 = (p - 1.0) * phi * r.powf(1.0 - p);
    DVector::from_iterator(
        n,
        (0..n).map(|i| {
            // |xᵢ|^{p−2} is singular at 0 for p < 2; a zero direction
            // component contributes nothing there.
            let diag = if h[i] == 0.0 { 0.0 } else { x[i].abs().powf(p - 2.0) * h[i] };
            c1 * uh * u[i] + c2 * diag
        }),
    )
}

/// Lewis–Sendov Hessian action for spectral functions f∘λ: with
/// x = V diag(λ) V*, H̃ = V*(h)V, the image is V·M·V* where the diagonal of
/// M is ∇²f(λ)·diag(H̃) and off-diagonal entries are first divided
/// differences of ∇f (second derivatives on degenerate pairs).
fn spectral_hess_apply(
    inner: &Potential,
    x: &SpacePoint,
    h: &SpacePoint,
    conj: bool,
    outer_space: &SpaceDescriptor,
) -> Result<SpacePoint> {
    let (eigs, basis) = eigen_sorted(x)?;
    let n = eigs.len();
    let lam = SpacePoint { space: inner.space.clone(), data: PointData::Vector(eigs.clone()) };
    let grad = if conj { inner.conj_grad(&lam)? } else { inner.grad(&lam)? };
    let g = grad.data.as_vector();

    // Dense inner Hessian (n ≤ 8 at desk scale).
    let mut hess = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = SpacePoint::zeros(&inner.space);
        if let PointData::Vector(v) = &mut e.data {
            v[j] = 1.0;
        }
        let col = if conj {
            inner.conj_hess_apply(&lam, &e)?
        } else {
            inner.hess_apply(&lam, &e)?
        };
        hess.set_column(j, col.data.as_vector());
    }

    let hm = h.data.as_matrix();
    let ht = basis.adjoint() * hm * &basis;
    let scale = eigs.iter().fold(0.0f64, |a, t| a.max(t.abs())).max(1.0);
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            acc += hess[(i, j)] * ht[(j, j)].re;
        }
        m[(i, i)] = Complex64::new(acc, 0.0);
        for j in 0..n {
            if i == j {
                continue;
            }
            let a = if (eigs[i] - eigs[j]).abs() > 1e-9 * scale {
                (g[i] - g[j]) / (eigs[i] - eigs[j])
            } else {
                hess[(i, i)] - hess[(i, j)]
            };
            m[(i, j)] = ht[(i, j)] * a;
        }
    }
    let out = &basis * m * basis.adjoint();
    let space = if conj { outer_space.clone() } else { outer_space.dual() };
    Ok(SpacePoint { space, data: PointData::Matrix(out) })
}
