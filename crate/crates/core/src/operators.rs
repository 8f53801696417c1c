//! Proximal maps, resolvents, cyclic and Dykstra projection schemes, and
//! empirical quasinonexpansivity certification.
//!
//! The resolvent is the inverse form (∇Ψ + λT)⁻¹ ∘ ∇Ψ: the Hilbert
//! specialization (T + id)⁻¹ and the identity lprox = lres over ∂f force the
//! inverse even though the defining display omits it.

use nalgebra::{DMatrix, DVector};


use crate::convex_sets::ConvexSet;
use crate::divergence::bregman;
use crate::error::{Error, Result};
use crate::potentials::Potential;
use crate::projections::{left_project, ProjectionResult, MAX_ITERS};
use crate::sampling;
use crate::spaces::{pairing, PointData, SpaceKind, SpacePoint};

/// Monotone maps T: X → X* the resolvents accept.
#[derive(Clone, Debug)]
pub enum MonotoneMap {
    /// T = ∇f for a catalog potential f.
    GradientOf(Potential),
    /// T(x) = Mx with positive semidefinite symmetric part (vector spaces).
    Linear(DMatrix<f64>),
    /// T = ∂ι_K: the resolvent collapses to the left projection onto K.
    SubdifferentialOfIndicator(ConvexSet),
}

impl MonotoneMap {
    pub fn apply(&self, x: &SpacePoint) -> Result<SpacePoint> {
        match self {
            MonotoneMap::GradientOf(f) => f.grad(x),
            MonotoneMap::Linear(m) => Ok(SpacePoint {
                space: x.space.dual(),
                data: PointData::Vector(m * x.data.as_vector()),
            }),
            MonotoneMap::SubdifferentialOfIndicator(_) => Err(Error::Unsupported(
                "indicator subdifferentials are set-valued; use the projection form".into(),
            )),
        }
    }

    fn jac_apply(&self, x: &SpacePoint, h: &SpacePoint) -> Result<SpacePoint> {
        match self {
            MonotoneMap::GradientOf(f) => f.hess_apply(x, h),
            MonotoneMap::Linear(m) => Ok(SpacePoint {
                space: x.space.dual(),
                data: PointData::Vector(m * h.data.as_vector()),
            }),
            MonotoneMap::SubdifferentialOfIndicator(_) => unreachable!(),
        }
    }
}

/// Objectives accepted by the proximal maps.
#[derive(Clone, Debug)]
pub enum ProxTarget {
    /// Smooth convex catalog potential.
    Potential(Potential),
    /// f(x) = ⟨c, x⟩.
    Linear(SpacePoint),
    /// f = ι_K: the prox collapses to the left projection.
    Indicator(ConvexSet),
}

impl ProxTarget {
    fn value(&self, x: &SpacePoint) -> Result<f64> {
        match self {
            ProxTarget::Potential(f) => Ok(f.eval(x)?.value),
            ProxTarget::Linear(c) => pairing(x, c),
            ProxTarget::Indicator(k) => {
                Ok(if k.contains(x, 1e-9)? { 0.0 } else { f64::INFINITY })
            }
        }
    }

    fn grad(&self, x: &SpacePoint) -> Result<SpacePoint> {
        match self {
            ProxTarget::Potential(f) => f.grad(x),
            ProxTarget::Linear(c) => Ok(c.clone()),
            ProxTarget::Indicator(_) => Err(Error::Unsupported(
                "indicator targets have no gradient".into(),
            )),
        }
    }

    fn hess_apply(&self, x: &SpacePoint, h: &SpacePoint) -> Result<SpacePoint> {
        match self {
            ProxTarget::Potential(f) => f.hess_apply(x, h),
            ProxTarget::Linear(c) => Ok(SpacePoint::zeros(&c.space)),
            ProxTarget::Indicator(_) => unreachable!(),
        }
    }
}

/// Solver output for prox/resolvent computations.
#[derive(Clone, Debug)]
pub struct OperatorResult {
    pub point: SpacePoint,
    /// Euclidean norm of the defining-equation residual at the output.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Left proximal map: arginf over x of f(x) + λ D_Ψ(x, y).
pub fn left_prox(
    psi: &Potential,
    f: &ProxTarget,
    lambda: f64,
    y: &SpacePoint,
    tol: f64,
) -> Result<OperatorResult> {
    if !(lambda > 0.0) {
        return Err(Error::Validation("prox index λ must be positive".into()));
    }
    if let ProxTarget::Indicator(k) = f {
        let p = left_project(psi, k, y, tol)?;
        return Ok(to_operator_result(p));
    }
    let eta = psi.grad(y)?;
    if let ProxTarget::Linear(c) = f {
        // Stationarity ∇Ψ(z) = ∇Ψ(y) − c/λ in closed form.
        let mut w = eta.clone();
        w.axpy(-1.0 / lambda, c);
        let z = psi.conj_grad(&w)?;
        return Ok(OperatorResult { point: z, residual: 0.0, iterations: 1, converged: true });
    }
    // Solve R(w) = ∇f(∇Ψ*(w)) + λ(w − η) = 0 in dual coordinates; iterates
    // stay in the domain interior via the gradient bijection.
    let star = psi.conjugate_potential();
    let residual_of = |w: &SpacePoint| -> Result<Option<SpacePoint>> {
        let ev = star.eval(&w.with_space(&star.space))?;
        let x = match ev.gradient {
            Some(g) => g.with_space(&y.space),
            None => return Ok(None),
        };
        let fx = f.value(&x)?;
        if !fx.is_finite() {
            return Ok(None);
        }
        let mut r = f.grad(&x)?;
        r.axpy(lambda, &w.sub(&eta).with_space(&r.space));
        Ok(Some(r))
    };
    let jac_apply = |w: &SpacePoint, h: &SpacePoint| -> Result<SpacePoint> {
        let x = star.grad(&w.with_space(&star.space))?.with_space(&y.space);
        let dx = star
            .hess_apply(&w.with_space(&star.space), &h.with_space(&star.space))?
            .with_space(&y.space);
        let mut out = f.hess_apply(&x, &dx)?;
        out.axpy(lambda, &h.with_space(&out.space));
        Ok(out)
    };
    let (w, residual, iterations, converged) =
        newton_on_dual(&eta, residual_of, jac_apply, tol * lambda.max(1.0))?;
    let z = psi.conj_grad(&w)?;
    Ok(OperatorResult { point: z, residual, iterations, converged })
}

/// Right proximal map: arginf over x of f(x) + λ D_Ψ(y, x), computed as
/// ∇Ψ* ∘ lprox^{D_{Ψ*}}_{λ, f∘∇Ψ*} ∘ ∇Ψ.
pub fn right_prox(
    psi: &Potential,
    f: &ProxTarget,
    lambda: f64,
    y: &SpacePoint,
    tol: f64,
) -> Result<OperatorResult> {
    if !(lambda > 0.0) {
        return Err(Error::Validation("prox index λ must be positive".into()));
    }
    if let ProxTarget::Indicator(k) = f {
        if k.coordinates == crate::convex_sets::Coordinates::Dual {
            let p = crate::projections::right_project(psi, k, y, tol)?;
            return Ok(to_operator_result(p));
        }
    }
    let eta = psi.grad(y)?;
    let star = psi.conjugate_potential();
    // Minimize G(v) = f(∇Ψ*(v)) + λ D_{Ψ*}(v, η) by descent with Armijo in
    // dual coordinates.
    let value = |v: &SpacePoint| -> Result<f64> {
        let ev = star.eval(&v.with_space(&star.space))?;
        let x = match ev.gradient {
            Some(g) => g.with_space(&y.space),
            None => return Ok(f64::INFINITY),
        };
        let fv = f.value(&x)?;
        Ok(fv + lambda * bregman(&star, &v.with_space(&star.space), &eta.with_space(&star.space))?.value)
    };
    let grad = |v: &SpacePoint| -> Result<SpacePoint> {
        let vs = v.with_space(&star.space);
        let x = star.grad(&vs)?.with_space(&y.space);
        let gf = f.grad(&x)?;
        let mut g = star.hess_apply(&vs, &gf.with_space(&star.space))?;
        g.axpy(lambda, &x.sub(y).with_space(&g.space));
        Ok(g.with_space(&eta.space))
    };
    let mut v = eta.clone();
    let mut fv = value(&v)?;
    let mut t = 1.0f64;
    let mut iterations = 0usize;
    let mut converged = false;
    let mut res = f64::INFINITY;
    while iterations < MAX_ITERS {
        iterations += 1;
        let g = grad(&v)?;
        res = g.euclid_norm();
        if res <= tol * (1.0 + v.euclid_norm()) {
            converged = true;
            break;
        }
        let mut accepted = false;
        for _ in 0..70 {
            let mut cand = v.clone();
            cand.axpy(-t, &g);
            let fc = value(&cand)?;
            if fc.is_finite() && fc <= fv - 1e-4 * t * res * res {
                v = cand;
                fv = fc;
                t = (t * 1.5).min(1e8);
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            converged = res <= 100.0 * tol * (1.0 + v.euclid_norm());
            break;
        }
    }
    let z = psi.conj_grad(&v)?;
    Ok(OperatorResult { point: z, residual: res, iterations, converged })
}

/// Left resolvent (∇Ψ + λT)⁻¹ ∘ ∇Ψ.
pub fn left_resolvent(
    psi: &Potential,
    t_map: &MonotoneMap,
    lambda: f64,
    x: &SpacePoint,
    tol: f64,
) -> Result<OperatorResult> {
    if !(lambda > 0.0) {
        return Err(Error::Validation("resolvent index λ must be positive".into()));
    }
    if let MonotoneMap::SubdifferentialOfIndicator(k) = t_map {
        let p = left_project(psi, k, x, tol)?;
        return Ok(to_operator_result(p));
    }
    let eta = psi.grad(x)?;
    let star = psi.conjugate_potential();
    // R(w) = w + λ T(∇Ψ*(w)) − η = 0 in dual coordinates.
    let residual_of = |w: &SpacePoint| -> Result<Option<SpacePoint>> {
        let ev = star.eval(&w.with_space(&star.space))?;
        let z = match ev.gradient {
            Some(g) => g.with_space(&x.space),
            None => return Ok(None),
        };
        let tz = match t_map.apply(&z) {
            Ok(v) => v,
            Err(_) => return Ok(None),
        };
        let mut r = w.clone();
        r.axpy(lambda, &tz.with_space(&w.space));
        r.axpy(-1.0, &eta);
        Ok(Some(r))
    };
    let jac_apply = |w: &SpacePoint, h: &SpacePoint| -> Result<SpacePoint> {
        let z = star.grad(&w.with_space(&star.space))?.with_space(&x.space);
        let dz = star
            .hess_apply(&w.with_space(&star.space), &h.with_space(&star.space))?
            .with_space(&x.space);
        let mut out = t_map.jac_apply(&z, &dz)?.scale(lambda);
        out.axpy(1.0, &h.with_space(&out.space));
        Ok(out)
    };
    let (w, residual, iterations, converged) = newton_on_dual(&eta, residual_of, jac_apply, tol)?;
    let z = psi.conj_grad(&w)?;
    Ok(OperatorResult { point: z, residual, iterations, converged })
}

/// Right resolvent (id + λT∘∇Ψ*)⁻¹, computed as ∇Ψ ∘ lres ∘ ∇Ψ*.
pub fn right_resolvent(
    psi: &Potential,
    t_map: &MonotoneMap,
    lambda: f64,
    xi: &SpacePoint,
    tol: f64,
) -> Result<OperatorResult> {
    let x = psi.conj_grad(xi)?;
    let inner = left_resolvent(psi, t_map, lambda, &x, tol)?;
    let out = psi.grad(&inner.point)?;
    // Defining-equation residual (id + λ T ∘ ∇Ψ*)(out) = ξ.
    let residual = match t_map {
        MonotoneMap::SubdifferentialOfIndicator(_) => inner.residual,
        _ => {
            let z = psi.conj_grad(&out)?;
            let mut r = out.clone();
            r.axpy(lambda, &t_map.apply(&z)?.with_space(&out.space));
            r.axpy(-1.0, &xi.with_space(&out.space));
            r.euclid_norm()
        }
    };
    Ok(OperatorResult {
        point: out,
        residual,
        iterations: inner.iterations,
        converged: inner.converged,
    })
}

fn to_operator_result(p: ProjectionResult) -> OperatorResult {
    OperatorResult {
        point: p.point,
        residual: p.variational_residual,
        iterations: p.iterations,
        converged: p.converged,
    }
}

/// Damped Newton for residual systems on dual coordinates. The Jacobian is
/// assembled densely for vector spaces; Hermitian spaces run a
/// gradient-of-merit descent with the exact Jacobian action.
fn newton_on_dual(
    eta: &SpacePoint,
    residual_of: impl Fn(&SpacePoint) -> Result<Option<SpacePoint>>,
    jac_apply: impl Fn(&SpacePoint, &SpacePoint) -> Result<SpacePoint>,
    tol: f64,
) -> Result<(SpacePoint, f64, usize, bool)> {
    let mut w = eta.clone();
    let mut r = residual_of(&w)?
        .ok_or_else(|| Error::NotConverged("starting dual point infeasible".into()))?;
    let mut iterations = 0usize;
    let scale = 1.0 + eta.euclid_norm();
    match eta.space.kind {
        SpaceKind::Vector => {
            let n = eta.space.n;
            for _ in 0..200 {
                iterations += 1;
                let rn = r.euclid_norm();
                if rn <= tol * scale {
                    return Ok((w, rn, iterations, true));
                }
                let mut jac = DMatrix::zeros(n, n);
                for j in 0..n {
                    let mut e = SpacePoint::zeros(&w.space);
                    if let PointData::Vector(v) = &mut e.data {
                        v[j] = 1.0;
                    }
                    let col = jac_apply(&w, &e)?;
                    jac.set_column(j, col.data.as_vector());
                }
                let rhs = DVector::from_column_slice(r.data.as_vector().as_slice());
                let delta = jac
                    .lu()
                    .solve(&rhs)
                    .ok_or_else(|| Error::NotConverged("singular resolvent Jacobian".into()))?;
                let step_dir = SpacePoint {
                    space: w.space.clone(),
                    data: PointData::Vector(delta),
                };
                let mut t = 1.0f64;
                let mut advanced = false;
                for _ in 0..60 {
                    let mut cand = w.clone();
                    cand.axpy(-t, &step_dir);
                    if let Some(rc) = residual_of(&cand)? {
                        if rc.euclid_norm() <= (1.0 - 1e-4 * t) * rn {
                            w = cand;
                            r = rc;
                            advanced = true;
                            break;
                        }
                    }
                    t *= 0.5;
                }
                if !advanced {
                    return Ok((w, rn, iterations, rn <= 100.0 * tol * scale));
                }
            }
            let rn = r.euclid_norm();
            Ok((w, rn, iterations, rn <= tol * scale))
        }
        SpaceKind::HermitianMatrix => {
            // Minimize ½‖R(w)‖² with gradient JᵀR (J self-adjoint composite).
            let mut t = 1.0f64;
            for _ in 0..MAX_ITERS {
                iterations += 1;
                let rn = r.euclid_norm();
                if rn <= tol * scale {
                    return Ok((w, rn, iterations, true));
                }
                let g = jac_apply(&w, &r)?;
                let mut advanced = false;
                for _ in 0..60 {
                    let mut cand = w.clone();
                    cand.axpy(-t, &g.with_space(&w.space));
                    if let Some(rc) = residual_of(&cand)? {
                        if rc.euclid_norm() < rn {
                            w = cand;
                            r = rc;
                            t = (t * 1.4).min(1e8);
                            advanced = true;
                            break;
                        }
                    }
                    t *= 0.5;
                }
                if !advanced {
                    return Ok((w, rn, iterations, rn <= 100.0 * tol * scale));
                }
            }
            let rn = r.euclid_norm();
            Ok((w, rn, iterations, rn <= tol * scale))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CyclicMode {
    NaiveCyclic,
    DykstraHilbert,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    SweepBudget,
}

/// Trace of a cyclic projection run.
#[derive(Clone, Debug)]
pub struct IterationTrace {
    /// Iterate after each individual projection.
    pub points: Vec<SpacePoint>,
    /// D_Ψ(target, iterate) per recorded point, when a target is supplied.
    pub divergence_to_target: Vec<f64>,
    pub sweeps: usize,
    pub stop: StopReason,
    pub limit: SpacePoint,
}

/// Cyclic Bregman projections over an ordered family of sets; Dykstra's
/// correction-vector scheme is available in the Hilbert case and converges
/// to the exact metric projection onto the intersection.
pub fn cyclic_project(
    psi: &Potential,
    sets: &[ConvexSet],
    y: &SpacePoint,
    mode: CyclicMode,
    max_sweeps: usize,
    tol: f64,
    target: Option<&SpacePoint>,
) -> Result<IterationTrace> {
    if sets.is_empty() {
        return Err(Error::Validation("cyclic projection needs at least one set".into()));
    }
    if mode == CyclicMode::DykstraHilbert && !psi.is_identity_gradient() {
        return Err(Error::Precondition(
            "Dykstra's scheme is implemented for the Hilbert potential".into(),
        ));
    }
    let mut z = y.clone();
    let mut corrections: Vec<SpacePoint> =
        sets.iter().map(|_| SpacePoint::zeros(&y.space)).collect();
    let mut points = Vec::new();
    let mut divs = Vec::new();
    let mut stop = StopReason::SweepBudget;
    let mut sweeps = 0;
    for sweep in 0..max_sweeps {
        sweeps = sweep + 1;
        let mut moved = 0.0f64;
        for (i, k) in sets.iter().enumerate() {
            let next = match mode {
                CyclicMode::NaiveCyclic => left_project(psi, k, &z, tol * 1e-2)?.point,
                CyclicMode::DykstraHilbert => {
                    let shifted = z.add(&corrections[i]);
                    let proj = k.euclidean_project(&shifted)?;
                    corrections[i] = shifted.sub(&proj);
                    proj
                }
            };
            moved = moved.max(next.sub(&z).euclid_norm());
            z = next;
            points.push(z.clone());
            if let Some(t) = target {
                divs.push(bregman(psi, t, &z)?.value);
            }
        }
        // Feasibility across all sets plus stalling.
        let mut feas = 0.0f64;
        for k in sets {
            feas = feas.max(k.euclidean_project(&z)?.sub(&z).euclid_norm());
        }
        if feas <= tol * (1.0 + z.euclid_norm()) && moved <= tol * (1.0 + z.euclid_norm()) {
            stop = StopReason::Converged;
            break;
        }
    }
    Ok(IterationTrace { points, divergence_to_target: divs, sweeps, stop, limit: z })
}

/// Empirical quasinonexpansivity certificate.
#[derive(Clone, Debug)]
pub struct QuasiNonexpansiveReport {
    /// Worst ‖T(y) − y‖ over the claimed fixed points.
    pub fixed_point_residual: f64,
    /// Worst violation of D(y, T(x)) ≤ D(y, x).
    pub left_violation: f64,
    /// Worst violation of D(T(x), y) ≤ D(x, y).
    pub right_violation: f64,
    /// Worst violation of the left firm nonexpansiveness inequality.
    pub firm_violation: f64,
    pub samples: usize,
}

impl QuasiNonexpansiveReport {
    pub fn classify(&self, tol: f64) -> &'static str {
        let l = self.left_violation <= tol;
        let r = self.right_violation <= tol;
        let f = self.firm_violation <= tol;
        match (l, r, f) {
            (true, true, true) => "left+right quasinonexpansive, left firmly nonexpansive",
            (true, true, false) => "left+right quasinonexpansive",
            (true, false, true) => "left quasinonexpansive, left firmly nonexpansive",
            (true, false, false) => "left quasinonexpansive",
            (false, true, _) => "right quasinonexpansive",
            _ => "no certified class",
        }
    }
}

/// Sample violations of the quasinonexpansivity inequalities for a point map
/// T with claimed fixed set `fixed`. Sampled x's come from `sampler`; the
/// asymptotic fixed-point clause of the definitions is replaced by the exact
/// Fix(T) in this finite-dimensional model.
pub fn certify_quasinonexpansive(
    psi: &Potential,
    t_map: &dyn Fn(&SpacePoint) -> Result<SpacePoint>,
    fixed: &[SpacePoint],
    sampler: &mut dyn FnMut(&mut rand_chacha::ChaCha8Rng) -> SpacePoint,
    samples: usize,
    seed: u64,
) -> Result<QuasiNonexpansiveReport> {
    let mut fp_res = 0.0f64;
    for y in fixed {
        let ty = t_map(y)?;
        fp_res = fp_res.max(ty.sub(y).euclid_norm() / (1.0 + y.euclid_norm()));
    }
    let mut left = 0.0f64;
    let mut right = 0.0f64;
    let mut firm = 0.0f64;
    let mut prev: Option<(SpacePoint, SpacePoint)> = None;
    let mut used = 0;
    for i in 0..samples {
        let mut rng = sampling::rng_for(seed, i as u64);
        let x = sampler(&mut rng);
        let tx = t_map(&x)?;
        used += 1;
        for y in fixed {
            let dyx = bregman(psi, y, &x)?.value;
            let dytx = bregman(psi, y, &tx)?.value;
            if dyx.is_finite() && dytx.is_finite() {
                left = left.max((dytx - dyx) / (1.0 + dyx.abs()));
            }
            let dxy = bregman(psi, &x, y)?.value;
            let dtxy = bregman(psi, &tx, y)?.value;
            if dxy.is_finite() && dtxy.is_finite() {
                right = right.max((dtxy - dxy) / (1.0 + dxy.abs()));
            }
        }
        if let Some((xp, txp)) = &prev {
            let lhs = bregman(psi, &tx, txp)?.value
                + bregman(psi, txp, &tx)?.value
                + bregman(psi, &tx, &x)?.value
                + bregman(psi, txp, xp)?.value;
            let rhs = bregman(psi, &tx, xp)?.value + bregman(psi, txp, &x)?.value;
            if lhs.is_finite() && rhs.is_finite() {
                firm = firm.max((lhs - rhs) / (1.0 + rhs.abs()));
            }
        }
        prev = Some((x, tx));
    }
    Ok(QuasiNonexpansiveReport {
        fixed_point_residual: fp_res,
        left_violation: left,
        right_violation: right,
        firm_violation: firm,
        samples: used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex_sets::ConvexSet;
    use crate::gauges::Gauge;
    use crate::spaces::{NormSpec, SpaceDescriptor};

    fn vecp(space: &SpaceDescriptor, xs: &[f64]) -> SpacePoint {
        SpacePoint::from_vec(space, xs.to_vec()).unwrap()
    }

    #[test]
    fn prox_of_indicator_is_projection() {
        let s = SpaceDescriptor::euclidean(2);
        let psi = Potential::kl(s.clone());
        let k = ConvexSet::simplex(s.clone(), 1.0).unwrap();
        let y = vecp(&s, &[2.0, 2.0]);
        let p = left_prox(&psi, &ProxTarget::Indicator(k.clone()), 3.7, &y, 1e-10).unwrap();
        let q = left_project(&psi, &k, &y, 1e-10).unwrap();
        assert!(p.point.sub(&q.point).euclid_norm() < 1e-12);
    }

    #[test]
    fn hilbert_prox_of_squared_norm() {
        let s = SpaceDescriptor::euclidean(2);
        let psi = Potential::hilbert(2);
        let f = ProxTarget::Potential(Potential::hilbert(2));
        let y = vecp(&s, &[2.0, 0.0]);
        let p = left_prox(&psi, &f, 1.0, &y, 1e-12).unwrap();
        assert!(p.converged);
        assert!(p.point.sub(&vecp(&s, &[1.0, 0.0])).euclid_norm() < 1e-10);
    }

    #[test]
    fn kl_prox_of_linear_is_exponential_tilt() {
        let s = SpaceDescriptor::euclidean(3);
        let psi = Potential::kl(s.clone());
        let c = vecp(&s.dual(), &[0.5, -1.0, 2.0]);
        let y = vecp(&s, &[1.0, 2.0, 0.5]);
        let p = left_prox(&psi, &ProxTarget::Linear(c.clone()), 1.0, &y, 1e-12).unwrap();
        for i in 0..3 {
            let expect = y.data.as_vector()[i] * (-c.data.as_vector()[i]).exp();
            assert!((p.point.data.as_vector()[i] - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn burg_prox_scalar_brute_force() {
        let s = SpaceDescriptor::euclidean(1);
        let psi = Potential::burg(s.clone());
        let c = vecp(&s.dual(), &[0.8]);
        let y = vecp(&s, &[1.0]);
        let p = left_prox(&psi, &ProxTarget::Linear(c.clone()), 1.0, &y, 1e-12).unwrap();
        let mut best = (f64::INFINITY, 0.0);
        for i in 1..400_000 {
            let t = i as f64 * 1e-5;
            let v = 0.8 * t + bregman(&psi, &vecp(&s, &[t]), &y).unwrap().value;
            if v < best.0 {
                best = (v, t);
            }
        }
        assert!((p.point.data.as_vector()[0] - best.1).abs() < 1e-4);
    }

    #[test]
    fn right_prox_hilbert_equals_left() {
        let s = SpaceDescriptor::euclidean(2);
        let psi = Potential::hilbert(2);
        let f = ProxTarget::Potential(Potential::hilbert(2));
        let y = vecp(&s, &[2.0, -1.0]);
        let l = left_prox(&psi, &f, 1.0, &y, 1e-11).unwrap();
        let r = right_prox(&psi, &f, 1.0, &y, 1e-11).unwrap();
        assert!(l.point.sub(&r.point).euclid_norm() < 1e-8, "{l:?} vs {r:?}");
    }

    #[test]
    fn right_prox_matches_direct_minimization() {
        // Ψ = burg on ℝ¹, f(x) = c x: brute-force the right prox objective.
        let s = SpaceDescriptor::euclidean(1);
        let psi = Potential::burg(s.clone());
        let c = vecp(&s.dual(), &[0.6]);
        let y = vecp(&s, &[1.0]);
        let r = right_prox(&psi, &ProxTarget::Linear(c.clone()), 1.0, &y, 1e-12).unwrap();
        let mut best = (f64::INFINITY, 0.0);
        for i in 1..400_000 {
            let t = i as f64 * 1e-5;
            let v = 0.6 * t + bregman(&psi, &y, &vecp(&s, &[t])).unwrap().value;
            if v < best.0 {
                best = (v, t);
            }
        }
        assert!((r.point.data.as_vector()[0] - best.1).abs() < 1e-4, "{r:?} vs {best:?}");
    }

    #[test]
    fn hilbert_resolvent_of_linear_map() {
        let s = SpaceDescriptor::euclidean(2);
        let psi = Potential::hilbert(2);
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = 1.0;
        m[(1, 1)] = 3.0;
        let t = MonotoneMap::Linear(m.clone());
        let x = vecp(&s, &[2.0, 4.0]);
        let lambda = 0.5;
        let r = left_resolvent(&psi, &t, lambda, &x, 1e-12).unwrap();
        // (I + λM)⁻¹ x = (2/1.5, 4/2.5).
        assert!(r.converged);
        assert!((r.point.data.as_vector()[0] - 2.0 / 1.5).abs() < 1e-10);
        assert!((r.point.data.as_vector()[1] - 4.0 / 2.5).abs() < 1e-10);
    }

    #[test]
    fn resolvent_of_indicator_is_projection() {
        let s = SpaceDescriptor::euclidean(2);
        let psi = Potential::kl(s.clone());
        let k = ConvexSet::simplex(s.clone(), 1.0).unwrap();
        let x = vecp(&s, &[0.4, 2.2]);
        let a = left_resolvent(&psi, &MonotoneMap::SubdifferentialOfIndicator(k.clone()), 1.0, &x, 1e-10)
            .unwrap();
        let b = left_project(&psi, &k, &x, 1e-10).unwrap();
        assert!(a.point.sub(&b.point).euclid_norm() < 1e-12);
    }

    #[test]
    fn kl_resolvent_scalar_fixed_point() {
        // Ψ = kl on ℝ¹, T(x) = x − 1, λ = 1, x = 1: solve log z + z − 1 = 0,
        // i.e. z = 1.
        let s = SpaceDescriptor::euclidean(1);
        let psi = Potential::kl(s.clone());
        let mut m = DMatrix::zeros(1, 1);
        m[(0, 0)] = 1.0;
        // T(x) = x − 1 is monotone affine; realize it as ∇f for
        // f(x) = ½x² − x (quadratic plus linear shift is outside the
        // catalog, so check the defining equation directly instead).
        let x = vecp(&s, &[1.0]);
        let eta = psi.grad(&x).unwrap();
        // Solve by the library path with a shifted linear map: R(z) =
        // log z + λ(z − 1) − log x. With x = 1 the root is z = 1.
        // Emulate T via Linear(m) plus the constant −1 folded into ξ:
        // (∇Ψ + λT)(z) = log z + z − 1 means T(z) = z − 1.
        // Use the identity lres = (∇Ψ + λT)⁻¹∘∇Ψ with a custom check:
        let t = MonotoneMap::Linear(m);
        // lres for T(z) = z: log z + z = log x + 0 ... adjust the input so
        // the shift appears: ∇Ψ(x̃) = ∇Ψ(x) + λ·1 ⇒ x̃ = x·e^λ.
        let shifted = vecp(&s, &[x.data.as_vector()[0] * 1f64.exp()]);
        let r = left_resolvent(&psi, &t, 1.0, &shifted, 1e-12).unwrap();
        assert!(r.converged);
        assert!((r.point.data.as_vector()[0] - 1.0).abs() < 1e-9, "{r:?}");
        let _ = eta;
    }

    #[test]
    fn right_resolvent_defining_equation() {
        let s = SpaceDescriptor::euclidean(3);
        let psi = Potential::kl(s.clone());
        let mut m = DMatrix::zeros(3, 3);
        m[(0, 0)] = 0.5;
        m[(1, 1)] = 1.0;
        m[(2, 2)] = 2.0;
        m[(0, 1)] = 0.2;
        m[(1, 0)] = 0.2;
        let t = MonotoneMap::Linear(m);
        let xi = vecp(&s.dual(), &[0.3, -0.4, 1.0]);
        let lambda = 0.7;
        let r = right_resolvent(&psi, &t, lambda, &xi, 1e-11).unwrap();
        assert!(r.converged);
        assert!(r.residual <= 1e-8, "{r:?}");
        // T = 0 gives the identity.
        let zero = MonotoneMap::Linear(DMatrix::zeros(3, 3));
        let r0 = right_resolvent(&psi, &zero, 1.0, &xi, 1e-11).unwrap();
        assert!(r0.point.sub(&xi).euclid_norm() < 1e-9);
    }

    #[test]
    fn resolvent_pythagorean_inequality() {
        // Fixed points of lres are zeros of T; D(y, lres x) + D(lres x, x)
        // ≤ D(y, x).
        let s = SpaceDescriptor::euclidean(2);
        let psi = Potential::kl(s.clone());
        // T = ∇f for f = KL with a shifted minimum at (1,1):
        // f(z) = Σ z log z − z has gradient log z, zero at z = 1.
        let t = MonotoneMap::GradientOf(Potential::kl(s.clone()));
        let y_fix = vecp(&s, &[1.0, 1.0]);
        for i in 0..200u64 {
            let mut rng = sampling::rng_for(8800, i);
            let x = sampling::positive_point(&s, 1.0, &mut rng);
            let r = left_resolvent(&psi, &t, 0.8, &x, 1e-11).unwrap();
            if !r.converged {
                continue;
            }
            let lhs = bregman(&psi, &y_fix, &r.point).unwrap().value
                + bregman(&psi, &r.point, &x).unwrap().value;
            let rhs = bregman(&psi, &y_fix, &x).unwrap().value;
            assert!(lhs <= rhs + 1e-9 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn prox_resolvent_coherence() {
        // left_prox(Ψ, f, λ, ·) = left_resolvent(Ψ, ∇f, λ, ·) for smooth f.
        let s = SpaceDescriptor::euclidean(3);
        let psi = Potential::kl(s.clone());
        let f = Potential::burg(s.clone());
        for i in 0..50u64 {
            let mut rng = sampling::rng_for(8900, i);
            let x = sampling::positive_point(&s, 1.0, &mut rng);
            let a = left_prox(&psi, &ProxTarget::Potential(f.clone()), 1.3, &x, 1e-11).unwrap();
            let b = left_resolvent(
                &psi,
                &MonotoneMap::GradientOf(f.clone()),
                // lprox minimizes f + λD, whose stationarity is
                // ∇f/λ + ∇Ψ(z) − ∇Ψ(x) = 0 = (∇Ψ + (1/λ)∇f)(z) − ∇Ψ(x).
                1.0 / 1.3,
                &x,
                1e-11,
            )
            .unwrap();
            assert!(a.point.sub(&b.point).euclid_norm() <= 1e-7, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn dykstra_two_halfspaces_matches_exact_projection() {
        let s = SpaceDescriptor::euclidean(2);
        let psi = Potential::hilbert(2);
        let k1 = ConvexSet::halfspace(vecp(&s.dual(), &[1.0, 0.0]), 0.0).unwrap();
        let k2 = ConvexSet::halfspace(vecp(&s.dual(), &[0.0, 1.0]), 0.0).unwrap();
        let y = vecp(&s, &[2.0, 3.0]);
        let trace = cyclic_project(
            &psi,
            &[k1.clone(), k2.clone()],
            &y,
            CyclicMode::DykstraHilbert,
            200,
            1e-9,
            None,
        )
        .unwrap();
        // Exact intersection projection: clamp both coordinates to ≤ 0.
        assert!(trace.limit.sub(&vecp(&s, &[0.0, 0.0])).euclid_norm() < 1e-6);
        assert_eq!(trace.stop, StopReason::Converged);

        // Order independence of the two-set Hilbert limit.
        let trace2 = cyclic_project(
            &psi,
            &[k2, k1],
            &y,
            CyclicMode::DykstraHilbert,
            200,
            1e-9,
            None,
        )
        .unwrap();
        assert!(trace.limit.sub(&trace2.limit).euclid_norm() < 1e-6);
    }

    #[test]
    fn kl_cyclic_on_affine_pair_reaches_stacked_projection() {
        let s = SpaceDescriptor::euclidean(3);
        let psi = Potential::kl(s.clone());
        let a1 = vecp(&s.dual(), &[1.0, 1.0, 1.0]);
        let a2 = vecp(&s.dual(), &[1.0, 0.0, 2.0]);
        let k1 = ConvexSet::hyperplane(a1.clone(), 1.0).unwrap()
            .with_witness(vecp(&s, &[0.4, 0.3, 0.3]), true);
        let k2 = ConvexSet::hyperplane(a2.clone(), 0.8).unwrap()
            .with_witness(vecp(&s, &[0.2, 0.5, 0.3]), true);
        let y = vecp(&s, &[0.5, 0.2, 0.9]);
        let trace = cyclic_project(
            &psi,
            &[k1, k2],
            &y,
            CyclicMode::NaiveCyclic,
            500,
            1e-9,
            None,
        )
        .unwrap();
        // Direct stacked affine left projection.
        let stacked = ConvexSet::affine(vec![a1, a2], vec![1.0, 0.8]).unwrap()
            .with_witness(vecp(&s, &[0.13333, 0.53333, 0.33333]), true);
        let direct = left_project(&psi, &stacked, &y, 1e-11).unwrap();
        assert!(
            trace.limit.sub(&direct.point).euclid_norm() < 1e-6,
            "{:?} vs {:?}",
            trace.limit,
            direct.point
        );
    }

    #[test]
    fn naive_cyclic_on_nonaffine_sets_lands_in_intersection() {
        // Two non-affine convex sets: the limit is a point of the
        // intersection but generally not the exact projection; report the
        // difference against the Dykstra limit as a regression value.
        let s = SpaceDescriptor::euclidean(2);
        let psi = Potential::hilbert(2);
        let h1 = ConvexSet::halfspace(vecp(&s.dual(), &[0.0, 1.0]), 0.0).unwrap();
        let h2 = ConvexSet::halfspace(vecp(&s.dual(), &[1.0, 1.0]), 0.0).unwrap();
        let y = vecp(&s, &[1.9, 0.1]);
        let naive = cyclic_project(
            &psi,
            &[h1.clone(), h2.clone()],
            &y,
            CyclicMode::NaiveCyclic,
            2000,
            1e-10,
            None,
        )
        .unwrap();
        assert!(h1.contains(&naive.limit, 1e-6).unwrap());
        assert!(h2.contains(&naive.limit, 1e-6).unwrap());
        // POCS stops at (0.95, −0.95) while the exact projection is
        // (0.9, −0.9) (second constraint active alone).
        let dykstra = cyclic_project(
            &psi,
            &[h1, h2],
            &y,
            CyclicMode::DykstraHilbert,
            5000,
            1e-10,
            None,
        )
        .unwrap();
        assert!(dykstra.limit.sub(&vecp(&s, &[0.9, -0.9])).euclid_norm() < 1e-6);
        let gap = naive.limit.sub(&dykstra.limit).euclid_norm();
        assert!(gap > 1e-2, "expected a visible naive-vs-Dykstra gap, got {gap}");
    }

    #[test]
    fn certify_projection_and_rotation() {
        let s = SpaceDescriptor::euclidean(2);
        let psi = Potential::kl(s.clone());
        let k = ConvexSet::simplex(s.clone(), 1.0).unwrap();
        let proj = |x: &SpacePoint| -> Result<SpacePoint> {
            Ok(left_project(&psi, &k, x, 1e-10)?.point)
        };
        let fixed = vec![
            vecp(&s, &[0.5, 0.5]),
            vecp(&s, &[0.2, 0.8]),
            vecp(&s, &[0.9, 0.1]),
        ];
        let mut sampler =
            |rng: &mut rand_chacha::ChaCha8Rng| sampling::positive_point(&s, 1.0, rng);
        let rep =
            certify_quasinonexpansive(&psi, &proj, &fixed, &mut sampler, 300, 33).unwrap();
        assert!(rep.fixed_point_residual <= 1e-8, "{rep:?}");
        assert!(rep.left_violation <= 1e-9, "{rep:?}");
        assert!(rep.firm_violation <= 1e-9, "{rep:?}");

        // Rotation by π/4 in the Hilbert plane fixing 0: an isometry, so the
        // left inequality holds with equality.
        let h = Potential::hilbert(2);
        let rot = |x: &SpacePoint| -> Result<SpacePoint> {
            let v = x.data.as_vector();
            let c = std::f64::consts::FRAC_PI_4.cos();
            let sn = std::f64::consts::FRAC_PI_4.sin();
            SpacePoint::from_vec(&x.space, vec![c * v[0] - sn * v[1], sn * v[0] + c * v[1]])
        };
        let mut gaussian =
            |rng: &mut rand_chacha::ChaCha8Rng| sampling::gaussian_point(&s, 1.0, rng);
        let rep = certify_quasinonexpansive(
            &h,
            &rot,
            &[SpacePoint::zeros(&s)],
            &mut gaussian,
            300,
            34,
        )
        .unwrap();
        assert!(rep.left_violation <= 1e-10, "{rep:?}");
        assert!(rep.right_violation <= 1e-10, "{rep:?}");
    }

    #[test]
    fn composition_of_certified_maps() {
        let s = SpaceDescriptor::euclidean(2);
        let psi = Potential::kl(s.clone());
        let k1 = ConvexSet::simplex(s.clone(), 1.0).unwrap();
        let k2 = ConvexSet::halfspace(vecp(&s.dual(), &[1.0, -1.0]), 0.0).unwrap()
            .with_witness(vecp(&s, &[0.3, 0.7]), true);
        let compose = |x: &SpacePoint| -> Result<SpacePoint> {
            let a = left_project(&psi, &k1, x, 1e-10)?.point;
            Ok(left_project(&psi, &k2, &a, 1e-10)?.point)
        };
        // Fixed points of the composition within K₁∩K₂.
        let fixed = vec![vecp(&s, &[0.5, 0.5]), vecp(&s, &[0.2, 0.8])];
        let mut sampler =
            |rng: &mut rand_chacha::ChaCha8Rng| sampling::positive_point(&s, 1.0, rng);
        let rep =
            certify_quasinonexpansive(&psi, &compose, &fixed, &mut sampler, 200, 35).unwrap();
        assert!(rep.left_violation <= 1e-9, "{rep:?}");
    }
}
