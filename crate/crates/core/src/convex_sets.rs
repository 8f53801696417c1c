//! Declarative closed convex constraint sets with membership tests and exact
//! Euclidean (Frobenius) projection oracles. These oracles back the
//! first-order Bregman projection solvers and every brute-force cross-check.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spaces::{eigen_sorted, matrix_from_eigen, pairing, PointData, SpaceDescriptor, SpaceKind, SpacePoint};

/// Whether a set description lives in primal coordinates or in dual
/// coordinates: a dual-coordinate set K̂ denotes {x : ∇Ψ(x) ∈ K̂}, the
/// "∇Ψ-convex" sets, which carry no primal geometry of their own.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coordinates {
    Primal,
    Dual,
}

/// Cone descriptions closed under polarity.
#[derive(Clone, Debug)]
pub enum ConeSet {
    /// cone{g₁,…,g_m} = {Σ tᵢgᵢ : t ≥ 0}.
    Generators(Vec<SpacePoint>),
    /// {x : ⟨hᵢ, x⟩ ≤ 0 ∀i} (the polar of the generated cone).
    Inequalities(Vec<SpacePoint>),
    /// span{g₁,…,g_m}.
    Subspace(Vec<SpacePoint>),
    /// The annihilator {x : ⟨gᵢ, x⟩ = 0 ∀i} of span{gᵢ}.
    SubspaceComplement(Vec<SpacePoint>),
}

#[derive(Clone, Debug)]
pub enum SetVariant {
    /// ⟨a, x⟩ = b with a ≠ 0.
    Hyperplane { a: SpacePoint, b: f64 },
    /// ⟨a, x⟩ ≤ b with a ≠ 0.
    Halfspace { a: SpacePoint, b: f64 },
    /// ⟨aᵢ, x⟩ = bᵢ with independent rows.
    Affine { rows: Vec<SpacePoint>, b: Vec<f64> },
    /// Componentwise bounds l ≤ x ≤ u (vector spaces).
    Box { lower: Vec<f64>, upper: Vec<f64> },
    /// {x ≥ 0, Σx = s} (vector spaces).
    Simplex { total: f64 },
    /// Euclidean/Frobenius ball ‖x − c‖ ≤ r.
    NormBall { center: SpacePoint, radius: f64 },
    Cone(ConeSet),
    /// {ξ ⪰ 0, tr ξ = s} (Hermitian spaces).
    PsdTraceSlice { total: f64 },
    Intersection(Vec<ConvexSet>),
}

#[derive(Clone, Debug)]
pub struct SetWitness {
    pub point: SpacePoint,
    pub interior: bool,
}

/// A closed convex set on a model space, with a feasibility witness.
#[derive(Clone, Debug)]
pub struct ConvexSet {
    pub space: SpaceDescriptor,
    pub variant: SetVariant,
    pub coordinates: Coordinates,
    pub witness: Option<SetWitness>,
}

fn gram(rows: &[SpacePoint]) -> Result<DMatrix<f64>> {
    let m = rows.len();
    let mut g = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            g[(i, j)] = pairing(&rows[i], &rows[j])?;
        }
    }
    Ok(g)
}

fn gram_solve(g: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    g.clone()
        .cholesky()
        .map(|c| c.solve(rhs))
        .or_else(|| g.clone().lu().solve(rhs))
        .ok_or_else(|| Error::Validation("affine rows are numerically dependent".into()))
}

impl ConvexSet {
    fn new(space: SpaceDescriptor, variant: SetVariant) -> ConvexSet {
        ConvexSet { space, variant, coordinates: Coordinates::Primal, witness: None }
    }

    pub fn in_dual_coordinates(mut self) -> ConvexSet {
        self.coordinates = Coordinates::Dual;
        self
    }

    pub fn with_witness(mut self, point: SpacePoint, interior: bool) -> ConvexSet {
        self.witness = Some(SetWitness { point, interior });
        self
    }

    pub fn hyperplane(a: SpacePoint, b: f64) -> Result<ConvexSet> {
        let n2 = pairing(&a, &a)?;
        if n2 <= 0.0 {
            return Err(Error::Validation("hyperplane normal must be nonzero".into()));
        }
        let witness = a.scale(b / n2);
        let space = a.space.clone();
        Ok(ConvexSet::new(space, SetVariant::Hyperplane { a, b })
            .with_witness(witness, false))
    }

    pub fn halfspace(a: SpacePoint, b: f64) -> Result<ConvexSet> {
        let n2 = pairing(&a, &a)?;
        if n2 <= 0.0 {
            return Err(Error::Validation("halfspace normal must be nonzero".into()));
        }
        let witness = a.scale((b - 1.0) / n2);
        let space = a.space.clone();
        Ok(ConvexSet::new(space, SetVariant::Halfspace { a, b })
            .with_witness(witness, true))
    }

    pub fn affine(rows: Vec<SpacePoint>, b: Vec<f64>) -> Result<ConvexSet> {
        if rows.is_empty() || rows.len() != b.len() {
            return Err(Error::Shape("affine set needs matching rows and rhs".into()));
        }
        let g = gram(&rows)?;
        let scale = g.diagonal().amax().max(1.0);
        let eig = g.clone().symmetric_eigen();
        if eig.eigenvalues.iter().any(|v| *v < 1e-10 * scale) {
            return Err(Error::Validation("affine rows must be independent".into()));
        }
        // Least-norm witness Σ cᵢ aᵢ with G c = b.
        let c = gram_solve(&g, &DVector::from_vec(b.clone()))?;
        let mut w = SpacePoint::zeros(&rows[0].space);
        for (ci, row) in c.iter().zip(rows.iter()) {
            w.axpy(*ci, row);
        }
        let space = rows[0].space.clone();
        Ok(ConvexSet::new(space, SetVariant::Affine { rows, b }).with_witness(w, false))
    }

    pub fn box_bounds(space: SpaceDescriptor, lower: Vec<f64>, upper: Vec<f64>) -> Result<ConvexSet> {
        if space.kind != SpaceKind::Vector {
            return Err(Error::Unsupported("box sets act on vector spaces".into()));
        }
        if lower.len() != space.n || upper.len() != space.n {
            return Err(Error::Shape("box bounds must match the dimension".into()));
        }
        if lower.iter().zip(upper.iter()).any(|(l, u)| l > u) {
            return Err(Error::Validation("box needs lower ≤ upper".into()));
        }
        let mid: Vec<f64> = lower
            .iter()
            .zip(upper.iter())
            .map(|(l, u)| match (l.is_finite(), u.is_finite()) {
                (true, true) => 0.5 * (l + u),
                (true, false) => l + 1.0,
                (false, true) => u - 1.0,
                (false, false) => 0.0,
            })
            .collect();
        let interior = lower.iter().zip(upper.iter()).all(|(l, u)| u > l);
        let w = SpacePoint::from_vec(&space, mid)?;
        Ok(ConvexSet::new(space, SetVariant::Box { lower, upper }).with_witness(w, interior))
    }

    pub fn simplex(space: SpaceDescriptor, total: f64) -> Result<ConvexSet> {
        if space.kind != SpaceKind::Vector {
            return Err(Error::Unsupported("simplex sets act on vector spaces".into()));
        }
        if !(total > 0.0) {
            return Err(Error::Validation("simplex total must be positive".into()));
        }
        let w = SpacePoint::from_vec(&space, vec![total / space.n as f64; space.n])?;
        Ok(ConvexSet::new(space, SetVariant::Simplex { total }).with_witness(w, true))
    }

    pub fn norm_ball(center: SpacePoint, radius: f64) -> Result<ConvexSet> {
        if !(radius > 0.0) {
            return Err(Error::Validation("ball radius must be positive".into()));
        }
        let space = center.space.clone();
        let w = center.clone();
        Ok(ConvexSet::new(space, SetVariant::NormBall { center, radius })
            .with_witness(w, true))
    }

    pub fn cone(space: SpaceDescriptor, cone: ConeSet) -> Result<ConvexSet> {
        let w = SpacePoint::zeros(&space);
        Ok(ConvexSet::new(space, SetVariant::Cone(cone)).with_witness(w, false))
    }

    /// Nonnegative orthant as a finitely generated cone on the basis.
    pub fn orthant(space: SpaceDescriptor) -> Result<ConvexSet> {
        if space.kind != SpaceKind::Vector {
            return Err(Error::Unsupported("orthant cones act on vector spaces".into()));
        }
        let gens = (0..space.n)
            .map(|i| {
                let mut v = vec![0.0; space.n];
                v[i] = 1.0;
                SpacePoint::from_vec(&space, v).expect("basis vector is valid")
            })
            .collect();
        ConvexSet::cone(space, ConeSet::Generators(gens))
    }

    pub fn psd_trace_slice(space: SpaceDescriptor, total: f64) -> Result<ConvexSet> {
        if space.kind != SpaceKind::HermitianMatrix {
            return Err(Error::Unsupported("PSD slices act on Hermitian spaces".into()));
        }
        if !(total > 0.0) {
            return Err(Error::Validation("trace slice total must be positive".into()));
        }
        let diag = vec![total / space.n as f64; space.n];
        let w = SpacePoint::from_diagonal(&space, &diag)?;
        Ok(ConvexSet::new(space, SetVariant::PsdTraceSlice { total }).with_witness(w, false))
    }

    pub fn intersection(parts: Vec<ConvexSet>) -> Result<ConvexSet> {
        let space = parts
            .first()
            .map(|p| p.space.clone())
            .ok_or_else(|| Error::Validation("intersection needs components".into()))?;
        for p in &parts {
            if !p.space.same_coordinates(&space) {
                return Err(Error::Shape("intersection components live on different spaces".into()));
            }
            if p.coordinates != Coordinates::Primal {
                return Err(Error::Unsupported(
                    "intersection components must share primal coordinates".into(),
                ));
            }
        }
        Ok(ConvexSet::new(space, SetVariant::Intersection(parts)))
    }

    /// Membership within `tol` on every defining residual.
    pub fn contains(&self, x: &SpacePoint, tol: f64) -> Result<bool> {
        Ok(match &self.variant {
            SetVariant::Hyperplane { a, b } => (pairing(a, x)? - b).abs() <= tol,
            SetVariant::Halfspace { a, b } => pairing(a, x)? - b <= tol,
            SetVariant::Affine { rows, b } => rows
                .iter()
                .zip(b.iter())
                .map(|(a, bi)| (pairing(a, x).unwrap_or(f64::INFINITY) - bi).abs())
                .fold(0.0f64, f64::max)
                <= tol,
            SetVariant::Box { lower, upper } => {
                let v = x.data.as_vector();
                v.iter()
                    .zip(lower.iter().zip(upper.iter()))
                    .all(|(t, (l, u))| *t >= l - tol && *t <= u + tol)
            }
            SetVariant::Simplex { total } => {
                let v = x.data.as_vector();
                v.iter().all(|t| *t >= -tol) && (v.iter().sum::<f64>() - total).abs() <= tol
            }
            SetVariant::NormBall { center, radius } => x.sub(center).euclid_norm() <= radius + tol,
            SetVariant::Cone(c) => match c {
                ConeSet::Generators(_) => {
                    self.euclidean_project(x)?.sub(x).euclid_norm() <= tol
                }
                ConeSet::Inequalities(hs) => {
                    hs.iter().all(|h| pairing(h, x).unwrap_or(f64::INFINITY) <= tol)
                }
                ConeSet::Subspace(_) => self.euclidean_project(x)?.sub(x).euclid_norm() <= tol,
                ConeSet::SubspaceComplement(gs) => {
                    gs.iter().all(|g| pairing(g, x).unwrap_or(f64::INFINITY).abs() <= tol)
                }
            },
            SetVariant::PsdTraceSlice { total } => {
                let (eigs, _) = eigen_sorted(x)?;
                eigs.iter().all(|t| *t >= -tol)
                    && (eigs.iter().sum::<f64>() - total).abs() <= tol
            }
            SetVariant::Intersection(parts) => {
                let mut ok = true;
                for p in parts {
                    ok &= p.contains(x, tol)?;
                }
                ok
            }
        })
    }

    /// Exact Euclidean (Frobenius) metric projection onto the set.
    pub fn euclidean_project(&self, x: &SpacePoint) -> Result<SpacePoint> {
        if self.coordinates != Coordinates::Primal {
            return Err(Error::Unsupported(
                "euclidean_project acts on primal-coordinate sets".into(),
            ));
        }
        match &self.variant {
            SetVariant::Hyperplane { a, b } => {
                let shift = (pairing(a, x)? - b) / pairing(a, a)?;
                let mut out = x.clone();
                out.axpy(-shift, a);
                Ok(out)
            }
            SetVariant::Halfspace { a, b } => {
                let v = pairing(a, x)?;
                if v <= *b {
                    Ok(x.clone())
                } else {
                    let shift = (v - b) / pairing(a, a)?;
                    let mut out = x.clone();
                    out.axpy(-shift, a);
                    Ok(out)
                }
            }
            SetVariant::Affine { rows, b } => {
                let g = gram(rows)?;
                let r = DVector::from_iterator(
                    rows.len(),
                    rows.iter().zip(b.iter()).map(|(a, bi)| pairing(a, x).unwrap() - bi),
                );
                let c = gram_solve(&g, &r)?;
                let mut out = x.clone();
                for (ci, row) in c.iter().zip(rows.iter()) {
                    out.axpy(-*ci, row);
                }
                Ok(out)
            }
            SetVariant::Box { lower, upper } => {
                let v = x.data.as_vector();
                let out: Vec<f64> = v
                    .iter()
                    .zip(lower.iter().zip(upper.iter()))
                    .map(|(t, (l, u))| t.max(*l).min(*u))
                    .collect();
                SpacePoint::from_vec(&x.space, out)
            }
            SetVariant::Simplex { total } => {
                let v = x.data.as_vector().as_slice().to_vec();
                SpacePoint::from_vec(&x.space, project_simplex(&v, *total))
            }
            SetVariant::NormBall { center, radius } => {
                let d = x.sub(center);
                let n = d.euclid_norm();
                if n <= *radius {
                    Ok(x.clone())
                } else {
                    let mut out = center.clone();
                    out.axpy(radius / n, &d);
                    Ok(out)
                }
            }
            SetVariant::Cone(c) => match c {
                ConeSet::Generators(gens) => project_generated_cone(gens, x),
                ConeSet::Inequalities(hs) => {
                    // Moreau: P_{K°}(x) = x − P_K(x) for K = cone(hs).
                    let onto_gen = project_generated_cone(hs, x)?;
                    Ok(x.sub(&onto_gen))
                }
                ConeSet::Subspace(gens) => project_span(gens, x),
                ConeSet::SubspaceComplement(gens) => {
                    let onto = project_span(gens, x)?;
                    Ok(x.sub(&onto))
                }
            },
            SetVariant::PsdTraceSlice { total } => {
                let (eigs, basis) = eigen_sorted(x)?;
                let lam = project_simplex(eigs.as_slice(), *total);
                Ok(SpacePoint {
                    space: x.space.clone(),
                    data: PointData::Matrix(matrix_from_eigen(&basis, &lam)),
                })
            }
            SetVariant::Intersection(parts) => {
                // All-affine stacks solve in closed form; general mixes run
                // Dykstra to numerical convergence (exact limit for convex
                // components).
                let mut rows = Vec::new();
                let mut rhs = Vec::new();
                let mut all_affine = true;
                for p in parts {
                    match &p.variant {
                        SetVariant::Hyperplane { a, b } => {
                            rows.push(a.clone());
                            rhs.push(*b);
                        }
                        SetVariant::Affine { rows: r, b } => {
                            rows.extend(r.iter().cloned());
                            rhs.extend(b.iter().cloned());
                        }
                        _ => {
                            all_affine = false;
                            break;
                        }
                    }
                }
                if all_affine {
                    return ConvexSet::affine(rows, rhs)?.euclidean_project(x);
                }
                dykstra_project(parts, x, 20_000, 1e-13)
            }
        }
    }

    /// Polar cone K° = {y : ⟨x, y⟩ ≤ 0 ∀x ∈ K}; for a linear subspace the
    /// annihilator K^⊥.
    pub fn polar_cone(&self) -> Result<ConvexSet> {
        let cone = match &self.variant {
            SetVariant::Cone(c) => c,
            _ => {
                return Err(Error::Unsupported(
                    "polar_cone is defined for cone sets".into(),
                ))
            }
        };
        let polar = match cone {
            ConeSet::Generators(g) => ConeSet::Inequalities(g.clone()),
            ConeSet::Inequalities(h) => ConeSet::Generators(h.clone()),
            ConeSet::Subspace(g) => ConeSet::SubspaceComplement(g.clone()),
            ConeSet::SubspaceComplement(g) => ConeSet::Subspace(g.clone()),
        };
        ConvexSet::cone(self.space.clone(), polar)
    }

    /// Witness point, as an error when missing.
    pub fn witness_point(&self) -> Result<&SpacePoint> {
        self.witness
            .as_ref()
            .map(|w| &w.point)
            .ok_or_else(|| Error::Precondition("set carries no feasibility witness".into()))
    }
}

/// Projection onto {x ≥ 0, Σx = s} by the sorted-threshold rule. The sort is
/// stable, so equal entries keep input order.
pub fn project_simplex(v: &[f64], s: f64) -> Vec<f64> {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).expect("finite entries"));
    let mut css = 0.0;
    let mut rho = 0;
    let mut theta = 0.0;
    for (k, uk) in u.iter().enumerate() {
        css += uk;
        let t = (css - s) / (k + 1) as f64;
        if uk - t > 0.0 {
            rho = k + 1;
            theta = t;
        }
    }
    debug_assert!(rho > 0);
    v.iter().map(|t| (t - theta).max(0.0)).collect()
}

/// Projection onto cone{gens} by projected gradient on the coefficient
/// problem min ‖Σ tᵢgᵢ − x‖², t ≥ 0 (exact in one step for orthonormal
/// generator sets).
fn project_generated_cone(gens: &[SpacePoint], x: &SpacePoint) -> Result<SpacePoint> {
    if gens.is_empty() {
        return Ok(SpacePoint::zeros(&x.space));
    }
    if gens.len() == 1 {
        let g = &gens[0];
        let t = (pairing(g, x)? / pairing(g, g)?).max(0.0);
        return Ok(g.scale(t));
    }
    let m = gens.len();
    let g = gram(gens)?;
    let lip = g.clone().symmetric_eigen().eigenvalues.amax().max(1e-12);
    let q = DVector::from_iterator(m, gens.iter().map(|gi| pairing(gi, x).unwrap()));
    let mut t = DVector::zeros(m);
    let step = 1.0 / lip;
    for _ in 0..200_000 {
        let grad = &g * &t - &q;
        let mut t_next = &t - grad.scale(step);
        t_next.iter_mut().for_each(|v| *v = v.max(0.0));
        let moved = (&t_next - &t).norm();
        t = t_next;
        if moved <= 1e-14 * (1.0 + t.norm()) {
            break;
        }
    }
    let mut out = SpacePoint::zeros(&x.space);
    for (ti, gi) in t.iter().zip(gens.iter()) {
        out.axpy(*ti, gi);
    }
    Ok(out)
}

fn project_span(gens: &[SpacePoint], x: &SpacePoint) -> Result<SpacePoint> {
    if gens.is_empty() {
        return Ok(SpacePoint::zeros(&x.space));
    }
    let g = gram(gens)?;
    // Regularize tiny dependent directions away.
    let eig = g.clone().symmetric_eigen();
    let scale = eig.eigenvalues.amax().max(1e-300);
    let mut inv_vals = eig.eigenvalues.clone();
    inv_vals.iter_mut().for_each(|v| {
        *v = if *v > 1e-12 * scale { 1.0 / *v } else { 0.0 };
    });
    let pinv = &eig.eigenvectors * DMatrix::from_diagonal(&inv_vals) * eig.eigenvectors.transpose();
    let q = DVector::from_iterator(gens.len(), gens.iter().map(|gi| pairing(gi, x).unwrap()));
    let c = pinv * q;
    let mut out = SpacePoint::zeros(&x.space);
    for (ci, gi) in c.iter().zip(gens.iter()) {
        out.axpy(*ci, gi);
    }
    Ok(out)
}

/// Dykstra's algorithm with correction vectors: converges to the exact
/// metric projection onto an intersection of closed convex sets.
pub fn dykstra_project(
    parts: &[ConvexSet],
    x: &SpacePoint,
    max_sweeps: usize,
    tol: f64,
) -> Result<SpacePoint> {
    let mut z = x.clone();
    let mut corrections: Vec<SpacePoint> =
        parts.iter().map(|_| SpacePoint::zeros(&x.space)).collect();
    for _ in 0..max_sweeps {
        let mut moved = 0.0f64;
        for (p, corr) in parts.iter().zip(corrections.iter_mut()) {
            let y = z.add(corr);
            let proj = p.euclidean_project(&y)?;
            *corr = y.sub(&proj);
            moved = moved.max(proj.sub(&z).euclid_norm());
            z = proj;
        }
        if moved <= tol * (1.0 + z.euclid_norm()) {
            break;
        }
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use crate::spaces::NormSpec;

    fn vecp(space: &SpaceDescriptor, xs: &[f64]) -> SpacePoint {
        SpacePoint::from_vec(space, xs.to_vec()).unwrap()
    }

    #[test]
    fn contains_examples() {
        let s = SpaceDescriptor::euclidean(2);
        let simplex = ConvexSet::simplex(s.clone(), 1.0).unwrap();
        assert!(simplex.contains(&vecp(&s, &[0.5, 0.5]), 1e-10).unwrap());

        let hs = ConvexSet::halfspace(vecp(&s.dual(), &[1.0, 0.0]), 0.0).unwrap();
        assert!(!hs.contains(&vecp(&s, &[1e-3, 0.0]), 1e-6).unwrap());

        let m = SpaceDescriptor::frobenius(2);
        let slice = ConvexSet::psd_trace_slice(m.clone(), 1.0).unwrap();
        let half_id = SpacePoint::from_diagonal(&m, &[0.5, 0.5]).unwrap();
        assert!(slice.contains(&half_id, 1e-10).unwrap());
    }

    #[test]
    fn project_examples() {
        let s = SpaceDescriptor::euclidean(2);
        let hs = ConvexSet::halfspace(vecp(&s.dual(), &[1.0, 0.0]), 0.0).unwrap();
        let p = hs.euclidean_project(&vecp(&s, &[2.0, 3.0])).unwrap();
        assert!(p.sub(&vecp(&s, &[0.0, 3.0])).euclid_norm() < 1e-14);

        let simplex = ConvexSet::simplex(s.clone(), 1.0).unwrap();
        let p = simplex.euclidean_project(&vecp(&s, &[2.0, 2.0])).unwrap();
        assert!(p.sub(&vecp(&s, &[0.5, 0.5])).euclid_norm() < 1e-14);

        let m = SpaceDescriptor::frobenius(2);
        let slice = ConvexSet::psd_trace_slice(m.clone(), 1.0).unwrap();
        let x = SpacePoint::from_diagonal(&m, &[2.0, -1.0]).unwrap();
        let p = slice.euclidean_project(&x).unwrap();
        let expect = SpacePoint::from_diagonal(&m, &[1.0, 0.0]).unwrap();
        assert!(p.sub(&expect).euclid_norm() < 1e-12);
    }

    #[test]
    fn simplex_brute_force_oracle() {
        // Dense-grid check of the sorted-threshold rule in 2-D.
        let v = [0.7, -0.2];
        let p = project_simplex(&v, 1.0);
        let mut best = (f64::INFINITY, 0.0);
        let steps = 4000;
        for i in 0..=steps {
            let a = i as f64 / steps as f64;
            let d = (a - v[0]).powi(2) + ((1.0 - a) - v[1]).powi(2);
            if d < best.0 {
                best = (d, a);
            }
        }
        assert!((p[0] - best.1).abs() < 1e-3);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polar_cone_examples() {
        let s = SpaceDescriptor::euclidean(2);
        let orthant = ConvexSet::orthant(s.clone()).unwrap();
        let polar = orthant.polar_cone().unwrap();
        assert!(polar.contains(&vecp(&s, &[-1.0, -2.0]), 1e-10).unwrap());
        assert!(!polar.contains(&vecp(&s, &[0.5, -2.0]), 1e-10).unwrap());

        let ray = ConvexSet::cone(
            s.clone(),
            ConeSet::Generators(vec![vecp(&s, &[1.0, 1.0])]),
        )
        .unwrap();
        let hp = ray.polar_cone().unwrap();
        assert!(hp.contains(&vecp(&s, &[1.0, -2.0]), 1e-10).unwrap());
        assert!(!hp.contains(&vecp(&s, &[1.0, 0.0]), 1e-10).unwrap());

        let s3 = SpaceDescriptor::euclidean(3);
        let line = ConvexSet::cone(
            s3.clone(),
            ConeSet::Subspace(vec![vecp(&s3, &[1.0, 0.0, 0.0])]),
        )
        .unwrap();
        let ann = line.polar_cone().unwrap();
        assert!(ann.contains(&vecp(&s3, &[0.0, 2.0, -1.0]), 1e-10).unwrap());
        assert!(!ann.contains(&vecp(&s3, &[0.1, 2.0, -1.0]), 1e-10).unwrap());
    }

    #[test]
    fn polar_of_polar_recovers_generators() {
        let s = SpaceDescriptor::euclidean(3);
        let gens = vec![
            vecp(&s, &[1.0, 0.2, 0.0]),
            vecp(&s, &[0.0, 1.0, 0.5]),
        ];
        let k = ConvexSet::cone(s.clone(), ConeSet::Generators(gens.clone())).unwrap();
        let kpp = k.polar_cone().unwrap().polar_cone().unwrap();
        for g in &gens {
            assert!(kpp.contains(g, 1e-9).unwrap());
            assert!(kpp.euclidean_project(g).unwrap().sub(g).euclid_norm() < 1e-9);
        }
    }

    #[test]
    fn polar_duality_pairing() {
        let s = SpaceDescriptor::euclidean(3);
        let gens = vec![vecp(&s, &[1.0, 0.0, 0.3]), vecp(&s, &[0.2, 1.0, 0.0])];
        let k = ConvexSet::cone(s.clone(), ConeSet::Generators(gens)).unwrap();
        let polar = k.polar_cone().unwrap();
        for i in 0..200u64 {
            let mut rng = sampling::rng_for(7100, i);
            let a = sampling::gaussian_point(&s, 1.0, &mut rng);
            let xk = k.euclidean_project(&a).unwrap();
            let b = sampling::gaussian_point(&s, 1.0, &mut rng);
            let yk = polar.euclidean_project(&b).unwrap();
            assert!(pairing(&xk, &yk).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn moreau_decomposition_via_cone_projections() {
        let s = SpaceDescriptor::euclidean(3);
        let k = ConvexSet::orthant(s.clone()).unwrap();
        let polar = k.polar_cone().unwrap();
        for i in 0..100u64 {
            let mut rng = sampling::rng_for(7200, i);
            let x = sampling::gaussian_point(&s, 1.0, &mut rng);
            let p = k.euclidean_project(&x).unwrap();
            let q = polar.euclidean_project(&x).unwrap();
            assert!(p.add(&q).sub(&x).euclid_norm() < 1e-10);
            assert!(pairing(&p, &q).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn projection_firmly_nonexpansive_and_idempotent() {
        let s = SpaceDescriptor::euclidean(3);
        let m = SpaceDescriptor::frobenius(2);
        let sets = vec![
            ConvexSet::hyperplane(vecp(&s.dual(), &[1.0, 2.0, -1.0]), 0.7).unwrap(),
            ConvexSet::halfspace(vecp(&s.dual(), &[1.0, 0.0, 1.0]), 0.2).unwrap(),
            ConvexSet::box_bounds(s.clone(), vec![-1.0; 3], vec![1.0; 3]).unwrap(),
            ConvexSet::simplex(s.clone(), 1.0).unwrap(),
            ConvexSet::norm_ball(vecp(&s, &[0.3, 0.0, 0.0]), 0.8).unwrap(),
            ConvexSet::orthant(s.clone()).unwrap(),
            ConvexSet::affine(
                vec![vecp(&s.dual(), &[1.0, 1.0, 0.0]), vecp(&s.dual(), &[0.0, 1.0, 1.0])],
                vec![1.0, 0.5],
            )
            .unwrap(),
        ];
        for (ki, k) in sets.iter().enumerate() {
            for i in 0..100u64 {
                let mut rng = sampling::rng_for(7300 + ki as u64, i);
                let x = sampling::gaussian_point(&s, 2.0, &mut rng);
                let y = sampling::gaussian_point(&s, 2.0, &mut rng);
                let px = k.euclidean_project(&x).unwrap();
                let py = k.euclidean_project(&y).unwrap();
                assert!(k.contains(&px, 1e-9).unwrap(), "set {ki}");
                // Idempotence.
                assert!(
                    k.euclidean_project(&px).unwrap().sub(&px).euclid_norm() < 1e-9,
                    "set {ki}"
                );
                // Firm nonexpansiveness: ‖Px−Py‖² ≤ ⟨Px−Py, x−y⟩.
                let d = px.sub(&py);
                assert!(
                    d.euclid_norm().powi(2) <= pairing(&d, &x.sub(&y)).unwrap() + 1e-10,
                    "set {ki}"
                );
            }
        }
        // Matrix variant.
        let slice = ConvexSet::psd_trace_slice(m.clone(), 1.0).unwrap();
        for i in 0..100u64 {
            let mut rng = sampling::rng_for(7400, i);
            let x = sampling::gaussian_point(&m, 1.0, &mut rng);
            let y = sampling::gaussian_point(&m, 1.0, &mut rng);
            let px = slice.euclidean_project(&x).unwrap();
            let py = slice.euclidean_project(&y).unwrap();
            assert!(slice.contains(&px, 1e-9).unwrap());
            let d = px.sub(&py);
            assert!(d.euclid_norm().powi(2) <= pairing(&d, &x.sub(&y)).unwrap() + 1e-10);
        }
    }

    #[test]
    fn intersection_all_affine_stacks() {
        let s = SpaceDescriptor::euclidean(3);
        let h1 = ConvexSet::hyperplane(vecp(&s.dual(), &[1.0, 0.0, 0.0]), 1.0).unwrap();
        let h2 = ConvexSet::hyperplane(vecp(&s.dual(), &[0.0, 1.0, 0.0]), 2.0).unwrap();
        let inter = ConvexSet::intersection(vec![h1, h2]).unwrap();
        let p = inter.euclidean_project(&vecp(&s, &[5.0, 5.0, 7.0])).unwrap();
        assert!(p.sub(&vecp(&s, &[1.0, 2.0, 7.0])).euclid_norm() < 1e-12);
    }

    #[test]
    fn intersection_dykstra_matches_closed_form() {
        // Halfspace ∩ ball where the closed-form answer is known.
        let s = SpaceDescriptor::euclidean(2);
        let hs = ConvexSet::halfspace(vecp(&s.dual(), &[0.0, 1.0]), 0.0).unwrap();
        let ball = ConvexSet::norm_ball(vecp(&s, &[0.0, 0.0]), 1.0).unwrap();
        let inter = ConvexSet::intersection(vec![hs, ball]).unwrap();
        let p = inter.euclidean_project(&vecp(&s, &[3.0, 4.0])).unwrap();
        // Clip to the lower halfplane then to the ball: (3,0) → (1,0).
        assert!(p.sub(&vecp(&s, &[1.0, 0.0])).euclid_norm() < 1e-8);
    }

    #[test]
    fn affine_rejects_dependent_rows() {
        let s = SpaceDescriptor::euclidean(3);
        let r = ConvexSet::affine(
            vec![vecp(&s.dual(), &[1.0, 1.0, 0.0]), vecp(&s.dual(), &[2.0, 2.0, 0.0])],
            vec![1.0, 2.0],
        );
        assert!(r.is_err());
    }

    #[test]
    fn weighted_norm_space_sets_work() {
        // Sets are metric objects: the space's own norm plays no role in the
        // Euclidean oracles.
        let s = SpaceDescriptor::vector(4, NormSpec::p(3.0)).unwrap();
        let sx = ConvexSet::simplex(s.clone(), 2.0).unwrap();
        let p = sx.euclidean_project(&vecp(&s, &[3.0, -1.0, 0.5, 0.5])).unwrap();
        assert!(sx.contains(&p, 1e-10).unwrap());
    }
}
