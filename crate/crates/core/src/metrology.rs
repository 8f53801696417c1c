//! Empirical measurement of the geometric quantities the continuity theory
//! is stated in: Hölder exponents of point maps, convexity and smoothness
//! moduli of norms, monotonicity strength of duality maps, and
//! total-convexity moduli.
//!
//! All measurements are randomized searches with local polishing, seeded and
//! deterministic. Inf-type quantities are reported as certified upper
//! bounds, sup-type ones as lower bounds; fitted slopes check CONSISTENCY
//! with the predicted exponents (the theory provides one-sided bounds, so a
//! measured slope may exceed its prediction).


use rand_chacha::ChaCha8Rng;

use crate::divergence::bregman;
use crate::error::Result;
use crate::potentials::Potential;
use crate::sampling;
use crate::spaces::{norm, NormSpec, SpaceDescriptor, SpacePoint};

/// Least-squares slope of y against x.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in points {
        num += (x - mx) * (y - my);
        den += (x - mx) * (x - mx);
    }
    num / den
}

fn fit_intercept(points: &[(f64, f64)], slope: f64) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    my - slope * mx
}

/// Max relative error of analytic gradients against central finite
/// differences over a step ladder (the best step per probe counts).
pub fn gradient_check(
    psi: &Potential,
    sampler: &mut dyn FnMut(&mut ChaCha8Rng) -> SpacePoint,
    samples: usize,
    steps: &[f64],
    seed: u64,
) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..samples {
        let mut rng = sampling::rng_for(seed, i as u64);
        let x = sampler(&mut rng);
        let ev = psi.eval(&x)?;
        let g = match ev.gradient {
            Some(g) => g,
            None => continue,
        };
        let scale = g.euclid_norm().max(1.0);
        for _ in 0..4 {
            let d = sampling::gaussian_point(&x.space, 1.0, &mut rng);
            let d = d.scale(1.0 / d.euclid_norm().max(1e-300));
            let expected = crate::spaces::pairing(&d, &g)?;
            let mut best = f64::INFINITY;
            for h in steps {
                let mut xp = x.clone();
                xp.axpy(*h, &d);
                let mut xm = x.clone();
                xm.axpy(-*h, &d);
                let (fp, fm) = (psi.eval(&xp)?.value, psi.eval(&xm)?.value);
                if fp.is_finite() && fm.is_finite() {
                    let fd = (fp - fm) / (2.0 * h);
                    best = best.min((fd - expected).abs() / scale);
                }
            }
            if best.is_finite() {
                worst = worst.max(best);
            }
        }
    }
    Ok(worst)
}

/// Hölder-continuity measurement of a point map.
#[derive(Clone, Debug)]
pub struct HolderReport {
    /// Log-log slope fitted on the finest distance decile.
    pub exponent: f64,
    /// exp(intercept) of the same fit.
    pub constant: f64,
    /// Max of ‖f(x)−f(y)‖ / ‖x−y‖^t for the predicted exponent t (NaN when
    /// no prediction was supplied).
    pub max_ratio: f64,
    /// Growth of the per-scale max ratio relative to the coarsest scale:
    /// ratios must not diverge as distances shrink, which is the desk-scale
    /// reading of the one-sided Hölder bound at the predicted exponent.
    pub ratio_drift: f64,
    pub samples: usize,
    pub distance_range: (f64, f64),
    pub seed: u64,
}

pub struct HolderConfig {
    /// Geometric perturbation scales (e.g. 1e-1 … 1e-6 of the domain scale).
    pub scales: Vec<f64>,
    pub pairs_per_scale: usize,
    pub predicted_exponent: Option<f64>,
    pub seed: u64,
}

/// Measure the Hölder behavior of `map` on pairs (x, x+δ) produced by the
/// samplers, with distances taken by the supplied metrics.
pub fn estimate_holder(
    map: &dyn Fn(&SpacePoint) -> Result<SpacePoint>,
    base: &mut dyn FnMut(&mut ChaCha8Rng) -> SpacePoint,
    perturb: &mut dyn FnMut(&SpacePoint, f64, &mut ChaCha8Rng) -> SpacePoint,
    dist_in: &dyn Fn(&SpacePoint, &SpacePoint) -> f64,
    dist_out: &dyn Fn(&SpacePoint, &SpacePoint) -> f64,
    cfg: &HolderConfig,
) -> Result<HolderReport> {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    let mut per_scale_ratio: Vec<f64> = Vec::new();
    let mut dmin = f64::INFINITY;
    let mut dmax = 0.0f64;
    for scale in cfg.scales.iter() {
        let mut scale_ratio = 0.0f64;
        for i in 0..cfg.pairs_per_scale {
            // One family per index i: the rng state is scale-independent, so
            // each family keeps its base point and direction across scales
            // and the log-log points of a family trace out the exponent.
            let mut rng = sampling::rng_for(cfg.seed, i as u64);
            let x = base(&mut rng);
            let y = perturb(&x, *scale, &mut rng);
            let dx = dist_in(&x, &y);
            if !(dx.is_finite() && dx > 0.0) {
                continue;
            }
            let fx = map(&x)?;
            let fy = map(&y)?;
            let dy = dist_out(&fx, &fy);
            if !(dy.is_finite() && dy > 0.0) {
                continue;
            }
            dmin = dmin.min(dx);
            dmax = dmax.max(dx);
            pts.push((dx.ln(), dy.ln()));
            if let Some(t) = cfg.predicted_exponent {
                scale_ratio = scale_ratio.max(dy / dx.powf(t));
            }
        }
        if cfg.predicted_exponent.is_some() && scale_ratio > 0.0 {
            per_scale_ratio.push(scale_ratio);
        }
    }
    // Finest decades of the distance range: enough lever arm for the fit
    // while staying within the asymptotic regime.
    let mut sorted = pts.clone();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let cut = sorted.first().map(|p| p.0).unwrap_or(0.0) + 1.5 * 10f64.ln();
    let mut tail: Vec<(f64, f64)> = sorted.iter().cloned().filter(|p| p.0 <= cut).collect();
    if tail.len() < 4 {
        tail = sorted.clone();
    }
    let slope = fit_slope(&tail);
    let intercept = fit_intercept(&tail, slope);
    let (max_ratio, drift) = if per_scale_ratio.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        let hi = per_scale_ratio.iter().cloned().fold(0.0f64, f64::max);
        // cfg.scales runs coarse → fine: divergence means finer scales
        // exceed the coarsest baseline.
        let baseline = per_scale_ratio[0];
        (hi, hi / baseline)
    };
    Ok(HolderReport {
        exponent: slope,
        constant: intercept.exp(),
        max_ratio,
        ratio_drift: drift,
        samples: pts.len(),
        distance_range: (dmin, dmax),
        seed: cfg.seed,
    })
}

/// Measured modulus (δ of convexity or ρ of smoothness) over an ε grid with
/// a power-law fit. Raw values are kept unsorted; monotonicity is a property
/// of the true moduli, not enforced on measurements.
#[derive(Clone, Debug)]
pub struct ModulusReport {
    pub eps: Vec<f64>,
    pub values: Vec<f64>,
    pub fitted_exponent: f64,
    pub seed: u64,
}

/// Randomized inf-search for the modulus of convexity
/// δ(ε) = inf{1 − ½‖x+y‖ : x, y ∈ S, ‖x−y‖ ≥ ε} with local polishing of the
/// (point, direction) pair; reported values are certified upper bounds of δ.
/// Schatten spaces also search their diagonal (vector-embedded) sections.
pub fn convexity_modulus(
    space: &SpaceDescriptor,
    eps_grid: &[f64],
    budget: usize,
    seed: u64,
) -> ModulusReport {
    let mut values = Vec::new();
    for (ei, eps) in eps_grid.iter().enumerate() {
        let value_of = |x: &SpacePoint, d: &SpacePoint| -> Option<f64> {
            let y = partner_at_distance(space, x, d, *eps)?;
            Some(1.0 - 0.5 * norm(space, &x.add(&y)))
        };
        let mut best = f64::INFINITY;
        let mut best_pair: Option<(SpacePoint, SpacePoint)> = None;
        for i in 0..budget {
            let mut rng = sampling::rng_for(seed, (ei * budget + i) as u64);
            let x = sampling::sphere_point(space, &mut rng);
            let d = sampling::gaussian_point(space, 1.0, &mut rng);
            if let Some(v) = value_of(&x, &d) {
                if v < best {
                    best = v;
                    best_pair = Some((x, d));
                }
            }
        }
        if let Some((mut x, mut d)) = best_pair {
            let mut rng = sampling::rng_for(seed ^ 0x5151, ei as u64);
            for round in 0..600 {
                let sigma = 0.4 / (1.0 + round as f64 / 40.0);
                let cx = {
                    let p = x.add(&sampling::gaussian_point(space, sigma, &mut rng));
                    p.scale(1.0 / norm(space, &p))
                };
                let cd = d.add(&sampling::gaussian_point(space, sigma, &mut rng));
                if let Some(v) = value_of(&cx, &cd) {
                    if v < best {
                        best = v;
                        x = cx;
                        d = cd;
                    }
                }
            }
        }
        values.push(best);
    }
    // Diagonal sections of a Schatten space realize the vector p-norm
    // configurations; any candidate is a valid upper bound for the inf.
    if let (NormSpec::SchattenP { p }, n) = (&space.norm, space.n) {
        let vec_space = SpaceDescriptor::vector(n, NormSpec::p(*p)).unwrap();
        let inner = convexity_modulus(&vec_space, eps_grid, budget, seed ^ 0xd1a6);
        for (v, iv) in values.iter_mut().zip(inner.values.iter()) {
            *v = v.min(*iv);
        }
    }
    let pts: Vec<(f64, f64)> = eps_grid
        .iter()
        .zip(values.iter())
        .filter(|(_, v)| **v > 0.0)
        .map(|(e, v)| (e.ln(), v.ln()))
        .collect();
    ModulusReport { eps: eps_grid.to_vec(), values, fitted_exponent: fit_slope(&pts), seed }
}

/// y on the unit sphere with ‖x − y‖ = ε, found by bisection along the
/// normalized path through direction d.
fn partner_at_distance(
    space: &SpaceDescriptor,
    x: &SpacePoint,
    d: &SpacePoint,
    eps: f64,
) -> Option<SpacePoint> {
    let y_at = |t: f64| {
        let p = x.add(&d.scale(t));
        let n = norm(space, &p);
        p.scale(1.0 / n)
    };
    let dist = |t: f64| norm(space, &x.sub(&y_at(t)));
    let mut hi = 1.0;
    let mut tries = 0;
    while dist(hi) < eps {
        hi *= 2.0;
        tries += 1;
        if tries > 60 {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if dist(mid) < eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y = y_at(0.5 * (lo + hi));
    ((norm(space, &x.sub(&y)) - eps).abs() < 1e-9 * (1.0 + eps)).then_some(y)
}

/// Randomized sup-search for the modulus of smoothness
/// ρ(ε) = sup{½(‖x+εy‖+‖x−εy‖) − 1 : x, y ∈ S}; reported values are lower
/// bounds of ρ.
pub fn smoothness_modulus(
    space: &SpaceDescriptor,
    eps_grid: &[f64],
    budget: usize,
    seed: u64,
) -> ModulusReport {
    let mut values = Vec::new();
    for (ei, eps) in eps_grid.iter().enumerate() {
        let mut best = 0.0f64;
        let mut best_pair: Option<(SpacePoint, SpacePoint)> = None;
        let value = |x: &SpacePoint, y: &SpacePoint| {
            0.5 * (norm(space, &x.add(&y.scale(*eps))) + norm(space, &x.sub(&y.scale(*eps))))
                - 1.0
        };
        for i in 0..budget {
            let mut rng = sampling::rng_for(seed, (ei * budget + i) as u64);
            let x = sampling::sphere_point(space, &mut rng);
            let y = sampling::sphere_point(space, &mut rng);
            let v = value(&x, &y);
            if v > best {
                best = v;
                best_pair = Some((x, y));
            }
        }
        if let Some((mut x, mut y)) = best_pair {
            let mut rng = sampling::rng_for(seed ^ 0xa5a5, ei as u64);
            for round in 0..300 {
                let sigma = 0.3 / (1.0 + round as f64 / 30.0);
                let cx = {
                    let p = x.add(&sampling::gaussian_point(space, sigma, &mut rng));
                    p.scale(1.0 / norm(space, &p))
                };
                let cy = {
                    let p = y.add(&sampling::gaussian_point(space, sigma, &mut rng));
                    p.scale(1.0 / norm(space, &p))
                };
                let v = value(&cx, &cy);
                if v > best {
                    best = v;
                    x = cx;
                    y = cy;
                }
            }
        }
        values.push(best);
    }
    // Diagonal sections give vector p-norm lower bounds for the sup.
    if let (NormSpec::SchattenP { p }, n) = (&space.norm, space.n) {
        let vec_space = SpaceDescriptor::vector(n, NormSpec::p(*p)).unwrap();
        let inner = smoothness_modulus(&vec_space, eps_grid, budget, seed ^ 0xd1a7);
        for (v, iv) in values.iter_mut().zip(inner.values.iter()) {
            *v = v.max(*iv);
        }
    }
    let pts: Vec<(f64, f64)> = eps_grid
        .iter()
        .zip(values.iter())
        .filter(|(_, v)| **v > 0.0)
        .map(|(e, v)| (e.ln(), v.ln()))
        .collect();
    ModulusReport { eps: eps_grid.to_vec(), values, fitted_exponent: fit_slope(&pts), seed }
}

/// Monotonicity-strength measurement of a duality map.
#[derive(Clone, Debug)]
pub struct MonotonicityReport {
    /// c fitted as the smallest pairing ratio ⟨x−y, j(x)−j(y)⟩/‖x−y‖^r over
    /// all samples; positivity is the f-uniform monotonicity evidence.
    pub fitted_c: f64,
    /// min over all samples of ⟨x−y, j(x)−j(y)⟩ − c‖x−y‖^r.
    pub worst_slack: f64,
    /// Ratio of the split-half minimal ratios (≈1 when the infimum is
    /// stable under resampling).
    pub fit_stability: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Check f-uniform monotonicity of ∇Ψ with f(t) = c·t^{r−1}: c is the
/// smallest observed ratio; the split-half stability of that minimum is
/// reported alongside.
pub fn monotonicity_strength(
    psi: &Potential,
    r: f64,
    sampler: &mut dyn FnMut(&mut ChaCha8Rng) -> SpacePoint,
    samples: usize,
    seed: u64,
) -> Result<MonotonicityReport> {
    let mut ratios = Vec::with_capacity(samples);
    for i in 0..samples {
        let mut rng = sampling::rng_for(seed, i as u64);
        let x = sampler(&mut rng);
        let y = sampler(&mut rng);
        let diff = x.sub(&y);
        let nd = norm(&psi.space, &diff);
        if nd <= 1e-12 {
            continue;
        }
        let inner = crate::spaces::pairing(&diff, &psi.grad(&x)?.sub(&psi.grad(&y)?))?;
        ratios.push((inner, nd, inner / nd.powf(r)));
    }
    let fitted_c = ratios.iter().map(|t| t.2).fold(f64::INFINITY, f64::min);
    let worst_slack = ratios
        .iter()
        .map(|(inner, nd, _)| inner - fitted_c * nd.powf(r))
        .fold(f64::INFINITY, f64::min);
    let half = ratios.len() / 2;
    let c1 = ratios[..half].iter().map(|t| t.2).fold(f64::INFINITY, f64::min);
    let c2 = ratios[half..].iter().map(|t| t.2).fold(f64::INFINITY, f64::min);
    Ok(MonotonicityReport {
        fitted_c,
        worst_slack,
        fit_stability: c2 / c1,
        samples: ratios.len(),
        seed,
    })
}

/// Total-convexity modulus ν_Ψ(x, t) = inf{D⁺(y, x) : ‖y−x‖ = t}, measured
/// by a randomized direction sweep with polishing; upper bounds of ν.
pub fn total_convexity_modulus(
    psi: &Potential,
    x: &SpacePoint,
    t_grid: &[f64],
    budget: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    for (ti, t) in t_grid.iter().enumerate() {
        let mut best = f64::INFINITY;
        let mut best_dir: Option<SpacePoint> = None;
        let eval_dir = |d: &SpacePoint| -> Result<f64> {
            let nd = norm(&psi.space, d);
            if nd <= 1e-14 {
                return Ok(f64::INFINITY);
            }
            let y = x.add(&d.scale(t / nd));
            Ok(bregman(psi, &y, x)?.value)
        };
        for i in 0..budget {
            let mut rng = sampling::rng_for(seed, (ti * budget + i) as u64);
            let d = sampling::gaussian_point(&psi.space, 1.0, &mut rng);
            let v = eval_dir(&d)?;
            if v < best {
                best = v;
                best_dir = Some(d);
            }
        }
        if let Some(mut d) = best_dir {
            let mut rng = sampling::rng_for(seed ^ 0x77, ti as u64);
            for round in 0..300 {
                let sigma = 0.4 / (1.0 + round as f64 / 25.0);
                let cand = d.add(&sampling::gaussian_point(&psi.space, sigma, &mut rng));
                let v = eval_dir(&cand)?;
                if v < best {
                    best = v;
                    d = cand;
                }
            }
        }
        out.push((*t, best));
    }
    Ok(out)
}
