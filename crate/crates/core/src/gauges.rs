//! Gauge and quasigauge functions φ, the induced potentials
//! Ψ_φ(x) = ∫₀^{‖x‖} φ, their duality maps j_φ, conjugates, and generalized
//! inverses.
//!
//! All piecewise functions here are piecewise linear with optional upward
//! jumps, so every 1-D integral is evaluated in closed form; no quadrature
//! error enters the tolerances of downstream checks.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{norm, normalized_duality_map, SpaceDescriptor, SpacePoint};

/// Strictly increasing continuous φ with φ(0) = 0 and φ(t) → ∞.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Gauge {
    /// φ_{α,β}(t) = t^{1/β−1}/α with α > 0, β ∈ (0,1).
    Power { alpha: f64, beta: f64 },
    /// Piecewise-linear through `knots` (starting at (0,0), strictly
    /// increasing), extended past the last knot with slope `tail_slope` > 0.
    Tabulated { knots: Vec<(f64, f64)>, tail_slope: f64 },
}

impl Gauge {
    pub fn power(alpha: f64, beta: f64) -> Result<Gauge> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Validation(format!("gauge alpha must be positive, got {alpha}")));
        }
        if !(beta.is_finite() && beta > 0.0 && beta < 1.0) {
            return Err(Error::Validation(format!("gauge beta must lie in (0,1), got {beta}")));
        }
        Ok(Gauge::Power { alpha, beta })
    }

    /// The normalized gauge φ(t) = t, i.e. φ_{1,1/2}.
    pub fn normalized() -> Gauge {
        Gauge::Power { alpha: 1.0, beta: 0.5 }
    }

    pub fn tabulated(knots: Vec<(f64, f64)>, tail_slope: f64) -> Result<Gauge> {
        if knots.is_empty() || knots[0] != (0.0, 0.0) {
            return Err(Error::Validation("tabulated gauge must start at (0, 0)".into()));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) {
                return Err(Error::Validation(
                    "tabulated gauge knots must be strictly increasing in both coordinates".into(),
                ));
            }
        }
        if !(tail_slope.is_finite() && tail_slope > 0.0) {
            return Err(Error::Validation("tabulated gauge needs a positive tail slope".into()));
        }
        Ok(Gauge::Tabulated { knots, tail_slope })
    }

    pub fn value(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match self {
            Gauge::Power { alpha, beta } => {
                if t == 0.0 {
                    0.0
                } else {
                    t.powf(1.0 / beta - 1.0) / alpha
                }
            }
            Gauge::Tabulated { knots, tail_slope } => {
                let (tl, vl) = *knots.last().unwrap();
                if t >= tl {
                    return vl + tail_slope * (t - tl);
                }
                let i = knots.partition_point(|k| k.0 <= t).saturating_sub(1);
                let (t0, v0) = knots[i];
                let (t1, v1) = knots[i + 1];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// ∫₀ᵗ φ, in closed form.
    pub fn integral(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match self {
            Gauge::Power { alpha, beta } => {
                if t == 0.0 {
                    0.0
                } else {
                    beta / alpha * t.powf(1.0 / beta)
                }
            }
            Gauge::Tabulated { knots, .. } => {
                let mut acc = 0.0;
                let mut prev = knots[0];
                for &k in &knots[1..] {
                    if t <= k.0 {
                        let v = self.value(t);
                        return acc + 0.5 * (prev.1 + v) * (t - prev.0);
                    }
                    acc += 0.5 * (prev.1 + k.1) * (k.0 - prev.0);
                    prev = k;
                }
                let v = self.value(t);
                acc + 0.5 * (prev.1 + v) * (t - prev.0)
            }
        }
    }

    /// φ'(t), defined off knot points (right slope at knots).
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Gauge::Power { alpha, beta } => {
                let e = 1.0 / beta - 2.0;
                if t == 0.0 {
                    if e > 0.0 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    (1.0 / beta - 1.0) * t.powf(e) / alpha
                }
            }
            Gauge::Tabulated { knots, tail_slope } => {
                let (tl, _) = *knots.last().unwrap();
                if t >= tl {
                    return *tail_slope;
                }
                let i = knots.partition_point(|k| k.0 <= t).saturating_sub(1);
                let (t0, v0) = knots[i];
                let (t1, v1) = knots[i + 1];
                (v1 - v0) / (t1 - t0)
            }
        }
    }

    /// φ⁻¹, again a gauge.
    pub fn inverse(&self) -> Gauge {
        match self {
            Gauge::Power { alpha, beta } => Gauge::Power {
                alpha: alpha.powf(-beta / (1.0 - beta)),
                beta: 1.0 - beta,
            },
            Gauge::Tabulated { knots, tail_slope } => Gauge::Tabulated {
                knots: knots.iter().map(|&(t, v)| (v, t)).collect(),
                tail_slope: 1.0 / tail_slope,
            },
        }
    }

    pub fn as_quasigauge(&self) -> Quasigauge {
        match self {
            Gauge::Power { alpha, beta } => Quasigauge::Power { alpha: *alpha, beta: *beta },
            Gauge::Tabulated { knots, tail_slope } => {
                let qknots = knots
                    .iter()
                    .map(|&(t, v)| QKnot { t, left: v, right: v })
                    .collect();
                Quasigauge::piecewise_raw(qknots, QTail::Slope(*tail_slope), Continuity::Right)
            }
        }
    }
}

/// Evaluation convention at jump points of a piecewise quasigauge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Continuity {
    Left,
    Right,
}

/// Knot of a piecewise quasigauge: the function approaches `left` from below
/// t and continues from `right` (an upward jump when right > left).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QKnot {
    pub t: f64,
    pub left: f64,
    pub right: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum QTail {
    /// Linear continuation with the given slope ≥ 0 after the last knot.
    Slope(f64),
    /// φ = +∞ strictly past the last knot (bounded effective domain).
    Infinite,
}

/// Nondecreasing φ: [0,∞) → [0,∞], not identically 0, finite somewhere
/// right of 0. Values at knots follow the stored continuity convention.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Quasigauge {
    Power { alpha: f64, beta: f64 },
    Piecewise { knots: Vec<QKnot>, tail: QTail, continuity: Continuity },
}

impl Quasigauge {
    pub(crate) fn piecewise_raw(knots: Vec<QKnot>, tail: QTail, continuity: Continuity) -> Self {
        Quasigauge::Piecewise { knots, tail, continuity }
    }

    /// Piecewise quasigauge from knots; validates monotonicity.
    pub fn piecewise(knots: Vec<QKnot>, tail: QTail) -> Result<Quasigauge> {
        if knots.is_empty() || knots[0].t != 0.0 {
            return Err(Error::Validation("quasigauge knots must start at t = 0".into()));
        }
        let mut level = 0.0f64;
        for (i, k) in knots.iter().enumerate() {
            if k.left < level - 1e-15 || k.right < k.left - 1e-15 {
                return Err(Error::Validation("quasigauge must be nondecreasing".into()));
            }
            if i > 0 && k.t <= knots[i - 1].t {
                return Err(Error::Validation("quasigauge knots must have increasing t".into()));
            }
            level = k.right;
        }
        if let QTail::Slope(s) = tail {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::Validation("quasigauge tail slope must be ≥ 0".into()));
            }
        }
        let q = Quasigauge::Piecewise { knots, tail, continuity: Continuity::Right };
        if q.value(1e12) == 0.0 {
            return Err(Error::Validation("quasigauge must not be identically 0".into()));
        }
        Ok(q)
    }

    /// Step function: 0 on [0, t0), `height` on [t0, ∞).
    pub fn step(t0: f64, height: f64) -> Result<Quasigauge> {
        Quasigauge::piecewise(
            vec![
                QKnot { t: 0.0, left: 0.0, right: 0.0 },
                QKnot { t: t0, left: 0.0, right: height },
            ],
            QTail::Slope(0.0),
        )
    }

    pub fn value(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match self {
            Quasigauge::Power { alpha, beta } => {
                if t == 0.0 {
                    0.0
                } else {
                    t.powf(1.0 / beta - 1.0) / alpha
                }
            }
            Quasigauge::Piecewise { knots, tail, continuity } => {
                let last = knots.last().unwrap();
                if t > last.t {
                    return match tail {
                        QTail::Slope(s) => last.right + s * (t - last.t),
                        QTail::Infinite => f64::INFINITY,
                    };
                }
                // Exact knot hit: apply the continuity convention.
                if let Some(k) = knots.iter().find(|k| k.t == t) {
                    return match continuity {
                        Continuity::Right => k.right,
                        Continuity::Left => k.left,
                    };
                }
                let i = knots.partition_point(|k| k.t < t) - 1;
                let k0 = knots[i];
                let k1 = knots[i + 1];
                k0.right + (k1.left - k0.right) * (t - k0.t) / (k1.t - k0.t)
            }
        }
    }

    /// ∫₀ᵗ φ in closed form (+∞ once t leaves the effective domain).
    pub fn integral(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match self {
            Quasigauge::Power { alpha, beta } => {
                if t == 0.0 {
                    0.0
                } else {
                    beta / alpha * t.powf(1.0 / beta)
                }
            }
            Quasigauge::Piecewise { knots, tail, .. } => {
                let mut acc = 0.0;
                for w in knots.windows(2) {
                    let (k0, k1) = (w[0], w[1]);
                    if t <= k1.t {
                        let v = k0.right + (k1.left - k0.right) * (t - k0.t) / (k1.t - k0.t);
                        return acc + 0.5 * (k0.right + v) * (t - k0.t);
                    }
                    acc += 0.5 * (k0.right + k1.left) * (k1.t - k0.t);
                }
                let last = knots.last().unwrap();
                if t <= last.t {
                    return acc;
                }
                match tail {
                    QTail::Slope(s) => {
                        let dt = t - last.t;
                        acc + last.right * dt + 0.5 * s * dt * dt
                    }
                    QTail::Infinite => f64::INFINITY,
                }
            }
        }
    }

    /// Left generalized inverse φ^∨(s) = inf{t ≥ 0 : φ(t) ≥ s} and right
    /// generalized inverse φ^∧(s) = sup{t ≥ 0 : φ(t) ≤ s}, with inf ∅ = +∞
    /// and sup ∅ = 0. φ^∨ is left continuous, φ^∧ right continuous; both are
    /// quasigauges and agree with the ordinary inverse on strictly
    /// increasing continuous stretches.
    pub fn generalized_inverses(&self) -> (Quasigauge, Quasigauge) {
        match self {
            Quasigauge::Power { alpha, beta } => {
                let inv = Quasigauge::Power {
                    alpha: alpha.powf(-beta / (1.0 - beta)),
                    beta: 1.0 - beta,
                };
                (inv.clone(), inv)
            }
            Quasigauge::Piecewise { knots, tail, .. } => {
                let (inv_knots, inv_tail) = invert_curve(knots, tail);
                (
                    Quasigauge::piecewise_raw(inv_knots.clone(), inv_tail, Continuity::Left),
                    Quasigauge::piecewise_raw(inv_knots, inv_tail, Continuity::Right),
                )
            }
        }
    }
}

/// Swap the axes of the completed monotone graph: rising segments invert,
/// flats become jumps, jumps become flats.
fn invert_curve(knots: &[QKnot], tail: &QTail) -> (Vec<QKnot>, QTail) {
    let mut inv: Vec<QKnot> = Vec::new();

    // Push a knot at s, arriving at t_left and continuing at t_right;
    // merges with an existing knot at the same s.
    fn push(inv: &mut Vec<QKnot>, s: f64, t_left: f64, t_right: f64) {
        if let Some(last) = inv.last_mut() {
            if (last.t - s).abs() <= f64::EPSILON * s.abs().max(1.0) {
                last.right = last.right.max(t_right);
                return;
            }
        }
        inv.push(QKnot { t: s, left: t_left, right: t_right });
    }

    // Start of the inverse: s = 0 maps to t = 0; if φ starts above 0, the
    // inverse stays flat at 0 until s reaches that level.
    let first = knots[0];
    push(&mut inv, 0.0, 0.0, 0.0);
    if first.right > 0.0 {
        push(&mut inv, first.right, 0.0, 0.0);
    }

    let mut cur_v = first.right;
    for w in knots.windows(2) {
        let (k0, k1) = (w[0], w[1]);
        // Segment from (k0.t, k0.right) to (k1.t, k1.left).
        if k1.left > cur_v {
            // Rising linear piece inverts to a rising linear piece.
            push(&mut inv, cur_v, k0.t, k0.t);
            push(&mut inv, k1.left, k1.t, k1.t);
        } else {
            // Flat piece at height cur_v: the inverse jumps at s = cur_v
            // from k0.t to k1.t.
            push(&mut inv, cur_v, k0.t, k1.t);
        }
        // Jump at k1 from k1.left to k1.right: the inverse is flat at
        // t = k1.t over s in [k1.left, k1.right].
        if k1.right > k1.left {
            push(&mut inv, k1.left, k1.t, k1.t);
            push(&mut inv, k1.right, k1.t, k1.t);
        }
        cur_v = k1.right;
    }

    let last = knots.last().unwrap();
    match tail {
        QTail::Slope(s) if *s > 0.0 => {
            push(&mut inv, last.right, last.t, last.t);
            (inv, QTail::Slope(1.0 / s))
        }
        QTail::Slope(_) => {
            // φ is flat at last.right forever: no t reaches any s beyond
            // that level, so both inverses are +∞ there (inf ∅ = ∞, and the
            // sup at s = last.right is over an unbounded set).
            push(&mut inv, last.right, last.t, f64::INFINITY);
            (inv, QTail::Infinite)
        }
        QTail::Infinite => {
            // φ = ∞ past last.t: the inverse is flat at last.t from
            // s = last.right on.
            push(&mut inv, last.right, last.t, last.t);
            (inv, QTail::Slope(0.0))
        }
    }
}


/// Gauge or quasigauge attached to a space, defining the potential
/// Ψ_φ(x) = ∫₀^{‖x‖} φ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GaugeFn {
    Gauge(Gauge),
    Quasi(Quasigauge),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaugePotential {
    pub space: SpaceDescriptor,
    pub gauge: GaugeFn,
}

impl GaugePotential {
    pub fn new(space: SpaceDescriptor, gauge: Gauge) -> GaugePotential {
        GaugePotential { space, gauge: GaugeFn::Gauge(gauge) }
    }

    pub fn quasi(space: SpaceDescriptor, q: Quasigauge) -> GaugePotential {
        GaugePotential { space, gauge: GaugeFn::Quasi(q) }
    }

    pub fn gauge(&self) -> Result<&Gauge> {
        match &self.gauge {
            GaugeFn::Gauge(g) => Ok(g),
            GaugeFn::Quasi(_) => Err(Error::Unsupported(
                "operation requires a gauge; quasigauges admit only the scalar conjugate forms"
                    .into(),
            )),
        }
    }
}

/// Ψ_φ(x) = ∫₀^{‖x‖} φ; may be +∞ for quasigauges with bounded domain.
pub fn psi_phi_value(gp: &GaugePotential, x: &SpacePoint) -> f64 {
    let r = norm(&gp.space, x);
    match &gp.gauge {
        GaugeFn::Gauge(g) => g.integral(r),
        GaugeFn::Quasi(q) => q.integral(r),
    }
}

/// Duality map j_φ(x) = φ(‖x‖)/‖x‖ · j(x), the Gateaux gradient of Ψ_φ.
/// Returns a point in dual coordinates; j_φ(0) = 0.
pub fn duality_map(gp: &GaugePotential, x: &SpacePoint) -> Result<SpacePoint> {
    let g = gp.gauge()?;
    let r = norm(&gp.space, x);
    if r == 0.0 {
        return Ok(SpacePoint::zeros(&gp.space.dual()));
    }
    let j = normalized_duality_map(&gp.space, x);
    Ok(j.scale(g.value(r) / r))
}

/// (Ψ_φ)^⋆(y) = ∫₀^{‖y‖_dual} φ⁻¹ for gauges; for quasigauges the right
/// generalized inverse φ^∧ replaces φ⁻¹.
pub fn psi_phi_conjugate(gp: &GaugePotential, y: &SpacePoint) -> f64 {
    let r = norm(&gp.space.dual(), y);
    match &gp.gauge {
        GaugeFn::Gauge(g) => g.inverse().integral(r),
        GaugeFn::Quasi(q) => q.generalized_inverses().1.integral(r),
    }
}

/// Both generalized inverses of a quasigauge.
pub fn generalized_inverses(q: &Quasigauge) -> (Quasigauge, Quasigauge) {
    q.generalized_inverses()
}

/// Check of the scalar conjugate identity (f_φ)^⋆(u) = ∫₀ᵘ φ^∧: the left
/// side is the brute-force 1-D conjugate sup over a grid of step
/// `resolution`, the right side the generalized-inverse integral. Returns
/// (lhs, rhs, |lhs − rhs|).
pub fn conjugate_integral_check(q: &Quasigauge, u: f64, resolution: f64) -> (f64, f64, f64) {
    let rhs = q.generalized_inverses().1.integral(u);

    // Bracket the sup: the maximizer satisfies φ(t) ≈ u, so scan until φ
    // clears u (or the domain ends). If φ stays strictly below u forever the
    // conjugate is +∞.
    let mut t_hi = 1.0;
    let mut diverges = false;
    loop {
        let v = q.value(t_hi);
        if v >= u || v.is_infinite() {
            break;
        }
        t_hi *= 2.0;
        if t_hi > 1e9 {
            diverges = q.value(t_hi) < u;
            break;
        }
    }
    let lhs = if diverges {
        f64::INFINITY
    } else {
        let mut best = f64::NEG_INFINITY;
        let steps = ((t_hi / resolution).ceil() as usize).clamp(1, 50_000_000);
        let dt = t_hi / steps as f64;
        for i in 0..=steps {
            let t = i as f64 * dt;
            let f = q.integral(t);
            if f.is_finite() {
                best = best.max(t * u - f);
            }
        }
        best
    };
    let residual = if lhs.is_infinite() && rhs.is_infinite() { 0.0 } else { (lhs - rhs).abs() };
    (lhs, rhs, residual)
}
