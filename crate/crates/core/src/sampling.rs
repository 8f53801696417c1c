//! Seeded random sampling of points, unitaries, and density matrices.
//!
//! Every sampler takes an explicit `Rng`; suites derive a per-sample seed
//! from a base seed so results are reproducible under any execution order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

use crate::spaces::{PointData, SpaceDescriptor, SpaceKind, SpacePoint};

/// Deterministic RNG for a (base seed, sample index) pair.
pub fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller; avoids a rand_distr dependency.
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            let v: f64 = rng.random();
            return (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos();
        }
    }
}

/// Gaussian point of the space, entries scaled by `scale`.
pub fn gaussian_point(space: &SpaceDescriptor, scale: f64, rng: &mut impl Rng) -> SpacePoint {
    match space.kind {
        SpaceKind::Vector => {
            let v = DVector::from_fn(space.n, |_, _| scale * standard_normal(rng));
            SpacePoint { space: space.clone(), data: PointData::Vector(v) }
        }
        SpaceKind::HermitianMatrix => {
            let n = space.n;
            let mut m = DMatrix::zeros(n, n);
            for i in 0..n {
                m[(i, i)] = Complex64::new(scale * standard_normal(rng), 0.0);
                for j in (i + 1)..n {
                    let z = Complex64::new(
                        scale * standard_normal(rng) / 2f64.sqrt(),
                        scale * standard_normal(rng) / 2f64.sqrt(),
                    );
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
            SpacePoint { space: space.clone(), data: PointData::Matrix(m) }
        }
    }
}

/// Strictly positive point: componentwise exp of a Gaussian for vectors,
/// G G* + εI for matrices.
pub fn positive_point(space: &SpaceDescriptor, scale: f64, rng: &mut impl Rng) -> SpacePoint {
    match space.kind {
        SpaceKind::Vector => {
            let v = DVector::from_fn(space.n, |_, _| scale * (0.7 * standard_normal(rng)).exp());
            SpacePoint { space: space.clone(), data: PointData::Vector(v) }
        }
        SpaceKind::HermitianMatrix => {
            let n = space.n;
            let g = DMatrix::from_fn(n, n, |_, _| {
                Complex64::new(standard_normal(rng), standard_normal(rng))
            });
            let m = (&g * g.adjoint()) * Complex64::new(scale / n as f64, 0.0)
                + DMatrix::identity(n, n) * Complex64::new(scale * 0.05, 0.0);
            SpacePoint { space: space.clone(), data: PointData::Matrix(m) }
        }
    }
}

/// Point with all entries strictly inside (lo, hi) (componentwise for
/// vectors; eigenvalues inside the interval for matrices).
pub fn interval_point(
    space: &SpaceDescriptor,
    lo: f64,
    hi: f64,
    rng: &mut impl Rng,
) -> SpacePoint {
    let width = hi - lo;
    match space.kind {
        SpaceKind::Vector => {
            let v =
                DVector::from_fn(space.n, |_, _| lo + width * (0.05 + 0.9 * rng.random::<f64>()));
            SpacePoint { space: space.clone(), data: PointData::Vector(v) }
        }
        SpaceKind::HermitianMatrix => {
            let n = space.n;
            let u = random_unitary(n, rng);
            let vals: Vec<f64> =
                (0..n).map(|_| lo + width * (0.05 + 0.9 * rng.random::<f64>())).collect();
            let m = crate::spaces::matrix_from_eigen(&u, &vals);
            SpacePoint { space: space.clone(), data: PointData::Matrix(m) }
        }
    }
}

/// Haar-ish random unitary via QR of a complex Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(standard_normal(rng), standard_normal(rng))
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // Fix the phase so the distribution is Haar.
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            q[(i, j)] *= phase.conj();
        }
    }
    q
}

/// Random density matrix (PSD, unit trace).
pub fn density_matrix(space: &SpaceDescriptor, rng: &mut impl Rng) -> SpacePoint {
    let p = positive_point(space, 1.0, rng);
    let tr = match &p.data {
        PointData::Matrix(m) => (0..space.n).map(|i| m[(i, i)].re).sum::<f64>(),
        _ => panic!("density matrices need a matrix space"),
    };
    p.scale(1.0 / tr)
}

/// Probability vector (positive entries summing to 1).
pub fn probability_vector(space: &SpaceDescriptor, rng: &mut impl Rng) -> SpacePoint {
    let p = positive_point(space, 1.0, rng);
    let s: f64 = p.data.as_vector().iter().sum();
    p.scale(1.0 / s)
}

/// Point on the unit sphere of the space's norm.
pub fn sphere_point(space: &SpaceDescriptor, rng: &mut impl Rng) -> SpacePoint {
    let g = gaussian_point(space, 1.0, rng);
    let n = g.norm();
    g.scale(1.0 / n.max(1e-300))
}

/// Random set of Kraus operators defining a CPTP map on n×n matrices.
pub fn random_kraus_ops(n: usize, count: usize, rng: &mut impl Rng) -> Vec<DMatrix<Complex64>> {
    // Columns of a (count*n) x n isometry, split into count blocks.
    let g = DMatrix::from_fn(count * n, n, |_, _| {
        Complex64::new(standard_normal(rng), standard_normal(rng))
    });
    let qr = g.qr();
    let q = qr.q(); // (count*n) x n with orthonormal columns
    (0..count).map(|k| q.rows(k * n, n).into_owned()).collect()
}
