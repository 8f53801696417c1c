//! Finite-dimensional model spaces: real vectors and complex Hermitian
//! matrices carrying a smooth norm, the duality pairing between a space and
//! its dual (identified on the same coordinates), and the matrix
//! decompositions every other module builds on.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Conjugate-symmetry slack allowed when validating Hermitian inputs.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues below this fraction of the spectral scale count as off-support
/// in polar decompositions.
const SUPPORT_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Vector,
    HermitianMatrix,
}

/// Norm on a model space. Exponents are restricted to (1, ∞): the endpoint
/// norms are not Gateaux differentiable off 0, which breaks single-valuedness
/// of every duality map downstream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum NormSpec {
    #[serde(rename = "p", alias = "p_norm")]
    P { p: f64 },
    #[serde(rename = "schatten_p", alias = "schatten")]
    SchattenP { p: f64 },
    #[serde(rename = "weighted_p", alias = "weighted")]
    WeightedP { p: f64, weights: Vec<f64> },
    /// ℓ_p over blocks of ℓ_q over coordinates; contiguous blocks of equal
    /// length `block_len`.
    #[serde(rename = "block_pq", alias = "block")]
    BlockPq { p: f64, q: f64, block_len: usize },
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::Validation(format!(
            "norm exponent must lie strictly between 1 and infinity, got {p}"
        )));
    }
    Ok(())
}

impl NormSpec {
    pub fn p(p: f64) -> Self {
        NormSpec::P { p }
    }

    pub fn schatten(p: f64) -> Self {
        NormSpec::SchattenP { p }
    }

    pub fn validate(&self, kind: SpaceKind, n: usize) -> Result<()> {
        match self {
            NormSpec::P { p } => {
                check_exponent(*p)?;
                if kind != SpaceKind::Vector {
                    return Err(Error::Validation(
                        "p-norm applies to vector spaces; use schatten_p for matrices".into(),
                    ));
                }
            }
            NormSpec::SchattenP { p } => {
                check_exponent(*p)?;
                if kind != SpaceKind::HermitianMatrix {
                    return Err(Error::Validation(
                        "schatten_p norm applies to Hermitian matrix spaces".into(),
                    ));
                }
            }
            NormSpec::WeightedP { p, weights } => {
                check_exponent(*p)?;
                if kind != SpaceKind::Vector {
                    return Err(Error::Validation("weighted_p applies to vector spaces".into()));
                }
                if weights.len() != n {
                    return Err(Error::Shape(format!(
                        "weighted_p needs {n} weights, got {}",
                        weights.len()
                    )));
                }
                if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return Err(Error::Validation("weighted_p weights must be positive".into()));
                }
            }
            NormSpec::BlockPq { p, q, block_len } => {
                check_exponent(*p)?;
                check_exponent(*q)?;
                if kind != SpaceKind::Vector {
                    return Err(Error::Validation("block_pq applies to vector spaces".into()));
                }
                if *block_len == 0 || n % block_len != 0 {
                    return Err(Error::Shape(format!(
                        "block_pq block length {block_len} must divide the dimension {n}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Conjugate-exponent dual: 1/p + 1/p' = 1 componentwise; weighted norms
    /// get the conjugate weights w^{1-p'}.
    pub fn dual(&self) -> NormSpec {
        let conj = |p: f64| p / (p - 1.0);
        match self {
            NormSpec::P { p } => NormSpec::P { p: conj(*p) },
            NormSpec::SchattenP { p } => NormSpec::SchattenP { p: conj(*p) },
            NormSpec::WeightedP { p, weights } => {
                let pd = conj(*p);
                NormSpec::WeightedP {
                    p: pd,
                    weights: weights.iter().map(|w| w.powf(1.0 - pd)).collect(),
                }
            }
            NormSpec::BlockPq { p, q, block_len } => NormSpec::BlockPq {
                p: conj(*p),
                q: conj(*q),
                block_len: *block_len,
            },
        }
    }

    /// Outer exponent of the norm (the p in every family).
    pub fn outer_p(&self) -> f64 {
        match self {
            NormSpec::P { p }
            | NormSpec::SchattenP { p }
            | NormSpec::WeightedP { p, .. }
            | NormSpec::BlockPq { p, .. } => *p,
        }
    }
}

/// Descriptor of a model space: kind, dimension (vector length or matrix
/// side), and the norm it carries. The dual space lives on the same
/// coordinates and carries the conjugate norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub kind: SpaceKind,
    pub n: usize,
    pub norm: NormSpec,
}

impl SpaceDescriptor {
    pub fn new(kind: SpaceKind, n: usize, norm: NormSpec) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("dimension must be at least 1".into()));
        }
        norm.validate(kind, n)?;
        Ok(SpaceDescriptor { kind, n, norm })
    }

    pub fn vector(n: usize, norm: NormSpec) -> Result<Self> {
        Self::new(SpaceKind::Vector, n, norm)
    }

    pub fn hermitian(n: usize, norm: NormSpec) -> Result<Self> {
        Self::new(SpaceKind::HermitianMatrix, n, norm)
    }

    /// Euclidean vector space (p = 2).
    pub fn euclidean(n: usize) -> Self {
        Self::vector(n, NormSpec::p(2.0)).expect("p=2 is always valid")
    }

    /// Hermitian matrices with the Frobenius (Schatten-2) norm.
    pub fn frobenius(n: usize) -> Self {
        Self::hermitian(n, NormSpec::schatten(2.0)).expect("schatten p=2 is always valid")
    }

    pub fn dual(&self) -> SpaceDescriptor {
        SpaceDescriptor {
            kind: self.kind,
            n: self.n,
            norm: self.norm.dual(),
        }
    }

    /// Real dimension of the space as a coordinate chart (n for vectors,
    /// n^2 for Hermitian matrices: n real diagonal + n(n-1)/2 complex
    /// off-diagonal entries).
    pub fn real_dim(&self) -> usize {
        match self.kind {
            SpaceKind::Vector => self.n,
            SpaceKind::HermitianMatrix => self.n * self.n,
        }
    }

    pub fn same_coordinates(&self, other: &SpaceDescriptor) -> bool {
        self.kind == other.kind && self.n == other.n
    }
}

/// Raw coordinates of a point: a dense real vector or a complex Hermitian
/// matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum PointData {
    Vector(DVector<f64>),
    Matrix(DMatrix<Complex64>),
}

impl PointData {
    pub fn zeros_like(&self) -> PointData {
        match self {
            PointData::Vector(v) => PointData::Vector(DVector::zeros(v.len())),
            PointData::Matrix(m) => PointData::Matrix(DMatrix::zeros(m.nrows(), m.ncols())),
        }
    }

    pub fn axpy(&mut self, a: f64, x: &PointData) {
        match (self, x) {
            (PointData::Vector(v), PointData::Vector(w)) => v.axpy(a, w, 1.0),
            (PointData::Matrix(m), PointData::Matrix(n)) => *m += n * Complex64::new(a, 0.0),
            _ => panic!("mixed point kinds"),
        }
    }

    pub fn scale(&self, a: f64) -> PointData {
        match self {
            PointData::Vector(v) => PointData::Vector(v * a),
            PointData::Matrix(m) => PointData::Matrix(m * Complex64::new(a, 0.0)),
        }
    }

    pub fn add(&self, other: &PointData) -> PointData {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &PointData) -> PointData {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Real Euclidean (Frobenius) inner product of the coordinates.
    pub fn dot(&self, other: &PointData) -> f64 {
        match (self, other) {
            (PointData::Vector(v), PointData::Vector(w)) => v.dot(w),
            (PointData::Matrix(m), PointData::Matrix(n)) => {
                let mut acc = 0.0;
                for (a, b) in m.iter().zip(n.iter()) {
                    acc += (a.conj() * b).re;
                }
                acc
            }
            _ => panic!("mixed point kinds"),
        }
    }

    pub fn euclid_norm(&self) -> f64 {
        self.dot(self).max(0.0).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        match self {
            PointData::Vector(v) => v.iter().all(|x| x.is_finite()),
            PointData::Matrix(m) => m.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
        }
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        match self {
            PointData::Vector(v) => v,
            _ => panic!("expected vector data"),
        }
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        match self {
            PointData::Matrix(m) => m,
            _ => panic!("expected matrix data"),
        }
    }
}

/// A point of a model space together with its space descriptor.
#[derive(Clone, Debug, PartialEq)]
pub struct SpacePoint {
    pub space: SpaceDescriptor,
    pub data: PointData,
}

impl SpacePoint {
    pub fn from_vec(space: &SpaceDescriptor, data: Vec<f64>) -> Result<Self> {
        if space.kind != SpaceKind::Vector {
            return Err(Error::Shape("space expects matrix data".into()));
        }
        if data.len() != space.n {
            return Err(Error::Shape(format!(
                "expected vector of length {}, got {}",
                space.n,
                data.len()
            )));
        }
        let data = PointData::Vector(DVector::from_vec(data));
        if !data.is_finite() {
            return Err(Error::Validation("point data contains NaN or infinity".into()));
        }
        Ok(SpacePoint { space: space.clone(), data })
    }

    pub fn from_matrix(space: &SpaceDescriptor, m: DMatrix<Complex64>) -> Result<Self> {
        if space.kind != SpaceKind::HermitianMatrix {
            return Err(Error::Shape("space expects vector data".into()));
        }
        if m.nrows() != space.n || m.ncols() != space.n {
            return Err(Error::Shape(format!(
                "expected {0}x{0} matrix, got {1}x{2}",
                space.n,
                m.nrows(),
                m.ncols()
            )));
        }
        let data = PointData::Matrix(m);
        if !data.is_finite() {
            return Err(Error::Validation("point data contains NaN or infinity".into()));
        }
        let p = SpacePoint { space: space.clone(), data };
        p.check_hermitian()?;
        Ok(p)
    }

    /// Real diagonal matrix point.
    pub fn from_diagonal(space: &SpaceDescriptor, diag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(*d, 0.0);
        }
        Self::from_matrix(space, m)
    }

    pub fn zeros(space: &SpaceDescriptor) -> Self {
        let data = match space.kind {
            SpaceKind::Vector => PointData::Vector(DVector::zeros(space.n)),
            SpaceKind::HermitianMatrix => PointData::Matrix(DMatrix::zeros(space.n, space.n)),
        };
        SpacePoint { space: space.clone(), data }
    }

    fn check_hermitian(&self) -> Result<()> {
        if let PointData::Matrix(m) = &self.data {
            let scale = self.data.euclid_norm().max(1.0);
            let asym = (m - m.adjoint()).norm();
            if asym > HERMITIAN_TOL * scale {
                return Err(Error::Validation(format!(
                    "matrix is not Hermitian (asymmetry {asym:.3e} at scale {scale:.3e})"
                )));
            }
        }
        Ok(())
    }

    /// Reinterpret this point in another space sharing its coordinates
    /// (typically the dual space).
    pub fn with_space(&self, space: &SpaceDescriptor) -> SpacePoint {
        debug_assert!(space.same_coordinates(&self.space));
        SpacePoint { space: space.clone(), data: self.data.clone() }
    }

    pub fn axpy(&mut self, a: f64, x: &SpacePoint) {
        self.data.axpy(a, &x.data);
    }

    pub fn scale(&self, a: f64) -> SpacePoint {
        SpacePoint { space: self.space.clone(), data: self.data.scale(a) }
    }

    pub fn add(&self, other: &SpacePoint) -> SpacePoint {
        SpacePoint { space: self.space.clone(), data: self.data.add(&other.data) }
    }

    pub fn sub(&self, other: &SpacePoint) -> SpacePoint {
        SpacePoint { space: self.space.clone(), data: self.data.sub(&other.data) }
    }

    pub fn euclid_norm(&self) -> f64 {
        self.data.euclid_norm()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.space, self)
    }
}

/// Duality pairing ⟨x, y⟩ with y in dual coordinates: Σ xᵢyᵢ for vectors,
/// Re tr(x y) for matrices.
pub fn pairing(x: &SpacePoint, y: &SpacePoint) -> Result<f64> {
    if !x.space.same_coordinates(&y.space) {
        return Err(Error::Shape(format!(
            "pairing needs matching coordinate spaces, got {:?}/{} and {:?}/{}",
            x.space.kind, x.space.n, y.space.kind, y.space.n
        )));
    }
    Ok(match (&x.data, &y.data) {
        (PointData::Vector(a), PointData::Vector(b)) => a.dot(b),
        (PointData::Matrix(a), PointData::Matrix(b)) => {
            // Re tr(a b); both Hermitian, so no adjoint.
            let n = a.nrows();
            let mut acc = 0.0;
            for i in 0..n {
                for k in 0..n {
                    acc += (a[(i, k)] * b[(k, i)]).re;
                }
            }
            acc
        }
        _ => unreachable!("same_coordinates guarantees matching kinds"),
    })
}

/// Norm of a point under the space's NormSpec.
pub fn norm(space: &SpaceDescriptor, x: &SpacePoint) -> f64 {
    match (&space.norm, &x.data) {
        (NormSpec::P { p }, PointData::Vector(v)) => lp_norm(v.as_slice(), *p),
        (NormSpec::WeightedP { p, weights }, PointData::Vector(v)) => {
            let mut acc = 0.0;
            for (xi, wi) in v.iter().zip(weights.iter()) {
                acc += wi * xi.abs().powf(*p);
            }
            acc.powf(1.0 / p)
        }
        (NormSpec::BlockPq { p, q, block_len }, PointData::Vector(v)) => {
            let mut acc = 0.0;
            for b in v.as_slice().chunks(*block_len) {
                acc += lp_norm(b, *q).powf(*p);
            }
            acc.powf(1.0 / p)
        }
        (NormSpec::SchattenP { p }, PointData::Matrix(_)) => {
            let (eigs, _) = eigen_sorted(x).expect("validated Hermitian point");
            lp_norm(eigs.as_slice(), *p)
        }
        _ => panic!("norm family does not match point kind"),
    }
}

/// ℓ₁ / trace norm: Σ|xᵢ| for vectors, sum of singular values for Hermitian
/// matrices. Not a `NormSpec` (exponent endpoints are rejected there); used
/// by the embedding layer where the base space carries the natural L₁ norm.
pub fn trace_norm(x: &SpacePoint) -> f64 {
    match &x.data {
        PointData::Vector(v) => v.iter().map(|t| t.abs()).sum(),
        PointData::Matrix(_) => {
            let (eigs, _) = eigen_sorted(x).expect("validated Hermitian point");
            eigs.iter().map(|t| t.abs()).sum()
        }
    }
}

fn lp_norm(xs: &[f64], p: f64) -> f64 {
    // Rescale by the max to avoid overflow for large p.
    let m = xs.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if m == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for x in xs {
        acc += (x.abs() / m).powf(p);
    }
    m * acc.powf(1.0 / p)
}

/// Dual norm: the NormSpec with conjugate exponents.
pub fn dual_norm_spec(spec: &NormSpec) -> NormSpec {
    spec.dual()
}

/// Polar decomposition data for a Hermitian matrix (or componentwise sign and
/// modulus for a vector): sign·modulus reproduces the input, modulus is PSD.
#[derive(Clone, Debug)]
pub struct PolarParts {
    /// ±1 on the support, 0 off it; a Hermitian matrix (or sign vector).
    pub sign: SpacePoint,
    /// |x|, positive semidefinite (or componentwise absolute value).
    pub modulus: SpacePoint,
    /// Eigenbasis used for matrix decompositions.
    pub basis: Option<DMatrix<Complex64>>,
    /// Eigenvalues (nonincreasing) for matrix decompositions.
    pub eigenvalues: Option<DVector<f64>>,
}

impl PolarParts {
    /// sign·modulus (componentwise for vectors).
    pub fn recompose(&self) -> SpacePoint {
        match (&self.sign.data, &self.modulus.data) {
            (PointData::Vector(s), PointData::Vector(m)) => {
                let v: Vec<f64> = s.iter().zip(m.iter()).map(|(a, b)| a * b).collect();
                SpacePoint {
                    space: self.sign.space.clone(),
                    data: PointData::Vector(DVector::from_vec(v)),
                }
            }
            (PointData::Matrix(s), PointData::Matrix(m)) => SpacePoint {
                space: self.sign.space.clone(),
                data: PointData::Matrix(s * m),
            },
            _ => unreachable!(),
        }
    }
}

/// u_x|x| decomposition: sign data together with the PSD modulus.
pub fn polar_decompose(x: &SpacePoint) -> Result<PolarParts> {
    match &x.data {
        PointData::Vector(v) => {
            let scale = v.amax().max(1.0);
            let sgn: Vec<f64> = v
                .iter()
                .map(|t| {
                    if t.abs() <= SUPPORT_TOL * scale {
                        0.0
                    } else {
                        t.signum()
                    }
                })
                .collect();
            let abs: Vec<f64> = v.iter().map(|t| t.abs()).collect();
            Ok(PolarParts {
                sign: SpacePoint {
                    space: x.space.clone(),
                    data: PointData::Vector(DVector::from_vec(sgn)),
                },
                modulus: SpacePoint {
                    space: x.space.clone(),
                    data: PointData::Vector(DVector::from_vec(abs)),
                },
                basis: None,
                eigenvalues: None,
            })
        }
        PointData::Matrix(_) => {
            let (eigs, basis) = eigen_sorted(x)?;
            let scale = eigs.iter().fold(0.0f64, |a, t| a.max(t.abs())).max(1.0);
            let sgn: Vec<f64> = eigs
                .iter()
                .map(|t| {
                    if t.abs() <= SUPPORT_TOL * scale {
                        0.0
                    } else {
                        t.signum()
                    }
                })
                .collect();
            let abs: Vec<f64> = eigs.iter().map(|t| t.abs()).collect();
            let sign_m = matrix_from_eigen(&basis, &sgn);
            let mod_m = matrix_from_eigen(&basis, &abs);
            Ok(PolarParts {
                sign: SpacePoint { space: x.space.clone(), data: PointData::Matrix(sign_m) },
                modulus: SpacePoint { space: x.space.clone(), data: PointData::Matrix(mod_m) },
                basis: Some(basis),
                eigenvalues: Some(eigs),
            })
        }
    }
}

/// Eigendecomposition of a Hermitian point with eigenvalues sorted
/// nonincreasingly; basis·diag(λ)·basis* reconstructs the input.
pub fn eigen_sorted(x: &SpacePoint) -> Result<(DVector<f64>, DMatrix<Complex64>)> {
    let m = match &x.data {
        PointData::Matrix(m) => m,
        PointData::Vector(_) => {
            return Err(Error::Validation("eigen_sorted expects a Hermitian matrix point".into()))
        }
    };
    // Symmetrize to kill the (validated, tiny) asymmetry before factorizing.
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues are finite")
    });
    let vals = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut basis = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        basis.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((vals, basis))
}

/// basis · diag(vals) · basis*
pub fn matrix_from_eigen(basis: &DMatrix<Complex64>, vals: &[f64]) -> DMatrix<Complex64> {
    let n = basis.nrows();
    let mut d = DMatrix::zeros(n, n);
    for (i, v) in vals.iter().enumerate() {
        d[(i, i)] = Complex64::new(*v, 0.0);
    }
    basis * d * basis.adjoint()
}

/// Apply a real scalar function to the spectrum of a Hermitian point.
pub fn matrix_function(x: &SpacePoint, f: impl Fn(f64) -> f64) -> Result<SpacePoint> {
    let (eigs, basis) = eigen_sorted(x)?;
    let vals: Vec<f64> = eigs.iter().map(|t| f(*t)).collect();
    Ok(SpacePoint {
        space: x.space.clone(),
        data: PointData::Matrix(matrix_from_eigen(&basis, &vals)),
    })
}


/// Normalized duality map j (gauge φ(t) = t): the unique dual vector with
/// ⟨x, j(x)⟩ = ‖x‖² and ‖j(x)‖_dual = ‖x‖, j(0) = 0. The returned point
/// carries the dual space descriptor.
pub fn normalized_duality_map(space: &SpaceDescriptor, x: &SpacePoint) -> SpacePoint {
    let dual_space = space.dual();
    let r = norm(space, x);
    if r == 0.0 {
        return SpacePoint::zeros(&dual_space);
    }
    let data = match (&space.norm, &x.data) {
        (NormSpec::P { p }, PointData::Vector(v)) => {
            let c = r.powf(2.0 - p);
            PointData::Vector(DVector::from_iterator(
                v.len(),
                v.iter().map(|t| c * t.abs().powf(p - 1.0) * t.signum()),
            ))
        }
        (NormSpec::WeightedP { p, weights }, PointData::Vector(v)) => {
            let c = r.powf(2.0 - p);
            PointData::Vector(DVector::from_iterator(
                v.len(),
                v.iter()
                    .zip(weights.iter())
                    .map(|(t, w)| c * w * t.abs().powf(p - 1.0) * t.signum()),
            ))
        }
        (NormSpec::BlockPq { p, q, block_len }, PointData::Vector(v)) => {
            let c = r.powf(2.0 - p);
            let mut out = DVector::zeros(v.len());
            for (b, chunk) in v.as_slice().chunks(*block_len).enumerate() {
                let nb = lp_norm(chunk, *q);
                if nb == 0.0 {
                    continue;
                }
                let cb = c * nb.powf(p - q);
                for (i, t) in chunk.iter().enumerate() {
                    out[b * block_len + i] = cb * t.abs().powf(q - 1.0) * t.signum();
                }
            }
            PointData::Vector(out)
        }
        (NormSpec::SchattenP { p }, PointData::Matrix(_)) => {
            let (eigs, basis) = eigen_sorted(x).expect("validated Hermitian point");
            let c = r.powf(2.0 - p);
            let vals: Vec<f64> =
                eigs.iter().map(|t| c * t.abs().powf(p - 1.0) * t.signum()).collect();
            PointData::Matrix(matrix_from_eigen(&basis, &vals))
        }
        _ => panic!("norm family does not match point kind"),
    };
    SpacePoint { space: dual_space, data }
}
