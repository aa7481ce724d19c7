//! Linear maps of `ℝ^{s,r}` preserving the signed form, `Mᵀ η M = η`.
//!
//! Two generator families cover the group near the identity: boosts mix one
//! temporal and one spatial axis, block rotations mix two axes of the same
//! sign. Finite products are built with [`PseudoOrthogonalMap::then`].
//!
//! Axis indices are zero based over the full `[t | x]` layout, so temporal
//! axes are `0..s` and spatial axes are `s..n`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{PseudoPoint, Signature, TangentVector};

#[derive(Debug, Clone, PartialEq)]
pub struct PseudoOrthogonalMap {
    sig: Signature,
    matrix: DMatrix<f64>,
}

impl PseudoOrthogonalMap {
    pub fn identity(sig: Signature) -> Self {
        Self {
            sig,
            matrix: DMatrix::identity(sig.n(), sig.n()),
        }
    }

    /// Wraps an arbitrary `n×n` row-major grid. No isometry check is done
    /// here; see [`is_isometry`].
    pub fn from_row_major(sig: Signature, entries: &[f64]) -> Result<Self> {
        let n = sig.n();
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: entries.len(),
            });
        }
        Ok(Self {
            sig,
            matrix: DMatrix::from_row_slice(n, n, entries),
        })
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `other ∘ self`: apply `self` first, then `other`.
    pub fn then(&self, other: &PseudoOrthogonalMap) -> Result<Self> {
        self.sig.check_same(&other.sig)?;
        Ok(Self {
            sig: self.sig,
            matrix: &other.matrix * &self.matrix,
        })
    }

    fn act(&self, coords: &[f64]) -> Vec<f64> {
        let v = DVector::from_column_slice(coords);
        (&self.matrix * v).as_slice().to_vec()
    }
}

fn eta(sig: Signature) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_vec(sig.eta()))
}

fn plane(sig: Signature, a: usize, b: usize, block: [[f64; 2]; 2]) -> PseudoOrthogonalMap {
    let mut map = PseudoOrthogonalMap::identity(sig);
    let m = &mut map.matrix;
    m[(a, a)] = block[0][0];
    m[(a, b)] = block[0][1];
    m[(b, a)] = block[1][0];
    m[(b, b)] = block[1][1];
    map
}

/// Hyperbolic rotation by `rapidity` in the plane of temporal axis
/// `time_axis` and spatial axis `space_axis`.
pub fn boost(
    sig: Signature,
    time_axis: usize,
    space_axis: usize,
    rapidity: f64,
) -> Result<PseudoOrthogonalMap> {
    if !sig.is_temporal(time_axis) {
        return Err(Error::Index(format!(
            "axis {time_axis} is not temporal in signature {sig}"
        )));
    }
    if !sig.is_spatial(space_axis) {
        return Err(Error::Index(format!(
            "axis {space_axis} is not spatial in signature {sig}"
        )));
    }
    let (ch, sh) = (rapidity.cosh(), rapidity.sinh());
    Ok(plane(sig, time_axis, space_axis, [[ch, sh], [sh, ch]]))
}

/// Euclidean rotation by `theta` in the plane of two axes of equal sign.
pub fn block_rotation(
    sig: Signature,
    first: usize,
    second: usize,
    theta: f64,
) -> Result<PseudoOrthogonalMap> {
    if first >= sig.n() || second >= sig.n() {
        return Err(Error::Index(format!(
            "axes ({first}, {second}) out of range for signature {sig}"
        )));
    }
    if first == second {
        return Err(Error::Index(format!("rotation axes coincide ({first})")));
    }
    if sig.is_temporal(first) != sig.is_temporal(second) {
        return Err(Error::Index(format!(
            "axes ({first}, {second}) have opposite sign; use a boost"
        )));
    }
    let (c, s) = (theta.cos(), theta.sin());
    Ok(plane(sig, first, second, [[c, -s], [s, c]]))
}

pub fn apply(map: &PseudoOrthogonalMap, p: &PseudoPoint) -> Result<PseudoPoint> {
    map.sig.check_same(&p.signature())?;
    PseudoPoint::new(map.sig, map.act(p.coords()))
}

/// Pushforward of a tangent vector; the map is linear, so this is the same
/// matrix action.
pub fn apply_tangent(map: &PseudoOrthogonalMap, v: &TangentVector) -> Result<TangentVector> {
    map.sig.check_same(&v.signature())?;
    TangentVector::new(map.sig, map.act(v.coords()))
}

/// Max-norm of `Mᵀ η M - η`.
pub fn isometry_defect(map: &PseudoOrthogonalMap) -> f64 {
    let eta = eta(map.sig);
    let defect = map.matrix.transpose() * &eta * &map.matrix - eta;
    defect.amax()
}

pub fn is_isometry(map: &PseudoOrthogonalMap, tol: f64) -> bool {
    isometry_defect(map) <= tol
}
