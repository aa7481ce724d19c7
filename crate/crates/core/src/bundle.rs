//! Tangent bundles of `ℝ^{s,r}` and their recursive towers.
//!
//! An order-`p` element is stored flat as `2^p · n` reals. Order 0 is a bare
//! point; order `p` is the pair `(base, fiber)` of two order-`p-1` elements,
//! laid out depth first with the base in the first half. Projection keeps the
//! first half.
//!
//! For the uniform curve, the `n`-coordinate block at index `b` of an order-`p`
//! lift holds the derivative of order `popcount(b)`, so the `m`-th derivative
//! appears `C(p, m)` times.

use crate::error::{Error, Result};
use crate::geometry::{point_at, velocity_at, CurveSpec, PseudoPoint, Signature, TangentVector};

/// Default cap on lift order used by the sweeps (`64·n` coordinates).
pub const DEFAULT_MAX_ORDER: u32 = 6;

/// `2^order · n`, the dimension of the order-`order` tangent bundle of an
/// `n`-manifold.
pub fn bundle_dim(n: usize, order: u32) -> Result<usize> {
    if n == 0 {
        return Err(Error::Domain(
            "manifold dimension must be at least 1".into(),
        ));
    }
    1usize
        .checked_shl(order)
        .and_then(|blocks| blocks.checked_mul(n))
        .ok_or(Error::Overflow { n, order })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BundleElement {
    sig: Signature,
    order: u32,
    coords: Vec<f64>,
}

impl BundleElement {
    pub fn new(sig: Signature, order: u32, coords: Vec<f64>) -> Result<Self> {
        let expected = bundle_dim(sig.n(), order)?;
        if coords.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: coords.len(),
            });
        }
        Ok(Self { sig, order, coords })
    }

    /// Order-0 element wrapping a point.
    pub fn from_point(p: &PseudoPoint) -> Self {
        Self {
            sig: p.signature(),
            order: 0,
            coords: p.coords().to_vec(),
        }
    }

    /// The order-`p+1` element `(base, fiber)`.
    pub fn pair(base: &BundleElement, fiber: &BundleElement) -> Result<Self> {
        base.sig.check_same(&fiber.sig)?;
        if base.order != fiber.order {
            return Err(Error::Domain(format!(
                "cannot pair orders {} and {}",
                base.order, fiber.order
            )));
        }
        let mut coords = Vec::with_capacity(2 * base.coords.len());
        coords.extend_from_slice(&base.coords);
        coords.extend_from_slice(&fiber.coords);
        Self::new(base.sig, base.order + 1, coords)
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Number of `n`-coordinate blocks, `2^order`.
    pub fn block_count(&self) -> usize {
        self.coords.len() / self.sig.n()
    }

    pub fn block(&self, index: usize) -> Option<&[f64]> {
        let n = self.sig.n();
        self.coords.get(index * n..(index + 1) * n)
    }

    /// Repeated projection down to the underlying point.
    pub fn base_point(&self) -> PseudoPoint {
        PseudoPoint::new(self.sig, self.coords[..self.sig.n()].to_vec())
            .expect("first block has n coordinates")
    }
}

/// `π(base, fiber) = base`.
pub fn project(e: &BundleElement) -> Result<BundleElement> {
    if e.order == 0 {
        return Err(Error::Domain("cannot project an order-0 element".into()));
    }
    let half = e.coords.len() / 2;
    Ok(BundleElement {
        sig: e.sig,
        order: e.order - 1,
        coords: e.coords[..half].to_vec(),
    })
}

/// Local coordinates `[point | v]` on `T(ℝ^{s,r})`.
pub fn trivialize(point: &PseudoPoint, v: &TangentVector) -> Result<Vec<f64>> {
    point.signature().check_same(&v.signature())?;
    let mut out = Vec::with_capacity(2 * point.coords().len());
    out.extend_from_slice(point.coords());
    out.extend_from_slice(v.coords());
    Ok(out)
}

/// Inverse of [`trivialize`].
pub fn split(sig: Signature, coords: &[f64]) -> Result<(PseudoPoint, TangentVector)> {
    let n = sig.n();
    if coords.len() != 2 * n {
        return Err(Error::DimensionMismatch {
            expected: 2 * n,
            found: coords.len(),
        });
    }
    Ok((
        PseudoPoint::new(sig, coords[..n].to_vec())?,
        TangentVector::new(sig, coords[n..].to_vec())?,
    ))
}

/// `m`-th ψ-derivative of the uniform curve. Each differentiation multiplies
/// by `√(sr)` and swaps sinh/cosh, so even orders are `(sr)^{m/2}` times the
/// point and odd orders `(sr)^{(m-1)/2}` times the velocity.
pub fn curve_derivative(spec: &CurveSpec, psi: f64, m: u32) -> Vec<f64> {
    let sig = spec.signature();
    let sr = (sig.s() * sig.r()) as f64;
    let scale = sr.powi((m / 2) as i32);
    let base = if m.is_multiple_of(2) {
        point_at(psi, spec).into_coords()
    } else {
        velocity_at(psi, spec).into_coords()
    };
    if m < 2 {
        return base;
    }
    base.into_iter().map(|c| scale * c).collect()
}

/// Order-`order` lift of the uniform curve at `psi`.
pub fn curve_lift(spec: &CurveSpec, psi: f64, order: u32) -> Result<BundleElement> {
    let sig = spec.signature();
    let len = bundle_dim(sig.n(), order)?;
    let tower: Vec<Vec<f64>> = (0..=order)
        .map(|m| curve_derivative(spec, psi, m))
        .collect();
    let mut coords = Vec::with_capacity(len);
    for b in 0..(len / sig.n()) {
        coords.extend_from_slice(&tower[b.count_ones() as usize]);
    }
    BundleElement::new(sig, order, coords)
}
