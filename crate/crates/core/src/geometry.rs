//! Signatures, points of the pseudo-hyperbolic quadric, and the uniform curve.
//!
//! Coordinates are laid out as `[t_1 .. t_s | x_{s+1} .. x_n]`: the `s`
//! time-like axes first, then the `r` space-like axes. The indefinite form is
//!
//! ```text
//! u ⊛ v = -Σ_{i<s} u_i v_i + Σ_{j>=s} u_j v_j
//! ```
//!
//! and `H^{s,r}` is the level set `p ⊛ p = R²`.
//!
//! The curve family implemented here starts at `(0,..,0, R_eff,..,R_eff)`
//! and puts every temporal coordinate on `√(r/s)·R_eff·sinh(√(sr)ψ)` and
//! every spatial coordinate on `R_eff·cosh(√(sr)ψ)`, with `R_eff = R/√r`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used by checks when the caller has no better value. Relative,
/// scaled by `R²` where a radius is involved.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Counts of minus (`s`, time-like) and plus (`r`, space-like) signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    s: usize,
    r: usize,
}

impl Signature {
    pub fn new(s: usize, r: usize) -> Result<Self> {
        if s == 0 || r == 0 {
            return Err(Error::InvalidSignature { s, r });
        }
        Ok(Self { s, r })
    }

    /// Number of time-like axes.
    pub fn s(&self) -> usize {
        self.s
    }

    /// Number of space-like axes.
    pub fn r(&self) -> usize {
        self.r
    }

    /// Ambient dimension `s + r`.
    pub fn n(&self) -> usize {
        self.s + self.r
    }

    /// Diagonal of the metric matrix: `-1` on the first `s` axes, `+1` after.
    pub fn eta(&self) -> Vec<f64> {
        (0..self.n())
            .map(|k| if k < self.s { -1.0 } else { 1.0 })
            .collect()
    }

    pub fn is_temporal(&self, axis: usize) -> bool {
        axis < self.s
    }

    pub fn is_spatial(&self, axis: usize) -> bool {
        axis >= self.s && axis < self.n()
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: len,
            });
        }
        Ok(())
    }

    pub(crate) fn check_same(&self, other: &Signature) -> Result<()> {
        if self != other {
            return Err(Error::SignatureMismatch {
                left: *self,
                right: *other,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.s, self.r)
    }
}

/// The signed bilinear form `u ⊛ v`.
pub fn inner_product(u: &[f64], v: &[f64], sig: Signature) -> Result<f64> {
    sig.check_len(u.len())?;
    sig.check_len(v.len())?;
    let s = sig.s();
    let temporal: f64 = u[..s].iter().zip(&v[..s]).map(|(a, b)| a * b).sum();
    let spatial: f64 = u[s..].iter().zip(&v[s..]).map(|(a, b)| a * b).sum();
    Ok(spatial - temporal)
}

macro_rules! coordinate_tuple {
    ($name:ident, $temporal:ident, $spatial:ident) => {
        impl $name {
            pub fn new(sig: Signature, coords: Vec<f64>) -> Result<Self> {
                sig.check_len(coords.len())?;
                Ok(Self { sig, coords })
            }

            /// Builds from separate temporal and spatial blocks.
            pub fn from_blocks(sig: Signature, temporal: &[f64], spatial: &[f64]) -> Result<Self> {
                if temporal.len() != sig.s() {
                    return Err(Error::DimensionMismatch {
                        expected: sig.s(),
                        found: temporal.len(),
                    });
                }
                if spatial.len() != sig.r() {
                    return Err(Error::DimensionMismatch {
                        expected: sig.r(),
                        found: spatial.len(),
                    });
                }
                let mut coords = Vec::with_capacity(sig.n());
                coords.extend_from_slice(temporal);
                coords.extend_from_slice(spatial);
                Ok(Self { sig, coords })
            }

            pub fn zeros(sig: Signature) -> Self {
                Self {
                    sig,
                    coords: vec![0.0; sig.n()],
                }
            }

            pub fn signature(&self) -> Signature {
                self.sig
            }

            pub fn coords(&self) -> &[f64] {
                &self.coords
            }

            pub fn into_coords(self) -> Vec<f64> {
                self.coords
            }

            pub fn $temporal(&self) -> &[f64] {
                &self.coords[..self.sig.s()]
            }

            pub fn $spatial(&self) -> &[f64] {
                &self.coords[self.sig.s()..]
            }
        }
    };
}

/// A point of `ℝ^{s,r}`, usually one sampled on `H^{s,r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoPoint {
    sig: Signature,
    coords: Vec<f64>,
}

coordinate_tuple!(PseudoPoint, t, x);

impl PseudoPoint {
    /// `p ⊛ p`.
    pub fn quadratic_form(&self) -> f64 {
        // lengths are validated at construction
        inner_product(&self.coords, &self.coords, self.sig).unwrap_or(f64::NAN)
    }
}

/// Derivative `dp/dψ` of a curve, in the same coordinate layout as a point.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    sig: Signature,
    coords: Vec<f64>,
}

coordinate_tuple!(TangentVector, dt, dx);

impl TangentVector {
    pub fn quadratic_form(&self) -> f64 {
        inner_product(&self.coords, &self.coords, self.sig).unwrap_or(f64::NAN)
    }
}

/// `R_eff = R / √r`.
pub fn effective_radius(radius: f64, sig: Signature) -> Result<f64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!(
            "radius must be positive and finite, got {radius}"
        )));
    }
    Ok(radius / (sig.r() as f64).sqrt())
}

/// Signature plus the quadric constant `R` and the curve amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSpec {
    sig: Signature,
    radius: f64,
    amplitude: f64,
}

impl CurveSpec {
    /// Curve on `p ⊛ p = radius²`, with amplitude `radius / √r`.
    pub fn new(sig: Signature, radius: f64) -> Result<Self> {
        let amplitude = effective_radius(radius, sig)?;
        Ok(Self {
            sig,
            radius,
            amplitude,
        })
    }

    /// Curve with an explicit amplitude in place of `R_eff`.
    ///
    /// Anything other than `radius / √r` produces a curve that lies on the
    /// quadric of constant `r·amplitude²` instead of `radius²`. Used to check
    /// that the verification sweep actually detects a wrong amplitude.
    pub fn with_amplitude(sig: Signature, radius: f64, amplitude: f64) -> Result<Self> {
        effective_radius(radius, sig)?;
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::Domain(format!(
                "amplitude must be positive and finite, got {amplitude}"
            )));
        }
        Ok(Self {
            sig,
            radius,
            amplitude,
        })
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    /// The quadric constant `R`.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `R_eff`, the sinh/cosh amplitude.
    pub fn effective_radius(&self) -> f64 {
        self.amplitude
    }

    /// Angular rate `√(sr)` shared by every coordinate.
    pub fn rate(&self) -> f64 {
        ((self.sig.s() * self.sig.r()) as f64).sqrt()
    }

    /// Ratio `√(r/s)` scaling the temporal amplitude.
    fn temporal_scale(&self) -> f64 {
        (self.sig.r() as f64 / self.sig.s() as f64).sqrt()
    }

    /// The point `(0,..,0, R_eff,..,R_eff)` at `ψ = 0`.
    pub fn initial_point(&self) -> PseudoPoint {
        let mut coords = vec![0.0; self.sig.n()];
        coords[self.sig.s()..].fill(self.amplitude);
        PseudoPoint {
            sig: self.sig,
            coords,
        }
    }
}

fn broadcast(sig: Signature, temporal: f64, spatial: f64) -> Vec<f64> {
    let mut coords = vec![temporal; sig.n()];
    coords[sig.s()..].fill(spatial);
    coords
}

/// Point of the uniform curve at parameter `psi`.
pub fn point_at(psi: f64, spec: &CurveSpec) -> PseudoPoint {
    let arg = spec.rate() * psi;
    let t = spec.temporal_scale() * spec.amplitude * arg.sinh();
    let x = spec.amplitude * arg.cosh();
    PseudoPoint {
        sig: spec.sig,
        coords: broadcast(spec.sig, t, x),
    }
}

/// Velocity `dp/dψ` of the uniform curve at `psi`.
pub fn velocity_at(psi: f64, spec: &CurveSpec) -> TangentVector {
    let arg = spec.rate() * psi;
    let dt = spec.sig.r() as f64 * spec.amplitude * arg.cosh();
    let dx = spec.rate() * spec.amplitude * arg.sinh();
    TangentVector {
        sig: spec.sig,
        coords: broadcast(spec.sig, dt, dx),
    }
}

/// `|p ⊛ p - radius²| <= tol`.
pub fn is_on_hyperboloid(p: &PseudoPoint, radius: f64, tol: f64) -> bool {
    (p.quadratic_form() - radius * radius).abs() <= tol
}

/// `|p ⊛ v| <= tol`.
pub fn is_h_orthogonal(p: &PseudoPoint, v: &TangentVector, tol: f64) -> Result<bool> {
    p.signature().check_same(&v.signature())?;
    let form = inner_product(p.coords(), v.coords(), p.signature())?;
    Ok(form.abs() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn sig(s: usize, r: usize) -> Signature {
        Signature::new(s, r).unwrap()
    }

    #[test]
    fn degenerate_signatures_rejected() {
        assert!(matches!(
            Signature::new(0, 3),
            Err(Error::InvalidSignature { s: 0, r: 3 })
        ));
        assert!(Signature::new(2, 0).is_err());
        assert_eq!(sig(2, 3).n(), 5);
        assert_eq!(sig(2, 3).eta(), vec![-1.0, -1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn inner_product_examples() {
        let r = 1.7;
        assert_eq!(
            inner_product(&[0.0, r], &[0.0, r], sig(1, 1)).unwrap(),
            r * r
        );
        let zero = [0.0; 5];
        assert_eq!(
            inner_product(&zero, &[3.0, -1.0, 2.0, 8.0, 0.5], sig(2, 3)).unwrap(),
            0.0
        );
        let u = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(inner_product(&u, &u, sig(2, 3)).unwrap(), 45.0);
    }

    #[test]
    fn inner_product_dimension_mismatch() {
        let err = inner_product(&[1.0, 2.0], &[1.0, 2.0, 3.0], sig(1, 1)).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch {
                expected: 2,
                found: 3
            }
        ));
        assert!(inner_product(&[1.0; 4], &[1.0; 4], sig(2, 3)).is_err());
    }

    #[test]
    fn effective_radius_examples() {
        assert_eq!(effective_radius(1.0, sig(1, 1)).unwrap(), 1.0);
        assert_eq!(effective_radius(2.0, sig(3, 4)).unwrap(), 1.0);
        assert_relative_eq!(
            effective_radius(2f64.sqrt(), sig(2, 2)).unwrap(),
            1.0,
            max_relative = 1e-15
        );
        assert!(effective_radius(0.0, sig(1, 1)).is_err());
        assert!(effective_radius(-1.0, sig(1, 1)).is_err());
        assert!(effective_radius(f64::NAN, sig(1, 1)).is_err());
    }

    #[test]
    fn effective_radius_restores_quadric() {
        for s in 1..=4 {
            for r in 1..=4 {
                let radius = 2.0;
                let spec = CurveSpec::new(sig(s, r), radius).unwrap();
                let p = point_at(0.0, &spec);
                assert_relative_eq!(p.quadratic_form(), 4.0, max_relative = 1e-15);
                let re = spec.effective_radius();
                assert_relative_eq!(r as f64 * re * re, 4.0, max_relative = 1e-15);
            }
        }
    }

    #[test]
    fn point_at_initial_condition() {
        let spec = CurveSpec::new(sig(3, 2), 1.5).unwrap();
        let p = point_at(0.0, &spec);
        let re = spec.effective_radius();
        assert_eq!(p.coords(), &[0.0, 0.0, 0.0, re, re]);
        assert_eq!(p, spec.initial_point());
    }

    #[test]
    fn point_and_velocity_base_case() {
        let spec = CurveSpec::new(sig(1, 1), 1.0).unwrap();
        for &psi in &[-1.2, 0.0, 0.4, 2.5] {
            let p = point_at(psi, &spec);
            let v = velocity_at(psi, &spec);
            assert_eq!(p.coords(), &[f64::sinh(psi), f64::cosh(psi)]);
            assert_eq!(v.coords(), &[f64::cosh(psi), f64::sinh(psi)]);
        }
    }

    #[test]
    fn sig22_half() {
        let spec = CurveSpec::new(sig(2, 2), 2f64.sqrt()).unwrap();
        let p = point_at(0.5, &spec);
        let v = velocity_at(0.5, &spec);
        let (sh, ch) = (1f64.sinh(), 1f64.cosh());
        for (got, want) in p.coords().iter().zip([sh, sh, ch, ch]) {
            assert_relative_eq!(*got, want, max_relative = 1e-15);
        }
        for (got, want) in v
            .coords()
            .iter()
            .zip([2.0 * ch, 2.0 * ch, 2.0 * sh, 2.0 * sh])
        {
            assert_relative_eq!(*got, want, max_relative = 1e-15);
        }
        // independent evaluation: -2 sinh^2 1 + 2 cosh^2 1
        let form = -2.0 * sh * sh + 2.0 * ch * ch;
        assert_relative_eq!(form, 2.0, max_relative = 1e-14);
        assert_relative_eq!(p.quadratic_form(), 2.0, max_relative = 1e-14);
        assert!(is_h_orthogonal(&p, &v, 1e-12).unwrap());
    }

    #[test]
    fn velocity_at_zero() {
        let spec = CurveSpec::new(sig(3, 2), 1.0).unwrap();
        let v = velocity_at(0.0, &spec);
        let rr = 2.0 * spec.effective_radius();
        assert_eq!(v.coords(), &[rr, rr, rr, 0.0, 0.0]);
    }

    #[test]
    fn hyperboloid_membership() {
        let spec = CurveSpec::new(sig(1, 1), 1.0).unwrap();
        assert!(is_on_hyperboloid(&point_at(1.3, &spec), 1.0, 1e-12));
        let null = PseudoPoint::new(sig(1, 1), vec![1.0, 1.0]).unwrap();
        assert!(!is_on_hyperboloid(&null, 1.0, 1e-12));
    }

    #[test]
    fn h_orthogonality() {
        let s11 = sig(1, 1);
        let p = PseudoPoint::new(s11, vec![0.0, 3.0]).unwrap();
        let v = TangentVector::new(s11, vec![-7.5, 0.0]).unwrap();
        assert!(is_h_orthogonal(&p, &v, 1e-10).unwrap());

        let p = PseudoPoint::new(s11, vec![1.0, 2.0]).unwrap();
        let v = TangentVector::new(s11, vec![1.0, 2.0]).unwrap();
        assert!(!is_h_orthogonal(&p, &v, 1e-10).unwrap());

        let other = TangentVector::zeros(sig(1, 2));
        assert!(matches!(
            is_h_orthogonal(&p, &other, 1e-10),
            Err(Error::SignatureMismatch { .. })
        ));
    }

    #[test]
    fn from_blocks_layout() {
        let p = PseudoPoint::from_blocks(sig(2, 1), &[1.0, 2.0], &[3.0]).unwrap();
        assert_eq!(p.t(), &[1.0, 2.0]);
        assert_eq!(p.x(), &[3.0]);
        assert!(PseudoPoint::from_blocks(sig(2, 1), &[1.0], &[3.0, 4.0]).is_err());
        assert!(PseudoPoint::new(sig(2, 1), vec![1.0]).is_err());
    }

    fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    fn any_spec() -> impl Strategy<Value = CurveSpec> {
        (1usize..=4, 1usize..=4, 0.1f64..5.0)
            .prop_map(|(s, r, radius)| CurveSpec::new(sig(s, r), radius).unwrap())
    }

    proptest! {
        #[test]
        fn closed_form_invariants(spec in any_spec(), psi in -2.0f64..2.0) {
            let p = point_at(psi, &spec);
            let v = velocity_at(psi, &spec);
            let r2 = spec.radius().powi(2);
            let sig = spec.signature();
            prop_assert!((p.quadratic_form() - r2).abs() <= 1e-9 * r2);
            let ortho = inner_product(p.coords(), v.coords(), sig).unwrap();
            prop_assert!(ortho.abs() <= 1e-9 * r2);
            let vnorm = -((sig.s() * sig.r()) as f64) * r2;
            prop_assert!((v.quadratic_form() - vnorm).abs() <= 1e-9 * vnorm.abs());
        }

        #[test]
        fn coordinates_are_uniform(spec in any_spec(), psi in -3.0f64..3.0) {
            let p = point_at(psi, &spec);
            let v = velocity_at(psi, &spec);
            prop_assert!(p.t().iter().all(|c| c.to_bits() == p.t()[0].to_bits()));
            prop_assert!(p.x().iter().all(|c| c.to_bits() == p.x()[0].to_bits()));
            prop_assert!(v.dt().iter().all(|c| c.to_bits() == v.dt()[0].to_bits()));
            prop_assert!(v.dx().iter().all(|c| c.to_bits() == v.dx()[0].to_bits()));
        }

        #[test]
        fn velocity_is_derivative(spec in any_spec(), psi in -1.0f64..1.0) {
            let h = 1e-5;
            let v = velocity_at(psi, &spec);
            let tol = 1e-8 * (spec.signature().r() as f64 * spec.effective_radius()).max(1.0);
            for k in 0..spec.signature().n() {
                let fd = central_diff(|q| point_at(q, &spec).coords()[k], psi, h);
                prop_assert!((fd - v.coords()[k]).abs() <= tol,
                    "k={} fd={} v={}", k, fd, v.coords()[k]);
            }
        }

        #[test]
        fn inner_product_symmetric_bilinear(
            (s, r) in (1usize..=4, 1usize..=4),
            seed in proptest::collection::vec(-10.0f64..10.0, 24),
            a in -3.0f64..3.0,
            b in -3.0f64..3.0,
        ) {
            let sig = sig(s, r);
            let n = sig.n();
            let (u, rest) = seed.split_at(n);
            let (v, rest) = rest.split_at(n);
            let w = &rest[..n];
            prop_assert_eq!(
                inner_product(u, v, sig).unwrap().to_bits(),
                inner_product(v, u, sig).unwrap().to_bits()
            );
            let combo: Vec<f64> = u.iter().zip(v).map(|(x, y)| a * x + b * y).collect();
            let lhs = inner_product(&combo, w, sig).unwrap();
            let rhs = a * inner_product(u, w, sig).unwrap() + b * inner_product(v, w, sig).unwrap();
            let scale: f64 = 1.0 + combo.iter().chain(w).map(|c| c * c).sum::<f64>();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }
    }
}
