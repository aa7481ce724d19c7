//! Invariant sweep over a grid of signatures and radii.
//!
//! Each cell `(s, r, R)` runs the closed-form checks (quadric, orthogonality,
//! velocity norm, uniformity), integrates the system from the initial
//! condition and compares it with the closed form, checks the bundle towers,
//! and pushes curve points through every generator.

use rayon::prelude::*;
use serde::Serialize;

use crate::bundle::{bundle_dim, curve_lift, project, DEFAULT_MAX_ORDER};
use crate::error::{Error, Result};
use crate::geometry::{inner_product, CurveSpec, Signature};
use crate::ode::{closed_form_trajectory, integrate, max_deviation, IntegratorConfig, Trajectory};
use crate::transform::{
    apply, apply_tangent, block_rotation, boost, is_isometry, PseudoOrthogonalMap,
};

/// Relative tolerance for the integrated flow, against the closed form and
/// for conservation of both invariants.
pub const ODE_TOL: f64 = 1e-7;

/// Deliberate defects for checking that the sweep can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Use `R` as the curve amplitude instead of `R / √r`.
    UnscaledAmplitude,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    /// Signatures `(s, r)` with `1 <= s, r <= max_count`.
    pub max_count: usize,
    pub radii: Vec<f64>,
    pub psi_start: f64,
    pub psi_end: f64,
    /// Number of ψ intervals for the closed-form checks.
    pub samples: usize,
    pub ode_steps: usize,
    pub tol: f64,
    pub fault: Option<Fault>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            max_count: 4,
            radii: vec![1.0],
            psi_start: -2.0,
            psi_end: 2.0,
            samples: 100,
            ode_steps: 2000,
            tol: crate::geometry::DEFAULT_TOL,
            fault: None,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_count == 0 {
            return Err(Error::Domain("signature bound must be at least 1".into()));
        }
        if self.radii.is_empty() {
            return Err(Error::Domain("at least one radius is required".into()));
        }
        if let Some(bad) = self.radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
            return Err(Error::Domain(format!("radius must be positive, got {bad}")));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Domain(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.samples == 0 || self.ode_steps == 0 {
            return Err(Error::Domain(
                "sample and step counts must be at least 1".into(),
            ));
        }
        if !(self.psi_start.is_finite() && self.psi_end.is_finite())
            || self.psi_start >= self.psi_end
        {
            return Err(Error::Domain(format!(
                "psi range [{}, {}] is empty",
                self.psi_start, self.psi_end
            )));
        }
        Ok(())
    }

    fn spec(&self, sig: Signature, radius: f64) -> Result<CurveSpec> {
        match self.fault {
            None => CurveSpec::new(sig, radius),
            Some(Fault::UnscaledAmplitude) => CurveSpec::with_amplitude(sig, radius, radius),
        }
    }
}

/// Worst residuals and pass flags for one `(s, r, R)` cell. Residuals are
/// normalized by the quantity their tolerance is relative to.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellReport {
    pub s: usize,
    pub r: usize,
    pub radius: f64,
    /// max |p⊛p - R²| / R²
    pub form: f64,
    /// max |p⊛ṗ| / R²
    pub ortho: f64,
    /// max |ṗ⊛ṗ + s·r·R²| / (s·r·R²)
    pub velocity_norm: f64,
    /// integrated vs closed form, divided by its bound
    pub ode_ratio: f64,
    /// max over the integrated flow of |p⊛p - R²| and |p⊛ṗ|, over R²
    pub conservation: f64,
    pub uniform: bool,
    pub bundle: bool,
    /// max |G(p)⊛G(p) - R²| / R² over generators G
    pub transform: f64,
    pub passed: bool,
}

impl CellReport {
    /// Names of the failed checks.
    pub fn failures(&self, tol: f64) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !within(self.form, tol) {
            out.push("form");
        }
        if !within(self.ortho, tol) {
            out.push("ortho");
        }
        if !within(self.velocity_norm, tol) {
            out.push("velocity_norm");
        }
        if !within(self.ode_ratio, 1.0) {
            out.push("ode");
        }
        if !within(self.conservation, ODE_TOL) {
            out.push("conservation");
        }
        if !self.uniform {
            out.push("uniform");
        }
        if !self.bundle {
            out.push("bundle");
        }
        if !within(self.transform, tol) {
            out.push("transform");
        }
        out
    }
}

// false for NaN
fn within(value: f64, tol: f64) -> bool {
    value <= tol
}

fn bitwise_uniform(block: &[f64]) -> bool {
    block.iter().all(|c| c.to_bits() == block[0].to_bits())
}

fn trajectory_uniform(traj: &Trajectory) -> bool {
    traj.samples().iter().all(|s| {
        bitwise_uniform(s.point.t())
            && bitwise_uniform(s.point.x())
            && bitwise_uniform(s.velocity.dt())
            && bitwise_uniform(s.velocity.dx())
    })
}

/// Every single-plane generator of the signature at a fixed, nonzero angle.
pub fn generators(sig: Signature) -> Vec<PseudoOrthogonalMap> {
    let n = sig.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let g = if sig.is_temporal(i) == sig.is_temporal(j) {
                block_rotation(sig, i, j, 0.7)
            } else {
                boost(sig, i, j, 0.5)
            };
            out.push(g.expect("indices are in range"));
        }
    }
    out
}

/// Runs every check for one cell.
pub fn verify_cell(sig: Signature, radius: f64, cfg: &VerifyConfig) -> Result<CellReport> {
    let spec = cfg.spec(sig, radius)?;
    let r2 = radius * radius;
    let sr = (sig.s() * sig.r()) as f64;

    let grid_cfg = IntegratorConfig::new(cfg.psi_start, cfg.psi_end, cfg.samples, spec)?;
    let closed = closed_form_trajectory(&grid_cfg)?;

    let (mut form, mut ortho, mut vnorm) = (0.0f64, 0.0f64, 0.0f64);
    for s in closed.samples() {
        let p = s.point.coords();
        let v = s.velocity.coords();
        form = form.max((inner_product(p, p, sig)? - r2).abs() / r2);
        ortho = ortho.max(inner_product(p, v, sig)?.abs() / r2);
        vnorm = vnorm.max((inner_product(v, v, sig)? + sr * r2).abs() / (sr * r2));
    }
    let mut uniform = trajectory_uniform(&closed);

    // integrate away from ψ = 0 in each direction the range covers
    let mut ode_ratio = 0.0f64;
    let mut conservation = 0.0f64;
    for end in [cfg.psi_start, cfg.psi_end] {
        if end == 0.0 {
            continue;
        }
        let ode_cfg = IntegratorConfig::new(0.0, end, cfg.ode_steps, spec)?;
        let numeric = integrate(&ode_cfg, &spec.initial_point())?;
        let exact = closed_form_trajectory(&ode_cfg)?;
        let bound = ODE_TOL
            * (1.0 + sig.r() as f64 * spec.effective_radius() * (end.abs() * spec.rate()).cosh());
        ode_ratio = ode_ratio.max(max_deviation(&numeric, &exact)? / bound);
        for s in numeric.samples() {
            let p = s.point.coords();
            let v = s.velocity.coords();
            conservation = conservation.max((inner_product(p, p, sig)? - r2).abs() / r2);
            conservation = conservation.max(inner_product(p, v, sig)?.abs() / r2);
        }
        uniform &= trajectory_uniform(&numeric);
    }

    let mut bundle = true;
    for &psi in &[cfg.psi_start, 0.0, cfg.psi_end] {
        let mut below = curve_lift(&spec, psi, 0)?;
        for order in 1..=DEFAULT_MAX_ORDER {
            let lift = curve_lift(&spec, psi, order)?;
            bundle &= lift.coords().len() == bundle_dim(sig.n(), order)?;
            bundle &= project(&lift)? == below;
            below = lift;
        }
    }

    let mut transform = 0.0f64;
    for g in generators(sig) {
        if !is_isometry(&g, 1e-12) {
            transform = f64::INFINITY;
        }
        for s in closed.samples() {
            let p = apply(&g, &s.point)?;
            let v = apply_tangent(&g, &s.velocity)?;
            transform = transform.max((p.quadratic_form() - r2).abs() / r2);
            transform = transform.max(inner_product(p.coords(), v.coords(), sig)?.abs() / r2);
        }
    }

    let mut report = CellReport {
        s: sig.s(),
        r: sig.r(),
        radius,
        form,
        ortho,
        velocity_norm: vnorm,
        ode_ratio,
        conservation,
        uniform,
        bundle,
        transform,
        passed: false,
    };
    report.passed = report.failures(cfg.tol).is_empty();
    Ok(report)
}

/// Runs [`verify_cell`] over the whole grid. Cells are evaluated in parallel;
/// the result is ordered by `(s, r, R)` with radii in the configured order.
pub fn verify_grid(cfg: &VerifyConfig) -> Result<Vec<CellReport>> {
    cfg.validate()?;
    let mut cells = Vec::new();
    for s in 1..=cfg.max_count {
        for r in 1..=cfg.max_count {
            for &radius in &cfg.radii {
                cells.push((Signature::new(s, r)?, radius));
            }
        }
    }
    cells
        .par_iter()
        .map(|&(sig, radius)| verify_cell(sig, radius, cfg))
        .collect()
}
