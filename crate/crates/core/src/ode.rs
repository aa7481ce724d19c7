//! The constrained first-order system
//!
//! ```text
//! dx_j/dψ = Σ_i t_i      (every spatial axis j)
//! dt_i/dψ = Σ_j x_j      (every temporal axis i)
//! ```
//!
//! and a fixed-step classical RK4 integrator for it, with checks that compare
//! the numeric flow against the closed-form curve.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{point_at, velocity_at, CurveSpec, PseudoPoint, Signature, TangentVector};

#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub psi: f64,
    pub point: PseudoPoint,
}

/// Right-hand side written into `out`. Both block sums are computed once and
/// broadcast, so every axis of a block receives a bit-identical derivative.
fn rhs_into(sig: Signature, y: &[f64], out: &mut [f64]) {
    let s = sig.s();
    let sum_t: f64 = y[..s].iter().sum();
    let sum_x: f64 = y[s..].iter().sum();
    out[..s].fill(sum_x);
    out[s..].fill(sum_t);
}

/// Derivative of the system at `state`.
pub fn system_rhs(state: &SystemState) -> TangentVector {
    let sig = state.point.signature();
    let mut out = vec![0.0; sig.n()];
    rhs_into(sig, state.point.coords(), &mut out);
    TangentVector::new(sig, out).expect("length matches signature")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub psi_start: f64,
    pub psi_end: f64,
    pub steps: usize,
    pub spec: CurveSpec,
}

impl IntegratorConfig {
    pub fn new(psi_start: f64, psi_end: f64, steps: usize, spec: CurveSpec) -> Result<Self> {
        let cfg = Self {
            psi_start,
            psi_end,
            steps,
            spec,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Domain("steps must be at least 1".into()));
        }
        if !self.psi_start.is_finite() || !self.psi_end.is_finite() {
            return Err(Error::Domain("psi range must be finite".into()));
        }
        Ok(())
    }

    /// Signed step `(psi_end - psi_start) / steps`.
    pub fn step(&self) -> f64 {
        (self.psi_end - self.psi_start) / self.steps as f64
    }

    /// Sample parameters including both endpoints. A zero-length interval
    /// collapses to the single value `psi_start`.
    pub fn grid(&self) -> Vec<f64> {
        if self.psi_end == self.psi_start {
            return vec![self.psi_start];
        }
        let span = self.psi_end - self.psi_start;
        let n = self.steps as f64;
        (0..=self.steps)
            .map(|k| {
                if k == self.steps {
                    self.psi_end
                } else {
                    self.psi_start + span * k as f64 / n
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Integrated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub psi: f64,
    pub point: PseudoPoint,
    pub velocity: TangentVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<Sample>,
    spec: CurveSpec,
    provenance: Provenance,
}

impl Trajectory {
    /// Checks that the samples share the spec signature and that `psi` is
    /// strictly monotone.
    pub fn new(spec: CurveSpec, provenance: Provenance, samples: Vec<Sample>) -> Result<Self> {
        let sig = spec.signature();
        for s in &samples {
            sig.check_same(&s.point.signature())?;
            sig.check_same(&s.velocity.signature())?;
        }
        if samples.len() >= 2 {
            let increasing = samples[1].psi > samples[0].psi;
            let monotone = samples.windows(2).all(|w| {
                if increasing {
                    w[1].psi > w[0].psi
                } else {
                    w[1].psi < w[0].psi
                }
            });
            if !monotone {
                return Err(Error::GridMismatch("psi is not strictly monotone".into()));
            }
        }
        Ok(Self {
            samples,
            spec,
            provenance,
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn spec(&self) -> &CurveSpec {
        &self.spec
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Fixed-step classical RK4 from `initial` over the configured grid.
pub fn integrate(cfg: &IntegratorConfig, initial: &PseudoPoint) -> Result<Trajectory> {
    cfg.validate()?;
    let sig = cfg.spec.signature();
    sig.check_same(&initial.signature())?;
    let n = sig.n();
    let h = cfg.step();
    let grid = cfg.grid();

    let mut y = initial.coords().to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    let sample = |psi: f64, y: &[f64], dy: &[f64]| -> Result<Sample> {
        Ok(Sample {
            psi,
            point: PseudoPoint::new(sig, y.to_vec())?,
            velocity: TangentVector::new(sig, dy.to_vec())?,
        })
    };

    let mut samples = Vec::with_capacity(grid.len());
    rhs_into(sig, &y, &mut k1);
    samples.push(sample(grid[0], &y, &k1)?);

    for &psi in &grid[1..] {
        // k1 holds f(y) from the previous sample
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        rhs_into(sig, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        rhs_into(sig, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + h * k3[i];
        }
        rhs_into(sig, &tmp, &mut k4);
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        rhs_into(sig, &y, &mut k1);
        samples.push(sample(psi, &y, &k1)?);
    }

    Trajectory::new(cfg.spec, Provenance::Integrated, samples)
}

/// Closed-form curve sampled on the same grid as [`integrate`].
pub fn closed_form_trajectory(cfg: &IntegratorConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let samples = cfg
        .grid()
        .into_iter()
        .map(|psi| Sample {
            psi,
            point: point_at(psi, &cfg.spec),
            velocity: velocity_at(psi, &cfg.spec),
        })
        .collect();
    Trajectory::new(cfg.spec, Provenance::ClosedForm, samples)
}

/// Largest absolute coordinate difference over both the point and the
/// velocity channel.
pub fn max_deviation(a: &Trajectory, b: &Trajectory) -> Result<f64> {
    a.spec.signature().check_same(&b.spec.signature())?;
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!(
            "{} samples vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut worst = 0.0f64;
    for (k, (sa, sb)) in a.samples.iter().zip(&b.samples).enumerate() {
        if sa.psi != sb.psi {
            return Err(Error::GridMismatch(format!(
                "sample {k}: psi {} vs {}",
                sa.psi, sb.psi
            )));
        }
        let pairs = sa
            .point
            .coords()
            .iter()
            .zip(sb.point.coords())
            .chain(sa.velocity.coords().iter().zip(sb.velocity.coords()));
        for (x, y) in pairs {
            worst = worst.max((x - y).abs());
        }
    }
    Ok(worst)
}

/// Max over interior samples and spatial axes of `|x'' - s·r·x|`, with `x''`
/// from the central second difference.
pub fn second_order_residual(traj: &Trajectory) -> Result<f64> {
    let samples = traj.samples();
    if samples.len() < 3 {
        return Err(Error::GridMismatch(format!(
            "need at least 3 samples, got {}",
            samples.len()
        )));
    }
    let last = samples.len() - 1;
    let h = (samples[last].psi - samples[0].psi) / last as f64;
    for w in samples.windows(2) {
        let d = w[1].psi - w[0].psi;
        if (d - h).abs() > 1e-8 * h.abs() {
            return Err(Error::GridMismatch(
                "samples are not uniformly spaced".into(),
            ));
        }
    }
    let sig = traj.spec.signature();
    let sr = (sig.s() * sig.r()) as f64;
    let mut worst = 0.0f64;
    for k in 1..last {
        let (prev, cur, next) = (
            samples[k - 1].point.x(),
            samples[k].point.x(),
            samples[k + 1].point.x(),
        );
        for j in 0..sig.r() {
            let second = (next[j] - 2.0 * cur[j] + prev[j]) / (h * h);
            worst = worst.max((second - sr * cur[j]).abs());
        }
    }
    Ok(worst)
}
