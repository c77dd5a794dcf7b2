//! Orbits P and Q: integration off the saddle unstable manifolds with dense
//! output, event stopping, and first-integral drift control.
//!
//! P leaves S₊ = (A, 0) along the eigendirection with U and V both increasing
//! and is cut at U = U_stop; Q leaves S₋ = (B, 0) with U increasing and V
//! decreasing and is cut by the blow-up guard V ≤ V_floor, since the orbit
//! reaches U → c, V → −∞ at finite parameter. Launches sit at distance ε
//! along the normalized unstable eigenvector; H(U, V) is conserved along
//! both orbits and its relative drift across nodes is enforced.

use crate::error::{Error, Result};
use crate::ode::{self, DenseNode, OdeOptions, Outcome};
use crate::phase_plane::{first_integral_h, saddle_data, vector_field, PlanarPoint, WaveParams};

/// Which saddle an orbit was launched from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SaddleLabel {
    SMinus,
    SPlus,
}

/// Launch record: saddle, offset magnitude, and the actual start point.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Launch {
    pub saddle: SaddleLabel,
    pub epsilon: f64,
    pub point: PlanarPoint,
}

/// Why integration stopped.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", content = "detail")]
pub enum Termination {
    TargetReached(String),
    BlowUpGuard(String),
    StepFloor(String),
}

/// Offsets, tolerances, and guards for both orbits; `epsilon` and `u_stop`
/// default from the parameters when unset (1e−7 × max(1,|A|,|B|) and A+2).
#[derive(Debug, Clone, Copy)]
pub struct ShootingConfig {
    pub epsilon: Option<f64>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub u_stop: Option<f64>,
    pub v_floor: f64,
    pub h_drift_tol: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            epsilon: None,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.005,
            u_stop: None,
            v_floor: -50.0,
            h_drift_tol: 1e-8,
        }
    }
}

impl ShootingConfig {
    /// Offset magnitude, scaled to the saddle locations when unset.
    pub fn resolve_epsilon(&self, p: &WaveParams) -> f64 {
        self.epsilon
            .unwrap_or(1e-7 * p.a.abs().max(p.b.abs()).max(1.0))
    }

    /// Stop value for U on P; the default 2c − B covers every matched point.
    pub fn resolve_u_stop(&self, p: &WaveParams) -> f64 {
        self.u_stop.unwrap_or(2.0 * p.c - p.b)
    }

    fn validate(&self, p: &WaveParams) -> Result<()> {
        if !(self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.max_step > 0.0
            && self.h_drift_tol > 0.0)
        {
            return Err(Error::InvalidParams(
                "shooting tolerances must be positive".into(),
            ));
        }
        let eps = self.resolve_epsilon(p);
        let scale = p.a.abs().max(p.b.abs()).max(1.0);
        if !(eps > 0.0) {
            return Err(Error::InvalidParams(format!(
                "offset ε = {eps} must be positive"
            )));
        }
        // Quadratic remainder of the linearization at the launch point stays
        // below the local error scale: ε² ≤ rel_tol · scale.
        if eps * eps > self.rel_tol * scale {
            return Err(Error::InvalidParams(format!(
                "offset ε = {eps} too large for rel_tol = {}",
                self.rel_tol
            )));
        }
        Ok(())
    }

    fn ode_options(&self) -> OdeOptions {
        OdeOptions {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            initial_step: None,
            max_steps: 2_000_000,
        }
    }
}

/// One accepted node of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrajectoryNode {
    pub z: f64,
    pub point: PlanarPoint,
    pub derivative: PlanarPoint,
}

/// An orbit of the planar system, adaptively sampled with stored derivatives
/// for Hermite dense evaluation.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Trajectory {
    pub params: WaveParams,
    pub nodes: Vec<TrajectoryNode>,
    pub launch: Launch,
    pub termination: Termination,
}

impl Trajectory {
    pub fn z_first(&self) -> f64 {
        self.nodes.first().map_or(0.0, |n| n.z)
    }

    pub fn z_last(&self) -> f64 {
        self.nodes.last().map_or(0.0, |n| n.z)
    }

    /// H at the launch point, the reference level for drift checks.
    pub fn h_reference(&self) -> f64 {
        first_integral_h(&self.params, self.launch.point)
    }

    /// Max over nodes of |H(node) − H(launch)| / |H(launch)|.
    pub fn max_h_drift(&self) -> f64 {
        let h0 = self.h_reference();
        let scale = h0.abs().max(f64::MIN_POSITIVE);
        self.nodes
            .iter()
            .map(|n| (first_integral_h(&self.params, n.point) - h0).abs() / scale)
            .fold(0.0, f64::max)
    }

    /// CSV dump with header `z,U,V,dU,dV`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("z,U,V,dU,dV\n");
        for n in &self.nodes {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                n.z, n.point.u, n.point.v, n.derivative.u, n.derivative.v
            ));
        }
        out
    }

    /// Launch and termination record for the JSON manifest.
    pub fn manifest(&self) -> serde_json::Value {
        serde_json::json!({
            "params": self.params,
            "launch": self.launch,
            "termination": self.termination,
            "node_count": self.nodes.len(),
            "z_span": [self.z_first(), self.z_last()],
        })
    }
}

fn node_from(params: &WaveParams, z: f64, y: [f64; 2]) -> TrajectoryNode {
    let point = PlanarPoint::new(y[0], y[1]);
    TrajectoryNode {
        z,
        point,
        derivative: vector_field(params, point),
    }
}

fn build_trajectory(
    p: &WaveParams,
    cfg: &ShootingConfig,
    launch: Launch,
    run: ode::Integration,
    termination: Termination,
) -> Result<Trajectory> {
    let nodes = run
        .nodes
        .iter()
        .map(|n: &DenseNode| node_from(p, n.z, n.y))
        .collect();
    let t = Trajectory {
        params: *p,
        nodes,
        launch,
        termination,
    };
    let drift = t.max_h_drift();
    if drift > cfg.h_drift_tol {
        return Err(Error::ConservationDrift {
            drift,
            tol: cfg.h_drift_tol,
        });
    }
    Ok(t)
}

/// Shoots the orbit P from S₊ = (A, 0): both components increase until
/// U reaches U_stop.
pub fn shoot_p(p: &WaveParams, cfg: &ShootingConfig) -> Result<Trajectory> {
    if !p.shock_regime {
        return Err(Error::Regime(format!(
            "shooting requires the shock regime A > B + 2, got A = {}, B = {}",
            p.a, p.b
        )));
    }
    cfg.validate(p)?;
    let (_, sp) = saddle_data(p)?;
    let eps = cfg.resolve_epsilon(p);
    let dir = sp.unit_unstable();
    let y0 = [sp.location.u + eps * dir.u, sp.location.v + eps * dir.v];
    let u_stop = cfg.resolve_u_stop(p);
    if u_stop <= y0[0] {
        return Err(Error::InvalidParams(format!(
            "U_stop = {u_stop} must exceed the launch U"
        )));
    }

    let field = |y: [f64; 2]| {
        let f = vector_field(p, PlanarPoint::new(y[0], y[1]));
        [f.u, f.v]
    };
    let run = ode::integrate(
        field,
        y0,
        &cfg.ode_options(),
        &[|y: [f64; 2]| y[0] - u_stop],
        None,
    )?;
    let termination = match run.outcome {
        Outcome::EventHit { .. } => {
            Termination::TargetReached(format!("U reached U_stop = {u_stop}"))
        }
        _ => {
            return Err(Error::Integration(format!(
                "step floor before U_stop; last state ({}, {})",
                run.nodes.last().unwrap().y[0],
                run.nodes.last().unwrap().y[1]
            )))
        }
    };
    let launch = Launch {
        saddle: SaddleLabel::SPlus,
        epsilon: eps,
        point: PlanarPoint::new(y0[0], y0[1]),
    };
    let t = build_trajectory(p, cfg, launch, run, termination)?;
    for w in t.nodes.windows(2) {
        if !(w[1].point.u > w[0].point.u && w[1].point.v > w[0].point.v) {
            return Err(Error::Integration(format!(
                "P lost monotonicity near z = {}",
                w[1].z
            )));
        }
    }
    Ok(t)
}

/// Shoots the orbit Q from S₋ = (B, 0): U increases toward c while V
/// decreases, stopped by the blow-up guard V ≤ V_floor (or U within the
/// guard gap of c).
pub fn shoot_q(p: &WaveParams, cfg: &ShootingConfig) -> Result<Trajectory> {
    if !p.shock_regime {
        return Err(Error::Regime(format!(
            "shooting requires the shock regime A > B + 2, got A = {}, B = {}",
            p.a, p.b
        )));
    }
    cfg.validate(p)?;
    let (sm, _) = saddle_data(p)?;
    let eps = cfg.resolve_epsilon(p);
    let dir = sm.unit_unstable();
    let y0 = [sm.location.u + eps * dir.u, sm.location.v + eps * dir.v];
    let v_floor = cfg.v_floor;
    if v_floor >= 0.0 {
        return Err(Error::InvalidParams(format!(
            "V_floor = {v_floor} must be negative"
        )));
    }
    let u_guard = p.c - 1e-6 * (p.c - p.b);

    let field = |y: [f64; 2]| {
        let f = vector_field(p, PlanarPoint::new(y[0], y[1]));
        [f.u, f.v]
    };
    let events: [Box<dyn Fn([f64; 2]) -> f64>; 2] = [
        Box::new(move |y: [f64; 2]| v_floor - y[1]),
        Box::new(move |y: [f64; 2]| y[0] - u_guard),
    ];
    let run = ode::integrate(field, y0, &cfg.ode_options(), &events, None)?;
    let termination = match run.outcome {
        Outcome::EventHit { index: 0 } => Termination::BlowUpGuard(format!(
            "V reached V_floor = {v_floor}; orbit approaching U → c, V → −∞"
        )),
        Outcome::EventHit { .. } => Termination::BlowUpGuard(format!(
            "U reached the guard c − {:.3e} while V → −∞",
            p.c - u_guard
        )),
        _ => {
            return Err(Error::Integration(format!(
                "step floor before the blow-up guard; last state ({}, {})",
                run.nodes.last().unwrap().y[0],
                run.nodes.last().unwrap().y[1]
            )))
        }
    };
    let launch = Launch {
        saddle: SaddleLabel::SMinus,
        epsilon: eps,
        point: PlanarPoint::new(y0[0], y0[1]),
    };
    let t = build_trajectory(p, cfg, launch, run, termination)?;
    for w in t.nodes.windows(2) {
        if !(w[1].point.u > w[0].point.u && w[1].point.v < w[0].point.v) {
            return Err(Error::Integration(format!(
                "Q lost monotonicity near z = {}",
                w[1].z
            )));
        }
    }
    if let Some(bad) = t.nodes.iter().find(|n| n.point.u >= p.c || n.point.u < p.b) {
        return Err(Error::Integration(format!(
            "Q left the strip B < U < c at z = {}",
            bad.z
        )));
    }
    Ok(t)
}

/// Hermite dense evaluation at z within the node span.
pub fn dense_eval(t: &Trajectory, z: f64) -> Result<PlanarPoint> {
    let (a, b) = bracketing_nodes(t, z)?;
    if z == a.z {
        return Ok(a.point);
    }
    if z == b.z {
        return Ok(b.point);
    }
    let y = ode::hermite(&to_dense(a), &to_dense(b), z);
    Ok(PlanarPoint::new(y[0], y[1]))
}

/// Derivative of the dense interpolant at z.
pub fn dense_derivative(t: &Trajectory, z: f64) -> Result<PlanarPoint> {
    let (a, b) = bracketing_nodes(t, z)?;
    let d = ode::hermite_derivative(&to_dense(a), &to_dense(b), z);
    Ok(PlanarPoint::new(d[0], d[1]))
}

fn to_dense(n: &TrajectoryNode) -> DenseNode {
    DenseNode {
        z: n.z,
        y: [n.point.u, n.point.v],
        f: [n.derivative.u, n.derivative.v],
    }
}

fn bracketing_nodes<'t>(
    t: &'t Trajectory,
    z: f64,
) -> Result<(&'t TrajectoryNode, &'t TrajectoryNode)> {
    if t.nodes.len() < 2 {
        return Err(Error::SpanShortfall(
            "trajectory has fewer than two nodes".into(),
        ));
    }
    if z < t.z_first() || z > t.z_last() {
        return Err(Error::SpanShortfall(format!(
            "z = {z} outside the span [{}, {}]",
            t.z_first(),
            t.z_last()
        )));
    }
    let i = t
        .nodes
        .partition_point(|n| n.z <= z)
        .clamp(1, t.nodes.len() - 1);
    Ok((&t.nodes[i - 1], &t.nodes[i]))
}

/// First z where the predicate crosses zero, located by bisection on the
/// dense output to width 1e−12 in z; a zero sign at the first node returns
/// the first node itself.
pub fn locate_on_trajectory<F>(t: &Trajectory, predicate: F) -> Result<(f64, PlanarPoint)>
where
    F: Fn(PlanarPoint) -> f64,
{
    const Z_TOL: f64 = 1e-12;
    let first = t
        .nodes
        .first()
        .ok_or_else(|| Error::SpanShortfall("empty trajectory".into()))?;
    let p0 = predicate(first.point);
    if p0 == 0.0 {
        return Ok((first.z, first.point));
    }
    let sign0 = p0.signum();
    for w in t.nodes.windows(2) {
        let p1 = predicate(w[1].point);
        if p1 == 0.0 {
            return Ok((w[1].z, w[1].point));
        }
        if p1.signum() != sign0 {
            let (a, b) = (to_dense(&w[0]), to_dense(&w[1]));
            let (mut lo, mut hi) = (a.z, b.z);
            while hi - lo > Z_TOL {
                let mid = 0.5 * (lo + hi);
                let y = ode::hermite(&a, &b, mid);
                if predicate(PlanarPoint::new(y[0], y[1])).signum() != sign0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let y = ode::hermite(&a, &b, hi);
            return Ok((hi, PlanarPoint::new(y[0], y[1])));
        }
    }
    Err(Error::NoBracket {
        what: "predicate sign change on trajectory".into(),
        lo: t.z_first(),
        hi: t.z_last(),
    })
}
