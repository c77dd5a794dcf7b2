//! Traveling-wave profiles W(ξ) in the wave frame ξ = x − ct.
//!
//! The matched orbits P and Q live in the stretched variable z with
//! dξ/dz = U − c, so the profile is recovered through
//!
//!   ξ(z) = ∫_b (U(r) − c) dr,   W(ξ) = U(z(ξ)),   W′(ξ) = V(z(ξ)),
//!
//! anchored at the matched parameters b₁ (P, left of the jump) and b₂ (Q,
//! right of the jump). ξ(z) is accumulated and inverted segment by segment
//! on the cubic Hermite interpolant of the orbit, whose ξ-antiderivative is
//! an exact quartic. Beyond the orbit span the profile is extended with the
//! saddle constants A and B; the launch offset ε bounds the extension error.
//!
//! `integrate_profile_direct` rebuilds the profile independently by
//! integrating the wave-frame system
//!
//!   dW/dξ = V,   dV/dξ = [(W − c)²/2 − V² + W − α] / (W − c)
//!
//! outward from the one-sided jump data, for cross-validation against the
//! orbit reconstruction.

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::matcher::{v_squared_on_level, JumpData};
use crate::ode::{self, DenseNode, OdeOptions, Outcome};
use crate::phase_plane::{first_integral_h, vector_field, PlanarPoint, WaveParams};
use crate::shooting::{dense_eval, Trajectory, TrajectoryNode};
use serde_json::json;

/// Fraction of the node spacing within which a grid point counts as ξ = 0.
const ZERO_NODE_TOL: f64 = 1e-9;

/// A discontinuous traveling wave sampled on a uniform ξ grid, with its
/// first two one-sided derivatives carried alongside.
#[derive(Debug, Clone)]
pub struct ShockProfile {
    pub params: WaveParams,
    pub jump: JumpData,
    /// W(ξ); jump (W(0−), W(0+)), tails (A, B).
    pub grid: GridFunction,
    /// W′(ξ) = V along the orbit; jump (W′(0−), W′(0+)), tails 0.
    pub derivative_grid: GridFunction,
    /// W″(ξ) from the planar field, G(W, W′)/(W − c); tails 0.
    pub curvature_grid: GridFunction,
    /// ξ range actually covered by orbit data; constants are used beyond it.
    pub covered: (f64, f64),
}

impl ShockProfile {
    pub fn half_width(&self) -> f64 {
        -self.grid.left_end()
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    /// CSV rendering, columns `xi,W,Wprime`.
    pub fn to_csv(&self) -> String {
        let n = self.n();
        let dx = (self.grid.right_end() - self.grid.left_end()) / (n - 1) as f64;
        let mut out = String::with_capacity(32 * n);
        out.push_str("xi,W,Wprime\n");
        for j in 0..n {
            let x = self.grid.left_end() + dx * j as f64;
            out.push_str(&format!(
                "{x},{},{}\n",
                self.grid.samples()[j],
                self.derivative_grid.samples()[j]
            ));
        }
        out
    }

    /// JSON summary: parameters, jump data, grid shape, tail errors.
    pub fn manifest(&self) -> serde_json::Value {
        let w = self.grid.samples();
        let wp = self.derivative_grid.samples();
        json!({
            "params": self.params,
            "jump": self.jump,
            "L": self.half_width(),
            "n": self.n(),
            "tail_errors": {
                "W_left": (w[0] - self.params.a).abs(),
                "W_right": (w[w.len() - 1] - self.params.b).abs(),
                "Wprime_left": wp[0].abs(),
                "Wprime_right": wp[wp.len() - 1].abs(),
            },
            "orbit_coverage": { "xi_min": self.covered.0, "xi_max": self.covered.1 },
        })
    }
}

/// Cubic Hermite value on a segment of width h at fraction t ∈ [0, 1].
fn hermite_scalar(h: f64, t: f64, ya: f64, fa: f64, yb: f64, fb: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    ya * (2.0 * t3 - 3.0 * t2 + 1.0)
        + h * fa * (t3 - 2.0 * t2 + t)
        + yb * (-2.0 * t3 + 3.0 * t2)
        + h * fb * (t3 - t2)
}

/// ∫ (U_H(r) − c) dr from the segment start to fraction t, where U_H is the
/// cubic Hermite interpolant of U; exact quartic antiderivative.
fn hermite_xi_partial(h: f64, t: f64, ua: f64, fa: f64, ub: f64, fb: f64, c: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let i00 = 0.5 * t4 - t3 + t;
    let i10 = 0.25 * t4 - (2.0 / 3.0) * t3 + 0.5 * t2;
    let i01 = -0.5 * t4 + t3;
    let i11 = 0.25 * t4 - t3 / 3.0;
    h * (ua * i00 + h * fa * i10 + ub * i01 + h * fb * i11) - c * t * h
}

/// One orbit piece reparametrized by ξ: truncated node list plus the ξ value
/// of every node, with ξ = 0 at the anchor (the last node).
struct OrbitPiece {
    nodes: Vec<TrajectoryNode>,
    xi: Vec<f64>,
    c: f64,
}

impl OrbitPiece {
    /// Truncates the trajectory at the anchor b and accumulates ξ backwards
    /// from ξ(b) = 0 with the exact per-segment Hermite integral.
    fn build(t: &Trajectory, b: f64, p: &WaveParams, left: bool) -> Result<Self> {
        if !(b >= t.z_first() && b <= t.z_last()) {
            return Err(Error::SpanShortfall(format!(
                "anchor z = {b} lies outside the orbit span [{}, {}]",
                t.z_first(),
                t.z_last()
            )));
        }
        let mut nodes: Vec<TrajectoryNode> = t
            .nodes
            .iter()
            .filter(|nd| nd.z < b - 1e-12 * b.abs().max(1.0))
            .copied()
            .collect();
        let end = dense_eval(t, b)?;
        nodes.push(TrajectoryNode {
            z: b,
            point: end,
            derivative: vector_field(p, end),
        });
        if nodes.len() < 2 {
            return Err(Error::SpanShortfall(format!(
                "orbit span collapses at the anchor z = {b}"
            )));
        }
        let m = nodes.len();
        let mut xi = vec![0.0; m];
        for k in (0..m - 1).rev() {
            let a = &nodes[k];
            let bn = &nodes[k + 1];
            let h = bn.z - a.z;
            let seg = hermite_xi_partial(
                h,
                1.0,
                a.point.u,
                a.derivative.u,
                bn.point.u,
                bn.derivative.u,
                p.c,
            );
            let monotone = if left { seg > 0.0 } else { seg < 0.0 };
            if !monotone {
                return Err(Error::NonMonotone(format!(
                    "ξ(z) is not strictly monotone near z = {}; the orbit touches U = c",
                    bn.z
                )));
            }
            xi[k] = xi[k + 1] - seg;
        }
        Ok(Self { nodes, xi, c: p.c })
    }

    /// The ξ value at the far end of the piece (most negative for P, most
    /// positive for Q).
    fn far_end(&self) -> f64 {
        self.xi[0]
    }

    /// W and W′ at a covered ξ: bisection on the quartic ξ(z) within the
    /// bracketing segment, then the Hermite values of U and V there.
    fn eval(&self, x: f64) -> (f64, f64) {
        let m = self.xi.len();
        let ascending = self.xi[0] < self.xi[m - 1];
        let idx = if ascending {
            self.xi.partition_point(|v| *v < x)
        } else {
            self.xi.partition_point(|v| *v > x)
        };
        let k = idx.saturating_sub(1).min(m - 2);
        let a = &self.nodes[k];
        let b = &self.nodes[k + 1];
        let h = b.z - a.z;
        let target = x - self.xi[k];
        let seg = self.xi[k + 1] - self.xi[k];
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let fm = hermite_xi_partial(
                h,
                mid,
                a.point.u,
                a.derivative.u,
                b.point.u,
                b.derivative.u,
                self.c,
            );
            if (fm < target) == (seg > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        let w = hermite_scalar(h, t, a.point.u, a.derivative.u, b.point.u, b.derivative.u);
        let wp = hermite_scalar(h, t, a.point.v, a.derivative.v, b.point.v, b.derivative.v);
        (w, wp)
    }
}

/// Builds the three profile grids from per-side evaluators, applying the
/// midpoint convention at a ξ = 0 node, the jump values as one-sided limits,
/// and the saddle constants beyond the covered range.
fn assemble(
    p: &WaveParams,
    jump: &JumpData,
    l: f64,
    n: usize,
    covered: (f64, f64),
    eval_left: &dyn Fn(f64) -> (f64, f64),
    eval_right: &dyn Fn(f64) -> (f64, f64),
) -> Result<ShockProfile> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "half-width L = {l} must be positive"
        )));
    }
    if n < 4 {
        return Err(Error::InvalidParams(format!(
            "need n >= 4 grid points, got {n}"
        )));
    }
    let curv = |u: f64, v: f64| vector_field(p, PlanarPoint::new(u, v)).v / (u - p.c);
    let dx = 2.0 * l / (n - 1) as f64;
    let mut w = Vec::with_capacity(n);
    let mut wp = Vec::with_capacity(n);
    let mut wpp = Vec::with_capacity(n);
    let mut prev_left: Option<f64> = None;
    let mut prev_right: Option<f64> = None;
    for j in 0..n {
        let x = -l + dx * j as f64;
        let (wj, wpj, wppj) = if x.abs() < ZERO_NODE_TOL * dx {
            (
                0.5 * (jump.u_left + jump.u_right),
                0.5 * (jump.v_left + jump.v_right),
                0.5 * (curv(jump.u_left, jump.v_left) + curv(jump.u_right, jump.v_right)),
            )
        } else if x < 0.0 {
            if x < covered.0 {
                (p.a, 0.0, 0.0)
            } else {
                let (u, v) = eval_left(x);
                if let Some(prev) = prev_left {
                    if u <= prev {
                        return Err(Error::NonMonotone(format!(
                            "W is not strictly increasing at ξ = {x}"
                        )));
                    }
                }
                prev_left = Some(u);
                (u, v, curv(u, v))
            }
        } else if x > covered.1 {
            (p.b, 0.0, 0.0)
        } else {
            let (u, v) = eval_right(x);
            if let Some(prev) = prev_right {
                if u >= prev {
                    return Err(Error::NonMonotone(format!(
                        "W is not strictly decreasing at ξ = {x}"
                    )));
                }
            }
            prev_right = Some(u);
            (u, v, curv(u, v))
        };
        w.push(wj);
        wp.push(wpj);
        wpp.push(wppj);
    }
    let jump_w = Some((jump.u_left, jump.u_right));
    let jump_wp = Some((jump.v_left, jump.v_right));
    let jump_wpp = Some((
        curv(jump.u_left, jump.v_left),
        curv(jump.u_right, jump.v_right),
    ));
    Ok(ShockProfile {
        params: *p,
        jump: *jump,
        grid: GridFunction::new(-l, l, w, p.a, p.b, jump_w)?,
        derivative_grid: GridFunction::new(-l, l, wp, 0.0, 0.0, jump_wp)?,
        curvature_grid: GridFunction::new(-l, l, wpp, 0.0, 0.0, jump_wpp)?,
        covered,
    })
}

/// Reconstructs the shock profile from the matched orbit pair: P is carried
/// to ξ < 0 through its anchor b₁, Q to ξ > 0 through b₂, and the two sides
/// meet at the jump with the reflection values.
pub fn reconstruct_profile(
    p_traj: &Trajectory,
    q_traj: &Trajectory,
    jump: &JumpData,
    l: f64,
    n: usize,
) -> Result<ShockProfile> {
    let p = &p_traj.params;
    if q_traj.params != *p {
        return Err(Error::InvalidParams(
            "P and Q were shot at different parameters".into(),
        ));
    }
    jump.validate(p)?;
    let b1 = jump.b1.ok_or_else(|| {
        Error::MissingJump("b1 (anchor on P) is unset; match on trajectories first".into())
    })?;
    let b2 = jump.b2.ok_or_else(|| {
        Error::MissingJump("b2 (anchor on Q) is unset; match on trajectories first".into())
    })?;
    let left = OrbitPiece::build(p_traj, b1, p, true)?;
    let right = OrbitPiece::build(q_traj, b2, p, false)?;
    let covered = (left.far_end(), right.far_end());
    assemble(p, jump, l, n, covered, &|x| left.eval(x), &|x| {
        right.eval(x)
    })
}

/// Integrates the wave-frame system outward from the jump data with the same
/// embedded pair used for shooting; the orbit reconstruction must agree with
/// this to the stated cross-check tolerance.
pub fn integrate_profile_direct(
    p: &WaveParams,
    jump: &JumpData,
    l: f64,
    n: usize,
) -> Result<ShockProfile> {
    jump.validate(p)?;
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "half-width L = {l} must be positive"
        )));
    }
    let opts = OdeOptions {
        rel_tol: 1e-12,
        abs_tol: 1e-14,
        max_step: 0.01,
        ..OdeOptions::default()
    };
    let (c, alpha) = (p.c, p.alpha);
    let field = move |y: [f64; 2]| -> [f64; 2] {
        let d = y[0] - c;
        if d.abs() < 1e-9 {
            return [f64::NAN, f64::NAN];
        }
        [y[1], (0.5 * d * d - y[1] * y[1] + y[0] - alpha) / d]
    };

    // The saddle manifolds are branches of the first-integral level sets, so
    // the seed V is projected onto the exact level at the seed U; otherwise
    // the matcher's off-manifold error (~1e−10) grows like e^{μξ} toward the
    // saddle and cuts the covered range well short.
    let h_a = first_integral_h(p, PlanarPoint::new(p.a, 0.0));
    let h_b = first_integral_h(p, PlanarPoint::new(p.b, 0.0));
    let v_seed_left = v_squared_on_level(p, h_a, jump.u_left).max(0.0).sqrt();
    let v_seed_right = -v_squared_on_level(p, h_b, jump.u_right).max(0.0).sqrt();

    // Right half, ξ ∈ (0, L]: V rises to 0 and W falls to B; stop on the
    // departure signs once integration error pushes the state off the
    // stable manifold, then extend with B.
    let b_guard = p.b - 1e-7 * p.b.abs().max(1.0);
    let events_r: [Box<dyn Fn([f64; 2]) -> f64>; 2] = [
        Box::new(|y: [f64; 2]| y[1]),
        Box::new(move |y: [f64; 2]| b_guard - y[0]),
    ];
    let run_r = ode::integrate(
        field,
        [jump.u_right, v_seed_right],
        &opts,
        &events_r,
        Some(l),
    )?;
    if run_r.outcome == Outcome::StepFloor {
        return Err(Error::Integration("right half stalled near W = c".into()));
    }

    // Left half in s = −ξ: W falls to A from above while V falls to 0.
    let field_l = move |y: [f64; 2]| {
        let f = field(y);
        [-f[0], -f[1]]
    };
    let a_guard = p.a - 1e-7 * p.a.abs().max(1.0);
    let events_l: [Box<dyn Fn([f64; 2]) -> f64>; 2] = [
        Box::new(|y: [f64; 2]| -y[1]),
        Box::new(move |y: [f64; 2]| a_guard - y[0]),
    ];
    let run_l = ode::integrate(
        field_l,
        [jump.u_left, v_seed_left],
        &opts,
        &events_l,
        Some(l),
    )?;
    if run_l.outcome == Outcome::StepFloor {
        return Err(Error::Integration("left half stalled near W = c".into()));
    }

    let covered = (
        -run_l.nodes.last().unwrap().z,
        run_r.nodes.last().unwrap().z,
    );
    let eval_from = |nodes: &[DenseNode], s: f64| -> (f64, f64) {
        let idx = nodes.partition_point(|nd| nd.z < s);
        let k = idx.saturating_sub(1).min(nodes.len() - 2);
        let y = ode::hermite(&nodes[k], &nodes[k + 1], s);
        (y[0], y[1])
    };
    assemble(
        p,
        jump,
        l,
        n,
        covered,
        &|x| eval_from(&run_l.nodes, -x),
        &|x| eval_from(&run_r.nodes, x),
    )
}

/// The peaked solitary wave W(ξ) = (4/3) e^{−|ξ|/2} with its speed c = 4/3;
/// the kink sits at ξ = 0.
pub fn peakon_profile(l: f64, n: usize) -> Result<(GridFunction, f64)> {
    let c = 4.0 / 3.0;
    let g = GridFunction::sample(-l, l, n, 0.0, 0.0, None, |x: f64| {
        c * (-0.5 * x.abs()).exp()
    })?;
    Ok((g, c))
}

/// W′ of the peaked wave: ∓(2/3) e^{−|ξ|/2}, discontinuous at the kink.
pub fn peakon_derivative_profile(l: f64, n: usize) -> Result<GridFunction> {
    let c = 4.0 / 3.0;
    GridFunction::sample(-l, l, n, 0.0, 0.0, Some((0.5 * c, -0.5 * c)), |x: f64| {
        -0.5 * c * x.signum() * (-0.5 * x.abs()).exp()
    })
}

/// The pure jump profile: A for ξ < 0, B for ξ > 0.
pub fn step_profile(a: f64, b: f64, l: f64, n: usize) -> Result<GridFunction> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParams("step states must be finite".into()));
    }
    GridFunction::sample(
        -l,
        l,
        n,
        a,
        b,
        Some((a, b)),
        |x: f64| if x < 0.0 { a } else { b },
    )
}

/// The constant profile W ≡ k.
pub fn constant_profile(k: f64, l: f64, n: usize) -> Result<GridFunction> {
    if !k.is_finite() {
        return Err(Error::InvalidParams("constant state must be finite".into()));
    }
    GridFunction::sample(-l, l, n, k, k, None, |_| k)
}
