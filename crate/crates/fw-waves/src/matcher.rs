//! The reflection condition: the matched points on P and Q are mirror images
//! through (c, 0), so that U₁(b₁) + U₂(b₂) = 2c and V₁(b₁) + V₂(b₂) = 0.
//!
//! Written on the level sets H(U, V) = H(A, 0) and H(B, 0), both conditions
//! collapse to one scalar equation on the U axis,
//!
//!   g(U) = V_Q²(U) − V_P²(2c − U) = 0,   U ∈ (B, c),
//!
//! with V_Q²(U) = H(B,0)/(U−c)² + U²/4 − (3c−4)U/6 − α + c²/4 + c/3 and V_P²
//! the same expression carrying H(A,0). The scalar root is the primary,
//! integration-free method; intersecting the shot trajectories provides the
//! independent cross-check and the parameters b₁, b₂.

use crate::error::{Error, Result};
use crate::phase_plane::{first_integral_h, PlanarPoint, WaveParams};
use crate::shooting::{locate_on_trajectory, Trajectory};

/// Which method produced a jump.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMethod {
    Algebraic,
    Trajectory,
}

/// One-sided limits of the profile and its derivative at the jump, with the
/// orbit parameters when trajectory matching supplied them.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct JumpData {
    #[serde(rename = "U_left")]
    pub u_left: f64,
    #[serde(rename = "U_right")]
    pub u_right: f64,
    #[serde(rename = "V_left")]
    pub v_left: f64,
    #[serde(rename = "V_right")]
    pub v_right: f64,
    pub b1: Option<f64>,
    pub b2: Option<f64>,
    pub method: MatchMethod,
}

/// Reflection-condition residual tolerance for a valid jump.
const JUMP_TOL: f64 = 1e-9;

impl JumpData {
    /// Enforces both reflection components to 1e−9 and the ordering
    /// B < U_right < c < U_left with V_left > 0 > V_right.
    pub fn validate(&self, p: &WaveParams) -> Result<()> {
        let rh = (self.u_left + self.u_right - 2.0 * p.c).abs();
        if rh > JUMP_TOL {
            return Err(Error::InvalidParams(format!(
                "jump violates U_left + U_right = 2c by {rh:.3e}"
            )));
        }
        let dv = (self.v_left + self.v_right).abs();
        if dv > JUMP_TOL {
            return Err(Error::InvalidParams(format!(
                "jump violates V_left + V_right = 0 by {dv:.3e}"
            )));
        }
        if !(p.b < self.u_right && self.u_right < p.c && p.c < self.u_left) {
            return Err(Error::InvalidParams(format!(
                "jump ordering B < U_right < c < U_left fails: ({}, {}, {}, {})",
                p.b, self.u_right, p.c, self.u_left
            )));
        }
        if !(self.v_left > 0.0 && self.v_right < 0.0) {
            return Err(Error::InvalidParams(format!(
                "jump derivative signs V_left > 0 > V_right fail: ({}, {})",
                self.v_left, self.v_right
            )));
        }
        Ok(())
    }
}

/// V² along the H-level `level` as a function of U.
pub fn v_squared_on_level(p: &WaveParams, level: f64, u: f64) -> f64 {
    level / (u - p.c).powi(2) + u * u / 4.0 - (3.0 * p.c - 4.0) * u / 6.0 - p.alpha
        + p.c * p.c / 4.0
        + p.c / 3.0
}

/// The scalar reflection equation on (B, c).
fn reflection_gap(p: &WaveParams, h_a: f64, h_b: f64, u: f64) -> f64 {
    v_squared_on_level(p, h_b, u) - v_squared_on_level(p, h_a, 2.0 * p.c - u)
}

/// Solves the reflection condition on the two saddle H-levels; b₁, b₂ stay
/// unset (trajectory matching fills them). Scans 1024 points on
/// (B + δ, c − δ), δ = 1e−6 (c − B), then bisects; zero or multiple sign
/// changes abort, since the construction proves exactly one root.
pub fn match_algebraic(p: &WaveParams) -> Result<JumpData> {
    if !p.shock_regime {
        return Err(Error::Regime(format!(
            "matching requires the shock regime A > B + 2, got A = {}, B = {}",
            p.a, p.b
        )));
    }
    let h_a = first_integral_h(p, PlanarPoint::new(p.a, 0.0));
    let h_b = first_integral_h(p, PlanarPoint::new(p.b, 0.0));
    let delta = 1e-6 * (p.c - p.b);
    let (lo, hi) = (p.b + delta, p.c - delta);
    let g = |u: f64| reflection_gap(p, h_a, h_b, u);

    const SCAN: usize = 1024;
    let mut brackets = Vec::new();
    let mut prev_u = lo;
    let mut prev_g = g(lo);
    for i in 1..SCAN {
        let u = lo + (hi - lo) * i as f64 / (SCAN - 1) as f64;
        let gu = g(u);
        if prev_g == 0.0 || prev_g.signum() != gu.signum() {
            brackets.push((prev_u, u));
        }
        prev_u = u;
        prev_g = gu;
    }
    match brackets.len() {
        0 => {
            return Err(Error::NoBracket {
                what: "reflection equation g(U)".into(),
                lo,
                hi,
            });
        }
        1 => {}
        n => {
            return Err(Error::MultipleBrackets {
                what: "reflection equation g(U)".into(),
                count: n,
                lo,
                hi,
            });
        }
    }

    let (mut a, mut b) = brackets[0];
    let ga = g(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        if (g(mid) >= 0.0) == (ga >= 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    let u_star = 0.5 * (a + b);
    let v_right = -v_squared_on_level(p, h_b, u_star).max(0.0).sqrt();
    let jump = JumpData {
        u_left: 2.0 * p.c - u_star,
        u_right: u_star,
        v_left: -v_right,
        v_right,
        b1: None,
        b2: None,
        method: MatchMethod::Algebraic,
    };
    jump.validate(p)?;
    Ok(jump)
}

/// Locates the reflected pair on the shot orbits: b₁ on P at U₁ = U_left and
/// b₂ on Q at U₂ = U_right, targets taken from the scalar solve; agrees with
/// it to 1e−6 componentwise.
pub fn match_on_trajectories(p_traj: &Trajectory, q_traj: &Trajectory) -> Result<JumpData> {
    if p_traj.params != q_traj.params {
        return Err(Error::InvalidParams(
            "P and Q were shot with different parameters".into(),
        ));
    }
    let p = &p_traj.params;
    let algebraic = match_algebraic(p)?;

    let (b1, on_p) = locate_on_trajectory(p_traj, |pt| pt.u - algebraic.u_left).map_err(|_| {
        Error::SpanShortfall(format!(
            "P ends at U = {:.6} before the matched U_left = {:.6}; raise U_stop",
            p_traj.nodes.last().map_or(f64::NAN, |n| n.point.u),
            algebraic.u_left
        ))
    })?;
    let (b2, on_q) = locate_on_trajectory(q_traj, |pt| pt.u - algebraic.u_right).map_err(|_| {
        Error::SpanShortfall(format!(
            "Q ends at U = {:.6} before the matched U_right = {:.6}; lower V_floor",
            q_traj.nodes.last().map_or(f64::NAN, |n| n.point.u),
            algebraic.u_right
        ))
    })?;

    let jump = JumpData {
        u_left: on_p.u,
        u_right: on_q.u,
        v_left: on_p.v,
        v_right: on_q.v,
        b1: Some(b1),
        b2: Some(b2),
        method: MatchMethod::Trajectory,
    };
    jump.validate(p)?;
    Ok(jump)
}
