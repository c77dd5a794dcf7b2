//! Embedded Dormand–Prince 4/5 integrator with PI step-size control, FSAL
//! stage reuse, cubic Hermite dense output, and scalar event location.
//!
//! The planar field is polynomial and nonstiff; an explicit pair with dense
//! output covers every integration in the crate. Accepted steps are stored as
//! (z, y, y′) nodes; between nodes the solution is the cubic Hermite
//! interpolant, with error O(h⁴) kept below the profile tolerances by the
//! `max_step` cap.

use crate::error::{Error, Result};

/// Tolerances and step bounds for one integration.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub initial_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.02,
            initial_step: None,
            max_steps: 2_000_000,
        }
    }
}

/// Accepted node: parameter, state, and field value at the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseNode {
    pub z: f64,
    pub y: [f64; 2],
    pub f: [f64; 2],
}

/// Why the integration stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    /// Event `index` fired; the final node sits on the located crossing.
    EventHit { index: usize },
    /// The requested end of the z range was reached (last step clipped).
    EndReached,
    /// Step size underflowed; the final node is the last good state.
    StepFloor,
}

/// Node sequence plus the stop descriptor.
#[derive(Debug, Clone)]
pub struct Integration {
    pub nodes: Vec<DenseNode>,
    pub outcome: Outcome,
}

const BLOW_UP_LIMIT: f64 = 1e8;
const STEP_FLOOR: f64 = 1e-14;
/// Bisection width for event location in z.
const EVENT_TOL: f64 = 1e-13;

/// Integrates y′ = field(y) from y0 at z = 0 until one of the `events`
/// becomes nonnegative (each starts negative at launch) or, when `z_end` is
/// given, until z reaches it (the last step is clipped). Steps are accepted
/// by the embedded 4/5 error estimate; an event crossing is located by
/// re-cutting the bracketing step.
pub fn integrate<F, G>(
    field: F,
    y0: [f64; 2],
    opts: &OdeOptions,
    events: &[G],
    z_end: Option<f64>,
) -> Result<Integration>
where
    F: Fn([f64; 2]) -> [f64; 2],
    G: Fn([f64; 2]) -> f64,
{
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0 && opts.max_step > 0.0) {
        return Err(Error::InvalidParams(
            "tolerances and max_step must be positive".into(),
        ));
    }
    if events.is_empty() && z_end.is_none() {
        return Err(Error::InvalidParams(
            "a stopping event or end point is required".into(),
        ));
    }
    if let Some(ze) = z_end {
        if !(ze > 0.0) {
            return Err(Error::InvalidParams("z_end must be positive".into()));
        }
    }
    if let Some(i) = events.iter().position(|g| g(y0) >= 0.0) {
        let f0 = field(y0);
        return Ok(Integration {
            nodes: vec![DenseNode {
                z: 0.0,
                y: y0,
                f: f0,
            }],
            outcome: Outcome::EventHit { index: i },
        });
    }

    let mut nodes = Vec::with_capacity(1024);
    let mut z = 0.0;
    let mut y = y0;
    let mut k1 = field(y);
    nodes.push(DenseNode { z, y, f: k1 });

    let mut h = opts
        .initial_step
        .unwrap_or(opts.max_step.min(1e-3))
        .min(opts.max_step);
    let mut errold: f64 = 1e-4;
    let mut attempts = 0usize;

    loop {
        attempts += 1;
        if attempts > opts.max_steps {
            return Err(Error::Integration(format!(
                "step budget {} exhausted at z = {z}",
                opts.max_steps
            )));
        }
        if h < STEP_FLOOR * z.abs().max(1.0) {
            return Ok(Integration {
                nodes,
                outcome: Outcome::StepFloor,
            });
        }

        let mut h_eff = h;
        let mut final_step = false;
        if let Some(ze) = z_end {
            if h_eff >= ze - z {
                h_eff = ze - z;
                final_step = true;
            }
        }

        let (y_new, k_new, err) = dopri5_step(&field, y, k1, h_eff, opts);
        if !err.is_finite()
            || y_new
                .iter()
                .any(|v| !v.is_finite() || v.abs() > BLOW_UP_LIMIT)
        {
            h = h_eff * 0.25;
            continue;
        }

        if err <= 1.0 {
            let mut hit: Option<(usize, f64)> = None;
            for (i, g) in events.iter().enumerate() {
                if g(y_new) >= 0.0 {
                    let hc = locate_event_step(&field, y, k1, h_eff, z, g, opts);
                    if hit.map_or(true, |(_, best)| hc < best) {
                        hit = Some((i, hc));
                    }
                }
            }
            if let Some((i, hc)) = hit {
                // Re-cut the last step at the crossing so the final node has
                // single-step accuracy instead of dense-output accuracy.
                let (yc, fc, _) = dopri5_step(&field, y, k1, hc, opts);
                nodes.push(DenseNode {
                    z: z + hc,
                    y: yc,
                    f: fc,
                });
                return Ok(Integration {
                    nodes,
                    outcome: Outcome::EventHit { index: i },
                });
            }

            if final_step {
                nodes.push(DenseNode {
                    z: z_end.unwrap(),
                    y: y_new,
                    f: k_new,
                });
                return Ok(Integration {
                    nodes,
                    outcome: Outcome::EndReached,
                });
            }

            nodes.push(DenseNode {
                z: z + h_eff,
                y: y_new,
                f: k_new,
            });
            z += h_eff;
            y = y_new;
            k1 = k_new;

            let fac = (0.9 * err.max(1e-10).powf(-0.17) * errold.powf(0.04)).clamp(0.2, 5.0);
            h = (h_eff * fac).min(opts.max_step);
            errold = err.max(1e-4);
        } else {
            h = h_eff * (0.9 * err.powf(-0.2)).clamp(0.2, 0.9);
        }
    }
}

/// One Dormand–Prince step from y with k1 = field(y); returns the fifth-order
/// result, its field value (FSAL stage), and the scaled error norm.
fn dopri5_step<F>(
    field: &F,
    y: [f64; 2],
    k1: [f64; 2],
    h: f64,
    opts: &OdeOptions,
) -> ([f64; 2], [f64; 2], f64)
where
    F: Fn([f64; 2]) -> [f64; 2],
{
    let stage = |coefs: &[(f64, [f64; 2])]| {
        let mut s = y;
        for (a, k) in coefs {
            s[0] += h * a * k[0];
            s[1] += h * a * k[1];
        }
        s
    };

    let k2 = field(stage(&[(1.0 / 5.0, k1)]));
    let k3 = field(stage(&[(3.0 / 40.0, k1), (9.0 / 40.0, k2)]));
    let k4 = field(stage(&[
        (44.0 / 45.0, k1),
        (-56.0 / 15.0, k2),
        (32.0 / 9.0, k3),
    ]));
    let k5 = field(stage(&[
        (19372.0 / 6561.0, k1),
        (-25360.0 / 2187.0, k2),
        (64448.0 / 6561.0, k3),
        (-212.0 / 729.0, k4),
    ]));
    let k6 = field(stage(&[
        (9017.0 / 3168.0, k1),
        (-355.0 / 33.0, k2),
        (46732.0 / 5247.0, k3),
        (49.0 / 176.0, k4),
        (-5103.0 / 18656.0, k5),
    ]));
    let y_new = stage(&[
        (35.0 / 384.0, k1),
        (500.0 / 1113.0, k3),
        (125.0 / 192.0, k4),
        (-2187.0 / 6784.0, k5),
        (11.0 / 84.0, k6),
    ]);
    let k7 = field(y_new);

    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let ks = [k1, k2, k3, k4, k5, k6, k7];
    let mut err = 0.0;
    for i in 0..2 {
        let e: f64 = (0..7).map(|j| E[j] * ks[j][i]).sum::<f64>() * h;
        let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
        err += (e / scale).powi(2);
    }
    (y_new, k7, (err / 2.0).sqrt())
}

/// Cubic Hermite value between two nodes.
pub fn hermite(a: &DenseNode, b: &DenseNode, z: f64) -> [f64; 2] {
    let h = b.z - a.z;
    let t = (z - a.z) / h;
    let (t2, t3) = (t * t, t * t * t);
    let (h00, h10, h01, h11) = (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    );
    [
        h00 * a.y[0] + h10 * h * a.f[0] + h01 * b.y[0] + h11 * h * b.f[0],
        h00 * a.y[1] + h10 * h * a.f[1] + h01 * b.y[1] + h11 * h * b.f[1],
    ]
}

/// Derivative of the cubic Hermite interpolant between two nodes.
pub fn hermite_derivative(a: &DenseNode, b: &DenseNode, z: f64) -> [f64; 2] {
    let h = b.z - a.z;
    let t = (z - a.z) / h;
    let t2 = t * t;
    let (d00, d10, d01, d11) = (
        (6.0 * t2 - 6.0 * t) / h,
        3.0 * t2 - 4.0 * t + 1.0,
        (-6.0 * t2 + 6.0 * t) / h,
        3.0 * t2 - 2.0 * t,
    );
    [
        d00 * a.y[0] + d10 * a.f[0] + d01 * b.y[0] + d11 * b.f[0],
        d00 * a.y[1] + d10 * a.f[1] + d01 * b.y[1] + d11 * b.f[1],
    ]
}

/// Smallest step cut hc ∈ (0, h] with g(step(y, hc)) ≥ 0, by bisection with a
/// truncated Dormand–Prince step per probe; assumes g(y) < 0 ≤ g(step(y, h)).
fn locate_event_step<F, G>(
    field: &F,
    y: [f64; 2],
    k1: [f64; 2],
    h: f64,
    z: f64,
    g: &G,
    opts: &OdeOptions,
) -> f64
where
    F: Fn([f64; 2]) -> [f64; 2],
    G: Fn([f64; 2]) -> f64,
{
    let (mut lo, mut hi) = (0.0, h);
    while hi - lo > EVENT_TOL * (z + h).abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        let (ym, _, _) = dopri5_step(field, y, k1, mid, opts);
        if g(ym) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
