//! The Fornberg-Whitham kernel K(x) = e^{−|x|}/2 and convolutions K∗f, K′∗f
//! against grid functions with constant tails.
//!
//! The finite part ∫_{left}^{right} K(at−y) f(y) dy is composite Gauss-Legendre
//! quadrature per grid cell, with panels split at the kernel peak y = at, at
//! the jump, and at declared kinks, so every panel sees a smooth integrand.
//! The two tail integrals are exact exponential integrals, never truncated:
//! the profiles here approach nonzero constants and truncation would pollute
//! every residual downstream.

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// K(x) = e^{−|x|}/2; even, positive, ∫K = 1.
pub fn eval_kernel(x: f64) -> f64 {
    0.5 * (-x.abs()).exp()
}

/// K′(x) = −sgn(x) e^{−|x|}/2, with K′(0) := 0 as the odd-jump midpoint.
pub fn eval_kernel_derivative(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        -0.5 * x.signum() * (-x.abs()).exp()
    }
}

/// Quadrature layout for convolutions.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KernelQuadratureConfig {
    /// Gauss-Legendre points per grid cell.
    pub panel_order: usize,
    /// Split the panel containing 0 at the jump.
    pub split_at_jump: bool,
    /// Locations where the integrand's derivative jumps (profile kinks).
    pub split_at_kinks: Vec<f64>,
}

impl Default for KernelQuadratureConfig {
    fn default() -> Self {
        Self {
            panel_order: 4,
            split_at_jump: true,
            split_at_kinks: Vec::new(),
        }
    }
}

/// ∫ K(at−y) f(y) dy with exact tail integrals.
pub fn convolve_k(f: &GridFunction, at: f64, cfg: &KernelQuadratureConfig) -> Result<f64> {
    convolve(f, at, cfg, eval_kernel, k_left_tail, k_right_tail)
}

/// ∫ K′(at−y) f(y) dy with exact tail integrals.
pub fn convolve_kprime(f: &GridFunction, at: f64, cfg: &KernelQuadratureConfig) -> Result<f64> {
    convolve(
        f,
        at,
        cfg,
        eval_kernel_derivative,
        kprime_left_tail,
        kprime_right_tail,
    )
}

/// ∫_{−∞}^{l} K(at−y) dy = ∫_{at−l}^{∞} K.
fn k_left_tail(at: f64, l: f64) -> f64 {
    let t = at - l;
    if t >= 0.0 {
        0.5 * (-t).exp()
    } else {
        1.0 - 0.5 * t.exp()
    }
}

/// ∫_{r}^{∞} K(at−y) dy = ∫_{−∞}^{at−r} K.
fn k_right_tail(at: f64, r: f64) -> f64 {
    let s = at - r;
    if s <= 0.0 {
        0.5 * s.exp()
    } else {
        1.0 - 0.5 * (-s).exp()
    }
}

/// ∫_{−∞}^{l} K′(at−y) dy = −K(at−l).
fn kprime_left_tail(at: f64, l: f64) -> f64 {
    -eval_kernel(at - l)
}

/// ∫_{r}^{∞} K′(at−y) dy = K(at−r).
fn kprime_right_tail(at: f64, r: f64) -> f64 {
    eval_kernel(at - r)
}

fn convolve(
    f: &GridFunction,
    at: f64,
    cfg: &KernelQuadratureConfig,
    kern: fn(f64) -> f64,
    left_tail_integral: fn(f64, f64) -> f64,
    right_tail_integral: fn(f64, f64) -> f64,
) -> Result<f64> {
    if !at.is_finite() {
        return Err(Error::InvalidParams(format!(
            "non-finite evaluation point {at}"
        )));
    }
    if cfg.panel_order < 2 {
        return Err(Error::InvalidParams(format!(
            "panel_order must be >= 2, got {}",
            cfg.panel_order
        )));
    }
    let (gx, gw) = gauss_legendre(cfg.panel_order);
    let ev = f.evaluator(&cfg.split_at_kinks);

    // Points where a panel must break: the kernel kink at y = at, the jump, kinks.
    let mut cuts: Vec<f64> = Vec::with_capacity(2 + cfg.split_at_kinks.len());
    cuts.push(at);
    if f.jump().is_some() && cfg.split_at_jump {
        cuts.push(0.0);
    }
    cuts.extend_from_slice(&cfg.split_at_kinks);

    let n = f.n();
    let dx = f.spacing();
    let mut acc = 0.0;
    for cell in 0..n - 1 {
        let lo = f.xi(cell);
        let hi = f.xi(cell + 1);
        let mut edges = vec![lo, hi];
        for &c in &cuts {
            if lo + 1e-13 * dx < c && c < hi - 1e-13 * dx {
                edges.push(c);
            }
        }
        edges.sort_by(f64::total_cmp);
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            let mut panel = 0.0;
            for (x, wgt) in gx.iter().zip(&gw) {
                let y = mid + half * x;
                panel += wgt * kern(at - y) * ev.eval(y);
            }
            acc += half * panel;
        }
    }

    acc += f.left_tail() * left_tail_integral(at, f.left_end());
    acc += f.right_tail() * right_tail_integral(at, f.right_end());
    Ok(acc)
}

/// K∗f and K′∗f at every grid node in one pass. Both convolutions split
/// into the one-sided exponential moments
///
///   P(x) = ∫_{−∞}^{x} e^{−(x−y)} f(y) dy,   Q(x) = ∫_{x}^{∞} e^{−(y−x)} f(y) dy,
///
/// as K∗f = (P + Q)/2 and K′∗f = (Q − P)/2, and each moment obeys the exact
/// cell recursion P(x_{i+1}) = e^{−Δ} P(x_i) + local integral, evaluated
/// with the same per-cell Gauss panels as the pointwise convolutions. The
/// sweep costs O(n · panel_order) for all n nodes together.
pub fn convolve_both_at_nodes(
    f: &GridFunction,
    cfg: &KernelQuadratureConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if cfg.panel_order < 2 {
        return Err(Error::InvalidParams(format!(
            "panel_order must be >= 2, got {}",
            cfg.panel_order
        )));
    }
    let (gx, gw) = gauss_legendre(cfg.panel_order);
    let ev = f.evaluator(&cfg.split_at_kinks);
    let mut cuts: Vec<f64> = Vec::with_capacity(1 + cfg.split_at_kinks.len());
    if f.jump().is_some() && cfg.split_at_jump {
        cuts.push(0.0);
    }
    cuts.extend_from_slice(&cfg.split_at_kinks);

    let n = f.n();
    let dx = f.spacing();
    // Local weighted cell integrals: toward[i] = ∫_cell e^{−(x_{i+1}−y)} f dy,
    // away[i] = ∫_cell e^{−(y−x_i)} f dy for cell [x_i, x_{i+1}].
    let mut toward = vec![0.0; n - 1];
    let mut away = vec![0.0; n - 1];
    for cell in 0..n - 1 {
        let lo = f.xi(cell);
        let hi = f.xi(cell + 1);
        let mut edges = vec![lo, hi];
        for &c in &cuts {
            if lo + 1e-13 * dx < c && c < hi - 1e-13 * dx {
                edges.push(c);
            }
        }
        edges.sort_by(f64::total_cmp);
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for (x, wgt) in gx.iter().zip(&gw) {
                let y = mid + half * x;
                let fy = ev.eval(y);
                toward[cell] += half * wgt * (y - hi).exp() * fy;
                away[cell] += half * wgt * (lo - y).exp() * fy;
            }
        }
    }

    let mut p = vec![0.0; n];
    p[0] = f.left_tail();
    for i in 0..n - 1 {
        let decay = (f.xi(i) - f.xi(i + 1)).exp();
        p[i + 1] = decay * p[i] + toward[i];
    }
    let mut q = vec![0.0; n];
    q[n - 1] = f.right_tail();
    for i in (0..n - 1).rev() {
        let decay = (f.xi(i) - f.xi(i + 1)).exp();
        q[i] = decay * q[i + 1] + away[i];
    }

    let k = (0..n).map(|i| 0.5 * (p[i] + q[i])).collect();
    let kp = (0..n).map(|i| 0.5 * (q[i] - p[i])).collect();
    Ok((k, kp))
}

/// Gauss-Legendre nodes and weights on [−1, 1] by Newton iteration on Pₙ.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Chebyshev-based initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dxn = p / dp;
            x -= dxn;
            if dxn.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        xs[i] = -x;
        ws[i] = w;
        xs[n - 1 - i] = x;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

/// Pₙ(x) and Pₙ′(x) via the three-term recurrence.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridFunction;

    const TOL: f64 = 1e-12;

    fn cfg() -> KernelQuadratureConfig {
        KernelQuadratureConfig::default()
    }

    fn step40(l: f64, n: usize) -> GridFunction {
        GridFunction::sample(-l, l, n, 4.0, 0.0, Some((4.0, 0.0)), |x| {
            if x < 0.0 {
                4.0
            } else {
                0.0
            }
        })
        .unwrap()
    }

    fn peakon(l: f64, n: usize) -> GridFunction {
        GridFunction::sample(-l, l, n, 0.0, 0.0, None, |x| {
            (4.0 / 3.0) * (-0.5 * x.abs()).exp()
        })
        .unwrap()
    }

    /// K∗(peakon shape) in closed form: (8/9)(2e^{−|ξ|/2} − e^{−|ξ|}).
    fn k_peakon_exact(xi: f64) -> f64 {
        (8.0 / 9.0) * (2.0 * (-0.5 * xi.abs()).exp() - (-xi.abs()).exp())
    }

    #[test]
    fn kernel_point_values() {
        assert!((eval_kernel(0.0) - 0.5).abs() < TOL);
        assert!((eval_kernel(1.0) - 0.5 * (-1.0f64).exp()).abs() < TOL);
        assert!((eval_kernel(-2.0) - eval_kernel(2.0)).abs() < TOL);
        assert!((eval_kernel(-2.0) - 0.067_667_641_618_306_35).abs() < 1e-15);
    }

    #[test]
    fn kernel_derivative_values() {
        assert!((eval_kernel_derivative(1.0) + 0.5 * (-1.0f64).exp()).abs() < TOL);
        assert!((eval_kernel_derivative(-1.0) - 0.5 * (-1.0f64).exp()).abs() < TOL);
        assert_eq!(eval_kernel_derivative(0.0), 0.0);
    }

    #[test]
    fn normalization_for_constant_function() {
        let one = GridFunction::sample(-10.0, 10.0, 201, 1.0, 1.0, None, |_| 1.0).unwrap();
        for at in [-25.0, -3.7, 0.0, 0.4, 9.0, 60.0] {
            assert!(
                (convolve_k(&one, at, &cfg()).unwrap() - 1.0).abs() < TOL,
                "normalization fails at {at}"
            );
        }
    }

    #[test]
    fn kprime_annihilates_constants() {
        let one = GridFunction::sample(-10.0, 10.0, 201, 1.0, 1.0, None, |_| 1.0).unwrap();
        for at in [-2.0, 0.0, 1.3, 30.0] {
            assert!(convolve_kprime(&one, at, &cfg()).unwrap().abs() < TOL);
        }
    }

    #[test]
    fn step_convolution_matches_closed_form() {
        let g = step40(40.0, 4001);
        // K∗step = B + (A−B)e^{−ξ}/2 for ξ > 0, A + (B−A)e^{ξ}/2 for ξ < 0.
        for xi in [0.25, 0.5, 1.0, 2.0, 5.0] {
            let exact = 0.0 + 4.0 * 0.5 * (-xi as f64).exp();
            assert!(
                (convolve_k(&g, xi, &cfg()).unwrap() - exact).abs() < TOL,
                "K*step mismatch at {xi}"
            );
            let exact_neg = 4.0 - 4.0 * 0.5 * (-xi as f64).exp();
            assert!((convolve_k(&g, -xi, &cfg()).unwrap() - exact_neg).abs() < TOL);
        }
    }

    #[test]
    fn step_kprime_matches_closed_form() {
        let g = step40(40.0, 4001);
        // K′∗step = (B−A)K(ξ); at ξ=1 with (A,B)=(4,0): −2e^{−1} ≈ −0.7357589.
        let got = convolve_kprime(&g, 1.0, &cfg()).unwrap();
        assert!((got - (-2.0 * (-1.0f64).exp())).abs() < TOL);
        assert!((got - (-0.735_758_882_342_884_7)).abs() < 1e-12);
    }

    #[test]
    fn peakon_convolution_at_origin() {
        // Brute-force oracle value: K∗U(0) = 8/9 for U(y) = (4/3)e^{−|y|/2}.
        let g = peakon(40.0, 8001);
        let c = KernelQuadratureConfig {
            split_at_kinks: vec![0.0],
            ..cfg()
        };
        let got = convolve_k(&g, 0.0, &c).unwrap();
        assert!((got - 8.0 / 9.0).abs() < 1e-10, "got {got}");
        for xi in [0.5, -1.5, 3.0] {
            assert!(
                (convolve_k(&g, xi, &c).unwrap() - k_peakon_exact(xi)).abs() < 1e-9,
                "K*peakon mismatch at {xi}"
            );
        }
    }

    #[test]
    fn smoothing_across_the_jump() {
        // at ↦ K∗step is continuous; differences across 0 shrink like O(Δ).
        let g = step40(40.0, 2001);
        let c = cfg();
        let d1 = {
            let h = 0.04;
            (convolve_k(&g, h, &c).unwrap() - convolve_k(&g, -h, &c).unwrap()).abs()
        };
        let d2 = {
            let h = 0.02;
            (convolve_k(&g, h, &c).unwrap() - convolve_k(&g, -h, &c).unwrap()).abs()
        };
        assert!(d2 < 0.6 * d1, "differences {d1:.3e} -> {d2:.3e} not O(Δ)");
    }

    #[test]
    fn centered_difference_matches_kprime() {
        let g = peakon(30.0, 2001);
        let c = KernelQuadratureConfig {
            split_at_kinks: vec![0.0],
            ..cfg()
        };
        let at = 3.0;
        let h = 1e-3;
        let fd =
            (convolve_k(&g, at + h, &c).unwrap() - convolve_k(&g, at - h, &c).unwrap()) / (2.0 * h);
        let exact = convolve_kprime(&g, at, &c).unwrap();
        assert!((fd - exact).abs() < 1e-5, "FD {fd} vs K' {exact}");
    }

    #[test]
    fn quadrature_converges_at_interpolation_order() {
        // Smooth target with closed form; error is interpolation-limited O(Δ⁴).
        let c = KernelQuadratureConfig {
            split_at_kinks: vec![0.0],
            ..cfg()
        };
        let at = 1.0;
        let err = |n: usize| {
            let g = peakon(25.0, n);
            (convolve_k(&g, at, &c).unwrap() - k_peakon_exact(at)).abs()
        };
        let e1 = err(251);
        let e2 = err(501);
        assert!(
            e2 < e1 / 8.0,
            "halving Δ: error {e1:.3e} -> {e2:.3e}, reduction below order"
        );
    }

    #[test]
    fn node_sweep_matches_pointwise_convolutions() {
        let g = step40(20.0, 801);
        let (k, kp) = convolve_both_at_nodes(&g, &cfg()).unwrap();
        assert_eq!(k.len(), g.n());
        for i in (0..g.n()).step_by(37) {
            let at = g.xi(i);
            assert!(
                (k[i] - convolve_k(&g, at, &cfg()).unwrap()).abs() < TOL,
                "K at ξ = {at}"
            );
            assert!(
                (kp[i] - convolve_kprime(&g, at, &cfg()).unwrap()).abs() < TOL,
                "K′ at ξ = {at}"
            );
        }
        // Closed form on the right of the jump: K′∗(4·1_{ξ<0}) = −2e^{−ξ}.
        let i = ((1.0 - g.left_end()) / g.spacing()).round() as usize;
        assert!((kp[i] + 2.0 * (-g.xi(i)).exp()).abs() < TOL);

        let pk = peakon(30.0, 1001);
        let c = KernelQuadratureConfig {
            split_at_kinks: vec![0.0],
            ..cfg()
        };
        let (k2, kp2) = convolve_both_at_nodes(&pk, &c).unwrap();
        for i in (0..pk.n()).step_by(53) {
            let at = pk.xi(i);
            assert!((k2[i] - convolve_k(&pk, at, &c).unwrap()).abs() < TOL);
            assert!((kp2[i] - convolve_kprime(&pk, at, &c).unwrap()).abs() < TOL);
        }
    }

    #[test]
    fn gauss_rules_integrate_polynomials_exactly() {
        for n in 2..=10 {
            let (xs, ws) = gauss_legendre(n);
            // Exact on degree 2n−1: check x^{2n−2} against 2/(2n−1).
            let p = 2 * n - 2;
            let got: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(p as i32)).sum();
            let exact = 2.0 / (p as f64 + 1.0);
            assert!((got - exact).abs() < 1e-13, "n={n} degree {p}");
            let total: f64 = ws.iter().sum();
            assert!((total - 2.0).abs() < 1e-13);
        }
    }
}
