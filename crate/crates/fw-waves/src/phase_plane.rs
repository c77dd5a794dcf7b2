//! Parameters (A, B, c, α), the planar vector field, its Jacobian, equilibria,
//! saddle eigen-structure, and the first integral H.
//!
//! Substituting the traveling ansatz and the transform h with h′ = W∘h − c
//! turns the profile equation into the planar system
//!
//!   U′ = (U − c) V,
//!   V′ = −V² + U²/2 + (1−c)U + c²/2 − α,
//!
//! whose equilibria (B, 0) and (A, 0) are saddles exactly in the shock regime
//! B + 2 < c < A. Orbits conserve
//!
//!   H(U, V) = (U − c)² (V² − U²/4 + (3c−4)U/6 + α − c²/4 − c/3).

use crate::error::{Error, Result};

/// Asymptotic states with the derived speed and first-integral constant.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct WaveParams {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub c: f64,
    pub alpha: f64,
    pub shock_regime: bool,
}

/// Point of the (U, V) phase plane: U the profile value, V its derivative.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PlanarPoint {
    pub u: f64,
    pub v: f64,
}

impl PlanarPoint {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }
}

/// Saddle location with its eigenpairs; eigenvectors in unnormalized
/// closed form (use [`SaddleData::unit_unstable`] for shooting offsets).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SaddleData {
    pub location: PlanarPoint,
    pub eigenvalue_neg: f64,
    pub eigenvalue_pos: f64,
    pub eigvec_neg: PlanarPoint,
    pub eigvec_pos: PlanarPoint,
}

impl SaddleData {
    /// Unit vector along the unstable direction.
    pub fn unit_unstable(&self) -> PlanarPoint {
        let n = (self.eigvec_pos.u.powi(2) + self.eigvec_pos.v.powi(2)).sqrt();
        PlanarPoint::new(self.eigvec_pos.u / n, self.eigvec_pos.v / n)
    }
}

/// Regime classification; `alpha_le_c` and `gap_le_two` coincide and exclude
/// `shock_regime`, since 1 + 2(α − c) = (A − B)²/4.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RegimeDiagnostics {
    pub alpha_le_c: bool,
    pub gap_le_two: bool,
    pub shock_regime: bool,
}

/// Derives c = 1 + (A+B)/2 and α = (A−c)²/2 + A from the asymptotic states.
pub fn make_params(a: f64, b: f64) -> Result<WaveParams> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "non-finite states A={a}, B={b}"
        )));
    }
    if a <= b {
        return Err(Error::InvalidParams(format!(
            "orientation requires A > B, got A={a}, B={b}"
        )));
    }
    let c = 1.0 + 0.5 * (a + b);
    let alpha = 0.5 * (a - c).powi(2) + a;
    let shock_regime = b + 2.0 < c && c < a;
    Ok(WaveParams {
        a,
        b,
        c,
        alpha,
        shock_regime,
    })
}

/// Params for a constant or continuous profile with equal states A = B = k;
/// the speed is free there, so it is supplied.
pub fn equal_states(k: f64, c: f64) -> Result<WaveParams> {
    if !(k.is_finite() && c.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "non-finite inputs k={k}, c={c}"
        )));
    }
    Ok(WaveParams {
        a: k,
        b: k,
        c,
        alpha: 0.5 * (k - c).powi(2) + k,
        shock_regime: false,
    })
}

/// The planar field F(U, V).
pub fn vector_field(p: &WaveParams, pt: PlanarPoint) -> PlanarPoint {
    let (u, v) = (pt.u, pt.v);
    PlanarPoint::new(
        (u - p.c) * v,
        -v * v + 0.5 * u * u + (1.0 - p.c) * u + 0.5 * p.c * p.c - p.alpha,
    )
}

/// True derivative of the field: [[V, U−c], [U+1−c, −2V]].
pub fn jacobian(p: &WaveParams, pt: PlanarPoint) -> [[f64; 2]; 2] {
    let (u, v) = (pt.u, pt.v);
    [[v, u - p.c], [u + 1.0 - p.c, -2.0 * v]]
}

/// The two rest points (c−1∓√(1+2(α−c)), 0), lower first.
pub fn equilibria(p: &WaveParams) -> Result<(PlanarPoint, PlanarPoint)> {
    let disc = 1.0 + 2.0 * (p.alpha - p.c);
    if disc < 0.0 {
        return Err(Error::Regime(format!(
            "no real equilibria: 1 + 2(α−c) = {disc} < 0"
        )));
    }
    let root = disc.sqrt();
    Ok((
        PlanarPoint::new(p.c - 1.0 - root, 0.0),
        PlanarPoint::new(p.c - 1.0 + root, 0.0),
    ))
}

/// Eigen-structure at the two saddles (S− = (B,0) first); requires the shock
/// regime A > B + 2 so both rest points are saddles. With d = A − B:
/// at S− the eigenvalues are ±√(d(2+d))/2 with unstable direction
/// (√(2+d), −√d); at S+ they are ±√(d(d−2))/2 with unstable (√(d−2), √d).
pub fn saddle_data(p: &WaveParams) -> Result<(SaddleData, SaddleData)> {
    let d = p.a - p.b;
    if d <= 2.0 {
        return Err(Error::Regime(format!(
            "saddle structure requires A > B + 2, got A − B = {d}"
        )));
    }
    let (lo, hi) = equilibria(p)?;
    let lam = 0.5 * (d * (2.0 + d)).sqrt();
    let mu = 0.5 * (d * (d - 2.0)).sqrt();
    let s_minus = SaddleData {
        location: lo,
        eigenvalue_neg: -lam,
        eigenvalue_pos: lam,
        eigvec_neg: PlanarPoint::new((2.0 + d).sqrt(), d.sqrt()),
        eigvec_pos: PlanarPoint::new((2.0 + d).sqrt(), -d.sqrt()),
    };
    let s_plus = SaddleData {
        location: hi,
        eigenvalue_neg: -mu,
        eigenvalue_pos: mu,
        eigvec_neg: PlanarPoint::new((d - 2.0).sqrt(), -d.sqrt()),
        eigvec_pos: PlanarPoint::new((d - 2.0).sqrt(), d.sqrt()),
    };
    Ok((s_minus, s_plus))
}

/// First integral H(U, V), constant along orbits.
pub fn first_integral_h(p: &WaveParams, pt: PlanarPoint) -> f64 {
    let (u, v) = (pt.u, pt.v);
    let bracket =
        v * v - 0.25 * u * u + (3.0 * p.c - 4.0) * u / 6.0 + p.alpha - 0.25 * p.c * p.c - p.c / 3.0;
    (u - p.c).powi(2) * bracket
}

/// Mutually exclusive classification of the parameter point.
pub fn regime_diagnostics(p: &WaveParams) -> RegimeDiagnostics {
    RegimeDiagnostics {
        alpha_le_c: p.alpha <= p.c,
        gap_le_two: (p.a - p.b).abs() <= 2.0,
        shock_regime: p.shock_regime,
    }
}
