//! Uniformly sampled functions on a finite interval with declared constant
//! tails and an optional jump at 0.
//!
//! A `GridFunction` represents f: ℝ → ℝ with f ≡ left_tail below `left_end`,
//! f ≡ right_tail above `right_end`, samples on the uniform grid between, and,
//! when the function is discontinuous at 0, the exact one-sided values
//! (f(0−), f(0+)) stored separately from the samples. A sample landing exactly
//! on 0 holds the midpoint (f(0−)+f(0+))/2 so that downstream interpolation
//! never reads a one-sided value from the wrong side.

use crate::error::{Error, Result};
use std::io::Write;
use std::path::Path;

/// Sampled function with constant tails and optional jump at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    left_end: f64,
    right_end: f64,
    samples: Vec<f64>,
    left_tail: f64,
    right_tail: f64,
    jump: Option<(f64, f64)>,
}

/// Relative slack used when testing whether a coordinate sits on a node.
const NODE_TOL: f64 = 1e-9;

impl GridFunction {
    /// Validating constructor; `jump` values are (f(0−), f(0+)).
    pub fn new(
        left_end: f64,
        right_end: f64,
        samples: Vec<f64>,
        left_tail: f64,
        right_tail: f64,
        jump: Option<(f64, f64)>,
    ) -> Result<Self> {
        if !(left_end.is_finite() && right_end.is_finite() && left_end < right_end) {
            return Err(Error::InvalidParams(format!(
                "need finite left_end < right_end, got [{left_end}, {right_end}]"
            )));
        }
        if samples.len() < 2 {
            return Err(Error::InvalidParams(format!(
                "need at least 2 samples, got {}",
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite sample".into()));
        }
        if !(left_tail.is_finite() && right_tail.is_finite()) {
            return Err(Error::InvalidParams("non-finite tail value".into()));
        }
        if let Some((l, r)) = jump {
            if !(l.is_finite() && r.is_finite()) {
                return Err(Error::InvalidParams("non-finite jump value".into()));
            }
            if !(left_end < 0.0 && 0.0 < right_end) {
                return Err(Error::InvalidParams(format!(
                    "jump declared but 0 is not strictly inside [{left_end}, {right_end}]"
                )));
            }
        }
        Ok(Self {
            left_end,
            right_end,
            samples,
            left_tail,
            right_tail,
            jump,
        })
    }

    /// Samples `f` on n nodes; a node at 0 gets the jump midpoint when a jump is declared.
    pub fn sample(
        left_end: f64,
        right_end: f64,
        n: usize,
        left_tail: f64,
        right_tail: f64,
        jump: Option<(f64, f64)>,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("need n >= 2, got {n}")));
        }
        let dx = (right_end - left_end) / (n - 1) as f64;
        let vals = (0..n)
            .map(|i| {
                let x = left_end + dx * i as f64;
                match jump {
                    Some((l, r)) if x.abs() < NODE_TOL * dx => 0.5 * (l + r),
                    _ => f(x),
                }
            })
            .collect();
        Self::new(left_end, right_end, vals, left_tail, right_tail, jump)
    }

    pub fn left_end(&self) -> f64 {
        self.left_end
    }

    pub fn right_end(&self) -> f64 {
        self.right_end
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    /// Grid spacing Δ.
    pub fn spacing(&self) -> f64 {
        (self.right_end - self.left_end) / (self.samples.len() - 1) as f64
    }

    /// Abscissa of node i.
    pub fn xi(&self, i: usize) -> f64 {
        self.left_end + self.spacing() * i as f64
    }

    pub fn left_tail(&self) -> f64 {
        self.left_tail
    }

    pub fn right_tail(&self) -> f64 {
        self.right_tail
    }

    /// One-sided values (f(0−), f(0+)) when the function jumps at 0.
    pub fn jump(&self) -> Option<(f64, f64)> {
        self.jump
    }

    /// Index of the node sitting exactly on 0, if any.
    pub fn node_at_zero(&self) -> Option<usize> {
        let dx = self.spacing();
        let i = ((0.0 - self.left_end) / dx).round();
        if i >= 0.0
            && (i as usize) < self.samples.len()
            && self.xi(i as usize).abs() < NODE_TOL * dx
        {
            Some(i as usize)
        } else {
            None
        }
    }

    /// Piecewise evaluator respecting the jump and the given kink locations.
    pub fn evaluator<'a>(&'a self, kinks: &[f64]) -> PiecewiseEval<'a> {
        PiecewiseEval::new(self, kinks)
    }

    /// Convenience point evaluation (builds a throwaway evaluator).
    pub fn eval(&self, x: f64, kinks: &[f64]) -> f64 {
        self.evaluator(kinks).eval(x)
    }

    /// Writes `xi,value` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = String::from("xi,value\n");
        for (i, v) in self.samples.iter().enumerate() {
            out.push_str(&format!("{},{}\n", self.xi(i), v));
        }
        std::fs::File::create(path)?.write_all(out.as_bytes())?;
        Ok(())
    }

    /// Writes the JSON sidecar carrying what the CSV cannot: tails and jump values.
    pub fn write_sidecar(&self, path: &Path) -> Result<()> {
        let side = Sidecar {
            left_tail: self.left_tail,
            right_tail: self.right_tail,
            jump_left: self.jump.map(|j| j.0),
            jump_right: self.jump.map(|j| j.1),
        };
        std::fs::write(path, serde_json::to_string_pretty(&side)?)?;
        Ok(())
    }

    /// Reads a `xi,value` CSV plus its sidecar back into a grid function.
    pub fn read_csv(csv_path: &Path, sidecar_path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(csv_path)?;
        let side: Sidecar = serde_json::from_str(&std::fs::read_to_string(sidecar_path)?)?;
        let (xs, cols) = parse_csv(&text, 1)?;
        let jump = match (side.jump_left, side.jump_right) {
            (Some(l), Some(r)) => Some((l, r)),
            (None, None) => None,
            _ => {
                return Err(Error::Malformed(
                    "sidecar declares only one side of the jump".into(),
                ))
            }
        };
        Self::new(
            xs[0],
            *xs.last().unwrap(),
            cols.into_iter().next().unwrap(),
            side.left_tail,
            side.right_tail,
            jump,
        )
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct Sidecar {
    left_tail: f64,
    right_tail: f64,
    jump_left: Option<f64>,
    jump_right: Option<f64>,
}

/// Parses a headered CSV of `1 + extra` columns; returns (first column, remaining columns).
/// The first column must be a uniform strictly increasing grid.
pub fn parse_csv(text: &str, extra: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let _header = lines
        .next()
        .ok_or_else(|| Error::Malformed("empty CSV".into()))?;
    let mut xs = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); extra];
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 1 + extra {
            return Err(Error::Malformed(format!(
                "row {}: expected {} fields, got {}",
                k + 2,
                1 + extra,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Malformed(format!("row {}: {e}", k + 2)))
        };
        xs.push(parse(fields[0])?);
        for (c, field) in fields[1..].iter().enumerate() {
            cols[c].push(parse(field)?);
        }
    }
    if xs.len() < 2 {
        return Err(Error::Malformed("need at least 2 data rows".into()));
    }
    let dx = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    if dx <= 0.0 {
        return Err(Error::Malformed("grid not increasing".into()));
    }
    for (i, &x) in xs.iter().enumerate() {
        if (x - (xs[0] + dx * i as f64)).abs() > 1e-6 * dx {
            return Err(Error::Malformed(format!(
                "grid not uniform near row {}",
                i + 2
            )));
        }
    }
    Ok((xs, cols))
}

/// Node list of one smooth piece, including virtual one-sided nodes at a jump edge.
struct Piece {
    lo: f64,
    hi: f64,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

/// Evaluates a `GridFunction` by cubic Lagrange interpolation with stencils
/// confined to smooth pieces (delimited by the jump and declared kinks), so
/// interpolation never straddles a discontinuity of the function or its slope.
pub struct PiecewiseEval<'a> {
    g: &'a GridFunction,
    pieces: Vec<Piece>,
}

impl<'a> PiecewiseEval<'a> {
    fn new(g: &'a GridFunction, kinks: &[f64]) -> Self {
        let dx = g.spacing();
        let mut bounds: Vec<f64> = vec![g.left_end, g.right_end];
        if g.jump.is_some() {
            bounds.push(0.0);
        }
        for &k in kinks {
            if g.left_end < k && k < g.right_end && !(g.jump.is_some() && k == 0.0) {
                bounds.push(k);
            }
        }
        bounds.sort_by(f64::total_cmp);
        bounds.dedup_by(|a, b| (*a - *b).abs() < NODE_TOL * dx);

        let jump_at = |x: f64| g.jump.is_some() && x.abs() < NODE_TOL * dx;
        let mut pieces = Vec::new();
        for w in bounds.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            if jump_at(lo) {
                xs.push(0.0);
                ys.push(g.jump.unwrap().1);
            }
            for i in 0..g.n() {
                let x = g.xi(i);
                let on_lo = (x - lo).abs() < NODE_TOL * dx;
                let on_hi = (x - hi).abs() < NODE_TOL * dx;
                // A node on a jump edge holds the midpoint value: excluded.
                // A node on a kink edge is shared by both pieces: included.
                let inside = (x > lo + NODE_TOL * dx || on_lo) && (x < hi - NODE_TOL * dx || on_hi);
                if inside && !jump_at(x) {
                    xs.push(x);
                    ys.push(g.samples[i]);
                }
            }
            if jump_at(hi) {
                xs.push(0.0);
                ys.push(g.jump.unwrap().0);
            }
            if xs.is_empty() {
                // Degenerate piece narrower than the grid: fall back to the
                // nearest plain samples so evaluation stays defined.
                let mid = 0.5 * (lo + hi);
                let i = (((mid - g.left_end) / dx).round() as isize).clamp(0, g.n() as isize - 1)
                    as usize;
                xs.push(g.xi(i));
                ys.push(g.samples[i]);
            }
            pieces.push(Piece { lo, hi, xs, ys });
        }
        Self { g, pieces }
    }

    /// Point evaluation; exactly 0 with a declared jump yields the midpoint.
    pub fn eval(&self, x: f64) -> f64 {
        let g = self.g;
        let dx = g.spacing();
        if x < g.left_end - NODE_TOL * dx {
            return g.left_tail;
        }
        if x > g.right_end + NODE_TOL * dx {
            return g.right_tail;
        }
        if let Some((l, r)) = g.jump {
            if x.abs() < NODE_TOL * dx {
                return 0.5 * (l + r);
            }
        }
        let piece = self
            .pieces
            .iter()
            .find(|p| x >= p.lo - NODE_TOL * dx && x <= p.hi + NODE_TOL * dx)
            .expect("x inside [left_end, right_end] lies in some piece");
        Self::stencil_eval(&piece.xs, &piece.ys, x)
    }

    /// One-sided evaluation from the piece left (`side < 0`) or right (`side > 0`) of `at`.
    pub fn eval_one_sided(&self, at: f64, side: i8) -> f64 {
        let dx = self.g.spacing();
        if let Some((l, r)) = self.g.jump {
            if at.abs() < NODE_TOL * dx {
                return if side < 0 { l } else { r };
            }
        }
        self.eval(at)
    }

    fn stencil_eval(xs: &[f64], ys: &[f64], x: f64) -> f64 {
        match xs.len() {
            0 => f64::NAN,
            1 => ys[0],
            len => {
                let j = xs.partition_point(|&p| p < x);
                let width = 4.min(len);
                let start = j.saturating_sub(width / 2).min(len - width);
                lagrange(&xs[start..start + width], &ys[start..start + width], x)
            }
        }
    }
}

/// Lagrange interpolation through the given (distinct) abscissae.
fn lagrange(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..xs.len() {
        let mut li = ys[i];
        for j in 0..xs.len() {
            if j != i {
                li *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        acc += li;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn tmpdir() -> std::path::PathBuf {
        let d = std::env::temp_dir().join(format!("fw-grid-{}", std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(GridFunction::new(1.0, -1.0, vec![0.0, 1.0], 0.0, 0.0, None).is_err());
        assert!(GridFunction::new(-1.0, 1.0, vec![0.0], 0.0, 0.0, None).is_err());
        assert!(GridFunction::new(-1.0, 1.0, vec![0.0, f64::NAN], 0.0, 0.0, None).is_err());
        // jump must have 0 strictly inside
        assert!(GridFunction::new(1.0, 2.0, vec![0.0, 1.0], 0.0, 0.0, Some((1.0, 2.0))).is_err());
    }

    #[test]
    fn node_at_zero_midpoint_convention() {
        let g = GridFunction::sample(-1.0, 1.0, 5, 4.0, 0.0, Some((4.0, 0.0)), |x| {
            if x < 0.0 {
                4.0
            } else {
                0.0
            }
        })
        .unwrap();
        assert_eq!(g.node_at_zero(), Some(2));
        assert!((g.samples()[2] - 2.0).abs() < TOL);
    }

    #[test]
    fn smooth_interpolation_is_cubic_accurate() {
        let g = GridFunction::sample(-2.0, 2.0, 81, 0.0, 0.0, None, |x| x.sin()).unwrap();
        let ev = g.evaluator(&[]);
        let mut worst = 0.0f64;
        for k in 0..200 {
            let x = -1.9 + 3.8 * k as f64 / 199.0;
            worst = worst.max((ev.eval(x) - x.sin()).abs());
        }
        // Δ = 0.05, cubic Lagrange error ~ Δ⁴
        assert!(worst < 5e-6, "worst interpolation error {worst:.3e}");
    }

    #[test]
    fn jump_pieces_interpolate_one_sided() {
        let step = |x: f64| if x < 0.0 { 4.0 } else { 0.0 };
        let g = GridFunction::sample(-1.0, 1.0, 41, 4.0, 0.0, Some((4.0, 0.0)), step).unwrap();
        let ev = g.evaluator(&[]);
        assert!((ev.eval(-0.013) - 4.0).abs() < TOL);
        assert!((ev.eval(0.013) - 0.0).abs() < TOL);
        assert!((ev.eval(0.0) - 2.0).abs() < TOL);
        assert!((ev.eval_one_sided(0.0, -1) - 4.0).abs() < TOL);
        assert!((ev.eval_one_sided(0.0, 1) - 0.0).abs() < TOL);
    }

    #[test]
    fn kink_pieces_keep_accuracy() {
        let f = |x: f64| (4.0 / 3.0) * (-0.5 * x.abs()).exp();
        let g = GridFunction::sample(-10.0, 10.0, 401, 0.0, 0.0, None, f).unwrap();
        let ev = g.evaluator(&[0.0]);
        let mut worst = 0.0f64;
        for k in 0..400 {
            let x = -9.0 + 18.0 * k as f64 / 399.0;
            worst = worst.max((ev.eval(x) - f(x)).abs());
        }
        assert!(worst < 1e-6, "worst kink-aware error {worst:.3e}");
    }

    #[test]
    fn tails_apply_outside() {
        let g = GridFunction::sample(-1.0, 1.0, 11, 7.0, -3.0, None, |_| 0.0).unwrap();
        assert_eq!(g.eval(-5.0, &[]), 7.0);
        assert_eq!(g.eval(5.0, &[]), -3.0);
    }

    #[test]
    fn csv_roundtrip_preserves_everything() {
        let dir = tmpdir();
        let g =
            GridFunction::sample(-2.0, 3.0, 17, 1.5, -0.5, Some((1.0, -1.0)), |x| x * x).unwrap();
        let csv = dir.join("g.csv");
        let side = dir.join("g.json");
        g.write_csv(&csv).unwrap();
        g.write_sidecar(&side).unwrap();
        let h = GridFunction::read_csv(&csv, &side).unwrap();
        assert_eq!(g, h);
    }
}
