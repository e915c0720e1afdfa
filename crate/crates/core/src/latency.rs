//! Resource latency functions: non-decreasing, positive cost curves.
//!
//! Three families are supported: polynomials with non-negative coefficients,
//! positive constants, and an abscissa-and-ordinate-scaled wrapper
//! `a * f(b * x)` around an inner function. Monotonicity and positivity are
//! validated at construction by sampling a log-spaced grid, so downstream
//! code can treat every constructed value as a valid latency.

use crate::error::{Error, Result};

const GRID_POINTS: usize = 64;
const GRID_LO: f64 = 1e-6;
const GRID_HI: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    /// Coefficients in increasing degree order: c0 + c1 x + c2 x^2 + ...
    Poly(Vec<f64>),
    Const(f64),
    Scaled {
        scale: f64,
        stretch: f64,
        inner: Box<LatencyFunction>,
    },
}

/// A validated latency function.
#[derive(Debug, Clone, PartialEq)]
pub struct LatencyFunction {
    kind: Kind,
    quasi_log_convex: bool,
}

impl LatencyFunction {
    /// Polynomial latency with non-negative coefficients (degree order,
    /// constant term first). At least one coefficient must be positive.
    pub fn poly(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("polynomial needs coefficients".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::Invalid(
                "polynomial coefficients must be finite and >= 0".into(),
            ));
        }
        if coeffs.iter().all(|c| *c == 0.0) {
            return Err(Error::Invalid(
                "polynomial must have a positive coefficient".into(),
            ));
        }
        let f = LatencyFunction {
            kind: Kind::Poly(coeffs),
            quasi_log_convex: true,
        };
        f.validate()?;
        Ok(f)
    }

    /// Monomial `x^p` (p >= 1) or the constant 1 for p = 0.
    pub fn monomial(p: u32) -> Self {
        let mut coeffs = vec![0.0; p as usize + 1];
        coeffs[p as usize] = 1.0;
        // A monomial always passes validation.
        LatencyFunction::poly(coeffs).expect("monomial is a valid latency")
    }

    /// Constant latency `c > 0`.
    pub fn constant(c: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::Invalid(format!("constant latency must be > 0, got {c}")));
        }
        Ok(LatencyFunction {
            kind: Kind::Const(c),
            quasi_log_convex: true,
        })
    }

    /// Scaled wrapper `scale * inner(stretch * x)` with `scale, stretch >= 0`.
    pub fn scaled(scale: f64, stretch: f64, inner: LatencyFunction) -> Result<Self> {
        if !scale.is_finite() || scale < 0.0 || !stretch.is_finite() || stretch < 0.0 {
            return Err(Error::Invalid(
                "scaled wrapper needs finite scale and stretch >= 0".into(),
            ));
        }
        let quasi_log_convex = inner.quasi_log_convex;
        let f = LatencyFunction {
            kind: Kind::Scaled {
                scale,
                stretch,
                inner: Box::new(inner),
            },
            quasi_log_convex,
        };
        f.validate()?;
        Ok(f)
    }

    /// Parse the CLI spec grammar: `poly:<c0>,<c1>,...` or `const:<c>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = |s: &str| Error::Invalid(format!("bad latency spec '{s}'"));
        let (family, rest) = spec.split_once(':').ok_or_else(|| bad(spec))?;
        match family {
            "poly" => {
                let coeffs = rest
                    .split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|_| bad(spec)))
                    .collect::<Result<Vec<f64>>>()?;
                LatencyFunction::poly(coeffs)
            }
            "const" => {
                let c = rest.trim().parse::<f64>().map_err(|_| bad(spec))?;
                LatencyFunction::constant(c)
            }
            _ => Err(bad(spec)),
        }
    }

    /// Evaluate `l(x)`. The model only queries positive loads; `x = 0` is
    /// accepted and returns the right-limit (used as the cost of an empty
    /// resource in non-atomic deviation checks).
    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::Poly(coeffs) => {
                let mut acc = 0.0;
                for &c in coeffs.iter().rev() {
                    acc = acc * x + c;
                }
                acc
            }
            Kind::Const(c) => *c,
            Kind::Scaled { scale, stretch, inner } => scale * inner.eval(stretch * x),
        }
    }

    /// Whether `x * ln l(x)` is convex (set for all built-in families and
    /// inherited by scaled wrappers; verified on a grid at construction).
    pub fn is_quasi_log_convex(&self) -> bool {
        self.quasi_log_convex
    }

    /// Highest degree with a positive coefficient (constants report 0);
    /// scaling does not change the degree.
    pub fn max_degree(&self) -> u32 {
        match &self.kind {
            Kind::Poly(coeffs) => coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c > 0.0)
                .map(|(i, _)| i as u32)
                .max()
                .unwrap_or(0),
            Kind::Const(_) => 0,
            Kind::Scaled { inner, .. } => inner.max_degree(),
        }
    }

    /// The CLI grammar string for this function, when it has one
    /// (scaled wrappers do not).
    pub fn spec(&self) -> Option<String> {
        match &self.kind {
            Kind::Poly(coeffs) => Some(format!(
                "poly:{}",
                coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
            )),
            Kind::Const(c) => Some(format!("const:{c}")),
            Kind::Scaled { .. } => None,
        }
    }

    pub(crate) fn to_json(&self) -> crate::json::LatencyJson {
        match &self.kind {
            Kind::Poly(coeffs) => crate::json::LatencyJson::Poly { coeffs: coeffs.clone() },
            Kind::Const(c) => crate::json::LatencyJson::Const { value: *c },
            Kind::Scaled { scale, stretch, inner } => crate::json::LatencyJson::Scaled {
                a: *scale,
                b: *stretch,
                inner: Box::new(inner.to_json()),
            },
        }
    }

    fn validate(&self) -> Result<()> {
        let grid = sample_grid();
        let values: Vec<f64> = grid.iter().map(|&x| self.eval(x)).collect();
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::Invalid(format!(
                    "latency not positive at x = {:.3e} (value {v:.3e})",
                    grid[i]
                )));
            }
        }
        for i in 1..values.len() {
            if values[i] < values[i - 1] * (1.0 - 1e-12) {
                return Err(Error::Invalid(format!(
                    "latency decreases between x = {:.3e} and x = {:.3e}",
                    grid[i - 1],
                    grid[i]
                )));
            }
        }
        if self.quasi_log_convex {
            // Chord condition of x*ln l(x) on consecutive grid triples.
            let g: Vec<f64> = grid
                .iter()
                .zip(&values)
                .map(|(&x, &v)| x * v.ln())
                .collect();
            for i in 0..g.len() - 2 {
                let (x0, x1, x2) = (grid[i], grid[i + 1], grid[i + 2]);
                let chord = g[i] + (g[i + 2] - g[i]) * (x1 - x0) / (x2 - x0);
                let slack = 1e-9 * 1.0_f64.max(g[i].abs()).max(g[i + 2].abs());
                if g[i + 1] > chord + slack {
                    return Err(Error::Invalid(format!(
                        "quasi-log-convexity fails near x = {x1:.3e}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn sample_grid() -> Vec<f64> {
    let (lo, hi) = (GRID_LO.log10(), GRID_HI.log10());
    (0..GRID_POINTS)
        .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64))
        .collect()
}
