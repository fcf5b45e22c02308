//! Cone-like index sets in the summation lattice.
//!
//! Unrestricted multi-parameter convergence is governed by worst-case index
//! directions, so the maximal operators here are restricted to cone-like
//! sets: regions where every coordinate `n_j` is pinned to a window around
//! a function of the first coordinate,
//!
//! ```text
//! beta_j^{-1} gamma_j(n_1) <= n_j <= beta_j gamma_j(n_1),   j = 2..d.
//! ```
//!
//! A cone-restriction function `gamma` must be strictly increasing and
//! continuous on `[1, inf)` with `gamma(1) = 1`, tend to infinity, and obey
//! a doubling-type sandwich: for some `zeta > 1` and constants
//! `c_lo, c_hi > 1`,
//!
//! ```text
//! c_lo * gamma(x) <= gamma(zeta x) <= c_hi * gamma(x).
//! ```
//!
//! The sandwich is what rules out exponential growth (no `c_hi` works for
//! `exp` once `x` is large) while admitting powers and power-log shapes.
//! [`CrfSpec::validate`] checks all of this on a geometric sample grid and
//! reports the first violated constraint.
//!
//! Two derived index paths drive the experiments. `nbar_of` maps a scale
//! `n_1` to the dyadic orders of `gamma_j(2^{n_1})`, giving the martingale
//! subsequence that defines the cone's Hardy space. `ln_index` walks the
//! interior path `L_1 = 2^{n_1} + N`, `L_j = floor(gamma_j(L_1))`, along
//! which the counterexample's Cesàro means are evaluated; membership of the
//! floored point in the cone (with the spec's own slack `beta`) is checked,
//! not assumed.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Catalog of cone-restriction functions, plus a sampled table for shapes
/// outside the catalog. Table entries interpolate linearly in log-log
/// coordinates, so piecewise power behaviour is represented exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GammaFn {
    /// `gamma(x) = x`
    Identity,
    /// `gamma(x) = x^exponent` with `exponent >= 1`
    Power { exponent: f64 },
    /// `gamma(x) = x (1 + ln x)`
    LogLinear,
    /// Samples `(xs[i], ys[i])`; `xs` strictly increasing from 1, `ys[0] = 1`.
    Table { xs: Vec<f64>, ys: Vec<f64> },
}

impl GammaFn {
    pub fn eval(&self, x: f64) -> f64 {
        debug_assert!(x >= 1.0, "gamma is defined on [1, inf), got {x}");
        match self {
            GammaFn::Identity => x,
            GammaFn::Power { exponent } => x.powf(*exponent),
            GammaFn::LogLinear => x * (1.0 + x.ln()),
            GammaFn::Table { xs, ys } => interpolate_loglog(xs, ys, x),
        }
    }

    fn check_well_formed(&self, axis: usize) -> Result<()> {
        match self {
            GammaFn::Power { exponent } if *exponent < 1.0 => Err(Error::BadCone {
                axis,
                reason: format!("power exponent must be >= 1, got {exponent}"),
            }),
            GammaFn::Table { xs, ys } => {
                if xs.len() != ys.len() || xs.len() < 2 {
                    return Err(Error::BadCone {
                        axis,
                        reason: "table needs matching xs/ys with at least two samples".into(),
                    });
                }
                if (xs[0] - 1.0).abs() > 1e-12 {
                    return Err(Error::BadCone {
                        axis,
                        reason: format!("table must start at x = 1, got {}", xs[0]),
                    });
                }
                if !xs.windows(2).all(|w| w[1] > w[0]) {
                    return Err(Error::BadCone {
                        axis,
                        reason: "table xs must be strictly increasing".into(),
                    });
                }
                if ys.iter().any(|&y| y <= 0.0) {
                    return Err(Error::BadCone {
                        axis,
                        reason: "table ys must be positive".into(),
                    });
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

fn interpolate_loglog(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let lx = x.ln();
    // clamp below, extrapolate above with the last segment's slope
    if x <= xs[0] {
        return ys[0];
    }
    let seg = match xs.iter().position(|&xi| xi >= x) {
        Some(i) => i.max(1) - 1,
        None => xs.len() - 2,
    };
    let (x0, x1) = (xs[seg].ln(), xs[seg + 1].ln());
    let (y0, y1) = (ys[seg].ln(), ys[seg + 1].ln());
    let t = (lx - x0) / (x1 - x0);
    (y0 + t * (y1 - y0)).exp()
}

/// Why a CRF candidate failed validation.
#[derive(Clone, Debug, PartialEq)]
pub enum CrfViolation {
    GammaAtOne { value: f64 },
    NotIncreasing { x: f64 },
    BelowLower { x: f64, ratio: f64, c_lo: f64 },
    AboveUpper { x: f64, ratio: f64, c_hi: f64 },
}

impl std::fmt::Display for CrfViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CrfViolation::GammaAtOne { value } => write!(f, "gamma(1) = {value}, expected 1"),
            CrfViolation::NotIncreasing { x } => write!(f, "gamma is not strictly increasing at x = {x}"),
            CrfViolation::BelowLower { x, ratio, c_lo } => {
                write!(f, "gamma(zeta x)/gamma(x) = {ratio} < c_lo = {c_lo} at x = {x}")
            }
            CrfViolation::AboveUpper { x, ratio, c_hi } => {
                write!(f, "gamma(zeta x)/gamma(x) = {ratio} > c_hi = {c_hi} at x = {x}")
            }
        }
    }
}

/// A cone-restriction function with its sandwich constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrfSpec {
    pub gamma: GammaFn,
    pub zeta: f64,
    pub c_lo: f64,
    pub c_hi: f64,
}

impl CrfSpec {
    /// Checks the CRF conditions on a geometric grid of `samples` points
    /// spanning `[1, x_max]`. Returns the first violated constraint, if any.
    /// Comparisons carry a relative slack of a few ulps so that exact
    /// equality cases (identity with `c = zeta`) validate cleanly.
    pub fn validate(&self, x_max: f64, samples: usize) -> std::result::Result<(), CrfViolation> {
        assert!(x_max > 1.0 && samples >= 2, "need x_max > 1 and at least two samples");
        let g1 = self.gamma.eval(1.0);
        if (g1 - 1.0).abs() > 1e-9 {
            return Err(CrfViolation::GammaAtOne { value: g1 });
        }
        let step = x_max.powf(1.0 / (samples - 1) as f64);
        let slack = 1e-12;
        let mut x = 1.0;
        let mut prev = g1;
        for i in 0..samples {
            let gx = self.gamma.eval(x);
            if i > 0 && gx <= prev {
                return Err(CrfViolation::NotIncreasing { x });
            }
            prev = gx;
            let ratio = self.gamma.eval(self.zeta * x) / gx;
            if ratio < self.c_lo * (1.0 - slack) {
                return Err(CrfViolation::BelowLower { x, ratio, c_lo: self.c_lo });
            }
            if ratio > self.c_hi * (1.0 + slack) {
                return Err(CrfViolation::AboveUpper { x, ratio, c_hi: self.c_hi });
            }
            x *= step;
        }
        Ok(())
    }
}

/// One restricted axis of a cone: the CRF tying `n_j` to `n_1`, and the
/// window width `beta_j >= 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeAxis {
    #[serde(flatten)]
    pub crf: CrfSpec,
    pub beta: f64,
}

/// A cone-like set in `d` dimensions: one [`ConeAxis`] per coordinate
/// `j = 2..d`. An empty axis list is the trivial one-dimensional cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    #[serde(rename = "axis", default)]
    axes: Vec<ConeAxis>,
}

impl ConeSpec {
    pub fn new(axes: Vec<ConeAxis>) -> Result<Self> {
        for (i, axis) in axes.iter().enumerate() {
            let j = i + 2; // axes describe coordinates 2..d
            axis.crf.gamma.check_well_formed(j)?;
            if axis.beta < 1.0 {
                return Err(Error::BadCone {
                    axis: j,
                    reason: format!("beta must be >= 1, got {}", axis.beta),
                });
            }
            if axis.crf.zeta <= 1.0 || axis.crf.c_lo <= 1.0 || axis.crf.c_hi <= 1.0 {
                return Err(Error::BadCone {
                    axis: j,
                    reason: "zeta, c_lo, c_hi must all exceed 1".into(),
                });
            }
        }
        Ok(ConeSpec { axes })
    }

    /// Catalog lookup: `identity`, `power:<exponent>`, or `loglinear`, in
    /// `d >= 1` dimensions. Sandwich constants use `zeta = 2`; `beta` is 1
    /// for the identity (the path lands on the diagonal exactly) and 2
    /// otherwise, enough to absorb the floor in [`ConeSpec::ln_index`].
    pub fn catalog(name: &str, d: usize) -> Result<Self> {
        if d < 1 {
            return Err(Error::BadParameter("cone dimension must be >= 1".into()));
        }
        let axis = match name {
            "identity" => ConeAxis {
                crf: CrfSpec {
                    gamma: GammaFn::Identity,
                    zeta: 2.0,
                    c_lo: 2.0,
                    c_hi: 2.0,
                },
                beta: 1.0,
            },
            "loglinear" => ConeAxis {
                crf: CrfSpec {
                    gamma: GammaFn::LogLinear,
                    zeta: 2.0,
                    c_lo: 2.0,
                    // ratio gamma(2x)/gamma(x) = 2 (1 + ln 2 / (1 + ln x)),
                    // largest at x = 1
                    c_hi: 2.0 * (1.0 + (2.0f64).ln()) + 1e-9,
                },
                beta: 2.0,
            },
            other => match other.strip_prefix("power:") {
                Some(exp) => {
                    let exponent: f64 = exp.parse().map_err(|_| {
                        Error::BadParameter(format!("bad power exponent '{exp}'"))
                    })?;
                    ConeAxis {
                        crf: CrfSpec {
                            gamma: GammaFn::Power { exponent },
                            zeta: 2.0,
                            c_lo: (2.0f64).powf(exponent) - 1e-9,
                            c_hi: (2.0f64).powf(exponent) + 1e-9,
                        },
                        beta: 2.0,
                    }
                }
                None => {
                    return Err(Error::BadParameter(format!(
                        "unknown cone '{name}' (expected identity, power:<p>, loglinear, or a config file)"
                    )))
                }
            },
        };
        ConeSpec::new(vec![axis; d - 1])
    }

    /// Parses a TOML cone description: one `[[axis]]` table per restricted
    /// coordinate with `gamma`, `zeta`, `c_lo`, `c_hi`, `beta` fields.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let parsed: ConeSpec = toml::from_str(text)
            .map_err(|e| Error::BadParameter(format!("cone config: {e}")))?;
        // re-run the constructor checks
        ConeSpec::new(parsed.axes)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("cone specs serialize")
    }

    /// Number of dimensions `d` (one unrestricted axis plus the rest).
    pub fn dims(&self) -> usize {
        self.axes.len() + 1
    }

    pub fn axes(&self) -> &[ConeAxis] {
        &self.axes
    }

    /// Validates every axis CRF on `[1, x_max]`; the error names the axis.
    pub fn validate(&self, x_max: f64, samples: usize) -> Result<()> {
        for (i, axis) in self.axes.iter().enumerate() {
            axis.crf.validate(x_max, samples).map_err(|v| Error::BadCone {
                axis: i + 2,
                reason: v.to_string(),
            })?;
        }
        Ok(())
    }

    /// Is the index vector `n` inside the cone? Needs `n_1 >= 1`.
    pub fn contains(&self, n: &[usize]) -> bool {
        assert_eq!(n.len(), self.dims(), "index arity mismatch");
        assert!(n[0] >= 1, "cone membership needs n_1 >= 1");
        let x = n[0] as f64;
        self.axes.iter().zip(&n[1..]).all(|(axis, &nj)| {
            let g = axis.crf.gamma.eval(x);
            let nj = nj as f64;
            g <= axis.beta * nj && nj <= axis.beta * g
        })
    }

    /// The dyadic order vector of the scale `n_1`: entry `j` is the order
    /// of `gamma_j(2^{n_1})`, so `2^{n_j} <= gamma_j(2^{n_1}) < 2^{n_j+1}`.
    /// Entry 1 is `n_1` itself.
    pub fn nbar_of(&self, n1: u32) -> Vec<u32> {
        let x = (1u64 << n1) as f64;
        let mut out = Vec::with_capacity(self.dims());
        out.push(n1);
        for axis in &self.axes {
            out.push(float_order(axis.crf.gamma.eval(x)));
        }
        out
    }

    /// The interior index path at scale `n_1`: `L_1 = 2^{n_1} + N` for
    /// `0 < N < 2^{n_1}`, and `L_j = floor(gamma_j(L_1))` on the restricted
    /// axes. The floored point is verified to lie inside the cone under the
    /// spec's own `beta`.
    pub fn ln_index(&self, n1: u32, n: usize) -> Result<Vec<usize>> {
        if n == 0 || n >= (1usize << n1) {
            return Err(Error::LnIndexOutOfRange { n, n1 });
        }
        let l1 = (1usize << n1) + n;
        let mut out = Vec::with_capacity(self.dims());
        out.push(l1);
        for axis in &self.axes {
            out.push(float_floor(axis.crf.gamma.eval(l1 as f64)));
        }
        if !self.contains(&out) {
            return Err(Error::BadParameter(format!(
                "L^N index {out:?} escaped the cone at n1 = {n1}, N = {n}; beta is too tight for the floor"
            )));
        }
        Ok(out)
    }

    /// Enumerates every integer index vector inside the cone with `n_1` in
    /// `[n1_lo, n1_hi]` and all coordinates capped (inclusively) by `cap`.
    /// This is the index family of the restricted maximal operator at a
    /// finite resolution, so the order is deterministic: lexicographic.
    pub fn lattice(&self, n1_lo: usize, n1_hi: usize, cap: &[usize]) -> Vec<Vec<usize>> {
        assert_eq!(cap.len(), self.dims(), "cap arity mismatch");
        assert!(n1_lo >= 1, "cone indices need n_1 >= 1");
        let mut out = Vec::new();
        for n1 in n1_lo..=n1_hi.min(cap[0]) {
            let windows: Vec<(usize, usize)> = self
                .axes
                .iter()
                .zip(&cap[1..])
                .map(|(axis, &cap_j)| {
                    let g = axis.crf.gamma.eval(n1 as f64);
                    let lo = float_ceil(g / axis.beta).max(1);
                    let hi = float_floor(g * axis.beta).min(cap_j);
                    (lo, hi)
                })
                .collect();
            if windows.iter().any(|&(lo, hi)| lo > hi) {
                continue;
            }
            let mut point = vec![n1];
            self.push_window_products(&mut point, &windows, &mut out);
        }
        out
    }

    fn push_window_products(
        &self,
        prefix: &mut Vec<usize>,
        windows: &[(usize, usize)],
        out: &mut Vec<Vec<usize>>,
    ) {
        match windows.first() {
            None => {
                // float endpoints can overshoot the defining inequalities by
                // an ulp, so membership is re-checked rather than assumed
                if self.contains(prefix) {
                    out.push(prefix.clone());
                }
            }
            Some(&(lo, hi)) => {
                for v in lo..=hi {
                    prefix.push(v);
                    self.push_window_products(prefix, &windows[1..], out);
                    prefix.pop();
                }
            }
        }
    }
}

/// Floor with a snap: values within a relative 1e-9 of an integer round to
/// it first, so grid effects of `powf` (e.g. `16^1.5 = 64` landing at
/// `63.999...99`) cannot shift a dyadic order.
fn float_floor(y: f64) -> usize {
    let r = y.round();
    if (y - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r as usize
    } else {
        y.floor() as usize
    }
}

fn float_ceil(y: f64) -> usize {
    let r = y.round();
    if (y - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r as usize
    } else {
        y.ceil() as usize
    }
}

fn float_order(y: f64) -> u32 {
    assert!(y >= 1.0);
    let l = y.log2();
    let r = l.round();
    if (l - r).abs() <= 1e-9 {
        r as u32
    } else {
        l.floor() as u32
    }
}

// ===== tests
