//! Non-decreasing extended-real functions of one nonnegative real variable.
//!
//! `MonotoneFn` is the carrier for concentration lower bounds and their
//! generalized inverses: a breakpoint table with linear (or right-continuous
//! step) interpolation, an analytic tail beyond the last breakpoint, and an
//! optional closed-form override for exact cases.
//!
//! Evaluation is the *right-continuous envelope*: at a jump the function
//! takes its upper value. With the `sup {r >= 0 : f(r) <= s}` inverse
//! convention this is exactly what makes `f(f^{-1}(s)) >= s` hold for every
//! representable function, including steps and jumps to `+inf`.

use std::f64::consts::LN_2;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extreal::ExtReal;
use crate::gauss;

/// Relative drop between consecutive breakpoint values that is treated as
/// quadrature noise and clamped instead of rejected.
const CLAMP_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MonotoneError {
    #[error("breakpoint sequence is empty")]
    EmptyBreakpoints,
    #[error("breakpoint abscissae must be finite, nonnegative and strictly increasing (index {0})")]
    BadAbscissa(usize),
    #[error("breakpoint values decrease by {drop:.3e} at index {index}, beyond the 1e-12 clamp tolerance")]
    DecreasingValues { index: usize, drop: f64 },
    #[error("+inf value at index {0} is followed by a finite value; infinity must persist")]
    InfinityNotPersistent(usize),
    #[error("invalid tail: {0}")]
    InvalidTail(String),
    #[error("closed form disagrees with breakpoint table at r = {r}: table {table}, closed form {closed}")]
    ClosedFormMismatch { r: f64, table: ExtReal, closed: ExtReal },
    #[error("unknown closed form name: {0}")]
    UnknownClosedForm(String),
}

/// Behaviour of a `MonotoneFn` beyond its last breakpoint `(r_n, v_n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Tail {
    /// `f(r) = v_n`.
    Constant,
    /// `f(r) = v_n + slope * (r - r_n)`, `slope >= 0`.
    Linear { slope: f64 },
    /// `f(r) = c * r^p` (clamped below by `v_n` so monotonicity survives a
    /// slightly low junction).
    Power { c: f64, p: f64 },
    /// `f(r) = delta * kappa * r^2`, the quadratic growth floor.
    QuadraticPlus { delta: f64, kappa: f64 },
    /// `f(r) = +inf` for all `r >= r_n`. The stored value at `r_n` is the
    /// left limit there; the right-continuous envelope is `+inf` at `r_n`.
    Infinite,
}

/// Interpolation rule between breakpoints.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interpolation {
    #[default]
    Linear,
    /// Piecewise constant, continuous from the right: `f = v_i` on
    /// `[r_i, r_{i+1})`. Represents genuine step functions exactly.
    StepRight,
}

/// Analytic override for exact cases: evaluator plus (where available) an
/// analytic generalized inverse.
#[derive(Clone)]
pub enum ClosedForm {
    /// `a + b r` with `b >= 0`.
    Linear { a: f64, b: f64 },
    /// `c r^p` with `c >= 0`, `p > 0`.
    Power { c: f64, p: f64 },
    /// `(r/p + (ln 2)^{1/p})^p`, the profile recovered from
    /// `I(v) = v log^{1-1/p}(1/v)`.
    PowerShifted { p: f64 },
    /// `(ln 2) e^r`, the profile recovered from `I(v) = v log(1/v)`.
    ExpLog2,
    /// Gaussian log-concentration `-ln(1 - Phi(r))`.
    GaussianConc,
    /// Caller-supplied evaluator; `inverse`, when given, must implement the
    /// same `sup` convention as [`MonotoneFn::gen_inverse`].
    Custom {
        name: String,
        eval: Arc<dyn Fn(f64) -> ExtReal + Send + Sync>,
        inverse: Option<Arc<dyn Fn(f64) -> ExtReal + Send + Sync>>,
    },
}

impl fmt::Debug for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClosedForm({})", self.name())
    }
}

impl ClosedForm {
    pub fn name(&self) -> String {
        match self {
            ClosedForm::Linear { a, b } => format!("linear:a={a},b={b}"),
            ClosedForm::Power { c, p } => format!("power:c={c},p={p}"),
            ClosedForm::PowerShifted { p } => format!("power-shifted:p={p}"),
            ClosedForm::ExpLog2 => "exp-log2".to_string(),
            ClosedForm::GaussianConc => "gaussian-conc".to_string(),
            ClosedForm::Custom { name, .. } => name.clone(),
        }
    }

    /// Parses the serialized name back into a closed form. Custom forms are
    /// not reconstructible and yield an error.
    pub fn from_name(name: &str) -> Result<Self, MonotoneError> {
        let (head, args) = parse_kv_spec(name);
        let get = |key: &str| -> Result<f64, MonotoneError> {
            args.iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| MonotoneError::UnknownClosedForm(name.to_string()))
        };
        match head.as_str() {
            "linear" => Ok(ClosedForm::Linear { a: get("a")?, b: get("b")? }),
            "power" => Ok(ClosedForm::Power { c: get("c")?, p: get("p")? }),
            "power-shifted" => Ok(ClosedForm::PowerShifted { p: get("p")? }),
            "exp-log2" => Ok(ClosedForm::ExpLog2),
            "gaussian-conc" => Ok(ClosedForm::GaussianConc),
            _ => Err(MonotoneError::UnknownClosedForm(name.to_string())),
        }
    }

    pub fn eval(&self, r: f64) -> ExtReal {
        match self {
            ClosedForm::Linear { a, b } => ExtReal::finite(a + b * r),
            ClosedForm::Power { c, p } => ExtReal::finite(c * r.powf(*p)),
            ClosedForm::PowerShifted { p } => {
                ExtReal::finite((r / p + LN_2.powf(1.0 / p)).powf(*p))
            }
            ClosedForm::ExpLog2 => ExtReal::finite(LN_2 * r.exp()),
            ClosedForm::GaussianConc => {
                let sf = gauss::norm_sf(r);
                if sf == 0.0 {
                    // erfc underflowed; use the asymptotic log-tail.
                    let u = 1.0 / (r * r);
                    ExtReal::finite(
                        0.5 * r * r + r.ln() + gauss::LN_2PI_HALF
                            - (1.0 - u + 3.0 * u * u).ln(),
                    )
                } else {
                    ExtReal::finite(-sf.ln())
                }
            }
            ClosedForm::Custom { eval, .. } => eval(r),
        }
    }

    /// `sup { r >= 0 : f(r) <= s }` computed analytically where possible,
    /// otherwise by bracketed bisection on the evaluator.
    fn gen_inverse(&self, s: f64) -> ExtReal {
        if s == f64::INFINITY {
            return ExtReal::PosInf;
        }
        match self {
            ClosedForm::Linear { a, b } => {
                if s < *a {
                    ExtReal::finite(0.0)
                } else if *b == 0.0 {
                    ExtReal::PosInf
                } else {
                    ExtReal::finite((s - a) / b)
                }
            }
            ClosedForm::Power { c, p } => {
                if s < 0.0 {
                    ExtReal::finite(0.0)
                } else if *c == 0.0 {
                    ExtReal::PosInf
                } else {
                    ExtReal::finite((s / c).powf(1.0 / p))
                }
            }
            ClosedForm::PowerShifted { p } => {
                if s < LN_2 {
                    ExtReal::finite(0.0)
                } else {
                    ExtReal::finite(p * (s.powf(1.0 / p) - LN_2.powf(1.0 / p)))
                }
            }
            ClosedForm::ExpLog2 => {
                if s < LN_2 {
                    ExtReal::finite(0.0)
                } else {
                    ExtReal::finite((s / LN_2).ln())
                }
            }
            ClosedForm::GaussianConc => {
                if s < LN_2 {
                    ExtReal::finite(0.0)
                } else {
                    ExtReal::finite(gauss::gaussian_conc_inverse(s))
                }
            }
            ClosedForm::Custom { eval, inverse, .. } => match inverse {
                Some(inv) => inv(s),
                None => bisect_sup(|r| eval(r), s),
            },
        }
    }
}

/// Bracketed bisection for `sup { r >= 0 : f(r) <= s }` on a non-decreasing
/// evaluator: bracket expansion by doubling, then bisection until the
/// bracket is below `max(1e-14, 5e-11 * r)` wide.
pub(crate) fn bisect_sup(f: impl Fn(f64) -> ExtReal, s: f64) -> ExtReal {
    let s = ExtReal::finite(s);
    if f(0.0) > s {
        return ExtReal::finite(0.0);
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while f(hi) <= s {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return ExtReal::PosInf;
        }
    }
    while hi - lo > 1e-14 + 5e-11 * lo {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ExtReal::finite(0.5 * (lo + hi))
}

/// A non-decreasing function `[0, inf) -> R U {+inf}`.
///
/// Immutable after construction; evaluation and inversion are pure.
#[derive(Clone, Debug)]
pub struct MonotoneFn {
    breakpoints: Vec<(f64, ExtReal)>,
    interpolation: Interpolation,
    tail: Tail,
    closed_form: Option<ClosedForm>,
}

impl MonotoneFn {
    pub fn new(
        breakpoints: Vec<(f64, ExtReal)>,
        interpolation: Interpolation,
        tail: Tail,
    ) -> Result<Self, MonotoneError> {
        let mut breakpoints = breakpoints;
        if breakpoints.is_empty() {
            return Err(MonotoneError::EmptyBreakpoints);
        }
        let mut prev_r = -1.0f64;
        for (i, (r, _)) in breakpoints.iter().enumerate() {
            if !r.is_finite() || *r < 0.0 || *r <= prev_r {
                return Err(MonotoneError::BadAbscissa(i));
            }
            prev_r = *r;
        }
        let mut seen_inf = false;
        let mut prev = ExtReal::finite(f64::NEG_INFINITY);
        for i in 0..breakpoints.len() {
            let v = breakpoints[i].1;
            if seen_inf && v.is_finite() {
                return Err(MonotoneError::InfinityNotPersistent(i));
            }
            if v.is_infinite() {
                seen_inf = true;
                prev = v;
                continue;
            }
            let (vf, pf) = (v.to_f64(), prev.to_f64());
            if vf < pf {
                let drop = pf - vf;
                if drop <= CLAMP_TOL * pf.abs().max(1.0) {
                    breakpoints[i].1 = prev; // quadrature noise: clamp
                } else {
                    return Err(MonotoneError::DecreasingValues { index: i, drop });
                }
            }
            prev = breakpoints[i].1;
        }
        let last = *breakpoints.last().unwrap();
        let mut tail = tail;
        if last.1.is_infinite() {
            tail = Tail::Infinite;
        }
        match &tail {
            Tail::Linear { slope } => {
                if !slope.is_finite() || *slope < 0.0 {
                    return Err(MonotoneError::InvalidTail(format!(
                        "linear slope must be a nonnegative finite number, got {slope}"
                    )));
                }
            }
            Tail::Power { c, p } => {
                if !(c.is_finite() && p.is_finite() && *c >= 0.0 && *p > 0.0) {
                    return Err(MonotoneError::InvalidTail(format!(
                        "power tail requires c >= 0 and p > 0, got c={c}, p={p}"
                    )));
                }
                if let Some(vf) = last.1.to_finite() {
                    if c * last.0.powf(*p) < vf - CLAMP_TOL * vf.abs().max(1.0) {
                        return Err(MonotoneError::InvalidTail(format!(
                            "power tail starts below the last breakpoint value ({} < {})",
                            c * last.0.powf(*p),
                            vf
                        )));
                    }
                }
            }
            Tail::QuadraticPlus { delta, kappa } => {
                if !(delta.is_finite() && kappa.is_finite() && *delta >= 0.0 && *kappa >= 0.0) {
                    return Err(MonotoneError::InvalidTail(format!(
                        "quadratic tail requires delta, kappa >= 0, got delta={delta}, kappa={kappa}"
                    )));
                }
                if let Some(vf) = last.1.to_finite() {
                    if delta * kappa * last.0 * last.0 < vf - CLAMP_TOL * vf.abs().max(1.0) {
                        return Err(MonotoneError::InvalidTail(format!(
                            "quadratic tail starts below the last breakpoint value ({} < {})",
                            delta * kappa * last.0 * last.0,
                            vf
                        )));
                    }
                }
            }
            Tail::Constant | Tail::Infinite => {}
        }
        Ok(MonotoneFn {
            breakpoints,
            interpolation,
            tail,
            closed_form: None,
        })
    }

    /// Attaches a closed-form override after checking it agrees with the
    /// breakpoint table to 1e-12 relative at every finite breakpoint.
    pub fn with_closed_form(mut self, cf: ClosedForm) -> Result<Self, MonotoneError> {
        for &(r, v) in &self.breakpoints {
            let got = cf.eval(r);
            match (v, got) {
                (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                    if (a - b).abs() > 1e-12 * a.abs().max(b.abs()).max(1.0) {
                        return Err(MonotoneError::ClosedFormMismatch { r, table: v, closed: got });
                    }
                }
                (ExtReal::PosInf, ExtReal::PosInf) => {}
                _ => return Err(MonotoneError::ClosedFormMismatch { r, table: v, closed: got }),
            }
        }
        self.closed_form = Some(cf);
        Ok(self)
    }

    /// Tabulates a closed form on `n+1` uniform points of `[0, r_max]` and
    /// attaches it. The placeholder tail is `Constant`, which underestimates
    /// any growing profile and is therefore a sound fallback if the closed
    /// form is ever stripped.
    pub fn from_closed_form(cf: ClosedForm, r_max: f64, n: usize) -> Result<Self, MonotoneError> {
        assert!(r_max > 0.0 && n >= 1);
        let mut bps = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let r = r_max * i as f64 / n as f64;
            bps.push((r, cf.eval(r)));
        }
        MonotoneFn::new(bps, Interpolation::Linear, Tail::Constant)?.with_closed_form(cf)
    }

    /// The identity map on `[0, inf)`.
    pub fn identity() -> Self {
        MonotoneFn::new(
            vec![(0.0, ExtReal::finite(0.0)), (10.0, ExtReal::finite(10.0))],
            Interpolation::Linear,
            Tail::Linear { slope: 1.0 },
        )
        .unwrap()
    }

    /// The constant function `v`.
    pub fn constant(v: f64) -> Self {
        MonotoneFn::new(
            vec![(0.0, ExtReal::finite(v))],
            Interpolation::Linear,
            Tail::Constant,
        )
        .unwrap()
    }

    pub fn breakpoints(&self) -> &[(f64, ExtReal)] {
        &self.breakpoints
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.closed_form.as_ref()
    }

    fn tail_value(&self, r: f64) -> ExtReal {
        let (rn, vn) = *self.breakpoints.last().unwrap();
        match &self.tail {
            Tail::Constant => vn,
            Tail::Linear { slope } => vn.add(ExtReal::finite(slope * (r - rn))),
            Tail::Power { c, p } => ExtReal::finite(c * r.powf(*p)).max(vn),
            Tail::QuadraticPlus { delta, kappa } => {
                ExtReal::finite(delta * kappa * r * r).max(vn)
            }
            Tail::Infinite => ExtReal::PosInf,
        }
    }

    /// Evaluates the right-continuous envelope at `r >= 0`.
    pub fn eval(&self, r: f64) -> ExtReal {
        assert!(r >= 0.0 && !r.is_nan(), "MonotoneFn is defined on r >= 0");
        if let Some(cf) = &self.closed_form {
            return cf.eval(r);
        }
        let bps = &self.breakpoints;
        let n = bps.len();
        let idx = bps.partition_point(|&(ri, _)| ri <= r);
        if idx == 0 {
            // left of the first breakpoint: constant extension
            return bps[0].1;
        }
        let i = idx - 1;
        if i == n - 1 {
            if r == bps[i].0 {
                // junction: upper value so the envelope stays right-continuous
                return bps[i].1.max(self.tail_value(r));
            }
            return self.tail_value(r);
        }
        let (r0, v0) = bps[i];
        let (r1, v1) = bps[i + 1];
        match self.interpolation {
            Interpolation::StepRight => v0,
            Interpolation::Linear => match (v0, v1) {
                (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                    ExtReal::finite(a + (r - r0) / (r1 - r0) * (b - a))
                }
                // value jumps to +inf at r1; stay flat until then
                (ExtReal::Finite(_), ExtReal::PosInf) => v0,
                (ExtReal::PosInf, _) => ExtReal::PosInf,
            },
        }
    }

    /// `eval` collapsed to `f64` (`+inf` becomes `f64::INFINITY`).
    pub fn eval_f64(&self, r: f64) -> f64 {
        self.eval(r).to_f64()
    }

    /// Generalized inverse `sup { r >= 0 : f(r) <= s }`, with `sup {} = 0`.
    ///
    /// Flat segments at level `s` resolve to their right endpoint (that is
    /// the sup). Piecewise-linear pieces are solved exactly; analytic tails
    /// and closed forms invert analytically or by bisection.
    pub fn gen_inverse(&self, s: f64) -> ExtReal {
        assert!(!s.is_nan());
        if s == f64::INFINITY {
            return ExtReal::PosInf;
        }
        if let Some(cf) = &self.closed_form {
            return cf.gen_inverse(s);
        }
        let se = ExtReal::finite(s);
        if self.eval(0.0) > se {
            return ExtReal::finite(0.0); // sup of the empty set
        }
        let bps = &self.breakpoints;
        let n = bps.len();
        // Last breakpoint with value <= s (values are non-decreasing).
        let idx = bps.partition_point(|&(_, v)| v <= se);
        if idx == n {
            // The whole table sits at or below s: the crossing, if any, is in
            // the tail region.
            let (rn, vn) = bps[n - 1];
            return match &self.tail {
                Tail::Constant => ExtReal::PosInf,
                Tail::Linear { slope } => {
                    if *slope == 0.0 {
                        ExtReal::PosInf
                    } else {
                        ExtReal::finite(rn + (s - vn.to_f64()) / slope)
                    }
                }
                Tail::Power { c, p } => {
                    if *c == 0.0 {
                        ExtReal::PosInf
                    } else {
                        let root = (s / c).powf(1.0 / p);
                        ExtReal::finite(root.max(rn))
                    }
                }
                Tail::QuadraticPlus { delta, kappa } => {
                    let c = delta * kappa;
                    if c == 0.0 {
                        ExtReal::PosInf
                    } else {
                        ExtReal::finite((s / c).sqrt().max(rn))
                    }
                }
                Tail::Infinite => ExtReal::finite(rn),
            };
        }
        if idx == 0 {
            // f(0) <= s (checked above) yet no breakpoint value <= s: the
            // first breakpoint sits right of 0 with the constant extension
            // below it. Cannot happen: the extension equals bps[0].1.
            return ExtReal::finite(0.0);
        }
        // Crossing between breakpoint idx-1 (value <= s) and idx (value > s).
        let (r0, v0) = bps[idx - 1];
        let (r1, v1) = bps[idx];
        match self.interpolation {
            Interpolation::StepRight => ExtReal::finite(r1),
            Interpolation::Linear => match (v0, v1) {
                (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                    // exact solve of the linear piece; a == s lands on r0,
                    // which is the right endpoint of any flat at level s
                    // because idx-1 is the *last* index with value <= s
                    ExtReal::finite(r0 + (s - a) / (b - a) * (r1 - r0))
                }
                (ExtReal::Finite(_), ExtReal::PosInf) => ExtReal::finite(r1),
                (ExtReal::PosInf, _) => unreachable!("v0 <= s is finite"),
            },
        }
    }

    /// `gen_inverse` collapsed to `f64`.
    pub fn gen_inverse_f64(&self, s: f64) -> f64 {
        self.gen_inverse(s).to_f64()
    }
}

/// Parses `head:key=val,key=val` mini-specs (also used by the CLI).
pub(crate) fn parse_kv_spec(spec: &str) -> (String, Vec<(String, f64)>) {
    match spec.split_once(':') {
        None => (spec.to_string(), Vec::new()),
        Some((head, rest)) => {
            let mut args = Vec::new();
            for part in rest.split(',') {
                if let Some((k, v)) = part.split_once('=') {
                    if let Ok(x) = v.trim().parse::<f64>() {
                        args.push((k.trim().to_string(), x));
                    }
                }
            }
            (head.to_string(), args)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MonotoneFnRepr {
    breakpoints: Vec<(f64, ExtReal)>,
    #[serde(default)]
    interpolation: Interpolation,
    tail: Tail,
    closed_form: Option<String>,
}

impl Serialize for MonotoneFn {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MonotoneFnRepr {
            breakpoints: self.breakpoints.clone(),
            interpolation: self.interpolation,
            tail: self.tail.clone(),
            closed_form: self.closed_form.as_ref().map(|cf| cf.name()),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MonotoneFn {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = MonotoneFnRepr::deserialize(deserializer)?;
        let f = MonotoneFn::new(repr.breakpoints, repr.interpolation, repr.tail)
            .map_err(serde::de::Error::custom)?;
        match repr.closed_form {
            None => Ok(f),
            Some(name) => {
                let cf = ClosedForm::from_name(&name).map_err(serde::de::Error::custom)?;
                f.with_closed_form(cf).map_err(serde::de::Error::custom)
            }
        }
    }
}
