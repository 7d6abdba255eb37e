//! Concentration profile specifications, the gamma transform, and
//! isoperimetric lower-bound profiles.

use std::f64::consts::LN_2;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::extreal::ExtReal;
use crate::monotone::{MonotoneFn, Tail};

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("kappa must be a nonnegative finite number, got {0}")]
    BadKappa(f64),
    #[error("kappa > 0 requires delta0 and r0 to be set")]
    MissingGrowthParams,
    #[error("growth condition violated: delta0 = {delta0} but the quadratic compensation of negative curvature requires delta0 > 1/2")]
    Delta0TooSmall { delta0: f64 },
    #[error("growth condition violated: alpha(r) = {alpha_r} < delta0*kappa*r^2 = {needed} at r = {r}")]
    GrowthViolatedAt { r: f64, alpha_r: f64, needed: f64 },
    #[error("growth condition cannot hold: the tail of alpha grows slower than r^2 ({0})")]
    SubQuadraticTail(String),
    #[error("r0 must be a nonnegative finite number, got {0}")]
    BadR0(f64),
}

/// A concentration lower bound `K(r) >= alpha(r)` together with the
/// curvature parameter `kappa` and, when `kappa > 0`, the quadratic growth
/// certificate `(delta0, r0)`: `alpha(r) >= delta0 * kappa * r^2` for all
/// `r >= r0` with `delta0 > 1/2`.
#[derive(Clone, Debug)]
pub struct ConcProfileSpec {
    pub alpha: MonotoneFn,
    pub kappa: f64,
    pub delta0: Option<f64>,
    pub r0: Option<f64>,
}

impl ConcProfileSpec {
    /// A convexity-setting (`kappa = 0`) profile.
    pub fn convex(alpha: MonotoneFn) -> Self {
        ConcProfileSpec { alpha, kappa: 0.0, delta0: None, r0: None }
    }

    /// A semi-convex profile carrying its growth certificate.
    pub fn semi_convex(alpha: MonotoneFn, kappa: f64, delta0: f64, r0: f64) -> Self {
        ConcProfileSpec { alpha, kappa, delta0: Some(delta0), r0: Some(r0) }
    }

    /// Validates the growth condition. For `kappa == 0` there is nothing to
    /// check. For `kappa > 0` the certificate must be present, `delta0` must
    /// exceed 1/2, and `alpha(r) >= delta0 * kappa * r^2` is verified on a
    /// dense grid of `[r0, R]` plus an analysis of the analytic tail.
    pub fn validate_growth(&self) -> Result<(), ProfileError> {
        if !self.kappa.is_finite() || self.kappa < 0.0 {
            return Err(ProfileError::BadKappa(self.kappa));
        }
        if self.kappa == 0.0 {
            return Ok(());
        }
        let delta0 = self.delta0.ok_or(ProfileError::MissingGrowthParams)?;
        let r0 = self.r0.ok_or(ProfileError::MissingGrowthParams)?;
        if !r0.is_finite() || r0 < 0.0 {
            return Err(ProfileError::BadR0(r0));
        }
        if delta0 <= 0.5 {
            return Err(ProfileError::Delta0TooSmall { delta0 });
        }
        let floor = delta0 * self.kappa;
        let last_r = self.alpha.breakpoints().last().unwrap().0;
        // Where could c_tail * r^p fall below floor * r^2? Determine how far
        // the sampled check must reach; beyond that the tail analysis rules.
        let tail_ok_from = match self.alpha.tail() {
            Tail::Infinite => Some(last_r),
            Tail::QuadraticPlus { delta, kappa } => {
                if delta * kappa >= floor * (1.0 - 1e-12) {
                    Some(last_r)
                } else {
                    return Err(ProfileError::SubQuadraticTail(format!(
                        "quadratic tail coefficient {} < required {}",
                        delta * kappa,
                        floor
                    )));
                }
            }
            Tail::Power { c, p } => {
                if *p > 2.0 && *c > 0.0 {
                    // c r^p >= floor r^2 once r >= (floor/c)^{1/(p-2)}
                    Some(last_r.max((floor / c).powf(1.0 / (p - 2.0))))
                } else if *p == 2.0 && *c >= floor * (1.0 - 1e-12) {
                    Some(last_r)
                } else {
                    return Err(ProfileError::SubQuadraticTail(format!(
                        "power tail c={c}, p={p} cannot dominate {floor} r^2"
                    )));
                }
            }
            Tail::Constant | Tail::Linear { .. } => {
                if self.alpha.closed_form().is_some() {
                    // closed form overrides the tail; fall through to a far
                    // sampled check
                    None
                } else {
                    return Err(ProfileError::SubQuadraticTail(
                        "constant or linear tail grows slower than r^2".into(),
                    ));
                }
            }
        };
        let r_hi = match tail_ok_from {
            Some(r) => r.max(r0) + 1.0,
            None => (last_r.max(r0) + 10.0) * 10.0,
        };
        let n = 2048;
        for i in 0..=n {
            let r = r0 + (r_hi - r0) * i as f64 / n as f64;
            let needed = floor * r * r;
            match self.alpha.eval(r) {
                ExtReal::PosInf => {}
                ExtReal::Finite(a) => {
                    if a < needed - 1e-9 * needed.max(1.0) {
                        return Err(ProfileError::GrowthViolatedAt { r, alpha_r: a, needed });
                    }
                }
            }
        }
        Ok(())
    }

    /// `R_alpha = alpha^{-1}(log 2)`: below this distance the concentration
    /// hypothesis carries no information.
    pub fn r_alpha(&self) -> ExtReal {
        self.alpha.gen_inverse(LN_2)
    }

    /// True when `alpha` never exceeds `log 2`, so the profile carries no
    /// concentration information at all.
    pub fn is_trivially_concentrated(&self) -> bool {
        self.r_alpha().is_infinite()
    }

    /// The gamma transform `gamma(x) = x / alpha^{-1}(x)` for `x > 0`, with
    /// `x / inf = 0` and `x / 0 = +inf`.
    pub fn gamma(&self, x: f64) -> ExtReal {
        assert!(x > 0.0, "gamma is defined for x > 0");
        match self.alpha.gen_inverse(x) {
            ExtReal::PosInf => ExtReal::finite(0.0),
            ExtReal::Finite(r) => {
                if r == 0.0 {
                    ExtReal::PosInf
                } else {
                    ExtReal::finite(x / r)
                }
            }
        }
    }
}

/// Which formula produced an isoperimetric profile.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    /// Transfer bound from a fixed lambda or the sup over a lambda grid.
    ConcTransferWeak,
    /// Transfer bound relying on profile concavity.
    ConcTransferStrong,
    /// Three-term semi-convex transfer bound.
    SemiConvexTransfer,
    /// Integrability (ball-tail) transfer bound.
    BallTailTransfer,
    /// Exact half-line profile of a log-concave 1D measure.
    HalfLineExact { family: String },
    /// Table of sampled values.
    Sampled { label: String },
}

impl Provenance {
    /// Whether this provenance asserts the convexity setting, in which case
    /// `profile(v)/v` must be non-increasing.
    pub fn asserts_ratio_monotone(&self) -> bool {
        matches!(self, Provenance::HalfLineExact { .. })
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::ConcTransferWeak => write!(f, "conc-transfer-weak"),
            Provenance::ConcTransferStrong => write!(f, "conc-transfer-strong"),
            Provenance::SemiConvexTransfer => write!(f, "semi-convex-transfer"),
            Provenance::BallTailTransfer => write!(f, "ball-tail-transfer"),
            Provenance::HalfLineExact { family } => write!(f, "half-line-exact:{family}"),
            Provenance::Sampled { label } => write!(f, "sampled:{label}"),
        }
    }
}

enum ProfileSource {
    Closed(Arc<dyn Fn(f64) -> ExtReal + Send + Sync>),
    /// Sampled `(v, value)` pairs, linearly interpolated in `v`.
    Table { vs: Vec<f64>, vals: Vec<ExtReal> },
}

/// A pointwise lower bound for the symmetrized isoperimetric profile on
/// `(0, 1/2]`, nonnegative everywhere.
pub struct IsoProfile {
    source: ProfileSource,
    provenance: Provenance,
}

impl IsoProfile {
    pub fn from_fn(
        f: impl Fn(f64) -> ExtReal + Send + Sync + 'static,
        provenance: Provenance,
    ) -> Self {
        IsoProfile { source: ProfileSource::Closed(Arc::new(f)), provenance }
    }

    /// Builds a sampled profile; `vs` must be strictly increasing inside
    /// `(0, 1/2]`.
    pub fn from_table(vs: Vec<f64>, vals: Vec<ExtReal>, provenance: Provenance) -> Self {
        assert_eq!(vs.len(), vals.len());
        assert!(!vs.is_empty());
        assert!(vs.windows(2).all(|w| w[0] < w[1]));
        assert!(vs[0] > 0.0 && *vs.last().unwrap() <= 0.5);
        IsoProfile { source: ProfileSource::Table { vs, vals }, provenance }
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Evaluates the lower bound at `v` in `(0, 1/2]`.
    pub fn eval(&self, v: f64) -> ExtReal {
        assert!(v > 0.0 && v <= 0.5, "IsoProfile domain is (0, 1/2], got {v}");
        match &self.source {
            ProfileSource::Closed(f) => f(v),
            ProfileSource::Table { vs, vals } => {
                let idx = vs.partition_point(|&x| x <= v);
                if idx == 0 {
                    return vals[0];
                }
                if idx == vs.len() {
                    return *vals.last().unwrap();
                }
                let (v0, v1) = (vs[idx - 1], vs[idx]);
                match (vals[idx - 1], vals[idx]) {
                    (ExtReal::Finite(a), ExtReal::Finite(b)) => {
                        ExtReal::finite(a + (v - v0) / (v1 - v0) * (b - a))
                    }
                    _ => ExtReal::PosInf,
                }
            }
        }
    }

    pub fn eval_f64(&self, v: f64) -> f64 {
        self.eval(v).to_f64()
    }

    /// Checks `v -> eval(v)/v` is non-increasing across the grid, within
    /// `tol` absolutely between adjacent points. Returns the first violating
    /// pair, if any.
    pub fn ratio_monotone_violation(&self, grid: &[f64], tol: f64) -> Option<(f64, f64)> {
        let mut prev: Option<(f64, f64)> = None;
        for &v in grid {
            let val = self.eval(v);
            let ratio = match val {
                ExtReal::PosInf => return None, // infinite values void the check
                ExtReal::Finite(x) => x / v,
            };
            if let Some((pv, pr)) = prev {
                if ratio > pr + tol {
                    return Some((pv, v));
                }
            }
            prev = Some((v, ratio));
        }
        None
    }
}

impl fmt::Debug for IsoProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IsoProfile[{}]", self.provenance)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monotone::{ClosedForm, Interpolation};

    #[test]
    fn gamma_identity() {
        let spec = ConcProfileSpec::convex(MonotoneFn::identity());
        assert_eq!(spec.gamma(4.0), ExtReal::finite(1.0));
    }

    #[test]
    fn gamma_square() {
        let alpha =
            MonotoneFn::from_closed_form(ClosedForm::Power { c: 1.0, p: 2.0 }, 5.0, 64).unwrap();
        let spec = ConcProfileSpec::convex(alpha);
        // gen_inverse(r^2, 9) = 3 by the analytic inverse
        let g = spec.gamma(9.0).to_finite().unwrap();
        assert!((g - 3.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_shifted_power_p1_blows_up_at_log2() {
        // alpha(r) = r + log 2: inverse at log 2 is 0, so gamma = +inf
        let alpha =
            MonotoneFn::from_closed_form(ClosedForm::PowerShifted { p: 1.0 }, 5.0, 64).unwrap();
        let spec = ConcProfileSpec::convex(alpha);
        assert_eq!(spec.gamma(LN_2), ExtReal::PosInf);
    }

    #[test]
    fn gamma_of_trivial_profile_vanishes() {
        let spec = ConcProfileSpec::convex(MonotoneFn::constant(LN_2));
        assert!(spec.is_trivially_concentrated());
        assert_eq!(spec.gamma(1.0), ExtReal::finite(0.0));
    }

    #[test]
    fn growth_validation() {
        // alpha(r) = 0.8 * r^2 with kappa = 1: needs delta0 <= 0.8
        let alpha =
            MonotoneFn::from_closed_form(ClosedForm::Power { c: 0.8, p: 2.0 }, 5.0, 64).unwrap();
        let ok = ConcProfileSpec::semi_convex(alpha.clone(), 1.0, 0.7, 0.0);
        ok.validate_growth().unwrap();

        // tail is a Constant placeholder behind the closed form, so the
        // violation surfaces from the far sampled check
        let too_big = ConcProfileSpec::semi_convex(alpha.clone(), 1.0, 0.9, 0.0);
        assert!(matches!(
            too_big.validate_growth(),
            Err(ProfileError::GrowthViolatedAt { .. })
        ));

        let delta_small = ConcProfileSpec::semi_convex(alpha, 1.0, 0.4, 0.0);
        assert!(matches!(
            delta_small.validate_growth(),
            Err(ProfileError::Delta0TooSmall { .. })
        ));
    }

    #[test]
    fn growth_validation_catches_pointwise_dip() {
        // Piecewise alpha that is quadratic in the tail but dips below the
        // floor on an interior interval.
        let bps = vec![
            (0.0, ExtReal::finite(0.0)),
            (1.0, ExtReal::finite(0.1)), // dips: needs 0.6 at r=1
            (2.0, ExtReal::finite(2.4)),
        ];
        let alpha = MonotoneFn::new(
            bps,
            Interpolation::Linear,
            Tail::QuadraticPlus { delta: 0.6, kappa: 1.0 },
        )
        .unwrap();
        let spec = ConcProfileSpec::semi_convex(alpha, 1.0, 0.6, 0.0);
        assert!(matches!(
            spec.validate_growth(),
            Err(ProfileError::GrowthViolatedAt { .. })
        ));
    }

    #[test]
    fn iso_profile_table_interpolation() {
        let p = IsoProfile::from_table(
            vec![0.1, 0.2, 0.5],
            vec![ExtReal::finite(1.0), ExtReal::finite(2.0), ExtReal::finite(2.0)],
            Provenance::Sampled { label: "test".into() },
        );
        assert_eq!(p.eval(0.15), ExtReal::finite(1.5));
        assert_eq!(p.eval(0.05), ExtReal::finite(1.0)); // clamped left
    }

    #[test]
    fn ratio_monotonicity_check() {
        let good = IsoProfile::from_fn(
            |v| ExtReal::finite(v * (1.0 / v).ln().sqrt()),
            Provenance::HalfLineExact { family: "test".into() },
        );
        let grid: Vec<f64> = (1..100).map(|i| i as f64 / 200.0).collect();
        assert!(good.ratio_monotone_violation(&grid, 1e-12).is_none());

        let bad = IsoProfile::from_fn(
            |v| ExtReal::finite(v * v),
            Provenance::Sampled { label: "quadratic".into() },
        );
        assert!(bad.ratio_monotone_violation(&grid, 1e-12).is_some());
    }
}
