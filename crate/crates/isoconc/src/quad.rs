//! Adaptive Simpson quadrature.

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` using adaptive
/// Simpson with Richardson extrapolation.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, tol, 52)
}

/// Integrates to a *relative* tolerance: a first absolute pass sets the
/// scale, then the integral is recomputed against `rel * scale`.
pub fn integrate_rel(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel: f64, abs_floor: f64) -> f64 {
    let rough = integrate(f, a, b, abs_floor.max(1e-12));
    let scale = rough.abs().max(abs_floor);
    integrate(f, a, b, rel * scale)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_near_exact() {
        let got = integrate(&|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 1e-12);
        // antiderivative x^4/4 - x^2 + x at 2: 4 - 4 + 2 = 2
        assert!((got - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_mass() {
        let f = |x: f64| (-0.5 * x * x).exp();
        let got = integrate(&f, -10.0, 10.0, 1e-12);
        let want = (2.0 * std::f64::consts::PI).sqrt();
        assert!((got - want).abs() < 1e-11, "got {got}, want {want}");
    }

    #[test]
    fn relative_tolerance_on_tiny_integrals() {
        // integral of exp(-x) over [30, 40] ~ 9.35e-14: still accurate
        let f = |x: f64| (-x).exp();
        let got = integrate_rel(&f, 30.0, 40.0, 1e-10, 1e-300);
        let want = (-30.0f64).exp() - (-40.0f64).exp();
        assert!(
            ((got - want) / want).abs() < 1e-9,
            "got {got:e}, want {want:e}"
        );
    }
}
