//! Standard normal density, distribution, and tail inverses.
//!
//! All tail quantities go through `erfc` so they keep full relative accuracy
//! far into the tails, where the naive `1 - cdf` form loses everything.
//! `erfc` itself is Cody's rational Chebyshev approximation (the classic
//! CALERF scheme, good to a few ulp over the whole range); library erf
//! implementations with ~1e-11 absolute error are not accurate enough for
//! the profile comparisons this crate makes.

use statrs::distribution::{ContinuousCDF, Normal};

pub const SQRT_2: f64 = std::f64::consts::SQRT_2;
pub const LN_2PI_HALF: f64 = 0.918_938_533_204_672_74; // ln(2*pi)/2
const ONE_OVER_SQRT_PI: f64 = 0.564_189_583_547_756_28;

// Cody's coefficients for erf on |x| <= 0.46875.
const ERF_A: [f64; 5] = [
    3.161_123_743_870_565_6e0,
    1.138_641_541_510_501_56e2,
    3.774_852_376_853_020_2e2,
    3.209_377_589_138_469_47e3,
    1.857_777_061_846_031_53e-1,
];
const ERF_B: [f64; 4] = [
    2.360_129_095_234_412_09e1,
    2.440_246_379_344_441_73e2,
    1.282_616_526_077_372_28e3,
    2.844_236_833_439_170_62e3,
];

// Cody's coefficients for erfc on 0.46875 <= x <= 4.
const ERFC_C: [f64; 9] = [
    5.641_884_969_886_700_89e-1,
    8.883_149_794_388_375_94e0,
    6.611_919_063_714_162_95e1,
    2.986_351_381_974_001_31e2,
    8.819_522_212_417_690_9e2,
    1.712_047_612_634_070_58e3,
    2.051_078_377_826_071_47e3,
    1.230_339_354_797_997_25e3,
    2.153_115_354_744_038_46e-8,
];
const ERFC_D: [f64; 8] = [
    1.574_492_611_070_983_47e1,
    1.176_939_508_913_124_99e2,
    5.371_811_018_620_098_58e2,
    1.621_389_574_566_690_19e3,
    3.290_799_235_733_459_63e3,
    4.362_619_090_143_247_16e3,
    3.439_367_674_143_721_64e3,
    1.230_339_354_803_749_42e3,
];

// Cody's coefficients for erfc on x > 4 (asymptotic region).
const ERFC_P: [f64; 6] = [
    3.053_266_349_612_323_44e-1,
    3.603_448_999_498_044_39e-1,
    1.257_817_261_112_292_46e-1,
    1.608_378_514_874_227_66e-2,
    6.587_491_615_298_378_03e-4,
    1.631_538_713_730_209_78e-2,
];
const ERFC_Q: [f64; 5] = [
    2.568_520_192_289_822_42e0,
    1.872_952_849_923_460_47e0,
    5.279_051_029_514_284_12e-1,
    6.051_834_131_244_131_91e-2,
    2.335_204_976_268_691_85e-3,
];

fn erf_small(x: f64) -> f64 {
    let z = x * x;
    let mut xnum = ERF_A[4] * z;
    let mut xden = z;
    for i in 0..3 {
        xnum = (xnum + ERF_A[i]) * z;
        xden = (xden + ERF_B[i]) * z;
    }
    x * (xnum + ERF_A[3]) / (xden + ERF_B[3])
}

/// `exp(-y^2) * r`, split so the large-argument exponential keeps precision.
fn scaled_exp(y: f64, r: f64) -> f64 {
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    (-ysq * ysq).exp() * (-del).exp() * r
}

fn erfc_positive(y: f64) -> f64 {
    debug_assert!(y >= 0.46875);
    if y <= 4.0 {
        let mut xnum = ERFC_C[8] * y;
        let mut xden = y;
        for i in 0..7 {
            xnum = (xnum + ERFC_C[i]) * y;
            xden = (xden + ERFC_D[i]) * y;
        }
        scaled_exp(y, (xnum + ERFC_C[7]) / (xden + ERFC_D[7]))
    } else if y < 26.6 {
        let z = 1.0 / (y * y);
        let mut xnum = ERFC_P[5] * z;
        let mut xden = z;
        for i in 0..4 {
            xnum = (xnum + ERFC_P[i]) * z;
            xden = (xden + ERFC_Q[i]) * z;
        }
        let r = z * (xnum + ERFC_P[4]) / (xden + ERFC_Q[4]);
        scaled_exp(y, (ONE_OVER_SQRT_PI - r) / y)
    } else {
        0.0 // underflows f64
    }
}

/// Complementary error function, a few ulp of relative accuracy throughout.
pub fn erfc(x: f64) -> f64 {
    if x < -6.0 {
        2.0
    } else if x < 0.46875 {
        if x > -0.46875 {
            1.0 - erf_small(x)
        } else {
            2.0 - erfc_positive(-x)
        }
    } else {
        erfc_positive(x)
    }
}

/// Error function.
pub fn erf(x: f64) -> f64 {
    if x.abs() <= 0.46875 {
        erf_small(x)
    } else if x > 0.0 {
        1.0 - erfc_positive(x)
    } else {
        erfc_positive(-x) - 1.0
    }
}

/// Standard normal density `phi(x)`.
pub fn phi(x: f64) -> f64 {
    (-0.5 * x * x - LN_2PI_HALF).exp()
}

/// Standard normal CDF `Phi(x)`, accurate in both tails.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Upper tail `1 - Phi(x)` with full relative accuracy.
pub fn norm_sf(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// Quantile `Phi^{-1}(p)`: rational-approximation start, Newton-polished
/// against the erfc-based CDF. Works for p down to ~1e-300.
pub fn norm_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile requires p in (0,1)");
    // Exploit symmetry so the polish always runs on the small tail.
    if p > 0.5 {
        return -norm_quantile(1.0 - p);
    }
    let n = Normal::new(0.0, 1.0).unwrap();
    let mut x = n.inverse_cdf(p);
    if !x.is_finite() {
        x = -(-2.0 * p.ln()).sqrt();
    }
    // Newton on Phi(x) - p = 0; the lower tail is computed via erfc so the
    // residual keeps relative precision.
    for _ in 0..6 {
        let f = norm_cdf(x) - p;
        let d = phi(x);
        if d == 0.0 {
            break;
        }
        let step = f / d;
        x -= step;
        if step.abs() <= 1e-16 * x.abs().max(1.0) {
            break;
        }
    }
    x
}

/// Inverse survival function: `x` with `1 - Phi(x) = q`.
pub fn norm_isf(q: f64) -> f64 {
    -norm_quantile(q)
}

/// Solves `-ln(1 - Phi(r)) = s` for `r >= 0`, i.e. the generalized inverse
/// of the Gaussian log-concentration profile at `s >= ln 2`.
///
/// For `s` beyond ~700 the tail mass `e^{-s}` underflows, so the asymptotic
/// expansion `-ln(1-Phi(r)) = r^2/2 + ln(r sqrt(2 pi)) - ln(1 - r^{-2} + 3 r^{-4} - ...)`
/// is solved instead.
pub fn gaussian_conc_inverse(s: f64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    if s <= ln2 {
        return 0.0;
    }
    if s < 700.0 {
        return norm_isf((-s).exp());
    }
    // Fixed point of r = sqrt(2 (s - ln(r) - ln(2pi)/2 + ln(1 - r^-2 + 3 r^-4)))
    let mut r = (2.0 * s).sqrt();
    for _ in 0..64 {
        let u = 1.0 / (r * r);
        let series = (1.0 - u + 3.0 * u * u).ln();
        let next = (2.0 * (s - r.ln() - LN_2PI_HALF + series)).sqrt();
        if (next - r).abs() <= 1e-12 * r {
            r = next;
            break;
        }
        r = next;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Series oracle for erf on small arguments: erf(x) = 2/sqrt(pi) * sum.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for n in 1..200 {
            term *= -x * x / n as f64;
            let contrib = term / (2 * n + 1) as f64;
            sum += contrib;
            if contrib.abs() < 1e-19 {
                break;
            }
        }
        2.0 / std::f64::consts::PI.sqrt() * sum
    }

    #[test]
    fn erf_matches_series_oracle() {
        // the alternating series cancels catastrophically past x ~ 2, so the
        // oracle comparison stops there; larger x is covered by the frozen
        // reference table below
        for i in 1..=20 {
            let x = 0.1 * i as f64;
            let want = erf_series(x);
            let got = erf(x);
            assert!(
                (got - want).abs() <= 16.0 * f64::EPSILON * want.abs().max(1e-3),
                "x={x}: got {got:.17e}, want {want:.17e}"
            );
        }
    }

    #[test]
    fn erfc_reference_values() {
        // frozen from standard tables
        let cases = [
            (0.5, 4.795_001_221_869_535e-1),
            (1.0, 1.572_992_070_502_851_3e-1),
            (2.0, 4.677_734_981_047_266e-3),
            (5.0, 1.537_459_794_428_035e-12),
            (10.0, 2.088_487_583_762_545e-45),
        ];
        for (x, want) in cases {
            let got = erfc(x);
            assert!(
                ((got - want) / want).abs() < 1e-13,
                "erfc({x}): got {got:.16e}, want {want:.16e}"
            );
        }
    }

    #[test]
    fn cdf_matches_series_oracle() {
        // Phi(1) computed from the Maclaurin series of erf.
        let expect = 0.5 * (1.0 + erf_series(1.0 / SQRT_2));
        assert!((norm_cdf(1.0) - expect).abs() < 1e-15);
        assert!((norm_cdf(1.0) - 0.841344746068543).abs() < 1e-13);
        assert_eq!(norm_cdf(0.0), 0.5);
    }

    #[test]
    fn quantile_round_trip() {
        for &p in &[1e-300, 1e-12, 1e-6, 0.01, 0.3, 0.5, 0.9, 1.0 - 1e-9] {
            let x = norm_quantile(p);
            let q = if p <= 0.5 { norm_cdf(x) } else { norm_sf(x) };
            let target = if p <= 0.5 { p } else { 1.0 - p };
            assert!(
                (q - target).abs() <= 1e-13 * target.max(1e-300),
                "p={p}, x={x}, got={q}"
            );
        }
    }

    #[test]
    fn conc_inverse_round_trip() {
        for &s in &[0.70, 1.0, 5.0, 50.0, 650.0] {
            let r = gaussian_conc_inverse(s);
            let back = -norm_sf(r).ln();
            assert!((back - s).abs() <= 1e-11 * s, "s={s} back={back}");
        }
        // At s = ln 2 the inverse is 0 (the profile starts there).
        assert_eq!(gaussian_conc_inverse(std::f64::consts::LN_2), 0.0);
        // Deep asymptotic branch: self-consistent under the expansion.
        let r = gaussian_conc_inverse(800.0);
        let u = 1.0 / (r * r);
        let approx = 0.5 * r * r + (r).ln() + LN_2PI_HALF - (1.0 - u + 3.0 * u * u).ln();
        assert!((approx - 800.0).abs() < 1e-6 * 800.0);
    }
}
