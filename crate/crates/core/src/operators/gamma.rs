//! Γ, ln Γ, Γ-ratios and the generalized Pochhammer symbol for positive
//! real arguments.
//!
//! Lanczos approximation (g = 7, nine terms) for `x ≥ 0.5`, reflection below.
//! Relative error stays under 1e−13 on [0.5, 50].

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Largest argument whose Γ is finite in f64.
const GAMMA_MAX_ARG: f64 = 171.0;

fn lanczos_sum(x: f64) -> f64 {
    LANCZOS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS[0], |acc, (i, c)| acc + c / (x + (i + 1) as f64))
}

pub fn gamma(x: f64) -> f64 {
    if x == x.floor() && (1.0..=GAMMA_MAX_ARG).contains(&x) {
        // exact factorial for small integers, ~n ulp beyond
        return (2..x as u32).fold(1.0, |acc, k| acc * f64::from(k));
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let t = lanczos_sum(x);
    let w = x + LANCZOS_G + 0.5;
    // split the power so large arguments do not overflow before exp(-w)
    let half = w.powf(0.5 * (x + 0.5));
    SQRT_2PI * half * (half * (-w).exp()) * t
}

/// ln Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let w = x + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (x + 0.5) * w.ln() - w + lanczos_sum(x).ln()
}

/// Γ(a)/Γ(b) for positive `a`, `b`.
pub fn gamma_ratio(a: f64, b: f64) -> f64 {
    if a <= GAMMA_MAX_ARG && b <= GAMMA_MAX_ARG {
        gamma(a) / gamma(b)
    } else {
        (ln_gamma(a) - ln_gamma(b)).exp()
    }
}

/// (x)_y = Γ(x + y)/Γ(x), also for non-integer `y`.
pub fn pochhammer(x: f64, y: f64) -> f64 {
    gamma_ratio(x + y, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    // reference values computed with mpmath at 30 digits
    const REFERENCE: [(f64, f64); 11] = [
        (0.5, 1.772_453_850_905_516_027_298_167),
        (1.0, 1.0),
        (1.5, 0.886_226_925_452_758_013_649_083_7),
        (2.0, 1.0),
        (2.5, 1.329_340_388_179_137_020_473_626),
        (3.5, 3.323_350_970_447_842_551_184_064),
        (7.25, 1_155.381_013_919_989_687_202_704),
        (10.0, 362_880.0),
        (17.3, 48_647_628_546_156.867_817_818_18),
        (33.3333, 8.410_616_548_824_835_738_486_575e35),
        (50.0, 6.082_818_640_342_675_608_722_522e62),
    ];

    #[test]
    fn matches_high_precision_reference() {
        for (x, g) in REFERENCE {
            assert!(rel(gamma(x), g) <= 1e-12, "gamma({x}) = {} vs {g}", gamma(x));
            assert!((ln_gamma(x) - g.ln()).abs() <= 1e-12 * g.ln().abs().max(1.0));
        }
        assert_eq!(gamma(1.0), 1.0);
        assert_eq!(gamma(2.0), 1.0);
    }

    #[test]
    fn agrees_with_statrs_on_band() {
        let mut x = 0.5;
        while x <= 50.0 {
            let expected = statrs::function::gamma::gamma(x);
            assert!(rel(gamma(x), expected) <= 1e-12, "x = {x}");
            x += 0.0731;
        }
    }

    #[test]
    fn reflection_below_half() {
        // Γ(0.25) from mpmath
        assert!(rel(gamma(0.25), 3.625_609_908_221_908_311_930_685) <= 1e-12);
        assert!(rel(gamma(0.1), 9.513_507_698_668_731_836_292_487) <= 1e-12);
    }

    #[test]
    fn ratio_and_pochhammer() {
        assert!(rel(gamma_ratio(3.0, 2.5), 1.504_505_556_127_350_098_5) <= 1e-13);
        assert!(rel(pochhammer(1.0, 3.0), 6.0) <= 1e-15);
        // large arguments go through ln Γ
        let r = gamma_ratio(300.5, 300.0);
        let expected = (statrs::function::gamma::ln_gamma(300.5)
            - statrs::function::gamma::ln_gamma(300.0))
        .exp();
        assert!(rel(r, expected) <= 1e-10);
        // recurrence Γ(x+1) = xΓ(x)
        for x in [0.7, 3.3, 12.9, 40.1] {
            assert!(rel(gamma(x + 1.0), x * gamma(x)) <= 1e-13);
        }
    }
}
