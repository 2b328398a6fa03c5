//! The multiplier operator `D^β_μ`, its Θ kernels, and the fractional
//! derivative/integral acting termwise on the monomial basis.

pub mod gamma;

use crate::fps::{FractionalSeries, GeneralSeries, Term};
use crate::{Error, Mu, Result};

pub use gamma::{gamma, gamma_ratio, ln_gamma, pochhammer};

/// Θ_{μ,k}(z) = z + Σ (μn)^k z^{μn}.
pub fn theta_series(mu: Mu, k: u32, truncation: u32) -> Result<FractionalSeries> {
    let base = FractionalSeries::all_ones(mu, truncation)?;
    Ok(apply_d(&base, k))
}

/// D^β_μ F = z + Σ (μn)^β aₙ z^{μn}; the same as `theta_series(μ, β) ∗ F`.
pub fn apply_d(f: &FractionalSeries, beta: u32) -> FractionalSeries {
    if beta == 0 {
        return f.clone();
    }
    let mu = f.mu();
    let exp = beta as i32;
    f.map_coeffs(|n, a| a * mu.times(n).powi(exp))
        .expect("scaling nonnegative coefficients by positive factors stays valid")
}

fn check_delta_derivative(delta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Domain(format!(
            "fractional derivative order {delta} must lie in [0, 1)"
        )));
    }
    Ok(())
}

/// D_z^δ z^e = Γ(e+1)/Γ(e+1−δ) z^{e−δ}, applied termwise.
pub fn frac_derivative(s: &GeneralSeries, delta: f64) -> Result<GeneralSeries> {
    check_delta_derivative(delta)?;
    if delta == 0.0 {
        return Ok(s.clone());
    }
    if let Some(t) = s.terms().iter().find(|t| t.exponent + 1.0 - delta <= 0.0) {
        return Err(Error::Domain(format!(
            "Gamma argument {} is nonpositive for exponent {}",
            t.exponent + 1.0 - delta,
            t.exponent
        )));
    }
    s.map_terms(|t| Term {
        exponent: t.exponent - delta,
        coefficient: t.coefficient * gamma_ratio(t.exponent + 1.0, t.exponent + 1.0 - delta),
    })
}

/// I_z^δ z^e = Γ(e+1)/Γ(e+1+δ) z^{e+δ}, applied termwise.
pub fn frac_integral(s: &GeneralSeries, delta: f64) -> Result<GeneralSeries> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!(
            "fractional integral order {delta} must be positive"
        )));
    }
    if let Some(t) = s.terms().iter().find(|t| t.exponent < 0.0) {
        return Err(Error::Domain(format!(
            "fractional integral needs nonnegative exponents, got {}",
            t.exponent
        )));
    }
    let out = s.map_terms(|t| Term {
        exponent: t.exponent + delta,
        coefficient: t.coefficient * gamma_ratio(t.exponent + 1.0, t.exponent + 1.0 + delta),
    })?;
    Ok(out)
}

/// D_z^{υ+δ} = (d/dz)^υ D_z^δ.
///
/// Fails if a differentiation step would leave a term with a negative
/// exponent; constants simply vanish.
pub fn frac_derivative_higher(
    s: &GeneralSeries,
    delta: f64,
    upsilon: u32,
) -> Result<GeneralSeries> {
    let mut out = frac_derivative(s, delta)?;
    for step in 1..=upsilon {
        out = out.differentiate();
        if let Some(t) = out.terms().iter().find(|t| t.exponent < 0.0) {
            return Err(Error::Domain(format!(
                "derivative {step} of order {delta} produces z^{}",
                t.exponent
            )));
        }
    }
    Ok(out)
}

/// Υ(n) = Γ(μn+1)Γ(2+δ)/Γ(μn+1+δ), the factor `I^δ` puts on aₙ after
/// normalising the leading term.
pub fn integral_ratio(mu: Mu, n: u32, delta: f64) -> f64 {
    let x = mu.times(n) + 1.0;
    gamma_ratio(x, x + delta) * gamma(2.0 + delta)
}

/// Ω(n) = Γ(μn)Γ(2−δ)/Γ(μn+1−δ); `D^δ` puts Ω(n)·μn on aₙ after normalising.
pub fn derivative_ratio(mu: Mu, n: u32, delta: f64) -> f64 {
    let x = mu.times(n);
    gamma_ratio(x, x + 1.0 - delta) * gamma(2.0 - delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fps::Sign;
    use proptest::prelude::*;

    fn mu(s: &str) -> Mu {
        s.parse().unwrap()
    }

    fn single(s: &GeneralSeries) -> Term {
        assert_eq!(s.terms().len(), 1, "{s:?}");
        s.terms()[0]
    }

    fn z_pow(e: f64) -> GeneralSeries {
        GeneralSeries::monomial(e, 1.0).unwrap()
    }

    #[test]
    fn theta_series_examples() {
        let t0 = theta_series(mu("3/2"), 0, 10).unwrap();
        assert_eq!(t0, FractionalSeries::all_ones(mu("3/2"), 10).unwrap());

        let t1 = theta_series(Mu::ONE, 1, 4).unwrap();
        assert_eq!((t1.coeff(2), t1.coeff(3), t1.coeff(4)), (2.0, 3.0, 4.0));

        let t2 = theta_series(mu("3/2"), 2, 4).unwrap();
        assert_eq!(t2.coeff(2), 9.0);
    }

    #[test]
    fn apply_d_examples() {
        let f = FractionalSeries::single_term(Mu::ONE, Sign::Minus, 2, 0.5, 8).unwrap();
        assert_eq!(apply_d(&f, 0), f);
        let d1 = apply_d(&f, 1);
        assert_eq!(d1.coeff(2), 1.0);
        assert_eq!(d1.sign(), Sign::Minus);
    }

    #[test]
    fn frac_derivative_examples() {
        assert_eq!(frac_derivative(&z_pow(1.0), 0.0).unwrap(), z_pow(1.0));

        let t = single(&frac_derivative(&z_pow(1.0), 0.5).unwrap());
        assert_eq!(t.exponent, 0.5);
        assert!((t.coefficient - 1.128_379_167_095_512_573_9).abs() < 1e-13);

        let t = single(&frac_derivative(&z_pow(2.0), 0.5).unwrap());
        assert_eq!(t.exponent, 1.5);
        assert!((t.coefficient - 1.504_505_556_127_350_098_5).abs() < 1e-13);

        assert!(frac_derivative(&z_pow(1.0), 1.0).is_err());
        assert!(frac_derivative(&z_pow(1.0), -0.1).is_err());
        // Γ-argument e + 1 − δ must stay positive
        assert!(frac_derivative(&z_pow(-0.8), 0.5).is_err());
    }

    #[test]
    fn frac_integral_examples() {
        let t = single(&frac_integral(&z_pow(1.0), 0.5).unwrap());
        assert_eq!(t.exponent, 1.5);
        assert!((t.coefficient - 0.752_252_778_063_675_049_26).abs() < 1e-13);

        let t = single(&frac_integral(&z_pow(1.0), 1.0).unwrap());
        assert_eq!((t.exponent, t.coefficient), (2.0, 0.5));

        assert!(frac_integral(&z_pow(1.0), 0.0).is_err());
        assert!(frac_integral(&z_pow(-0.5), 0.5).is_err());
    }

    #[test]
    fn higher_order_derivative() {
        let s = z_pow(1.0);
        assert_eq!(
            frac_derivative_higher(&s, 0.3, 0).unwrap(),
            frac_derivative(&s, 0.3).unwrap()
        );
        let t = single(&frac_derivative_higher(&z_pow(2.0), 0.0, 1).unwrap());
        assert_eq!((t.exponent, t.coefficient), (1.0, 2.0));
        assert!(matches!(
            frac_derivative_higher(&z_pow(1.0), 0.5, 1),
            Err(Error::Domain(_))
        ));
        // the constant produced by D^0 z then d/dz vanishes on the second step
        let out = frac_derivative_higher(&z_pow(1.0), 0.0, 2).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn ratio_helpers_match_worked_values() {
        assert!((integral_ratio(Mu::ONE, 2, 0.5) - 0.8).abs() < 1e-14);
        assert!((derivative_ratio(Mu::ONE, 2, 0.5) - 2.0 / 3.0).abs() < 1e-14);
        // δ = 0: Υ = 1 and Ω·μn = 1
        assert!((integral_ratio(mu("3/2"), 3, 0.0) - 1.0).abs() < 1e-14);
        assert!((derivative_ratio(mu("3/2"), 3, 0.0) * 4.5 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ratios_decrease_in_n() {
        for m in [Mu::ONE, mu("3/2"), mu("2")] {
            for delta in [0.1, 0.5, 0.9] {
                for n in 2..200 {
                    assert!(integral_ratio(m, n + 1, delta) < integral_ratio(m, n, delta));
                    assert!(derivative_ratio(m, n + 1, delta) < derivative_ratio(m, n, delta));
                }
            }
        }
    }

    #[test]
    fn small_delta_limit() {
        let f = FractionalSeries::new(mu("3/2"), Sign::Minus, 6, [(2, 0.3), (5, 0.1)])
            .unwrap()
            .to_general();
        let d = frac_derivative(&f, 1e-8).unwrap();
        for (a, b) in d.terms().iter().zip(f.terms()) {
            assert!((a.coefficient - b.coefficient).abs() <= 1e-6 * b.coefficient.abs());
        }
    }

    fn random_series() -> impl Strategy<Value = FractionalSeries> {
        (
            prop::sample::select(vec![Mu::ONE, mu("3/2"), mu("2"), mu("7/4")]),
            prop::collection::vec(0.0..1.0f64, 1..10),
            any::<bool>(),
        )
            .prop_map(|(m, c, plus)| {
                let sign = if plus { Sign::Plus } else { Sign::Minus };
                FractionalSeries::from_dense(m, sign, c).unwrap()
            })
    }

    proptest! {
        #[test]
        fn apply_d_is_hadamard_with_theta(f in random_series(), beta in 0u32..6) {
            let theta = theta_series(f.mu(), beta, f.truncation()).unwrap();
            let via_kernel = theta.hadamard(&f).unwrap();
            let direct = apply_d(&f, beta);
            for n in 2..=f.truncation() {
                let (a, b) = (via_kernel.coeff(n), direct.coeff(n));
                prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
            }
            prop_assert_eq!(via_kernel.sign(), direct.sign());
        }

        #[test]
        fn apply_d_semigroup(f in random_series(), b1 in 0u32..=8, b2 in 0u32..=8) {
            let two_step = apply_d(&apply_d(&f, b1), b2);
            let one_step = apply_d(&f, b1 + b2);
            for n in 2..=f.truncation() {
                let (a, b) = (two_step.coeff(n), one_step.coeff(n));
                prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
            }
        }

        #[test]
        fn integral_undoes_derivative(f in random_series(), delta in 0.0..0.999f64) {
            let s = f.to_general();
            prop_assume!(delta > 0.0);
            let back = frac_integral(&frac_derivative(&s, delta).unwrap(), delta).unwrap();
            prop_assert_eq!(back.terms().len(), s.terms().len());
            for (a, b) in back.terms().iter().zip(s.terms()) {
                prop_assert!((a.exponent - b.exponent).abs() <= 1e-12 * b.exponent);
                prop_assert!((a.coefficient - b.coefficient).abs() <= 1e-12 * b.coefficient.abs());
            }
        }
    }
}
