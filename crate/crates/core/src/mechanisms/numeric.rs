use crate::error::{Error, Result};

/// Absolute error target handed to the double-exponential rule.
const ABS_TOL: f64 = 1e-13;
/// Largest accepted relative error estimate.
pub(crate) const REL_TOL: f64 = 1e-6;

/// `∫_a^b f` with the integration interval split at interior `breaks`.
pub(crate) fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64]) -> Result<f64> {
    let mut points = vec![a];
    points.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    points.push(b);
    let mut total = 0.0;
    let mut error = 0.0;
    for w in points.windows(2) {
        let out = quadrature::double_exponential::integrate(&f, w[0], w[1], ABS_TOL);
        total += out.integral;
        error += out.error_estimate;
    }
    if !total.is_finite() {
        return Err(Error::QuadratureFailure(format!(
            "non-finite integral on [{a}, {b}]"
        )));
    }
    if error > REL_TOL * total.abs() && error > ABS_TOL {
        return Err(Error::QuadratureFailure(format!(
            "error estimate {error:e} for integral {total:e}"
        )));
    }
    Ok(total)
}

/// `log(expm1(s) / s)`, equal to `0` at `s = 0`, without cancellation.
pub(crate) fn log_expm1_ratio(s: f64) -> f64 {
    if s.abs() < 1e-8 {
        s / 2.0
    } else if s > 0.0 {
        s + (-(-s).exp_m1()).ln() - s.ln()
    } else {
        (-s.exp_m1()).ln() - (-s).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let v = integrate(|x| x * x, 0.0, 3.0, &[1.0]).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
    }

    #[test]
    fn handles_kinks_at_breaks() {
        let v = integrate(|x: f64| (-(x - 0.3).abs()).exp(), 0.0, 1.0, &[0.3]).unwrap();
        let exact = 2.0 - (-0.3f64).exp() - (-0.7f64).exp();
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn log_expm1_ratio_is_continuous() {
        for s in [-50.0f64, -5.0, -1e-9, 0.0, 1e-9, 1.0, 40.0] {
            let direct = if s == 0.0 { 0.0 } else { (s.exp_m1() / s).ln() };
            assert!((log_expm1_ratio(s) - direct).abs() < 1e-9, "{s}");
        }
    }
}
