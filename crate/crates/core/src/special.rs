//! Confluent hypergeometric series, used as an independent closed-form
//! oracle for the rank-one truncated kernels.

/// Kummer's confluent hypergeometric function `1F1(a; b; z)` by its
/// everywhere-convergent power series. `b` must not be a nonpositive
/// integer. Plain f64 — this is a float-mode oracle only.
pub fn hyp1f1(a: f64, b: f64, z: f64) -> f64 {
    assert!(
        !(b <= 0.0 && b.fract() == 0.0),
        "1F1 pole: b is a nonpositive integer"
    );
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for n in 0..500 {
        let nf = n as f64;
        term *= (a + nf) / (b + nf) * z / (nf + 1.0);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1.0) && n > 3 {
            return sum;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_exponential_when_a_equals_b() {
        for z in [-3.0, -0.5, 0.0, 1.0, 2.5] {
            assert!((hyp1f1(1.0, 1.0, z) - z.exp()).abs() < 1e-12 * z.exp().max(1.0));
        }
    }

    #[test]
    fn closed_form_at_a1_b3() {
        // term n of the series is 2 z^n / (n+2)!, so
        // 1F1(1; 3; z) = 2 (e^z - 1 - z) / z^2
        for z in [-4.0f64, -1.0, -0.25, 0.5, 2.0] {
            let closed = 2.0 * (z.exp() - 1.0 - z) / (z * z);
            let series = hyp1f1(1.0, 3.0, z);
            assert!(
                (series - closed).abs() < 1e-12 * closed.abs().max(1.0),
                "z = {z}: {series} vs {closed}"
            );
        }
    }

    #[test]
    fn kummer_transformation() {
        // 1F1(a; b; z) = e^z 1F1(b-a; b; -z)
        let (a, b) = (1.5, 3.5);
        for z in [-2.0, 0.7, 1.9] {
            let lhs = hyp1f1(a, b, z);
            let rhs = z.exp() * hyp1f1(b - a, b, -z);
            assert!((lhs - rhs).abs() < 1e-11 * lhs.abs().max(1.0));
        }
    }
}
