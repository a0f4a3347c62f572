//! Combinatorial volume proxy: the asymptotic (and rigorous upper-bound)
//! volume `n * v_O`, where `v_O = 8 * Lobachevsky(pi/4)` is the volume of
//! the regular right-angled ideal hyperbolic octahedron. No metric is ever
//! computed here.

/// Lobachevsky function by its sine series, `0.5 * sum sin(2 m theta) / m^2`,
/// summed to an absolute tail bound <= `tol`.
pub fn lobachevsky(theta: f64, tol: f64) -> f64 {
    // Alternating-free tail bound: |tail| <= 0.5 * sum_{m > M} 1/m^2 <= 1/(2M).
    let m_max = ((0.5 / tol).ceil() as usize).max(8);
    // Kahan summation, smallest terms first.
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for m in (1..=m_max).rev() {
        let term = (2.0 * m as f64 * theta).sin() / (m as f64 * m as f64);
        let y = term - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    0.5 * sum
}

/// `v_O` to absolute error <= 1e-12.
pub fn octahedron_volume() -> f64 {
    // At theta = pi/4 the series is alternating over odd m, so the error is
    // bounded by the first omitted term; m up to 2e6 gives 8 * tail <= 1e-12.
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    let mut m = 1_999_999i64;
    while m >= 1 {
        let sign = if ((m - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign / (m as f64 * m as f64);
        let y = term - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
        m -= 2;
    }
    // v_O = 8 * Lambda(pi/4) = 4 * sum_{odd m} (-1)^((m-1)/2) / m^2.
    4.0 * sum
}

/// `n * v_O`: asymptotic volume and rigorous upper bound for the
/// hyperbolic volume, linear in n by definition.
pub fn volume_proxy(n: usize) -> f64 {
    assert!(n >= 1);
    n as f64 * octahedron_volume()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn octahedron_volume_value() {
        // 8 * Lambda(pi/4) = 4 * Catalan.
        assert!((octahedron_volume() - 3.663862376708876).abs() < 1e-12);
    }

    #[test]
    fn series_matches_direct_evaluation() {
        let direct = lobachevsky(std::f64::consts::PI / 4.0, 1e-9);
        assert!((8.0 * direct - octahedron_volume()).abs() < 2e-8);
    }

    #[test]
    fn proxy_linear() {
        let v = octahedron_volume();
        assert_eq!(volume_proxy(1), v);
        assert_eq!(volume_proxy(7), 7.0 * v);
    }
}
