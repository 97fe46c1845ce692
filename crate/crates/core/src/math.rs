//! Float helpers routed through `libm`, so results are bit-identical with or
//! without `std`.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

/// `|x|^p`, with the common exponents special-cased.
#[inline]
pub(crate) fn abs_pow(x: f64, p: f64) -> f64 {
    let a = x.abs();
    if p == 1.0 {
        a
    } else if p == 2.0 {
        a * a
    } else if a == 0.0 {
        0.0
    } else {
        powf(a, p)
    }
}

/// Square root of `zeta^2 - c` for `zeta = x + iy`, on the branch that behaves
/// like `zeta` at infinity. For `y >= 0` the result lies in the closed upper
/// half-plane. Returns `(re, im)`.
///
/// Written without data-dependent branches so that several independent
/// evaluations can be interleaved (see `loewner`).
#[inline(always)]
pub(crate) fn slit_sqrt(x: f64, y: f64, c: f64) -> (f64, f64) {
    let a = x * x - y * y - c;
    let b = 2.0 * x * y;
    let m = sqrt(a * a + b * b);
    // larger of |Re|, |Im| of the root; the smaller one is b/(2·big)
    let big = sqrt(0.5 * (m + a.abs()));
    let small = if big > 0.0 { b / (2.0 * big) } else { 0.0 };
    let real_dominant = a >= 0.0;
    let (re, im) = if real_dominant { (big, small) } else { (small, big) };
    if real_dominant && x < 0.0 {
        (-re, -im)
    } else {
        (re, im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn slit_sqrt_squares_back() {
        for &(x, y) in &[(0.3, 0.7), (-0.3, 0.7), (5.0, 1e-3), (-5.0, 1e-3), (0.01, 0.0), (-3.0, 0.0)] {
            let (re, im) = slit_sqrt(x, y, 0.04);
            let s = Complex64::new(re, im);
            let z = Complex64::new(x, y);
            assert!((s * s - (z * z - 0.04)).norm() < 1e-12);
            assert!(im >= 0.0);
            if x.abs() > 1.0 {
                assert_eq!(re.signum(), x.signum());
            }
        }
    }

    #[test]
    fn slit_sqrt_base_of_slit_goes_to_tip() {
        let (re, im) = slit_sqrt(0.0, 0.0, 4.0);
        assert_eq!((re, im), (0.0, 2.0));
    }
}
