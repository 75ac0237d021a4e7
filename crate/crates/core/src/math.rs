//! Float intrinsics behind a feature switch: `std` methods by default,
//! `libm` under `no_std`. Everything in the crate routes float math
//! through these so the core stays `no_std`-clean.

#![allow(dead_code)]

macro_rules! unary {
    ($(($name:ident, $libm:ident)),* $(,)?) => {
        $(
            #[cfg(feature = "std")]
            #[inline(always)]
            pub(crate) fn $name(x: f64) -> f64 {
                f64::$name(x)
            }
            #[cfg(not(feature = "std"))]
            #[inline(always)]
            pub(crate) fn $name(x: f64) -> f64 {
                libm::$libm(x)
            }
        )*
    };
}

unary!(
    (exp, exp),
    (exp_m1, expm1),
    (ln, log),
    (ln_1p, log1p),
    (sqrt, sqrt),
    (sin, sin),
    (cos, cos),
    (acos, acos),
    (abs, fabs),
    (floor, floor),
);

#[cfg(feature = "std")]
#[inline(always)]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    x.powf(y)
}
#[cfg(not(feature = "std"))]
#[inline(always)]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// Integer power by binary exponentiation; exact products, no libm call.
#[inline]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    let mut base = if n < 0 { 1.0 / x } else { x };
    let mut e = n.unsigned_abs();
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_powf() {
        for &x in &[0.3, 1.7, 9.0] {
            for n in -6..7 {
                let a = powi(x, n);
                let b = powf(x, n as f64);
                assert!((a - b).abs() <= 1e-13 * b.abs().max(1.0), "x={x} n={n}");
            }
        }
    }
}
