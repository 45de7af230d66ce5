//! Scalar helpers on top of `libm` and a couple of one-dimensional numerical
//! routines shared by the rest of the crate.

pub use core::f64::consts::PI;

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn tanh(x: f64) -> f64 {
    libm::tanh(x)
}

#[inline]
pub fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub fn asin(x: f64) -> f64 {
    libm::asin(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

#[inline]
pub fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[inline]
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `1 / cosh(x)`, evaluated without overflow for large `|x|`.
#[inline]
pub fn sech(x: f64) -> f64 {
    let a = x.abs();
    if a > 350.0 {
        0.0
    } else {
        let e = libm::exp(-a);
        2.0 * e / (1.0 + e * e)
    }
}

/// `x^p` for `x >= 0`; integer exponents take the exact multiplication path.
#[inline]
pub fn powf(x: f64, p: f64) -> f64 {
    if p == libm::trunc(p) && p.abs() <= 16.0 {
        powi(x, p as i32)
    } else if x == 0.0 {
        if p > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        libm::pow(x, p)
    }
}

#[inline]
pub fn powi(x: f64, n: i32) -> f64 {
    let mut base = if n < 0 { 1.0 / x } else { x };
    let mut k = n.unsigned_abs();
    let mut acc = 1.0;
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    acc
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    // Start from a uniform partition so narrow peaks are not missed.
    const PIECES: usize = 64;
    let h = (b - a) / PIECES as f64;
    let piece_tol = tol / PIECES as f64;
    (0..PIECES)
        .map(|k| {
            let lo = a + h * k as f64;
            let hi = if k + 1 == PIECES { b } else { lo + h };
            let mid = 0.5 * (lo + hi);
            let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
            let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
            simpson_step(f, lo, hi, flo, fmid, fhi, whole, piece_tol, 48)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
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
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

/// Bisection for a sign change of `f` on `[lo, hi]`; stops once the bracket is
/// narrower than `width`. Returns the final bracket.
pub fn bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    width: f64,
) -> Option<(f64, f64)> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some((lo, lo));
    }
    if fhi == 0.0 {
        return Some((hi, hi));
    }
    if (flo > 0.0) == (fhi > 0.0) {
        return None;
    }
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Some((mid, mid));
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some((lo, hi))
}

/// `∫_0^1 (a + (b - a) s)^p ds` for `a, b >= 0`.
///
/// Integer exponents use the exact symmetric expansion; otherwise the closed
/// form is used away from `a = b` and an 8-point Gauss–Legendre rule near it.
pub fn mean_power_linear(a: f64, b: f64, p: f64) -> f64 {
    if p == libm::trunc(p) && (0.0..=32.0).contains(&p) {
        let n = p as i32;
        let mut acc = 0.0;
        for k in 0..=n {
            acc += powi(a, k) * powi(b, n - k);
        }
        return acc / (n as f64 + 1.0);
    }
    let hi = a.max(b);
    let lo = a.min(b);
    if hi == 0.0 {
        return 0.0;
    }
    if (hi - lo) > 1e-3 * hi {
        (powf(hi, p + 1.0) - powf(lo, p + 1.0)) / ((p + 1.0) * (hi - lo))
    } else {
        gauss_legendre_8(|s| powf(a + (b - a) * s, p))
    }
}

fn gauss_legendre_8<F: Fn(f64) -> f64>(f: F) -> f64 {
    const NODES: [f64; 4] = [
        0.183_434_642_495_649_8,
        0.525_532_409_916_329,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_3,
    ];
    const WEIGHTS: [f64; 4] = [
        0.362_683_783_378_362,
        0.313_706_645_877_887_3,
        0.222_381_034_453_374_5,
        0.101_228_536_290_376_3,
    ];
    let mut acc = 0.0;
    for (x, w) in NODES.iter().zip(WEIGHTS.iter()) {
        acc += w * (f(0.5 + 0.5 * x) + f(0.5 - 0.5 * x));
    }
    0.5 * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_sech_squared() {
        let v = adaptive_simpson(&|x| sech(x) * sech(x), -40.0, 40.0, 1e-13);
        assert!((v - 2.0).abs() < 1e-11, "{v}");
    }

    #[test]
    fn mean_power_matches_quadrature() {
        for &(a, b, p) in &[(0.3, 0.9, 4.0), (0.5, 0.5, 6.0), (0.2, 0.7, 2.5), (0.4, 0.4001, 3.3)] {
            let q = adaptive_simpson(&|s| powf(a + (b - a) * s, p), 0.0, 1.0, 1e-14);
            assert!((mean_power_linear(a, b, p) - q).abs() < 1e-12);
        }
    }

    #[test]
    fn bisect_finds_sqrt_two() {
        let (lo, hi) = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-10).unwrap();
        assert!(lo <= sqrt(2.0) && sqrt(2.0) <= hi);
        assert!(bisect(|x| x * x + 1.0, 0.0, 2.0, 1e-3).is_none());
    }
}
