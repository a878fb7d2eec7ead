//! Thin float shims over `libm` so the rest of the crate reads like std code.

#[inline]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[cfg(test)]
#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

/// Integer power by repeated squaring; exact for the small exponents used in
/// system definitions.
pub fn powi(base: f64, exp: i32) -> f64 {
    let mut e = exp.unsigned_abs();
    let mut b = base;
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    if exp < 0 {
        1.0 / acc
    } else {
        acc
    }
}

/// Max-norm distance between two equally long vectors.
pub fn dist_inf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| abs(x - y)).fold(0.0, f64::max)
}

pub fn dist_euclid(a: &[f64], b: &[f64]) -> f64 {
    sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Sorts ascending and merges values closer than `tol`, keeping the first of
/// each cluster.
pub fn sort_dedup(values: &mut alloc::vec::Vec<f64>, tol: f64) {
    values.sort_by(f64::total_cmp);
    values.dedup_by(|b, a| abs(*b - *a) <= tol);
}
