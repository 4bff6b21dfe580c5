//! Bracketed root finding, golden-section search, and composite quadrature.
//!
//! Every routine here is derivative-free and deterministic. Root finding is
//! plain bisection on a sign-changing bracket with a hard iteration cap, which
//! is the right tool when the only structural guarantee is single crossing.

/// Hard cap on bisection iterations.
pub const MAX_BISECT_ITERS: usize = 200;

/// Outcome of probing a bracket that carries no sign change.
#[derive(Debug, Clone, Copy)]
pub struct NoSignChange {
    pub lo: f64,
    pub hi: f64,
    pub flo: f64,
    pub fhi: f64,
}

/// Bisect `f` on `[lo, hi]` down to an interval of width `xtol`.
///
/// Returns the midpoint of the final interval. Endpoints that are exact roots
/// short-circuit. A bracket without a sign change is reported back to the
/// caller, who knows what equation it was trying to solve.
pub fn bisect<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    xtol: f64,
) -> Result<f64, NoSignChange> {
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    if flo == 0.0 {
        return Ok(lo);
    }
    let fhi = f(hi);
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo * fhi > 0.0 {
        return Err(NoSignChange { lo, hi, flo, fhi });
    }
    for _ in 0..MAX_BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= xtol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if (fmid > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(argmax, max)`. Tolerance is on the argument.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, xtol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..MAX_BISECT_ITERS {
        if (b - a).abs() <= xtol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Composite trapezoid rule over sample points `(xs, ys)`.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    let mut acc = 0.0;
    for i in 1..xs.len() {
        acc += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
    }
    acc
}

/// Running trapezoid integral: `out[i] = integral of y dx over xs[0..=i]`.
pub fn cumulative_trapezoid(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    debug_assert_eq!(xs.len(), ys.len());
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..xs.len() {
        acc += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
        out.push(acc);
    }
    out
}

/// `n` evenly spaced points covering `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    let step = (hi - lo) / (n - 1) as f64;
    let mut v: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
    // Pin the endpoints exactly.
    v[0] = lo;
    *v.last_mut().unwrap() = hi;
    v
}

/// Sorted union of a base grid with extra points, deduplicated to 1e-15.
pub fn merge_grid(base: &[f64], extra: &[f64]) -> Vec<f64> {
    let mut all: Vec<f64> = base.iter().chain(extra.iter()).copied().collect();
    all.sort_by(|a, b| a.partial_cmp(b).expect("grid points must be finite"));
    all.dedup_by(|a, b| (*a - *b).abs() <= 1e-15);
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn bisect_rejects_no_sign_change() {
        let e = bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(e.flo > 0.0 && e.fhi > 0.0);
    }

    #[test]
    fn trapezoid_integrates_linear_exactly() {
        let xs = linspace(0.0, 1.0, 11);
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x + 1.0).collect();
        assert!((trapezoid(&xs, &ys) - 2.5).abs() < 1e-15);
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, fx) = golden_section_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-10);
        assert!(fx.abs() < 1e-18);
    }

    #[test]
    fn merge_grid_inserts_and_dedups() {
        let g = merge_grid(&[0.0, 0.5, 1.0], &[0.25, 0.5]);
        assert_eq!(g, vec![0.0, 0.25, 0.5, 1.0]);
    }
}
