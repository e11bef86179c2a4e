//! Adaptive Simpson quadrature.

const MAX_DEPTH: u32 = 48;
/// Initial panels; a single panel can accept a spurious zero error estimate
/// on periodic integrands.
const PANELS: usize = 16;

/// `∫_a^b f` to roughly `tol` absolute error.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let width = (b - a) / PANELS as f64;
    let panel_tol = tol / PANELS as f64;
    let mut total = 0.0;
    let mut lo = a;
    let mut flo = f(a);
    for k in 1..=PANELS {
        let hi = if k == PANELS { b } else { a + width * k as f64 };
        let fhi = f(hi);
        let fm = f(0.5 * (lo + hi));
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
        total += refine(&f, lo, hi, flo, fm, fhi, whole, panel_tol, MAX_DEPTH);
        lo = hi;
        flo = fhi;
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || libm::fabs(delta) <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
