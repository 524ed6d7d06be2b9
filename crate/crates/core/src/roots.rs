//! Bracketed scalar root finding shared by the critical-line and fit code.

/// Bisection on a sign-changing bracket, down to an absolute width of `xtol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Option<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol || mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if !fm.is_finite() {
            return None;
        }
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// One secant-Newton step from `x`, kept only if it lowers |f|.
pub fn newton_polish<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let fx = f(x);
    let h = 1e-7 * x.abs().max(1e-3);
    let d = (f(x + h) - f(x - h)) / (2.0 * h);
    if d == 0.0 || !d.is_finite() {
        return x;
    }
    let cand = x - fx / d;
    let fc = f(cand);
    if fc.is_finite() && fc.abs() < fx.abs() {
        cand
    } else {
        x
    }
}

/// All sign changes of `f` on a uniform `samples`-point grid over [lo, hi],
/// each refined by bisection and polished. Non-finite samples break brackets.
pub fn scan_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, samples: usize, xtol: f64) -> Vec<f64> {
    let n = samples.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    let mut out = Vec::new();
    let mut prev = (lo, f(lo));
    for i in 1..n {
        let x = if i == n - 1 { hi } else { lo + step * i as f64 };
        let fx = f(x);
        if prev.1.is_finite() && fx.is_finite() {
            if prev.1 == 0.0 {
                out.push(prev.0);
            } else if fx != 0.0 && prev.1.signum() != fx.signum() {
                if let Some(r) = bisect(&f, prev.0, x, xtol) {
                    out.push(newton_polish(&f, r));
                }
            }
        }
        prev = (x, fx);
    }
    if prev.1 == 0.0 {
        out.push(prev.0);
    }
    out
}
