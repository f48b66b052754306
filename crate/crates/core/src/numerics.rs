//! Small root-finding helpers shared by the solvers.

/// Absolute tolerance on the abscissa for all bracketing root finds.
pub const ROOT_TOL: f64 = 1e-12;

/// Bisection for a sign change of `f` on `[a, b]`.
///
/// Returns `None` when `f(a)` and `f(b)` have the same strict sign.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= tol || m == a || m == b {
            return Some(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// All sign-change roots of `f` on `[a, b]`, bracketed on an `n`-point scan.
pub fn scan_roots<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize, tol: f64) -> Vec<f64> {
    let mut roots = Vec::new();
    if b <= a {
        return roots;
    }
    let h = (b - a) / n as f64;
    let mut x0 = a;
    let mut f0 = f(x0);
    if f0 == 0.0 {
        roots.push(a);
    }
    for i in 1..=n {
        let x1 = if i == n { b } else { a + h * i as f64 };
        let f1 = f(x1);
        if f1 == 0.0 {
            roots.push(x1);
        } else if f0 != 0.0 && f0.signum() != f1.signum() {
            if let Some(r) = bisect(&f, x0, x1, tol) {
                roots.push(r);
            }
        }
        x0 = x1;
        f0 = f1;
    }
    roots.dedup_by(|x, y| (*x - *y).abs() <= 10.0 * tol);
    roots
}

/// Golden-section minimization of a unimodal function on `[a, b]`.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
