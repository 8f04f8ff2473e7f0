//! Adaptive Simpson quadrature.

/// Bisection depth cap for [`adaptive_simpson`].
pub const MAX_DEPTH: u32 = 60;

/// Integrates `f` over `[a, b]` to absolute accuracy `eps`.
///
/// Classic Lyness recursion: a panel is accepted once the two half-panel
/// Simpson sums differ from the whole-panel sum by at most `15·eps`, and the
/// accepted value carries the Richardson correction. Panels at depth
/// `max_depth` are accepted unconditionally.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, eps: f64, max_depth: u32) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    recurse(f, a, b, fa, fm, fb, whole, eps, max_depth)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth_left: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    // stop once the tolerance is below what the panel sum can resolve
    let resolution = f64::EPSILON * (left.abs() + right.abs());
    if depth_left == 0 || delta.abs() <= 15.0 * eps || eps <= resolution || m <= a || m >= b {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * eps, depth_left - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * eps, depth_left - 1)
}

/// Plain composite Simpson rule with `panels` panels; used for a coarse
/// magnitude estimate before setting an absolute tolerance.
pub fn composite_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == panels { b } else { lo + h };
            simpson(lo, hi, f(lo), f(0.5 * (lo + hi)), f(hi))
        })
        .sum()
}
