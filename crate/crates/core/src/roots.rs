//! Real root isolation for polynomials and for numerically composed maps.
//!
//! Polynomials given by coefficients are isolated exactly: the real roots of
//! the derivative split the interval into monotone pieces, each of which holds
//! at most one simple root (found by bisection). Critical points where the
//! polynomial itself vanishes are reported as multiple roots.
//!
//! Maps that are only available pointwise (iterated characteristic functions)
//! are handled by [`scan_roots`], a dense sign-change scan that also watches
//! the derivative so tangent (even multiplicity) roots are not missed.

/// Horner evaluation of `sum a_i x^i`.
pub fn horner(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

pub fn derivative(coefficients: &[f64]) -> Vec<f64> {
    coefficients
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &a)| a * i as f64)
        .collect()
}

pub(crate) fn trim(coefficients: &[f64]) -> &[f64] {
    let len = coefficients
        .iter()
        .rposition(|&a| a != 0.0)
        .map_or(0, |i| i + 1);
    &coefficients[..len]
}

/// Real roots of `a x^2 + b x + c` (with `a != 0`), ascending.
///
/// A discriminant within `1e-9 * max(1, b^2, |4ac|)` of zero is treated as a
/// double root and reported once at `-b / 2a`.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let disc = b * b - 4.0 * a * c;
    let scale = 1f64.max(b * b).max((4.0 * a * c).abs());
    if disc.abs() <= 1e-9 * scale {
        return vec![-b / (2.0 * a)];
    }
    if disc < 0.0 {
        return Vec::new();
    }
    // q has the sign of b so the sum below never cancels.
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (mut r1, mut r2) = if q == 0.0 {
        let r = (-c / a).sqrt();
        (-r, r)
    } else {
        (q / a, c / q)
    };
    if r1 > r2 {
        std::mem::swap(&mut r1, &mut r2);
    }
    vec![r1, r2]
}

fn different_signs(x: f64, y: f64) -> bool {
    (x < 0.0) != (y < 0.0)
}

/// Bisection on a bracket `[lo, hi]` with `f(lo)` and `f(hi)` of opposite
/// sign. Stops once the bracket is narrower than `tol` or cannot shrink.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..2000 {
        let mid = lo + 0.5 * (hi - lo);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return mid;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if different_signs(f_lo, f_mid) {
            hi = mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    lo + 0.5 * (hi - lo)
}

fn dedup_sorted(mut roots: Vec<f64>, within: f64) -> Vec<f64> {
    roots.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(roots.len());
    for r in roots {
        match out.last() {
            Some(&last) if (r - last).abs() <= within => {}
            _ => out.push(r),
        }
    }
    out
}

/// Cauchy bound: every root of the polynomial satisfies `|x| <= bound`.
fn cauchy_bound(coefficients: &[f64]) -> f64 {
    let n = coefficients.len() - 1;
    let lead = coefficients[n].abs();
    1.0 + coefficients[..n]
        .iter()
        .map(|a| a.abs() / lead)
        .fold(0.0, f64::max)
}

/// All real roots of the polynomial `sum a_i x^i` in the closed interval,
/// refined to `tol`, deduplicated within `10 * tol`, ascending.
///
/// Infinite interval ends are clipped to the Cauchy root bound.
pub fn find_roots(coefficients: &[f64], interval: (f64, f64), tol: f64) -> Vec<f64> {
    let p = trim(coefficients);
    if p.len() < 2 {
        return Vec::new();
    }
    let bound = cauchy_bound(p);
    let lo = interval.0.max(-bound);
    let hi = interval.1.min(bound);
    if !(lo <= hi) {
        return Vec::new();
    }
    dedup_sorted(isolate(p, lo, hi, tol), 10.0 * tol)
}

fn isolate(p: &[f64], lo: f64, hi: f64, tol: f64) -> Vec<f64> {
    match p.len() {
        0 | 1 => return Vec::new(),
        2 => {
            let r = -p[0] / p[1];
            return if (lo..=hi).contains(&r) {
                vec![r]
            } else {
                Vec::new()
            };
        }
        _ => {}
    }
    let critical = isolate(&derivative(p), lo, hi, tol);
    let mut knots = Vec::with_capacity(critical.len() + 2);
    knots.push(lo);
    knots.extend(critical.iter().copied().filter(|&c| c > lo && c < hi));
    knots.push(hi);

    let mut roots = Vec::new();
    let eval = |x: f64| horner(p, x);
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (fa, fb) = (eval(a), eval(b));
        if fa == 0.0 {
            roots.push(a);
        }
        if fb == 0.0 {
            roots.push(b);
        }
        if fa != 0.0 && fb != 0.0 && different_signs(fa, fb) {
            roots.push(bisect(eval, a, b, tol));
        }
    }
    for &c in &critical {
        if c < lo || c > hi {
            continue;
        }
        // Rounding-level magnitude of p near c; a critical value below it is
        // a multiple root.
        let magnitude: f64 = p
            .iter()
            .enumerate()
            .map(|(i, a)| a.abs() * c.abs().powi(i as i32))
            .sum();
        if eval(c).abs() <= 64.0 * f64::EPSILON * magnitude {
            roots.push(c);
        }
    }
    roots
}

/// Scan settings for [`scan_roots`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub step: f64,
    pub tol: f64,
    /// A critical point whose value is within this bound is a tangent root.
    pub tangent_tol: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            step: 1e-4,
            tol: 1e-12,
            tangent_tol: 1e-10,
        }
    }
}

/// Roots of a function given together with its derivative, found by a dense
/// scan of `[lo, hi]`.
///
/// Sign changes of the value are refined by bisection. Sign changes of the
/// derivative without a value sign change are refined to the critical point,
/// which counts as a root when the value there is below `tangent_tol`.
/// Non-finite samples break brackets.
pub fn scan_roots<F>(f: F, lo: f64, hi: f64, opts: ScanOptions) -> Vec<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let n = ((hi - lo) / opts.step).ceil().max(1.0) as usize;
    let at = |i: usize| {
        if i == n {
            hi
        } else {
            lo + i as f64 * opts.step
        }
    };
    let value = |x: f64| f(x).0;
    let slope = |x: f64| f(x).1;

    let mut roots = Vec::new();
    let mut prev_x = at(0);
    let mut prev = f(prev_x);
    if prev.0 == 0.0 {
        roots.push(prev_x);
    }
    for i in 1..=n {
        let x = at(i);
        let cur = f(x);
        let finite = prev.0.is_finite() && cur.0.is_finite();
        if finite {
            if cur.0 == 0.0 {
                roots.push(x);
            } else if prev.0 != 0.0 && different_signs(prev.0, cur.0) {
                roots.push(bisect(value, prev_x, x, opts.tol));
            } else if prev.1.is_finite()
                && cur.1.is_finite()
                && prev.1 != 0.0
                && cur.1 != 0.0
                && different_signs(prev.1, cur.1)
            {
                let c = bisect(slope, prev_x, x, opts.tol);
                if value(c).abs() <= opts.tangent_tol {
                    roots.push(c);
                }
            }
        }
        prev_x = x;
        prev = cur;
    }
    dedup_sorted(roots, 10.0 * opts.tol)
}
