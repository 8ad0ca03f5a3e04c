//! Shared numerical helpers: grids, bisection, and composite Simpson
//! quadrature with breakpoint splitting and panel doubling.

use crate::error::Error;
use crate::Result;

/// `n` evenly spaced points covering `[a, b]` inclusive. `n >= 2`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least 2 points");
    let step = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + step * i as f64 })
        .collect()
}

/// Bisection on a bracketed sign change, to interval width `tol`.
///
/// `f(lo)` and `f(hi)` must have opposite signs (a zero endpoint is returned
/// as-is).
pub fn bisect_root<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    debug_assert!(flo * f(hi) < 0.0, "bisect_root requires a bracket");
    let mut iters = 0;
    while hi - lo > tol && iters < 200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        iters += 1;
    }
    0.5 * (lo + hi)
}

/// Controls for [`simpson_adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    /// Relative change between successive doublings considered converged.
    pub rel_tol: f64,
    /// Absolute floor so near-zero integrals terminate.
    pub abs_tol: f64,
    /// Panels on the first pass (one panel = two Simpson subintervals).
    pub initial_panels: usize,
    /// Doubling attempts before reporting non-convergence.
    pub max_doublings: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            rel_tol: 1e-8,
            abs_tol: 1e-14,
            initial_panels: 4096,
            max_doublings: 12,
        }
    }
}

fn composite_simpson<const N: usize, F>(f: &F, a: f64, b: f64, panels: usize) -> [f64; N]
where
    F: Fn(f64) -> [f64; N],
{
    let n_sub = 2 * panels;
    let h = (b - a) / n_sub as f64;
    let mut acc = [0.0; N];
    let add = |acc: &mut [f64; N], v: [f64; N], w: f64| {
        for (s, x) in acc.iter_mut().zip(v) {
            *s += w * x;
        }
    };
    add(&mut acc, f(a), 1.0);
    add(&mut acc, f(b), 1.0);
    for i in 1..n_sub {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        add(&mut acc, f(a + h * i as f64), w);
    }
    for s in acc.iter_mut() {
        *s *= h / 3.0;
    }
    acc
}

/// Composite Simpson over `[a, b]`, split at `breakpoints` (kinks of the
/// integrand), with all segments doubled until the total changes by less
/// than `rel_tol` (with an `abs_tol` floor).
///
/// The integrand returns `N` components integrated simultaneously over the
/// same nodes.
pub fn simpson_adaptive<const N: usize, F>(
    f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: &QuadratureOptions,
) -> Result<[f64; N]>
where
    F: Fn(f64) -> [f64; N],
{
    assert!(b > a, "integration interval must have positive length");
    let mut edges = vec![a];
    let mut sorted: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|t| *t > a && *t < b)
        .collect();
    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
    for t in sorted {
        if t - edges.last().unwrap() > 1e-12 {
            edges.push(t);
        }
    }
    edges.push(b);

    let total_len = b - a;
    let segment_panels = |base: usize| -> Vec<usize> {
        edges
            .windows(2)
            .map(|w| {
                let share = ((w[1] - w[0]) / total_len * base as f64).ceil() as usize;
                share.max(8)
            })
            .collect()
    };

    let eval = |panels: &[usize]| -> [f64; N] {
        let mut total = [0.0; N];
        for (w, m) in edges.windows(2).zip(panels) {
            let part = composite_simpson(&f, w[0], w[1], *m);
            for (t, p) in total.iter_mut().zip(part) {
                *t += p;
            }
        }
        total
    };

    let mut panels = segment_panels(opts.initial_panels);
    let mut prev = eval(&panels);
    for _ in 0..opts.max_doublings {
        for m in panels.iter_mut() {
            *m *= 2;
        }
        let next = eval(&panels);
        let mut worst: f64 = 0.0;
        for (p, n) in prev.iter().zip(next.iter()) {
            let diff = (p - n).abs();
            let scale = n.abs().max(opts.abs_tol / opts.rel_tol);
            worst = worst.max(diff / scale);
        }
        if worst < opts.rel_tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNonConvergence {
        achieved: {
            let half: Vec<usize> = panels.iter().map(|m| m / 2).collect();
            let a_ = eval(&half);
            prev.iter()
                .zip(a_)
                .map(|(p, q)| (p - q).abs())
                .fold(0.0, f64::max)
        },
        target: opts.rel_tol,
    })
}
