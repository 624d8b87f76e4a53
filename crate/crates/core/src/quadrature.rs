//! Composite Simpson quadrature of complex integrands by interval doubling.

use crate::error::{invalid, Error, Result};
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimpsonOptions {
    /// Convergence is declared when two consecutive doublings change the
    /// estimate by at most `rel_tol` times the integral of `|f|`.
    pub rel_tol: f64,
    pub initial_intervals: usize,
    pub max_intervals: usize,
}

impl Default for SimpsonOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            initial_intervals: 64,
            max_intervals: 1 << 22,
        }
    }
}

impl SimpsonOptions {
    pub fn with_tolerance(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

/// Integrates `f` over `[a, b]`.
pub fn simpson<F>(f: F, a: f64, b: f64, opts: &SimpsonOptions) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(invalid("integration limits must be finite"));
    }
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let mut n = opts.initial_intervals.max(2);
    n += n % 2;
    let width = b - a;
    let at = |i: usize, n: usize| a + width * (i as f64 / n as f64);

    let (fa, fb) = (f(a), f(b));
    let ends = fa + fb;
    let ends_abs = fa.norm() + fb.norm();
    let (mut odd, mut even) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let (mut odd_abs, mut even_abs) = (0.0, 0.0);
    for i in 1..n {
        let v = f(at(i, n));
        if i % 2 == 1 {
            odd += v;
            odd_abs += v.norm();
        } else {
            even += v;
            even_abs += v.norm();
        }
    }
    let rule = |n: usize, ends, odd, even| (ends + odd * 4.0 + even * 2.0) * (width / (3.0 * n as f64));
    let rule_abs = |n: usize, ends: f64, odd: f64, even: f64| (ends + 4.0 * odd + 2.0 * even) * (width.abs() / (3.0 * n as f64));

    let mut estimate: Complex64 = rule(n, ends, odd, even);
    let mut settled = 0;
    while n < opts.max_intervals {
        n *= 2;
        even += odd;
        even_abs += odd_abs;
        odd = Complex64::new(0.0, 0.0);
        odd_abs = 0.0;
        for i in (1..n).step_by(2) {
            let v = f(at(i, n));
            odd += v;
            odd_abs += v.norm();
        }
        let next = rule(n, ends, odd, even);
        let scale = rule_abs(n, ends_abs, odd_abs, even_abs);
        let change = (next - estimate).norm();
        estimate = next;
        if !(change.is_finite() && scale.is_finite()) {
            return Err(Error::Numerical("non-finite integrand".into()));
        }
        if change <= opts.rel_tol * scale {
            settled += 1;
            if settled >= 2 {
                return Ok(estimate);
            }
        } else {
            settled = 0;
        }
    }
    Err(Error::Numerical(format!(
        "quadrature did not reach relative tolerance {} within {} intervals",
        opts.rel_tol, opts.max_intervals
    )))
}
