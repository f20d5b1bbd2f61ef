//! Composite Simpson quadrature.

/// Default node count for convolution quadrature.
pub const SIMPSON_NODES: usize = 2048;

/// Composite Simpson rule on `[a, b]` with `n` subintervals (rounded up to even).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 1 { n + 1 } else { n.max(2) };
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let v = f(a + i as f64 * h);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
}

/// Simpson rule on samples at uniform spacing `h` (odd sample count).
/// Falls back to trapezoid for the last interval when the count is even.
pub fn simpson_samples(y: &[f64], h: f64) -> f64 {
    let n = y.len();
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return 0.5 * h * (y[0] + y[1]);
    }
    let m = if n % 2 == 1 { n } else { n - 1 };
    let mut s = y[0] + y[m - 1];
    for (i, v) in y.iter().enumerate().take(m - 1).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    let mut total = s * h / 3.0;
    if m < n {
        total += 0.5 * h * (y[n - 2] + y[n - 1]);
    }
    total
}

/// Trapezoid rule on samples at uniform spacing `h`.
pub fn trapezoid_samples(y: &[f64], h: f64) -> f64 {
    if y.len() < 2 {
        return 0.0;
    }
    let inner: f64 = y[1..y.len() - 1].iter().sum();
    h * (0.5 * (y[0] + y[y.len() - 1]) + inner)
}
