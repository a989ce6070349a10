//! Small least-squares helpers used for tail extrapolation of truncation
//! sequences.

/// Result of fitting `y ≈ intercept + slope · x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineFit {
    pub intercept: f64,
    pub slope: f64,
    /// Sum of squared residuals.
    pub sse: f64,
}

/// Ordinary least squares on `(x, y)` pairs. Needs at least two distinct `x`.
pub fn affine(xs: &[f64], ys: &[f64]) -> Option<AffineFit> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    Some(AffineFit { intercept, slope, sse })
}

/// Fit `y ≈ a + b / x`; returns `(a, b)`.
pub fn inverse_tail(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let inv: Vec<f64> = xs.iter().map(|x| 1.0 / x).collect();
    affine(&inv, ys).map(|f| (f.intercept, f.slope))
}

/// Slope of `log y` against `log x`, over strictly positive pairs only.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .unzip();
    affine(&lx, &ly).map(|f| f.slope)
}

/// Second half of a sequence (at least `min_len` trailing items when available).
pub fn tail<T>(items: &[T], min_len: usize) -> &[T] {
    let half = items.len() / 2;
    let len = (items.len() - half).max(min_len.min(items.len()));
    &items[items.len() - len..]
}
