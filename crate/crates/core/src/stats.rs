//! Ordinary least squares on a line.

/// Fit y ≈ slope·x + intercept. Returns (slope, intercept, slope standard
/// error, max |residual|), or None when the x values do not spread.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if !(sxx > 1e-300) {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let resid: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| y - slope * x - intercept).collect();
    let max_resid = resid.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let stderr = if n > 2 { (resid.iter().map(|r| r * r).sum::<f64>() / ((nf - 2.0) * sxx)).sqrt() } else { 0.0 };
    Some((slope, intercept, stderr, max_resid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let xs = [0.0, 1.0, 2.0, 5.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        let (s, i, e, r) = linear_fit(&xs, &ys).unwrap();
        assert!((s - 3.0).abs() < 1e-14 && (i + 1.0).abs() < 1e-14 && e < 1e-14 && r < 1e-14);
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 2.0]).is_none());
    }
}
