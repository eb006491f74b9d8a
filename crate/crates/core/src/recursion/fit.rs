use crate::{Error, Result};

/// Least-squares line through `(ln t, ln μ_t)` over a window of steps.
#[derive(Clone, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (usize, usize),
}

impl RateFit {
    /// Fitted value `e^{intercept} t^{slope}`.
    pub fn predict(&self, t: f64) -> f64 {
        (self.intercept + self.slope * t.ln()).exp()
    }
}

/// The last two decades of a run of `steps` steps: `[steps/100, steps]`.
pub fn default_window(steps: usize) -> (usize, usize) {
    ((steps / 100).max(1), steps)
}

/// Fits `ln μ_t = intercept + slope · ln t` for `t` in `window` (inclusive).
pub fn fit_loglog(trace: &[f64], window: (usize, usize)) -> Result<RateFit> {
    let (lo, hi) = window;
    if lo == 0 {
        return Err(Error::InvalidWindow("window must start at t >= 1".into()));
    }
    if lo >= hi {
        return Err(Error::InvalidWindow(format!("empty window [{lo}, {hi}]")));
    }
    if hi >= trace.len() {
        return Err(Error::InvalidWindow(format!(
            "window end {hi} beyond trace of length {}",
            trace.len()
        )));
    }
    if let Some(t) = (lo..=hi).find(|&t| !(trace[t] > 0.0 && trace[t].is_finite())) {
        return Err(Error::InvalidWindow(format!(
            "value {} at t = {t} is not positive",
            trace[t]
        )));
    }
    let n = (hi - lo + 1) as f64;
    let xs = || (lo..=hi).map(|t| (t as f64).ln());
    // Shifting by the first value keeps a constant trace exactly flat.
    let y0 = trace[lo].ln();
    let ys = || (lo..=hi).map(|t| trace[t].ln() - y0);
    let mx = xs().sum::<f64>() / n;
    let my = ys().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs().zip(ys()) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = y0 + my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_power_law() {
        let trace: Vec<f64> = (0..2000)
            .map(|t| 3.0 * (t.max(1) as f64).powf(-0.75))
            .collect();
        let f = fit_loglog(&trace, (10, 1999)).unwrap();
        assert_relative_eq!(f.slope, -0.75, epsilon = 1e-10);
        assert_relative_eq!(f.intercept, 3f64.ln(), epsilon = 1e-9);
        assert_relative_eq!(f.r_squared, 1.0, epsilon = 1e-12);
        assert_relative_eq!(f.predict(100.0), trace[100], max_relative = 1e-9);
    }

    #[test]
    fn constant_trace() {
        let f = fit_loglog(&[2.0; 50], (1, 49)).unwrap();
        assert_eq!(f.slope, 0.0);
        assert_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn bad_windows() {
        let trace = [1.0, 0.5, 0.0, 0.25];
        assert!(matches!(
            fit_loglog(&trace, (0, 3)),
            Err(Error::InvalidWindow(_))
        ));
        assert!(matches!(
            fit_loglog(&trace, (1, 3)),
            Err(Error::InvalidWindow(_))
        ));
        assert!(matches!(
            fit_loglog(&trace, (1, 9)),
            Err(Error::InvalidWindow(_))
        ));
        assert!(matches!(
            fit_loglog(&trace, (3, 3)),
            Err(Error::InvalidWindow(_))
        ));
        assert_eq!(default_window(100_000), (1000, 100_000));
        assert_eq!(default_window(50), (1, 50));
    }
}
