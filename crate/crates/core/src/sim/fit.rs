use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Points before this time are skipped (lets faster modes die out).
    pub min_time: f64,
    /// Window stops at the first point whose deviation is within this many CIs.
    pub ci_factor: f64,
    pub min_points: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { min_time: 0.0, ci_factor: 3.0, min_points: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub rate: f64,
    pub stderr: f64,
    pub points: usize,
}

/// Least-squares slope of log|value − asymptote| against time.
///
/// The window is the contiguous run starting at the first time ≥ `min_time`
/// and ending before the deviation first drops to `ci_factor`·CI or below.
/// Pass `None` for `ci` with noise-free data.
pub fn fit_exponential_rate(
    times: &[f64],
    values: &[f64],
    ci: Option<&[f64]>,
    asymptote: f64,
    opts: &FitOptions,
) -> Result<RateFit> {
    if times.len() != values.len() || ci.is_some_and(|c| c.len() != times.len()) {
        return Err(Error::InvalidInput("series lengths differ".into()));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(values)
        .enumerate()
        .skip_while(|(_, (t, _))| **t < opts.min_time)
        .map(|(k, (&t, &v))| (t, v - asymptote, ci.map_or(0.0, |c| c[k])))
        .take_while(|&(_, dev, half)| dev != 0.0 && dev.abs() > opts.ci_factor * half)
        .map(|(t, dev, _)| (t, dev.abs().ln()))
        .unzip();

    let required = opts.min_points.max(3);
    if xs.len() < required {
        return Err(Error::InsufficientSignal { points: xs.len(), required });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (sse / (n - 2.0) / sxx).sqrt();
    Ok(RateFit { rate: -slope, stderr, points: xs.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential() {
        let ts: Vec<f64> = (0..20).map(|k| 0.3 * k as f64).collect();
        let vs: Vec<f64> = ts.iter().map(|t| 2.5 * (-0.7 * t).exp() + 1.0).collect();
        let fit = fit_exponential_rate(&ts, &vs, None, 1.0, &FitOptions::default()).unwrap();
        assert!((fit.rate - 0.7).abs() < 1e-10);
        assert_eq!(fit.points, 20);
        assert!(fit.stderr < 1e-10);
    }

    #[test]
    fn decaying_from_below() {
        let ts: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let vs: Vec<f64> = ts.iter().map(|t| 5.0 - 3.0 * (-0.2 * t).exp()).collect();
        let fit = fit_exponential_rate(&ts, &vs, None, 5.0, &FitOptions::default()).unwrap();
        assert!((fit.rate - 0.2).abs() < 1e-10);
    }

    #[test]
    fn window_stops_at_noise_floor() {
        let ts: Vec<f64> = (0..20).map(|k| k as f64).collect();
        let vs: Vec<f64> = ts.iter().map(|t| (-t).exp()).collect();
        let ci = vec![1e-4; 20];
        let fit = fit_exponential_rate(&ts, &vs, Some(&ci), 0.0, &FitOptions::default()).unwrap();
        // e^{-t} > 3e-4 up to t = 8
        assert_eq!(fit.points, 9);
    }

    #[test]
    fn insufficient_signal() {
        let ts = [0.0, 1.0, 2.0, 3.0];
        let vs = [1.0, 0.5, 0.25, 0.125];
        assert!(matches!(
            fit_exponential_rate(&ts, &vs, None, 0.0, &FitOptions::default()),
            Err(Error::InsufficientSignal { points: 4, .. })
        ));
        let flat = [0.0; 4];
        assert!(fit_exponential_rate(&ts, &flat, None, 0.0, &FitOptions::default()).is_err());
    }
}
