//! Signal analysis for sampled observables: dominant frequency and envelope decay.

use crate::error::{Error, Result};

fn polyfit_residual(t: &[f64], y: &[f64], degree: usize) -> Result<Vec<f64>> {
    use ndarray::{Array1, Array2};
    use ndarray_linalg::LeastSquaresSvd;
    let n = t.len();
    let (t0, t1) = (t[0], t[n - 1]);
    let span = (t1 - t0).max(f64::MIN_POSITIVE);
    let x: Vec<f64> = t.iter().map(|&v| 2.0 * (v - t0) / span - 1.0).collect();
    let a = Array2::from_shape_fn((n, degree + 1), |(i, k)| x[i].powi(k as i32));
    let b = Array1::from(y.to_vec());
    let c = a.least_squares(&b).map_err(|e| Error::Linalg(e.to_string()))?.solution;
    Ok((0..n).map(|i| y[i] - (0..=degree).map(|k| c[k] * x[i].powi(k as i32)).sum::<f64>()).collect())
}

fn windowed_power(t: &[f64], y: &[f64], w: &[f64], omega: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for i in 0..t.len() {
        let (s, c) = (omega * t[i]).sin_cos();
        re += w[i] * y[i] * c;
        im += w[i] * y[i] * s;
    }
    re * re + im * im
}

/// Angular frequency of the strongest oscillation after removing a cubic trend.
///
/// Scans a Hann-windowed periodogram on a grid four times finer than the natural
/// resolution up to `omega_max`, then refines the peak by golden-section search.
pub fn dominant_frequency(t: &[f64], y: &[f64], omega_max: f64) -> Result<f64> {
    if t.len() != y.len() || t.len() < 8 {
        return Err(Error::InvalidParameter("need at least 8 matching samples".into()));
    }
    let r = polyfit_residual(t, y, 3)?;
    let n = t.len();
    let w: Vec<f64> = (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64).cos())
        .collect();
    let span = t[n - 1] - t[0];
    let step = 2.0 * std::f64::consts::PI / span / 4.0;
    let m = (omega_max / step).ceil() as usize;
    let mut best = (0.0, -1.0);
    // skip the lowest bins, which carry the leftover trend
    for k in 4..=m {
        let om = k as f64 * step;
        let p = windowed_power(t, &r, &w, om);
        if p > best.1 {
            best = (om, p);
        }
    }
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if windowed_power(t, &r, &w, c) > windowed_power(t, &r, &w, d) {
            b = d;
        } else {
            a = c;
        }
    }
    Ok(0.5 * (a + b))
}

/// Exponential decay rate of the oscillation amplitude at angular frequency `omega`.
///
/// The signal is split into windows of one period; in each, `y ~ a + b t + c cos + s sin`
/// is fitted and the amplitude `hypot(c, s)` recorded. The rate is minus the slope of a
/// linear fit to the log-amplitudes.
pub fn envelope_decay_rate(t: &[f64], y: &[f64], omega: f64) -> Result<f64> {
    let (_, amps) = envelope(t, y, omega)?;
    let (tc, la): (Vec<f64>, Vec<f64>) = amps.iter().filter(|(_, a)| *a > 0.0).map(|&(t, a)| (t, a.ln())).unzip();
    if tc.len() < 3 {
        return Err(Error::InvalidParameter("too few periods for an envelope fit".into()));
    }
    let n = tc.len() as f64;
    let mt = tc.iter().sum::<f64>() / n;
    let ml = la.iter().sum::<f64>() / n;
    let cov: f64 = tc.iter().zip(&la).map(|(a, b)| (a - mt) * (b - ml)).sum();
    let var: f64 = tc.iter().map(|a| (a - mt).powi(2)).sum();
    Ok(-cov / var)
}

/// Window centers and fitted amplitudes used by [`envelope_decay_rate`].
pub fn envelope(t: &[f64], y: &[f64], omega: f64) -> Result<(f64, Vec<(f64, f64)>)> {
    use ndarray::{Array1, Array2};
    use ndarray_linalg::LeastSquaresSvd;
    if t.len() != y.len() || t.is_empty() || !(omega > 0.0) {
        return Err(Error::InvalidParameter("invalid envelope input".into()));
    }
    let period = 2.0 * std::f64::consts::PI / omega;
    let mut out = Vec::new();
    let mut start = t[0];
    let end = t[t.len() - 1];
    while start + period <= end {
        let idx: Vec<usize> = (0..t.len()).filter(|&i| t[i] >= start && t[i] < start + period).collect();
        if idx.len() >= 6 {
            let a = Array2::from_shape_fn((idx.len(), 4), |(r, c)| {
                let tt = t[idx[r]];
                match c {
                    0 => 1.0,
                    1 => (tt - start) / period,
                    2 => (omega * tt).cos(),
                    _ => (omega * tt).sin(),
                }
            });
            let b = Array1::from_iter(idx.iter().map(|&i| y[i]));
            let c = a.least_squares(&b).map_err(|e| Error::Linalg(e.to_string()))?.solution;
            out.push((start + 0.5 * period, c[2].hypot(c[3])));
        }
        start += period;
    }
    Ok((period, out))
}
