//! Dormand-Prince 5(4) with continuous output for complex state vectors.

use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Clone, Copy, Debug)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Dopri5Options { rtol: 1e-8, atol: 1e-10, h_max: f64::INFINITY, max_steps: 10_000_000 }
    }
}

#[derive(Clone, Copy, Debug, Default, serde::Serialize)]
pub struct Dopri5Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn combo(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for i in 0..y.len() {
        let mut acc = C64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        out[i] = y[i] + acc * h;
    }
}

fn err_norm(e: &[C64], y0: &[C64], y1: &[C64], rtol: f64, atol: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..e.len() {
        let sc = atol + rtol * y0[i].norm().max(y1[i].norm());
        let r = e[i].norm() / sc;
        s += r * r;
    }
    (s / e.len().max(1) as f64).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0` and calls `sample(i, t_out[i], y)` at every output time.
///
/// `t_out` must be ascending and not precede `t0`. Output values between steps come
/// from the fourth-order continuous extension.
pub fn integrate<F, S>(
    mut f: F,
    t0: f64,
    y0: &[C64],
    t_out: &[f64],
    opts: &Dopri5Options,
    mut sample: S,
) -> Result<(Vec<C64>, Dopri5Stats)>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    S: FnMut(usize, f64, &[C64]) -> Result<()>,
{
    let n = y0.len();
    let mut stats = Dopri5Stats::default();
    let mut y = y0.to_vec();
    let mut next = 0;
    while next < t_out.len() && t_out[next] <= t0 {
        sample(next, t_out[next], &y)?;
        next += 1;
    }
    let Some(&t_end) = t_out.last() else {
        return Ok((y, stats));
    };
    if next == t_out.len() {
        return Ok((y, stats));
    }
    let mut k1 = vec![C64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut k5 = k1.clone();
    let mut k6 = k1.clone();
    let mut k7 = k1.clone();
    let mut ytmp = k1.clone();
    let mut ynew = k1.clone();
    let mut err = k1.clone();
    let mut dense = [k1.clone(), k1.clone(), k1.clone(), k1.clone(), k1.clone()];
    let mut yint = k1.clone();

    let mut t = t0;
    f(t, &y, &mut k1);
    stats.evaluations += 1;

    // initial step size
    let scale: Vec<f64> = y.iter().map(|v| opts.atol + opts.rtol * v.norm()).collect();
    let d0 = (y.iter().zip(&scale).map(|(v, s)| (v.norm() / s).powi(2)).sum::<f64>() / n as f64).sqrt();
    let d1 = (k1.iter().zip(&scale).map(|(v, s)| (v.norm() / s).powi(2)).sum::<f64>() / n as f64).sqrt();
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(opts.h_max).min(t_end - t);
    combo(&mut ytmp, &y, h, &[(1.0, &k1)]);
    f(t + h, &ytmp, &mut k2);
    stats.evaluations += 1;
    let d2 = (k2.iter().zip(&k1).zip(&scale).map(|((a, b), s)| ((a - b).norm() / s).powi(2)).sum::<f64>()
        / n as f64)
        .sqrt()
        / h;
    let h1 = if d1.max(d2) <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    h = (100.0 * h).min(h1).min(opts.h_max).min(t_end - t);

    let mut last_rejected = false;
    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::StepUnderflow { t });
        }
        if h < 1e-13 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        combo(&mut ytmp, &y, h, &[(A21, &k1)]);
        f(t + C2 * h, &ytmp, &mut k2);
        combo(&mut ytmp, &y, h, &[(A31, &k1), (A32, &k2)]);
        f(t + C3 * h, &ytmp, &mut k3);
        combo(&mut ytmp, &y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        f(t + C4 * h, &ytmp, &mut k4);
        combo(&mut ytmp, &y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        f(t + C5 * h, &ytmp, &mut k5);
        combo(&mut ytmp, &y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        f(t + h, &ytmp, &mut k6);
        combo(&mut ynew, &y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let t_new = if last { t_end } else { t + h };
        f(t_new, &ynew, &mut k7);
        stats.evaluations += 6;
        for i in 0..n {
            err[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
        }
        let en = err_norm(&err, &y, &ynew, opts.rtol, opts.atol);
        if !en.is_finite() {
            stats.rejected += 1;
            h *= 0.2;
            last_rejected = true;
            continue;
        }
        if en <= 1.0 {
            stats.accepted += 1;
            for i in 0..n {
                let ydiff = ynew[i] - y[i];
                let bspl = k1[i] * h - ydiff;
                dense[0][i] = y[i];
                dense[1][i] = ydiff;
                dense[2][i] = bspl;
                dense[3][i] = ydiff - k7[i] * h - bspl;
                dense[4][i] =
                    (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h;
            }
            while next < t_out.len() && t_out[next] <= t_new {
                let ts = t_out[next];
                if ts == t_new {
                    sample(next, ts, &ynew)?;
                } else {
                    let th = (ts - t) / h;
                    let th1 = 1.0 - th;
                    for i in 0..n {
                        yint[i] = dense[0][i]
                            + (dense[1][i] + (dense[2][i] + (dense[3][i] + dense[4][i] * th1) * th) * th1) * th;
                    }
                    sample(next, ts, &yint)?;
                }
                next += 1;
            }
            t = t_new;
            std::mem::swap(&mut y, &mut ynew);
            std::mem::swap(&mut k1, &mut k7);
            if last || next >= t_out.len() {
                return Ok((y, stats));
            }
            let mut fac = 0.9 * en.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, if last_rejected { 1.0 } else { 10.0 });
            h = (h * fac).min(opts.h_max);
            last_rejected = false;
        } else {
            stats.rejected += 1;
            h *= (0.9 * en.powf(-0.2)).max(0.2);
            last_rejected = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotating_phase_with_dense_output() {
        let w = 3.0;
        let g = 0.1;
        let times: Vec<f64> = (0..=200).map(|i| i as f64 * 0.173).collect();
        let mut max_err: f64 = 0.0;
        let opts = Dopri5Options { rtol: 1e-10, atol: 1e-12, ..Default::default() };
        integrate(
            |_, y, dy| dy[0] = C64::new(-g, -w) * y[0],
            0.0,
            &[C64::new(1.0, 0.0)],
            &times,
            &opts,
            |_, t, y| {
                let exact = C64::new(-g * t, -w * t).exp();
                max_err = max_err.max((y[0] - exact).norm());
                Ok(())
            },
        )
        .unwrap();
        assert!(max_err < 1e-8, "max error {max_err}");
    }

    #[test]
    fn time_dependent_rhs() {
        // y' = cos(t) y  =>  y = exp(sin t)
        let times: Vec<f64> = (0..=50).map(|i| 0.5 + i as f64 * 0.4).collect();
        let opts = Dopri5Options::default();
        let (_, stats) = integrate(
            |t, y, dy| dy[0] = y[0] * t.cos(),
            0.5,
            &[C64::new(0.5f64.sin().exp(), 0.0)],
            &times,
            &opts,
            |_, t, y| {
                assert!((y[0].re - t.sin().exp()).abs() < 1e-7);
                Ok(())
            },
        )
        .unwrap();
        assert!(stats.accepted > 0);
    }
}
