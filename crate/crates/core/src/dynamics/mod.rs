//! Time evolution, steady states, thermal states and correlation functions.

pub mod rk45;

use std::collections::HashMap;

use ndarray::{Array1, Array2};
use ndarray_linalg::{Factorize, ReciprocalConditionNum, Solve};

use crate::dressed::DressedLadder;
use crate::error::{Error, Result};
use crate::linalg::{self, eigh, expectation, gemm, max_abs, EigenSystem, Op, Operator, C64, I, ONE, ZERO};
use crate::models::Drive;
use crate::superop::{unvec_col, vec_col, Superoperator};

pub use rk45::{Dopri5Options, Dopri5Stats};

/// Trace drift beyond this aborts a propagation.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Keep full density matrices (bare basis) at every sample.
    pub store_states: bool,
    /// Largest Liouville-space dimension for which drive-free intervals use a dense propagator.
    pub expm_max_dim: usize,
    pub max_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { rtol: 1e-8, atol: 1e-10, store_states: false, expm_max_dim: 1200, max_steps: 50_000_000 }
    }
}

#[derive(Clone, Debug)]
pub enum ObservableKind {
    /// `Re Tr(O rho)`.
    Expectation(Operator),
    /// `<M M P P>` and `<M P>`; normalized gives `<MMPP> / <MP>^2`.
    Correlation { pair: Operator, number: Operator, normalized: bool },
    /// Smallest eigenvalue of the density matrix.
    MinEigenvalue,
}

#[derive(Clone, Debug)]
pub struct Observable {
    pub name: String,
    pub kind: ObservableKind,
}

impl Observable {
    pub fn expectation(name: impl Into<String>, op: Operator) -> Self {
        Observable { name: name.into(), kind: ObservableKind::Expectation(op) }
    }

    pub fn number(name: impl Into<String>, ladder: &DressedLadder) -> Self {
        Self::expectation(name, ladder.number())
    }

    /// Unnormalized `<M M P P>`.
    pub fn pair_correlation(name: impl Into<String>, ladder: &DressedLadder) -> Self {
        Observable {
            name: name.into(),
            kind: ObservableKind::Correlation { pair: ladder.pair_number(), number: ladder.number(), normalized: false },
        }
    }

    /// Normalized `g2(t, t)`; NaN where `<M P>` is below 1e-12.
    pub fn g2(name: impl Into<String>, ladder: &DressedLadder) -> Self {
        Observable {
            name: name.into(),
            kind: ObservableKind::Correlation { pair: ladder.pair_number(), number: ladder.number(), normalized: true },
        }
    }

    pub fn min_eigenvalue(name: impl Into<String>) -> Self {
        Observable { name: name.into(), kind: ObservableKind::MinEigenvalue }
    }

    fn to_frame(&self, l: &Superoperator) -> Observable {
        let kind = match &self.kind {
            ObservableKind::Expectation(o) => ObservableKind::Expectation(l.to_native(o)),
            ObservableKind::Correlation { pair, number, normalized } => ObservableKind::Correlation {
                pair: l.to_native(pair),
                number: l.to_native(number),
                normalized: *normalized,
            },
            ObservableKind::MinEigenvalue => ObservableKind::MinEigenvalue,
        };
        Observable { name: self.name.clone(), kind }
    }

    fn evaluate(&self, rho: &Operator) -> Result<f64> {
        Ok(match &self.kind {
            ObservableKind::Expectation(o) => expectation(o, rho)?.re,
            ObservableKind::Correlation { pair, number, normalized } => {
                let g = expectation(pair, rho)?.re;
                if *normalized {
                    let n = expectation(number, rho)?.re;
                    if n.abs() > 1e-12 {
                        g / (n * n)
                    } else {
                        f64::NAN
                    }
                } else {
                    g
                }
            }
            ObservableKind::MinEigenvalue => linalg::min_eigenvalue(rho)?,
        })
    }
}

#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct PropagationStats {
    pub rk: Dopri5Stats,
    pub propagator_builds: usize,
    pub propagator_steps: usize,
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub names: Vec<String>,
    pub series: Vec<Vec<f64>>,
    pub states: Option<Vec<Operator>>,
    pub stats: PropagationStats,
}

impl Trajectory {
    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.names.iter().position(|n| n == name).map(|i| self.series[i].as_slice())
    }
}

/// The dissipator moved to the frame in which propagation happens: its own frame when it
/// has elementwise terms, otherwise the eigenbasis of `h`.
fn working_superop(h: &Operator, diss: &Superoperator) -> Result<Superoperator> {
    if diss.frame().is_some() || diss.sparse_len() > 0 {
        return Ok(diss.clone());
    }
    let eig = eigh(h)?;
    diss.reframe(Some(&eig.vectors))
}

fn check_state(rho: &Operator, d: usize) -> Result<()> {
    if rho.dim() != (d, d) {
        return Err(Error::DimensionMismatch { expected: d, found: rho.nrows() });
    }
    let herm = linalg::hermitian_deviation(rho);
    if herm > 1e-10 {
        return Err(Error::InvalidParameter(format!("initial state is not Hermitian (deviation {herm:e})")));
    }
    let tr = linalg::trace(rho);
    if (tr - ONE).norm() > 1e-10 {
        return Err(Error::InvalidParameter(format!("initial state has trace {tr}")));
    }
    let min = linalg::min_eigenvalue(rho)?;
    if min < -1e-10 {
        return Err(Error::InvalidParameter(format!("initial state is not positive (eigenvalue {min:e})")));
    }
    Ok(())
}

/// `-i [H, .]` as a dense column-stacked matrix.
fn coherent_matrix(h: &Operator) -> Array2<C64> {
    let d = h.nrows();
    let mut m = Array2::zeros((d * d, d * d));
    for c in 0..d {
        for r in 0..d {
            for k in 0..d {
                // -i H rho
                m[[r + c * d, k + c * d]] += -I * h[[r, k]];
                // +i rho H
                m[[r + c * d, r + k * d]] += I * h[[k, c]];
            }
        }
    }
    m
}

/// Full generator (dissipator plus `-i[H, .]`) as a dense matrix in the frame of `l`.
pub fn liouvillian_matrix(h: &Operator, l: &Superoperator) -> Array2<C64> {
    let mut m = l.to_matrix_native();
    m += &coherent_matrix(&l.to_native(h));
    m
}

struct Recorder<'a> {
    obs: Vec<Observable>,
    frame: &'a Superoperator,
    times: &'a [f64],
    series: Vec<Vec<f64>>,
    states: Option<Vec<Operator>>,
    stats: PropagationStats,
}

impl Recorder<'_> {
    fn record(&mut self, i: usize, rho: &Operator) -> Result<()> {
        let t = self.times[i];
        let tr = linalg::trace(rho);
        let terr = (tr - ONE).norm();
        if !(terr <= TRACE_DRIFT_LIMIT) {
            return Err(Error::TraceDrift { t, trace: tr.re });
        }
        self.stats.max_trace_error = self.stats.max_trace_error.max(terr);
        self.stats.max_hermiticity_error =
            self.stats.max_hermiticity_error.max(linalg::hermitian_deviation(rho));
        for (k, o) in self.obs.iter().enumerate() {
            self.series[k][i] = o.evaluate(rho)?;
        }
        if let Some(s) = &mut self.states {
            s[i] = self.frame.from_native(rho);
        }
        Ok(())
    }
}

/// Propagates `rho0` under `-i[h_static + H_drive(t), rho] + L rho` and records observables on `grid`.
///
/// Drive-dependent intervals use adaptive Dormand-Prince integration in the interaction
/// picture of the diagonal of `h_static` (in the dissipator frame); drive-free intervals use
/// a dense propagator when the Liouville space is small enough.
pub fn propagate(
    h_static: &Operator,
    drive: Option<&Drive>,
    diss: &Superoperator,
    rho0: &Operator,
    grid: &[f64],
    opts: &SolverOptions,
    observables: &[Observable],
) -> Result<Trajectory> {
    let d = diss.dim();
    linalg::check_square(&h_static.view())?;
    if h_static.nrows() != d {
        return Err(Error::DimensionMismatch { expected: d, found: h_static.nrows() });
    }
    check_state(rho0, d)?;
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) || !grid[0].is_finite() {
        return Err(Error::InvalidParameter("time grid must be non-empty and strictly ascending".into()));
    }
    if let Some(dr) = drive {
        if dr.op.dim() != (d, d) {
            return Err(Error::DimensionMismatch { expected: d, found: dr.op.nrows() });
        }
    }
    let l = working_superop(h_static, diss)?;
    let obs: Vec<Observable> = observables.iter().map(|o| o.to_frame(&l)).collect();
    let mut rec = Recorder {
        obs,
        frame: &l,
        times: grid,
        series: vec![vec![f64::NAN; grid.len()]; observables.len()],
        states: if opts.store_states { Some(vec![Operator::zeros((d, d)); grid.len()]) } else { None },
        stats: PropagationStats::default(),
    };

    let use_dense = d * d <= opts.expm_max_dim;
    let t0 = grid[0];
    let t_last = *grid.last().unwrap();
    // index of the first sample handled by the dense propagator
    let split = if !use_dense {
        grid.len()
    } else {
        match drive {
            None => 0,
            Some(dr) => {
                let (_, end) = dr.active_window();
                if end <= t0 {
                    0
                } else if end >= t_last {
                    grid.len()
                } else {
                    grid.iter().position(|&t| t >= end).unwrap_or(grid.len())
                }
            }
        }
    };

    let mut rho = l.to_native(rho0);
    let mut t_cur = t0;
    if split > 0 {
        let (y, st) = integrate_rk(h_static, drive, &l, &rho, t0, &grid[..split], opts, &mut rec)?;
        rec.stats.rk = st;
        rho = y;
        t_cur = grid[split - 1];
    }
    if split < grid.len() {
        let m = liouvillian_matrix(h_static, &l);
        let mut cache: HashMap<u64, Array2<C64>> = HashMap::new();
        let mut v = vec_col(&rho);
        let mut i = split;
        if i == 0 {
            rec.record(0, &rho)?;
            i = 1;
        }
        while i < grid.len() {
            let dt = grid[i] - t_cur;
            let key = dt.to_bits();
            if !cache.contains_key(&key) {
                if cache.len() > 8 {
                    cache.clear();
                }
                let p = linalg::expm(&m.mapv(|x| x * dt))?;
                rec.stats.propagator_builds += 1;
                cache.insert(key, p);
            }
            v = cache[&key].dot(&v);
            rec.stats.propagator_steps += 1;
            let r = unvec_col(&v, d);
            rec.record(i, &r)?;
            t_cur = grid[i];
            i += 1;
        }
    }
    Ok(Trajectory {
        times: grid.to_vec(),
        names: observables.iter().map(|o| o.name.clone()).collect(),
        series: rec.series,
        states: rec.states,
        stats: rec.stats,
    })
}

fn phases(e: &Array1<f64>, t: f64) -> Vec<C64> {
    e.iter().map(|&x| C64::from_polar(1.0, -x * t)).collect()
}

/// `rho_ij * u_i * conj(u_j)` (or the inverse rotation when `inverse`).
fn rotate(src: &[C64], dst: &mut [C64], u: &[C64], inverse: bool) {
    let d = u.len();
    for i in 0..d {
        for j in 0..d {
            let f = if inverse { u[i].conj() * u[j] } else { u[i] * u[j].conj() };
            dst[i * d + j] = src[i * d + j] * f;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn integrate_rk(
    h: &Operator,
    drive: Option<&Drive>,
    l: &Superoperator,
    rho: &Operator,
    t0: f64,
    samples: &[f64],
    opts: &SolverOptions,
    rec: &mut Recorder,
) -> Result<(Operator, Dopri5Stats)> {
    let d = l.dim();
    let hn = l.to_native(h);
    let e_min = (0..d).map(|k| hn[[k, k]].re).fold(f64::INFINITY, f64::min);
    let e = Array1::from_iter((0..d).map(|k| hn[[k, k]].re - e_min));
    let mut h_off = hn.clone();
    for k in 0..d {
        h_off[[k, k]] = ZERO;
    }
    let off_scale = e.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let h_off = if max_abs(&h_off) > 1e-13 * off_scale { Some(h_off) } else { None };
    let drive_ops: Vec<Operator> = drive.map(|dr| dr.components().iter().map(|o| l.to_native(o)).collect()).unwrap_or_default();
    let h_max = match drive.map(|dr| dr.kind) {
        Some(crate::models::DriveKind::GaussianPulse { width, .. }) => width,
        _ => f64::INFINITY,
    };

    let mut rho_s = Operator::zeros((d, d));
    let mut out = Operator::zeros((d, d));
    let mut scratch = Operator::zeros((d, d));
    let mut hc = Operator::zeros((d, d));
    let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
        let u = phases(&e, t);
        rotate(y, rho_s.as_slice_mut().unwrap(), &u, false);
        l.apply_native_into(&rho_s, &mut out, &mut scratch);
        let mut coherent = false;
        if let Some(ho) = &h_off {
            hc.assign(ho);
            coherent = true;
        } else {
            hc.fill(ZERO);
        }
        if let Some(dr) = drive {
            for (c, o) in dr.coefficients(t).into_iter().zip(&drive_ops) {
                if c != ZERO {
                    hc.scaled_add(c, o);
                    coherent = true;
                }
            }
        }
        if coherent {
            // out += -i (hc rho - rho hc)
            gemm(-I, &hc.view(), Op::N, &rho_s.view(), Op::N, ONE, &mut out);
            gemm(I, &rho_s.view(), Op::N, &hc.view(), Op::N, ONE, &mut out);
        }
        rotate(out.as_slice().unwrap(), dy, &u, true);
    };
    let mut y0 = vec![ZERO; d * d];
    let rs = rho.as_standard_layout();
    rotate(rs.as_slice().unwrap(), &mut y0, &phases(&e, t0), true);
    let rk_opts = Dopri5Options { rtol: opts.rtol, atol: opts.atol, h_max, max_steps: opts.max_steps };
    let mut buf = Operator::zeros((d, d));
    let (y, stats) = rk45::integrate(rhs, t0, &y0, samples, &rk_opts, |i, t, y| {
        rotate(y, buf.as_slice_mut().unwrap(), &phases(&e, t), false);
        rec.record(i, &buf)
    })?;
    let t_end = *samples.last().unwrap();
    let mut r = Operator::zeros((d, d));
    rotate(&y, r.as_slice_mut().unwrap(), &phases(&e, t_end), false);
    Ok((r, stats))
}

/// Reciprocal condition number below which the steady-state system is rejected.
pub const STEADY_RCOND_MIN: f64 = 1e-13;

/// Unit-trace kernel of `-i[h, .] + L`, Hermitized, in the bare basis.
///
/// The first equation of the linear system is replaced by the trace condition and the
/// system is solved by LU; a near-singular result means the kernel is not one-dimensional.
pub fn steady_state(h: &Operator, diss: &Superoperator) -> Result<Operator> {
    let d = diss.dim();
    if h.dim() != (d, d) {
        return Err(Error::DimensionMismatch { expected: d, found: h.nrows() });
    }
    let l = working_superop(h, diss)?;
    let mut m = liouvillian_matrix(h, &l);
    m.row_mut(0).fill(ZERO);
    for k in 0..d {
        m[[0, k + k * d]] = ONE;
    }
    let mut rhs = Array1::zeros(d * d);
    rhs[0] = ONE;
    // an exactly singular pivot makes getrf fail before the condition estimate
    let lu = m.factorize().map_err(|_| Error::DegenerateKernel { rcond: 0.0 })?;
    let rcond = lu.rcond()?;
    if !(rcond >= STEADY_RCOND_MIN) {
        return Err(Error::DegenerateKernel { rcond });
    }
    let x = lu.solve(&rhs)?;
    let rho_n = unvec_col(&x, d);
    let rho = linalg::hermitize(&l.from_native(&rho_n));
    let tr = linalg::trace(&rho).re;
    Ok(rho.mapv(|v| v / tr))
}

/// `max |(L + coherent) rho|` relative to the largest generator entry.
pub fn steady_residual(h: &Operator, diss: &Superoperator, rho: &Operator) -> Result<(f64, f64)> {
    let l = working_superop(h, diss)?;
    let m = liouvillian_matrix(h, &l);
    let r = m.dot(&vec_col(&l.to_native(rho)));
    Ok((r.iter().fold(0.0, |a, x| a.max(x.norm())), max_abs(&m)))
}

/// `exp(-H/T)/Z`; the ground-state projector at `T = 0`.
pub fn gibbs_state(h: &Operator, temperature: f64) -> Result<Operator> {
    if !(temperature >= 0.0) {
        return Err(Error::InvalidParameter(format!("temperature must be non-negative, got {temperature}")));
    }
    let eig = eigh(h)?;
    Ok(gibbs_from_eigen(&eig, temperature))
}

pub fn gibbs_from_eigen(eig: &EigenSystem, temperature: f64) -> Operator {
    let d = eig.dim();
    let e0 = eig.energies[0];
    let w: Vec<f64> = if temperature == 0.0 {
        (0..d).map(|k| if k == 0 { 1.0 } else { 0.0 }).collect()
    } else {
        eig.energies.iter().map(|&e| (-(e - e0) / temperature).exp()).collect()
    };
    let z: f64 = w.iter().sum();
    let diag = Array2::from_diag(&Array1::from_iter(w.iter().map(|x| C64::new(x / z, 0.0))));
    linalg::hermitize(&linalg::from_basis(&diag, &eig.vectors))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct G2 {
    /// `<M M P P>`.
    pub unnormalized: f64,
    /// `<M M P P> / <M P>^2`, absent when `<M P>` is below 1e-12.
    pub normalized: Option<f64>,
}

/// Equal-time second-order correlation of the mode with lowering part `plus`.
pub fn g2_equal_time(minus: &Operator, plus: &Operator, rho: &Operator) -> Result<G2> {
    let dev = max_abs(&(&linalg::adjoint(minus) - plus));
    if dev > 1e-12 * max_abs(plus).max(1.0) {
        return Err(Error::InvalidParameter(format!("plus is not the adjoint of minus (deviation {dev:e})")));
    }
    let mm = linalg::matmul(minus, minus);
    let pp = linalg::matmul(plus, plus);
    let g = expectation(&linalg::matmul(&mm, &pp), rho)?.re;
    let n = expectation(&linalg::matmul(minus, plus), rho)?.re;
    Ok(G2 { unnormalized: g, normalized: if n.abs() > 1e-12 { Some(g / (n * n)) } else { None } })
}
