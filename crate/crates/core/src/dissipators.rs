//! Standard, dressed-secular and generalized dressed dissipators.

use ndarray::Array2;

use crate::baths::{dephasing_rate, emission_absorption, thermal_n, BathSpec, FilterSpec};
use crate::dressed::TransitionTable;
use crate::error::{Error, Result};
use crate::linalg::{adjoint, check_square, matmul, EigenSystem, Operator, C64, ZERO};
use crate::superop::{SparseBuilder, Superoperator};

/// Which terms of the generalized dissipator are kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GmeMode {
    /// Pairs of positive-frequency transitions plus zero-frequency dephasing.
    #[default]
    Reduced,
    /// Every signed frequency pair, including the `S+S+`, `S-S-` and `S+-S0` classes.
    Full,
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn scaled(a: &Operator, s: f64) -> Operator {
    a.mapv(|x| x * s)
}

/// Bare-basis Lindblad dissipator `sum gamma (1 + n) D[s] + gamma n D[s^dag]`.
///
/// `omega0` is the bare frequency of `s`; it only enters through `n(omega0, T)`.
pub fn standard_lindblad(ops: &[(Operator, BathSpec, f64)]) -> Result<Superoperator> {
    let dim = ops
        .first()
        .map(|(s, _, _)| check_square(&s.view()))
        .transpose()?
        .ok_or_else(|| Error::InvalidParameter("standard_lindblad needs at least one operator".into()))?;
    let mut l = Superoperator::zero(dim, None)?;
    for (s, bath, omega0) in ops {
        let n = check_square(&s.view())?;
        if n != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: n });
        }
        bath.validate()?;
        let nth = thermal_n(*omega0, bath.temperature)?;
        let down = bath.gamma * (1.0 + nth);
        let up = bath.gamma * nth;
        let sd = adjoint(s);
        let sds = matmul(&sd, s);
        let ssd = matmul(s, &sd);
        l.add_sandwich(s.clone(), scaled(&sd, down))?;
        if up > 0.0 {
            l.add_sandwich(sd.clone(), scaled(s, up))?;
        }
        let k = scaled(&sds, -0.5 * down) + scaled(&ssd, -0.5 * up);
        l.add_left(&k)?;
        l.add_right(&k)?;
    }
    Ok(l)
}

fn check_tables(tables: &[(&TransitionTable, &BathSpec)], eig: &EigenSystem) -> Result<()> {
    for (t, b) in tables {
        if t.dim != eig.dim() {
            return Err(Error::DimensionMismatch { expected: eig.dim(), found: t.dim });
        }
        b.validate()?;
    }
    Ok(())
}

/// Secular dressed Lindblad dissipator in the eigenbasis of `eig`.
///
/// Each positive transition `j < k` contributes `Gamma_jk (1 + n) D[|j><k|] + Gamma_jk n D[|k><j|]`
/// with `Gamma_jk = gamma Delta_jk / f |C_jk|^2`. Zero-frequency entries are ignored.
pub fn dressed_secular_lindblad(tables: &[(&TransitionTable, &BathSpec)], eig: &EigenSystem) -> Result<Superoperator> {
    check_tables(tables, eig)?;
    let d = eig.dim();
    let mut l = Superoperator::zero(d, Some(eig.vectors.clone()))?;
    let mut diag = vec![0.0; d];
    let mut sp = SparseBuilder::default();
    for (table, bath) in tables {
        for t in table.positive() {
            let (down, up) = emission_absorption(bath, t.delta);
            let w = t.element.norm_sqr();
            let (down, up) = (down * w, up * w);
            sp.push(t.j * d + t.j, t.k * d + t.k, real(down));
            diag[t.k] -= 0.5 * down;
            if up > 0.0 {
                sp.push(t.k * d + t.k, t.j * d + t.j, real(up));
                diag[t.j] -= 0.5 * up;
            }
        }
    }
    let k = Array2::from_diag(&ndarray::Array1::from_iter(diag.into_iter().map(real)));
    l.add_left(&k)?;
    l.add_right(&k)?;
    l.add_sparse(sp);
    Ok(l)
}

/// Secular dressed dissipator built in the eigenbasis of the photon-conserving
/// optomechanical Hamiltonian. Propagating it with the full Hamiltonian reproduces
/// the inconsistent-basis failure.
pub fn hu_style_optomech(eig_om: &EigenSystem, tables: &[(&TransitionTable, &BathSpec)]) -> Result<Superoperator> {
    dressed_secular_lindblad(tables, eig_om)
}

/// A signed-frequency component `c |p><q|` of `S(w)` with `w = E_q - E_p`.
#[derive(Clone, Copy, Debug)]
struct Entry {
    p: usize,
    q: usize,
    c: C64,
    w: f64,
}

fn signed_entries(table: &TransitionTable, mode: GmeMode) -> Vec<Entry> {
    let mut v = Vec::new();
    for t in &table.transitions {
        if t.is_positive() {
            v.push(Entry { p: t.j, q: t.k, c: t.element, w: t.delta });
            v.push(Entry { p: t.k, q: t.j, c: t.element.conj(), w: -t.delta });
        } else if mode == GmeMode::Full {
            v.push(Entry { p: t.j, q: t.k, c: t.element, w: 0.0 });
            if t.j != t.k {
                v.push(Entry { p: t.k, q: t.j, c: t.element.conj(), w: 0.0 });
            }
        }
    }
    v
}

/// Weighted positive-frequency sums `sum Gamma n S+(w)` and `sum Gamma (n + 1) S+(w)` (dressed basis).
fn weighted_plus(table: &TransitionTable, bath: &BathSpec) -> (Operator, Operator) {
    let d = table.dim;
    let mut pn = Array2::zeros((d, d));
    let mut q = Array2::zeros((d, d));
    for t in table.positive() {
        let (down, up) = emission_absorption(bath, t.delta);
        pn[[t.j, t.k]] += t.element * up;
        q[[t.j, t.k]] += t.element * down;
    }
    (pn, q)
}

fn add_factorized(l: &mut Superoperator, table: &TransitionTable, bath: &BathSpec, mode: GmeMode) -> Result<()> {
    let (p, q) = weighted_plus(table, bath);
    let pd = adjoint(&p);
    let qd = adjoint(&q);
    let splus = table.s_plus_dressed();
    let sminus = adjoint(&splus);
    // Operators standing in for S(w) at the positions that require w > 0 and w' < 0.
    let (x_pos, x_neg) = match mode {
        GmeMode::Reduced => (splus, sminus),
        GmeMode::Full => {
            let x = &splus + &sminus + &table.s_zero_dressed();
            (x.clone(), x)
        }
    };
    let h = |a: &Operator| scaled(a, 0.5);
    l.add_sandwich(h(&pd), x_pos.clone())?;
    l.add_sandwich(h(&x_neg), p.clone())?;
    l.add_sandwich(h(&q), x_neg.clone())?;
    l.add_sandwich(h(&x_pos), qd.clone())?;
    let left = matmul(&x_pos, &pd) + matmul(&x_neg, &q);
    let right = matmul(&p, &x_neg) + matmul(&qd, &x_pos);
    l.add_left(&scaled(&left, -0.5))?;
    l.add_right(&scaled(&right, -0.5))?;
    Ok(())
}

fn add_filtered(
    l: &mut Superoperator,
    table: &TransitionTable,
    bath: &BathSpec,
    filt: FilterSpec,
    mode: GmeMode,
) -> Result<()> {
    let d = table.dim;
    let entries = signed_entries(table, mode);
    let tol = table.zero_tol;
    let lambda = match filt {
        FilterSpec::Bandwidth(l) => l,
        FilterSpec::Unbounded => f64::INFINITY,
    };
    let reach = lambda.max(tol);
    // second members of each pair sorted by frequency for windowed lookup
    let mut second: Vec<&Entry> = entries.iter().filter(|e| mode == GmeMode::Full || e.w < 0.0).collect();
    second.sort_by(|a, b| a.w.total_cmp(&b.w));
    let ws: Vec<f64> = second.iter().map(|e| e.w).collect();
    let rates = |w: f64| -> (f64, f64) {
        if w > 0.0 {
            let (down, up) = emission_absorption(bath, w);
            (0.5 * down, 0.5 * up)
        } else {
            (0.0, 0.0)
        }
    };
    let mut sp = SparseBuilder::default();
    let mut kl = Array2::<C64>::zeros((d, d));
    let mut kr = Array2::<C64>::zeros((d, d));
    for e1 in entries.iter().filter(|e| mode == GmeMode::Full || e.w > 0.0) {
        let lo = ws.partition_point(|&w| w < -e1.w - reach);
        let hi = ws.partition_point(|&w| w <= -e1.w + reach);
        let (c1, b1) = rates(e1.w);
        for e2 in &second[lo..hi] {
            let osc = (e1.w + e2.w).abs();
            if !(osc <= tol || filt.passes(osc)) {
                continue;
            }
            let (d2, a2) = rates(-e2.w);
            // a: Gamma n(-w'), b: Gamma n(w), c: Gamma (n + 1)(w), d: Gamma (n + 1)(-w'), halves included
            let (a, b, c, dd) = (a2, b1, c1, d2);
            if a + b + c + dd == 0.0 {
                continue;
            }
            let cc = e1.c * e2.c;
            // S(w') rho S(w)
            if a + b != 0.0 {
                sp.push(e2.p * d + e1.q, e2.q * d + e1.p, cc * (a + b));
            }
            // S(w) rho S(w')
            if c + dd != 0.0 {
                sp.push(e1.p * d + e2.q, e1.q * d + e2.p, cc * (c + dd));
            }
            if e1.q == e2.p {
                kl[[e1.p, e2.q]] -= cc * a;
                kr[[e1.p, e2.q]] -= cc * b;
            }
            if e2.q == e1.p {
                kl[[e2.p, e1.q]] -= cc * c;
                kr[[e2.p, e1.q]] -= cc * dd;
            }
        }
    }
    l.add_left(&kl)?;
    l.add_right(&kr)?;
    l.add_sparse(sp);
    Ok(())
}

/// Generalized dressed dissipator in the eigenbasis of `eig`.
///
/// Without a bandwidth the double sum is evaluated in factorized form; with a
/// bandwidth each admitted pair of transition components is accumulated
/// elementwise. The zero-frequency products are replaced by the Ohmic dephasing
/// term `2 Omega(T) D[S0]` when `include_dephasing` is set.
pub fn gme_liouvillian(
    tables: &[(&TransitionTable, &BathSpec)],
    eig: &EigenSystem,
    filt: FilterSpec,
    include_dephasing: bool,
    mode: GmeMode,
) -> Result<Superoperator> {
    check_tables(tables, eig)?;
    let d = eig.dim();
    let mut l = Superoperator::zero(d, Some(eig.vectors.clone()))?;
    for (table, bath) in tables {
        if filt.is_unbounded() {
            add_factorized(&mut l, table, bath, mode)?;
        } else {
            add_filtered(&mut l, table, bath, filt, mode)?;
        }
        if include_dephasing {
            let omega = dephasing_rate(bath);
            let s0 = table.s_zero_dressed();
            if omega > 0.0 && s0.iter().any(|x| *x != ZERO) {
                let s0s0 = matmul(&s0, &s0);
                l.add_sandwich(s0.clone(), scaled(&s0, 2.0 * omega))?;
                l.add_left(&scaled(&s0s0, -omega))?;
                l.add_right(&scaled(&s0s0, -omega))?;
            }
        }
    }
    Ok(l)
}
