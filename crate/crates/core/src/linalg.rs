//! Dense complex operator algebra.

use ndarray::{Array1, Array2, ArrayView2, Axis, ShapeBuilder};
use ndarray_linalg::{Eigh, Inverse, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Dense square complex matrix. Used for Hamiltonians, jump operators and density matrices.
pub type Operator = Array2<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

const HERMITIAN_TOL: f64 = 1e-10;

pub fn check_square(a: &ArrayView2<C64>) -> Result<usize> {
    let (r, c) = a.dim();
    if r != c || r == 0 {
        return Err(Error::NotSquare { rows: r, cols: c });
    }
    Ok(r)
}

fn check_same(a: &Operator, b: &Operator) -> Result<usize> {
    let n = check_square(&a.view())?;
    let m = check_square(&b.view())?;
    if n != m {
        return Err(Error::DimensionMismatch { expected: n, found: m });
    }
    Ok(n)
}

pub fn identity(n: usize) -> Operator {
    Array2::eye(n)
}

/// Truncated annihilation operator on `n` Fock levels.
pub fn destroy(n: usize) -> Operator {
    let mut a = Array2::zeros((n, n));
    for k in 1..n {
        a[[k - 1, k]] = C64::new((k as f64).sqrt(), 0.0);
    }
    a
}

pub fn create(n: usize) -> Operator {
    adjoint(&destroy(n))
}

pub fn number(n: usize) -> Operator {
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { C64::new(i as f64, 0.0) } else { ZERO })
}

// Qubit basis ordering is (|e>, |g>) so that sigma_z = diag(1, -1).
pub fn sigma_x() -> Operator {
    ndarray::array![[ZERO, ONE], [ONE, ZERO]]
}

pub fn sigma_y() -> Operator {
    ndarray::array![[ZERO, -I], [I, ZERO]]
}

pub fn sigma_z() -> Operator {
    ndarray::array![[ONE, ZERO], [ZERO, -ONE]]
}

/// Lowering operator |g><e|.
pub fn sigma_minus() -> Operator {
    ndarray::array![[ZERO, ZERO], [ONE, ZERO]]
}

/// Kronecker product; `a` is the slow index.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == ZERO {
                continue;
            }
            let mut blk = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
            blk.zip_mut_with(b, |o, &x| *o = aij * x);
        }
    }
    out
}

pub fn adjoint(a: &Operator) -> Operator {
    a.t().mapv(|x| x.conj())
}

pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    check_same(a, b)?;
    Ok(matmul(a, b) - matmul(b, a))
}

pub fn anticommutator(a: &Operator, b: &Operator) -> Result<Operator> {
    check_same(a, b)?;
    Ok(matmul(a, b) + matmul(b, a))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    N,
    T,
    H,
}

impl Op {
    fn cblas(self) -> cblas_sys::CBLAS_TRANSPOSE {
        match self {
            Op::N => cblas_sys::CBLAS_TRANSPOSE::CblasNoTrans,
            Op::T => cblas_sys::CBLAS_TRANSPOSE::CblasTrans,
            Op::H => cblas_sys::CBLAS_TRANSPOSE::CblasConjTrans,
        }
    }
}

/// `c <- alpha * op(a) * op(b) + beta * c` through BLAS zgemm.
pub fn gemm(alpha: C64, a: &ArrayView2<C64>, ta: Op, b: &ArrayView2<C64>, tb: Op, beta: C64, c: &mut Array2<C64>) {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let (m, k) = if ta == Op::N { (ar, ac) } else { (ac, ar) };
    let (k2, n) = if tb == Op::N { (br, bc) } else { (bc, br) };
    assert_eq!(k, k2, "gemm inner dimension");
    assert_eq!(c.dim(), (m, n), "gemm output shape");
    let a = a.as_standard_layout();
    let b = b.as_standard_layout();
    assert!(c.is_standard_layout());
    if m == 0 || n == 0 {
        return;
    }
    if k == 0 {
        c.mapv_inplace(|x| x * beta);
        return;
    }
    // SAFETY: all three buffers are contiguous row-major with the leading
    // dimensions passed below, and Complex64 is layout-compatible with double[2].
    unsafe {
        cblas_sys::cblas_zgemm(
            cblas_sys::CBLAS_LAYOUT::CblasRowMajor,
            ta.cblas(),
            tb.cblas(),
            m as i32,
            n as i32,
            k as i32,
            &alpha as *const C64 as *const _,
            a.as_ptr() as *const _,
            ac.max(1) as i32,
            b.as_ptr() as *const _,
            bc.max(1) as i32,
            &beta as *const C64 as *const _,
            c.as_mut_ptr() as *mut _,
            n.max(1) as i32,
        );
    }
}

pub fn matmul(a: &Operator, b: &Operator) -> Operator {
    matmul_op(a, Op::N, b, Op::N)
}

pub fn matmul_op(a: &Operator, ta: Op, b: &Operator, tb: Op) -> Operator {
    let m = if ta == Op::N { a.nrows() } else { a.ncols() };
    let n = if tb == Op::N { b.ncols() } else { b.nrows() };
    let mut c = Array2::zeros((m, n));
    gemm(ONE, &a.view(), ta, &b.view(), tb, ZERO, &mut c);
    c
}

/// `v^dag a v`.
pub fn to_basis(a: &Operator, v: &Operator) -> Operator {
    let av = matmul(a, v);
    matmul_op(v, Op::H, &av, Op::N)
}

/// `v a v^dag`.
pub fn from_basis(a: &Operator, v: &Operator) -> Operator {
    let av = matmul_op(a, Op::N, v, Op::H);
    matmul(v, &av)
}

pub fn trace(a: &Operator) -> C64 {
    a.diag().sum()
}

pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.norm()))
}

pub fn hermitian_deviation(a: &Operator) -> f64 {
    let n = a.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    dev
}

pub fn is_hermitian(a: &Operator, tol: f64) -> bool {
    hermitian_deviation(a) <= tol * max_abs(a).max(1.0)
}

pub fn hermitize(a: &Operator) -> Operator {
    (a + &adjoint(a)).mapv(|x| x * 0.5)
}

/// `Tr(op rho)`.
pub fn expectation(op: &Operator, rho: &Operator) -> Result<C64> {
    let n = check_same(op, rho)?;
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += op[[i, j]] * rho[[j, i]];
        }
    }
    Ok(acc)
}

/// Sorted eigenvalues and eigenvectors (as columns) of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub energies: Array1<f64>,
    pub vectors: Operator,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Matrix of `op` in the eigenbasis.
    pub fn to_eigenbasis(&self, op: &Operator) -> Result<Operator> {
        check_same(op, &self.vectors)?;
        Ok(to_basis(op, &self.vectors))
    }

    /// Bare-basis matrix of an eigenbasis operator.
    pub fn from_eigenbasis(&self, op: &Operator) -> Result<Operator> {
        check_same(op, &self.vectors)?;
        Ok(from_basis(op, &self.vectors))
    }

    pub fn state(&self, k: usize) -> Array1<C64> {
        self.vectors.column(k).to_owned()
    }

    /// |E_k><E_k| in the bare basis.
    pub fn projector(&self, k: usize) -> Operator {
        let v = self.vectors.column(k);
        Array2::from_shape_fn((self.dim(), self.dim()), |(i, j)| v[i] * v[j].conj())
    }
}

/// Hermitian eigendecomposition with ascending energies, stable tie order and
/// deterministic phases (largest component of each vector made real positive).
pub fn eigh(h: &Operator) -> Result<EigenSystem> {
    let n = check_square(&h.view())?;
    let dev = hermitian_deviation(h);
    if dev > HERMITIAN_TOL * max_abs(h).max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    // column-major input: row-major complex input comes back with conjugated vectors
    let mut hs = Array2::zeros(h.dim().f());
    hs.assign(&hermitize(h));
    let (vals, vecs) = hs.eigh(UPLO::Lower)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]).then(a.cmp(&b)));
    let energies = Array1::from_iter(order.iter().map(|&k| vals[k]));
    let mut vectors = vecs.select(Axis(1), &order);
    for mut col in vectors.columns_mut() {
        let mut best = 0;
        let mut best_mag = -1.0;
        for (i, x) in col.iter().enumerate() {
            // first index within rounding of the maximum, so near-ties resolve identically
            if x.norm() > best_mag * (1.0 + 1e-9) {
                best = i;
                best_mag = x.norm();
            }
        }
        let p = col[best];
        if p.norm() > 0.0 {
            let phase = p.conj() / p.norm();
            col.mapv_inplace(|x| x * phase);
        }
    }
    Ok(EigenSystem { energies, vectors })
}

/// Eigenvalues of a Hermitian operator (hermitized first), ascending.
pub fn eigvalsh(a: &Operator) -> Result<Array1<f64>> {
    use ndarray_linalg::EigValsh;
    check_square(&a.view())?;
    let mut v = hermitize(a).eigvalsh(UPLO::Lower)?;
    v.as_slice_mut().unwrap().sort_by(f64::total_cmp);
    Ok(v)
}

/// Trace distance `0.5 * ||a - b||_1` between Hermitian operators.
pub fn trace_distance(a: &Operator, b: &Operator) -> Result<f64> {
    check_same(a, b)?;
    Ok(0.5 * eigvalsh(&(a - b))?.iter().map(|x| x.abs()).sum::<f64>())
}

pub fn min_eigenvalue(a: &Operator) -> Result<f64> {
    Ok(eigvalsh(a)?[0])
}

fn one_norm(a: &Array2<C64>) -> f64 {
    a.columns().into_iter().map(|c| c.iter().map(|x| x.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a degree-13 Pade approximant.
pub fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = check_square(&a.view())?;
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA13: f64 = 5.371920351148152;
    let norm = one_norm(a);
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.mapv(|x| x / 2f64.powi(s));
    let id = identity(n);
    let a2 = matmul(&a, &a);
    let a4 = matmul(&a2, &a2);
    let a6 = matmul(&a4, &a2);
    let r = |x: f64| C64::new(x, 0.0);
    let inner_u = &a6 * r(B[13]) + &a4 * r(B[11]) + &a2 * r(B[9]);
    let u_poly = matmul(&a6, &inner_u) + &a6 * r(B[7]) + &a4 * r(B[5]) + &a2 * r(B[3]) + &id * r(B[1]);
    let u = matmul(&a, &u_poly);
    let inner_v = &a6 * r(B[12]) + &a4 * r(B[10]) + &a2 * r(B[8]);
    let v = matmul(&a6, &inner_v) + &a6 * r(B[6]) + &a4 * r(B[4]) + &a2 * r(B[2]) + &id * r(B[0]);
    let q_inv = (&v - &u).inv()?;
    let mut x = matmul(&q_inv, &(&v + &u));
    for _ in 0..s {
        x = matmul(&x, &x);
    }
    Ok(x)
}
