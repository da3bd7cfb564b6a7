//! Superoperators on density matrices.
//!
//! A superoperator is stored as a sum of structured terms acting in a fixed
//! orthonormal frame: left products `K rho`, right products `rho K`, sandwiches
//! `A rho B` and an elementwise sparse map. `to_matrix` materializes the dense
//! matrix acting on column-stacked density matrices.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::linalg::{self, gemm, max_abs, Op, Operator, C64, I, ONE, ZERO};

#[derive(Clone, Debug, Default)]
pub(crate) struct SparseMap {
    out: Vec<u32>,
    inp: Vec<u32>,
    val: Vec<C64>,
}

impl SparseMap {
    fn len(&self) -> usize {
        self.val.len()
    }
}

/// Accumulates elementwise terms `out[o] += v * rho[i]` with row-major flat indices.
#[derive(Clone, Debug, Default)]
pub struct SparseBuilder {
    items: Vec<(u64, C64)>,
}

impl SparseBuilder {
    pub fn push(&mut self, out: usize, inp: usize, v: C64) {
        if v != ZERO {
            self.items.push((((out as u64) << 32) | inp as u64, v));
        }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    fn finish(mut self) -> SparseMap {
        self.items.sort_unstable_by_key(|x| x.0);
        let mut map = SparseMap::default();
        let mut iter = self.items.into_iter();
        let Some((mut key, mut acc)) = iter.next() else {
            return map;
        };
        let emit = |key: u64, v: C64, map: &mut SparseMap| {
            if v != ZERO {
                map.out.push((key >> 32) as u32);
                map.inp.push((key & 0xffff_ffff) as u32);
                map.val.push(v);
            }
        };
        for (k, v) in iter {
            if k == key {
                acc += v;
            } else {
                emit(key, acc, &mut map);
                key = k;
                acc = v;
            }
        }
        emit(key, acc, &mut map);
        map
    }
}

#[derive(Clone, Debug)]
pub struct Superoperator {
    dim: usize,
    frame: Option<Operator>,
    left: Option<Operator>,
    right: Option<Operator>,
    sandwiches: Vec<(Operator, Operator)>,
    sparse: SparseMap,
}

fn add_into(slot: &mut Option<Operator>, k: &Operator) {
    match slot {
        Some(m) => *m += k,
        None => *slot = Some(k.clone()),
    }
}

impl Superoperator {
    /// Zero superoperator. `frame` holds the basis vectors as columns; `None` is the bare basis.
    pub fn zero(dim: usize, frame: Option<Operator>) -> Result<Self> {
        if let Some(f) = &frame {
            if f.dim() != (dim, dim) {
                return Err(Error::DimensionMismatch { expected: dim, found: f.nrows() });
            }
        }
        Ok(Superoperator { dim, frame, left: None, right: None, sandwiches: Vec::new(), sparse: SparseMap::default() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn frame(&self) -> Option<&Operator> {
        self.frame.as_ref()
    }

    pub fn sparse_len(&self) -> usize {
        self.sparse.len()
    }

    fn check(&self, a: &Operator) -> Result<()> {
        if a.dim() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch { expected: self.dim, found: a.nrows() });
        }
        Ok(())
    }

    /// Adds `rho -> K rho` (frame basis).
    pub fn add_left(&mut self, k: &Operator) -> Result<()> {
        self.check(k)?;
        add_into(&mut self.left, k);
        Ok(())
    }

    /// Adds `rho -> rho K` (frame basis).
    pub fn add_right(&mut self, k: &Operator) -> Result<()> {
        self.check(k)?;
        add_into(&mut self.right, k);
        Ok(())
    }

    /// Adds `rho -> A rho B` (frame basis).
    pub fn add_sandwich(&mut self, a: Operator, b: Operator) -> Result<()> {
        self.check(&a)?;
        self.check(&b)?;
        self.sandwiches.push((a, b));
        Ok(())
    }

    /// Adds elementwise terms (frame basis).
    pub fn add_sparse(&mut self, builder: SparseBuilder) {
        if builder.is_empty() {
            return;
        }
        let mut b = builder;
        let old = std::mem::take(&mut self.sparse);
        for i in 0..old.len() {
            b.push(old.out[i] as usize, old.inp[i] as usize, old.val[i]);
        }
        self.sparse = b.finish();
    }

    /// Adds the coherent part `-i [H, rho]` for a bare-basis Hamiltonian.
    pub fn add_hamiltonian(&mut self, h: &Operator) -> Result<()> {
        self.check(h)?;
        let hn = self.to_native(h);
        self.add_left(&hn.mapv(|x| -I * x))?;
        self.add_right(&hn.mapv(|x| I * x))
    }

    /// Bare-basis operator expressed in this superoperator's frame.
    pub fn to_native(&self, op: &Operator) -> Operator {
        match &self.frame {
            Some(v) => linalg::to_basis(op, v),
            None => op.clone(),
        }
    }

    pub fn from_native(&self, op: &Operator) -> Operator {
        match &self.frame {
            Some(v) => linalg::from_basis(op, v),
            None => op.clone(),
        }
    }

    fn same_frame(&self, other: Option<&Operator>) -> bool {
        match (&self.frame, other) {
            (None, None) => true,
            (Some(a), Some(b)) => max_abs(&(a - b)) == 0.0,
            _ => false,
        }
    }

    /// Same map expressed in another frame. Fails for superoperators with sparse terms.
    pub fn reframe(&self, frame: Option<&Operator>) -> Result<Superoperator> {
        if self.same_frame(frame) {
            return Ok(self.clone());
        }
        if self.sparse.len() > 0 {
            return Err(Error::Frame("elementwise terms cannot be moved to another frame".into()));
        }
        let id;
        let old = match &self.frame {
            Some(v) => v,
            None => {
                id = linalg::identity(self.dim);
                &id
            }
        };
        let u = match frame {
            Some(v) => linalg::matmul_op(old, Op::H, v, Op::N),
            None => old.t().mapv(|x| x.conj()),
        };
        let tr = |k: &Operator| linalg::to_basis(k, &u);
        let mut out = Superoperator::zero(self.dim, frame.cloned())?;
        if let Some(k) = &self.left {
            out.left = Some(tr(k));
        }
        if let Some(k) = &self.right {
            out.right = Some(tr(k));
        }
        out.sandwiches = self.sandwiches.iter().map(|(a, b)| (tr(a), tr(b))).collect();
        Ok(out)
    }

    /// Sum of two superoperators; `other` is moved into this frame if needed.
    pub fn add(&mut self, other: &Superoperator) -> Result<()> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let other = if self.same_frame(other.frame.as_ref()) {
            std::borrow::Cow::Borrowed(other)
        } else {
            std::borrow::Cow::Owned(other.reframe(self.frame.as_ref())?)
        };
        if let Some(k) = &other.left {
            add_into(&mut self.left, k);
        }
        if let Some(k) = &other.right {
            add_into(&mut self.right, k);
        }
        self.sandwiches.extend(other.sandwiches.iter().cloned());
        if other.sparse.len() > 0 {
            let mut b = SparseBuilder::default();
            for i in 0..other.sparse.len() {
                b.push(other.sparse.out[i] as usize, other.sparse.inp[i] as usize, other.sparse.val[i]);
            }
            self.add_sparse(b);
        }
        Ok(())
    }

    /// `out <- L(rho)` with both matrices in the frame basis. `scratch` must be `dim x dim`.
    pub fn apply_native_into(&self, rho: &Operator, out: &mut Operator, scratch: &mut Operator) {
        out.fill(ZERO);
        let rv = rho.view();
        if let Some(k) = &self.left {
            gemm(ONE, &k.view(), Op::N, &rv, Op::N, ONE, out);
        }
        if let Some(k) = &self.right {
            gemm(ONE, &rv, Op::N, &k.view(), Op::N, ONE, out);
        }
        for (a, b) in &self.sandwiches {
            gemm(ONE, &a.view(), Op::N, &rv, Op::N, ZERO, scratch);
            gemm(ONE, &scratch.view(), Op::N, &b.view(), Op::N, ONE, out);
        }
        if self.sparse.len() > 0 {
            let r = rho.as_standard_layout();
            let r = r.as_slice().expect("contiguous");
            let o = out.as_slice_mut().expect("contiguous");
            let sp = &self.sparse;
            for i in 0..sp.val.len() {
                o[sp.out[i] as usize] += sp.val[i] * r[sp.inp[i] as usize];
            }
        }
    }

    pub fn apply_native(&self, rho: &Operator) -> Result<Operator> {
        self.check(rho)?;
        let mut out = Array2::zeros((self.dim, self.dim));
        let mut scratch = Array2::zeros((self.dim, self.dim));
        self.apply_native_into(rho, &mut out, &mut scratch);
        Ok(out)
    }

    /// `L(rho)` for a bare-basis density matrix, returned in the bare basis.
    pub fn apply(&self, rho: &Operator) -> Result<Operator> {
        self.check(rho)?;
        let rn = self.to_native(rho);
        let out = self.apply_native(&rn)?;
        Ok(self.from_native(&out))
    }

    /// Dense `dim^2 x dim^2` matrix in the frame basis, acting on column-stacked `rho`
    /// (`vec index = row + col * dim`).
    pub fn to_matrix_native(&self) -> Array2<C64> {
        let d = self.dim;
        let mut m = Array2::zeros((d * d, d * d));
        if let Some(k) = &self.left {
            for c in 0..d {
                for r in 0..d {
                    for rp in 0..d {
                        m[[r + c * d, rp + c * d]] += k[[r, rp]];
                    }
                }
            }
        }
        if let Some(k) = &self.right {
            for c in 0..d {
                for cp in 0..d {
                    let kv = k[[cp, c]];
                    if kv == ZERO {
                        continue;
                    }
                    for r in 0..d {
                        m[[r + c * d, r + cp * d]] += kv;
                    }
                }
            }
        }
        for (a, b) in &self.sandwiches {
            for c in 0..d {
                for cp in 0..d {
                    let bv = b[[cp, c]];
                    if bv == ZERO {
                        continue;
                    }
                    for r in 0..d {
                        for rp in 0..d {
                            m[[r + c * d, rp + cp * d]] += a[[r, rp]] * bv;
                        }
                    }
                }
            }
        }
        let sp = &self.sparse;
        for i in 0..sp.val.len() {
            let (o, n) = (sp.out[i] as usize, sp.inp[i] as usize);
            let (r, c) = (o / d, o % d);
            let (rp, cp) = (n / d, n % d);
            m[[r + c * d, rp + cp * d]] += sp.val[i];
        }
        m
    }

    /// Dense matrix in the bare basis (column-stacked convention).
    pub fn to_matrix(&self) -> Array2<C64> {
        let m = self.to_matrix_native();
        match &self.frame {
            None => m,
            Some(v) => {
                // vec(V X V^dag) = (conj(V) kron V) vec(X)
                let t = linalg::kron(&v.mapv(|x| x.conj()), v);
                let tm = linalg::matmul(&t, &m);
                linalg::matmul_op(&tm, Op::N, &t, Op::H)
            }
        }
    }
}

/// Column-stacked vectorization.
pub fn vec_col(rho: &Operator) -> ndarray::Array1<C64> {
    let d = rho.nrows();
    ndarray::Array1::from_shape_fn(d * d, |i| rho[[i % d, i / d]])
}

pub fn unvec_col(v: &ndarray::Array1<C64>, d: usize) -> Operator {
    Array2::from_shape_fn((d, d), |(r, c)| v[r + c * d])
}
