//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use ndarray::Array2;
use num_complex::Complex64 as C64;

pub type Mat = Array2<C64>;

/// Triple-loop matrix product.
pub fn mm(a: &Mat, b: &Mat) -> Mat {
    let (n, k) = a.dim();
    let m = b.ncols();
    assert_eq!(k, b.nrows());
    let mut c = Mat::zeros((n, m));
    for i in 0..n {
        for l in 0..k {
            let x = a[[i, l]];
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for j in 0..m {
                c[[i, j]] += x * b[[l, j]];
            }
        }
    }
    c
}

pub fn dagger(a: &Mat) -> Mat {
    a.t().mapv(|z| z.conj())
}

/// Cyclic complex Jacobi diagonalization. Returns ascending eigenvalues and eigenvectors as columns.
pub fn jacobi_eigh(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = Mat::eye(n);
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|(i, j)| i != j).map(|(i, j)| a[[i, j]].norm_sqr()).sum();
        if off.sqrt() < 1e-15 * (1.0 + a.iter().map(|z| z.norm()).fold(0.0, f64::max)) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = a[[p, q]];
                if b.norm() < 1e-300 {
                    continue;
                }
                let u = b / b.norm();
                let theta = 0.5 * (2.0 * b.norm()).atan2(a[[p, p]].re - a[[q, q]].re);
                let (s, c) = theta.sin_cos();
                // J = diag(1, conj(u)) * [[c, -s], [s, c]]
                let j = [[C64::new(c, 0.0), C64::new(-s, 0.0)], [u.conj() * s, u.conj() * c]];
                for k in 0..n {
                    let (x, y) = (a[[k, p]], a[[k, q]]);
                    a[[k, p]] = x * j[0][0] + y * j[1][0];
                    a[[k, q]] = x * j[0][1] + y * j[1][1];
                    let (x, y) = (v[[k, p]], v[[k, q]]);
                    v[[k, p]] = x * j[0][0] + y * j[1][0];
                    v[[k, q]] = x * j[0][1] + y * j[1][1];
                }
                for k in 0..n {
                    let (x, y) = (a[[p, k]], a[[q, k]]);
                    a[[p, k]] = j[0][0].conj() * x + j[1][0].conj() * y;
                    a[[q, k]] = j[0][1].conj() * x + j[1][1].conj() * y;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[[i, i]].re.total_cmp(&a[[j, j]].re));
    let e = idx.iter().map(|&i| a[[i, i]].re).collect();
    let vs = Mat::from_shape_fn((n, n), |(r, c)| v[[r, idx[c]]]);
    (e, vs)
}

pub fn annihilation(n: usize) -> Mat {
    Mat::from_shape_fn((n, n), |(i, j)| if j == i + 1 { C64::new((j as f64).sqrt(), 0.0) } else { C64::new(0.0, 0.0) })
}

/// Kronecker product written out index by index.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    Mat::from_shape_fn((ra * rb, ca * cb), |(r, c)| a[[r / rb, c / cb]] * b[[r % rb, c % cb]])
}

/// Generalized Rabi Hamiltonian with the qubit basis ordered (excited, ground).
pub fn rabi_h(omega_c: f64, omega_q: f64, g: f64, theta: f64, n_max: usize) -> Mat {
    let nf = n_max + 1;
    let a = annihilation(nf);
    let sz = Mat::from_shape_fn((2, 2), |(i, j)| if i == j { C64::new(if i == 0 { 1.0 } else { -1.0 }, 0.0) } else { C64::new(0.0, 0.0) });
    let sx = Mat::from_shape_fn((2, 2), |(i, j)| if i != j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    let x = &a + &dagger(&a);
    let n = mm(&dagger(&a), &a);
    let i2 = Mat::eye(2);
    let iq = Mat::eye(nf);
    let coupling = sx.mapv(|z| z * theta.cos()) + sz.mapv(|z| z * theta.sin());
    kron(&sz, &iq).mapv(|z| z * (0.5 * omega_q)) + kron(&i2, &n).mapv(|z| z * omega_c) + kron(&coupling, &x).mapv(|z| z * g)
}

pub fn rabi_ops(n_max: usize) -> (Mat, Mat) {
    let nf = n_max + 1;
    let sm = Mat::from_shape_fn((2, 2), |(i, j)| if i == 1 && j == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    (kron(&Mat::eye(2), &annihilation(nf)), kron(&sm, &Mat::eye(nf)))
}

pub fn optomech_h(omega_c: f64, omega_m: f64, g: f64, n_c: usize, n_m: usize, dce: bool) -> Mat {
    let a = kron(&annihilation(n_c + 1), &Mat::eye(n_m + 1));
    let b = kron(&Mat::eye(n_c + 1), &annihilation(n_m + 1));
    let na = mm(&dagger(&a), &a);
    let nb = mm(&dagger(&b), &b);
    let xb = &b + &dagger(&b);
    let mut h = na.mapv(|z| z * omega_c) + nb.mapv(|z| z * omega_m) + mm(&na, &xb).mapv(|z| z * g);
    if dce {
        let pair = mm(&a, &a) + mm(&dagger(&a), &dagger(&a));
        h = h + mm(&pair, &xb).mapv(|z| z * (0.5 * g));
    }
    h
}

pub fn bose(omega: f64, t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        1.0 / ((omega / t).exp() - 1.0)
    }
}

/// One reservoir of the Born-Markov reference: coupling operator `x = s + s^dag`, Ohmic strength.
pub struct OracleBath {
    pub s: Mat,
    pub gamma: f64,
    pub ref_freq: f64,
    pub temperature: f64,
}

/// Born-Markov generator without any secular or filtering step, with real parts of the
/// one-sided bath spectra only: `L rho = sum [G rho, X] + [X, rho G^dag]` where
/// `G = sum_jk g(E_k - E_j) X_jk |j><k|` in the eigenbasis of `h`.
pub struct BornMarkov {
    pub h: Mat,
    pub energies: Vec<f64>,
    pub vectors: Mat,
    parts: Vec<(Mat, Mat)>,
}

impl BornMarkov {
    pub fn new(h: &Mat, baths: &[OracleBath]) -> Self {
        let (energies, vectors) = jacobi_eigh(h);
        let n = h.nrows();
        let vd = dagger(&vectors);
        let mut parts = Vec::new();
        for b in baths {
            let x = &b.s + &dagger(&b.s);
            let xe = mm(&mm(&vd, &x), &vectors);
            let g = Mat::from_shape_fn((n, n), |(j, k)| {
                let w = energies[k] - energies[j];
                let rate = if w > 1e-9 {
                    b.gamma * w / b.ref_freq * (bose(w, b.temperature) + 1.0)
                } else if w < -1e-9 {
                    b.gamma * (-w) / b.ref_freq * bose(-w, b.temperature)
                } else {
                    b.gamma * b.temperature / b.ref_freq
                };
                xe[[j, k]] * (0.5 * rate)
            });
            parts.push((mm(&mm(&vectors, &g), &vd), x));
        }
        BornMarkov { h: h.clone(), energies, vectors, parts }
    }

    pub fn rhs(&self, rho: &Mat) -> Mat {
        let i = C64::new(0.0, 1.0);
        let mut out = (mm(&self.h, rho) - mm(rho, &self.h)).mapv(|z| -i * z);
        for (g, x) in &self.parts {
            let gr = mm(g, rho);
            let rg = mm(rho, &dagger(g));
            out = out + mm(&gr, x) - mm(x, &gr) + mm(x, &rg) - mm(&rg, x);
        }
        out
    }

    /// Fixed-step classical Runge-Kutta; returns states at multiples of `every` steps.
    pub fn integrate(&self, rho0: &Mat, dt: f64, steps: usize, every: usize) -> Vec<(f64, Mat)> {
        let mut rho = rho0.clone();
        let mut out = vec![(0.0, rho.clone())];
        for k in 1..=steps {
            let k1 = self.rhs(&rho);
            let k2 = self.rhs(&(&rho + &k1.mapv(|z| z * (0.5 * dt))));
            let k3 = self.rhs(&(&rho + &k2.mapv(|z| z * (0.5 * dt))));
            let k4 = self.rhs(&(&rho + &k3.mapv(|z| z * dt)));
            rho = &rho + &(k1 + k2.mapv(|z| z * 2.0) + k3.mapv(|z| z * 2.0) + k4).mapv(|z| z * (dt / 6.0));
            if k % every == 0 {
                out.push((k as f64 * dt, rho.clone()));
            }
        }
        out
    }

    pub fn populations(&self, rho: &Mat) -> Vec<f64> {
        let r = mm(&mm(&dagger(&self.vectors), rho), &self.vectors);
        (0..r.nrows()).map(|k| r[[k, k]].re).collect()
    }
}

/// Deterministic pseudo-random Hermitian matrix.
pub fn random_hermitian(d: usize, seed: u64) -> Mat {
    let mut s = seed.wrapping_add(0x9e3779b97f4a7c15);
    let mut next = || {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
    };
    let a = Mat::from_shape_fn((d, d), |_| C64::new(next(), next()));
    &a + &dagger(&a)
}

/// Deterministic pseudo-random density matrix of full rank.
pub fn random_density(d: usize, seed: u64) -> Mat {
    let a = random_hermitian(d, seed);
    let mut rho = mm(&a, &a) + Mat::eye(d).mapv(|z| z * 0.1);
    let tr: C64 = (0..d).map(|i| rho[[i, i]]).sum();
    rho.mapv_inplace(|z| z / tr);
    rho
}

pub fn max_diff(a: &Mat, b: &Mat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
