#![allow(dead_code)]

use qchaos_core::linalg::{ComplexMatrix, OrthonormalBasis, PureState};
use qchaos_core::rmt::{sample_haar_unitary, stream_rng};
use qchaos_core::Complex64;
use rand::Rng;
use rand_chacha::ChaCha20Rng;

pub type Rows = Vec<Vec<Complex64>>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    stream_rng(seed, 0)
}

pub fn rows(m: &ComplexMatrix) -> Rows {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect()).collect()
}

pub fn mul(a: &Rows, b: &Rows) -> Rows {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![c(0.0, 0.0); m]; n];
    for i in 0..n {
        for l in 0..k {
            let x = a[i][l];
            for j in 0..m {
                out[i][j] += x * b[l][j];
            }
        }
    }
    out
}

pub fn adj(a: &Rows) -> Rows {
    (0..a[0].len()).map(|j| (0..a.len()).map(|i| a[i][j].conj()).collect()).collect()
}

pub fn sub(a: &Rows, b: &Rows) -> Rows {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect()).collect()
}

pub fn frob_sq(a: &Rows) -> f64 {
    a.iter().flatten().map(|z| z.norm_sqr()).sum()
}

pub fn diag(v: &[Complex64]) -> Rows {
    let d = v.len();
    (0..d).map(|i| (0..d).map(|j| if i == j { v[i] } else { c(0.0, 0.0) }).collect()).collect()
}

/// Box–Muller, independent of the library's normal sampler.
pub fn gauss<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn random_state<R: Rng>(d: usize, rng: &mut R) -> PureState {
    PureState::normalized((0..d).map(|_| c(gauss(rng), gauss(rng))).collect()).unwrap()
}

pub fn random_basis<R: Rng>(d: usize, rng: &mut R) -> OrthonormalBasis {
    OrthonormalBasis::from_unitary(sample_haar_unitary(d, rng))
}

pub fn random_phases<R: Rng>(d: usize, rng: &mut R) -> Vec<Complex64> {
    (0..d).map(|_| Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>())).collect()
}

pub fn mean_and_err(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|y| (y - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Real symmetric Jacobi eigenvalues, ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j].powi(2)).sum();
        if off < 1e-22 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut e: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    e.sort_by(f64::total_cmp);
    e
}
