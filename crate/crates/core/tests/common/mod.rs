// Dense-matrix reference implementations used as oracles by the integration
// tests. Everything here works on explicit 2^n x 2^n matrices.

#![allow(dead_code)]

use num_complex::Complex64;

use gmqaoa::{HuboInstance, Mixer, ParamSchedule};

pub type Mat = Vec<Vec<Complex64>>;

pub fn zeros(d: usize) -> Mat {
    vec![vec![Complex64::new(0.0, 0.0); d]; d]
}

pub fn identity(d: usize) -> Mat {
    let mut m = zeros(d);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (da, db) = (a.len(), b.len());
    let mut out = zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    out[i * db + k][j * db + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matvec(m: &Mat, v: &[Complex64]) -> Vec<Complex64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Energy from the spin products directly.
pub fn brute_energy(inst: &HuboInstance, z: usize) -> f64 {
    inst.terms()
        .iter()
        .map(|t| {
            let prod: f64 = t.sites.iter().map(|&i| if (z >> i) & 1 == 1 { -1.0 } else { 1.0 }).product();
            t.coeff * prod
        })
        .sum()
}

pub fn cost_matrix(energies: &[f64], gamma: f64) -> Mat {
    let mut m = zeros(energies.len());
    for (z, &e) in energies.iter().enumerate() {
        m[z][z] = Complex64::cis(-gamma * e);
    }
    m
}

/// `I + (e^{-2i beta} - 1) |sym><sym|`.
pub fn grover_matrix(n: usize, beta: f64) -> Mat {
    let d = 1usize << n;
    let c = (Complex64::cis(-2.0 * beta) - 1.0) / d as f64;
    let mut m = identity(d);
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            *x += c;
        }
    }
    m
}

/// `prod_j exp(-i beta X_j)` as a Kronecker product.
pub fn x_mixer_matrix(n: usize, beta: f64) -> Mat {
    let (c, s) = (Complex64::new(beta.cos(), 0.0), Complex64::new(0.0, -beta.sin()));
    let single = vec![vec![c, s], vec![s, c]];
    let mut m = identity(1);
    for _ in 0..n {
        m = kron(&m, &single);
    }
    m
}

pub fn dense_run(energies: &[f64], schedule: &ParamSchedule, mixer: Mixer) -> Vec<Complex64> {
    let d = energies.len();
    let n = d.trailing_zeros() as usize;
    let mut psi = vec![Complex64::new(1.0 / (d as f64).sqrt(), 0.0); d];
    for (beta, gamma) in schedule.layers() {
        psi = matvec(&cost_matrix(energies, gamma), &psi);
        let mix = match mixer {
            Mixer::Grover => grover_matrix(n, beta),
            Mixer::Transverse => x_mixer_matrix(n, beta),
        };
        psi = matvec(&mix, &psi);
    }
    psi
}
