//! Test-only reference methods, independent of the shooting solver.
#![allow(dead_code)]

use mixspec_core::PotentialParams;

/// Sign changes of sampled values, ignoring exact zeros.
pub fn sign_changes(samples: &[(f64, f64)]) -> usize {
    let signs: Vec<bool> = samples[1..samples.len() - 1]
        .iter()
        .filter(|s| s.1 != 0.0)
        .map(|s| s.1 > 0.0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

pub fn simpson(values: &[f64], h: f64) -> f64 {
    assert!(values.len() % 2 == 1);
    let n = values.len() - 1;
    let inner: f64 = (1..n)
        .map(|i| {
            if i % 2 == 1 {
                4.0 * values[i]
            } else {
                2.0 * values[i]
            }
        })
        .sum();
    h / 3.0 * (values[0] + values[n] + inner)
}

/// Number of eigenvalues below `e` of the symmetric tridiagonal matrix
/// (Sturm sequence count).
fn count_below(diag: &[f64], off: f64, e: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - e;
    if q < 0.0 {
        count += 1;
    }
    for d in &diag[1..] {
        let prev = if q == 0.0 { 1e-300 } else { q };
        q = d - e - off * off / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn fd_spectrum(p: &PotentialParams, levels: usize, radius: f64, intervals: usize) -> Vec<f64> {
    let h = radius / intervals as f64;
    let diag: Vec<f64> = (1..intervals)
        .map(|i| 2.0 / (h * h) + p.value(i as f64 * h))
        .collect();
    let off = -1.0 / (h * h);
    (0..levels)
        .map(|n| {
            let (mut lo, mut hi) = (-1e3, 1e4);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(&diag, off, mid) > n {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Lowest `levels` eigenvalues of `−u″ + V u` with `u(0) = u(radius) = 0`,
/// from a Richardson-extrapolated three-point finite-difference Hamiltonian.
pub fn fd_levels(p: &PotentialParams, levels: usize, radius: f64) -> Vec<f64> {
    let coarse = fd_spectrum(p, levels, radius, 20_000);
    let fine = fd_spectrum(p, levels, radius, 40_000);
    coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect()
}
