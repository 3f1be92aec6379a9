//! Reference computations that avoid the fast paths under test.
#![allow(dead_code)]

use num::{BigInt, BigRational, Zero};
use ost_shuffle::{GroupElement, GroupIndex, GroupParams};

pub fn params(m: u32, n: u32) -> GroupParams {
    GroupParams::new(m, n).unwrap()
}

pub fn elements(p: GroupParams) -> Vec<GroupElement> {
    (0..p.order().unwrap())
        .map(|r| GroupElement::unrank(p, GroupIndex(r)).unwrap())
        .collect()
}

/// Support of the OST step law built straight from the move description.
pub fn step_support(p: GroupParams) -> Vec<(GroupElement, f64)> {
    let (m, n) = (p.m(), p.n());
    let mut out = Vec::new();
    for j in 1..=n {
        for i in 1..=j {
            for k in 0..m {
                let mut colors = vec![0; n as usize];
                colors[i as usize - 1] = k;
                colors[j as usize - 1] = k;
                let mut perm: Vec<u32> = (1..=n).collect();
                perm.swap(i as usize - 1, j as usize - 1);
                let g = GroupElement::new(p, colors, perm).unwrap();
                out.push((g, 1.0 / (n * j * m) as f64));
            }
        }
    }
    out
}

/// `out(g) = Σ_s μ(s) p(s⁻¹ g)` using only `compose`, `inverse` and `rank`.
pub fn naive_left_step(p: GroupParams, mass: &[f64]) -> Vec<f64> {
    let support = step_support(p);
    elements(p)
        .iter()
        .map(|g| {
            support
                .iter()
                .map(|(s, mu)| mu * mass[s.inverse().compose(g).unwrap().rank().unwrap().get()])
                .sum()
        })
        .collect()
}

/// Walk with generators multiplied on the right: `out(g) = Σ_s μ(s) p(g s⁻¹)`.
pub fn naive_right_step(p: GroupParams, mass: &[f64]) -> Vec<f64> {
    let support = step_support(p);
    elements(p)
        .iter()
        .map(|g| {
            support
                .iter()
                .map(|(s, mu)| mu * mass[g.compose(&s.inverse()).unwrap().rank().unwrap().get()])
                .sum()
        })
        .collect()
}

/// Row-stochastic transition matrix `M[a][b] = P(a -> b)` for the left walk.
pub fn transition_matrix(p: GroupParams) -> Vec<Vec<f64>> {
    let order = p.order().unwrap();
    let mut mat = vec![vec![0.0; order]; order];
    let support = step_support(p);
    for (a, g) in elements(p).iter().enumerate() {
        for (s, mu) in &support {
            let b = s.compose(g).unwrap().rank().unwrap().get();
            mat[a][b] += mu;
        }
    }
    mat
}

pub fn row_times_matrix(row: &[f64], mat: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; row.len()];
    for (a, &x) in row.iter().enumerate() {
        for (b, &y) in mat[a].iter().enumerate() {
            out[b] += x * y;
        }
    }
    out
}

/// The OST law on `S_n` as exact rationals, built from transpositions
/// `(i j)` with mass `1/(n j)` and the identity for `i = j`.
pub fn ost_on_symmetric_group(n: u32) -> Vec<BigRational> {
    let p = params(1, n);
    let mut law = vec![BigRational::zero(); p.order().unwrap()];
    for j in 1..=n {
        for i in 1..=j {
            let mut perm: Vec<u32> = (1..=n).collect();
            perm.swap(i as usize - 1, j as usize - 1);
            let g = GroupElement::new(p, vec![0; n as usize], perm).unwrap();
            law[g.rank().unwrap().get()] +=
                BigRational::new(BigInt::from(1), BigInt::from(n as i64 * j as i64));
        }
    }
    law
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_statistic(a: &[usize], b: &[usize]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at significance `alpha`.
pub fn ks_critical(alpha: f64, n1: usize, n2: usize) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    c * ((n1 + n2) as f64 / (n1 * n2) as f64).sqrt()
}

pub fn harmonic(n: u32) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}
