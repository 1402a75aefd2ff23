#![allow(dead_code)]

use nalgebra::DMatrix;
use nullrig::geometry::{metric_at, ChartMetric};

/// Fourth-order central difference of a vector-valued function along axis `k`.
pub fn central<F: Fn(&[f64]) -> Vec<f64>>(f: F, p: &[f64], k: usize, h: f64) -> Vec<f64> {
    let at = |s: f64| {
        let mut q = p.to_vec();
        q[k] += s;
        f(&q)
    };
    let (a, b, c, d) = (at(-2.0 * h), at(-h), at(h), at(2.0 * h));
    (0..a.len())
        .map(|i| (a[i] - 8.0 * b[i] + 8.0 * c[i] - d[i]) / (12.0 * h))
        .collect()
}

pub fn metric_flat(chart: &dyn ChartMetric, p: &[f64]) -> Vec<f64> {
    let g = metric_at(chart, p).unwrap();
    g.transpose().iter().copied().collect()
}

/// Christoffel symbols `Γ^a_bc` from finite differences of metric values only.
pub fn fd_christoffel(chart: &dyn ChartMetric, p: &[f64], h: f64) -> Vec<f64> {
    let n = chart.dim();
    let dg: Vec<Vec<f64>> = (0..n).map(|k| central(|q| metric_flat(chart, q), p, k, h)).collect();
    let g = metric_at(chart, p).unwrap();
    let ginv = g.try_inverse().unwrap();
    let mut out = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut s = 0.0;
                for d in 0..n {
                    s += 0.5 * ginv[(a, d)] * (dg[b][d * n + c] + dg[c][d * n + b] - dg[d][b * n + c]);
                }
                out[(a * n + b) * n + c] = s;
            }
        }
    }
    out
}

/// `R^a_bcd` from finite differences of the library's Christoffel symbols.
pub fn fd_riemann(chart: &dyn ChartMetric, p: &[f64], h: f64) -> Vec<f64> {
    let n = chart.dim();
    let gam = |q: &[f64]| {
        let c = nullrig::geometry::christoffel(chart, q).unwrap();
        let mut v = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c2 in 0..n {
                    v[(a * n + b) * n + c2] = c.get(a, b, c2);
                }
            }
        }
        v
    };
    let g0 = gam(p);
    let dg: Vec<Vec<f64>> = (0..n).map(|k| central(gam, p, k, h)).collect();
    let i3 = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    let mut r = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut v = dg[c][i3(a, d, b)] - dg[d][i3(a, c, b)];
                    for e in 0..n {
                        v += g0[i3(a, c, e)] * g0[i3(e, d, b)] - g0[i3(a, d, e)] * g0[i3(e, c, b)];
                    }
                    r[((a * n + b) * n + c) * n + d] = v;
                }
            }
        }
    }
    r
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn mat_max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax()
}
