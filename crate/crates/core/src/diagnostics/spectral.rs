//! Spectral differentiation and quadrature on [0, 1]: the discrete-
//! Fourier differentiation matrix for periodic loop parametrizations,
//! and Chebyshev differentiation with Clenshaw-Curtis weights for
//! surface patches. Built from closed forms.

use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Differentiation matrix for n equidistant points on the periodic
/// interval [0, 1); n must be even. Row j applied to samples gives the
/// derivative of the trigonometric interpolant at point j.
pub fn fourier_diff_matrix(n: usize) -> DMatrix<f64> {
    assert!(n >= 2 && n % 2 == 0, "periodic grid size must be even");
    DMatrix::from_fn(n, n, |j, k| {
        if j == k {
            0.0
        } else {
            let sign = if (j + n - k) % 2 == 0 { 1.0 } else { -1.0 };
            let diff = j as i64 - k as i64;
            PI * sign / (PI * diff as f64 / n as f64).tan()
        }
    })
}

/// Chebyshev-Lobatto points mapped to [0, 1], ascending: (1 - cos(pi j / m)) / 2.
pub fn chebyshev_points(m: usize) -> Vec<f64> {
    assert!(m >= 1);
    (0..=m)
        .map(|j| 0.5 * (1.0 - (PI * j as f64 / m as f64).cos()))
        .collect()
}

/// Differentiation matrix on the Chebyshev-Lobatto points of [0, 1].
pub fn chebyshev_diff_matrix(m: usize) -> DMatrix<f64> {
    let n = m + 1;
    let x: Vec<f64> = (0..n).map(|j| (PI * j as f64 / m as f64).cos()).collect();
    let c = |i: usize| -> f64 {
        let base = if i == 0 || i == m { 2.0 } else { 1.0 };
        if i % 2 == 0 {
            base
        } else {
            -base
        }
    };
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d[(i, j)] = c(i) / c(j) / (x[i] - x[j]);
            }
        }
    }
    for i in 0..n {
        let row_sum: f64 = (0..n).filter(|&j| j != i).map(|j| d[(i, j)]).sum();
        d[(i, i)] = -row_sum;
    }
    // chain rule for t = (1 - x)/2
    d * -2.0
}

/// Clenshaw-Curtis quadrature weights on the Chebyshev-Lobatto points
/// of [0, 1] (integral of the interpolant over the interval).
pub fn clenshaw_curtis_weights(m: usize) -> Vec<f64> {
    assert!(m >= 2);
    let n = m;
    let mut w = vec![0.0; n + 1];
    let end = if n % 2 == 0 {
        1.0 / (n * n - 1) as f64
    } else {
        1.0 / (n * n) as f64
    };
    w[0] = end;
    w[n] = end;
    for (i, wi) in w.iter_mut().enumerate().take(n).skip(1) {
        let theta = PI * i as f64 / n as f64;
        let mut v = 1.0;
        for k in 1..=(n / 2) {
            let b = if 2 * k == n { 1.0 } else { 2.0 };
            v -= b * (2.0 * k as f64 * theta).cos() / ((4 * k * k - 1) as f64);
        }
        *wi = 2.0 * v / n as f64;
    }
    // halve for the unit interval
    w.iter_mut().for_each(|v| *v *= 0.5);
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourier_derivative_of_trigonometric_samples() {
        let n = 64;
        let d = fourier_diff_matrix(n);
        let f: Vec<f64> = (0..n)
            .map(|k| (2.0 * PI * k as f64 / n as f64).sin())
            .collect();
        for j in 0..n {
            let deriv: f64 = (0..n).map(|k| d[(j, k)] * f[k]).sum();
            let exact = 2.0 * PI * (2.0 * PI * j as f64 / n as f64).cos();
            assert!(
                (deriv - exact).abs() < 1e-10,
                "node {j}: {deriv} vs {exact}"
            );
        }
    }

    #[test]
    fn fourier_rejects_odd_sizes() {
        let r = std::panic::catch_unwind(|| fourier_diff_matrix(63));
        assert!(r.is_err());
    }

    #[test]
    fn chebyshev_derivative_of_a_cubic() {
        let m = 12;
        let t = chebyshev_points(m);
        let d = chebyshev_diff_matrix(m);
        let f: Vec<f64> = t.iter().map(|v| v * v * v - 2.0 * v).collect();
        for i in 0..=m {
            let deriv: f64 = (0..=m).map(|k| d[(i, k)] * f[k]).sum();
            let exact = 3.0 * t[i] * t[i] - 2.0;
            assert!((deriv - exact).abs() < 1e-9, "node {i}: {deriv} vs {exact}");
        }
    }

    #[test]
    fn clenshaw_curtis_integrates_monomials() {
        let m = 16;
        let t = chebyshev_points(m);
        let w = clenshaw_curtis_weights(m);
        for k in 0..=10_i32 {
            let quad: f64 = t.iter().zip(&w).map(|(x, wi)| wi * x.powi(k)).sum();
            let exact = 1.0 / (k as f64 + 1.0);
            assert!(
                (quad - exact).abs() < 1e-12,
                "moment {k}: {quad} vs {exact}"
            );
        }
    }

    #[test]
    fn chebyshev_points_cover_the_interval() {
        let t = chebyshev_points(8);
        assert_eq!(t[0], 0.0);
        assert_eq!(*t.last().unwrap(), 1.0);
        assert!((t[4] - 0.5).abs() < 1e-15);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
    }
}
