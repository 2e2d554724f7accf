//! Numerical helpers: finite-difference weights on arbitrary nodes,
//! fixed stencils, and adaptive Gauss-Kronrod quadrature.

use crate::dual::DualScalar;
use crate::error::{Error, Result};

/// Weights `w[k][j]` such that `Σ_j w[k][j] f(nodes[j]) ≈ f⁽ᵏ⁾(x0)` for
/// `k = 0..=max_order` (Fornberg's recursion). Nodes must be distinct.
pub fn fd_weights(x0: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    if n == 0 {
        return c;
    }
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Index range of the `width` nodes nearest to `x` in a sorted slice,
/// shifted inward at the ends.
pub fn nearest_stencil(nodes: &[f64], x: f64, width: usize) -> std::ops::Range<usize> {
    let n = nodes.len();
    let width = width.min(n);
    let pos = nodes.partition_point(|&v| v < x);
    let start = pos.saturating_sub(width / 2).min(n - width);
    start..start + width
}

/// Derivative of tabulated dual values at `x` (any order up to 3) using
/// the `width` nearest samples.
pub fn tabulated_derivative(
    nodes: &[f64],
    values: &[DualScalar],
    x: f64,
    order: usize,
    width: usize,
) -> DualScalar {
    let r = nearest_stencil(nodes, x, width);
    let w = fd_weights(x, &nodes[r.clone()], order);
    r.zip(w[order].iter())
        .map(|(j, wj)| values[j] * *wj)
        .sum()
}

/// Five-point central difference of `f` at `x` for derivative `order`
/// in 1..=3 with spacing `h`.
pub fn central_difference<T, F>(f: F, x: f64, h: f64, order: usize) -> Result<T>
where
    F: Fn(f64) -> Result<T>,
    T: std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + Copy,
{
    let m2 = f(x - 2.0 * h)?;
    let m1 = f(x - h)?;
    let p1 = f(x + h)?;
    let p2 = f(x + 2.0 * h)?;
    Ok(match order {
        1 => ((m2 - p2) + (p1 - m1) * 8.0) * (1.0 / (12.0 * h)),
        2 => {
            let c = f(x)?;
            ((m1 + p1) * 16.0 - (m2 + p2) - c * 30.0) * (1.0 / (12.0 * h * h))
        }
        3 => ((p2 - m2) - (p1 - m1) * 2.0) * (1.0 / (2.0 * h * h * h)),
        _ => return Err(Error::InvalidInput(format!("no stencil for order {order}"))),
    })
}

/// `(max - min) / max(|max|, |min|)`; 0 for an empty or all-zero slice.
pub fn relative_spread(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let scale = lo.abs().max(hi.abs());
    if values.is_empty() || scale == 0.0 {
        0.0
    } else {
        (hi - lo) / scale
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(DualScalar, f64)>
where
    F: Fn(f64) -> Result<DualScalar>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx)? + f(c + dx)?;
        kronrod += s * WGK[i];
        if i % 2 == 1 {
            gauss += s * WG[i / 2];
        }
    }
    let k = kronrod * h;
    let g = gauss * h;
    let err = (k.re - g.re).abs().max((k.du - g.du).abs());
    Ok((k, err))
}

/// Adaptive Gauss-Kronrod (7/15) integral of a dual-valued integrand over
/// `[a, b]` to absolute tolerance `tol` on both parts.
pub fn integrate_dual<F>(f: F, a: f64, b: f64, tol: f64) -> Result<DualScalar>
where
    F: Fn(f64) -> Result<DualScalar>,
{
    if a == b {
        return Ok(DualScalar::ZERO);
    }
    let (sign, lo, hi) = if a < b { (1.0, a, b) } else { (-1.0, b, a) };
    let mut total = DualScalar::ZERO;
    let mut stack = vec![(lo, hi, tol, 0u32)];
    while let Some((x0, x1, t, depth)) = stack.pop() {
        let (val, err) = gk15(&f, x0, x1)?;
        if err <= t || depth >= 40 || (x1 - x0) < 1e-12 * (hi - lo) {
            total += val;
        } else {
            let mid = 0.5 * (x0 + x1);
            stack.push((mid, x1, 0.5 * t, depth + 1));
            stack.push((x0, mid, 0.5 * t, depth + 1));
        }
    }
    total.ensure_finite("integrate").map(|v| v * sign)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_weights_reproduce_polynomial_derivatives() {
        let nodes = [-0.3, 0.0, 0.1, 0.45, 0.7];
        let w = fd_weights(0.2, &nodes, 3);
        let f = |x: f64| 2.0 - x + 3.0 * x * x - 0.5 * x.powi(3) + x.powi(4);
        let d = [
            f(0.2),
            -1.0 + 6.0 * 0.2 - 1.5 * 0.04 + 4.0 * 0.008,
            6.0 - 3.0 * 0.2 + 12.0 * 0.04,
            -3.0 + 24.0 * 0.2,
        ];
        for k in 0..=3 {
            let approx: f64 = nodes.iter().zip(&w[k]).map(|(x, c)| c * f(*x)).sum();
            assert!((approx - d[k]).abs() < 1e-11, "order {k}: {approx} vs {}", d[k]);
        }
    }

    #[test]
    fn stencil_shifts_at_the_ends() {
        let nodes: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert_eq!(nearest_stencil(&nodes, 0.2, 5), 0..5);
        assert_eq!(nearest_stencil(&nodes, 9.0, 5), 5..10);
        assert_eq!(nearest_stencil(&nodes, 4.4, 5), 3..8);
    }

    #[test]
    fn central_difference_orders() {
        let f = |x: f64| -> Result<f64> { Ok(x.sin()) };
        let x = 0.7;
        assert!((central_difference(f, x, 1e-3, 1).unwrap() - x.cos()).abs() < 1e-12);
        assert!((central_difference(f, x, 1e-3, 2).unwrap() + x.sin()).abs() < 1e-8);
        assert!((central_difference(f, x, 1e-2, 3).unwrap() + x.cos()).abs() < 5e-5);
    }

    #[test]
    fn quadrature_is_accurate() {
        let v = integrate_dual(
            |x| Ok(DualScalar::new(x.exp(), (3.0 * x).cos())),
            0.0,
            2.0,
            1e-12,
        )
        .unwrap();
        assert!((v.re - (2f64.exp() - 1.0)).abs() < 1e-12);
        assert!((v.du - (6f64).sin() / 3.0).abs() < 1e-12);
        let back = integrate_dual(|x| Ok(DualScalar::real(x)), 1.0, 0.0, 1e-12).unwrap();
        assert!((back.re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn spread() {
        assert_eq!(relative_spread(&[2.0, 2.0]), 0.0);
        assert!((relative_spread(&[1.0, 2.0]) - 0.5).abs() < 1e-15);
        assert_eq!(relative_spread(&[]), 0.0);
    }
}
