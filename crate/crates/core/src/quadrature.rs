//! Quadrature and finite-difference helpers shared by the solver and the diagnostics.

use thiserror::Error;

/// Absolute tolerance for adaptive Simpson integration.
pub const SIMPSON_ABS_TOL: f64 = 1e-10;
/// Relative tolerance for adaptive Simpson integration.
pub const SIMPSON_REL_TOL: f64 = 1e-8;

const MAX_DEPTH: u32 = 48;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadratureError {
    #[error("adaptive quadrature did not converge on [{a}, {b}]")]
    NotConverged { a: f64, b: f64 },
    #[error("integrand is not finite at x = {x}")]
    NonFinite { x: f64 },
}

/// Oriented adaptive Simpson integral of `f` over `[a, b]` (negative when `b < a`).
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64, QuadratureError> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return adaptive_simpson(f, b, a).map(|v| -v);
    }
    let eval = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadratureError::NonFinite { x })
        }
    };
    // Seed with four panels so integrands with a kink at the midpoint are still resolved.
    let mut total = 0.0;
    let quarter = (b - a) / 4.0;
    for k in 0..4 {
        let lo = a + quarter * k as f64;
        let hi = lo + quarter;
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (eval(lo)?, eval(mid)?, eval(hi)?);
        let est = quarter / 6.0 * (flo + 4.0 * fmid + fhi);
        total += simpson_rec(&eval, lo, hi, flo, fmid, fhi, est, SIMPSON_ABS_TOL / 4.0, MAX_DEPTH)?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> Result<f64, QuadratureError>>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    abs_tol: f64,
    depth: u32,
) -> Result<f64, QuadratureError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let sum = left + right;
    let delta = sum - whole;
    let tol = abs_tol.max(SIMPSON_REL_TOL * sum.abs());
    if delta.abs() <= 15.0 * tol {
        return Ok(sum + delta / 15.0);
    }
    if depth == 0 {
        return Err(QuadratureError::NotConverged { a, b });
    }
    Ok(simpson_rec(f, a, m, fa, flm, fm, left, abs_tol / 2.0, depth - 1)?
        + simpson_rec(f, m, b, fm, frm, fb, right, abs_tol / 2.0, depth - 1)?)
}

/// Parity of a radial field under `r -> -r`, used to extend samples across the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Linear interpolation of cell-centred samples `values` (spacing `h`, first centre at
/// `h/2`) at radius `r`. Between the origin and the first centre the field is extended
/// to `-h/2` by its parity. Returns `None` beyond the last centre.
pub fn interpolate(values: &[f64], h: f64, r: f64, parity: Parity) -> Option<f64> {
    let n = values.len();
    if n == 0 || r < 0.0 {
        return None;
    }
    let x = r / h - 0.5;
    if x < 0.0 {
        let ghost = parity.sign() * values[0];
        let w = x + 1.0;
        return Some(ghost + (values[0] - ghost) * w);
    }
    let j = x.floor() as usize;
    if j + 1 >= n {
        return if j == n - 1 && x - (j as f64) < 1e-12 {
            Some(values[n - 1])
        } else {
            None
        };
    }
    let w = x - j as f64;
    Some(values[j] + (values[j + 1] - values[j]) * w)
}

/// Trapezoid integral over `[0, upper]` of the piecewise-linear interpolant through the
/// cell-centred samples `g`, with the value at `r = 0` extrapolated linearly from the first
/// two centres. `upper` may not exceed the last centre by more than half a cell.
pub fn integrate_to(g: &[f64], h: f64, upper: f64) -> Option<f64> {
    let n = g.len();
    if n < 2 || upper < 0.0 || upper > n as f64 * h + 1e-12 * h {
        return None;
    }
    if upper == 0.0 {
        return Some(0.0);
    }
    let g_origin = 1.5 * g[0] - 0.5 * g[1];
    let value_at = |r: f64| -> f64 {
        let x = r / h - 0.5;
        if x < 0.0 {
            g_origin + (g[0] - g_origin) * (r / (0.5 * h))
        } else {
            let j = (x.floor() as usize).min(n - 2);
            let w = x - j as f64;
            g[j] + (g[j + 1] - g[j]) * w
        }
    };
    let mut total = 0.0;
    let mut prev_r = 0.0;
    let mut prev_g = g_origin;
    for (j, &gj) in g.iter().enumerate() {
        let rj = (j as f64 + 0.5) * h;
        if rj >= upper {
            break;
        }
        total += 0.5 * (rj - prev_r) * (gj + prev_g);
        prev_r = rj;
        prev_g = gj;
    }
    let g_upper = value_at(upper);
    total += 0.5 * (upper - prev_r) * (g_upper + prev_g);
    Some(total)
}

/// Running integrals `∫_0^{r_j} g` at every cell centre, same interpolant as [`integrate_to`].
pub fn cumulative(g: &[f64], h: f64) -> Vec<f64> {
    let n = g.len();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let g_origin = if n > 1 { 1.5 * g[0] - 0.5 * g[1] } else { g[0] };
    let mut acc = 0.25 * h * (g_origin + g[0]);
    out.push(acc);
    for j in 1..n {
        acc += 0.5 * h * (g[j - 1] + g[j]);
        out.push(acc);
    }
    out
}

/// Running integrals `∫_0^{r_j} g` like [`cumulative`], but on the first half cell `g` is
/// taken as the power law `g_0 (r / r_0)^p` through the first two samples, with `p` clamped
/// to `[-0.9, 10]`. Suited to integrands that behave like `r^p` at the origin.
pub fn cumulative_power(g: &[f64], h: f64) -> Vec<f64> {
    let n = g.len();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let r0 = 0.5 * h;
    let p = if n > 1 && g[0] > 0.0 && g[1] > 0.0 {
        ((g[1] / g[0]).ln() / 3f64.ln()).clamp(-0.9, 10.0)
    } else {
        1.0
    };
    let mut acc = g[0] * r0 / (p + 1.0);
    out.push(acc);
    for j in 1..n {
        acc += 0.5 * h * (g[j - 1] + g[j]);
        out.push(acc);
    }
    out
}

/// Trapezoid rule over scattered abscissae.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Integral over `[a, b]` of the piecewise-linear interpolant through `(xs, ys)`, with `xs`
/// increasing and `[a, b]` inside `[xs[0], xs[last]]`. Returns `None` otherwise.
pub fn integrate_clipped(xs: &[f64], ys: &[f64], a: f64, b: f64) -> Option<f64> {
    let n = xs.len();
    if n < 2 || ys.len() != n || a > b || a < xs[0] || b > xs[n - 1] {
        return None;
    }
    let value_at = |k: usize, x: f64| -> f64 {
        let w = (x - xs[k]) / (xs[k + 1] - xs[k]);
        ys[k] + (ys[k + 1] - ys[k]) * w
    };
    let mut total = 0.0;
    for k in 0..n - 1 {
        let lo = xs[k].max(a);
        let hi = xs[k + 1].min(b);
        if hi > lo {
            total += 0.5 * (hi - lo) * (value_at(k, lo) + value_at(k, hi));
        }
    }
    Some(total)
}

/// Fourth-order radial derivative of a cell-centred odd field. The origin uses the odd
/// reflection `u(-r) = -u(r)`; the outer edge uses one-sided fourth-order stencils.
pub fn radial_derivative(u: &[f64], h: f64, out: &mut [f64]) {
    let n = u.len();
    assert_eq!(out.len(), n);
    assert!(n >= 5, "radial_derivative needs at least five cells");
    let c = 1.0 / (12.0 * h);
    let at = |j: isize| -> f64 {
        if j < 0 {
            -u[(-j - 1) as usize]
        } else {
            u[j as usize]
        }
    };
    for j in 0..n - 2 {
        let j = j as isize;
        out[j as usize] = c * (at(j - 2) - 8.0 * at(j - 1) + 8.0 * at(j + 1) - at(j + 2));
    }
    let j = n - 2;
    out[j] = c * (3.0 * u[j + 1] + 10.0 * u[j] - 18.0 * u[j - 1] + 6.0 * u[j - 2] - u[j - 3]);
    let j = n - 1;
    out[j] = c * (25.0 * u[j] - 48.0 * u[j - 1] + 36.0 * u[j - 2] - 16.0 * u[j - 3] + 3.0 * u[j - 4]);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn centres(n: usize, h: f64) -> Vec<f64> {
        (0..n).map(|j| (j as f64 + 0.5) * h).collect()
    }

    #[test]
    fn simpson_polynomial_and_orientation() {
        let v = adaptive_simpson(|x| x * x, 0.0, 3.0).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
        let w = adaptive_simpson(|x| x * x, 3.0, 0.0).unwrap();
        assert!((w + 9.0).abs() < 1e-12);
        assert_eq!(adaptive_simpson(|x| x, 1.0, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn simpson_handles_kinks() {
        // ∫_0^10 |sin| = 6 + (1 - cos(10 - 3π))
        let exact = 6.0 + 1.0 - (10.0 - 3.0 * std::f64::consts::PI).cos();
        let v = adaptive_simpson(|x: f64| x.sin().abs(), 0.0, 10.0).unwrap();
        assert!((v - exact).abs() < 1e-8, "{v} vs {exact}");
    }

    #[test]
    fn simpson_reports_non_finite() {
        let err = adaptive_simpson(|x| 1.0 / x, 0.0, 1.0).unwrap_err();
        assert!(matches!(err, QuadratureError::NonFinite { .. }));
    }

    #[test]
    fn interpolation_uses_parity_near_origin() {
        let h = 0.1;
        let u: Vec<f64> = centres(10, h).iter().map(|r| 2.0 * r).collect();
        assert!((interpolate(&u, h, 0.0, Parity::Odd).unwrap()).abs() < 1e-15);
        assert!((interpolate(&u, h, 0.02, Parity::Odd).unwrap() - 0.04).abs() < 1e-14);
        assert!((interpolate(&u, h, 0.5, Parity::Odd).unwrap() - 1.0).abs() < 1e-14);
        let e = vec![3.0; 10];
        assert_eq!(interpolate(&e, h, 0.01, Parity::Even).unwrap(), 3.0);
        assert!(interpolate(&e, h, 0.99, Parity::Even).is_none());
    }

    #[test]
    fn integrate_to_is_exact_for_linear_integrands() {
        let h = 1.0 / 64.0;
        let g: Vec<f64> = centres(128, h).iter().map(|r| 1.0 + 3.0 * r).collect();
        for &upper in &[0.0, 0.003, 0.25, 0.7, 1.0, 1.3] {
            let exact = upper + 1.5 * upper * upper;
            let v = integrate_to(&g, h, upper).unwrap();
            assert!((v - exact).abs() < 1e-13, "upper {upper}: {v} vs {exact}");
        }
        assert!(integrate_to(&g, h, 2.5).is_none());
    }

    #[test]
    fn integrate_to_is_second_order() {
        let err = |h: f64| {
            let n = (2.0 / h) as usize;
            let g: Vec<f64> = centres(n, h).iter().map(|r| r * r).collect();
            (integrate_to(&g, h, 1.0).unwrap() - 1.0 / 3.0).abs()
        };
        let ratio = err(1.0 / 64.0) / err(1.0 / 128.0);
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn cumulative_matches_integrate_to() {
        let h = 0.05;
        let g: Vec<f64> = centres(40, h).iter().map(|r| r.sin()).collect();
        let c = cumulative(&g, h);
        for j in [0, 1, 7, 39] {
            let r = (j as f64 + 0.5) * h;
            assert!((c[j] - integrate_to(&g, h, r).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_is_fourth_order() {
        let err = |h: f64| {
            let r = centres((2.0 / h) as usize, h);
            let u: Vec<f64> = r.iter().map(|x| x.sin()).collect();
            let mut d = vec![0.0; u.len()];
            radial_derivative(&u, h, &mut d);
            r.iter().zip(&d).map(|(x, d)| (d - x.cos()).abs()).fold(0.0, f64::max)
        };
        let order = (err(1.0 / 32.0) / err(1.0 / 64.0)).log2();
        assert!(order > 3.7, "order {order}");
    }

    #[test]
    fn trapezoid_on_uneven_nodes() {
        let xs = [0.0, 0.5, 2.0];
        let ys = [1.0, 1.0, 1.0];
        assert_eq!(trapezoid(&xs, &ys), 2.0);
    }

    #[test]
    fn clipped_integral_of_linear_data() {
        let xs = [0.0, 0.5, 1.0, 2.0];
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x + 1.0).collect();
        let v = integrate_clipped(&xs, &ys, 0.25, 1.5).unwrap();
        let exact = |x: f64| 1.5 * x * x + x;
        assert!((v - (exact(1.5) - exact(0.25))).abs() < 1e-14);
        assert_eq!(integrate_clipped(&xs, &ys, 1.0, 1.0), Some(0.0));
        assert!(integrate_clipped(&xs, &ys, -0.1, 1.0).is_none());
    }

    #[test]
    fn power_law_first_cell() {
        let h = 0.01;
        for p in [0.0, 1.0, 2.0, 3.0] {
            let g: Vec<f64> = centres(50, h).iter().map(|r: &f64| r.powf(p)).collect();
            let c = cumulative_power(&g, h);
            let exact = (0.5 * h).powf(p + 1.0) / (p + 1.0);
            assert!((c[0] - exact).abs() <= 1e-12 * exact.max(1e-300), "p={p}");
        }
        assert_eq!(cumulative_power(&[0.0; 4], h), vec![0.0; 4]);
    }
}
