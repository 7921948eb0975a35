//! Independent reference computations for the integration tests.
//!
//! Everything here is built from composite Gauss–Legendre quadrature with
//! nodes found by Newton iteration on the Legendre recurrence; none of it
//! calls into the library's own special functions or quadrature.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::OnceLock;

use etsim_core::Complex;

pub const GL_POINTS: usize = 20;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_POINTS))
}

/// Composite 20-point Gauss–Legendre over `panels` equal panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (x, w) = rule();
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(w) {
            s += wi * f(mid + 0.5 * h * xi);
        }
        total += 0.5 * h * s;
    }
    total
}

pub fn integrate_complex<F: Fn(f64) -> Complex>(f: F, a: f64, b: f64, panels: usize) -> Complex {
    let (x, w) = rule();
    let h = (b - a) / panels as f64;
    let mut total = Complex::new(0.0, 0.0);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let mut s = Complex::new(0.0, 0.0);
        for (xi, wi) in x.iter().zip(w) {
            s += f(mid + 0.5 * h * xi) * *wi;
        }
        total += s * (0.5 * h);
    }
    total
}

/// `E1(x) = ∫₀^∞ exp(−x e^s) ds`, evaluated as `e^{−x}∫ exp(−x(e^s − 1)) ds`.
pub fn e1_oracle(x: f64) -> f64 {
    assert!(x > 0.0);
    let s_max = (1.0 + 45.0 / x).ln();
    let panels = (s_max / 0.2).ceil().max(4.0) as usize;
    (-x).exp() * integrate(|s| (-x * s.exp_m1()).exp(), 0.0, s_max, panels)
}

/// `erfcx(z) = (2/√π)∫₀^∞ exp(−2zu − u²) du` for `Re z ≥ 0`.
pub fn erfcx_oracle_right(z: Complex) -> Complex {
    assert!(z.re >= 0.0);
    let level = 45.0 + (1.0 + z.norm()).ln();
    let upper = -z.re + (z.re * z.re + level).sqrt();
    let width = 0.25f64.min(1.0 / (z.re + z.im.abs() + 1.0));
    let panels = (upper / width).ceil().max(4.0) as usize;
    let two_z = z * 2.0;
    integrate_complex(|u| (-(two_z * u) - u * u).exp(), 0.0, upper, panels) * (2.0 / PI.sqrt())
}

/// `erfc(z)` from [`erfcx_oracle_right`] and `erfc(−z) = 2 − erfc(z)`.
pub fn erfc_oracle(z: Complex) -> Complex {
    if z.re >= 0.0 {
        (-(z * z)).exp() * erfcx_oracle_right(z)
    } else {
        Complex::new(2.0, 0.0) - (-(z * z)).exp() * erfcx_oracle_right(-z)
    }
}

/// Real `erfc` from the all-positive series
/// `erf(x) = (2/√π)e^{−x²} Σ 2ⁿx^{2n+1}/(2n + 1)!!` for `|x| ≤ 2`, and from
/// the integral representation beyond.
pub fn erfc_real_oracle(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc_real_oracle(-x);
    }
    if x > 2.0 {
        return erfc_oracle(Complex::new(x, 0.0)).re;
    }
    let mut term = x;
    let mut sum = x;
    for n in 1..200 {
        term *= 2.0 * x * x / (2 * n + 1) as f64;
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    1.0 - 2.0 / PI.sqrt() * (-x * x).exp() * sum
}

/// Ensemble average of single-telegraph correlations `σ²e^{−2γτ}` over the
/// log-uniform rate law, integrated in `u = ln γ`.
pub fn chi_oracle(gamma_m: f64, gamma_c: f64, sigma: f64, tau: f64) -> f64 {
    let (a, b) = (gamma_m.ln(), gamma_c.ln());
    let panels = 64;
    sigma * sigma * integrate(|u| (-2.0 * u.exp() * tau).exp(), a, b, panels) / (b - a)
}

/// `D²∫₀ᵗ∫₀ᵗ χ(t′ − t″) dt′ dt″` on the two triangles either side of the diagonal.
pub fn theta_oracle(gamma_m: f64, gamma_c: f64, sigma: f64, d: f64, t: f64) -> f64 {
    let inner = |t1: f64| integrate(|t2| chi_oracle(gamma_m, gamma_c, sigma, t1 - t2), 0.0, t1, 2);
    d * d * integrate(inner, 0.0, t, 2)
}

/// Classical RK4 for a small linear constant-coefficient system `ẏ = My`.
pub fn rk4_linear<const N: usize>(m: [[f64; N]; N], y0: [f64; N], t: f64, steps: usize) -> [f64; N] {
    let h = t / steps as f64;
    let apply = |y: &[f64; N]| {
        let mut out = [0.0; N];
        for i in 0..N {
            for j in 0..N {
                out[i] += m[i][j] * y[j];
            }
        }
        out
    };
    let mut y = y0;
    for _ in 0..steps {
        let k1 = apply(&y);
        let k2 = apply(&std::array::from_fn(|i| y[i] + 0.5 * h * k1[i]));
        let k3 = apply(&std::array::from_fn(|i| y[i] + 0.5 * h * k2[i]));
        let k4 = apply(&std::array::from_fn(|i| y[i] + h * k3[i]));
        for i in 0..N {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    y
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (lx, ly) = (x.ln(), y.ln());
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

pub fn rel_err(a: Complex, b: Complex) -> f64 {
    (a - b).norm() / b.norm()
}
