//! Reference evaluations that share no code with the production paths.

use crate::waveguide::Mode;

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on
/// `P_n`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            deriv = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let step = pn / deriv;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss–Legendre over `[a, b]` with `panels` equal panels.
pub fn composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in rule.0.iter().zip(&rule.1) {
            sum += w * f(mid + 0.5 * h * x);
        }
    }
    0.5 * h * sum
}

/// Lamb shift of one propagating channel straight from the k-space
/// definition, `P∫dk g²ω_j²/[ω_{j,k}(ω − ω_{j,k})]`.
///
/// The window `(k_j − ε, k_j + ε)` is cut out symmetrically, each side is
/// mapped with `k = k_j ∓ ε·e^s`, and three window widths are combined to
/// cancel the `ε` and `ε³` terms.
pub fn lamb_shift_pv(mode: &Mode, omega: f64, g: f64) -> f64 {
    let wj = mode.cutoff;
    assert!(omega > wj, "oracle needs a propagating channel");
    let kj = (omega * omega - wj * wj).sqrt();
    let rule = gauss_legendre(24);
    let far = 1e12;
    let f = |k: f64| {
        let wk = (wj * wj + k * k).sqrt();
        // ω − ω_{j,k} without cancellation near the pole
        let gap = (kj - k) * (kj + k) / (omega + wk);
        g * g * wj * wj / (wk * gap)
    };
    let excluded = |eps: f64| {
        let left_end = (kj / eps).ln();
        let left = composite(
            |s| {
                let d = eps * s.exp();
                f(kj - d) * d
            },
            0.0,
            left_end,
            (left_end * 4.0).ceil().max(1.0) as usize,
            &rule,
        );
        let right_end = ((far - kj) / eps).ln();
        let right = composite(
            |s| {
                let d = eps * s.exp();
                f(kj + d) * d
            },
            0.0,
            right_end,
            (right_end * 4.0).ceil() as usize,
            &rule,
        );
        // ∫_far^∞ of the −g²ω_j²/k² tail
        left + right - g * g * wj * wj / far
    };
    let eps = 0.05 * kj.min(1.0);
    let (i1, i2, i3) = (excluded(eps), excluded(eps / 2.0), excluded(eps / 4.0));
    let j1 = 2.0 * i2 - i1;
    let j2 = 2.0 * i3 - i2;
    // Both k and −k contribute equally.
    2.0 * (8.0 * j2 - j1) / 7.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact() {
        let (x, w) = gauss_legendre(24);
        for degree in 0..=47 {
            let sum: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(degree)).sum();
            let exact = if degree % 2 == 0 { 2.0 / (degree as f64 + 1.0) } else { 0.0 };
            assert!((sum - exact).abs() < 1e-14, "degree {degree}");
        }
        let (x, w) = gauss_legendre(5);
        assert_eq!(x.len(), 5);
        assert!(x[2].abs() < 1e-16);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-15);
    }
}
