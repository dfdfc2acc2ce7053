//! Reference oracles for the integration tests.
//!
//! Everything here evaluates the *definition* of the quantity under test and
//! nothing from the solver's closed forms: the Hamiltonian minimum is found
//! by one-dimensional line search and by brute-force grid scan, never via
//! the cost constant or the conjugate exponent. A bug in those formulas
//! therefore cannot cancel out of these checks.

#![allow(dead_code)]

/// inf over v of ξ·v + |v|^α, by reducing to a ray and line-searching.
///
/// For any fixed magnitude t = |v|, the inner product ξ·v is minimized by
/// pointing v against ξ (Cauchy–Schwarz), so the infimum over all of R^N
/// equals min over t ≥ 0 of f(t) = t^α − |ξ| t. f is strictly convex for
/// α > 1, hence unimodal, and golden-section search applies. The bracket's
/// right end is a calculus bound on the minimizer, used only to bound the
/// search interval.
pub fn legendre_oracle(xi: &[f64], alpha: f64) -> f64 {
    assert!(alpha > 1.0, "oracle needs alpha > 1, got {alpha}");
    let norm = xi.iter().map(|z| z * z).sum::<f64>().sqrt();
    if norm == 0.0 {
        return 0.0;
    }
    let f = |t: f64| t.powf(alpha) - norm * t;
    let mut a = 0.0_f64;
    let mut b = (norm / alpha).powf(1.0 / (alpha - 1.0)) + 1.0;
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..300 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    f(0.5 * (a + b))
}

/// Same infimum by two-stage dense scan over a box in R^N — no ray
/// reduction, so it also cross-validates `legendre_oracle` itself.
/// Intended for N ≤ 2 and moderately scaled ξ; accuracy ~1e-2 relative.
pub fn legendre_scan_oracle(xi: &[f64], alpha: f64) -> f64 {
    assert!(alpha > 1.0, "oracle needs alpha > 1, got {alpha}");
    let n = xi.len();
    let norm = xi.iter().map(|z| z * z).sum::<f64>().sqrt();
    let half = (norm / alpha).powf(1.0 / (alpha - 1.0)) + 1.0;
    let objective = |v: &[f64]| -> f64 {
        let dot: f64 = v.iter().zip(xi).map(|(a, b)| a * b).sum();
        let mag = v.iter().map(|z| z * z).sum::<f64>().sqrt();
        dot + mag.powf(alpha)
    };
    let scan = |center: &[f64], half_width: f64, per_axis: usize| -> (Vec<f64>, f64) {
        let mut best_v = center.to_vec();
        let mut best = objective(center);
        let mut idx = vec![0usize; n];
        loop {
            let v: Vec<f64> = (0..n)
                .map(|k| {
                    center[k] - half_width
                        + 2.0 * half_width * idx[k] as f64 / (per_axis - 1) as f64
                })
                .collect();
            let val = objective(&v);
            if val < best {
                best = val;
                best_v = v;
            }
            // odometer increment over the N-dimensional lattice
            let mut k = 0;
            loop {
                if k == n {
                    return (best_v, best);
                }
                idx[k] += 1;
                if idx[k] < per_axis {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    };
    let (coarse_v, _) = scan(&vec![0.0; n], half, 41);
    let fine_half = 2.0 * (2.0 * half / 40.0);
    let (_, best) = scan(&coarse_v, fine_half, 41);
    best
}

#[cfg(test)]
mod self_checks {
    use super::*;

    #[test]
    fn quadratic_case_is_exact() {
        // α = 2: min of t² − |ξ|t is −|ξ|²/4 at t = |ξ|/2 (high-school algebra).
        for norm in [0.1, 1.0, 3.0] {
            let got = legendre_oracle(&[norm], 2.0);
            assert!((got - (-norm * norm / 4.0)).abs() < 1e-12);
        }
    }
}
