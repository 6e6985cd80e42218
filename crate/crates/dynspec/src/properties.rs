//! The numeric property suite: self-contained checks of the analytic bounds
//! and structural identities the estimators rely on. Each check is
//! deterministic and reports one pass/fail line.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::eigen::{arm_schedule, build_a_matrices, run_schedule, structured_signal_matrix, EigenConfig};
use crate::envs::{random_unit_vectors, LinearSystemEnv, NoiseModel};
use crate::linalg::{pseudo_inverse, truncate_singular, ComplexMatrix};
use crate::numerics::{
    concentration_radius, exp_sum_samples, geometric_phase_bound, off_period_constant,
    weyl_lower_constant, weyl_sum_scalar, ReducedRational, SubGaussianSpec,
};

#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl PropertyResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

fn random_complex_matrix(rng: &mut ChaCha12Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let entries = (0..rows * cols)
        .map(|_| {
            Complex64::new(
                rng.sample::<f64, _>(StandardNormal),
                rng.sample::<f64, _>(StandardNormal),
            )
        })
        .collect();
    ComplexMatrix::new(rows, cols, entries).expect("finite entries")
}

/// (a) Moore-Penrose axioms on 100 random matrices, including rank-deficient
/// ones, to 1e-8.
pub fn prop_moore_penrose_axioms() -> PropertyResult {
    let mut rng = ChaCha12Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let n = 3 + (i % 5);
        let a = if i % 3 == 0 {
            // force rank deficiency through a thin factorization
            let rank = 1 + (i % (n - 1));
            let left = random_complex_matrix(&mut rng, n, rank);
            let right = random_complex_matrix(&mut rng, rank, n);
            left.mul(&right).expect("dims agree")
        } else {
            random_complex_matrix(&mut rng, n, n)
        };
        let p = match pseudo_inverse(&a) {
            Ok(p) => p,
            Err(e) => return PropertyResult::new("moore-penrose-axioms", false, e.to_string()),
        };
        let apa = a.mul(&p).unwrap().mul(&a).unwrap();
        let pap = p.mul(&a).unwrap().mul(&p).unwrap();
        let ap = a.mul(&p).unwrap();
        let pa = p.mul(&a).unwrap();
        worst = worst
            .max(apa.sub(&a).unwrap().frobenius_norm())
            .max(pap.sub(&p).unwrap().frobenius_norm())
            .max(ap.adjoint().sub(&ap).unwrap().frobenius_norm())
            .max(pa.adjoint().sub(&pa).unwrap().frobenius_norm());
    }
    PropertyResult::new(
        "moore-penrose-axioms",
        worst < 1e-8,
        format!("worst axiom residual {worst:.3e} over 100 matrices (tolerance 1e-8)"),
    )
}

/// (b) Spectral-norm truncation bound ||A - A_gamma|| < gamma.
pub fn prop_truncation_bound() -> PropertyResult {
    let mut rng = ChaCha12Rng::seed_from_u64(202);
    let mut worst_margin = f64::INFINITY;
    for i in 0..40 {
        let n = 3 + (i % 4);
        let a = random_complex_matrix(&mut rng, n, n);
        for gamma in [0.05, 0.5, 1.5, 4.0] {
            let t = match truncate_singular(&a, gamma) {
                Ok(t) => t,
                Err(e) => return PropertyResult::new("truncation-bound", false, e.to_string()),
            };
            let diff = a.sub(&t).unwrap().spectral_norm().unwrap();
            worst_margin = worst_margin.min(gamma - diff);
            if diff >= gamma {
                return PropertyResult::new(
                    "truncation-bound",
                    false,
                    format!("||A - A_gamma|| = {diff} at gamma = {gamma}"),
                );
            }
        }
    }
    PropertyResult::new(
        "truncation-bound",
        true,
        format!("||A - A_gamma|| < gamma everywhere (smallest margin {worst_margin:.3e})"),
    )
}

/// (c) The reciprocal-phase bound dominates the exact magnitude on the grid
/// a = 0.01, 0.02, ..., 0.99.
pub fn prop_phase_bound_grid() -> PropertyResult {
    let mut worst = f64::INFINITY;
    for k in 1..100u32 {
        let a = f64::from(k) * 0.01;
        let angle = 2.0 * std::f64::consts::PI * a;
        let exact = 1.0 / (Complex64::new(1.0 - angle.cos(), -angle.sin())).norm();
        let bound = geometric_phase_bound(a).expect("grid point in (0,1)");
        worst = worst.min(bound - exact);
        if bound < exact {
            return PropertyResult::new(
                "phase-bound-grid",
                false,
                format!("bound {bound} below exact {exact} at a = {a}"),
            );
        }
    }
    PropertyResult::new(
        "phase-bound-grid",
        true,
        format!("bound dominates on all 99 grid points (smallest margin {worst:.3e})"),
    )
}

/// (d) Monte-Carlo check of the concentration radius: the weighted noise
/// average exceeds it with frequency at most delta over 10^4 trials.
pub fn prop_concentration_monte_carlo() -> PropertyResult {
    let spec = SubGaussianSpec::new(0.3).expect("valid proxy");
    let n = 500usize;
    let trials = 10_000usize;
    let mut detail = String::new();
    for delta in [0.05, 0.2] {
        let radius = concentration_radius(&spec, n as u64, delta).expect("valid");
        let mut rng = ChaCha12Rng::seed_from_u64(404);
        let mut exceed = 0usize;
        for _ in 0..trials {
            let mut acc = Complex64::new(0.0, 0.0);
            for _ in 0..n {
                let x: f64 = rng.sample::<f64, _>(StandardNormal) * spec.proxy();
                let phase = rng.gen::<f64>() * 2.0 * std::f64::consts::PI;
                acc += Complex64::new(phase.cos(), phase.sin()) * x;
            }
            if (acc / n as f64).norm() > radius {
                exceed += 1;
            }
        }
        let freq = exceed as f64 / trials as f64;
        detail.push_str(&format!("delta={delta}: exceedance {freq:.4}; "));
        if freq > delta {
            return PropertyResult::new("concentration-monte-carlo", false, detail);
        }
    }
    PropertyResult::new("concentration-monte-carlo", true, detail)
}

/// (e) Weyl-sum lower bound |W(N, b, q)| >= c N / sqrt(q) at N = 16 q^2 for
/// q <= 10 and all b < q, with c the calibrated empirical constant.
pub fn prop_weyl_lower_bound() -> PropertyResult {
    let c = match weyl_lower_constant(10) {
        Ok(c) => c,
        Err(e) => return PropertyResult::new("weyl-lower-bound", false, e.to_string()),
    };
    // allow only for roundoff at the calibration minimum itself
    let slack = 1.0 - 1e-12;
    for q in 1..=10u64 {
        let n = 16 * q * q;
        for b in 0..q {
            let w = weyl_sum_scalar(n, b, q).expect("b < q").norm();
            let floor = c * slack * n as f64 / (q as f64).sqrt();
            if w < floor {
                return PropertyResult::new(
                    "weyl-lower-bound",
                    false,
                    format!("|W({n},{b},{q})| = {w} below {floor}"),
                );
            }
        }
    }
    PropertyResult::new(
        "weyl-lower-bound",
        true,
        format!("holds for all q <= 10 at N = 16 q^2 with c = {c:.6}"),
    )
}

/// (f) Noiseless matrix assembly equals the structured product
/// X Q_N M^{sd+N-1} K at d = 3, to 1e-8.
pub fn prop_structured_equivalence() -> PropertyResult {
    let matrix = vec![
        vec![0.0, 0.0, 1.0],
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
    ];
    let theta = vec![0.6, -0.64, 0.48];
    let arms = random_unit_vectors(3, 3, 606);
    let cfg = EigenConfig {
        n: 144,
        l: 3,
        dim: 3,
        delta: 0.2,
        noise_proxy: 0.0,
        spectral_gap: 1.0,
        kappa: 1.0,
        traj_bound: 1.0,
        seed: 606,
        allow_undersized: true,
    };
    let mut env = match LinearSystemEnv::new(matrix.clone(), theta.clone(), NoiseModel::none()) {
        Ok(env) => env,
        Err(e) => return PropertyResult::new("structured-equivalence", false, e.to_string()),
    };
    let buffer = match run_schedule(&mut env, &cfg, &arms) {
        Ok(b) => b,
        Err(e) => return PropertyResult::new("structured-equivalence", false, e.to_string()),
    };
    let (a0, a1) = match build_a_matrices(&buffer, &cfg) {
        Ok(p) => p,
        Err(e) => return PropertyResult::new("structured-equivalence", false, e.to_string()),
    };
    let mut worst = 0.0f64;
    for (s, a) in [(0u64, &a0), (1u64, &a1)] {
        let oracle = match structured_signal_matrix(&matrix, &theta, &arms, &cfg, s) {
            Ok(o) => o,
            Err(e) => return PropertyResult::new("structured-equivalence", false, e.to_string()),
        };
        worst = worst.max(a.sub(&oracle).unwrap().frobenius_norm());
    }
    PropertyResult::new(
        "structured-equivalence",
        worst < 1e-8,
        format!("largest assembly deviation {worst:.3e} (tolerance 1e-8)"),
    )
}

/// (g) The matrix-entry index map covers the scheduled pull window exactly
/// once and always lands on its own arm, for d in {2, 3, 5}.
pub fn prop_schedule_bijection() -> PropertyResult {
    for (n, dim) in [(32u64, 2usize), (27, 3), (16, 5)] {
        let d = dim as u64;
        let window = (2 * n * d * d) as usize;
        let mut seen = vec![false; window];
        for s in 0..2u64 {
            for k in 1..=d {
                for col in 1..=d {
                    for j in 0..n {
                        let t = 2 * (k - 1) * d + s * d + 2 * d * d * j + n + col;
                        let idx = (t - n - 1) as usize;
                        if idx >= window || seen[idx] {
                            return PropertyResult::new(
                                "schedule-bijection",
                                false,
                                format!("index {t} out of range or duplicated (d={dim})"),
                            );
                        }
                        seen[idx] = true;
                        match arm_schedule(t, n, dim) {
                            Ok(m) if m as u64 == k => {}
                            other => {
                                return PropertyResult::new(
                                    "schedule-bijection",
                                    false,
                                    format!("time {t} scheduled {other:?}, entry needs arm {k}"),
                                )
                            }
                        }
                    }
                }
            }
        }
        if !seen.iter().all(|&b| b) {
            return PropertyResult::new(
                "schedule-bijection",
                false,
                format!("window not fully covered at d = {dim}"),
            );
        }
    }
    PropertyResult::new(
        "schedule-bijection",
        true,
        "entry indices partition the pull window exactly for d in {2, 3, 5}".into(),
    )
}

/// (h) Off-period upper bound on exactly periodic signals: for every L,
/// beta <= 8 with beta not dividing L and every reduced alpha/beta,
/// |R((a_j); alpha/beta)| <= L beta C0 sup|a| / T. The L^2 variant printed
/// with the bound follows whenever beta <= L.
pub fn prop_off_period_upper_bound() -> PropertyResult {
    let mut rng = ChaCha12Rng::seed_from_u64(808);
    let c0 = off_period_constant();
    let mut worst_margin = f64::INFINITY;
    for l in 1..=8usize {
        let base: Vec<Complex64> = (0..l)
            .map(|_| {
                Complex64::new(
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                )
            })
            .collect();
        let sup = base.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        for t in [533usize, 1000, 2048] {
            let signal: Vec<Complex64> = (0..t).map(|j| base[j % l]).collect();
            for beta in 2..=8u64 {
                if (l as u64).is_multiple_of(beta) {
                    continue;
                }
                for q in ReducedRational::with_denominator(beta) {
                    let mag = exp_sum_samples(signal.iter().copied(), q)
                        .expect("nonempty")
                        .norm();
                    let bound = (l as f64) * (beta as f64) * c0 * sup / t as f64;
                    worst_margin = worst_margin.min(bound - mag);
                    if mag > bound {
                        return PropertyResult::new(
                            "off-period-upper-bound",
                            false,
                            format!("L={l} beta={beta} q={q} T={t}: |R| = {mag} > {bound}"),
                        );
                    }
                }
            }
        }
    }
    PropertyResult::new(
        "off-period-upper-bound",
        true,
        format!("holds for all L, beta <= 8 (smallest margin {worst_margin:.3e})"),
    )
}

/// Runs the full suite in its canonical order.
pub fn run_property_suite() -> Vec<PropertyResult> {
    vec![
        prop_moore_penrose_axioms(),
        prop_truncation_bound(),
        prop_phase_bound_grid(),
        prop_concentration_monte_carlo(),
        prop_weyl_lower_bound(),
        prop_structured_equivalence(),
        prop_schedule_bijection(),
        prop_off_period_upper_bound(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::svd;

    #[test]
    fn all_properties_pass() {
        for result in run_property_suite() {
            assert!(result.passed, "{}: {}", result.name, result.detail);
        }
    }

    #[test]
    fn svd_backs_the_truncation_check() {
        // sanity link: the truncation property is exercised through the same
        // svd the library exposes
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let a = random_complex_matrix(&mut rng, 4, 4);
        let f = svd(&a).unwrap();
        assert_eq!(f.singular_values.len(), 4);
    }
}
