//! Exponential sums, Weyl sums, windowed deviation, and concentration bounds.
//!
//! The phase-weighted average `exp_sum` is the detector at the heart of the
//! period search: at a frequency whose denominator divides the signal's
//! nearly period its magnitude stays large, while noise and off-period
//! frequencies average out. `weyl_sum_scalar` and `weyl_matrix_sum` are the
//! quadratic-phase analogues used by the eigenvalue estimator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Kahan-Babuska (Neumaier) compensated accumulator.
///
/// Sums here can run to ~10^6 terms; compensation keeps the roundoff well
/// below the detection thresholds (~7e-3) with a large safety margin.
#[derive(Clone, Copy, Debug, Default)]
struct Kbn {
    sum: f64,
    c: f64,
}

impl Kbn {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Compensated complex accumulator (independent real/imaginary channels).
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct KbnComplex {
    re: Kbn,
    im: Kbn,
}

impl KbnComplex {
    pub(crate) fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub(crate) fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// A rational frequency in (0, 1), kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedRational {
    numerator: u64,
    denominator: u64,
}

impl ReducedRational {
    /// Builds `numerator/denominator` reduced to lowest terms.
    ///
    /// The value must lie strictly between 0 and 1.
    pub fn new(numerator: u64, denominator: u64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::Domain("rational with zero denominator".into()));
        }
        if numerator == 0 || numerator >= denominator {
            return Err(Error::Domain(format!(
                "{numerator}/{denominator} is outside (0, 1)"
            )));
        }
        let g = gcd(numerator, denominator);
        Ok(Self {
            numerator: numerator / g,
            denominator: denominator / g,
        })
    }

    /// All reduced fractions in (0, 1) with exactly this denominator,
    /// in increasing numerator order.
    pub fn with_denominator(denominator: u64) -> Vec<Self> {
        (1..denominator)
            .filter(|a| gcd(*a, denominator) == 1)
            .map(|a| Self {
                numerator: a,
                denominator,
            })
            .collect()
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

impl std::fmt::Display for ReducedRational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// A finite complex-valued sample sequence with the global time index of its
/// first sample. `origin_time` is metadata only; all sums index positionally.
#[derive(Clone, Debug)]
pub struct ComplexSeries {
    samples: Vec<Complex64>,
    origin_time: u64,
}

impl ComplexSeries {
    pub fn new(samples: Vec<Complex64>, origin_time: u64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain("empty series".into()));
        }
        if origin_time == 0 {
            return Err(Error::Domain("origin_time must be >= 1".into()));
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("series contains non-finite samples".into()));
        }
        Ok(Self {
            samples,
            origin_time,
        })
    }

    pub fn from_reals(samples: &[f64], origin_time: u64) -> Result<Self> {
        Self::new(
            samples.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            origin_time,
        )
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn origin_time(&self) -> u64 {
        self.origin_time
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false // nonempty by construction
    }
}

/// Sub-Gaussian noise description: the variance proxy R.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SubGaussianSpec {
    proxy: f64,
}

impl SubGaussianSpec {
    pub fn new(proxy: f64) -> Result<Self> {
        if !proxy.is_finite() || proxy < 0.0 {
            return Err(Error::Domain(format!("variance proxy {proxy} must be >= 0")));
        }
        Ok(Self { proxy })
    }

    pub fn proxy(&self) -> f64 {
        self.proxy
    }
}

/// Unit-circle phase table for exp(i 2 pi r / m), r = 0..m.
///
/// Reducing the phase argument modulo m before taking sin/cos keeps every
/// term exact even when the position index runs into the millions.
struct RootTable {
    roots: Vec<Complex64>,
}

impl RootTable {
    const MAX_TABLE: u64 = 1 << 16;

    fn new(m: u64) -> Option<Self> {
        if m == 0 || m > Self::MAX_TABLE {
            return None;
        }
        let roots = (0..m)
            .map(|r| {
                let angle = 2.0 * std::f64::consts::PI * (r as f64) / (m as f64);
                Complex64::new(angle.cos(), angle.sin())
            })
            .collect();
        Some(Self { roots })
    }

    fn get(&self, r: u64) -> Complex64 {
        self.roots[r as usize]
    }
}

fn phase_of(residue: u64, modulus: u64) -> Complex64 {
    let angle = 2.0 * std::f64::consts::PI * (residue as f64) / (modulus as f64);
    Complex64::new(angle.cos(), angle.sin())
}

/// Phase-weighted average (1/T) sum_{j=1..T} a_j exp(i 2 pi q j).
///
/// `j` is the position in the series, starting at 1, regardless of the
/// series' global origin time.
pub fn exp_sum(series: &ComplexSeries, q: ReducedRational) -> Complex64 {
    exp_sum_samples(series.samples.iter().copied(), q).expect("series is nonempty")
}

/// `exp_sum` over any nonempty sample iterator.
pub fn exp_sum_samples<I>(samples: I, q: ReducedRational) -> Result<Complex64>
where
    I: IntoIterator<Item = Complex64>,
{
    let beta = q.denominator();
    let alpha = q.numerator();
    let table = RootTable::new(beta);
    let mut acc = KbnComplex::default();
    let mut residue = 0u64; // (alpha * j) mod beta, starting at j = 0
    let mut count = 0u64;
    for a in samples {
        residue += alpha;
        if residue >= beta {
            residue -= beta;
        }
        let w = match &table {
            Some(t) => t.get(residue),
            None => phase_of(residue, beta),
        };
        acc.add(a * w);
        count += 1;
    }
    if count == 0 {
        return Err(Error::Domain("empty series".into()));
    }
    Ok(acc.value() / count as f64)
}

/// Largest standard deviation over all length-`window` blocks of the series.
///
/// The deviation is the population form sqrt((1/L) sum |a_t - mean|^2). On
/// finite data this windowed maximum stands in for the supremum over an
/// infinite sequence.
pub fn sigma_window(series: &ComplexSeries, window: usize) -> Result<f64> {
    let n = series.samples.len();
    if window == 0 {
        return Err(Error::Domain("window length must be >= 1".into()));
    }
    if n < window {
        return Err(Error::Domain(format!(
            "series of length {n} is shorter than window {window}"
        )));
    }
    let inv = 1.0 / window as f64;
    let mut best = 0.0f64;
    for start in 0..=(n - window) {
        let block = &series.samples[start..start + window];
        let mut mean = KbnComplex::default();
        for &a in block {
            mean.add(a);
        }
        let mean = mean.value() * inv;
        let mut var = Kbn::default();
        for &a in block {
            var.add((a - mean).norm_sqr());
        }
        let v = (var.value() * inv).max(0.0);
        best = best.max(v.sqrt());
    }
    Ok(best)
}

/// Quadratic-phase Weyl sum: sum_{j=0..N} exp(i 2 pi (j 2b/(4q) + j^2/(4q))).
///
/// The sum is unnormalized and has N + 1 terms. Requires b < q.
pub fn weyl_sum_scalar(n: u64, b: u64, q: u64) -> Result<Complex64> {
    if q == 0 {
        return Err(Error::Domain("weyl sum modulus q must be >= 1".into()));
    }
    if b >= q {
        return Err(Error::Domain(format!("weyl sum requires b < q, got b={b}, q={q}")));
    }
    let m = 4 * q;
    let table = RootTable::new(m);
    let mut acc = KbnComplex::default();
    for j in 0..=n {
        let r = j % m;
        // (2b j + j^2) mod 4q, reduced before squaring so it never overflows
        let residue = ((2 * b % m) * r % m + r * r % m) % m;
        let w = match &table {
            Some(t) => t.get(residue),
            None => phase_of(residue, m),
        };
        acc.add(w);
    }
    Ok(acc.value())
}

/// Phase-weighted matrix average (1/N) sum_{j=0..N-1} M_{j+1} exp(i 2 pi j^2 / (4L)).
pub fn weyl_matrix_sum(matrices: &[ComplexMatrix], l: u64) -> Result<ComplexMatrix> {
    if matrices.is_empty() {
        return Err(Error::Domain("weyl matrix sum of zero matrices".into()));
    }
    if l == 0 {
        return Err(Error::Domain("phase length L must be >= 1".into()));
    }
    let rows = matrices[0].rows();
    let cols = matrices[0].cols();
    for m in matrices {
        if m.rows() != rows || m.cols() != cols {
            return Err(Error::Dimension {
                expected: rows * cols,
                got: m.rows() * m.cols(),
            });
        }
    }
    let modulus = 4 * l;
    let table = RootTable::new(modulus);
    let mut acc = vec![KbnComplex::default(); rows * cols];
    for (j, mat) in matrices.iter().enumerate() {
        let r = (j as u64) % modulus;
        let residue = r * r % modulus;
        let w = match &table {
            Some(t) => t.get(residue),
            None => phase_of(residue, modulus),
        };
        for (slot, &entry) in acc.iter_mut().zip(mat.entries()) {
            slot.add(entry * w);
        }
    }
    let inv = 1.0 / matrices.len() as f64;
    ComplexMatrix::new(rows, cols, acc.into_iter().map(|k| k.value() * inv).collect())
}

/// High-probability radius for a noise-weighted average: with probability at
/// least 1 - delta, |(1/n) sum a_j X_j| <= sqrt(4 R^2 log(4/delta) / n) for
/// any unit-modulus weights a_j and R-sub-Gaussian martingale differences X_j.
pub fn concentration_radius(spec: &SubGaussianSpec, n: u64, delta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("sample count must be >= 1".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta {delta} must lie in (0, 1)")));
    }
    let r = spec.proxy();
    Ok((4.0 * r * r * (4.0 / delta).ln() / n as f64).sqrt())
}

/// Upper bound 1 / (sqrt(2) (1 - a^2)^{pi^2/6} a) on |1 / (1 - exp(i 2 pi a))|
/// for a in (0, 1).
pub fn geometric_phase_bound(a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain(format!("argument {a} must lie in (0, 1)")));
    }
    let exponent = std::f64::consts::PI.powi(2) / 6.0;
    Ok(1.0 / (2.0f64.sqrt() * (1.0 - a * a).powf(exponent) * a))
}

/// Constant 1 + 2 / (sqrt(2) pi (3/4)^{pi^2/6}) from the off-period
/// magnitude bound; approximately 1.72257196806914.
pub fn off_period_constant() -> f64 {
    let exponent = std::f64::consts::PI.powi(2) / 6.0;
    1.0 + 2.0 / (2.0f64.sqrt() * std::f64::consts::PI * 0.75f64.powf(exponent))
}

/// Empirical lower-bound constant for the scalar Weyl sum, calibrated at the
/// smallest admissible length N = 16 q^2:
/// min over q <= q_max and b < q of |W(16 q^2, b, q)| sqrt(q) / (16 q^2).
///
/// This is a surrogate for the non-constructive constant in the asymptotic
/// lower bound; it feeds diagnostics only, never control flow.
pub fn weyl_lower_constant(q_max: u64) -> Result<f64> {
    if q_max == 0 {
        return Err(Error::Domain("q_max must be >= 1".into()));
    }
    let mut best = f64::INFINITY;
    for q in 1..=q_max {
        let n = 16 * q * q;
        for b in 0..q {
            let w = weyl_sum_scalar(n, b, q)?;
            best = best.min(w.norm() * (q as f64).sqrt() / n as f64);
        }
    }
    Ok(best)
}

/// Empirical surrogate for the two-sided Weyl ratio constant at N = 16 L^2:
/// the smallest C with C^-1 < |W(N, b, L)| / N < C over all b < L.
pub fn weyl_constant_surrogate(l: u64) -> Result<f64> {
    if l == 0 {
        return Err(Error::Domain("L must be >= 1".into()));
    }
    let n = 16 * l * l;
    let mut c = 1.0f64;
    for b in 0..l {
        let ratio = weyl_sum_scalar(n, b, l)?.norm() / n as f64;
        if ratio <= 0.0 {
            return Err(Error::Numerical(format!("weyl sum vanished at b={b}, L={l}")));
        }
        c = c.max(ratio).max(1.0 / ratio);
    }
    Ok(c)
}
