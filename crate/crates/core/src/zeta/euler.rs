use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::primes::{is_prime, primes_up_to};
use super::shintani::ZetaValue;
use crate::error::{Error, Result};
use crate::linalg;

/// Default prime cutoff for polynomial Euler products.
pub const DEFAULT_PRIME_CUTOFF: u64 = 10_000;

const POLE_EPS: f64 = 1e-300;

/// `prod_l (1 - alpha_l exp(-<a_l, s>))^{-1}` with `|alpha_l| <= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFiniteEuler", into = "RawFiniteEuler")]
pub struct FiniteEulerSpec {
    dim: usize,
    alpha: Vec<f64>,
    a: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct RawFiniteEuler {
    dim: usize,
    alpha: Vec<f64>,
    a: Vec<Vec<f64>>,
}

impl TryFrom<RawFiniteEuler> for FiniteEulerSpec {
    type Error = Error;
    fn try_from(raw: RawFiniteEuler) -> Result<Self> {
        FiniteEulerSpec::new(raw.dim, raw.alpha, raw.a)
    }
}

impl From<FiniteEulerSpec> for RawFiniteEuler {
    fn from(s: FiniteEulerSpec) -> Self {
        RawFiniteEuler { dim: s.dim, alpha: s.alpha, a: s.a }
    }
}

impl FiniteEulerSpec {
    pub fn new(dim: usize, alpha: Vec<f64>, a: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpec("d must be positive".into()));
        }
        if alpha.len() != a.len() {
            return Err(Error::InvalidSpec(format!("{} alphas for {} vectors a", alpha.len(), a.len())));
        }
        if let Some(l) = alpha.iter().position(|x| !(x.abs() <= 1.0)) {
            return Err(Error::InvalidSpec(format!("|alpha[{l}]| = {} exceeds 1", alpha[l].abs())));
        }
        if let Some(l) = a.iter().position(|v| v.len() != dim || v.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidSpec(format!("a[{l}] must be a finite vector of length {dim}")));
        }
        Ok(FiniteEulerSpec { dim, alpha, a })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    /// `alpha_l exp(-<a_l, s>)` for every factor.
    pub fn ratios(&self, s: &[Complex64]) -> Vec<Complex64> {
        self.alpha
            .iter()
            .zip(&self.a)
            .map(|(&al, a)| (-linalg::dot_complex(a, s)).exp() * al)
            .collect()
    }

    /// Real ratios `A_l = alpha_l exp(-<a_l, sigma>)`.
    pub fn real_ratios(&self, sigma: &[f64]) -> Vec<f64> {
        self.alpha
            .iter()
            .zip(&self.a)
            .map(|(&al, a)| al * (-linalg::dot(a, sigma)).exp())
            .collect()
    }

    fn check_arg(&self, s: &[Complex64]) -> Result<()> {
        if s.len() != self.dim {
            return Err(Error::InvalidSpec(format!("argument has length {}, expected d = {}", s.len(), self.dim)));
        }
        Ok(())
    }
}

/// Exact product of the `m` factors.
pub fn finite_euler_eval(spec: &FiniteEulerSpec, s: &[Complex64]) -> Result<Complex64> {
    spec.check_arg(s)?;
    let mut value = Complex64::new(1.0, 0.0);
    for (index, ratio) in spec.ratios(s).into_iter().enumerate() {
        let denom = Complex64::new(1.0, 0.0) - ratio;
        if denom.norm() < POLE_EPS {
            return Err(Error::Pole { index, magnitude: denom.norm() });
        }
        value /= denom;
    }
    Ok(value)
}

/// Box-truncated series `sum_{k in {0..K}^m} prod_l ratio_l^{k_l}` with the
/// geometric tail bound. The box sum factorizes into partial geometric sums.
pub fn finite_euler_series(spec: &FiniteEulerSpec, s: &[Complex64], k_max: usize) -> Result<ZetaValue> {
    spec.check_arg(s)?;
    let mut value = Complex64::new(1.0, 0.0);
    let mut full = 1.0;
    let mut log_kept = 0.0;
    for (l, ratio) in spec.ratios(s).into_iter().enumerate() {
        let q = ratio.norm();
        if !(q < 1.0) {
            return Err(Error::RatioOutOfRange { index: l, ratio: q });
        }
        let mut sum = Complex64::new(0.0, 0.0);
        let mut power = Complex64::new(1.0, 0.0);
        for _ in 0..=k_max {
            sum += power;
            power *= ratio;
        }
        value *= sum;
        full /= 1.0 - q;
        log_kept += (-q.powi(k_max as i32 + 1)).ln_1p();
    }
    // full - partial, without the cancellation
    Ok(ZetaValue { value, tail_bound: -full * log_kept.exp_m1() })
}

/// Prime-indexed coefficients `alpha_l(p)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrimeCoefficients {
    /// Only the listed `(l, p)` pairs are nonzero.
    Sparse { entries: Vec<PrimeCoefficient> },
    /// `alpha_l(p) = values[l]` for every prime.
    Uniform { values: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrimeCoefficient {
    pub index: usize,
    pub prime: u64,
    pub alpha: f64,
}

/// `prod_p prod_l (1 - alpha_l(p) p^{-<a_l, s>})^{-1}` over primes up to a cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolynomialEulerSpec {
    dim: usize,
    a: Vec<Vec<f64>>,
    alpha_of_p: PrimeCoefficients,
    prime_cutoff: u64,
}

impl PolynomialEulerSpec {
    pub fn new(dim: usize, a: Vec<Vec<f64>>, alpha_of_p: PrimeCoefficients, prime_cutoff: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpec("d must be positive".into()));
        }
        if prime_cutoff == 0 {
            return Err(Error::InvalidSpec("prime cutoff must be positive".into()));
        }
        if let Some(l) = a.iter().position(|v| v.len() != dim || v.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidSpec(format!("a[{l}] must be a finite vector of length {dim}")));
        }
        let m = a.len();
        match &alpha_of_p {
            PrimeCoefficients::Sparse { entries } => {
                let mut seen = BTreeSet::new();
                for &PrimeCoefficient { index: l, prime: p, alpha: v } in entries {
                    if !seen.insert((l, p)) {
                        return Err(Error::InvalidSpec(format!("duplicate coefficient for ({l}, {p})")));
                    }
                    if l >= m {
                        return Err(Error::InvalidSpec(format!("coefficient index {l} out of range for m = {m}")));
                    }
                    if !is_prime(p) {
                        return Err(Error::InvalidSpec(format!("{p} is not prime")));
                    }
                    if !(v.abs() <= 1.0) {
                        return Err(Error::InvalidSpec(format!("|alpha_{l}({p})| = {} exceeds 1", v.abs())));
                    }
                }
            }
            PrimeCoefficients::Uniform { values } => {
                if values.len() != m {
                    return Err(Error::InvalidSpec(format!("{} coefficients for m = {m}", values.len())));
                }
                if values.iter().any(|v| !(v.abs() <= 1.0)) {
                    return Err(Error::InvalidSpec("every |alpha_l(p)| must be at most 1".into()));
                }
            }
        }
        Ok(PolynomialEulerSpec { dim, a, alpha_of_p, prime_cutoff })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn coefficients(&self) -> &PrimeCoefficients {
        &self.alpha_of_p
    }

    pub fn prime_cutoff(&self) -> u64 {
        self.prime_cutoff
    }

    pub fn with_cutoff(&self, prime_cutoff: u64) -> Result<Self> {
        PolynomialEulerSpec::new(self.dim, self.a.clone(), self.alpha_of_p.clone(), prime_cutoff)
    }
}

/// Product over primes `p <= prime_cutoff`, valid for `min_l Re<a_l, s> > 1`.
///
/// With `x_l = Re<a_l, s>` and cutoff `P` the neglected factors satisfy
/// `|log tail| <= delta = sum_l P^{1-x_l} / ((x_l - 1)(1 - P^{-x_l}))` and the
/// partial product is at most `prod_l zeta(x_l) <= prod_l x_l / (x_l - 1)`,
/// giving the bound `prod_l x_l/(x_l-1) * (e^delta - 1)`.
pub fn polynomial_euler_eval(spec: &PolynomialEulerSpec, s: &[Complex64]) -> Result<ZetaValue> {
    if s.len() != spec.dim {
        return Err(Error::InvalidSpec(format!("argument has length {}, expected d = {}", s.len(), spec.dim)));
    }
    let exps: Vec<Complex64> = spec.a.iter().map(|a| linalg::dot_complex(a, s)).collect();
    for (l, e) in exps.iter().enumerate() {
        if !(e.re > 1.0) {
            return Err(Error::ConvergenceRegion(format!(
                "Re<a_{l}, s> = {} must exceed 1 for the polynomial Euler product",
                e.re
            )));
        }
    }
    let cutoff = spec.prime_cutoff;
    let one = Complex64::new(1.0, 0.0);
    let factor = |l: usize, p: u64, alpha: f64| one - (-exps[l] * (p as f64).ln()).exp() * alpha;
    let mut value = one;
    let tail_forms: Vec<usize> = match &spec.alpha_of_p {
        PrimeCoefficients::Sparse { entries } => {
            for e in entries.iter().filter(|e| e.prime <= cutoff) {
                value /= factor(e.index, e.prime, e.alpha);
            }
            let beyond: BTreeSet<usize> =
                entries.iter().filter(|e| e.prime > cutoff && e.alpha != 0.0).map(|e| e.index).collect();
            beyond.into_iter().collect()
        }
        PrimeCoefficients::Uniform { values } => {
            for p in primes_up_to(cutoff) {
                for (l, &alpha) in values.iter().enumerate() {
                    if alpha != 0.0 {
                        value /= factor(l, p, alpha);
                    }
                }
            }
            (0..values.len()).filter(|&l| values[l] != 0.0).collect()
        }
    };
    let big_p = cutoff as f64;
    let mut delta = 0.0;
    let mut majorant = 1.0;
    for &l in &tail_forms {
        let x = exps[l].re;
        delta += big_p.powf(1.0 - x) / ((x - 1.0) * (1.0 - big_p.powf(-x)));
    }
    for e in &exps {
        majorant *= e.re / (e.re - 1.0);
    }
    let tail_bound = if tail_forms.is_empty() { 0.0 } else { majorant * delta.exp_m1() };
    Ok(ZetaValue { value, tail_bound })
}

/// Embeds a finite Euler product as a polynomial one: factor `l` is moved
/// onto the prime `p_l` with `b_l = a_l / log p_l`.
pub fn p_reduction(spec: &FiniteEulerSpec, primes: &[u64]) -> Result<PolynomialEulerSpec> {
    if primes.len() != spec.m() {
        return Err(Error::InvalidSpec(format!("{} primes for m = {}", primes.len(), spec.m())));
    }
    let mut entries = Vec::new();
    for (l, &p) in primes.iter().enumerate() {
        if !is_prime(p) {
            return Err(Error::InvalidSpec(format!("{p} is not prime")));
        }
        if primes[..l].contains(&p) {
            return Err(Error::InvalidSpec(format!("prime {p} is repeated; p-reduction needs distinct primes")));
        }
        entries.push(PrimeCoefficient { index: l, prime: p, alpha: spec.alpha()[l] });
    }
    let b = spec
        .a()
        .iter()
        .zip(primes)
        .map(|(a, &p)| linalg::scale(a, 1.0 / (p as f64).ln()))
        .collect();
    let cutoff = primes.iter().copied().max().unwrap_or(1);
    PolynomialEulerSpec::new(spec.dim(), b, PrimeCoefficients::Sparse { entries }, cutoff)
}
