use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Coefficient function of a Shintani series.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Theta {
    /// Finitely many nonzero coefficients.
    FiniteSupport { entries: Vec<ThetaEntry> },
    /// Nonzero only at `(base^k - 1, 0, ..., 0)` with weight
    /// `rate^k exp(-k * shift) / k!`, `k = 0, 1, 2, ...`. Summing these
    /// against a first linear form `n_1 + 1` produces a Poisson law.
    PoissonFamily { rate: f64, base: u64, shift: f64 },
    /// Arbitrary coefficients with a declared growth bound
    /// `|theta(n)| <= bound * (1 + n_1 + ... + n_r)^growth`.
    #[serde(skip)]
    Bounded(BoundedTheta),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaEntry {
    pub index: Vec<u64>,
    pub weight: Complex64,
}

type WeightFn = dyn Fn(&[u64]) -> Complex64 + Send + Sync;

#[derive(Clone)]
pub struct BoundedTheta {
    weight: Arc<WeightFn>,
    bound: f64,
    growth: f64,
}

impl BoundedTheta {
    pub fn new(weight: impl Fn(&[u64]) -> Complex64 + Send + Sync + 'static, bound: f64, growth: f64) -> Self {
        BoundedTheta { weight: Arc::new(weight), bound, growth }
    }

    pub fn weight(&self, n: &[u64]) -> Complex64 {
        (self.weight)(n)
    }
}

impl fmt::Debug for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Theta::FiniteSupport { entries } => f.debug_struct("FiniteSupport").field("entries", entries).finish(),
            Theta::PoissonFamily { rate, base, shift } => f
                .debug_struct("PoissonFamily")
                .field("rate", rate)
                .field("base", base)
                .field("shift", shift)
                .finish(),
            Theta::Bounded(b) => f
                .debug_struct("Bounded")
                .field("bound", &b.bound)
                .field("growth", &b.growth)
                .finish_non_exhaustive(),
        }
    }
}

impl Theta {
    pub fn finite(entries: Vec<(Vec<u64>, f64)>) -> Self {
        Theta::FiniteSupport {
            entries: entries
                .into_iter()
                .map(|(index, w)| ThetaEntry { index, weight: Complex64::new(w, 0.0) })
                .collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Theta::FiniteSupport { .. })
    }
}

/// Parameters of a multidimensional Shintani series
/// `sum_n theta(n) / prod_l (sum_j lambda_lj (n_j + u_j))^<c_l, s>`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawShintani", into = "RawShintani")]
pub struct ShintaniZetaSpec {
    dim: usize,
    lambda: Vec<Vec<f64>>,
    u: Vec<f64>,
    c: Vec<Vec<f64>>,
    theta: Theta,
}

#[derive(Serialize, Deserialize)]
struct RawShintani {
    dim: usize,
    lambda: Vec<Vec<f64>>,
    u: Vec<f64>,
    c: Vec<Vec<f64>>,
    theta: Theta,
}

impl TryFrom<RawShintani> for ShintaniZetaSpec {
    type Error = Error;
    fn try_from(raw: RawShintani) -> Result<Self> {
        ShintaniZetaSpec::new(raw.dim, raw.lambda, raw.u, raw.c, raw.theta)
    }
}

impl From<ShintaniZetaSpec> for RawShintani {
    fn from(s: ShintaniZetaSpec) -> Self {
        RawShintani { dim: s.dim, lambda: s.lambda, u: s.u, c: s.c, theta: s.theta }
    }
}

/// How far infinite-support series are summed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Simplex level `n_1 + ... + n_r <= level` for bounded coefficients,
    /// maximum order `k` for the Poisson family.
    pub level: usize,
    /// Poisson-family summation stops once the tail bound drops below
    /// `tolerance * |partial sum|`.
    pub tolerance: f64,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { level: 200, tolerance: 1e-17 }
    }
}

/// A series value with a bound on the neglected tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaValue {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// One summed term: multi-index, its coefficient and the full summand.
#[derive(Debug, Clone)]
pub(crate) struct Term {
    pub index: Vec<u64>,
    pub theta: Complex64,
    pub value: Complex64,
}

impl ShintaniZetaSpec {
    pub fn new(dim: usize, lambda: Vec<Vec<f64>>, u: Vec<f64>, c: Vec<Vec<f64>>, theta: Theta) -> Result<Self> {
        let m = lambda.len();
        let r = u.len();
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if dim == 0 || m == 0 || r == 0 {
            return bad(format!("d, m, r must be positive (got {dim}, {m}, {r})"));
        }
        if c.len() != m {
            return bad(format!("{} coefficient vectors c for m = {m}", c.len()));
        }
        if let Some(l) = c.iter().position(|v| v.len() != dim) {
            return bad(format!("c[{l}] must have length {dim}"));
        }
        for (l, row) in lambda.iter().enumerate() {
            if row.len() != r {
                return bad(format!("lambda row {l} has length {}, expected r = {r}", row.len()));
            }
            if row.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return bad(format!("lambda row {l} has a negative or non-finite entry"));
            }
            if row.iter().all(|&x| x == 0.0) {
                return bad(format!("lambda row {l} has no positive entry"));
            }
        }
        if let Some(j) = u.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
            return bad(format!("u[{j}] must be positive"));
        }
        match &theta {
            Theta::FiniteSupport { entries } => {
                if let Some(e) = entries.iter().find(|e| e.index.len() != r) {
                    return bad(format!("theta index {:?} has length {}, expected r = {r}", e.index, e.index.len()));
                }
            }
            Theta::PoissonFamily { rate, base, shift } => {
                if !(*rate > 0.0) || !rate.is_finite() || !shift.is_finite() {
                    return bad("Poisson family needs a positive finite rate and finite shift".into());
                }
                if *base < 2 {
                    return bad(format!("Poisson family base must be >= 2 (got {base})"));
                }
            }
            Theta::Bounded(b) => {
                if !(b.bound >= 0.0) || !(b.growth >= 0.0) {
                    return bad("bounded theta needs a nonnegative bound and growth exponent".into());
                }
            }
        }
        Ok(ShintaniZetaSpec { dim, lambda, u, c, theta })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.lambda.len()
    }

    pub fn r(&self) -> usize {
        self.u.len()
    }

    pub fn lambda(&self) -> &[Vec<f64>] {
        &self.lambda
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn c(&self) -> &[Vec<f64>] {
        &self.c
    }

    pub fn theta(&self) -> &Theta {
        &self.theta
    }

    /// `log(sum_j lambda_lj (n_j + u_j))` for every `l`.
    pub fn log_forms(&self, n: &[u64]) -> Vec<f64> {
        self.lambda
            .iter()
            .map(|row| {
                row.iter()
                    .zip(n.iter().zip(&self.u))
                    .map(|(lam, (&nj, uj))| lam * (nj as f64 + uj))
                    .sum::<f64>()
                    .ln()
            })
            .collect()
    }

    /// Support point `-sum_l c_l log(L_l(n))` attached to the multi-index `n`.
    pub fn point(&self, n: &[u64]) -> Vec<f64> {
        let logs = self.log_forms(n);
        let mut y = vec![0.0; self.dim];
        for (c, lg) in self.c.iter().zip(&logs) {
            for (yi, ci) in y.iter_mut().zip(c) {
                *yi -= ci * lg;
            }
        }
        y
    }

    /// `theta(n) prod_l L_l(n)^{-<c_l, s>}`.
    fn summand(&self, theta: Complex64, n: &[u64], s: &[Complex64]) -> Complex64 {
        if theta == Complex64::new(0.0, 0.0) {
            return theta;
        }
        let exponent: Complex64 = self
            .c
            .iter()
            .zip(self.log_forms(n))
            .map(|(c, lg)| linalg::dot_complex(c, s) * lg)
            .sum();
        theta * (-exponent).exp()
    }

    fn check_arg(&self, s: &[Complex64]) -> Result<()> {
        if s.len() != self.dim {
            return Err(Error::InvalidSpec(format!("argument has length {}, expected d = {}", s.len(), self.dim)));
        }
        Ok(())
    }

    /// Terms of the truncated series at `s` and the tail bound.
    pub(crate) fn terms(&self, s: &[Complex64], policy: &TruncationPolicy) -> Result<(Vec<Term>, f64)> {
        self.check_arg(s)?;
        match &self.theta {
            Theta::FiniteSupport { entries } => {
                let terms = entries
                    .iter()
                    .map(|e| Term {
                        index: e.index.clone(),
                        theta: e.weight,
                        value: self.summand(e.weight, &e.index, s),
                    })
                    .collect();
                Ok((terms, 0.0))
            }
            Theta::PoissonFamily { rate, base, shift } => self.poisson_terms(*rate, *base, *shift, s, policy),
            Theta::Bounded(b) => self.bounded_terms(b, s, policy),
        }
    }

    fn poisson_terms(
        &self,
        rate: f64,
        base: u64,
        shift: f64,
        s: &[Complex64],
        policy: &TruncationPolicy,
    ) -> Result<(Vec<Term>, f64)> {
        // Consecutive-term ratio for k >= 1: the coefficient contributes
        // rate e^{-shift} / (k+1); each linear form grows by at most 2*base,
        // which matters only for forms with negative real exponent.
        let growth: f64 = self
            .c
            .iter()
            .map(|c| (-linalg::dot_complex(c, s).re).max(0.0))
            .sum();
        let q = rate * (-shift).exp() * (2.0 * base as f64).powf(growth);
        let mut terms = Vec::new();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut log_coeff = 0.0; // log(rate^k e^{-k shift} / k!)
        let mut tail = f64::INFINITY;
        for k in 0..=policy.level {
            if k > 0 {
                log_coeff += rate.ln() - shift - (k as f64).ln();
            }
            let Some(power) = base.checked_pow(k as u32) else {
                break;
            };
            let mut index = vec![0u64; self.r()];
            index[0] = power - 1;
            let theta = Complex64::new(log_coeff.exp(), 0.0);
            let value = self.summand(theta, &index, s);
            sum += value;
            terms.push(Term { index, theta, value });
            let ratio = q / (k as f64 + 1.0);
            if k >= 1 && ratio < 1.0 {
                // Terms beyond k are bounded by a geometric series.
                tail = value.norm() * ratio / (1.0 - ratio);
                if tail <= policy.tolerance * sum.norm() {
                    break;
                }
            }
        }
        Ok((terms, tail))
    }

    fn bounded_terms(&self, theta: &BoundedTheta, s: &[Complex64], policy: &TruncationPolicy) -> Result<(Vec<Term>, f64)> {
        let m = self.m() as f64;
        let r = self.r();
        if self.lambda.iter().flatten().any(|&x| x == 0.0) {
            return Err(Error::ConvergenceRegion(
                "infinite-support theta needs every lambda_lj > 0; no convergence region is known otherwise".into(),
            ));
        }
        let exps: Vec<f64> = self.c.iter().map(|c| linalg::dot_complex(c, s).re).collect();
        for (l, &e) in exps.iter().enumerate() {
            if !(e > r as f64 / m) {
                return Err(Error::ConvergenceRegion(format!(
                    "Re<c_{l}, s> = {e} must exceed r/m = {}",
                    r as f64 / m
                )));
            }
        }
        let total_exp: f64 = exps.iter().sum();
        let p = total_exp - theta.growth - r as f64 + 1.0;
        if !(p > 1.0) {
            return Err(Error::ConvergenceRegion(format!(
                "sum_l Re<c_l, s> = {total_exp} must exceed r + growth = {}",
                r as f64 + theta.growth
            )));
        }
        let mut terms = Vec::new();
        let mut index = vec![0u64; r];
        for_each_in_simplex(&mut index, 0, policy.level as u64, &mut |n| {
            let w = theta.weight(n);
            terms.push(Term { index: n.to_vec(), theta: w, value: self.summand(w, n, s) });
        });
        let lam_min = self.lambda.iter().flatten().fold(f64::INFINITY, |a, &b| a.min(b));
        let ru = r as f64 * self.u.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let big_n = policy.level as f64 + 1.0;
        let tail = theta.bound * lam_min.powf(-total_exp) * ru.min(1.0).powf(-total_exp) * big_n.powf(1.0 - p)
            / (p - 1.0);
        Ok((terms, tail))
    }
}

fn for_each_in_simplex(index: &mut Vec<u64>, pos: usize, remaining: u64, f: &mut impl FnMut(&[u64])) {
    if pos == index.len() {
        f(index);
        return;
    }
    for v in 0..=remaining {
        index[pos] = v;
        for_each_in_simplex(index, pos + 1, remaining - v, f);
    }
    index[pos] = 0;
}

/// Evaluates the Shintani series at `s`. Finite support is summed exactly;
/// infinite support is truncated according to `policy` with a rigorous tail
/// bound.
pub fn shintani_eval(spec: &ShintaniZetaSpec, s: &[Complex64], policy: &TruncationPolicy) -> Result<ZetaValue> {
    let (terms, tail_bound) = spec.terms(s, policy)?;
    let value = terms.iter().map(|t| t.value).sum();
    Ok(ZetaValue { value, tail_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, PI};

    fn c1(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// Two-point line law: alpha at +1 via j1 = 2, beta at -1 via j2 = 3.
    fn two_point(alpha: f64, beta: f64, sigma: f64) -> ShintaniZetaSpec {
        ShintaniZetaSpec::new(
            1,
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![1.0, 1.0],
            vec![vec![-1.0 / 2f64.ln()], vec![1.0 / 3f64.ln()]],
            Theta::finite(vec![(vec![1, 0], alpha * (-sigma).exp()), (vec![0, 2], beta * sigma.exp())]),
        )
        .unwrap()
    }

    #[test]
    fn two_point_law_normalizes_at_sigma() {
        let spec = two_point(0.5, 0.5, 2.0);
        let z = shintani_eval(&spec, &[c1(2.0)], &TruncationPolicy::default()).unwrap();
        assert!((z.value - c1(1.0)).norm() < 1e-14);
        assert_eq!(z.tail_bound, 0.0);
        // alpha e^{s - sigma} + beta e^{sigma - s} at another point.
        let s = Complex64::new(2.5, 0.3);
        let want = (s - 2.0).exp() * 0.5 + (-(s - 2.0)).exp() * 0.5;
        let got = shintani_eval(&spec, &[s], &TruncationPolicy::default()).unwrap().value;
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn empty_finite_support_is_zero() {
        let spec = ShintaniZetaSpec::new(1, vec![vec![1.0]], vec![1.0], vec![vec![1.0]], Theta::finite(vec![]))
            .unwrap();
        let z = shintani_eval(&spec, &[c1(3.0)], &TruncationPolicy::default()).unwrap();
        assert_eq!(z.value, c1(0.0));
    }

    fn poisson_line(rate: f64, sigma: f64) -> ShintaniZetaSpec {
        ShintaniZetaSpec::new(
            1,
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![1.0, 1.0],
            vec![vec![-1.0 / 2f64.ln()], vec![0.0]],
            Theta::PoissonFamily { rate, base: 2, shift: sigma },
        )
        .unwrap()
    }

    #[test]
    fn poisson_family_is_exponential_generating_function() {
        let spec = poisson_line(1.0, 2.0);
        let z = shintani_eval(&spec, &[c1(2.0)], &TruncationPolicy::default()).unwrap();
        assert!((z.value - c1(E)).norm() <= 1e-14);
        assert!(z.tail_bound < 1e-15);
        // exp(lambda e^{s - sigma}) off the real axis.
        let s = Complex64::new(2.2, 1.1);
        let want = ((s - 2.0).exp() * 1.0).exp();
        let got = shintani_eval(&spec, &[s], &TruncationPolicy::default()).unwrap();
        assert!((got.value - want).norm() <= got.tail_bound + 1e-13);
    }

    #[test]
    fn poisson_tail_bound_covers_truncation_error() {
        let spec = poisson_line(3.0, 0.0);
        let s = [c1(0.5)];
        let want = (3.0 * 0.5f64.exp()).exp();
        let mut prev = f64::INFINITY;
        for level in [4, 6, 8, 12, 16, 24] {
            let z = shintani_eval(&spec, &s, &TruncationPolicy { level, tolerance: 0.0 }).unwrap();
            assert!((z.value.re - want).abs() <= z.tail_bound * (1.0 + 1e-12), "level {level}");
            assert!(z.tail_bound <= prev);
            prev = z.tail_bound;
        }
    }

    /// sum_n (n+1)^{-2s} = zeta(2s).
    fn riemann_as_shintani() -> ShintaniZetaSpec {
        ShintaniZetaSpec::new(
            1,
            vec![vec![1.0]],
            vec![1.0],
            vec![vec![2.0]],
            Theta::Bounded(BoundedTheta::new(|_| Complex64::new(1.0, 0.0), 1.0, 0.0)),
        )
        .unwrap()
    }

    #[test]
    fn bounded_theta_recovers_zeta_two_within_tail_bound() {
        let spec = riemann_as_shintani();
        let mut prev = f64::INFINITY;
        for level in [10, 100, 1000, 10_000] {
            let z = shintani_eval(&spec, &[c1(1.0)], &TruncationPolicy { level, ..Default::default() }).unwrap();
            assert!((z.value.re - PI * PI / 6.0).abs() <= z.tail_bound);
            assert!(z.tail_bound < prev);
            prev = z.tail_bound;
        }
    }

    #[test]
    fn bounded_theta_outside_region_names_the_form() {
        let spec = riemann_as_shintani();
        let err = shintani_eval(&spec, &[c1(0.4)], &TruncationPolicy::default()).unwrap_err();
        assert!(matches!(err, Error::ConvergenceRegion(ref m) if m.contains("c_0")));
    }

    #[test]
    fn bounded_theta_with_zero_lambda_is_rejected() {
        let spec = ShintaniZetaSpec::new(
            1,
            vec![vec![1.0, 0.0]],
            vec![1.0, 1.0],
            vec![vec![5.0]],
            Theta::Bounded(BoundedTheta::new(|_| Complex64::new(1.0, 0.0), 1.0, 0.0)),
        )
        .unwrap();
        assert!(matches!(
            shintani_eval(&spec, &[c1(1.0)], &TruncationPolicy::default()),
            Err(Error::ConvergenceRegion(_))
        ));
    }

    #[test]
    fn rejects_malformed_specs() {
        let zero_row = ShintaniZetaSpec::new(1, vec![vec![0.0]], vec![1.0], vec![vec![1.0]], Theta::finite(vec![]));
        assert!(zero_row.is_err());
        let bad_u = ShintaniZetaSpec::new(1, vec![vec![1.0]], vec![0.0], vec![vec![1.0]], Theta::finite(vec![]));
        assert!(bad_u.is_err());
        let bad_index =
            ShintaniZetaSpec::new(1, vec![vec![1.0]], vec![1.0], vec![vec![1.0]], Theta::finite(vec![(vec![0, 0], 1.0)]));
        assert!(bad_index.is_err());
    }

    #[test]
    fn conjugate_symmetry() {
        let spec = two_point(0.3, 0.7, 1.5);
        let s = Complex64::new(1.2, 0.9);
        let a = shintani_eval(&spec, &[s.conj()], &TruncationPolicy::default()).unwrap().value;
        let b = shintani_eval(&spec, &[s], &TruncationPolicy::default()).unwrap().value;
        assert!((a - b.conj()).norm() < 1e-14);
    }

    #[test]
    fn finite_support_ignores_truncation_policy() {
        let spec = two_point(0.3, 0.7, 1.5);
        let s = [Complex64::new(0.2, -1.0)];
        let a = shintani_eval(&spec, &s, &TruncationPolicy { level: 0, tolerance: 1.0 }).unwrap();
        let b = shintani_eval(&spec, &s, &TruncationPolicy::default()).unwrap();
        assert_eq!(a, b);
    }
}
