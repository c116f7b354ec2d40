//! Evaluators for Shintani series, finite Euler products and prime-indexed
//! Euler products.

mod euler;
mod primes;
mod riemann;
mod shintani;

pub use euler::{
    finite_euler_eval, finite_euler_series, p_reduction, polynomial_euler_eval, FiniteEulerSpec, PolynomialEulerSpec,
    PrimeCoefficient, PrimeCoefficients, DEFAULT_PRIME_CUTOFF,
};
pub use primes::{is_prime, primes_up_to};
pub use riemann::{zeta, zeta_real};
pub use shintani::{shintani_eval, BoundedTheta, ShintaniZetaSpec, Theta, ThetaEntry, TruncationPolicy, ZetaValue};
