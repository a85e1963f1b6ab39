//! Closed forms: the Bergman point spectrum, extremal function and
//! eigenfunctions, the reproducing-kernel identity, Dirichlet bounds and the
//! indicial exponent, and the Beta-function approximants of (1 − z)^a in H².

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gram::convolve;
use crate::scalar::{re, Real};
use crate::series::{binomial_tail, scaled_binomial_series, CoeffSeries, Tail};
use crate::special::{binomial_exact, ln_beta_complex, ln_gamma, ln_gamma_complex};

fn check_beta<T: Real>(beta: T) -> Result<()> {
    if !(beta > -T::one()) || !beta.is_finite() {
        return Err(Error::Domain(format!("beta must satisfy beta > -1, got {beta}")));
    }
    Ok(())
}

/// One eigenvalue t_m of the Bergman Jacobi operator with the roots
/// λ_± of λ² − t_m λ + 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BergmanSpectrumEntry<T> {
    pub m: usize,
    pub t_m: T,
    pub lambda_minus: T,
    pub lambda_plus: T,
}

/// t_m = (2m + β + 3)/√((m+1)(m+β+2)).
pub fn bergman_tm<T: Real>(beta: T, m: usize) -> Result<BergmanSpectrumEntry<T>> {
    check_beta(beta)?;
    let mm = T::of_usize(m);
    let two = T::lit(2.0);
    let t_m = (two * mm + beta + T::lit(3.0)) / ((mm + T::one()) * (mm + beta + two)).sqrt();
    // t² − 4 = (β+1)² / ((m+1)(m+β+2)), kept in this form to avoid cancellation
    let disc = (beta + T::one()) / ((mm + T::one()) * (mm + beta + two)).sqrt();
    let lambda_minus = (t_m - disc) / two;
    let lambda_plus = (t_m + disc) / two;
    Ok(BergmanSpectrumEntry { m, t_m, lambda_minus, lambda_plus })
}

/// ‖𝒥_ω‖ = (β+3)/√(β+2) for the Bergman weights.
pub fn bergman_norm<T: Real>(beta: T) -> Result<T> {
    bergman_tm(beta, 0).map(|e| e.t_m)
}

/// f*(z) = (1 − z/√(β+2))^{−(β+3)}, coefficients C(n+β+2, n)(β+2)^{−n/2}.
pub fn bergman_extremal<T: Real>(beta: T, n: usize) -> Result<CoeffSeries<T>> {
    check_beta(beta)?;
    let c = (beta + T::lit(2.0)).sqrt().recip();
    let e = -(beta + T::lit(3.0));
    Ok(scaled_binomial_series(re(e), re(c), n))
}

/// Coefficients of λ_0 ∂_z k(z, λ_0), k(z,w) = (1 − z w̄)^{−(2+β)},
/// λ_0 = 1/√(2+β): coefficient m is (m+1)·C(m+2+β, m+1)·λ_0^{m+2}.
pub fn kernel_derivative_coeffs<T: Real>(beta: u32, n: usize) -> CoeffSeries<T> {
    let b = T::of_usize(beta as usize);
    let lambda0 = (b + T::lit(2.0)).sqrt().recip();
    let ln_lambda = lambda0.ln();
    let coeff = |m: usize| -> T {
        let k = (m + 1) as u64;
        let binom = match binomial_exact(m as u64 + 2 + u64::from(beta), k).and_then(T::from_u128) {
            Some(c) if c.is_finite() => c.ln(),
            _ => {
                let top = T::of_usize(m + 3) + b;
                ln_gamma(top) - ln_gamma(T::of_usize(m + 2)) - ln_gamma(b + T::lit(2.0))
            }
        };
        (T::of_usize(m + 1).ln() + binom + T::of_usize(m + 2) * ln_lambda).exp()
    };
    let coeffs: Vec<Complex<T>> = (0..=n).map(|m| re(coeff(m))).collect();
    let tail = binomial_tail(re(-(b + T::lit(3.0))), lambda0, n, coeff(n + 1));
    CoeffSeries::truncated(coeffs, tail)
}

/// f(z; t_m) = (1 − z s)^m (1 − z/s)^{−(m+3+β)}, s = √((m+β+2)/(m+1)),
/// the eigenfunction for t_m, normalized to f(0) = 1.
pub fn bergman_eigenfunction<T: Real>(beta: T, m: usize, n: usize) -> Result<CoeffSeries<T>> {
    check_beta(beta)?;
    let mm = T::of_usize(m);
    let s = ((mm + beta + T::lit(2.0)) / (mm + T::one())).sqrt();
    let poly = scaled_binomial_series(re(mm), re(s), m);
    let nb = scaled_binomial_series(re(-(mm + T::lit(3.0) + beta)), re(s.recip()), n);
    let mut coeffs = convolve(poly.coeffs(), nb.coeffs());
    coeffs.truncate(n + 1);
    // coefficients past n only see b_j with j > n − m
    let tail = match nb.tail() {
        Tail::Exact => Tail::Exact,
        Tail::Untrusted => Tail::Untrusted,
        Tail::Bound(b) => {
            let from = (n + 1).saturating_sub(m);
            let known: T = nb.coeffs()[from..].iter().map(|c| c.norm_sqr()).sum();
            let l1: T = poly.coeffs().iter().map(|c| c.norm()).sum();
            Tail::Bound(l1 * (known.sqrt() + b))
        }
    };
    Ok(CoeffSeries::truncated(coeffs, tail))
}

/// ((3/2)^{α/2}, 2(2/3)^{α/2}): zero-free radius and norm bound for α < 0.
pub fn dirichlet_bounds<T: Real>(alpha: T) -> Result<(T, T)> {
    if !(alpha < T::zero()) {
        return Err(Error::Domain(format!("Dirichlet bounds need alpha < 0, got {alpha}")));
    }
    let half = alpha * T::lit(0.5);
    let radius = T::lit(1.5).powf(half);
    let upper = T::lit(2.0) * (T::lit(2.0) / T::lit(3.0)).powf(half);
    Ok((radius, upper))
}

/// r = n/2 − 3 − n·J/(2√(J² − 4)) for the Dirichlet parameter α = −n.
pub fn dirichlet_indicial_exponent<T: Real>(n: usize, norm: T) -> Result<T> {
    if !(norm > T::lit(2.0)) {
        return Err(Error::Domain(format!("indicial exponent needs a norm above 2, got {norm}")));
    }
    if n == 0 {
        return Err(Error::Domain("indicial exponent needs n >= 1".into()));
    }
    let nn = T::of_usize(n);
    let two = T::lit(2.0);
    Ok(nn / two - T::lit(3.0) - nn * norm / (two * (norm * norm - T::lit(4.0)).sqrt()))
}

/// Coefficients of the degree-n H² approximant of (1 − z)^a:
/// C(a+k−1, k)·B(n+a+1, ā)/B(n−k+1, ā), evaluated in log space.
pub fn hardy_beta_approximant<T: Real>(a: Complex<T>, n: usize) -> Result<Vec<Complex<T>>> {
    if !(a.re > T::zero()) {
        return Err(Error::Domain(format!("need Re a > 0, got {a}")));
    }
    let one = re(T::one());
    let abar = a.conj();
    let nn = re(T::of_usize(n));
    let ln_gamma_a = ln_gamma_complex(a);
    let ln_b_top = ln_beta_complex(nn + a + one, abar);
    Ok((0..=n)
        .map(|k| {
            let kk = re(T::of_usize(k));
            let ln = ln_gamma_complex(a + kk) - ln_gamma_a - ln_gamma_complex(kk + one) + ln_b_top
                - ln_beta_complex(nn - kk + one, abar);
            ln.exp()
        })
        .collect())
}
