//! The Jacobi matrix of a weight sequence and what its spectrum says about
//! the functional Θ.
//!
//! The truncation of size N has zero diagonal and off-diagonal entries
//! c_k = √(ω_k/ω_{k+1}), k = 1..N−1. Its characteristic polynomial is the
//! monic P_N of the recurrence P_j = t P_{j−1} − (ω_{j−1}/ω_j) P_{j−2}.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{re, Real};
use crate::series::{CoeffSeries, Tail};
use crate::weights::WeightSequence;

/// Initial truncation size for the doubling searches.
pub const START_SIZE: usize = 64;
/// Default cap on the truncation size.
pub const DEFAULT_CAP: usize = 1 << 20;
/// Default standoff above 2 before an extremal function is claimed.
pub const DEFAULT_MARGIN: f64 = 1e-6;

/// Symmetric tridiagonal truncation with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct JacobiTruncation<T> {
    size: usize,
    /// c_1..c_{N−1}
    offdiag: Vec<T>,
}

impl<T: Real> JacobiTruncation<T> {
    pub fn new(omega: &WeightSequence<T>, size: usize) -> Self {
        assert!(size >= 1, "truncation size must be positive");
        let offdiag = (1..size).map(|k| omega.ratio(k).sqrt()).collect();
        Self { size, offdiag }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn offdiag(&self) -> &[T] {
        &self.offdiag
    }

    /// Gershgorin radius; every eigenvalue lies in [−g, g].
    pub fn gershgorin(&self) -> T {
        let c = |i: usize| if i == 0 || i > self.offdiag.len() { T::zero() } else { self.offdiag[i - 1] };
        (0..self.size).map(|i| c(i) + c(i + 1)).fold(T::zero(), T::max)
    }

    /// Number of eigenvalues strictly below x.
    pub fn sturm_count(&self, x: T) -> usize {
        let tiny = T::min_positive_value().sqrt();
        let mut q = -x;
        if q == T::zero() {
            q = -tiny;
        }
        let mut count = usize::from(q < T::zero());
        for &c in &self.offdiag {
            q = -x - c * c / q;
            if q == T::zero() {
                q = -tiny;
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    /// The k-th largest eigenvalue (k = 0 is the largest), bisected to
    /// machine precision.
    pub fn eigenvalue_from_top(&self, k: usize) -> T {
        assert!(k < self.size);
        let g = self.gershgorin();
        let target = self.size - k; // need count(< x) ≥ target for x above λ
        let (mut lo, mut hi) = (-g - T::one(), g + T::one());
        if k == 0 {
            lo = T::zero();
        }
        loop {
            let mid = (lo + hi) * T::lit(0.5);
            if mid <= lo || mid >= hi {
                return hi;
            }
            if self.sturm_count(mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    pub fn largest_eigenvalue(&self) -> T {
        self.eigenvalue_from_top(0)
    }

    /// All eigenvalues, descending.
    pub fn eigenvalues(&self) -> Vec<T> {
        (0..self.size).map(|k| self.eigenvalue_from_top(k)).collect()
    }

    /// Number of eigenvalues strictly above x.
    pub fn count_above(&self, x: T) -> usize {
        self.size - self.sturm_count(x) - self.multiplicity_at(x)
    }

    fn multiplicity_at(&self, x: T) -> usize {
        let eps = T::epsilon() * (T::one() + x.abs());
        self.sturm_count(x + eps) - self.sturm_count(x)
    }

    /// Unit eigenvector for the largest eigenvalue by inverse iteration.
    pub fn top_eigenvector(&self) -> Vec<T> {
        let lambda = self.largest_eigenvalue();
        let n = self.size;
        if n == 1 {
            return vec![T::one()];
        }
        let shift = lambda + T::lit(16.0) * T::epsilon() * (T::one() + lambda.abs());
        let mut v = vec![T::one() / T::of_usize(n).sqrt(); n];
        for _ in 0..3 {
            v = self.shifted_solve(shift, &v);
            let norm = v.iter().map(|x| *x * *x).sum::<T>().sqrt();
            for x in v.iter_mut() {
                *x /= norm;
            }
        }
        if v[0] < T::zero() {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
        v
    }

    /// Solves (μI − J) x = b for μ above the spectrum, where the matrix is
    /// positive definite and elimination without pivoting is stable.
    fn shifted_solve(&self, mu: T, b: &[T]) -> Vec<T> {
        let n = self.size;
        let c = &self.offdiag;
        let mut d = vec![mu; n];
        let mut y = b.to_vec();
        for i in 1..n {
            let m = -c[i - 1] / d[i - 1];
            d[i] += m * c[i - 1];
            let prev = y[i - 1];
            y[i] -= m * prev;
        }
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut s = y[i];
            if i + 1 < n {
                s += c[i] * x[i + 1];
            }
            x[i] = s / d[i];
        }
        x
    }
}

/// Largest eigenvalue of the N×N truncation; equals its spectral radius.
pub fn truncated_norm<T: Real>(omega: &WeightSequence<T>, n: usize) -> T {
    JacobiTruncation::new(omega, n).largest_eigenvalue()
}

/// Result of the doubling search for ‖𝒥_ω‖.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate<T> {
    pub value: T,
    /// Truncation size that produced `value`.
    pub size: usize,
    /// Value at half the size.
    pub previous: T,
}

impl<T: Real> NormEstimate<T> {
    /// sup Θ = ‖𝒥_ω‖/2.
    pub fn theta_sup(&self) -> T {
        self.value * T::lit(0.5)
    }
}

pub fn norm_estimate<T: Real>(omega: &WeightSequence<T>, tol: T) -> Result<NormEstimate<T>> {
    norm_estimate_with_cap(omega, tol, DEFAULT_CAP)
}

/// Doubles N from 64 until successive truncated norms differ by < tol.
pub fn norm_estimate_with_cap<T: Real>(
    omega: &WeightSequence<T>,
    tol: T,
    cap: usize,
) -> Result<NormEstimate<T>> {
    if !(tol > T::zero()) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let mut n = START_SIZE.min(cap.max(1));
    let mut previous = truncated_norm(omega, n);
    loop {
        let next = n * 2;
        if next > cap {
            return Err(Error::NonConvergence {
                cap,
                lower: previous.to_f64_lossy(),
                upper: truncated_norm(omega, n).to_f64_lossy(),
            });
        }
        let value = truncated_norm(omega, next);
        if (value - previous).abs() < tol {
            return Ok(NormEstimate { value, size: next, previous });
        }
        previous = value;
        n = next;
    }
}

/// P_0(t), …, P_N(t).
pub fn monic_recurrence<T: Real>(omega: &WeightSequence<T>, t: T, n: usize) -> Vec<T> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(T::one());
    if n >= 1 {
        p.push(t);
    }
    for j in 2..=n {
        let v = t * p[j - 1] - omega.ratio(j - 1) * p[j - 2];
        p.push(v);
    }
    p
}

/// Coefficients (in t, lowest degree first) of P_0, …, P_N.
pub fn monic_polynomials<T: Real>(omega: &WeightSequence<T>, n: usize) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![vec![T::one()]];
    if n >= 1 {
        out.push(vec![T::zero(), T::one()]);
    }
    for j in 2..=n {
        let r = omega.ratio(j - 1);
        let mut next = vec![T::zero(); j + 1];
        for (i, &c) in out[j - 1].iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, &c) in out[j - 2].iter().enumerate() {
            next[i] -= r * c;
        }
        out.push(next);
    }
    out
}

/// Largest zero of P_n by bisection on sign changes of the recurrence,
/// scanning downward from the Gershgorin bound.
pub fn largest_zero_by_sign_change<T: Real>(omega: &WeightSequence<T>, n: usize) -> T {
    let g = JacobiTruncation::new(omega, n).gershgorin() + T::lit(0.5);
    let value = |t: T| monic_recurrence(omega, t, n)[n];
    let steps = 64 * n.max(1);
    let h = g / T::of_usize(steps);
    let mut hi = g;
    let mut lo = hi;
    let sign_hi = value(hi) > T::zero();
    for i in 1..=steps {
        lo = g - h * T::of_usize(i);
        if (value(lo) > T::zero()) != sign_hi {
            break;
        }
        hi = lo;
    }
    loop {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            return mid;
        }
        if (value(mid) > T::zero()) == sign_hi {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// Coefficients P_0(t*), …, P_N(t*) of the extremal function, t* = ‖𝒥_ω‖.
pub fn extremal_coeffs<T: Real>(omega: &WeightSequence<T>, n: usize, tol: T) -> Result<CoeffSeries<T>> {
    extremal_coeffs_with_margin(omega, n, tol, T::lit(DEFAULT_MARGIN))
}

pub fn extremal_coeffs_with_margin<T: Real>(
    omega: &WeightSequence<T>,
    n: usize,
    tol: T,
    margin: T,
) -> Result<CoeffSeries<T>> {
    let est = match norm_estimate(omega, tol) {
        Ok(e) => e,
        Err(Error::NonConvergence { upper, .. }) if upper <= 2.0 + margin.to_f64_lossy() => {
            return Err(Error::NoExtremal { norm: upper, margin: margin.to_f64_lossy() });
        }
        Err(e) => return Err(e),
    };
    let t = est.value;
    if !(t > T::lit(2.0) + margin) {
        return Err(Error::NoExtremal { norm: t.to_f64_lossy(), margin: margin.to_f64_lossy() });
    }
    let (a, tail) = minimal_solution(omega, t, n);
    Ok(CoeffSeries::truncated(a.into_iter().map(re).collect(), Tail::Bound(tail)))
}

/// P_0(t), …, P_N(t) for t above the essential spectrum, evaluated as the
/// decaying solution of the recurrence. At an eigenvalue t of 𝒥_ω this is
/// the same sequence as [`monic_recurrence`], without the exponential
/// amplification of rounding errors that the forward recurrence suffers.
pub fn minimal_recurrence<T: Real>(omega: &WeightSequence<T>, t: T, n: usize) -> Result<Vec<T>> {
    if !(t > T::lit(2.0)) {
        return Err(Error::Domain(format!("decaying solution needs t > 2, got {t}")));
    }
    Ok(minimal_solution(omega, t, n).0)
}

/// t_− = (t − √(t²−4))/2, the decay rate of the minimal solution.
pub fn decay_rate<T: Real>(t: T) -> T {
    (t - (t * t - T::lit(4.0)).sqrt()) * T::lit(0.5)
}

/// Minimal (decaying) solution of the recurrence at t > 2 by Miller's
/// backward recurrence, normalized to a_0 = 1, with an estimate of the
/// ℓ² norm of the coefficients beyond index n.
pub(crate) fn minimal_solution<T: Real>(omega: &WeightSequence<T>, t: T, n: usize) -> (Vec<T>, T) {
    let tm = decay_rate(t);
    let per_digit = -(tm * tm).ln().to_f64_lossy();
    let extra = ((40.0 * std::f64::consts::LN_10 / per_digit).ceil() as usize).clamp(16, 1 << 20) + 10;
    let top = n + 2 * extra;
    let mut a = vec![T::zero(); top + 2];
    a[top] = T::one();
    let big = T::lit(1e100);
    for j in (2..=top + 1).rev() {
        // a_{j−2} = (t a_{j−1} − a_j) ω_{j−1}/ω_{j−2}... in ratio form:
        // a_j = t a_{j−1} − r_{j−1} a_{j−2}, r_m = ω_m/ω_{m+1}
        let v = (t * a[j - 1] - a[j]) / omega.ratio(j - 1);
        a[j - 2] = v;
        if v.abs() > big {
            for x in a[j - 2..].iter_mut() {
                *x /= big;
            }
        }
    }
    let a0 = a[0];
    for x in a.iter_mut() {
        *x /= a0;
    }
    let reliable = n + extra;
    let mut tail_sq = T::zero();
    for x in &a[n + 1..=reliable] {
        tail_sq += *x * *x;
    }
    let last = a[reliable].abs();
    let q = (a[reliable] / a[reliable - 1]).abs().max(tm).min(T::lit(0.999));
    let rest = last * q / (T::one() - q * q).sqrt();
    let tail = T::lit(2.0) * (tail_sq.sqrt() + rest);
    a.truncate(n + 1);
    (a, tail)
}

/// Eigenvalues of 𝒥_ω above 2 + 10·tol that are stable under doubling N,
/// descending, at most `max_count` of them.
pub fn point_spectrum_above_2<T: Real>(omega: &WeightSequence<T>, tol: T, max_count: usize) -> Result<Vec<T>> {
    point_spectrum_above_2_with_cap(omega, tol, max_count, DEFAULT_CAP)
}

pub fn point_spectrum_above_2_with_cap<T: Real>(
    omega: &WeightSequence<T>,
    tol: T,
    max_count: usize,
    cap: usize,
) -> Result<Vec<T>> {
    let threshold = T::lit(2.0) + T::lit(10.0) * tol;
    let top = |n: usize| -> Vec<T> {
        let j = JacobiTruncation::new(omega, n);
        let k = j.count_above(threshold).min(max_count);
        (0..k).map(|i| j.eigenvalue_from_top(i)).collect()
    };
    let mut n = START_SIZE;
    let mut previous = top(n);
    loop {
        let next = n * 2;
        if next > cap {
            return Err(Error::NonConvergence {
                cap,
                lower: previous.last().map_or(f64::NAN, |x| x.to_f64_lossy()),
                upper: previous.first().map_or(f64::NAN, |x| x.to_f64_lossy()),
            });
        }
        let current = top(next);
        let stable = current.len() == previous.len()
            && current.iter().zip(&previous).all(|(a, b)| (*a - *b).abs() < tol);
        if stable {
            return Ok(current);
        }
        previous = current;
        n = next;
    }
}

/// Maximizer of Θ over real vectors of length `len`, normalized so that
/// a_0 > 0, with sup Θ = λ_max(J_len)/2.
pub fn theta_maximizer<T: Real>(omega: &WeightSequence<T>, len: usize) -> Vec<T> {
    let b = JacobiTruncation::new(omega, len).top_eigenvector();
    b.iter()
        .enumerate()
        .map(|(i, &x)| x / omega.weight(i + 1).sqrt())
        .collect()
}

/// Partial sums Σ_{n≤k} ω_n P_n(2)² for k = 0..=N. Their growth decides
/// attainment when ‖𝒥_ω‖ = 2; this is a diagnostic only.
pub fn attainment_partial_sums<T: Real>(omega: &WeightSequence<T>, n: usize) -> Vec<T> {
    let p = monic_recurrence(omega, T::lit(2.0), n);
    let mut s = T::zero();
    p.iter()
        .enumerate()
        .map(|(i, &x)| {
            s += omega.weight(i) * x * x;
            s
        })
        .collect()
}

/// Helper for callers that want the recurrence values as a series.
pub fn recurrence_series<T: Real>(omega: &WeightSequence<T>, t: T, n: usize) -> CoeffSeries<T> {
    let v: Vec<Complex<T>> = monic_recurrence(omega, t, n).into_iter().map(re).collect();
    CoeffSeries::truncated(v, Tail::Untrusted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hardy() -> WeightSequence<f64> {
        WeightSequence::hardy()
    }

    fn dirichlet(alpha: f64) -> WeightSequence<f64> {
        WeightSequence::dirichlet(alpha)
    }

    fn bergman(beta: f64) -> WeightSequence<f64> {
        WeightSequence::bergman(beta).unwrap()
    }

    #[test]
    fn hardy_small_truncations() {
        let h = hardy();
        assert!((truncated_norm(&h, 2) - 1.0).abs() < 1e-15);
        assert!(truncated_norm(&h, 1).abs() < 1e-300);
        for n in 1..40 {
            let expect = 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((truncated_norm(&h, n) - expect).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn bergman_norm_large_truncation() {
        let v = truncated_norm(&bergman(0.0), 500);
        assert!((v - 3.0 / 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn sturm_counts_match_eigenvalues() {
        let j = JacobiTruncation::new(&dirichlet(1.5), 9);
        let ev = j.eigenvalues();
        for w in ev.windows(2) {
            assert!(w[0] > w[1]);
        }
        assert_eq!(j.sturm_count(ev[0] + 1e-9), 9);
        assert_eq!(j.sturm_count(ev[8] - 1e-9), 0);
        assert_eq!(j.count_above(ev[2] - 1e-9), 3);
        // odd size: a zero eigenvalue and ± pairs
        assert!(ev[4].abs() < 1e-14);
        for k in 0..4 {
            assert!((ev[k] + ev[8 - k]).abs() < 1e-13);
        }
    }

    #[test]
    fn norm_estimate_examples() {
        let h = norm_estimate(&hardy(), 1e-6).unwrap();
        assert!(h.value < 2.0 && h.value >= 2.0 - 1e-4);
        let b = norm_estimate(&bergman(0.0), 1e-9).unwrap();
        assert!((b.value - 3.0 / 2f64.sqrt()).abs() < 1e-9);
        let d = norm_estimate(&dirichlet(-1.0), 1e-9).unwrap();
        assert_eq!(d.value, b.value);
    }

    #[test]
    fn norm_estimate_cap() {
        let err = norm_estimate_with_cap(&hardy(), 1e-12, 1024).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { cap: 1024, .. }));
    }

    #[test]
    fn recurrence_examples() {
        let h = hardy();
        assert_eq!(monic_recurrence(&h, 0.7, 1), vec![1.0, 0.7]);
        assert_eq!(monic_recurrence(&h, 2.0, 5), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        let p = monic_recurrence(&bergman(0.0), 3.0 / 2f64.sqrt(), 2);
        assert!((p[1] - 3.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((p[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn monic_polynomials_match_recurrence() {
        let w = dirichlet(0.5);
        let polys = monic_polynomials(&w, 8);
        let t = 1.37;
        let vals = monic_recurrence(&w, t, 8);
        for (p, v) in polys.iter().zip(&vals) {
            let e = p.iter().rev().fold(0.0, |acc, c| acc * t + c);
            assert!((e - v).abs() < 1e-12);
            assert_eq!(*p.last().unwrap(), 1.0);
        }
    }

    #[test]
    fn duality_with_sign_changes() {
        for w in [bergman(0.0), dirichlet(2.0), hardy()] {
            for n in 1..30 {
                let a = truncated_norm(&w, n);
                let b = largest_zero_by_sign_change(&w, n);
                assert!((a - b).abs() < 1e-10, "{w} n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn extremal_bergman_matches_closed_form() {
        let f = extremal_coeffs(&bergman(0.0), 40, 1e-10).unwrap();
        let s = 2f64.sqrt();
        for k in 0..=40 {
            let expect = (k as f64 + 1.0) * (k as f64 + 2.0) / 2.0 / s.powi(k as i32);
            assert!((f.coeff(k).re - expect).abs() < 1e-10 * expect.max(1.0), "k={k}");
        }
        let true_tail: f64 = (41..4000)
            .map(|k| ((k as f64 + 1.0) * (k as f64 + 2.0) / 2.0 / s.powi(k)).powi(2))
            .sum::<f64>()
            .sqrt();
        let bound = f.tail_bound().unwrap();
        assert!(bound >= true_tail && bound < 10.0 * true_tail);
    }

    #[test]
    fn extremal_hardy_absent() {
        let err = extremal_coeffs(&hardy(), 10, 1e-6).unwrap_err();
        assert!(matches!(err, Error::NoExtremal { .. }));
    }

    #[test]
    fn extremal_dirichlet_negative_alpha_decays() {
        let f = extremal_coeffs(&dirichlet(-2.0), 50, 1e-8).unwrap();
        let c: Vec<f64> = f.coeffs().iter().map(|z| z.re).collect();
        assert!(c.iter().all(|&x| x > 0.0));
        let t = norm_estimate(&dirichlet(-2.0), 1e-8).unwrap().value;
        let ratio = c[50] / c[49];
        assert!(ratio < 1.0 && (ratio - decay_rate(t)).abs() < 0.1);
    }

    #[test]
    fn bergman_point_spectrum() {
        let got = point_spectrum_above_2(&bergman(0.0), 1e-8, 4).unwrap();
        let expect = [3.0 / 2f64.sqrt(), 5.0 / 6f64.sqrt(), 7.0 / 12f64.sqrt(), 9.0 / 20f64.sqrt()];
        assert_eq!(got.len(), 4);
        for (g, e) in got.iter().zip(expect) {
            assert!((g - e).abs() < 1e-8);
        }
        let one = point_spectrum_above_2(&bergman(1.0), 1e-8, 1).unwrap();
        assert!((one[0] - 4.0 / 3f64.sqrt()).abs() < 1e-8);
        assert!(point_spectrum_above_2(&hardy(), 1e-8, 4).unwrap().is_empty());
    }

    #[test]
    fn theta_maximizer_achieves_half_norm() {
        for w in [bergman(0.0), dirichlet(1.0)] {
            let a = theta_maximizer(&w, 30);
            let th = crate::series::theta(&a, &w).unwrap();
            assert!((th - truncated_norm(&w, 30) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn attainment_sums_hardy_grow() {
        let s = attainment_partial_sums(&hardy(), 3);
        assert_eq!(s, vec![1.0, 5.0, 14.0, 30.0]);
    }
}
