//! Truncated Maclaurin series, the weighted inner product, Θ and T_ω.

use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{re, Real};
use crate::weights::WeightSequence;

/// What is known about the coefficients discarded by truncation.
///
/// Bounds are on the unweighted ℓ² norm (Σ_{n>N} |a_n|²)^{1/2}; the ω-norm
/// of the tail is at most the bound times (sup_{n>N} ω_n)^{1/2}, see
/// [`CoeffSeries::omega_tail_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail<T> {
    /// The series is a polynomial; nothing was discarded.
    Exact,
    Bound(T),
    /// No bound could be established.
    Untrusted,
}

impl<T: Real> Tail<T> {
    pub fn bound(&self) -> Option<T> {
        match *self {
            Tail::Exact => Some(T::zero()),
            Tail::Bound(b) => Some(b),
            Tail::Untrusted => None,
        }
    }

    /// Tail of a sum or linear combination: bounds add.
    pub fn combine(self, other: Tail<T>) -> Tail<T> {
        match (self, other) {
            (Tail::Exact, t) | (t, Tail::Exact) => t,
            (Tail::Bound(a), Tail::Bound(b)) => Tail::Bound(a + b),
            _ => Tail::Untrusted,
        }
    }

    pub fn scaled(self, factor: T) -> Tail<T> {
        match self {
            Tail::Bound(b) => Tail::Bound(b * factor.abs()),
            t => t,
        }
    }
}

/// Coefficients a_0..a_N of a polynomial or truncated power series.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffSeries<T> {
    coeffs: Vec<Complex<T>>,
    tail: Tail<T>,
}

impl<T: Real> CoeffSeries<T> {
    /// An exact polynomial. An empty list is the zero polynomial `[0]`.
    pub fn polynomial(coeffs: Vec<Complex<T>>) -> Self {
        Self::truncated(coeffs, Tail::Exact)
    }

    pub fn real_polynomial(coeffs: &[T]) -> Self {
        Self::polynomial(coeffs.iter().map(|&c| re(c)).collect())
    }

    /// A truncated series with the given tail information.
    pub fn truncated(mut coeffs: Vec<Complex<T>>, tail: Tail<T>) -> Self {
        if coeffs.is_empty() {
            coeffs.push(Complex::new(T::zero(), T::zero()));
        }
        let tail = match tail {
            Tail::Bound(b) if b == T::zero() => Tail::Exact,
            t => t,
        };
        Self { coeffs, tail }
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    /// Coefficient of z^n, zero beyond the truncation.
    pub fn coeff(&self, n: usize) -> Complex<T> {
        self.coeffs.get(n).copied().unwrap_or_else(|| re(T::zero()))
    }

    pub fn truncation_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn tail(&self) -> Tail<T> {
        self.tail
    }

    /// `Some(0)` for polynomials, `None` when the tail is untrusted.
    pub fn tail_bound(&self) -> Option<T> {
        self.tail.bound()
    }

    pub fn is_exact(&self) -> bool {
        self.tail == Tail::Exact
    }

    pub fn is_zero(&self) -> bool {
        self.is_exact() && self.coeffs.iter().all(|c| c.re == T::zero() && c.im == T::zero())
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == T::zero())
    }

    /// Bound on ‖tail‖_ω, when both the tail and the weight supremum are known.
    pub fn omega_tail_bound(&self, omega: &WeightSequence<T>) -> Option<T> {
        match self.tail {
            Tail::Exact => Some(T::zero()),
            Tail::Bound(b) => omega
                .sup_from(self.coeffs.len())
                .map(|s| b * s.sqrt()),
            Tail::Untrusted => None,
        }
    }

    /// Horner evaluation of the stored coefficients.
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(re(T::zero()), |acc, &c| acc * z + c)
    }

    /// ‖f‖²_ω over the stored coefficients.
    pub fn norm_sq(&self, omega: &WeightSequence<T>) -> T {
        weighted_inner(self, self, omega).re
    }

    /// Keeps coefficients 0..=degree; discarded terms widen the tail bound.
    pub fn truncate(&self, degree: usize) -> Self {
        if degree + 1 >= self.coeffs.len() {
            return self.clone();
        }
        let dropped: T = self.coeffs[degree + 1..]
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<T>()
            .sqrt();
        let tail = if dropped == T::zero() {
            self.tail
        } else {
            self.tail.combine(Tail::Bound(dropped))
        };
        Self::truncated(self.coeffs[..=degree].to_vec(), tail)
    }
}

/// ⟨f, g⟩_ω = Σ a_n conj(b_n) ω_n over the common index range.
pub fn weighted_inner<T: Real>(
    f: &CoeffSeries<T>,
    g: &CoeffSeries<T>,
    omega: &WeightSequence<T>,
) -> Complex<T> {
    f.coeffs
        .iter()
        .zip(&g.coeffs)
        .enumerate()
        .fold(re(T::zero()), |acc, (n, (a, b))| acc + a * b.conj() * omega.weight(n))
}

/// z^k f.
pub fn shift<T: Real>(f: &CoeffSeries<T>, k: usize) -> CoeffSeries<T> {
    let mut coeffs = vec![re(T::zero()); k];
    coeffs.extend_from_slice(&f.coeffs);
    CoeffSeries::truncated(coeffs, f.tail)
}

/// Θ(a) = Σ_{n<N} a_n a_{n+1} ω_{n+1} / Σ_{n≤N} a_n² ω_{n+1}.
pub fn theta<T: Real>(a: &[T], omega: &WeightSequence<T>) -> Result<T> {
    if a.iter().all(|&x| x == T::zero()) {
        return Err(Error::Domain("theta is undefined for the zero vector".into()));
    }
    let mut num = T::zero();
    let mut den = T::zero();
    for (n, &x) in a.iter().enumerate() {
        let w = omega.weight(n + 1);
        den += x * x * w;
        if let Some(&y) = a.get(n + 1) {
            num += x * y * w;
        }
    }
    Ok(num / den)
}

/// Θ evaluated on coefficient moduli, the reduction used for complex series.
pub fn theta_of_moduli<T: Real>(f: &CoeffSeries<T>, omega: &WeightSequence<T>) -> Result<T> {
    let a: Vec<T> = f.coeffs.iter().map(|c| c.norm()).collect();
    theta(&a, omega)
}

/// T_n((1+z)/(1−z)) = 1 + 2z + … + 2z^n.
pub fn cayley_section<T: Real>(n: usize) -> CoeffSeries<T> {
    let two = T::lit(2.0);
    let coeffs = std::iter::once(re(T::one()))
        .chain(std::iter::repeat_n(re(two), n))
        .collect();
    CoeffSeries::polynomial(coeffs)
}

/// f_{k,n} = z^k T_n((1+z)/(1−z)).
pub fn cayley_witness<T: Real>(k: usize, n: usize) -> CoeffSeries<T> {
    shift(&cayley_section(n), k)
}

/// T_ω(g): coefficient j is multiplied by (ω_{j+1} − ω_{j+2}) / ω_{j+2}.
pub fn t_omega_apply<T: Real>(g: &CoeffSeries<T>, omega: &WeightSequence<T>) -> CoeffSeries<T> {
    let coeffs = g
        .coeffs
        .iter()
        .enumerate()
        .map(|(j, &c)| c * t_omega_multiplier(omega, j))
        .collect();
    let tail = match g.tail {
        Tail::Exact => Tail::Exact,
        t => match omega.ratio_deviation_sup_from(g.coeffs.len() + 1) {
            Some(m) => t.scaled(m),
            None => Tail::Untrusted,
        },
    };
    CoeffSeries::truncated(coeffs, tail)
}

#[inline]
fn t_omega_multiplier<T: Real>(omega: &WeightSequence<T>, j: usize) -> T {
    omega.ratio(j + 1) - T::one()
}

/// Largest coefficient modulus of f·(z² − t z + 1) − 1 + z² T_ω(f) over
/// indices 0..=N−2. The top two indices are left out because the z²
/// terms there would need coefficients past the truncation.
pub fn functional_residual<T: Real>(
    f: &CoeffSeries<T>,
    t: T,
    omega: &WeightSequence<T>,
) -> Result<T> {
    let big_n = f.truncation_degree();
    if big_n < 2 {
        return Err(Error::Domain(format!(
            "functional_residual needs truncation degree >= 2, got {big_n}"
        )));
    }
    let a = &f.coeffs;
    let mut worst = T::zero();
    for n in 0..=big_n - 2 {
        let mut c = a[n];
        if n >= 1 {
            c = c - a[n - 1] * t;
        }
        if n >= 2 {
            c = c + a[n - 2] * (T::one() + t_omega_multiplier(omega, n - 2));
        }
        if n == 0 {
            c = c - T::one();
        }
        worst = worst.max(c.norm());
    }
    Ok(worst)
}

/// Which power of (1 − z) [`binomial_series`] expands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinomialSign {
    /// (1 − z)^a
    Plus,
    /// (1 − z)^{−a}
    Minus,
}

/// Maclaurin coefficients of (1 − z)^{±a} through degree N.
pub fn binomial_series<T: Real>(a: Complex<T>, sign: BinomialSign, n: usize) -> Result<CoeffSeries<T>> {
    match sign {
        BinomialSign::Plus => {
            if !(a.re > T::zero()) {
                return Err(Error::Domain(format!(
                    "(1-z)^a expansion requires Re a > 0, got {a}"
                )));
            }
            Ok(scaled_binomial_series(a, re(T::one()), n))
        }
        BinomialSign::Minus => Ok(scaled_binomial_series(-a, re(T::one()), n)),
    }
}

/// Maclaurin coefficients of (1 − c z)^e through degree N, via
/// c_0 = 1, c_k = c_{k−1} · c · (k − 1 − e) / k.
pub fn scaled_binomial_series<T: Real>(e: Complex<T>, c: Complex<T>, n: usize) -> CoeffSeries<T> {
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut cur = re(T::one());
    coeffs.push(cur);
    for k in 1..=n + 1 {
        let kk = T::of_usize(k);
        cur = cur * c * (re(kk - T::one()) - e) / kk;
        if k <= n {
            coeffs.push(cur);
        }
    }
    // `cur` now holds the first discarded coefficient
    let tail = binomial_tail(e, c.norm(), n, cur.norm());
    CoeffSeries::truncated(coeffs, tail)
}

/// ℓ² bound on the coefficients of (1 − c z)^e past index N, given
/// |coefficient_{N+1}| = `next`.
///
/// Geometric domination when |c| < 1; for |c| = 1 the power-law domination
/// |c_m| ≤ |c_{N+1}| ((N+2)/(m+1))^p with p = Re e / 2 + 3/4, valid once
/// N + 2 ≥ |e+1|² / (Re e + 1/2).
/// Cap on coefficients summed explicitly before switching to a geometric bound.
const EXPLICIT_TAIL_TERMS: usize = 1 << 20;

pub(crate) fn binomial_tail<T: Real>(e: Complex<T>, c_abs: T, n: usize, next: T) -> Tail<T> {
    let one = T::one();
    if e.im == T::zero() && e.re >= T::zero() && e.re == e.re.round() {
        if let Some(deg) = e.re.to_usize() {
            if n >= deg {
                return Tail::Exact;
            }
        }
    }
    if c_abs == T::zero() || next == T::zero() {
        return Tail::Exact;
    }
    let n2 = T::of_usize(n + 2);
    let e1 = (e + one).norm();
    if c_abs < one {
        // |b_{j+1}/b_j| = |c||j − e|/(j+1) ≤ |c|(1 + |e+1|/(j+1)), decreasing in j;
        // sum exactly until that bound is comfortably below 1, then go geometric
        let target = (one + c_abs) * T::lit(0.5);
        let mut k = n + 1;
        let mut cur = next;
        let mut sum = T::zero();
        for _ in 0..EXPLICIT_TAIL_TERMS {
            let q = c_abs * (one + e1 / T::of_usize(k + 1));
            if q <= target {
                return Tail::Bound((sum + cur * cur / (one - q * q)).sqrt());
            }
            sum += cur * cur;
            cur = cur * c_abs * (re(T::of_usize(k)) - e).norm() / T::of_usize(k + 1);
            k += 1;
        }
        return Tail::Untrusted;
    }
    let half = T::lit(0.5);
    if c_abs == one && e.re + half > T::zero() && n2 >= e1 * e1 / (e.re + half) {
        let two_p_minus_one = e.re + half;
        return Tail::Bound(next * (one + n2 / two_p_minus_one).sqrt());
    }
    Tail::Untrusted
}

#[derive(Serialize, Deserialize)]
struct CoeffSeriesJson {
    re: Vec<f64>,
    im: Vec<f64>,
    /// 0 for polynomials, null when no bound is known.
    tail_bound: Option<f64>,
}

impl<T: Real> Serialize for CoeffSeries<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CoeffSeriesJson {
            re: self.coeffs.iter().map(|c| c.re.to_f64_lossy()).collect(),
            im: self.coeffs.iter().map(|c| c.im.to_f64_lossy()).collect(),
            tail_bound: self.tail.bound().map(Real::to_f64_lossy),
        }
        .serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for CoeffSeries<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = CoeffSeriesJson::deserialize(d)?;
        if raw.re.len() != raw.im.len() {
            return Err(D::Error::custom("\"re\" and \"im\" must have equal length"));
        }
        let coeffs = raw
            .re
            .iter()
            .zip(&raw.im)
            .map(|(&a, &b)| Complex::new(T::lit(a), T::lit(b)))
            .collect();
        let tail = match raw.tail_bound {
            None => Tail::Untrusted,
            Some(b) if b < 0.0 || !b.is_finite() => {
                return Err(D::Error::custom("tail_bound must be a nonnegative number"))
            }
            Some(b) => Tail::Bound(T::lit(b)),
        };
        Ok(CoeffSeries::truncated(coeffs, tail))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type S = CoeffSeries<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn inner_product_examples() {
        let h = WeightSequence::hardy();
        let one = S::real_polynomial(&[1.0]);
        assert_eq!(weighted_inner(&one, &one, &WeightSequence::dirichlet(3.0)), c(1.0, 0.0));
        let f = S::real_polynomial(&[1.0, -1.0]);
        let zf = shift(&f, 1);
        assert_eq!(zf.coeffs(), &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(weighted_inner(&f, &zf, &h), c(-1.0, 0.0));
        assert_eq!(weighted_inner(&f, &f, &h), c(2.0, 0.0));
    }

    #[test]
    fn shift_examples() {
        let one = S::real_polynomial(&[1.0]);
        assert_eq!(shift(&one, 2), S::real_polynomial(&[0.0, 0.0, 1.0]));
        let f = S::real_polynomial(&[1.0, -1.0]);
        assert_eq!(shift(&f, 0), f);
    }

    #[test]
    fn theta_examples() {
        let b = WeightSequence::bergman(0.0).unwrap();
        assert_eq!(theta(&[1.0, 0.0], &b).unwrap(), 0.0);
        assert_relative_eq!(theta(&[1.0, 2.0], &b).unwrap(), 6.0 / 11.0, max_relative = 1e-15);
        let w = cayley_witness::<f64>(0, 1);
        let a: Vec<f64> = w.coeffs().iter().map(|c| c.re).collect();
        let (w1, w2) = (b.weight(1), b.weight(2));
        let closed = 1.0 + (w1 - 4.0 * w2) / (w1 + 4.0 * w2);
        assert_relative_eq!(theta(&a, &b).unwrap(), closed, max_relative = 1e-15);
        assert_relative_eq!(closed, 6.0 / 11.0, max_relative = 1e-15);
        assert!(matches!(theta(&[0.0, 0.0], &b), Err(Error::Domain(_))));
    }

    #[test]
    fn cayley_examples() {
        assert_eq!(cayley_section::<f64>(1), S::real_polynomial(&[1.0, 2.0]));
        assert_eq!(cayley_section::<f64>(3), S::real_polynomial(&[1.0, 2.0, 2.0, 2.0]));
        assert_eq!(cayley_witness::<f64>(1, 2), S::real_polynomial(&[0.0, 1.0, 2.0, 2.0]));
    }

    #[test]
    fn t_omega_examples() {
        let one = S::real_polynomial(&[1.0]);
        let b0 = WeightSequence::bergman(0.0).unwrap();
        assert_relative_eq!(t_omega_apply(&one, &b0).coeff(0).re, 0.5, max_relative = 1e-15);
        let z = S::real_polynomial(&[0.0, 1.0]);
        let b1 = WeightSequence::bergman(1.0).unwrap();
        let out = t_omega_apply(&z, &b1);
        assert_eq!(out.coeff(0).re, 0.0);
        assert_relative_eq!(out.coeff(1).re, 2.0 / 3.0, max_relative = 1e-15);
        assert_eq!(t_omega_apply(&one, &WeightSequence::hardy()).coeff(0).re, 0.0);
    }

    #[test]
    fn functional_residual_of_constant() {
        let f = S::real_polynomial(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let r = functional_residual(&f, 3.0, &WeightSequence::hardy()).unwrap();
        assert_eq!(r, 3.0);
        let short = S::real_polynomial(&[1.0, 0.0]);
        assert!(functional_residual(&short, 3.0, &WeightSequence::hardy()).is_err());
    }

    #[test]
    fn binomial_examples() {
        let s = binomial_series(c(1.0, 0.0), BinomialSign::Plus, 3).unwrap();
        assert_eq!(s.coeffs(), &[c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(s.is_exact());
        let s = binomial_series(c(0.5, 0.0), BinomialSign::Plus, 2).unwrap();
        assert_relative_eq!(s.coeff(1).re, -0.5);
        assert_relative_eq!(s.coeff(2).re, -0.125);
        assert!(!s.is_exact());
        let s = binomial_series(c(2.0, 0.0), BinomialSign::Plus, 3).unwrap();
        assert_eq!(s.coeffs(), &[c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(binomial_series(c(-0.5, 0.0), BinomialSign::Plus, 3).is_err());
        // (1 - z)^{-2} = Σ (n+1) z^n
        let s = binomial_series(c(2.0, 0.0), BinomialSign::Minus, 4).unwrap();
        for n in 0..=4 {
            assert_relative_eq!(s.coeff(n).re, n as f64 + 1.0);
        }
    }

    #[test]
    fn binomial_tail_bounds_dominate_true_tail() {
        // compare against a long explicit tail
        for (e, cabs, n) in [
            (c(1.5, 0.0), 1.0, 200usize),
            (c(2.0, 0.5), 1.0, 100),
            (c(-3.0, 0.0), 0.7, 40),
            (c(-2.5, 0.0), 0.5, 10),
        ] {
            let long = scaled_binomial_series(e, c(cabs, 0.0), 200_000);
            let tail: f64 = long.coeffs()[n + 1..].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            let short = scaled_binomial_series(e, c(cabs, 0.0), n);
            let bound = short.tail_bound().expect("bounded tail");
            assert!(bound >= tail, "e={e} n={n}: bound {bound} < tail {tail}");
            assert!(bound < 50.0 * tail, "e={e} n={n}: bound {bound} too loose vs {tail}");
        }
    }

    #[test]
    fn tail_untrusted_when_divergent() {
        let s = scaled_binomial_series(c(-2.0, 0.0), c(1.0, 0.0), 10);
        assert_eq!(s.tail(), Tail::Untrusted);
    }

    #[test]
    fn json_round_trip() {
        let s = binomial_series(c(2.0, 0.5), BinomialSign::Plus, 6).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: S = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let poly: S = serde_json::from_str(r#"{"re":[1,-1],"im":[0,0],"tail_bound":0}"#).unwrap();
        assert!(poly.is_exact());
        let bad = serde_json::from_str::<S>(r#"{"re":[1],"im":[],"tail_bound":0}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn truncate_widens_tail() {
        let s = S::real_polynomial(&[1.0, 3.0, 4.0]);
        let t = s.truncate(0);
        assert_eq!(t.tail_bound(), Some(5.0));
        assert_eq!(s.truncate(5), s);
    }

    #[test]
    fn eval_horner() {
        let s = S::real_polynomial(&[2.0, -3.0, 1.0]);
        assert_eq!(s.eval(c(2.0, 0.0)), c(0.0, 0.0));
        assert_eq!(s.eval(c(0.0, 1.0)), c(1.0, -3.0));
    }
}
