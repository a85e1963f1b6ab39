//! Optimal polynomial approximants of 1/f from the normal equations.
//!
//! For degree n the approximant p_n = Σ c_k z^k minimizes ‖p f − 1‖_ω. With
//! G_{jk} = ⟨z^j f, z^k f⟩_ω the minimizer solves conj(G) c = b where
//! b_j = ⟨1, z^j f⟩_ω, so only b_0 = ω_0·conj(f(0)) is nonzero.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots::{poly_roots, RootSet};
use crate::scalar::{re, Real};
use crate::series::{weighted_inner, CoeffSeries, Tail};
use crate::weights::WeightSequence;

/// Smallest admissible Cholesky pivot, relative to the largest diagonal entry.
pub const PIVOT_FLOOR: f64 = 1e-14;

/// Largest admissible Gram error bound, relative to the smallest diagonal entry.
pub const TRUNCATION_LIMIT: f64 = 1e-8;

/// Dense Hermitian matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> HermitianMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![re(T::zero()); n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, k: usize) -> Complex<T> {
        self.data[j * self.n + k]
    }

    /// Sets (j,k) and its mirror (k,j).
    pub fn set(&mut self, j: usize, k: usize, v: Complex<T>) {
        self.data[j * self.n + k] = v;
        self.data[k * self.n + j] = v.conj();
    }

    pub fn conj(&self) -> Self {
        Self { n: self.n, data: self.data.iter().map(|v| v.conj()).collect() }
    }

    pub fn min_diagonal(&self) -> T {
        (0..self.n).map(|i| self.get(i, i).re).fold(T::infinity(), T::min)
    }

    pub fn max_diagonal(&self) -> T {
        (0..self.n).map(|i| self.get(i, i).re).fold(T::zero(), T::max)
    }

    /// Leading principal block of size m.
    pub fn leading(&self, m: usize) -> Self {
        let mut out = Self::zeros(m);
        for j in 0..m {
            for k in 0..m {
                out.data[j * m + k] = self.get(j, k);
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        (0..self.n)
            .map(|j| (0..self.n).fold(re(T::zero()), |acc, k| acc + self.get(j, k) * x[k]))
            .collect()
    }
}

/// Lower-triangular factor L with A = L L*.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    n: usize,
    l: Vec<Complex<T>>,
    min_pivot: T,
}

impl<T: Real> Cholesky<T> {
    /// Factors `a`. Stops at the first pivot below `PIVOT_FLOOR · max diag`.
    pub fn factor(a: &HermitianMatrix<T>) -> Result<Self> {
        let n = a.dim();
        let floor = T::lit(PIVOT_FLOOR) * a.max_diagonal();
        let mut l = vec![re(T::zero()); n * n];
        let mut min_pivot = T::infinity();
        for i in 0..n {
            let mut d = a.get(i, i).re;
            for k in 0..i {
                d -= l[i * n + k].norm_sqr();
            }
            if !(d > floor) {
                return Err(Error::Conditioning { pivot: d.to_f64_lossy(), index: i });
            }
            min_pivot = min_pivot.min(d);
            let lii = d.sqrt();
            l[i * n + i] = re(lii);
            for j in i + 1..n {
                let mut s = a.get(j, i);
                for k in 0..i {
                    s = s - l[j * n + k] * l[i * n + k].conj();
                }
                l[j * n + i] = s / lii;
            }
        }
        Ok(Self { n, l, min_pivot })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn min_pivot(&self) -> T {
        self.min_pivot
    }

    /// Solves A x = b using the leading m×m block of the factor, which is
    /// the factor of the leading block of A.
    pub fn solve_leading(&self, m: usize, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.n;
        let mut y = vec![re(T::zero()); m];
        for i in 0..m {
            let mut s = b[i];
            for k in 0..i {
                s = s - self.l[i * n + k] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        let mut x = vec![re(T::zero()); m];
        for i in (0..m).rev() {
            let mut s = y[i];
            for k in i + 1..m {
                s = s - self.l[k * n + i].conj() * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        x
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        self.solve_leading(self.n, b)
    }
}

/// An optimal approximant p_n together with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct Approximant<T> {
    pub degree: usize,
    pub coeffs: Vec<Complex<T>>,
    /// ‖p f − 1‖_ω from the projection identity.
    pub residual_norm: T,
    /// ‖p f − 1‖_ω by expanding p f over the stored coefficients of f.
    pub direct_residual: T,
    /// Entrywise bound on the Gram error caused by truncating f.
    pub gram_error_bound: T,
    /// False when the tail of f could not be bounded in the ω-norm.
    pub tail_trusted: bool,
    pub roots: Option<RootSet<T>>,
}

impl<T: Real> Approximant<T> {
    pub fn polynomial(&self) -> CoeffSeries<T> {
        CoeffSeries::polynomial(self.coeffs.clone())
    }

    /// True when every coefficient above the constant term vanishes.
    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.norm() == T::zero())
    }

    pub fn with_roots(mut self, tol: T) -> Result<Self> {
        if self.coeffs.iter().any(|c| c.norm() != T::zero()) {
            self.roots = Some(poly_roots(&self.polynomial(), tol)?);
        }
        Ok(self)
    }
}

/// G_{jk} = ⟨z^j f, z^k f⟩_ω for 0 ≤ j,k ≤ n, over the stored coefficients.
pub fn gram_matrix<T: Real>(
    f: &CoeffSeries<T>,
    omega: &WeightSequence<T>,
    n: usize,
) -> Result<HermitianMatrix<T>> {
    if f.is_zero() {
        return Err(Error::Domain("Gram matrix of the zero function".into()));
    }
    let a = f.coeffs();
    let w = omega.weights(a.len() + n);
    let mut g = HermitianMatrix::zeros(n + 1);
    for j in 0..=n {
        for k in j..=n {
            // Σ_i a_{i−j} conj(a_{i−k}) ω_i, i ranging over k..k+len
            let mut s = re(T::zero());
            for i in k..j + a.len() {
                s = s + a[i - j] * a[i - k].conj() * w[i];
            }
            g.set(j, k, s);
        }
    }
    for i in 0..=n {
        let d = g.get(i, i);
        g.data[i * (n + 1) + i] = re(d.re);
    }
    Ok(g)
}

/// Per-entry bound e_j F_k + F_j e_k + e_j e_k on |G_{jk} − G^trunc_{jk}|,
/// with e_j ≥ ‖z^j·tail‖_ω and F_k = ‖z^k f_trunc‖_ω.
fn gram_error_bounds<T: Real>(
    f: &CoeffSeries<T>,
    omega: &WeightSequence<T>,
    g: &HermitianMatrix<T>,
) -> Option<Vec<T>> {
    let n = g.dim();
    let eps = match f.tail() {
        Tail::Exact => return Some(vec![T::zero(); n]),
        Tail::Bound(b) => b,
        Tail::Untrusted => return None,
    };
    let len = f.len();
    let mut max_by_degree = Vec::with_capacity(n);
    let e: Vec<T> = (0..n)
        .map(|j| omega.sup_from(len + j).map(|s| eps * s.sqrt()))
        .collect::<Option<Vec<T>>>()?;
    let big_f: Vec<T> = (0..n).map(|k| g.get(k, k).re.sqrt()).collect();
    let mut running = T::zero();
    for m in 0..n {
        for j in 0..=m {
            let v = e[j] * big_f[m] + big_f[j] * e[m] + e[j] * e[m];
            running = running.max(v);
        }
        max_by_degree.push(running);
    }
    Some(max_by_degree)
}

/// Optimal approximants of degrees 0..=n_max from one factorization.
///
/// Entry n of the result is the degree-n approximant, or the error that
/// prevents it. A conditioning failure at pivot i affects degrees ≥ i.
pub fn optimal_approximants<T: Real>(
    f: &CoeffSeries<T>,
    omega: &WeightSequence<T>,
    n_max: usize,
) -> Result<Vec<Result<Approximant<T>>>> {
    if f.is_zero() {
        return Err(Error::Domain("approximants of the zero function".into()));
    }
    let f0 = f.coeff(0);
    let w0 = omega.weight(0);
    if f0.norm() == T::zero() {
        let residual = w0.sqrt();
        return Ok((0..=n_max)
            .map(|n| {
                Ok(Approximant {
                    degree: n,
                    coeffs: vec![re(T::zero()); n + 1],
                    residual_norm: residual,
                    direct_residual: residual,
                    gram_error_bound: T::zero(),
                    tail_trusted: true,
                    roots: None,
                })
            })
            .collect());
    }
    let g = gram_matrix(f, omega, n_max)?;
    let bounds = gram_error_bounds(f, omega, &g);
    let h = g.conj();

    // factor the largest block that succeeds; smaller blocks share it
    let (chol, failure) = match Cholesky::factor(&h) {
        Ok(c) => (Some(c), None),
        Err(Error::Conditioning { pivot, index }) => {
            let partial = if index > 0 { Cholesky::factor(&h.leading(index)).ok() } else { None };
            (partial, Some(Error::Conditioning { pivot, index }))
        }
        Err(e) => return Err(e),
    };

    let mut out = Vec::with_capacity(n_max + 1);
    let mut min_diag = T::infinity();
    for n in 0..=n_max {
        min_diag = min_diag.min(g.get(n, n).re);
        let Some(chol) = chol.as_ref().filter(|c| n < c.dim()) else {
            out.push(Err(failure.clone().expect("factor shorter than requested only on failure")));
            continue;
        };
        let (bound, trusted) = match &bounds {
            Some(b) => (b[n], true),
            None => (T::zero(), false),
        };
        let limit = T::lit(TRUNCATION_LIMIT) * min_diag;
        if trusted && bound >= limit {
            out.push(Err(Error::Truncation {
                bound: bound.to_f64_lossy(),
                limit: limit.to_f64_lossy(),
            }));
            continue;
        }
        let mut b = vec![re(T::zero()); n + 1];
        b[0] = f0.conj() * w0;
        let c = chol.solve_leading(n + 1, &b);
        let projected = (c[0] * f0).re * w0;
        let residual_norm = (w0 - projected).max(T::zero()).sqrt();
        let direct_residual = direct_residual(f, omega, &c);
        out.push(Ok(Approximant {
            degree: n,
            coeffs: c,
            residual_norm,
            direct_residual,
            gram_error_bound: bound,
            tail_trusted: trusted,
            roots: None,
        }));
    }
    Ok(out)
}

/// The degree-n optimal approximant of 1/f.
pub fn optimal_approximant<T: Real>(
    f: &CoeffSeries<T>,
    omega: &WeightSequence<T>,
    n: usize,
) -> Result<Approximant<T>> {
    optimal_approximants(f, omega, n)?.pop().expect("n + 1 entries")
}

/// ‖p f − 1‖_ω over the stored coefficients of f.
fn direct_residual<T: Real>(f: &CoeffSeries<T>, omega: &WeightSequence<T>, c: &[Complex<T>]) -> T {
    let prod = convolve(c, f.coeffs());
    let mut s = T::zero();
    for (i, v) in prod.iter().enumerate() {
        let v = if i == 0 { *v - re(T::one()) } else { *v };
        s += v.norm_sqr() * omega.weight(i);
    }
    s.sqrt()
}

pub(crate) fn convolve<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut out = vec![re(T::zero()); a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x.norm_sqr() == T::zero() {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = out[i + j] + x * y;
        }
    }
    out
}

/// Outcome of the degree-one zero formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub enum FirstOrderZero<T> {
    Zero(Complex<T>),
    /// ⟨f, zf⟩_ω = 0: the degree-one approximant is constant.
    Constant,
}

impl<T: Real> FirstOrderZero<T> {
    pub fn zero(self) -> Option<Complex<T>> {
        match self {
            Self::Zero(z) => Some(z),
            Self::Constant => None,
        }
    }
}

/// z_1 = ‖zf‖²_ω / ⟨f, zf⟩_ω, the zero of the degree-one approximant.
pub fn first_order_zero<T: Real>(f: &CoeffSeries<T>, omega: &WeightSequence<T>) -> FirstOrderZero<T> {
    let a = f.coeffs();
    let mut cross = re(T::zero());
    let mut zf_sq = T::zero();
    for (m, c) in a.iter().enumerate() {
        zf_sq += c.norm_sqr() * omega.weight(m + 1);
        if m + 1 < a.len() {
            cross = cross + a[m + 1] * c.conj() * omega.weight(m + 1);
        }
    }
    let f_sq: T = a.iter().enumerate().map(|(m, c)| c.norm_sqr() * omega.weight(m)).sum();
    let scale = (f_sq * zf_sq).sqrt();
    if !(cross.norm() > T::lit(4.0) * T::epsilon() * scale) {
        return FirstOrderZero::Constant;
    }
    FirstOrderZero::Zero(re(zf_sq) / cross)
}

/// ⟨p f − 1, z^k f⟩_ω for k = 0..=n; all vanish at the optimum.
pub fn orthogonality_defects<T: Real>(
    f: &CoeffSeries<T>,
    omega: &WeightSequence<T>,
    coeffs: &[Complex<T>],
) -> Vec<Complex<T>> {
    let mut r = convolve(coeffs, f.coeffs());
    r[0] = r[0] - re(T::one());
    let r = CoeffSeries::polynomial(r);
    (0..coeffs.len())
        .map(|k| weighted_inner(&r, &crate::series::shift(f, k), omega))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn one_minus_z() -> CoeffSeries<f64> {
        CoeffSeries::real_polynomial(&[1.0, -1.0])
    }

    #[test]
    fn gram_one_minus_z_hardy() {
        let g = gram_matrix(&one_minus_z(), &WeightSequence::hardy(), 1).unwrap();
        assert_eq!(g.get(0, 0), c(2.0, 0.0));
        assert_eq!(g.get(0, 1), c(-1.0, 0.0));
        assert_eq!(g.get(1, 0), c(-1.0, 0.0));
        assert_eq!(g.get(1, 1), c(2.0, 0.0));
    }

    #[test]
    fn gram_constant_is_diagonal() {
        let w = WeightSequence::dirichlet(2.0);
        let g = gram_matrix(&CoeffSeries::real_polynomial(&[1.0]), &w, 1).unwrap();
        assert_eq!(g.get(0, 0).re, 1.0);
        assert_eq!(g.get(1, 1).re, 4.0);
        assert_eq!(g.get(0, 1), c(0.0, 0.0));
    }

    #[test]
    fn gram_bergman_degree_zero() {
        let w = WeightSequence::bergman(0.0).unwrap();
        let g = gram_matrix(&one_minus_z(), &w, 0).unwrap();
        assert!((g.get(0, 0).re - 1.5).abs() < 1e-15);
    }

    #[test]
    fn gram_rejects_zero() {
        let z = CoeffSeries::real_polynomial(&[0.0, 0.0]);
        assert!(gram_matrix(&z, &WeightSequence::hardy(), 1).is_err());
        assert!(optimal_approximant(&z, &WeightSequence::hardy(), 1).is_err());
    }

    #[test]
    fn approximant_one_minus_z() {
        let p = optimal_approximant(&one_minus_z(), &WeightSequence::hardy(), 1).unwrap();
        assert!((p.coeffs[0] - c(2.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!((p.coeffs[1] - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        // ‖p f − 1‖² = 1 − 2/3
        assert!((p.residual_norm - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((p.direct_residual - p.residual_norm).abs() < 1e-14);
        let p = p.with_roots(1e-12).unwrap();
        let r = p.roots.unwrap().roots[0];
        assert!((r - c(-2.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn approximant_of_constant() {
        let w = WeightSequence::bergman(1.0).unwrap();
        for n in 0..5 {
            let p = optimal_approximant(&CoeffSeries::real_polynomial(&[1.0]), &w, n).unwrap();
            assert!((p.coeffs[0] - c(1.0, 0.0)).norm() < 1e-15);
            assert!(p.coeffs[1..].iter().all(|x| x.norm() < 1e-15));
            assert!(p.residual_norm < 1e-7);
            assert!(p.direct_residual < 1e-15);
        }
    }

    #[test]
    fn vanishing_constant_term_gives_zero_polynomial() {
        let f = CoeffSeries::real_polynomial(&[0.0, 1.0, 2.0]);
        let p = optimal_approximant(&f, &WeightSequence::hardy(), 3).unwrap();
        assert!(p.coeffs.iter().all(|x| x.norm() == 0.0));
        assert_eq!(p.residual_norm, 1.0);
    }

    #[test]
    fn one_minus_z_hardy_closed_form() {
        // for 1 − z in H², p_n has coefficients (1 − (k+1)/(n+2)) and
        // residual² = 1/(n+2)
        let all = optimal_approximants(&one_minus_z(), &WeightSequence::hardy(), 30).unwrap();
        for (n, p) in all.into_iter().enumerate() {
            let p = p.unwrap();
            for (k, ck) in p.coeffs.iter().enumerate() {
                let expect = 1.0 - (k as f64 + 1.0) / (n as f64 + 2.0);
                assert!((ck.re - expect).abs() < 1e-12, "n={n} k={k}");
            }
            assert!((p.residual_norm.powi(2) - 1.0 / (n as f64 + 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn residual_monotone_and_orthogonal() {
        let f = CoeffSeries::polynomial(vec![c(1.0, 0.5), c(-0.3, 1.0), c(0.7, -0.2), c(0.1, 0.1)]);
        let w = WeightSequence::dirichlet(1.0);
        let all = optimal_approximants(&f, &w, 12).unwrap();
        let mut last = f64::INFINITY;
        for p in all {
            let p = p.unwrap();
            assert!(p.residual_norm <= last + 1e-12);
            assert!(p.residual_norm <= 1.0);
            last = p.residual_norm;
            for d in orthogonality_defects(&f, &w, &p.coeffs) {
                assert!(d.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn first_order_zero_examples() {
        let h = WeightSequence::hardy();
        assert_eq!(first_order_zero(&one_minus_z(), &h).zero().unwrap(), c(-2.0, 0.0));
        let f = CoeffSeries::polynomial(vec![c(1.0, 0.0), c(0.0, 1.0)]);
        let z = first_order_zero(&f, &h).zero().unwrap();
        assert!((z - c(0.0, -2.0)).norm() < 1e-15);
        let even = CoeffSeries::real_polynomial(&[1.0, 0.0, 1.0]);
        assert_eq!(first_order_zero(&even, &h), FirstOrderZero::Constant);
    }

    #[test]
    fn first_order_zero_matches_solve() {
        let f = CoeffSeries::polynomial(vec![c(1.0, 0.2), c(0.5, -0.4), c(-0.25, 0.0)]);
        let w = WeightSequence::bergman(0.5).unwrap();
        let p = optimal_approximant(&f, &w, 1).unwrap();
        let z = first_order_zero(&f, &w).zero().unwrap();
        assert!((z - (-p.coeffs[0] / p.coeffs[1])).norm() < 1e-12);
    }

    #[test]
    fn cholesky_solves() {
        let mut a = HermitianMatrix::zeros(3);
        a.set(0, 0, c(4.0, 0.0));
        a.set(1, 1, c(5.0, 0.0));
        a.set(2, 2, c(6.0, 0.0));
        a.set(0, 1, c(1.0, 1.0));
        a.set(0, 2, c(0.0, -1.0));
        a.set(1, 2, c(0.5, 0.25));
        let b = vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0)];
        let x = Cholesky::factor(&a).unwrap().solve(&b);
        for (u, v) in a.mul_vec(&x).iter().zip(&b) {
            assert!((u - v).norm() < 1e-14);
        }
    }

    #[test]
    fn singular_matrix_reports_pivot() {
        let mut a = HermitianMatrix::zeros(2);
        a.set(0, 0, c(1.0, 0.0));
        a.set(1, 1, c(1.0, 0.0));
        a.set(0, 1, c(1.0, 0.0));
        match Cholesky::factor(&a) {
            Err(Error::Conditioning { index, .. }) => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn truncation_bound_gate() {
        // a crude truncation of 1/(1 − z/2) with a large declared tail
        let coarse = CoeffSeries::truncated(vec![c(1.0, 0.0), c(0.5, 0.0)], Tail::Bound(0.25));
        assert!(matches!(
            optimal_approximant(&coarse, &WeightSequence::hardy(), 2),
            Err(Error::Truncation { .. })
        ));
        let fine: Vec<Complex<f64>> = (0..80).map(|k| c(0.5f64.powi(k), 0.0)).collect();
        let tail = 0.5f64.powi(80) / (1.0f64 - 0.25).sqrt();
        let fine = CoeffSeries::truncated(fine, Tail::Bound(tail));
        let p = optimal_approximant(&fine, &WeightSequence::hardy(), 2).unwrap();
        assert!(p.tail_trusted);
        assert!((p.coeffs[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((p.coeffs[1] - c(-0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn unbounded_weights_mark_tail_untrusted() {
        let f = CoeffSeries::truncated(vec![c(1.0, 0.0), c(0.5, 0.0)], Tail::Bound(1e-20));
        let p = optimal_approximant(&f, &WeightSequence::dirichlet(1.0), 1).unwrap();
        assert!(!p.tail_trusted);
    }
}
