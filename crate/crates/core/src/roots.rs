//! All complex roots of a polynomial by Aberth–Ehrlich simultaneous
//! iteration with Newton polishing.

use std::cmp::Ordering;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{re, Real};
use crate::series::CoeffSeries;

/// Sweep cap for the simultaneous iteration.
pub const MAX_SWEEPS: usize = 500;

const POLISH_STEPS: usize = 3;

/// Roots together with their quality certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct RootSet<T> {
    pub roots: Vec<Complex<T>>,
    /// max over roots of |p(r)| / Σ_k |c_k| max(1, |r|)^k.
    pub max_residual: T,
    /// Degree after stripping zero leading coefficients.
    pub degree_deflated: usize,
    pub sweeps: usize,
}

impl<T: Real> RootSet<T> {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn min_modulus(&self) -> Option<T> {
        self.roots.iter().map(|r| r.norm()).reduce(T::min)
    }

    pub fn max_modulus(&self) -> Option<T> {
        self.roots.iter().map(|r| r.norm()).reduce(T::max)
    }

    /// Real parts sorted ascending; meaningful when all roots are real.
    pub fn sorted_real_parts(&self) -> Vec<T> {
        let mut xs: Vec<T> = self.roots.iter().map(|r| r.re).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        xs
    }
}

/// Roots of the polynomial whose coefficients (lowest degree first) are
/// stored in `p`. Only the stored coefficients are used.
pub fn poly_roots<T: Real>(p: &CoeffSeries<T>, tol: T) -> Result<RootSet<T>> {
    roots_of(p.coeffs(), tol)
}

/// Roots of a real polynomial given by coefficients lowest degree first.
pub fn real_poly_roots<T: Real>(coeffs: &[T], tol: T) -> Result<RootSet<T>> {
    let c: Vec<Complex<T>> = coeffs.iter().map(|&x| re(x)).collect();
    roots_of(&c, tol)
}

/// Roots of Σ c_k z^k.
pub fn roots_of<T: Real>(coeffs: &[Complex<T>], tol: T) -> Result<RootSet<T>> {
    let is_zero = |c: &Complex<T>| c.re == T::zero() && c.im == T::zero();
    let Some(top) = coeffs.iter().rposition(|c| !is_zero(c)) else {
        return Err(Error::Domain("the zero polynomial has no finite root set".into()));
    };
    let low = coeffs.iter().position(|c| !is_zero(c)).expect("nonzero coefficient exists");
    let core = &coeffs[low..=top];
    let degree = core.len() - 1;
    let real_input = core.iter().all(|c| c.im == T::zero());

    let (mut roots, sweeps) = match degree {
        0 => (Vec::new(), 0),
        1 => (vec![-core[0] / core[1]], 0),
        _ => aberth(core, tol)?,
    };
    if real_input && degree >= 2 {
        symmetrize_conjugates(core, &mut roots, tol);
    }
    let max_residual = roots
        .iter()
        .map(|&r| normalized_residual(core, r))
        .fold(T::zero(), T::max);
    roots.extend(std::iter::repeat_n(re(T::zero()), low));
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
    });
    Ok(RootSet { roots, max_residual, degree_deflated: top, sweeps })
}

/// p(z) and p'(z) by Horner.
fn horner<T: Real>(c: &[Complex<T>], z: Complex<T>) -> (Complex<T>, Complex<T>) {
    let mut p = c[c.len() - 1];
    let mut dp = re(T::zero());
    for &a in c[..c.len() - 1].iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Newton quotient p(z)/p'(z), evaluated through the reversed polynomial
/// outside the unit disk to avoid overflow.
fn newton_quotient<T: Real>(c: &[Complex<T>], z: Complex<T>) -> Complex<T> {
    if z.norm() <= T::one() {
        let (p, dp) = horner(c, z);
        return p / dp;
    }
    let m = T::of_usize(c.len() - 1);
    let w = z.inv();
    // rev(w) = Σ c_{m-k} w^k
    let mut r = c[0];
    let mut dr = re(T::zero());
    for &a in c[1..].iter() {
        dr = dr * w + r;
        r = r * w + a;
    }
    z * r / (r * m - w * dr)
}

/// |p(r)| / Σ |c_k| max(1,|r|)^k.
fn normalized_residual<T: Real>(c: &[Complex<T>], r: Complex<T>) -> T {
    let rho = r.norm().max(T::one());
    if r.norm() <= T::one() {
        let (p, _) = horner(c, r);
        let scale: T = c.iter().map(|a| a.norm()).sum();
        return p.norm() / scale;
    }
    // divide through by r^m to stay in range
    let w = r.inv();
    let mut p = c[0];
    for &a in c[1..].iter() {
        p = p * w + a;
    }
    let mut scale = T::zero();
    let inv_rho = rho.recip();
    for a in c.iter() {
        scale = scale * inv_rho + a.norm();
    }
    p.norm() / scale
}

fn initial_guesses<T: Real>(c: &[Complex<T>]) -> Vec<Complex<T>> {
    let m = c.len() - 1;
    let lead = c[m].norm();
    let cauchy = T::one() + c[..m].iter().map(|a| a.norm() / lead).fold(T::zero(), T::max);
    let mf = T::of_usize(m);
    let geo = (c[0].norm() / lead).powf(mf.recip());
    let radius = if geo.is_finite() && geo > T::zero() { geo.min(cauchy) } else { cauchy };
    let two_pi = T::lit(2.0) * T::PI();
    let offset = T::lit(0.4);
    (0..m)
        .map(|j| {
            let theta = two_pi * T::of_usize(j) / mf + offset;
            Complex::from_polar(radius, theta)
        })
        .collect()
}

fn aberth<T: Real>(c: &[Complex<T>], tol: T) -> Result<(Vec<Complex<T>>, usize)> {
    let m = c.len() - 1;
    let mut z = initial_guesses(c);
    let mut done = vec![false; m];
    let floor = T::lit(8.0) * T::epsilon() * T::of_usize(m);
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        for i in 0..m {
            if done[i] {
                continue;
            }
            let n = newton_quotient(c, z[i]);
            let mut s = re(T::zero());
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    s = s + (z[i] - zj).inv();
                }
            }
            let delta = n / (re(T::one()) - n * s);
            if !(delta.re.is_finite() && delta.im.is_finite()) {
                continue;
            }
            z[i] = z[i] - delta;
            let small_step = delta.norm() <= tol * z[i].norm().max(T::min_positive_value());
            if small_step || normalized_residual(c, z[i]) <= floor {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            break;
        }
    }
    for zi in z.iter_mut() {
        polish(c, zi);
    }
    let worst = z.iter().map(|&r| normalized_residual(c, r)).fold(T::zero(), T::max);
    if !(worst <= tol) {
        return Err(Error::RootsNotConverged {
            iterations: sweeps,
            max_residual: worst.to_f64_lossy(),
            best: z.iter().map(|r| (r.re.to_f64_lossy(), r.im.to_f64_lossy())).collect(),
        });
    }
    Ok((z, sweeps))
}

/// A few Newton steps, each kept only if it does not increase the residual.
fn polish<T: Real>(c: &[Complex<T>], z: &mut Complex<T>) {
    let mut best = normalized_residual(c, *z);
    for _ in 0..POLISH_STEPS {
        let n = newton_quotient(c, *z);
        if !(n.re.is_finite() && n.im.is_finite()) {
            return;
        }
        let cand = *z - n;
        let r = normalized_residual(c, cand);
        if r <= best {
            *z = cand;
            best = r;
        } else {
            return;
        }
    }
}

/// For real coefficients: snaps nearly-real roots onto the axis and pairs
/// the rest into exact conjugates.
fn symmetrize_conjugates<T: Real>(c: &[Complex<T>], roots: &mut [Complex<T>], tol: T) {
    let snap = T::lit(10.0) * tol;
    for r in roots.iter_mut() {
        if r.im.abs() <= snap * r.norm().max(T::one()) {
            let cand = re(r.re);
            if normalized_residual(c, cand) <= normalized_residual(c, *r).max(tol) {
                *r = cand;
                polish(c, r);
            }
        }
    }
    let upper: Vec<usize> = (0..roots.len()).filter(|&i| roots[i].im > T::zero()).collect();
    let lower: Vec<usize> = (0..roots.len()).filter(|&i| roots[i].im < T::zero()).collect();
    if upper.len() != lower.len() {
        return;
    }
    let mut used = vec![false; lower.len()];
    for &u in &upper {
        let target = roots[u];
        let pick = lower
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .min_by(|(_, &a), (_, &b)| {
                let da = (roots[a].conj() - target).norm();
                let db = (roots[b].conj() - target).norm();
                da.partial_cmp(&db).unwrap_or(Ordering::Equal)
            })
            .map(|(k, &l)| (k, l));
        if let Some((k, l)) = pick {
            used[k] = true;
            let avg = (target + roots[l].conj()) * T::lit(0.5);
            roots[u] = avg;
            roots[l] = avg.conj();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn quadratic_factored() {
        let rs = real_poly_roots(&[2.0f64, -3.0, 1.0], 1e-12).unwrap();
        let xs = rs.sorted_real_parts();
        assert!((xs[0] - 1.0).abs() < 1e-13 && (xs[1] - 2.0).abs() < 1e-13);
        assert!(rs.roots.iter().all(|r| r.im == 0.0));
    }

    #[test]
    fn linear_approximant_root() {
        let rs = real_poly_roots(&[2.0f64 / 3.0, 1.0 / 3.0], 1e-12).unwrap();
        assert_eq!(rs.len(), 1);
        assert!((rs.roots[0] - c(-2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn origin_roots_and_trailing_zeros() {
        // z^2 (z - 3), padded with a zero leading coefficient
        let rs = real_poly_roots(&[0.0f64, 0.0, -3.0, 1.0, 0.0], 1e-12).unwrap();
        assert_eq!(rs.len(), 3);
        assert_eq!(rs.degree_deflated, 3);
        assert_eq!(rs.roots.iter().filter(|r| r.norm() == 0.0).count(), 2);
        assert!(rs.roots.iter().any(|r| (r - c(3.0, 0.0)).norm() < 1e-13));
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(real_poly_roots(&[0.0f64, 0.0], 1e-12).is_err());
        let constant = real_poly_roots(&[5.0f64], 1e-12).unwrap();
        assert!(constant.is_empty());
    }

    #[test]
    fn roots_of_unity() {
        let n = 64;
        let mut coeffs = vec![c(0.0, 0.0); n + 1];
        coeffs[0] = c(-1.0, 0.0);
        coeffs[n] = c(1.0, 0.0);
        let rs = roots_of(&coeffs, 1e-12).unwrap();
        assert_eq!(rs.len(), n);
        for r in &rs.roots {
            assert!((r.norm() - 1.0).abs() < 1e-12);
            assert!((r.powu(n as u32) - c(1.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn complex_coefficients() {
        // (z - i)(z - 2 + i) = z^2 - 2z + (1 + 2i)
        let rs = roots_of(&[c(1.0, 2.0), c(-2.0, 0.0), c(1.0, 0.0)], 1e-12).unwrap();
        assert!(rs.roots.iter().any(|r| (r - c(0.0, 1.0)).norm() < 1e-12));
        assert!(rs.roots.iter().any(|r| (r - c(2.0, -1.0)).norm() < 1e-12));
    }

    #[test]
    fn wide_dynamic_range() {
        // roots 1e-3, 1, 1e3
        let rs = real_poly_roots(&[-1.0f64, 1001.001, -1001.001, 1.0], 1e-12).unwrap();
        let xs = rs.sorted_real_parts();
        assert!((xs[0] - 1e-3).abs() < 1e-14);
        assert!((xs[1] - 1.0).abs() < 1e-12);
        assert!((xs[2] - 1e3).abs() < 1e-9);
    }

    #[test]
    fn double_root_cluster_passes_residual() {
        // (z - 1)^2 (z + 2)
        let rs = real_poly_roots(&[2.0f64, -3.0, 0.0, 1.0], 1e-12).unwrap();
        assert_eq!(rs.len(), 3);
        assert!(rs.max_residual <= 1e-12);
        assert_eq!(rs.roots.iter().filter(|r| (*r - c(1.0, 0.0)).norm() < 1e-6).count(), 2);
    }
}
