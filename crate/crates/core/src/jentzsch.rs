//! Zero statistics of approximant sequences and the construction of
//! approximants with prescribed numbers of zeros inside the disk.

use std::cmp::Ordering;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gram::{optimal_approximant, optimal_approximants, Approximant};
use crate::roots::{poly_roots, RootSet};
use crate::scalar::{re, Real};
use crate::series::{cayley_witness, weighted_inner, CoeffSeries, shift};
use crate::weights::WeightSequence;

/// Roots farther out than this carry no angular information.
pub const DEFAULT_CUTOFF: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct ZeroStats<T> {
    pub degree: usize,
    /// #{j : |z_j| ≤ 1 + ε} / n.
    pub tau_eps_fraction: T,
    /// (Π_j |z_j|)^{1/n} over all roots.
    pub geo_mean_modulus: T,
    /// Arc discrepancy of the arguments of roots with |z| ≤ cutoff.
    pub angular_discrepancy: T,
    /// Roots with |z| ≤ 1.
    pub count_in_unit_disk: usize,
    pub min_root_modulus: T,
    pub epsilon: T,
    pub cutoff_radius: T,
}

pub fn zero_stats<T: Real>(roots: &RootSet<T>, n: usize, eps: T) -> Result<ZeroStats<T>> {
    zero_stats_with_cutoff(roots, n, eps, T::lit(DEFAULT_CUTOFF))
}

pub fn zero_stats_with_cutoff<T: Real>(
    roots: &RootSet<T>,
    n: usize,
    eps: T,
    cutoff: T,
) -> Result<ZeroStats<T>> {
    if n == 0 {
        return Err(Error::Domain("zero statistics need degree n >= 1".into()));
    }
    let nn = T::of_usize(n);
    let moduli: Vec<T> = roots.roots.iter().map(|z| z.norm()).collect();
    let inside = moduli.iter().filter(|&&r| r <= T::one() + eps).count();
    let log_sum: T = moduli.iter().map(|r| r.ln()).sum();
    let args: Vec<T> = roots
        .roots
        .iter()
        .filter(|z| z.norm() <= cutoff)
        .map(|z| unit_argument(*z))
        .collect();
    Ok(ZeroStats {
        degree: n,
        tau_eps_fraction: T::of_usize(inside) / nn,
        geo_mean_modulus: (log_sum / nn).exp(),
        angular_discrepancy: arc_discrepancy(args),
        count_in_unit_disk: moduli.iter().filter(|&&r| r <= T::one()).count(),
        min_root_modulus: moduli.iter().copied().fold(T::infinity(), T::min),
        epsilon: eps,
        cutoff_radius: cutoff,
    })
}

/// arg z / 2π in [0, 1).
fn unit_argument<T: Real>(z: Complex<T>) -> T {
    let two_pi = T::lit(2.0) * T::PI();
    let a = z.im.atan2(z.re);
    let a = if a < T::zero() { a + two_pi } else { a };
    let u = a / two_pi;
    if u >= T::one() {
        T::zero()
    } else {
        u
    }
}

/// max_k (k/m − u_k) + max_k (u_k − (k−1)/m) over sorted u: the largest
/// deviation of the empirical measure from uniform over arcs, which does not
/// depend on where the circle is cut. 1 for an empty set.
pub fn arc_discrepancy<T: Real>(mut u: Vec<T>) -> T {
    if u.is_empty() {
        return T::one();
    }
    u.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let m = T::of_usize(u.len());
    let mut above = T::zero();
    let mut below = T::zero();
    for (i, &x) in u.iter().enumerate() {
        above = above.max(T::of_usize(i + 1) / m - x);
        below = below.max(x - T::of_usize(i) / m);
    }
    (above + below).min(T::one())
}

/// One row of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct SweepRow<T> {
    pub degree: usize,
    /// None when the approximant is constant and has no roots.
    pub stats: Option<ZeroStats<T>>,
    pub residual_norm: T,
}

impl<T> SweepRow<T> {
    pub fn is_constant(&self) -> bool {
        self.stats.is_none()
    }
}

/// Approximants, roots and statistics for each requested degree. Rows come
/// back in the order of `degrees`; root finding runs in parallel.
pub fn jentzsch_sweep<T: Real>(
    f: &CoeffSeries<T>,
    omega: &WeightSequence<T>,
    degrees: &[usize],
    eps: T,
    tol: T,
) -> Result<Vec<SweepRow<T>>> {
    let Some(&top) = degrees.iter().max() else {
        return Ok(Vec::new());
    };
    let all = optimal_approximants(f, omega, top)?;
    degrees
        .par_iter()
        .map(|&n| {
            let p = all[n].clone()?;
            row_for(p, eps, tol)
        })
        .collect()
}

fn row_for<T: Real>(p: Approximant<T>, eps: T, tol: T) -> Result<SweepRow<T>> {
    let degree = p.degree;
    let residual_norm = p.residual_norm;
    if p.is_constant() {
        return Ok(SweepRow { degree, stats: None, residual_norm });
    }
    let roots = poly_roots(&p.polynomial(), tol)?;
    let stats = zero_stats(&roots, roots.len(), eps)?;
    Ok(SweepRow { degree, stats: Some(stats), residual_norm })
}

/// Checks made on the degree-r approximant of 1/g_r, g_r(z) = f_{k,n}(z^r).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct MultiZeroReport<T> {
    pub k: usize,
    pub n: usize,
    pub r: usize,
    /// ω_{kr+1} > 4 ω_{nr+kr+1}, as stated for the construction.
    pub condition_stated: bool,
    /// ω_{r(k+1)} > 4 ω_{r(n+k+1)}, the form the computation actually needs.
    pub condition_exact: bool,
    /// ω strictly decreasing on the indices the construction touches.
    pub weights_decreasing: bool,
    /// g_r(0) = 0, so the approximant is identically zero.
    pub degenerate: bool,
    /// max |c_j| over 0 < j < r, relative to max |c|.
    pub off_support: T,
    pub depends_only_on_z_r: bool,
    /// ‖z^r g_r‖² / |⟨g_r, z^r g_r⟩|, the predicted |z_0|^r.
    pub predicted_modulus_pow_r: T,
    /// max over roots of ||z_0|^r − predicted| / predicted.
    pub modulus_error: T,
    pub modulus_ok: bool,
    /// max deviation of consecutive argument gaps from 2π/r.
    pub gap_error: T,
    pub gaps_ok: bool,
    pub roots_inside_disk: bool,
    pub roots: Vec<Complex<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Serialize"))]
pub struct MultiZeroExample<T> {
    pub approximant: Approximant<T>,
    pub report: MultiZeroReport<T>,
}

/// g_r(z) = f_{k,n}(z^r).
pub fn multi_zero_function<T: Real>(k: usize, n: usize, r: usize) -> CoeffSeries<T> {
    let base = cayley_witness::<T>(k, n);
    let mut coeffs = vec![re(T::zero()); (base.len() - 1) * r + 1];
    for (i, &c) in base.coeffs().iter().enumerate() {
        coeffs[i * r] = c;
    }
    CoeffSeries::polynomial(coeffs)
}

pub fn multi_zero_example<T: Real>(
    omega: &WeightSequence<T>,
    k: usize,
    n: usize,
    r: usize,
    tol: T,
) -> Result<MultiZeroExample<T>> {
    if r == 0 || n == 0 {
        return Err(Error::Domain("multi-zero construction needs r >= 1 and n >= 1".into()));
    }
    let g = multi_zero_function::<T>(k, n, r);
    let four = T::lit(4.0);
    let condition_stated = omega.weight(k * r + 1) > four * omega.weight(n * r + k * r + 1);
    let condition_exact = omega.weight(r * (k + 1)) > four * omega.weight(r * (n + k + 1));
    let weights_decreasing = omega.strictly_decreasing_on(n * r + k * r + 2);

    let zr_g = shift(&g, r);
    let num = zr_g.norm_sq(omega);
    let den = weighted_inner(&g, &zr_g, omega).norm();
    let predicted = num / den;

    let mut p = optimal_approximant(&g, omega, r)?;
    let degenerate = p.coeffs.iter().all(|c| c.norm() == T::zero());
    let scale = p.coeffs.iter().map(|c| c.norm()).fold(T::zero(), T::max);
    let off_support = if degenerate {
        T::zero()
    } else {
        p.coeffs[1..r].iter().map(|c| c.norm()).fold(T::zero(), T::max) / scale
    };
    let depends_only_on_z_r = off_support < T::lit(1e-10);

    let mut roots = Vec::new();
    let (mut modulus_error, mut gap_error) = (T::infinity(), T::infinity());
    if !degenerate {
        // drop the numerically-zero off-support terms before root finding
        let mut support = vec![re(T::zero()); r + 1];
        support[0] = p.coeffs[0];
        support[r] = p.coeffs[r];
        let set = poly_roots(&CoeffSeries::polynomial(support), tol)?;
        roots = set.roots.clone();
        modulus_error = roots
            .iter()
            .map(|z| (z.norm().powi(r as i32) - predicted).abs() / predicted)
            .fold(T::zero(), T::max);
        gap_error = angular_gap_error(&roots);
        p.roots = Some(set);
    }
    let roots_inside_disk = !roots.is_empty() && roots.iter().all(|z| z.norm() < T::one());
    let report = MultiZeroReport {
        k,
        n,
        r,
        condition_stated,
        condition_exact,
        weights_decreasing,
        degenerate,
        off_support,
        depends_only_on_z_r,
        predicted_modulus_pow_r: predicted,
        modulus_error,
        modulus_ok: modulus_error <= T::lit(1e-8),
        gap_error,
        gaps_ok: gap_error <= T::lit(1e-8),
        roots_inside_disk,
        roots,
    };
    Ok(MultiZeroExample { approximant: p, report })
}

fn angular_gap_error<T: Real>(roots: &[Complex<T>]) -> T {
    let m = roots.len();
    if m < 2 {
        return T::zero();
    }
    let two_pi = T::lit(2.0) * T::PI();
    let mut args: Vec<T> = roots.iter().map(|z| unit_argument(*z) * two_pi).collect();
    args.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let gap = two_pi / T::of_usize(m);
    let mut worst = T::zero();
    for i in 0..m {
        let next = if i + 1 < m { args[i + 1] } else { args[0] + two_pi };
        worst = worst.max((next - args[i] - gap).abs());
    }
    worst
}
