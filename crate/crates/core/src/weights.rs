//! Weight sequences ω determining the norm ‖f‖²_ω = Σ |a_n|² ω_n.
//!
//! Every sequence has ω_0 = 1, is positive, and has ω_n / ω_{n+1} → 1.
//! The parametric families satisfy this analytically. Custom sequences are
//! an explicit prefix followed by a tail rule, and are admitted by a
//! heuristic gate: |ω_n / ω_{n+1} − 1| < 0.5 from a declared index onwards.
//! The gate is not a proof of the limit condition.
//!
//! # JSON schema for custom weights
//!
//! ```json
//! {
//!   "prefix": [1.0, 0.5, 0.2],
//!   "tail": { "type": "ratio", "value": 1.0 },
//!   "check_from": 0
//! }
//! ```
//!
//! `tail` is one of
//! * `{"type": "ratio", "value": r}`: ω_n / ω_{n+1} = r past the prefix;
//! * `{"type": "formula", "family": "dirichlet", "alpha": a, "scale": s}`:
//!   ω_n = s (n+1)^a past the prefix;
//! * `{"type": "formula", "family": "bergman", "beta": b, "scale": s}`:
//!   ω_n = s / C(b+n+1, n) past the prefix.
//!
//! `scale` is optional; when omitted it is chosen so that the formula agrees
//! with the last prefix entry. `check_from` (default 0) is the first index at
//! which the ratio gate is enforced.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special::{binomial_exact, ln_gamma};

/// Admission threshold for |ω_n/ω_{n+1} − 1| on custom sequences.
pub const CUSTOM_RATIO_GATE: f64 = 0.5;

/// How far past the prefix (and past `check_from`) the ratio gate samples.
const GATE_SAMPLE_SPAN: usize = 256;

/// (n+1)^α.
pub fn dirichlet_weight<T: Real>(alpha: T, n: usize) -> T {
    let base = T::of_usize(n + 1);
    match integer_exponent(alpha) {
        Some(k) => base.powi(k),
        None => base.powf(alpha),
    }
}

/// 1 / C(β + n + 1, n), for β > −1.
///
/// Integer β goes through exact integer binomials; otherwise the binomial is
/// evaluated through log-Gamma.
pub fn bergman_weight<T: Real>(beta: T, n: usize) -> Result<T> {
    check_bergman_beta(beta)?;
    Ok(bergman_weight_unchecked(beta, n))
}

/// ω_n / ω_{n+1}.
pub fn weight_ratio<T: Real>(omega: &WeightSequence<T>, n: usize) -> T {
    omega.ratio(n)
}

fn check_bergman_beta<T: Real>(beta: T) -> Result<()> {
    if !(beta > -T::one()) || !beta.is_finite() {
        return Err(Error::Domain(format!(
            "Bergman parameter must satisfy beta > -1, got {beta}"
        )));
    }
    Ok(())
}

fn integer_exponent<T: Real>(x: T) -> Option<i32> {
    if x == x.round() && x.abs() < T::lit(1e6) {
        x.to_i32()
    } else {
        None
    }
}

fn bergman_weight_unchecked<T: Real>(beta: T, n: usize) -> T {
    if n == 0 {
        return T::one();
    }
    if beta == beta.round() {
        if let Some(b) = beta.to_u64() {
            if let Some(c) = binomial_exact(b + n as u64 + 1, n as u64) {
                if let Some(c) = T::from_u128(c) {
                    return T::one() / c;
                }
            }
        }
    }
    let one = T::one();
    let nn = T::of_usize(n);
    let ln_binom = ln_gamma(beta + nn + one + one) - ln_gamma(nn + one) - ln_gamma(beta + one + one);
    (-ln_binom).exp()
}

/// Tail rule that extends a custom prefix to all indices.
#[derive(Debug, Clone, PartialEq)]
pub enum TailRule<T> {
    /// ω_n / ω_{n+1} = `ratio` for every n ≥ prefix length − 1.
    Ratio { ratio: T },
    /// ω_n = scale · (n+1)^α.
    Dirichlet { alpha: T, scale: T },
    /// ω_n = scale / C(β+n+1, n).
    Bergman { beta: T, scale: T },
}

/// Explicit prefix plus tail rule.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomWeights<T> {
    prefix: Vec<T>,
    tail: TailRule<T>,
    check_from: usize,
}

impl<T: Real> CustomWeights<T> {
    pub fn prefix(&self) -> &[T] {
        &self.prefix
    }

    pub fn tail(&self) -> &TailRule<T> {
        &self.tail
    }

    pub fn check_from(&self) -> usize {
        self.check_from
    }

    fn weight(&self, n: usize) -> T {
        if let Some(&w) = self.prefix.get(n) {
            return w;
        }
        let last = self.prefix.len() - 1;
        match &self.tail {
            TailRule::Ratio { ratio } => {
                let steps = T::of_usize(n - last);
                self.prefix[last] * ratio.powf(-steps)
            }
            TailRule::Dirichlet { alpha, scale } => *scale * dirichlet_weight(*alpha, n),
            TailRule::Bergman { beta, scale } => *scale * bergman_weight_unchecked(*beta, n),
        }
    }

    fn ratio(&self, n: usize) -> T {
        if n + 1 < self.prefix.len() {
            return self.prefix[n] / self.prefix[n + 1];
        }
        let last = self.prefix.len() - 1;
        match &self.tail {
            TailRule::Ratio { ratio } => *ratio,
            _ if n < last + 1 => self.weight(n) / self.weight(n + 1),
            TailRule::Dirichlet { alpha, .. } => dirichlet_ratio(*alpha, n),
            TailRule::Bergman { beta, .. } => bergman_ratio(*beta, n),
        }
    }

    fn tail_nonincreasing(&self) -> bool {
        match &self.tail {
            TailRule::Ratio { ratio } => *ratio >= T::one(),
            TailRule::Dirichlet { alpha, .. } => *alpha <= T::zero(),
            TailRule::Bergman { .. } => true,
        }
    }

    fn sup_from(&self, n: usize) -> Option<T> {
        if !self.tail_nonincreasing() {
            return None;
        }
        let start = n.max(self.prefix.len());
        // the first tail value is the tail supremum once the rule is nonincreasing
        let mut sup = self.weight(start);
        for &w in self.prefix.iter().skip(n) {
            sup = sup.max(w);
        }
        Some(sup)
    }
}

fn dirichlet_ratio<T: Real>(alpha: T, n: usize) -> T {
    let q = T::of_usize(n + 1) / T::of_usize(n + 2);
    match integer_exponent(alpha) {
        Some(k) => q.powi(k),
        None => q.powf(alpha),
    }
}

fn bergman_ratio<T: Real>(beta: T, n: usize) -> T {
    (beta + T::of_usize(n + 2)) / T::of_usize(n + 1)
}

/// A weight sequence ω = {ω_n}.
///
/// Immutable and cheap to clone; evaluation is a pure function of `n`.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSequence<T> {
    /// ω_n = 1.
    Hardy,
    /// ω_n = (n+1)^α.
    Dirichlet { alpha: T },
    /// ω_n = 1 / C(β+n+1, n), β > −1.
    Bergman { beta: T },
    Custom(CustomWeights<T>),
}

impl<T: Real> WeightSequence<T> {
    pub fn hardy() -> Self {
        Self::Hardy
    }

    pub fn dirichlet(alpha: T) -> Self {
        Self::Dirichlet { alpha }
    }

    pub fn bergman(beta: T) -> Result<Self> {
        check_bergman_beta(beta)?;
        Ok(Self::Bergman { beta })
    }

    /// Builds and validates a custom sequence. A NaN `scale` in a formula
    /// tail is replaced by the value continuing the last prefix entry.
    pub fn custom(prefix: Vec<T>, tail: TailRule<T>, check_from: usize) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::InvalidWeights("prefix must contain at least omega_0".into()));
        }
        if prefix[0] != T::one() {
            return Err(Error::InvalidWeights(format!("omega_0 must be 1, got {}", prefix[0])));
        }
        if let Some((i, w)) = prefix
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > T::zero()))
        {
            return Err(Error::InvalidWeights(format!("omega_{i} = {w} is not positive")));
        }
        let last = *prefix.last().expect("nonempty");
        let tail = match tail {
            TailRule::Ratio { ratio } => {
                if !(ratio.is_finite() && ratio > T::zero()) {
                    return Err(Error::InvalidWeights(format!("tail ratio {ratio} must be positive")));
                }
                TailRule::Ratio { ratio }
            }
            TailRule::Dirichlet { alpha, scale } => {
                let scale = resolve_scale(scale, last, dirichlet_weight(alpha, prefix.len() - 1))?;
                TailRule::Dirichlet { alpha, scale }
            }
            TailRule::Bergman { beta, scale } => {
                check_bergman_beta(beta)?;
                let base = bergman_weight_unchecked(beta, prefix.len() - 1);
                let scale = resolve_scale(scale, last, base)?;
                TailRule::Bergman { beta, scale }
            }
        };
        let custom = CustomWeights { prefix, tail, check_from };
        let gate = T::lit(CUSTOM_RATIO_GATE);
        let upto = custom.prefix.len().max(check_from) + GATE_SAMPLE_SPAN;
        for n in check_from..upto {
            let r = custom.ratio(n);
            if !r.is_finite() || (r - T::one()).abs() >= gate {
                return Err(Error::InvalidWeights(format!(
                    "ratio omega_{n}/omega_{} = {r} fails the admission gate |ratio - 1| < {gate}",
                    n + 1
                )));
            }
        }
        Ok(Self::Custom(custom))
    }

    /// Parses the custom-weight JSON document described in the module docs.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: CustomWeightsSpec =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.build()
    }

    /// ω_n.
    pub fn weight(&self, n: usize) -> T {
        match self {
            Self::Hardy => T::one(),
            Self::Dirichlet { alpha } => dirichlet_weight(*alpha, n),
            Self::Bergman { beta } => bergman_weight_unchecked(*beta, n),
            Self::Custom(c) => c.weight(n),
        }
    }

    /// ω_0, …, ω_{len−1}.
    pub fn weights(&self, len: usize) -> Vec<T> {
        (0..len).map(|n| self.weight(n)).collect()
    }

    /// ω_n / ω_{n+1}, evaluated in closed form for the parametric families.
    pub fn ratio(&self, n: usize) -> T {
        match self {
            Self::Hardy => T::one(),
            Self::Dirichlet { alpha } => dirichlet_ratio(*alpha, n),
            Self::Bergman { beta } => bergman_ratio(*beta, n),
            Self::Custom(c) => c.ratio(n),
        }
    }

    /// sup_{m ≥ n} ω_m when it is known to be finite.
    pub fn sup_from(&self, n: usize) -> Option<T> {
        match self {
            Self::Hardy => Some(T::one()),
            Self::Dirichlet { alpha } if *alpha <= T::zero() => Some(self.weight(n)),
            Self::Dirichlet { .. } => None,
            Self::Bergman { .. } => Some(self.weight(n)),
            Self::Custom(c) => c.sup_from(n),
        }
    }

    /// sup_{m ≥ n} |ω_m/ω_{m+1} − 1| when it is known.
    pub fn ratio_deviation_sup_from(&self, n: usize) -> Option<T> {
        let dev = |m: usize| (self.ratio(m) - T::one()).abs();
        match self {
            Self::Hardy => Some(T::zero()),
            // both deviations decrease monotonically in n
            Self::Dirichlet { .. } | Self::Bergman { .. } => Some(dev(n)),
            Self::Custom(c) => {
                let start = n.max(c.prefix.len());
                let tail = match &c.tail {
                    TailRule::Ratio { ratio } => (*ratio - T::one()).abs(),
                    TailRule::Dirichlet { .. } | TailRule::Bergman { .. } => dev(start),
                };
                Some((n..start).map(dev).fold(tail, T::max))
            }
        }
    }

    /// Whether ω is nondecreasing, when that is decidable from the
    /// representation.
    pub fn is_nondecreasing(&self) -> bool {
        match self {
            Self::Hardy => true,
            Self::Dirichlet { alpha } => *alpha >= T::zero(),
            Self::Bergman { .. } => false,
            Self::Custom(c) => {
                let prefix_ok = c.prefix.windows(2).all(|w| w[0] <= w[1]);
                let tail_ok = match &c.tail {
                    TailRule::Ratio { ratio } => *ratio <= T::one(),
                    TailRule::Dirichlet { alpha, .. } => *alpha >= T::zero(),
                    TailRule::Bergman { .. } => false,
                };
                let join = c.prefix.len() < 2 || c.ratio(c.prefix.len() - 1) <= T::one();
                prefix_ok && tail_ok && join
            }
        }
    }

    /// Checks ω_n > ω_{n+1} for n in 0..upto.
    pub fn strictly_decreasing_on(&self, upto: usize) -> bool {
        (0..upto).all(|n| self.ratio(n) > T::one())
    }
}

/// A NaN scale means "continue from the last prefix entry".
fn resolve_scale<T: Real>(scale: T, last: T, base: T) -> Result<T> {
    if scale.is_nan() {
        Ok(last / base)
    } else if scale.is_finite() && scale > T::zero() {
        Ok(scale)
    } else {
        Err(Error::InvalidWeights(format!("tail scale {scale} must be positive")))
    }
}

impl<T: Real> fmt::Display for WeightSequence<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Hardy => write!(f, "hardy"),
            Self::Dirichlet { alpha } => write!(f, "dirichlet:{alpha}"),
            Self::Bergman { beta } => write!(f, "bergman:{beta}"),
            Self::Custom(c) => write!(f, "custom[{} prefix terms]", c.prefix.len()),
        }
    }
}

/// JSON form of a custom weight sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CustomWeightsSpec {
    pub prefix: Vec<f64>,
    pub tail: TailSpec,
    #[serde(default)]
    pub check_from: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum TailSpec {
    Ratio {
        value: f64,
    },
    Formula {
        family: FormulaFamily,
        #[serde(default)]
        alpha: Option<f64>,
        #[serde(default)]
        beta: Option<f64>,
        #[serde(default)]
        scale: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulaFamily {
    Dirichlet,
    Bergman,
}

impl CustomWeightsSpec {
    pub fn build<T: Real>(&self) -> Result<WeightSequence<T>> {
        let prefix = self.prefix.iter().map(|&x| T::lit(x)).collect();
        let tail = match &self.tail {
            TailSpec::Ratio { value } => TailRule::Ratio { ratio: T::lit(*value) },
            TailSpec::Formula { family, alpha, beta, scale } => {
                let scale = scale.map(T::lit);
                match family {
                    FormulaFamily::Dirichlet => TailRule::Dirichlet {
                        alpha: T::lit(alpha.ok_or_else(|| {
                            Error::Parse("dirichlet tail formula needs \"alpha\"".into())
                        })?),
                        scale: scale.unwrap_or_else(T::nan),
                    },
                    FormulaFamily::Bergman => TailRule::Bergman {
                        beta: T::lit(beta.ok_or_else(|| {
                            Error::Parse("bergman tail formula needs \"beta\"".into())
                        })?),
                        scale: scale.unwrap_or_else(T::nan),
                    },
                }
            }
        };
        WeightSequence::custom(prefix, tail, self.check_from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dirichlet_examples() {
        assert_eq!(dirichlet_weight(0.0f64, 7), 1.0);
        assert_eq!(dirichlet_weight(1.0f64, 1), 2.0);
        assert_eq!(dirichlet_weight(-1.0f64, 3), 0.25);
        assert_relative_eq!(dirichlet_weight(0.5f64, 3), 2.0);
    }

    #[test]
    fn bergman_examples() {
        assert_relative_eq!(bergman_weight(0.0f64, 4).unwrap(), 0.2, max_relative = 1e-15);
        assert_relative_eq!(bergman_weight(1.0f64, 2).unwrap(), 1.0 / 6.0, max_relative = 1e-15);
        assert_eq!(bergman_weight(2.0f64, 0).unwrap(), 1.0);
        assert!(matches!(bergman_weight(-1.0f64, 3), Err(Error::Domain(_))));
        assert!(bergman_weight(-1.5f64, 3).is_err());
    }

    #[test]
    fn bergman_non_integer_matches_ratio_product() {
        // ω_n = Π_{k<n} (k+1)/(k+β+2)
        let beta = 0.37f64;
        let mut w = 1.0;
        for n in 0..200 {
            assert_relative_eq!(bergman_weight(beta, n).unwrap(), w, max_relative = 1e-12);
            w *= (n as f64 + 1.0) / (n as f64 + beta + 2.0);
        }
    }

    #[test]
    fn ratio_examples() {
        let h = WeightSequence::<f64>::hardy();
        assert_eq!(weight_ratio(&h, 5), 1.0);
        let d = WeightSequence::dirichlet(-1.0f64);
        // ω_1/ω_2 = 2^{-1}/3^{-1}
        assert_relative_eq!(weight_ratio(&d, 1), 3.0 / 2.0, max_relative = 1e-15);
        let b = WeightSequence::bergman(0.0f64).unwrap();
        assert_relative_eq!(weight_ratio(&b, 1), 3.0 / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn dirichlet_minus_one_is_bergman_zero() {
        let d = WeightSequence::dirichlet(-1.0f64);
        let b = WeightSequence::bergman(0.0f64).unwrap();
        for n in 0..=10_000 {
            assert_eq!(d.weight(n), b.weight(n), "n = {n}");
            assert_relative_eq!(d.ratio(n), b.ratio(n), max_relative = 1e-15);
        }
    }

    #[test]
    fn ratios_tend_to_one() {
        let seqs = [
            WeightSequence::dirichlet(-12.0f64),
            WeightSequence::dirichlet(12.0),
            WeightSequence::dirichlet(-0.5),
            WeightSequence::bergman(-0.5).unwrap(),
            WeightSequence::bergman(3.0).unwrap(),
            WeightSequence::hardy(),
        ];
        let mut n = 1usize;
        while n <= 100_000 {
            let m = n as f64 + 1.0;
            for w in &seqs {
                let r = w.ratio(n);
                // |(1 + 1/m)^a − 1| ≤ e^{|a|/m} − 1 bounds every family here
                let a = match w {
                    WeightSequence::Dirichlet { alpha } => alpha.abs(),
                    WeightSequence::Bergman { beta } => (1.0 + beta).abs(),
                    _ => 0.0,
                };
                assert!((r - 1.0).abs() <= (a / m).exp_m1() * (1.0 + 1e-12), "{w} n={n} r={r}");
                // the plain 10/(n+1) bound needs (3/2)^{-α} − 1 < 5 at n = 1
                // and |α| < 10 asymptotically, which excludes α = ±12
                if !matches!(w, WeightSequence::Dirichlet { alpha } if alpha.abs() > 4.0) {
                    assert!((r - 1.0).abs() < 10.0 / m, "{w} n={n} r={r}");
                }
            }
            n = n * 3 + 1;
        }
    }

    #[test]
    fn evaluation_is_pure() {
        let w = WeightSequence::bergman(1.7f64).unwrap();
        for n in [0, 1, 17, 4096, 99_999] {
            assert_eq!(w.weight(n).to_bits(), w.weight(n).to_bits());
        }
    }

    #[test]
    fn custom_ratio_tail() {
        let w = WeightSequence::custom(vec![1.0f64, 0.5, 0.4], TailRule::Ratio { ratio: 1.0 }, 1).unwrap();
        assert_eq!(w.weight(2), 0.4);
        assert_eq!(w.weight(50), 0.4);
        assert_eq!(w.ratio(0), 2.0);
        assert_eq!(w.sup_from(1), Some(0.5));
        assert!(!w.is_nondecreasing());
    }

    #[test]
    fn custom_rejections() {
        let bad0 = WeightSequence::custom(vec![2.0f64], TailRule::Ratio { ratio: 1.0 }, 0);
        assert!(matches!(bad0, Err(Error::InvalidWeights(_))));
        let neg = WeightSequence::custom(vec![1.0f64, -0.1], TailRule::Ratio { ratio: 1.0 }, 0);
        assert!(neg.is_err());
        // ω_1 = ω_0 / 5 breaks the gate at index 0 ...
        let jump = vec![1.0f64, 0.2, 0.2];
        assert!(WeightSequence::custom(jump.clone(), TailRule::Ratio { ratio: 1.0 }, 0).is_err());
        // ... but is admitted when the gate starts later.
        assert!(WeightSequence::custom(jump, TailRule::Ratio { ratio: 1.0 }, 1).is_ok());
        let steep = WeightSequence::custom(vec![1.0f64], TailRule::Ratio { ratio: 3.0 }, 0);
        assert!(steep.is_err());
    }

    #[test]
    fn custom_json_formula_tail_is_continuous() {
        let text = r#"{"prefix": [1.0, 0.3], "tail": {"type": "formula", "family": "dirichlet", "alpha": -1.0}, "check_from": 2}"#;
        let w = WeightSequence::<f64>::from_json_str(text).unwrap();
        // scale = 0.3 / 2^{-1} = 0.6, so ω_n = 0.6 / (n+1) past the prefix
        assert_relative_eq!(w.weight(2), 0.2, max_relative = 1e-15);
        assert_relative_eq!(w.weight(9), 0.06, max_relative = 1e-15);
        assert_relative_eq!(w.ratio(5), 7.0 / 6.0, max_relative = 1e-15);
        assert_eq!(w.sup_from(3), Some(w.weight(3)));

        let text = r#"{"prefix": [1.0], "tail": {"type": "formula", "family": "bergman", "beta": 1.0, "scale": 1.0}, "check_from": 4}"#;
        let w = WeightSequence::<f64>::from_json_str(text).unwrap();
        assert_relative_eq!(w.weight(2), 1.0 / 6.0, max_relative = 1e-15);
    }

    #[test]
    fn custom_json_errors() {
        assert!(matches!(WeightSequence::<f64>::from_json_str("{"), Err(Error::Parse(_))));
        let missing = r#"{"prefix": [1.0], "tail": {"type": "formula", "family": "bergman"}}"#;
        assert!(matches!(WeightSequence::<f64>::from_json_str(missing), Err(Error::Parse(_))));
    }

    #[test]
    fn sup_from_known_cases() {
        assert_eq!(WeightSequence::<f64>::hardy().sup_from(10), Some(1.0));
        assert_eq!(WeightSequence::dirichlet(1.0f64).sup_from(10), None);
        let b = WeightSequence::bergman(0.0f64).unwrap();
        assert_relative_eq!(b.sup_from(9).unwrap(), 0.1);
    }
}
