//! Parameter rules for the composite oracles.
//!
//! Small-k: `k' = ⌊k/3⌋` and a sampling exponent `i` per `k mod 3`, giving
//! stretch `6k' - 1 ≤ 2k - 1`.
//!
//! Near-linear: `κ = ⌈k/(i+1)⌉` levels for the restricted oracle over the
//! spanner, `k' = ⌊(k + 3(κ-1)) / (6κ - 3)⌋`, and the certificate
//! `2 + 3(2k' - 1)(2κ - 1) ≤ 2k - 1`.

use num_integer::Roots;

use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("small-k oracle needs k >= 3 (got {0}); use the warm-up or plain Thorup-Zwick oracle")]
    SmallKTooSmall(usize),
    #[error("k must be at least 1")]
    ZeroK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamsSmallK {
    pub k: usize,
    pub k_prime: usize,
    /// Exponent `i`; vertices are sampled with probability `n^(-i/k)`.
    pub i: Rational,
}

impl ParamsSmallK {
    pub fn sampling_exponent(&self) -> Rational {
        self.i / Rational::from_integer(self.k as u64)
    }

    /// `6k' - 1`, the stretch of the far estimate.
    pub fn far_stretch(&self) -> u64 {
        6 * self.k_prime as u64 - 1
    }
}

pub fn select_params_small_k(k: usize) -> Result<ParamsSmallK, ParamError> {
    if k < 3 {
        return Err(ParamError::SmallKTooSmall(k));
    }
    let kk = k as u64;
    let r = Rational::new;
    let (k_prime, i) = match k % 3 {
        0 => (k / 3, r(kk, 2) + 1),
        1 => (k / 3, r(kk - 1, 2) + r(3 * kk, 2 * (kk - 1))),
        _ => (k / 3, r(kk - 2, 2) + r(2 * kk - 1, kk - 2)),
    };
    let params = ParamsSmallK { k, k_prime, i };
    assert!(params.k_prime >= 1);
    assert!(params.i > Rational::from_integer(0) && params.i <= Rational::from_integer(kk));
    assert!(params.far_stretch() <= 2 * kk - 1, "small-k certificate");
    Ok(params)
}

/// `c = a + b·√radicand`, kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RadicalConstant {
    pub a: u64,
    pub b: u64,
    pub radicand: u64,
}

/// `9 + 3√13`.
pub const DEFAULT_C: RadicalConstant = RadicalConstant { a: 9, b: 3, radicand: 13 };

impl RadicalConstant {
    pub fn to_f64(self) -> f64 {
        self.a as f64 + self.b as f64 * libm::sqrt(self.radicand as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamMode {
    /// `κ` = largest integer `≤ c√k/18` with `c = 9 + 3√13`, `i = k/κ - 1`.
    ConstantC,
    /// `κ = ⌈√(k/6)⌉` with `i + 1 ≈ √(6k)`.
    LargeK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParamsNearLinear {
    pub k: usize,
    pub mode: ParamMode,
    pub c: RadicalConstant,
    pub kappa: usize,
    pub i: Rational,
    pub k_prime: usize,
}

impl ParamsNearLinear {
    pub fn sampling_exponent(&self) -> Rational {
        self.i / Rational::from_integer(self.k as u64)
    }

    /// `2 + 3(2k' - 1)(2κ - 1)`.
    pub fn stretch_certificate(&self) -> u64 {
        2 + 3 * (2 * self.k_prime as u64 - 1) * (2 * self.kappa as u64 - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NearLinearSelection {
    Feasible(ParamsNearLinear),
    /// `i ≤ 0` or `k' < 1`; the builder falls back to another oracle.
    Infeasible { k: usize, kappa: usize, i: Rational, k_prime: usize },
}

/// `⌊(k + 3(κ - 1)) / (6κ - 3)⌋`.
pub fn max_k_prime(k: usize, kappa: usize) -> usize {
    (k + 3 * (kappa - 1)) / (6 * kappa - 3)
}

/// Largest `κ` with `18κ ≤ c√k`, by exact integer comparison.
fn constant_c_kappa(k: usize, c: RadicalConstant) -> usize {
    // 18κ ≤ (a + b√r)√k  ⇔  18κ - a√k ≤ b√(rk); square whenever both sides
    // are non-negative.
    let fits = |kappa: u128| -> bool {
        let k = k as u128;
        let (a, b, r) = (c.a as u128, c.b as u128, c.radicand as u128);
        // 18κ ≤ a√k ⇔ 324κ² ≤ a²k
        let lhs_sq = 324 * kappa * kappa;
        if lhs_sq <= a * a * k {
            return true;
        }
        // (18κ - a√k)² ≤ b²rk ⇔ 324κ² + a²k - b²rk ≤ 36κa√k
        let left = lhs_sq as i128 + (a * a * k) as i128 - (b * b * r * k) as i128;
        if left <= 0 {
            return true;
        }
        let right_sq = 1296 * kappa * kappa * a * a * k;
        (left as u128) * (left as u128) <= right_sq
    };
    let mut kappa = 0u128;
    while fits(kappa + 1) {
        kappa += 1;
    }
    kappa as usize
}

pub fn select_params_near_linear(k: usize, mode: ParamMode) -> Result<NearLinearSelection, ParamError> {
    if k < 1 {
        return Err(ParamError::ZeroK);
    }
    let kk = k as u64;
    let (kappa, i) = match mode {
        ParamMode::ConstantC => {
            let kappa = constant_c_kappa(k, DEFAULT_C);
            if kappa == 0 {
                return Ok(NearLinearSelection::Infeasible {
                    k,
                    kappa,
                    i: Rational::from_integer(0),
                    k_prime: 0,
                });
            }
            let i = Rational::new(kk, kappa as u64) - 1;
            (kappa, i)
        }
        ParamMode::LargeK => {
            // smallest κ with 6κ² ≥ k
            let mut kappa = (k / 6).sqrt().max(1);
            while 6 * kappa * kappa < k {
                kappa += 1;
            }
            // i + 1 = ⌈1000·√(6k)⌉ / 1000
            let scaled = (6 * kk * 1_000_000).sqrt();
            let scaled = if scaled * scaled < 6 * kk * 1_000_000 { scaled + 1 } else { scaled };
            let i = Rational::new(scaled, 1000) - 1;
            (kappa, i)
        }
    };
    let zero = Rational::from_integer(0);
    let k_prime = max_k_prime(k, kappa);
    let infeasible = NearLinearSelection::Infeasible { k, kappa, i, k_prime };
    if i <= zero || i > Rational::from_integer(kk) || k_prime < 1 {
        return Ok(infeasible);
    }
    // κ = ⌈k/(i+1)⌉
    let ratio = Rational::from_integer(kk) / (i + 1);
    if ratio.ceil().to_integer() != kappa as u64 {
        return Ok(infeasible);
    }
    let params = ParamsNearLinear {
        k,
        mode,
        c: DEFAULT_C,
        kappa,
        i,
        k_prime,
    };
    assert!(params.stretch_certificate() <= 2 * kk - 1, "near-linear certificate");
    Ok(NearLinearSelection::Feasible(params))
}

/// Spanner parameter for the warm-up oracle: `t = ⌈(⌈1/ε⌉ + 1) / 2⌉`, so the
/// spanner stretch is `2t - 1 ≤ ⌈1/ε⌉ + 1`.
pub fn warmup_spanner_parameter(epsilon: Rational) -> Option<usize> {
    if epsilon <= Rational::from_integer(0) {
        return None;
    }
    let inv = epsilon.recip().ceil().to_integer();
    Some((inv + 1).div_ceil(2) as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_k_examples() {
        let p = select_params_small_k(6).unwrap();
        assert_eq!((p.k_prime, p.i), (2, Rational::from_integer(4)));
        let p = select_params_small_k(7).unwrap();
        assert_eq!((p.k_prime, p.i), (2, Rational::new(19, 4)));
        let p = select_params_small_k(8).unwrap();
        assert_eq!((p.k_prime, p.i), (2, Rational::new(11, 2)));
        assert_eq!(select_params_small_k(2), Err(ParamError::SmallKTooSmall(2)));
    }

    #[test]
    fn small_k_certificate_for_range() {
        for k in 3..200 {
            let p = select_params_small_k(k).unwrap();
            assert!(p.far_stretch() <= 2 * k as u64 - 1);
            assert!(p.sampling_exponent() <= Rational::from_integer(1));
        }
    }

    #[test]
    fn constant_c_kappa_matches_float() {
        let c = DEFAULT_C.to_f64();
        for k in 1..5000 {
            let f = libm::floor(c * libm::sqrt(k as f64) / 18.0) as usize;
            assert_eq!(constant_c_kappa(k, DEFAULT_C), f, "k={k}");
        }
    }

    #[test]
    fn near_linear_k100() {
        let NearLinearSelection::Feasible(p) = select_params_near_linear(100, ParamMode::ConstantC).unwrap() else {
            panic!("k=100 must be feasible");
        };
        assert_eq!(p.kappa, 11);
        assert_eq!(p.i, Rational::new(89, 11));
        assert_eq!(p.k_prime, 2);
        assert_eq!(p.stretch_certificate(), 191);
    }

    #[test]
    fn near_linear_small_k() {
        assert!(matches!(
            select_params_near_linear(1, ParamMode::ConstantC).unwrap(),
            NearLinearSelection::Infeasible { kappa: 1, .. }
        ));
        assert!(matches!(
            select_params_near_linear(2, ParamMode::ConstantC).unwrap(),
            NearLinearSelection::Infeasible { .. }
        ));
        let NearLinearSelection::Feasible(p) = select_params_near_linear(3, ParamMode::ConstantC).unwrap() else {
            panic!("k=3 is the smallest feasible k");
        };
        assert_eq!((p.kappa, p.k_prime, p.stretch_certificate()), (1, 1, 5));
    }

    #[test]
    fn certificates_hold_whenever_feasible() {
        for mode in [ParamMode::ConstantC, ParamMode::LargeK] {
            for k in 1..2000 {
                if let NearLinearSelection::Feasible(p) = select_params_near_linear(k, mode).unwrap() {
                    assert!(p.stretch_certificate() <= 2 * k as u64 - 1);
                    let ratio = Rational::from_integer(k as u64) / (p.i + 1);
                    assert_eq!(ratio.ceil().to_integer(), p.kappa as u64);
                }
            }
        }
        for k in 29..400 {
            assert!(matches!(
                select_params_near_linear(k, ParamMode::LargeK).unwrap(),
                NearLinearSelection::Feasible(_)
            ), "k={k}");
        }
    }

    #[test]
    fn warmup_parameter() {
        assert_eq!(warmup_spanner_parameter(Rational::from_integer(1)), Some(1));
        assert_eq!(warmup_spanner_parameter(Rational::from_integer(3)), Some(1));
        assert_eq!(warmup_spanner_parameter(Rational::new(1, 3)), Some(2));
        assert_eq!(warmup_spanner_parameter(Rational::new(1, 4)), Some(3));
        assert_eq!(warmup_spanner_parameter(Rational::from_integer(0)), None);
        for d in 1..50u64 {
            let t = warmup_spanner_parameter(Rational::new(1, d)).unwrap() as u64;
            assert!(2 * t - 1 <= d + 1);
            assert_eq!(t, (d + 1).div_ceil(2));
        }
    }
}
