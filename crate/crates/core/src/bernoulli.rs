//! Bernoulli polynomials, their periodic evaluation, and the cyclotomic
//! constants beta_n^a that appear as constant terms of the Eisenstein-type
//! generating series.
//!
//! Two evaluation conventions coexist and are kept explicit throughout:
//! beta_n^a averages the POLYNOMIAL values B_n(l/N) (so the l = N term is
//! B_n(1)), while the symmetry sums use the PERIODIC function with the
//! boundary value fixed to zero at order one. The two differ exactly by
//! 1/(4N) at order one and agree everywhere else.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::{self, Rat};
use crate::cyclotomic::CycNum;
use crate::qseries::QSeries;
use crate::{Error, Result};

/// Degree through which polynomial coefficients are cached; generous for
/// everything this crate computes.
const CACHED_DEGREE: usize = 64;

fn poly_cache() -> &'static Vec<Vec<Rat>> {
    static CACHE: OnceLock<Vec<Vec<Rat>>> = OnceLock::new();
    CACHE.get_or_init(|| compute_polys(CACHED_DEGREE))
}

/// Coefficient lists (index = power of x) for B_0 .. B_n via the recurrence
/// sum_{k=0}^{n} C(n+1,k) B_k(x) = (n+1) x^n.
fn compute_polys(n_max: usize) -> Vec<Vec<Rat>> {
    let mut polys: Vec<Vec<Rat>> = Vec::with_capacity(n_max + 1);
    polys.push(vec![Rat::one()]);
    for n in 1..=n_max {
        let mut coeffs = vec![Rat::zero(); n + 1];
        coeffs[n] = Rat::from_integer(BigInt::from(n as u32 + 1));
        for (k, bk) in polys.iter().enumerate() {
            let c = Rat::from_integer(arith::binom(n as i64 + 1, k as i64));
            for (j, b) in bk.iter().enumerate() {
                coeffs[j] -= b * &c;
            }
        }
        let inv = Rat::new(BigInt::one(), BigInt::from(n as u32 + 1));
        for c in &mut coeffs {
            *c *= &inv;
        }
        polys.push(coeffs);
    }
    polys
}

/// Coefficients of the n-th Bernoulli polynomial, index = power of x;
/// convention B_1(x) = x - 1/2.
pub fn bernoulli_poly(n: usize) -> Vec<Rat> {
    if n <= CACHED_DEGREE {
        poly_cache()[n].clone()
    } else {
        compute_polys(n).pop().unwrap()
    }
}

/// The n-th Bernoulli number B_n(0); B_1 = -1/2.
pub fn bernoulli_number(n: usize) -> Rat {
    bernoulli_poly(n)[0].clone()
}

/// Polynomial evaluation B_n(x).
pub fn bernoulli_eval(n: usize, x: &Rat) -> Rat {
    let coeffs = bernoulli_poly(n);
    let mut acc = Rat::zero();
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Periodic evaluation B_n({x}), with the one exceptional boundary value:
/// at integers the order-one function is 0 (the principal value of its
/// defining series), not B_1(0) = -1/2.
pub fn periodic_bernoulli(n: usize, x: &Rat) -> Rat {
    let frac = x - x.floor();
    if n == 1 && frac.is_zero() {
        return Rat::zero();
    }
    bernoulli_eval(n, &frac)
}

/// The constant beta_n^a = -(1/(2N n!)) sum_{l=1}^{N} eta^{-l a} B_n(l/N),
/// with the POLYNOMIAL value B_n(1) at l = N. Exact in Q(zeta_N).
pub fn beta_const(level: u32, a: u32, n: u32) -> Result<CycNum> {
    if n == 0 {
        return Err(Error::BadOrder(0));
    }
    let mut sum = CycNum::zero(level);
    for l in 1..=level {
        let x = Rat::new(BigInt::from(l), BigInt::from(level));
        let b = bernoulli_eval(n as usize, &x);
        let z = CycNum::root_power(level, -((l as i64) * (a as i64)));
        sum = &sum + &z.scale(&b);
    }
    let norm = -Rat::new(BigInt::one(), BigInt::from(2 * level) * arith::factorial(n));
    Ok(sum.scale(&norm))
}

/// The symmetry sum S_n(a) = sum_{l=1}^{N} eta^{-l a} Bbar_n(l/N) with the
/// PERIODIC convention (so the l = N term vanishes at order one).
pub fn periodic_eta_sum(level: u32, a: u32, n: u32) -> Result<CycNum> {
    if n == 0 {
        return Err(Error::BadOrder(0));
    }
    let mut sum = CycNum::zero(level);
    for l in 1..=level {
        let x = Rat::new(BigInt::from(l), BigInt::from(level));
        let b = periodic_bernoulli(n as usize, &x);
        let z = CycNum::root_power(level, -((l as i64) * (a as i64)));
        sum = &sum + &z.scale(&b);
    }
    Ok(sum)
}

/// Result of comparing generating-series coefficients against the directly
/// summed constants.
#[derive(Clone, Debug)]
pub struct GenfunCheck {
    pub level: u32,
    pub a: u32,
    pub orders: u32,
    /// Orders n whose coefficient disagrees with beta_const.
    pub mismatches: Vec<u32>,
}

impl GenfunCheck {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// e^{X/N} as a formal series in X over Q(zeta_N): coefficient of X^m is
/// 1/(N^m m!).
fn exp_series(level: u32, truncation: usize) -> QSeries {
    let mut s = QSeries::zero(level, truncation);
    for m in 0..=truncation {
        let c = Rat::new(
            BigInt::one(),
            BigInt::from(level).pow(m as u32) * arith::factorial(m as u32),
        );
        s.set_coeff(m, CycNum::from_rat(level, c));
    }
    s
}

/// Expands the closed form of sum_{n>=1} beta_n^a X^{n-1} and checks each
/// coefficient against [`beta_const`] for n = 1..=orders.
///
/// With w = eta^{-a} e^{X/N}, summing eta^{-la} e^{lX/N} over l = 1..N gives
/// w (e^X - 1)/(w - 1), so the closed form is -(1/(2N)) w/(w-1), plus the
/// pole subtraction delta_{a,0}/(2X) when w - 1 vanishes at X = 0. Note
/// w/(w-1) = 1 + 1/(w-1): the variant without the numerator w agrees from
/// the linear coefficient on, but its constant term is off by exactly
/// 1/(2N) and would spoil the order-one comparison.
pub fn beta_genfun_check(level: u32, a: u32, orders: u32) -> Result<GenfunCheck> {
    if orders == 0 {
        return Err(Error::BadOrder(0));
    }
    let k_max = orders as usize;
    let a_red = a % level;
    let norm = -Rat::new(BigInt::one(), BigInt::from(2 * level));

    // closed-form coefficients of X^{n-1} for n = 1..=orders
    let coeffs: Vec<CycNum> = if a_red != 0 {
        // w - 1 is invertible at X = 0: no pole subtraction
        let w = exp_series(level, k_max).scale_cyc(&CycNum::root_power(level, -(a_red as i64)));
        let mut d = w.clone();
        d.set_coeff(0, d.coeff(0) - &CycNum::one(level));
        let genfun = w.mul(&d.invert()?).scale_rat(&norm);
        (0..k_max).map(|i| genfun.coeff(i).clone()).collect()
    } else {
        // w - 1 = X * d1 with d1 invertible; the 1/(2X) subtraction cancels
        // the pole, leaving coefficient of X^{n-1} equal to R.coeff(n) where
        // R = 1/2 - (1/(2N)) w / d1
        let w = exp_series(level, k_max + 1);
        let mut d1 = QSeries::zero(level, k_max);
        for m in 0..=k_max {
            d1.set_coeff(m, w.coeff(m + 1).clone());
        }
        let mut r = w.mul(&d1.invert()?).scale_rat(&norm);
        r.set_coeff(
            0,
            r.coeff(0) + &CycNum::from_rat(level, Rat::new(BigInt::one(), BigInt::from(2))),
        );
        assert!(r.coeff(0).is_zero(), "pole of the closed form must cancel");
        (1..=k_max).map(|i| r.coeff(i).clone()).collect()
    };

    let mut mismatches = Vec::new();
    for n in 1..=orders {
        if coeffs[n as usize - 1] != beta_const(level, a, n)? {
            mismatches.push(n);
        }
    }
    Ok(GenfunCheck {
        level,
        a: a_red,
        orders,
        mismatches,
    })
}

/// Result of the conjugation-parity check of the periodic symmetry sums.
#[derive(Clone, Debug)]
pub struct SymmetryCheck {
    pub level: u32,
    pub n: u32,
    /// Residues a where conjugation does not act as (-1)^n.
    pub failures: Vec<u32>,
}

impl SymmetryCheck {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks, for every residue a, that complex conjugation (the galois map
/// eta -> eta^{N-1}) multiplies S_n(a) by (-1)^n. This is the exact form of
/// the vanishing of the sine sums against even-order values and cosine sums
/// against odd-order values.
pub fn vanish_symmetry_check(level: u32, n: u32) -> Result<SymmetryCheck> {
    if n == 0 {
        return Err(Error::BadOrder(0));
    }
    let mut failures = Vec::new();
    for a in 0..level {
        let s = periodic_eta_sum(level, a, n)?;
        let want = if n.is_multiple_of(2) { s.clone() } else { -&s };
        if s.conj() != want {
            failures.push(a);
        }
    }
    Ok(SymmetryCheck { level, n, failures })
}
