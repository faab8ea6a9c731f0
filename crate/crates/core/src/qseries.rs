//! Truncated q-expansions with coefficients in Q(zeta_N), the multiple
//! divisor sums that generate them, and the small "symbol" space of formal
//! rational combinations of the weight-two building blocks.
//!
//! All series here follow the constant-dropping normalization: the q^0
//! coefficient of every generating series is zero, and the one discarded
//! constant (for the weight-one building block) is reported as metadata.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::arith::{self, Rat};
use crate::cyclotomic::CycNum;
use crate::{Error, Result};

/// A q-series truncated at a fixed power, exact through q^truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries {
    level: u32,
    coeffs: Vec<CycNum>,
}

impl QSeries {
    pub fn zero(level: u32, truncation: usize) -> Self {
        QSeries {
            level,
            coeffs: vec![CycNum::zero(level); truncation + 1],
        }
    }

    pub fn from_coeffs(level: u32, coeffs: Vec<CycNum>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least the q^0 slot");
        assert!(
            coeffs.iter().all(|c| c.level() == level),
            "coefficient level mismatch"
        );
        QSeries { level, coeffs }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, m: usize) -> &CycNum {
        &self.coeffs[m]
    }

    pub fn coeffs(&self) -> &[CycNum] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn set_coeff(&mut self, m: usize, value: CycNum) {
        assert_eq!(value.level(), self.level);
        self.coeffs[m] = value;
    }

    pub fn add_to_coeff(&mut self, m: usize, value: &CycNum) {
        if m <= self.truncation() {
            self.coeffs[m] = &self.coeffs[m] + value;
        }
    }

    fn check_level(&self, other: &Self) {
        assert_eq!(self.level, other.level, "series level mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_level(other);
        let n = self.coeffs.len().min(other.coeffs.len());
        QSeries {
            level: self.level,
            coeffs: (0..n).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_level(other);
        let n = self.coeffs.len().min(other.coeffs.len());
        QSeries {
            level: self.level,
            coeffs: (0..n).map(|i| &self.coeffs[i] - &other.coeffs[i]).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        QSeries {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Cauchy product, truncated to the shorter operand. Exact through the
    /// resulting truncation.
    pub fn mul(&self, other: &Self) -> Self {
        self.check_level(other);
        let n = self.coeffs.len().min(other.coeffs.len());
        let mut out = vec![CycNum::zero(self.level); n];
        for i in 0..n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                if !other.coeffs[j].is_zero() {
                    out[i + j] = &out[i + j] + &self.coeffs[i].mul(&other.coeffs[j]);
                }
            }
        }
        QSeries {
            level: self.level,
            coeffs: out,
        }
    }

    pub fn scale_rat(&self, r: &Rat) -> Self {
        QSeries {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| c.scale(r)).collect(),
        }
    }

    pub fn scale_cyc(&self, z: &CycNum) -> Self {
        QSeries {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| c.mul(z)).collect(),
        }
    }

    /// Multiplicative inverse; requires an invertible constant term.
    pub fn invert(&self) -> Result<Self> {
        let c0 = self.coeffs[0]
            .inv()
            .map_err(|_| Error::ZeroInverse(self.level))?;
        let n = self.coeffs.len();
        let mut out = vec![CycNum::zero(self.level); n];
        out[0] = c0.clone();
        for m in 1..n {
            let mut acc = CycNum::zero(self.level);
            for k in 1..=m {
                if !self.coeffs[k].is_zero() && !out[m - k].is_zero() {
                    acc = &acc + &self.coeffs[k].mul(&out[m - k]);
                }
            }
            out[m] = (-&acc).mul(&c0);
        }
        Ok(QSeries {
            level: self.level,
            coeffs: out,
        })
    }

    /// Re-embeds every coefficient at a multiple of the level.
    pub fn promote(&self, to_level: u32) -> Self {
        QSeries {
            level: to_level,
            coeffs: self.coeffs.iter().map(|c| c.promote(to_level)).collect(),
        }
    }

    /// First power (up to the common truncation) where the two series
    /// disagree.
    pub fn first_difference(&self, other: &Self) -> Option<usize> {
        self.check_level(other);
        let n = self.coeffs.len().min(other.coeffs.len());
        (0..n).find(|&i| self.coeffs[i] != other.coeffs[i])
    }

    /// JSON form: level, truncation, and each coefficient as its coordinate
    /// strings.
    pub fn to_json(&self) -> Value {
        json!({
            "level": self.level,
            "truncation": self.truncation(),
            "coeffs": self.coeffs.iter().map(|c| c.coord_strings()).collect::<Vec<_>>(),
        })
    }
}

/// Multiple divisor sum of arbitrary depth: the sum of
/// eta^(a1 v1 + ... + ad vd) v1^s1 ... vd^sd over decompositions
/// m = u1 v1 + ... + ud vd with u1 > ... > ud > 0 and all v_j >= 1.
pub fn sigma_multi(level: u32, residues: &[u32], exponents: &[u32], m: u32) -> Result<CycNum> {
    if residues.is_empty() {
        return Err(Error::DepthZero);
    }
    assert_eq!(residues.len(), exponents.len(), "one exponent per residue");
    let n = level as u64;
    let d = residues.len() as u64;
    let mut acc = vec![BigInt::zero(); level as usize];
    if (m as u64) >= d * (d + 1) / 2 {
        enumerate_sigma(
            residues,
            exponents,
            n,
            residues.len(),
            0,
            m as u64,
            &BigInt::one(),
            0,
            &mut acc,
        );
    }
    Ok(fold_residues(level, &acc))
}

#[allow(clippy::too_many_arguments)]
fn enumerate_sigma(
    residues: &[u32],
    exponents: &[u32],
    n: u64,
    t: usize,
    min_u: u64,
    rem: u64,
    weight: &BigInt,
    eta_exp: u64,
    acc: &mut [BigInt],
) {
    let a = residues[t - 1] as u64;
    let s = exponents[t - 1];
    if t == 1 {
        // largest part: exact divisor pairs u * v = rem with u > min_u
        for v in 1..=rem {
            if !rem.is_multiple_of(v) {
                continue;
            }
            let u = rem / v;
            if u <= min_u {
                break;
            }
            let e = ((eta_exp + a * v) % n) as usize;
            acc[e] += weight * BigInt::from(v).pow(s);
        }
        return;
    }
    // smallest remaining part; the t-1 larger parts need at least
    // (t-1)*u + t(t-1)/2 of the budget
    let t64 = t as u64;
    let mut u = min_u + 1;
    while t64 * u + t64 * (t64 - 1) / 2 <= rem {
        let min_rest = (t64 - 1) * u + t64 * (t64 - 1) / 2;
        let mut v = 1;
        while u * v + min_rest <= rem {
            let w = weight * BigInt::from(v).pow(s);
            enumerate_sigma(
                residues,
                exponents,
                n,
                t - 1,
                u,
                rem - u * v,
                &w,
                (eta_exp + a * v) % n,
                acc,
            );
            v += 1;
        }
        u += 1;
    }
}

fn fold_residues(level: u32, acc: &[BigInt]) -> CycNum {
    let mut out = CycNum::zero(level);
    for (e, c) in acc.iter().enumerate() {
        if !c.is_zero() {
            out = &out + &CycNum::root_power(level, e as i64).scale(&Rat::from_integer(c.clone()));
        }
    }
    out
}

/// The dual weight-one sum: eta^(a u) n summed over m = n u. It weights the
/// co-divisor, unlike the depth-one [`sigma_multi`].
pub fn kappa1(level: u32, a: u32, m: u32) -> CycNum {
    let n = level as u64;
    let mut acc = vec![BigInt::zero(); level as usize];
    for u in 1..=m as u64 {
        if !(m as u64).is_multiple_of(u) {
            continue;
        }
        let q = m as u64 / u;
        acc[((a as u64 * u) % n) as usize] += BigInt::from(q);
    }
    fold_residues(level, &acc)
}

/// A generating series together with the constant its normalization drops.
#[derive(Clone, Debug)]
pub struct PsiSeries {
    pub series: QSeries,
    /// Nonzero only for weight one, where the normalized building block has
    /// constant term -1/(2N) before dropping.
    pub dropped_constant: Rat,
}

/// Weight-s building block: coefficient of q^n is
/// (-1)^s n^(s-1) eta^(a n) / (N^s (s-1)!), constant term dropped.
pub fn psi_series(level: u32, a: u32, s: u32, truncation: usize) -> Result<PsiSeries> {
    if s == 0 {
        return Err(Error::BadOrder(0));
    }
    let norm = Rat::new(
        BigInt::one(),
        BigInt::from(level).pow(s) * arith::factorial(s - 1),
    ) * arith::sign_pow(s as i64);
    let mut out = QSeries::zero(level, truncation);
    for m in 1..=truncation {
        let z = CycNum::root_power(level, (a as i64) * (m as i64));
        let w = Rat::from_integer(BigInt::from(m).pow(s - 1)) * &norm;
        out.set_coeff(m, z.scale(&w));
    }
    let dropped = if s == 1 {
        -Rat::new(BigInt::one(), BigInt::from(2 * level))
    } else {
        Rat::zero()
    };
    Ok(PsiSeries {
        series: out,
        dropped_constant: dropped,
    })
}

/// Depth-one or depth-two Eisenstein-type generating series: the q^m
/// coefficient is (-1)^(s1+..)/(N^(s1+..) (s1-1)!..) times the multiple
/// divisor sum of exponents s_j - 1. Orders must be >= 1; depth is capped at
/// two because nothing downstream needs more.
pub fn g_series(
    level: u32,
    residues: &[u32],
    orders: &[u32],
    truncation: usize,
) -> Result<QSeries> {
    if residues.is_empty() {
        return Err(Error::DepthZero);
    }
    if residues.len() > 2 {
        return Err(Error::DepthUnsupported(residues.len()));
    }
    assert_eq!(residues.len(), orders.len(), "one order per residue");
    if let Some(&bad) = orders.iter().find(|&&s| s == 0) {
        return Err(Error::BadOrder(bad));
    }
    let total: u32 = orders.iter().sum();
    let mut denom = BigInt::from(level).pow(total);
    for &s in orders {
        denom *= arith::factorial(s - 1);
    }
    let norm = Rat::new(BigInt::one(), denom) * arith::sign_pow(total as i64);
    let reduced: Vec<u32> = orders.iter().map(|&s| s - 1).collect();
    let mut out = QSeries::zero(level, truncation);
    for m in 1..=truncation {
        let sigma = sigma_multi(level, residues, &reduced, m as u32)?;
        out.set_coeff(m, sigma.scale(&norm));
    }
    Ok(out)
}

/// Normalized derivative q d/dq (N k)^-1 of the depth-one series of order k,
/// valid for k >= 1; for k = 0 it is the series whose q^m coefficient is
/// (1/N) kappa1(m), i.e. N times [`f2_series`].
pub fn g_prime_series(level: u32, a: u32, k: u32, truncation: usize) -> QSeries {
    let norm = Rat::new(
        BigInt::one(),
        BigInt::from(level).pow(k + 1) * arith::factorial(k),
    ) * arith::sign_pow(k as i64);
    let n = level as u64;
    let mut out = QSeries::zero(level, truncation);
    for m in 1..=truncation {
        let mut acc = vec![BigInt::zero(); level as usize];
        for u in 1..=m as u64 {
            if !(m as u64).is_multiple_of(u) {
                continue;
            }
            let q = m as u64 / u;
            acc[((a as u64 * u) % n) as usize] += BigInt::from(q) * BigInt::from(u).pow(k);
        }
        out.set_coeff(m, fold_residues(level, &acc).scale(&norm));
    }
    out
}

/// The weight-two co-divisor series: q^m coefficient kappa1(m) / N^2.
pub fn f2_series(level: u32, a: u32, truncation: usize) -> QSeries {
    let norm = Rat::new(BigInt::one(), BigInt::from(level).pow(2));
    let mut out = QSeries::zero(level, truncation);
    for m in 1..=truncation {
        out.set_coeff(m, kappa1(level, a, m as u32).scale(&norm));
    }
    out
}

/// Both sides of the coefficient-wise divisor identity at a single power m:
/// the coprime-residue divisor sums minus phi(N) times the residue-zero one
/// against the inclusion-exclusion combination of co-divisor sums.
#[derive(Clone, Debug)]
pub struct DivisorCheck {
    pub level: u32,
    pub m: u32,
    pub lhs: CycNum,
    pub rhs: CycNum,
}

impl DivisorCheck {
    pub fn pass(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn verify_divisor_identity(level: u32, m: u32) -> Result<DivisorCheck> {
    if level < 2 {
        return Err(Error::BadLevel { min: 2, got: level });
    }
    let n = level as u64;
    let primes = arith::factorize(n);
    let phi = arith::euler_phi(n);
    let mut lhs = CycNum::zero(level);
    for j in 1..n {
        if arith::gcd_u64(j, n) == 1 {
            lhs = &lhs + &sigma_multi(level, &[j as u32], &[1], m)?;
        }
    }
    let sigma0 = sigma_multi(level, &[0], &[1], m)?;
    lhs = &lhs - &sigma0.scale(&Rat::from_integer(BigInt::from(phi)));

    let mut rhs = CycNum::zero(level);
    for mask in 0..(1u32 << primes.len()) {
        let mut coef = BigInt::one();
        for (t, &(p, k)) in primes.iter().enumerate() {
            if mask & (1 << t) != 0 {
                coef *= BigInt::from(p.pow(k - 1) * (p - 1));
            } else {
                coef *= BigInt::from(p.pow(k));
            }
        }
        let mut inner = CycNum::zero(level);
        'res: for j in 1..n {
            for (t, &(p, _)) in primes.iter().enumerate() {
                let wants_divisible = mask & (1 << t) != 0;
                if (j % p == 0) != wants_divisible {
                    continue 'res;
                }
            }
            inner = &inner + &kappa1(level, j as u32, m);
        }
        rhs = &rhs + &inner.scale(&Rat::from_integer(coef));
    }
    Ok(DivisorCheck { level, m, lhs, rhs })
}

/// A formal rational combination of the weight-two generators: F_a stands
/// for the co-divisor series of residue a (a = 0..N-1) and G_a for the
/// depth-one order-two series (a = 1..N-1; at residue zero the two coincide,
/// so G_0 is deliberately absent).
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolVec {
    level: u32,
    f: Vec<Rat>,
    g: Vec<Rat>,
}

impl SymbolVec {
    pub fn zero(level: u32) -> Self {
        SymbolVec {
            level,
            f: vec![Rat::zero(); level as usize],
            g: vec![Rat::zero(); level as usize - 1],
        }
    }

    pub fn f_unit(level: u32, a: u32) -> Self {
        let mut v = Self::zero(level);
        v.f[(a % level) as usize] = Rat::one();
        v
    }

    /// G_a generator; a must be nonzero mod the level.
    pub fn g_unit(level: u32, a: u32) -> Self {
        let a = a % level;
        assert!(a != 0, "G_0 is not a generator; use F_0");
        let mut v = Self::zero(level);
        v.g[a as usize - 1] = Rat::one();
        v
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn f_coeff(&self, a: u32) -> &Rat {
        &self.f[(a % self.level) as usize]
    }

    pub fn g_coeff(&self, a: u32) -> &Rat {
        let a = a % self.level;
        assert!(a != 0);
        &self.g[a as usize - 1]
    }

    pub fn add_f(&mut self, a: u32, c: &Rat) {
        let a = (a % self.level) as usize;
        self.f[a] += c;
    }

    pub fn add_g(&mut self, a: u32, c: &Rat) {
        let a = a % self.level;
        assert!(a != 0, "G_0 is not a generator");
        self.g[a as usize - 1] += c;
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.level, other.level);
        SymbolVec {
            level: self.level,
            f: self.f.iter().zip(&other.f).map(|(a, b)| a + b).collect(),
            g: self.g.iter().zip(&other.g).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.level, other.level);
        SymbolVec {
            level: self.level,
            f: self.f.iter().zip(&other.f).map(|(a, b)| a - b).collect(),
            g: self.g.iter().zip(&other.g).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        SymbolVec {
            level: self.level,
            f: self.f.iter().map(|c| c * r).collect(),
            g: self.g.iter().map(|c| c * r).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rat::one())
    }

    pub fn is_zero(&self) -> bool {
        self.f.iter().all(|c| c.is_zero()) && self.g.iter().all(|c| c.is_zero())
    }

    /// Flattened coordinates (F block then G block), used by the linear
    /// algebra.
    pub fn flat(&self) -> Vec<Rat> {
        self.f.iter().chain(self.g.iter()).cloned().collect()
    }

    /// True when self = c * other for some rational c (zero counts only
    /// against zero).
    pub fn is_rational_multiple_of(&self, other: &Self) -> bool {
        assert_eq!(self.level, other.level);
        let ov = other.flat();
        let Some(i) = ov.iter().position(|x| !x.is_zero()) else {
            return self.is_zero();
        };
        let c = self.flat()[i].clone() / &ov[i];
        *self == other.scale(&c)
    }

    /// Evaluates the combination as a q-series through the truncation.
    pub fn to_series(&self, truncation: usize) -> QSeries {
        let mut out = QSeries::zero(self.level, truncation);
        for (a, c) in self.f.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&f2_series(self.level, a as u32, truncation).scale_rat(c));
            }
        }
        for (i, c) in self.g.iter().enumerate() {
            if !c.is_zero() {
                let a = i as u32 + 1;
                let g2 = g_series(self.level, &[a], &[2], truncation)
                    .expect("depth one order two is always valid");
                out = out.add(&g2.scale_rat(c));
            }
        }
        out
    }

    /// Rewrites a combination at level n as one at level n*d on the residues
    /// d*a. As q-series the lifted symbols shrink by 1/d^2 uniformly, so a
    /// vanishing combination stays vanishing.
    pub fn lift(&self, d: u32) -> Self {
        assert!(d >= 1);
        let to = self.level * d;
        let mut out = Self::zero(to);
        for (a, c) in self.f.iter().enumerate() {
            if !c.is_zero() {
                out.add_f(a as u32 * d, c);
            }
        }
        for (i, c) in self.g.iter().enumerate() {
            if !c.is_zero() {
                out.add_g((i as u32 + 1) * d, c);
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "F": self.f.iter().map(arith::rat_string).collect::<Vec<_>>(),
            "G": self.g.iter().map(arith::rat_string).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(level: u32, v: &Value) -> Result<Self> {
        let parse = |key: &str, want: usize| -> Result<Vec<Rat>> {
            let arr = v
                .get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Usage(format!("symbol vector missing {:?} array", key)))?;
            if arr.len() != want {
                return Err(Error::Usage(format!(
                    "symbol vector {:?} must have {} entries",
                    key, want
                )));
            }
            arr.iter()
                .map(|x| {
                    x.as_str()
                        .and_then(arith::rat_from_str)
                        .ok_or_else(|| Error::Usage("bad rational in symbol vector".into()))
                })
                .collect()
        };
        Ok(SymbolVec {
            level,
            f: parse("F", level as usize)?,
            g: parse("G", level as usize - 1)?,
        })
    }
}

/// The symbol combination that the divisor identity proves to vanish as a
/// q-series: the coprime G's, minus phi(N) F_0, minus the inclusion-exclusion
/// F-pattern. Defined for levels >= 2.
pub fn divisor_identity_symbolvec(level: u32) -> Result<SymbolVec> {
    if level < 2 {
        return Err(Error::BadLevel { min: 2, got: level });
    }
    let n = level as u64;
    let primes = arith::factorize(n);
    let mut v = SymbolVec::zero(level);
    v.add_f(0, &-Rat::from_integer(BigInt::from(arith::euler_phi(n))));
    for j in 1..n {
        if arith::gcd_u64(j, n) == 1 {
            v.add_g(j as u32, &Rat::one());
        }
        let mut coef = BigInt::one();
        for &(p, k) in &primes {
            if j % p == 0 {
                coef *= BigInt::from(p.pow(k - 1) * (p - 1));
            } else {
                coef *= BigInt::from(p.pow(k));
            }
        }
        v.add_f(j as u32, &-Rat::from_integer(coef));
    }
    Ok(v)
}


#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::collection::vec;
    use proptest::prelude::*;

    fn series(level: u32, cs: &[i64]) -> QSeries {
        let mut s = QSeries::zero(level, cs.len().saturating_sub(1));
        for (m, &c) in cs.iter().enumerate() {
            s.set_coeff(m, CycNum::from_int(level, c));
        }
        s
    }

    proptest! {
        /// Truncated multiplication stays a commutative ring with the same
        /// truncation on every product.
        #[test]
        fn series_ring_laws((level, xs, ys, zs) in (
            1u32..=6,
            vec(-3i64..=3, 7..=7),
            vec(-3i64..=3, 7..=7),
            vec(-3i64..=3, 7..=7),
        )) {
            let (a, b, c) = (series(level, &xs), series(level, &ys), series(level, &zs));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.mul(&b.mul(&c)), a.mul(&b).mul(&c));
            prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b).truncation(), a.truncation());
        }

        /// A series with a unit constant term divides one exactly.
        #[test]
        fn invertible_series_invert((level, mut xs) in (1u32..=6, vec(-3i64..=3, 7..=7))) {
            xs[0] = 1;
            let a = series(level, &xs);
            let inv = a.invert().expect("unit constant term");
            let mut one = QSeries::zero(level, xs.len() - 1);
            one.set_coeff(0, CycNum::one(level));
            prop_assert_eq!(a.mul(&inv), one);
        }
    }
}
