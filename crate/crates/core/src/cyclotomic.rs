//! Exact arithmetic in the cyclotomic field Q(zeta_N).
//!
//! Elements are stored as rational coordinate vectors of length phi(N) on the
//! power basis 1, zeta, ..., zeta^(phi(N)-1), reduced mod the N-th cyclotomic
//! polynomial. Reduction is canonical, so equality is coordinate equality.
//! Per-level data (the cyclotomic polynomial, a reduction table for the
//! powers x^phi..x^(2 phi - 2), and all N reduced powers of zeta) is built
//! once and shared behind an `Arc`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{self, Rat};
use crate::{Error, Result};

/// Dense polynomial over Q, coefficients ascending. Used for cyclotomic
/// polynomials and the extended Euclid behind inversion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycPoly {
    coeffs: Vec<Rat>,
}

impl CycPoly {
    pub fn from_coeffs(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Rat::zero());
        }
        CycPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    fn mul(&self, other: &CycPoly) -> CycPoly {
        if self.is_zero() || other.is_zero() {
            return CycPoly::from_coeffs(vec![Rat::zero()]);
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        CycPoly::from_coeffs(out)
    }

    /// Quotient and remainder; the divisor must be nonzero.
    fn divmod(&self, divisor: &CycPoly) -> (CycPoly, CycPoly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dd = divisor.degree();
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (
                CycPoly::from_coeffs(vec![Rat::zero()]),
                CycPoly::from_coeffs(rem),
            );
        }
        let mut quot = vec![Rat::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let q = &rem[i] / &lead;
            quot[i - dd] = q.clone();
            for (j, c) in divisor.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    let t = &q * c;
                    rem[i - dd + j] -= t;
                }
            }
        }
        (CycPoly::from_coeffs(quot), CycPoly::from_coeffs(rem))
    }

    /// Evaluates at a cyclotomic point by Horner's rule.
    pub fn eval_cyc(&self, x: &CycNum) -> CycNum {
        let mut acc = CycNum::zero(x.level());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &CycNum::from_rat(x.level(), c.clone());
        }
        acc
    }
}

/// x^n - 1.
fn x_pow_minus_one(n: u32) -> CycPoly {
    let mut v = vec![Rat::zero(); n as usize + 1];
    v[0] = -Rat::one();
    v[n as usize] = Rat::one();
    CycPoly::from_coeffs(v)
}

/// The N-th cyclotomic polynomial, computed by exact division of x^N - 1 by
/// the cyclotomic polynomials of the proper divisors of N.
pub fn cyclotomic_poly(n: u32) -> CycPoly {
    fn build(n: u32, memo: &mut HashMap<u32, CycPoly>) -> CycPoly {
        if let Some(p) = memo.get(&n) {
            return p.clone();
        }
        let poly = if n == 1 {
            CycPoly::from_coeffs(vec![-Rat::one(), Rat::one()])
        } else {
            let mut denom = CycPoly::from_coeffs(vec![Rat::one()]);
            for d in arith::divisors(n as u64) {
                if (d as u32) < n {
                    denom = denom.mul(&build(d as u32, memo));
                }
            }
            let (q, r) = x_pow_minus_one(n).divmod(&denom);
            assert!(r.is_zero(), "cyclotomic division must be exact");
            q
        };
        memo.insert(n, poly.clone());
        poly
    }
    assert!(n >= 1, "level must be positive");
    build(n, &mut HashMap::new())
}

/// Shared per-level data: cyclotomic polynomial, reduction table, powers of
/// zeta, and the degree phi(N).
pub struct LevelData {
    pub level: u32,
    pub phi: usize,
    pub cyclo: CycPoly,
    /// Reduced coordinates of x^k for k = 0..=2*phi-2.
    xpow: Vec<Vec<Rat>>,
    /// Reduced coordinates of zeta^j for j = 0..N.
    zeta_pow: Vec<Vec<Rat>>,
}

/// Coordinates of x * v mod Phi_N: shift up by one and fold the leading
/// coefficient back with the relation x^phi = -(lower part of Phi).
fn shift_reduce(v: &[Rat], cyclo_low: &[Rat]) -> Vec<Rat> {
    let phi = v.len();
    let mut next = vec![Rat::zero(); phi];
    next[1..].clone_from_slice(&v[..phi - 1]);
    let lead = &v[phi - 1];
    if !lead.is_zero() {
        for (n, c) in next.iter_mut().zip(cyclo_low) {
            *n -= lead * c;
        }
    }
    next
}

fn build_level_data(n: u32) -> LevelData {
    let cyclo = cyclotomic_poly(n);
    let phi = cyclo.degree();
    let low = &cyclo.coeffs()[..phi];
    // x^k mod Phi_N for k = 0..=2(phi-1), enough to reduce any product.
    let mut xpow: Vec<Vec<Rat>> = Vec::with_capacity(2 * phi.max(1));
    for k in 0..phi {
        let mut e = vec![Rat::zero(); phi];
        e[k] = Rat::one();
        xpow.push(e);
    }
    for _ in phi..=2 * phi.saturating_sub(1) {
        let next = shift_reduce(xpow.last().expect("nonempty"), low);
        xpow.push(next);
    }
    let mut zeta_pow: Vec<Vec<Rat>> = Vec::with_capacity(n as usize);
    let mut cur = xpow[0].clone();
    for j in 0..n as usize {
        if j > 0 {
            cur = shift_reduce(&cur, low);
        }
        zeta_pow.push(cur.clone());
    }
    LevelData {
        level: n,
        phi,
        cyclo,
        xpow,
        zeta_pow,
    }
}

static LEVELS: OnceLock<RwLock<HashMap<u32, Arc<LevelData>>>> = OnceLock::new();

thread_local! {
    static LEVELS_TLS: RefCell<HashMap<u32, Arc<LevelData>>> = RefCell::new(HashMap::new());
}

/// Fetches (building on first use) the shared data for a level. Cheap after
/// the first call on a given thread.
pub fn level_data(n: u32) -> Arc<LevelData> {
    assert!(n >= 1, "level must be positive");
    if let Some(hit) = LEVELS_TLS.with(|m| m.borrow().get(&n).cloned()) {
        return hit;
    }
    let global = LEVELS.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(hit) = global.read().unwrap().get(&n).cloned() {
        LEVELS_TLS.with(|m| m.borrow_mut().insert(n, hit.clone()));
        return hit;
    }
    let built = Arc::new(build_level_data(n));
    let mut w = global.write().unwrap();
    let entry = w.entry(n).or_insert_with(|| built).clone();
    drop(w);
    LEVELS_TLS.with(|m| m.borrow_mut().insert(n, entry.clone()));
    entry
}

/// An element of Q(zeta_N) in canonical reduced coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct CycNum {
    level: u32,
    coords: Vec<Rat>,
}

impl CycNum {
    pub fn zero(level: u32) -> Self {
        let phi = level_data(level).phi;
        CycNum {
            level,
            coords: vec![Rat::zero(); phi],
        }
    }

    pub fn one(level: u32) -> Self {
        Self::from_rat(level, Rat::one())
    }

    pub fn from_rat(level: u32, r: Rat) -> Self {
        let phi = level_data(level).phi;
        let mut coords = vec![Rat::zero(); phi];
        coords[0] = r;
        CycNum { level, coords }
    }

    pub fn from_int(level: u32, n: i64) -> Self {
        Self::from_rat(level, arith::rat_int(n))
    }

    /// Builds from explicit coordinates; the length must be phi(level).
    pub fn from_coords(level: u32, coords: Vec<Rat>) -> Self {
        assert_eq!(
            coords.len(),
            level_data(level).phi,
            "coordinate length must equal phi(level)"
        );
        CycNum { level, coords }
    }

    /// zeta_N^k, any integer k.
    pub fn root_power(level: u32, k: i64) -> Self {
        let data = level_data(level);
        let j = k.rem_euclid(level as i64) as usize;
        CycNum {
            level,
            coords: data.zeta_pow[j].clone(),
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Some(r) when the element lies in Q.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.coords[1..].iter().all(|c| c.is_zero()) {
            Some(self.coords[0].clone())
        } else {
            None
        }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        CycNum {
            level: self.level,
            coords: self.coords.iter().map(|c| c * r).collect(),
        }
    }

    fn assert_same_level(&self, other: &Self) {
        assert_eq!(
            self.level, other.level,
            "cyclotomic arithmetic requires equal levels"
        );
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_level(other);
        let data = level_data(self.level);
        let phi = data.phi;
        if phi == 1 {
            return CycNum {
                level: self.level,
                coords: vec![&self.coords[0] * &other.coords[0]],
            };
        }
        let mut raw = vec![Rat::zero(); 2 * phi - 1];
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coords.iter().enumerate() {
                if !b.is_zero() {
                    raw[i + j] += a * b;
                }
            }
        }
        let mut out = raw[..phi].to_vec();
        for (k, r) in raw.iter().enumerate().skip(phi) {
            if r.is_zero() {
                continue;
            }
            for (i, c) in data.xpow[k].iter().enumerate() {
                if !c.is_zero() {
                    out[i] += r * c;
                }
            }
        }
        CycNum {
            level: self.level,
            coords: out,
        }
    }

    /// Multiplicative inverse via extended Euclid against the cyclotomic
    /// polynomial. Errors on zero.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroInverse(self.level));
        }
        let data = level_data(self.level);
        let f = CycPoly::from_coeffs(self.coords.clone());
        // r0 = Phi, r1 = f; maintain t with t*f = r (mod Phi).
        let mut r0 = data.cyclo.clone();
        let mut r1 = f;
        let mut t0 = CycPoly::from_coeffs(vec![Rat::zero()]);
        let mut t1 = CycPoly::from_coeffs(vec![Rat::one()]);
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1);
            let qt = q.mul(&t1);
            let new_t = CycPoly::from_coeffs(
                t0.coeffs()
                    .iter()
                    .cloned()
                    .chain(std::iter::repeat(Rat::zero()))
                    .zip(
                        qt.coeffs()
                            .iter()
                            .cloned()
                            .chain(std::iter::repeat(Rat::zero())),
                    )
                    .take(t0.coeffs().len().max(qt.coeffs().len()))
                    .map(|(a, b)| a - b)
                    .collect(),
            );
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = new_t;
        }
        // r0 is a nonzero constant: Phi_N is irreducible over Q.
        assert_eq!(r0.degree(), 0, "cyclotomic polynomial must be irreducible");
        let c = r0.coeffs()[0].clone();
        let mut coords = vec![Rat::zero(); data.phi];
        for (i, a) in t0.coeffs().iter().enumerate() {
            if !a.is_zero() {
                if i < data.phi {
                    coords[i] = a / &c;
                } else {
                    // fold higher terms through the reduction table
                    let scaled = a / &c;
                    for (j, x) in data.xpow[i].iter().enumerate() {
                        if !x.is_zero() {
                            coords[j] += &scaled * x;
                        }
                    }
                }
            }
        }
        Ok(CycNum {
            level: self.level,
            coords,
        })
    }

    /// Integer powers, negative allowed for nonzero elements.
    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut base = self.clone();
        let mut e = e as u64;
        let mut acc = CycNum::one(self.level);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        Ok(acc)
    }

    /// The field automorphism zeta -> zeta^k, defined when gcd(k, N) = 1.
    /// k = N - 1 is complex conjugation.
    pub fn galois(&self, k: u32) -> Result<Self> {
        let n = self.level;
        if arith::residue_gcd(k as u64, n as u64) != 1 {
            return Err(Error::NotCoprime { k: k % n, n });
        }
        let data = level_data(n);
        let mut coords = vec![Rat::zero(); data.phi];
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let j = (i as u64 * k as u64 % n as u64) as usize;
            for (t, z) in data.zeta_pow[j].iter().enumerate() {
                if !z.is_zero() {
                    coords[t] += c * z;
                }
            }
        }
        Ok(CycNum { level: n, coords })
    }

    pub fn conj(&self) -> Self {
        let k = if self.level == 1 { 0 } else { self.level - 1 };
        self.galois(k).expect("level-1 exponent is always coprime")
    }

    /// Re-expresses the element at a multiple of its level, mapping
    /// zeta_n to zeta_m^(m/n).
    pub fn promote(&self, to_level: u32) -> Self {
        assert!(
            to_level.is_multiple_of(self.level),
            "target level must be a multiple of the current level"
        );
        if to_level == self.level {
            return self.clone();
        }
        let d = (to_level / self.level) as u64;
        let data = level_data(to_level);
        let mut coords = vec![Rat::zero(); data.phi];
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let j = (i as u64 * d % to_level as u64) as usize;
            for (t, z) in data.zeta_pow[j].iter().enumerate() {
                if !z.is_zero() {
                    coords[t] += c * z;
                }
            }
        }
        CycNum {
            level: to_level,
            coords,
        }
    }

    /// Numerical embedding with zeta_N -> exp(2 pi i / N).
    pub fn to_complex(&self) -> Complex64 {
        let n = self.level as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let x = c.to_f64().unwrap_or(f64::NAN);
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n;
            acc += Complex64::new(theta.cos(), theta.sin()) * x;
        }
        acc
    }

    /// Coordinates as `num/den` strings, the JSON export form.
    pub fn coord_strings(&self) -> Vec<String> {
        self.coords.iter().map(arith::rat_string).collect()
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum(level={}, [", self.level)?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c)?;
        }
        write!(f, "])")
    }
}

impl std::ops::Add for &CycNum {
    type Output = CycNum;
    fn add(self, rhs: &CycNum) -> CycNum {
        self.assert_same_level(rhs);
        CycNum {
            level: self.level,
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub for &CycNum {
    type Output = CycNum;
    fn sub(self, rhs: &CycNum) -> CycNum {
        self.assert_same_level(rhs);
        CycNum {
            level: self.level,
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl std::ops::Mul for &CycNum {
    type Output = CycNum;
    fn mul(self, rhs: &CycNum) -> CycNum {
        CycNum::mul(self, rhs)
    }
}

impl std::ops::Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            level: self.level,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

/// Sum of eta^(j * p1^l1 * ... * pr^lr) over the block J(alpha) of residues
/// 1 <= j < N whose p_t-multiplicity is exactly alpha_t for every prime p_t
/// of N. Multiplicity is read in Z/p_t^k_t, so a residue divisible by the
/// full prime power counts as multiplicity k_t; with that reading the blocks
/// partition 1..N-1. `alpha` and `ell` follow the ascending prime order of
/// the factorization of N.
pub fn eta_block_sum(level: u32, alpha: &[u32], ell: &[u32]) -> Result<CycNum> {
    let primes = check_block_params(level, alpha, ell)?;
    let n = level as u64;
    let mut mult = 1u64;
    for (&(p, _), &l) in primes.iter().zip(ell) {
        for _ in 0..l {
            mult = mult * (p % n) % n;
        }
    }
    let data = level_data(level);
    let mut coords = vec![Rat::zero(); data.phi];
    'outer: for j in 1..n {
        for (&(p, k), &a) in primes.iter().zip(alpha) {
            let pa = p.pow(a);
            if j % pa != 0 || (a < k && (j / pa) % p == 0) {
                continue 'outer;
            }
        }
        let e = (j * mult % n) as usize;
        for (t, z) in data.zeta_pow[e].iter().enumerate() {
            if !z.is_zero() {
                coords[t] += z;
            }
        }
    }
    Ok(CycNum { level, coords })
}

/// Closed form for [`eta_block_sum`]: zero when some ell_t <= k_t-alpha_t-2,
/// otherwise the product of -p_t^ell_t over the primes with
/// ell_t = k_t-alpha_t-1 and phi(p_s^(k_s-alpha_s)) over the rest.
pub fn eta_block_sum_closed(level: u32, alpha: &[u32], ell: &[u32]) -> Result<CycNum> {
    let primes = check_block_params(level, alpha, ell)?;
    for (i, &(_, k)) in primes.iter().enumerate() {
        let slack = k as i64 - alpha[i] as i64 - 2;
        if (ell[i] as i64) <= slack {
            return Ok(CycNum::zero(level));
        }
    }
    let mut value = num_bigint::BigInt::from(1);
    for (i, &(p, k)) in primes.iter().enumerate() {
        if ell[i] as i64 == k as i64 - alpha[i] as i64 - 1 {
            value *= -num_bigint::BigInt::from(p.pow(ell[i]));
        } else {
            let e = k - alpha[i];
            let phi_pe = if e == 0 { 1 } else { p.pow(e - 1) * (p - 1) };
            value *= num_bigint::BigInt::from(phi_pe);
        }
    }
    Ok(CycNum::from_rat(level, Rat::from_integer(value)))
}

fn check_block_params(level: u32, alpha: &[u32], ell: &[u32]) -> Result<Vec<(u64, u32)>> {
    if level < 2 {
        return Err(Error::BadLevel { min: 2, got: level });
    }
    let primes = arith::factorize(level as u64);
    if alpha.len() != primes.len() || ell.len() != primes.len() {
        return Err(Error::BadBlockParams(format!(
            "expected {} exponents for level {}",
            primes.len(),
            level
        )));
    }
    for (i, &(p, k)) in primes.iter().enumerate() {
        if alpha[i] > k {
            return Err(Error::BadBlockParams(format!(
                "alpha for prime {} exceeds its multiplicity {}",
                p, k
            )));
        }
    }
    if primes.iter().enumerate().all(|(i, &(_, k))| alpha[i] == k) {
        return Err(Error::BadBlockParams(
            "alpha equal to the full exponent vector leaves an empty block".into(),
        ));
    }
    Ok(primes)
}
