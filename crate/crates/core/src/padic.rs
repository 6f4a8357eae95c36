//! Exact capped-precision elements of Q_p.
//!
//! A nonzero value is stored as `p^val * unit` with the unit kept modulo
//! `p^(abs_prec - val)`, so the value is known modulo `p^abs_prec`. Binary
//! operations propagate the minimum absolute precision of the operands;
//! division additionally shifts the bound down by the divisor valuation.
//! Values born from integers are exact (infinite precision) until they meet
//! a capped operand.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Absolute precision: either exact or known modulo `p^N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prec {
    Exact,
    Mod(i64),
}

impl Prec {
    pub fn min(self, other: Prec) -> Prec {
        match (self, other) {
            (Prec::Exact, x) => x,
            (x, Prec::Exact) => x,
            (Prec::Mod(a), Prec::Mod(b)) => Prec::Mod(a.min(b)),
        }
    }

    /// Shift the bound by `d` (no-op on exact values).
    pub fn shift(self, d: i64) -> Prec {
        match self {
            Prec::Exact => Prec::Exact,
            Prec::Mod(n) => Prec::Mod(n + d),
        }
    }

    pub fn at_most(self, n: i64) -> bool {
        matches!(self, Prec::Mod(m) if m <= n)
    }

    pub fn at_least(self, n: i64) -> bool {
        match self {
            Prec::Exact => true,
            Prec::Mod(m) => m >= n,
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Prec::Exact => None,
            Prec::Mod(n) => Some(n),
        }
    }
}

#[derive(Clone, Debug)]
enum Val {
    /// Zero at the stated precision (exactly zero when precision is Exact).
    Zero,
    /// `p^val * unit`, gcd(unit, p) = 1. The unit is kept nonnegative and
    /// reduced for capped values; exact values may carry a sign.
    NonZero { val: i64, unit: BigInt },
}

/// An element of Q_p with tracked absolute precision.
#[derive(Clone, Debug)]
pub struct Padic {
    p: u64,
    prec: Prec,
    val: Val,
}

fn pow_p(p: u64, k: i64) -> BigUint {
    debug_assert!(k >= 0);
    BigUint::from(p).pow(k as u32)
}

impl Padic {
    /// The exact integer `n` as an element of Q_p.
    pub fn from_integer(p: u64, n: impl Into<BigInt>) -> Padic {
        let n: BigInt = n.into();
        Padic::from_bigint_prec(p, n, Prec::Exact)
    }

    /// `n` known modulo `p^prec`.
    pub fn from_integer_mod(p: u64, n: impl Into<BigInt>, prec: i64) -> Padic {
        Padic::from_bigint_prec(p, n.into(), Prec::Mod(prec))
    }

    fn from_bigint_prec(p: u64, n: BigInt, prec: Prec) -> Padic {
        if n.is_zero() {
            return Padic { p, prec, val: Val::Zero };
        }
        let mut m = n;
        let pb = BigInt::from(p);
        let mut v: i64 = 0;
        while (&m % &pb).is_zero() {
            m /= &pb;
            v += 1;
            if let Prec::Mod(n) = prec {
                if v >= n {
                    return Padic { p, prec, val: Val::Zero };
                }
            }
        }
        let mut out = Padic { p, prec, val: Val::NonZero { val: v, unit: m } };
        out.normalize();
        out
    }

    /// `num/den` computed modulo `p^prec`. `den` must be a p-adic unit or at
    /// least have valuation not exceeding `num`'s.
    pub fn from_ratio(p: u64, num: impl Into<BigInt>, den: impl Into<BigInt>, prec: i64) -> Result<Padic> {
        let n = Padic::from_bigint_prec(p, num.into(), Prec::Mod(prec + 64));
        let d = Padic::from_bigint_prec(p, den.into(), Prec::Mod(prec + 64));
        Ok(n.div(&d)?.truncate(prec))
    }

    /// Construct from little-endian base-p digits of the unit part:
    /// value = p^val * sum(digits[i] p^i), known modulo p^(val + digits.len()).
    pub fn from_unit_digits(p: u64, digits: &[u64], val: i64) -> Padic {
        let prec = val + digits.len() as i64;
        if digits.iter().all(|&d| d == 0) {
            return Padic { p, prec: Prec::Mod(prec), val: Val::Zero };
        }
        let mut unit = BigInt::zero();
        for &d in digits.iter().rev() {
            unit = unit * p + d;
        }
        let mut out = Padic { p, prec: Prec::Mod(prec), val: Val::NonZero { val, unit } };
        out.normalize();
        out
    }

    pub fn zero(p: u64) -> Padic {
        Padic { p, prec: Prec::Exact, val: Val::Zero }
    }

    pub fn zero_mod(p: u64, prec: i64) -> Padic {
        Padic { p, prec: Prec::Mod(prec), val: Val::Zero }
    }

    pub fn one(p: u64) -> Padic {
        Padic::from_integer(p, 1)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> Prec {
        self.prec
    }

    /// Valuation; `None` when the value is zero at its stated precision.
    pub fn valuation(&self) -> Option<i64> {
        match &self.val {
            Val::Zero => None,
            Val::NonZero { val, .. } => Some(*val),
        }
    }

    pub fn is_zero_at_prec(&self) -> bool {
        matches!(self.val, Val::Zero)
    }

    /// True only for an exact zero.
    pub fn is_exactly_zero(&self) -> bool {
        matches!(self.val, Val::Zero) && self.prec == Prec::Exact
    }

    fn normalize(&mut self) {
        let p = self.p;
        let prec = self.prec;
        if let Val::NonZero { val, unit } = &mut self.val {
            if let Prec::Mod(n) = prec {
                if *val >= n {
                    self.val = Val::Zero;
                    return;
                }
                let m = BigInt::from(pow_p(p, n - *val));
                *unit = unit.mod_floor(&m);
                if unit.is_zero() {
                    self.val = Val::Zero;
                }
            }
        }
    }

    pub fn neg(&self) -> Padic {
        match &self.val {
            Val::Zero => self.clone(),
            Val::NonZero { val, unit } => {
                let mut out = Padic {
                    p: self.p,
                    prec: self.prec,
                    val: Val::NonZero { val: *val, unit: -unit },
                };
                out.normalize();
                out
            }
        }
    }

    /// Truncate to absolute precision `n` (no-op if already coarser).
    pub fn truncate(&self, n: i64) -> Padic {
        let prec = self.prec.min(Prec::Mod(n));
        let mut out = Padic { p: self.p, prec, val: self.val.clone() };
        out.normalize();
        out
    }

    /// The value as a signed integer representative modulo `p^k`.
    /// Requires nonnegative valuation and precision at least `k`.
    pub fn residue(&self, k: i64) -> Result<BigUint> {
        if !self.prec.at_least(k) {
            return Err(Error::PrecisionExhausted(format!(
                "residue mod p^{k} requested at precision {:?}",
                self.prec
            )));
        }
        match &self.val {
            Val::Zero => Ok(BigUint::zero()),
            Val::NonZero { val, unit } => {
                if *val < 0 {
                    return Err(Error::BadEvaluation("negative valuation in residue()".into()));
                }
                let m = BigInt::from(pow_p(self.p, k));
                let r = (BigInt::from(pow_p(self.p, *val)) * unit).mod_floor(&m);
                Ok(r.to_biguint().unwrap())
            }
        }
    }

    /// u64 version of [`residue`](Self::residue) for small moduli.
    pub fn residue_u64(&self, k: i64) -> Result<u64> {
        let r = self.residue(k)?;
        r.to_u64().ok_or_else(|| Error::BadEvaluation("residue does not fit u64".into()))
    }

    /// Little-endian base-p digits of the unit part, `len` of them.
    pub fn unit_digits(&self, len: usize) -> Vec<u64> {
        match &self.val {
            Val::Zero => vec![0; len],
            Val::NonZero { unit, .. } => {
                let mut ds = Vec::with_capacity(len);
                let modulus = BigInt::from(pow_p(self.p, len as i64));
                let mut u = unit.mod_floor(&modulus);
                let pb = BigInt::from(self.p);
                for _ in 0..len {
                    let (q, r) = u.div_rem(&pb);
                    ds.push(r.to_u64().unwrap());
                    u = q;
                }
                ds
            }
        }
    }

    pub fn add(&self, other: &Padic) -> Padic {
        assert_eq!(self.p, other.p, "mixed primes");
        let prec = self.prec.min(other.prec);
        match (&self.val, &other.val) {
            (Val::Zero, _) => {
                let mut out = other.clone();
                out.prec = prec;
                out.normalize();
                out
            }
            (_, Val::Zero) => {
                let mut out = self.clone();
                out.prec = prec;
                out.normalize();
                out
            }
            (Val::NonZero { val: v1, unit: u1 }, Val::NonZero { val: v2, unit: u2 }) => {
                let v = (*v1).min(*v2);
                let a = u1 * BigInt::from(pow_p(self.p, v1 - v));
                let b = u2 * BigInt::from(pow_p(self.p, v2 - v));
                let sum = a + b;
                let shifted = match prec {
                    Prec::Exact => sum,
                    Prec::Mod(n) => sum.mod_floor(&BigInt::from(pow_p(self.p, n - v))),
                };
                let mut out = Padic::from_bigint_prec(self.p, shifted, prec.shift(-v));
                out = out.shift_valuation(v);
                out.prec = prec;
                out.normalize();
                out
            }
        }
    }

    pub fn sub(&self, other: &Padic) -> Padic {
        self.add(&other.neg())
    }

    /// Multiply the value by p^k.
    pub fn shift_valuation(&self, k: i64) -> Padic {
        match &self.val {
            Val::Zero => Padic { p: self.p, prec: self.prec.shift(k), val: Val::Zero },
            Val::NonZero { val, unit } => Padic {
                p: self.p,
                prec: self.prec.shift(k),
                val: Val::NonZero { val: val + k, unit: unit.clone() },
            },
        }
    }

    pub fn mul(&self, other: &Padic) -> Padic {
        assert_eq!(self.p, other.p, "mixed primes");
        let prec = self.prec.min(other.prec);
        match (&self.val, &other.val) {
            (Val::Zero, Val::NonZero { val, .. }) | (Val::NonZero { val, .. }, Val::Zero) => {
                // zero at precision N times p^v·unit is zero at precision N + v
                Padic { p: self.p, prec: prec.shift(*val), val: Val::Zero }
            }
            (Val::Zero, Val::Zero) => Padic { p: self.p, prec, val: Val::Zero },
            (Val::NonZero { val: v1, unit: u1 }, Val::NonZero { val: v2, unit: u2 }) => {
                let mut out = Padic {
                    p: self.p,
                    prec,
                    val: Val::NonZero { val: v1 + v2, unit: u1 * u2 },
                };
                out.normalize();
                out
            }
        }
    }

    pub fn invert(&self) -> Result<Padic> {
        match (&self.val, self.prec) {
            (Val::Zero, _) => Err(Error::DivisionByZero),
            (Val::NonZero { val, unit }, Prec::Exact) => {
                if unit.is_one() {
                    Ok(Padic {
                        p: self.p,
                        prec: Prec::Exact,
                        val: Val::NonZero { val: -val, unit: BigInt::one() },
                    })
                } else {
                    Err(Error::PrecisionExhausted(
                        "inverting a non-trivial exact unit requires a target precision".into(),
                    ))
                }
            }
            (Val::NonZero { val, unit }, Prec::Mod(n)) => {
                // unit known mod p^(n-val); inverse known to the same digit count
                let digits = n - val;
                if digits <= 0 {
                    return Err(Error::PrecisionExhausted("no digits left to invert".into()));
                }
                let m = BigInt::from(pow_p(self.p, digits));
                let inv = mod_inverse_int(unit, &m)
                    .ok_or_else(|| Error::BadEvaluation("unit not invertible".into()))?;
                Ok(Padic {
                    p: self.p,
                    prec: Prec::Mod(digits - val),
                    val: Val::NonZero { val: -val, unit: inv },
                })
            }
        }
    }

    pub fn div(&self, other: &Padic) -> Result<Padic> {
        match (&other.val, other.prec) {
            (Val::Zero, _) => Err(Error::DivisionByZero),
            (Val::NonZero { val, unit }, Prec::Exact) => {
                // exact divisor: try exact unit division, else fall back through
                // the capped inverse at self's precision
                if let Val::NonZero { val: v1, unit: u1 } = &self.val {
                    if (u1 % unit).is_zero() {
                        let mut out = Padic {
                            p: self.p,
                            prec: self.prec.shift(-val),
                            val: Val::NonZero { val: v1 - val, unit: u1 / unit },
                        };
                        out.normalize();
                        return Ok(out);
                    }
                }
                match self.prec {
                    Prec::Exact => Err(Error::PrecisionExhausted(
                        "exact/exact division with a non-exact quotient; truncate an operand first".into(),
                    )),
                    Prec::Mod(n) => {
                        let d = other.truncate(n + val + 1);
                        Ok(self.mul(&d.invert()?))
                    }
                }
            }
            (Val::NonZero { .. }, Prec::Mod(_)) => Ok(self.mul(&other.invert()?)),
        }
    }

    /// `self / p^k` — exact valuation shift, erroring if it would create a
    /// fractional part the caller did not expect.
    pub fn divide_exact_power(&self, k: i64) -> Result<Padic> {
        if let Some(v) = self.valuation() {
            if v < k {
                return Err(Error::BadEvaluation(format!(
                    "valuation {v} smaller than p-power {k} in exact division"
                )));
            }
        }
        Ok(self.shift_valuation(-k))
    }

    pub fn pow(&self, mut e: u64) -> Padic {
        let mut base = self.clone();
        let mut acc = Padic::one(self.p);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Agreement modulo p^min(N1, N2): the spec's notion of equality.
    pub fn agrees_with(&self, other: &Padic) -> bool {
        self.sub(other).is_zero_at_prec()
    }

    /// The Iwasawa logarithm, extended to Q_p^× by `log p = 0`.
    ///
    /// Roots of unity are killed because the series is applied to
    /// `x^(p-1)` and the result divided by `p - 1`. The output precision is
    /// min(prec of the unit digits, `target_prec`).
    pub fn iwasawa_log(&self, target_prec: i64) -> Result<Padic> {
        if self.is_zero_at_prec() {
            return Err(Error::NotAUnit);
        }
        let p = self.p;
        let out_prec = match self.prec {
            Prec::Exact => target_prec,
            Prec::Mod(n) => target_prec.min(n - self.valuation().unwrap()),
        };
        if out_prec <= 0 {
            return Err(Error::PrecisionExhausted("no digits available for log".into()));
        }
        // strip the valuation (log p = 0), then u^(p-1) = 1 + w with v(w) >= 1
        let work = out_prec + 2 * ilog_p_ceil(p, out_prec as u64) + 4;
        let unit = self.shift_valuation(-self.valuation().unwrap()).truncate(work);
        let upow = unit.pow(p - 1);
        let w = upow.sub(&Padic::one(p));
        if w.is_zero_at_prec() {
            return Ok(Padic::zero_mod(p, out_prec));
        }
        let mut term = Padic::one(p).truncate(work);
        let mut acc = Padic::zero_mod(p, work);
        let mut n: u64 = 0;
        loop {
            n += 1;
            term = term.mul(&w);
            // v(w^n / n) >= n - v_p(n); stop when that clears the target
            let vp_n = vp_u64(p, n);
            if (n as i64) - (vp_n as i64) >= out_prec && n as i64 > out_prec {
                break;
            }
            let nval = Padic::from_integer(p, BigInt::from(n));
            let quotient = term.div(&nval)?;
            if n % 2 == 1 {
                acc = acc.add(&quotient);
            } else {
                acc = acc.sub(&quotient);
            }
        }
        let pm1 = Padic::from_integer(p, BigInt::from(p - 1));
        Ok(acc.div(&pm1)?.truncate(out_prec))
    }

    /// Human-readable digit expansion like `2*7 + 5*7^3 + O(7^4)`.
    pub fn expansion_string(&self) -> String {
        match (&self.val, self.prec) {
            (Val::Zero, Prec::Exact) => "0".into(),
            (Val::Zero, Prec::Mod(n)) => {
                if n == 1 {
                    format!("O({})", self.p)
                } else {
                    format!("O({}^{})", self.p, n)
                }
            }
            (Val::NonZero { val, unit }, prec) => {
                if prec == Prec::Exact {
                    return if *val == 0 {
                        format!("{unit}")
                    } else {
                        format!("{}*{}^{}", unit, self.p, val)
                    };
                }
                let digits = match prec {
                    Prec::Exact => unreachable!(),
                    Prec::Mod(n) => self.unit_digits((n - val).max(0) as usize),
                };
                let mut parts = vec![];
                for (i, d) in digits.iter().enumerate() {
                    if *d == 0 {
                        continue;
                    }
                    let e = val + i as i64;
                    let term = match e {
                        0 => format!("{d}"),
                        1 => {
                            if *d == 1 {
                                format!("{}", self.p)
                            } else {
                                format!("{}*{}", d, self.p)
                            }
                        }
                        _ => {
                            if *d == 1 {
                                format!("{}^{}", self.p, e)
                            } else {
                                format!("{}*{}^{}", d, self.p, e)
                            }
                        }
                    };
                    parts.push(term);
                }
                let mut s = parts.join(" + ");
                if s.is_empty() {
                    s = "0".into();
                }
                if let Prec::Mod(n) = prec {
                    if n == 1 {
                        s.push_str(&format!(" + O({})", self.p));
                    } else {
                        s.push_str(&format!(" + O({}^{})", self.p, n));
                    }
                }
                s
            }
        }
    }
}

impl PartialEq for Padic {
    /// Equality modulo p^min(N1, N2), per the precision model.
    fn eq(&self, other: &Padic) -> bool {
        self.agrees_with(other)
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expansion_string())
    }
}

/// v_p(n) for machine integers.
pub fn vp_u64(p: u64, mut n: u64) -> u32 {
    debug_assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

fn ilog_p_ceil(p: u64, n: u64) -> i64 {
    let mut k = 0i64;
    let mut acc = 1u128;
    while acc < n as u128 {
        acc *= p as u128;
        k += 1;
    }
    k
}

/// Modular inverse via extended Euclid; `None` if not coprime.
pub fn mod_inverse_int(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() && e.gcd != BigInt::from(-1) {
        return None;
    }
    let mut x = e.x.mod_floor(m);
    if e.gcd == BigInt::from(-1) {
        x = (-x).mod_floor(m);
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pd(digits: &[u64], val: i64) -> Padic {
        Padic::from_unit_digits(7, digits, val)
    }

    #[test]
    fn additive_identity_keeps_precision() {
        // (2*7 + O(7^4)) + 0 = 2*7 + O(7^4)
        let x = Padic::from_integer_mod(7, 14, 4);
        let z = Padic::zero(7);
        let s = x.add(&z);
        assert_eq!(s.precision(), Prec::Mod(4));
        assert_eq!(s.residue_u64(4).unwrap(), 14);
    }

    #[test]
    fn division_matches_extended_euclid() {
        // 4/9 mod 49: 9^{-1} mod 49 = 11 by Euclid, 4*11 = 44
        let a = Padic::from_integer_mod(7, 4, 2);
        let b = Padic::from_integer_mod(7, 9, 2);
        let q = a.div(&b).unwrap();
        assert_eq!(q.residue_u64(2).unwrap(), 44);
        // the spec's worked inverse: 9*11 = 99 = 2*49 + 1
        assert_eq!((9 * 11) % 49, 1);
    }

    #[test]
    fn multiplication_valuation_and_min_precision() {
        // (7 + O(7^3)) * (7 + O(7^3)) = 7^2 + O(7^3), valuation 2
        let x = Padic::from_integer_mod(7, 7, 3);
        let y = x.mul(&x);
        assert_eq!(y.valuation(), Some(2));
        assert_eq!(y.precision(), Prec::Mod(3));
        assert_eq!(y.residue_u64(3).unwrap(), 49);
    }

    #[test]
    fn equality_is_agreement_at_shared_precision() {
        let x = Padic::from_integer_mod(7, 1 + 49, 2);
        let y = Padic::from_integer_mod(7, 1 + 2 * 49, 3);
        assert_eq!(x, y); // agree mod 7^2
        let z = Padic::from_integer_mod(7, 2, 3);
        assert_ne!(x, z);
    }

    #[test]
    fn iwasawa_log_of_one_is_zero() {
        let one = Padic::one(7);
        let l = one.iwasawa_log(6).unwrap();
        assert!(l.is_zero_at_prec());
    }

    #[test]
    fn iwasawa_log_of_minus_one_is_zero() {
        let m1 = Padic::from_integer(7, -1);
        let l = m1.iwasawa_log(6).unwrap();
        assert!(l.is_zero_at_prec(), "log(-1) = 0, got {l}");
    }

    #[test]
    fn iwasawa_log_of_4_over_9() {
        // log(4/9) = 7 + 3*7^2 + ... ; ≡ 7 mod 49
        let x = Padic::from_ratio(7, 4, 9, 6).unwrap();
        let l = x.iwasawa_log(4).unwrap();
        assert_eq!(l.residue_u64(4).unwrap(), 154);
        assert_eq!(l.truncate(2).residue_u64(2).unwrap(), 7);
    }

    #[test]
    fn iwasawa_log_kills_p_powers() {
        let x = Padic::from_integer(7, 7 * 7 * 2);
        let l = x.iwasawa_log(4).unwrap();
        let l2 = Padic::from_integer(7, 2).iwasawa_log(4).unwrap();
        assert_eq!(l, l2);
    }

    #[test]
    fn iwasawa_log_is_homomorphism() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let a: u64 = rng.gen_range(1..10_000);
            let b: u64 = rng.gen_range(1..10_000);
            let (a, b) = (a * 7 + 1, b * 7 + 3); // units
            let pa = Padic::from_integer(7, BigInt::from(a));
            let pb = Padic::from_integer(7, BigInt::from(b));
            let lhs = pa.mul(&pb).iwasawa_log(5).unwrap();
            let rhs = pa.iwasawa_log(5).unwrap().add(&pb.iwasawa_log(5).unwrap());
            assert_eq!(lhs, rhs, "log({a}*{b}) != log({a})+log({b})");
        }
    }

    #[test]
    fn iwasawa_log_kills_teichmueller() {
        // lift each (p-1)-th root of unity mod 7^5 by Hensel on x^6 - 1
        let k = 5i64;
        let m = 7u64.pow(k as u32) as i64;
        for r0 in 1..7u64 {
            let mut r = r0 as i64;
            let mi = m;
            for _ in 0..6 {
                // Newton: r -= (r^6 - 1)/(6 r^5)
                let r6 = mod_pow_i64(r, 6, mi);
                let fp = (6 * mod_pow_i64(r, 5, mi)) % mi;
                let fp_inv = mod_inv_i64(fp.rem_euclid(mi), mi);
                r = (r - (r6 - 1) * fp_inv).rem_euclid(mi);
            }
            let x = Padic::from_integer_mod(7, r, k);
            let l = x.iwasawa_log(k).unwrap();
            assert!(l.is_zero_at_prec(), "log of root of unity {r} not 0: {l}");
        }
    }

    fn mod_pow_i64(mut b: i64, mut e: u32, m: i64) -> i64 {
        let mut acc: i128 = 1;
        let mm = m as i128;
        let mut bb = (b.rem_euclid(m)) as i128;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * bb % mm;
            }
            bb = bb * bb % mm;
            e >>= 1;
        }
        b = acc as i64;
        b
    }

    fn mod_inv_i64(a: i64, m: i64) -> i64 {
        let (mut t, mut new_t) = (0i64, 1i64);
        let (mut r, mut new_r) = (m, a);
        while new_r != 0 {
            let q = r / new_r;
            (t, new_t) = (new_t, t - q * new_t);
            (r, new_r) = (new_r, r - q * new_r);
        }
        assert!(r == 1, "not invertible");
        t.rem_euclid(m)
    }

    #[test]
    fn precision_soundness_under_truncation() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let a: i64 = rng.gen_range(-100000..100000);
            let b: i64 = rng.gen_range(-100000..100000);
            if b == 0 || a == 0 {
                continue;
            }
            let n = 8i64;
            let m = 4i64;
            let pa = Padic::from_integer_mod(7, a, n);
            let pb = Padic::from_integer_mod(7, b, n);
            let ta = pa.truncate(m);
            let tb = pb.truncate(m);
            for op in 0..3 {
                let full = match op {
                    0 => pa.add(&pb),
                    1 => pa.sub(&pb),
                    _ => pa.mul(&pb),
                };
                let trunc = match op {
                    0 => ta.add(&tb),
                    1 => ta.sub(&tb),
                    _ => ta.mul(&tb),
                };
                // the truncated computation must agree at its reported precision
                assert!(full.agrees_with(&trunc), "op {op}: {full} vs {trunc}");
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn arithmetic_respects_truncation(a in -200_000i64..200_000, b in -200_000i64..200_000, m in 2i64..6) {
            let pa = Padic::from_integer_mod(7, a, 8);
            let pb = Padic::from_integer_mod(7, b, 8);
            let full = pa.mul(&pb).add(&pa);
            let coarse = pa.truncate(m).mul(&pb.truncate(m)).add(&pa.truncate(m));
            proptest::prop_assert!(full.agrees_with(&coarse));
        }

        #[test]
        fn digit_serialization_round_trips(v in 0u64..2_000_000, val in 0i64..3) {
            let x = Padic::from_integer_mod(7, (v as i64) * 7i64.pow(val as u32), 9);
            if !x.is_zero_at_prec() {
                let xv = x.valuation().unwrap();
                let len = (9 - xv) as usize;
                let y = Padic::from_unit_digits(7, &x.unit_digits(len), xv);
                proptest::prop_assert!(x.agrees_with(&y));
                proptest::prop_assert_eq!(x.precision(), y.precision());
            }
        }
    }

    #[test]
    fn expansion_display() {
        let x = pd(&[2, 0, 5], 1); // 2*7 + 5*7^3, prec 4
        assert_eq!(x.expansion_string(), "2*7 + 5*7^3 + O(7^4)");
    }
}
