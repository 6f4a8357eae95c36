//! Dense univariate polynomials over Q_p, with root finding over Z_p,
//! Hensel lifting, and valuation-profile-bounded interpolation.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::padic::{vp_u64, Padic};

/// Coefficients low-to-high; trailing coefficients that are zero at their
/// stated precision are trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct PadicPoly {
    pub p: u64,
    pub coeffs: Vec<Padic>,
}

impl PadicPoly {
    pub fn new(p: u64, coeffs: Vec<Padic>) -> PadicPoly {
        let mut out = PadicPoly { p, coeffs };
        out.trim();
        out
    }

    pub fn zero(p: u64) -> PadicPoly {
        PadicPoly { p, coeffs: vec![] }
    }

    pub fn one(p: u64) -> PadicPoly {
        PadicPoly::new(p, vec![Padic::one(p)])
    }

    pub fn x(p: u64) -> PadicPoly {
        PadicPoly::new(p, vec![Padic::zero(p), Padic::one(p)])
    }

    pub fn constant(c: Padic) -> PadicPoly {
        PadicPoly::new(c.prime(), vec![c])
    }

    pub fn from_integers(p: u64, cs: &[i64]) -> PadicPoly {
        PadicPoly::new(p, cs.iter().map(|&c| Padic::from_integer(p, c)).collect())
    }

    pub fn trim(&mut self) {
        while let Some(c) = self.coeffs.last() {
            if c.is_zero_at_prec() {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree after trimming; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn leading(&self) -> Option<&Padic> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> Padic {
        self.coeffs.get(i).cloned().unwrap_or_else(|| Padic::zero(self.p))
    }

    pub fn evaluate(&self, x: &Padic) -> Padic {
        let mut acc = Padic::zero(self.p);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn derivative(&self) -> PadicPoly {
        if self.coeffs.len() <= 1 {
            return PadicPoly::zero(self.p);
        }
        let cs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul(&Padic::from_integer(self.p, i as i64)))
            .collect();
        PadicPoly::new(self.p, cs)
    }

    pub fn add(&self, other: &PadicPoly) -> PadicPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let cs = (0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect();
        PadicPoly::new(self.p, cs)
    }

    pub fn sub(&self, other: &PadicPoly) -> PadicPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let cs = (0..n).map(|i| self.coeff(i).sub(&other.coeff(i))).collect();
        PadicPoly::new(self.p, cs)
    }

    pub fn neg(&self) -> PadicPoly {
        PadicPoly::new(self.p, self.coeffs.iter().map(|c| c.neg()).collect())
    }

    pub fn mul(&self, other: &PadicPoly) -> PadicPoly {
        if self.is_zero() || other.is_zero() {
            return PadicPoly::zero(self.p);
        }
        let mut cs = vec![Padic::zero(self.p); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                cs[i + j] = cs[i + j].add(&a.mul(b));
            }
        }
        PadicPoly::new(self.p, cs)
    }

    pub fn scale(&self, c: &Padic) -> PadicPoly {
        PadicPoly::new(self.p, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn shift_x(&self) -> PadicPoly {
        // multiply by x
        let mut cs = vec![Padic::zero(self.p)];
        cs.extend(self.coeffs.iter().cloned());
        PadicPoly::new(self.p, cs)
    }

    /// True when the leading coefficient is a p-adic unit at its precision.
    pub fn has_unit_leading(&self) -> bool {
        matches!(self.leading().and_then(|c| c.valuation()), Some(0))
    }

    /// Euclidean division by a divisor with unit leading coefficient.
    pub fn div_rem(&self, d: &PadicPoly) -> Result<(PadicPoly, PadicPoly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        if !d.has_unit_leading() {
            return Err(Error::PrecisionExhausted(
                "division by polynomial with non-unit leading coefficient".into(),
            ));
        }
        let lc_inv = d.leading().unwrap().invert()?;
        let mut rem = self.clone();
        let mut q = vec![Padic::zero(self.p); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let c = rem.leading().unwrap().mul(&lc_inv);
            let k = rd - dd;
            q[k] = c.clone();
            // rem -= c x^k d
            let mut sub = vec![Padic::zero(self.p); k];
            sub.extend(d.coeffs.iter().map(|a| a.mul(&c)));
            rem = rem.sub(&PadicPoly::new(self.p, sub));
            if rem.degree().map_or(true, |nd| nd < rd) {
                continue;
            }
            // cancellation failed to reduce the degree: precision trouble
            return Err(Error::PrecisionExhausted("degree did not drop in division".into()));
        }
        Ok((PadicPoly::new(self.p, q), rem))
    }

    pub fn rem(&self, d: &PadicPoly) -> Result<PadicPoly> {
        Ok(self.div_rem(d)?.1)
    }

    /// Make monic by dividing by the (unit) leading coefficient.
    pub fn monic(&self) -> Result<PadicPoly> {
        let lc = self.leading().ok_or(Error::DivisionByZero)?;
        if lc.valuation() != Some(0) {
            return Err(Error::PrecisionExhausted("leading coefficient is not a unit".into()));
        }
        let inv = lc.invert()?;
        Ok(self.scale(&inv))
    }

    /// Truncate every coefficient to absolute precision `n`.
    pub fn truncate(&self, n: i64) -> PadicPoly {
        PadicPoly::new(self.p, self.coeffs.iter().map(|c| c.truncate(n)).collect())
    }

    /// Extended gcd with unit-leading checks at every step. Returns
    /// (g, s, t) with s*self + t*other = g. The cascade raises
    /// `PrecisionExhausted` instead of silently renormalizing.
    pub fn xgcd(&self, other: &PadicPoly) -> Result<(PadicPoly, PadicPoly, PadicPoly)> {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (PadicPoly::one(p), PadicPoly::zero(p));
        let (mut t0, mut t1) = (PadicPoly::zero(p), PadicPoly::one(p));
        while !r1.is_zero() {
            if !r1.has_unit_leading() {
                return Err(Error::PrecisionExhausted(
                    "gcd step leading coefficient not a unit at working precision".into(),
                ));
            }
            let (q, r) = r0.div_rem(&r1)?;
            let s = s0.sub(&q.mul(&s1));
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        Ok((r0, s0, t0))
    }
}

/// Lift the simple root `r0` of `f` mod p to a root mod `p^k`.
pub fn hensel_lift_univariate(f: &PadicPoly, r0: u64, k: i64) -> Result<Padic> {
    let p = f.p;
    let fp = f.derivative();
    let r0p = Padic::from_integer_mod(p, r0 as i64, 1);
    if !f.evaluate(&r0p).truncate(1).is_zero_at_prec() {
        return Err(Error::NoRoot);
    }
    let d0 = fp.evaluate(&Padic::from_integer(p, r0 as i64)).truncate(1);
    if d0.is_zero_at_prec() {
        return Err(Error::SingularRoot);
    }
    // linear lifting digit by digit
    let mut r = Padic::from_integer_mod(p, r0 as i64, 1);
    let mut prec = 1i64;
    while prec < k {
        prec = (2 * prec).min(k);
        // lift the representative to the next precision and Newton-correct
        let rep = r.residue(r.precision().finite().unwrap()).unwrap();
        let mut cand = Padic::from_integer_mod(p, BigInt::from(rep), prec);
        let fx = f.evaluate(&cand).truncate(prec);
        let dfx = fp.evaluate(&cand).truncate(prec);
        let correction = fx.div(&dfx)?;
        cand = cand.sub(&correction).truncate(prec);
        r = cand;
    }
    Ok(r.truncate(k))
}

/// Roots of `f` in Z_p mod p^k when the reduction mod p splits into distinct
/// linear factors over F_p; `NotSplit` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitOutcome {
    Roots(Vec<Padic>),
    NotSplit,
}

pub fn poly_roots_qp(f: &PadicPoly, k: i64) -> Result<SplitOutcome> {
    let p = f.p;
    let deg = f.degree().ok_or(Error::DivisionByZero)?;
    if !f.has_unit_leading() {
        return Err(Error::PrecisionExhausted(
            "root finding needs a unit leading coefficient".into(),
        ));
    }
    // reduction mod p as integer residues
    let mut residues = Vec::with_capacity(deg + 1);
    for c in &f.coeffs {
        residues.push(c.residue_u64(1).map_err(|_| {
            Error::PrecisionExhausted("coefficient has no mod-p digit".into())
        })?);
    }
    let eval_mod_p = |x: u64| -> u64 {
        let mut acc: u128 = 0;
        for c in residues.iter().rev() {
            acc = (acc * x as u128 + *c as u128) % p as u128;
        }
        acc as u64
    };
    let mut simple_roots = vec![];
    let mut count = 0usize;
    for x in 0..p {
        if eval_mod_p(x) == 0 {
            count += 1;
            simple_roots.push(x);
        }
    }
    if count < deg {
        // either an irreducible factor remains or a repeated root hides;
        // distinguish by checking f' at the roots
        let fp = f.derivative();
        for &r in &simple_roots {
            let d = fp.evaluate(&Padic::from_integer(p, r as i64)).truncate(1);
            if d.is_zero_at_prec() {
                return Err(Error::RepeatedRootModP);
            }
        }
        return Ok(SplitOutcome::NotSplit);
    }
    // deg distinct roots needed for a full split
    let fp = f.derivative();
    for &r in &simple_roots {
        let d = fp.evaluate(&Padic::from_integer(p, r as i64)).truncate(1);
        if d.is_zero_at_prec() {
            return Err(Error::RepeatedRootModP);
        }
    }
    let mut out = vec![];
    for r in simple_roots {
        out.push(hensel_lift_univariate(f, r, k)?);
    }
    Ok(SplitOutcome::Roots(out))
}

/// Coefficient-valuation profiles for the convergent power series the
/// pipeline fits. `lower_bound(n)` is the guaranteed valuation of the
/// degree-n coefficient.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum ValuationProfile {
    /// log of a smooth commutative group: max(1, n - v_p(n)).
    LogSeries,
    /// first g coordinates of the torsor pseudoparametrization: n - 1 - v_p(n).
    EmbeddingFirstG,
    /// height coordinate: n - 1 - 2*floor(log_p n) + v.
    EmbeddingHeight { v: i64 },
}

impl ValuationProfile {
    pub fn lower_bound(&self, p: u64, n: u64) -> i64 {
        if n == 0 {
            return 0;
        }
        match self {
            ValuationProfile::LogSeries => ((n as i64) - vp_u64(p, n) as i64).max(1),
            ValuationProfile::EmbeddingFirstG => (n as i64) - 1 - vp_u64(p, n) as i64,
            ValuationProfile::EmbeddingHeight { v } => {
                let mut l = 0i64;
                let mut acc = p as u128;
                while acc <= n as u128 {
                    acc *= p as u128;
                    l += 1;
                }
                (n as i64) - 1 - 2 * l + v
            }
        }
    }

    /// Largest degree whose coefficient can still be nonzero mod p^k.
    pub fn degree_bound(&self, p: u64, k: i64) -> u64 {
        let mut n = 0u64;
        let mut best = 0u64;
        loop {
            n += 1;
            if self.lower_bound(p, n) < k {
                best = n;
            } else if n > 4 * (k.unsigned_abs() + 4) * p {
                // bounds are eventually monotone; safe cut-off
                break;
            }
            if n > 100_000 {
                break;
            }
        }
        best
    }
}

/// Interpolate the unique polynomial mod p^k of profile-bounded degree
/// through the samples. Extra samples beyond bound+1 are used as checks.
pub fn interpolate_poly_mod_pk(
    samples: &[(Padic, Padic)],
    profile: ValuationProfile,
    k: i64,
) -> Result<PadicPoly> {
    if samples.is_empty() {
        return Err(Error::DimensionMismatch("no samples".into()));
    }
    let p = samples[0].0.prime();
    let bound = profile.degree_bound(p, k) as usize;
    if samples.len() < bound + 1 {
        return Err(Error::DegreeBoundExceeded);
    }
    // distinctness mod p
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            if samples[i].0.sub(&samples[j].0).truncate(1).is_zero_at_prec() {
                return Err(Error::DimensionMismatch("sample inputs collide mod p".into()));
            }
        }
    }
    // Solve the Vandermonde system on the first bound+1 samples by Gaussian
    // elimination; pivots are units because inputs are distinct mod p.
    let n = bound + 1;
    let mut rows: Vec<Vec<Padic>> = Vec::with_capacity(n);
    for (x, y) in samples.iter().take(n) {
        let mut row = Vec::with_capacity(n + 1);
        let mut pw = Padic::one(p).truncate(k);
        for _ in 0..n {
            row.push(pw.clone());
            pw = pw.mul(x);
        }
        row.push(y.truncate(k));
        rows.push(row);
    }
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| rows[r][col].valuation() == Some(0))
            .ok_or(Error::DegreeBoundExceeded)?;
        rows.swap(col, piv);
        let inv = rows[col][col].invert()?;
        for c in col..=n {
            rows[col][c] = rows[col][c].mul(&inv);
        }
        for r in 0..n {
            if r != col && !rows[r][col].is_zero_at_prec() {
                let f = rows[r][col].clone();
                for c in col..=n {
                    let t = rows[col][c].mul(&f);
                    rows[r][c] = rows[r][c].sub(&t);
                }
            }
        }
    }
    let coeffs: Vec<Padic> = (0..n).map(|i| rows[i][n].truncate(k)).collect();
    let poly = PadicPoly::new(p, coeffs);
    // verify on any remaining samples
    for (x, y) in samples.iter().skip(n) {
        if !poly.evaluate(x).truncate(k).agrees_with(&y.truncate(k)) {
            return Err(Error::DegreeBoundExceeded);
        }
    }
    Ok(poly)
}

/// Exact square root of a monic even-degree polynomial (used for undoing a
/// Mumford doubling); error if no monic square root exists at precision.
pub fn monic_sqrt(f: &PadicPoly, k: i64) -> Result<PadicPoly> {
    let p = f.p;
    let deg = f.degree().ok_or(Error::DivisionByZero)?;
    if deg % 2 != 0 {
        return Err(Error::BadEvaluation("odd degree has no polynomial sqrt".into()));
    }
    let half = deg / 2;
    let two_inv = Padic::from_integer(p, 2).truncate(k).invert()?;
    let mut r = vec![Padic::zero(p).truncate(k); half + 1];
    r[half] = Padic::one(p);
    // match coefficients from the top: f = r^2
    for i in (0..half).rev() {
        // coefficient of x^(half+i) in r^2: 2 r[half] r[i] + sum_{a+b=half+i, a,b<half+... }
        let mut acc = Padic::zero(p);
        for a in i + 1..half {
            let b = half + i - a;
            if b <= half && b > i {
                acc = acc.add(&r[a].mul(&r[b]));
            }
        }
        let target = f.coeff(half + i).sub(&acc);
        r[i] = target.mul(&two_inv).truncate(k);
    }
    let rp = PadicPoly::new(p, r);
    let sq = rp.mul(&rp).truncate(k);
    let want = f.truncate(k);
    if sq.sub(&want).truncate(k).coeffs.iter().any(|c| !c.is_zero_at_prec()) {
        return Err(Error::BadEvaluation("polynomial is not a square at precision".into()));
    }
    Ok(rp)
}

/// Resultant of two integer polynomials, as a BigInt (Sylvester determinant
/// via fraction-free elimination). Used for the good-reduction check.
pub fn resultant_int(a: &[BigInt], b: &[BigInt]) -> BigInt {
    use num_traits::Zero;
    let da = a.len() - 1;
    let db = b.len() - 1;
    let n = da + db;
    if n == 0 {
        return BigInt::from(1);
    }
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for i in 0..db {
        for (j, c) in a.iter().rev().enumerate() {
            m[i][i + j] = c.clone();
        }
    }
    for i in 0..da {
        for (j, c) in b.iter().rev().enumerate() {
            m[db + i][i + j] = c.clone();
        }
    }
    // Bareiss fraction-free determinant
    let mut sign = BigInt::from(1);
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let swap = (k + 1..n).find(|&r| !m[r][k].is_zero());
            match swap {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// v_p of a BigInt (None for zero).
pub fn vp_bigint(p: u64, n: &BigInt) -> Option<u64> {
    use num_traits::Zero;
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut m = n.clone();
    while (&m % &pb).is_zero() {
        m /= &pb;
        v += 1;
    }
    Some(v)
}

#[allow(unused)]
fn _unused(x: &Padic) -> Option<i64> {
    x.precision().finite().and_then(|n| n.to_i64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hensel_sqrt2_mod_343() {
        // brute-force oracle: search residues mod 7^3
        let mut expect = None;
        for r in 0..343u64 {
            if (r * r) % 343 == 2 && r % 7 == 3 {
                expect = Some(r);
            }
        }
        assert_eq!(expect, Some(108));
        let f = PadicPoly::from_integers(7, &[-2, 0, 1]);
        let r = hensel_lift_univariate(&f, 3, 3).unwrap();
        assert_eq!(r.residue_u64(3).unwrap(), 108);
    }

    #[test]
    fn hensel_linear_is_exact() {
        // f = x - a
        let f = PadicPoly::from_integers(7, &[-12, 1]);
        let r = hensel_lift_univariate(&f, 5, 4).unwrap();
        assert_eq!(r.residue_u64(4).unwrap(), 12);
    }

    #[test]
    fn hensel_beta_of_even_model() {
        let f = PadicPoly::from_integers(7, &[1, -2, 1, 2, 2, 4, 1]);
        let r = hensel_lift_univariate(&f, 4, 3).unwrap();
        // 4 + 3*7 + 4*7^2 = 221
        assert_eq!(r.residue_u64(3).unwrap(), 221);
    }

    #[test]
    fn hensel_consistency_across_targets() {
        let f = PadicPoly::from_integers(7, &[-2, 0, 1]);
        let r6 = hensel_lift_univariate(&f, 3, 6).unwrap();
        for j in 1..=6 {
            let rj = hensel_lift_univariate(&f, 3, j).unwrap();
            assert_eq!(r6.truncate(j), rj);
        }
    }

    #[test]
    fn roots_of_split_quadratic() {
        // (x-1)(x-2) over Z_7
        let f = PadicPoly::from_integers(7, &[2, -3, 1]);
        match poly_roots_qp(&f, 3).unwrap() {
            SplitOutcome::Roots(rs) => {
                let mut vals: Vec<u64> = rs.iter().map(|r| r.residue_u64(1).unwrap()).collect();
                vals.sort();
                assert_eq!(vals, vec![1, 2]);
            }
            SplitOutcome::NotSplit => panic!("should split"),
        }
    }

    #[test]
    fn x2_minus_2_not_split_over_z5() {
        // QR table mod 5: squares are 0,1,4 — 2 is not one
        let sq: Vec<u64> = (0..5u64).map(|x| x * x % 5).collect();
        assert!(!sq.contains(&2));
        let f = PadicPoly::from_integers(5, &[-2, 0, 1]);
        assert_eq!(poly_roots_qp(&f, 3).unwrap(), SplitOutcome::NotSplit);
    }

    #[test]
    fn repeated_root_detected() {
        let f = PadicPoly::from_integers(7, &[1, 2, 1]); // (x+1)^2
        assert_eq!(poly_roots_qp(&f, 2), Err(Error::RepeatedRootModP));
    }

    #[test]
    fn interpolate_linear_mod_p() {
        // k=1, embedding-first-g → degree bound 1; samples (0,0),(1,2) → 2ν
        let prof = ValuationProfile::EmbeddingFirstG;
        assert_eq!(prof.degree_bound(7, 1), 1);
        let s = vec![
            (Padic::from_integer(7, 0), Padic::from_integer_mod(7, 0, 1)),
            (Padic::from_integer(7, 1), Padic::from_integer_mod(7, 2, 1)),
        ];
        let f = interpolate_poly_mod_pk(&s, prof, 1).unwrap();
        assert_eq!(f.degree(), Some(1));
        assert_eq!(f.coeff(1).residue_u64(1).unwrap(), 2);
        assert!(f.coeff(0).is_zero_at_prec());
    }

    #[test]
    fn interpolate_constant() {
        let s = vec![
            (Padic::from_integer(7, 0), Padic::from_integer_mod(7, 5, 2)),
            (Padic::from_integer(7, 1), Padic::from_integer_mod(7, 5, 2)),
            (Padic::from_integer(7, 2), Padic::from_integer_mod(7, 5, 2)),
        ];
        let f = interpolate_poly_mod_pk(&s, ValuationProfile::EmbeddingFirstG, 2).unwrap();
        assert_eq!(f.degree(), Some(0));
        assert_eq!(f.coeff(0).residue_u64(2).unwrap(), 5);
    }

    #[test]
    fn interpolate_refits_square() {
        // evaluate ν^2 at 0,1,2 and refit at k=2
        let samples: Vec<(Padic, Padic)> = (0..3i64)
            .map(|v| {
                (
                    Padic::from_integer(7, v),
                    Padic::from_integer_mod(7, v * v, 2),
                )
            })
            .collect();
        let f = interpolate_poly_mod_pk(&samples, ValuationProfile::EmbeddingFirstG, 2).unwrap();
        assert_eq!(f.coeff(2).residue_u64(2).unwrap(), 1);
        assert!(f.coeff(1).is_zero_at_prec());
        assert!(f.coeff(0).is_zero_at_prec());
    }

    #[test]
    fn interpolate_round_trip_respecting_profile() {
        // interpolate ∘ evaluate = identity on polynomials within the bound
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let prof = ValuationProfile::EmbeddingFirstG;
        let k = 3i64;
        let bound = prof.degree_bound(7, k) as usize;
        for _ in 0..25 {
            // random poly obeying the profile: coeff n has valuation >= bound(n)
            let coeffs: Vec<Padic> = (0..=bound)
                .map(|n| {
                    let lb = prof.lower_bound(7, n as u64).max(0);
                    let c: i64 = rng.gen_range(0..200);
                    Padic::from_integer_mod(7, c * 7i64.pow(lb as u32), k)
                })
                .collect();
            let poly = PadicPoly::new(7, coeffs);
            let samples: Vec<(Padic, Padic)> = (0..=bound as i64 + 1)
                .map(|v| {
                    let x = Padic::from_integer(7, v);
                    (x.clone(), poly.evaluate(&x).truncate(k))
                })
                .collect();
            let refit = interpolate_poly_mod_pk(&samples, prof, k).unwrap();
            for n in 0..=bound {
                assert!(
                    refit.coeff(n).agrees_with(&poly.coeff(n)),
                    "coefficient {n} mismatch"
                );
            }
        }
    }

    #[test]
    fn valuation_profile_bounds() {
        let p = 7;
        assert_eq!(ValuationProfile::LogSeries.lower_bound(p, 1), 1);
        assert_eq!(ValuationProfile::LogSeries.lower_bound(p, 7), 6);
        assert_eq!(ValuationProfile::EmbeddingFirstG.lower_bound(p, 1), 0);
        assert_eq!(ValuationProfile::EmbeddingFirstG.lower_bound(p, 2), 1);
        assert_eq!(ValuationProfile::EmbeddingHeight { v: 0 }.lower_bound(p, 2), 1);
        assert_eq!(ValuationProfile::EmbeddingHeight { v: 0 }.lower_bound(p, 7), 4);
        // k=1 degree bounds used by the disk pipeline
        assert_eq!(ValuationProfile::EmbeddingFirstG.degree_bound(p, 1), 1);
        assert_eq!(ValuationProfile::EmbeddingHeight { v: 0 }.degree_bound(p, 1), 1);
        assert_eq!(ValuationProfile::EmbeddingFirstG.degree_bound(p, 2), 2);
        assert_eq!(ValuationProfile::EmbeddingHeight { v: 0 }.degree_bound(p, 2), 2);
    }

    #[test]
    fn monic_sqrt_round_trip() {
        let u1 = PadicPoly::from_integers(7, &[5, 3, 1]).truncate(6);
        let sq = u1.mul(&u1);
        let r = monic_sqrt(&sq, 6).unwrap();
        assert!(r.sub(&u1).truncate(6).is_zero());
    }

    #[test]
    fn resultant_detects_common_root() {
        let a: Vec<BigInt> = [6, -5, 1].iter().map(|&c| BigInt::from(c)).collect(); // (x-2)(x-3)
        let b: Vec<BigInt> = [-2, 1].iter().map(|&c| BigInt::from(c)).collect(); // x-2
        assert_eq!(resultant_int(&a, &b), BigInt::from(0));
        let c: Vec<BigInt> = [-1, 1].iter().map(|&c| BigInt::from(c)).collect(); // x-1
        assert_ne!(resultant_int(&a, &c), BigInt::from(0));
    }
}
