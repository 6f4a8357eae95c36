//! Arithmetic in Z/p^k for machine-sized p^k, multivariate polynomials over
//! it, and the square multivariate Hensel lift.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// The ring Z/p^k with p^k fitting in u64.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Zq {
    pub p: u64,
    pub k: u32,
    pub modulus: u64,
}

impl Zq {
    pub fn new(p: u64, k: u32) -> Zq {
        let modulus = p.checked_pow(k).expect("p^k overflows u64");
        Zq { p, k, modulus }
    }

    pub fn reduce_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.modulus as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.modulus as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + self.modulus as u128 - (b % self.modulus) as u128) % self.modulus as u128)
            as u64
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a % self.modulus == 0 {
            0
        } else {
            self.modulus - a % self.modulus
        }
    }

    pub fn is_unit(&self, a: u64) -> bool {
        a % self.p != 0
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if !self.is_unit(a) {
            return Err(Error::BadEvaluation(format!("{a} not invertible mod {}", self.modulus)));
        }
        let m = self.modulus as i128;
        let (mut t, mut new_t) = (0i128, 1i128);
        let (mut r, mut new_r) = (m, (a % self.modulus) as i128);
        while new_r != 0 {
            let q = r / new_r;
            (t, new_t) = (new_t, t - q * new_t);
            (r, new_r) = (new_r, r - q * new_r);
        }
        Ok(t.rem_euclid(m) as u64)
    }

    /// Reduce to the subring Z/p^j (j <= k).
    pub fn shrink(&self, j: u32) -> Zq {
        assert!(j <= self.k);
        Zq::new(self.p, j)
    }
}

/// Sparse multivariate polynomial over Z/p^k; keys are exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    pub ring: Zq,
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, u64>,
}

impl MultiPoly {
    pub fn zero(ring: Zq, nvars: usize) -> MultiPoly {
        MultiPoly { ring, nvars, terms: BTreeMap::new() }
    }

    pub fn constant(ring: Zq, nvars: usize, c: u64) -> MultiPoly {
        let mut f = MultiPoly::zero(ring, nvars);
        f.set(vec![0; nvars], c);
        f
    }

    pub fn variable(ring: Zq, nvars: usize, i: usize) -> MultiPoly {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut f = MultiPoly::zero(ring, nvars);
        f.set(e, 1);
        f
    }

    pub fn set(&mut self, exps: Vec<u32>, c: u64) {
        debug_assert_eq!(exps.len(), self.nvars);
        let c = c % self.ring.modulus;
        if c == 0 {
            self.terms.remove(&exps);
        } else {
            self.terms.insert(exps, c);
        }
    }

    pub fn coeff(&self, exps: &[u32]) -> u64 {
        *self.terms.get(exps).unwrap_or(&0)
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            let v = out.ring.add(out.coeff(e), *c);
            out.set(e.clone(), v);
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            let v = out.ring.sub(out.coeff(e), *c);
            out.set(e.clone(), v);
        }
        out
    }

    pub fn scale(&self, c: u64) -> MultiPoly {
        let mut out = MultiPoly::zero(self.ring, self.nvars);
        for (e, v) in &self.terms {
            out.set(e.clone(), self.ring.mul(*v, c));
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.ring, self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let v = out.ring.add(out.coeff(&e), self.ring.mul(*c1, *c2));
                out.set(e, v);
            }
        }
        out
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, xs: &[u64]) -> u64 {
        debug_assert_eq!(xs.len(), self.nvars);
        let mut acc = 0u64;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (i, &exp) in e.iter().enumerate() {
                for _ in 0..exp {
                    t = self.ring.mul(t, xs[i]);
                }
            }
            acc = self.ring.add(acc, t);
        }
        acc
    }

    pub fn partial_derivative(&self, i: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(self.ring, self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            let v = out.ring.add(out.coeff(&e2), self.ring.mul(*c, e[i] as u64));
            out.set(e2, v);
        }
        out
    }

    /// Substitute each variable by the given polynomial (in a possibly
    /// different variable set, same ring).
    pub fn substitute(&self, subs: &[MultiPoly]) -> MultiPoly {
        assert_eq!(subs.len(), self.nvars);
        let nv = subs.first().map(|s| s.nvars).unwrap_or(0);
        let mut out = MultiPoly::zero(self.ring, nv);
        for (e, c) in &self.terms {
            let mut t = MultiPoly::constant(self.ring, nv, *c);
            for (i, &exp) in e.iter().enumerate() {
                for _ in 0..exp {
                    t = t.mul(&subs[i]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Reduce every coefficient into Z/p^j (j <= k).
    pub fn reduce_to(&self, j: u32) -> MultiPoly {
        let ring = self.ring.shrink(j);
        let mut out = MultiPoly::zero(ring, self.nvars);
        for (e, c) in &self.terms {
            out.set(e.clone(), c % ring.modulus);
        }
        out
    }

    /// Divide every coefficient by p, requiring exact divisibility.
    pub fn divide_by_p(&self) -> Result<MultiPoly> {
        if self.ring.k == 0 {
            return Err(Error::BadEvaluation("cannot divide in Z/p^0".into()));
        }
        let ring = Zq::new(self.ring.p, self.ring.k - 1);
        let mut out = MultiPoly::zero(ring, self.nvars);
        for (e, c) in &self.terms {
            if c % self.ring.p != 0 {
                return Err(Error::BadEvaluation(format!(
                    "coefficient {c} not divisible by p at {e:?}"
                )));
            }
            out.set(e.clone(), (c / self.ring.p) % ring.modulus);
        }
        Ok(out)
    }

    /// Reparametrize x_i -> base_i + p * x_i (used when descending into a
    /// higher residue disk).
    pub fn shift_scale_vars(&self, base: &[u64]) -> MultiPoly {
        let subs: Vec<MultiPoly> = (0..self.nvars)
            .map(|i| {
                let mut s = MultiPoly::constant(self.ring, self.nvars, base[i]);
                let xi = MultiPoly::variable(self.ring, self.nvars, i).scale(self.ring.p);
                s = s.add(&xi);
                s
            })
            .collect();
        self.substitute(&subs)
    }
}

/// Square-system Hensel lift: start point solves the system mod p, Jacobian
/// invertible mod p, lift to a solution mod p^k.
pub fn hensel_lift_multivariate(system: &[MultiPoly], x0: &[u64], k: u32) -> Result<Vec<u64>> {
    let r = system.len();
    if r == 0 || system[0].nvars != r {
        return Err(Error::DimensionMismatch(format!(
            "need a square system, got {} equations in {} variables",
            r,
            system.first().map(|f| f.nvars).unwrap_or(0)
        )));
    }
    let p = system[0].ring.p;
    let zp = Zq::new(p, 1);
    for f in system {
        if f.reduce_to(1).evaluate(&x0.iter().map(|&x| x % p).collect::<Vec<_>>()) != 0 {
            return Err(Error::NoRoot);
        }
    }
    // Jacobian invertibility mod p
    let jac_mod_p: Vec<Vec<u64>> = system
        .iter()
        .map(|f| {
            (0..r)
                .map(|j| f.partial_derivative(j).reduce_to(1).evaluate(
                    &x0.iter().map(|&x| x % p).collect::<Vec<_>>(),
                ))
                .collect()
        })
        .collect();
    if matrix_inverse_mod(&jac_mod_p, zp).is_none() {
        return Err(Error::SingularJacobian);
    }

    let ring = Zq::new(p, k);
    let sys: Vec<MultiPoly> = system.iter().map(|f| f.reduce_to(k.min(f.ring.k))).collect();
    for f in &sys {
        if f.ring.k < k {
            return Err(Error::PrecisionExhausted(
                "system coefficients known to lower precision than the lift target".into(),
            ));
        }
    }
    let mut x: Vec<u64> = x0.iter().map(|&v| v % ring.modulus).collect();
    // Newton iteration; k is small so iterate k times
    for _ in 0..k {
        let vals: Vec<u64> = sys.iter().map(|f| f.evaluate(&x)).collect();
        if vals.iter().all(|&v| v == 0) {
            break;
        }
        let jac: Vec<Vec<u64>> = sys
            .iter()
            .map(|f| (0..r).map(|j| f.partial_derivative(j).evaluate(&x)).collect())
            .collect();
        let inv = matrix_inverse_mod(&jac, ring).ok_or(Error::SingularJacobian)?;
        for i in 0..r {
            let mut corr = 0u64;
            for j in 0..r {
                corr = ring.add(corr, ring.mul(inv[i][j], vals[j]));
            }
            x[i] = ring.sub(x[i], corr);
        }
    }
    let vals: Vec<u64> = sys.iter().map(|f| f.evaluate(&x)).collect();
    if vals.iter().any(|&v| v != 0) {
        return Err(Error::SingularJacobian);
    }
    Ok(x)
}

/// Inverse of a square matrix over Z/p^k; `None` when the reduction mod p is
/// singular.
pub fn matrix_inverse_mod(m: &[Vec<u64>], ring: Zq) -> Option<Vec<Vec<u64>>> {
    let n = m.len();
    let mut a: Vec<Vec<u64>> = m.iter().map(|row| row.iter().map(|&x| x % ring.modulus).collect()).collect();
    let mut inv: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| ring.is_unit(a[r][col]))?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = ring.inv(a[col][col]).ok()?;
        for j in 0..n {
            a[col][j] = ring.mul(a[col][j], d);
            inv[col][j] = ring.mul(inv[col][j], d);
        }
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let f = a[r][col];
                for j in 0..n {
                    a[r][j] = ring.sub(a[r][j], ring.mul(f, a[col][j]));
                    inv[r][j] = ring.sub(inv[r][j], ring.mul(f, inv[col][j]));
                }
            }
        }
    }
    Some(inv)
}

/// Solve a linear system A x = b over F_p. Returns one solution and a basis
/// of the kernel (empty basis = unique solution).
pub fn solve_linear_fp(
    a: &[Vec<u64>],
    b: &[u64],
    p: u64,
) -> Option<(Vec<u64>, Vec<Vec<u64>>)> {
    let ring = Zq::new(p, 1);
    let rows = a.len();
    let cols = if rows > 0 { a[0].len() } else { 0 };
    let mut m: Vec<Vec<u64>> = (0..rows)
        .map(|i| {
            let mut row: Vec<u64> = a[i].iter().map(|&x| x % p).collect();
            row.push(b[i] % p);
            row
        })
        .collect();
    let mut pivots = vec![];
    let mut rank = 0;
    for col in 0..cols {
        let piv = (rank..rows).find(|&r| m[r][col] % p != 0);
        let Some(piv) = piv else { continue };
        m.swap(rank, piv);
        let d = ring.inv(m[rank][col]).ok()?;
        for j in 0..=cols {
            m[rank][j] = ring.mul(m[rank][j], d);
        }
        for r in 0..rows {
            if r != rank && m[r][col] != 0 {
                let f = m[r][col];
                for j in 0..=cols {
                    m[r][j] = ring.sub(m[r][j], ring.mul(f, m[rank][j]));
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    // consistency
    for r in rank..rows {
        if m[r][cols] % p != 0 {
            return None;
        }
    }
    let mut x = vec![0u64; cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols];
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut kernel = vec![];
    for &f in &free {
        let mut v = vec![0u64; cols];
        v[f] = 1;
        for (i, &c) in pivots.iter().enumerate() {
            v[c] = ring.neg(m[i][f]);
        }
        kernel.push(v);
    }
    Some((x, kernel))
}
