//! Test-side finite-field machinery: an independent brute-force divisor
//! class-group oracle over F_q, and order-of-vanishing computations used to
//! check tracked functions against the divisors they are supposed to
//! witness. Everything here works on plain u64 residues and never calls the
//! production compose/reduce.

#![allow(dead_code)]

/// Polynomials over F_q as u64 coefficient vectors, low to high.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FqPoly {
    pub q: u64,
    pub c: Vec<u64>,
}

impl FqPoly {
    pub fn new(q: u64, mut c: Vec<u64>) -> FqPoly {
        for x in c.iter_mut() {
            *x %= q;
        }
        while c.last() == Some(&0) {
            c.pop();
        }
        FqPoly { q, c }
    }

    pub fn zero(q: u64) -> FqPoly {
        FqPoly { q, c: vec![] }
    }

    pub fn deg(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn at(&self, i: usize) -> u64 {
        *self.c.get(i).unwrap_or(&0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0u128;
        for c in self.c.iter().rev() {
            acc = (acc * x as u128 + *c as u128) % self.q as u128;
        }
        acc as u64
    }

    pub fn add(&self, o: &FqPoly) -> FqPoly {
        let n = self.c.len().max(o.c.len());
        FqPoly::new(self.q, (0..n).map(|i| (self.at(i) + o.at(i)) % self.q).collect())
    }

    pub fn sub(&self, o: &FqPoly) -> FqPoly {
        let n = self.c.len().max(o.c.len());
        FqPoly::new(
            self.q,
            (0..n).map(|i| (self.at(i) + self.q - o.at(i) % self.q) % self.q).collect(),
        )
    }

    pub fn mul(&self, o: &FqPoly) -> FqPoly {
        if self.c.is_empty() || o.c.is_empty() {
            return FqPoly::zero(self.q);
        }
        let mut out = vec![0u64; self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] = ((out[i + j] as u128 + *a as u128 * *b as u128) % self.q as u128) as u64;
            }
        }
        FqPoly::new(self.q, out)
    }

    pub fn scale(&self, s: u64) -> FqPoly {
        FqPoly::new(
            self.q,
            self.c.iter().map(|&a| ((a as u128 * s as u128) % self.q as u128) as u64).collect(),
        )
    }

    pub fn rem(&self, d: &FqPoly) -> FqPoly {
        let q = self.q;
        let dd = d.deg().expect("nonzero divisor");
        let lc_inv = inv_mod(d.c[dd], q);
        let mut r = self.c.clone();
        while r.len() > dd {
            let c = ((*r.last().unwrap() as u128 * lc_inv as u128) % q as u128) as u64;
            let k = r.len() - 1 - dd;
            for i in 0..=dd {
                let t = (c as u128 * d.at(i) as u128) % q as u128;
                r[k + i] = ((r[k + i] as u128 + q as u128 - t) % q as u128) as u64;
            }
            while r.last() == Some(&0) {
                r.pop();
            }
            if r.len() > dd + k {
                panic!("division did not reduce degree");
            }
        }
        FqPoly::new(q, r)
    }

    pub fn gcd(&self, o: &FqPoly) -> FqPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.c.is_empty() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if let Some(d) = a.deg() {
            let s = inv_mod(a.c[d], self.q);
            a = a.scale(s);
        }
        a
    }
}

pub fn inv_mod(a: u64, q: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (q as i128, (a % q) as i128);
    while new_r != 0 {
        let k = r / new_r;
        (t, new_t) = (new_t, t - k * new_t);
        (r, new_r) = (new_r, r - k * new_r);
    }
    assert_eq!(r, 1, "{a} not invertible mod {q}");
    t.rem_euclid(q as i128) as u64
}

/// An odd-degree genus-2 curve y^2 + h(x) y = f(x) over F_q.
#[derive(Clone)]
pub struct FqCurve {
    pub q: u64,
    pub h: FqPoly,
    pub f: FqPoly,
}

impl FqCurve {
    pub fn new(q: u64, h: &[i64], f: &[i64]) -> FqCurve {
        let conv = |v: &[i64]| {
            FqPoly::new(q, v.iter().map(|&c| c.rem_euclid(q as i64) as u64).collect())
        };
        FqCurve { q, h: conv(h), f: conv(f) }
    }

    pub fn on_curve(&self, x: u64, y: u64) -> bool {
        let q = self.q as u128;
        let lhs = (y as u128 * y as u128 + self.h.eval(x) as u128 * y as u128) % q;
        lhs == self.f.eval(x) as u128 % q
    }

    /// All reduced Mumford pairs (u, v) with deg u <= 2: a complete list of
    /// representatives for the divisor class group.
    pub fn reduced_pairs(&self) -> Vec<(FqPoly, FqPoly)> {
        let q = self.q;
        let mut out = vec![(FqPoly::new(q, vec![1]), FqPoly::zero(q))];
        // degree 1: u = x - a, v = y0 with y0 on the curve over a
        for a in 0..q {
            for y0 in 0..q {
                if self.on_curve(a, y0) {
                    out.push((
                        FqPoly::new(q, vec![(q - a) % q, 1]),
                        FqPoly::new(q, vec![y0]),
                    ));
                }
            }
        }
        // degree 2: monic u, v of degree < 2 with u | v^2 + h v - f
        for s in 0..q {
            for t in 0..q {
                let u = FqPoly::new(q, vec![t, s, 1]);
                for a in 0..q {
                    for b in 0..q {
                        let v = FqPoly::new(q, vec![b, a]);
                        let expr = v.mul(&v).add(&self.h.mul(&v)).sub(&self.f);
                        if expr.rem(&u).c.is_empty() {
                            out.push((u.clone(), v.clone()));
                        }
                    }
                }
            }
        }
        out
    }

    /// Condition rows forcing `a + b y` (basis x^i, x^j y) to vanish on the
    /// semi-reduced divisor (u, v): the coefficients of each basis element
    /// reduced mod u. `basis` pairs are (exponent, multiplies-y).
    fn vanishing_rows(&self, u: &FqPoly, v: &FqPoly, basis: &[(usize, bool)]) -> Vec<Vec<u64>> {
        let q = self.q;
        let du = u.deg().unwrap_or(0);
        if du == 0 {
            return vec![];
        }
        let mut rows = vec![vec![0u64; basis.len()]; du];
        for (col, &(e, is_y)) in basis.iter().enumerate() {
            let mut mono = FqPoly::new(q, {
                let mut c = vec![0u64; e + 1];
                c[e] = 1;
                c
            });
            if is_y {
                mono = mono.mul(v);
            }
            let r = mono.rem(u);
            for (d, row) in rows.iter_mut().enumerate() {
                row[col] = r.at(d);
            }
        }
        rows
    }

    fn has_kernel(&self, rows: &[Vec<u64>], cols: usize) -> bool {
        let q = self.q;
        let mut m: Vec<Vec<u64>> = rows.to_vec();
        let mut rank = 0;
        for col in 0..cols {
            let piv = (rank..m.len()).find(|&r| m[r][col] % q != 0);
            let Some(piv) = piv else { continue };
            m.swap(rank, piv);
            let d = inv_mod(m[rank][col], q);
            for x in m[rank].iter_mut() {
                *x = ((*x as u128 * d as u128) % q as u128) as u64;
            }
            for r in 0..m.len() {
                if r != rank && m[r][col] != 0 {
                    let fct = m[r][col];
                    for cc in 0..cols {
                        let t = (fct as u128 * m[rank][cc] as u128) % q as u128;
                        m[r][cc] =
                            ((m[r][cc] as u128 + q as u128 - t % q as u128) % q as u128) as u64;
                    }
                }
            }
            rank += 1;
        }
        rank < cols
    }

    /// The brute-force class-group addition oracle: scan the reduced
    /// candidates D3 with support disjoint from D1 and D2 and test for an
    /// interpolating function vanishing on D1 + D2 + iota(D3). With fully
    /// disjoint supports the vanishing conditions are exact, so a match is
    /// genuinely the class of the sum; when the true representative shares
    /// support with the inputs no disjoint candidate can match and the pair
    /// is reported as out of scope. Requires gcd(u1, u2) = 1.
    pub fn oracle_add(
        &self,
        reduced: &[(FqPoly, FqPoly)],
        d1: &(FqPoly, FqPoly),
        d2: &(FqPoly, FqPoly),
    ) -> Option<(FqPoly, FqPoly)> {
        let q = self.q;
        if d1.0.deg() == Some(0) {
            return Some(d2.clone());
        }
        if d2.0.deg() == Some(0) {
            return Some(d1.clone());
        }
        if d1.0.gcd(&d2.0).deg() != Some(0) {
            return None; // shared support: outside this oracle's scope
        }
        // full basis for the largest pole order T = d1 + d2 + 2
        let tmax = d1.0.deg().unwrap() + d2.0.deg().unwrap() + 2;
        let mut basis: Vec<(usize, bool)> = vec![];
        for i in 0..=tmax / 2 {
            basis.push((i, false));
        }
        if tmax >= 5 {
            for j in 0..=(tmax - 5) / 2 {
                basis.push((j, true));
            }
        }
        let rows1 = self.vanishing_rows(&d1.0, &d1.1, &basis);
        let rows2 = self.vanishing_rows(&d2.0, &d2.1, &basis);
        let u12 = d1.0.mul(&d2.0);
        let mut matches = vec![];
        for cand in reduced {
            let dc = cand.0.deg().unwrap_or(0);
            if dc > 0 && cand.0.gcd(&u12).deg() != Some(0) {
                continue; // overlapping support: conditions would undercount
            }
            let total = d1.0.deg().unwrap() + d2.0.deg().unwrap() + dc;
            if total % 2 == 1 && total < 5 {
                continue;
            }
            // columns allowed at this pole order
            let allowed: Vec<usize> = basis
                .iter()
                .enumerate()
                .filter(|(_, &(e, is_y))| {
                    if is_y {
                        5 + 2 * e <= total
                    } else {
                        2 * e <= total
                    }
                })
                .map(|(i, _)| i)
                .collect();
            let neg_v = FqPoly::zero(q).sub(&cand.1).sub(&self.h).rem(&cand.0);
            let rows3 = self.vanishing_rows(&cand.0, &neg_v, &basis);
            let take = |rows: &[Vec<u64>]| -> Vec<Vec<u64>> {
                rows.iter()
                    .map(|r| allowed.iter().map(|&c| r[c]).collect())
                    .collect()
            };
            let mut stacked = take(&rows1);
            stacked.extend(take(&rows2));
            stacked.extend(take(&rows3));
            if self.has_kernel(&stacked, allowed.len()) {
                matches.push(cand.clone());
            }
        }
        match matches.len() {
            0 => None, // the true representative overlaps the inputs
            1 => matches.pop(),
            _ => panic!("disjoint-support matches are unique; found {}", matches.len()),
        }
    }
}

/// F_{q^2} as F_q[w]/(w^2 - nonresidue), for point enumeration over the
/// quadratic extension.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Fq2 {
    pub a: u64,
    pub b: u64,
}

#[derive(Clone, Copy)]
pub struct Fq2Ctx {
    pub q: u64,
    pub nonresidue: u64,
}

impl Fq2Ctx {
    pub fn new(q: u64) -> Fq2Ctx {
        let nonresidue = (2..q)
            .find(|&d| (0..q).all(|x| x * x % q != d))
            .expect("a quadratic nonresidue exists");
        Fq2Ctx { q, nonresidue }
    }

    pub fn from_base(&self, a: u64) -> Fq2 {
        Fq2 { a: a % self.q, b: 0 }
    }

    pub fn add(&self, x: Fq2, y: Fq2) -> Fq2 {
        Fq2 { a: (x.a + y.a) % self.q, b: (x.b + y.b) % self.q }
    }

    pub fn sub(&self, x: Fq2, y: Fq2) -> Fq2 {
        Fq2 {
            a: (x.a + self.q - y.a % self.q) % self.q,
            b: (x.b + self.q - y.b % self.q) % self.q,
        }
    }

    pub fn mul(&self, x: Fq2, y: Fq2) -> Fq2 {
        let q = self.q as u128;
        let aa = x.a as u128 * y.a as u128 % q;
        let bb = x.b as u128 * y.b as u128 % q;
        let ab = (x.a as u128 * y.b as u128 + x.b as u128 * y.a as u128) % q;
        Fq2 {
            a: ((aa + bb * self.nonresidue as u128) % q) as u64,
            b: ab as u64,
        }
    }

    pub fn inv(&self, x: Fq2) -> Fq2 {
        // (a + bw)^(-1) = (a - bw)/(a^2 - nr b^2)
        let q = self.q as u128;
        let n = ((x.a as u128 * x.a as u128 % q) + q * q
            - (x.b as u128 * x.b as u128 % q) * self.nonresidue as u128 % q)
            % q;
        let ninv = inv_mod(n as u64, self.q) as u128;
        Fq2 {
            a: (x.a as u128 * ninv % q) as u64,
            b: ((self.q as u128 - x.b as u128 % q) % q * ninv % q) as u64,
        }
    }

    pub fn is_zero(&self, x: Fq2) -> bool {
        x.a % self.q == 0 && x.b % self.q == 0
    }

    pub fn eval_poly(&self, f: &FqPoly, x: Fq2) -> Fq2 {
        let mut acc = self.from_base(0);
        for c in f.c.iter().rev() {
            acc = self.add(self.mul(acc, x), self.from_base(*c));
        }
        acc
    }

    /// The points (x, y) in F_{q^2} on y^2 + h y = f over a given x.
    pub fn fiber(&self, curve: &FqCurve, x: Fq2) -> Vec<Fq2> {
        let hx = self.eval_poly(&curve.h, x);
        let fx = self.eval_poly(&curve.f, x);
        let mut out = vec![];
        // brute force y in F_{q^2}
        for a in 0..self.q {
            for b in 0..self.q {
                let y = Fq2 { a, b };
                let lhs = self.add(self.mul(y, y), self.mul(hx, y));
                if lhs == fx {
                    out.push(y);
                }
            }
        }
        out
    }
}
