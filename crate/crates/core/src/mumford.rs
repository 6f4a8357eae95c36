//! Mumford representation of divisors on a hyperelliptic curve and the
//! compose/reduce group law, keeping track of the rational functions that
//! witness every linear equivalence introduced along the way.

use crate::curve::{CurvePoint, HyperellipticModel};
use crate::error::{Error, Result};
use crate::padic::Padic;
use crate::padic_poly::{poly_roots_qp, PadicPoly, SplitOutcome};

/// A divisor `eff(u, v) + base_multiple * infinity` where `eff(u, v)` is the
/// effective affine divisor cut out by `u(x) = 0, y = v(x)`. For a plain
/// degree-0 Jacobian class take `base_multiple = -deg u`; the pipeline also
/// carries purely effective parts with `base_multiple = 0`.
#[derive(Clone, Debug)]
pub struct MumfordDivisor {
    pub u: PadicPoly,
    pub v: PadicPoly,
    pub base_multiple: i64,
}

impl MumfordDivisor {
    pub fn new(u: PadicPoly, v: PadicPoly, base_multiple: i64) -> Result<MumfordDivisor> {
        let u = u.monic()?;
        let v = if v.degree().map_or(false, |dv| Some(dv) >= u.degree()) {
            v.rem(&u)?
        } else {
            v
        };
        Ok(MumfordDivisor { u, v, base_multiple })
    }

    pub fn neutral(p: u64) -> MumfordDivisor {
        MumfordDivisor { u: PadicPoly::one(p), v: PadicPoly::zero(p), base_multiple: 0 }
    }

    pub fn degree(&self) -> usize {
        self.u.degree().unwrap_or(0)
    }

    pub fn is_neutral(&self) -> bool {
        self.degree() == 0
    }

    /// The defining invariant: u | v^2 + h v - f.
    pub fn check_invariant(&self, model: &HyperellipticModel) -> Result<()> {
        let expr = self
            .v
            .mul(&self.v)
            .add(&model.h.mul(&self.v))
            .sub(&model.f);
        let rem = expr.rem(&self.u)?;
        if rem.is_zero() {
            Ok(())
        } else {
            Err(Error::InvariantViolation(format!(
                "u does not divide v^2 + hv - f (remainder degree {:?})",
                rem.degree()
            )))
        }
    }
}

/// A rational function `(a(x) + b(x) y) / den(x)` on the curve. Closed under
/// multiplication via the curve relation `y^2 = f - h y`.
#[derive(Clone, Debug)]
pub struct TrackedFunction {
    pub num_a: PadicPoly,
    pub num_b: PadicPoly,
    pub den: PadicPoly,
}

impl TrackedFunction {
    pub fn one(p: u64) -> TrackedFunction {
        TrackedFunction {
            num_a: PadicPoly::one(p),
            num_b: PadicPoly::zero(p),
            den: PadicPoly::one(p),
        }
    }

    pub fn from_x_poly(d: PadicPoly) -> TrackedFunction {
        let p = d.p;
        TrackedFunction { num_a: d, num_b: PadicPoly::zero(p), den: PadicPoly::one(p) }
    }

    /// The reduction-step function (y - v(x)) / u'(x).
    pub fn reduction_step(v: &PadicPoly, u_next: &PadicPoly) -> TrackedFunction {
        let p = v.p;
        TrackedFunction {
            num_a: v.neg(),
            num_b: PadicPoly::one(p),
            den: u_next.clone(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.num_b.is_zero()
            && self.num_a.degree() == Some(0)
            && self.den.degree() == Some(0)
            && self.num_a.coeff(0).agrees_with(&self.den.coeff(0))
    }

    /// Product, reducing y^2 via the model equation.
    pub fn mul(&self, other: &TrackedFunction, model: &HyperellipticModel) -> TrackedFunction {
        let a1 = &self.num_a;
        let b1 = &self.num_b;
        let a2 = &other.num_a;
        let b2 = &other.num_b;
        // (a1 + b1 y)(a2 + b2 y) = a1 a2 + b1 b2 f + (a1 b2 + a2 b1 - b1 b2 h) y
        let bb = b1.mul(b2);
        let num_a = a1.mul(a2).add(&bb.mul(&model.f));
        let num_b = a1.mul(b2).add(&a2.mul(b1)).sub(&bb.mul(&model.h));
        TrackedFunction { num_a, num_b, den: self.den.mul(&other.den) }
    }

    /// Evaluate at an affine point, working modulo p^k. Falls back to a
    /// local power-series expansion when the direct evaluation is 0/0 (the
    /// function is still regular or has a detectable zero/pole there).
    pub fn evaluate(&self, pt: &CurvePoint, model: &HyperellipticModel, k: i64) -> Result<Padic> {
        if pt.is_infinity() {
            return Err(Error::BadEvaluation(
                "tracked functions are evaluated at affine points only".into(),
            ));
        }
        let num = self.num_a.evaluate(&pt.x).add(&self.num_b.evaluate(&pt.x).mul(&pt.y));
        let den = self.den.evaluate(&pt.x);
        match (num.is_zero_at_prec(), den.is_zero_at_prec()) {
            (false, false) => num.truncate(k + den.valuation().unwrap_or(0).max(0)).div(&den),
            (true, false) => Ok(num.div(&den.truncate(k))?),
            _ => self.evaluate_by_series(pt, model, k),
        }
    }

    fn evaluate_by_series(
        &self,
        pt: &CurvePoint,
        model: &HyperellipticModel,
        k: i64,
    ) -> Result<Padic> {
        let p = pt.x.prime();
        // cap the working precision so series inversions are well defined
        let pt = CurvePoint::affine(pt.x.truncate(k + 4), pt.y.truncate(k + 4));
        let pt = &pt;
        let len = self.den.degree().unwrap_or(0).max(self.num_a.degree().unwrap_or(0)) + 4;
        // y(t) around (x0, y0) with local parameter t = x - x0; requires a
        // non-ramified point
        let dv = model.vertical_derivative(&pt.x, &pt.y);
        if dv.truncate(1).is_zero_at_prec() {
            return Err(Error::BadEvaluation(
                "series evaluation at a ramified point is not supported".into(),
            ));
        }
        let yser = curve_y_series(model, pt, len)?;
        let num = series_poly_shift(&self.num_a, &pt.x, len).add(
            &series_poly_shift(&self.num_b, &pt.x, len).mul(&yser),
        );
        let den = series_poly_shift(&self.den, &pt.x, len);
        let a = num.order();
        let b = den.order();
        match (a, b) {
            (Some(a), Some(b)) => {
                use std::cmp::Ordering;
                match a.cmp(&b) {
                    Ordering::Greater => Ok(Padic::zero_mod(p, 1)),
                    Ordering::Less => Err(Error::PoleHit),
                    Ordering::Equal => num.coeffs[a].div(&den.coeffs[b]),
                }
            }
            _ => Err(Error::PrecisionExhausted(
                "series expansion vanished identically at working precision".into(),
            )),
        }
    }

    /// Evaluate on a signed point divisor, returning the product of the
    /// values with sign multiplicities. Errors if any point is a zero or
    /// pole of the function.
    pub fn evaluate_divisor(
        &self,
        points: &[(CurvePoint, i64)],
        model: &HyperellipticModel,
        k: i64,
    ) -> Result<Padic> {
        let p = model.p;
        let mut acc = Padic::one(p);
        for (pt, mult) in points {
            let v = self.evaluate(pt, model, k)?;
            if v.is_zero_at_prec() {
                return Err(Error::PoleHit);
            }
            let e = mult.unsigned_abs();
            let pw = v.pow(e);
            if *mult >= 0 {
                acc = acc.mul(&pw);
            } else {
                acc = acc.div(&pw)?;
            }
        }
        Ok(acc)
    }
}

/// Truncated power series over Q_p with capped coefficients.
#[derive(Clone, Debug)]
struct Series {
    p: u64,
    coeffs: Vec<Padic>,
}

impl Series {
    fn constant(c: Padic, len: usize) -> Series {
        let p = c.prime();
        let mut coeffs = vec![Padic::zero(p); len];
        coeffs[0] = c;
        Series { p, coeffs }
    }

    fn len(&self) -> usize {
        self.coeffs.len()
    }

    fn add(&self, other: &Series) -> Series {
        let n = self.len().min(other.len());
        Series {
            p: self.p,
            coeffs: (0..n).map(|i| self.coeffs[i].add(&other.coeffs[i])).collect(),
        }
    }

    fn sub(&self, other: &Series) -> Series {
        let n = self.len().min(other.len());
        Series {
            p: self.p,
            coeffs: (0..n).map(|i| self.coeffs[i].sub(&other.coeffs[i])).collect(),
        }
    }

    fn mul(&self, other: &Series) -> Series {
        let n = self.len().min(other.len());
        let mut coeffs = vec![Padic::zero(self.p); n];
        for i in 0..n {
            for j in 0..n - i {
                let t = self.coeffs[i].mul(&other.coeffs[j]);
                coeffs[i + j] = coeffs[i + j].add(&t);
            }
        }
        Series { p: self.p, coeffs }
    }

    /// Multiplicative inverse; needs a unit constant term.
    fn invert(&self) -> Result<Series> {
        let c0 = self.coeffs[0].invert()?;
        let mut inv = vec![Padic::zero(self.p); self.len()];
        inv[0] = c0.clone();
        for i in 1..self.len() {
            let mut s = Padic::zero(self.p);
            for j in 1..=i {
                s = s.add(&self.coeffs[j].mul(&inv[i - j]));
            }
            inv[i] = s.neg().mul(&c0);
        }
        Ok(Series { p: self.p, coeffs: inv })
    }

    /// Index of the first coefficient that is nonzero at its precision.
    fn order(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero_at_prec())
    }
}

/// poly(x0 + t) as a series in t.
fn series_poly_shift(poly: &PadicPoly, x0: &Padic, len: usize) -> Series {
    let p = x0.prime();
    let mut acc = Series::constant(Padic::zero(p), len);
    // Horner on the series x0 + t
    let mut xt = Series::constant(x0.clone(), len);
    if len > 1 {
        xt.coeffs[1] = Padic::one(p);
    }
    for c in poly.coeffs.iter().rev() {
        acc = acc.mul(&xt).add(&Series::constant(c.clone(), len));
    }
    acc
}

/// The branch y(t) of the curve over x = x0 + t with y(0) = y0.
fn curve_y_series(model: &HyperellipticModel, pt: &CurvePoint, len: usize) -> Result<Series> {
    let h = series_poly_shift(&model.h, &pt.x, len);
    let f = series_poly_shift(&model.f, &pt.x, len);
    let mut y = Series::constant(pt.y.clone(), len);
    for _ in 0..len + 2 {
        // Newton: y -= (y^2 + h y - f)/(2y + h)
        let val = y.mul(&y).add(&h.mul(&y)).sub(&f);
        let deriv = y.add(&y).add(&h);
        let corr = val.mul(&deriv.invert()?);
        y = y.sub(&corr);
    }
    Ok(y)
}

/// Cantor composition: a semi-reduced Mumford pair for D1 + D2 together with
/// the cancelled-part function d(x).
pub fn cantor_compose(
    model: &HyperellipticModel,
    d1: &MumfordDivisor,
    d2: &MumfordDivisor,
) -> Result<(MumfordDivisor, TrackedFunction)> {
    let p = model.p;
    if d1.is_neutral() {
        return Ok((
            MumfordDivisor {
                u: d2.u.clone(),
                v: d2.v.clone(),
                base_multiple: d1.base_multiple + d2.base_multiple,
            },
            TrackedFunction::one(p),
        ));
    }
    if d2.is_neutral() {
        return Ok((
            MumfordDivisor {
                u: d1.u.clone(),
                v: d1.v.clone(),
                base_multiple: d1.base_multiple + d2.base_multiple,
            },
            TrackedFunction::one(p),
        ));
    }
    let (g1, e1, e2) = d1.u.xgcd(&d2.u)?;
    let s = d1.v.add(&d2.v).add(&model.h);
    let (d_raw, c1, c2) = g1.xgcd(&s)?;
    // normalize so that c1*g1 + c2*(v1+v2+h) = d with d monic
    let lc_inv = d_raw
        .leading()
        .ok_or(Error::DivisionByZero)?
        .invert()?;
    let d = d_raw.scale(&lc_inv);
    let c1 = c1.scale(&lc_inv);
    let c2 = c2.scale(&lc_inv);
    let s1 = c1.mul(&e1);
    let s2 = c1.mul(&e2);
    let s3 = c2;
    let dd = d.mul(&d);
    let (u3, rem_u) = d1.u.mul(&d2.u).div_rem(&dd)?;
    if !rem_u.is_zero() {
        return Err(Error::PrecisionExhausted("u1 u2 not divisible by d^2".into()));
    }
    let num = s1
        .mul(&d1.u)
        .mul(&d2.v)
        .add(&s2.mul(&d2.u).mul(&d1.v))
        .add(&s3.mul(&d1.v.mul(&d2.v).add(&model.f)));
    let (num_div, rem_n) = num.div_rem(&d)?;
    if !rem_n.is_zero() {
        return Err(Error::PrecisionExhausted("composition numerator not divisible by d".into()));
    }
    let v3 = num_div.rem(&u3)?;
    let out = MumfordDivisor {
        u: u3.monic()?,
        v: v3,
        base_multiple: d1.base_multiple + d2.base_multiple + 2 * d.degree().unwrap_or(0) as i64,
    };
    debug_assert!(out.check_invariant(model).is_ok());
    let func = if d.degree() == Some(0) {
        TrackedFunction::one(p)
    } else {
        TrackedFunction::from_x_poly(d)
    };
    Ok((out, func))
}

/// Cantor reduction: bring a semi-reduced pair to degree at most g, with the
/// product of the (y - v)/u' step functions.
pub fn cantor_reduce(
    model: &HyperellipticModel,
    d: &MumfordDivisor,
) -> Result<(MumfordDivisor, TrackedFunction)> {
    let mut u = d.u.clone();
    let mut v = d.v.clone();
    let mut base = d.base_multiple;
    let mut func = TrackedFunction::one(model.p);
    while u.degree().map_or(false, |du| du > model.genus) {
        // u' = (f - v h - v^2)/u, monic; v' = (-h - v) mod u'
        let num = model.f.sub(&v.mul(&model.h)).sub(&v.mul(&v));
        let (quot, rem) = num.div_rem(&u)?;
        if !rem.is_zero() {
            return Err(Error::InvariantViolation("input is not semi-reduced".into()));
        }
        let u_next = quot.monic()?;
        let v_next = model.h.neg().sub(&v).rem(&u_next)?;
        func = func.mul(&TrackedFunction::reduction_step(&v, &u_next), model);
        base += u.degree().unwrap() as i64 - u_next.degree().unwrap_or(0) as i64;
        u = u_next;
        v = v_next;
    }
    let out = MumfordDivisor { u, v, base_multiple: base };
    debug_assert!(out.check_invariant(model).is_ok());
    Ok((out, func))
}

/// Reduced Mumford pair for n*D and the accumulated function s_n with
/// n*D = (result as divisor) + Div(s_n).
pub fn divisor_multiple(
    model: &HyperellipticModel,
    d: &MumfordDivisor,
    n: usize,
) -> Result<(MumfordDivisor, TrackedFunction)> {
    if n == 0 {
        return Ok((MumfordDivisor::neutral(model.p), TrackedFunction::one(model.p)));
    }
    let (base, s_base) = cantor_reduce(model, d)?;
    let mut acc = base.clone();
    let mut s = s_base.clone();
    for _ in 1..n {
        let (comp, s_comp) = cantor_compose(model, &acc, &base)?;
        let (red, s_red) = cantor_reduce(model, &comp)?;
        acc = red;
        s = s.mul(&s_base, model).mul(&s_comp, model).mul(&s_red, model);
    }
    Ok((acc, s))
}

/// A divisor split into affine points plus a multiple of infinity.
#[derive(Clone, Debug)]
pub struct SplitDivisor {
    pub points: Vec<(CurvePoint, i64)>,
    pub infinity_mult: i64,
}

/// Split a Mumford divisor into points when its u-polynomial factors over
/// Q_p into distinct linear factors mod p.
pub fn split_divisor(
    _model: &HyperellipticModel,
    d: &MumfordDivisor,
    k: i64,
) -> Result<Option<SplitDivisor>> {
    if d.is_neutral() {
        return Ok(Some(SplitDivisor { points: vec![], infinity_mult: d.base_multiple }));
    }
    match poly_roots_qp(&d.u, k)? {
        SplitOutcome::NotSplit => Ok(None),
        SplitOutcome::Roots(roots) => {
            let mut points = vec![];
            for r in roots {
                let y = d.v.evaluate(&r).truncate(k);
                points.push((CurvePoint::affine(r, y), 1i64));
            }
            Ok(Some(SplitDivisor { points, infinity_mult: d.base_multiple }))
        }
    }
}
