//! Hyperelliptic curve models over Q_p, residue-disk point parametrization,
//! and the even-to-odd-degree model change.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::padic::Padic;
use crate::padic_poly::{hensel_lift_univariate, resultant_int, vp_bigint, PadicPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ModelFlavor {
    RegularModelChart,
    OddDegree,
    EvenDegree,
}

/// A hyperelliptic model y^2 + h(x) y = f(x).
#[derive(Clone, Debug)]
pub struct HyperellipticModel {
    pub p: u64,
    pub h: PadicPoly,
    pub f: PadicPoly,
    pub genus: usize,
    pub flavor: ModelFlavor,
}

impl HyperellipticModel {
    pub fn new(p: u64, h: PadicPoly, f: PadicPoly, genus: usize, flavor: ModelFlavor) -> Result<Self> {
        let m = HyperellipticModel { p, h, f, genus, flavor };
        if m.flavor == ModelFlavor::OddDegree {
            if !m.h.is_zero() || m.f.degree() != Some(2 * genus + 1) {
                return Err(Error::InvariantViolation(
                    "odd-degree flavor needs h = 0 and deg f = 2g+1".into(),
                ));
            }
        }
        Ok(m)
    }

    pub fn from_integer_polys(
        p: u64,
        h: &[i64],
        f: &[i64],
        genus: usize,
        flavor: ModelFlavor,
    ) -> Result<Self> {
        HyperellipticModel::new(
            p,
            PadicPoly::from_integers(p, h),
            PadicPoly::from_integers(p, f),
            genus,
            flavor,
        )
    }

    /// The curve equation evaluated at a point: y^2 + h(x) y - f(x).
    pub fn equation(&self, x: &Padic, y: &Padic) -> Padic {
        y.mul(y).add(&self.h.evaluate(x).mul(y)).sub(&self.f.evaluate(x))
    }

    pub fn on_curve(&self, pt: &CurvePoint) -> bool {
        match pt.infinity {
            Some(_) => true,
            None => self.equation(&pt.x, &pt.y).is_zero_at_prec(),
        }
    }

    /// 2y + h(x): unit iff the point is in a non-ramified residue disk.
    pub fn vertical_derivative(&self, x: &Padic, y: &Padic) -> Padic {
        y.add(y).add(&self.h.evaluate(x))
    }

    /// Hyperelliptic involution (x, y) -> (x, -y - h(x)).
    pub fn involute(&self, pt: &CurvePoint) -> CurvePoint {
        match pt.infinity {
            Some(s) => CurvePoint::infinity(self.p, -s),
            None => CurvePoint::affine(pt.x.clone(), pt.y.neg().sub(&self.h.evaluate(&pt.x))),
        }
    }

    /// v_p of the discriminant of 4f + h^2 (integer models only); a good
    /// prime must not divide it.
    pub fn discriminant_valuation(&self) -> Result<u64> {
        let to_big = |poly: &PadicPoly| -> Result<Vec<BigInt>> {
            poly.coeffs
                .iter()
                .map(|c| {
                    let k = 40;
                    let r = c.residue(k)?;
                    // interpret as signed representative
                    let m = BigInt::from(r);
                    let half = BigInt::from(7u64).pow(20);
                    Ok(if m.magnitude() > half.magnitude() { m - BigInt::from(self.p).pow(k as u32) } else { m })
                })
                .collect()
        };
        let h = to_big(&self.h)?;
        let f = to_big(&self.f)?;
        // g = 4f + h^2
        let mut g = vec![BigInt::from(0); (2 * f.len()).max(2 * h.len().max(1))];
        for (i, c) in f.iter().enumerate() {
            g[i] += 4 * c;
        }
        for (i, a) in h.iter().enumerate() {
            for (j, b) in h.iter().enumerate() {
                let prod = a * b;
                g[i + j] += prod;
            }
        }
        while g.len() > 1 && g.last().map_or(false, num_traits::Zero::is_zero) {
            g.pop();
        }
        let dg: Vec<BigInt> = g
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect();
        let res = resultant_int(&g, &dg);
        vp_bigint(self.p, &res).ok_or_else(|| {
            Error::InvariantViolation("discriminant resultant vanished".into())
        })
    }
}

/// A point of the curve; `infinity` carries the branch sign on even-degree
/// or regular models (+1 for the branch with y/x^(g+1) -> top root).
#[derive(Clone, Debug)]
pub struct CurvePoint {
    pub x: Padic,
    pub y: Padic,
    pub infinity: Option<i32>,
}

impl CurvePoint {
    pub fn affine(x: Padic, y: Padic) -> CurvePoint {
        CurvePoint { x, y, infinity: None }
    }

    pub fn infinity(p: u64, sign: i32) -> CurvePoint {
        CurvePoint { x: Padic::zero(p), y: Padic::zero(p), infinity: Some(sign) }
    }

    pub fn from_integers(p: u64, x: i64, y: i64) -> CurvePoint {
        CurvePoint::affine(Padic::from_integer(p, x), Padic::from_integer(p, y))
    }

    pub fn is_infinity(&self) -> bool {
        self.infinity.is_some()
    }

    /// Agreement at shared precision, used for fixture matching.
    pub fn agrees_with(&self, other: &CurvePoint) -> bool {
        match (self.infinity, other.infinity) {
            (Some(a), Some(b)) => a == b,
            (None, None) => self.x.agrees_with(&other.x) && self.y.agrees_with(&other.y),
            _ => false,
        }
    }
}

/// The unique point mod p^k in the residue disk of `center` with
/// x = x(center) + p*nu; y recovered by Hensel on the curve equation.
pub fn disk_point(
    model: &HyperellipticModel,
    center: (u64, u64),
    nu: &Padic,
    k: i64,
) -> Result<CurvePoint> {
    let p = model.p;
    let (x0, y0) = center;
    // ramification check at the center
    let twoy_h = model
        .vertical_derivative(&Padic::from_integer(p, x0 as i64), &Padic::from_integer(p, y0 as i64))
        .truncate(1);
    if twoy_h.is_zero_at_prec() {
        return Err(Error::RamifiedDisk);
    }
    let x = Padic::from_integer(p, x0 as i64).add(&nu.shift_valuation(1)).truncate(k);
    // solve Y^2 + h(x) Y - f(x) = 0, Y ≡ y0 mod p, by Hensel in one variable
    let hx = model.h.evaluate(&x).truncate(k);
    let fx = model.f.evaluate(&x).truncate(k);
    let poly = PadicPoly::new(p, vec![fx.neg(), hx, Padic::one(p)]);
    let y = hensel_lift_univariate(&poly, y0 % p, k)?;
    Ok(CurvePoint::affine(x, y))
}

/// Data of the even-to-odd model change
/// (x, y) -> (c0 x/(x - beta), beta^3 y/(x - beta)^3).
#[derive(Clone, Debug)]
pub struct OddModelChange {
    pub p: u64,
    /// root of the even-model sextic
    pub beta: Padic,
    /// fifth root of beta * g'(beta)
    pub c0: Padic,
    /// the odd-degree model y^2 = F(x), monic of degree 2g+1
    pub odd: HyperellipticModel,
    /// the even model y^2 = g(x) it came from
    pub even: HyperellipticModel,
    /// h of the regular chart whose completion of the square gives the even model
    pub regular_h: PadicPoly,
}

impl OddModelChange {
    /// Build the model change from the even model y^2 = g(x) (g monic of
    /// degree 2g+2) given mod-p residues of beta and c0, to precision `k`.
    pub fn new(
        even: &HyperellipticModel,
        regular_h: &PadicPoly,
        beta_residue: u64,
        c0_residue: u64,
        k: i64,
    ) -> Result<OddModelChange> {
        let p = even.p;
        let g = &even.f;
        let beta = hensel_lift_univariate(g, beta_residue, k)?;
        let gp = g.derivative();
        let lead = beta.mul(&gp.evaluate(&beta));
        // c0^5 = beta * g'(beta)
        let c0_poly = PadicPoly::new(
            p,
            vec![
                lead.neg(),
                Padic::zero(p),
                Padic::zero(p),
                Padic::zero(p),
                Padic::zero(p),
                Padic::one(p),
            ],
        );
        let c0 = hensel_lift_univariate(&c0_poly, c0_residue, k).map_err(|e| match e {
            Error::NoRoot | Error::SingularRoot => Error::NoFifthRoot,
            other => other,
        })?;
        // F(x) = g(beta x / (x - c0)) (x - c0)^6 / c0^6, monic degree 5
        let deg = g.degree().unwrap();
        let mut acc = PadicPoly::zero(p);
        let x_minus_c0 = PadicPoly::new(p, vec![c0.neg(), Padic::one(p)]);
        for (i, gi) in g.coeffs.iter().enumerate() {
            // g_i beta^i x^i (x - c0)^(deg - i)
            let mut t = PadicPoly::constant(gi.mul(&beta.pow(i as u64)));
            for _ in 0..(deg - i) {
                t = t.mul(&x_minus_c0);
            }
            for _ in 0..i {
                t = t.shift_x();
            }
            acc = acc.add(&t);
        }
        let c0d_inv = c0.pow(deg as u64).invert()?;
        let f_odd = acc.scale(&c0d_inv).truncate(k);
        let mut coeffs = f_odd.coeffs.clone();
        // the degree-(2g+2) coefficient vanishes identically; trim to 2g+1
        if coeffs.len() > 2 * even.genus + 2 {
            coeffs.truncate(2 * even.genus + 2);
        }
        let odd = HyperellipticModel::new(
            p,
            PadicPoly::zero(p),
            PadicPoly::new(p, coeffs),
            even.genus,
            ModelFlavor::OddDegree,
        )?;
        Ok(OddModelChange {
            p,
            beta,
            c0,
            odd,
            even: even.clone(),
            regular_h: regular_h.clone(),
        })
    }

    /// Regular chart (y^2 + h y = f) to the even model (v = 2y + h(x)).
    pub fn regular_to_even(&self, pt: &CurvePoint) -> CurvePoint {
        match pt.infinity {
            Some(s) => CurvePoint::infinity(self.p, s),
            None => {
                let v = pt.y.add(&pt.y).add(&self.regular_h.evaluate(&pt.x));
                CurvePoint::affine(pt.x.clone(), v)
            }
        }
    }

    /// Even model to the odd-degree model. Even-model points at infinity map
    /// to the finite points (c0, ±beta^3); x = beta is the pole.
    pub fn even_to_odd(&self, pt: &CurvePoint) -> Result<CurvePoint> {
        match pt.infinity {
            Some(s) => {
                let b3 = self.beta.pow(3);
                let y = if s >= 0 { b3 } else { b3.neg() };
                Ok(CurvePoint::affine(self.c0.clone(), y))
            }
            None => {
                let d = pt.x.sub(&self.beta);
                if d.is_zero_at_prec() || d.valuation().map_or(false, |v| v > 0) {
                    return Err(Error::PoleAtBeta);
                }
                let dinv = d.invert()?;
                let x = self.c0.mul(&pt.x).mul(&dinv);
                let y = self.beta.pow(3).mul(&pt.y).mul(&dinv.pow(3));
                Ok(CurvePoint::affine(x, y))
            }
        }
    }

    pub fn regular_to_odd(&self, pt: &CurvePoint) -> Result<CurvePoint> {
        self.even_to_odd(&self.regular_to_even(pt))
    }
}

/// Change a point of the even model to the odd-degree model (spec-level
/// convenience wrapper).
pub fn change_model_odd_degree(change: &OddModelChange, pt: &CurvePoint) -> Result<CurvePoint> {
    change.even_to_odd(pt)
}
