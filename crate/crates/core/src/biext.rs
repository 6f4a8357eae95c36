//! The trivial biextension: points stored as (log-vector, log-vector,
//! height), the two partial group laws, the Q_ij construction from height
//! fixtures, and the polynomial parametrization of the closure of the
//! integral torsor points over a residue disk.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::heights::HeightTable;
use crate::mw::{mw_apply_endo, EndoData, MWVector};
use crate::padic::Padic;
use crate::zq::{MultiPoly, Zq};

/// Which leg of the biextension a group operation moves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leg {
    First,
    Second,
}

/// A point of J(Q_p) x J(Q_p) x Q_p in logarithm coordinates.
#[derive(Clone, Debug)]
pub struct BiextPoint {
    pub log_d: Vec<Padic>,
    pub log_e: Vec<Padic>,
    pub height: Padic,
}

impl BiextPoint {
    pub fn genus_dim(&self) -> usize {
        self.log_d.len()
    }

    fn legs_agree(a: &[Padic], b: &[Padic]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.agrees_with(y))
    }
}

/// Partial group law: add on the moving leg and on the height, carrying the
/// fixed leg through. The fixed legs must agree at shared precision.
pub fn biext_add(a: &BiextPoint, b: &BiextPoint, leg: Leg) -> Result<BiextPoint> {
    match leg {
        Leg::First => {
            if !BiextPoint::legs_agree(&a.log_e, &b.log_e) {
                return Err(Error::LegMismatch);
            }
            Ok(BiextPoint {
                log_d: a.log_d.iter().zip(&b.log_d).map(|(x, y)| x.add(y)).collect(),
                log_e: a.log_e.clone(),
                height: a.height.add(&b.height),
            })
        }
        Leg::Second => {
            if !BiextPoint::legs_agree(&a.log_d, &b.log_d) {
                return Err(Error::LegMismatch);
            }
            Ok(BiextPoint {
                log_d: a.log_d.clone(),
                log_e: a.log_e.iter().zip(&b.log_e).map(|(x, y)| x.add(y)).collect(),
                height: a.height.add(&b.height),
            })
        }
    }
}

/// n-fold addition on one leg: the moving log vector and the height scale
/// linearly, the fixed leg is carried through.
pub fn scalar_leg(a: &BiextPoint, n: i64, leg: Leg) -> BiextPoint {
    let p = a.height.prime();
    let c = Padic::from_integer(p, n);
    match leg {
        Leg::First => BiextPoint {
            log_d: a.log_d.iter().map(|x| x.mul(&c)).collect(),
            log_e: a.log_e.clone(),
            height: a.height.mul(&c),
        },
        Leg::Second => BiextPoint {
            log_d: a.log_d.clone(),
            log_e: a.log_e.iter().map(|x| x.mul(&c)).collect(),
            height: a.height.mul(&c),
        },
    }
}

/// Everything needed to parametrize the integral points of the torsor over
/// one residue disk.
#[derive(Clone, Debug)]
pub struct KappaContext {
    pub p: u64,
    pub genus: usize,
    pub rank: usize,
    /// number of Mordell-Weil generators (r' >= r)
    pub rprime: usize,
    /// generator labels, e.g. ["G1", "G2"], indexing logs and height pairs
    pub labels: Vec<String>,
    /// coordinates of the disk's base integral point
    pub e_base: Vec<i64>,
    /// rows = kernel-of-reduction basis in generator coordinates
    pub e_kernel: Vec<Vec<i64>>,
    /// one endomorphism per extra torsor factor, with labels parallel to
    /// `endo_labels`
    pub endos: Vec<EndoData>,
    pub endo_labels: Vec<String>,
    /// Coleman logarithms of the generators, each a g-vector
    pub logs: BTreeMap<String, Vec<Padic>>,
    pub table: HeightTable,
    /// first-g normalization offsets (the log of the chosen base section)
    pub log_offset: Vec<Padic>,
    /// height normalization offset per endomorphism
    pub psi_offset: Vec<Padic>,
}

impl KappaContext {
    pub fn rho(&self) -> usize {
        self.endos.len() + 1
    }

    fn log_of(&self, label: &str) -> Result<&Vec<Padic>> {
        self.logs
            .get(label)
            .ok_or_else(|| Error::MissingFixture(format!("log vector for {label}")))
    }

    /// log of a Mordell-Weil combination.
    pub fn log_combination(&self, v: &MWVector) -> Result<Vec<Padic>> {
        let mut acc = vec![Padic::zero(self.p); self.genus];
        for (i, label) in self.labels.iter().enumerate() {
            if v.0[i] == 0 {
                continue;
            }
            let lg = self.log_of(label)?;
            let c = Padic::from_integer(self.p, v.0[i]);
            for (a, l) in acc.iter_mut().zip(lg) {
                *a = a.add(&l.mul(&c));
            }
        }
        Ok(acc)
    }

    /// h(D, f(E)) + t h(D, c) by expansion in the fixture table.
    pub fn pair_height(
        &self,
        d: &MWVector,
        e: &MWVector,
        c_mult: i64,
        endo_idx: usize,
        prec: i64,
    ) -> Result<Padic> {
        crate::heights::global_height(
            self.p,
            d,
            e,
            c_mult,
            self.endos[endo_idx].m,
            &self.table,
            &self.labels,
            &self.endo_labels[endo_idx],
            &[],
            prec,
        )
    }
}

/// Q_ij: the biextension image of the generating section over
/// (G_i, f(G_j)); j = 0 encodes the rigidifying point c.
pub fn build_qij(ctx: &KappaContext, endo_idx: usize, i: usize, j: usize, prec: i64) -> Result<BiextPoint> {
    let rp = ctx.rprime;
    if i == 0 || i > rp || j > rp {
        return Err(Error::DimensionMismatch(format!("Q_{i}{j} out of range")));
    }
    let mut gi = MWVector::zero(rp);
    gi.0[i - 1] = 1;
    let log_d = ctx.log_combination(&gi)?;
    let endo = &ctx.endos[endo_idx];
    // the m-scaling belongs to the downstream combinations, not to Q_ij
    let unscaled = |e: &MWVector, c_mult: i64| {
        crate::heights::global_height(
            ctx.p,
            &gi,
            e,
            c_mult,
            1,
            &ctx.table,
            &ctx.labels,
            &ctx.endo_labels[endo_idx],
            &[],
            prec,
        )
    };
    let (log_e, height) = if j == 0 {
        let log_c = ctx.log_combination(&endo.c)?;
        let h = unscaled(&MWVector::zero(rp), 1)?;
        (log_c, h)
    } else {
        let mut gj = MWVector::zero(rp);
        gj.0[j - 1] = 1;
        let fgj = mw_apply_endo(endo, &gj)?;
        let log_e = ctx.log_combination(&fgj)?;
        let h = unscaled(&gj, 0)?;
        (log_e, h)
    };
    Ok(BiextPoint { log_d, log_e, height })
}

/// The generating sections over the kernel-of-reduction basis: P_ij over
/// (Gt_i, f(m Gt_j)), R_it over (Gt_i, alpha(G_t)), S_tj over
/// (G_t, f(m Gt_j)), all assembled with the two group laws.
pub struct PrsPoints {
    pub p_ij: Vec<Vec<BiextPoint>>,
    pub r_it: Vec<BiextPoint>,
    pub s_tj: Vec<BiextPoint>,
}

pub fn build_prs(ctx: &KappaContext, endo_idx: usize, prec: i64) -> Result<PrsPoints> {
    let r = ctx.rank;
    let rp = ctx.rprime;
    let m = ctx.endos[endo_idx].m;
    let q = |i: usize, j: usize| build_qij(ctx, endo_idx, i, j, prec);
    // inner_second(i, weights, c_mult) = sum_2 over l of m*weights[l] ._2 Q_{i l}
    // plus optionally m ._2 Q_{i 0}
    let inner = |i: usize, weights: &[i64], c_mult: i64| -> Result<BiextPoint> {
        let mut acc: Option<BiextPoint> = None;
        for (l, &w) in weights.iter().enumerate() {
            if w == 0 {
                continue;
            }
            let t = scalar_leg(&q(i, l + 1)?, m * w, Leg::Second);
            acc = Some(match acc {
                None => t,
                Some(a) => biext_add(&a, &t, Leg::Second)?,
            });
        }
        if c_mult != 0 {
            let t = scalar_leg(&q(i, 0)?, m * c_mult, Leg::Second);
            acc = Some(match acc {
                None => t,
                Some(a) => biext_add(&a, &t, Leg::Second)?,
            });
        }
        match acc {
            Some(a) => Ok(a),
            None => {
                // neutral on the second leg over G_i
                let mut gi = MWVector::zero(rp);
                gi.0[i - 1] = 1;
                Ok(BiextPoint {
                    log_d: ctx.log_combination(&gi)?,
                    log_e: vec![Padic::zero_mod(ctx.p, prec); ctx.genus],
                    height: Padic::zero_mod(ctx.p, prec),
                })
            }
        }
    };
    // outer_first(row-weights, inner-result per k) = sum_1 over k
    let outer = |weights: &[i64], per_k: &dyn Fn(usize) -> Result<BiextPoint>| -> Result<BiextPoint> {
        let mut acc: Option<BiextPoint> = None;
        for (k, &w) in weights.iter().enumerate() {
            if w == 0 {
                continue;
            }
            let t = scalar_leg(&per_k(k + 1)?, w, Leg::First);
            acc = Some(match acc {
                None => t,
                Some(a) => biext_add(&a, &t, Leg::First)?,
            });
        }
        acc.ok_or_else(|| Error::DimensionMismatch("empty first-leg combination".into()))
    };
    let mut p_ij = vec![];
    for i in 0..r {
        let mut row = vec![];
        for j in 0..r {
            let ej = ctx.e_kernel[j].clone();
            let pij = outer(&ctx.e_kernel[i], &|k| inner(k, &ej, 0))?;
            row.push(pij);
        }
        p_ij.push(row);
    }
    let e0 = ctx.e_base.clone();
    let mut r_it = vec![];
    for i in 0..r {
        r_it.push(outer(&ctx.e_kernel[i], &|k| inner(k, &e0, 1))?);
    }
    let mut s_tj = vec![];
    for j in 0..r {
        let ej = ctx.e_kernel[j].clone();
        s_tj.push(outer(&ctx.e_base, &|k| inner(k, &ej, 0))?);
    }
    Ok(PrsPoints { p_ij, r_it, s_tj })
}

/// The biextension image of the integral point over
/// D = G_t + (p-1) sum n_i Gt_i for a concrete lattice vector n, built with
/// the partial group laws (the route used to cross-check the polynomial
/// expansion).
pub fn integral_point_at(
    ctx: &KappaContext,
    endo_idx: usize,
    n: &[i64],
    prec: i64,
) -> Result<BiextPoint> {
    let p = ctx.p;
    let rp = ctx.rprime;
    let m = ctx.endos[endo_idx].m;
    // a = e_base + (p-1) * n . e_kernel in generator coordinates
    let mut a = MWVector(ctx.e_base.clone());
    for (ni, row) in n.iter().zip(&ctx.e_kernel) {
        a = a.add(&MWVector(row.clone()).scale(ni * (p as i64 - 1)));
    }
    // z = sum_1 over i of a_i ._1 [ (sum_2 over j of a_j ._2 (m ._2 Q_ij)) +_2 (m ._2 Q_i0) ]
    let mut acc: Option<BiextPoint> = None;
    for i in 1..=rp {
        let mut inner: Option<BiextPoint> = None;
        for j in 1..=rp {
            if a.0[j - 1] == 0 {
                continue;
            }
            let t = scalar_leg(&build_qij(ctx, endo_idx, i, j, prec)?, m * a.0[j - 1], Leg::Second);
            inner = Some(match inner {
                None => t,
                Some(x) => biext_add(&x, &t, Leg::Second)?,
            });
        }
        let t0 = scalar_leg(&build_qij(ctx, endo_idx, i, 0, prec)?, m, Leg::Second);
        let inner = match inner {
            None => t0,
            Some(x) => biext_add(&x, &t0, Leg::Second)?,
        };
        let t = scalar_leg(&inner, a.0[i - 1], Leg::First);
        acc = Some(match acc {
            None => t,
            Some(x) => {
                // first-leg addition with differing second legs is only legal
                // here because every inner sum carries the same second leg
                biext_add(&x, &t, Leg::First)?
            }
        });
    }
    acc.ok_or_else(|| Error::DimensionMismatch("empty lattice combination".into()))
}

/// The polynomial parametrizations: kappa_z (values in the biextension) and
/// phi o kappa (after offset-and-divide by p). Variables are n_1..n_r.
#[derive(Clone, Debug)]
pub struct PolyMapKappa {
    /// g + g + 1 polynomials per endomorphism block ordering:
    /// first-leg logs (g), then per endo the second-leg logs (g) and height
    pub kappa_z_first: Vec<MultiPoly>,
    pub kappa_z_second: Vec<Vec<MultiPoly>>,
    pub kappa_z_height: Vec<MultiPoly>,
    /// phi o kappa: g linear polynomials then rho - 1 quadratics, mod p^k
    pub phi: Vec<MultiPoly>,
    pub k: u32,
}

/// Build kappa as explicit polynomials mod p^(k+1) (kappa_z) and p^k (phi),
/// verifying the polynomial expansion against the group-law construction on
/// a grid of lattice points.
pub fn kappa_poly(ctx: &KappaContext, k: u32) -> Result<PolyMapKappa> {
    let p = ctx.p;
    let r = ctx.rank;
    let kz = k + 1;
    let ring = Zq::new(p, kz);
    let prec = kz as i64;
    // a_i(n) = e_base_i + (p-1) sum_j n_j e_kernel[j][i], linear over Z
    let a_polys: Vec<MultiPoly> = (0..ctx.rprime)
        .map(|i| {
            let mut f = MultiPoly::constant(ring, r, ring.reduce_i64(ctx.e_base[i]));
            for (j, row) in ctx.e_kernel.iter().enumerate() {
                let c = ring.reduce_i64(row[i] * (p as i64 - 1));
                let term = MultiPoly::variable(ring, r, j).scale(c);
                f = f.add(&term);
            }
            f
        })
        .collect();
    // first-leg log: sum_i a_i(n) log(G_i), one polynomial per log coordinate
    let mut first = vec![MultiPoly::zero(ring, r); ctx.genus];
    for (i, label) in ctx.labels.iter().enumerate() {
        let lg = ctx.log_of(label)?;
        for (c, f) in lg.iter().zip(first.iter_mut()) {
            let coef = c.residue_u64(prec).map_err(|_| {
                Error::PrecisionExhausted(format!("log of {label} below precision {kz}"))
            })?;
            *f = f.add(&a_polys[i].scale(coef));
        }
    }
    let mut second_all = vec![];
    let mut height_all = vec![];
    for (e_idx, endo) in ctx.endos.iter().enumerate() {
        // F a(n) in generator coordinates, then logs, plus log c
        let m_red = ring.reduce_i64(endo.m);
        let fa: Vec<MultiPoly> = (0..ctx.rprime)
            .map(|out| {
                let mut f = MultiPoly::zero(ring, r);
                for (j, ap) in a_polys.iter().enumerate() {
                    let c = ring.reduce_i64(endo.mw_matrix[out][j]);
                    f = f.add(&ap.scale(c));
                }
                f
            })
            .collect();
        let log_c = ctx.log_combination(&endo.c)?;
        let mut second = vec![MultiPoly::zero(ring, r); ctx.genus];
        for (i, label) in ctx.labels.iter().enumerate() {
            let lg = ctx.log_of(label)?;
            for (c, f) in lg.iter().zip(second.iter_mut()) {
                let coef = c.residue_u64(prec)?;
                *f = f.add(&fa[i].scale(coef));
            }
        }
        for (cc, f) in log_c.iter().zip(second.iter_mut()) {
            *f = f.add(&MultiPoly::constant(ring, r, cc.residue_u64(prec)?));
        }
        let second: Vec<MultiPoly> = second.iter().map(|f| f.scale(m_red)).collect();
        // height: m [ sum_{ij} a_i a_j B_ij + sum_i a_i q_i ]
        let mut height = MultiPoly::zero(ring, r);
        for (i, li) in ctx.labels.iter().enumerate() {
            for (j, lj) in ctx.labels.iter().enumerate() {
                let b = ctx
                    .table
                    .get(li, &format!("{}({})", ctx.endo_labels[e_idx], lj))?
                    .residue_u64(prec)?;
                height = height.add(&a_polys[i].mul(&a_polys[j]).scale(b));
            }
            let q = ctx
                .table
                .get(li, &format!("c[{}]", ctx.endo_labels[e_idx]))?
                .residue_u64(prec)?;
            height = height.add(&a_polys[i].scale(q));
        }
        let height = height.scale(m_red);
        second_all.push(second);
        height_all.push(height);
    }
    // phi: subtract offsets and divide by p
    let mut phi = vec![];
    for (coord, f) in first.iter().enumerate() {
        let off = ctx.log_offset[coord].residue_u64(prec)?;
        let shifted = f.sub(&MultiPoly::constant(ring, r, off));
        phi.push(shifted.divide_by_p().map_err(|_| {
            Error::FitMismatch(format!("first-leg coordinate {coord} not divisible by p"))
        })?);
    }
    for (e_idx, h) in height_all.iter().enumerate() {
        let off = ctx.psi_offset[e_idx].residue_u64(prec)?;
        let shifted = h.sub(&MultiPoly::constant(ring, r, off));
        phi.push(shifted.divide_by_p().map_err(|_| {
            Error::FitMismatch("height coordinate not divisible by p".into())
        })?);
    }
    // degree-shape checks
    for (i, f) in phi.iter().enumerate() {
        if i < ctx.genus {
            if f.total_degree() > 1 || f.coeff(&vec![0; r]) != 0 {
                return Err(Error::FitMismatch(format!(
                    "first-leg phi coordinate {i} is not homogeneous linear"
                )));
            }
        } else if f.total_degree() > 2 {
            return Err(Error::FitMismatch(format!(
                "height phi coordinate {i} exceeds degree 2"
            )));
        }
    }
    let out = PolyMapKappa {
        kappa_z_first: first,
        kappa_z_second: second_all,
        kappa_z_height: height_all,
        phi,
        k,
    };
    verify_kappa_on_grid(ctx, &out, prec)?;
    Ok(out)
}

/// Cross-check the polynomial expansion against direct group-law evaluation
/// on lattice points outside the fitting construction.
fn verify_kappa_on_grid(ctx: &KappaContext, polys: &PolyMapKappa, prec: i64) -> Result<()> {
    let r = ctx.rank;
    let ring = polys.kappa_z_first[0].ring;
    let mut grid = vec![];
    for t in 0..20i64 {
        let mut n = vec![0i64; r];
        for (j, nj) in n.iter_mut().enumerate() {
            *nj = (t * (j as i64 + 2) + 3 * (t % 5) + j as i64) % 23 - 11;
        }
        grid.push(n);
    }
    for n in grid {
        let ns: Vec<u64> = n.iter().map(|&x| ring.reduce_i64(x)).collect();
        for (e_idx, _) in ctx.endos.iter().enumerate() {
            let direct = integral_point_at(ctx, e_idx, &n, prec)?;
            for (coord, f) in polys.kappa_z_first.iter().enumerate() {
                let want = direct.log_d[coord].residue_u64(prec)?;
                if f.evaluate(&ns) != want {
                    return Err(Error::FitMismatch(format!(
                        "first-leg coordinate {coord} disagrees with the group-law route at {n:?}"
                    )));
                }
            }
            for (coord, f) in polys.kappa_z_second[e_idx].iter().enumerate() {
                let want = direct.log_e[coord].residue_u64(prec)?;
                if f.evaluate(&ns) != want {
                    return Err(Error::FitMismatch(format!(
                        "second-leg coordinate {coord} disagrees with the group-law route at {n:?}"
                    )));
                }
            }
            let want = direct.height.residue_u64(prec)?;
            if polys.kappa_z_height[e_idx].evaluate(&ns) != want {
                return Err(Error::FitMismatch(format!(
                    "height disagrees with the group-law route at {n:?}"
                )));
            }
        }
    }
    Ok(())
}

/// phi of a biextension point: offset-and-divide by p on the first-leg logs
/// and the height coordinate.
pub fn phi(point: &BiextPoint, ctx: &KappaContext, endo_idx: usize, prec: i64) -> Result<Vec<Padic>> {
    let mut out = vec![];
    for (c, off) in point.log_d.iter().zip(&ctx.log_offset) {
        let d = c.sub(off);
        if !d.is_zero_at_prec() && d.valuation().map_or(false, |v| v < 1) {
            return Err(Error::NotInDisk);
        }
        out.push(d.divide_exact_power(1)?.truncate(prec));
    }
    let d = point.height.sub(&ctx.psi_offset[endo_idx]);
    if !d.is_zero_at_prec() && d.valuation().map_or(false, |v| v < 1) {
        return Err(Error::NotInDisk);
    }
    out.push(d.divide_exact_power(1)?.truncate(prec));
    Ok(out)
}

/// rho: h(leg1, leg2) - height-coordinate, for a point whose legs are given
/// in Mordell-Weil coordinates as (D, m(f(E) + t c)).
pub fn rho_n(
    ctx: &KappaContext,
    endo_idx: usize,
    point: &BiextPoint,
    d: &MWVector,
    e: &MWVector,
    c_mult: i64,
    prec: i64,
) -> Result<Padic> {
    let h = ctx.pair_height(d, e, c_mult, endo_idx, prec)?;
    Ok(h.sub(&point.height).truncate(prec))
}
