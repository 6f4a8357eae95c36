//! Local height bookkeeping: the pluggable height-at-p oracle, away-from-p
//! contributions from vertical divisors, linear-equivalence log corrections,
//! and the assembly of heights of restricted divisors along a residue disk.
//!
//! The W_q corrections of the general theory are identically zero for the
//! rigidified sections this pipeline consumes and are not represented.

use std::collections::BTreeMap;

use crate::curve::{CurvePoint, HyperellipticModel};
use crate::error::{Error, Result};
use crate::mumford::{divisor_multiple, split_divisor, MumfordDivisor, TrackedFunction};
use crate::mw::MWVector;
use crate::padic::Padic;

/// Pair heights between labelled fixture divisors, e.g. ("G1", "f(G2)").
#[derive(Clone, Debug, Default)]
pub struct HeightTable {
    pub entries: BTreeMap<(String, String), Padic>,
}

impl HeightTable {
    pub fn get(&self, left: &str, right: &str) -> Result<&Padic> {
        self.entries
            .get(&(left.to_string(), right.to_string()))
            .ok_or_else(|| Error::MissingFixture(format!("height pair ({left}, {right})")))
    }

    pub fn insert(&mut self, left: &str, right: &str, v: Padic) {
        self.entries.insert((left.to_string(), right.to_string()), v);
    }

    /// Whenever both (a, b) and (b, a) are present they must agree at shared
    /// precision (the pairing is symmetric).
    pub fn check_symmetry(&self) -> Result<()> {
        for ((l, r), v) in &self.entries {
            if let Some(w) = self.entries.get(&(r.clone(), l.clone())) {
                if !v.agrees_with(w) {
                    return Err(Error::InvariantViolation(format!(
                        "height table asymmetric at ({l}, {r}): {v} vs {w}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Multidegree data for the special fiber at one bad prime, enough to solve
/// for the vertical divisor balancing a restricted correspondence.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct FiberComponentData {
    pub q: u64,
    /// row i = multidegree vector of the i-th irreducible component
    pub component_multidegrees: Vec<Vec<i64>>,
    /// index of the component containing the simple open
    pub u_component: usize,
    /// whether each component meets the base-point section
    pub meets_b: Vec<bool>,
    /// multidegree of the restricted correspondence at a smooth F_q-point
    pub alpha_multidegree: Vec<i64>,
}

/// Solve for the vertical divisor D, supported away from b, with
/// multidegree(alpha) + multidegree(D) = 0; return the coefficient of the
/// component containing the simple open.
pub fn compute_vq(data: &FiberComponentData) -> Result<i64> {
    let ncomp = data.component_multidegrees.len();
    if data.meets_b.len() != ncomp || data.u_component >= ncomp {
        return Err(Error::DimensionMismatch("fiber component data inconsistent".into()));
    }
    let slots = data.alpha_multidegree.len();
    let free: Vec<usize> = (0..ncomp).filter(|&i| !data.meets_b[i]).collect();
    // exact integer solve: sum_j c_j M_j = -alpha over the free components
    let rows = slots;
    let cols = free.len();
    let mut m: Vec<Vec<i128>> = (0..rows)
        .map(|r| {
            let mut row: Vec<i128> = free
                .iter()
                .map(|&j| data.component_multidegrees[j][r] as i128)
                .collect();
            row.push(-(data.alpha_multidegree[r] as i128));
            row
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = vec![];
    let mut rank = 0usize;
    for col in 0..cols {
        let piv = (rank..rows).find(|&r| m[r][col] != 0);
        let Some(piv) = piv else { continue };
        m.swap(rank, piv);
        for r in 0..rows {
            if r != rank && m[r][col] != 0 {
                let (a, b) = (m[rank][col], m[r][col]);
                for c in 0..=cols {
                    m[r][c] = m[r][c] * a - m[rank][c] * b;
                }
            }
        }
        pivots.push((rank, col));
        rank += 1;
    }
    for r in rank..rows {
        if m[r][cols] != 0 {
            return Err(Error::NoSolution);
        }
    }
    if rank < cols {
        return Err(Error::NonUniqueSolution);
    }
    let mut solution = vec![0i64; cols];
    for &(r, c) in &pivots {
        if m[r][cols] % m[r][c] != 0 {
            return Err(Error::NoSolution);
        }
        solution[c] = (m[r][cols] / m[r][c]) as i64;
    }
    // V_q is the coefficient of U's component; 0 when that component was
    // excluded from the support because it meets b
    match free.iter().position(|&j| j == data.u_component) {
        Some(idx) => Ok(solution[idx]),
        None => Ok(0),
    }
}

/// The away-from-p constant -sum_q V_q log q as an element of Q_p.
pub fn height_away_from_p(p: u64, vqs: &[(u64, i64)], prec: i64) -> Result<Padic> {
    let mut acc = Padic::zero_mod(p, prec);
    for &(q, vq) in vqs {
        if vq == 0 {
            continue;
        }
        if q == p {
            return Err(Error::InvariantViolation("V_q given at the working prime".into()));
        }
        let lq = Padic::from_integer(p, q as i64).iwasawa_log(prec)?;
        acc = acc.sub(&lq.mul(&Padic::from_integer(p, vq)));
    }
    Ok(acc)
}

/// log r(D) = sum of sign * log r(point) for a degree-0 signed point divisor.
pub fn linear_equivalence_correction(
    r: &TrackedFunction,
    d: &[(CurvePoint, i64)],
    model: &HyperellipticModel,
    prec: i64,
) -> Result<Padic> {
    let value = r.evaluate_divisor(d, model, prec + 4)?;
    value.iwasawa_log(prec)
}

/// A local-height-at-p request: the split divisors plus a lookup key naming
/// the disk sample and the multiple that produced the splitting.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OracleKey {
    pub disk: String,
    pub nu: u64,
    pub n: usize,
}

#[derive(Clone, Debug)]
pub struct HeightRequest {
    pub key: OracleKey,
    pub left: Vec<(CurvePoint, i64)>,
    pub right: Vec<(CurvePoint, i64)>,
    /// multiplicity of the odd-model point at infinity on the right leg
    pub right_infinity: i64,
}

/// The cyclotomic local height at p on split point divisors. The crate
/// never computes this from first principles; backends are fixtures or
/// synthetic test oracles. Implementations must be safe for concurrent
/// queries.
pub trait LocalHeightOracle: Sync {
    fn height_at_p(&self, req: &HeightRequest) -> Result<Padic>;
}

/// Fixture-backed oracle: entries are keyed by `OracleKey` and may pin the
/// expected right-leg points, which are then matched at shared precision.
pub struct FixtureOracle {
    pub entries: BTreeMap<OracleKey, FixtureHeightEntry>,
}

#[derive(Clone, Debug)]
pub struct FixtureHeightEntry {
    pub value: Padic,
    /// expected split points (affine) on the right leg, if pinned
    pub expect_points: Vec<(CurvePoint, i64)>,
}

impl LocalHeightOracle for FixtureOracle {
    fn height_at_p(&self, req: &HeightRequest) -> Result<Padic> {
        let e = self.entries.get(&req.key).ok_or_else(|| {
            Error::MissingFixture(format!(
                "local height at p for disk {} nu {} n {}",
                req.key.disk, req.key.nu, req.key.n
            ))
        })?;
        for (pt, mult) in &e.expect_points {
            let hit = req.right.iter().any(|(q, m)| m == mult && q.agrees_with(pt));
            if !hit {
                return Err(Error::MissingFixture(format!(
                    "oracle entry for disk {} nu {} pins a split point not found in the request",
                    req.key.disk, req.key.nu
                )));
            }
        }
        Ok(e.value.clone())
    }
}

/// A restricted divisor presented to psi_of_section: an optional Mumford
/// part that may need a splitting multiple, an already-split signed point
/// part, and tracked functions whose log corrections enter with sign +1.
#[derive(Clone, Debug)]
pub struct RestrictedDivisor {
    pub mumford: Option<MumfordDivisor>,
    pub points: Vec<(CurvePoint, i64)>,
    pub tracked: Vec<TrackedFunction>,
}

/// h_p(D1, D2) assembled by finding the least n <= n_max with n*D2 split,
/// calling the oracle on the split part (plus `extra` scaled by n), and
/// adding (1/n) log s_n(D1).
#[allow(clippy::too_many_arguments)]
pub fn height_via_splitting(
    model: &HyperellipticModel,
    d1: &[(CurvePoint, i64)],
    d2: &MumfordDivisor,
    extra: &[(CurvePoint, i64)],
    oracle: &dyn LocalHeightOracle,
    key_base: (&str, u64),
    n_max: usize,
    prec: i64,
) -> Result<Padic> {
    let p = model.p;
    for n in 1..=n_max {
        let (dn, s_n) = divisor_multiple(model, d2, n)?;
        // a repeated root mod p means this multiple cannot be split into
        // distinct points; move on to the next one
        let split = match split_divisor(model, &dn, prec) {
            Ok(Some(s)) => s,
            Ok(None) | Err(Error::RepeatedRootModP) => continue,
            Err(e) => return Err(e),
        };
        let mut right = split.points.clone();
        for (pt, mult) in extra {
            right.push((pt.clone(), mult * n as i64));
        }
        let req = HeightRequest {
            key: OracleKey { disk: key_base.0.to_string(), nu: key_base.1, n },
            left: d1.to_vec(),
            right,
            right_infinity: split.infinity_mult + d2.base_multiple * n as i64,
        };
        let h = oracle.height_at_p(&req)?;
        let log_s = if s_n.is_one() {
            Padic::zero_mod(p, prec)
        } else {
            linear_equivalence_correction(&s_n, d1, model, prec)?
        };
        let n_inv = Padic::from_integer(p, n as i64).truncate(prec + 2).invert()?;
        return Ok(h.add(&log_s).mul(&n_inv).truncate(prec));
    }
    Err(Error::NoSplitFound(n_max))
}

/// Global height by bilinear expansion over Mordell-Weil coordinates:
/// h(D, m(f(E) + t c)) from the (G_i, f(G_j)) and (G_i, c) table entries,
/// plus optional away-from-p vertical contributions.
#[allow(clippy::too_many_arguments)]
pub fn global_height(
    p: u64,
    d: &MWVector,
    e_f_part: &MWVector,
    e_c_mult: i64,
    m: i64,
    table: &HeightTable,
    labels: &[String],
    endo_label: &str,
    away: &[(u64, i64)],
    prec: i64,
) -> Result<Padic> {
    if d.len() != labels.len() || e_f_part.len() != labels.len() {
        return Err(Error::DimensionMismatch("MW vector length != label count".into()));
    }
    let mut acc = Padic::zero_mod(p, prec);
    for (i, li) in labels.iter().enumerate() {
        if d.0[i] == 0 {
            continue;
        }
        for (j, lj) in labels.iter().enumerate() {
            if e_f_part.0[j] == 0 {
                continue;
            }
            let b = table.get(li, &format!("{endo_label}({lj})"))?;
            let c = Padic::from_integer(p, d.0[i] * e_f_part.0[j] * m);
            acc = acc.add(&b.mul(&c));
        }
        if e_c_mult != 0 {
            let q = table.get(li, &format!("c[{endo_label}]"))?;
            let c = Padic::from_integer(p, d.0[i] * e_c_mult * m);
            acc = acc.add(&q.mul(&c));
        }
    }
    if !away.is_empty() {
        acc = acc.add(&height_away_from_p(p, away, prec)?);
    }
    Ok(acc.truncate(prec))
}

/// psi of the trivializing section at a disk sample point:
/// (1/n)(h_p-oracle + log s_n) + the tracked-function logs + c_U.
///
/// The Mumford part and the oracle work on the odd-degree model (where the
/// splitting machinery lives), while fixture correction functions are given
/// on the regular chart; z - b is therefore passed in both coordinate
/// systems.
#[allow(clippy::too_many_arguments)]
pub fn psi_of_section(
    model_odd: &HyperellipticModel,
    model_regular: &HyperellipticModel,
    z_minus_b_odd: &[(CurvePoint, i64)],
    z_minus_b_regular: &[(CurvePoint, i64)],
    alpha_restricted: &RestrictedDivisor,
    oracle: &dyn LocalHeightOracle,
    key_base: (&str, u64),
    away: &[(u64, i64)],
    n_max: usize,
    prec: i64,
) -> Result<Padic> {
    let p = model_odd.p;
    let mut acc = match &alpha_restricted.mumford {
        Some(mum) => height_via_splitting(
            model_odd,
            z_minus_b_odd,
            mum,
            &alpha_restricted.points,
            oracle,
            key_base,
            n_max,
            prec,
        )?,
        None => {
            // the whole divisor is already split into points
            let req = HeightRequest {
                key: OracleKey { disk: key_base.0.to_string(), nu: key_base.1, n: 1 },
                left: z_minus_b_odd.to_vec(),
                right: alpha_restricted.points.clone(),
                right_infinity: 0,
            };
            oracle.height_at_p(&req)?
        }
    };
    for t in &alpha_restricted.tracked {
        acc = acc.add(&linear_equivalence_correction(
            t,
            z_minus_b_regular,
            model_regular,
            prec,
        )?);
    }
    if !away.is_empty() {
        acc = acc.add(&height_away_from_p(p, away, prec)?);
    }
    Ok(acc.truncate(prec))
}
