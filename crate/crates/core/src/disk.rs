//! The per-residue-disk pipeline: interpolate the curve embedding, eliminate
//! the disk parameter, compose with the integral-point parametrization, and
//! enumerate/lift candidate points, including the descent into higher
//! residue disks.

use std::collections::BTreeMap;

use crate::biext::{KappaContext, PolyMapKappa};
use crate::curve::{disk_point, CurvePoint, HyperellipticModel, OddModelChange};
use crate::error::{Error, Result};
use crate::heights::{psi_of_section, LocalHeightOracle, RestrictedDivisor};
use crate::padic::Padic;
use crate::padic_poly::{interpolate_poly_mod_pk, PadicPoly, ValuationProfile};
use crate::zq::{hensel_lift_multivariate, solve_linear_fp, MultiPoly, Zq};

/// One embedding sample: the Coleman log fixture for z - b and the
/// restricted-divisor data needed to assemble psi at the sample. A base
/// point sample (z = b) carries no divisor data; its log and psi vanish by
/// the rigidification.
#[derive(Clone)]
pub struct DiskSample {
    pub log: Vec<Padic>,
    pub alpha: Option<RestrictedDivisor>,
    /// odd-model representation of z - b handed to the oracle and s_n
    pub z_minus_b_odd: Vec<(CurvePoint, i64)>,
    /// regular-model representation of z - b for the fixture corrections
    pub z_minus_b_regular: Vec<(CurvePoint, i64)>,
}

/// Per-disk inputs: the center, its fixture samples by nu, and the constant
/// v entering the height-coordinate valuation profile.
pub struct DiskInput<'a> {
    pub id: String,
    pub center: (u64, u64),
    pub samples: &'a BTreeMap<u64, DiskSample>,
    pub v_constant: i64,
    /// splitting-search bound for height assembly
    pub n_max: usize,
}

/// The interpolated embedding phi o lambda as univariate polynomials in nu.
#[derive(Clone, Debug)]
pub struct EmbedMap {
    pub polys: Vec<PadicPoly>,
    pub k: i64,
}

/// Interpolate the embedding of a residue disk at precision k. Samples are
/// consumed in the order nu = 0, 1, 2, ...; a missing sample is reported as
/// a gap rather than invented.
#[allow(clippy::too_many_arguments)]
pub fn embed_disk(
    models: &OddModelChange,
    regular: &HyperellipticModel,
    ctx: &KappaContext,
    disk: &DiskInput,
    oracle: &dyn LocalHeightOracle,
    away: &[(u64, i64)],
    k: i64,
) -> Result<EmbedMap> {
    let p = ctx.p;
    let bound_g = ValuationProfile::EmbeddingFirstG.degree_bound(p, k) as usize;
    let bound_h =
        ValuationProfile::EmbeddingHeight { v: disk.v_constant }.degree_bound(p, k) as usize;
    let need = bound_g.max(bound_h) + 2; // one extra sample as a fit check
    let have: Vec<u64> = disk.samples.keys().copied().collect();
    let mut use_nus = vec![];
    for nu in 0..need as u64 {
        if disk.samples.contains_key(&nu) {
            use_nus.push(nu);
        } else if use_nus.len() < bound_g.max(bound_h) + 1 {
            return Err(Error::MissingFixture(format!(
                "disk {} sample nu = {nu} (have {have:?}, need {} samples for k = {k})",
                disk.id,
                bound_g.max(bound_h) + 1
            )));
        }
    }
    let mut coord_samples: Vec<Vec<(Padic, Padic)>> = vec![vec![]; ctx.genus + ctx.endos.len()];
    for &nu in &use_nus {
        let s = &disk.samples[&nu];
        let nu_val = Padic::from_integer(p, nu as i64);
        // first-g coordinates: (log fixture - offset)/p
        for coord in 0..ctx.genus {
            let d = s.log[coord].sub(&ctx.log_offset[coord]);
            let v = d.divide_exact_power(1).map_err(|_| Error::NotInDisk)?;
            coord_samples[coord].push((nu_val.clone(), v.truncate(k)));
        }
        // height coordinates: (psi - offset)/p per endomorphism
        for e_idx in 0..ctx.endos.len() {
            let psi = match &s.alpha {
                None => Padic::zero_mod(p, k + 1),
                Some(alpha) => psi_of_section(
                    &models.odd,
                    regular,
                    &s.z_minus_b_odd,
                    &s.z_minus_b_regular,
                    alpha,
                    oracle,
                    (&disk.id, nu),
                    away,
                    disk.n_max,
                    k + 1,
                )?,
            };
            let d = psi.sub(&ctx.psi_offset[e_idx]);
            let v = d.divide_exact_power(1).map_err(|_| Error::NotInDisk)?;
            coord_samples[ctx.genus + e_idx].push((nu_val.clone(), v.truncate(k)));
        }
    }
    let mut polys = vec![];
    for (coord, samples) in coord_samples.iter().enumerate() {
        let profile = if coord < ctx.genus {
            ValuationProfile::EmbeddingFirstG
        } else {
            ValuationProfile::EmbeddingHeight { v: disk.v_constant }
        };
        polys.push(interpolate_poly_mod_pk(samples, profile, k)?);
    }
    Ok(EmbedMap { polys, k })
}

/// The defining equations of the embedded image: pick a coordinate with a
/// unit linear coefficient, invert the disk parameter as a series in it, and
/// substitute into the remaining coordinates. Returns g + rho - 2
/// polynomials in the torsor coordinates x_1..x_{g+rho-1} over Z/p^k,
/// normalized monic in their leading coordinate.
pub fn eliminate_embedding(embed: &EmbedMap, p: u64, k: i64) -> Result<Vec<MultiPoly>> {
    let ncoords = embed.polys.len();
    let ring = Zq::new(p, k as u32);
    let pivot = embed
        .polys
        .iter()
        .position(|f| f.coeff(1).valuation() == Some(0))
        .ok_or(Error::NoUnitPivot)?;
    let lp = &embed.polys[pivot];
    // invert t = L_piv(nu) - L_piv(0) as nu = V(t) mod p^k
    let dmax = ValuationProfile::EmbeddingFirstG.degree_bound(p, k).max(1) as usize;
    let a1_inv = lp.coeff(1).truncate(k).invert()?;
    let mut v_coeffs: Vec<Padic> = vec![Padic::zero_mod(p, k); dmax + 1];
    v_coeffs[1] = a1_inv.clone();
    for n in 2..=dmax {
        // c_n = -a1_inv * [t^n] sum_{j>=2} a_j V(t)^j
        let vpoly = PadicPoly::new(p, v_coeffs.clone());
        let mut acc = Padic::zero_mod(p, k);
        let mut vpow = vpoly.mul(&vpoly);
        for j in 2..=lp.degree().unwrap_or(0) {
            let aj = lp.coeff(j);
            if !aj.is_zero_at_prec() {
                acc = acc.add(&aj.mul(&vpow.coeff(n)));
            }
            vpow = vpow.mul(&vpoly);
        }
        v_coeffs[n] = acc.neg().mul(&a1_inv).truncate(k);
    }
    let v_series = PadicPoly::new(p, v_coeffs);
    // t as a MultiPoly: x_pivot - L_piv(0)
    let shift = lp.coeff(0).residue_u64(k)?;
    let t_poly = MultiPoly::variable(ring, ncoords, pivot)
        .sub(&MultiPoly::constant(ring, ncoords, shift));
    // nu(x_pivot) as a MultiPoly
    let mut nu_poly = MultiPoly::zero(ring, ncoords);
    let mut tpow = MultiPoly::constant(ring, ncoords, 1);
    for c in &v_series.coeffs {
        if !c.is_zero_at_prec() {
            nu_poly = nu_poly.add(&tpow.scale(c.residue_u64(k)?));
        }
        tpow = tpow.mul(&t_poly);
    }
    let mut out = vec![];
    for (coord, f) in embed.polys.iter().enumerate() {
        if coord == pivot {
            continue;
        }
        // g = x_coord - f(nu(x_pivot))
        let mut comp = MultiPoly::zero(ring, ncoords);
        let mut nupow = MultiPoly::constant(ring, ncoords, 1);
        for c in &f.coeffs {
            if !c.is_zero_at_prec() {
                comp = comp.add(&nupow.scale(c.residue_u64(k)?));
            }
            nupow = nupow.mul(&nu_poly);
        }
        let g = MultiPoly::variable(ring, ncoords, coord).sub(&comp);
        out.push(g);
    }
    Ok(out)
}

/// Recover nu from the pivot-coordinate value of a solution.
fn recover_nu(embed: &EmbedMap, p: u64, k: i64, coords: &[u64]) -> Result<u64> {
    let ring = Zq::new(p, k as u32);
    let pivot = embed
        .polys
        .iter()
        .position(|f| f.coeff(1).valuation() == Some(0))
        .ok_or(Error::NoUnitPivot)?;
    let lp = &embed.polys[pivot];
    let dmax = ValuationProfile::EmbeddingFirstG.degree_bound(p, k).max(1) as usize;
    let a1_inv = lp.coeff(1).truncate(k).invert()?;
    let mut v_coeffs: Vec<Padic> = vec![Padic::zero_mod(p, k); dmax + 1];
    v_coeffs[1] = a1_inv.clone();
    for n in 2..=dmax {
        let vpoly = PadicPoly::new(p, v_coeffs.clone());
        let mut acc = Padic::zero_mod(p, k);
        let mut vpow = vpoly.mul(&vpoly);
        for j in 2..=lp.degree().unwrap_or(0) {
            let aj = lp.coeff(j);
            if !aj.is_zero_at_prec() {
                acc = acc.add(&aj.mul(&vpow.coeff(n)));
            }
            vpow = vpow.mul(&vpoly);
        }
        v_coeffs[n] = acc.neg().mul(&a1_inv).truncate(k);
    }
    let t = ring.sub(coords[pivot], lp.coeff(0).residue_u64(k)?);
    let mut nu = 0u64;
    let mut tp = 1u64;
    for c in &v_coeffs {
        if !c.is_zero_at_prec() {
            nu = ring.add(nu, ring.mul(c.residue_u64(k)?, tp));
        }
        tp = ring.mul(tp, t);
    }
    Ok(nu)
}

/// A candidate intersection point in one residue disk.
#[derive(Clone, Debug)]
pub struct Candidate {
    /// lattice coordinates mod p^k
    pub n: Vec<u64>,
    /// disk parameter mod p^k
    pub nu: u64,
    /// the curve point mod p^(k+1)
    pub point: CurvePoint,
    /// false when the Jacobian was singular and the lift needs a higher disk
    pub lifted: bool,
}

/// Result of processing one residue disk.
#[derive(Clone, Debug)]
pub struct DiskReport {
    pub disk_id: String,
    pub center: (u64, u64),
    pub k: i64,
    pub embedding: EmbedMap,
    pub g_equations: Vec<MultiPoly>,
    pub composed: Vec<MultiPoly>,
    pub finite: bool,
    /// dimension of the triangularized mod-p solution algebra, when finite
    pub bound: Option<usize>,
    pub candidates: Vec<Candidate>,
}

const ENUMERATION_GUARD: u128 = 1_000_000;

/// Solve one disk: compose the eliminated equations with the integral-point
/// parametrization, enumerate mod-p solutions, test finiteness, and lift.
pub fn solve_disk(
    model_regular: &HyperellipticModel,
    embed: &EmbedMap,
    g_equations: &[MultiPoly],
    kappa: &PolyMapKappa,
    ctx: &KappaContext,
    disk: &DiskInput,
    k: i64,
) -> Result<DiskReport> {
    let p = ctx.p;
    let r = ctx.rank;
    let ring = Zq::new(p, k as u32);
    // compose g_i with phi o kappa
    let phi: Vec<MultiPoly> = kappa.phi.iter().map(|f| f.reduce_to(k as u32)).collect();
    let composed: Vec<MultiPoly> = g_equations
        .iter()
        .map(|g| g.reduce_to(k as u32).substitute(&phi))
        .collect();
    // mod-p enumeration
    let total = (p as u128).pow(r as u32);
    if total > ENUMERATION_GUARD {
        return Err(Error::EnumerationTooLarge(total));
    }
    let comp_p: Vec<MultiPoly> = composed.iter().map(|f| f.reduce_to(1)).collect();
    let mut mod_p_solutions = vec![];
    let mut idx = vec![0u64; r];
    loop {
        if comp_p.iter().all(|f| f.evaluate(&idx) == 0) {
            mod_p_solutions.push(idx.clone());
        }
        // increment the multi-index
        let mut carry = true;
        for v in idx.iter_mut() {
            if carry {
                *v += 1;
                if *v == p {
                    *v = 0;
                } else {
                    carry = false;
                }
            }
        }
        if carry {
            break;
        }
    }
    let (finite, bound) = finiteness(&comp_p, p, r, mod_p_solutions.len());
    let mut candidates = vec![];
    if finite {
        for sol in &mod_p_solutions {
            let (n_lifted, lifted) = if k > 1 {
                match lift_solution(&composed, sol, k as u32) {
                    Ok(v) => (v, true),
                    Err(Error::SingularJacobian) => (sol.clone(), false),
                    Err(e) => return Err(e),
                }
            } else {
                (sol.clone(), true)
            };
            let kk = if lifted { k } else { 1 };
            let ring_kk = Zq::new(p, kk as u32);
            let coords: Vec<u64> = phi
                .iter()
                .map(|f| f.reduce_to(kk as u32).evaluate(&n_lifted.iter().map(|&x| x % ring_kk.modulus).collect::<Vec<_>>()))
                .collect();
            let nu = recover_nu(embed, p, kk, &coords)?;
            let point = disk_point(
                model_regular,
                disk.center,
                &Padic::from_integer_mod(p, nu as i64, kk),
                kk + 1,
            )?;
            candidates.push(Candidate { n: n_lifted, nu, point, lifted });
        }
        // re-verify every candidate against both systems
        for c in &candidates {
            if !c.lifted {
                continue;
            }
            let ns: Vec<u64> = c.n.iter().map(|&x| x % ring.modulus).collect();
            for f in &composed {
                if f.evaluate(&ns) != 0 {
                    return Err(Error::FitMismatch(
                        "candidate fails the composed system on re-evaluation".into(),
                    ));
                }
            }
        }
    }
    Ok(DiskReport {
        disk_id: disk.id.clone(),
        center: disk.center,
        k,
        embedding: embed.clone(),
        g_equations: g_equations.to_vec(),
        composed,
        finite,
        bound,
        candidates,
    })
}

/// Zero-dimensionality of the mod-p solution algebra, by substitution of a
/// unit-coefficient linear equation (r <= 2) or enumeration counting.
fn finiteness(comp_p: &[MultiPoly], p: u64, r: usize, nsol: usize) -> (bool, Option<usize>) {
    if comp_p.iter().all(|f| f.is_zero()) {
        return (false, None);
    }
    if r == 1 {
        let deg = comp_p
            .iter()
            .filter(|f| !f.is_zero())
            .map(|f| f.total_degree() as usize)
            .min();
        return (true, deg);
    }
    if r == 2 {
        // look for a total-degree-1 equation with a unit variable coefficient
        for (fi, f) in comp_p.iter().enumerate() {
            if f.is_zero() || f.total_degree() != 1 {
                continue;
            }
            for var in 0..2usize {
                let mut e = vec![0u32; 2];
                e[var] = 1;
                let a = f.coeff(&e);
                if a % p == 0 {
                    continue;
                }
                // var = -(const + b*other)/a ; substitute into the others
                let ring = Zq::new(p, 1);
                let ainv = ring.inv(a).unwrap();
                let other = 1 - var;
                let mut eo = vec![0u32; 2];
                eo[other] = 1;
                let b = f.coeff(&eo);
                let c0 = f.coeff(&[0, 0]);
                // substitution polynomials
                let mut subs = vec![MultiPoly::zero(ring, 2); 2];
                let lin = MultiPoly::variable(ring, 2, other)
                    .scale(ring.neg(ring.mul(b, ainv)))
                    .add(&MultiPoly::constant(ring, 2, ring.neg(ring.mul(c0, ainv))));
                subs[var] = lin;
                subs[other] = MultiPoly::variable(ring, 2, other);
                let mut degs = vec![];
                let mut all_zero = true;
                for (gi, g) in comp_p.iter().enumerate() {
                    if gi == fi {
                        continue;
                    }
                    let s = g.substitute(&subs);
                    if !s.is_zero() {
                        all_zero = false;
                        degs.push(s.total_degree() as usize);
                    }
                }
                if all_zero {
                    return (false, None);
                }
                return (true, degs.into_iter().min());
            }
        }
        // no usable linear pivot: fall back to counting; a full line of
        // solutions means a positive-dimensional family
        if nsol >= p as usize {
            return (false, None);
        }
        return (true, Some(nsol));
    }
    (nsol < p.pow(r as u32 - 1) as usize, Some(nsol))
}

/// Lift a mod-p solution of an (possibly overdetermined) system to mod p^k
/// through a square subsystem with unit Jacobian, then verify the rest.
fn lift_solution(system: &[MultiPoly], x0: &[u64], k: u32) -> Result<Vec<u64>> {
    let r = x0.len();
    let p = system[0].ring.p;
    // choose r equations whose Jacobian at x0 is invertible mod p
    let combos = choose_indices(system.len(), r);
    for combo in combos {
        let sub: Vec<MultiPoly> = combo.iter().map(|&i| system[i].clone()).collect();
        match hensel_lift_multivariate(&sub, x0, k) {
            Ok(sol) => {
                let ring = Zq::new(p, k);
                let ok = system
                    .iter()
                    .all(|f| f.reduce_to(k).evaluate(&sol.iter().map(|&x| x % ring.modulus).collect::<Vec<_>>()) == 0);
                if ok {
                    return Ok(sol);
                }
            }
            Err(Error::SingularJacobian) | Err(Error::NoRoot) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SingularJacobian)
}

fn choose_indices(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Result of refining a candidate into the next residue-disk level.
#[derive(Clone, Debug)]
pub struct RefinedCandidate {
    /// lattice coordinates mod p^2
    pub n: Vec<u64>,
    /// disk parameter mod p^2
    pub nu: u64,
    /// the matched torsor point in the higher-disk coordinates (an F_p
    /// vector)
    pub torsor_point: Vec<u64>,
    /// the curve point mod p^3
    pub point: CurvePoint,
}

/// Descend into the higher residue disk of a mod-p candidate: reparametrize
/// n = n0 + p n', nu = nu0 + p mu, where both maps become affine linear
/// mod p, and solve the linear system.
#[allow(clippy::too_many_arguments)]
pub fn refine_higher_disk(
    model_regular: &HyperellipticModel,
    ctx: &KappaContext,
    embed_k2: &EmbedMap,
    kappa: &PolyMapKappa,
    disk: &DiskInput,
    n0: &[u64],
    nu0: u64,
) -> Result<Vec<RefinedCandidate>> {
    let p = ctx.p;
    let r = ctx.rank;
    let ncoords = ctx.genus + ctx.endos.len();
    if embed_k2.k < 2 || kappa.k < 2 {
        return Err(Error::PrecisionExhausted(
            "higher-disk refinement needs the embedding and kappa mod p^2".into(),
        ));
    }
    let ring2 = Zq::new(p, 2);
    // base of the higher disk: phi(lambda(nu0)) mod p
    let lam0: Vec<u64> = embed_k2
        .polys
        .iter()
        .map(|f| f.evaluate(&Padic::from_integer(p, nu0 as i64)).residue_u64(1).map(|x| x % p))
        .collect::<Result<_>>()?;
    // lambda side: rows of (L(nu0 + p mu) - base)/p, affine linear in mu
    let mut lam_lin = vec![0u64; ncoords];
    let mut lam_const = vec![0u64; ncoords];
    for (coord, f) in embed_k2.polys.iter().enumerate() {
        // evaluate symbolically: sum c_i (nu0 + p mu)^i mod p^2
        let mut linear = 0u64;
        let mut constant = 0u64;
        let mut nu_pow = 1u64; // nu0^i mod p^2
        for (i, c) in f.coeffs.iter().enumerate() {
            let cv = c.residue_u64(2)?;
            constant = ring2.add(constant, ring2.mul(cv, nu_pow));
            if i >= 1 {
                // derivative term: i * c * nu0^(i-1) * p
                let prev = if i == 1 {
                    1
                } else {
                    mod_pow(nu0, (i - 1) as u32, ring2.modulus)
                };
                let t = ring2.mul(ring2.mul(cv, (i as u64) % ring2.modulus), prev);
                linear = ring2.add(linear, ring2.mul(t, p));
            }
            nu_pow = ring2.mul(nu_pow, nu0 % ring2.modulus);
        }
        let shifted = ring2.sub(constant, lam0[coord] % ring2.modulus);
        if shifted % p != 0 || linear % p != 0 {
            return Err(Error::NotInDisk);
        }
        lam_const[coord] = (shifted / p) % p;
        lam_lin[coord] = (linear / p) % p;
    }
    // kappa side: (phi(n0 + p n') - base)/p, affine linear in n'
    let mut kap_rows = vec![vec![0u64; r]; ncoords];
    let mut kap_const = vec![0u64; ncoords];
    for (coord, f) in kappa.phi.iter().enumerate() {
        let f2 = f.reduce_to(2);
        let shifted = f2.shift_scale_vars(&n0.iter().map(|&x| x % ring2.modulus).collect::<Vec<_>>());
        let base = MultiPoly::constant(ring2, r, lam0[coord] % ring2.modulus);
        let diff = shifted.sub(&base);
        let y = diff.divide_by_p().map_err(|_| Error::NotInDisk)?;
        let y1 = y.reduce_to(1);
        kap_const[coord] = y1.coeff(&vec![0; r]);
        for (j, row) in kap_rows.iter_mut().enumerate().take(ncoords) {
            let _ = row;
            let _ = j;
        }
        for j in 0..r {
            let mut e = vec![0u32; r];
            e[j] = 1;
            kap_rows[coord][j] = y1.coeff(&e);
        }
        if y1.total_degree() > 1 {
            return Err(Error::FitMismatch(
                "restricted parametrization is not affine linear mod p".into(),
            ));
        }
    }
    // solve kap_rows * n' - lam_lin * mu = lam_const - kap_const over F_p
    let rows = ncoords;
    let cols = r + 1;
    let mut a = vec![vec![0u64; cols]; rows];
    let mut b = vec![0u64; rows];
    let zp = Zq::new(p, 1);
    for i in 0..rows {
        for j in 0..r {
            a[i][j] = kap_rows[i][j] % p;
        }
        a[i][r] = zp.neg(lam_lin[i]);
        b[i] = zp.sub(lam_const[i], kap_const[i]);
    }
    let Some((sol, kernel)) = solve_linear_fp(&a, &b, p) else {
        return Ok(vec![]); // no intersection in the higher disk
    };
    if !kernel.is_empty() {
        return Err(Error::FitMismatch(
            "higher-disk linear system is degenerate".into(),
        ));
    }
    let nprime = &sol[..r];
    let mu = sol[r];
    let n: Vec<u64> = n0.iter().zip(nprime).map(|(&a, &d)| a + p * d).collect();
    let nu = nu0 + p * mu;
    let torsor_point: Vec<u64> = (0..ncoords)
        .map(|i| {
            let mut acc = kap_const[i];
            for j in 0..r {
                acc = zp.add(acc, zp.mul(kap_rows[i][j], nprime[j]));
            }
            acc
        })
        .collect();
    let point = disk_point(model_regular, disk.center, &Padic::from_integer(p, nu as i64), 3)?;
    Ok(vec![RefinedCandidate { n, nu, torsor_point, point }])
}

fn mod_pow(mut b: u64, mut e: u32, m: u64) -> u64 {
    let mut acc = 1u128;
    let mm = m as u128;
    let mut bb = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * bb % mm;
        }
        bb = bb * bb % mm;
        e >>= 1;
    }
    b = acc as u64;
    b
}

/// How a disk was handled by the whole-curve sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiskOutcome {
    Processed(String),
    InvolutionImageOf(String),
    SieveEmpty,
    Unprocessed(String),
}
