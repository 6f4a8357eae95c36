//! Acceptance suite: every exit criterion runs at its stated tolerance and
//! prints one pass/fail line. Expected values marked "derived" below are
//! frozen outputs of the independent oracles implemented in this file and
//! in tests/common.

mod common;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use chabauty_core::biext::{biext_add, build_qij, integral_point_at, rho_n, Leg};
use chabauty_core::fixtures::{load_config, Runtime};
use chabauty_core::mumford::{divisor_multiple, split_divisor, MumfordDivisor, TrackedFunction};
use chabauty_core::mw::MWVector;
use chabauty_core::padic::Padic;
use chabauty_core::padic_poly::{
    hensel_lift_univariate, monic_sqrt, PadicPoly, ValuationProfile,
};
use chabauty_core::zq::{hensel_lift_multivariate, MultiPoly, Zq};

use common::{FqCurve, FqPoly};

fn bundle() -> Runtime {
    let path =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/x0_67plus/config.json");
    Runtime::build(load_config(&path).unwrap()).unwrap()
}

fn pass(name: &str, t: Instant, limit_s: f64) {
    let dt = t.elapsed().as_secs_f64();
    assert!(dt < limit_s, "{name} exceeded its time budget: {dt:.2}s >= {limit_s}s");
    println!("{name}: PASS ({dt:.2}s)");
}

#[test]
fn criterion_01_embedding_reproduction() {
    let t = Instant::now();
    let rt = bundle();
    let embed = rt.embed("0,-1", 1).unwrap();
    // digit-exact: (2 nu, 0, 6 - nu) mod 7
    let coeff = |i: usize, j: usize| embed.polys[i].coeff(j).truncate(1).residue_u64(1).unwrap();
    assert_eq!(coeff(0, 0), 0);
    assert_eq!(coeff(0, 1), 2);
    assert_eq!(coeff(1, 0), 0);
    assert_eq!(coeff(1, 1), 0);
    assert_eq!(coeff(2, 0), 6);
    assert_eq!(coeff(2, 1), 6);
    assert!(embed.polys.iter().all(|f| f.degree().unwrap_or(0) <= 1));
    pass("criterion 1 (embedding reproduction)", t, 1.0);
}

#[test]
fn criterion_02_elimination_reproduction() {
    let t = Instant::now();
    let rt = bundle();
    let embed = rt.embed("0,-1", 1).unwrap();
    let gs = chabauty_core::disk::eliminate_embedding(&embed, 7, 1).unwrap();
    assert_eq!(gs.len(), 2);
    // up to unit scaling: g1 ~ x2, g2 ~ 2 x3 + x1 + 2 mod 7
    let want1 = [(vec![0u32, 1, 0], 1u64)];
    let want2 = [(vec![1u32, 0, 0], 1u64), (vec![0, 0, 1], 2), (vec![0, 0, 0], 2)];
    assert!(matches_up_to_scaling(&gs[0], &want1, 7));
    assert!(matches_up_to_scaling(&gs[1], &want2, 7));
    pass("criterion 2 (elimination reproduction)", t, 1.0);
}

fn matches_up_to_scaling(g: &MultiPoly, want: &[(Vec<u32>, u64)], p: u64) -> bool {
    let g = g.reduce_to(1);
    // find the scalar on the first wanted monomial
    let a = g.coeff(&want[0].0);
    if a == 0 {
        return false;
    }
    let s = (a as u128 * common::inv_mod(want[0].1, p) as u128 % p as u128) as u64;
    let mut expect = MultiPoly::zero(Zq::new(p, 1), 3);
    for (e, c) in want {
        expect.set(e.clone(), (c * s) % p);
    }
    g == expect
}

#[test]
fn criterion_03_kappa_reproduction() {
    let t = Instant::now();
    let rt = bundle();
    // mod 7: (n1, -n1 - 2n2, -3n1^2 - n1n2 - n1 + n2 - 1)
    let k1 = rt.kappa("0,-1", 1).unwrap();
    let phi: Vec<MultiPoly> = k1.phi.iter().map(|f| f.reduce_to(1)).collect();
    assert_eq!(phi[0].coeff(&[1, 0]), 1);
    assert_eq!(phi[0].coeff(&[0, 1]), 0);
    assert_eq!(phi[1].coeff(&[1, 0]), 6);
    assert_eq!(phi[1].coeff(&[0, 1]), 5);
    assert_eq!(phi[2].coeff(&[2, 0]), 4);
    assert_eq!(phi[2].coeff(&[1, 1]), 6);
    assert_eq!(phi[2].coeff(&[0, 2]), 0);
    assert_eq!(phi[2].coeff(&[1, 0]), 6);
    assert_eq!(phi[2].coeff(&[0, 1]), 1);
    assert_eq!(phi[2].coeff(&[0, 0]), 6);
    // mod 7^4: every coefficient of the kappa_z table, digit-exact
    let k3 = rt.kappa("0,-1", 3).unwrap();
    let f0 = &k3.kappa_z_first[0];
    assert_eq!(
        (f0.coeff(&[1, 0]), f0.coeff(&[0, 1]), f0.coeff(&[0, 0])),
        (399, 1372, 623)
    );
    let f1 = &k3.kappa_z_first[1];
    assert_eq!(
        (f1.coeff(&[1, 0]), f1.coeff(&[0, 1]), f1.coeff(&[0, 0])),
        (1267, 35, 1274)
    );
    let s0 = &k3.kappa_z_second[0][0];
    assert_eq!(
        (s0.coeff(&[1, 0]), s0.coeff(&[0, 1]), s0.coeff(&[0, 0])),
        (2345, 2170, 1603)
    );
    let s1 = &k3.kappa_z_second[0][1];
    assert_eq!(
        (s1.coeff(&[1, 0]), s1.coeff(&[0, 1]), s1.coeff(&[0, 0])),
        (1204, 168, 714)
    );
    let h = &k3.kappa_z_height[0];
    assert_eq!(h.coeff(&[2, 0]), 1351);
    assert_eq!(h.coeff(&[1, 1]), 1463);
    assert_eq!(h.coeff(&[0, 2]), 882);
    assert_eq!(h.coeff(&[1, 0]), 875);
    assert_eq!(h.coeff(&[0, 1]), 350);
    assert_eq!(h.coeff(&[0, 0]), 1365);
    pass("criterion 3 (kappa reproduction)", t, 1.0);
}

#[test]
fn criterion_04_solver_reproduction() {
    let t = Instant::now();
    let rt = bundle();
    let report = rt.run_disk("0,-1", 1).unwrap();
    // composed system, up to unit scaling per polynomial:
    // p1 = -n1 - 2n2, p2 = n1^2 - 2n1n2 - n1 + 2n2
    let want1 = [(vec![1u32, 0], 6u64), (vec![0, 1], 5)];
    let want2 = [
        (vec![2u32, 0], 1u64),
        (vec![1, 1], 5),
        (vec![1, 0], 6),
        (vec![0, 1], 2),
    ];
    assert!(matches_up_to_scaling2(&report.composed[0], &want1, 7));
    assert!(matches_up_to_scaling2(&report.composed[1], &want2, 7));
    assert!(report.finite, "finiteness flag");
    assert_eq!(report.bound, Some(2), "bound on the disk");
    let mut sols: Vec<(Vec<u64>, u64)> =
        report.candidates.iter().map(|c| (c.n.clone(), c.nu)).collect();
    sols.sort();
    assert_eq!(sols, vec![(vec![0, 0], 0), (vec![1, 3], 4)]);
    let p0 = &report.candidates.iter().find(|c| c.nu == 0).unwrap().point;
    assert_eq!(p0.x.residue_u64(2).unwrap(), 0);
    assert_eq!(p0.y.truncate(1).residue_u64(1).unwrap(), 6);
    let p4 = &report.candidates.iter().find(|c| c.nu == 4).unwrap().point;
    assert_eq!(p4.x.residue_u64(2).unwrap(), 4 * 7);
    assert_eq!(p4.y.truncate(1).residue_u64(1).unwrap(), 6);
    pass("criterion 4 (solver reproduction)", t, 1.0);
}

fn matches_up_to_scaling2(g: &MultiPoly, want: &[(Vec<u32>, u64)], p: u64) -> bool {
    let g = g.reduce_to(1);
    let a = g.coeff(&want[0].0);
    if a == 0 {
        return false;
    }
    let s = (a as u128 * common::inv_mod(want[0].1, p) as u128 % p as u128) as u64;
    let mut expect = MultiPoly::zero(Zq::new(p, 1), 2);
    for (e, c) in want {
        expect.set(e.clone(), (c * s) % p);
    }
    g == expect
}

#[test]
fn criterion_05_higher_disk_refinement() {
    let t = Instant::now();
    let rt = bundle();
    let refined = rt.refine("0,-1", &[1, 3], 4).unwrap();
    assert_eq!(refined.len(), 1, "unique intersection in the higher disk");
    let r = &refined[0];
    assert_eq!(r.torsor_point, vec![5, 1, 5]);
    // candidate x = 4*7 + 4*7^2 + O(7^3), y = 6 + 6*7 + 6*7^2 + O(7^3)
    assert_eq!(r.point.x.residue_u64(3).unwrap(), 4 * 7 + 4 * 49);
    assert_eq!(r.point.y.residue_u64(3).unwrap(), 6 + 6 * 7 + 6 * 49);
    // a candidate that is an exact rational point refines to itself
    let again = rt.refine("0,-1", &[0, 0], 0).unwrap();
    assert_eq!(again.len(), 1);
    assert_eq!(again[0].nu, 0);
    assert_eq!(again[0].point.x.residue_u64(3).unwrap(), 0);
    assert_eq!(again[0].point.y.residue_u64(3).unwrap(), 342); // -1 mod 7^3
    pass("criterion 5 (higher-disk refinement)", t, 1.0);
}

#[test]
fn criterion_06_degenerate_disk_detection() {
    let t = Instant::now();
    let rt = bundle();
    let report = rt.run_disk("1,4", 1).unwrap();
    assert!(!report.finite, "the degenerate disk must trip the finiteness flag");
    pass("criterion 6 (degenerate-disk detection)", t, 1.0);
}

#[test]
fn criterion_07_height_pipeline_values() {
    let t = Instant::now();
    let rt = bundle();
    // psi at the first two samples, digit-exact at O(7^2)
    let psi0 = rt.psi_at_sample("0,-1", 0, 2).unwrap();
    assert_eq!(psi0.residue_u64(2).unwrap(), 6 * 7);
    let psi1 = rt.psi_at_sample("0,-1", 1, 2).unwrap();
    assert_eq!(psi1.residue_u64(2).unwrap(), 5 * 7);
    // the log correction for the first sample is computed by the Iwasawa
    // logarithm: log(4/9) ≡ 7 mod 49
    let g = rt.tracked.get("gP0").unwrap();
    let d = vec![
        (
            chabauty_core::curve::CurvePoint::from_integers(7, 0, -1),
            1i64,
        ),
        (
            chabauty_core::curve::CurvePoint::from_integers(7, 1, 0),
            -1i64,
        ),
    ];
    let corr =
        chabauty_core::heights::linear_equivalence_correction(g, &d, &rt.regular, 2).unwrap();
    assert_eq!(corr.residue_u64(2).unwrap(), 7);
    pass("criterion 7 (height-pipeline values)", t, 1.0);
}

#[test]
fn criterion_08_cantor_fidelity() {
    let t = Instant::now();
    let rt = bundle();
    // Part 1: doubling the shipped Mumford fixture reproduces the v2 and u3
    // digits mod 7^8, and the split points.
    let samples = rt.disk_samples.get("0,-1").unwrap();
    let alpha = samples[&1].alpha.as_ref().unwrap();
    let d1 = alpha.mumford.as_ref().unwrap();
    let odd = &rt.change.odd;
    // the fixture itself must be reachable from the printed reduction data:
    // undo the doubling (the independent derivation used to freeze it)
    let m8 = 7u64.pow(8);
    let v2_expect: Vec<u64> = vec![
        (-1649234i64).rem_euclid(m8 as i64) as u64,
        1999391,
        73804,
        (-462222i64).rem_euclid(m8 as i64) as u64,
    ];
    let u3_expect: Vec<u64> = vec![297368 * 7, 1977884, 1];
    {
        // backward: u2 = (F - v2^2)/(lc * u3), u1 = sqrt(u2), v1 = v2 mod u1
        let f8 = odd.f.truncate(8);
        let v2p = PadicPoly::new(
            7,
            v2_expect.iter().map(|&c| Padic::from_integer_mod(7, c as i64, 8)).collect(),
        );
        let u3p = PadicPoly::new(
            7,
            u3_expect.iter().map(|&c| Padic::from_integer_mod(7, c as i64, 8)).collect(),
        );
        let g = f8.sub(&v2p.mul(&v2p));
        let lc_inv = g.leading().unwrap().invert().unwrap();
        let gm = g.scale(&lc_inv);
        let (u2, rem) = gm.div_rem(&u3p).unwrap();
        assert!(rem.is_zero(), "printed reduction data is internally consistent");
        let u1_derived = monic_sqrt(&u2, 8).unwrap();
        let v1_derived = v2p.rem(&u1_derived).unwrap();
        for i in 0..3 {
            assert!(u1_derived.coeff(i).agrees_with(&d1.u.coeff(i)), "u1 fixture coeff {i}");
        }
        for i in 0..2 {
            assert!(v1_derived.coeff(i).agrees_with(&d1.v.coeff(i)), "v1 fixture coeff {i}");
        }
    }
    // forward: Cantor doubling
    let (dn, s2) = divisor_multiple(odd, d1, 2).unwrap();
    for (i, &want) in u3_expect.iter().enumerate() {
        assert_eq!(dn.u.coeff(i).residue_u64(8).unwrap(), want % m8, "u3 coeff {i}");
    }
    // s2 = (y - v2)/u3: num_a = -v2, den = u3
    for (i, &want) in v2_expect.iter().enumerate() {
        assert_eq!(
            s2.num_a.coeff(i).neg().residue_u64(8).unwrap(),
            want % m8,
            "v2 coeff {i}"
        );
    }
    let split = split_divisor(odd, &dn, 8).unwrap().unwrap();
    let mut xs: Vec<u64> = split
        .points
        .iter()
        .map(|(pt, _)| pt.x.residue_u64(8).unwrap())
        .collect();
    xs.sort();
    assert_eq!(xs, vec![499647, 469610 * 7]);
    let ys: Vec<u64> = split
        .points
        .iter()
        .map(|(pt, _)| pt.y.residue_u64(8).unwrap())
        .collect();
    assert!(ys.contains(&((-15018865i64).rem_euclid(m8 as i64) as u64)));
    assert!(ys.contains(&((-14480684i64).rem_euclid(m8 as i64) as u64)));

    // Part 2: 500 random compose/reduce operations over two small finite
    // fields against the brute-force class-group oracle, 0 failures.
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for (q, h, f) in [
        (11u64, vec![], vec![1i64, 0, 0, 0, 0, 1]),
        (13u64, vec![0i64, 1], vec![0i64, 1, 0, 0, 0, 1]),
    ] {
        let curve = FqCurve::new(q, &h, &f);
        let reduced = curve.reduced_pairs();
        let model = finite_field_model(q, &h, &f);
        let mut done = 0;
        let mut attempts = 0;
        while done < 250 {
            attempts += 1;
            assert!(attempts < 20000, "oracle sampling starved");
            let a = &reduced[rng.gen_range(0..reduced.len())];
            let b = &reduced[rng.gen_range(0..reduced.len())];
            if a.0.deg() == Some(0) || b.0.deg() == Some(0) {
                continue;
            }
            if a.0.gcd(&b.0).deg() != Some(0) {
                continue;
            }
            let Some(expected) = curve.oracle_add(&reduced, a, b) else {
                continue;
            };
            let da = fq_to_mumford(&model, a);
            let db = fq_to_mumford(&model, b);
            let (comp, _) = chabauty_core::mumford::cantor_compose(&model, &da, &db).unwrap();
            let (red, _) = chabauty_core::mumford::cantor_reduce(&model, &comp).unwrap();
            let got_u: Vec<u64> = (0..=red.degree())
                .map(|i| red.u.coeff(i).residue_u64(1).unwrap_or(0))
                .collect();
            let got_v: Vec<u64> = (0..red.degree().max(1))
                .map(|i| red.v.coeff(i).residue_u64(1).unwrap_or(0))
                .collect();
            let want_u: Vec<u64> = (0..=expected.0.deg().unwrap_or(0))
                .map(|i| expected.0.at(i))
                .collect();
            let want_v: Vec<u64> = (0..expected.0.deg().unwrap_or(0).max(1))
                .map(|i| expected.1.at(i))
                .collect();
            assert_eq!(got_u, want_u, "q={q} u mismatch after {done} checks");
            assert_eq!(got_v, want_v, "q={q} v mismatch");
            done += 1;
        }
    }
    pass("criterion 8 (Cantor fidelity)", t, 30.0);
}

fn finite_field_model(q: u64, h: &[i64], f: &[i64]) -> chabauty_core::curve::HyperellipticModel {
    let conv = |v: &[i64]| {
        PadicPoly::new(
            q,
            v.iter().map(|&c| Padic::from_integer_mod(q, c, 1)).collect(),
        )
    };
    // flavor is bookkeeping only here; the group law itself is flavor-free
    chabauty_core::curve::HyperellipticModel::new(
        q,
        conv(h),
        conv(f),
        2,
        chabauty_core::curve::ModelFlavor::RegularModelChart,
    )
    .unwrap()
}

fn fq_to_mumford(
    model: &chabauty_core::curve::HyperellipticModel,
    d: &(FqPoly, FqPoly),
) -> MumfordDivisor {
    let q = model.p;
    let conv = |v: &FqPoly| {
        PadicPoly::new(
            q,
            v.c.iter().map(|&c| Padic::from_integer_mod(q, c as i64, 1)).collect(),
        )
    };
    MumfordDivisor::new(conv(&d.0), conv(&d.1), -(d.0.deg().unwrap_or(0) as i64)).unwrap()
}

#[test]
fn criterion_09_property_suites() {
    let t = Instant::now();
    let rt = bundle();
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    // biextension compatibility on 1000 random quadruples, exact
    for _ in 0..1000 {
        let (d1, d2, e1, e2) = (
            rng.gen_range(0..2401u64),
            rng.gen_range(0..2401u64),
            rng.gen_range(0..2401u64),
            rng.gen_range(0..2401u64),
        );
        let mut mk = |d: u64, e: u64| chabauty_core::biext::BiextPoint {
            log_d: vec![Padic::from_integer_mod(7, d as i64, 4)],
            log_e: vec![Padic::from_integer_mod(7, e as i64, 4)],
            height: Padic::from_integer_mod(7, rng.gen_range(0..2401), 4),
        };
        let (z11, z12, z21, z22) = (mk(d1, e1), mk(d1, e2), mk(d2, e1), mk(d2, e2));
        let lhs = biext_add(
            &biext_add(&z11, &z12, Leg::Second).unwrap(),
            &biext_add(&z21, &z22, Leg::Second).unwrap(),
            Leg::First,
        )
        .unwrap();
        let rhs = biext_add(
            &biext_add(&z11, &z21, Leg::First).unwrap(),
            &biext_add(&z12, &z22, Leg::First).unwrap(),
            Leg::Second,
        )
        .unwrap();
        assert!(lhs.height.agrees_with(&rhs.height));
        assert!(lhs.log_d[0].agrees_with(&rhs.log_d[0]));
        assert!(lhs.log_e[0].agrees_with(&rhs.log_e[0]));
    }
    // rho vanishes on every Q-generated point, exact
    let ctx = rt.kappa_context("0,-1").unwrap();
    for i in 1..=2usize {
        for j in 1..=2usize {
            let qpt = build_qij(&ctx, 0, i, j, 4).unwrap();
            let mut d = MWVector::zero(2);
            d.0[i - 1] = 1;
            let mut e = MWVector::zero(2);
            e.0[j - 1] = 1;
            let r = rho_n(&ctx, 0, &qpt, &d, &e, 0, 4).unwrap();
            assert!(r.is_zero_at_prec());
        }
    }
    for step in 0..20i64 {
        let n = [step % 5 - 2, (step * 3) % 7 - 3];
        let z = integral_point_at(&ctx, 0, &n, 4).unwrap();
        let mut d = MWVector(ctx.e_base.clone());
        for (ni, row) in n.iter().zip(&ctx.e_kernel) {
            d = d.add(&MWVector(row.clone()).scale(ni * 6));
        }
        let r = rho_n(&ctx, 0, &z, &d, &d, 1, 4).unwrap();
        assert!(r.is_zero_at_prec(), "rho(kappa({n:?})) = {r}");
    }
    // height bilinearity under a synthetic random table, exact
    {
        let labels = vec!["G1".to_string(), "G2".to_string()];
        let mut table = chabauty_core::heights::HeightTable::default();
        for i in 1..=2 {
            for j in 1..=2 {
                table.insert(
                    &format!("G{i}"),
                    &format!("f(G{j})"),
                    Padic::from_integer_mod(7, rng.gen_range(0..343) * 7, 5),
                );
            }
            table.insert(
                &format!("G{i}"),
                "c[f]",
                Padic::from_integer_mod(7, rng.gen_range(0..343) * 7, 5),
            );
        }
        for _ in 0..100 {
            let a = rng.gen_range(-5..=5i64);
            let b = rng.gen_range(-5..=5i64);
            let d1 = MWVector(vec![rng.gen_range(-3..=3), rng.gen_range(-3..=3)]);
            let d2 = MWVector(vec![rng.gen_range(-3..=3), rng.gen_range(-3..=3)]);
            let e = MWVector(vec![rng.gen_range(-3..=3), rng.gen_range(-3..=3)]);
            let h = |v: &MWVector| {
                chabauty_core::heights::global_height(
                    7, v, &e, 1, 1, &table, &labels, "f", &[], 5,
                )
                .unwrap()
            };
            let lhs = h(&d1.scale(a).add(&d2.scale(b)));
            let rhs = h(&d1)
                .mul(&Padic::from_integer(7, a))
                .add(&h(&d2).mul(&Padic::from_integer(7, b)));
            assert!(lhs.agrees_with(&rhs));
        }
    }
    // valuation-profile bounds on the fitted embedding series
    let embed2 = rt.embed("0,-1", 2).unwrap();
    for (coord, f) in embed2.polys.iter().enumerate() {
        let profile = if coord < 2 {
            ValuationProfile::EmbeddingFirstG
        } else {
            ValuationProfile::EmbeddingHeight { v: 0 }
        };
        for (n, c) in f.coeffs.iter().enumerate() {
            if c.is_zero_at_prec() {
                continue;
            }
            let lb = profile.lower_bound(7, n as u64);
            assert!(
                c.valuation().unwrap() >= lb.min(2),
                "coordinate {coord}, coefficient {n} violates the profile bound"
            );
        }
    }
    // precision monotonicity: every pipeline stage commutes with reduction
    let k1 = rt.kappa("0,-1", 1).unwrap();
    let k2 = rt.kappa("0,-1", 2).unwrap();
    for (a, b) in k2.phi.iter().zip(&k1.phi) {
        assert_eq!(a.reduce_to(1), *b, "kappa reduction consistency");
    }
    let embed1 = rt.embed("0,-1", 1).unwrap();
    for (a, b) in embed2.polys.iter().zip(&embed1.polys) {
        for i in 0..=a.degree().unwrap_or(0).max(b.degree().unwrap_or(0)) {
            assert!(
                a.coeff(i).truncate(1).agrees_with(&b.coeff(i).truncate(1)),
                "embedding reduction consistency at coefficient {i}"
            );
        }
    }
    let r1 = rt.run_disk("0,-1", 1).unwrap();
    let r2 = rt.run_disk("0,-1", 2).unwrap();
    assert_eq!(r1.candidates.len(), r2.candidates.len());
    for c2 in &r2.candidates {
        let reduced: Vec<u64> = c2.n.iter().map(|x| x % 7).collect();
        assert!(
            r1.candidates.iter().any(|c1| c1.n == reduced && c1.nu == c2.nu % 7),
            "candidate sets do not reduce onto each other"
        );
    }
    pass("criterion 9 (property suites)", t, 60.0);
}

#[test]
fn criterion_10_hensel_kernel() {
    let t = Instant::now();
    // sqrt(2) in Z_7: brute-force oracle over residues mod 343, frozen
    let mut brute = None;
    for r in 0..343u64 {
        if r % 7 == 3 && (r * r) % 343 == 2 {
            brute = Some(r);
        }
    }
    assert_eq!(brute, Some(108));
    let f = PadicPoly::from_integers(7, &[-2, 0, 1]);
    let r = hensel_lift_univariate(&f, 3, 3).unwrap();
    assert_eq!(r.residue_u64(3).unwrap(), 108);
    // beta and c0 digit-exact mod 7^3
    let rt = bundle();
    assert_eq!(rt.change.beta.residue_u64(3).unwrap(), 4 + 3 * 7 + 4 * 49);
    assert_eq!(rt.change.c0.residue_u64(3).unwrap(), 5 + 3 * 7 + 3 * 49);
    // 50 random unit-Jacobian systems vs exhaustive search mod 7^2
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
    let ring = Zq::new(7, 2);
    let mut done = 0;
    while done < 50 {
        let (x0, y0) = (rng.gen_range(0..7u64), rng.gen_range(0..7u64));
        let mk = |rng: &mut rand_chacha::ChaCha8Rng| {
            let mut f = MultiPoly::zero(ring, 2);
            for e in [[2u32, 0u32], [1, 1], [0, 2], [1, 0], [0, 1]] {
                f.set(e.to_vec(), rng.gen_range(0..49));
            }
            f
        };
        let mut f1 = mk(&mut rng);
        let mut f2 = mk(&mut rng);
        let (xr, yr) = (x0 + 7 * rng.gen_range(0..7u64), y0 + 7 * rng.gen_range(0..7u64));
        let c1 = f1.evaluate(&[xr, yr]);
        let c2 = f2.evaluate(&[xr, yr]);
        f1 = f1.sub(&MultiPoly::constant(ring, 2, c1));
        f2 = f2.sub(&MultiPoly::constant(ring, 2, c2));
        let j: Vec<u64> = [&f1, &f2]
            .iter()
            .flat_map(|f| {
                (0..2).map(|v| f.partial_derivative(v).reduce_to(1).evaluate(&[x0, y0]))
            })
            .collect();
        if (j[0] * j[3] % 7 + 7 - j[1] * j[2] % 7) % 7 == 0 {
            continue;
        }
        done += 1;
        let lifted = hensel_lift_multivariate(&[f1.clone(), f2.clone()], &[x0, y0], 2).unwrap();
        let mut found = vec![];
        for a in 0..7u64 {
            for b in 0..7u64 {
                let cand = [x0 + 7 * a, y0 + 7 * b];
                if f1.evaluate(&cand) == 0 && f2.evaluate(&cand) == 0 {
                    found.push(cand.to_vec());
                }
            }
        }
        assert_eq!(found, vec![lifted]);
    }
    pass("criterion 10 (Hensel kernel)", t, 10.0);
}

/// Supplementary: multiples computed by the group law agree with repeated
/// oracle addition over F_11.
#[test]
fn divisor_multiples_match_oracle_over_f11() {
    let t = Instant::now();
    let q = 11u64;
    let curve = FqCurve::new(q, &[], &[1, 0, 0, 0, 0, 1]);
    let model = finite_field_model(q, &[], &[1, 0, 0, 0, 0, 1]);
    let reduced = curve.reduced_pairs();
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    let mut done = 0;
    let mut attempts = 0;
    while done < 20 && attempts < 3000 {
        attempts += 1;
        let d = &reduced[rng.gen_range(0..reduced.len())];
        if d.0.deg() != Some(2) {
            continue;
        }
        let e = &reduced[rng.gen_range(0..reduced.len())];
        if e.0.deg() != Some(2) || e.0.gcd(&d.0).deg() != Some(0) {
            continue;
        }
        let dm = fq_to_mumford(&model, d);
        // the oracle cannot add a class to itself (shared support), so walk
        // through an auxiliary class E: ((D+E)+D)+D, then subtract E by
        // adding its involution
        let q_ = q;
        let iota_e = {
            let neg_v = FqPoly::zero(q_).sub(&e.1).sub(&curve.h).rem(&e.0);
            (e.0.clone(), neg_v)
        };
        let chain = curve
            .oracle_add(&reduced, d, e)
            .and_then(|f1| curve.oracle_add(&reduced, &f1, d))
            .and_then(|f2| curve.oracle_add(&reduced, &f2, d))
            .and_then(|f3| curve.oracle_add(&reduced, &f3, &iota_e));
        let Some(acc) = chain else {
            continue;
        };
        let (got, _) = divisor_multiple(&model, &dm, 3).unwrap();
        let got_u: Vec<u64> = (0..=got.degree())
            .map(|i| got.u.coeff(i).residue_u64(1).unwrap_or(0))
            .collect();
        let want_u: Vec<u64> = (0..=acc.0.deg().unwrap_or(0)).map(|i| acc.0.at(i)).collect();
        assert_eq!(got_u, want_u, "3D class mismatch");
        done += 1;
    }
    assert!(done >= 10, "not enough multiple checks ran ({done})");
    pass("supplementary (divisor multiples vs oracle)", t, 30.0);
}

/// Supplementary: tracked functions over a small field really do witness
/// the linear equivalences (zeros minus poles tallied over F_q and its
/// quadratic extension).
#[test]
fn tracked_functions_witness_divisors_over_f11() {
    let t = Instant::now();
    let q = 11u64;
    let curve = FqCurve::new(q, &[], &[1, 0, 0, 0, 0, 1]);
    let model = finite_field_model(q, &[], &[1, 0, 0, 0, 0, 1]);
    let reduced = curve.reduced_pairs();
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    let mut attempts = 0;
    while done < 12 && attempts < 4000 {
        attempts += 1;
        let d = &reduced[rng.gen_range(0..reduced.len())];
        if d.0.deg() != Some(2) {
            continue;
        }
        let dm = fq_to_mumford(&model, d);
        let n = 2 + (done % 2) as usize;
        let Ok((dn, s)) = divisor_multiple(&model, &dm, n) else {
            continue;
        };
        if s.is_one() {
            continue;
        }
        // div(s) must equal n*D - div(u_n, v_n) over the curve's points in
        // F_{q^2}
        let want = divisor_difference(&curve, d, &dn, n);
        let got = function_divisor(&curve, &s);
        assert_eq!(got, want, "tracked function divisor mismatch");
        done += 1;
    }
    assert!(done >= 8, "not enough tracked-function checks ran ({done})");
    pass("supplementary (tracked-function divisors)", t, 30.0);
}

type PointKey = (u64, u64, u64, u64);

/// n*D - div(u_n, v_n) as a map from affine F_{q^2} points to multiplicity.
fn divisor_difference(
    curve: &FqCurve,
    d: &(FqPoly, FqPoly),
    dn: &MumfordDivisor,
    n: usize,
) -> BTreeMap<PointKey, i64> {
    let q = curve.q;
    let ctx2 = common::Fq2Ctx::new(q);
    let mut out: BTreeMap<PointKey, i64> = BTreeMap::new();
    let add_mumford = |u: &FqPoly, v: &FqPoly, mult: i64, out: &mut BTreeMap<PointKey, i64>| {
        // points over roots of u in F_{q^2} with y = v(x)
        for a in 0..q {
            for b in 0..q {
                let x = common::Fq2 { a, b };
                let m = fq2_root_multiplicity(&ctx2, u, x) as i64;
                if m > 0 {
                    let y = ctx2.eval_poly(v, x);
                    *out.entry((x.a, x.b, y.a, y.b)).or_default() += mult * m;
                }
            }
        }
    };
    add_mumford(&d.0, &d.1, n as i64, &mut out);
    let un = FqPoly::new(
        q,
        (0..=dn.degree())
            .map(|i| dn.u.coeff(i).residue_u64(1).unwrap_or(0))
            .collect(),
    );
    let vn = FqPoly::new(
        q,
        (0..dn.degree().max(1))
            .map(|i| dn.v.coeff(i).residue_u64(1).unwrap_or(0))
            .collect(),
    );
    add_mumford(&un, &vn, -1, &mut out);
    out.retain(|_, m| *m != 0);
    out
}

/// The divisor of (a + b y)/den over the affine F_{q^2} points.
fn function_divisor(curve: &FqCurve, s: &TrackedFunction) -> BTreeMap<PointKey, i64> {
    let q = curve.q;
    let ctx2 = common::Fq2Ctx::new(q);
    let a = fqpoly_from_padic(q, &s.num_a);
    let b = fqpoly_from_padic(q, &s.num_b);
    let den = fqpoly_from_padic(q, &s.den);
    // norm of the numerator: a^2 - a b h - b^2 f
    let norm = a
        .mul(&a)
        .sub(&a.mul(&b).mul(&curve.h))
        .sub(&b.mul(&b).mul(&curve.f));
    let mut out: BTreeMap<PointKey, i64> = BTreeMap::new();
    for xa in 0..q {
        for xb in 0..q {
            let x = common::Fq2 { a: xa, b: xb };
            let fiber = ctx2.fiber(curve, x);
            if fiber.is_empty() {
                continue;
            }
            let mult_norm = fq2_root_multiplicity(&ctx2, &norm, x);
            let mult_den = fq2_root_multiplicity(&ctx2, &den, x);
            if mult_norm == 0 && mult_den == 0 {
                continue;
            }
            let hx = ctx2.eval_poly(&curve.h, x);
            for &y in &fiber {
                let ramified = ctx2.is_zero(ctx2.add(ctx2.add(y, y), hx));
                // ord of numerator at (x, y)
                let nv = ctx2.add(ctx2.eval_poly(&a, x), ctx2.mul(ctx2.eval_poly(&b, x), y));
                let ord_num = if ramified {
                    mult_norm
                } else if !ctx2.is_zero(nv) {
                    0
                } else {
                    // conjugate value decides how the norm multiplicity splits
                    let yc = ctx2.sub(ctx2.sub(ctx2.from_base(0), hx), y);
                    let ncv =
                        ctx2.add(ctx2.eval_poly(&a, x), ctx2.mul(ctx2.eval_poly(&b, x), yc));
                    if ctx2.is_zero(ncv) {
                        ord_by_series(&ctx2, curve, &a, &b, x, y)
                    } else {
                        mult_norm
                    }
                };
                let ord_den = mult_den * if ramified { 2 } else { 1 };
                let ord = ord_num as i64 - ord_den as i64;
                if ord != 0 {
                    *out.entry((x.a, x.b, y.a, y.b)).or_default() += ord;
                }
            }
        }
    }
    out.retain(|_, m| *m != 0);
    out
}

fn fqpoly_from_padic(q: u64, f: &PadicPoly) -> FqPoly {
    FqPoly::new(
        q,
        (0..=f.degree().unwrap_or(0))
            .map(|i| f.coeff(i).residue_u64(1).unwrap_or(0))
            .collect(),
    )
}

fn fq2_root_multiplicity(ctx: &common::Fq2Ctx, f: &FqPoly, x: common::Fq2) -> u64 {
    // repeated synthetic division of f (base coefficients) by (X - x) in F_{q^2}
    let mut coeffs: Vec<common::Fq2> = f.c.iter().map(|&c| ctx.from_base(c)).collect();
    let mut m = 0u64;
    loop {
        if coeffs.is_empty() {
            break;
        }
        // evaluate
        let mut acc = ctx.from_base(0);
        for &c in coeffs.iter().rev() {
            acc = ctx.add(ctx.mul(acc, x), c);
        }
        if !ctx.is_zero(acc) {
            break;
        }
        // divide
        let mut quot = vec![ctx.from_base(0); coeffs.len().saturating_sub(1)];
        let mut carry = ctx.from_base(0);
        for i in (0..coeffs.len()).rev() {
            if i == 0 {
                break;
            }
            let c = ctx.add(coeffs[i], carry);
            quot[i - 1] = c;
            carry = ctx.mul(c, x);
        }
        coeffs = quot;
        m += 1;
        if m > 40 {
            panic!("runaway multiplicity");
        }
    }
    m
}

/// Order of vanishing of a + b y at a non-ramified point where both
/// conjugate values vanish: expand y as a series in t = x - x0.
fn ord_by_series(
    ctx: &common::Fq2Ctx,
    curve: &FqCurve,
    a: &FqPoly,
    b: &FqPoly,
    x0: common::Fq2,
    y0: common::Fq2,
) -> u64 {
    let len = a.c.len().max(b.c.len()) + 6;
    let zero = ctx.from_base(0);
    let shift = |f: &FqPoly| -> Vec<common::Fq2> {
        // f(x0 + t) by Horner on the series x0 + t
        let mut acc = vec![zero; len];
        for &c in f.c.iter().rev() {
            // acc = acc * (x0 + t) + c
            let mut next = vec![zero; len];
            for i in 0..len {
                next[i] = ctx.add(next[i], ctx.mul(acc[i], x0));
                if i + 1 < len {
                    next[i + 1] = ctx.add(next[i + 1], acc[i]);
                }
            }
            next[0] = ctx.add(next[0], ctx.from_base(c));
            acc = next;
        }
        acc
    };
    let hs = shift(&curve.h);
    let fs = shift(&curve.f);
    let smul = |u: &[common::Fq2], v: &[common::Fq2]| {
        let mut out = vec![zero; len];
        for i in 0..len {
            for j in 0..len - i {
                out[i + j] = ctx.add(out[i + j], ctx.mul(u[i], v[j]));
            }
        }
        out
    };
    let ssub = |u: &[common::Fq2], v: &[common::Fq2]| {
        (0..len).map(|i| ctx.sub(u[i], v[i])).collect::<Vec<_>>()
    };
    let sinv = |u: &[common::Fq2]| {
        let c0 = ctx.inv(u[0]);
        let mut inv = vec![zero; len];
        inv[0] = c0;
        for i in 1..len {
            let mut s = zero;
            for j in 1..=i {
                s = ctx.add(s, ctx.mul(u[j], inv[i - j]));
            }
            inv[i] = ctx.sub(zero, ctx.mul(s, c0));
        }
        inv
    };
    let mut y = vec![zero; len];
    y[0] = y0;
    for _ in 0..len + 2 {
        let val = ssub(&smul(&y, &y).iter().zip(smul(&hs, &y)).map(|(u, v)| ctx.add(*u, v)).collect::<Vec<_>>(), &fs);
        let deriv: Vec<common::Fq2> = (0..len)
            .map(|i| ctx.add(ctx.add(y[i], y[i]), hs[i]))
            .collect();
        let corr = smul(&val, &sinv(&deriv));
        y = (0..len).map(|i| ctx.sub(y[i], corr[i])).collect();
    }
    let num: Vec<common::Fq2> = {
        let asr = shift(a);
        let bsr = shift(b);
        let by = smul(&bsr, &y);
        (0..len).map(|i| ctx.add(asr[i], by[i])).collect()
    };
    num.iter().position(|c| !ctx.is_zero(*c)).unwrap_or(len) as u64
}
