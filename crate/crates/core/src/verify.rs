//! The verify-example runner: recompute every pipeline stage on the shipped
//! bundle and diff the results against the embedded expected table. Used by
//! the CLI `verify-example` subcommand; deterministic and bit-identical
//! across runs.

use crate::error::Result;
use crate::fixtures::{geo_set, Runtime, SweepOutcome};
use crate::zq::MultiPoly;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub got: String,
    pub want: String,
}

fn check(out: &mut Vec<Check>, name: &str, got: impl ToString, want: impl ToString) {
    let got = got.to_string();
    let want = want.to_string();
    out.push(Check { name: name.to_string(), pass: got == want, got, want });
}

fn poly_mod_p(f: &MultiPoly) -> String {
    let g = f.reduce_to(1);
    let mut terms: Vec<String> = g
        .terms
        .iter()
        .map(|(e, c)| format!("{c}*n^{e:?}"))
        .collect();
    terms.sort();
    terms.join(" + ")
}

/// Run the full reproduction and return one entry per checked value.
pub fn verify_example(rt: &Runtime) -> Result<Vec<Check>> {
    let mut out = vec![];
    let main_disk = "0,-1";

    // model-change constants
    check(
        &mut out,
        "even-model root beta mod 7^3",
        rt.change.beta.residue_u64(3)?,
        221u64,
    );
    check(
        &mut out,
        "fifth root c0 mod 7^3",
        rt.change.c0.residue_u64(3)?,
        173u64,
    );

    // height pipeline at the first two samples
    let psi0 = rt.psi_at_sample(main_disk, 0, 2)?;
    check(&mut out, "psi at sample 0 mod 7^2", psi0.residue_u64(2)?, 42u64);
    let psi1 = rt.psi_at_sample(main_disk, 1, 2)?;
    check(&mut out, "psi at sample 1 mod 7^2", psi1.residue_u64(2)?, 35u64);
    let psi0_full = rt.psi_at_sample(main_disk, 0, 4)?;
    check(&mut out, "psi at sample 0 mod 7^4", psi0_full.residue_u64(4)?, 1365u64);

    // embedding mod 7: (2 nu, 0, 6 - nu)
    let embed = rt.embed(main_disk, 1)?;
    let ec = |i: usize, j: usize| -> Result<u64> {
        Ok(embed.polys[i].coeff(j).truncate(1).residue_u64(1).unwrap_or(0))
    };
    check(&mut out, "embedding coordinate 1", format!("{}+{}nu", ec(0, 0)?, ec(0, 1)?), "0+2nu");
    check(&mut out, "embedding coordinate 2", format!("{}+{}nu", ec(1, 0)?, ec(1, 1)?), "0+0nu");
    check(&mut out, "embedding coordinate 3", format!("{}+{}nu", ec(2, 0)?, ec(2, 1)?), "6+6nu");

    // elimination mod 7, in the pivot-normalized form x_j - series(x_1)
    let gs = crate::disk::eliminate_embedding(&embed, rt.p, 1)?;
    check(&mut out, "defining equation 1 mod 7", poly_mod_p(&gs[0]), "1*n^[0, 1, 0]");
    check(
        &mut out,
        "defining equation 2 mod 7",
        poly_mod_p(&gs[1]),
        "1*n^[0, 0, 0] + 1*n^[0, 0, 1] + 4*n^[1, 0, 0]",
    );

    // kappa tables
    let k3 = rt.kappa(main_disk, 3)?;
    let rows: Vec<(String, &MultiPoly, [u64; 3])> = vec![
        ("first leg coordinate 1".into(), &k3.kappa_z_first[0], [399, 1372, 623]),
        ("first leg coordinate 2".into(), &k3.kappa_z_first[1], [1267, 35, 1274]),
        ("second leg coordinate 1".into(), &k3.kappa_z_second[0][0], [2345, 2170, 1603]),
        ("second leg coordinate 2".into(), &k3.kappa_z_second[0][1], [1204, 168, 714]),
    ];
    for (name, f, want) in rows {
        check(
            &mut out,
            &format!("kappa {name} mod 7^4"),
            format!("{} {} {}", f.coeff(&[1, 0]), f.coeff(&[0, 1]), f.coeff(&[0, 0])),
            format!("{} {} {}", want[0], want[1], want[2]),
        );
    }
    let h = &k3.kappa_z_height[0];
    check(
        &mut out,
        "kappa height row mod 7^4",
        format!(
            "{} {} {} {} {} {}",
            h.coeff(&[2, 0]),
            h.coeff(&[1, 1]),
            h.coeff(&[0, 2]),
            h.coeff(&[1, 0]),
            h.coeff(&[0, 1]),
            h.coeff(&[0, 0])
        ),
        "1351 1463 882 875 350 1365",
    );
    let k1 = rt.kappa(main_disk, 1)?;
    check(
        &mut out,
        "phi o kappa mod 7",
        k1.phi.iter().map(poly_mod_p).collect::<Vec<_>>().join(" ; "),
        "1*n^[1, 0] ; 5*n^[0, 1] + 6*n^[1, 0] ; 1*n^[0, 1] + 4*n^[2, 0] + 6*n^[0, 0] + 6*n^[1, 0] + 6*n^[1, 1]",
    );

    // solver on the main disk
    let report = rt.run_disk(main_disk, 1)?;
    check(&mut out, "finiteness flag on the main disk", report.finite, true);
    check(&mut out, "solution-count bound", format!("{:?}", report.bound), "Some(2)");
    let mut sols: Vec<(Vec<u64>, u64)> =
        report.candidates.iter().map(|c| (c.n.clone(), c.nu)).collect();
    sols.sort();
    check(
        &mut out,
        "mod-p solutions and disk parameters",
        format!("{sols:?}"),
        "[([0, 0], 0), ([1, 3], 4)]",
    );
    for c in &report.candidates {
        let x = c.point.x.residue_u64(2)?;
        let y = c.point.y.residue_u64(2)?;
        match c.nu {
            0 => check(&mut out, "candidate point at nu = 0 mod 7^2", format!("({x},{y})"), "(0,48)"),
            4 => check(&mut out, "candidate point at nu = 4 mod 7^2", format!("({x},{y})"), "(28,48)"),
            other => check(&mut out, &format!("unexpected candidate nu = {other}"), "present", "absent"),
        }
    }

    // higher-disk refinement at the second candidate
    let refined = rt.refine(main_disk, &[1, 3], 4)?;
    check(&mut out, "refined intersection count", refined.len(), 1usize);
    if let Some(r) = refined.first() {
        check(&mut out, "refined torsor point", format!("{:?}", r.torsor_point), "[5, 1, 5]");
        check(
            &mut out,
            "refined candidate mod 7^3",
            format!("({},{})", r.point.x.residue_u64(3)?, r.point.y.residue_u64(3)?),
            "(224,342)",
        );
    }

    // Cantor reproduction mod 7^8 from the shipped Mumford fixture
    let samples = rt.disk_samples.get(main_disk).unwrap();
    if let Some(alpha) = &samples[&1].alpha {
        let d1 = alpha.mumford.as_ref().unwrap();
        let (dn, s2) = crate::mumford::divisor_multiple(&rt.change.odd, d1, 2)?;
        let m8 = 7u64.pow(8);
        check(
            &mut out,
            "reduced doubling u3 mod 7^8",
            format!(
                "{} {} {}",
                dn.u.coeff(0).residue_u64(8)?,
                dn.u.coeff(1).residue_u64(8)?,
                dn.u.coeff(2).residue_u64(8)?
            ),
            format!("{} {} {}", 297368 * 7, 1977884, 1),
        );
        let v2: Vec<u64> = (0..4)
            .map(|i| s2.num_a.coeff(i).neg().residue_u64(8))
            .collect::<Result<_>>()?;
        check(
            &mut out,
            "doubling v2 mod 7^8",
            format!("{v2:?}"),
            format!(
                "{:?}",
                vec![
                    (-1649234i64).rem_euclid(m8 as i64) as u64,
                    1999391u64,
                    73804,
                    (-462222i64).rem_euclid(m8 as i64) as u64
                ]
            ),
        );
        let split = crate::mumford::split_divisor(&rt.change.odd, &dn, 8)?.unwrap();
        let mut xs: Vec<u64> = split
            .points
            .iter()
            .map(|(pt, _)| pt.x.residue_u64(8).unwrap())
            .collect();
        xs.sort();
        check(&mut out, "splitting x-coordinates mod 7^8", format!("{xs:?}"), "[499647, 3287270]");
    }

    // Q-table heights straight from the fixtures
    let ctx = rt.kappa_context(main_disk)?;
    let q11 = crate::biext::build_qij(&ctx, 0, 1, 1, 4)?;
    check(&mut out, "Q11 height mod 7^4", q11.height.residue_u64(4)?, 1729u64);
    let q20 = crate::biext::build_qij(&ctx, 0, 2, 0, 4)?;
    check(&mut out, "Q20 height mod 7^4", q20.height.residue_u64(4)?, 700u64);

    // degenerate disk
    let degenerate = rt.run_disk("1,4", 1)?;
    check(&mut out, "finiteness flag on the degenerate disk", degenerate.finite, false);

    // whole-curve sweep: candidate points of the processed disks
    let entries = geo_set(rt, 1)?;
    let mut summary = vec![];
    for e in &entries {
        match &e.outcome {
            SweepOutcome::Report(r) => {
                if r.finite {
                    for c in &r.candidates {
                        summary.push(format!(
                            "{}:({},{})",
                            e.disk_id,
                            c.point.x.residue_u64(2)?,
                            c.point.y.residue_u64(2)?
                        ));
                    }
                } else {
                    summary.push(format!("{}:infinite-family", e.disk_id));
                }
            }
            SweepOutcome::Involution { candidates, .. } => {
                for (pt, _) in candidates {
                    summary.push(format!(
                        "{}:({},{})",
                        e.disk_id,
                        pt.x.residue_u64(2)?,
                        pt.y.residue_u64(2)?
                    ));
                }
            }
            SweepOutcome::SieveEmpty => summary.push(format!("{}:sieve-empty", e.disk_id)),
            SweepOutcome::Unprocessed(_) => summary.push(format!("{}:unprocessed", e.disk_id)),
        }
    }
    summary.sort();
    check(
        &mut out,
        "sweep summary",
        summary.join(" "),
        "0,-1:(0,48) 0,-1:(28,48) 0,0:(0,0) 0,0:(28,21) 1,0:(1,0) 1,0:(15,35) \
         1,4:infinite-family 4,4:unprocessed 6,0:sieve-empty 6,1:sieve-empty \
         inf+:unprocessed inf-:unprocessed",
    );

    Ok(out)
}
