//! JSON report shapes for the CLI, with provenance tags on every number
//! (fixture label vs computed).

use chabauty_core::curve::CurvePoint;
use chabauty_core::disk::{DiskReport, RefinedCandidate};
use chabauty_core::fixtures::{GeoSetEntry, PadicJson, SweepOutcome};
use chabauty_core::zq::MultiPoly;
use chabauty_core::{Padic, Result};
use serde::Serialize;

#[derive(Serialize)]
pub struct NumberOut {
    pub value: PadicJson,
    pub display: String,
    /// "computed" or "fixture:<label>"
    pub provenance: String,
}

pub fn number(x: &Padic, prec: i64, provenance: &str) -> Result<NumberOut> {
    let t = x.truncate(prec);
    Ok(NumberOut {
        value: PadicJson::from_padic(&t)?,
        display: t.expansion_string(),
        provenance: provenance.to_string(),
    })
}

#[derive(Serialize)]
pub struct PointOut {
    pub x: NumberOut,
    pub y: NumberOut,
}

pub fn point(pt: &CurvePoint, prec: i64, provenance: &str) -> Result<PointOut> {
    Ok(PointOut {
        x: number(&pt.x, prec, provenance)?,
        y: number(&pt.y, prec, provenance)?,
    })
}

#[derive(Serialize)]
pub struct PolyOut {
    /// monomial exponent vector and coefficient residue
    pub terms: Vec<(Vec<u32>, u64)>,
    pub modulus: u64,
}

pub fn multipoly(f: &MultiPoly) -> PolyOut {
    PolyOut {
        terms: f.terms.iter().map(|(e, c)| (e.clone(), *c)).collect(),
        modulus: f.ring.modulus,
    }
}

#[derive(Serialize)]
pub struct EmbedOut {
    pub disk: String,
    pub precision: i64,
    /// coefficients of each coordinate polynomial in the disk parameter
    pub coordinates: Vec<Vec<NumberOut>>,
}

#[derive(Serialize)]
pub struct CandidateOut {
    pub n: Vec<u64>,
    pub nu: u64,
    pub point: PointOut,
    pub lifted: bool,
}

#[derive(Serialize)]
pub struct DiskReportOut {
    pub disk: String,
    pub center: (u64, u64),
    pub precision: i64,
    pub defining_equations: Vec<PolyOut>,
    pub composed_system: Vec<PolyOut>,
    pub finite: bool,
    pub bound: Option<usize>,
    pub candidates: Vec<CandidateOut>,
}

pub fn disk_report(r: &DiskReport) -> Result<DiskReportOut> {
    Ok(DiskReportOut {
        disk: r.disk_id.clone(),
        center: r.center,
        precision: r.k,
        defining_equations: r.g_equations.iter().map(multipoly).collect(),
        composed_system: r.composed.iter().map(multipoly).collect(),
        finite: r.finite,
        bound: r.bound,
        candidates: r
            .candidates
            .iter()
            .map(|c| {
                Ok(CandidateOut {
                    n: c.n.clone(),
                    nu: c.nu,
                    point: point(&c.point, r.k + 1, "computed")?,
                    lifted: c.lifted,
                })
            })
            .collect::<Result<_>>()?,
    })
}

#[derive(Serialize)]
pub struct RefinedOut {
    pub n: Vec<u64>,
    pub nu: u64,
    pub torsor_point: Vec<u64>,
    pub point: PointOut,
}

pub fn refined(r: &RefinedCandidate) -> Result<RefinedOut> {
    Ok(RefinedOut {
        n: r.n.clone(),
        nu: r.nu,
        torsor_point: r.torsor_point.clone(),
        point: point(&r.point, 3, "computed")?,
    })
}

#[derive(Serialize)]
pub struct SweepEntryOut {
    pub disk: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<DiskReportOut>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub involution_candidates: Vec<PointOut>,
}

pub fn sweep(entries: &[GeoSetEntry]) -> Result<Vec<SweepEntryOut>> {
    entries
        .iter()
        .map(|e| {
            Ok(match &e.outcome {
                SweepOutcome::Report(r) => SweepEntryOut {
                    disk: e.disk_id.clone(),
                    status: if r.finite { "processed".into() } else { "infinite-family".into() },
                    report: Some(disk_report(r)?),
                    involution_candidates: vec![],
                },
                SweepOutcome::Involution { of, candidates } => SweepEntryOut {
                    disk: e.disk_id.clone(),
                    status: format!("involution-image-of {of}"),
                    report: None,
                    involution_candidates: candidates
                        .iter()
                        .map(|(pt, _)| point(pt, 2, "computed"))
                        .collect::<Result<_>>()?,
                },
                SweepOutcome::SieveEmpty => SweepEntryOut {
                    disk: e.disk_id.clone(),
                    status: "skipped: empty integral disk (fails the sieve at p)".into(),
                    report: None,
                    involution_candidates: vec![],
                },
                SweepOutcome::Unprocessed(reason) => SweepEntryOut {
                    disk: e.disk_id.clone(),
                    status: format!("unprocessed: {reason}"),
                    report: None,
                    involution_candidates: vec![],
                },
            })
        })
        .collect()
}
