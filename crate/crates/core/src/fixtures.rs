//! The on-disk fixture schema (versioned JSON), config validation, and the
//! orchestration that assembles runtime objects and sweeps residue disks.
//!
//! p-adic numbers serialize as `{"p": prime, "digits": [d0, ...], "val": v}`
//! with little-endian base-p digits of the unit part; the absolute precision
//! is `val + digits.len()`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::biext::{kappa_poly, KappaContext, PolyMapKappa};
use crate::curve::{disk_point, CurvePoint, HyperellipticModel, ModelFlavor, OddModelChange};
use crate::disk::{
    embed_disk, eliminate_embedding, refine_higher_disk, solve_disk, DiskInput, DiskReport,
    DiskSample, EmbedMap, RefinedCandidate,
};
use crate::error::{Error, Result};
use crate::heights::{
    compute_vq, FiberComponentData, FixtureHeightEntry, FixtureOracle, HeightTable,
    OracleKey, RestrictedDivisor,
};
use crate::mumford::{MumfordDivisor, TrackedFunction};
use crate::mw::{EndoData, MWVector};
use crate::padic::{Padic, Prec};
use crate::padic_poly::PadicPoly;

/// Internal working precision for model changes and point lifts.
const WORK_PREC: i64 = 12;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PadicJson {
    pub p: u64,
    pub digits: Vec<u64>,
    pub val: i64,
}

impl PadicJson {
    pub fn to_padic(&self) -> Padic {
        Padic::from_unit_digits(self.p, &self.digits, self.val)
    }

    pub fn from_padic(x: &Padic) -> Result<PadicJson> {
        let p = x.prime();
        match x.precision() {
            Prec::Exact => Err(Error::SchemaError(
                "cannot serialize an exact value; truncate first".into(),
            )),
            Prec::Mod(n) => {
                let val = x.valuation().unwrap_or(n);
                let len = (n - val).max(0) as usize;
                Ok(PadicJson { p, digits: x.unit_digits(len), val })
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigFile {
    pub schema_version: u32,
    pub prime: u64,
    pub genus: usize,
    pub rank: usize,
    pub neron_severi_rank: usize,
    pub curve: CurveSection,
    pub base_point: PointJson,
    pub points: BTreeMap<String, PointJson>,
    pub mordell_weil: MwSection,
    pub endomorphisms: Vec<EndoSection>,
    pub heights: Vec<HeightPairJson>,
    pub simple_opens: Vec<SimpleOpenSection>,
    pub tracked_functions: BTreeMap<String, TrackedFnJson>,
    pub disks: Vec<DiskSection>,
    /// the constant v in the height-coordinate valuation profile
    #[serde(default)]
    pub v_constant: i64,
    /// splitting-search bound
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

fn default_n_max() -> usize {
    4
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveSection {
    /// regular chart y^2 + h(x) y = f(x), integer coefficients low-to-high
    pub regular_h: Vec<i64>,
    pub regular_f: Vec<i64>,
    /// even-degree model y^2 = g(x) (the completed square)
    pub even_f: Vec<i64>,
    /// mod-p residues seeding the odd-degree model change
    pub beta_residue: u64,
    pub c0_residue: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum PointJson {
    Affine { x: i64, y: i64 },
    Infinity { infinity: i32 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MwSection {
    pub labels: Vec<String>,
    /// descriptive divisor expressions for the generators (bookkeeping only)
    #[serde(default)]
    pub generators: BTreeMap<String, Vec<(String, i64)>>,
    /// Coleman logarithms of the generators
    pub logs: BTreeMap<String, Vec<PadicJson>>,
    /// kernel-of-reduction basis rows in generator coordinates
    pub e_kernel: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EndoSection {
    pub label: String,
    pub mw_matrix: Vec<Vec<i64>>,
    pub c: Vec<i64>,
    pub m: i64,
    #[serde(default)]
    pub differential_matrix: Option<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeightPairJson {
    pub left: String,
    pub right: String,
    pub value: PadicJson,
    /// "p" for the good prime; a number names a bad prime
    pub place: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimpleOpenSection {
    pub id: String,
    pub bad_fibers: Vec<FiberComponentData>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrackedFnJson {
    pub num_a: Vec<i64>,
    pub num_b: Vec<i64>,
    pub den: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiskSection {
    pub id: String,
    pub center: PointJson,
    pub status: DiskStatusJson,
    #[serde(default)]
    pub e_base: Vec<i64>,
    #[serde(default)]
    pub samples: Vec<SampleSection>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum DiskStatusJson {
    Process,
    InvolutionOf(String),
    SieveEmpty,
    Unprocessed(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleSection {
    pub nu: u64,
    pub log: Vec<PadicJson>,
    /// absent for the base-point sample z = b
    #[serde(default)]
    pub alpha: Option<AlphaSection>,
    #[serde(default)]
    pub oracle: Vec<OracleEntryJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlphaSection {
    #[serde(default)]
    pub mumford: Option<MumfordJson>,
    /// signed point part by label into the points table
    #[serde(default)]
    pub points: Vec<(String, i64)>,
    /// tracked-function labels
    #[serde(default)]
    pub tracked: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MumfordJson {
    /// odd-model Mumford data; coefficients as p-adic digit bundles
    pub u: Vec<PadicJson>,
    pub v: Vec<PadicJson>,
    pub base_multiple: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleEntryJson {
    pub n: usize,
    pub value: PadicJson,
    #[serde(default)]
    pub expect_points: Vec<ExpectPointJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpectPointJson {
    pub x: PadicJson,
    pub y: PadicJson,
    pub mult: i64,
}

/// Everything the pipeline needs, assembled and validated from a config.
pub struct Runtime {
    pub config: ConfigFile,
    pub p: u64,
    pub regular: HyperellipticModel,
    pub change: OddModelChange,
    pub oracle: FixtureOracle,
    pub table: HeightTable,
    pub logs: BTreeMap<String, Vec<Padic>>,
    pub endos: Vec<EndoData>,
    pub endo_labels: Vec<String>,
    pub away: Vec<(u64, i64)>,
    pub disk_samples: BTreeMap<String, BTreeMap<u64, DiskSample>>,
    pub tracked: BTreeMap<String, TrackedFunction>,
}

/// Parse and validate a config file.
pub fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::SchemaError(format!("cannot read {}: {e}", path.display())))?;
    let cfg: ConfigFile = serde_json::from_str(&text)
        .map_err(|e| Error::SchemaError(format!("cannot parse {}: {e}", path.display())))?;
    validate_config(&cfg)?;
    Ok(cfg)
}

pub fn validate_config(cfg: &ConfigFile) -> Result<()> {
    if cfg.schema_version != 1 {
        return Err(Error::SchemaError(format!(
            "unsupported schema_version {}",
            cfg.schema_version
        )));
    }
    if cfg.prime < 3 || cfg.prime % 2 == 0 {
        return Err(Error::InvariantViolation(format!(
            "p = {} must be an odd prime greater than 2",
            cfg.prime
        )));
    }
    let rho = cfg.neron_severi_rank;
    if cfg.rank >= cfg.genus + rho - 1 {
        return Err(Error::InvariantViolation(format!(
            "need r < g + rho - 1, got r = {}, g + rho - 1 = {}",
            cfg.rank,
            cfg.genus + rho - 1
        )));
    }
    if cfg.endomorphisms.len() != rho - 1 {
        return Err(Error::InvariantViolation(format!(
            "expected rho - 1 = {} endomorphisms, got {}",
            rho - 1,
            cfg.endomorphisms.len()
        )));
    }
    // good reduction: p must not divide the discriminant of the model
    let model = HyperellipticModel::from_integer_polys(
        cfg.prime,
        &cfg.curve.regular_h,
        &cfg.curve.regular_f,
        cfg.genus,
        ModelFlavor::RegularModelChart,
    )?;
    let v = model.discriminant_valuation()?;
    if v != 0 {
        return Err(Error::InvariantViolation(format!(
            "p = {} divides the model discriminant (valuation {v}); not a good prime",
            cfg.prime
        )));
    }
    for e in &cfg.endomorphisms {
        EndoData {
            mw_matrix: e.mw_matrix.clone(),
            c: MWVector(e.c.clone()),
            m: e.m,
            differential_matrix: e.differential_matrix.clone(),
        }
        .check_trace_zero()?;
    }
    Ok(())
}

impl Runtime {
    pub fn build(cfg: ConfigFile) -> Result<Runtime> {
        validate_config(&cfg)?;
        let p = cfg.prime;
        let regular = HyperellipticModel::from_integer_polys(
            p,
            &cfg.curve.regular_h,
            &cfg.curve.regular_f,
            cfg.genus,
            ModelFlavor::RegularModelChart,
        )?;
        let even = HyperellipticModel::from_integer_polys(
            p,
            &[],
            &cfg.curve.even_f,
            cfg.genus,
            ModelFlavor::EvenDegree,
        )?;
        let change = OddModelChange::new(
            &even,
            &regular.h,
            cfg.curve.beta_residue,
            cfg.curve.c0_residue,
            WORK_PREC,
        )?;
        let mut table = HeightTable::default();
        for pair in &cfg.heights {
            table.insert(&pair.left, &pair.right, pair.value.to_padic());
        }
        let logs: BTreeMap<String, Vec<Padic>> = cfg
            .mordell_weil
            .logs
            .iter()
            .map(|(k, v)| (k.clone(), v.iter().map(|x| x.to_padic()).collect()))
            .collect();
        let endos: Vec<EndoData> = cfg
            .endomorphisms
            .iter()
            .map(|e| EndoData {
                mw_matrix: e.mw_matrix.clone(),
                c: MWVector(e.c.clone()),
                m: e.m,
                differential_matrix: e.differential_matrix.clone(),
            })
            .collect();
        let endo_labels: Vec<String> = cfg.endomorphisms.iter().map(|e| e.label.clone()).collect();
        // away-from-p constants from the simple-open fiber data
        let mut away = vec![];
        for open in &cfg.simple_opens {
            for fiber in &open.bad_fibers {
                away.push((fiber.q, compute_vq(fiber)?));
            }
        }
        let tracked: BTreeMap<String, TrackedFunction> = cfg
            .tracked_functions
            .iter()
            .map(|(k, t)| {
                (
                    k.clone(),
                    TrackedFunction {
                        num_a: PadicPoly::from_integers(p, &t.num_a),
                        num_b: PadicPoly::from_integers(p, &t.num_b),
                        den: PadicPoly::from_integers(p, &t.den),
                    },
                )
            })
            .collect();
        // resolve labelled points to regular and odd model coordinates
        let resolve = |label: &str| -> Result<CurvePoint> {
            let pj = cfg
                .points
                .get(label)
                .ok_or_else(|| Error::MissingFixture(format!("point {label}")))?;
            Ok(point_from_json(p, pj))
        };
        let b_reg = point_from_json(p, &cfg.base_point);
        let b_odd = change.regular_to_odd(&b_reg)?;
        let mut oracle_entries = BTreeMap::new();
        let mut disk_samples: BTreeMap<String, BTreeMap<u64, DiskSample>> = BTreeMap::new();
        for disk in &cfg.disks {
            if disk.status != DiskStatusJson::Process {
                continue;
            }
            let center = match disk.center {
                PointJson::Affine { x, y } => {
                    (x.rem_euclid(p as i64) as u64, y.rem_euclid(p as i64) as u64)
                }
                PointJson::Infinity { .. } => {
                    return Err(Error::InvariantViolation(format!(
                        "disk {} has an infinite center but is marked for processing",
                        disk.id
                    )));
                }
            };
            let mut samples = BTreeMap::new();
            for s in &disk.samples {
                let z_reg = disk_point(
                    &regular,
                    center,
                    &Padic::from_integer(p, s.nu as i64),
                    WORK_PREC,
                )?;
                let is_base = s.alpha.is_none();
                let (z_odd_pts, z_reg_pts) = if is_base {
                    (vec![], vec![])
                } else {
                    let z_odd = change.regular_to_odd(&z_reg)?;
                    (
                        vec![(z_odd, 1i64), (b_odd.clone(), -1i64)],
                        vec![(z_reg.clone(), 1i64), (b_reg.clone(), -1i64)],
                    )
                };
                let alpha = match &s.alpha {
                    None => None,
                    Some(a) => {
                        let mumford = match &a.mumford {
                            None => None,
                            Some(mj) => Some(MumfordDivisor::new(
                                PadicPoly::new(p, mj.u.iter().map(|c| c.to_padic()).collect()),
                                PadicPoly::new(p, mj.v.iter().map(|c| c.to_padic()).collect()),
                                mj.base_multiple,
                            )?),
                        };
                        let mut points = vec![];
                        for (label, mult) in &a.points {
                            let pt_reg = resolve(label)?;
                            let pt_odd = change.regular_to_odd(&pt_reg)?;
                            points.push((pt_odd, *mult));
                        }
                        let mut tfs = vec![];
                        for tl in &a.tracked {
                            tfs.push(
                                tracked
                                    .get(tl)
                                    .ok_or_else(|| {
                                        Error::MissingFixture(format!("tracked function {tl}"))
                                    })?
                                    .clone(),
                            );
                        }
                        Some(RestrictedDivisor { mumford, points, tracked: tfs })
                    }
                };
                for entry in &s.oracle {
                    oracle_entries.insert(
                        OracleKey { disk: disk.id.clone(), nu: s.nu, n: entry.n },
                        FixtureHeightEntry {
                            value: entry.value.to_padic(),
                            expect_points: entry
                                .expect_points
                                .iter()
                                .map(|ep| {
                                    (
                                        CurvePoint::affine(ep.x.to_padic(), ep.y.to_padic()),
                                        ep.mult,
                                    )
                                })
                                .collect(),
                        },
                    );
                }
                samples.insert(
                    s.nu,
                    DiskSample {
                        log: s.log.iter().map(|x| x.to_padic()).collect(),
                        alpha,
                        z_minus_b_odd: z_odd_pts,
                        z_minus_b_regular: z_reg_pts,
                    },
                );
            }
            disk_samples.insert(disk.id.clone(), samples);
        }
        Ok(Runtime {
            config: cfg,
            p,
            regular,
            change,
            oracle: FixtureOracle { entries: oracle_entries },
            table,
            logs,
            endos,
            endo_labels,
            away,
            disk_samples,
            tracked,
        })
    }

    pub fn disk_section(&self, disk_id: &str) -> Result<&DiskSection> {
        self.config
            .disks
            .iter()
            .find(|d| d.id == disk_id)
            .ok_or_else(|| Error::MissingFixture(format!("disk {disk_id}")))
    }

    /// The residue-disk context: base coordinates from the disk record,
    /// normalization offsets from the nu = 0 sample.
    pub fn kappa_context(&self, disk_id: &str) -> Result<KappaContext> {
        let disk = self.disk_section(disk_id)?;
        if disk.e_base.len() != self.config.mordell_weil.labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "disk {disk_id} base coordinates have wrong length"
            )));
        }
        let samples = self
            .disk_samples
            .get(disk_id)
            .ok_or_else(|| Error::MissingFixture(format!("samples for disk {disk_id}")))?;
        let s0 = samples
            .get(&0)
            .ok_or_else(|| Error::MissingFixture(format!("disk {disk_id} sample nu = 0")))?;
        Ok(KappaContext {
            p: self.p,
            genus: self.config.genus,
            rank: self.config.rank,
            rprime: self.config.mordell_weil.labels.len(),
            labels: self.config.mordell_weil.labels.clone(),
            e_base: disk.e_base.clone(),
            e_kernel: self.config.mordell_weil.e_kernel.clone(),
            endos: self.endos.clone(),
            endo_labels: self.endo_labels.clone(),
            logs: self.logs.clone(),
            table: self.table.clone(),
            log_offset: s0.log.clone(),
            psi_offset: vec![Padic::zero_mod(self.p, WORK_PREC); self.endos.len()],
        })
    }

    pub fn disk_input<'a>(&'a self, disk_id: &str) -> Result<DiskInput<'a>> {
        let disk = self.disk_section(disk_id)?;
        let center = match disk.center {
            PointJson::Affine { x, y } => (
                x.rem_euclid(self.p as i64) as u64,
                y.rem_euclid(self.p as i64) as u64,
            ),
            PointJson::Infinity { .. } => {
                return Err(Error::InvariantViolation("infinite disk center".into()))
            }
        };
        Ok(DiskInput {
            id: disk_id.to_string(),
            center,
            samples: self
                .disk_samples
                .get(disk_id)
                .ok_or_else(|| Error::MissingFixture(format!("samples for disk {disk_id}")))?,
            v_constant: self.config.v_constant,
            n_max: self.config.n_max,
        })
    }

    pub fn embed(&self, disk_id: &str, k: i64) -> Result<EmbedMap> {
        let ctx = self.kappa_context(disk_id)?;
        let input = self.disk_input(disk_id)?;
        embed_disk(
            &self.change,
            &self.regular,
            &ctx,
            &input,
            &self.oracle,
            &self.away,
            k,
        )
    }

    pub fn kappa(&self, disk_id: &str, k: u32) -> Result<PolyMapKappa> {
        let ctx = self.kappa_context(disk_id)?;
        kappa_poly(&ctx, k)
    }

    pub fn run_disk(&self, disk_id: &str, k: i64) -> Result<DiskReport> {
        let ctx = self.kappa_context(disk_id)?;
        let input = self.disk_input(disk_id)?;
        let embed = self.embed(disk_id, k)?;
        let gs = eliminate_embedding(&embed, self.p, k)?;
        let kappa = kappa_poly(&ctx, k as u32)?;
        solve_disk(&self.regular, &embed, &gs, &kappa, &ctx, &input, k)
    }

    pub fn refine(&self, disk_id: &str, n0: &[u64], nu0: u64) -> Result<Vec<RefinedCandidate>> {
        let ctx = self.kappa_context(disk_id)?;
        let input = self.disk_input(disk_id)?;
        let embed2 = self.embed(disk_id, 2)?;
        let kappa2 = kappa_poly(&ctx, 2)?;
        refine_higher_disk(&self.regular, &ctx, &embed2, &kappa2, &input, n0, nu0)
    }

    /// psi of the trivializing section at one disk sample.
    pub fn psi_at_sample(&self, disk_id: &str, nu: u64, prec: i64) -> Result<Padic> {
        let samples = self
            .disk_samples
            .get(disk_id)
            .ok_or_else(|| Error::MissingFixture(format!("samples for disk {disk_id}")))?;
        let s = samples
            .get(&nu)
            .ok_or_else(|| Error::MissingFixture(format!("disk {disk_id} sample nu = {nu}")))?;
        match &s.alpha {
            None => Ok(Padic::zero_mod(self.p, prec)),
            Some(alpha) => crate::heights::psi_of_section(
                &self.change.odd,
                &self.regular,
                &s.z_minus_b_odd,
                &s.z_minus_b_regular,
                alpha,
                &self.oracle,
                (disk_id, nu),
                &self.away,
                self.config.n_max,
                prec,
            ),
        }
    }
}

fn point_from_json(p: u64, pj: &PointJson) -> CurvePoint {
    match pj {
        PointJson::Affine { x, y } => CurvePoint::from_integers(p, *x, *y),
        PointJson::Infinity { infinity } => CurvePoint::infinity(p, *infinity),
    }
}

/// One entry of the whole-curve sweep.
#[derive(Clone, Debug)]
pub struct GeoSetEntry {
    pub disk_id: String,
    pub outcome: SweepOutcome,
}

#[derive(Clone, Debug)]
pub enum SweepOutcome {
    /// processed directly; report retained
    Report(Box<DiskReport>),
    /// candidates obtained as involution images of another disk's report
    Involution { of: String, candidates: Vec<(CurvePoint, u64)> },
    SieveEmpty,
    Unprocessed(String),
}

/// Process every disk in the bundle at precision k: the union of the
/// reported candidates over all processed disks is the finite candidate set;
/// unprocessable disks are reported honestly.
pub fn geo_set(rt: &Runtime, k: i64) -> Result<Vec<GeoSetEntry>> {
    let mut out: Vec<GeoSetEntry> = vec![];
    let mut reports: BTreeMap<String, DiskReport> = BTreeMap::new();
    for disk in &rt.config.disks {
        match &disk.status {
            DiskStatusJson::Process => {
                let report = rt.run_disk(&disk.id, k)?;
                reports.insert(disk.id.clone(), report.clone());
                out.push(GeoSetEntry {
                    disk_id: disk.id.clone(),
                    outcome: SweepOutcome::Report(Box::new(report)),
                });
            }
            DiskStatusJson::InvolutionOf(other) => {
                let partner = reports.get(other).ok_or_else(|| {
                    Error::MissingFixture(format!(
                        "disk {} is the involution image of {} which was not processed first",
                        disk.id, other
                    ))
                })?;
                let candidates = partner
                    .candidates
                    .iter()
                    .map(|c| (rt.regular.involute(&c.point), c.nu))
                    .collect();
                out.push(GeoSetEntry {
                    disk_id: disk.id.clone(),
                    outcome: SweepOutcome::Involution { of: other.clone(), candidates },
                });
            }
            DiskStatusJson::SieveEmpty => out.push(GeoSetEntry {
                disk_id: disk.id.clone(),
                outcome: SweepOutcome::SieveEmpty,
            }),
            DiskStatusJson::Unprocessed(reason) => out.push(GeoSetEntry {
                disk_id: disk.id.clone(),
                outcome: SweepOutcome::Unprocessed(reason.clone()),
            }),
        }
    }
    Ok(out)
}
