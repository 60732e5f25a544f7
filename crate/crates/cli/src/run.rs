use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::Parser;
use minkowski_principal::bde::dupin::{orthogonality_report, verify_dupin, DupinReport, OrthogonalityReport};
use minkowski_principal::bde::{
    integrate_principal_line, trace_locus, Foliation, GridSpec, LocusCurve, LocusKind, PrincipalCurve, Termination,
};
use minkowski_principal::chart::EllipsoidCover;
use minkowski_principal::focal::{closed_form_point, focal_numeric, focal_singular_locus};
use minkowski_principal::quadrics::{ellipsoid_atlas, CanonicalForm, TripleSystemSpec};
use minkowski_principal::sampling::{admissible_points, Halton};
use minkowski_principal::transforms::{comparison_options, invert_point, verify_inversion_invariance, InversionReport};
use minkowski_principal::umbilic::{
    find_umbilics, trace_separatrices, umbilics, umbilics_atlas, DarbouxType, UmbilicRecord,
};
use minkowski_principal::{ChartSpec, Vec3M};
use rayon::prelude::*;
use serde::Serialize;

use crate::export::{header, to_json, write_curves, write_mesh, CurveBlock};
use crate::scene::{Analysis, Scene};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("scene: {0}")]
    Scene(String),
    #[error("analysis failed: {0}")]
    Analysis(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Scene(_) => 2,
            _ => 3,
        }
    }
}

fn failed(e: minkowski_principal::Error) -> CliError {
    CliError::Analysis(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Command {
    PrincipalLines,
    Umbilics,
    Tropic,
    Lpl,
    Focal,
    StoCheck,
    Invert,
    Canonicalize,
    DupinCheck,
    /// Every analysis listed in the scene.
    Run,
}

#[derive(Parser)]
#[command(name = "mkprincipal", version, about = "Curvature lines, umbilics and loci of surfaces in Minkowski 3-space")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Scene descriptor (JSON).
    #[arg(long)]
    scene: PathBuf,
    /// Output directory; overrides the scene's `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses arguments, runs the requested analyses and returns the exit
/// code: 0 on success, 2 for argument or scene errors, 3 when an analysis
/// fails or a verification does not pass.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("mkprincipal: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let scene = Scene::load(&cli.scene)?;
    let analyses = match cli.command {
        Command::Run if scene.analyses.is_empty() => return Err(CliError::Scene("`analyses` is empty".into())),
        Command::Run => scene.analyses.clone(),
        c => vec![to_analysis(c)],
    };
    let out = match (&cli.out, &scene.output.dir) {
        (Some(d), _) => d.clone(),
        (None, Some(d)) => cli.scene.parent().unwrap_or(Path::new(".")).join(d),
        (None, None) => PathBuf::from("."),
    };
    let prefix = match &scene.output.prefix {
        Some(p) => p.clone(),
        None => cli.scene.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scene".into()),
    };
    let mut job = Job { scene: &scene, out, prefix, failures: Vec::new() };
    for a in analyses {
        match a {
            Analysis::PrincipalLines => principal_lines(&mut job)?,
            Analysis::Umbilics => umbilic_records(&mut job)?,
            Analysis::Tropic => locus(&mut job, LocusKind::LD)?,
            Analysis::Lpl => locus(&mut job, LocusKind::LPL)?,
            Analysis::Focal => focal(&mut job)?,
            Analysis::StoCheck => sto_check(&mut job)?,
            Analysis::Invert => invert(&mut job)?,
            Analysis::Canonicalize => canonicalize(&mut job)?,
            Analysis::DupinCheck => dupin_check(&mut job)?,
        }
    }
    if job.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Analysis(job.failures.join("; ")))
    }
}

fn to_analysis(c: Command) -> Analysis {
    match c {
        Command::PrincipalLines => Analysis::PrincipalLines,
        Command::Umbilics => Analysis::Umbilics,
        Command::Tropic => Analysis::Tropic,
        Command::Lpl => Analysis::Lpl,
        Command::Focal => Analysis::Focal,
        Command::StoCheck => Analysis::StoCheck,
        Command::Invert => Analysis::Invert,
        Command::Canonicalize => Analysis::Canonicalize,
        Command::DupinCheck => Analysis::DupinCheck,
        Command::Run => unreachable!(),
    }
}

struct Job<'a> {
    scene: &'a Scene,
    out: PathBuf,
    prefix: String,
    failures: Vec<String>,
}

impl Job<'_> {
    fn write(&self, suffix: &str, contents: &str) -> Result<(), CliError> {
        let path = self.out.join(format!("{}_{suffix}", self.prefix));
        let io = |source| CliError::Io { path: path.clone(), source };
        std::fs::create_dir_all(&self.out).map_err(io)?;
        std::fs::write(&path, contents).map_err(io)?;
        println!("{}", path.display());
        Ok(())
    }

    fn fail(&mut self, what: &str, why: impl std::fmt::Display) {
        self.failures.push(format!("{what}: {why}"));
    }

    fn label(&self) -> String {
        self.scene.surface.label()
    }
}

fn curve_block(c: &PrincipalCurve, seed: Option<(f64, f64)>) -> CurveBlock {
    let mut h = vec![
        ("foliation", format!("{:?}", c.foliation)),
        ("termination", format!("{:?}", c.termination)),
        ("closed", c.closed.to_string()),
    ];
    if let Some((u, v)) = seed {
        h.insert(0, ("seed", format!("{u},{v}")));
    }
    CurveBlock::new(header(&h), &c.points_uv, &c.points_xyz)
}

fn locus_block(c: &LocusCurve) -> CurveBlock {
    CurveBlock::new(header(&[("kind", format!("{:?}", c.kind)), ("closed", c.closed.to_string())]), &c.polyline_uv, &c.polyline_xyz)
}

/// Chart on which loci of the surface are traced: for an ellipsoid the
/// single cover [0, 2π] × [0, π], so each locus appears once.
fn locus_chart(scene: &Scene) -> Result<ChartSpec, CliError> {
    match scene.surface.ellipsoid_axes() {
        Some((a, b, c)) => ChartSpec::ellipsoid(a, b, c, EllipsoidCover::U2).map_err(|e| CliError::Scene(e.to_string())),
        None => scene.surface.chart(),
    }
}

/// Umbilics of the surface: over the graph atlas for an ellipsoid (its
/// principal chart degenerates exactly at the umbilics), else on the chart.
fn surface_umbilics(scene: &Scene) -> Result<(Vec<UmbilicRecord>, Option<Vec<ChartSpec>>), CliError> {
    let search = scene.umbilic_search();
    match scene.surface.ellipsoid_axes() {
        Some((a, b, c)) => {
            let atlas = ellipsoid_atlas(a, b, c).map_err(|e| CliError::Scene(e.to_string()))?;
            Ok((umbilics_atlas(&atlas, &search).map_err(failed)?, Some(atlas)))
        }
        None => Ok((umbilics(&scene.surface.chart()?, &search).map_err(failed)?, None)),
    }
}

/// Default seeds when the scene lists none: Halton points inside the
/// middle of the domain.
fn default_seeds(chart: &ChartSpec) -> Vec<((f64, f64), Foliation)> {
    let d = chart.domain;
    Halton::<2>::new()
        .take(4)
        .flat_map(|[s, t]| {
            let u = d.u.0 + (0.1 + 0.8 * s) * (d.u.1 - d.u.0);
            let v = d.v.0 + (0.1 + 0.8 * t) * (d.v.1 - d.v.0);
            [((u, v), Foliation::F1), ((u, v), Foliation::F2)]
        })
        .collect()
}

fn seeds(scene: &Scene, chart: &ChartSpec) -> Vec<((f64, f64), Foliation)> {
    if scene.seeds.is_empty() {
        return default_seeds(chart);
    }
    scene
        .seeds
        .iter()
        .flat_map(|s| match s.foliation {
            Some(f) => vec![((s.u, s.v), f)],
            None => vec![((s.u, s.v), Foliation::F1), ((s.u, s.v), Foliation::F2)],
        })
        .collect()
}

#[derive(Serialize)]
struct CurveSummary {
    seed: (f64, f64),
    foliation: Foliation,
    termination: Option<Termination>,
    closed: bool,
    points: usize,
    error: Option<String>,
}

#[derive(Serialize)]
struct LinesSummary {
    surface: String,
    curves: Vec<CurveSummary>,
    umbilics: usize,
    ld_curves: usize,
    lpl_curves: usize,
}

fn principal_lines(job: &mut Job) -> Result<(), CliError> {
    let scene = job.scene;
    let chart = scene.surface.chart()?;
    let mut opts = scene.integration.clone();
    if opts.umbilics.is_empty() {
        opts.umbilics = find_umbilics(&chart, &scene.umbilic_search()).iter().map(|r| r.uv).collect();
    }
    let jobs = seeds(scene, &chart);
    let results: Vec<_> = jobs.par_iter().map(|&(seed, f)| integrate_principal_line(&chart, seed, f, &opts)).collect();
    let mut blocks = Vec::new();
    let mut curves = Vec::new();
    for (&(seed, foliation), r) in jobs.iter().zip(&results) {
        match r {
            Ok(c) => {
                blocks.push(curve_block(c, Some(seed)));
                curves.push(CurveSummary {
                    seed,
                    foliation,
                    termination: Some(c.termination),
                    closed: c.closed,
                    points: c.points_uv.len(),
                    error: None,
                });
            }
            Err(e) => {
                job.fail(&format!("seed ({}, {}) {foliation:?}", seed.0, seed.1), e);
                curves.push(CurveSummary { seed, foliation, termination: None, closed: false, points: 0, error: Some(e.to_string()) });
            }
        }
    }
    let (umb, _) = surface_umbilics(scene)?;
    let lc = locus_chart(scene)?;
    let grid = scene.grid_or(120, 120);
    let ld = trace_locus(&lc, LocusKind::LD, grid).len();
    let lpl = trace_locus(&lc, LocusKind::LPL, grid).len();
    job.write("lines.csv", &write_curves(&blocks))?;
    let summary = LinesSummary { surface: job.label(), curves, umbilics: umb.len(), ld_curves: ld, lpl_curves: lpl };
    job.write("summary.json", &to_json(&summary))
}

#[derive(Serialize)]
struct UmbilicReport {
    surface: String,
    count: usize,
    umbilics: Vec<UmbilicRecord>,
}

fn umbilic_records(job: &mut Job) -> Result<(), CliError> {
    let scene = job.scene;
    let (recs, atlas) = surface_umbilics(scene)?;
    if scene.umbilic.separatrices {
        let mut blocks = Vec::new();
        let single = match &atlas {
            Some(_) => None,
            None => Some(scene.surface.chart()?),
        };
        for r in &recs {
            if !matches!(r.darboux, Some(DarbouxType::D1 | DarbouxType::D2 | DarbouxType::D3)) {
                continue;
            }
            let chart = match (&atlas, &single) {
                (Some(a), _) => &a[r.chart.unwrap_or(0)],
                (None, Some(c)) => c,
                (None, None) => unreachable!(),
            };
            let mut opts = scene.integration.clone();
            opts.umbilics = recs.iter().filter(|o| o.chart == r.chart).map(|o| o.uv).collect();
            match trace_separatrices(chart, r, &opts) {
                Ok(seps) => blocks.extend(seps.iter().map(|c| {
                    let mut b = curve_block(c, None);
                    b.header.insert(0, ("umbilic".into(), format!("{},{},{}", r.xyz.x, r.xyz.y, r.xyz.z)));
                    b
                })),
                Err(e) => job.fail("separatrices", e),
            }
        }
        job.write("separatrices.csv", &write_curves(&blocks))?;
    }
    let report = UmbilicReport { surface: job.label(), count: recs.len(), umbilics: recs };
    job.write("umbilics.json", &to_json(&report))
}

#[derive(Serialize)]
struct LocusReport {
    surface: String,
    kind: LocusKind,
    count: usize,
    closed: Vec<bool>,
    points: Vec<usize>,
}

fn locus(job: &mut Job, kind: LocusKind) -> Result<(), CliError> {
    let chart = locus_chart(job.scene)?;
    let curves = trace_locus(&chart, kind, job.scene.grid_or(120, 120));
    let name = if kind == LocusKind::LD { "tropic" } else { "lpl" };
    let blocks: Vec<_> = curves.iter().map(locus_block).collect();
    job.write(&format!("{name}.csv"), &write_curves(&blocks))?;
    let report = LocusReport {
        surface: job.label(),
        kind,
        count: curves.len(),
        closed: curves.iter().map(|c| c.closed).collect(),
        points: curves.iter().map(|c| c.polyline_uv.len()).collect(),
    };
    job.write(&format!("{name}.json"), &to_json(&report))
}

#[derive(Serialize)]
struct SheetReport {
    which: Foliation,
    nodes: usize,
    valid: usize,
    singular_curves: usize,
    /// Max relative distance to the closed-form sheet (ellipsoids only),
    /// away from the umbilics.
    closed_form_max_rel: Option<f64>,
}

#[derive(Serialize)]
struct FocalReport {
    surface: String,
    sheets: Vec<SheetReport>,
}

fn focal(job: &mut Job) -> Result<(), CliError> {
    let scene = job.scene;
    let chart = scene.surface.chart()?;
    let grid = scene.grid_or(120, 60);
    let mut sheets = Vec::new();
    for which in [Foliation::F1, Foliation::F2] {
        let sheet = focal_numeric(&chart, which, grid);
        let locus = focal_singular_locus(&sheet);
        let cross = scene.surface.ellipsoid_axes().map(|(a, b, c)| {
            let pi = std::f64::consts::PI;
            let mut worst = 0.0f64;
            for p in sheet.points.iter().filter(|p| p.valid) {
                let (u, v) = p.uv;
                let ku = (u / pi).round() * pi;
                let kv = (v / pi).round() * pi;
                if (u - ku).hypot(v - kv) < 0.05 {
                    continue;
                }
                if let Some(q) = closed_form_point(a, b, c, which, u, v) {
                    worst = worst.max((p.xyz - q).euclid_norm() / q.euclid_norm().max(a.max(b).max(c)));
                }
            }
            worst
        });
        let tag = format!("{which:?}");
        job.write(&format!("focal_{tag}.csv"), &write_mesh(&sheet))?;
        let blocks: Vec<_> = locus
            .iter()
            .map(|c| CurveBlock::new(header(&[("sheet", tag.clone()), ("closed", c.closed.to_string())]), &c.polyline_uv, &c.polyline_xyz))
            .collect();
        job.write(&format!("focal_{tag}_singular.csv"), &write_curves(&blocks))?;
        if let Some(w) = cross {
            if !(w <= 1e-6) {
                job.fail(&format!("focal sheet {tag}"), format!("closed-form mismatch {w:e}"));
            }
        }
        sheets.push(SheetReport {
            which,
            nodes: sheet.points.len(),
            valid: sheet.points.iter().filter(|p| p.valid).count(),
            singular_curves: locus.len(),
            closed_form_max_rel: cross,
        });
    }
    job.write("focal.json", &to_json(&FocalReport { surface: job.label(), sheets }))
}

#[derive(Serialize)]
struct EllipsoidImage {
    w: f64,
    samples: usize,
    max_residual: f64,
}

#[derive(Serialize)]
struct StoReport {
    system: String,
    orthogonality: OrthogonalityReport,
    /// Largest residual of the three quadric families through sampled
    /// points (separable system only).
    quadric_residual: Option<f64>,
    ellipsoid: Option<EllipsoidImage>,
    tolerance: f64,
    pass: bool,
}

const ORTHOGONALITY_TOL: f64 = 1e-9;

fn sto_check(job: &mut Job) -> Result<(), CliError> {
    let scene = job.scene;
    let sto = scene.surface.sto_for_ellipsoid()?;
    let sys = match (&scene.surface, sto) {
        (crate::scene::SurfaceSpec::Ellipsoid { .. }, Some((p, _))) => TripleSystemSpec::Sto(p),
        _ => scene.surface.system()?,
    };
    let check = scene.check;
    let orth = orthogonality_report(&sys, check.samples, check.margin).map_err(failed)?;
    let quadric_residual = match &sys {
        TripleSystemSpec::Sto(p) => {
            let mut worst = 0.0f64;
            for q in admissible_points(&sys, check.samples.min(2000), check.margin) {
                let r = p.quadric_residuals(q[0], q[1], q[2]).map_err(failed)?;
                worst = r.iter().fold(worst, |m, x| m.max(x.abs()));
            }
            Some(worst)
        }
        _ => None,
    };
    let ellipsoid = match (sto, &scene.surface) {
        (Some((p, w)), s) => {
            let (a, b, c) = match s {
                crate::scene::SurfaceSpec::Ellipsoid { a, b, c, .. } => (*a, *b, *c),
                crate::scene::SurfaceSpec::StoZ { ellipsoid: Some([a, b, c]), .. } => (*a, *b, *c),
                _ => unreachable!(),
            };
            let mut worst = 0.0f64;
            let mut samples = 0;
            let tau = std::f64::consts::TAU;
            for [s, t] in Halton::<2>::new().take(check.samples.min(2000)) {
                if let Ok(x) = p.point(tau * s, tau * t, w) {
                    worst = worst.max((x.x * x.x / (a * a) + x.y * x.y / (b * b) + x.z * x.z / (c * c) - 1.0).abs());
                    samples += 1;
                }
            }
            Some(EllipsoidImage { w, samples, max_residual: worst })
        }
        _ => None,
    };
    let pass = orth.max_abs <= ORTHOGONALITY_TOL
        && orth.max_det_rel_error.map_or(true, |e| e <= ORTHOGONALITY_TOL)
        && quadric_residual.map_or(true, |e| e <= ORTHOGONALITY_TOL)
        && ellipsoid.as_ref().map_or(true, |e| e.max_residual <= ORTHOGONALITY_TOL);
    if !pass {
        job.fail("sto-check", "residuals above tolerance");
    }
    let report = StoReport {
        system: orth.system.clone(),
        orthogonality: orth,
        quadric_residual,
        ellipsoid,
        tolerance: ORTHOGONALITY_TOL,
        pass,
    };
    job.write("sto_check.json", &to_json(&report))
}

fn invert(job: &mut Job) -> Result<(), CliError> {
    let scene = job.scene;
    let inv = scene.inversion.ok_or_else(|| CliError::Scene("invert needs an `inversion` section".into()))?;
    let chart = scene.surface.chart()?;
    let q = Vec3M::new(inv.q[0], inv.q[1], inv.q[2]);
    let opts = if inv.dense { comparison_options() } else { scene.integration.clone() };
    let jobs = seeds(scene, &chart);
    let report: InversionReport = verify_inversion_invariance(&chart, q, &jobs, &opts);
    if !report.pass {
        let why = report.precondition.clone().unwrap_or_else(|| "leaves do not match".into());
        job.fail("invert", why);
    }
    if report.precondition.is_none() {
        let target = chart.inverted(q);
        let mut blocks = Vec::new();
        for &(seed, f) in &jobs {
            if let Ok(c) = integrate_principal_line(&chart, seed, f, &opts) {
                let mapped: Result<Vec<Vec3M>, _> = c.points_xyz.iter().map(|&p| invert_point(q, p)).collect();
                if let Ok(m) = mapped {
                    let mut b = CurveBlock::new(Vec::new(), &c.points_uv, &m);
                    b.header = header(&[("seed", format!("{},{}", seed.0, seed.1)), ("foliation", format!("{f:?}")), ("source", "mapped".into())]);
                    blocks.push(b);
                }
            }
            if let Ok(c) = integrate_principal_line(&target, seed, f, &opts) {
                let mut b = curve_block(&c, Some(seed));
                b.header.push(("source".into(), "direct".into()));
                blocks.push(b);
            }
        }
        job.write("inverted.csv", &write_curves(&blocks))?;
    }
    job.write("invert.json", &to_json(&report))
}

#[derive(Serialize)]
struct CanonicalReport {
    form: CanonicalForm,
    metric_defect: f64,
}

fn canonicalize(job: &mut Job) -> Result<(), CliError> {
    let q = job.scene.surface.quadric()?;
    match q.canonicalize() {
        Ok(form) => {
            let report = CanonicalReport { metric_defect: form.isometry.metric_defect(), form };
            job.write("canonical.json", &to_json(&report))
        }
        Err(e) => {
            job.fail("canonicalize", e);
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct DupinSummary {
    reports: Vec<DupinReport>,
    pass: bool,
}

fn dupin_check(job: &mut Job) -> Result<(), CliError> {
    let scene = job.scene;
    let sys = scene.surface.system()?;
    let sample = GridSpec::new(scene.check.curves, scene.check.points_per_curve);
    let reports: Vec<DupinReport> = minkowski_principal::quadrics::Axis3::ALL
        .par_iter()
        .map(|&ax| verify_dupin(&sys, ax, sample))
        .collect::<Result<_, _>>()
        .map_err(failed)?;
    let pass = reports.iter().all(|r| r.pass);
    if !pass {
        job.fail("dupin-check", "coordinate curves are not curvature lines within tolerance");
    }
    job.write("dupin.json", &to_json(&DupinSummary { reports, pass }))
}
