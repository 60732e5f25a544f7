//! Scene descriptors: strict JSON, unknown keys rejected.

use std::path::Path;

use minkowski_principal::bde::{Foliation, GridSpec, IntegrationOptions};
use minkowski_principal::chart::{Domain, EllipsoidCover, Monomial};
use minkowski_principal::quadrics::{Axis3, ConfocalParams, GeneralQuadric, StoParams, TripleSystemSpec};
use minkowski_principal::umbilic::UmbilicSearch;
use minkowski_principal::ChartSpec;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    PrincipalLines,
    Umbilics,
    Tropic,
    Lpl,
    Focal,
    StoCheck,
    Invert,
    Canonicalize,
    DupinCheck,
}

impl Analysis {
    pub fn name(self) -> &'static str {
        match self {
            Analysis::PrincipalLines => "principal-lines",
            Analysis::Umbilics => "umbilics",
            Analysis::Tropic => "tropic",
            Analysis::Lpl => "lpl",
            Analysis::Focal => "focal",
            Analysis::StoCheck => "sto-check",
            Analysis::Invert => "invert",
            Analysis::Canonicalize => "canonicalize",
            Analysis::DupinCheck => "dupin-check",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Cover {
    U1,
    U2,
    #[default]
    Torus,
}

impl From<Cover> for EllipsoidCover {
    fn from(c: Cover) -> Self {
        match c {
            Cover::U1 => EllipsoidCover::U1,
            Cover::U2 => EllipsoidCover::U2,
            Cover::Torus => EllipsoidCover::Torus,
        }
    }
}

/// Parameter of a triple system held fixed to get a surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    U,
    V,
    W,
}

impl From<Param> for Axis3 {
    fn from(p: Param) -> Self {
        match p {
            Param::U => Axis3::X,
            Param::V => Axis3::Y,
            Param::W => Axis3::Z,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub i: u32,
    pub j: u32,
    pub coef: f64,
}

/// E(x) = a x² + b y² + c z² + 2d xy + 2e xz + 2f yz + g x + h y + k z + l.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadricCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
    pub k: f64,
    pub l: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SurfaceSpec {
    Ellipsoid {
        a: f64,
        b: f64,
        c: f64,
        #[serde(default)]
        cover: Cover,
    },
    ConfocalOctant {
        a: f64,
        b: f64,
        c: f64,
        fixed: Option<Param>,
        value: Option<f64>,
    },
    StoZ {
        m: Option<f64>,
        n: Option<f64>,
        eps: Option<f64>,
        /// Semi-axes (a, b, c): picks m, n, ε and the w-surface that is
        /// this ellipsoid.
        ellipsoid: Option<[f64; 3]>,
        fixed: Option<Param>,
        value: Option<f64>,
    },
    Graph {
        terms: Vec<Term>,
        u: [f64; 2],
        v: [f64; 2],
    },
    GeneralQuadric {
        coefficients: QuadricCoefficients,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSettings {
    pub nu: usize,
    pub nv: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seed {
    pub u: f64,
    pub v: f64,
    /// Both foliations when absent.
    pub foliation: Option<Foliation>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UmbilicSettings {
    pub grid: Option<GridSettings>,
    pub threshold: f64,
    pub accept: f64,
    pub separatrices: bool,
}

impl Default for UmbilicSettings {
    fn default() -> Self {
        let s = UmbilicSearch::default();
        UmbilicSettings { grid: None, threshold: s.threshold, accept: s.accept, separatrices: true }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InversionSettings {
    pub q: [f64; 3],
    /// Use dense integration settings suited to comparing polylines.
    #[serde(default = "yes")]
    pub dense: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckSettings {
    pub samples: usize,
    pub curves: usize,
    pub points_per_curve: usize,
    pub margin: f64,
}

impl Default for CheckSettings {
    fn default() -> Self {
        CheckSettings { samples: 10_000, curves: 100, points_per_curve: 20, margin: 0.02 }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSettings {
    pub dir: Option<String>,
    pub prefix: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub surface: SurfaceSpec,
    #[serde(default)]
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub seeds: Vec<Seed>,
    pub grid: Option<GridSettings>,
    #[serde(default)]
    pub integration: IntegrationOptions,
    #[serde(default)]
    pub umbilic: UmbilicSettings,
    pub inversion: Option<InversionSettings>,
    #[serde(default)]
    pub check: CheckSettings,
    #[serde(default)]
    pub output: OutputSettings,
    /// Random grid phase from `rng_seed` instead of cell centres.
    #[serde(default)]
    pub jitter: bool,
    #[serde(default)]
    pub rng_seed: u64,
}

fn scene_err(msg: impl Into<String>) -> CliError {
    CliError::Scene(msg.into())
}

fn positive(name: &str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(scene_err(format!("{name} must be positive, got {x}")))
    }
}

impl Scene {
    pub fn load(path: &Path) -> Result<Scene, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| scene_err(format!("cannot read {}: {e}", path.display())))?;
        Scene::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Scene, CliError> {
        let scene: Scene = serde_json::from_str(text).map_err(|e| scene_err(e.to_string()))?;
        scene.validate()?;
        Ok(scene)
    }

    fn validate(&self) -> Result<(), CliError> {
        let o = &self.integration;
        positive("integration.atol", o.atol)?;
        positive("integration.max_step_frac", o.max_step_frac)?;
        positive("integration.umbilic_exclusion_frac", o.umbilic_exclusion_frac)?;
        positive("integration.direction_tol", o.direction_tol)?;
        if let Some(l) = o.max_length {
            positive("integration.max_length", l)?;
        }
        positive("umbilic.threshold", self.umbilic.threshold)?;
        positive("umbilic.accept", self.umbilic.accept)?;
        positive("check.margin", self.check.margin)?;
        for g in [self.grid, self.umbilic.grid].into_iter().flatten() {
            if g.nu < 2 || g.nv < 2 {
                return Err(scene_err("grids need at least 2 nodes per axis"));
            }
        }
        if self.check.samples == 0 || self.check.curves == 0 || self.check.points_per_curve < 2 {
            return Err(scene_err("check sizes must be positive"));
        }
        for s in &self.seeds {
            if !(s.u.is_finite() && s.v.is_finite()) {
                return Err(scene_err("seed coordinates must be finite"));
            }
        }
        if let Some(inv) = &self.inversion {
            if !inv.q.iter().all(|x| x.is_finite()) {
                return Err(scene_err("inversion.q must be finite"));
            }
        }
        // build once so parameter errors surface before any computation
        match &self.surface {
            SurfaceSpec::GeneralQuadric { .. } => Ok(()),
            SurfaceSpec::ConfocalOctant { .. } | SurfaceSpec::StoZ { .. } => self.surface.system().map(|_| ()),
            _ => self.surface.chart().map(|_| ()),
        }
    }

    /// Grid phase: cell centres, or a seeded random offset with `jitter`.
    pub fn phase(&self) -> (f64, f64) {
        if !self.jitter {
            return (0.5, 0.5);
        }
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.rng_seed);
        (rng.gen_range(0.2..0.8), rng.gen_range(0.2..0.8))
    }

    pub fn grid_or(&self, nu: usize, nv: usize) -> GridSpec {
        let g = self.grid.unwrap_or(GridSettings { nu, nv });
        let (pu, pv) = self.phase();
        GridSpec::new(g.nu, g.nv).with_phase(pu, pv)
    }

    pub fn umbilic_search(&self) -> UmbilicSearch {
        let d = UmbilicSearch::default();
        let (pu, pv) = self.phase();
        let grid = match self.umbilic.grid {
            Some(g) => GridSpec::new(g.nu, g.nv),
            None => d.grid,
        };
        UmbilicSearch { grid: grid.with_phase(pu, pv), threshold: self.umbilic.threshold, accept: self.umbilic.accept }
    }
}

fn core_err(e: minkowski_principal::Error) -> CliError {
    scene_err(e.to_string())
}

impl SurfaceSpec {
    pub fn label(&self) -> String {
        match self {
            SurfaceSpec::Ellipsoid { a, b, c, cover } => format!("ellipsoid(a={a}, b={b}, c={c}, cover={cover:?})"),
            SurfaceSpec::ConfocalOctant { a, b, c, fixed, value } => {
                format!("confocal-octant(a={a}, b={b}, c={c}, fixed={fixed:?}, value={value:?})")
            }
            SurfaceSpec::StoZ { m, n, eps, ellipsoid, fixed, value } => {
                format!("sto-z(m={m:?}, n={n:?}, eps={eps:?}, ellipsoid={ellipsoid:?}, fixed={fixed:?}, value={value:?})")
            }
            SurfaceSpec::Graph { terms, .. } => format!("graph({} terms)", terms.len()),
            SurfaceSpec::GeneralQuadric { .. } => "general-quadric".to_string(),
        }
    }

    pub fn ellipsoid_axes(&self) -> Option<(f64, f64, f64)> {
        match self {
            SurfaceSpec::Ellipsoid { a, b, c, .. } => Some((*a, *b, *c)),
            _ => None,
        }
    }

    fn sto(&self) -> Result<Option<(StoParams, Option<f64>)>, CliError> {
        let SurfaceSpec::StoZ { m, n, eps, ellipsoid, .. } = self else { return Ok(None) };
        match (ellipsoid, m, n, eps) {
            (Some([a, b, c]), None, None, None) => {
                let (p, w) = StoParams::for_ellipsoid(*a, *b, *c).map_err(core_err)?;
                Ok(Some((p, Some(w))))
            }
            (None, Some(m), Some(n), Some(eps)) => Ok(Some((StoParams::new(*m, *n, *eps).map_err(core_err)?, None))),
            _ => Err(scene_err("sto-z needs either `ellipsoid` or all of `m`, `n`, `eps`")),
        }
    }

    /// The triple system behind the surface. An ellipsoid stands for its
    /// confocal system.
    pub fn system(&self) -> Result<TripleSystemSpec, CliError> {
        match self {
            SurfaceSpec::ConfocalOctant { a, b, c, .. } | SurfaceSpec::Ellipsoid { a, b, c, .. } => {
                Ok(TripleSystemSpec::Confocal(ConfocalParams::new(*a, *b, *c).map_err(core_err)?))
            }
            SurfaceSpec::StoZ { .. } => Ok(TripleSystemSpec::Sto(self.sto()?.unwrap().0)),
            _ => Err(scene_err("this analysis needs a triple system (confocal-octant, sto-z or ellipsoid)")),
        }
    }

    /// Separable system for the ellipsoid: (system, w of the ellipsoid).
    pub fn sto_for_ellipsoid(&self) -> Result<Option<(StoParams, f64)>, CliError> {
        match self {
            SurfaceSpec::Ellipsoid { a, b, c, .. } => Ok(Some(StoParams::for_ellipsoid(*a, *b, *c).map_err(core_err)?)),
            SurfaceSpec::StoZ { .. } => Ok(self.sto()?.and_then(|(p, w)| w.map(|w| (p, w)))),
            _ => Ok(None),
        }
    }

    pub fn chart(&self) -> Result<ChartSpec, CliError> {
        match self {
            SurfaceSpec::Ellipsoid { a, b, c, cover } => ChartSpec::ellipsoid(*a, *b, *c, (*cover).into()).map_err(core_err),
            SurfaceSpec::ConfocalOctant { fixed, value, .. } => {
                let (Some(f), Some(x)) = (fixed, value) else {
                    return Err(scene_err("confocal-octant needs `fixed` and `value` to define a surface"));
                };
                let sys = self.system()?;
                Ok(sys.coordinate_surface((*f).into(), *x))
            }
            SurfaceSpec::StoZ { fixed, value, .. } => {
                let (p, w) = self.sto()?.unwrap();
                let sys = TripleSystemSpec::Sto(p);
                match (fixed, value, w) {
                    (Some(f), Some(x), _) => Ok(sys.coordinate_surface((*f).into(), *x)),
                    (None, None, Some(w)) => Ok(sys.coordinate_surface(Axis3::Z, w)),
                    _ => Err(scene_err("sto-z needs `fixed` and `value` to define a surface")),
                }
            }
            SurfaceSpec::Graph { terms, u, v } => {
                if !(u[0] < u[1] && v[0] < v[1]) {
                    return Err(scene_err("graph domain bounds must be increasing"));
                }
                let t = terms.iter().map(|t| Monomial { i: t.i, j: t.j, coef: t.coef }).collect();
                Ok(ChartSpec::graph(t, Domain::new((u[0], u[1]), (v[0], v[1]))))
            }
            SurfaceSpec::GeneralQuadric { .. } => Err(scene_err("general-quadric scenes only support canonicalize")),
        }
    }

    pub fn quadric(&self) -> Result<GeneralQuadric, CliError> {
        match self {
            SurfaceSpec::GeneralQuadric { coefficients: q } => {
                Ok(GeneralQuadric { a: q.a, b: q.b, c: q.c, d: q.d, e: q.e, f: q.f, g: q.g, h: q.h, k: q.k, l: q.l })
            }
            SurfaceSpec::Ellipsoid { a, b, c, .. } => Ok(GeneralQuadric::diagonal([1.0 / (a * a), 1.0 / (b * b), 1.0 / (c * c)])),
            _ => Err(scene_err("canonicalize needs a general-quadric or ellipsoid surface")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_scene() {
        let s = Scene::parse(r#"{"surface": {"kind": "ellipsoid", "a": 2, "b": 1.5, "c": 2.2}}"#).unwrap();
        assert!(matches!(s.surface, SurfaceSpec::Ellipsoid { cover: Cover::Torus, .. }));
        assert_eq!(s.check.samples, 10_000);
        assert_eq!(s.phase(), (0.5, 0.5));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for text in [
            r#"{"surface": {"kind": "ellipsoid", "a": 2, "b": 1.5, "c": 2.2}, "colour": 1}"#,
            r#"{"surface": {"kind": "ellipsoid", "a": 2, "b": 1.5, "c": 2.2, "d": 1}}"#,
            r#"{"surface": {"kind": "ellipsoid", "a": 2, "b": 1.5, "c": 2.2}, "integration": {"rtol": 1}}"#,
            r#"{"surface": {"kind": "torus", "a": 2}}"#,
        ] {
            assert!(matches!(Scene::parse(text), Err(CliError::Scene(_))), "{text}");
        }
    }

    #[test]
    fn tolerances_must_be_positive() {
        let t = r#"{"surface": {"kind": "ellipsoid", "a": 2, "b": 1.5, "c": 2.2}, "integration": {"atol": -1}}"#;
        assert!(matches!(Scene::parse(t), Err(CliError::Scene(_))));
    }

    #[test]
    fn sto_needs_one_parametrisation() {
        let t = r#"{"surface": {"kind": "sto-z", "m": 1, "ellipsoid": [2, 1.5, 2.2]}}"#;
        assert!(Scene::parse(t).is_err());
        let t = r#"{"surface": {"kind": "sto-z", "ellipsoid": [2, 1.5, 2.2]}}"#;
        let s = Scene::parse(t).unwrap();
        assert!(s.surface.chart().is_ok());
    }

    #[test]
    fn jitter_is_seeded() {
        let t = r#"{"surface": {"kind": "ellipsoid", "a": 2, "b": 1.5, "c": 2.2}, "jitter": true, "rng_seed": 7}"#;
        let (a, b) = (Scene::parse(t).unwrap(), Scene::parse(t).unwrap());
        assert_eq!(a.phase(), b.phase());
        assert_ne!(a.phase(), (0.5, 0.5));
    }
}
