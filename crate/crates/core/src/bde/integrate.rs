// Leaves of the principal foliations by adaptive Dormand–Prince 5(4) on the
// unit direction field in the parameter plane.

use alloc::vec;
use alloc::vec::Vec;

use super::{BdeField, Foliation, Multiplicity, PrincipalCurve, Termination, DEFAULT_DIRECTION_TOL};
use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct IntegrationOptions {
    /// Local error tolerance in parameter units.
    pub atol: f64,
    /// Largest step as a fraction of the domain diameter.
    pub max_step_frac: f64,
    pub max_steps: usize,
    /// Arc length (parameter units) after which integration stops.
    pub max_length: Option<f64>,
    /// Radius, as a fraction of the domain diameter, of the balls around
    /// known umbilics that stop integration.
    pub umbilic_exclusion_frac: f64,
    pub detect_closure: bool,
    pub closure_min_steps: usize,
    /// Known umbilics in parameter coordinates.
    pub umbilics: Vec<(f64, f64)>,
    pub direction_tol: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            atol: 1e-9,
            max_step_frac: 0.01,
            max_steps: 50_000,
            max_length: None,
            umbilic_exclusion_frac: 1e-3,
            detect_closure: true,
            closure_min_steps: 10,
            umbilics: Vec::new(),
            direction_tol: DEFAULT_DIRECTION_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Stop {
    Domain,
    Umbilic,
    Lpl,
    Turn,
}

fn stop_reason(s: Stop) -> Termination {
    match s {
        Stop::Domain => Termination::DomainExit,
        Stop::Umbilic => Termination::UmbilicHit,
        Stop::Lpl => Termination::LPLHit,
        Stop::Turn => Termination::StepLimit,
    }
}

/// Field direction at p, the root closest to `r`, oriented along it.
fn oriented<F: BdeField + ?Sized>(field: &F, p: (f64, f64), r: (f64, f64), tol: f64) -> core::result::Result<((f64, f64), bool), Stop> {
    if !field.domain().contains(p.0, p.1) {
        return Err(Stop::Domain);
    }
    let s = field.sample(p.0, p.1).map_err(|_| Stop::Domain)?;
    let d = s.directions(tol);
    let (cands, first): (&[Option<(f64, f64)>], bool) = match d.multiplicity {
        Multiplicity::Two => (&[d.d1, d.d2][..], true),
        Multiplicity::One | Multiplicity::None => return Err(Stop::Lpl),
        Multiplicity::UmbilicLike => return Err(Stop::Umbilic),
    };
    let mut best = (0.0, (0.0, 0.0), first);
    for (k, c) in cands.iter().enumerate() {
        let c = c.unwrap();
        let dot = c.0 * r.0 + c.1 * r.1;
        if math::abs(dot) > math::abs(best.0) {
            best = (dot, c, k == 0);
        }
    }
    if math::abs(best.0) < 0.3 {
        return Err(Stop::Turn);
    }
    let sg = math::signum(best.0);
    Ok(((best.1 .0 * sg, best.1 .1 * sg), best.2))
}

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Step {
    y: (f64, f64),
    dir: (f64, f64),
    err: f64,
}

fn dopri<F: BdeField + ?Sized>(field: &F, y: (f64, f64), k1: (f64, f64), h: f64, tol: f64) -> core::result::Result<Step, Stop> {
    let mut k = [(0.0, 0.0); 7];
    k[0] = k1;
    for s in 1..7 {
        let mut p = y;
        for (j, kj) in k.iter().enumerate().take(s) {
            p.0 += h * A[s][j] * kj.0;
            p.1 += h * A[s][j] * kj.1;
        }
        k[s] = oriented(field, p, k1, tol)?.0;
    }
    let mut y5 = y;
    let mut e = (0.0, 0.0);
    for j in 0..7 {
        let b5 = if j < 6 { A[6][j] } else { 0.0 };
        y5.0 += h * b5 * k[j].0;
        y5.1 += h * b5 * k[j].1;
        e.0 += h * (b5 - B4[j]) * k[j].0;
        e.1 += h * (b5 - B4[j]) * k[j].1;
    }
    Ok(Step { y: y5, dir: k[6], err: math::hypot(e.0, e.1) })
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let l2 = dx * dx + dy * dy;
    let t = if l2 > 0.0 { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / l2).clamp(0.0, 1.0) } else { 0.0 };
    math::hypot(a.0 + t * dx - p.0, a.1 + t * dy - p.1)
}

/// Periodic image of `target` nearest to `near`.
fn nearest_image(d: &crate::chart::Domain, target: (f64, f64), near: (f64, f64)) -> (f64, f64) {
    let (pu, pv) = d.periods();
    let shift = |t: f64, n: f64, p: Option<f64>| match p {
        Some(p) => t + p * math::round((n - t) / p),
        None => t,
    };
    (shift(target.0, near.0, pu), shift(target.1, near.1, pv))
}

/// Integrates the leaf of `foliation` through `seed`.
pub fn integrate_principal_line<F: BdeField + ?Sized>(
    field: &F,
    seed: (f64, f64),
    foliation: Foliation,
    opts: &IntegrationOptions,
) -> Result<PrincipalCurve> {
    let (u, v) = seed;
    if !field.domain().contains(u, v) {
        return Err(Error::SeedOutsideDomain { u, v });
    }
    let s = field.sample(u, v).map_err(|_| Error::SeedOutsideDomain { u, v })?;
    let d = s.directions(opts.direction_tol);
    match d.multiplicity {
        Multiplicity::UmbilicLike => return Err(Error::SeedAtUmbilic { u, v }),
        Multiplicity::None | Multiplicity::One => return Err(Error::SeedWithoutDirection { u, v }),
        Multiplicity::Two => {}
    }
    let dir = d.get(foliation).unwrap();
    trace(field, seed, dir, opts, None)
}

/// Integrates from `start` along the root closest to `dir`. `launched_from`
/// names an umbilic that is ignored until the curve has left its exclusion
/// ball (used for separatrices).
pub fn integrate_from<F: BdeField + ?Sized>(
    field: &F,
    start: (f64, f64),
    dir: (f64, f64),
    opts: &IntegrationOptions,
    launched_from: Option<(f64, f64)>,
) -> Result<PrincipalCurve> {
    let (u, v) = start;
    if !field.domain().contains(u, v) {
        return Err(Error::SeedOutsideDomain { u, v });
    }
    trace(field, start, dir, opts, launched_from)
}

fn trace<F: BdeField + ?Sized>(
    field: &F,
    start: (f64, f64),
    dir: (f64, f64),
    opts: &IntegrationOptions,
    mut launched_from: Option<(f64, f64)>,
) -> Result<PrincipalCurve> {
    let dom = field.domain();
    let diam = dom.diameter();
    let hmax = opts.max_step_frac * diam;
    let hmin = 1e-11 * diam;
    let excl = opts.umbilic_exclusion_frac * diam;
    let close_r = 2.0 * math::sqrt(opts.atol);
    let tol = opts.direction_tol;

    let n = math::hypot(dir.0, dir.1);
    let (k0, is_first) = oriented(field, start, (dir.0 / n, dir.1 / n), tol).map_err(|s| match s {
        Stop::Umbilic => Error::SeedAtUmbilic { u: start.0, v: start.1 },
        Stop::Domain => Error::SeedOutsideDomain { u: start.0, v: start.1 },
        _ => Error::SeedWithoutDirection { u: start.0, v: start.1 },
    })?;
    let foliation = if is_first { Foliation::F1 } else { Foliation::F2 };
    let x0 = field.position(start.0, start.1).map_err(|_| Error::SeedOutsideDomain { u: start.0, v: start.1 })?;

    let mut uv = vec![start];
    let mut xyz = vec![x0];
    let mut y = start;
    let mut k1 = k0;
    let mut h = 0.1 * hmax;
    let mut steps = 0usize;
    let mut length = 0.0;
    let mut closed = false;

    let termination = loop {
        if steps >= opts.max_steps || opts.max_length.is_some_and(|m| length >= m) {
            break Termination::StepLimit;
        }
        let mut hs = h;
        if let Some(m) = opts.max_length {
            hs = hs.min(m - length).max(hmin);
        }
        let step = match dopri(field, y, k1, hs, tol) {
            Ok(s) if s.err <= opts.atol => s,
            Ok(s) => {
                let fac = (0.9 * math::pow(opts.atol / s.err, 0.2)).clamp(0.1, 0.9);
                h = hs * fac;
                if h < hmin {
                    break Termination::StepLimit;
                }
                continue;
            }
            Err(stop) => {
                h = hs * 0.25;
                if h < hmin {
                    break stop_reason(stop);
                }
                continue;
            }
        };
        let p = match field.position(step.y.0, step.y.1) {
            Ok(p) => p,
            Err(_) => {
                h = hs * 0.25;
                if h < hmin {
                    break Termination::DomainExit;
                }
                continue;
            }
        };
        let prev = y;
        y = step.y;
        k1 = step.dir;
        steps += 1;
        length += hs;
        uv.push(y);
        xyz.push(p);

        let hit = opts.umbilics.iter().any(|&q| {
            let same = launched_from.is_some_and(|l| dom.distance(l, q) < 1e-9 * diam);
            !same && point_segment_distance(nearest_image(&dom, q, y), prev, y) < excl
        });
        if launched_from.is_some_and(|l| dom.distance(l, y) > excl) {
            launched_from = None;
        }
        if hit {
            break Termination::UmbilicHit;
        }

        if opts.detect_closure && steps >= opts.closure_min_steps {
            let img = nearest_image(&dom, start, y);
            let cosang = k1.0 * k0.0 + k1.1 * k0.1;
            if point_segment_distance(img, prev, y) < close_r && cosang > 0.999 {
                uv.push(img);
                xyz.push(x0);
                closed = true;
                break Termination::Closed;
            }
        }

        let fac = if step.err > 0.0 { (0.9 * math::pow(opts.atol / step.err, 0.2)).clamp(0.2, 5.0) } else { 5.0 };
        h = (hs * fac).min(hmax);
    };

    Ok(PrincipalCurve { foliation, points_uv: uv, points_xyz: xyz, closed, termination })
}
