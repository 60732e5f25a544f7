//! Deterministic low-discrepancy sampling (Halton) of parameter boxes.

use alloc::vec::Vec;

use crate::math;
use crate::quadrics::TripleSystemSpec;

const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// Radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// Halton points in [0,1)^D, D ≤ 6. Starts at index 1 to skip the origin.
#[derive(Debug, Clone)]
pub struct Halton<const D: usize> {
    index: u64,
}

impl<const D: usize> Halton<D> {
    pub fn new() -> Self {
        assert!(D <= PRIMES.len());
        Halton { index: 1 }
    }

    /// Starts further along the sequence; distinct offsets give distinct
    /// sample sets.
    pub fn skip(offset: u64) -> Self {
        Halton { index: 1 + offset }
    }
}

impl<const D: usize> Default for Halton<D> {
    fn default() -> Self {
        Self::new()
    }
}

impl<const D: usize> Iterator for Halton<D> {
    type Item = [f64; D];

    fn next(&mut self) -> Option<[f64; D]> {
        let i = self.index;
        self.index += 1;
        Some(core::array::from_fn(|k| radical_inverse(i, PRIMES[k])))
    }
}

/// Whether (u,v,w) is admissible for `sys` with room to spare: `margin` is
/// a fraction of the box (confocal) or of m² + n² (separable system).
pub fn well_inside(sys: &TripleSystemSpec, p: [f64; 3], margin: f64) -> bool {
    let [u, v, w] = p;
    match sys {
        TripleSystemSpec::Confocal(c) => {
            let bx = c.parameter_box();
            let ok = p.iter().zip(bx.iter()).all(|(&x, &(lo, hi))| {
                let m = margin * (hi - lo);
                x > lo + m && x < hi - m
            });
            ok && math::abs(u - w) > 2.5 * margin * (bx[0].1 - bx[0].0)
        }
        TripleSystemSpec::Sto(s) => {
            let (ra, rc) = s.radicands(u, v, w);
            let m = margin * (s.m * s.m + s.n * s.n);
            ra > m && rc > m && math::abs(math::sinh(w)) > margin
        }
        TripleSystemSpec::Sheared { base, shear } => well_inside(base, [u + shear * v, v, w], margin),
    }
}

/// `count` admissible points of `sys`, drawn from the Halton sequence over
/// its sample box. Gives up (returning fewer) after 1000·count draws.
pub fn admissible_points(sys: &TripleSystemSpec, count: usize, margin: f64) -> Vec<[f64; 3]> {
    let bx = sys.sample_box();
    let mut out = Vec::with_capacity(count);
    for (k, h) in Halton::<3>::new().enumerate() {
        if out.len() >= count || k >= 1000 * count.max(1) {
            break;
        }
        let p: [f64; 3] = core::array::from_fn(|i| bx[i].0 + h[i] * (bx[i].1 - bx[i].0));
        if well_inside(sys, p, margin) {
            out.push(p);
        }
    }
    out
}
