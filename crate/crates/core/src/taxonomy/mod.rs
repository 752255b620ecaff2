//! Critical, trapped, free and exceptional continuous periodic orbits, basins
//! next to special points, and the bound on stable free orbits.

mod basin;
mod sign;
mod trapped;
mod window;

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::map::{PiecewiseMap, Side};
use crate::orbit::{periodic_points, PeriodicOrbit};
use crate::rational::{format_set, Rational};
use crate::stability::{classify_point, StabilityClass};
use crate::Limits;

pub use basin::{
    attracted, attraction_regions, basin_adjacent_special, AttractionRegion, AttractionRegions, BasinSide,
    BasinWitness,
};
#[allow(unused_imports)]
pub(crate) use basin::attracted_with;
pub use sign::{closed_fixed_points, fixed_points, strict_everywhere};
#[doc(hidden)]
pub use trapped::FLIP_TRAPPED;
pub use trapped::{is_trapped, is_trapped_at, Trapped, TrappedWitness};
pub use window::{monotone_window, EdgeOrigin, Window};
pub(crate) use window::compose_local;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExceptionalType {
    A,
    B,
    C,
}

impl ExceptionalType {
    pub fn name(self) -> &'static str {
        match self {
            ExceptionalType::A => "a",
            ExceptionalType::B => "b",
            ExceptionalType::C => "c",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCase {
    None,
    FixedEndpoint,
    TwoCycleEndpoints,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitTaxonomy {
    pub orbit: PeriodicOrbit,
    pub critical: bool,
    pub trapped: bool,
    pub free: bool,
    pub exceptional_types: BTreeSet<ExceptionalType>,
    pub boundary_case: BoundaryCase,
}

pub fn taxonomy(f: &PiecewiseMap, orbit: &PeriodicOrbit) -> Result<OrbitTaxonomy> {
    if !orbit.continuous {
        return Err(Error::Precondition("orbit is not continuous".into()));
    }
    let sp = f.special_points();
    let critical = orbit.points.iter().any(|p| sp.t.contains(p));
    let interior = orbit.points.iter().all(|p| p != f.a() && p != f.b());
    let mut trapped = false;
    if !critical && interior {
        let flags = orbit
            .points
            .iter()
            .map(|p| Ok(is_trapped_at(f, p, orbit.period)?.trapped))
            .collect::<Result<Vec<bool>>>()?;
        if flags.iter().any(|t| *t != flags[0]) {
            return Err(Error::Violation(format!(
                "trapped flag differs along the orbit {}: {flags:?}",
                format_set(&orbit.points)
            )));
        }
        trapped = flags[0];
    }
    let boundary_case = if interior {
        BoundaryCase::None
    } else if orbit.period == 1 {
        BoundaryCase::FixedEndpoint
    } else if orbit.period == 2 && orbit.point_set() == BTreeSet::from([f.a().clone(), f.b().clone()]) {
        BoundaryCase::TwoCycleEndpoints
    } else if critical {
        BoundaryCase::None
    } else {
        return Err(Error::Violation(format!(
            "periodic endpoint orbit {} is neither fixed, critical nor the endpoint 2-cycle",
            format_set(&orbit.points)
        )));
    };
    let free = !critical && !trapped && interior;
    let exceptional_types = if free { exceptional_clauses(f, orbit)? } else { BTreeSet::new() };
    Ok(OrbitTaxonomy {
        orbit: orbit.clone(),
        critical,
        trapped,
        free,
        exceptional_types,
        boundary_case,
    })
}

/// Exceptional types of a free orbit; empty for any other orbit.
pub fn exceptional_type(f: &PiecewiseMap, orbit: &PeriodicOrbit) -> Result<BTreeSet<ExceptionalType>> {
    Ok(taxonomy(f, orbit)?.exceptional_types)
}

fn no_special_between(f: &PiecewiseMap, lo: &Rational, hi: &Rational) -> bool {
    f.special_points().s.iter().all(|s| s <= lo || s >= hi)
}

fn exceptional_clauses(f: &PiecewiseMap, orbit: &PeriodicOrbit) -> Result<BTreeSet<ExceptionalType>> {
    let (a, b) = (f.a(), f.b());
    let mut out = BTreeSet::new();
    if orbit.period == 1 {
        let x = &orbit.points[0];
        if no_special_between(f, x, b)
            && f.lateral_piece(x, Side::Plus)?.increasing()
            && strict_everywhere(f.pieces(), x, b, Ordering::Less)
        {
            out.insert(ExceptionalType::A);
        }
        if no_special_between(f, a, x)
            && f.lateral_piece(x, Side::Minus)?.increasing()
            && strict_everywhere(f.pieces(), a, x, Ordering::Greater)
        {
            out.insert(ExceptionalType::B);
        }
    }
    if orbit.period == 2 {
        let x = orbit.points.iter().min().expect("non-empty orbit");
        let fx = orbit.points.iter().max().expect("non-empty orbit");
        if no_special_between(f, a, x)
            && no_special_between(f, fx, b)
            && !f.lateral_piece(x, Side::Minus)?.increasing()
            && !f.lateral_piece(fx, Side::Plus)?.increasing()
        {
            let left: Vec<_> = f
                .pieces()
                .iter()
                .filter(|p| &p.left < x)
                .map(|p| {
                    let mut p = p.clone();
                    p.right = p.right.min(x.clone());
                    p
                })
                .collect();
            let second = compose_local(f, &left);
            if strict_everywhere(&second, a, x, Ordering::Greater) {
                out.insert(ExceptionalType::C);
            }
        }
    }
    Ok(out)
}

/// Checks that each exceptional type occurs at most once and that type (c)
/// excludes the other two.
pub fn exceptional_census(taxa: &[OrbitTaxonomy]) -> Result<()> {
    let mut seen: Vec<ExceptionalType> = taxa.iter().flat_map(|t| t.exceptional_types.iter().copied()).collect();
    seen.sort();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Violation(format!("exceptional type repeated: {seen:?}")));
    }
    if seen.contains(&ExceptionalType::C) && seen.len() > 1 {
        return Err(Error::Violation(format!("type c alongside {seen:?}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub count_found: usize,
    pub horizon: usize,
    pub n_t: usize,
    pub n_d: usize,
    pub bound: usize,
    pub holds: bool,
    pub orbits: Vec<PeriodicOrbit>,
}

impl std::fmt::Display for BoundReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "count={} N_T={} N_D={} bound={} {}",
            self.count_found,
            self.n_t,
            self.n_d,
            self.bound,
            if self.holds { "HOLDS" } else { "VIOLATED" }
        )
    }
}

/// Stable or semi-stable, non-trapped continuous orbits up to `horizon`, against the bound.
pub fn count_bound(f: &PiecewiseMap, horizon: usize) -> Result<BoundReport> {
    count_bound_with(f, horizon, &Limits::default())
}

pub fn count_bound_with(f: &PiecewiseMap, horizon: usize, limits: &Limits) -> Result<BoundReport> {
    let sp = f.special_points();
    if sp.s.is_empty() {
        return Err(Error::Precondition("map has no special points".into()));
    }
    let pp = periodic_points(f, horizon, limits)?;
    let mut orbits = Vec::new();
    for o in pp.continuous() {
        let class = classify_point(f, &o.points[0])?;
        if class == StabilityClass::Unstable {
            continue;
        }
        if !taxonomy(f, o)?.trapped {
            orbits.push(o.clone());
        }
    }
    let (n_t, n_d) = (sp.t.len(), sp.d.len());
    let bound = n_t + 2 * n_d + 2;
    Ok(BoundReport {
        count_found: orbits.len(),
        horizon,
        n_t,
        n_d,
        bound,
        holds: orbits.len() <= bound,
        orbits,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::map::parse_map;
    use crate::map::tests::{shift, tent};
    use crate::rational::rat;
    use crate::stability::tests::contraction;

    pub fn hat() -> PiecewiseMap {
        parse_map("interval 0 1\npiece 0 1/2 : 1/2 3/8\npiece 1/2 1 : -1/2 7/8\n").unwrap()
    }

    pub fn type_c() -> PiecewiseMap {
        parse_map(
            "interval 0 1\npiece 0 1/4 : -1/2 7/8\npiece 1/4 1/2 : -3/2 9/8\n\
             piece 1/2 3/4 : -1/2 5/8\npiece 3/4 1 : -1 1\n",
        )
        .unwrap()
    }

    fn orbit(f: &PiecewiseMap, x: Rational) -> PeriodicOrbit {
        PeriodicOrbit::continuous_through(f, &x, 8).unwrap()
    }

    fn types(v: &[ExceptionalType]) -> BTreeSet<ExceptionalType> {
        v.iter().copied().collect()
    }

    #[test]
    fn flags() {
        let t = tent();
        let x = taxonomy(&t, &orbit(&t, rat(3, 5))).unwrap();
        assert_eq!((x.critical, x.trapped, x.free), (false, true, false));
        let z = taxonomy(&t, &orbit(&t, rat(0, 1))).unwrap();
        assert_eq!((z.free, z.boundary_case), (false, BoundaryCase::FixedEndpoint));
        let c = contraction();
        let x = taxonomy(&c, &orbit(&c, rat(1, 2))).unwrap();
        assert!(x.free);
        assert_eq!(x.exceptional_types, types(&[ExceptionalType::A, ExceptionalType::B]));
        let h = hat();
        let x = taxonomy(&h, &orbit(&h, rat(7, 12))).unwrap();
        assert!(x.free && x.exceptional_types.is_empty());
        let k = type_c();
        let x = taxonomy(&k, &orbit(&k, rat(1, 4))).unwrap();
        assert!(x.free);
        assert_eq!(x.exceptional_types, types(&[ExceptionalType::C]));
        let y = taxonomy(&k, &orbit(&k, rat(9, 20))).unwrap();
        assert!(y.trapped);
        exceptional_census(&[x, y]).unwrap();
    }

    #[test]
    fn endpoint_cycle() {
        let f = parse_map("interval 0 1\npiece 0 1 : -1 1\n").unwrap();
        let x = taxonomy(&f, &orbit(&f, rat(0, 1))).unwrap();
        assert_eq!(x.boundary_case, BoundaryCase::TwoCycleEndpoints);
    }

    #[test]
    fn bounds() {
        assert_eq!(count_bound(&hat(), 8).unwrap().to_string(), "count=1 N_T=1 N_D=0 bound=3 HOLDS");
        let r = count_bound(&shift(), 8).unwrap();
        assert_eq!((r.count_found, r.n_t, r.n_d, r.bound, r.holds), (0, 0, 1, 4, true));
        let r = count_bound(&tent(), 6).unwrap();
        assert_eq!((r.count_found, r.bound, r.holds), (0, 3, true));
        assert!(count_bound(&contraction(), 4).is_err());
    }
}
