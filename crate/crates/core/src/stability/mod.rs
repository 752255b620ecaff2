//! Stability of confined points through germ dynamics, with an independent
//! interval-iteration oracle and consistency checkers.

mod checks;
mod connection;
pub mod oracle;

use std::fmt;

use num_traits::One;

use crate::error::{Error, Result};
use crate::map::{PiecewiseMap, Side};
use crate::orbit::{germ_orbit, structure_with, Germ, StructureGraph};
use crate::rational::Rational;
use crate::Limits;

pub use checks::{
    check_corollaries, check_theorem1, check_theorem2, CorollaryReport, Theorem1Report, Theorem2Report,
    Violation,
};
pub use connection::{connection, Connection, ConnectionWitness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Verdict {
    Contracting,
    Neutral,
    Expanding,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideClass {
    pub side: Side,
    pub verdict: Verdict,
    pub cycle_product: Rational,
}

impl SideClass {
    pub fn contracting(&self) -> bool {
        self.verdict == Verdict::Contracting
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StabilityClass {
    Stable,
    SemiStable,
    Unstable,
}

impl StabilityClass {
    pub fn name(self) -> &'static str {
        match self {
            StabilityClass::Stable => "stable",
            StabilityClass::SemiStable => "semi_stable",
            StabilityClass::Unstable => "unstable",
        }
    }

    pub fn from_sides(sides: &[bool], at_endpoint: bool) -> Self {
        let n = sides.iter().filter(|c| **c).count();
        match (n, sides.len()) {
            (0, _) => StabilityClass::Unstable,
            (k, m) if k == m => StabilityClass::Stable,
            _ if at_endpoint => StabilityClass::Unstable,
            _ => StabilityClass::SemiStable,
        }
    }
}

impl fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Both side verdicts of a point; at an endpoint only the inward side exists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointStability {
    pub point: Rational,
    pub sides: Vec<SideClass>,
    pub class: StabilityClass,
}

impl PointStability {
    pub fn side(&self, side: Side) -> Option<&SideClass> {
        self.sides.iter().find(|s| s.side == side)
    }

    /// The side whose germ contracts, for a semi-stable point.
    pub fn stable_side(&self) -> Option<Side> {
        (self.class == StabilityClass::SemiStable)
            .then(|| self.sides.iter().find(|s| s.contracting()).map(|s| s.side))
            .flatten()
    }
}

fn confined(f: &PiecewiseMap, x: &Rational) -> Result<StructureGraph> {
    let s = structure_with(f, x, &Limits::default())?;
    if s.closed {
        Ok(s)
    } else {
        Err(Error::NotConfined(x.clone()))
    }
}

pub fn classify_side(f: &PiecewiseMap, x: &Rational, side: Side) -> Result<SideClass> {
    let s = confined(f, x)?;
    side_in(f, &s, x, side)
}

/// Side verdict for a node of a closed structure.
pub fn side_in(f: &PiecewiseMap, s: &StructureGraph, x: &Rational, side: Side) -> Result<SideClass> {
    if !s.contains(x) {
        return Err(Error::NotInStructure(x.clone()));
    }
    let cap = 2 * s.nodes.len() + 2;
    let orbit = germ_orbit(f, &Germ::new(x.clone(), side), cap)?;
    let product = orbit
        .cycle_product
        .ok_or_else(|| Error::Violation(format!("germ orbit of {x}{} did not close", side.sign())))?;
    let verdict = match product.cmp(&Rational::one()) {
        std::cmp::Ordering::Less => Verdict::Contracting,
        std::cmp::Ordering::Equal => Verdict::Neutral,
        std::cmp::Ordering::Greater => Verdict::Expanding,
    };
    Ok(SideClass {
        side,
        verdict,
        cycle_product: product,
    })
}

pub fn classify_point(f: &PiecewiseMap, x: &Rational) -> Result<StabilityClass> {
    Ok(classify_point_detail(f, x)?.class)
}

pub fn classify_point_detail(f: &PiecewiseMap, x: &Rational) -> Result<PointStability> {
    let s = confined(f, x)?;
    point_in(f, &s, x)
}

pub fn point_in(f: &PiecewiseMap, s: &StructureGraph, x: &Rational) -> Result<PointStability> {
    let sides = crate::orbit::germs_at(f, x)
        .into_iter()
        .map(|g| side_in(f, s, x, g.side))
        .collect::<Result<Vec<_>>>()?;
    let contracting: Vec<bool> = sides.iter().map(|s| s.contracting()).collect();
    let class = StabilityClass::from_sides(&contracting, x == f.a() || x == f.b());
    Ok(PointStability {
        point: x.clone(),
        sides,
        class,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::map::parse_map;
    use crate::rational::{int, rat};

    pub fn contraction() -> PiecewiseMap {
        parse_map("interval 0 1\npiece 0 1 : 1/2 1/4\n").unwrap()
    }

    pub fn semistable() -> PiecewiseMap {
        parse_map("interval 0 1\npiece 0 1/2 : 1/2 1/4\npiece 1/2 3/4 : 2 -1/2\npiece 3/4 1 : -2 5/2\n").unwrap()
    }

    #[test]
    fn side_verdicts() {
        let c = classify_side(&contraction(), &rat(1, 2), Side::Plus).unwrap();
        assert_eq!((c.verdict, c.cycle_product), (Verdict::Contracting, rat(1, 2)));
        let shift = parse_map("interval 0 1\npiece 0 1/2 : 1 1/8\npiece 1/2 1 : 1 -1/8\n").unwrap();
        let c = classify_side(&shift, &rat(1, 2), Side::Plus).unwrap();
        assert_eq!((c.verdict, c.cycle_product), (Verdict::Neutral, int(1)));
        let tent = parse_map("interval 0 1\npiece 0 1/2 : 3/2 0\npiece 1/2 1 : -3/2 3/2\n").unwrap();
        let c = classify_side(&tent, &rat(3, 5), Side::Minus).unwrap();
        assert_eq!((c.verdict, c.cycle_product), (Verdict::Expanding, rat(9, 4)));
        assert_eq!(classify_side(&tent, &rat(1, 7), Side::Minus), Err(Error::NotConfined(rat(1, 7))));
    }

    #[test]
    fn point_classes() {
        assert_eq!(classify_point(&contraction(), &rat(1, 2)).unwrap(), StabilityClass::Stable);
        let id = PiecewiseMap::identity(int(0), int(1)).unwrap();
        assert_eq!(classify_point(&id, &rat(1, 3)).unwrap(), StabilityClass::Unstable);
        assert_eq!(classify_point(&id, &int(0)).unwrap(), StabilityClass::Unstable);
        let d = classify_point_detail(&semistable(), &rat(1, 2)).unwrap();
        assert_eq!(d.class, StabilityClass::SemiStable);
        assert_eq!(d.side(Side::Minus).unwrap().cycle_product, rat(1, 2));
        assert_eq!(d.side(Side::Plus).unwrap().cycle_product, int(2));
        assert_eq!(d.stable_side(), Some(Side::Minus));
        // Endpoint fixed point with a contracting inward germ.
        let e = parse_map("interval 0 1\npiece 0 1 : 1/2 0\n").unwrap();
        assert_eq!(classify_point(&e, &int(0)).unwrap(), StabilityClass::Stable);
    }
}
