use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::map::{Limits, PiecewiseMap, Side};
use crate::rational::{denominator_bits, Rational};

/// A point together with the side of its one-sided neighbourhood.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Germ {
    pub point: Rational,
    pub side: Side,
}

impl Germ {
    pub fn new(point: Rational, side: Side) -> Self {
        Germ { point, side }
    }

    pub fn is_valid(&self, f: &PiecewiseMap) -> bool {
        f.in_domain(&self.point)
            && match self.side {
                Side::Plus => &self.point < f.b(),
                Side::Minus => &self.point > f.a(),
            }
    }
}

impl fmt::Display for Germ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.point, self.side.sign())
    }
}

/// Germs that exist at `x`: one at an endpoint, two elsewhere.
pub fn germs_at(f: &PiecewiseMap, x: &Rational) -> Vec<Germ> {
    [Side::Minus, Side::Plus]
        .into_iter()
        .map(|s| Germ::new(x.clone(), s))
        .filter(|g| g.is_valid(f))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GermStepResult {
    pub next: Germ,
    pub slope_magnitude: Rational,
}

pub fn germ_step(f: &PiecewiseMap, g: &Germ) -> Result<GermStepResult> {
    let piece = f.lateral_piece(&g.point, g.side)?;
    let side = if piece.slope.is_negative() { g.side.flip() } else { g.side };
    Ok(GermStepResult {
        next: Germ::new(piece.at(&g.point), side),
        slope_magnitude: piece.slope.abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GermOrbit {
    pub start: Germ,
    /// `steps[i]` carries germ `i` to germ `i + 1`.
    pub steps: Vec<GermStepResult>,
    pub preperiod: usize,
    /// `None` when the cap or the denominator bound was reached first.
    pub cycle_len: Option<usize>,
    pub cycle_product: Option<Rational>,
}

impl GermOrbit {
    pub fn germ(&self, i: usize) -> &Germ {
        if i == 0 {
            &self.start
        } else {
            &self.steps[i - 1].next
        }
    }

    /// Germs `0..=steps.len()`; with a cycle the last one repeats germ `preperiod`.
    pub fn germs(&self) -> impl Iterator<Item = &Germ> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|s| &s.next))
    }

    /// First index `k` at which the germ equals `target`.
    pub fn first_hit(&self, target: &Germ) -> Option<usize> {
        self.germs().position(|g| g == target)
    }

    /// Germ reached after `k` steps, following the cycle past the recorded steps.
    pub fn germ_at(&self, k: usize) -> Option<&Germ> {
        if k <= self.steps.len() {
            return Some(self.germ(k));
        }
        let len = self.cycle_len?;
        let idx = self.preperiod + (k - self.preperiod) % len;
        Some(self.germ(idx))
    }
}

pub fn germ_orbit(f: &PiecewiseMap, g: &Germ, cap: usize) -> Result<GermOrbit> {
    if !g.is_valid(f) {
        return Err(Error::NoSide {
            point: g.point.clone(),
            side: g.side.name(),
        });
    }
    let mut seen: HashMap<Germ, usize> = HashMap::new();
    seen.insert(g.clone(), 0);
    let mut steps: Vec<GermStepResult> = Vec::new();
    let mut cur = g.clone();
    while steps.len() < cap && denominator_bits(&cur.point) <= Limits::default().denominator_bits {
        let step = germ_step(f, &cur)?;
        cur = step.next.clone();
        steps.push(step);
        if let Some(&i) = seen.get(&cur) {
            let product = steps[i..].iter().fold(Rational::one(), |acc, s| acc * &s.slope_magnitude);
            return Ok(GermOrbit {
                start: g.clone(),
                preperiod: i,
                cycle_len: Some(steps.len() - i),
                cycle_product: Some(product),
                steps,
            });
        }
        seen.insert(cur.clone(), steps.len());
    }
    Ok(GermOrbit {
        start: g.clone(),
        preperiod: steps.len(),
        cycle_len: None,
        cycle_product: None,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::parse_map;
    use crate::rational::{int, rat};

    #[test]
    fn steps() {
        let shift = parse_map("interval 0 1\npiece 0 1/2 : 1 1/8\npiece 1/2 1 : 1 -1/8\n").unwrap();
        let r = germ_step(&shift, &Germ::new(rat(1, 2), Side::Plus)).unwrap();
        assert_eq!(r.next, Germ::new(rat(3, 8), Side::Plus));
        assert_eq!(r.slope_magnitude, int(1));
        let tent = parse_map("interval 0 1\npiece 0 1/2 : 3/2 0\npiece 1/2 1 : -3/2 3/2\n").unwrap();
        let r = germ_step(&tent, &Germ::new(rat(1, 2), Side::Plus)).unwrap();
        assert_eq!(r.next, Germ::new(rat(3, 4), Side::Minus));
        assert_eq!(r.slope_magnitude, rat(3, 2));
        let id = PiecewiseMap::identity(int(0), int(1)).unwrap();
        let q = Germ::new(rat(1, 5), Side::Minus);
        assert_eq!(germ_step(&id, &q).unwrap(), GermStepResult { next: q, slope_magnitude: int(1) });
    }

    #[test]
    fn orbits() {
        let shift = parse_map("interval 0 1\npiece 0 1/2 : 1 1/8\npiece 1/2 1 : 1 -1/8\n").unwrap();
        let o = germ_orbit(&shift, &Germ::new(rat(1, 2), Side::Plus), 100).unwrap();
        assert_eq!((o.preperiod, o.cycle_len, o.cycle_product.clone()), (0, Some(2), Some(int(1))));
        assert_eq!(o.germ(1), &Germ::new(rat(3, 8), Side::Plus));
        let c = parse_map("interval 0 1\npiece 0 1 : 1/2 1/4\n").unwrap();
        let o = germ_orbit(&c, &Germ::new(rat(1, 2), Side::Plus), 100).unwrap();
        assert_eq!((o.cycle_len, o.cycle_product), (Some(1), Some(rat(1, 2))));
        let tent = parse_map("interval 0 1\npiece 0 1/2 : 3/2 0\npiece 1/2 1 : -3/2 3/2\n").unwrap();
        let o = germ_orbit(&tent, &Germ::new(rat(3, 5), Side::Plus), 100).unwrap();
        assert_eq!((o.cycle_len, o.cycle_product.clone()), (Some(2), Some(rat(9, 4))));
        assert_eq!(o.germ_at(5), Some(&Germ::new(rat(3, 5), Side::Minus)));
        assert!(germ_orbit(&tent, &Germ::new(int(1), Side::Plus), 10).is_err());
    }
}
