use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

use num_traits::Signed;
use serde::Serialize;

use super::sign::{fixed_points, strict_everywhere};
use super::window::monotone_window;
use super::{taxonomy, ExceptionalType};
use crate::codes::Trivalent;
use crate::error::{Error, Result};
use crate::map::{PiecewiseMap, Side};
use crate::orbit::{iterate_point, PeriodicOrbit};
use crate::rational::{denominator_bits, Rational};
use crate::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasinSide {
    Minus,
    Plus,
    Both,
}

impl BasinSide {
    pub fn name(self) -> &'static str {
        match self {
            BasinSide::Minus => "minus",
            BasinSide::Plus => "plus",
            BasinSide::Both => "both",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasinWitness {
    pub w: Rational,
    pub side: BasinSide,
    pub delta: Rational,
    pub target_orbit: PeriodicOrbit,
    pub w_attracted: bool,
}

impl BasinWitness {
    /// Open lateral intervals covered by the witness.
    pub fn intervals(&self) -> Vec<(Rational, Rational)> {
        let minus = (&self.w - &self.delta, self.w.clone());
        let plus = (self.w.clone(), &self.w + &self.delta);
        match self.side {
            BasinSide::Minus => vec![minus],
            BasinSide::Plus => vec![plus],
            BasinSide::Both => vec![minus, plus],
        }
    }
}

/// Open intervals around the points of a continuous orbit from which iterates
/// of `f^(2n)` converge monotonically to that point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttractionRegion {
    pub lo: Rational,
    pub hi: Rational,
    pub anchor: Rational,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AttractionRegions {
    pub regions: Vec<AttractionRegion>,
}

impl AttractionRegions {
    pub fn locate(&self, y: &Rational) -> Option<&AttractionRegion> {
        self.regions.iter().find(|r| &r.lo < y && y < &r.hi)
    }

    pub fn contains(&self, y: &Rational) -> bool {
        self.locate(y).is_some()
    }

    pub fn extend(&mut self, other: AttractionRegions) {
        self.regions.extend(other.regions);
    }
}

pub fn attraction_regions(f: &PiecewiseMap, orbit: &PeriodicOrbit) -> AttractionRegions {
    let mut out = AttractionRegions::default();
    if !orbit.continuous || 2 * orbit.period > Limits::default().max_power {
        return out;
    }
    for p in &orbit.points {
        let Ok(w) = monotone_window(f, p, 2 * orbit.period) else {
            continue;
        };
        if let Some(z) = fixed_points(&w.pieces, &w.u, p) {
            let lo = z.last().cloned().unwrap_or_else(|| w.u.clone());
            if strict_everywhere(&w.pieces, &lo, p, Ordering::Greater) {
                out.regions.push(AttractionRegion { lo, hi: p.clone(), anchor: p.clone() });
            }
        }
        if let Some(z) = fixed_points(&w.pieces, p, &w.v) {
            let hi = z.first().cloned().unwrap_or_else(|| w.v.clone());
            if strict_everywhere(&w.pieces, p, &hi, Ordering::Less) {
                out.regions.push(AttractionRegion { lo: p.clone(), hi, anchor: p.clone() });
            }
        }
    }
    out
}

/// Whether the orbit of `y` converges to `orbit`, decided exactly where possible.
pub fn attracted(f: &PiecewiseMap, y: &Rational, orbit: &PeriodicOrbit, cap: usize) -> Trivalent {
    attracted_with(f, y, orbit, &attraction_regions(f, orbit), cap)
}

pub(crate) fn attracted_with(
    f: &PiecewiseMap,
    y: &Rational,
    orbit: &PeriodicOrbit,
    regions: &AttractionRegions,
    cap: usize,
) -> Trivalent {
    let target = orbit.point_set();
    let bits = Limits::default().denominator_bits;
    let mut seen = HashSet::new();
    let mut x = y.clone();
    for _ in 0..cap {
        if target.contains(&x) || regions.contains(&x) {
            return Trivalent::YES;
        }
        if !seen.insert(x.clone()) {
            return Trivalent::NO;
        }
        match f.eval(&x) {
            Ok(Some(next)) => x = next,
            _ => return Trivalent::NO,
        }
        if denominator_bits(&x) > bits {
            return Trivalent::unknown(bits);
        }
    }
    Trivalent::unknown(cap as u64)
}

/// Lateral intervals at special points lying in the basin of a free,
/// non-exceptional continuous orbit.
pub fn basin_adjacent_special(f: &PiecewiseMap, orbit: &PeriodicOrbit) -> Result<Vec<BasinWitness>> {
    if f.special_points().s.is_empty() {
        return Err(Error::Precondition("map has no special points".into()));
    }
    let tax = taxonomy(f, orbit)?;
    if !tax.free {
        return Err(Error::Precondition("orbit is not free".into()));
    }
    if !tax.exceptional_types.is_empty() {
        let names: Vec<&str> = tax.exceptional_types.iter().map(|t| ExceptionalType::name(*t)).collect();
        return Err(Error::Precondition(format!("orbit is exceptional ({})", names.join(","))));
    }
    let n = orbit.period;
    let mut out: Vec<BasinWitness> = Vec::new();
    let mut keys = BTreeSet::new();
    for p in &orbit.points {
        let window = monotone_window(f, p, 2 * n)?;
        let mut edges = Vec::new();
        if window.v_origin.is_some() && strict_everywhere(&window.pieces, p, &window.v, Ordering::Less) {
            edges.push(window.v_origin.clone().unwrap());
        }
        if window.u_origin.is_some() && strict_everywhere(&window.pieces, &window.u, p, Ordering::Greater) {
            edges.push(window.u_origin.clone().unwrap());
        }
        for origin in edges {
            let w = origin.special;
            let image = iterate_point(f, p, origin.step).expect("continuous orbit");
            let (side, mut delta) = if image < w {
                (Side::Minus, &w - &image)
            } else {
                (Side::Plus, &image - &w)
            };
            let mut basin_side = match side {
                Side::Minus => BasinSide::Minus,
                Side::Plus => BasinSide::Plus,
            };
            if f.special_points().t.contains(&w) {
                let near = f.lateral_piece(&w, side)?;
                let fimage = f.eval(&image)?.expect("continuous orbit");
                let reach = (near.at(&w) - fimage).abs();
                let far = f.lateral_piece(&w, side.flip())?;
                let room = match side.flip() {
                    Side::Minus => &w - &far.left,
                    Side::Plus => &far.right - &w,
                };
                delta = delta.min(room.min(reach / far.slope.abs()));
                basin_side = BasinSide::Both;
            }
            if !keys.insert((w.clone(), basin_side)) {
                continue;
            }
            let w_attracted = !returns_to(f, &w, side, 2 * n);
            out.push(BasinWitness {
                w,
                side: basin_side,
                delta,
                target_orbit: orbit.clone(),
                w_attracted,
            });
        }
    }
    if out.is_empty() {
        return Err(Error::Violation(format!(
            "no special point borders the basin of {}",
            crate::rational::format_set(&orbit.points)
        )));
    }
    Ok(out)
}

/// Whether the half-point `w` on `side` is a fixed point of `f^m`.
fn returns_to(f: &PiecewiseMap, w: &Rational, side: Side, m: usize) -> bool {
    let Ok(first) = f.lateral_limit(w, side) else {
        return false;
    };
    iterate_point(f, &first, m - 1).as_ref() == Some(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::parse_map;
    use crate::map::tests::{shift, tent};
    use crate::orbit::VariantSelector;
    use crate::rational::rat;
    use crate::stability::tests::contraction;

    pub fn hat() -> PiecewiseMap {
        parse_map("interval 0 1\npiece 0 1/2 : 1/2 3/8\npiece 1/2 1 : -1/2 7/8\n").unwrap()
    }

    #[test]
    fn attracted_examples() {
        let h = hat();
        let o = PeriodicOrbit::continuous_through(&h, &rat(7, 12), 1).unwrap();
        assert!(attracted(&h, &rat(5, 8), &o, 100).is_yes());
        let t = tent();
        let zero = PeriodicOrbit::continuous_through(&t, &rat(0, 1), 1).unwrap();
        assert!(attracted(&t, &rat(3, 5), &zero, 100).is_no());
        let s = shift();
        let half = PeriodicOrbit {
            points: vec![rat(3, 8), rat(1, 2)],
            period: 2,
            selector: VariantSelector::from_bits(&s, "1").unwrap(),
            continuous: false,
        };
        assert!(attracted(&s, &rat(1, 3), &half, 100).is_no());
    }

    #[test]
    fn basin_examples() {
        let h = hat();
        let o = PeriodicOrbit::continuous_through(&h, &rat(7, 12), 1).unwrap();
        let ws = basin_adjacent_special(&h, &o).unwrap();
        assert_eq!(ws.len(), 1);
        let w = &ws[0];
        assert_eq!((w.w.clone(), w.side, w.delta.clone(), w.w_attracted), (rat(1, 2), BasinSide::Both, rat(1, 12), true));
        let regions = attraction_regions(&h, &o);
        for (lo, hi) in w.intervals() {
            for k in 1..40 {
                let y = &lo + (&hi - &lo) * rat(k, 40);
                assert!(attracted_with(&h, &y, &o, &regions, 1000).is_yes(), "{y}");
            }
        }
        let t = tent();
        let o = PeriodicOrbit::continuous_through(&t, &rat(3, 5), 1).unwrap();
        assert!(matches!(basin_adjacent_special(&t, &o), Err(Error::Precondition(_))));
        let c = contraction();
        let o = PeriodicOrbit::continuous_through(&c, &rat(1, 2), 1).unwrap();
        assert!(matches!(basin_adjacent_special(&c, &o), Err(Error::Precondition(_))));
    }
}
