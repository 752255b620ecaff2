use std::collections::{BTreeMap, BTreeSet};

use num_traits::One;

use crate::error::Result;
use crate::map::{Limits, PiecewiseMap, Side};
use crate::rational::{midpoint, rat, Rational};

use super::{iterate_point, minimal_period, VariantSelector};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicOrbit {
    /// The cycle in dynamical order, starting from its least point.
    pub points: Vec<Rational>,
    pub period: usize,
    pub selector: VariantSelector,
    pub continuous: bool,
}

impl PeriodicOrbit {
    /// Continuous orbit through `x`, or `None` if `x` is not a continuous periodic point.
    pub fn continuous_through(f: &PiecewiseMap, x: &Rational, max: usize) -> Option<Self> {
        let period = minimal_period(f, x, max)?;
        let mut points = Vec::with_capacity(period);
        let mut cur = x.clone();
        for _ in 0..period {
            points.push(cur.clone());
            cur = f.eval(&cur).ok()??;
        }
        Some(PeriodicOrbit::canonical(points, VariantSelector::uniform(f, Side::Minus), true))
    }

    fn canonical(mut points: Vec<Rational>, selector: VariantSelector, continuous: bool) -> Self {
        let start = (0..points.len()).min_by_key(|&i| &points[i]).unwrap_or(0);
        points.rotate_left(start);
        PeriodicOrbit {
            period: points.len(),
            points,
            selector,
            continuous,
        }
    }

    pub fn point_set(&self) -> BTreeSet<Rational> {
        self.points.iter().cloned().collect()
    }

    /// Re-applies the selected branches and checks the cycle closes.
    pub fn closes(&self, f: &PiecewiseMap) -> bool {
        let n = self.points.len();
        (0..n).all(|i| {
            self.selector.apply(f, &self.points[i]).ok().flatten().as_ref() == Some(&self.points[(i + 1) % n])
        })
    }

    /// Orbit point `x` with `f^k(x)` taken in cycle order.
    pub fn rotated_to(&self, k: usize) -> Vec<Rational> {
        let mut p = self.points.clone();
        p.rotate_left(k % self.period);
        p
    }
}

/// An interval on which `f^period` is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodicFamily {
    pub lo: Rational,
    pub hi: Rational,
    pub lo_closed: bool,
    pub hi_closed: bool,
    pub period: usize,
    pub representative: PeriodicOrbit,
}

impl PeriodicFamily {
    pub fn contains(&self, x: &Rational) -> bool {
        (&self.lo < x || (self.lo_closed && &self.lo == x)) && (x < &self.hi || (self.hi_closed && &self.hi == x))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PeriodicPoints {
    /// Isolated continuous orbits and half-point cycles, ordered by period then points.
    pub orbits: Vec<PeriodicOrbit>,
    pub families: Vec<PeriodicFamily>,
}

impl PeriodicPoints {
    pub fn continuous(&self) -> impl Iterator<Item = &PeriodicOrbit> {
        self.orbits.iter().filter(|o| o.continuous)
    }

    pub fn half_point_cycles(&self) -> impl Iterator<Item = &PeriodicOrbit> {
        self.orbits.iter().filter(|o| !o.continuous)
    }
}

pub fn periodic_points(f: &PiecewiseMap, max_period: usize, limits: &Limits) -> Result<PeriodicPoints> {
    let powers = f.powers(max_period, limits)?;
    let mut seen: BTreeSet<Rational> = BTreeSet::new();
    let mut orbits = Vec::new();
    let mut families: Vec<PeriodicFamily> = Vec::new();
    for (i, fnn) in powers.iter().enumerate() {
        let n = i + 1;
        let mut candidates = BTreeSet::new();
        for p in fnn.pieces() {
            if p.slope.is_one() {
                if p.is_identity() {
                    families.extend(identity_family(f, &powers, n, &p.left, &p.right));
                }
                continue;
            }
            let x = &p.intercept / (Rational::one() - &p.slope);
            if p.contains(&x) {
                candidates.insert(x);
            }
        }
        candidates.extend(fnn.breakpoints());
        candidates.insert(f.a().clone());
        candidates.insert(f.b().clone());
        for x in candidates {
            if seen.contains(&x) || minimal_period(f, &x, n) != Some(n) {
                continue;
            }
            let orbit = PeriodicOrbit::continuous_through(f, &x, n).expect("verified periodic");
            seen.extend(orbit.points.iter().cloned());
            orbits.push(orbit);
        }
    }
    orbits.extend(half_point_cycles(f, max_period)?);
    orbits.sort_by(|p, q| (p.period, &p.points, p.continuous).cmp(&(q.period, &q.points, q.continuous)));
    Ok(PeriodicPoints { orbits, families })
}

/// Splits an interval where `f^n` is the identity into the parts whose points
/// never meet a discontinuity and keeps those of minimal period `n`.
fn identity_family(
    f: &PiecewiseMap,
    powers: &[PiecewiseMap],
    n: usize,
    lo: &Rational,
    hi: &Rational,
) -> Vec<PeriodicFamily> {
    let mut cuts: BTreeSet<Rational> = BTreeSet::new();
    for p in &powers[..n] {
        cuts.extend(p.special_points().d.range(lo.clone()..=hi.clone()).cloned());
    }
    cuts.retain(|c| lo < c && c < hi);
    let mut bounds = vec![lo.clone()];
    bounds.extend(cuts);
    bounds.push(hi.clone());
    let mut out = Vec::new();
    for seg in bounds.windows(2) {
        let (l, r) = (&seg[0], &seg[1]);
        if (1..n).any(|k| is_identity_on(&powers[k - 1], l, r)) {
            continue;
        }
        let probes = [midpoint(l, r), l + (r - l) * rat(1, 3), l + (r - l) * rat(2, 3)];
        let Some(representative) = probes
            .iter()
            .find(|x| minimal_period(f, x, n) == Some(n))
            .and_then(|x| PeriodicOrbit::continuous_through(f, x, n))
        else {
            continue;
        };
        let closed = |e: &Rational| iterate_point(f, e, n).as_ref() == Some(e);
        out.push(PeriodicFamily {
            lo: l.clone(),
            hi: r.clone(),
            lo_closed: closed(l),
            hi_closed: closed(r),
            period: n,
            representative,
        });
    }
    out
}

fn is_identity_on(g: &PiecewiseMap, lo: &Rational, hi: &Rational) -> bool {
    g.pieces()
        .iter()
        .filter(|p| &p.left < hi && &p.right > lo)
        .all(|p| p.is_identity())
}

/// Cycles through a discontinuity, one per consistent choice of sides.
fn half_point_cycles(f: &PiecewiseMap, max_period: usize) -> Result<Vec<PeriodicOrbit>> {
    let d = &f.special_points().d;
    let mut found: BTreeMap<(Vec<Rational>, BTreeMap<Rational, Side>), ()> = BTreeMap::new();
    for w in d {
        for side in [Side::Minus, Side::Plus] {
            let mut path = vec![w.clone()];
            let mut choices = BTreeMap::from([(w.clone(), side)]);
            let next = f.lateral_limit(w, side)?;
            walk(f, w, next, &mut path, &mut choices, max_period, &mut found)?;
        }
    }
    Ok(found
        .into_keys()
        .map(|(points, choices)| {
            let mut selector = VariantSelector::uniform(f, Side::Minus);
            selector.choice.extend(choices);
            PeriodicOrbit::canonical(points, selector, false)
        })
        .collect())
}

type CycleSet = BTreeMap<(Vec<Rational>, BTreeMap<Rational, Side>), ()>;

fn walk(
    f: &PiecewiseMap,
    start: &Rational,
    cur: Rational,
    path: &mut Vec<Rational>,
    choices: &mut BTreeMap<Rational, Side>,
    max: usize,
    found: &mut CycleSet,
) -> Result<()> {
    if &cur == start {
        let mut points = path.clone();
        let s = (0..points.len()).min_by_key(|&i| &points[i]).unwrap_or(0);
        points.rotate_left(s);
        found.insert((points, choices.clone()), ());
        return Ok(());
    }
    if path.len() >= max || path.contains(&cur) {
        return Ok(());
    }
    path.push(cur.clone());
    match f.eval(&cur)? {
        Some(next) => walk(f, start, next, path, choices, max, found)?,
        None => {
            for side in [Side::Minus, Side::Plus] {
                choices.insert(cur.clone(), side);
                let next = f.lateral_limit(&cur, side)?;
                walk(f, start, next, path, choices, max, found)?;
            }
            choices.remove(&cur);
        }
    }
    path.pop();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::parse_map;
    use crate::rational::{int, rat};

    #[test]
    fn tent_fixed_points() {
        let tent = parse_map("interval 0 1\npiece 0 1/2 : 3/2 0\npiece 1/2 1 : -3/2 3/2\n").unwrap();
        let pp = periodic_points(&tent, 1, &Limits::default()).unwrap();
        let pts: Vec<_> = pp.orbits.iter().map(|o| o.points.clone()).collect();
        assert_eq!(pts, vec![vec![int(0)], vec![rat(3, 5)]]);
        assert!(pp.families.is_empty());
        assert!(pp.orbits.iter().all(|o| o.continuous && o.closes(&tent)));
    }

    #[test]
    fn shift_families_and_half_cycles() {
        let f = parse_map("interval 0 1\npiece 0 1/2 : 1 1/8\npiece 1/2 1 : 1 -1/8\n").unwrap();
        let pp = periodic_points(&f, 2, &Limits::default()).unwrap();
        let fam: Vec<_> = pp.families.iter().map(|q| (q.lo.clone(), q.hi.clone(), q.period)).collect();
        assert_eq!(fam, vec![(rat(3, 8), rat(1, 2), 2), (rat(1, 2), rat(5, 8), 2)]);
        assert!(pp.families.iter().all(|q| !q.lo_closed && !q.hi_closed));
        assert_eq!(pp.families[0].representative.points, vec![rat(7, 16), rat(9, 16)]);
        let half: Vec<_> = pp.half_point_cycles().map(|o| (o.points.clone(), o.selector.to_bits())).collect();
        assert_eq!(
            half,
            vec![(vec![rat(3, 8), rat(1, 2)], "1".to_string()), (vec![rat(1, 2), rat(5, 8)], "0".to_string())]
        );
        assert!(pp.orbits.iter().all(|o| o.closes(&f)));
        assert_eq!(pp.continuous().count(), 0);
    }

    #[test]
    fn identity_family() {
        let id = PiecewiseMap::identity(int(0), int(1)).unwrap();
        let pp = periodic_points(&id, 1, &Limits::default()).unwrap();
        assert_eq!(pp.families.len(), 1);
        let fam = &pp.families[0];
        assert_eq!((&fam.lo, &fam.hi, fam.lo_closed, fam.hi_closed), (&int(0), &int(1), true, true));
        assert_eq!(fam.representative.points, vec![rat(1, 2)]);
    }
}
