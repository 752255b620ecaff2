use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use crate::error::{Error, Result};
use crate::map::{PiecewiseMap, Side};
use crate::orbit::{Germ, GermOrbit, PeriodicOrbit, StructureGraph};
use crate::rational::Rational;

use super::connection::{connection_from, germ_orbits};
use super::oracle::{oracle_point, OracleConfig};
use super::{classify_point, point_in, PointStability, StabilityClass};

use StabilityClass::{SemiStable, Stable, Unstable};

/// A failed implication, replayable from the map text and the JSON witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub clause: String,
    pub witness: serde_json::Value,
}

impl Violation {
    fn new(clause: &str, witness: serde_json::Value) -> Self {
        Violation {
            clause: clause.to_string(),
            witness,
        }
    }

    pub fn bundle(&self, f: &PiecewiseMap) -> String {
        let block = json!({ "clause": self.clause, "witness": self.witness });
        format!("{}# counterexample\n{}\n", f.to_text(), block)
    }
}

/// Stability data for every node of a closed structure.
struct Analysis<'a> {
    f: &'a PiecewiseMap,
    classes: BTreeMap<Rational, PointStability>,
    orbits: BTreeMap<Rational, Vec<GermOrbit>>,
}

impl<'a> Analysis<'a> {
    fn new(f: &'a PiecewiseMap, s: &StructureGraph) -> Result<Self> {
        if !s.closed {
            return Err(Error::NotConfined(s.root.clone()));
        }
        let mut classes = BTreeMap::new();
        let mut orbits = BTreeMap::new();
        for y in &s.nodes {
            classes.insert(y.clone(), point_in(f, s, y)?);
            orbits.insert(y.clone(), germ_orbits(f, s, y)?);
        }
        Ok(Analysis { f, classes, orbits })
    }

    fn class(&self, y: &Rational) -> StabilityClass {
        self.classes[y].class
    }

    fn rel(&self, y: &Rational, z: &Rational, level: u8) -> bool {
        connection_from(&self.orbits[y], self.f, y, z, level).is_some()
    }

    /// Whether the germ `g` of a node reaches some germ at `z`.
    fn germ_reaches(&self, g: &Germ, z: &Rational) -> bool {
        self.orbits[&g.point]
            .iter()
            .find(|o| o.start == *g)
            .is_some_and(|o| o.germs().any(|h| &h.point == z))
    }

    /// Whether some germ at `y` reaches the germ `g`.
    fn reaches_germ(&self, y: &Rational, g: &Germ) -> bool {
        self.orbits[y].iter().any(|o| o.first_hit(g).is_some())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Theorem1Report {
    pub pairs: usize,
    pub implications_checked: usize,
    pub violations: Vec<Violation>,
}

/// Evaluates every implication of the connection theorem on every ordered
/// pair `(x, y)` with `y` in the structure of `x`.
pub fn check_theorem1(f: &PiecewiseMap, s: &StructureGraph) -> Result<Theorem1Report> {
    let an = Analysis::new(f, s)?;
    let mut report = Theorem1Report::default();
    for x in &s.nodes {
        let cx = an.class(x);
        for y in s.reachable_from(x) {
            report.pairs += 1;
            let cy = an.class(&y);
            let mut check = |clause: &str, premise: bool, ok: bool| {
                if premise {
                    report.implications_checked += 1;
                    if !ok {
                        report.violations.push(Violation::new(
                            clause,
                            json!({ "x": x.to_string(), "y": y.to_string(),
                                    "class_x": cx.name(), "class_y": cy.name() }),
                        ));
                    }
                }
            };
            let strong = an.rel(&y, x, 4) || an.rel(&y, x, 3) || an.rel(x, &y, 4) || an.rel(x, &y, 2);
            let weak = an.rel(&y, x, 2) || an.rel(&y, x, 1) || an.rel(x, &y, 3) || an.rel(x, &y, 1);
            match cx {
                Stable => {
                    check("a.i", strong, cy == Stable);
                    check("a.ii", weak, cy != Unstable);
                }
                Unstable => {
                    check("b.i", strong, cy == Unstable);
                    check("b.ii", weak, cy != Stable);
                }
                SemiStable => {
                    let side_s = an.classes[x].stable_side().expect("semi-stable has a stable side");
                    let gs = Germ::new(x.clone(), side_s);
                    let gu = Germ::new(x.clone(), side_s.flip());
                    check("c.i", an.rel(x, &y, 4) || an.rel(&y, x, 4), cy == SemiStable);
                    check("c.ii", an.rel(&y, x, 3) || an.rel(x, &y, 2), cy != SemiStable);
                    check("c.iii.x3y", an.rel(x, &y, 3), false);
                    check("c.iii.y2x", an.rel(&y, x, 2), false);
                    check("c.iv.stable", an.germ_reaches(&gs, &y), cy != Unstable);
                    check("c.iv.unstable", an.germ_reaches(&gu, &y), cy != Stable);
                    check("c.v.stable", an.reaches_germ(&y, &gs), cy != Unstable);
                    check("c.v.unstable", an.reaches_germ(&y, &gu), cy != Stable);
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfCycles {
    pub w: Rational,
    pub plus_cycle: Vec<Rational>,
    pub minus_cycle: Vec<Rational>,
    pub intersection: BTreeSet<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorollaryReport {
    /// Cycles through exactly one discontinuity.
    pub single_discontinuity_cycles: usize,
    pub half_cycles: Option<HalfCycles>,
    pub completely_periodic: bool,
    /// Intersection of all cycles of the structure, when completely periodic.
    pub core: BTreeSet<Rational>,
    /// Some node lies on more than one cycle, so its orbit depends on the variant.
    pub choice_matters: bool,
    pub continuous_cycles: usize,
    pub classes: BTreeMap<Rational, StabilityClass>,
    pub violations: Vec<Violation>,
}

const CYCLE_CAP: usize = 10_000;

pub fn check_corollaries(f: &PiecewiseMap, s: &StructureGraph) -> Result<CorollaryReport> {
    let an = Analysis::new(f, s)?;
    let d = &f.special_points().d;
    let t = &f.special_points().t;
    let cycles = s.simple_cycles(CYCLE_CAP);
    let mut rep = CorollaryReport {
        classes: an.classes.iter().map(|(k, v)| (k.clone(), v.class)).collect(),
        ..CorollaryReport::default()
    };
    let violate = |rep: &mut CorollaryReport, clause: &str, w: serde_json::Value| {
        rep.violations.push(Violation::new(clause, w));
    };

    for cyc in &cycles {
        let ds: Vec<usize> = (0..cyc.points.len()).filter(|&i| d.contains(&cyc.points[i])).collect();
        if ds.is_empty() {
            rep.continuous_cycles += 1;
            let classes: BTreeSet<_> = cyc.points.iter().map(|p| an.class(p)).collect();
            if classes.len() > 1 {
                violate(&mut rep, "cor4", json!({ "cycle": strings(&cyc.points) }));
            }
            continue;
        }
        if ds.len() != 1 {
            continue;
        }
        rep.single_discontinuity_cycles += 1;
        let len = cyc.points.len();
        let wi = ds[0];
        let w = &cyc.points[wi];
        let no_turning = cyc.points.iter().all(|p| !t.contains(p));
        for xi in (0..len).filter(|&i| i != wi) {
            let x = &cyc.points[xi];
            // After x: a_1..a_m, then w, then b_1..b_n back to x.
            let m = (wi + len - xi) % len - 1;
            let a: Vec<&Rational> = (1..=m).map(|k| &cyc.points[(xi + k) % len]).collect();
            let n = len - m - 2;
            let b: Vec<&Rational> = (1..=n).map(|k| &cyc.points[(wi + k) % len]).collect();
            let cx = an.class(x);
            let wit = || json!({ "cycle": strings(&cyc.points), "x": x.to_string(), "w": w.to_string() });
            let all = |pts: &[&Rational], ok: &dyn Fn(StabilityClass) -> bool| pts.iter().all(|p| ok(an.class(p)));
            match cx {
                Stable => {
                    if !all(&b, &|c| c == Stable) {
                        violate(&mut rep, "cor1.a.i", wit());
                    }
                    if !all(&a, &|c| c != Unstable) || an.class(w) == Unstable {
                        violate(&mut rep, "cor1.a.ii-iii", wit());
                    }
                }
                Unstable => {
                    if !all(&b, &|c| c == Unstable) {
                        violate(&mut rep, "cor1.b.i", wit());
                    }
                    if !all(&a, &|c| c != Stable) || an.class(w) == Stable {
                        violate(&mut rep, "cor1.b.ii-iii", wit());
                    }
                }
                SemiStable => {
                    if !all(&a, &|c| c == SemiStable) || an.class(w) != SemiStable {
                        violate(&mut rep, "cor1.c.i-ii", wit());
                    } else {
                        let ss = an.classes[w].stable_side().expect("semi-stable");
                        let succ = &cyc.points[(wi + 1) % len];
                        for (side, clause, bad) in [(ss, "cor1.c.iii", Unstable), (ss.flip(), "cor1.c.iv", Stable)] {
                            let o = an.orbits[w].iter().find(|o| o.start.side == side).expect("interior germ");
                            let via_b = o.germ_at(1).is_some_and(|g| &g.point == succ)
                                && o.germ_at(n + 1).is_some_and(|g| &g.point == x);
                            if via_b && !all(&b, &|c| c != bad) {
                                violate(&mut rep, clause, wit());
                            }
                        }
                    }
                }
            }
            if no_turning && cyc.points.iter().any(|p| an.class(p) != cx) {
                violate(&mut rep, "cor1.d-f", wit());
            }
        }
    }

    if s.half_points.len() == 1 {
        let w = s.half_points.iter().next().unwrap();
        let half = |side: Side| -> Option<Vec<Rational>> {
            let mut pts = vec![w.clone()];
            let mut cur = f.lateral_limit(w, side).ok()?;
            while &cur != w {
                if pts.contains(&cur) || pts.len() > s.nodes.len() {
                    return None;
                }
                pts.push(cur.clone());
                cur = f.eval(&cur).ok()??;
            }
            Some(pts)
        };
        if let (Some(plus), Some(minus)) = (half(Side::Plus), half(Side::Minus)) {
            let ps: BTreeSet<_> = plus.iter().cloned().collect();
            let ms: BTreeSet<_> = minus.iter().cloned().collect();
            let z: BTreeSet<Rational> = ps.intersection(&ms).cloned().collect();
            let wit = json!({ "w": w.to_string(), "plus": strings(&plus), "minus": strings(&minus) });
            let zc: BTreeSet<_> = z.iter().map(|p| an.class(p)).collect();
            let every = |c: StabilityClass| s.nodes.iter().all(|y| an.class(y) == c);
            if zc.contains(&Stable) && !every(Stable) {
                violate(&mut rep, "cor2.a", wit.clone());
            }
            if zc.contains(&Unstable) && !every(Unstable) {
                violate(&mut rep, "cor2.b", wit.clone());
            }
            if zc.contains(&SemiStable) {
                let one = ps.iter().all(|y| an.class(y) != Unstable) && ms.iter().all(|y| an.class(y) != Stable);
                let two = ps.iter().all(|y| an.class(y) != Stable) && ms.iter().all(|y| an.class(y) != Unstable);
                if zc.len() != 1 || one == two {
                    violate(&mut rep, "cor2.c", wit.clone());
                }
            }
            if s.nodes.iter().all(|p| !t.contains(p)) {
                let all: BTreeSet<_> = s.nodes.iter().map(|y| an.class(y)).collect();
                if all.len() > 1 {
                    violate(&mut rep, "cor2.d-f", wit.clone());
                }
            }
            rep.half_cycles = Some(HalfCycles {
                w: w.clone(),
                plus_cycle: plus,
                minus_cycle: minus,
                intersection: z,
            });
        }
    }

    let on_cycle: BTreeMap<&Rational, usize> = s
        .nodes
        .iter()
        .map(|y| (y, cycles.iter().filter(|c| c.contains(y)).count()))
        .collect();
    rep.completely_periodic = cycles.len() < CYCLE_CAP && on_cycle.values().all(|&k| k > 0);
    if rep.completely_periodic {
        rep.choice_matters = on_cycle.values().any(|&k| k > 1);
        let mut core: BTreeSet<Rational> = s.nodes.clone();
        for c in &cycles {
            core = core.intersection(&c.point_set()).cloned().collect();
        }
        let cc: BTreeSet<_> = core.iter().map(|p| an.class(p)).collect();
        let wit = json!({ "core": strings(core.iter()) });
        let every = |c: StabilityClass| s.nodes.iter().all(|y| an.class(y) == c);
        if cc.contains(&Stable) && !every(Stable) {
            violate(&mut rep, "cor3.a", wit.clone());
        }
        if cc.contains(&Unstable) && !every(Unstable) {
            violate(&mut rep, "cor3.b", wit.clone());
        }
        if cc.contains(&SemiStable) && cc.len() != 1 {
            violate(&mut rep, "cor3.c", wit);
        }
        rep.core = core;
    }
    Ok(rep)
}

fn strings<'a>(pts: impl IntoIterator<Item = &'a Rational>) -> Vec<String> {
    pts.into_iter().map(|p| p.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theorem2Report {
    pub germ: StabilityClass,
    pub stride_one: StabilityClass,
    pub stride_n: StabilityClass,
    pub consistent: bool,
}

/// Compares the germ verdict with the oracle sampled every step and every `n` steps.
pub fn check_theorem2(f: &PiecewiseMap, orbit: &PeriodicOrbit) -> Result<Theorem2Report> {
    if !orbit.continuous {
        return Err(Error::Precondition("orbit is not continuous".into()));
    }
    let x = &orbit.points[0];
    let germ = classify_point(f, x)?;
    let cfg = OracleConfig::default();
    let stride_one = oracle_point(f, x, &cfg);
    let stride_n = oracle_point(f, x, &OracleConfig { stride: orbit.period, ..cfg });
    Ok(Theorem2Report {
        germ,
        stride_one,
        stride_n,
        consistent: germ == stride_one && stride_one == stride_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::parse_map;
    use crate::orbit::{periodic_points, structure};
    use crate::rational::rat;
    use crate::Limits;

    fn shift() -> PiecewiseMap {
        parse_map("interval 0 1\npiece 0 1/2 : 1 1/8\npiece 1/2 1 : 1 -1/8\n").unwrap()
    }

    #[test]
    fn shift_structure_checks() {
        let f = shift();
        let s = structure(&f, &rat(1, 2), 100).unwrap();
        let r = check_theorem1(&f, &s).unwrap();
        assert!(r.violations.is_empty());
        assert_eq!(r.pairs, 9);
        let c = check_corollaries(&f, &s).unwrap();
        assert!(c.violations.is_empty());
        let h = c.half_cycles.unwrap();
        assert_eq!(h.plus_cycle, vec![rat(1, 2), rat(3, 8)]);
        assert_eq!(h.minus_cycle, vec![rat(1, 2), rat(5, 8)]);
        assert_eq!(h.intersection, [rat(1, 2)].into());
        assert!(c.classes.values().all(|k| *k == Unstable));
        assert!(c.completely_periodic);
        assert_eq!(c.core, [rat(1, 2)].into());
        assert!(c.choice_matters);
    }

    #[test]
    fn tent_and_contraction() {
        let tent = parse_map("interval 0 1\npiece 0 1/2 : 3/2 0\npiece 1/2 1 : -3/2 3/2\n").unwrap();
        let s = structure(&tent, &rat(3, 5), 100).unwrap();
        let c = check_corollaries(&tent, &s).unwrap();
        assert_eq!(c.continuous_cycles, 1);
        assert!(c.violations.is_empty());
        let c2 = parse_map("interval 0 1\npiece 0 1 : 1/2 1/4\n").unwrap();
        let s = structure(&c2, &rat(1, 2), 100).unwrap();
        assert!(check_theorem1(&c2, &s).unwrap().violations.is_empty());
        let orbit = PeriodicOrbit::continuous_through(&c2, &rat(1, 2), 1).unwrap();
        let r = check_theorem2(&c2, &orbit).unwrap();
        assert!(r.consistent && r.germ == Stable);
        let pp = periodic_points(&tent, 1, &Limits::default()).unwrap();
        let o = pp.orbits.iter().find(|o| o.points == vec![rat(3, 5)]).unwrap();
        let r = check_theorem2(&tent, o).unwrap();
        assert!(r.consistent && r.germ == Unstable);
    }

    #[test]
    fn period_two_stable() {
        // Two contracting decreasing branches swapping 1/4 and 3/4.
        let f = parse_map("interval 0 1\npiece 0 1/2 : -1/2 7/8\npiece 1/2 1 : -1/2 5/8\n").unwrap();
        let o = PeriodicOrbit::continuous_through(&f, &rat(1, 4), 4).unwrap();
        assert_eq!(o.period, 2);
        let r = check_theorem2(&f, &o).unwrap();
        assert!(r.consistent && r.germ == Stable);
    }
}
