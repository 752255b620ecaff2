use std::collections::BTreeSet;

use serde_json::json;

use super::generate::{corpus_config, member_seed, random_map, random_point};
use super::pinned::{all_pinned, pinned};
use super::{Case, Extra, Outcome, SuiteConfig};
use crate::codes::{skeleton, theorem5_forward, theorem5_reverse, Answer, CodeContext, CodeTail};
use crate::error::{Error, Result};
use crate::map::{AffinePiece, PiecewiseMap, Side};
use crate::orbit::{
    germ_orbit, germ_step, germs_at, orbit_with, periodic_points, structure_with, Germ, OrbitTail, PeriodicOrbit,
    PeriodicPoints, StructureGraph, VariantSelector,
};
use crate::rational::{denominator_bits, format_set, int, midpoint, rat, Rational};
use crate::stability::{
    check_corollaries, check_theorem1, check_theorem2, connection, oracle::oracle_point, oracle::OracleConfig,
    point_in, StabilityClass,
};
use crate::taxonomy::{
    attraction_regions, basin_adjacent_special, AttractionRegions, BasinWitness, count_bound_with, exceptional_census, is_trapped,
    is_trapped_at, taxonomy, BasinSide, ExceptionalType,
};
use crate::Limits;

pub const PROPERTY_NAMES: [&str; 18] = [
    "shift_square",
    "preimage_exact",
    "composition_sandwich",
    "power_special_inclusion",
    "compose_associative",
    "lateral_coherence",
    "periodic_closure",
    "oracle_agreement",
    "connection_implications",
    "half_point_cycles",
    "corollary_checks",
    "subsampled_stability",
    "orbit_taxonomy",
    "pinned_taxonomy",
    "orbit_count_bound",
    "regular_points",
    "basin_witnesses",
    "code_properties",
];

pub(crate) enum Corpus {
    Pinned(&'static [&'static str]),
    Maps { size: usize, with_pinned: bool },
    Points(usize),
    Partners { size: usize, count: usize },
}

pub(crate) struct Property {
    pub name: &'static str,
    salt: u64,
    corpus: Corpus,
    pub check: fn(&Case) -> Result<Outcome>,
    pub requires: &'static [(&'static str, &'static str)],
}

impl Property {
    pub fn corpus(&self, cfg: &SuiteConfig) -> Vec<Case> {
        let scaled = |n: usize| ((n as f64 * cfg.scale).round() as usize).max(1);
        let generated = |i: usize, salt: u64| {
            let gc = corpus_config(&cfg.generator, salt, i);
            random_map(&gc).map(|m| (format!("seed:{}", gc.seed), m))
        };
        let mut out = Vec::new();
        match &self.corpus {
            Corpus::Pinned(names) => {
                for n in *names {
                    out.push(Case { label: n.to_string(), map: pinned(n), extra: Extra::None });
                }
            }
            Corpus::Maps { size, with_pinned } => {
                if *with_pinned {
                    for (n, m) in all_pinned() {
                        out.push(Case { label: n.to_string(), map: m, extra: Extra::None });
                    }
                }
                for i in 0..scaled(*size) {
                    if let Ok((label, map)) = generated(i, self.salt) {
                        out.push(Case { label, map, extra: Extra::None });
                    }
                }
            }
            Corpus::Points(size) => {
                for i in 0..scaled(*size) {
                    if let Ok((label, map)) = generated(i, self.salt) {
                        let y = random_point(member_seed(cfg.generator.seed, self.salt ^ 0x9e37, i), 16);
                        out.push(Case { label, map, extra: Extra::Point(y) });
                    }
                }
            }
            Corpus::Partners { size, count } => {
                for i in 0..scaled(*size) {
                    let Ok((label, map)) = generated(i, self.salt) else { continue };
                    let partners: Vec<PiecewiseMap> = (1..=*count)
                        .filter_map(|k| generated(i, self.salt.wrapping_add(k as u64 * 7919)).ok().map(|p| p.1))
                        .collect();
                    if partners.len() == *count {
                        out.push(Case { label, map, extra: Extra::Partners(partners) });
                    }
                }
            }
        }
        out
    }
}

/// Limit violations and resource caps skip a case; theorem violations fail it.
pub(crate) fn evaluate(check: fn(&Case) -> Result<Outcome>, case: &Case) -> Outcome {
    match check(case) {
        Ok(o) => o,
        Err(Error::Violation(msg)) => Outcome::fail(json!({ "violation": msg })),
        Err(e) => Outcome::skip(e.to_string()),
    }
}

pub(crate) fn all() -> Vec<Property> {
    let maps = |size| Corpus::Maps { size, with_pinned: true };
    vec![
        Property { name: "shift_square", salt: 1, corpus: Corpus::Pinned(&["shift"]), check: shift_square, requires: &[] },
        Property { name: "preimage_exact", salt: 2, corpus: Corpus::Points(1000), check: preimage_exact, requires: &[] },
        Property {
            name: "composition_sandwich",
            salt: 3,
            corpus: Corpus::Partners { size: 1000, count: 1 },
            check: composition_sandwich,
            requires: &[("strict_gap", "some pair with a strict inclusion")],
        },
        Property {
            name: "power_special_inclusion",
            salt: 4,
            corpus: Corpus::Maps { size: 300, with_pinned: false },
            check: power_special_inclusion,
            requires: &[("continuous_equality", "continuous maps in the corpus")],
        },
        Property {
            name: "compose_associative",
            salt: 5,
            corpus: Corpus::Partners { size: 200, count: 2 },
            check: compose_associative,
            requires: &[],
        },
        Property { name: "lateral_coherence", salt: 6, corpus: maps(300), check: lateral_coherence, requires: &[] },
        Property {
            name: "periodic_closure",
            salt: 7,
            corpus: maps(200),
            check: periodic_closure,
            requires: &[("intersecting_distinct", "distinct periodic orbits that intersect")],
        },
        Property { name: "oracle_agreement", salt: 8, corpus: maps(200), check: oracle_agreement, requires: &[] },
        Property {
            name: "connection_implications",
            salt: 9,
            corpus: maps(500),
            check: connection_implications,
            requires: &[("disconnected_pair", "two points of one closed structure with no connection")],
        },
        Property { name: "half_point_cycles", salt: 10, corpus: Corpus::Pinned(&["shift"]), check: half_point_cycles, requires: &[] },
        Property { name: "corollary_checks", salt: 11, corpus: maps(300), check: corollary_checks, requires: &[] },
        Property { name: "subsampled_stability", salt: 12, corpus: maps(200), check: subsampled_stability, requires: &[] },
        Property { name: "orbit_taxonomy", salt: 13, corpus: maps(300), check: orbit_taxonomy, requires: &[] },
        Property {
            name: "pinned_taxonomy",
            salt: 14,
            corpus: Corpus::Pinned(&["tent", "contraction", "hat", "shift", "decreasing_cycle"]),
            check: pinned_taxonomy,
            requires: &[],
        },
        Property { name: "orbit_count_bound", salt: 15, corpus: maps(500), check: orbit_count_bound, requires: &[] },
        Property {
            name: "regular_points",
            salt: 16,
            corpus: maps(300),
            check: regular_points,
            requires: &[("forward_certified", "a regular special point with a certified orbit")],
        },
        Property { name: "basin_witnesses", salt: 17, corpus: maps(200), check: basin_witnesses, requires: &[] },
        Property { name: "code_properties", salt: 18, corpus: maps(200), check: code_properties, requires: &[] },
    ]
}

fn limits() -> Limits {
    Limits {
        max_pieces: 20_000,
        structure_nodes: 256,
        denominator_bits: 512,
        ..Limits::default()
    }
}

fn strs<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Vec<String> {
    xs.into_iter().map(|x| x.to_string()).collect()
}

fn interior(f: &PiecewiseMap, set: BTreeSet<Rational>) -> BTreeSet<Rational> {
    set.into_iter().filter(|x| x != f.a() && x != f.b()).collect()
}

fn partners(c: &Case) -> &[PiecewiseMap] {
    match &c.extra {
        Extra::Partners(p) => p,
        _ => &[],
    }
}

fn shift_square(c: &Case) -> Result<Outcome> {
    let f = &c.map;
    let f2 = f.iterate(2)?;
    let expected = vec![
        AffinePiece::new(int(0), rat(3, 8), int(1), rat(1, 4)),
        AffinePiece::new(rat(3, 8), rat(5, 8), int(1), int(0)),
        AffinePiece::new(rat(5, 8), int(1), int(1), rat(-1, 4)),
    ];
    let s2 = f2.special_points().s.clone();
    let m2 = f.m_set(2)?;
    let ok = f2.pieces() == expected.as_slice()
        && s2 == BTreeSet::from([rat(3, 8), rat(5, 8)])
        && m2 == BTreeSet::from([rat(3, 8), rat(1, 2), rat(5, 8)])
        && !f.special_points().s.is_subset(&s2);
    Ok(if ok {
        Outcome::pass()
    } else {
        Outcome::fail(json!({ "square": f2.to_text(), "S": strs(&s2), "M2": strs(&m2) }))
    })
}

fn preimage_exact(c: &Case) -> Result<Outcome> {
    let Extra::Point(y) = &c.extra else { return Ok(Outcome::skip("no point")) };
    let f = &c.map;
    let xs = f.preimage(y);
    for x in &xs {
        if f.eval(x)?.as_ref() != Some(y) {
            return Ok(Outcome::fail(json!({ "y": y.to_string(), "x": x.to_string() })));
        }
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Ok(Outcome::fail(json!({ "unsorted": strs(&xs) })));
    }
    for p in f.pieces() {
        let (lo, hi) = p.image();
        if &lo < y && y < &hi && !xs.iter().any(|x| p.contains(x)) {
            return Ok(Outcome::fail(json!({ "y": y.to_string(), "missed_piece": [p.left.to_string(), p.right.to_string()] })));
        }
    }
    Ok(Outcome::pass())
}

fn composition_sandwich(c: &Case) -> Result<Outcome> {
    let (f, g) = (&c.map, &partners(c)[0]);
    let h = f.compose_with(g, &limits())?;
    let sh = h.special_points().s.clone();
    let mut m2 = g.special_points().s.clone();
    m2.extend(g.preimage_set(&f.special_points().s));
    let m2 = interior(g, m2);
    let m1: BTreeSet<Rational> = m2.difference(&g.special_points().d).cloned().collect();
    if !m1.is_subset(&sh) || !sh.is_subset(&m2) {
        return Ok(Outcome::fail(json!({ "S(fg)": strs(&sh), "M1": strs(&m1), "M2": strs(&m2) })));
    }
    let o = Outcome::pass();
    Ok(if m1 != sh || sh != m2 { o.tagged("strict_gap") } else { o })
}

fn power_special_inclusion(c: &Case) -> Result<Outcome> {
    let f = &c.map;
    let powers = match f.powers(6, &limits()) {
        Ok(p) => p,
        Err(e) => return Ok(Outcome::skip(e.to_string())),
    };
    let continuous = f.special_points().d.is_empty();
    for (i, p) in powers.iter().enumerate() {
        let n = i + 1;
        let s = &p.special_points().s;
        let m = interior(f, f.m_set(n)?);
        if !s.is_subset(&m) || (continuous && s != &m) {
            return Ok(Outcome::fail(json!({ "n": n, "S": strs(s), "M": strs(&m) })));
        }
        if continuous {
            for later in &powers[i..] {
                if !s.is_subset(&later.special_points().s) {
                    return Ok(Outcome::fail(json!({ "n": n, "not_monotone": strs(s) })));
                }
            }
        }
    }
    let o = Outcome::pass();
    Ok(if continuous { o.tagged("continuous_equality") } else { o })
}

fn compose_associative(c: &Case) -> Result<Outcome> {
    let (f, g, h) = (&c.map, &partners(c)[0], &partners(c)[1]);
    let l = limits();
    let left = f.compose_with(g, &l)?.compose_with(h, &l)?;
    let right = f.compose_with(&g.compose_with(h, &l)?, &l)?;
    Ok(if left.pieces() == right.pieces() {
        Outcome::pass()
    } else {
        Outcome::fail(json!({ "left": left.to_text(), "right": right.to_text() }))
    })
}

fn lateral_coherence(c: &Case) -> Result<Outcome> {
    let f = &c.map;
    let sp = f.special_points();
    for p in f.breakpoints() {
        let (m, q) = (f.lateral_limit(&p, Side::Minus)?, f.lateral_limit(&p, Side::Plus)?);
        let v = f.eval(&p)?;
        let ok = if sp.d.contains(&p) { v.is_none() && m != q } else { v.as_ref() == Some(&m) && m == q };
        if !ok {
            return Ok(Outcome::fail(json!({ "breakpoint": p.to_string() })));
        }
    }
    Ok(Outcome::pass())
}

fn closed_structures(f: &PiecewiseMap, pp: Option<&PeriodicPoints>, max_nodes: usize, max: usize) -> Vec<StructureGraph> {
    let mut roots: Vec<Rational> = f.special_points().s.iter().cloned().collect();
    if let Some(pp) = pp {
        roots.extend(pp.orbits.iter().map(|o| o.points[0].clone()));
    }
    let mut seen: BTreeSet<Vec<Rational>> = BTreeSet::new();
    let mut out = Vec::new();
    let l = Limits { structure_nodes: max_nodes, ..limits() };
    for r in roots {
        if out.len() >= max {
            break;
        }
        if let Ok(s) = structure_with(f, &r, &l) {
            if s.closed && seen.insert(s.nodes.iter().cloned().collect()) {
                out.push(s);
            }
        }
    }
    out
}

fn periodic_closure(c: &Case) -> Result<Outcome> {
    let f = &c.map;
    let pp = periodic_points(f, 4, &limits())?;
    let mut out = Outcome::pass();
    for o in &pp.orbits {
        if !o.closes(f) {
            return Ok(Outcome::fail(json!({ "orbit": strs(&o.points), "selector": o.selector.to_bits() })));
        }
    }
    let continuous = f.special_points().d.is_empty();
    for (i, o) in pp.orbits.iter().enumerate() {
        for p in &pp.orbits[i + 1..] {
            let (a, b) = (o.point_set(), p.point_set());
            if a != b && !a.is_disjoint(&b) {
                if continuous {
                    return Ok(Outcome::fail(json!({ "first": strs(&a), "second": strs(&b) })));
                }
                out = out.tagged("intersecting_distinct");
            }
        }
    }
    for o in pp.orbits.iter().take(6) {
        let x = &o.points[0];
        let s = structure_with(f, x, &limits())?;
        if !s.closed {
            continue;
        }
        let r = orbit_with(f, x, &o.selector, 1000, &limits())?;
        if r.prefix.iter().any(|p| !s.contains(p)) {
            return Ok(Outcome::fail(json!({ "structure_misses_orbit_of": x.to_string() })));
        }
        for n in s.nodes.iter().take(32) {
            for g in germs_at(f, n) {
                let go = germ_orbit(f, &g, 2 * s.nodes.len())?;
                if go.cycle_len.is_none() {
                    return Ok(Outcome::fail(json!({ "germ_without_cycle": g.to_string() })));
                }
            }
        }
    }
    for w in &f.special_points().t {
        let s = structure_with(f, w, &limits())?;
        if !s.closed {
            continue;
        }
        match orbit_with(f, w, &VariantSelector::uniform(f, Side::Minus), 10_000, &limits()) {
            Ok(r) if !matches!(r.tail, OrbitTail::Cycle(_)) => {
                return Ok(Outcome::fail(json!({ "not_eventually_periodic": w.to_string() })));
            }
            _ => {}
        }
    }
    Ok(out)
}

fn oracle_agreement(c: &Case) -> Result<Outcome> {
    let f = &c.map;
    let pp = periodic_points(f, 3, &limits())?;
    let mut pts: BTreeSet<Rational> = pp.orbits.iter().flat_map(|o| o.points.iter().cloned()).collect();
    pts.extend(pp.families.iter().map(|fam| fam.representative.points[0].clone()));
    for s in closed_structures(f, None, 24, 3) {
        pts.extend(s.nodes.iter().cloned());
    }
    let cfg = OracleConfig::default();
    let mut checked = 0;
    for x in pts.iter().take(16) {
        let s = structure_with(f, x, &limits())?;
        if !s.closed {
            continue;
        }
        let germ = point_in(f, &s, x)?.class;
        let oracle = oracle_point(f, x, &cfg);
        if germ != oracle {
            return Ok(Outcome::fail(json!({ "x": x.to_string(), "germ": germ.name(), "oracle": oracle.name() })));
        }
        checked += 1;
    }
    Ok(if checked == 0 { Outcome::skip("no confined points") } else { Outcome::pass() })
}

fn connection_implications(c: &Case) -> Result<Outcome> {
    let f = &c.map;
    let pp = periodic_points(f, 3, &limits()).ok();
    let structures = closed_structures(f, pp.as_ref(), 40, 4);
    if structures.is_empty() {
        return Ok(Outcome::skip("no closed structures"));
    }
    for s in &structures {
        let r = check_theorem1(f, s)?;
        if let Some(v) = r.violations.first() {
            return Ok(Outcome::fail(json!({ "clause": v.clause, "witness": v.witness })));
        }
        let nodes: Vec<&Rational> = s.nodes.iter().take(8).collect();
        for y in &nodes {
            for z in &nodes {
                if connection(f, s, y, z, 4)?.is_some() && connection(f, s, y, z, 1)?.is_none() {
                    return Ok(Outcome::fail(json!({ "level4_without_level1": [y.to_string(), z.to_string()] })));
                }
            }
        }
    }
    let mut out = Outcome::pass();
    if c.label == "disconnected_cycle" {
        let s = structure_with(f, &rat(1, 2), &limits())?;
        let (y, z) = (rat(1, 2), rat(1, 4));
        for level in 1..=4 {
            if connection(f, &s, &y, &z, level)?.is_some() || connection(f, &s, &z, &y, level)?.is_some() {
                return Ok(Outcome::fail(json!({ "unexpected_connection_level": level })));
            }
        }
        out = out.tagged("disconnected_pair");
    }
    Ok(out)
}

fn half_point_cycles(c: &Case) -> Result<Outcome> {
    let f = &c.map;
    let s = structure_with(f, &rat(1, 2), &Limits::default())?;
    let r = check_corollaries(f, &s)?;
    let h = r.half_cycles.as_ref().ok_or_else(|| Error::Violation("no half-point cycles".into()))?;
    let plus: BTreeSet<_> = h.plus_cycle.iter().cloned().collect();
    let minus: BTreeSet<_> = h.minus_cycle.iter().cloned().collect();
    let ok = plus == BTreeSet::from([rat(1, 2), rat(3, 8)])
        && minus == BTreeSet::from([rat(1, 2), rat(5, 8)])
        && !plus.is_disjoint(&minus)
        && plus != minus
        && r.classes.values().all(|k| *k == StabilityClass::Unstable)
        && r.violations.is_empty();
    Ok(if ok {
        Outcome::pass()
    } else {
        Outcome::fail(json!({ "plus": strs(&plus), "minus": strs(&minus), "violations": r.violations.len() }))
    })
}

fn corollary_checks(c: &Case) -> Result<Outcome> {
    let f = &c.map;
    let pp = periodic_points(f, 3, &limits()).ok();
    let structures = closed_structures(f, pp.as_ref(), 40, 4);
    if structures.is_empty() {
        return Ok(Outcome::skip("no closed structures"));
    }
    for s in &structures {
        let r = check_corollaries(f, s)?;
        if let Some(v) = r.violations.first() {
            return Ok(Outcome::fail(json!({ "clause": v.clause, "witness": v.witness })));
        }
    }
    Ok(Outcome::pass())
}

fn subsampled_stability(c: &Case) -> Result<Outcome> {
    let f = &c.map;
    let pp = periodic_points(f, 4, &limits())?;
    let mut checked = 0;
    for o in pp.continuous().take(6) {
        let r = check_theorem2(f, o)?;
        if !r.consistent {
            return Ok(Outcome::fail(json!({
                "orbit": strs(&o.points),
                "germ": r.germ.name(),
                "stride_one": r.stride_one.name(),
                "stride_n": r.stride_n.name(),
            })));
        }
        checked += 1;
    }
    Ok(if checked == 0 { Outcome::skip("no continuous orbits") } else { Outcome::pass() })
}

fn stability_of(f: &PiecewiseMap, o: &PeriodicOrbit) -> Result<StabilityClass> {
    let s = structure_with(f, &o.points[0], &limits())?;
    if !s.closed {
        return Err(Error::NotConfined(o.points[0].clone()));
    }
    Ok(point_in(f, &s, &o.points[0])?.class)
}

fn orbit_taxonomy(c: &Case) -> Result<Outcome> {
    let f = &c.map;
    let pp = periodic_points(f, 8, &limits())?;
    let mut taxa = Vec::new();
    for o in pp.continuous() {
        let t = taxonomy(f, o)?;
        let interior = o.points.iter().all(|p| p != f.a() && p != f.b());
        if !t.critical && interior && stability_of(f, o)? == StabilityClass::Unstable && !t.trapped {
            return Ok(Outcome::fail(json!({ "unstable_not_trapped": strs(&o.points) })));
        }
        taxa.push(t);
    }
    exceptional_census(&taxa)?;
    Ok(if taxa.is_empty() { Outcome::skip("no continuous orbits") } else { Outcome::pass() })
}

fn expect(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Violation(what.to_string()))
    }
}

fn pinned_taxonomy(c: &Case) -> Result<Outcome> {
    let f = &c.map;
    let orbit = |x: Rational| {
        PeriodicOrbit::continuous_through(f, &x, 8).ok_or_else(|| Error::Violation(format!("{x} is not periodic")))
    };
    match c.label.as_str() {
        "tent" => {
            let o = orbit(rat(3, 5))?;
            let w = is_trapped(f, &o)?.witness.ok_or_else(|| Error::Violation("3/5 not trapped".into()))?;
            expect(w.y == rat(23, 40) && w.z == rat(5, 8), "tent witness")?;
        }
        "contraction" => {
            let t = taxonomy(f, &orbit(rat(1, 2))?)?;
            expect(t.free && t.exceptional_types == BTreeSet::from([ExceptionalType::A, ExceptionalType::B]), "contraction types")?;
        }
        "hat" => {
            let o = orbit(rat(7, 12))?;
            let t = taxonomy(f, &o)?;
            expect(t.free && t.exceptional_types.is_empty(), "hat taxonomy")?;
            let ws = basin_adjacent_special(f, &o)?;
            expect(
                ws.iter().any(|w| w.w == rat(1, 2) && w.side == BasinSide::Both && w.w_attracted),
                "hat basin witness",
            )?;
        }
        "shift" => {
            let r = is_trapped_at(f, &rat(7, 16), 2)?;
            let w = r.witness.clone().ok_or_else(|| Error::Violation("7/16 not trapped".into()))?;
            expect(r.window.eval(&w.y) == w.y && r.window.eval(&w.z) == w.z, "shift equality witnesses")?;
        }
        "decreasing_cycle" => {
            let t = taxonomy(f, &orbit(rat(1, 4))?)?;
            expect(t.exceptional_types == BTreeSet::from([ExceptionalType::C]), "type c")?;
        }
        other => return Ok(Outcome::skip(format!("no expectations for {other}"))),
    }
    Ok(Outcome::pass())
}

fn orbit_count_bound(c: &Case) -> Result<Outcome> {
    let f = &c.map;
    if f.special_points().s.is_empty() {
        return Ok(Outcome::skip("no special points"));
    }
    let r = count_bound_with(f, 8, &limits())?;
    if c.label == "hat" {
        expect(r.to_string() == "count=1 N_T=1 N_D=0 bound=3 HOLDS", "hat bound line")?;
    }
    Ok(if r.holds {
        Outcome::pass()
    } else {
        Outcome::fail(json!({ "report": r.to_string(), "orbits": r.orbits.iter().map(|o| format_set(&o.points)).collect::<Vec<_>>() }))
    })
}

/// Whether some germ of `w` returns to `w` within `cap` steps; `None` when the
/// denominators outgrow the harness limit first.
fn germ_periodic(f: &PiecewiseMap, w: &Rational, side: Option<Side>, cap: usize) -> Result<Option<bool>> {
    let sides: Vec<Side> = match side {
        Some(s) => vec![s],
        None => germs_at(f, w).into_iter().map(|g| g.side).collect(),
    };
    let bits = limits().denominator_bits;
    let mut undecided = false;
    for s in sides {
        let mut g = Germ::new(w.clone(), s);
        for _ in 0..cap {
            g = germ_step(f, &g)?.next;
            if &g.point == w {
                return Ok(Some(true));
            }
            if denominator_bits(&g.point) > bits {
                undecided = true;
                break;
            }
        }
    }
    Ok(if undecided { None } else { Some(false) })
}

fn regular_points(c: &Case) -> Result<Outcome> {
    let f = &c.map;
    let cap = 500;
    let ctx = CodeContext::new(f);
    let mut out = Outcome::pass();
    let mut any = false;
    for w in f.special_points().s.iter() {
        let reg = ctx.is_regular(w, cap)?;
        for side in &reg.sides {
            if side.verdict.is_yes() && germ_periodic(f, w, side.side, cap)? == Some(true) {
                return Ok(Outcome::fail(json!({ "regular_but_periodic": w.to_string() })));
            }
        }
        if !reg.verdict.is_yes() {
            continue;
        }
        any = true;
        let cert = theorem5_forward(f, w, cap)?;
        let n = cert.code.period.unwrap_or(1);
        let width = &cert.j_hi - &cert.j_lo;
        for k in 1..8 {
            let t = &cert.j_lo + &width * rat(k, 8);
            let codes = match ctx.code(&t, cap) {
                Ok(c) => c,
                Err(_) => continue,
            };
            if codes.iter().all(|c| c.tail == CodeTail::Truncated) {
                continue;
            }
            if !codes.contains(&cert.code) {
                return Ok(Outcome::fail(json!({ "w": w.to_string(), "sample": t.to_string(), "period": n })));
            }
        }
        out = out.tagged("forward_certified");
    }
    let pp = periodic_points(f, 4, &limits())?;
    for o in pp.continuous() {
        match theorem5_reverse(f, o, 4, cap) {
            Ok(r) if r.regular.is_no() => {
                return Ok(Outcome::fail(json!({ "orbit": strs(&o.points), "w": r.w.to_string(), "regular": "no" })));
            }
            Ok(r) if r.regular.value == Answer::Unknown => out = out.tagged("reverse_unknown"),
            Ok(_) => {
                any = true;
                out = out.tagged("reverse_regular");
            }
            Err(Error::Violation(m)) => return Err(Error::Violation(m)),
            Err(_) => {}
        }
    }
    if c.label == "hat" {
        let cert = theorem5_forward(f, &rat(1, 2), cap)?;
        expect(cert.orbit.points == vec![rat(7, 12)], "hat forward orbit")?;
        let o = PeriodicOrbit::continuous_through(f, &rat(7, 12), 1).expect("fixed point");
        let r = theorem5_reverse(f, &o, 4, cap)?;
        expect(r.w == rat(1, 2) && r.regular.is_yes(), "hat reverse")?;
    }
    Ok(if any { out } else { Outcome::skip("nothing regular") })
}

fn basin_witnesses(c: &Case) -> Result<Outcome> {
    let f = &c.map;
    if f.special_points().s.is_empty() {
        return Ok(Outcome::skip("no special points"));
    }
    let pp = periodic_points(f, 4, &limits())?;
    let mut checked = 0;
    let mut out = Outcome::pass();
    for o in pp.continuous() {
        let t = match taxonomy(f, o) {
            Ok(t) => t,
            Err(Error::Violation(m)) => return Err(Error::Violation(m)),
            Err(_) => continue,
        };
        if !t.free || !t.exceptional_types.is_empty() {
            continue;
        }
        let regions = attraction_regions(f, o);
        for w in basin_adjacent_special(f, o)? {
            for (lo, hi) in w.intervals() {
                for k in 1..=32 {
                    let y = &lo + (&hi - &lo) * rat(k, 33);
                    let v = crate::taxonomy::attracted_with(f, &y, o, &regions, 2000);
                    match v.value {
                        Answer::Yes => {}
                        Answer::No => {
                            return Ok(Outcome::fail(json!({ "w": w.w.to_string(), "sample": y.to_string() })));
                        }
                        Answer::Unknown => out = out.tagged("sample_unknown"),
                    }
                }
            }
            if w.w_attracted {
                match germ_reaches(f, &w, o, &regions, 2000)? {
                    Some(true) => {}
                    Some(false) => return Ok(Outcome::fail(json!({ "w_not_attracted": w.w.to_string() }))),
                    None => out = out.tagged("sample_unknown"),
                }
            }
            checked += 1;
        }
    }
    Ok(if checked == 0 { Outcome::skip("no free non-exceptional orbits") } else { out })
}

/// Follows the germ of `w` on the witness side until it enters an attraction region.
fn germ_reaches(
    f: &PiecewiseMap,
    w: &BasinWitness,
    o: &PeriodicOrbit,
    regions: &AttractionRegions,
    cap: usize,
) -> Result<Option<bool>> {
    let sides = match w.side {
        BasinSide::Minus => vec![Side::Minus],
        BasinSide::Plus => vec![Side::Plus],
        BasinSide::Both => vec![Side::Minus, Side::Plus],
    };
    let bits = limits().denominator_bits;
    for side in sides {
        let mut g = Germ::new(w.w.clone(), side);
        let mut reached = false;
        for _ in 0..cap {
            g = germ_step(f, &g)?.next;
            if o.points.contains(&g.point) || regions.contains(&g.point) {
                reached = true;
                break;
            }
            if denominator_bits(&g.point) > bits {
                return Ok(None);
            }
        }
        if !reached {
            return Ok(Some(false));
        }
    }
    Ok(Some(true))
}

fn code_properties(c: &Case) -> Result<Outcome> {
    let f = &c.map;
    let ctx = CodeContext::new(f);
    let s = &f.special_points().s;
    let mut out = Outcome::pass();
    for k in 1..8 {
        let x = midpoint(&rat(k, 8), &rat(k, 8 + k % 3 + 1));
        let g = ctx.in_g(&x, 300);
        match g.value {
            Answer::Yes => {
                let codes = ctx.code(&x, 300)?;
                if codes.len() != 1 {
                    return Ok(Outcome::fail(json!({ "x": x.to_string(), "codes": codes.len() })));
                }
            }
            Answer::No => {
                let mut cur = x.clone();
                let mut m = 0;
                while !s.contains(&cur) {
                    cur = match f.eval(&cur)? {
                        Some(y) => y,
                        None => break,
                    };
                    m += 1;
                }
                if !skeleton(f, m + 1).contains(&x) {
                    return Ok(Outcome::fail(json!({ "x": x.to_string(), "outside_skeleton_depth": m + 1 })));
                }
                out = out.tagged("not_good");
            }
            Answer::Unknown => out = out.tagged("unknown"),
        }
    }
    Ok(out)
}
