//! End-to-end acceptance run: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use pwdyn::codes::{is_regular, theorem5_forward, theorem5_reverse};
use pwdyn::harness::{pinned, run_suite, GeneratorConfig, SuiteConfig};
use pwdyn::map::parse_map;
use pwdyn::orbit::{structure_with, PeriodicOrbit};
use pwdyn::rational::parse_rational;
use pwdyn::stability::{check_corollaries, classify_point, connection, StabilityClass};
use pwdyn::taxonomy::{basin_adjacent_special, is_trapped, is_trapped_at, taxonomy, BasinSide, ExceptionalType};
use pwdyn::{Limits, Rational};

type Check = Result<(), String>;
type Criterion = (&'static str, u64, Box<dyn Fn() -> Check>);

fn r(s: &str) -> Rational {
    parse_rational(s).expect("rational literal")
}

fn set(xs: &[&str]) -> BTreeSet<Rational> {
    xs.iter().map(|x| r(x)).collect()
}

fn ensure(ok: bool, what: impl Into<String>) -> Check {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn suite(names: &[&str]) -> Check {
    let report = run_suite(&SuiteConfig::default(), names).map_err(err)?;
    let mut problems = Vec::new();
    for p in &report.properties {
        if !p.ok() {
            let first = p.counterexamples.first().map(|b| serde_json::to_string(b).unwrap_or_default());
            problems.push(format!("{} fail={} first={}", p.name, p.fail, first.unwrap_or_default()));
        }
    }
    ensure(problems.is_empty(), problems.join("; "))
}

fn shift_square() -> Check {
    let f = parse_map("interval 0 1\npiece 0 1/2 : 1 1/8\npiece 1/2 1 : 1 -1/8\n").map_err(err)?;
    let f2 = f.iterate(2).map_err(err)?;
    let got: Vec<[Rational; 4]> = f2
        .pieces()
        .iter()
        .map(|p| [p.left.clone(), p.right.clone(), p.slope.clone(), p.intercept.clone()])
        .collect();
    let want = vec![
        [r("0"), r("3/8"), r("1"), r("1/4")],
        [r("3/8"), r("5/8"), r("1"), r("0")],
        [r("5/8"), r("1"), r("1"), r("-1/4")],
    ];
    ensure(got == want, format!("f^2 pieces {got:?}"))?;
    let s2 = f2.special_points().s.clone();
    ensure(s2 == set(&["3/8", "5/8"]), format!("S(f^2) = {s2:?}"))?;
    let m = f.m_set(2).map_err(err)?;
    ensure(m == set(&["3/8", "1/2", "5/8"]), format!("M(2) = {m:?}"))?;
    ensure(!f.special_points().s.is_subset(&s2), "S(f) is contained in S(f^2)")
}

fn corollary_pinned() -> Check {
    let f = pinned("shift");
    let s = structure_with(&f, &r("1/2"), &Limits::default()).map_err(err)?;
    let rep = check_corollaries(&f, &s).map_err(err)?;
    let h = rep.half_cycles.as_ref().ok_or("no half-point cycles")?;
    let plus: BTreeSet<Rational> = h.plus_cycle.iter().cloned().collect();
    let minus: BTreeSet<Rational> = h.minus_cycle.iter().cloned().collect();
    ensure(plus == set(&["1/2", "3/8"]) && h.plus_cycle.len() == 2, format!("[w+] = {plus:?}"))?;
    ensure(minus == set(&["1/2", "5/8"]) && h.minus_cycle.len() == 2, format!("[w-] = {minus:?}"))?;
    ensure(!plus.is_disjoint(&minus) && plus != minus, "cycles not intersecting-yet-distinct")?;
    for x in &s.nodes {
        ensure(classify_point(&f, x).map_err(err)? == StabilityClass::Unstable, format!("{x} is not unstable"))?;
    }
    ensure(rep.violations.is_empty(), format!("{} corollary violations", rep.violations.len()))
}

fn disconnected_witness() -> Check {
    let f = pinned("disconnected_cycle");
    let s = structure_with(&f, &r("1/2"), &Limits::default()).map_err(err)?;
    let (y, z) = (r("1/2"), r("1/4"));
    ensure(s.nodes.contains(&y) && s.nodes.contains(&z), "1/2 and 1/4 not in one structure")?;
    for level in 1..=4 {
        ensure(connection(&f, &s, &y, &z, level).map_err(err)?.is_none(), format!("1/2 ~{level} 1/4"))?;
    }
    Ok(())
}

fn orbit(f: &pwdyn::PiecewiseMap, x: &str) -> Result<PeriodicOrbit, String> {
    PeriodicOrbit::continuous_through(f, &r(x), 8).ok_or_else(|| format!("{x} is not continuous periodic"))
}

fn pinned_taxonomy() -> Check {
    let tent = pinned("tent");
    let w = is_trapped(&tent, &orbit(&tent, "3/5")?).map_err(err)?.witness.ok_or("tent 3/5 not trapped")?;
    ensure(w.y == r("23/40") && w.z == r("5/8"), format!("tent witness y={} z={}", w.y, w.z))?;

    let c = pinned("contraction");
    let t = taxonomy(&c, &orbit(&c, "1/2")?).map_err(err)?;
    ensure(t.free && !t.trapped, "contraction {1/2} not free")?;
    ensure(t.exceptional_types == BTreeSet::from([ExceptionalType::A, ExceptionalType::B]), "contraction types")?;

    let hat = pinned("hat");
    let o = orbit(&hat, "7/12")?;
    let t = taxonomy(&hat, &o).map_err(err)?;
    ensure(t.free && t.exceptional_types.is_empty(), "hat {7/12} not free and non-exceptional")?;
    let ws = basin_adjacent_special(&hat, &o).map_err(err)?;
    ensure(
        ws.iter().any(|w| w.w == r("1/2") && w.side == BasinSide::Both && w.w_attracted),
        "hat basin witness w=1/2 side=both attracted",
    )?;

    let shift = pinned("shift");
    let tr = is_trapped_at(&shift, &r("7/16"), 2).map_err(err)?;
    let w = tr.witness.clone().ok_or("shift family not trapped")?;
    ensure(
        tr.trapped && tr.window.eval(&w.y) == w.y && tr.window.eval(&w.z) == w.z,
        "shift trapped without equality witnesses",
    )
}

fn theorem5_hat() -> Check {
    let start = Instant::now();
    let hat = pinned("hat");
    let half = r("1/2");
    ensure(is_regular(&hat, &half, 1000).map_err(err)?.verdict.is_yes(), "1/2 is not regular")?;
    let fw = theorem5_forward(&hat, &half, 1000).map_err(err)?;
    ensure(fw.orbit.points == vec![r("7/12")], format!("forward orbit {:?}", fw.orbit.points))?;
    ensure(fw.class == StabilityClass::Stable && !fw.trapped, "forward orbit not stable and free")?;
    ensure(fw.w_attracted.is_yes(), "w not attracted")?;
    let rv = theorem5_reverse(&hat, &orbit(&hat, "7/12")?, 4, 1000).map_err(err)?;
    ensure(rv.w == half && rv.regular.is_yes(), format!("reverse w={} regular={}", rv.w, rv.regular))?;
    ensure(start.elapsed() < Duration::from_secs(5), "pinned hat checks over 5s")?;
    suite(&["regular_points"])
}

fn determinism() -> Check {
    let names = ["preimage_exact", "composition_sandwich", "oracle_agreement", "orbit_count_bound", "pinned_taxonomy"];
    let cfg = |seed| SuiteConfig {
        generator: GeneratorConfig { seed, ..GeneratorConfig::default() },
        scale: 0.2,
        shrink: true,
    };
    let a = run_suite(&cfg(11), &names).map_err(err)?.to_json(false);
    let b = run_suite(&cfg(11), &names).map_err(err)?.to_json(false);
    ensure(a == b, "reports differ under the same seed")?;
    let c = run_suite(&cfg(12), &names).map_err(err)?.to_json(false);
    ensure(a != c, "seed has no effect")
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("shift map square and special sets", 1, Box::new(shift_square)),
        ("preimages are finite and exact", 30, Box::new(|| suite(&["preimage_exact"]))),
        ("composition sandwich with a strict gap", 60, Box::new(|| suite(&["composition_sandwich"]))),
        ("special points of powers", 120, Box::new(|| suite(&["power_special_inclusion"]))),
        ("germ verdicts match the interval oracle", 120, Box::new(|| suite(&["oracle_agreement"]))),
        (
            "connection implications and a disconnected pair",
            120,
            Box::new(|| disconnected_witness().and_then(|_| suite(&["connection_implications"]))),
        ),
        ("half-point cycles of the shift map", 1, Box::new(corollary_pinned)),
        ("endpoint, trapped and free structure of orbits", 180, Box::new(|| suite(&["orbit_taxonomy"]))),
        ("pinned taxonomy values", 5, Box::new(|| pinned_taxonomy().and_then(|_| suite(&["pinned_taxonomy"])))),
        ("stable orbit count bound", 300, Box::new(|| suite(&["orbit_count_bound"]))),
        ("regular points and attracting orbits", 60, Box::new(theorem5_hat)),
        ("same seed gives the same report", 300, Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let result = result.and_then(|_| {
            ensure(took <= Duration::from_secs(*budget), format!("took {:.2}s, budget {budget}s", took.as_secs_f64()))
        });
        match result {
            Ok(()) => println!("PASS criterion {:>2}: {name} ({:.2}s)", i + 1, took.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name} ({:.2}s): {why}", i + 1, took.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
