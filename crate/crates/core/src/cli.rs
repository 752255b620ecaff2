//! Command-line front end. Exit code 0 on success, 1 when the mathematics
//! answers no (a bound or theorem check fails), 2 on usage or input errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::codes::{theorem5_forward, theorem5_reverse, CodeContext, ForwardCertificate, ReverseCertificate, Trivalent};
use crate::error::{Error, Result};
use crate::harness::{replay, run_suite, Bundle, GeneratorConfig, Status, SuiteConfig, PROPERTY_NAMES};
use crate::map::{parse_map, Limits, PiecewiseMap, Side};
use crate::orbit::{orbit_with, periodic_points, structure_with, OrbitTail, PeriodicOrbit, TruncationReason, VariantSelector};
use crate::plot::{emit_plot, PlotMode};
use crate::rational::{format_set, parse_rational, Rational};
use crate::stability::{check_theorem1, classify_point_detail, connection, Verdict};
use crate::taxonomy::{basin_adjacent_special, count_bound, taxonomy, OrbitTaxonomy};

#[derive(Parser, Debug)]
#[command(name = "pwdyn", version, about = "Exact dynamics of piecewise affine interval maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Power for iterate, step count for orbit and plot.
    #[arg(short = 'n', global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    horizon: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Step cap for trivalent questions.
    #[arg(long, global = true)]
    cap: Option<usize>,
    #[arg(long, global = true, value_enum)]
    side: Option<SideArg>,
    /// Variant choice as bits over the discontinuities in increasing order, 0 = minus.
    #[arg(long, global = true)]
    selector: Option<String>,
    /// Print only the resulting map, in map file format.
    #[arg(long, global = true)]
    emit_map: bool,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[arg(long, global = true, value_parser = rational_arg)]
    x: Option<Rational>,
    #[arg(long, global = true, value_parser = rational_arg)]
    x0: Option<Rational>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate a map file.
    Validate { map: PathBuf },
    /// Value at --x, or the one-sided limit with --side.
    Eval { map: PathBuf },
    /// Turning points and discontinuities.
    Special { map: PathBuf },
    /// The composition f(g(x)).
    Compose { f: PathBuf, g: PathBuf },
    /// The n-th iterate.
    Iterate { map: PathBuf },
    /// Orbit of --x under one variant.
    Orbit { map: PathBuf },
    /// Branching structure of --x over all variants.
    Structure { map: PathBuf },
    /// Periodic orbits up to --horizon.
    Periodic { map: PathBuf },
    /// Stability of the confined point --x.
    Classify { map: PathBuf },
    /// Connections between the nodes of the structure of --x.
    Connections { map: PathBuf },
    /// Critical, trapped, free and exceptional flags of continuous periodic orbits.
    Taxonomy { map: PathBuf },
    /// Special points adjacent to the basin of the orbit through --x.
    Basin { map: PathBuf },
    /// Count of stable non-trapped orbits against N_T + 2 N_D + 2.
    Bound { map: PathBuf },
    /// Itinerary codes of --x.
    Code { map: PathBuf },
    /// Regularity of special points.
    Regular { map: PathBuf },
    /// Certifies attracting orbits from regular points and back.
    Theorem5 { map: PathBuf },
    /// Runs the property suite.
    Suite {
        /// Properties to run; all when empty.
        names: Vec<String>,
        /// Multiplies every corpus size.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        no_shrink: bool,
        /// Re-runs a counterexample bundle instead of a corpus.
        #[arg(long)]
        replay: Option<PathBuf>,
        #[arg(long)]
        list: bool,
    },
    /// Graph or cobweb plot as CSV or SVG.
    Plot {
        map: PathBuf,
        #[arg(long, value_enum, default_value = "graph")]
        mode: ModeArg,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SideArg {
    Minus,
    Plus,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Minus => Side::Minus,
            SideArg::Plus => Side::Plus,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Csv,
    Svg,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModeArg {
    Graph,
    Cobweb,
}

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("not a rational: {s}"))
}

/// What a command produced: text, JSON, and whether the answer was negative.
struct Report {
    text: String,
    json: Value,
    negative: bool,
}

impl Report {
    fn new(text: impl Into<String>, json: Value) -> Self {
        Report { text: text.into(), json, negative: false }
    }

    fn negative(mut self, negative: bool) -> Self {
        self.negative = negative;
        self
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I: IntoIterator<Item = OsString>>(args: I) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(r) => {
            let out = match cli.format {
                Format::Json => serde_json::to_string_pretty(&r.json).expect("json") + "\n",
                _ => r.text,
            };
            print!("{out}");
            if r.negative {
                1
            } else {
                0
            }
        }
        Err(Error::Violation(msg)) => {
            eprintln!("counterexample: {msg}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn load(path: &Path) -> Result<PiecewiseMap> {
    let text = fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    parse_map(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))
}

fn need<'a>(v: &'a Option<Rational>, flag: &str) -> Result<&'a Rational> {
    v.as_ref().ok_or_else(|| Error::Invalid(format!("this command needs {flag}")))
}

fn selector(cli: &Cli, f: &PiecewiseMap) -> Result<VariantSelector> {
    match (&cli.selector, cli.side) {
        (Some(bits), _) => VariantSelector::from_bits(f, bits),
        (None, Some(side)) => Ok(VariantSelector::uniform(f, side.into())),
        (None, None) => Ok(VariantSelector::default()),
    }
}

fn strs(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

fn set_json<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> Value {
    Value::from(xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>())
}

fn trivalent_json(t: &Trivalent) -> Value {
    serde_json::to_value(t).expect("trivalent json")
}

fn map_report(f: &PiecewiseMap, emit: bool) -> Report {
    let sp = f.special_points();
    let mut text = f.to_text();
    if !emit {
        text.push_str(&format!("# S = {}\n", format_set(&sp.s)));
    }
    Report::new(text, json!({ "map": f.to_text(), "S": set_json(&sp.s), "T": set_json(&sp.t), "D": set_json(&sp.d) }))
}

fn dispatch(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Validate { map } => {
            let f = load(map)?;
            Ok(Report::new(
                format!("ok: {} pieces on [{}, {}]\n", f.pieces().len(), f.a(), f.b()),
                json!({ "valid": true, "pieces": f.pieces().len(), "a": f.a().to_string(), "b": f.b().to_string() }),
            ))
        }
        Command::Eval { map } => {
            let f = load(map)?;
            let x = need(&cli.x, "--x")?;
            let value = match cli.side {
                Some(side) => Some(f.lateral_limit(x, side.into())?),
                None => f.eval(x)?,
            };
            let text = match &value {
                Some(v) => format!("{v}\n"),
                None => format!(
                    "undefined: f({x}-) = {}, f({x}+) = {}\n",
                    f.lateral_limit(x, Side::Minus)?,
                    f.lateral_limit(x, Side::Plus)?
                ),
            };
            Ok(Report::new(text, json!({ "x": x.to_string(), "value": value.map(|v| v.to_string()) })))
        }
        Command::Special { map } => {
            let f = load(map)?;
            let sp = f.special_points();
            Ok(Report::new(
                format!("S = {}\nT = {}\nD = {}\n", format_set(&sp.s), format_set(&sp.t), format_set(&sp.d)),
                json!({ "S": set_json(&sp.s), "T": set_json(&sp.t), "D": set_json(&sp.d) }),
            ))
        }
        Command::Compose { f, g } => {
            let (f, g) = (load(f)?, load(g)?);
            Ok(map_report(&f.compose(&g)?, cli.emit_map))
        }
        Command::Iterate { map } => {
            let f = load(map)?;
            let n = cli.n.ok_or_else(|| Error::Invalid("this command needs -n".into()))?;
            Ok(map_report(&f.iterate(n)?, cli.emit_map))
        }
        Command::Orbit { map } => orbit_cmd(cli, &load(map)?),
        Command::Structure { map } => structure_cmd(cli, &load(map)?),
        Command::Periodic { map } => periodic_cmd(cli, &load(map)?),
        Command::Classify { map } => classify_cmd(cli, &load(map)?),
        Command::Connections { map } => connections_cmd(cli, &load(map)?),
        Command::Taxonomy { map } => taxonomy_cmd(cli, &load(map)?),
        Command::Basin { map } => basin_cmd(cli, &load(map)?),
        Command::Bound { map } => {
            let f = load(map)?;
            let r = count_bound(&f, cli.horizon.unwrap_or(8))?;
            let orbits: Vec<Value> = r.orbits.iter().map(|o| set_json(&o.points)).collect();
            Ok(Report::new(
                format!("{r}\n"),
                json!({
                    "count": r.count_found, "horizon": r.horizon, "N_T": r.n_t, "N_D": r.n_d,
                    "bound": r.bound, "holds": r.holds, "orbits": orbits,
                }),
            )
            .negative(!r.holds))
        }
        Command::Code { map } => code_cmd(cli, &load(map)?),
        Command::Regular { map } => regular_cmd(cli, &load(map)?),
        Command::Theorem5 { map } => theorem5_cmd(cli, &load(map)?),
        Command::Suite { names, scale, no_shrink, replay: bundle, list } => {
            if *list {
                let text = PROPERTY_NAMES.join("\n") + "\n";
                return Ok(Report::new(text, json!(PROPERTY_NAMES)));
            }
            if let Some(path) = bundle {
                return replay_cmd(path);
            }
            let cfg = SuiteConfig {
                generator: GeneratorConfig {
                    seed: cli.seed.unwrap_or(GeneratorConfig::default().seed),
                    ..GeneratorConfig::default()
                },
                scale: *scale,
                shrink: !no_shrink,
            };
            let which: Vec<&str> = names.iter().map(String::as_str).collect();
            let r = run_suite(&cfg, &which)?;
            let json: Value = serde_json::from_str(&r.to_json(true)).expect("report json");
            let mut text = r.summary();
            for p in &r.properties {
                for b in &p.counterexamples {
                    text.push_str(&format!("counterexample {}\n", serde_json::to_string(b).expect("bundle json")));
                }
            }
            Ok(Report::new(text, json).negative(!r.ok()))
        }
        Command::Plot { map, mode } => {
            let f = load(map)?;
            let mode = match mode {
                ModeArg::Graph => PlotMode::Graph,
                ModeArg::Cobweb => PlotMode::Cobweb,
            };
            let doc = emit_plot(&f, mode, cli.x0.as_ref(), cli.n.unwrap_or(20), &selector(cli, &f)?)?;
            let text = match cli.format {
                Format::Svg => doc.to_svg(),
                Format::Csv | Format::Text => doc.to_csv(),
                Format::Json => return Err(Error::Invalid("plot writes csv or svg".into())),
            };
            Ok(Report::new(text, Value::Null))
        }
    }
}

fn orbit_cmd(cli: &Cli, f: &PiecewiseMap) -> Result<Report> {
    let x = need(&cli.x, "--x")?;
    let sel = selector(cli, f)?;
    let r = orbit_with(f, x, &sel, cli.n.unwrap_or(10_000), &Limits::default())?;
    let mut text = format!("prefix: [{}]\n", strs(&r.prefix).join(", "));
    let tail = match &r.tail {
        OrbitTail::Cycle(c) => {
            text.push_str(&format!("cycle: [{}] period {}\n", strs(c).join(", "), c.len()));
            json!({ "cycle": strs(c) })
        }
        OrbitTail::Truncated(t) => {
            let why = match t.reason {
                TruncationReason::Steps => "steps",
                TruncationReason::DenominatorBits => "denominator_bits",
            };
            text.push_str(&format!("truncated: {why} cap {}\n", t.cap));
            json!({ "truncated": why, "cap": t.cap })
        }
    };
    Ok(Report::new(text, json!({ "x": x.to_string(), "selector": sel.to_bits(), "prefix": strs(&r.prefix), "tail": tail })))
}

fn structure_cmd(cli: &Cli, f: &PiecewiseMap) -> Result<Report> {
    let x = need(&cli.x, "--x")?;
    let s = structure_with(f, x, &Limits::default())?;
    let mut text = format!(
        "root {}\nnodes {}\nhalf_points {}\nclosed {}\n",
        s.root,
        format_set(&s.nodes),
        format_set(&s.half_points),
        s.closed
    );
    let mut edges = Vec::new();
    for e in &s.edges {
        let via = e.branch.side().map_or(String::new(), |side| side.sign().to_string());
        text.push_str(&format!("{}{via} -> {}\n", e.from, e.to));
        edges.push(json!({ "from": e.from.to_string(), "side": e.branch.side().map(|s| s.name()), "to": e.to.to_string() }));
    }
    Ok(Report::new(
        text,
        json!({
            "root": s.root.to_string(), "nodes": set_json(&s.nodes), "half_points": set_json(&s.half_points),
            "closed": s.closed, "truncated": s.truncated, "edges": edges,
        }),
    ))
}

fn orbit_line(o: &PeriodicOrbit) -> String {
    let kind = if o.continuous { "continuous" } else { "through discontinuity" };
    format!("period {}: {} selector '{}' {kind}", o.period, format_set(&o.points), o.selector.to_bits())
}

fn orbit_json(o: &PeriodicOrbit) -> Value {
    json!({ "points": strs(&o.points), "period": o.period, "selector": o.selector.to_bits(), "continuous": o.continuous })
}

fn periodic_cmd(cli: &Cli, f: &PiecewiseMap) -> Result<Report> {
    let pp = periodic_points(f, cli.horizon.unwrap_or(4), &Limits::default())?;
    let mut text = String::new();
    for o in &pp.orbits {
        text.push_str(&orbit_line(o));
        text.push('\n');
    }
    let mut fams = Vec::new();
    for fam in &pp.families {
        let (l, r) = (if fam.lo_closed { '[' } else { '(' }, if fam.hi_closed { ']' } else { ')' });
        text.push_str(&format!("family period {}: {l}{}, {}{r}\n", fam.period, fam.lo, fam.hi));
        fams.push(json!({ "period": fam.period, "lo": fam.lo.to_string(), "hi": fam.hi.to_string(),
            "lo_closed": fam.lo_closed, "hi_closed": fam.hi_closed }));
    }
    if text.is_empty() {
        text.push_str("none\n");
    }
    let orbits: Vec<Value> = pp.orbits.iter().map(orbit_json).collect();
    Ok(Report::new(text, json!({ "orbits": orbits, "families": fams })))
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Contracting => "contracting",
        Verdict::Neutral => "neutral",
        Verdict::Expanding => "expanding",
    }
}

fn classify_cmd(cli: &Cli, f: &PiecewiseMap) -> Result<Report> {
    let x = need(&cli.x, "--x")?;
    let p = classify_point_detail(f, x)?;
    let mut text = format!("{x}: {}\n", p.class);
    let mut sides = Vec::new();
    for s in &p.sides {
        text.push_str(&format!("  {} side: {} (product {})\n", s.side.name(), verdict_name(s.verdict), s.cycle_product));
        sides.push(json!({ "side": s.side.name(), "verdict": verdict_name(s.verdict), "product": s.cycle_product.to_string() }));
    }
    Ok(Report::new(text, json!({ "x": x.to_string(), "class": p.class.name(), "sides": sides })))
}

fn connections_cmd(cli: &Cli, f: &PiecewiseMap) -> Result<Report> {
    let x = need(&cli.x, "--x")?;
    let s = structure_with(f, x, &Limits::default())?;
    if !s.closed {
        return Err(Error::NotConfined(x.clone()));
    }
    let mut text = String::new();
    let mut pairs = Vec::new();
    for y in &s.nodes {
        for z in &s.nodes {
            let mut levels = Vec::new();
            for level in 1..=4u8 {
                if connection(f, &s, y, z, level)?.is_some() {
                    levels.push(level);
                }
            }
            let shown: Vec<String> = levels.iter().map(|l| l.to_string()).collect();
            let shown = if shown.is_empty() { "none".to_string() } else { shown.join(",") };
            text.push_str(&format!("{y} ~ {z}: {shown}\n"));
            pairs.push(json!({ "from": y.to_string(), "to": z.to_string(), "levels": levels }));
        }
    }
    let r = check_theorem1(f, &s)?;
    text.push_str(&format!(
        "implications checked {} over {} pairs, violations {}\n",
        r.implications_checked,
        r.pairs,
        r.violations.len()
    ));
    for v in &r.violations {
        text.push_str(&v.bundle(f));
    }
    let violations: Vec<Value> = r.violations.iter().map(|v| json!({ "clause": v.clause, "witness": v.witness })).collect();
    Ok(Report::new(text, json!({ "pairs": pairs, "implications_checked": r.implications_checked, "violations": violations }))
        .negative(!r.violations.is_empty()))
}

fn orbits_for(cli: &Cli, f: &PiecewiseMap) -> Result<Vec<PeriodicOrbit>> {
    let horizon = cli.horizon.unwrap_or(8);
    match &cli.x {
        Some(x) => PeriodicOrbit::continuous_through(f, x, horizon)
            .map(|o| vec![o])
            .ok_or_else(|| Error::Precondition(format!("{x} is not a continuous periodic point of period <= {horizon}"))),
        None => Ok(periodic_points(f, horizon, &Limits::default())?.continuous().cloned().collect()),
    }
}

fn taxonomy_json(t: &OrbitTaxonomy) -> Value {
    json!({
        "orbit": strs(&t.orbit.points), "critical": t.critical, "trapped": t.trapped, "free": t.free,
        "exceptional_types": t.exceptional_types, "boundary_case": t.boundary_case,
    })
}

fn taxonomy_cmd(cli: &Cli, f: &PiecewiseMap) -> Result<Report> {
    let mut text = String::new();
    let mut out = Vec::new();
    for o in orbits_for(cli, f)? {
        let t = taxonomy(f, &o)?;
        let types: Vec<&str> = t.exceptional_types.iter().map(|e| e.name()).collect();
        text.push_str(&format!(
            "{}: critical={} trapped={} free={} exceptional={{{}}} boundary={}\n",
            format_set(&o.points),
            t.critical,
            t.trapped,
            t.free,
            types.join(","),
            serde_json::to_value(t.boundary_case).expect("boundary json").as_str().unwrap_or("")
        ));
        out.push(taxonomy_json(&t));
    }
    if out.is_empty() {
        text.push_str("no continuous periodic orbits\n");
    }
    Ok(Report::new(text, Value::from(out)))
}

fn basin_cmd(cli: &Cli, f: &PiecewiseMap) -> Result<Report> {
    let mut text = String::new();
    let mut out = Vec::new();
    for o in orbits_for(cli, f)? {
        let ws = match basin_adjacent_special(f, &o) {
            Ok(ws) => ws,
            Err(Error::Precondition(why)) if cli.x.is_none() => {
                text.push_str(&format!("{}: skipped, {why}\n", format_set(&o.points)));
                continue;
            }
            Err(e) => return Err(e),
        };
        for w in &ws {
            text.push_str(&format!(
                "{}: w={} side={} delta={} w_attracted={}\n",
                format_set(&o.points),
                w.w,
                w.side.name(),
                w.delta,
                w.w_attracted
            ));
            out.push(json!({ "orbit": strs(&o.points), "w": w.w.to_string(), "side": w.side.name(),
                "delta": w.delta.to_string(), "w_attracted": w.w_attracted }));
        }
    }
    if out.is_empty() && text.is_empty() {
        text.push_str("no witnesses\n");
    }
    Ok(Report::new(text, Value::from(out)))
}

fn code_cmd(cli: &Cli, f: &PiecewiseMap) -> Result<Report> {
    let x = need(&cli.x, "--x")?;
    let cap = cli.cap.unwrap_or(1000);
    let ctx = CodeContext::new(f);
    let codes = ctx.code(x, cap)?;
    let good = ctx.in_g(x, cap);
    let mut text = String::new();
    for c in &codes {
        text.push_str(&format!("{c}\n"));
    }
    text.push_str(&format!("in G: {good}\n"));
    let shown: Vec<String> = codes.iter().map(|c| c.to_string()).collect();
    Ok(Report::new(text, json!({ "x": x.to_string(), "codes": shown, "in_G": trivalent_json(&good) })))
}

fn regular_cmd(cli: &Cli, f: &PiecewiseMap) -> Result<Report> {
    let cap = cli.cap.unwrap_or(1000);
    let ctx = CodeContext::new(f);
    let points: Vec<Rational> = match &cli.x {
        Some(w) => vec![w.clone()],
        None => f.special_points().s.iter().cloned().collect(),
    };
    let mut text = String::new();
    let mut out = Vec::new();
    for w in &points {
        let r = ctx.is_regular(w, cap)?;
        text.push_str(&format!("{w}: {}\n", r.verdict));
        let mut sides = Vec::new();
        for s in &r.sides {
            let label = s.side.map_or("point", |s| s.name());
            let codes: Vec<String> = s.codes.iter().map(|c| c.to_string()).collect();
            text.push_str(&format!("  {label}: {} codes {}\n", s.verdict, codes.join(" | ")));
            sides.push(json!({ "side": label, "verdict": trivalent_json(&s.verdict), "codes": codes }));
        }
        out.push(json!({ "w": w.to_string(), "verdict": trivalent_json(&r.verdict), "sides": sides }));
    }
    if points.is_empty() {
        text.push_str("no special points\n");
    }
    Ok(Report::new(text, Value::from(out)))
}

fn forward_text(c: &ForwardCertificate) -> (String, Value) {
    let side = c.side.map_or("point", |s| s.name());
    let text = format!(
        "forward w={} side={side} code {} J=[{}, {}] orbit {} class {} trapped {} attracted {}\n",
        c.w,
        c.code,
        c.j_lo,
        c.j_hi,
        format_set(&c.orbit.points),
        c.class,
        c.trapped,
        c.w_attracted
    );
    let json = json!({
        "w": c.w.to_string(), "side": side, "code": c.code.to_string(), "J": [c.j_lo.to_string(), c.j_hi.to_string()],
        "orbit": strs(&c.orbit.points), "class": c.class.name(), "trapped": c.trapped,
        "w_attracted": trivalent_json(&c.w_attracted),
    });
    (text, json)
}

fn reverse_text(o: &PeriodicOrbit, c: &ReverseCertificate) -> (String, Value) {
    let text = format!(
        "reverse orbit {} w={} side={} regular {} attracted {}\n",
        format_set(&o.points),
        c.w,
        c.side.name(),
        c.regular,
        c.attracted
    );
    let json = json!({
        "orbit": strs(&o.points), "w": c.w.to_string(), "side": c.side.name(),
        "regular": trivalent_json(&c.regular), "attracted": trivalent_json(&c.attracted),
    });
    (text, json)
}

fn theorem5_cmd(cli: &Cli, f: &PiecewiseMap) -> Result<Report> {
    let cap = cli.cap.unwrap_or(1000);
    let horizon = cli.horizon.unwrap_or(4);
    let s = &f.special_points().s;
    let mut text = String::new();
    let mut forward = Vec::new();
    let mut reverse = Vec::new();
    let mut negative = false;
    let forward_points: Vec<Rational> = match &cli.x {
        Some(x) if s.contains(x) => vec![x.clone()],
        Some(_) => Vec::new(),
        None => s.iter().cloned().collect(),
    };
    let ctx = CodeContext::new(f);
    for w in &forward_points {
        if cli.x.is_none() && !ctx.is_regular(w, cap)?.verdict.is_yes() {
            continue;
        }
        let (t, j) = forward_text(&theorem5_forward(f, w, cap)?);
        text.push_str(&t);
        forward.push(j);
    }
    let orbits: Vec<PeriodicOrbit> = match &cli.x {
        Some(x) if s.contains(x) => Vec::new(),
        Some(x) => vec![PeriodicOrbit::continuous_through(f, x, horizon)
            .ok_or_else(|| Error::Precondition(format!("{x} is neither special nor continuous periodic")))?],
        None => periodic_points(f, horizon, &Limits::default())?.continuous().cloned().collect(),
    };
    for o in &orbits {
        match theorem5_reverse(f, o, horizon, cap) {
            Ok(c) => {
                negative |= c.regular.is_no();
                let (t, j) = reverse_text(o, &c);
                text.push_str(&t);
                reverse.push(j);
            }
            Err(Error::Precondition(why)) if cli.x.is_none() => {
                text.push_str(&format!("reverse orbit {} skipped: {why}\n", format_set(&o.points)));
            }
            Err(e) => return Err(e),
        }
    }
    if text.is_empty() {
        text.push_str("nothing to certify\n");
    }
    Ok(Report::new(text, json!({ "forward": forward, "reverse": reverse })).negative(negative))
}

fn replay_cmd(path: &Path) -> Result<Report> {
    let text = fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    let bundle: Bundle =
        serde_json::from_str(&text).map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
    let o = replay(&bundle)?;
    let (line, negative, trace) = match &o.status {
        Status::Pass => ("pass".to_string(), false, Value::Null),
        Status::Fail(t) => (format!("fail {t}"), true, t.clone()),
        Status::Skip(why) => (format!("skip {why}"), false, Value::Null),
    };
    Ok(Report::new(format!("{} {}: {line}\n", bundle.property, bundle.case), json!({ "status": line, "trace": trace }))
        .negative(negative))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_global_flags_after_the_subcommand() {
        let cli = Cli::try_parse_from(["pwdyn", "iterate", "m.map", "-n", "2", "--emit-map"]).unwrap();
        assert_eq!(cli.n, Some(2));
        assert!(cli.emit_map);
        let cli = Cli::try_parse_from(["pwdyn", "eval", "m.map", "--x", "3/8", "--side", "minus"]).unwrap();
        assert_eq!(cli.x, parse_rational("3/8"));
        assert_eq!(cli.side, Some(SideArg::Minus));
        assert!(Cli::try_parse_from(["pwdyn", "eval", "m.map", "--x", "three"]).is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["pwdyn", "frobnicate"].map(OsString::from)), 2);
        assert_eq!(run(["pwdyn", "special", "/nonexistent.map"].map(OsString::from)), 2);
    }
}
