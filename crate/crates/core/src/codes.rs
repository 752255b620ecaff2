//! Itineraries over the special-point partition, the good set, regular
//! special points, and both directions of the regular-point correspondence.

use std::cell::OnceCell;
use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::map::{AffinePiece, PiecewiseMap, Side};
use crate::orbit::{germ_step, periodic_points, Germ, PeriodicOrbit};
use crate::rational::{denominator_bits, format_set, Rational};
use crate::stability::{classify_point, StabilityClass};
use crate::taxonomy::{
    attracted, attraction_regions, closed_fixed_points, compose_local, monotone_window, strict_everywhere, taxonomy,
    AttractionRegions,
};
use crate::Limits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

/// A decision that may stop at a computation cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Trivalent {
    pub value: Answer,
    pub cap_used: Option<u64>,
}

impl Trivalent {
    pub const YES: Trivalent = Trivalent { value: Answer::Yes, cap_used: None };
    pub const NO: Trivalent = Trivalent { value: Answer::No, cap_used: None };

    pub fn unknown(cap: u64) -> Self {
        Trivalent { value: Answer::Unknown, cap_used: Some(cap) }
    }

    pub fn is_yes(&self) -> bool {
        self.value == Answer::Yes
    }

    pub fn is_no(&self) -> bool {
        self.value == Answer::No
    }
}

impl fmt::Display for Trivalent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.value, self.cap_used) {
            (Answer::Yes, _) => f.write_str("yes"),
            (Answer::No, _) => f.write_str("no"),
            (Answer::Unknown, Some(c)) => write!(f, "unknown (cap {c})"),
            (Answer::Unknown, None) => f.write_str("unknown"),
        }
    }
}

/// The cuts `a = w_0 < ... < w_{N+1} = b` built from the special points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionIntervals {
    pub cuts: Vec<Rational>,
}

impl PartitionIntervals {
    pub fn new(f: &PiecewiseMap) -> Self {
        let mut cuts = vec![f.a().clone()];
        cuts.extend(f.special_points().s.iter().cloned());
        cuts.push(f.b().clone());
        PartitionIntervals { cuts }
    }

    pub fn len(&self) -> usize {
        self.cuts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn interval(&self, k: usize) -> (&Rational, &Rational) {
        (&self.cuts[k], &self.cuts[k + 1])
    }

    /// Indices of the intervals containing `x`: two at an interior cut.
    pub fn indices(&self, x: &Rational) -> Vec<usize> {
        let n = self.len();
        match self.cuts.binary_search(x) {
            Ok(0) => vec![0],
            Ok(k) if k == n => vec![n - 1],
            Ok(k) => vec![k - 1, k],
            Err(k) => vec![k - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CodeTail {
    Cycle(Vec<usize>),
    Truncated,
}

/// An itinerary through the partition intervals, stored as prefix and repeating cycle.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Code {
    pub prefix: Vec<usize>,
    pub tail: CodeTail,
    pub strictly_periodic: bool,
    pub period: Option<usize>,
}

fn minimal_word_period(w: &[usize]) -> usize {
    (1..=w.len())
        .find(|p| w.len().is_multiple_of(*p) && (0..w.len()).all(|i| w[i] == w[(i + p) % w.len()]))
        .unwrap_or(w.len())
}

impl Code {
    pub fn new(prefix: Vec<usize>, tail: CodeTail) -> Self {
        let mut prefix = prefix;
        let tail = match tail {
            CodeTail::Cycle(mut c) => {
                c.truncate(minimal_word_period(&c));
                while let Some(last) = prefix.last() {
                    if *last != c[c.len() - 1] {
                        break;
                    }
                    prefix.pop();
                    c.rotate_right(1);
                }
                CodeTail::Cycle(c)
            }
            t => t,
        };
        let (strictly_periodic, period) = match &tail {
            CodeTail::Cycle(c) if prefix.is_empty() => (true, Some(c.len())),
            _ => (false, None),
        };
        Code {
            prefix,
            tail,
            strictly_periodic,
            period,
        }
    }

    /// Symbol at position `m`, if determined.
    pub fn symbol(&self, m: usize) -> Option<usize> {
        if m < self.prefix.len() {
            return Some(self.prefix[m]);
        }
        match &self.tail {
            CodeTail::Cycle(c) => Some(c[(m - self.prefix.len()) % c.len()]),
            CodeTail::Truncated => None,
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.prefix.iter().map(|s| s.to_string()).collect();
        match &self.tail {
            CodeTail::Cycle(c) => {
                let reps = if c.len() == 1 { 3 } else { 2 };
                for _ in 0..reps {
                    parts.extend(c.iter().map(|s| s.to_string()));
                }
                parts.push("...".into());
            }
            CodeTail::Truncated => parts.push("<truncated>".into()),
        }
        write!(f, "({})", parts.join(","))?;
        if let Some(n) = self.period {
            write!(f, " periodic, period {n}")?;
        }
        Ok(())
    }
}

enum Ending {
    Repeat(usize),
    Basin(Vec<usize>),
    Truncated,
    SpecialHit,
}

/// Shared state for itinerary questions about one map: the partition and,
/// computed on first use, attraction regions of its low-period orbits.
pub struct CodeContext<'a> {
    f: &'a PiecewiseMap,
    partition: PartitionIntervals,
    horizon: usize,
    regions: OnceCell<(AttractionRegions, HashMap<Rational, Rational>)>,
}

/// Steps of plain iteration attempted before consulting attraction regions.
const EAGER_STEPS: usize = 64;

impl<'a> CodeContext<'a> {
    pub fn new(f: &'a PiecewiseMap) -> Self {
        Self::with_horizon(f, 6)
    }

    pub fn with_horizon(f: &'a PiecewiseMap, horizon: usize) -> Self {
        CodeContext {
            f,
            partition: PartitionIntervals::new(f),
            horizon,
            regions: OnceCell::new(),
        }
    }

    pub fn partition(&self) -> &PartitionIntervals {
        &self.partition
    }

    fn regions(&self) -> &(AttractionRegions, HashMap<Rational, Rational>) {
        self.regions.get_or_init(|| {
            let mut all = AttractionRegions::default();
            let mut next = HashMap::new();
            if let Ok(pp) = periodic_points(self.f, self.horizon, &Limits::default()) {
                for o in pp.continuous() {
                    all.extend(attraction_regions(self.f, o));
                    for (i, p) in o.points.iter().enumerate() {
                        next.insert(p.clone(), o.points[(i + 1) % o.period].clone());
                    }
                }
            }
            (all, next)
        })
    }

    /// Adds the regions of a known orbit without enumerating periodic points.
    pub fn add_orbit(&mut self, orbit: &PeriodicOrbit) {
        let extra = attraction_regions(self.f, orbit);
        let mut next: HashMap<Rational, Rational> = HashMap::new();
        for (i, p) in orbit.points.iter().enumerate() {
            next.insert(p.clone(), orbit.points[(i + 1) % orbit.period].clone());
        }
        let mut cur = self.regions.take().unwrap_or_default();
        cur.0.extend(extra);
        cur.1.extend(next);
        let _ = self.regions.set(cur);
    }

    fn anchor_cycle(&self, anchor: &Rational) -> Vec<Rational> {
        let next = &self.regions().1;
        let mut out = vec![anchor.clone()];
        let mut cur = next[anchor].clone();
        while &cur != anchor {
            out.push(cur.clone());
            cur = next[&cur].clone();
        }
        out
    }

    /// Follows the orbit of `x` until it repeats, enters a certified basin, or
    /// runs out of budget. Stops early at a special point if `stop_at_special`.
    fn follow(&self, x: &Rational, cap: usize, stop_at_special: bool) -> Result<(Vec<Rational>, Ending)> {
        let f = self.f;
        let s = &f.special_points().s;
        let bits = Limits::default().denominator_bits;
        let mut pts: Vec<Rational> = Vec::new();
        let mut seen: HashMap<Rational, usize> = HashMap::new();
        let mut cur = x.clone();
        for step in 0..cap {
            if let Some(&i) = seen.get(&cur) {
                return Ok((pts, Ending::Repeat(i)));
            }
            if stop_at_special && s.contains(&cur) {
                pts.push(cur);
                return Ok((pts, Ending::SpecialHit));
            }
            if step >= EAGER_STEPS || self.regions.get().is_some() {
                if let Some(r) = self.regions().0.locate(&cur) {
                    let cycle = self.anchor_cycle(&r.anchor);
                    let tail = cycle.iter().map(|p| self.partition.indices(p)[0]).collect();
                    return Ok((pts, Ending::Basin(tail)));
                }
            }
            seen.insert(cur.clone(), pts.len());
            pts.push(cur.clone());
            cur = match f.eval(&cur)? {
                Some(y) => y,
                None => return Err(Error::HitsDiscontinuity(cur)),
            };
            if denominator_bits(&cur) > bits {
                return Ok((pts, Ending::Truncated));
            }
        }
        Ok((pts, Ending::Truncated))
    }

    pub fn code(&self, x: &Rational, cap: usize) -> Result<Vec<Code>> {
        if !self.f.in_domain(x) {
            return Err(Error::OutOfDomain(x.clone()));
        }
        let (pts, ending) = self.follow(x, cap, false)?;
        Ok(self.expand(&pts, ending, None))
    }

    /// Codes of an orbit, branching consistently at each distinct cut point
    /// visited; the first symbol may be forced.
    fn expand(&self, pts: &[Rational], ending: Ending, first: Option<usize>) -> Vec<Code> {
        let choices: Vec<Vec<usize>> = pts.iter().map(|p| self.partition.indices(p)).collect();
        let mut ambiguous: Vec<&Rational> = pts
            .iter()
            .zip(&choices)
            .enumerate()
            .filter(|(i, (_, c))| c.len() > 1 && !(*i == 0 && first.is_some()))
            .map(|(_, (p, _))| p)
            .collect();
        ambiguous.sort();
        ambiguous.dedup();
        ambiguous.truncate(4);
        let mut codes = BTreeSet::new();
        for mask in 0..(1usize << ambiguous.len()) {
            let pick = |i: usize| -> usize {
                if i == 0 {
                    if let Some(s) = first {
                        return s;
                    }
                }
                let c = &choices[i];
                match ambiguous.iter().position(|p| *p == &pts[i]) {
                    Some(bit) if c.len() > 1 => c[(mask >> bit) & 1],
                    _ => c[0],
                }
            };
            let syms: Vec<usize> = (0..pts.len()).map(pick).collect();
            let code = match &ending {
                Ending::Repeat(i) => Code::new(syms[..*i].to_vec(), CodeTail::Cycle(syms[*i..].to_vec())),
                Ending::Basin(tail) => Code::new(syms, CodeTail::Cycle(tail.clone())),
                Ending::Truncated | Ending::SpecialHit => Code::new(syms, CodeTail::Truncated),
            };
            codes.insert(code);
        }
        codes.into_iter().collect()
    }

    pub fn in_g(&self, x: &Rational, cap: usize) -> Trivalent {
        match self.follow(x, cap, true) {
            Err(_) => Trivalent::NO,
            Ok((_, Ending::SpecialHit)) => Trivalent::NO,
            Ok((_, Ending::Repeat(_) | Ending::Basin(_))) => Trivalent::YES,
            Ok((pts, Ending::Truncated)) => {
                let bits = Limits::default().denominator_bits;
                Trivalent::unknown(if pts.len() < cap { bits } else { cap as u64 })
            }
        }
    }

    fn side_codes(&self, w: &Rational, side: Option<Side>, cap: usize) -> Result<(Trivalent, Vec<Code>)> {
        let f = self.f;
        let k = self.partition.cuts.binary_search(w).expect("special point is a cut");
        let fw = match side {
            Some(s) => f.lateral_limit(w, s)?,
            None => f.eval(w)?.expect("turning point has a value"),
        };
        let good = self.in_g(&fw, cap);
        if !good.is_yes() {
            return Ok((good, Vec::new()));
        }
        let (mut pts, ending) = self.follow(&fw, cap, false)?;
        let ending = match ending {
            Ending::Repeat(i) => Ending::Repeat(i + 1),
            e => e,
        };
        pts.insert(0, w.clone());
        let firsts = match side {
            Some(Side::Minus) => vec![k - 1],
            Some(Side::Plus) => vec![k],
            None => vec![k - 1, k],
        };
        let mut codes = Vec::new();
        for s0 in firsts {
            let e = match &ending {
                Ending::Repeat(i) => Ending::Repeat(*i),
                Ending::Basin(t) => Ending::Basin(t.clone()),
                Ending::Truncated => Ending::Truncated,
                Ending::SpecialHit => Ending::SpecialHit,
            };
            codes.extend(self.expand(&pts, e, Some(s0)));
        }
        Ok((good, codes))
    }

    pub fn is_regular(&self, w: &Rational, cap: usize) -> Result<Regularity> {
        let sp = self.f.special_points();
        if !sp.s.contains(w) {
            return Err(Error::NotSpecial(w.clone()));
        }
        let sides: Vec<Option<Side>> =
            if sp.d.contains(w) { vec![Some(Side::Minus), Some(Side::Plus)] } else { vec![None] };
        let mut out = Vec::new();
        for side in sides {
            let (good, codes) = self.side_codes(w, side, cap)?;
            let verdict = if !good.is_yes() {
                good
            } else if codes.iter().any(|c| c.strictly_periodic) {
                Trivalent::YES
            } else if codes.iter().any(|c| c.tail == CodeTail::Truncated) {
                Trivalent::unknown(cap as u64)
            } else {
                Trivalent::NO
            };
            out.push(SideRegularity { side, verdict, codes });
        }
        let verdict = if out.iter().any(|s| s.verdict.is_yes()) {
            Trivalent::YES
        } else if let Some(u) = out.iter().find(|s| s.verdict.value == Answer::Unknown) {
            u.verdict
        } else {
            Trivalent::NO
        };
        Ok(Regularity {
            w: w.clone(),
            sides: out,
            verdict,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideRegularity {
    /// `None` for a turning point, where both one-sided values agree.
    pub side: Option<Side>,
    pub verdict: Trivalent,
    pub codes: Vec<Code>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Regularity {
    pub w: Rational,
    pub sides: Vec<SideRegularity>,
    pub verdict: Trivalent,
}

pub fn code(f: &PiecewiseMap, x: &Rational, cap: usize) -> Result<Vec<Code>> {
    CodeContext::new(f).code(x, cap)
}

#[allow(non_snake_case)]
pub fn in_G(f: &PiecewiseMap, x: &Rational, cap: usize) -> Trivalent {
    CodeContext::new(f).in_g(x, cap)
}

pub fn is_regular(f: &PiecewiseMap, w: &Rational, cap: usize) -> Result<Regularity> {
    CodeContext::new(f).is_regular(w, cap)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForwardCertificate {
    pub w: Rational,
    pub side: Option<Side>,
    pub code: Code,
    pub j_lo: Rational,
    pub j_hi: Rational,
    pub orbit: PeriodicOrbit,
    pub class: StabilityClass,
    pub trapped: bool,
    pub w_attracted: Trivalent,
}

/// Local branch composition: `J` and `f^k` on it, following a fixed itinerary.
struct Itinerary<'a> {
    f: &'a PiecewiseMap,
    lo: Rational,
    hi: Rational,
    maps: Vec<Vec<AffinePiece>>,
}

impl<'a> Itinerary<'a> {
    fn new(f: &'a PiecewiseMap) -> Self {
        let id = AffinePiece::new(f.a().clone(), f.b().clone(), Rational::one(), Rational::zero());
        Itinerary {
            f,
            lo: f.a().clone(),
            hi: f.b().clone(),
            maps: vec![vec![id]],
        }
    }

    fn restrict(pieces: &[AffinePiece], lo: &Rational, hi: &Rational) -> Vec<AffinePiece> {
        pieces
            .iter()
            .filter(|p| &p.left < hi && &p.right > lo)
            .map(|p| {
                let mut p = p.clone();
                p.left = p.left.clone().max(lo.clone());
                p.right = p.right.clone().min(hi.clone());
                p
            })
            .collect()
    }

    fn eval(pieces: &[AffinePiece], t: &Rational) -> Rational {
        let i = pieces.partition_point(|p| &p.right < t).min(pieces.len() - 1);
        pieces[i].at(t)
    }

    fn solve(pieces: &[AffinePiece], y: &Rational) -> Option<Rational> {
        pieces.iter().find_map(|p| {
            let t = (y - &p.intercept) / &p.slope;
            (p.left <= t && t <= p.right).then_some(t)
        })
    }

    /// Restricts `J` to points whose `k`-th iterate lies in `[lo, hi]`, then extends the branch.
    fn push(&mut self, lo: &Rational, hi: &Rational) -> Result<()> {
        let g = self.maps.last().expect("identity present");
        let g = Self::restrict(g, &self.lo, &self.hi);
        let (p, q) = (Self::eval(&g, &self.lo), Self::eval(&g, &self.hi));
        let increasing = p <= q;
        let (img_lo, img_hi) = if increasing { (p, q) } else { (q, p) };
        let new_lo = img_lo.clone().max(lo.clone());
        let new_hi = img_hi.clone().min(hi.clone());
        if new_lo >= new_hi {
            return Err(Error::Violation("code interval is trivial".into()));
        }
        let (t1, t2) = (Self::solve(&g, &new_lo).expect("in image"), Self::solve(&g, &new_hi).expect("in image"));
        let (a, b) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        self.lo = a;
        self.hi = b;
        let g = Self::restrict(&g, &self.lo, &self.hi);
        let next = compose_local(self.f, &g);
        self.maps.push(next);
        Ok(())
    }

    fn image_of(&self, k: usize) -> (Rational, Rational) {
        let g = Self::restrict(&self.maps[k], &self.lo, &self.hi);
        let (p, q) = (Self::eval(&g, &self.lo), Self::eval(&g, &self.hi));
        if p <= q {
            (p, q)
        } else {
            (q, p)
        }
    }
}

/// Builds the periodic orbit that attracts a regular special point.
pub fn theorem5_forward(f: &PiecewiseMap, w: &Rational, cap: usize) -> Result<ForwardCertificate> {
    let ctx = CodeContext::new(f);
    let reg = ctx.is_regular(w, cap)?;
    let found = reg.sides.iter().find_map(|s| {
        s.verdict
            .is_yes()
            .then(|| s.codes.iter().find(|c| c.strictly_periodic).map(|c| (s.side, c.clone())))
            .flatten()
    });
    let Some((side, sigma)) = found else {
        return Err(Error::Precondition(format!("{w} is not regular")));
    };
    let n = sigma.period.expect("periodic code");
    let part = ctx.partition();
    let mut br = Itinerary::new(f);
    let max_steps = 64 * n + 2 * n;
    let mut k = 0;
    loop {
        let (lo, hi) = part.interval(sigma.symbol(k).expect("periodic"));
        br.push(lo, hi)?;
        k += 1;
        if k >= 2 * n && k % n == 0 {
            let (p, q) = br.image_of(n);
            if p >= br.lo && q <= br.hi {
                break;
            }
        }
        if k > max_steps {
            return Err(Error::Violation(format!("code interval of {w} did not settle")));
        }
    }
    let (j_lo, j_hi) = (br.lo.clone(), br.hi.clone());
    if &j_lo != w && &j_hi != w {
        return Err(Error::Violation(format!("{w} is not an end of its code interval")));
    }
    let h = Itinerary::restrict(&br.maps[2 * n], &j_lo, &j_hi);
    let fixed = closed_fixed_points(&h, &j_lo, &j_hi).into_iter().filter(|t| t != w);
    let x = if &j_hi == w { fixed.max() } else { fixed.min() }
    .ok_or_else(|| Error::Violation(format!("no fixed point of the return map inside the code interval of {w}")))?;
    let orbit = PeriodicOrbit::continuous_through(f, &x, 2 * n)
        .ok_or_else(|| Error::Violation(format!("{x} is not a continuous periodic point")))?;
    let class = classify_point(f, &x)?;
    let trapped = taxonomy(f, &orbit)?.trapped;
    let fw = match side {
        Some(s) => f.lateral_limit(w, s)?,
        None => f.eval(w)?.expect("turning point has a value"),
    };
    let w_attracted = attracted(f, &fw, &orbit, cap);
    if class == StabilityClass::Unstable || trapped || !w_attracted.is_yes() {
        return Err(Error::Violation(format!(
            "orbit {} from regular point {w}: class {class}, trapped {trapped}, attracted {w_attracted}",
            format_set(&orbit.points)
        )));
    }
    Ok(ForwardCertificate {
        w: w.clone(),
        side,
        code: sigma,
        j_lo,
        j_hi,
        orbit,
        class,
        trapped,
        w_attracted,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReverseCertificate {
    pub w: Rational,
    pub side: Side,
    pub regular: Trivalent,
    pub attracted: Trivalent,
}

/// Finds a special point in the basin of a free, non-exceptional, stable or
/// semi-stable orbit, and reports whether it is regular.
pub fn theorem5_reverse(
    f: &PiecewiseMap,
    orbit: &PeriodicOrbit,
    horizon: usize,
    cap: usize,
) -> Result<ReverseCertificate> {
    if f.special_points().s.is_empty() {
        return Err(Error::Precondition("the map has no special points".into()));
    }
    let tax = taxonomy(f, orbit)?;
    if !tax.free || !tax.exceptional_types.is_empty() {
        return Err(Error::Precondition("orbit is not free and non-exceptional".into()));
    }
    if classify_point(f, &orbit.points[0])? == StabilityClass::Unstable {
        return Err(Error::Precondition("orbit is unstable".into()));
    }
    let t = &f.special_points().t;
    for o in periodic_points(f, horizon, &Limits::default())?.continuous() {
        if o.points.iter().any(|p| t.contains(p)) && classify_point(f, &o.points[0])? != StabilityClass::Stable {
            return Err(Error::Precondition(format!(
                "critical orbit {} is not stable",
                format_set(&o.points)
            )));
        }
    }
    let n = orbit.period;
    let s = &f.special_points().s;
    let mut ctx = CodeContext::new(f);
    ctx.add_orbit(orbit);
    for p in &orbit.points {
        let window = monotone_window(f, p, 2 * n)?;
        let mut edges = Vec::new();
        if window.v_origin.is_some() && strict_everywhere(&window.pieces, p, &window.v, Ordering::Less) {
            edges.push(Germ::new(window.v.clone(), Side::Minus));
        }
        if window.u_origin.is_some() && strict_everywhere(&window.pieces, &window.u, p, Ordering::Greater) {
            edges.push(Germ::new(window.u.clone(), Side::Plus));
        }
        for edge in edges {
            let mut g = edge;
            let mut last = None;
            for _ in 0..2 * n {
                if s.contains(&g.point) {
                    last = Some(g.clone());
                }
                g = germ_step(f, &g)?.next;
            }
            let Some(hit) = last else { continue };
            let reg = ctx.is_regular(&hit.point, cap)?;
            let regular = reg
                .sides
                .iter()
                .find(|r| r.side.is_none() || r.side == Some(hit.side))
                .map(|r| r.verdict)
                .unwrap_or(reg.verdict);
            let fw = f.lateral_limit(&hit.point, hit.side)?;
            return Ok(ReverseCertificate {
                w: hit.point,
                side: hit.side,
                regular,
                attracted: attracted(f, &fw, orbit, cap),
            });
        }
    }
    Err(Error::Violation(format!(
        "no special point found in the basin of {}",
        format_set(&orbit.points)
    )))
}

/// The preimage skeleton `f^{-m}(S)` for `m < depth`.
pub fn skeleton(f: &PiecewiseMap, depth: usize) -> BTreeSet<Rational> {
    let mut all: BTreeSet<Rational> = f.special_points().s.clone();
    let mut layer = all.clone();
    for _ in 1..depth {
        layer = f.preimage_set(&layer);
        if layer.is_subset(&all) {
            break;
        }
        all.extend(layer.iter().cloned());
    }
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::tests::{shift, tent};
    use crate::rational::rat;
    use crate::taxonomy::tests::hat;

    fn word(c: &Code) -> (Vec<usize>, Vec<usize>) {
        match &c.tail {
            CodeTail::Cycle(t) => (c.prefix.clone(), t.clone()),
            CodeTail::Truncated => panic!("truncated"),
        }
    }

    #[test]
    fn codes() {
        let s = shift();
        let c = code(&s, &rat(1, 3), 100).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(word(&c[0]), (vec![0], vec![0, 1]));
        assert!(!c[0].strictly_periodic);
        assert_eq!(code(&s, &rat(1, 4), 100), Err(Error::HitsDiscontinuity(rat(1, 2))));
        let h = hat();
        let c = code(&h, &rat(1, 2), 200).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!((word(&c[0]), c[0].period), ((vec![], vec![1]), Some(1)));
        assert_eq!(word(&c[1]), (vec![0], vec![1]));
        assert_eq!(c[0].to_string(), "(1,1,1,...) periodic, period 1");
        assert_eq!(c[1].to_string(), "(0,1,1,1,...)");
    }

    #[test]
    fn good_set() {
        let s = shift();
        assert!(in_G(&s, &rat(1, 4), 100).is_no());
        assert!(in_G(&s, &rat(1, 3), 100).is_yes());
        assert!(in_G(&hat(), &rat(5, 8), 200).is_yes());
        let u = in_G(&tent(), &rat(1, 7), 50);
        assert_eq!(u, Trivalent::unknown(50));
    }

    #[test]
    fn regularity() {
        let h = hat();
        assert!(is_regular(&h, &rat(1, 2), 200).unwrap().verdict.is_yes());
        let r = is_regular(&shift(), &rat(1, 2), 200).unwrap();
        assert_eq!(r.sides.len(), 2);
        assert!(r.sides.iter().all(|s| s.verdict.is_no()));
        let t = is_regular(&tent(), &rat(1, 2), 200).unwrap().verdict;
        assert_eq!(t.value, Answer::Unknown);
        assert_eq!(is_regular(&h, &rat(1, 3), 10), Err(Error::NotSpecial(rat(1, 3))));
    }

    #[test]
    fn forward_and_reverse() {
        let h = hat();
        let c = theorem5_forward(&h, &rat(1, 2), 500).unwrap();
        assert_eq!(c.orbit.points, vec![rat(7, 12)]);
        assert_eq!((c.j_lo.clone(), c.j_hi.clone()), (rat(1, 2), rat(3, 4)));
        assert_eq!(c.class, StabilityClass::Stable);
        assert!(!c.trapped && c.w_attracted.is_yes());
        assert!(matches!(theorem5_forward(&tent(), &rat(1, 2), 100), Err(Error::Precondition(_))));
        let o = PeriodicOrbit::continuous_through(&h, &rat(7, 12), 1).unwrap();
        let r = theorem5_reverse(&h, &o, 4, 500).unwrap();
        assert_eq!(r.w, rat(1, 2));
        assert!(r.regular.is_yes() && r.attracted.is_yes());
        let t = tent();
        let o = PeriodicOrbit::continuous_through(&t, &rat(3, 5), 1).unwrap();
        assert!(matches!(theorem5_reverse(&t, &o, 4, 100), Err(Error::Precondition(_))));
    }

    #[test]
    fn skeleton_depth() {
        let sk = skeleton(&shift(), 3);
        assert!(sk.contains(&rat(1, 2)) && sk.contains(&rat(3, 8)) && sk.contains(&rat(5, 8)));
    }
}
