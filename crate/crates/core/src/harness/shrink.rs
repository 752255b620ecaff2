use num_traits::{One, Zero};

use super::properties::{all, evaluate, Property};
use super::{Bundle, Case, Outcome, Status};
use crate::error::{Error, Result};
use crate::map::{AffinePiece, PiecewiseMap};
use crate::rational::{int, Rational};

const BUDGET: usize = 400;

/// Greedily reduces the map of a failing bundle while the failure persists.
pub fn shrink(bundle: &Bundle) -> Result<Bundle> {
    let prop = all()
        .into_iter()
        .find(|p| p.name == bundle.property)
        .ok_or_else(|| Error::Invalid(format!("unknown property {}", bundle.property)))?;
    let case = bundle.to_case()?;
    let first = evaluate(prop.check, &case);
    if !first.failed() {
        return Err(Error::NotFailing);
    }
    let kind = signature(&first);
    let mut best = case;
    let mut trace = first;
    let mut spent = 0;
    'outer: loop {
        for cand in candidates(&best.map) {
            if spent >= BUDGET {
                break 'outer;
            }
            spent += 1;
            if let Some(o) = still_fails(&prop, &best, cand, &kind) {
                best = o.0;
                trace = o.1;
                continue 'outer;
            }
        }
        break;
    }
    let mut out = bundle.clone();
    out.map = best.map.to_text();
    if let Status::Fail(t) = trace.status {
        out.trace = t;
    }
    Ok(out)
}

/// Shape of a failure with the numbers removed, so shrinking keeps the same kind of failure.
fn signature(o: &Outcome) -> String {
    let Status::Fail(trace) = &o.status else { return String::new() };
    match trace.as_object() {
        Some(obj) => obj
            .iter()
            .map(|(k, v)| match v.as_str() {
                Some(text) if k == "violation" || k == "clause" => {
                    let words: String = text.chars().filter(|c| c.is_alphabetic() || *c == ' ').collect();
                    format!("{k}:{}", words.split_whitespace().collect::<Vec<_>>().join(" "))
                }
                _ => k.clone(),
            })
            .collect::<Vec<_>>()
            .join(";"),
        None => trace.to_string(),
    }
}

fn still_fails(prop: &Property, base: &Case, map: PiecewiseMap, kind: &str) -> Option<(Case, Outcome)> {
    let case = Case {
        label: base.label.clone(),
        map,
        extra: base.extra.clone(),
    };
    let o = evaluate(prop.check, &case);
    (o.failed() && signature(&o) == kind).then_some((case, o))
}

fn size(map: &PiecewiseMap) -> (usize, u64) {
    let bits = map
        .pieces()
        .iter()
        .map(|p| [&p.left, &p.slope, &p.intercept].iter().map(|r| r.denom().bits() + r.numer().bits()).sum::<u64>())
        .sum();
    (map.pieces().len(), bits)
}

/// Smaller maps to try, most aggressive first; each is strictly smaller than `map`.
fn candidates(map: &PiecewiseMap) -> Vec<PiecewiseMap> {
    let (a, b) = (map.a().clone(), map.b().clone());
    let ps = map.pieces();
    let mut out = Vec::new();
    let mut push = |a: &Rational, b: &Rational, pieces: Vec<AffinePiece>| {
        if let Ok(m) = PiecewiseMap::new(a.clone(), b.clone(), pieces) {
            if size(&m) < size(map) {
                out.push(m);
            }
        }
    };
    for i in 0..ps.len().saturating_sub(1) {
        for keep in [i, i + 1] {
            let mut v = ps.to_vec();
            let line = ps[keep].clone();
            let merged = AffinePiece::new(ps[i].left.clone(), ps[i + 1].right.clone(), line.slope, line.intercept);
            v.splice(i..=i + 1, [merged]);
            push(&a, &b, v);
        }
    }
    if ps.len() > 1 {
        push(&ps[1].left, &b, ps[1..].to_vec());
        push(&a, &ps[ps.len() - 1].left, ps[..ps.len() - 1].to_vec());
    }
    for i in 0..ps.len() {
        for field in 0..3 {
            for k in 0..6u32 {
                let mut v = ps.to_vec();
                let target = match field {
                    0 if i > 0 => &mut v[i].left,
                    1 => &mut v[i].slope,
                    2 => &mut v[i].intercept,
                    _ => continue,
                };
                let r = round_to(target, 1 << k);
                if r == *target || (field == 1 && r.is_zero()) {
                    continue;
                }
                *target = r.clone();
                if field == 0 {
                    v[i - 1].right = r;
                }
                push(&a, &b, v);
            }
        }
    }
    out
}

fn round_to(x: &Rational, den: i64) -> Rational {
    let d = int(den);
    let half = Rational::one() / int(2);
    ((x * &d) + half).floor() / d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Extra;
    use serde_json::json;

    #[test]
    fn passing_bundles_do_not_shrink() {
        let case = Case {
            label: "shift".into(),
            map: crate::map::tests::shift(),
            extra: Extra::None,
        };
        let b = Bundle::new("shift_square", &case, json!({}));
        assert!(matches!(shrink(&b), Err(Error::NotFailing)));
    }

    #[test]
    fn candidates_are_smaller() {
        let m = crate::map::tests::tent();
        for c in candidates(&m) {
            assert!(size(&c) < size(&m));
        }
    }
}
