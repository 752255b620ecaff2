//! Forward dynamics: variants, orbits, structures, germs and periodic points.

mod germ;
mod periodic;
mod structure;

use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::map::{Limits, PiecewiseMap, Side};
use crate::rational::{denominator_bits, Rational};

pub use germ::{germ_orbit, germ_step, germs_at, Germ, GermOrbit, GermStepResult};
pub use periodic::{periodic_points, PeriodicFamily, PeriodicOrbit, PeriodicPoints};
pub use structure::{structure, structure_with, Branch, Cycle, StructureEdge, StructureGraph};

/// A side choice at every discontinuity, turning `f` into a total function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct VariantSelector {
    pub choice: BTreeMap<Rational, Side>,
}

impl VariantSelector {
    /// Every discontinuity on the same side.
    pub fn uniform(f: &PiecewiseMap, side: Side) -> Self {
        let choice = f.special_points().d.iter().map(|w| (w.clone(), side)).collect();
        VariantSelector { choice }
    }

    /// Parses a bitstring over `D(f)` in increasing order, `0` = minus, `1` = plus.
    pub fn from_bits(f: &PiecewiseMap, bits: &str) -> Result<Self> {
        let d = &f.special_points().d;
        if bits.len() != d.len() {
            return Err(Error::Invalid(format!(
                "selector needs {} bits, got {}",
                d.len(),
                bits.len()
            )));
        }
        let mut choice = BTreeMap::new();
        for (w, c) in d.iter().zip(bits.chars()) {
            let side = match c {
                '0' => Side::Minus,
                '1' => Side::Plus,
                _ => return Err(Error::Invalid(format!("selector bit '{c}'"))),
            };
            choice.insert(w.clone(), side);
        }
        Ok(VariantSelector { choice })
    }

    pub fn to_bits(&self) -> String {
        self.choice
            .values()
            .map(|s| if *s == Side::Plus { '1' } else { '0' })
            .collect()
    }

    /// The variant's value at `x`; `None` only if `x` is a discontinuity without a choice.
    pub fn apply(&self, f: &PiecewiseMap, x: &Rational) -> Result<Option<Rational>> {
        match f.eval(x)? {
            Some(y) => Ok(Some(y)),
            None => match self.choice.get(x) {
                Some(side) => f.lateral_limit(x, *side).map(Some),
                None => Ok(None),
            },
        }
    }
}

/// All `2^|D(f)|` variants, the first discontinuity being the most significant choice.
pub fn variants(f: &PiecewiseMap, limits: &Limits) -> Result<Vec<VariantSelector>> {
    let d: Vec<&Rational> = f.special_points().d.iter().collect();
    if d.len() > limits.max_variant_bits {
        return Err(Error::VariantLimit {
            count: d.len(),
            limit: limits.max_variant_bits,
        });
    }
    let k = d.len();
    Ok((0u64..1 << k)
        .map(|mask| {
            let choice = d
                .iter()
                .enumerate()
                .map(|(i, w)| {
                    let bit = (mask >> (k - 1 - i)) & 1;
                    ((*w).clone(), if bit == 1 { Side::Plus } else { Side::Minus })
                })
                .collect();
            VariantSelector { choice }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationReason {
    Steps,
    DenominatorBits,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Truncated {
    pub reason: TruncationReason,
    pub cap: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbitTail {
    Cycle(Vec<Rational>),
    Truncated(Truncated),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitResult {
    pub prefix: Vec<Rational>,
    pub tail: OrbitTail,
    pub steps_used: usize,
}

impl OrbitResult {
    pub fn cycle(&self) -> Option<&[Rational]> {
        match &self.tail {
            OrbitTail::Cycle(c) => Some(c),
            OrbitTail::Truncated(_) => None,
        }
    }
}

/// Iterates the selected variant until an exact repeat or a cap.
pub fn orbit(f: &PiecewiseMap, x: &Rational, sel: &VariantSelector, cap: usize) -> Result<OrbitResult> {
    orbit_with(f, x, sel, cap, &Limits::default())
}

pub fn orbit_with(
    f: &PiecewiseMap,
    x: &Rational,
    sel: &VariantSelector,
    cap: usize,
    limits: &Limits,
) -> Result<OrbitResult> {
    if !f.in_domain(x) {
        return Err(Error::OutOfDomain(x.clone()));
    }
    let mut seen: HashMap<Rational, usize> = HashMap::new();
    let mut path: Vec<Rational> = Vec::new();
    let mut cur = x.clone();
    let mut steps = 0;
    loop {
        if let Some(&i) = seen.get(&cur) {
            let cycle = path.split_off(i);
            return Ok(OrbitResult {
                prefix: path,
                tail: OrbitTail::Cycle(cycle),
                steps_used: steps,
            });
        }
        if denominator_bits(&cur) > limits.denominator_bits {
            return Ok(truncated(path, steps, TruncationReason::DenominatorBits, limits.denominator_bits));
        }
        if steps >= cap {
            path.push(cur);
            return Ok(truncated(path, steps, TruncationReason::Steps, cap as u64));
        }
        seen.insert(cur.clone(), path.len());
        let next = sel.apply(f, &cur)?.ok_or_else(|| Error::HitsDiscontinuity(cur.clone()))?;
        path.push(cur);
        cur = next;
        steps += 1;
    }
}

fn truncated(prefix: Vec<Rational>, steps: usize, reason: TruncationReason, cap: u64) -> OrbitResult {
    OrbitResult {
        prefix,
        tail: OrbitTail::Truncated(Truncated { reason, cap }),
        steps_used: steps,
    }
}

/// Plain forward iteration of `f`; `None` once an iterate is undefined.
pub(crate) fn iterate_point(f: &PiecewiseMap, x: &Rational, n: usize) -> Option<Rational> {
    let mut cur = x.clone();
    for _ in 0..n {
        cur = f.eval(&cur).ok()??;
    }
    Some(cur)
}

/// Least `k` in `1..=max` with `f^k(x) = x` along the plain orbit.
pub(crate) fn minimal_period(f: &PiecewiseMap, x: &Rational, max: usize) -> Option<usize> {
    let mut cur = x.clone();
    for k in 1..=max {
        cur = f.eval(&cur).ok()??;
        if &cur == x {
            return Some(k);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::parse_map;
    use crate::rational::{int, rat};

    pub fn shift() -> PiecewiseMap {
        parse_map("interval 0 1\npiece 0 1/2 : 1 1/8\npiece 1/2 1 : 1 -1/8\n").unwrap()
    }

    #[test]
    fn variant_counts() {
        let lim = Limits::default();
        assert_eq!(variants(&shift(), &lim).unwrap().len(), 2);
        let tent = parse_map("interval 0 1\npiece 0 1/2 : 3/2 0\npiece 1/2 1 : -3/2 3/2\n").unwrap();
        let v = variants(&tent, &lim).unwrap();
        assert_eq!(v.len(), 1);
        assert!(v[0].choice.is_empty());
        let two = parse_map("interval 0 1\npiece 0 1/3 : 1 1/3\npiece 1/3 2/3 : 1 -1/3\npiece 2/3 1 : 1/2 1/2\n").unwrap();
        assert_eq!(two.special_points().d.len(), 2);
        let v = variants(&two, &lim).unwrap();
        assert_eq!(v.iter().map(|s| s.to_bits()).collect::<Vec<_>>(), ["00", "01", "10", "11"]);
        assert_eq!(VariantSelector::from_bits(&two, "01").unwrap(), v[1]);
        let tight = Limits { max_variant_bits: 1, ..Limits::default() };
        assert!(matches!(variants(&two, &tight), Err(Error::VariantLimit { .. })));
    }

    #[test]
    fn shift_orbits() {
        let f = shift();
        for bits in ["0", "1"] {
            let sel = VariantSelector::from_bits(&f, bits).unwrap();
            let o = orbit(&f, &rat(1, 3), &sel, 100).unwrap();
            assert_eq!(o.prefix, vec![rat(1, 3)]);
            assert_eq!(o.cycle().unwrap(), &[rat(11, 24), rat(7, 12)]);
        }
        let plus = VariantSelector::from_bits(&f, "1").unwrap();
        let o = orbit(&f, &rat(1, 2), &plus, 100).unwrap();
        assert!(o.prefix.is_empty());
        assert_eq!(o.cycle().unwrap(), &[rat(1, 2), rat(3, 8)]);
        let id = PiecewiseMap::identity(int(0), int(1)).unwrap();
        let o = orbit(&id, &rat(2, 7), &VariantSelector::default(), 5).unwrap();
        assert_eq!(o.cycle().unwrap(), &[rat(2, 7)]);
    }

    #[test]
    fn orbit_truncates() {
        let tent = parse_map("interval 0 1\npiece 0 1/2 : 3/2 0\npiece 1/2 1 : -3/2 3/2\n").unwrap();
        let o = orbit(&tent, &rat(1, 7), &VariantSelector::default(), 20).unwrap();
        assert!(matches!(o.tail, OrbitTail::Truncated(Truncated { reason: TruncationReason::Steps, cap: 20 })));
        assert_eq!(o.steps_used, 20);
    }
}
