//! Brute-force stability oracle: iterates an actual one-sided interval and
//! watches the total length of its (possibly split) images.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::map::{PiecewiseMap, Side};
use crate::rational::Rational;

use super::{StabilityClass, Verdict};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    /// Initial width is `2^-delta_exp (b - a)`.
    pub delta_exp: u32,
    pub steps: usize,
    /// Contracting once the total length drops below `2^-threshold_exp (b - a)`.
    pub threshold_exp: u32,
    /// Lengths above `2^-floor_exp (b - a)` count as escaped.
    pub floor_exp: u32,
    /// Fragments shorter than `2^-drop_exp (b - a)` are discarded.
    pub drop_exp: u32,
    pub max_fragments: usize,
    /// Run of consecutive escaped samples that settles an expanding verdict.
    pub escape_run: usize,
    /// Lengths are sampled every `stride` steps.
    pub stride: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            delta_exp: 20,
            steps: 10_000,
            threshold_exp: 40,
            floor_exp: 10,
            drop_exp: 80,
            max_fragments: 256,
            escape_run: 64,
            stride: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleRun {
    pub verdict: Verdict,
    pub steps: usize,
    pub final_length: Rational,
}

fn pow2(e: u32) -> Rational {
    Rational::from_integer(BigInt::one() << e)
}

type Fragments = BTreeMap<(Rational, Rational), u64>;

fn step(f: &PiecewiseMap, frags: &Fragments, drop: &Rational) -> Fragments {
    let pieces = f.pieces();
    let mut out = Fragments::new();
    for ((lo, hi), mult) in frags {
        let first = pieces.partition_point(|p| &p.right <= lo);
        let mut left = lo.clone();
        for p in &pieces[first..] {
            let right = if &p.right < hi { p.right.clone() } else { hi.clone() };
            let (u, v) = (p.at(&left), p.at(&right));
            let key = if u <= v { (u, v) } else { (v, u) };
            if &key.1 - &key.0 >= *drop {
                let e = out.entry(key).or_insert(0);
                *e = e.saturating_add(*mult);
            }
            if &right == hi {
                break;
            }
            left = right;
        }
    }
    out
}

fn total(frags: &Fragments) -> Rational {
    frags
        .iter()
        .fold(Rational::zero(), |acc, ((lo, hi), m)| acc + (hi - lo) * Rational::from_integer(BigInt::from(*m)))
}

/// Runs the oracle on the one-sided interval at `x`.
pub fn oracle_side(f: &PiecewiseMap, x: &Rational, side: Side, cfg: &OracleConfig) -> OracleRun {
    let width = f.b() - f.a();
    let mut delta = &width / pow2(cfg.delta_exp);
    let room = match side {
        Side::Plus => f.b() - x,
        Side::Minus => x - f.a(),
    };
    if room < &delta * Rational::from_integer(2.into()) {
        delta = room / Rational::from_integer(2.into());
    }
    let init = match side {
        Side::Plus => (x.clone(), x + &delta),
        Side::Minus => (x - &delta, x.clone()),
    };
    let initial = &init.1 - &init.0;
    let threshold = &width / pow2(cfg.threshold_exp);
    let floor = &width / pow2(cfg.floor_exp);
    let drop = &width / pow2(cfg.drop_exp);
    let mut frags = Fragments::from([(init, 1)]);
    let mut seen: HashSet<Fragments> = HashSet::new();
    let mut escaped = 0usize;
    let mut max_len = initial.clone();
    let stride = cfg.stride.max(1);
    for k in 1..=cfg.steps {
        frags = step(f, &frags, &drop);
        if frags.len() > cfg.max_fragments {
            return OracleRun { verdict: Verdict::Expanding, steps: k, final_length: total(&frags) };
        }
        if k % stride != 0 {
            continue;
        }
        let len = total(&frags);
        if len < threshold {
            return OracleRun { verdict: Verdict::Contracting, steps: k, final_length: len };
        }
        escaped = if len > floor { escaped + 1 } else { 0 };
        if len > max_len {
            max_len = len.clone();
        }
        if escaped >= cfg.escape_run {
            return OracleRun { verdict: Verdict::Expanding, steps: k, final_length: len };
        }
        if !seen.insert(frags.clone()) {
            // The sampled state repeats, so lengths cycle from here on.
            let verdict = if max_len > &initial * Rational::from_integer(2.into()) {
                Verdict::Expanding
            } else {
                Verdict::Neutral
            };
            return OracleRun { verdict, steps: k, final_length: len };
        }
    }
    let len = total(&frags);
    let verdict = if len > &initial * Rational::from_integer(2.into()) {
        Verdict::Expanding
    } else {
        Verdict::Neutral
    };
    OracleRun { verdict, steps: cfg.steps, final_length: len }
}

/// Oracle stability class of `x`, deciding only contracting versus not per side.
pub fn oracle_point(f: &PiecewiseMap, x: &Rational, cfg: &OracleConfig) -> StabilityClass {
    let sides: Vec<bool> = crate::orbit::germs_at(f, x)
        .iter()
        .map(|g| oracle_side(f, x, g.side, cfg).verdict == Verdict::Contracting)
        .collect();
    StabilityClass::from_sides(&sides, x == f.a() || x == f.b())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::parse_map;
    use crate::rational::{int, rat};

    #[test]
    fn oracle_verdicts() {
        let cfg = OracleConfig::default();
        let c = parse_map("interval 0 1\npiece 0 1 : 1/2 1/4\n").unwrap();
        assert_eq!(oracle_side(&c, &rat(1, 2), Side::Plus, &cfg).verdict, Verdict::Contracting);
        let shift = parse_map("interval 0 1\npiece 0 1/2 : 1 1/8\npiece 1/2 1 : 1 -1/8\n").unwrap();
        let r = oracle_side(&shift, &rat(1, 2), Side::Plus, &cfg);
        assert_eq!(r.verdict, Verdict::Neutral);
        assert!(r.steps < 10);
        let tent = parse_map("interval 0 1\npiece 0 1/2 : 3/2 0\npiece 1/2 1 : -3/2 3/2\n").unwrap();
        assert_eq!(oracle_side(&tent, &rat(3, 5), Side::Minus, &cfg).verdict, Verdict::Expanding);
        let semi = parse_map("interval 0 1\npiece 0 1/2 : 1/2 1/4\npiece 1/2 3/4 : 2 -1/2\npiece 3/4 1 : -2 5/2\n")
            .unwrap();
        assert_eq!(oracle_point(&semi, &rat(1, 2), &cfg), StabilityClass::SemiStable);
        let id = PiecewiseMap::identity(int(0), int(1)).unwrap();
        assert_eq!(oracle_point(&id, &int(1), &cfg), StabilityClass::Unstable);
    }
}
