use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{AffinePiece, PiecewiseMap};
use crate::rational::{int, rat, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlopePalette {
    ContractingRich,
    ExpandingRich,
    NeutralRich,
    Mixed,
}

impl SlopePalette {
    pub const ALL: [SlopePalette; 4] = [
        SlopePalette::ContractingRich,
        SlopePalette::ExpandingRich,
        SlopePalette::NeutralRich,
        SlopePalette::Mixed,
    ];

    fn primary(self) -> Vec<Rational> {
        match self {
            SlopePalette::ContractingRich => vec![rat(1, 4), rat(1, 3), rat(1, 2), rat(2, 3), rat(3, 4)],
            SlopePalette::ExpandingRich => vec![rat(5, 4), rat(4, 3), rat(3, 2), rat(5, 3), int(2)],
            SlopePalette::NeutralRich => vec![int(1)],
            SlopePalette::Mixed => Self::everything(),
        }
    }

    fn everything() -> Vec<Rational> {
        let mut v = SlopePalette::ContractingRich.primary();
        v.extend(SlopePalette::ExpandingRich.primary());
        v.push(int(1));
        v
    }

    /// Slope magnitudes in random order, the primary palette first with probability 3/4.
    fn draw(self, rng: &mut ChaCha8Rng) -> Vec<Rational> {
        let mut primary = self.primary();
        let mut rest = Self::everything();
        primary.shuffle(rng);
        rest.shuffle(rng);
        if rng.gen_bool(0.75) {
            primary.extend(rest);
            primary
        } else {
            rest
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub max_pieces: usize,
    pub denominator_bound: u32,
    pub discontinuity_bias: f64,
    pub slope_palette: SlopePalette,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 1,
            max_pieces: 4,
            denominator_bound: 8,
            discontinuity_bias: 0.3,
            slope_palette: SlopePalette::Mixed,
        }
    }
}

const REJECTION_BUDGET: usize = 10_000;

fn grid_point(rng: &mut ChaCha8Rng, bound: u32, open: bool) -> Rational {
    let q = rng.gen_range(1..=bound.max(1)) as i64;
    let p = if open {
        if q == 1 {
            return rat(1, 2);
        }
        rng.gen_range(1..q)
    } else {
        rng.gen_range(0..=q)
    };
    rat(p, q)
}

/// A well-behaved map on `[0, 1]` drawn from `cfg`; deterministic in the seed.
pub fn random_map(cfg: &GeneratorConfig) -> Result<PiecewiseMap> {
    if cfg.max_pieces == 0 || cfg.denominator_bound == 0 || !(0.0..=1.0).contains(&cfg.discontinuity_bias) {
        return Err(Error::Invalid("generator configuration out of range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..REJECTION_BUDGET {
        if let Some(f) = attempt(cfg, &mut rng) {
            return Ok(f);
        }
    }
    Err(Error::RejectionBudget(REJECTION_BUDGET))
}

fn attempt(cfg: &GeneratorConfig, rng: &mut ChaCha8Rng) -> Option<PiecewiseMap> {
    let (zero, one) = (int(0), int(1));
    let k = rng.gen_range(1..=cfg.max_pieces);
    let mut cuts: Vec<Rational> = (0..k - 1).map(|_| grid_point(rng, cfg.denominator_bound, true)).collect();
    cuts.sort();
    cuts.dedup();
    if cuts.len() != k - 1 {
        return None;
    }
    let mut bounds = vec![zero.clone()];
    bounds.extend(cuts);
    bounds.push(one.clone());

    let mut pieces: Vec<AffinePiece> = Vec::new();
    for seg in bounds.windows(2) {
        let (l, r) = (&seg[0], &seg[1]);
        let prev: Option<(Rational, Rational)> = pieces.last().map(|p| (p.at(&p.right), p.slope.clone()));
        let jump = prev.is_some() && rng.gen_bool(cfg.discontinuity_bias);
        let start = match (&prev, jump) {
            (Some((end, _)), false) => end.clone(),
            _ => grid_point(rng, cfg.denominator_bound, false),
        };
        if let (Some((end, _)), true) = (&prev, jump) {
            if &start == end {
                return None;
            }
        }
        let mut chosen = None;
        for m in cfg.slope_palette.draw(rng) {
            let s = if rng.gen_bool(0.5) { m } else { -m };
            if let (Some((_, ps)), false) = (&prev, jump) {
                if ps == &s {
                    continue;
                }
            }
            let end = &start + &s * (r - l);
            if end >= zero && end <= one {
                chosen = Some(s);
                break;
            }
        }
        let s = chosen?;
        let intercept = &start - &s * l;
        pieces.push(AffinePiece::new(l.clone(), r.clone(), s, intercept));
    }
    let f = PiecewiseMap::new(zero, one, pieces).ok()?;
    (f.pieces().len() == k).then_some(f)
}

/// Seed of the `i`-th corpus member for a property salt.
pub fn member_seed(seed: u64, salt: u64, i: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.rotate_left(17));
    rng.set_stream(i as u64);
    rng.gen()
}

/// Corpus member `i`: palette, bias and piece count vary with the index.
pub fn corpus_config(base: &GeneratorConfig, salt: u64, i: usize) -> GeneratorConfig {
    let seed = member_seed(base.seed, salt, i);
    GeneratorConfig {
        seed,
        max_pieces: base.max_pieces,
        denominator_bound: base.denominator_bound,
        discontinuity_bias: match i % 3 {
            0 => 0.0,
            1 => base.discontinuity_bias,
            _ => 1.0,
        },
        slope_palette: SlopePalette::ALL[(i / 3) % 4],
    }
}

pub fn random_point(seed: u64, bound: u32) -> Rational {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    grid_point(&mut rng, bound, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_contract() {
        for seed in 0..40 {
            let cfg = GeneratorConfig { seed, max_pieces: 4, discontinuity_bias: 0.0, ..Default::default() };
            let f = random_map(&cfg).unwrap();
            assert!(f.special_points().d.is_empty());
            assert_eq!(random_map(&cfg).unwrap().to_text(), f.to_text());
            let cfg = GeneratorConfig { seed, discontinuity_bias: 1.0, ..Default::default() };
            let f = random_map(&cfg).unwrap();
            assert_eq!(f.special_points().d.len(), f.pieces().len() - 1);
            for p in f.pieces() {
                assert!(p.right.denom() <= &8.into());
            }
        }
        let bad = GeneratorConfig { discontinuity_bias: 2.0, ..Default::default() };
        assert!(random_map(&bad).is_err());
    }
}
