use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::rational::{midpoint, Rational};

use super::{AffinePiece, Limits, PiecewiseMap};

impl PiecewiseMap {
    /// `self ∘ inner` with default limits.
    pub fn compose(&self, inner: &PiecewiseMap) -> Result<PiecewiseMap> {
        self.compose_with(inner, &Limits::default())
    }

    pub fn compose_with(&self, inner: &PiecewiseMap, limits: &Limits) -> Result<PiecewiseMap> {
        if self.a != inner.a || self.b != inner.b {
            return Err(Error::IntervalMismatch);
        }
        let cuts = self.breakpoints();
        let mut out = Vec::new();
        for p in &inner.pieces {
            let (lo, hi) = p.image();
            let start = cuts.partition_point(|c| c <= &lo);
            let end = cuts.partition_point(|c| c < &hi);
            let mut xs: Vec<Rational> = cuts[start..end]
                .iter()
                .map(|y| (y - &p.intercept) / &p.slope)
                .collect();
            xs.sort();
            let mut bounds = Vec::with_capacity(xs.len() + 2);
            bounds.push(p.left.clone());
            bounds.extend(xs);
            bounds.push(p.right.clone());
            for seg in bounds.windows(2) {
                let ym = p.at(&midpoint(&seg[0], &seg[1]));
                let q = &self.pieces[self.pieces.partition_point(|pc| pc.right <= ym)];
                out.push(AffinePiece::new(
                    seg[0].clone(),
                    seg[1].clone(),
                    &q.slope * &p.slope,
                    &q.slope * &p.intercept + &q.intercept,
                ));
                if out.len() > limits.max_pieces {
                    return Err(Error::PieceLimit(limits.max_pieces));
                }
            }
        }
        Ok(PiecewiseMap::from_valid(self.a.clone(), self.b.clone(), out))
    }

    /// `f^n` with default limits.
    pub fn iterate(&self, n: usize) -> Result<PiecewiseMap> {
        self.iterate_with(n, &Limits::default())
    }

    pub fn iterate_with(&self, n: usize, limits: &Limits) -> Result<PiecewiseMap> {
        Ok(self.powers(n, limits)?.pop().expect("n >= 1"))
    }

    /// `[f, f^2, ..., f^n]`.
    pub fn powers(&self, n: usize, limits: &Limits) -> Result<Vec<PiecewiseMap>> {
        if n == 0 || n > limits.max_power {
            return Err(Error::PowerLimit {
                power: n,
                limit: limits.max_power,
            });
        }
        let mut out = vec![self.clone()];
        for _ in 1..n {
            let next = self.compose_with(out.last().unwrap(), limits)?;
            out.push(next);
        }
        Ok(out)
    }

    /// `M(n)`: points whose first `n` iterates meet `S(f)`.
    pub fn m_set(&self, n: usize) -> Result<BTreeSet<Rational>> {
        if n == 0 {
            return Err(Error::Invalid("m_set needs n >= 1".into()));
        }
        let mut level = self.special.s.clone();
        let mut all = level.clone();
        for _ in 1..n {
            level = self.preimage_set(&level);
            all.extend(level.iter().cloned());
        }
        Ok(all)
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::{shift, tent};
    use super::*;
    use crate::map::parse_map;
    use crate::rational::{int, rat};

    fn piece(l: Rational, r: Rational, s: Rational, c: Rational) -> AffinePiece {
        AffinePiece::new(l, r, s, c)
    }

    #[test]
    fn shift_square() {
        let f = shift();
        let f2 = f.iterate(2).unwrap();
        assert_eq!(
            f2.pieces(),
            &[
                piece(int(0), rat(3, 8), int(1), rat(1, 4)),
                piece(rat(3, 8), rat(5, 8), int(1), int(0)),
                piece(rat(5, 8), int(1), int(1), rat(-1, 4)),
            ]
        );
        assert_eq!(f2.special_points().s, [rat(3, 8), rat(5, 8)].into());
        assert_eq!(f.m_set(2).unwrap(), [rat(3, 8), rat(1, 2), rat(5, 8)].into());
        assert!(!f.special_points().s.is_subset(&f2.special_points().s));
        assert_eq!(f.iterate(1).unwrap(), f);
    }

    #[test]
    fn identity_is_neutral() {
        let f = shift();
        let id = PiecewiseMap::identity(int(0), int(1)).unwrap();
        assert_eq!(id.compose(&f).unwrap(), f);
        assert_eq!(f.compose(&id).unwrap(), f);
    }

    #[test]
    fn tent_square() {
        let t = tent();
        let t2 = t.iterate(2).unwrap();
        assert_eq!(t2.breakpoints(), vec![rat(1, 3), rat(1, 2), rat(2, 3)]);
        assert!(t2.pieces().iter().all(|p| p.slope == rat(9, 4) || p.slope == rat(-9, 4)));
        assert_eq!(t2.special_points().s, [rat(1, 3), rat(1, 2), rat(2, 3)].into());
        assert_eq!(t.m_set(2).unwrap(), t2.special_points().s);
        assert_eq!(t.m_set(1).unwrap(), t.special_points().s);
    }

    #[test]
    fn guards() {
        let t = tent();
        let tight = Limits {
            max_pieces: 3,
            ..Limits::default()
        };
        assert_eq!(t.iterate_with(2, &tight), Err(Error::PieceLimit(3)));
        assert!(matches!(t.iterate(0), Err(Error::PowerLimit { .. })));
        assert!(matches!(t.iterate(17), Err(Error::PowerLimit { .. })));
        let other = parse_map("interval 0 2\npiece 0 2 : 1 0\n").unwrap();
        assert_eq!(t.compose(&other), Err(Error::IntervalMismatch));
    }
}
