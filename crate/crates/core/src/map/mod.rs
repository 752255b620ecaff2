//! Piecewise-affine self-maps of a closed interval.

mod algebra;
mod parse;

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Escape, Result};
use crate::rational::Rational;

pub use parse::parse_map;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Minus => "minus",
            Side::Plus => "plus",
        }
    }

    pub fn sign(self) -> char {
        match self {
            Side::Minus => '-',
            Side::Plus => '+',
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Side> {
        match s {
            "minus" | "-" => Ok(Side::Minus),
            "plus" | "+" => Ok(Side::Plus),
            _ => Err(Error::Invalid(format!("unknown side '{s}'"))),
        }
    }
}

/// Computation guards shared by the iterating operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    pub max_pieces: usize,
    pub max_power: usize,
    pub max_variant_bits: usize,
    pub denominator_bits: u64,
    pub structure_nodes: usize,
    pub orbit_steps: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_pieces: 1_000_000,
            max_power: 16,
            max_variant_bits: 20,
            denominator_bits: 4096,
            structure_nodes: 10_000,
            orbit_steps: 10_000,
        }
    }
}

/// `t -> slope * t + intercept` on the open interval `(left, right)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffinePiece {
    pub left: Rational,
    pub right: Rational,
    pub slope: Rational,
    pub intercept: Rational,
}

impl AffinePiece {
    pub fn new(left: Rational, right: Rational, slope: Rational, intercept: Rational) -> Self {
        AffinePiece {
            left,
            right,
            slope,
            intercept,
        }
    }

    pub fn at(&self, t: &Rational) -> Rational {
        &self.slope * t + &self.intercept
    }

    pub fn increasing(&self) -> bool {
        self.slope.is_positive()
    }

    /// Closure of the image as `(low, high)`.
    pub fn image(&self) -> (Rational, Rational) {
        let (p, q) = (self.at(&self.left), self.at(&self.right));
        if p <= q {
            (p, q)
        } else {
            (q, p)
        }
    }

    pub fn contains(&self, t: &Rational) -> bool {
        &self.left < t && t < &self.right
    }

    pub fn is_identity(&self) -> bool {
        self.slope.is_one() && self.intercept.is_zero()
    }

    fn collinear(&self, other: &AffinePiece) -> bool {
        self.slope == other.slope && self.intercept == other.intercept
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpecialPoints {
    pub s: BTreeSet<Rational>,
    pub t: BTreeSet<Rational>,
    pub d: BTreeSet<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LateralValue {
    pub point: Rational,
    pub side: Side,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseMap {
    a: Rational,
    b: Rational,
    pieces: Vec<AffinePiece>,
    special: SpecialPoints,
}

impl PiecewiseMap {
    /// Validates and normalizes a piece list.
    pub fn new(a: Rational, b: Rational, pieces: Vec<AffinePiece>) -> Result<Self> {
        if a >= b {
            return Err(Error::EmptyInterval);
        }
        let (first, last) = match (pieces.first(), pieces.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(Error::Coverage("no pieces".into())),
        };
        if first.left != a {
            return Err(Error::Coverage(format!("first piece starts at {}, not {a}", first.left)));
        }
        if last.right != b {
            return Err(Error::Coverage(format!("last piece ends at {}, not {b}", last.right)));
        }
        for (i, p) in pieces.iter().enumerate() {
            if p.left >= p.right {
                return Err(Error::Coverage(format!("empty piece ({}, {})", p.left, p.right)));
            }
            if p.slope.is_zero() {
                return Err(Error::ZeroSlope { line: i + 1 });
            }
            let (lo, hi) = p.image();
            if lo < a || hi > b {
                return Err(Error::ImageEscapes(Box::new(Escape {
                    left: p.left.clone(),
                    right: p.right.clone(),
                    a: a.clone(),
                    b: b.clone(),
                })));
            }
        }
        for w in pieces.windows(2) {
            if w[0].right != w[1].left {
                return Err(Error::Coverage(format!(
                    "gap or overlap between {} and {}",
                    w[0].right, w[1].left
                )));
            }
        }
        Ok(Self::from_valid(a, b, pieces))
    }

    /// Builds from pieces already known to be valid, merging collinear neighbours.
    pub(crate) fn from_valid(a: Rational, b: Rational, pieces: Vec<AffinePiece>) -> Self {
        let mut merged: Vec<AffinePiece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match merged.last_mut() {
                Some(last) if last.collinear(&p) => last.right = p.right,
                _ => merged.push(p),
            }
        }
        let special = compute_special(&merged);
        PiecewiseMap {
            a,
            b,
            pieces: merged,
            special,
        }
    }

    pub fn identity(a: Rational, b: Rational) -> Result<Self> {
        let piece = AffinePiece::new(a.clone(), b.clone(), Rational::one(), Rational::zero());
        Self::new(a, b, vec![piece])
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    /// Interior piece boundaries, special or not.
    pub fn breakpoints(&self) -> Vec<Rational> {
        self.pieces[1..].iter().map(|p| p.left.clone()).collect()
    }

    pub fn special_points(&self) -> &SpecialPoints {
        &self.special
    }

    pub fn is_continuous(&self) -> bool {
        self.special.d.is_empty()
    }

    pub fn in_domain(&self, x: &Rational) -> bool {
        &self.a <= x && x <= &self.b
    }

    fn check_domain(&self, x: &Rational) -> Result<()> {
        if self.in_domain(x) {
            Ok(())
        } else {
            Err(Error::OutOfDomain(x.clone()))
        }
    }

    /// The piece whose formula gives the one-sided limit at `p`.
    pub fn lateral_piece(&self, p: &Rational, side: Side) -> Result<&AffinePiece> {
        self.check_domain(p)?;
        let idx = match side {
            Side::Plus => {
                if p >= &self.b {
                    return Err(Error::NoSide { point: p.clone(), side: "plus" });
                }
                self.pieces.partition_point(|pc| &pc.right <= p)
            }
            Side::Minus => {
                if p <= &self.a {
                    return Err(Error::NoSide { point: p.clone(), side: "minus" });
                }
                self.pieces.partition_point(|pc| &pc.right < p)
            }
        };
        Ok(&self.pieces[idx])
    }

    pub fn lateral_limit(&self, p: &Rational, side: Side) -> Result<Rational> {
        Ok(self.lateral_piece(p, side)?.at(p))
    }

    pub fn lateral_value(&self, p: &Rational, side: Side) -> Result<LateralValue> {
        Ok(LateralValue {
            point: p.clone(),
            side,
            value: self.lateral_limit(p, side)?,
        })
    }

    /// `f(x)`, or `None` at a discontinuity where `f` is left undefined.
    pub fn eval(&self, x: &Rational) -> Result<Option<Rational>> {
        self.check_domain(x)?;
        if x == &self.b {
            return self.lateral_limit(x, Side::Minus).map(Some);
        }
        if self.special.d.contains(x) {
            return Ok(None);
        }
        self.lateral_limit(x, Side::Plus).map(Some)
    }

    /// Index of the piece containing `x` in its open interior.
    pub fn piece_index(&self, x: &Rational) -> Option<usize> {
        let idx = self.pieces.partition_point(|pc| &pc.right <= x);
        self.pieces.get(idx).filter(|p| p.contains(x)).map(|_| idx)
    }

    /// Every `x` with `f(x) = y`; discontinuity points are never included.
    pub fn preimage(&self, y: &Rational) -> Vec<Rational> {
        let mut out = BTreeSet::new();
        for p in &self.pieces {
            let x = (y - &p.intercept) / &p.slope;
            if p.contains(&x) {
                out.insert(x);
            }
        }
        for bp in self.pieces[1..].iter().map(|p| &p.left) {
            if !self.special.d.contains(bp) && self.lateral_limit(bp, Side::Plus).ok().as_ref() == Some(y) {
                out.insert(bp.clone());
            }
        }
        for end in [&self.a, &self.b] {
            if self.eval(end).ok().flatten().as_ref() == Some(y) {
                out.insert(end.clone());
            }
        }
        out.into_iter().collect()
    }

    pub fn preimage_set(&self, ys: &BTreeSet<Rational>) -> BTreeSet<Rational> {
        ys.iter().flat_map(|y| self.preimage(y)).collect()
    }

    /// Whether `f` is continuous and monotone on the open interval `(lo, hi)`,
    /// returning the direction when it is.
    pub fn monotone_on(&self, lo: &Rational, hi: &Rational) -> Option<bool> {
        let inside = self.special.s.range(lo.clone()..=hi.clone());
        let interior = inside.filter(|w| lo < *w && *w < hi).count();
        if interior > 0 {
            return None;
        }
        let mid = crate::rational::midpoint(lo, hi);
        let piece = self.lateral_piece(&mid, Side::Plus).ok()?;
        Some(piece.increasing())
    }

    pub fn to_text(&self) -> String {
        parse::to_text(self)
    }
}

fn compute_special(pieces: &[AffinePiece]) -> SpecialPoints {
    let mut sp = SpecialPoints::default();
    for w in pieces.windows(2) {
        let point = &w[1].left;
        if w[0].at(point) != w[1].at(point) {
            sp.d.insert(point.clone());
            sp.s.insert(point.clone());
        } else if w[0].increasing() != w[1].increasing() {
            sp.t.insert(point.clone());
            sp.s.insert(point.clone());
        }
    }
    sp
}

impl fmt::Display for PiecewiseMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::rational::{int, rat};

    pub fn shift() -> PiecewiseMap {
        parse_map(
            "interval 0 1\npiece 0 1/2 : slope 1 intercept 1/8\npiece 1/2 1 : slope 1 intercept -1/8\n",
        )
        .unwrap()
    }

    pub fn tent() -> PiecewiseMap {
        parse_map("interval 0 1\npiece 0 1/2 : slope 3/2 intercept 0\npiece 1/2 1 : slope -3/2 intercept 3/2\n")
            .unwrap()
    }

    #[test]
    fn shift_eval_and_limits() {
        let f = shift();
        assert_eq!(f.eval(&rat(1, 4)).unwrap(), Some(rat(3, 8)));
        assert_eq!(f.eval(&rat(1, 2)).unwrap(), None);
        assert_eq!(f.lateral_limit(&rat(1, 2), Side::Plus).unwrap(), rat(3, 8));
        assert_eq!(f.lateral_limit(&rat(1, 2), Side::Minus).unwrap(), rat(5, 8));
        assert_eq!(f.eval(&int(0)).unwrap(), Some(rat(1, 8)));
        assert_eq!(f.eval(&int(1)).unwrap(), Some(rat(7, 8)));
        assert!(f.eval(&int(2)).is_err());
        assert!(f.lateral_limit(&int(1), Side::Plus).is_err());
        assert!(f.lateral_limit(&int(0), Side::Minus).is_err());
    }

    #[test]
    fn special_points_are_semantic() {
        let f = shift();
        let sp = f.special_points();
        assert_eq!(sp.s, [rat(1, 2)].into());
        assert_eq!(sp.d, [rat(1, 2)].into());
        assert!(sp.t.is_empty());
        let t = tent();
        assert_eq!(t.special_points().t, [rat(1, 2)].into());
        assert!(t.special_points().d.is_empty());
        assert_eq!(t.lateral_limit(&rat(1, 2), Side::Minus).unwrap(), rat(3, 4));
        assert_eq!(t.lateral_limit(&rat(1, 2), Side::Plus).unwrap(), rat(3, 4));
        // Non-collinear breakpoint with matching limits and direction.
        let g = parse_map("interval 0 1\npiece 0 1/2 : slope 1/2 intercept 0\npiece 1/2 1 : slope 3/2 intercept -1/2\n")
            .unwrap();
        assert_eq!(g.breakpoints(), vec![rat(1, 2)]);
        assert!(g.special_points().s.is_empty());
        assert_eq!(g.eval(&rat(1, 2)).unwrap(), Some(rat(1, 4)));
    }

    #[test]
    fn preimages() {
        assert_eq!(shift().preimage(&rat(1, 2)), vec![rat(3, 8), rat(5, 8)]);
        assert_eq!(tent().preimage(&rat(3, 4)), vec![rat(1, 2)]);
        let id = PiecewiseMap::identity(int(0), int(1)).unwrap();
        for q in [int(0), rat(1, 3), int(1)] {
            assert_eq!(id.preimage(&q), vec![q.clone()]);
        }
        // Discontinuity points are never preimages.
        assert_eq!(shift().preimage(&rat(3, 8)), vec![rat(1, 4)]);
    }
}
