use crate::error::{Error, Result};
use crate::map::{AffinePiece, PiecewiseMap};
use crate::rational::{midpoint, Rational};

use num_traits::{One, Zero};

/// Where a window edge came from: `f^step` maps it onto the special point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeOrigin {
    pub step: usize,
    pub special: Rational,
}

/// Largest `[u, v]` around `x` on which `f^j` is continuous and monotone for `j <= depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub x: Rational,
    pub u: Rational,
    pub v: Rational,
    pub u_origin: Option<EdgeOrigin>,
    pub v_origin: Option<EdgeOrigin>,
    pub depth: usize,
    /// `f^depth` restricted to `[u, v]`.
    pub pieces: Vec<AffinePiece>,
}

impl Window {
    pub fn eval(&self, t: &Rational) -> Rational {
        let i = self.pieces.partition_point(|p| &p.right < t).min(self.pieces.len() - 1);
        self.pieces[i].at(t)
    }

    pub fn increasing(&self) -> bool {
        self.pieces[0].increasing()
    }
}

fn image(pieces: &[AffinePiece]) -> (Rational, Rational) {
    let (first, last) = (&pieces[0], &pieces[pieces.len() - 1]);
    let (p, q) = (first.at(&first.left), last.at(&last.right));
    if p <= q {
        (p, q)
    } else {
        (q, p)
    }
}

fn solve(pieces: &[AffinePiece], y: &Rational) -> Rational {
    for p in pieces {
        let t = (y - &p.intercept) / &p.slope;
        if p.left <= t && t <= p.right {
            return t;
        }
    }
    unreachable!("value inside the image of a continuous monotone map")
}

fn clip(pieces: Vec<AffinePiece>, u: &Rational, v: &Rational) -> Vec<AffinePiece> {
    pieces
        .into_iter()
        .filter(|p| &p.left < v && &p.right > u)
        .map(|mut p| {
            if &p.left < u {
                p.left = u.clone();
            }
            if &p.right > v {
                p.right = v.clone();
            }
            p
        })
        .collect()
}

/// `f ∘ g` for a continuous monotone local map `g` whose open image avoids `S(f)`.
pub(crate) fn compose_local(f: &PiecewiseMap, g: &[AffinePiece]) -> Vec<AffinePiece> {
    let cuts = f.breakpoints();
    let mut out: Vec<AffinePiece> = Vec::new();
    for p in g {
        let (lo, hi) = p.image();
        let s = cuts.partition_point(|c| c <= &lo);
        let e = cuts.partition_point(|c| c < &hi);
        let mut xs: Vec<Rational> = cuts[s..e].iter().map(|y| (y - &p.intercept) / &p.slope).collect();
        xs.sort();
        let mut bounds = vec![p.left.clone()];
        bounds.extend(xs);
        bounds.push(p.right.clone());
        for seg in bounds.windows(2) {
            let ym = p.at(&midpoint(&seg[0], &seg[1]));
            let q = &f.pieces()[f.pieces().partition_point(|pc| pc.right <= ym)];
            let next = AffinePiece::new(
                seg[0].clone(),
                seg[1].clone(),
                &q.slope * &p.slope,
                &q.slope * &p.intercept + &q.intercept,
            );
            match out.last_mut() {
                Some(last) if last.slope == next.slope && last.intercept == next.intercept => last.right = next.right,
                _ => out.push(next),
            }
        }
    }
    out
}

pub fn monotone_window(f: &PiecewiseMap, x: &Rational, depth: usize) -> Result<Window> {
    if !f.in_domain(x) {
        return Err(Error::OutOfDomain(x.clone()));
    }
    let s = &f.special_points().s;
    let (mut u, mut v) = (f.a().clone(), f.b().clone());
    let (mut u_origin, mut v_origin) = (None, None);
    let mut g = vec![AffinePiece::new(u.clone(), v.clone(), Rational::one(), Rational::zero())];
    for j in 0..depth {
        let (lo, hi) = image(&g);
        for w in s.range(lo.clone()..=hi.clone()).filter(|w| &lo < *w && *w < &hi) {
            let t = solve(&g, w);
            if &t == x {
                return Err(Error::DegenerateWindow(x.clone()));
            }
            let origin = Some(EdgeOrigin { step: j, special: w.clone() });
            if &t < x && t > u {
                u = t;
                u_origin = origin;
            } else if &t > x && t < v {
                v = t;
                v_origin = origin;
            }
        }
        g = compose_local(f, &clip(g, &u, &v));
    }
    Ok(Window {
        x: x.clone(),
        u: u.clone(),
        v: v.clone(),
        u_origin,
        v_origin,
        depth,
        pieces: clip(g, &u, &v),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::parse_map;
    use crate::rational::{int, rat};

    #[test]
    fn windows() {
        let tent = parse_map("interval 0 1\npiece 0 1/2 : 3/2 0\npiece 1/2 1 : -3/2 3/2\n").unwrap();
        let w = monotone_window(&tent, &rat(3, 5), 2).unwrap();
        assert_eq!((w.u.clone(), w.v.clone()), (rat(1, 2), rat(2, 3)));
        assert_eq!(w.pieces, vec![AffinePiece::new(rat(1, 2), rat(2, 3), rat(9, 4), rat(-3, 4))]);
        assert_eq!(w.v_origin, Some(EdgeOrigin { step: 1, special: rat(1, 2) }));
        let c = parse_map("interval 0 1\npiece 0 1 : 1/2 1/4\n").unwrap();
        let w = monotone_window(&c, &rat(1, 2), 2).unwrap();
        assert_eq!((w.u, w.v, w.u_origin), (int(0), int(1), None));
        let shift = parse_map("interval 0 1\npiece 0 1/2 : 1 1/8\npiece 1/2 1 : 1 -1/8\n").unwrap();
        let w = monotone_window(&shift, &rat(7, 16), 4).unwrap();
        assert_eq!((w.u.clone(), w.v.clone()), (rat(3, 8), rat(1, 2)));
        let m4 = shift.m_set(4).unwrap();
        assert!(m4.contains(&w.u) && m4.contains(&w.v));
        assert_eq!(monotone_window(&tent, &rat(1, 2), 1), Err(Error::DegenerateWindow(rat(1, 2))));
        let hat = parse_map("interval 0 1\npiece 0 1/2 : 1/2 3/8\npiece 1/2 1 : -1/2 7/8\n").unwrap();
        let w = monotone_window(&hat, &rat(7, 12), 2).unwrap();
        assert_eq!((w.u.clone(), w.v.clone()), (rat(1, 2), rat(3, 4)));
        assert_eq!(w.pieces, vec![AffinePiece::new(rat(1, 2), rat(3, 4), rat(1, 4), rat(7, 16))]);
    }
}
