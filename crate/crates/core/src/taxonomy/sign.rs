//! Exact sign analysis of `h(t) - t` for piecewise-affine `h` continuous on an interval.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use crate::map::AffinePiece;
use crate::rational::{midpoint, Rational};

fn excess(p: &AffinePiece, t: &Rational) -> Rational {
    p.at(t) - t
}

fn clipped<'a>(
    pieces: &'a [AffinePiece],
    lo: &'a Rational,
    hi: &'a Rational,
) -> impl Iterator<Item = (&'a AffinePiece, Rational, Rational)> + 'a {
    pieces
        .iter()
        .filter(move |p| &p.left < hi && &p.right > lo)
        .map(move |p| (p, p.left.clone().max(lo.clone()), p.right.clone().min(hi.clone())))
}

/// Whether `h(t) - t` has strict sign `want` at every point of the open interval.
pub fn strict_everywhere(pieces: &[AffinePiece], lo: &Rational, hi: &Rational, want: Ordering) -> bool {
    if lo >= hi {
        return true;
    }
    let ok_weak = |g: &Rational| g.cmp(&Rational::zero()) == want || g.is_zero();
    for (p, l, r) in clipped(pieces, lo, hi) {
        let (gl, gr) = (excess(p, &l), excess(p, &r));
        if !ok_weak(&gl) || !ok_weak(&gr) || (gl.is_zero() && gr.is_zero()) {
            return false;
        }
        if &r < hi && excess(p, &r).cmp(&Rational::zero()) != want {
            return false;
        }
    }
    true
}

/// Some point of the open interval with `h(t) - t` of sign `want` or zero.
pub fn some_point_weak(pieces: &[AffinePiece], lo: &Rational, hi: &Rational, want: Ordering) -> Option<Rational> {
    let ok = |g: &Rational| g.cmp(&Rational::zero()) == want || g.is_zero();
    for (p, l, r) in clipped(pieces, lo, hi) {
        if &l > lo && ok(&excess(p, &l)) {
            return Some(l);
        }
        let (gl, gr) = (excess(p, &l), excess(p, &r));
        match (ok(&gl), ok(&gr)) {
            (true, true) => return Some(midpoint(&l, &r)),
            (true, false) | (false, true) => {
                let zero = zero_of(p).expect("sign change implies a zero");
                let end = if ok(&gl) { &l } else { &r };
                if &zero != end {
                    return Some(midpoint(&zero, end));
                }
            }
            (false, false) => {}
        }
    }
    None
}

/// Root of `h(t) = t` on the line through `p`, if the slope is not one.
pub fn zero_of(p: &AffinePiece) -> Option<Rational> {
    let d = &p.slope - Rational::one();
    (!d.is_zero()).then(|| -&p.intercept / d)
}

/// Fixed points of `h` in the open interval, or `None` if a whole piece is fixed.
pub fn fixed_points(pieces: &[AffinePiece], lo: &Rational, hi: &Rational) -> Option<Vec<Rational>> {
    let mut out = Vec::new();
    for (p, l, r) in clipped(pieces, lo, hi) {
        if p.is_identity() {
            return None;
        }
        if let Some(z) = zero_of(p) {
            if l <= z && z <= r && lo < &z && &z < hi {
                out.push(z);
            }
        }
    }
    out.sort();
    out.dedup();
    Some(out)
}

/// Fixed points of `h` on the closed interval, where an identity piece
/// contributes its two ends.
pub fn closed_fixed_points(pieces: &[AffinePiece], lo: &Rational, hi: &Rational) -> Vec<Rational> {
    let mut out = Vec::new();
    for (p, l, r) in clipped(pieces, lo, hi) {
        if p.is_identity() {
            out.push(l);
            out.push(r);
        } else if let Some(z) = zero_of(p) {
            if l <= z && z <= r {
                out.push(z);
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn strict_signs() {
        let p = vec![AffinePiece::new(int(0), int(1), rat(1, 2), rat(1, 4))];
        assert!(strict_everywhere(&p, &rat(1, 2), &int(1), Ordering::Less));
        assert!(strict_everywhere(&p, &int(0), &rat(1, 2), Ordering::Greater));
        assert!(!strict_everywhere(&p, &int(0), &int(1), Ordering::Greater));
        assert_eq!(fixed_points(&p, &int(0), &int(1)), Some(vec![rat(1, 2)]));
        assert!(some_point_weak(&p, &int(0), &rat(1, 2), Ordering::Less).is_none());
        let id = vec![AffinePiece::new(int(0), int(1), int(1), int(0))];
        assert!(fixed_points(&id, &int(0), &int(1)).is_none());
        assert_eq!(closed_fixed_points(&id, &int(0), &rat(1, 2)), vec![int(0), rat(1, 2)]);
        assert!(some_point_weak(&id, &int(0), &int(1), Ordering::Less).is_some());
    }
}
