use std::cmp::Ordering;
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::sign::some_point_weak;
use super::window::{monotone_window, Window};
use crate::error::{Error, Result};
use crate::map::PiecewiseMap;
use crate::orbit::PeriodicOrbit;
use crate::rational::Rational;
use crate::Limits;

/// Reverses the trapping inequalities; used only by the mutation test.
#[doc(hidden)]
pub static FLIP_TRAPPED: AtomicBool = AtomicBool::new(false);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrappedWitness {
    pub y: Rational,
    pub z: Rational,
    pub delta: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trapped {
    pub trapped: bool,
    pub witness: Option<TrappedWitness>,
    pub window: Window,
}

pub fn is_trapped(f: &PiecewiseMap, orbit: &PeriodicOrbit) -> Result<Trapped> {
    if !orbit.continuous {
        return Err(Error::Precondition("orbit is not continuous".into()));
    }
    let t = &f.special_points().t;
    if orbit.points.iter().any(|p| t.contains(p)) {
        return Err(Error::Precondition("orbit is critical".into()));
    }
    if orbit.points.iter().any(|p| p == f.a() || p == f.b()) {
        return Err(Error::Precondition("orbit touches an endpoint".into()));
    }
    is_trapped_at(f, &orbit.points[0], orbit.period)
}

/// Trapping test at one point of a continuous period-`n` orbit.
pub fn is_trapped_at(f: &PiecewiseMap, x: &Rational, n: usize) -> Result<Trapped> {
    let limit = Limits::default().max_power;
    if 2 * n > limit {
        return Err(Error::PowerLimit { power: 2 * n, limit });
    }
    let window = monotone_window(f, x, 2 * n)?;
    let (below, above) = if FLIP_TRAPPED.load(AtomicOrdering::Relaxed) {
        (Ordering::Greater, Ordering::Less)
    } else {
        (Ordering::Less, Ordering::Greater)
    };
    let ok = |t: &Rational, want: Ordering| {
        let c = window.eval(t).cmp(t);
        c == want || c == Ordering::Equal
    };
    let nearest = window
        .pieces
        .iter()
        .flat_map(|p| [&p.left, &p.right])
        .filter(|c| *c != x)
        .map(|c| (c - x).abs())
        .min()
        .expect("window has pieces");

    let mut r = Rational::one() / Rational::from_integer(x.denom().clone());
    let two = Rational::from_integer(BigInt::from(2));
    let witness = loop {
        let room = x - &two * &r > window.u && x + &two * &r < window.v;
        if room {
            let (y, z) = (x - &r, x + &r);
            if ok(&y, below) && ok(&z, above) {
                break Some(TrappedWitness { y, z, delta: r.clone() });
            }
            if r < nearest {
                break None;
            }
        }
        r /= &two;
    };
    let witness = witness.or_else(|| {
        let y = some_point_weak(&window.pieces, &window.u, x, below)?;
        let z = some_point_weak(&window.pieces, x, &window.v, above)?;
        let delta = (&y - &window.u).min(&window.v - &z) / &two;
        Some(TrappedWitness { y, z, delta })
    });
    Ok(Trapped {
        trapped: witness.is_some(),
        witness,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::tests::{shift, tent};
    use crate::rational::rat;
    use crate::stability::tests::contraction;

    #[test]
    fn trapped_examples() {
        let t = tent();
        let o = PeriodicOrbit::continuous_through(&t, &rat(3, 5), 1).unwrap();
        let r = is_trapped(&t, &o).unwrap();
        assert_eq!(
            r.witness,
            Some(TrappedWitness { y: rat(23, 40), z: rat(5, 8), delta: rat(1, 40) })
        );
        let c = contraction();
        let o = PeriodicOrbit::continuous_through(&c, &rat(1, 2), 1).unwrap();
        assert!(!is_trapped(&c, &o).unwrap().trapped);
        let s = shift();
        let r = is_trapped_at(&s, &rat(7, 16), 2).unwrap();
        let w = r.witness.unwrap();
        assert_eq!(r.window.eval(&w.y), w.y);
        assert_eq!(r.window.eval(&w.z), w.z);
        let o = PeriodicOrbit::continuous_through(&t, &rat(1, 2), 4);
        assert!(o.is_none() || is_trapped(&t, &o.unwrap()).is_err());
    }

    #[test]
    fn fallback_search() {
        // Attracting from the left, so the only left witness is the fixed point 1/4.
        let f = crate::map::parse_map(
            "interval 0 1\npiece 0 1/4 : 1/2 1/8\npiece 1/4 5/16 : 2 -1/4\npiece 5/16 1/2 : 2/3 1/6\n\
             piece 1/2 5/8 : 2 -1/2\npiece 5/8 1 : 1/2 7/16\n",
        )
        .unwrap();
        let r = is_trapped_at(&f, &rat(1, 2), 1).unwrap();
        assert_eq!(r.witness.map(|w| w.y), Some(rat(1, 4)));
    }
}
