use crate::error::{Error, Result};
use crate::map::{PiecewiseMap, Side};
use crate::orbit::{germ_orbit, germs_at, Germ, GermOrbit, StructureGraph};
use crate::rational::Rational;

/// A germ of the source landing on a germ of the target after `k` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Landing {
    pub source: Germ,
    pub k: usize,
    pub target: Germ,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionWitness {
    pub first: Landing,
    pub second: Option<Landing>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connection {
    pub from: Rational,
    pub to: Rational,
    pub level: u8,
    pub witness: ConnectionWitness,
}

pub(crate) fn germ_orbits(f: &PiecewiseMap, s: &StructureGraph, y: &Rational) -> Result<Vec<GermOrbit>> {
    let cap = 2 * s.nodes.len() + 2;
    germs_at(f, y).iter().map(|g| germ_orbit(f, g, cap)).collect()
}

fn land(o: &GermOrbit, target: &Germ) -> Option<Landing> {
    o.first_hit(target).map(|k| Landing {
        source: o.start.clone(),
        k,
        target: target.clone(),
    })
}

/// Searches the germ orbits of `y` for landings on germs of `z` as the level requires.
pub fn connection(
    f: &PiecewiseMap,
    s: &StructureGraph,
    y: &Rational,
    z: &Rational,
    level: u8,
) -> Result<Option<Connection>> {
    for p in [y, z] {
        if !s.contains(p) {
            return Err(Error::NotInStructure(p.clone()));
        }
    }
    if !s.closed {
        return Err(Error::NotConfined(s.root.clone()));
    }
    let orbits = germ_orbits(f, s, y)?;
    Ok(connection_from(&orbits, f, y, z, level))
}

pub(crate) fn connection_from(
    orbits: &[GermOrbit],
    f: &PiecewiseMap,
    y: &Rational,
    z: &Rational,
    level: u8,
) -> Option<Connection> {
    let targets = germs_at(f, z);
    let of_side = |side: Side| orbits.iter().find(|o| o.start.side == side);
    let zg = |side: Side| Germ::new(z.clone(), side);
    let witness = match level {
        1 => orbits
            .iter()
            .flat_map(|o| targets.iter().filter_map(move |t| land(o, t)))
            .min_by_key(|l| l.k)
            .map(|first| ConnectionWitness { first, second: None }),
        2 => {
            if targets.len() < 2 {
                return None;
            }
            orbits.iter().find_map(|o| {
                let first = land(o, &zg(Side::Minus))?;
                let second = land(o, &zg(Side::Plus))?;
                Some(ConnectionWitness { first, second: Some(second) })
            })
        }
        3 | 4 => {
            let (minus, plus) = (of_side(Side::Minus)?, of_side(Side::Plus)?);
            [Side::Minus, Side::Plus].into_iter().find_map(|t| {
                let t2 = if level == 3 { t } else { t.flip() };
                let first = land(minus, &zg(t))?;
                let second = land(plus, &zg(t2))?;
                Some(ConnectionWitness { first, second: Some(second) })
            })
        }
        _ => None,
    }?;
    Some(Connection {
        from: y.clone(),
        to: z.clone(),
        level,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::parse_map;
    use crate::orbit::structure;
    use crate::rational::rat;

    #[test]
    fn shift_level_four() {
        let f = parse_map("interval 0 1\npiece 0 1/2 : 1 1/8\npiece 1/2 1 : 1 -1/8\n").unwrap();
        let s = structure(&f, &rat(1, 2), 100).unwrap();
        let c = connection(&f, &s, &rat(3, 8), &rat(1, 2), 4).unwrap().unwrap();
        assert_eq!(c.witness.first, Landing {
            source: Germ::new(rat(3, 8), Side::Minus),
            k: 1,
            target: Germ::new(rat(1, 2), Side::Minus)
        });
        assert_eq!(c.witness.second.unwrap().k, 1);
        assert!(connection(&f, &s, &rat(3, 8), &rat(1, 2), 3).unwrap().is_none());
        assert!(connection(&f, &s, &rat(1, 3), &rat(1, 2), 1).is_err());
    }

    #[test]
    fn tent_self_connection() {
        let t = parse_map("interval 0 1\npiece 0 1/2 : 3/2 0\npiece 1/2 1 : -3/2 3/2\n").unwrap();
        let s = structure(&t, &rat(3, 5), 100).unwrap();
        let c = connection(&t, &s, &rat(3, 5), &rat(3, 5), 4).unwrap().unwrap();
        assert_eq!((c.witness.first.k, c.witness.second.unwrap().k), (0, 0));
    }
}
