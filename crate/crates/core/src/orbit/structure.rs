use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::error::Result;
use crate::map::{Limits, PiecewiseMap, Side};
use crate::rational::{denominator_bits, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Continuous,
    Minus,
    Plus,
}

impl Branch {
    pub fn side(self) -> Option<Side> {
        match self {
            Branch::Continuous => None,
            Branch::Minus => Some(Side::Minus),
            Branch::Plus => Some(Side::Plus),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructureEdge {
    pub from: Rational,
    pub branch: Branch,
    pub to: Rational,
}

/// A simple cycle of the structure graph, listed from its least node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle {
    pub points: Vec<Rational>,
    /// Side taken at each discontinuity on the cycle.
    pub choices: BTreeMap<Rational, Side>,
}

impl Cycle {
    pub fn contains(&self, x: &Rational) -> bool {
        self.points.contains(x)
    }

    pub fn point_set(&self) -> BTreeSet<Rational> {
        self.points.iter().cloned().collect()
    }
}

/// The branching forward orbit of `root`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureGraph {
    pub root: Rational,
    pub nodes: BTreeSet<Rational>,
    /// Discontinuities reached; each stands for the two half-points `w-` and `w+`.
    pub half_points: BTreeSet<Rational>,
    pub edges: Vec<StructureEdge>,
    pub closed: bool,
    pub truncated: bool,
    adjacency: BTreeMap<Rational, Vec<(Branch, Rational)>>,
}

impl StructureGraph {
    pub fn successors(&self, x: &Rational) -> &[(Branch, Rational)] {
        self.adjacency.get(x).map_or(&[], |v| v.as_slice())
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.nodes.contains(x)
    }

    pub fn reachable_from(&self, x: &Rational) -> BTreeSet<Rational> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![x.clone()];
        while let Some(p) = stack.pop() {
            if seen.insert(p.clone()) {
                stack.extend(self.successors(&p).iter().map(|(_, q)| q.clone()));
            }
        }
        seen
    }

    /// All simple cycles, at most `cap` of them.
    pub fn simple_cycles(&self, cap: usize) -> Vec<Cycle> {
        let mut out = Vec::new();
        for start in &self.nodes {
            let mut path = vec![start.clone()];
            let mut choices = BTreeMap::new();
            self.cycle_dfs(start, start, &mut path, &mut choices, &mut out, cap);
            if out.len() >= cap {
                break;
            }
        }
        out
    }

    fn cycle_dfs(
        &self,
        start: &Rational,
        cur: &Rational,
        path: &mut Vec<Rational>,
        choices: &mut BTreeMap<Rational, Side>,
        out: &mut Vec<Cycle>,
        cap: usize,
    ) {
        for (branch, next) in self.successors(cur) {
            if out.len() >= cap {
                return;
            }
            if let Some(side) = branch.side() {
                choices.insert(cur.clone(), side);
            }
            if next == start {
                out.push(Cycle {
                    points: path.clone(),
                    choices: choices.clone(),
                });
            } else if next > start && !path.contains(next) {
                path.push(next.clone());
                self.cycle_dfs(start, next, path, choices, out, cap);
                path.pop();
            }
            if branch.side().is_some() {
                choices.remove(cur);
            }
        }
    }
}

pub fn structure(f: &PiecewiseMap, x: &Rational, cap: usize) -> Result<StructureGraph> {
    let limits = Limits {
        structure_nodes: cap,
        ..Limits::default()
    };
    structure_with(f, x, &limits)
}

pub fn structure_with(f: &PiecewiseMap, x: &Rational, limits: &Limits) -> Result<StructureGraph> {
    f.eval(x)?;
    let d = &f.special_points().d;
    let mut nodes = BTreeSet::from([x.clone()]);
    let mut half_points = BTreeSet::new();
    let mut edges = Vec::new();
    let mut adjacency: BTreeMap<Rational, Vec<(Branch, Rational)>> = BTreeMap::new();
    let mut queue = VecDeque::from([x.clone()]);
    let mut truncated = false;
    while let Some(p) = queue.pop_front() {
        let succ = if d.contains(&p) {
            half_points.insert(p.clone());
            vec![
                (Branch::Minus, f.lateral_limit(&p, Side::Minus)?),
                (Branch::Plus, f.lateral_limit(&p, Side::Plus)?),
            ]
        } else {
            vec![(Branch::Continuous, f.eval(&p)?.expect("continuity point"))]
        };
        for (branch, q) in &succ {
            edges.push(StructureEdge {
                from: p.clone(),
                branch: *branch,
                to: q.clone(),
            });
            if nodes.insert(q.clone()) {
                if nodes.len() > limits.structure_nodes || denominator_bits(q) > limits.denominator_bits {
                    truncated = true;
                } else {
                    queue.push_back(q.clone());
                }
            }
        }
        adjacency.insert(p, succ);
        if truncated {
            break;
        }
    }
    Ok(StructureGraph {
        root: x.clone(),
        nodes,
        half_points,
        edges,
        closed: !truncated,
        truncated,
        adjacency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::parse_map;
    use crate::rational::{int, rat};

    fn shift() -> PiecewiseMap {
        parse_map("interval 0 1\npiece 0 1/2 : 1 1/8\npiece 1/2 1 : 1 -1/8\n").unwrap()
    }

    #[test]
    fn shift_structures() {
        let f = shift();
        let s = structure(&f, &rat(1, 2), 10_000).unwrap();
        assert!(s.closed);
        assert_eq!(s.nodes, [rat(3, 8), rat(1, 2), rat(5, 8)].into());
        assert_eq!(s.half_points, [rat(1, 2)].into());
        let cycles = s.simple_cycles(100);
        let sets: BTreeSet<_> = cycles.iter().map(|c| c.point_set()).collect();
        assert_eq!(sets, [[rat(3, 8), rat(1, 2)].into(), [rat(1, 2), rat(5, 8)].into()].into());
        let s = structure(&f, &rat(1, 3), 10_000).unwrap();
        assert_eq!(s.nodes, [rat(1, 3), rat(11, 24), rat(7, 12)].into());
        assert!(s.closed);
        let id = PiecewiseMap::identity(int(0), int(1)).unwrap();
        assert_eq!(structure(&id, &rat(1, 9), 10).unwrap().nodes, [rat(1, 9)].into());
    }

    #[test]
    fn open_structure() {
        let tent = parse_map("interval 0 1\npiece 0 1/2 : 3/2 0\npiece 1/2 1 : -3/2 3/2\n").unwrap();
        let s = structure(&tent, &rat(1, 7), 50).unwrap();
        assert!(!s.closed && s.truncated);
    }
}
