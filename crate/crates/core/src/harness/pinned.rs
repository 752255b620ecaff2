use crate::map::{parse_map, PiecewiseMap};

/// Example maps kept under version control in `maps/`.
pub const PINNED: [(&str, &str); 7] = [
    ("shift", include_str!("../../maps/shift.map")),
    ("tent", include_str!("../../maps/tent.map")),
    ("hat", include_str!("../../maps/hat.map")),
    ("contraction", include_str!("../../maps/contraction.map")),
    ("semistable", include_str!("../../maps/semistable.map")),
    ("disconnected_cycle", include_str!("../../maps/disconnected_cycle.map")),
    ("decreasing_cycle", include_str!("../../maps/decreasing_cycle.map")),
];

pub fn pinned(name: &str) -> PiecewiseMap {
    let (_, text) = PINNED
        .iter()
        .find(|(n, _)| *n == name)
        .unwrap_or_else(|| panic!("no pinned map named {name}"));
    parse_map(text).expect("pinned maps parse")
}

pub fn all_pinned() -> Vec<(&'static str, PiecewiseMap)> {
    PINNED.iter().map(|(n, _)| (*n, pinned(n))).collect()
}
