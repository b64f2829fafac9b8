//! Bundled problem files covering the worked examples: single edges with
//! every Dirichlet/Neumann combination, small cycles, K4 and its line graph
//! (the octahedron), magnetic potentials on C3, and the interval and loop
//! metric problems.

/// `(name, document)` pairs, names sorted.
pub const PRESETS: &[(&str, &str)] = &[
    ("c3-magnetic-2pi", include_str!("../presets/c3-magnetic-2pi.json")),
    ("c3-magnetic-pi", include_str!("../presets/c3-magnetic-pi.json")),
    ("c3-standard", include_str!("../presets/c3-standard.json")),
    ("c4-standard", include_str!("../presets/c4-standard.json")),
    ("c6-standard", include_str!("../presets/c6-standard.json")),
    ("interval-dirichlet", include_str!("../presets/interval-dirichlet.json")),
    ("interval-neumann", include_str!("../presets/interval-neumann.json")),
    ("k4-standard", include_str!("../presets/k4-standard.json")),
    ("loop-standard", include_str!("../presets/loop-standard.json")),
    ("octahedron-standard", include_str!("../presets/octahedron-standard.json")),
    ("single-edge-dd", include_str!("../presets/single-edge-dd.json")),
    ("single-edge-dn", include_str!("../presets/single-edge-dn.json")),
    ("single-edge-nn", include_str!("../presets/single-edge-nn.json")),
];

pub fn lookup(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, doc)| *doc)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}
