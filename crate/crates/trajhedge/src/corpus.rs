//! The bundled example documents.

/// `(file name, contents)` of every bundled document.
pub const FILES: &[(&str, &str)] = &[
    (
        "no_martingale_measure.tree",
        include_str!("../corpus/no_martingale_measure.tree"),
    ),
    (
        "no_martingale_measure.payoff",
        include_str!("../corpus/no_martingale_measure.payoff"),
    ),
    (
        "no_martingale_measure.process",
        include_str!("../corpus/no_martingale_measure.process"),
    ),
    (
        "point_mass_variant.tree",
        include_str!("../corpus/point_mass_variant.tree"),
    ),
    (
        "point_mass_variant_zero.payoff",
        include_str!("../corpus/point_mass_variant_zero.payoff"),
    ),
    (
        "point_mass_variant_down.payoff",
        include_str!("../corpus/point_mass_variant_down.payoff"),
    ),
    (
        "unbounded_constancy.tree",
        include_str!("../corpus/unbounded_constancy.tree"),
    ),
    ("l_failure.tree", include_str!("../corpus/l_failure.tree")),
    ("l_failure.payoff", include_str!("../corpus/l_failure.payoff")),
    (
        "l_failure_singleton.payoff",
        include_str!("../corpus/l_failure_singleton.payoff"),
    ),
    ("l_failure.process", include_str!("../corpus/l_failure.process")),
];

/// Contents of a bundled document.
///
/// # Panics
/// Panics if `name` is not bundled.
pub fn file(name: &str) -> &'static str {
    FILES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, c)| *c)
        .unwrap_or_else(|| panic!("no bundled document `{name}`"))
}
