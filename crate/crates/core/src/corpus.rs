//! Scenarios shipped with the binary.

pub const BUNDLED: &[(&str, &str)] = &[
    (
        "tracial_double_commutator",
        include_str!("../scenarios/tracial_double_commutator.json"),
    ),
    (
        "gibbs_n2_hermitian_x",
        include_str!("../scenarios/gibbs_n2_hermitian_x.json"),
    ),
    (
        "gibbs_n3_degenerate_pair",
        include_str!("../scenarios/gibbs_n3_degenerate_pair.json"),
    ),
    ("balanced_pair_n3", include_str!("../scenarios/balanced_pair_n3.json")),
    (
        "unbalanced_ginibre_n2",
        include_str!("../scenarios/unbalanced_ginibre_n2.json"),
    ),
    ("cauchy_kernel_n2", include_str!("../scenarios/cauchy_kernel_n2.json")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}
