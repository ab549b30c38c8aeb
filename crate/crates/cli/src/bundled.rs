/// Scenarios shipped inside the binary, addressable by name.
pub const SCENARIOS: &[(&str, &str)] = &[
    ("chsh", include_str!("../scenarios/chsh.toml")),
    (
        "daylight-saving",
        include_str!("../scenarios/daylight-saving.toml"),
    ),
    (
        "empty-traffic",
        include_str!("../scenarios/empty-traffic.toml"),
    ),
    ("fito-flip", include_str!("../scenarios/fito-flip.toml")),
    (
        "forbidden-zone",
        include_str!("../scenarios/forbidden-zone.toml"),
    ),
    ("gps-rates", include_str!("../scenarios/gps-rates.toml")),
    ("leap-smear", include_str!("../scenarios/leap-smear.toml")),
    (
        "ptp-asymmetry",
        include_str!("../scenarios/ptp-asymmetry.toml"),
    ),
    ("single-node", include_str!("../scenarios/single-node.toml")),
    ("symmetric", include_str!("../scenarios/symmetric.toml")),
];

pub fn lookup(name: &str) -> Option<&'static str> {
    SCENARIOS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}
