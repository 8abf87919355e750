//! The five bundled example mappings, reachable as `builtin:<name>`.

pub const FIXTURES: [(&str, &str); 5] = [
    ("example2", include_str!("../fixtures/example2.json")),
    ("example3", include_str!("../fixtures/example3.json")),
    ("example4", include_str!("../fixtures/example4.json")),
    ("example5", include_str!("../fixtures/example5.json")),
    ("example6", include_str!("../fixtures/example6.json")),
];

pub fn get(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".json").unwrap_or(name);
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(n, _)| *n)
}
