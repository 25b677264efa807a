//! Bundled model files, addressable on the command line as `@name`.

pub const FIXTURES: [(&str, &str); 5] = [
    ("q1", include_str!("../../fixtures/q1.model")),
    ("q2", include_str!("../../fixtures/q2.model")),
    ("sphere", include_str!("../../fixtures/sphere.model")),
    ("twin-sphere", include_str!("../../fixtures/twin-sphere.model")),
    ("q1-cubic", include_str!("../../fixtures/q1-cubic.model")),
];

pub fn fixture(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parse_model, HermitianModel};

    #[test]
    fn bundled_files_match_constructors() {
        assert_eq!(parse_model(fixture("q1").unwrap()).unwrap(), HermitianModel::q1());
        assert_eq!(parse_model(fixture("q2").unwrap()).unwrap(), HermitianModel::q2());
        assert_eq!(parse_model(fixture("sphere").unwrap()).unwrap(), HermitianModel::sphere());
        assert_eq!(parse_model(fixture("twin-sphere").unwrap()).unwrap(), HermitianModel::twin_sphere());
        assert!(!parse_model(fixture("q1-cubic").unwrap()).unwrap().is_quadric());
    }
}
