use meanmap::spec_file::{IntervalSpec, MappingSpecFile, MeanEntry};
use meanmap::{fixtures, parse_spec};
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = MappingSpecFile> {
    (1usize..6).prop_flat_map(|p| {
        let mean = (-3i32..=3, 1usize..4).prop_map(|(o, arity)| MeanEntry {
            order: f64::from(o) * 0.5,
            arity,
        });
        prop::collection::vec(mean, p).prop_flat_map(move |means| {
            let rows: Vec<_> = means
                .iter()
                .map(|m| prop::collection::vec(1..=p as i64, m.arity))
                .collect();
            (Just(means), rows).prop_map(move |(means, alpha)| MappingSpecFile {
                p,
                interval: IntervalSpec::default(),
                means,
                alpha,
            })
        })
    })
}

proptest! {
    #[test]
    fn serialize_then_parse_is_identity(spec in spec_strategy()) {
        let text = spec.to_json();
        let back = MappingSpecFile::from_json(&text).unwrap();
        prop_assert_eq!(&back, &spec);
        let loaded = parse_spec(&text).unwrap();
        prop_assert_eq!(loaded.mapping.p(), spec.p);
        prop_assert_eq!(loaded.mapping.alpha().to_one_based().len(), spec.p);
    }
}

#[test]
fn fixtures_round_trip() {
    for name in fixtures::names() {
        let spec = MappingSpecFile::from_json(fixtures::get(name).unwrap()).unwrap();
        assert_eq!(MappingSpecFile::from_json(&spec.to_json()).unwrap(), spec, "{name}");
    }
}

#[test]
fn aliases_normalize_to_power_form() {
    let text = r#"{"p":1,"means":[{"kind":"geometric","arity":2}],"alpha":[[1,1]]}"#;
    let spec = MappingSpecFile::from_json(text).unwrap();
    assert_eq!(spec.means[0], MeanEntry { order: 0.0, arity: 2 });
    assert!(spec.to_json().contains("\"power\""));
    let clash = r#"{"p":1,"means":[{"kind":"harmonic","order":2,"arity":2}],"alpha":[[1,1]]}"#;
    assert!(MappingSpecFile::from_json(clash).is_err());
}
