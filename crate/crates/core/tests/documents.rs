use openimage_core::covers::genus_of_quotient;
use openimage_core::io::{bundled, digest, parse_spec, Report, BUNDLED};
use openimage_core::Error;

fn paths(text: &str) -> Vec<String> {
    match parse_spec(text) {
        Err(Error::Validation(errs)) => errs.into_iter().map(|e| e.path).collect(),
        other => panic!("expected validation errors, got {other:?}"),
    }
}

#[test]
fn every_bundled_document_builds() {
    for (name, text) in BUNDLED {
        let d = parse_spec(text).unwrap();
        let t = d.tower(Some(1), None).unwrap();
        assert_eq!(t.max_level(), 1, "{name}");
        assert_eq!(digest(text), digest(text));
    }
}

#[test]
fn validation_reports_field_paths() {
    let bad_matrix = r#"{"kind": "group", "ell": 3, "rank": 2, "level": 1,
        "generators": [[[1, 0], [0, 1]], [[1, 1], [1, 1]], [[1, 0]]]}"#;
    assert_eq!(paths(bad_matrix), vec!["generators[1]", "generators[2]"]);
    let bad_prime = r#"{"kind": "tower", "ell": 4, "rank": 1, "level": 0, "generators": []}"#;
    assert_eq!(paths(bad_prime), vec!["ell", "level", "generators"]);
    let bad_cover = r#"{"kind": "cover", "ell": 3, "rank": 1, "level": 1, "generators": [[[2]]],
        "cover": {"p": 3, "base_genus": 0, "subgroup": "X", "punctures": [{"inertia": [[[0]]]}]}}"#;
    assert_eq!(paths(bad_cover), vec!["cover.p", "cover.subgroup", "cover.punctures[0].inertia[0]"]);
}

#[test]
fn unknown_fields_are_parse_errors() {
    let text = "{\"kind\": \"group\", \"ell\": 3, \"rank\": 1, \"level\": 1,\n \"generators\": [[[2]]], \"extra\": 1}";
    assert!(matches!(parse_spec(text), Err(Error::Parse { line: 2, .. })));
}

#[test]
fn z3_cover_is_elliptic() {
    let d = parse_spec(bundled("cover_z3").unwrap()).unwrap();
    let t = d.tower(None, None).unwrap();
    let g = t.level(1).unwrap();
    let spec = d.cover_at(g).unwrap();
    assert_eq!(genus_of_quotient(&spec, &g.trivial()).unwrap().genus, 1);
    assert_eq!(genus_of_quotient(&spec, &g.whole()).unwrap().genus, 0);
}

#[test]
fn report_header_carries_digest() {
    let text = bundled("borel3").unwrap();
    let r = Report::new("ratio", &digest(text), 4, &["n", "num", "den"]);
    let csv = r.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# openimage "));
    assert_eq!(lines[1], format!("# spec sha256 {}", digest(text)));
    assert_eq!(lines[2..], ["# level 4", "n,num,den"]);
}
