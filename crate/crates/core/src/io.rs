//! Spec documents (JSON), validation, digests and CSV reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{is_prime, Rational};
use crate::covers::{explicit_filtration, CoverSpec, PunctureSpec, TowerCover};
use crate::error::{Error, FieldError, Result};
use crate::matrix::ModMatrix;
use crate::modgroup::{ModGroup, ORDER_CAP};
use crate::tower::GroupTower;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Example documents shipped with the library, by name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("borel3", include_str!("../data/borel3.json")),
    ("wild_borel3", include_str!("../data/wild_borel3.json")),
    ("procyclic3", include_str!("../data/procyclic3.json")),
    ("diagonal3", include_str!("../data/diagonal3.json")),
    ("sl2_5", include_str!("../data/sl2_5.json")),
    ("q8", include_str!("../data/q8.json")),
    ("sl2_3", include_str!("../data/sl2_3.json")),
    ("cover_z3", include_str!("../data/cover_z3.json")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

/// An integer matrix as a list of rows.
pub type IntMatrix = Vec<Vec<i64>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocumentKind {
    Group,
    Tower,
    Cover,
    Experiment,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PunctureBlock {
    pub inertia: Vec<IntMatrix>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub filtration: Vec<Vec<IntMatrix>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverBlock {
    pub p: u64,
    pub base_genus: u64,
    /// Name of the subgroup `C` in the document's `subgroups`.
    pub subgroup: String,
    pub punctures: Vec<PunctureBlock>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// The input schema shared by every subcommand.
///
/// `generators` live at level `level`. For a `tower` with a cover block the
/// puncture filtrations are given at level 1; for a `cover` document they
/// are given at level `level`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub kind: DocumentKind,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    pub ell: u32,
    pub rank: usize,
    pub level: u32,
    pub generators: Vec<IntMatrix>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub subgroups: BTreeMap<String, Vec<IntMatrix>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<Vec<IntMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentBlock>,
}

/// Parses and validates a document.
pub fn parse_spec(text: &str) -> Result<SpecDocument> {
    let doc: SpecDocument = serde_json::from_str(text)
        .map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    let errors = validate(&doc);
    if !errors.is_empty() {
        return Err(Error::Validation(errors));
    }
    Ok(doc)
}

/// Canonical text: pretty JSON with a trailing newline.
pub fn emit_spec(doc: &SpecDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

/// Hex SHA-256 of the document text.
pub fn digest(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

fn check_matrix(m: &IntMatrix, rank: usize, path: String, ell: u32, units: bool, errors: &mut Vec<FieldError>) {
    if m.len() != rank || m.iter().any(|r| r.len() != rank) {
        errors.push(FieldError { path, message: format!("expected a {rank}×{rank} matrix") });
        return;
    }
    if units && is_prime(ell as u64) {
        let det = ModMatrix::from_rows(ell, 1, m).map(|x| x.det_mod_prime());
        if det == Ok(0) {
            errors.push(FieldError { path, message: format!("matrix is not invertible modulo {ell}") });
        }
    }
}

fn check_generator_list(
    list: &[IntMatrix],
    doc: &SpecDocument,
    path: &str,
    errors: &mut Vec<FieldError>,
) {
    if list.is_empty() {
        errors.push(FieldError { path: path.to_string(), message: "at least one generator is required".into() });
    }
    for (i, m) in list.iter().enumerate() {
        check_matrix(m, doc.rank, format!("{path}[{i}]"), doc.ell, true, errors);
    }
}

/// All field-level problems of a document, with paths.
pub fn validate(doc: &SpecDocument) -> Vec<FieldError> {
    let mut errors = Vec::new();
    if !is_prime(doc.ell as u64) {
        errors.push(FieldError { path: "ell".into(), message: format!("{} is not prime", doc.ell) });
    }
    if doc.rank == 0 {
        errors.push(FieldError { path: "rank".into(), message: "rank must be positive".into() });
    }
    if doc.level == 0 {
        errors.push(FieldError { path: "level".into(), message: "level must be positive".into() });
    } else if (doc.ell as u64).checked_pow(doc.level).is_none_or(|m| m >= 1 << 31) {
        errors.push(FieldError { path: "level".into(), message: "modulus ℓ^level must be below 2^31".into() });
    }
    check_generator_list(&doc.generators, doc, "generators", &mut errors);
    for (name, gens) in &doc.subgroups {
        check_generator_list(gens, doc, &format!("subgroups.{name}"), &mut errors);
    }
    for (i, gens) in doc.points.iter().enumerate() {
        check_generator_list(gens, doc, &format!("points[{i}]"), &mut errors);
    }
    match (&doc.cover, doc.kind) {
        (Some(cover), _) => {
            if !is_prime(cover.p) {
                errors.push(FieldError { path: "cover.p".into(), message: format!("{} is not prime", cover.p) });
            }
            if cover.p == doc.ell as u64 {
                errors.push(FieldError { path: "cover.p".into(), message: "residue characteristic must differ from ℓ".into() });
            }
            if !doc.subgroups.contains_key(&cover.subgroup) {
                errors.push(FieldError {
                    path: "cover.subgroup".into(),
                    message: format!("unknown subgroup '{}'", cover.subgroup),
                });
            }
            for (i, pu) in cover.punctures.iter().enumerate() {
                check_generator_list(&pu.inertia, doc, &format!("cover.punctures[{i}].inertia"), &mut errors);
                for (j, step) in pu.filtration.iter().enumerate() {
                    let path = format!("cover.punctures[{i}].filtration[{j}]");
                    for (k, m) in step.iter().enumerate() {
                        check_matrix(m, doc.rank, format!("{path}[{k}]"), doc.ell, true, &mut errors);
                    }
                }
            }
        }
        (None, DocumentKind::Cover) => {
            errors.push(FieldError { path: "cover".into(), message: "a cover document needs a cover block".into() })
        }
        (None, _) => {}
    }
    errors
}

impl SpecDocument {
    pub fn matrices(&self, list: &[IntMatrix]) -> Result<Vec<ModMatrix>> {
        list.iter().map(|m| ModMatrix::invertible(self.ell, self.level, m)).collect()
    }

    pub fn generator_matrices(&self) -> Result<Vec<ModMatrix>> {
        self.matrices(&self.generators)
    }

    pub fn subgroup(&self, name: &str) -> Result<Vec<ModMatrix>> {
        let gens = self.subgroups.get(name).ok_or_else(|| {
            Error::Validation(vec![FieldError { path: format!("subgroups.{name}"), message: "missing".into() }])
        })?;
        self.matrices(gens)
    }

    pub fn cap(&self) -> usize {
        self.experiment.as_ref().and_then(|e| e.cap).unwrap_or(ORDER_CAP)
    }

    /// The tower, truncated to `level` when given.
    pub fn tower(&self, level: Option<u32>, cap: Option<usize>) -> Result<GroupTower> {
        let t = GroupTower::new(self.generator_matrices()?, cap.unwrap_or_else(|| self.cap()))?;
        match level {
            Some(n) if n < t.max_level() => t.truncate(n),
            Some(n) if n > t.max_level() => Err(Error::LevelOutOfRange { level: n, max: t.max_level() }),
            _ => Ok(t),
        }
    }

    pub fn punctures(&self) -> Result<Vec<PunctureSpec>> {
        let Some(cover) = &self.cover else { return Ok(Vec::new()) };
        cover
            .punctures
            .iter()
            .map(|pu| {
                Ok(PunctureSpec {
                    inertia: self.matrices(&pu.inertia)?,
                    lower: pu.filtration.iter().map(|s| self.matrices(s)).collect::<Result<_>>()?,
                })
            })
            .collect()
    }

    /// The tower cover described by the cover block.
    pub fn tower_cover<'t>(&self, tower: &'t GroupTower) -> Result<TowerCover<'t>> {
        let cover = self.cover.as_ref().ok_or_else(|| {
            Error::Validation(vec![FieldError { path: "cover".into(), message: "missing".into() }])
        })?;
        Ok(TowerCover {
            tower,
            p: cover.p,
            base_genus: cover.base_genus,
            c_gens: self.subgroup(&cover.subgroup)?,
            punctures: self.punctures()?,
        })
    }
}

impl SpecDocument {
    /// The cover block read directly at the level of `g`: every puncture
    /// filtration is explicit there.
    pub fn cover_at<'g>(&self, g: &'g ModGroup) -> Result<CoverSpec<'g, ModMatrix>> {
        let cover = self.cover.as_ref().ok_or_else(|| {
            Error::Validation(vec![FieldError { path: "cover".into(), message: "missing".into() }])
        })?;
        let filtrations = self
            .punctures()?
            .iter()
            .map(|pu| explicit_filtration(g, pu, cover.p))
            .collect::<Result<Vec<_>>>()?;
        CoverSpec::new(cover.base_genus, cover.p, self.ell as u64, g, filtrations)
    }
}

/// A CSV report: `#` header lines then a header row and data rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub name: String,
    pub header: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    /// Starts a report tagged with the tool version, spec digest and level.
    pub fn new(name: &str, spec_digest: &str, level: u32, columns: &[&str]) -> Self {
        Report {
            name: name.to_string(),
            header: vec![
                format!("openimage {TOOL_VERSION}"),
                format!("spec sha256 {spec_digest}"),
                format!("level {level}"),
            ],
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.header.push(line.into());
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for h in &self.header {
            let _ = writeln!(out, "# {h}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }
}

/// `num` and `den` columns of an exact rational.
pub fn rational_cells(r: Rational) -> [String; 2] {
    [r.numer().to_string(), r.denom().to_string()]
}

/// A list inside one CSV cell, `;`-separated.
pub fn list_cell<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"kind": "group", "ell": 3, "rank": 2, "level": 2, "generators": [[[1, 0], [0, 1]]]}"#;

    #[test]
    fn minimal_group_parses() {
        let doc = parse_spec(MINIMAL).unwrap();
        assert_eq!(doc.kind, DocumentKind::Group);
        let again = parse_spec(&emit_spec(&doc)).unwrap();
        assert_eq!(again, doc);
        assert_eq!(emit_spec(&again), emit_spec(&doc));
    }

    #[test]
    fn parse_errors_have_positions() {
        match parse_spec("{\n  \"kind\": \"group\",\n  \"ell\": 3,\n  oops\n}") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (4, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ell_equal_to_p_is_rejected() {
        let text = r#"{"kind": "cover", "ell": 3, "rank": 1, "level": 1, "generators": [[[2]]],
            "subgroups": {"C": [[[1]]]},
            "cover": {"p": 3, "base_genus": 0, "subgroup": "C", "punctures": []}}"#;
        match parse_spec(text) {
            Err(Error::Validation(errs)) => assert!(errs.iter().any(|e| e.path == "cover.p")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bundled_documents_round_trip() {
        for (name, text) in BUNDLED {
            let doc = parse_spec(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(&emit_spec(&doc), text, "{name}");
        }
    }

    #[test]
    fn report_format() {
        let mut r = Report::new("t", "abc", 2, &["a", "b"]);
        r.push(vec!["1".into(), list_cell([1, 2])]);
        assert_eq!(r.to_csv(), format!("# openimage {TOOL_VERSION}\n# spec sha256 abc\n# level 2\na,b\n1,1;2\n"));
        assert_eq!(digest("").len(), 64);
    }
}
