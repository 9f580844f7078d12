use openimage_core::cosets::{self, double_cosets, Action};
use openimage_core::covers::{compare_tilde_vs_c, genus_of_quotient, summation_identities};
use openimage_core::io::{bundled, digest, emit_spec, parse_spec, DocumentKind, Report, SpecDocument, BUNDLED};
use openimage_core::modular_system::{first_coinciding_level, modular_levels, uniform_index_bound};
use openimage_core::{lattice, lie, oracle, tower, Error, ModMatrix, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::commands::{emit, load};
use crate::{CliError, Common};

const BIG_CAP: usize = 1_000_000;

struct Checks {
    report: Report,
    failed: usize,
}

impl Checks {
    fn record(&mut self, example: &str, check: &str, outcome: Result<String>) {
        let (status, detail) = match outcome {
            Ok(d) => ("pass", d),
            Err(e) => {
                self.failed += 1;
                ("fail", e.to_string())
            }
        };
        self.report.push(vec![example.into(), check.into(), status.into(), detail.replace(',', ";")]);
    }
}

fn expect(ok: bool, detail: String) -> Result<String> {
    if ok {
        Ok(detail)
    } else {
        Err(Error::IdentityViolation(detail))
    }
}

fn round_trip(text: &str) -> Result<String> {
    let doc = parse_spec(text)?;
    expect(emit_spec(&doc) == text, "re-emission is byte-identical".into())
}

fn wild_tower(doc: &SpecDocument) -> Result<String> {
    let t = doc.tower(None, Some(BIG_CAP))?;
    let tc = doc.tower_cover(&t)?;
    let (_, series) = tc.genus_series()?;
    for n in 1..=t.max_level() {
        let (spec, c) = tc.level_spec(n)?;
        let cmp = compare_tilde_vs_c(&spec, &c)?;
        if !cmp.consistent_with_base {
            return Err(Error::IdentityViolation(format!("level {n}: tilde comparison inconsistent")));
        }
        for i in 0..spec.punctures.len() {
            summation_identities(&spec, &c, i)?;
        }
    }
    expect(
        series.genus_strictly_increasing && series.monotone,
        format!("genera {:?}", series.genera),
    )
}

fn ratio(doc: &SpecDocument) -> Result<String> {
    let t = doc.tower(None, Some(BIG_CAP))?;
    let s = cosets::ratio_series(&t, &doc.subgroup("C")?, &doc.subgroup("I")?)?;
    let last = s.rows.last().unwrap();
    expect(s.stabilized && s.matches_target, format!("ratio {} target {}", last.ratio, last.target))
}

fn modsys(doc: &SpecDocument, level: u32, up_to: u32) -> Result<String> {
    let t = doc.tower(Some(level), None)?;
    let levels = modular_levels(&t, up_to)?;
    let first = first_coinciding_level(&levels);
    expect(first.is_some(), format!("congruence description from n = {first:?}"))
}

fn refinement(doc: &SpecDocument, coarse: u32, fine: u32) -> Result<String> {
    let points: Vec<Vec<ModMatrix>> = doc.points.iter().map(|p| doc.matrices(p)).collect::<Result<_>>()?;
    let classify = |n: u32| {
        let t = doc.tower(Some(n), Some(BIG_CAP))?;
        let pts: Vec<Vec<ModMatrix>> = points.iter().map(|p| tower::reduce_all(p, n)).collect();
        uniform_index_bound(&t, &pts)
    };
    let (a, b) = (classify(coarse)?, classify(fine)?);
    let flips = a.points.iter().zip(&b.points).filter(|(x, y)| x.is_generic() && !y.is_generic()).count();
    expect(flips == 0, format!("bound {} at N={coarse}; {} at N={fine}", a.bound, b.bound))
}

fn frattini(doc: &SpecDocument) -> Result<String> {
    let t = doc.tower(None, None)?;
    let g = t.level(t.max_level())?;
    let by_maximal = lattice::frattini_by_maximal(g, &g.whole(), lattice::LATTICE_CAP)?;
    let brute = oracle::brute_frattini(g)?.value;
    let mut ok = brute.len() == by_maximal.order();
    if let Some((p, _)) = openimage_core::arith::prime_power(g.order() as u64) {
        ok &= lattice::frattini_of_p_group(g, &g.whole(), p) == by_maximal;
    }
    expect(ok, format!("|Φ| = {} in a group of order {}", by_maximal.order(), g.order()))
}

fn lie_checks(doc: &SpecDocument, expect_perfect: bool) -> Result<String> {
    let t = doc.tower(None, Some(BIG_CAP))?;
    let u = doc.subgroup("U")?;
    let growth = lie::abelianization_growth(&t, &u)?;
    if expect_perfect {
        let l = lie::lie_lattice(&t, 1)?;
        expect(
            l.is_perfect_evidence() && growth.stabilized,
            format!("divisors {:?} abelianization {:?}", l.bracket_divisors, growth.orders),
        )
    } else {
        let unbounded = growth.orders.windows(2).all(|w| w[1] > w[0]);
        expect(unbounded, format!("abelianization {:?}", growth.orders))
    }
}

fn cover_genus(doc: &SpecDocument, expected: Option<i64>) -> Result<String> {
    let t = doc.tower(None, None)?;
    let g = t.level(t.max_level())?;
    let spec = doc.cover_at(g)?;
    let top = genus_of_quotient(&spec, &g.trivial())?.genus;
    let mut ok = expected.is_none_or(|e| e == top);
    if g.order() <= oracle::GENUS_BOUND {
        ok &= oracle::brute_genus(&spec, &g.trivial())?.value == top;
    }
    expect(ok, format!("genus {top}"))
}

/// Double cosets and the fiber lemma against their oracles on random
/// subgroups of small bundled groups.
fn random_sweep(seed: u64) -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut count = 0;
    for (name, level) in [("sl2_3", 1), ("borel3", 2), ("q8", 1)] {
        let doc = parse_spec(bundled(name).unwrap())?;
        let t = doc.tower(Some(level), None)?;
        let g = t.level(level)?;
        for _ in 0..10 {
            let pick = |rng: &mut ChaCha8Rng| rng.gen_range(0..g.order() as u32);
            let h = g.subgroup(&[pick(&mut rng)]);
            let c = g.subgroup(&[pick(&mut rng), pick(&mut rng)]);
            let fast: Vec<usize> = double_cosets(g, &h, &c)?.classes.iter().map(|x| x.1).collect();
            if fast != oracle::brute_double_cosets(g, &h, &c)?.value {
                return Err(Error::IdentityViolation(format!("{name}: double cosets differ from oracle")));
            }
            let n = g.normal_closure(&[pick(&mut rng)]);
            let (labels, reps) = g.left_coset_labels(&c);
            let action = Action::new(g, reps.len(), |a, y| labels[g.mul(a, reps[y as usize]) as usize])?;
            let act = |e: &ModMatrix, y: u32| labels[g.mul(g.index_of(e).unwrap(), reps[y as usize]) as usize];
            let x = rng.gen_range(0..reps.len() as u32);
            if cosets::fiber_size_lemma(g, &action, &n, x)? != oracle::brute_fiber_count(g, act, &n, x)?.value {
                return Err(Error::IdentityViolation(format!("{name}: fiber lemma differs from oracle")));
            }
            count += 1;
        }
    }
    Ok(format!("{count} random instances; seed {seed}"))
}

fn bundled_checks(checks: &mut Checks, seed: u64) -> Result<()> {
    for (name, text) in BUNDLED {
        checks.record(name, "round_trip", round_trip(text));
    }
    let doc = |name: &str| parse_spec(bundled(name).unwrap());
    checks.record("borel3", "ratio_series", ratio(&doc("borel3")?));
    checks.record("borel3", "modular_levels", modsys(&doc("borel3")?, 3, 2));
    checks.record("borel3", "index_bound_refinement", refinement(&doc("borel3")?, 3, 4));
    checks.record("diagonal3", "modular_levels", modsys(&doc("diagonal3")?, 3, 3));
    checks.record("wild_borel3", "genus_growth_and_identities", wild_tower(&doc("wild_borel3")?));
    checks.record("procyclic3", "abelianization_unbounded", lie_checks(&doc("procyclic3")?, false));
    checks.record("sl2_5", "lie_perfect_evidence", lie_checks(&doc("sl2_5")?, true));
    checks.record("q8", "frattini", frattini(&doc("q8")?));
    checks.record("sl2_3", "frattini", frattini(&doc("sl2_3")?));
    checks.record("cover_z3", "genus", cover_genus(&doc("cover_z3")?, Some(1)));
    checks.record("random", "oracle_sweep", random_sweep(seed));
    Ok(())
}

/// Checks that apply to any document of the given shape.
fn document_checks(checks: &mut Checks, doc: &SpecDocument, text: &str) {
    let name = if doc.name.is_empty() { "spec" } else { doc.name.as_str() };
    checks.record(name, "round_trip", round_trip(text));
    if doc.kind == DocumentKind::Cover {
        checks.record(name, "genus", cover_genus(doc, None));
    } else if doc.cover.is_some() {
        checks.record(name, "genus_growth_and_identities", wild_tower(doc));
    }
    if doc.subgroups.contains_key("C") && doc.subgroups.contains_key("I") {
        checks.record(name, "ratio_series", ratio(doc));
    }
}

pub fn run(c: &Common) -> std::result::Result<(), CliError> {
    let (digest_hex, level, own) = if c.spec.is_some() || c.example.is_some() {
        let loaded = load(c)?;
        let text = emit_spec(&loaded.doc);
        (loaded.digest, loaded.doc.level, Some((loaded.doc, text)))
    } else {
        let all: String = BUNDLED.iter().map(|(_, t)| *t).collect();
        let top = BUNDLED.iter().filter_map(|(_, t)| parse_spec(t).ok()).map(|d| d.level).max().unwrap_or(1);
        (digest(&all), top, None)
    };
    let mut checks = Checks {
        report: Report::new("verify", &digest_hex, level, &["example", "check", "status", "detail"]),
        failed: 0,
    };
    match &own {
        Some((doc, text)) => document_checks(&mut checks, doc, text),
        None => bundled_checks(&mut checks, c.seed)?,
    }
    let total = checks.report.rows.len();
    let summary = format!("verify: {} of {total} checks passed", total - checks.failed);
    emit(c, &checks.report, &[summary])?;
    if checks.failed > 0 {
        return Err(CliError::Failed(checks.failed));
    }
    Ok(())
}
