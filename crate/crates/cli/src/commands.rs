use std::fs;

use openimage_core::covers::{compare_tilde_vs_c, genus_of_quotient, GenusReport};
use openimage_core::io::{bundled, digest, list_cell, parse_spec, rational_cells, DocumentKind, Report, SpecDocument};
use openimage_core::modular_system::{
    first_coinciding_level, modular_levels, uniform_index_bound, verify_reduction_assumptions,
};
use openimage_core::{cosets, lattice, lie, modgroup, oracle, pgl2, Error, GroupTower, ModMatrix};

use crate::{CliError, Common};

/// Enumerated groups above this order skip the Frattini column.
const FRATTINI_ORDER_LIMIT: usize = 2000;

pub struct Loaded {
    pub doc: SpecDocument,
    pub digest: String,
}

pub fn load(c: &Common) -> Result<Loaded, CliError> {
    let text = match (&c.spec, &c.example) {
        (Some(path), _) => fs::read_to_string(path).map_err(|source| CliError::Read { path: path.clone(), source })?,
        (None, Some(name)) => bundled(name)
            .ok_or_else(|| CliError::Usage(format!("no bundled example named '{name}'")))?
            .to_string(),
        (None, None) => return Err(CliError::Usage("either --spec or --example is required".into())),
    };
    let doc = parse_spec(&text)?;
    Ok(Loaded { doc, digest: digest(&text) })
}

pub fn tower(c: &Common, doc: &SpecDocument) -> Result<GroupTower, CliError> {
    Ok(doc.tower(c.level, c.cap)?)
}

/// Writes the CSV to `<out>/<name>.csv`, or to stdout.
pub fn emit(c: &Common, report: &Report, summary: &[String]) -> Result<(), CliError> {
    let csv = report.to_csv();
    match &c.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|source| CliError::Read { path: dir.clone(), source })?;
            let path = dir.join(format!("{}.csv", report.name));
            fs::write(&path, csv).map_err(|source| CliError::Read { path, source })?;
        }
        None => print!("{csv}"),
    }
    for line in summary {
        eprintln!("{line}");
    }
    Ok(())
}

fn subgroup_or_generators(doc: &SpecDocument, name: &str) -> Result<Vec<ModMatrix>, CliError> {
    if doc.subgroups.contains_key(name) {
        Ok(doc.subgroup(name)?)
    } else {
        Ok(doc.generator_matrices()?)
    }
}

pub fn group(c: &Common) -> Result<(), CliError> {
    let Loaded { doc, digest } = load(c)?;
    let t = tower(c, &doc)?;
    let mut r = Report::new("group", &digest, t.max_level(), &["level", "order", "layer", "abelianization", "frattini_order"]);
    let mut previous = 1u128;
    for n in 1..=t.max_level() {
        let g = t.level(n)?;
        let order = g.order() as u128;
        let ab = modgroup::abelianization(g, &g.whole());
        let phi = if g.order() <= FRATTINI_ORDER_LIMIT {
            let phi = lattice::frattini(g, &g.whole(), lattice::LATTICE_CAP)?;
            if c.oracle && g.order() <= oracle::SUBGROUP_BOUND {
                let brute = oracle::brute_frattini(g)?.value;
                if brute.len() != phi.order() {
                    return Err(Error::IdentityViolation(format!("Frattini order {} vs oracle {}", phi.order(), brute.len())).into());
                }
            }
            phi.order().to_string()
        } else {
            "NA".into()
        };
        r.push(vec![n.to_string(), order.to_string(), (order / previous).to_string(), list_cell(ab), phi]);
        previous = order;
    }
    let top = t.level(t.max_level())?;
    emit(c, &r, &[format!("{}: |Π_{}| = {}, abelian: {}", doc.name, t.max_level(), top.order(), top.is_abelian())])
}

pub fn modsys(c: &Common) -> Result<(), CliError> {
    let Loaded { doc, digest } = load(c)?;
    let t = tower(c, &doc)?;
    let n_top = t.max_level();
    // The last level quotients by Φ(Π(N−1)), usually trivial; skip it
    // unless the tower is a single level.
    let up_to = n_top.saturating_sub(1).max(1);
    let levels = modular_levels(&t, up_to)?;
    let pts: Vec<Vec<ModMatrix>> = doc.points.iter().map(|p| doc.matrices(p)).collect::<Result<_, _>>()?;
    let pts: Vec<Vec<ModMatrix>> = pts.iter().map(|p| openimage_core::tower::reduce_all(p, n_top)).collect();
    let bound = uniform_index_bound(&t, &pts)?;
    let mut r = Report::new(
        "modsys",
        &digest,
        n_top,
        &["level", "count", "min_index", "max_index", "congruence_description", "bound_n0", "bound"],
    );
    for l in &levels {
        r.push(vec![
            l.n.to_string(),
            l.subgroups.len().to_string(),
            l.indices.iter().min().map_or("NA".into(), |x| x.to_string()),
            l.indices.iter().max().map_or("NA".into(), |x| x.to_string()),
            l.congruence_description.to_string(),
            bound.n0.to_string(),
            bound.bound.to_string(),
        ]);
    }
    let generic = bound.points.iter().filter(|p| p.is_generic()).count();
    r.note(format!("points generic {generic} exceptional {}", bound.points.len() - generic));
    let mut summary = vec![format!(
        "{}: congruence description from n = {}, index bound {} (n0 = {})",
        doc.name,
        first_coinciding_level(&levels).map_or("none".into(), |n| n.to_string()),
        bound.bound,
        bound.n0
    )];
    if doc.subgroups.contains_key("C") {
        let a = verify_reduction_assumptions(&t, &doc.subgroup("C")?)?;
        summary.push(format!(
            "C: core stable {}, ℓ-group quotients from n = {}",
            a.core_stable(),
            a.ell_group_from().map_or("none".into(), |n| n.to_string())
        ));
    }
    emit(c, &r, &summary)
}

fn genus_row(id: &str, g: &GenusReport) -> Vec<String> {
    let [num, den] = rational_cells(g.lambda);
    vec![
        id.to_string(),
        g.degree.to_string(),
        g.genus.to_string(),
        num,
        den,
        list_cell(g.punctures.iter().map(|p| p.d)),
        list_cell(g.punctures.iter().map(|p| p.e)),
    ]
}

const GENUS_COLUMNS: [&str; 7] = ["subgroup_id", "degree", "genus", "lambda_num", "lambda_den", "d", "e"];

fn check_genus_oracle<E: openimage_core::GroupElement>(
    spec: &openimage_core::covers::CoverSpec<'_, E>,
    h: &openimage_core::Subgroup,
    genus: i64,
) -> Result<(), CliError> {
    if spec.group.order() <= oracle::GENUS_BOUND {
        let brute = oracle::brute_genus(spec, h)?.value;
        if brute != genus {
            return Err(Error::IdentityViolation(format!("genus {genus} vs oracle {brute}")).into());
        }
    }
    Ok(())
}

pub fn covers(c: &Common) -> Result<(), CliError> {
    let Loaded { doc, digest } = load(c)?;
    if doc.cover.is_none() {
        return Err(CliError::Usage("document has no cover block".into()));
    }
    let t = tower(c, &doc)?;
    let mut r = Report::new("covers", &digest, t.max_level(), &GENUS_COLUMNS);
    let mut summary = Vec::new();
    if doc.kind == DocumentKind::Cover {
        let g = t.level(t.max_level())?;
        let spec = doc.cover_at(g)?;
        let mut names: Vec<&String> = doc.subgroups.keys().collect();
        names.sort();
        for name in names {
            let h = t.image_subgroup(t.max_level(), &doc.subgroup(name)?)?;
            let rep = genus_of_quotient(&spec, &h)?;
            if c.oracle {
                check_genus_oracle(&spec, &h, rep.genus)?;
            }
            r.push(genus_row(name, &rep));
        }
        let top = genus_of_quotient(&spec, &g.trivial())?;
        r.push(genus_row("trivial", &top));
        summary.push(format!("{}: Galois cover genus {}", doc.name, top.genus));
    } else {
        let tc = doc.tower_cover(&t)?;
        let (reports, series) = tc.genus_series()?;
        for (n, rep) in (1..).zip(&reports) {
            if c.oracle {
                let (spec, cn) = tc.level_spec(n)?;
                check_genus_oracle(&spec, &cn, rep.genus)?;
            }
            r.push(genus_row(&format!("C@{n}"), rep));
        }
        for n in 1..=t.max_level() {
            let (spec, cn) = tc.level_spec(n)?;
            let cmp = compare_tilde_vs_c(&spec, &cn)?;
            let [num, den] = rational_cells(cmp.gap);
            r.note(format!("level {n} tilde gap {num}/{den}"));
        }
        summary.push(format!(
            "{}: genera {:?}, λ monotone {}, genus strictly increasing {}",
            doc.name, series.genera, series.monotone, series.genus_strictly_increasing
        ));
    }
    emit(c, &r, &summary)
}

pub fn doublecosets(c: &Common) -> Result<(), CliError> {
    let Loaded { doc, digest } = load(c)?;
    let t = tower(c, &doc)?;
    let (cg, ig) = (doc.subgroup("C")?, doc.subgroup("I")?);
    let series = cosets::ratio_series(&t, &cg, &ig)?;
    let mut r = Report::new(
        "doublecosets",
        &digest,
        t.max_level(),
        &["level", "num_double_cosets", "index", "ratio_num", "ratio_den", "target_num", "target_den"],
    );
    for row in &series.rows {
        if c.oracle {
            let g = t.level(row.level)?;
            if g.order() <= oracle::DOUBLE_COSET_BOUND {
                let (cs, is) = (t.image_subgroup(row.level, &cg)?, t.image_subgroup(row.level, &ig)?);
                let brute = oracle::brute_double_cosets(g, &is, &cs)?.value.len();
                if brute != row.double_cosets {
                    return Err(Error::IdentityViolation(format!(
                        "level {}: {} double cosets vs oracle {brute}",
                        row.level, row.double_cosets
                    ))
                    .into());
                }
            }
        }
        let [rn, rd] = rational_cells(row.ratio);
        let [tn, td] = rational_cells(row.target);
        r.push(vec![row.level.to_string(), row.double_cosets.to_string(), row.index.to_string(), rn, rd, tn, td]);
    }
    emit(c, &r, &[format!("{}: stabilized {}, matches target {}", doc.name, series.stabilized, series.matches_target)])
}

pub fn lp_check(c: &Common) -> Result<(), CliError> {
    let Loaded { doc, digest } = load(c)?;
    let t = tower(c, &doc)?;
    let u = subgroup_or_generators(&doc, "U")?;
    let growth = lie::abelianization_growth(&t, &u)?;
    let depth = if t.prime() == 2 { 2 } else { 1 };
    let mut r = Report::new("lp-check", &digest, t.max_level(), &["level", "abelianization_order", "bracket_divisors"]);
    let mut last = None;
    for n in 1..=t.max_level() {
        let divisors = if n > depth {
            let l = lie::lie_lattice(&t.truncate(n)?, depth)?;
            let cell = list_cell(&l.bracket_divisors);
            last = Some(l);
            cell
        } else {
            "NA".into()
        };
        r.push(vec![n.to_string(), growth.orders[n as usize - 1].to_string(), divisors]);
    }
    let perfect = last.as_ref().map(|l| l.is_perfect_evidence());
    emit(
        c,
        &r,
        &[format!(
            "{}: abelianization stabilized {}, bracket divisors all units {}",
            doc.name,
            growth.stabilized,
            perfect.map_or("NA".into(), |p| p.to_string())
        )],
    )
}

pub fn pgl2(q: u64, c: &Common) -> Result<(), CliError> {
    let g = pgl2::build_pgl2(q, pgl2::Q_CAP)?;
    let atlas = pgl2::atlas(&g)?;
    let mut r = Report::new("pgl2", &digest(&format!("pgl2 q={q}")), 1, &["class", "order", "count"]);
    r.note(format!("group order {}", g.group.order()));
    for row in &atlas {
        r.push(vec![row.class.to_string(), row.order.to_string(), row.count.to_string()]);
    }
    let classes: usize = atlas.iter().map(|a| a.count).sum();
    emit(c, &r, &[format!("PGL2({q}): order {}, {classes} subgroup classes", g.group.order())])
}
