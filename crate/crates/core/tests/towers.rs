use openimage_core::covers::{compare_tilde_vs_c, summation_identities};
use openimage_core::io::{bundled, parse_spec};
use openimage_core::ramification::stabilized_wild_data;
use openimage_core::{modgroup, Rational};

fn wild() -> (openimage_core::io::SpecDocument, openimage_core::GroupTower) {
    let d = parse_spec(bundled("wild_borel3").unwrap()).unwrap();
    let t = d.tower(None, Some(1_000_000)).unwrap();
    (d, t)
}

// Over the torus, the two tame points each contribute 3ⁿ − 1 and the wild
// point 3ⁿ − 1, so 2g − 2 = −2·3ⁿ + 3(3ⁿ − 1).
#[test]
fn wild_genus_has_closed_form() {
    let (d, t) = wild();
    let (_, series) = d.tower_cover(&t).unwrap().genus_series().unwrap();
    let expected: Vec<i64> = (1..=4).map(|n| (3i64.pow(n) - 1) / 2).collect();
    assert_eq!(series.genera, expected);
    assert!(series.monotone && series.genus_strictly_increasing);
}

#[test]
fn wild_second_term_shrinks() {
    let (d, t) = wild();
    let st = d.tower_cover(&t).unwrap().second_term(0).unwrap();
    for row in &st.rows {
        assert_eq!(row.direct, row.stabilized);
        assert_eq!(row.direct, Rational::new(1, 2 * 3i128.pow(row.level)));
    }
    assert!(st.shrinking);
}

#[test]
fn wild_gap_and_sums_per_level() {
    let (d, t) = wild();
    let tc = d.tower_cover(&t).unwrap();
    for n in 1..=4 {
        let (spec, c) = tc.level_spec(n).unwrap();
        let cmp = compare_tilde_vs_c(&spec, &c).unwrap();
        assert_eq!(cmp.gap, Rational::new(1, 3i128.pow(n)));
        assert!(cmp.consistent_with_base);
        for i in 0..spec.punctures.len() {
            summation_identities(&spec, &c, i).unwrap();
        }
    }
}

#[test]
fn wild_inertia_stabilizes() {
    let (d, t) = wild();
    let tc = d.tower_cover(&t).unwrap();
    let g1 = t.level(1).unwrap();
    let filtrations: Vec<_> = (1..=3).map(|n| tc.filtrations(n).unwrap().remove(0)).collect();
    let groups: Vec<_> = (1..=3).map(|n| t.level(n).unwrap()).collect();
    let maps: Vec<Vec<u32>> = groups
        .iter()
        .enumerate()
        .map(|(k, g)| if k == 0 { (0..g1.order() as u32).collect() } else { modgroup::reduction_map(g, g1).unwrap() })
        .collect();
    let levels: Vec<_> = groups.iter().copied().zip(filtrations.iter()).collect();
    let data = stabilized_wild_data(&levels, &maps, 3).unwrap();
    assert_eq!(data.j0, 4);
    assert_eq!(data.level_one_orders, vec![4, 2, 2, 1]);
    assert_eq!(data.levels.iter().map(|l| l.e1).collect::<Vec<_>>(), vec![1, 3, 9]);
}
