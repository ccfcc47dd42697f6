//! Slow checks at order 11. Run with `cargo test --test order_eleven -- --ignored`.

use std::path::PathBuf;

use latinsq::admissible::{nonexistence_check, parse_generator_file, parse_group_table, Existence};
use latinsq::group::ParaGroup;
use latinsq::seeds::{admissible_classes, run_class};

fn data(name: &str) -> String {
    std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)).unwrap()
}

#[test]
#[ignore]
fn excluded_order_four_groups_admit_no_square() {
    let gens = parse_generator_file(11, &data("order4_generators.txt")).unwrap();
    for row in parse_group_table(&data("order4_groups.tsv")).unwrap() {
        if !row.excluded {
            continue;
        }
        let gs: Vec<_> = row.generators.iter().map(|i| gens[i].clone()).collect();
        let group = ParaGroup::closure(11, &gs, 4).unwrap();
        let outcome = nonexistence_check(&group, None);
        assert!(matches!(outcome, Existence::NoSquare(_)), "group {}: {outcome:?}", row.group_type);
    }
}

#[test]
#[ignore]
fn prime_class_sixteen_double_count() {
    let class = admissible_classes(11).into_iter().find(|c| c.label == "p11-16").unwrap();
    let run = run_class(&class.group, &class.spec, 1 << 22).unwrap();
    assert!(run.double_count.agrees());
    assert_eq!(run.double_count.lhs.to_string(), "38160882055721779200000");
}
