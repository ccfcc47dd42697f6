//! One line per acceptance criterion. Criterion 9 runs only when
//! `LATINSQ_LONG=1` is set.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use latinsq::admissible::{involution_representative, prime_order_types, verify_order4_data};
use latinsq::assembly::{census_quasigroups_and_loops, verify_tables, Check, Tables};
use latinsq::audit::{bucket_quasigroups_and_loops, census_suite, ledger_suite, onefact_suite, seed_suite};
use latinsq::census::{census, Census};
use latinsq::onefact::{final_lf, forward_accumulate, with_symbols_fixed, AdditionOrder, Delta};
use latinsq::seeds::{admissible_classes, run_class};
use num_bigint::BigUint;

fn data() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn summarize(checks: &[Check]) -> (bool, String) {
    let failed: Vec<&Check> = checks.iter().filter(|c| !c.passed).collect();
    match failed.first() {
        None => (true, format!("{} checks", checks.len())),
        Some(c) => (false, format!("{} of {} failed, first: {} {}", failed.len(), checks.len(), c.name, c.detail)),
    }
}

fn pick(checks: Vec<Check>, keys: &[&str]) -> Vec<Check> {
    checks.into_iter().filter(|c| keys.iter().any(|k| c.name.contains(k))).collect()
}

type Outcome = Result<(bool, String), String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn criterion1(censuses: &[Census]) -> Outcome {
    let counts: Vec<usize> = censuses.iter().map(|c| c.classes.len()).collect();
    Ok((counts == [1, 1, 1, 2, 2, 12, 147], format!("{counts:?}")))
}

fn criterion2(censuses: &[Census]) -> Outcome {
    let mut checks = Vec::new();
    for c in &censuses[..6] {
        checks.extend(pick(census_suite(c).map_err(|e| e.to_string())?, &["squares against"]));
    }
    let totals: Vec<String> = censuses[..6].iter().map(|c| c.total_squares.to_string()).collect();
    let (ok, detail) = summarize(&checks);
    Ok((ok, format!("{detail}; {}", totals.join(", "))))
}

fn criterion3(censuses: &[Census]) -> Outcome {
    let mut checks = Vec::new();
    for c in &censuses[..6] {
        checks.extend(pick(census_suite(c).map_err(|e| e.to_string())?, &["orbit-stabilizer"]));
    }
    Ok(summarize(&checks))
}

fn criterion4() -> Outcome {
    let start = Instant::now();
    let tables = Tables::load(&data().join("paper_tables")).map_err(|e| e.to_string())?;
    let ledger = verify_tables(&tables).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let want = [
        (ledger.n2.to_string(), "47291560812217"),
        (ledger.main_classes.symmetric_squares.to_string(), "9023583561995938862980803959193600000"),
        (ledger.main_classes.n1.to_string(), "2036029552535590421717241"),
        (ledger.main_classes.total.to_string(), "2036029552582883134196099"),
        (ledger.onefact_classes.to_string(), "6108088657705958932053657"),
        (ledger.isotopy_classes.to_string(), "12216177315369229261482540"),
    ];
    let values_ok = want.iter().all(|(a, b)| a == b);
    let (checks_ok, detail) = summarize(&ledger.checks);
    let fast = elapsed.as_secs_f64() < 1.0;
    Ok((values_ok && checks_ok && fast, format!("{detail}, {:.3}s", elapsed.as_secs_f64())))
}

fn criterion5() -> Outcome {
    let t1 = std::fs::read_to_string(data().join("paper_tables/t1_prime_types.tsv")).map_err(|e| e.to_string())?;
    let shipped: Vec<String> = t1
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split('\t').skip(1).take(5).collect::<Vec<_>>().join(" "))
        .collect();
    let computed: Vec<String> = prime_order_types(11)
        .iter()
        .map(|p| format!("{} {} {} {} {}", p.p, p.f[0], p.f[1], p.f[2], p.fixed_classes))
        .collect();
    let gens = std::fs::read_to_string(data().join("order4_generators.txt")).map_err(|e| e.to_string())?;
    let table = std::fs::read_to_string(data().join("order4_groups.tsv")).map_err(|e| e.to_string())?;
    let report = verify_order4_data(11, &gens, &table).map_err(|e| e.to_string())?;
    Ok((
        shipped == computed && report.passed(),
        format!(
            "{} prime types; {} order-4 groups ({} elementary abelian, {} cyclic), eligible {}, non-conjugate {}",
            computed.len(),
            report.groups,
            report.elementary_abelian,
            report.cyclic,
            report.all_eligible,
            report.pairwise_non_conjugate
        ),
    ))
}

fn criterion6(censuses: &[Census]) -> Outcome {
    let mut checks = Vec::new();
    for c in &censuses[..6] {
        checks.extend(seed_suite(c).map_err(|e| e.to_string())?);
    }
    Ok(summarize(&checks))
}

fn criterion7(censuses: &[Census]) -> Outcome {
    let mut checks = Vec::new();
    for c in &censuses[..6] {
        checks.extend(onefact_suite(c.n, &c.total_squares).map_err(|e| e.to_string())?);
    }
    Ok(summarize(&checks))
}

fn criterion8(censuses: &[Census]) -> Outcome {
    let mut checks = Vec::new();
    for n in [3, 5] {
        checks.extend(pick(ledger_suite(&censuses[n - 1]).map_err(|e| e.to_string())?, &["quasigroups", "loops"]));
    }
    let (q3, l3) = census_quasigroups_and_loops(&censuses[2]).map_err(|e| e.to_string())?;
    let (q5, l5) = census_quasigroups_and_loops(&censuses[4]).map_err(|e| e.to_string())?;
    let (bq5, bl5) = bucket_quasigroups_and_loops(5);
    let exact = q3 == BigUint::from(5u32) && l3 == BigUint::from(1u32);
    let (ok, detail) = summarize(&checks);
    Ok((ok && exact, format!("{detail}; n=3: {q3}, {l3}; n=5: {q5}, {l5} (bucketing {bq5}, {bl5})")))
}

fn table_rows(name: &str) -> Result<Vec<Vec<String>>, String> {
    let text = std::fs::read_to_string(data().join("paper_tables").join(name)).map_err(|e| e.to_string())?;
    Ok(text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split('\t').map(str::to_string).collect())
        .collect())
}

fn criterion9() -> Outcome {
    let class = admissible_classes(11)
        .into_iter()
        .find(|c| c.label.starts_with('p') && c.label.ends_with("-16"))
        .ok_or("no prime class 16")?;
    let run = run_class(&class.group, &class.spec, 1 << 22).map_err(|e| e.to_string())?;
    let want_dc = table_rows("t5_t6_double_counts.tsv")?
        .into_iter()
        .find(|r| r[0] == "prime" && r[1] == "16")
        .map(|r| r[2].clone())
        .ok_or("no double count for class 16")?;
    let dc_ok = run.double_count.agrees() && run.double_count.lhs.to_string() == want_dc;

    let ty = prime_order_types(11).into_iter().filter(|t| t.p == 2).nth(8).ok_or("no involution type 9")?;
    let (d, a) = Delta::from_paratopism(&with_symbols_fixed(&involution_representative(&ty, 11))).map_err(|e| e.to_string())?;
    let stages = forward_accumulate(&d, a, AdditionOrder::Inc, |_| Ok(())).map_err(|e| e.to_string())?;
    let counts: Vec<String> = stages.iter().map(|s| s.len().to_string()).collect();
    let want_counts: Vec<String> = table_rows("t11_orbits_inc.tsv")?.into_iter().map(|r| r[9].clone()).filter(|v| v != "-").collect();
    let lf = final_lf(&stages).map_err(|e| e.to_string())?;
    let want_lf = table_rows("t10_lf_lpi.tsv")?.into_iter().find(|r| r[0] == "9").map(|r| r[1].clone()).ok_or("no LF for type 9")?;
    let lf_ok = lf.to_string() == want_lf && counts == want_counts;
    Ok((
        dc_ok && lf_ok,
        format!("double count {}, LF {lf}, orbits {}", run.double_count.lhs, counts.join(" ")),
    ))
}

fn report(k: usize, title: &str, outcome: Outcome, secs: f64) -> bool {
    match outcome {
        Ok((true, detail)) => {
            println!("criterion {k} PASS  {title}: {detail} [{secs:.1}s]");
            true
        }
        Ok((false, detail)) => {
            println!("criterion {k} FAIL  {title}: {detail} [{secs:.1}s]");
            false
        }
        Err(e) => {
            println!("criterion {k} FAIL  {title}: error {e} [{secs:.1}s]");
            false
        }
    }
}

fn main() -> ExitCode {
    // libtest flags such as --list or a name filter are accepted and ignored
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let start = Instant::now();
    let censuses: Vec<Census> = (1..=7).map(|n| census(n).expect("census")).collect();
    println!("censuses for orders 1 to 7 in {:.1}s", start.elapsed().as_secs_f64());
    let mut ok = true;
    let criteria: Vec<Criterion> = vec![
        ("main classes of orders 1 to 7", Box::new(|| criterion1(&censuses))),
        ("square counts of orders 1 to 6", Box::new(|| criterion2(&censuses))),
        ("orbit-stabilizer identity", Box::new(|| criterion3(&censuses))),
        ("counts rebuilt from the tables", Box::new(criterion4)),
        ("admissible types and order-4 groups", Box::new(criterion5)),
        ("seed double counts and constructed classes", Box::new(|| criterion6(&censuses))),
        ("one-factorization engine", Box::new(|| criterion7(&censuses))),
        ("quasigroup and loop formulas", Box::new(|| criterion8(&censuses))),
    ];
    for (i, (title, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        ok &= report(i + 1, title, f(), t.elapsed().as_secs_f64());
    }
    if std::env::var("LATINSQ_LONG").is_ok_and(|v| v == "1") {
        let t = Instant::now();
        ok &= report(9, "order 11 spot checks", criterion9(), t.elapsed().as_secs_f64());
    } else {
        println!("criterion 9 SKIP  order 11 spot checks: long-running, set LATINSQ_LONG=1");
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
