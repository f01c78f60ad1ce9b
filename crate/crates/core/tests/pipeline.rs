use std::time::Instant;

use num_rational::BigRational;

use reqcov_core::context::{build_context, enumerate_conditions, CombinationLevel};
use reqcov_core::solver::{solve_all, verify_witness, SolverConfig, Verdict};
use reqcov_core::speclang::parse;

fn sample_specs() -> Vec<(String, String)> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../specs");
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "reqspec"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn every_sample_witness_satisfies_its_context() {
    let one = BigRational::from_integer(1.into());
    let samples = sample_specs();
    assert!(samples.len() >= 3);
    for (file, text) in samples {
        for spec in parse(&text, &file).unwrap() {
            let ctx = build_context(&spec);
            for (sigma, level) in [
                (None, CombinationLevel::Single),
                (Some(&one), CombinationLevel::Pairwise),
            ] {
                let conditions = enumerate_conditions(&ctx, sigma, level).unwrap();
                let start = Instant::now();
                let results = solve_all(&ctx, &conditions, &SolverConfig::default());
                let mut sat = 0;
                for (c, r) in &results {
                    assert_ne!(
                        r.verdict(),
                        Verdict::Unknown,
                        "{} {}: {}",
                        spec.name,
                        c.id,
                        c.condition
                    );
                    if let Some(w) = r.witness() {
                        assert!(
                            verify_witness(&ctx, &c.condition, w),
                            "{} {}",
                            spec.name,
                            c.id
                        );
                        sat += 1;
                    }
                }
                assert!(sat > 0, "{}", spec.name);
                assert!(
                    start.elapsed().as_secs() < 30,
                    "{} took {:?}",
                    spec.name,
                    start.elapsed()
                );
            }
        }
    }
}

#[test]
fn tolerance_adds_conditions_only_for_strict_predicates() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../specs/constrained_add.reqspec"
    ))
    .unwrap();
    let ctx = build_context(&parse(&text, "c.reqspec").unwrap()[0]);
    let one = BigRational::from_integer(1.into());
    let plain = enumerate_conditions(&ctx, None, CombinationLevel::Single).unwrap();
    let tol = enumerate_conditions(&ctx, Some(&one), CombinationLevel::Single).unwrap();
    assert!(tol.len() > plain.len());
    let plain_text: Vec<String> = plain.iter().map(|c| c.condition.to_string()).collect();
    for c in &plain_text {
        assert!(tol.iter().any(|t| &t.condition.to_string() == c), "{c}");
    }
}
