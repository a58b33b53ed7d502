mod common;

use common::*;
use plumb_core::census::{census_scan, write_jsonl, Filter};
use plumb_core::{ar_status, hf_summary, HfParams, PlumbingForest};

fn jsonl(nmax: usize, wmin: i64, filters: &[Filter]) -> Vec<u8> {
    let mut out = Vec::new();
    write_jsonl(&census_scan(nmax, wmin, filters).unwrap().records, &mut out).unwrap();
    out
}

#[test]
fn rerun_is_byte_identical() {
    assert_eq!(jsonl(5, -4, &[]), jsonl(5, -4, &[]));
}

#[test]
fn corpus_wide_implications() {
    let scan = census_scan(6, -4, &[]).unwrap();
    assert!(scan.skipped.is_empty());
    assert!(scan.records.len() > 1000);
    for r in &scan.records {
        assert!(!r.rational || r.lspace, "{}", r.code);
        if r.lspace && r.certified {
            assert_eq!(r.basic, r.spinc, "{}", r.code);
        }
        assert_eq!(r.spinc as i128, r.det.abs(), "{}", r.code);
    }
}

#[test]
fn two_chains_are_rational() {
    let scan = census_scan(5, -3, &[Filter::Rational]).unwrap();
    for n in 1..=5 {
        let code = canonical_code_of(&vec![-2; n]);
        assert!(scan.records.iter().any(|r| r.code == code), "A{n}");
    }
}

fn canonical_code_of(weights: &[i64]) -> String {
    plumb_core::canonical_code(&PlumbingForest::chain(weights))
}

#[test]
fn rational_graphs_have_no_reduced_rank() {
    let scan = census_scan(3, -4, &[Filter::Rational]).unwrap();
    assert!(!scan.records.is_empty());
    for r in &scan.records {
        let f = PlumbingForest::from_weights(&r.weights, &r.edges).unwrap();
        let c = ctx(&f);
        let ar = ar_status(&c, 0).unwrap();
        let s = hf_summary(&c, HfParams::for_context(&c), &ar).unwrap();
        assert_eq!(s.total_reduced_rank, 0, "{}", r.code);
        assert!(s.classes.iter().all(|c| c.d_agrees), "{}", r.code);
    }
}
