//! Acceptance suite: runs every committed check at its pinned tolerance and
//! prints one pass/fail line per criterion.

use dynnet_core::acceptance::{run_check, CHECK_NAMES};

fn run(id: u32) {
    let result = run_check(id).expect("known check id");
    println!(
        "[{}] {:>2} {:<28} {} ({:.1}s)",
        if result.pass { "PASS" } else { "FAIL" },
        result.id,
        result.name,
        result.detail,
        result.seconds
    );
    assert!(result.pass, "criterion {} ({}) failed: {}", result.id, result.name, result.detail);
}

#[test]
fn criterion_01_stationarity() {
    run(1);
}

#[test]
fn criterion_02_ctmc_oracle() {
    run(2);
}

#[test]
fn criterion_03_pinned_pair_mean() {
    run(3);
}

#[test]
fn criterion_04_duality_identity() {
    run(4);
}

#[test]
fn criterion_05_lazy_eager_bitwise() {
    run(5);
}

#[test]
fn criterion_06_exponent_calculator() {
    run(6);
}

#[test]
fn criterion_07_chain_integrals() {
    run(7);
}

#[test]
fn criterion_08_slow_extinction_trend() {
    run(8);
}

#[test]
fn criterion_09_metastable_plateau() {
    run(9);
}

#[test]
fn criterion_10_fast_extinction_log_scaling() {
    run(10);
}

#[test]
fn criterion_11_supermartingale_drift() {
    run(11);
}

#[test]
fn criterion_12_coupling_domination() {
    run(12);
}

#[test]
fn criterion_13_theory_exponent_slopes() {
    run(13);
}

#[test]
fn registry_is_complete() {
    assert_eq!(CHECK_NAMES.len(), 13);
}
