use posit_core::oracle::{verify_exhaustive, verify_sampled, VerifyOp};
use posit_core::PositConfig;

fn cfg(n: u32, es: u32) -> PositConfig {
    PositConfig::new(n, es).unwrap()
}

#[test]
fn multiplier_exhaustive_8bit_formats() {
    for es in 0..=2 {
        let report = verify_exhaustive(cfg(8, es), VerifyOp::Mul).unwrap();
        assert_eq!(report.pairs_tested, 65_536);
        assert!(report.passed(), "<8,{es}>: {:?}", report.mismatches);
    }
}

#[test]
fn multiplier_exhaustive_every_small_format() {
    // Includes widths that are not powers of two, where the regime clamp
    // matters most.
    for n in 3..=9 {
        for es in 0..=n - 3 {
            let report = verify_exhaustive(cfg(n, es), VerifyOp::Mul).unwrap();
            assert!(report.passed(), "<{n},{es}>: {:?}", report.mismatches);
        }
    }
}

#[test]
fn adder_and_divider_exhaustive() {
    for (n, es) in [(8, 0), (8, 1), (8, 2), (5, 0), (7, 3), (9, 1)] {
        for op in [VerifyOp::Add, VerifyOp::Sub, VerifyOp::Div] {
            let report = verify_exhaustive(cfg(n, es), op).unwrap();
            assert!(
                report.passed(),
                "<{n},{es}> {}: {:?}",
                op.name(),
                report.mismatches
            );
        }
    }
}

#[test]
fn sampled_wide_formats() {
    for (n, es) in [
        (10, 0),
        (12, 0),
        (14, 0),
        (16, 0),
        (16, 2),
        (24, 1),
        (33, 2),
        (43, 3),
        (44, 3),
        (48, 1),
        (64, 0),
        (64, 2),
        (64, 5),
        (40, 8),
    ] {
        for op in [VerifyOp::Mul, VerifyOp::Add, VerifyOp::Div] {
            let report = verify_sampled(cfg(n, es), op, 5_000, 7);
            assert!(
                report.passed(),
                "<{n},{es}> {}: {:?}",
                op.name(),
                report.mismatches
            );
        }
    }
}

#[test]
fn multiplier_sampled_extreme_exponent_field() {
    // Exact sums at this es need million-bit integers, so only the product is checked.
    let report = verify_sampled(cfg(37, 20), VerifyOp::Mul, 20_000, 7);
    assert!(report.passed(), "{:?}", report.mismatches);
}
