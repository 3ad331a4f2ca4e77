mod common;

use common::{dissipation_mismatch, inviscid_drift};

#[test]
fn h_minus1_conserved_without_regularization() {
    let (drift, window) = inviscid_drift(0.05);
    eprintln!("relative H^-1 drift {drift:.3e} over [0, {window:.4}]");
    assert!(window >= 0.01);
    assert!(drift < 1e-4);
}

#[test]
fn h_minus1_decays_at_the_dissipation_rate() {
    let (mismatch, monotone) = dissipation_mismatch(1e-2);
    eprintln!("rate mismatch {mismatch:.3e}");
    assert!(monotone);
    assert!(mismatch < 0.05);
}
