//! Global-law sanity: one large sample's empirical spectrum already hugs
//! the semicircle CDF, and the spectral pipeline agrees with itself on
//! realistic inputs.

use mesowig::ensemble::EnsembleSpec;
use mesowig::spectral::{eigenvalues, empirical_cdf_distance};

#[test]
fn single_goe_sample_matches_semicircle() {
    let spec = EnsembleSpec::goe(1024, 314159);
    let m = mesowig::sample_matrix(&spec, 0).unwrap();
    let s = eigenvalues(&m, 1e-10).unwrap();
    let d = empirical_cdf_distance(&s);
    assert!(d <= 0.05, "sup CDF distance {d}");
    // Spectrum is inside a slightly inflated support at this dimension.
    let ev = s.eigenvalues();
    assert!(ev[0] > -2.3 && ev[ev.len() - 1] < 2.3);
}

#[test]
fn heavy_tail_sample_still_obeys_the_global_law() {
    let mut spec = EnsembleSpec::goe(512, 2718);
    spec.entry_law = mesowig::EntryLaw::HeavyTail;
    spec.heavy_tail_exponent = Some(4.5);
    let m = mesowig::sample_matrix(&spec, 0).unwrap();
    let s = eigenvalues(&m, 1e-10).unwrap();
    let d = empirical_cdf_distance(&s);
    assert!(d <= 0.08, "sup CDF distance {d}");
}
