//! Regression values frozen from the first verified build.

use std::f64::consts::FRAC_PI_2;

use lemwedge::farfield::{self, FarField};
use lemwedge::WedgeConfig;
use num_complex::Complex64;

const GOLDEN_D: Complex64 = Complex64::new(-0.023654081029427926, -0.051619769011998495);
const GOLDEN_RECIPROCITY_MAX: f64 = 7.141678764921536;

#[test]
fn diffraction_coefficient_at_reference_angles() {
    let ff = FarField::new(&WedgeConfig::default()).unwrap();
    let d = ff.d_coefficient(FRAC_PI_2 + 0.3).unwrap();
    assert!((d - GOLDEN_D).norm() < 1e-10, "{d}");
}

#[test]
fn reciprocity_maximum_on_default_grid() {
    let rep = farfield::reciprocity_report(&farfield::default_grid(13), &WedgeConfig::default()).unwrap();
    assert!((rep.max - GOLDEN_RECIPROCITY_MAX).abs() < 1e-8 * GOLDEN_RECIPROCITY_MAX, "{}", rep.max);
    for (a, row) in rep.delta.iter().enumerate() {
        assert!(matches!(row[a], Some(v) if v == 0.0) || row[a].is_none());
        for (b, v) in row.iter().enumerate() {
            assert_eq!(*v, rep.delta[b][a]);
        }
    }
}
