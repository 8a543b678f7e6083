use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use foam_core::intertwiner::{FaceNormals, IntertwinerBloch};
use foam_core::spinfoam::{
    amplitude_double, amplitude_single, contraction_amplitude_single, fifteenj_tensor, mc_amplitude_single,
    scan_double, scan_single, two_vertex_state, vertex_state, Boundary5, Boundary8, CoherentBoundary,
};

fn unit() -> f64 {
    1.0 / (8.0 * 42f64.sqrt())
}

#[test]
fn low_weight_amplitudes_by_orbit() {
    let w = vertex_state().real_parts();
    let r3 = 3f64.sqrt();
    let weight = |k: u32| (0..32usize).filter(move |i| i.count_ones() == k);
    assert!(weight(1).all(|i| (w[i] - 9.0 * unit()).abs() < 1e-12));
    assert!(weight(4).all(|i| (w[i] + r3 * unit()).abs() < 1e-12));
    let pairs: Vec<f64> = weight(2).map(|i| w[i]).collect();
    let count = |v: f64| pairs.iter().filter(|&&x| (x - v).abs() < 1e-12).count();
    assert_eq!(count(-3.0 * r3 * unit()), 5);
    assert_eq!(count(9.0 * r3 * unit()), 5);
}

#[test]
fn coefficient_ratios() {
    let f = fifteenj_tensor();
    let r = f.get([0, 0, 0, 0, 0]) / f.get([1, 1, 1, 1, 1]);
    assert!((r - 3f64.sqrt() / 7.0).abs() < 1e-12);
    let r = f.get([0, 0, 0, 0, 1]) / f.get([0, 0, 0, 1, 0]);
    assert!((r - 1.0).abs() < 1e-12);
}

#[test]
fn named_vertex_entries() {
    let w = vertex_state().real_parts();
    assert!((w[0b11111] - 21.0 * unit()).abs() < 1e-12);
    assert!((w[0b00000] - 3.0 * 3f64.sqrt() * unit()).abs() < 1e-12);
    assert!((w[0b01011] + 9.0 * unit()).abs() < 1e-12);
}

/// Dense oracle: builds each Bloch factor by hand and sums the 32 products.
fn dense_overlap(angles: &[(f64, f64); 5]) -> Complex64 {
    let w = vertex_state().real_parts();
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, wi) in w.iter().enumerate() {
        let mut amp = Complex64::new(1.0, 0.0);
        for (q, &(theta, phi)) in angles.iter().enumerate() {
            amp *= if (i >> (4 - q)) & 1 == 0 {
                Complex64::new((theta / 2.0).cos(), 0.0)
            } else {
                Complex64::from_polar((theta / 2.0).sin(), phi)
            };
        }
        sum += wi * amp;
    }
    sum
}

#[test]
fn regular_boundary_matches_dense_contraction() {
    let angles = [(FRAC_PI_2, FRAC_PI_2); 5];
    let a = amplitude_single(&Boundary5::regular());
    let golden = dense_overlap(&angles).norm_sqr();
    assert!((a.probability - golden).abs() < 1e-14);
    assert!((a.probability - 1.0 / 7.0).abs() < 1e-14);
}

#[test]
fn mixed_boundaries_match_dense_contraction() {
    let cases = [
        [(0.3, 1.0), (2.0, 0.1), (PI, 0.0), (1.2, 4.0), (0.7, 5.5)],
        [(FRAC_PI_2, 0.0), (0.0, 0.0), (2.5, 3.0), (1.0, 1.0), (3.0, 6.0)],
    ];
    for angles in cases {
        let a = amplitude_single(&Boundary5::from_angles(&angles).unwrap());
        assert!((a.overlap - dense_overlap(&angles)).norm() < 1e-14);
    }
}

#[test]
fn two_vertex_state_is_symmetric_under_block_swap() {
    let wd = two_vertex_state();
    for idx in 0..256usize {
        let swapped = ((idx & 0xf) << 4) | (idx >> 4);
        assert!((wd.amplitudes()[idx] - wd.amplitudes()[swapped]).norm() < 1e-15);
    }
}

#[test]
fn zero_glued_boundary_picks_first_amplitude() {
    let b = Boundary8::from_angles(&[(0.0, 0.0); 8]).unwrap();
    let a = amplitude_double(&b);
    let first = two_vertex_state().amplitudes()[0];
    assert!((a.overlap - first).norm() < 1e-15);
}

#[test]
fn small_scan_corner_matches_direct_amplitude() {
    let fixed = [IntertwinerBloch::regular_plus(); 4];
    let rows = scan_single(&fixed, 3, 3).unwrap();
    let mut t = [IntertwinerBloch::regular_plus(); 5];
    t[4] = IntertwinerBloch::zero();
    let corner = amplitude_single(&Boundary5::new(t)).probability;
    assert_eq!((rows[0].theta, rows[0].phi), (0.0, 0.0));
    assert!((rows[0].probability - corner).abs() < 1e-15);
}

#[test]
fn consistent_branch_dominates_at_regular_point() {
    let plus = IntertwinerBloch::regular_plus();
    let minus = IntertwinerBloch::regular_minus();
    let fixed = [plus, plus, plus, plus, minus, minus, minus];
    let rows = scan_double(&fixed, 3, &[FRAC_PI_2, 3.0 * FRAC_PI_2]).unwrap();
    let at = |phi: f64| rows.iter().find(|r| r.phi == phi && r.theta == FRAC_PI_2).unwrap().probability;
    assert!(at(3.0 * FRAC_PI_2) > at(FRAC_PI_2));
}

#[test]
fn aligned_tetrahedron_gives_vanishing_estimate() {
    let mut tets = CoherentBoundary::regular_simplex().tetrahedra;
    tets[2] = FaceNormals::new([[0.0, 0.0, 1.0]; 4]).unwrap();
    let b = CoherentBoundary::new(tets);
    assert!(contraction_amplitude_single(&b).norm() < 1e-15);
    let est = mc_amplitude_single(&b, 200_000, 5).unwrap();
    assert!(est.agrees_with(Complex64::new(0.0, 0.0), 3.0), "{est:?}");
}
