use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use qudit_search::fgate::coupling_design;
use qudit_search::multipod::{
    analytic_sech_phase, extract_reflection, morris_shore, propagate, Propagator, PulseJob, PulseShape,
    LEAKAGE_THRESHOLD,
};

fn dark_space_defect(u: &Propagator, couplings: &[Complex64]) -> f64 {
    let basis = morris_shore(couplings).unwrap();
    let d = couplings.len();
    let mut worst = 0.0f64;
    let mut reference: Option<Complex64> = None;
    for dark in &basis.dark {
        let mut v = dark.clone();
        v.push(Complex64::new(0.0, 0.0));
        let v = DVector::from_vec(v);
        let out = u.matrix() * &v;
        let phase = *reference.get_or_insert_with(|| (v.adjoint() * &out)[(0, 0)]);
        for i in 0..=d {
            worst = worst.max((out[i] - phase * v[i]).norm());
        }
    }
    worst
}

#[test]
fn propagators_on_the_test_grid() {
    for d in [2, 3, 4] {
        let couplings = coupling_design(d).unwrap().as_complex();
        for area in [2.0 * PI, 6.0 * PI] {
            for dt in [0.0, 0.5, 1.0, 2.0] {
                let job = PulseJob::new(couplings.clone(), dt, 1.0, PulseShape::Sech, area).unwrap();
                let u = propagate(&job).unwrap();
                assert!(u.unitarity_defect() < 1e-8, "d={d} A={area} dT={dt}: {}", u.unitarity_defect());
                assert!(dark_space_defect(&u, &couplings) < 1e-6);
                let fit = extract_reflection(&u, &couplings).unwrap();
                assert!(fit.residual < 1e-6);
            }
        }
    }
}

#[test]
fn three_reflection_areas_share_the_axis() {
    for d in [2, 3, 4] {
        let couplings = coupling_design(d).unwrap().as_complex();
        let job = PulseJob::new(couplings.clone(), 0.0, 1.0, PulseShape::Sech, 6.0 * PI).unwrap();
        let fit = extract_reflection(&propagate(&job).unwrap(), &couplings).unwrap();
        assert!((fit.phase - PI).abs() < 1e-4);
        assert!(fit.residual < 1e-6);
        for (a, w) in fit.axis.iter().zip(&couplings) {
            assert!((a - w).norm() < 1e-12);
        }
    }
}

#[test]
fn width_scaling_keeps_the_phase_law() {
    // Only the product Delta T matters.
    let couplings = coupling_design(3).unwrap().as_complex();
    for (width, detuning) in [(2.0, 0.25), (0.5, 1.0)] {
        let job = PulseJob::new(couplings.clone(), detuning, width, PulseShape::Sech, 2.0 * PI).unwrap();
        let fit = extract_reflection(&propagate(&job).unwrap(), &couplings).unwrap();
        assert!((fit.phase - analytic_sech_phase(width * detuning)).abs() < 1e-4);
    }
}

#[test]
fn complex_couplings_reflect_about_the_coupling_vector() {
    let couplings = vec![Complex64::new(0.3, 0.4), Complex64::new(0.0, -0.5), Complex64::new(0.6, 0.0)];
    let job = PulseJob::new(couplings.clone(), 0.5, 1.0, PulseShape::Sech, 2.0 * PI).unwrap();
    let u = propagate(&job).unwrap();
    let fit = extract_reflection(&u, &couplings).unwrap();
    assert!(fit.residual < 1e-6);
    assert!((fit.phase - analytic_sech_phase(0.5)).abs() < 1e-4);
    assert!(dark_space_defect(&u, &couplings) < 1e-6);
}

fn gaussian_leakage(d: usize, dt: f64, area: f64) -> f64 {
    let job = PulseJob::new(coupling_design(d).unwrap().as_complex(), dt, 1.0, PulseShape::Gaussian, area).unwrap();
    propagate(&job).unwrap().leakage()
}

// Golden-section search for the area that returns all population from the ancilla.
fn tune_gaussian_area(d: usize, dt: f64, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let mut fa = gaussian_leakage(d, dt, a);
    let mut fb = gaussian_leakage(d, dt, b);
    while hi - lo > 1e-9 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = gaussian_leakage(d, dt, a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = gaussian_leakage(d, dt, b);
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn tuned_gaussian_pulse_is_a_reflection() {
    let d = 3;
    // Resonant Gaussian pulses of area 2 pi already return the population.
    assert!(gaussian_leakage(d, 0.0, 2.0 * PI) < 1e-8);

    let dt = 0.5;
    assert!(gaussian_leakage(d, dt, 2.0 * PI) > LEAKAGE_THRESHOLD);
    let area = tune_gaussian_area(d, dt, 5.5, 7.0);
    let couplings = coupling_design(d).unwrap().as_complex();
    let job = PulseJob::new(couplings.clone(), dt, 1.0, PulseShape::Gaussian, area).unwrap();
    let u = propagate(&job).unwrap();
    let fit = extract_reflection(&u, &couplings).unwrap();
    assert!(fit.leakage < LEAKAGE_THRESHOLD);
    assert!(fit.residual < 1e-4);
    assert!(fit.phase.abs() > 0.1 && fit.phase.abs() < PI);
}
