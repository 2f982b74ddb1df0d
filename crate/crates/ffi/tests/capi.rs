use mdf_core::dirichlet::{dirichlet_operator, DirichletSpec, Engine};
use mdf_core::kernel::KernelFunction;
use mdf_core::linalg::CMat;
use mdf_core::standard_form::{DensityMatrix, StandardForm};
use mdf_ffi::*;
use num_complex::Complex64;
use std::ffi::{CStr, CString};
use std::ptr;

fn interleave(m: &CMat) -> Vec<f64> {
    let n = m.nrows();
    let mut v = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            v.push(m[(i, j)].re);
            v.push(m[(i, j)].im);
        }
    }
    v
}

fn rho() -> CMat {
    CMat::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.6, 0.0),
            Complex64::new(0.1, 0.05),
            Complex64::new(0.1, -0.05),
            Complex64::new(0.4, 0.0),
        ],
    )
}

fn x() -> CMat {
    CMat::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.3, 0.0),
            Complex64::new(1.0, 0.2),
            Complex64::new(-0.4, 0.7),
            Complex64::new(0.0, -0.5),
        ],
    )
}

fn last_error() -> String {
    let p = mdf_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn dirichlet_operator_matches_core() {
    let r = interleave(&rho());
    let xv = interleave(&x());
    let mut sf = ptr::null_mut();
    let mut op = ptr::null_mut();
    unsafe {
        assert_eq!(mdf_standard_form_new(2, r.as_ptr(), &mut sf), MdfStatus::Ok);
        assert_eq!(mdf_standard_form_dim(sf), 2);
        let status = mdf_dirichlet_operator(sf, xv.as_ptr(), MdfKernel::F0, 0.0, MdfEngine::ExactSpectral, &mut op);
        assert_eq!(status, MdfStatus::Ok);
        assert_eq!(mdf_superop_dim(op), 2);

        let mut buf = vec![0.0; 32];
        assert_eq!(mdf_superop_copy_matrix(op, buf.as_mut_ptr(), buf.len()), MdfStatus::Ok);

        let core_sf = StandardForm::new(DensityMatrix::new(rho()).unwrap()).unwrap();
        let spec = DirichletSpec::new(x(), KernelFunction::F0, Engine::ExactSpectral).unwrap();
        let h = dirichlet_operator(&spec, &core_sf).unwrap();
        let expected = interleave(h.matrix());
        let diff = buf
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-14, "{diff}");

        // H kills xi0 = rho^{1/2}.
        let xi0 = interleave(core_sf.xi0().matrix());
        let mut out = vec![1.0; 8];
        assert_eq!(mdf_superop_apply(sf, op, xi0.as_ptr(), out.as_mut_ptr()), MdfStatus::Ok);
        assert!(out.iter().all(|v| v.abs() < 1e-10), "{out:?}");

        let mut gap = 0.0;
        let mut kernel_dim = 0;
        assert_eq!(mdf_spectral_gap(op, &mut gap, &mut kernel_dim), MdfStatus::Ok);
        assert!(gap > 0.0 && kernel_dim >= 1);

        mdf_superop_free(op);
        mdf_standard_form_free(sf);
    }
}

#[test]
fn induced_operator_of_tracial_double_commutator_has_gap_four() {
    let y = interleave(&CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
    ])));
    let mut sf = ptr::null_mut();
    let mut op = ptr::null_mut();
    unsafe {
        assert_eq!(mdf_standard_form_tracial(2, &mut sf), MdfStatus::Ok);
        assert_eq!(
            mdf_induced_operator(sf, y.as_ptr(), 1, ptr::null(), &mut op),
            MdfStatus::Ok
        );
        let mut gap = 0.0;
        let mut kernel_dim = 0;
        assert_eq!(mdf_spectral_gap(op, &mut gap, &mut kernel_dim), MdfStatus::Ok);
        assert!((gap - 4.0).abs() < 1e-12, "{gap}");
        assert_eq!(kernel_dim, 2);
        mdf_superop_free(op);
        mdf_standard_form_free(sf);
    }
}

#[test]
fn errors_are_reported_with_codes_and_messages() {
    let not_a_state = interleave(&CMat::identity(2, 2));
    let mut sf = ptr::null_mut();
    unsafe {
        assert_eq!(
            mdf_standard_form_new(2, not_a_state.as_ptr(), &mut sf),
            MdfStatus::NotAState
        );
        assert!(sf.is_null());
        assert!(last_error().contains("not a state"));

        assert_eq!(mdf_standard_form_new(2, ptr::null(), &mut sf), MdfStatus::NullPointer);
        assert!(last_error().contains("rho"));

        let r = interleave(&rho());
        assert_eq!(mdf_standard_form_new(2, r.as_ptr(), &mut sf), MdfStatus::Ok);
        assert!(mdf_last_error_message().is_null());

        let xv = interleave(&x());
        let mut op = ptr::null_mut();
        let status = mdf_dirichlet_operator(
            sf,
            xv.as_ptr(),
            MdfKernel::Cauchy,
            0.1,
            MdfEngine::ExactSpectral,
            &mut op,
        );
        assert_eq!(status, MdfStatus::NotAdmissible);

        assert_eq!(
            mdf_dirichlet_operator(sf, xv.as_ptr(), MdfKernel::F0, 0.0, MdfEngine::Quadrature, &mut op),
            MdfStatus::Ok
        );
        let mut small = vec![0.0; 4];
        assert_eq!(
            mdf_superop_copy_matrix(op, small.as_mut_ptr(), small.len()),
            MdfStatus::BufferTooSmall
        );

        mdf_superop_free(op);
        mdf_standard_form_free(sf);
        mdf_standard_form_free(ptr::null_mut());
        assert_eq!(mdf_standard_form_dim(ptr::null()), 0);
    }
}

#[test]
fn scenario_json_round_trip() {
    let json = CString::new(mdf_core::corpus::bundled("tracial_double_commutator").unwrap()).unwrap();
    let mut report = ptr::null_mut();
    let mut passed = false;
    unsafe {
        assert_eq!(
            mdf_run_scenario_json(json.as_ptr(), -1, &mut report, &mut passed),
            MdfStatus::Ok
        );
        assert!(passed);
        let text = CStr::from_ptr(report).to_str().unwrap().to_owned();
        mdf_string_free(report);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["passed"], true);
        assert_eq!(value["seed"], 1);

        let bad = CString::new(r#"{"name": "x", "dim": 2}"#).unwrap();
        let status = mdf_run_scenario_json(bad.as_ptr(), 0, &mut report, &mut passed);
        assert_eq!(status, MdfStatus::InvalidInput);
    }
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(mdf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
