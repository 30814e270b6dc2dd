//! Distributional identities of matrix processes whose spectra are not on
//! the acceptance list.

use rmt_flow::ensembles::{EnsembleSpec, EnsembleTag};
use rmt_flow::matproc::{terminal_spectra, MatrixProcessSpec, PathGrid, ProcessKind};
use rmt_flow::stats::{ks_test, MaxCdf};

fn top_vs(kind: ProcessKind, n: usize, t: f64, target: EnsembleSpec, seed: u64) -> f64 {
    let pts = terminal_spectra(&MatrixProcessSpec::new(kind, n, seed), &PathGrid::new(t, 1).unwrap(), 10_000).unwrap();
    let top: Vec<f64> = pts.iter().map(|p| *p.coords().last().unwrap()).collect();
    let table = MaxCdf::for_ensemble(&target).unwrap();
    ks_test(&top, |s| table.cdf(s)).unwrap().pvalue
}

#[test]
fn h1plus_spectrum_is_goe_of_double_size_at_double_time() {
    for n in 1..=2 {
        let p = top_vs(ProcessKind::Xi1plus, n, 0.7, EnsembleSpec::new(EnsembleTag::Goe, 2 * n, 1.4), 31 + n as u64);
        assert!(p > 0.01, "N={n}: p={p}");
    }
}

#[test]
fn antisymmetric_process_is_class_d_at_half_time() {
    for n in 1..=2 {
        let p = top_vs(ProcessKind::Ia, n, 0.9, EnsembleSpec::new(EnsembleTag::D, n, 0.45), 41 + n as u64);
        assert!(p > 0.01, "N={n}: p={p}");
    }
}
