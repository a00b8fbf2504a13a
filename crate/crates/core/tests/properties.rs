//! Property suites over random graphs and matrices.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use semireg::experiments::{run_ensemble, Histogram, RunOptions};
use semireg::generators::{complete_bipartite, generate_regular, generate_rsrb, ModelParams, RsrbParams};
use semireg::io;
use semireg::series::{builtin_system, growth_rate, solve_output, GfSystem, SystemKind};
use semireg::spectra::{adjacency_spectrum, algebraic_connectivity, eigenvalues_sym, ks_distance, laplacian_spectrum};
use semireg::{BigRational, DenseMatrix, Multigraph};

fn multigraph() -> impl Strategy<Value = Multigraph> {
    (2usize..24).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..50).prop_map(move |edges| Multigraph::new(n, edges).unwrap())
    })
}

fn loopless() -> impl Strategy<Value = Multigraph> {
    multigraph().prop_map(|g| {
        let edges = g.edges().iter().copied().filter(|&(u, v)| u != v).collect();
        Multigraph::new(g.n(), edges).unwrap()
    })
}

fn simple_cubic() -> impl Strategy<Value = Multigraph> {
    (2usize..16, any::<u64>()).prop_filter_map("rewire failed", |(half, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        generate_regular(3, 2 * half, &mut rng).ok()?.rewire_to_simple(&mut rng).ok()
    })
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_ignores_loops(g in multigraph(), v in 0usize..24, k in 1usize..4) {
        let v = v % g.n();
        let looped = g.with_loops(v, k).unwrap();
        prop_assert_eq!(looped.laplacian(), g.laplacian());
        prop_assert_eq!(looped.adjacency().trace(), g.adjacency().trace() + k as f64);
    }

    #[test]
    fn stub_degrees_sum_to_twice_edges(g in multigraph()) {
        prop_assert_eq!(g.stub_degrees().iter().sum::<usize>(), 2 * g.m());
        let lap = g.laplacian();
        for i in 0..g.n() {
            prop_assert!(lap.row(i).iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn subdivision_doubles_girth(g in loopless()) {
        let s = g.subdivide().unwrap();
        prop_assert_eq!(s.girth(), g.girth().map(|x| 2 * x));
        prop_assert_eq!(s.n(), g.n() + g.m());
        prop_assert_eq!(s.m(), 2 * g.m());
    }

    #[test]
    fn subdivide_then_contract_keeps_spectrum(g in simple_cubic()) {
        let back = g.subdivide().unwrap().contract_degree2().unwrap();
        let a = laplacian_spectrum(&g).unwrap().values;
        let b = laplacian_spectrum(&back).unwrap().values;
        prop_assert!(close(&a, &b, 1e-9));
        let a = adjacency_spectrum(&g).unwrap().values;
        let b = adjacency_spectrum(&back).unwrap().values;
        prop_assert!(close(&a, &b, 1e-9));
    }

    #[test]
    fn rewiring_keeps_stub_degrees_and_sides(n1 in 1usize..40, seed in any::<u64>()) {
        let p = RsrbParams::new(2, 3, 3 * n1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = generate_rsrb(&p, &mut rng);
        if let Ok(h) = g.rewire_to_simple(&mut rng) {
            prop_assert!(h.is_simple());
            prop_assert_eq!(h.stub_degrees(), g.stub_degrees());
            prop_assert_eq!(h.m(), g.m());
            prop_assert!(h.edges().iter().all(|&(u, v)| u < p.n1 && v >= p.n1));
        }
    }

    #[test]
    fn moments_are_closed_walks(g in multigraph()) {
        let walks = g.closed_walk_counts(6);
        let moments = adjacency_spectrum(&g).unwrap().moments(6);
        for (w, m) in walks.iter().zip(&moments) {
            prop_assert!((w - m).abs() <= 1e-8 * w.abs().max(1.0), "{w} vs {m}");
        }
    }

    #[test]
    fn eigenvalues_match_nalgebra(n in 1usize..40, entries in prop::collection::vec(-5.0f64..5.0, 1600)) {
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                rows[i][j] = entries[i * 40 + j];
                rows[j][i] = entries[i * 40 + j];
            }
        }
        let ours = eigenvalues_sym(&DenseMatrix::from_rows(&rows)).unwrap().values;
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let mut theirs: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        prop_assert!(close(&ours, &theirs, 1e-10 * (n as f64) * 5.0));
    }

    #[test]
    fn complete_bipartite_ac_is_smaller_side(b in 1usize..12, extra in 0usize..12) {
        // K(1,1) is the exception: its AC is 2
        prop_assume!(b > 1 || extra > 0);
        let n = 2 * b + extra;
        let ac = algebraic_connectivity(&complete_bipartite(b, n).unwrap()).unwrap();
        prop_assert!((ac - b as f64).abs() < 1e-9);
    }

    #[test]
    fn edge_csv_round_trips(g in multigraph()) {
        let back = io::read_edge_csv(&io::write_edge_csv(&g), Some(g.n())).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn spectrum_csv_round_trips(v in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 0..40)) {
        prop_assert_eq!(io::read_spectrum_csv(&io::write_spectrum_csv(&v)).unwrap(), v);
    }

    #[test]
    fn histogram_counts_everything(v in prop::collection::vec(-1e3f64..1e3, 1..200), bins in 1usize..100) {
        let h = Histogram::new(&v, bins);
        prop_assert_eq!(h.counts.iter().sum::<u64>() as usize, v.len());
        prop_assert_eq!(h.edges.len(), bins + 1);
    }

    #[test]
    fn ks_is_a_distance(mut v in prop::collection::vec(0.0f64..1.0, 1..100)) {
        v.sort_by(f64::total_cmp);
        let d = ks_distance(&v, |x| x.clamp(0.0, 1.0));
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!(d >= 0.5 / v.len() as f64 - 1e-15);
    }

    #[test]
    fn system_text_round_trips(d1 in 1u32..6, d2 in 1u32..9) {
        let sys = builtin_system(&SystemKind::Rsrb { d1, d2 }).unwrap();
        let again = GfSystem::parse_with_step(&sys.to_text(), sys.default_step()).unwrap();
        let a = solve_output::<BigRational>(&sys, 10);
        let b = solve_output::<BigRational>(&again, 10);
        prop_assert_eq!(a, b);
    }
}

#[test]
fn catalan_numbers_and_ratio_limit() {
    let s = solve_output::<BigRational>(&builtin_system(&SystemKind::Catalan).unwrap(), 30);
    let c: Vec<String> = s.coeffs().iter().take(8).map(|x| x.to_string()).collect();
    assert_eq!(c, ["1", "1", "2", "5", "14", "42", "132", "429"]);
    assert_eq!(s.coeff(30).to_string(), "3814986502092304");
    let big = solve_output::<semireg::series::ExtFloat>(&builtin_system(&SystemKind::Catalan).unwrap(), 2000);
    assert!((growth_rate(&big, 1).unwrap() - 4.0).abs() < 1e-3);
}

#[test]
fn ensembles_are_byte_identical_across_worker_counts() {
    let model = ModelParams::Rsrb(RsrbParams::new(2, 6, 60).unwrap());
    let reports: Vec<String> = [1, 2, 4]
        .iter()
        .map(|&jobs| io::to_json(&run_ensemble(&model, &RunOptions::new(10, 9).jobs(jobs)).unwrap()).unwrap())
        .collect();
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0], reports[2]);
}
