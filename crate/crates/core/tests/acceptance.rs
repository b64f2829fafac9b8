//! Acceptance suite: one test per criterion, each printing a pass line.
//! Everything is seeded and deterministic; tolerances are pinned in the
//! assertions.

use graphforms::calculus::{
    assemble, cohomology, gauss_bonnet_sum, iota_embedding_check, kappa, space_basis,
    supersymmetry_check,
};
use graphforms::graph::Graph;
use graphforms::linalg::{cr, multiset_match, remove_near, CMatrix};
use graphforms::metric::{
    curvature_function, curvature_matches_index, metric_kernel, metric_spectrum,
    scattering_matrix, BoundaryCase, MetricProblem, SecularSolverConfig,
};
use graphforms::random::{
    random_dims, random_graph, random_psd_block, random_space, trial_rng,
};
use graphforms::space::{dual_space, make_space, orient_space, SpaceSpec, VertexSpace};

const PI: f64 = std::f64::consts::PI;

fn standard(g: &Graph) -> VertexSpace {
    make_space(g, &SpaceSpec::Standard).unwrap()
}

fn pass(n: usize, what: &str) {
    println!("acceptance {n:02} {what}: PASS");
}

/// The shared 200-case random batch for criteria 1, 2 and 5.
fn random_batch(seed: u64, cases: usize) -> Vec<(Graph, VertexSpace)> {
    (0..cases)
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let g = random_graph(&mut rng, 8, 14, None);
            let dims = random_dims(&g, &mut rng);
            let s = random_space(&g, &mut rng, &dims).unwrap();
            (g, s)
        })
        .collect()
}

#[test]
fn criterion_01_index_theorem_on_random_cases() {
    for (i, (g, s)) in random_batch(1001, 200).iter().enumerate() {
        let coh = cohomology(&assemble(g, s).unwrap()).unwrap();
        let expected = coh.dim_g as i64 - g.edge_count() as i64;
        assert_eq!(coh.b0 as i64 - coh.b1 as i64, expected, "case {i}");
    }
    pass(1, "index theorem on 200 random (graph, space) pairs");
}

#[test]
fn criterion_02_gauss_bonnet_exact() {
    for (i, (g, s)) in random_batch(1001, 200).iter().enumerate() {
        let coh = cohomology(&assemble(g, s).unwrap()).unwrap();
        let gb = gauss_bonnet_sum(&coh);
        let index = num::BigRational::from_integer(num::BigInt::from(coh.index));
        assert_eq!(gb, index, "case {i}");
    }
    pass(2, "discrete Gauss-Bonnet, exact rational, 200 cases");
}

#[test]
fn criterion_03_named_space_betti_table() {
    let c3 = Graph::cycle(3);
    let c4 = Graph::cycle(4);
    let k4 = Graph::complete(4);

    let betti = |g: &Graph, s: &VertexSpace| {
        let coh = cohomology(&assemble(g, s).unwrap()).unwrap();
        (coh.b0, coh.b1)
    };

    for g in [&c3, &c4, &k4] {
        let ne = g.edge_count();
        let nv = g.vertex_count();
        let min = make_space(g, &SpaceSpec::Minimal).unwrap();
        assert_eq!(betti(g, &min), (0, ne));
        let max = make_space(g, &SpaceSpec::Maximal).unwrap();
        assert_eq!(betti(g, &max), (ne, 0));
        let std = standard(g);
        assert_eq!(betti(g, &std), (1, ne - nv + 1));

        // Duality: sum and oriented sum against the oriented standard and
        // standard kernels.
        let or_std = orient_space(g, &std);
        let (or0, or1) = betti(g, &or_std);
        let sum = dual_space(&std);
        assert_eq!(betti(g, &sum), (or1, or0));
        let or_sum = dual_space(&or_std);
        let (s0, s1) = betti(g, &std);
        assert_eq!(betti(g, &or_sum), (s1, s0));
    }

    // Oriented standard counts bipartite components.
    assert_eq!(betti(&c3, &orient_space(&c3, &standard(&c3))), (0, 0));
    assert_eq!(betti(&c4, &orient_space(&c4, &standard(&c4))), (1, 1));

    // Magnetic fluxes pi and 2 pi on C3.
    let mag_pi =
        make_space(&c3, &SpaceSpec::Magnetic { alpha: vec![PI, 0.0, 0.0] }).unwrap();
    assert_eq!(betti(&c3, &mag_pi), (0, 0));
    let mag_2pi =
        make_space(&c3, &SpaceSpec::Magnetic { alpha: vec![2.0 * PI, 0.0, 0.0] }).unwrap();
    assert_eq!(betti(&c3, &mag_2pi), (1, 1));

    pass(3, "named-space Betti table");
}

#[test]
fn criterion_04_single_edge_model_indices() {
    let g = Graph::interval(1.0);
    let spaces = [
        (vec![CMatrix::zeros(1, 1), CMatrix::zeros(1, 1)], -1i64, "DD"),
        (vec![CMatrix::identity(1, 1), CMatrix::zeros(1, 1)], 0, "DN"),
        (vec![CMatrix::identity(1, 1), CMatrix::identity(1, 1)], 1, "NN"),
    ];
    for (ps, expected, name) in spaces {
        let s = make_space(&g, &SpaceSpec::Projections(ps)).unwrap();
        let coh = cohomology(&assemble(&g, &s).unwrap()).unwrap();
        assert_eq!(coh.index, expected, "{name}");
    }
    pass(4, "single-edge DD/DN/NN indices -1/0/+1");
}

#[test]
fn criterion_05_supersymmetry_on_random_cases() {
    for (i, (g, s)) in random_batch(1001, 200).iter().enumerate() {
        let ops = assemble(g, s).unwrap();
        supersymmetry_check(&ops, 1e-9)
            .unwrap_or_else(|e| panic!("case {i}: {e}"));
    }
    pass(5, "supersymmetric spectra agree within 1e-9, 200 cases");
}

#[test]
fn criterion_06_norm_bound() {
    // Unit lengths batch plus a random-lengths batch.
    for (i, (g, s)) in random_batch(1001, 100).iter().enumerate() {
        let ops = assemble(g, s).unwrap();
        let k = kappa(g, s);
        assert!(
            ops.d_norm() <= (2.0 * k).sqrt() * (1.0 + 1e-9),
            "unit case {i}: {} vs {}",
            ops.d_norm(),
            (2.0 * k).sqrt()
        );
    }
    for t in 0..100u64 {
        let mut rng = trial_rng(1006, t);
        let g = random_graph(&mut rng, 8, 14, Some((0.1, 10.0)));
        let dims = random_dims(&g, &mut rng);
        let s = random_space(&g, &mut rng, &dims).unwrap();
        let ops = assemble(&g, &s).unwrap();
        let k = kappa(&g, &s);
        assert!(
            ops.d_norm() <= (2.0 * k).sqrt() * (1.0 + 1e-9),
            "random-length case {t}: {} vs {}",
            ops.d_norm(),
            (2.0 * k).sqrt()
        );
    }
    pass(6, "operator norm of d bounded by sqrt(2 kappa), random lengths included");
}

#[test]
fn criterion_07_line_graph_relation_on_k4() {
    let rec = graphforms::relations::line_graph_relation(&Graph::complete(4)).unwrap();
    // spec lap0(L(K4)) minus {3/2} must equal 3/4 (spec lap0(K4) minus {2})
    // = {0, 1, 1, 1}.
    let lhs = remove_near(&rec.spectrum_line_graph, 1.5, 1e-9);
    let rhs: Vec<f64> = remove_near(&rec.spectrum_graph, 2.0, 1e-9)
        .into_iter()
        .map(|x| 0.75 * x)
        .collect();
    multiset_match(&lhs, &rhs, 1e-9).unwrap();
    multiset_match(&lhs, &[0.0, 1.0, 1.0, 1.0], 1e-9).unwrap();
    assert!(rec
        .spectrum_line_graph
        .iter()
        .all(|&x| x >= -1e-9 && x <= 1.5 + 1e-9));
    pass(7, "line-graph relation on K4, spectrum in [0, 3/2]");
}

#[test]
fn criterion_08_subdivision_relation() {
    for g in [Graph::cycle(3), Graph::complete(4)] {
        graphforms::relations::subdivision_relation(&g).unwrap();
    }
    pass(8, "subdivision relation on C3 and K4");
}

/// Shared random metric problems for criteria 9 and 10: dyadic rational
/// lengths, random spaces, random PSD L blocks.
fn metric_batch(seed: u64, per_case: usize) -> Vec<MetricProblem> {
    let mut out = Vec::new();
    for case in BoundaryCase::ALL {
        for t in 0..per_case {
            let mut rng = trial_rng(seed, (t + per_case * case as usize) as u64);
            let mut g = random_graph(&mut rng, 6, 9, None);
            // Dyadic rational lengths in [1/4, 4]: exact in binary floating
            // point, so the Gauss-Bonnet integral is exact.
            {
                use rand::RngExt;
                let ids: Vec<String> = g.vertex_ids().to_vec();
                let specs: Vec<graphforms::graph::EdgeSpec> = g
                    .edges()
                    .iter()
                    .map(|e| graphforms::graph::EdgeSpec {
                        src: ids[e.src].clone(),
                        dst: ids[e.dst].clone(),
                        length: Some(rng.random_range(1..=16) as f64 / 4.0),
                    })
                    .collect();
                g = graphforms::graph::build_graph(&ids, &specs).unwrap();
            }
            let dims = random_dims(&g, &mut rng);
            let s = random_space(&g, &mut rng, &dims).unwrap();
            let basis = space_basis(&g, &s).unwrap();
            let l_blocks: Vec<CMatrix> = (0..g.vertex_count())
                .map(|v| random_psd_block(&mut rng, basis.dim_at(v)))
                .collect();
            out.push(MetricProblem::new(g, s, l_blocks, case).unwrap());
        }
    }
    out
}

#[test]
fn criterion_09_metric_kernel_isomorphism() {
    for (i, p) in metric_batch(1009, 50).iter().enumerate() {
        let rep = metric_kernel(p).unwrap_or_else(|e| panic!("problem {i}: {e}"));
        assert_eq!(rep.metric_index, rep.expected_index, "problem {i}");
        assert_eq!(rep.metric_index, rep.discrete_index, "problem {i}");
        assert!(rep.phi_bijective, "problem {i}");
    }
    pass(9, "metric kernel isomorphism, 50 problems x 5 cases");
}

#[test]
fn criterion_10_quantum_graph_gauss_bonnet() {
    for (i, p) in metric_batch(1009, 50).iter().enumerate() {
        let rep = metric_kernel(p).unwrap();
        let curv = curvature_function(p).unwrap();
        assert!(
            curvature_matches_index(&curv, rep.metric_index),
            "problem {i}: integral {} vs index {}",
            curv.integral,
            rep.metric_index
        );
    }
    pass(10, "quantum-graph Gauss-Bonnet, exact rational, all case-9 problems");
}

#[test]
fn criterion_11_secular_solver() {
    // Dirichlet interval.
    let g = Graph::interval(1.0);
    let dirichlet = MetricProblem::with_zero_l(
        g.clone(),
        make_space(&g, &SpaceSpec::Minimal).unwrap(),
        BoundaryCase::Enlarged1Proj,
    )
    .unwrap();
    let cfg = SecularSolverConfig {
        mu_min: 0.5,
        mu_max: 10.0,
        grid_points: 400,
        ..Default::default()
    };
    let spec = metric_spectrum(&dirichlet, &cfg).unwrap();
    assert!(spec.len() >= 3);
    for (k, &(lambda, mult)) in spec.iter().take(3).enumerate() {
        let expect = ((k + 1) as f64 * PI).powi(2);
        assert!(
            (lambda - expect).abs() <= 1e-8 * expect,
            "Dirichlet eigenvalue {k}: {lambda} vs {expect}"
        );
        assert_eq!(mult, 1);
    }

    // Neumann interval.
    let neumann = MetricProblem::with_zero_l(
        g.clone(),
        standard(&g),
        BoundaryCase::Enlarged1Proj,
    )
    .unwrap();
    let cfg_n = SecularSolverConfig {
        mu_min: 0.5,
        mu_max: 7.0,
        grid_points: 400,
        ..Default::default()
    };
    let spec = metric_spectrum(&neumann, &cfg_n).unwrap();
    assert_eq!(spec[0], (0.0, 1));
    assert!((spec[1].0 - PI * PI).abs() <= 1e-8 * PI * PI);
    assert!((spec[2].0 - 4.0 * PI * PI).abs() <= 4e-8 * PI * PI);

    // Loop with double eigenvalues.
    let lg = Graph::loop_graph(1.0);
    let loop_problem = MetricProblem::with_zero_l(
        lg.clone(),
        standard(&lg),
        BoundaryCase::Enlarged1Proj,
    )
    .unwrap();
    let cfg_l = SecularSolverConfig {
        mu_min: 0.5,
        mu_max: 14.0,
        grid_points: 600,
        ..Default::default()
    };
    let spec = metric_spectrum(&loop_problem, &cfg_l).unwrap();
    assert_eq!(spec[0], (0.0, 1));
    assert!((spec[1].0 - 4.0 * PI * PI).abs() <= 4e-8 * PI * PI);
    assert_eq!(spec[1].1, 2);
    assert!((spec[2].0 - 16.0 * PI * PI).abs() <= 1.6e-7 * PI * PI);
    assert_eq!(spec[2].1, 2);

    pass(11, "secular solver: Dirichlet/Neumann interval, loop multiplicities");
}

#[test]
fn criterion_12_scattering() {
    // Random (G, L): unitary within 1e-10 at mu in {0.1, 1, 10}.
    for t in 0..10u64 {
        let mut rng = trial_rng(1012, t);
        let g = random_graph(&mut rng, 5, 8, None);
        let dims = random_dims(&g, &mut rng);
        let s = random_space(&g, &mut rng, &dims).unwrap();
        let basis = space_basis(&g, &s).unwrap();
        let l_blocks: Vec<CMatrix> = (0..g.vertex_count())
            .map(|v| random_psd_block(&mut rng, basis.dim_at(v)))
            .collect();
        let p = MetricProblem::new(g, s, l_blocks, BoundaryCase::Simple).unwrap();
        for mu in [0.1, 1.0, 10.0] {
            let rec = scattering_matrix(&p, mu).unwrap();
            assert!(rec.unitarity_residual <= 1e-10, "trial {t} mu {mu}");
        }
    }
    // L = 0: S = Id (+) -Id exactly, for every mu.
    let g = Graph::complete(4);
    let p = MetricProblem::with_zero_l(g.clone(), standard(&g), BoundaryCase::Simple).unwrap();
    let dim_g = 4;
    for mu in [0.1, 1.0, 10.0, 123.456] {
        let rec = scattering_matrix(&p, mu).unwrap();
        let n = rec.s_blocks.nrows();
        for i in 0..n {
            for j in 0..n {
                let expect = if i != j {
                    cr(0.0)
                } else if i < dim_g {
                    cr(1.0)
                } else {
                    cr(-1.0)
                };
                assert_eq!(rec.s_blocks[(i, j)], expect, "({i},{j}) at mu {mu}");
            }
        }
    }
    pass(12, "scattering unitary at 1e-10; S = Id (+) -Id exactly for L = 0");
}

#[test]
fn criterion_13_iota_embedding() {
    let mut graphs = vec![
        Graph::interval(1.0),
        Graph::interval(2.0),
        Graph::cycle(3),
        Graph::cycle(4),
        Graph::cycle(6),
        Graph::complete(4),
        Graph::octahedron(),
        Graph::path(5),
        Graph::loop_graph(1.0),
    ];
    for t in 0..20u64 {
        let mut rng = trial_rng(1013, t);
        graphs.push(random_graph(&mut rng, 8, 14, Some((0.1, 10.0))));
    }
    for (i, g) in graphs.iter().enumerate() {
        let rec = iota_embedding_check(g).unwrap();
        assert!(rec.gram_residual <= 1e-12, "graph {i}");
        assert_eq!(rec.dim_ker_dmax, g.edge_count(), "graph {i}");
        assert!(rec.kernel_residual <= 1e-12, "graph {i}");
    }
    pass(13, "iota is an isometry onto ker d-max on all test graphs");
}

#[test]
fn criterion_14_deterministic_reports() {
    let bin = env!("CARGO_BIN_EXE_graphforms");
    let run = |args: &[&str]| {
        let out = std::process::Command::new(bin)
            .args(args)
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "command failed: {args:?}");
        out.stdout
    };
    for args in [
        vec!["fuzz", "k4-standard", "--trials", "5", "--seed", "7", "--format", "json"],
        vec!["metric-spectrum", "interval-dirichlet", "--format", "json"],
        vec!["betti", "c3-magnetic-pi", "--format", "json"],
        vec!["index", "c4-standard", "--format", "text"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a, b, "outputs differ for {args:?}");
    }
    pass(14, "byte-identical reports across reruns with fixed seeds");
}
