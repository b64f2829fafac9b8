//! Shared command dispatch behind the CLI and the C ABI: every subcommand
//! maps a validated problem to a deterministic [`Report`].

use serde_json::json;

use crate::calculus::{
    assemble, cohomology, gauss_bonnet_sum, hodge, index_stability_fuzz, iota_embedding_check,
    kappa, magnetic_cohomology_predict, supersymmetry_check,
};
use crate::error::{Error, Result};
use crate::linalg::spectral_norm;
use crate::metric::{
    curvature_function, curvature_matches_index, metric_kernel, metric_spectrum,
    scattering_matrix, scattering_mu_independent,
};
use crate::problem::{sha256_hex, BuiltProblem};
use crate::relations::{line_graph_relation, subdivision_relation, zero_form_dual_relation};
use crate::report::{float_list, Check, Report};
use crate::space::SpaceKind;

pub const COMMANDS: &[&str] = &[
    "betti",
    "index",
    "hodge",
    "spectrum",
    "relations",
    "metric-kernel",
    "metric-spectrum",
    "scatter",
    "curvature",
    "fuzz",
];

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub mu_max: Option<f64>,
    pub grid: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 0, trials: 20, tol: 1e-9, mu_max: None, grid: None }
    }
}

/// Runs one verification command. `raw` is the problem document as read,
/// folded into the report digest together with the reproducibility flags.
pub fn run_command(
    command: &str,
    built: &BuiltProblem,
    raw: &[u8],
    opts: &RunOptions,
) -> Result<Report> {
    let mut digest_input = raw.to_vec();
    digest_input.extend_from_slice(
        format!("|seed={}|trials={}|tol={}", opts.seed, opts.trials, opts.tol).as_bytes(),
    );
    let mut report = Report::new(command, sha256_hex(&digest_input));
    match command {
        "betti" => cmd_betti(built, &mut report)?,
        "index" => cmd_index(built, &mut report)?,
        "hodge" => cmd_hodge(built, &mut report)?,
        "spectrum" => cmd_spectrum(built, opts.tol, &mut report)?,
        "relations" => cmd_relations(built, &mut report)?,
        "metric-kernel" => cmd_metric_kernel(built, &mut report)?,
        "metric-spectrum" => cmd_metric_spectrum(built, opts, &mut report)?,
        "scatter" => cmd_scatter(built, &mut report)?,
        "curvature" => cmd_curvature(built, &mut report)?,
        "fuzz" => {
            report.seed = Some(opts.seed);
            cmd_fuzz(built, opts.trials, opts.seed, &mut report)?
        }
        other => {
            return Err(Error::SchemaError(format!(
                "unknown command `{other}`; expected one of {}",
                COMMANDS.join(", ")
            )))
        }
    }
    Ok(report)
}

fn cmd_betti(built: &BuiltProblem, report: &mut Report) -> Result<()> {
    let ops = assemble(&built.graph, &built.space)?;
    let coh = cohomology(&ops)?;
    report.insert_result("b0", json!(coh.b0));
    report.insert_result("b1", json!(coh.b1));
    report.insert_result("index", json!(coh.index));
    report.insert_result("dim_g", json!(coh.dim_g));
    report.insert_result("edges", json!(coh.edge_count));
    report.push(Check::exact(
        "index_theorem",
        coh.dim_g as i64 - coh.edge_count as i64,
        coh.index,
    ));
    report.push(Check::boolean("gauss_bonnet", coh.gauss_bonnet_ok));
    if built.space.kind() == SpaceKind::Magnetic {
        if let Some(alpha) = built.space.alpha() {
            let (b0, b1) = magnetic_cohomology_predict(&built.graph, alpha)?;
            report.push(Check::exact("magnetic_b0_prediction", b0, coh.b0));
            report.push(Check::exact("magnetic_b1_prediction", b1, coh.b1));
        }
    }
    Ok(())
}

fn cmd_index(built: &BuiltProblem, report: &mut Report) -> Result<()> {
    let ops = assemble(&built.graph, &built.space)?;
    let coh = cohomology(&ops)?;
    let k = kappa(&built.graph, &built.space);
    report.insert_result("index", json!(coh.index));
    report.insert_result("dim_g", json!(coh.dim_g));
    report.insert_result("kappa", json!(k));
    report.insert_result("d_norm", json!(ops.d_norm()));
    report.insert_result(
        "curvature",
        json!(coh.curvature_twice.iter().map(|&x| x as f64 / 2.0).collect::<Vec<f64>>()),
    );
    report.push(Check::exact(
        "index_theorem",
        coh.dim_g as i64 - coh.edge_count as i64,
        coh.index,
    ));
    let gb = gauss_bonnet_sum(&coh);
    report.push(Check::exact("gauss_bonnet", gb.to_string(), coh.index.to_string()));
    report.push(Check::residual(
        "norm_bound",
        (2.0 * k).sqrt() * (1.0 + 1e-9),
        ops.d_norm(),
    ));
    Ok(())
}

fn cmd_hodge(built: &BuiltProblem, report: &mut Report) -> Result<()> {
    let ops = assemble(&built.graph, &built.space)?;
    let h = hodge(&ops)?;
    report.insert_result("dim_ker_d", json!(h.dim_ker_d));
    report.insert_result("dim_ran_dstar", json!(h.dim_ran_dstar));
    report.insert_result("dim_ker_dstar", json!(h.dim_ker_dstar));
    report.insert_result("dim_ran_d", json!(h.dim_ran_d));
    report.push(Check::boolean("dimension_split", h.dims_ok));
    report.push(Check::residual("orthogonality_0forms", 1e-10, h.residual0));
    report.push(Check::residual("orthogonality_1forms", 1e-10, h.residual1));
    Ok(())
}

fn cmd_spectrum(built: &BuiltProblem, tol: f64, report: &mut Report) -> Result<()> {
    let ops = assemble(&built.graph, &built.space)?;
    let spec0 = ops.lap0_spectrum();
    let spec1 = ops.lap1_spectrum();
    report.insert_result("lap0_spectrum", float_list(&spec0));
    report.insert_result("lap1_spectrum", float_list(&spec1));
    match supersymmetry_check(&ops, tol) {
        Ok(susy) => {
            report.insert_result("paired", json!(susy.pairs.len()));
            report.push(Check::boolean("supersymmetry", true));
        }
        Err(Error::SpectraMismatch(a, b)) => {
            report.push(Check::new(
                "supersymmetry",
                "paired spectra",
                format!("unmatched {a:?} vs {b:?}"),
                false,
            ));
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

fn cmd_relations(built: &BuiltProblem, report: &mut Report) -> Result<()> {
    let g = &built.graph;
    let mut skipped: Vec<String> = Vec::new();
    match line_graph_relation(g) {
        Ok(rec) => {
            report.insert_result("line_graph_spectrum", float_list(&rec.spectrum_line_graph));
            report.push(Check::boolean("line_graph_relation", true));
            report.push(Check::boolean("line_graph_spectrum_range", rec.range_ok));
            report.push(Check::boolean("line_graph_susy", rec.susy_ok));
        }
        Err(Error::RelationFailed { relation, detail }) => {
            report.push(Check::new(&relation, "holds", detail, false));
        }
        Err(e) => skipped.push(format!("line-graph: {e}")),
    }
    match subdivision_relation(g) {
        Ok(rec) => {
            report.insert_result("subdivision_spectrum", float_list(&rec.spectrum_subdivision));
            report.insert_result(
                "subdivision_multiplicity_of_one",
                json!(rec.multiplicity_of_one),
            );
            report.push(Check::boolean("subdivision_relation", true));
            report.push(Check::boolean("subdivision_susy", rec.susy_ok));
        }
        Err(Error::RelationFailed { relation, detail }) => {
            report.push(Check::new(&relation, "holds", detail, false));
        }
        Err(e) => skipped.push(format!("subdivision: {e}")),
    }
    match zero_form_dual_relation(g, &built.space) {
        Ok(rec) => {
            report.insert_result("lap0_spectrum", float_list(&rec.spectrum));
            report.insert_result("lap0_dual_spectrum", float_list(&rec.spectrum_dual));
            report.push(Check::boolean("zero_form_dual_relation", true));
        }
        Err(Error::RelationFailed { relation, detail }) => {
            report.push(Check::new(&relation, "holds", detail, false));
        }
        Err(e) => skipped.push(format!("dual: {e}")),
    }
    if !skipped.is_empty() {
        report.insert_result("skipped", json!(skipped));
    }
    Ok(())
}

fn cmd_metric_kernel(built: &BuiltProblem, report: &mut Report) -> Result<()> {
    let rep = metric_kernel(&built.metric)?;
    report.insert_result("case", json!(built.metric.case.name()));
    report.insert_result("dim_ker_de", json!(rep.dim_ker_de));
    report.insert_result("dim_ker_de_star", json!(rep.dim_ker_de_star));
    report.insert_result("metric_index", json!(rep.metric_index));
    report.push(Check::exact("index_vs_discrete", rep.discrete_index, rep.metric_index));
    report.push(Check::exact("index_closed_form", rep.expected_index, rep.metric_index));
    report.push(Check::boolean("phi_bijective", rep.phi_bijective));
    let curv = curvature_function(&built.metric)?;
    report.push(Check::boolean(
        "gauss_bonnet_qg",
        curvature_matches_index(&curv, rep.metric_index),
    ));
    Ok(())
}

fn cmd_metric_spectrum(
    built: &BuiltProblem,
    opts: &RunOptions,
    report: &mut Report,
) -> Result<()> {
    let mut cfg = built.solver.clone();
    if let Some(m) = opts.mu_max {
        cfg.mu_max = m;
    }
    if let Some(n) = opts.grid {
        cfg.grid_points = n;
    }
    let spec = metric_spectrum(&built.metric, &cfg)?;
    report.insert_result(
        "eigenvalues",
        json!(spec
            .iter()
            .map(|&(l, m)| json!({"lambda": l, "multiplicity": m}))
            .collect::<Vec<_>>()),
    );
    report.insert_result("mu_range", json!([cfg.mu_min, cfg.mu_max]));
    report.push(Check::boolean("solver_completed", true));
    Ok(())
}

fn cmd_scatter(built: &BuiltProblem, report: &mut Report) -> Result<()> {
    let mus = [0.1, 1.0, 10.0];
    let mut l_norm: f64 = 0.0;
    for b in &built.metric.l_blocks {
        l_norm = l_norm.max(spectral_norm(b));
    }
    for &mu in &mus {
        let rec = scattering_matrix(&built.metric, mu)?;
        report.push(Check::residual(
            &format!("unitary_mu_{mu}"),
            1e-10,
            rec.unitarity_residual,
        ));
        report.push(Check::residual(
            &format!("construction_mu_{mu}"),
            1e-10,
            rec.construction_residual,
        ));
    }
    let indep = scattering_mu_independent(&built.metric, &mus)?;
    report.insert_result("l_norm", json!(l_norm));
    report.insert_result("mu_independent", json!(indep));
    report.push(Check::exact("mu_independent_iff_l_zero", l_norm <= 1e-12, indep));
    Ok(())
}

fn cmd_curvature(built: &BuiltProblem, report: &mut Report) -> Result<()> {
    let rep = metric_kernel(&built.metric)?;
    let curv = curvature_function(&built.metric)?;
    report.insert_result(
        "vertex_curvature",
        json!(curv
            .vertex_curvature_twice
            .iter()
            .map(|&x| x as f64 / 2.0)
            .collect::<Vec<f64>>()),
    );
    report.insert_result(
        "edge_coefficients",
        json!(curv
            .edge_coefficients
            .iter()
            .map(|&(a, b)| json!({"offset": a, "slope": b}))
            .collect::<Vec<_>>()),
    );
    report.insert_result("integral", json!(curv.integral.to_string()));
    report.push(Check::exact(
        "integral_equals_index",
        rep.metric_index.to_string(),
        curv.integral.to_string(),
    ));
    report.push(Check::exact(
        "integral_equals_vertex_sum",
        curv.vertex_sum.to_string(),
        curv.integral.to_string(),
    ));
    Ok(())
}

fn cmd_fuzz(
    built: &BuiltProblem,
    trials: usize,
    seed: u64,
    report: &mut Report,
) -> Result<()> {
    let ops = assemble(&built.graph, &built.space)?;
    let dims: Vec<usize> =
        (0..built.graph.vertex_count()).map(|v| ops.basis.dim_at(v)).collect();
    let rep = index_stability_fuzz(&built.graph, &dims, trials, seed)?;
    report.insert_result("dims", json!(dims));
    report.insert_result("expected_index", json!(rep.expected_index));
    report.insert_result("model_index", json!(rep.model_index));
    report.insert_result("trial_indices", json!(rep.trial_indices));
    let hits = rep.trial_indices.iter().filter(|&&i| i == rep.expected_index).count();
    report.insert_result("matching_trials", json!(format!("{hits}/{trials}")));
    report.push(Check::boolean("index_stable", rep.all_ok));
    // The edge-space embedding is graph-level; fuzz runs it alongside.
    let iota = iota_embedding_check(&built.graph)?;
    report.push(Check::residual("iota_isometry", 1e-12, iota.gram_residual));
    report.push(Check::exact("iota_range_dim", iota.edge_count, iota.dim_ker_dmax));
    Ok(())
}
