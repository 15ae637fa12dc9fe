//! The five subcommands. Every command that writes artifacts first puts a
//! "running" manifest in the output directory and finalizes it when done, so
//! an interrupted or failed run never leaves an unmarked partial directory.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use heavylimits::cluster::{ClusterConstants, ClusterLaw, McEstimate};
use heavylimits::limit::{triple_v, triple_w, CharTriple, PoissonSeries, StableParams, VMeta, WMeta};
use heavylimits::metric::{d_m1, d_p, M1Options};
use heavylimits::models::ModelKind;
use heavylimits::seeds::{self, Purpose};
use heavylimits::verify::{
    fclt_experiment, karamata_check, self_normalized_process, small_jump_diagnostic,
    KaramataReport, SmallJumpRow,
};
use serde::Serialize;

use crate::config::FileConfig;
use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::pathio;

/// Runs `body` between the two manifest writes, collecting output file names.
fn with_manifest(
    command: &'static str,
    cfg: &FileConfig,
    out: &Path,
    body: impl FnOnce(&mut Vec<String>) -> Result<(), CliError>,
) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let mut manifest = RunManifest::start(command, cfg.digest(), cfg.experiment.seed);
    manifest.write(out)?;
    let mut outputs = Vec::new();
    let result = body(&mut outputs);
    manifest.finish(result.is_ok(), outputs);
    match result {
        Ok(()) => {
            manifest.write(out)?;
            Ok(())
        }
        Err(e) => {
            // The failure marker is best-effort; the original error wins.
            let _ = manifest.write(out);
            Err(e)
        }
    }
}

fn write_json<D: Serialize>(
    out: &Path,
    name: &str,
    doc: &D,
    outputs: &mut Vec<String>,
) -> Result<(), CliError> {
    let path = out.join(name);
    let mut body = serde_json::to_string_pretty(doc).expect("report serializes");
    body.push('\n');
    fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
    outputs.push(name.to_string());
    Ok(())
}

/// Finite-sample series paths plus their normalizing sequence. Each
/// replicate is written twice: the raw series, and its self-normalized
/// partial-sum path in the dialect `m1dist` reads.
pub fn cmd_simulate(cfg: &FileConfig, out: &Path) -> Result<u8, CliError> {
    let spec = cfg.model_spec()?;
    let n = cfg.experiment.n;
    let seed = cfg.experiment.seed;
    with_manifest("simulate", cfg, out, |outputs| {
        let norm = spec.norm_seq(n, seed)?;
        write_json(out, "norm_seq.json", &norm, outputs)?;
        for r in 0..cfg.simulate.paths {
            let mut rng = seeds::derive(seed, Purpose::Paths, r as u64);
            let xs = spec.sample_path(n, &mut rng)?;
            let name = format!("path_{r:04}.csv");
            pathio::write_series_csv(&out.join(&name), &xs)?;
            outputs.push(name);
            let selfnorm = self_normalized_process(&xs, &norm)?;
            let name = format!("selfnorm_path_{r:04}.csv");
            pathio::write_path_csv(&out.join(&name), &selfnorm, &["x"])?;
            outputs.push(name);
        }
        Ok(())
    })?;
    Ok(0)
}

#[derive(Serialize)]
struct TriplesDoc {
    theta: McEstimate<f64>,
    constants: ClusterConstants<f64>,
    triple_v: CharTriple<f64>,
    triple_w: CharTriple<f64>,
    stable_v: StableParams<f64>,
    stable_w: StableParams<f64>,
}

#[derive(Serialize)]
struct SeriesMetaEntry {
    file: String,
    v: VMeta<f64>,
    w: WMeta<f64>,
}

#[derive(Serialize)]
struct SeriesMetaDoc {
    n_points: usize,
    refined: bool,
    u_min: Option<f64>,
    paths: Vec<SeriesMetaEntry>,
}

/// Limit paths (V, W) from the Poisson series, plus the characteristic
/// triples of their marginals. `refine` doubles the series point count.
pub fn cmd_limit(cfg: &FileConfig, out: &Path, refine: bool) -> Result<u8, CliError> {
    let exp = cfg.experiment()?;
    let spec = &exp.model;
    let alpha = spec.law.alpha;
    let p = spec.law.p;
    let n_points = exp.n_points * if refine { 2 } else { 1 };
    let u_min = (alpha >= 1.0).then_some(exp.u_min);
    with_manifest("limit", cfg, out, |outputs| {
        let mut cluster_rng = seeds::derive(exp.seed, Purpose::Cluster, 0);
        let law = ClusterLaw::estimate(spec, exp.theta_samples, &mut cluster_rng)?;
        let constants = if spec.kind == ModelKind::Iid {
            ClusterConstants::iid(alpha, p)
        } else {
            let mut rng = seeds::derive(exp.seed, Purpose::Cluster, 1);
            law.constants(exp.constant_samples, &mut rng)?
        };
        let tv = triple_v(alpha, p, law.theta.value, &constants)?;
        let tw = triple_w(alpha, law.theta.value, constants.m2.value)?;
        let doc = TriplesDoc {
            theta: law.theta,
            constants,
            triple_v: tv,
            triple_w: tw,
            stable_v: tv.stable_params()?,
            stable_w: tw.stable_params()?,
        };
        write_json(out, "triples.json", &doc, outputs)?;

        let mut metas = Vec::with_capacity(cfg.limit.paths);
        for r in 0..cfg.limit.paths {
            let mut rng = seeds::derive(exp.seed, Purpose::Series, r as u64);
            let series = PoissonSeries::sample(&law, n_points, &mut rng)?;
            let (v, vmeta) = series.build_v(p, u_min)?;
            let (w, wmeta) = series.build_w()?;
            let joint = pathio::joint_path(&v, &w)?;
            let name = format!("limit_path_{r:04}.csv");
            pathio::write_path_csv(&out.join(&name), &joint, &["V", "W"])?;
            outputs.push(name.clone());
            // V(.)/sqrt(W(1)), the limit of the self-normalized path, in the
            // same dialect `simulate` uses for its finite-n counterpart.
            let (v1, frozen) = v.freeze_terminal(&w).map_err(|e| CliError::Run(e.to_string()))?;
            let selfnorm =
                v1.divide_by_sqrt(&frozen).map_err(|e| CliError::Run(e.to_string()))?;
            let sn_name = format!("limit_selfnorm_{r:04}.csv");
            pathio::write_path_csv(&out.join(&sn_name), &selfnorm, &["x"])?;
            outputs.push(sn_name);
            metas.push(SeriesMetaEntry { file: name, v: vmeta, w: wmeta });
        }
        let meta = SeriesMetaDoc { n_points, refined: refine, u_min, paths: metas };
        write_json(out, "series_meta.json", &meta, outputs)?;
        Ok(())
    })?;
    Ok(0)
}

/// M1 (or, for multi-component paths, product-metric) distance between two
/// path files; prints the metric report as JSON.
pub fn cmd_m1dist(
    a: &Path,
    b: &Path,
    tol: Option<f64>,
    resolution: Option<usize>,
) -> Result<u8, CliError> {
    let x = pathio::read_path_csv(a)?;
    let y = pathio::read_path_csv(b)?;
    if x.dim() != y.dim() {
        return Err(CliError::config(format!(
            "dimension mismatch: {} has {} components, {} has {}",
            a.display(),
            x.dim(),
            b.display(),
            y.dim()
        )));
    }
    let mut opts = M1Options::default();
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(CliError::config("--tol must be positive"));
        }
        opts.tol = t;
    }
    if let Some(r) = resolution {
        if r < 2 {
            return Err(CliError::config("--resolution must be at least 2"));
        }
        opts.initial_resolution = r;
        opts.max_resolution = opts.max_resolution.max(r);
    }
    let report =
        if x.dim() == 1 { d_m1(&x, &y, opts) } else { d_p(&x, &y, opts) }.map_err(|e| {
            CliError::Run(e.to_string())
        })?;
    let mut body = serde_json::to_string_pretty(&report).expect("report serializes");
    body.push('\n');
    print!("{body}");
    Ok(0)
}

#[derive(Serialize)]
struct DiagnosticsDoc {
    small_jump_n: usize,
    small_jump_delta: f64,
    small_jump_reps: usize,
    small_jump: Vec<SmallJumpRow<f64>>,
    karamata_n: usize,
    /// False for moving-average models, whose truncated moments have no
    /// closed form; the table is then empty.
    karamata_applicable: bool,
    karamata: Vec<KaramataReport<f64>>,
}

fn run_diagnostics(
    cfg: &FileConfig,
    out: &Path,
    outputs: &mut Vec<String>,
) -> Result<(), CliError> {
    let spec = cfg.model_spec()?;
    let d = &cfg.diagnostics;
    let rows = small_jump_diagnostic(
        &spec,
        d.small_jump_n,
        &d.small_jump_u,
        d.small_jump_delta,
        d.small_jump_reps,
        cfg.experiment.seed,
    )?;
    let mut csv = String::from("u,prob,stderr\n");
    for row in &rows {
        let _ = writeln!(csv, "{},{},{}", row.u, row.prob, row.stderr);
    }
    let path = out.join("small_jump.csv");
    fs::write(&path, csv).map_err(|e| CliError::io(&path, e))?;
    outputs.push("small_jump.csv".to_string());

    let karamata_applicable = spec.kind == ModelKind::Iid;
    let mut karamata = Vec::new();
    if karamata_applicable {
        for u in &d.karamata_u {
            karamata.push(karamata_check(&spec, d.karamata_n, *u)?);
        }
        let mut csv = String::from("u,n,empirical,limit,rel_error\n");
        for row in &karamata {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                row.u, row.n, row.empirical, row.limit, row.rel_error
            );
        }
        let path = out.join("karamata.csv");
        fs::write(&path, csv).map_err(|e| CliError::io(&path, e))?;
        outputs.push("karamata.csv".to_string());
    }

    let doc = DiagnosticsDoc {
        small_jump_n: d.small_jump_n,
        small_jump_delta: d.small_jump_delta,
        small_jump_reps: d.small_jump_reps,
        small_jump: rows,
        karamata_n: d.karamata_n,
        karamata_applicable,
        karamata,
    };
    write_json(out, "diagnostics.json", &doc, outputs)
}

/// Full finite-n vs limit experiment. Exit 0 only when every check passed.
pub fn cmd_verify(
    cfg: &FileConfig,
    out: &Path,
    diagnostics: bool,
    inject_drift: Option<f64>,
) -> Result<u8, CliError> {
    let mut exp = cfg.experiment()?;
    if let Some(offset) = inject_drift {
        exp.ecf_drift_injection = offset;
    }
    let mut all_pass = false;
    with_manifest("verify", cfg, out, |outputs| {
        let output = fclt_experiment(&exp)?;
        all_pass = output.report.all_pass;
        write_json(out, "report.json", &output.report, outputs)?;
        for s in &output.samples {
            let name = format!("samples_{}.csv", s.name);
            pathio::write_samples_csv(&out.join(&name), &s.finite, &s.limit)?;
            outputs.push(name);
        }
        if diagnostics {
            run_diagnostics(cfg, out, outputs)?;
        }
        Ok(())
    })?;
    Ok(if all_pass { 0 } else { 1 })
}

/// Diagnostic tables alone.
pub fn cmd_diagnostics(cfg: &FileConfig, out: &Path) -> Result<u8, CliError> {
    with_manifest("diagnostics", cfg, out, |outputs| run_diagnostics(cfg, out, outputs))?;
    Ok(0)
}
