use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use mateforge::eval::{self, consensus_labels, AnnotatedMate, EvalCounts, EvalReport};
use mateforge::io::reports::{
    analyze_assembly, pipeline_report, AssemblyPredictions, ConsensusReport, ErrorEntry, EvaluateReport,
    PredictReport,
};
use mateforge::io::{
    all_fixtures, load_assembly, load_corpus, save_assembly, to_canonical_string, write_atomic, FixtureParams,
    LoadFailure,
};
use mateforge::pipeline::run_pipeline;
use mateforge::predict::predict_assembly;
use mateforge::{Assembly, Error, Result};

use crate::Context;

pub enum Status {
    Clean,
    AssemblyErrors(usize),
}

impl Status {
    fn from_errors(n: usize) -> Self {
        if n == 0 {
            Status::Clean
        } else {
            Status::AssemblyErrors(n)
        }
    }
}

fn emit<T: Serialize>(ctx: &Context, report: &T) -> Result<()> {
    let text = to_canonical_string(report).map_err(|e| Error::InvalidConfig(format!("cannot serialize report: {e}")))?;
    match &ctx.report {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_entries(failures: Vec<LoadFailure>) -> Vec<ErrorEntry> {
    failures
        .into_iter()
        .map(|f| ErrorEntry { source: f.file.display().to_string(), message: f.error.to_string() })
        .collect()
}

/// Maps an assembly id onto a portable file name.
fn file_name(id: &str) -> String {
    let stem: String = id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') { c } else { '_' })
        .collect();
    format!("{stem}.json")
}

fn write_assemblies(dir: &Path, assemblies: &[Assembly]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for a in assemblies {
        save_assembly(a, &dir.join(file_name(&a.id)))?;
    }
    Ok(())
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))
}

/// Shared by `filter`, `densify` and `stats`.
pub fn filter(ctx: &Context, dir: &Path, out: Option<&Path>, stats_only: bool) -> Result<Status> {
    let (loaded, failures) = load_corpus(dir)?;
    let corpus: Vec<Assembly> = loaded.into_iter().map(|(_, a)| a).collect();
    let run = run_pipeline(&corpus, &ctx.tol, ctx.jobs)?;
    let report = pipeline_report(&run, load_entries(failures));
    let failed = report.errors.len();
    if let Some(out) = out {
        write_assemblies(out, &run.kept)?;
    }
    if stats_only {
        emit(ctx, &report.stats)?;
    } else {
        emit(ctx, &report)?;
    }
    Ok(Status::from_errors(failed))
}

pub fn analyze(ctx: &Context, path: &Path) -> Result<Status> {
    let a = load_assembly(path)?;
    emit(ctx, &analyze_assembly(&a, &ctx.tol)?)?;
    Ok(Status::Clean)
}

pub fn predict(ctx: &Context, dir: &Path, out: Option<&Path>) -> Result<Status> {
    let (loaded, failures) = load_corpus(dir)?;
    let mut errors = load_entries(failures);
    let mut results = pool(ctx.jobs)?.install(|| {
        loaded
            .par_iter()
            .map(|(_, a)| (a.id.clone(), predict_assembly(a, &ctx.tol)))
            .collect::<Vec<_>>()
    });
    results.sort_by(|x, y| x.0.cmp(&y.0));

    let mut assemblies = Vec::new();
    let mut predicted = Vec::new();
    for (id, r) in results {
        match r {
            Ok((a, predictions)) => {
                assemblies.push(AssemblyPredictions { assembly_id: id, predictions });
                predicted.push(a);
            }
            Err(e) => errors.push(ErrorEntry { source: id, message: e.to_string() }),
        }
    }
    if let Some(out) = out {
        write_assemblies(out, &predicted)?;
    }
    let failed = errors.len();
    emit(ctx, &PredictReport { assemblies, errors })?;
    Ok(Status::from_errors(failed))
}

fn by_id(loaded: Vec<(std::path::PathBuf, Assembly)>, errors: &mut Vec<ErrorEntry>) -> BTreeMap<String, Assembly> {
    let mut map = BTreeMap::new();
    for (file, a) in loaded {
        if map.contains_key(&a.id) {
            errors.push(ErrorEntry {
                source: file.display().to_string(),
                message: format!("duplicate assembly id {:?}", a.id),
            });
            continue;
        }
        map.insert(a.id.clone(), a);
    }
    map
}

fn read_annotations(path: &Path) -> Result<Vec<AnnotatedMate>> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))
}

pub fn evaluate(ctx: &Context, pred_dir: &Path, truth_dir: &Path, annotations: Option<&Path>) -> Result<Status> {
    let expert = annotations.map(read_annotations).transpose()?;
    let (pred, pred_fail) = load_corpus(pred_dir)?;
    let (truth, truth_fail) = load_corpus(truth_dir)?;
    let mut errors = load_entries(pred_fail);
    errors.extend(load_entries(truth_fail));
    let pred = by_id(pred, &mut errors);
    let truth = by_id(truth, &mut errors);

    let pairs: Vec<(&Assembly, &Assembly)> =
        truth.iter().filter_map(|(id, t)| pred.get(id).map(|p| (p, t))).collect();
    let per_assembly = pool(ctx.jobs)?.install(|| {
        pairs.par_iter().map(|(p, t)| eval::evaluate(p, t, &ctx.tol)).collect::<Vec<_>>()
    });
    let mut counts = EvalCounts::default();
    for c in &per_assembly {
        counts.merge(c);
    }
    let mut report = EvalReport::from_counts(&counts);
    report.expert_agreement = expert.map(|m| consensus_labels(&m).1);

    let failed = errors.len();
    emit(
        ctx,
        &EvaluateReport {
            report,
            missing_predictions: truth.keys().filter(|k| !pred.contains_key(*k)).cloned().collect(),
            missing_truth: pred.keys().filter(|k| !truth.contains_key(*k)).cloned().collect(),
            errors,
        },
    )?;
    Ok(Status::from_errors(failed))
}

pub fn fixtures(ctx: &Context, out_dir: &Path, scale: f64) -> Result<Status> {
    let corpus = all_fixtures(FixtureParams { scale }, ctx.tol.seed)?;
    write_assemblies(out_dir, &corpus)?;
    let names: Vec<String> = corpus.iter().map(|a| file_name(&a.id)).collect();
    emit(ctx, &serde_json::json!({ "written": names, "seed": ctx.tol.seed, "scale": scale }))?;
    Ok(Status::Clean)
}

pub fn consensus(ctx: &Context, path: &Path) -> Result<Status> {
    let mates = read_annotations(path)?;
    let (labels, stats) = consensus_labels(&mates);
    emit(ctx, &ConsensusReport { labels, stats })?;
    Ok(Status::Clean)
}
