use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use coreset_core::approx::approximate;
use coreset_core::eval::{bench_csv, compare_methods, solution_family, Family, FamilyEvaluator, Method};
use coreset_core::io::{parse_coreset, parse_input, parse_weights};
use coreset_core::partition::PartitionParams;
use coreset_core::sampler::{build_coreset, BuildConfig, CoresetMeta, GroupMode, LayeredSampler};
use coreset_core::vcdim::{estimate_vc, BallRangeSpace, VcEstimate};
use coreset_core::{known_vc_bound, DistortionReport, MetricBackend, PointSet};
use serde::{Deserialize, Serialize};

use crate::args::{BenchArgs, BuildArgs, EvaluateArgs, FamilyKind, InputArgs, VcArgs};

/// A problem with the user's input that the core library does not report
/// itself.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input_error(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn emit(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) => write(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn load_points(args: &InputArgs) -> Result<PointSet> {
    let text = read(&args.input)?;
    let weights = match &args.weights {
        Some(p) => Some(parse_weights(&read(p)?).with_context(|| p.display().to_string())?),
        None => None,
    };
    parse_input(args.format.into(), &text, weights)
        .with_context(|| args.input.display().to_string())
}

fn json(value: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).context("serializing output")?;
    s.push('\n');
    Ok(s)
}

/// Contents of meta.json: the coreset summary plus the resolved input flags.
#[derive(Debug, Serialize, Deserialize)]
struct RunMeta {
    #[serde(flatten)]
    coreset: CoresetMeta,
    input: String,
    format: String,
    weights: Option<String>,
    mode: String,
}

pub fn build(args: &BuildArgs) -> Result<()> {
    let ps = load_points(&args.input)?;
    let d_vc = match args.d_vc {
        Some(d) => d as usize,
        None => known_vc_bound(ps.backend()).ok_or_else(|| {
            input_error(format!(
                "--d-vc is required for {} input",
                args.input.format.name()
            ))
        })?,
    };
    let config = BuildConfig {
        k: args.problem.k,
        z: args.problem.z,
        epsilon: args.problem.epsilon,
        d_vc,
        seed: args.seed,
        c0: args.c0,
        m: args.m.map(|m| m as usize),
        mode: if args.exact { GroupMode::Exact } else { GroupMode::Auto },
    };
    let built = build_coreset(&ps, &config)?;
    let meta = RunMeta {
        coreset: built.meta.clone(),
        input: args.input.input.display().to_string(),
        format: args.input.format.name().to_string(),
        weights: args.input.weights.as_ref().map(|p| p.display().to_string()),
        mode: if args.exact { "exact" } else { "auto" }.to_string(),
    };
    write(&args.out_dir.join("coreset.csv"), &built.coreset.to_csv())?;
    write(&args.out_dir.join("meta.json"), &json(&meta)?)?;
    if let Some(path) = &args.dump_partition {
        write(path, &built.partition.to_csv(&built.approx))?;
    }
    eprintln!(
        "coreset of {} points from {} ({} groups, m = {}) written to {}",
        built.meta.coreset_size,
        built.meta.n,
        built.meta.groups,
        built.meta.m,
        args.out_dir.display()
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct EvaluateOutput<'a> {
    input: String,
    format: &'static str,
    coreset: String,
    k: usize,
    z: u32,
    family_seed: u64,
    report: &'a DistortionReport,
}

fn meta_path(args: &EvaluateArgs) -> Option<PathBuf> {
    if args.meta.is_some() {
        return args.meta.clone();
    }
    let sibling = args.coreset.with_file_name("meta.json");
    sibling.exists().then_some(sibling)
}

pub fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let ps = load_points(&args.input)?;
    let coreset_text = read(&args.coreset)?;
    let coreset = parse_coreset(&coreset_text).with_context(|| args.coreset.display().to_string())?;
    let meta: Option<RunMeta> = match meta_path(args) {
        Some(p) => Some(
            serde_json::from_str(&read(&p)?).with_context(|| format!("parsing {}", p.display()))?,
        ),
        None => None,
    };
    if let Some(m) = &meta {
        if m.coreset.n != ps.len() {
            return Err(input_error(format!(
                "metadata describes {} input points but the input has {}",
                m.coreset.n,
                ps.len()
            )));
        }
        if m.coreset.coreset_size != coreset.len() {
            return Err(input_error(format!(
                "metadata lists {} coreset entries but {} has {}",
                m.coreset.coreset_size,
                args.coreset.display(),
                coreset.len()
            )));
        }
    }
    let k = args
        .k
        .or(meta.as_ref().map(|m| m.coreset.k))
        .ok_or_else(|| input_error("--k is required without metadata"))?;
    let z = args
        .z
        .or(meta.as_ref().map(|m| m.coreset.z))
        .ok_or_else(|| input_error("--z is required without metadata"))?;
    let family = match args.family {
        FamilyKind::Exhaustive => Family::Exhaustive,
        FamilyKind::Random => Family::RandomSubsets {
            count: args.count,
            seed: args.seed,
        },
        FamilyKind::Perturbed => Family::PerturbedA {
            centers: approximate(&ps, k, z, args.seed)?.centers,
            count: args.count,
            seed: args.seed,
        },
    };
    let solutions = solution_family(&ps, k, &family)?;
    let report = FamilyEvaluator::new(&ps, solutions, z, family.to_string())?.evaluate(&coreset)?;
    let out = EvaluateOutput {
        input: args.input.input.display().to_string(),
        format: args.input.format.name(),
        coreset: args.coreset.display().to_string(),
        k,
        z,
        family_seed: args.seed,
        report: &report,
    };
    emit(args.report.as_deref(), &json(&out)?)?;
    if let Some(path) = &args.errors {
        write(path, &report.errors_csv())?;
    }
    eprintln!(
        "{} solutions: max {:.6}, p99 {:.6}, mean {:.6}",
        report.errors.len(),
        report.summary.max,
        report.summary.p99,
        report.summary.mean
    );
    Ok(())
}

pub fn bench(args: &BenchArgs) -> Result<()> {
    let methods: Vec<Method> = args
        .methods
        .iter()
        .map(|m| m.parse())
        .collect::<coreset_core::Result<_>>()?;
    if methods.is_empty() || args.sizes.is_empty() || args.seeds.is_empty() {
        return Err(input_error("methods, sizes and seeds must be nonempty"));
    }
    if args.sizes.contains(&0) {
        return Err(input_error("sizes must be positive"));
    }
    let ps = load_points(&args.input)?;
    let (k, z, epsilon) = (args.problem.k, args.problem.z, args.problem.epsilon);
    let approx = approximate(&ps, k, z, args.seed)?;
    let mut solutions = solution_family(
        &ps,
        k,
        &Family::RandomSubsets {
            count: args.count,
            seed: args.seed,
        },
    )?;
    solutions.extend(solution_family(
        &ps,
        k,
        &Family::PerturbedA {
            centers: approx.centers.clone(),
            count: args.count,
            seed: args.seed,
        },
    )?);
    let evaluator = FamilyEvaluator::new(&ps, solutions, z, "random+perturbed")?;
    let sampler = LayeredSampler::new(&ps, approx, PartitionParams::new(k, z, epsilon)?)?;
    let rows = compare_methods(&sampler, &ps, &evaluator, &methods, &args.sizes, &args.seeds)?;
    emit(args.out.as_deref(), &bench_csv(&rows))
}

#[derive(Debug, Serialize)]
struct VcOutput {
    n: usize,
    k_fold: usize,
    max_d: usize,
    budget: u64,
    seed: u64,
    grid: usize,
    center_count: usize,
    range_count: usize,
    #[serde(flatten)]
    estimate: VcEstimate,
}

/// Largest grid resolution, capped at 16, with at most 4096 grid points.
fn default_grid(dim: usize) -> usize {
    (2..=16)
        .rev()
        .find(|&r| (r as f64).powi(dim as i32) <= 4096.0)
        .unwrap_or(0)
}

pub fn vc_estimate(args: &VcArgs) -> Result<()> {
    let ps = load_points(&args.input)?;
    let euclidean_dim = match ps.backend() {
        MetricBackend::Euclidean(space) => Some(space.dim()),
        _ => None,
    };
    let grid = match (args.grid, euclidean_dim) {
        (Some(g), Some(_)) => g,
        (Some(g), None) if g > 0 => {
            return Err(input_error("--grid needs Euclidean points"));
        }
        (None, Some(dim)) => default_grid(dim),
        _ => 0,
    };
    let rs = if grid > 0 {
        BallRangeSpace::with_grid_centers(&ps, args.k_fold, grid)?
    } else {
        BallRangeSpace::new(&ps, args.k_fold)?
    };
    let estimate = estimate_vc(&rs, args.max_d, args.budget, args.seed);
    let out = VcOutput {
        n: ps.len(),
        k_fold: args.k_fold,
        max_d: args.max_d,
        budget: args.budget,
        seed: args.seed,
        grid,
        center_count: rs.center_count(),
        range_count: rs.ranges().len(),
        estimate,
    };
    emit(args.out.as_deref(), &json(&out)?)
}
