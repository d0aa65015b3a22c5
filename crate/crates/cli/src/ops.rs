//! Command implementations and file I/O for the pipeline.
//!
//! All output files are written atomically (temp file + rename) after a
//! deterministic in-memory reduction, so runs with the same master seed are
//! byte-identical regardless of thread count.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crosstalk_core::chipgen::generate_chip;
use crosstalk_core::experiment::{
    derive_seed, run_multiplet_experiment, run_pair_experiment, PhaseSweepDataset,
    PhaseSweepProtocol,
};
use crosstalk_core::learning::{build_report, fit_pair, median, ChipFitReport, FitOptions};
use crosstalk_core::model::ChipGroundTruth;
use crosstalk_core::oracle::SimulationConfig;
use crosstalk_core::predict::{predict_multiplet, score_prediction};
use crosstalk_core::report::{build_graph, render_dot};

use crate::error::{AppError, AppResult};
use crate::schema::{
    ChipFile, DatasetFile, FitReportFile, GraphFile, PredictionFile, ProtocolBlock, RunConfigFile,
};

/// Fully resolved run settings: config file merged with flag overrides.
pub struct Resolved {
    pub config: RunConfigFile,
    pub output_dir: PathBuf,
    pub master_seed: u64,
    pub protocol: PhaseSweepProtocol,
    pub sim: SimulationConfig,
}

/// Merge the optional config file with command-line overrides. Flags win
/// over config fields; built-in defaults fill the rest.
pub fn resolve(
    config_path: Option<&Path>,
    seed_flag: Option<u64>,
    output_dir_flag: Option<&Path>,
) -> AppResult<Resolved> {
    let config: RunConfigFile = match config_path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| AppError::io(p, e))?;
            serde_json::from_str(&text)
                .map_err(|e| AppError::config(format!("{}: {e}", p.display())))?
        }
        None => RunConfigFile::default(),
    };
    if config.chip_file.is_some() && config.generate.is_some() {
        return Err(AppError::config(
            "chip_file and generate are mutually exclusive",
        ));
    }
    let output_dir = output_dir_flag
        .map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let master_seed = seed_flag.or(config.master_seed).unwrap_or(1);
    let protocol = config.protocol.to_core()?;
    let sim = config.oracle.to_core()?;
    Ok(Resolved { config, output_dir, master_seed, protocol, sim })
}

impl Resolved {
    /// The chip under test: loaded from `chip_file` when set, otherwise
    /// synthesized from the `generate` block (or its defaults).
    pub fn chip(&self) -> AppResult<ChipGroundTruth> {
        if let Some(path) = &self.config.chip_file {
            let file: ChipFile = read_json(path)?;
            return file.to_core();
        }
        let block = self.config.generate.clone().unwrap_or_default();
        let seed = block.seed.unwrap_or(self.master_seed);
        let chip = generate_chip(&block.to_core(), seed);
        let violations = crosstalk_core::model::validate_chip(&chip);
        if !violations.is_empty() {
            return Err(AppError::config(format!(
                "generate block produces an invalid chip: {}",
                violations.join("; ")
            )));
        }
        Ok(chip)
    }

    pub fn protocol_block(&self) -> ProtocolBlock {
        ProtocolBlock {
            phases: self.protocol.phase_count,
            shots: self.protocol.shots,
            rotation_angle: self.protocol.rotation_angle,
            duration: self.protocol.duration,
        }
    }
}

// ---------------------------------------------------------------------------
// I/O helpers

pub fn read_json<T: DeserializeOwned>(path: &Path) -> AppResult<T> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| AppError::config(format!("{}: {e}", path.display())))
}

/// Atomic write: the file appears complete or not at all.
pub fn write_text(path: &Path, contents: &str) -> AppResult<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| AppError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| AppError::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> AppResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| AppError::config(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_text(path, &text)
}

fn dataset_stem(primary: usize, secondaries: &[usize]) -> String {
    let mut s = format!("dataset_q{primary}");
    for k in secondaries {
        s.push_str(&format!("_q{k}"));
    }
    s
}

fn dataset_csv(ds: &PhaseSweepDataset) -> String {
    let mut out = String::from("delta_phi,z,sigma\n");
    for ((p, z), s) in ds.phases.iter().zip(&ds.observed_z).zip(&ds.sigma) {
        out.push_str(&format!("{p},{z},{s}\n"));
    }
    out
}

// ---------------------------------------------------------------------------
// generate-chip

pub fn cmd_generate_chip(r: &Resolved) -> AppResult<()> {
    let chip = r.chip()?;
    let path = r.output_dir.join("chip.json");
    write_json(&path, &ChipFile::from_core(&chip))?;
    println!("wrote {}", path.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// characterize

/// Parse `--pairs a:b,c:d` into directed pairs.
pub fn parse_pairs(spec: &str) -> AppResult<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    for part in spec.split(',') {
        let (a, b) = part
            .split_once(':')
            .ok_or_else(|| AppError::config(format!("bad pair \"{part}\", expected a:b")))?;
        let a = a.trim().parse::<usize>().map_err(|_| {
            AppError::config(format!("bad qubit index \"{a}\" in pair \"{part}\""))
        })?;
        let b = b.trim().parse::<usize>().map_err(|_| {
            AppError::config(format!("bad qubit index \"{b}\" in pair \"{part}\""))
        })?;
        if a == b {
            return Err(AppError::config(format!("pair \"{part}\" repeats a qubit")));
        }
        pairs.push((a, b));
    }
    Ok(pairs)
}

fn all_pairs(chip: &ChipGroundTruth) -> Vec<(usize, usize)> {
    let n = chip.qubit_count();
    let mut pairs = Vec::new();
    for a in 0..n {
        if !chip.topology.readout_enabled(a) {
            continue;
        }
        for b in 0..n {
            if b != a {
                pairs.push((a, b));
            }
        }
    }
    pairs
}

pub fn cmd_characterize(r: &Resolved, pairs_filter: Option<&str>) -> AppResult<()> {
    let chip = r.chip()?;
    let n = chip.qubit_count();
    let pairs = match pairs_filter {
        Some(spec) => {
            let pairs = parse_pairs(spec)?;
            for &(a, b) in &pairs {
                if a >= n || b >= n {
                    return Err(AppError::config(format!(
                        "pair {a}:{b} references a qubit outside 0..{n}"
                    )));
                }
                if !chip.topology.readout_enabled(a) {
                    return Err(AppError::config(format!(
                        "pair {a}:{b} uses disabled-readout qubit {a} as primary"
                    )));
                }
            }
            pairs
        }
        None => all_pairs(&chip),
    };

    // parallel over pairs; collect preserves pair order, so the reduction
    // and every output byte are thread-count independent
    let fitted: Vec<_> = pairs
        .par_iter()
        .map(|&(a, b)| -> AppResult<_> {
            let ds = run_pair_experiment(&chip, a, b, &r.protocol, &r.sim, r.master_seed)?;
            let fit = fit_pair(&ds, &FitOptions::default())?;
            Ok((ds, fit))
        })
        .collect::<AppResult<_>>()?;

    let block = r.protocol_block();
    let mut results = Vec::with_capacity(fitted.len());
    for (ds, fit) in fitted {
        let stem = dataset_stem(ds.primary_qubit, &ds.secondary_qubits);
        write_json(
            &r.output_dir.join(format!("{stem}.json")),
            &DatasetFile::from_core(&ds, &block),
        )?;
        write_text(&r.output_dir.join(format!("{stem}.csv")), &dataset_csv(&ds))?;
        results.push(fit);
    }
    let report = build_report(results);
    let path = r.output_dir.join("fit_report.json");
    write_json(&path, &FitReportFile::from_core(&report, n))?;
    println!(
        "characterized {} pairs, median chi2/dof {:.4}; wrote {}",
        report.results.len(),
        report.median_chi2,
        path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// fit (refit from recorded datasets)

pub fn cmd_fit(r: &Resolved, datasets_dir: Option<&Path>) -> AppResult<()> {
    let dir = datasets_dir.unwrap_or(&r.output_dir);
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| AppError::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|s| s.to_str())
                .map(|s| s.starts_with("dataset_") && s.ends_with(".json"))
                .unwrap_or(false)
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(AppError::config(format!(
            "no dataset_*.json files found in {}",
            dir.display()
        )));
    }

    let mut qubit_count = 0;
    let mut datasets = Vec::with_capacity(paths.len());
    for p in &paths {
        let file: DatasetFile = read_json(p)?;
        let ds = file.to_core()?;
        if ds.secondary_qubits.len() != 1 {
            continue; // multiplet records are not pair-fittable
        }
        qubit_count = qubit_count
            .max(ds.primary_qubit + 1)
            .max(ds.secondary_qubits[0] + 1);
        datasets.push(ds);
    }
    if datasets.is_empty() {
        return Err(AppError::config("no pair datasets to fit"));
    }

    let results: Vec<_> = datasets
        .par_iter()
        .map(|ds| fit_pair(ds, &FitOptions::default()).map_err(AppError::from))
        .collect::<AppResult<_>>()?;
    let report = build_report(results);
    let path = r.output_dir.join("fit_report.json");
    write_json(&path, &FitReportFile::from_core(&report, qubit_count))?;
    println!(
        "fitted {} datasets, median chi2/dof {:.4}; wrote {}",
        report.results.len(),
        report.median_chi2,
        path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// predict

fn load_report(r: &Resolved) -> AppResult<(ChipFitReport, usize)> {
    let path = r.output_dir.join("fit_report.json");
    let file: FitReportFile = read_json(&path)?;
    let n = file.qubit_count;
    Ok((file.to_core()?, n))
}

pub fn cmd_predict(r: &Resolved, primary: usize, secondaries: &[usize]) -> AppResult<()> {
    if secondaries.is_empty() {
        return Err(AppError::config("predict needs at least one secondary"));
    }
    let (report, _) = load_report(r)?;
    let prediction = predict_multiplet(&report, primary, secondaries, &r.protocol)?;
    let stem = format!(
        "prediction_{}",
        dataset_stem(primary, secondaries).trim_start_matches("dataset_")
    );
    write_json(
        &r.output_dir.join(format!("{stem}.json")),
        &PredictionFile::from_core(&prediction),
    )?;
    let mut csv = String::from("delta_phi,predicted_z\n");
    for (p, z) in prediction.phases.iter().zip(&prediction.predicted_z) {
        csv.push_str(&format!("{p},{z}\n"));
    }
    write_text(&r.output_dir.join(format!("{stem}.csv")), &csv)?;
    println!("wrote {}", r.output_dir.join(format!("{stem}.json")).display());
    Ok(())
}

// ---------------------------------------------------------------------------
// verify

/// Parse `--multiplets a:b,c;d:e,f` (primary:sec,sec; ...).
pub fn parse_multiplets(spec: &str) -> AppResult<Vec<(usize, Vec<usize>)>> {
    let mut out = Vec::new();
    for group in spec.split(';') {
        let (a, rest) = group.split_once(':').ok_or_else(|| {
            AppError::config(format!("bad multiplet \"{group}\", expected a:b,c"))
        })?;
        let a = a.trim().parse::<usize>().map_err(|_| {
            AppError::config(format!("bad qubit index \"{a}\" in multiplet \"{group}\""))
        })?;
        let mut secs = Vec::new();
        for s in rest.split(',') {
            secs.push(s.trim().parse::<usize>().map_err(|_| {
                AppError::config(format!("bad qubit index \"{s}\" in multiplet \"{group}\""))
            })?);
        }
        if secs.is_empty() {
            return Err(AppError::config(format!("multiplet \"{group}\" has no secondaries")));
        }
        out.push((a, secs));
    }
    Ok(out)
}

/// Draw `count` random multiplets (primary + 2 or 3 secondaries, or exactly
/// `size` secondaries when given), seeded and deterministic.
pub fn random_multiplets(
    chip: &ChipGroundTruth,
    count: usize,
    size: Option<usize>,
    master_seed: u64,
) -> AppResult<Vec<(usize, Vec<usize>)>> {
    let n = chip.qubit_count();
    let enabled: Vec<usize> = (0..n).filter(|&q| chip.topology.readout_enabled(q)).collect();
    if enabled.is_empty() {
        return Err(AppError::config("no readout-enabled qubits to verify"));
    }
    if let Some(s) = size {
        if !(2..=3).contains(&s) {
            return Err(AppError::config("multiplet size must be 2 or 3 secondaries"));
        }
        if s >= n {
            return Err(AppError::config(format!(
                "multiplet size {s} needs more than {n} qubits"
            )));
        }
    }
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let mut state = derive_seed(master_seed, &[0x3E1E_C700, i as u64]);
        let mut next = move |bound: usize| {
            // splitmix64 step, reduced modulo the bound
            state = derive_seed(state, &[0xA5]);
            (state % bound as u64) as usize
        };
        let a = enabled[next(enabled.len())];
        let k = size.unwrap_or_else(|| 2 + next(2));
        let mut others: Vec<usize> = (0..n).filter(|&q| q != a).collect();
        let mut secs = Vec::with_capacity(k);
        for _ in 0..k.min(others.len()) {
            secs.push(others.remove(next(others.len())));
        }
        secs.sort_unstable();
        out.push((a, secs));
    }
    Ok(out)
}

pub fn cmd_verify(
    r: &Resolved,
    multiplets_spec: Option<&str>,
    random_count: Option<usize>,
    size: Option<usize>,
) -> AppResult<()> {
    let chip = r.chip()?;
    let n = chip.qubit_count();
    let (report, _) = load_report(r)?;

    let multiplets = match (multiplets_spec, random_count) {
        (Some(spec), None) => parse_multiplets(spec)?,
        (None, Some(k)) => random_multiplets(&chip, k, size, r.master_seed)?,
        (None, None) => random_multiplets(&chip, 40, size, r.master_seed)?,
        (Some(_), Some(_)) => {
            return Err(AppError::config("--multiplets and --random are mutually exclusive"))
        }
    };
    for (a, secs) in &multiplets {
        if *a >= n || secs.iter().any(|&k| k >= n) {
            return Err(AppError::config(format!(
                "multiplet {a}:{secs:?} references a qubit outside 0..{n}"
            )));
        }
        if !chip.topology.readout_enabled(*a) {
            return Err(AppError::config(format!(
                "multiplet primary {a} has disabled readout"
            )));
        }
    }

    let scored: Vec<_> = multiplets
        .par_iter()
        .map(|(a, secs)| -> AppResult<_> {
            let ds = run_multiplet_experiment(&chip, *a, secs, &r.protocol, &r.sim, r.master_seed)?;
            let mut prediction = predict_multiplet(&report, *a, secs, &r.protocol)?;
            let chi2 = score_prediction(&prediction, &ds)?;
            prediction.chi2_per_dof_vs_data = Some(chi2);
            Ok((ds, prediction, chi2))
        })
        .collect::<AppResult<_>>()?;

    let block = r.protocol_block();
    let mut summary = String::from("primary,secondaries,chi2_per_dof\n");
    let mut chi2s = Vec::with_capacity(scored.len());
    for (ds, prediction, chi2) in &scored {
        let stem = dataset_stem(ds.primary_qubit, &ds.secondary_qubits);
        write_json(&r.output_dir.join(format!("{stem}.json")), &DatasetFile::from_core(ds, &block))?;
        write_json(
            &r.output_dir.join(format!("prediction_{}.json", stem.trim_start_matches("dataset_"))),
            &PredictionFile::from_core(prediction),
        )?;
        // overlay CSV: data and prediction side by side
        let mut csv = String::from("delta_phi,observed_z,sigma,predicted_z\n");
        for (((p, z), s), m) in ds
            .phases
            .iter()
            .zip(&ds.observed_z)
            .zip(&ds.sigma)
            .zip(&prediction.predicted_z)
        {
            csv.push_str(&format!("{p},{z},{s},{m}\n"));
        }
        write_text(
            &r.output_dir.join(format!("overlay_{}.csv", stem.trim_start_matches("dataset_"))),
            &csv,
        )?;
        let secs: Vec<String> = ds.secondary_qubits.iter().map(|k| k.to_string()).collect();
        summary.push_str(&format!("{},{},{chi2}\n", ds.primary_qubit, secs.join(" ")));
        chi2s.push(*chi2);
    }
    let med = median(&chi2s);
    summary.push_str(&format!("median,,{med}\n"));
    write_text(&r.output_dir.join("verify_summary.csv"), &summary)?;
    write_text(&r.output_dir.join("verify_chi2_histogram.csv"), &chi2_histogram(&chi2s))?;
    println!("verified {} multiplets, median prediction chi2/dof {med:.4}", chi2s.len());
    Ok(())
}

/// Fixed-bin histogram CSV over chi2/dof, 20 bins of width 0.25 plus an
/// overflow row.
fn chi2_histogram(values: &[f64]) -> String {
    let mut counts = [0usize; 21];
    for &v in values {
        let bin = (v / 0.25) as usize;
        counts[bin.min(20)] += 1;
    }
    let mut out = String::from("bin_lo,bin_hi,count\n");
    for (i, c) in counts.iter().enumerate().take(20) {
        out.push_str(&format!("{},{},{c}\n", i as f64 * 0.25, (i + 1) as f64 * 0.25));
    }
    out.push_str(&format!("5,inf,{}\n", counts[20]));
    out
}

// ---------------------------------------------------------------------------
// report

pub fn cmd_report(r: &Resolved) -> AppResult<()> {
    let chip = r.chip()?;
    let (report, _) = load_report(r)?;
    let graph = build_graph(&report, &chip.topology);

    write_text(&r.output_dir.join("graph.dot"), &render_dot(&graph))?;
    write_json(&r.output_dir.join("graph.json"), &GraphFile::from_core(&graph))?;

    let mut scatter = String::from("from,to,beta,theta,beta_stderr,theta_stderr,chi2_per_dof\n");
    for f in &report.results {
        scatter.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            f.pair.0, f.pair.1, f.beta_hat, f.theta_hat, f.beta_stderr, f.theta_stderr, f.chi2_per_dof
        ));
    }
    write_text(&r.output_dir.join("beta_theta_scatter.csv"), &scatter)?;

    let chi2s: Vec<f64> = report.results.iter().map(|f| f.chi2_per_dof).collect();
    write_text(&r.output_dir.join("chi2_histogram.csv"), &chi2_histogram(&chi2s))?;

    let mut summary = String::from("statistic,value\n");
    summary.push_str(&format!("pair_count,{}\n", report.results.len()));
    summary.push_str(&format!("median_chi2_per_dof,{}\n", report.median_chi2));
    summary.push_str(&format!("beta_theta_correlation,{}\n", report.beta_theta_correlation));
    let betas: Vec<f64> = report.results.iter().map(|f| f.beta_hat).collect();
    summary.push_str(&format!("median_beta,{}\n", median(&betas)));
    summary.push_str(&format!(
        "max_beta,{}\n",
        betas.iter().cloned().fold(0.0f64, f64::max)
    ));
    write_text(&r.output_dir.join("summary.csv"), &summary)?;
    println!("wrote report artifacts to {}", r.output_dir.display());
    Ok(())
}
