//! Command-line front end: `run` a pipeline mode over a video layout,
//! `eval` predictions against ground truth, and `synth` reproducible test
//! sequences.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use trackseg::error::{Error, Result};
use trackseg::evalkit::{evaluate, EvalOptions, EvalSequence};
use trackseg::hysteresis::HysteresisConfig;
use trackseg::ingest;
use trackseg::pipeline::PipelineMode;
use trackseg::raster::Connectivity;
use trackseg::synth::{generate, SynthConfig};
use trackseg::tracker::TrackerConfig;

#[derive(Parser)]
#[command(
    name = "trackseg",
    version,
    about = "Fuse appearance probability maps with tracked detection boxes into segmentation masks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Process a video layout (or a batch directory of layouts) into masks.
    Run(RunArgs),
    /// Score predicted masks against ground-truth masks.
    Eval(EvalArgs),
    /// Generate a reproducible synthetic video layout with ground truth.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Video layout directory, or a directory of such layouts.
    #[arg(long)]
    video: PathBuf,
    /// Output directory (per-video subdirectories in batch mode).
    #[arg(long)]
    out: PathBuf,
    /// appearance | clip | clip_temporal | conncomp | full
    #[arg(long, value_parser = PipelineMode::from_str)]
    mode: PipelineMode,
    /// Map binarization threshold for box selection and plain thresholding.
    #[arg(long, default_value_t = 0.5)]
    t_bin: f32,
    /// Strong threshold of the two-pass component filter.
    #[arg(long, default_value_t = 0.8)]
    t_high: f32,
    /// Weak threshold of the two-pass component filter.
    #[arg(long, default_value_t = 0.4)]
    t_low: f32,
    /// Minimum IoU with the previous box (temporal gate).
    #[arg(long, default_value_t = 0.3)]
    iou_temporal: f32,
    /// Minimum first-frame overlap to adopt a detection's class.
    #[arg(long, default_value_t = 0.3)]
    iou_first: f32,
    /// Component connectivity: 4 or 8.
    #[arg(long, default_value_t = 8, value_parser = parse_connectivity_raw)]
    connectivity: u8,
    /// Keep whole low-threshold components instead of clipping them to the
    /// selected boxes.
    #[arg(long)]
    no_clip_low_to_box: bool,
    /// Record that evaluation should skip the last frame.
    #[arg(long)]
    exclude_last: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Predicted mask directory (a run output), or a batch directory.
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth mask directory, or a batch directory of them.
    #[arg(long)]
    gt: PathBuf,
    /// Also print each frame's Jaccard.
    #[arg(long)]
    per_frame: bool,
    /// Skip the last frame as well as frame 0.
    #[arg(long)]
    exclude_last: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    frames: usize,
    /// Dimensions as WxH, e.g. 64x48.
    #[arg(long, value_parser = parse_size)]
    size: (u32, u32),
    #[arg(long, default_value_t = 0)]
    distractors: u32,
    /// Sigma of additive Gaussian map noise.
    #[arg(long, default_value_t = 0.0)]
    noise: f32,
    #[arg(long)]
    out: PathBuf,
}

fn parse_connectivity_raw(s: &str) -> std::result::Result<u8, String> {
    match s {
        "4" => Ok(4),
        "8" => Ok(8),
        _ => Err(format!("connectivity must be 4 or 8, got {s:?}")),
    }
}

fn parse_size(s: &str) -> std::result::Result<(u32, u32), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("size must look like WxH, got {s:?}"))?;
    let parse = |v: &str| {
        v.parse::<u32>()
            .map_err(|_| format!("size must look like WxH, got {s:?}"))
    };
    Ok((parse(w)?, parse(h)?))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Eval(args) => cmd_eval(&args),
        Command::Synth(args) => cmd_synth(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run_config(args: &RunArgs) -> ingest::RunConfig {
    let connectivity = Connectivity::from_u8(args.connectivity).expect("validated by clap");
    ingest::RunConfig {
        mode: args.mode,
        tracker: TrackerConfig {
            t_bin: args.t_bin,
            iou_first_frame_min: args.iou_first,
            iou_temporal: args.iou_temporal,
            max_coast: None,
            connectivity,
        },
        hysteresis: HysteresisConfig {
            t_high: args.t_high,
            t_low: args.t_low,
            connectivity,
            clip_low_to_box: !args.no_clip_low_to_box,
        },
        exclude_last: args.exclude_last,
    }
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let cfg = run_config(args);
    if ingest::is_video_layout(&args.video) {
        ingest::run_on_layout(&args.video, &args.out, &cfg)?;
        println!("wrote {}", args.out.display());
        return Ok(());
    }

    // Batch: every subdirectory that is a layout, processed in parallel
    // with per-video output isolation.
    let layouts = ingest::list_video_layouts(&args.video)?;
    let failures: Vec<String> = layouts
        .par_iter()
        .filter_map(|layout| {
            let name = layout
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "video".to_string());
            match ingest::run_on_layout(layout, &args.out.join(&name), &cfg) {
                Ok(()) => None,
                Err(e) => Some(format!("{name}: {e}")),
            }
        })
        .collect();
    for failure in &failures {
        eprintln!("error: {failure}");
    }
    if failures.is_empty() {
        println!("wrote {} videos to {}", layouts.len(), args.out.display());
        Ok(())
    } else {
        Err(Error::InvalidVideo(format!(
            "{} of {} videos failed",
            failures.len(),
            layouts.len()
        )))
    }
}

fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let pairs = ingest::collect_eval_pairs(&args.pred, &args.gt)?;
    let mut loaded = Vec::with_capacity(pairs.len());
    for (name, pred_dir, gt_dir) in pairs {
        let predicted = ingest::load_mask_dir(&pred_dir)?;
        let ground_truth = ingest::load_mask_dir(&gt_dir)?;
        loaded.push((name, predicted, ground_truth));
    }
    let sequences: Vec<EvalSequence> = loaded
        .iter()
        .map(|(name, predicted, ground_truth)| EvalSequence {
            name: name.clone(),
            predicted,
            ground_truth,
        })
        .collect();
    let report = evaluate(
        &sequences,
        &EvalOptions {
            exclude_last: args.exclude_last,
        },
    )?;
    print!("{}", ingest::format_eval_table(&report, args.per_frame));
    let summary = args.pred.join("eval_summary.json");
    ingest::write_eval_summary(&summary, &report)?;
    println!("summary written to {}", summary.display());
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let (width, height) = args.size;
    let cfg = SynthConfig::with_lane_layout(
        args.seed,
        args.frames,
        width,
        height,
        args.distractors,
        args.noise,
    )?;
    let seq = generate(&cfg)?;
    let name = name_of(&args.out);
    ingest::save_sequence(&args.out, &seq, &name)?;
    println!(
        "wrote {} frames ({}x{}, {} distractors) to {}",
        args.frames,
        width,
        height,
        args.distractors,
        args.out.display()
    );
    Ok(())
}

fn name_of(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "video".to_string())
}
