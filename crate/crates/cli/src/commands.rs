use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use rayon::prelude::*;
use walloc::bitstream::{compression_ratio, read_container};
use walloc::codec::{train_with, CodecConfig, CodecModel, TrainOptions};
use walloc::compressed_learning::{gen_texture_task, run_comparison, ClassifierConfig, TaskSpec};
use walloc::datasets::{load_dir, sample_patches, save_image, save_wav, synth_audio, synth_image, SynthImageParams};
use walloc::metrics::{bench_codec, quality, Record, Table, PEAK_UNIT};
use walloc::{Kind, Signal};

use crate::files::{load_signal, normalize_peak, save_signal};
use crate::{SignalKind, SynthKind};

const AUDIO_RATE: u32 = 44_100;

fn load_model(path: &Path) -> Result<CodecModel> {
    CodecModel::load(path).with_context(|| format!("loading model {}", path.display()))
}

pub struct TrainArgs {
    pub kind: SignalKind,
    pub config: Option<PathBuf>,
    pub data: PathBuf,
    pub steps: Option<usize>,
    pub seed: Option<u64>,
    pub lr: Option<f64>,
    pub patch: Option<usize>,
    pub patches: usize,
    pub out: PathBuf,
}

pub fn train(a: TrainArgs) -> Result<()> {
    let kind = match a.kind {
        SignalKind::Image => Kind::TwoD,
        SignalKind::Audio => Kind::OneD,
    };
    let (cfg, mut opts) = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            CodecConfig::parse(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None if kind == Kind::TwoD => (CodecConfig::image_16x(), TrainOptions::default()),
        None => (CodecConfig::audio_5x(), TrainOptions::default()),
    };
    ensure!(cfg.kind == kind, "config is for {:?} signals but --kind is {:?}", cfg.kind, a.kind);
    opts.steps = a.steps.unwrap_or(opts.steps);
    opts.seed = a.seed.unwrap_or(opts.seed);
    opts.lr = a.lr.unwrap_or(opts.lr);
    let patch = a.patch.unwrap_or(if kind == Kind::TwoD { 64 } else { 8192 });
    ensure!(
        patch % cfg.block() == 0,
        "patch extent {patch} must be a multiple of 2^J = {}",
        cfg.block()
    );
    let data = load_dir(&a.data, kind)?;
    ensure!(
        data.items.iter().all(|x| x.channels() == cfg.c_x),
        "every file must have {} channels",
        cfg.c_x
    );
    let extents = vec![patch; kind.dims()];
    let patches = sample_patches(&data.items, &extents, a.patches, opts.seed);
    eprintln!(
        "training {} parameters on {} patches from {} files",
        CodecModel::new(cfg.clone(), opts.seed)?.params.num_params(),
        patches.len(),
        data.items.len()
    );
    let (model, report) = train_with(&cfg, &patches, &opts, |step, loss| {
        println!("{}", Record::new("train").field("step", step).num("loss", loss, 6));
    })?;
    model.save(&a.out)?;
    println!(
        "{}",
        Record::new("trained")
            .field("steps", opts.steps)
            .num("initial_loss", report.initial_loss, 6)
            .num("final_loss", report.final_loss, 6)
            .num("seconds", report.elapsed.as_secs_f64(), 1)
            .field("out", a.out.display())
    );
    Ok(())
}

pub fn encode(model: &Path, input: &Path, out: Option<&Path>, latent: Option<&Path>) -> Result<()> {
    let model = load_model(model)?;
    let x = load_signal(input)?;
    if let Some(p) = out {
        let bytes = model.compress(&x)?;
        std::fs::write(p, &bytes).with_context(|| format!("writing {}", p.display()))?;
        let (_, meta) = read_container(&bytes)?;
        println!(
            "{}",
            Record::new("encode")
                .field("bytes", bytes.len())
                .num("cr", compression_ratio(&meta, bytes.len()), 3)
                .num("dr", model.config.dimensionality_reduction(), 3)
        );
    }
    if let Some(p) = latent {
        save_signal(p, &model.latent(&x)?, AUDIO_RATE)?;
    }
    Ok(())
}

pub fn decode(model: &Path, input: &Path, out: &Path, sample_rate: u32) -> Result<()> {
    let model = load_model(model)?;
    let bytes = std::fs::read(input).with_context(|| format!("reading {}", input.display()))?;
    let y = model.decompress(&bytes)?;
    save_signal(out, &y, sample_rate)
}

struct EvalRow {
    name: String,
    psnr: f64,
    ssim: Option<f64>,
    ms_ssim: Option<f64>,
    bytes: usize,
    cr: f64,
}

fn eval_one(model: &CodecModel, name: &str, x: &Signal<f32>) -> Result<EvalRow> {
    let bytes = model.compress(x)?;
    let y = model.decompress(&bytes)?;
    let (_, meta) = read_container(&bytes)?;
    let q = quality(x, &y, PEAK_UNIT)?;
    Ok(EvalRow {
        name: name.to_string(),
        psnr: q.psnr,
        ssim: q.ssim,
        ms_ssim: q.ms_ssim.map(|m| m.value),
        bytes: bytes.len(),
        cr: compression_ratio(&meta, bytes.len()),
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or("-".into(), |v| format!("{v:.4}"))
}

pub fn eval(model: &Path, data: &Path, parallel: bool) -> Result<()> {
    let model = load_model(model)?;
    let ds = load_dir(data, model.config.kind)?;
    let pairs: Vec<(&String, &Signal<f32>)> = ds.names.iter().zip(&ds.items).collect();
    let rows: Vec<EvalRow> = if parallel {
        pairs.par_iter().map(|(n, x)| eval_one(&model, n, x)).collect::<Result<_>>()?
    } else {
        pairs.iter().map(|(n, x)| eval_one(&model, n, x)).collect::<Result<_>>()?
    };
    let dr = model.config.dimensionality_reduction();
    let mut table = Table::new(&["file", "psnr", "ssim", "ms_ssim", "bytes", "cr", "dr"]);
    for r in &rows {
        table.row(vec![
            r.name.clone(),
            format!("{:.2}", r.psnr),
            opt(r.ssim),
            opt(r.ms_ssim),
            r.bytes.to_string(),
            format!("{:.2}", r.cr),
            format!("{dr:.2}"),
        ]);
    }
    print!("{table}");
    let n = rows.len() as f64;
    let mean = |f: &dyn Fn(&EvalRow) -> f64| rows.iter().map(f).sum::<f64>() / n;
    println!(
        "{}",
        Record::new("eval")
            .field("files", rows.len())
            .num("psnr", mean(&|r| r.psnr), 3)
            .num("cr", mean(&|r| r.cr), 3)
            .num("dr", dr, 3)
    );
    Ok(())
}

fn parse_size(size: &str, kind: Kind) -> Result<Vec<usize>> {
    let parts: Vec<usize> = size
        .split(['x', 'X'])
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("bad size {size:?}"))?;
    match (kind, parts.as_slice()) {
        (Kind::TwoD, [w, h]) if *w > 0 && *h > 0 => Ok(vec![*h, *w]),
        (Kind::OneD, [n]) if *n > 0 => Ok(vec![*n]),
        (Kind::TwoD, _) => bail!("image sizes are WxH, got {size:?}"),
        (Kind::OneD, _) => bail!("audio sizes are a sample count, got {size:?}"),
    }
}

pub fn bench(model: &Path, size: &str, reps: usize) -> Result<()> {
    let model = load_model(model)?;
    let extents = parse_size(size, model.config.kind)?;
    let x = match model.config.kind {
        Kind::TwoD => {
            let p = SynthImageParams {
                height: extents[0],
                width: extents[1],
                ..Default::default()
            };
            let img = synth_image(&p, 0);
            if model.config.c_x == 3 {
                img
            } else {
                Signal::new(1, &extents, img.channel(0).to_vec())?
            }
        }
        Kind::OneD => synth_audio(model.config.c_x, extents[0], AUDIO_RATE, 0),
    };
    let bytes = model.compress(&x)?;
    let units: usize = extents.iter().product();
    let unit = if model.config.kind == Kind::TwoD { "MPix/s" } else { "MSamp/s" };
    let r = bench_codec(
        || {
            std::hint::black_box(model.compress(&x).expect("encode"));
        },
        || {
            std::hint::black_box(model.decompress(&bytes).expect("decode"));
        },
        units,
        reps,
        unit,
    );
    println!(
        "{}",
        Record::new("bench")
            .field("unit", r.unit)
            .field("size", size)
            .field("reps", r.encode.reps)
            .num("encode", r.encode.median, 3)
            .num("encode_p10", r.encode.p10, 3)
            .num("encode_p90", r.encode.p90, 3)
            .num("decode", r.decode.median, 3)
            .num("decode_p10", r.decode.p10, 3)
            .num("decode_p90", r.decode.p90, 3)
            .num("ratio", r.ratio(), 2)
    );
    Ok(())
}

pub fn probe_basis(model: &Path, amplitude: i8, out: &Path) -> Result<()> {
    ensure!(amplitude != i8::MIN, "amplitude must lie in -127..=127");
    let model = load_model(model)?;
    std::fs::create_dir_all(out)?;
    let ext = match (model.config.kind, model.config.c_x) {
        (Kind::TwoD, 1) => "pgm",
        (Kind::TwoD, 3) => "ppm",
        (Kind::TwoD, _) => "f32",
        (Kind::OneD, c) if c <= 2 => "wav",
        (Kind::OneD, _) => "f32",
    };
    let probes = model.probe_basis(amplitude)?;
    for (c, p) in probes.iter().enumerate() {
        // Every channel but `c` is zero; scaled to full range for viewing.
        save_signal(&out.join(format!("channel_{c:03}.{ext}")), &normalize_peak(p), AUDIO_RATE)?;
    }
    println!("{}", Record::new("probe").field("channels", probes.len()).field("out", out.display()));
    Ok(())
}

pub fn compare(model: &Path, seeds: u64, samples: usize, epochs: usize) -> Result<()> {
    let model = load_model(model)?;
    let cfg = ClassifierConfig {
        epochs,
        ..Default::default()
    };
    let mut table = Table::new(&["seed", "representation", "dim", "accuracy", "train_s", "infer_s"]);
    let mut wins = 0;
    let start = Instant::now();
    for seed in 0..seeds {
        let task = gen_texture_task(&TaskSpec {
            seed,
            samples,
            ..Default::default()
        })?;
        let reports = run_comparison(&task, &model, &cfg, seed)?;
        for r in &reports {
            table.row(vec![
                seed.to_string(),
                r.representation.clone(),
                r.dimension.to_string(),
                format!("{:.4}", r.accuracy),
                format!("{:.2}", r.train_seconds),
                format!("{:.2}", r.infer_seconds),
            ]);
        }
        wins += usize::from(reports[0].accuracy >= reports[1].accuracy + 0.05);
    }
    print!("{table}");
    println!(
        "{}",
        Record::new("compare")
            .field("seeds", seeds)
            .field("latent_wins", wins)
            .num("seconds", start.elapsed().as_secs_f64(), 1)
    );
    Ok(())
}

pub fn synth_data(kind: SynthKind, count: usize, size: Option<usize>, seed: u64, out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    match kind {
        SynthKind::Image => {
            let side = size.unwrap_or(96);
            let p = SynthImageParams {
                height: side,
                width: side,
                ..Default::default()
            };
            for i in 0..count {
                save_image(out.join(format!("synth_{i:05}.ppm")), &synth_image(&p, seed + i as u64))?;
            }
        }
        SynthKind::Audio => {
            let len = size.unwrap_or(1 << 16);
            for i in 0..count {
                save_wav(out.join(format!("synth_{i:05}.wav")), &synth_audio(2, len, AUDIO_RATE, seed + i as u64), AUDIO_RATE)?;
            }
        }
        SynthKind::Texture => {
            let even = count.max(8).div_ceil(2) * 2;
            let task = gen_texture_task(&TaskSpec {
                seed,
                samples: even.max(200),
                train_fraction: 0.5,
                ..Default::default()
            })?;
            let images = task.train.images.iter().chain(&task.test.images).take(count);
            for (i, x) in images.enumerate() {
                save_image(out.join(format!("texture_{i:05}.ppm")), x)?;
            }
        }
    }
    println!("{}", Record::new("synth").field("count", count).field("out", out.display()));
    Ok(())
}
