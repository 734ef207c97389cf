//! End-to-end segmentation run: entropy texture, KFCG codebook,
//! requantization, cluster images, Canny overlays and the GLCM baseline.
//!
//! Every intermediate is written as it is produced, so a failing stage leaves
//! the earlier outputs on disk next to a manifest naming the stage.

mod config;
mod manifest;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::{
    parse_block, parse_ids, parse_pair, ClusterSource, ConfigError, PipelineConfig, Settings,
};
pub use manifest::RunManifest;

use crate::entropy::{entropy_image, equalize_real, histogram_equalize, probability_image};
use crate::glcm::glcm_entropy_image;
use crate::image::{quantize_to_gray, BinaryImage, FloatImage, GrayImage};
use crate::pgm::{read_gray, write_pgm};
use crate::segmentation::{canny_stages, cluster_image, superimpose, ClusterImage};
use crate::vq::{
    build_label_image, distortion, extract_training_vectors, kfcg_codebook, requantize_codebook,
    write_assignment, write_codebook, Codebook, LabelImage, Requantization, TrainingSet,
};
use config::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Config,
    Read,
    Probability,
    Entropy,
    TrainingVectors,
    Codebook,
    Requantize,
    Labels,
    ClusterImages,
    Edges,
    Glcm,
    Write,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Config => "config",
            Stage::Read => "read",
            Stage::Probability => "probability",
            Stage::Entropy => "entropy",
            Stage::TrainingVectors => "training-vectors",
            Stage::Codebook => "codebook",
            Stage::Requantize => "requantize",
            Stage::Labels => "labels",
            Stage::ClusterImages => "cluster-images",
            Stage::Edges => "edges",
            Stage::Glcm => "glcm",
            Stage::Write => "write",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
#[error("stage {stage} failed: {message}")]
pub struct PipelineError {
    pub stage: Stage,
    pub message: String,
}

impl PipelineError {
    fn new(stage: Stage, err: impl fmt::Display) -> Self {
        Self {
            stage,
            message: err.to_string(),
        }
    }
}

/// Edge map and overlay for one selected cluster.
#[derive(Debug, Clone)]
pub struct Overlay {
    /// 1-based cluster id.
    pub cluster: usize,
    pub edges: BinaryImage,
    pub overlay: GrayImage,
    pub low: f64,
    pub high: f64,
}

/// All in-memory results of one run.
#[derive(Debug, Clone)]
pub struct Artifacts {
    pub probability: FloatImage<f64>,
    pub probability_eq: GrayImage,
    pub entropy: FloatImage<f64>,
    pub entropy_gray: GrayImage,
    pub entropy_eq: GrayImage,
    pub training: TrainingSet<f64>,
    pub codebook: Codebook<f64>,
    pub requantization: Requantization<f64>,
    /// Super-cluster of every training vector.
    pub super_assignment: Vec<usize>,
    pub labels: LabelImage,
    pub clusters: Vec<ClusterImage>,
    pub overlays: Vec<Overlay>,
    pub glcm_entropy: Option<FloatImage<f64>>,
    pub glcm_entropy_eq: Option<GrayImage>,
    pub distortion: f64,
}

/// One finished output handed to the sink: manifest key, file suffix, bytes.
pub struct Output<'a> {
    pub key: String,
    pub suffix: String,
    pub bytes: &'a [u8],
}

fn emit(
    sink: &mut dyn FnMut(Output<'_>) -> Result<(), PipelineError>,
    key: impl Into<String>,
    suffix: impl Into<String>,
    bytes: &[u8],
) -> Result<(), PipelineError> {
    sink(Output {
        key: key.into(),
        suffix: suffix.into(),
        bytes,
    })
}

/// Runs every stage on an in-memory image, passing each output to `sink` as
/// soon as it exists.
pub fn segment_image(
    original: &GrayImage,
    settings: &Settings,
    sink: &mut dyn FnMut(Output<'_>) -> Result<(), PipelineError>,
) -> Result<Artifacts, PipelineError> {
    settings.validate().map_err(|e| PipelineError::new(Stage::Config, e))?;

    log::info!("probability image");
    let probability = probability_image::<f64>(original);
    emit(sink, "probability", "_probability.pgm", &write_pgm(&quantize_to_gray(&probability)))?;
    let probability_eq = equalize_real(&probability);
    emit(sink, "probability_eq", "_probability_eq.pgm", &write_pgm(&probability_eq))?;

    log::info!("entropy image ({}x{} window)", settings.entropy.window_size(), settings.entropy.window_size());
    let entropy = entropy_image(original, &settings.entropy);
    let entropy_gray = quantize_to_gray(&entropy);
    emit(sink, "entropy", "_entropy.pgm", &write_pgm(&entropy_gray))?;
    let entropy_eq = histogram_equalize(&entropy_gray);
    emit(sink, "entropy_eq", "_entropy_eq.pgm", &write_pgm(&entropy_eq))?;

    let training = extract_training_vectors::<f64>(&entropy_eq, settings.block_w, settings.block_h)
        .map_err(|e| PipelineError::new(Stage::TrainingVectors, e))?;

    log::info!("kfcg codebook of size {} over {} vectors", settings.codebook_size, training.len());
    let codebook = kfcg_codebook(&training, settings.codebook_size)
        .map_err(|e| PipelineError::new(Stage::Codebook, e))?;
    emit(sink, "codebook", "_codebook.txt", write_codebook(&codebook).as_bytes())?;
    emit(sink, "assignment", "_assignment.txt", write_assignment(codebook.assignment()).as_bytes())?;
    let distortion = distortion(&training, &codebook).map_err(|e| PipelineError::new(Stage::Codebook, e))?;

    log::info!("requantizing {} codevectors into {}", codebook.size(), settings.num_clusters);
    let requantization = requantize_codebook(&codebook, settings.num_clusters.min(codebook.size()))
        .map_err(|e| PipelineError::new(Stage::Requantize, e))?;
    let super_assignment = requantization.compose(&codebook);

    let built = build_label_image(
        &training,
        &super_assignment,
        original.width(),
        original.height(),
        settings.block_w,
        settings.block_h,
    )
    .map_err(|e| PipelineError::new(Stage::Labels, e))?;
    // clusters that came out empty still get an (all-zero) image
    let labels = LabelImage::new(built.labels().clone(), settings.num_clusters)
        .map_err(|e| PipelineError::new(Stage::Labels, e))?;
    emit(sink, "labels", "_labels.pgm", &write_pgm(&labels.to_gray()))?;

    let source = match settings.cluster_source {
        ClusterSource::Entropy => &entropy_eq,
        ClusterSource::Original => original,
    };
    let mut clusters = Vec::with_capacity(settings.num_clusters);
    for id in 0..settings.num_clusters {
        let ci = cluster_image(source, &labels, id).map_err(|e| PipelineError::new(Stage::ClusterImages, e))?;
        emit(sink, format!("cluster{}", id + 1), format!("_cluster{}.pgm", id + 1), &write_pgm(&ci.image))?;
        clusters.push(ci);
    }

    let mut overlays = Vec::with_capacity(settings.overlay_clusters.len());
    for &cluster in &settings.overlay_clusters {
        log::info!("canny edges for cluster {cluster}");
        let stages = canny_stages(&clusters[cluster - 1].image, &settings.canny);
        let overlay = superimpose(original, &stages.edges).map_err(|e| PipelineError::new(Stage::Edges, e))?;
        emit(
            sink,
            format!("cluster{cluster}_edges"),
            format!("_cluster{cluster}_edges.pgm"),
            &write_pgm(&stages.edges.to_gray()),
        )?;
        emit(
            sink,
            format!("cluster{cluster}_overlay"),
            format!("_cluster{cluster}_overlay.pgm"),
            &write_pgm(&overlay),
        )?;
        overlays.push(Overlay {
            cluster,
            edges: stages.edges,
            overlay,
            low: stages.low,
            high: stages.high,
        });
    }

    let (glcm_entropy, glcm_entropy_eq) = if settings.emit_glcm_baseline {
        log::info!("glcm entropy baseline");
        let h = glcm_entropy_image::<f64>(original, &settings.glcm);
        emit(sink, "glcm_entropy", "_glcm_entropy.pgm", &write_pgm(&quantize_to_gray(&h)))?;
        let eq = equalize_real(&h);
        emit(sink, "glcm_entropy_eq", "_glcm_entropy_eq.pgm", &write_pgm(&eq))?;
        (Some(h), Some(eq))
    } else {
        (None, None)
    };

    Ok(Artifacts {
        probability,
        probability_eq,
        entropy,
        entropy_gray,
        entropy_eq,
        training,
        codebook,
        requantization,
        super_assignment,
        labels,
        clusters,
        overlays,
        glcm_entropy,
        glcm_entropy_eq,
        distortion,
    })
}

fn stem_of(input: &Path) -> String {
    input
        .file_stem()
        .and_then(|s| s.to_str())
        .filter(|s| !s.is_empty())
        .unwrap_or("image")
        .to_string()
}

/// Name of the manifest file written for `input`.
pub fn manifest_file_name(input: &Path) -> String {
    format!("{}_manifest.txt", stem_of(input))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn record_results(manifest: &mut RunManifest, art: &Artifacts) {
    manifest.set("codebook.size", art.codebook.size());
    manifest.set("codebook.requested", art.codebook.requested());
    manifest.set("codebook.dim", art.codebook.dim());
    manifest.set("codebook.iterations", art.codebook.iterations());
    manifest.set("codebook.distortion", fmt_f64(art.distortion));
    manifest.set("codebook.empty_split_count", art.codebook.shortfall());
    manifest.set("codebook.abandoned_splits", art.codebook.empty_children());
    manifest.set("clusters.produced", art.requantization.num_super_clusters());
    manifest.set("training.vectors", art.training.len());
    for ov in &art.overlays {
        manifest.set(format!("canny.cluster{}.high", ov.cluster), fmt_f64(ov.high));
        manifest.set(format!("canny.cluster{}.low", ov.cluster), fmt_f64(ov.low));
        manifest.set(format!("canny.cluster{}.edge_pixels", ov.cluster), ov.edges.count());
    }
}

/// Reads the input, runs every stage and writes the outputs and manifest to
/// `cfg.output_dir`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunManifest, PipelineError> {
    let stem = stem_of(&cfg.input);
    let outdir = &cfg.output_dir;
    let manifest_path = outdir.join(manifest_file_name(&cfg.input));

    let mut manifest = RunManifest::new();
    manifest.set("version", crate::VERSION);
    manifest.set("config.input", cfg.input.display());
    for (k, v) in cfg.settings.to_entries() {
        manifest.set(k, v);
    }

    fs::create_dir_all(outdir).map_err(|e| PipelineError::new(Stage::Write, format!("{}: {e}", outdir.display())))?;

    let result = (|| {
        let bytes = fs::read(&cfg.input)
            .map_err(|e| PipelineError::new(Stage::Read, format!("{}: {e}", cfg.input.display())))?;
        manifest.set("input.sha256", sha256_hex(&bytes));
        let original = read_gray(&bytes).map_err(|e| PipelineError::new(Stage::Read, e))?;
        manifest.set("input.width", original.width());
        manifest.set("input.height", original.height());

        let mut written: Vec<(String, String)> = Vec::new();
        let mut sink = |out: Output<'_>| {
            let name = format!("{stem}{}", out.suffix);
            fs::write(outdir.join(&name), out.bytes)
                .map_err(|e| PipelineError::new(Stage::Write, format!("{name}: {e}")))?;
            written.push((out.key, name));
            Ok(())
        };
        let art = segment_image(&original, &cfg.settings, &mut sink);
        for (k, name) in written {
            manifest.set(format!("output.{k}"), name);
        }
        art
    })();

    match result {
        Ok(art) => {
            record_results(&mut manifest, &art);
            manifest.set("status", "ok");
            fs::write(&manifest_path, manifest.to_text())
                .map_err(|e| PipelineError::new(Stage::Write, format!("{}: {e}", manifest_path.display())))?;
            Ok(manifest)
        }
        Err(err) => {
            manifest.set("status", "failed");
            manifest.set("failed_stage", err.stage);
            manifest.set("error", err.message.replace('\n', " "));
            // keep the original error even if the manifest cannot be written
            let _ = fs::write(&manifest_path, manifest.to_text());
            Err(err)
        }
    }
}

/// Rebuilds the configuration recorded in a manifest.
pub fn config_from_manifest(manifest: &RunManifest, output_dir: impl Into<PathBuf>) -> Result<PipelineConfig, ConfigError> {
    let input = manifest
        .get("config.input")
        .ok_or_else(|| ConfigError::MissingKey("config.input".into()))?;
    let settings = Settings::from_entries(|k| manifest.get(k).map(str::to_string))?;
    Ok(PipelineConfig {
        input: PathBuf::from(input),
        output_dir: output_dir.into(),
        settings,
    })
}

/// Re-runs the pipeline described by the manifest at `path`, writing into
/// `output_dir` or, by default, the manifest's own directory. The input must
/// still hash to the recorded checksum.
pub fn rerun_from_manifest(path: &Path, output_dir: Option<&Path>) -> Result<RunManifest, PipelineError> {
    let text = fs::read_to_string(path).map_err(|e| PipelineError::new(Stage::Config, format!("{}: {e}", path.display())))?;
    let manifest = RunManifest::parse(&text).map_err(|e| PipelineError::new(Stage::Config, e))?;
    let outdir = match output_dir {
        Some(d) => d.to_path_buf(),
        None => path.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let cfg = config_from_manifest(&manifest, outdir).map_err(|e| PipelineError::new(Stage::Config, e))?;
    if let Some(expected) = manifest.get("input.sha256") {
        let bytes = fs::read(&cfg.input)
            .map_err(|e| PipelineError::new(Stage::Read, format!("{}: {e}", cfg.input.display())))?;
        let actual = sha256_hex(&bytes);
        if actual != expected {
            return Err(PipelineError::new(
                Stage::Read,
                format!("input checksum {actual} does not match manifest {expected}"),
            ));
        }
    }
    run_pipeline(&cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noop() -> impl FnMut(Output<'_>) -> Result<(), PipelineError> {
        |_| Ok(())
    }

    #[test]
    fn constant_image_collapses_to_one_cluster() {
        let img = GrayImage::filled(16, 16, 90);
        let art = segment_image(&img, &Settings::default(), &mut noop()).unwrap();
        assert!(art.entropy.data().iter().all(|&h| h == 0.0));
        assert_eq!(art.codebook.size(), 1);
        assert_eq!(art.codebook.shortfall(), 127);
        assert_eq!(art.requantization.num_super_clusters(), 1);
        assert_eq!(art.clusters.len(), 8);
        assert!(art.clusters[1..].iter().all(|c| c.image.data().iter().all(|&v| v == 0)));
    }

    #[test]
    fn sink_sees_outputs_in_order() {
        let img = GrayImage::from_fn(32, 32, |x, y| ((x * 7 + y * 13) % 256) as u8);
        let mut keys = Vec::new();
        let mut sink = |o: Output<'_>| {
            keys.push(o.key);
            Ok(())
        };
        segment_image(&img, &Settings::default(), &mut sink).unwrap();
        assert_eq!(keys.first().map(String::as_str), Some("probability"));
        assert_eq!(keys.last().map(String::as_str), Some("glcm_entropy_eq"));
        assert_eq!(keys.len(), 21);
    }

    #[test]
    fn invalid_settings_fail_in_config_stage() {
        let s = Settings { num_clusters: 0, ..Settings::default() };
        let err = segment_image(&GrayImage::filled(4, 4, 0), &s, &mut noop()).unwrap_err();
        assert_eq!(err.stage, Stage::Config);
    }

    #[test]
    fn block_larger_than_image_names_stage() {
        let s = Settings { block_w: 8, ..Settings::default() };
        let err = segment_image(&GrayImage::filled(4, 4, 0), &s, &mut noop()).unwrap_err();
        assert_eq!(err.stage, Stage::TrainingVectors);
    }
}
