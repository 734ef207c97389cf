//! Argument parsing for the `entroseg` binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entroseg_core::entropy::{EntropyConfig, EntropyMode};
use entroseg_core::glcm::GlcmConfig;
use entroseg_core::pipeline::{parse_block, parse_pair, ClusterSource, ConfigError, PipelineConfig, Settings};
use entroseg_core::segmentation::CannyParams;

#[derive(Debug, Parser)]
#[command(name = "entroseg", version, about = "Entropy-texture KFCG segmentation of grayscale images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full pipeline on one image.
    Run(RunArgs),
    /// Re-run the pipeline recorded in a manifest.
    Rerun {
        /// Manifest written by a previous run.
        #[arg(long)]
        manifest: PathBuf,
        /// Output directory [default: the manifest's directory].
        #[arg(long)]
        outdir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    ProbSum,
    LocalEmpirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    Entropy,
    Original,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Input image (binary PGM, or 8-bit PNG).
    #[arg(long)]
    pub input: PathBuf,
    /// Directory receiving every output file.
    #[arg(long)]
    pub outdir: PathBuf,
    /// Entropy window side, odd and at least 3.
    #[arg(long, default_value_t = 3, value_parser = parse_window)]
    pub window: usize,
    /// Entropy interpretation.
    #[arg(long, value_enum, default_value_t = ModeArg::ProbSum)]
    pub mode: ModeArg,
    /// Logarithm base of the entropy.
    #[arg(long, default_value_t = 2.0)]
    pub log_base: f64,
    /// Block size of the training vectors, as WxH.
    #[arg(long, default_value = "2x2", value_parser = parse_block_arg)]
    pub block: (usize, usize),
    /// KFCG codebook size.
    #[arg(long, default_value_t = 128)]
    pub codebook: usize,
    /// Number of super-clusters after requantization.
    #[arg(long, default_value_t = 8)]
    pub clusters: usize,
    /// Pixels shown inside each cluster image.
    #[arg(long, value_enum, default_value_t = SourceArg::Entropy)]
    pub cluster_source: SourceArg,
    /// 1-based clusters receiving edge maps and overlays, comma separated.
    #[arg(long, default_value = "4,8", value_delimiter = ',')]
    pub overlay: Vec<usize>,
    /// Skip the GLCM entropy baseline.
    #[arg(long)]
    pub no_glcm: bool,
    /// Gaussian sigma of the Canny smoothing.
    #[arg(long, default_value_t = 1.0)]
    pub canny_sigma: f64,
    /// Canny high threshold as a fraction of the maximum gradient magnitude.
    #[arg(long, default_value_t = 0.2)]
    pub canny_high_frac: f64,
    /// Canny low threshold as a fraction of the high threshold.
    #[arg(long, default_value_t = 0.4)]
    pub canny_low_frac: f64,
    /// GLCM gray levels (power of two, 2..=256).
    #[arg(long, default_value_t = 8)]
    pub glcm_levels: usize,
    /// GLCM pixel offset as dx,dy.
    #[arg(long, default_value = "1,0", value_parser = parse_pair_arg, allow_hyphen_values = true)]
    pub glcm_offset: (isize, isize),
    /// GLCM window side, odd and at least 3.
    #[arg(long, default_value_t = 3, value_parser = parse_window)]
    pub glcm_window: usize,
    /// Count GLCM pairs in one direction only.
    #[arg(long)]
    pub glcm_asymmetric: bool,
}

fn parse_window(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("{s:?} is not a positive integer"))?;
    if n < 3 || n.is_multiple_of(2) {
        return Err(format!("window size must be odd and at least 3, got {n}"));
    }
    Ok(n)
}

fn parse_block_arg(s: &str) -> Result<(usize, usize), String> {
    parse_block(s).map_err(|e| e.to_string())
}

fn parse_pair_arg(s: &str) -> Result<(isize, isize), String> {
    parse_pair(s).map_err(|e| e.to_string())
}

impl RunArgs {
    pub fn into_config(self) -> Result<PipelineConfig, ConfigError> {
        let mode = match self.mode {
            ModeArg::ProbSum => EntropyMode::ProbabilitySum,
            ModeArg::LocalEmpirical => EntropyMode::LocalEmpirical,
        };
        let settings = Settings {
            entropy: EntropyConfig::new(self.window, self.log_base, mode)?,
            block_w: self.block.0,
            block_h: self.block.1,
            codebook_size: self.codebook,
            num_clusters: self.clusters,
            canny: CannyParams::relative(self.canny_sigma, self.canny_high_frac, self.canny_low_frac)?,
            glcm: GlcmConfig::new(self.glcm_window, self.glcm_offset, self.glcm_levels, !self.glcm_asymmetric)?,
            emit_glcm_baseline: !self.no_glcm,
            cluster_source: match self.cluster_source {
                SourceArg::Entropy => ClusterSource::Entropy,
                SourceArg::Original => ClusterSource::Original,
            },
            overlay_clusters: self.overlay,
        };
        settings.validate()?;
        Ok(PipelineConfig {
            input: self.input,
            output_dir: self.outdir,
            settings,
        })
    }
}

#[derive(Debug)]
pub enum Invocation {
    Run(Box<PipelineConfig>),
    Rerun { manifest: PathBuf, outdir: Option<PathBuf> },
}

#[derive(Debug, thiserror::Error)]
pub enum ArgsError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Parses a full argument vector, program name first.
pub fn parse_args<I, T>(argv: I) -> Result<Invocation, ArgsError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    Ok(match cli.command {
        Command::Run(args) => Invocation::Run(Box::new(args.into_config()?)),
        Command::Rerun { manifest, outdir } => Invocation::Rerun { manifest, outdir },
    })
}
