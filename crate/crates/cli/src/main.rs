use std::process::ExitCode;

use entroseg_cli::{parse_args, ArgsError, Invocation};
use entroseg_core::pipeline::{rerun_from_manifest, run_pipeline};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();

    let invocation = match parse_args(std::env::args_os()) {
        Ok(inv) => inv,
        Err(ArgsError::Clap(e)) => e.exit(),
        Err(e) => {
            eprintln!("entroseg: stage config failed: {e}");
            return ExitCode::from(2);
        }
    };

    let result = match invocation {
        Invocation::Run(cfg) => run_pipeline(&cfg),
        Invocation::Rerun { manifest, outdir } => rerun_from_manifest(&manifest, outdir.as_deref()),
    };
    match result {
        Ok(manifest) => {
            let outputs = manifest.outputs().count();
            log::info!(
                "done: {outputs} outputs, codebook {} of {}, {} clusters",
                manifest.get("codebook.size").unwrap_or("?"),
                manifest.get("codebook.requested").unwrap_or("?"),
                manifest.get("clusters.produced").unwrap_or("?"),
            );
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("entroseg: {err}");
            ExitCode::FAILURE
        }
    }
}
