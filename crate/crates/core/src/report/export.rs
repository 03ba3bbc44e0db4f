//! Plot-ready artifacts: one loop sample and the kernel it was drawn from.

use std::path::{Path, PathBuf};

use super::config::RunConfig;
use super::record::ReportError;
use crate::gaussian::{spectral_kernel, GreenKernel, LoopSampler};

/// Write `loop_sample.csv`, `loop_sample.json` and `green_kernel.csv` into `dir`.
pub fn export_artifacts(cfg: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>, ReportError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ReportError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let sampler = LoopSampler::new(cfg.mc.seed, cfg.d, cfg.mc.k_mc, cfg.mc.m).expect("validated config");
    let sample = sampler.sample(0);

    let mut kernel = String::from("s,closed_form,spectral_sum\n");
    let g = GreenKernel::default();
    for m in 0..cfg.mc.m {
        let s = m as f64 / cfg.mc.m as f64;
        kernel.push_str(&format!("{s:e},{:e},{:e}\n", g.eval_hyperbolic(s, 0.0), spectral_kernel(s, 0.0, cfg.mc.k_mc)));
    }

    let files = [
        ("loop_sample.csv", sample.to_csv()),
        ("loop_sample.json", sample.header_json() + "\n"),
        ("green_kernel.csv", kernel),
    ];
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        std::fs::write(&path, body).map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}
