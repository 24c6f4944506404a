//! The fourteen-figure reference set: RF and CRF series at `n ∈ {0, 40}`
//! over `τ ∈ [0, 50]`, written as CSV + SVG pairs with a JSON manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::analytic::{Frame, Observable};
use crate::error::{QrmError, Result};
use crate::exec::Execution;
use crate::experiment::{
    run_experiment_with, ExperimentConfig, OutputKind, TimeSeriesBundle, DEFAULT_EPSILON,
};
use crate::output::{to_csv_string, to_svg_string, write_file};

pub const RF_XI: f64 = 0.0;
pub const CRF_XI: f64 = 1.0 / 1.31;
pub const FIGURE_TAU_MAX: f64 = 50.0;
pub const FIGURE_STEPS: usize = 2000;
pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamSource {
    /// Stated with the figure.
    Given,
    /// Not stated; the default is used.
    Assumed,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FigureSpec {
    pub id: &'static str,
    pub frame: Frame,
    pub n: usize,
    pub column: Observable,
    pub description: &'static str,
}

impl FigureSpec {
    pub fn xi(&self) -> f64 {
        match self.frame {
            Frame::Rf => RF_XI,
            Frame::Crf => CRF_XI,
        }
    }

    pub fn epsilon_source(&self) -> ParamSource {
        match self.frame {
            Frame::Rf => ParamSource::Assumed,
            Frame::Crf => ParamSource::Given,
        }
    }

    pub fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            frame: self.frame,
            n: self.n,
            xi: self.xi(),
            epsilon: DEFAULT_EPSILON,
            g: 1.0,
            tau_max: FIGURE_TAU_MAX,
            steps: FIGURE_STEPS,
            n_max: None,
            outputs: vec![OutputKind::Csv, OutputKind::Svg],
        }
    }
}

const fn fig(
    id: &'static str,
    frame: Frame,
    n: usize,
    column: Observable,
    description: &'static str,
) -> FigureSpec {
    FigureSpec {
        id,
        frame,
        n,
        column,
        description,
    }
}

pub const FIGURES: [FigureSpec; 14] = [
    fig(
        "fig01",
        Frame::Rf,
        0,
        Observable::AtomicExcitation,
        "atomic excitation, RF, n=0",
    ),
    fig(
        "fig02",
        Frame::Rf,
        0,
        Observable::Photon,
        "mean photon number, RF, n=0",
    ),
    fig(
        "fig03",
        Frame::Rf,
        0,
        Observable::NJc,
        "JC excitation number, RF, n=0",
    ),
    fig(
        "fig04",
        Frame::Rf,
        0,
        Observable::NAjc,
        "AJC excitation number, RF, n=0",
    ),
    fig(
        "fig05",
        Frame::Rf,
        40,
        Observable::AtomicExcitation,
        "atomic excitation, RF, n=40",
    ),
    fig(
        "fig06",
        Frame::Rf,
        40,
        Observable::Photon,
        "mean photon number, RF, n=40",
    ),
    fig(
        "fig07",
        Frame::Rf,
        40,
        Observable::NAjc,
        "AJC excitation number, RF, n=40",
    ),
    fig(
        "fig08",
        Frame::Crf,
        0,
        Observable::AtomicExcitation,
        "atomic excitation, CRF, n=0",
    ),
    fig(
        "fig09",
        Frame::Crf,
        0,
        Observable::Photon,
        "mean photon number, CRF, n=0",
    ),
    fig(
        "fig10",
        Frame::Crf,
        0,
        Observable::NAjc,
        "AJC excitation number, CRF, n=0",
    ),
    fig(
        "fig11",
        Frame::Crf,
        0,
        Observable::NJc,
        "JC excitation number, CRF, n=0",
    ),
    fig(
        "fig12",
        Frame::Crf,
        40,
        Observable::AtomicExcitation,
        "atomic excitation, CRF, n=40",
    ),
    fig(
        "fig13",
        Frame::Crf,
        40,
        Observable::Photon,
        "mean photon number, CRF, n=40",
    ),
    fig(
        "fig14",
        Frame::Crf,
        40,
        Observable::NJc,
        "JC excitation number, CRF, n=40",
    ),
];

#[derive(Clone, Debug, Serialize)]
pub struct ManifestEntry {
    pub id: &'static str,
    pub description: &'static str,
    pub frame: Frame,
    pub n: usize,
    pub column: &'static str,
    pub xi: f64,
    pub epsilon: f64,
    pub epsilon_source: ParamSource,
    pub g: f64,
    pub tau_max: f64,
    pub steps: usize,
    pub csv: String,
    pub svg: String,
}

#[derive(Clone, Debug)]
pub struct FigureOutput {
    pub spec: FigureSpec,
    pub bundle: TimeSeriesBundle,
    pub csv_path: PathBuf,
    pub svg_path: PathBuf,
}

impl FigureOutput {
    pub fn series(&self) -> Vec<f64> {
        self.bundle.column(self.spec.column)
    }

    fn manifest_entry(&self) -> ManifestEntry {
        let c = &self.bundle.config;
        let file_name = |p: &Path| {
            p.file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        };
        ManifestEntry {
            id: self.spec.id,
            description: self.spec.description,
            frame: c.frame,
            n: c.n,
            column: self.spec.column.name(),
            xi: c.xi,
            epsilon: c.epsilon,
            epsilon_source: self.spec.epsilon_source(),
            g: c.g,
            tau_max: c.tau_max,
            steps: c.steps,
            csv: file_name(&self.csv_path),
            svg: file_name(&self.svg_path),
        }
    }
}

pub fn manifest_json(outputs: &[FigureOutput]) -> String {
    let entries: Vec<ManifestEntry> = outputs.iter().map(FigureOutput::manifest_entry).collect();
    let mut text = serde_json::to_string_pretty(&entries).expect("manifest serializes");
    text.push('\n');
    text
}

pub fn reproduce_figures(outdir: &Path) -> Result<Vec<FigureOutput>> {
    reproduce_figures_with(outdir, Execution::default())
}

pub fn reproduce_figures_with(outdir: &Path, exec: Execution) -> Result<Vec<FigureOutput>> {
    fs::create_dir_all(outdir).map_err(|e| QrmError::io(outdir, e))?;
    let outputs = exec.try_map(&FIGURES, |spec| -> Result<FigureOutput> {
        let bundle = run_experiment_with(&spec.config(), Execution::Sequential)?;
        let csv_path = outdir.join(format!("{}.csv", spec.id));
        let svg_path = outdir.join(format!("{}.svg", spec.id));
        write_file(&csv_path, &to_csv_string(&bundle, false))?;
        write_file(&svg_path, &to_svg_string(&bundle, spec.column))?;
        Ok(FigureOutput {
            spec: *spec,
            bundle,
            csv_path,
            svg_path,
        })
    })?;
    write_file(&outdir.join(MANIFEST_NAME), &manifest_json(&outputs))?;
    Ok(outputs)
}
