use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::fit_loglog;

/// One point of a convergence study: everything needed to reproduce a run
/// plus the measured approximation errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HbarRun {
    pub hbar: f64,
    pub grid_nx: usize,
    pub grid_ny: usize,
    pub dt: f64,
    pub t_final: f64,
    pub l2_error_raw: f64,
    pub l2_error_phase_opt: f64,
    /// None when the run did not measure a local-equation defect
    pub residual_norm: Option<f64>,
    pub runtime_seconds: f64,
}

/// Summary of a sweep over hbar with the fitted convergence rate
/// (phase-optimized error is the primary metric).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudyResult {
    pub scenario: String,
    pub hbars: Vec<f64>,
    pub runs: Vec<HbarRun>,
    pub slope: f64,
    pub intercept: f64,
    pub slope_raw: f64,
    pub fit_rms: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl StudyResult {
    /// Fits log(error) against log(hbar); pass means the phase-optimized
    /// slope meets `threshold`. Needs at least two runs with positive errors.
    pub fn from_runs(scenario: &str, runs: Vec<HbarRun>, threshold: f64) -> Result<Self> {
        if runs.len() < 2 {
            return Err(Error::Config(format!(
                "convergence fit needs at least two runs, got {}",
                runs.len()
            )));
        }
        let hbars: Vec<f64> = runs.iter().map(|r| r.hbar).collect();
        let raw: Vec<f64> = runs.iter().map(|r| r.l2_error_raw).collect();
        let opt: Vec<f64> = runs.iter().map(|r| r.l2_error_phase_opt).collect();
        if raw.iter().chain(opt.iter()).any(|&e| !(e > 0.0)) {
            return Err(Error::Config("convergence fit needs positive errors".into()));
        }
        let (slope_raw, _, _) = fit_loglog(&hbars, &raw);
        let (slope, intercept, fit_rms) = fit_loglog(&hbars, &opt);
        Ok(Self {
            scenario: scenario.to_string(),
            hbars,
            runs,
            slope,
            intercept,
            slope_raw,
            fit_rms,
            threshold,
            pass: slope >= threshold,
        })
    }

    /// CSV table of the per-run records, 17 significant digits.
    pub fn csv(&self) -> String {
        let mut out = String::from(
            "hbar,grid_nx,grid_ny,dt,T,l2_error_raw,l2_error_phase_opt,residual_norm,runtime_seconds\n",
        );
        for r in &self.runs {
            out.push_str(&format!(
                "{:.16e},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.hbar,
                r.grid_nx,
                r.grid_ny,
                r.dt,
                r.t_final,
                r.l2_error_raw,
                r.l2_error_phase_opt,
                r.residual_norm.unwrap_or(f64::NAN),
                r.runtime_seconds
            ));
        }
        out
    }

    /// Two-column `log10(hbar),log10(error)` plot data (phase-optimized).
    pub fn plot_data(&self) -> String {
        let mut out = String::new();
        for r in &self.runs {
            out.push_str(&format!(
                "{:.16e},{:.16e}\n",
                r.hbar.log10(),
                r.l2_error_phase_opt.log10()
            ));
        }
        out
    }
}
