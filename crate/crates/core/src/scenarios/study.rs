//! End-to-end pipelines: for each hbar assemble the approximant, propagate a
//! grid reference, evolve the semiclassical data, and measure the L2 gap;
//! plus the local-equation residual sweep and the small-exponent marginal
//! comparison.

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Geometry, Scenario};
use crate::classical::{
    evolve_dispersion, integrate_flat, DispersionConvention, FlatMetric,
};
use crate::error::{Error, Result};
use crate::geometry::TubularChart;
use crate::numerics::fit_loglog;
use crate::packets::PacketParams;
use crate::quantum::assemble::TransverseProfile;
use crate::quantum::{
    assemble_curve, assemble_flat, l2_error, marginal_x, residual_norm, transverse_spread,
    CutSpec, Grid2D, HarmonicGroundCorrection, HarmonicProfile, HbarRun, Propagator, StudyResult,
    TubGrid,
};

/// A convergence study plus side diagnostics that do not fit the per-run
/// CSV record: the final reference state's transverse spread (curve
/// scenarios) and the largest deviation of the classical base speed from
/// its initial value.
pub struct StudyOutput {
    pub result: StudyResult,
    /// sqrt(var u) of the final reference state per hbar; empty for flat
    pub spreads: Vec<f64>,
    pub max_speed_deviation: f64,
}

fn packet_profile(sc: &Scenario) -> HarmonicProfile {
    let light = (sc.id, sc.params.clone());
    let (id, params) = light;
    let omega: Box<dyn Fn(f64) -> f64 + Sync + Send> = match id {
        "standard" | "alpha-sweep" => Box::new(|x: f64| (1.0 + x * x).sqrt()),
        "circle" => {
            let w = params["omega"];
            Box::new(move |_| w)
        }
        "magnetic-trap" => {
            let kappa = params["kappa"];
            let r0 = params["r0"];
            let ze = params["z_extent"];
            // rebuild the curve to map arc length to z; cheap and owned
            let curve = crate::geometry::PlaneCurve::from_param_with_deriv(
                move |t| [r0 - kappa * t * t, t],
                move |t| [-2.0 * kappa * t, 1.0],
                (-ze, ze),
                false,
                128,
            )
            .expect("trap curve is non-degenerate");
            Box::new(move |s: f64| {
                let z = curve.point(s).map(|p| p[1]).unwrap_or(0.0);
                (1.0 + 4.0 * kappa * kappa * z * z).sqrt()
            })
        }
        other => panic!("no harmonic profile for scenario {other}"),
    };
    HarmonicProfile { omega, v0: Box::new(|_| 0.0), squeeze: sc.squeeze(), n: sc.mode_n() }
}

/// Ground coherent packet A = B = 1 at the given phase-space point.
fn standard_packet(hbar: f64, centre: f64, momentum: f64) -> Result<PacketParams> {
    let one = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    PacketParams::new(hbar, vec![centre], vec![momentum], one.clone(), one, vec![0])
}

fn cut_for(hbar_max: f64, s_lo: f64, s_hi: f64, period: Option<f64>) -> CutSpec {
    // inner plateau covers the trajectory plus six packet widths at the
    // largest hbar of the sweep
    let width = (hbar_max / 2.0f64).sqrt();
    let c = 0.5 * (s_lo + s_hi);
    let inner = 0.5 * (s_hi - s_lo) + 6.0 * width;
    CutSpec {
        s_center: c,
        s_inner: inner,
        s_outer: inner + 4.0 * width,
        u_inner: f64::INFINITY,
        u_outer: f64::INFINITY,
        period,
    }
}

fn curve_cut(hbar_max: f64, s_lo: f64, s_hi: f64, chart: &TubularChart) -> CutSpec {
    let mut cut = cut_for(
        hbar_max,
        s_lo,
        s_hi,
        chart.curve().is_closed().then(|| chart.curve().total_length()),
    );
    let u_inner = 0.6 * chart.half_width();
    cut.u_inner = u_inner;
    cut.u_outer = chart.half_width().min(u_inner * 1.5);
    cut
}

/// Classical sweep bounds of the base trajectory over [0, T].
fn trajectory_bounds(traj: &crate::classical::ClassicalTrajectory) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in &traj.position {
        lo = lo.min(p[0]);
        hi = hi.max(p[0]);
    }
    (lo, hi)
}

/// Runs the full semiclassical-vs-reference comparison over an hbar sweep
/// and fits the phase-optimized L2 error against hbar. `threads` > 1 runs
/// the per-hbar pipelines on scoped worker threads; results are collected
/// in sweep order either way.
pub fn convergence_study(
    sc: &Scenario,
    hbars: &[f64],
    threshold: f64,
    threads: usize,
) -> Result<StudyOutput> {
    if hbars.len() < 3 {
        return Err(Error::Config(format!(
            "a convergence study needs at least three hbar values, got {}",
            hbars.len()
        )));
    }
    let hbar_max = hbars.iter().cloned().fold(0.0f64, f64::max);
    let profile = packet_profile(sc);
    let threads = threads.max(1).min(hbars.len());
    let outcomes: Vec<Result<(HbarRun, Option<f64>, f64)>> = if threads == 1 {
        hbars.iter().map(|&h| study_single(sc, &profile, h, hbar_max)).collect()
    } else {
        let mut slots: Vec<Option<Result<(HbarRun, Option<f64>, f64)>>> =
            (0..hbars.len()).map(|_| None).collect();
        let mut chunks: Vec<Vec<(f64, &mut Option<Result<(HbarRun, Option<f64>, f64)>>)>> =
            (0..threads).map(|_| Vec::new()).collect();
        for (i, (&h, slot)) in hbars.iter().zip(slots.iter_mut()).enumerate() {
            chunks[i % threads].push((h, slot));
        }
        std::thread::scope(|scope| {
            let mut workers = Vec::new();
            for chunk in chunks {
                let profile = &profile;
                workers.push(scope.spawn(move || {
                    for (h, slot) in chunk {
                        *slot = Some(study_single(sc, profile, h, hbar_max));
                    }
                }));
            }
            for w in workers {
                w.join().expect("study worker panicked");
            }
        });
        slots.into_iter().map(|s| s.expect("every sweep slot filled")).collect()
    };
    let mut runs = Vec::new();
    let mut spreads = Vec::new();
    let mut max_speed_dev = 0.0f64;
    for outcome in outcomes {
        let (run, spread, dev) = outcome?;
        runs.push(run);
        spreads.extend(spread);
        max_speed_dev = max_speed_dev.max(dev);
    }
    let result = StudyResult::from_runs(sc.id, runs, threshold)?;
    Ok(StudyOutput { result, spreads, max_speed_deviation: max_speed_dev })
}

/// One hbar of the comparison: returns the run record, the final transverse
/// spread (curve scenarios only), and the largest base-speed deviation.
fn study_single(
    sc: &Scenario,
    profile: &HarmonicProfile,
    hbar: f64,
    hbar_max: f64,
) -> Result<(HbarRun, Option<f64>, f64)> {
    let (s0, eta0) = sc.initial();
    let t_final = sc.horizon();
    {
        let t0 = Instant::now();
        let hints = sc.grid_hints(hbar)?;
        let grid = Grid2D::new(hints.x_range, hints.y_range, hints.nx, hints.ny)?;
        let pot = sc.effective_potential(hbar)?;
        let classical_dt = 1e-3;
        let traj = integrate_flat(&pot, &[s0], &[eta0], t_final, classical_dt)?;
        let a0 = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        let b0 = a0.clone();
        let traj = evolve_dispersion(
            &FlatMetric(1),
            &pot,
            &traj,
            &a0,
            &b0,
            DispersionConvention::FlatConsistent,
        )?;
        let mut speed_dev = 0.0f64;
        for step in &traj.momentum {
            speed_dev = speed_dev.max((step[0].abs() - eta0.abs()).abs());
        }
        let (lo, hi) = trajectory_bounds(&traj);
        let last = traj.times.len() - 1;
        let (a_t, eta_t, s_action) =
            (traj.position[last][0], traj.momentum[last][0], traj.action[last]);
        let a_mat = traj.a_mat.as_ref().expect("dispersion filled")[last].clone();
        let b_mat = traj.b_mat.as_ref().expect("dispersion filled")[last].clone();
        let packet0 = standard_packet(hbar, s0, eta0)?;
        let packet_t = PacketParams::new(hbar, vec![a_t], vec![eta_t], a_mat, b_mat, vec![0])?;

        let (initial, fin, chart_opt) = match &sc.geometry {
            Geometry::Flat => {
                let cut = cut_for(hbar_max, lo, hi, None);
                let dil = sc.dilation(hbar);
                let init = assemble_flat(&packet0, profile, &cut, grid, 0.0, dil)?;
                let fin = assemble_flat(&packet_t, profile, &cut, grid, s_action, dil)?;
                (init, fin, None)
            }
            Geometry::Curve { curve, half_width } => {
                let chart = TubularChart::new(curve.clone(), *half_width)?;
                let cut = curve_cut(hbar_max, lo, hi, &chart);
                let init = assemble_curve(&chart, &packet0, profile, &cut, grid, 0.0, None)?;
                let fin =
                    assemble_curve(&chart, &packet_t, profile, &cut, grid, s_action, None)?;
                (init, fin, Some(chart))
            }
        };

        let grid_pot = sc.grid_potential(hbar)?;
        let mut state = initial.state;
        let steps = (t_final / hints.dt).round() as usize;
        let dt = t_final / steps as f64;
        let mut prop = Propagator::new(grid, &*grid_pot, hbar, dt)?;
        prop.propagate(&mut state, steps)?;
        let mut spread = None;
        if let Some(chart) = &chart_opt {
            let (_, var, _) = transverse_spread(&state, chart)?;
            spread = Some(var.max(0.0).sqrt());
        }
        let err = l2_error(&state, &fin.state)?;
        let run = HbarRun {
            hbar,
            grid_nx: hints.nx,
            grid_ny: hints.ny,
            dt,
            t_final,
            l2_error_raw: err.raw,
            l2_error_phase_opt: err.phase_optimized,
            residual_norm: None,
            runtime_seconds: t0.elapsed().as_secs_f64(),
        };
        Ok((run, spread, speed_dev))
    }
}

/// Local-equation defect of the semiclassically evolved approximant in chart
/// coordinates, per hbar, with the fitted slope. With the order-hbar
/// transverse correction the defect is O(hbar^{3/2}); without it the O(hbar)
/// sources survive.
pub fn residual_sweep(
    sc: &Scenario,
    hbars: &[f64],
    t_eval: f64,
    correction_on: bool,
) -> Result<(Vec<f64>, f64)> {
    let (s0, eta0) = sc.initial();
    let profile = packet_profile(sc);
    let a = sc.squeeze();
    let chart = match &sc.geometry {
        Geometry::Flat => None,
        Geometry::Curve { curve, half_width } => {
            Some(TubularChart::new(curve.clone(), *half_width)?)
        }
    };
    let mut residuals = Vec::new();
    for &hbar in hbars {
        let pot = sc.effective_potential(hbar)?;
        // (s, u) grid: transverse extent in the dilated variable
        let beta_min = sc.omega(s0)? / a * 0.5;
        let u_half = 9.0 / beta_min.sqrt();
        let span = 2.2 + 8.0 * hbar.sqrt();
        let grid = TubGrid::new((s0 - span, s0 + span), 256, u_half, 128)?;
        let correction = correction_on.then(|| {
            let light_id = sc.id;
            let params = sc.params.clone();
            let squeeze = a;
            HarmonicGroundCorrection {
                beta: match light_id {
                    "standard" | "alpha-sweep" => {
                        Box::new(move |s: f64| (1.0 + s * s).sqrt() / squeeze)
                            as Box<dyn Fn(f64) -> f64 + Sync + Send>
                    }
                    "circle" => {
                        let w = params["omega"] / squeeze;
                        Box::new(move |_| w)
                    }
                    other => panic!("no harmonic correction wiring for {other}"),
                },
                curvature: match &sc.geometry {
                    Geometry::Flat => Box::new(|_| 0.0),
                    Geometry::Curve { curve, .. } => {
                        let c = curve.clone();
                        Box::new(move |s: f64| c.curvature(s).unwrap_or(0.0))
                    }
                },
                dv_du: Box::new(|_| 0.0),
                d3w_du3: Box::new(|_| 0.0),
                squeeze: a,
            }
        });
        let tv_pot = transverse_channel_potential(sc)?;
        let sample = |t: f64| -> Result<Vec<Complex64>> {
            // integrate the classical data to exactly time t
            let steps = (t / 1e-3).ceil().max(1.0) as usize;
            let dt = t / steps as f64;
            let traj = integrate_flat(&pot, &[s0], &[eta0], t.max(1e-12), dt)?;
            let a0 = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
            let b0 = a0.clone();
            let traj = evolve_dispersion(
                &FlatMetric(1),
                &pot,
                &traj,
                &a0,
                &b0,
                DispersionConvention::FlatConsistent,
            )?;
            let last = traj.times.len() - 1;
            let packet = PacketParams::new(
                hbar,
                vec![traj.position[last][0]],
                vec![traj.momentum[last][0]],
                traj.a_mat.as_ref().unwrap()[last].clone(),
                traj.b_mat.as_ref().unwrap()[last].clone(),
                vec![0],
            )?;
            let eta_t = traj.momentum[last][0];
            let phase = Complex64::new(0.0, traj.action[last] / hbar).exp();
            let pts: Vec<Vec<f64>> = (0..grid.ns).map(|i| vec![grid.s(i)]).collect();
            let phi = crate::packets::evaluate_packet(&packet, &pts)?;
            let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
            for i in 0..grid.ns {
                let s = grid.s(i);
                for j in 0..grid.nu {
                    let u = grid.u(j);
                    let mut tv = Complex64::new(profile.eval(s, u), 0.0);
                    if let Some(corr) = &correction {
                        tv += corr.eval(s, u, eta_t) * hbar;
                    }
                    out[grid.idx(i, j)] = phase * phi[i] * tv;
                }
            }
            Ok(out)
        };
        let delta = 0.05 * hbar * hbar;
        let res = residual_norm(
            &grid,
            chart.as_ref(),
            hbar,
            &*tv_pot,
            &sample,
            t_eval.max(2.0 * delta),
            delta,
        )?;
        residuals.push(res);
    }
    let (slope, _, _) = fit_loglog(hbars, &residuals);
    Ok((residuals, slope))
}

/// Transverse channel potential on the (s, dilated u) grid for the chart
/// Hamiltonian: the dilated confinement plus the band's longitudinal part.
fn transverse_channel_potential(
    sc: &Scenario,
) -> Result<Box<dyn Fn(f64, f64) -> f64 + Sync + Send>> {
    let a2 = sc.squeeze() * sc.squeeze();
    match sc.id {
        "standard" | "alpha-sweep" => {
            Ok(Box::new(move |s: f64, u: f64| (1.0 + s * s) * u * u / (2.0 * a2)))
        }
        "circle" => {
            let w = sc.params["omega"];
            Ok(Box::new(move |_s: f64, u: f64| w * w * u * u / (2.0 * a2)))
        }
        other => Err(Error::Unsupported(format!(
            "no chart-coordinate channel potential for scenario {other}"
        ))),
    }
}

/// At a dilation exponent alpha < 1 the effective base dynamics is free: the
/// x-marginal of the reference evolution approaches the freely evolved
/// packet's marginal as hbar shrinks. Returns the per-hbar marginal L2
/// distances and the fitted slope (positive means suppression).
pub fn alpha_marginal_study(sc: &Scenario, hbars: &[f64]) -> Result<(Vec<f64>, f64)> {
    if sc.alpha() >= 1.0 {
        return Err(Error::Config(
            "the marginal comparison needs alpha < 1; at alpha = 1 the band survives".into(),
        ));
    }
    let (x0, eta0) = sc.initial();
    let t_final = sc.horizon();
    let profile = packet_profile(sc);
    let hbar_max = hbars.iter().cloned().fold(0.0f64, f64::max);
    let mut dists = Vec::new();
    for &hbar in hbars {
        let hints = sc.grid_hints(hbar)?;
        let grid = Grid2D::new(hints.x_range, hints.y_range, hints.nx, hints.ny)?;
        let cut = cut_for(hbar_max, x0 - 0.5, x0 + eta0.abs() * t_final + 0.5, None);
        let packet0 = standard_packet(hbar, x0, eta0)?;
        let dil = sc.dilation(hbar);
        let init = assemble_flat(&packet0, &profile, &cut, grid, 0.0, dil)?;
        let mut state = init.state;
        let steps = (t_final / hints.dt).round() as usize;
        let dt = t_final / steps as f64;
        let grid_pot = sc.grid_potential(hbar)?;
        let mut prop = Propagator::new(grid, &*grid_pot, hbar, dt)?;
        prop.propagate(&mut state, steps)?;
        let reference = marginal_x(&state);
        // free evolution of the base packet: a = x0 + eta0 t, A = A0 + i t B0
        let a_mat = DMatrix::from_element(1, 1, Complex64::new(1.0, t_final));
        let b_mat = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        let free = PacketParams::new(
            hbar,
            vec![x0 + eta0 * t_final],
            vec![eta0],
            a_mat,
            b_mat,
            vec![0],
        )?;
        let pts: Vec<Vec<f64>> = (0..grid.nx).map(|ix| vec![grid.x(ix)]).collect();
        let phi = crate::packets::evaluate_packet(&free, &pts)?;
        let mut dist2 = 0.0;
        for ix in 0..grid.nx {
            let d = reference[ix] - phi[ix].norm_sqr();
            dist2 += d * d;
        }
        dists.push((dist2 * grid.dx()).sqrt());
    }
    let (slope, _, _) = fit_loglog(hbars, &dists);
    Ok((dists, slope))
}
