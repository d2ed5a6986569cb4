use super::grid::GridState;
use crate::error::Result;
use crate::geometry::TubularChart;

/// Grid-quadrature moments of a state.
#[derive(Debug, Clone, Copy)]
pub struct Observables {
    pub norm: f64,
    pub mean_x: f64,
    pub mean_y: f64,
    pub var_x: f64,
    pub var_y: f64,
}

pub fn observables(state: &GridState) -> Observables {
    let g = &state.grid;
    let cell = g.dx() * g.dy();
    let (mut m0, mut mx, mut my, mut mxx, mut myy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ix in 0..g.nx {
        let x = g.x(ix);
        for iy in 0..g.ny {
            let w = state.values[g.idx(ix, iy)].norm_sqr() * cell;
            let y = g.y(iy);
            m0 += w;
            mx += w * x;
            my += w * y;
            mxx += w * x * x;
            myy += w * y * y;
        }
    }
    let (ex, ey) = (mx / m0, my / m0);
    Observables {
        norm: m0.sqrt(),
        mean_x: ex,
        mean_y: ey,
        var_x: mxx / m0 - ex * ex,
        var_y: myy / m0 - ey * ey,
    }
}

/// First two moments of the signed distance to the chart's curve, weighted
/// by |psi|^2. Grid points outside the tube are skipped; their total weight
/// is returned as the third value.
pub fn transverse_spread(state: &GridState, chart: &TubularChart) -> Result<(f64, f64, f64)> {
    let g = &state.grid;
    let cell = g.dx() * g.dy();
    let (mut m0, mut mu, mut muu, mut outside) = (0.0, 0.0, 0.0, 0.0);
    let mut guess: Option<f64> = None;
    for ix in 0..g.nx {
        let x = g.x(ix);
        for iy in 0..g.ny {
            let w = state.values[g.idx(ix, iy)].norm_sqr() * cell;
            if w == 0.0 {
                continue;
            }
            // a stale warm start (previous row ended on the far side of the
            // curve) can fail on a point that is inside the tube: retry cold
            let res = match guess {
                Some(s) => chart
                    .from_cartesian_guess([x, g.y(iy)], s)
                    .or_else(|_| chart.from_cartesian([x, g.y(iy)])),
                None => chart.from_cartesian([x, g.y(iy)]),
            };
            match res {
                Ok((s, u)) => {
                    guess = Some(s);
                    m0 += w;
                    mu += w * u;
                    muu += w * u * u;
                }
                Err(_) => outside += w,
            }
        }
    }
    if m0 == 0.0 {
        return Ok((0.0, 0.0, outside));
    }
    let mean = mu / m0;
    Ok((mean, muu / m0 - mean * mean, outside))
}

/// |psi|^2 integrated over y: one density value per x column.
pub fn marginal_x(state: &GridState) -> Vec<f64> {
    let g = &state.grid;
    let dy = g.dy();
    (0..g.nx)
        .map(|ix| {
            (0..g.ny)
                .map(|iy| state.values[g.idx(ix, iy)].norm_sqr())
                .sum::<f64>()
                * dy
        })
        .collect()
}

/// L2 distance between two states, raw and minimized over a global phase.
#[derive(Debug, Clone, Copy)]
pub struct L2Error {
    pub raw: f64,
    pub phase_optimized: f64,
}

pub fn l2_error(s1: &GridState, s2: &GridState) -> Result<L2Error> {
    let overlap = s1.inner(s2)?;
    let (n1, n2) = (s1.norm_sqr(), s2.norm_sqr());
    let raw = (n1 + n2 - 2.0 * overlap.re).max(0.0).sqrt();
    let phase_optimized = (n1 + n2 - 2.0 * overlap.norm()).max(0.0).sqrt();
    Ok(L2Error { raw, phase_optimized })
}
