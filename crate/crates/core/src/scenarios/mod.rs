//! Built-in problem definitions: each scenario wires a confining potential,
//! base geometry, squeeze and scaling conventions, and default initial data
//! into one immutable value that the pipelines consume.

pub mod study;

use std::collections::BTreeMap;

use crate::classical::FnPotential;
use crate::error::{Error, Result};
use crate::geometry::{validate_constraint, ConstraintReport, ConstraintSample, PlaneCurve};
use crate::transverse::{cut_function, RellichModel};

pub use study::{alpha_marginal_study, convergence_study, residual_sweep, StudyOutput};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalingMode {
    /// transverse variable dilated by epsilon = a hbar^alpha; the dilated
    /// operator is hbar-free
    NormalDilation,
    /// confinement written as a diverging coupling constant in the original
    /// variable
    CouplingConstant,
}

#[derive(Clone, Debug)]
pub enum Geometry {
    Flat,
    Curve { curve: PlaneCurve, half_width: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Standard,
    Sextic,
    Circle,
    MagneticTrap,
    Rellich,
    AlphaSweep,
}

/// A fully wired problem definition. Immutable; building is pure.
pub struct Scenario {
    pub id: &'static str,
    kind: Kind,
    pub params: BTreeMap<String, f64>,
    pub scaling: ScalingMode,
    pub tags: Vec<&'static str>,
    pub geometry: Geometry,
}

/// Catalogue entry: knob names with defaults and one-line docs.
pub struct ScenarioInfo {
    pub id: &'static str,
    pub summary: &'static str,
    pub knobs: Vec<(&'static str, f64, &'static str)>,
}

fn knobs_for(kind: Kind) -> Vec<(&'static str, f64, &'static str)> {
    match kind {
        Kind::Standard => vec![
            ("a", 1.0, "transverse squeeze"),
            ("x0", 1.0, "initial base position"),
            ("eta0", 0.0, "initial base momentum"),
            ("horizon", 1.0, "evolution time T"),
            ("n", 0.0, "transverse mode"),
        ],
        Kind::AlphaSweep => {
            let mut k = knobs_for(Kind::Standard);
            k.push(("alpha", 1.0, "hbar exponent of the dilation, in (0, 1]"));
            k
        }
        Kind::Sextic => vec![
            ("mu", 2.0, "quadratic shape parameter of the sextic channel"),
            ("nu", 1.0, "quartic-sextic shape parameter"),
            ("x0", 0.0, "initial base position"),
            ("eta0", 0.3, "initial base momentum"),
            ("horizon", 1.0, "evolution time T"),
            ("n", 0.0, "transverse mode"),
        ],
        Kind::Circle => vec![
            ("radius", 20.0, "circle radius"),
            ("omega", 1.0, "constant transverse frequency"),
            ("a", 1.0, "transverse squeeze"),
            ("s0", 0.0, "initial arc-length position"),
            ("eta0", 0.4, "initial tangential momentum"),
            ("horizon", 1.0, "evolution time T"),
            ("n", 0.0, "transverse mode"),
            ("half_width", 5.0, "tubular chart half-width"),
        ],
        Kind::MagneticTrap => vec![
            ("r0", 1.0, "field zero radius at z = 0"),
            ("kappa", 0.5, "axial curvature of the field zero"),
            ("a", 1.0, "transverse squeeze"),
            ("s0", 0.0, "initial arc-length position"),
            ("eta0", 0.3, "initial tangential momentum"),
            ("horizon", 1.0, "evolution time T"),
            ("n", 0.0, "transverse mode"),
            ("half_width", 0.45, "tubular chart half-width"),
            ("z_extent", 1.0, "axial parameter range of the trap curve"),
        ],
        Kind::Rellich => vec![
            ("a", 1.0, "transverse squeeze"),
            ("ring_radius", 0.3, "radius of the validation loop in the base"),
        ],
    }
}

pub fn list_scenarios() -> Vec<ScenarioInfo> {
    vec![
        ScenarioInfo {
            id: "standard",
            summary: "flat base, harmonic channel with frequency sqrt(1 + x^2)",
            knobs: knobs_for(Kind::Standard),
        },
        ScenarioInfo {
            id: "sextic",
            summary: "flat base, quasi-exactly-solvable sextic channel, hbar-free dilated operator",
            knobs: knobs_for(Kind::Sextic),
        },
        ScenarioInfo {
            id: "circle",
            summary: "circular base curve with a constant-frequency harmonic channel",
            knobs: knobs_for(Kind::Circle),
        },
        ScenarioInfo {
            id: "magnetic-trap",
            summary: "confinement to the zero curve of an axisymmetric field, W = A^2/2",
            knobs: knobs_for(Kind::MagneticTrap),
        },
        ScenarioInfo {
            id: "rellich",
            summary: "two-dimensional base with an eigenvalue-crossing channel (not spectrally smooth)",
            knobs: knobs_for(Kind::Rellich),
        },
        ScenarioInfo {
            id: "alpha-sweep",
            summary: "the standard scenario with an adjustable dilation exponent alpha",
            knobs: knobs_for(Kind::AlphaSweep),
        },
    ]
}

pub fn build_scenario(id: &str, overrides: &[(&str, f64)]) -> Result<Scenario> {
    let kind = match id {
        "standard" => Kind::Standard,
        "sextic" => Kind::Sextic,
        "circle" => Kind::Circle,
        "magnetic-trap" => Kind::MagneticTrap,
        "rellich" => Kind::Rellich,
        "alpha-sweep" => Kind::AlphaSweep,
        _ => return Err(Error::UnknownScenario(id.to_string())),
    };
    let mut params: BTreeMap<String, f64> =
        knobs_for(kind).into_iter().map(|(k, v, _)| (k.to_string(), v)).collect();
    for (key, value) in overrides {
        if !params.contains_key(*key) {
            return Err(Error::Config(format!("scenario {id} has no knob named {key}")));
        }
        params.insert((*key).to_string(), *value);
    }
    let get = |k: &str| params[k];
    // invariant checks on the resolved knobs
    match kind {
        Kind::Standard => {}
        Kind::AlphaSweep => {
            let alpha = get("alpha");
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::Config(format!("alpha must lie in (0, 1], got {alpha}")));
            }
        }
        Kind::Sextic => {
            let (mu, nu) = (get("mu"), get("nu"));
            if !(nu > 0.0 && mu * mu > 3.0 * nu) {
                return Err(Error::Config(format!(
                    "sextic channel needs nu > 0 and mu^2 > 3 nu for a confining well, got mu={mu}, nu={nu}"
                )));
            }
        }
        Kind::Circle => {
            let (r, w, h) = (get("radius"), get("omega"), get("half_width"));
            if !(r > 0.0 && w > 0.0) {
                return Err(Error::Config("circle radius and frequency must be positive".into()));
            }
            if !(h > 0.0 && h < r) {
                return Err(Error::Config(format!(
                    "chart half-width {h} must lie in (0, radius = {r})"
                )));
            }
        }
        Kind::MagneticTrap => {
            if !(get("r0") > 0.0) || get("kappa") < 0.0 {
                return Err(Error::Config("trap needs r0 > 0 and kappa >= 0".into()));
            }
        }
        Kind::Rellich => {
            let rr = get("ring_radius");
            if !(rr > 0.0 && rr < 0.5) {
                return Err(Error::Config(format!(
                    "validation ring radius {rr} must lie in (0, 1/2)"
                )));
            }
        }
    }
    if matches!(kind, Kind::Standard | Kind::AlphaSweep | Kind::Circle | Kind::MagneticTrap)
        && !(get("a") > 0.0)
    {
        return Err(Error::Config("squeeze a must be positive".into()));
    }
    let geometry = match kind {
        Kind::Standard | Kind::Sextic | Kind::AlphaSweep | Kind::Rellich => Geometry::Flat,
        Kind::Circle => Geometry::Curve {
            curve: PlaneCurve::circle(get("radius"), [0.0, 0.0]),
            half_width: get("half_width"),
        },
        Kind::MagneticTrap => {
            let (r0, kappa, z) = (get("r0"), get("kappa"), get("z_extent"));
            let curve = PlaneCurve::from_param_with_deriv(
                move |t| [r0 - kappa * t * t, t],
                move |t| [-2.0 * kappa * t, 1.0],
                (-z, z),
                false,
                128,
            )?;
            Geometry::Curve { curve, half_width: get("half_width") }
        }
    };
    let scaling = match kind {
        Kind::Sextic => ScalingMode::NormalDilation,
        _ => ScalingMode::CouplingConstant,
    };
    let tags = match kind {
        Kind::Sextic => vec!["normal-dilation", "quasi-exactly-solvable"],
        Kind::MagneticTrap => vec!["strongly-axially-symmetric"],
        Kind::Rellich => vec!["non-spectrally-smooth"],
        _ => vec![],
    };
    let id_static = match kind {
        Kind::Standard => "standard",
        Kind::Sextic => "sextic",
        Kind::Circle => "circle",
        Kind::MagneticTrap => "magnetic-trap",
        Kind::Rellich => "rellich",
        Kind::AlphaSweep => "alpha-sweep",
    };
    Ok(Scenario { id: id_static, kind, params, scaling, tags, geometry })
}

impl Scenario {
    fn get(&self, k: &str) -> f64 {
        self.params[k]
    }

    pub fn squeeze(&self) -> f64 {
        if self.kind == Kind::Sextic {
            1.0
        } else {
            self.get("a")
        }
    }

    pub fn alpha(&self) -> f64 {
        self.params.get("alpha").copied().unwrap_or(1.0)
    }

    pub fn mode_n(&self) -> usize {
        self.params.get("n").copied().unwrap_or(0.0) as usize
    }

    pub fn horizon(&self) -> f64 {
        self.params.get("horizon").copied().unwrap_or(1.0)
    }

    /// Initial (position, momentum) on the base, in the base coordinate
    /// (x for flat scenarios, arc length for curves).
    pub fn initial(&self) -> (f64, f64) {
        match self.kind {
            Kind::Standard | Kind::AlphaSweep | Kind::Sextic => (self.get("x0"), self.get("eta0")),
            Kind::Circle | Kind::MagneticTrap => (self.get("s0"), self.get("eta0")),
            Kind::Rellich => (0.0, 0.0),
        }
    }

    /// epsilon(hbar) = a hbar^alpha, the physical transverse length scale
    /// divided by the dilated oscillator width.
    pub fn epsilon(&self, hbar: f64) -> f64 {
        self.squeeze() * hbar.powf(self.alpha())
    }

    /// The dilation mapping the transverse profile (written in the variable
    /// where the squeeze-a oscillator lives) to physical normal lengths:
    /// psi(y) = Phi(y / d) / sqrt(d) has the channel's ground width.
    pub fn dilation(&self, hbar: f64) -> f64 {
        hbar.powf(0.5 * (1.0 + self.alpha()))
    }

    /// Transverse frequency along the base.
    pub fn omega(&self, s: f64) -> Result<f64> {
        match self.kind {
            Kind::Standard | Kind::AlphaSweep => Ok((1.0 + s * s).sqrt()),
            Kind::Sextic => {
                let (mu, nu) = (self.get("mu"), self.get("nu"));
                Ok((mu * mu - 3.0 * nu).sqrt())
            }
            Kind::Circle => Ok(self.get("omega")),
            Kind::MagneticTrap => {
                let kappa = self.get("kappa");
                let z = self.trap_z(s)?;
                Ok((1.0 + 4.0 * kappa * kappa * z * z).sqrt())
            }
            Kind::Rellich => Err(Error::Unsupported(
                "the crossing scenario has no single smooth transverse frequency".into(),
            )),
        }
    }

    /// d omega / ds, analytic except for the trap's arc-length chain rule.
    pub fn omega_d1(&self, s: f64) -> Result<f64> {
        match self.kind {
            Kind::Standard | Kind::AlphaSweep => Ok(s / (1.0 + s * s).sqrt()),
            Kind::Sextic | Kind::Circle => Ok(0.0),
            Kind::MagneticTrap => {
                let kappa = self.get("kappa");
                let z = self.trap_z(s)?;
                let dz = self.trap_dz(s)?;
                Ok(4.0 * kappa * kappa * z * dz / self.omega(s)?)
            }
            Kind::Rellich => Err(Error::Unsupported(
                "the crossing scenario has no single smooth transverse frequency".into(),
            )),
        }
    }

    pub fn omega_d2(&self, s: f64) -> Result<f64> {
        match self.kind {
            Kind::Standard | Kind::AlphaSweep => Ok((1.0 + s * s).powf(-1.5)),
            Kind::Sextic | Kind::Circle => Ok(0.0),
            Kind::MagneticTrap => {
                // chain rule through the arc-length table; centered difference
                // of the analytic first derivative
                let h = 1e-5;
                Ok((self.omega_d1(s + h)? - self.omega_d1(s - h)?) / (2.0 * h))
            }
            Kind::Rellich => Err(Error::Unsupported(
                "the crossing scenario has no single smooth transverse frequency".into(),
            )),
        }
    }

    fn trap_curve(&self) -> &PlaneCurve {
        match &self.geometry {
            Geometry::Curve { curve, .. } => curve,
            Geometry::Flat => unreachable!("trap geometry is a curve"),
        }
    }

    fn trap_z(&self, s: f64) -> Result<f64> {
        Ok(self.trap_curve().point(s)?[1])
    }

    fn trap_dz(&self, s: f64) -> Result<f64> {
        Ok(self.trap_curve().tangent(s)?[1])
    }

    /// Longitudinal potential on the base (zero for every built-in).
    pub fn longitudinal_potential(&self, _s: f64) -> f64 {
        0.0
    }

    /// E_n(s): transverse band energy plus the longitudinal potential. The
    /// band scales as hbar^{1 - alpha}, so it is hbar-free exactly at
    /// alpha = 1.
    pub fn band_energy(&self, s: f64, hbar: f64) -> Result<f64> {
        let factor = hbar.powf(1.0 - self.alpha());
        Ok((self.mode_n() as f64 + 0.5) * self.omega(s)? * factor / self.squeeze()
            + self.longitudinal_potential(s))
    }

    /// The effective base potential E_n as a classical `Potential` with
    /// analytic first and second derivatives.
    pub fn effective_potential(&self, hbar: f64) -> Result<FnPotential> {
        if self.kind == Kind::Rellich {
            return Err(Error::Unsupported(
                "the crossing scenario has no smooth effective band".into(),
            ));
        }
        let pieces = (self.clone_light(), hbar);
        let factor = (self.mode_n() as f64 + 0.5) * hbar.powf(1.0 - self.alpha()) / self.squeeze();
        let (sc1, sc2, sc3) = (pieces.0, pieces.0, pieces.0);
        let pot = FnPotential::new(1, move |x: &[f64]| {
            factor * sc1.omega_of(x[0]) + sc1.v_of(x[0])
        })
        .with_gradient(move |x: &[f64]| vec![factor * sc2.omega_d1_of(x[0])])
        .with_hessian(move |x: &[f64]| {
            nalgebra::DMatrix::from_element(1, 1, factor * sc3.omega_d2_of(x[0]))
        });
        Ok(pot)
    }

    /// Full 2D potential for the Cartesian reference solver: longitudinal
    /// part plus the confinement at scale epsilon(hbar). The trap keeps the
    /// axisymmetric reduction's centrifugal term here; the semiclassical side
    /// omits it (that asymmetry is part of what the convergence study tests).
    pub fn grid_potential(&self, hbar: f64) -> Result<Box<dyn Fn(f64, f64) -> f64 + Sync + Send>> {
        let eps = self.epsilon(hbar);
        match self.kind {
            Kind::Standard | Kind::AlphaSweep => {
                let inv = 1.0 / (2.0 * eps * eps);
                Ok(Box::new(move |x, y| (1.0 + x * x) * y * y * inv))
            }
            Kind::Sextic => {
                let (mu, nu) = (self.get("mu"), self.get("nu"));
                Ok(Box::new(move |_x, y| {
                    let z = y / eps;
                    let z2 = z * z;
                    0.5 * nu * nu * z2 * z2 * z2
                        + mu * nu * z2 * z2
                        + 0.5 * (mu * mu - 3.0 * nu) * z2
                }))
            }
            Kind::Circle => {
                let (r, w) = (self.get("radius"), self.get("omega"));
                let inv = w * w / (2.0 * eps * eps);
                Ok(Box::new(move |x, y| {
                    let d = x.hypot(y) - r;
                    d * d * inv
                }))
            }
            Kind::MagneticTrap => {
                let (r0, kappa) = (self.get("r0"), self.get("kappa"));
                let inv = 1.0 / (2.0 * eps * eps);
                let h2 = hbar * hbar;
                Ok(Box::new(move |r, z| {
                    let a = (r - r0) + kappa * z * z;
                    a * a * inv - h2 / (8.0 * r * r)
                }))
            }
            Kind::Rellich => Err(Error::Unsupported(
                "the crossing scenario's reference problem is four-dimensional".into(),
            )),
        }
    }

    /// The confining potential in ambient coordinates at unit scale, for the
    /// constraint validator. Flat scenarios take (x, y); the trap takes
    /// (r, z) plus one normal coordinate appended; the crossing scenario
    /// takes (x1, x2, y1, y2).
    pub fn ambient_confinement(&self) -> Box<dyn Fn(&[f64]) -> f64 + Sync + Send> {
        match self.kind {
            Kind::Standard | Kind::AlphaSweep => {
                Box::new(move |p: &[f64]| 0.5 * (1.0 + p[0] * p[0]) * p[1] * p[1])
            }
            Kind::Sextic => {
                let (mu, nu) = (self.get("mu"), self.get("nu"));
                Box::new(move |p: &[f64]| {
                    let z2 = p[1] * p[1];
                    0.5 * nu * nu * z2 * z2 * z2
                        + mu * nu * z2 * z2
                        + 0.5 * (mu * mu - 3.0 * nu) * z2
                })
            }
            Kind::Circle => {
                let (r, w) = (self.get("radius"), self.get("omega"));
                Box::new(move |p: &[f64]| {
                    let d = p[0].hypot(p[1]) - r;
                    0.5 * w * w * d * d
                })
            }
            Kind::MagneticTrap => {
                let (r0, kappa) = (self.get("r0"), self.get("kappa"));
                Box::new(move |p: &[f64]| {
                    let a = (p[0] - r0) + kappa * p[1] * p[1];
                    0.5 * a * a
                })
            }
            Kind::Rellich => {
                let model = RellichModel { a: self.squeeze() };
                Box::new(move |p: &[f64]| {
                    let r = p[0].hypot(p[1]);
                    cut_function(r) * model.transverse_potential([p[0], p[1]], [p[2], p[3]])
                })
            }
        }
    }

    /// Sample chain on the constraint set with orthonormal normal frames.
    pub fn constraint_samples(&self) -> Vec<ConstraintSample> {
        match self.kind {
            Kind::Standard | Kind::Sextic | Kind::AlphaSweep => (0..21)
                .map(|i| ConstraintSample {
                    point: vec![-1.5 + 3.0 * i as f64 / 20.0, 0.0],
                    normals: vec![vec![0.0, 1.0]],
                })
                .collect(),
            Kind::Circle => {
                let r = self.get("radius");
                (0..=48)
                    .map(|i| {
                        let th = 2.0 * std::f64::consts::PI * i as f64 / 48.0;
                        ConstraintSample {
                            point: vec![r * th.cos(), r * th.sin()],
                            normals: vec![vec![th.cos(), th.sin()]],
                        }
                    })
                    .collect()
            }
            Kind::MagneticTrap => {
                let (r0, kappa, ze) = (self.get("r0"), self.get("kappa"), self.get("z_extent"));
                (0..41)
                    .map(|i| {
                        let z = -ze + 2.0 * ze * i as f64 / 40.0;
                        let g = (1.0 + 4.0 * kappa * kappa * z * z).sqrt();
                        ConstraintSample {
                            point: vec![r0 - kappa * z * z, z],
                            normals: vec![vec![1.0 / g, 2.0 * kappa * z / g]],
                        }
                    })
                    .collect()
            }
            Kind::Rellich => {
                let rr = self.get("ring_radius");
                (0..=48)
                    .map(|i| {
                        let th =
                            -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / 48.0;
                        ConstraintSample {
                            point: vec![rr * th.cos(), rr * th.sin(), 0.0, 0.0],
                            normals: vec![vec![0.0, 0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0, 1.0]],
                        }
                    })
                    .collect()
            }
        }
    }

    pub fn validate(&self) -> ConstraintReport {
        let w = self.ambient_confinement();
        validate_constraint(&*w, &self.constraint_samples())
    }

    /// Suggested reference grid and time step for one hbar, following the
    /// resolution rules dx_long <= sqrt(hbar)/16, dx_trans <= sigma/8,
    /// dt = 0.02 hbar.
    pub fn grid_hints(&self, hbar: f64) -> Result<GridHints> {
        let dt = 0.02 * hbar;
        let d = self.dilation(hbar);
        let a = self.squeeze();
        let dl_max = hbar.sqrt() / 16.0;
        match self.kind {
            Kind::Standard | Kind::AlphaSweep | Kind::Sextic => {
                let (x_lo, x_hi): (f64, f64) = (-2.0, 4.0);
                let omega_min: f64 = match self.kind {
                    Kind::Sextic => self.omega(0.0)?,
                    _ => 1.0,
                };
                let omega_max: f64 = match self.kind {
                    Kind::Sextic => self.omega(0.0)?,
                    _ => (1.0 + x_lo.max(x_hi).powi(2)).sqrt(),
                };
                let sigma_max = d * (a / (2.0 * omega_min)).sqrt();
                let sigma_min = d * (a / (2.0 * omega_max)).sqrt();
                let y_half = 14.0 * sigma_max;
                let nx = pow2_at_least((x_hi - x_lo) / dl_max);
                let ny = pow2_at_least(2.0 * y_half / (sigma_min / 8.0));
                Ok(GridHints {
                    x_range: (x_lo, x_hi),
                    y_range: (-y_half, y_half),
                    nx,
                    ny,
                    dt,
                })
            }
            Kind::Circle => {
                let r = self.get("radius");
                let sigma = d * (a / (2.0 * self.get("omega"))).sqrt();
                // tangential extent: trajectory sweep plus packet margins
                let sweep = self.get("eta0").abs() * self.horizon();
                let margin = 1.6 + 6.0 * hbar.sqrt();
                let (y_lo, y_hi) = (-margin, sweep + margin);
                let sagitta = y_lo.abs().max(y_hi).powi(2) / (2.0 * r);
                let u_max = 16.0 * sigma;
                let (x_lo, x_hi) = (r - sagitta - u_max - 0.05, r + u_max + 0.05);
                let nx = pow2_at_least((x_hi - x_lo) / (sigma / 8.0));
                let ny = pow2_at_least((y_hi - y_lo) / dl_max);
                Ok(GridHints { x_range: (x_lo, x_hi), y_range: (y_lo, y_hi), nx, ny, dt })
            }
            Kind::MagneticTrap => {
                let (r0, kappa) = (self.get("r0"), self.get("kappa"));
                let sigma_max = d * (a / 2.0).sqrt();
                let z_half = 0.8;
                let r_curve_min = r0 - kappa * z_half * z_half;
                let u_max = 12.0 * sigma_max;
                let x_lo = (r_curve_min - u_max - 0.05).max(0.02);
                let x_hi = r0 + u_max + 0.05;
                let omega_max = (1.0 + 4.0 * kappa * kappa * z_half * z_half).sqrt();
                let sigma_min = d * (a / (2.0 * omega_max)).sqrt();
                let nx = pow2_at_least((x_hi - x_lo) / (sigma_min / 8.0));
                let ny = pow2_at_least(2.0 * z_half / dl_max);
                Ok(GridHints { x_range: (x_lo, x_hi), y_range: (-z_half, z_half), nx, ny, dt })
            }
            Kind::Rellich => Err(Error::Unsupported(
                "the crossing scenario's reference problem is four-dimensional".into(),
            )),
        }
    }

    // cheap copyable views used inside potential closures
    fn clone_light(&self) -> LightScenario {
        LightScenario { kind: self.kind, mu: *self.params.get("mu").unwrap_or(&0.0), nu: *self
            .params
            .get("nu")
            .unwrap_or(&0.0), omega: *self.params.get("omega").unwrap_or(&0.0) }
    }
}

/// Suggested reference grid for one hbar.
#[derive(Debug, Clone, Copy)]
pub struct GridHints {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub dt: f64,
}

fn pow2_at_least(n: f64) -> usize {
    let mut p = 64usize;
    while (p as f64) < n {
        p *= 2;
    }
    p
}

/// The scalar pieces of a scenario that potential closures capture; the trap
/// and crossing scenarios never reach these paths.
#[derive(Clone, Copy)]
struct LightScenario {
    kind: Kind,
    mu: f64,
    nu: f64,
    omega: f64,
}

impl LightScenario {
    fn omega_of(&self, s: f64) -> f64 {
        match self.kind {
            Kind::Standard | Kind::AlphaSweep => (1.0 + s * s).sqrt(),
            Kind::Sextic => (self.mu * self.mu - 3.0 * self.nu).sqrt(),
            Kind::Circle => self.omega,
            _ => unreachable!("no closure-form frequency for this scenario"),
        }
    }

    fn omega_d1_of(&self, s: f64) -> f64 {
        match self.kind {
            Kind::Standard | Kind::AlphaSweep => s / (1.0 + s * s).sqrt(),
            Kind::Sextic | Kind::Circle => 0.0,
            _ => unreachable!(),
        }
    }

    fn omega_d2_of(&self, s: f64) -> f64 {
        match self.kind {
            Kind::Standard | Kind::AlphaSweep => (1.0 + s * s).powf(-1.5),
            Kind::Sextic | Kind::Circle => 0.0,
            _ => unreachable!(),
        }
    }

    fn v_of(&self, _s: f64) -> f64 {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::Potential;
    use approx::assert_abs_diff_eq;

    #[test]
    fn catalogue_has_six_entries_and_all_build() {
        let cat = list_scenarios();
        assert_eq!(cat.len(), 6);
        for info in &cat {
            let sc = build_scenario(info.id, &[]).unwrap();
            assert_eq!(sc.id, info.id);
        }
        assert!(matches!(build_scenario("unknown", &[]), Err(Error::UnknownScenario(_))));
    }

    #[test]
    fn overrides_apply_and_bad_ones_are_rejected() {
        let sc = build_scenario("standard", &[("a", 2.0), ("horizon", 0.5)]).unwrap();
        assert_abs_diff_eq!(sc.squeeze(), 2.0);
        assert_abs_diff_eq!(sc.horizon(), 0.5);
        assert!(build_scenario("standard", &[("radius", 3.0)]).is_err());
        assert!(build_scenario("standard", &[("a", -1.0)]).is_err());
        assert!(build_scenario("alpha-sweep", &[("alpha", 1.5)]).is_err());
        assert!(build_scenario("sextic", &[("mu", 1.0)]).is_err());
        assert!(build_scenario("rellich", &[("ring_radius", 0.7)]).is_err());
    }

    #[test]
    fn every_scenario_validates_except_the_crossing_one() {
        for info in list_scenarios() {
            let sc = build_scenario(info.id, &[]).unwrap();
            let report = sc.validate();
            if info.id == "rellich" {
                assert!(report.zero_set_ok && report.gradient_ok && report.nondegenerate_ok);
                assert!(!report.spectrally_smooth);
                assert!(sc.tags.contains(&"non-spectrally-smooth"));
            } else {
                assert!(report.all_ok(), "{} failed: {report:?}", info.id);
            }
        }
    }

    #[test]
    fn alpha_sweep_at_one_matches_standard() {
        let std_sc = build_scenario("standard", &[]).unwrap();
        let alp = build_scenario("alpha-sweep", &[("alpha", 1.0)]).unwrap();
        let hbar = 0.05;
        for i in 0..20 {
            let x = -1.5 + 3.0 * i as f64 / 19.0;
            assert_abs_diff_eq!(
                std_sc.band_energy(x, hbar).unwrap(),
                alp.band_energy(x, hbar).unwrap(),
                epsilon = 1e-15
            );
        }
        let ps = std_sc.grid_potential(hbar).unwrap();
        let pa = alp.grid_potential(hbar).unwrap();
        assert_abs_diff_eq!(ps(0.7, 0.02), pa(0.7, 0.02), epsilon = 1e-12);
        assert_abs_diff_eq!(std_sc.dilation(hbar), hbar, epsilon = 1e-15);
    }

    #[test]
    fn effective_potential_derivatives_are_consistent() {
        for id in ["standard", "circle", "sextic"] {
            let sc = build_scenario(id, &[]).unwrap();
            let pot = sc.effective_potential(0.05).unwrap();
            let h = 1e-5;
            for i in 0..7 {
                let x = -1.2 + 0.4 * i as f64;
                let fd = (pot.value(&[x + h]) - pot.value(&[x - h])) / (2.0 * h);
                assert_abs_diff_eq!(pot.gradient(&[x])[0], fd, epsilon = 1e-8);
                let fd2 = (pot.gradient(&[x + h])[0] - pot.gradient(&[x - h])[0]) / (2.0 * h);
                assert_abs_diff_eq!(pot.hessian(&[x])[(0, 0)], fd2, epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn trap_frequency_equals_the_field_gradient_on_the_curve() {
        let sc = build_scenario("magnetic-trap", &[]).unwrap();
        let kappa = 0.5;
        let curve = match &sc.geometry {
            Geometry::Curve { curve, .. } => curve.clone(),
            _ => unreachable!(),
        };
        let l = curve.total_length();
        for i in 0..100 {
            let s = l * (i as f64 + 0.5) / 100.0;
            let p = curve.point(s).unwrap();
            let grad = (1.0f64 + 4.0 * kappa * kappa * p[1] * p[1]).sqrt();
            assert_abs_diff_eq!(sc.omega(s).unwrap(), grad, epsilon = 1e-8);
        }
        // arc-length derivative agrees with finite differences of omega
        let s = 0.37 * l;
        let h = 1e-5;
        let fd = (sc.omega(s + h).unwrap() - sc.omega(s - h).unwrap()) / (2.0 * h);
        assert_abs_diff_eq!(sc.omega_d1(s).unwrap(), fd, epsilon = 1e-7);
    }

    #[test]
    fn band_energy_is_constant_on_the_circle() {
        let sc = build_scenario("circle", &[]).unwrap();
        let e0 = sc.band_energy(0.0, 0.02).unwrap();
        for i in 1..30 {
            assert_abs_diff_eq!(sc.band_energy(i as f64, 0.02).unwrap(), e0, epsilon = 1e-14);
        }
    }

    #[test]
    fn sextic_channel_ground_energy_is_exact() {
        // dilated transverse operator -(1/2) d^2/dz^2 + W(z) has ground state
        // exp(-nu z^4/4 - mu z^2/2) with energy mu/2
        let sc = build_scenario("sextic", &[]).unwrap();
        let (mu, nu) = (sc.params["mu"], sc.params["nu"]);
        let w = sc.ambient_confinement();
        let pot = move |z: f64| w(&[0.0, z]);
        let levels = crate::transverse::fd_eigensolve_1d_auto(&pot, 1, 5.0, 0.002).unwrap();
        assert_abs_diff_eq!(levels[0].energy, mu / 2.0, epsilon = 1e-5);
        let _ = nu;
    }

    #[test]
    fn grid_hints_respect_the_resolution_rules() {
        let sc = build_scenario("standard", &[]).unwrap();
        for &hbar in &[0.08, 0.04, 0.02, 0.01] {
            let h = sc.grid_hints(hbar).unwrap();
            let dx = (h.x_range.1 - h.x_range.0) / h.nx as f64;
            assert!(dx <= hbar.sqrt() / 16.0 + 1e-12);
            let sigma_min = hbar * (1.0 / (2.0 * 17.0f64.sqrt())).sqrt();
            let dy = (h.y_range.1 - h.y_range.0) / h.ny as f64;
            assert!(dy <= sigma_min / 8.0 + 1e-12);
            assert_abs_diff_eq!(h.dt, 0.02 * hbar, epsilon = 1e-15);
        }
    }
}
