//! Shooting eigensolver for the reduced radial equation `−u″ + V(r) u = E u`.
//!
//! The state `(u, u′)` is integrated outward on a uniform grid with a
//! fixed-step Runge-Kutta scheme, starting from the regular behaviour
//! `u ~ r^(l+1)`. Eigenvalues are bracketed by node count and refined by
//! bisection on the sign of `u(r_max)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::susy::{HierarchyMember, PotentialParams};

pub const DEFAULT_R_MIN: f64 = 1e-6;
pub const DEFAULT_STEPS: usize = 40_000;
pub const MIN_STEPS: usize = 1_000;
pub const R_MAX_FLOOR: f64 = 8.0;
/// Energy margin by which the quadratic wall must exceed the target at `r_max`.
pub const WALL_MARGIN: f64 = 25.0;
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default bracket ceiling above the potential minimum, in units of `√b`.
pub const CEILING_SPAN: f64 = 200.0;

const RESCALE_THRESHOLD: f64 = 1e100;

/// A radial potential with a confining `b r²` term.
pub trait RadialPotential: Sync {
    /// `V(r)` at `r > 0`, including any constant offset.
    fn value(&self, r: f64) -> f64;
    /// Coefficient `b` of the confining `r²` term.
    fn confinement(&self) -> f64;
    /// Angular parameter `l` of the `l(l+1)/r²` term.
    fn angular(&self) -> f64;
    /// A lower bound on the spectrum, when one is known in closed form.
    /// Needed where the grid minimum of `V` is dominated by an attractive
    /// singularity at `r_min`.
    fn spectral_floor(&self) -> Option<f64> {
        None
    }
}

/// `H ≥ (−d² + l(l+1)/r² + c/r) + min(a r + b r²)`, and the first operator is
/// bounded below by its hydrogen-like ground energy `−c²/(4(l+1)²)`.
fn mixed_floor(p: &PotentialParams) -> f64 {
    let coulomb = if p.c < 0.0 {
        -p.c * p.c / (4.0 * (p.l + 1.0).powi(2))
    } else {
        0.0
    };
    let wall = if p.a < 0.0 {
        -p.a * p.a / (4.0 * p.b)
    } else {
        0.0
    };
    coulomb + wall + p.offset
}

impl RadialPotential for PotentialParams {
    fn value(&self, r: f64) -> f64 {
        PotentialParams::value(self, r)
    }

    fn confinement(&self) -> f64 {
        self.b
    }

    fn angular(&self) -> f64 {
        self.l
    }

    fn spectral_floor(&self) -> Option<f64> {
        Some(mixed_floor(self))
    }
}

impl RadialPotential for HierarchyMember {
    fn value(&self, r: f64) -> f64 {
        self.params.value(r)
    }

    fn confinement(&self) -> f64 {
        self.params.b
    }

    fn angular(&self) -> f64 {
        self.params.l
    }

    fn spectral_floor(&self) -> Option<f64> {
        Some(mixed_floor(&self.params))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub n_steps: usize,
    pub step: f64,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, n_steps: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_min.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "r_min must be positive (got {r_min})"
            )));
        }
        if !(r_max > r_min && r_max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "r_max must exceed r_min (got {r_max} <= {r_min})"
            )));
        }
        if n_steps < MIN_STEPS {
            return Err(Error::InvalidGrid(format!(
                "n_steps below minimum ({n_steps} < {MIN_STEPS})"
            )));
        }
        Ok(Self {
            r_min,
            r_max,
            n_steps,
            step: (r_max - r_min) / n_steps as f64,
        })
    }

    #[inline]
    pub fn r(&self, i: usize) -> f64 {
        self.r_min + i as f64 * self.step
    }

    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GridOverrides {
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub n_steps: Option<usize>,
}

/// Default grid for levels up to `target_energy`: `r_max` puts the wall
/// `b r_max²` at least [`WALL_MARGIN`] above the target, never below
/// [`R_MAX_FLOOR`].
pub fn build_grid<P: RadialPotential + ?Sized>(
    potential: &P,
    target_energy: f64,
    overrides: &GridOverrides,
) -> Result<RadialGrid> {
    let b = potential.confinement();
    if !(b > 0.0) {
        return Err(Error::NonPositiveB(b));
    }
    let r_max = overrides.r_max.unwrap_or_else(|| {
        let wall = ((target_energy + WALL_MARGIN).max(0.0) / b).sqrt();
        wall.max(R_MAX_FLOOR)
    });
    RadialGrid::new(
        overrides.r_min.unwrap_or(DEFAULT_R_MIN),
        r_max,
        overrides.n_steps.unwrap_or(DEFAULT_STEPS),
    )
}

/// Fixed-step scheme used for the outward integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Integrator {
    /// Classical fourth-order Runge-Kutta.
    #[default]
    Rk4,
    /// Runge-Kutta-Gill variant.
    Gill,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Absolute width of the final energy bracket.
    pub tol: f64,
    /// Highest energy scanned while bracketing; defaults to `min V + 200√b`.
    pub ceiling: Option<f64>,
    pub integrator: Integrator,
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "tolerance must be positive (got {})",
                self.tol
            )));
        }
        Ok(())
    }
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            ceiling: None,
            integrator: Integrator::Rk4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootResult {
    /// `u(r_max)` after rescaling; the true amplitude is this times `exp(terminal_log_scale)`.
    pub terminal_value: f64,
    pub terminal_log_scale: f64,
    /// Sign changes of `u` over interior grid nodes.
    pub nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub n: usize,
    pub energy: f64,
    /// Final bisection bracket; `energy` lies strictly inside it.
    pub bracket: (f64, f64),
    pub nodes: usize,
    /// `(r, u(r))` normalized to `∫u² dr = 1`.
    pub samples: Vec<(f64, f64)>,
    pub residual: f64,
}

/// Counts sign changes; an exact zero counts as one crossing.
#[derive(Debug, Default)]
struct NodeCounter {
    last: Option<bool>,
    count: usize,
}

impl NodeCounter {
    fn push(&mut self, u: f64) {
        if u == 0.0 {
            self.count += 1;
            self.last = None;
            return;
        }
        let positive = u > 0.0;
        if let Some(prev) = self.last {
            if prev != positive {
                self.count += 1;
            }
        }
        self.last = Some(positive);
    }
}

#[inline]
fn rk4_step(u: f64, du: f64, h: f64, q0: f64, q_mid: f64, q1: f64) -> (f64, f64) {
    let k1u = du;
    let k1v = q0 * u;
    let u2 = u + 0.5 * h * k1u;
    let k2u = du + 0.5 * h * k1v;
    let k2v = q_mid * u2;
    let u3 = u + 0.5 * h * k2u;
    let k3u = du + 0.5 * h * k2v;
    let k3v = q_mid * u3;
    let u4 = u + h * k3u;
    let k4u = du + h * k3v;
    let k4v = q1 * u4;
    (
        u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
        du + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
    )
}

#[inline]
fn gill_step(u: f64, du: f64, h: f64, q0: f64, q_mid: f64, q1: f64) -> (f64, f64) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let k1u = h * du;
    let k1v = h * q0 * u;
    let k2u = h * (du + 0.5 * k1v);
    let k2v = h * q_mid * (u + 0.5 * k1u);
    let (c1, c2) = (s - 0.5, 1.0 - s);
    let k3u = h * (du + c1 * k1v + c2 * k2v);
    let k3v = h * q_mid * (u + c1 * k1u + c2 * k2u);
    let (d1, d2) = (-s, 1.0 + s);
    let k4u = h * (du + d1 * k2v + d2 * k3v);
    let k4v = h * q1 * (u + d1 * k2u + d2 * k3u);
    let (w2, w3) = (2.0 - 2.0 * s, 2.0 + 2.0 * s);
    (
        u + (k1u + w2 * k2u + w3 * k3u + k4u) / 6.0,
        du + (k1v + w2 * k2v + w3 * k3v + k4v) / 6.0,
    )
}

fn shoot<P: RadialPotential + ?Sized>(
    potential: &P,
    energy: f64,
    grid: &RadialGrid,
    l_eff: f64,
    integrator: Integrator,
    mut samples: Option<&mut Vec<f64>>,
) -> Result<ShootResult> {
    let h = grid.step;
    let mut u = grid.r_min.powf(l_eff + 1.0);
    let mut du = (l_eff + 1.0) * grid.r_min.powf(l_eff);
    let mut log_scale = 0.0;
    let mut counter = NodeCounter::default();
    let mut q0 = potential.value(grid.r_min) - energy;
    if let Some(s) = samples.as_deref_mut() {
        s.clear();
        s.reserve(grid.len());
        s.push(u);
    }
    for i in 0..grid.n_steps {
        let r = grid.r(i);
        let q_mid = potential.value(r + 0.5 * h) - energy;
        let q1 = potential.value(grid.r(i + 1)) - energy;
        (u, du) = match integrator {
            Integrator::Rk4 => rk4_step(u, du, h, q0, q_mid, q1),
            Integrator::Gill => gill_step(u, du, h, q0, q_mid, q1),
        };
        q0 = q1;
        let size = u.abs().max(du.abs());
        if !size.is_finite() {
            return Err(Error::NonFinite { r: grid.r(i + 1) });
        }
        if size > RESCALE_THRESHOLD {
            let factor = 1.0 / size;
            u *= factor;
            du *= factor;
            log_scale += size.ln();
            if let Some(s) = samples.as_deref_mut() {
                s.iter_mut().for_each(|x| *x *= factor);
            }
        }
        if let Some(s) = samples.as_deref_mut() {
            s.push(u);
        }
        if i + 1 < grid.n_steps {
            counter.push(u);
        }
    }
    Ok(ShootResult {
        terminal_value: u,
        terminal_log_scale: log_scale,
        nodes: counter.count,
    })
}

/// Integrates outward at fixed `energy` with classical RK4.
pub fn integrate_shoot<P: RadialPotential + ?Sized>(
    potential: &P,
    energy: f64,
    grid: &RadialGrid,
    l_eff: f64,
) -> Result<ShootResult> {
    shoot(potential, energy, grid, l_eff, Integrator::Rk4, None)
}

pub fn integrate_shoot_with<P: RadialPotential + ?Sized>(
    potential: &P,
    energy: f64,
    grid: &RadialGrid,
    l_eff: f64,
    integrator: Integrator,
) -> Result<ShootResult> {
    shoot(potential, energy, grid, l_eff, integrator, None)
}

impl ShootResult {
    /// Whether the shooting energy lies above the eigenvalue with `n` nodes.
    fn is_above(&self, n: usize) -> bool {
        let expected_positive = n.is_multiple_of(2);
        self.nodes > n
            || (self.nodes == n
                && (self.terminal_value > 0.0) != expected_positive
                && self.terminal_value != 0.0)
    }
}

/// Minimum of `V` over the grid, raised to the closed-form spectral floor
/// when that is higher (both bound the ground energy from below).
fn potential_floor<P: RadialPotential + ?Sized>(potential: &P, grid: &RadialGrid) -> f64 {
    let grid_min = (0..grid.len())
        .map(|i| potential.value(grid.r(i)))
        .fold(f64::INFINITY, f64::min);
    potential
        .spectral_floor()
        .map_or(grid_min, |f| grid_min.max(f))
}

struct Search<'a, P: ?Sized> {
    potential: &'a P,
    grid: &'a RadialGrid,
    opts: &'a SolverOptions,
    l_eff: f64,
    scan_step: f64,
    ceiling: f64,
}

impl<P: RadialPotential + ?Sized> Search<'_, P> {
    fn above(&self, energy: f64, n: usize) -> Result<bool> {
        Ok(shoot(
            self.potential,
            energy,
            self.grid,
            self.l_eff,
            self.opts.integrator,
            None,
        )?
        .is_above(n))
    }

    /// Brackets level `n` by scanning up from `start`, which must lie below it.
    fn level(&self, n: usize, start: f64) -> Result<EigenResult> {
        let mut lo = start;
        if self.above(lo, n)? {
            return Err(Error::BracketFailed {
                n,
                ceiling: self.ceiling,
            });
        }
        let mut hi = lo + self.scan_step;
        loop {
            if hi > self.ceiling {
                return Err(Error::BracketFailed {
                    n,
                    ceiling: self.ceiling,
                });
            }
            if self.above(hi, n)? {
                break;
            }
            lo = hi;
            hi += self.scan_step;
        }
        while hi - lo >= self.opts.tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.above(mid, n)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let energy = 0.5 * (lo + hi);

        let mut values = Vec::new();
        let shot = shoot(
            self.potential,
            lo,
            self.grid,
            self.l_eff,
            self.opts.integrator,
            Some(&mut values),
        )?;
        let raw: Vec<(f64, f64)> = values
            .iter()
            .enumerate()
            .map(|(i, &u)| (self.grid.r(i), u))
            .collect();
        let (samples, _) = normalize(&raw)?;
        let residual = residual_check(self.potential, energy, &samples);
        Ok(EigenResult {
            n,
            energy,
            bracket: (lo, hi),
            nodes: shot.nodes,
            samples,
            residual,
        })
    }
}

fn search<'a, P: RadialPotential + ?Sized>(
    potential: &'a P,
    grid: &'a RadialGrid,
    opts: &'a SolverOptions,
) -> Result<(Search<'a, P>, f64)> {
    opts.validate()?;
    let b = potential.confinement();
    if !(b > 0.0) {
        return Err(Error::NonPositiveB(b));
    }
    let floor = potential_floor(potential, grid);
    let scan_step = b.sqrt();
    let ceiling = opts.ceiling.unwrap_or(floor + CEILING_SPAN * scan_step);
    let s = Search {
        potential,
        grid,
        opts,
        l_eff: potential.angular(),
        scan_step,
        ceiling,
    };
    Ok((s, floor))
}

/// Finds the eigenvalue whose eigenfunction has `n` interior nodes.
pub fn find_eigenvalue<P: RadialPotential + ?Sized>(
    potential: &P,
    n: usize,
    grid: &RadialGrid,
    opts: &SolverOptions,
) -> Result<EigenResult> {
    let (s, start) = search(potential, grid, opts)?;
    s.level(n, start)
}

/// Levels `n = 0..=n_max`, each search starting from the previous bracket.
pub fn solve_spectrum<P: RadialPotential + ?Sized>(
    potential: &P,
    n_max: usize,
    grid: &RadialGrid,
    opts: &SolverOptions,
) -> Result<Vec<EigenResult>> {
    let (levels, failure) = solve_spectrum_partial(potential, n_max, grid, opts);
    match failure {
        Some(e) => Err(e),
        None => Ok(levels),
    }
}

/// Like [`solve_spectrum`], but keeps the levels found before the first
/// failure.
pub fn solve_spectrum_partial<P: RadialPotential + ?Sized>(
    potential: &P,
    n_max: usize,
    grid: &RadialGrid,
    opts: &SolverOptions,
) -> (Vec<EigenResult>, Option<Error>) {
    let (s, mut start) = match search(potential, grid, opts) {
        Ok(v) => v,
        Err(e) => return (Vec::new(), Some(e)),
    };
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        match s.level(n, start) {
            Ok(level) => {
                start = level.bracket.1;
                out.push(level);
            }
            Err(e) => return (out, Some(e)),
        }
    }
    (out, None)
}

/// Levels `n = 0..=n_max` on a default grid sized for them. The first grid
/// is sized from an oscillator-like estimate above the spectral floor, then
/// widened while the top level lands above the energy it was sized for.
pub fn solve_levels<P: RadialPotential + ?Sized>(
    potential: &P,
    n_max: usize,
    overrides: &GridOverrides,
    opts: &SolverOptions,
) -> Result<Vec<EigenResult>> {
    let root_b = potential.confinement().sqrt();
    let floor = potential.spectral_floor().unwrap_or(0.0);
    let mut target = floor + (4.0 * n_max as f64 + 2.0 * potential.angular() + 7.0) * root_b;
    for _ in 0..8 {
        let grid = build_grid(potential, target, overrides)?;
        let levels = solve_spectrum(potential, n_max, &grid, opts)?;
        let top = levels.last().map_or(f64::NEG_INFINITY, |lv| lv.energy);
        if overrides.r_max.is_some() || top <= target {
            return Ok(levels);
        }
        target = top + 4.0 * root_b;
    }
    let grid = build_grid(potential, target, overrides)?;
    solve_spectrum(potential, n_max, &grid, opts)
}

fn simpson(values: &[f64], h: f64) -> f64 {
    let intervals = values.len() - 1;
    let simpson_end = if intervals.is_multiple_of(2) {
        intervals
    } else {
        intervals - 3
    };
    let mut sum = 0.0;
    if simpson_end > 0 {
        sum += values[0] + values[simpson_end];
        for (i, v) in values.iter().enumerate().take(simpson_end).skip(1) {
            sum += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        sum *= h / 3.0;
    }
    if simpson_end < intervals {
        let t = &values[simpson_end..];
        sum += 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3]);
    }
    sum
}

/// Rescales samples so that the composite-Simpson `∫u² dr` is one; returns
/// the rescaled samples and the prior value of the integral.
pub fn normalize(samples: &[(f64, f64)]) -> Result<(Vec<(f64, f64)>, f64)> {
    if samples.len() < 3 {
        return Err(Error::InvalidGrid(format!(
            "need at least 3 samples (got {})",
            samples.len()
        )));
    }
    let h = samples[1].0 - samples[0].0;
    let squares: Vec<f64> = samples.iter().map(|&(_, u)| u * u).collect();
    let norm = simpson(&squares, h);
    if !(norm.is_finite() && norm > f64::MIN_POSITIVE) {
        return Err(Error::ZeroNorm);
    }
    let scale = 1.0 / norm.sqrt();
    Ok((samples.iter().map(|&(r, u)| (r, u * scale)).collect(), norm))
}

/// Largest local defect `|−u″ + (V − E)u| / max|u|` over interior nodes,
/// with `u″` from a three-point stencil. The 2% of nodes nearest each end
/// are skipped.
pub fn residual_check<P: RadialPotential + ?Sized>(
    potential: &P,
    energy: f64,
    samples: &[(f64, f64)],
) -> f64 {
    if samples.len() < 3 {
        return 0.0;
    }
    let h = samples[1].0 - samples[0].0;
    let peak = samples.iter().map(|&(_, u)| u.abs()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let skip = ((samples.len() as f64) * 0.02).ceil().max(1.0) as usize;
    let end = samples.len().saturating_sub(skip);
    (skip..end)
        .map(|i| {
            let (r, u) = samples[i];
            let second = (samples[i + 1].1 - 2.0 * u + samples[i - 1].1) / (h * h);
            (-second + (potential.value(r) - energy) * u).abs()
        })
        .fold(0.0, f64::max)
        / peak
}
