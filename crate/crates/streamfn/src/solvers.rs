//! Nonlinear and two-level solution drivers.
//!
//! The one-level path applies Newton's method to the discrete system
//! `A psi + B(psi) psi = l`: the Jacobian is `A + B(psi) + C(psi)` with
//! `B` the frozen-first-slot and `C` the middle-slot convection matrix,
//! and every Newton step is solved with BiCGSTAB. Iteration stops when the
//! residual norm and the step norm are both within tolerance.
//!
//! The two-level path solves the nonlinear system on a coarse mesh only,
//! interpolates the result onto a nested fine mesh, and performs a single
//! linearized solve there; the fine level never sees a Newton iteration.

use crate::assembly::{
    assemble_a, assemble_b_first_slot, assemble_b_middle_slot, assemble_load, BoundarySpec,
    DofVector, FeSpace,
};
use crate::field::{hermite_interpolant, DiscreteField};
use crate::mesh::build_uniform;
use crate::sparse::{bicgstab, norm2, spmv, CsrMatrix, SolveReport, SolverConfig};
use crate::Error;
use std::time::Instant;

/// Starting iterate for Newton's method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialGuess {
    /// Solve the Stokes problem `A psi = l` first; costs one linear solve.
    #[default]
    Stokes,
    Zero,
}

/// Newton iteration controls.
#[derive(Debug, Clone)]
pub struct NewtonConfig {
    /// Combined tolerance: both the residual norm and the norm of the
    /// difference of successive iterates must drop below it.
    pub tol: f64,
    pub max_newton: usize,
    pub initial_guess: InitialGuess,
    /// Optional Reynolds ramp, strictly increasing and ending at the
    /// target; each stage warm-starts the next.
    pub continuation: Option<Vec<f64>>,
    /// Step-norm guard; a larger Newton step aborts as divergence.
    pub max_step: f64,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        NewtonConfig {
            tol: 1e-3,
            max_newton: 25,
            initial_guess: InitialGuess::Stokes,
            continuation: None,
            max_step: 1e6,
        }
    }
}

impl NewtonConfig {
    pub fn with_tol(tol: f64) -> Self {
        NewtonConfig { tol, ..Default::default() }
    }
}

/// Per-solve record: iteration counts, residuals, sizes, timing.
#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    pub newton_iters: usize,
    /// Always zero for the fine level of a two-level solve.
    pub fine_newton_iters: usize,
    /// BiCGSTAB iterations per linear solve on the (coarse) level, the
    /// initial Stokes solve included when used.
    pub bicgstab_iters_coarse: Vec<usize>,
    /// BiCGSTAB iterations of the single fine-level solve.
    pub bicgstab_iters_fine: Vec<usize>,
    /// Final nonlinear residual norm (coarse/one-level).
    pub residual: f64,
    /// True relative residual of the fine linear solve.
    pub fine_residual: Option<f64>,
    /// Free-DOF count per level, coarse first.
    pub free_dofs: Vec<usize>,
    pub wall_seconds: f64,
    pub residual_history: Vec<f64>,
}

/// Why a nonlinear solve stopped short, with everything computed so far.
#[derive(Debug)]
pub struct SolveFailure {
    pub reason: FailureReason,
    pub best: DofVector,
    pub stats: SolveStats,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FailureReason {
    MaxNewtonReached,
    LinearBreakdown { newton_iter: usize },
    LinearStalled { newton_iter: usize, rel_residual: f64 },
    Diverged { step_norm: f64 },
}

impl std::fmt::Display for SolveFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.reason {
            FailureReason::MaxNewtonReached => write!(
                f,
                "Newton did not converge in {} iterations (residual {:.3e})",
                self.stats.newton_iters, self.stats.residual
            ),
            FailureReason::LinearBreakdown { newton_iter } => {
                write!(f, "BiCGSTAB breakdown in Newton iteration {newton_iter}")
            }
            FailureReason::LinearStalled { newton_iter, rel_residual } => write!(
                f,
                "linear solve stalled in Newton iteration {newton_iter} (relative residual {rel_residual:.3e})"
            ),
            FailureReason::Diverged { step_norm } => {
                write!(f, "Newton step norm {step_norm:.3e} exceeded the divergence guard")
            }
        }
    }
}

impl std::error::Error for SolveFailure {}

struct Operators {
    a: CsrMatrix,
    a_corr: Vec<f64>,
    load: Vec<f64>,
}

fn build_operators<F>(space: &FeSpace, reynolds: f64, f: &F) -> Operators
where
    F: Fn(f64, f64) -> (f64, f64),
{
    let (a, a_corr) = assemble_a(space, reynolds);
    let load = assemble_load(space, |x, y| f(x, y));
    Operators { a, a_corr, load }
}

// Free-DOF residual R(psi) = A psi + B(psi) psi - l, with the fixed-value
// couplings folded in through the assembly corrections.
fn residual(
    ops: &Operators,
    b: &CsrMatrix,
    b_corr: &[f64],
    psi_free: &[f64],
) -> Vec<f64> {
    let a_psi = spmv(&ops.a, psi_free);
    let b_psi = spmv(b, psi_free);
    (0..psi_free.len())
        .map(|i| a_psi[i] + ops.a_corr[i] + b_psi[i] + b_corr[i] - ops.load[i])
        .collect()
}

fn check_linear(report: &SolveReport, newton_iter: usize) -> Result<(), FailureReason> {
    if report.breakdown {
        return Err(FailureReason::LinearBreakdown { newton_iter });
    }
    if !report.converged {
        return Err(FailureReason::LinearStalled {
            newton_iter,
            rel_residual: report.final_rel_residual,
        });
    }
    Ok(())
}

/// One-level method: Newton on a single mesh. The space must already carry
/// its boundary conditions.
pub fn solve_one_level<F>(
    space: &FeSpace,
    reynolds: f64,
    f: &F,
    newton_cfg: &NewtonConfig,
    linear_cfg: &SolverConfig,
) -> Result<(DofVector, SolveStats), SolveFailure>
where
    F: Fn(f64, f64) -> (f64, f64),
{
    let start = Instant::now();
    let mut stats = SolveStats { free_dofs: vec![space.n_free()], ..Default::default() };

    let stages: Vec<f64> = match &newton_cfg.continuation {
        Some(ramp) => ramp.clone(),
        None => vec![reynolds],
    };
    debug_assert!(stages.last().copied() == Some(reynolds), "continuation must end at the target");

    let mut psi_free = vec![0.0; space.n_free()];
    let mut first_stage = true;
    for &re in &stages {
        let ops = build_operators(space, re, f);
        if first_stage && newton_cfg.initial_guess == InitialGuess::Stokes {
            let rhs: Vec<f64> =
                ops.load.iter().zip(&ops.a_corr).map(|(l, c)| l - c).collect();
            let (x, report) = bicgstab(&ops.a, &rhs, &psi_free, linear_cfg);
            stats.bicgstab_iters_coarse.push(report.iterations);
            if let Err(reason) = check_linear(&report, 0) {
                stats.wall_seconds = start.elapsed().as_secs_f64();
                return Err(SolveFailure { reason, best: space.expand(&x), stats });
            }
            psi_free = x;
        }
        first_stage = false;

        match newton_loop(space, &ops, &mut psi_free, newton_cfg, linear_cfg, &mut stats) {
            Ok(()) => {}
            Err(reason) => {
                stats.wall_seconds = start.elapsed().as_secs_f64();
                return Err(SolveFailure { reason, best: space.expand(&psi_free), stats });
            }
        }
    }

    stats.wall_seconds = start.elapsed().as_secs_f64();
    Ok((space.expand(&psi_free), stats))
}

fn newton_loop(
    space: &FeSpace,
    ops: &Operators,
    psi_free: &mut Vec<f64>,
    cfg: &NewtonConfig,
    linear_cfg: &SolverConfig,
    stats: &mut SolveStats,
) -> Result<(), FailureReason> {
    let mut last_step = f64::INFINITY;
    for iter in 1..=cfg.max_newton {
        let psi_full = space.expand(psi_free);
        let (b, b_corr) = assemble_b_first_slot(space, &psi_full);
        let r = residual(ops, &b, &b_corr, psi_free);
        let r_norm = norm2(&r);
        stats.residual = r_norm;
        stats.residual_history.push(r_norm);
        if r_norm <= cfg.tol && last_step <= cfg.tol {
            return Ok(());
        }

        let (c, _) = assemble_b_middle_slot(space, &psi_full);
        let mut jac = ops.a.clone();
        jac.add_assign(&b);
        jac.add_assign(&c);

        let neg_r: Vec<f64> = r.iter().map(|v| -v).collect();
        let (delta, report) = bicgstab(&jac, &neg_r, &vec![0.0; psi_free.len()], linear_cfg);
        stats.bicgstab_iters_coarse.push(report.iterations);
        stats.newton_iters += 1;
        check_linear(&report, iter)?;

        let step_norm = norm2(&delta);
        if !step_norm.is_finite() || step_norm > cfg.max_step {
            return Err(FailureReason::Diverged { step_norm });
        }
        for (x, d) in psi_free.iter_mut().zip(&delta) {
            *x += d;
        }
        last_step = step_norm;
    }

    // converged exactly at the cap?
    let psi_full = space.expand(psi_free);
    let (b, b_corr) = assemble_b_first_slot(space, &psi_full);
    let r_norm = norm2(&residual(ops, &b, &b_corr, psi_free));
    stats.residual = r_norm;
    stats.residual_history.push(r_norm);
    if r_norm <= cfg.tol && last_step <= cfg.tol {
        return Ok(());
    }
    Err(FailureReason::MaxNewtonReached)
}

/// Interpolates a coarse field onto the DOFs of a nested fine space: every
/// fine node takes the coarse field's value, dx, dy and dxy. On halved
/// rectangles the spaces nest, so the prolonged field equals the coarse
/// field pointwise.
pub fn prolongate(coarse: &DiscreteField, fine_space: &FeSpace) -> Result<DofVector, Error> {
    let fine = &fine_space.mesh;
    if !fine.nests(&coarse.mesh) {
        return Err(Error::NonNested {
            coarse: (coarse.mesh.nx, coarse.mesh.ny),
            fine: (fine.nx, fine.ny),
        });
    }
    Ok(hermite_interpolant(
        fine,
        |x, y| coarse.eval(x, y).value,
        |x, y| coarse.eval(x, y).dx,
        |x, y| coarse.eval(x, y).dy,
        |x, y| coarse.eval(x, y).dxy,
    ))
}

/// Two-level solve configuration. The fine mesh must nest the coarse one;
/// the default pairing is exact halving.
#[derive(Debug, Clone)]
pub struct TwoLevelConfig {
    pub coarse: (usize, usize),
    pub fine: (usize, usize),
    pub quad_order: usize,
    pub newton: NewtonConfig,
    pub linear: SolverConfig,
}

impl TwoLevelConfig {
    /// Coarse `n x n` with the fine mesh obtained by halving.
    pub fn halved(n: usize) -> Self {
        TwoLevelConfig {
            coarse: (n, n),
            fine: (2 * n, 2 * n),
            quad_order: 4,
            newton: NewtonConfig::default(),
            linear: SolverConfig::default(),
        }
    }
}

/// Result of a two-level solve.
pub struct TwoLevelSolution {
    pub fine: DiscreteField,
    pub coarse: DiscreteField,
    pub stats: SolveStats,
}

/// Two-level method: nonlinear coarse solve, then one linearized fine
/// solve with the prolonged coarse solution frozen in the convection term.
pub fn solve_two_level<F>(
    cfg: &TwoLevelConfig,
    reynolds: f64,
    f: &F,
    bc: BoundarySpec,
) -> Result<TwoLevelSolution, TwoLevelFailure>
where
    F: Fn(f64, f64) -> (f64, f64),
{
    let start = Instant::now();
    let coarse_mesh = build_uniform(cfg.coarse.0, cfg.coarse.1)
        .map_err(|e| TwoLevelFailure::Setup(e))?;
    let fine_mesh =
        build_uniform(cfg.fine.0, cfg.fine.1).map_err(|e| TwoLevelFailure::Setup(e))?;
    if !fine_mesh.nests(&coarse_mesh) {
        return Err(TwoLevelFailure::Setup(Error::NonNested {
            coarse: cfg.coarse,
            fine: cfg.fine,
        }));
    }

    let mut coarse_space = FeSpace::with_quad(coarse_mesh, cfg.quad_order);
    coarse_space.apply_bc(bc);
    let (coarse_psi, mut stats) =
        solve_one_level(&coarse_space, reynolds, f, &cfg.newton, &cfg.linear)
            .map_err(TwoLevelFailure::Coarse)?;
    let coarse_field = DiscreteField::new(coarse_space.mesh.clone(), coarse_psi);

    let mut fine_space = FeSpace::with_quad(fine_mesh, cfg.quad_order);
    fine_space.apply_bc(bc);
    stats.free_dofs.push(fine_space.n_free());

    // Step 2: a(psi_h, phi) + b(prolonged coarse; psi_h, phi) = l(phi)
    let prolonged = prolongate(&coarse_field, &fine_space).map_err(TwoLevelFailure::Setup)?;
    let ops = build_operators(&fine_space, reynolds, f);
    let (b, b_corr) = assemble_b_first_slot(&fine_space, &prolonged);
    let mut oseen = ops.a.clone();
    oseen.add_assign(&b);
    let rhs: Vec<f64> = ops
        .load
        .iter()
        .zip(&ops.a_corr)
        .zip(&b_corr)
        .map(|((l, ca), cb)| l - ca - cb)
        .collect();

    // the prolonged coarse solution is the natural starting iterate
    let x0 = fine_space.restrict(&prolonged);
    let (fine_free, report) = bicgstab(&oseen, &rhs, &x0, &cfg.linear);
    stats.bicgstab_iters_fine.push(report.iterations);
    stats.fine_residual = Some(report.final_rel_residual);
    stats.fine_newton_iters = 0;
    stats.wall_seconds = start.elapsed().as_secs_f64();

    if report.breakdown || !report.converged {
        return Err(TwoLevelFailure::Fine {
            report,
            best: DiscreteField::new(fine_space.mesh.clone(), fine_space.expand(&fine_free)),
            stats,
        });
    }

    let fine_field = DiscreteField::new(fine_space.mesh.clone(), fine_space.expand(&fine_free));
    Ok(TwoLevelSolution { fine: fine_field, coarse: coarse_field, stats })
}

/// Two-level failure modes; coarse failures carry the nested report.
#[derive(Debug)]
pub enum TwoLevelFailure {
    Setup(Error),
    Coarse(SolveFailure),
    Fine { report: SolveReport, best: DiscreteField, stats: SolveStats },
}

impl std::fmt::Display for TwoLevelFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TwoLevelFailure::Setup(e) => write!(f, "two-level setup: {e}"),
            TwoLevelFailure::Coarse(e) => write!(f, "coarse solve: {e}"),
            TwoLevelFailure::Fine { report, .. } => write!(
                f,
                "fine linear solve did not converge (relative residual {:.3e}{})",
                report.final_rel_residual,
                if report.breakdown { ", breakdown" } else { "" }
            ),
        }
    }
}

impl std::error::Error for TwoLevelFailure {}

/// Conforming element families of the coarse-to-fine scaling rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Argyris,
    CloughTocher,
    BognerFoxSchmit,
    BicubicSpline,
}

impl ElementKind {
    pub const ALL: [ElementKind; 4] = [
        ElementKind::Argyris,
        ElementKind::CloughTocher,
        ElementKind::BognerFoxSchmit,
        ElementKind::BicubicSpline,
    ];

    /// Exponent `p` in the mesh scaling `h |ln h|^(-1/4) = H^p`.
    pub fn scaling_exponent(self) -> f64 {
        match self {
            ElementKind::Argyris => 2.5,
            _ => 1.5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::Argyris => "argyris",
            ElementKind::CloughTocher => "clough-tocher",
            ElementKind::BognerFoxSchmit => "bogner-fox-schmit",
            ElementKind::BicubicSpline => "bicubic-spline",
        }
    }
}

/// Fine width recommended for a coarse width `H`: solves
/// `h |ln h|^(-1/4) = H^p` by bisection on `(0, H]` with unit constant.
pub fn scaling_h_for_h_coarse(kind: ElementKind, h_coarse: f64) -> Result<f64, Error> {
    if !(h_coarse > 0.0 && h_coarse < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "coarse width must lie in (0, 1), got {h_coarse}"
        )));
    }
    let target = h_coarse.powf(kind.scaling_exponent());
    let value = |h: f64| h * h.ln().abs().powf(-0.25);

    // value is increasing on (0,1) and value(H) >= H^p, so the root is in (0, H]
    let mut lo = f64::MIN_POSITIVE;
    let mut hi = h_coarse;
    debug_assert!(value(hi) >= target);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if value(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::manufactured_f;

    fn clamped_space(n: usize) -> FeSpace {
        let mut space = FeSpace::new(build_uniform(n, n).unwrap());
        space.apply_bc(BoundarySpec::ClampedHomogeneous);
        space
    }

    #[test]
    fn zero_force_converges_to_zero_in_one_step() {
        let space = clamped_space(4);
        let (psi, stats) = solve_one_level(
            &space,
            10.0,
            &|_, _| (0.0, 0.0),
            &NewtonConfig::default(),
            &SolverConfig::default(),
        )
        .unwrap();
        assert_eq!(stats.newton_iters, 1);
        assert!(psi.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn manufactured_solve_small_mesh() {
        let space = clamped_space(4);
        let f = manufactured_f(10.0);
        let (psi, stats) = solve_one_level(
            &space,
            10.0,
            &f,
            &NewtonConfig::with_tol(1e-10),
            &SolverConfig::with_rel_tol(1e-10),
        )
        .unwrap();
        assert!(stats.residual <= 1e-10);
        assert!(stats.newton_iters <= 6, "took {} iterations", stats.newton_iters);
        // residual history decreases monotonically after the first step
        let hist = &stats.residual_history;
        for w in hist.windows(2) {
            assert!(w[1] <= w[0] * 1.001, "history {hist:?}");
        }
        // the center value lands near the exact g(1/2)^2 = (1/16)^2
        let field = DiscreteField::new(space.mesh.clone(), psi);
        let exact = 3.90625e-3;
        assert!((field.eval(0.5, 0.5).value - exact).abs() < 2e-3);
    }

    #[test]
    fn prolongation_is_exact_on_nested_meshes() {
        let coarse_mesh = build_uniform(2, 2).unwrap();
        let coarse_vals = hermite_interpolant(&coarse_mesh, |x, y| x * y, |_, y| y, |x, _| x, |_, _| 1.0);
        let coarse = DiscreteField::new(coarse_mesh, coarse_vals);
        let fine_space = FeSpace::new(build_uniform(4, 4).unwrap());
        let prolonged = prolongate(&coarse, &fine_space).unwrap();
        let fine = DiscreteField::new(fine_space.mesh.clone(), prolonged);
        let mut t = 0.1;
        for _ in 0..20 {
            let (x, y) = (t, (t * 7.3) % 1.0);
            assert!((fine.eval(x, y).value - coarse.eval(x, y).value).abs() < 1e-13);
            t = (t + 0.37) % 1.0;
        }
    }

    #[test]
    fn prolongation_rejects_non_nested() {
        let coarse_mesh = build_uniform(3, 3).unwrap();
        let coarse = DiscreteField::new(
            coarse_mesh.clone(),
            DofVector::zeros(4 * coarse_mesh.n_nodes()),
        );
        let fine_space = FeSpace::new(build_uniform(4, 4).unwrap());
        assert!(matches!(prolongate(&coarse, &fine_space), Err(Error::NonNested { .. })));
    }

    #[test]
    fn zero_coarse_field_prolongs_to_zero() {
        let coarse_mesh = build_uniform(2, 2).unwrap();
        let coarse = DiscreteField::new(
            coarse_mesh.clone(),
            DofVector::zeros(4 * coarse_mesh.n_nodes()),
        );
        let fine_space = FeSpace::new(build_uniform(8, 8).unwrap());
        let prolonged = prolongate(&coarse, &fine_space).unwrap();
        assert!(prolonged.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn two_level_runs_and_reports_structure() {
        let cfg = TwoLevelConfig {
            newton: NewtonConfig::with_tol(1e-8),
            linear: SolverConfig::with_rel_tol(1e-10),
            ..TwoLevelConfig::halved(4)
        };
        let f = manufactured_f(10.0);
        let sol = solve_two_level(&cfg, 10.0, &f, BoundarySpec::ClampedHomogeneous).unwrap();
        assert_eq!(sol.stats.fine_newton_iters, 0);
        assert_eq!(sol.stats.bicgstab_iters_fine.len(), 1);
        assert_eq!(sol.stats.free_dofs.len(), 2);
        assert!(sol.stats.free_dofs[1] > sol.stats.free_dofs[0]);
        assert!(sol.stats.fine_residual.unwrap() <= 1e-10);
    }

    #[test]
    fn scaling_rule_satisfies_its_equation() {
        let h = scaling_h_for_h_coarse(ElementKind::BognerFoxSchmit, 0.25).unwrap();
        let residual = h * h.ln().abs().powf(-0.25) - 0.25f64.powf(1.5);
        assert!(residual.abs() < 1e-12, "residual {residual}");
        assert!(h <= 0.25);
    }

    #[test]
    fn argyris_scaling_is_finer() {
        let h_arg = scaling_h_for_h_coarse(ElementKind::Argyris, 0.125).unwrap();
        let h_ct = scaling_h_for_h_coarse(ElementKind::CloughTocher, 0.125).unwrap();
        let h_bfs = scaling_h_for_h_coarse(ElementKind::BognerFoxSchmit, 0.125).unwrap();
        assert!(h_arg < h_ct);
        assert_eq!(h_ct, h_bfs);
    }

    #[test]
    fn scaling_rejects_unit_width() {
        assert!(scaling_h_for_h_coarse(ElementKind::Argyris, 1.0).is_err());
        assert!(scaling_h_for_h_coarse(ElementKind::Argyris, 0.0).is_err());
    }

    #[test]
    fn returned_width_stays_below_coarse() {
        for kind in ElementKind::ALL {
            for h_coarse in [0.5, 0.25, 0.125, 1.0 / 16.0] {
                let h = scaling_h_for_h_coarse(kind, h_coarse).unwrap();
                assert!(h <= h_coarse && h > 0.0);
            }
        }
    }
}
