// Scratch probe: error-norm landscape for the table reproductions.
use streamfn::assembly::{BoundarySpec, FeSpace};
use streamfn::field::DiscreteField;
use streamfn::mesh::build_uniform;
use streamfn::problems::{error_norms, manufactured_f, ManufacturedProblem};
use streamfn::solvers::{solve_one_level, solve_two_level, InitialGuess, NewtonConfig, TwoLevelConfig};
use streamfn::sparse::SolverConfig;

fn one_level(n: usize, tol: f64, lin: f64, guess: InitialGuess) {
    let mut space = FeSpace::new(build_uniform(n, n).unwrap());
    space.apply_bc(BoundarySpec::ClampedHomogeneous);
    let f = manufactured_f(10.0);
    let newton = NewtonConfig { tol, initial_guess: guess, ..Default::default() };
    let linear = SolverConfig::with_rel_tol(lin);
    match solve_one_level(&space, 10.0, &f, &newton, &linear) {
        Ok((psi, stats)) => {
            let field = DiscreteField::new(space.mesh.clone(), psi);
            let e = error_norms(&field, &ManufacturedProblem::new(10.0), 6).unwrap();
            println!(
                "1L n={n:2} tol={tol:.0e} lin={lin:.0e} {guess:?}: ni={} nb={:?} res={:.2e} l2={:.3e} h1={:.3e} h2={:.3e}",
                stats.newton_iters, stats.bicgstab_iters_coarse, stats.residual, e.l2, e.h1, e.h2
            );
        }
        Err(e) => println!("1L n={n} tol={tol:.0e} lin={lin:.0e}: FAILED {e}"),
    }
}

fn two_level(n: usize, tol: f64, lin: f64, guess: InitialGuess) {
    let cfg = TwoLevelConfig {
        newton: NewtonConfig { tol, initial_guess: guess, ..Default::default() },
        linear: SolverConfig::with_rel_tol(lin),
        ..TwoLevelConfig::halved(n)
    };
    let f = manufactured_f(10.0);
    match solve_two_level(&cfg, 10.0, &f, BoundarySpec::ClampedHomogeneous) {
        Ok(sol) => {
            let e = error_norms(&sol.fine, &ManufacturedProblem::new(10.0), 6).unwrap();
            println!(
                "2L ({n},{}) tol={tol:.0e} lin={lin:.0e} {guess:?}: noc={:?} nof={:?} l2={:.3e} h1={:.3e} h2={:.3e}",
                2 * n, sol.stats.bicgstab_iters_coarse, sol.stats.bicgstab_iters_fine, e.l2, e.h1, e.h2
            );
        }
        Err(e) => println!("2L ({n},..) FAILED {e}"),
    }
}

fn main() {
    println!("== converged baselines (tight) ==");
    for n in [4, 8, 14, 16, 32] {
        one_level(n, 1e-10, 1e-10, InitialGuess::Stokes);
    }
    println!("paper T2: 1/8: l2=3.94e-5 h1=4.23e-2 h2=1.41e-1 | 1/14: 2.41e-5, 1.74e-2, 8.87e-2 | 1/16: 3.55e-5, 1.41e-2, 8.08e-2");

    println!("== loose configs at n=8 ==");
    for guess in [InitialGuess::Zero, InitialGuess::Stokes] {
        for lin in [1e-1, 1e-2, 1e-3, 1e-8] {
            one_level(8, 1e-3, lin, guess);
        }
    }

    println!("== two-level tight ==");
    for n in [4, 7, 8, 16] {
        two_level(n, 1e-10, 1e-10, InitialGuess::Stokes);
    }
    println!("paper T3: (1/4,1/8): l2=1.40e-3 h1=4.09e-2 h2=1.42e-1 | (1/7,1/14): 2.31e-4, 1.73e-2, 8.70e-2 | (1/8,1/16): 1.70e-4, 1.41e-2, 7.94e-2");
    println!("paper T4 Re=10 (1/16,1/32): l2=4.21e-5 h1=4.84e-3 h2=5.27e-2");

    println!("== two-level loose at n=4 ==");
    for lin in [1e-2, 1e-3] {
        for guess in [InitialGuess::Zero, InitialGuess::Stokes] {
            two_level(4, 1e-3, lin, guess);
        }
    }
}
