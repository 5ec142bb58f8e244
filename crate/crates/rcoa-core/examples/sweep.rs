use rcoa_core::harness::{run_open_loop, NoClock};
use rcoa_core::scenario::{by_name, Formulation, SolveRoute};

fn main() {
    let cases = [
        ("E1", Formulation::Rcoa, SolveRoute::Scvx),
        ("E2", Formulation::Rcoa, SolveRoute::Scvx),
        ("C2", Formulation::Rcoa, SolveRoute::Scvx),
        ("E1", Formulation::Eoa, SolveRoute::Scvx),
        ("E2", Formulation::Eoa, SolveRoute::Scvx),
        ("E1", Formulation::Mioa, SolveRoute::Hybrid),
        ("E2", Formulation::Mioa, SolveRoute::Hybrid),
        ("E1", Formulation::Mioa, SolveRoute::Smilp),
    ];
    for (name, form, route) in cases {
        let cfg = by_name(name, form, route).unwrap();
        let t0 = std::time::Instant::now();
        match run_open_loop(&cfg, route, &NoClock) {
            Ok((traj, r)) => {
                let vx_end = traj.states.last().map(|s| s[0]).unwrap_or(0.0);
                println!(
                    "{:3} {:5?} {:7?} -> {:9?} it {:4} pen {:9.2e}/{:9.2e} vx {:4.1} {:5.1}s",
                    name, form, route, r.status, r.solver_iterations, r.node_penetration,
                    r.intersample_penetration, vx_end, t0.elapsed().as_secs_f64()
                );
            }
            Err(e) => println!("{name} {form:?} {route:?} -> ERROR {e}"),
        }
    }
}
