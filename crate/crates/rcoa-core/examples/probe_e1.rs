use rcoa_core::harness::{run_open_loop, NoClock};
use rcoa_core::scenario::{by_name, Formulation, SolveRoute};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let name = args.get(1).map(|s| s.as_str()).unwrap_or("E1");
    let form = match args.get(2).map(|s| s.as_str()).unwrap_or("rcoa") {
        "mioa" => Formulation::Mioa,
        "eoa" => Formulation::Eoa,
        _ => Formulation::Rcoa,
    };
    let route = match args.get(3).map(|s| s.as_str()).unwrap_or("scvx") {
        "smilp" => SolveRoute::Smilp,
        "hybrid" => SolveRoute::Hybrid,
        _ => SolveRoute::Scvx,
    };
    let cfg = by_name(name, form, route).expect("scenario");
    let t0 = std::time::Instant::now();
    match run_open_loop(&cfg, route, &NoClock) {
        Ok((traj, report)) => {
            println!(
                "status {:?} obj {:.3} iters {} pen {:.3e}/{:.3e} elapsed {:.1}s",
                report.status,
                report.objective,
                report.solver_iterations,
                report.node_penetration,
                report.intersample_penetration,
                t0.elapsed().as_secs_f64()
            );
            if std::env::var("PROBE_LOG").is_ok() {
                for (i, r) in report.solves[0].log.iter().enumerate() {
                    println!(
                        "it {:3} delta {:9.3e} rho {:9.3e} slack {:9.3e} acc {} J {:.4} wm {:.0} dL {:.3e}",
                        i, r.trust_radius, r.rho, r.slack_inf, r.accepted as u8, r.objective, r.merit_weight, r.predicted
                    );
                }
            }
            println!("nodes (X, Y, vx, delta):");
            for (i, s) in traj.states.iter().enumerate() {
                let d = if i < traj.inputs.len() { traj.inputs[i][0] } else { 0.0 };
                print!("({:5.1},{:5.2},{:4.1},{:5.2}) ", s[3], s[4], s[0], d);
                if i % 4 == 3 {
                    println!();
                }
            }
            println!();
        }
        Err(e) => println!("ERROR: {e}"),
    }
}
