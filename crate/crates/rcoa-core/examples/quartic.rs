fn main() {
    use rcoa_core::scenario::{by_name, Formulation, SolveRoute};
    use rcoa_core::solver::{scvx_solve, smilp_solve};
    use rcoa_core::transcribe::build_open_loop;
    let cfg = by_name("E1", Formulation::Mioa, SolveRoute::Hybrid).unwrap();
    let prob = build_open_loop(&cfg).unwrap();
    let params = cfg.solver.to_params();
    let t0 = std::time::Instant::now();
    let (x1, rep1) = smilp_solve(&prob.nlp, &prob.x_ref, &params).unwrap();
    println!(
        "phase1: {:?} obj {:.3} iters {} ({:.1}s)",
        rep1.status,
        rep1.objective,
        rep1.iterations,
        t0.elapsed().as_secs_f64()
    );
    // pin binaries from the face hint at the phase-1 trajectory
    let assignment = (prob.nlp.int_hint.as_ref().unwrap())(&x1);
    let pins: Vec<(usize, f64, f64)> = prob
        .nlp
        .integrality
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(j, _)| (j, assignment[j].round(), assignment[j].round()))
        .collect();
    // rebuild a pinned problem through bounds
    let mut nlp2 = build_open_loop(&cfg).unwrap().nlp;
    for &(j, lo, hi) in &pins {
        nlp2.var_bounds[j] = (lo, hi);
        nlp2.integrality[j] = false;
    }
    let tight = params.tightened();
    let t0 = std::time::Instant::now();
    let (x2, rep2) = scvx_solve(&nlp2, &x1, &tight).unwrap();
    println!(
        "phase2: {:?} obj {:.3} iters {} ({:.1}s)",
        rep2.status,
        rep2.objective,
        rep2.iterations,
        t0.elapsed().as_secs_f64()
    );
    for (i, r) in rep2.log.iter().enumerate().take(24) {
        println!(
            "p2 it {i} delta {:9.2e} rho {:9.2e} slack {:9.2e} acc {} J {:10.3} dL {:9.2e}",
            r.trust_radius, r.rho, r.slack_inf, r.accepted as u8, r.objective, r.predicted
        );
    }
    let u = nlp2.layout.unpack(&x2);
    for k in [8usize, 9, 10, 16, 17, 18] {
        println!("node {k}: X {:7.2} Y {:7.3}", u.states[k][3], u.states[k][4]);
    }
}
