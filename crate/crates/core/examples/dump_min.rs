// scratch: feasibility scan over seeds
use swiptopt_core::channel::{generate, TopologyConfig};
use swiptopt_core::metrics::SystemParams;
use swiptopt_core::sdp::*;
use swiptopt_core::solvers::scale_instance;
use swiptopt_core::NumericPolicy;

fn main() {
    let mut ok = 0;
    let mut bad = Vec::new();
    for seed in 0..40u64 {
        let cfg = TopologyConfig { n_antennas: 4, n_secondary: 3, n_primary: 2, seed, ..TopologyConfig::default() };
        let real = generate(&cfg, 0).unwrap();
        let params = SystemParams::new(100.0, vec![1.0;2], vec![1.0;2], 10.0, vec![0.5;2], &real.noise).unwrap();
        let scaled = scale_instance(&real.channels, &params);
        let spec = TchebycheffSpec::axis(1, Variant::Standard);
        let asm = assemble(&scaled.channels, &scaled.params, &spec, &BeamMode::Optimize).unwrap();
        let backend = ClarabelBackend;
        match solve(&asm, &backend, &SolverSettings::default(), &NumericPolicy::default()) {
            Ok(out) => { ok += 1; if seed < 10 { println!("seed {seed}: TP {:.3} W", 1.0/out.relaxed.xi); } }
            Err(e) => { bad.push(seed); if seed < 10 { println!("seed {seed}: {e:?}"); } }
        }
    }
    println!("feasible {ok}/40; infeasible seeds: {bad:?}");
}
