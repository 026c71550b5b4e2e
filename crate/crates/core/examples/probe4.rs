use std::time::Instant;
use fram_core::harness::*;
use fram_core::solver::{FramConfig, Variant};

fn main() {
    let t0 = Instant::now();
    let specs: Vec<InstanceSpec> = [0.05, 0.15, 0.25]
        .iter()
        .map(|&noise| InstanceSpec {
            generator: GeneratorKind::ErdosRenyi,
            n: 200,
            p_edge: Some(0.05),
            noise,
            seed: 0,
        })
        .collect();
    let cfg = FramConfig { theta: 10.0, ..FramConfig::default() };
    let records = run_experiment(
        &specs,
        &cfg,
        &[Variant::Fram, Variant::Dspfp],
        &[PrecisionChoice::Fp64],
        4,
    )
    .unwrap();
    for noise in ["0.05", "0.15", "0.25"] {
        for variant in ["fram", "dspfp"] {
            let accs: Vec<f64> = records
                .iter()
                .filter(|r| format!("{}", r.noise) == noise && r.variant == variant)
                .filter_map(|r| r.accuracy)
                .collect();
            let mean = accs.iter().sum::<f64>() / accs.len() as f64;
            println!("noise={noise} {variant}: mean_acc={mean:.4} accs={accs:?}");
        }
    }
    println!("batch time: {:.1}s for {} records", t0.elapsed().as_secs_f64(), records.len());
}
