use std::time::Instant;
use fram_core::assignment::{brute_force_max, hungarian_max};
use fram_core::graph::MatchingProblem;
use fram_core::harness::*;
use fram_core::matrix::Matrix;
use fram_core::precision::{fram_mixed, PrecisionPolicy};
use fram_core::projection::{dsn_fixed, dykstra_project, sdsn, SdsnConfig};
use fram_core::rng::{random_matrix, seeded_rng};
use fram_core::solver::{fram_match, FramConfig, Variant};
use rand::Rng;

fn main() {
    // --- Criterion 2: theorem-2 bound, eps <= 1/theta ---
    let t0 = Instant::now();
    let mut worst_margin = f64::INFINITY;
    let mut violations = 0;
    for trial in 0..200u64 {
        let mut rng = seeded_rng(10_000 + trial, 0);
        let n = rng.random_range(2..=20);
        let x = random_matrix(n, n, &mut rng);
        let xn = x.map(|v| v / x.max_entry());
        let opt = hungarian_max(&xn).unwrap().score;
        for theta in [1.0, 2.0, 10.0] {
            let cfg = SdsnConfig::new(theta, 1e-9, 200_000);
            let (d, tr) = sdsn(&x, &cfg).unwrap();
            assert!(tr.converged);
            let eps = (opt - d.frobenius_inner(&xn).unwrap()) / n as f64;
            let margin = 1.0 / theta - eps;
            if margin < worst_margin { worst_margin = margin; }
            if eps > 1.0 / theta { violations += 1; }
        }
    }
    println!("C2: violations={violations} worst_margin={worst_margin:.4e} time={:.1}s", t0.elapsed().as_secs_f64());

    // --- Criterion 3: limits ---
    let t0 = Instant::now();
    let mut fails_lo = 0; let mut worst_lo: f64 = 0.0;
    for trial in 0..100u64 {
        let mut rng = seeded_rng(20_000 + trial, 0);
        let n = rng.random_range(3..=10);
        let x = random_matrix(n, n, &mut rng);
        let cfg = SdsnConfig::new(1e-6, 1e-3, 100_000);
        let (d, _) = sdsn(&x, &cfg).unwrap();
        let dist = d.frobenius_distance(&Matrix::uniform(n)).unwrap();
        worst_lo = worst_lo.max(dist);
        if dist > 1e-3 { fails_lo += 1; }
    }
    println!("C3-lo: fails={fails_lo} worst={worst_lo:.2e} time={:.1}s", t0.elapsed().as_secs_f64());

    let t0 = Instant::now();
    let mut fails_hi = 0; let mut worst_hi: f64 = 0.0; let mut max_pass = 0;
    for trial in 0..100u64 {
        let mut rng = seeded_rng(30_000 + trial, 0);
        let n = rng.random_range(3..=8);
        // unique optimum with margin: resample until gap >= 0.05
        let (x, best) = loop {
            let x = random_matrix(n, n, &mut rng);
            let xn = x.map(|v| v / x.max_entry());
            let best = brute_force_max(&xn).unwrap();
            // second best score
            let mut second = f64::NEG_INFINITY;
            let mut perm: Vec<usize> = (0..n).collect();
            loop {
                if perm != best.perm {
                    let s: f64 = perm.iter().enumerate().map(|(i, &j)| xn.get(i, j)).sum();
                    if s > second { second = s; }
                }
                if !next_perm(&mut perm) { break; }
            }
            if best.score - second >= 0.05 { break (x, best); }
        };
        let cfg = SdsnConfig::new(1000.0, 1e-9, 500_000);
        let (d, tr) = sdsn(&x, &cfg).unwrap();
        assert!(tr.converged, "hi-theta sdsn did not converge");
        max_pass = max_pass.max(tr.iterations);
        let p = fram_core::assignment::assignment_to_matrix(&best, n);
        let dist = d.frobenius_distance(&p).unwrap();
        worst_hi = worst_hi.max(dist);
        if dist > 1e-2 { fails_hi += 1; }
    }
    println!("C3-hi: fails={fails_hi} worst={worst_hi:.2e} max_passes={max_pass} time={:.1}s", t0.elapsed().as_secs_f64());

    // --- Criterion 4: iteration bound vs own limit ---
    let t0 = Instant::now();
    let mut fails4 = 0; let mut stall_vs_dyk: f64 = 0.0;
    for trial in 0..50u64 {
        let mut rng = seeded_rng(40_000 + trial, 0);
        let n = 10;
        let theta = 2.0;
        let eps = 1e-6;
        let x0 = random_matrix(n, n, &mut rng);
        let x = x0.map(|v| v / x0.max_entry()); // max = 1
        let scaled = x.map(|v| 0.5 * theta * v);
        // own limit: run alternation to stall
        let mut limit = scaled.clone();
        loop {
            let next = dsn_fixed(&limit, 100).unwrap();
            let step = next.frobenius_distance(&limit).unwrap();
            limit = next;
            if step < 1e-14 { break; }
        }
        let (dyk, _) = dykstra_project(&scaled, 1e-12, 100_000).unwrap();
        stall_vs_dyk = stall_vs_dyk.max(limit.frobenius_distance(&dyk).unwrap());
        // track iterates
        let mut cur = scaled.clone();
        let mut prev_err = cur.frobenius_distance(&limit).unwrap();
        let mut c: f64 = 0.0;
        let mut k_star = None;
        for k in 1..=100_000 {
            cur = dsn_fixed(&cur, 1).unwrap();
            let err = cur.frobenius_distance(&limit).unwrap();
            if prev_err > 0.0 { c = c.max(err / prev_err); }
            prev_err = err;
            if err < eps { k_star = Some(k); break; }
        }
        let k_star = k_star.unwrap();
        let bound = ((eps / (theta * (x.frobenius_norm() + n as f64))).ln() / c.ln()).ceil() as usize;
        if k_star > bound { fails4 += 1; println!("  C4 violation: k*={k_star} bound={bound} c={c}"); }
    }
    println!("C4: fails={fails4} own-limit-vs-dykstra max={stall_vs_dyk:.2e} time={:.1}s", t0.elapsed().as_secs_f64());

    // --- Criterion 9: toy QAP ratio ---
    let t0 = Instant::now();
    let mut ok9 = 0;
    for seed in 0..50u64 {
        let g1 = gen_geometric(5, 50_000 + seed);
        let g2 = gen_geometric(5, 60_000 + seed);
        let p = MatchingProblem::new(g1, g2, 1.0).unwrap();
        let r = fram_match(&p, &FramConfig::default()).unwrap();
        let opt = fram_oracles_qap(&p);
        if r.objective >= 0.95 * opt { ok9 += 1; }
    }
    println!("C9: ok={ok9}/50 time={:.1}s", t0.elapsed().as_secs_f64());

    // --- Criterion 8: geo50 exact recovery, 10 seeds ---
    let t0 = Instant::now();
    let mut perfect = 0;
    for seed in 0..10u64 {
        let g = gen_geometric(50, seed);
        let pair = corrupt(&g, 0.0, seed).unwrap();
        let p = MatchingProblem::new(pair.g, pair.g_tilde, 1.0).unwrap();
        let r = fram_match(&p, &FramConfig::default()).unwrap();
        let m = fram_core::assignment::assignment_to_matrix(&r.assignment, 50);
        let acc = fram_core::metrics::node_accuracy(&m, &pair.p_true).unwrap();
        if acc == 1.0 {
            perfect += 1;
            assert_eq!(r.matching_error, 0.0, "metric identity");
        }
    }
    println!("C8: perfect={perfect}/10 time={:.1}s", t0.elapsed().as_secs_f64());

    // --- Timing probes for criteria 5 and 7 ---
    for (name, gen, n, p_edge, theta, noise) in [
        ("geo100", GeneratorKind::Geometric, 100usize, None, 2.0, 0.05),
        ("er200", GeneratorKind::ErdosRenyi, 200, Some(0.05), 10.0, 0.05),
    ] {
        let spec = InstanceSpec { generator: gen, n, p_edge, noise, seed: 0 };
        let g = spec_generate(&spec, 0);
        let pair = corrupt(&g, noise, 0).unwrap();
        let p = MatchingProblem::new(pair.g, pair.g_tilde, 1.0).unwrap();
        let cfg = FramConfig { theta, ..FramConfig::default() };
        let t0 = Instant::now();
        let r = fram_match(&p, &cfg).unwrap();
        let t_plain = t0.elapsed().as_secs_f64();
        let t0 = Instant::now();
        let rm = fram_mixed(&p, &cfg, &PrecisionPolicy::mixed()).unwrap();
        let t_mixed = t0.elapsed().as_secs_f64();
        let m1 = fram_core::assignment::assignment_to_matrix(&r.assignment, n);
        let acc = fram_core::metrics::node_accuracy(&m1, &pair.p_true).unwrap();
        let same = r.assignment.perm == rm.assignment.perm;
        let rel = (r.objective - rm.objective).abs() / (1.0 + r.objective.abs());
        println!("{name}: plain={t_plain:.2}s mixed={t_mixed:.2}s outer={} acc={acc:.3} same_perm={same} obj_rel={rel:.2e}", r.outer_iters);
        let cfg_d = FramConfig { theta, variant: Variant::Dspfp, ..FramConfig::default() };
        let t0 = Instant::now();
        let rd = fram_match(&p, &cfg_d).unwrap();
        let t_dspfp = t0.elapsed().as_secs_f64();
        let md = fram_core::assignment::assignment_to_matrix(&rd.assignment, n);
        let acc_d = fram_core::metrics::node_accuracy(&md, &pair.p_true).unwrap();
        println!("{name}: dspfp={t_dspfp:.2}s outer={} acc={acc_d:.3}", rd.outer_iters);
    }
}

fn spec_generate(spec: &InstanceSpec, seed: u64) -> fram_core::graph::AttributedGraph {
    match spec.generator {
        GeneratorKind::Geometric => gen_geometric(spec.n, seed),
        GeneratorKind::ErdosRenyi => gen_erdos_renyi(spec.n, spec.p_edge.unwrap(), seed),
    }
}

fn fram_oracles_qap(p: &MatchingProblem) -> f64 {
    // inline exhaustive objective max (probe only)
    let n = p.n();
    let mut best = f64::NEG_INFINITY;
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let m = fram_core::assignment::assignment_to_matrix(
            &fram_core::assignment::Assignment { perm: perm.clone(), score: 0.0 }, n);
        best = best.max(fram_core::graph::objective(p, &m).unwrap());
        if !next_perm(&mut perm) { break; }
    }
    best
}

fn next_perm(p: &mut [usize]) -> bool {
    let n = p.len();
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] { i -= 1; }
    if i == 0 { return false; }
    let mut j = n - 1;
    while p[j] <= p[i - 1] { j -= 1; }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
