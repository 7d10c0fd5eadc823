//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::time::{Duration, Instant};

use mixcore::optimizer::table_scan;
use mixcore::{
    aux_f, aux_g, aux_g_deriv, aux_h, b_prime, general_threshold, generate_mixed, optimize_pair, peel, peel_with_order,
    special_points, threshold_t, CaseLabel, EdgeMix, Hypergraph, PeelOrder, RetrievalError, RetrievalStructure,
    DEFAULT_EPS,
};
use mixcore_cli::commands::{random_pairs, DEMO_RETRIES};
use mixcore_cli::experiment::{estimate_threshold, run_sweep, SweepConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const TABLE: &str = include_str!("data/optimal_pairs.csv");

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn grid_pairs() -> impl Iterator<Item = (u32, u32)> {
    (3..=6).flat_map(|a| (a + 1..=50).map(move |b| (a, b)))
}

fn golden_table() -> Outcome {
    const TOL: f64 = 1.5e-5;
    let start = Instant::now();
    let mut computed = Vec::new();
    for a in 3..=6 {
        computed.extend(table_scan(a, 50).map_err(|e| e.to_string())?);
    }
    let elapsed = start.elapsed();
    let mut rows = 0;
    let mut worst = 0.0f64;
    for line in TABLE.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let (a, b) = (f[0] as u32, f[1] as u32);
        let o = computed.iter().find(|o| o.a == a && o.b == b).ok_or_else(|| format!("({a},{b}) missing"))?;
        let got = [o.z_star, o.lambda_star, o.alpha_star, o.avg_edge_size, o.c_star];
        for (name, (g, want)) in ["z*", "lambda*", "alpha*", "kbar", "c*"].iter().zip(got.iter().zip(&f[2..])) {
            let d = (g - want).abs();
            worst = worst.max(d);
            check(d <= TOL, || format!("({a},{b}) {name}: {g:.7} vs {want}"))?;
        }
        rows += 1;
    }
    check(rows == 186 && computed.len() == 186, || format!("{rows} rows checked"))?;
    check(elapsed < Duration::from_secs(10), || format!("took {elapsed:.2?}"))?;
    Ok(format!("{rows} rows, max deviation {worst:.1e}, {elapsed:.2?}"))
}

fn headline_values() -> Outcome {
    let expected = [(3, 3, 0.81847), (3, 4, 0.82151), (3, 8, 0.85138), (3, 16, 0.91089), (3, 21, 0.92004)];
    for (a, b, c) in expected {
        let got = optimize_pair(a, b, DEFAULT_EPS).map_err(|e| e.to_string())?.c_star;
        check((got - c).abs() <= 2e-5, || format!("({a},{b}): {got:.6} vs {c}"))?;
    }
    let scan = table_scan(3, 50).map_err(|e| e.to_string())?;
    let best = scan.iter().max_by(|x, y| x.c_star.total_cmp(&y.c_star)).unwrap();
    check(best.b == 21, || format!("maximum at b={}", best.b))?;
    Ok(format!("5 values within 2e-5, maximum {:.5} at b=21", best.c_star))
}

fn b_prime_table() -> Outcome {
    let start = Instant::now();
    let expected = [(3, 16), (4, 29), (5, 45), (6, 62), (7, 79), (8, 98), (9, 117), (10, 137)];
    for (a, want) in expected {
        let got = b_prime(a).map_err(|e| e.to_string())?;
        check(got == want, || format!("b'({a}) = {got}, expected {want}"))?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(30), || format!("took {elapsed:.2?}"))?;
    Ok(format!("a = 3..10 exact, {elapsed:.2?}"))
}

fn cross_validation() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for a in 3..=30 {
        for b in a + 1..=30 {
            let opt = optimize_pair(a, b, DEFAULT_EPS).map_err(|e| e.to_string())?;
            let c = general_threshold(&opt.mix().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let d = (c - opt.c_star).abs();
            worst = worst.max(d);
            check(d < 1e-7, || format!("({a},{b}): {c} vs {}", opt.c_star))?;
            count += 1;
        }
    }
    Ok(format!("{count} pairs, max |diff| {worst:.1e}"))
}

fn property_suites() -> Outcome {
    let err = |e: mixcore::ThresholdError| e.to_string();
    const N: usize = 10_000;
    let grid = |lo: f64, hi: f64| (1..N).map(move |i| lo + (hi - lo) * i as f64 / N as f64);

    let mut prev = f64::INFINITY;
    for z in grid(0.0, 1.0) {
        let f = aux_f(z).map_err(err)?;
        check(f < prev && f > 1.0 - z, || format!("f fails at z={z}"))?;
        prev = f;
    }
    let mut pairs = 0;
    for (a, b) in grid_pairs() {
        let sp = special_points(a, b).map_err(err)?;
        let h_l = aux_h(sp.z_l, a, b).map_err(err)?;
        check((h_l - 1.0).abs() <= 1e-9, || format!("({a},{b}) h(z_l) = {h_l}"))?;
        check(aux_g(sp.z_l, a, b).map_err(err)? > 0.0, || format!("({a},{b}) g(z_l) <= 0"))?;
        check(aux_g(sp.z_r, a, b).map_err(err)? > 0.0, || format!("({a},{b}) g(z_r) <= 0"))?;
        for z in grid(0.0, sp.z_r) {
            if z < 1e-3 || sp.z_r - z < 1e-4 {
                continue;
            }
            let h = aux_h(z, a, b).map_err(err)?;
            if sp.z_l - z > 1e-6 {
                check(h < 1.0, || format!("({a},{b}) h >= 1 at z={z}"))?;
            } else if z - sp.z_l > 1e-6 {
                check(h > 1.0, || format!("({a},{b}) h <= 1 at z={z}"))?;
            }
            let g = aux_g(z, a, b).map_err(err)?;
            let d = 1e-7 * z;
            let slope = (aux_h(z + d, a, b).map_err(err)? - aux_h(z - d, a, b).map_err(err)?) / (2.0 * d);
            if g.abs() >= 1e-8 && slope.abs() >= 1e-6 {
                check((slope > 0.0) == (g > 0.0), || format!("({a},{b}) slope/g sign mismatch at z={z}"))?;
            }
        }
        let mut changes = 0;
        let mut last = None;
        for z in grid(0.0, 1.0) {
            let s = aux_g_deriv(z, a, b).map_err(err)? > 0.0;
            if last.is_some_and(|l| l != s) {
                changes += 1;
            }
            last = Some(s);
        }
        check(changes == 1, || format!("({a},{b}) dg/dz changes sign {changes} times"))?;
        pairs += 1;
    }
    Ok(format!("f on grid; h, g, dg/dz for {pairs} pairs"))
}

fn fixpoint_core(h: &Hypergraph) -> (Vec<bool>, Vec<bool>) {
    let mut node_live = vec![true; h.node_count()];
    let mut edge_live = vec![true; h.edge_count()];
    loop {
        let mut degree = vec![0usize; h.node_count()];
        for (e, nodes) in h.edges().enumerate() {
            if edge_live[e] {
                nodes.iter().for_each(|&v| degree[v as usize] += 1);
            }
        }
        let mut changed = false;
        for v in 0..h.node_count() {
            if node_live[v] && degree[v] <= 1 {
                node_live[v] = false;
                changed = true;
                if let Some(&e) = h.incident(v).iter().find(|&&e| edge_live[e as usize]) {
                    edge_live[e as usize] = false;
                }
            }
        }
        if !changed {
            return (node_live, edge_live);
        }
    }
}

fn peel_oracle() -> Outcome {
    let mut empty = 0;
    for i in 0..500u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0000 + i);
        let a = rng.gen_range(3..=4);
        let b = rng.gen_range(a..=9);
        let mix = EdgeMix::pair(a, b, rng.gen_range(0.5..=1.0)).unwrap();
        let h = generate_mixed(200, rng.gen_range(120..=190), &mix, rng.gen()).map_err(|e| e.to_string())?;
        let r = peel(&h);
        let (nodes, edges) = fixpoint_core(&h);
        check(r.node_in_core() == &nodes[..] && r.edge_in_core() == &edges[..], || {
            format!("instance {i}: queue peel differs from oracle")
        })?;
        for k in 0..10 {
            let o = peel_with_order(&h, PeelOrder::Random(i * 10 + k));
            check(o.node_in_core() == r.node_in_core() && o.edge_in_core() == r.edge_in_core(), || {
                format!("instance {i}: random order {k} gives another core")
            })?;
        }
        empty += r.is_core_empty() as usize;
    }
    Ok(format!("500 instances ({empty} with empty core), 10 random orders each"))
}

fn threshold_recovery() -> Outcome {
    let mut parts = Vec::new();
    for b in [4, 16] {
        let opt = optimize_pair(3, b, DEFAULT_EPS).map_err(|e| e.to_string())?;
        let config = SweepConfig {
            mix: opt.mix().map_err(|e| e.to_string())?,
            n: 100_000,
            densities: SweepConfig::centered(opt.c_star, 0.02, 9),
            trials_per_density: 100,
            base_seed: 1,
            parallelism: 0,
        };
        let sweep = run_sweep(&config).map_err(|e| e.to_string())?;
        let fit = estimate_threshold(&sweep.records).map_err(|e| e.to_string())?;
        let d = (fit.x - opt.c_star).abs();
        check(d <= 0.005, || format!("(3,{b}): x={:.5} vs c*={:.5}", fit.x, opt.c_star))?;
        check(sweep.wall_time < Duration::from_secs(300), || format!("(3,{b}) took {:.1?}", sweep.wall_time))?;
        parts.push(format!("(3,{b}) x={:.5} c*={:.5} in {:.1?}", fit.x, opt.c_star, sweep.wall_time));
    }
    Ok(parts.join("; "))
}

fn stationarity() -> Outcome {
    let t = |z: f64, a, b, alpha| threshold_t(z, a, b, alpha).map_err(|e| e.to_string());
    let d = 1e-6;
    let mut worst = 0.0f64;
    let mut worst_gap = 0.0f64;
    for (a, b) in grid_pairs() {
        let o = optimize_pair(a, b, DEFAULT_EPS).map_err(|e| e.to_string())?;
        let (z, al) = (o.z_star, o.alpha_star);
        let dz = |z: f64| -> Result<f64, String> { Ok((t(z + d, a, b, al)? - t(z - d, a, b, al)?) / (2.0 * d)) };
        match o.case_label {
            CaseLabel::DegenerateAlphaOne => {}
            CaseLabel::SaddlePoint => {
                let da = (t(z, a, b, al + d)? - t(z, a, b, al - d)?) / (2.0 * d);
                let g = dz(z)?.abs().max(da.abs());
                worst = worst.max(g);
                check(g < 1e-5, || format!("({a},{b}) gradient {g:.1e}"))?;
            }
            CaseLabel::BinarySearch => {
                let z2 = o.z_star_second.ok_or("missing second minimum")?;
                let g = dz(z)?.abs().max(dz(z2)?.abs());
                worst = worst.max(g);
                check(g < 1e-5, || format!("({a},{b}) dT/dz {g:.1e}"))?;
                let gap = (t(z, a, b, al)? - t(z2, a, b, al)?).abs();
                worst_gap = worst_gap.max(gap);
                check(gap < 1e-9, || format!("({a},{b}) |T(z*) - T(z**)| = {gap:.1e}"))?;
            }
        }
    }
    Ok(format!("max |grad| {worst:.1e}, max two-minima gap {worst_gap:.1e}"))
}

fn retrieval() -> Outcome {
    const M: usize = 10_000;
    const R: u32 = 16;
    let mix = optimize_pair(3, 16, DEFAULT_EPS).and_then(|o| Ok(o.mix()?)).map_err(|e| e.to_string())?;
    let (mut built, mut over_built, mut bits) = (0, 0, 0.0);
    for seed in 0..50u64 {
        let pairs = random_pairs(M, R, seed);
        match RetrievalStructure::build(&pairs, 0.906, &mix, R, seed, DEMO_RETRIES) {
            Ok(s) => {
                built += 1;
                let bad = pairs.iter().filter(|(k, v)| s.query(k) != *v).count();
                check(bad == 0, || format!("seed {seed}: {bad} wrong answers"))?;
                bits = s.space_report().unwrap().0;
            }
            Err(RetrievalError::BuildFailed { .. }) => {}
            Err(e) => return Err(e.to_string()),
        }
        match RetrievalStructure::build(&pairs, 0.95, &mix, R, seed, DEMO_RETRIES) {
            Ok(_) => over_built += 1,
            Err(RetrievalError::BuildFailed { .. }) => {}
            Err(e) => return Err(e.to_string()),
        }
    }
    let summary = format!(
        "c=0.906: {built}/50 built, all queries correct, bits_per_key={bits:.3}; c=0.95: {}/50 failed",
        50 - over_built
    );
    let target = 1.104 * R as f64;
    check(built > 0 && (bits - target).abs() <= 0.001 * R as f64, || format!("{summary}; bits off"))?;
    check(50 - over_built >= 45, || format!("{summary}; c=0.95 built too often"))?;
    if built < 45 {
        // same load with ten times the keys, to separate finite-size smearing from a defect
        let large = (0..10u64)
            .filter(|&seed| {
                RetrievalStructure::build(&random_pairs(10 * M, R, seed), 0.906, &mix, R, seed, DEMO_RETRIES).is_ok()
            })
            .count();
        return Err(format!("{summary}; need >= 45/50 builds at c=0.906 (m=10^5: {large}/10 built)"));
    }
    Ok(summary)
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("golden table", golden_table),
        ("headline values", headline_values),
        ("b' table", b_prime_table),
        ("cross-validation", cross_validation),
        ("property suites", property_suites),
        ("peeling oracle", peel_oracle),
        ("threshold recovery", threshold_recovery),
        ("stationarity", stationarity),
        ("retrieval", retrieval),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
