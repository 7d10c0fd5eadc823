//! Command bodies. Each returns its exit code together with the text bound
//! for standard output and standard error, so they can be tested without a
//! process.

use std::fmt::Write as _;
use std::io::Read as _;
use std::path::Path;

use mixcore::optimizer::general_threshold_at;
use mixcore::{generate_mixed, optimize_pair, peel, EdgeMix, Optimum, RetrievalError, RetrievalStructure, DEFAULT_EPS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::args::{
    FitArgs, Format, GenerateArgs, MixArgs, OptimizeArgs, PeelArgs, RetrievalArgs, SimulateArgs, TableArgs,
};
use crate::experiment::{emit_csv, estimate_threshold, parse_csv, run_sweep, SweepConfig};
use crate::formats::{read_edge_list, read_key_values, write_edge_list};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommandOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutcome {
    fn ok(stdout: String) -> Self {
        Self { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, msg: impl std::fmt::Display) -> Self {
        Self { code, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }

    fn usage(msg: impl std::fmt::Display) -> Self {
        Self::fail(EXIT_USAGE, msg)
    }

    fn numeric(msg: impl std::fmt::Display) -> Self {
        Self::fail(EXIT_NUMERIC, msg)
    }
}

fn round_to(x: f64, precision: usize) -> f64 {
    let scale = 10f64.powi(precision.min(15) as i32);
    (x * scale).round() / scale
}

fn read_input(path: &Path) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

fn check_pair(a: u32, b: u32) -> Result<(), CommandOutcome> {
    if a < 3 || b < a || b > mixcore::optimizer::MAX_EDGE_SIZE {
        return Err(CommandOutcome::usage(format!(
            "need 3 <= a <= b <= {}, got a={a} b={b}",
            mixcore::optimizer::MAX_EDGE_SIZE
        )));
    }
    Ok(())
}

fn optimum(a: u32, b: u32) -> Result<Optimum, CommandOutcome> {
    check_pair(a, b)?;
    optimize_pair(a, b, DEFAULT_EPS).map_err(CommandOutcome::numeric)
}

/// Optimal JSON record; numbers are rounded to `precision` places.
pub fn optimum_json(opt: &Optimum, precision: usize) -> serde_json::Value {
    let r = |x: f64| round_to(x, precision);
    json!({
        "a": opt.a,
        "b": opt.b,
        "case": opt.case_label.as_str(),
        "z_star": r(opt.z_star),
        "z_star_second": opt.z_star_second.map(r),
        "lambda_star": r(opt.lambda_star),
        "alpha_star": r(opt.alpha_star),
        "kbar": r(opt.avg_edge_size),
        "c_star": r(opt.c_star),
        "search_steps": opt.search_steps,
    })
}

pub fn cmd_optimize(args: &OptimizeArgs, precision: usize) -> CommandOutcome {
    let opt = match optimum(args.a, args.b) {
        Ok(o) => o,
        Err(e) => return e,
    };
    let p = precision;
    let stdout = match args.format {
        Format::Json => format!("{}\n", optimum_json(&opt, p)),
        Format::Text => {
            let mut s = format!("a={}\nb={}\ncase={}\n", opt.a, opt.b, opt.case_label.as_str());
            let _ = writeln!(s, "z*={:.p$}", opt.z_star);
            if let Some(z2) = opt.z_star_second {
                let _ = writeln!(s, "z**={z2:.p$}");
            }
            let _ = writeln!(s, "lambda*={:.p$}", opt.lambda_star);
            let _ = writeln!(s, "alpha*={:.p$}", opt.alpha_star);
            let _ = writeln!(s, "kbar={:.p$}", opt.avg_edge_size);
            let _ = writeln!(s, "c*={:.p$}", opt.c_star);
            s
        }
    };
    CommandOutcome::ok(stdout)
}

pub fn cmd_table(args: &TableArgs, precision: usize) -> CommandOutcome {
    if let Err(e) = check_pair(args.a, args.b_max) {
        return e;
    }
    let rows = match mixcore::table_scan(args.a, args.b_max) {
        Ok(r) => r,
        Err(e) => return CommandOutcome::numeric(e),
    };
    let p = precision;
    let mut s = String::from("b,z*,lambda*,alpha*,kbar,c*\n");
    for o in &rows {
        let _ = writeln!(
            s,
            "{},{:.p$},{:.p$},{:.p$},{:.p$},{:.p$}",
            o.b, o.z_star, o.lambda_star, o.alpha_star, o.avg_edge_size, o.c_star
        );
    }
    if let Some(best) = rows.iter().max_by(|x, y| x.c_star.total_cmp(&y.c_star)) {
        let _ = writeln!(s, "# max c*={:.p$} at b={}", best.c_star, best.b);
    }
    CommandOutcome::ok(s)
}

/// Resolves mix flags to a mixture and its theoretical threshold.
fn resolve_mix(m: &MixArgs) -> Result<(EdgeMix, f64), CommandOutcome> {
    let k2 = m.k2.unwrap_or(m.k1);
    check_pair(m.k1, k2)?;
    match m.alpha {
        None => {
            let opt = optimum(m.k1, k2)?;
            Ok((opt.mix().map_err(CommandOutcome::numeric)?, opt.c_star))
        }
        Some(alpha) => {
            let mix = EdgeMix::pair(m.k1, k2, alpha).map_err(CommandOutcome::usage)?;
            let (_, c) = general_threshold_at(&mix).map_err(CommandOutcome::numeric)?;
            Ok((mix, c))
        }
    }
}

pub fn cmd_simulate(args: &SimulateArgs, precision: usize) -> CommandOutcome {
    if args.trials == 0 {
        return CommandOutcome::usage("--trials must be at least 1");
    }
    if args.steps < 3 {
        return CommandOutcome::usage("--steps must be at least 3 for a fit");
    }
    let span = args.span.unwrap_or(if args.n <= 100_000 { 0.02 } else { 0.008 });
    if !(span.is_finite() && span > 0.0) {
        return CommandOutcome::usage("--span must be positive");
    }
    let (mix, center) = match resolve_mix(&args.mix) {
        Ok(x) => x,
        Err(e) => return e,
    };
    let config = SweepConfig {
        mix,
        n: args.n,
        densities: SweepConfig::centered(center, span, args.steps),
        trials_per_density: args.trials,
        base_seed: args.seed,
        parallelism: args.jobs,
    };
    let sweep = match run_sweep(&config) {
        Ok(s) => s,
        Err(e) => return CommandOutcome::usage(e),
    };
    let p = precision;
    let mut stderr = format!("theoretical c*={center:.p$}, sweep took {:.2?}\n", sweep.wall_time);
    match estimate_threshold(&sweep.records) {
        Ok(fit) => {
            let _ = writeln!(stderr, "fitted x={:.p$} (converged: {})", fit.x, fit.converged);
            CommandOutcome { code: EXIT_OK, stdout: emit_csv(&sweep.records, Some(&fit), args.seed), stderr }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: sigmoid fit failed: {e}");
            CommandOutcome { code: EXIT_NUMERIC, stdout: emit_csv(&sweep.records, None, args.seed), stderr }
        }
    }
}

pub fn cmd_fit(args: &FitArgs, precision: usize) -> CommandOutcome {
    let text = match read_input(&args.input) {
        Ok(t) => t,
        Err(e) => return CommandOutcome::usage(format!("{}: {e}", args.input.display())),
    };
    let csv = match parse_csv(&text) {
        Ok(c) => c,
        Err(e) => return CommandOutcome::usage(e),
    };
    match estimate_threshold(&csv.records) {
        Ok(fit) => CommandOutcome {
            code: EXIT_OK,
            stdout: emit_csv(&csv.records, Some(&fit), csv.seed.unwrap_or(0)),
            stderr: format!("fitted x={:.p$}\n", fit.x, p = precision),
        },
        Err(e) => CommandOutcome::numeric(format!("sigmoid fit failed: {e}")),
    }
}

pub fn cmd_generate(args: &GenerateArgs) -> CommandOutcome {
    let k2 = args.mix.k2.unwrap_or(args.mix.k1);
    if let Err(e) = check_pair(args.mix.k1, k2) {
        return e;
    }
    let mix = match args.mix.alpha {
        Some(alpha) => EdgeMix::pair(args.mix.k1, k2, alpha).map_err(CommandOutcome::usage),
        None => optimum(args.mix.k1, k2).and_then(|o| o.mix().map_err(CommandOutcome::numeric)),
    };
    let mix = match mix {
        Ok(m) => m,
        Err(e) => return e,
    };
    match generate_mixed(args.n, args.m, &mix, args.seed) {
        Ok(h) => CommandOutcome::ok(write_edge_list(&h)),
        Err(e) => CommandOutcome::usage(e),
    }
}

pub fn cmd_peel(args: &PeelArgs) -> CommandOutcome {
    let text = match read_input(&args.input) {
        Ok(t) => t,
        Err(e) => return CommandOutcome::usage(format!("{}: {e}", args.input.display())),
    };
    let h = match read_edge_list(&text) {
        Ok(h) => h,
        Err(e) => return CommandOutcome::usage(e),
    };
    let r = peel(&h);
    CommandOutcome::ok(format!(
        "nodes={}\nedges={}\ncore_nodes={}\ncore_edges={}\nempty_core={}\n",
        h.node_count(),
        h.edge_count(),
        r.core_node_count,
        r.core_edge_count,
        r.is_core_empty()
    ))
}

/// `m` distinct random keys (index prefix plus 8 random bytes) with random
/// `r`-bit values.
pub fn random_pairs(m: usize, r: u32, seed: u64) -> Vec<(Vec<u8>, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = if r >= 64 { u64::MAX } else { (1u64 << r) - 1 };
    (0..m as u64)
        .map(|i| {
            let mut key = i.to_le_bytes().to_vec();
            key.extend_from_slice(&rng.gen::<[u8; 8]>());
            (key, rng.gen::<u64>() & mask)
        })
        .collect()
}

/// Retry budget of the demo build.
pub const DEMO_RETRIES: u32 = 3;

pub fn cmd_retrieval_demo(args: &RetrievalArgs, precision: usize) -> CommandOutcome {
    if !(1..=64).contains(&args.r) {
        return CommandOutcome::usage("--r must lie in [1, 64]");
    }
    if !(args.c > 0.0 && args.c < 1.0) {
        return CommandOutcome::usage("--c must lie in (0, 1)");
    }
    let pairs = match &args.input {
        Some(path) => match read_input(path)
            .map_err(|e| e.to_string())
            .and_then(|t| read_key_values(&t).map_err(|e| e.to_string()))
        {
            Ok(p) => p,
            Err(e) => return CommandOutcome::usage(format!("{}: {e}", path.display())),
        },
        None => random_pairs(args.m, args.r, args.seed),
    };
    let mix = match optimum(3, 16).and_then(|o| o.mix().map_err(CommandOutcome::numeric)) {
        Ok(m) => m,
        Err(e) => return e,
    };
    let s = match RetrievalStructure::build(&pairs, args.c, &mix, args.r, args.seed, DEMO_RETRIES) {
        Ok(s) => s,
        Err(e @ RetrievalError::BuildFailed { .. }) => return CommandOutcome::numeric(e),
        Err(e) => return CommandOutcome::usage(e),
    };
    let verified = pairs.iter().filter(|(k, v)| s.query(k) == *v).count();
    let p = precision;
    let mut out = format!("m={}\nn={}\nr={}\nseed={}\n", s.key_count(), s.cell_count(), s.bits(), s.seed());
    let _ = writeln!(out, "verified {verified}/{}", pairs.len());
    match s.space_report() {
        Some((bits, overhead)) => {
            let _ = writeln!(out, "bits_per_key={bits:.p$}\noverhead={overhead:.p$}");
        }
        None => out.push_str("bits_per_key=n/a\noverhead=n/a\n"),
    }
    let mut outcome = CommandOutcome::ok(out);
    if let Some(path) = &args.output {
        if let Err(e) = std::fs::write(path, s.to_bytes()) {
            return CommandOutcome::usage(format!("{}: {e}", path.display()));
        }
    }
    if verified != pairs.len() {
        outcome.code = EXIT_NUMERIC;
        outcome.stderr = "error: some built keys returned wrong values\n".into();
    }
    outcome
}
