//! Subcommand implementations.

use std::io::Write as _;
use std::path::Path;
use std::thread;

use anyhow::{Context, Result};
use mmulrv_core::encoding::{self, capacity, decode_r4, encode_r4, insn_directive};
use mmulrv_core::guest::kernels::{montmul_program, SYM_RESULT};
use mmulrv_core::guest::{build_named, default_config, FieldContext, GuestInputs, GuestProgram};
use mmulrv_core::isa::{self, RunOutcome, RunResult, StopCondition};
use mmulrv_core::machine::Machine;
use mmulrv_core::perf::{
    estimate_energy, interrupt_latency_report, partial_latency_bound, InterruptLatency, PowerModel,
};
use mmulrv_core::{Config, MachineConfig, RunStats};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::report::{
    column_label, latency_entries, outcome_label, CompareEntry, CompareReport, CompareRow, LatencySummary,
    RunReport, SweepSummary,
};
use crate::{
    CliError, CompareArgs, EncodeArgs, Format, MachineArgs, RunArgs, SelftestArgs, EXIT_BUDGET, EXIT_ERROR,
    EXIT_HALTED, EXIT_TRAP,
};

/// Operand lengths the MMUL unit can be built for.
const MAX_WORDS_RANGE: std::ops::RangeInclusive<usize> = 1..=encoding::R4_MAX_WORDS as usize;
/// Memory latencies above this are rejected as configuration mistakes.
const MAX_LATENCY: u32 = 64;

fn machine_config(program: &GuestProgram, m: &MachineArgs, rl: u32, wl: u32) -> Result<MachineConfig, CliError> {
    for (what, v) in [("read latency", rl), ("write latency", wl)] {
        if !(1..=MAX_LATENCY).contains(&v) {
            return Err(CliError::InvalidConfig(format!("{what} {v} outside 1..={MAX_LATENCY}")));
        }
    }
    let mut cfg = program.machine_config(rl, wl);
    if let Some(w) = m.words {
        if !MAX_WORDS_RANGE.contains(&w) {
            return Err(CliError::InvalidConfig(format!("max words {w} outside 1..={}", MAX_WORDS_RANGE.end())));
        }
        cfg.max_words = w;
    }
    Ok(cfg)
}

fn exit_code(o: &RunOutcome) -> u8 {
    match o {
        RunOutcome::Halted | RunOutcome::PcSentinel => EXIT_HALTED,
        RunOutcome::CycleBudgetExhausted => EXIT_BUDGET,
        RunOutcome::Trapped(_) => EXIT_TRAP,
    }
}

/// Worst outcome first: trap, then budget exhaustion, then clean stops.
fn severity(o: &RunOutcome) -> u8 {
    match o {
        RunOutcome::Trapped(_) => 2,
        RunOutcome::CycleBudgetExhausted => 1,
        _ => 0,
    }
}

fn result_hex(program: &GuestProgram, m: &Machine, outcome: &RunOutcome) -> Result<Option<String>> {
    if *outcome != RunOutcome::Halted || !program.symbols.contains_key(SYM_RESULT) {
        return Ok(None);
    }
    Ok(Some(format!("{:#x}", program.read_biguint(m, SYM_RESULT)?)))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn render<T: serde::Serialize>(value: &T, table: impl FnOnce() -> String, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(value)? + "\n",
        Format::Table => table(),
    })
}

/// Energy of `stats` relative to an uninterrupted BA run of the same guest,
/// re-run in-process with the same memory latencies.
fn normalized_energy(
    guest: &str,
    inputs: &GuestInputs,
    config: Config,
    stats: &RunStats,
    machine: &MachineConfig,
    reuse_as_reference: bool,
) -> Result<(f64, f64)> {
    let model = PowerModel::default();
    let reference = if config == Config::Ba && reuse_as_reference {
        stats.clone()
    } else {
        let ba = build_named(guest, Config::Ba, inputs)?;
        let cfg = MachineConfig { max_words: machine.max_words.max(ba.words), ..machine.clone() };
        let (_, r) = ba.execute(cfg, &StopCondition::default())?;
        anyhow::ensure!(r.outcome == RunOutcome::Halted, "BA reference run of `{guest}` ended with {:?}", r.outcome);
        r.stats
    };
    let e = estimate_energy(stats, &model, config, Some((&reference, Config::Ba)))?;
    Ok((e.avg_power_watts, e.normalized_energy))
}

pub fn run(args: &RunArgs) -> Result<u8> {
    let inputs = GuestInputs::from(&args.inputs);
    let requested = args.config.unwrap_or_else(|| default_config(&args.guest));
    let program = build_named(&args.guest, requested, &inputs)?;
    let (rl, wl) = (args.machine.read_latency, args.machine.write_latency);
    let cfg = machine_config(&program, &args.machine, rl, wl)?;
    let budget = args.machine.budget;
    let config = program.config;
    let bound = (config == Config::CiPe)
        .then(|| partial_latency_bound(program.words as u64, rl as u64, wl as u64, cfg.trap_entry_cycles));

    let (mut report, code) = if let Some(sweep) = args.sweep {
        let stop = StopCondition { cycle_budget: budget, ..Default::default() };
        let (m, base) = program.execute(cfg.clone(), &stop)?;
        let points = program.interrupt_sweep(&cfg, (sweep.start..sweep.end).step_by(sweep.step as usize), budget)?;
        let latencies: Vec<InterruptLatency> = points
            .iter()
            .filter_map(|p| {
                p.latency.map(|l| InterruptLatency { assert_cycle: p.assert_cycle, service_cycle: p.assert_cycle + l })
            })
            .collect();
        let base_result = program.symbols.contains_key(SYM_RESULT).then(|| program.read_symbol(&m, SYM_RESULT)).transpose()?;
        let consistent = points.iter().all(|p| p.outcome != RunOutcome::Halted || p.result == base_result);
        let worst = points.iter().map(|p| &p.outcome).chain([&base.outcome]).max_by_key(|o| severity(o)).cloned();
        let worst = worst.unwrap_or(base.outcome);
        let mut stats = base.stats.clone();
        stats.interrupt_latencies = latencies;
        let mut r = build_report(&args.guest, &program, &cfg, &inputs, &m, &RunResult { outcome: worst, stats }, false)?;
        r.latency_summary = interrupt_latency_report(&r_latencies(&r)).ok().map(|l| LatencySummary::new(&l, bound));
        r.sweep = Some(SweepSummary {
            start: sweep.start,
            end: sweep.end,
            step: sweep.step,
            runs: points.len(),
            serviced: r.interrupt_latencies.len(),
            results_consistent: consistent,
        });
        if !consistent {
            eprintln!("error: interrupted runs produced a different result than the uninterrupted run");
        }
        let code = if consistent { exit_code(&worst) } else { EXIT_ERROR };
        (r, code)
    } else {
        let stop = StopCondition { cycle_budget: budget, interrupts: args.irq.iter().map(|&c| (0, c)).collect(), ..Default::default() };
        let (m, result) = program.execute(cfg.clone(), &stop)?;
        let r = build_report(&args.guest, &program, &cfg, &inputs, &m, &result, args.irq.is_empty() && result.outcome == RunOutcome::Halted)?;
        (r, exit_code(&result.outcome))
    };
    if report.latency_summary.is_none() && !report.interrupt_latencies.is_empty() {
        report.latency_summary = interrupt_latency_report(&r_latencies(&report)).ok().map(|l| LatencySummary::new(&l, bound));
    }
    emit(&render(&report, || report.table(), args.format)?, args.out.as_deref())?;
    Ok(code)
}

fn r_latencies(r: &RunReport) -> Vec<InterruptLatency> {
    r.interrupt_latencies
        .iter()
        .map(|l| InterruptLatency { assert_cycle: l.assert_cycle, service_cycle: l.service_cycle })
        .collect()
}

fn build_report(
    guest: &str,
    program: &GuestProgram,
    cfg: &MachineConfig,
    inputs: &GuestInputs,
    m: &Machine,
    result: &RunResult,
    reuse_as_reference: bool,
) -> Result<RunReport> {
    let s = &result.stats;
    let (avg_power_watts, normalized_energy) =
        normalized_energy(guest, inputs, program.config, s, cfg, reuse_as_reference)?;
    Ok(RunReport {
        guest: guest.to_string(),
        config: program.config,
        outcome: outcome_label(&result.outcome),
        total_cycles: s.total_cycles,
        retired: s.retired_instructions,
        mem_reads: s.mem_reads,
        mem_writes: s.mem_writes,
        module_active_cycles: s.module_active_cycles,
        interrupt_latencies: latency_entries(s),
        avg_power_watts,
        normalized_energy,
        mmul_invocations: s.mmul_invocations,
        mmul_operations: s.mmul_operations,
        mmul_engine_cycles: s.mmul_engine_cycles,
        read_latency: cfg.read_latency_cycles,
        write_latency: cfg.write_latency_cycles,
        max_words: cfg.max_words,
        result: result_hex(program, m, &result.outcome)?,
        latency_summary: None,
        sweep: None,
    })
}

struct CompareRun {
    config: Config,
    rl: u32,
    wl: u32,
    result: RunResult,
    output: Option<Vec<u32>>,
}

pub fn compare(args: &CompareArgs) -> Result<u8> {
    let inputs = GuestInputs::from(&args.inputs);
    let mut jobs = vec![];
    for guest in &args.guest {
        for col in &args.configs {
            let program = build_named(guest, col.config, &inputs)?;
            let rl = col.read_latency.unwrap_or(args.machine.read_latency);
            let wl = col.write_latency.unwrap_or(args.machine.write_latency);
            let cfg = machine_config(&program, &args.machine, rl, wl)?;
            jobs.push((guest.clone(), program, cfg));
        }
    }
    // One machine per column; runs are independent and deterministic.
    let stop = StopCondition { cycle_budget: args.machine.budget, ..Default::default() };
    let runs: Vec<Result<CompareRun>> = thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(_, program, cfg)| {
                let stop = &stop;
                scope.spawn(move || -> Result<CompareRun> {
                    let (m, result) = program.execute(cfg.clone(), stop)?;
                    let output = (result.outcome == RunOutcome::Halted && program.symbols.contains_key(SYM_RESULT))
                        .then(|| program.read_symbol(&m, SYM_RESULT))
                        .transpose()?;
                    Ok(CompareRun {
                        config: program.config,
                        rl: cfg.read_latency_cycles,
                        wl: cfg.write_latency_cycles,
                        result,
                        output,
                    })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect()
    });
    let runs: Vec<CompareRun> = runs.into_iter().collect::<Result<_>>()?;

    let model = PowerModel::default();
    let mut rows = vec![];
    let mut code = EXIT_HALTED;
    for (guest, runs) in args.guest.iter().zip(runs.chunks(args.configs.len())) {
        let reference = &runs[0];
        let outputs: Vec<_> = runs.iter().filter_map(|r| r.output.as_ref()).collect();
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            return Err(CliError::MismatchedWorkloads(guest.clone()).into());
        }
        let mut entries = vec![];
        for r in runs {
            if exit_code(&r.result.outcome) != EXIT_HALTED && code == EXIT_HALTED {
                code = exit_code(&r.result.outcome);
            }
            let e = estimate_energy(&r.result.stats, &model, r.config, Some((&reference.result.stats, reference.config)))?;
            entries.push(CompareEntry {
                config: r.config,
                read_latency: r.rl,
                write_latency: r.wl,
                outcome: outcome_label(&r.result.outcome),
                total_cycles: r.result.stats.total_cycles,
                speedup: reference.result.stats.total_cycles as f64 / r.result.stats.total_cycles.max(1) as f64,
                avg_power_watts: e.avg_power_watts,
                normalized_energy: e.normalized_energy,
                latency_sensitivity: r.config == reference.config && (r.rl, r.wl) != (reference.rl, reference.wl),
            });
        }
        rows.push(CompareRow { guest: guest.clone(), entries });
    }
    let first = &runs[0];
    let report = CompareReport { reference: column_label(first.config, first.rl, first.wl), rows };
    emit(&render(&report, || report.table(), args.format)?, args.out.as_deref())?;
    Ok(code)
}

fn seed() -> Result<u64> {
    match std::env::var("MMULRV_SEED") {
        Ok(s) => s.trim().parse().with_context(|| format!("MMULRV_SEED=`{s}` is not an integer")),
        Err(_) => Ok(1),
    }
}

fn random_below(rng: &mut ChaCha8Rng, bound: &BigUint, words: usize) -> BigUint {
    let limbs: Vec<u32> = (0..words).map(|_| rng.gen()).collect();
    BigUint::from_slice(&limbs) % bound
}

/// Every configuration's guest multiply must match the host oracle.
pub fn selftest(args: &SelftestArgs) -> Result<u8> {
    let seed = seed()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    println!("seed {seed}");
    let mut failures = 0;
    for &words in &args.words {
        anyhow::ensure!(MAX_WORDS_RANGE.contains(&words), "operand length {words} outside 1..=32 words");
        let mut ok = 0;
        for _ in 0..args.vectors {
            let mut limbs: Vec<u32> = (0..words).map(|_| rng.gen()).collect();
            limbs[0] |= 1;
            limbs[words - 1] |= 1 << 31;
            let n = BigUint::from_slice(&limbs);
            let ctx = FieldContext::new(n.clone(), words)?;
            let (a, b) = (random_below(&mut rng, &n, words), random_below(&mut rng, &n, words));
            let want = ctx.montmul(&a, &b);
            for config in Config::ALL {
                let p = montmul_program(&ctx, config, &a, &b)?;
                let (m, r) = p.execute(p.machine_config(1, 1), &StopCondition::default())?;
                let got = if r.outcome == RunOutcome::Halted { Some(p.read_biguint(&m, SYM_RESULT)?) } else { None };
                let ops_ok = (r.stats.mmul_operations == 0) == (config == Config::Ba);
                if got.as_ref() == Some(&want) && ops_ok {
                    ok += 1;
                } else {
                    failures += 1;
                    println!(
                        "MISMATCH words={words} {config}: N={n:#x} A={a:#x} B={b:#x} want {want:#x} got {} ({:?})",
                        got.map(|g| format!("{g:#x}")).unwrap_or_else(|| "nothing".into()),
                        r.outcome
                    );
                }
            }
        }
        println!("words={words}: {ok}/{} guest multiplies match the oracle", 3 * args.vectors);
    }
    if failures > 0 {
        return Err(CliError::SelfTestFailed(failures).into());
    }
    println!("selftest passed");
    Ok(EXIT_HALTED)
}

pub fn encode(args: &EncodeArgs) -> Result<u8> {
    let word = match args.decode {
        Some(w) => w,
        None => encode_r4(args.rd, args.rs1, args.rs2, args.rs3, args.words)?,
    };
    let fields = decode_r4(word)?;
    let insn = isa::decode(word)?;
    let mut doc = json!({
        "word": format!("{word:#010x}"),
        "rd": fields.rd,
        "rs1": fields.rs1,
        "rs2": fields.rs2,
        "rs3": fields.rs3,
        "words": fields.words,
        "directive": insn_directive(&insn),
    });
    if args.capacity {
        use encoding::Format as Insn;
        let caps: Vec<_> = [(Insn::IType, 32), (Insn::RType, 32), (Insn::R4Type, 32), (Insn::R4Type, 64)]
            .into_iter()
            .map(|(f, xlen)| (xlen, capacity(f, xlen)))
            .collect();
        doc["capacity"] = json!(caps
            .iter()
            .map(|(xlen, c)| json!({"xlen": xlen, "format": c.format, "length_bits": c.length_bits_available,
                "length_unit": c.length_unit, "max_operand_bits": c.max_operand_bits}))
            .collect::<Vec<_>>());
    }
    let table = || {
        let mut s = format!(
            "word        {}\nfields      rd=x{} rs1=x{} rs2=x{} rs3=x{} words={}\ndirective   {}\n",
            doc["word"].as_str().unwrap_or_default(),
            fields.rd,
            fields.rs1,
            fields.rs2,
            fields.rs3,
            fields.words,
            insn_directive(&insn)
        );
        if let Some(caps) = doc["capacity"].as_array() {
            s.push_str("capacity    format  xlen  length bits  unit    max operand bits\n");
            for c in caps {
                s.push_str(&format!(
                    "            {:<7} {:>4}  {:>11}  {:<7} {:>16}\n",
                    c["format"].as_str().unwrap_or_default(),
                    c["xlen"].as_u64().unwrap_or_default(),
                    c["length_bits"].as_u64().unwrap_or_default(),
                    c["length_unit"].as_str().unwrap_or_default(),
                    c["max_operand_bits"].as_u64().unwrap_or_default()
                ));
            }
        }
        s
    };
    emit(&render(&doc, table, args.format)?, None)?;
    Ok(EXIT_HALTED)
}
