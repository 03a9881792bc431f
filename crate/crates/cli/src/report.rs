//! Report documents. Field names of [`RunReport`] are a stable contract.

use std::fmt::Write as _;

use mmulrv_core::isa::RunOutcome;
use mmulrv_core::perf::{LatencyReport, ModuleCycles};
use mmulrv_core::{Config, RunStats};
use serde::Serialize;

/// The fields every `run` report carries.
#[cfg(test)]
pub const RUN_REPORT_FIELDS: [&str; 18] = [
    "guest",
    "config",
    "outcome",
    "total_cycles",
    "retired",
    "mem_reads",
    "mem_writes",
    "module_active_cycles",
    "interrupt_latencies",
    "avg_power_watts",
    "normalized_energy",
    "mmul_invocations",
    "mmul_operations",
    "mmul_engine_cycles",
    "read_latency",
    "write_latency",
    "max_words",
    "result",
];

#[derive(Debug, Clone, Serialize)]
pub struct LatencyEntry {
    pub assert_cycle: u64,
    pub service_cycle: u64,
    pub latency: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LatencySummary {
    pub count: usize,
    pub min: u64,
    pub max: u64,
    pub mean: f64,
    /// Worst-case latency guaranteed by partial execution; `null` otherwise.
    pub bound: Option<u64>,
}

impl LatencySummary {
    pub fn new(r: &LatencyReport, bound: Option<u64>) -> Self {
        Self { count: r.count, min: r.min, max: r.max, mean: r.mean, bound }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummary {
    pub start: u64,
    pub end: u64,
    pub step: u64,
    pub runs: usize,
    /// Runs whose interrupt was taken before the guest halted.
    pub serviced: usize,
    /// Every run produced the same result as the uninterrupted run.
    pub results_consistent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub guest: String,
    pub config: Config,
    pub outcome: String,
    pub total_cycles: u64,
    pub retired: u64,
    pub mem_reads: u64,
    pub mem_writes: u64,
    pub module_active_cycles: ModuleCycles,
    pub interrupt_latencies: Vec<LatencyEntry>,
    pub avg_power_watts: f64,
    /// Energy relative to the BA run of the same guest and inputs.
    pub normalized_energy: f64,
    pub mmul_invocations: u64,
    pub mmul_operations: u64,
    pub mmul_engine_cycles: u64,
    pub read_latency: u32,
    pub write_latency: u32,
    pub max_words: usize,
    /// Guest output as hex, when the guest has one and halted.
    pub result: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub latency_summary: Option<LatencySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSummary>,
}

pub fn outcome_label(o: &RunOutcome) -> String {
    match o {
        RunOutcome::Halted => "halted".into(),
        RunOutcome::PcSentinel => "pc_sentinel".into(),
        RunOutcome::CycleBudgetExhausted => "cycle_budget_exhausted".into(),
        RunOutcome::Trapped(t) => format!("trap:{:?}@{:#x}", t.cause, t.tval),
    }
}

pub fn latency_entries(stats: &RunStats) -> Vec<LatencyEntry> {
    stats
        .interrupt_latencies
        .iter()
        .map(|l| LatencyEntry { assert_cycle: l.assert_cycle, service_cycle: l.service_cycle, latency: l.latency() })
        .collect()
}

impl RunReport {
    pub fn table(&self) -> String {
        let mut s = String::new();
        let m = &self.module_active_cycles;
        let duty = |c: u64| if self.total_cycles == 0 { 0.0 } else { c as f64 / self.total_cycles as f64 };
        let _ = writeln!(s, "guest            {}", self.guest);
        let _ = writeln!(
            s,
            "config           {} (read latency {}, write latency {}, max words {})",
            self.config, self.read_latency, self.write_latency, self.max_words
        );
        let _ = writeln!(s, "outcome          {}", self.outcome);
        let _ = writeln!(s, "cycles           {}", self.total_cycles);
        let _ = writeln!(s, "retired          {}", self.retired);
        let _ = writeln!(s, "memory           {} reads, {} writes", self.mem_reads, self.mem_writes);
        let _ = writeln!(
            s,
            "mmul             {} invocations, {} operations, {} engine cycles",
            self.mmul_invocations, self.mmul_operations, self.mmul_engine_cycles
        );
        let _ = writeln!(
            s,
            "duty             fetch {:.3}  decode {:.3}  alu {:.3}  regfile {:.3}  mmul {:.3}",
            duty(m.fetch),
            duty(m.decode),
            duty(m.alu),
            duty(m.regfile),
            duty(m.mmul)
        );
        let _ = writeln!(s, "avg power        {:.4} W", self.avg_power_watts);
        let _ = writeln!(s, "energy vs BA     {:.4}", self.normalized_energy);
        if let Some(l) = &self.latency_summary {
            let bound = l.bound.map(|b| format!(", bound {b}")).unwrap_or_default();
            let _ = writeln!(
                s,
                "irq latency      {} serviced, min {}, max {}, mean {:.1}{bound}",
                l.count, l.min, l.max, l.mean
            );
        }
        if let Some(w) = &self.sweep {
            let _ = writeln!(
                s,
                "sweep            {}:{}:{} -> {} runs, {} serviced, results {}",
                w.start,
                w.end,
                w.step,
                w.runs,
                w.serviced,
                if w.results_consistent { "consistent" } else { "DIFFER" }
            );
        }
        if let Some(r) = &self.result {
            let _ = writeln!(s, "result           {r}");
        }
        s
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareEntry {
    pub config: Config,
    pub read_latency: u32,
    pub write_latency: u32,
    pub outcome: String,
    pub total_cycles: u64,
    /// Reference cycles over this column's cycles.
    pub speedup: f64,
    pub avg_power_watts: f64,
    /// Energy relative to the reference column.
    pub normalized_energy: f64,
    /// Same configuration as the reference with different memory latencies.
    pub latency_sensitivity: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub guest: String,
    pub entries: Vec<CompareEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub reference: String,
    pub rows: Vec<CompareRow>,
}

pub fn column_label(config: Config, rl: u32, wl: u32) -> String {
    if (rl, wl) == (1, 1) {
        config.to_string()
    } else {
        format!("{config}@{rl}/{wl}")
    }
}

impl CompareReport {
    /// Rows are guests, columns are configurations; each cell shows cycles,
    /// speedup and normalized energy.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let Some(first) = self.rows.first() else { return s };
        let labels: Vec<String> = first
            .entries
            .iter()
            .map(|e| {
                let l = column_label(e.config, e.read_latency, e.write_latency);
                if e.latency_sensitivity {
                    format!("{l} (latency)")
                } else {
                    l
                }
            })
            .collect();
        let _ = writeln!(s, "reference: {}", self.reference);
        let _ = write!(s, "{:<16}", "guest");
        for l in &labels {
            let _ = write!(s, " | {l:>32}");
        }
        let _ = writeln!(s);
        let _ = write!(s, "{:<16}", "");
        for _ in &labels {
            let _ = write!(s, " | {:>12} {:>9} {:>9}", "cycles", "speedup", "energy");
        }
        let _ = writeln!(s);
        for row in &self.rows {
            let _ = write!(s, "{:<16}", row.guest);
            for e in &row.entries {
                let _ = write!(s, " | {:>12} {:>8.2}x {:>9.4}", e.total_cycles, e.speedup, e.normalized_energy);
            }
            let _ = writeln!(s);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_serializes_contract_fields_in_order() {
        let r = RunReport {
            guest: "g".into(),
            config: Config::CiAe,
            outcome: "halted".into(),
            total_cycles: 10,
            retired: 5,
            mem_reads: 1,
            mem_writes: 2,
            module_active_cycles: ModuleCycles::default(),
            interrupt_latencies: vec![],
            avg_power_watts: 0.2,
            normalized_energy: 0.5,
            mmul_invocations: 1,
            mmul_operations: 1,
            mmul_engine_cycles: 3,
            read_latency: 1,
            write_latency: 1,
            max_words: 8,
            result: None,
            latency_summary: None,
            sweep: None,
        };
        let v = serde_json::to_value(&r).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        let mut want = RUN_REPORT_FIELDS.to_vec();
        want.sort_unstable();
        let mut got = keys.clone();
        got.sort_unstable();
        assert_eq!(got, want);
        assert_eq!(v["config"], "CI-AE");
        assert!(r.table().contains("energy vs BA     0.5000"));
    }

    #[test]
    fn labels() {
        assert_eq!(column_label(Config::Ba, 1, 1), "BA");
        assert_eq!(column_label(Config::CiPe, 3, 2), "CI-PE@3/2");
        assert_eq!(outcome_label(&RunOutcome::CycleBudgetExhausted), "cycle_budget_exhausted");
    }
}
