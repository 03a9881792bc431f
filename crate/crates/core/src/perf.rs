//! Activity accounting and the normalized-energy estimator.
//!
//! Each retired instruction marks the modules it used as active for one
//! cycle; the MMUL unit is active for its compute cycles. A module's duty
//! factor is its active cycles over the run's total cycles, and its dynamic
//! power is scaled linearly by that factor. This is a desk-scale activity
//! proxy, not a power measurement.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Module {
    Fetch,
    Decode,
    Alu,
    Regfile,
    Mmul,
}

impl Module {
    pub const ALL: [Module; 5] = [Module::Fetch, Module::Decode, Module::Alu, Module::Regfile, Module::Mmul];
}

/// Processor configuration under which a workload runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Config {
    /// Base architecture, software-only arithmetic.
    #[serde(rename = "BA")]
    Ba,
    /// MMUL with atomic execution.
    #[serde(rename = "CI-AE")]
    CiAe,
    /// MMUL with partial execution.
    #[serde(rename = "CI-PE")]
    CiPe,
}

impl Config {
    pub const ALL: [Config; 3] = [Config::Ba, Config::CiAe, Config::CiPe];

    pub fn as_str(self) -> &'static str {
        match self {
            Config::Ba => "BA",
            Config::CiAe => "CI-AE",
            Config::CiPe => "CI-PE",
        }
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown configuration `{0}` (expected BA, CI-AE or CI-PE)")]
pub struct ParseConfigError(String);

impl FromStr for Config {
    type Err = ParseConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('_', "-").as_str() {
            "BA" => Ok(Config::Ba),
            "CI-AE" | "CIAE" => Ok(Config::CiAe),
            "CI-PE" | "CIPE" => Ok(Config::CiPe),
            _ => Err(ParseConfigError(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ModuleCycles {
    pub fetch: u64,
    pub decode: u64,
    pub alu: u64,
    pub regfile: u64,
    pub mmul: u64,
}

impl ModuleCycles {
    pub fn get(&self, m: Module) -> u64 {
        match m {
            Module::Fetch => self.fetch,
            Module::Decode => self.decode,
            Module::Alu => self.alu,
            Module::Regfile => self.regfile,
            Module::Mmul => self.mmul,
        }
    }

    fn get_mut(&mut self, m: Module) -> &mut u64 {
        match m {
            Module::Fetch => &mut self.fetch,
            Module::Decode => &mut self.decode,
            Module::Alu => &mut self.alu,
            Module::Regfile => &mut self.regfile,
            Module::Mmul => &mut self.mmul,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterruptLatency {
    pub assert_cycle: u64,
    pub service_cycle: u64,
}

impl InterruptLatency {
    pub fn latency(&self) -> u64 {
        self.service_cycle - self.assert_cycle
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RunStats {
    pub total_cycles: u64,
    pub retired_instructions: u64,
    pub mem_reads: u64,
    pub mem_writes: u64,
    pub module_active_cycles: ModuleCycles,
    pub interrupt_latencies: Vec<InterruptLatency>,
    /// MMUL instructions retired (one per call in partial mode).
    pub mmul_invocations: u64,
    /// Completed Montgomery multiplications.
    pub mmul_operations: u64,
    /// Cycles the engine held the core, memory accesses included.
    pub mmul_engine_cycles: u64,
}

impl RunStats {
    pub fn record_activity(&mut self, module: Module, cycles: u64) {
        *self.module_active_cycles.get_mut(module) += cycles;
    }

    pub fn duty(&self, module: Module) -> f64 {
        if self.total_cycles == 0 {
            0.0
        } else {
            self.module_active_cycles.get(module) as f64 / self.total_cycles as f64
        }
    }
}

/// Power figures per configuration. `dynamic_watts` is the per-module
/// breakdown; `dynamic_total_watts` is the measured dynamic total, which is
/// larger than the breakdown's sum for every configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerModel {
    pub static_watts: BTreeMap<Config, f64>,
    pub dynamic_total_watts: BTreeMap<Config, f64>,
    pub dynamic_watts: BTreeMap<Config, BTreeMap<Module, f64>>,
}

impl Default for PowerModel {
    fn default() -> Self {
        let per_module = |fetch, decode, alu, regfile, mmul| {
            BTreeMap::from([
                (Module::Fetch, fetch),
                (Module::Decode, decode),
                (Module::Alu, alu),
                (Module::Regfile, regfile),
                (Module::Mmul, mmul),
            ])
        };
        Self {
            static_watts: BTreeMap::from([(Config::Ba, 0.107), (Config::CiAe, 0.105), (Config::CiPe, 0.106)]),
            dynamic_total_watts: BTreeMap::from([(Config::Ba, 0.154), (Config::CiAe, 0.064), (Config::CiPe, 0.120)]),
            dynamic_watts: BTreeMap::from([
                (Config::Ba, per_module(0.058, 0.014, 0.031, 0.012, 0.0)),
                (Config::CiAe, per_module(0.002, 0.001, 0.001, 0.002, 0.054)),
                (Config::CiPe, per_module(0.026, 0.006, 0.008, 0.003, 0.053)),
            ]),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("no BA reference run supplied for normalization")]
    MissingReferenceRun,
    #[error("power model has no entry for {0}")]
    MissingConfig(Config),
    #[error("power model has a negative entry for {0}")]
    NegativePower(Config),
    #[error("run has zero cycles")]
    EmptyRun,
}

impl PowerModel {
    pub fn static_power(&self, c: Config) -> f64 {
        self.static_watts.get(&c).copied().unwrap_or(0.0)
    }

    pub fn module_power(&self, c: Config, m: Module) -> f64 {
        self.dynamic_watts.get(&c).and_then(|t| t.get(&m)).copied().unwrap_or(0.0)
    }

    pub fn attributed_dynamic(&self, c: Config) -> f64 {
        Module::ALL.iter().map(|m| self.module_power(c, *m)).sum()
    }

    /// Factor that lifts the per-module breakdown to the measured dynamic
    /// total; power not attributed to a listed module is spread in proportion
    /// to the attributed power.
    pub fn calibration(&self, c: Config) -> f64 {
        let attributed = self.attributed_dynamic(c);
        match self.dynamic_total_watts.get(&c) {
            Some(total) if attributed > 0.0 => total / attributed,
            _ => 1.0,
        }
    }

    /// Total power with every module at full duty.
    pub fn full_duty_total(&self, c: Config) -> f64 {
        self.static_power(c) + self.attributed_dynamic(c) * self.calibration(c)
    }

    fn validate(&self, c: Config) -> Result<(), EnergyError> {
        if !self.static_watts.contains_key(&c) || !self.dynamic_watts.contains_key(&c) {
            return Err(EnergyError::MissingConfig(c));
        }
        let negative = self.static_power(c) < 0.0
            || self.dynamic_total_watts.get(&c).is_some_and(|v| *v < 0.0)
            || Module::ALL.iter().any(|m| self.module_power(c, *m) < 0.0);
        if negative {
            return Err(EnergyError::NegativePower(c));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerEstimate {
    /// Static plus calibrated dynamic power.
    pub avg_power_watts: f64,
    /// Static plus the uncalibrated per-module dynamic power.
    pub attributed_power_watts: f64,
    pub avg_dynamic_watts: f64,
    /// Average power times total cycles (watt-cycles).
    pub energy: f64,
}

pub fn estimate_power(stats: &RunStats, model: &PowerModel, config: Config) -> Result<PowerEstimate, EnergyError> {
    model.validate(config)?;
    if stats.total_cycles == 0 {
        return Err(EnergyError::EmptyRun);
    }
    let attributed: f64 = Module::ALL
        .iter()
        .map(|m| model.module_power(config, *m) * stats.duty(*m))
        .sum();
    let dynamic = attributed * model.calibration(config);
    let avg = model.static_power(config) + dynamic;
    Ok(PowerEstimate {
        avg_power_watts: avg,
        attributed_power_watts: model.static_power(config) + attributed,
        avg_dynamic_watts: dynamic,
        energy: avg * stats.total_cycles as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyEstimate {
    pub avg_power_watts: f64,
    pub energy: f64,
    pub normalized_energy: f64,
}

/// Energy of `stats` under `config`, normalized by the energy of a reference
/// run (normally the BA run of the same workload) under its own configuration.
pub fn estimate_energy(
    stats: &RunStats,
    model: &PowerModel,
    config: Config,
    reference: Option<(&RunStats, Config)>,
) -> Result<EnergyEstimate, EnergyError> {
    let (ref_stats, ref_config) = reference.ok_or(EnergyError::MissingReferenceRun)?;
    let own = estimate_power(stats, model, config)?;
    let base = estimate_power(ref_stats, model, ref_config)?;
    Ok(EnergyEstimate {
        avg_power_watts: own.avg_power_watts,
        energy: own.energy,
        normalized_energy: own.energy / base.energy,
    })
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("no interrupts were recorded")]
pub struct NoInterruptsRecorded;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatencyReport {
    pub count: usize,
    pub min: u64,
    pub max: u64,
    pub mean: f64,
    /// Latency in cycles mapped to the number of interrupts that saw it.
    pub histogram: BTreeMap<u64, u64>,
}

/// Longest single partial-mode call: the first (operand loads) or the last
/// (result stores).
pub fn partial_call_bound(words: u64, read_latency: u64, write_latency: u64) -> u64 {
    (3 * words * read_latency + 2).max(words * write_latency + 3)
}

/// Fixed cost on top of the engine occupancy before an interrupt is serviced:
/// fetching the MMUL instruction itself plus trap entry.
pub fn dispatch_overhead(read_latency: u64, trap_entry_cycles: u64) -> u64 {
    read_latency + trap_entry_cycles
}

/// Worst-case interrupt latency while a partial-mode sequence runs.
pub fn partial_latency_bound(words: u64, read_latency: u64, write_latency: u64, trap_entry_cycles: u64) -> u64 {
    partial_call_bound(words, read_latency, write_latency) + dispatch_overhead(read_latency, trap_entry_cycles)
}

pub fn interrupt_latency_report(latencies: &[InterruptLatency]) -> Result<LatencyReport, NoInterruptsRecorded> {
    if latencies.is_empty() {
        return Err(NoInterruptsRecorded);
    }
    let mut histogram = BTreeMap::new();
    for l in latencies {
        *histogram.entry(l.latency()).or_insert(0) += 1;
    }
    let sum: u64 = latencies.iter().map(InterruptLatency::latency).sum();
    Ok(LatencyReport {
        count: latencies.len(),
        min: *histogram.keys().next().expect("non-empty"),
        max: *histogram.keys().next_back().expect("non-empty"),
        mean: sum as f64 / latencies.len() as f64,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_duty(cycles: u64) -> RunStats {
        RunStats {
            total_cycles: cycles,
            module_active_cycles: ModuleCycles {
                fetch: cycles,
                decode: cycles,
                alu: cycles,
                regfile: cycles,
                mmul: cycles,
            },
            ..Default::default()
        }
    }

    #[test]
    fn defaults_reproduce_power_tables() {
        let m = PowerModel::default();
        assert!((m.full_duty_total(Config::Ba) - 0.261).abs() <= 0.001 + 1e-9);
        assert!((m.full_duty_total(Config::CiAe) - 0.170).abs() <= 0.001 + 1e-9);
        assert!((m.full_duty_total(Config::CiPe) - 0.226).abs() <= 0.001 + 1e-9);
        assert_eq!(m.module_power(Config::CiAe, Module::Mmul), 0.054);
        assert_eq!(m.module_power(Config::Ba, Module::Mmul), 0.0);
    }

    #[test]
    fn latency_bound_formula() {
        assert_eq!(partial_call_bound(8, 1, 1), 26);
        assert_eq!(partial_call_bound(1, 1, 10), 13);
        assert_eq!(partial_latency_bound(8, 1, 1, 3), 30);
    }

    #[test]
    fn full_duty_ba() {
        let p = estimate_power(&full_duty(1000), &PowerModel::default(), Config::Ba).unwrap();
        assert!((p.attributed_power_watts - 0.222).abs() < 1e-9);
        assert!((p.avg_power_watts - 0.261).abs() < 1e-9);
    }

    #[test]
    fn self_normalization() {
        let s = full_duty(500);
        let m = PowerModel::default();
        for c in Config::ALL {
            let e = estimate_energy(&s, &m, c, Some((&s, c))).unwrap();
            assert!((e.normalized_energy - 1.0).abs() < 1e-12);
        }
        assert_eq!(estimate_energy(&s, &m, Config::Ba, None), Err(EnergyError::MissingReferenceRun));
    }

    #[test]
    fn negative_powers_rejected() {
        let mut m = PowerModel::default();
        m.dynamic_watts.get_mut(&Config::Ba).unwrap().insert(Module::Alu, -1.0);
        assert_eq!(
            estimate_power(&full_duty(1), &m, Config::Ba),
            Err(EnergyError::NegativePower(Config::Ba))
        );
    }

    #[test]
    fn activity_is_monotone() {
        let mut s = RunStats::default();
        s.record_activity(Module::Mmul, 257);
        s.record_activity(Module::Mmul, 0);
        assert_eq!(s.module_active_cycles.mmul, 257);
    }

    #[test]
    fn latency_summary() {
        let l = [
            InterruptLatency { assert_cycle: 10, service_cycle: 13 },
            InterruptLatency { assert_cycle: 20, service_cycle: 29 },
            InterruptLatency { assert_cycle: 30, service_cycle: 33 },
        ];
        let r = interrupt_latency_report(&l).unwrap();
        assert_eq!((r.count, r.min, r.max), (3, 3, 9));
        assert!((r.mean - 5.0).abs() < 1e-12);
        assert_eq!(r.histogram, BTreeMap::from([(3, 2), (9, 1)]));
        assert_eq!(interrupt_latency_report(&[]), Err(NoInterruptsRecorded));
    }

    #[test]
    fn config_parsing() {
        assert_eq!("ci-ae".parse::<Config>(), Ok(Config::CiAe));
        assert_eq!("CI_PE".parse::<Config>(), Ok(Config::CiPe));
        assert!("XX".parse::<Config>().is_err());
        assert_eq!(Config::CiAe.to_string(), "CI-AE");
    }
}
