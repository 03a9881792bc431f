//! Guest program kit: a small program builder, Montgomery field constants,
//! and the benchmark kernels (software baseline, MMUL atomic and partial,
//! modexp, X25519 ladder, interrupt harness).

pub mod asm;
pub mod field;
pub mod kernels;
pub mod named;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigUint;
use thiserror::Error;

use crate::isa::{encode, run, DecodedInstruction, Op, RunResult, StopCondition};
use crate::machine::{Machine, MachineConfig, MachineError, MemError, DEFAULT_CODE_BASE, DEFAULT_DATA_BASE};

pub use field::FieldContext;
pub use kernels::GuestBuilder;
pub use named::{build_named, default_config, GuestInputs, GUEST_NAMES};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GuestError {
    #[error("modulus must be odd")]
    EvenModulus,
    #[error("modulus needs {bits} bits but only {words} words are available")]
    ModulusTooLarge { bits: u64, words: usize },
    #[error("operand length of {0} words is not supported")]
    WordsOutOfRange(usize),
    #[error("operand `{0}` does not fit its buffer")]
    OperandTooLarge(String),
    #[error("data region exhausted allocating `{0}`")]
    DataRegionFull(String),
    #[error("symbol `{0}` already allocated")]
    DuplicateSymbol(String),
    #[error("no symbol named `{0}`")]
    UnknownSymbol(String),
    #[error("no guest named `{0}`")]
    GuestNotFound(String),
    #[error("guest `{guest}` does not support {what}")]
    Unsupported { guest: String, what: String },
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Mem(#[from] MemError),
}

/// A data buffer in guest memory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Symbol {
    pub addr: u32,
    pub words: usize,
}

/// Bump allocator for the data region. Every buffer lies within ±2 KiB of
/// the `gp` value so kernels can address it with a single `addi`.
#[derive(Debug, Clone)]
pub struct DataLayout {
    gp: u32,
    next: u32,
    end: u32,
    symbols: BTreeMap<String, Symbol>,
}

impl DataLayout {
    pub fn new(data_base: u32) -> Self {
        Self { gp: data_base + 0x800, next: data_base, end: data_base + 0x1000, symbols: BTreeMap::new() }
    }

    pub fn gp(&self) -> u32 {
        self.gp
    }

    pub fn alloc(&mut self, name: &str, words: usize) -> Result<Symbol, GuestError> {
        if self.symbols.contains_key(name) {
            return Err(GuestError::DuplicateSymbol(name.to_string()));
        }
        let bytes = 4 * words as u32;
        if self.next + bytes > self.end {
            return Err(GuestError::DataRegionFull(name.to_string()));
        }
        let sym = Symbol { addr: self.next, words };
        self.next += bytes;
        self.symbols.insert(name.to_string(), sym);
        Ok(sym)
    }

    pub fn get(&self, name: &str) -> Result<Symbol, GuestError> {
        self.symbols.get(name).copied().ok_or_else(|| GuestError::UnknownSymbol(name.to_string()))
    }

    /// `gp`-relative offset of a symbol, always within `addi` range.
    pub fn offset(&self, name: &str) -> i32 {
        let sym = self.get(name).unwrap_or_else(|e| panic!("{e}"));
        sym.addr.wrapping_sub(self.gp) as i32
    }

    pub fn symbols(&self) -> &BTreeMap<String, Symbol> {
        &self.symbols
    }
}

/// A complete, immutable guest image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuestProgram {
    pub name: String,
    pub code_base: u32,
    pub entry: u32,
    pub code: Vec<u8>,
    pub listing: Vec<(u32, DecodedInstruction)>,
    pub labels: HashMap<String, u32>,
    pub symbols: BTreeMap<String, Symbol>,
    /// Initial contents of data symbols; everything else starts zeroed.
    pub data_init: Vec<(u32, Vec<u32>)>,
    /// Operand length used by field arithmetic, in words.
    pub words: usize,
    /// Configuration the arithmetic was emitted for.
    pub config: crate::perf::Config,
    /// The halt convention: `ecall` with this register holding zero.
    pub halt_reg: u8,
}

impl GuestProgram {
    pub fn instruction_count(&self) -> usize {
        self.listing.len()
    }

    pub fn mmul_count(&self) -> usize {
        self.listing.iter().filter(|(_, d)| d.op == Op::Mmul).count()
    }

    pub fn symbol(&self, name: &str) -> Result<Symbol, GuestError> {
        self.symbols.get(name).copied().ok_or_else(|| GuestError::UnknownSymbol(name.to_string()))
    }

    /// Machine configuration able to hold and run this program.
    pub fn machine_config(&self, read_latency: u32, write_latency: u32) -> MachineConfig {
        MachineConfig {
            read_latency_cycles: read_latency,
            write_latency_cycles: write_latency,
            max_words: self.words.max(MachineConfig::default().max_words),
            ..MachineConfig::default()
        }
    }

    pub fn load(&self, m: &mut Machine) -> Result<(), GuestError> {
        m.mem.load_image(self.code_base, &self.code)?;
        for (addr, words) in &self.data_init {
            m.mem.write_words(*addr, words)?;
        }
        m.pc = self.entry;
        Ok(())
    }

    pub fn read_symbol(&self, m: &Machine, name: &str) -> Result<Vec<u32>, GuestError> {
        let sym = self.symbol(name)?;
        Ok(m.mem.read_words(sym.addr, sym.words)?)
    }

    pub fn read_biguint(&self, m: &Machine, name: &str) -> Result<BigUint, GuestError> {
        Ok(field::from_words(&self.read_symbol(m, name)?))
    }

    /// Builds a fresh machine, loads the program and runs it.
    pub fn execute(&self, config: MachineConfig, stop: &StopCondition) -> Result<(Machine, RunResult), GuestError> {
        let mut m = Machine::new(config);
        self.load(&mut m)?;
        let r = run(&mut m, stop);
        Ok((m, r))
    }

    /// Runs once per assert cycle, each time on a fresh machine with a single
    /// interrupt on line 0.
    pub fn interrupt_sweep(
        &self,
        config: &MachineConfig,
        assert_cycles: impl IntoIterator<Item = u64>,
        cycle_budget: Option<u64>,
    ) -> Result<Vec<SweepPoint>, GuestError> {
        assert_cycles
            .into_iter()
            .map(|at| {
                let stop = StopCondition { cycle_budget, interrupts: vec![(0, at)], ..Default::default() };
                let (m, r) = self.execute(config.clone(), &stop)?;
                Ok(SweepPoint {
                    assert_cycle: at,
                    latency: r.stats.interrupt_latencies.first().map(|l| l.latency()),
                    outcome: r.outcome,
                    result: self.symbols.contains_key(kernels::SYM_RESULT).then(|| self.read_symbol(&m, kernels::SYM_RESULT)).transpose()?,
                    total_cycles: r.stats.total_cycles,
                })
            })
            .collect()
    }

    /// Listing in assembler-like syntax.
    pub fn dump(&self) -> String {
        let rev: BTreeMap<u32, &str> = self.labels.iter().map(|(k, v)| (*v, k.as_str())).collect();
        let mut out = String::new();
        for (addr, d) in &self.listing {
            if let Some(l) = rev.get(addr) {
                let _ = writeln!(out, "{l}:");
            }
            let word = if d.compressed {
                format!("    {:04x}", crate::isa::compress(d).unwrap_or(0))
            } else {
                format!("{:08x}", encode(d))
            };
            let _ = writeln!(out, "  {addr:08x}:  {word}  {}", d.disassemble());
        }
        for (name, sym) in &self.symbols {
            let _ = writeln!(out, "# {name} @ {:#010x} [{} words]", sym.addr, sym.words);
        }
        out
    }
}

/// One run of an interrupt sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepPoint {
    pub assert_cycle: u64,
    /// `None` when the program halted before the interrupt was taken.
    pub latency: Option<u64>,
    pub outcome: crate::isa::RunOutcome,
    pub result: Option<Vec<u32>>,
    pub total_cycles: u64,
}

pub(crate) const CODE_BASE: u32 = DEFAULT_CODE_BASE;
pub(crate) const DATA_BASE: u32 = DEFAULT_DATA_BASE;
