//! Fetch/decode/execute loop and timing model of the two-stage core.
//!
//! Timing: every retired instruction costs one cycle, plus the configured
//! penalty for taken branches and jumps, plus memory wait-states beyond the
//! first cycle of the fetch and of any data access. An MMUL instruction adds
//! the engine's cycles (compute and every engine memory access at full
//! latency). Trap entry costs a fixed number of cycles.
//!
//! Interrupts are sampled at instruction boundaries only, so an atomic MMUL
//! delays any interrupt until it retires.

use serde::Serialize;

use super::{decode, DecodedInstruction, Op};
use crate::engine::{self, CallKind, MmulError, MmulOperands};
use crate::machine::{CsrOp, Machine, MemError, MSTATUS_MIE, MSTATUS_MPIE};
use crate::perf::{InterruptLatency, Module, RunStats};

/// `ecall` with this register equal to zero halts the simulation (a5; RV32E
/// has no a7).
pub const HALT_REG: u8 = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrapCause {
    InstructionMisaligned,
    InstructionAccessFault,
    IllegalInstruction,
    Breakpoint,
    LoadMisaligned,
    LoadAccessFault,
    StoreMisaligned,
    StoreAccessFault,
    EnvironmentCall,
    ExternalInterrupt,
}

impl TrapCause {
    pub fn mcause(self) -> u32 {
        match self {
            TrapCause::InstructionMisaligned => 0,
            TrapCause::InstructionAccessFault => 1,
            TrapCause::IllegalInstruction => 2,
            TrapCause::Breakpoint => 3,
            TrapCause::LoadMisaligned => 4,
            TrapCause::LoadAccessFault => 5,
            TrapCause::StoreMisaligned => 6,
            TrapCause::StoreAccessFault => 7,
            TrapCause::EnvironmentCall => 11,
            TrapCause::ExternalInterrupt => 0x8000_000B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Trap {
    pub cause: TrapCause,
    pub tval: u32,
    /// False when no handler is installed (`mtvec == 0`); the machine stops.
    pub taken: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepReport {
    pub pc: u32,
    pub retired: Option<DecodedInstruction>,
    pub cycles: u64,
    pub trap: Option<Trap>,
    pub halted: bool,
    /// Cycles spent inside the MMUL engine by this instruction.
    pub engine_cycles: u64,
    pub call_kind: Option<CallKind>,
}

impl StepReport {
    fn new(pc: u32) -> Self {
        Self { pc, retired: None, cycles: 0, trap: None, halted: false, engine_cycles: 0, call_kind: None }
    }
}

fn wait_states(latency: u32) -> u64 {
    latency.saturating_sub(1) as u64
}

fn mem_trap(e: MemError, load: bool) -> (TrapCause, u32) {
    match (e, load) {
        (MemError::MisalignedAccess(a), true) => (TrapCause::LoadMisaligned, a),
        (MemError::UnmappedAddress(a), true) => (TrapCause::LoadAccessFault, a),
        (MemError::MisalignedAccess(a), false) => (TrapCause::StoreMisaligned, a),
        (MemError::UnmappedAddress(a), false) => (TrapCause::StoreAccessFault, a),
    }
}

/// Enters the trap handler, or reports the trap as fatal when none is set.
fn enter_trap(m: &mut Machine, report: &mut StepReport, cause: TrapCause, tval: u32) {
    let taken = m.csr.mtvec != 0 || cause == TrapCause::ExternalInterrupt;
    if taken {
        m.csr.mepc = m.pc;
        m.csr.mcause = cause.mcause();
        m.csr.mtval = tval;
        let mie = m.csr.mstatus & MSTATUS_MIE != 0;
        m.csr.mstatus = (m.csr.mstatus & !(MSTATUS_MIE | MSTATUS_MPIE)) | if mie { MSTATUS_MPIE } else { 0 };
        m.pc = m.csr.mtvec;
        m.in_trap_handler = true;
        report.cycles += m.config.trap_entry_cycles;
    }
    report.trap = Some(Trap { cause, tval, taken });
}

fn fetch(m: &Machine, pc: u32) -> Result<u32, (TrapCause, u32)> {
    if pc & 1 != 0 {
        return Err((TrapCause::InstructionMisaligned, pc));
    }
    let lo = m.mem.read_u16(pc).map_err(|_| (TrapCause::InstructionAccessFault, pc))? as u32;
    if lo & 0b11 != 0b11 {
        return Ok(lo);
    }
    let hi = m
        .mem
        .read_u16(pc.wrapping_add(2))
        .map_err(|_| (TrapCause::InstructionAccessFault, pc.wrapping_add(2)))? as u32;
    Ok(lo | hi << 16)
}

fn csr_op(d: &DecodedInstruction, src: u32) -> (CsrOp, u32) {
    // rs1 = x0 (or a zero immediate) makes csrrs/csrrc pure reads.
    match d.op {
        Op::Csrrw | Op::Csrrwi => (CsrOp::Write, src),
        Op::Csrrs | Op::Csrrsi if d.rs1 == 0 => (CsrOp::Read, 0),
        Op::Csrrc | Op::Csrrci if d.rs1 == 0 => (CsrOp::Read, 0),
        Op::Csrrs | Op::Csrrsi => (CsrOp::Set, src),
        _ => (CsrOp::Clear, src),
    }
}

/// Executes one instruction, or takes one pending interrupt.
pub fn step(m: &mut Machine) -> StepReport {
    let mut report = StepReport::new(m.pc);
    if m.halted {
        report.halted = true;
        return report;
    }

    if m.interrupts_enabled() {
        if let Some(line) = m.visible_interrupt() {
            enter_trap(m, &mut report, TrapCause::ExternalInterrupt, 0);
            m.cycle += report.cycles;
            m.stats.total_cycles += report.cycles;
            let l = &mut m.irq[line];
            if !l.serviced {
                l.serviced = true;
                let assert_cycle = l.assert_cycle;
                m.stats.interrupt_latencies.push(InterruptLatency { assert_cycle, service_cycle: m.cycle });
            }
            return report;
        }
    }

    let pc = m.pc;
    let word = match fetch(m, pc) {
        Ok(w) => w,
        Err((cause, tval)) => {
            enter_trap(m, &mut report, cause, tval);
            return commit(m, report);
        }
    };
    let d = match decode(word) {
        Ok(d) => d,
        Err(_) => {
            enter_trap(m, &mut report, TrapCause::IllegalInstruction, word);
            return commit(m, report);
        }
    };

    report.cycles = 1 + wait_states(m.mem.read_latency_cycles);
    let next = pc.wrapping_add(d.length());
    let mut new_pc = next;
    let penalty = m.config.taken_branch_penalty;
    // The immediate CSR forms carry a 5-bit immediate in the rs1 field.
    let uimm_csr = matches!(d.op, Op::Csrrwi | Op::Csrrsi | Op::Csrrci);
    let rs1 = if uimm_csr { 0 } else { m.regs.read(d.rs1) };
    let rs2 = m.regs.read(d.rs2);
    let imm = d.imm as u32;

    let outcome: Result<(), (TrapCause, u32)> = match d.op {
        Op::Lui => {
            m.regs.write(d.rd, imm);
            Ok(())
        }
        Op::Auipc => {
            m.regs.write(d.rd, pc.wrapping_add(imm));
            Ok(())
        }
        Op::Jal => {
            m.regs.write(d.rd, next);
            new_pc = pc.wrapping_add(imm);
            report.cycles += penalty;
            Ok(())
        }
        Op::Jalr => {
            m.regs.write(d.rd, next);
            new_pc = rs1.wrapping_add(imm) & !1;
            report.cycles += penalty;
            Ok(())
        }
        op if op.is_branch() => {
            let taken = match op {
                Op::Beq => rs1 == rs2,
                Op::Bne => rs1 != rs2,
                Op::Blt => (rs1 as i32) < (rs2 as i32),
                Op::Bge => (rs1 as i32) >= (rs2 as i32),
                Op::Bltu => rs1 < rs2,
                _ => rs1 >= rs2,
            };
            if taken {
                new_pc = pc.wrapping_add(imm);
                report.cycles += penalty;
            }
            Ok(())
        }
        op if op.is_load() => {
            let addr = rs1.wrapping_add(imm);
            let width = match op {
                Op::Lb | Op::Lbu => 1,
                Op::Lh | Op::Lhu => 2,
                _ => 4,
            };
            m.load_sized(addr, width).map_err(|e| mem_trap(e, true)).map(|(v, lat)| {
                let v = match op {
                    Op::Lb => v as u8 as i8 as i32 as u32,
                    Op::Lh => v as u16 as i16 as i32 as u32,
                    _ => v,
                };
                m.regs.write(d.rd, v);
                report.cycles += wait_states(lat);
            })
        }
        op if op.is_store() => {
            let addr = rs1.wrapping_add(imm);
            let width = match op {
                Op::Sb => 1,
                Op::Sh => 2,
                _ => 4,
            };
            m.store_sized(addr, rs2, width)
                .map_err(|e| mem_trap(e, false))
                .map(|lat| report.cycles += wait_states(lat))
        }
        Op::Addi | Op::Slti | Op::Sltiu | Op::Xori | Op::Ori | Op::Andi | Op::Slli | Op::Srli | Op::Srai => {
            m.regs.write(d.rd, alu(d.op, rs1, imm));
            Ok(())
        }
        Op::Add | Op::Sub | Op::Sll | Op::Slt | Op::Sltu | Op::Xor | Op::Srl | Op::Sra | Op::Or | Op::And => {
            m.regs.write(d.rd, alu(d.op, rs1, rs2));
            Ok(())
        }
        Op::Fence | Op::Wfi => Ok(()),
        Op::Ecall => {
            if m.regs.read(HALT_REG) == 0 {
                m.halted = true;
                report.halted = true;
                Ok(())
            } else {
                Err((TrapCause::EnvironmentCall, 0))
            }
        }
        Op::Ebreak => Err((TrapCause::Breakpoint, pc)),
        Op::Mret => {
            let mpie = m.csr.mstatus & MSTATUS_MPIE != 0;
            m.csr.mstatus = (m.csr.mstatus | MSTATUS_MPIE) & !MSTATUS_MIE | if mpie { MSTATUS_MIE } else { 0 };
            new_pc = m.csr.mepc;
            m.in_trap_handler = false;
            report.cycles += penalty;
            Ok(())
        }
        op if op.is_csr() => {
            let src = if matches!(op, Op::Csrrwi | Op::Csrrsi | Op::Csrrci) { d.rs1 as u32 } else { rs1 };
            let (csr_op, value) = csr_op(&d, src);
            m.csr_access(d.csr_addr(), csr_op, value)
                .map(|old| m.regs.write(d.rd, old))
                .map_err(|_| (TrapCause::IllegalInstruction, word))
        }
        Op::Mmul => execute_mmul(m, &d, word, &mut report),
        _ => unreachable!("every op handled"),
    };

    match outcome {
        Ok(()) => {
            m.pc = new_pc;
            m.instret += 1;
            m.stats.retired_instructions += 1;
            m.stats.record_activity(Module::Fetch, 1);
            m.stats.record_activity(Module::Decode, 1);
            m.stats.record_activity(Module::Regfile, 1);
            if d.op.uses_alu() {
                m.stats.record_activity(Module::Alu, 1);
            }
            report.retired = Some(d);
        }
        Err((cause, tval)) => enter_trap(m, &mut report, cause, tval),
    }
    commit(m, report)
}

fn commit(m: &mut Machine, report: StepReport) -> StepReport {
    m.cycle += report.cycles;
    m.stats.total_cycles += report.cycles;
    report
}

fn alu(op: Op, a: u32, b: u32) -> u32 {
    let sh = b & 0x1F;
    match op {
        Op::Add | Op::Addi => a.wrapping_add(b),
        Op::Sub => a.wrapping_sub(b),
        Op::Sll | Op::Slli => a << sh,
        Op::Slt | Op::Slti => ((a as i32) < (b as i32)) as u32,
        Op::Sltu | Op::Sltiu => (a < b) as u32,
        Op::Xor | Op::Xori => a ^ b,
        Op::Srl | Op::Srli => a >> sh,
        Op::Sra | Op::Srai => ((a as i32) >> sh) as u32,
        Op::Or | Op::Ori => a | b,
        Op::And | Op::Andi => a & b,
        _ => unreachable!("not an ALU op"),
    }
}

fn execute_mmul(
    m: &mut Machine,
    d: &DecodedInstruction,
    word: u32,
    report: &mut StepReport,
) -> Result<(), (TrapCause, u32)> {
    let ops = MmulOperands {
        addr_a: m.regs.read(d.rs1),
        addr_b: m.regs.read(d.rs2),
        addr_n: m.regs.read(d.rs3),
        addr_p: m.regs.read(d.rd),
        words: d.len_field as usize + 1,
    };
    let result = if !m.engine.is_idle() {
        if m.in_trap_handler {
            Err(MmulError::SequenceBroken)
        } else {
            engine::execute_partial_call(m, ops).map(|r| (r.cycles, Some(r.call_kind)))
        }
    } else if m.csr.mmul_mode & 1 == 1 {
        engine::execute_partial_call(m, ops).map(|r| (r.cycles, Some(r.call_kind)))
    } else {
        engine::execute_atomic(m, ops).map(|r| (r.cycles, None))
    };
    match result {
        Ok((cycles, kind)) => {
            report.cycles += cycles;
            report.engine_cycles = cycles;
            report.call_kind = kind;
            m.stats.mmul_invocations += 1;
            Ok(())
        }
        Err(MmulError::Load(e)) => Err(mem_trap(e, true)),
        Err(MmulError::Store(e)) => Err(mem_trap(e, false)),
        Err(_) => Err((TrapCause::IllegalInstruction, word)),
    }
}

/// When to stop a run besides the halt `ecall`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopCondition {
    pub cycle_budget: Option<u64>,
    pub pc_sentinel: Option<u32>,
    /// External interrupt assertions as `(line, cycle)`.
    pub interrupts: Vec<(usize, u64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RunOutcome {
    Halted,
    PcSentinel,
    CycleBudgetExhausted,
    Trapped(Trap),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub outcome: RunOutcome,
    pub stats: RunStats,
}

/// Steps the machine until it halts, traps without a handler, reaches the PC
/// sentinel or exhausts the cycle budget.
pub fn run(m: &mut Machine, until: &StopCondition) -> RunResult {
    let mut schedule = until.interrupts.clone();
    schedule.sort_by_key(|(_, c)| std::cmp::Reverse(*c));
    let outcome = loop {
        while schedule.last().is_some_and(|(_, c)| *c <= m.cycle) {
            let (line, at) = schedule.pop().expect("checked non-empty");
            // Unknown lines are dropped; the configuration is validated by callers.
            let _ = m.raise_interrupt(line, at);
        }
        if m.halted {
            break RunOutcome::Halted;
        }
        if until.pc_sentinel == Some(m.pc) {
            break RunOutcome::PcSentinel;
        }
        if until.cycle_budget.is_some_and(|b| m.cycle >= b) {
            break RunOutcome::CycleBudgetExhausted;
        }
        let r = step(m);
        if r.halted {
            break RunOutcome::Halted;
        }
        if let Some(t) = r.trap.filter(|t| !t.taken) {
            break RunOutcome::Trapped(t);
        }
    };
    RunResult { outcome, stats: m.stats.clone() }
}
