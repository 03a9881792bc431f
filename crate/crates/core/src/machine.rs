//! Architectural state of the simulated core.
//!
//! A [`Machine`] owns the register file, a flat byte-addressed memory, the
//! CSR file, the external interrupt lines, the cycle counter and the MMUL
//! engine sub-state. The load/store methods on `Machine` are the LSU contract
//! shared by the ISA core and the MMUL engine: every call is counted in the
//! run statistics.

use std::fmt;

use thiserror::Error;

use crate::engine::MmulEngine;
use crate::perf::RunStats;

/// Custom machine-mode CSR that selects the MMUL execution mode (bit 0).
pub const CSR_MMUL_MODE: u16 = 0x7C0;
/// Read-only MMUL engine status: busy in bit 0, current bit index in bits 8..=23.
pub const CSR_MMUL_STATUS: u16 = 0x7C1;

pub const CSR_MSTATUS: u16 = 0x300;
pub const CSR_MISA: u16 = 0x301;
pub const CSR_MIE: u16 = 0x304;
pub const CSR_MTVEC: u16 = 0x305;
pub const CSR_MSCRATCH: u16 = 0x340;
pub const CSR_MEPC: u16 = 0x341;
pub const CSR_MCAUSE: u16 = 0x342;
pub const CSR_MTVAL: u16 = 0x343;
pub const CSR_MIP: u16 = 0x344;
pub const CSR_MCYCLE: u16 = 0xB00;
pub const CSR_MINSTRET: u16 = 0xB02;
pub const CSR_MCYCLEH: u16 = 0xB80;
pub const CSR_MINSTRETH: u16 = 0xB82;
pub const CSR_CYCLE: u16 = 0xC00;
pub const CSR_INSTRET: u16 = 0xC02;
pub const CSR_CYCLEH: u16 = 0xC80;
pub const CSR_INSTRETH: u16 = 0xC82;
pub const CSR_MHARTID: u16 = 0xF14;

pub const MSTATUS_MIE: u32 = 1 << 3;
pub const MSTATUS_MPIE: u32 = 1 << 7;
/// Machine external interrupt bit in `mie` / `mip`.
pub const MIP_MEIP: u32 = 1 << 11;

/// RV32EC: base `E` (bit 4) and `C` (bit 2), MXL = 1.
const MISA_VALUE: u32 = (1 << 30) | (1 << 4) | (1 << 2);

/// Number of architectural integer registers under RV32E.
pub const NUM_REGS: usize = 16;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum MemError {
    #[error("unmapped address {0:#010x}")]
    UnmappedAddress(u32),
    #[error("misaligned access at {0:#010x}")]
    MisalignedAccess(u32),
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum CsrError {
    #[error("unimplemented CSR {0:#05x}")]
    UnimplementedCsr(u16),
    #[error("write to read-only CSR {0:#05x}")]
    ReadOnlyCsr(u16),
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum MachineError {
    #[error("interrupt line {line} out of range ({configured} configured)")]
    NoSuchInterruptLine { line: usize, configured: usize },
    #[error("image of {len} bytes at {base:#010x} does not fit in memory")]
    ImageOutOfRange { base: u32, len: usize },
}

/// Register file of an RV32E hart. `x0` is hardwired to zero.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct RegisterFile {
    regs: [u32; NUM_REGS],
}

impl RegisterFile {
    pub fn read(&self, idx: u8) -> u32 {
        if idx == 0 {
            0
        } else {
            self.regs[idx as usize]
        }
    }

    pub fn write(&mut self, idx: u8, value: u32) {
        if idx != 0 {
            self.regs[idx as usize] = value;
        }
    }

    pub fn as_array(&self) -> [u32; NUM_REGS] {
        let mut out = self.regs;
        out[0] = 0;
        out
    }
}

impl fmt::Debug for RegisterFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_map();
        for (i, v) in self.as_array().iter().enumerate() {
            list.entry(&format_args!("x{i}"), &format_args!("{v:#010x}"));
        }
        list.finish()
    }
}

/// Flat little-endian memory with fixed access latencies.
#[derive(Clone)]
pub struct Memory {
    base: u32,
    bytes: Vec<u8>,
    pub read_latency_cycles: u32,
    pub write_latency_cycles: u32,
}

impl fmt::Debug for Memory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Memory")
            .field("base", &format_args!("{:#010x}", self.base))
            .field("size", &self.bytes.len())
            .field("read_latency_cycles", &self.read_latency_cycles)
            .field("write_latency_cycles", &self.write_latency_cycles)
            .finish()
    }
}

impl Memory {
    pub fn new(base: u32, size: usize, read_latency_cycles: u32, write_latency_cycles: u32) -> Self {
        Self {
            base,
            bytes: vec![0; size],
            read_latency_cycles,
            write_latency_cycles,
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn size(&self) -> usize {
        self.bytes.len()
    }

    fn offset(&self, addr: u32, len: usize) -> Result<usize, MemError> {
        let off = addr.wrapping_sub(self.base) as usize;
        if addr < self.base || off.checked_add(len).is_none_or(|end| end > self.bytes.len()) {
            return Err(MemError::UnmappedAddress(addr));
        }
        Ok(off)
    }

    fn checked(&self, addr: u32, len: usize) -> Result<usize, MemError> {
        if !addr.is_multiple_of(len as u32) {
            return Err(MemError::MisalignedAccess(addr));
        }
        self.offset(addr, len)
    }

    pub fn read_u8(&self, addr: u32) -> Result<u8, MemError> {
        Ok(self.bytes[self.offset(addr, 1)?])
    }

    pub fn read_u16(&self, addr: u32) -> Result<u16, MemError> {
        let off = self.checked(addr, 2)?;
        Ok(u16::from_le_bytes([self.bytes[off], self.bytes[off + 1]]))
    }

    pub fn read_u32(&self, addr: u32) -> Result<u32, MemError> {
        let off = self.checked(addr, 4)?;
        let mut b = [0u8; 4];
        b.copy_from_slice(&self.bytes[off..off + 4]);
        Ok(u32::from_le_bytes(b))
    }

    pub fn write_u8(&mut self, addr: u32, value: u8) -> Result<(), MemError> {
        let off = self.offset(addr, 1)?;
        self.bytes[off] = value;
        Ok(())
    }

    pub fn write_u16(&mut self, addr: u32, value: u16) -> Result<(), MemError> {
        let off = self.checked(addr, 2)?;
        self.bytes[off..off + 2].copy_from_slice(&value.to_le_bytes());
        Ok(())
    }

    pub fn write_u32(&mut self, addr: u32, value: u32) -> Result<(), MemError> {
        let off = self.checked(addr, 4)?;
        self.bytes[off..off + 4].copy_from_slice(&value.to_le_bytes());
        Ok(())
    }

    /// Copies a raw flat binary into memory at `base`.
    pub fn load_image(&mut self, base: u32, image: &[u8]) -> Result<(), MachineError> {
        let off = self
            .offset(base, image.len())
            .map_err(|_| MachineError::ImageOutOfRange { base, len: image.len() })?;
        self.bytes[off..off + image.len()].copy_from_slice(image);
        Ok(())
    }

    /// Reads `n` consecutive little-endian words starting at `addr`.
    pub fn read_words(&self, addr: u32, n: usize) -> Result<Vec<u32>, MemError> {
        (0..n).map(|i| self.read_u32(addr.wrapping_add(4 * i as u32))).collect()
    }

    pub fn write_words(&mut self, addr: u32, words: &[u32]) -> Result<(), MemError> {
        for (i, w) in words.iter().enumerate() {
            self.write_u32(addr.wrapping_add(4 * i as u32), *w)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CsrOp {
    #[default]
    Read,
    Write,
    Set,
    Clear,
}

/// Machine-mode CSRs that hold state of their own. Counters, `mip` and the
/// MMUL status register are views of other machine state and are resolved
/// in [`Machine::csr_access`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CsrFile {
    pub mstatus: u32,
    pub mie: u32,
    pub mtvec: u32,
    pub mscratch: u32,
    pub mepc: u32,
    pub mcause: u32,
    pub mtval: u32,
    pub mmul_mode: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct InterruptLine {
    pub pending: bool,
    pub assert_cycle: u64,
    /// Whether the current assertion has already been taken once.
    pub serviced: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineConfig {
    pub mem_base: u32,
    pub mem_size: usize,
    pub read_latency_cycles: u32,
    pub write_latency_cycles: u32,
    /// Largest operand length, in 32-bit words, the MMUL unit was built for.
    pub max_words: usize,
    pub taken_branch_penalty: u64,
    pub trap_entry_cycles: u64,
    pub interrupt_lines: usize,
}

/// Code occupies the first 64 KiB, data the next 64 KiB.
pub const DEFAULT_CODE_BASE: u32 = 0x0000_0000;
pub const DEFAULT_DATA_BASE: u32 = 0x0001_0000;

impl Default for MachineConfig {
    fn default() -> Self {
        Self {
            mem_base: DEFAULT_CODE_BASE,
            mem_size: 0x2_0000,
            read_latency_cycles: 1,
            write_latency_cycles: 1,
            max_words: 8,
            taken_branch_penalty: 1,
            trap_entry_cycles: 3,
            interrupt_lines: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Machine {
    pub config: MachineConfig,
    pub regs: RegisterFile,
    pub pc: u32,
    pub csr: CsrFile,
    pub mem: Memory,
    pub irq: Vec<InterruptLine>,
    pub cycle: u64,
    pub instret: u64,
    pub engine: MmulEngine,
    pub stats: RunStats,
    /// Set between trap entry and the matching `mret`.
    pub in_trap_handler: bool,
    /// Set once the guest executes the halt `ecall`.
    pub halted: bool,
}

impl Machine {
    pub fn new(config: MachineConfig) -> Self {
        let mem = Memory::new(
            config.mem_base,
            config.mem_size,
            config.read_latency_cycles,
            config.write_latency_cycles,
        );
        Self {
            irq: vec![InterruptLine::default(); config.interrupt_lines],
            regs: RegisterFile::default(),
            pc: config.mem_base,
            csr: CsrFile::default(),
            mem,
            cycle: 0,
            instret: 0,
            engine: MmulEngine::default(),
            stats: RunStats::default(),
            in_trap_handler: false,
            halted: false,
            config,
        }
    }

    /// LSU word load. Returns the value and the configured read latency.
    pub fn load_word(&mut self, addr: u32) -> Result<(u32, u32), MemError> {
        let v = self.mem.read_u32(addr)?;
        self.stats.mem_reads += 1;
        Ok((v, self.mem.read_latency_cycles))
    }

    /// LSU word store. Returns the configured write latency.
    pub fn store_word(&mut self, addr: u32, value: u32) -> Result<u32, MemError> {
        self.mem.write_u32(addr, value)?;
        self.stats.mem_writes += 1;
        Ok(self.mem.write_latency_cycles)
    }

    pub(crate) fn load_sized(&mut self, addr: u32, width: u8) -> Result<(u32, u32), MemError> {
        let v = match width {
            1 => self.mem.read_u8(addr)? as u32,
            2 => self.mem.read_u16(addr)? as u32,
            _ => self.mem.read_u32(addr)?,
        };
        self.stats.mem_reads += 1;
        Ok((v, self.mem.read_latency_cycles))
    }

    pub(crate) fn store_sized(&mut self, addr: u32, value: u32, width: u8) -> Result<u32, MemError> {
        match width {
            1 => self.mem.write_u8(addr, value as u8)?,
            2 => self.mem.write_u16(addr, value as u16)?,
            _ => self.mem.write_u32(addr, value)?,
        }
        self.stats.mem_writes += 1;
        Ok(self.mem.write_latency_cycles)
    }

    /// Read, write, set or clear a CSR; returns the value before the access.
    ///
    /// `Read` never has side effects, so read-only CSRs are accessible with it.
    pub fn csr_access(&mut self, addr: u16, op: CsrOp, value: u32) -> Result<u32, CsrError> {
        let old = self.csr_read(addr)?;
        let new = match op {
            CsrOp::Read => return Ok(old),
            CsrOp::Write => value,
            CsrOp::Set => old | value,
            CsrOp::Clear => old & !value,
        };
        self.csr_write(addr, new)?;
        Ok(old)
    }

    fn csr_read(&self, addr: u16) -> Result<u32, CsrError> {
        Ok(match addr {
            CSR_MSTATUS => self.csr.mstatus,
            CSR_MISA => MISA_VALUE,
            CSR_MIE => self.csr.mie,
            CSR_MTVEC => self.csr.mtvec,
            CSR_MSCRATCH => self.csr.mscratch,
            CSR_MEPC => self.csr.mepc,
            CSR_MCAUSE => self.csr.mcause,
            CSR_MTVAL => self.csr.mtval,
            CSR_MIP => {
                if self.irq.iter().any(|l| l.pending) {
                    MIP_MEIP
                } else {
                    0
                }
            }
            CSR_MCYCLE | CSR_CYCLE => self.cycle as u32,
            CSR_MCYCLEH | CSR_CYCLEH => (self.cycle >> 32) as u32,
            CSR_MINSTRET | CSR_INSTRET => self.instret as u32,
            CSR_MINSTRETH | CSR_INSTRETH => (self.instret >> 32) as u32,
            CSR_MHARTID => 0,
            CSR_MMUL_MODE => self.csr.mmul_mode,
            CSR_MMUL_STATUS => self.engine.status_word(),
            _ => return Err(CsrError::UnimplementedCsr(addr)),
        })
    }

    fn csr_write(&mut self, addr: u16, value: u32) -> Result<(), CsrError> {
        match addr {
            CSR_MSTATUS => self.csr.mstatus = value & (MSTATUS_MIE | MSTATUS_MPIE),
            CSR_MIE => self.csr.mie = value & MIP_MEIP,
            CSR_MTVEC => self.csr.mtvec = value & !0b11,
            CSR_MSCRATCH => self.csr.mscratch = value,
            CSR_MEPC => self.csr.mepc = value & !1,
            CSR_MCAUSE => self.csr.mcause = value,
            CSR_MTVAL => self.csr.mtval = value,
            CSR_MIP => {
                // Writing MEIP is how a handler acknowledges the external line.
                if value & MIP_MEIP == 0 {
                    for line in &mut self.irq {
                        line.pending = false;
                    }
                }
            }
            CSR_MMUL_MODE => self.csr.mmul_mode = value & 1,
            CSR_MISA | CSR_MCYCLE | CSR_MCYCLEH | CSR_MINSTRET | CSR_MINSTRETH | CSR_CYCLE | CSR_CYCLEH
            | CSR_INSTRET | CSR_INSTRETH | CSR_MHARTID | CSR_MMUL_STATUS => {
                return Err(CsrError::ReadOnlyCsr(addr))
            }
            _ => return Err(CsrError::UnimplementedCsr(addr)),
        }
        Ok(())
    }

    /// Asserts an external interrupt line. A line that is already pending
    /// keeps its original assert cycle.
    pub fn raise_interrupt(&mut self, line: usize, at_cycle: u64) -> Result<(), MachineError> {
        let configured = self.irq.len();
        let l = self
            .irq
            .get_mut(line)
            .ok_or(MachineError::NoSuchInterruptLine { line, configured })?;
        if !l.pending {
            *l = InterruptLine { pending: true, assert_cycle: at_cycle, serviced: false };
        }
        Ok(())
    }

    pub fn pending(&self, line: usize) -> bool {
        self.irq.get(line).is_some_and(|l| l.pending)
    }

    pub fn clear_interrupt(&mut self, line: usize) {
        if let Some(l) = self.irq.get_mut(line) {
            l.pending = false;
        }
    }

    /// The earliest pending line that is visible at the current cycle.
    pub(crate) fn visible_interrupt(&self) -> Option<usize> {
        self.irq
            .iter()
            .enumerate()
            .filter(|(_, l)| l.pending && l.assert_cycle <= self.cycle)
            .min_by_key(|(_, l)| l.assert_cycle)
            .map(|(i, _)| i)
    }

    pub(crate) fn interrupts_enabled(&self) -> bool {
        self.csr.mstatus & MSTATUS_MIE != 0 && self.csr.mie & MIP_MEIP != 0
    }

    /// Places raw flat binaries at their base addresses.
    pub fn load_images<'a>(&mut self, images: impl IntoIterator<Item = (u32, &'a [u8])>) -> Result<(), MachineError> {
        for (base, bytes) in images {
            self.mem.load_image(base, bytes)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_machine(read: u32, write: u32) -> Machine {
        Machine::new(MachineConfig {
            mem_size: 0x1_0000,
            read_latency_cycles: read,
            write_latency_cycles: write,
            ..MachineConfig::default()
        })
    }

    #[test]
    fn load_after_store() {
        let mut m = small_machine(1, 1);
        m.store_word(0x100, 0xDEAD_BEEF).unwrap();
        assert_eq!(m.load_word(0x100), Ok((0xDEAD_BEEF, 1)));
        assert_eq!(m.load_word(0x104), Ok((0, 1)));
        assert_eq!(m.load_word(0x102), Err(MemError::MisalignedAccess(0x102)));
    }

    #[test]
    fn store_latency_and_range() {
        let mut m = small_machine(1, 2);
        assert_eq!(m.store_word(0x200, 0xFFFF_FFFF), Ok(2));
        m.store_word(0x200, 1).unwrap();
        assert_eq!(m.load_word(0x200).unwrap().0, 1);
        assert_eq!(m.store_word(0xFFFF_FFF0, 0), Err(MemError::UnmappedAddress(0xFFFF_FFF0)));
        // Last word in range is fine; one past it is not.
        assert!(m.store_word(0xFFFC, 0).is_ok());
        assert_eq!(m.load_word(0x1_0000), Err(MemError::UnmappedAddress(0x1_0000)));
    }

    #[test]
    fn below_base_is_unmapped() {
        let mut m = Machine::new(MachineConfig { mem_base: 0x1000, mem_size: 0x100, ..Default::default() });
        assert_eq!(m.load_word(0xFFC), Err(MemError::UnmappedAddress(0xFFC)));
        assert!(m.load_word(0x1000).is_ok());
    }

    #[test]
    fn counters_track_calls() {
        let mut m = small_machine(1, 1);
        for i in 0..5 {
            m.store_word(4 * i, i).unwrap();
        }
        for i in 0..3 {
            m.load_word(4 * i).unwrap();
        }
        let _ = m.load_word(2);
        assert_eq!((m.stats.mem_reads, m.stats.mem_writes), (3, 5));
    }

    #[test]
    fn mmul_mode_only_bit0_writable() {
        let mut m = small_machine(1, 1);
        assert_eq!(m.csr_access(CSR_MMUL_MODE, CsrOp::Write, 1), Ok(0));
        assert_eq!(m.csr_access(CSR_MMUL_MODE, CsrOp::Read, 0), Ok(1));
        assert_eq!(m.csr_access(CSR_MMUL_MODE, CsrOp::Write, 0xFFFF_FFFE), Ok(1));
        assert_eq!(m.csr_access(CSR_MMUL_MODE, CsrOp::Read, 0), Ok(0));
        m.csr_access(CSR_MMUL_MODE, CsrOp::Set, 0xFFFF_FFFF).unwrap();
        assert_eq!(m.csr.mmul_mode, 1);
        m.csr_access(CSR_MMUL_MODE, CsrOp::Clear, 1).unwrap();
        assert_eq!(m.csr.mmul_mode, 0);
    }

    #[test]
    fn unimplemented_and_read_only_csrs() {
        let mut m = small_machine(1, 1);
        assert_eq!(m.csr_access(0x123, CsrOp::Read, 0), Err(CsrError::UnimplementedCsr(0x123)));
        assert_eq!(m.csr_access(CSR_CYCLE, CsrOp::Write, 5), Err(CsrError::ReadOnlyCsr(CSR_CYCLE)));
        assert_eq!(m.csr_access(CSR_MMUL_STATUS, CsrOp::Read, 0), Ok(0));
        assert_eq!(m.csr_access(CSR_MMUL_STATUS, CsrOp::Write, 1), Err(CsrError::ReadOnlyCsr(CSR_MMUL_STATUS)));
    }

    #[test]
    fn interrupt_lines() {
        let mut m = small_machine(1, 1);
        m.raise_interrupt(0, 1000).unwrap();
        assert!(m.pending(0));
        m.raise_interrupt(0, 2000).unwrap();
        assert_eq!(m.irq[0].assert_cycle, 1000);
        assert_eq!(
            m.raise_interrupt(7, 0),
            Err(MachineError::NoSuchInterruptLine { line: 7, configured: 1 })
        );
        assert_eq!(m.csr_access(CSR_MIP, CsrOp::Read, 0), Ok(MIP_MEIP));
        m.csr_access(CSR_MIP, CsrOp::Clear, MIP_MEIP).unwrap();
        assert!(!m.pending(0));
    }

    #[test]
    fn x0_is_hardwired() {
        let mut r = RegisterFile::default();
        r.write(0, 42);
        r.write(5, 7);
        assert_eq!(r.read(0), 0);
        assert_eq!(r.read(5), 7);
    }

    #[test]
    fn image_loading() {
        let mut m = small_machine(1, 1);
        m.load_images([(0x10, &[1u8, 2, 3, 4][..])]).unwrap();
        assert_eq!(m.mem.read_u32(0x10), Ok(0x0403_0201));
        assert!(m.load_images([(0xFFFE, &[0u8; 4][..])]).is_err());
    }
}
