//! Radix-2 Montgomery multiplication unit.
//!
//! The unit computes `P = A * B * 2^(-n) mod N` for `n = 32 * words`, with
//! operands and result in memory. It is coupled to the datapath: operand
//! addresses come from the register file, every memory access goes through
//! the LSU at `base + 4 * offset`, and the recurrence runs at two cycles per
//! multiplicand bit plus one cycle for the final conditional subtraction.
//! That cycle is spent even when no subtraction is needed, so timing does
//! not depend on operand values.
//!
//! In partial mode the same work is split across `n` instructions: the first
//! call loads the operands and processes bit 0, each later call processes one
//! bit, and the last call also subtracts and stores the result. The engine
//! keeps its accumulator and operand buffers between calls.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::machine::{Machine, MemError};
use crate::perf::Module;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum MmulError {
    #[error("modulus is even")]
    EvenModulus,
    #[error("operand does not fit in the requested bit length")]
    OperandTooLarge,
    #[error("operand length of {words} words exceeds the hardware maximum of {max}")]
    LengthExceedsHardwareMax { words: usize, max: usize },
    #[error("MMUL issued from a trap handler while a partial sequence is in flight")]
    SequenceBroken,
    #[error("engine is busy with a partial sequence")]
    EngineBusy,
    #[error("partial execution requested while MMUL_MODE selects atomic execution")]
    PartialModeDisabled,
    #[error("operand access fault on load: {0}")]
    Load(MemError),
    #[error("operand access fault on store: {0}")]
    Store(MemError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Phase {
    #[default]
    Idle,
    Loading,
    Iterating,
    FinalSubtract,
    Storing,
}

/// Addresses of A (multiplicand), B (multiplier), N (modulus) and P (result),
/// plus the operand length in 32-bit words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MmulOperands {
    pub addr_a: u32,
    pub addr_b: u32,
    pub addr_n: u32,
    pub addr_p: u32,
    pub words: usize,
}

impl MmulOperands {
    pub fn n_bits(&self) -> usize {
        32 * self.words
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MmulReport {
    /// All cycles the engine occupied the core, memory included.
    pub cycles: u64,
    /// Recurrence and final-subtraction cycles only.
    pub compute_cycles: u64,
    pub loads: u64,
    pub stores: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CallKind {
    First,
    Middle,
    Last,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartialCallReport {
    pub retired: bool,
    pub call_kind: CallKind,
    pub cycles: u64,
    pub compute_cycles: u64,
    pub loads: u64,
    pub stores: u64,
}

/// Cycles per processed multiplicand bit.
pub const CYCLES_PER_BIT: u64 = 2;
/// Cycles of the final conditional subtraction.
pub const FINAL_SUBTRACT_CYCLES: u64 = 1;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MmulEngine {
    pub phase: Phase,
    /// Accumulator S, `words + 1` limbs little-endian.
    pub s_accum: Vec<u32>,
    pub bit_index: usize,
    pub q_bit: bool,
    pub latched: Option<MmulOperands>,
    pub buf_a: Vec<u32>,
    pub buf_b: Vec<u32>,
    pub buf_n: Vec<u32>,
    pub partial_mode: bool,
}

/// ALU address generation for the engine's LSU requests.
pub fn address_generate(base: u32, word_offset: u32) -> u32 {
    base.wrapping_add(word_offset.wrapping_mul(4))
}

impl MmulEngine {
    pub fn is_idle(&self) -> bool {
        self.phase == Phase::Idle
    }

    /// Value of the read-only MMUL status CSR.
    pub fn status_word(&self) -> u32 {
        if self.is_idle() {
            0
        } else {
            1 | ((self.bit_index as u32 & 0xFFFF) << 8)
        }
    }

    fn reset(&mut self) {
        *self = Self::default();
    }

    fn n_bits(&self) -> usize {
        self.latched.map_or(0, |o| o.n_bits())
    }

    /// One iteration of the recurrence:
    /// `S += a_i * B; q = S mod 2; S += q * N; S /= 2`.
    fn process_bit(&mut self) -> u64 {
        let i = self.bit_index;
        debug_assert!(i < self.n_bits());
        let a_bit = (self.buf_a[i / 32] >> (i % 32)) & 1 == 1;
        if a_bit {
            add_into(&mut self.s_accum, &self.buf_b);
        }
        self.q_bit = self.s_accum[0] & 1 == 1;
        if self.q_bit {
            add_into(&mut self.s_accum, &self.buf_n);
        }
        shr1(&mut self.s_accum);
        self.bit_index += 1;
        CYCLES_PER_BIT
    }

    fn final_subtract(&mut self) -> u64 {
        self.phase = Phase::FinalSubtract;
        if !less_than(&self.s_accum, &self.buf_n) {
            sub_from(&mut self.s_accum, &self.buf_n);
        }
        FINAL_SUBTRACT_CYCLES
    }
}

fn add_into(acc: &mut [u32], x: &[u32]) {
    let mut carry = 0u64;
    for (i, a) in acc.iter_mut().enumerate() {
        let sum = *a as u64 + x.get(i).copied().unwrap_or(0) as u64 + carry;
        *a = sum as u32;
        carry = sum >> 32;
    }
}

fn sub_from(acc: &mut [u32], x: &[u32]) {
    let mut borrow = 0i64;
    for (i, a) in acc.iter_mut().enumerate() {
        let d = *a as i64 - x.get(i).copied().unwrap_or(0) as i64 - borrow;
        *a = d as u32;
        borrow = (d < 0) as i64;
    }
}

fn shr1(acc: &mut [u32]) {
    for i in 0..acc.len() {
        let hi = acc.get(i + 1).copied().unwrap_or(0);
        acc[i] = (acc[i] >> 1) | (hi << 31);
    }
}

fn less_than(a: &[u32], b: &[u32]) -> bool {
    for i in (0..a.len().max(b.len())).rev() {
        let (x, y) = (a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0));
        if x != y {
            return x < y;
        }
    }
    false
}

fn check_length(m: &Machine, ops: &MmulOperands) -> Result<(), MmulError> {
    if ops.words == 0 || ops.words > m.config.max_words {
        return Err(MmulError::LengthExceedsHardwareMax { words: ops.words, max: m.config.max_words });
    }
    Ok(())
}

/// Latches the operands and loads A, B and N word by word. Returns the cycles
/// spent on memory.
fn load_operands(m: &mut Machine, ops: MmulOperands) -> Result<u64, MmulError> {
    let mut cycles = 0u64;
    let mut bufs: [Vec<u32>; 3] = Default::default();
    m.engine.phase = Phase::Loading;
    for (buf, base) in bufs.iter_mut().zip([ops.addr_a, ops.addr_b, ops.addr_n]) {
        for off in 0..ops.words as u32 {
            let (v, lat) = m.load_word(address_generate(base, off)).map_err(MmulError::Load)?;
            buf.push(v);
            cycles += lat as u64;
        }
    }
    let [a, b, n] = bufs;
    if n[0] & 1 == 0 {
        return Err(MmulError::EvenModulus);
    }
    let e = &mut m.engine;
    e.buf_a = a;
    e.buf_b = b;
    e.buf_n = n;
    e.s_accum = vec![0; ops.words + 1];
    e.bit_index = 0;
    e.q_bit = false;
    e.latched = Some(ops);
    e.phase = Phase::Iterating;
    Ok(cycles)
}

/// Writes the low `words` limbs of S to P and returns the engine to idle.
fn store_result(m: &mut Machine) -> Result<u64, MmulError> {
    let ops = m.engine.latched.expect("store with latched operands");
    m.engine.phase = Phase::Storing;
    let result: Vec<u32> = m.engine.s_accum[..ops.words].to_vec();
    let mut cycles = 0u64;
    for (off, w) in result.into_iter().enumerate() {
        let lat = m
            .store_word(address_generate(ops.addr_p, off as u32), w)
            .map_err(MmulError::Store)?;
        cycles += lat as u64;
    }
    m.engine.reset();
    Ok(cycles)
}

fn account(m: &mut Machine, compute: u64, memory: u64, accesses: u64) {
    m.stats.mmul_engine_cycles += compute + memory;
    m.stats.record_activity(Module::Mmul, compute);
    // Every engine memory access has its address formed in the ALU.
    m.stats.record_activity(Module::Alu, accesses);
}

/// Runs one complete multiplication in a single instruction.
pub fn execute_atomic(m: &mut Machine, ops: MmulOperands) -> Result<MmulReport, MmulError> {
    if !m.engine.is_idle() {
        return Err(MmulError::EngineBusy);
    }
    check_length(m, &ops)?;
    let result = (|| {
        let load_cycles = load_operands(m, ops)?;
        let mut compute = 0;
        while m.engine.bit_index < ops.n_bits() {
            compute += m.engine.process_bit();
        }
        compute += m.engine.final_subtract();
        let store_cycles = store_result(m)?;
        Ok((load_cycles, compute, store_cycles))
    })();
    let (load_cycles, compute, store_cycles) = result.inspect_err(|_| m.engine.reset())?;
    let (loads, stores) = (3 * ops.words as u64, ops.words as u64);
    account(m, compute, load_cycles + store_cycles, loads + stores);
    m.stats.mmul_operations += 1;
    Ok(MmulReport {
        cycles: compute + load_cycles + store_cycles,
        compute_cycles: compute,
        loads,
        stores,
    })
}

/// Advances a partial-mode multiplication by one bit.
///
/// When the engine is idle this is the first call: MMUL_MODE must select
/// partial execution and `ops` are latched. Later calls ignore `ops`.
pub fn execute_partial_call(m: &mut Machine, ops: MmulOperands) -> Result<PartialCallReport, MmulError> {
    let mut load_cycles = 0;
    let mut loads = 0;
    let first = m.engine.is_idle();
    if first {
        if m.csr.mmul_mode & 1 == 0 {
            return Err(MmulError::PartialModeDisabled);
        }
        check_length(m, &ops)?;
        load_cycles = load_operands(m, ops).inspect_err(|_| m.engine.reset())?;
        m.engine.partial_mode = true;
        loads = 3 * ops.words as u64;
    }
    let n_bits = m.engine.n_bits();
    let mut compute = m.engine.process_bit();
    let last = m.engine.bit_index == n_bits;
    let mut store_cycles = 0;
    let mut stores = 0;
    if last {
        compute += m.engine.final_subtract();
        stores = m.engine.latched.map_or(0, |o| o.words as u64);
        store_cycles = store_result(m).inspect_err(|_| m.engine.reset())?;
        m.stats.mmul_operations += 1;
    }
    account(m, compute, load_cycles + store_cycles, loads + stores);
    Ok(PartialCallReport {
        retired: true,
        call_kind: if first {
            CallKind::First
        } else if last {
            CallKind::Last
        } else {
            CallKind::Middle
        },
        cycles: compute + load_cycles + store_cycles,
        compute_cycles: compute,
        loads,
        stores,
    })
}

/// Bit-serial radix-2 Montgomery multiplication on big integers; the
/// executable contract the engine must match bit for bit.
pub fn r2mm_reference(a: &BigUint, b: &BigUint, n_mod: &BigUint, n_bits: usize) -> Result<BigUint, MmulError> {
    if !n_mod.bit(0) {
        return Err(MmulError::EvenModulus);
    }
    let limit = BigUint::one() << n_bits;
    if a >= &limit || b >= &limit || n_mod >= &limit {
        return Err(MmulError::OperandTooLarge);
    }
    let mut s = BigUint::zero();
    for i in 0..n_bits as u64 {
        if a.bit(i) {
            s += b;
        }
        if s.bit(0) {
            s += n_mod;
        }
        s >>= 1;
    }
    if &s >= n_mod {
        s -= n_mod;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::MachineConfig;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn reference_small_vectors() {
        // Values cross-checked against (A * B * inverse(2^8, 239)) mod 239.
        assert_eq!(r2mm_reference(&big(100), &big(55), &big(239), 8), Ok(big(197)));
        assert_eq!(r2mm_reference(&big(17), &big(23), &big(239), 8), Ok(big(23)));
        assert_eq!(r2mm_reference(&big(0), &big(55), &big(239), 8), Ok(big(0)));
        assert_eq!(r2mm_reference(&big(1), &big(1), &big(240), 8), Err(MmulError::EvenModulus));
        assert_eq!(r2mm_reference(&big(256), &big(1), &big(239), 8), Err(MmulError::OperandTooLarge));
    }

    #[test]
    fn address_generation() {
        assert_eq!(address_generate(0x10000, 0), 0x10000);
        assert_eq!(address_generate(0x10000, 3), 0x1000C);
        assert_eq!(address_generate(0xFFFF_FFFC, 1), 0);
    }

    #[test]
    fn limb_helpers() {
        let mut s = vec![u32::MAX, u32::MAX, 0];
        add_into(&mut s, &[1]);
        assert_eq!(s, [0, 0, 1]);
        sub_from(&mut s, &[1]);
        assert_eq!(s, [u32::MAX, u32::MAX, 0]);
        shr1(&mut s);
        assert_eq!(s, [u32::MAX, 0x7FFF_FFFF, 0]);
        assert!(less_than(&[1, 0, 0], &[0, 1]));
        assert!(!less_than(&[0, 1], &[0, 1, 0]));
    }

    fn machine() -> Machine {
        Machine::new(MachineConfig::default())
    }

    fn ops(words: usize) -> MmulOperands {
        MmulOperands { addr_a: 0x10000, addr_b: 0x10100, addr_n: 0x10200, addr_p: 0x10300, words }
    }

    #[test]
    fn one_word_atomic() {
        let mut m = machine();
        let o = ops(1);
        m.mem.write_u32(o.addr_a, 100).unwrap();
        m.mem.write_u32(o.addr_b, 55).unwrap();
        m.mem.write_u32(o.addr_n, 239).unwrap();
        let r = execute_atomic(&mut m, o).unwrap();
        assert_eq!(r, MmulReport { cycles: 65 + 4, compute_cycles: 65, loads: 3, stores: 1 });
        let expect = r2mm_reference(&big(100), &big(55), &big(239), 32).unwrap();
        assert_eq!(BigUint::from(m.mem.read_u32(o.addr_p).unwrap()), expect);
        assert!(m.engine.is_idle());
    }

    #[test]
    fn even_modulus_and_length_limit() {
        let mut m = machine();
        let o = ops(2);
        m.mem.write_u32(o.addr_n, 10).unwrap();
        assert_eq!(execute_atomic(&mut m, o), Err(MmulError::EvenModulus));
        assert!(m.engine.is_idle());
        assert_eq!(
            execute_atomic(&mut m, ops(9)),
            Err(MmulError::LengthExceedsHardwareMax { words: 9, max: 8 })
        );
    }

    #[test]
    fn unmapped_result_faults_and_idles() {
        let mut m = machine();
        let o = MmulOperands { addr_p: 0xFFFF_FFF0, ..ops(1) };
        m.mem.write_u32(o.addr_n, 7).unwrap();
        assert_eq!(execute_atomic(&mut m, o), Err(MmulError::Store(MemError::UnmappedAddress(0xFFFF_FFF0))));
        assert!(m.engine.is_idle());
        let o = MmulOperands { addr_b: 0x10102, ..ops(1) };
        assert_eq!(execute_atomic(&mut m, o), Err(MmulError::Load(MemError::MisalignedAccess(0x10102))));
    }

    #[test]
    fn partial_requires_mode() {
        let mut m = machine();
        assert_eq!(execute_partial_call(&mut m, ops(1)), Err(MmulError::PartialModeDisabled));
    }

    #[test]
    fn status_word_tracks_progress() {
        let mut m = machine();
        let o = ops(1);
        m.mem.write_u32(o.addr_n, 239).unwrap();
        m.csr.mmul_mode = 1;
        execute_partial_call(&mut m, o).unwrap();
        execute_partial_call(&mut m, o).unwrap();
        assert_eq!(m.engine.status_word(), 1 | (2 << 8));
    }
}
