//! Benchmark kernels.
//!
//! Register conventions inside generated programs:
//! - `gp` points 2 KiB into the data region; every buffer is `gp`-relative.
//! - `a3` holds the modulus address for the whole program.
//! - `s0`, `s1`, `sp` belong to the top-level kernel (loop counters, flags).
//! - Subroutines take `a0` = P, `a1` = A, `a2` = B and may clobber
//!   `a0`–`a2`, `a4`, `a5`, `t0`–`t2`, `tp`. The software multiply saves
//!   and restores `s0`/`s1` itself.
//! - The interrupt handler touches only `t0`/`t1` and restores both.

use num_bigint::BigUint;
use num_traits::One;

use super::asm::*;
use super::field::{from_words, p25519, FieldContext};
use super::{DataLayout, GuestError, GuestProgram, CODE_BASE, DATA_BASE};
use crate::isa::{Op, HALT_REG};
use crate::machine::{CSR_MCYCLE, CSR_MIE, CSR_MIP, CSR_MMUL_MODE, CSR_MSCRATCH, CSR_MSTATUS, CSR_MTVEC, MIP_MEIP, MSTATUS_MIE};
use crate::perf::Config;

/// Symbol names shared with callers reading results back.
pub const SYM_MODULUS: &str = "N";
pub const SYM_RESULT: &str = "RESULT";
pub const SYM_MAILBOX: &str = "MAILBOX";
pub const SYM_IRQ_COUNT: &str = "IRQ_COUNT";

const SW_MUL: &str = "sw_mul";
const PE_MUL: &str = "pe_mul";
const FADD: &str = "fadd";
const FSUB: &str = "fsub";
const IRQ_HANDLER: &str = "irq_handler";

/// How field multiplications are carried out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MulStrategy {
    Software,
    Atomic,
    /// Partial mode through a shared unrolled subroutine.
    PartialCall,
    /// Partial mode unrolled at every call site.
    PartialInline,
}

#[derive(Debug, Clone)]
pub struct GuestBuilder {
    pub asm: Asm,
    pub layout: DataLayout,
    ctx: FieldContext,
    config: Config,
    strategy: MulStrategy,
    data_init: Vec<(String, Vec<u32>)>,
    need_sw_mul: bool,
    need_pe_mul: bool,
    need_fadd: bool,
    need_fsub: bool,
    irq_harness: bool,
}

impl GuestBuilder {
    /// Starts a program: sets up `gp`, loads the modulus and its address.
    pub fn new(ctx: FieldContext, config: Config) -> Result<Self, GuestError> {
        let strategy = match config {
            Config::Ba => MulStrategy::Software,
            Config::CiAe => MulStrategy::Atomic,
            Config::CiPe => MulStrategy::PartialCall,
        };
        let mut b = Self {
            asm: Asm::new(CODE_BASE, true),
            layout: DataLayout::new(DATA_BASE),
            ctx,
            config,
            strategy,
            data_init: Vec::new(),
            need_sw_mul: false,
            need_pe_mul: false,
            need_fadd: false,
            need_fsub: false,
            irq_harness: false,
        };
        let n = b.ctx.modulus.clone();
        b.constant(SYM_MODULUS, &n)?;
        b.asm.li(GP, b.layout.gp());
        b.addr(A3, SYM_MODULUS);
        Ok(b)
    }

    /// Unrolls partial-mode sequences at each call site instead of calling a
    /// shared routine.
    pub fn inline_partial(mut self) -> Self {
        if self.strategy == MulStrategy::PartialCall {
            self.strategy = MulStrategy::PartialInline;
        }
        self
    }

    pub fn ctx(&self) -> &FieldContext {
        &self.ctx
    }

    fn words(&self) -> usize {
        self.ctx.words
    }

    /// Allocates a zeroed field-element buffer.
    pub fn buffer(&mut self, name: &str) -> Result<(), GuestError> {
        self.layout.alloc(name, self.ctx.words).map(|_| ())
    }

    pub fn buffer_words(&mut self, name: &str, words: usize) -> Result<(), GuestError> {
        self.layout.alloc(name, words).map(|_| ())
    }

    /// Allocates a field-element buffer with initial contents.
    pub fn constant(&mut self, name: &str, value: &BigUint) -> Result<(), GuestError> {
        let words = self.ctx.to_words(value).map_err(|_| GuestError::OperandTooLarge(name.to_string()))?;
        self.constant_words(name, words)
    }

    pub fn constant_words(&mut self, name: &str, words: Vec<u32>) -> Result<(), GuestError> {
        self.layout.alloc(name, words.len())?;
        self.data_init.push((name.to_string(), words));
        Ok(())
    }

    fn off(&self, name: &str) -> i32 {
        self.layout.offset(name)
    }

    /// `addi rd, gp, off(name)`
    pub fn addr(&mut self, rd: u8, name: &str) {
        let o = self.off(name);
        self.asm.addi(rd, GP, o);
    }

    fn args(&mut self, p: &str, a: &str, b: &str) {
        self.addr(A0, p);
        self.addr(A1, a);
        self.addr(A2, b);
    }

    /// P ← A·B·2^(−n) mod N using the configured strategy.
    pub fn mont_mul(&mut self, p: &str, a: &str, b: &str) {
        match self.strategy {
            MulStrategy::Software => {
                self.need_sw_mul = true;
                self.args(p, a, b);
                self.asm.call(SW_MUL);
            }
            MulStrategy::Atomic => self.emit_mmul_atomic(a, b, p),
            MulStrategy::PartialCall => {
                self.need_pe_mul = true;
                self.args(p, a, b);
                self.asm.call(PE_MUL);
            }
            MulStrategy::PartialInline => self.emit_mmul_partial_unrolled(a, b, p),
        }
    }

    /// Address setup plus a single atomic MMUL.
    pub fn emit_mmul_atomic(&mut self, a: &str, b: &str, p: &str) {
        self.args(p, a, b);
        let w = self.words() as u8;
        self.asm.mmul(A0, A1, A2, A3, w);
    }

    /// Address setup, partial mode on, n identical MMULs, partial mode off.
    pub fn emit_mmul_partial_unrolled(&mut self, a: &str, b: &str, p: &str) {
        self.args(p, a, b);
        self.partial_body();
    }

    fn partial_body(&mut self) {
        let w = self.words() as u8;
        self.asm.csrrwi(ZERO, CSR_MMUL_MODE, 1);
        for _ in 0..self.ctx.n_bits() {
            self.asm.mmul(A0, A1, A2, A3, w);
        }
        self.asm.csrrwi(ZERO, CSR_MMUL_MODE, 0);
    }

    pub fn fadd(&mut self, p: &str, a: &str, b: &str) {
        self.need_fadd = true;
        self.args(p, a, b);
        self.asm.call(FADD);
    }

    pub fn fsub(&mut self, p: &str, a: &str, b: &str) {
        self.need_fsub = true;
        self.args(p, a, b);
        self.asm.call(FSUB);
    }

    pub fn copy(&mut self, dst: &str, src: &str) {
        let (d, s) = (self.off(dst), self.off(src));
        for k in 0..self.words() as i32 {
            self.asm.lw(T0, s + 4 * k, GP);
            self.asm.sw(T0, d + 4 * k, GP);
        }
    }

    /// Swaps two buffers when `flag` is nonzero.
    pub fn cswap(&mut self, flag: u8, x: &str, y: &str) {
        let skip = self.asm.fresh_label("cswap.skip");
        let (xo, yo) = (self.off(x), self.off(y));
        self.asm.beqz(flag, &skip);
        for k in 0..self.words() as i32 {
            self.asm.lw(T0, xo + 4 * k, GP);
            self.asm.lw(T1, yo + 4 * k, GP);
            self.asm.sw(T0, yo + 4 * k, GP);
            self.asm.sw(T1, xo + 4 * k, GP);
        }
        self.asm.label(&skip);
    }

    /// `rd` ← bit `counter` of the little-endian multiword `sym`.
    fn extract_bit(&mut self, rd: u8, sym: &str, counter: u8) {
        let o = self.off(sym);
        self.asm.op_imm(Op::Srli, T0, counter, 5);
        self.asm.op_imm(Op::Slli, T0, T0, 2);
        self.asm.op(Op::Add, T0, T0, GP);
        self.asm.lw(T0, o, T0);
        self.asm.op_imm(Op::Andi, T1, counter, 31);
        self.asm.op(Op::Srl, T0, T0, T1);
        self.asm.op_imm(Op::Andi, rd, T0, 1);
    }

    /// Left-to-right square-and-multiply: `dst` ← `base_m`^`exp`, all in the
    /// Montgomery domain. `one_m` holds R mod N. Uses `s0`.
    pub fn pow(&mut self, dst: &str, base_m: &str, exp: &str, exp_bits: u32, one_m: &str) {
        let top = self.asm.fresh_label("pow.loop");
        let skip = self.asm.fresh_label("pow.skip");
        let done = self.asm.fresh_label("pow.done");
        self.copy(dst, one_m);
        self.asm.li(S0, exp_bits);
        self.asm.label(&top);
        self.asm.beqz(S0, &done);
        self.asm.addi(S0, S0, -1);
        self.mont_mul(dst, dst, dst);
        self.extract_bit(T0, exp, S0);
        self.asm.beqz(T0, &skip);
        self.mont_mul(dst, dst, base_m);
        self.asm.label(&skip);
        self.asm.j(&top);
        self.asm.label(&done);
    }

    /// Wraps the program in interrupt support: installs the handler, the
    /// save area and mailbox, and enables the external interrupt.
    pub fn enable_interrupt_harness(&mut self) -> Result<(), GuestError> {
        self.irq_harness = true;
        self.buffer_words("IRQ_SAVE", 1)?;
        self.buffer_words(SYM_MAILBOX, 1)?;
        self.buffer_words(SYM_IRQ_COUNT, 1)?;
        self.asm.la(T0, IRQ_HANDLER);
        self.asm.csrrw(ZERO, CSR_MTVEC, T0);
        self.addr(T0, "IRQ_SAVE");
        self.asm.csrrw(ZERO, CSR_MSCRATCH, T0);
        self.asm.li(T0, MIP_MEIP);
        self.asm.csrrs(ZERO, CSR_MIE, T0);
        self.asm.csrrsi(ZERO, CSR_MSTATUS, MSTATUS_MIE as u8);
        Ok(())
    }

    fn emit_irq_handler(&mut self) {
        // Save/mailbox/count sit consecutively after IRQ_SAVE.
        let save = self.off("IRQ_SAVE");
        let mailbox = self.off(SYM_MAILBOX) - save;
        let count = self.off(SYM_IRQ_COUNT) - save;
        let a = &mut self.asm;
        a.align4();
        a.label(IRQ_HANDLER);
        a.csrrw(T0, CSR_MSCRATCH, T0);
        a.sw(T1, 0, T0);
        a.csrr(T1, CSR_MCYCLE);
        a.sw(T1, mailbox, T0);
        a.lw(T1, count, T0);
        a.addi(T1, T1, 1);
        a.sw(T1, count, T0);
        a.li(T1, MIP_MEIP);
        a.csrrc(ZERO, CSR_MIP, T1);
        a.lw(T1, 0, T0);
        a.csrrw(T0, CSR_MSCRATCH, T0);
        a.mret();
    }

    /// Word-serial shift-and-add Montgomery multiplication using only RV32E
    /// instructions, written with word loops the way compiled C would be.
    /// Operates on the same memory layout as MMUL; P is written only after
    /// the last read of A and B, so P may alias either.
    fn emit_software_montmul(&mut self) -> Result<(), GuestError> {
        let w = self.words() as i32;
        self.buffer_words("SW_S", w as usize + 1)?;
        self.buffer("SW_T")?;
        self.buffer_words("SW_SAVE", 4)?;
        let s = self.off("SW_S");
        let t = self.off("SW_T");
        let save = self.off("SW_SAVE");
        let dt = t - s;
        let a = &mut self.asm;

        a.label(SW_MUL);
        for (k, r) in [S0, S1, A0, RA].into_iter().enumerate() {
            a.sw(r, save + 4 * k as i32, GP);
        }
        // ra marks &S[w], the end of every word loop over S.
        a.addi(RA, GP, s + 4 * w);
        a.addi(A0, GP, s);
        a.label("sw_mul.zero");
        a.sw(ZERO, 0, A0);
        a.addi(A0, A0, 4);
        a.branch(Op::Bne, A0, RA, "sw_mul.zero");
        a.sw(ZERO, 0, A0);
        a.addi(TP, A1, 4 * w);
        a.label("sw_mul.outer");
        a.lw(S0, 0, A1);
        a.addi(S1, ZERO, 32);
        a.label("sw_mul.inner");
        a.op_imm(Op::Andi, T0, S0, 1);
        a.beqz(T0, "sw_mul.skip_b");
        emit_accumulate_loop(a, s, A2, "sw_mul.add_b");
        a.label("sw_mul.skip_b");
        a.lw(T0, s, GP);
        a.op_imm(Op::Andi, T0, T0, 1);
        a.beqz(T0, "sw_mul.skip_n");
        emit_accumulate_loop(a, s, A3, "sw_mul.add_n");
        a.label("sw_mul.skip_n");
        // S >>= 1 over w+1 words.
        a.addi(A0, GP, s);
        a.lw(T0, 0, A0);
        a.label("sw_mul.shift");
        a.lw(T1, 4, A0);
        a.op_imm(Op::Srli, T0, T0, 1);
        a.op_imm(Op::Slli, T2, T1, 31);
        a.op(Op::Or, T0, T0, T2);
        a.sw(T0, 0, A0);
        a.mv(T0, T1);
        a.addi(A0, A0, 4);
        a.branch(Op::Bne, A0, RA, "sw_mul.shift");
        a.op_imm(Op::Srli, T0, T0, 1);
        a.sw(T0, 0, A0);
        a.op_imm(Op::Srli, S0, S0, 1);
        a.addi(S1, S1, -1);
        a.bnez(S1, "sw_mul.inner");
        a.addi(A1, A1, 4);
        a.branch(Op::Bne, A1, TP, "sw_mul.outer");
        // T = S − N; keep S when the subtraction borrows out of the top word.
        a.addi(A0, GP, s);
        a.mv(A5, A3);
        a.addi(A4, ZERO, 0);
        a.label("sw_mul.sub");
        a.lw(T0, 0, A0);
        a.lw(T1, 0, A5);
        emit_sub_step(a, A4, false);
        a.sw(T0, dt, A0);
        a.addi(A0, A0, 4);
        a.addi(A5, A5, 4);
        a.branch(Op::Bne, A0, RA, "sw_mul.sub");
        a.lw(T0, 0, A0);
        a.op(Op::Sltu, A4, T0, A4);
        a.addi(T2, GP, s);
        a.bnez(A4, "sw_mul.copy_setup");
        a.addi(T2, GP, t);
        a.label("sw_mul.copy_setup");
        a.lw(A0, save + 8, GP);
        a.addi(A5, T2, 4 * w);
        a.label("sw_mul.copy");
        a.lw(T0, 0, T2);
        a.sw(T0, 0, A0);
        a.addi(T2, T2, 4);
        a.addi(A0, A0, 4);
        a.branch(Op::Bne, T2, A5, "sw_mul.copy");
        for (k, r) in [S0, S1, A0, RA].into_iter().enumerate() {
            a.lw(r, save + 4 * k as i32, GP);
        }
        a.ret();
        Ok(())
    }

    fn emit_pe_mul(&mut self) {
        self.asm.label(PE_MUL);
        self.partial_body();
        self.asm.ret();
    }

    /// P ← A + B mod N for A, B < N.
    fn emit_fadd(&mut self) -> Result<(), GuestError> {
        if self.layout.get("F_TMP").is_err() {
            self.buffer("F_TMP")?;
        }
        let w = self.words() as i32;
        let tmp = self.off("F_TMP");
        let a = &mut self.asm;
        a.label(FADD);
        for k in 0..w {
            a.lw(T0, 4 * k, A1);
            a.lw(T1, 4 * k, A2);
            emit_add_step(a, k == 0);
            a.sw(T0, 4 * k, A0);
        }
        for k in 0..w {
            a.lw(T0, 4 * k, A0);
            a.lw(T1, 4 * k, A3);
            emit_sub_step(a, A5, k == 0);
            a.sw(T0, tmp + 4 * k, GP);
        }
        a.bnez(A4, "fadd.reduce");
        a.bnez(A5, "fadd.done");
        a.label("fadd.reduce");
        emit_copy_out(a, tmp, w);
        a.label("fadd.done");
        a.ret();
        Ok(())
    }

    /// P ← A − B mod N for A, B < N.
    fn emit_fsub(&mut self) {
        let w = self.words() as i32;
        let a = &mut self.asm;
        a.label(FSUB);
        for k in 0..w {
            a.lw(T0, 4 * k, A1);
            a.lw(T1, 4 * k, A2);
            emit_sub_step(a, A5, k == 0);
            a.sw(T0, 4 * k, A0);
        }
        a.beqz(A5, "fsub.done");
        for k in 0..w {
            a.lw(T0, 4 * k, A0);
            a.lw(T1, 4 * k, A3);
            emit_add_step(a, k == 0);
            a.sw(T0, 4 * k, A0);
        }
        a.label("fsub.done");
        a.ret();
    }

    /// Emits halt, the subroutines the body referenced and the handler.
    pub fn finish(mut self, name: &str) -> Result<GuestProgram, GuestError> {
        self.asm.halt();
        if self.need_sw_mul {
            self.emit_software_montmul()?;
        }
        if self.need_pe_mul {
            self.emit_pe_mul();
        }
        if self.need_fadd {
            self.emit_fadd()?;
        }
        if self.need_fsub {
            self.emit_fsub();
        }
        if self.irq_harness {
            self.emit_irq_handler();
        }
        let out = self.asm.finish();
        let mut data_init = Vec::new();
        for (sym, words) in &self.data_init {
            data_init.push((self.layout.get(sym)?.addr, words.clone()));
        }
        Ok(GuestProgram {
            name: name.to_string(),
            code_base: CODE_BASE,
            entry: CODE_BASE,
            code: out.bytes,
            listing: out.listing,
            labels: out.labels,
            symbols: self.layout.symbols().clone(),
            data_init,
            words: self.ctx.words,
            config: self.config,
            halt_reg: HALT_REG,
        })
    }
}

/// S[0..=w] += X[0..w] where X is addressed by `xr`; `ra` holds &S[w].
fn emit_accumulate_loop(a: &mut Asm, s: i32, xr: u8, label: &str) {
    a.addi(A0, GP, s);
    a.mv(A5, xr);
    a.addi(A4, ZERO, 0);
    a.label(label);
    a.lw(T0, 0, A0);
    a.lw(T1, 0, A5);
    emit_add_step(a, false);
    a.sw(T0, 0, A0);
    a.addi(A0, A0, 4);
    a.addi(A5, A5, 4);
    a.branch(Op::Bne, A0, RA, label);
    a.lw(T0, 0, A0);
    a.op(Op::Add, T0, T0, A4);
    a.sw(T0, 0, A0);
}

/// t0 ← t0 + t1 + a4, carry out in a4 (carry in ignored on the first word).
fn emit_add_step(a: &mut Asm, first: bool) {
    if first {
        a.op(Op::Add, T0, T0, T1);
        a.op(Op::Sltu, A4, T0, T1);
    } else {
        a.op(Op::Add, T0, T0, A4);
        a.op(Op::Sltu, T2, T0, A4);
        a.op(Op::Add, T0, T0, T1);
        a.op(Op::Sltu, T1, T0, T1);
        a.op(Op::Or, A4, T2, T1);
    }
}

/// t0 ← t0 − t1 − b, borrow out in b (borrow in ignored on the first word).
fn emit_sub_step(a: &mut Asm, b: u8, first: bool) {
    if first {
        a.op(Op::Sltu, b, T0, T1);
        a.op(Op::Sub, T0, T0, T1);
    } else {
        a.op(Op::Sltu, T2, T0, T1);
        a.op(Op::Sub, T0, T0, T1);
        a.op(Op::Sltu, T1, T0, b);
        a.op(Op::Sub, T0, T0, b);
        a.op(Op::Or, b, T2, T1);
    }
}

/// Copies w words from a `gp`-relative buffer to the address in `a0`.
fn emit_copy_out(a: &mut Asm, src: i32, w: i32) {
    for k in 0..w {
        a.lw(T0, src + 4 * k, GP);
        a.sw(T0, 4 * k, A0);
    }
}

/// A single Montgomery multiplication: RESULT ← A·B·2^(−n) mod N.
pub fn montmul_program(ctx: &FieldContext, config: Config, a: &BigUint, b: &BigUint) -> Result<GuestProgram, GuestError> {
    let mut g = GuestBuilder::new(ctx.clone(), config)?;
    g.constant("A", a)?;
    g.constant("B", b)?;
    g.buffer(SYM_RESULT)?;
    g.mont_mul(SYM_RESULT, "A", "B");
    g.finish("montmul")
}

/// RESULT ← base^exp mod N via the Montgomery domain.
pub fn emit_modexp(
    ctx: &FieldContext,
    config: Config,
    base: &BigUint,
    exp: &BigUint,
    exponent_bits: u32,
) -> Result<GuestProgram, GuestError> {
    if exp.bits() > exponent_bits as u64 {
        return Err(GuestError::OperandTooLarge("exponent".into()));
    }
    let mut g = GuestBuilder::new(ctx.clone(), config)?;
    let base = base % &ctx.modulus;
    let exp_words = (exponent_bits as usize).div_ceil(32).max(1);
    g.constant("R2", &ctx.r2_mod_n)?;
    g.constant("ONE", &BigUint::one())?;
    g.constant("BASE", &base)?;
    g.constant_words("EXP", super::field::to_words(exp, exp_words)?)?;
    for s in ["ONE_M", "BASE_M", "ACC", SYM_RESULT] {
        g.buffer(s)?;
    }
    g.mont_mul("ONE_M", "ONE", "R2");
    g.mont_mul("BASE_M", "BASE", "R2");
    g.pow("ACC", "BASE_M", "EXP", exponent_bits, "ONE_M");
    g.mont_mul(SYM_RESULT, "ACC", "ONE");
    g.finish(&format!("modexp{}", ctx.n_bits()))
}

/// x-only Montgomery ladder over GF(2^255 − 19); RESULT ← x(k·P) for the
/// top `scalar_bits` bits of `scalar` and input u-coordinate `u`.
pub fn emit_ladder_x25519_field(
    config: Config,
    scalar: &BigUint,
    scalar_bits: u32,
    u: &BigUint,
) -> Result<GuestProgram, GuestError> {
    let ctx = FieldContext::new(p25519(), 8)?;
    if scalar.bits() > scalar_bits as u64 || scalar_bits > 256 {
        return Err(GuestError::OperandTooLarge("scalar".into()));
    }
    let u = u % &ctx.modulus;
    let mut g = GuestBuilder::new(ctx.clone(), config)?;
    g.constant("R2", &ctx.r2_mod_n)?;
    g.constant("ONE", &BigUint::one())?;
    g.constant("A24", &BigUint::from(121_665u32))?;
    g.constant("X1", &u)?;
    g.constant("PM2", &(&ctx.modulus - 2u32))?;
    g.constant_words("SCALAR", super::field::to_words(scalar, 8)?)?;
    for s in [
        "ONE_M", "X1M", "A24M", "X2", "Z2", "X3", "Z3", "LA", "LAA", "LB", "LBB", "LE", "LC", "LD", "DA", "CB",
        "T1", "T2", "ZINV", SYM_RESULT,
    ] {
        g.buffer(s)?;
    }
    g.mont_mul("ONE_M", "ONE", "R2");
    g.mont_mul("X1M", "X1", "R2");
    g.mont_mul("A24M", "A24", "R2");
    g.copy("X2", "ONE_M");
    g.copy("X3", "X1M");
    g.copy("Z3", "ONE_M");
    g.asm.li(S1, 0);
    g.asm.li(S0, scalar_bits);
    g.asm.label("ladder.loop");
    g.asm.beqz(S0, "ladder.end");
    g.asm.addi(S0, S0, -1);
    g.extract_bit(SP, "SCALAR", S0);
    g.asm.op(Op::Xor, S1, S1, SP);
    g.cswap(S1, "X2", "X3");
    g.cswap(S1, "Z2", "Z3");
    g.asm.mv(S1, SP);
    g.fadd("LA", "X2", "Z2");
    g.mont_mul("LAA", "LA", "LA");
    g.fsub("LB", "X2", "Z2");
    g.mont_mul("LBB", "LB", "LB");
    g.fsub("LE", "LAA", "LBB");
    g.fadd("LC", "X3", "Z3");
    g.fsub("LD", "X3", "Z3");
    g.mont_mul("DA", "LD", "LA");
    g.mont_mul("CB", "LC", "LB");
    g.fadd("T1", "DA", "CB");
    g.mont_mul("X3", "T1", "T1");
    g.fsub("T2", "DA", "CB");
    g.mont_mul("T2", "T2", "T2");
    g.mont_mul("Z3", "X1M", "T2");
    g.mont_mul("X2", "LAA", "LBB");
    g.mont_mul("T1", "A24M", "LE");
    g.fadd("T1", "LAA", "T1");
    g.mont_mul("Z2", "LE", "T1");
    g.asm.j("ladder.loop");
    g.asm.label("ladder.end");
    g.cswap(S1, "X2", "X3");
    g.cswap(S1, "Z2", "Z3");
    g.pow("ZINV", "Z2", "PM2", 255, "ONE_M");
    g.mont_mul("T1", "X2", "ZINV");
    g.mont_mul(SYM_RESULT, "T1", "ONE");
    g.finish("x25519_ladder")
}

/// One multiplication wrapped in the interrupt harness. CI-PE unrolls the
/// partial sequence inline.
pub fn emit_interrupt_harness(
    ctx: &FieldContext,
    config: Config,
    a: &BigUint,
    b: &BigUint,
) -> Result<GuestProgram, GuestError> {
    let mut g = GuestBuilder::new(ctx.clone(), config)?.inline_partial();
    g.constant("A", a)?;
    g.constant("B", b)?;
    g.buffer(SYM_RESULT)?;
    g.enable_interrupt_harness()?;
    g.mont_mul(SYM_RESULT, "A", "B");
    g.finish(&format!("irq_{}", config.as_str()))
}

/// Reads a field element back as a big integer.
pub fn read_field(program: &GuestProgram, m: &crate::machine::Machine, name: &str) -> Result<BigUint, GuestError> {
    Ok(from_words(&program.read_symbol(m, name)?))
}
