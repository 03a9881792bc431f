//! RV32EC instruction set: decoding, compressed expansion, encoding and the
//! execution core with its timing model.

mod compressed;
mod decode;
mod encode;
mod exec;

pub use compressed::{compress, expand_compressed};
pub use decode::{decode, decode_full};
pub use encode::encode;
pub use exec::{run, step, RunOutcome, RunResult, StepReport, StopCondition, Trap, TrapCause, HALT_REG};

use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum DecodeError {
    #[error("illegal instruction {0:#010x}")]
    IllegalInstruction(u32),
}

/// Operation of a decoded instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Op {
    Lui,
    Auipc,
    Jal,
    Jalr,
    Beq,
    Bne,
    Blt,
    Bge,
    Bltu,
    Bgeu,
    Lb,
    Lh,
    Lw,
    Lbu,
    Lhu,
    Sb,
    Sh,
    Sw,
    Addi,
    Slti,
    Sltiu,
    Xori,
    Ori,
    Andi,
    Slli,
    Srli,
    Srai,
    Add,
    Sub,
    Sll,
    Slt,
    Sltu,
    Xor,
    Srl,
    Sra,
    Or,
    And,
    Fence,
    Ecall,
    Ebreak,
    Mret,
    Wfi,
    Csrrw,
    Csrrs,
    Csrrc,
    Csrrwi,
    Csrrsi,
    Csrrci,
    Mmul,
}

impl Op {
    pub fn is_branch(self) -> bool {
        matches!(self, Op::Beq | Op::Bne | Op::Blt | Op::Bge | Op::Bltu | Op::Bgeu)
    }

    pub fn is_load(self) -> bool {
        matches!(self, Op::Lb | Op::Lh | Op::Lw | Op::Lbu | Op::Lhu)
    }

    pub fn is_store(self) -> bool {
        matches!(self, Op::Sb | Op::Sh | Op::Sw)
    }

    pub fn is_csr(self) -> bool {
        matches!(self, Op::Csrrw | Op::Csrrs | Op::Csrrc | Op::Csrrwi | Op::Csrrsi | Op::Csrrci)
    }

    /// Whether the ALU is busy for this op (arithmetic, comparison or address
    /// computation).
    pub fn uses_alu(self) -> bool {
        !matches!(
            self,
            Op::Lui | Op::Fence | Op::Ecall | Op::Ebreak | Op::Mret | Op::Wfi | Op::Mmul
        ) && !self.is_csr()
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Op::Lui => "lui",
            Op::Auipc => "auipc",
            Op::Jal => "jal",
            Op::Jalr => "jalr",
            Op::Beq => "beq",
            Op::Bne => "bne",
            Op::Blt => "blt",
            Op::Bge => "bge",
            Op::Bltu => "bltu",
            Op::Bgeu => "bgeu",
            Op::Lb => "lb",
            Op::Lh => "lh",
            Op::Lw => "lw",
            Op::Lbu => "lbu",
            Op::Lhu => "lhu",
            Op::Sb => "sb",
            Op::Sh => "sh",
            Op::Sw => "sw",
            Op::Addi => "addi",
            Op::Slti => "slti",
            Op::Sltiu => "sltiu",
            Op::Xori => "xori",
            Op::Ori => "ori",
            Op::Andi => "andi",
            Op::Slli => "slli",
            Op::Srli => "srli",
            Op::Srai => "srai",
            Op::Add => "add",
            Op::Sub => "sub",
            Op::Sll => "sll",
            Op::Slt => "slt",
            Op::Sltu => "sltu",
            Op::Xor => "xor",
            Op::Srl => "srl",
            Op::Sra => "sra",
            Op::Or => "or",
            Op::And => "and",
            Op::Fence => "fence",
            Op::Ecall => "ecall",
            Op::Ebreak => "ebreak",
            Op::Mret => "mret",
            Op::Wfi => "wfi",
            Op::Csrrw => "csrrw",
            Op::Csrrs => "csrrs",
            Op::Csrrc => "csrrc",
            Op::Csrrwi => "csrrwi",
            Op::Csrrsi => "csrrsi",
            Op::Csrrci => "csrrci",
            Op::Mmul => "mmul",
        }
    }
}

/// Normalized form of a fetched instruction.
///
/// For CSR instructions `imm` carries the 12-bit CSR address and, in the
/// immediate forms, `rs1` carries the 5-bit zero-extended immediate. For
/// MMUL, `rd` names the register holding the result address (it is read,
/// never written) and `len_field` is the encoded length (`words - 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DecodedInstruction {
    pub op: Op,
    pub rd: u8,
    pub rs1: u8,
    pub rs2: u8,
    pub rs3: u8,
    pub imm: i32,
    pub len_field: u8,
    pub compressed: bool,
}

impl DecodedInstruction {
    pub fn new(op: Op) -> Self {
        Self {
            op,
            rd: 0,
            rs1: 0,
            rs2: 0,
            rs3: 0,
            imm: 0,
            len_field: 0,
            compressed: false,
        }
    }

    pub fn r(op: Op, rd: u8, rs1: u8, rs2: u8) -> Self {
        Self { rd, rs1, rs2, ..Self::new(op) }
    }

    pub fn i(op: Op, rd: u8, rs1: u8, imm: i32) -> Self {
        Self { rd, rs1, imm, ..Self::new(op) }
    }

    pub fn s(op: Op, rs1: u8, rs2: u8, imm: i32) -> Self {
        Self { rs1, rs2, imm, ..Self::new(op) }
    }

    pub fn u(op: Op, rd: u8, imm: i32) -> Self {
        Self { rd, imm, ..Self::new(op) }
    }

    pub fn csr(op: Op, rd: u8, csr: u16, rs1_or_uimm: u8) -> Self {
        Self { rd, rs1: rs1_or_uimm, imm: csr as i32, ..Self::new(op) }
    }

    pub fn mmul(rd: u8, rs1: u8, rs2: u8, rs3: u8, words: u8) -> Self {
        Self {
            rd,
            rs1,
            rs2,
            rs3,
            len_field: words.wrapping_sub(1),
            ..Self::new(Op::Mmul)
        }
    }

    /// Bytes the PC advances by when this instruction falls through.
    pub fn length(&self) -> u32 {
        if self.compressed {
            2
        } else {
            4
        }
    }

    pub fn csr_addr(&self) -> u16 {
        (self.imm as u32 & 0xFFF) as u16
    }

    /// Assembler-syntax rendering, used by program listings.
    pub fn disassemble(&self) -> String {
        let x = |r: u8| format!("x{r}");
        let m = self.op.mnemonic();
        match self.op {
            Op::Lui | Op::Auipc => format!("{m} {}, {:#x}", x(self.rd), (self.imm as u32) >> 12),
            Op::Jal => format!("{m} {}, {}", x(self.rd), self.imm),
            Op::Jalr => format!("{m} {}, {}({})", x(self.rd), self.imm, x(self.rs1)),
            o if o.is_branch() => format!("{m} {}, {}, {}", x(self.rs1), x(self.rs2), self.imm),
            o if o.is_load() => format!("{m} {}, {}({})", x(self.rd), self.imm, x(self.rs1)),
            o if o.is_store() => format!("{m} {}, {}({})", x(self.rs2), self.imm, x(self.rs1)),
            Op::Addi | Op::Slti | Op::Sltiu | Op::Xori | Op::Ori | Op::Andi | Op::Slli | Op::Srli | Op::Srai => {
                format!("{m} {}, {}, {}", x(self.rd), x(self.rs1), self.imm)
            }
            Op::Csrrw | Op::Csrrs | Op::Csrrc => {
                format!("{m} {}, {:#x}, {}", x(self.rd), self.csr_addr(), x(self.rs1))
            }
            Op::Csrrwi | Op::Csrrsi | Op::Csrrci => {
                format!("{m} {}, {:#x}, {}", x(self.rd), self.csr_addr(), self.rs1)
            }
            Op::Fence | Op::Ecall | Op::Ebreak | Op::Mret | Op::Wfi => m.to_string(),
            Op::Mmul => crate::encoding::insn_directive(self),
            _ => format!("{m} {}, {}, {}", x(self.rd), x(self.rs1), x(self.rs2)),
        }
    }
}

pub(crate) fn sign_extend(value: u32, bits: u32) -> i32 {
    let shift = 32 - bits;
    ((value << shift) as i32) >> shift
}
