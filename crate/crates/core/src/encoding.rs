//! Encodings of the MMUL instruction.
//!
//! R4-type is the executable format:
//!
//! ```text
//!  31   27 26 25 24  20 19  15 14 12 11   7 6      0
//! [  rs3  | fnc2 |  rs2 |  rs1 | fnc3 |  rd  | opcode ]
//! ```
//!
//! The operand length in words is encoded as `len = words - 1` split across
//! `fnc2 = len[4:3]` and `fnc3 = len[2:0]`. The opcode is custom-0.
//! `rs1`, `rs2`, `rs3` hold the addresses of A, B and N; `rd` holds the
//! address of the result P and is read as a source, never written.
//!
//! I-type and R-type variants are modelled only for capacity analysis and
//! memory-layout documentation.

use serde::Serialize;
use thiserror::Error;

use crate::isa::DecodedInstruction;

/// custom-0 major opcode.
pub const MMUL_OPCODE: u32 = 0b000_1011;
/// Longest operand the 5-bit R4 length field can express, in words.
pub const R4_MAX_WORDS: u8 = 32;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum EncodingError {
    #[error("register x{0} is not available under RV32E")]
    RegisterOutOfRange(u8),
    #[error("operand length of {0} words is outside 1..=32")]
    WordsOutOfRange(u32),
    #[error("opcode {0:#04x} is not MMUL")]
    NotMmul(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct R4Fields {
    pub rd: u8,
    pub rs1: u8,
    pub rs2: u8,
    pub rs3: u8,
    pub words: u8,
}

pub fn encode_r4(rd: u8, rs1: u8, rs2: u8, rs3: u8, words: u32) -> Result<u32, EncodingError> {
    for r in [rd, rs1, rs2, rs3] {
        if r >= 16 {
            return Err(EncodingError::RegisterOutOfRange(r));
        }
    }
    if !(1..=R4_MAX_WORDS as u32).contains(&words) {
        return Err(EncodingError::WordsOutOfRange(words));
    }
    let len = words - 1;
    let fnc2 = (len >> 3) & 0b11;
    let fnc3 = len & 0b111;
    Ok((rs3 as u32) << 27
        | fnc2 << 25
        | (rs2 as u32) << 20
        | (rs1 as u32) << 15
        | fnc3 << 12
        | (rd as u32) << 7
        | MMUL_OPCODE)
}

pub fn decode_r4(word: u32) -> Result<R4Fields, EncodingError> {
    let opcode = word & 0x7F;
    if opcode != MMUL_OPCODE {
        return Err(EncodingError::NotMmul(opcode));
    }
    let field = |lsb: u32| -> Result<u8, EncodingError> {
        let r = ((word >> lsb) & 0x1F) as u8;
        if r >= 16 {
            Err(EncodingError::RegisterOutOfRange(r))
        } else {
            Ok(r)
        }
    };
    let len = ((word >> 25) & 0b11) << 3 | ((word >> 12) & 0b111);
    Ok(R4Fields {
        rd: field(7)?,
        rs1: field(15)?,
        rs2: field(20)?,
        rs3: field(27)?,
        words: len as u8 + 1,
    })
}

/// `.insn r4` assembler directive producing the same encoding, for cross-checks
/// against an external toolchain.
pub fn insn_directive(d: &DecodedInstruction) -> String {
    let len = d.len_field as u32;
    format!(
        ".insn r4 {:#x}, {}, {}, x{}, x{}, x{}, x{}",
        MMUL_OPCODE,
        len & 0b111,
        (len >> 3) & 0b11,
        d.rd,
        d.rs1,
        d.rs2,
        d.rs3
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Format {
    IType,
    RType,
    R4Type,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LengthUnit {
    Bits,
    Words,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FormatCapacity {
    pub format: Format,
    pub length_bits_available: u32,
    pub length_unit: LengthUnit,
    pub max_operand_bits: u64,
}

/// Length-field budget of each candidate format: I-type has fnc3 + imm,
/// R-type fnc3 + fnc7, R4-type only fnc3 + fnc2.
pub fn capacity(format: Format, xlen: u32) -> FormatCapacity {
    let (length_bits_available, length_unit) = match format {
        Format::IType => (3 + 12, LengthUnit::Bits),
        Format::RType => (3 + 7, LengthUnit::Bits),
        Format::R4Type => (3 + 2, LengthUnit::Words),
    };
    let unit = match length_unit {
        LengthUnit::Bits => 1,
        LengthUnit::Words => xlen as u64,
    };
    FormatCapacity {
        format,
        length_bits_available,
        length_unit,
        max_operand_bits: (1u64 << length_bits_available) * unit,
    }
}

/// Register contents an MMUL reads, by format. I-type uses only `rs1`,
/// R-type `rs1` and `rs2`; R4-type uses all four.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BaseRegs {
    pub rs1: u32,
    pub rs2: u32,
    pub rs3: u32,
    pub rd: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperandAddresses {
    pub addr_a: u32,
    pub addr_b: u32,
    pub addr_n: u32,
    pub addr_p: u32,
}

/// Where each operand lives for a given format.
///
/// The fixed layouts place operands back to back, each `4 * words` bytes
/// long: I-type as A, B, N, P from `rs1`; R-type as A, B, P from `rs1` with
/// N at `rs2`.
pub fn layout_addresses(format: Format, regs: BaseRegs, words: u32) -> OperandAddresses {
    let stride = 4 * words;
    match format {
        Format::IType => OperandAddresses {
            addr_a: regs.rs1,
            addr_b: regs.rs1.wrapping_add(stride),
            addr_n: regs.rs1.wrapping_add(2 * stride),
            addr_p: regs.rs1.wrapping_add(3 * stride),
        },
        Format::RType => OperandAddresses {
            addr_a: regs.rs1,
            addr_b: regs.rs1.wrapping_add(stride),
            addr_p: regs.rs1.wrapping_add(2 * stride),
            addr_n: regs.rs2,
        },
        Format::R4Type => OperandAddresses {
            addr_a: regs.rs1,
            addr_b: regs.rs2,
            addr_n: regs.rs3,
            addr_p: regs.rd,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_encoding() {
        assert_eq!(encode_r4(10, 11, 12, 13, 4), Ok(0x68C5_B50B));
        assert_eq!(encode_r4(0, 0, 0, 0, 1), Ok(0x0000_000B));
        assert_eq!(
            decode_r4(0x68C5_B50B),
            Ok(R4Fields { rd: 10, rs1: 11, rs2: 12, rs3: 13, words: 4 })
        );
    }

    #[test]
    fn errors() {
        assert_eq!(encode_r4(1, 1, 1, 1, 33), Err(EncodingError::WordsOutOfRange(33)));
        assert_eq!(encode_r4(1, 1, 1, 1, 0), Err(EncodingError::WordsOutOfRange(0)));
        assert_eq!(encode_r4(16, 1, 1, 1, 1), Err(EncodingError::RegisterOutOfRange(16)));
        assert_eq!(decode_r4(0x0000_0033), Err(EncodingError::NotMmul(0x33)));
        // rs3 = x31
        assert_eq!(decode_r4(0xF800_000B), Err(EncodingError::RegisterOutOfRange(31)));
    }

    #[test]
    fn length_field_split() {
        // words = 32 -> len = 31 -> fnc2 = 0b11, fnc3 = 0b111
        let w = encode_r4(0, 0, 0, 0, 32).unwrap();
        assert_eq!((w >> 25) & 3, 3);
        assert_eq!((w >> 12) & 7, 7);
        // words = 9 -> len = 8 -> fnc2 = 0b01, fnc3 = 0
        let w = encode_r4(0, 0, 0, 0, 9).unwrap();
        assert_eq!(((w >> 25) & 3, (w >> 12) & 7), (1, 0));
    }

    #[test]
    fn capacities() {
        assert_eq!(capacity(Format::IType, 32).max_operand_bits, 32768);
        assert_eq!(capacity(Format::IType, 32).length_bits_available, 15);
        assert_eq!(capacity(Format::RType, 32).max_operand_bits, 1024);
        assert_eq!(capacity(Format::RType, 32).length_bits_available, 10);
        assert_eq!(capacity(Format::R4Type, 32).max_operand_bits, 1024);
        let r4 = capacity(Format::R4Type, 64);
        assert_eq!((r4.length_bits_available, r4.length_unit, r4.max_operand_bits), (5, LengthUnit::Words, 2048));
    }

    #[test]
    fn layouts() {
        let i = layout_addresses(Format::IType, BaseRegs { rs1: 0x1000, ..Default::default() }, 4);
        assert_eq!((i.addr_a, i.addr_b, i.addr_n, i.addr_p), (0x1000, 0x1010, 0x1020, 0x1030));
        let r4 = layout_addresses(Format::R4Type, BaseRegs { rs1: 0x100, rs2: 0x200, rs3: 0x300, rd: 0x400 }, 4);
        assert_eq!((r4.addr_a, r4.addr_b, r4.addr_n, r4.addr_p), (0x100, 0x200, 0x300, 0x400));
        let r = layout_addresses(Format::RType, BaseRegs { rs1: 0x1000, rs2: 0x2000, ..Default::default() }, 1);
        assert_eq!((r.addr_a, r.addr_b, r.addr_p, r.addr_n), (0x1000, 0x1004, 0x1008, 0x2000));
    }

    #[test]
    fn directive_text() {
        let d = crate::isa::decode(0x68C5_B50B).unwrap();
        assert_eq!(insn_directive(&d), ".insn r4 0xb, 3, 0, x10, x11, x12, x13");
    }
}
