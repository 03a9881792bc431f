use super::{expand_compressed, sign_extend, DecodeError, DecodedInstruction, Op};
use crate::encoding::{decode_r4, MMUL_OPCODE};

/// Decodes one fetch unit. When the low two bits are not `0b11` only the low
/// halfword is consulted and the instruction is expanded from its compressed
/// form.
pub fn decode(word: u32) -> Result<DecodedInstruction, DecodeError> {
    if word & 0b11 != 0b11 {
        return expand_compressed(word as u16);
    }
    decode_full(word)
}

fn reg(word: u32, lsb: u32) -> Result<u8, DecodeError> {
    let r = ((word >> lsb) & 0x1F) as u8;
    if r >= 16 {
        Err(DecodeError::IllegalInstruction(word))
    } else {
        Ok(r)
    }
}

fn imm_i(word: u32) -> i32 {
    (word as i32) >> 20
}

fn imm_s(word: u32) -> i32 {
    (((word & 0xFE00_0000) as i32) >> 20) | ((word >> 7) & 0x1F) as i32
}

fn imm_b(word: u32) -> i32 {
    let v = ((word >> 31) & 1) << 12 | ((word >> 7) & 1) << 11 | ((word >> 25) & 0x3F) << 5 | ((word >> 8) & 0xF) << 1;
    sign_extend(v, 13)
}

fn imm_j(word: u32) -> i32 {
    let v = ((word >> 31) & 1) << 20 | ((word >> 12) & 0xFF) << 12 | ((word >> 20) & 1) << 11 | ((word >> 21) & 0x3FF) << 1;
    sign_extend(v, 21)
}

/// Decodes a 32-bit instruction word (low bits `0b11`).
pub fn decode_full(word: u32) -> Result<DecodedInstruction, DecodeError> {
    let illegal = DecodeError::IllegalInstruction(word);
    let opcode = word & 0x7F;
    let funct3 = (word >> 12) & 0x7;
    let funct7 = word >> 25;
    let d = match opcode {
        0x37 => DecodedInstruction::u(Op::Lui, reg(word, 7)?, (word & 0xFFFF_F000) as i32),
        0x17 => DecodedInstruction::u(Op::Auipc, reg(word, 7)?, (word & 0xFFFF_F000) as i32),
        0x6F => DecodedInstruction::u(Op::Jal, reg(word, 7)?, imm_j(word)),
        0x67 if funct3 == 0 => DecodedInstruction::i(Op::Jalr, reg(word, 7)?, reg(word, 15)?, imm_i(word)),
        0x63 => {
            let op = match funct3 {
                0 => Op::Beq,
                1 => Op::Bne,
                4 => Op::Blt,
                5 => Op::Bge,
                6 => Op::Bltu,
                7 => Op::Bgeu,
                _ => return Err(illegal),
            };
            DecodedInstruction::s(op, reg(word, 15)?, reg(word, 20)?, imm_b(word))
        }
        0x03 => {
            let op = match funct3 {
                0 => Op::Lb,
                1 => Op::Lh,
                2 => Op::Lw,
                4 => Op::Lbu,
                5 => Op::Lhu,
                _ => return Err(illegal),
            };
            DecodedInstruction::i(op, reg(word, 7)?, reg(word, 15)?, imm_i(word))
        }
        0x23 => {
            let op = match funct3 {
                0 => Op::Sb,
                1 => Op::Sh,
                2 => Op::Sw,
                _ => return Err(illegal),
            };
            DecodedInstruction::s(op, reg(word, 15)?, reg(word, 20)?, imm_s(word))
        }
        0x13 => {
            let (op, imm) = match (funct3, funct7) {
                (0, _) => (Op::Addi, imm_i(word)),
                (2, _) => (Op::Slti, imm_i(word)),
                (3, _) => (Op::Sltiu, imm_i(word)),
                (4, _) => (Op::Xori, imm_i(word)),
                (6, _) => (Op::Ori, imm_i(word)),
                (7, _) => (Op::Andi, imm_i(word)),
                (1, 0) => (Op::Slli, ((word >> 20) & 0x1F) as i32),
                (5, 0) => (Op::Srli, ((word >> 20) & 0x1F) as i32),
                (5, 0x20) => (Op::Srai, ((word >> 20) & 0x1F) as i32),
                _ => return Err(illegal),
            };
            DecodedInstruction::i(op, reg(word, 7)?, reg(word, 15)?, imm)
        }
        0x33 => {
            let op = match (funct3, funct7) {
                (0, 0) => Op::Add,
                (0, 0x20) => Op::Sub,
                (1, 0) => Op::Sll,
                (2, 0) => Op::Slt,
                (3, 0) => Op::Sltu,
                (4, 0) => Op::Xor,
                (5, 0) => Op::Srl,
                (5, 0x20) => Op::Sra,
                (6, 0) => Op::Or,
                (7, 0) => Op::And,
                _ => return Err(illegal),
            };
            DecodedInstruction::r(op, reg(word, 7)?, reg(word, 15)?, reg(word, 20)?)
        }
        0x0F if funct3 == 0 => DecodedInstruction::new(Op::Fence),
        0x73 => match funct3 {
            0 => match word {
                0x0000_0073 => DecodedInstruction::new(Op::Ecall),
                0x0010_0073 => DecodedInstruction::new(Op::Ebreak),
                0x3020_0073 => DecodedInstruction::new(Op::Mret),
                0x1050_0073 => DecodedInstruction::new(Op::Wfi),
                _ => return Err(illegal),
            },
            4 => return Err(illegal),
            _ => {
                let csr = (word >> 20) as u16;
                let op = match funct3 {
                    1 => Op::Csrrw,
                    2 => Op::Csrrs,
                    3 => Op::Csrrc,
                    5 => Op::Csrrwi,
                    6 => Op::Csrrsi,
                    _ => Op::Csrrci,
                };
                let src = if funct3 >= 5 { ((word >> 15) & 0x1F) as u8 } else { reg(word, 15)? };
                DecodedInstruction::csr(op, reg(word, 7)?, csr, src)
            }
        },
        MMUL_OPCODE => {
            let f = decode_r4(word).map_err(|_| illegal)?;
            DecodedInstruction::mmul(f.rd, f.rs1, f.rs2, f.rs3, f.words)
        }
        _ => return Err(illegal),
    };
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn addi_reference_encoding() {
        assert_eq!(decode(0x0050_0093), Ok(DecodedInstruction::i(Op::Addi, 1, 0, 5)));
    }

    #[test]
    fn mmul_reference_encoding() {
        let d = decode(0x68C5_B50B).unwrap();
        assert_eq!(d.op, Op::Mmul);
        assert_eq!((d.rd, d.rs1, d.rs2, d.rs3, d.len_field), (10, 11, 12, 13, 3));
    }

    #[test]
    fn all_zero_and_all_ones_are_illegal() {
        assert_eq!(decode(0), Err(DecodeError::IllegalInstruction(0)));
        assert!(decode(0xFFFF_FFFF).is_err());
    }

    #[test]
    fn rv32e_register_limit() {
        // addi x16, x0, 1
        assert!(decode(0x0010_0813).is_err());
        // add x1, x2, x17
        assert!(decode(0x0111_00B3).is_err());
    }

    #[test]
    fn m_extension_is_absent() {
        // mul a0, a1, a2
        assert!(decode(0x02C5_8533).is_err());
    }

    #[test]
    fn immediates_sign_extend() {
        // addi x1, x1, -1
        assert_eq!(decode(0xFFF0_8093).unwrap().imm, -1);
        // sw x10, -4(x11)
        let s = decode(0xFEA5_AE23).unwrap();
        assert_eq!((s.op, s.rs1, s.rs2, s.imm), (Op::Sw, 11, 10, -4));
        // beq x0, x0, -8
        assert_eq!(decode(0xFE00_0CE3).unwrap().imm, -8);
        // jal x0, -4
        assert_eq!(decode(0xFFDF_F06F).unwrap().imm, -4);
    }
}
