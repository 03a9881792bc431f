//! C-extension expansion (and the inverse used by the program builder).
//!
//! Only encodings valid on RV32EC are accepted: floating-point loads/stores,
//! RV64-only forms and any register above x15 are illegal.

use super::{sign_extend, DecodeError, DecodedInstruction, Op};

fn bit(h: u32, n: u32) -> u32 {
    (h >> n) & 1
}

fn bits(h: u32, hi: u32, lo: u32) -> u32 {
    (h >> lo) & ((1 << (hi - lo + 1)) - 1)
}

/// Expands a 16-bit instruction into its 32-bit equivalent.
pub fn expand_compressed(halfword: u16) -> Result<DecodedInstruction, DecodeError> {
    let h = halfword as u32;
    let illegal = DecodeError::IllegalInstruction(h);
    let full_reg = |lsb: u32| -> Result<u8, DecodeError> {
        let r = bits(h, lsb + 4, lsb) as u8;
        if r >= 16 {
            Err(illegal)
        } else {
            Ok(r)
        }
    };
    let creg = |lsb: u32| 8 + bits(h, lsb + 2, lsb) as u8;
    let funct3 = bits(h, 15, 13);

    let d = match (h & 0b11, funct3) {
        (0b11, _) => return Err(illegal),
        // C.ADDI4SPN
        (0b00, 0b000) => {
            let imm = bits(h, 12, 11) << 4 | bits(h, 10, 7) << 6 | bit(h, 6) << 2 | bit(h, 5) << 3;
            if imm == 0 {
                return Err(illegal);
            }
            DecodedInstruction::i(Op::Addi, creg(2), 2, imm as i32)
        }
        // C.LW
        (0b00, 0b010) => {
            let imm = bits(h, 12, 10) << 3 | bit(h, 6) << 2 | bit(h, 5) << 6;
            DecodedInstruction::i(Op::Lw, creg(2), creg(7), imm as i32)
        }
        // C.SW
        (0b00, 0b110) => {
            let imm = bits(h, 12, 10) << 3 | bit(h, 6) << 2 | bit(h, 5) << 6;
            DecodedInstruction::s(Op::Sw, creg(7), creg(2), imm as i32)
        }
        (0b00, _) => return Err(illegal),

        // C.ADDI / C.NOP
        (0b01, 0b000) => {
            let rd = full_reg(7)?;
            let imm = sign_extend(bit(h, 12) << 5 | bits(h, 6, 2), 6);
            DecodedInstruction::i(Op::Addi, rd, rd, imm)
        }
        // C.JAL (RV32 only)
        (0b01, 0b001) => DecodedInstruction::u(Op::Jal, 1, cj_offset(h)),
        // C.LI
        (0b01, 0b010) => {
            let imm = sign_extend(bit(h, 12) << 5 | bits(h, 6, 2), 6);
            DecodedInstruction::i(Op::Addi, full_reg(7)?, 0, imm)
        }
        (0b01, 0b011) => {
            let rd = full_reg(7)?;
            if rd == 2 {
                // C.ADDI16SP
                let imm = bit(h, 12) << 9 | bit(h, 6) << 4 | bit(h, 5) << 6 | bits(h, 4, 3) << 7 | bit(h, 2) << 5;
                if imm == 0 {
                    return Err(illegal);
                }
                DecodedInstruction::i(Op::Addi, 2, 2, sign_extend(imm, 10))
            } else {
                // C.LUI
                let imm = bit(h, 12) << 17 | bits(h, 6, 2) << 12;
                if imm == 0 {
                    return Err(illegal);
                }
                DecodedInstruction::u(Op::Lui, rd, sign_extend(imm, 18))
            }
        }
        (0b01, 0b100) => {
            let rd = creg(7);
            match bits(h, 11, 10) {
                0b00 | 0b01 => {
                    if bit(h, 12) != 0 {
                        return Err(illegal);
                    }
                    let op = if bits(h, 11, 10) == 0 { Op::Srli } else { Op::Srai };
                    DecodedInstruction::i(op, rd, rd, bits(h, 6, 2) as i32)
                }
                0b10 => {
                    let imm = sign_extend(bit(h, 12) << 5 | bits(h, 6, 2), 6);
                    DecodedInstruction::i(Op::Andi, rd, rd, imm)
                }
                _ => {
                    if bit(h, 12) != 0 {
                        return Err(illegal);
                    }
                    let op = match bits(h, 6, 5) {
                        0b00 => Op::Sub,
                        0b01 => Op::Xor,
                        0b10 => Op::Or,
                        _ => Op::And,
                    };
                    DecodedInstruction::r(op, rd, rd, creg(2))
                }
            }
        }
        // C.J
        (0b01, 0b101) => DecodedInstruction::u(Op::Jal, 0, cj_offset(h)),
        // C.BEQZ / C.BNEZ
        (0b01, 0b110 | 0b111) => {
            let imm = bit(h, 12) << 8 | bits(h, 11, 10) << 3 | bits(h, 6, 5) << 6 | bits(h, 4, 3) << 1 | bit(h, 2) << 5;
            let op = if funct3 == 0b110 { Op::Beq } else { Op::Bne };
            DecodedInstruction::s(op, creg(7), 0, sign_extend(imm, 9))
        }

        // C.SLLI
        (0b10, 0b000) => {
            if bit(h, 12) != 0 {
                return Err(illegal);
            }
            let rd = full_reg(7)?;
            DecodedInstruction::i(Op::Slli, rd, rd, bits(h, 6, 2) as i32)
        }
        // C.LWSP
        (0b10, 0b010) => {
            let rd = full_reg(7)?;
            if rd == 0 {
                return Err(illegal);
            }
            let imm = bit(h, 12) << 5 | bits(h, 6, 4) << 2 | bits(h, 3, 2) << 6;
            DecodedInstruction::i(Op::Lw, rd, 2, imm as i32)
        }
        (0b10, 0b100) => {
            let rs1 = full_reg(7)?;
            let rs2 = full_reg(2)?;
            match (bit(h, 12), rs1, rs2) {
                (0, 0, 0) => return Err(illegal),
                // C.JR
                (0, _, 0) => DecodedInstruction::i(Op::Jalr, 0, rs1, 0),
                // C.MV
                (0, _, _) => DecodedInstruction::r(Op::Add, rs1, 0, rs2),
                // C.EBREAK
                (_, 0, 0) => DecodedInstruction::new(Op::Ebreak),
                // C.JALR
                (_, _, 0) => DecodedInstruction::i(Op::Jalr, 1, rs1, 0),
                // C.ADD
                _ => DecodedInstruction::r(Op::Add, rs1, rs1, rs2),
            }
        }
        // C.SWSP
        (0b10, 0b110) => {
            let imm = bits(h, 12, 9) << 2 | bits(h, 8, 7) << 6;
            DecodedInstruction::s(Op::Sw, 2, full_reg(2)?, imm as i32)
        }
        (0b10, _) => return Err(illegal),
        _ => unreachable!("two-bit quadrant"),
    };
    Ok(DecodedInstruction { compressed: true, ..d })
}

fn cj_offset(h: u32) -> i32 {
    let imm = bit(h, 12) << 11
        | bit(h, 11) << 4
        | bits(h, 10, 9) << 8
        | bit(h, 8) << 10
        | bit(h, 7) << 6
        | bit(h, 6) << 7
        | bits(h, 5, 3) << 1
        | bit(h, 2) << 5;
    sign_extend(imm, 12)
}

fn is_creg(r: u8) -> bool {
    (8..16).contains(&r)
}

fn fits_signed(v: i32, bits: u32) -> bool {
    let lim = 1i32 << (bits - 1);
    (-lim..lim).contains(&v)
}

/// Finds a 16-bit encoding whose expansion is exactly `d` (ignoring the
/// `compressed` flag), if one exists.
pub fn compress(d: &DecodedInstruction) -> Option<u16> {
    let enc = compress_unchecked(d)?;
    // Canonical forms only: the expansion must round-trip.
    match expand_compressed(enc) {
        Ok(e) if DecodedInstruction { compressed: false, ..e } == DecodedInstruction { compressed: false, ..*d } => {
            Some(enc)
        }
        _ => None,
    }
}

fn compress_unchecked(d: &DecodedInstruction) -> Option<u16> {
    let (rd, rs1, rs2, imm) = (d.rd as u32, d.rs1 as u32, d.rs2 as u32, d.imm);
    let ci = |funct3: u32, rd: u32, imm6: u32, op: u32| -> u16 {
        (funct3 << 13 | ((imm6 >> 5) & 1) << 12 | rd << 7 | (imm6 & 0x1F) << 2 | op) as u16
    };
    let h = match d.op {
        Op::Addi if rd == 0 && rs1 == 0 && imm == 0 => return Some(0x0001),
        Op::Addi if rs1 == 0 && rd != 0 && fits_signed(imm, 6) => return Some(ci(0b010, rd, imm as u32, 0b01)),
        Op::Addi if rd == rs1 && rd != 0 && fits_signed(imm, 6) => return Some(ci(0b000, rd, imm as u32, 0b01)),
        Op::Addi if rd == 2 && rs1 == 2 && imm != 0 && imm % 16 == 0 && fits_signed(imm, 10) => {
            let u = imm as u32;
            0b011 << 13 | ((u >> 9) & 1) << 12 | 2 << 7 | ((u >> 4) & 1) << 6 | ((u >> 6) & 1) << 5 | ((u >> 7) & 3) << 3 | ((u >> 5) & 1) << 2 | 0b01
        }
        Op::Addi if rs1 == 2 && is_creg(d.rd) && imm > 0 && imm < 1024 && imm % 4 == 0 => {
            let u = imm as u32;
            ((u >> 4) & 3) << 11 | ((u >> 6) & 0xF) << 7 | ((u >> 2) & 1) << 6 | ((u >> 3) & 1) << 5 | (rd - 8) << 2
        }
        Op::Lui if rd != 0 && rd != 2 && imm != 0 && fits_signed(imm >> 12, 6) && imm & 0xFFF == 0 => {
            return Some(ci(0b011, rd, (imm >> 12) as u32, 0b01))
        }
        Op::Slli if rd == rs1 && rd != 0 && imm > 0 => return Some(ci(0b000, rd, imm as u32, 0b10)),
        Op::Srli | Op::Srai if rd == rs1 && is_creg(d.rd) && imm > 0 => {
            let f = if d.op == Op::Srli { 0 } else { 1 };
            0b100 << 13 | f << 10 | (rd - 8) << 7 | (imm as u32 & 0x1F) << 2 | 0b01
        }
        Op::Andi if rd == rs1 && is_creg(d.rd) && fits_signed(imm, 6) => {
            let u = imm as u32;
            0b100 << 13 | ((u >> 5) & 1) << 12 | 0b10 << 10 | (rd - 8) << 7 | (u & 0x1F) << 2 | 0b01
        }
        Op::Sub | Op::Xor | Op::Or | Op::And if rd == rs1 && is_creg(d.rd) && is_creg(d.rs2) => {
            let f = match d.op {
                Op::Sub => 0,
                Op::Xor => 1,
                Op::Or => 2,
                _ => 3,
            };
            0b100011 << 10 | (rd - 8) << 7 | f << 5 | (rs2 - 8) << 2 | 0b01
        }
        Op::Add if rs1 == 0 && rd != 0 && rs2 != 0 => 0b100 << 13 | rd << 7 | rs2 << 2 | 0b10,
        Op::Add if rd == rs1 && rd != 0 && rs2 != 0 => 0b1001 << 12 | rd << 7 | rs2 << 2 | 0b10,
        Op::Jalr if imm == 0 && rs1 != 0 && rd == 0 => 0b1000 << 12 | rs1 << 7 | 0b10,
        Op::Jalr if imm == 0 && rs1 != 0 && rd == 1 => 0b1001 << 12 | rs1 << 7 | 0b10,
        Op::Ebreak => 0x9002,
        Op::Lw if rs1 == 2 && rd != 0 && (0..256).contains(&imm) && imm % 4 == 0 => {
            let u = imm as u32;
            0b010 << 13 | ((u >> 5) & 1) << 12 | rd << 7 | ((u >> 2) & 7) << 4 | ((u >> 6) & 3) << 2 | 0b10
        }
        Op::Sw if rs1 == 2 && (0..256).contains(&imm) && imm % 4 == 0 => {
            let u = imm as u32;
            0b110 << 13 | ((u >> 2) & 0xF) << 9 | ((u >> 6) & 3) << 7 | rs2 << 2 | 0b10
        }
        Op::Lw | Op::Sw if is_creg(d.rs1) && (0..128).contains(&imm) && imm % 4 == 0 => {
            let u = imm as u32;
            let (funct3, r) = if d.op == Op::Lw { (0b010, rd) } else { (0b110, rs2) };
            if !is_creg(r as u8) {
                return None;
            }
            funct3 << 13 | ((u >> 3) & 7) << 10 | (rs1 - 8) << 7 | ((u >> 2) & 1) << 6 | ((u >> 6) & 1) << 5 | (r - 8) << 2
        }
        Op::Beq | Op::Bne if rs2 == 0 && is_creg(d.rs1) && imm % 2 == 0 && fits_signed(imm, 9) => {
            let u = imm as u32;
            let f = if d.op == Op::Beq { 0b110 } else { 0b111 };
            f << 13
                | ((u >> 8) & 1) << 12
                | ((u >> 3) & 3) << 10
                | (rs1 - 8) << 7
                | ((u >> 6) & 3) << 5
                | ((u >> 1) & 3) << 3
                | ((u >> 5) & 1) << 2
                | 0b01
        }
        Op::Jal if (rd == 0 || rd == 1) && imm % 2 == 0 && fits_signed(imm, 12) => {
            let u = imm as u32;
            let f = if rd == 0 { 0b101 } else { 0b001 };
            f << 13
                | ((u >> 11) & 1) << 12
                | ((u >> 4) & 1) << 11
                | ((u >> 8) & 3) << 9
                | ((u >> 10) & 1) << 8
                | ((u >> 6) & 1) << 7
                | ((u >> 7) & 1) << 6
                | ((u >> 1) & 7) << 3
                | ((u >> 5) & 1) << 2
                | 0b01
        }
        _ => return None,
    };
    Some(h as u16)
}
