use super::{DecodedInstruction, Op};
use crate::encoding::encode_r4;

fn r_type(funct7: u32, rs2: u8, rs1: u8, funct3: u32, rd: u8, opcode: u32) -> u32 {
    funct7 << 25 | (rs2 as u32) << 20 | (rs1 as u32) << 15 | funct3 << 12 | (rd as u32) << 7 | opcode
}

fn i_type(imm: i32, rs1: u8, funct3: u32, rd: u8, opcode: u32) -> u32 {
    ((imm as u32) & 0xFFF) << 20 | (rs1 as u32) << 15 | funct3 << 12 | (rd as u32) << 7 | opcode
}

fn s_type(imm: i32, rs2: u8, rs1: u8, funct3: u32) -> u32 {
    let u = imm as u32;
    ((u >> 5) & 0x7F) << 25 | (rs2 as u32) << 20 | (rs1 as u32) << 15 | funct3 << 12 | (u & 0x1F) << 7 | 0x23
}

fn b_type(imm: i32, rs2: u8, rs1: u8, funct3: u32) -> u32 {
    let u = imm as u32;
    ((u >> 12) & 1) << 31
        | ((u >> 5) & 0x3F) << 25
        | (rs2 as u32) << 20
        | (rs1 as u32) << 15
        | funct3 << 12
        | ((u >> 1) & 0xF) << 8
        | ((u >> 11) & 1) << 7
        | 0x63
}

fn j_type(imm: i32, rd: u8) -> u32 {
    let u = imm as u32;
    ((u >> 20) & 1) << 31 | ((u >> 1) & 0x3FF) << 21 | ((u >> 11) & 1) << 20 | ((u >> 12) & 0xFF) << 12 | (rd as u32) << 7 | 0x6F
}

/// 32-bit encoding of a decoded instruction. Immediates are truncated to their
/// field widths; callers are responsible for range checks.
pub fn encode(d: &DecodedInstruction) -> u32 {
    let DecodedInstruction { rd, rs1, rs2, imm, .. } = *d;
    match d.op {
        Op::Lui => (imm as u32 & 0xFFFF_F000) | (rd as u32) << 7 | 0x37,
        Op::Auipc => (imm as u32 & 0xFFFF_F000) | (rd as u32) << 7 | 0x17,
        Op::Jal => j_type(imm, rd),
        Op::Jalr => i_type(imm, rs1, 0, rd, 0x67),
        Op::Beq => b_type(imm, rs2, rs1, 0),
        Op::Bne => b_type(imm, rs2, rs1, 1),
        Op::Blt => b_type(imm, rs2, rs1, 4),
        Op::Bge => b_type(imm, rs2, rs1, 5),
        Op::Bltu => b_type(imm, rs2, rs1, 6),
        Op::Bgeu => b_type(imm, rs2, rs1, 7),
        Op::Lb => i_type(imm, rs1, 0, rd, 0x03),
        Op::Lh => i_type(imm, rs1, 1, rd, 0x03),
        Op::Lw => i_type(imm, rs1, 2, rd, 0x03),
        Op::Lbu => i_type(imm, rs1, 4, rd, 0x03),
        Op::Lhu => i_type(imm, rs1, 5, rd, 0x03),
        Op::Sb => s_type(imm, rs2, rs1, 0),
        Op::Sh => s_type(imm, rs2, rs1, 1),
        Op::Sw => s_type(imm, rs2, rs1, 2),
        Op::Addi => i_type(imm, rs1, 0, rd, 0x13),
        Op::Slti => i_type(imm, rs1, 2, rd, 0x13),
        Op::Sltiu => i_type(imm, rs1, 3, rd, 0x13),
        Op::Xori => i_type(imm, rs1, 4, rd, 0x13),
        Op::Ori => i_type(imm, rs1, 6, rd, 0x13),
        Op::Andi => i_type(imm, rs1, 7, rd, 0x13),
        Op::Slli => i_type(imm & 0x1F, rs1, 1, rd, 0x13),
        Op::Srli => i_type(imm & 0x1F, rs1, 5, rd, 0x13),
        Op::Srai => i_type((imm & 0x1F) | 0x400, rs1, 5, rd, 0x13),
        Op::Add => r_type(0, rs2, rs1, 0, rd, 0x33),
        Op::Sub => r_type(0x20, rs2, rs1, 0, rd, 0x33),
        Op::Sll => r_type(0, rs2, rs1, 1, rd, 0x33),
        Op::Slt => r_type(0, rs2, rs1, 2, rd, 0x33),
        Op::Sltu => r_type(0, rs2, rs1, 3, rd, 0x33),
        Op::Xor => r_type(0, rs2, rs1, 4, rd, 0x33),
        Op::Srl => r_type(0, rs2, rs1, 5, rd, 0x33),
        Op::Sra => r_type(0x20, rs2, rs1, 5, rd, 0x33),
        Op::Or => r_type(0, rs2, rs1, 6, rd, 0x33),
        Op::And => r_type(0, rs2, rs1, 7, rd, 0x33),
        Op::Fence => 0x0FF0_000F,
        Op::Ecall => 0x0000_0073,
        Op::Ebreak => 0x0010_0073,
        Op::Mret => 0x3020_0073,
        Op::Wfi => 0x1050_0073,
        Op::Csrrw => i_type(imm, rs1, 1, rd, 0x73),
        Op::Csrrs => i_type(imm, rs1, 2, rd, 0x73),
        Op::Csrrc => i_type(imm, rs1, 3, rd, 0x73),
        Op::Csrrwi => i_type(imm, rs1, 5, rd, 0x73),
        Op::Csrrsi => i_type(imm, rs1, 6, rd, 0x73),
        Op::Csrrci => i_type(imm, rs1, 7, rd, 0x73),
        Op::Mmul => encode_r4(rd, rs1, d.rs2, d.rs3, d.len_field as u32 + 1)
            .expect("MMUL fields validated at construction"),
    }
}
