// Generated by gen_reference.py from clang's RISC-V assembler; do not edit.
/// (assembly, encoding, compressed, expected decode)
pub type Case = (&'static str, u32, bool, fn() -> DecodedInstruction);

pub const REFERENCE: &[Case] = &[
    ("add a0, a1, a2", 0x00c58533, false, || DecodedInstruction::r(Op::Add, 10, 11, 12)),
    ("add t0, s1, a5", 0x00f482b3, false, || DecodedInstruction::r(Op::Add, 5, 9, 15)),
    ("sub a0, a1, a2", 0x40c58533, false, || DecodedInstruction::r(Op::Sub, 10, 11, 12)),
    ("sub t0, s1, a5", 0x40f482b3, false, || DecodedInstruction::r(Op::Sub, 5, 9, 15)),
    ("sll a0, a1, a2", 0x00c59533, false, || DecodedInstruction::r(Op::Sll, 10, 11, 12)),
    ("sll t0, s1, a5", 0x00f492b3, false, || DecodedInstruction::r(Op::Sll, 5, 9, 15)),
    ("slt a0, a1, a2", 0x00c5a533, false, || DecodedInstruction::r(Op::Slt, 10, 11, 12)),
    ("slt t0, s1, a5", 0x00f4a2b3, false, || DecodedInstruction::r(Op::Slt, 5, 9, 15)),
    ("sltu a0, a1, a2", 0x00c5b533, false, || DecodedInstruction::r(Op::Sltu, 10, 11, 12)),
    ("sltu t0, s1, a5", 0x00f4b2b3, false, || DecodedInstruction::r(Op::Sltu, 5, 9, 15)),
    ("xor a0, a1, a2", 0x00c5c533, false, || DecodedInstruction::r(Op::Xor, 10, 11, 12)),
    ("xor t0, s1, a5", 0x00f4c2b3, false, || DecodedInstruction::r(Op::Xor, 5, 9, 15)),
    ("srl a0, a1, a2", 0x00c5d533, false, || DecodedInstruction::r(Op::Srl, 10, 11, 12)),
    ("srl t0, s1, a5", 0x00f4d2b3, false, || DecodedInstruction::r(Op::Srl, 5, 9, 15)),
    ("sra a0, a1, a2", 0x40c5d533, false, || DecodedInstruction::r(Op::Sra, 10, 11, 12)),
    ("sra t0, s1, a5", 0x40f4d2b3, false, || DecodedInstruction::r(Op::Sra, 5, 9, 15)),
    ("or a0, a1, a2", 0x00c5e533, false, || DecodedInstruction::r(Op::Or, 10, 11, 12)),
    ("or t0, s1, a5", 0x00f4e2b3, false, || DecodedInstruction::r(Op::Or, 5, 9, 15)),
    ("and a0, a1, a2", 0x00c5f533, false, || DecodedInstruction::r(Op::And, 10, 11, 12)),
    ("and t0, s1, a5", 0x00f4f2b3, false, || DecodedInstruction::r(Op::And, 5, 9, 15)),
    ("addi a3, a4, 5", 0x00570693, false, || DecodedInstruction::i(Op::Addi, 13, 14, 5)),
    ("addi a3, a4, -1", 0xfff70693, false, || DecodedInstruction::i(Op::Addi, 13, 14, -1)),
    ("addi a3, a4, 2047", 0x7ff70693, false, || DecodedInstruction::i(Op::Addi, 13, 14, 2047)),
    ("addi a3, a4, -2048", 0x80070693, false, || DecodedInstruction::i(Op::Addi, 13, 14, -2048)),
    ("slti a3, a4, -7", 0xff972693, false, || DecodedInstruction::i(Op::Slti, 13, 14, -7)),
    ("sltiu a3, a4, 100", 0x06473693, false, || DecodedInstruction::i(Op::Sltiu, 13, 14, 100)),
    ("xori a3, a4, -1", 0xfff74693, false, || DecodedInstruction::i(Op::Xori, 13, 14, -1)),
    ("ori a3, a4, 1365", 0x55576693, false, || DecodedInstruction::i(Op::Ori, 13, 14, 1365)),
    ("andi a3, a4, 240", 0x0f077693, false, || DecodedInstruction::i(Op::Andi, 13, 14, 240)),
    ("slli s0, s1, 1", 0x00149413, false, || DecodedInstruction::i(Op::Slli, 8, 9, 1)),
    ("slli s0, s1, 31", 0x01f49413, false, || DecodedInstruction::i(Op::Slli, 8, 9, 31)),
    ("srli s0, s1, 7", 0x0074d413, false, || DecodedInstruction::i(Op::Srli, 8, 9, 7)),
    ("srai s0, s1, 31", 0x41f4d413, false, || DecodedInstruction::i(Op::Srai, 8, 9, 31)),
    ("lb a0, -4(sp)", 0xffc10503, false, || DecodedInstruction::i(Op::Lb, 10, 2, -4)),
    ("lb t2, 2047(a5)", 0x7ff78383, false, || DecodedInstruction::i(Op::Lb, 7, 15, 2047)),
    ("lh a0, -4(sp)", 0xffc11503, false, || DecodedInstruction::i(Op::Lh, 10, 2, -4)),
    ("lh t2, 2047(a5)", 0x7ff79383, false, || DecodedInstruction::i(Op::Lh, 7, 15, 2047)),
    ("lw a0, -4(sp)", 0xffc12503, false, || DecodedInstruction::i(Op::Lw, 10, 2, -4)),
    ("lw t2, 2047(a5)", 0x7ff7a383, false, || DecodedInstruction::i(Op::Lw, 7, 15, 2047)),
    ("lbu a0, -4(sp)", 0xffc14503, false, || DecodedInstruction::i(Op::Lbu, 10, 2, -4)),
    ("lbu t2, 2047(a5)", 0x7ff7c383, false, || DecodedInstruction::i(Op::Lbu, 7, 15, 2047)),
    ("lhu a0, -4(sp)", 0xffc15503, false, || DecodedInstruction::i(Op::Lhu, 10, 2, -4)),
    ("lhu t2, 2047(a5)", 0x7ff7d383, false, || DecodedInstruction::i(Op::Lhu, 7, 15, 2047)),
    ("sb a1, 12(sp)", 0x00b10623, false, || DecodedInstruction::s(Op::Sb, 2, 11, 12)),
    ("sb t1, -2048(gp)", 0x80618023, false, || DecodedInstruction::s(Op::Sb, 3, 6, -2048)),
    ("sh a1, 12(sp)", 0x00b11623, false, || DecodedInstruction::s(Op::Sh, 2, 11, 12)),
    ("sh t1, -2048(gp)", 0x80619023, false, || DecodedInstruction::s(Op::Sh, 3, 6, -2048)),
    ("sw a1, 12(sp)", 0x00b12623, false, || DecodedInstruction::s(Op::Sw, 2, 11, 12)),
    ("sw t1, -2048(gp)", 0x8061a023, false, || DecodedInstruction::s(Op::Sw, 3, 6, -2048)),
    ("beq a0, a1, 8", 0x00b50463, false, || DecodedInstruction::s(Op::Beq, 10, 11, 8)),
    ("beq s0, zero, -4096", 0x80040063, false, || DecodedInstruction::s(Op::Beq, 8, 0, -4096)),
    ("bne a0, a1, 8", 0x00b51463, false, || DecodedInstruction::s(Op::Bne, 10, 11, 8)),
    ("bne s0, zero, -4096", 0x80041063, false, || DecodedInstruction::s(Op::Bne, 8, 0, -4096)),
    ("blt a0, a1, 8", 0x00b54463, false, || DecodedInstruction::s(Op::Blt, 10, 11, 8)),
    ("blt s0, zero, -4096", 0x80044063, false, || DecodedInstruction::s(Op::Blt, 8, 0, -4096)),
    ("bge a0, a1, 8", 0x00b55463, false, || DecodedInstruction::s(Op::Bge, 10, 11, 8)),
    ("bge s0, zero, -4096", 0x80045063, false, || DecodedInstruction::s(Op::Bge, 8, 0, -4096)),
    ("bltu a0, a1, 8", 0x00b56463, false, || DecodedInstruction::s(Op::Bltu, 10, 11, 8)),
    ("bltu s0, zero, -4096", 0x80046063, false, || DecodedInstruction::s(Op::Bltu, 8, 0, -4096)),
    ("bgeu a0, a1, 8", 0x00b57463, false, || DecodedInstruction::s(Op::Bgeu, 10, 11, 8)),
    ("bgeu s0, zero, -4096", 0x80047063, false, || DecodedInstruction::s(Op::Bgeu, 8, 0, -4096)),
    ("lui a0, 74565", 0x12345537, false, || DecodedInstruction::u(Op::Lui, 10, 305418240)),
    ("lui t0, 1048575", 0xfffff2b7, false, || DecodedInstruction::u(Op::Lui, 5, -4096)),
    ("auipc ra, 1", 0x00001097, false, || DecodedInstruction::u(Op::Auipc, 1, 4096)),
    ("jal ra, 2048", 0x001000ef, false, || DecodedInstruction::u(Op::Jal, 1, 2048)),
    ("jal zero, -8", 0xff9ff06f, false, || DecodedInstruction::u(Op::Jal, 0, -8)),
    ("jalr ra, -16(a0)", 0xff0500e7, false, || DecodedInstruction::i(Op::Jalr, 1, 10, -16)),
    ("ecall", 0x00000073, false, || DecodedInstruction::new(Op::Ecall)),
    ("ebreak", 0x00100073, false, || DecodedInstruction::new(Op::Ebreak)),
    ("mret", 0x30200073, false, || DecodedInstruction::new(Op::Mret)),
    ("wfi", 0x10500073, false, || DecodedInstruction::new(Op::Wfi)),
    ("csrrw t0, 0x340, t0", 0x340292f3, false, || DecodedInstruction::csr(Op::Csrrw, 5, 0x340, 5)),
    ("csrrs a0, 0xb00, zero", 0xb0002573, false, || DecodedInstruction::csr(Op::Csrrs, 10, 0xb00, 0)),
    ("csrrc zero, 0x344, t1", 0x34433073, false, || DecodedInstruction::csr(Op::Csrrc, 0, 0x344, 6)),
    ("csrrwi zero, 0x7c0, 1", 0x7c00d073, false, || DecodedInstruction::csr(Op::Csrrwi, 0, 0x7c0, 1)),
    ("csrrsi zero, 0x300, 8", 0x30046073, false, || DecodedInstruction::csr(Op::Csrrsi, 0, 0x300, 8)),
    ("csrrci a2, 0x300, 31", 0x300ff673, false, || DecodedInstruction::csr(Op::Csrrci, 12, 0x300, 31)),
    (".insn r4 0xb, 0, 0, a0, a1, a2, a3", 0x68c5850b, false, || DecodedInstruction::mmul(10, 11, 12, 13, 1)),
    (".insn r4 0xb, 7, 0, t0, t1, t2, s0", 0x4073728b, false, || DecodedInstruction::mmul(5, 6, 7, 8, 8)),
    (".insn r4 0xb, 0, 3, a0, a1, a2, a3", 0x6ec5850b, false, || DecodedInstruction::mmul(10, 11, 12, 13, 25)),
    (".insn r4 0xb, 7, 3, a5, a4, a3, a2", 0x66d7778b, false, || DecodedInstruction::mmul(15, 14, 13, 12, 32)),
    ("c.addi4spn a0, sp, 16", 0x0808, true, || DecodedInstruction::i(Op::Addi, 10, 2, 16)),
    ("c.lw a0, 4(a1)", 0x41c8, true, || DecodedInstruction::i(Op::Lw, 10, 11, 4)),
    ("c.sw a2, 124(s1)", 0xdcf0, true, || DecodedInstruction::s(Op::Sw, 9, 12, 124)),
    ("c.nop", 0x0001, true, || DecodedInstruction::i(Op::Addi, 0, 0, 0)),
    ("c.addi a0, -32", 0x1501, true, || DecodedInstruction::i(Op::Addi, 10, 10, -32)),
    ("c.jal 2046", 0x2ffd, true, || DecodedInstruction::u(Op::Jal, 1, 2046)),
    ("c.li a5, 31", 0x47fd, true, || DecodedInstruction::i(Op::Addi, 15, 0, 31)),
    ("c.addi16sp sp, 496", 0x617d, true, || DecodedInstruction::i(Op::Addi, 2, 2, 496)),
    ("c.lui t0, 0xfffe0", 0x7281, true, || DecodedInstruction::u(Op::Lui, 5, -131072)),
    ("c.srli s1, 3", 0x808d, true, || DecodedInstruction::i(Op::Srli, 9, 9, 3)),
    ("c.srai a0, 31", 0x857d, true, || DecodedInstruction::i(Op::Srai, 10, 10, 31)),
    ("c.andi a1, -1", 0x99fd, true, || DecodedInstruction::i(Op::Andi, 11, 11, -1)),
    ("c.sub a0, a1", 0x8d0d, true, || DecodedInstruction::r(Op::Sub, 10, 10, 11)),
    ("c.xor s0, a5", 0x8c3d, true, || DecodedInstruction::r(Op::Xor, 8, 8, 15)),
    ("c.or a2, a3", 0x8e55, true, || DecodedInstruction::r(Op::Or, 12, 12, 13)),
    ("c.and a4, s1", 0x8f65, true, || DecodedInstruction::r(Op::And, 14, 14, 9)),
    ("c.j -2048", 0xb001, true, || DecodedInstruction::u(Op::Jal, 0, -2048)),
    ("c.beqz a0, -256", 0xd101, true, || DecodedInstruction::s(Op::Beq, 10, 0, -256)),
    ("c.bnez s1, 254", 0xecfd, true, || DecodedInstruction::s(Op::Bne, 9, 0, 254)),
    ("c.slli t0, 31", 0x02fe, true, || DecodedInstruction::i(Op::Slli, 5, 5, 31)),
    ("c.lwsp ra, 252(sp)", 0x50fe, true, || DecodedInstruction::i(Op::Lw, 1, 2, 252)),
    ("c.jr ra", 0x8082, true, || DecodedInstruction::i(Op::Jalr, 0, 1, 0)),
    ("c.mv a0, t2", 0x851e, true, || DecodedInstruction::r(Op::Add, 10, 0, 7)),
    ("c.ebreak", 0x9002, true, || DecodedInstruction::new(Op::Ebreak)),
    ("c.jalr a3", 0x9682, true, || DecodedInstruction::i(Op::Jalr, 1, 13, 0)),
    ("c.add a5, a5", 0x97be, true, || DecodedInstruction::r(Op::Add, 15, 15, 15)),
    ("c.swsp a5, 0(sp)", 0xc03e, true, || DecodedInstruction::s(Op::Sw, 2, 15, 0)),
];
