//! Minimal program builder: emits RV32EC and MMUL encodings with label
//! fixups. Not an assembler; there is no text input.

use std::collections::HashMap;

use crate::isa::{compress, encode, DecodedInstruction, Op};

pub const ZERO: u8 = 0;
pub const RA: u8 = 1;
pub const SP: u8 = 2;
pub const GP: u8 = 3;
pub const TP: u8 = 4;
pub const T0: u8 = 5;
pub const T1: u8 = 6;
pub const T2: u8 = 7;
pub const S0: u8 = 8;
pub const S1: u8 = 9;
pub const A0: u8 = 10;
pub const A1: u8 = 11;
pub const A2: u8 = 12;
pub const A3: u8 = 13;
pub const A4: u8 = 14;
pub const A5: u8 = 15;

#[derive(Debug, Clone)]
enum Item {
    Inst(DecodedInstruction),
    Branch { op: Op, rs1: u8, rs2: u8, label: String },
    Jal { rd: u8, label: String },
    /// `lui` + `addi` pair loading a label's absolute address.
    LoadAddr { rd: u8, label: String },
}

impl Item {
    fn size(&self) -> u32 {
        match self {
            Item::Inst(d) => d.length(),
            Item::Branch { .. } | Item::Jal { .. } => 4,
            Item::LoadAddr { .. } => 8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Asm {
    base: u32,
    compress: bool,
    items: Vec<(u32, Item)>,
    pc: u32,
    labels: HashMap<String, u32>,
    fresh: usize,
}

/// A resolved instruction stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assembled {
    pub bytes: Vec<u8>,
    pub listing: Vec<(u32, DecodedInstruction)>,
    pub labels: HashMap<String, u32>,
}

impl Asm {
    /// `compress` turns on automatic use of 16-bit forms where one exists.
    /// Label-relative instructions always use 32-bit forms.
    pub fn new(base: u32, compress: bool) -> Self {
        Self { base, compress, items: Vec::new(), pc: base, labels: HashMap::new(), fresh: 0 }
    }

    pub fn pc(&self) -> u32 {
        self.pc
    }

    /// Number of instructions emitted so far (a `LoadAddr` counts as two).
    pub fn instruction_count(&self) -> usize {
        self.items
            .iter()
            .map(|(_, i)| if matches!(i, Item::LoadAddr { .. }) { 2 } else { 1 })
            .sum()
    }

    pub fn fresh_label(&mut self, stem: &str) -> String {
        self.fresh += 1;
        format!("{stem}.{}", self.fresh)
    }

    pub fn label(&mut self, name: &str) {
        let prev = self.labels.insert(name.to_string(), self.pc);
        assert!(prev.is_none(), "label `{name}` defined twice");
    }

    fn push(&mut self, item: Item) {
        let size = item.size();
        self.items.push((self.pc, item));
        self.pc += size;
    }

    pub fn inst(&mut self, d: DecodedInstruction) {
        let d = match self.compress.then(|| compress(&d)).flatten() {
            Some(_) => DecodedInstruction { compressed: true, ..d },
            None => DecodedInstruction { compressed: false, ..d },
        };
        self.push(Item::Inst(d));
    }

    /// Pads with `c.nop` to a 4-byte boundary (trap vectors need it).
    pub fn align4(&mut self) {
        if !self.pc.is_multiple_of(4) {
            let nop = DecodedInstruction { compressed: true, ..DecodedInstruction::i(Op::Addi, ZERO, ZERO, 0) };
            assert!(compress(&nop).is_some());
            self.push(Item::Inst(nop));
        }
    }

    /// Emits a 32-bit encoding even when compression is on.
    pub fn inst_full(&mut self, d: DecodedInstruction) {
        self.push(Item::Inst(DecodedInstruction { compressed: false, ..d }));
    }

    pub fn addi(&mut self, rd: u8, rs1: u8, imm: i32) {
        assert!((-2048..2048).contains(&imm), "addi immediate {imm} out of range");
        self.inst(DecodedInstruction::i(Op::Addi, rd, rs1, imm));
    }

    pub fn mv(&mut self, rd: u8, rs: u8) {
        self.inst(DecodedInstruction::r(Op::Add, rd, ZERO, rs));
    }

    pub fn op(&mut self, op: Op, rd: u8, rs1: u8, rs2: u8) {
        self.inst(DecodedInstruction::r(op, rd, rs1, rs2));
    }

    pub fn op_imm(&mut self, op: Op, rd: u8, rs1: u8, imm: i32) {
        self.inst(DecodedInstruction::i(op, rd, rs1, imm));
    }

    pub fn lw(&mut self, rd: u8, offset: i32, rs1: u8) {
        assert!((-2048..2048).contains(&offset), "lw offset {offset} out of range");
        self.inst(DecodedInstruction::i(Op::Lw, rd, rs1, offset));
    }

    pub fn sw(&mut self, rs2: u8, offset: i32, rs1: u8) {
        assert!((-2048..2048).contains(&offset), "sw offset {offset} out of range");
        self.inst(DecodedInstruction::s(Op::Sw, rs1, rs2, offset));
    }

    /// Loads a 32-bit constant with `addi`, `lui` or `lui` + `addi`.
    pub fn li(&mut self, rd: u8, value: u32) {
        let v = value as i32;
        if (-2048..2048).contains(&v) {
            self.addi(rd, ZERO, v);
            return;
        }
        let lo = (v << 20) >> 20;
        let hi = (v.wrapping_sub(lo)) as u32;
        self.inst(DecodedInstruction::u(Op::Lui, rd, hi as i32));
        if lo != 0 {
            self.addi(rd, rd, lo);
        }
    }

    pub fn la(&mut self, rd: u8, label: &str) {
        self.push(Item::LoadAddr { rd, label: label.to_string() });
    }

    pub fn branch(&mut self, op: Op, rs1: u8, rs2: u8, label: &str) {
        assert!(op.is_branch());
        self.push(Item::Branch { op, rs1, rs2, label: label.to_string() });
    }

    pub fn beqz(&mut self, rs: u8, label: &str) {
        self.branch(Op::Beq, rs, ZERO, label);
    }

    pub fn bnez(&mut self, rs: u8, label: &str) {
        self.branch(Op::Bne, rs, ZERO, label);
    }

    pub fn jal(&mut self, rd: u8, label: &str) {
        self.push(Item::Jal { rd, label: label.to_string() });
    }

    pub fn j(&mut self, label: &str) {
        self.jal(ZERO, label);
    }

    pub fn call(&mut self, label: &str) {
        self.jal(RA, label);
    }

    pub fn ret(&mut self) {
        self.inst(DecodedInstruction::i(Op::Jalr, ZERO, RA, 0));
    }

    pub fn csrrw(&mut self, rd: u8, csr: u16, rs1: u8) {
        self.inst(DecodedInstruction::csr(Op::Csrrw, rd, csr, rs1));
    }

    pub fn csrrs(&mut self, rd: u8, csr: u16, rs1: u8) {
        self.inst(DecodedInstruction::csr(Op::Csrrs, rd, csr, rs1));
    }

    pub fn csrrc(&mut self, rd: u8, csr: u16, rs1: u8) {
        self.inst(DecodedInstruction::csr(Op::Csrrc, rd, csr, rs1));
    }

    pub fn csrrwi(&mut self, rd: u8, csr: u16, uimm: u8) {
        self.inst(DecodedInstruction::csr(Op::Csrrwi, rd, csr, uimm));
    }

    pub fn csrrsi(&mut self, rd: u8, csr: u16, uimm: u8) {
        self.inst(DecodedInstruction::csr(Op::Csrrsi, rd, csr, uimm));
    }

    pub fn csrr(&mut self, rd: u8, csr: u16) {
        self.csrrs(rd, csr, ZERO);
    }

    pub fn mret(&mut self) {
        self.inst(DecodedInstruction::new(Op::Mret));
    }

    pub fn mmul(&mut self, rd: u8, rs1: u8, rs2: u8, rs3: u8, words: u8) {
        self.inst(DecodedInstruction::mmul(rd, rs1, rs2, rs3, words));
    }

    /// Halt convention: `ecall` with a5 = 0.
    pub fn halt(&mut self) {
        self.addi(crate::isa::HALT_REG, ZERO, 0);
        self.inst(DecodedInstruction::new(Op::Ecall));
    }

    fn target(&self, label: &str) -> u32 {
        *self.labels.get(label).unwrap_or_else(|| panic!("undefined label `{label}`"))
    }

    /// Resolves labels and produces the code bytes.
    pub fn finish(&self) -> Assembled {
        let mut bytes = Vec::with_capacity((self.pc - self.base) as usize);
        let mut listing = Vec::new();
        let mut emit = |addr: u32, d: DecodedInstruction, bytes: &mut Vec<u8>| {
            if d.compressed {
                let h = compress(&d).expect("compressed flag set only when a 16-bit form exists");
                bytes.extend_from_slice(&h.to_le_bytes());
            } else {
                bytes.extend_from_slice(&encode(&d).to_le_bytes());
            }
            listing.push((addr, d));
        };
        for (addr, item) in &self.items {
            match item {
                Item::Inst(d) => emit(*addr, *d, &mut bytes),
                Item::Branch { op, rs1, rs2, label } => {
                    let off = self.target(label).wrapping_sub(*addr) as i32;
                    assert!((-4096..4096).contains(&off), "branch to `{label}` out of range ({off})");
                    emit(*addr, DecodedInstruction::s(*op, *rs1, *rs2, off), &mut bytes);
                }
                Item::Jal { rd, label } => {
                    let off = self.target(label).wrapping_sub(*addr) as i32;
                    assert!((-(1 << 20)..(1 << 20)).contains(&off), "jump to `{label}` out of range");
                    emit(*addr, DecodedInstruction::u(Op::Jal, *rd, off), &mut bytes);
                }
                Item::LoadAddr { rd, label } => {
                    let v = self.target(label) as i32;
                    let lo = (v << 20) >> 20;
                    let hi = v.wrapping_sub(lo);
                    emit(*addr, DecodedInstruction::u(Op::Lui, *rd, hi), &mut bytes);
                    emit(*addr + 4, DecodedInstruction::i(Op::Addi, *rd, *rd, lo), &mut bytes);
                }
            }
        }
        Assembled { bytes, listing, labels: self.labels.clone() }
    }
}
