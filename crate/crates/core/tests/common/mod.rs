#![allow(dead_code)]

use mmulrv_core::engine::MmulOperands;
use mmulrv_core::guest::field::{to_words, FieldContext};
use mmulrv_core::machine::DEFAULT_DATA_BASE;
use mmulrv_core::{Machine, MachineConfig};
use num_bigint::{BigUint, RandBigInt};
use rand::Rng;

/// Random odd modulus of exactly `32·words` bits or fewer.
pub fn random_modulus<R: Rng>(rng: &mut R, words: usize) -> BigUint {
    let bits = 32 * words as u64;
    let n = rng.gen_biguint(bits) | BigUint::from(1u32);
    if n > BigUint::from(1u32) {
        n
    } else {
        BigUint::from(3u32)
    }
}

/// Random (A, B, N) with A, B < N.
pub fn random_operands<R: Rng>(rng: &mut R, words: usize) -> (BigUint, BigUint, BigUint) {
    let n = random_modulus(rng, words);
    let a = rng.gen_biguint_below(&n);
    let b = rng.gen_biguint_below(&n);
    (a, b, n)
}

/// Machine with A, B, N placed in the data region and P after them.
pub fn engine_machine(a: &BigUint, b: &BigUint, n: &BigUint, words: usize, config: MachineConfig) -> (Machine, MmulOperands) {
    let mut m = Machine::new(MachineConfig { max_words: words.max(8), ..config });
    let stride = 4 * words as u32;
    let ops = MmulOperands {
        addr_a: DEFAULT_DATA_BASE,
        addr_b: DEFAULT_DATA_BASE + stride,
        addr_n: DEFAULT_DATA_BASE + 2 * stride,
        addr_p: DEFAULT_DATA_BASE + 3 * stride,
        words,
    };
    for (addr, v) in [(ops.addr_a, a), (ops.addr_b, b), (ops.addr_n, n)] {
        m.mem.write_words(addr, &to_words(v, words).unwrap()).unwrap();
    }
    (m, ops)
}

pub fn read_p(m: &Machine, ops: &MmulOperands) -> BigUint {
    BigUint::from_slice(&m.mem.read_words(ops.addr_p, ops.words).unwrap())
}

/// A·B·2^(−32·words) mod N through a modular inverse.
pub fn oracle(a: &BigUint, b: &BigUint, n: &BigUint, words: usize) -> BigUint {
    FieldContext::new(n.clone(), words).unwrap().montmul(a, b)
}
