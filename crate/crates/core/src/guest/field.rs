//! Montgomery field constants plus host-side big-integer oracles used to
//! check guest output.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::GuestError;

/// Little-endian 32-bit limbs, zero-padded to `words`.
pub fn to_words(x: &BigUint, words: usize) -> Result<Vec<u32>, GuestError> {
    let mut v = x.to_u32_digits();
    if v.len() > words {
        return Err(GuestError::OperandTooLarge(format!("{x:#x}")));
    }
    v.resize(words, 0);
    Ok(v)
}

pub fn from_words(words: &[u32]) -> BigUint {
    BigUint::from_slice(words)
}

/// Modulus and Montgomery constants for n = 32·words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldContext {
    pub modulus: BigUint,
    pub words: usize,
    /// 2^n mod N
    pub r_mod_n: BigUint,
    /// 2^(2n) mod N, the conversion constant into the Montgomery domain.
    pub r2_mod_n: BigUint,
}

impl FieldContext {
    pub fn new(modulus: BigUint, words: usize) -> Result<Self, GuestError> {
        if !(1..=crate::encoding::R4_MAX_WORDS as usize).contains(&words) {
            return Err(GuestError::WordsOutOfRange(words));
        }
        if !modulus.bit(0) {
            return Err(GuestError::EvenModulus);
        }
        if modulus.bits() > 32 * words as u64 || modulus.is_one() {
            return Err(GuestError::ModulusTooLarge { bits: modulus.bits(), words });
        }
        let n = 32 * words;
        let r_mod_n = (BigUint::one() << n) % &modulus;
        let r2_mod_n = (BigUint::one() << (2 * n)) % &modulus;
        Ok(Self { modulus, words, r_mod_n, r2_mod_n })
    }

    /// Smallest word count able to hold the modulus.
    pub fn fitted(modulus: BigUint) -> Result<Self, GuestError> {
        let words = (modulus.bits().max(1) as usize).div_ceil(32);
        Self::new(modulus, words)
    }

    pub fn n_bits(&self) -> usize {
        32 * self.words
    }

    pub fn to_words(&self, x: &BigUint) -> Result<Vec<u32>, GuestError> {
        to_words(x, self.words)
    }

    /// A·B·2^(−n) mod N, computed with a modular inverse rather than the
    /// bit-serial recurrence.
    pub fn montmul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let r_inv = self.r_mod_n.modinv(&self.modulus).expect("odd modulus is coprime to 2^n");
        a * b * r_inv % &self.modulus
    }

    pub fn to_mont(&self, x: &BigUint) -> BigUint {
        x * &self.r_mod_n % &self.modulus
    }

    pub fn from_mont(&self, x: &BigUint) -> BigUint {
        self.montmul(x, &BigUint::one())
    }

    /// Converting R² out of the Montgomery domain must give R.
    pub fn constants_consistent(&self) -> bool {
        self.from_mont(&self.r2_mod_n) == self.r_mod_n && self.montmul(&self.r2_mod_n, &BigUint::one()) == self.r_mod_n
    }
}

pub fn p25519() -> BigUint {
    (BigUint::one() << 255u32) - 19u32
}

/// RFC 7748 scalar decoding with clamping.
pub fn decode_scalar_x25519(bytes: &[u8; 32]) -> BigUint {
    let mut k = *bytes;
    k[0] &= 248;
    k[31] &= 127;
    k[31] |= 64;
    BigUint::from_bytes_le(&k)
}

/// RFC 7748 u-coordinate decoding (top bit masked, reduced mod p).
pub fn decode_u_x25519(bytes: &[u8; 32]) -> BigUint {
    let mut u = *bytes;
    u[31] &= 127;
    BigUint::from_bytes_le(&u) % p25519()
}

pub fn encode_u_x25519(u: &BigUint) -> [u8; 32] {
    let mut out = [0u8; 32];
    let b = u.to_bytes_le();
    out[..b.len()].copy_from_slice(&b);
    out
}

/// x-only Montgomery ladder over GF(2^255 − 19) in plain modular arithmetic,
/// processing `bits` scalar bits from the top.
pub fn x25519_ladder_reference(scalar: &BigUint, bits: u64, u: &BigUint) -> BigUint {
    let p = p25519();
    let a24 = BigUint::from(121_665u32);
    let add = |a: &BigUint, b: &BigUint| (a + b) % &p;
    let sub = |a: &BigUint, b: &BigUint| (a + &p - b) % &p;
    let mul = |a: &BigUint, b: &BigUint| a * b % &p;
    let x1 = u % &p;
    let (mut x2, mut z2) = (BigUint::one(), BigUint::zero());
    let (mut x3, mut z3) = (x1.clone(), BigUint::one());
    let mut swap = false;
    for t in (0..bits).rev() {
        let k = scalar.bit(t);
        if swap ^ k {
            std::mem::swap(&mut x2, &mut x3);
            std::mem::swap(&mut z2, &mut z3);
        }
        swap = k;
        let a = add(&x2, &z2);
        let aa = mul(&a, &a);
        let b = sub(&x2, &z2);
        let bb = mul(&b, &b);
        let e = sub(&aa, &bb);
        let c = add(&x3, &z3);
        let d = sub(&x3, &z3);
        let da = mul(&d, &a);
        let cb = mul(&c, &b);
        let s = add(&da, &cb);
        x3 = mul(&s, &s);
        let s = sub(&da, &cb);
        z3 = mul(&x1, &mul(&s, &s));
        x2 = mul(&aa, &bb);
        z2 = mul(&e, &add(&aa, &mul(&a24, &e)));
    }
    if swap {
        std::mem::swap(&mut x2, &mut x3);
        std::mem::swap(&mut z2, &mut z3);
    }
    mul(&x2, &z2.modpow(&(&p - 2u32), &p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Num;

    fn hex(s: &str) -> BigUint {
        BigUint::from_str_radix(s, 16).unwrap()
    }

    fn bytes32(s: &str) -> [u8; 32] {
        let v: Vec<u8> = (0..32).map(|i| u8::from_str_radix(&s[2 * i..2 * i + 2], 16).unwrap()).collect();
        v.try_into().unwrap()
    }

    #[test]
    fn constants_for_small_modulus() {
        let c = FieldContext::new(BigUint::from(239u32), 1).unwrap();
        assert_eq!(c.r_mod_n, BigUint::from((1u64 << 32) % 239));
        assert_eq!(c.r2_mod_n, BigUint::from(((1u128 << 64) % 239) as u64));
        assert!(c.constants_consistent());
        let x = BigUint::from(100u32);
        assert_eq!(c.from_mont(&c.to_mont(&x)), x);
    }

    #[test]
    fn rejects_bad_moduli() {
        assert_eq!(FieldContext::new(BigUint::from(240u32), 1), Err(GuestError::EvenModulus));
        assert!(matches!(FieldContext::new(p25519(), 7), Err(GuestError::ModulusTooLarge { .. })));
        assert_eq!(FieldContext::new(BigUint::from(3u32), 0), Err(GuestError::WordsOutOfRange(0)));
        assert_eq!(FieldContext::fitted(p25519()).unwrap().words, 8);
    }

    #[test]
    fn word_conversion() {
        let x = hex("1_0000_0002".replace('_', "").as_str());
        assert_eq!(to_words(&x, 3).unwrap(), vec![2, 1, 0]);
        assert_eq!(from_words(&[2, 1, 0]), x);
        assert!(to_words(&x, 1).is_err());
    }

    #[test]
    fn ladder_matches_affine_multiples() {
        // x-coordinates of k·(9, y) computed independently with affine
        // Weierstrass-style addition on the Montgomery curve.
        let nine = BigUint::from(9u32);
        let cases = [
            (1u64, "9"),
            (2, "20d342d51873f1b7d9750c687d1571148f3f5ced1e350b5c5cae469cdd684efb"),
            (3, "1c12bc1a6d57abe645534d91c21bba64f8824e67621c0859c00a03affb713c12"),
            (5, "41b6ec3c50ee7af203c0026e5e079e7fa8cbc9bc581d49cb0d537d5778497c87"),
            (12345, "13ab9d6ebfca832f0bdc6b918b72ad7649af84e9b1cdf9ba7a8dc1b1952ad771"),
        ];
        for (k, want) in cases {
            let got = x25519_ladder_reference(&BigUint::from(k), 16, &nine);
            assert_eq!(got, hex(want), "k = {k}");
        }
    }

    #[test]
    fn ladder_rfc7748_vector() {
        let k = decode_scalar_x25519(&bytes32("a546e36bf0527c9d3b16154b82465edd62144c0ac1fc5a18506a2244ba449ac4"));
        let u = decode_u_x25519(&bytes32("e6db6867583030db3594c1a424b15f7c726624ec26b3353b10a903a6d0ab1c4c"));
        let out = x25519_ladder_reference(&k, 255, &u);
        assert_eq!(
            encode_u_x25519(&out),
            bytes32("c3da55379de9c6908e94ea4df28d084f32eccf03491c71f754b4075577a28552")
        );
    }
}
