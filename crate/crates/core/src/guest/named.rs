//! Guests addressable by name, with deterministic default inputs.

use num_bigint::BigUint;
use num_traits::{Num, One};

use super::field::{decode_scalar_x25519, decode_u_x25519, p25519, FieldContext};
use super::kernels::{emit_interrupt_harness, emit_ladder_x25519_field, emit_modexp, montmul_program};
use super::{GuestError, GuestProgram};
use crate::perf::Config;

pub const GUEST_NAMES: [&str; 6] =
    ["modexp128", "modexp256", "x25519_ladder", "montmul", "irq_sweep_atomic", "irq_sweep_partial"];

/// Optional overrides; anything left `None` takes the guest's default.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GuestInputs {
    pub modulus: Option<BigUint>,
    pub a: Option<BigUint>,
    pub b: Option<BigUint>,
    pub base: Option<BigUint>,
    pub exponent: Option<BigUint>,
    pub scalar: Option<BigUint>,
    /// Number of scalar bits the ladder processes (default 255).
    pub scalar_bits: Option<u32>,
    pub u: Option<BigUint>,
}

fn hex(s: &str) -> BigUint {
    BigUint::from_str_radix(s, 16).expect("constant is valid hex")
}

fn bytes32(s: &str) -> [u8; 32] {
    let v: Vec<u8> = (0..32).map(|i| u8::from_str_radix(&s[2 * i..2 * i + 2], 16).expect("valid hex")).collect();
    v.try_into().expect("32 bytes")
}

/// Default ladder input: the first RFC 7748 X25519 test vector.
pub fn default_x25519_scalar() -> BigUint {
    decode_scalar_x25519(&bytes32("a546e36bf0527c9d3b16154b82465edd62144c0ac1fc5a18506a2244ba449ac4"))
}

pub fn default_x25519_u() -> BigUint {
    decode_u_x25519(&bytes32("e6db6867583030db3594c1a424b15f7c726624ec26b3353b10a903a6d0ab1c4c"))
}

fn default_modulus(bits: u32) -> BigUint {
    match bits {
        128 => (BigUint::one() << 127u32) - 1u32,
        _ => p25519(),
    }
}

fn modexp(bits: u32, config: Config, inputs: &GuestInputs) -> Result<GuestProgram, GuestError> {
    let words = bits as usize / 32;
    let n = inputs.modulus.clone().unwrap_or_else(|| default_modulus(bits));
    let ctx = FieldContext::new(n, words)?;
    let base = inputs.base.clone().unwrap_or_else(|| hex("1234567890abcdef0fedcba987654321") % &ctx.modulus);
    let exp = inputs
        .exponent
        .clone()
        .unwrap_or_else(|| (&ctx.modulus - 2u32) ^ hex("5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a5a"));
    emit_modexp(&ctx, config, &base, &exp, bits)
}

fn sweep_ctx(inputs: &GuestInputs) -> Result<FieldContext, GuestError> {
    FieldContext::new(inputs.modulus.clone().unwrap_or_else(p25519), 8)
}

fn sweep_operands(ctx: &FieldContext, inputs: &GuestInputs) -> (BigUint, BigUint) {
    let a = inputs.a.clone().unwrap_or_else(|| hex("0123456789abcdef0123456789abcdef0123456789abcdef0123456789abcdef"));
    let b = inputs.b.clone().unwrap_or_else(|| hex("0fedcba9876543210fedcba9876543210fedcba9876543210fedcba987654321"));
    (a % &ctx.modulus, b % &ctx.modulus)
}

/// Configuration a guest runs under when none is requested: the sweep
/// guests default to the execution mode they exist to measure.
pub fn default_config(name: &str) -> Config {
    match name {
        "irq_sweep_atomic" => Config::CiAe,
        "irq_sweep_partial" => Config::CiPe,
        _ => Config::Ba,
    }
}

/// Builds a named guest for a configuration.
pub fn build_named(name: &str, config: Config, inputs: &GuestInputs) -> Result<GuestProgram, GuestError> {
    match name {
        "modexp128" => modexp(128, config, inputs),
        "modexp256" => modexp(256, config, inputs),
        "x25519_ladder" => {
            let k = inputs.scalar.clone().unwrap_or_else(default_x25519_scalar);
            let u = inputs.u.clone().unwrap_or_else(default_x25519_u);
            emit_ladder_x25519_field(config, &k, inputs.scalar_bits.unwrap_or(255), &u)
        }
        "montmul" => {
            let n = inputs.modulus.clone().unwrap_or_else(p25519);
            let ctx = FieldContext::fitted(n)?;
            let (a, b) = sweep_operands(&ctx, inputs);
            montmul_program(&ctx, config, &a, &b)
        }
        "irq_sweep_atomic" | "irq_sweep_partial" => {
            let want = if name == "irq_sweep_atomic" { Config::CiAe } else { Config::CiPe };
            let config = match config {
                Config::Ba => Config::Ba,
                _ => want,
            };
            let ctx = sweep_ctx(inputs)?;
            let (a, b) = sweep_operands(&ctx, inputs);
            let mut p = emit_interrupt_harness(&ctx, config, &a, &b)?;
            p.name = name.to_string();
            Ok(p)
        }
        other => Err(GuestError::GuestNotFound(other.to_string())),
    }
}
