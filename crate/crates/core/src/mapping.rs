//! QPSK modulation at the end nodes and the PNC demodulation/remodulation
//! mapping at the relay.
//!
//! Each real dimension carries one bit. The end nodes map a bit `s` to the
//! amplitude `2s - 1`; the relay sees the sum of two such amplitudes and maps
//! the level `±2` to XOR bit 0 and the level `0` to XOR bit 1.

use std::ops::{Add, BitXor};

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MappingError {
    #[error("bit value {0} is not 0 or 1")]
    InvalidBit(u8),
    #[error("amplitude {0} is not -1 or +1")]
    InvalidAmplitude(i8),
    #[error("superposed level {0} is not one of -2, 0, +2")]
    InvalidLevel(i8),
    #[error("frames differ in length ({0} vs {1})")]
    FrameLength(usize, usize),
}

/// The in-phase and quadrature data bits of one QPSK symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitPair {
    i_bit: u8,
    q_bit: u8,
}

impl BitPair {
    pub const ZERO: BitPair = BitPair { i_bit: 0, q_bit: 0 };

    pub fn new(i_bit: u8, q_bit: u8) -> Result<Self, MappingError> {
        for b in [i_bit, q_bit] {
            if b > 1 {
                return Err(MappingError::InvalidBit(b));
            }
        }
        Ok(Self { i_bit, q_bit })
    }

    pub fn from_bools(i_bit: bool, q_bit: bool) -> Self {
        Self {
            i_bit: i_bit as u8,
            q_bit: q_bit as u8,
        }
    }

    /// Lexicographic index `2·i + q`, in `0..4`.
    pub fn index(self) -> usize {
        (2 * self.i_bit + self.q_bit) as usize
    }

    pub fn from_index(index: usize) -> Self {
        debug_assert!(index < 4);
        Self {
            i_bit: ((index >> 1) & 1) as u8,
            q_bit: (index & 1) as u8,
        }
    }

    /// All four bit pairs in index order.
    pub fn all() -> [BitPair; 4] {
        [0, 1, 2, 3].map(BitPair::from_index)
    }

    pub fn i_bit(self) -> u8 {
        self.i_bit
    }

    pub fn q_bit(self) -> u8 {
        self.q_bit
    }

    /// Number of differing bits, in `0..=2`.
    pub fn hamming(self, other: BitPair) -> u32 {
        ((self.i_bit ^ other.i_bit) + (self.q_bit ^ other.q_bit)) as u32
    }
}

impl BitXor for BitPair {
    type Output = BitPair;

    fn bitxor(self, rhs: BitPair) -> BitPair {
        BitPair {
            i_bit: self.i_bit ^ rhs.i_bit,
            q_bit: self.q_bit ^ rhs.q_bit,
        }
    }
}

/// A unit-amplitude QPSK point `a + jb` with `a, b ∈ {-1, +1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QpskSymbol {
    a: i8,
    b: i8,
}

impl QpskSymbol {
    pub fn new(a: i8, b: i8) -> Result<Self, MappingError> {
        for v in [a, b] {
            if v != 1 && v != -1 {
                return Err(MappingError::InvalidAmplitude(v));
            }
        }
        Ok(Self { a, b })
    }

    pub fn a(self) -> i8 {
        self.a
    }

    pub fn b(self) -> i8 {
        self.b
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.a as f64, self.b as f64)
    }

    /// Noiseless demodulation back to the data bits.
    pub fn bits(self) -> BitPair {
        BitPair::from_bools(self.a > 0, self.b > 0)
    }

    /// Recovers the symbol from a complex value lying exactly on the QPSK grid.
    pub fn from_complex(z: Complex64) -> Option<Self> {
        let snap = |v: f64| {
            if v == 1.0 {
                Some(1)
            } else if v == -1.0 {
                Some(-1)
            } else {
                None
            }
        };
        Some(Self {
            a: snap(z.re)?,
            b: snap(z.im)?,
        })
    }
}

impl Add for QpskSymbol {
    type Output = SuperposedLevel;

    fn add(self, rhs: QpskSymbol) -> SuperposedLevel {
        SuperposedLevel {
            i_level: self.a + rhs.a,
            q_level: self.b + rhs.b,
        }
    }
}

/// Per-dimension sum of two QPSK amplitudes, as seen by the relay when the
/// end nodes are perfectly synchronized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuperposedLevel {
    i_level: i8,
    q_level: i8,
}

impl SuperposedLevel {
    pub fn new(i_level: i8, q_level: i8) -> Result<Self, MappingError> {
        for v in [i_level, q_level] {
            if !matches!(v, -2 | 0 | 2) {
                return Err(MappingError::InvalidLevel(v));
            }
        }
        Ok(Self { i_level, q_level })
    }

    pub fn i_level(self) -> i8 {
        self.i_level
    }

    pub fn q_level(self) -> i8 {
        self.q_level
    }
}

/// End-node modulation: `a = 2·s_I − 1`, `b = 2·s_Q − 1`.
pub fn qpsk_modulate(bits: BitPair) -> QpskSymbol {
    QpskSymbol {
        a: 2 * bits.i_bit as i8 - 1,
        b: 2 * bits.q_bit as i8 - 1,
    }
}

/// Relay demodulation mapping: `±2 → 0`, `0 → 1` in each dimension.
pub fn pnc_xor_of_levels(level: SuperposedLevel) -> Result<BitPair, MappingError> {
    let demap = |v: i8| match v {
        -2 | 2 => Ok(0),
        0 => Ok(1),
        other => Err(MappingError::InvalidLevel(other)),
    };
    Ok(BitPair {
        i_bit: demap(level.i_level)?,
        q_bit: demap(level.q_level)?,
    })
}

/// The relay re-modulates the XOR bits with the ordinary QPSK mapping.
pub fn relay_remap(xor_bits: BitPair) -> QpskSymbol {
    qpsk_modulate(xor_bits)
}

/// An end node strips its own contribution from the relayed XOR.
pub fn end_node_extract(relay_bits: BitPair, own_bits: BitPair) -> BitPair {
    relay_bits ^ own_bits
}

/// Frame-level XOR, `S_1 ⊕ S_3`.
pub fn xor_frames(a: &[BitPair], b: &[BitPair]) -> Result<Vec<BitPair>, MappingError> {
    if a.len() != b.len() {
        return Err(MappingError::FrameLength(a.len(), b.len()));
    }
    Ok(a.iter().zip(b).map(|(&x, &y)| x ^ y).collect())
}
