//! Pauli group algebra on packed symplectic bitmasks.
//!
//! A string over `n` qubits is stored as two bit vectors `x` and `z`, with
//! qubit `q` living at word `q / 64`, bit `q % 64`. The pair `(x_q, z_q)`
//! encodes `I`, `X`, `Z`, `Y` as `(0,0)`, `(1,0)`, `(0,1)`, `(1,1)`, and a
//! string always denotes the Hermitian operator with phase `+1` (so `Y` is
//! the usual Pauli Y, not `XZ`). Phases produced by multiplication are
//! returned separately as a [`Phase`].
//!
//! In text form qubit 0 is the leftmost character.

use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::{Error, Result};

pub(crate) type Words = SmallVec<[u64; 2]>;

#[inline]
pub(crate) fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    #[inline]
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    #[inline]
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// A power of `i`: the value `i^exponent` with `exponent` in `0..4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    #[inline]
    pub fn from_exponent(e: u32) -> Self {
        Phase((e & 3) as u8)
    }

    #[inline]
    pub fn exponent(self) -> u8 {
        self.0
    }

    /// `+1.0` or `-1.0` for real phases, `None` for `±i`.
    #[inline]
    pub fn as_real(self) -> Option<f64> {
        match self.0 {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    /// Real and imaginary parts.
    pub fn as_complex(self) -> (f64, f64) {
        match self.0 {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) & 3)
    }
}

// Word-slice kernels shared with the packed representations used by the
// propagation engine.

#[inline]
pub(crate) fn anticommutes_words(ax: &[u64], az: &[u64], bx: &[u64], bz: &[u64]) -> bool {
    let mut acc = 0u64;
    for i in 0..ax.len() {
        acc ^= (ax[i] & bz[i]) ^ (az[i] & bx[i]);
    }
    acc.count_ones() & 1 == 1
}

/// Writes the canonical product `a·b` into `(ox, oz)` and returns the exponent
/// `e` such that `a·b = i^e · out`.
#[inline]
pub(crate) fn product_words(
    ax: &[u64],
    az: &[u64],
    bx: &[u64],
    bz: &[u64],
    ox: &mut [u64],
    oz: &mut [u64],
) -> u8 {
    // With P = i^{x·z} X^x Z^z, moving Z^{z_a} past X^{x_b} costs (-1)^{z_a·x_b}.
    let mut e: u32 = 0;
    for i in 0..ax.len() {
        let x = ax[i] ^ bx[i];
        let z = az[i] ^ bz[i];
        e += (ax[i] & az[i]).count_ones();
        e += (bx[i] & bz[i]).count_ones();
        e += 2 * (az[i] & bx[i]).count_ones();
        e += 3 * (x & z).count_ones();
        ox[i] = x;
        oz[i] = z;
    }
    (e & 3) as u8
}

#[inline]
pub(crate) fn get_bit(words: &[u64], q: usize) -> bool {
    (words[q / 64] >> (q % 64)) & 1 == 1
}

#[inline]
pub(crate) fn set_bit(words: &mut [u64], q: usize, v: bool) {
    let mask = 1u64 << (q % 64);
    if v {
        words[q / 64] |= mask;
    } else {
        words[q / 64] &= !mask;
    }
}

/// An `n`-qubit Pauli string with implicit phase `+1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: usize,
    x: Words,
    z: Words,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        let w = word_count(n);
        PauliString {
            n,
            x: SmallVec::from_elem(0, w),
            z: SmallVec::from_elem(0, w),
        }
    }

    /// Builds a string from explicit masks. Bits at positions `>= n` are cleared.
    pub fn from_masks(n: usize, x: &[u64], z: &[u64]) -> Result<Self> {
        let w = word_count(n);
        if x.len() != w || z.len() != w {
            return Err(Error::Dimension {
                expected: w,
                found: x.len().max(z.len()),
            });
        }
        let mut p = PauliString {
            n,
            x: SmallVec::from_slice(x),
            z: SmallVec::from_slice(z),
        };
        p.clear_padding();
        Ok(p)
    }

    /// Builds a string from `(qubit, pauli)` pairs; unlisted qubits are `I`.
    pub fn from_sparse(n: usize, factors: &[(usize, Pauli)]) -> Result<Self> {
        let mut p = PauliString::identity(n);
        for &(q, op) in factors {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, n });
            }
            p.set(q, op);
        }
        Ok(p)
    }

    fn clear_padding(&mut self) {
        let rem = self.n % 64;
        if rem != 0 {
            let last = self.x.len() - 1;
            let mask = (1u64 << rem) - 1;
            self.x[last] &= mask;
            self.z[last] &= mask;
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    #[inline]
    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    #[inline]
    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(get_bit(&self.x, q), get_bit(&self.z, q))
    }

    /// Panics if `q >= n`.
    #[inline]
    pub fn set(&mut self, q: usize, op: Pauli) {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let (x, z) = op.bits();
        set_bit(&mut self.x, q, x);
        set_bit(&mut self.z, q, z);
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Qubits carrying a non-identity factor, in increasing order.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, (x, z)) in self.x.iter().zip(&self.z).enumerate() {
            let mut m = x | z;
            while m != 0 {
                let b = m.trailing_zeros() as usize;
                out.push(i * 64 + b);
                m &= m - 1;
            }
        }
        out
    }

    fn check_dim(&self, other: &PauliString) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    /// Canonical product: `self · other = phase · result`.
    pub fn multiply(&self, other: &PauliString) -> Result<(PauliString, Phase)> {
        self.check_dim(other)?;
        let w = self.x.len();
        let mut out = PauliString::identity(self.n);
        debug_assert_eq!(out.x.len(), w);
        let e = product_words(&self.x, &self.z, &other.x, &other.z, &mut out.x, &mut out.z);
        Ok((out, Phase(e)))
    }

    /// `true` iff the symplectic inner product vanishes.
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_dim(other)?;
        Ok(!anticommutes_words(&self.x, &self.z, &other.x, &other.z))
    }

    #[inline]
    pub(crate) fn anticommutes_unchecked(&self, other: &PauliString) -> bool {
        anticommutes_words(&self.x, &self.z, &other.x, &other.z)
    }

    /// `⟨0…0|P|0…0⟩` for the canonical string: 1 when every factor is `I` or `Z`.
    pub fn vacuum_expectation(&self) -> u8 {
        u8::from(self.x.iter().all(|&w| w == 0))
    }

    pub(crate) fn x_mut(&mut self) -> &mut [u64] {
        &mut self.x
    }

    pub(crate) fn z_mut(&mut self) -> &mut [u64] {
        &mut self.z
    }

    /// Parses strings such as `"Z1Z26"` (1-based qubit labels) into an
    /// `n`-qubit string.
    pub fn parse_labeled(text: &str, n: usize) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Err(Error::EmptyPauli);
        }
        let mut p = PauliString::identity(n);
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let op = Pauli::from_char(chars[i])
                .ok_or(Error::InvalidPauliChar { ch: chars[i], pos: i })?;
            let start = i + 1;
            let mut end = start;
            while end < chars.len() && chars[end].is_ascii_digit() {
                end += 1;
            }
            if end == start {
                return Err(Error::InvalidPauliChar {
                    ch: chars.get(start).copied().unwrap_or(' '),
                    pos: start,
                });
            }
            let label: usize = chars[start..end]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad qubit label in {text:?}")))?;
            if label == 0 || label > n {
                return Err(Error::QubitOutOfRange {
                    qubit: label.wrapping_sub(1),
                    n,
                });
            }
            p.set(label - 1, op);
            i = end;
        }
        Ok(p)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::EmptyPauli);
        }
        let n = s.chars().count();
        let mut p = PauliString::identity(n);
        for (pos, ch) in s.chars().enumerate() {
            let op = Pauli::from_char(ch).ok_or(Error::InvalidPauliChar { ch, pos })?;
            p.set(pos, op);
        }
        Ok(p)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.n).map(|q| self.get(q).as_char()).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

/// Parses a Pauli string in text form.
pub fn parse_pauli(text: &str) -> Result<PauliString> {
    text.parse()
}

pub fn format_pauli(p: &PauliString) -> String {
    p.to_string()
}
