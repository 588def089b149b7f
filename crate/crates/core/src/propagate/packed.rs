use std::hash::Hash;

use crate::pauli::{anticommutes_words, get_bit, product_words, set_bit, word_count, PauliString};

/// Storage-level Pauli string used as a hash key by the engine. All strings in
/// one [`super::ObservableSum`] share the same qubit count, so it is not stored.
pub(crate) trait Packed: Clone + Eq + Hash + Ord + Send + Sync + 'static {
    fn pack(p: &PauliString) -> Self;
    fn unpack(&self, n: usize) -> PauliString;
    fn anticommutes(&self, other: &Self) -> bool;
    /// `self · rhs = i^e · out`, returns `(out, e)`.
    fn product(&self, rhs: &Self) -> (Self, u8);
    fn vacuum(&self) -> bool;
    fn qubit(&self, q: usize) -> (bool, bool);
    fn clear_qubit(&mut self, q: usize);
    /// Hash used only to pick a shard; independent of the map's own hasher.
    fn shard_hash(&self) -> u64;
}

#[inline]
fn mix(h: u64, w: u64) -> u64 {
    let v = (h ^ w).wrapping_mul(0xff51_afd7_ed55_8ccd);
    v ^ (v >> 33)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub(crate) struct Fixed<const W: usize> {
    x: [u64; W],
    z: [u64; W],
}

impl<const W: usize> Packed for Fixed<W> {
    fn pack(p: &PauliString) -> Self {
        let mut out = Fixed { x: [0; W], z: [0; W] };
        let (px, pz) = (p.x_words(), p.z_words());
        debug_assert!(px.len() <= W);
        out.x[..px.len()].copy_from_slice(px);
        out.z[..pz.len()].copy_from_slice(pz);
        out
    }

    fn unpack(&self, n: usize) -> PauliString {
        let w = word_count(n);
        PauliString::from_masks(n, &self.x[..w], &self.z[..w]).expect("width fits")
    }

    #[inline]
    fn anticommutes(&self, other: &Self) -> bool {
        anticommutes_words(&self.x, &self.z, &other.x, &other.z)
    }

    #[inline]
    fn product(&self, rhs: &Self) -> (Self, u8) {
        let mut out = Fixed { x: [0; W], z: [0; W] };
        let e = product_words(&self.x, &self.z, &rhs.x, &rhs.z, &mut out.x, &mut out.z);
        (out, e)
    }

    #[inline]
    fn vacuum(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    #[inline]
    fn qubit(&self, q: usize) -> (bool, bool) {
        (get_bit(&self.x, q), get_bit(&self.z, q))
    }

    #[inline]
    fn clear_qubit(&mut self, q: usize) {
        set_bit(&mut self.x, q, false);
        set_bit(&mut self.z, q, false);
    }

    #[inline]
    fn shard_hash(&self) -> u64 {
        let mut h = 0x243f_6a88_85a3_08d3;
        for i in 0..W {
            h = mix(h, self.x[i]);
            h = mix(h, self.z[i]);
        }
        h
    }
}

impl Packed for PauliString {
    fn pack(p: &PauliString) -> Self {
        p.clone()
    }

    fn unpack(&self, _n: usize) -> PauliString {
        self.clone()
    }

    fn anticommutes(&self, other: &Self) -> bool {
        self.anticommutes_unchecked(other)
    }

    fn product(&self, rhs: &Self) -> (Self, u8) {
        let (p, ph) = self.multiply(rhs).expect("shared width");
        (p, ph.exponent())
    }

    fn vacuum(&self) -> bool {
        self.vacuum_expectation() == 1
    }

    fn qubit(&self, q: usize) -> (bool, bool) {
        (get_bit(self.x_words(), q), get_bit(self.z_words(), q))
    }

    fn clear_qubit(&mut self, q: usize) {
        self.set(q, crate::pauli::Pauli::I);
    }

    fn shard_hash(&self) -> u64 {
        let mut h = 0x243f_6a88_85a3_08d3;
        for (x, z) in self.x_words().iter().zip(self.z_words()) {
            h = mix(h, *x);
            h = mix(h, *z);
        }
        h
    }
}
