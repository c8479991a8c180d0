//! Counter-based random streams.
//!
//! Every stream is a ChaCha8 keystream whose key is built directly from
//! `(master seed, sample index, domain)` and whose stream id selects a row
//! or path. Word positions are addressable, so any entry can be regenerated
//! without reference to what was drawn before it.

use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

/// Separates the keystreams used by different consumers of the same seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    MatrixGue = 0x6775_6500,
    MatrixFourPhase = 0x3470_6800,
    MatrixDisk = 0x6469_736b,
    Process = 0x7072_6f63,
    Synthetic = 0x7379_6e74,
}

/// A deterministic random stream keyed by seed, sample index and domain.
#[derive(Clone, Debug)]
pub struct CounterRng {
    inner: ChaCha8Rng,
}

impl CounterRng {
    pub fn new(seed: u64, sample_index: u64, domain: Domain) -> Self {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&sample_index.to_le_bytes());
        key[16..24].copy_from_slice(&(domain as u64).to_le_bytes());
        CounterRng {
            inner: ChaCha8Rng::from_seed(key),
        }
    }

    /// Stream `stream` positioned at 64-bit word `word`.
    pub fn at(seed: u64, sample_index: u64, domain: Domain, stream: u64, word: u64) -> Self {
        let mut rng = Self::new(seed, sample_index, domain);
        rng.seek(stream, word);
        rng
    }

    /// Jump to 64-bit word `word` of stream `stream`.
    pub fn seek(&mut self, stream: u64, word: u64) {
        self.inner.set_stream(stream);
        // ChaCha word positions count 32-bit words.
        self.inner.set_word_pos(u128::from(word) * 2);
    }

    pub fn next_word(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform draw in the open interval (0, 1).
    pub fn open01(&mut self) -> f64 {
        let bits = self.inner.next_u64() >> 11;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// One standard normal pair from exactly two 64-bit words (Box-Muller).
    pub fn normal_pair(&mut self) -> (f64, f64) {
        let u = self.open01();
        let v = self.open01();
        let r = (-2.0 * u.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * v).sin_cos();
        (r * c, r * s)
    }
}

impl RngCore for CounterRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
