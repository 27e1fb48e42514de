//! SplitMix64 key stream with unbiased bounded draws.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Deterministic generator expanding one 64-bit subkey.
#[derive(Debug, Clone)]
pub struct KeyStream {
    state: u64,
}

impl KeyStream {
    pub fn new(seed: u64) -> Self {
        KeyStream { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix(self.state)
    }

    /// Uniform draw from `[0, bound)`.
    ///
    /// Takes the top `ceil(log2 bound)` bits of each output and retries while
    /// the value is out of range. `bound == 1` returns 0 without consuming
    /// a draw.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "next_below bound must be positive");
        if bound == 1 {
            return 0;
        }
        let bits = 64 - (bound - 1).leading_zeros();
        loop {
            let v = self.next_u64() >> (64 - bits);
            if v < bound {
                return v;
            }
        }
    }
}

/// The SplitMix64 output function.
pub fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_outputs() {
        // published SplitMix64 outputs for seed 1234567
        let mut ks = KeyStream::new(1234567);
        let expected = [
            6457827717110365317u64,
            3203168211198807973,
            9817491932198370423,
            4593380528125082431,
            16408922859458223821,
        ];
        for e in expected {
            assert_eq!(ks.next_u64(), e);
        }
    }

    #[test]
    fn same_seed_same_sequence() {
        let a: Vec<u64> = {
            let mut k = KeyStream::new(42);
            (0..32).map(|_| k.next_below(6)).collect()
        };
        let mut k = KeyStream::new(42);
        let b: Vec<u64> = (0..32).map(|_| k.next_below(6)).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn bounded_draws_in_range_and_roughly_uniform() {
        let mut ks = KeyStream::new(7);
        let mut counts = [0u32; 6];
        for _ in 0..60_000 {
            counts[ks.next_below(6) as usize] += 1;
        }
        for c in counts {
            assert!((9_000..11_000).contains(&c), "{counts:?}");
        }
    }

    #[test]
    fn power_of_two_bound_uses_top_bits() {
        let mut a = KeyStream::new(99);
        let mut b = KeyStream::new(99);
        for _ in 0..100 {
            assert_eq!(a.next_below(8), b.next_u64() >> 61);
        }
    }

    #[test]
    fn unit_bound_consumes_nothing() {
        let mut a = KeyStream::new(5);
        let mut b = KeyStream::new(5);
        assert_eq!(a.next_below(1), 0);
        assert_eq!(a.next_u64(), b.next_u64());
    }
}
