//! Orthonormal 8x8 DCT-II / DCT-III in double precision.

use std::sync::OnceLock;

/// `basis[u][x] = c(u) / 2 * cos((2x + 1) u pi / 16)`, `c(0) = 1/sqrt(2)`.
fn basis() -> &'static [[f64; 8]; 8] {
    static BASIS: OnceLock<[[f64; 8]; 8]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut m = [[0.0; 8]; 8];
        for (u, row) in m.iter_mut().enumerate() {
            let c = if u == 0 { 0.5 / 2f64.sqrt() } else { 0.5 };
            for (x, v) in row.iter_mut().enumerate() {
                *v = c * ((2 * x + 1) as f64 * u as f64 * std::f64::consts::PI / 16.0).cos();
            }
        }
        m
    })
}

/// Forward transform of a natural-order block of level-shifted samples.
pub fn fdct8x8(input: &[f64; 64]) -> [f64; 64] {
    let b = basis();
    let mut tmp = [0.0; 64];
    // rows
    for y in 0..8 {
        for u in 0..8 {
            let mut s = 0.0;
            for x in 0..8 {
                s += b[u][x] * input[y * 8 + x];
            }
            tmp[y * 8 + u] = s;
        }
    }
    let mut out = [0.0; 64];
    // columns
    for u in 0..8 {
        for v in 0..8 {
            let mut s = 0.0;
            for y in 0..8 {
                s += b[v][y] * tmp[y * 8 + u];
            }
            out[v * 8 + u] = s;
        }
    }
    out
}

/// Inverse of [`fdct8x8`].
pub fn idct8x8(input: &[f64; 64]) -> [f64; 64] {
    let b = basis();
    let mut tmp = [0.0; 64];
    for v in 0..8 {
        for x in 0..8 {
            let mut s = 0.0;
            for u in 0..8 {
                s += b[u][x] * input[v * 8 + u];
            }
            tmp[v * 8 + x] = s;
        }
    }
    let mut out = [0.0; 64];
    for x in 0..8 {
        for y in 0..8 {
            let mut s = 0.0;
            for v in 0..8 {
                s += b[v][y] * tmp[v * 8 + x];
            }
            out[y * 8 + x] = s;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cipher::KeyStream;

    // direct quadruple-sum definition
    fn fdct_reference(input: &[f64; 64]) -> [f64; 64] {
        let c = |k: usize| if k == 0 { 1.0 / 2f64.sqrt() } else { 1.0 };
        let mut out = [0.0; 64];
        for v in 0..8 {
            for u in 0..8 {
                let mut s = 0.0;
                for y in 0..8 {
                    for x in 0..8 {
                        s += input[y * 8 + x]
                            * ((2 * x + 1) as f64 * u as f64 * std::f64::consts::PI / 16.0).cos()
                            * ((2 * y + 1) as f64 * v as f64 * std::f64::consts::PI / 16.0).cos();
                    }
                }
                out[v * 8 + u] = 0.25 * c(u) * c(v) * s;
            }
        }
        out
    }

    fn random_block(seed: u64) -> [f64; 64] {
        let mut ks = KeyStream::new(seed);
        let mut b = [0.0; 64];
        for v in b.iter_mut() {
            *v = (ks.next_below(256) as f64) - 128.0;
        }
        b
    }

    #[test]
    fn zero_block() {
        assert_eq!(fdct8x8(&[0.0; 64]), [0.0; 64]);
    }

    #[test]
    fn flat_field() {
        let out = fdct8x8(&[10.0; 64]);
        assert!((out[0] - 80.0).abs() < 1e-12);
        assert!(out[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn matches_definition() {
        for seed in 0..4 {
            let b = random_block(seed);
            let fast = fdct8x8(&b);
            let slow = fdct_reference(&b);
            for i in 0..64 {
                assert!((fast[i] - slow[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        for seed in 10..30 {
            let b = random_block(seed);
            let back = idct8x8(&fdct8x8(&b));
            let err = b
                .iter()
                .zip(&back)
                .map(|(a, c)| (a - c).abs())
                .fold(0.0, f64::max);
            assert!(err <= 1e-9, "max error {err}");
        }
    }
}
