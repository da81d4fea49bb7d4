//! Deterministic block-parallel Monte Carlo plumbing.
//!
//! Replications are cut into fixed-size blocks. Every block draws from its own
//! ChaCha stream whose key depends only on `(master_seed, stream)` and whose
//! stream number is the block index, so a block produces the same numbers no
//! matter which thread runs it. Blocks report `[f64; K]` sums that are added
//! up in block order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Replications per block unless a caller asks otherwise.
pub const DEFAULT_BLOCK_SIZE: u64 = 2_000;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for block `block` of experiment `stream` under `master_seed`.
pub fn block_rng(master_seed: u64, stream: u64, block: u64) -> ChaCha8Rng {
    let mut state = master_seed ^ splitmix64(&mut stream.clone());
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(block);
    rng
}

/// `(block_index, replications_in_block)` for `reps` replications.
pub fn blocks(reps: u64, block_size: u64) -> Vec<(u64, u64)> {
    let size = block_size.max(1);
    let count = reps.div_ceil(size);
    (0..count).map(|i| (i, size.min(reps - i * size))).collect()
}

/// Runs `work` on every block (in parallel when rayon has threads) and
/// returns the per-block sums in block order.
pub fn run_blocks<const K: usize, E, F>(
    reps: u64,
    block_size: u64,
    work: F,
) -> Result<Vec<[f64; K]>, E>
where
    E: Send,
    F: Fn(u64, u64) -> Result<[f64; K], E> + Sync,
{
    blocks(reps, block_size)
        .into_par_iter()
        .map(|(index, len)| work(index, len))
        .collect()
}

pub fn total<const K: usize>(parts: &[[f64; K]]) -> [f64; K] {
    let mut sum = [0.0; K];
    for p in parts {
        for k in 0..K {
            sum[k] += p[k];
        }
    }
    sum
}

/// Delete-one-block jackknife standard error of `stat(sums)`.
///
/// Returns `None` with fewer than two blocks.
pub fn jackknife_se<const K: usize, F>(parts: &[[f64; K]], stat: F) -> Option<f64>
where
    F: Fn(&[f64; K]) -> f64,
{
    let b = parts.len();
    if b < 2 {
        return None;
    }
    let all = total(parts);
    let leave_out: Vec<f64> = parts
        .iter()
        .map(|p| {
            let mut s = all;
            for k in 0..K {
                s[k] -= p[k];
            }
            stat(&s)
        })
        .collect();
    let mean = leave_out.iter().sum::<f64>() / b as f64;
    let ss: f64 = leave_out.iter().map(|t| (t - mean).powi(2)).sum();
    Some(((b as f64 - 1.0) / b as f64 * ss).sqrt())
}
