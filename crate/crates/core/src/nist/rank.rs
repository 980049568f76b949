//! Rank of binary matrices over GF(2).

/// Rank of a matrix whose rows are the low `cols` bits of each word.
/// The rows are reduced in place.
pub fn gf2_rank(rows: &mut [u64], cols: usize) -> usize {
    debug_assert!(cols <= 64);
    let mut rank = 0;
    for col in (0..cols).rev() {
        let bit = 1u64 << col;
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] & bit != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row & bit != 0 {
                *row ^= p;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Probability that a uniformly random `rows x cols` binary matrix has rank
/// `r`.
pub fn rank_probability(r: usize, rows: usize, cols: usize) -> f64 {
    if r > rows.min(cols) {
        return 0.0;
    }
    let (m, q, r) = (rows as i32, cols as i32, r as i32);
    let mut log2p = (r * (q + m - r) - m * q) as f64;
    let mut product = 1.0;
    for i in 0..r {
        let num = (1.0 - 2f64.powi(i - q)) * (1.0 - 2f64.powi(i - m));
        let den = 1.0 - 2f64.powi(i - r);
        product *= num / den;
    }
    log2p += product.log2();
    log2p.exp2()
}
