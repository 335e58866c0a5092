/// Doubled average ranks (1-based) of `values`, so tied ranks stay integral.
/// Also returns the tie-correction sum `Σ (t³ - t)` over tie groups.
pub(crate) fn doubled_ranks(values: &[f64]) -> (Vec<u64>, f64) {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0u64; n];
    let mut ties = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share rank ((i+1) + (j+1)) / 2
        let r2 = (i + 1 + j + 1) as u64;
        for &k in &order[i..=j] {
            ranks[k] = r2;
        }
        let t = (j - i + 1) as f64;
        ties += t * t * t - t;
        i = j + 1;
    }
    (ranks, ties)
}

/// Number of `k`-subsets of `items` with each possible sum, for k = `pick`.
/// Counts are kept in f64; they are exact while below 2^53.
pub(crate) fn subset_sum_counts(items: &[u64], pick: usize) -> Vec<f64> {
    let total: u64 = items.iter().sum();
    let width = total as usize + 1;
    let mut table = vec![vec![0.0f64; width]; pick + 1];
    table[0][0] = 1.0;
    let mut reach = 0usize;
    for (i, &r) in items.iter().enumerate() {
        let r = r as usize;
        reach += r;
        for k in (1..=pick.min(i + 1)).rev() {
            let (lo, hi) = table.split_at_mut(k);
            let prev = &lo[k - 1];
            let cur = &mut hi[0];
            for s in (r..=reach).rev() {
                let add = prev[s - r];
                if add != 0.0 {
                    cur[s] += add;
                }
            }
        }
    }
    table.swap_remove(pick)
}
