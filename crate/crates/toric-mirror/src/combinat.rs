//! Small combinatorial helpers: k-subsets and index-set utilities.

/// All k-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Nonempty subsets of `0..n`, ordered by size then lexicographically.
pub fn nonempty_subsets(n: usize) -> Vec<Vec<usize>> {
    (1..=n).flat_map(|k| subsets(n, k)).collect()
}

/// Sorted union of two sorted index sets.
pub fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// Mayer–Vietoris sign of the face of `big` obtained by deleting `removed`:
/// `(-1)^t` where `t` is the position of `removed` in sorted `big`.
pub fn mv_sign(big: &[usize], removed: usize) -> i64 {
    let t = big.iter().position(|&x| x == removed).expect("removed index belongs to the set");
    if t % 2 == 0 {
        1
    } else {
        -1
    }
}
