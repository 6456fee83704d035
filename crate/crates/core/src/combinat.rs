//! Small exact combinatorics: factorials, binomials, multinomials and multiset
//! enumeration in lexicographic order.

/// `n!` as an exact integer. Panics above 20! (u64 overflow).
pub fn factorial(n: usize) -> u64 {
    assert!(n <= 20, "factorial overflow for {n}");
    (1..=n as u64).product()
}

/// Binomial coefficient `C(n, k)`, exact.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        // acc * (n - i) is always divisible by (i + 1)
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

/// Multinomial coefficient `|α|! / α!` for a count vector `α`.
pub fn multinomial(counts: &[usize]) -> u64 {
    let mut acc: u64 = 1;
    let mut total = 0;
    for &c in counts {
        total += c;
        acc *= binomial(total, c);
    }
    acc
}

/// All non-decreasing index tuples `i₁ ≤ … ≤ i_len` with entries in `0..dim`, in
/// lexicographic order. `len = 0` yields one empty tuple.
pub fn multisets(dim: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if len == 0 {
        out.push(Vec::new());
        return out;
    }
    if dim == 0 {
        return out;
    }
    let mut cur = vec![0usize; len];
    loop {
        out.push(cur.clone());
        // advance the rightmost position that can still grow
        let mut pos = len;
        while pos > 0 && cur[pos - 1] == dim - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        let v = cur[pos - 1] + 1;
        for slot in &mut cur[pos - 1..] {
            *slot = v;
        }
    }
    out
}

/// Converts a sorted index tuple into its count vector of length `dim`.
pub fn counts_of(multiset: &[usize], dim: usize) -> Vec<usize> {
    let mut counts = vec![0; dim];
    for &i in multiset {
        counts[i] += 1;
    }
    counts
}

/// All count vectors `α ∈ ℕ₀^parts` with `|α| = total`, lexicographic in the
/// underlying sorted tuples.
pub fn compositions(parts: usize, total: usize) -> Vec<Vec<usize>> {
    multisets(parts, total)
        .into_iter()
        .map(|m| counts_of(&m, parts))
        .collect()
}

/// Number of multisets of size `len` drawn from `dim` symbols.
pub fn multiset_count(dim: usize, len: usize) -> usize {
    if dim == 0 {
        return usize::from(len == 0);
    }
    binomial(dim + len - 1, len) as usize
}
