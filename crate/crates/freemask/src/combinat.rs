//! Pair partitions of {1, ..., 2k}, the non-crossing ones, and the cycle
//! statistics of gamma-pi permutations that drive every limit formula in this
//! crate.
//!
//! Conventions: ground-set elements are 1-based, a pair (r, s) always has
//! r < s, and a partition's pairs are sorted by first element. Enumeration is
//! canonical: the smallest unmatched element is paired with each larger
//! unmatched element in increasing order, recursively. Two calls therefore
//! always yield identical sequences.

use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// Enumeration bound: pair partitions of {1,...,2k} number (2k-1)!!, which is
/// 2,027,025 at k = 8. Entry points that enumerate reject larger k; callers
/// that need more can use the `*_with_bound` visitors.
pub const K_MAX: usize = 8;

/// A perfect matching of {1, ..., 2k} stored as k ordered pairs in canonical
/// order (pairs sorted by first element, each pair (r, s) with r < s).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairPartition {
    pairs: Vec<(usize, usize)>,
}

impl PairPartition {
    /// Builds a partition from pairs in any order, canonicalizing and
    /// validating that they form a perfect matching of {1, .., 2k}.
    pub fn new(mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::domain("a pair partition needs at least one pair"));
        }
        let two_k = 2 * pairs.len();
        for p in pairs.iter_mut() {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
            if p.0 == p.1 {
                return Err(Error::domain(format!("pair ({},{}) repeats an element", p.0, p.1)));
            }
            if p.0 < 1 || p.1 > two_k {
                return Err(Error::domain(format!(
                    "pair ({},{}) leaves the ground set {{1,..,{two_k}}}",
                    p.0, p.1
                )));
            }
        }
        pairs.sort_unstable();
        let mut seen = vec![false; two_k + 1];
        for &(r, s) in &pairs {
            for e in [r, s] {
                if seen[e] {
                    return Err(Error::domain(format!("element {e} appears twice")));
                }
                seen[e] = true;
            }
        }
        Ok(PairPartition { pairs })
    }

    /// Internal constructor for pairs already in canonical order.
    pub(crate) fn from_canonical(pairs: Vec<(usize, usize)>) -> Self {
        PairPartition { pairs }
    }

    /// Number of pairs k; the ground set is {1, ..., 2k}.
    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn ground_size(&self) -> usize {
        2 * self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// The involution r -> partner of r, as a permutation of {1, ..., 2k}.
    pub fn involution(&self) -> Permutation {
        let mut images = vec![0usize; self.ground_size()];
        for &(r, s) in &self.pairs {
            images[r - 1] = s;
            images[s - 1] = r;
        }
        Permutation { images }
    }
}

impl fmt::Display for PairPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(r, s) in &self.pairs {
            write!(f, "({r},{s})")?;
        }
        Ok(())
    }
}

impl FromStr for PairPartition {
    type Err = Error;

    /// Parses "(1,2)(3,4)". Whitespace is not allowed; errors carry the
    /// 1-based column of the offending character.
    fn from_str(text: &str) -> Result<Self> {
        let bytes = text.as_bytes();
        let mut pairs = Vec::new();
        let mut i = 0usize;
        let read_number = |i: &mut usize| -> Result<usize> {
            let start = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            if *i == start {
                return Err(Error::parse(start + 1, "expected a positive integer"));
            }
            text[start..*i]
                .parse::<usize>()
                .map_err(|_| Error::parse(start + 1, "integer out of range"))
        };
        while i < bytes.len() {
            if bytes[i] != b'(' {
                return Err(Error::parse(i + 1, "expected '('"));
            }
            i += 1;
            let r = read_number(&mut i)?;
            if i >= bytes.len() || bytes[i] != b',' {
                return Err(Error::parse(i + 1, "expected ','"));
            }
            i += 1;
            let s = read_number(&mut i)?;
            if i >= bytes.len() || bytes[i] != b')' {
                return Err(Error::parse(i + 1, "expected ')'"));
            }
            i += 1;
            if r == 0 || s == 0 {
                return Err(Error::parse(i, "elements are 1-based"));
            }
            pairs.push((r, s));
        }
        if pairs.is_empty() {
            return Err(Error::parse(1, "expected at least one pair '(r,s)'"));
        }
        PairPartition::new(pairs)
    }
}

/// A permutation of {1, ..., n}; images are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n + 1];
        for &v in &images {
            if v < 1 || v > n || seen[v] {
                return Err(Error::domain("images do not form a bijection"));
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    /// The full cycle gamma = (1 2 ... n), i.e. r -> r+1 mod n.
    pub fn full_cycle(n: usize) -> Self {
        Permutation {
            images: (1..=n).map(|r| r % n + 1).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, r: usize) -> usize {
        self.images[r - 1]
    }

    /// (self . other)(r) = self(other(r)). Sizes must match.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.size() != other.size() {
            return Err(Error::domain("composing permutations of different sizes"));
        }
        Ok(Permutation {
            images: (1..=self.size()).map(|r| self.apply(other.apply(r))).collect(),
        })
    }

    /// Cycles listed by their smallest element, each traced from that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.size();
        let mut seen = vec![false; n + 1];
        let mut out = Vec::new();
        for start in 1..=n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut r = start;
            while !seen[r] {
                seen[r] = true;
                cycle.push(r);
                r = self.apply(r);
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }
}

fn check_k(k: usize, bound: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    if k > bound {
        return Err(Error::size_limit(format!(
            "k = {k} exceeds the enumeration bound {bound}"
        )));
    }
    Ok(())
}

/// Visits every pair partition of {1, ..., 2k} in canonical order without
/// materializing the sequence. The visitor sees pairs in canonical order.
pub fn for_each_pair_partition_with_bound(
    k: usize,
    bound: usize,
    mut f: impl FnMut(&[(usize, usize)]),
) -> Result<()> {
    check_k(k, bound)?;
    let mut used = vec![false; 2 * k + 1];
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(k);
    p2_rec(2 * k, &mut used, &mut pairs, &mut f);
    Ok(())
}

fn p2_rec(
    two_k: usize,
    used: &mut [bool],
    pairs: &mut Vec<(usize, usize)>,
    f: &mut impl FnMut(&[(usize, usize)]),
) {
    let mut a = 0;
    for e in 1..=two_k {
        if !used[e] {
            a = e;
            break;
        }
    }
    if a == 0 {
        f(pairs);
        return;
    }
    used[a] = true;
    for b in a + 1..=two_k {
        if used[b] {
            continue;
        }
        used[b] = true;
        pairs.push((a, b));
        p2_rec(two_k, used, pairs, f);
        pairs.pop();
        used[b] = false;
    }
    used[a] = false;
}

/// All pair partitions of {1, ..., 2k} in canonical order; (2k-1)!! of them.
pub fn enumerate_pair_partitions(k: usize) -> Result<Vec<PairPartition>> {
    let mut out = Vec::new();
    for_each_pair_partition_with_bound(k, K_MAX, |pairs| {
        out.push(PairPartition::from_canonical(pairs.to_vec()));
    })?;
    Ok(out)
}

/// True when no two pairs (a,b), (c,d) interleave as a < c < b < d.
pub fn is_noncrossing(p: &PairPartition) -> bool {
    pairs_noncrossing(p.pairs())
}

pub(crate) fn pairs_noncrossing(pairs: &[(usize, usize)]) -> bool {
    for (i, &(a, b)) in pairs.iter().enumerate() {
        for &(c, d) in &pairs[i + 1..] {
            // canonical order gives a < c
            if c < b && b < d {
                return false;
            }
            debug_assert!(a < c);
        }
    }
    true
}

/// Visits the non-crossing pair partitions of {1, ..., 2k} in canonical order
/// (the order `enumerate_pair_partitions` would produce them, skipping
/// crossing ones). Recursion is over contiguous segments, so the cost is
/// proportional to the Catalan number, not to (2k-1)!!.
pub fn for_each_nc2_with_bound(
    k: usize,
    bound: usize,
    mut f: impl FnMut(&[(usize, usize)]),
) -> Result<()> {
    check_k(k, bound)?;
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(k);
    let segments = vec![(1usize, 2 * k)];
    nc2_rec(&segments, &mut pairs, &mut f);
    Ok(())
}

fn nc2_rec(
    segments: &[(usize, usize)],
    pairs: &mut Vec<(usize, usize)>,
    f: &mut impl FnMut(&[(usize, usize)]),
) {
    let Some(&(lo, hi)) = segments.first() else {
        f(pairs);
        return;
    };
    // lo pairs with elements at odd offset so the enclosed stretch has even
    // size; everything in between must be matched within the stretch, which
    // is exactly the non-crossing condition.
    let mut m = lo + 1;
    while m <= hi {
        let mut next: Vec<(usize, usize)> = Vec::with_capacity(segments.len() + 1);
        if m > lo + 1 {
            next.push((lo + 1, m - 1));
        }
        if m < hi {
            next.push((m + 1, hi));
        }
        next.extend_from_slice(&segments[1..]);
        pairs.push((lo, m));
        nc2_rec(&next, pairs, f);
        pairs.pop();
        m += 2;
    }
}

/// The non-crossing pair partitions of {1, ..., 2k}: exactly the non-crossing
/// elements of `enumerate_pair_partitions(k)`, in the same order. catalan(k)
/// of them.
pub fn enumerate_nc2(k: usize) -> Result<Vec<PairPartition>> {
    let mut out = Vec::new();
    for_each_nc2_with_bound(k, K_MAX, |pairs| {
        out.push(PairPartition::from_canonical(pairs.to_vec()));
    })?;
    Ok(out)
}

/// Orbits of gamma-pi on {1, ..., 2k}, where gamma is the full cycle
/// (1 2 ... 2k), pi acts as the pairing involution, and (gamma pi)(r) =
/// gamma(pi(r)). Orbits are listed by smallest element, traced from it.
pub fn gamma_pi_orbits(p: &PairPartition) -> Vec<Vec<usize>> {
    let two_k = p.ground_size();
    let mut partner = vec![0usize; two_k + 1];
    for &(r, s) in p.pairs() {
        partner[r] = s;
        partner[s] = r;
    }
    let mut seen = vec![false; two_k + 1];
    let mut orbits = Vec::new();
    for start in 1..=two_k {
        if seen[start] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut r = start;
        while !seen[r] {
            seen[r] = true;
            orbit.push(r);
            r = partner[r] % two_k + 1;
        }
        orbits.push(orbit);
    }
    orbits
}

/// Number of gamma-pi orbits. At most k+1, with equality exactly on
/// non-crossing partitions.
pub fn gamma_pi_orbit_count(p: &PairPartition) -> usize {
    gamma_pi_orbits(p).len()
}

/// Gamma-pi orbit statistics computed straight from a canonical pairs slice:
/// (orbit count, count of orbits consisting entirely of odd positions).
pub(crate) fn orbit_stats(pairs: &[(usize, usize)]) -> (usize, usize) {
    let two_k = 2 * pairs.len();
    let mut partner = vec![0usize; two_k + 1];
    for &(r, s) in pairs {
        partner[r] = s;
        partner[s] = r;
    }
    let mut seen = vec![false; two_k + 1];
    let mut orbits = 0usize;
    let mut odd_orbits = 0usize;
    for start in 1..=two_k {
        if seen[start] {
            continue;
        }
        orbits += 1;
        let mut all_odd = true;
        let mut r = start;
        while !seen[r] {
            seen[r] = true;
            if r % 2 == 0 {
                all_odd = false;
            }
            r = partner[r] % two_k + 1;
        }
        if all_odd {
            odd_orbits += 1;
        }
    }
    (orbits, odd_orbits)
}

/// Catalan number C_m, exact for 0 <= m <= 30.
pub fn catalan(m: usize) -> Result<u64> {
    if m > 30 {
        return Err(Error::domain(format!("catalan({m}) exceeds the supported range m <= 30")));
    }
    let mut c: u128 = 1;
    for i in 0..m as u128 {
        // C_{i+1} = C_i * 2(2i+1) / (i+2), exact at every step
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    Ok(c as u64)
}
