//! Positive root systems of the reduced irreducible types.
//!
//! Roots are stored only as coefficient vectors over the simple roots; all
//! root-ness questions go through the enumerated positive roots. Simple roots
//! follow the Bourbaki numbering (for `B_n` the last simple root is short, for
//! `C_n` it is long, for `D_n` the last two hang off `λ_{n-2}`, for `E_n` the
//! branch node `λ_2` is attached to `λ_4`, for `F_4` `λ_1, λ_2` are long and for
//! `G_2` `λ_1` is short).

mod order;

pub use order::{builtin_order, search_order, verify_order, ReductionOrder, Violation, ViolationKind, Witness};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        Some(match c.to_ascii_uppercase() {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'E' => Family::E,
            'F' => Family::F,
            'G' => Family::G,
            _ => return None,
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Family::from_letter(c).ok_or_else(|| Error::UnknownKind(s.to_string())),
            _ => Err(Error::UnknownKind(s.to_string())),
        }
    }
}

/// Cartan type: a family letter and a rank satisfying that family's constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RootSystemKind {
    pub family: Family,
    pub rank: usize,
}

impl RootSystemKind {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let constraint = match family {
            Family::A if rank < 1 => Some("rank >= 1"),
            Family::B if rank < 2 => Some("rank >= 2"),
            Family::C if rank < 3 => Some("rank >= 3"),
            Family::D if rank < 4 => Some("rank >= 4"),
            Family::E if !(6..=8).contains(&rank) => Some("rank in {6, 7, 8}"),
            Family::F if rank != 4 => Some("rank = 4"),
            Family::G if rank != 2 => Some("rank = 2"),
            _ => None,
        };
        match constraint {
            Some(constraint) => Err(Error::InvalidRank { family: family.letter(), rank, constraint }),
            None => Ok(Self { family, rank }),
        }
    }

    /// Symmetric Gram matrix of the simple roots, scaled so that the shortest
    /// roots have squared length 2.
    pub fn gram(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut g = vec![vec![0i64; n]; n];
        let link = |g: &mut Vec<Vec<i64>>, i: usize, j: usize, v: i64| {
            g[i][j] = v;
            g[j][i] = v;
        };
        match self.family {
            Family::A => {
                for i in 0..n {
                    g[i][i] = 2;
                    if i + 1 < n {
                        link(&mut g, i, i + 1, -1);
                    }
                }
            }
            Family::B => {
                for i in 0..n {
                    g[i][i] = if i + 1 == n { 2 } else { 4 };
                    if i + 1 < n {
                        link(&mut g, i, i + 1, -2);
                    }
                }
            }
            Family::C => {
                for i in 0..n {
                    g[i][i] = if i + 1 == n { 4 } else { 2 };
                    if i + 1 < n {
                        link(&mut g, i, i + 1, if i + 2 == n { -2 } else { -1 });
                    }
                }
            }
            Family::D => {
                for i in 0..n {
                    g[i][i] = 2;
                }
                for i in 0..n - 2 {
                    link(&mut g, i, i + 1, -1);
                }
                link(&mut g, n - 3, n - 1, -1);
            }
            Family::E => {
                for i in 0..n {
                    g[i][i] = 2;
                }
                // 1-3-4-5-6-7-8 chain with 2 attached to 4 (1-based)
                link(&mut g, 0, 2, -1);
                link(&mut g, 1, 3, -1);
                for i in 2..n - 1 {
                    link(&mut g, i, i + 1, -1);
                }
            }
            Family::F => {
                g[0][0] = 4;
                g[1][1] = 4;
                g[2][2] = 2;
                g[3][3] = 2;
                link(&mut g, 0, 1, -2);
                link(&mut g, 1, 2, -2);
                link(&mut g, 2, 3, -1);
            }
            Family::G => {
                g[0][0] = 2;
                g[1][1] = 6;
                link(&mut g, 0, 1, -3);
            }
        }
        g
    }

    /// Closed-form number of positive roots.
    pub fn expected_positive_count(&self) -> usize {
        let n = self.rank;
        match self.family {
            Family::A => n * (n + 1) / 2,
            Family::B | Family::C => n * n,
            Family::D => n * (n - 1),
            Family::E => match n {
                6 => 36,
                7 => 63,
                _ => 120,
            },
            Family::F => 24,
            Family::G => 6,
        }
    }
}

impl fmt::Display for RootSystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

impl FromStr for RootSystemKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let family = chars
            .next()
            .and_then(Family::from_letter)
            .ok_or_else(|| Error::UnknownKind(s.to_string()))?;
        let rank: usize = chars.as_str().parse().map_err(|_| Error::UnknownKind(s.to_string()))?;
        RootSystemKind::new(family, rank)
    }
}

impl<'de> Deserialize<'de> for RootSystemKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            family: Family,
            rank: usize,
        }
        let raw = Raw::deserialize(d)?;
        RootSystemKind::new(raw.family, raw.rank).map_err(serde::de::Error::custom)
    }
}

/// A root written in the basis of simple roots.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Root(Vec<u32>);

impl Root {
    pub fn new(coeffs: Vec<u32>) -> Self {
        Root(coeffs)
    }

    /// The `i`-th simple root (0-based) in a system of the given rank.
    pub fn simple(rank: usize, i: usize) -> Self {
        let mut c = vec![0; rank];
        c[i] = 1;
        Root(c)
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn height(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_simple(&self) -> bool {
        self.height() == 1
    }

    /// Index of the simple root this is, if it is one.
    pub fn simple_index(&self) -> Option<usize> {
        if self.is_simple() {
            self.0.iter().position(|&c| c == 1)
        } else {
            None
        }
    }

    pub fn add(&self, other: &Root) -> Root {
        Root(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other`, if every coefficient stays non-negative.
    pub fn checked_sub(&self, other: &Root) -> Option<Root> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(Root)
    }

    /// Compact label such as `[1,2,0]`, used as a JSON map key.
    pub fn label(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(","))
    }

    pub fn parse_label(s: &str) -> Option<Root> {
        let inner = s.trim().strip_prefix('[')?.strip_suffix(']')?;
        inner.split(',').map(|p| p.trim().parse::<u32>().ok()).collect::<Option<Vec<_>>>().map(Root)
    }
}

impl fmt::Debug for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                f.write_str("+")?;
            }
            first = false;
            if c > 1 {
                write!(f, "{c}")?;
            }
            write!(f, "λ{}", i + 1)?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Positive roots of one irreducible type together with their addition table.
///
/// Roots are listed by height, and within a height by decreasing coefficient
/// vector, so the simple roots occupy indices `0..rank` in their natural order.
#[derive(Clone, Debug)]
pub struct RootSystem {
    kind: RootSystemKind,
    gram: Vec<Vec<i64>>,
    positives: Vec<Root>,
    index: HashMap<Root, usize>,
    sums: Vec<Option<usize>>,
}

pub fn build_root_system(kind: RootSystemKind) -> RootSystem {
    RootSystem::new(kind)
}

impl RootSystem {
    pub fn new(kind: RootSystemKind) -> Self {
        let n = kind.rank;
        let gram = kind.gram();
        let mut known: HashMap<Vec<i32>, ()> = HashMap::new();
        let mut level: Vec<Vec<i32>> = (0..n)
            .map(|i| {
                let mut c = vec![0; n];
                c[i] = 1;
                c
            })
            .collect();
        let mut all: Vec<Vec<i32>> = Vec::new();
        while !level.is_empty() {
            for r in &level {
                known.insert(r.clone(), ());
            }
            let mut next: Vec<Vec<i32>> = Vec::new();
            for beta in &level {
                for i in 0..n {
                    // alpha_i-string through beta: beta - q a_i, ..., beta + p a_i
                    let mut q = 0;
                    let mut probe = beta.clone();
                    loop {
                        probe[i] -= 1;
                        if known.contains_key(&probe) {
                            q += 1;
                        } else {
                            break;
                        }
                    }
                    let ip: i64 = (0..n).map(|j| beta[j] as i64 * gram[j][i]).sum();
                    let pairing = 2 * ip / gram[i][i];
                    let p = q - pairing;
                    if p > 0 {
                        let mut up = beta.clone();
                        up[i] += 1;
                        if !next.contains(&up) {
                            next.push(up);
                        }
                    }
                }
            }
            all.append(&mut level);
            level = next;
        }
        let mut positives: Vec<Root> = all.into_iter().map(|c| Root(c.into_iter().map(|x| x as u32).collect())).collect();
        positives.sort_by(|a, b| a.height().cmp(&b.height()).then_with(|| b.0.cmp(&a.0)));
        let index: HashMap<Root, usize> = positives.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
        let m = positives.len();
        let mut sums = vec![None; m * m];
        for a in 0..m {
            for b in 0..m {
                sums[a * m + b] = index.get(&positives[a].add(&positives[b])).copied();
            }
        }
        RootSystem { kind, gram, positives, index, sums }
    }

    pub fn kind(&self) -> RootSystemKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.kind.rank
    }

    pub fn positives(&self) -> &[Root] {
        &self.positives
    }

    pub fn simples(&self) -> &[Root] {
        &self.positives[..self.rank()]
    }

    pub fn len(&self) -> usize {
        self.positives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positives.is_empty()
    }

    pub fn root(&self, i: usize) -> &Root {
        &self.positives[i]
    }

    pub fn index_of(&self, r: &Root) -> Option<usize> {
        self.index.get(r).copied()
    }

    pub fn contains(&self, r: &Root) -> bool {
        self.index.contains_key(r)
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    /// Index of `a + b` when both are positive-root indices and the sum is a root.
    pub fn sum_index(&self, a: usize, b: usize) -> Option<usize> {
        self.sums[a * self.len() + b]
    }

    pub fn sum_root(&self, a: &Root, b: &Root) -> Option<&Root> {
        let (ia, ib) = (self.index_of(a)?, self.index_of(b)?);
        self.sum_index(ia, ib).map(|s| &self.positives[s])
    }

    pub fn height(&self, i: usize) -> u32 {
        self.positives[i].height()
    }

    pub fn max_height(&self) -> u32 {
        self.positives.last().map(Root::height).unwrap_or(0)
    }

    /// `R_h`: number of positive roots of each height, indexed by height.
    pub fn height_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_height() as usize + 1];
        for r in &self.positives {
            counts[r.height() as usize] += 1;
        }
        counts
    }

    /// Inner product of two coefficient vectors under the Gram matrix.
    pub fn inner(&self, a: &[i64], b: &[i64]) -> i64 {
        let n = self.rank();
        let mut s = 0;
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..n {
                s += a[i] * self.gram[i][j] * b[j];
            }
        }
        s
    }

    pub fn root_norm(&self, i: usize) -> i64 {
        let c: Vec<i64> = self.positives[i].0.iter().map(|&x| x as i64).collect();
        self.inner(&c, &c)
    }

    /// Cartan integer `<β, λ_i^∨> = 2(β, λ_i)/(λ_i, λ_i)` for a positive root `β`.
    pub fn pairing(&self, beta: usize, i: usize) -> i64 {
        let c = &self.positives[beta].0;
        let ip: i64 = (0..self.rank()).map(|j| c[j] as i64 * self.gram[j][i]).sum();
        2 * ip / self.gram[i][i]
    }

    /// `{μ} + Π`: the roots reachable from `mu` by adding one simple root.
    pub fn plus_simples(&self, mu: usize) -> Vec<usize> {
        (0..self.rank()).filter_map(|j| self.sum_index(mu, j)).collect()
    }

    /// Positive-root indices of the given height.
    pub fn layer(&self, h: u32) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.height(i) == h).collect()
    }

    /// The highest root (the unique root of maximal height).
    pub fn highest_root(&self) -> &Root {
        self.positives.last().expect("root systems are non-empty")
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct RootSystemDoc {
    pub version: u32,
    pub kind: RootSystemKind,
    pub positives: Vec<Root>,
}

impl RootSystem {
    /// Versioned JSON document listing the positive roots.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(RootSystemDoc { version: 1, kind: self.kind, positives: self.positives.clone() })
            .expect("root system serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(s: &str) -> RootSystem {
        RootSystem::new(s.parse().unwrap())
    }

    #[test]
    fn rank_constraints() {
        assert!(RootSystemKind::new(Family::A, 0).is_err());
        assert!(RootSystemKind::new(Family::B, 1).is_err());
        assert!(RootSystemKind::new(Family::C, 2).is_err());
        assert!(RootSystemKind::new(Family::D, 3).is_err());
        assert!(RootSystemKind::new(Family::E, 5).is_err());
        assert!(RootSystemKind::new(Family::F, 3).is_err());
        assert!(RootSystemKind::new(Family::G, 3).is_err());
        let err = RootSystemKind::new(Family::E, 9).unwrap_err().to_string();
        assert!(err.contains("rank in {6, 7, 8}"), "{err}");
        assert!("X3".parse::<RootSystemKind>().is_err());
        assert_eq!("g2".parse::<RootSystemKind>().unwrap().to_string(), "G2");
    }

    #[test]
    fn small_listings() {
        let a2 = rs("A2");
        let got: Vec<Vec<u32>> = a2.positives().iter().map(|r| r.coeffs().to_vec()).collect();
        assert_eq!(got, vec![vec![1, 0], vec![0, 1], vec![1, 1]]);

        let b2 = rs("B2");
        assert_eq!(b2.len(), 4);
        assert!(b2.contains(&Root::new(vec![1, 2])));
        assert!(!b2.contains(&Root::new(vec![2, 1])));
    }

    #[test]
    fn counts_and_heights() {
        let cases = [
            ("A1", 1, 1),
            ("A5", 15, 5),
            ("B4", 16, 7),
            ("C4", 16, 7),
            ("D5", 20, 7),
            ("E6", 36, 11),
            ("E7", 63, 17),
            ("E8", 120, 29),
            ("F4", 24, 11),
            ("G2", 6, 5),
        ];
        for (name, count, max_h) in cases {
            let r = rs(name);
            assert_eq!(r.len(), count, "{name}");
            assert_eq!(r.len(), r.kind().expected_positive_count(), "{name}");
            assert_eq!(r.max_height(), max_h, "{name}");
        }
        let f4 = rs("F4");
        assert_eq!(f4.highest_root(), &Root::new(vec![2, 3, 4, 2]));
        assert_eq!(f4.highest_root().height(), 11);
        assert_eq!(rs("E8").highest_root(), &Root::new(vec![2, 3, 4, 6, 5, 4, 3, 2]));
    }

    #[test]
    fn heights_of_named_roots() {
        assert_eq!(Root::simple(2, 0).height(), 1);
        assert_eq!(Root::new(vec![1, 2]).height(), 3);
    }

    #[test]
    fn sum_root_examples() {
        let a2 = rs("A2");
        let l1 = Root::simple(2, 0);
        let l2 = Root::simple(2, 1);
        assert_eq!(a2.sum_root(&l1, &l2), Some(&Root::new(vec![1, 1])));
        assert_eq!(a2.sum_root(&l1, &l1), None);

        let f4 = rs("F4");
        assert_eq!(f4.sum_root(&Root::new(vec![1, 1, 0, 0]), &Root::simple(4, 3)), None);
    }

    #[test]
    fn sum_table_closed_and_simples_listed_first() {
        for name in ["B3", "C3", "D4", "E6", "F4", "G2"] {
            let r = rs(name);
            for (i, s) in r.simples().iter().enumerate() {
                assert_eq!(s, &Root::simple(r.rank(), i));
            }
            for a in 0..r.len() {
                for b in 0..r.len() {
                    let want = r.index_of(&r.root(a).add(r.root(b)));
                    assert_eq!(r.sum_index(a, b), want);
                }
            }
        }
    }

    #[test]
    fn label_round_trip() {
        let r = Root::new(vec![1, 0, 2]);
        assert_eq!(r.label(), "[1,0,2]");
        assert_eq!(Root::parse_label(" [1, 0,2] "), Some(r));
        assert_eq!(Root::parse_label("1,0"), None);
    }
}
