//! Elimination orderings on the positive roots and their per-root witnesses.
//!
//! A witness licenses the elimination of a non-simple root `λ`:
//!
//! * `Single { mu, simple }`: `λ = μ + simple` and every other root of
//!   `{μ} + Π` comes strictly after `λ` in the ordering;
//! * `Pair { mu1, mu2, simple }`: `λ = μ1 + μ2 + simple`, the only root of the
//!   form `μ1 + μ2 + (simple root)` is `λ`, and `μ1 + μ2` is not a root.

use super::{Family, Root, RootSystem, RootSystemKind};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Single { mu: Root, simple: Root },
    Pair { mu1: Root, mu2: Root, simple: Root },
}

impl Witness {
    pub fn simple(&self) -> &Root {
        match self {
            Witness::Single { simple, .. } | Witness::Pair { simple, .. } => simple,
        }
    }

    pub fn is_pair(&self) -> bool {
        matches!(self, Witness::Pair { .. })
    }

    fn truncated(&self, rank: usize) -> Witness {
        let t = |r: &Root| Root::new(r.coeffs()[..rank].to_vec());
        match self {
            Witness::Single { mu, simple } => Witness::Single { mu: t(mu), simple: t(simple) },
            Witness::Pair { mu1, mu2, simple } => Witness::Pair { mu1: t(mu1), mu2: t(mu2), simple: t(simple) },
        }
    }
}

/// Total order on the positive roots plus one witness per non-simple root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionOrder {
    pub kind: RootSystemKind,
    pub sequence: Vec<Root>,
    pub witnesses: BTreeMap<Root, Witness>,
}

impl ReductionOrder {
    /// Position of every root in the sequence.
    pub fn positions(&self) -> HashMap<&Root, usize> {
        self.sequence.iter().enumerate().map(|(i, r)| (r, i)).collect()
    }

    pub fn witness(&self, r: &Root) -> Option<&Witness> {
        self.witnesses.get(r)
    }

    pub fn pair_count(&self) -> usize {
        self.witnesses.values().filter(|w| w.is_pair()).count()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let doc = OrderDoc {
            version: 1,
            kind: self.kind,
            sequence: self.sequence.clone(),
            witnesses: self
                .sequence
                .iter()
                .filter_map(|r| self.witnesses.get(r).map(|w| WitnessEntry { root: r.clone(), witness: w.clone() }))
                .collect(),
        };
        serde_json::to_value(doc).expect("order serializes")
    }

    pub fn from_json(v: serde_json::Value) -> std::result::Result<Self, serde_json::Error> {
        let doc: OrderDoc = serde_json::from_value(v)?;
        Ok(ReductionOrder {
            kind: doc.kind,
            sequence: doc.sequence,
            witnesses: doc.witnesses.into_iter().map(|e| (e.root, e.witness)).collect(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct OrderDoc {
    version: u32,
    kind: RootSystemKind,
    sequence: Vec<Root>,
    witnesses: Vec<WitnessEntry>,
}

#[derive(Serialize, Deserialize)]
struct WitnessEntry {
    root: Root,
    witness: Witness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// The sequence is not a permutation of the positive roots.
    Sequence,
    /// The sequence is not sorted by height.
    NotHeightGraded,
    MissingWitness,
    UnexpectedWitness,
    /// A witness mentions something that is not a (simple) positive root.
    UnknownRoot,
    /// The witness roots do not add up to the target.
    SumMismatch,
    /// Another member of `{μ} + Π` precedes the target.
    NotMinimal,
    /// `{μ1} + {μ2} + Π` contains a root other than the target.
    PairNotSingleton,
    /// `μ1 + μ2` is a root.
    PairSumIsRoot,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub root: Option<Root>,
    pub kind: ViolationKind,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.root {
            Some(r) => write!(f, "{:?} at {}: {}", self.kind, r, self.detail),
            None => write!(f, "{:?}: {}", self.kind, self.detail),
        }
    }
}

/// Checks every witness of `order` against the ordering conditions.
/// An empty result means the order is valid.
pub fn verify_order(rs: &RootSystem, order: &ReductionOrder) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut v = |root: Option<&Root>, kind: ViolationKind, detail: String| {
        out.push(Violation { root: root.cloned(), kind, detail })
    };

    let seq_set: HashSet<&Root> = order.sequence.iter().collect();
    if order.sequence.len() != rs.len() || seq_set.len() != rs.len() || !order.sequence.iter().all(|r| rs.contains(r)) {
        v(None, ViolationKind::Sequence, format!("{} entries, expected the {} positive roots", order.sequence.len(), rs.len()));
        return out;
    }
    if order.sequence.windows(2).any(|w| w[0].height() > w[1].height()) {
        v(None, ViolationKind::NotHeightGraded, "a root precedes one of smaller height".into());
    }
    let pos = order.positions();

    for r in order.witnesses.keys() {
        if !rs.contains(r) || r.is_simple() {
            v(Some(r), ViolationKind::UnexpectedWitness, "witness attached to a simple or unknown root".into());
        }
    }

    for target in order.sequence.iter().filter(|r| !r.is_simple()) {
        let Some(w) = order.witnesses.get(target) else {
            v(Some(target), ViolationKind::MissingWitness, "non-simple root without witness".into());
            continue;
        };
        let simple = w.simple();
        if simple.rank() != rs.rank() || !simple.is_simple() {
            v(Some(target), ViolationKind::UnknownRoot, format!("{simple:?} is not a simple root"));
            continue;
        }
        match w {
            Witness::Single { mu, .. } => {
                let Some(mi) = rs.index_of(mu) else {
                    v(Some(target), ViolationKind::UnknownRoot, format!("μ = {mu:?} is not a positive root"));
                    continue;
                };
                if &mu.add(simple) != target {
                    v(Some(target), ViolationKind::SumMismatch, format!("{mu} + {simple} ≠ {target}"));
                    continue;
                }
                let here = pos[target];
                for other in rs.plus_simples(mi) {
                    let o = rs.root(other);
                    if o != target && pos[o] <= here {
                        v(Some(target), ViolationKind::NotMinimal, format!("{o} ∈ {{{mu}}} + Π precedes the target"));
                    }
                }
            }
            Witness::Pair { mu1, mu2, .. } => {
                if !rs.contains(mu1) || !rs.contains(mu2) {
                    v(Some(target), ViolationKind::UnknownRoot, format!("({mu1:?}, {mu2:?}) not both positive roots"));
                    continue;
                }
                let sum = mu1.add(mu2);
                if &sum.add(simple) != target {
                    v(Some(target), ViolationKind::SumMismatch, format!("{mu1} + {mu2} + {simple} ≠ {target}"));
                    continue;
                }
                if rs.contains(&sum) {
                    v(Some(target), ViolationKind::PairSumIsRoot, format!("μ1 + μ2 = {sum} is a root (pair {mu1}, {mu2})"));
                }
                for j in 0..rs.rank() {
                    let cand = sum.add(&Root::simple(rs.rank(), j));
                    if &cand != target && rs.contains(&cand) {
                        v(Some(target), ViolationKind::PairNotSingleton, format!("{cand} ∈ {{μ1}} + {{μ2}} + Π"));
                    }
                }
            }
        }
    }
    out
}

/// Builds a coefficient vector from 1-based inclusive ranges with multiplicities.
fn seg(n: usize, parts: &[(usize, usize, u32)]) -> Root {
    let mut c = vec![0u32; n];
    for &(lo, hi, m) in parts {
        for x in lo..=hi {
            c[x - 1] += m;
        }
    }
    Root::new(c)
}

fn single(lambda: &Root, mu: Root) -> (Root, Witness) {
    let simple = lambda.checked_sub(&mu).expect("μ below λ");
    debug_assert!(simple.is_simple(), "{lambda:?} - {mu:?} not simple");
    (lambda.clone(), Witness::Single { mu, simple })
}

fn pair(lambda: &Root, mu1: Root, mu2: Root) -> (Root, Witness) {
    let simple = lambda.checked_sub(&mu1.add(&mu2)).expect("μ1 + μ2 below λ");
    debug_assert!(simple.is_simple());
    (lambda.clone(), Witness::Pair { mu1, mu2, simple })
}

fn classical_witnesses(kind: RootSystemKind) -> Vec<(Root, Witness)> {
    let n = kind.rank;
    let mut w = Vec::new();
    // λ_i + ... + λ_j with μ = λ_i + ... + λ_{j-1}; shared by A, B, C
    let chains = |w: &mut Vec<(Root, Witness)>, last: usize| {
        for i in 1..=last {
            for j in i + 1..=last {
                w.push(single(&seg(n, &[(i, j, 1)]), seg(n, &[(i, j - 1, 1)])));
            }
        }
    };
    match kind.family {
        Family::A => chains(&mut w, n),
        Family::B => {
            chains(&mut w, n);
            for i in 1..=n {
                for j in i + 1..=n {
                    let lambda = seg(n, &[(i, j - 1, 1), (j, n, 2)]);
                    let mu = if j != n { seg(n, &[(i, j, 1), (j + 1, n, 2)]) } else { seg(n, &[(i, n, 1)]) };
                    w.push(single(&lambda, mu));
                }
            }
        }
        Family::C => {
            chains(&mut w, n);
            for i in 1..n {
                let lambda = seg(n, &[(i, n - 1, 2), (n, n, 1)]);
                let mu = if i != n - 1 { seg(n, &[(i, i, 1), (i + 1, n - 1, 2), (n, n, 1)]) } else { seg(n, &[(n - 1, n, 1)]) };
                w.push(single(&lambda, mu));
            }
            for i in 1..n {
                for j in i + 1..n {
                    let lambda = seg(n, &[(i, j - 1, 1), (j, n - 1, 2), (n, n, 1)]);
                    let mu = if j != n - 1 { seg(n, &[(i, j, 1), (j + 1, n - 1, 2), (n, n, 1)]) } else { seg(n, &[(i, n, 1)]) };
                    w.push(single(&lambda, mu));
                }
            }
        }
        Family::D => {
            // λ_i + ... + λ_k for k ≤ n-1
            for i in 1..n {
                for k in i + 1..n {
                    let lambda = seg(n, &[(i, k, 1)]);
                    if k <= n - 2 {
                        w.push(single(&lambda, seg(n, &[(i, k - 1, 1)])));
                    } else if i <= n - 3 {
                        w.push(pair(&lambda, seg(n, &[(i, n - 3, 1)]), Root::simple(n, n - 2)));
                    } else {
                        // λ_{n-2} + λ_{n-1}
                        w.push(single(&lambda, Root::simple(n, n - 2)));
                    }
                }
            }
            // λ_i + ... + λ_{n-2} + λ_j + ... + λ_n
            for i in 1..=n - 2 {
                for j in i + 1..=n {
                    let lambda = seg(n, &[(i, n - 2, 1), (j, n, 1)]);
                    if j == n {
                        w.push(single(&lambda, seg(n, &[(i, n - 2, 1)])));
                    } else if j == n - 1 {
                        if i == n - 2 {
                            w.push(pair(&lambda, Root::simple(n, n - 2), Root::simple(n, n - 1)));
                        } else {
                            w.push(single(&lambda, seg(n, &[(i, n - 2, 1), (n, n, 1)])));
                        }
                    } else {
                        w.push(single(&lambda, seg(n, &[(i, n - 2, 1), (j + 1, n, 1)])));
                    }
                }
            }
        }
        _ => unreachable!("not a classical family"),
    }
    w
}

/// (height-class position, λ, μ or μ1, μ2)
type F4Row = (u32, [u32; 4], [u32; 4], Option<[u32; 4]>);

/// The tabulated `F_4` ordering.
const F4_TABLE: &[F4Row] = &[
    (1, [1, 1, 0, 0], [0, 1, 0, 0], None),
    (2, [0, 1, 1, 0], [0, 0, 1, 0], None),
    (3, [0, 0, 1, 1], [0, 0, 0, 1], None),
    (2, [1, 1, 1, 0], [1, 1, 0, 0], None),
    (1, [0, 1, 2, 0], [0, 1, 1, 0], None),
    (3, [0, 1, 1, 1], [0, 0, 1, 1], None),
    (1, [1, 1, 2, 0], [1, 1, 1, 0], None),
    (3, [1, 1, 1, 1], [1, 1, 0, 0], Some([0, 0, 0, 1])),
    (2, [0, 1, 2, 1], [0, 1, 1, 1], None),
    (1, [1, 2, 2, 0], [1, 1, 2, 0], None),
    (3, [1, 1, 2, 1], [1, 1, 1, 1], None),
    (2, [0, 1, 2, 2], [0, 1, 2, 1], None),
    (1, [1, 2, 2, 1], [1, 2, 2, 0], None),
    (2, [1, 1, 2, 2], [0, 1, 2, 2], None),
    (1, [1, 2, 3, 1], [1, 2, 2, 1], None),
    (2, [1, 2, 2, 2], [1, 1, 2, 2], None),
    (1, [1, 2, 3, 2], [1, 2, 3, 1], None),
    (1, [1, 2, 4, 2], [1, 2, 3, 2], None),
    (1, [1, 3, 4, 2], [1, 2, 4, 2], None),
    (1, [2, 3, 4, 2], [1, 3, 4, 2], None),
];

fn f4_order() -> (Vec<Root>, Vec<(Root, Witness)>) {
    let mut seq: Vec<(u32, u32, Root)> = (0..4).map(|i| (1, i as u32, Root::simple(4, i))).collect();
    let mut w = Vec::new();
    for (slot, lambda, mu, mu2) in F4_TABLE {
        let lambda = Root::new(lambda.to_vec());
        seq.push((lambda.height(), *slot, lambda.clone()));
        match mu2 {
            None => w.push(single(&lambda, Root::new(mu.to_vec()))),
            Some(m2) => w.push(pair(&lambda, Root::new(mu.to_vec()), Root::new(m2.to_vec()))),
        }
    }
    seq.sort();
    (seq.into_iter().map(|(_, _, r)| r).collect(), w)
}

fn g2_witnesses() -> Vec<(Root, Witness)> {
    let r = |a, b| Root::new(vec![a, b]);
    vec![
        single(&r(1, 1), r(1, 0)),
        single(&r(2, 1), r(1, 1)),
        single(&r(3, 1), r(2, 1)),
        single(&r(3, 2), r(3, 1)),
    ]
}

/// The reference ordering for each type: height first, then lexicographic, with
/// closed-form witnesses for the classical types, the tabulated `F_4` order,
/// height order for `G_2`, and for `E_6, E_7, E_8` the order induced from the
/// canonical searched `E_8` order.
pub fn builtin_order(rs: &RootSystem) -> ReductionOrder {
    let kind = rs.kind();
    let (sequence, witnesses) = match kind.family {
        Family::A | Family::B | Family::C | Family::D => {
            let mut seq = rs.positives().to_vec();
            seq.sort_by(|a, b| a.height().cmp(&b.height()).then_with(|| a.coeffs().cmp(b.coeffs())));
            (seq, classical_witnesses(kind))
        }
        Family::F => f4_order(),
        Family::G => {
            let mut seq = rs.positives().to_vec();
            seq.sort_by_key(Root::height);
            (seq, g2_witnesses())
        }
        Family::E => {
            let e8 = RootSystem::new(RootSystemKind { family: Family::E, rank: 8 });
            let full = search_order(&e8).expect("E8 admits an ordering");
            if kind.rank == 8 {
                return full;
            }
            return restrict_order(&full, kind);
        }
    };
    ReductionOrder { kind, sequence, witnesses: witnesses.into_iter().collect() }
}

/// Restricts an order on a larger system to the roots supported on the first
/// `kind.rank` simple roots.
fn restrict_order(full: &ReductionOrder, kind: RootSystemKind) -> ReductionOrder {
    let n = kind.rank;
    let inside = |r: &Root| r.coeffs()[n..].iter().all(|&c| c == 0);
    let sequence = full.sequence.iter().filter(|r| inside(r)).map(|r| Root::new(r.coeffs()[..n].to_vec())).collect();
    let witnesses = full
        .witnesses
        .iter()
        .filter(|(r, _)| inside(r))
        .map(|(r, w)| (Root::new(r.coeffs()[..n].to_vec()), w.truncated(n)))
        .collect();
    ReductionOrder { kind, sequence, witnesses }
}

/// Finds an ordering by search: heights ascending, and within each height the
/// order is built from the top down, always placing the lexicographically
/// greatest root that has an admissible witness. Single witnesses are
/// preferred; a pair is used only when no single witness is admissible.
pub fn search_order(rs: &RootSystem) -> Result<ReductionOrder> {
    let n = rs.rank();
    let mut sequence: Vec<Root> = rs.simples().to_vec();
    let mut witnesses = BTreeMap::new();
    for h in 2..=rs.max_height() {
        let mut remaining: Vec<usize> = rs.layer(h);
        // lexicographically descending
        remaining.sort_by(|&a, &b| rs.root(b).coeffs().cmp(rs.root(a).coeffs()));
        let mut placed: HashSet<usize> = HashSet::new();
        let mut top_down: Vec<usize> = Vec::new();
        while !remaining.is_empty() {
            let mut pick = None;
            for (slot, &lam) in remaining.iter().enumerate() {
                if let Some(w) = single_candidate(rs, lam, &placed) {
                    pick = Some((slot, w));
                    break;
                }
            }
            if pick.is_none() {
                for (slot, &lam) in remaining.iter().enumerate() {
                    if let Some(w) = pair_candidate(rs, lam) {
                        pick = Some((slot, w));
                        break;
                    }
                }
            }
            let Some((slot, w)) = pick else {
                return Err(Error::OrderSearchExhausted { root: rs.root(remaining[0]).coeffs().to_vec() });
            };
            let lam = remaining.remove(slot);
            placed.insert(lam);
            top_down.push(lam);
            witnesses.insert(rs.root(lam).clone(), w);
        }
        sequence.extend(top_down.into_iter().rev().map(|i| rs.root(i).clone()));
    }
    debug_assert_eq!(sequence.len(), rs.len());
    let _ = n;
    Ok(ReductionOrder { kind: rs.kind(), sequence, witnesses })
}

fn single_candidate(rs: &RootSystem, lam: usize, above: &HashSet<usize>) -> Option<Witness> {
    let target = rs.root(lam);
    // candidate μ in listing order
    let mut cands: Vec<(usize, usize)> = (0..rs.rank())
        .filter_map(|j| target.checked_sub(&Root::simple(rs.rank(), j)).and_then(|mu| rs.index_of(&mu)).map(|mi| (mi, j)))
        .collect();
    cands.sort();
    for (mi, j) in cands {
        let simple = Root::simple(rs.rank(), j);
        let mu = rs.root(mi).clone();
        if rs.plus_simples(mi).into_iter().all(|o| o == lam || above.contains(&o)) {
            return Some(Witness::Single { mu, simple });
        }
    }
    None
}

fn pair_candidate(rs: &RootSystem, lam: usize) -> Option<Witness> {
    let target = rs.root(lam);
    let n = rs.rank();
    for j in 0..n {
        let simple = Root::simple(n, j);
        let Some(rest) = target.checked_sub(&simple) else { continue };
        if rs.contains(&rest) {
            continue;
        }
        for mu1 in rs.positives() {
            let Some(mu2) = rest.checked_sub(mu1) else { continue };
            if mu1 > &mu2 || !rs.contains(&mu2) {
                continue;
            }
            let singleton = (0..n).all(|k| k == j || !rs.contains(&rest.add(&Root::simple(n, k))));
            if singleton {
                return Some(Witness::Pair { mu1: mu1.clone(), mu2, simple });
            }
        }
    }
    None
}
