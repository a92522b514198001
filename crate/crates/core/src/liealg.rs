//! Chevalley basis of the split semisimple Lie algebra attached to a root
//! system, with exact brackets, adjoint exponentials and the Killing form.
//!
//! Basis indexing: `0..m` are `e_λ` for the positive roots in listing order,
//! `m..2m` are `e_{-λ}` in the same order and `2m..2m+rank` are the `h_i`.
//! Structure constants are built with Carter's extraspecial-pair algorithm:
//! `N_{α1,β1} = +(p+1)` on every extraspecial pair, all other constants forced.

use crate::error::{Error, Result};
use crate::rational::{fmt_q, q, Q};
use crate::rootsys::{Root, RootSystem, RootSystemKind};
use num_traits::Zero;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

/// `e_{±λ}` (root given by its listing index) or `h_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisElement {
    RootVector { root: usize, sign: Sign },
    CartanGenerator { index: usize },
}

/// Finite linear combination of basis elements (by basis index) with exact
/// coefficients. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LieElement {
    terms: BTreeMap<usize, Q>,
}

impl LieElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(idx: usize) -> Self {
        Self::scaled_basis(idx, q(1))
    }

    pub fn scaled_basis(idx: usize, c: Q) -> Self {
        let mut e = Self::zero();
        e.add_term(idx, c);
        e
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, Q)>) -> Self {
        let mut e = Self::zero();
        for (i, c) in terms {
            e.add_term(i, c);
        }
        e
    }

    pub fn add_term(&mut self, idx: usize, c: Q) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(idx).or_insert_with(Q::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&idx);
        }
    }

    pub fn add_scaled(&mut self, other: &LieElement, c: &Q) {
        for (&i, v) in &other.terms {
            self.add_term(i, v * c);
        }
    }

    pub fn scale(&self, c: &Q) -> LieElement {
        if c.is_zero() {
            return LieElement::zero();
        }
        LieElement { terms: self.terms.iter().map(|(&i, v)| (i, v * c)).collect() }
    }

    pub fn neg(&self) -> LieElement {
        LieElement { terms: self.terms.iter().map(|(&i, v)| (i, -v)).collect() }
    }

    pub fn sum(&self, other: &LieElement) -> LieElement {
        let mut out = self.clone();
        out.add_scaled(other, &q(1));
        out
    }

    pub fn coeff(&self, idx: usize) -> Q {
        self.terms.get(&idx).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Q)> {
        self.terms.iter().map(|(&i, c)| (i, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Supported on positive root vectors only (`m` = number of positive roots).
    pub fn is_nilpotent_positive(&self, m: usize) -> bool {
        self.terms.keys().all(|&i| i < m)
    }

    pub fn is_cartan(&self, m: usize) -> bool {
        self.terms.keys().all(|&i| i >= 2 * m)
    }
}

/// Chevalley basis with its integer bracket table and Killing-form values.
#[derive(Debug)]
pub struct ChevalleyBasis {
    rs: RootSystem,
    m: usize,
    /// signed root index (`0..2m`) → integer coefficient vector
    signed: Vec<Vec<i64>>,
    /// `N_{x,y}` for signed roots, zero when `x+y` is not a root
    n: Vec<i64>,
    signed_sum: Vec<Option<usize>>,
    /// bracket of basis elements `(a, b)` at `a * dim + b`
    table: Vec<Vec<(usize, i64)>>,
    /// `B(e_λ, e_{-λ})` per positive root
    killing_root: Vec<i64>,
    /// `B(h_i, h_j)`
    killing_cartan: Vec<Vec<i64>>,
    norm_sq: Vec<Q>,
}

fn shared_cache() -> &'static Mutex<HashMap<RootSystemKind, Arc<ChevalleyBasis>>> {
    static CACHE: OnceLock<Mutex<HashMap<RootSystemKind, Arc<ChevalleyBasis>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

pub fn chevalley_basis(rs: &RootSystem) -> Result<ChevalleyBasis> {
    ChevalleyBasis::new(rs.clone())
}

impl ChevalleyBasis {
    /// Builds the basis, verifying the Jacobi identity on every basis triple.
    pub fn new(rs: RootSystem) -> Result<Self> {
        let mut cb = Self::build(rs)?;
        let failures = cb.jacobi_failures();
        if failures > 0 {
            return Err(Error::JacobiFailure { failures });
        }
        cb.compute_killing();
        Ok(cb)
    }

    /// Process-wide memoized basis for `kind`.
    pub fn shared(kind: RootSystemKind) -> Result<Arc<ChevalleyBasis>> {
        if let Some(cb) = shared_cache().lock().expect("cache lock").get(&kind) {
            return Ok(cb.clone());
        }
        let cb = Arc::new(ChevalleyBasis::new(RootSystem::new(kind))?);
        shared_cache().lock().expect("cache lock").entry(kind).or_insert_with(|| cb.clone());
        Ok(cb)
    }

    fn build(rs: RootSystem) -> Result<Self> {
        let m = rs.len();
        let n = rs.rank();
        let mut signed: Vec<Vec<i64>> = rs.positives().iter().map(|r| r.coeffs().iter().map(|&c| c as i64).collect()).collect();
        for i in 0..m {
            let neg = signed[i].iter().map(|c| -c).collect();
            signed.push(neg);
        }
        let lookup: HashMap<&[i64], usize> = signed.iter().enumerate().map(|(i, c)| (c.as_slice(), i)).collect();
        let mut signed_sum = vec![None; 4 * m * m];
        for x in 0..2 * m {
            for y in 0..2 * m {
                let s: Vec<i64> = signed[x].iter().zip(&signed[y]).map(|(a, b)| a + b).collect();
                signed_sum[x * 2 * m + y] = lookup.get(s.as_slice()).copied();
            }
        }
        let norms: Vec<i64> = (0..m).map(|i| rs.root_norm(i)).collect();

        let mut cb = ChevalleyBasis {
            rs,
            m,
            signed,
            n: vec![0; 4 * m * m],
            signed_sum,
            table: Vec::new(),
            killing_root: Vec::new(),
            killing_cartan: Vec::new(),
            norm_sq: Vec::new(),
        };

        // positive pairs, by height of the sum
        let mut npos: Vec<Option<i64>> = vec![None; m * m];
        for xi in n..m {
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            for a in 0..xi {
                for b in a + 1..xi {
                    if cb.rs.sum_index(a, b) == Some(xi) {
                        pairs.push((a, b));
                    }
                }
            }
            let (a1, b1) = pairs[0];
            debug_assert!(a1 < n, "extraspecial pair starts at a simple root");
            let n1 = cb.p_of(b1, a1) + 1;
            npos[a1 * m + b1] = Some(n1);
            npos[b1 * m + a1] = Some(-n1);
            let xi_norm = norms[xi];
            for &(a, b) in &pairs[1..] {
                let get = |x, y| cb.n_from_positive(&npos, &norms, x, y);
                let ma1 = m + a1;
                let mb1 = m + b1;
                let mut acc = Q::zero();
                // N_{β,-α1} N_{α,-β1} / (β-α1, β-α1)
                if let Some(s) = cb.sum(b, ma1) {
                    let t = get(b, ma1) * get(a, mb1);
                    if t != 0 {
                        acc += Q::new(t.into(), norms[s % m].into());
                    }
                }
                // N_{-α1,α} N_{β,-β1} / (α-α1, α-α1)
                if let Some(s) = cb.sum(a, ma1) {
                    let t = get(ma1, a) * get(b, mb1);
                    if t != 0 {
                        acc += Q::new(t.into(), norms[s % m].into());
                    }
                }
                let val = acc * Q::from_integer(xi_norm.into()) / Q::from_integer(n1.into());
                if !val.is_integer() {
                    return Err(Error::Internal(format!("non-integral structure constant at {:?}", cb.rs.root(xi))));
                }
                let v: i64 = val.to_integer().try_into().map_err(|_| Error::Internal("structure constant overflow".into()))?;
                npos[a * m + b] = Some(v);
                npos[b * m + a] = Some(-v);
            }
        }
        for x in 0..2 * m {
            for y in 0..2 * m {
                cb.n[x * 2 * m + y] = cb.n_from_positive(&npos, &norms, x, y);
            }
        }
        cb.build_table();
        Ok(cb)
    }

    /// Largest `p` with `β - pα` a root (positive indices).
    fn p_of(&self, beta: usize, alpha: usize) -> i64 {
        let mut p = 0;
        let mut cur = self.signed[beta].clone();
        loop {
            for (c, a) in cur.iter_mut().zip(&self.signed[alpha]) {
                *c -= a;
            }
            if self.signed.iter().take(2 * self.m).any(|s| s == &cur) {
                p += 1;
            } else {
                return p;
            }
        }
    }

    fn sum(&self, x: usize, y: usize) -> Option<usize> {
        self.signed_sum[x * 2 * self.m + y]
    }

    fn neg_idx(&self, x: usize) -> usize {
        if x < self.m {
            x + self.m
        } else {
            x - self.m
        }
    }

    /// `N_{x,y}` for signed roots from the positive-pair table.
    fn n_from_positive(&self, npos: &[Option<i64>], norms: &[i64], x: usize, y: usize) -> i64 {
        let m = self.m;
        let Some(z) = self.sum(x, y) else { return 0 };
        let px = x < m;
        let py = y < m;
        let nr = |r: usize| norms[r % m];
        match (px, py) {
            (true, true) => npos[x * m + y].expect("positive constant computed before use"),
            (false, false) => -self.n_from_positive(npos, norms, x - m, y - m),
            (false, true) => -self.n_from_positive(npos, norms, y, x),
            (true, false) => {
                if z < m {
                    // -(z,z)/(x,x) N_{-y,z}
                    let v = self.n_from_positive(npos, norms, y - m, z) * nr(z);
                    debug_assert_eq!(v % nr(x), 0);
                    -v / nr(x)
                } else {
                    // (z,z)/(y,y) N_{-z,x}
                    let v = self.n_from_positive(npos, norms, z - m, x) * nr(z);
                    debug_assert_eq!(v % nr(y), 0);
                    v / nr(y)
                }
            }
        }
    }

    fn build_table(&mut self) {
        let m = self.m;
        let r = self.rs.rank();
        let dim = 2 * m + r;
        let mut table = vec![Vec::new(); dim * dim];
        for x in 0..2 * m {
            for y in 0..2 * m {
                let entry = &mut table[x * dim + y];
                if y == self.neg_idx(x) {
                    let (root, s) = if x < m { (x, 1) } else { (x - m, -1) };
                    for (i, c) in self.coroot(root).into_iter().enumerate() {
                        if c != 0 {
                            entry.push((2 * m + i, s * c));
                        }
                    }
                } else if let Some(z) = self.sum(x, y) {
                    entry.push((z, self.n[x * 2 * m + y]));
                }
            }
        }
        for i in 0..r {
            let h = 2 * m + i;
            for x in 0..2 * m {
                let (root, s) = if x < m { (x, 1) } else { (x - m, -1) };
                let v = s * self.rs.pairing(root, i);
                if v != 0 {
                    table[h * dim + x].push((x, v));
                    table[x * dim + h].push((x, -v));
                }
            }
        }
        self.table = table;
    }

    /// Coroot `h_λ` in the basis `h_i`: coefficients `c_i (λ_i,λ_i)/(λ,λ)`.
    fn coroot(&self, root: usize) -> Vec<i64> {
        let nr = self.rs.root_norm(root);
        self.rs
            .root(root)
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let v = c as i64 * self.rs.gram()[i][i];
                debug_assert_eq!(v % nr, 0);
                v / nr
            })
            .collect()
    }

    fn weight_key(&self, idx: usize) -> i64 {
        if idx >= 2 * self.m {
            return 0;
        }
        self.signed[idx].iter().rev().fold(0i64, |acc, &c| acc * 64 + c)
    }

    fn bracket_basis_into(&self, a: usize, b: usize, coef: i64, out: &mut HashMap<usize, i64>) {
        for &(k, v) in &self.table[a * self.dim() + b] {
            *out.entry(k).or_insert(0) += coef * v;
        }
    }

    /// Number of basis triples on which the Jacobi identity fails.
    fn jacobi_failures(&self) -> usize {
        let dim = self.dim();
        let mut live: HashSet<i64> = (0..2 * self.m).map(|i| self.weight_key(i)).collect();
        live.insert(0);
        let keys: Vec<i64> = (0..dim).map(|i| self.weight_key(i)).collect();
        let mut failures = 0;
        let mut acc: HashMap<usize, i64> = HashMap::new();
        for i in 0..dim {
            for j in i + 1..dim {
                for k in j + 1..dim {
                    if !live.contains(&(keys[i] + keys[j] + keys[k])) {
                        continue;
                    }
                    acc.clear();
                    for (x, y, z) in [(i, j, k), (j, k, i), (k, i, j)] {
                        for &(w, c) in &self.table[x * dim + y] {
                            self.bracket_basis_into(w, z, c, &mut acc);
                        }
                    }
                    if acc.values().any(|&v| v != 0) {
                        failures += 1;
                    }
                }
            }
        }
        failures
    }

    /// `tr(ad a ∘ ad b)` for basis elements.
    fn killing_basis(&self, a: usize, b: usize) -> i64 {
        let dim = self.dim();
        let mut t = 0;
        for x in 0..dim {
            for &(y, c1) in &self.table[b * dim + x] {
                for &(z, c2) in &self.table[a * dim + y] {
                    if z == x {
                        t += c1 * c2;
                    }
                }
            }
        }
        t
    }

    fn compute_killing(&mut self) {
        let m = self.m;
        let r = self.rs.rank();
        self.killing_root = (0..m).map(|i| self.killing_basis(i, m + i)).collect();
        self.killing_cartan = (0..r).map(|i| (0..r).map(|j| self.killing_basis(2 * m + i, 2 * m + j)).collect()).collect();
        let mut norm_sq: Vec<Q> = Vec::with_capacity(self.dim());
        for _ in 0..2 {
            norm_sq.extend(self.killing_root.iter().map(|&v| q(v)));
        }
        norm_sq.extend((0..r).map(|i| q(self.killing_cartan[i][i])));
        self.norm_sq = norm_sq;
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn kind(&self) -> RootSystemKind {
        self.rs.kind()
    }

    pub fn dim(&self) -> usize {
        2 * self.m + self.rs.rank()
    }

    /// Number of positive roots.
    pub fn num_positive(&self) -> usize {
        self.m
    }

    pub fn index(&self, b: BasisElement) -> usize {
        match b {
            BasisElement::RootVector { root, sign: Sign::Plus } => root,
            BasisElement::RootVector { root, sign: Sign::Minus } => self.m + root,
            BasisElement::CartanGenerator { index } => 2 * self.m + index,
        }
    }

    pub fn element(&self, idx: usize) -> BasisElement {
        if idx < self.m {
            BasisElement::RootVector { root: idx, sign: Sign::Plus }
        } else if idx < 2 * self.m {
            BasisElement::RootVector { root: idx - self.m, sign: Sign::Minus }
        } else {
            BasisElement::CartanGenerator { index: idx - 2 * self.m }
        }
    }

    /// `e_λ` for a positive root.
    pub fn e(&self, root: &Root) -> LieElement {
        LieElement::basis(self.rs.index_of(root).expect("positive root"))
    }

    /// `e_{-λ}` for a positive root.
    pub fn f(&self, root: &Root) -> LieElement {
        LieElement::basis(self.m + self.rs.index_of(root).expect("positive root"))
    }

    pub fn h(&self, i: usize) -> LieElement {
        LieElement::basis(2 * self.m + i)
    }

    /// Structure constant `N_{λ,μ}` for positive root indices.
    pub fn n_pos(&self, a: usize, b: usize) -> i64 {
        self.n[a * 2 * self.m + b]
    }

    /// Structure constant for signed root indices (`0..2m`).
    pub fn n_signed(&self, x: usize, y: usize) -> i64 {
        self.n[x * 2 * self.m + y]
    }

    pub fn bracket_basis(&self, a: usize, b: usize) -> &[(usize, i64)] {
        &self.table[a * self.dim() + b]
    }

    pub fn bracket(&self, x: &LieElement, y: &LieElement) -> LieElement {
        let mut out = LieElement::zero();
        for (a, ca) in x.terms() {
            for (b, cb) in y.terms() {
                let entries = self.bracket_basis(a, b);
                if entries.is_empty() {
                    continue;
                }
                let c = ca * cb;
                for &(k, v) in entries {
                    out.add_term(k, &c * q(v));
                }
            }
        }
        out
    }

    /// `e^{ad Z} Y = Σ_r (ad Z)^r Y / r!` for `Z` supported on positive root
    /// vectors; the series stops once a term vanishes.
    pub fn ad_exp(&self, z: &LieElement, y: &LieElement) -> LieElement {
        debug_assert!(z.is_nilpotent_positive(self.m));
        let mut out = y.clone();
        if z.is_zero() {
            return out;
        }
        let mut term = y.clone();
        let mut r = 1i64;
        loop {
            term = self.bracket(z, &term).scale(&Q::new(1.into(), r.into()));
            if term.is_zero() {
                return out;
            }
            out.add_scaled(&term, &q(1));
            r += 1;
        }
    }

    /// Cartan involution: `e_λ ↦ -e_{-λ}`, `h ↦ -h`.
    pub fn theta(&self, x: &LieElement) -> LieElement {
        LieElement::from_terms(x.terms().map(|(i, c)| {
            let j = if i < 2 * self.m { self.neg_idx(i) } else { i };
            (j, -c.clone())
        }))
    }

    /// Killing form `B(X, Y)`.
    pub fn killing(&self, x: &LieElement, y: &LieElement) -> Q {
        let mut s = Q::zero();
        let r = self.rs.rank();
        for (a, ca) in x.terms() {
            if a < 2 * self.m {
                let b = self.neg_idx(a);
                let yb = y.coeff(b);
                if !yb.is_zero() {
                    s += ca * yb * q(self.killing_root[a % self.m]);
                }
            } else {
                let i = a - 2 * self.m;
                for j in 0..r {
                    let yb = y.coeff(2 * self.m + j);
                    if !yb.is_zero() {
                        s += ca * yb * q(self.killing_cartan[i][j]);
                    }
                }
            }
        }
        s
    }

    /// `⟨X, Y⟩ = -B(θX, Y)`.
    pub fn inner_product(&self, x: &LieElement, y: &LieElement) -> Q {
        -self.killing(&self.theta(x), y)
    }

    pub fn norm_sq(&self, x: &LieElement) -> Q {
        self.inner_product(x, x)
    }

    /// `‖e_λ‖²` for a positive root index.
    pub fn root_norm_sq(&self, root: usize) -> &Q {
        &self.norm_sq[root]
    }

    /// `B(e_λ, e_{-λ})` per positive root and the Gram matrix of the `h_i`.
    pub fn killing_values(&self) -> (&[i64], &[Vec<i64>]) {
        (&self.killing_root, &self.killing_cartan)
    }

    /// `λ_i(H)` for `H = Σ a_j h_j`.
    pub fn simple_values(&self, h: &[Q]) -> Vec<Q> {
        let r = self.rs.rank();
        (0..r).map(|i| (0..r).map(|j| &h[j] * q(self.rs.gram()[i][j] * 2 / self.rs.gram()[j][j])).sum()).collect()
    }

    /// `c_{λ,μ}²` over λ ∈ Π, μ ∈ Λ⁺ with λ+μ a root; `None` when there is no such pair.
    pub fn c_constants(&self) -> Option<CConstants> {
        let mut lo: Option<Q> = None;
        let mut hi: Option<Q> = None;
        for l in 0..self.rs.rank() {
            for mu in 0..self.m {
                let Some(s) = self.rs.sum_index(l, mu) else { continue };
                let nn = self.n_pos(l, mu);
                let c = q(nn * nn) * &self.norm_sq[s] / (&self.norm_sq[l] * &self.norm_sq[mu]);
                if lo.as_ref().is_none_or(|v| &c < v) {
                    lo = Some(c.clone());
                }
                if hi.as_ref().is_none_or(|v| &c > v) {
                    hi = Some(c);
                }
            }
        }
        Some(CConstants { c0_sq: lo?, c1_sq: hi? })
    }

    /// Certified `S_Λ` with `Σ_Π λ(H)² ≤ B(H,H) ≤ S_Λ Σ_Π λ(H)²`.
    pub fn s_lambda(&self) -> SLambda {
        let total: u64 = self.rs.positives().iter().map(|r| r.coeffs().iter().map(|&c| (c as u64) * (c as u64)).sum::<u64>()).sum();
        SLambda { value: q(2 * total as i64), method: S_LAMBDA_METHOD }
    }

    pub fn constants_report(&self) -> ConstantsReport {
        let c = self.c_constants();
        let s = self.s_lambda();
        ConstantsReport {
            version: 1,
            kind: self.kind(),
            c0_sq: c.as_ref().map(|c| fmt_q(&c.c0_sq)),
            c1_sq: c.as_ref().map(|c| fmt_q(&c.c1_sq)),
            degenerate: c.is_none().then_some("no non-simple roots"),
            s_lambda: fmt_q(&s.value),
            s_lambda_method: s.method,
            norm_sq: self.rs.positives().iter().enumerate().map(|(i, r)| (r.label(), fmt_q(&self.norm_sq[i]))).collect(),
        }
    }
}

pub const S_LAMBDA_METHOD: &str =
    "Cauchy-Schwarz on root expansions: B(H,H) = 2 Σ_{λ>0} (Σ_i c_i(λ) x_i)² ≤ (2 Σ_{λ>0} Σ_i c_i(λ)²) Σ_i x_i², x_i = λ_i(H)";

#[derive(Clone, Debug, PartialEq)]
pub struct CConstants {
    pub c0_sq: Q,
    pub c1_sq: Q,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SLambda {
    pub value: Q,
    pub method: &'static str,
}

#[derive(Serialize, Debug)]
pub struct ConstantsReport {
    pub version: u32,
    pub kind: RootSystemKind,
    pub c0_sq: Option<String>,
    pub c1_sq: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degenerate: Option<&'static str>,
    pub s_lambda: String,
    pub s_lambda_method: &'static str,
    pub norm_sq: BTreeMap<String, String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;
    use proptest::prelude::*;

    fn cb(s: &str) -> Arc<ChevalleyBasis> {
        ChevalleyBasis::shared(s.parse().unwrap()).unwrap()
    }

    fn r(c: &[u32]) -> Root {
        Root::new(c.to_vec())
    }

    #[test]
    fn a1_killing_and_norm() {
        let a1 = cb("A1");
        let e = a1.e(&r(&[1]));
        let f = a1.f(&r(&[1]));
        assert_eq!(a1.killing(&e, &f), q(4));
        assert_eq!(a1.norm_sq(&e), q(4));
        assert_eq!(a1.c_constants(), None);
        assert_eq!(a1.s_lambda().value, q(2));
    }

    #[test]
    fn a2_norms_and_constants() {
        let a2 = cb("A2");
        for i in 0..3 {
            assert_eq!(a2.root_norm_sq(i), &q(6));
        }
        let c = a2.c_constants().unwrap();
        assert_eq!(c.c0_sq, qf(1, 6));
        assert_eq!(c.c1_sq, qf(1, 6));
        let sum = a2.e(&r(&[1, 0])).sum(&a2.e(&r(&[0, 1]))).sum(&a2.e(&r(&[1, 1])));
        assert_eq!(a2.norm_sq(&sum), q(18));
        assert_eq!(a2.inner_product(&a2.e(&r(&[1, 0])), &a2.e(&r(&[0, 1]))), q(0));
    }

    #[test]
    fn a2_brackets() {
        let a2 = cb("A2");
        let br = a2.bracket(&a2.e(&r(&[1, 0])), &a2.e(&r(&[0, 1])));
        assert_eq!(br, a2.e(&r(&[1, 1])));
        let x = a2.e(&r(&[1, 0])).sum(&a2.h(1));
        assert!(a2.bracket(&x, &x).is_zero());
        // [h_1, e_{λ2}] = <λ2, λ1^∨> e_{λ2} = -e_{λ2}
        assert_eq!(a2.bracket(&a2.h(0), &a2.e(&r(&[0, 1]))), a2.e(&r(&[0, 1])).neg());
        assert_eq!(a2.bracket(&a2.h(0), &a2.e(&r(&[1, 0]))), a2.e(&r(&[1, 0])).scale(&q(2)));
    }

    #[test]
    fn a2_ad_exp_example() {
        let a2 = cb("A2");
        let y = a2.e(&r(&[1, 0])).sum(&a2.e(&r(&[0, 1]))).sum(&a2.e(&r(&[1, 1])));
        let z = a2.e(&r(&[1, 0])).neg();
        let got = a2.ad_exp(&z, &y);
        assert_eq!(got, a2.e(&r(&[1, 0])).sum(&a2.e(&r(&[0, 1]))));
        assert_eq!(a2.ad_exp(&LieElement::zero(), &y), y);
    }

    #[test]
    fn structure_constant_magnitudes() {
        for name in ["B3", "C3", "D4", "G2", "F4", "E6"] {
            let c = cb(name);
            let rs = c.root_system();
            let m = rs.len();
            for x in 0..2 * m {
                for y in 0..2 * m {
                    let nn = c.n_signed(x, y);
                    match c.sum(x, y) {
                        None => assert_eq!(nn, 0),
                        Some(_) => {
                            // p: largest with y - p x a root
                            let mut p = 0;
                            let mut cur = c.signed[y].clone();
                            loop {
                                for (a, b) in cur.iter_mut().zip(&c.signed[x]) {
                                    *a -= b;
                                }
                                if c.signed.contains(&cur) {
                                    p += 1;
                                } else {
                                    break;
                                }
                            }
                            assert_eq!(nn.abs(), p + 1, "{name} {x} {y}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn jacobi_all_types() {
        for name in ["A1", "A4", "B2", "B4", "C3", "C4", "D4", "D5", "E6", "E7", "E8", "F4", "G2"] {
            let c = cb(name);
            assert_eq!(c.jacobi_failures(), 0, "{name}");
        }
    }

    #[test]
    fn killing_closed_forms() {
        // B(e_λ, e_{-λ}) = 2 h^∨ (λ^∨, λ^∨)-normalized: for simply laced types 2 h^∨
        for (name, hv) in [("A3", 4), ("D5", 8), ("E6", 12), ("E8", 30)] {
            let c = cb(name);
            assert!(c.killing_values().0.iter().all(|&v| v == 2 * hv), "{name}");
        }
    }

    #[test]
    fn killing_matches_root_sum() {
        for name in ["A3", "B3", "G2", "F4"] {
            let c = cb(name);
            let rank = c.root_system().rank();
            let h: Vec<Q> = (0..rank).map(|i| qf(i as i64 * 3 - 2, (i as i64) + 1)).collect();
            let helt = LieElement::from_terms(h.iter().enumerate().map(|(i, v)| (c.dim() - rank + i, v.clone())));
            let x = c.simple_values(&h);
            let mut rootsum = Q::zero();
            for root in c.root_system().positives() {
                let v: Q = root.coeffs().iter().zip(&x).map(|(&k, xi)| xi * q(k as i64)).sum();
                rootsum += &v * &v * q(2);
            }
            assert_eq!(c.killing(&helt, &helt), rootsum, "{name}");
        }
    }

    #[test]
    fn constants_report_shape() {
        let rep = cb("A2").constants_report();
        let v = serde_json::to_value(&rep).unwrap();
        assert_eq!(v["c0_sq"], "1/6");
        assert_eq!(v["norm_sq"]["[1,1]"], "6/1");
        assert!(v["s_lambda_method"].as_str().unwrap().contains("Cauchy-Schwarz"));
    }

    fn small_q() -> impl Strategy<Value = Q> {
        (-20i64..=20, 1i64..=6).prop_map(|(n, d)| qf(n, d))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn theta_involution_and_positive_definite(coeffs in proptest::collection::vec(small_q(), 15)) {
            let c = cb("B2");
            let x = LieElement::from_terms(coeffs.into_iter().take(c.dim()).enumerate());
            prop_assert_eq!(c.theta(&c.theta(&x)), x.clone());
            let n = c.norm_sq(&x);
            let ok = if x.is_zero() { n.is_zero() } else { n > Q::zero() };
            prop_assert!(ok);
        }

        #[test]
        fn ad_exp_inverts(zc in proptest::collection::vec(small_q(), 6), yc in proptest::collection::vec(small_q(), 14)) {
            let c = cb("G2");
            let z = LieElement::from_terms(zc.into_iter().enumerate());
            let y = LieElement::from_terms(yc.into_iter().enumerate());
            prop_assert_eq!(c.ad_exp(&z, &c.ad_exp(&z.neg(), &y)), y);
        }

        #[test]
        fn s_lambda_sandwich(h in proptest::collection::vec(small_q(), 4)) {
            let c = cb("F4");
            let helt = LieElement::from_terms(h.iter().enumerate().map(|(i, v)| (c.dim() - 4 + i, v.clone())));
            let x = c.simple_values(&h);
            let simple_sq: Q = x.iter().map(|v| v * v).sum();
            let b = c.killing(&helt, &helt);
            prop_assert!(simple_sq <= b);
            prop_assert!(b <= c.s_lambda().value * simple_sq);
        }
    }
}
