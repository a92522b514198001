//! Elements of the maximal unipotent subgroup in exponential coordinates, and
//! conjugation by words of exponential and diagonal factors.
//!
//! `u = exp(Σ Y_λ e_λ)` is stored as the dense vector of `Y_λ` over the
//! positive roots in listing order. Conjugation never multiplies group
//! elements; it pushes `log u` through `e^{ad Z}`.

use crate::error::{Error, Result};
use crate::liealg::{ChevalleyBasis, LieElement};
use crate::rational::{fmt_q, parse_q, sqrt_f64, Q};
use crate::reduce::DiagonalConjugator;
use crate::rootsys::{Root, RootSystemKind};
use num_traits::Zero;
use serde_json::{json, Map, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnipotentCoords {
    kind: RootSystemKind,
    coords: Vec<Q>,
}

impl UnipotentCoords {
    pub fn identity(cb: &ChevalleyBasis) -> Self {
        UnipotentCoords { kind: cb.kind(), coords: vec![Q::zero(); cb.num_positive()] }
    }

    /// From `(root, value)` pairs; every root must be positive in `cb`'s system.
    pub fn from_entries<'a>(cb: &ChevalleyBasis, entries: impl IntoIterator<Item = (&'a Root, Q)>) -> Result<Self> {
        let mut u = Self::identity(cb);
        for (r, v) in entries {
            let i = cb
                .root_system()
                .index_of(r)
                .ok_or_else(|| Error::NotARoot { kind: cb.kind().to_string(), root: r.coeffs().to_vec() })?;
            u.coords[i] = v;
        }
        Ok(u)
    }

    pub fn from_dense(kind: RootSystemKind, coords: Vec<Q>) -> Self {
        UnipotentCoords { kind, coords }
    }

    pub fn kind(&self) -> RootSystemKind {
        self.kind
    }

    /// Entry at a positive-root index.
    pub fn get(&self, i: usize) -> &Q {
        &self.coords[i]
    }

    pub fn set(&mut self, i: usize, v: Q) {
        self.coords[i] = v;
    }

    pub fn coords(&self) -> &[Q] {
        &self.coords
    }

    pub fn entry(&self, cb: &ChevalleyBasis, r: &Root) -> Option<&Q> {
        cb.root_system().index_of(r).map(|i| &self.coords[i])
    }

    pub fn simple_entries(&self, rank: usize) -> &[Q] {
        &self.coords[..rank]
    }

    pub fn has_nonzero_simples(&self, rank: usize) -> bool {
        self.coords[..rank].iter().all(|c| !c.is_zero())
    }

    pub fn is_simple_supported(&self, rank: usize) -> bool {
        self.coords[rank..].iter().all(Zero::is_zero)
    }

    pub fn log(&self) -> LieElement {
        LieElement::from_terms(self.coords.iter().cloned().enumerate())
    }

    pub fn from_log(kind: RootSystemKind, m: usize, x: &LieElement) -> Self {
        debug_assert!(x.is_nilpotent_positive(m));
        let mut coords = vec![Q::zero(); m];
        for (i, c) in x.terms() {
            coords[i] = c.clone();
        }
        UnipotentCoords { kind, coords }
    }

    pub fn to_json(&self, cb: &ChevalleyBasis) -> Value {
        let mut map = Map::new();
        for (i, c) in self.coords.iter().enumerate() {
            if !c.is_zero() {
                map.insert(cb.root_system().root(i).label(), Value::String(fmt_q(c)));
            }
        }
        json!({ "kind": self.kind, "coords": map })
    }

    /// Reads `{"kind": ..., "coords": {"[c1,...]": "p/q"}}`. `kind` may be an
    /// object `{"family","rank"}` or a string such as `"A3"`.
    pub fn kind_from_json(v: &Value) -> Result<RootSystemKind> {
        let k = v.get("kind").ok_or_else(|| Error::Config("missing \"kind\"".into()))?;
        match k {
            Value::String(s) => s.parse(),
            other => serde_json::from_value(other.clone()).map_err(|e| Error::Config(format!("bad kind: {e}"))),
        }
    }

    pub fn from_json(cb: &ChevalleyBasis, v: &Value) -> Result<Self> {
        let kind = Self::kind_from_json(v)?;
        if kind != cb.kind() {
            return Err(Error::KindMismatch(kind.to_string(), cb.kind().to_string()));
        }
        let coords = v.get("coords").and_then(Value::as_object).ok_or_else(|| Error::Config("missing \"coords\" object".into()))?;
        let mut u = Self::identity(cb);
        for (label, val) in coords {
            let root = Root::parse_label(label).ok_or_else(|| Error::Config(format!("bad root label {label:?}")))?;
            let idx = cb
                .root_system()
                .index_of(&root)
                .ok_or_else(|| Error::NotARoot { kind: kind.to_string(), root: root.coeffs().to_vec() })?;
            let x = match val {
                Value::String(s) => parse_q(s),
                Value::Number(n) => parse_q(&n.to_string()),
                _ => None,
            }
            .ok_or_else(|| Error::Config(format!("bad rational for {label}: {val}")))?;
            u.coords[idx] = x;
        }
        Ok(u)
    }
}

/// One factor of a conjugator word.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    /// `exp(x)` with `x` in the positive nilpotent part; `length_sq = ‖x‖²`.
    Nil { x: LieElement, length_sq: Q },
    /// `exp(H₀)` stored through its exact ratios.
    Cartan(DiagonalConjugator),
}

impl Factor {
    pub fn nil(cb: &ChevalleyBasis, x: LieElement) -> Factor {
        let length_sq = cb.norm_sq(&x);
        Factor::Nil { x, length_sq }
    }

    pub fn length(&self) -> f64 {
        match self {
            Factor::Nil { length_sq, .. } => sqrt_f64(length_sq),
            Factor::Cartan(d) => d.norm_sq_float.sqrt(),
        }
    }

    pub fn inverse(&self) -> Factor {
        match self {
            Factor::Nil { x, length_sq } => Factor::Nil { x: x.neg(), length_sq: length_sq.clone() },
            Factor::Cartan(d) => Factor::Cartan(d.inverse()),
        }
    }

    fn to_json(&self, cb: &ChevalleyBasis) -> Value {
        match self {
            Factor::Nil { x, length_sq } => {
                let mut map = Map::new();
                for (i, c) in x.terms() {
                    map.insert(cb.root_system().root(i).label(), Value::String(fmt_q(c)));
                }
                json!({ "nil": { "x": map, "length_sq": fmt_q(length_sq) } })
            }
            Factor::Cartan(d) => json!({ "cartan": d.to_json() }),
        }
    }
}

/// Product `f_1 f_2 … f_k` of factors. As a conjugation, `f_k` acts first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConjugatorWord {
    pub factors: Vec<Factor>,
}

impl ConjugatorWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_factors(factors: Vec<Factor>) -> Self {
        ConjugatorWord { factors }
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    /// `self · other`.
    pub fn concat(&self, other: &ConjugatorWord) -> ConjugatorWord {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        ConjugatorWord { factors }
    }

    /// Left-multiplies by `f`, so `f` acts after the current word.
    pub fn push_outer(&mut self, f: Factor) {
        self.factors.insert(0, f);
    }

    /// Cancels adjacent factor pairs `exp(-x) exp(x)` and `exp(-H) exp(H)`.
    pub fn freely_reduced(&self) -> ConjugatorWord {
        let mut out: Vec<Factor> = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            if out.last().is_some_and(|prev| prev == &f.inverse()) {
                out.pop();
            } else {
                out.push(f.clone());
            }
        }
        ConjugatorWord { factors: out }
    }

    pub fn inverse(&self) -> ConjugatorWord {
        ConjugatorWord { factors: self.factors.iter().rev().map(Factor::inverse).collect() }
    }

    /// Sum of factor norms; an upper bound on the distance from the identity.
    pub fn length(&self) -> f64 {
        self.factors.iter().map(Factor::length).fold(0.0, |a, b| a + b)
    }

    pub fn to_json(&self, cb: &ChevalleyBasis) -> Value {
        Value::Array(self.factors.iter().map(|f| f.to_json(cb)).collect())
    }
}

/// Coordinates of `exp(z e_μ) u exp(-z e_μ)`.
pub fn conj_root_exp(cb: &ChevalleyBasis, u: &UnipotentCoords, mu: &Root, z: &Q) -> UnipotentCoords {
    if z.is_zero() {
        return u.clone();
    }
    let zel = cb.e(mu).scale(z);
    conj_nil(cb, u, &zel)
}

/// Coordinates of `exp(X) u exp(-X)` for `X` in the positive nilpotent part.
pub fn conj_nil(cb: &ChevalleyBasis, u: &UnipotentCoords, x: &LieElement) -> UnipotentCoords {
    let y = cb.ad_exp(x, &u.log());
    UnipotentCoords::from_log(u.kind, cb.num_positive(), &y)
}

/// Conjugation by `[exp Z₁, exp Z₂] = exp Z₁ exp Z₂ exp(-Z₁) exp(-Z₂)` with
/// `Z_k = z_k e_{μ_k}`.
pub fn conj_commutator(cb: &ChevalleyBasis, u: &UnipotentCoords, mu1: &Root, z1: &Q, mu2: &Root, z2: &Q) -> UnipotentCoords {
    if z1.is_zero() || z2.is_zero() {
        return u.clone();
    }
    let a = cb.e(mu1).scale(z1);
    let b = cb.e(mu2).scale(z2);
    let mut y = u.log();
    for x in [b.neg(), a.neg(), b, a] {
        y = cb.ad_exp(&x, &y);
    }
    UnipotentCoords::from_log(u.kind, cb.num_positive(), &y)
}

/// Conjugation by a diagonal factor: each entry scales by `Π C_i^{c_i}`.
pub fn conj_diagonal(cb: &ChevalleyBasis, u: &UnipotentCoords, d: &DiagonalConjugator) -> UnipotentCoords {
    let coords = u
        .coords
        .iter()
        .enumerate()
        .map(|(i, c)| if c.is_zero() { Q::zero() } else { c * d.action(cb.root_system().root(i)) })
        .collect();
    UnipotentCoords { kind: u.kind, coords }
}

/// `g u g⁻¹` for `g` the product of the word's factors.
pub fn conj_word(cb: &ChevalleyBasis, u: &UnipotentCoords, w: &ConjugatorWord) -> UnipotentCoords {
    let mut cur = u.clone();
    for f in w.factors.iter().rev() {
        cur = match f {
            Factor::Nil { x, .. } => conj_nil(cb, &cur, x),
            Factor::Cartan(d) => conj_diagonal(cb, &cur, d),
        };
    }
    cur
}

/// `Δ(u)²`: the minimum over simple roots of `Y_λ² ‖e_λ‖²`.
pub fn delta_sq(cb: &ChevalleyBasis, u: &UnipotentCoords) -> Q {
    (0..cb.root_system().rank())
        .map(|i| u.get(i) * u.get(i) * cb.root_norm_sq(i))
        .min()
        .unwrap_or_else(Q::zero)
}

pub fn delta(cb: &ChevalleyBasis, u: &UnipotentCoords) -> f64 {
    sqrt_f64(&delta_sq(cb, u))
}

/// `‖log u‖²` = Σ Y_λ² ‖e_λ‖² (root spaces are orthogonal).
pub fn length_sq(cb: &ChevalleyBasis, u: &UnipotentCoords) -> Q {
    u.coords.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| c * c * cb.root_norm_sq(i)).sum()
}

pub fn length(cb: &ChevalleyBasis, u: &UnipotentCoords) -> f64 {
    sqrt_f64(&length_sq(cb, u))
}

/// `Y_λ² ‖e_λ‖²` for one entry.
pub fn entry_norm_sq(cb: &ChevalleyBasis, u: &UnipotentCoords, i: usize) -> Q {
    u.get(i) * u.get(i) * cb.root_norm_sq(i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};
    use proptest::prelude::*;
    use std::sync::Arc;

    fn cb(s: &str) -> Arc<ChevalleyBasis> {
        ChevalleyBasis::shared(s.parse().unwrap()).unwrap()
    }

    fn r(c: &[u32]) -> Root {
        Root::new(c.to_vec())
    }

    fn a2_u(c: &ChevalleyBasis) -> UnipotentCoords {
        UnipotentCoords::from_entries(c, [(&r(&[1, 0]), q(1)), (&r(&[0, 1]), q(1)), (&r(&[1, 1]), q(1))]).unwrap()
    }

    #[test]
    fn a2_elimination_by_root_exp() {
        let c = cb("A2");
        let u = a2_u(&c);
        let n = c.n_pos(0, 1);
        let z = qf(-1, n);
        let got = conj_root_exp(&c, &u, &r(&[1, 0]), &z);
        let want = UnipotentCoords::from_entries(&c, [(&r(&[1, 0]), q(1)), (&r(&[0, 1]), q(1))]).unwrap();
        assert_eq!(got, want);
        assert_eq!(conj_root_exp(&c, &u, &r(&[1, 0]), &q(0)), u);
    }

    #[test]
    fn a3_entry_identity() {
        // y1 = [1,1,0], z1 = [1,1,1]; conjugating along λ1 moves y1 by αx2 and z1 by αy2
        let c = cb("A3");
        let vals = [
            (r(&[1, 0, 0]), qf(2, 1)),
            (r(&[0, 1, 0]), qf(3, 1)),
            (r(&[0, 0, 1]), qf(5, 1)),
            (r(&[1, 1, 0]), qf(7, 2)),
            (r(&[0, 1, 1]), qf(-1, 3)),
            (r(&[1, 1, 1]), qf(4, 5)),
        ];
        let u = UnipotentCoords::from_entries(&c, vals.iter().map(|(a, b)| (a, b.clone()))).unwrap();
        let alpha = qf(-7, 6);
        let got = conj_root_exp(&c, &u, &r(&[1, 0, 0]), &alpha);
        let n12 = q(c.n_pos(0, 1));
        let n1_23 = q(c.n_pos(0, c.root_system().index_of(&r(&[0, 1, 1])).unwrap()));
        assert_eq!(got.entry(&c, &r(&[1, 1, 0])).unwrap(), &(qf(7, 2) + &alpha * &n12 * q(3)));
        assert_eq!(got.entry(&c, &r(&[1, 1, 1])).unwrap(), &(qf(4, 5) + &alpha * &n1_23 * qf(-1, 3)));
        for k in [r(&[1, 0, 0]), r(&[0, 1, 0]), r(&[0, 0, 1]), r(&[0, 1, 1])] {
            assert_eq!(got.entry(&c, &k), u.entry(&c, &k));
        }
    }

    #[test]
    fn a2_norm_values() {
        let c = cb("A2");
        let u = a2_u(&c);
        assert_eq!(length_sq(&c, &u), q(18));
        assert_eq!(delta_sq(&c, &u), q(6));
        assert_eq!(length_sq(&c, &UnipotentCoords::identity(&c)), q(0));
        let mut v = u.clone();
        v.set(1, q(0));
        assert_eq!(delta_sq(&c, &v), q(0));
    }

    #[test]
    fn commutator_of_commuting_roots_is_identity() {
        let c = cb("D4");
        let u = UnipotentCoords::from_entries(
            &c,
            [(&r(&[1, 0, 0, 0]), q(1)), (&r(&[0, 1, 0, 0]), q(2)), (&r(&[0, 0, 1, 0]), q(3)), (&r(&[0, 0, 0, 1]), q(5)), (&r(&[0, 1, 1, 1]), q(7))],
        )
        .unwrap();
        // λ3 + λ4 is not a root, so [Z1, Z2] = 0 and the commutator is trivial
        let got = conj_commutator(&c, &u, &r(&[0, 0, 1, 0]), &q(2), &r(&[0, 0, 0, 1]), &qf(1, 3));
        assert_eq!(got, u);
    }

    #[test]
    fn word_inverse_round_trip() {
        let c = cb("B3");
        let u = UnipotentCoords::from_dense(c.kind(), (0..9).map(|i| qf(i as i64 + 1, 2)).collect());
        let w = ConjugatorWord::from_factors(vec![
            Factor::nil(&c, c.e(&r(&[1, 1, 0])).scale(&q(3))),
            Factor::nil(&c, c.e(&r(&[0, 0, 1])).scale(&qf(-1, 2))),
            Factor::nil(&c, c.e(&r(&[0, 1, 2])).sum(&c.e(&r(&[1, 0, 0])))),
        ]);
        let v = conj_word(&c, &u, &w);
        assert_eq!(conj_word(&c, &v, &w.inverse()), u);
        assert_eq!(conj_word(&c, &u, &ConjugatorWord::identity()), u);
        // w1 · w2 acts as w2 first
        let (w1, w2) = (ConjugatorWord::from_factors(w.factors[..1].to_vec()), ConjugatorWord::from_factors(w.factors[1..].to_vec()));
        assert_eq!(conj_word(&c, &conj_word(&c, &u, &w2), &w1), v);
    }

    #[test]
    fn json_round_trip() {
        let c = cb("A2");
        let u = a2_u(&c);
        let v = u.to_json(&c);
        assert_eq!(v["coords"]["[1,1]"], "1/1");
        assert_eq!(UnipotentCoords::from_json(&c, &v).unwrap(), u);
        let s = serde_json::json!({"kind": "A2", "coords": {"[1,0]": 2, "[0,1]": "0.5"}});
        let w = UnipotentCoords::from_json(&c, &s).unwrap();
        assert_eq!(w.get(1), &qf(1, 2));
        assert!(UnipotentCoords::from_json(&c, &serde_json::json!({"kind": "A2", "coords": {"[2,0]": 1}})).is_err());
    }

    fn small_q() -> impl Strategy<Value = Q> {
        (-9i64..=9, 1i64..=4).prop_map(|(n, d)| qf(n, d))
    }

    fn coords_for(m: usize) -> impl Strategy<Value = Vec<Q>> {
        proptest::collection::vec(small_q(), m)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn root_exp_footprint(vals in coords_for(9), mu in 0usize..9, z in small_q()) {
            let c = cb("C3");
            let rs = c.root_system();
            let u = UnipotentCoords::from_dense(c.kind(), vals);
            let v = conj_root_exp(&c, &u, rs.root(mu), &z);
            for i in 0..rs.len() {
                if v.get(i) == u.get(i) {
                    continue;
                }
                let target = rs.root(i);
                let mut reachable = false;
                let mut cur = target.checked_sub(rs.root(mu));
                while let Some(lp) = cur {
                    if rs.index_of(&lp).is_some_and(|j| !u.get(j).is_zero()) {
                        reachable = true;
                    }
                    cur = lp.checked_sub(rs.root(mu));
                }
                prop_assert!(reachable, "entry {:?} changed", target);
            }
            for i in 0..rs.rank() {
                prop_assert_eq!(v.get(i), u.get(i));
            }
            prop_assert_eq!(delta_sq(&c, &v), delta_sq(&c, &u));
        }

        #[test]
        fn commutator_low_heights_fixed(vals in coords_for(6), m1 in 0usize..6, m2 in 0usize..6, z1 in small_q(), z2 in small_q()) {
            let c = cb("G2");
            let rs = c.root_system();
            let u = UnipotentCoords::from_dense(c.kind(), vals);
            let v = conj_commutator(&c, &u, rs.root(m1), &z1, rs.root(m2), &z2);
            let cap = rs.height(m1) + rs.height(m2);
            for i in 0..rs.len() {
                if rs.height(i) <= cap {
                    prop_assert_eq!(v.get(i), u.get(i));
                }
            }
        }

        #[test]
        fn entries_bounded_by_length(vals in coords_for(12)) {
            let c = cb("D4");
            let u = UnipotentCoords::from_dense(c.kind(), vals);
            let total = length_sq(&c, &u);
            for i in 0..12 {
                prop_assert!(entry_norm_sq(&c, &u, i) <= total);
            }
        }
    }
}
