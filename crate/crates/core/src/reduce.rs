//! Reduction of a unipotent element to its simple part, the diagonal
//! conjugator between simple parts, and the assembled conjugator with its
//! per-instance linear bound.
//!
//! A step eliminates the order-least non-simple root `λ₀` with a nonzero
//! entry. A single witness `(μ, λ_i)` uses `exp(z e_μ)` with
//! `z N_{μ,λ_i} Y_{λ_i} = -Y_{λ₀}`. For a pair witness the commutator of two
//! root exponentials is trivial (`μ₁ + μ₂` is not a root), so the step instead
//! uses the minimum-norm `Z` in the height `hgt λ₀ - 1` layer with
//! `[Z, Y_Π]` equal to `-Y_{λ₀}` at `λ₀` and zero at every earlier root of the
//! same height. Such `Z` exists because `ad Y_Π` maps each layer onto the next
//! when every simple entry is nonzero.

use crate::error::{Error, Result};
use crate::liealg::{ChevalleyBasis, LieElement};
use crate::rational::{fmt_q, ln_abs, pow_q, q, solve, sqrt_f64, to_f64, Q};
use crate::rootsys::{ReductionOrder, Root, RootSystem, Witness};
use crate::unipotent::{conj_nil, conj_word, delta_sq, entry_norm_sq, length, ConjugatorWord, Factor, UnipotentCoords};
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

/// Record of one elimination step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub target: Root,
    pub witness: Witness,
    /// The applied factor `exp(Z)`.
    pub factor: LieElement,
    pub factor_len_sq: Q,
    /// `‖Y_{λ₀}‖²`
    pub entry_norm_sq: Q,
    /// `‖Y_{λ₀}‖² / (c₀² δ²)`
    pub bound_sq: Q,
}

impl StepRecord {
    pub fn bound_holds(&self) -> bool {
        self.factor_len_sq <= self.bound_sq
    }

    pub fn to_json(&self, cb: &ChevalleyBasis) -> Value {
        let z: serde_json::Map<String, Value> =
            self.factor.terms().map(|(i, c)| (cb.root_system().root(i).label(), Value::String(fmt_q(c)))).collect();
        json!({
            "root": self.target,
            "witness": self.witness,
            "scalars": z,
            "factor_len_sq": fmt_q(&self.factor_len_sq),
            "bound_sq": fmt_q(&self.bound_sq),
            "bound_holds": self.bound_holds(),
        })
    }
}

/// `exp(H₀)` acting on `e_λ` by `Π C_i^{c_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalConjugator {
    /// `C_i = e^{λ_i(H₀)} > 0`
    pub ratios: Vec<Q>,
    /// `λ_i(H₀) = ln C_i`
    pub h_coords: Vec<f64>,
    /// `B(H₀, H₀) = Σ_{λ∈Λ} λ(H₀)²`
    pub norm_sq_float: f64,
}

impl DiagonalConjugator {
    pub fn from_ratios(rs: &RootSystem, ratios: Vec<Q>) -> Self {
        let h_coords: Vec<f64> = ratios.iter().map(ln_abs).collect();
        let norm_sq_float = 2.0
            * rs.positives()
                .iter()
                .map(|r| {
                    let v: f64 = r.coeffs().iter().zip(&h_coords).map(|(&c, h)| c as f64 * h).sum();
                    v * v
                })
                .sum::<f64>();
        DiagonalConjugator { ratios, h_coords, norm_sq_float }
    }

    /// Exact scale factor `Π C_i^{c_i}` on the `λ` root space.
    pub fn action(&self, root: &Root) -> Q {
        let mut out = Q::one();
        for (c, r) in root.coeffs().iter().zip(&self.ratios) {
            if *c > 0 {
                out *= pow_q(r, *c as i64);
            }
        }
        out
    }

    pub fn inverse(&self) -> Self {
        DiagonalConjugator {
            ratios: self.ratios.iter().map(Q::recip).collect(),
            h_coords: self.h_coords.iter().map(|h| -h).collect(),
            norm_sq_float: self.norm_sq_float,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.ratios.iter().all(One::is_one)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ratios": self.ratios.iter().map(fmt_q).collect::<Vec<_>>(),
            "h_coords": self.h_coords,
            "norm_sq": self.norm_sq_float,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum Status {
    Conjugate,
    NotConjugate { reason: String },
    NotSimpleCase,
}

#[derive(Clone, Debug)]
pub struct ConjugacyResult {
    pub status: Status,
    /// `g = g₂⁻¹ g₃ g₁`
    pub word: ConjugatorWord,
    pub steps_u: Vec<StepRecord>,
    pub steps_v: Vec<StepRecord>,
    pub diagonal: Option<DiagonalConjugator>,
    pub verified: bool,
    pub len_u: f64,
    pub len_v: f64,
    /// Sum of factor norms of `g`.
    pub length_upper: f64,
    /// `K(δ)(|u| + |v|) + sqrt(S_Λ Σ_i (ln C_i)²)`
    pub linear_bound: f64,
    /// `δ = min(Δ(u), Δ(v))`
    pub delta: f64,
    pub k_delta: f64,
    /// `(Σ‖g₁ factors‖, K(Δ(u))·|u|)` and likewise for `v`.
    pub ledger_u: (f64, f64),
    pub ledger_v: (f64, f64),
}

impl ConjugacyResult {
    fn failed(status: Status, len_u: f64, len_v: f64) -> Self {
        ConjugacyResult {
            status,
            word: ConjugatorWord::identity(),
            steps_u: Vec::new(),
            steps_v: Vec::new(),
            diagonal: None,
            verified: false,
            len_u,
            len_v,
            length_upper: 0.0,
            linear_bound: 0.0,
            delta: 0.0,
            k_delta: 0.0,
            ledger_u: (0.0, 0.0),
            ledger_v: (0.0, 0.0),
        }
    }

    pub fn steps_within_bound(&self) -> bool {
        self.steps_u.iter().chain(&self.steps_v).all(StepRecord::bound_holds)
    }

    pub fn to_json(&self, cb: &ChevalleyBasis) -> Value {
        let mut v = serde_json::to_value(&self.status).expect("status serializes");
        let obj = v.as_object_mut().expect("tagged enum is an object");
        obj.insert("kind".into(), json!(cb.kind()));
        obj.insert("verified".into(), json!(self.verified));
        obj.insert("word".into(), self.word.to_json(cb));
        obj.insert("steps_u".into(), Value::Array(self.steps_u.iter().map(|s| s.to_json(cb)).collect()));
        obj.insert("steps_v".into(), Value::Array(self.steps_v.iter().map(|s| s.to_json(cb)).collect()));
        obj.insert("diagonal".into(), self.diagonal.as_ref().map_or(Value::Null, DiagonalConjugator::to_json));
        obj.insert(
            "lengths".into(),
            json!({
                "u": self.len_u,
                "v": self.len_v,
                "g_upper": self.length_upper,
            }),
        );
        obj.insert(
            "bound".into(),
            json!({
                "delta": self.delta,
                "k_delta": self.k_delta,
                "linear_bound": self.linear_bound,
                "holds": self.length_upper <= self.linear_bound + 1e-9,
                "ledger_u": {"g1": self.ledger_u.0, "k_times_len": self.ledger_u.1},
                "ledger_v": {"g2": self.ledger_v.0, "k_times_len": self.ledger_v.1},
                "steps_within_bound": self.steps_within_bound(),
            }),
        );
        v
    }
}

/// Outcome of a single elimination step.
#[derive(Clone, Debug)]
pub enum StepOutcome {
    Step(StepRecord, UnipotentCoords),
    Done,
}

/// `c₀²`, or `None` for systems without non-simple roots.
fn c0_sq(cb: &ChevalleyBasis) -> Option<Q> {
    cb.c_constants().map(|c| c.c0_sq)
}

/// Eliminates the order-least non-simple root with a nonzero entry.
pub fn reduce_step(cb: &ChevalleyBasis, order: &ReductionOrder, u: &UnipotentCoords) -> Result<StepOutcome> {
    let rs = cb.root_system();
    if !u.has_nonzero_simples(rs.rank()) {
        return Err(Error::NotSimpleCase);
    }
    let Some(target) = order.sequence.iter().find(|r| !r.is_simple() && !u.entry(cb, r).is_none_or(Zero::is_zero)) else {
        return Ok(StepOutcome::Done);
    };
    let t = rs.index_of(target).expect("order lists positive roots");
    let witness = order.witness(target).ok_or_else(|| Error::Internal(format!("no witness for {target}")))?.clone();
    let y0 = u.get(t).clone();
    let z = match &witness {
        Witness::Single { mu, simple } => {
            let mi = rs.index_of(mu).expect("witness roots are positive");
            let si = simple.simple_index().expect("witness simple root");
            let n = cb.n_pos(mi, si);
            LieElement::scaled_basis(mi, -&y0 / (q(n) * u.get(si)))
        }
        Witness::Pair { .. } => layer_solve(cb, order, u, t)?,
    };
    let next = conj_nil(cb, u, &z);
    debug_assert!(next.get(t).is_zero());
    let factor_len_sq = cb.norm_sq(&z);
    let entry_norm_sq = entry_norm_sq(cb, u, t);
    let c0 = c0_sq(cb).ok_or_else(|| Error::Internal("step on a system without non-simple roots".into()))?;
    let bound_sq = &entry_norm_sq / (c0 * delta_sq(cb, u));
    Ok(StepOutcome::Step(StepRecord { target: target.clone(), witness, factor: z, factor_len_sq, entry_norm_sq, bound_sq }, next))
}

/// Minimum-norm `Z` in layer `hgt(t) - 1` with `[Z, Y_Π]` = `-Y_t` at `t` and
/// zero at the roots of the same height preceding `t` in the order.
fn layer_solve(cb: &ChevalleyBasis, order: &ReductionOrder, u: &UnipotentCoords, t: usize) -> Result<LieElement> {
    let rs = cb.root_system();
    let h = rs.height(t);
    let cols = rs.layer(h - 1);
    let pos = order.positions();
    let here = pos[rs.root(t)];
    let mut rows: Vec<usize> = rs.layer(h).into_iter().filter(|&r| pos[rs.root(r)] < here).collect();
    rows.push(t);
    // M[ρ][ν] = coefficient of e_ρ in [e_ν, Y_Π]
    let m: Vec<Vec<Q>> = rows
        .iter()
        .map(|&rho| {
            cols.iter()
                .map(|&nu| {
                    (0..rs.rank())
                        .filter(|&i| rs.sum_index(nu, i) == Some(rho))
                        .map(|i| q(cb.n_pos(nu, i)) * u.get(i))
                        .sum()
                })
                .collect()
        })
        .collect();
    let w_inv: Vec<Q> = cols.iter().map(|&nu| cb.root_norm_sq(nu).recip()).collect();
    let k = rows.len();
    let gram: Vec<Vec<Q>> = (0..k)
        .map(|a| (0..k).map(|b| (0..cols.len()).map(|j| &m[a][j] * &w_inv[j] * &m[b][j]).sum()).collect())
        .collect();
    let mut rhs = vec![Q::zero(); k];
    rhs[k - 1] = -u.get(t).clone();
    let y = solve(gram, rhs).ok_or_else(|| Error::Internal(format!("layer map not surjective at {}", rs.root(t))))?;
    Ok(LieElement::from_terms(
        cols.iter().enumerate().map(|(j, &nu)| (nu, &w_inv[j] * (0..k).map(|a| &m[a][j] * &y[a]).sum::<Q>())),
    ))
}

/// Runs steps until only simple entries remain. The word lists the latest
/// step first, so `conj_word(u, g₁) = u'`.
pub fn reduce_to_simple(cb: &ChevalleyBasis, order: &ReductionOrder, u: &UnipotentCoords) -> Result<(ConjugatorWord, UnipotentCoords, Vec<StepRecord>)> {
    let rs = cb.root_system();
    if !u.has_nonzero_simples(rs.rank()) {
        return Err(Error::NotSimpleCase);
    }
    let mut word = ConjugatorWord::identity();
    let mut steps = Vec::new();
    let mut cur = u.clone();
    let cap = rs.len() - rs.rank();
    loop {
        match reduce_step(cb, order, &cur)? {
            StepOutcome::Done => return Ok((word, cur, steps)),
            StepOutcome::Step(rec, next) => {
                if steps.len() == cap {
                    return Err(Error::Internal("reduction exceeded the number of non-simple roots".into()));
                }
                word.push_outer(Factor::Nil { x: rec.factor.clone(), length_sq: rec.factor_len_sq.clone() });
                steps.push(rec);
                cur = next;
            }
        }
    }
}

/// `K(δ) = Σ_{i=2}^{r} R_i/(c₀δ) Π_{j=2}^{i-1} (2R_j/(c₀δ) + 1)` from `δ²`.
pub fn k_delta(cb: &ChevalleyBasis, delta_sq: &Q) -> Result<f64> {
    if !delta_sq.is_positive() {
        return Err(Error::Config("δ must be positive".into()));
    }
    let Some(c0) = c0_sq(cb) else { return Ok(0.0) };
    let c0d = sqrt_f64(&(c0 * delta_sq));
    let counts = cb.root_system().height_counts();
    let r = counts.len() - 1;
    let mut k = 0.0;
    let mut prod = 1.0;
    for i in 2..=r {
        if i > 2 {
            prod *= 2.0 * counts[i - 1] as f64 / c0d + 1.0;
        }
        k += counts[i] as f64 / c0d * prod;
    }
    Ok(k)
}

/// `H₀` with `e^{λ_i(H₀)} = w_i / y_i` for simple-supported `u'`, `v'`.
pub fn diagonal_conjugator(cb: &ChevalleyBasis, u: &UnipotentCoords, v: &UnipotentCoords) -> std::result::Result<DiagonalConjugator, Status> {
    let rank = cb.root_system().rank();
    let support = |x: &UnipotentCoords| x.is_simple_supported(rank) && x.has_nonzero_simples(rank);
    if !support(u) || !support(v) {
        return Err(Status::NotConjugate { reason: "support".into() });
    }
    let ratios: Vec<Q> = (0..rank).map(|i| v.get(i) / u.get(i)).collect();
    if ratios.iter().any(|c| !c.is_positive()) {
        return Err(Status::NotConjugate { reason: "negative-ratio".into() });
    }
    Ok(DiagonalConjugator::from_ratios(cb.root_system(), ratios))
}

/// Builds `g = g₂⁻¹ g₃ g₁` with `g u g⁻¹ = v` and checks it exactly.
pub fn conjugate(cb: &ChevalleyBasis, order: &ReductionOrder, u: &UnipotentCoords, v: &UnipotentCoords) -> Result<ConjugacyResult> {
    if u.kind() != cb.kind() || v.kind() != cb.kind() {
        return Err(Error::KindMismatch(u.kind().to_string(), v.kind().to_string()));
    }
    let rs = cb.root_system();
    let (len_u, len_v) = (length(cb, u), length(cb, v));
    if !u.has_nonzero_simples(rs.rank()) || !v.has_nonzero_simples(rs.rank()) {
        return Ok(ConjugacyResult::failed(Status::NotSimpleCase, len_u, len_v));
    }
    let (g1, u1, steps_u) = reduce_to_simple(cb, order, u)?;
    let (g2, v1, steps_v) = reduce_to_simple(cb, order, v)?;
    let g3 = match diagonal_conjugator(cb, &u1, &v1) {
        Ok(d) => d,
        Err(status) => {
            let mut out = ConjugacyResult::failed(status, len_u, len_v);
            out.steps_u = steps_u;
            out.steps_v = steps_v;
            return Ok(out);
        }
    };
    let mut factors: Vec<Factor> = g2.inverse().factors;
    if !g3.is_identity() {
        factors.push(Factor::Cartan(g3.clone()));
    }
    factors.extend(g1.factors.iter().cloned());
    let word = ConjugatorWord::from_factors(factors).freely_reduced();
    let verified = &conj_word(cb, u, &word) == v;

    let (du, dv) = (delta_sq(cb, u), delta_sq(cb, v));
    let dmin = if du < dv { du.clone() } else { dv.clone() };
    let k = k_delta(cb, &dmin)?;
    let s_lambda = to_f64(&cb.s_lambda().value);
    let h_sq: f64 = g3.h_coords.iter().map(|h| h * h).sum();
    let linear_bound = k * (len_u + len_v) + (s_lambda * h_sq).sqrt();
    let ledger_u = (g1.length(), k_delta(cb, &du)? * len_u);
    let ledger_v = (g2.length(), k_delta(cb, &dv)? * len_v);
    Ok(ConjugacyResult {
        status: Status::Conjugate,
        length_upper: word.length(),
        word,
        steps_u,
        steps_v,
        diagonal: Some(g3),
        verified,
        len_u,
        len_v,
        linear_bound,
        delta: sqrt_f64(&dmin),
        k_delta: k,
        ledger_u,
        ledger_v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;
    use crate::rootsys::builtin_order;
    use crate::unipotent::conj_root_exp;
    use std::sync::Arc;

    fn setup(s: &str) -> (Arc<ChevalleyBasis>, ReductionOrder) {
        let cb = ChevalleyBasis::shared(s.parse().unwrap()).unwrap();
        let order = builtin_order(cb.root_system());
        (cb, order)
    }

    fn r(c: &[u32]) -> Root {
        Root::new(c.to_vec())
    }

    fn a2_u(cb: &ChevalleyBasis) -> UnipotentCoords {
        UnipotentCoords::from_entries(cb, [(&r(&[1, 0]), q(1)), (&r(&[0, 1]), q(1)), (&r(&[1, 1]), q(1))]).unwrap()
    }

    #[test]
    fn a2_single_step() {
        let (cb, order) = setup("A2");
        let u = a2_u(&cb);
        let StepOutcome::Step(rec, next) = reduce_step(&cb, &order, &u).unwrap() else { panic!("expected a step") };
        assert_eq!(rec.factor, LieElement::scaled_basis(0, qf(-1, cb.n_pos(0, 1))));
        assert_eq!(rec.factor_len_sq, q(6));
        assert_eq!(rec.bound_sq, q(6));
        assert_eq!(next, UnipotentCoords::from_entries(&cb, [(&r(&[1, 0]), q(1)), (&r(&[0, 1]), q(1))]).unwrap());
        assert!(matches!(reduce_step(&cb, &order, &next).unwrap(), StepOutcome::Done));
    }

    #[test]
    fn zero_simple_entry_rejected() {
        let (cb, order) = setup("A2");
        let mut u = a2_u(&cb);
        u.set(0, q(0));
        assert!(matches!(reduce_step(&cb, &order, &u), Err(Error::NotSimpleCase)));
        let v = a2_u(&cb);
        assert_eq!(conjugate(&cb, &order, &u, &v).unwrap().status, Status::NotSimpleCase);
    }

    #[test]
    fn k_delta_values() {
        let (cb, _) = setup("A2");
        assert!((k_delta(&cb, &q(6)).unwrap() - 1.0).abs() < 1e-12);
        assert!(k_delta(&cb, &q(0)).is_err());
        assert_eq!(k_delta(&ChevalleyBasis::shared("A1".parse().unwrap()).unwrap(), &q(1)).unwrap(), 0.0);
        let (f4, _) = setup("F4");
        assert!(k_delta(&f4, &q(2)).unwrap() >= k_delta(&f4, &q(3)).unwrap());
    }

    #[test]
    fn diagonal_examples() {
        let (cb, _) = setup("A2");
        let u = UnipotentCoords::from_entries(&cb, [(&r(&[1, 0]), q(2)), (&r(&[0, 1]), q(3))]).unwrap();
        let v = UnipotentCoords::from_entries(&cb, [(&r(&[1, 0]), q(1)), (&r(&[0, 1]), q(1))]).unwrap();
        let d = diagonal_conjugator(&cb, &u, &v).unwrap();
        assert_eq!(d.ratios, vec![qf(1, 2), qf(1, 3)]);
        assert_eq!(d.action(&r(&[1, 1])), qf(1, 6));
        let same = diagonal_conjugator(&cb, &u, &u).unwrap();
        assert!(same.is_identity());
        assert_eq!(same.norm_sq_float, 0.0);
        let mut flipped = v.clone();
        flipped.set(1, q(-1));
        assert_eq!(diagonal_conjugator(&cb, &u, &flipped), Err(Status::NotConjugate { reason: "negative-ratio".into() }));
        assert_eq!(diagonal_conjugator(&cb, &a2_u(&cb), &v), Err(Status::NotConjugate { reason: "support".into() }));
    }

    #[test]
    fn conjugate_identity_and_a2_example() {
        let (cb, order) = setup("A2");
        let u = a2_u(&cb);
        let res = conjugate(&cb, &order, &u, &u).unwrap();
        assert!(res.verified);
        assert!(res.diagonal.as_ref().unwrap().is_identity());
        assert!(res.length_upper == 0.0 && res.length_upper.is_sign_positive());

        let v = conj_root_exp(&cb, &u, &r(&[0, 1]), &q(1));
        let res = conjugate(&cb, &order, &u, &v).unwrap();
        assert_eq!(res.status, Status::Conjugate);
        assert!(res.verified);
        assert!(res.length_upper <= res.linear_bound + 1e-9);
        assert!(res.steps_within_bound());
    }

    #[test]
    fn negative_ratio_is_not_conjugate() {
        let (cb, order) = setup("B3");
        let u = UnipotentCoords::from_dense(cb.kind(), (0..9).map(|i| qf(i as i64 + 1, 3)).collect());
        let mut v = u.clone();
        v.set(2, -v.get(2).clone());
        let res = conjugate(&cb, &order, &u, &v).unwrap();
        assert_eq!(res.status, Status::NotConjugate { reason: "negative-ratio".into() });
        assert!(!res.verified);
    }

    #[test]
    fn pair_steps_reach_zero() {
        for name in ["D4", "F4", "E6"] {
            let (cb, order) = setup(name);
            let m = cb.num_positive();
            let u = UnipotentCoords::from_dense(cb.kind(), (0..m).map(|i| qf((i as i64 % 5) + 1, (i as i64 % 3) + 1)).collect());
            let (g1, u1, steps) = reduce_to_simple(&cb, &order, &u).unwrap();
            assert!(u1.is_simple_supported(cb.root_system().rank()), "{name}");
            assert_eq!(conj_word(&cb, &u, &g1), u1);
            assert_eq!(u1.simple_entries(cb.root_system().rank()), u.simple_entries(cb.root_system().rank()));
            assert!(steps.iter().any(|s| s.witness.is_pair()), "{name}");
            assert!(steps.len() <= m - cb.root_system().rank());
        }
    }

    #[test]
    fn f4_full_support_takes_twenty_steps() {
        let (cb, order) = setup("F4");
        // simple entries large relative to the rest so no entry is revived to zero by accident
        let u = UnipotentCoords::from_dense(cb.kind(), (0..24).map(|i| if i < 4 { q(7 + i as i64) } else { qf(1, i as i64 + 2) }).collect());
        let (_, _, steps) = reduce_to_simple(&cb, &order, &u).unwrap();
        assert_eq!(steps.len(), 20);
    }

    #[test]
    fn elimination_respects_order() {
        let (cb, order) = setup("C4");
        let m = cb.num_positive();
        let u = UnipotentCoords::from_dense(cb.kind(), (0..m).map(|i| qf(i as i64 + 2, 3)).collect());
        let (_, _, steps) = reduce_to_simple(&cb, &order, &u).unwrap();
        let pos = order.positions();
        assert!(steps.windows(2).all(|w| pos[&w[0].target] < pos[&w[1].target]));
    }
}
