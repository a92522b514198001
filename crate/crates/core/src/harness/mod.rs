//! Instance generation and experiment runs.

pub mod cli;

use crate::error::{Error, Result};
use crate::liealg::ChevalleyBasis;
use crate::rational::{de_q, fmt_q, q, ser_q, Q};
use crate::reduce::{conjugate, DiagonalConjugator, Status};
use crate::rootsys::{builtin_order, ReductionOrder, RootSystemKind};
use crate::unipotent::{conj_word, entry_norm_sq, ConjugatorWord, Factor, UnipotentCoords};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::sync::Arc;

/// Largest denominator drawn for random rationals.
const MAX_DEN: i64 = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(deserialize_with = "de_kind", serialize_with = "ser_kind")]
    pub kind: RootSystemKind,
    pub trials: usize,
    pub seed: u64,
    #[serde(deserialize_with = "de_q", serialize_with = "ser_q")]
    pub coeff_bound: Q,
    #[serde(deserialize_with = "de_q", serialize_with = "ser_q")]
    pub delta_min: Q,
    pub scramble_len: usize,
    /// Also conjugate by a random diagonal element, so `v` has different simple entries.
    #[serde(default)]
    pub diagonal_scramble: bool,
}

fn ser_kind<S: serde::Serializer>(k: &RootSystemKind, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&k.to_string())
}

/// `"F4"` or `{"family": "F", "rank": 4}`.
fn de_kind<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<RootSystemKind, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        S(String),
        O(RootSystemKind),
    }
    match Raw::deserialize(d)? {
        Raw::S(s) => s.parse().map_err(serde::de::Error::custom),
        Raw::O(k) => Ok(k),
    }
}

impl ExperimentConfig {
    pub fn new(kind: RootSystemKind) -> Self {
        ExperimentConfig { kind, trials: 10, seed: 0, coeff_bound: q(3), delta_min: q(1), scramble_len: 4, diagonal_scramble: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !self.delta_min.is_positive() {
            return Err(Error::Config("delta_min must be positive".into()));
        }
        if !self.coeff_bound.is_positive() {
            return Err(Error::Config("coeff_bound must be positive".into()));
        }
        Ok(())
    }
}

/// A generated pair with the word that produced `v`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub u: UnipotentCoords,
    pub v: UnipotentCoords,
    pub w_true: ConjugatorWord,
}

impl Instance {
    pub fn to_json(&self, cb: &ChevalleyBasis) -> Value {
        json!({ "u": self.u.to_json(cb), "v": self.v.to_json(cb), "w_true": self.w_true.to_json(cb) })
    }
}

fn rng_for(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform `p/d` with `1 ≤ d ≤ MAX_DEN` and `|p/d| ≤ bound`.
fn draw_q(rng: &mut ChaCha8Rng, bound: &Q) -> Q {
    let d = rng.gen_range(1..=MAX_DEN);
    let cap = (bound * q(d)).floor().to_integer().to_i64().unwrap_or(i64::MAX / 4);
    let p = rng.gen_range(-cap..=cap);
    Q::new(p.into(), d.into())
}

fn draw_nonzero(rng: &mut ChaCha8Rng, bound: &Q) -> Q {
    loop {
        let x = draw_q(rng, bound);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Reproducible instance for `(cfg.seed, trial)`.
pub fn gen_instance(cfg: &ExperimentConfig, cb: &ChevalleyBasis, trial: u64) -> Result<Instance> {
    cfg.validate()?;
    let rs = cb.root_system();
    let m = rs.len();
    let mut rng = rng_for(cfg.seed, trial);
    let dmin_sq = &cfg.delta_min * &cfg.delta_min;
    for i in 0..rs.rank() {
        let best = &cfg.coeff_bound * &cfg.coeff_bound * cb.root_norm_sq(i);
        if best < dmin_sq {
            return Err(Error::Config(format!("coeff_bound {} cannot reach delta_min {} on {}", fmt_q(&cfg.coeff_bound), fmt_q(&cfg.delta_min), rs.root(i))));
        }
    }
    let mut u = UnipotentCoords::identity(cb);
    for i in 0..m {
        let x = if i < rs.rank() {
            loop {
                let x = draw_nonzero(&mut rng, &cfg.coeff_bound);
                u.set(i, x.clone());
                if entry_norm_sq(cb, &u, i) >= dmin_sq {
                    break x;
                }
            }
        } else {
            draw_q(&mut rng, &cfg.coeff_bound)
        };
        u.set(i, x);
    }
    let mut factors = Vec::with_capacity(cfg.scramble_len + 1);
    for _ in 0..cfg.scramble_len {
        let mu = rng.gen_range(0..m);
        let z = draw_nonzero(&mut rng, &cfg.coeff_bound);
        factors.push(Factor::nil(cb, cb.e(rs.root(mu)).scale(&z)));
    }
    if cfg.diagonal_scramble {
        let ratios = (0..rs.rank()).map(|_| Q::new(rng.gen_range(1..=4i64).into(), rng.gen_range(1..=4i64).into())).collect();
        factors.push(Factor::Cartan(DiagonalConjugator::from_ratios(rs, ratios)));
    }
    let w_true = ConjugatorWord::from_factors(factors);
    let v = conj_word(cb, &u, &w_true);
    Ok(Instance { u, v, w_true })
}

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub kind: String,
    pub rank: usize,
    pub seed: u64,
    pub trial: u64,
    pub status: String,
    pub len_u: f64,
    pub len_v: f64,
    pub len_g: f64,
    pub bound: f64,
    pub ratio: f64,
    pub verified: bool,
}

/// Checks beyond the CSV columns, per trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialChecks {
    pub bound_holds: bool,
    pub steps_within_bound: bool,
    pub ledger_holds: bool,
    pub pair_steps: usize,
    pub worst_step_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Aggregate {
    pub kind: String,
    pub trials: usize,
    pub verified: usize,
    pub verify_failures: usize,
    pub bound_violations: usize,
    pub step_bound_violations: usize,
    pub ledger_violations: usize,
    pub max_ratio: f64,
    /// max of `len_g / bound`
    pub max_bound_fraction: f64,
    /// max over steps of `sqrt(factor_len_sq / bound_sq)`
    pub worst_step_ratio: f64,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
    pub checks: Vec<TrialChecks>,
    pub aggregate: Aggregate,
}

impl Report {
    pub fn to_json(&self) -> Value {
        json!({
            "config": self.config,
            "aggregate": self.aggregate,
            "rows": self.rows,
            "checks": self.checks,
        })
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for r in &self.rows {
            wr.serialize(r).map_err(|e| Error::Io(std::io::Error::other(e)))?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Thread cap from `CONJFORGE_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var("CONJFORGE_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

fn run_trial(cfg: &ExperimentConfig, cb: &ChevalleyBasis, order: &ReductionOrder, trial: u64) -> Result<(ReportRow, TrialChecks)> {
    let inst = gen_instance(cfg, cb, trial)?;
    let res = conjugate(cb, order, &inst.u, &inst.v)?;
    if res.status != Status::Conjugate || !res.verified {
        let dump = json!({ "config": cfg, "trial": trial, "instance": inst.to_json(cb), "result": res.to_json(cb) });
        return Err(Error::Internal(format!("generated conjugate pair not verified; reproducer: {dump}")));
    }
    let denom = res.len_u + res.len_v;
    let row = ReportRow {
        kind: cfg.kind.to_string(),
        rank: cfg.kind.rank,
        seed: cfg.seed,
        trial,
        status: "conjugate".into(),
        len_u: res.len_u,
        len_v: res.len_v,
        len_g: res.length_upper,
        bound: res.linear_bound,
        ratio: if denom > 0.0 { res.length_upper / denom } else { 0.0 },
        verified: res.verified,
    };
    let steps = res.steps_u.iter().chain(&res.steps_v);
    let worst_step_ratio = steps
        .clone()
        .map(|s| if s.bound_sq.is_zero() { 0.0 } else { crate::rational::to_f64(&(&s.factor_len_sq / &s.bound_sq)).sqrt() })
        .fold(0.0, f64::max);
    let checks = TrialChecks {
        bound_holds: res.length_upper <= res.linear_bound + 1e-9,
        steps_within_bound: res.steps_within_bound(),
        ledger_holds: res.ledger_u.0 <= res.ledger_u.1 + 1e-9 && res.ledger_v.0 <= res.ledger_v.1 + 1e-9,
        pair_steps: steps.filter(|s| s.witness.is_pair()).count(),
        worst_step_ratio,
    };
    Ok((row, checks))
}

/// Runs `cfg.trials` independent trials in parallel. Fails with a reproducer
/// if any generated pair is not verified.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let cb: Arc<ChevalleyBasis> = ChevalleyBasis::shared(cfg.kind)?;
    let order = builtin_order(cb.root_system());
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| Error::Internal(e.to_string()))?;
    let results: Vec<(ReportRow, TrialChecks)> =
        pool.install(|| (0..cfg.trials as u64).into_par_iter().map(|t| run_trial(cfg, &cb, &order, t)).collect::<Result<Vec<_>>>())?;
    let (rows, checks): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let aggregate = Aggregate {
        kind: cfg.kind.to_string(),
        trials: rows.len(),
        verified: rows.iter().filter(|r| r.verified).count(),
        verify_failures: rows.iter().filter(|r| !r.verified).count(),
        bound_violations: checks.iter().filter(|c| !c.bound_holds).count(),
        step_bound_violations: checks.iter().filter(|c| !c.steps_within_bound).count(),
        ledger_violations: checks.iter().filter(|c| !c.ledger_holds).count(),
        max_ratio: rows.iter().map(|r| r.ratio).fold(0.0, f64::max),
        max_bound_fraction: rows.iter().map(|r| if r.bound > 0.0 { r.len_g / r.bound } else { 0.0 }).fold(0.0, f64::max),
        worst_step_ratio: checks.iter().map(|c| c.worst_step_ratio).fold(0.0, f64::max),
    };
    Ok(Report { config: cfg.clone(), rows, checks, aggregate })
}
