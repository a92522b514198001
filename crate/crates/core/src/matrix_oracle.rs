//! Exact `n × n` matrix model of type `A_{n-1}`, used to cross-check the
//! abstract machinery.
//!
//! The root `λ_i + … + λ_j` corresponds to the matrix unit `E_{i,j+1}`. Nothing
//! here goes through the Chevalley basis.

use crate::error::{Error, Result};
use crate::rational::{fmt_q, Q};
use crate::rootsys::{Family, Root, RootSystem};
use crate::unipotent::UnipotentCoords;
use num_traits::{One, Signed, Zero};
use serde_json::Value;
use std::ops::Mul;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    n: usize,
    entries: Vec<Vec<Q>>,
}

impl RationalMatrix {
    pub fn zero(n: usize) -> Self {
        RationalMatrix { n, entries: vec![vec![Q::zero(); n]; n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i][i] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "square matrix");
        RationalMatrix { n, entries: rows }
    }

    /// `I + a E_{ij}` (0-based indices).
    pub fn elementary(n: usize, i: usize, j: usize, a: Q) -> Self {
        let mut m = Self::identity(n);
        m.entries[i][j] += a;
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.entries[i][j] = v;
    }

    pub fn rows(&self) -> &[Vec<Q>] {
        &self.entries
    }

    pub fn add(&self, o: &RationalMatrix) -> RationalMatrix {
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect()).collect();
        RationalMatrix { n: self.n, entries }
    }

    pub fn sub(&self, o: &RationalMatrix) -> RationalMatrix {
        let entries = self.entries.iter().zip(&o.entries).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect();
        RationalMatrix { n: self.n, entries }
    }

    pub fn scale(&self, c: &Q) -> RationalMatrix {
        RationalMatrix { n: self.n, entries: self.entries.iter().map(|r| r.iter().map(|x| x * c).collect()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Zero::is_zero)
    }

    pub fn is_strictly_upper(&self) -> bool {
        (0..self.n).all(|i| (0..=i).all(|j| self.entries[i][j].is_zero()))
    }

    pub fn is_unipotent_upper(&self) -> bool {
        self.sub(&Self::identity(self.n)).is_strictly_upper()
    }

    /// `exp(N)` for strictly upper triangular `N`; the series stops at `N^{n-1}`.
    pub fn exp_nilpotent(&self) -> RationalMatrix {
        debug_assert!(self.is_strictly_upper());
        let mut out = Self::identity(self.n);
        let mut term = Self::identity(self.n);
        for k in 1..self.n {
            term = (&term * self).scale(&Q::new(1.into(), (k as i64).into()));
            if term.is_zero() {
                break;
            }
            out = out.add(&term);
        }
        out
    }

    /// `log(U) = Σ_{k≥1} (-1)^{k+1} (U - I)^k / k` for unipotent upper triangular `U`.
    pub fn log_unipotent(&self) -> RationalMatrix {
        debug_assert!(self.is_unipotent_upper());
        let x = self.sub(&Self::identity(self.n));
        let mut out = Self::zero(self.n);
        let mut pow = Self::identity(self.n);
        for k in 1..self.n {
            pow = &pow * &x;
            if pow.is_zero() {
                break;
            }
            let c = Q::new(if k % 2 == 1 { 1.into() } else { (-1).into() }, (k as i64).into());
            out = out.add(&pow.scale(&c));
        }
        out
    }

    /// Gauss-Jordan inverse; `None` if singular.
    pub fn inverse(&self) -> Option<RationalMatrix> {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut inv = Self::identity(n).entries;
        for col in 0..n {
            let p = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, p);
            inv.swap(col, p);
            let d = a[col][col].recip();
            for k in 0..n {
                a[col][k] = &a[col][k] * &d;
                inv[col][k] = &inv[col][k] * &d;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for k in 0..n {
                    let t = &f * &a[col][k];
                    a[r][k] -= t;
                    let t = &f * &inv[col][k];
                    inv[r][k] -= t;
                }
            }
        }
        Some(RationalMatrix { n, entries: inv })
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.entries.iter().map(|r| Value::Array(r.iter().map(|x| Value::String(fmt_q(x))).collect())).collect())
    }
}

impl Mul for &RationalMatrix {
    type Output = RationalMatrix;
    fn mul(self, o: &RationalMatrix) -> RationalMatrix {
        let n = self.n;
        let mut out = RationalMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &o.entries[k][j];
                    if !b.is_zero() {
                        out.entries[i][j] += a * b;
                    }
                }
            }
        }
        out
    }
}

/// Matrix position (0-based) of a type-A root `λ_i + … + λ_j`.
pub fn root_position(r: &Root) -> (usize, usize) {
    let c = r.coeffs();
    let i = c.iter().position(|&x| x != 0).expect("nonzero root");
    let j = c.iter().rposition(|&x| x != 0).expect("nonzero root");
    (i, j + 1)
}

fn require_type_a(rs: &RootSystem) -> Result<()> {
    if rs.kind().family != Family::A {
        return Err(Error::KindMismatch(rs.kind().to_string(), "A_n".into()));
    }
    Ok(())
}

/// The strictly upper triangular matrix `Σ Y_λ E_λ`.
pub fn log_matrix(rs: &RootSystem, u: &UnipotentCoords) -> Result<RationalMatrix> {
    require_type_a(rs)?;
    let mut m = RationalMatrix::zero(rs.rank() + 1);
    for (k, r) in rs.positives().iter().enumerate() {
        let (i, j) = root_position(r);
        m.entries[i][j] = u.get(k).clone();
    }
    Ok(m)
}

/// `exp(Σ Y_λ E_λ)`.
pub fn embed_type_a(rs: &RootSystem, u: &UnipotentCoords) -> Result<RationalMatrix> {
    Ok(log_matrix(rs, u)?.exp_nilpotent())
}

/// Inverse of [`embed_type_a`].
pub fn unembed_type_a(rs: &RootSystem, m: &RationalMatrix) -> Result<UnipotentCoords> {
    require_type_a(rs)?;
    let l = m.log_unipotent();
    let coords = rs
        .positives()
        .iter()
        .map(|r| {
            let (i, j) = root_position(r);
            l.entries[i][j].clone()
        })
        .collect();
    Ok(UnipotentCoords::from_dense(rs.kind(), coords))
}

/// `g m g⁻¹`.
pub fn oracle_conjugate(m: &RationalMatrix, g: &RationalMatrix) -> RationalMatrix {
    let gi = g.inverse().expect("conjugator is invertible");
    &(g * m) * &gi
}

/// Clears every entry above the super-diagonal of `log m` by conjugating with
/// `I + α E_{i,j-1}`, distance by distance and, within a distance, from the
/// bottom row up. Returns `(g, g m g⁻¹)`.
pub fn oracle_reduce(m: &RationalMatrix) -> Result<(RationalMatrix, RationalMatrix)> {
    let n = m.n;
    if !m.is_unipotent_upper() {
        return Err(Error::Config("oracle_reduce expects a unipotent upper triangular matrix".into()));
    }
    if (0..n - 1).any(|i| m.entries[i][i + 1].is_zero()) {
        return Err(Error::NotSimpleCase);
    }
    let mut g = RationalMatrix::identity(n);
    let mut cur = m.clone();
    for d in 2..n {
        for i in (0..n - d).rev() {
            let j = i + d;
            let l = cur.log_unipotent();
            if l.entries[i][j].is_zero() {
                continue;
            }
            let alpha = -&l.entries[i][j] / &l.entries[j - 1][j];
            let e = RationalMatrix::elementary(n, i, j - 1, alpha);
            cur = oracle_conjugate(&cur, &e);
            g = &e * &g;
        }
    }
    Ok((g, cur))
}

/// Diagonal conjugator of `SL_4` taking the super-diagonal `x` to `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sl4Diagonal {
    /// exact `α_i⁴`
    pub fourth_powers: [Q; 4],
    pub alphas: [f64; 4],
}

/// `α_1⁴ = w₁³w₂²w₃/(x₁³x₂²x₃)`, `α_2⁴ = w₂²w₃x₁/(x₂²x₃w₁)`,
/// `α_3⁴ = w₃x₁x₂²/(x₃w₁w₂²)`, `α_4⁴ = x₁x₂²x₃³/(w₁w₂²w₃³)`.
pub fn sl4_diagonal(x: &[Q; 3], w: &[Q; 3]) -> Result<Sl4Diagonal> {
    if x.iter().chain(w).any(Zero::is_zero) {
        return Err(Error::NotSimpleCase);
    }
    let r: Vec<Q> = (0..3).map(|i| &w[i] / &x[i]).collect();
    if r.iter().any(|c| !c.is_positive()) {
        return Err(Error::NotConjugate("negative-ratio".into()));
    }
    let p = |a: i32, b: i32, c: i32| -> Q {
        let pw = |v: &Q, e: i32| if e >= 0 { num_traits::pow(v.clone(), e as usize) } else { num_traits::pow(v.recip(), (-e) as usize) };
        pw(&r[0], a) * pw(&r[1], b) * pw(&r[2], c)
    };
    let fourth_powers = [p(3, 2, 1), p(-1, 2, 1), p(-1, -2, 1), p(-1, -2, -3)];
    let alphas = fourth_powers.clone().map(|v| crate::rational::to_f64(&v).powf(0.25));
    Ok(Sl4Diagonal { fourth_powers, alphas })
}

/// `diag(α) · m · diag(α)⁻¹` in floating point, for checking [`sl4_diagonal`].
pub fn conjugate_by_diagonal_f64(m: &RationalMatrix, alphas: &[f64]) -> Vec<Vec<f64>> {
    (0..m.n)
        .map(|i| (0..m.n).map(|j| alphas[i] * crate::rational::to_f64(&m.entries[i][j]) / alphas[j]).collect())
        .collect()
}

/// The unipotent matrix with super-diagonal `x` and zeros above it.
pub fn superdiagonal(x: &[Q]) -> RationalMatrix {
    let n = x.len() + 1;
    let mut m = RationalMatrix::identity(n);
    for (i, v) in x.iter().enumerate() {
        m.entries[i][i + 1] = v.clone();
    }
    m
}

pub fn q_matrix(rows: &[&[(i64, i64)]]) -> RationalMatrix {
    RationalMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&(a, b)| Q::new(a.into(), b.into())).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};
    use crate::rootsys::RootSystemKind;
    use proptest::prelude::*;

    fn a(n: usize) -> RootSystem {
        RootSystem::new(format!("A{n}").parse::<RootSystemKind>().unwrap())
    }

    #[test]
    fn a2_embedding() {
        let rs = a(2);
        let u = UnipotentCoords::from_dense(rs.kind(), vec![q(1), q(1), q(1)]);
        let m = embed_type_a(&rs, &u).unwrap();
        assert_eq!(m, q_matrix(&[&[(1, 1), (1, 1), (3, 2)], &[(0, 1), (1, 1), (1, 1)], &[(0, 1), (0, 1), (1, 1)]]));
        assert_eq!(unembed_type_a(&rs, &m).unwrap(), u);
        let zero = UnipotentCoords::from_dense(rs.kind(), vec![q(0); 3]);
        assert_eq!(embed_type_a(&rs, &zero).unwrap(), RationalMatrix::identity(3));
        let b2 = RootSystem::new("B2".parse().unwrap());
        assert!(embed_type_a(&b2, &UnipotentCoords::from_dense(b2.kind(), vec![q(0); 4])).is_err());
    }

    #[test]
    fn reduce_3x3_example() {
        let m = q_matrix(&[&[(1, 1), (1, 1), (3, 2)], &[(0, 1), (1, 1), (1, 1)], &[(0, 1), (0, 1), (1, 1)]]);
        let (g, red) = oracle_reduce(&m).unwrap();
        assert_eq!(g, RationalMatrix::elementary(3, 0, 1, q(-1)));
        assert_eq!(red, q_matrix(&[&[(1, 1), (1, 1), (1, 2)], &[(0, 1), (1, 1), (1, 1)], &[(0, 1), (0, 1), (1, 1)]]));
        let (g2, red2) = oracle_reduce(&red).unwrap();
        assert_eq!(g2, RationalMatrix::identity(3));
        assert_eq!(red2, red);
    }

    #[test]
    fn sl4_first_step() {
        // m = [[1,x1,y1,z1],[0,1,x2,y2],[0,0,1,x3],[0,0,0,1]]
        let (x1, x2, x3, y1, y2, z1) = (qf(2, 1), qf(3, 1), qf(5, 1), qf(7, 2), qf(-1, 3), qf(4, 5));
        let m = RationalMatrix::from_rows(vec![
            vec![q(1), x1.clone(), y1.clone(), z1.clone()],
            vec![q(0), q(1), x2.clone(), y2.clone()],
            vec![q(0), q(0), q(1), x3.clone()],
            vec![q(0), q(0), q(0), q(1)],
        ]);
        let alpha = -&y1 / &x2;
        let out = oracle_conjugate(&m, &RationalMatrix::elementary(4, 0, 1, alpha.clone()));
        assert!(out.get(0, 2).is_zero());
        assert_eq!(out.get(0, 3), &(&z1 + &alpha * &y2));
        assert_eq!(out.get(0, 1), &x1);
        assert_eq!(out.get(1, 2), &x2);
        assert_eq!(out.get(1, 3), &y2);
        assert_eq!(out.get(2, 3), &x3);
    }

    #[test]
    fn sl4_alpha_formulas() {
        let one = [q(1), q(1), q(1)];
        let d = sl4_diagonal(&one, &one).unwrap();
        assert!(d.fourth_powers.iter().all(|v| v == &q(1)));
        let d = sl4_diagonal(&one, &[q(16), q(1), q(1)]).unwrap();
        assert_eq!(d.fourth_powers, [q(4096), qf(1, 16), qf(1, 16), qf(1, 16)]);
        let prod = d.fourth_powers.iter().fold(q(1), |acc, v| acc * v);
        assert_eq!(prod, q(1));
        let conj = conjugate_by_diagonal_f64(&superdiagonal(&one), &d.alphas);
        assert!((conj[0][1] - 16.0).abs() < 1e-9 && (conj[1][2] - 1.0).abs() < 1e-9 && (conj[2][3] - 1.0).abs() < 1e-9);
        assert!(matches!(sl4_diagonal(&one, &[q(-1), q(1), q(1)]), Err(Error::NotConjugate(_))));
    }

    #[test]
    fn zero_superdiagonal_is_rejected() {
        let m = superdiagonal(&[q(1), q(0), q(2)]);
        assert!(matches!(oracle_reduce(&m), Err(Error::NotSimpleCase)));
    }

    fn strictly_upper(n: usize) -> impl Strategy<Value = RationalMatrix> {
        proptest::collection::vec((-9i64..=9, 1i64..=5), n * n).prop_map(move |v| {
            let mut m = RationalMatrix::zero(n);
            for i in 0..n {
                for j in i + 1..n {
                    let (a, b) = v[i * n + j];
                    m.set(i, j, qf(a, b));
                }
            }
            m
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn exp_log_round_trip(m in (2usize..=6).prop_flat_map(strictly_upper)) {
            prop_assert_eq!(m.exp_nilpotent().log_unipotent(), m.clone());
            let e = m.exp_nilpotent();
            prop_assert_eq!(&e * &e.inverse().unwrap(), RationalMatrix::identity(m.n()));
        }
    }
}
