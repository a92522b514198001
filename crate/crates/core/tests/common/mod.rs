#![allow(dead_code)]

use conjforge::liealg::ChevalleyBasis;
use conjforge::rational::Q;
use conjforge::unipotent::UnipotentCoords;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/d` with `|p| ≤ num`, `1 ≤ d ≤ den`.
pub fn rand_q(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Q {
    Q::new(rng.gen_range(-num..=num).into(), rng.gen_range(1..=den).into())
}

pub fn rand_nonzero(rng: &mut ChaCha8Rng, num: i64, den: i64) -> Q {
    loop {
        let x = rand_q(rng, num, den);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Random element with nonzero simple entries; each other entry is zero with probability 1/3.
pub fn rand_simple_case(cb: &ChevalleyBasis, rng: &mut ChaCha8Rng) -> UnipotentCoords {
    let rs = cb.root_system();
    let coords = (0..rs.len())
        .map(|i| {
            if i < rs.rank() {
                rand_nonzero(rng, 5, 3)
            } else if rng.gen_ratio(1, 3) {
                Q::zero()
            } else {
                rand_q(rng, 5, 3)
            }
        })
        .collect();
    UnipotentCoords::from_dense(cb.kind(), coords)
}

/// Random element with arbitrary (possibly zero) entries.
pub fn rand_any(cb: &ChevalleyBasis, rng: &mut ChaCha8Rng) -> UnipotentCoords {
    let coords = (0..cb.root_system().len()).map(|_| if rng.gen_ratio(1, 3) { Q::zero() } else { rand_q(rng, 4, 3) }).collect();
    UnipotentCoords::from_dense(cb.kind(), coords)
}
