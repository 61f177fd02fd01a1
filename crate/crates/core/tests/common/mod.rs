//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use indcalc::fp::{FpSubspace, FpVector};
use rand::Rng;

pub type VecSet = BTreeSet<Vec<u32>>;

/// Every vector of F_p^k.
pub fn all_vectors(p: u32, k: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u32>| {
                (0..p).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    out
}

fn add(p: u32, a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| (x + y) % p).collect()
}

/// Span by closing {0} under adding generator multiples.
pub fn span_set(p: u32, k: usize, gens: &[Vec<u32>]) -> VecSet {
    let mut set: VecSet = BTreeSet::from([vec![0; k]]);
    let mut frontier = vec![vec![0; k]];
    while let Some(v) = frontier.pop() {
        for g in gens {
            let w = add(p, &v, g);
            if set.insert(w.clone()) {
                frontier.push(w);
            }
        }
    }
    set
}

pub fn sum_set(p: u32, a: &VecSet, b: &VecSet) -> VecSet {
    a.iter().flat_map(|x| b.iter().map(move |y| add(p, x, y))).collect()
}

/// Members of `s` found by testing every vector.
pub fn members(s: &FpSubspace) -> VecSet {
    all_vectors(s.p(), s.k())
        .into_iter()
        .filter(|v| {
            s.contains(&FpVector::new(s.p(), v.iter().map(|&c| c as i64)).unwrap())
                .unwrap()
        })
        .collect()
}

/// The Kim analogue evaluated on explicit vector sets.
pub fn kim_oracle(p: u32, u: &VecSet, v: &VecSet, w: &VecSet, g: &VecSet) -> bool {
    let cap = |x: &VecSet, y: &VecSet| -> VecSet { x.intersection(y).cloned().collect() };
    let lhs = cap(g, &sum_set(p, u, v));
    let rhs = sum_set(p, &cap(g, u), &cap(g, v));
    &cap(u, v) == w && lhs == rhs
}

pub fn vector(p: u32, coords: &[u32]) -> FpVector {
    FpVector::new(p, coords.iter().map(|&c| c as i64)).unwrap()
}

pub fn random_coords(rng: &mut impl Rng, p: u32, k: usize) -> Vec<u32> {
    (0..k).map(|_| rng.gen_range(0..p)).collect()
}

/// Primes and dimensions with p^k ≤ 4096.
pub fn small_shapes() -> Vec<(u32, usize)> {
    let mut out = Vec::new();
    for p in [2u32, 3, 5, 7, 11, 13] {
        let mut k = 1;
        while (p as u64).pow(k as u32) <= 4096 {
            out.push((p, k));
            k += 1;
        }
    }
    out
}
