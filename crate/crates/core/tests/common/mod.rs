#![allow(dead_code)]

use cqa::{Alphabet, CAutomaton, ComplexMatrix, Scalar};
use proptest::prelude::*;

pub const DYADIC: [f64; 7] = [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];

/// `n` atomic labels `prefix0, prefix1, ...`.
pub fn alphabet(prefix: &str, n: usize) -> Alphabet {
    let names: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
    Alphabet::atoms(&names).unwrap()
}

pub fn complex_entry() -> impl Strategy<Value = Scalar> + Clone {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Scalar::new(re, im))
}

/// Entries whose sums and products of a few terms are exact in `f64`.
pub fn dyadic_entry() -> impl Strategy<Value = Scalar> + Clone {
    (prop::sample::select(&DYADIC[..]), prop::sample::select(&DYADIC[..]))
        .prop_map(|(re, im)| Scalar::new(re, im))
}

/// Assembles an automaton from a flat list of entries, matrix by matrix in
/// (left, right) order.
pub fn assemble(left: &Alphabet, right: &Alphabet, dim: usize, entries: &[Scalar]) -> CAutomaton {
    let block = dim * dim;
    let mut family = Vec::new();
    let mut k = 0;
    for a in left.iter() {
        for b in right.iter() {
            let m = ComplexMatrix::new(dim, dim, entries[k * block..(k + 1) * block].to_vec()).unwrap();
            family.push((a.clone(), b.clone(), m));
            k += 1;
        }
    }
    CAutomaton::new(left.clone(), right.clone(), dim, family, None).unwrap()
}

pub fn automaton<S>(left: Alphabet, right: Alphabet, dim: usize, entry: S) -> impl Strategy<Value = CAutomaton>
where
    S: Strategy<Value = Scalar> + Clone,
{
    let n = left.len() * right.len() * dim * dim;
    prop::collection::vec(entry, n).prop_map(move |e| assemble(&left, &right, dim, &e))
}

/// A chain `A0 -> A1 -> ... -> Ak` of random automata with alphabets of
/// at most three labels and dimensions at most three.
pub fn chain<S>(len: usize, entry: S) -> impl Strategy<Value = Vec<CAutomaton>>
where
    S: Strategy<Value = Scalar> + Clone + 'static,
{
    (prop::collection::vec(1usize..=3, len + 1), prop::collection::vec(1usize..=3, len)).prop_flat_map(
        move |(sizes, dims)| {
            let alphabets: Vec<Alphabet> =
                sizes.iter().enumerate().map(|(i, &n)| alphabet(&format!("s{i}_"), n)).collect();
            (0..len)
                .map(|i| automaton(alphabets[i].clone(), alphabets[i + 1].clone(), dims[i], entry.clone()).boxed())
                .collect::<Vec<_>>()
        },
    )
}

/// Unrelated automata with independent alphabets.
pub fn independent<S>(count: usize, entry: S) -> impl Strategy<Value = Vec<CAutomaton>>
where
    S: Strategy<Value = Scalar> + Clone + 'static,
{
    prop::collection::vec((1usize..=3, 1usize..=3, 1usize..=3), count).prop_flat_map(move |shapes| {
        shapes
            .iter()
            .enumerate()
            .map(|(i, &(l, r, d))| {
                automaton(alphabet(&format!("l{i}_"), l), alphabet(&format!("r{i}_"), r), d, entry.clone()).boxed()
            })
            .collect::<Vec<_>>()
    })
}
