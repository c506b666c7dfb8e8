//! Seeded random spaces, relations and systems for randomized checks.

use crate::relation::Relation;
use crate::rng::SplitMix64;
use crate::space::{FiniteSpace, SystemModel};

/// Either `n` uniform points in the unit square or a shortest-path metric over random weights.
pub fn random_space(rng: &mut SplitMix64, n: usize) -> FiniteSpace {
    if rng.chance(0.5) {
        let coords = (0..n).map(|_| vec![rng.next_f64(), rng.next_f64()]).collect();
        FiniteSpace::from_coords(coords).expect("finite coordinates")
    } else {
        let mut d = vec![vec![0.0; n]; n];
        for x in 0..n {
            for y in x + 1..n {
                let w = 0.05 + rng.next_f64();
                d[x][y] = w;
                d[y][x] = w;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = d[i][k] + d[k][j];
                    if via < d[i][j] {
                        d[i][j] = via;
                    }
                }
            }
        }
        FiniteSpace::from_matrix(d).expect("shortest-path closure is a metric")
    }
}

pub fn random_relation(rng: &mut SplitMix64, n: usize, density: f64) -> Relation {
    Relation::from_fn(n, |_, _| rng.chance(density))
}

pub fn random_permutation(rng: &mut SplitMix64, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut p);
    p
}

/// A system with `1 ≤ n ≤ n_max` points, a relation of random density and a scale drawn
/// between zero and the diameter.
pub fn random_system(rng: &mut SplitMix64, n_max: usize) -> SystemModel {
    let n = rng.range(1, n_max);
    let space = random_space(rng, n);
    let density = 0.05 + 0.35 * rng.next_f64();
    let relation = random_relation(rng, n, density);
    let eps = space.diameter() * 0.6 * rng.next_f64();
    SystemModel::new("random", space, relation, eps).expect("dimensions agree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_system() {
        let a = random_system(&mut SplitMix64::new(11), 10);
        let b = random_system(&mut SplitMix64::new(11), 10);
        assert_eq!(a, b);
        assert!(a.n() >= 1 && a.n() <= 10);
    }
}
