//! Tent map, its double cover and quotients; translation on compactified integers.

use std::f64::consts::TAU;

use super::settle_eps;
use crate::error::{Error, Result};
use crate::morphisms::{disjoint_union, pushforward, QuotientMap};
use crate::relation::Relation;
use crate::space::{FiniteSpace, SystemModel};

/// Grid index of `T(i/n)` for the tent map `T(t) = 1 - |1 - 2t|`.
fn tent_index(i: usize, n: usize) -> usize {
    if 2 * i <= n {
        2 * i
    } else {
        2 * (n - i)
    }
}

fn tent_targets(i: usize, n: usize) -> impl Iterator<Item = usize> {
    let k = tent_index(i, n);
    k.saturating_sub(1)..=(k + 1).min(n)
}

fn check_grid(n_grid: usize) -> Result<()> {
    if n_grid < 8 {
        return Err(Error::InvalidParameter(format!("grid size {n_grid} is below 8")));
    }
    Ok(())
}

/// Tent map on `{i/n_grid}`; each grid point maps to the grid points within one step of its
/// image.
pub fn tent_system(n_grid: usize) -> Result<SystemModel> {
    check_grid(n_grid)?;
    let n = n_grid;
    let space = FiniteSpace::from_coords((0..=n).map(|i| vec![i as f64 / n as f64]).collect())?;
    let rel = Relation::from_edges(n + 1, (0..=n).flat_map(|i| tent_targets(i, n).map(move |j| (i, j))))?;
    let eps = settle_eps(&space, 2.5 / n as f64);
    SystemModel::new("tent", space, rel, eps)
}

/// `[0,1] × {0,1}` with `(t,0) ↦ (t,1)` and `(t,1) ↦ (T(t),0)`. Point `(i/n, s)` has index
/// `s·(n+1) + i`.
pub fn double_cover(n_grid: usize) -> Result<SystemModel> {
    check_grid(n_grid)?;
    let n = n_grid;
    let m = n + 1;
    let coords = (0..2 * m).map(|p| vec![(p % m) as f64 / n as f64, (p / m) as f64]).collect();
    let space = FiniteSpace::from_coords(coords)?;
    let lift = (0..m).map(|i| (i, m + i));
    let fold = (0..m).flat_map(|i| tent_targets(i, n).map(move |j| (m + i, j)));
    let rel = Relation::from_edges(2 * m, lift.chain(fold))?;
    let eps = settle_eps(&space, 2.5 / n as f64);
    Ok(SystemModel::new("tent-double-cover", space, rel, eps)?
        .with_group("layer0", (0..m).collect())
        .with_group("layer1", (m..2 * m).collect()))
}

/// Assignment sending each glued group to one fiber and numbering fibers by first appearance.
fn glue(n: usize, groups: &[&[usize]]) -> Vec<usize> {
    let mut rep: Vec<usize> = (0..n).collect();
    for g in groups {
        for &p in &g[1..] {
            rep[p] = g[0];
        }
    }
    let mut id = vec![usize::MAX; n];
    let mut next = 0;
    let mut out = vec![0; n];
    for p in 0..n {
        let r = rep[p];
        if id[r] == usize::MAX {
            id[r] = next;
            next += 1;
        }
        out[p] = id[r];
    }
    out
}

fn quotient_of(cover: &SystemModel, name: &str, glued: &[usize]) -> Result<SystemModel> {
    let pi = QuotientMap::new(&cover.space, glue(cover.n(), &[glued]))?;
    let rel = pushforward(&pi, &cover.relation)?;
    let image = |g: &str| -> Vec<usize> {
        let mut v: Vec<usize> = cover.groups[g].iter().map(|&p| pi.apply(p)).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let (interval, circle) = (image("layer0"), image("layer1"));
    let space = pi.target().clone();
    let n = cover.n() as f64 / 2.0 - 1.0;
    let eps = settle_eps(&space, 2.5 / n);
    Ok(SystemModel::new(name, space, rel, eps)?.with_group("interval", interval).with_group("circle", circle))
}

/// Double cover with `(0,1) ~ (1,1)`: a circle and a disjoint interval.
pub fn quotient_x(n_grid: usize) -> Result<SystemModel> {
    let cover = double_cover(n_grid)?;
    let m = n_grid + 1;
    quotient_of(&cover, "tent-circle-interval", &[m, 2 * m - 1])
}

/// Double cover with `(0,0) ~ (0,1) ~ (1,1)`: a circle and an interval joined at a point.
pub fn quotient_x1(n_grid: usize) -> Result<SystemModel> {
    let cover = double_cover(n_grid)?;
    let m = n_grid + 1;
    quotient_of(&cover, "tent-wedge", &[0, m, 2 * m - 1])
}

/// Position of the integer `k` in `(0, 1)`: `1 - 1/(k+2)` for `k ≥ 0`, `1/(|k|+2)` below.
pub fn integer_position(k: i64) -> f64 {
    if k >= 0 {
        1.0 - 1.0 / (k as f64 + 2.0)
    } else {
        1.0 / (k.unsigned_abs() as f64 + 2.0)
    }
}

fn check_truncation(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!("truncation {n} is below 4")));
    }
    Ok(())
}

/// Translation edges on `-n..=n` (indices `0..=2n`), with `n` sent to `top`.
fn translation(n: usize, size: usize, top: usize) -> Result<Relation> {
    let last = 2 * n;
    Relation::from_edges(size, (0..=last).map(|i| (i, if i == last { top } else { i + 1 })).chain([(top, top)]))
}

/// Integers `-n..=n` wrapped on a circle of circumference 1 that closes up at `∞`, the
/// last point. The translation sends `n` and `∞` to `∞`.
pub fn z_star(n: usize) -> Result<SystemModel> {
    check_truncation(n)?;
    let r = 1.0 / TAU;
    let on_circle = |x: f64| vec![r * (TAU * x).cos(), r * (TAU * x).sin()];
    let mut coords: Vec<Vec<f64>> = (-(n as i64)..=n as i64).map(|k| on_circle(integer_position(k))).collect();
    coords.push(on_circle(0.0));
    let inf = 2 * n + 1;
    let space = FiniteSpace::from_coords(coords)?;
    let rel = translation(n, inf + 1, inf)?;
    let eps = settle_eps(&space, 0.2);
    Ok(SystemModel::new("z-star", space, rel, eps)?.with_group("infinity", vec![inf]))
}

/// Integers `-n..=n` on `[0,1]` with endpoints `-∞` (index `2n+1`) at 0 and `+∞` (index
/// `2n+2`) at 1, both fixed.
pub fn z_star_star(n: usize) -> Result<SystemModel> {
    check_truncation(n)?;
    let mut coords: Vec<Vec<f64>> = (-(n as i64)..=n as i64).map(|k| vec![integer_position(k)]).collect();
    coords.push(vec![0.0]);
    coords.push(vec![1.0]);
    let (minus, plus) = (2 * n + 1, 2 * n + 2);
    let space = FiniteSpace::from_coords(coords)?;
    let mut rel = translation(n, plus + 1, plus)?;
    rel.insert(minus, minus);
    let eps = settle_eps(&space, 0.2);
    Ok(SystemModel::new("z-star-star", space, rel, eps)?
        .with_group("minus_infinity", vec![minus])
        .with_group("plus_infinity", vec![plus]))
}

/// Two copies of [`z_star_star`] with their `+∞` points glued; the relation is the
/// translation on both copies.
pub fn two_z_star_star_quotient(n: usize) -> Result<SystemModel> {
    let one = z_star_star(n)?;
    let m = one.n();
    let union = disjoint_union(&one.space, &one.space)?;
    let plus = 2 * n + 2;
    let rel = Relation::from_edges(2 * m, one.relation.edges().flat_map(|(x, y)| [(x, y), (x + m, y + m)]))?;
    let pi = QuotientMap::new(&union, glue(2 * m, &[&[plus, plus + m]]))?;
    let rel = pushforward(&pi, &rel)?;
    let copy = |c: usize| -> Vec<usize> { (0..m).map(|p| pi.apply(p + c * m)).collect() };
    let (c0, c1) = (copy(0), copy(1));
    let space = pi.target().clone();
    let eps = settle_eps(&space, 0.2);
    Ok(SystemModel::new("z-star-star-pair", space, rel, eps)?
        .with_group("copy0", c0)
        .with_group("copy1", c1)
        .with_group("plus_infinity", vec![pi.apply(plus)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tent_grid_images_are_exact() {
        assert_eq!(tent_index(0, 8), 0);
        assert_eq!(tent_index(4, 8), 8);
        assert_eq!(tent_index(8, 8), 0);
        assert_eq!(tent_index(3, 9), 6);
        assert_eq!(tent_index(5, 9), 8);
    }

    #[test]
    fn small_grids_are_rejected() {
        assert!(tent_system(7).is_err());
        assert!(z_star(3).is_err());
    }

    #[test]
    fn glue_numbers_fibers_by_first_appearance() {
        assert_eq!(glue(5, &[&[3, 1]]), vec![0, 1, 2, 1, 3]);
        assert_eq!(glue(4, &[&[0, 2, 3]]), vec![0, 1, 0, 0]);
    }

    #[test]
    fn quotients_have_expected_sizes() {
        assert_eq!(quotient_x(8).unwrap().n(), 17);
        assert_eq!(quotient_x1(8).unwrap().n(), 16);
        assert_eq!(two_z_star_star_quotient(4).unwrap().n(), 21);
    }
}
