//! Combs with a handle, combs with a queer tooth, and stacks of them.
//!
//! Teeth stand at `x_k` (the positions of [`integer_position`]) with heights `1/(|k|+1)` for
//! `|k| ≤ N`; the translation moves tooth `k` onto tooth `k+1` and each span between roots onto
//! the next span. Teeth beyond the truncation collapse onto their roots, which are kept as
//! samples of the base segment for `|k| ≤ N+1`.

use std::collections::BTreeMap;

use super::interval::integer_position;
use super::{cells, cells_meeting, settle_eps, subdivide};
use crate::error::{Error, Result};
use crate::relation::Relation;
use crate::space::{FiniteSpace, SystemModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Piece {
    Handle,
    Base,
    Tooth(i64),
    Bar(i64),
}

/// Sorted parameters of a piece and the sample index at each.
#[derive(Clone, Debug)]
struct Track {
    params: Vec<f64>,
    points: Vec<usize>,
}

/// Sampled planar comb.
#[derive(Clone, Debug)]
struct Comb {
    points: Vec<[f64; 2]>,
    tracks: BTreeMap<Piece, Track>,
    queer: Option<i64>,
    e_minus: usize,
    e0: usize,
    e1: usize,
}

fn tooth_height(k: i64) -> f64 {
    1.0 / (k.unsigned_abs() + 1) as f64
}

/// Ends of the queer bar at tooth `k`.
fn bar_ends(k: i64) -> (f64, f64) {
    let x = integer_position(k);
    (0.5 * (integer_position(k - 1) + x), 0.5 * (integer_position(k + 1) + x))
}

impl Comb {
    fn new(n: i64, queer: Option<i64>, step: f64) -> Comb {
        let mut points: Vec<[f64; 2]> = Vec::new();
        let mut tracks = BTreeMap::new();
        let mut base_x = vec![0.0, 1.0];
        base_x.extend((-n - 1..=n + 1).map(integer_position));
        base_x.sort_by(f64::total_cmp);
        let mut base_params = Vec::new();
        for w in base_x.windows(2) {
            let s = subdivide(w[1] - w[0], step);
            base_params.extend(s[..s.len() - 1].iter().map(|t| w[0] + t));
        }
        base_params.push(1.0);
        let base_points: Vec<usize> = (0..base_params.len()).collect();
        points.extend(base_params.iter().map(|&x| [x, 0.0]));
        let root = |x: f64| base_params.iter().position(|&b| b == x).expect("roots are base samples");
        let e0 = root(0.0);
        let e1 = root(1.0);

        let handle = subdivide(1.0, step);
        let mut handle_points = Vec::new();
        for &u in &handle[..handle.len() - 1] {
            handle_points.push(points.len());
            points.push([u - 1.0, 0.0]);
        }
        handle_points.push(e0);
        let e_minus = handle_points[0];
        tracks.insert(Piece::Handle, Track { params: handle.iter().map(|u| u - 1.0).collect(), points: handle_points });

        for k in -n..=n {
            let x = integer_position(k);
            let params = subdivide(tooth_height(k), step);
            let mut pts = vec![root(x)];
            for &t in &params[1..] {
                pts.push(points.len());
                points.push([x, t]);
            }
            tracks.insert(Piece::Tooth(k), Track { params, points: pts });
        }
        if let Some(q) = queer {
            let x = integer_position(q);
            let h = tooth_height(q);
            let top = *tracks[&Piece::Tooth(q)].points.last().expect("tooth has samples");
            let (l, r) = bar_ends(q);
            let left = subdivide(x - l, step);
            let right = subdivide(r - x, step);
            let mut params: Vec<f64> = left.iter().rev().map(|t| x - t).collect();
            params.extend(right[1..].iter().map(|t| x + t));
            let mut pts = Vec::new();
            for &p in &params {
                if p == x {
                    pts.push(top);
                } else {
                    pts.push(points.len());
                    points.push([p, h]);
                }
            }
            tracks.insert(Piece::Bar(q), Track { params, points: pts });
        }
        tracks.insert(Piece::Base, Track { params: base_params, points: base_points });
        Comb { points, tracks, queer, e_minus, e0, e1 }
    }

    fn base_root(&self, k: i64) -> usize {
        let x = integer_position(k);
        let t = &self.tracks[&Piece::Base];
        t.points[t.params.iter().position(|&b| b == x).expect("root is sampled")]
    }
}

/// The translation on the base segment: each span `[x_{k-1}, x_k]` onto `[x_k, x_{k+1}]`.
fn shift_base(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return x;
    }
    let k = if x >= 0.5 { (1.0 / (1.0 - x)).floor() as i64 - 1 } else { 2 - (1.0 / x).floor() as i64 };
    let (a, b) = (integer_position(k - 1), integer_position(k));
    let (c, d) = (integer_position(k), integer_position(k + 1));
    (c + (x - a) / (b - a) * (d - c)).clamp(c.min(d), c.max(d))
}

/// The queer bar at `k` onto the bar at `k+1`, linearly on each side of the tooth.
fn shift_bar(k: i64, x: f64) -> f64 {
    let (l, r) = bar_ends(k);
    let (l2, r2) = bar_ends(k + 1);
    let (c, c2) = (integer_position(k), integer_position(k + 1));
    if x <= c {
        l2 + (x - l) / (c - l) * (c2 - l2)
    } else {
        c2 + (x - c) / (r - c) * (r2 - c2)
    }
}

/// Cell-image edges of the translation from `src` into `dst`.
fn link(src: &Comb, dst: &Comb, src_off: usize, dst_off: usize, rel: &mut Relation) {
    let mut edge = |a: usize, b: usize| rel.insert(src_off + a, dst_off + b);
    for (&piece, track) in &src.tracks {
        let cs = cells(&track.params);
        let (target, map): (Option<Piece>, Box<dyn Fn(f64) -> f64>) = match piece {
            Piece::Handle => (Some(Piece::Handle), Box::new(|u| u)),
            Piece::Base => (Some(Piece::Base), Box::new(shift_base)),
            Piece::Tooth(k) => {
                let s = tooth_height(k + 1) / tooth_height(k);
                (Some(Piece::Tooth(k + 1)), Box::new(move |t| t * s))
            }
            Piece::Bar(k) => (Some(Piece::Bar(k + 1)), Box::new(move |x| shift_bar(k, x))),
        };
        match target.and_then(|t| dst.tracks.get(&t)) {
            Some(dt) => {
                for (i, &(lo, hi)) in cs.iter().enumerate() {
                    for j in cells_meeting(&dt.params, map(lo), map(hi)) {
                        edge(track.points[i], dt.points[j]);
                    }
                }
            }
            None => {
                let k = match piece {
                    Piece::Tooth(k) | Piece::Bar(k) => k,
                    _ => unreachable!("handle and base exist in every comb"),
                };
                let root = dst.base_root(k + 1);
                for &p in &track.points {
                    edge(p, root);
                }
            }
        }
    }
    // Pieces of dst whose preimage piece was truncated from src come from its root.
    for (&piece, track) in &dst.tracks {
        let pre = match piece {
            Piece::Tooth(k) => Piece::Tooth(k - 1),
            Piece::Bar(k) => Piece::Bar(k - 1),
            _ => continue,
        };
        if !src.tracks.contains_key(&pre) {
            let (Piece::Tooth(k) | Piece::Bar(k)) = piece else { unreachable!() };
            let root = src.base_root(k - 1);
            for &p in &track.points {
                edge(root, p);
            }
        }
    }
}

fn check_teeth(n_teeth: usize) -> Result<i64> {
    if !(4..=64).contains(&n_teeth) {
        return Err(Error::InvalidParameter(format!("tooth truncation {n_teeth} must lie in 4..=64")));
    }
    Ok(n_teeth as i64)
}

/// Sampling step of the comb generators.
pub fn comb_step(n_teeth: usize) -> f64 {
    1.0 / (4 * (n_teeth + 2)) as f64
}

fn planar_model(name: &str, c: &Comb, step: f64) -> Result<SystemModel> {
    let space = FiniteSpace::from_coords(c.points.iter().map(|p| p.to_vec()).collect())?;
    let mut rel = Relation::empty(c.points.len());
    link(c, c, 0, 0, &mut rel);
    let eps = settle_eps(&space, 1.5 * step);
    let teeth: Vec<usize> = c
        .tracks
        .iter()
        .filter(|(p, _)| matches!(p, Piece::Tooth(_)))
        .map(|(_, t)| *t.points.last().expect("nonempty"))
        .collect();
    let mut sys = SystemModel::new(name, space, rel, eps)?
        .with_group("e_minus", vec![c.e_minus])
        .with_group("e0", vec![c.e0])
        .with_group("e1", vec![c.e1])
        .with_group("tooth_tops", teeth);
    if let Some(q) = c.queer {
        sys = sys.with_group("queer_bar", c.tracks[&Piece::Bar(q)].points.clone());
    }
    Ok(sys)
}

/// The comb `C` with teeth `|k| ≤ N` and the translation.
pub fn comb(n_teeth: usize) -> Result<SystemModel> {
    let n = check_teeth(n_teeth)?;
    let step = comb_step(n_teeth);
    planar_model("comb", &Comb::new(n, None, step), step)
}

/// The comb with a queer tooth at `q`; the relation sends it into the comb with the queer
/// tooth at `q+1`, so only the identity is kept here.
pub fn queer_comb(n_teeth: usize, q: i64) -> Result<SystemModel> {
    let n = check_teeth(n_teeth)?;
    if q.abs() > n {
        return Err(Error::InvalidParameter(format!("queer tooth {q} beyond truncation {n}")));
    }
    let step = comb_step(n_teeth);
    let mut sys = planar_model("queer-comb", &Comb::new(n, Some(q), step), step)?;
    sys.relation = Relation::identity(sys.n());
    Ok(sys)
}

/// The comb, the two-sided stack and the one-sided stack.
#[derive(Clone, Debug)]
pub struct CombFamily {
    pub comb: SystemModel,
    /// `C × {0}`, `C_k × {x_k}` for `|k| ≤ N`, `C × {1}`, translated layer to layer.
    pub stack: SystemModel,
    /// `C × {1}` and `C_k × {x_k}` for `0 ≤ k ≤ N`, identity relation.
    pub stack_plus: SystemModel,
}

fn stack_space(layers: &[(&Comb, f64)]) -> Result<(FiniteSpace, Vec<usize>)> {
    let mut coords = Vec::new();
    let mut offsets = Vec::new();
    for (c, z) in layers {
        offsets.push(coords.len());
        coords.extend(c.points.iter().map(|p| vec![p[0], p[1], *z]));
    }
    Ok((FiniteSpace::from_coords(coords)?, offsets))
}

pub fn comb_family(n_teeth: usize) -> Result<CombFamily> {
    let n = check_teeth(n_teeth)?;
    let step = comb_step(n_teeth);
    let plain = Comb::new(n, None, step);
    let queer: Vec<Comb> = (-n..=n).map(|k| Comb::new(n, Some(k), step)).collect();
    let comb = planar_model("comb", &plain, step)?;

    let mut layers: Vec<(&Comb, f64)> = vec![(&plain, 0.0)];
    layers.extend(queer.iter().zip(-n..=n).map(|(c, k)| (c, integer_position(k))));
    layers.push((&plain, 1.0));
    let (space, off) = stack_space(&layers)?;
    let last = layers.len() - 1;
    let mut rel = Relation::empty(space.n());
    link(&plain, &plain, off[0], off[0], &mut rel);
    for i in 0..last {
        link(layers[i].0, layers[i + 1].0, off[i], off[i + 1], &mut rel);
    }
    link(&plain, &plain, off[last], off[last], &mut rel);
    let span = |i: usize| (off[i]..off[i] + layers[i].0.points.len()).collect::<Vec<_>>();
    let eps = settle_eps(&space, 1.5 * step);
    let stack = SystemModel::new("comb-stack", space, rel, eps)?
        .with_group("bottom", span(0))
        .with_group("top", span(last))
        .with_group("middle", span(n as usize + 1));

    let mut plus: Vec<(&Comb, f64)> = vec![(&plain, 1.0)];
    plus.extend(queer[n as usize..].iter().zip(0..=n).map(|(c, k)| (c, integer_position(k))));
    let (space, off) = stack_space(&plus)?;
    let top: Vec<usize> = (0..off[1]).collect();
    let eps = settle_eps(&space, 1.5 * step);
    let stack_plus =
        SystemModel::new("comb-stack-plus", space.clone(), Relation::identity(space.n()), eps)?.with_group("top", top);
    Ok(CombFamily { comb, stack, stack_plus })
}
