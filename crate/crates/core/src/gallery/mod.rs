//! Parametric example systems: interval maps, translations on compactified integers, chain
//! extensions by isolated points, combs, brushes, oscillating segments and a suspended shift.
//!
//! Continuous maps become relations by cell-image over-approximation: each sample point is
//! sent to every sample whose cell meets the image of its own cell. Every generator stores a
//! suggested scale in [`SystemModel::eps`] that stays at least [`EPS_MARGIN`] away from every
//! pairwise distance.

mod comb;
mod extension;
mod interval;
mod other;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::space::FiniteSpace;
use crate::space::SystemModel;
use crate::symmetry::ToleranceGraph;

pub use comb::{comb, comb_family, comb_step, queer_comb, CombFamily};
pub use extension::{cantor_brush, cantor_brush_slab, cantor_brush_squaring, cantor_gap_extension, point_extension};
pub use interval::{double_cover, quotient_x, quotient_x1, tent_system, two_z_star_star_quotient, z_star, z_star_star};
pub use other::{oscillating_segments, oscillating_segments_refined, suspension_shift};

/// Minimum gap kept between a suggested scale and every pairwise distance.
pub const EPS_MARGIN: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: f64,
    pub integer: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GallerySpec {
    pub name: &'static str,
    pub params: Vec<ParamSpec>,
    pub summary: &'static str,
}

fn int(name: &'static str, default: usize) -> ParamSpec {
    ParamSpec { name, default: default as f64, integer: true }
}

fn real(name: &'static str, default: f64) -> ParamSpec {
    ParamSpec { name, default, integer: false }
}

/// Every generator with its parameters and defaults.
pub fn catalog() -> Vec<GallerySpec> {
    vec![
        GallerySpec { name: "tent", params: vec![int("n_grid", 256)], summary: "tent map on a uniform grid of [0,1]" },
        GallerySpec {
            name: "tent-double-cover",
            params: vec![int("n_grid", 64)],
            summary: "two copies of [0,1]; layer 0 lifts to layer 1, layer 1 folds back by the tent map",
        },
        GallerySpec {
            name: "tent-circle-interval",
            params: vec![int("n_grid", 64)],
            summary: "double cover with the ends of layer 1 glued: a circle and an interval",
        },
        GallerySpec {
            name: "tent-wedge",
            params: vec![int("n_grid", 64)],
            summary: "double cover with (0,0), (0,1) and (1,1) glued: circle and interval joined at a point",
        },
        GallerySpec {
            name: "z-star",
            params: vec![int("n", 20)],
            summary: "translation on the integers compactified by one point",
        },
        GallerySpec {
            name: "z-star-star",
            params: vec![int("n", 20)],
            summary: "translation on the integers compactified by two endpoints",
        },
        GallerySpec {
            name: "z-star-star-pair",
            params: vec![int("n", 20)],
            summary: "two copies of the two-point compactification with their +∞ points glued",
        },
        GallerySpec {
            name: "point-extension",
            params: vec![int("n_grid", 64), int("chain_len", 0)],
            summary: "tent map extended by isolated points following a closed chain through an ε-net",
        },
        GallerySpec {
            name: "cantor-gaps",
            params: vec![int("depth", 4), int("m_max", 6)],
            summary: "identity on a Cantor set with isolated points above each gap, walked in up/down paths",
        },
        GallerySpec {
            name: "comb",
            params: vec![int("n_teeth", 6)],
            summary: "comb with handle, the translation moving each tooth to the next",
        },
        GallerySpec {
            name: "comb-stack",
            params: vec![int("n_teeth", 8)],
            summary: "combs with a shifted queer tooth stacked between two limit combs, translated layer to layer",
        },
        GallerySpec {
            name: "comb-stack-plus",
            params: vec![int("n_teeth", 5)],
            summary: "one-sided stack of queer combs over the upper limit comb, identity relation",
        },
        GallerySpec {
            name: "cantor-brush",
            params: vec![int("n", 8), int("bristle_samples", 8)],
            summary: "Cantor base cycled by a permutation, bristles carried along linearly",
        },
        GallerySpec {
            name: "cantor-brush-squaring",
            params: vec![int("n", 16), int("bristle_samples", 32)],
            summary: "as cantor-brush, with one fixed bristle moved by t ↦ t²",
        },
        GallerySpec {
            name: "cantor-brush-slab",
            params: vec![int("n", 8), int("bristle_samples", 4)],
            summary: "bristles over the left half of the Cantor base on top of a slab, identity relation",
        },
        GallerySpec {
            name: "oscillating-segments",
            params: vec![int("n", 3)],
            summary: "zigzag graphs with factorially many oscillations accumulating on a segment, identity relation",
        },
        GallerySpec {
            name: "suspension-shift",
            params: vec![int("depth", 2), int("time_steps", 4), real("tau", 0.25)],
            summary: "time-τ map of the suspension of the full two-shift on central words",
        },
    ]
}

/// Builds the named generator; missing parameters take their defaults.
pub fn build(name: &str, params: &BTreeMap<String, f64>) -> Result<SystemModel> {
    let spec = catalog()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown gallery entry {name}")))?;
    if let Some(bad) = params.keys().find(|k| !spec.params.iter().any(|p| p.name == k.as_str())) {
        return Err(Error::InvalidParameter(format!("{name} has no parameter {bad}")));
    }
    let mut values = BTreeMap::new();
    for p in &spec.params {
        let v = params.get(p.name).copied().unwrap_or(p.default);
        if p.integer && (v < 0.0 || v.fract() != 0.0 || !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("{} must be a nonnegative integer", p.name)));
        }
        values.insert(p.name, v);
    }
    let u = |k: &str| values[k] as usize;
    match name {
        "tent" => tent_system(u("n_grid")),
        "tent-double-cover" => double_cover(u("n_grid")),
        "tent-circle-interval" => quotient_x(u("n_grid")),
        "tent-wedge" => quotient_x1(u("n_grid")),
        "z-star" => z_star(u("n")),
        "z-star-star" => z_star_star(u("n")),
        "z-star-star-pair" => two_z_star_star_quotient(u("n")),
        "point-extension" => {
            let len = u("chain_len");
            point_extension(&tent_system(u("n_grid"))?, (len > 0).then_some(len))
        }
        "cantor-gaps" => cantor_gap_extension(u("depth"), u("m_max")),
        "comb" => comb(u("n_teeth")),
        "comb-stack" => Ok(comb_family(u("n_teeth"))?.stack),
        "comb-stack-plus" => Ok(comb_family(u("n_teeth"))?.stack_plus),
        "cantor-brush" => cantor_brush(u("n"), u("bristle_samples")),
        "cantor-brush-squaring" => cantor_brush_squaring(u("n"), u("bristle_samples")),
        "cantor-brush-slab" => cantor_brush_slab(u("n"), u("bristle_samples")),
        "oscillating-segments" => oscillating_segments(u("n")),
        "suspension-shift" => suspension_shift(u("depth"), u("time_steps"), values["tau"]),
        _ => unreachable!("catalog and dispatch disagree on {name}"),
    }
}

/// Smallest `|d - eps|` over pairwise distances `d` within `2·EPS_MARGIN` of `eps`, or
/// infinity if there are none.
pub fn near_tie(space: &FiniteSpace, eps: f64) -> f64 {
    let g = ToleranceGraph::from_space(space, eps + 2.0 * EPS_MARGIN).expect("nonnegative scale");
    let mut best = f64::INFINITY;
    for x in 0..g.n() {
        for &y in g.neighbors(x) {
            best = best.min((space.distance(x, y) - eps).abs());
        }
    }
    best
}

/// Smallest scale `≥ eps` that clears every pairwise distance by [`EPS_MARGIN`].
pub fn settle_eps(space: &FiniteSpace, eps: f64) -> f64 {
    let mut window = 1e-4_f64.max(eps * 1e-3);
    loop {
        let g = ToleranceGraph::from_space(space, eps + window).expect("nonnegative scale");
        let mut near: Vec<f64> = (0..g.n())
            .flat_map(|x| g.neighbors(x).iter().filter(move |&&y| y > x).map(move |&y| space.distance(x, y)))
            .filter(|&d| d > eps - EPS_MARGIN)
            .collect();
        near.sort_by(f64::total_cmp);
        let mut cand = eps;
        for d in near {
            if d >= cand + EPS_MARGIN {
                break;
            }
            cand = d + 1.5 * EPS_MARGIN;
        }
        if cand + EPS_MARGIN <= eps + window {
            return cand;
        }
        window *= 4.0;
    }
}

/// Sample parameters of a segment `[0, len]` split into `ceil(len/step)` equal parts.
fn subdivide(len: f64, step: f64) -> Vec<f64> {
    let k = ((len / step).ceil() as usize).max(1);
    (0..=k).map(|i| len * i as f64 / k as f64).collect()
}

/// Cells of sorted 1-d samples: each sample owns the half-way points to its neighbours.
fn cells(samples: &[f64]) -> Vec<(f64, f64)> {
    let n = samples.len();
    (0..n)
        .map(|i| {
            let lo = if i == 0 { samples[0] } else { 0.5 * (samples[i - 1] + samples[i]) };
            let hi = if i + 1 == n { samples[n - 1] } else { 0.5 * (samples[i] + samples[i + 1]) };
            (lo, hi)
        })
        .collect()
}

/// Indices of the samples whose cells meet the interval `[lo, hi]`; at least the nearest one.
fn cells_meeting(samples: &[f64], lo: f64, hi: f64) -> Vec<usize> {
    let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let cs = cells(samples);
    let hit: Vec<usize> = (0..samples.len()).filter(|&i| cs[i].0 <= hi && cs[i].1 >= lo).collect();
    if !hit.is_empty() {
        return hit;
    }
    let mid = 0.5 * (lo + hi);
    let nearest = (0..samples.len())
        .min_by(|&a, &b| (samples[a] - mid).abs().total_cmp(&(samples[b] - mid).abs()))
        .expect("nonempty samples");
    vec![nearest]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_cover_the_sample_range() {
        let s = [0.0, 0.5, 2.0];
        assert_eq!(cells(&s), vec![(0.0, 0.25), (0.25, 1.25), (1.25, 2.0)]);
        assert_eq!(cells_meeting(&s, 0.3, 0.3), vec![1]);
        assert_eq!(cells_meeting(&s, 1.0, 1.5), vec![1, 2]);
        assert_eq!(cells_meeting(&s, 5.0, 6.0), vec![2]);
    }

    #[test]
    fn subdivision_respects_step() {
        let s = subdivide(1.0, 0.3);
        assert_eq!(s.len(), 5);
        assert!(s.windows(2).all(|w| w[1] - w[0] <= 0.3));
    }

    #[test]
    fn settled_scale_clears_all_distances() {
        let space = FiniteSpace::from_coords(vec![vec![0.0], vec![0.1], vec![0.3]]).unwrap();
        let e = settle_eps(&space, 0.2);
        assert!(space.scale_margin(e) >= EPS_MARGIN);
        assert!(e - 0.2 < 1e-5);
    }

    #[test]
    fn build_rejects_unknown_names_and_params() {
        assert!(build("nope", &BTreeMap::new()).is_err());
        let p = BTreeMap::from([("bogus".to_string(), 1.0)]);
        assert!(build("tent", &p).is_err());
        let p = BTreeMap::from([("n_grid".to_string(), 8.5)]);
        assert!(build("tent", &p).is_err());
    }

    #[test]
    fn every_default_entry_builds_with_a_clear_scale() {
        for spec in catalog() {
            if spec.name == "oscillating-segments" {
                continue;
            }
            let sys = build(spec.name, &BTreeMap::new()).unwrap();
            sys.validate().unwrap();
            assert!(near_tie(&sys.space, sys.eps) >= EPS_MARGIN, "{}", spec.name);
        }
    }
}
