//! Oscillating segments and the suspension of the full two-shift.

use super::settle_eps;
use crate::error::{Error, Result};
use crate::relation::Relation;
use crate::space::{FiniteSpace, SystemModel};

fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// Zigzags `X_m = {(1/m, s, t_m(s))}` for `1 ≤ m ≤ n` and the segment `X_∞ = {(0, 0, t)}`.
///
/// `t_m` alternates between 0 and 1 at the breakpoints `i/(m·(2m)!)` and is linear in
/// between. Each monotone piece is split into equal parts of height at most `ε/2`, where
/// `ε` is a third of the smallest gap `1/(n(n-1))` between zigzags. The relation is the
/// identity.
pub fn oscillating_segments(n: usize) -> Result<SystemModel> {
    oscillating_segments_refined(n, 1)
}

/// [`oscillating_segments`] with `refine` times as many samples on every monotone piece.
pub fn oscillating_segments_refined(n: usize, refine: usize) -> Result<SystemModel> {
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!("oscillating segments need 2 ≤ n ≤ 3, got {n}")));
    }
    if refine == 0 {
        return Err(Error::InvalidParameter("refinement factor must be positive".into()));
    }
    let eps_target = 1.0 / (3 * n * (n - 1)) as f64;
    let parts = refine * (2.0 / eps_target).ceil() as usize;
    let mut coords: Vec<Vec<f64>> = Vec::new();
    let mut groups = Vec::new();
    for m in 1..=n {
        let start = coords.len();
        let pieces = factorial(2 * m);
        let width = 1.0 / (m * pieces) as f64;
        let x = 1.0 / m as f64;
        coords.push(vec![x, 0.0, 0.0]);
        for i in 0..pieces {
            let rising = i % 2 == 0;
            for p in 1..=parts {
                let f = p as f64 / parts as f64;
                let s = if i + 1 == pieces && p == parts { x } else { (i as f64 + f) * width };
                coords.push(vec![x, s, if rising { f } else { 1.0 - f }]);
            }
        }
        groups.push((format!("x{m}"), (start..coords.len()).collect::<Vec<_>>()));
    }
    let start = coords.len();
    coords.extend((0..=parts).map(|p| vec![0.0, 0.0, p as f64 / parts as f64]));
    groups.push(("x_inf".to_string(), (start..coords.len()).collect()));
    let total = coords.len();
    let space = FiniteSpace::from_coords(coords)?;
    let eps = settle_eps(&space, eps_target);
    let mut sys = SystemModel::new("oscillating-segments", space, Relation::identity(total), eps)?;
    for (name, pts) in groups {
        sys = sys.with_group(name, pts);
    }
    Ok(sys)
}

/// Largest number of suspension states.
pub const SUSPENSION_LIMIT: usize = 1024;

/// Length of the longest centred block on which the known symbols agree, capped at `cap`.
fn agreement(sym: impl Fn(i64) -> (Option<bool>, Option<bool>), cap: i64) -> i64 {
    let mut a = 0;
    while a < cap {
        let k = a + 1;
        let ok = [-k, k - 1].iter().all(|&p| matches!(sym(p), (Some(u), Some(v)) if u == v));
        if !ok {
            break;
        }
        a = k;
    }
    a
}

/// Time-`τ` map of the suspension flow over the full two-shift, on states `(w, j)`: a word
/// `w` on positions `-depth..depth` and a time `j/time_steps`.
///
/// The advanced time is bracketed by the neighbouring grid times; symbols shifted in from
/// beyond the window are free. The metric is the shortest-path closure of
/// `max(2^-a, |s - s'|)` within one time sheet and the same across the seam
/// `(w, 1) ~ (g w, 0)`, where `a` is the length of agreement around the origin.
pub fn suspension_shift(depth: usize, time_steps: usize, tau: f64) -> Result<SystemModel> {
    if depth < 2 || time_steps < 4 {
        return Err(Error::InvalidParameter("need depth ≥ 2 and time_steps ≥ 4".into()));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidParameter(format!("tau {tau} outside (0, 1]")));
    }
    let len = 2 * depth;
    let words = 1usize.checked_shl(len as u32).unwrap_or(usize::MAX);
    let total = words.saturating_mul(time_steps);
    if total > SUSPENSION_LIMIT {
        return Err(Error::InvalidParameter(format!("{total} states exceed {SUSPENSION_LIMIT}")));
    }
    let d = depth as i64;
    let t = time_steps;
    let bit = |w: usize, p: i64| -> Option<bool> { (-d..d).contains(&p).then(|| (w >> (p + d)) & 1 == 1) };
    let state = |w: usize, j: usize| w * t + j;

    let mut rel = Relation::empty(total);
    for w in 0..words {
        for j in 0..t {
            let s = j as f64 + tau * t as f64;
            let near = s.round();
            let times: Vec<i64> =
                if (s - near).abs() < 1e-9 { vec![near as i64] } else { vec![s.floor() as i64, s.ceil() as i64] };
            for c in times {
                let k = c.div_euclid(t as i64);
                let jj = c.rem_euclid(t as i64) as usize;
                // Positions of the shifted word whose symbol is known.
                let mut fixed = 0usize;
                let mut value = 0usize;
                for p in -d..d {
                    if let Some(b) = bit(w, p + k) {
                        fixed |= 1 << (p + d);
                        value |= (b as usize) << (p + d);
                    }
                }
                for v in 0..words {
                    if v & fixed == value {
                        rel.insert(state(w, j), state(v, jj));
                    }
                }
            }
        }
    }

    let inf = f64::INFINITY;
    let mut dist = vec![vec![inf; total]; total];
    for w in 0..words {
        for v in 0..words {
            let direct = if w == v { 0.0 } else { 2f64.powi(-agreement(|p| (bit(w, p), bit(v, p)), d) as i32) };
            let seam = 2f64.powi(-agreement(|p| (bit(w, p + 1), bit(v, p)), d - 1) as i32);
            for j in 0..t {
                for i in 0..t {
                    let (sj, si) = (j as f64 / t as f64, i as f64 / t as f64);
                    let mut best = direct.max((sj - si).abs());
                    // (w, sj) runs forward through the seam into (v, si).
                    best = best.min(seam.max(1.0 - sj + si));
                    let (a, b) = (state(w, j), state(v, i));
                    dist[a][b] = dist[a][b].min(best);
                    dist[b][a] = dist[b][a].min(best);
                }
            }
        }
    }
    for k in 0..total {
        for i in 0..total {
            let dik = dist[i][k];
            for j in 0..total {
                let via = dik + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
    let space = FiniteSpace::from_matrix(dist)?;
    let eps = settle_eps(&space, 2.0 * (0.5f64.powi(depth as i32)).max(1.0 / t as f64));
    SystemModel::new("suspension-shift", space, rel, eps)
        .map(|s| s.with_group("time_zero", (0..words).map(|w| state(w, 0)).collect()))
}
