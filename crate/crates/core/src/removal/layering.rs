use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{input, Result};

use super::config::{RemovalConfig, Role};
use super::uw::RemovalOutcome;

/// Result of restricting a removal's revealed parity sets to
/// `Σ = binom(W, 2) ∪ S(A ∪ U, W_#)` and ordering them into a layered sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayeringReport {
    /// `|Σ|`.
    pub sigma_size: usize,
    /// Stars `S(u, W_#)` for `u` in `A` and the processed part of `U`.
    pub reserve_stars: usize,
    /// Sets `Q_0(w)`.
    pub base_sets: usize,
    /// Sets `Q_t(w)` with `t >= 1`.
    pub layer_sets: usize,
    /// Length of the whole sequence.
    pub sequence_len: usize,
    /// Exact layering number of the sequence.
    pub layering: usize,
    /// Smallest certificate: `S(w, W_#)` for each `Q_0(w)`, the set itself for
    /// each `Q_t(w)`, `S(u, W_#)` for the reserve stars and `binom(W_#, 2)` for `Σ`.
    pub min_certificate: usize,
    /// `min(s, |W_#|)`.
    pub required: usize,
    pub holds: bool,
}

/// Pair `{u, v}` as an index into an `n * n` bit table.
#[inline]
fn pair(u: usize, v: usize, n: usize) -> usize {
    u.min(v) * n + u.max(v)
}

/// Rebuilds the layered sequence behind a removal transcript and measures it.
///
/// The parity sets revealed about `Σ` are `Σ` itself (from the edge-count
/// parity), the stars `S(u, W_#)` for `u` in `A ∪ U` and, for each probed
/// `w`, nested stars `Q'_0(w) ⊆ Q'_1(w) ⊆ ...` into `W`. These are replaced
/// by the differences `Q_t(w) = Q'_t(w) \ Q'_{t-1}(w)` (an invertible change
/// over F2) and ordered as: `Σ`, the reserve stars, all `Q_0(w)` by ascending
/// `w`, then all `Q_t(w)` by ascending `(t, w)`.
pub fn analyze_transcript_layering(out: &RemovalOutcome, cfg: &RemovalConfig, n: usize) -> Result<LayeringReport> {
    let roles = cfg.roles(n)?;
    let s = cfg.s();
    let t = &out.transcript;
    let w_set: Vec<usize> = cfg.w_vertices();
    let reserve = &cfg.w_reserve;

    // Position of each removed W vertex in the W-removal order (1-based), and
    // the number of W removals before each prefix length.
    let mut w_order = Vec::new();
    let mut w_before = Vec::with_capacity(out.removed.len() + 1);
    w_before.push(0usize);
    for &v in &out.removed {
        if v >= n {
            return input(format!("removed vertex {v} outside 0..{n}"));
        }
        if matches!(roles[v], Role::Reserve | Role::Block(_)) {
            w_order.push(v);
        }
        w_before.push(w_order.len());
    }

    let mut r_pos = vec![usize::MAX; n];
    for (i, &v) in out.removed.iter().enumerate() {
        r_pos[v] = i;
    }
    let mut w_pos = vec![usize::MAX; n];
    for (i, &v) in w_order.iter().enumerate() {
        w_pos[v] = i + 1;
    }

    // q' value of every star revealed about a W vertex, grouped by centre.
    let mut probes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for star in &t.partner_stars {
        let Role::Block(j) = roles.get(star.center).copied().unwrap_or(Role::Revealed) else {
            return input(format!("partner star centred at {} outside the probed blocks", star.center));
        };
        if star.prefix > out.removed.len() || r_pos[star.center] < star.prefix {
            return input(format!("partner star at {} taken after its removal", star.center));
        }
        let q = w_before[star.prefix] + 1;
        if (q - 1) % s + 1 != j {
            return input(format!("vertex {} of block {j} probed at q = {q}", star.center));
        }
        probes.entry(star.center).or_default().push(q);
    }

    // Q_0(w) = S(w, W \ {w_1..w_{m-1}}), Q_t(w) = {w, w_i} for i in [m - ts, m - (t-1)s - 1].
    let mut base_sets: Vec<Vec<usize>> = Vec::new();
    let mut layer_sets: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    let mut min_certificate = usize::MAX;
    for (&w, qs) in probes.iter_mut() {
        qs.sort_unstable_by(|a, b| b.cmp(a));
        let m = qs[0];
        for (k, &q) in qs.iter().enumerate() {
            if q + k * s != m {
                return input(format!("stars at {w} are not nested at stride s"));
            }
        }
        if *qs.last().unwrap() > s {
            return input(format!("block of {w} skipped before q = {}", qs.last().unwrap()));
        }
        let q0: Vec<usize> = w_set.iter().filter(|&&x| x != w && w_pos[x] >= m).map(|&x| pair(w, x, n)).collect();
        min_certificate = min_certificate.min(reserve.iter().filter(|&&x| x != w).count());
        base_sets.push(q0);
        for tt in 1..qs.len() {
            let lo = m - tt * s;
            let hi = m - (tt - 1) * s - 1;
            let set: Vec<usize> = w_order[lo - 1..hi].iter().filter(|&&x| x != w).map(|&x| pair(w, x, n)).collect();
            min_certificate = min_certificate.min(set.len());
            layer_sets.insert((tt, w), set);
        }
    }

    let front: Vec<usize> = cfg.revelation.a.iter().copied().chain(t.front_stars.iter().map(|r| r.center)).collect();
    let reserve_stars: Vec<Vec<usize>> =
        front.iter().map(|&u| reserve.iter().map(|&x| pair(u, x, n)).collect()).collect();
    if !reserve_stars.is_empty() {
        min_certificate = min_certificate.min(reserve.len());
    }

    let mut sigma: Vec<usize> = Vec::new();
    for (i, &x) in w_set.iter().enumerate() {
        for &y in &w_set[i + 1..] {
            sigma.push(pair(x, y, n));
        }
    }
    for &u in cfg.revelation.a.iter().chain(&cfg.u) {
        sigma.extend(reserve.iter().map(|&x| pair(u, x, n)));
    }
    min_certificate = min_certificate.min(reserve.len() * reserve.len().saturating_sub(1) / 2);

    let mut sequence: Vec<&Vec<usize>> = vec![&sigma];
    sequence.extend(reserve_stars.iter());
    sequence.extend(base_sets.iter());
    sequence.extend(layer_sets.values());

    // layering = min over all but the last set of |A_j \ (A_{j+1} ∪ ...)|.
    let mut later = vec![0u64; (n * n).div_ceil(64)];
    let mut layering = usize::MAX;
    for (idx, set) in sequence.iter().enumerate().rev() {
        if idx + 1 < sequence.len() {
            let fresh = set.iter().filter(|&&e| later[e / 64] >> (e % 64) & 1 == 0).count();
            layering = layering.min(fresh);
        }
        for &e in set.iter() {
            later[e / 64] |= 1 << (e % 64);
        }
    }
    if sequence.len() == 1 {
        layering = sigma.len() + 1;
    }
    let required = s.min(reserve.len());
    Ok(LayeringReport {
        sigma_size: sigma.len(),
        reserve_stars: reserve_stars.len(),
        base_sets: base_sets.len(),
        layer_sets: layer_sets.len(),
        sequence_len: sequence.len(),
        layering,
        min_certificate,
        required,
        holds: layering >= required,
    })
}
