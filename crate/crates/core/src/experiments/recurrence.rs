use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};

/// Parameters of the bound iteration
/// `f(n) = e^{-K n^{1/2-alpha}} + max over n' in [n/4 - cn, n/4 + cn] of f(n')^2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RecurrenceParams {
    /// Decay constant `K` of the additive term.
    #[serde(rename = "K")]
    pub k: f64,
    pub alpha: f64,
    /// Half-width of the recursion window as a fraction of `n`.
    pub c: f64,
    /// `epsilon`: bound on `f` over the base window `[n0, M]`.
    pub base_bound: f64,
    /// First `n` of the base window.
    #[serde(default = "default_n0")]
    pub n0: usize,
    /// Override of the induction constant; by default
    /// `K0 = ln(1/epsilon) / M^{1/2-alpha}` for the least admissible `M`.
    #[serde(default, rename = "K0", skip_serializing_if = "Option::is_none")]
    pub k0: Option<f64>,
    /// Individual base values (each at most `base_bound`) inside `[n0, M]`;
    /// other base entries are `base_bound`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub base_values: BTreeMap<usize, f64>,
}

fn default_n0() -> usize {
    1
}

impl RecurrenceParams {
    /// `zeta = 2 (1/4 - c)^{1/2-alpha} - 1`.
    pub fn zeta(&self) -> f64 {
        2.0 * (0.25 - self.c).powf(0.5 - self.alpha) - 1.0
    }

    fn exponent(&self) -> f64 {
        0.5 - self.alpha
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum RecurrenceStatus {
    /// `f(n) <= e^{-K0 n^{1/2-alpha}}` for every `n0 <= n <= horizon`.
    Verified,
    Violated {
        first_n: usize,
    },
    /// The induction's side conditions fail; no iteration was run.
    Inapplicable {
        reason: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub n: usize,
    /// `ln f(n)`.
    pub log_f: f64,
    /// `-K0 n^{1/2-alpha}`.
    pub log_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceOutcome {
    pub zeta: f64,
    /// `epsilon + epsilon^zeta`, which must stay below 1.
    pub margin: f64,
    pub k0: f64,
    /// End of the base window.
    pub m: usize,
    pub horizon: usize,
    pub status: RecurrenceStatus,
    /// Largest `ln f(n) - ln bound(n)` over `M < n <= horizon` (at most 0 when verified).
    pub worst_log_gap: f64,
    /// Rows at roughly log-spaced `n`, plus `M`, the horizon and the first violation.
    pub table: Vec<BoundRow>,
}

/// `ln(e^a + e^b)` without overflow.
fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

/// Integer window `[ceil((1/4 - c) n), floor((1/4 + c) n)]`.
fn window(n: usize, c: f64) -> (usize, usize) {
    let x = n as f64;
    (((0.25 - c) * x).ceil() as usize, ((0.25 + c) * x).floor() as usize)
}

/// Iterates the bound recurrence up to `horizon` in the log domain and checks
/// it against `e^{-K0 n^{1/2-alpha}}`.
///
/// Construction: with `epsilon` the base bound, `M` is the least integer with
/// `ln(1/epsilon) / M^{1/2-alpha} < K/2` and `(1/4 - c) M > n0`, and
/// `K0 = ln(1/epsilon) / M^{1/2-alpha}` (or the override, with `M` chosen so
/// that `e^{-K0 M^{1/2-alpha}} <= epsilon`). `f` equals the base values on
/// `[n0, M]` and follows the recurrence after, with the window maximum kept by
/// a monotone deque (both window ends are non-decreasing in `n`).
///
/// Fails with an input error when `zeta <= 0`. Reports `Inapplicable` when
/// `epsilon + epsilon^zeta >= 1`, when `K0 >= K/2` or when a base value
/// exceeds `epsilon`.
// `!(x > 0.0)` also rejects NaN.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn solve_recurrence(params: &RecurrenceParams, horizon: usize) -> Result<RecurrenceOutcome> {
    let zeta = params.zeta();
    if !(params.alpha > 0.0 && params.alpha < 0.5) {
        return input(format!("alpha must lie in (0, 1/2), got {}", params.alpha));
    }
    if !(params.c > 0.0) || zeta <= 0.0 || !zeta.is_finite() {
        return input(format!("need 0 < c with zeta > 0; c = {} gives zeta = {zeta:.5}", params.c));
    }
    if !(params.k > 0.0) {
        return input("K must be positive");
    }
    let eps = params.base_bound;
    if !(eps > 0.0 && eps < 1.0) {
        return input(format!("base bound must lie in (0, 1), got {eps}"));
    }
    let e = params.exponent();
    let margin = eps + eps.powf(zeta);
    let ln_inv = (1.0 / eps).ln();
    let inapplicable = |reason: String, k0: f64, m: usize| RecurrenceOutcome {
        zeta,
        margin,
        k0,
        m,
        horizon,
        status: RecurrenceStatus::Inapplicable { reason },
        worst_log_gap: f64::NAN,
        table: Vec::new(),
    };
    if margin >= 1.0 {
        return Ok(inapplicable(format!("epsilon + epsilon^zeta = {margin:.4} is not below 1"), f64::NAN, 0));
    }
    let min_m_by_n0 = (params.n0 as f64 / (0.25 - params.c)).floor() as usize + 1;
    let (k0, m) = match params.k0 {
        None => {
            // Least M with ln(1/eps) / M^e < K/2.
            let m_k = ((2.0 * ln_inv / params.k).powf(1.0 / e)).floor() as usize + 1;
            let m = m_k.max(min_m_by_n0);
            (ln_inv / (m as f64).powf(e), m)
        }
        Some(k0) => {
            if !(k0 > 0.0) {
                return input("K0 must be positive");
            }
            // Least M with e^{-K0 M^e} <= eps.
            let m = ((ln_inv / k0).powf(1.0 / e)).ceil().max(1.0) as usize;
            (k0, m.max(min_m_by_n0))
        }
    };
    if k0 >= params.k / 2.0 {
        return Ok(inapplicable(format!("K0 = {k0:.4} is not below K/2 = {:.4}", params.k / 2.0), k0, m));
    }
    if let Some((&n, &v)) = params.base_values.iter().find(|(_, &v)| !(v >= 0.0 && v <= eps)) {
        return Ok(inapplicable(format!("base value {v} at n = {n} exceeds epsilon = {eps}"), k0, m));
    }
    if let Some(&n) = params.base_values.keys().find(|&&n| n < params.n0 || n > m) {
        return input(format!("base value at n = {n} lies outside the base window [{}, {m}]", params.n0));
    }

    let n0 = params.n0;
    let top = horizon.max(m);
    // log_f[n - n0] for n in n0..=top.
    let mut log_f: Vec<f64> = Vec::with_capacity(top - n0 + 1);
    for n in n0..=m {
        let v = params.base_values.get(&n).copied().unwrap_or(eps);
        log_f.push(if v > 0.0 { v.ln() } else { f64::NEG_INFINITY });
    }
    let log_bound = |n: usize| -k0 * (n as f64).powf(e);

    let mut deque: VecDeque<usize> = VecDeque::new();
    let mut next_in = n0;
    let mut worst = f64::NEG_INFINITY;
    let mut first_violation = None;
    for n in m + 1..=top {
        let (lo, hi) = window(n, params.c);
        let lo = lo.max(n0);
        while next_in <= hi.min(n - 1) {
            let v = log_f[next_in - n0];
            while deque.back().is_some_and(|&b| log_f[b - n0] <= v) {
                deque.pop_back();
            }
            deque.push_back(next_in);
            next_in += 1;
        }
        while deque.front().is_some_and(|&f| f < lo) {
            deque.pop_front();
        }
        let window_max = deque.front().map_or(f64::NEG_INFINITY, |&f| log_f[f - n0]);
        let v = log_add(-params.k * (n as f64).powf(e), 2.0 * window_max);
        log_f.push(v);
        let gap = v - log_bound(n);
        worst = worst.max(gap);
        if gap > 1e-12 && first_violation.is_none() {
            first_violation = Some(n);
        }
    }

    let mut marks: Vec<usize> = vec![m, top];
    let mut x = n0.max(1) as f64;
    while (x as usize) <= top {
        marks.push(x as usize);
        x *= 1.05;
        x = x.max(x.floor() + 1.0);
    }
    marks.extend(first_violation);
    marks.retain(|&n| n >= n0 && n <= top);
    marks.sort_unstable();
    marks.dedup();
    let table = marks.into_iter().map(|n| BoundRow { n, log_f: log_f[n - n0], log_bound: log_bound(n) }).collect();

    Ok(RecurrenceOutcome {
        zeta,
        margin,
        k0,
        m,
        horizon,
        status: match first_violation {
            None => RecurrenceStatus::Verified,
            Some(first_n) => RecurrenceStatus::Violated { first_n },
        },
        worst_log_gap: worst,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(base: f64) -> RecurrenceParams {
        RecurrenceParams {
            k: 1.0,
            alpha: 0.1,
            c: 0.01,
            base_bound: base,
            n0: 1,
            k0: None,
            base_values: BTreeMap::new(),
        }
    }

    #[test]
    fn zeta_value() {
        assert!((params(1e-3).zeta() - 0.130).abs() < 5e-4);
    }

    #[test]
    fn verified_to_a_million() {
        let out = solve_recurrence(&params(1e-3), 1_000_000).unwrap();
        assert_eq!(out.status, RecurrenceStatus::Verified);
        assert!(out.k0 < 0.5);
        assert!(out.worst_log_gap <= 0.0);
        assert!(out.table.iter().all(|r| r.log_f <= r.log_bound + 1e-12));
    }

    #[test]
    fn degenerate_k0_is_inapplicable() {
        let mut p = params(1e-9);
        p.k0 = Some(1.0);
        let out = solve_recurrence(&p, 1000).unwrap();
        assert!(matches!(out.status, RecurrenceStatus::Inapplicable { .. }));
    }

    #[test]
    fn broken_base_is_inapplicable() {
        let out = solve_recurrence(&params(0.9), 1000).unwrap();
        assert!(out.margin >= 1.0);
        assert!(matches!(out.status, RecurrenceStatus::Inapplicable { .. }));
    }

    #[test]
    fn nonpositive_zeta_rejected() {
        let mut p = params(1e-3);
        p.c = 0.1;
        assert!(solve_recurrence(&p, 100).is_err());
    }

    /// Independent oracle: direct maximum over each window, no deque.
    #[allow(clippy::needless_range_loop)]
    fn naive(p: &RecurrenceParams, k0_m: (f64, usize), horizon: usize) -> Vec<f64> {
        let (_, m) = k0_m;
        let e = 0.5 - p.alpha;
        let mut f = vec![0.0f64; horizon + 1];
        for n in p.n0..=m {
            f[n] = p.base_values.get(&n).copied().unwrap_or(p.base_bound);
        }
        for n in m + 1..=horizon {
            let lo = ((0.25 - p.c) * n as f64).ceil() as usize;
            let hi = ((0.25 + p.c) * n as f64).floor() as usize;
            let mx = (lo.max(p.n0)..=hi).map(|i| f[i]).fold(0.0, f64::max);
            f[n] = (-p.k * (n as f64).powf(e)).exp() + mx * mx;
        }
        f
    }

    #[test]
    fn matches_direct_iteration() {
        let mut p = params(0.05);
        p.k = 3.0;
        p.c = 0.05;
        p.base_values.insert(3, 0.01);
        p.base_values.insert(5, 0.0);
        let out = solve_recurrence(&p, 5000).unwrap();
        let f = naive(&p, (out.k0, out.m), 5000);
        for row in &out.table {
            assert!((row.log_f.exp() - f[row.n]).abs() <= 1e-12 * f[row.n].max(1e-300), "n = {}", row.n);
        }
    }

    #[test]
    fn five_steps_by_hand() {
        // K = 4, alpha = 0.1, c = 0.05, eps = 0.01: M is the least integer with
        // ln 100 / M^0.4 < 2 and 0.2 M > 1, so M = 9 and K0 = ln 100 / 9^0.4.
        let p = RecurrenceParams {
            k: 4.0,
            alpha: 0.1,
            c: 0.05,
            base_bound: 0.01,
            n0: 1,
            k0: None,
            base_values: BTreeMap::new(),
        };
        let out = solve_recurrence(&p, 14).unwrap();
        assert_eq!(out.m, 9);
        assert!((out.k0 - 100f64.ln() / 9f64.powf(0.4)).abs() < 1e-15);
        // n = 10..=14: windows [ceil(0.2 n), floor(0.3 n)] = [2,3], [3,3], [3,3], [3,3], [3,4],
        // all inside the base window where f = 0.01.
        for n in 10..=14usize {
            let expect = (-4.0 * (n as f64).powf(0.4)).exp() + 1e-4;
            let row = out.table.iter().find(|r| r.n == n).unwrap();
            assert!((row.log_f.exp() - expect).abs() < 1e-15, "n = {n}");
        }
    }
}
