use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::bitset::VertexSet;
use crate::graph::{Graph, PotentialEdgeSet};
use crate::rng::RandomSource;

use super::config::{CandidatePolicy, RemovalConfig, Role};

/// What a round did with its centre.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Even parity: the centre was removed on its own.
    Direct,
    /// Odd parity: a partner `w` was removed first, then the centre.
    Paired,
    /// Odd parity and no eligible partner.
    Failed,
}

/// One probed vertex of the current block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub w: usize,
    /// Whether `{centre, w}` is an edge.
    pub edge: bool,
    /// `par(w, V \ R)` at probe time.
    pub parity: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    /// Round index, starting at 1.
    pub round: usize,
    pub center: usize,
    /// Whether the centre belongs to the revealed part.
    pub revealed: bool,
    /// `|R|` before the round; the stars of this round are taken against
    /// `V` minus the first `prefix` removed vertices.
    pub prefix: usize,
    pub parity: u8,
    pub branch: Branch,
    /// Probed block `j` on odd rounds.
    pub block: Option<usize>,
    pub candidates: Vec<Candidate>,
    pub chosen: Option<usize>,
}

/// A star `S(center, V \ R[..prefix])`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarRecord {
    pub center: usize,
    pub prefix: usize,
}

/// A fully revealed star `S(center, W_block \ R[..prefix])`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeProbe {
    pub center: usize,
    pub block: usize,
    pub prefix: usize,
}

/// Everything a removal revealed, with stars stored as `(centre, prefix)`
/// pairs against the removal sequence instead of explicit pair lists.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalTranscript {
    pub rounds: Vec<RoundRecord>,
    #[serde(rename = "I_A")]
    pub revealed_stars: Vec<StarRecord>,
    #[serde(rename = "I_U")]
    pub front_stars: Vec<StarRecord>,
    #[serde(rename = "I_W")]
    pub partner_stars: Vec<StarRecord>,
    #[serde(rename = "I_e")]
    pub edge_probes: Vec<EdgeProbe>,
    /// Last round executed.
    pub final_p: usize,
    /// One more than the number of vertices removed from `W`.
    pub final_q: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum RemovalStatus {
    Success,
    Failure { round: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovalOutcome {
    pub status: RemovalStatus,
    /// `R` in removal order; on failure, the vertices removed before the
    /// failing round.
    pub removed: Vec<usize>,
    /// `V_W = V \ R` on success.
    pub remaining: Option<Vec<usize>>,
    pub transcript: RemovalTranscript,
}

impl RemovalOutcome {
    pub fn succeeded(&self) -> bool {
        self.status == RemovalStatus::Success
    }

    /// Number of vertices removed from `W` (`final_q - 1`).
    pub fn w_removed(&self) -> usize {
        self.transcript.final_q - 1
    }

    /// The revealed families as explicit potential-edge sets:
    /// `(I_A, I_U, I_W, I_e)`. Quadratic in size; meant for small graphs.
    pub fn families(
        &self,
        cfg: &RemovalConfig,
        n: usize,
    ) -> (Vec<PotentialEdgeSet>, Vec<PotentialEdgeSet>, Vec<PotentialEdgeSet>, Vec<PotentialEdgeSet>) {
        let alive = |prefix: usize| {
            let mut s = VertexSet::full(n);
            for &v in &self.removed[..prefix] {
                s.remove(v);
            }
            s
        };
        let star = |r: &StarRecord| PotentialEdgeSet::star(r.center, &alive(r.prefix).to_vec());
        let t = &self.transcript;
        let probes = t
            .edge_probes
            .iter()
            .map(|e| {
                let targets: Vec<usize> = cfg.w_blocks[e.block - 1]
                    .iter()
                    .copied()
                    .filter(|&w| !self.removed[..e.prefix].contains(&w))
                    .collect();
                PotentialEdgeSet::star(e.center, &targets)
            })
            .collect();
        (
            t.revealed_stars.iter().map(star).collect(),
            t.front_stars.iter().map(star).collect(),
            t.partner_stars.iter().map(star).collect(),
            probes,
        )
    }
}

/// Runs the (U, W)-removal on `g`.
///
/// Round `p` looks at the `p`-th vertex `c` of `A` followed by `U`. If
/// `par(c, V \ R)` is even, `c` is removed. Otherwise block `W_j` with
/// `j = q mod s` (taking values in `1..=s`) is probed: among its vertices still
/// present, a partner must be adjacent to `c` and have even parity into
/// `V \ R`. The partner is removed, then `c`, and `q` advances. Without a
/// partner the run fails at round `p`.
///
/// The result is a deterministic function of `(g, cfg)`. The configuration is
/// assumed valid for `g` (see [`RemovalConfig::validate`]).
pub fn uw_removal(g: &Graph, cfg: &RemovalConfig) -> RemovalOutcome {
    let n = g.n();
    let s = cfg.s();
    let a_len = cfg.revelation.a.len();
    let mut picker = match cfg.candidate_policy {
        CandidatePolicy::LowestIndex => None,
        CandidatePolicy::Random { seed } => Some(RandomSource::new(seed, 0)),
    };
    let mut alive = VertexSet::full(n);
    let mut removed = Vec::with_capacity(n);
    let mut t = RemovalTranscript { final_q: 1, ..Default::default() };
    let mut q = 1usize;
    let mut status = RemovalStatus::Success;
    let mut eligible = Vec::new();

    for (idx, c) in cfg.sequence().enumerate() {
        let p = idx + 1;
        let prefix = removed.len();
        let parity = g.star_parity(c, &alive);
        let star = StarRecord { center: c, prefix };
        let revealed = idx < a_len;
        if revealed {
            t.revealed_stars.push(star);
        } else {
            t.front_stars.push(star);
        }
        t.final_p = p;
        let mut record = RoundRecord {
            round: p,
            center: c,
            revealed,
            prefix,
            parity,
            branch: Branch::Direct,
            block: None,
            candidates: Vec::new(),
            chosen: None,
        };
        if parity == 0 {
            alive.remove(c);
            removed.push(c);
            t.rounds.push(record);
            continue;
        }
        let j = (q - 1) % s + 1;
        record.block = Some(j);
        t.edge_probes.push(EdgeProbe { center: c, block: j, prefix });
        eligible.clear();
        for &w in &cfg.w_blocks[j - 1] {
            if !alive.contains(w) {
                continue;
            }
            let cand = Candidate { w, edge: g.has_edge(c, w), parity: g.star_parity(w, &alive) };
            if cand.edge && cand.parity == 0 {
                eligible.push(w);
            }
            record.candidates.push(cand);
        }
        record.candidates.sort_by_key(|c| c.w);
        t.partner_stars.extend(record.candidates.iter().map(|c| StarRecord { center: c.w, prefix }));
        eligible.sort_unstable();
        let pick = match picker.as_mut() {
            None => eligible.first().copied(),
            Some(rng) => eligible.choose(rng).copied(),
        };
        match pick {
            Some(w) => {
                alive.remove(w);
                alive.remove(c);
                removed.push(w);
                removed.push(c);
                q += 1;
                record.branch = Branch::Paired;
                record.chosen = Some(w);
                t.rounds.push(record);
            }
            None => {
                record.branch = Branch::Failed;
                t.rounds.push(record);
                status = RemovalStatus::Failure { round: p };
                break;
            }
        }
    }
    t.final_q = q;
    let remaining = (status == RemovalStatus::Success).then(|| alive.to_vec());
    RemovalOutcome { status, removed, remaining, transcript: t }
}

/// Replays `out` against `g` and `cfg`.
///
/// Checks that every removed vertex had even parity into the vertices present
/// at its removal, that `V_W` and `R` partition `V` on success, and that the
/// round records and revealed families are exactly those the procedure would
/// produce: the right centre per round, recorded parities and probe results
/// that match `g`, the block discipline `j = q mod s`, and an eligible partner
/// on every paired round.
pub fn verify_outcome(g: &Graph, cfg: &RemovalConfig, out: &RemovalOutcome) -> bool {
    let n = g.n();
    let Ok(roles) = cfg.roles(n) else { return false };
    let s = cfg.s();
    if s == 0 {
        return false;
    }

    // Removal sequence: distinct vertices, each with even parity when removed.
    let mut alive = VertexSet::full(n);
    for &v in &out.removed {
        if !alive.remove(v) || g.star_parity(v, &alive) == 1 {
            return false;
        }
    }

    let t = &out.transcript;
    let sequence: Vec<usize> = cfg.sequence().collect();
    let mut alive = VertexSet::full(n);
    let mut cursor = 0usize;
    let mut q = 1usize;
    let (mut ia, mut iu, mut iw, mut ie) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (idx, rec) in t.rounds.iter().enumerate() {
        let c = sequence.get(idx).copied();
        if c != Some(rec.center) || rec.round != idx + 1 || rec.prefix != cursor {
            return false;
        }
        let c = rec.center;
        if rec.revealed != (roles[c] == Role::Revealed) || rec.parity != g.star_parity(c, &alive) {
            return false;
        }
        let star = StarRecord { center: c, prefix: cursor };
        if rec.revealed {
            ia.push(star);
        } else {
            iu.push(star);
        }
        match (rec.parity, rec.branch) {
            (0, Branch::Direct) => {
                if out.removed.get(cursor) != Some(&c) || rec.block.is_some() || !rec.candidates.is_empty() {
                    return false;
                }
                alive.remove(c);
                cursor += 1;
            }
            (1, Branch::Paired) | (1, Branch::Failed) => {
                let j = (q - 1) % s + 1;
                if rec.block != Some(j) {
                    return false;
                }
                ie.push(EdgeProbe { center: c, block: j, prefix: cursor });
                let mut expected: Vec<usize> =
                    cfg.w_blocks[j - 1].iter().copied().filter(|&w| alive.contains(w)).collect();
                expected.sort_unstable();
                if rec.candidates.iter().map(|c| c.w).collect::<Vec<_>>() != expected {
                    return false;
                }
                for cand in &rec.candidates {
                    if cand.edge != g.has_edge(c, cand.w) || cand.parity != g.star_parity(cand.w, &alive) {
                        return false;
                    }
                    iw.push(StarRecord { center: cand.w, prefix: cursor });
                }
                let eligible = |w: usize| rec.candidates.iter().any(|x| x.w == w && x.edge && x.parity == 0);
                if rec.branch == Branch::Failed {
                    if rec.candidates.iter().any(|x| x.edge && x.parity == 0) || idx + 1 != t.rounds.len() {
                        return false;
                    }
                    continue;
                }
                let Some(w) = rec.chosen else { return false };
                if !eligible(w)
                    || roles[w] != Role::Block(j)
                    || out.removed.get(cursor) != Some(&w)
                    || out.removed.get(cursor + 1) != Some(&c)
                {
                    return false;
                }
                alive.remove(w);
                alive.remove(c);
                cursor += 2;
                q += 1;
            }
            _ => return false,
        }
    }
    if cursor != out.removed.len() || t.final_q != q {
        return false;
    }
    if (ia, iu, iw, ie)
        != (t.revealed_stars.clone(), t.front_stars.clone(), t.partner_stars.clone(), t.edge_probes.clone())
    {
        return false;
    }
    match out.status {
        RemovalStatus::Success => {
            let Some(rest) = &out.remaining else { return false };
            t.rounds.len() == sequence.len()
                && t.final_p == sequence.len()
                && rest.len() + out.removed.len() == n
                && rest.iter().all(|&v| alive.contains(v) && matches!(roles[v], Role::Reserve | Role::Block(_)))
                && t.rounds.last().is_none_or(|r| r.branch != Branch::Failed)
        }
        RemovalStatus::Failure { round } => {
            out.remaining.is_none()
                && t.final_p == round
                && t.rounds.last().map(|r| (r.round, r.branch)) == Some((round, Branch::Failed))
        }
    }
}
