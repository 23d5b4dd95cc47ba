//! Area-decreasing moves at fixed systole, applied until none is left.

use crate::connections::saddle_connections;
use crate::decompose::{check_domain_geometry, decompose, Domain, SystolicDecomposition};
use crate::error::{Error, Result};
use crate::extremal::{report_from, ExtremalityReport};
use crate::geom::{PI, TAU};
use crate::kite::{KiteBase, KiteKind};
use crate::preserve::{build, classify_case, initial_width, merging_cut, search_width, Case, CaseLabel, PreservingCut};
use crate::surface::ConeSurface;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveKind {
    #[serde(rename = "E1")]
    E1,
    #[serde(rename = "E1'")]
    E1Prime,
    #[serde(rename = "E2")]
    E2,
    #[serde(rename = "D1")]
    D1,
    #[serde(rename = "D1'")]
    D1Prime,
    #[serde(rename = "D1''")]
    D1Second,
    #[serde(rename = "cylinder-shrink")]
    CylinderShrink,
}

impl From<Case> for MoveKind {
    fn from(c: Case) -> Self {
        match c {
            Case::D1 => MoveKind::D1,
            Case::D1Prime => MoveKind::D1Prime,
            Case::D1Second => MoveKind::D1Second,
            Case::E1 => MoveKind::E1,
            Case::E1Prime => MoveKind::E1Prime,
            Case::E2 => MoveKind::E2,
        }
    }
}

/// One committed move. Vertex ids refer to the surface before the move.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    pub p: Option<usize>,
    pub q: Option<usize>,
    pub domain: Option<usize>,
    pub base_length: f64,
    pub width: f64,
    pub removed_area: f64,
    pub area: [f64; 2],
    pub systole: [f64; 2],
    pub singularities: [usize; 2],
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MoveLog {
    pub moves: Vec<Move>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeConfig {
    /// Allowed change of the systole.
    pub tol: f64,
    /// Decomposition rounds; each round commits at most one move.
    pub max_passes: usize,
    /// Factor applied to the kite width after a failed probe.
    pub shrink: f64,
    /// Probes per width search.
    pub tries: usize,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig { tol: 1e-9, max_passes: 100, shrink: 0.5, tries: 40 }
    }
}

impl OptimizeConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidArgument(format!("tolerance {}", self.tol)));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::InvalidArgument(format!("shrink factor {}", self.shrink)));
        }
        if self.tries == 0 {
            return Err(Error::InvalidArgument("no width probes allowed".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pass {
    /// Exact kites joining a small point to another point of its domain.
    Domains,
    /// Exact kites along boundary edges.
    Edges,
    /// Diamonds in domains that still hold two or more cone points.
    Diamonds,
}

fn is_small(theta: f64) -> bool {
    theta > TAU + 1e-9 && theta < 3.0 * PI
}

/// Refined vertex of each cone point of `s`.
fn refined(dec: &SystolicDecomposition, v: usize) -> Option<usize> {
    dec.overlay.new_vertex_of(v)
}

/// Whether `base` is a candidate for the pass, before classification.
fn wanted(s: &ConeSurface, dec: &SystolicDecomposition, pass: Pass, base: &KiteBase) -> Option<KiteKind> {
    let (p, q) = (refined(dec, base.p)?, refined(dec, base.q)?);
    let holds = |d: &Domain, v: usize| d.singularities.contains(&v);
    match pass {
        Pass::Domains => {
            let ok = is_small(s.angle(base.p))
                && dec.domains.iter().any(|d| holds(d, p) && d.singularities.len() >= 2 && d.small_singularities() >= 1);
            ok.then_some(KiteKind::Exact)
        }
        Pass::Edges => {
            let ok = is_small(s.angle(base.p))
                && dec.domains.iter().any(|d| {
                    d.edges.iter().any(|e| {
                        e.singularities.len() >= 2 && e.singularities.contains(&p) && e.singularities.contains(&q)
                    })
                });
            ok.then_some(KiteKind::Exact)
        }
        Pass::Diamonds => {
            let ok = dec.domains.iter().any(|d| {
                let busy = d.singularities.len() >= 2;
                let open = !check_domain_geometry(d).is_disk && !d.singularities.is_empty();
                (busy || open) && (holds(d, p) || holds(d, q) || d.corners.iter().any(|c| c.vertex == p || c.vertex == q))
            });
            ok.then_some(KiteKind::Diamond)
        }
    }
}

fn case_fits(pass: Pass, label: &CaseLabel) -> bool {
    match pass {
        Pass::Domains => matches!(label.case, Case::E1 | Case::E1Prime),
        Pass::Edges => label.case == Case::E2,
        Pass::Diamonds => matches!(label.case, Case::D1 | Case::D1Prime | Case::D1Second),
    }
}

/// A move found by a pass, not yet committed.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub base: KiteBase,
    pub label: CaseLabel,
    pub cut: PreservingCut,
}

impl Candidate {
    /// Cone points removed by the move.
    pub fn merged(&self, s: &ConeSurface) -> i64 {
        s.cone_points().len() as i64 - self.cut.result.surface.cone_points().len() as i64
    }
}

/// Moves that remove cone points first, then larger areas, then the
/// smaller base.
fn better(s: &ConeSurface, a: &Candidate, b: &Candidate) -> bool {
    let key = |c: &Candidate| (-c.merged(s), -c.cut.result.removed_area, c.base.p, c.base.q, c.base.start);
    let (x, y) = (key(a), key(b));
    x.0.cmp(&y.0)
        .then(x.1.total_cmp(&y.1))
        .then(x.2.cmp(&y.2))
        .then(x.3.cmp(&y.3))
        .then(x.4.total_cmp(&y.4))
        .is_lt()
}

/// Every base the pass could use, both orientations, in a fixed order.
fn bases(s: &ConeSurface, budget: f64) -> Result<Vec<KiteBase>> {
    let mut out = Vec::new();
    for c in saddle_connections(s, budget)? {
        let b = KiteBase::from_connection(&c);
        out.push(b);
        out.push(b.reversed());
    }
    Ok(out)
}

/// The best move of one pass on the current surface, if any.
pub fn best_move(
    s: &ConeSurface,
    dec: &SystolicDecomposition,
    pass: Pass,
    cfg: &OptimizeConfig,
    reference: f64,
) -> Result<Option<Candidate>> {
    let mut best: Option<Candidate> = None;
    let mut defects = Vec::new();
    for budget in [dec.systole, 2.0 * dec.systole] {
        for base in bases(s, budget)? {
            let Some(kind) = wanted(s, dec, pass, &base) else {
                continue;
            };
            let Ok(w) = initial_width(s, &base, kind) else {
                continue;
            };
            if !(w > 0.0) {
                continue;
            }
            let Ok(probe) = build(s, &base, kind, 0.5 * w) else {
                continue;
            };
            let Ok(label) = classify_case(s, dec, &probe) else {
                continue;
            };
            if !case_fits(pass, &label) {
                continue;
            }
            let merged = match kind {
                KiteKind::Exact => merging_cut(s, &base, cfg.tol, label.angle_q).ok(),
                KiteKind::Diamond => None,
            };
            let found = match merged {
                Some(cut) => Ok(cut),
                None => search_width(s, &base, kind, cfg.tol, label.angle_q, cfg.shrink, cfg.tries),
            };
            match found {
                Ok(cut) if (cut.systole.1 - reference).abs() <= cfg.tol => {
                    let c = Candidate { base, label, cut };
                    if best.as_ref().is_none_or(|b| better(s, &c, b)) {
                        best = Some(c);
                    }
                }
                Ok(_) => {}
                Err(e @ Error::KernelDefect(_)) => defects.push(e.to_string()),
                Err(e) => return Err(e),
            }
        }
        if best.is_some() {
            break;
        }
    }
    if best.is_none() && !defects.is_empty() && pass != Pass::Diamonds {
        return Err(Error::KernelDefect(defects.join("; ")));
    }
    Ok(best)
}

fn commit(s: &ConeSurface, c: &Candidate, sys: f64) -> (ConeSurface, Move) {
    let out = c.cut.result.surface.clone();
    let m = Move {
        kind: c.label.case.into(),
        p: Some(c.base.p),
        q: Some(c.base.q),
        domain: Some(c.label.domain),
        base_length: c.base.length,
        width: c.cut.width,
        removed_area: c.cut.result.removed_area,
        area: [s.area(), out.area()],
        systole: [sys, c.cut.systole.1],
        singularities: [s.cone_points().len(), out.cone_points().len()],
    };
    (out, m)
}

/// Repeats one pass until it finds no move or `limit` moves are made.
fn run_pass(s: &ConeSurface, pass: Pass, cfg: &OptimizeConfig, reference: f64, limit: usize) -> Result<(ConeSurface, Vec<Move>)> {
    let mut cur = s.clone();
    let mut moves = Vec::new();
    while moves.len() < limit {
        let dec = decompose(&cur, cfg.tol)?;
        let Some(c) = best_move(&cur, &dec, pass, cfg, reference)? else {
            break;
        };
        let (next, m) = commit(&cur, &c, dec.systole);
        moves.push(m);
        cur = next;
    }
    Ok((cur, moves))
}

/// Exact-kite merges inside domains until each has at most one small
/// cone point or no move applies.
pub fn merge_pass_domains(s: &ConeSurface, cfg: &OptimizeConfig) -> Result<(ConeSurface, Vec<Move>)> {
    cfg.check()?;
    let (sys, _) = crate::geodesic::systole(s, cfg.tol)?;
    run_pass(s, Pass::Domains, cfg, sys, cfg.max_passes)
}

/// Exact-kite merges along boundary edges.
pub fn merge_pass_edges(s: &ConeSurface, cfg: &OptimizeConfig) -> Result<(ConeSurface, Vec<Move>)> {
    cfg.check()?;
    let (sys, _) = crate::geodesic::systole(s, cfg.tol)?;
    run_pass(s, Pass::Edges, cfg, sys, cfg.max_passes)
}

/// Final surface of a run with its log and report.
#[derive(Clone, Debug)]
pub struct Optimized {
    pub surface: ConeSurface,
    pub log: MoveLog,
    pub report: ExtremalityReport,
    /// True when the round budget ran out before a fixpoint.
    pub exhausted: bool,
}

/// Applies the passes in order, one committed move per round, until a
/// round finds nothing to do.
pub fn optimize(s: &ConeSurface, cfg: &OptimizeConfig) -> Result<Optimized> {
    cfg.check()?;
    if s.genus() < 2 {
        return Err(Error::InvalidArgument(format!("genus {} is below 2", s.genus())));
    }
    if !s.is_npc() {
        return Err(Error::InvalidArgument("a cone angle is below 2π".into()));
    }
    let (sys, _) = crate::geodesic::systole(s, cfg.tol)?;
    let mut cur = s.clone();
    let mut log = MoveLog::default();
    'rounds: for _ in 0..cfg.max_passes {
        let dec = decompose(&cur, cfg.tol)?;
        for pass in [Pass::Domains, Pass::Edges, Pass::Diamonds] {
            if let Some(c) = best_move(&cur, &dec, pass, cfg, sys)? {
                let (next, m) = commit(&cur, &c, dec.systole);
                log.moves.push(m);
                cur = next;
                continue 'rounds;
            }
        }
        for d in &dec.domains {
            if d.euler != 0 || !d.singularities.is_empty() {
                continue;
            }
            if let Ok((next, m)) = crate::cylinder::shrink_cylinder(&cur, &dec, d.id, cfg, sys) {
                log.moves.push(m);
                cur = next;
                continue 'rounds;
            }
        }
        let report = report_from(&cur, &dec);
        return Ok(Optimized { surface: cur, log, report, exhausted: false });
    }
    let dec = decompose(&cur, cfg.tol)?;
    let report = report_from(&cur, &dec);
    Ok(Optimized { surface: cur, log, report, exhausted: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::octagon;
    use crate::kite::{insert_kite, KiteInsertion};

    #[test]
    fn octagon_is_a_fixpoint() {
        let s = octagon(1.0).unwrap();
        let out = optimize(&s, &OptimizeConfig::default()).unwrap();
        assert!(out.log.moves.is_empty());
        assert!(!out.exhausted);
    }

    #[test]
    fn one_inserted_pair_is_merged() {
        let s = octagon(1.0).unwrap();
        let ins = KiteInsertion { vertex: 0, direction: 0.3, length: 0.3, a: 0.15, h: 0.02 };
        let t = insert_kite(&s, &ins).unwrap().surface;
        let out = optimize(&t, &OptimizeConfig::default()).unwrap();
        assert!(!out.log.moves.is_empty());
        for m in &out.log.moves {
            assert!(m.area[1] < m.area[0]);
            assert!((m.systole[1] - 1.0).abs() <= 1e-9);
        }
        assert!(out.surface.cone_points().len() < t.cone_points().len());
    }

    #[test]
    fn bad_settings_are_refused() {
        let cfg = OptimizeConfig { shrink: 1.5, ..Default::default() };
        assert!(cfg.check().is_err());
        let cfg = OptimizeConfig { tol: 0.0, ..Default::default() };
        assert!(cfg.check().is_err());
    }
}
