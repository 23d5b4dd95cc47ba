//! The ten acceptance criteria, one pass/fail line each.

mod common;

use common::{corpus, oracle_systole};
use conesys::bounds::bounds;
use conesys::connections::saddle_connections;
use conesys::decompose::{decompose, systolic_part_connected};
use conesys::extremal::genus_two_sigma_bound;
use conesys::generate::octagon;
use conesys::geodesic::systole;
use conesys::kite::{build_diamond, build_exact, excise, insert_kite, max_admissible_width, Kite, KiteBase, KiteInsertion, KiteKind};
use conesys::optimize::{optimize, OptimizeConfig, Optimized};
use conesys::preserve::{classify_case, initial_width, max_systole_preserving_width, Case};
use conesys::structure::{loops_meet, systolic_loops, Intersection};
use conesys::ConeSurface;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(limit: Duration, started: Instant, o: Outcome) -> Outcome {
    let spent = started.elapsed();
    let detail = format!("{} in {:.2?} (limit {:?})", o.detail, spent, limit);
    outcome(o.pass && spent <= limit, detail)
}

fn gauss_bonnet() -> Outcome {
    let t = Instant::now();
    let c = corpus();
    let worst = c.iter().map(|(_, s)| s.gauss_bonnet_residual().abs()).fold(0.0, f64::max);
    let bad: Vec<&str> = c.iter().filter(|(_, s)| s.gauss_bonnet_residual().abs() >= 1e-9).map(|(n, _)| n.as_str()).collect();
    within(Duration::from_secs(1), t, outcome(bad.is_empty(), format!("{} surfaces, worst residual {worst:.1e}, failing {bad:?}", c.len())))
}

fn oracle() -> Outcome {
    let t = Instant::now();
    let mut checked = 0;
    let mut worst = 0.0f64;
    let mut bad = Vec::new();
    for (name, s) in corpus().into_iter().filter(|(_, s)| s.num_triangles() <= 12) {
        let fast = match systole(&s, 1e-9) {
            Ok((l, _)) => l,
            Err(e) => {
                bad.push(format!("{name}: {e}"));
                continue;
            }
        };
        let d = (fast - oracle_systole(&s)).abs();
        worst = worst.max(d);
        if d >= 1e-9 {
            bad.push(name);
        }
        checked += 1;
    }
    let torus = conesys::generate::torus(1.0, 1.0, 0.0).unwrap();
    let exact = systole(&torus, 1e-9).map(|r| r.0 == 1.0).unwrap_or(false);
    let detail = format!("{checked} surfaces, worst gap {worst:.1e}, unit torus exact {exact}, failing {bad:?}");
    within(Duration::from_secs(10), t, outcome(bad.is_empty() && exact && checked > 0, detail))
}

/// Checks one excision; `None` when the kite does not embed.
fn check_excision(s: &ConeSurface, k: &Kite) -> Option<Result<(), String>> {
    let r = excise(s, k).ok()?;
    let t = &r.surface;
    let area = (s.area() - k.area() - t.area()).abs();
    let (ap, aq) = (s.angle(k.p()), s.angle(k.q()));
    let expected = ap + aq + r.apex_before.0 + r.apex_before.1 - TAU;
    let got = r.angle_p.1 + r.angle_q.1 + r.angle_r;
    let sides = (r.angle_p.1 - (ap - k.angle_p())).abs().max((r.angle_q.1 - (aq - k.angle_q())).abs());
    let low = (0..t.num_vertices()).map(|v| t.angle(v)).fold(f64::INFINITY, f64::min);
    let problems: Vec<String> = [
        (area < 1e-9, format!("area gap {area:.1e}")),
        (t.genus() == s.genus(), format!("genus {} to {}", s.genus(), t.genus())),
        ((got - expected).abs() < 1e-9, format!("angle sum {got} against {expected}")),
        (sides < 1e-9, format!("angle update gap {sides:.1e}")),
        (low >= TAU - 1e-9, format!("smallest angle {low}")),
    ]
    .into_iter()
    .filter(|(ok, _)| !ok)
    .map(|(_, m)| m)
    .collect();
    Some(if problems.is_empty() { Ok(()) } else { Err(problems.join(", ")) })
}

fn excisions() -> Outcome {
    let surfaces: Vec<(String, ConeSurface)> = corpus().into_iter().filter(|(_, s)| s.genus() >= 2).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut done, mut tries) = (0, 0);
    let mut bad = Vec::new();
    while done < 50 && tries < 5000 {
        tries += 1;
        let (name, s) = &surfaces[rng.gen_range(0..surfaces.len())];
        let links = saddle_connections(s, 1.5).unwrap_or_default();
        let links: Vec<_> = links.into_iter().filter(|c| c.from != c.to).collect();
        if links.is_empty() {
            continue;
        }
        let c = &links[rng.gen_range(0..links.len())];
        let base = KiteBase::from_connection(c);
        let kind = if rng.gen_bool(0.5) { KiteKind::Exact } else { KiteKind::Diamond };
        let w = rng.gen_range(0.05..0.95) * max_admissible_width(s, &base, kind).min(0.5 * base.length);
        let k = match kind {
            KiteKind::Exact => build_exact(s, &base, w),
            KiteKind::Diamond => build_diamond(s, &base, w),
        };
        let Ok(k) = k else { continue };
        match check_excision(s, &k) {
            None => continue,
            Some(Ok(())) => done += 1,
            Some(Err(m)) => {
                done += 1;
                bad.push(format!("{name} {}->{}: {m}", k.p(), k.q()));
            }
        }
    }
    outcome(done == 50 && bad.is_empty(), format!("{done} kites from {tries} draws, failing {bad:?}"))
}

fn inserted(s: &ConeSurface, vertex: usize, direction: f64, length: f64, a: f64, h: f64) -> conesys::kite::InsertionResult {
    insert_kite(s, &KiteInsertion { vertex, direction, length, a, h }).unwrap()
}

/// The cone point of largest angle.
fn widest(s: &ConeSurface) -> usize {
    s.cone_points().into_iter().max_by(|a, b| s.angle(*a).total_cmp(&s.angle(*b)).then(b.cmp(a))).unwrap()
}

fn preservation_case(s: &ConeSurface, p: usize, q: usize, kind: KiteKind, want: Case) -> Result<String, String> {
    let dec = decompose(s, 1e-9).map_err(|e| e.to_string())?;
    let base = conesys::kite::base_between(s, p, q).map_err(|e| e.to_string())?;
    let w0 = initial_width(s, &base, kind).map_err(|e| e.to_string())?;
    let probe = match kind {
        KiteKind::Exact => build_exact(s, &base, 0.5 * w0),
        KiteKind::Diamond => build_diamond(s, &base, 0.5 * w0),
    }
    .map_err(|e| e.to_string())?;
    let label = classify_case(s, &dec, &probe).map_err(|e| e.to_string())?;
    if label.case != want {
        return Err(format!("classified {:?}, expected {want:?}", label.case));
    }
    let sys = dec.systole;
    let tol = 1e-7 * sys;
    let cut = max_systole_preserving_width(s, &base, kind, tol, label.angle_q).map_err(|e| e.to_string())?;
    let gap = (cut.systole.1 - cut.systole.0).abs();
    let half = cut.kite.with_width(s, 0.5 * cut.width).map_err(|e| e.to_string())?;
    let r = excise(s, &half).map_err(|e| e.to_string())?;
    let half_gap = (systole(&r.surface, 1e-9).map_err(|e| e.to_string())?.0 - sys).abs();
    if cut.width > 0.0 && gap <= tol && half_gap <= tol {
        Ok(format!("{want:?} w* {:.3e}", cut.width))
    } else {
        Err(format!("{want:?} w* {} gaps {gap:.1e} {half_gap:.1e}", cut.width))
    }
}

fn preservation() -> Outcome {
    let oct = octagon(1.0).unwrap();
    let one = inserted(&oct, 0, 0.3, 0.3, 0.15, 0.02);
    let big = widest(&one.surface);
    let b = inserted(&oct, 0, 0.0, 0.3, 0.15, 0.02);
    // a second pair cut from a small point leaves two small points on one edge
    let c = inserted(&b.surface, b.q, 0.0, 0.1, 0.05, 0.003);
    let split = *c.r.iter().find(|&&v| c.surface.is_cone_point(v)).unwrap();
    let cases = [
        preservation_case(&one.surface, one.p, one.q, KiteKind::Exact, Case::E1),
        preservation_case(&one.surface, one.p, big, KiteKind::Exact, Case::E1Prime),
        preservation_case(&c.surface, c.q, split, KiteKind::Exact, Case::E2),
        preservation_case(&one.surface, one.p, one.q, KiteKind::Diamond, Case::D1),
    ];
    let pass = cases.iter().all(|c| c.is_ok());
    let detail: Vec<String> = cases.into_iter().map(|c| c.unwrap_or_else(|e| format!("FAILED {e}"))).collect();
    outcome(pass, detail.join("; "))
}

/// The octagon with three small pairs cut from its widest point.
fn three_pairs() -> ConeSurface {
    let mut s = octagon(1.0).unwrap();
    for (k, dir) in [0.3, 2.5, 4.4].into_iter().enumerate() {
        let v = widest(&s);
        s = inserted(&s, v, dir, 0.25 + 0.05 * k as f64, 0.12, 0.02).surface;
    }
    s
}

fn merge_passes(input: &ConeSurface, run: &Result<Optimized, String>, spent: Duration) -> Outcome {
    let o = match run {
        Ok(o) => o,
        Err(e) => return outcome(false, format!("optimize failed: {e}")),
    };
    let sys0 = systole(input, 1e-9).map(|r| r.0).unwrap_or(f64::NAN);
    let r = &o.report;
    let small_ok = r.domains.iter().all(|d| d.small_singularities <= 1);
    let edge_ok = r.domains.iter().all(|d| d.edge_small.iter().all(|&n| n <= 1));
    let shrunk = o.surface.area() < input.area();
    let steady = (r.systole - sys0).abs() <= 1e-7 * sys0;
    let n0 = bounds(2).unwrap().n0;
    let counted = (o.surface.cone_points().len() as u128) <= n0;
    let pass = small_ok && edge_ok && shrunk && steady && counted && !o.exhausted && spent <= Duration::from_secs(60);
    let detail = format!(
        "{} moves, singularities {} to {}, area {:.6} to {:.6}, systole {:.9} to {:.9}, in {:.2?} (limit 60s)",
        o.log.moves.len(),
        input.cone_points().len(),
        o.surface.cone_points().len(),
        input.area(),
        o.surface.area(),
        sys0,
        r.systole,
        spent
    );
    outcome(pass, detail)
}

fn fixpoint_structure(fixpoints: &[(String, ConeSurface)]) -> Outcome {
    let mut bad = Vec::new();
    for (name, s) in fixpoints {
        match decompose(s, 1e-9) {
            Ok(dec) => {
                let disks = dec.domains.iter().all(|d| d.euler == 1);
                let single = dec.domains.iter().all(|d| d.singularities.len() <= 1);
                if !(disks && single && systolic_part_connected(&dec)) {
                    bad.push(format!("{name}: disks {disks} single {single}"));
                }
            }
            Err(e) => bad.push(format!("{name}: {e}")),
        }
    }
    let names: Vec<&str> = fixpoints.iter().map(|(n, _)| n.as_str()).collect();
    outcome(bad.is_empty(), format!("{names:?}, failing {bad:?}"))
}

fn intersections() -> Outcome {
    let (mut pairs, mut bad) = (0, Vec::new());
    for (name, s) in corpus() {
        let Ok((sys, _)) = systole(&s, 1e-9) else { continue };
        let Ok(loops) = systolic_loops(&s, sys, 1e-9) else { continue };
        for i in 0..loops.len() {
            for j in i + 1..loops.len() {
                if loops[i].same_trace(&s, &loops[j]) {
                    continue;
                }
                if let Ok(Intersection::TwoPoints { angles, arcs }) = loops_meet(&s, &loops[i], &loops[j]) {
                    pairs += 1;
                    let arcs_ok = arcs.iter().all(|a| (a - 0.5 * sys).abs() <= 1e-6);
                    let angles_ok = angles.iter().all(|&t| t >= 4.0 * PI - 1e-6);
                    if !(arcs_ok && angles_ok) {
                        bad.push(format!("{name} loops {i},{j}: arcs {arcs:?} angles {angles:?}"));
                    }
                }
            }
        }
    }
    outcome(pairs > 0 && bad.is_empty(), format!("{pairs} pairs meeting twice, failing {bad:?}"))
}

fn bounds_ledger() -> Outcome {
    let t = Instant::now();
    let mut bad = Vec::new();
    for g in 2..=1_000_000u64 {
        let b = match bounds(g) {
            Ok(b) => b,
            Err(e) => {
                bad.push(format!("g {g}: {e}"));
                break;
            }
        };
        let gm = (g - 1) as u128;
        let ok = b.x == 8 * (g - 1) * (2 * g - 1)
            && b.chain <= b.q_stated_log2
            && b.q_bar == 32 * gm * gm + b.q
            && b.n0 == 20 * b.q_bar * b.q_bar
            && (b.n0 as f64) <= b.n0_stated_log2;
        if !ok {
            bad.push(format!("g {g}"));
            if bad.len() > 5 {
                break;
            }
        }
    }
    within(Duration::from_secs(5), t, outcome(bad.is_empty(), format!("genus 2 to 1e6, failing {bad:?}")))
}

fn sigma_bound() -> Outcome {
    let b = genus_two_sigma_bound();
    let mut low = f64::INFINITY;
    let mut bad = Vec::new();
    for (name, s) in corpus().into_iter().filter(|(_, s)| s.genus() == 2 && s.validate().valid && s.is_npc()) {
        match systole(&s, 1e-9) {
            Ok((sys, _)) => {
                let sigma = s.systolic_area(sys);
                low = low.min(sigma);
                if sigma < b - 1e-6 {
                    bad.push(name);
                }
            }
            Err(e) => bad.push(format!("{name}: {e}")),
        }
    }
    outcome(bad.is_empty() && low.is_finite(), format!("smallest sigma {low:.6} against {b:.6}, failing {bad:?}"))
}

fn determinism(a: &Result<Optimized, String>, b: &Result<Optimized, String>) -> Outcome {
    match (a, b) {
        (Ok(a), Ok(b)) => {
            let logs = serde_json::to_string(&a.log).unwrap() == serde_json::to_string(&b.log).unwrap();
            let outs = a.surface.to_cfs() == b.surface.to_cfs();
            let reports = serde_json::to_string(&a.report).unwrap() == serde_json::to_string(&b.report).unwrap();
            outcome(logs && outs && reports, format!("logs equal {logs}, outputs equal {outs}, reports equal {reports}"))
        }
        _ => outcome(false, "optimize failed"),
    }
}

fn run_optimize(s: &ConeSurface) -> (Result<Optimized, String>, Duration) {
    let t = Instant::now();
    let r = optimize(s, &OptimizeConfig::default()).map_err(|e| e.to_string());
    (r, t.elapsed())
}

#[test]
fn acceptance() {
    let input = three_pairs();
    let (first, spent) = run_optimize(&input);
    let (second, _) = run_optimize(&input);
    let mut fixpoints: Vec<(String, ConeSurface)> = vec![("octagon".into(), octagon(1.0).unwrap())];
    let extra = [
        ("three-pairs", input.clone()),
        ("one-pair", inserted(&octagon(1.0).unwrap(), 0, 0.3, 0.3, 0.15, 0.02).surface),
        ("example-4-10", conesys::generate::four_cylinder(PI / 4.0).unwrap()),
        ("three-cylinders", conesys::generate::three_cylinders(2.0).unwrap()),
    ];
    for (name, s) in extra {
        match optimize(&s, &OptimizeConfig::default()) {
            Ok(o) if !o.exhausted => fixpoints.push((format!("{name} fixpoint"), o.surface)),
            Ok(_) => fixpoints.push((format!("{name} (pass limit hit)"), s)),
            Err(e) => fixpoints.push((format!("{name} ({e})"), s)),
        }
    }
    let results = [
        ("gauss-bonnet", gauss_bonnet()),
        ("systole-oracle", oracle()),
        ("excision-bookkeeping", excisions()),
        ("systole-preservation", preservation()),
        ("merge-passes", merge_passes(&input, &first, spent)),
        ("fixpoint-structure", fixpoint_structure(&fixpoints)),
        ("two-point-intersections", intersections()),
        ("bounds-ledger", bounds_ledger()),
        ("genus-two-sigma", sigma_bound()),
        ("determinism", determinism(&first, &second)),
    ];
    for (i, (name, o)) in results.iter().enumerate() {
        println!("{} {:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    let failed: Vec<&str> = results.iter().filter(|(_, o)| !o.pass).map(|(n, _)| *n).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
