//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on failure.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use htg_core::adaptive::depth_cap;
use htg_core::generate::{generate, CanonicalGrid};
use htg_core::io::{grid_to_string, parse_grid, write_mesh_native, MeshDocument};
use htg_core::{
    adaptive_surface, extract_selected_ids, extract_selected_locations, extract_surface_2d, extract_surface_3d,
    max_depth, view_rect, Camera2D, HyperTreeGrid, SelectionOutput, SelectionRequest,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::oracle;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let mut quads = 0;
    for i in 0..120 {
        let f = 2 + i % 2;
        let grid = support::random(&mut rng, 2, f, 6, if i % 2 == 0 { 0.0 } else { 0.2 });
        let cam = Camera2D::fit(&grid, 1024.0, 768.0, 1e-6);
        let cap = depth_cap(&cam, f).unwrap();
        ensure!(cap > grid.depth_limit(), "grid {i}: cap {cap} not above depth {}", grid.depth_limit());
        let adaptive = oracle::mesh_keys(&adaptive_surface(&grid, &cam).unwrap());
        let full = oracle::mesh_keys(&extract_surface_2d(&grid).unwrap());
        ensure!(adaptive == full, "grid {i}: adaptive {} quads vs full {}", adaptive.len(), full.len());
        quads += full.len();
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 10.0, "took {secs:.2} s");
    Ok(format!("120 grids, {quads} quads matched exactly in {secs:.2} s"))
}

fn eq1_checks() -> Outcome {
    let d = max_depth(1024.0, 1.0, 1.0, 2).unwrap();
    ensure!((d - 10.0).abs() <= 1e-12, "max_depth(1024,1,1,2) = {d}");
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..1000 {
        let w = rng.random_range(2.0..8192.0);
        let z = 2f64.powf(rng.random_range(-6.0..6.0));
        let f = rng.random_range(2..=3);
        let s1 = 2f64.powf(rng.random_range(-6.0..10.0));
        let s2 = 2f64.powf(rng.random_range(-6.0..10.0));
        let a = max_depth(w, z, s1, f).unwrap();
        let b = max_depth(w / 2.0, 2.0 * z, s1, f).unwrap();
        ensure!((a - b).abs() <= 1e-12, "(w,z)→(w/2,2z) changed {a} to {b}");
        if s1 != s2 {
            let (hi, lo) = if s1 > s2 { (s1, s2) } else { (s2, s1) };
            ensure!(
                max_depth(w, z, hi, f).unwrap() < max_depth(w, z, lo, f).unwrap(),
                "not decreasing in s at w={w} z={z} s={lo},{hi} f={f}"
            );
        }
    }
    Ok(format!("max_depth(1024,1,1,2) = {d}; 1000 tuples invariant and monotone"))
}

fn culling_effectiveness() -> Outcome {
    let mut report = Vec::new();
    for density in [0.0, 0.2] {
        let grid = generate(CanonicalGrid::Paper2d, 42, density).unwrap();
        let cells = oracle::decode(&grid);
        let (lo, hi) = grid.spec().bounds();
        let domain = (hi[0] - lo[0]) * (hi[1] - lo[1]);
        let center = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
        let full = extract_surface_2d(&grid).unwrap().quad_count();

        let count = |s: f64| -> Result<(usize, usize), String> {
            let cam = Camera2D::new(1000.0, 750.0, 1.0, s, center);
            let rect = view_rect(&cam, &grid).unwrap();
            let cap = depth_cap(&cam, 2).unwrap();
            let n = adaptive_surface(&grid, &cam).unwrap().quad_count();
            let want = oracle::adaptive(&cells, cap, rect.min, rect.max).len();
            ensure!(n == want, "s={s}: {n} quads, oracle {want}");
            Ok((n, cap))
        };
        let rect = view_rect(&Camera2D::new(1000.0, 750.0, 1.0, 1.0, center), &grid).unwrap();
        let coverage = rect.area() / domain;
        ensure!((0.45..=0.55).contains(&coverage), "view covers {coverage:.2} of the domain");

        let depth = grid.depth_limit();
        ensure!(depth >= 3, "paper2d depth {depth} too shallow");
        let (fine, fine_cap) = count(1.0)?;
        ensure!(fine < full, "frustum did not cull: {fine} vs {full}");
        // Place the cap at the grid depth, then two levels shallower.
        let s_at = |cap: usize| 1000.0 / 2f64.powf(cap as f64 + 0.5);
        let (at_depth, cap_a) = count(s_at(depth))?;
        let (coarse, cap_b) = count(s_at(depth - 2))?;
        ensure!(cap_a == depth && cap_b + 2 == cap_a, "caps {cap_a}, {cap_b}");
        ensure!(at_depth == fine, "cap at grid depth changed the count: {at_depth} vs {fine}");
        ensure!(coarse < at_depth, "cap {cap_b} did not reduce: {coarse} vs {at_depth}");
        report.push(format!(
            "mask {density}: full {full}, view {:.0}% cap {fine_cap} → {fine}, cap {cap_b} → {coarse}",
            coverage * 100.0
        ));
    }
    Ok(report.join("; "))
}

fn frustum_soundness_completeness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let mut pairs = 0;
    let mut violations = 0;
    let mut emitted = 0usize;
    for i in 0..1000 {
        let grid = support::random(&mut rng, 2, 2 + i % 2, 5, if i % 3 == 0 { 0.0 } else { 0.15 });
        let cells = oracle::decode(&grid);
        let (lo, hi) = grid.spec().bounds();
        for _ in 0..100 {
            let cam = Camera2D::new(
                rng.random_range(8.0..2048.0),
                rng.random_range(8.0..2048.0),
                2f64.powf(rng.random_range(-2.0..6.0)),
                2f64.powf(rng.random_range(-3.0..9.0)),
                [rng.random_range(lo[0] - 1.0..hi[0] + 1.0), rng.random_range(lo[1] - 1.0..hi[1] + 1.0)],
            );
            let rect = view_rect(&cam, &grid).unwrap();
            let cap = depth_cap(&cam, grid.factor()).unwrap();
            let mesh = adaptive_surface(&grid, &cam).unwrap();
            pairs += 1;
            emitted += mesh.quad_count();
            let keys = oracle::mesh_keys(&mesh);
            let ids: std::collections::HashSet<u64> = keys.iter().map(|k| k.2).collect();
            // Soundness.
            for q in 0..mesh.quad_count() {
                let (qlo, qhi) = mesh.quad_bounds(q);
                if !rect.intersects(qlo, qhi) {
                    violations += 1;
                }
            }
            // Completeness.
            for c in cells.iter().filter(|c| c.leaf && !c.masked && oracle::rect_intersects(c, rect.min, rect.max)) {
                let covering = if c.depth <= cap {
                    Some(c)
                } else {
                    let mut a = c;
                    while a.depth > cap {
                        a = &cells[a.parent.unwrap()];
                    }
                    Some(a)
                };
                if !covering.is_some_and(|a| ids.contains(&a.gid)) {
                    violations += 1;
                }
            }
        }
    }
    ensure!(violations == 0, "{violations} violations in {pairs} pairs");
    Ok(format!("{pairs} (grid, camera) pairs, {emitted} quads, 0 violations"))
}

fn surface_3d() -> Outcome {
    for f in [2usize, 3] {
        for k in 0..=3 {
            let grid = generate(CanonicalGrid::Uniform { dimension: 3, factor: f, depth: k }, 0, 0.0).unwrap();
            let n = extract_surface_3d(&grid).unwrap().quad_count();
            ensure!(n == 6 * f.pow(2 * k as u32), "uniform(3,{f},{k}): {n} quads");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut faces = 0;
    for i in 0..60 {
        let grid = support::random(&mut rng, 3, 2 + i % 2, 4, 0.25);
        let mesh = extract_surface_3d(&grid).unwrap();
        let want = oracle::surface_3d(&oracle::decode(&grid));
        ensure!(oracle::mesh_keys(&mesh) == want, "random grid {i}: {} faces vs oracle {}", mesh.quad_count(), want.len());
        faces += want.len();
    }
    Ok(format!("uniform counts exact for f∈{{2,3}}, k∈0..3; 60 masked random grids, {faces} faces matched"))
}

fn selection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let (mut by_loc, mut by_id) = (0, 0);
    for i in 0..120 {
        let (d, f) = [(2, 2), (2, 3), (3, 2), (3, 3)][i % 4];
        let grid = support::random(&mut rng, d, f, if d == 2 { 5 } else { 3 }, 0.2);
        let cells = oracle::decode(&grid);
        let (lo, hi) = grid.spec().bounds();
        let mut points: Vec<Vec<f64>> =
            (0..25).map(|_| (0..d).map(|a| rng.random_range(lo[a] - 0.1..hi[a] + 0.1)).collect()).collect();
        for c in cells.iter().step_by(7).take(10) {
            points.push(c.lo[..d].to_vec());
            points.push(c.hi[..d].to_vec());
        }
        let ids: Vec<u64> = (0..20).map(|_| rng.random_range(0..grid.total_cells() as u64 + 3)).collect();
        let mut previous: Option<(Vec<u64>, Vec<u64>)> = None;
        for include_masked in [false, true] {
            let loc_req = SelectionRequest::locations(points.clone()).include_masked(include_masked);
            let id_req = SelectionRequest::ids(ids.clone()).include_masked(include_masked);
            let loc = extract_selected_locations(&grid, &loc_req).unwrap().selected_ids();
            let idsel = extract_selected_ids(&grid, &id_req).unwrap().selected_ids();
            ensure!(loc == oracle::locations(&cells, &points, hi, include_masked), "grid {i}: location oracle");
            ensure!(idsel == oracle::ids(&cells, &ids, include_masked), "grid {i}: id oracle");
            let loc_mask = extract_selected_locations(&grid, &loc_req.preserve_topology(true)).unwrap();
            let id_mask = extract_selected_ids(&grid, &id_req.preserve_topology(true)).unwrap();
            ensure!(matches!(loc_mask, SelectionOutput::Mask(_)), "mask mode returned a mesh");
            ensure!(loc_mask.selected_ids() == loc && id_mask.selected_ids() == idsel, "grid {i}: modes disagree");
            if let Some((pl, pi)) = &previous {
                ensure!(pl.iter().all(|x| loc.contains(x)), "grid {i}: include_masked shrank location selection");
                // A masked coarse match can stop descent, so compare by coverage of leaves.
                ensure!(idsel.len() >= pi.len() || covers(&cells, &idsel, pi), "grid {i}: include_masked shrank id selection");
            }
            by_loc += loc.len();
            by_id += idsel.len();
            previous = Some((loc, idsel));
        }
    }
    Ok(format!("120 grids; {by_loc} location and {by_id} id selections matched; modes agree"))
}

/// Every cell in `inner` is selected in `outer` or has a selected ancestor there.
fn covers(cells: &[oracle::OracleCell], outer: &[u64], inner: &[u64]) -> bool {
    inner.iter().all(|&g| {
        let mut at = Some(g as usize);
        while let Some(i) = at {
            if outer.contains(&cells[i].gid) {
                return true;
            }
            at = cells[i].parent;
        }
        false
    })
}

fn native(doc: MeshDocument) -> Vec<u8> {
    let mut buf = Vec::new();
    write_mesh_native(&doc, &mut buf).unwrap();
    buf
}

fn all_outputs(grid: &HyperTreeGrid) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    if grid.dimension() == 2 {
        out.push(native(MeshDocument::PolyMesh(extract_surface_2d(grid).unwrap())));
        let cam = Camera2D::new(640.0, 480.0, 2.0, 4.0, [1.0, 1.0]);
        out.push(native(MeshDocument::PolyMesh(adaptive_surface(grid, &cam).unwrap())));
    } else {
        out.push(native(MeshDocument::PolyMesh(extract_surface_3d(grid).unwrap())));
    }
    let (lo, hi) = grid.spec().bounds();
    let mid: Vec<f64> = (0..grid.dimension()).map(|a| (lo[a] + hi[a]) / 2.0).collect();
    for req in [
        SelectionRequest::ids((0..grid.total_cells() as u64).step_by(5).collect()),
        SelectionRequest::locations(vec![mid, lo[..grid.dimension()].to_vec()]),
    ] {
        for pt in [false, true] {
            let r = req.clone().preserve_topology(pt).include_masked(pt);
            let doc = match htg_core::extract_selection(grid, &r).unwrap() {
                SelectionOutput::Mask(b) => MeshDocument::selection_mask(&b),
                SelectionOutput::Mesh(m) => MeshDocument::UnstructuredMesh(m),
            };
            out.push(native(doc));
        }
    }
    out
}

fn round_trip_determinism(bin: &Path, dir: &Path) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut grids: Vec<HyperTreeGrid> = vec![
        generate(CanonicalGrid::Paper2d, 42, 0.2).unwrap(),
        generate(CanonicalGrid::Paper3d, 42, 0.2).unwrap(),
    ];
    for i in 0..20 {
        let (d, f) = [(2, 2), (2, 3), (3, 2), (3, 3)][i % 4];
        grids.push(support::random(&mut rng, d, f, 3, 0.2));
    }
    for (i, grid) in grids.iter().enumerate() {
        let back = parse_grid(&grid_to_string(grid)).unwrap();
        ensure!(grid_to_string(&back) == grid_to_string(grid), "grid {i}: text not stable");
        ensure!(all_outputs(&back) == all_outputs(grid), "grid {i}: outputs differ after round trip");
        ensure!(all_outputs(grid) == all_outputs(grid), "grid {i}: repeated runs differ");
    }
    // Whole-CLI determinism: files written twice must match byte for byte.
    let mut files = Vec::new();
    for run in 0..2 {
        let g = dir.join(format!("det{run}.json"));
        let s = dir.join(format!("det{run}.obj"));
        htg(bin, &["gen", "--name", "paper3d", "--seed", "7", "--mask-density", "0.3", "--out", path(&g)])?;
        htg(bin, &["surface", "--grid", path(&g), "--out", path(&s), "--format", "obj"])?;
        files.push((std::fs::read(&g).unwrap(), std::fs::read(&s).unwrap()));
    }
    ensure!(files[0] == files[1], "CLI outputs differ between runs");
    Ok(format!("{} grids round-tripped with byte-identical outputs; CLI gen/surface reruns identical", grids.len()))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Runs the CLI and returns its summary line.
fn htg(bin: &Path, args: &[&str]) -> Result<String, String> {
    let out = Command::new(bin).args(args).output().map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "htg {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    stdout.lines().last().map(str::to_string).ok_or_else(|| "no summary line".into())
}

fn summary_field(line: &str, key: &str) -> f64 {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| panic!("{key} missing in {line:?}"))
}

fn performance(bin: &Path, dir: &Path) -> Outcome {
    let grid = dir.join("big.json");
    htg(bin, &["gen", "--name", "uniform(2,2,10)", "--out", path(&grid)])?;
    let stats = htg(bin, &["stats", "--grid", path(&grid), "--out", path(&dir.join("big-stats.json"))])?;
    let leaves = summary_field(&stats, "output_cells");
    ensure!(leaves >= 1e6, "only {leaves} leaves");
    // 1000 px window at zoom 20 on a unit domain: a 0.05 × 0.05 view (0.25%).
    let camera = "1000,1000,20,1,0.3,0.6";
    let mut best_full = f64::INFINITY;
    let mut best_adaptive = f64::INFINITY;
    let (mut full_n, mut adaptive_n) = (0.0, 0.0);
    for _ in 0..3 {
        let full = htg(bin, &["surface", "--grid", path(&grid)])?;
        let adaptive = htg(bin, &["adaptive", "--grid", path(&grid), "--camera", camera])?;
        best_full = best_full.min(summary_field(&full, "elapsed_ms"));
        best_adaptive = best_adaptive.min(summary_field(&adaptive, "elapsed_ms"));
        full_n = summary_field(&full, "output_cells");
        adaptive_n = summary_field(&adaptive, "output_cells");
    }
    let count_ratio = full_n / adaptive_n;
    let speedup = best_full / best_adaptive.max(1e-3);
    ensure!(count_ratio >= 100.0, "quad ratio {count_ratio:.1} ({full_n} / {adaptive_n})");
    ensure!(speedup >= 10.0, "speedup {speedup:.1} ({best_full} ms / {best_adaptive} ms)");
    Ok(format!(
        "{leaves} leaves: full {full_n} quads in {best_full:.1} ms, adaptive {adaptive_n} quads in {best_adaptive:.2} ms \
         ({count_ratio:.0}× fewer, {speedup:.0}× faster)"
    ))
}

fn main() {
    let bin = Path::new(env!("CARGO_BIN_EXE_htg"));
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("oracle equivalence (adaptive ≡ full)", Box::new(oracle_equivalence)),
        ("max-depth formula checks", Box::new(eq1_checks)),
        ("culling effectiveness on paper2d", Box::new(culling_effectiveness)),
        ("frustum soundness/completeness", Box::new(frustum_soundness_completeness)),
        ("3D surface", Box::new(surface_3d)),
        ("selection oracles", Box::new(selection)),
        ("round-trip + determinism", Box::new(|| round_trip_determinism(bin, dir.path()))),
        ("desk-scale performance", Box::new(|| performance(bin, dir.path()))),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{name}] {detail} ({secs:.2} s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{name}] {detail} ({secs:.2} s)");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
