use wqa::classify::ClassifyOptions;
use wqa::invariant::{
    boundary_residual, cycle_at_infinity, segment_set_at, trace_boundary_curve, BoundaryCurve, BoundaryFamily,
    CurveStatus, CurveTrace, Endpoint,
};
use wqa::map::{branch_matrix, step};
use wqa::scan::{classify_cell, SeedStrategy};
use wqa::symbolic::char_poly_at;
use wqa::{MapParams, ParamId};

fn p(dl: f64, dr: f64, tl: f64, tr: f64) -> MapParams {
    MapParams::new(dl, dr, tl, tr).unwrap()
}

fn trace(family: &str, sweep: (f64, f64), solve: (f64, f64), steps: usize) -> BoundaryCurve {
    let spec = CurveTrace::new(
        family.parse().unwrap(),
        p(0.9, 0.7, 0.0, 0.0),
        ParamId::TauL,
        ParamId::TauR,
        sweep,
        solve,
        steps,
    );
    trace_boundary_curve(&spec).unwrap()
}

fn at(c: &BoundaryCurve, i: usize) -> MapParams {
    let pt = c.points[i];
    p(0.9, 0.7, 0.0, 0.0).with(c.sweep_axis, pt.sweep).with(c.solve_axis, pt.solve)
}

#[test]
fn traced_points_are_roots() {
    for fam in ["B_LRn1:5", "B_L2Rn2:6", "B_RLn1:4", "E_LRn1:5", "E_L2Rn2:5", "B_LR"] {
        let c = trace(fam, (-3.0, 3.0), (-3.0, 3.0), 121);
        assert!(!c.points.is_empty(), "{fam}");
        let family: BoundaryFamily = fam.parse().unwrap();
        for i in 0..c.points.len() {
            let q = at(&c, i);
            let r = boundary_residual(&q, &family);
            assert!(r.abs() <= 1e-9, "{fam} at {q}: {r:e}");
            if family.kind.letter() == 'B' {
                assert!(char_poly_at(&q, &family.sigma(), 1.0).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn segment_endpoints_close_up_under_the_map() {
    for fam in ["B_LRn1:5", "B_L2Rn2:5", "B_RLn1:5", "B_R2Ln2:6"] {
        let c = trace(fam, (-3.0, 3.0), (-3.0, 3.0), 61);
        let family: BoundaryFamily = fam.parse().unwrap();
        let mut checked = 0;
        for i in 0..c.points.len() {
            if !matches!(
                c.points[i].status,
                CurveStatus::AdmissibleBounded | CurveStatus::AdmissibleUnbounded
            ) {
                continue;
            }
            let q = at(&c, i);
            let set = segment_set_at(&q, &family.sigma()).unwrap();
            let n = set.len();
            for (j, s) in set.segments.iter().enumerate() {
                let next = &set.segments[(j + 1) % n];
                // an endpoint may sit on the border, so map it with its segment's own branch
                let m = branch_matrix(&q, s.side);
                for e in [s.start(), s.end()] {
                    if let Endpoint::Finite(x) = e {
                        assert!(next.contains(m.apply(x), 1e-7), "{fam} at {q}: S_{j} endpoint");
                    }
                }
                for u in [0.1, 0.5, 0.9] {
                    let x = s.point(s.coord_at(u));
                    assert!(next.contains(step(&q, x), 1e-7), "{fam} at {q}: S_{j} interior");
                }
            }
            checked += 1;
        }
        assert!(checked > 0, "{fam}");
    }
}

fn divergent(q: &MapParams) -> bool {
    let opts = ClassifyOptions {
        max_iter: 60_000,
        transient: 5_000,
        fingerprint_samples: 20_000,
        ..Default::default()
    };
    classify_cell(q, &SeedStrategy::Default.seeds(q), &opts).unwrap().has_divergence()
}

#[test]
fn divergence_boundary_matches_the_scan() {
    let family: BoundaryFamily = "B_LRn1:5".parse().unwrap();
    let c = trace("B_LRn1:5", (-2.4, -1.45), (0.5, 2.0), 20);
    let pts: Vec<usize> = (0..c.points.len())
        .filter(|&i| c.points[i].status == CurveStatus::AdmissibleUnbounded)
        .collect();
    assert_eq!(pts.len(), 20);
    for i in pts {
        let q = at(&c, i);
        let below = q.with(ParamId::TauR, q.tau_r - 5e-3);
        let above = q.with(ParamId::TauR, q.tau_r + 5e-3);
        assert!(cycle_at_infinity(&below, &family.sigma()).is_some(), "{q}");
        assert!(cycle_at_infinity(&above, &family.sigma()).is_none(), "{q}");
        assert!(divergent(&below), "no divergence below {q}");
        assert!(!divergent(&above), "divergence above {q}");
    }
}
