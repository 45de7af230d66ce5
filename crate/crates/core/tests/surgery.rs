use nlsgraph_core::closed_forms::soliton_energy;
use nlsgraph_core::minimize::normalized_gradient_flow;
use nlsgraph_core::rearrange::{self, cells_from_samples};
use nlsgraph_core::surgery::{self, CompetitorShape};
use nlsgraph_core::{shapes, GraphFunction, MetricGraph, RunStatus, SolverConfig};
use std::f64::consts::PI;

fn cfg() -> SolverConfig {
    let mut c = SolverConfig::for_problem(4.0, 1.0);
    // Tails rearranged onto a halfline decay at half the rate.
    c.truncation_length *= 2.0;
    c.h_target = 0.02;
    c
}

/// Every edge endpoint reads the single vertex value.
fn assert_continuous(u: &GraphFunction) {
    for (e, em) in u.mesh().edges().iter().enumerate() {
        let v = u.edge_values(e);
        assert_eq!(v[0].to_bits(), u.vertex_value(em.a).to_bits());
        assert_eq!(v[em.cells].to_bits(), u.vertex_value(em.b).to_bits());
    }
}

fn suite() -> Vec<(&'static str, MetricGraph, CompetitorShape)> {
    vec![
        ("pendant", shapes::pendant_line(1.0).unwrap(), CompetitorShape::Pendant),
        ("signpost", shapes::signpost(1.0, 2.0 * PI).unwrap(), CompetitorShape::Signpost),
        ("tadpole", shapes::tadpole(2.0 * PI).unwrap(), CompetitorShape::Tadpole),
        ("fork3", shapes::fork(&[1.0, 1.0, 1.0]).unwrap(), CompetitorShape::Fork3),
        ("fork_unequal", shapes::fork(&[0.5, 1.0, 2.0]).unwrap(), CompetitorShape::Fork3),
    ]
}

#[test]
fn competitors_beat_the_soliton() {
    let level = soliton_energy(4.0, 1.0).unwrap();
    for (name, g, shape) in suite() {
        let u = surgery::competitor(shape, &g, 4.0, 1.0, &cfg()).unwrap();
        assert!((u.mass() - 1.0).abs() <= 1e-10, "{name}");
        assert_continuous(&u);
        let e = u.energy(4.0).total;
        assert!(e < level - 1e-8, "{name}: {e} vs {level}");
    }
}

#[test]
fn folded_soliton_is_stationary() {
    let c = cfg();
    let h = c.h_target;
    let level = soliton_energy(4.0, 1.0).unwrap();
    for cuts in [vec![], vec![1.0], vec![1.0, 2.5], vec![0.5, 1.5, 2.0]] {
        let g = shapes::bubble_tower(&cuts).unwrap();
        let u = surgery::fold_on_bubble_tower(&g, 4.0, 1.0, &c).unwrap();
        assert_continuous(&u);
        assert!((u.energy(4.0).total - level).abs() < 1e-6, "{cuts:?}");
        assert!(u.grad_residual(4.0).unwrap() <= 10.0 * h, "{cuts:?}");
    }
    // Matching slices on the two arcs of a pair.
    let g = shapes::bubble_tower(&[1.0, 2.5]).unwrap();
    let u = surgery::fold_on_bubble_tower(&g, 4.0, 1.0, &c).unwrap();
    let (a, b) = (g.edge_index("p1a").unwrap(), g.edge_index("p1b").unwrap());
    assert_eq!(u.edge_values(a), u.edge_values(b));
    assert!(matches!(
        surgery::fold_on_bubble_tower(&shapes::star(3).unwrap(), 4.0, 1.0, &c),
        Err(nlsgraph_core::Error::NotABubbleTower)
    ));
}

#[test]
fn short_pendant_still_gains() {
    let c = cfg();
    let line = surgery::fold_on_bubble_tower(&shapes::line(), 4.0, 1.0, &c).unwrap();
    let g = shapes::pendant_line(0.01).unwrap();
    let u = surgery::pendant_competitor(&g, 4.0, 1.0, &c).unwrap();
    assert!(u.energy(4.0).total < line.energy(4.0).total);
}

#[test]
fn head_rearrangement_lowers_kinetic() {
    let cut = surgery::cut_soliton(4.0, 1.0, 1.0).unwrap();
    let cells = cells_from_samples(cut.head_step, &cut.head);
    let star = rearrange::monotone_rearrangement_of_cells(&cells).unwrap();
    let head = rearrange::PlProfile {
        knots: cut.head.iter().enumerate().map(|(k, &v)| (k as f64 * cut.head_step, v)).collect(),
    };
    assert!(star.kinetic() < head.kinetic());
    assert!((star.kinetic() - 0.25 * head.kinetic()).abs() < 1e-6 * head.kinetic());
}

#[test]
fn signpost_stem_is_monotone() {
    let g = shapes::signpost(1.0, 2.0 * PI).unwrap();
    let u = surgery::signpost_competitor(&g, 4.0, 1.0, &cfg()).unwrap();
    let v = u.edge_values(g.edge_index("stem").unwrap());
    assert!(v.windows(2).all(|w| w[1] >= w[0]), "stem runs from the root up to the loop");
    assert!(shapes::signpost(1.0, 0.0).is_err());
}

#[test]
fn flow_from_competitor_descends() {
    let mut c = cfg();
    c.h_target = 0.05;
    let g = shapes::pendant_line(1.0).unwrap();
    let u = surgery::pendant_competitor(&g, 4.0, 1.0, &c).unwrap();
    let r = normalized_gradient_flow(4.0, 1.0, &u, &c).unwrap();
    assert_eq!(r.status, RunStatus::Converged);
    assert!(r.energy <= u.energy(4.0).total);
}
