use agvdance::cli::{
    parse_scenario, render_scenario, FieldSpec, GraphSpec, Harmonics, OutputSpec, PatternSpec, PointSpec, Scenario,
    SimSpec, StartSpec,
};
use agvdance::cspace::monotone_words;
use proptest::prelude::*;

fn point(edge: usize) -> impl Strategy<Value = PointSpec> {
    (0.1..1.0f64).prop_map(move |v| PointSpec(edge, v))
}

fn start() -> impl Strategy<Value = StartSpec> {
    (1..=3usize, 1..=2usize)
        .prop_flat_map(|(i, k)| (point(i), point((i + k - 1) % 3 + 1)))
        .prop_map(|(x, y)| StartSpec { x, y })
}

fn field() -> impl Strategy<Value = FieldSpec> {
    let words = monotone_words(3);
    prop_oneof![
        (0.1..2.0f64).prop_map(|fin_speed| FieldSpec::Circulating { fin_speed }),
        (1..=3usize, 1..=2usize, any::<bool>()).prop_flat_map(|(i, k, fins)| {
            (point(i), point((i + k - 1) % 3 + 1)).prop_map(move |(goal_x, goal_y)| FieldSpec::Navigation {
                goal_x,
                goal_y,
                fins,
            })
        }),
        (
            0.3..0.7f64,
            prop::collection::vec(-0.05..0.05f64, 0..3),
            prop::collection::vec(-0.05..0.05f64, 0..3),
            0.5..4.0f64,
            0.5..3.0f64,
            any::<bool>()
        )
            .prop_map(|(a0, cos, sin, omega, gain, fins)| FieldSpec::Tuned {
                f_harmonics: Harmonics { a0, cos, sin },
                omega,
                gain,
                fins,
            }),
        (
            0..words.len(),
            1.0..3.0f64,
            prop::option::of(0.05..0.25f64),
            prop::option::of(4.0..10.0f64)
        )
            .prop_map(move |(w, omega, arc_margin, gain)| FieldSpec::Chords {
                word: words[w].clone(),
                omega,
                arc_margin,
                gain,
            }),
    ]
}

fn sim() -> impl Strategy<Value = SimSpec> {
    (
        prop::option::of(0.0..50.0f64),
        1e-4..1e-2f64,
        0.0..0.05f64,
        0.01..0.1f64,
        0.01..0.1f64,
        prop::collection::vec(start(), 0..3),
        (1..5usize, any::<u64>(), 1..1000usize),
    )
        .prop_map(|(t_max, dt, delta, tol, epsilon, starts, (count, seed, samples))| SimSpec {
            t_max,
            dt,
            delta,
            tol,
            epsilon,
            starts,
            count,
            seed,
            samples,
        })
}

fn scenario() -> impl Strategy<Value = Scenario> {
    let graph = prop_oneof![
        Just(GraphSpec::Named("Y".into())),
        Just(GraphSpec::Explicit {
            vertices: vec![0, 1, 2, 3],
            edges: vec![[1, 0, 1], [2, 0, 2], [3, 0, 3]],
        }),
    ];
    let output = (prop::option::of("[a-z]{1,8}\\.csv"), prop::option::of("[a-z]{1,8}\\.svg"))
        .prop_map(|(csv, svg)| OutputSpec { csv, svg });
    let pattern = prop::option::of((1..=3usize).prop_map(|start| PatternSpec {
        block: vec![1, 2],
        start,
    }));
    (graph, field(), sim(), output, pattern).prop_map(|(graph, field, sim, output, pattern)| Scenario {
        graph,
        field,
        sim,
        output,
        pattern,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn render_then_parse_is_identity(s in scenario()) {
        let text = render_scenario(&s);
        let back = parse_scenario(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back, s);
    }
}
