macro_rules! example {
    ($name:ident, $test:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }

        #[test]
        fn $test() {
            $name::run_example().expect(concat!(stringify!($name), " example should run"));
        }
    };
}

example!(scalar_prox, scalar_prox_runs);
example!(pareto_segment, pareto_segment_runs);
example!(weight_sweep, weight_sweep_runs);
example!(location_minimax, location_minimax_runs);
example!(demand_exp_transform, demand_exp_transform_runs);
example!(criticality_check, criticality_check_runs);
example!(custom_problem, custom_problem_runs);
