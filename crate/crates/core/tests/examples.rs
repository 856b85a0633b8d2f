macro_rules! example {
    ($module:ident, $test:ident, $file:literal) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(parse_and_norms, parse_and_norms_runs, "parse_and_norms.rs");
example!(hypothesis_check, hypothesis_check_runs, "hypothesis_check.rs");
example!(warmup_bounds, warmup_bounds_runs, "warmup_bounds.rs");
example!(theorem_bounds, theorem_bounds_runs, "theorem_bounds.rs");
example!(optimize_g, optimize_g_runs, "optimize_g.rs");
example!(spectral_oracle, spectral_oracle_runs, "spectral_oracle.rs");
example!(lemma_fuzz, lemma_fuzz_runs, "lemma_fuzz.rs");
example!(verify_problem, verify_problem_runs, "verify_problem.rs");
example!(remark_table, remark_table_runs, "remark_table.rs");
example!(catalogue, catalogue_runs, "catalogue.rs");
