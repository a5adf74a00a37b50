//! Every example runs to completion.

macro_rules! example {
    ($module:ident, $file:literal) => {
        #[allow(dead_code)]
        #[path = $file]
        mod $module;
    };
}

example!(povm_basics, "../examples/povm_basics.rs");
example!(delayed_choice, "../examples/delayed_choice.rs");
example!(hardy, "../examples/hardy.rs");
example!(three_boxes, "../examples/three_boxes.rs");
example!(quantum_eraser, "../examples/quantum_eraser.rs");
example!(sequential_realization, "../examples/sequential_realization.rs");
example!(grid_duality, "../examples/grid_duality.rs");
example!(double_slit, "../examples/double_slit.rs");

#[test]
fn finite_examples_run() {
    povm_basics::run().unwrap();
    delayed_choice::run().unwrap();
    hardy::run().unwrap();
    three_boxes::run().unwrap();
    sequential_realization::run().unwrap();
    quantum_eraser::run(&[]).unwrap();
    let custom: Vec<String> = ["0.6", "0", "0", "0.8"].map(String::from).to_vec();
    quantum_eraser::run(&custom).unwrap();
}

#[test]
fn grid_examples_run() {
    grid_duality::run().unwrap();
    double_slit::run(false).unwrap();
}

example!(export_results, "../examples/export_results.rs");

#[test]
fn export_example_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    export_results::run(dir.path().to_path_buf()).unwrap();
    assert!(dir.path().join("hardy.json").is_file());
    assert!(dir.path().join("hardy").join("psi_o_gg.csv").is_file());
}
