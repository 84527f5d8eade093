//! Every example runs to completion.

#[allow(dead_code)]
mod acceptance_report {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/acceptance_report.rs"));
}

#[allow(dead_code)]
mod coherent_states {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/coherent_states.rs"));
}

#[allow(dead_code)]
mod environment_oracle {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/environment_oracle.rs"));
}

#[allow(dead_code)]
mod equations_of_motion {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/equations_of_motion.rs"));
}

#[allow(dead_code)]
mod exact_diagonalization {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/exact_diagonalization.rs"));
}

#[allow(dead_code)]
mod gram_matrix {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/gram_matrix.rs"));
}

#[allow(dead_code)]
mod large_spin {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/large_spin.rs"));
}

#[allow(dead_code)]
mod leakage_rate {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/leakage_rate.rs"));
}

#[allow(dead_code)]
mod parameter_sweep {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/parameter_sweep.rs"));
}

#[allow(dead_code)]
mod trajectory_csv {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/trajectory_csv.rs"));
}

#[allow(dead_code)]
mod transfer_blocks {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/transfer_blocks.rs"));
}

#[test]
fn acceptance_report_runs() {
    acceptance_report::run_example().expect("acceptance_report");
}

#[test]
fn coherent_states_runs() {
    coherent_states::run_example().expect("coherent_states");
}

#[test]
fn environment_oracle_runs() {
    environment_oracle::run_example().expect("environment_oracle");
}

#[test]
fn equations_of_motion_runs() {
    equations_of_motion::run_example().expect("equations_of_motion");
}

#[test]
fn exact_diagonalization_runs() {
    exact_diagonalization::run_example().expect("exact_diagonalization");
}

#[test]
fn gram_matrix_runs() {
    gram_matrix::run_example().expect("gram_matrix");
}

#[test]
fn large_spin_runs() {
    large_spin::run_example().expect("large_spin");
}

#[test]
fn leakage_rate_runs() {
    leakage_rate::run_example().expect("leakage_rate");
}

#[test]
fn parameter_sweep_runs() {
    parameter_sweep::run_example().expect("parameter_sweep");
}

#[test]
fn trajectory_csv_runs() {
    trajectory_csv::run_example().expect("trajectory_csv");
}

#[test]
fn transfer_blocks_runs() {
    transfer_blocks::run_example().expect("transfer_blocks");
}
