fn main() {
    std::process::exit(pxp_tdvp::cli::main_with_args(std::env::args_os()));
}
