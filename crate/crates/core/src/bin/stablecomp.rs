fn main() {
    std::process::exit(stablecomp::cli::main_with_args(std::env::args_os().collect()));
}
