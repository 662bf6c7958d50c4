fn main() {
    std::process::exit(rtsim::cli::main_with_args(std::env::args_os()));
}
