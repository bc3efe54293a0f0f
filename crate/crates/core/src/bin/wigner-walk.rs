fn main() {
    std::process::exit(wigner_walk::cli::main_with_args(std::env::args_os()));
}
