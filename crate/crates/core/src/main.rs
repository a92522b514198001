fn main() {
    std::process::exit(conjforge::harness::cli::main_with_args(std::env::args_os()));
}
