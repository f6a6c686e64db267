fn main() {
    std::process::exit(radialcone::cli::main_with_args(std::env::args_os()));
}
