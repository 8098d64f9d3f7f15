fn main() {
    std::process::exit(moving_well::cli::main_with_args(std::env::args_os()));
}
