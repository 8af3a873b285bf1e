fn main() {
    std::process::exit(amoebot::cli::main_with_args(std::env::args_os()));
}
