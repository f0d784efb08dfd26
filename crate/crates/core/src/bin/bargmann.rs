fn main() {
    std::process::exit(bargmann::cli::main_with_args(std::env::args_os()));
}
