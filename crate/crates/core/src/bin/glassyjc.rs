fn main() {
    std::process::exit(glassyjc::cli::main_with_args(std::env::args_os()));
}
