fn main() {
    std::process::exit(damped_search::cli::main_with_args(std::env::args_os()));
}
