fn main() {
    std::process::exit(abdyn::cli::main_with_args(std::env::args_os()));
}
