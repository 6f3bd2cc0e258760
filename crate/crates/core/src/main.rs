fn main() {
    std::process::exit(e4frame::cli::main_with_args(std::env::args_os()));
}
