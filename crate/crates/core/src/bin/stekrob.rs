fn main() {
    std::process::exit(stekrob::cli::main_with_args(std::env::args_os()));
}
