fn main() {
    std::process::exit(ffprog::cli::main_with_args(std::env::args_os()));
}
