fn main() {
    std::process::exit(ffkr_cli::main_with_args(std::env::args_os()));
}
