fn main() {
    std::process::exit(tailsum_cli::main_with_args(std::env::args_os()));
}
