fn main() {
    std::process::exit(cqec_cli::app::main_with_args(std::env::args_os()));
}
