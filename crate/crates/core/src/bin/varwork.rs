fn main() {
    std::process::exit(varwork::cli::run_command(std::env::args_os()));
}
