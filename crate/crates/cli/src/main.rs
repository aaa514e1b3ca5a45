fn main() {
    std::process::exit(eikonal_cli::run_command(std::env::args_os()));
}
