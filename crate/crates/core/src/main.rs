fn main() {
    std::process::exit(nodal_hardy::cli::parse_and_run(std::env::args_os()));
}
