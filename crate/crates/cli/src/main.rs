fn main() {
    std::process::exit(spinpump_cli::run(std::env::args_os()));
}
